//! Pitch-class transition probability matrices.
//!
//! Notes are serialized by (onset, then ascending pitch) and every
//! consecutive pair contributes one transition between pitch classes
//! (MIDI pitch mod 12, C = 0 through B = 11). A transition's weight is the
//! product `u * v` of the two tones' durational accents (or raw durations on
//! request). Rests can be ignored, can suppress the transitions they
//! interrupt, or can attenuate them by `f = 1 / (s/(u*v) + 1)` where `s` is
//! the rest length in seconds. The accumulated weights are normalized to a
//! probability distribution.

use crate::graph::WeightedDigraph;
use crate::midi::NoteEvent;
use serde::Serialize;
use thiserror::Error;

/// The twelve pitch-class names in chromatic order starting at C.
pub const PITCH_CLASSES: [&str; 12] = [
    "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B",
];

/// Gaps no longer than this (seconds) count as no rest at all; absorbs MIDI
/// quantization jitter and legato overlaps.
pub const GAP_CLAMP_SECONDS: f64 = 1e-3;

#[derive(Debug, Error, PartialEq)]
pub enum TransitionError {
    #[error("note duration must be positive, got {0}")]
    NonPositiveDuration(f64),
    #[error("accent parameters must be positive: tau = {tau}, index = {index}")]
    InvalidAccentParams { tau: f64, index: f64 },
}

/// How transitions interrupted by a rest are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum RestMode {
    /// Count every consecutive pair, rests notwithstanding.
    #[default]
    Ignore,
    /// Drop pairs separated by a rest.
    Omit,
    /// Attenuate pairs by `1 / (s/(u*v) + 1)`.
    Weighted,
}

/// Parameters of the durational-accent curve `(1 - exp(-d/tau))^index`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AccentParams {
    /// Saturation time constant, seconds.
    pub tau: f64,
    /// Accent exponent.
    pub index: f64,
}

impl Default for AccentParams {
    fn default() -> Self {
        Self {
            tau: 0.5,
            index: 2.0,
        }
    }
}

impl AccentParams {
    pub fn validate(&self) -> Result<(), TransitionError> {
        if self.tau > 0.0 && self.index > 0.0 {
            Ok(())
        } else {
            Err(TransitionError::InvalidAccentParams {
                tau: self.tau,
                index: self.index,
            })
        }
    }
}

/// Saturating perceptual accent of a tone duration: 0 as the duration
/// vanishes, 1 as it grows long.
pub fn durational_accent(duration: f64, params: AccentParams) -> Result<f64, TransitionError> {
    if !(duration > 0.0) {
        return Err(TransitionError::NonPositiveDuration(duration));
    }
    params.validate()?;
    Ok((1.0 - (-duration / params.tau).exp()).powf(params.index))
}

/// The rest attenuation `f = 1 / (s/(uv) + 1)`: 1 at `s = 0`, decreasing in
/// the rest length `s`, increasing in the transition weight `uv`.
pub fn rest_weight_factor(gap: f64, uv: f64) -> f64 {
    1.0 / (gap / uv + 1.0)
}

/// Settings for [`transition_matrix`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionConfig {
    pub rest_mode: RestMode,
    pub accent: AccentParams,
    /// Weight transitions by raw durations in seconds instead of accents.
    pub use_raw_durations: bool,
}

impl Default for TransitionConfig {
    fn default() -> Self {
        Self {
            rest_mode: RestMode::Ignore,
            accent: AccentParams::default(),
            use_raw_durations: false,
        }
    }
}

/// A 12x12 pitch-class transition probability matrix. Entries sum to 1
/// whenever at least one transition was counted, and are all zero otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    entries: [[f64; 12]; 12],
    rest_mode: RestMode,
}

impl TransitionMatrix {
    pub fn entries(&self) -> &[[f64; 12]; 12] {
        &self.entries
    }

    /// Probability of the transition from pitch class `from` to `to`.
    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.entries[from][to]
    }

    pub fn rest_mode(&self) -> RestMode {
        self.rest_mode
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().flatten().sum()
    }

    /// True when no transition was counted.
    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|&x| x == 0.0)
    }

    /// The intervallic transition graph: vertices are the twelve pitch
    /// classes, nonzero entries become directed weighted edges.
    pub fn to_digraph(&self) -> WeightedDigraph {
        let rows: Vec<Vec<f64>> = self.entries.iter().map(|r| r.to_vec()).collect();
        let labels = PITCH_CLASSES.iter().map(|s| s.to_string()).collect();
        WeightedDigraph::from_adjacency(labels, &rows)
            .expect("probability matrix is a valid adjacency matrix")
    }
}

/// Builds the transition probability matrix of a (single-stream) note list.
///
/// Inputs with fewer than two notes produce the all-zero matrix; callers
/// should surface a warning. Simultaneous onsets are serialized by ascending
/// pitch, and overlapping or abutting notes count as having no rest between
/// them.
pub fn transition_matrix(
    notes: &[NoteEvent],
    config: &TransitionConfig,
) -> Result<TransitionMatrix, TransitionError> {
    config.accent.validate()?;
    let mut ordered: Vec<&NoteEvent> = notes.iter().collect();
    ordered.sort_by(|a, b| {
        a.onset
            .total_cmp(&b.onset)
            .then_with(|| a.pitch.cmp(&b.pitch))
    });

    let mut entries = [[0.0f64; 12]; 12];
    let mut total = 0.0f64;
    for pair in ordered.windows(2) {
        let (cur, next) = (pair[0], pair[1]);
        let u = tone_weight(cur, config)?;
        let v = tone_weight(next, config)?;
        let raw_gap = next.onset - (cur.onset + cur.duration);
        let gap = if raw_gap <= GAP_CLAMP_SECONDS {
            0.0
        } else {
            raw_gap
        };
        let weight = match config.rest_mode {
            RestMode::Ignore => u * v,
            RestMode::Omit => {
                if gap > 0.0 {
                    continue;
                }
                u * v
            }
            RestMode::Weighted => u * v * rest_weight_factor(gap, u * v),
        };
        entries[usize::from(cur.pitch % 12)][usize::from(next.pitch % 12)] += weight;
        total += weight;
    }

    if total > 0.0 {
        for row in &mut entries {
            for x in row {
                *x /= total;
            }
        }
    }
    Ok(TransitionMatrix {
        entries,
        rest_mode: config.rest_mode,
    })
}

fn tone_weight(note: &NoteEvent, config: &TransitionConfig) -> Result<f64, TransitionError> {
    if config.use_raw_durations {
        if !(note.duration > 0.0) {
            return Err(TransitionError::NonPositiveDuration(note.duration));
        }
        Ok(note.duration)
    } else {
        durational_accent(note.duration, config.accent)
    }
}
