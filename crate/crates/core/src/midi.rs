//! Standard MIDI File reading: note-on/note-off pairing into timed note
//! events, with tick-to-seconds conversion driven by the tempo map.
//!
//! Supports SMF formats 0 and 1 with metrical (ticks-per-quarter-note)
//! timing. Set-tempo events from every track contribute to one global tempo
//! map, and durations integrate piecewise across tempo changes. A note-on
//! with velocity zero counts as a note-off. Recoverable oddities (dangling
//! note-ons, unknown chunks, zero-length notes) become warnings rather than
//! errors.
//!
//! [`SmfBuilder`] is the matching minimal writer, used to synthesize the
//! fixture corpus and test scores.

use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MidiError {
    #[error("file truncated at offset {offset}: {context}")]
    UnexpectedEof { offset: usize, context: &'static str },
    #[error("not a MIDI file: header chunk id {found:02x?}")]
    BadHeaderMagic { found: [u8; 4] },
    #[error("header chunk too short: {len} bytes")]
    BadHeaderLength { len: u32 },
    #[error("unsupported SMF format {0} (only formats 0 and 1 are supported)")]
    UnsupportedFormat(u16),
    #[error("SMPTE time division is not supported; use ticks-per-quarter-note files")]
    UnsupportedTiming,
    #[error("time division must be positive")]
    InvalidDivision,
    #[error("variable-length quantity longer than 4 bytes at offset {offset}")]
    VarLenTooLong { offset: usize },
    #[error("data byte {byte:#04x} with no running status at offset {offset}")]
    OrphanDataByte { offset: usize, byte: u8 },
}

/// One sounded note, in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoteEvent {
    pub onset: f64,
    pub duration: f64,
    /// MIDI note number 0-127.
    pub pitch: u8,
    /// Index of the containing track in file order.
    pub track: usize,
}

/// Parse result: per-track note lists (each sorted by onset, then pitch)
/// plus any recoverable-problem warnings.
#[derive(Debug, Clone)]
pub struct ParsedMidi {
    pub tracks: Vec<Vec<NoteEvent>>,
    pub warnings: Vec<String>,
}

impl ParsedMidi {
    pub fn note_count(&self) -> usize {
        self.tracks.iter().map(Vec::len).sum()
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn take(&mut self, n: usize, context: &'static str) -> Result<&'a [u8], MidiError> {
        if self.remaining() < n {
            return Err(MidiError::UnexpectedEof {
                offset: self.pos,
                context,
            });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self, context: &'static str) -> Result<u8, MidiError> {
        Ok(self.take(1, context)?[0])
    }

    fn u16(&mut self, context: &'static str) -> Result<u16, MidiError> {
        let b = self.take(2, context)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    fn u32(&mut self, context: &'static str) -> Result<u32, MidiError> {
        let b = self.take(4, context)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn var_len(&mut self) -> Result<u32, MidiError> {
        let start = self.pos;
        let mut value: u32 = 0;
        for _ in 0..4 {
            let byte = self.u8("variable-length quantity")?;
            value = (value << 7) | u32::from(byte & 0x7F);
            if byte & 0x80 == 0 {
                return Ok(value);
            }
        }
        Err(MidiError::VarLenTooLong { offset: start })
    }
}

/// Piecewise-constant tempo: sorted segments of (start tick, cumulative
/// seconds, microseconds per quarter note).
struct TempoMap {
    ppq: f64,
    segments: Vec<(u64, f64, f64)>,
}

const DEFAULT_US_PER_QN: f64 = 500_000.0;

impl TempoMap {
    fn new(ppq: u16, mut changes: Vec<(u64, u32)>) -> Self {
        changes.sort_by_key(|&(tick, _)| tick);
        let ppq = f64::from(ppq);
        let mut segments: Vec<(u64, f64, f64)> = vec![(0, 0.0, DEFAULT_US_PER_QN)];
        for (tick, us) in changes {
            let &(last_tick, last_secs, last_us) = segments.last().unwrap();
            let secs = last_secs + (tick - last_tick) as f64 * last_us / (ppq * 1e6);
            if tick == last_tick {
                // Same-tick changes: the last one in file order wins.
                *segments.last_mut().unwrap() = (tick, secs, f64::from(us));
            } else {
                segments.push((tick, secs, f64::from(us)));
            }
        }
        Self { ppq, segments }
    }

    fn seconds_at(&self, tick: u64) -> f64 {
        let idx = self
            .segments
            .partition_point(|&(t, _, _)| t <= tick)
            .saturating_sub(1);
        let (start, secs, us) = self.segments[idx];
        secs + (tick - start) as f64 * us / (self.ppq * 1e6)
    }
}

/// Raw note with tick times, before tempo conversion.
struct TickNote {
    on: u64,
    off: u64,
    pitch: u8,
}

/// Parses a Standard MIDI File (format 0 or 1) into per-track note events.
pub fn parse_midi(bytes: &[u8]) -> Result<ParsedMidi, MidiError> {
    let mut r = Reader::new(bytes);
    let magic = r.take(4, "header chunk id")?;
    if magic != b"MThd" {
        return Err(MidiError::BadHeaderMagic {
            found: [magic[0], magic[1], magic[2], magic[3]],
        });
    }
    let header_len = r.u32("header length")?;
    if header_len < 6 {
        return Err(MidiError::BadHeaderLength { len: header_len });
    }
    let format = r.u16("format")?;
    if format > 1 {
        return Err(MidiError::UnsupportedFormat(format));
    }
    let declared_tracks = r.u16("track count")?;
    let division = r.u16("time division")?;
    if division & 0x8000 != 0 {
        return Err(MidiError::UnsupportedTiming);
    }
    if division == 0 {
        return Err(MidiError::InvalidDivision);
    }
    // Skip any extra header bytes a future revision might add.
    r.take(header_len as usize - 6, "header extension")?;

    let mut warnings = Vec::new();
    let mut tempo_changes: Vec<(u64, u32)> = Vec::new();
    let mut tick_tracks: Vec<Vec<TickNote>> = Vec::new();

    while r.remaining() > 0 {
        if r.remaining() < 8 {
            return Err(MidiError::UnexpectedEof {
                offset: r.pos,
                context: "chunk header",
            });
        }
        let chunk_id = r.take(4, "chunk id")?;
        let chunk_len = r.u32("chunk length")? as usize;
        let chunk = r.take(chunk_len, "chunk body")?;
        if chunk_id != b"MTrk" {
            warnings.push(format!(
                "skipping unknown chunk {:?}",
                String::from_utf8_lossy(chunk_id)
            ));
            continue;
        }
        let track_index = tick_tracks.len();
        let notes = parse_track(
            chunk,
            track_index,
            &mut tempo_changes,
            &mut warnings,
        )?;
        tick_tracks.push(notes);
    }

    if tick_tracks.len() != usize::from(declared_tracks) {
        warnings.push(format!(
            "header declares {} tracks, found {}",
            declared_tracks,
            tick_tracks.len()
        ));
    }

    let tempo = TempoMap::new(division, tempo_changes);
    let mut tracks = Vec::with_capacity(tick_tracks.len());
    for (track, notes) in tick_tracks.into_iter().enumerate() {
        let mut events: Vec<NoteEvent> = Vec::with_capacity(notes.len());
        for n in notes {
            let onset = tempo.seconds_at(n.on);
            let duration = tempo.seconds_at(n.off) - onset;
            if duration > 0.0 {
                events.push(NoteEvent {
                    onset,
                    duration,
                    pitch: n.pitch,
                    track,
                });
            } else {
                warnings.push(format!(
                    "track {track}: dropping zero-length note (pitch {})",
                    n.pitch
                ));
            }
        }
        events.sort_by(|a, b| {
            a.onset
                .total_cmp(&b.onset)
                .then_with(|| a.pitch.cmp(&b.pitch))
        });
        tracks.push(events);
    }

    Ok(ParsedMidi { tracks, warnings })
}

fn parse_track(
    chunk: &[u8],
    track_index: usize,
    tempo_changes: &mut Vec<(u64, u32)>,
    warnings: &mut Vec<String>,
) -> Result<Vec<TickNote>, MidiError> {
    let mut r = Reader::new(chunk);
    let mut tick: u64 = 0;
    let mut running_status: Option<u8> = None;
    // FIFO per (channel, pitch): earliest unmatched note-on ends first.
    let mut open: std::collections::HashMap<(u8, u8), VecDeque<u64>> =
        std::collections::HashMap::new();
    let mut notes: Vec<TickNote> = Vec::new();

    while r.remaining() > 0 {
        tick += u64::from(r.var_len()?);
        let first = r.u8("event status")?;
        let status = if first & 0x80 != 0 {
            if first < 0xF0 {
                running_status = Some(first);
            }
            first
        } else {
            // Data byte: reuse running status, un-consume the byte.
            r.pos -= 1;
            running_status.ok_or(MidiError::OrphanDataByte {
                offset: r.pos,
                byte: first,
            })?
        };

        match status {
            0x80..=0x8F | 0x90..=0x9F => {
                let data = r.take(2, "note event data")?;
                let (pitch, velocity) = (data[0] & 0x7F, data[1] & 0x7F);
                let channel = status & 0x0F;
                let is_on = (status & 0xF0 == 0x90) && velocity > 0;
                if is_on {
                    open.entry((channel, pitch)).or_default().push_back(tick);
                } else {
                    match open.get_mut(&(channel, pitch)).and_then(VecDeque::pop_front) {
                        Some(on) => notes.push(TickNote {
                            on,
                            off: tick,
                            pitch,
                        }),
                        None => warnings.push(format!(
                            "track {track_index}: note-off without note-on (pitch {pitch})"
                        )),
                    }
                }
            }
            0xA0..=0xAF | 0xB0..=0xBF | 0xE0..=0xEF => {
                r.take(2, "channel event data")?;
            }
            0xC0..=0xCF | 0xD0..=0xDF => {
                r.take(1, "channel event data")?;
            }
            0xF0 | 0xF7 => {
                running_status = None;
                let len = r.var_len()? as usize;
                r.take(len, "sysex body")?;
            }
            0xFF => {
                running_status = None;
                let meta_type = r.u8("meta type")?;
                let len = r.var_len()? as usize;
                let data = r.take(len, "meta body")?;
                match meta_type {
                    0x51 if len == 3 => {
                        let us = u32::from_be_bytes([0, data[0], data[1], data[2]]);
                        tempo_changes.push((tick, us));
                    }
                    0x2F => break,
                    _ => {}
                }
            }
            _ => {
                // 0xF1-0xF6, 0xF8-0xFE have no place in an SMF track; skip.
                warnings.push(format!(
                    "track {track_index}: skipping unexpected status byte {status:#04x}"
                ));
            }
        }
    }

    // Resolve dangling note-ons at the end-of-track tick.
    let mut dangling: Vec<(u8, u8, u64)> = open
        .into_iter()
        .flat_map(|((ch, pitch), ons)| ons.into_iter().map(move |on| (ch, pitch, on)))
        .collect();
    dangling.sort_unstable();
    for (_, pitch, on) in dangling {
        warnings.push(format!(
            "track {track_index}: note-on without note-off (pitch {pitch}), closed at track end"
        ));
        notes.push(TickNote {
            on,
            off: tick,
            pitch,
        });
    }
    Ok(notes)
}

/// Per-track payload accepted by [`SmfBuilder`].
#[derive(Debug, Clone, Copy)]
enum BuilderEvent {
    NoteOn { pitch: u8, velocity: u8 },
    NoteOff { pitch: u8 },
    Tempo { us_per_qn: u32 },
}

/// Minimal SMF writer for synthesizing scores: metrical timing, channel 0,
/// format 0 or 1 depending on track count.
#[derive(Debug, Clone)]
pub struct SmfBuilder {
    ppq: u16,
    tracks: Vec<Vec<(u64, BuilderEvent)>>,
}

impl SmfBuilder {
    pub fn new(ppq: u16) -> Self {
        assert!(ppq > 0 && ppq & 0x8000 == 0, "ppq must be metrical");
        Self {
            ppq,
            tracks: Vec::new(),
        }
    }

    /// Adds an empty track and returns its index.
    pub fn add_track(&mut self) -> usize {
        self.tracks.push(Vec::new());
        self.tracks.len() - 1
    }

    /// Schedules a note on `track` from `start_tick` for `duration_ticks`.
    pub fn note(&mut self, track: usize, start_tick: u64, duration_ticks: u64, pitch: u8) {
        self.tracks[track].push((
            start_tick,
            BuilderEvent::NoteOn {
                pitch,
                velocity: 96,
            },
        ));
        self.tracks[track].push((start_tick + duration_ticks, BuilderEvent::NoteOff { pitch }));
    }

    /// Schedules a set-tempo event on `track`.
    pub fn tempo(&mut self, track: usize, tick: u64, us_per_qn: u32) {
        self.tracks[track].push((tick, BuilderEvent::Tempo { us_per_qn }));
    }

    /// Convenience: tempo in beats per minute.
    pub fn tempo_bpm(&mut self, track: usize, tick: u64, bpm: f64) {
        self.tempo(track, tick, (60_000_000.0 / bpm).round() as u32);
    }

    pub fn build(&self) -> Vec<u8> {
        let format: u16 = if self.tracks.len() > 1 { 1 } else { 0 };
        let mut out = Vec::new();
        out.extend_from_slice(b"MThd");
        out.extend_from_slice(&6u32.to_be_bytes());
        out.extend_from_slice(&format.to_be_bytes());
        out.extend_from_slice(&(self.tracks.len() as u16).to_be_bytes());
        out.extend_from_slice(&self.ppq.to_be_bytes());

        for events in &self.tracks {
            let mut sorted = events.clone();
            // Same-tick order: tempo, then note-offs, then note-ons, so
            // repeated pitches chain without overlap.
            sorted.sort_by_key(|&(tick, ev)| {
                let rank = match ev {
                    BuilderEvent::Tempo { .. } => 0u8,
                    BuilderEvent::NoteOff { .. } => 1,
                    BuilderEvent::NoteOn { .. } => 2,
                };
                (tick, rank)
            });
            let mut body = Vec::new();
            let mut last_tick = 0u64;
            for (tick, ev) in sorted {
                write_var_len(&mut body, (tick - last_tick) as u32);
                last_tick = tick;
                match ev {
                    BuilderEvent::NoteOn { pitch, velocity } => {
                        body.extend_from_slice(&[0x90, pitch, velocity]);
                    }
                    BuilderEvent::NoteOff { pitch } => {
                        body.extend_from_slice(&[0x80, pitch, 0]);
                    }
                    BuilderEvent::Tempo { us_per_qn } => {
                        let b = us_per_qn.to_be_bytes();
                        body.extend_from_slice(&[0xFF, 0x51, 0x03, b[1], b[2], b[3]]);
                    }
                }
            }
            body.extend_from_slice(&[0x00, 0xFF, 0x2F, 0x00]);
            out.extend_from_slice(b"MTrk");
            out.extend_from_slice(&(body.len() as u32).to_be_bytes());
            out.extend_from_slice(&body);
        }
        out
    }
}

fn write_var_len(out: &mut Vec<u8>, mut value: u32) {
    let mut stack = [0u8; 4];
    let mut n = 0;
    loop {
        stack[n] = (value & 0x7F) as u8;
        value >>= 7;
        n += 1;
        if value == 0 {
            break;
        }
    }
    for i in (0..n).rev() {
        let cont = if i > 0 { 0x80 } else { 0 };
        out.push(stack[i] | cont);
    }
}
