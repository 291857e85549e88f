//! Statistical descriptors of a barcode: persistent mean, standard
//! deviation, and entropy of the bar-length distribution.
//!
//! Mean and standard deviation are taken over finite bars only. Entropy uses
//! every bar, substituting `m + 1` for infinite deaths where `m` is the
//! largest finite death; the resulting normalized lengths form the
//! probability distribution. Logarithms are natural, so entropy is in nats
//! (recorded in output metadata).

use crate::persistence::Barcode;
use serde::Serialize;

/// Mean of the finite bar lengths, or 0 when there are none. Use
/// [`BarcodeStats`] to distinguish the empty case.
pub fn persistent_mean(bc: &Barcode) -> f64 {
    let lengths: Vec<f64> = bc.finite_lengths().collect();
    if lengths.is_empty() {
        return 0.0;
    }
    lengths.iter().sum::<f64>() / lengths.len() as f64
}

/// Sample standard deviation (divisor `|I| - 1`) of the finite bar lengths;
/// 0 when there are fewer than two finite bars.
pub fn persistent_sd(bc: &Barcode) -> f64 {
    let lengths: Vec<f64> = bc.finite_lengths().collect();
    if lengths.len() <= 1 {
        return 0.0;
    }
    let mean = lengths.iter().sum::<f64>() / lengths.len() as f64;
    let var = lengths.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>()
        / (lengths.len() - 1) as f64;
    var.sqrt()
}

/// Shannon entropy of the normalized bar lengths, with infinite deaths
/// replaced by `m + 1` (`m` = largest finite death, taken as 0 when every
/// bar is infinite). `None` for an empty barcode, where the distribution is
/// undefined. `0 * ln 0` counts as 0.
pub fn persistent_entropy(bc: &Barcode) -> Option<f64> {
    if bc.is_empty() {
        return None;
    }
    let m = bc
        .bars()
        .iter()
        .filter(|b| !b.is_infinite())
        .map(|b| b.death)
        .fold(0.0f64, f64::max);
    let lengths: Vec<f64> = bc
        .bars()
        .iter()
        .map(|b| {
            let death = if b.is_infinite() { m + 1.0 } else { b.death };
            death - b.birth
        })
        .collect();
    let total: f64 = lengths.iter().sum();
    let entropy = lengths
        .iter()
        .map(|&l| {
            let p = l / total;
            if p > 0.0 {
                -p * p.ln()
            } else {
                0.0
            }
        })
        .sum();
    Some(entropy)
}

/// All three descriptors of a barcode plus the flags downstream consumers
/// need: an empty barcode contributes the triple (0, 0, 0), and all-infinite
/// barcodes record that the `m = 0` substitution convention was used.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BarcodeStats {
    pub dimension: usize,
    pub mean: f64,
    pub sd: f64,
    pub entropy: f64,
    pub finite_bars: usize,
    pub infinite_bars: usize,
    /// No bars at all; the triple above is the (0, 0, 0) placeholder.
    pub empty: bool,
    /// Every bar is infinite; entropy used the `m = 0` convention.
    pub all_infinite: bool,
}

impl BarcodeStats {
    pub fn from_barcode(bc: &Barcode) -> Self {
        let infinite = bc.infinite_count();
        let finite = bc.len() - infinite;
        Self {
            dimension: bc.dimension(),
            mean: persistent_mean(bc),
            sd: persistent_sd(bc),
            entropy: persistent_entropy(bc).unwrap_or(0.0),
            finite_bars: finite,
            infinite_bars: infinite,
            empty: bc.is_empty(),
            all_infinite: !bc.is_empty() && finite == 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::Bar;
    use approx::assert_abs_diff_eq;

    fn barcode(bars: &[(f64, f64)]) -> Barcode {
        Barcode::new(
            0,
            bars.iter().map(|&(b, d)| Bar::new(b, d).unwrap()).collect(),
        )
    }

    #[test]
    fn mean_of_identical_lengths() {
        assert_eq!(persistent_mean(&barcode(&[(0.0, 1.0), (0.0, 1.0)])), 1.0);
    }

    #[test]
    fn mean_excludes_infinite_bars() {
        let bc = barcode(&[(0.0, 1.0), (0.0, 3.0), (0.0, f64::INFINITY)]);
        assert_eq!(persistent_mean(&bc), 2.0);
        // Adding an infinite bar changes neither mean nor sd.
        let without = barcode(&[(0.0, 1.0), (0.0, 3.0)]);
        assert_eq!(persistent_mean(&bc), persistent_mean(&without));
        assert_eq!(persistent_sd(&bc), persistent_sd(&without));
    }

    #[test]
    fn mean_of_empty_barcode_is_flagged_zero() {
        let bc = barcode(&[]);
        assert_eq!(persistent_mean(&bc), 0.0);
        let stats = BarcodeStats::from_barcode(&bc);
        assert!(stats.empty);
        assert_eq!((stats.mean, stats.sd, stats.entropy), (0.0, 0.0, 0.0));
    }

    #[test]
    fn sd_examples() {
        assert_abs_diff_eq!(
            persistent_sd(&barcode(&[(0.0, 1.0), (0.0, 3.0)])),
            2.0f64.sqrt(),
            epsilon = 1e-15
        );
        assert_eq!(persistent_sd(&barcode(&[(0.0, 5.0)])), 0.0);
        assert_eq!(
            persistent_sd(&barcode(&[(0.0, 1.0), (0.0, 1.0), (0.0, 1.0)])),
            0.0
        );
    }

    #[test]
    fn entropy_uniform_is_log_count() {
        for r in [1usize, 2, 5, 8] {
            let bars: Vec<(f64, f64)> = (0..r).map(|_| (0.0, 2.5)).collect();
            let e = persistent_entropy(&barcode(&bars)).unwrap();
            assert_abs_diff_eq!(e, (r as f64).ln(), epsilon = 1e-12);
        }
    }

    #[test]
    fn entropy_mixed_finite_infinite() {
        // m = 2, substituted lengths (2, 3), p = (0.4, 0.6).
        let e = persistent_entropy(&barcode(&[(0.0, 2.0), (0.0, f64::INFINITY)])).unwrap();
        let expected = -(0.4f64 * 0.4f64.ln() + 0.6 * 0.6f64.ln());
        assert_abs_diff_eq!(e, expected, epsilon = 1e-15);
        assert_abs_diff_eq!(e, 0.6730116670092565, epsilon = 1e-12);
    }

    #[test]
    fn entropy_single_bar_is_zero() {
        assert_eq!(persistent_entropy(&barcode(&[(0.0, 5.0)])).unwrap(), 0.0);
    }

    #[test]
    fn entropy_empty_is_undefined() {
        assert_eq!(persistent_entropy(&barcode(&[])), None);
    }

    #[test]
    fn entropy_all_infinite_uses_unit_lengths() {
        let bars: Vec<(f64, f64)> = (0..4).map(|_| (0.0, f64::INFINITY)).collect();
        let bc = barcode(&bars);
        let e = persistent_entropy(&bc).unwrap();
        assert_abs_diff_eq!(e, 4.0f64.ln(), epsilon = 1e-12);
        let stats = BarcodeStats::from_barcode(&bc);
        assert!(stats.all_infinite);
        assert!(!stats.empty);
    }

    #[test]
    fn entropy_bounded_by_log_count() {
        let bc = barcode(&[(0.0, 1.0), (0.5, 4.0), (1.0, 1.5), (0.0, f64::INFINITY)]);
        let e = persistent_entropy(&bc).unwrap();
        assert!(e >= 0.0);
        assert!(e <= (bc.len() as f64).ln() + 1e-12);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn finite_barcode() -> impl Strategy<Value = Vec<(f64, f64)>> {
            proptest::collection::vec(
                (0.0f64..10.0, 0.001f64..10.0).prop_map(|(b, l)| (b, b + l)),
                1..12,
            )
        }

        proptest! {
            // Power-of-two scales commute with every operation exactly.
            #[test]
            fn mean_sd_scale_exactly_by_pow2(bars in finite_barcode(), k in -3i32..4) {
                let lambda = (2.0f64).powi(k);
                let scaled: Vec<(f64, f64)> =
                    bars.iter().map(|&(b, d)| (b * lambda, d * lambda)).collect();
                let (bc, bcs) = (barcode(&bars), barcode(&scaled));
                prop_assert_eq!(persistent_mean(&bcs), lambda * persistent_mean(&bc));
                prop_assert_eq!(persistent_sd(&bcs), lambda * persistent_sd(&bc));
            }

            #[test]
            fn mean_sd_scale_within_tolerance(bars in finite_barcode(), lambda in 0.1f64..10.0) {
                let scaled: Vec<(f64, f64)> =
                    bars.iter().map(|&(b, d)| (b * lambda, d * lambda)).collect();
                let (bc, bcs) = (barcode(&bars), barcode(&scaled));
                let m = persistent_mean(&bc);
                prop_assert!((persistent_mean(&bcs) - lambda * m).abs() <= 1e-9 * (1.0 + lambda * m.abs()));
                let s = persistent_sd(&bc);
                prop_assert!((persistent_sd(&bcs) - lambda * s).abs() <= 1e-9 * (1.0 + lambda * s.abs()));
            }

            #[test]
            fn entropy_scale_invariant_on_finite_barcodes(bars in finite_barcode(), lambda in 0.1f64..10.0) {
                let scaled: Vec<(f64, f64)> =
                    bars.iter().map(|&(b, d)| (b * lambda, d * lambda)).collect();
                let e0 = persistent_entropy(&barcode(&bars)).unwrap();
                let e1 = persistent_entropy(&barcode(&scaled)).unwrap();
                prop_assert!((e0 - e1).abs() <= 1e-9);
            }

            // Infinite bars are born at 0 in every pipeline-produced
            // barcode (they are dimension-0 components).
            #[test]
            fn entropy_well_defined_and_bounded(
                bars in finite_barcode(),
                infinite_count in 0usize..4,
            ) {
                let mut all = bars.clone();
                all.extend((0..infinite_count).map(|_| (0.0, f64::INFINITY)));
                let bc = barcode(&all);
                let e = persistent_entropy(&bc).unwrap();
                prop_assert!(e.is_finite());
                prop_assert!(e >= -1e-12);
                prop_assert!(e <= (bc.len() as f64).ln() + 1e-12);
            }
        }
    }
}
