//! Corpus-level analysis: per-work descriptor vectors, 2-D principal
//! component projections, and the dispersion of a group of works.
//!
//! A work is summarized by 24 numbers: for each of its four instruments in
//! score order, the (mean, sd, entropy) triple of the dimension-0 barcode
//! followed by the same triple for dimension 1. Dispersion is the square
//! root of the average Euclidean deviation-norm from the centroid (note:
//! norms, not squared norms, so it scales as the square root of a global
//! rescaling). It is always computed on the raw 24-vectors, never on PCA
//! coordinates.

use crate::descriptors::BarcodeStats;
use crate::persistence::Barcodes;
use nalgebra::DMatrix;
use thiserror::Error;

/// Column names of the descriptor vector, instrument-major, dimension 0
/// before 1, (mean, sd, entropy) innermost.
pub const DESCRIPTOR_COLUMNS: [&str; 24] = [
    "m1_0", "sd1_0", "e1_0", "m1_1", "sd1_1", "e1_1", //
    "m2_0", "sd2_0", "e2_0", "m2_1", "sd2_1", "e2_1", //
    "m3_0", "sd3_0", "e3_0", "m3_1", "sd3_1", "e3_1", //
    "m4_0", "sd4_0", "e4_0", "m4_1", "sd4_1", "e4_1",
];

pub const INSTRUMENT_COUNT: usize = 4;
pub const DESCRIPTOR_LEN: usize = 24;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("expected exactly {expected} instruments, got {found}")]
    WrongInstrumentCount { expected: usize, found: usize },
    #[error("need at least {required} points, got {found}")]
    TooFewPoints { required: usize, found: usize },
    #[error("point {index} has dimension {found}, expected {expected}")]
    InconsistentDimensions {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("points must have at least 2 coordinates, got {0}")]
    TooFewDimensions(usize),
    #[error("total variance is zero; principal components are undefined")]
    DegenerateVariance,
}

/// One work as a labeled point in R^24.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkDescriptor {
    pub work_id: String,
    pub values: [f64; DESCRIPTOR_LEN],
}

/// Builds the 24-vector for a work from its four instruments' barcodes, in
/// score order. Empty barcodes contribute (0, 0, 0).
pub fn work_descriptor(
    work_id: impl Into<String>,
    instruments: &[Barcodes],
) -> Result<WorkDescriptor, AnalysisError> {
    if instruments.len() != INSTRUMENT_COUNT {
        return Err(AnalysisError::WrongInstrumentCount {
            expected: INSTRUMENT_COUNT,
            found: instruments.len(),
        });
    }
    let mut values = [0.0; DESCRIPTOR_LEN];
    for (i, barcodes) in instruments.iter().enumerate() {
        for (d, bc) in [&barcodes.dim0, &barcodes.dim1].into_iter().enumerate() {
            let stats = BarcodeStats::from_barcode(bc);
            let base = i * 6 + d * 3;
            values[base] = stats.mean;
            values[base + 1] = stats.sd;
            values[base + 2] = stats.entropy;
        }
    }
    Ok(WorkDescriptor {
        work_id: work_id.into(),
        values,
    })
}

/// A corpus projected onto its top two principal components.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusProjection {
    /// Per-point coordinates in component space, in input order.
    pub coords: Vec<[f64; 2]>,
    /// Variances along the two components, descending.
    pub explained_variance: [f64; 2],
    /// The two unit-length component vectors (loadings).
    pub components: [Vec<f64>; 2],
}

fn check_points(points: &[Vec<f64>], required: usize) -> Result<usize, AnalysisError> {
    if points.len() < required {
        return Err(AnalysisError::TooFewPoints {
            required,
            found: points.len(),
        });
    }
    let dim = points[0].len();
    for (index, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(AnalysisError::InconsistentDimensions {
                index,
                found: p.len(),
                expected: dim,
            });
        }
    }
    Ok(dim)
}

fn centroid(points: &[Vec<f64>], dim: usize) -> Vec<f64> {
    let mut mean = vec![0.0; dim];
    for p in points {
        for (m, &x) in mean.iter_mut().zip(p) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= points.len() as f64;
    }
    mean
}

/// Projects points onto the top two principal components of their sample
/// covariance matrix (centering only, no variance scaling).
///
/// The sign of each component is fixed by making its largest-magnitude
/// loading positive (smallest index on ties), so repeated runs are
/// byte-identical.
pub fn pca_2d(points: &[Vec<f64>]) -> Result<CorpusProjection, AnalysisError> {
    let dim = check_points(points, 3)?;
    if dim < 2 {
        return Err(AnalysisError::TooFewDimensions(dim));
    }
    let n = points.len();
    let mean = centroid(points, dim);
    let centered: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.iter().zip(&mean).map(|(x, m)| x - m).collect())
        .collect();

    let mut cov = DMatrix::zeros(dim, dim);
    for row in &centered {
        for i in 0..dim {
            for j in i..dim {
                cov[(i, j)] += row[i] * row[j];
            }
        }
    }
    for i in 0..dim {
        for j in i..dim {
            let v = cov[(i, j)] / (n - 1) as f64;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    if cov.trace() == 0.0 {
        return Err(AnalysisError::DegenerateVariance);
    }

    let eig = nalgebra::SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut components: [Vec<f64>; 2] = [vec![0.0; dim], vec![0.0; dim]];
    let mut explained = [0.0; 2];
    for c in 0..2 {
        let col = eig.eigenvectors.column(order[c]);
        let mut v: Vec<f64> = col.iter().copied().collect();
        let lead = (0..dim)
            .max_by(|&a, &b| {
                v[a].abs()
                    .total_cmp(&v[b].abs())
                    .then(b.cmp(&a)) // prefer the smaller index on ties
            })
            .unwrap();
        if v[lead] < 0.0 {
            for x in &mut v {
                *x = -*x;
            }
        }
        explained[c] = eig.eigenvalues[order[c]].max(0.0);
        components[c] = v;
    }

    let coords = centered
        .iter()
        .map(|row| {
            [
                row.iter().zip(&components[0]).map(|(x, c)| x * c).sum(),
                row.iter().zip(&components[1]).map(|(x, c)| x * c).sum(),
            ]
        })
        .collect();

    Ok(CorpusProjection {
        coords,
        explained_variance: explained,
        components,
    })
}

/// Standardizes each coordinate to zero mean and unit sample variance.
/// Zero-variance coordinates are centered but not scaled.
pub fn zscore(points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, AnalysisError> {
    let dim = check_points(points, 2)?;
    let n = points.len();
    let mean = centroid(points, dim);
    let mut sd = vec![0.0; dim];
    for p in points {
        for (s, (&x, m)) in sd.iter_mut().zip(p.iter().zip(&mean)) {
            *s += (x - m) * (x - m);
        }
    }
    for s in &mut sd {
        *s = (*s / (n - 1) as f64).sqrt();
    }
    Ok(points
        .iter()
        .map(|p| {
            p.iter()
                .zip(mean.iter().zip(&sd))
                .map(|(&x, (m, &s))| if s > 0.0 { (x - m) / s } else { x - m })
                .collect()
        })
        .collect())
}

/// Dispersion of a set of points: the square root of the average Euclidean
/// deviation-norm from the centroid, with divisor `l - 1`.
pub fn dispersion(points: &[Vec<f64>]) -> Result<f64, AnalysisError> {
    let dim = check_points(points, 2)?;
    let mean = centroid(points, dim);
    let sum: f64 = points
        .iter()
        .map(|p| {
            p.iter()
                .zip(&mean)
                .map(|(x, m)| (x - m) * (x - m))
                .sum::<f64>()
                .sqrt()
        })
        .sum();
    Ok((sum / (points.len() - 1) as f64).sqrt())
}

/// Conventional root-mean-square spread (squared deviation norms), for
/// comparison with [`dispersion`]. Scales linearly under a global rescale.
pub fn dispersion_rms(points: &[Vec<f64>]) -> Result<f64, AnalysisError> {
    let dim = check_points(points, 2)?;
    let mean = centroid(points, dim);
    let sum: f64 = points
        .iter()
        .map(|p| {
            p.iter()
                .zip(&mean)
                .map(|(x, m)| (x - m) * (x - m))
                .sum::<f64>()
        })
        .sum();
    Ok((sum / (points.len() - 1) as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::{Bar, Barcode};
    use approx::assert_abs_diff_eq;

    fn barcodes(dim0: &[(f64, f64)], dim1: &[(f64, f64)]) -> Barcodes {
        let make = |dim: usize, bars: &[(f64, f64)]| {
            Barcode::new(
                dim,
                bars.iter().map(|&(b, d)| Bar::new(b, d).unwrap()).collect(),
            )
        };
        Barcodes {
            dim0: make(0, dim0),
            dim1: make(1, dim1),
            zero_length_dropped: [0, 0],
        }
    }

    #[test]
    fn descriptor_repeats_identical_instruments() {
        let one = barcodes(&[(0.0, 2.0), (0.0, f64::INFINITY)], &[(1.0, 2.0)]);
        let d = work_descriptor("w", &vec![one; 4]).unwrap();
        let block = &d.values[0..6];
        for i in 1..4 {
            assert_eq!(&d.values[i * 6..i * 6 + 6], block);
        }
    }

    #[test]
    fn descriptor_single_bar_block() {
        let inst = barcodes(&[(0.0, f64::INFINITY)], &[(1.0, 2.0)]);
        let d = work_descriptor("w", &vec![inst; 4]).unwrap();
        // dim-1 block of instrument 1: mean 1, sd 0, entropy 0.
        assert_eq!(&d.values[3..6], &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn descriptor_empty_dim1_is_zeros() {
        let inst = barcodes(&[(0.0, 1.0), (0.0, f64::INFINITY)], &[]);
        let d = work_descriptor("w", &vec![inst; 4]).unwrap();
        assert_eq!(&d.values[3..6], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn descriptor_wrong_count() {
        let inst = barcodes(&[(0.0, 1.0)], &[]);
        assert_eq!(
            work_descriptor("w", &vec![inst; 3]).unwrap_err(),
            AnalysisError::WrongInstrumentCount {
                expected: 4,
                found: 3
            }
        );
    }

    #[test]
    fn pca_rank_one_data_has_zero_second_variance() {
        let points: Vec<Vec<f64>> = (0..6)
            .map(|i| {
                let t = i as f64;
                vec![2.0 * t, -t, 0.5 * t]
            })
            .collect();
        let p = pca_2d(&points).unwrap();
        assert!(p.explained_variance[1].abs() < 1e-9);
        assert!(p.explained_variance[0] > 0.0);
    }

    #[test]
    fn pca_recovers_axis_aligned_data() {
        // Coordinates 0 and 1 carry sample variances 10 and 2.5; coordinate
        // 2 is constant. Distinct eigenvalues make the components the axes.
        let xs = [-4.0, -2.0, 0.0, 2.0, 4.0];
        let ys = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let points: Vec<Vec<f64>> = xs
            .iter()
            .zip(&ys)
            .map(|(&x, &y)| vec![x, y, 7.0])
            .collect();
        let p = pca_2d(&points).unwrap();
        assert_abs_diff_eq!(p.explained_variance[0], 10.0, epsilon = 1e-9);
        assert_abs_diff_eq!(p.explained_variance[1], 2.5, epsilon = 1e-9);
        for (i, c) in p.coords.iter().enumerate() {
            assert_abs_diff_eq!(c[0], xs[i], epsilon = 1e-9);
            assert_abs_diff_eq!(c[1], ys[i], epsilon = 1e-9);
        }
    }

    #[test]
    fn pca_components_are_orthonormal() {
        let points: Vec<Vec<f64>> = (0..10)
            .map(|i| {
                let t = i as f64;
                vec![t.sin(), (2.0 * t).cos(), 0.3 * t, t * t * 0.01]
            })
            .collect();
        let p = pca_2d(&points).unwrap();
        let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
        assert_abs_diff_eq!(dot(&p.components[0], &p.components[0]), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(dot(&p.components[1], &p.components[1]), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(dot(&p.components[0], &p.components[1]), 0.0, epsilon = 1e-9);
        assert!(p.explained_variance[0] >= p.explained_variance[1]);
    }

    #[test]
    fn pca_errors() {
        assert_eq!(
            pca_2d(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap_err(),
            AnalysisError::TooFewPoints {
                required: 3,
                found: 2
            }
        );
        let identical = vec![vec![1.0, 2.0, 3.0]; 4];
        assert_eq!(
            pca_2d(&identical).unwrap_err(),
            AnalysisError::DegenerateVariance
        );
        assert_eq!(
            pca_2d(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap_err(),
            AnalysisError::TooFewDimensions(1)
        );
    }

    #[test]
    fn dispersion_identical_points_is_zero() {
        let points = vec![vec![3.0, -1.0]; 5];
        assert_eq!(dispersion(&points).unwrap(), 0.0);
    }

    #[test]
    fn dispersion_two_point_fixture() {
        // Mean 1; deviations both 1; sum 2; /(l-1) = 2; sqrt = sqrt(2).
        let points = vec![vec![0.0], vec![2.0]];
        assert_abs_diff_eq!(
            dispersion(&points).unwrap(),
            2.0f64.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn dispersion_needs_two_points() {
        assert_eq!(
            dispersion(&[vec![1.0]]).unwrap_err(),
            AnalysisError::TooFewPoints {
                required: 2,
                found: 1
            }
        );
    }

    #[test]
    fn zscore_unit_variance() {
        let points = vec![vec![0.0, 5.0], vec![2.0, 5.0], vec![4.0, 5.0]];
        let z = zscore(&points).unwrap();
        let var0: f64 = z.iter().map(|p| p[0] * p[0]).sum::<f64>() / 2.0;
        assert_abs_diff_eq!(var0, 1.0, epsilon = 1e-12);
        // Constant column is centered, not scaled.
        assert!(z.iter().all(|p| p[1] == 0.0));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn point_cloud() -> impl Strategy<Value = Vec<Vec<f64>>> {
            (3usize..8, 2usize..6).prop_flat_map(|(n, d)| {
                proptest::collection::vec(
                    proptest::collection::vec(-10.0f64..10.0, d..=d),
                    n..=n,
                )
            })
        }

        proptest! {
            #[test]
            fn dispersion_translation_invariant(points in point_cloud(), shift in -5.0f64..5.0) {
                let moved: Vec<Vec<f64>> = points
                    .iter()
                    .map(|p| p.iter().map(|x| x + shift).collect())
                    .collect();
                let a = dispersion(&points).unwrap();
                let b = dispersion(&moved).unwrap();
                prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
            }

            #[test]
            fn dispersion_scales_as_sqrt_lambda(points in point_cloud(), lambda in 0.1f64..10.0) {
                let scaled: Vec<Vec<f64>> = points
                    .iter()
                    .map(|p| p.iter().map(|x| x * lambda).collect())
                    .collect();
                let a = dispersion(&points).unwrap();
                let b = dispersion(&scaled).unwrap();
                prop_assert!((b - lambda.sqrt() * a).abs() <= 1e-10 * (1.0 + b.abs()));
            }

            #[test]
            fn rms_dispersion_scales_linearly(points in point_cloud(), lambda in 0.1f64..10.0) {
                let scaled: Vec<Vec<f64>> = points
                    .iter()
                    .map(|p| p.iter().map(|x| x * lambda).collect())
                    .collect();
                let a = dispersion_rms(&points).unwrap();
                let b = dispersion_rms(&scaled).unwrap();
                prop_assert!((b - lambda * a).abs() <= 1e-10 * (1.0 + b.abs()));
            }

            #[test]
            fn pca_coords_translation_invariant(points in point_cloud(), shift in -5.0f64..5.0) {
                prop_assume!(pca_2d(&points).is_ok());
                let moved: Vec<Vec<f64>> = points
                    .iter()
                    .map(|p| p.iter().map(|x| x + shift).collect())
                    .collect();
                let a = pca_2d(&points).unwrap();
                let b = pca_2d(&moved).unwrap();
                // Eigenvectors of the same covariance matrix: coordinates
                // agree once the shared sign convention is applied.
                for (ca, cb) in a.coords.iter().zip(&b.coords) {
                    prop_assert!((ca[0] - cb[0]).abs() <= 1e-6 * (1.0 + ca[0].abs()));
                    prop_assert!((ca[1] - cb[1]).abs() <= 1e-6 * (1.0 + ca[1].abs()));
                }
            }
        }
    }
}
