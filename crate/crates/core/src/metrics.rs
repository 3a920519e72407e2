//! Subspace recovery scores.

use nalgebra::DMatrix;

use crate::error::{Result, SdrError};
use crate::numerics::gram_schmidt;

/// Trace correlation and, for two-direction models, the per-direction
/// cosine similarities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceScore {
    pub trace_correlation: f64,
    pub cosines: Option<(f64, f64)>,
}

fn check_shapes(truth: &DMatrix<f64>, estimate: &DMatrix<f64>) -> Result<()> {
    if truth.shape() != estimate.shape() {
        return Err(SdrError::ShapeMismatch(format!(
            "truth is {}x{}, estimate is {}x{}",
            truth.nrows(),
            truth.ncols(),
            estimate.nrows(),
            estimate.ncols()
        )));
    }
    if truth.ncols() == 0 {
        return Err(SdrError::ShapeMismatch("no columns".into()));
    }
    Ok(())
}

/// R = trace(ÊᵀBBᵀÊ)/k after Gram–Schmidt orthonormalization of the
/// estimate. `truth` must already have orthonormal columns.
pub fn trace_correlation(truth: &DMatrix<f64>, estimate: &DMatrix<f64>) -> Result<f64> {
    check_shapes(truth, estimate)?;
    let e = gram_schmidt(estimate)?;
    let cross = truth.transpose() * e;
    Ok(cross.norm_squared() / truth.ncols() as f64)
}

/// (|cos₁|, |cos₂|): for each estimated direction, the absolute cosine with
/// the closest of the two true directions.
pub fn direction_cosines(truth: &DMatrix<f64>, estimate: &DMatrix<f64>) -> Result<(f64, f64)> {
    check_shapes(truth, estimate)?;
    if truth.ncols() != 2 {
        return Err(SdrError::ShapeMismatch(format!(
            "direction cosines need k = 2, got k = {}",
            truth.ncols()
        )));
    }
    let cos = |i: usize| -> Result<f64> {
        let b = estimate.column(i);
        let norm = b.norm();
        if !(norm > 0.0) {
            return Err(SdrError::RankDeficient { column: i });
        }
        Ok((0..2)
            .map(|j| (b.dot(&truth.column(j)) / norm).abs())
            .fold(0.0, f64::max))
    };
    Ok((cos(0)?, cos(1)?))
}

/// Trace correlation plus cosines when k = 2.
pub fn score(truth: &DMatrix<f64>, estimate: &DMatrix<f64>) -> Result<SubspaceScore> {
    let trace_correlation = trace_correlation(truth, estimate)?;
    let cosines = if truth.ncols() == 2 {
        Some(direction_cosines(truth, estimate)?)
    } else {
        None
    };
    Ok(SubspaceScore {
        trace_correlation,
        cosines,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cols(p: usize, idx: &[usize]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(p, idx.len());
        for (c, &i) in idx.iter().enumerate() {
            m[(i, c)] = 1.0;
        }
        m
    }

    #[test]
    fn identical_and_orthogonal_spans() {
        let t = cols(6, &[0, 1]);
        assert_eq!(trace_correlation(&t, &t).unwrap(), 1.0);
        assert_eq!(trace_correlation(&t, &cols(6, &[2, 3])).unwrap(), 0.0);
    }

    #[test]
    fn half_overlap_for_k1() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut e = DMatrix::zeros(4, 1);
        e[(0, 0)] = h;
        e[(1, 0)] = h;
        let r = trace_correlation(&cols(4, &[0]), &e).unwrap();
        assert!((r - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unnormalized_estimate_is_orthonormalized() {
        let t = cols(3, &[0, 1]);
        let e = DMatrix::from_row_slice(3, 2, &[3.0, 1.0, 0.0, 2.0, 0.0, 0.0]);
        assert!((trace_correlation(&t, &e).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cosines() {
        let t = cols(5, &[0, 1]);
        assert_eq!(direction_cosines(&t, &t).unwrap(), (1.0, 1.0));
        assert_eq!(
            direction_cosines(&t, &cols(5, &[1, 0])).unwrap(),
            (1.0, 1.0)
        );
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut e = cols(5, &[0, 2]);
        e[(0, 0)] = h;
        e[(1, 0)] = h;
        let (c1, c2) = direction_cosines(&t, &e).unwrap();
        assert!((c1 - h).abs() < 1e-15);
        assert_eq!(c2, 0.0);
    }

    #[test]
    fn shape_errors() {
        let t = cols(4, &[0, 1]);
        assert!(matches!(
            trace_correlation(&t, &cols(4, &[0])),
            Err(SdrError::ShapeMismatch(_))
        ));
        assert!(matches!(
            direction_cosines(&cols(4, &[0]), &cols(4, &[1])),
            Err(SdrError::ShapeMismatch(_))
        ));
        let s = score(&cols(6, &[0, 1, 2, 3]), &cols(6, &[0, 1, 2, 3])).unwrap();
        assert!(s.cosines.is_none());
    }
}
