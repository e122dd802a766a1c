use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::profile::LeverageProfile;

/// Standing-assumption check threshold: loose enough to accept accumulated
/// Givens rounding at m = 1e6, tight enough to reject non-orthonormal input.
pub const ORTHONORMALITY_DEFECT_LIMIT: f64 = 1e-8;

/// Outcome of a condition-number computation. Rank deficiency is a counted
/// experimental event, not an exceptional one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConditionNumber {
    Value(f64),
    RankDeficient { rank: usize },
}

impl ConditionNumber {
    pub fn value(&self) -> Option<f64> {
        match self {
            ConditionNumber::Value(v) => Some(*v),
            ConditionNumber::RankDeficient { .. } => None,
        }
    }

    pub fn is_rank_deficient(&self) -> bool {
        matches!(self, ConditionNumber::RankDeficient { .. })
    }
}

/// ||Q^T Q - I_n||_2, the two-norm deviation from column orthonormality.
pub fn orthonormality_defect(q: &RealMatrix) -> f64 {
    let qd = q.as_dmatrix();
    let n = q.cols();
    let mut g = qd.transpose() * qd;
    for i in 0..n {
        g[(i, i)] -= 1.0;
    }
    spectral_norm(&g)
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    let svd = m.clone().svd(false, false);
    svd.singular_values.iter().copied().fold(0.0, f64::max)
}

fn require_orthonormal(q: &RealMatrix) -> Result<()> {
    if q.rows() < q.cols() {
        return Err(Error::InvalidMatrix(format!(
            "expected at least as many rows as columns, got {}x{}",
            q.rows(),
            q.cols()
        )));
    }
    let defect = orthonormality_defect(q);
    if defect > ORTHONORMALITY_DEFECT_LIMIT {
        return Err(Error::NotOrthonormal {
            defect,
            limit: ORTHONORMALITY_DEFECT_LIMIT,
        });
    }
    Ok(())
}

/// Leverage scores of Q: the squared Euclidean norm of each row.
pub fn leverage_scores(q: &RealMatrix) -> Result<LeverageProfile> {
    require_orthonormal(q)?;
    let scores: Vec<f64> = (0..q.rows()).map(|i| q.row_norm_sq(i)).collect();
    Ok(LeverageProfile::new(scores, q.cols())?)
}

/// Coherence of Q: the largest leverage score.
pub fn coherence(q: &RealMatrix) -> Result<f64> {
    Ok(leverage_scores(q)?.coherence())
}

/// Default numerical-rank tolerance: max(rows, cols) * eps * sigma_max.
pub fn default_rank_tol(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON * sigma_max
}

/// Number of singular values above `tol` (default: max(m, n)*eps*sigma_max).
pub fn numerical_rank(m: &RealMatrix, tol: Option<f64>) -> usize {
    let sv = m.singular_values();
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let tol = tol.unwrap_or_else(|| default_rank_tol(m.rows(), m.cols(), sigma_max));
    sv.iter().filter(|&&s| s > tol).count()
}

/// Two-norm condition number sigma_max/sigma_min, or the rank-deficient
/// signal when the numerical rank falls short of the column count.
pub fn condition_number(m: &RealMatrix, rank_tol: Option<f64>) -> ConditionNumber {
    if m.rows() < m.cols() {
        return ConditionNumber::RankDeficient {
            rank: numerical_rank(m, rank_tol),
        };
    }
    let sv = m.singular_values();
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let tol = rank_tol.unwrap_or_else(|| default_rank_tol(m.rows(), m.cols(), sigma_max));
    let rank = sv.iter().filter(|&&s| s > tol).count();
    if rank < m.cols() {
        return ConditionNumber::RankDeficient { rank };
    }
    let sigma_min = sv[m.cols() - 1];
    ConditionNumber::Value(sigma_max / sigma_min)
}

/// Projected leverage norm ||Q^T L Q||_2 with L = diag(leverage scores).
/// Enters the Bernstein-type bound; satisfies mu^2 <= result <= mu.
pub fn projected_leverage_norm(q: &RealMatrix) -> Result<f64> {
    let profile = leverage_scores(q)?;
    let qd = q.as_dmatrix();
    let mut weighted = qd.clone();
    for (i, &l) in profile.scores().iter().enumerate() {
        let mut row = weighted.row_mut(i);
        row *= l;
    }
    let m = qd.transpose() * weighted;
    Ok(spectral_norm(&m))
}
