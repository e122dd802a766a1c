//! Deterministic construction of an m x n matrix with orthonormal columns
//! and a prescribed leverage-score profile via m - 1 Givens rotations.

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::profile::LeverageProfile;

const TARGET_TOL: f64 = 1e-12;

/// Which of the two rotated rows must land on the target squared norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowChoice {
    First,
    Second,
}

/// One recorded rotation: the two row indices and the angle applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationStep {
    pub i: usize,
    pub j: usize,
    pub theta: f64,
}

/// Diagnostics from a generation run.
#[derive(Debug, Clone)]
pub struct GenerationTrace {
    pub rotation_count: usize,
    pub steps: Option<Vec<RotationStep>>,
    pub final_defect: f64,
}

/// Rotates rows `i` and `j` of Q by a plane rotation chosen so that the
/// designated row's squared norm becomes `target`. The combined squared norm
/// of the pair is preserved and column orthonormality is untouched. Returns
/// the rotation angle.
pub fn rotate_rows_to_norm(
    q: &mut RealMatrix,
    i: usize,
    j: usize,
    target: f64,
    which: RowChoice,
) -> Result<f64> {
    if i == j {
        return Err(Error::InvalidArgument(format!("row indices must differ, got {i}")));
    }
    let (d, o) = match which {
        RowChoice::First => (i, j),
        RowChoice::Second => (j, i),
    };
    let n = q.cols();
    let data = q.as_dmatrix_mut();
    let mut a = 0.0; // ||row_d||^2
    let mut b = 0.0; // ||row_o||^2
    let mut cross = 0.0; // row_d . row_o
    for k in 0..n {
        let u = data[(d, k)];
        let v = data[(o, k)];
        a += u * u;
        b += v * v;
        cross += u * v;
    }
    // new ||row_d||^2 = mid + r cos(2 theta - phase)
    let mid = 0.5 * (a + b);
    let half = 0.5 * (a - b);
    let r = half.hypot(cross);
    let lo = mid - r;
    let hi = mid + r;
    if target < lo - TARGET_TOL || target > hi + TARGET_TOL {
        return Err(Error::UnreachableTarget { target, lo, hi });
    }
    let theta = if r == 0.0 {
        // both rows carry no redistributable mass in this plane
        0.0
    } else {
        let u = ((target - mid) / r).clamp(-1.0, 1.0);
        let phase = cross.atan2(half);
        let ac = u.acos();
        // two roots; take the smaller rotation (identity when target = a)
        let t1 = 0.5 * (phase - ac);
        let t2 = 0.5 * (phase + ac);
        if t1.abs() <= t2.abs() {
            t1
        } else {
            t2
        }
    };
    if theta != 0.0 {
        let (s, c) = theta.sin_cos();
        for k in 0..n {
            let u = data[(d, k)];
            let v = data[(o, k)];
            data[(d, k)] = c * u + s * v;
            data[(o, k)] = -s * u + c * v;
        }
    }
    Ok(theta)
}

/// Builds Q with the given leverage scores by m - 1 Givens rotations,
/// starting from the identity embedded in the last n rows. The output row
/// order matches the caller's profile order.
pub fn generate_from_leverage(profile: &LeverageProfile) -> Result<(RealMatrix, GenerationTrace)> {
    generate_from_leverage_traced(profile, false)
}

/// As [`generate_from_leverage`], optionally recording every rotation.
pub fn generate_from_leverage_traced(
    profile: &LeverageProfile,
    record_steps: bool,
) -> Result<(RealMatrix, GenerationTrace)> {
    let m = profile.m();
    let n = profile.n();

    // stable ascending sort, remembering original positions
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| profile.scores()[a].partial_cmp(&profile.scores()[b]).unwrap());
    let targets: Vec<f64> = order.iter().map(|&k| profile.scores()[k]).collect();

    let mut q = RealMatrix::from_dmatrix(nalgebra::DMatrix::zeros(m, n))
        .expect("zeros are finite");
    {
        let data = q.as_dmatrix_mut();
        for k in 0..n {
            data[(m - n + k, k)] = 1.0;
        }
    }

    let mut steps = if record_steps { Some(Vec::with_capacity(m - 1)) } else { None };
    // two frontier pointers straddling the zero-row / unit-row boundary
    let mut i = (m - n) as isize; // 1-based; walks down through the zero rows
    let mut j = (m - n + 1) as isize; // 1-based; walks up through the unit rows
    let mut rotation_count = 0usize;
    for _ in 0..m.saturating_sub(1) {
        rotation_count += 1;
        if i < 1 || j > m as isize {
            // one frontier is exhausted; mass conservation has already fixed
            // the remaining rows, so the step is a no-op
            continue;
        }
        let ii = (i - 1) as usize;
        let jj = (j - 1) as usize;
        // frontier invariant: row i sits at or below its target (deficit),
        // row j at or above (excess). Fixing the smaller adjustment keeps
        // both sides feasible for the rest of the sweep.
        let deficit = targets[ii] - q.row_norm_sq(ii);
        let excess = q.row_norm_sq(jj) - targets[jj];
        let take_i = deficit <= excess;
        let (target, which, advance_i) = if take_i {
            (targets[ii], RowChoice::First, true)
        } else {
            (targets[jj], RowChoice::Second, false)
        };
        let theta = rotate_rows_to_norm(&mut q, ii, jj, target, which).map_err(|e| match e {
            Error::UnreachableTarget { target, lo, hi } => Error::InvalidArgument(format!(
                "internal invariant violated: rotation target {target} outside [{lo}, {hi}] \
                 during generation"
            )),
            other => other,
        })?;
        if let Some(steps) = steps.as_mut() {
            steps.push(RotationStep { i: ii, j: jj, theta });
        }
        if advance_i {
            i -= 1;
        } else {
            j += 1;
        }
    }

    // undo the sort
    let mut result = nalgebra::DMatrix::zeros(m, n);
    for (sorted_row, &orig_row) in order.iter().enumerate() {
        result.row_mut(orig_row).copy_from(&q.as_dmatrix().row(sorted_row));
    }
    let q = RealMatrix::from_dmatrix(result)?;
    let final_defect = crate::linalg::orthonormality_defect(&q);
    Ok((
        q,
        GenerationTrace {
            rotation_count,
            steps,
            final_defect,
        },
    ))
}
