//! The six probabilistic upper bounds on kappa(SQ), each reported as the
//! smallest admissible epsilon at a target failure probability delta and the
//! shared map epsilon -> sqrt((1+eps)/(1-eps)).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::SampleMethod;

/// Bisection settings for the delta -> epsilon inversions.
const BISECT_LO: f64 = 1e-15;
const BISECT_HI: f64 = 1.0 - 1e-15;
const BISECT_TOL: f64 = 1e-12;
const BISECT_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundId {
    B1Chernoff,
    B2Bernstein,
    B3WeakCoherence,
    B4WeakBernstein,
    B5WeakFrobenius,
    B6WeakBernoulli,
}

impl BoundId {
    pub const ALL: [BoundId; 6] = [
        BoundId::B1Chernoff,
        BoundId::B2Bernstein,
        BoundId::B3WeakCoherence,
        BoundId::B4WeakBernstein,
        BoundId::B5WeakFrobenius,
        BoundId::B6WeakBernoulli,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BoundId::B1Chernoff => "b1-chernoff",
            BoundId::B2Bernstein => "b2-bernstein",
            BoundId::B3WeakCoherence => "b3-weak-coherence",
            BoundId::B4WeakBernstein => "b4-weak-bernstein",
            BoundId::B5WeakFrobenius => "b5-weak-frobenius",
            BoundId::B6WeakBernoulli => "b6-weak-bernoulli",
        }
    }

    pub fn from_name(name: &str) -> Option<BoundId> {
        let short = match name {
            "b1" => return Some(BoundId::B1Chernoff),
            "b2" => return Some(BoundId::B2Bernstein),
            "b3" => return Some(BoundId::B3WeakCoherence),
            "b4" => return Some(BoundId::B4WeakBernstein),
            "b5" => return Some(BoundId::B5WeakFrobenius),
            "b6" => return Some(BoundId::B6WeakBernoulli),
            other => other,
        };
        Self::ALL.iter().copied().find(|b| b.name() == short)
    }

    /// Which samplers each bound covers, used to pair bounds with samplers
    /// in combined plots.
    pub fn admissible_samplers(&self) -> &'static [SampleMethod] {
        match self {
            BoundId::B1Chernoff => &[
                SampleMethod::WithoutReplacement,
                SampleMethod::WithReplacement,
                SampleMethod::Bernoulli,
            ],
            BoundId::B2Bernstein => &[SampleMethod::WithoutReplacement],
            BoundId::B3WeakCoherence | BoundId::B4WeakBernstein | BoundId::B5WeakFrobenius => {
                &[SampleMethod::WithReplacement]
            }
            BoundId::B6WeakBernoulli => &[SampleMethod::Bernoulli],
        }
    }
}

impl std::fmt::Display for BoundId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Inputs to one bound evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundQuery {
    pub bound: BoundId,
    pub m: usize,
    pub n: usize,
    pub mu: f64,
    /// Projected leverage norm ||Q^T L Q||_2; required for B2.
    pub lambda: Option<f64>,
    pub c: usize,
    pub delta: f64,
    /// Bernoulli keep-fraction; required for B6.
    pub gamma: Option<f64>,
}

impl BoundQuery {
    fn validate(&self) -> Result<()> {
        if !(self.n >= 1 && self.c >= self.n && self.m >= self.c) {
            return Err(Error::InvalidQuery(format!(
                "require m >= c >= n >= 1, got m = {}, c = {}, n = {}",
                self.m, self.c, self.n
            )));
        }
        let lo = self.n as f64 / self.m as f64;
        if !self.mu.is_finite() || self.mu < lo - 1e-12 || self.mu > 1.0 + 1e-12 {
            return Err(Error::InvalidQuery(format!(
                "coherence {} outside [{lo}, 1]",
                self.mu
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidQuery(format!(
                "delta {} outside (0, 1)",
                self.delta
            )));
        }
        if self.bound == BoundId::B2Bernstein {
            match self.lambda {
                None => {
                    return Err(Error::InvalidQuery(
                        "B2 requires the projected leverage norm lambda".into(),
                    ))
                }
                Some(l) => {
                    if l < self.mu * self.mu - 1e-12 || l > self.mu + 1e-12 {
                        return Err(Error::InvalidQuery(format!(
                            "lambda {l} outside the sanity band [mu^2, mu] = [{}, {}]",
                            self.mu * self.mu,
                            self.mu
                        )));
                    }
                }
            }
        }
        if self.bound == BoundId::B6WeakBernoulli {
            match self.gamma {
                Some(g) if g > 0.0 && g < 1.0 => {}
                Some(g) => {
                    return Err(Error::InvalidQuery(format!("gamma {g} outside (0, 1)")))
                }
                None => {
                    return Err(Error::InvalidQuery(
                        "B6 requires the Bernoulli keep-fraction gamma".into(),
                    ))
                }
            }
        }
        Ok(())
    }
}

/// Result of a bound evaluation at one parameter point. Inapplicable points
/// leave a gap in the plotted curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundPoint {
    Applicable { epsilon: f64, kappa_bound: f64 },
    NotApplicable,
}

impl BoundPoint {
    fn from_epsilon(epsilon: f64) -> BoundPoint {
        if epsilon.is_finite() && epsilon > 0.0 && epsilon < 1.0 {
            BoundPoint::Applicable {
                epsilon,
                kappa_bound: kappa_from_epsilon(epsilon).expect("epsilon in (0,1)"),
            }
        } else {
            BoundPoint::NotApplicable
        }
    }

    pub fn is_applicable(&self) -> bool {
        matches!(self, BoundPoint::Applicable { .. })
    }

    pub fn epsilon(&self) -> Option<f64> {
        match self {
            BoundPoint::Applicable { epsilon, .. } => Some(*epsilon),
            BoundPoint::NotApplicable => None,
        }
    }

    pub fn kappa_bound(&self) -> Option<f64> {
        match self {
            BoundPoint::Applicable { kappa_bound, .. } => Some(*kappa_bound),
            BoundPoint::NotApplicable => None,
        }
    }
}

/// The conclusion shared by all six bounds: kappa(SQ) <= sqrt((1+eps)/(1-eps)).
pub fn kappa_from_epsilon(epsilon: f64) -> Result<f64> {
    if !(epsilon >= 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon {epsilon} outside [0, 1)"
        )));
    }
    Ok(((1.0 + epsilon) / (1.0 - epsilon)).sqrt())
}

/// ln f(x) for f(x) = e^x (1+x)^{-(1+x)}, extended by continuity at x = -1
/// where the (1+x)^{-(1+x)} factor tends to 1.
fn ln_f(x: f64) -> f64 {
    let one_plus = 1.0 + x;
    if one_plus <= 0.0 {
        return x;
    }
    x - one_plus * one_plus.ln()
}

/// The Chernoff failure probability delta(eps) = n (f(-eps)^{c/(m mu)} +
/// f(eps)^{c/(m mu)}), computed in log-space to survive huge exponents.
pub fn chernoff_delta(epsilon: f64, q: &BoundQuery) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon {epsilon} outside (0, 1)"
        )));
    }
    if q.mu <= 0.0 {
        return Err(Error::InvalidQuery("chernoff_delta needs mu > 0".into()));
    }
    let exponent = q.c as f64 / (q.m as f64 * q.mu);
    let n = q.n as f64;
    Ok(n * ((exponent * ln_f(-epsilon)).exp() + (exponent * ln_f(epsilon)).exp()))
}

/// Smallest x in (lo, hi) with g(x) <= target, for strictly decreasing g.
/// Returns None when even g(hi) exceeds the target.
pub fn bisect_decreasing<F: Fn(f64) -> f64>(
    g: F,
    lo: f64,
    hi: f64,
    target: f64,
    tol: f64,
    max_iter: usize,
) -> Option<f64> {
    if g(hi) > target {
        return None;
    }
    if g(lo) <= target {
        return Some(lo);
    }
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..max_iter {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Bound 1 (matrix Chernoff): invert delta(eps) <= delta by bisection.
pub fn invert_bound_1(q: &BoundQuery) -> Result<BoundPoint> {
    q.validate()?;
    let g = |e: f64| chernoff_delta(e, q).expect("epsilon in (0,1)");
    match bisect_decreasing(g, BISECT_LO, BISECT_HI, q.delta, BISECT_TOL, BISECT_MAX_ITER) {
        Some(eps) => Ok(BoundPoint::from_epsilon(eps)),
        None => Ok(BoundPoint::NotApplicable),
    }
}

/// Bound 2 (matrix Bernstein with leverage scores): the positive root of
/// 3 c eps^2 - 2 L0 m mu eps - 6 L0 m Lambda = 0 with L0 = ln(2n/delta).
pub fn invert_bound_2(q: &BoundQuery) -> Result<BoundPoint> {
    q.validate()?;
    let lambda = q.lambda.expect("validated");
    let (m, c, n) = (q.m as f64, q.c as f64, q.n as f64);
    let l0 = (2.0 * n / q.delta).ln();
    let eps = (l0 * m * q.mu
        + ((l0 * m * q.mu).powi(2) + 18.0 * c * l0 * m * lambda).sqrt())
        / (3.0 * c);
    Ok(BoundPoint::from_epsilon(eps))
}

/// The Bernstein failure probability inverted by B2's closed form; exposed
/// for the closed-form-vs-bisection cross-check.
pub fn bernstein_delta(epsilon: f64, q: &BoundQuery) -> Result<f64> {
    let lambda = q
        .lambda
        .ok_or_else(|| Error::InvalidQuery("bernstein_delta needs lambda".into()))?;
    let (m, c, n) = (q.m as f64, q.c as f64, q.n as f64);
    Ok(2.0 * n * (-1.5 * c * epsilon * epsilon / (m * (3.0 * lambda + epsilon * q.mu))).exp())
}

/// Bound 3 (weak coherence): smallest eps with zeta ln(zeta/sqrt(delta)) <= c
/// for zeta = 96 m mu / eps^2.
pub fn invert_bound_3(q: &BoundQuery) -> Result<BoundPoint> {
    q.validate()?;
    let (m, c) = (q.m as f64, q.c as f64);
    let sqrt_delta = q.delta.sqrt();
    let g = |e: f64| {
        let zeta = 96.0 * m * q.mu / (e * e);
        zeta * (zeta / sqrt_delta).ln()
    };
    match bisect_decreasing(g, BISECT_LO, BISECT_HI, c, BISECT_TOL, BISECT_MAX_ITER) {
        Some(eps) => Ok(BoundPoint::from_epsilon(eps)),
        None => Ok(BoundPoint::NotApplicable),
    }
}

fn rho(n: f64, delta: f64) -> f64 {
    2.0 / 3.0 * (2.0 * n / delta).ln()
}

/// Bound 4 (weak Bernstein): closed-form eps1, applicable iff eps1 < 1.
pub fn bound_4_epsilon(q: &BoundQuery) -> Result<BoundPoint> {
    q.validate()?;
    let (m, c, n) = (q.m as f64, q.c as f64, q.n as f64);
    let rho = rho(n, q.delta);
    let eps = q.mu * m / (2.0 * c) * (rho + (12.0 * c * rho / (m * q.mu) + rho * rho).sqrt());
    Ok(BoundPoint::from_epsilon(eps))
}

/// Bound 5 (weak Frobenius): closed-form eps2, applicable iff eps2 < 1.
pub fn bound_5_epsilon(q: &BoundQuery) -> Result<BoundPoint> {
    q.validate()?;
    let (m, c, n) = (q.m as f64, q.c as f64, q.n as f64);
    let eps = (m * n * q.mu / c).sqrt() + m * q.mu * (8.0 * (1.0 / q.delta).ln() / c).sqrt();
    Ok(BoundPoint::from_epsilon(eps))
}

/// Bound 6 (weak Bernoulli): closed-form eps3-hat in the keep-fraction gamma.
pub fn bound_6_epsilon(q: &BoundQuery) -> Result<BoundPoint> {
    q.validate()?;
    let gamma = q.gamma.expect("validated");
    let (m, n) = (q.m as f64, q.n as f64);
    let rho = rho(n, q.delta);
    let phi = if gamma >= 1.0 - gamma {
        1.0
    } else {
        (1.0 - gamma) / gamma
    };
    let eps = q.mu / 2.0
        * (phi * rho + ((1.0 - gamma) / gamma * 12.0 * m * rho + phi * phi * rho * rho).sqrt());
    Ok(BoundPoint::from_epsilon(eps))
}

/// Evaluates one bound at one parameter point.
pub fn evaluate(q: &BoundQuery) -> Result<BoundPoint> {
    match q.bound {
        BoundId::B1Chernoff => invert_bound_1(q),
        BoundId::B2Bernstein => invert_bound_2(q),
        BoundId::B3WeakCoherence => invert_bound_3(q),
        BoundId::B4WeakBernstein => bound_4_epsilon(q),
        BoundId::B5WeakFrobenius => bound_5_epsilon(q),
        BoundId::B6WeakBernoulli => bound_6_epsilon(q),
    }
}

/// The swept quantity of a bound curve: exactly one of c or mu varies.
#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    SampleCount(Vec<usize>),
    Coherence(Vec<f64>),
}

/// Evaluates a bound along a sweep of c or mu. `template` carries the fixed
/// parameters; for B6 a swept c maps to gamma = c/m. `lambdas`, when given,
/// supplies a per-point projected leverage norm (needed when mu is swept and
/// B2 is requested).
pub fn evaluate_bound_curve(
    bound: BoundId,
    template: &BoundQuery,
    sweep: &Sweep,
    lambdas: Option<&[f64]>,
) -> Result<Vec<BoundPoint>> {
    let len = match sweep {
        Sweep::SampleCount(v) => v.len(),
        Sweep::Coherence(v) => v.len(),
    };
    if let Some(l) = lambdas {
        if l.len() != len {
            return Err(Error::InvalidArgument(format!(
                "lambda vector length {} does not match sweep length {len}",
                l.len()
            )));
        }
    }
    let mut points = Vec::with_capacity(len);
    for k in 0..len {
        let mut q = *template;
        q.bound = bound;
        match sweep {
            Sweep::SampleCount(v) => q.c = v[k],
            Sweep::Coherence(v) => q.mu = v[k],
        }
        if let Some(l) = lambdas {
            q.lambda = Some(l[k]);
        }
        if bound == BoundId::B6WeakBernoulli {
            q.gamma = Some(q.c as f64 / q.m as f64);
        }
        points.push(evaluate(&q)?);
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn query(bound: BoundId) -> BoundQuery {
        BoundQuery {
            bound,
            m: 10_000,
            n: 4,
            mu: 4e-4,
            lambda: Some(4e-4),
            c: 10_000,
            delta: 0.01,
            gamma: Some(0.5),
        }
    }

    #[test]
    fn kappa_from_epsilon_closed_forms() {
        assert_eq!(kappa_from_epsilon(0.0).unwrap(), 1.0);
        assert!((kappa_from_epsilon(0.5).unwrap() - 3.0f64.sqrt()).abs() < 1e-15);
        assert!((kappa_from_epsilon(0.96).unwrap() - 7.0).abs() < 1e-12);
        assert!(kappa_from_epsilon(1.0).is_err());
        assert!(kappa_from_epsilon(-0.1).is_err());
    }

    #[test]
    fn chernoff_delta_limits() {
        let mut q = query(BoundId::B1Chernoff);
        q.m = 500;
        q.mu = 0.016;
        q.c = 200;
        // eps -> 0+: delta -> 2n
        let d = chernoff_delta(1e-9, &q).unwrap();
        assert!((d - 8.0).abs() < 1e-6);
        // unit exponent when c = m*mu
        q.c = 8;
        let eps = 0.3;
        let d = chernoff_delta(eps, &q).unwrap();
        let f = |x: f64| (x - (1.0 + x) * (1.0 + x).ln()).exp();
        assert!((d - 4.0 * (f(-eps) + f(eps))).abs() < 1e-12);
    }

    #[test]
    fn chernoff_delta_oracle_value() {
        // 50-digit oracle: delta(0.5) at m=500, n=4, mu=0.016, c=200
        let mut q = query(BoundId::B1Chernoff);
        q.m = 500;
        q.mu = 0.016;
        q.c = 200;
        let expect = 0.35384525321938412609741528316855;
        let got = chernoff_delta(0.5, &q).unwrap();
        assert!(((got - expect) / expect).abs() < 1e-10, "got {got}");
    }

    #[test]
    fn invert_bound_1_oracle() {
        let mut q = query(BoundId::B1Chernoff);
        q.m = 500;
        q.mu = 0.016;
        q.c = 200;
        let p = invert_bound_1(&q).unwrap();
        let eps = p.epsilon().unwrap();
        // oracle root of delta(eps) = 0.01
        assert!((eps - 0.76888974403414955).abs() < 1e-9, "eps {eps}");
        // bracketing property
        assert!(chernoff_delta(eps, &q).unwrap() <= q.delta);
        assert!(chernoff_delta(eps - 1e-9, &q).unwrap() > q.delta);
    }

    #[test]
    fn invert_bound_1_inapplicable() {
        // c = n with mu near 1: delta(1-) stays far above 0.01
        let q = BoundQuery {
            bound: BoundId::B1Chernoff,
            m: 100,
            n: 4,
            mu: 1.0,
            lambda: None,
            c: 4,
            delta: 0.01,
            gamma: None,
        };
        assert!(chernoff_delta(1.0 - 1e-12, &q).unwrap() > 0.01);
        assert_eq!(invert_bound_1(&q).unwrap(), BoundPoint::NotApplicable);
    }

    #[test]
    fn invert_bound_2_oracle() {
        let q = query(BoundId::B2Bernstein);
        let p = invert_bound_2(&q).unwrap();
        let eps = p.epsilon().unwrap();
        assert!(((eps - 0.074024610251504942) / eps).abs() < 1e-10, "eps {eps}");
        // root property: substituting back reproduces delta
        let d = bernstein_delta(eps, &q).unwrap();
        assert!(((d - q.delta) / q.delta).abs() < 1e-10);
    }

    #[test]
    fn invert_bound_2_monotone_in_c() {
        let q = query(BoundId::B2Bernstein);
        let mut q2 = q;
        q2.c = 5_000;
        let e_big_c = invert_bound_2(&q).unwrap().epsilon().unwrap();
        let e_small_c = invert_bound_2(&q2).unwrap().epsilon().unwrap();
        assert!(e_big_c < e_small_c);
    }

    #[test]
    fn invert_bound_3_oracle() {
        let q = query(BoundId::B3WeakCoherence);
        let p = invert_bound_3(&q).unwrap();
        let eps = p.epsilon().unwrap();
        // oracle root of (96 m mu / eps^2) ln(96 m mu / (eps^2 sqrt(delta))) = c
        assert!((eps - 0.59709927387251861).abs() < 1e-9, "eps {eps}");
        // bisection contract
        let g = |e: f64| {
            let z = 96.0 * 1e4 * 4e-4 / (e * e);
            z * (z / 0.1f64).ln()
        };
        assert!(g(eps) <= 1e4);
        assert!(g(eps - 1e-9) > 1e4);
    }

    #[test]
    fn invert_bound_3_inapplicable() {
        let q = BoundQuery {
            bound: BoundId::B3WeakCoherence,
            m: 100,
            n: 4,
            mu: 1.0,
            lambda: None,
            c: 4,
            delta: 0.01,
            gamma: None,
        };
        assert_eq!(invert_bound_3(&q).unwrap(), BoundPoint::NotApplicable);
    }

    #[test]
    fn bound_4_oracle() {
        let q = query(BoundId::B4WeakBernstein);
        let p = bound_4_epsilon(&q).unwrap();
        let eps = p.epsilon().unwrap();
        assert!(((eps - 0.074024610251504942) / eps).abs() < 1e-10, "eps {eps}");
        let kappa = p.kappa_bound().unwrap();
        assert!(((kappa - 1.0769793948625851) / kappa).abs() < 1e-10);
    }

    #[test]
    fn bound_4_inapplicable_and_asymptotic() {
        let q = BoundQuery {
            bound: BoundId::B4WeakBernstein,
            m: 100,
            n: 4,
            mu: 1.0,
            lambda: None,
            c: 4,
            delta: 0.01,
            gamma: None,
        };
        assert_eq!(bound_4_epsilon(&q).unwrap(), BoundPoint::NotApplicable);

        // eps1 ~ sqrt(mu m / c) sqrt(12 rho)/2 for large c: quadrupling c
        // roughly halves eps
        let mut big = query(BoundId::B4WeakBernstein);
        big.m = 4_000_000;
        big.mu = 1e-5;
        big.c = 400_000;
        let mut bigger = big;
        bigger.c = 1_600_000;
        let e1 = bound_4_epsilon(&big).unwrap().epsilon().unwrap();
        let e2 = bound_4_epsilon(&bigger).unwrap().epsilon().unwrap();
        assert!((e1 / e2 / 2.0 - 1.0).abs() < 0.05, "ratio {}", e1 / e2);
    }

    #[test]
    fn bound_5_oracle() {
        let q = query(BoundId::B5WeakFrobenius);
        let eps = bound_5_epsilon(&q).unwrap().epsilon().unwrap();
        assert!(((eps - 0.28278834070162342) / eps).abs() < 1e-10, "eps {eps}");

        let q = BoundQuery {
            bound: BoundId::B5WeakFrobenius,
            m: 500,
            n: 4,
            mu: 0.016,
            lambda: None,
            c: 200,
            delta: 0.01,
            gamma: None,
        };
        // eps2 = 3.8335... > 1: inapplicable
        assert_eq!(bound_5_epsilon(&q).unwrap(), BoundPoint::NotApplicable);
    }

    #[test]
    fn bound_5_monotonicity() {
        let base = query(BoundId::B5WeakFrobenius);
        let e = |c: usize, mu: f64| {
            let mut q = base;
            q.c = c;
            q.mu = mu;
            bound_5_epsilon(&q).unwrap().epsilon().unwrap()
        };
        assert!(e(8000, 4e-4) > e(10_000, 4e-4));
        assert!(e(10_000, 8e-4) > e(10_000, 4e-4));
    }

    #[test]
    fn bound_6_oracle() {
        let q = query(BoundId::B6WeakBernoulli);
        let eps = bound_6_epsilon(&q).unwrap().epsilon().unwrap();
        assert!(((eps - 0.14714979212414547) / eps).abs() < 1e-10, "eps {eps}");
    }

    #[test]
    fn bound_6_gamma_limits() {
        // gamma -> 1-: eps -> mu * rho
        let mut q = query(BoundId::B6WeakBernoulli);
        q.gamma = Some(1.0 - 1e-13);
        let eps = bound_6_epsilon(&q).unwrap().epsilon().unwrap();
        let rho = 2.0 / 3.0 * (2.0 * 4.0 / 0.01f64).ln();
        assert!((eps - q.mu * rho).abs() < 1e-8);

        // smaller gamma gives a larger eps
        let mut qa = query(BoundId::B6WeakBernoulli);
        qa.gamma = Some(0.25);
        let mut qb = query(BoundId::B6WeakBernoulli);
        qb.gamma = Some(0.5);
        let ea = bound_6_epsilon(&qa).unwrap().epsilon().unwrap();
        let eb = bound_6_epsilon(&qb).unwrap().epsilon().unwrap();
        assert!(ea > eb);
    }

    #[test]
    fn bound_6_rejects_bad_gamma() {
        let mut q = query(BoundId::B6WeakBernoulli);
        q.gamma = Some(0.0);
        assert!(bound_6_epsilon(&q).is_err());
        q.gamma = None;
        assert!(bound_6_epsilon(&q).is_err());
    }

    #[test]
    fn curve_matches_scalar_path() {
        let template = BoundQuery {
            bound: BoundId::B1Chernoff,
            m: 500,
            n: 4,
            mu: 0.016,
            lambda: None,
            c: 0,
            delta: 0.01,
            gamma: None,
        };
        let cs = vec![200usize, 300, 400, 500];
        let curve = evaluate_bound_curve(
            BoundId::B1Chernoff,
            &template,
            &Sweep::SampleCount(cs.clone()),
            None,
        )
        .unwrap();
        for (k, &c) in cs.iter().enumerate() {
            let mut q = template;
            q.c = c;
            assert_eq!(curve[k], invert_bound_1(&q).unwrap());
        }
        // nonincreasing eps over c
        let eps: Vec<f64> = curve.iter().map(|p| p.epsilon().unwrap()).collect();
        assert!(eps.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn curve_all_gaps_is_fine() {
        let template = BoundQuery {
            bound: BoundId::B5WeakFrobenius,
            m: 500,
            n: 4,
            mu: 0.016,
            lambda: None,
            c: 0,
            delta: 0.01,
            gamma: None,
        };
        let curve = evaluate_bound_curve(
            BoundId::B5WeakFrobenius,
            &template,
            &Sweep::SampleCount(vec![4, 8, 16]),
            None,
        )
        .unwrap();
        assert!(curve.iter().all(|p| !p.is_applicable()));
    }

    #[test]
    fn delta_monotonicity_all_bounds() {
        for bound in BoundId::ALL {
            let mut qa = query(bound);
            qa.c = 8_000;
            let mut qb = qa;
            qb.delta = 0.1;
            let ea = evaluate(&qa).unwrap().epsilon();
            let eb = evaluate(&qb).unwrap().epsilon();
            if let (Some(ea), Some(eb)) = (ea, eb) {
                assert!(eb <= ea + 1e-12, "{bound}: {eb} > {ea}");
            }
        }
    }

    #[test]
    fn b2_worst_case_lambda_dominates() {
        let mut q = query(BoundId::B2Bernstein);
        q.mu = 0.01;
        q.lambda = Some(0.01);
        let worst = invert_bound_2(&q).unwrap().epsilon().unwrap();
        q.lambda = Some(0.004);
        let better = invert_bound_2(&q).unwrap().epsilon().unwrap();
        assert!(worst >= better);
    }
}
