use crate::error::{Error, ProfileViolations, Result};

const ENTRY_TOL: f64 = 1e-12;
const SUM_TOL: f64 = 1e-10;

/// A leverage-score profile: m scores in [0, 1] summing to n.
#[derive(Debug, Clone, PartialEq)]
pub struct LeverageProfile {
    m: usize,
    n: usize,
    scores: Vec<f64>,
}

impl LeverageProfile {
    /// Validates and builds a profile. Negative round-off (entries in
    /// [-1e-12, 0)) is clamped to zero; anything worse is reported.
    pub fn new(scores: Vec<f64>, n: usize) -> std::result::Result<Self, ProfileViolations> {
        let m = scores.len();
        let mut violations = Vec::new();
        if n == 0 {
            violations.push("n must be at least 1".to_string());
        }
        if m < n {
            violations.push(format!("profile length {m} is below n = {n}"));
        }
        let mut clamped = scores;
        for (i, v) in clamped.iter_mut().enumerate() {
            if !v.is_finite() {
                violations.push(format!("entry {i} is not finite ({v})"));
            } else if *v < -ENTRY_TOL {
                violations.push(format!("entry {i} = {v} is negative"));
            } else if *v > 1.0 + ENTRY_TOL {
                violations.push(format!("entry {i} = {v} exceeds 1"));
            } else if *v < 0.0 {
                *v = 0.0;
            }
        }
        let sum: f64 = clamped.iter().sum();
        if (sum - n as f64).abs() > SUM_TOL * n as f64 {
            violations.push(format!("sum of scores = {sum}, expected n = {n}"));
        }
        if violations.is_empty() {
            Ok(Self {
                m,
                n,
                scores: clamped,
            })
        } else {
            Err(ProfileViolations { violations })
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// Coherence: the largest leverage score.
    pub fn coherence(&self) -> f64 {
        self.scores.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn check_mu(m: usize, n: usize, mu: f64) -> Result<()> {
    if m < n || n < 1 {
        return Err(Error::InvalidArgument(format!(
            "require m >= n >= 1, got m = {m}, n = {n}"
        )));
    }
    let lo = n as f64 / m as f64;
    if !mu.is_finite() || mu < lo - ENTRY_TOL || mu > 1.0 + ENTRY_TOL {
        return Err(Error::CoherenceOutOfRange { mu, lo, hi: 1.0 });
    }
    Ok(())
}

/// "Good" leverage-score distribution: one entry at the coherence mu, the
/// remaining m-1 entries all equal to (n - mu)/(m - 1).
pub fn dist_one_big(m: usize, n: usize, mu: f64) -> Result<LeverageProfile> {
    check_mu(m, n, mu)?;
    let mut scores = Vec::with_capacity(m);
    scores.push(mu);
    if m > 1 {
        let rest = (n as f64 - mu) / (m as f64 - 1.0);
        scores.extend(std::iter::repeat(rest).take(m - 1));
    }
    Ok(LeverageProfile::new(scores, n)?)
}

/// "Bad" leverage-score distribution: the maximal number of entries at the
/// coherence mu, at most one extra nonzero entry, zeros elsewhere. Matrices
/// with this profile have the most zero rows achievable at coherence mu.
pub fn dist_many_big(m: usize, n: usize, mu: f64) -> Result<LeverageProfile> {
    check_mu(m, n, mu)?;
    let m_tilde = ((n as f64 / mu).floor() as usize).min(m);
    let scores = if m_tilde < m {
        let mut remainder = n as f64 - m_tilde as f64 * mu;
        // floor(n/mu) with floating-point mu can overshoot by one ulp
        if remainder.abs() <= ENTRY_TOL {
            remainder = 0.0;
        }
        let mut s = vec![mu; m_tilde];
        s.push(remainder);
        s.resize(m, 0.0);
        s
    } else {
        vec![mu; m]
    };
    Ok(LeverageProfile::new(scores, n)?)
}

/// Validates a raw user-supplied score vector against (m, n).
pub fn validate_profile(
    scores: &[f64],
    m: usize,
    n: usize,
) -> std::result::Result<LeverageProfile, ProfileViolations> {
    if scores.len() != m {
        return Err(ProfileViolations {
            violations: vec![format!("profile length {} does not match m = {m}", scores.len())],
        });
    }
    LeverageProfile::new(scores.to_vec(), n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_big_examples() {
        let p = dist_one_big(5, 2, 0.6).unwrap();
        assert_eq!(p.scores(), &[0.6, 0.35, 0.35, 0.35, 0.35]);

        let p = dist_one_big(8, 2, 0.25).unwrap();
        assert!(p.scores().iter().all(|&v| (v - 0.25).abs() < 1e-15));

        let p = dist_one_big(3, 1, 1.0).unwrap();
        assert_eq!(p.scores(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn one_big_distinct_values() {
        let p = dist_one_big(7, 3, 0.9).unwrap();
        let mut vals: Vec<f64> = p.scores().to_vec();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals.dedup();
        assert_eq!(vals.len(), 2);
        // mu = n/m collapses to a single value
        let p = dist_one_big(7, 3, 3.0 / 7.0).unwrap();
        let spread = p.coherence() - p.scores().iter().copied().fold(f64::INFINITY, f64::min);
        assert!(spread < 1e-15);
    }

    #[test]
    fn many_big_examples() {
        let p = dist_many_big(10, 2, 0.5).unwrap();
        assert_eq!(p.scores(), &[0.5, 0.5, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

        let p = dist_many_big(10, 2, 0.6).unwrap();
        let expect = [0.6, 0.6, 0.6, 2.0 - 1.8, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        for (a, b) in p.scores().iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }

        // mu = n/m takes the else-branch: all entries n/m
        let p = dist_many_big(10, 2, 0.2).unwrap();
        assert!(p.scores().iter().all(|&v| (v - 0.2).abs() < 1e-15));
    }

    #[test]
    fn many_big_zero_count() {
        // m_tilde = floor(n/mu); remainder zero gives m - m_tilde zeros,
        // otherwise m - m_tilde - 1
        let p = dist_many_big(10, 2, 0.5).unwrap();
        assert_eq!(p.scores().iter().filter(|&&v| v == 0.0).count(), 6);
        let p = dist_many_big(10, 2, 0.6).unwrap();
        assert_eq!(p.scores().iter().filter(|&&v| v == 0.0).count(), 6);
    }

    #[test]
    fn generator_invariants() {
        for &(m, n) in &[(4usize, 1usize), (10, 2), (17, 5), (64, 8)] {
            for &mu in &[n as f64 / m as f64, 2.0 * n as f64 / m as f64, 0.5, 1.0] {
                if mu < n as f64 / m as f64 || mu > 1.0 {
                    continue;
                }
                for p in [dist_one_big(m, n, mu).unwrap(), dist_many_big(m, n, mu).unwrap()] {
                    assert!((p.coherence() - mu).abs() <= 1e-15, "max != mu");
                    let sum: f64 = p.scores().iter().sum();
                    assert!((sum - n as f64).abs() <= 1e-12 * n as f64);
                    assert!(p.scores().iter().all(|&v| v >= 0.0));
                }
            }
        }
    }

    #[test]
    fn rejects_mu_out_of_range() {
        assert!(dist_one_big(5, 2, 0.3).is_err()); // below n/m = 0.4
        assert!(dist_one_big(5, 2, 1.1).is_err());
        assert!(dist_many_big(5, 2, 0.39).is_err());
        assert!(dist_many_big(5, 2, 1.0 + 1e-6).is_err());
    }

    #[test]
    fn validate_examples() {
        assert!(validate_profile(&[1.0, 1.0, 0.0], 3, 2).is_ok());
        let err = validate_profile(&[0.5, 0.5, 0.5], 3, 2).unwrap_err();
        assert!(err.to_string().contains("sum"));
        let err = validate_profile(&[1.2, 0.8], 2, 2).unwrap_err();
        assert!(err.to_string().contains("exceeds 1"));
        // negative round-off is clamped
        let p = validate_profile(&[1.0, 1.0, -1e-13], 3, 2).unwrap();
        assert_eq!(p.scores()[2], 0.0);
    }

    #[test]
    fn many_big_maximal_zeros_small_cases() {
        // exhaustive check for m <= 8: no valid profile with max = mu can have
        // more zeros than dist_many_big produces (counting argument: z zeros
        // force the m - z nonzeros, each <= mu, to sum to n)
        for m in 2..=8usize {
            for n in 1..=m {
                for num in n..=m {
                    let mu = n as f64 / num as f64; // grid of valid coherences
                    if mu > 1.0 {
                        continue;
                    }
                    let p = dist_many_big(m, n, mu).unwrap();
                    let zeros = p.scores().iter().filter(|&&v| v == 0.0).count();
                    let max_possible = (0..m)
                        .rev()
                        .find(|z| (m - z) as f64 * mu >= n as f64 - 1e-12)
                        .unwrap_or(0);
                    assert_eq!(zeros, max_possible, "m={m} n={n} mu={mu}");
                }
            }
        }
    }
}
