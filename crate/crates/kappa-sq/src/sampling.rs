//! The four randomized row-sampling schemes. Each forms B = SQ directly:
//! the selected rows of Q scaled by sqrt(m/c).

use nalgebra::DMatrix;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::profile::LeverageProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMethod {
    WithoutReplacement,
    WithReplacement,
    Bernoulli,
    ProportionalToLeverage,
}

impl SampleMethod {
    pub const ALL: [SampleMethod; 4] = [
        SampleMethod::WithoutReplacement,
        SampleMethod::WithReplacement,
        SampleMethod::Bernoulli,
        SampleMethod::ProportionalToLeverage,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SampleMethod::WithoutReplacement => "without-replacement",
            SampleMethod::WithReplacement => "with-replacement",
            SampleMethod::Bernoulli => "bernoulli",
            SampleMethod::ProportionalToLeverage => "proportional-to-leverage",
        }
    }

    pub fn from_name(name: &str) -> Option<SampleMethod> {
        Self::ALL.iter().copied().find(|m| m.name() == name)
    }

    /// Stable per-method lane used when deriving per-trial RNG streams, so
    /// that stream identity does not depend on config ordering.
    pub fn lane(&self) -> u64 {
        match self {
            SampleMethod::WithoutReplacement => 0,
            SampleMethod::WithReplacement => 1,
            SampleMethod::Bernoulli => 2,
            SampleMethod::ProportionalToLeverage => 3,
        }
    }
}

impl std::fmt::Display for SampleMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Identity of one random stream within an experiment: the trial's grid
/// point, trial number and sampler lane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamId {
    pub grid_index: u64,
    pub trial_index: u64,
    pub lane: u64,
}

/// A seedable, splittable random stream. Identical (seed, identity) pairs
/// produce identical sequences regardless of scheduling, which is what makes
/// parallel experiment runs bit-reproducible.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64, id: StreamId) -> Self {
        let k0 = splitmix64(seed);
        let k1 = splitmix64(k0 ^ splitmix64(id.grid_index.wrapping_add(1)));
        let k2 = splitmix64(k1 ^ splitmix64(id.trial_index.wrapping_add(2)));
        let k3 = splitmix64(k2 ^ splitmix64(id.lane.wrapping_add(3)));
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&k0.to_le_bytes());
        key[8..16].copy_from_slice(&k1.to_le_bytes());
        key[16..24].copy_from_slice(&k2.to_le_bytes());
        key[24..32].copy_from_slice(&k3.to_le_bytes());
        Self {
            rng: ChaCha8Rng::from_seed(key),
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

/// The sampled matrix B = SQ together with the selected row indices
/// (0-based) and the realized row count.
#[derive(Debug, Clone)]
pub struct SampleOutcome {
    pub matrix: RealMatrix,
    pub indices: Vec<usize>,
    pub nominal_c: usize,
    pub realized_c: usize,
    pub method: SampleMethod,
}

fn check_c(c: usize, m: usize) -> Result<()> {
    if c < 1 || c > m {
        return Err(Error::SampleCountOutOfRange { c, m });
    }
    Ok(())
}

fn gather_rows(q: &RealMatrix, indices: &[usize], nominal_c: usize, method: SampleMethod) -> SampleOutcome {
    let n = q.cols();
    let scale = (q.rows() as f64 / nominal_c as f64).sqrt();
    let mut b = DMatrix::zeros(indices.len(), n);
    for (out_row, &src) in indices.iter().enumerate() {
        for k in 0..n {
            b[(out_row, k)] = scale * q.get(src, k);
        }
    }
    SampleOutcome {
        matrix: RealMatrix::from_dmatrix(b).expect("scaled finite rows"),
        indices: indices.to_vec(),
        nominal_c,
        realized_c: indices.len(),
        method,
    }
}

/// Uniform sampling without replacement: the first c entries of a uniformly
/// random permutation of the rows (Fisher-Yates).
pub fn sample_without_replacement(
    q: &RealMatrix,
    c: usize,
    rng: &mut RngStream,
) -> Result<SampleOutcome> {
    let m = q.rows();
    check_c(c, m)?;
    let mut perm: Vec<usize> = (0..m).collect();
    for i in (1..m).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    Ok(gather_rows(q, &perm[..c], c, SampleMethod::WithoutReplacement))
}

/// Uniform sampling with replacement: c i.i.d. uniform row indices.
pub fn sample_with_replacement(
    q: &RealMatrix,
    c: usize,
    rng: &mut RngStream,
) -> Result<SampleOutcome> {
    let m = q.rows();
    check_c(c, m)?;
    let indices: Vec<usize> = (0..c).map(|_| rng.gen_range(0..m)).collect();
    Ok(gather_rows(q, &indices, c, SampleMethod::WithReplacement))
}

/// Bernoulli sampling: each row kept independently with probability c/m.
/// Kept rows are scaled by sqrt(m/c) with the nominal c; the realized count
/// is random and may be zero.
pub fn sample_bernoulli(q: &RealMatrix, c: usize, rng: &mut RngStream) -> Result<SampleOutcome> {
    let m = q.rows();
    check_c(c, m)?;
    let p = c as f64 / m as f64;
    let indices: Vec<usize> = (0..m).filter(|_| rng.gen::<f64>() < p).collect();
    Ok(gather_rows(q, &indices, c, SampleMethod::Bernoulli))
}

/// Sampling proportional to leverage scores: c i.i.d. indices from the
/// categorical distribution l_i/n, with replacement.
pub fn sample_proportional_to_leverage(
    q: &RealMatrix,
    c: usize,
    profile: &LeverageProfile,
    rng: &mut RngStream,
) -> Result<SampleOutcome> {
    let m = q.rows();
    let n = q.cols();
    check_c(c, m)?;
    if profile.m() != m {
        return Err(Error::InvalidArgument(format!(
            "profile length {} does not match matrix rows {m}",
            profile.m()
        )));
    }
    let sum: f64 = profile.scores().iter().sum();
    if (sum - n as f64).abs() > 1e-8 * n as f64 {
        return Err(Error::InvalidArgument(format!(
            "profile sum {sum} deviates from n = {n} by more than 1e-8*n"
        )));
    }
    // inverse-CDF on the cumulative l/n; zero-width buckets are unreachable
    let mut cumulative = Vec::with_capacity(m);
    let mut acc = 0.0;
    for &l in profile.scores() {
        acc += l / sum;
        cumulative.push(acc);
    }
    let last_nonzero = profile
        .scores()
        .iter()
        .rposition(|&l| l > 0.0)
        .expect("profile sums to n >= 1");
    let indices: Vec<usize> = (0..c)
        .map(|_| {
            let u: f64 = rng.gen();
            let k = cumulative.partition_point(|&cum| cum <= u);
            k.min(last_nonzero)
        })
        .collect();
    Ok(gather_rows(q, &indices, c, SampleMethod::ProportionalToLeverage))
}

/// Dispatch by method. `profile` is required for leverage-proportional
/// sampling only.
pub fn sample(
    method: SampleMethod,
    q: &RealMatrix,
    c: usize,
    profile: Option<&LeverageProfile>,
    rng: &mut RngStream,
) -> Result<SampleOutcome> {
    match method {
        SampleMethod::WithoutReplacement => sample_without_replacement(q, c, rng),
        SampleMethod::WithReplacement => sample_with_replacement(q, c, rng),
        SampleMethod::Bernoulli => sample_bernoulli(q, c, rng),
        SampleMethod::ProportionalToLeverage => {
            let profile = profile.ok_or_else(|| {
                Error::InvalidArgument(
                    "leverage-proportional sampling needs a leverage profile".into(),
                )
            })?;
            sample_proportional_to_leverage(q, c, profile, rng)
        }
    }
}
