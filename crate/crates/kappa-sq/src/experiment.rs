//! Monte-Carlo engine: builds test matrices, runs repeated sampling trials
//! across a c- or mu-sweep, records kappa(SQ) and failure events, and
//! evaluates the requested bound curves on the same grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::bounds::{self, BoundId, BoundPoint, BoundQuery};
use crate::error::{Error, Result};
use crate::givens::generate_from_leverage;
use crate::linalg::{self, condition_number, ConditionNumber};
use crate::matrix::RealMatrix;
use crate::profile::{dist_many_big, dist_one_big, validate_profile, LeverageProfile};
use crate::sampling::{sample, RngStream, SampleMethod, StreamId};

/// How leverage scores for the generated matrix are chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeverageDistribution {
    OneBig,
    ManyBig,
    Explicit(Vec<f64>),
}

/// Where the test matrix comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSource {
    /// Givens generator driven by a leverage-score distribution.
    Generated(LeverageDistribution),
    /// A user-supplied matrix with orthonormal columns.
    Explicit(RealMatrix),
}

/// The swept quantity: exactly one of c or mu varies across the grid.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepSpec {
    SampleCount { values: Vec<usize>, mu: f64 },
    Coherence { values: Vec<f64>, c: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CiMethod {
    Wald,
    Wilson,
}

/// Declarative description of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub m: usize,
    pub n: usize,
    pub sweep: SweepSpec,
    pub samplers: Vec<SampleMethod>,
    pub bounds: Vec<BoundId>,
    pub runs: usize,
    pub delta: f64,
    pub matrix_source: Option<MatrixSource>,
    pub seed: u64,
    pub ci_level: f64,
    pub ci_method: CiMethod,
    /// Recompute the leverage profile from the generated Q for Method 4
    /// instead of reusing the requested profile.
    pub recompute_leverage: bool,
}

/// One sampling trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub grid_index: usize,
    pub trial_index: usize,
    pub sampler: SampleMethod,
    pub realized_c: usize,
    pub failed: bool,
    pub kappa: Option<f64>,
}

/// Per-(grid point, sampler) aggregate statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRecord {
    pub grid_index: usize,
    pub sampler: SampleMethod,
    pub runs: usize,
    pub failures: usize,
    pub failure_rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Zero-width interval at p-hat in {0, 1} under the Wald formula.
    pub ci_degenerate: bool,
    pub kappa_min: Option<f64>,
    pub kappa_median: Option<f64>,
    pub kappa_max: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    /// Grid values (c or mu) as plotted on the x-axis.
    pub grid: Vec<f64>,
    pub trials: Vec<TrialRecord>,
    pub aggregates: Vec<AggregateRecord>,
    pub bound_curves: Vec<(BoundId, Vec<BoundPoint>)>,
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.runs == 0 && !self.samplers.is_empty() {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.samplers.is_empty() && self.bounds.is_empty() {
            return Err(Error::Config(
                "select at least one sampler or one bound".into(),
            ));
        }
        if self.n < 1 || self.m < self.n {
            return Err(Error::Config(format!(
                "require m >= n >= 1, got m = {}, n = {}",
                self.m, self.n
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!("delta {} outside (0, 1)", self.delta)));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::Config(format!(
                "ci_level {} outside (0, 1)",
                self.ci_level
            )));
        }
        match &self.sweep {
            SweepSpec::SampleCount { values, mu } => {
                if values.is_empty() {
                    return Err(Error::Config("empty c grid".into()));
                }
                if let Some(&c) = values.iter().find(|&&c| c < self.n || c > self.m) {
                    return Err(Error::Config(format!(
                        "grid value c = {c} outside [n, m] = [{}, {}]",
                        self.n, self.m
                    )));
                }
                let lo = self.n as f64 / self.m as f64;
                if *mu < lo - 1e-12 || *mu > 1.0 + 1e-12 {
                    return Err(Error::Config(format!("mu {mu} outside [{lo}, 1]")));
                }
            }
            SweepSpec::Coherence { values, c } => {
                if values.is_empty() {
                    return Err(Error::Config("empty mu grid".into()));
                }
                if *c < self.n || *c > self.m {
                    return Err(Error::Config(format!(
                        "c = {c} outside [n, m] = [{}, {}]",
                        self.n, self.m
                    )));
                }
                let lo = self.n as f64 / self.m as f64;
                if let Some(&mu) = values
                    .iter()
                    .find(|&&mu| mu < lo - 1e-12 || mu > 1.0 + 1e-12)
                {
                    return Err(Error::Config(format!("grid value mu = {mu} outside [{lo}, 1]")));
                }
                if matches!(self.matrix_source, Some(MatrixSource::Explicit(_))) {
                    return Err(Error::Config(
                        "a mu sweep regenerates the matrix per grid point and cannot use an \
                         explicit matrix"
                            .into(),
                    ));
                }
            }
        }
        let needs_matrix = !self.samplers.is_empty() || self.bounds.contains(&BoundId::B2Bernstein);
        if needs_matrix && self.matrix_source.is_none() {
            return Err(Error::Config(
                "a matrix source is required to run samplers or evaluate B2".into(),
            ));
        }
        Ok(())
    }
}

/// Matrix, profile and derived scalars for one grid point.
struct GridContext {
    q: Option<RealMatrix>,
    profile: Option<LeverageProfile>,
    mu: f64,
    lambda: Option<f64>,
    c: usize,
}

fn build_profile(
    dist: &LeverageDistribution,
    m: usize,
    n: usize,
    mu: f64,
) -> Result<LeverageProfile> {
    match dist {
        LeverageDistribution::OneBig => dist_one_big(m, n, mu),
        LeverageDistribution::ManyBig => dist_many_big(m, n, mu),
        LeverageDistribution::Explicit(scores) => Ok(validate_profile(scores, m, n)?),
    }
}

fn grid_context(config: &ExperimentConfig, grid_index: usize, needs_lambda: bool) -> Result<GridContext> {
    let (c, mu) = match &config.sweep {
        SweepSpec::SampleCount { values, mu } => (values[grid_index], *mu),
        SweepSpec::Coherence { values, c } => (*c, values[grid_index]),
    };
    let (q, profile) = match &config.matrix_source {
        None => (None, None),
        Some(MatrixSource::Explicit(q)) => {
            let profile = linalg::leverage_scores(q)?;
            (Some(q.clone()), Some(profile))
        }
        Some(MatrixSource::Generated(dist)) => {
            let profile = build_profile(dist, config.m, config.n, mu)?;
            let (q, _) = generate_from_leverage(&profile)?;
            let profile = if config.recompute_leverage {
                linalg::leverage_scores(&q)?
            } else {
                profile
            };
            (Some(q), Some(profile))
        }
    };
    let mu = match &profile {
        Some(p) if matches!(config.matrix_source, Some(MatrixSource::Explicit(_))) => p.coherence(),
        _ => mu,
    };
    let lambda = if needs_lambda {
        match &q {
            Some(q) => Some(linalg::projected_leverage_norm(q)?),
            None => None,
        }
    } else {
        None
    };
    Ok(GridContext {
        q,
        profile,
        mu,
        lambda,
        c,
    })
}

fn run_trial(
    config: &ExperimentConfig,
    ctx: &GridContext,
    grid_index: usize,
    trial_index: usize,
    sampler: SampleMethod,
) -> Result<TrialRecord> {
    let q = ctx.q.as_ref().expect("samplers require a matrix source");
    let mut rng = RngStream::new(
        config.seed,
        StreamId {
            grid_index: grid_index as u64,
            trial_index: trial_index as u64,
            lane: sampler.lane(),
        },
    );
    let outcome = sample(sampler, q, ctx.c, ctx.profile.as_ref(), &mut rng)?;
    let n = config.n;
    let (failed, kappa) = if outcome.realized_c < n {
        (true, None)
    } else {
        match condition_number(&outcome.matrix, None) {
            ConditionNumber::Value(k) => (false, Some(k)),
            ConditionNumber::RankDeficient { .. } => (true, None),
        }
    };
    Ok(TrialRecord {
        grid_index,
        trial_index,
        sampler,
        realized_c: outcome.realized_c,
        failed,
        kappa,
    })
}

fn aggregate(
    trials: &[TrialRecord],
    grid_len: usize,
    samplers: &[SampleMethod],
    runs: usize,
    ci_level: f64,
    ci_method: CiMethod,
) -> Result<Vec<AggregateRecord>> {
    let mut out = Vec::with_capacity(grid_len * samplers.len());
    for grid_index in 0..grid_len {
        for &sampler in samplers {
            let subset: Vec<&TrialRecord> = trials
                .iter()
                .filter(|t| t.grid_index == grid_index && t.sampler == sampler)
                .collect();
            let failures = subset.iter().filter(|t| t.failed).count();
            let mut kappas: Vec<f64> = subset.iter().filter_map(|t| t.kappa).collect();
            kappas.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let (ci_lo, ci_hi) = match ci_method {
                CiMethod::Wald => failure_confidence_interval(failures, runs, ci_level)?,
                CiMethod::Wilson => {
                    failure_confidence_interval_wilson(failures, runs, ci_level)?
                }
            };
            let median = if kappas.is_empty() {
                None
            } else if kappas.len() % 2 == 1 {
                Some(kappas[kappas.len() / 2])
            } else {
                Some(0.5 * (kappas[kappas.len() / 2 - 1] + kappas[kappas.len() / 2]))
            };
            out.push(AggregateRecord {
                grid_index,
                sampler,
                runs,
                failures,
                failure_rate: failures as f64 / runs as f64,
                ci_lo,
                ci_hi,
                ci_degenerate: ci_method == CiMethod::Wald && (failures == 0 || failures == runs),
                kappa_min: kappas.first().copied(),
                kappa_median: median,
                kappa_max: kappas.last().copied(),
            });
        }
    }
    Ok(out)
}

fn bound_curves(
    config: &ExperimentConfig,
    contexts: &[GridContext],
) -> Result<Vec<(BoundId, Vec<BoundPoint>)>> {
    let mut curves = Vec::with_capacity(config.bounds.len());
    for &bound in &config.bounds {
        let mut points = Vec::with_capacity(contexts.len());
        for ctx in contexts {
            let q = BoundQuery {
                bound,
                m: config.m,
                n: config.n,
                mu: ctx.mu,
                lambda: ctx.lambda,
                c: ctx.c,
                delta: config.delta,
                gamma: Some(ctx.c as f64 / config.m as f64),
            };
            points.push(bounds::evaluate(&q)?);
        }
        curves.push((bound, points));
    }
    Ok(curves)
}

fn run_experiment_impl(config: &ExperimentConfig, parallel: bool) -> Result<ExperimentResult> {
    config.validate()?;
    let grid: Vec<f64> = match &config.sweep {
        SweepSpec::SampleCount { values, .. } => values.iter().map(|&c| c as f64).collect(),
        SweepSpec::Coherence { values, .. } => values.clone(),
    };
    let needs_lambda = config.bounds.contains(&BoundId::B2Bernstein);

    // with a c sweep the matrix does not depend on the grid point, so it is
    // generated once and shared; a mu sweep regenerates per point
    let contexts: Vec<GridContext> = match &config.sweep {
        SweepSpec::SampleCount { values, .. } => {
            let first = grid_context(config, 0, needs_lambda)?;
            values
                .iter()
                .map(|&c| GridContext {
                    q: first.q.clone(),
                    profile: first.profile.clone(),
                    mu: first.mu,
                    lambda: first.lambda,
                    c,
                })
                .collect()
        }
        SweepSpec::Coherence { values, .. } => (0..values.len())
            .map(|k| grid_context(config, k, needs_lambda))
            .collect::<Result<Vec<_>>>()?,
    };

    let mut jobs = Vec::with_capacity(grid.len() * config.samplers.len() * config.runs);
    for grid_index in 0..grid.len() {
        for trial_index in 0..config.runs {
            for &sampler in &config.samplers {
                jobs.push((grid_index, trial_index, sampler));
            }
        }
    }
    let trials: Vec<TrialRecord> = if parallel {
        jobs.par_iter()
            .map(|&(g, t, s)| run_trial(config, &contexts[g], g, t, s))
            .collect::<Result<Vec<_>>>()?
    } else {
        jobs.iter()
            .map(|&(g, t, s)| run_trial(config, &contexts[g], g, t, s))
            .collect::<Result<Vec<_>>>()?
    };
    let mut trials = trials;
    trials.sort_by_key(|t| (t.grid_index, t.trial_index, t.sampler.lane()));

    let aggregates = aggregate(
        &trials,
        grid.len(),
        &config.samplers,
        config.runs,
        config.ci_level,
        config.ci_method,
    )?;
    let bound_curves = bound_curves(config, &contexts)?;

    Ok(ExperimentResult {
        config: config.clone(),
        grid,
        trials,
        aggregates,
        bound_curves,
    })
}

/// Runs the experiment with trial-level parallelism. Bit-reproducible for a
/// fixed seed: every trial owns its derived random stream.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    run_experiment_impl(config, true)
}

/// Serial variant; produces results identical to [`run_experiment`].
pub fn run_experiment_serial(config: &ExperimentConfig) -> Result<ExperimentResult> {
    run_experiment_impl(config, false)
}

/// Normal-approximation (Wald) confidence interval for a failure
/// probability, clipped to [0, 1].
pub fn failure_confidence_interval(
    failures: usize,
    runs: usize,
    level: f64,
) -> Result<(f64, f64)> {
    check_ci_args(failures, runs, level)?;
    let p = failures as f64 / runs as f64;
    let z = normal_quantile((1.0 + level) / 2.0);
    let half = z * (p * (1.0 - p) / runs as f64).sqrt();
    Ok(((p - half).max(0.0), (p + half).min(1.0)))
}

/// Wilson score interval; does not degenerate at p-hat in {0, 1}.
pub fn failure_confidence_interval_wilson(
    failures: usize,
    runs: usize,
    level: f64,
) -> Result<(f64, f64)> {
    check_ci_args(failures, runs, level)?;
    let n = runs as f64;
    let p = failures as f64 / n;
    let z = normal_quantile((1.0 + level) / 2.0);
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * ((p * (1.0 - p) + z2 / (4.0 * n)) / n).sqrt() / denom;
    Ok(((center - half).max(0.0), (center + half).min(1.0)))
}

fn check_ci_args(failures: usize, runs: usize, level: f64) -> Result<()> {
    if runs < 1 {
        return Err(Error::InvalidArgument("runs must be at least 1".into()));
    }
    if failures > runs {
        return Err(Error::InvalidArgument(format!(
            "failures {failures} exceed runs {runs}"
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "confidence level {level} outside (0, 1)"
        )));
    }
    Ok(())
}

fn normal_quantile(p: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().inverse_cdf(p)
}

/// Integer grid of k points between lo and hi, log-spaced and rounded, with
/// duplicates removed. Heavier towards the small end, where the interesting
/// behaviour (and the cheap computation) lives.
pub fn log_points(lo: u64, hi: u64, k: usize) -> Result<Vec<u64>> {
    if lo < 1 || lo > hi {
        return Err(Error::InvalidArgument(format!(
            "require 1 <= lo <= hi, got lo = {lo}, hi = {hi}"
        )));
    }
    if k < 2 {
        return Err(Error::InvalidArgument("k must be at least 2".into()));
    }
    if lo == hi {
        return Ok(vec![lo]);
    }
    let (ln_lo, ln_hi) = ((lo as f64).ln(), (hi as f64).ln());
    let mut points = Vec::with_capacity(k);
    for i in 0..k {
        let t = i as f64 / (k - 1) as f64;
        let v = (ln_lo + t * (ln_hi - ln_lo)).exp().round() as u64;
        points.push(v.clamp(lo, hi));
    }
    points[0] = lo;
    points[k - 1] = hi;
    points.dedup();
    Ok(points)
}

/// Real-valued log-spaced grid with exact endpoints and no rounding.
pub fn log_points_double(lo: f64, hi: f64, k: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0) || lo > hi {
        return Err(Error::InvalidArgument(format!(
            "require 0 < lo <= hi, got lo = {lo}, hi = {hi}"
        )));
    }
    if k < 2 {
        return Err(Error::InvalidArgument("k must be at least 2".into()));
    }
    if lo == hi {
        return Ok(vec![lo]);
    }
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    let mut points = Vec::with_capacity(k);
    for i in 0..k {
        let t = i as f64 / (k - 1) as f64;
        points.push((ln_lo + t * (ln_hi - ln_lo)).exp());
    }
    points[0] = lo;
    points[k - 1] = hi;
    Ok(points)
}
