//! Serial batch execution: each entry runs to completion (CSV + SVG written
//! under `<batch-stem>_<index>`), and one entry's failure is recorded in the
//! summary without aborting the rest.

use std::path::{Path, PathBuf};

use crate::config::ConfigEntry;
use crate::csvio::{self, OutputPaths};
use crate::error::Result;
use crate::experiment::run_experiment;
use crate::plot;

/// Outcome of one batch entry.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchEntryOutcome {
    /// 1-based position in the batch.
    pub index: usize,
    pub name: String,
    /// Present when the entry failed; the other entries still ran.
    pub error: Option<String>,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BatchSummary {
    pub entries: Vec<BatchEntryOutcome>,
}

impl BatchSummary {
    pub fn failed_count(&self) -> usize {
        self.entries.iter().filter(|e| e.error.is_some()).count()
    }

    pub fn all_succeeded(&self) -> bool {
        self.failed_count() == 0
    }
}

fn run_entry(
    entry: &ConfigEntry,
    base_dir: &Path,
    stem: &Path,
    seed_override: Option<u64>,
) -> Result<Vec<PathBuf>> {
    let config = entry.resolve(base_dir, seed_override)?;
    let result = run_experiment(&config)?;
    let paths = OutputPaths::from_stem(stem);
    let mut files = Vec::new();
    csvio::write_trials_csv(&csvio::trial_rows(&result), &paths.trials)?;
    files.push(paths.trials.clone());
    csvio::write_bounds_csv(&csvio::bound_rows(&result), &paths.bounds)?;
    files.push(paths.bounds.clone());
    files.extend(plot::render_plots(&result, &entry.plot, stem)?);
    Ok(files)
}

/// Runs every entry of a batch in order. Output stems are
/// `<batch_stem>_<index>` with 1-based indices. `seed_override` applies a
/// distinct derived seed (base + index - 1) to each entry, keeping entries
/// independent; entries carrying their own seed are used as-is otherwise.
pub fn run_batch(
    entries: &[ConfigEntry],
    base_dir: &Path,
    batch_stem: &Path,
    seed_override: Option<u64>,
) -> BatchSummary {
    let mut summary = BatchSummary::default();
    for (k, entry) in entries.iter().enumerate() {
        let index = k + 1;
        let name = entry.name.clone().unwrap_or_else(|| format!("entry-{index}"));
        let stem = ConfigEntry::batch_stem(batch_stem, index);
        let seed = seed_override.map(|s| s + k as u64);
        let outcome = match run_entry(entry, base_dir, &stem, seed) {
            Ok(files) => BatchEntryOutcome {
                index,
                name,
                error: None,
                files,
            },
            Err(e) => BatchEntryOutcome {
                index,
                name,
                error: Some(e.to_string()),
                files: Vec::new(),
            },
        };
        summary.entries.push(outcome);
    }
    summary
}

/// Runs a single (non-batch) entry, writing outputs under `stem`.
pub fn run_single(
    entry: &ConfigEntry,
    base_dir: &Path,
    stem: &Path,
    seed_override: Option<u64>,
) -> Result<Vec<PathBuf>> {
    run_entry(entry, base_dir, stem, seed_override)
}
