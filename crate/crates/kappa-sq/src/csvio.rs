//! CSV serialization: trial and bound-curve results, matrices and leverage
//! profiles. Comma separator, LF line endings, header row on result files,
//! floats written in their shortest round-trip form.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::bounds::{BoundId, BoundPoint};
use crate::error::{Error, Result};
use crate::experiment::ExperimentResult;
use crate::matrix::RealMatrix;
use crate::sampling::SampleMethod;

pub const TRIALS_HEADER: &str = "grid_value,grid_index,sampler,trial_index,realized_c,failed,kappa";
pub const BOUNDS_HEADER: &str = "grid_value,bound_id,applicable,epsilon,kappa_bound";

/// One trials-CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub grid_value: f64,
    pub grid_index: usize,
    pub sampler: SampleMethod,
    pub trial_index: usize,
    pub realized_c: usize,
    pub failed: bool,
    pub kappa: Option<f64>,
}

/// One bounds-CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub grid_value: f64,
    pub bound: BoundId,
    pub point: BoundPoint,
}

pub fn trial_rows(result: &ExperimentResult) -> Vec<TrialRow> {
    result
        .trials
        .iter()
        .map(|t| TrialRow {
            grid_value: result.grid[t.grid_index],
            grid_index: t.grid_index,
            sampler: t.sampler,
            trial_index: t.trial_index,
            realized_c: t.realized_c,
            failed: t.failed,
            kappa: t.kappa,
        })
        .collect()
}

pub fn bound_rows(result: &ExperimentResult) -> Vec<BoundRow> {
    let mut rows = Vec::new();
    for (bound, curve) in &result.bound_curves {
        for (k, point) in curve.iter().enumerate() {
            rows.push(BoundRow {
                grid_value: result.grid[k],
                bound: *bound,
                point: *point,
            });
        }
    }
    rows
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

pub fn write_trials_csv(rows: &[TrialRow], path: &Path) -> Result<()> {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(TRIALS_HEADER);
    out.push('\n');
    for r in rows {
        let kappa = r.kappa.map(|k| k.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.grid_value,
            r.grid_index,
            r.sampler.name(),
            r.trial_index,
            r.realized_c,
            u8::from(r.failed),
            kappa
        ));
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

pub fn read_trials_csv(path: &Path) -> Result<Vec<TrialRow>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == TRIALS_HEADER => {}
        _ => return Err(parse_err(path, 1, format!("expected header '{TRIALS_HEADER}'"))),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(parse_err(path, lineno, format!("expected 7 fields, got {}", fields.len())));
        }
        let sampler = SampleMethod::from_name(fields[2])
            .ok_or_else(|| parse_err(path, lineno, format!("unknown sampler '{}'", fields[2])))?;
        let failed = match fields[5] {
            "0" => false,
            "1" => true,
            other => return Err(parse_err(path, lineno, format!("failed flag must be 0/1, got '{other}'"))),
        };
        let kappa = if fields[6].is_empty() {
            None
        } else {
            Some(parse_f64(fields[6], path, lineno)?)
        };
        if failed != kappa.is_none() {
            return Err(parse_err(path, lineno, "kappa must be empty exactly when failed = 1"));
        }
        rows.push(TrialRow {
            grid_value: parse_f64(fields[0], path, lineno)?,
            grid_index: parse_usize(fields[1], path, lineno)?,
            sampler,
            trial_index: parse_usize(fields[3], path, lineno)?,
            realized_c: parse_usize(fields[4], path, lineno)?,
            failed,
            kappa,
        });
    }
    Ok(rows)
}

pub fn write_bounds_csv(rows: &[BoundRow], path: &Path) -> Result<()> {
    let mut out = String::with_capacity(48 * (rows.len() + 1));
    out.push_str(BOUNDS_HEADER);
    out.push('\n');
    for r in rows {
        match r.point {
            BoundPoint::Applicable {
                epsilon,
                kappa_bound,
            } => out.push_str(&format!(
                "{},{},1,{},{}\n",
                r.grid_value,
                r.bound.name(),
                epsilon,
                kappa_bound
            )),
            BoundPoint::NotApplicable => {
                out.push_str(&format!("{},{},0,,\n", r.grid_value, r.bound.name()))
            }
        }
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

pub fn read_bounds_csv(path: &Path) -> Result<Vec<BoundRow>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == BOUNDS_HEADER => {}
        _ => return Err(parse_err(path, 1, format!("expected header '{BOUNDS_HEADER}'"))),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(parse_err(path, lineno, format!("expected 5 fields, got {}", fields.len())));
        }
        let bound = BoundId::from_name(fields[1])
            .ok_or_else(|| parse_err(path, lineno, format!("unknown bound '{}'", fields[1])))?;
        let point = match fields[2] {
            "1" => BoundPoint::Applicable {
                epsilon: parse_f64(fields[3], path, lineno)?,
                kappa_bound: parse_f64(fields[4], path, lineno)?,
            },
            "0" => {
                if !fields[3].is_empty() || !fields[4].is_empty() {
                    return Err(parse_err(path, lineno, "inapplicable rows must leave epsilon and kappa_bound empty"));
                }
                BoundPoint::NotApplicable
            }
            other => return Err(parse_err(path, lineno, format!("applicable flag must be 0/1, got '{other}'"))),
        };
        rows.push(BoundRow {
            grid_value: parse_f64(fields[0], path, lineno)?,
            bound,
            point,
        });
    }
    Ok(rows)
}

/// Writes a matrix as plain CSV, one row per line, losslessly.
pub fn write_matrix_csv(m: &RealMatrix, path: &Path) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut buf = String::new();
    for i in 0..m.rows() {
        buf.clear();
        for j in 0..m.cols() {
            if j > 0 {
                buf.push(',');
            }
            buf.push_str(&m.get(i, j).to_string());
        }
        buf.push('\n');
        file.write_all(buf.as_bytes()).map_err(|e| io_err(path, e))?;
    }
    Ok(())
}

pub fn read_matrix_csv(path: &Path) -> Result<RealMatrix> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut entries = Vec::new();
    let mut cols = None;
    let mut rows = 0usize;
    for (idx, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        match cols {
            None => cols = Some(fields.len()),
            Some(c) if c != fields.len() => {
                return Err(parse_err(path, lineno, format!("ragged row: expected {c} fields, got {}", fields.len())))
            }
            _ => {}
        }
        for f in fields {
            entries.push(parse_f64(f, path, lineno)?);
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| parse_err(path, 1, "empty matrix file"))?;
    RealMatrix::from_rows(rows, cols, &entries)
}

/// Writes a leverage-score vector, one value per line.
pub fn write_profile_csv(scores: &[f64], path: &Path) -> Result<()> {
    let mut out = String::new();
    for s in scores {
        out.push_str(&s.to_string());
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

pub fn read_profile_csv(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut scores = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        scores.push(parse_f64(line.trim(), path, idx + 1)?);
    }
    Ok(scores)
}

fn parse_f64(s: &str, path: &Path, line: usize) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| parse_err(path, line, format!("not a number: '{s}'")))
}

fn parse_usize(s: &str, path: &Path, line: usize) -> Result<usize> {
    s.parse::<usize>()
        .map_err(|_| parse_err(path, line, format!("not an integer: '{s}'")))
}

/// Output file paths for one experiment, derived from a stem.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputPaths {
    pub trials: PathBuf,
    pub bounds: PathBuf,
    pub kappa_svg: PathBuf,
    pub failure_svg: PathBuf,
}

impl OutputPaths {
    pub fn from_stem(stem: &Path) -> Self {
        let with = |suffix: &str| {
            let mut name = stem.file_name().unwrap_or_default().to_os_string();
            name.push(suffix);
            stem.with_file_name(name)
        };
        OutputPaths {
            trials: with("_trials.csv"),
            bounds: with("_bounds.csv"),
            kappa_svg: with("_kappa.svg"),
            failure_svg: with("_failure.svg"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::orthonormality_defect;

    fn tmp(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join("kappa_sq_csv_tests");
        fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn matrix_round_trip_bit_exact() {
        let m = RealMatrix::from_rows(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        let path = tmp("eye32.csv");
        write_matrix_csv(&m, &path).unwrap();
        let back = read_matrix_csv(&path).unwrap();
        assert_eq!(m.as_dmatrix(), back.as_dmatrix());
    }

    #[test]
    fn generated_matrix_round_trip_preserves_defect() {
        let p = crate::profile::dist_one_big(64, 8, 0.5).unwrap();
        let (q, _) = crate::givens::generate_from_leverage(&p).unwrap();
        let path = tmp("q648.csv");
        write_matrix_csv(&q, &path).unwrap();
        let back = read_matrix_csv(&path).unwrap();
        assert_eq!(q.as_dmatrix(), back.as_dmatrix());
        assert!((orthonormality_defect(&q) - orthonormality_defect(&back)).abs() <= 1e-15);
    }

    #[test]
    fn ragged_matrix_names_the_line() {
        let path = tmp("ragged.csv");
        fs::write(&path, "1,2\n3\n").unwrap();
        match read_matrix_csv(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn non_numeric_matrix_field() {
        let path = tmp("nonnum.csv");
        fs::write(&path, "1,x\n").unwrap();
        assert!(matches!(read_matrix_csv(&path), Err(Error::Parse { .. })));
    }

    #[test]
    fn trials_round_trip() {
        let rows = vec![
            TrialRow {
                grid_value: 50.0,
                grid_index: 0,
                sampler: SampleMethod::WithReplacement,
                trial_index: 0,
                realized_c: 50,
                failed: false,
                kappa: Some(1.2345678901234567),
            },
            TrialRow {
                grid_value: 50.0,
                grid_index: 0,
                sampler: SampleMethod::Bernoulli,
                trial_index: 1,
                realized_c: 2,
                failed: true,
                kappa: None,
            },
        ];
        let path = tmp("trials.csv");
        write_trials_csv(&rows, &path).unwrap();
        let back = read_trials_csv(&path).unwrap();
        assert_eq!(rows, back);
        let text = fs::read_to_string(&path).unwrap();
        // failed trial: empty kappa field, failed = 1
        assert!(text.lines().nth(2).unwrap().ends_with(",1,"));
    }

    #[test]
    fn bounds_round_trip_with_gap() {
        let rows = vec![
            BoundRow {
                grid_value: 4.0,
                bound: BoundId::B1Chernoff,
                point: BoundPoint::NotApplicable,
            },
            BoundRow {
                grid_value: 500.0,
                bound: BoundId::B1Chernoff,
                point: BoundPoint::Applicable {
                    epsilon: 0.25,
                    kappa_bound: (1.25f64 / 0.75).sqrt(),
                },
            },
        ];
        let path = tmp("bounds.csv");
        write_bounds_csv(&rows, &path).unwrap();
        assert_eq!(read_bounds_csv(&path).unwrap(), rows);
    }

    #[test]
    fn header_only_files() {
        let path = tmp("empty_trials.csv");
        write_trials_csv(&[], &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), format!("{TRIALS_HEADER}\n"));
        assert!(read_trials_csv(&path).unwrap().is_empty());
        let path = tmp("empty_bounds.csv");
        write_bounds_csv(&[], &path).unwrap();
        assert!(read_bounds_csv(&path).unwrap().is_empty());
    }

    #[test]
    fn profile_round_trip() {
        let scores = vec![0.6, 0.35, 0.05];
        let path = tmp("profile.csv");
        write_profile_csv(&scores, &path).unwrap();
        assert_eq!(read_profile_csv(&path).unwrap(), scores);
    }
}
