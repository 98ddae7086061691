//! Problem files (JSON) and run traces (CSV plus sidecars).
//!
//! A problem file looks like
//!
//! ```json
//! {
//!   "dim": 2,
//!   "sets": [
//!     {"type": "halfspace", "normal": [1.0, 0.0], "offset": 1.0},
//!     {"type": "ball", "center": [0.0, 0.0], "radius": 2.0}
//!   ],
//!   "interior_point": [0.0, 0.0],
//!   "slack": 0.5
//! }
//! ```
//!
//! Other variants are `hyperplane` (`normal`, `offset`), `box` (`lower`, `upper`) and `affine`
//! (`matrix` as a list of rows, `rhs`). Numbers are written as shortest round-trip decimals, so
//! saving and loading reproduces every value exactly.
//!
//! A run written to `run.csv` produces three files:
//!
//! * `run.csv` with header `iter,step_norm,residual,fejer_distance`, one row per iterate
//!   `k = 0..K`. `step_norm` on row `k` is `|x^k - x^{k-1}|` and is empty on row 0;
//!   `fejer_distance` is empty when the run had no reference point.
//! * `run.iterates.csv` with header `iter,x1,..,xn`, one row per stored iterate.
//! * `run.meta.json` with the algorithm, plan, weights, seed, stop reason and stopping settings.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algorithms::{RunRecord, StopReason};
use crate::error::{Error, Result};
use crate::geometry::{ConvexSet, FeasibilityProblem, Point};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    dim: usize,
    sets: Vec<SetEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    interior_point: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    slack: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum SetEntry {
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
    },
    Hyperplane {
        normal: Vec<f64>,
        offset: f64,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Affine {
        matrix: Vec<Vec<f64>>,
        rhs: Vec<f64>,
    },
}

impl SetEntry {
    fn from_set(set: &ConvexSet) -> Self {
        match set {
            ConvexSet::Halfspace(h) => SetEntry::Halfspace {
                normal: h.normal().to_vec(),
                offset: h.offset(),
            },
            ConvexSet::Hyperplane(h) => SetEntry::Hyperplane {
                normal: h.normal().to_vec(),
                offset: h.offset(),
            },
            ConvexSet::Ball(b) => SetEntry::Ball {
                center: b.center().to_vec(),
                radius: b.radius(),
            },
            ConvexSet::Box(b) => SetEntry::Box {
                lower: b.lower().to_vec(),
                upper: b.upper().to_vec(),
            },
            ConvexSet::Affine(a) => SetEntry::Affine {
                matrix: a.matrix().to_vec(),
                rhs: a.rhs().to_vec(),
            },
        }
    }

    fn into_set(self, dim: usize) -> Result<ConvexSet> {
        let set = match self {
            SetEntry::Halfspace { normal, offset } => ConvexSet::halfspace(normal, offset)?,
            SetEntry::Hyperplane { normal, offset } => ConvexSet::hyperplane(normal, offset)?,
            SetEntry::Ball { center, radius } => ConvexSet::ball(center, radius)?,
            SetEntry::Box { lower, upper } => ConvexSet::boxed(lower, upper)?,
            SetEntry::Affine { matrix, rhs } => ConvexSet::affine(dim, matrix, rhs)?,
        };
        if set.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: set.dim(),
            });
        }
        Ok(set)
    }
}

pub fn problem_to_json(problem: &FeasibilityProblem) -> String {
    let file = ProblemFile {
        dim: problem.dim(),
        sets: problem.sets().iter().map(SetEntry::from_set).collect(),
        interior_point: problem.interior_point().map(|p| p.as_slice().to_vec()),
        slack: problem.slack(),
    };
    serde_json::to_string_pretty(&file).expect("problem serialization cannot fail")
}

pub fn problem_from_json(text: &str) -> Result<FeasibilityProblem> {
    let file: ProblemFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("problem file: {e}")))?;
    if file.dim == 0 {
        return Err(Error::Parse(
            "problem file: field `dim` must be positive".into(),
        ));
    }
    let sets = file
        .sets
        .into_iter()
        .enumerate()
        .map(|(i, entry)| {
            entry
                .into_set(file.dim)
                .map_err(|e| Error::Parse(format!("problem file: field `sets[{i}]`: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let interior_point = file
        .interior_point
        .map(Point::new)
        .transpose()
        .map_err(|e| Error::Parse(format!("problem file: field `interior_point`: {e}")))?;
    FeasibilityProblem::new(sets, interior_point, file.slack)
        .map_err(|e| Error::Parse(format!("problem file: {e}")))
}

pub fn load_problem(path: impl AsRef<Path>) -> Result<FeasibilityProblem> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("reading {}: {e}", path.display())))?;
    problem_from_json(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn save_problem(problem: &FeasibilityProblem, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, problem_to_json(problem) + "\n")
        .map_err(|e| Error::Io(format!("writing {}: {e}", path.display())))
}

/// Sidecar metadata describing how a run was produced.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub algorithm: String,
    #[serde(default)]
    pub problem: Option<String>,
    #[serde(default)]
    pub plan: Option<String>,
    #[serde(default)]
    pub weights: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    pub stop_reason: String,
    pub iterations: usize,
    pub dim: usize,
    pub trace_stride: usize,
    pub sweep_length: usize,
    #[serde(default)]
    pub reference_point: Option<Vec<f64>>,
    #[serde(default)]
    pub residual_tol: Option<f64>,
    #[serde(default)]
    pub step_tol: Option<f64>,
    #[serde(default)]
    pub max_iters: Option<usize>,
}

impl RunMetadata {
    /// Fills in the fields that come from the record itself.
    pub fn for_record(rec: &RunRecord) -> Self {
        Self {
            algorithm: rec.algorithm.clone(),
            stop_reason: rec.stop_reason.to_string(),
            iterations: rec.iterations,
            dim: rec.initial_iterate().dim(),
            trace_stride: rec.trace_stride,
            sweep_length: rec.sweep_length,
            reference_point: rec.reference_point.as_ref().map(|p| p.as_slice().to_vec()),
            ..Default::default()
        }
    }
}

/// Paths of the sidecars written next to a trace file.
pub fn sidecar_paths(path: &Path) -> (PathBuf, PathBuf) {
    (
        path.with_extension("iterates.csv"),
        path.with_extension("meta.json"),
    )
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// The trace CSV as a string (the content of the main output file).
pub fn run_to_csv(rec: &RunRecord) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["iter", "step_norm", "residual", "fejer_distance"])
        .expect("in-memory write");
    for k in 0..=rec.iterations {
        let step = if k == 0 {
            String::new()
        } else {
            fmt_f64(rec.step_norms[k - 1])
        };
        let fejer = rec
            .fejer_distances
            .get(k)
            .map(|d| fmt_f64(*d))
            .unwrap_or_default();
        w.write_record([k.to_string(), step, fmt_f64(rec.residuals[k]), fejer])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

fn iterates_to_csv(rec: &RunRecord) -> String {
    let dim = rec.initial_iterate().dim();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["iter".to_string()];
    header.extend((1..=dim).map(|j| format!("x{j}")));
    w.write_record(&header).expect("in-memory write");
    for (k, x) in rec.iterate_indices.iter().zip(&rec.iterates) {
        let mut row = vec![k.to_string()];
        row.extend(x.as_slice().iter().map(|v| fmt_f64(*v)));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

/// Writes the trace CSV at `path` plus the iterate and metadata sidecars.
pub fn save_run(rec: &RunRecord, meta: &RunMetadata, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let (iter_path, meta_path) = sidecar_paths(path);
    let write = |p: &Path, body: String| {
        let mut f =
            fs::File::create(p).map_err(|e| Error::Io(format!("creating {}: {e}", p.display())))?;
        f.write_all(body.as_bytes())
            .map_err(|e| Error::Io(format!("writing {}: {e}", p.display())))
    };
    write(path, run_to_csv(rec))?;
    write(&iter_path, iterates_to_csv(rec))?;
    let meta_json = serde_json::to_string_pretty(meta).expect("metadata serialization") + "\n";
    write(&meta_path, meta_json)
}

fn parse_cell(path: &Path, line: u64, column: &str, text: &str) -> Result<Option<f64>> {
    if text.is_empty() {
        return Ok(None);
    }
    text.parse::<f64>().map(Some).map_err(|_| {
        Error::Parse(format!(
            "{}: line {line}: field `{column}`: `{text}` is not a number",
            path.display()
        ))
    })
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::Parse(format!("{}: {e}", path.display()))
}

/// Reads a run written by [`save_run`] back into a record, together with its metadata.
pub fn load_run(path: impl AsRef<Path>) -> Result<(RunRecord, RunMetadata)> {
    let path = path.as_ref();
    let (iter_path, meta_path) = sidecar_paths(path);

    let meta_text = fs::read_to_string(&meta_path)
        .map_err(|e| Error::Io(format!("reading {}: {e}", meta_path.display())))?;
    let meta: RunMetadata = serde_json::from_str(&meta_text)
        .map_err(|e| Error::Parse(format!("{}: {e}", meta_path.display())))?;
    let stop_reason: StopReason = meta.stop_reason.parse()?;

    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let expected = ["iter", "step_norm", "residual", "fejer_distance"];
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Parse(format!(
            "{}: header must be `{}`",
            path.display(),
            expected.join(",")
        )));
    }
    let mut step_norms = Vec::new();
    let mut residuals = Vec::new();
    let mut fejer_distances = Vec::new();
    for (row, result) in reader.records().enumerate() {
        let record = result.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(row as u64 + 2, |p| p.line());
        let k: usize = record[0].parse().map_err(|_| {
            Error::Parse(format!(
                "{}: line {line}: field `iter` is not an integer",
                path.display()
            ))
        })?;
        if k != row {
            return Err(Error::Parse(format!(
                "{}: line {line}: expected iter {row}, found {k}",
                path.display()
            )));
        }
        if let Some(s) = parse_cell(path, line, "step_norm", &record[1])? {
            step_norms.push(s);
        } else if k > 0 {
            return Err(Error::Parse(format!(
                "{}: line {line}: field `step_norm` is empty",
                path.display()
            )));
        }
        residuals.push(
            parse_cell(path, line, "residual", &record[2])?.ok_or_else(|| {
                Error::Parse(format!(
                    "{}: line {line}: field `residual` is empty",
                    path.display()
                ))
            })?,
        );
        if let Some(d) = parse_cell(path, line, "fejer_distance", &record[3])? {
            fejer_distances.push(d);
        }
    }

    let mut reader = csv::Reader::from_path(&iter_path).map_err(|e| csv_error(&iter_path, e))?;
    let mut iterates = Vec::new();
    let mut iterate_indices = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| csv_error(&iter_path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let k: usize = record[0].parse().map_err(|_| {
            Error::Parse(format!(
                "{}: line {line}: field `iter` is not an integer",
                iter_path.display()
            ))
        })?;
        let coords = record
            .iter()
            .skip(1)
            .enumerate()
            .map(|(j, v)| {
                parse_cell(&iter_path, line, &format!("x{}", j + 1), v)?.ok_or_else(|| {
                    Error::Parse(format!(
                        "{}: line {line}: empty coordinate",
                        iter_path.display()
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        iterate_indices.push(k);
        iterates.push(Point::new(coords)?);
    }

    if residuals.len() != meta.iterations + 1 || step_norms.len() != meta.iterations {
        return Err(Error::Parse(format!(
            "{}: {} rows but metadata records {} iterations",
            path.display(),
            residuals.len(),
            meta.iterations
        )));
    }
    if iterates.is_empty() || iterate_indices[0] != 0 {
        return Err(Error::Parse(format!(
            "{}: the initial iterate is missing",
            iter_path.display()
        )));
    }
    let reference_point = meta.reference_point.clone().map(Point::new).transpose()?;
    let rec = RunRecord {
        algorithm: meta.algorithm.clone(),
        iterations: meta.iterations,
        stop_reason,
        trace_stride: meta.trace_stride,
        iterates,
        iterate_indices,
        step_norms,
        residuals,
        fejer_distances,
        reference_point,
        sweep_length: meta.sweep_length,
    };
    Ok((rec, meta))
}
