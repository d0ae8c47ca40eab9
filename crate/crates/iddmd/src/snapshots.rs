//! Multi-experiment snapshot data: ingestion, validation, parameter
//! scaling, and shifted pair-matrix assembly.
//!
//! A snapshot set holds one record per experiment. Each record pairs a
//! design-parameter vector with an `m x n_l` state matrix whose columns are
//! ordered by time. Records may have unequal lengths, but must agree on the
//! state dimension and the number of parameters.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Magic bytes of the binary snapshot format.
pub const BINARY_MAGIC: &[u8; 4] = b"IDMD";
/// Version written into binary snapshot files.
pub const BINARY_VERSION: u32 = 1;

/// One experiment: parameter values plus the time series they produced.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotRecord {
    /// Design-parameter values for this experiment.
    pub params: Vec<f64>,
    /// States, `m x n_l`, column `j` is the snapshot at step `j`.
    pub states: Array2<f64>,
}

impl SnapshotRecord {
    /// Slice of the record over `[start, end)` time steps.
    pub fn window(&self, start: usize, end: usize) -> SnapshotRecord {
        SnapshotRecord {
            params: self.params.clone(),
            states: self.states.slice(ndarray::s![.., start..end]).to_owned(),
        }
    }
}

/// Optional spatial layout for field data that was flattened into states.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridMeta {
    pub dims: Vec<usize>,
}

/// A validated collection of experiment records sharing `m`, `dt`, and `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSet {
    pub records: Vec<SnapshotRecord>,
    /// Sampling time in seconds.
    pub dt: f64,
    pub param_names: Vec<String>,
    pub grid: Option<GridMeta>,
}

impl SnapshotSet {
    /// Builds and validates a snapshot set.
    pub fn new(
        records: Vec<SnapshotRecord>,
        dt: f64,
        param_names: Vec<String>,
        grid: Option<GridMeta>,
    ) -> Result<Self> {
        let set = SnapshotSet { records, dt, param_names, grid };
        set.validate()?;
        Ok(set)
    }

    /// State dimension `m`.
    pub fn state_dim(&self) -> usize {
        self.records.first().map_or(0, |r| r.states.nrows())
    }

    /// Number of design parameters `P`.
    pub fn param_dim(&self) -> usize {
        self.records.first().map_or(0, |r| r.params.len())
    }

    pub fn validate(&self) -> Result<()> {
        if self.records.is_empty() {
            return Err(Error::InvalidArgument("snapshot set has no records".into()));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "sampling time must be positive and finite, got {}",
                self.dt
            )));
        }
        let m = self.state_dim();
        let p = self.param_dim();
        if !self.param_names.is_empty() && self.param_names.len() != p {
            return Err(Error::InvalidArgument(format!(
                "{} parameter names for {} parameters",
                self.param_names.len(),
                p
            )));
        }
        for (idx, rec) in self.records.iter().enumerate() {
            if rec.states.nrows() != m {
                return Err(Error::Record {
                    record: idx,
                    detail: format!("state dimension {} differs from {}", rec.states.nrows(), m),
                });
            }
            if rec.params.len() != p {
                return Err(Error::Record {
                    record: idx,
                    detail: format!("{} parameters, expected {}", rec.params.len(), p),
                });
            }
            if rec.states.ncols() < 2 {
                return Err(Error::Record {
                    record: idx,
                    detail: format!("needs at least 2 snapshots, got {}", rec.states.ncols()),
                });
            }
            for (&v, i) in rec.params.iter().zip(0..) {
                if !v.is_finite() {
                    return Err(Error::Record {
                        record: idx,
                        detail: format!("parameter {i} is not finite"),
                    });
                }
            }
            for ((row, col), &v) in rec.states.indexed_iter() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { record: idx, row, col });
                }
            }
        }
        Ok(())
    }
}

/// Per-parameter scaling factors used to condition the regression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFactors {
    alpha: Vec<f64>,
}

impl ScalingFactors {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        for (&a, i) in alpha.iter().zip(0..) {
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "scaling factor {i} must be positive and finite, got {a}"
                )));
            }
        }
        Ok(ScalingFactors { alpha })
    }

    /// All-ones scaling for `p` parameters.
    pub fn identity(p: usize) -> Self {
        ScalingFactors { alpha: vec![1.0; p] }
    }

    /// Default scaling `alpha_i = 1 / max_l |eps_i|` over the training
    /// records, so each scaled parameter has magnitude at most one.
    /// Parameters that are identically zero keep a factor of one.
    pub fn from_training(set: &SnapshotSet) -> Self {
        let p = set.param_dim();
        let mut alpha = vec![1.0; p];
        for (i, a) in alpha.iter_mut().enumerate() {
            let max = set
                .records
                .iter()
                .map(|r| r.params[i].abs())
                .fold(0.0, f64::max);
            if max > 0.0 {
                *a = 1.0 / max;
            }
        }
        ScalingFactors { alpha }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// Componentwise scaled parameters.
    pub fn scale(&self, params: &[f64]) -> Result<Vec<f64>> {
        if params.len() != self.alpha.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} parameters, {} scaling factors",
                params.len(),
                self.alpha.len()
            )));
        }
        Ok(params.iter().zip(&self.alpha).map(|(e, a)| e * a).collect())
    }

    /// Inverse of [`scale`](Self::scale).
    pub fn unscale(&self, scaled: &[f64]) -> Result<Vec<f64>> {
        if scaled.len() != self.alpha.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} parameters, {} scaling factors",
                scaled.len(),
                self.alpha.len()
            )));
        }
        Ok(scaled.iter().zip(&self.alpha).map(|(e, a)| e / a).collect())
    }
}

/// Time-shifted data matrices for one record.
#[derive(Debug, Clone)]
pub struct PairMatrices {
    /// States at steps `1..n_l-1`, one step after `x`.
    pub x_prime: Array2<f64>,
    /// States at steps `0..n_l-2`.
    pub x: Array2<f64>,
    /// Scaled design parameters of the record.
    pub params_scaled: Vec<f64>,
}

/// Forms `(X, X')` per record: `X` drops the last column, `X'` the first.
pub fn assemble_shifted_pairs(
    set: &SnapshotSet,
    alpha: &ScalingFactors,
) -> Result<Vec<PairMatrices>> {
    set.validate()?;
    set.records
        .iter()
        .map(|rec| {
            let n = rec.states.ncols();
            Ok(PairMatrices {
                x_prime: rec.states.slice(ndarray::s![.., 1..n]).to_owned(),
                x: rec.states.slice(ndarray::s![.., ..n - 1]).to_owned(),
                params_scaled: alpha.scale(&rec.params)?,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Manifest + data file formats
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct ManifestRecord {
    params: Vec<f64>,
    data: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    dt: f64,
    param_names: Vec<String>,
    records: Vec<ManifestRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<GridMeta>,
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), source }
}

/// Loads a snapshot set from a JSON manifest referencing per-record data
/// files (CSV for `.csv` paths, the binary format otherwise).
pub fn load_snapshot_set(manifest_path: &Path) -> Result<SnapshotSet> {
    let text = fs::read_to_string(manifest_path).map_err(|e| io_err(manifest_path, e))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| Error::Manifest {
        path: manifest_path.display().to_string(),
        detail: e.to_string(),
    })?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let mut records = Vec::with_capacity(manifest.records.len());
    for (idx, mr) in manifest.records.iter().enumerate() {
        let data_path = base.join(&mr.data);
        let states = read_data_file(&data_path)
            .map_err(|e| Error::Record { record: idx, detail: e.to_string() })?;
        records.push(SnapshotRecord { params: mr.params.clone(), states });
    }
    SnapshotSet::new(records, manifest.dt, manifest.param_names, manifest.grid)
}

/// Writes a snapshot set as `manifest.json` plus one data file per record
/// under `dir`. Returns the manifest path.
pub fn save_snapshot_set(set: &SnapshotSet, dir: &Path, format: DataFormat) -> Result<PathBuf> {
    set.validate()?;
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let ext = match format {
        DataFormat::Csv => "csv",
        DataFormat::Binary => "bin",
    };
    let mut manifest = Manifest {
        dt: set.dt,
        param_names: set.param_names.clone(),
        records: Vec::new(),
        grid: set.grid.clone(),
    };
    for (idx, rec) in set.records.iter().enumerate() {
        let name = format!("record_{idx:03}.{ext}");
        let path = dir.join(&name);
        match format {
            DataFormat::Csv => write_csv(&path, &rec.states)?,
            DataFormat::Binary => write_binary(&path, &rec.states)?,
        }
        manifest.records.push(ManifestRecord { params: rec.params.clone(), data: name });
    }
    let manifest_path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&manifest_path, text).map_err(|e| io_err(&manifest_path, e))?;
    Ok(manifest_path)
}

/// On-disk layout of record data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Csv,
    Binary,
}

/// Reads one data file, dispatching on the `.csv` extension.
pub fn read_data_file(path: &Path) -> Result<Array2<f64>> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        read_csv(path)
    } else {
        read_binary(path)
    }
}

/// Writes one data file, dispatching on the `.csv` extension.
pub fn write_data_file(path: &Path, states: &Array2<f64>) -> Result<()> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        write_csv(path, states)
    } else {
        write_binary(path, states)
    }
}

fn read_csv(path: &Path) -> Result<Array2<f64>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|f| f.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| Error::DataFormat {
            path: path.display().to_string(),
            detail: format!("line {}: {e}", lineno + 1),
        })?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::DataFormat {
                    path: path.display().to_string(),
                    detail: format!(
                        "line {}: {} columns, expected {}",
                        lineno + 1,
                        row.len(),
                        first.len()
                    ),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::DataFormat {
            path: path.display().to_string(),
            detail: "empty file".into(),
        });
    }
    let (m, n) = (rows.len(), rows[0].len());
    let mut a = Array2::zeros((m, n));
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            a[(i, j)] = v;
        }
    }
    Ok(a)
}

fn write_csv(path: &Path, states: &Array2<f64>) -> Result<()> {
    let mut out = String::new();
    for row in states.rows() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

fn read_binary(path: &Path) -> Result<Array2<f64>> {
    let mut file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes).map_err(|e| io_err(path, e))?;
    let fmt_err = |detail: &str| Error::DataFormat {
        path: path.display().to_string(),
        detail: detail.to_string(),
    };
    if bytes.len() < 24 {
        return Err(fmt_err("truncated header"));
    }
    if &bytes[..4] != BINARY_MAGIC {
        return Err(fmt_err("bad magic, expected IDMD"));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != BINARY_VERSION {
        return Err(fmt_err(&format!("unsupported version {version}")));
    }
    let rows = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let cols = u64::from_le_bytes(bytes[16..24].try_into().unwrap()) as usize;
    let expected = 24 + rows * cols * 8;
    if bytes.len() != expected {
        return Err(fmt_err(&format!(
            "payload is {} bytes, expected {expected} for {rows}x{cols}",
            bytes.len()
        )));
    }
    let mut a = Array2::zeros((rows, cols));
    let mut off = 24;
    // Column-major payload.
    for j in 0..cols {
        for i in 0..rows {
            a[(i, j)] = f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
            off += 8;
        }
    }
    Ok(a)
}

fn write_binary(path: &Path, states: &Array2<f64>) -> Result<()> {
    let (rows, cols) = states.dim();
    let mut bytes = Vec::with_capacity(24 + rows * cols * 8);
    bytes.extend_from_slice(BINARY_MAGIC);
    bytes.extend_from_slice(&BINARY_VERSION.to_le_bytes());
    bytes.extend_from_slice(&(rows as u64).to_le_bytes());
    bytes.extend_from_slice(&(cols as u64).to_le_bytes());
    for col in states.columns() {
        for &v in col.iter() {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    let mut file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    file.write_all(&bytes).map_err(|e| io_err(path, e))
}
