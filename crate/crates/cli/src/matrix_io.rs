//! Localized matrices on disk: little-endian row-major complex entries in a binary
//! file plus a JSON sidecar `<file>.json` with shape, dtype and index sets.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use homframe::schur::LocalizedMatrix;
use homframe::{c64, PointSet};
use serde::{Deserialize, Serialize};

use crate::config::{group_spec, GroupConfig, NormConfig};
use crate::error::CliError;
use crate::output::write_atomic;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dtype {
    /// Two `f32` per entry.
    Complex64,
    /// Two `f64` per entry.
    Complex128,
}

impl Dtype {
    fn entry_bytes(self) -> usize {
        match self {
            Dtype::Complex64 => 8,
            Dtype::Complex128 => 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSidecar {
    pub dtype: Dtype,
    /// Always `little`.
    pub byte_order: String,
    /// Always `row-major`.
    pub layout: String,
    pub shape: [usize; 2],
    pub group: GroupConfig,
    #[serde(default)]
    pub norm: NormConfig,
    /// Group coordinates of the row and column indices, in matrix order.
    pub rows: Vec<Vec<f64>>,
    pub cols: Vec<Vec<f64>>,
}

pub fn sidecar_path(bin: &Path) -> PathBuf {
    let mut s = bin.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn coords(ps: &PointSet) -> Vec<Vec<f64>> {
    ps.points().iter().map(|p| p.coords().to_vec()).collect()
}

pub fn write_matrix(bin: &Path, m: &LocalizedMatrix, group: &GroupConfig, norm: NormConfig, dtype: Dtype) -> std::io::Result<()> {
    let e = m.entries();
    let (r, c) = (e.nrows(), e.ncols());
    let mut bytes = Vec::with_capacity(r * c * dtype.entry_bytes());
    for i in 0..r {
        for j in 0..c {
            let z = e[(i, j)];
            match dtype {
                Dtype::Complex64 => {
                    bytes.extend_from_slice(&(z.re as f32).to_le_bytes());
                    bytes.extend_from_slice(&(z.im as f32).to_le_bytes());
                }
                Dtype::Complex128 => {
                    bytes.extend_from_slice(&z.re.to_le_bytes());
                    bytes.extend_from_slice(&z.im.to_le_bytes());
                }
            }
        }
    }
    let side = MatrixSidecar {
        dtype,
        byte_order: "little".into(),
        layout: "row-major".into(),
        shape: [r, c],
        group: group.clone(),
        norm,
        rows: coords(m.rows()),
        cols: coords(m.cols()),
    };
    write_atomic(bin, &bytes)?;
    let mut json = serde_json::to_vec_pretty(&side).map_err(std::io::Error::other)?;
    json.push(b'\n');
    write_atomic(&sidecar_path(bin), &json)
}

fn bad(path: &Path, message: impl std::fmt::Display) -> CliError {
    CliError::config(format!("{}: {message}", path.display()))
}

/// Index set in library order plus, for each library position, the file position.
fn index_set(path: &Path, spec: &Arc<homframe::GroupSpec>, norm: &NormConfig, pts: &[Vec<f64>]) -> Result<(PointSet, Vec<usize>), CliError> {
    let hn = match *norm {
        NormConfig::WeightedMax => homframe::HomogeneousNorm::WeightedMax,
        NormConfig::WeightedSum { p } => homframe::HomogeneousNorm::weighted_sum(p).map_err(|e| bad(path, e))?,
    };
    let reach = pts.iter().map(|p| if p.len() == spec.dim() { hn.eval(spec, p) } else { 0.0 }).fold(0.0, f64::max);
    let ps = PointSet::explicit(spec.clone(), hn, pts.to_vec(), 2.0 * reach + 1.0).map_err(|e| bad(path, e))?;
    if ps.len() != pts.len() {
        return Err(bad(path, "index points must be distinct"));
    }
    let key = |c: &[f64]| c.iter().map(|v| v.to_bits()).collect::<Vec<u64>>();
    let pos: HashMap<Vec<u64>, usize> = pts.iter().enumerate().map(|(i, p)| (key(p), i)).collect();
    let order = ps.points().iter().map(|p| pos[&key(p.coords())]).collect();
    Ok((ps, order))
}

pub fn read_matrix(bin: &Path) -> Result<LocalizedMatrix, CliError> {
    let side_path = sidecar_path(bin);
    let text = std::fs::read_to_string(&side_path).map_err(|e| bad(&side_path, e))?;
    let side: MatrixSidecar = serde_json::from_str(&text).map_err(|e| CliError::Config {
        message: format!("{}: {e}", side_path.display()),
        line: Some(e.line()),
        column: Some(e.column()),
    })?;
    if side.byte_order != "little" || side.layout != "row-major" {
        return Err(bad(&side_path, "only little-endian row-major matrices are supported"));
    }
    let [r, c] = side.shape;
    if side.rows.len() != r || side.cols.len() != c {
        return Err(bad(&side_path, "index sets do not match the shape"));
    }
    let bytes = std::fs::read(bin).map_err(|e| bad(bin, e))?;
    let eb = side.dtype.entry_bytes();
    if bytes.len() != r * c * eb {
        return Err(bad(bin, format!("expected {} bytes, found {}", r * c * eb, bytes.len())));
    }
    let spec = Arc::new(group_spec(&side.group)?);
    let (rows, row_order) = index_set(&side_path, &spec, &side.norm, &side.rows)?;
    let (cols, col_order) = index_set(&side_path, &spec, &side.norm, &side.cols)?;
    let at = |i: usize, j: usize| {
        let o = (i * c + j) * eb;
        match side.dtype {
            Dtype::Complex64 => {
                let f = |k: usize| f32::from_le_bytes(bytes[o + k..o + k + 4].try_into().unwrap()) as f64;
                c64::new(f(0), f(4))
            }
            Dtype::Complex128 => {
                let f = |k: usize| f64::from_le_bytes(bytes[o + k..o + k + 8].try_into().unwrap());
                c64::new(f(0), f(8))
            }
        }
    };
    let m = faer::Mat::from_fn(r, c, |i, j| at(row_order[i], col_order[j]));
    if m.col_iter().any(|col| col.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
        return Err(bad(bin, "matrix entries must be finite"));
    }
    Ok(LocalizedMatrix::new(rows, cols, m)?)
}
