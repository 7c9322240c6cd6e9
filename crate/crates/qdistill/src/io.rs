//! `.qstate.json` files: a bipartite operator as `{"dims":[dA,dB],"matrix":[[[re,im],...],...]}`.
//!
//! Rows are written with the shortest round-tripping float representation and
//! parsed with correct rounding, so finite matrices survive save/load bit for bit.
//! Map exports add `"jamiolkowski_scale": s`, meaning the stored matrix is
//! `s (1 ⊗ Λ) P₊`.

use std::fs;
use std::path::{Path, PathBuf};

use qdistill_core::linalg::{CMatrix, C64};
use qdistill_core::BipartiteOperator;
use serde::{Deserialize, Serialize};

pub const EXTENSION: &str = ".qstate.json";

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{origin}: parse error at line {line}, column {column}: {message}")]
    Parse { origin: String, line: usize, column: usize, message: String },
    #[error("{origin}: field `{field}`: {message}")]
    Field { origin: String, field: String, message: String },
    #[error("{origin}: {source}")]
    Invalid { origin: String, source: qdistill_core::Error },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Repr {
    dims: [usize; 2],
    matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    jamiolkowski_scale: Option<f64>,
}

/// Contents of a state or map file.
#[derive(Debug, Clone, PartialEq)]
pub struct StateFile {
    pub op: BipartiteOperator,
    pub jamiolkowski_scale: Option<f64>,
}

impl StateFile {
    pub fn state(op: BipartiteOperator) -> Self {
        Self { op, jamiolkowski_scale: None }
    }

    pub fn to_json(&self) -> Result<String, FileError> {
        let m = self.op.matrix();
        let field = |message: String| FileError::Field { origin: "<output>".into(), field: "matrix".into(), message };
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(field("non-finite entry".into()));
        }
        let mut out = format!("{{\n  \"dims\": [{}, {}],\n", self.op.dim_a(), self.op.dim_b());
        if let Some(s) = self.jamiolkowski_scale {
            out.push_str(&format!(
                "  \"jamiolkowski_scale\": {},\n",
                serde_json::to_string(&s).map_err(|e| field(e.to_string()))?
            ));
        }
        out.push_str("  \"matrix\": [\n");
        for r in 0..m.nrows() {
            let row: Vec<[f64; 2]> = (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect();
            let sep = if r + 1 == m.nrows() { "" } else { "," };
            out.push_str(&format!("    {}{}\n", serde_json::to_string(&row).map_err(|e| field(e.to_string()))?, sep));
        }
        out.push_str("  ]\n}\n");
        Ok(out)
    }

    /// Parses file contents; `origin` names the source in error messages.
    pub fn from_json(text: &str, origin: &str) -> Result<Self, FileError> {
        let repr: Repr = serde_json::from_str(text).map_err(|e| FileError::Parse {
            origin: origin.into(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let field = |field: String, message: String| FileError::Field { origin: origin.into(), field, message };
        let [da, db] = repr.dims;
        if da == 0 || db == 0 {
            return Err(field("dims".into(), format!("dimensions must be positive, got [{da}, {db}]")));
        }
        let n = da * db;
        if repr.matrix.len() != n {
            return Err(field(
                "matrix".into(),
                format!("expected {n} rows for dims [{da}, {db}], found {}", repr.matrix.len()),
            ));
        }
        for (r, row) in repr.matrix.iter().enumerate() {
            if row.len() != n {
                return Err(field(format!("matrix[{r}]"), format!("expected {n} entries, found {}", row.len())));
            }
        }
        if let Some(s) = repr.jamiolkowski_scale {
            if !(s.is_finite() && s > 0.0) {
                return Err(field("jamiolkowski_scale".into(), format!("must be positive, got {s}")));
            }
        }
        let mat = CMatrix::from_fn(n, n, |r, c| {
            let [re, im] = repr.matrix[r][c];
            C64::new(re, im)
        });
        let op = BipartiteOperator::new(da, db, mat)
            .map_err(|source| FileError::Invalid { origin: origin.into(), source })?;
        Ok(Self { op, jamiolkowski_scale: repr.jamiolkowski_scale })
    }

    pub fn load(path: &Path) -> Result<Self, FileError> {
        let text = fs::read_to_string(path).map_err(|source| FileError::Io { path: path.into(), source })?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn save(&self, path: &Path) -> Result<(), FileError> {
        let text = self.to_json()?;
        fs::write(path, text).map_err(|source| FileError::Io { path: path.into(), source })
    }
}

pub fn save_state(path: &Path, op: &BipartiteOperator) -> Result<(), FileError> {
    StateFile::state(op.clone()).save(path)
}

pub fn load_state(path: &Path) -> Result<BipartiteOperator, FileError> {
    Ok(StateFile::load(path)?.op)
}

/// Writes a Jamiołkowski operator `D = d (1 ⊗ Λ) P₊` tagged with scale `d`.
pub fn save_map(path: &Path, choi: &BipartiteOperator) -> Result<(), FileError> {
    StateFile { op: choi.clone(), jamiolkowski_scale: Some(choi.dim_a() as f64) }.save(path)
}
