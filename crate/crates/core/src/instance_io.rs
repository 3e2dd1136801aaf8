//! Replayable instance files.
//!
//! An instance file is UTF-8 text: a magic header line `ABS-INSTANCE 1`
//! followed by a JSON object with the fields
//!
//! | field       | content                                            |
//! |-------------|----------------------------------------------------|
//! | `seed`      | instance seed (u64)                                 |
//! | `delta`     | grid coordinate delta                               |
//! | `rho`       | grid coordinate rho                                 |
//! | `omega`     | analysis operator `{rows, cols, data}`, row-major   |
//! | `m_mat`     | measurement matrix `{rows, cols, data}`, row-major  |
//! | `x`         | ground-truth signal                                 |
//! | `y`         | measurements                                        |
//! | `cosupport` | sorted cosupport indices                            |
//!
//! Floats are written in shortest round-trip form and parsed back exactly, so
//! a replayed instance is bit-identical to the generated one. The operator's
//! pseudo-inverse and nullspace basis are recomputed on load.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AnalysisOperator, Cosupport, CosparseInstance, RngSeed};
use crate::numerics::{Matrix, Vector};

pub const INSTANCE_MAGIC: &str = "ABS-INSTANCE";
pub const INSTANCE_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct MatrixRecord {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl MatrixRecord {
    fn from_matrix(m: &Matrix) -> Self {
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data: m.transpose().as_slice().to_vec(),
        }
    }

    fn into_matrix(self, name: &str) -> std::result::Result<Matrix, String> {
        if self.data.len() != self.rows * self.cols {
            return Err(format!(
                "{name}: {} entries for a {}x{} matrix",
                self.data.len(),
                self.rows,
                self.cols
            ));
        }
        if !self.data.iter().all(|v| v.is_finite()) {
            return Err(format!("{name}: non-finite entry"));
        }
        Ok(Matrix::from_row_slice(self.rows, self.cols, &self.data))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct InstanceRecord {
    seed: RngSeed,
    delta: f64,
    rho: f64,
    omega: MatrixRecord,
    m_mat: MatrixRecord,
    x: Vec<f64>,
    y: Vec<f64>,
    cosupport: Vec<usize>,
}

pub fn encode_instance(op: &AnalysisOperator, inst: &CosparseInstance) -> String {
    let record = InstanceRecord {
        seed: inst.seed,
        delta: inst.delta,
        rho: inst.rho,
        omega: MatrixRecord::from_matrix(op.omega()),
        m_mat: MatrixRecord::from_matrix(&inst.m_mat),
        x: inst.x.as_slice().to_vec(),
        y: inst.y.as_slice().to_vec(),
        cosupport: inst.cosupport.indices().to_vec(),
    };
    let body = serde_json::to_string_pretty(&record).expect("instance record serializes");
    format!("{INSTANCE_MAGIC} {INSTANCE_VERSION}\n{body}\n")
}

pub fn decode_instance(text: &str) -> std::result::Result<(AnalysisOperator, CosparseInstance), String> {
    let (header, body) = text.split_once('\n').ok_or("missing header line")?;
    let mut parts = header.trim_end().split(' ');
    if parts.next() != Some(INSTANCE_MAGIC) {
        return Err(format!("bad magic header `{header}`"));
    }
    let version: u32 = parts
        .next()
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| format!("bad version in header `{header}`"))?;
    if version != INSTANCE_VERSION {
        return Err(format!("unsupported instance version {version}"));
    }
    let record: InstanceRecord = serde_json::from_str(body).map_err(|e| e.to_string())?;
    let omega = record.omega.into_matrix("omega")?;
    let m_mat = record.m_mat.into_matrix("m_mat")?;
    let (n_rows, dim) = omega.shape();
    if m_mat.ncols() != dim || record.x.len() != dim || record.y.len() != m_mat.nrows() {
        return Err("inconsistent dimensions".into());
    }
    let op = AnalysisOperator::new(omega).map_err(|e| e.to_string())?;
    let cosupport = Cosupport::new(record.cosupport, n_rows).map_err(|e| e.to_string())?;
    let inst = CosparseInstance {
        x: Vector::from_vec(record.x),
        cosupport,
        m_mat,
        y: Vector::from_vec(record.y),
        delta: record.delta,
        rho: record.rho,
        seed: record.seed,
    };
    Ok((op, inst))
}

pub fn write_instance(path: &Path, op: &AnalysisOperator, inst: &CosparseInstance) -> Result<()> {
    fs::write(path, encode_instance(op, inst)).map_err(|e| Error::io(path, e))
}

pub fn read_instance(path: &Path) -> Result<(AnalysisOperator, CosparseInstance)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    decode_instance(&text).map_err(|reason| Error::format(path, reason))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_tight_frame, make_instance};

    #[test]
    fn round_trip_is_bit_exact() {
        let op = generate_tight_frame(12, 10, RngSeed(3)).unwrap();
        let inst = make_instance(&op, 0.6, 0.5, RngSeed(4)).unwrap();
        let text = encode_instance(&op, &inst);
        assert!(text.starts_with("ABS-INSTANCE 1\n"));
        let (op2, inst2) = decode_instance(&text).unwrap();
        assert_eq!(op2.omega(), op.omega());
        assert_eq!(inst2, inst);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.abs");
        let op = generate_tight_frame(8, 6, RngSeed(1)).unwrap();
        let inst = make_instance(&op, 0.5, 0.5, RngSeed(2)).unwrap();
        write_instance(&path, &op, &inst).unwrap();
        let (_, back) = read_instance(&path).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn rejects_bad_header_and_version() {
        let op = generate_tight_frame(4, 3, RngSeed(1)).unwrap();
        let inst = make_instance(&op, 1.0, 0.5, RngSeed(2)).unwrap();
        let text = encode_instance(&op, &inst);
        assert!(decode_instance(&text.replacen("ABS-INSTANCE", "NOPE", 1)).is_err());
        assert!(decode_instance(&text.replacen("ABS-INSTANCE 1", "ABS-INSTANCE 9", 1)).is_err());
        assert!(decode_instance("ABS-INSTANCE 1\n{}").is_err());
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = read_instance(Path::new("/nonexistent/instance.abs")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
