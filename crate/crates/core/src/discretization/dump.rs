use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::discretization::{Field, GridKind};
use crate::error::Result;
use crate::real::{to_f64, Real};

/// Sidecar describing a binary field dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumpHeader {
    pub kind: GridKind,
    pub k: f64,
    pub n: usize,
    pub h: f64,
}

/// Writes `<stem>.bin` (little-endian f64, row-major with x slowest) and `<stem>.json`.
pub fn dump_field<T: Real>(field: &Field<T>, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let bin = dir.join(format!("{stem}.bin"));
    let side = dir.join(format!("{stem}.json"));
    let mut bytes = Vec::with_capacity(field.len() * 8);
    for &v in field.values() {
        bytes.extend_from_slice(&to_f64(v).to_le_bytes());
    }
    fs::File::create(&bin)?.write_all(&bytes)?;
    let g = field.grid();
    let header = DumpHeader { kind: g.kind(), k: to_f64(g.k()), n: g.n(), h: to_f64(g.h()) };
    let text = serde_json::to_string_pretty(&header).map_err(|e| crate::error::Error::Io(e.to_string()))?;
    fs::write(&side, text)?;
    Ok((bin, side))
}

/// Reads a dump written by [`dump_field`].
pub fn read_dump(bin: &Path, sidecar: &Path) -> Result<(DumpHeader, Vec<f64>)> {
    let header: DumpHeader = serde_json::from_str(&fs::read_to_string(sidecar)?)
        .map_err(|e| crate::error::Error::Io(e.to_string()))?;
    let bytes = fs::read(bin)?;
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok((header, values))
}
