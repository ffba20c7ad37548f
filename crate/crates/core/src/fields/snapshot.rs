use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CanonicalFieldState;
use crate::error::SnapshotError;
use crate::grid::{Grid3, ScalarField, VectorField};

pub const SNAPSHOT_FORMAT: &str = "vacfield-snapshot";
pub const SNAPSHOT_VERSION: u32 = 1;
const FIELD_NAMES: [&str; 8] = ["A_x", "A_y", "A_z", "Y_x", "Y_y", "Y_z", "W", "chi"];

/// JSON sidecar of a binary snapshot. The payload holds the fields listed
/// in `fields`, one after another, each as x-fastest little-endian `f64`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotHeader {
    pub format: String,
    pub version: u32,
    pub n: [usize; 3],
    pub h: [f64; 3],
    pub origin: [f64; 3],
    pub time: f64,
    pub fields: Vec<String>,
    pub dtype: String,
}

pub fn encode_snapshot(state: &CanonicalFieldState) -> (String, Vec<u8>) {
    let grid = state.grid();
    let header = SnapshotHeader {
        format: SNAPSHOT_FORMAT.into(),
        version: SNAPSHOT_VERSION,
        n: grid.n(),
        h: grid.h(),
        origin: grid.origin(),
        time: state.time,
        fields: FIELD_NAMES.iter().map(|s| s.to_string()).collect(),
        dtype: "f64-le".into(),
    };
    let blocks: [&[f64]; 8] = [
        state.a.component(0),
        state.a.component(1),
        state.a.component(2),
        state.y.component(0),
        state.y.component(1),
        state.y.component(2),
        state.w.values(),
        state.chi.values(),
    ];
    let mut bin = Vec::with_capacity(8 * 8 * grid.len());
    for b in blocks {
        for x in b {
            bin.extend_from_slice(&x.to_le_bytes());
        }
    }
    let json = serde_json::to_string_pretty(&header).expect("header serializes");
    (json, bin)
}

pub fn decode_snapshot(header: &str, bin: &[u8]) -> Result<CanonicalFieldState, SnapshotError> {
    let h: SnapshotHeader = serde_json::from_str(header).map_err(|e| SnapshotError::Header(e.to_string()))?;
    if h.format != SNAPSHOT_FORMAT {
        return Err(SnapshotError::Header(format!("unknown format {:?}", h.format)));
    }
    if h.version != SNAPSHOT_VERSION {
        return Err(SnapshotError::Header(format!("unsupported version {}", h.version)));
    }
    if h.dtype != "f64-le" {
        return Err(SnapshotError::Header(format!("unsupported dtype {:?}", h.dtype)));
    }
    if h.fields.len() != FIELD_NAMES.len() || h.fields.iter().zip(FIELD_NAMES).any(|(a, b)| a != b) {
        return Err(SnapshotError::Header(format!("expected fields {FIELD_NAMES:?}")));
    }
    if !h.time.is_finite() {
        return Err(SnapshotError::Header("time must be finite".into()));
    }
    let grid = Grid3::periodic(h.n, h.h, h.origin)?;
    let len = grid.len();
    let expected = len * 8 * FIELD_NAMES.len();
    if bin.len() != expected {
        return Err(SnapshotError::Payload(format!("expected {expected} bytes, found {}", bin.len())));
    }
    let mut blocks: Vec<Vec<f64>> = Vec::with_capacity(FIELD_NAMES.len());
    for chunk in bin.chunks_exact(8 * len) {
        let block: Vec<f64> =
            chunk.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk"))).collect();
        if block.iter().any(|x| !x.is_finite()) {
            return Err(SnapshotError::Payload("non-finite value".into()));
        }
        blocks.push(block);
    }
    let mut it = blocks.into_iter();
    let mut next = || it.next().expect("eight blocks");
    let a = VectorField::new(grid.clone(), [next(), next(), next()])?;
    let y = VectorField::new(grid.clone(), [next(), next(), next()])?;
    let w = ScalarField::new(grid.clone(), next())?;
    let chi = ScalarField::new(grid.clone(), next())?;
    Ok(CanonicalFieldState { a, y, w, chi, time: h.time })
}

/// Writes `<stem>.json` and `<stem>.bin` into `dir`.
pub fn write_snapshot(
    state: &CanonicalFieldState,
    dir: &Path,
    stem: &str,
) -> Result<(PathBuf, PathBuf), SnapshotError> {
    let (json, bin) = encode_snapshot(state);
    let jp = dir.join(format!("{stem}.json"));
    let bp = dir.join(format!("{stem}.bin"));
    let io = |e: std::io::Error| SnapshotError::Io(e.to_string());
    std::fs::write(&jp, json + "\n").map_err(io)?;
    std::fs::write(&bp, bin).map_err(io)?;
    Ok((jp, bp))
}
