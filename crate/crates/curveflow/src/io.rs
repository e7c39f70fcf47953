//! File formats and write discipline shared by the library and CLI:
//! curve snapshots as JSON, and atomic file writes (temp file in the
//! target directory, then rename) so partial output is never observed.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::geometry::{PolyCurve, Topology, Vec2};

/// Formats a double with 17 significant digits, enough to round-trip any
/// `f64` exactly.
pub fn fmt_full(v: f64) -> String {
    format!("{v:.16e}")
}

/// Serializes a curve to the snapshot JSON format:
/// `{"topology": "closed" | "open", "nodes": [[x, y], ...]}` with
/// full-precision coordinates. The output is deterministic byte-for-byte.
pub fn snapshot_to_json(curve: &PolyCurve) -> String {
    let topology = match curve.topology() {
        Topology::Closed => "closed",
        Topology::OpenOnSubstrate => "open",
    };
    let mut out = String::with_capacity(64 + 56 * curve.node_count());
    out.push_str("{\n  \"topology\": \"");
    out.push_str(topology);
    out.push_str("\",\n  \"nodes\": [\n");
    for (i, p) in curve.nodes().iter().enumerate() {
        out.push_str("    [");
        out.push_str(&fmt_full(p.x));
        out.push_str(", ");
        out.push_str(&fmt_full(p.y));
        out.push(']');
        if i + 1 < curve.node_count() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("  ]\n}\n");
    out
}

#[derive(serde::Deserialize)]
struct SnapshotFile {
    topology: Topology,
    nodes: Vec<[f64; 2]>,
}

/// Parses and validates a snapshot from JSON text.
pub fn snapshot_from_json(text: &str) -> Result<PolyCurve> {
    let raw: SnapshotFile =
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("snapshot: {e}")))?;
    let nodes: Vec<Vec2> = raw.nodes.iter().map(|p| Vec2::new(p[0], p[1])).collect();
    match raw.topology {
        Topology::Closed => PolyCurve::closed(nodes),
        Topology::OpenOnSubstrate => PolyCurve::open_on_substrate(nodes),
    }
}

/// Reads and validates a snapshot file.
pub fn read_snapshot(path: &Path) -> Result<PolyCurve> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
    snapshot_from_json(&text)
}

/// Writes a snapshot file atomically.
pub fn write_snapshot(path: &Path, curve: &PolyCurve) -> Result<()> {
    atomic_write(path, snapshot_to_json(curve).as_bytes())
}

/// Writes `contents` to `path` atomically: the bytes go to a fresh
/// temporary file in the same directory, which is then renamed over the
/// target, so readers never observe a partial file.
pub fn atomic_write(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = tmp_sibling(path);
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::Io(e)
    })
}

fn tmp_sibling(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(format!(".tmp.{}", std::process::id()));
    path.with_file_name(name)
}
