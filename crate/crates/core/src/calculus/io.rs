//! Cochain files.
//!
//! Binary layout, all little endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4     | magic `DWCC` |
//! | 2     | format version (`1`) |
//! | 1     | degree |
//! | 1     | kind: `0` primal, `1` dual |
//! | 8     | grid fingerprint |
//! | 8     | value count `N` |
//! | 8·N   | values as `f64` |
//!
//! CSV layout: a comment line `# degree=K kind=primal|dual grid=HEX count=N`,
//! a header `index,value`, then one row per cell.

use std::io::{BufRead, Read, Write};

use super::{CalculusError, Cochain, CochainKind, CylinderGrid};

const MAGIC: &[u8; 4] = b"DWCC";
const VERSION: u16 = 1;

fn io_err(e: std::io::Error) -> CalculusError {
    CalculusError::Io(e.to_string())
}

fn kind_code(kind: CochainKind) -> u8 {
    match kind {
        CochainKind::Primal => 0,
        CochainKind::Dual => 1,
    }
}

pub fn write_binary(w: &mut impl Write, c: &Cochain) -> Result<(), CalculusError> {
    let mut buf = Vec::with_capacity(24 + 8 * c.values().len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.push(c.degree() as u8);
    buf.push(kind_code(c.kind()));
    buf.extend_from_slice(&c.grid_hash().to_le_bytes());
    buf.extend_from_slice(&(c.values().len() as u64).to_le_bytes());
    for v in c.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf).map_err(io_err)
}

/// Reads a cochain and checks it against `grid`.
pub fn read_binary(r: &mut impl Read, grid: &CylinderGrid) -> Result<Cochain, CalculusError> {
    let mut head = [0u8; 24];
    r.read_exact(&mut head).map_err(io_err)?;
    if &head[0..4] != MAGIC {
        return Err(CalculusError::Format("not a cochain file".into()));
    }
    let version = u16::from_le_bytes([head[4], head[5]]);
    if version != VERSION {
        return Err(CalculusError::Format(format!("unsupported cochain format version {version}")));
    }
    let degree = head[6] as usize;
    let kind = match head[7] {
        0 => CochainKind::Primal,
        1 => CochainKind::Dual,
        other => return Err(CalculusError::Format(format!("unknown cochain kind {other}"))),
    };
    let hash = u64::from_le_bytes(head[8..16].try_into().expect("8 bytes"));
    let count = u64::from_le_bytes(head[16..24].try_into().expect("8 bytes")) as usize;
    if hash != grid.hash() {
        return Err(CalculusError::GridMismatch);
    }
    let mut data = vec![0u8; count.checked_mul(8).ok_or_else(|| CalculusError::Format("count overflow".into()))?];
    r.read_exact(&mut data).map_err(io_err)?;
    let values = data.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes"))).collect();
    Cochain::with_kind(grid, degree, kind, values)
}

pub fn write_csv(w: &mut impl Write, c: &Cochain) -> Result<(), CalculusError> {
    let kind = match c.kind() {
        CochainKind::Primal => "primal",
        CochainKind::Dual => "dual",
    };
    let mut out = format!(
        "# degree={} kind={} grid={:016x} count={}\nindex,value\n",
        c.degree(),
        kind,
        c.grid_hash(),
        c.values().len()
    );
    for (i, v) in c.values().iter().enumerate() {
        out.push_str(&format!("{i},{v:e}\n"));
    }
    w.write_all(out.as_bytes()).map_err(io_err)
}

pub fn read_csv(r: &mut impl BufRead, grid: &CylinderGrid) -> Result<Cochain, CalculusError> {
    let mut lines = r.lines();
    let mut next = || lines.next().transpose().map_err(io_err);
    let header = next()?.ok_or_else(|| CalculusError::Format("empty cochain csv".into()))?;
    let mut degree = None;
    let mut kind = None;
    let mut hash = None;
    let mut count = None;
    for field in header.trim_start_matches('#').split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| CalculusError::Format(format!("malformed header field `{field}`")))?;
        let bad = || CalculusError::Format(format!("bad value for `{key}`: `{value}`"));
        match key {
            "degree" => degree = Some(value.parse::<usize>().map_err(|_| bad())?),
            "kind" => {
                kind = Some(match value {
                    "primal" => CochainKind::Primal,
                    "dual" => CochainKind::Dual,
                    _ => return Err(bad()),
                })
            }
            "grid" => hash = Some(u64::from_str_radix(value, 16).map_err(|_| bad())?),
            "count" => count = Some(value.parse::<usize>().map_err(|_| bad())?),
            _ => return Err(CalculusError::Format(format!("unknown header field `{key}`"))),
        }
    }
    let missing = |name: &str| CalculusError::Format(format!("header lacks `{name}`"));
    let (degree, kind, hash, count) = (
        degree.ok_or_else(|| missing("degree"))?,
        kind.ok_or_else(|| missing("kind"))?,
        hash.ok_or_else(|| missing("grid"))?,
        count.ok_or_else(|| missing("count"))?,
    );
    if hash != grid.hash() {
        return Err(CalculusError::GridMismatch);
    }
    if next()?.as_deref().map(str::trim) != Some("index,value") {
        return Err(CalculusError::Format("expected column header `index,value`".into()));
    }
    let mut values = vec![f64::NAN; count];
    while let Some(line) = next()? {
        if line.trim().is_empty() {
            continue;
        }
        let (i, v) = line.split_once(',').ok_or_else(|| CalculusError::Format(format!("malformed row `{line}`")))?;
        let i: usize = i.trim().parse().map_err(|_| CalculusError::Format(format!("bad index `{i}`")))?;
        let v: f64 = v.trim().parse().map_err(|_| CalculusError::Format(format!("bad value `{v}`")))?;
        *values.get_mut(i).ok_or_else(|| CalculusError::Format(format!("index {i} out of range")))? = v;
    }
    Cochain::with_kind(grid, degree, kind, values)
}
