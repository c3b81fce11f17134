//! File formats for loops and observable records.
//!
//! Loop binary layout, all little-endian: the 8-byte magic `LFLOOP01`, `T`
//! as f64, `n` as u64, `seed` as u64, then `n` points as `x, y` f64 pairs.
//! Text outputs start with a `#` line holding [`OutputMeta`] as JSON.

use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::observables::{ObservableRecord, RECORD_COLUMNS};
use crate::sampler::{LoopPath, TimeGrid};

pub const LOOP_MAGIC: &[u8; 8] = b"LFLOOP01";
/// Largest loop accepted by the decoders.
pub const MAX_LOOP_POINTS: u64 = 1 << 26;

/// Provenance carried by every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputMeta {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub config: serde_json::Value,
}

impl OutputMeta {
    pub fn new(seed: u64, config: serde_json::Value) -> Self {
        OutputMeta {
            tool: "loopfluct".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            config,
        }
    }

    fn write_comment<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "# {}", serde_json::to_string(self)?)?;
        Ok(())
    }
}

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

pub fn write_loop_binary<W: Write>(mut out: W, path: &LoopPath, seed: u64) -> Result<()> {
    out.write_all(LOOP_MAGIC)?;
    out.write_all(&path.grid().total_time().to_le_bytes())?;
    out.write_all(&(path.len() as u64).to_le_bytes())?;
    out.write_all(&seed.to_le_bytes())?;
    for p in path.points() {
        out.write_all(&p.x.to_le_bytes())?;
        out.write_all(&p.y.to_le_bytes())?;
    }
    Ok(())
}

fn read_array<R: Read, const N: usize>(input: &mut R, what: &str) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    input
        .read_exact(&mut buf)
        .map_err(|e| format_err(format!("truncated {what}: {e}")))?;
    Ok(buf)
}

/// Decodes a loop written by [`write_loop_binary`]; returns the loop and
/// its seed. Trailing bytes are an error.
pub fn read_loop_binary<R: Read>(mut input: R) -> Result<(LoopPath, u64)> {
    let magic: [u8; 8] = read_array(&mut input, "magic")?;
    if &magic != LOOP_MAGIC {
        return Err(format_err("not a loop dump (bad magic)"));
    }
    let total_time = f64::from_le_bytes(read_array(&mut input, "header")?);
    let n = u64::from_le_bytes(read_array(&mut input, "header")?);
    let seed = u64::from_le_bytes(read_array(&mut input, "header")?);
    if n > MAX_LOOP_POINTS {
        return Err(format_err(format!(
            "loop of {n} points exceeds the limit of {MAX_LOOP_POINTS}"
        )));
    }
    let grid = TimeGrid::new(total_time, n as usize)?;
    let mut points = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let x = f64::from_le_bytes(read_array(&mut input, "payload")?);
        let y = f64::from_le_bytes(read_array(&mut input, "payload")?);
        points.push(Point2::new(x, y));
    }
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(format_err("trailing bytes after loop payload"));
    }
    Ok((LoopPath::new(grid, points)?, seed))
}

pub fn write_loop_csv<W: Write>(mut out: W, path: &LoopPath, meta: &OutputMeta) -> Result<()> {
    meta.write_comment(&mut out)?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["index", "x", "y"])?;
    for (k, p) in path.points().iter().enumerate() {
        w.write_record([k.to_string(), p.x.to_string(), p.y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the leading `#` metadata line, if any, leaving `input` at the
/// start of the CSV body.
fn read_meta<R: BufRead>(input: &mut R) -> Result<Option<OutputMeta>> {
    let buf = input.fill_buf()?;
    if buf.first() != Some(&b'#') {
        return Ok(None);
    }
    let mut line = String::new();
    input.read_line(&mut line)?;
    let json = line.trim_start_matches('#').trim();
    Ok(Some(serde_json::from_str(json)?))
}

#[derive(Deserialize)]
struct LoopRow {
    index: usize,
    x: f64,
    y: f64,
}

/// Decodes a loop CSV. `T` comes from the metadata line (`config.T`), or
/// from `total_time` when given.
pub fn read_loop_csv<R: BufRead>(
    mut input: R,
    total_time: Option<f64>,
) -> Result<(LoopPath, Option<OutputMeta>)> {
    let meta = read_meta(&mut input)?;
    let t = total_time
        .or_else(|| {
            meta.as_ref()
                .and_then(|m| m.config.get("T"))
                .and_then(|v| v.as_f64())
        })
        .ok_or_else(|| format_err("loop CSV has no duration: metadata lacks config.T"))?;
    let mut reader = csv::ReaderBuilder::new().from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["index", "x", "y"] {
        return Err(format_err(format!(
            "unexpected loop CSV header {headers:?}"
        )));
    }
    let mut points = Vec::new();
    for (k, row) in reader.deserialize::<LoopRow>().enumerate() {
        let row = row?;
        if row.index != k {
            return Err(format_err(format!("row {k} has index {}", row.index)));
        }
        if points.len() as u64 >= MAX_LOOP_POINTS {
            return Err(format_err("loop CSV too long"));
        }
        points.push(Point2::new(row.x, row.y));
    }
    let grid = TimeGrid::new(t, points.len())?;
    Ok((LoopPath::new(grid, points)?, meta))
}

pub fn write_records_csv<W: Write>(
    mut out: W,
    records: &[ObservableRecord],
    meta: &OutputMeta,
) -> Result<()> {
    meta.write_comment(&mut out)?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .has_headers(false)
        .from_writer(out);
    w.write_record(RECORD_COLUMNS)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Decodes a record CSV; the header must match [`RECORD_COLUMNS`].
pub fn read_records_csv<R: BufRead>(
    mut input: R,
) -> Result<(Vec<ObservableRecord>, Option<OutputMeta>)> {
    let meta = read_meta(&mut input)?;
    let mut reader = csv::ReaderBuilder::new().from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != RECORD_COLUMNS {
        return Err(format_err(format!(
            "unexpected record CSV header {headers:?}"
        )));
    }
    let records = reader
        .deserialize()
        .collect::<std::result::Result<Vec<ObservableRecord>, _>>()?;
    Ok((records, meta))
}
