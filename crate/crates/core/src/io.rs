//! Text (`.ht`) and binary (`.htb`) tensor encodings.
//!
//! Text layout:
//!
//! ```text
//! htensor 1
//! order <m>
//! dims <d1> ... <dm>
//! layout row-major
//! <entries, whitespace separated>
//! ```
//!
//! Binary layout: magic `HTSR`, then little-endian `u32` version (= 1),
//! `u32` order, `order` × `u32` extents, then the entries as little-endian
//! IEEE-754 `f64` in row-major order.

use std::fmt::Write as _;

use crate::error::{Result, TensorError};
use crate::tensor::DenseTensor;

pub const BINARY_MAGIC: &[u8; 4] = b"HTSR";
pub const FORMAT_VERSION: u32 = 1;

/// Decoding options.
#[derive(Debug, Clone, Copy, Default)]
pub struct DecodeOptions {
    /// Accept NaN and infinite entries.
    pub allow_non_finite: bool,
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_entry(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn encode_text(t: &DenseTensor) -> String {
    let mut out = String::new();
    out.push_str("htensor 1\n");
    let _ = writeln!(out, "order {}", t.order());
    out.push_str("dims");
    for d in t.shape() {
        let _ = write!(out, " {d}");
    }
    out.push_str("\nlayout row-major\n");
    let row = *t.shape().last().unwrap_or(&1);
    for chunk in t.data().chunks(row) {
        let line: Vec<String> = chunk.iter().map(|&x| format_entry(x)).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn decode_text(bytes: &[u8], opts: DecodeOptions) -> Result<DenseTensor> {
    let text = std::str::from_utf8(bytes)
        .map_err(|_| TensorError::MalformedHeader("text file is not valid UTF-8".into()))?;
    let mut lines = text.lines();
    let mut header = |what: &str| -> Result<Vec<String>> {
        let line = lines
            .next()
            .ok_or_else(|| TensorError::MalformedHeader(format!("missing {what} line")))?;
        let fields: Vec<String> = line.split_whitespace().map(str::to_owned).collect();
        if fields.first().map(String::as_str) != Some(what) {
            return Err(TensorError::MalformedHeader(format!(
                "expected `{what}` line, found {line:?}"
            )));
        }
        Ok(fields[1..].to_vec())
    };

    let version = header("htensor")?;
    if version != ["1"] {
        return Err(TensorError::MalformedHeader(format!(
            "unsupported version {version:?}"
        )));
    }
    let order = header("order")?;
    let order: usize = match order.as_slice() {
        [m] => m
            .parse()
            .map_err(|_| TensorError::MalformedHeader(format!("bad order {m:?}")))?,
        _ => return Err(TensorError::MalformedHeader("order line needs one value".into())),
    };
    let dims = header("dims")?;
    let shape = dims
        .iter()
        .map(|d| {
            d.parse::<usize>()
                .map_err(|_| TensorError::MalformedHeader(format!("bad extent {d:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if shape.len() != order || order == 0 || shape.contains(&0) {
        return Err(TensorError::MalformedHeader(format!(
            "dims {shape:?} inconsistent with order {order}"
        )));
    }
    let layout = header("layout")?;
    if layout != ["row-major"] {
        return Err(TensorError::MalformedHeader(format!(
            "unsupported layout {layout:?}"
        )));
    }

    let expected = checked_len(&shape)?;
    let mut data = Vec::with_capacity(expected);
    for tok in lines.flat_map(str::split_whitespace) {
        let x: f64 = tok
            .parse()
            .map_err(|_| TensorError::InvalidEntry(tok.to_owned()))?;
        data.push(x);
    }
    if data.len() != expected {
        return Err(TensorError::EntryCountMismatch {
            expected,
            found: data.len(),
        });
    }
    finish(shape, data, opts)
}

pub fn encode_bin(t: &DenseTensor) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + 4 * t.order() + 8 * t.len());
    out.extend_from_slice(BINARY_MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(t.order() as u32).to_le_bytes());
    for &d in t.shape() {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for &x in t.data() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

pub fn decode_bin(bytes: &[u8], opts: DecodeOptions) -> Result<DenseTensor> {
    let mut cursor = bytes;
    let mut take_u32 = |what: &str| -> Result<u32> {
        if cursor.len() < 4 {
            return Err(TensorError::MalformedHeader(format!("truncated {what}")));
        }
        let (head, rest) = cursor.split_at(4);
        cursor = rest;
        Ok(u32::from_le_bytes(head.try_into().expect("4 bytes")))
    };
    if bytes.len() < 4 || &bytes[..4] != BINARY_MAGIC {
        return Err(TensorError::MalformedHeader("missing HTSR magic".into()));
    }
    take_u32("magic")?;
    let version = take_u32("version")?;
    if version != FORMAT_VERSION {
        return Err(TensorError::MalformedHeader(format!(
            "unsupported version {version}"
        )));
    }
    let order = take_u32("order")? as usize;
    if order == 0 {
        return Err(TensorError::MalformedHeader("order must be at least 1".into()));
    }
    let mut shape = Vec::with_capacity(order.min(64));
    for _ in 0..order {
        let d = take_u32("extent")? as usize;
        if d == 0 {
            return Err(TensorError::MalformedHeader("zero extent".into()));
        }
        shape.push(d);
    }
    let expected = checked_len(&shape)?;
    if cursor.len() % 8 != 0 || cursor.len() / 8 != expected {
        return Err(TensorError::EntryCountMismatch {
            expected,
            found: cursor.len() / 8,
        });
    }
    let data = cursor
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    finish(shape, data, opts)
}

/// Picks the decoder from the leading bytes.
pub fn decode_auto(bytes: &[u8], opts: DecodeOptions) -> Result<DenseTensor> {
    if bytes.starts_with(BINARY_MAGIC) {
        decode_bin(bytes, opts)
    } else {
        decode_text(bytes, opts)
    }
}

fn checked_len(shape: &[usize]) -> Result<usize> {
    shape
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .filter(|&n| n <= (1 << 31))
        .ok_or_else(|| TensorError::MalformedHeader(format!("dims {shape:?} too large")))
}

fn finish(shape: Vec<usize>, data: Vec<f64>, opts: DecodeOptions) -> Result<DenseTensor> {
    if !opts.allow_non_finite {
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(TensorError::NonFinite(pos));
        }
    }
    DenseTensor::new(shape, data)
}
