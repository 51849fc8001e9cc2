//! Plain-text parameter checkpoints.
//!
//! Line 1 is `D H A seed epoch`. Then W1 (H rows of D values), b1 (one row), W2 (A rows
//! of H values) and b2 (one row), whitespace-separated. Values use Rust's shortest
//! round-trip float formatting, so a reload reproduces the forward pass bit-exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use super::QNetwork;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("checkpoint format: {0}")]
    Format(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckpointHeader {
    pub seed: u64,
    pub epoch: usize,
}

pub fn to_text(net: &QNetwork, header: CheckpointHeader) -> String {
    let (d, h, a) = (net.input_dim(), net.hidden_dim(), net.n_actions());
    let mut out = format!("{d} {h} {a} {} {}\n", header.seed, header.epoch);
    let mut row = |values: &mut dyn Iterator<Item = f64>| {
        let line: Vec<String> = values.map(|v| v.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    };
    for i in 0..h {
        row(&mut (0..d).map(|j| net.w1(i, j)));
    }
    row(&mut net.b1().iter().copied());
    for k in 0..a {
        row(&mut (0..h).map(|i| net.w2(k, i)));
    }
    row(&mut net.b2().iter().copied());
    out
}

pub fn from_text(text: &str) -> Result<(QNetwork, CheckpointHeader), CheckpointError> {
    let fmt_err = |m: String| CheckpointError::Format(m);
    let mut lines = text.lines();
    let head: Vec<&str> = lines.next().ok_or_else(|| fmt_err("empty file".into()))?.split_whitespace().collect();
    if head.len() != 5 {
        return Err(fmt_err(format!("header needs 5 fields, found {}", head.len())));
    }
    let num = |s: &str| s.parse::<u64>().map_err(|_| fmt_err(format!("bad header field `{s}`")));
    let (d, h, a) = (num(head[0])? as usize, num(head[1])? as usize, num(head[2])? as usize);
    let header = CheckpointHeader { seed: num(head[3])?, epoch: num(head[4])? as usize };

    let mut row = |expect: usize, what: &str| -> Result<Vec<f64>, CheckpointError> {
        let line = lines.next().ok_or_else(|| fmt_err(format!("missing {what} row")))?;
        let values = line
            .split_whitespace()
            .map(|v| v.parse::<f64>().map_err(|_| fmt_err(format!("bad value `{v}` in {what}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if values.len() != expect {
            return Err(fmt_err(format!("{what} row has {} values, expected {expect}", values.len())));
        }
        Ok(values)
    };

    let mut net = QNetwork::zeros(d, h, a);
    for i in 0..h {
        for (j, v) in row(d, "W1")?.into_iter().enumerate() {
            net.set_w1(i, j, v);
        }
    }
    net.b1_mut().copy_from_slice(&row(h, "b1")?);
    for k in 0..a {
        for (i, v) in row(h, "W2")?.into_iter().enumerate() {
            net.set_w2(k, i, v);
        }
    }
    net.b2_mut().copy_from_slice(&row(a, "b2")?);
    Ok((net, header))
}

pub fn save(path: impl AsRef<Path>, net: &QNetwork, header: CheckpointHeader) -> Result<(), CheckpointError> {
    fs::write(path, to_text(net, header))?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<(QNetwork, CheckpointHeader), CheckpointError> {
    from_text(&fs::read_to_string(path)?)
}

/// Short hex digest of the parameter bits, handy for reproducibility logs.
pub fn fingerprint(net: &QNetwork) -> String {
    // FNV-1a over the little-endian bit patterns
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for p in net.params() {
        for byte in p.to_bits().to_le_bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x0100_0000_01b3);
        }
    }
    let mut s = String::new();
    write!(s, "{hash:016x}").expect("write to string");
    s
}
