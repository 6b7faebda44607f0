//! `PTS1` timestamp stream files.
//!
//! Layout (all integers little-endian):
//!
//! | offset | size      | field                         |
//! |--------|-----------|-------------------------------|
//! | 0      | 8         | magic `PHTS0001`              |
//! | 8      | 8         | window length, picoseconds    |
//! | 16     | 8         | event count `n`               |
//! | 24     | 8·n       | event times, picoseconds      |
//!
//! Event times are nondecreasing and below the window length.

use std::io::{Read, Write};

use super::PhotonSequence;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"PHTS0001";
pub const HEADER_LEN: usize = 24;

pub fn encode(seq: &PhotonSequence) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * seq.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&seq.window_ps().to_le_bytes());
    out.extend_from_slice(&(seq.len() as u64).to_le_bytes());
    for &t in seq.timestamps_ps() {
        out.extend_from_slice(&t.to_le_bytes());
    }
    out
}

fn corrupt(offset: usize, reason: impl Into<String>) -> Error {
    Error::CorruptStream { offset: offset as u64, reason: reason.into() }
}

fn read_u64(bytes: &[u8], offset: usize) -> u64 {
    u64::from_le_bytes(bytes[offset..offset + 8].try_into().expect("8-byte slice"))
}

pub fn decode(bytes: &[u8]) -> Result<PhotonSequence> {
    if bytes.len() < MAGIC.len() || &bytes[..8] != MAGIC {
        return Err(corrupt(0, "bad magic, expected PHTS0001"));
    }
    if bytes.len() < HEADER_LEN {
        return Err(corrupt(bytes.len(), "truncated header"));
    }
    let window = read_u64(bytes, 8);
    if window == 0 {
        return Err(corrupt(8, "window length is zero"));
    }
    let count = read_u64(bytes, 16);
    let body = bytes.len() - HEADER_LEN;
    if !body.is_multiple_of(8) || (body / 8) as u64 != count {
        return Err(corrupt(16, format!("header declares {count} events but body holds {body} bytes")));
    }
    let mut ts = Vec::with_capacity(count as usize);
    let mut prev = 0u64;
    for i in 0..count as usize {
        let offset = HEADER_LEN + 8 * i;
        let t = read_u64(bytes, offset);
        if t < prev {
            return Err(corrupt(offset, format!("event {i} at {t} ps precedes previous event at {prev} ps")));
        }
        if t >= window {
            return Err(corrupt(offset, format!("event {i} at {t} ps lies outside window of {window} ps")));
        }
        ts.push(t);
        prev = t;
    }
    PhotonSequence::from_picoseconds(window, ts)
}

pub fn write<W: Write>(seq: &PhotonSequence, mut writer: W) -> Result<()> {
    writer.write_all(&encode(seq))?;
    Ok(())
}

pub fn read<R: Read>(mut reader: R) -> Result<PhotonSequence> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    decode(&bytes)
}
