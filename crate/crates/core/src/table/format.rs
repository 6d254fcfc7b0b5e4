//! Binary table files.
//!
//! ```text
//! "NFLF"  magic
//! u8      version (1)
//! u8      n
//! u8      m
//! 2^n values, ceil(m/8) bytes each, little-endian
//! u32     CRC-32 of the value bytes, little-endian
//! ```

use std::fs;
use std::path::Path;

use super::{check_dims, value_mask, TableFunction};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"NFLF";
pub const VERSION: u8 = 1;

const HEADER_LEN: usize = 7;

fn width(m: u32) -> usize {
    m.div_ceil(8) as usize
}

impl TableFunction {
    pub fn to_bytes(&self) -> Vec<u8> {
        let w = width(self.m);
        let mut out = Vec::with_capacity(HEADER_LEN + self.values.len() * w + 4);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&[VERSION, self.n as u8, self.m as u8]);
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes()[..w]);
        }
        let crc = crc32fast::hash(&out[HEADER_LEN..]);
        out.extend_from_slice(&crc.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let fmt = |msg: String| Error::Format(msg);
        if bytes.len() < HEADER_LEN + 4 {
            return Err(fmt(format!("{} bytes is shorter than any table file", bytes.len())));
        }
        if &bytes[..4] != MAGIC {
            return Err(fmt("bad magic, not a table file".into()));
        }
        if bytes[4] != VERSION {
            return Err(fmt(format!("unsupported version {}", bytes[4])));
        }
        let (n, m) = (bytes[5] as u32, bytes[6] as u32);
        check_dims(n, m).map_err(|e| fmt(e.to_string()))?;
        let w = width(m);
        let payload_len = (1usize << n) * w;
        let expected = HEADER_LEN + payload_len + 4;
        if bytes.len() != expected {
            return Err(fmt(format!(
                "n={n}, m={m} needs {expected} bytes, file has {}",
                bytes.len()
            )));
        }
        let payload = &bytes[HEADER_LEN..HEADER_LEN + payload_len];
        let stored = u32::from_le_bytes(bytes[expected - 4..].try_into().expect("4 bytes"));
        let actual = crc32fast::hash(payload);
        if stored != actual {
            return Err(fmt(format!("checksum mismatch: stored {stored:08x}, computed {actual:08x}")));
        }
        let mask = value_mask(m);
        let mut values = Vec::with_capacity(1 << n);
        for (i, chunk) in payload.chunks_exact(w).enumerate() {
            let mut buf = [0u8; 8];
            buf[..w].copy_from_slice(chunk);
            let v = u64::from_le_bytes(buf);
            if v & !mask != 0 {
                return Err(fmt(format!("entry {i} = {v} does not fit in {m} bits")));
            }
            values.push(v);
        }
        Ok(Self { n, m, values })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()).map_err(|e| Error::from(e).in_file(path))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::from(e).in_file(path))?;
        Self::from_bytes(&bytes).map_err(|e| e.in_file(path))
    }
}
