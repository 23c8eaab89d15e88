//! Low-level wire-format reading and writing, including name compression.

use std::collections::HashMap;

use thiserror::Error;

use crate::name::{DomainName, MAX_NAME_LEN};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("message truncated at offset {0}")]
    Truncated(usize),
    #[error("compression pointer loop at offset {0}")]
    PointerLoop(usize),
    #[error("bad label type 0x{0:02x}")]
    BadLabelType(u8),
    #[error("decoded name exceeds 255 octets")]
    NameTooLong,
    #[error("malformed rdata for type {rtype}: {detail}")]
    BadRdata { rtype: u16, detail: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("{0} trailing octets after message")]
    TrailingData(usize),
}

/// Appends big-endian fields to a buffer, optionally compressing names.
pub struct WireWriter {
    buf: Vec<u8>,
    compress: bool,
    offsets: HashMap<Vec<Vec<u8>>, u16>,
}

impl WireWriter {
    pub fn new(compress: bool) -> Self {
        WireWriter {
            buf: Vec::new(),
            compress,
            offsets: HashMap::new(),
        }
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u16(&mut self, v: u16) {
        self.buf.extend_from_slice(&v.to_be_bytes());
    }

    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_be_bytes());
    }

    pub fn bytes(&mut self, b: &[u8]) {
        self.buf.extend_from_slice(b);
    }

    pub fn patch_u16(&mut self, at: usize, v: u16) {
        self.buf[at..at + 2].copy_from_slice(&v.to_be_bytes());
    }

    /// Writes a name. Compression is used only when both the writer and the
    /// call site allow it.
    pub fn name(&mut self, name: &DomainName, compressible: bool) {
        let labels = name.labels();
        let use_compression = self.compress && compressible;
        for i in 0..labels.len() {
            let suffix: Vec<Vec<u8>> = labels[i..].iter().map(|l| l.to_ascii_lowercase()).collect();
            if use_compression {
                if let Some(&off) = self.offsets.get(&suffix) {
                    self.u16(0xC000 | off);
                    return;
                }
            }
            if self.compress && self.buf.len() < 0x4000 {
                self.offsets.entry(suffix).or_insert(self.buf.len() as u16);
            }
            self.u8(labels[i].len() as u8);
            self.bytes(&labels[i]);
        }
        self.u8(0);
    }
}

/// Cursor over a complete message buffer.
pub struct WireReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> WireReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        WireReader { data, pos: 0 }
    }

    pub fn at(data: &'a [u8], pos: usize) -> Self {
        WireReader { data, pos }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.data.len().saturating_sub(self.pos)
    }

    pub fn u8(&mut self) -> Result<u8, WireError> {
        let b = *self.data.get(self.pos).ok_or(WireError::Truncated(self.pos))?;
        self.pos += 1;
        Ok(b)
    }

    pub fn u16(&mut self) -> Result<u16, WireError> {
        let b = self.bytes(2)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    pub fn u32(&mut self) -> Result<u32, WireError> {
        let b = self.bytes(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub fn bytes(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        let end = self.pos.checked_add(n).ok_or(WireError::Truncated(self.pos))?;
        if end > self.data.len() {
            return Err(WireError::Truncated(self.pos));
        }
        let out = &self.data[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    /// Reads a possibly compressed name. Every pointer must point strictly
    /// before the position it was read from, which rules out loops.
    pub fn name(&mut self) -> Result<DomainName, WireError> {
        let mut labels: Vec<Vec<u8>> = Vec::new();
        let mut total = 1usize;
        let mut cursor = self.pos;
        let mut resume: Option<usize> = None;
        let mut jumps = 0usize;
        loop {
            let len = *self.data.get(cursor).ok_or(WireError::Truncated(cursor))?;
            match len & 0xC0 {
                0x00 => {
                    cursor += 1;
                    if len == 0 {
                        break;
                    }
                    let end = cursor + len as usize;
                    if end > self.data.len() {
                        return Err(WireError::Truncated(cursor));
                    }
                    total += len as usize + 1;
                    if total > 255 {
                        return Err(WireError::NameTooLong);
                    }
                    labels.push(self.data[cursor..end].to_vec());
                    cursor = end;
                }
                0xC0 => {
                    let lo = *self.data.get(cursor + 1).ok_or(WireError::Truncated(cursor))?;
                    let target = (((len & 0x3F) as usize) << 8) | lo as usize;
                    if target >= cursor {
                        return Err(WireError::PointerLoop(cursor));
                    }
                    jumps += 1;
                    if jumps > 127 {
                        return Err(WireError::PointerLoop(cursor));
                    }
                    if resume.is_none() {
                        resume = Some(cursor + 2);
                    }
                    cursor = target;
                }
                other => return Err(WireError::BadLabelType(other)),
            }
        }
        self.pos = resume.unwrap_or(cursor);
        let name = DomainName::from_labels(labels).map_err(|_| WireError::NameTooLong)?;
        if name.to_string().len() > MAX_NAME_LEN + 1 {
            return Err(WireError::NameTooLong);
        }
        Ok(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::name;

    #[test]
    fn compression_reuses_suffix() {
        let mut w = WireWriter::new(true);
        w.name(&name("ns.foo.com"), true);
        let first = w.len();
        w.name(&name("www.foo.com"), true);
        let out = w.finish();
        // "www" label then pointer to offset 3 ("foo.com")
        assert_eq!(&out[first..], &[3, b'w', b'w', b'w', 0xC0, 3]);
        let mut r = WireReader::at(&out, first);
        assert_eq!(r.name().unwrap(), name("www.foo.com"));
        assert_eq!(r.remaining(), 0);
    }

    #[test]
    fn forward_pointer_rejected() {
        let data = [0xC0, 0x00];
        assert!(matches!(WireReader::new(&data).name(), Err(WireError::PointerLoop(0))));
        let data = [1, b'a', 0xC0, 0x02];
        assert!(matches!(WireReader::new(&data).name(), Err(WireError::PointerLoop(2))));
    }

    #[test]
    fn truncated_label() {
        let data = [5, b'a', b'b'];
        assert!(matches!(WireReader::new(&data).name(), Err(WireError::Truncated(_))));
    }
}
