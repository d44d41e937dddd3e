//! Canonical byte encodings.
//!
//! Every composite value (proofs, records, messages, keys) is written as a
//! sequence of fields, each prefixed with its length as a 4-byte big-endian
//! integer. The same layout feeds the Fiat-Shamir transcripts, so two values
//! hash equal only if every field boundary lines up.

use crate::error::{Error, Result};

pub trait Encode {
    /// Fixed-layout canonical bytes for a single value.
    fn encode(&self) -> Vec<u8>;
}

pub trait Decode: Sized {
    fn decode(bytes: &[u8]) -> Result<Self>;
}

/// Appends length-prefixed fields.
#[derive(Default, Debug, Clone)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn put_bytes(&mut self, bytes: &[u8]) -> &mut Self {
        let len = u32::try_from(bytes.len()).expect("field longer than 4 GiB");
        self.buf.extend_from_slice(&len.to_be_bytes());
        self.buf.extend_from_slice(bytes);
        self
    }

    pub fn put<E: Encode + ?Sized>(&mut self, value: &E) -> &mut Self {
        self.put_bytes(&value.encode())
    }

    pub fn put_u64(&mut self, value: u64) -> &mut Self {
        self.put_bytes(&value.to_be_bytes())
    }

    pub fn put_str(&mut self, value: &str) -> &mut Self {
        self.put_bytes(value.as_bytes())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.buf
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
}

/// Reads fields written by [`Writer`].
#[derive(Debug)]
pub struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf }
    }

    pub fn take_bytes(&mut self) -> Result<&'a [u8]> {
        if self.buf.len() < 4 {
            return Err(Error::Decode("truncated length prefix"));
        }
        let (len, rest) = self.buf.split_at(4);
        let len = u32::from_be_bytes(len.try_into().unwrap()) as usize;
        if rest.len() < len {
            return Err(Error::Decode("truncated field"));
        }
        let (field, rest) = rest.split_at(len);
        self.buf = rest;
        Ok(field)
    }

    pub fn take<D: Decode>(&mut self) -> Result<D> {
        D::decode(self.take_bytes()?)
    }

    pub fn take_u64(&mut self) -> Result<u64> {
        let bytes = self.take_bytes()?;
        let arr: [u8; 8] = bytes.try_into().map_err(|_| Error::Decode("u64 field must be 8 bytes"))?;
        Ok(u64::from_be_bytes(arr))
    }

    pub fn take_string(&mut self) -> Result<String> {
        let bytes = self.take_bytes()?;
        String::from_utf8(bytes.to_vec()).map_err(|_| Error::Decode("string field is not UTF-8"))
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    /// Fails if any bytes remain.
    pub fn finish(self) -> Result<()> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(Error::Decode("trailing bytes"))
        }
    }
}

impl Encode for [u8] {
    fn encode(&self) -> Vec<u8> {
        self.to_vec()
    }
}

impl Encode for str {
    fn encode(&self) -> Vec<u8> {
        self.as_bytes().to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_prefix_separates_fields() {
        let mut a = Writer::new();
        a.put_bytes(b"ab").put_bytes(b"c");
        let mut b = Writer::new();
        b.put_bytes(b"a").put_bytes(b"bc");
        assert_ne!(a.as_bytes(), b.as_bytes());
        assert_eq!(&a.as_bytes()[..6], &[0, 0, 0, 2, b'a', b'b']);
    }

    #[test]
    fn reader_rejects_truncation_and_trailing_bytes() {
        let mut w = Writer::new();
        w.put_u64(7).put_str("x");
        let bytes = w.into_bytes();

        let mut r = Reader::new(&bytes);
        assert_eq!(r.take_u64().unwrap(), 7);
        assert_eq!(r.take_string().unwrap(), "x");
        r.finish().unwrap();

        let mut r = Reader::new(&bytes[..bytes.len() - 1]);
        r.take_u64().unwrap();
        assert!(r.take_bytes().is_err());

        let mut long = bytes.clone();
        long.push(0);
        let mut r = Reader::new(&long);
        r.take_u64().unwrap();
        r.take_string().unwrap();
        assert!(r.finish().is_err());
    }
}
