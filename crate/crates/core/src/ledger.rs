//! Append-only hash-chained block store for trapdoor query records.
//!
//! ```text
//! block_hash = SHA-256(len‖index ‖ len‖prev_hash ‖ len‖timestamp ‖ len‖payload)
//! ```
//!
//! Block 0 links to 32 zero bytes. Any change to a stored block changes its
//! recomputed hash, and any change to a hash breaks the next block's link.

use std::fs;
use std::path::Path;

use sha2::{Digest as _, Sha256};

use crate::algebra::{Reader, Writer};
use crate::error::{Error, Result};

pub type Digest = [u8; 32];

pub const GENESIS_PREV: Digest = [0u8; 32];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub index: u64,
    pub prev_hash: Digest,
    pub timestamp: u64,
    pub payload: Vec<u8>,
    pub block_hash: Digest,
}

impl Block {
    pub fn compute_hash(index: u64, prev_hash: &Digest, timestamp: u64, payload: &[u8]) -> Digest {
        let mut w = Writer::new();
        w.put_u64(index).put_bytes(prev_hash).put_u64(timestamp).put_bytes(payload);
        Sha256::digest(w.as_bytes()).into()
    }

    pub fn hash_matches(&self) -> bool {
        self.block_hash == Self::compute_hash(self.index, &self.prev_hash, self.timestamp, &self.payload)
    }

    /// Bits in the fault-injection layout `index ‖ prev_hash ‖ timestamp ‖ payload ‖ block_hash`.
    pub fn bit_len(&self) -> usize {
        (8 + 32 + 8 + self.payload.len() + 32) * 8
    }

    /// Flips one bit of the layout described by [`Block::bit_len`].
    fn flip_bit(&mut self, bit: usize) {
        let (byte, mask) = (bit / 8, 1u8 << (7 - bit % 8));
        let plen = self.payload.len();
        match byte {
            0..8 => self.index ^= (mask as u64) << (8 * (7 - byte)),
            8..40 => self.prev_hash[byte - 8] ^= mask,
            40..48 => self.timestamp ^= (mask as u64) << (8 * (47 - byte)),
            b if b < 48 + plen => self.payload[b - 48] ^= mask,
            b => self.block_hash[b - 48 - plen] ^= mask,
        }
    }

    fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.put_u64(self.index)
            .put_bytes(&self.prev_hash)
            .put_u64(self.timestamp)
            .put_bytes(&self.payload)
            .put_bytes(&self.block_hash);
        w.into_bytes()
    }

    fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let digest = |b: &[u8]| -> Result<Digest> { b.try_into().map_err(|_| Error::Decode("digest must be 32 bytes")) };
        let block = Block {
            index: r.take_u64()?,
            prev_hash: digest(r.take_bytes()?)?,
            timestamp: r.take_u64()?,
            payload: r.take_bytes()?.to_vec(),
            block_hash: digest(r.take_bytes()?)?,
        };
        r.finish()?;
        Ok(block)
    }
}

/// Single-writer chain. Existing blocks are never modified except through
/// the explicit fault-injection hook [`Ledger::tamper`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ledger {
    blocks: Vec<Block>,
}

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Hash of the last block, or the genesis link for an empty ledger.
    pub fn tip(&self) -> Digest {
        self.blocks.last().map_or(GENESIS_PREV, |b| b.block_hash)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn append(&mut self, payload: Vec<u8>, now: u64) -> &Block {
        let index = self.blocks.len() as u64;
        let prev_hash = self.tip();
        let block_hash = Block::compute_hash(index, &prev_hash, now, &payload);
        self.blocks.push(Block {
            index,
            prev_hash,
            timestamp: now,
            payload,
            block_hash,
        });
        self.blocks.last().expect("just pushed")
    }

    pub fn fetch(&self, index: usize) -> Result<&Block> {
        self.blocks.get(index).ok_or(Error::BlockOutOfRange {
            index,
            len: self.blocks.len(),
        })
    }

    pub fn verify_chain(&self) -> bool {
        let mut prev = GENESIS_PREV;
        for (i, block) in self.blocks.iter().enumerate() {
            if block.index != i as u64 || block.prev_hash != prev || !block.hash_matches() {
                return false;
            }
            prev = block.block_hash;
        }
        true
    }

    /// Fault injection: flips `bit` (taken modulo the block's bit length) of
    /// block `index`.
    pub fn tamper(&mut self, index: usize, bit: usize) -> Result<()> {
        let len = self.blocks.len();
        let block = self.blocks.get_mut(index).ok_or(Error::BlockOutOfRange { index, len })?;
        let bit = bit % block.bit_len();
        block.flip_bit(bit);
        Ok(())
    }

    /// Exchanges two blocks in place (fault injection).
    pub fn swap_blocks(&mut self, a: usize, b: usize) -> Result<()> {
        let len = self.blocks.len();
        if a >= len || b >= len {
            return Err(Error::BlockOutOfRange { index: a.max(b), len });
        }
        self.blocks.swap(a, b);
        Ok(())
    }

    /// Sequence of length-prefixed blocks.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        for block in &self.blocks {
            w.put_bytes(&block.encode());
        }
        w.into_bytes()
    }

    /// Decodes and verifies the whole chain.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let mut blocks = Vec::new();
        while !r.is_empty() {
            blocks.push(Block::decode(r.take_bytes()?)?);
        }
        let ledger = Ledger { blocks };
        if !ledger.verify_chain() {
            return Err(Error::LedgerCorrupt);
        }
        Ok(ledger)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    /// Loads a ledger file; a missing file is an empty ledger.
    pub fn load(path: &Path) -> Result<Self> {
        match fs::read(path) {
            Ok(bytes) => Self::from_bytes(&bytes),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::new()),
            Err(e) => Err(e.into()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn chain(n: usize) -> Ledger {
        let mut l = Ledger::new();
        for i in 0..n {
            l.append(format!("record {i}").into_bytes(), 1_700_000_000 + i as u64);
        }
        l
    }

    #[test]
    fn genesis_and_linking() {
        let mut l = Ledger::new();
        let b0 = l.append(b"a".to_vec(), 1).clone();
        assert_eq!(b0.index, 0);
        assert_eq!(b0.prev_hash, GENESIS_PREV);
        let b1 = l.append(b"b".to_vec(), 2).clone();
        assert_eq!(b1.prev_hash, b0.block_hash);
        assert_eq!(l.fetch(0).unwrap().payload, b"a");
        assert_eq!(l.tip(), b1.block_hash);
    }

    #[test]
    fn fetch_out_of_range() {
        let l = chain(3);
        assert_eq!(l.fetch(0).unwrap().index, 0);
        assert!(matches!(l.fetch(5), Err(Error::BlockOutOfRange { index: 5, len: 3 })));
    }

    #[test]
    fn untampered_chain_verifies() {
        assert!(Ledger::new().verify_chain());
        assert!(chain(10).verify_chain());
    }

    #[test]
    fn payload_bit_flip_detected() {
        let mut l = chain(10);
        l.tamper(3, 48 * 8).unwrap();
        assert!(!l.verify_chain());
    }

    #[test]
    fn reorder_detected() {
        let mut l = chain(10);
        l.swap_blocks(2, 3).unwrap();
        assert!(!l.verify_chain());
    }

    #[test]
    fn every_field_of_a_block_is_covered() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let base = chain(5);
        for _ in 0..200 {
            let mut l = base.clone();
            let block = rng.gen_range(0..5);
            let bit = rng.gen_range(0..l.blocks[block].bit_len());
            l.tamper(block, bit).unwrap();
            assert!(!l.verify_chain(), "flip of bit {bit} in block {block} undetected");
        }
    }

    #[test]
    fn deterministic_rebuild() {
        assert_eq!(chain(7).tip(), chain(7).tip());
    }

    #[test]
    fn persistence_round_trip_and_corrupt_file() {
        let l = chain(4);
        let bytes = l.to_bytes();
        assert_eq!(Ledger::from_bytes(&bytes).unwrap(), l);

        let mut tampered = l.clone();
        tampered.tamper(1, 60 * 8).unwrap();
        assert!(matches!(Ledger::from_bytes(&tampered.to_bytes()), Err(Error::LedgerCorrupt)));
        assert!(Ledger::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    }
}
