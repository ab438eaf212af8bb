//! Fixed-size binary header carried by every shard file.
//!
//! The header records everything needed to rebuild the code descriptor
//! (parameters plus coefficient seed), so a repair or decode needs no side
//! channel: any surviving shard identifies the whole family.

use std::io::{self, Read, Write};

use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"STRS";
pub const VERSION: u8 = 1;
/// Bytes occupied by the header at the start of every shard file.
pub const HEADER_LEN: usize = 31;

#[derive(Debug, Error)]
pub enum HeaderError {
    #[error("bad magic {0:02x?}, not a shard file")]
    BadMagic([u8; 4]),
    #[error("unsupported shard format version {0}")]
    BadVersion(u8),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Everything a shard file declares about itself. All multi-byte integers
/// are stored big-endian so shards are portable across hosts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShardHeader {
    /// Field width in bits (8 or 16).
    pub w: u8,
    pub n: u8,
    pub k: u8,
    pub alpha: u8,
    /// 0 = split data and parity columns separately, 1 = uniform split.
    pub partition_mode: u8,
    /// Seed the coupling coefficients were drawn from.
    pub seed: u64,
    /// Which column of the code this shard stores.
    pub node_index: u8,
    /// Original file length in bytes, before padding.
    pub payload_length: u64,
    /// Data symbols per row of one stripe (equals `k`).
    pub stripe_size: u32,
}

impl ShardHeader {
    pub fn write_to(&self, out: &mut impl Write) -> io::Result<()> {
        let mut buf = [0u8; HEADER_LEN];
        buf[0..4].copy_from_slice(&MAGIC);
        buf[4] = VERSION;
        buf[5] = self.w;
        buf[6] = self.n;
        buf[7] = self.k;
        buf[8] = self.alpha;
        buf[9] = self.partition_mode;
        buf[10..18].copy_from_slice(&self.seed.to_be_bytes());
        buf[18] = self.node_index;
        buf[19..27].copy_from_slice(&self.payload_length.to_be_bytes());
        buf[27..31].copy_from_slice(&self.stripe_size.to_be_bytes());
        out.write_all(&buf)
    }

    pub fn read_from(input: &mut impl Read) -> Result<ShardHeader, HeaderError> {
        let mut buf = [0u8; HEADER_LEN];
        input.read_exact(&mut buf)?;
        let magic = [buf[0], buf[1], buf[2], buf[3]];
        if magic != MAGIC {
            return Err(HeaderError::BadMagic(magic));
        }
        if buf[4] != VERSION {
            return Err(HeaderError::BadVersion(buf[4]));
        }
        Ok(ShardHeader {
            w: buf[5],
            n: buf[6],
            k: buf[7],
            alpha: buf[8],
            partition_mode: buf[9],
            seed: u64::from_be_bytes(buf[10..18].try_into().unwrap()),
            node_index: buf[18],
            payload_length: u64::from_be_bytes(buf[19..27].try_into().unwrap()),
            stripe_size: u32::from_be_bytes(buf[27..31].try_into().unwrap()),
        })
    }

    /// True when two shards belong to the same encoded file (everything but
    /// the node index agrees).
    pub fn same_code(&self, other: &ShardHeader) -> bool {
        let key = |h: &ShardHeader| {
            (h.w, h.n, h.k, h.alpha, h.partition_mode, h.seed, h.payload_length, h.stripe_size)
        };
        key(self) == key(other)
    }
}
