//! Product-space points, norms, oracle counters and seeded random streams.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A contiguous block `[offset, offset + len)` of a [`Point`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub offset: usize,
    pub len: usize,
}

impl Block {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.len
    }
}

/// Builds a block layout from consecutive block lengths.
pub fn blocks_from_lengths(lengths: &[usize]) -> Vec<Block> {
    let mut offset = 0;
    lengths
        .iter()
        .map(|&len| {
            let b = Block { offset, len };
            offset += len;
            b
        })
        .collect()
}

/// An element of the product space `Z = Z_1 x ... x Z_p`.
///
/// Values are always finite and the blocks tile the value vector exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    values: Vec<f64>,
    blocks: Vec<Block>,
}

impl Point {
    /// A single-block point.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let len = values.len();
        Self::with_blocks(values, vec![Block { offset: 0, len }])
    }

    pub fn with_blocks(values: Vec<f64>, blocks: Vec<Block>) -> Result<Self> {
        check_finite(&values)?;
        check_tiling(&blocks, values.len())?;
        Ok(Self { values, blocks })
    }

    pub fn zeros(blocks: Vec<Block>) -> Self {
        let dim = blocks.iter().map(|b| b.len).sum();
        Self {
            values: vec![0.0; dim],
            blocks,
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &[f64] {
        &self.values[self.blocks[i].range()]
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}

fn check_tiling(blocks: &[Block], dim: usize) -> Result<()> {
    let mut next = 0;
    for (i, b) in blocks.iter().enumerate() {
        if b.offset != next {
            return Err(Error::InvalidBlocks(format!(
                "block {i} starts at {} but previous block ends at {next}",
                b.offset
            )));
        }
        next += b.len;
    }
    if next != dim {
        return Err(Error::InvalidBlocks(format!(
            "blocks cover {next} coordinates, point has {dim}"
        )));
    }
    Ok(())
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `sum_i a_i b_i`, compensated.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    compensated_sum(a.iter().zip(b).map(|(x, y)| x * y))
}

/// The duality pairing `<a, b>` between two points of equal dimension.
pub fn dual_pairing(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(dot(a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Euclidean,
    L1,
}

pub fn norm(p: &[f64], kind: NormKind) -> Result<f64> {
    check_finite(p)?;
    Ok(match kind {
        NormKind::Euclidean => euclidean_norm(p),
        NormKind::L1 => compensated_sum(p.iter().map(|v| v.abs())),
    })
}

/// Overflow-safe Euclidean norm.
pub fn euclidean_norm(p: &[f64]) -> f64 {
    let scale = p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let s = compensated_sum(p.iter().map(|v| {
        let r = v / scale;
        r * r
    }));
    scale * s.sqrt()
}

pub fn linf_norm(p: &[f64]) -> f64 {
    p.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Oracle-call counters owned by one solver run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCounters {
    pub grad_g_evals: u64,
    pub h_evals: u64,
    pub h_samples: u64,
    pub prox_solves: u64,
}

/// A reproducible random stream identified by `(seed, stream_id)`.
///
/// Backed by ChaCha8; distinct stream ids select disjoint keystreams of the
/// same seed.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0);
        self.rng.random_range(0..n as u64) as usize
    }

    /// Uniform point on the probability simplex of dimension `n`.
    pub fn simplex_point(&mut self, n: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (0..n).map(|_| -(1.0 - self.uniform()).ln()).collect();
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
        v
    }
}

/// Mixes a list of words into one 64-bit stream identifier (splitmix64 chain).
pub fn stream_id_for(words: &[u64]) -> u64 {
    let mut h = 0x9E37_79B9_7F4A_7C15u64;
    for &w in words {
        h ^= w;
        h = h.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = h;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h = z ^ (z >> 31);
    }
    h
}
