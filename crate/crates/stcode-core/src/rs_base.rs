//! Systematic (n, k) Reed-Solomon base code.
//!
//! The generator is a Vandermonde matrix on n distinct evaluation points
//! (0, 1, g, g^2, ...) row-reduced to systematic form `[I | P]`. Row
//! reduction multiplies by an invertible matrix on the left, so every k x k
//! minor stays invertible and the code is MDS: any k symbols of a codeword
//! determine it.

use crate::galois::{Field, Gf, GfMatrix};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RsError {
    #[error("invalid parameters: need 0 < k < n <= field order, got n={n}, k={k}, q={q}")]
    BadParams { n: usize, k: usize, q: usize },
    #[error("data length {got} != k = {want}")]
    DataLength { got: usize, want: usize },
    #[error("position {0} out of range")]
    PositionRange(usize),
    #[error("not enough symbols to decode: have {have} distinct, need {need}")]
    Insufficient { have: usize, need: usize },
    #[error("symbols are inconsistent with any codeword (first mismatch at position {position})")]
    Inconsistent { position: usize },
    #[error("conflicting values supplied for position {0}")]
    ConflictingDuplicate(usize),
}

/// A systematic Reed-Solomon code over one field.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RsCode {
    n: usize,
    k: usize,
    /// k x n systematic generator; columns 0..k form the identity.
    generator: GfMatrix,
}

impl RsCode {
    /// Builds the systematic code. Needs `n` distinct evaluation points, so
    /// `n` must not exceed the field order.
    pub fn new(field: &Field, n: usize, k: usize) -> Result<RsCode, RsError> {
        let q = field.order();
        if k == 0 || k >= n || n > q {
            return Err(RsError::BadParams { n, k, q });
        }
        // Points 0, 1, g, g^2, ...: powers of the generator are pairwise
        // distinct while the exponent stays below q - 1, and never zero.
        let mut points = Vec::with_capacity(n);
        points.push(Gf::ZERO);
        let mut cur = Gf::ONE;
        for _ in 1..n {
            points.push(cur);
            cur = field.mul(cur, field.generator());
        }
        let vandermonde = GfMatrix::from_fn(k, n, |r, c| field.pow(points[c], r));
        let left = GfMatrix::from_fn(k, k, |r, c| vandermonde.get(r, c));
        let left_inv = left
            .inverted(field)
            .expect("Vandermonde block on distinct points is invertible");
        let generator = left_inv.matmul(field, &vandermonde);
        Ok(RsCode { n, k, generator })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The k x n systematic generator matrix.
    pub fn generator(&self) -> &GfMatrix {
        &self.generator
    }

    /// Encodes `k` data symbols into an `n`-symbol codeword. Systematic: the
    /// first `k` output symbols are the data itself.
    pub fn encode(&self, field: &Field, data: &[Gf]) -> Result<Vec<Gf>, RsError> {
        if data.len() != self.k {
            return Err(RsError::DataLength {
                got: data.len(),
                want: self.k,
            });
        }
        Ok(self.generator.row_vec_mul(field, data))
    }

    /// Recovers the unique codeword agreeing with the given `(position,
    /// value)` pairs.
    ///
    /// Any `k` distinct positions determine the codeword; extra symbols are
    /// cross-checked and an inconsistency is an error, as is a duplicated
    /// position with two different values.
    pub fn erasure_decode(
        &self,
        field: &Field,
        known: &[(usize, Gf)],
    ) -> Result<Vec<Gf>, RsError> {
        let mut seen: Vec<Option<Gf>> = vec![None; self.n];
        let mut distinct: Vec<usize> = Vec::with_capacity(known.len());
        for &(pos, val) in known {
            if pos >= self.n {
                return Err(RsError::PositionRange(pos));
            }
            match seen[pos] {
                None => {
                    seen[pos] = Some(val);
                    distinct.push(pos);
                }
                Some(prev) if prev != val => return Err(RsError::ConflictingDuplicate(pos)),
                Some(_) => {}
            }
        }
        if distinct.len() < self.k {
            return Err(RsError::Insufficient {
                have: distinct.len(),
                need: self.k,
            });
        }
        // Solve for the data from the first k distinct positions: each known
        // symbol y_j gives the equation sum_r G[r][j] * d_r = y_j.
        let use_pos = &distinct[..self.k];
        let a = GfMatrix::from_fn(self.k, self.k, |row, r| self.generator.get(r, use_pos[row]));
        let y: Vec<Gf> = use_pos.iter().map(|&p| seen[p].unwrap()).collect();
        let data = a
            .solve(field, &y)
            .expect("k x k minor of an MDS generator is invertible");
        let codeword = self.generator.row_vec_mul(field, &data);
        for &pos in &distinct {
            if codeword[pos] != seen[pos].unwrap() {
                return Err(RsError::Inconsistent { position: pos });
            }
        }
        Ok(codeword)
    }
}
