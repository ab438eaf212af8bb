//! Arithmetic over GF(2^w) for w = 8 or 16, plus the small dense-matrix
//! toolkit (multiply, solve, rank, invert) the rest of the crate builds on.
//!
//! Elements are polynomials over GF(2) reduced modulo an irreducible modulus;
//! addition is XOR, multiplication goes through log/antilog tables built once
//! per [`Field`]. A bit-by-bit reference multiply ([`FieldSpec::mul_naive`])
//! is kept public so the tables can always be cross-checked against it.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Errors from field construction and linear algebra.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GaloisError {
    #[error("unsupported word size w={0}; supported: 8, 16")]
    UnsupportedWidth(u8),
    #[error("modulus {modulus:#x} does not have degree {expected}")]
    WrongDegree { modulus: u32, expected: u8 },
    #[error("modulus {modulus:#x} is reducible (divisible by {divisor:#x})")]
    Reducible { modulus: u32, divisor: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("singular matrix (rank {rank} of {dim})")]
    Singular { rank: usize, dim: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// One element of GF(2^w), stored in the low `w` bits.
///
/// Addition (= subtraction) is carry-less, so it is defined directly on the
/// newtype; everything that needs the modulus lives on [`Field`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Gf(pub u16);

impl Gf {
    pub const ZERO: Gf = Gf(0);
    pub const ONE: Gf = Gf(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::ops::Add for Gf {
    type Output = Gf;
    fn add(self, rhs: Gf) -> Gf {
        Gf(self.0 ^ rhs.0)
    }
}

impl std::ops::AddAssign for Gf {
    fn add_assign(&mut self, rhs: Gf) {
        self.0 ^= rhs.0;
    }
}

// In characteristic 2 subtraction and addition coincide; both spellings are
// provided so formulas can be transcribed without mental re-encoding.
impl std::ops::Sub for Gf {
    type Output = Gf;
    fn sub(self, rhs: Gf) -> Gf {
        self + rhs
    }
}

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf({:#x})", self.0)
    }
}

impl fmt::Display for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

/// Field parameters: word size and irreducible modulus polynomial.
///
/// The modulus is written with its degree-w bit set, e.g. `0x11d` for
/// x^8 + x^4 + x^3 + x^2 + 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub w: u8,
    pub modulus: u32,
}

/// Default modulus for GF(2^8): x^8 + x^4 + x^3 + x^2 + 1.
pub const DEFAULT_MODULUS_W8: u32 = 0x11d;
/// Default modulus for GF(2^16): x^16 + x^12 + x^3 + x + 1.
pub const DEFAULT_MODULUS_W16: u32 = 0x1100b;

impl FieldSpec {
    /// Validates the word size, the modulus degree, and irreducibility
    /// (trial division by every polynomial of degree 1..=w/2).
    pub fn new(w: u8, modulus: u32) -> Result<FieldSpec, GaloisError> {
        if w != 8 && w != 16 {
            return Err(GaloisError::UnsupportedWidth(w));
        }
        if 32 - modulus.leading_zeros() != u32::from(w) + 1 {
            return Err(GaloisError::WrongDegree {
                modulus,
                expected: w,
            });
        }
        // A reducible polynomial of degree w has a factor of degree <= w/2.
        for divisor in 2u32..(2u32 << (w / 2)) {
            if poly_rem(modulus, divisor) == 0 {
                return Err(GaloisError::Reducible { modulus, divisor });
            }
        }
        Ok(FieldSpec { w, modulus })
    }

    /// GF(2^8) with the default modulus.
    pub fn gf8() -> FieldSpec {
        FieldSpec::new(8, DEFAULT_MODULUS_W8).expect("default w=8 modulus is irreducible")
    }

    /// GF(2^16) with the default modulus.
    pub fn gf16() -> FieldSpec {
        FieldSpec::new(16, DEFAULT_MODULUS_W16).expect("default w=16 modulus is irreducible")
    }

    /// The default spec for a given word size.
    pub fn default_for(w: u8) -> Result<FieldSpec, GaloisError> {
        match w {
            8 => Ok(FieldSpec::gf8()),
            16 => Ok(FieldSpec::gf16()),
            other => Err(GaloisError::UnsupportedWidth(other)),
        }
    }

    /// Number of field elements, 2^w.
    pub fn order(&self) -> usize {
        1usize << self.w
    }

    /// Reference multiply: shift-and-reduce, one modulus bit at a time.
    ///
    /// Slow but obviously correct; the table-driven [`Field::mul`] is checked
    /// against this in tests and must agree on every input.
    pub fn mul_naive(&self, a: Gf, b: Gf) -> Gf {
        let mut acc: u32 = 0;
        let mut a = u32::from(a.0);
        let b = u32::from(b.0);
        for i in 0..u32::from(self.w) {
            if (b >> i) & 1 == 1 {
                acc ^= a;
            }
            a <<= 1;
            if (a >> self.w) & 1 == 1 {
                a ^= self.modulus;
            }
        }
        Gf(acc as u16)
    }
}

/// Remainder of carry-less polynomial division over GF(2).
fn poly_rem(mut num: u32, den: u32) -> u32 {
    let den_deg = 31 - den.leading_zeros();
    while num != 0 {
        let num_deg = 31 - num.leading_zeros();
        if num_deg < den_deg {
            break;
        }
        num ^= den << (num_deg - den_deg);
    }
    num
}

/// A fully constructed field: spec plus log/antilog tables.
///
/// `exp` is stored doubled so `exp[log a + log b]` needs no reduction
/// modulo 2^w - 1.
#[derive(Clone)]
pub struct Field {
    spec: FieldSpec,
    generator: Gf,
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("spec", &self.spec)
            .field("generator", &self.generator)
            .finish()
    }
}

// A Field is fully determined by its spec; tables are derived data and are
// not serialized.
impl Serialize for Field {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.spec.serialize(s)
    }
}

impl Field {
    /// Builds the tables for `spec`, searching for the smallest multiplicative
    /// generator (so non-primitive irreducible moduli also work).
    pub fn new(spec: FieldSpec) -> Result<Field, GaloisError> {
        let spec = FieldSpec::new(spec.w, spec.modulus)?; // re-validate
        let q = spec.order();
        let group_order = q - 1;
        'candidates: for g in 2..q {
            let g = Gf(g as u16);
            let mut exp = vec![0u16; 2 * group_order];
            let mut cur = Gf::ONE;
            for (i, slot) in exp.iter_mut().take(group_order).enumerate() {
                *slot = cur.0;
                cur = spec.mul_naive(cur, g);
                if cur == Gf::ONE && i + 1 < group_order {
                    continue 'candidates; // order too small, not a generator
                }
            }
            debug_assert_eq!(cur, Gf::ONE);
            for i in 0..group_order {
                exp[group_order + i] = exp[i];
            }
            let mut log = vec![0u16; q];
            for i in 0..group_order {
                log[exp[i] as usize] = i as u16;
            }
            return Ok(Field {
                spec,
                generator: g,
                exp,
                log,
            });
        }
        unreachable!("an irreducible modulus always yields a cyclic unit group")
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    /// The multiplicative generator the tables were built from.
    pub fn generator(&self) -> Gf {
        self.generator
    }

    /// Number of field elements.
    pub fn order(&self) -> usize {
        self.spec.order()
    }

    /// Addition (XOR); provided for symmetry with the other operations.
    #[inline]
    pub fn add(&self, a: Gf, b: Gf) -> Gf {
        a + b
    }

    /// Table-driven multiplication.
    #[inline]
    pub fn mul(&self, a: Gf, b: Gf) -> Gf {
        if a.is_zero() || b.is_zero() {
            return Gf::ZERO;
        }
        Gf(self.exp[self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize])
    }

    /// Multiplicative inverse; zero is rejected.
    pub fn inv(&self, a: Gf) -> Result<Gf, GaloisError> {
        if a.is_zero() {
            return Err(GaloisError::ZeroInverse);
        }
        let group_order = self.order() - 1;
        Ok(Gf(self.exp[group_order - self.log[a.0 as usize] as usize]))
    }

    /// `a / b`; errors on division by zero.
    pub fn div(&self, a: Gf, b: Gf) -> Result<Gf, GaloisError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` by exponent arithmetic in the log domain. `0^0 = 1`.
    pub fn pow(&self, a: Gf, e: usize) -> Gf {
        if e == 0 {
            return Gf::ONE;
        }
        if a.is_zero() {
            return Gf::ZERO;
        }
        let group_order = self.order() - 1;
        let l = (self.log[a.0 as usize] as usize * (e % group_order)) % group_order;
        Gf(self.exp[l])
    }
}

/// Dense row-major matrix over one field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GfMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Gf>,
}

impl GfMatrix {
    pub fn zero(rows: usize, cols: usize) -> GfMatrix {
        GfMatrix {
            rows,
            cols,
            data: vec![Gf::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> GfMatrix {
        let mut m = GfMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, Gf::ONE);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Gf) -> GfMatrix {
        let mut m = GfMatrix::zero(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    /// Builds a matrix from row slices; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<Gf>]) -> GfMatrix {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        GfMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Gf {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Gf) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Gf] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Matrix * column-vector.
    pub fn mul_vec(&self, field: &Field, v: &[Gf]) -> Vec<Gf> {
        assert_eq!(v.len(), self.cols, "vector length != matrix cols");
        (0..self.rows)
            .map(|r| {
                let mut acc = Gf::ZERO;
                for (a, b) in self.row(r).iter().zip(v) {
                    acc += field.mul(*a, *b);
                }
                acc
            })
            .collect()
    }

    /// Row-vector * matrix (used for systematic encoding: data * generator).
    pub fn row_vec_mul(&self, field: &Field, v: &[Gf]) -> Vec<Gf> {
        assert_eq!(v.len(), self.rows, "vector length != matrix rows");
        let mut out = vec![Gf::ZERO; self.cols];
        for (r, coeff) in v.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                *o += field.mul(*coeff, *a);
            }
        }
        out
    }

    pub fn matmul(&self, field: &Field, rhs: &GfMatrix) -> GfMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = GfMatrix::zero(self.rows, rhs.cols);
        for r in 0..self.rows {
            for inner in 0..self.cols {
                let a = self.get(r, inner);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let v = out.get(r, c) + field.mul(a, rhs.get(inner, c));
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    /// Solves the square system `self * x = rhs` by Gauss-Jordan elimination
    /// with first-nonzero pivoting (deterministic row order).
    ///
    /// On a singular system the elimination is finished anyway so the error
    /// can report the actual rank.
    pub fn solve(&self, field: &Field, rhs: &[Gf]) -> Result<Vec<Gf>, GaloisError> {
        if self.rows != self.cols {
            return Err(GaloisError::Dimension(format!(
                "solve needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        if rhs.len() != self.rows {
            return Err(GaloisError::Dimension(format!(
                "rhs length {} != {}",
                rhs.len(),
                self.rows
            )));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut b = rhs.to_vec();
        let mut singular = false;
        let mut rank = 0usize;
        let mut pivot_row = 0usize;
        for col in 0..n {
            let found = (pivot_row..n).find(|&r| !a.get(r, col).is_zero());
            let Some(r) = found else {
                singular = true;
                continue;
            };
            a.swap_rows(pivot_row, r);
            b.swap(pivot_row, r);
            let inv = field.inv(a.get(pivot_row, col)).expect("pivot is nonzero");
            a.scale_row(field, pivot_row, inv);
            b[pivot_row] = field.mul(b[pivot_row], inv);
            for r2 in 0..n {
                if r2 == pivot_row {
                    continue;
                }
                let factor = a.get(r2, col);
                if factor.is_zero() {
                    continue;
                }
                a.sub_scaled_row(field, r2, pivot_row, factor);
                let delta = field.mul(factor, b[pivot_row]);
                b[r2] += delta;
            }
            rank += 1;
            pivot_row += 1;
        }
        if singular {
            return Err(GaloisError::Singular { rank, dim: n });
        }
        // Pivots were taken in column order, so after Jordan elimination the
        // matrix is a row-permuted identity only when no swaps misplace rows;
        // with forward pivot rows they land in order and b is the solution.
        Ok(b)
    }

    /// Rank by row echelon elimination (works for rectangular matrices).
    pub fn rank(&self, field: &Field) -> usize {
        let mut a = self.clone();
        let mut rank = 0usize;
        for col in 0..a.cols {
            let Some(r) = (rank..a.rows).find(|&r| !a.get(r, col).is_zero()) else {
                continue;
            };
            a.swap_rows(rank, r);
            let inv = field.inv(a.get(rank, col)).expect("pivot is nonzero");
            a.scale_row(field, rank, inv);
            for r2 in rank + 1..a.rows {
                let factor = a.get(r2, col);
                if !factor.is_zero() {
                    a.sub_scaled_row(field, r2, rank, factor);
                }
            }
            rank += 1;
            if rank == a.rows {
                break;
            }
        }
        rank
    }

    /// Fast invertibility test for square matrices: abort at the first
    /// column with no usable pivot.
    pub fn is_invertible(&self, field: &Field) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let n = self.rows;
        let mut a = self.clone();
        for col in 0..n {
            let Some(r) = (col..n).find(|&r| !a.get(r, col).is_zero()) else {
                return false;
            };
            a.swap_rows(col, r);
            let inv = field.inv(a.get(col, col)).expect("pivot is nonzero");
            for r2 in col + 1..n {
                let factor = field.mul(a.get(r2, col), inv);
                if factor.is_zero() {
                    continue;
                }
                // only columns right of the pivot matter from here on
                for c in col..n {
                    let v = a.get(r2, c) + field.mul(factor, a.get(col, c));
                    a.set(r2, c, v);
                }
            }
        }
        true
    }

    /// Full inverse via Gauss-Jordan on `[self | I]`.
    pub fn inverted(&self, field: &Field) -> Result<GfMatrix, GaloisError> {
        if self.rows != self.cols {
            return Err(GaloisError::Dimension(format!(
                "inverse needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = GfMatrix::identity(n);
        for col in 0..n {
            let Some(r) = (col..n).find(|&r| !a.get(r, col).is_zero()) else {
                return Err(GaloisError::Singular {
                    rank: a.rank(field),
                    dim: n,
                });
            };
            a.swap_rows(col, r);
            inv.swap_rows(col, r);
            let scale = field.inv(a.get(col, col)).expect("pivot is nonzero");
            a.scale_row(field, col, scale);
            inv.scale_row(field, col, scale);
            for r2 in 0..n {
                if r2 == col {
                    continue;
                }
                let factor = a.get(r2, col);
                if factor.is_zero() {
                    continue;
                }
                a.sub_scaled_row(field, r2, col, factor);
                inv.sub_scaled_row(field, r2, col, factor);
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, field: &Field, r: usize, by: Gf) {
        for c in 0..self.cols {
            let v = field.mul(self.get(r, c), by);
            self.set(r, c, v);
        }
    }

    /// row[target] += factor * row[src] (char 2: add == subtract).
    fn sub_scaled_row(&mut self, field: &Field, target: usize, src: usize, factor: Gf) {
        for c in 0..self.cols {
            let v = self.get(target, c) + field.mul(factor, self.get(src, c));
            self.set(target, c, v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn default_specs_validate() {
        assert_eq!(FieldSpec::gf8().modulus, 0x11d);
        assert_eq!(FieldSpec::gf16().modulus, 0x1100b);
        assert_eq!(FieldSpec::gf8().order(), 256);
        assert_eq!(FieldSpec::gf16().order(), 65536);
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^8 + 1 = (x + 1)^8 over GF(2)
        let err = FieldSpec::new(8, 0x101).unwrap_err();
        assert!(matches!(err, GaloisError::Reducible { .. }));
        // wrong degree
        let err = FieldSpec::new(8, 0x1d).unwrap_err();
        assert!(matches!(err, GaloisError::WrongDegree { .. }));
        // unsupported width
        let err = FieldSpec::new(4, 0x13).unwrap_err();
        assert!(matches!(err, GaloisError::UnsupportedWidth(4)));
    }

    #[test]
    fn known_products_w8() {
        let f = Field::new(FieldSpec::gf8()).unwrap();
        // 0x80 * 0x02: one shift past the top bit, one reduction by 0x11d.
        assert_eq!(f.mul(Gf(0x80), Gf(0x02)), Gf(0x1d));
        assert_eq!(f.mul(Gf(0), Gf(0xab)), Gf(0));
        assert_eq!(f.mul(Gf(1), Gf(0xab)), Gf(0xab));
        // inverse of 2: 2 * 0x8e = 0x11c, reduced by 0x11d leaves 1.
        assert_eq!(f.inv(Gf(0x02)).unwrap(), Gf(0x8e));
        assert_eq!(f.mul(Gf(0x02), Gf(0x8e)), Gf(1));
    }

    #[test]
    fn table_mul_matches_naive_everywhere_w8() {
        let spec = FieldSpec::gf8();
        let f = Field::new(spec).unwrap();
        for a in 0..256u16 {
            for b in 0..256u16 {
                assert_eq!(f.mul(Gf(a), Gf(b)), spec.mul_naive(Gf(a), Gf(b)));
            }
        }
    }

    #[test]
    fn table_mul_matches_naive_sampled_w16() {
        let spec = FieldSpec::gf16();
        let f = Field::new(spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20_000 {
            let a = Gf(rng.gen());
            let b = Gf(rng.gen());
            assert_eq!(f.mul(a, b), spec.mul_naive(a, b), "a={a} b={b}");
        }
    }

    #[test]
    fn every_nonzero_element_has_inverse_w8() {
        let f = Field::new(FieldSpec::gf8()).unwrap();
        for a in 1..256u16 {
            let inv = f.inv(Gf(a)).unwrap();
            assert_eq!(f.mul(Gf(a), inv), Gf::ONE, "a={a:#x}");
            // cross-check against brute-force search
            let brute = (1..256u16)
                .find(|&b| f.spec().mul_naive(Gf(a), Gf(b)) == Gf::ONE)
                .unwrap();
            assert_eq!(inv, Gf(brute));
        }
        assert_eq!(f.inv(Gf(0)).unwrap_err(), GaloisError::ZeroInverse);
    }

    #[test]
    fn field_axioms_sampled_w16() {
        let f = Field::new(FieldSpec::gf16()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..5_000 {
            let a = Gf(rng.gen());
            let b = Gf(rng.gen());
            let c = Gf(rng.gen());
            assert_eq!(f.mul(a, b), f.mul(b, a));
            assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
            assert_eq!(f.mul(a, b + c), f.mul(a, b) + f.mul(a, c));
            assert_eq!(a + b, b + a);
            assert_eq!(a + a, Gf::ZERO);
        }
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let f = Field::new(FieldSpec::gf8()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..500 {
            let a = Gf(rng.gen::<u8>() as u16);
            let e = rng.gen_range(0..600usize);
            let mut expect = Gf::ONE;
            for _ in 0..e {
                expect = f.mul(expect, a);
            }
            assert_eq!(f.pow(a, e), expect, "a={a} e={e}");
        }
        assert_eq!(f.pow(Gf::ZERO, 0), Gf::ONE);
        assert_eq!(f.pow(Gf::ZERO, 3), Gf::ZERO);
    }

    #[test]
    fn generator_covers_whole_group() {
        for spec in [FieldSpec::gf8(), FieldSpec::gf16()] {
            let f = Field::new(spec).unwrap();
            let mut seen = vec![false; spec.order()];
            let mut cur = Gf::ONE;
            for _ in 0..spec.order() - 1 {
                assert!(!seen[cur.0 as usize], "generator order too small");
                seen[cur.0 as usize] = true;
                cur = f.mul(cur, f.generator());
            }
            assert_eq!(cur, Gf::ONE);
        }
    }

    fn random_invertible(f: &Field, n: usize, rng: &mut ChaCha8Rng) -> GfMatrix {
        loop {
            let q = f.order() as u32;
            let m = GfMatrix::from_fn(n, n, |_, _| Gf(rng.gen_range(0..q) as u16));
            if m.is_invertible(f) {
                return m;
            }
        }
    }

    #[test]
    fn solve_round_trips_up_to_32() {
        let f = Field::new(FieldSpec::gf8()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for n in [1usize, 2, 3, 5, 8, 13, 21, 32] {
            for _ in 0..8 {
                let m = random_invertible(&f, n, &mut rng);
                let x: Vec<Gf> = (0..n).map(|_| Gf(rng.gen_range(0..256))).collect();
                let rhs = m.mul_vec(&f, &x);
                let solved = m.solve(&f, &rhs).unwrap();
                assert_eq!(solved, x, "n={n}");
            }
        }
    }

    #[test]
    fn singular_solve_reports_rank() {
        let f = Field::new(FieldSpec::gf8()).unwrap();
        // rows 0 and 1 identical -> rank 2 of 3
        let m = GfMatrix::from_rows(&[
            vec![Gf(1), Gf(2), Gf(3)],
            vec![Gf(1), Gf(2), Gf(3)],
            vec![Gf(0), Gf(1), Gf(7)],
        ]);
        let err = m.solve(&f, &[Gf(1), Gf(1), Gf(1)]).unwrap_err();
        assert_eq!(err, GaloisError::Singular { rank: 2, dim: 3 });
        assert_eq!(m.rank(&f), 2);
        assert!(!m.is_invertible(&f));
    }

    #[test]
    fn inverse_agrees_with_solve() {
        let f = Field::new(FieldSpec::gf16()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let m = random_invertible(&f, 12, &mut rng);
        let inv = m.inverted(&f).unwrap();
        let prod = m.matmul(&f, &inv);
        assert_eq!(prod, GfMatrix::identity(12));
        let rhs: Vec<Gf> = (0..12).map(|_| Gf(rng.gen())).collect();
        assert_eq!(m.solve(&f, &rhs).unwrap(), inv.mul_vec(&f, &rhs));
    }

    #[test]
    fn row_vec_mul_matches_transpose_mul() {
        let f = Field::new(FieldSpec::gf8()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let m = GfMatrix::from_fn(4, 9, |_, _| Gf(rng.gen_range(0..256)));
        let v: Vec<Gf> = (0..4).map(|_| Gf(rng.gen_range(0..256))).collect();
        let left = m.row_vec_mul(&f, &v);
        let explicit: Vec<Gf> = (0..9)
            .map(|c| {
                let mut acc = Gf::ZERO;
                for r in 0..4 {
                    acc += f.mul(v[r], m.get(r, c));
                }
                acc
            })
            .collect();
        assert_eq!(left, explicit);
    }
}
