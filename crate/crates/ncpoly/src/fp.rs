//! Prime-field context, elements, vectors, and small matrices.
//!
//! A single copyable [`Fp`] carries the modulus together with the depth cap
//! used by phase arithmetic. Elements are bare reduced residues stored in one
//! byte; all arithmetic goes through the context, so the modulus never has to
//! be duplicated per element.

use crate::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::TAU;
use std::fmt;

/// Depth cap applied by [`Fp::new`]. For larger primes the cap shrinks so
/// that `p^depth` always fits in 64 bits.
pub const DEFAULT_MAX_DEPTH: u32 = 16;

/// Largest accepted modulus; elements are stored as single bytes.
pub const MAX_PRIME: u32 = 251;

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Largest `d` with `p^d <= u64::MAX`.
fn depth_limit(p: u32) -> u32 {
    if p < 2 {
        return 0;
    }
    let mut d = 0;
    let mut acc: u128 = 1;
    loop {
        acc *= p as u128;
        if acc > u64::MAX as u128 {
            return d;
        }
        d += 1;
    }
}

/// A reduced residue modulo the prime of the owning context.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct FpElem(u8);

impl FpElem {
    pub const ZERO: FpElem = FpElem(0);
    pub const ONE: FpElem = FpElem(1);

    /// The representative in `{0, .., p-1}`, i.e. the standard map `|.|`.
    pub fn val(self) -> u8 {
        self.0
    }

    pub fn idx(self) -> usize {
        self.0 as usize
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FpElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Prime-field context: the modulus plus the phase depth cap.
///
/// Equality and hashing look at the modulus only; the depth cap is a resource
/// bound, not part of the mathematical identity of the field.
#[derive(Clone, Copy, Debug)]
pub struct Fp {
    p: u32,
    max_depth: u32,
}

impl PartialEq for Fp {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
    }
}

impl Eq for Fp {}

impl std::hash::Hash for Fp {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.p.hash(state);
    }
}

impl Fp {
    pub fn new(p: u32) -> Result<Fp> {
        Fp::with_max_depth(p, DEFAULT_MAX_DEPTH.min(depth_limit(p)))
    }

    pub fn with_max_depth(p: u32, max_depth: u32) -> Result<Fp> {
        if p > MAX_PRIME || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if max_depth > depth_limit(p) {
            return Err(Error::ContextOverflow { p, max_depth });
        }
        Ok(Fp { p, max_depth })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    /// `p^d`. Panics if `d` exceeds the depth cap; callers validate depths at
    /// construction time, so this is an internal-bug guard, not an error path.
    pub fn pow_depth(&self, d: u32) -> u64 {
        assert!(d <= self.max_depth, "depth {d} above cap {}", self.max_depth);
        (0..d).fold(1u64, |acc, _| acc * self.p as u64)
    }

    pub fn elem(&self, v: u64) -> FpElem {
        FpElem((v % self.p as u64) as u8)
    }

    pub fn elem_i(&self, v: i64) -> FpElem {
        FpElem(v.rem_euclid(self.p as i64) as u8)
    }

    pub fn check(&self, v: u64) -> Result<FpElem> {
        if v < self.p as u64 {
            Ok(FpElem(v as u8))
        } else {
            Err(Error::InvalidElement { value: v, p: self.p })
        }
    }

    pub fn add(&self, a: FpElem, b: FpElem) -> FpElem {
        self.elem(a.0 as u64 + b.0 as u64)
    }

    pub fn sub(&self, a: FpElem, b: FpElem) -> FpElem {
        self.elem(a.0 as u64 + (self.p - b.0 as u32) as u64)
    }

    pub fn neg(&self, a: FpElem) -> FpElem {
        self.elem((self.p - a.0 as u32) as u64)
    }

    pub fn mul(&self, a: FpElem, b: FpElem) -> FpElem {
        self.elem(a.0 as u64 * b.0 as u64)
    }

    pub fn pow(&self, base: FpElem, mut exp: u32) -> FpElem {
        let mut acc = FpElem::ONE;
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, sq);
            }
            sq = self.mul(sq, sq);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FpElem) -> Result<FpElem> {
        if a.is_zero() {
            return Err(Error::InvalidElement { value: 0, p: self.p });
        }
        Ok(self.pow(a, self.p - 2))
    }

    /// `k! mod p` (zero as soon as `k >= p`).
    pub fn factorial(&self, k: u32) -> FpElem {
        let mut acc = FpElem::ONE;
        for i in 2..=k {
            acc = self.mul(acc, self.elem(i as u64));
        }
        acc
    }

    /// `(-1)^l mod p`.
    pub fn parity_sign(&self, l: u32) -> FpElem {
        if l % 2 == 0 {
            FpElem::ONE
        } else {
            self.elem_i(-1)
        }
    }

    /// The additive character `e_p(a) = exp(2 pi i |a| / p)`.
    pub fn ep(&self, a: FpElem) -> Complex64 {
        let angle = TAU * a.0 as f64 / self.p as f64;
        Complex64::new(angle.cos(), angle.sin())
    }

    pub fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> FpElem {
        FpElem(rng.random_range(0..self.p) as u8)
    }

    pub fn dot(&self, a: &FpVector, b: &FpVector) -> Result<FpElem> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
        }
        let mut acc = FpElem::ZERO;
        for (x, y) in a.coords().iter().zip(b.coords()) {
            acc = self.add(acc, self.mul(*x, *y));
        }
        Ok(acc)
    }

    pub fn vec_add(&self, a: &FpVector, b: &FpVector) -> Result<FpVector> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
        }
        Ok(FpVector::from_elems(
            a.coords().iter().zip(b.coords()).map(|(x, y)| self.add(*x, *y)).collect(),
        ))
    }
}

/// A point of `F_p^n`, coordinates listed first to last.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FpVector {
    coords: Vec<FpElem>,
}

impl FpVector {
    pub fn zero(n: usize) -> FpVector {
        FpVector { coords: vec![FpElem::ZERO; n] }
    }

    /// Standard basis vector `e_i` (zero-based `i`).
    pub fn unit(n: usize, i: usize) -> FpVector {
        let mut v = FpVector::zero(n);
        v.coords[i] = FpElem::ONE;
        v
    }

    pub fn from_elems(coords: Vec<FpElem>) -> FpVector {
        FpVector { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn get(&self, i: usize) -> FpElem {
        self.coords[i]
    }

    pub fn coords(&self) -> &[FpElem] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn random<R: Rng + ?Sized>(fp: Fp, n: usize, rng: &mut R) -> FpVector {
        FpVector { coords: (0..n).map(|_| fp.random_elem(rng)).collect() }
    }

    /// Parses the comma form `"1,0,2"`, validating every digit against `p`.
    pub fn parse(s: &str, fp: Fp) -> Result<FpVector> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(FpVector::zero(0));
        }
        let coords = s
            .split(',')
            .map(|tok| {
                let v: u64 = tok.trim().parse().map_err(|_| Error::Parse(format!("bad digit {tok:?}")))?;
                fp.check(v)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FpVector { coords })
    }
}

impl fmt::Display for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for c in &self.coords {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
            first = false;
        }
        Ok(())
    }
}

/// Dense square matrix over `F_p`, row major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FpMatrix {
    n: usize,
    entries: Vec<FpElem>,
}

impl FpMatrix {
    pub fn identity(n: usize) -> FpMatrix {
        let mut m = FpMatrix { n, entries: vec![FpElem::ZERO; n * n] };
        for i in 0..n {
            m.entries[i * n + i] = FpElem::ONE;
        }
        m
    }

    pub fn from_columns(cols: Vec<FpVector>) -> Result<FpMatrix> {
        let n = cols.len();
        let mut m = FpMatrix { n, entries: vec![FpElem::ZERO; n * n] };
        for (c, col) in cols.iter().enumerate() {
            if col.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: col.dim() });
            }
            for r in 0..n {
                m.entries[r * n + c] = col.get(r);
            }
        }
        Ok(m)
    }

    pub fn from_row_major(n: usize, entries: Vec<FpElem>) -> Result<FpMatrix> {
        if entries.len() != n * n {
            return Err(Error::LengthMismatch { expected: n * n, got: entries.len() });
        }
        Ok(FpMatrix { n, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> FpElem {
        self.entries[r * self.n + c]
    }

    pub fn row_major(&self) -> &[FpElem] {
        &self.entries
    }

    pub fn mul_vec(&self, fp: Fp, v: &FpVector) -> Result<FpVector> {
        if v.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: v.dim() });
        }
        let coords = (0..self.n)
            .map(|r| {
                let mut acc = FpElem::ZERO;
                for c in 0..self.n {
                    acc = fp.add(acc, fp.mul(self.get(r, c), v.get(c)));
                }
                acc
            })
            .collect();
        Ok(FpVector { coords })
    }

    pub fn mul(&self, fp: Fp, other: &FpMatrix) -> Result<FpMatrix> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let n = self.n;
        let mut out = FpMatrix { n, entries: vec![FpElem::ZERO; n * n] };
        for r in 0..n {
            for c in 0..n {
                let mut acc = FpElem::ZERO;
                for k in 0..n {
                    acc = fp.add(acc, fp.mul(self.get(r, k), other.get(k, c)));
                }
                out.entries[r * n + c] = acc;
            }
        }
        Ok(out)
    }

    /// Gauss-Jordan inverse; errors on singular input.
    pub fn inverse(&self, fp: Fp) -> Result<FpMatrix> {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut b = FpMatrix::identity(n).entries;
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[r * n + col].is_zero())
                .ok_or_else(|| Error::Internal(format!("singular matrix (rank < {n})")))?;
            a.swap_ranges(pivot, col, n);
            b.swap_ranges(pivot, col, n);
            let inv = fp.inv(a[col * n + col])?;
            for c in 0..n {
                a[col * n + c] = fp.mul(a[col * n + c], inv);
                b[col * n + c] = fp.mul(b[col * n + c], inv);
            }
            for r in 0..n {
                if r != col && !a[r * n + col].is_zero() {
                    let factor = a[r * n + col];
                    for c in 0..n {
                        let s = fp.mul(factor, a[col * n + c]);
                        a[r * n + c] = fp.sub(a[r * n + c], s);
                        let s = fp.mul(factor, b[col * n + c]);
                        b[r * n + c] = fp.sub(b[r * n + c], s);
                    }
                }
            }
        }
        Ok(FpMatrix { n, entries: b })
    }
}

trait SwapRanges {
    fn swap_ranges(&mut self, r1: usize, r2: usize, n: usize);
}

impl SwapRanges for Vec<FpElem> {
    fn swap_ranges(&mut self, r1: usize, r2: usize, n: usize) {
        if r1 != r2 {
            for c in 0..n {
                self.swap(r1 * n + c, r2 * n + c);
            }
        }
    }
}
