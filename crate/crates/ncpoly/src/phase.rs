//! Exact phases: elements of `(1/p^D)Z/Z` for bounded depth `D`.
//!
//! A value is stored as `num / p^depth` with `num` reduced and not divisible
//! by `p` (zero is depth 0). That normal form is unique, so equality is plain
//! structural equality and a value's depth can be read off directly. The
//! prime lives in the [`Fp`] context; every operation takes it explicitly.

use crate::fp::{Fp, FpElem};
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// `num / p^depth (mod 1)`, normalized so `p` does not divide `num`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct PhaseValue {
    num: u64,
    depth: u32,
}

impl PhaseValue {
    pub const ZERO: PhaseValue = PhaseValue { num: 0, depth: 0 };

    pub fn numerator(self) -> u64 {
        self.num
    }

    pub fn depth(self) -> u32 {
        self.depth
    }

    pub fn is_zero(self) -> bool {
        self.depth == 0
    }

    fn normalized(p: u32, mut num: u64, mut depth: u32) -> PhaseValue {
        while depth > 0 {
            if num == 0 {
                return PhaseValue::ZERO;
            }
            if num % p as u64 != 0 {
                break;
            }
            num /= p as u64;
            depth -= 1;
        }
        if depth == 0 {
            return PhaseValue::ZERO;
        }
        PhaseValue { num, depth }
    }
}

impl Fp {
    /// Builds `num / p^depth`, reducing and normalizing.
    pub fn phase(&self, num: u64, depth: u32) -> Result<PhaseValue> {
        if depth > self.max_depth() {
            return Err(Error::DepthExceeded { depth, max: self.max_depth() });
        }
        Ok(PhaseValue::normalized(self.p(), num % self.pow_depth(depth), depth))
    }

    /// The canonical embedding of `F_p` into depth-one phases, `a -> |a|/p`.
    pub fn phase_from_elem(&self, a: FpElem) -> PhaseValue {
        PhaseValue::normalized(self.p(), a.val() as u64, 1)
    }

    /// Inverse of [`Fp::phase_from_elem`]; errors when the depth exceeds one.
    pub fn elem_from_phase(&self, v: PhaseValue) -> Result<FpElem> {
        match v.depth {
            0 => Ok(FpElem::ZERO),
            1 => self.check(v.num),
            d => Err(Error::DepthTooHigh { got: d, bound: 1 }),
        }
    }

    pub fn phase_add(&self, a: PhaseValue, b: PhaseValue) -> PhaseValue {
        let depth = a.depth.max(b.depth);
        let modulus = self.pow_depth(depth) as u128;
        let na = a.num as u128 * self.pow_depth(depth - a.depth) as u128;
        let nb = b.num as u128 * self.pow_depth(depth - b.depth) as u128;
        PhaseValue::normalized(self.p(), ((na + nb) % modulus) as u64, depth)
    }

    pub fn phase_neg(&self, a: PhaseValue) -> PhaseValue {
        if a.depth == 0 {
            return PhaseValue::ZERO;
        }
        PhaseValue { num: self.pow_depth(a.depth) - a.num, depth: a.depth }
    }

    pub fn phase_sub(&self, a: PhaseValue, b: PhaseValue) -> PhaseValue {
        self.phase_add(a, self.phase_neg(b))
    }

    /// Integer multiple `c * a`.
    pub fn phase_scale(&self, a: PhaseValue, c: u64) -> PhaseValue {
        if a.depth == 0 {
            return PhaseValue::ZERO;
        }
        let modulus = self.pow_depth(a.depth) as u128;
        PhaseValue::normalized(self.p(), ((a.num as u128 * c as u128) % modulus) as u64, a.depth)
    }

    /// `e(a) = exp(2 pi i a)` on the unit circle.
    pub fn phase_complex(&self, a: PhaseValue) -> Complex64 {
        let angle = TAU * a.num as f64 / self.pow_depth(a.depth) as f64;
        Complex64::new(angle.cos(), angle.sin())
    }

    /// Serialized form `num/p^depth`, e.g. `3/2^3`.
    pub fn phase_string(&self, a: PhaseValue) -> String {
        format!("{}/{}^{}", a.num, self.p(), a.depth)
    }

    /// Parses `num/p^depth`, insisting that the written base matches `p`.
    pub fn phase_parse(&self, s: &str) -> Result<PhaseValue> {
        let bad = || Error::Parse(format!("expected num/{}^depth, got {s:?}", self.p()));
        let (num_s, rest) = s.trim().split_once('/').ok_or_else(bad)?;
        let (base_s, depth_s) = rest.split_once('^').ok_or_else(bad)?;
        let num: u64 = num_s.trim().parse().map_err(|_| bad())?;
        let base: u32 = base_s.trim().parse().map_err(|_| bad())?;
        let depth: u32 = depth_s.trim().parse().map_err(|_| bad())?;
        if base != self.p() {
            return Err(Error::Parse(format!("phase base {base} does not match p = {}", self.p())));
        }
        self.phase(num, depth)
    }
}
