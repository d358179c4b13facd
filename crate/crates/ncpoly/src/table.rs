//! Dense value tables over `F_p^n`.
//!
//! Points are indexed by their base-`p` expansion with coordinate 0 least
//! significant: `index(x) = sum_i x_i p^i`. Every table in the crate uses
//! this convention, so index arithmetic (pointwise shifts, slices) can be
//! shared here.

use crate::fp::{Fp, FpVector};
use crate::phase::PhaseValue;
use crate::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Hard cap on table sizes; this is a desk-scale tool.
const MAX_POINTS: u128 = 1 << 28;

/// The indexing scheme of `F_p^n`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Grid {
    fp: Fp,
    n: usize,
    size: usize,
}

impl Grid {
    pub fn new(fp: Fp, n: usize) -> Result<Grid> {
        let mut size: u128 = 1;
        for _ in 0..n {
            size *= fp.p() as u128;
            if size > MAX_POINTS {
                return Err(Error::BudgetExceeded { needed: size, budget: MAX_POINTS as u64 });
            }
        }
        Ok(Grid { fp, n, size: size as usize })
    }

    pub fn fp(&self) -> Fp {
        self.fp
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn digits(&self, mut idx: usize) -> FpVector {
        let p = self.fp.p() as usize;
        let coords = (0..self.n)
            .map(|_| {
                let d = self.fp.elem((idx % p) as u64);
                idx /= p;
                d
            })
            .collect();
        FpVector::from_elems(coords)
    }

    pub fn index(&self, v: &FpVector) -> Result<usize> {
        if v.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: v.dim() });
        }
        let p = self.fp.p() as usize;
        let mut idx = 0;
        for i in (0..self.n).rev() {
            idx = idx * p + v.get(i).idx();
        }
        Ok(idx)
    }

    /// Pointwise sum of two points given by index.
    pub fn add(&self, a: usize, b: usize) -> usize {
        let p = self.fp.p() as usize;
        if p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut idx = 0;
        let mut scale = 1;
        for _ in 0..self.n {
            idx += ((a % p + b % p) % p) * scale;
            a /= p;
            b /= p;
            scale *= p;
        }
        idx
    }

    pub fn neg(&self, a: usize) -> usize {
        let p = self.fp.p() as usize;
        let mut a = a;
        let mut idx = 0;
        let mut scale = 1;
        for _ in 0..self.n {
            idx += ((p - a % p) % p) * scale;
            a /= p;
            scale *= p;
        }
        idx
    }

    pub fn points(&self) -> impl Iterator<Item = FpVector> + '_ {
        (0..self.size).map(|i| self.digits(i))
    }
}

/// Exact table of phases over `F_p^n`.
///
/// Serializes as `{"p": .., "n": .., "values": ["num/p^D", ..]}` in index
/// order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PhaseTable {
    grid: Grid,
    values: Vec<PhaseValue>,
}

impl PhaseTable {
    pub fn new(fp: Fp, n: usize, values: Vec<PhaseValue>) -> Result<PhaseTable> {
        let grid = Grid::new(fp, n)?;
        if values.len() != grid.size() {
            return Err(Error::TableLength { expected: grid.size(), got: values.len() });
        }
        Ok(PhaseTable { grid, values })
    }

    pub fn constant(fp: Fp, n: usize, v: PhaseValue) -> Result<PhaseTable> {
        let grid = Grid::new(fp, n)?;
        Ok(PhaseTable { grid, values: vec![v; grid.size()] })
    }

    pub fn from_fn(fp: Fp, n: usize, mut f: impl FnMut(&FpVector) -> PhaseValue) -> Result<PhaseTable> {
        let grid = Grid::new(fp, n)?;
        let values = (0..grid.size()).map(|i| f(&grid.digits(i))).collect();
        Ok(PhaseTable { grid, values })
    }

    pub fn fp(&self) -> Fp {
        self.grid.fp()
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn get(&self, idx: usize) -> PhaseValue {
        self.values[idx]
    }

    pub fn values(&self) -> &[PhaseValue] {
        &self.values
    }

    pub fn max_depth(&self) -> u32 {
        self.values.iter().map(|v| v.depth()).max().unwrap_or(0)
    }

    /// The additive difference table `x -> t(x + h) - t(x)`.
    pub fn shift_diff(&self, h: &FpVector) -> Result<PhaseTable> {
        let fp = self.fp();
        let hidx = self.grid.index(h)?;
        let values = (0..self.values.len())
            .map(|i| fp.phase_sub(self.values[self.grid.add(i, hidx)], self.values[i]))
            .collect();
        Ok(PhaseTable { grid: self.grid, values })
    }

    /// `x -> e(t(x))` as a complex table.
    pub fn to_complex(&self) -> ComplexTable {
        let fp = self.fp();
        ComplexTable {
            grid: self.grid,
            values: self.values.iter().map(|v| fp.phase_complex(*v)).collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PhaseTableDto {
    p: u32,
    n: usize,
    values: Vec<String>,
}

impl Serialize for PhaseTable {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let fp = self.fp();
        PhaseTableDto {
            p: fp.p(),
            n: self.n(),
            values: self.values.iter().map(|v| fp.phase_string(*v)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PhaseTable {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let dto = PhaseTableDto::deserialize(deserializer)?;
        let fp = Fp::new(dto.p).map_err(serde::de::Error::custom)?;
        let values = dto
            .values
            .iter()
            .map(|s| fp.phase_parse(s))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        PhaseTable::new(fp, dto.n, values).map_err(serde::de::Error::custom)
    }
}

/// Numeric table of a 1-bounded function over `F_p^n`.
#[derive(Clone, Debug)]
pub struct ComplexTable {
    grid: Grid,
    values: Vec<Complex64>,
}

impl ComplexTable {
    pub fn new(fp: Fp, n: usize, values: Vec<Complex64>) -> Result<ComplexTable> {
        let grid = Grid::new(fp, n)?;
        if values.len() != grid.size() {
            return Err(Error::TableLength { expected: grid.size(), got: values.len() });
        }
        Ok(ComplexTable { grid, values })
    }

    pub fn from_fn(fp: Fp, n: usize, mut f: impl FnMut(&FpVector) -> Complex64) -> Result<ComplexTable> {
        let grid = Grid::new(fp, n)?;
        let values = (0..grid.size()).map(|i| f(&grid.digits(i))).collect();
        Ok(ComplexTable { grid, values })
    }

    /// Random table with values on the unit circle (or inside it when
    /// `unimodular` is false); useful for stress tests.
    pub fn random<R: Rng + ?Sized>(fp: Fp, n: usize, unimodular: bool, rng: &mut R) -> Result<ComplexTable> {
        let grid = Grid::new(fp, n)?;
        let values = (0..grid.size())
            .map(|_| {
                let angle = rng.random_range(0.0..std::f64::consts::TAU);
                let r = if unimodular { 1.0 } else { rng.random_range(0.0..=1.0) };
                Complex64::new(r * angle.cos(), r * angle.sin())
            })
            .collect();
        Ok(ComplexTable { grid, values })
    }

    pub fn fp(&self) -> Fp {
        self.grid.fp()
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn get(&self, idx: usize) -> Complex64 {
        self.values[idx]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        for p in [2u32, 3, 5] {
            let fp = Fp::new(p).unwrap();
            let grid = Grid::new(fp, 3).unwrap();
            for idx in 0..grid.size() {
                assert_eq!(grid.index(&grid.digits(idx)).unwrap(), idx);
            }
        }
    }

    #[test]
    fn index_addition_matches_vector_addition() {
        for p in [2u32, 3] {
            let fp = Fp::new(p).unwrap();
            let grid = Grid::new(fp, 3).unwrap();
            for a in 0..grid.size() {
                for b in 0..grid.size() {
                    let via_vec = fp.vec_add(&grid.digits(a), &grid.digits(b)).unwrap();
                    assert_eq!(grid.add(a, b), grid.index(&via_vec).unwrap());
                }
                assert_eq!(grid.add(a, grid.neg(a)), 0);
            }
        }
    }

    #[test]
    fn shift_diff_example() {
        // t = |x|/4 on F_2: difference by h = 1 swaps in the 1/4 and 3/4 values.
        let fp = Fp::new(2).unwrap();
        let t = PhaseTable::new(fp, 1, vec![PhaseValue::ZERO, fp.phase(1, 2).unwrap()]).unwrap();
        let d = t.shift_diff(&FpVector::parse("1", fp).unwrap()).unwrap();
        assert_eq!(d.get(0), fp.phase(1, 2).unwrap());
        assert_eq!(d.get(1), fp.phase(3, 2).unwrap());
    }

    #[test]
    fn length_is_validated() {
        let fp = Fp::new(2).unwrap();
        assert!(PhaseTable::new(fp, 2, vec![PhaseValue::ZERO; 3]).is_err());
        assert!(ComplexTable::new(fp, 2, vec![Complex64::new(1.0, 0.0); 5]).is_err());
    }

    #[test]
    fn grid_rejects_oversized_domains() {
        let fp = Fp::new(5).unwrap();
        assert!(Grid::new(fp, 64).is_err());
    }

    #[test]
    fn phase_table_serde_round_trip() {
        let fp = Fp::new(2).unwrap();
        let t = PhaseTable::new(fp, 1, vec![PhaseValue::ZERO, fp.phase(1, 3).unwrap()]).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, r#"{"p":2,"n":1,"values":["0/2^0","1/2^3"]}"#);
        let back: PhaseTable = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        let bad: std::result::Result<PhaseTable, _> =
            serde_json::from_str(r#"{"p":2,"n":1,"values":["0/2^0"]}"#);
        assert!(bad.is_err());
    }
}
