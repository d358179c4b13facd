//! Polynomial phase functions `F_p^n -> R/Z` and their canonical forms.
//!
//! Every phase polynomial has a unique representation
//!
//! ```text
//! P(x) = alpha + sum c(e, j) |x_1|^{e_1} .. |x_n|^{e_n} / p^{j+1}   (mod 1)
//! ```
//!
//! with exponents below `p`, coefficients in `{1, .., p-1}` and the products
//! taken over the integers. The term `(e, j)` has degree `|e| + j(p-1)`;
//! classical polynomials are exactly the ones with all `j = 0`. This module
//! recovers the representation from value tables (layer peeling), evaluates
//! it, differentiates it, and pushes it through linear substitutions.

use crate::fp::{Fp, FpElem, FpMatrix, FpVector};
use crate::phase::PhaseValue;
use crate::table::{Grid, PhaseTable};
use crate::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Exponent pattern `|x|^e / p^{j+1}` of a canonical term.
///
/// Ordering is lexicographic on the exponents, then on `j`; term lists are
/// kept in this order everywhere, including serialized output.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Monomial {
    exps: Vec<u8>,
    j: u32,
}

impl Monomial {
    pub fn new(exps: Vec<u8>, j: u32) -> Monomial {
        Monomial { exps, j }
    }

    pub fn exps(&self) -> &[u8] {
        &self.exps
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    /// `|e| + j(p-1)`.
    pub fn degree(&self, fp: Fp) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum::<u32>() + self.j * (fp.p() - 1)
    }

    fn validate(&self, fp: Fp, n: usize) -> Result<()> {
        if self.exps.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.exps.len() });
        }
        for &e in &self.exps {
            if e as u32 >= fp.p() {
                return Err(Error::ExponentRange { exp: e as u32, p: fp.p() });
            }
        }
        if self.exps.iter().all(|&e| e == 0) {
            return Err(Error::InvalidComposition("constant terms belong in alpha, not in the term list".into()));
        }
        if self.j + 1 > fp.max_depth() {
            return Err(Error::DepthExceeded { depth: self.j + 1, max: fp.max_depth() });
        }
        Ok(())
    }
}

/// A phase polynomial in canonical form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NonClassicalPoly {
    fp: Fp,
    n: usize,
    alpha: PhaseValue,
    terms: BTreeMap<Monomial, FpElem>,
}

impl NonClassicalPoly {
    pub fn zero(fp: Fp, n: usize) -> NonClassicalPoly {
        NonClassicalPoly { fp, n, alpha: PhaseValue::ZERO, terms: BTreeMap::new() }
    }

    pub fn constant(fp: Fp, n: usize, alpha: PhaseValue) -> NonClassicalPoly {
        NonClassicalPoly { fp, n, alpha, terms: BTreeMap::new() }
    }

    pub fn from_terms(
        fp: Fp,
        n: usize,
        alpha: PhaseValue,
        terms: impl IntoIterator<Item = (Monomial, FpElem)>,
    ) -> Result<NonClassicalPoly> {
        let mut map = BTreeMap::new();
        for (m, c) in terms {
            m.validate(fp, n)?;
            if c.is_zero() || c.val() as u32 >= fp.p() {
                return Err(Error::ZeroCoefficient { p: fp.p() });
            }
            if map.insert(m, c).is_some() {
                return Err(Error::InvalidComposition("duplicate canonical term".into()));
            }
        }
        Ok(NonClassicalPoly { fp, n, alpha, terms: map })
    }

    pub fn fp(&self) -> Fp {
        self.fp
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> PhaseValue {
        self.alpha
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, FpElem)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.alpha.is_zero()
    }

    /// Degree (0 for constants) and depth (`1 + max j`, 0 for constants).
    pub fn degree_and_depth(&self) -> (u32, u32) {
        let degree = self.terms.keys().map(|m| m.degree(self.fp)).max().unwrap_or(0);
        let depth = self.terms.keys().map(|m| m.j + 1).max().unwrap_or(0);
        (degree, depth)
    }

    pub fn degree(&self) -> u32 {
        self.degree_and_depth().0
    }

    pub fn depth(&self) -> u32 {
        self.degree_and_depth().1
    }

    /// True exactly when the function is a classical polynomial plus a
    /// constant, i.e. all terms live in the first depth layer.
    pub fn is_classical_plus_constant(&self) -> bool {
        self.terms.keys().all(|m| m.j == 0)
    }

    /// The terms of one depth layer as a classical polynomial (no constant).
    pub fn depth_layer(&self, j: u32) -> ClassicalPoly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.j == j)
            .map(|(m, c)| (m.exps.clone(), *c));
        ClassicalPoly::from_terms(self.fp, self.n, terms).expect("layer terms are valid")
    }

    pub fn eval(&self, x: &FpVector) -> Result<PhaseValue> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.dim() });
        }
        let fp = self.fp;
        let mut acc = self.alpha;
        for (m, c) in &self.terms {
            let modulus = fp.pow_depth(m.j + 1);
            let mut prod: u64 = c.val() as u64;
            for (i, &e) in m.exps.iter().enumerate() {
                prod = mul_mod(prod, pow_mod(x.get(i).val() as u64, e as u32, modulus), modulus);
            }
            acc = fp.phase_add(acc, fp.phase(prod, m.j + 1)?);
        }
        Ok(acc)
    }

    /// Dense value table, evaluated one depth layer at a time (each layer is
    /// a coefficient tensor pushed through an axis-wise Vandermonde pass).
    pub fn eval_table(&self) -> Result<PhaseTable> {
        let fp = self.fp;
        let grid = Grid::new(fp, self.n)?;
        let mut acc = vec![PhaseValue::ZERO; grid.size()];
        let mut layers: BTreeMap<u32, Vec<u64>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let tensor = layers.entry(m.j).or_insert_with(|| vec![0; grid.size()]);
            let eidx = exps_index(fp, &m.exps);
            tensor[eidx] = c.val() as u64;
        }
        for (j, tensor) in layers {
            let modulus = fp.pow_depth(j + 1);
            let vals = eval_tensor_mod(grid, &tensor, modulus);
            for (a, v) in acc.iter_mut().zip(vals) {
                *a = fp.phase_add(*a, fp.phase(v, j + 1)?);
            }
        }
        if !self.alpha.is_zero() {
            for a in acc.iter_mut() {
                *a = fp.phase_add(*a, self.alpha);
            }
        }
        PhaseTable::new(fp, self.n, acc)
    }

    /// Recovers the canonical form of an arbitrary exact value table by
    /// peeling depth layers from the deepest one up: the residue of the
    /// numerators mod `p` is a classical function, which is interpolated,
    /// subtracted (with integer products), and divided out.
    pub fn canonicalize(table: &PhaseTable) -> Result<NonClassicalPoly> {
        let fp = table.fp();
        let n = table.n();
        let grid = table.grid();
        let dmax = table.max_depth();
        let mut alpha = PhaseValue::ZERO;
        let mut terms = BTreeMap::new();
        let mut nums: Vec<u64> = table
            .values()
            .iter()
            .map(|v| v.numerator() * fp.pow_depth(dmax - v.depth()))
            .collect();
        for layer in (1..=dmax).rev() {
            let modulus = fp.pow_depth(layer);
            let residues: Vec<FpElem> = nums.iter().map(|&v| fp.elem(v)).collect();
            let coeffs = interpolate_tensor(grid, &residues);
            if !coeffs[0].is_zero() {
                alpha = fp.phase_add(alpha, fp.phase(coeffs[0].val() as u64, layer)?);
            }
            for (eidx, &c) in coeffs.iter().enumerate().skip(1) {
                if !c.is_zero() {
                    let exps = grid.digits(eidx).coords().iter().map(|d| d.val()).collect();
                    terms.insert(Monomial { exps, j: layer - 1 }, c);
                }
            }
            let tensor: Vec<u64> = coeffs.iter().map(|c| c.val() as u64).collect();
            let layer_vals = eval_tensor_mod(grid, &tensor, modulus);
            for (v, lv) in nums.iter_mut().zip(layer_vals) {
                let rem = (*v + modulus - lv) % modulus;
                if rem % fp.p() as u64 != 0 {
                    return Err(Error::Internal("layer residue not divisible by p".into()));
                }
                *v = rem / fp.p() as u64;
            }
        }
        if nums.iter().any(|&v| v != 0) {
            return Err(Error::Internal("nonzero residue after peeling all layers".into()));
        }
        Ok(NonClassicalPoly { fp, n, alpha, terms })
    }

    /// Additive derivative `x -> P(x + h) - P(x)`, recanonicalized. The
    /// strict degree drop is checked, not assumed.
    pub fn derivative(&self, h: &FpVector) -> Result<NonClassicalPoly> {
        let diff = self.eval_table()?.shift_diff(h)?;
        let out = NonClassicalPoly::canonicalize(&diff)?;
        if self.degree() >= 1 && out.degree() >= self.degree() {
            return Err(Error::Internal(format!(
                "derivative degree {} did not drop below {}",
                out.degree(),
                self.degree()
            )));
        }
        Ok(out)
    }

    /// `x -> P(Mx)`, computed on the value table and recanonicalized.
    pub fn compose_linear(&self, m: &FpMatrix) -> Result<NonClassicalPoly> {
        if m.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: m.dim() });
        }
        let table = self.eval_table()?;
        let grid = table.grid();
        let values = (0..grid.size())
            .map(|idx| {
                let mapped = m.mul_vec(self.fp, &grid.digits(idx))?;
                Ok(table.get(grid.index(&mapped)?))
            })
            .collect::<Result<Vec<_>>>()?;
        NonClassicalPoly::canonicalize(&PhaseTable::new(self.fp, self.n, values)?)
    }

    /// Random canonical polynomial with the given degree and depth bounds;
    /// drawn monomial by monomial, so the result is canonical by design.
    pub fn random<R: Rng + ?Sized>(
        fp: Fp,
        n: usize,
        max_degree: u32,
        max_depth: u32,
        rng: &mut R,
    ) -> Result<NonClassicalPoly> {
        let grid = Grid::new(fp, n)?;
        let mut candidates = Vec::new();
        for j in 0..max_depth.min(fp.max_depth() - 1) {
            for eidx in 1..grid.size() {
                let exps: Vec<u8> = grid.digits(eidx).coords().iter().map(|d| d.val()).collect();
                let m = Monomial { exps, j };
                if m.degree(fp) <= max_degree {
                    candidates.push(m);
                }
            }
        }
        let keep = (candidates.len().min(6).max(1)) as f64 / candidates.len().max(1) as f64;
        let mut terms = BTreeMap::new();
        for m in candidates {
            if rng.random_bool(keep) {
                let c = fp.elem(rng.random_range(1..fp.p()) as u64);
                terms.insert(m, c);
            }
        }
        let adepth = rng.random_range(0..=max_depth.min(fp.max_depth()));
        let alpha = fp.phase(rng.random_range(0..fp.pow_depth(adepth)), adepth)?;
        Ok(NonClassicalPoly { fp, n, alpha, terms })
    }
}

/// A polynomial `F_p^n -> F_p` with per-variable exponents below `p`
/// (every such function has exactly one such representation).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClassicalPoly {
    fp: Fp,
    n: usize,
    terms: BTreeMap<Vec<u8>, FpElem>,
}

impl ClassicalPoly {
    pub fn zero(fp: Fp, n: usize) -> ClassicalPoly {
        ClassicalPoly { fp, n, terms: BTreeMap::new() }
    }

    /// Sums duplicate exponent patterns mod `p` and drops zeros.
    pub fn from_terms(
        fp: Fp,
        n: usize,
        terms: impl IntoIterator<Item = (Vec<u8>, FpElem)>,
    ) -> Result<ClassicalPoly> {
        let mut map: BTreeMap<Vec<u8>, FpElem> = BTreeMap::new();
        for (exps, c) in terms {
            if exps.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: exps.len() });
            }
            for &e in &exps {
                if e as u32 >= fp.p() {
                    return Err(Error::ExponentRange { exp: e as u32, p: fp.p() });
                }
            }
            let entry = map.entry(exps).or_insert(FpElem::ZERO);
            *entry = fp.add(*entry, c);
        }
        map.retain(|_, c| !c.is_zero());
        Ok(ClassicalPoly { fp, n, terms: map })
    }

    pub fn fp(&self) -> Fp {
        self.fp
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, FpElem)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn coeff(&self, exps: &[u8]) -> FpElem {
        self.terms.get(exps).copied().unwrap_or(FpElem::ZERO)
    }

    pub fn constant_term(&self) -> FpElem {
        self.coeff(&vec![0; self.n])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().map(|&v| v as u32).sum()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &ClassicalPoly) -> Result<ClassicalPoly> {
        if other.n != self.n || other.fp != self.fp {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        ClassicalPoly::from_terms(
            self.fp,
            self.n,
            self.terms().map(|(e, c)| (e.clone(), c)).chain(other.terms().map(|(e, c)| (e.clone(), c))),
        )
    }

    pub fn scale(&self, c: FpElem) -> ClassicalPoly {
        let fp = self.fp;
        ClassicalPoly::from_terms(fp, self.n, self.terms().map(|(e, k)| (e.clone(), fp.mul(k, c))))
            .expect("scaling keeps terms valid")
    }

    pub fn neg(&self) -> ClassicalPoly {
        self.scale(self.fp.elem_i(-1))
    }

    pub fn eval(&self, x: &FpVector) -> Result<FpElem> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.dim() });
        }
        let fp = self.fp;
        let mut acc = FpElem::ZERO;
        for (exps, c) in &self.terms {
            let mut prod = *c;
            for (i, &e) in exps.iter().enumerate() {
                prod = fp.mul(prod, fp.pow(x.get(i), e as u32));
            }
            acc = fp.add(acc, prod);
        }
        Ok(acc)
    }

    /// Dense table of values in index order.
    pub fn eval_table(&self) -> Result<Vec<FpElem>> {
        let fp = self.fp;
        let grid = Grid::new(fp, self.n)?;
        let mut tensor = vec![0u64; grid.size()];
        for (exps, c) in &self.terms {
            tensor[exps_index(fp, exps)] = c.val() as u64;
        }
        Ok(eval_tensor_mod(grid, &tensor, fp.p() as u64).into_iter().map(|v| fp.elem(v)).collect())
    }

    /// The unique classical polynomial matching a full value table.
    pub fn interpolate(fp: Fp, n: usize, values: &[FpElem]) -> Result<ClassicalPoly> {
        let grid = Grid::new(fp, n)?;
        if values.len() != grid.size() {
            return Err(Error::TableLength { expected: grid.size(), got: values.len() });
        }
        let coeffs = interpolate_tensor(grid, values);
        let terms = coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(eidx, &c)| {
            let exps: Vec<u8> = grid.digits(eidx).coords().iter().map(|d| d.val()).collect();
            (exps, c)
        });
        ClassicalPoly::from_terms(fp, n, terms)
    }

    pub fn compose_linear(&self, m: &FpMatrix) -> Result<ClassicalPoly> {
        if m.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: m.dim() });
        }
        let fp = self.fp;
        let grid = Grid::new(fp, self.n)?;
        let table = self.eval_table()?;
        let values = (0..grid.size())
            .map(|idx| {
                let mapped = m.mul_vec(fp, &grid.digits(idx))?;
                Ok(table[grid.index(&mapped)?])
            })
            .collect::<Result<Vec<_>>>()?;
        ClassicalPoly::interpolate(fp, self.n, &values)
    }

    /// Embeds into phase polynomials via `a -> |a|/p`.
    pub fn to_phase_poly(&self) -> NonClassicalPoly {
        let fp = self.fp;
        let alpha = fp.phase_from_elem(self.constant_term());
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.iter().any(|&v| v != 0))
            .map(|(e, c)| (Monomial { exps: e.clone(), j: 0 }, *c))
            .collect();
        NonClassicalPoly { fp: self.fp, n: self.n, alpha, terms }
    }

    /// Exact phase table of `x -> |Q(x)|/p`.
    pub fn phase_table(&self) -> Result<PhaseTable> {
        let fp = self.fp;
        let values = self.eval_table()?.into_iter().map(|v| fp.phase_from_elem(v)).collect();
        PhaseTable::new(fp, self.n, values)
    }

    /// Downcast from a phase polynomial; requires every term in the first
    /// depth layer and a depth `<= 1` constant.
    pub fn try_from_phase_poly(p: &NonClassicalPoly) -> Result<ClassicalPoly> {
        if !p.is_classical_plus_constant() {
            return Err(Error::NotClassical("a term has depth index j >= 1".into()));
        }
        let constant = p.fp.elem_from_phase(p.alpha).map_err(|_| {
            Error::NotClassical(format!("constant {} has depth > 1", p.fp.phase_string(p.alpha)))
        })?;
        let mut terms: BTreeMap<Vec<u8>, FpElem> =
            p.terms.iter().map(|(m, c)| (m.exps.clone(), *c)).collect();
        if !constant.is_zero() {
            terms.insert(vec![0; p.n], constant);
        }
        Ok(ClassicalPoly { fp: p.fp, n: p.n, terms })
    }
}

/// Index of an exponent pattern in tensor order (same radix as points).
fn exps_index(fp: Fp, exps: &[u8]) -> usize {
    let p = fp.p() as usize;
    exps.iter().rev().fold(0, |acc, &e| acc * p + e as usize)
}

fn pow_mod(base: u64, exp: u32, modulus: u64) -> u64 {
    (0..exp).fold(1u64, |acc, _| mul_mod(acc, base, modulus))
}

fn mul_mod(a: u64, b: u64, modulus: u64) -> u64 {
    ((a as u128 * b as u128) % modulus as u128) as u64
}

/// Multipoint evaluation of a coefficient tensor over `Z/modulus`: one
/// Vandermonde pass per axis, with the points `0..p` taken as integers.
fn eval_tensor_mod(grid: Grid, tensor: &[u64], modulus: u64) -> Vec<u64> {
    let p = grid.fp().p() as usize;
    let mut pows = vec![0u64; p * p];
    for t in 0..p {
        for e in 0..p {
            pows[t * p + e] = pow_mod(t as u64, e as u32, modulus);
        }
    }
    let mut vals = tensor.to_vec();
    let mut fiber = vec![0u64; p];
    for axis in 0..grid.n() {
        let stride = (grid.fp().p() as usize).pow(axis as u32);
        let block = stride * p;
        for start in (0..vals.len()).step_by(block) {
            for off in 0..stride {
                let base = start + off;
                for (t, f) in fiber.iter_mut().enumerate() {
                    let mut acc: u128 = 0;
                    for e in 0..p {
                        acc += vals[base + e * stride] as u128 * pows[t * p + e] as u128;
                    }
                    *f = (acc % modulus as u128) as u64;
                }
                for t in 0..p {
                    vals[base + t * stride] = fiber[t];
                }
            }
        }
    }
    vals
}

/// Inverse of [`eval_tensor_mod`] at `modulus = p`: values to coefficients.
fn interpolate_tensor(grid: Grid, values: &[FpElem]) -> Vec<FpElem> {
    let fp = grid.fp();
    let p = fp.p() as usize;
    let vand = FpMatrix::from_row_major(
        p,
        (0..p * p).map(|i| fp.pow(fp.elem((i / p) as u64), (i % p) as u32)).collect(),
    )
    .expect("square by construction");
    let vinv = vand.inverse(fp).expect("Vandermonde over distinct points is invertible");
    let mut coeffs = values.to_vec();
    let mut fiber = vec![FpElem::ZERO; p];
    for axis in 0..grid.n() {
        let stride = p.pow(axis as u32);
        let block = stride * p;
        for start in (0..coeffs.len()).step_by(block) {
            for off in 0..stride {
                let base = start + off;
                for (e, f) in fiber.iter_mut().enumerate() {
                    let mut acc = FpElem::ZERO;
                    for t in 0..p {
                        acc = fp.add(acc, fp.mul(vinv.get(e, t), coeffs[base + t * stride]));
                    }
                    *f = acc;
                }
                for e in 0..p {
                    coeffs[base + e * stride] = fiber[e];
                }
            }
        }
    }
    coeffs
}

#[derive(Serialize, Deserialize)]
struct TermDto {
    exps: Vec<u8>,
    j: u32,
    coeff: u8,
}

#[derive(Serialize, Deserialize)]
struct PolyDto {
    p: u32,
    n: usize,
    alpha: String,
    terms: Vec<TermDto>,
}

impl Serialize for NonClassicalPoly {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PolyDto {
            p: self.fp.p(),
            n: self.n,
            alpha: self.fp.phase_string(self.alpha),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermDto { exps: m.exps.clone(), j: m.j, coeff: c.val() })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NonClassicalPoly {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let dto = PolyDto::deserialize(deserializer)?;
        let fp = Fp::new(dto.p).map_err(serde::de::Error::custom)?;
        let alpha = fp.phase_parse(&dto.alpha).map_err(serde::de::Error::custom)?;
        let terms = dto
            .terms
            .into_iter()
            .map(|t| Ok((Monomial::new(t.exps, t.j), fp.check(t.coeff as u64)?)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        NonClassicalPoly::from_terms(fp, dto.n, alpha, terms).map_err(serde::de::Error::custom)
    }
}

impl Serialize for ClassicalPoly {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_phase_poly().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ClassicalPoly {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let p = NonClassicalPoly::deserialize(deserializer)?;
        ClassicalPoly::try_from_phase_poly(&p).map_err(serde::de::Error::custom)
    }
}
