//! Correlation maximization over classical polynomials (exhaustive and
//! sampled), the vanishing-probability experiment for multiaffine forms, and
//! decay curves for the power-sum phase family.
//!
//! Candidates are indexed by base-p digit strings over the monomial basis
//! (non-constant monomials of degree at most d, per-variable exponents below
//! p, ordered by degree then by the little-endian index of the exponent
//! vector). Constant terms are quotiented out: correlation magnitude is
//! invariant under them, so the zero-constant representative stands for the
//! whole class. Over F_2 with at most six variables the sweep packs sign
//! tables into machine words, walks the nonlinear coefficients in Gray-code
//! order, and resolves all linear parts of one candidate at once with a
//! Walsh-Hadamard transform.

use crate::fp::{Fp, FpElem};
use crate::poly::ClassicalPoly;
use crate::quasisym::{make_counterexample, multiaffine_leading_coeff};
use crate::table::{ComplexTable, Grid};
use crate::{Error, Result};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::Serialize;
use std::fmt::Write as _;

/// Candidates per parallel work block.
const BLOCK: u64 = 1024;

/// The non-constant monomials of degree at most `d` with exponents below p,
/// ordered by degree and then by the little-endian index of the exponent
/// vector, so the first `n` entries are x_1, .., x_n in order.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    fp: Fp,
    n: usize,
    exps: Vec<Vec<u8>>,
}

impl MonomialBasis {
    pub fn new(fp: Fp, n: usize, d: u32) -> Result<MonomialBasis> {
        let egrid = Grid::new(fp, n)?;
        let mut keyed: Vec<(u32, usize, Vec<u8>)> = Vec::new();
        for idx in 0..egrid.size() {
            let exps: Vec<u8> = egrid.digits(idx).coords().iter().map(|e| e.val() as u8).collect();
            let degree: u32 = exps.iter().map(|&e| e as u32).sum();
            if degree >= 1 && degree <= d {
                keyed.push((degree, idx, exps));
            }
        }
        keyed.sort();
        Ok(MonomialBasis { fp, n, exps: keyed.into_iter().map(|(_, _, e)| e).collect() })
    }

    pub fn fp(&self) -> Fp {
        self.fp
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of monomials M.
    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exps(&self) -> &[Vec<u8>] {
        &self.exps
    }

    /// p^M, saturating.
    pub fn count(&self) -> u128 {
        (self.fp.p() as u128)
            .checked_pow(self.exps.len() as u32)
            .unwrap_or(u128::MAX)
    }

    fn digits_of(&self, mut idx: u128) -> Vec<FpElem> {
        let p = self.fp.p() as u128;
        self.exps
            .iter()
            .map(|_| {
                let digit = (idx % p) as u64;
                idx /= p;
                self.fp.elem(digit)
            })
            .collect()
    }

    pub fn poly_from_digits(&self, digits: &[FpElem]) -> Result<ClassicalPoly> {
        if digits.len() != self.exps.len() {
            return Err(Error::LengthMismatch { expected: self.exps.len(), got: digits.len() });
        }
        let terms: Vec<(Vec<u8>, FpElem)> = self
            .exps
            .iter()
            .zip(digits)
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, &c)| (e.clone(), c))
            .collect();
        ClassicalPoly::from_terms(self.fp, self.n, terms)
    }

    pub fn poly_for_index(&self, idx: u128) -> Result<ClassicalPoly> {
        if idx >= self.count() {
            return Err(Error::Parse(format!("candidate index {idx} out of range")));
        }
        self.poly_from_digits(&self.digits_of(idx))
    }
}

/// Streams every classical polynomial of degree at most `d` with zero
/// constant term, exactly once, in candidate-index order.
pub fn enumerate_classical(fp: Fp, n: usize, d: u32, budget: u64) -> Result<ClassicalStream> {
    let basis = MonomialBasis::new(fp, n, d)?;
    let count = basis.count();
    if count > budget as u128 {
        return Err(Error::BudgetExceeded { needed: count, budget });
    }
    Ok(ClassicalStream { basis, next: 0, count })
}

#[derive(Debug)]
pub struct ClassicalStream {
    basis: MonomialBasis,
    next: u128,
    count: u128,
}

impl ClassicalStream {
    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }
}

impl Iterator for ClassicalStream {
    type Item = ClassicalPoly;

    fn next(&mut self) -> Option<ClassicalPoly> {
        if self.next >= self.count {
            return None;
        }
        let poly = self.basis.poly_for_index(self.next).expect("index in range");
        self.next += 1;
        Some(poly)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SearchMode {
    Exhaustive,
    Sampled,
    /// Exhaustive when the candidate count fits the budget, sampled beyond.
    Auto,
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub p: u32,
    pub n: usize,
    pub d: u32,
    /// "exhaustive" or "sampled".
    pub mode: &'static str,
    pub best_value: f64,
    pub best_poly: ClassicalPoly,
    /// Candidates evaluated.
    pub candidates: u64,
    /// Present in sampled mode.
    pub seed: Option<u64>,
}

impl Serialize for SearchReport {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("SearchReport", 8)?;
        s.serialize_field("p", &self.p)?;
        s.serialize_field("n", &self.n)?;
        s.serialize_field("d", &self.d)?;
        s.serialize_field("mode", self.mode)?;
        s.serialize_field("best_value", &self.best_value)?;
        s.serialize_field("best_poly", &self.best_poly)?;
        s.serialize_field("candidates", &self.candidates)?;
        s.serialize_field("seed", &self.seed)?;
        s.end()
    }
}

/// (value, candidate index) ordered by value descending, index ascending.
fn better(candidate: (f64, u128), best: (f64, u128)) -> bool {
    candidate.0 > best.0 || (candidate.0 == best.0 && candidate.1 < best.1)
}

/// Maximizes |E f e_p(-Q)| over classical polynomials Q of degree at most
/// `d` without constant term. Exhaustive mode requires the candidate count
/// to fit the budget; sampled mode draws `budget` candidates with
/// independent uniform coefficients, reproducibly from `seed`.
pub fn max_correlation(
    f: &ComplexTable,
    d: u32,
    mode: SearchMode,
    budget: u64,
    seed: u64,
) -> Result<SearchReport> {
    let fp = f.fp();
    let basis = MonomialBasis::new(fp, f.n(), d)?;
    let count = basis.count();
    let exhaustive = match mode {
        SearchMode::Exhaustive => {
            if count > budget as u128 {
                return Err(Error::BudgetExceeded { needed: count, budget });
            }
            true
        }
        SearchMode::Sampled => false,
        SearchMode::Auto => count <= budget as u128,
    };
    if exhaustive {
        let (best_value, best_idx) = if fp.p() == 2 && f.n() <= 6 {
            exhaustive_packed(f, &basis)
        } else {
            exhaustive_generic(f, &basis)
        };
        Ok(SearchReport {
            p: fp.p(),
            n: f.n(),
            d,
            mode: "exhaustive",
            best_value,
            best_poly: basis.poly_for_index(best_idx)?,
            candidates: count as u64,
            seed: None,
        })
    } else {
        if budget == 0 {
            return Err(Error::Parse("sampled search needs at least one candidate".into()));
        }
        let (best_value, best_item) = sampled_max(f, &basis, budget, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(best_item);
        let digits: Vec<FpElem> = basis.exps().iter().map(|_| fp.random_elem(&mut rng)).collect();
        Ok(SearchReport {
            p: fp.p(),
            n: f.n(),
            d,
            mode: "sampled",
            best_value,
            best_poly: basis.poly_from_digits(&digits)?,
            candidates: budget,
            seed: Some(seed),
        })
    }
}

/// e_p(-v) for each residue v.
fn conj_roots(fp: Fp) -> Vec<Complex64> {
    (0..fp.p()).map(|v| fp.ep(fp.neg(fp.elem(v as u64)))).collect()
}

/// Base-p counter sweep: one digit bump adds one monomial table to the
/// running value vector; a digit wrapping past p-1 has then absorbed p
/// copies of its table, which is the identity mod p, so carries need no
/// correction.
fn exhaustive_generic(f: &ComplexTable, basis: &MonomialBasis) -> (f64, u128) {
    let fp = basis.fp();
    let p = fp.p() as u8;
    let grid = Grid::new(fp, basis.n()).expect("table exists at this size");
    let points = grid.size();
    let tables: Vec<Vec<u8>> = basis
        .exps()
        .iter()
        .map(|exps| {
            (0..points)
                .map(|x| {
                    let xs = grid.digits(x);
                    exps.iter()
                        .enumerate()
                        .fold(FpElem::ONE, |acc, (i, &e)| fp.mul(acc, fp.pow(xs.get(i), e as u32)))
                        .val() as u8
                })
                .collect()
        })
        .collect();
    let roots = conj_roots(fp);
    let fv = f.values();
    let total = basis.count() as u64;

    let blocks: Vec<u64> = (0..total.div_ceil(BLOCK)).collect();
    let block_best = |&b: &u64| -> (f64, u128) {
        let start = b * BLOCK;
        let end = (start + BLOCK).min(total);
        let mut digits = vec![0u8; basis.len()];
        let mut cur = vec![0u8; points];
        {
            let mut idx = start as u128;
            for (t, digit) in digits.iter_mut().enumerate() {
                *digit = (idx % p as u128) as u8;
                idx /= p as u128;
                if *digit > 0 {
                    for (c, &tv) in cur.iter_mut().zip(&tables[t]) {
                        *c = (*c + *digit * tv) % p;
                    }
                }
            }
        }
        let mut best = (-1.0f64, 0u128);
        for i in start..end {
            let mut sum = Complex64::new(0.0, 0.0);
            for (x, &q) in cur.iter().enumerate() {
                sum += fv[x] * roots[q as usize];
            }
            let val = sum.norm() / points as f64;
            if better((val, i as u128), best) {
                best = (val, i as u128);
            }
            if i + 1 < end {
                for t in 0..basis.len() {
                    for (c, &tv) in cur.iter_mut().zip(&tables[t]) {
                        let s = *c + tv;
                        *c = if s >= p { s - p } else { s };
                    }
                    digits[t] += 1;
                    if digits[t] == p {
                        digits[t] = 0;
                    } else {
                        break;
                    }
                }
            }
        }
        best
    };
    let results: Vec<(f64, u128)> = blocks.par_iter().map(block_best).collect();
    results
        .into_iter()
        .fold((-1.0, 0), |best, cand| if better(cand, best) { cand } else { best })
}

fn wht(buf: &mut [Complex64]) {
    let n = buf.len();
    let mut len = 1;
    while len < n {
        let mut i = 0;
        while i < n {
            for j in i..i + len {
                let a = buf[j];
                let b = buf[j + len];
                buf[j] = a + b;
                buf[j + len] = a - b;
            }
            i += 2 * len;
        }
        len <<= 1;
    }
}

/// F_2 sweep with sign masks in one machine word: nonlinear coefficient
/// patterns advance in Gray-code order (one mask xor per step) and a
/// Walsh-Hadamard transform scores all 2^n linear completions at once.
fn exhaustive_packed(f: &ComplexTable, basis: &MonomialBasis) -> (f64, u128) {
    let n = basis.n();
    let points = 1usize << n;
    let fv = f.values();
    if basis.is_empty() {
        let sum: Complex64 = fv.iter().sum();
        return (sum.norm() / points as f64, 0);
    }
    let nonlinear: Vec<u64> = basis.exps()[n..]
        .iter()
        .map(|exps| {
            let mask: usize =
                exps.iter().enumerate().filter(|(_, &e)| e == 1).map(|(i, _)| 1usize << i).sum();
            let mut table = 0u64;
            for x in 0..points {
                if x & mask == mask {
                    table |= 1 << x;
                }
            }
            table
        })
        .collect();
    let lin_count = n;
    let nl_total: u64 = 1 << nonlinear.len();

    let blocks: Vec<u64> = (0..nl_total.div_ceil(BLOCK)).collect();
    let block_best = |&b: &u64| -> (f64, u128) {
        let start = b * BLOCK;
        let end = (start + BLOCK).min(nl_total);
        let gray = |j: u64| j ^ (j >> 1);
        let mut mask = 0u64;
        for (s, table) in nonlinear.iter().enumerate() {
            if gray(start) & (1 << s) != 0 {
                mask ^= table;
            }
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); points];
        let mut best = (-1.0f64, 0u128);
        for j in start..end {
            for (x, slot) in buf.iter_mut().enumerate() {
                *slot = if mask >> x & 1 == 1 { -fv[x] } else { fv[x] };
            }
            wht(&mut buf);
            for (a, v) in buf.iter().enumerate() {
                let idx = ((gray(j) as u128) << lin_count) | a as u128;
                if better((v.norm(), idx), best) {
                    best = (v.norm(), idx);
                }
            }
            if j + 1 < end {
                mask ^= nonlinear[(j + 1).trailing_zeros() as usize];
            }
        }
        best
    };
    let results: Vec<(f64, u128)> = blocks.par_iter().map(block_best).collect();
    let (val, idx) = results
        .into_iter()
        .fold((-1.0, 0), |best, cand| if better(cand, best) { cand } else { best });
    (val / points as f64, idx)
}

/// Work item i draws its coefficients from stream i of the seeded generator,
/// so the result is independent of scheduling.
fn sampled_max(f: &ComplexTable, basis: &MonomialBasis, samples: u64, seed: u64) -> (f64, u64) {
    let fp = basis.fp();
    let roots = conj_roots(fp);
    let fv = f.values();
    let blocks: Vec<u64> = (0..samples.div_ceil(BLOCK)).collect();
    let results: Vec<(f64, u64)> = blocks
        .par_iter()
        .map(|&b| {
            let start = b * BLOCK;
            let end = (start + BLOCK).min(samples);
            let mut best = (-1.0f64, 0u64);
            for i in start..end {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i);
                let digits: Vec<FpElem> =
                    basis.exps().iter().map(|_| fp.random_elem(&mut rng)).collect();
                let poly = basis.poly_from_digits(&digits).expect("digit count matches");
                let q = poly.eval_table().expect("basis dimensions are valid");
                let mut sum = Complex64::new(0.0, 0.0);
                for (x, &qv) in q.iter().enumerate() {
                    sum += fv[x] * roots[qv.idx()];
                }
                let val = sum.norm() / fv.len() as f64;
                if val > best.0 || (val == best.0 && i < best.1) {
                    best = (val, i);
                }
            }
            best
        })
        .collect();
    results.into_iter().fold((-1.0, 0), |best, cand| {
        if cand.0 > best.0 || (cand.0 == best.0 && cand.1 < best.1) {
            cand
        } else {
            best
        }
    })
}

/// Vanishing-probability experiment for a multiaffine form.
#[derive(Clone, Debug, Serialize)]
pub struct ZeroProbReport {
    pub p: u32,
    pub r: usize,
    pub mode: &'static str,
    /// Fraction of assignments on which the form vanished.
    pub probability: f64,
    pub zeros: u64,
    pub total: u64,
    /// 1 - (1 - 1/p)^r; exact exhaustive probabilities never exceed it when
    /// the leading coefficient is nonzero.
    pub bound: f64,
    /// Binomial standard error, sampled mode only.
    pub std_error: Option<f64>,
    pub seed: Option<u64>,
}

/// Measures Pr(L = 0) for a multiaffine `L` in `r` variables. The oracle is
/// first spot-checked for multiaffinity and must have a nonzero leading
/// coefficient; exhaustive mode enumerates every assignment, sampled mode
/// draws `samples` of them.
pub fn zero_prob_experiment(
    fp: Fp,
    r: usize,
    mut oracle: impl FnMut(&[FpElem]) -> FpElem,
    mode: SearchMode,
    samples: u64,
    seed: u64,
) -> Result<ZeroProbReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lead = multiaffine_leading_coeff(fp, r, &mut oracle, &mut rng)?;
    if lead.is_zero() {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let bound = 1.0 - (1.0 - 1.0 / fp.p() as f64).powi(r as i32);
    let exhaustive = match mode {
        SearchMode::Exhaustive => true,
        SearchMode::Sampled => false,
        SearchMode::Auto => {
            (fp.p() as u64).checked_pow(r as u32).is_some_and(|total| total <= samples)
        }
    };
    if exhaustive {
        let grid = Grid::new(fp, r)?;
        let mut zeros = 0u64;
        for idx in 0..grid.size() {
            if oracle(grid.digits(idx).coords()).is_zero() {
                zeros += 1;
            }
        }
        let total = grid.size() as u64;
        Ok(ZeroProbReport {
            p: fp.p(),
            r,
            mode: "exhaustive",
            probability: zeros as f64 / total as f64,
            zeros,
            total,
            bound,
            std_error: None,
            seed: None,
        })
    } else {
        if samples == 0 {
            return Err(Error::Parse("sampled experiment needs at least one sample".into()));
        }
        let mut zeros = 0u64;
        let mut point = vec![FpElem::ZERO; r];
        for _ in 0..samples {
            for c in point.iter_mut() {
                *c = fp.random_elem(&mut rng);
            }
            if oracle(&point).is_zero() {
                zeros += 1;
            }
        }
        let phat = zeros as f64 / samples as f64;
        Ok(ZeroProbReport {
            p: fp.p(),
            r,
            mode: "sampled",
            probability: phat,
            zeros,
            total: samples,
            bound,
            std_error: Some((phat * (1.0 - phat) / samples as f64).sqrt()),
            seed: Some(seed),
        })
    }
}

/// Best classical correlation of the power-sum phase family member against
/// degree-(k-1) polynomials, per dimension.
#[derive(Clone, Debug, Serialize)]
pub struct DecayCurve {
    pub p: u32,
    pub k: u32,
    pub d: u32,
    /// k = p + 1: the last order with a guaranteed classical correlate, so
    /// no decay is claimed for these rows.
    pub boundary: bool,
    pub rows: Vec<SearchReport>,
}

impl DecayCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,p,k,d,mode,best_value,candidates,seed\n");
        for row in &self.rows {
            let seed = row.seed.map(|s| s.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                row.n, self.p, self.k, self.d, row.mode, row.best_value, row.candidates, seed
            )
            .expect("writing to a string cannot fail");
        }
        out
    }
}

/// Sweeps `max_correlation` of e(f_n) for the degree-(k-1) power-sum phase
/// across the given dimensions: exhaustive where the budget permits, sampled
/// with `budget` draws beyond.
pub fn decay_curve(
    fp: Fp,
    k: u32,
    ns: impl IntoIterator<Item = usize>,
    budget: u64,
    seed: u64,
) -> Result<DecayCurve> {
    let mut rows = Vec::new();
    let mut boundary = false;
    for n in ns {
        let family = make_counterexample(fp, k, n)?;
        boundary = family.boundary;
        let f = family.poly.eval_table()?.to_complex();
        rows.push(max_correlation(&f, k - 1, SearchMode::Auto, budget, seed)?);
    }
    Ok(DecayCurve { p: fp.p(), k, d: k - 1, boundary, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::NonClassicalPoly;
    use crate::quasisym::decompose_degree;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn fp2() -> Fp {
        Fp::new(2).unwrap()
    }

    fn fp3() -> Fp {
        Fp::new(3).unwrap()
    }

    fn family_phase(fp: Fp, k: u32, n: usize) -> ComplexTable {
        make_counterexample(fp, k, n).unwrap().poly.eval_table().unwrap().to_complex()
    }

    #[test]
    fn basis_counts_match_binomial_sums() {
        assert_eq!(MonomialBasis::new(fp2(), 2, 1).unwrap().len(), 2);
        assert_eq!(MonomialBasis::new(fp2(), 4, 3).unwrap().len(), 14);
        assert_eq!(MonomialBasis::new(fp3(), 1, 2).unwrap().len(), 2);
        assert_eq!(MonomialBasis::new(fp2(), 2, 1).unwrap().count(), 4);
        assert_eq!(MonomialBasis::new(fp3(), 1, 2).unwrap().count(), 9);
    }

    #[test]
    fn basis_orders_linear_monomials_first_in_variable_order() {
        let basis = MonomialBasis::new(fp2(), 3, 2).unwrap();
        assert_eq!(basis.exps()[0], vec![1, 0, 0]);
        assert_eq!(basis.exps()[1], vec![0, 1, 0]);
        assert_eq!(basis.exps()[2], vec![0, 0, 1]);
        assert!(basis.exps()[3..].iter().all(|e| e.iter().map(|&v| v as u32).sum::<u32>() == 2));
    }

    #[test]
    fn enumeration_is_exact_and_budgeted() {
        let polys: Vec<ClassicalPoly> = enumerate_classical(fp2(), 2, 1, 10).unwrap().collect();
        assert_eq!(polys.len(), 4);
        assert!(polys[0].is_zero());
        assert_eq!(polys[1].coeff(&[1, 0]).val(), 1);
        assert_eq!(polys[2].coeff(&[0, 1]).val(), 1);
        assert_eq!(polys[3].terms().count(), 2);

        match enumerate_classical(fp2(), 4, 3, 100) {
            Err(Error::BudgetExceeded { needed, budget }) => {
                assert_eq!(needed, 1 << 14);
                assert_eq!(budget, 100);
            }
            other => panic!("expected a budget error, got {other:?}"),
        }
    }

    #[test]
    fn single_variable_cubic_sweep_hits_the_cosine() {
        let f = family_phase(fp2(), 4, 1);
        let r = max_correlation(&f, 3, SearchMode::Exhaustive, 1 << 20, 0).unwrap();
        assert_eq!(r.mode, "exhaustive");
        assert_eq!(r.candidates, 2);
        assert!(r.best_poly.is_zero());
        assert_abs_diff_eq!(r.best_value, (PI / 8.0).cos(), epsilon = 1e-12);
    }

    #[test]
    fn planted_classical_phase_is_found_exactly() {
        for fp in [fp2(), fp3()] {
            let q = ClassicalPoly::from_terms(
                fp,
                2,
                vec![(vec![1, 1], FpElem::ONE), (vec![0, 1], FpElem::ONE)],
            )
            .unwrap();
            let f = q.phase_table().unwrap().to_complex();
            let r = max_correlation(&f, 2, SearchMode::Exhaustive, 1 << 20, 0).unwrap();
            assert_eq!(r.best_value, 1.0);
            assert_eq!(r.best_poly, q);
        }
    }

    #[test]
    fn packed_sweep_matches_streamed_oracle() {
        let f = family_phase(fp2(), 4, 2);
        let r = max_correlation(&f, 3, SearchMode::Exhaustive, 1 << 20, 0).unwrap();

        let mut oracle_best = -1.0f64;
        for q in enumerate_classical(fp2(), 2, 3, 1 << 20).unwrap() {
            let qt = q.phase_table().unwrap().to_complex();
            let corr = crate::gowers::inner_product(&f, &qt).unwrap().norm();
            oracle_best = oracle_best.max(corr);
        }
        assert_abs_diff_eq!(r.best_value, oracle_best, epsilon = 1e-12);
        let expected = (PI / 8.0).cos().powi(2);
        assert_abs_diff_eq!(r.best_value, expected, epsilon = 1e-9);
    }

    #[test]
    fn generic_sweep_agrees_with_packed_on_shared_ground() {
        let f = family_phase(fp2(), 4, 2);
        let basis = MonomialBasis::new(fp2(), 2, 3).unwrap();
        let packed = exhaustive_packed(&f, &basis);
        let generic = exhaustive_generic(&f, &basis);
        assert_abs_diff_eq!(packed.0, generic.0, epsilon = 1e-12);
        assert_eq!(packed.1, generic.1);
    }

    #[test]
    fn generic_sweep_handles_odd_primes() {
        let fp = fp3();
        let q = ClassicalPoly::from_terms(fp, 2, vec![(vec![2, 1], fp.elem(2))]).unwrap();
        let f = q.phase_table().unwrap().to_complex();
        let r = max_correlation(&f, 3, SearchMode::Exhaustive, 1 << 24, 0).unwrap();
        assert_eq!(r.best_value, 1.0);
        assert_eq!(r.best_poly, q);
    }

    #[test]
    fn sampled_never_beats_exhaustive_and_is_reproducible() {
        let f = family_phase(fp3(), 5, 1);
        let exact = max_correlation(&f, 4, SearchMode::Exhaustive, 1 << 24, 0).unwrap();
        let sampled = max_correlation(&f, 4, SearchMode::Sampled, 500, 42).unwrap();
        assert!(sampled.best_value <= exact.best_value + 1e-12);
        assert_eq!(sampled.seed, Some(42));
        assert_eq!(sampled.candidates, 500);

        let again = max_correlation(&f, 4, SearchMode::Sampled, 500, 42).unwrap();
        assert_eq!(sampled.best_value.to_bits(), again.best_value.to_bits());
        assert_eq!(sampled.best_poly, again.best_poly);
    }

    #[test]
    fn auto_mode_falls_back_to_sampling() {
        let f = family_phase(fp2(), 4, 3);
        let r = max_correlation(&f, 3, SearchMode::Auto, 50, 7).unwrap();
        assert_eq!(r.mode, "sampled");
        let r = max_correlation(&f, 3, SearchMode::Auto, 1 << 20, 7).unwrap();
        assert_eq!(r.mode, "exhaustive");
    }

    #[test]
    fn zero_probabilities_match_closed_forms() {
        let fp = fp2();
        let r = zero_prob_experiment(fp, 1, |x| x[0], SearchMode::Exhaustive, 0, 0).unwrap();
        assert_eq!(r.probability, 0.5);
        assert_eq!(r.bound, 0.5);

        let product = |x: &[FpElem]| fp2().mul(x[0], x[1]);
        let r = zero_prob_experiment(fp, 2, product, SearchMode::Exhaustive, 0, 0).unwrap();
        assert_eq!((r.zeros, r.total), (3, 4));
        assert_eq!(r.probability, r.bound);

        let r = zero_prob_experiment(fp3(), 1, |x| x[0], SearchMode::Exhaustive, 0, 0).unwrap();
        assert_abs_diff_eq!(r.probability, 1.0 / 3.0, epsilon = 1e-15);
        assert!(r.probability <= r.bound + 1e-15);
    }

    #[test]
    fn degenerate_leading_coefficient_is_rejected() {
        let r = zero_prob_experiment(fp2(), 2, |x| x[0], SearchMode::Exhaustive, 0, 0);
        assert!(matches!(r, Err(Error::ZeroLeadingCoefficient)));
    }

    #[test]
    fn sampled_probability_reports_standard_error() {
        let product = |x: &[FpElem]| fp2().mul(x[0], x[1]);
        let r = zero_prob_experiment(fp2(), 2, product, SearchMode::Sampled, 2000, 11).unwrap();
        let se = r.std_error.unwrap();
        assert!((r.probability - 0.75).abs() < 5.0 * se + 1e-9);
    }

    #[test]
    fn decay_curve_is_monotone_for_exhaustive_rows() {
        let curve = decay_curve(fp2(), 4, 1..=3, 1 << 20, 0).unwrap();
        assert!(!curve.boundary);
        assert_eq!(curve.rows.len(), 3);
        assert_abs_diff_eq!(curve.rows[0].best_value, (PI / 8.0).cos(), epsilon = 1e-9);
        assert_abs_diff_eq!(curve.rows[1].best_value, (PI / 8.0).cos().powi(2), epsilon = 1e-9);
        for w in curve.rows.windows(2) {
            assert!(w[1].best_value <= w[0].best_value + 1e-9);
        }
    }

    #[test]
    fn decay_curve_gates_and_flags_the_boundary() {
        assert!(decay_curve(fp2(), 2, 1..=1, 1 << 10, 0).is_err());
        let curve = decay_curve(fp2(), 3, 1..=2, 1 << 10, 0).unwrap();
        assert!(curve.boundary);
    }

    #[test]
    fn csv_round_trip_shape() {
        let curve = decay_curve(fp2(), 4, 1..=2, 1 << 16, 0).unwrap();
        let csv = curve.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,p,k,d,mode,best_value,candidates,seed");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("1,2,4,3,exhaustive,"));
    }

    #[test]
    fn control_row_with_classical_phase_is_one() {
        let fp = fp2();
        let q = ClassicalPoly::from_terms(fp, 3, vec![(vec![1, 1, 1], FpElem::ONE)]).unwrap();
        let f = q.phase_table().unwrap().to_complex();
        let r = max_correlation(&f, 3, SearchMode::Exhaustive, 1 << 20, 0).unwrap();
        assert_eq!(r.best_value, 1.0);
    }

    #[test]
    fn deep_phase_in_one_variable_prefers_zero() {
        // the depth-2 quadratic phase at p=3: no classical quadratic does
        // better than the trivial candidate, mirroring the p=2 cosine case
        let fp = fp3();
        let split = decompose_degree(4, fp).unwrap();
        let p = crate::quasisym::power_sum_phase(fp, 1, split).unwrap();
        let f = p.eval_table().unwrap().to_complex();
        let r = max_correlation(&f, 4, SearchMode::Exhaustive, 1 << 24, 0).unwrap();
        let direct: Complex64 = f.values().iter().sum::<Complex64>() / 3.0;
        assert!(r.best_value >= direct.norm() - 1e-12);
        let nc = NonClassicalPoly::from_terms(
            fp,
            1,
            crate::phase::PhaseValue::ZERO,
            vec![(crate::poly::Monomial::new(vec![split.r], split.ell), FpElem::ONE)],
        )
        .unwrap();
        assert_eq!(nc, p);
    }
}
