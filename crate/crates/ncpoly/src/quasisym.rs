//! Power-sum phase families, quasisymmetric polynomials, and the closed
//! forms of their iterated derivatives.
//!
//! The power-sum phase of degree `d = r + (p-1)l` is
//! `sum_i |x_i|^r / p^(l+1)`; members with `l >= 1` are the family whose
//! order-`(d+1)` uniformity norm is one while (for `d + 1 >= p + 2`)
//! correlation with every classical polynomial decays. Differentiating the
//! family `d` times yields a constant whose closed form is implemented here,
//! together with the matching forms for the elementary quasisymmetric
//! polynomials `Q_a`, their vector versions obtained by pairing, and the
//! column-slice leading-coefficient extraction the decay argument rests on.

use crate::fp::{Fp, FpElem, FpVector};
use crate::phase::PhaseValue;
use crate::poly::{ClassicalPoly, Monomial, NonClassicalPoly};
use crate::table::Grid;
use crate::{Error, Result};
use rand::Rng;
use serde::Serialize;
use std::fmt;

/// A tuple `(a_1, .., a_s)` with every part in `{1, .., p-1}`; indexes the
/// quasisymmetric polynomial whose blocks of equal variables have these
/// exponents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Composition {
    parts: Vec<u8>,
}

impl Composition {
    pub fn new(fp: Fp, parts: Vec<u8>) -> Result<Composition> {
        if parts.is_empty() {
            return Err(Error::InvalidComposition("a composition needs at least one part".into()));
        }
        for &a in &parts {
            if a == 0 || a as u32 >= fp.p() {
                return Err(Error::InvalidComposition(format!(
                    "part {a} is outside 1..{}",
                    fp.p() - 1
                )));
            }
        }
        Ok(Composition { parts })
    }

    pub fn parts(&self) -> &[u8] {
        &self.parts
    }

    /// Number of parts `s`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `|a| = a_1 + .. + a_s`.
    pub fn weight(&self) -> u32 {
        self.parts.iter().map(|&a| a as u32).sum()
    }

    /// Parses the bracket form `"[2,1]"`.
    pub fn parse(s: &str, fp: Fp) -> Result<Composition> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("composition {s:?} is not of the form [a,b,..]")))?;
        let parts = inner
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<u8>()
                    .map_err(|e| Error::Parse(format!("composition part {tok:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Composition::new(fp, parts)
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for Composition {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// All compositions of weight `k` with parts in `{1, .., p-1}`, in
/// lexicographic order of their part lists.
pub fn compositions(fp: Fp, k: u32) -> Vec<Composition> {
    let mut out = Vec::new();
    let mut stack = Vec::new();
    fn rec(fp: Fp, remaining: u32, stack: &mut Vec<u8>, out: &mut Vec<Composition>) {
        if remaining == 0 {
            out.push(Composition { parts: stack.clone() });
            return;
        }
        for part in 1..fp.p().min(remaining + 1) {
            stack.push(part as u8);
            rec(fp, remaining - part, stack, out);
            stack.pop();
        }
    }
    rec(fp, k, &mut stack, &mut out);
    out
}

/// The unique split `d = r + (p-1) l` with `0 < r < p`, `l >= 0`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct DegreeSplit {
    pub d: u32,
    pub r: u8,
    pub ell: u32,
}

pub fn decompose_degree(d: u32, fp: Fp) -> Result<DegreeSplit> {
    if d < 1 {
        return Err(Error::Parse("degree must be at least 1".into()));
    }
    let pm1 = fp.p() - 1;
    let r = ((d - 1) % pm1) + 1;
    Ok(DegreeSplit { d, r: r as u8, ell: (d - r) / pm1 })
}

/// `sum_i |x_i|^r / p^(l+1)` on `n` variables.
pub fn power_sum_phase(fp: Fp, n: usize, split: DegreeSplit) -> Result<NonClassicalPoly> {
    let terms = (0..n).map(|i| {
        let mut exps = vec![0u8; n];
        exps[i] = split.r;
        (Monomial::new(exps, split.ell), fp.elem(1))
    });
    NonClassicalPoly::from_terms(fp, n, PhaseValue::ZERO, terms.collect::<Vec<_>>())
}

/// A power-sum phase of degree `k - 1`, built to test order-`k` uniformity.
/// `boundary` marks `k = p + 1`, the largest order at which a classical
/// correlate is still guaranteed.
#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    #[serde(flatten)]
    pub poly: NonClassicalPoly,
    pub boundary: bool,
    pub r: u8,
    pub ell: u32,
    pub degree: u32,
    pub depth: u32,
}

impl Counterexample {
    pub fn split(&self) -> DegreeSplit {
        DegreeSplit { d: self.degree, r: self.r, ell: self.ell }
    }
}

pub fn make_counterexample(fp: Fp, k: u32, n: usize) -> Result<Counterexample> {
    if k < fp.p() + 1 {
        return Err(Error::Parse(format!(
            "order k = {k} admits no deep power-sum instance; need k >= p + 1 = {}",
            fp.p() + 1
        )));
    }
    if n < 1 {
        return Err(Error::Parse("need at least one variable".into()));
    }
    let split = decompose_degree(k - 1, fp)?;
    let poly = power_sum_phase(fp, n, split)?;
    let (degree, depth) = poly.degree_and_depth();
    Ok(Counterexample { poly, boundary: k == fp.p() + 1, r: split.r, ell: split.ell, degree, depth })
}

/// Elementary quasisymmetric polynomial
/// `Q_a(x) = sum_{v_1 < .. < v_s} x_{v_1}^{a_1} .. x_{v_s}^{a_s}`;
/// the zero polynomial when `s > n`.
pub fn quasisym_poly(fp: Fp, n: usize, alpha: &Composition) -> ClassicalPoly {
    let s = alpha.len();
    let mut terms = Vec::new();
    let mut choose = (0..s).collect::<Vec<usize>>();
    if s <= n {
        loop {
            let mut exps = vec![0u8; n];
            for (b, &v) in choose.iter().enumerate() {
                exps[v] = alpha.parts[b];
            }
            terms.push((exps, fp.elem(1)));
            if !next_combination(&mut choose, n) {
                break;
            }
        }
    }
    ClassicalPoly::from_terms(fp, n, terms).expect("exponents below p by construction")
}

/// Advances a strictly increasing index tuple within `0..n`; false at the end.
pub(crate) fn next_combination(c: &mut [usize], n: usize) -> bool {
    let s = c.len();
    for i in (0..s).rev() {
        if c[i] < n - (s - i) {
            c[i] += 1;
            for j in i + 1..s {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// How to evaluate an iterated-derivative constant.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DerivMode {
    /// The closed-form sum.
    Symbolic,
    /// Literal table differencing, reading off the constant.
    BruteForce,
}

/// The constant `D_{h_1} .. D_{h_k}` of the degree-`k` power-sum phase:
/// `(-1)^l r! sum_i (h_1)_i .. (h_k)_i`, landing in `(1/p)Z/Z = F_p`.
pub fn power_sum_derivative(
    fp: Fp,
    split: DegreeSplit,
    h: &[FpVector],
    mode: DerivMode,
) -> Result<FpElem> {
    if h.len() != split.d as usize {
        return Err(Error::LengthMismatch { expected: split.d as usize, got: h.len() });
    }
    let n = check_uniform_dim(h)?;
    match mode {
        DerivMode::Symbolic => {
            let mut sum = FpElem::ZERO;
            for i in 0..n {
                let mut prod = FpElem::ONE;
                for hj in h {
                    prod = fp.mul(prod, hj.get(i));
                    if prod.is_zero() {
                        break;
                    }
                }
                sum = fp.add(sum, prod);
            }
            Ok(fp.mul(fp.mul(fp.parity_sign(split.ell), fp.factorial(split.r as u32)), sum))
        }
        DerivMode::BruteForce => {
            let mut table = power_sum_phase(fp, n, split)?.eval_table()?;
            for hj in h {
                table = table.shift_diff(hj)?;
            }
            let first = table.get(0);
            if table.values().iter().any(|&v| v != first) {
                return Err(Error::Internal("iterated derivative is not constant".into()));
            }
            fp.elem_from_phase(first)
        }
    }
}

/// The constant `D_{h_1} .. D_{h_k} Q_a` for `|a| = k`: a sum over
/// permutations and over index sequences with equal blocks of sizes
/// `a_1, .., a_s` and strict increase between blocks.
pub fn quasisym_derivative(
    fp: Fp,
    alpha: &Composition,
    h: &[FpVector],
    mode: DerivMode,
) -> Result<FpElem> {
    let k = alpha.weight() as usize;
    if h.len() != k {
        return Err(Error::LengthMismatch { expected: k, got: h.len() });
    }
    let n = check_uniform_dim(h)?;
    match mode {
        DerivMode::Symbolic => Ok(quasisym_derivative_symbolic(fp, alpha, h, n)),
        DerivMode::BruteForce => {
            let grid = Grid::new(fp, n)?;
            let mut values = quasisym_poly(fp, n, alpha).eval_table()?;
            for hj in h {
                let hidx = grid.index(hj)?;
                values = (0..grid.size())
                    .map(|x| fp.sub(values[grid.add(x, hidx)], values[x]))
                    .collect();
            }
            let first = values[0];
            if values.iter().any(|&v| v != first) {
                return Err(Error::Internal("iterated derivative is not constant".into()));
            }
            Ok(first)
        }
    }
}

fn quasisym_derivative_symbolic(fp: Fp, alpha: &Composition, h: &[FpVector], n: usize) -> FpElem {
    let k = alpha.weight() as usize;
    let s = alpha.len();
    if s > n {
        return FpElem::ZERO;
    }
    // block index of each of the k derivative positions
    let mut block_of = Vec::with_capacity(k);
    for (b, &part) in alpha.parts.iter().enumerate() {
        block_of.extend(std::iter::repeat(b).take(part as usize));
    }
    let perms = permutations(k);
    let mut sum = FpElem::ZERO;
    let mut choose = (0..s).collect::<Vec<usize>>();
    loop {
        for perm in &perms {
            let mut prod = FpElem::ONE;
            for (j, &pj) in perm.iter().enumerate() {
                prod = fp.mul(prod, h[j].get(choose[block_of[pj]]));
                if prod.is_zero() {
                    break;
                }
            }
            sum = fp.add(sum, prod);
        }
        if !next_combination(&mut choose, n) {
            break;
        }
    }
    sum
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = (0..k).collect::<Vec<usize>>();
    fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            if k % 2 == 0 {
                cur.swap(i, k - 1);
            } else {
                cur.swap(0, k - 1);
            }
        }
    }
    heap(k, &mut cur, &mut out);
    out
}

fn check_uniform_dim(h: &[FpVector]) -> Result<usize> {
    let n = h.first().map(|v| v.dim()).unwrap_or(0);
    for v in h {
        if v.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: v.dim() });
        }
    }
    Ok(n)
}

/// A `k`-fold derivative constant viewed as a form in its shift vectors.
#[derive(Clone, Debug)]
pub enum DerivativeForm {
    PowerSum(DegreeSplit),
    Quasisym(Composition),
}

impl DerivativeForm {
    /// Number of shift arguments `k`.
    pub fn arity(&self) -> u32 {
        match self {
            DerivativeForm::PowerSum(split) => split.d,
            DerivativeForm::Quasisym(alpha) => alpha.weight(),
        }
    }

    pub fn value(&self, fp: Fp, h: &[FpVector]) -> Result<FpElem> {
        match self {
            DerivativeForm::PowerSum(split) => power_sum_derivative(fp, *split, h, DerivMode::Symbolic),
            DerivativeForm::Quasisym(alpha) => quasisym_derivative(fp, alpha, h, DerivMode::Symbolic),
        }
    }
}

/// The vector version of a `k`-linear form: coordinate `i` is the form
/// paired with the `i`-th standard basis vector in the last slot.
pub fn vector_form(fp: Fp, form: &DerivativeForm, n: usize, h: &[FpVector]) -> Result<FpVector> {
    let expected = form.arity() as usize - 1;
    if h.len() != expected {
        return Err(Error::LengthMismatch { expected, got: h.len() });
    }
    for v in h {
        if v.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: v.dim() });
        }
    }
    let mut full: Vec<FpVector> = h.to_vec();
    full.push(FpVector::zero(n));
    let coords = (0..n)
        .map(|i| {
            *full.last_mut().unwrap() = FpVector::unit(n, i);
            form.value(fp, &full)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FpVector::from_elems(coords))
}

/// Coefficient of `x_1 .. x_r` in a multiaffine `L: F_p^r -> F_p`, read off
/// by one unit difference per variable; multiaffinity is spot-checked on
/// random second differences first (vacuous for p = 2).
pub fn multiaffine_leading_coeff<R: Rng + ?Sized>(
    fp: Fp,
    r: usize,
    mut oracle: impl FnMut(&[FpElem]) -> FpElem,
    rng: &mut R,
) -> Result<FpElem> {
    if r > 30 {
        return Err(Error::BudgetExceeded { needed: 1u128 << r, budget: 1 << 30 });
    }
    if fp.p() > 2 {
        let mut x = vec![FpElem::ZERO; r];
        for var in 0..r {
            for _ in 0..3 {
                for c in x.iter_mut() {
                    *c = fp.random_elem(rng);
                }
                let at = |x: &mut Vec<FpElem>, shift: u32, oracle: &mut dyn FnMut(&[FpElem]) -> FpElem| {
                    let save = x[var];
                    x[var] = fp.add(save, fp.elem(shift as u64));
                    let v = oracle(x);
                    x[var] = save;
                    v
                };
                let l0 = at(&mut x, 0, &mut oracle);
                let l1 = at(&mut x, 1, &mut oracle);
                let l2 = at(&mut x, 2, &mut oracle);
                let second = fp.add(fp.sub(l2, l1), fp.sub(l0, l1));
                if !second.is_zero() {
                    return Err(Error::NotMultiaffine);
                }
            }
        }
    }
    let mut coeff = FpElem::ZERO;
    let mut point = vec![FpElem::ZERO; r];
    for mask in 0u64..(1 << r) {
        for (i, c) in point.iter_mut().enumerate() {
            *c = if mask & (1 << i) != 0 { FpElem::ONE } else { FpElem::ZERO };
        }
        let sign = (r as u32 - mask.count_ones()) % 2;
        let v = oracle(&point);
        coeff = fp.add(coeff, fp.mul(fp.parity_sign(sign), v));
    }
    Ok(coeff)
}

/// Leading coefficient of the map `t -> sum_f c_f F(h(t))_i` where only the
/// `i`-th coordinate column of the shifts varies.
///
/// Every vector gets a fixed random prefix before coordinate `i` and a block
/// of `p^a >= k` columns all equal to its slice value `t_j` from coordinate
/// `i` on. Any derivative form evaluated on full vectors is then invariant
/// in `t`: a term using `q >= 1` of the equal columns appears with
/// multiplicity `binom(p^a, q) = 0 mod p`. This freezes all cross-coordinate
/// inputs the slice coefficients depend on, so the map is multiaffine in `t`
/// with constant coefficients and unit differencing reads off the leading one.
pub fn column_leading_coeff<R: Rng + ?Sized>(
    fp: Fp,
    forms: &[(FpElem, DerivativeForm)],
    prefix_len: usize,
    rng: &mut R,
) -> Result<FpElem> {
    let k = match forms.first() {
        Some((_, f)) => f.arity(),
        None => return Err(Error::InvalidComposition("no forms given".into())),
    };
    if forms.iter().any(|(_, f)| f.arity() != k) {
        return Err(Error::InvalidComposition("forms must share one arity".into()));
    }
    if k < 2 {
        return Err(Error::Parse("arity must be at least 2 to leave a varying slice".into()));
    }
    let mut block = 1usize;
    while (block as u32) < k {
        block *= fp.p() as usize;
    }
    let n = prefix_len + block;
    let i0 = prefix_len;
    let r = (k - 1) as usize;
    let prefixes: Vec<Vec<FpElem>> = (0..r)
        .map(|_| (0..prefix_len).map(|_| fp.random_elem(rng)).collect())
        .collect();
    let unit = FpVector::unit(n, i0);
    let oracle = |t: &[FpElem]| {
        let mut full: Vec<FpVector> = Vec::with_capacity(r + 1);
        for (j, prefix) in prefixes.iter().enumerate() {
            let mut coords = Vec::with_capacity(n);
            coords.extend_from_slice(prefix);
            coords.extend(std::iter::repeat(t[j]).take(block));
            full.push(FpVector::from_elems(coords));
        }
        full.push(unit.clone());
        let mut acc = FpElem::ZERO;
        for (c, form) in forms {
            let v = form.value(fp, &full).expect("dimensions fixed by construction");
            acc = fp.add(acc, fp.mul(*c, v));
        }
        acc
    };
    multiaffine_leading_coeff(fp, r, oracle, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fp2() -> Fp {
        Fp::new(2).unwrap()
    }

    fn fp3() -> Fp {
        Fp::new(3).unwrap()
    }

    #[test]
    fn degree_splits() {
        assert_eq!(decompose_degree(3, fp2()).unwrap(), DegreeSplit { d: 3, r: 1, ell: 2 });
        assert_eq!(decompose_degree(5, fp3()).unwrap(), DegreeSplit { d: 5, r: 1, ell: 2 });
        assert_eq!(decompose_degree(2, fp3()).unwrap(), DegreeSplit { d: 2, r: 2, ell: 0 });
        assert!(decompose_degree(0, fp2()).is_err());
    }

    #[test]
    fn counterexample_family_members() {
        let c = make_counterexample(fp2(), 4, 3).unwrap();
        assert_eq!((c.r, c.ell, c.degree, c.depth), (1, 2, 3, 3));
        assert!(!c.boundary);
        assert_eq!(c.poly.num_terms(), 3);
        assert_eq!(
            c.poly.eval(&FpVector::parse("1,0,0", fp2()).unwrap()).unwrap(),
            fp2().phase(1, 3).unwrap()
        );

        let c = make_counterexample(fp3(), 5, 2).unwrap();
        assert_eq!((c.r, c.ell, c.degree, c.depth), (2, 1, 4, 2));
        assert_eq!(
            c.poly.eval(&FpVector::parse("2,1", fp3()).unwrap()).unwrap(),
            fp3().phase(5, 2).unwrap()
        );

        let c = make_counterexample(fp2(), 3, 1).unwrap();
        assert!(c.boundary);
        assert_eq!((c.r, c.ell, c.degree), (1, 1, 2));

        assert!(make_counterexample(fp2(), 2, 1).is_err());
        assert!(make_counterexample(fp3(), 3, 1).is_err());
    }

    #[test]
    fn counterexample_serializes_with_poly_fields_inline() {
        let c = make_counterexample(fp2(), 3, 1).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains("\"terms\""));
        assert!(json.contains("\"boundary\":true"));
        let back: NonClassicalPoly = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c.poly);
    }

    #[test]
    fn quasisym_poly_examples() {
        let q = quasisym_poly(fp2(), 2, &Composition::new(fp2(), vec![1, 1]).unwrap());
        assert_eq!(q.coeff(&[1, 1]).val(), 1);
        assert_eq!(q.terms().count(), 1);

        let q = quasisym_poly(fp3(), 2, &Composition::new(fp3(), vec![2, 1]).unwrap());
        assert_eq!(q.coeff(&[2, 1]).val(), 1);
        assert_eq!(q.terms().count(), 1);

        let q = quasisym_poly(fp2(), 3, &Composition::new(fp2(), vec![1]).unwrap());
        assert_eq!(q.terms().count(), 3);
        assert_eq!(q.degree(), 1);

        let q = quasisym_poly(fp2(), 1, &Composition::new(fp2(), vec![1, 1]).unwrap());
        assert!(q.is_zero());
    }

    #[test]
    fn composition_validation_and_round_trip() {
        assert!(Composition::new(fp2(), vec![1, 2]).is_err());
        assert!(Composition::new(fp3(), vec![0]).is_err());
        assert!(Composition::new(fp3(), vec![]).is_err());
        let a = Composition::new(fp3(), vec![2, 1]).unwrap();
        assert_eq!(a.to_string(), "[2,1]");
        assert_eq!(Composition::parse("[2,1]", fp3()).unwrap(), a);
        assert_eq!(a.weight(), 3);
        assert_eq!(serde_json::to_string(&a).unwrap(), "\"[2,1]\"");
    }

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(fp2(), 5).len(), 1);
        assert_eq!(compositions(fp3(), 4).len(), 5);
        assert_eq!(compositions(fp3(), 5).len(), 8);
    }

    #[test]
    fn power_sum_derivative_examples() {
        let fp = fp2();
        let split = decompose_degree(3, fp).unwrap();
        let ones = vec![FpVector::parse("1", fp).unwrap(); 3];
        for mode in [DerivMode::Symbolic, DerivMode::BruteForce] {
            assert_eq!(power_sum_derivative(fp, split, &ones, mode).unwrap().val(), 1);
        }
        let with_zero =
            vec![FpVector::parse("1", fp).unwrap(), FpVector::zero(1), FpVector::parse("1", fp).unwrap()];
        assert_eq!(power_sum_derivative(fp, split, &with_zero, DerivMode::Symbolic).unwrap().val(), 0);

        let fp = fp3();
        let split = decompose_degree(2, fp).unwrap();
        let ones = vec![FpVector::parse("1", fp).unwrap(); 2];
        for mode in [DerivMode::Symbolic, DerivMode::BruteForce] {
            assert_eq!(power_sum_derivative(fp, split, &ones, mode).unwrap().val(), 2);
        }
    }

    #[test]
    fn quasisym_derivative_examples() {
        let fp = fp2();
        let a = Composition::new(fp, vec![1, 1]).unwrap();
        let h = vec![FpVector::unit(2, 0), FpVector::unit(2, 1)];
        for mode in [DerivMode::Symbolic, DerivMode::BruteForce] {
            assert_eq!(quasisym_derivative(fp, &a, &h, mode).unwrap().val(), 1);
        }
        let zero_h = vec![FpVector::unit(2, 0), FpVector::zero(2)];
        assert_eq!(quasisym_derivative(fp, &a, &zero_h, DerivMode::Symbolic).unwrap().val(), 0);

        // single block: k! on x^k, for k below p
        let fp = Fp::new(5).unwrap();
        let a = Composition::new(fp, vec![3]).unwrap();
        let h = vec![FpVector::unit(2, 0); 3];
        for mode in [DerivMode::Symbolic, DerivMode::BruteForce] {
            assert_eq!(quasisym_derivative(fp, &a, &h, mode).unwrap().val(), 1); // 3! = 6 = 1 mod 5
        }
    }

    #[test]
    fn symbolic_matches_brute_force_on_random_tuples() {
        for fp in [fp2(), fp3()] {
            let mut rng = ChaCha8Rng::seed_from_u64(31);
            for k in 1..=4u32 {
                for alpha in compositions(fp, k) {
                    for _ in 0..10 {
                        let h: Vec<FpVector> =
                            (0..k).map(|_| FpVector::random(fp, 2, &mut rng)).collect();
                        let sym = quasisym_derivative(fp, &alpha, &h, DerivMode::Symbolic).unwrap();
                        let brute =
                            quasisym_derivative(fp, &alpha, &h, DerivMode::BruteForce).unwrap();
                        assert_eq!(sym, brute, "p = {}, alpha = {alpha}", fp.p());
                    }
                }
                let split = decompose_degree(k, fp).unwrap();
                for _ in 0..10 {
                    let h: Vec<FpVector> =
                        (0..k).map(|_| FpVector::random(fp, 2, &mut rng)).collect();
                    let sym = power_sum_derivative(fp, split, &h, DerivMode::Symbolic).unwrap();
                    let brute = power_sum_derivative(fp, split, &h, DerivMode::BruteForce).unwrap();
                    assert_eq!(sym, brute, "p = {}, k = {k}", fp.p());
                }
            }
        }
    }

    #[test]
    fn vector_form_examples() {
        let fp = fp2();
        let split = decompose_degree(3, fp).unwrap();
        let h = vec![FpVector::parse("1,0", fp).unwrap(), FpVector::parse("1,1", fp).unwrap()];
        let v = vector_form(fp, &DerivativeForm::PowerSum(split), 2, &h).unwrap();
        assert_eq!(v, FpVector::parse("1,0", fp).unwrap());

        let a = Composition::new(fp, vec![1, 1]).unwrap();
        let v = vector_form(fp, &DerivativeForm::Quasisym(a), 2, &[FpVector::unit(2, 0)]).unwrap();
        assert_eq!(v, FpVector::parse("0,1", fp).unwrap());
    }

    #[test]
    fn power_sum_vector_form_is_the_coordinate_product() {
        let fp = fp3();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let split = decompose_degree(4, fp).unwrap();
        for _ in 0..20 {
            let h: Vec<FpVector> = (0..3).map(|_| FpVector::random(fp, 3, &mut rng)).collect();
            let v = vector_form(fp, &DerivativeForm::PowerSum(split), 3, &h).unwrap();
            let scale = fp.mul(fp.parity_sign(split.ell), fp.factorial(split.r as u32));
            for i in 0..3 {
                let prod = h.iter().fold(FpElem::ONE, |acc, hj| fp.mul(acc, hj.get(i)));
                assert_eq!(v.get(i), fp.mul(scale, prod));
            }
        }
    }

    #[test]
    fn leading_coeff_of_simple_multiaffine_functions() {
        let fp = fp2();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let product = |x: &[FpElem]| fp.mul(x[0], x[1]);
        assert_eq!(multiaffine_leading_coeff(fp, 2, product, &mut rng).unwrap().val(), 1);
        let with_lower = |x: &[FpElem]| fp.add(fp.mul(x[0], x[1]), x[0]);
        assert_eq!(multiaffine_leading_coeff(fp, 2, with_lower, &mut rng).unwrap().val(), 1);
    }

    #[test]
    fn non_multiaffine_oracle_is_rejected() {
        let fp = fp3();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let square = |x: &[FpElem]| fp.mul(x[0], x[0]);
        assert!(matches!(
            multiaffine_leading_coeff(fp, 1, square, &mut rng),
            Err(Error::NotMultiaffine)
        ));
    }

    #[test]
    fn column_coefficient_matches_closed_form() {
        // expected: (-1)^(s-1) a_1 (k-1)!
        for fp in [fp2(), fp3()] {
            let mut rng = ChaCha8Rng::seed_from_u64(77);
            for k in 2..=4u32 {
                for alpha in compositions(fp, k) {
                    let expected = fp.mul(
                        fp.mul(fp.parity_sign(alpha.len() as u32 - 1), fp.elem(alpha.parts()[0] as u64)),
                        fp.factorial(k - 1),
                    );
                    for _ in 0..3 {
                        let got = column_leading_coeff(
                            fp,
                            &[(FpElem::ONE, DerivativeForm::Quasisym(alpha.clone()))],
                            2,
                            &mut rng,
                        )
                        .unwrap();
                        assert_eq!(got, expected, "p = {}, alpha = {alpha}", fp.p());
                    }
                }
            }
        }
    }

    #[test]
    fn combined_column_coefficient_survives_any_quasisym_mix() {
        // at arity k >= p+1 every quasisym slice coefficient dies, leaving
        // the power-sum value (-1)^l r!
        for (fp, k) in [(fp2(), 4u32), (fp3(), 5u32)] {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            let split = decompose_degree(k, fp).unwrap();
            let expected = fp.mul(fp.parity_sign(split.ell), fp.factorial(split.r as u32));
            assert!(!expected.is_zero());
            for _ in 0..3 {
                let mut forms = vec![(FpElem::ONE, DerivativeForm::PowerSum(split))];
                for alpha in compositions(fp, k) {
                    let c = fp.random_elem(&mut rng);
                    if !c.is_zero() {
                        forms.push((c, DerivativeForm::Quasisym(alpha)));
                    }
                }
                let got = column_leading_coeff(fp, &forms, 2, &mut rng).unwrap();
                assert_eq!(got, expected, "p = {}", fp.p());
            }
        }
    }

    #[test]
    fn derivative_constant_is_independent_of_base_point() {
        // spot check: the k-fold difference table of a degree-k member is
        // constant, which BruteForce verifies internally before returning
        let fp = fp3();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let split = decompose_degree(3, fp).unwrap();
        for _ in 0..5 {
            let h: Vec<FpVector> = (0..3).map(|_| FpVector::random(fp, 2, &mut rng)).collect();
            assert!(power_sum_derivative(fp, split, &h, DerivMode::BruteForce).is_ok());
        }
    }
}
