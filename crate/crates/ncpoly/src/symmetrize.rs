//! Coefficient coloring of the complete `d`-uniform hypergraph, search for
//! monochromatic vertex subsets, and the resulting decomposition of a
//! restricted polynomial into a quasisymmetric part plus lower-degree terms.
//!
//! Variables carry 1-based labels throughout this module: edges and subsets
//! are strictly increasing lists drawn from `{1, .., n}`.
//!
//! A polynomial of degree at most `d` colors each `d`-subset of variables by
//! the map `lambda -> F_p` reading, for every exponent pattern `lambda` of
//! weight `d`, the coefficient of the monomial that places the nonzero
//! entries of `lambda` on the edge's vertices in order. On a subset whose
//! edges all share one color the degree-`d` part collapses to a combination
//! of elementary quasisymmetric polynomials, which `restrict_decompose`
//! extracts and verifies.

use crate::fp::{Fp, FpElem};
use crate::poly::ClassicalPoly;
use crate::quasisym::{compositions, next_combination, quasisym_poly, Composition};
use crate::{Error, Result};
use serde::ser::SerializeStruct;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

/// All exponent patterns `lambda` in `{0, .., p-1}^d` of total weight `d`,
/// in lexicographic order.
pub fn lambda_set(fp: Fp, d: u32) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(d as usize);
    fn rec(fp: Fp, d: u32, remaining: u32, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == d as usize {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let slots_left = d as usize - cur.len() - 1;
        let max_rest = slots_left as u32 * (fp.p() - 1);
        for v in 0..fp.p().min(remaining + 1) {
            if remaining - v <= max_rest {
                cur.push(v as u8);
                rec(fp, d, remaining - v, cur, out);
                cur.pop();
            }
        }
    }
    rec(fp, d, d, &mut cur, &mut out);
    out
}

/// The color of one edge: a total map from weight-`d` exponent patterns to
/// coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EdgeColor {
    values: BTreeMap<Vec<u8>, FpElem>,
}

impl EdgeColor {
    pub fn get(&self, lambda: &[u8]) -> Option<FpElem> {
        self.values.get(lambda).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[u8], FpElem)> {
        self.values.iter().map(|(l, &c)| (l.as_slice(), c))
    }
}

impl Serialize for EdgeColor {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<String, u64> = self
            .values
            .iter()
            .map(|(l, c)| (format!("{l:?}").replace(' ', ""), c.val() as u64))
            .collect();
        map.serialize(serializer)
    }
}

fn check_subset(label: &str, subset: &[usize], n: usize) -> Result<()> {
    for (t, &v) in subset.iter().enumerate() {
        if v < 1 || v > n {
            return Err(Error::InvalidSubset(format!("{label} element {v} outside 1..={n}")));
        }
        if t > 0 && subset[t - 1] >= v {
            return Err(Error::InvalidSubset(format!("{label} must be strictly increasing")));
        }
    }
    Ok(())
}

/// Colors the edge by its coefficient reads. The pattern `lambda` assigns
/// exponent `lambda[t]` to the `t`-th edge vertex; zeros drop out, so the
/// read is the coefficient of the monomial on the retained vertices.
pub fn edge_color(p: &ClassicalPoly, d: u32, edge: &[usize]) -> Result<EdgeColor> {
    if edge.len() != d as usize {
        return Err(Error::InvalidSubset(format!("edge has {} vertices, expected {d}", edge.len())));
    }
    check_subset("edge", edge, p.n())?;
    let fp = p.fp();
    let mut values = BTreeMap::new();
    for lambda in lambda_set(fp, d) {
        let mut exps = vec![0u8; p.n()];
        for (t, &e) in lambda.iter().enumerate() {
            exps[edge[t] - 1] = e;
        }
        let c = p.coeff(&exps);
        values.insert(lambda, c);
    }
    Ok(EdgeColor { values })
}

/// Outcome of the monochromatic-subset search.
#[derive(Clone, Debug, Serialize)]
pub struct MonochromaticSearch {
    /// Lexicographically smallest subset of the target size whose
    /// `d`-subsets all share one color, when one was found.
    pub subset: Option<Vec<usize>>,
    /// Largest monochromatic subset encountered during the search; the
    /// fallback when the target size was not reached.
    pub largest_found: Vec<usize>,
    /// Whether the search space was fully explored within the node budget.
    pub complete: bool,
    /// Nodes visited.
    pub nodes: u64,
}

struct Dfs<'a> {
    poly: &'a ClassicalPoly,
    d: u32,
    n: usize,
    target: usize,
    budget: u64,
    nodes: u64,
    colors: HashMap<Vec<usize>, EdgeColor>,
    found: Option<Vec<usize>>,
    largest: Vec<usize>,
}

impl Dfs<'_> {
    fn color(&mut self, edge: Vec<usize>) -> EdgeColor {
        if let Some(c) = self.colors.get(&edge) {
            return c.clone();
        }
        let c = edge_color(self.poly, self.d, &edge).expect("edges built increasing and sized d");
        self.colors.insert(edge, c.clone());
        c
    }

    /// Returns false when the node budget ran out.
    fn extend(&mut self, current: &mut Vec<usize>, reference: Option<&EdgeColor>) -> bool {
        if current.len() == self.target {
            self.found = Some(current.clone());
            return true;
        }
        let first = current.last().map_or(1, |&v| v + 1);
        for v in first..=self.n {
            if current.len() + (self.n - v + 1) < self.target {
                break;
            }
            if self.nodes >= self.budget {
                return false;
            }
            self.nodes += 1;
            let mut branch_ref = reference.cloned();
            let mut ok = true;
            if current.len() + 1 >= self.d as usize {
                // every new edge is a (d-1)-subset of `current` plus v
                let s = self.d as usize - 1;
                let mut choose: Vec<usize> = (0..s).collect();
                loop {
                    let mut edge: Vec<usize> = choose.iter().map(|&t| current[t]).collect();
                    edge.push(v);
                    let c = self.color(edge);
                    match &branch_ref {
                        Some(r) if *r != c => {
                            ok = false;
                            break;
                        }
                        Some(_) => {}
                        None => branch_ref = Some(c),
                    }
                    if !next_combination(&mut choose, current.len()) {
                        break;
                    }
                }
            }
            if ok {
                current.push(v);
                if current.len() >= self.d as usize && current.len() > self.largest.len() {
                    self.largest = current.clone();
                }
                let done = self.extend(current, branch_ref.as_ref());
                current.pop();
                if !done || self.found.is_some() {
                    return done;
                }
            }
        }
        true
    }
}

/// Searches for the lexicographically smallest `target_m`-subset of the
/// variables all of whose `d`-subsets share one color. Partial sets are
/// extended depth-first only by vertices that keep every new edge on the
/// branch's reference color, so the first complete subset reached is the
/// lexicographic minimum.
pub fn find_monochromatic(
    p: &ClassicalPoly,
    d: u32,
    target_m: usize,
    budget: u64,
) -> Result<MonochromaticSearch> {
    if d < 1 {
        return Err(Error::Parse("uniformity d must be at least 1".into()));
    }
    let n = p.n();
    if target_m > n {
        return Err(Error::InvalidSubset(format!("target size {target_m} exceeds {n} variables")));
    }
    if target_m < d as usize {
        return Err(Error::InvalidSubset(format!("target size {target_m} is below the uniformity {d}")));
    }
    if p.degree() > d {
        return Err(Error::DegreeTooHigh { got: p.degree(), bound: d });
    }
    let mut dfs = Dfs {
        poly: p,
        d,
        n,
        target: target_m,
        budget,
        nodes: 0,
        colors: HashMap::new(),
        found: None,
        largest: Vec::new(),
    };
    let mut current = Vec::new();
    let complete = dfs.extend(&mut current, None);
    Ok(MonochromaticSearch {
        subset: dfs.found,
        largest_found: dfs.largest,
        complete,
        nodes: dfs.nodes,
    })
}

/// A restriction of a polynomial to a monochromatic subset, split into a
/// weight-`d` quasisymmetric combination and a lower-degree remainder.
#[derive(Clone, Debug)]
pub struct RestrictionResult {
    /// The restricted variable labels, increasing.
    pub subset: Vec<usize>,
    /// Coefficient of each weight-`d` elementary quasisymmetric polynomial,
    /// read from the shared edge color at the pattern padded with trailing
    /// zeros.
    pub coeffs: BTreeMap<Composition, FpElem>,
    /// What is left after subtracting the quasisymmetric part; a polynomial
    /// in the subset variables (in increasing label order) of degree < `d`.
    pub remainder: ClassicalPoly,
}

impl Serialize for RestrictionResult {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("RestrictionResult", 3)?;
        s.serialize_field("I", &self.subset)?;
        let coeffs: BTreeMap<String, u64> =
            self.coeffs.iter().map(|(a, c)| (a.to_string(), c.val() as u64)).collect();
        s.serialize_field("coeffs", &coeffs)?;
        s.serialize_field("remainder", &self.remainder)?;
        s.end()
    }
}

/// Substitutes the outside assignment `y` (ordered by the increasing
/// complement of `subset`) and splits the result. The remainder degree is
/// checked; failure means the subset was not monochromatic (or was of the
/// minimal size `d`, where distinct zero placements of one composition may
/// disagree). Sizes `|I| > d` chain all placements together and always pass.
pub fn restrict_decompose(
    p: &ClassicalPoly,
    d: u32,
    subset: &[usize],
    y: &[FpElem],
) -> Result<RestrictionResult> {
    if d < 1 {
        return Err(Error::Parse("uniformity d must be at least 1".into()));
    }
    let fp = p.fp();
    let n = p.n();
    check_subset("subset", subset, n)?;
    if subset.len() < d as usize {
        return Err(Error::InvalidSubset(format!(
            "subset of size {} has no {d}-subsets",
            subset.len()
        )));
    }
    if p.degree() > d {
        return Err(Error::DegreeTooHigh { got: p.degree(), bound: d });
    }
    let outside: Vec<usize> = (1..=n).filter(|v| !subset.contains(v)).collect();
    if y.len() != outside.len() {
        return Err(Error::LengthMismatch { expected: outside.len(), got: y.len() });
    }

    // position of each original variable within the restriction
    let mut place = vec![None; n + 1];
    for (t, &v) in subset.iter().enumerate() {
        place[v] = Some(t);
    }
    let m = subset.len();
    let mut restricted_terms: Vec<(Vec<u8>, FpElem)> = Vec::new();
    for (exps, c) in p.terms() {
        let mut inner = vec![0u8; m];
        let mut scalar = c;
        for (idx, &e) in exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            match place[idx + 1] {
                Some(t) => inner[t] = e,
                None => {
                    let pos = outside.binary_search(&(idx + 1)).expect("complement is sorted");
                    scalar = fp.mul(scalar, fp.pow(y[pos], e as u32));
                }
            }
        }
        if !scalar.is_zero() {
            restricted_terms.push((inner, scalar));
        }
    }
    let restricted = ClassicalPoly::from_terms(fp, m, restricted_terms)?;

    let reference = edge_color(p, d, &subset[..d as usize])?;
    let mut coeffs = BTreeMap::new();
    let mut remainder = restricted;
    for alpha in compositions(fp, d) {
        let mut lambda: Vec<u8> = alpha.parts().to_vec();
        lambda.resize(d as usize, 0);
        let c = reference.get(&lambda).expect("pattern has weight d");
        coeffs.insert(alpha.clone(), c);
        if !c.is_zero() {
            remainder = remainder.add(&quasisym_poly(fp, m, &alpha).scale(c).neg())?;
        }
    }
    if !remainder.is_zero() && remainder.degree() > d - 1 {
        return Err(Error::RemainderDegree { got: remainder.degree(), bound: d - 1 });
    }
    Ok(RestrictionResult { subset: subset.to_vec(), coeffs, remainder })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp::FpVector;
    use crate::table::Grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fp2() -> Fp {
        Fp::new(2).unwrap()
    }

    fn fp3() -> Fp {
        Fp::new(3).unwrap()
    }

    fn poly(fp: Fp, n: usize, terms: &[(&[u8], u64)]) -> ClassicalPoly {
        ClassicalPoly::from_terms(
            fp,
            n,
            terms.iter().map(|&(e, c)| (e.to_vec(), fp.elem(c))).collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn lambda_sets_are_lexicographic_and_complete() {
        assert_eq!(lambda_set(fp2(), 2), vec![vec![1, 1]]);
        assert_eq!(lambda_set(fp3(), 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(lambda_set(fp3(), 3).len(), 7);
        let fp5 = Fp::new(5).unwrap();
        for l in lambda_set(fp5, 4) {
            assert_eq!(l.iter().map(|&v| v as u32).sum::<u32>(), 4);
        }
    }

    #[test]
    fn edge_colors_read_coefficients() {
        let fp = fp2();
        let sym = poly(fp, 3, &[(&[1, 1, 0], 1), (&[0, 1, 1], 1), (&[1, 0, 1], 1)]);
        let c12 = edge_color(&sym, 2, &[1, 2]).unwrap();
        let c13 = edge_color(&sym, 2, &[1, 3]).unwrap();
        let c23 = edge_color(&sym, 2, &[2, 3]).unwrap();
        assert_eq!(c12, c13);
        assert_eq!(c12, c23);
        assert_eq!(c12.get(&[1, 1]).unwrap().val(), 1);

        let single = poly(fp, 3, &[(&[1, 1, 0], 1)]);
        let c = edge_color(&single, 2, &[1, 3]).unwrap();
        assert_eq!(c.get(&[1, 1]).unwrap().val(), 0);

        let q = poly(fp3(), 3, &[(&[2, 1, 0], 1)]);
        assert!(edge_color(&q, 3, &[1, 2]).is_err());
        let c = edge_color(&q, 3, &[1, 2, 3]).unwrap();
        assert_eq!(c.get(&[2, 1, 0]).unwrap().val(), 1);
        assert_eq!(c.get(&[2, 0, 1]).unwrap().val(), 0);
    }

    #[test]
    fn colors_ignore_lower_degree_terms() {
        let fp = fp3();
        let base = poly(fp, 4, &[(&[1, 1, 0, 0], 2), (&[0, 2, 0, 0], 1)]);
        let noisy = base.add(&poly(fp, 4, &[(&[1, 0, 0, 0], 2), (&[0, 0, 1, 0], 1)])).unwrap();
        for edge in [[1, 2], [1, 3], [2, 4], [3, 4]] {
            assert_eq!(edge_color(&base, 2, &edge).unwrap(), edge_color(&noisy, 2, &edge).unwrap());
        }
    }

    #[test]
    fn symmetric_polynomial_is_monochromatic_on_everything() {
        let fp = fp2();
        let sym = poly(fp, 4, &[
            (&[1, 1, 0, 0], 1),
            (&[1, 0, 1, 0], 1),
            (&[1, 0, 0, 1], 1),
            (&[0, 1, 1, 0], 1),
            (&[0, 1, 0, 1], 1),
            (&[0, 0, 1, 1], 1),
        ]);
        let r = find_monochromatic(&sym, 2, 4, 1 << 20).unwrap();
        assert_eq!(r.subset, Some(vec![1, 2, 3, 4]));
        assert!(r.complete);
    }

    #[test]
    fn search_returns_the_lexicographic_minimum() {
        // every pair is vacuously monochromatic at the minimal size, so the
        // first pair wins even though a later pair has the all-zero color
        let fp = fp3();
        let p = poly(fp, 3, &[(&[1, 1, 0], 1), (&[1, 0, 1], 2)]);
        let r = find_monochromatic(&p, 2, 2, 1 << 20).unwrap();
        assert_eq!(r.subset, Some(vec![1, 2]));

        // at size 3 no monochromatic set exists
        let r = find_monochromatic(&p, 2, 3, 1 << 20).unwrap();
        assert_eq!(r.subset, None);
        assert!(r.complete);
        assert_eq!(r.largest_found.len(), 2);
    }

    #[test]
    fn search_validates_inputs() {
        let fp = fp2();
        let p = poly(fp, 3, &[(&[1, 1, 0], 1)]);
        assert!(matches!(find_monochromatic(&p, 2, 4, 100), Err(Error::InvalidSubset(_))));
        assert!(matches!(find_monochromatic(&p, 2, 1, 100), Err(Error::InvalidSubset(_))));
        assert!(matches!(find_monochromatic(&p, 1, 2, 100), Err(Error::DegreeTooHigh { .. })));
    }

    #[test]
    fn monotone_in_the_target_size() {
        let fp = fp2();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let grid = Grid::new(fp, 5).unwrap();
            let mut terms = Vec::new();
            for eidx in 0..grid.size() {
                let exps: Vec<u8> =
                    grid.digits(eidx).coords().iter().map(|e| e.val() as u8).collect();
                let deg: u32 = exps.iter().map(|&e| e as u32).sum();
                if deg == 2 && rng.random_bool(0.5) {
                    terms.push((exps, fp.elem(1)));
                }
            }
            let p = ClassicalPoly::from_terms(fp, 5, terms).unwrap();
            let mut prev_found = false;
            for m in (2..=5).rev() {
                let found = find_monochromatic(&p, 2, m, 1 << 20).unwrap().subset.is_some();
                if prev_found {
                    assert!(found, "success at a larger size implies success below");
                }
                prev_found = found;
            }
        }
    }

    #[test]
    fn budget_exhaustion_reports_incomplete_with_fallback() {
        let fp = fp2();
        let p = poly(fp, 4, &[(&[1, 1, 0, 0], 1)]);
        let full = find_monochromatic(&p, 2, 3, 1 << 20).unwrap();
        assert_eq!(full.subset, Some(vec![1, 3, 4]));
        assert!(full.complete);

        let cut = find_monochromatic(&p, 2, 3, 2).unwrap();
        assert!(!cut.complete);
        assert_eq!(cut.subset, None);
        assert_eq!(cut.nodes, 2);
        assert_eq!(cut.largest_found, vec![1, 2]);
    }

    #[test]
    fn decompose_symmetric_quadratic() {
        let fp = fp2();
        let p = poly(fp, 3, &[(&[1, 1, 0], 1), (&[0, 1, 1], 1), (&[1, 0, 1], 1)]);
        let r = restrict_decompose(&p, 2, &[1, 2, 3], &[]).unwrap();
        assert!(r.remainder.is_zero());
        let alpha = Composition::new(fp, vec![1, 1]).unwrap();
        assert_eq!(r.coeffs[&alpha].val(), 1);
    }

    #[test]
    fn decompose_keeps_lower_degree_part() {
        let fp = fp2();
        let p = poly(fp, 3, &[
            (&[1, 1, 0], 1),
            (&[0, 1, 1], 1),
            (&[1, 0, 1], 1),
            (&[1, 0, 0], 1),
        ]);
        let r = restrict_decompose(&p, 2, &[1, 2, 3], &[]).unwrap();
        assert_eq!(r.remainder, poly(fp, 3, &[(&[1, 0, 0], 1)]));
        assert_eq!(r.remainder.degree(), 1);
    }

    #[test]
    fn decompose_after_substitution() {
        let fp = fp3();
        let p = poly(fp, 3, &[(&[1, 1, 0], 1), (&[1, 0, 1], 2)]);
        let r = restrict_decompose(&p, 2, &[2, 3], &[fp.elem(2)]).unwrap();
        assert_eq!(r.coeffs[&Composition::new(fp, vec![1, 1]).unwrap()].val(), 0);
        assert_eq!(r.coeffs[&Composition::new(fp, vec![2]).unwrap()].val(), 0);
        assert_eq!(r.remainder, poly(fp, 2, &[(&[1, 0], 2), (&[0, 1], 1)]));
    }

    #[test]
    fn serialization_shape() {
        let fp = fp3();
        let p = poly(fp, 3, &[(&[1, 1, 0], 1), (&[1, 0, 1], 2)]);
        let r = restrict_decompose(&p, 2, &[2, 3], &[fp.elem(2)]).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["I"], serde_json::json!([2, 3]));
        assert_eq!(json["coeffs"]["[1,1]"], 0);
        assert_eq!(json["coeffs"]["[2]"], 0);
        assert!(json["remainder"]["terms"].is_array());
    }

    #[test]
    fn decomposition_identity_pointwise() {
        // plant a quasisymmetric degree-d part on a subset, add noise
        // outside it and lower-degree terms everywhere, then verify the
        // split evaluates back to the restriction for every assignment
        for (fp, d, n) in [(fp2(), 2u32, 5usize), (fp2(), 3, 5), (fp3(), 2, 4)] {
            let mut rng = ChaCha8Rng::seed_from_u64(d as u64 * 31 + fp.p() as u64);
            for _ in 0..10 {
                let m = (d as usize + 1).min(n - 1);
                let mut terms: Vec<(Vec<u8>, FpElem)> = Vec::new();
                for alpha in compositions(fp, d) {
                    let c = fp.random_elem(&mut rng);
                    if !c.is_zero() {
                        for (e, q) in quasisym_poly(fp, m, &alpha).terms() {
                            let mut full = e.clone();
                            full.resize(n, 0);
                            terms.push((full, fp.mul(q, c)));
                        }
                    }
                }
                // degree-d monomial touching an outside variable
                let mut noise = vec![0u8; n];
                noise[n - 1] = 1;
                let mut rem = d - 1;
                let mut v = 0;
                while rem > 0 {
                    let add = rng.random_range(1..=rem.min(fp.p() - 1));
                    if (noise[v] as u32 + add) < fp.p() {
                        noise[v] += add as u8;
                        rem -= add;
                    }
                    v = (v + 1) % (n - 1);
                }
                terms.push((noise, fp.elem(1)));
                // lower-degree noise on all variables
                for _ in 0..4 {
                    let mut e = vec![0u8; n];
                    e[rng.random_range(0..n)] = 1;
                    terms.push((e, fp.random_elem(&mut rng)));
                }
                let p = ClassicalPoly::from_terms(fp, n, terms).unwrap();
                let found = find_monochromatic(&p, d, m, 1 << 22).unwrap();
                let subset = found.subset.expect("planted subset exists");

                let outside: Vec<usize> = (1..=n).filter(|v| !subset.contains(v)).collect();
                let outgrid = Grid::new(fp, outside.len()).unwrap();
                for yidx in 0..outgrid.size() {
                    let y = outgrid.digits(yidx);
                    let r = restrict_decompose(&p, d, &subset, y.coords()).unwrap();
                    assert!(r.remainder.is_zero() || r.remainder.degree() <= d - 1);

                    let ingrid = Grid::new(fp, subset.len()).unwrap();
                    for xidx in 0..ingrid.size() {
                        let x = ingrid.digits(xidx);
                        let mut full = vec![FpElem::ZERO; n];
                        for (t, &v) in subset.iter().enumerate() {
                            full[v - 1] = x.get(t);
                        }
                        for (t, &v) in outside.iter().enumerate() {
                            full[v - 1] = y.get(t);
                        }
                        let direct = p.eval(&FpVector::from_elems(full)).unwrap();
                        let mut split = r.remainder.eval(&x).unwrap();
                        for (alpha, &c) in &r.coeffs {
                            if !c.is_zero() {
                                let q = quasisym_poly(fp, subset.len(), alpha).eval(&x).unwrap();
                                split = fp.add(split, fp.mul(c, q));
                            }
                        }
                        assert_eq!(direct, split);
                    }
                }
            }
        }
    }

    #[test]
    fn minimal_subset_size_can_fail_for_odd_primes() {
        // on a size-d subset the trailing-zero read cannot see every zero
        // placement, so mismatched square coefficients break the remainder
        let fp = fp3();
        let p = poly(fp, 2, &[(&[2, 0], 1), (&[0, 2], 2)]);
        assert!(matches!(
            restrict_decompose(&p, 2, &[1, 2], &[]),
            Err(Error::RemainderDegree { got: 2, bound: 1 })
        ));
    }
}
