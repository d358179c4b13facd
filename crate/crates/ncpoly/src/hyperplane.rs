//! Splitting a low-degree phase polynomial into classical form on a
//! codimension-1 hyperplane, and extracting a classical correlate from any
//! function that correlates with the phase, losing at most a factor sqrt(p).
//!
//! A canonical polynomial of degree at most p has depth at most 2, and its
//! depth-2 layer is forced to be linear: P(x) = alpha + P'(x) + (c.x-lift)/p^2
//! with P' classical-valued. On the hyperplane c.x = 0 the lifted linear part
//! collapses one depth level, so P agrees there with alpha + |Q|/p for a
//! classical Q. Averaging f e_p(-Q) over the hyperplane's parallel classes
//! and applying Parseval and pigeonhole to the resulting single-variable
//! function produces a linear correction a x_1 and the correlate Q + a x_1.

use crate::fp::{FpElem, FpMatrix, FpVector};
use crate::gowers::inner_product;
use crate::phase::PhaseValue;
use crate::poly::{ClassicalPoly, NonClassicalPoly};
use crate::table::{ComplexTable, Grid};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::Serialize;

/// Exhaustive hyperplane verification is skipped above this many points.
const VERIFY_LIMIT: u64 = 1_000_000;

/// A polynomial split against a hyperplane: for all x with c.x = 0,
/// P(x) = alpha + |q(x)|/p exactly.
#[derive(Clone, Debug)]
pub struct HyperplaneSplit {
    /// Defining covector; zero when the input was already classical plus a
    /// constant, in which case the reported hyperplane is x_1 = 0.
    pub c: FpVector,
    /// Invertible matrix sending the hyperplane c.x = 0 onto {x_1 = 0}.
    pub basis_change: FpMatrix,
    /// Constant shift.
    pub alpha: PhaseValue,
    /// Classical polynomial, in the original coordinates, agreeing with
    /// (P - alpha) * p on the hyperplane.
    pub q: ClassicalPoly,
    /// Linear correction along the transversal direction; zero until an
    /// extraction populates it.
    pub a: FpElem,
}

impl Serialize for HyperplaneSplit {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let fp = self.q.fp();
        let mut s = serializer.serialize_struct("HyperplaneSplit", 5)?;
        let c: Vec<u64> = self.c.coords().iter().map(|e| e.val() as u64).collect();
        s.serialize_field("c", &c)?;
        let m: Vec<u64> = self.basis_change.row_major().iter().map(|e| e.val() as u64).collect();
        s.serialize_field("basis_change", &m)?;
        s.serialize_field("alpha", &fp.phase_string(self.alpha))?;
        s.serialize_field("q", &self.q)?;
        s.serialize_field("a", &(self.a.val() as u64))?;
        s.end()
    }
}

fn check_degree(p: &NonClassicalPoly) -> Result<()> {
    let fp = p.fp();
    let (degree, depth) = p.degree_and_depth();
    if degree > fp.p() {
        return Err(Error::DegreeTooHigh { got: degree, bound: fp.p() });
    }
    if depth > 2 {
        return Err(Error::DepthTooHigh { got: depth, bound: 2 });
    }
    Ok(())
}

/// Splits a degree-at-most-p polynomial along a hyperplane on which it is
/// classical up to the constant. The covector is read off the depth-2 layer
/// of the canonical form (linear because of the degree bound); the returned
/// agreement is re-verified pointwise over the hyperplane when it has at
/// most 10^6 points.
pub fn hyperplane_restriction(p: &NonClassicalPoly) -> Result<HyperplaneSplit> {
    check_degree(p)?;
    let fp = p.fp();
    let n = p.n();
    if n == 0 {
        return Err(Error::Parse("need at least one variable".into()));
    }
    let deep = p.depth_layer(1);
    let mut c = vec![FpElem::ZERO; n];
    for (exps, coeff) in deep.terms() {
        let var = exps.iter().position(|&e| e > 0).expect("layer has no constant term");
        c[var] = coeff;
    }
    let c = FpVector::from_elems(c);

    let (basis_change, q, alpha) = if c.is_zero() {
        (FpMatrix::identity(n), p.depth_layer(0), p.alpha())
    } else {
        let t = (0..n).position(|i| !c.get(i).is_zero()).expect("covector is nonzero");
        let ct_inv = fp.inv(c.get(t))?;
        let mut cols = Vec::with_capacity(n);
        cols.push(FpVector::unit(n, t));
        for i in (0..n).filter(|&i| i != t) {
            let mut col = vec![FpElem::ZERO; n];
            col[i] = FpElem::ONE;
            col[t] = fp.neg(fp.mul(c.get(i), ct_inv));
            cols.push(FpVector::from_elems(col));
        }
        let to_original = FpMatrix::from_columns(cols)?;
        let composed = p.compose_linear(&to_original)?;
        let basis_change = to_original.inverse(fp)?;
        let q = composed.depth_layer(0).compose_linear(&basis_change)?;
        (basis_change, q, composed.alpha())
    };

    let split = HyperplaneSplit { c, basis_change, alpha, q, a: FpElem::ZERO };
    if (fp.p() as u64).checked_pow(n as u32 - 1).is_some_and(|pts| pts <= VERIFY_LIMIT) {
        verify_split(p, &split)?;
    }
    Ok(split)
}

fn verify_split(p: &NonClassicalPoly, split: &HyperplaneSplit) -> Result<()> {
    let fp = p.fp();
    let n = p.n();
    let to_original = split.basis_change.inverse(fp)?;
    let grid = Grid::new(fp, n - 1)?;
    for zidx in 0..grid.size() {
        let mut z = vec![FpElem::ZERO; n];
        for (t, &e) in grid.digits(zidx).coords().iter().enumerate() {
            z[t + 1] = e;
        }
        let x = to_original.mul_vec(fp, &FpVector::from_elems(z))?;
        if fp.dot(&split.c, &x)? != FpElem::ZERO {
            return Err(Error::Internal("basis change misses the hyperplane".into()));
        }
        let lhs = p.eval(&x)?;
        let rhs = fp.phase_add(split.alpha, fp.phase_from_elem(split.q.eval(&x)?));
        if lhs != rhs {
            return Err(Error::Internal(format!(
                "hyperplane agreement fails at {:?}: {} vs {}",
                x,
                fp.phase_string(lhs),
                fp.phase_string(rhs)
            )));
        }
    }
    Ok(())
}

/// A classical correlate together with its certified correlation.
#[derive(Clone, Debug)]
pub struct ExtractionResult {
    /// The classical polynomial the input correlates with, in the original
    /// coordinates.
    pub q_total: ClassicalPoly,
    /// Achieved correlation |E f e_p(-q_total)|.
    pub corr: f64,
    /// Measured starting correlation |E f e(-P)|.
    pub epsilon: f64,
    /// The certified lower bound epsilon / sqrt(p).
    pub floor: f64,
    /// The underlying split, with the linear correction filled in.
    pub split: HyperplaneSplit,
}

impl Serialize for ExtractionResult {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ExtractionResult", 5)?;
        s.serialize_field("q_total", &self.q_total)?;
        s.serialize_field("corr", &self.corr)?;
        s.serialize_field("epsilon", &self.epsilon)?;
        s.serialize_field("floor", &self.floor)?;
        s.serialize_field("split", &self.split)?;
        s.end()
    }
}

/// Extracts a classical polynomial correlating with `f`, given that `f`
/// correlates with the phase of `P` (degree at most p): splits P along its
/// hyperplane, averages f e_p(-Q) over each coset, and picks the strongest
/// frequency of the resulting single-variable function (smallest residue on
/// ties). The output satisfies corr >= |E f e(-P)| / sqrt(p).
pub fn extract_classical_correlate(
    f: &ComplexTable,
    p: &NonClassicalPoly,
) -> Result<ExtractionResult> {
    let fp = p.fp();
    if f.fp() != fp {
        return Err(Error::Parse(format!(
            "function over F_{} but polynomial over F_{}",
            f.fp().p(),
            fp.p()
        )));
    }
    if f.n() != p.n() {
        return Err(Error::DimensionMismatch { expected: p.n(), got: f.n() });
    }
    let mut split = hyperplane_restriction(p)?;
    let n = p.n();
    let to_original = split.basis_change.inverse(fp)?;
    let q_new = split.q.compose_linear(&to_original)?;

    // coset averages g(z_1) = E_{z'} f(M z) e_p(-Q(M z))
    let grid = Grid::new(fp, n)?;
    let q_values = q_new.eval_table()?;
    let mut sums = vec![Complex64::new(0.0, 0.0); fp.p() as usize];
    for zidx in 0..grid.size() {
        let z = grid.digits(zidx);
        let x = to_original.mul_vec(fp, &z)?;
        let fv = f.get(grid.index(&x)?);
        sums[z.get(0).idx()] += fv * fp.ep(fp.neg(q_values[zidx]));
    }
    let class_size = (grid.size() / fp.p() as usize) as f64;
    for s in sums.iter_mut() {
        *s /= class_size;
    }

    // transform over the transversal variable; argmax with smallest residue
    let mut best = (FpElem::ZERO, -1.0f64);
    for a in 0..fp.p() {
        let a = fp.elem(a as u64);
        let mut val = Complex64::new(0.0, 0.0);
        for (x1, g) in sums.iter().enumerate() {
            val += g * fp.ep(fp.neg(fp.mul(a, fp.elem(x1 as u64))));
        }
        let mag = (val / fp.p() as f64).norm();
        if mag > best.1 {
            best = (a, mag);
        }
    }
    let (a, corr) = best;
    split.a = a;

    // pull a z_1 back: z_1 = (basis_change x)_1
    let lin_terms: Vec<(Vec<u8>, FpElem)> = (0..n)
        .map(|i| {
            let mut exps = vec![0u8; n];
            exps[i] = 1;
            (exps, fp.mul(a, split.basis_change.get(0, i)))
        })
        .collect();
    let q_total = split.q.add(&ClassicalPoly::from_terms(fp, n, lin_terms)?)?;

    let epsilon = inner_product(f, &p.eval_table()?.to_complex())?.norm();
    let floor = epsilon / (fp.p() as f64).sqrt();
    Ok(ExtractionResult { q_total, corr, epsilon, floor, split })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp::Fp;
    use crate::poly::Monomial;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fp2() -> Fp {
        Fp::new(2).unwrap()
    }

    fn fp3() -> Fp {
        Fp::new(3).unwrap()
    }

    fn half_x1(fp: Fp, n: usize) -> NonClassicalPoly {
        let mut exps = vec![0u8; n];
        exps[0] = 1;
        NonClassicalPoly::from_terms(fp, n, PhaseValue::ZERO, vec![(Monomial::new(exps, 1), FpElem::ONE)])
            .unwrap()
    }

    #[test]
    fn split_of_lifted_linear_term() {
        let p = half_x1(fp2(), 2);
        let s = hyperplane_restriction(&p).unwrap();
        assert_eq!(s.c, FpVector::parse("1,0", fp2()).unwrap());
        assert_eq!(s.alpha, PhaseValue::ZERO);
        assert!(s.q.is_zero());
        assert!(s.a.is_zero());
    }

    #[test]
    fn split_of_classical_input_is_degenerate() {
        let fp = fp2();
        let p = ClassicalPoly::from_terms(fp, 2, vec![(vec![1, 1], FpElem::ONE)])
            .unwrap()
            .to_phase_poly();
        let s = hyperplane_restriction(&p).unwrap();
        assert!(s.c.is_zero());
        assert_eq!(s.basis_change, FpMatrix::identity(2));
        assert_eq!(s.q.coeff(&[1, 1]).val(), 1);
    }

    #[test]
    fn split_on_a_single_point_hyperplane() {
        let fp = fp2();
        let p = NonClassicalPoly::from_terms(
            fp,
            1,
            PhaseValue::ZERO,
            vec![(Monomial::new(vec![1], 1), FpElem::ONE), (Monomial::new(vec![1], 0), FpElem::ONE)],
        )
        .unwrap();
        let s = hyperplane_restriction(&p).unwrap();
        assert_eq!(s.c, FpVector::parse("1", fp).unwrap());
        assert_eq!(s.alpha, PhaseValue::ZERO);
        assert!(s.q.eval(&FpVector::zero(1)).unwrap().is_zero());
    }

    #[test]
    fn degree_and_depth_bounds_are_enforced() {
        let fp = fp2();
        let cubic = NonClassicalPoly::from_terms(
            fp,
            3,
            PhaseValue::ZERO,
            vec![(Monomial::new(vec![1, 1, 1], 0), FpElem::ONE)],
        )
        .unwrap();
        assert!(matches!(hyperplane_restriction(&cubic), Err(Error::DegreeTooHigh { got: 3, bound: 2 })));
    }

    #[test]
    fn random_splits_agree_on_the_hyperplane() {
        // the constructor re-verifies pointwise at these sizes, so this is
        // a pure smoke loop over the randomness
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for fp in [fp2(), fp3()] {
            for n in 1..=4 {
                for _ in 0..25 {
                    let p = NonClassicalPoly::random(fp, n, fp.p(), 2, &mut rng).unwrap();
                    hyperplane_restriction(&p).unwrap();
                }
            }
        }
    }

    #[test]
    fn extraction_on_the_four_point_example() {
        let fp = fp2();
        let p = half_x1(fp, 2);
        let f = p.eval_table().unwrap().to_complex();
        let r = extract_classical_correlate(&f, &p).unwrap();
        assert!(r.split.a.is_zero());
        assert!(r.q_total.is_zero());
        assert_abs_diff_eq!(r.corr, 0.5f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(r.epsilon, 1.0, epsilon = 1e-12);
        assert!(r.corr >= r.floor - 1e-9);
    }

    #[test]
    fn extraction_recovers_a_classical_phase_exactly() {
        let fp = fp3();
        let q = ClassicalPoly::from_terms(
            fp,
            2,
            vec![(vec![2, 1], fp.elem(2)), (vec![0, 1], FpElem::ONE)],
        )
        .unwrap();
        let p = q.to_phase_poly();
        let f = p.eval_table().unwrap().to_complex();
        let r = extract_classical_correlate(&f, &p).unwrap();
        assert_abs_diff_eq!(r.corr, 1.0, epsilon = 1e-12);
        let diff = r.q_total.add(&q.neg()).unwrap();
        assert!(diff.degree() == 0, "agreement up to a constant, got {diff:?}");
    }

    #[test]
    fn planted_instances_clear_the_floor() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for fp in [fp2(), fp3()] {
            for n in 1..=3 {
                for _ in 0..10 {
                    let p = NonClassicalPoly::random(fp, n, fp.p(), 2, &mut rng).unwrap();
                    let f = p.eval_table().unwrap().to_complex();
                    let r = extract_classical_correlate(&f, &p).unwrap();
                    assert!(r.epsilon > 1.0 - 1e-9);
                    assert!(
                        r.corr >= 1.0 / (fp.p() as f64).sqrt() - 1e-9,
                        "p = {}, corr = {}",
                        fp.p(),
                        r.corr
                    );
                }
            }
        }
    }

    #[test]
    fn guarantee_is_unconditional_for_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for fp in [fp2(), fp3()] {
            for _ in 0..10 {
                let f = ComplexTable::random(fp, 3, true, &mut rng).unwrap();
                let p = NonClassicalPoly::random(fp, 3, fp.p(), 2, &mut rng).unwrap();
                let r = extract_classical_correlate(&f, &p).unwrap();
                assert!(r.corr >= r.floor - 1e-9, "corr {} floor {}", r.corr, r.floor);
                // cross-check the reported correlation against a direct average
                let direct = inner_product(&f, &r.q_total.phase_table().unwrap().to_complex())
                    .unwrap()
                    .norm();
                assert_abs_diff_eq!(r.corr, direct, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn extraction_checks_dimensions() {
        let fp = fp2();
        let p = half_x1(fp, 2);
        let f = ComplexTable::random(fp, 3, true, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(matches!(
            extract_classical_correlate(&f, &p),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn split_serialization_shape() {
        let p = half_x1(fp2(), 2);
        let s = hyperplane_restriction(&p).unwrap();
        let json = serde_json::to_value(&s).unwrap();
        assert_eq!(json["c"], serde_json::json!([1, 0]));
        assert_eq!(json["basis_change"], serde_json::json!([1, 0, 0, 1]));
        assert_eq!(json["alpha"], "0/2^0");
        assert_eq!(json["a"], 0);
    }
}
