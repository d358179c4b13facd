//! Uniformity norms, correlation, and the Fourier transform over `F_p^n`.
//!
//! The order-`d` uniformity norm of `f: F_p^n -> C` is
//!
//! ```text
//! ||f||_d^(2^d) = E_{x, h_1, .., h_d}  prod_{w in {0,1}^d}  C^{d - |w|} f(x + w . h)
//! ```
//!
//! with `C` complex conjugation. Two float evaluators (the product form above
//! and the derivative recursion) serve as mutual checks; for exact phase
//! tables the norm is computed from an integer histogram of iterated
//! derivative values, so "norm equal to one" is decided exactly.

use crate::poly::NonClassicalPoly;
use crate::table::{ComplexTable, PhaseTable};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// Which norm evaluator to run on a complex table.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NormMethod {
    /// Expectation of the full product over the `2^d` cube corners.
    Direct,
    /// `S(f, d) = E_h S(D_h f, d - 1)` down to `S(g, 1) = |E g|^2`.
    Recursive,
    /// Direct on small inputs, recursive otherwise.
    Auto,
}

#[derive(Clone, Debug, Serialize)]
pub struct GowersResult {
    pub d: u32,
    pub norm: f64,
    /// True only when the histogram shows every derivative value is zero.
    pub exactly_one: bool,
    pub method: &'static str,
    /// Number of `(x, h)` configurations the value aggregates.
    pub configurations: u128,
}

/// Multiplicative derivative `x -> f(x + h) conj(f(x))`, `h` given by index.
pub fn mult_derivative(f: &ComplexTable, h: usize) -> ComplexTable {
    let grid = f.grid();
    let values = (0..grid.size())
        .map(|x| f.get(grid.add(x, h)) * f.get(x).conj())
        .collect();
    ComplexTable::new(grid.fp(), grid.n(), values).expect("length preserved")
}

/// Uniformity norm of a complex table (floating point).
pub fn gowers_norm(f: &ComplexTable, d: u32, method: NormMethod) -> Result<GowersResult> {
    if d == 0 {
        return Err(Error::Parse("norm order d must be at least 1".into()));
    }
    let size = f.grid().size() as u128;
    let configurations = size.checked_pow(d + 1).unwrap_or(u128::MAX);
    let direct_cost = configurations.saturating_mul(1u128 << d.min(100));
    let use_direct = match method {
        NormMethod::Direct => true,
        NormMethod::Recursive => false,
        NormMethod::Auto => direct_cost <= 1 << 22,
    };
    let (s, method) = if use_direct {
        (direct_moment(f, d), "direct")
    } else {
        (recursive_moment(f, d), "recursive")
    };
    Ok(GowersResult {
        d,
        norm: s.max(0.0).powf(1.0 / (1u64 << d) as f64),
        exactly_one: false,
        method,
        configurations,
    })
}

fn direct_moment(f: &ComplexTable, d: u32) -> f64 {
    let grid = f.grid();
    let size = grid.size();
    let mut hs = vec![0usize; d as usize];
    let mut total = Complex64::new(0.0, 0.0);
    let mut tuples = 0u64;
    loop {
        for x in 0..size {
            let mut prod = Complex64::new(1.0, 0.0);
            for mask in 0u32..(1 << d) {
                let mut idx = x;
                for (i, &h) in hs.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        idx = grid.add(idx, h);
                    }
                }
                let v = f.get(idx);
                prod *= if (d - mask.count_ones()) % 2 == 1 { v.conj() } else { v };
            }
            total += prod;
        }
        tuples += 1;
        if !step_odometer(&mut hs, size) {
            break;
        }
    }
    (total / (tuples as f64 * size as f64)).re
}

fn recursive_moment(f: &ComplexTable, d: u32) -> f64 {
    if d == 1 {
        return f.mean().norm_sqr();
    }
    // one float per shift, summed in index order for reproducibility
    let parts: Vec<f64> = (0..f.grid().size())
        .into_par_iter()
        .map(|h| recursive_moment_seq(&mult_derivative(f, h), d - 1))
        .collect();
    parts.iter().sum::<f64>() / f.grid().size() as f64
}

fn recursive_moment_seq(f: &ComplexTable, d: u32) -> f64 {
    if d == 1 {
        return f.mean().norm_sqr();
    }
    let sum: f64 = (0..f.grid().size())
        .map(|h| recursive_moment_seq(&mult_derivative(f, h), d - 1))
        .sum();
    sum / f.grid().size() as f64
}

/// Advances a mixed-radix counter; false when it wraps to all zeros.
fn step_odometer(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

/// Exact uniformity norm of a phase table. The degree of the canonical form
/// decides whether the base point can be dropped (the `d`-fold derivative of
/// a degree `<= d` phase polynomial does not depend on it).
pub fn gowers_norm_exact(t: &PhaseTable, d: u32, budget: u64) -> Result<GowersResult> {
    let degree = NonClassicalPoly::canonicalize(t)?.degree();
    gowers_norm_exact_with_degree(t, degree, d, budget)
}

/// Exact uniformity norm of the phase of a canonical polynomial.
pub fn gowers_norm_poly(p: &NonClassicalPoly, d: u32, budget: u64) -> Result<GowersResult> {
    gowers_norm_exact_with_degree(&p.eval_table()?, p.degree(), d, budget)
}

fn gowers_norm_exact_with_degree(
    t: &PhaseTable,
    degree: u32,
    d: u32,
    budget: u64,
) -> Result<GowersResult> {
    if d == 0 {
        return Err(Error::Parse("norm order d must be at least 1".into()));
    }
    let fp = t.fp();
    let grid = t.grid();
    let size = grid.size();
    let h_only = degree <= d;
    let slots = if h_only { d } else { d + 1 };
    let configurations = (size as u128).checked_pow(slots).unwrap_or(u128::MAX);
    if configurations > budget as u128 {
        return Err(Error::BudgetExceeded { needed: configurations, budget });
    }
    let depth = t.max_depth();
    let modulus = fp.pow_depth(depth);
    let nums: Vec<u64> = t
        .values()
        .iter()
        .map(|v| v.numerator() * fp.pow_depth(depth - v.depth()))
        .collect();

    // histogram of the d-fold derivative value over all configurations
    let signs: Vec<bool> = (0u32..(1 << d)).map(|mask| (d - mask.count_ones()) % 2 == 0).collect();
    let hists: Vec<Histogram> = (0..size)
        .into_par_iter()
        .map(|first| {
            let mut hist = Histogram::new(modulus);
            let mut rest = vec![0usize; slots as usize - 1];
            loop {
                // base point x is the last slot in full mode, absent otherwise
                let (x, h_rest) = if h_only {
                    (0, &rest[..])
                } else {
                    (*rest.last().unwrap(), &rest[..rest.len() - 1])
                };
                let mut acc: u128 = 0;
                for (mask, &plus) in signs.iter().enumerate() {
                    let mut idx = x;
                    if mask & 1 != 0 {
                        idx = grid.add(idx, first);
                    }
                    for (i, &h) in h_rest.iter().enumerate() {
                        if mask & (2 << i) != 0 {
                            idx = grid.add(idx, h);
                        }
                    }
                    let v = nums[idx];
                    acc += if plus { v } else { (modulus - v) % modulus } as u128;
                }
                hist.bump((acc % modulus as u128) as u64);
                if !step_odometer(&mut rest, size) {
                    break;
                }
            }
            hist
        })
        .collect();
    let mut hist = Histogram::new(modulus);
    for h in hists {
        hist.absorb(h);
    }

    let total: u128 = configurations;
    if hist.count_of(0) as u128 == total {
        return Ok(GowersResult {
            d,
            norm: 1.0,
            exactly_one: true,
            method: if h_only { "exact-h" } else { "exact-full" },
            configurations,
        });
    }
    let mut s = Complex64::new(0.0, 0.0);
    for (value, count) in hist.entries() {
        s += fp.phase_complex(fp.phase(value, depth).expect("depth within cap")) * count as f64;
    }
    let s = (s / total as f64).norm();
    Ok(GowersResult {
        d,
        norm: s.powf(1.0 / (1u64 << d) as f64),
        exactly_one: false,
        method: if h_only { "exact-h" } else { "exact-full" },
        configurations,
    })
}

/// Integer histogram over `(1/m)Z/Z` numerators; dense for small moduli.
enum Histogram {
    Dense(Vec<u64>),
    Sparse(BTreeMap<u64, u64>),
}

impl Histogram {
    fn new(modulus: u64) -> Histogram {
        if modulus <= 1 << 22 {
            Histogram::Dense(vec![0; modulus as usize])
        } else {
            Histogram::Sparse(BTreeMap::new())
        }
    }

    fn bump(&mut self, value: u64) {
        match self {
            Histogram::Dense(v) => v[value as usize] += 1,
            Histogram::Sparse(m) => *m.entry(value).or_insert(0) += 1,
        }
    }

    fn absorb(&mut self, other: Histogram) {
        match (self, other) {
            (Histogram::Dense(a), Histogram::Dense(b)) => {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
            }
            (Histogram::Sparse(a), Histogram::Sparse(b)) => {
                for (k, v) in b {
                    *a.entry(k).or_insert(0) += v;
                }
            }
            _ => unreachable!("histograms share the modulus"),
        }
    }

    fn count_of(&self, value: u64) -> u64 {
        match self {
            Histogram::Dense(v) => v[value as usize],
            Histogram::Sparse(m) => m.get(&value).copied().unwrap_or(0),
        }
    }

    fn entries(&self) -> Vec<(u64, u64)> {
        match self {
            Histogram::Dense(v) => {
                v.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, &c)| (i as u64, c)).collect()
            }
            Histogram::Sparse(m) => m.iter().map(|(&k, &v)| (k, v)).collect(),
        }
    }
}

/// `E f conj(g)` over a shared grid.
pub fn inner_product(f: &ComplexTable, g: &ComplexTable) -> Result<Complex64> {
    check_same_grid(f.fp().p(), f.n(), g.fp().p(), g.n(), g.grid().size())?;
    let sum: Complex64 = f.values().iter().zip(g.values()).map(|(a, b)| a * b.conj()).sum();
    Ok(sum / f.grid().size() as f64)
}

/// `|E e(f - g)|` for two exact phase tables.
pub fn correlation(f: &PhaseTable, g: &PhaseTable) -> Result<f64> {
    check_same_grid(f.fp().p(), f.n(), g.fp().p(), g.n(), g.grid().size())?;
    let fp = f.fp();
    let mut sum = Complex64::new(0.0, 0.0);
    for (a, b) in f.values().iter().zip(g.values()) {
        sum += fp.phase_complex(fp.phase_sub(*a, *b));
    }
    Ok((sum / f.grid().size() as f64).norm())
}

fn check_same_grid(p1: u32, n1: usize, p2: u32, n2: usize, size2: usize) -> Result<()> {
    if p1 != p2 {
        return Err(Error::Parse(format!("tables live over different primes {p1} and {p2}")));
    }
    if n1 != n2 {
        return Err(Error::DimensionMismatch { expected: n1, got: n2 });
    }
    let _ = size2;
    Ok(())
}

/// Fourier transform `a -> E_x f(x) e(-<a, x>/p)`, one butterfly per axis.
pub fn fourier(f: &ComplexTable) -> ComplexTable {
    let mut values = axis_character_pass(f, -1.0);
    let scale = 1.0 / f.grid().size() as f64;
    for v in values.iter_mut() {
        *v *= scale;
    }
    ComplexTable::new(f.fp(), f.n(), values).expect("length preserved")
}

/// Inverse transform `x -> sum_a g(a) e(<a, x>/p)`.
pub fn fourier_inverse(g: &ComplexTable) -> ComplexTable {
    let values = axis_character_pass(g, 1.0);
    ComplexTable::new(g.fp(), g.n(), values).expect("length preserved")
}

fn axis_character_pass(f: &ComplexTable, sign: f64) -> Vec<Complex64> {
    let grid = f.grid();
    let p = grid.fp().p() as usize;
    let w: Vec<Complex64> = (0..p * p)
        .map(|i| {
            let angle = sign * std::f64::consts::TAU * ((i / p * (i % p)) % p) as f64 / p as f64;
            Complex64::from_polar(1.0, angle)
        })
        .collect();
    let mut vals = f.values().to_vec();
    let mut fiber = vec![Complex64::new(0.0, 0.0); p];
    for axis in 0..grid.n() {
        let stride = p.pow(axis as u32);
        let block = stride * p;
        for start in (0..vals.len()).step_by(block) {
            for off in 0..stride {
                let base = start + off;
                for (a, out) in fiber.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for t in 0..p {
                        acc += vals[base + t * stride] * w[t * p + a];
                    }
                    *out = acc;
                }
                for a in 0..p {
                    vals[base + a * stride] = fiber[a];
                }
            }
        }
    }
    vals
}
