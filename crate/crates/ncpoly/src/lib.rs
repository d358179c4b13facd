//! Exact arithmetic and search tools for polynomial phase functions on `F_p^n`.
//!
//! The crate revolves around phase polynomials: functions `F_p^n -> R/Z` whose
//! iterated additive derivatives eventually vanish. Classical polynomials take
//! values in `(1/p)Z/Z`; the general ("non-classical") ones take values in
//! `(1/p^D)Z/Z` for a depth `D >= 1`. Everything that can be exact is exact:
//! phases are stored as integer numerators over a power of `p`, canonical forms
//! are computed by layer peeling, and floating point only enters when a phase
//! is finally mapped to the unit circle.
//!
//! Module map:
//!
//! * [`fp`] - prime-field context, elements, vectors, matrices.
//! * [`phase`] - exact elements of `(1/p^D)Z/Z` and their serialization.
//! * [`table`] - dense value tables over `F_p^n` (exact and complex).
//! * [`poly`] - canonical forms, evaluation, derivatives, linear substitution.
//! * [`gowers`] - uniformity norms, correlation, Fourier transform over `F_p^n`.
//! * [`quasisym`] - power-sum phase families, quasisymmetric polynomials, and
//!   the closed derivative forms attached to them.
//! * [`symmetrize`] - coloring of index subsets by degree-`d` coefficient data,
//!   monochromatic subset search, quasisymmetric restriction.
//! * [`hyperplane`] - depth reduction along a hyperplane and extraction of a
//!   classical correlate from a depth-two phase.
//! * [`search`] - exhaustive and sampled correlation maximization, vanishing
//!   probability experiments, decay curves.
//! * [`verify`] - the runtime self-check battery exposed by the CLI.

pub mod fp;
pub mod gowers;
pub mod hyperplane;
pub mod phase;
pub mod poly;
pub mod quasisym;
pub mod search;
pub mod symmetrize;
pub mod table;
pub mod verify;

pub use fp::{Fp, FpElem, FpMatrix, FpVector};
pub use gowers::{
    correlation, fourier, fourier_inverse, gowers_norm, gowers_norm_exact, gowers_norm_poly,
    inner_product, GowersResult, NormMethod,
};
pub use phase::PhaseValue;
pub use poly::{ClassicalPoly, Monomial, NonClassicalPoly};
pub use quasisym::{
    column_leading_coeff, compositions, decompose_degree, make_counterexample,
    multiaffine_leading_coeff, power_sum_derivative, power_sum_phase, quasisym_derivative,
    quasisym_poly, vector_form, Composition, Counterexample, DegreeSplit, DerivMode,
    DerivativeForm,
};
pub use hyperplane::{extract_classical_correlate, hyperplane_restriction, ExtractionResult, HyperplaneSplit};
pub use search::{
    decay_curve, enumerate_classical, max_correlation, zero_prob_experiment, ClassicalStream,
    DecayCurve, MonomialBasis, SearchMode, SearchReport, ZeroProbReport,
};
pub use symmetrize::{
    edge_color, find_monochromatic, lambda_set, restrict_decompose, EdgeColor,
    MonochromaticSearch, RestrictionResult,
};
pub use table::{ComplexTable, Grid, PhaseTable};
pub use verify::{run_battery, Check, VerifyReport};

/// Errors shared by every module in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0} is not a prime usable as a field modulus")]
    NotPrime(u32),
    #[error("p^max_depth overflows 64 bits (p = {p}, max depth = {max_depth})")]
    ContextOverflow { p: u32, max_depth: u32 },
    #[error("element {value} is not reduced modulo {p}")]
    InvalidElement { value: u64, p: u32 },
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("expected {expected} table entries, got {got}")]
    TableLength { expected: usize, got: usize },
    #[error("depth {depth} exceeds the configured maximum {max}")]
    DepthExceeded { depth: u32, max: u32 },
    #[error("exponent {exp} is not below p = {p}")]
    ExponentRange { exp: u32, p: u32 },
    #[error("coefficient must be a nonzero residue modulo {p}")]
    ZeroCoefficient { p: u32 },
    #[error("degree {got} exceeds the supported bound {bound}")]
    DegreeTooHigh { got: u32, bound: u32 },
    #[error("depth {got} exceeds the supported bound {bound}")]
    DepthTooHigh { got: u32, bound: u32 },
    #[error("enumeration needs {needed} items, budget allows {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("expected {expected} items, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid composition: {0}")]
    InvalidComposition(String),
    #[error("function is not multiaffine along sampled lines")]
    NotMultiaffine,
    #[error("leading coefficient vanishes")]
    ZeroLeadingCoefficient,
    #[error("mixed remainder has degree {got}, expected at most {bound}")]
    RemainderDegree { got: u32, bound: u32 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("polynomial is not classical: {0}")]
    NotClassical(String),
    #[error("subset is not valid here: {0}")]
    InvalidSubset(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
