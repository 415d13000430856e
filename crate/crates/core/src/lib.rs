//! Bernstein-type exponential operators on the unit hypercube.
//!
//! For a rate `mu > 0` the operators
//!
//! ```text
//! G_n f(x) = sum_k f(k/n) e^{-mu k/n} e^{mu x} p_{n,k}(a_n(x)),
//! a_n(x)   = (e^{mu x/n} - 1) / (e^{mu/n} - 1),
//! ```
//!
//! reproduce `e^{mu x}` and `e^{2 mu x}` exactly. Their tensor-product
//! extension to `[0,1]^d` reproduces `e^{mu (x_1 + ... + x_d)}` and its square.
//! The crate evaluates both the classical and the exponential families,
//! their closed forms on exponential monomials, and the tooling needed to
//! check convergence: moduli of continuity, the quantitative error bound and
//! log-log rate fits.

pub mod analysis;
pub mod basis;
mod binom;
pub mod corpus;
pub mod error;
pub mod numeric;
pub mod operators1d;
pub mod report;
pub mod tensor;

pub use basis::{
    basis_vector, bernstein_basis, d_max, exp_weights, first_moment, gamma_n_closed, gamma_n_grid, warp,
    BasisWeights, OperatorParams, DEFAULT_D_MAX,
};
pub use corpus::{builtin_corpus, Corpus, CorpusEntry, Tag};
pub use error::{Error, Result};
pub use operators1d::{
    bernstein_apply, gn_apply, gn_centered_exp_sq, gn_e0_closed, gn_exp3_closed, gn_exp4_closed,
    gn_via_bernstein, voronovskaja_e0_check, voronovskaja_threshold, Function1D, VoronovskajaCheck,
};
pub use tensor::{
    apply_on_grid, multi_bernstein_apply, multi_gn_apply, multi_gn_centered_exp_sq, multi_gn_e0_closed,
    multi_gn_e3_closed, multi_gn_e4_closed, multi_gn_power_apply, multi_gn_via_bernstein, sup_error,
    Grid, OperatorKind, SampleLattice, ScalarField, TensorOperator,
};
