//! Verification of multi-marginal c-cyclic monotonicity for finite sets and
//! explicit construction of c-splitting potentials.
//!
//! A cost `c(x_1, ..., x_N) = sum_{i<j} c_ij(x_i, x_j) + sum_i h_i(x_i)` is
//! described by a [`CostSpec`]; a finite set of tuples by a [`GammaSet`].
//! The [`monotone`] module decides monotonicity, [`antiderivative`] builds
//! Rockafellar potentials and conjugates, and [`splitting`] assembles and
//! certifies splitting tuples. [`onedim`] and [`quadratic`] hold the scalar
//! and matrix examples.

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod antiderivative;
pub mod closed_form;
pub mod cost;
pub mod error;
pub mod gamma;
pub mod io;
pub mod monotone;
pub mod onedim;
pub mod point;
pub mod quadratic;
pub mod splitting;

pub use antiderivative::Potential;
pub use closed_form::{ClosedForm, Constraint, PowerTerm};
pub use cost::{classical_cost, Classical, CostKind, CostSpec, PairwiseCost};
pub use error::{Error, Result};
pub use gamma::GammaSet;
pub use monotone::{MonotonicityVerdict, Witness, TOLERANCE};
pub use point::{MarginalPoint, ProductPoint};
pub use splitting::{SplittingCertificate, SplittingTuple};
