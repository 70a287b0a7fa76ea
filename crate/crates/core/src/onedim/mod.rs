//! Scalar marginals: the characterisation battery for sets on the line,
//! potentials of monotone curves by quadrature, Young's inequality and the
//! `(t, t^3, t^5)` curve.

mod bijection;
mod characterize;
mod curves;
mod knott_smith;
mod quadrature;

pub use bijection::MonotoneBijection;
pub use characterize::{
    characterize_1d, characterize_cost, Characterization1d, OrderVerdict, SubgradientItem, CHARACTERIZE_MAX_ORDER,
};
pub use curves::{
    cumulative_integral, curve_gamma, curve_potentials, emit_curve_figure_data, perturb_curve_point, young_check,
    CurvePotentials, FigureData, YoungReport, YOUNG_EQUALITY_TOLERANCE,
};
pub use knott_smith::{
    knott_smith_alphas, knott_smith_closed_forms, knott_smith_conjugate_check, knott_smith_potentials,
    knott_smith_shifted_forms, knott_smith_verify, ConjugateCheck, ConjugateRow, KnottSmithConfig, KnottSmithReport,
    KnottSmithValues,
};
pub use quadrature::{integrate, Quadrature, QUAD_EPS};
