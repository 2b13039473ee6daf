//! Minimizers of the anisotropic Dirichlet energy
//! `∫|∇m|² + κ²∫|m × n|²` for unit vector fields on a circle and on the
//! cylinder `[-1, 1] x S¹`.
//!
//! The numerical core is generic over the scalar type (`f32` or `f64`); the
//! aliases below fix it to `f64`, which is what the command-line tool uses.
//! Dense eigen-solves always run in `f64`.

// `!(x > 0)` is the NaN-rejecting guard used throughout; index loops in
// the dense assemblies follow the matrix formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod elliptic;
pub mod energy;
pub mod error;
pub mod grid;
pub mod io;
pub mod minimize;
pub mod quadrature;
pub mod relax;
pub mod roots;
pub mod scalar;
pub mod spectral;
pub mod vec3;

pub use elliptic::{
    complete_e, degree_zero_minimizer, elliptic_f, jacobi_am, solve_alpha, solve_threshold,
    AmplitudeMap, EllipticSolution,
};
pub use energy::{
    circle_energy, cylinder_energy, el_residual, energy_gradient, second_variation_min_eig,
    second_variation_value, EnergyParams, EnergyReport,
};
pub use error::{Error, Result};
pub use grid::{
    frame_decompose, lift_angle, make_grid, sample_normal_field, sample_u_theta, winding_degree,
    AngleProfile, ConstraintKind, CylinderField, PeriodicGrid, VectorField,
};
pub use minimize::{
    descend_circle, descend_cylinder, descend_theta, match_to_family, Constraint, DescentOptions,
    DescentTrace, Family, FamilyMatch,
};
pub use relax::{
    block_eigenvalue, closed_form_constant, extremal_field, numerical_constant,
    relaxed_energy_bounds, ExtremalParams, PoincareResult, Regime,
};
pub use scalar::Real;
pub use vec3::Vec3;

pub type Grid = PeriodicGrid<f64>;
pub type Field = VectorField<f64>;
pub type CylField = CylinderField<f64>;
pub type Angles = AngleProfile<f64>;
pub type Params = EnergyParams<f64>;
pub type Options = DescentOptions<f64>;

pub type Grid32 = PeriodicGrid<f32>;
pub type Field32 = VectorField<f32>;
pub type CylField32 = CylinderField<f32>;
pub type Angles32 = AngleProfile<f32>;
