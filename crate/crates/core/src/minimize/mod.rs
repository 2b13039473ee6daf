//! Projected gradient descent for the circle and cylinder energies, descent
//! on the lifted angle of in-plane fields, and classification of the results
//! against the known closed-form critical points.

mod descent;
mod family;

pub use descent::{
    descend_circle, descend_cylinder, descend_theta, multistart_circle, multistart_cylinder,
    random_circle_init, random_cylinder_init, ring_average, theta_energy, Constraint,
    DescentOptions, DescentTrace, Metric, COARSE_N, COARSE_Z, WAS_TOL,
};
pub use family::{match_cylinder, match_to_family, Family, FamilyMatch, MATCH_TOL};
