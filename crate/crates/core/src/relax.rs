//! The relaxed problem: unit length is replaced by `(1/2π)∫|u|² = 1`, so
//! minimizing the energy becomes a Rayleigh-quotient eigenvalue problem.
//! The sharp Poincaré constant `c²_κ` is known in closed form and is
//! cross-checked here against a dense finite-difference eigen-solve.

use std::fmt;

use faer::{Mat, Side};
use num_traits::Float;
use serde::Serialize;

use crate::energy::{circle_energy, EnergyParams};
use crate::error::{Error, Result};
use crate::grid::{ConstraintKind, PeriodicGrid, VectorField};
use crate::scalar::{count, lit, to_f64, Real};
use crate::vec3::Vec3;

/// Tolerance on `κ² - 3` below which the critical regime is reported.
pub const CRITICAL_TOL: f64 = 1e-12;

/// Highest Fourier block inspected by the closed-form consistency check.
pub const BLOCK_CUTOFF: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

impl Regime {
    pub fn classify<T: Real>(kappa2: T) -> Self {
        let d = to_f64(kappa2) - 3.0;
        if d.abs() <= CRITICAL_TOL {
            Regime::Critical
        } else if d > 0.0 {
            Regime::Supercritical
        } else {
            Regime::Subcritical
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
            Regime::Supercritical => "supercritical",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoincareResult<T> {
    pub kappa2: T,
    pub omega2: T,
    pub c2_closed: T,
    pub c2_numeric: Option<T>,
    pub phi_kappa: T,
    pub regime: Regime,
}

/// Sign choice: `±n` above the threshold and the `±` of the critical family.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Branch {
    #[default]
    Plus,
    Minus,
}

impl Branch {
    fn sign<T: Real>(self) -> T {
        match self {
            Branch::Plus => T::one(),
            Branch::Minus => -T::one(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExtremalParams<T> {
    pub theta: T,
    /// Only used at `κ² = 3`; must lie in `[0, 1/√5]`.
    pub rho1: T,
    pub branch: Branch,
}

impl<T: Real> Default for ExtremalParams<T> {
    fn default() -> Self {
        Self {
            theta: T::zero(),
            rho1: T::zero(),
            branch: Branch::Plus,
        }
    }
}

fn check_kappa2<T: Real>(kappa2: T) -> Result<()> {
    if kappa2.is_finite() && kappa2 > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "kappa2 must be positive, got {kappa2}"
        )))
    }
}

/// `ω²_κ = √(κ⁴ + 16)`.
pub fn omega2<T: Real>(kappa2: T) -> T {
    (kappa2 * kappa2 + lit(16.0)).sqrt()
}

/// `φ_κ = ½ arctan(4/κ²)`.
pub fn phi_kappa<T: Real>(kappa2: T) -> T {
    lit::<T>(0.5) * (lit::<T>(4.0) / kappa2).atan()
}

/// Smallest eigenvalue of the in-plane Fourier block of frequency `n`:
/// `κ²/2 + n² + 1 - ½√(κ⁴ + 16n²)` for `n ≥ 1`, and `1` for `n = 0`.
pub fn block_eigenvalue<T: Real>(n: u32, kappa2: T) -> T {
    if n == 0 {
        return T::one();
    }
    let n2 = count::<T>(n as usize).powi(2);
    let half = lit::<T>(0.5);
    kappa2 * half + n2 + T::one() - half * (kappa2 * kappa2 + lit::<T>(16.0) * n2).sqrt()
}

/// `c²_κ` from the closed form, with `φ_κ`, `ω²_κ` and the regime.
pub fn closed_form_constant<T: Real>(kappa2: T) -> Result<PoincareResult<T>> {
    check_kappa2(kappa2)?;
    let regime = Regime::classify(kappa2);
    let om = omega2(kappa2);
    let c2 = match regime {
        Regime::Subcritical => lit::<T>(0.5) * (kappa2 - om + lit(4.0)),
        _ => T::one(),
    };
    let block_min = (0..=BLOCK_CUTOFF)
        .map(|n| block_eigenvalue(n, kappa2))
        .fold(T::infinity(), Float::min);
    let tol = lit::<T>(1e-12).max(lit::<T>(64.0) * T::epsilon());
    if Float::abs(block_min - c2) > tol {
        return Err(Error::StructureViolation(format!(
            "closed form {c2} disagrees with block minimum {block_min} at kappa2 = {kappa2}"
        )));
    }
    Ok(PoincareResult {
        kappa2,
        omega2: om,
        c2_closed: c2,
        c2_numeric: None,
        phi_kappa: phi_kappa(kappa2),
        regime,
    })
}

/// Bounds `(0, min{κ²/2, 1})` for the relaxed minimum.
pub fn relaxed_energy_bounds<T: Real>(kappa2: T) -> Result<(T, T)> {
    check_kappa2(kappa2)?;
    Ok((T::zero(), (kappa2 * lit(0.5)).min(T::one())))
}

/// Rayleigh quotient `F(u) / ∫|u|²` of an arbitrary field.
pub fn rayleigh_quotient<T: Real>(field: &VectorField<T>, kappa2: T) -> Result<T> {
    let e = circle_energy(field, &EnergyParams::new(kappa2)?).total;
    let mass: T = field.values().iter().map(|v| v.norm_sq()).sum::<T>() * field.grid().spacing();
    if mass <= T::zero() {
        return Err(Error::InvalidParameter(
            "zero field has no Rayleigh quotient".into(),
        ));
    }
    Ok(e / mass)
}

/// Dense `3N x 3N` matrix of `-∂_tt + κ²(I - n⊗n)` with the periodic
/// 3-point Laplacian; unknown `(i, c)` sits at index `3i + c`. The mass
/// matrix is `h I` and the energy carries a factor `2π` against the mass
/// normalization, which cancel in the eigenvalues.
fn oracle_matrix(kappa2: f64, n: usize) -> Mat<f64> {
    let h = std::f64::consts::TAU / n as f64;
    let lap = 1.0 / (h * h);
    let nodes: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let t = -std::f64::consts::PI + h * i as f64;
            (t.cos(), t.sin())
        })
        .collect();
    let mut a = Mat::<f64>::zeros(3 * n, 3 * n);
    for i in 0..n {
        let (c, s) = nodes[i];
        let nn = [[c * c, c * s, 0.0], [s * c, s * s, 0.0], [0.0, 0.0, 0.0]];
        for p in 0..3 {
            a.write(3 * i + p, 3 * i + p, 2.0 * lap);
            a.write(3 * i + p, 3 * ((i + 1) % n) + p, -lap);
            a.write(3 * i + p, 3 * ((i + n - 1) % n) + p, -lap);
            for q in 0..3 {
                let delta = if p == q { 1.0 } else { 0.0 };
                let v = a.read(3 * i + p, 3 * i + q) + kappa2 * (delta - nn[p][q]);
                a.write(3 * i + p, 3 * i + q, v);
            }
        }
    }
    a
}

/// Spectrum of the finite-difference relaxed operator, ascending.
pub fn oracle_spectrum<T: Real>(kappa2: T, grid: &PeriodicGrid<T>) -> Result<Vec<T>> {
    check_kappa2(kappa2)?;
    let n = grid.n_points();
    let mut ev = oracle_matrix(to_f64(kappa2), n).selfadjoint_eigenvalues(Side::Lower);
    ev.sort_by(|x, y| x.total_cmp(y));
    Ok(ev.into_iter().map(|x| T::from(x).unwrap()).collect())
}

/// Smallest eigenvalue of the finite-difference relaxed operator: an
/// independent approximation of `c²_κ`.
pub fn numerical_constant<T: Real>(kappa2: T, grid: &PeriodicGrid<T>) -> Result<T> {
    Ok(oracle_spectrum(kappa2, grid)?[0])
}

/// Lowest eigenpair of the oracle; the eigenvector is normalized to
/// `(1/2π)∫|u|² = 1`.
pub fn oracle_lowest_mode<T: Real>(
    kappa2: T,
    grid: &PeriodicGrid<T>,
) -> Result<(T, VectorField<T>)> {
    check_kappa2(kappa2)?;
    let n = grid.n_points();
    let eig = oracle_matrix(to_f64(kappa2), n).selfadjoint_eigendecomposition(Side::Lower);
    let s = eig.s().column_vector();
    let u = eig.u();
    let (k, _) = (0..3 * n)
        .map(|k| (k, s.read(k)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty spectrum");
    let scale = (n as f64).sqrt();
    let values = (0..n)
        .map(|i| {
            let c = |p| T::from(u.read(3 * i + p, k) * scale).unwrap();
            Vec3::new(c(0), c(1), c(2))
        })
        .collect();
    Ok((
        T::from(s.read(k)).unwrap(),
        VectorField::new(grid.clone(), values, ConstraintKind::Unconstrained)?,
    ))
}

/// Closed form completed by the oracle eigenvalue.
pub fn poincare<T: Real>(kappa2: T, grid: &PeriodicGrid<T>) -> Result<PoincareResult<T>> {
    let mut r = closed_form_constant(kappa2)?;
    r.c2_numeric = Some(numerical_constant(kappa2, grid)?);
    Ok(r)
}

/// A field attaining `c²_κ` in the relaxed problem, normalized to
/// `(1/2π)∫|u|² = 1`.
pub fn extremal_field<T: Real>(
    kappa2: T,
    params: ExtremalParams<T>,
    grid: &PeriodicGrid<T>,
) -> Result<VectorField<T>> {
    check_kappa2(kappa2)?;
    let sqrt2 = lit::<T>(2.0).sqrt();
    let sign = params.branch.sign::<T>();
    let theta = params.theta;
    let values: Vec<Vec3<T>> = match Regime::classify(kappa2) {
        Regime::Supercritical => (0..grid.n_points())
            .map(|i| grid.normal(i) * sign)
            .collect(),
        Regime::Critical => {
            let rho = params.rho1;
            let max_rho = lit::<T>(0.2).sqrt();
            if !(rho >= T::zero() && rho <= max_rho + T::epsilon()) {
                return Err(Error::InvalidParameter(format!(
                    "rho1 must lie in [0, 1/sqrt(5)], got {rho}"
                )));
            }
            let base = sign * (T::one() - lit::<T>(5.0) * rho * rho).max(T::zero()).sqrt();
            grid.nodes()
                .iter()
                .enumerate()
                .map(|(i, &t)| {
                    let f = grid.frame(i);
                    let (s, c) = (theta + t).sin_cos();
                    f.tangent * (sqrt2 * rho * c)
                        + f.normal * (base + lit::<T>(2.0) * sqrt2 * rho * s)
                })
                .collect()
        }
        Regime::Subcritical => {
            let (sp, cp) = phi_kappa(kappa2).sin_cos();
            grid.nodes()
                .iter()
                .enumerate()
                .map(|(i, &t)| {
                    let f = grid.frame(i);
                    let (s, c) = (theta + t).sin_cos();
                    f.tangent * (sqrt2 * sp * c * sign) + f.normal * (sqrt2 * cp * s * sign)
                })
                .collect()
        }
    };
    VectorField::new(grid.clone(), values, ConstraintKind::Unconstrained)
}

/// `max|u_i| - min|u_i|`: zero for sphere-valued fields.
pub fn norm_spread<T: Real>(field: &VectorField<T>) -> T {
    let norms = field.values().iter().map(|v| v.norm());
    let (lo, hi) = norms.fold((T::infinity(), T::neg_infinity()), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    });
    hi - lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use std::f64::consts::PI;

    #[test]
    fn block_eigenvalue_examples() {
        assert!((block_eigenvalue(1, 3.0) - 1.0).abs() < 1e-15);
        assert_eq!(block_eigenvalue(0, 0.7), 1.0);
        assert!((block_eigenvalue(1, 1.0) - (2.5 - 0.5 * 17f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn closed_form_examples() {
        let r = closed_form_constant(4.0).unwrap();
        assert_eq!(r.c2_closed, 1.0);
        assert_eq!(r.regime, Regime::Supercritical);
        assert!((r.phi_kappa - PI / 8.0).abs() < 1e-15);
        let r = closed_form_constant(3.0).unwrap();
        assert_eq!(r.regime, Regime::Critical);
        assert!((r.omega2 - 5.0).abs() < 1e-15);
        assert!((0.5 * (3.0 - r.omega2 + 4.0) - 1.0).abs() < 1e-15);
        let r = closed_form_constant(1.0).unwrap();
        assert!((r.c2_closed - 0.438447187191170).abs() < 1e-12);
        assert_eq!(r.regime, Regime::Subcritical);
        assert!(closed_form_constant(0.0).is_err());
        assert!(closed_form_constant(-1.0).is_err());
    }

    #[test]
    fn bounds() {
        assert_eq!(relaxed_energy_bounds(1.0).unwrap(), (0.0, 0.5));
        assert_eq!(relaxed_energy_bounds(4.0).unwrap(), (0.0, 1.0));
        let c = closed_form_constant(1e-6).unwrap().c2_closed;
        assert!(c > 0.0 && c <= relaxed_energy_bounds(1e-6).unwrap().1);
    }

    #[test]
    fn oracle_small_grid_brackets_closed_form() {
        let g = make_grid(64).unwrap();
        for k2 in [0.5, 4.0] {
            let c = closed_form_constant(k2).unwrap().c2_closed;
            let num = numerical_constant(k2, &g).unwrap();
            assert!((num - c).abs() < 2e-3, "{k2}: {num} vs {c}");
        }
    }

    #[test]
    fn oracle_mode_is_planar() {
        let g = make_grid(48).unwrap();
        let (lam, u) = oracle_lowest_mode(1.0, &g).unwrap();
        assert!((lam - numerical_constant(1.0, &g).unwrap()).abs() < 1e-12);
        let max_z = u.values().iter().map(|v| v.z.abs()).fold(0.0, f64::max);
        assert!(max_z < 1e-8, "{max_z}");
        let mass: f64 =
            u.values().iter().map(|v| v.norm_sq()).sum::<f64>() * g.spacing() / (2.0 * PI);
        assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn extremal_fields_attain_constant() {
        let g = make_grid(64).unwrap();
        for k2 in [0.25, 1.0, 2.0, 3.0, 4.0] {
            let c = closed_form_constant(k2).unwrap().c2_closed;
            for theta in [0.0, 0.7, -2.0] {
                for rho1 in [0.0, 0.3] {
                    let p = ExtremalParams {
                        theta,
                        rho1,
                        branch: Branch::Minus,
                    };
                    let u = extremal_field(k2, p, &g).unwrap();
                    let mass: f64 = u.values().iter().map(|v| v.norm_sq()).sum::<f64>()
                        * g.spacing()
                        / (2.0 * PI);
                    assert!((mass - 1.0).abs() < 1e-10);
                    assert!(
                        (rayleigh_quotient(&u, k2).unwrap() - c).abs() < 1e-10,
                        "{k2} {theta} {} {c}",
                        rayleigh_quotient(&u, k2).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn critical_family_limits() {
        let g = make_grid(32).unwrap();
        let p = ExtremalParams {
            theta: 1.1,
            rho1: 0.0,
            branch: Branch::Plus,
        };
        let u = extremal_field(3.0, p, &g).unwrap();
        for (i, v) in u.values().iter().enumerate() {
            assert!(v.max_abs_diff(g.normal(i)) < 1e-15);
        }
        let bad = ExtremalParams { rho1: 0.5, ..p };
        assert!(extremal_field(3.0, bad, &g).is_err());
    }

    #[test]
    fn subcritical_extremal_is_not_sphere_valued() {
        let g = make_grid(64).unwrap();
        let u = extremal_field(1.0, ExtremalParams::default(), &g).unwrap();
        assert!(norm_spread(&u) > 0.05);
    }
}
