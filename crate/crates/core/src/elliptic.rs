//! Degree-zero in-plane minimizers: the transcendental parameter `α_κ`, the
//! elliptic-type integrals `F_κ` and `E_κ`, the amplitude `am_κ = F_κ⁻¹`,
//! and the anisotropy `κ²*` at which degree-zero and degree-one minimizers
//! exchange optimality.

use num_traits::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{winding_degree, AngleProfile, PeriodicGrid, VectorField};
use crate::quadrature::integrate;
use crate::roots::brent;
use crate::scalar::{count, lit, Real};

/// Absolute tolerance of every quadrature in this module.
pub const QUAD_TOL: f64 = 1e-14;

/// Tolerance on `F(am(y)) - y`.
pub const AM_TOL: f64 = 1e-13;

/// Default tolerance on `|h(κ²*)|`.
pub const THRESHOLD_TOL: f64 = 1e-9;

fn quad_tol<T: Real>() -> T {
    lit::<T>(QUAD_TOL).max(lit::<T>(16.0) * T::epsilon())
}

fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    if alpha.is_finite() && alpha > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "alpha must be positive, got {alpha}"
        )))
    }
}

fn check_kappa2<T: Real>(kappa2: T) -> Result<()> {
    if kappa2.is_finite() && kappa2 >= T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "kappa2 must be finite and >= 0, got {kappa2}"
        )))
    }
}

/// `(1/2π) ∫_{-π}^{π} dx / √(α² + κ² sin²x) - 1`, strictly decreasing in `α`.
pub fn alpha_residual<T: Real>(kappa2: T, alpha: T) -> T {
    let a2 = alpha * alpha;
    let f = |x: T| (a2 + kappa2 * x.sin().powi(2)).sqrt().recip();
    integrate(f, -T::PI(), T::PI(), quad_tol()) / T::TAU() - T::one()
}

/// The unique `α_κ > 0` with vanishing [`alpha_residual`].
pub fn solve_alpha<T: Real>(kappa2: T) -> Result<T> {
    check_kappa2(kappa2)?;
    if kappa2 == T::zero() {
        return Ok(T::one());
    }
    // The mean is below 1/α, so α_κ < 1; halve the lower end until the
    // residual is positive rather than starting at a near-singular integrand.
    let hi = T::one();
    let mut lo = lit::<T>(0.5);
    while alpha_residual(kappa2, lo) <= T::zero() {
        lo = lo * lit(0.5);
        if lo < T::min_positive_value().sqrt() {
            return Err(Error::NoConvergence("alpha bracket"));
        }
    }
    brent(
        |a| alpha_residual(kappa2, a),
        lo,
        hi,
        T::epsilon(),
        lit::<T>(1e-15).max(T::epsilon()),
        200,
    )
}

/// `F_κ` and its inverse for a fixed pair `(κ², α)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmplitudeMap<T> {
    kappa2: T,
    alpha: T,
    ratio: T,
    period: T,
}

impl<T: Real> AmplitudeMap<T> {
    pub fn new(kappa2: T, alpha: T) -> Result<Self> {
        check_kappa2(kappa2)?;
        check_alpha(alpha)?;
        let ratio = kappa2 / (alpha * alpha);
        let mut m = Self {
            kappa2,
            alpha,
            ratio,
            period: T::zero(),
        };
        m.period = m.integral(-T::PI(), T::PI());
        Ok(m)
    }

    /// Uses `α = α_κ`.
    pub fn for_kappa2(kappa2: T) -> Result<Self> {
        Self::new(kappa2, solve_alpha(kappa2)?)
    }

    pub fn kappa2(&self) -> T {
        self.kappa2
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// `F_κ(π)`; equals `2πα` when `α = α_κ`.
    pub fn period(&self) -> T {
        self.period
    }

    /// `F′_κ(θ) = 1/√(1 + (κ²/α²) sin²θ)`.
    pub fn density(&self, x: T) -> T {
        (T::one() + self.ratio * x.sin().powi(2)).sqrt().recip()
    }

    fn integral(&self, a: T, b: T) -> T {
        integrate(|x| self.density(x), a, b, quad_tol())
    }

    /// `F_κ(θ) = ∫_{-π}^{θ} F′_κ`, for any real `θ`.
    pub fn f(&self, theta: T) -> T {
        let k = ((theta + T::PI()) / T::TAU()).floor();
        let base = -T::PI() + k * T::TAU();
        k * self.period + self.integral(base, theta)
    }

    /// `am_κ(y) = F_κ⁻¹(y)`.
    pub fn am(&self, y: T) -> T {
        let k = (y / self.period).floor();
        let r = y - k * self.period;
        let shift = k * T::TAU();
        let (mut lo, mut hi) = (-T::PI(), T::PI());
        let mut x = -T::PI() + T::TAU() * r / self.period;
        let mut fx = self.integral(-T::PI(), x);
        let tol = lit::<T>(AM_TOL).max(lit::<T>(64.0) * T::epsilon() * self.period);
        for _ in 0..100 {
            let g = fx - r;
            if Float::abs(g) <= tol {
                break;
            }
            if g > T::zero() {
                hi = x;
            } else {
                lo = x;
            }
            let mut next = x - g / self.density(x);
            if !(next > lo && next < hi) {
                next = (lo + hi) * lit(0.5);
            }
            fx = fx + self.integral(x, next);
            x = next;
        }
        x + shift
    }

    /// `E_κ = ∫_{-π}^{π} √(1 + (κ²/α²) sin²x)`.
    pub fn complete_e(&self) -> T {
        integrate(
            |x| (T::one() + self.ratio * x.sin().powi(2)).sqrt(),
            -T::PI(),
            T::PI(),
            quad_tol(),
        )
    }
}

pub fn elliptic_f<T: Real>(theta: T, kappa2: T, alpha: T) -> Result<T> {
    Ok(AmplitudeMap::new(kappa2, alpha)?.f(theta))
}

pub fn jacobi_am<T: Real>(y: T, kappa2: T, alpha: T) -> Result<T> {
    Ok(AmplitudeMap::new(kappa2, alpha)?.am(y))
}

pub fn complete_e<T: Real>(kappa2: T, alpha: T) -> Result<T> {
    Ok(AmplitudeMap::new(kappa2, alpha)?.complete_e())
}

/// `-2π(1 + α²) + 2αE`.
pub fn degree_zero_energy<T: Real>(alpha: T, e_complete: T) -> T {
    -T::TAU() * (T::one() + alpha * alpha) + lit::<T>(2.0) * alpha * e_complete
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EllipticSolution<T> {
    pub kappa2: T,
    pub alpha: T,
    #[serde(rename = "E_complete")]
    pub e_complete: T,
    #[serde(rename = "F_period")]
    pub f_period: T,
    pub energy_deg0: T,
}

impl<T: Real> EllipticSolution<T> {
    pub fn solve(kappa2: T) -> Result<Self> {
        let map = AmplitudeMap::for_kappa2(kappa2)?;
        let e = map.complete_e();
        Ok(Self {
            kappa2,
            alpha: map.alpha,
            e_complete: e,
            f_period: map.period,
            energy_deg0: degree_zero_energy(map.alpha, e),
        })
    }

    /// Energy of the degree-one minimizers `±n`.
    pub fn energy_deg1(&self) -> T {
        T::TAU()
    }
}

/// `b = πα`, which puts `θ(-π) = π` and `θ(π) = -π`.
pub fn default_b<T: Real>(alpha: T) -> T {
    T::PI() * alpha
}

/// Samples `θ(t) = am_κ(-α_κ t + b)` and the field `sin θ τ + cos θ n`.
pub fn degree_zero_minimizer<T: Real>(
    kappa2: T,
    b: T,
    grid: &PeriodicGrid<T>,
) -> Result<(AngleProfile<T>, VectorField<T>)> {
    if !(kappa2 > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "kappa2 must be positive, got {kappa2}"
        )));
    }
    let map = AmplitudeMap::for_kappa2(kappa2)?;
    let alpha = map.alpha;
    let theta: Vec<T> = grid
        .nodes()
        .iter()
        .map(|&t| map.am(-alpha * t + b))
        .collect();
    if theta.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::StructureViolation(
            "degree-zero profile is not strictly decreasing".into(),
        ));
    }
    let profile = AngleProfile::new(grid.clone(), theta, -1)?;
    let field = profile.reconstruct();
    let deg = winding_degree(&field)?;
    if deg != 0 {
        return Err(Error::StructureViolation(format!(
            "degree-zero minimizer has winding degree {deg}"
        )));
    }
    Ok((profile, field))
}

/// `h(κ²) = -2πα² + 2αE - 4π`: positive where degree zero costs more than `2π`.
pub fn threshold_residual<T: Real>(kappa2: T) -> Result<T> {
    let s = EllipticSolution::solve(kappa2)?;
    Ok(s.energy_deg0 - T::TAU())
}

/// `κ²*`, the root of [`threshold_residual`] in `[2, 3]`.
pub fn solve_threshold<T: Real>(tol: T) -> Result<T> {
    let h = |k: T| threshold_residual(k).unwrap_or_else(|_| T::nan());
    let root = brent(h, lit(2.0), lit(3.0), T::epsilon(), tol, 200)?;
    let r = threshold_residual(root)?;
    if Float::abs(r) >= tol {
        return Err(Error::NoConvergence("threshold residual above tolerance"));
    }
    Ok(root)
}

/// One point of a level curve of `f(x, y) = y² - κ² sin²x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhasePoint<T> {
    pub curve: &'static str,
    pub level: T,
    pub x: T,
    pub y: T,
}

/// Upper and lower branches `y = ±√(c + κ² sin²x)` of selected level sets
/// on `x ∈ [-π, π]`: the separatrix `c = 0`, the minimizer level `c = α²_κ`,
/// and each extra level in `levels` (points where `c + κ² sin²x < 0` are
/// skipped).
pub fn phase_portrait<T: Real>(
    kappa2: T,
    levels: &[T],
    samples: usize,
) -> Result<Vec<PhasePoint<T>>> {
    check_kappa2(kappa2)?;
    if samples < 2 {
        return Err(Error::InvalidParameter(
            "phase portrait needs at least 2 samples".into(),
        ));
    }
    let alpha = solve_alpha(kappa2)?;
    let mut curves: Vec<(&'static str, T)> =
        vec![("separatrix", T::zero()), ("minimizer", alpha * alpha)];
    curves.extend(levels.iter().map(|&c| ("level", c)));
    let mut out = Vec::new();
    for (name, c) in curves {
        for sign in [T::one(), -T::one()] {
            for i in 0..samples {
                let x = -T::PI() + T::TAU() * count::<T>(i) / count::<T>(samples - 1);
                let r = c + kappa2 * x.sin().powi(2);
                if r >= T::zero() {
                    out.push(PhasePoint {
                        curve: name,
                        level: c,
                        x,
                        y: sign * r.sqrt(),
                    });
                }
            }
        }
    }
    Ok(out)
}
