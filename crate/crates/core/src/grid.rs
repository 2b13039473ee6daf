//! Periodic discretization of the circle and the cylinder `[-1, 1] x S¹`,
//! the moving frame `(τ, n, e₃)`, unit-vector fields, winding degree and
//! angle lifting.

use std::fmt;
use std::sync::Arc;

use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::{count, lit, tight_tol, to_f64, wrap_angle, Real};
use crate::spectral::Spectral;
use crate::vec3::Vec3;

/// Increments at least this close to π are ambiguous.
const WINDING_MARGIN: f64 = 1e-6;

struct GridData<T: Real> {
    nodes: Vec<T>,
    spacing: T,
    cos: Vec<T>,
    sin: Vec<T>,
    spectral: Spectral<T>,
}

/// Uniform sampling `t_i = -π + 2πi/N`, `i = 0..N`, of the periodic interval.
///
/// Cloning is cheap; fields defined on clones of one grid share its FFT plans.
#[derive(Clone)]
pub struct PeriodicGrid<T: Real> {
    data: Arc<GridData<T>>,
}

impl<T: Real> PeriodicGrid<T> {
    pub fn new(n_points: usize) -> Result<Self> {
        if n_points < 8 || !n_points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(n_points));
        }
        let two_pi = T::TAU();
        let nodes: Vec<T> = (0..n_points)
            .map(|i| -T::PI() + two_pi * count::<T>(i) / count::<T>(n_points))
            .collect();
        let cos = nodes.iter().map(|t| t.cos()).collect();
        let sin = nodes.iter().map(|t| t.sin()).collect();
        Ok(Self {
            data: Arc::new(GridData {
                spacing: two_pi / count::<T>(n_points),
                nodes,
                cos,
                sin,
                spectral: Spectral::new(n_points),
            }),
        })
    }

    pub fn n_points(&self) -> usize {
        self.data.nodes.len()
    }

    pub fn nodes(&self) -> &[T] {
        &self.data.nodes
    }

    pub fn spacing(&self) -> T {
        self.data.spacing
    }

    pub fn spectral(&self) -> &Spectral<T> {
        &self.data.spectral
    }

    pub fn frame(&self, i: usize) -> Frame<T> {
        Frame::from_cos_sin(self.data.cos[i], self.data.sin[i])
    }

    pub fn normal(&self, i: usize) -> Vec3<T> {
        Vec3::new(self.data.cos[i], self.data.sin[i], T::zero())
    }

    /// Same resolution, same node set.
    pub fn same_as(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.data, &other.data) || self.n_points() == other.n_points()
    }
}

impl<T: Real> PartialEq for PeriodicGrid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl<T: Real> fmt::Debug for PeriodicGrid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicGrid")
            .field("n_points", &self.n_points())
            .field("spacing", &self.spacing())
            .finish()
    }
}

pub fn make_grid<T: Real>(n_points: usize) -> Result<PeriodicGrid<T>> {
    PeriodicGrid::new(n_points)
}

/// Moving frame at a point of the circle, together with the rotation
/// `R(t)` about `e₃` that maps `e₁ ↦ n(t)` and `e₂ ↦ τ(t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame<T> {
    pub normal: Vec3<T>,
    pub tangent: Vec3<T>,
    pub axis: Vec3<T>,
}

impl<T: Real> Frame<T> {
    pub fn at(t: T) -> Self {
        Self::from_cos_sin(t.cos(), t.sin())
    }

    fn from_cos_sin(c: T, s: T) -> Self {
        Self {
            normal: Vec3::new(c, s, T::zero()),
            tangent: Vec3::new(-s, c, T::zero()),
            axis: Vec3::e3(),
        }
    }

    /// `R(t) v`.
    pub fn rotate(&self, v: Vec3<T>) -> Vec3<T> {
        self.normal * v.x + self.tangent * v.y + self.axis * v.z
    }

    /// `R(t)ᵀ v`.
    pub fn unrotate(&self, v: Vec3<T>) -> Vec3<T> {
        Vec3::new(v.dot(self.normal), v.dot(self.tangent), v.z)
    }
}

/// Pointwise constraint carried by a [`VectorField`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    UnitSphere,
    InPlane,
    Unconstrained,
}

/// Samples of an `R³`-valued field on a [`PeriodicGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField<T: Real> {
    grid: PeriodicGrid<T>,
    values: Vec<Vec3<T>>,
    kind: ConstraintKind,
}

impl<T: Real> VectorField<T> {
    pub fn new(grid: PeriodicGrid<T>, values: Vec<Vec3<T>>, kind: ConstraintKind) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::LengthMismatch {
                expected: grid.n_points(),
                got: values.len(),
            });
        }
        check_values(&values, kind)?;
        Ok(Self { grid, values, kind })
    }

    /// Projects every value onto the unit sphere (and the plane, for
    /// [`ConstraintKind::InPlane`]) before validating.
    pub fn normalized(
        grid: PeriodicGrid<T>,
        mut values: Vec<Vec3<T>>,
        kind: ConstraintKind,
    ) -> Result<Self> {
        if kind != ConstraintKind::Unconstrained {
            for (node, v) in values.iter_mut().enumerate() {
                if kind == ConstraintKind::InPlane {
                    v.z = T::zero();
                }
                *v = v.normalized().ok_or(Error::NotUnit { node, norm: 0.0 })?;
            }
        }
        Self::new(grid, values, kind)
    }

    pub fn from_fn(
        grid: PeriodicGrid<T>,
        kind: ConstraintKind,
        mut f: impl FnMut(usize, T) -> Vec3<T>,
    ) -> Result<Self> {
        let values = grid
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, &t)| f(i, t))
            .collect();
        Self::new(grid, values, kind)
    }

    pub fn constant(grid: PeriodicGrid<T>, v: Vec3<T>) -> Result<Self> {
        let kind = if Float::abs(v.z) <= tight_tol() {
            ConstraintKind::InPlane
        } else {
            ConstraintKind::UnitSphere
        };
        let values = vec![v; grid.n_points()];
        Self::new(grid, values, kind)
    }

    /// Node-wise standard normal samples, renormalized (the third component
    /// is dropped for in-plane fields).
    pub fn random(grid: PeriodicGrid<T>, kind: ConstraintKind, rng: &mut impl Rng) -> Result<Self> {
        let values = (0..grid.n_points())
            .map(|_| {
                let mut draw = || lit::<T>(rng.sample::<f64, _>(StandardNormal));
                let (x, y, z) = (draw(), draw(), draw());
                Vec3::new(
                    x,
                    y,
                    if kind == ConstraintKind::InPlane {
                        T::zero()
                    } else {
                        z
                    },
                )
            })
            .collect();
        Self::normalized(grid, values, kind)
    }

    /// Trigonometric interpolant evaluated on another grid, then projected
    /// back onto the constraint.
    pub fn resample(&self, grid: &PeriodicGrid<T>) -> Result<Self> {
        if grid.same_as(&self.grid) {
            return Ok(self.clone());
        }
        let n = self.len();
        let half = n / 2;
        let tau: Vec<T> = (0..n)
            .map(|j| T::TAU() * count::<T>(j) / count::<T>(n))
            .collect();
        // Real Fourier coefficients in the shifted variable τ = t + π; the
        // Nyquist term is a pure cosine.
        let coeffs: Vec<(Vec3<T>, Vec3<T>)> = (0..=half)
            .map(|k| {
                let w = if k == 0 || k == half {
                    T::one()
                } else {
                    lit(2.0)
                };
                let kk = count::<T>(k);
                let (mut a, mut b) = (Vec3::zero(), Vec3::zero());
                for (&v, &t) in self.values.iter().zip(&tau) {
                    a += v * (kk * t).cos();
                    b += v * (kk * t).sin();
                }
                let s = w / count::<T>(n);
                (a * s, if k == half { Vec3::zero() } else { b * s })
            })
            .collect();
        let values = grid
            .nodes()
            .iter()
            .map(|&t| {
                let t = t + T::PI();
                coeffs
                    .iter()
                    .enumerate()
                    .fold(Vec3::zero(), |acc, (k, &(a, b))| {
                        let kt = count::<T>(k) * t;
                        acc + a * kt.cos() + b * kt.sin()
                    })
            })
            .collect();
        Self::normalized(grid.clone(), values, self.kind)
    }

    pub fn grid(&self) -> &PeriodicGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[Vec3<T>] {
        &self.values
    }

    pub fn kind(&self) -> ConstraintKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<Vec3<T>> {
        self.values
    }

    /// Whether every value has vanishing `e₃` component.
    pub fn is_planar(&self) -> bool {
        self.values.iter().all(|v| Float::abs(v.z) <= tight_tol())
    }

    /// `u ↦ -u`.
    pub fn negated(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| -v).collect(),
            kind: self.kind,
        }
    }

    /// One Cartesian component as a plain sample vector.
    pub fn component(&self, c: usize) -> Vec<T> {
        self.values.iter().map(|v| v.to_array()[c]).collect()
    }

    /// `max_i |u_i - v_i|`.
    pub fn max_distance(&self, other: &[Vec3<T>]) -> T {
        self.values
            .iter()
            .zip(other)
            .map(|(&a, &b)| (a - b).norm())
            .fold(T::zero(), Float::max)
    }
}

fn check_values<T: Real>(values: &[Vec3<T>], kind: ConstraintKind) -> Result<()> {
    let tol = tight_tol::<T>();
    for (node, v) in values.iter().enumerate() {
        if kind == ConstraintKind::Unconstrained {
            if !(v.x.is_finite() && v.y.is_finite() && v.z.is_finite()) {
                return Err(Error::NotUnit {
                    node,
                    norm: f64::NAN,
                });
            }
            continue;
        }
        let norm = v.norm();
        if !(Float::abs(norm - T::one()) <= tol) {
            return Err(Error::NotUnit {
                node,
                norm: to_f64(norm),
            });
        }
        if kind == ConstraintKind::InPlane && Float::abs(v.z) > tol {
            return Err(Error::NotInPlane {
                node,
                e3: to_f64(v.z),
            });
        }
    }
    Ok(())
}

/// `n(t_i) = (cos t_i, sin t_i, 0)`.
pub fn sample_normal_field<T: Real>(grid: &PeriodicGrid<T>) -> VectorField<T> {
    let values = (0..grid.n_points()).map(|i| grid.normal(i)).collect();
    VectorField {
        grid: grid.clone(),
        values,
        kind: ConstraintKind::InPlane,
    }
}

/// `u_θ(t) = R(t)(sin θ, 0, cos θ)ᵀ = (sin θ cos t, sin θ sin t, cos θ)`.
pub fn sample_u_theta<T: Real>(grid: &PeriodicGrid<T>, theta: T) -> VectorField<T> {
    let (s, c) = theta.sin_cos();
    let values = (0..grid.n_points())
        .map(|i| grid.normal(i) * s + Vec3::e3() * c)
        .collect();
    VectorField {
        grid: grid.clone(),
        values,
        kind: ConstraintKind::UnitSphere,
    }
}

/// Components of a field in the moving frame: `u = m₁τ + m₂n + m₃e₃`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameComponents<T> {
    pub tangential: Vec<T>,
    pub normal: Vec<T>,
    pub axial: Vec<T>,
}

impl<T: Real> FrameComponents<T> {
    pub fn recompose(&self, grid: &PeriodicGrid<T>) -> Vec<Vec3<T>> {
        (0..grid.n_points())
            .map(|i| {
                let f = grid.frame(i);
                f.tangent * self.tangential[i] + f.normal * self.normal[i] + f.axis * self.axial[i]
            })
            .collect()
    }
}

pub fn frame_decompose<T: Real>(field: &VectorField<T>) -> FrameComponents<T> {
    let grid = field.grid();
    let n = field.len();
    let mut out = FrameComponents {
        tangential: Vec::with_capacity(n),
        normal: Vec::with_capacity(n),
        axial: Vec::with_capacity(n),
    };
    for (i, &v) in field.values().iter().enumerate() {
        let f = grid.frame(i);
        out.tangential.push(v.dot(f.tangent));
        out.normal.push(v.dot(f.normal));
        out.axial.push(v.z);
    }
    out
}

/// Wrapped increments of the Cartesian angle `atan2(y, x)` between
/// consecutive nodes, including the closing step `N-1 → 0`.
fn planar_increments<T: Real>(field: &VectorField<T>) -> Result<(Vec<T>, Vec<T>)> {
    let tol = tight_tol::<T>();
    let mut angles = Vec::with_capacity(field.len());
    for (node, v) in field.values().iter().enumerate() {
        if Float::abs(v.z) > tol {
            return Err(Error::NotInPlane {
                node,
                e3: to_f64(v.z),
            });
        }
        angles.push(v.y.atan2(v.x));
    }
    let limit = T::PI() - lit(WINDING_MARGIN);
    let n = angles.len();
    let mut inc = Vec::with_capacity(n);
    for i in 0..n {
        let d = wrap_angle(angles[(i + 1) % n] - angles[i]);
        if Float::abs(d) >= limit {
            return Err(Error::UnderResolved {
                node: i,
                increment: to_f64(d),
            });
        }
        inc.push(d);
    }
    Ok((angles, inc))
}

/// Number of turns of an in-plane field around `e₃`.
pub fn winding_degree<T: Real>(field: &VectorField<T>) -> Result<i64> {
    let (_, inc) = planar_increments(field)?;
    let total: T = inc.into_iter().sum();
    Ok(to_f64(total / T::TAU()).round() as i64)
}

/// Continuous angle `θ` with `m₁ = sin θ`, `m₂ = cos θ` in the moving frame
/// and integer `j` such that `θ(π) - θ(-π) = 2πj`.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleProfile<T: Real> {
    grid: PeriodicGrid<T>,
    theta: Vec<T>,
    j: i64,
}

impl<T: Real> AngleProfile<T> {
    pub fn new(grid: PeriodicGrid<T>, theta: Vec<T>, j: i64) -> Result<Self> {
        if theta.len() != grid.n_points() {
            return Err(Error::LengthMismatch {
                expected: grid.n_points(),
                got: theta.len(),
            });
        }
        if theta.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite angle".into()));
        }
        Ok(Self { grid, theta, j })
    }

    /// Builds `θ(t) = ψ(t) + j (t + π)` from its periodic part `ψ`.
    pub fn from_periodic(grid: PeriodicGrid<T>, psi: &[T], j: i64) -> Result<Self> {
        let jt = count::<T>(j.unsigned_abs() as usize) * if j < 0 { -T::one() } else { T::one() };
        let theta = grid
            .nodes()
            .iter()
            .zip(psi)
            .map(|(&t, &p)| p + jt * (t + T::PI()))
            .collect();
        Self::new(grid, theta, j)
    }

    pub fn grid(&self) -> &PeriodicGrid<T> {
        &self.grid
    }

    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    pub fn j(&self) -> i64 {
        self.j
    }

    pub fn degree(&self) -> i64 {
        self.j + 1
    }

    fn j_real(&self) -> T {
        T::from(self.j).unwrap()
    }

    /// `θ(π)`, i.e. node 0 continued once around the circle.
    pub fn theta_end(&self) -> T {
        self.theta[0] + T::TAU() * self.j_real()
    }

    /// Periodic part `ψ(t) = θ(t) - j (t + π)`.
    pub fn periodic_part(&self) -> Vec<T> {
        let j = self.j_real();
        self.grid
            .nodes()
            .iter()
            .zip(&self.theta)
            .map(|(&t, &th)| th - j * (t + T::PI()))
            .collect()
    }

    /// `θ'` at the nodes (spectral derivative of the periodic part plus `j`).
    pub fn derivative(&self) -> Vec<T> {
        let j = self.j_real();
        self.grid
            .spectral()
            .derivative(&self.periodic_part())
            .into_iter()
            .map(|d| d + j)
            .collect()
    }

    /// The in-plane field `sin θ τ + cos θ n = (cos(θ+t), sin(θ+t), 0)`.
    pub fn reconstruct(&self) -> VectorField<T> {
        let values = self
            .theta
            .iter()
            .enumerate()
            .map(|(i, &th)| {
                let f = self.grid.frame(i);
                f.tangent * th.sin() + f.normal * th.cos()
            })
            .collect();
        VectorField {
            grid: self.grid.clone(),
            values,
            kind: ConstraintKind::InPlane,
        }
    }
}

/// Lifts an in-plane field to its frame angle, with `θ(-π) ∈ (-π, π]`.
pub fn lift_angle<T: Real>(field: &VectorField<T>) -> Result<AngleProfile<T>> {
    let (angles, inc) = planar_increments(field)?;
    let grid = field.grid();
    let nodes = grid.nodes();
    let h = grid.spacing();
    let mut theta = Vec::with_capacity(field.len());
    theta.push(wrap_angle(angles[0] - nodes[0]));
    for i in 1..field.len() {
        let prev = theta[i - 1];
        theta.push(prev + inc[i - 1] - h);
    }
    let total: T = inc.iter().copied().sum();
    let degree = to_f64(total / T::TAU()).round() as i64;
    AngleProfile::new(grid.clone(), theta, degree - 1)
}

/// Field on `[-1, 1] x S¹`: one ring per uniformly spaced `z`-node.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderField<T: Real> {
    z_nodes: Vec<T>,
    rings: Vec<VectorField<T>>,
}

impl<T: Real> CylinderField<T> {
    pub fn new(rings: Vec<VectorField<T>>) -> Result<Self> {
        let m = rings.len();
        if m < 2 {
            return Err(Error::TooFewZNodes(m));
        }
        if rings.iter().any(|r| !r.grid().same_as(rings[0].grid())) {
            return Err(Error::MismatchedRings);
        }
        let z_nodes = (0..m)
            .map(|j| -T::one() + lit::<T>(2.0) * count::<T>(j) / count::<T>(m - 1))
            .collect();
        Ok(Self { z_nodes, rings })
    }

    /// `m(z, t) = u(t)` for every `z`.
    pub fn z_invariant(ring: &VectorField<T>, z_count: usize) -> Result<Self> {
        Self::new(vec![ring.clone(); z_count])
    }

    /// Axially symmetric field `m(z, t) = R(t) profile(z)`.
    pub fn axially_symmetric(
        grid: &PeriodicGrid<T>,
        profile: &[Vec3<T>],
        kind: ConstraintKind,
    ) -> Result<Self> {
        let rings = profile
            .iter()
            .map(|&p| VectorField::from_fn(grid.clone(), kind, |i, _| grid.frame(i).rotate(p)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(rings)
    }

    pub fn random(
        grid: &PeriodicGrid<T>,
        z_count: usize,
        kind: ConstraintKind,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        let rings = (0..z_count)
            .map(|_| VectorField::random(grid.clone(), kind, rng))
            .collect::<Result<Vec<_>>>()?;
        Self::new(rings)
    }

    pub fn z_count(&self) -> usize {
        self.rings.len()
    }

    pub fn z_nodes(&self) -> &[T] {
        &self.z_nodes
    }

    pub fn z_spacing(&self) -> T {
        lit::<T>(2.0) / count::<T>(self.rings.len() - 1)
    }

    pub fn rings(&self) -> &[VectorField<T>] {
        &self.rings
    }

    pub fn into_rings(self) -> Vec<VectorField<T>> {
        self.rings
    }

    pub fn grid(&self) -> &PeriodicGrid<T> {
        self.rings[0].grid()
    }

    /// Trigonometric interpolation in `t` and linear interpolation in `z`
    /// onto a `grid` x `z_count` mesh, projected back onto the constraint.
    pub fn resample(&self, grid: &PeriodicGrid<T>, z_count: usize) -> Result<Self> {
        let rings = self
            .rings
            .iter()
            .map(|r| r.resample(grid))
            .collect::<Result<Vec<_>>>()?;
        if z_count == rings.len() {
            return Self::new(rings);
        }
        if z_count < 2 {
            return Err(Error::TooFewZNodes(z_count));
        }
        let last = rings.len() - 1;
        let kind = rings[0].kind();
        let out = (0..z_count)
            .map(|j| {
                let pos = count::<T>(j * last) / count::<T>(z_count - 1);
                let i = pos.floor().to_usize().unwrap_or(0).min(last - 1);
                let f = pos - count::<T>(i);
                let vals = rings[i]
                    .values()
                    .iter()
                    .zip(rings[i + 1].values())
                    .map(|(&a, &b)| a * (T::one() - f) + b * f)
                    .collect();
                VectorField::normalized(grid.clone(), vals, kind)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(out)
    }

    /// Trapezoid weights on the `z`-nodes (sum to 2).
    pub fn z_weights(&self) -> Vec<T> {
        z_weights(self.rings.len())
    }
}

pub(crate) fn z_weights<T: Real>(m: usize) -> Vec<T> {
    let h = lit::<T>(2.0) / count::<T>(m - 1);
    (0..m)
        .map(|j| {
            if j == 0 || j + 1 == m {
                h * lit(0.5)
            } else {
                h
            }
        })
        .collect()
}
