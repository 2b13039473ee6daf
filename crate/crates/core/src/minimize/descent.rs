use std::fmt;
use std::str::FromStr;

use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use serde::Serialize;

use crate::energy::{
    circle_energy, cylinder_energy, cylinder_gradient, energy_gradient, EnergyParams,
};
use crate::error::{Error, Result};
use crate::grid::{
    z_weights, AngleProfile, ConstraintKind, CylinderField, PeriodicGrid, VectorField,
};
use crate::scalar::{count, lit, Real};
use crate::vec3::Vec3;

/// Bound on the in-plane ring averages after re-projection.
pub const WAS_TOL: f64 = 1e-10;

/// Angular nodes of the level on which multistart descents begin.
pub const COARSE_N: usize = 64;
/// Axial nodes of the coarse cylinder level.
pub const COARSE_Z: usize = 17;

const WAS_TARGET: f64 = 1e-13;
const WAS_SWEEPS: usize = 200;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Constraint {
    #[default]
    None,
    InPlane,
    /// Vanishing in-plane ring average at every height.
    WeaklyAxiallySymmetric,
}

impl Constraint {
    pub fn as_str(self) -> &'static str {
        match self {
            Constraint::None => "none",
            Constraint::InPlane => "in-plane",
            Constraint::WeaklyAxiallySymmetric => "was",
        }
    }

    fn kind(self) -> ConstraintKind {
        match self {
            Constraint::InPlane => ConstraintKind::InPlane,
            _ => ConstraintKind::UnitSphere,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Constraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Constraint::None),
            "in-plane" => Ok(Constraint::InPlane),
            "was" | "weakly-axially-symmetric" => Ok(Constraint::WeaklyAxiallySymmetric),
            _ => Err(Error::InvalidParameter(format!("unknown constraint '{s}'"))),
        }
    }
}

impl Serialize for Constraint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Inner product in which the gradient is taken.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Metric {
    /// Plain L²: a step is stable only for `step ≲ N⁻²`.
    L2,
    /// `H¹`: the direction solves `(1 + κ² - Δ) d = g`, so steps of order
    /// one are stable at any resolution.
    #[default]
    Sobolev,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DescentOptions<T> {
    pub max_iters: usize,
    pub step: T,
    pub grad_tol: T,
    /// Stop once an accepted step lowers the energy by less than this.
    pub energy_tol: T,
    pub seed: u64,
    pub constraint: Constraint,
    pub metric: Metric,
}

impl<T: Real> Default for DescentOptions<T> {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            step: lit(0.5),
            grad_tol: lit(1e-8),
            energy_tol: lit(1e-13),
            seed: 0,
            constraint: Constraint::None,
            metric: Metric::Sobolev,
        }
    }
}

impl<T: Real> DescentOptions<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: T| x.is_finite() && x > T::zero();
        if !positive(self.step) {
            return Err(Error::InvalidParameter(format!(
                "step must be positive, got {}",
                self.step
            )));
        }
        if !positive(self.grad_tol) || !positive(self.energy_tol) {
            return Err(Error::InvalidParameter(
                "tolerances must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct DescentTrace<T, F> {
    /// Energy of the initial field followed by one entry per accepted step.
    pub energies: Vec<T>,
    pub final_field: F,
    pub iterations: usize,
    pub converged: bool,
    /// L² norm of the (constrained) gradient at the final field.
    pub grad_norm: T,
}

impl<T: Real, F> DescentTrace<T, F> {
    pub fn final_energy(&self) -> T {
        *self
            .energies
            .last()
            .expect("trace holds the initial energy")
    }

    pub fn is_monotone(&self) -> bool {
        self.energies.windows(2).all(|w| w[1] < w[0])
    }
}

struct Outcome<T, S> {
    state: S,
    energies: Vec<T>,
    converged: bool,
    grad_norm: T,
}

/// Backtracking descent shared by every problem: halve the step until the
/// energy decreases, double it after each accepted step.
fn run<T: Real, S, D>(
    init: S,
    opts: &DescentOptions<T>,
    energy: impl Fn(&S) -> Result<T>,
    direction: impl Fn(&S) -> Result<(T, D)>,
    retract: impl Fn(&S, &D, T) -> Result<S>,
) -> Result<Outcome<T, S>> {
    opts.validate()?;
    let max_step = opts.step * lit(1024.0);
    let min_step = opts.step * T::epsilon();
    let mut state = init;
    let mut e = energy(&state)?;
    let mut energies = vec![e];
    let mut step = opts.step;
    let mut converged = false;
    let mut grad_norm;
    let mut iters = 0;
    loop {
        let (gn, d) = direction(&state)?;
        grad_norm = gn;
        if gn < opts.grad_tol {
            converged = true;
            break;
        }
        if iters >= opts.max_iters {
            break;
        }
        let mut s = step;
        let accepted = loop {
            let cand = retract(&state, &d, s)?;
            let ec = energy(&cand)?;
            if ec < e {
                break Some((cand, ec));
            }
            s = s * lit(0.5);
            if s < min_step {
                break None;
            }
        };
        let Some((cand, ec)) = accepted else { break };
        let decrement = e - ec;
        state = cand;
        e = ec;
        energies.push(e);
        iters += 1;
        step = (s * lit(2.0)).min(max_step);
        if decrement < opts.energy_tol {
            converged = true;
            break;
        }
    }
    Ok(Outcome {
        state,
        energies,
        converged,
        grad_norm,
    })
}

type Rings<T> = Vec<Vec<Vec3<T>>>;

/// Geometry shared by circle (one ring, unit weight) and cylinder problems.
struct Problem<'a, T: Real> {
    grid: &'a PeriodicGrid<T>,
    params: EnergyParams<T>,
    constraint: Constraint,
    metric: Metric,
    /// `None` for the circle.
    z_count: Option<usize>,
}

impl<T: Real> Problem<'_, T> {
    fn weights(&self) -> Vec<T> {
        match self.z_count {
            None => vec![T::one()],
            Some(m) => z_weights(m),
        }
    }

    fn rings_to_fields(&self, rings: &Rings<T>) -> Result<Vec<VectorField<T>>> {
        let kind = self.constraint.kind();
        rings
            .iter()
            .map(|r| VectorField::new(self.grid.clone(), r.clone(), kind))
            .collect()
    }

    fn energy(&self, rings: &Rings<T>) -> Result<T> {
        let fields = self.rings_to_fields(rings)?;
        match self.z_count {
            None => Ok(circle_energy(&fields[0], &self.params).total),
            Some(_) => Ok(cylinder_energy(&CylinderField::new(fields)?, &self.params)?.total),
        }
    }

    fn gradient(&self, rings: &Rings<T>) -> Result<Rings<T>> {
        let fields = self.rings_to_fields(rings)?;
        match self.z_count {
            None => Ok(vec![energy_gradient(&fields[0], &self.params)]),
            Some(_) => cylinder_gradient(&CylinderField::new(fields)?, &self.params),
        }
    }

    fn norm(&self, v: &Rings<T>) -> T {
        let s: T = v
            .iter()
            .zip(self.weights())
            .map(|(r, w)| w * r.iter().map(|x| x.norm_sq()).sum::<T>())
            .sum();
        (self.grid.spacing() * s).sqrt()
    }

    fn shift(&self) -> T {
        T::one() + self.params.kappa2()
    }

    /// Solves `(c - Δ) d = g` componentwise, `Δ` the full Laplacian with the
    /// `z`-part weighted as in the discrete energy.
    fn precondition(&self, g: &Rings<T>) -> Rings<T> {
        let sp = self.grid.spectral();
        let c = self.shift();
        let n = self.grid.n_points();
        let mut out = vec![vec![Vec3::zero(); n]; g.len()];
        for comp in 0..3 {
            let column =
                |r: &Vec<Vec3<T>>| -> Vec<T> { r.iter().map(|v| v.to_array()[comp]).collect() };
            let solved: Vec<Vec<T>> = match self.z_count {
                None => vec![sp.resolvent(c, &column(&g[0]))],
                Some(m) => {
                    let modes: Vec<Vec<Complex<T>>> =
                        g.iter().map(|r| sp.modes(&column(r))).collect();
                    let w = z_weights::<T>(m);
                    let hz = lit::<T>(2.0) / count::<T>(m - 1);
                    let mut solved_modes = modes.clone();
                    for (k, &k2) in sp.wave_sq().iter().enumerate() {
                        let rhs: Vec<Complex<T>> = (0..m).map(|j| modes[j][k] * w[j]).collect();
                        let x = solve_z_block(c + k2, &w, hz, &rhs);
                        for j in 0..m {
                            solved_modes[j][k] = x[j];
                        }
                    }
                    solved_modes
                        .into_iter()
                        .map(|md| sp.synthesize(md))
                        .collect()
                }
            };
            for (ring, col) in out.iter_mut().zip(solved) {
                for (v, x) in ring.iter_mut().zip(col) {
                    let mut a = v.to_array();
                    a[comp] = x;
                    *v = Vec3::from_array(a);
                }
            }
        }
        out
    }

    fn project_was(&self, rings: &Rings<T>, v: &mut Rings<T>) {
        for (u, d) in rings.iter().zip(v.iter_mut()) {
            project_ring_was(u, d);
        }
    }

    fn direction(&self, rings: &Rings<T>) -> Result<(T, Rings<T>)> {
        let was = self.constraint == Constraint::WeaklyAxiallySymmetric;
        let mut g = self.gradient(rings)?;
        if self.constraint == Constraint::InPlane && g.iter().flatten().any(|v| v.z != T::zero()) {
            return Err(Error::StructureViolation(
                "gradient of an in-plane field left the plane".into(),
            ));
        }
        if was {
            self.project_was(rings, &mut g);
        }
        let gn = self.norm(&g);
        let mut d = match self.metric {
            Metric::L2 => g,
            Metric::Sobolev => self.precondition(&g),
        };
        for (u, r) in rings.iter().zip(d.iter_mut()) {
            for (x, &ui) in r.iter_mut().zip(u) {
                *x = x.reject(ui);
            }
        }
        if was {
            self.project_was(rings, &mut d);
        }
        Ok((gn, d))
    }

    fn retract(&self, rings: &Rings<T>, d: &Rings<T>, s: T) -> Result<Rings<T>> {
        let mut out: Rings<T> = rings
            .iter()
            .zip(d)
            .map(|(u, dr)| {
                u.iter()
                    .zip(dr)
                    .map(|(&a, &b)| {
                        (a - b * s)
                            .normalized()
                            .ok_or(Error::NoConvergence("step hit a zero vector"))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        if self.constraint == Constraint::WeaklyAxiallySymmetric {
            for r in out.iter_mut() {
                enforce_was(r)?;
            }
        }
        Ok(out)
    }
}

/// Solves `((c + k²) W + S / h_z) x = rhs`, `S` the path-graph Laplacian.
fn solve_z_block<T: Real>(diag_shift: T, w: &[T], hz: T, rhs: &[Complex<T>]) -> Vec<Complex<T>> {
    let m = w.len();
    let off = -hz.recip();
    let diag: Vec<T> = (0..m)
        .map(|j| {
            let links = if j == 0 || j + 1 == m {
                T::one()
            } else {
                lit(2.0)
            };
            diag_shift * w[j] + links / hz
        })
        .collect();
    // Thomas algorithm; the matrix is symmetric and diagonally dominant.
    let mut cp = vec![T::zero(); m];
    let mut dp = vec![Complex::new(T::zero(), T::zero()); m];
    cp[0] = off / diag[0];
    dp[0] = rhs[0] / diag[0];
    for j in 1..m {
        let denom = diag[j] - off * cp[j - 1];
        cp[j] = off / denom;
        dp[j] = (rhs[j] - dp[j - 1] * off) / denom;
    }
    let mut x = dp;
    for j in (0..m - 1).rev() {
        let next = x[j + 1];
        x[j] = x[j] - next * cp[j];
    }
    x
}

/// Mean of the in-plane part `(m_x, m_y)` over a ring.
pub fn ring_average<T: Real>(ring: &[Vec3<T>]) -> (T, T) {
    let n = count::<T>(ring.len());
    let (sx, sy) = ring
        .iter()
        .fold((T::zero(), T::zero()), |(a, b), v| (a + v.x, b + v.y));
    (sx / n, sy / n)
}

/// Removes from `d` its component along the directions `P_u e_x`, `P_u e_y`
/// that change the ring average to first order.
fn project_ring_was<T: Real>(u: &[Vec3<T>], d: &mut [Vec3<T>]) {
    let bx: Vec<Vec3<T>> = u.iter().map(|&ui| Vec3::e1().reject(ui)).collect();
    let by: Vec<Vec3<T>> = u.iter().map(|&ui| Vec3::e2().reject(ui)).collect();
    let dot = |a: &[Vec3<T>], b: &[Vec3<T>]| a.iter().zip(b).map(|(x, y)| x.dot(*y)).sum::<T>();
    let (gxx, gxy, gyy) = (dot(&bx, &bx), dot(&bx, &by), dot(&by, &by));
    let det = gxx * gyy - gxy * gxy;
    if !(det > T::epsilon() * (gxx * gyy)) {
        return;
    }
    let (rx, ry) = (dot(d, &bx), dot(d, &by));
    let cx = (gyy * rx - gxy * ry) / det;
    let cy = (gxx * ry - gxy * rx) / det;
    for ((di, &x), &y) in d.iter_mut().zip(&bx).zip(&by) {
        *di = *di - x * cx - y * cy;
    }
}

/// Alternates "subtract the in-plane ring average" and "renormalize".
fn enforce_was<T: Real>(ring: &mut [Vec3<T>]) -> Result<()> {
    let target = lit::<T>(WAS_TARGET).max(lit::<T>(64.0) * T::epsilon());
    for _ in 0..WAS_SWEEPS {
        let (ax, ay) = ring_average(ring);
        if Float::abs(ax).max(Float::abs(ay)) <= target {
            return Ok(());
        }
        for v in ring.iter_mut() {
            *v = Vec3::new(v.x - ax, v.y - ay, v.z)
                .normalized()
                .ok_or(Error::NoConvergence("WAS projection hit a zero vector"))?;
        }
    }
    let (ax, ay) = ring_average(ring);
    if Float::abs(ax).max(Float::abs(ay)) <= lit(WAS_TOL) {
        Ok(())
    } else {
        Err(Error::StructureViolation(format!(
            "ring average ({ax}, {ay}) after WAS projection"
        )))
    }
}

fn check_start<T: Real>(field: &VectorField<T>, constraint: Constraint) -> Result<Vec<Vec3<T>>> {
    if field.kind() == ConstraintKind::Unconstrained {
        VectorField::new(
            field.grid().clone(),
            field.values().to_vec(),
            ConstraintKind::UnitSphere,
        )?;
    }
    let mut v = field.values().to_vec();
    match constraint {
        Constraint::InPlane => {
            if !field.is_planar() {
                let node = v.iter().position(|x| x.z != T::zero()).unwrap_or(0);
                return Err(Error::NotInPlane {
                    node,
                    e3: crate::scalar::to_f64(v[node].z),
                });
            }
            for x in v.iter_mut() {
                *x = Vec3::new(x.x, x.y, T::zero())
                    .normalized()
                    .expect("unit planar vector");
            }
        }
        Constraint::WeaklyAxiallySymmetric => enforce_was(&mut v)?,
        Constraint::None => {}
    }
    Ok(v)
}

/// Projected gradient descent for the circle energy.
pub fn descend_circle<T: Real>(
    init: &VectorField<T>,
    params: &EnergyParams<T>,
    opts: &DescentOptions<T>,
) -> Result<DescentTrace<T, VectorField<T>>> {
    let grid = init.grid();
    let start = vec![check_start(init, opts.constraint)?];
    let p = Problem {
        grid,
        params: *params,
        constraint: opts.constraint,
        metric: opts.metric,
        z_count: None,
    };
    let out = run(
        start,
        opts,
        |r| p.energy(r),
        |r| p.direction(r),
        |r, d, s| p.retract(r, d, s),
    )?;
    let field = p.rings_to_fields(&out.state)?.remove(0);
    Ok(DescentTrace {
        iterations: out.energies.len() - 1,
        energies: out.energies,
        final_field: field,
        converged: out.converged,
        grad_norm: out.grad_norm,
    })
}

/// Projected gradient descent for the cylinder energy.
pub fn descend_cylinder<T: Real>(
    init: &CylinderField<T>,
    params: &EnergyParams<T>,
    opts: &DescentOptions<T>,
) -> Result<DescentTrace<T, CylinderField<T>>> {
    let m = init.z_count();
    if m < 3 {
        return Err(Error::TooFewZNodes(m));
    }
    let grid = init.grid();
    let start = init
        .rings()
        .iter()
        .map(|r| check_start(r, opts.constraint))
        .collect::<Result<Vec<_>>>()?;
    let p = Problem {
        grid,
        params: *params,
        constraint: opts.constraint,
        metric: opts.metric,
        z_count: Some(m),
    };
    let out = run(
        start,
        opts,
        |r| p.energy(r),
        |r| p.direction(r),
        |r, d, s| p.retract(r, d, s),
    )?;
    let field = CylinderField::new(p.rings_to_fields(&out.state)?)?;
    Ok(DescentTrace {
        iterations: out.energies.len() - 1,
        energies: out.energies,
        final_field: field,
        converged: out.converged,
        grad_norm: out.grad_norm,
    })
}

/// Energy of the in-plane field with lift `θ = ψ + j(t + π)`:
/// `∫ψ′² + κ² ∫sin²θ + 2π(j + 1)²`.
pub fn theta_energy<T: Real>(profile: &AngleProfile<T>, kappa2: T) -> T {
    let grid = profile.grid();
    let psi = profile.periodic_part();
    theta_energy_parts(grid, &psi, profile.theta(), profile.j(), kappa2)
}

fn theta_energy_parts<T: Real>(
    grid: &PeriodicGrid<T>,
    psi: &[T],
    theta: &[T],
    j: i64,
    kappa2: T,
) -> T {
    let h = grid.spacing();
    let lap = grid.spectral().neg_laplacian(psi);
    let dir: T = psi.iter().zip(&lap).map(|(&a, &b)| a * b).sum();
    let ani: T = theta.iter().map(|t| t.sin().powi(2)).sum();
    let j1 = T::from(j + 1).unwrap();
    h * dir + kappa2 * h * ani + T::TAU() * j1 * j1
}

/// Gradient descent on the periodic part of the lift; `j` never changes.
pub fn descend_theta<T: Real>(
    init: &AngleProfile<T>,
    params: &EnergyParams<T>,
    opts: &DescentOptions<T>,
) -> Result<DescentTrace<T, AngleProfile<T>>> {
    let grid = init.grid();
    let j = init.j();
    let kappa2 = params.kappa2();
    let h = grid.spacing();
    let sp = grid.spectral();
    let jt = T::from(j).unwrap();
    let theta_of = |psi: &[T]| -> Vec<T> {
        grid.nodes()
            .iter()
            .zip(psi)
            .map(|(&t, &p)| p + jt * (t + T::PI()))
            .collect()
    };
    let energy = |psi: &Vec<T>| Ok(theta_energy_parts(grid, psi, &theta_of(psi), j, kappa2));
    let direction = |psi: &Vec<T>| {
        let lap = sp.neg_laplacian(psi);
        let g: Vec<T> = lap
            .iter()
            .zip(theta_of(psi))
            .map(|(&l, th)| lit::<T>(2.0) * l + kappa2 * (lit::<T>(2.0) * th).sin())
            .collect();
        let gn = (h * g.iter().map(|&x| x * x).sum::<T>()).sqrt();
        let d = match opts.metric {
            Metric::L2 => g,
            Metric::Sobolev => sp.resolvent(T::one() + kappa2, &g),
        };
        Ok((gn, d))
    };
    let retract =
        |psi: &Vec<T>, d: &Vec<T>, s: T| Ok(psi.iter().zip(d).map(|(&p, &x)| p - s * x).collect());
    let out = run(init.periodic_part(), opts, energy, direction, retract)?;
    let profile = AngleProfile::from_periodic(grid.clone(), &out.state, j)?;
    Ok(DescentTrace {
        iterations: out.energies.len() - 1,
        energies: out.energies,
        final_field: profile,
        converged: out.converged,
        grad_norm: out.grad_norm,
    })
}

/// Seeded node-wise Gaussian start, renormalized and, for the WAS class,
/// projected onto it.
pub fn random_circle_init<T: Real>(
    grid: &PeriodicGrid<T>,
    constraint: Constraint,
    seed: u64,
) -> Result<VectorField<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = VectorField::random(grid.clone(), constraint.kind(), &mut rng)?;
    if constraint != Constraint::WeaklyAxiallySymmetric {
        return Ok(field);
    }
    let mut v = field.into_values();
    enforce_was(&mut v)?;
    VectorField::new(grid.clone(), v, ConstraintKind::UnitSphere)
}

pub fn random_cylinder_init<T: Real>(
    grid: &PeriodicGrid<T>,
    z_count: usize,
    constraint: Constraint,
    seed: u64,
) -> Result<CylinderField<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = CylinderField::random(grid, z_count, constraint.kind(), &mut rng)?;
    if constraint != Constraint::WeaklyAxiallySymmetric {
        return Ok(field);
    }
    let rings = field
        .into_rings()
        .into_iter()
        .map(|r| {
            let mut v = r.into_values();
            enforce_was(&mut v)?;
            VectorField::new(grid.clone(), v, ConstraintKind::UnitSphere)
        })
        .collect::<Result<Vec<_>>>()?;
    CylinderField::new(rings)
}

/// Runs one descent per seed `opts.seed, opts.seed + 1, …` in parallel;
/// traces come back in seed order.
///
/// On grids finer than [`COARSE_N`] each run starts from the random field on
/// the coarse grid, descends there, and is interpolated onto `grid` for the
/// final descent; the returned trace covers that final descent. Node-wise
/// noise on a fine grid unwinds into the local in-plane minima far more
/// often than the same noise on a coarse one, and coarse iterations are
/// cheap.
pub fn multistart_circle<T: Real>(
    grid: &PeriodicGrid<T>,
    params: &EnergyParams<T>,
    opts: &DescentOptions<T>,
    seeds: usize,
) -> Result<Vec<DescentTrace<T, VectorField<T>>>> {
    let coarse = if grid.n_points() > COARSE_N {
        Some(PeriodicGrid::new(COARSE_N)?)
    } else {
        None
    };
    (0..seeds as u64)
        .into_par_iter()
        .map(|k| {
            let seed = opts.seed + k;
            let Some(cg) = &coarse else {
                let init = random_circle_init(grid, opts.constraint, seed)?;
                return descend_circle(&init, params, opts);
            };
            let init = random_circle_init(cg, opts.constraint, seed)?;
            let rough = descend_circle(&init, params, opts)?;
            descend_circle(&rough.final_field.resample(grid)?, params, opts)
        })
        .collect()
}

/// As [`multistart_circle`], with the coarse level capped at [`COARSE_N`]
/// angular and [`COARSE_Z`] axial nodes.
pub fn multistart_cylinder<T: Real>(
    grid: &PeriodicGrid<T>,
    z_count: usize,
    params: &EnergyParams<T>,
    opts: &DescentOptions<T>,
    seeds: usize,
) -> Result<Vec<DescentTrace<T, CylinderField<T>>>> {
    let coarse = if grid.n_points() > COARSE_N || z_count > COARSE_Z {
        Some((
            PeriodicGrid::new(grid.n_points().min(COARSE_N))?,
            z_count.min(COARSE_Z),
        ))
    } else {
        None
    };
    (0..seeds as u64)
        .into_par_iter()
        .map(|k| {
            let seed = opts.seed + k;
            let Some((cg, cz)) = &coarse else {
                let init = random_cylinder_init(grid, z_count, opts.constraint, seed)?;
                return descend_cylinder(&init, params, opts);
            };
            let init = random_cylinder_init(cg, *cz, opts.constraint, seed)?;
            let rough = descend_cylinder(&init, params, opts)?;
            descend_cylinder(&rough.final_field.resample(grid, z_count)?, params, opts)
        })
        .collect()
}
