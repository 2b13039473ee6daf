//! Discrete anisotropic Dirichlet energies on the circle and the cylinder,
//! their gradients, Euler-Lagrange residuals and second variations.
//!
//! Angular derivatives are spectral: the Dirichlet term of a ring is
//! `h Σ_i u_i · (-L u)_i` with `L` the Fourier Laplacian, which is exact for
//! trigonometric polynomials below the Nyquist frequency. Along the cylinder
//! axis the Dirichlet term uses differences between neighbouring rings,
//! `Σ_j h_t |u_{j+1} - u_j|² / h_z`, which imposes no boundary condition at
//! `z = ±1`. Remaining `z`-integrals use the trapezoid rule.

use faer::{Mat, Side};
use num_traits::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{z_weights, CylinderField, PeriodicGrid, VectorField};
use crate::scalar::{count, lit, to_f64, Real};
use crate::vec3::Vec3;

/// Tolerance for `φ_i · u_i` when a direction must be tangent.
const TANGENT_TOL: f64 = 1e-10;

/// Anisotropy strength `κ²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyParams<T> {
    kappa2: T,
}

impl<T: Real> EnergyParams<T> {
    pub fn new(kappa2: T) -> Result<Self> {
        if !kappa2.is_finite() || kappa2 < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "kappa2 must be finite and >= 0, got {kappa2}"
            )));
        }
        Ok(Self { kappa2 })
    }

    pub fn kappa2(&self) -> T {
        self.kappa2
    }

    /// `κ² = 0`: only the Dirichlet term remains and constants minimize.
    pub fn is_degenerate(&self) -> bool {
        self.kappa2 == T::zero()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyReport<T> {
    pub kappa2: T,
    pub dirichlet: T,
    pub anisotropy: T,
    pub total: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<&'static str>,
}

impl<T: Real> EnergyReport<T> {
    fn new(params: &EnergyParams<T>, dirichlet: T, anisotropy: T) -> Self {
        Self {
            kappa2: params.kappa2,
            dirichlet,
            anisotropy,
            total: dirichlet + anisotropy,
            warning: params
                .is_degenerate()
                .then_some("kappa2 = 0: degenerate energy, constant fields minimize"),
        }
    }

    pub fn to_json(&self) -> String
    where
        T: Serialize,
    {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// `-L u` applied to each Cartesian component.
pub(crate) fn neg_laplacian<T: Real>(grid: &PeriodicGrid<T>, values: &[Vec3<T>]) -> Vec<Vec3<T>> {
    let sp = grid.spectral();
    let comps: Vec<Vec<T>> = (0..3)
        .map(|c| {
            let u: Vec<T> = values.iter().map(|v| v.to_array()[c]).collect();
            sp.neg_laplacian(&u)
        })
        .collect();
    (0..values.len())
        .map(|i| Vec3::new(comps[0][i], comps[1][i], comps[2][i]))
        .collect()
}

/// Dirichlet and anisotropy parts of a single ring, given `-L u`.
fn ring_parts<T: Real>(field: &VectorField<T>, lap: &[Vec3<T>], kappa2: T) -> (T, T) {
    let grid = field.grid();
    let h = grid.spacing();
    let mut dir = T::zero();
    let mut ani = T::zero();
    for (i, (&u, &l)) in field.values().iter().zip(lap).enumerate() {
        dir = dir + u.dot(l);
        ani = ani + u.cross(grid.normal(i)).norm_sq();
    }
    (h * dir, kappa2 * h * ani)
}

/// `∫|∂_t u|² + κ² ∫|u × n|²` over the circle.
pub fn circle_energy<T: Real>(field: &VectorField<T>, params: &EnergyParams<T>) -> EnergyReport<T> {
    let lap = neg_laplacian(field.grid(), field.values());
    let (d, a) = ring_parts(field, &lap, params.kappa2);
    EnergyReport::new(params, d, a)
}

/// `∫|∂_z m|²` over the cylinder.
pub fn z_dirichlet<T: Real>(field: &CylinderField<T>) -> T {
    let ht = field.grid().spacing();
    let hz = field.z_spacing();
    field
        .rings()
        .windows(2)
        .map(|w| {
            let s: T = w[0]
                .values()
                .iter()
                .zip(w[1].values())
                .map(|(&a, &b)| (b - a).norm_sq())
                .sum();
            s * ht / hz
        })
        .sum()
}

/// `‖∂_z m‖_{L²}`; zero exactly for `z`-invariant fields.
pub fn z_variation<T: Real>(field: &CylinderField<T>) -> T {
    z_dirichlet(field).sqrt()
}

/// `∫_I∫_{S¹} |∂_t m|² + |∂_z m|² + κ² |m × n|²`.
pub fn cylinder_energy<T: Real>(
    field: &CylinderField<T>,
    params: &EnergyParams<T>,
) -> Result<EnergyReport<T>> {
    if field.z_count() < 3 {
        return Err(Error::TooFewZNodes(field.z_count()));
    }
    let mut dir = z_dirichlet(field);
    let mut ani = T::zero();
    for (ring, w) in field.rings().iter().zip(field.z_weights()) {
        let lap = neg_laplacian(ring.grid(), ring.values());
        let (d, a) = ring_parts(ring, &lap, params.kappa2);
        dir = dir + w * d;
        ani = ani + w * a;
    }
    Ok(EnergyReport::new(params, dir, ani))
}

/// Unprojected L² gradient of the ring energy.
fn raw_gradient<T: Real>(field: &VectorField<T>, kappa2: T) -> Vec<Vec3<T>> {
    let grid = field.grid();
    let two = lit::<T>(2.0);
    let lap = neg_laplacian(grid, field.values());
    field
        .values()
        .iter()
        .zip(&lap)
        .enumerate()
        .map(|(i, (&u, &l))| {
            let n = grid.normal(i);
            l * two + (u - n * u.dot(n)) * (two * kappa2)
        })
        .collect()
}

fn project_tangent<T: Real>(values: &[Vec3<T>], g: &mut [Vec3<T>]) {
    for (gi, &u) in g.iter_mut().zip(values) {
        *gi = gi.reject(u);
    }
}

/// Discrete L² gradient of [`circle_energy`] projected onto the tangent
/// space of the sphere at every node:
/// `g_i = P_i(-2 L u_i + 2κ²(u_i - (u_i·n_i) n_i))`, `P_i = I - u_i ⊗ u_i`.
pub fn energy_gradient<T: Real>(field: &VectorField<T>, params: &EnergyParams<T>) -> Vec<Vec3<T>> {
    let mut g = raw_gradient(field, params.kappa2);
    project_tangent(field.values(), &mut g);
    g
}

/// L² norm of a per-node vector quantity on the circle.
pub fn l2_norm<T: Real>(grid: &PeriodicGrid<T>, v: &[Vec3<T>]) -> T {
    let s: T = v.iter().map(|x| x.norm_sq()).sum();
    (grid.spacing() * s).sqrt()
}

/// `‖energy_gradient‖_{L²}`: zero iff the field is discretely critical.
pub fn el_residual<T: Real>(field: &VectorField<T>, params: &EnergyParams<T>) -> T {
    l2_norm(field.grid(), &energy_gradient(field, params))
}

/// Projected L² gradient of [`cylinder_energy`], ring by ring. The mass of
/// node `(j, i)` is `w_j h_t`.
pub fn cylinder_gradient<T: Real>(
    field: &CylinderField<T>,
    params: &EnergyParams<T>,
) -> Result<Vec<Vec<Vec3<T>>>> {
    let m = field.z_count();
    if m < 3 {
        return Err(Error::TooFewZNodes(m));
    }
    let hz = field.z_spacing();
    let weights = field.z_weights();
    let rings = field.rings();
    let two = lit::<T>(2.0);
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        let mut g = raw_gradient(&rings[j], params.kappa2);
        // d/du_j of Σ h_t |u_{j+1} - u_j|²/h_z, divided by the mass w_j h_t
        let scale = two / (hz * weights[j]);
        for (i, gi) in g.iter_mut().enumerate() {
            let u = rings[j].values()[i];
            let mut acc = Vec3::zero();
            if j > 0 {
                acc += u - rings[j - 1].values()[i];
            }
            if j + 1 < m {
                acc += u - rings[j + 1].values()[i];
            }
            *gi += acc * scale;
        }
        project_tangent(rings[j].values(), &mut g);
        out.push(g);
    }
    Ok(out)
}

/// L² norm of a per-node quantity on the cylinder.
pub fn cylinder_l2_norm<T: Real>(grid: &PeriodicGrid<T>, v: &[Vec<Vec3<T>>]) -> T {
    let w = z_weights::<T>(v.len());
    let s: T = v
        .iter()
        .zip(w)
        .map(|(ring, wj)| wj * ring.iter().map(|x| x.norm_sq()).sum::<T>())
        .sum();
    (grid.spacing() * s).sqrt()
}

/// Pointwise `|∂_t u|² - κ²(u·n)²`, with `|∂_t u|² = -u·∂_tt u` for unit
/// fields.
fn potential<T: Real>(field: &VectorField<T>, kappa2: T) -> Vec<T> {
    let grid = field.grid();
    let lap = neg_laplacian(grid, field.values());
    field
        .values()
        .iter()
        .zip(&lap)
        .enumerate()
        .map(|(i, (&u, &l))| {
            let un = u.dot(grid.normal(i));
            u.dot(l) - kappa2 * un * un
        })
        .collect()
}

/// Second variation along a tangent direction `φ`:
///
/// `∫_I∫_{S¹} |∇φ|² - κ²(φ·n)² - (|∇m|² - κ²(m·n)²)|φ|²`
///
/// for the `z`-invariant extension of `field`, i.e. twice the circle
/// integral. Equals `d²/dε² F(Π(u + εφ))` at a critical point.
pub fn second_variation_value<T: Real>(
    field: &VectorField<T>,
    params: &EnergyParams<T>,
    direction: &[Vec3<T>],
) -> Result<T> {
    let grid = field.grid();
    if direction.len() != field.len() {
        return Err(Error::LengthMismatch {
            expected: field.len(),
            got: direction.len(),
        });
    }
    for (node, (&phi, &u)) in direction.iter().zip(field.values()).enumerate() {
        let d = phi.dot(u);
        if Float::abs(d) > lit(TANGENT_TOL) {
            return Err(Error::NotTangent {
                node,
                dot: to_f64(d),
            });
        }
    }
    let kappa2 = params.kappa2;
    let pot = potential(field, kappa2);
    let lap_phi = neg_laplacian(grid, direction);
    let mut s = T::zero();
    for (i, (&phi, &lp)) in direction.iter().zip(&lap_phi).enumerate() {
        let pn = phi.dot(grid.normal(i));
        s = s + phi.dot(lp) - kappa2 * pn * pn - pot[i] * phi.norm_sq();
    }
    Ok(lit::<T>(2.0) * grid.spacing() * s)
}

/// Orthonormal tangent basis at `u`: Gram-Schmidt on the two frame vectors
/// among `{τ, n, e₃}` least parallel to `u`.
pub fn tangent_basis<T: Real>(frame_vectors: [Vec3<T>; 3], u: Vec3<T>) -> [Vec3<T>; 2] {
    let mut c = frame_vectors;
    c.sort_by(|a, b| {
        Float::abs(a.dot(u))
            .partial_cmp(&Float::abs(b.dot(u)))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let e1 = c[0]
        .reject(u)
        .normalized()
        .expect("candidate not parallel to u");
    let e2 = c[1]
        .reject(u)
        .reject(e1)
        .normalized()
        .expect("candidates span the tangent plane");
    [e1, e2]
}

/// Symmetric matrix (row-major, `2N x 2N`, `f64`) of the second variation in
/// the per-node tangent basis of [`tangent_basis`], normalized so that its
/// eigenvalues are Rayleigh quotients against `∫_{S¹}|φ|²`.
pub fn second_variation_matrix<T: Real>(
    field: &VectorField<T>,
    params: &EnergyParams<T>,
) -> Vec<f64> {
    let grid = field.grid();
    let n = field.len();
    let kappa2 = to_f64(params.kappa2);
    let dm: Vec<f64> = grid
        .spectral()
        .neg_laplacian_matrix()
        .into_iter()
        .map(to_f64)
        .collect();
    let pot: Vec<f64> = potential(field, params.kappa2)
        .into_iter()
        .map(to_f64)
        .collect();
    let basis: Vec<[Vec3<f64>; 2]> = field
        .values()
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let f = grid.frame(i);
            let conv = |v: Vec3<T>| Vec3::new(to_f64(v.x), to_f64(v.y), to_f64(v.z));
            let b = tangent_basis([f.tangent, f.normal, f.axis], u);
            [conv(b[0]), conv(b[1])]
        })
        .collect();
    let dim = 2 * n;
    let mut q = vec![0.0; dim * dim];
    for i in 0..n {
        for j in 0..n {
            let d = dm[i * n + j];
            for a in 0..2 {
                for b in 0..2 {
                    q[(2 * i + a) * dim + 2 * j + b] = 2.0 * d * basis[i][a].dot(basis[j][b]);
                }
            }
        }
        let nrm = Vec3::new(to_f64(grid.normal(i).x), to_f64(grid.normal(i).y), 0.0);
        for a in 0..2 {
            for b in 0..2 {
                let mut v = kappa2 * basis[i][a].dot(nrm) * basis[i][b].dot(nrm);
                if a == b {
                    v += pot[i];
                }
                q[(2 * i + a) * dim + 2 * i + b] -= 2.0 * v;
            }
        }
    }
    q
}

pub(crate) fn symmetric_eigenvalues(a: &[f64], dim: usize) -> Vec<f64> {
    let m = Mat::<f64>::from_fn(dim, dim, |i, j| 0.5 * (a[i * dim + j] + a[j * dim + i]));
    let mut ev = m.selfadjoint_eigenvalues(Side::Lower);
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

/// Smallest eigenvalue of [`second_variation_matrix`]: positive at a strict
/// local minimizer, negative at an unstable critical point.
pub fn second_variation_min_eig<T: Real>(field: &VectorField<T>, params: &EnergyParams<T>) -> T {
    let q = second_variation_matrix(field, params);
    let ev = symmetric_eigenvalues(&q, 2 * field.len());
    T::from(ev[0]).unwrap()
}

/// `u ↦ R(s) u(· - s)` for a shift of `k` nodes.
pub fn rotate_shift<T: Real>(field: &VectorField<T>, k: usize) -> Result<VectorField<T>> {
    let grid = field.grid();
    let n = field.len();
    let s = count::<T>(k) * grid.spacing();
    let rot = crate::grid::Frame::at(s);
    let values = (0..n)
        .map(|i| rot.rotate(field.values()[(i + n - k % n) % n]))
        .collect();
    VectorField::new(grid.clone(), values, field.kind())
}
