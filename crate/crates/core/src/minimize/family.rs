use num_traits::Float;

use crate::elliptic::AmplitudeMap;
use crate::error::{Error, Result};
use crate::grid::{sample_u_theta, CylinderField, PeriodicGrid, VectorField};
use crate::relax::{extremal_field, Branch, ExtremalParams, Regime};
use crate::roots::golden_min;
use crate::scalar::{count, lit, Real};
use crate::vec3::Vec3;

/// Max-node distance below which a candidate is accepted without looking
/// at families with more free parameters.
pub const MATCH_TOL: f64 = 0.05;

const PARAM_GRID: usize = 48;
const AM_TABLE: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `±n`.
    Normal,
    /// `±e₃`.
    E3,
    /// `u_θ = (sin θ cos t, sin θ sin t, cos θ)`.
    UTheta,
    /// Relaxed-problem extremals, phase `θ` (and `ρ₁` at `κ² = 3`).
    Extremal,
    /// `θ(t) = am_κ(-α_κ t + b)`.
    DegreeZero,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Normal,
        Family::E3,
        Family::UTheta,
        Family::Extremal,
        Family::DegreeZero,
    ];
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyMatch<T> {
    pub label: &'static str,
    pub distance: T,
    /// Free parameters of the best member (`θ`, `b`, or `(θ, ρ₁)`).
    pub parameters: Vec<T>,
    pub candidate: Vec<Vec3<T>>,
}

fn distance<T: Real>(a: &[Vec3<T>], b: &[Vec3<T>]) -> T {
    if a.len() != b.len() {
        return T::infinity();
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (*x - *y).norm())
        .fold(T::zero(), Float::max)
}

/// Grid search over `[lo, hi]` followed by golden-section refinement around
/// the best grid point.
fn search_1d<T: Real>(mut f: impl FnMut(T) -> T, lo: T, hi: T) -> (T, T) {
    let cell = (hi - lo) / count::<T>(PARAM_GRID);
    let (mut best_x, mut best_f) = (lo, T::infinity());
    for i in 0..=PARAM_GRID {
        let x = lo + cell * count::<T>(i);
        let fx = f(x);
        if fx < best_f {
            best_x = x;
            best_f = fx;
        }
    }
    let (x, fx) = golden_min(
        &mut f,
        best_x - cell,
        best_x + cell,
        lit::<T>(1e-10).max(T::epsilon().sqrt()),
    );
    if fx < best_f {
        (x, fx)
    } else {
        (best_x, best_f)
    }
}

/// `am_κ` tabulated over one period and linearly interpolated.
struct AmTable<T> {
    alpha: T,
    period: T,
    values: Vec<T>,
}

impl<T: Real> AmTable<T> {
    fn new(kappa2: T) -> Result<Self> {
        let map = AmplitudeMap::for_kappa2(kappa2)?;
        let period = map.period();
        let values = (0..=AM_TABLE)
            .map(|i| map.am(period * count::<T>(i) / count::<T>(AM_TABLE)))
            .collect();
        Ok(Self {
            alpha: map.alpha(),
            period,
            values,
        })
    }

    fn am(&self, y: T) -> T {
        let k = (y / self.period).floor();
        let pos = (y - k * self.period) / self.period * count::<T>(AM_TABLE);
        let i = pos.floor().to_usize().unwrap_or(0).min(AM_TABLE - 1);
        let frac = pos - count::<T>(i);
        let v = self.values[i] + (self.values[i + 1] - self.values[i]) * frac;
        v + k * T::TAU()
    }

    fn sample(&self, grid: &PeriodicGrid<T>, b: T) -> Vec<Vec3<T>> {
        grid.nodes()
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let th = self.am(-self.alpha * t + b);
                let f = grid.frame(i);
                f.tangent * th.sin() + f.normal * th.cos()
            })
            .collect()
    }
}

fn extremal_values<T: Real>(
    kappa2: T,
    p: ExtremalParams<T>,
    grid: &PeriodicGrid<T>,
) -> Vec<Vec3<T>> {
    extremal_field(kappa2, p, grid)
        .map(VectorField::into_values)
        .unwrap_or_default()
}

/// Best members of one family (one per sign branch); empty when the family
/// is undefined at `κ²`.
fn best_in_family<T: Real>(
    values: &[Vec3<T>],
    grid: &PeriodicGrid<T>,
    family: Family,
    kappa2: T,
) -> Result<Vec<FamilyMatch<T>>> {
    let n = values.len();
    let pi = T::PI();
    let mut out = Vec::new();
    let mut push = |label, parameters, candidate: Vec<Vec3<T>>| {
        let d = distance(values, &candidate);
        out.push(FamilyMatch {
            label,
            distance: d,
            parameters,
            candidate,
        });
    };
    match family {
        Family::Normal => {
            let nrm: Vec<_> = (0..n).map(|i| grid.normal(i)).collect();
            push("normal+", vec![], nrm.clone());
            push("normal-", vec![], nrm.into_iter().map(|v| -v).collect());
        }
        Family::E3 => {
            push("e3+", vec![], vec![Vec3::e3(); n]);
            push("e3-", vec![], vec![-Vec3::e3(); n]);
        }
        Family::UTheta => {
            let (th, _) = search_1d(
                |th| distance(values, sample_u_theta(grid, th).values()),
                T::zero(),
                pi,
            );
            push("u_theta", vec![th], sample_u_theta(grid, th).into_values());
        }
        Family::Extremal if kappa2 > T::zero() => match Regime::classify(kappa2) {
            Regime::Critical => {
                let max_rho = lit::<T>(0.2).sqrt();
                for branch in [Branch::Plus, Branch::Minus] {
                    let at = |th: T, rho1: T| ExtremalParams {
                        theta: th,
                        rho1,
                        branch,
                    };
                    let best_theta = |rho1: T| {
                        search_1d(
                            |th| distance(values, &extremal_values(kappa2, at(th, rho1), grid)),
                            -pi,
                            pi,
                        )
                    };
                    let (rho, _) = search_1d(|r| best_theta(r).1, T::zero(), max_rho);
                    let rho = rho.max(T::zero()).min(max_rho);
                    let (th, _) = best_theta(rho);
                    push(
                        "extremal",
                        vec![th, rho],
                        extremal_values(kappa2, at(th, rho), grid),
                    );
                }
            }
            _ => {
                let at = |th: T| ExtremalParams {
                    theta: th,
                    rho1: T::zero(),
                    branch: Branch::Plus,
                };
                let (th, _) = search_1d(
                    |th| distance(values, &extremal_values(kappa2, at(th), grid)),
                    -pi,
                    pi,
                );
                push("extremal", vec![th], extremal_values(kappa2, at(th), grid));
            }
        },
        Family::DegreeZero if kappa2 > T::zero() => {
            let table = AmTable::new(kappa2)?;
            let (b, _) = search_1d(
                |b| distance(values, &table.sample(grid, b)),
                T::zero(),
                table.period,
            );
            push("degree_zero", vec![b], table.sample(grid, b));
        }
        Family::Extremal | Family::DegreeZero => {}
    }
    Ok(out)
}

fn tier(f: Family, kappa2: f64) -> u8 {
    match f {
        Family::Normal | Family::E3 => 0,
        Family::Extremal if Regime::classify(kappa2) == Regime::Critical => 2,
        _ => 1,
    }
}

/// Closest closed-form configuration to `field` in max-node distance.
///
/// Families are tried by number of free parameters: a candidate within
/// [`MATCH_TOL`] from a family with fewer parameters wins over a closer one
/// with more (so `e₃` is not reported as `u_θ` with `θ ≈ 0`). When nothing
/// is within tolerance the overall closest candidate is returned.
pub fn match_to_family<T: Real>(
    field: &VectorField<T>,
    families: &[Family],
    kappa2: T,
) -> Result<FamilyMatch<T>> {
    if families.is_empty() {
        return Err(Error::InvalidParameter("no candidate families".into()));
    }
    let k2 = crate::scalar::to_f64(kappa2);
    let mut overall: Option<FamilyMatch<T>> = None;
    for t in 0..=2 {
        let mut best: Option<FamilyMatch<T>> = None;
        for &f in families.iter().filter(|&&f| tier(f, k2) == t) {
            for m in best_in_family(field.values(), field.grid(), f, kappa2)? {
                if best.as_ref().is_none_or(|b| m.distance < b.distance) {
                    best = Some(m);
                }
            }
        }
        if let Some(b) = best {
            if b.distance <= lit(MATCH_TOL) {
                return Ok(b);
            }
            if overall.as_ref().is_none_or(|o| b.distance < o.distance) {
                overall = Some(b);
            }
        }
    }
    overall.ok_or_else(|| {
        Error::InvalidParameter(format!(
            "no candidate family is defined at kappa2 = {kappa2}"
        ))
    })
}

/// Matches the middle ring, then reports the largest distance of any ring
/// to that candidate.
pub fn match_cylinder<T: Real>(
    field: &CylinderField<T>,
    families: &[Family],
    kappa2: T,
) -> Result<FamilyMatch<T>> {
    let rings = field.rings();
    let mut m = match_to_family(&rings[rings.len() / 2], families, kappa2)?;
    m.distance = rings
        .iter()
        .map(|r| distance(r.values(), &m.candidate))
        .fold(T::zero(), Float::max);
    Ok(m)
}
