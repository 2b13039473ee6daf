#![allow(dead_code)]

use cylmin::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn params(k2: f64) -> Params {
    EnergyParams::new(k2).unwrap()
}

pub fn random_unit(grid: &Grid, seed: u64) -> Field {
    VectorField::random(grid.clone(), ConstraintKind::UnitSphere, &mut rng(seed)).unwrap()
}

/// Random trigonometric polynomial of degree `modes` per component, so that
/// products of two such fields are integrated exactly on grids with
/// more than `4 * modes` nodes.
pub fn band_limited(grid: &Grid, modes: usize, seed: u64) -> Field {
    let mut r = rng(seed);
    let mut coeff = || -> Vec<(f64, f64)> {
        (0..=modes)
            .map(|_| (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
            .collect()
    };
    let c = [coeff(), coeff(), coeff()];
    VectorField::from_fn(grid.clone(), ConstraintKind::Unconstrained, |_, t: f64| {
        let comp = |cs: &[(f64, f64)]| -> f64 {
            cs.iter()
                .enumerate()
                .map(|(k, &(a, b))| a * (k as f64 * t).cos() + b * (k as f64 * t).sin())
                .sum()
        };
        Vec3::new(comp(&c[0]), comp(&c[1]), comp(&c[2]))
    })
    .unwrap()
}

/// In-plane unit field whose frame angle is `ψ(t) + j(t + π)` with `ψ` a
/// random trigonometric polynomial of small amplitude.
pub fn smooth_planar(grid: &Grid, j: i64, seed: u64) -> Field {
    let mut r = rng(seed);
    let coeffs: Vec<(f64, f64)> = (0..3)
        .map(|_| (r.gen_range(-0.8..0.8), r.gen_range(-0.8..0.8)))
        .collect();
    let theta = grid
        .nodes()
        .iter()
        .map(|&t| {
            let psi: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(k, &(a, b))| a * ((k + 1) as f64 * t).cos() + b * ((k + 1) as f64 * t).sin())
                .sum();
            psi + j as f64 * (t + std::f64::consts::PI)
        })
        .collect();
    AngleProfile::new(grid.clone(), theta, j)
        .unwrap()
        .reconstruct()
}
