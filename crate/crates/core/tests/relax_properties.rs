mod common;

use std::f64::consts::PI;

use common::band_limited;
use cylmin::relax::{
    block_eigenvalue, norm_spread, oracle_lowest_mode, rayleigh_quotient, relaxed_energy_bounds,
    Branch,
};
use cylmin::*;
use proptest::prelude::*;

const KAPPAS: [f64; 7] = [0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 10.0];

#[test]
fn block_minimum_is_the_closed_form() {
    for k2 in KAPPAS {
        let c = closed_form_constant(k2).unwrap().c2_closed;
        let blocks: Vec<f64> = (0..=8).map(|n| block_eigenvalue(n, k2)).collect();
        let min = blocks.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((min - c).abs() < 1e-12, "kappa2 = {k2}");
        let argmin: Vec<usize> = (0..=8)
            .filter(|&n| (blocks[n] - min).abs() < 1e-12)
            .collect();
        let want: &[usize] = if k2 < 3.0 {
            &[1]
        } else if k2 == 3.0 {
            &[0, 1]
        } else {
            &[0]
        };
        assert_eq!(argmin, want, "kappa2 = {k2}");
        for n in 2..8 {
            assert!(blocks[n + 1] > blocks[n], "kappa2 = {k2}, n = {n}");
        }
    }
}

#[test]
fn constant_is_monotone_and_saturates() {
    let mut prev = 0.0;
    for i in 1..=50 {
        let k2 = 6.0 * i as f64 / 50.0;
        let r = closed_form_constant(k2).unwrap();
        let (_, upper) = relaxed_energy_bounds(k2).unwrap();
        assert!(r.c2_closed >= prev && r.c2_closed > 0.0 && r.c2_closed <= upper + 1e-15);
        assert!(r.c2_closed - prev < 0.2, "jump at {k2}");
        assert_eq!(r.c2_closed == 1.0, k2 >= 3.0);
        prev = r.c2_closed;
    }
}

#[test]
fn oracle_mode_stays_in_plane() {
    let grid: Grid = make_grid(64).unwrap();
    for k2 in [0.5, 1.0, 2.0] {
        let (lam, u) = oracle_lowest_mode(k2, &grid).unwrap();
        let c = closed_form_constant(k2).unwrap().c2_closed;
        assert!((lam - c).abs() < 2e-3, "{lam} vs {c}");
        let axial = u.values().iter().map(|v| v.z.abs()).fold(0.0, f64::max);
        assert!(axial < 1e-8, "kappa2 = {k2}: axial part {axial}");
    }
}

#[test]
fn extremals_attain_the_constant() {
    let grid: Grid = make_grid(64).unwrap();
    for k2 in [0.5, 1.0, 2.0, 4.0] {
        let c = closed_form_constant(k2).unwrap().c2_closed;
        let u = extremal_field(k2, ExtremalParams::default(), &grid).unwrap();
        assert!((rayleigh_quotient(&u, k2).unwrap() - c).abs() < 1e-8);
        let mass: f64 = u.values().iter().map(|v| v.norm_sq()).sum::<f64>() / 64.0;
        assert!((mass - 1.0).abs() < 1e-10);
    }
    for rho1 in [0.0, 0.2, 1.0 / 5f64.sqrt()] {
        for branch in [Branch::Plus, Branch::Minus] {
            let p = ExtremalParams {
                theta: 0.4,
                rho1,
                branch,
            };
            let u = extremal_field(3.0, p, &grid).unwrap();
            assert!((rayleigh_quotient(&u, 3.0).unwrap() - 1.0).abs() < 1e-8);
        }
    }
    let too_big = ExtremalParams {
        rho1: 0.5,
        ..Default::default()
    };
    assert!(extremal_field(3.0, too_big, &grid).is_err());
    assert!(norm_spread(&extremal_field(1.0, ExtremalParams::default(), &grid).unwrap()) > 0.05);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn poincare_inequality_holds(seed in any::<u64>(), k2 in 0.05f64..8.0) {
        // Degree-4 fields: every product in the quotient is integrated exactly.
        let grid = make_grid(64).unwrap();
        let u = band_limited(&grid, 4, seed);
        let c = closed_form_constant(k2).unwrap().c2_closed;
        prop_assert!(rayleigh_quotient(&u, k2).unwrap() >= c - 1e-8);
    }

    #[test]
    fn extremal_quotient_is_phase_independent(theta in -PI..PI, k2 in 0.05f64..6.0) {
        let grid = make_grid(64).unwrap();
        let at = |th| {
            let p = ExtremalParams { theta: th, ..Default::default() };
            rayleigh_quotient(&extremal_field(k2, p, &grid).unwrap(), k2).unwrap()
        };
        prop_assert!((at(theta) - at(0.0)).abs() < 1e-10);
    }
}
