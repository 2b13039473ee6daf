mod common;

use std::f64::consts::{PI, TAU};

use common::{params, random_unit, smooth_planar};
use cylmin::minimize::{random_circle_init, random_cylinder_init, ring_average, Metric};
use cylmin::*;
use proptest::prelude::*;

fn in_plane_opts() -> Options {
    DescentOptions {
        constraint: Constraint::InPlane,
        ..Default::default()
    }
}

#[test]
fn theta_descent_reaches_the_elliptic_minimum() {
    let grid: Grid = make_grid(128).unwrap();
    let theta: Vec<f64> = grid.nodes().iter().map(|&t| -t).collect();
    let init = AngleProfile::new(grid.clone(), theta, -1).unwrap();
    let t = descend_theta(&init, &params(1.0), &DescentOptions::default()).unwrap();
    let want = EllipticSolution::solve(1.0).unwrap().energy_deg0;
    assert!(
        (t.final_energy() - want).abs() < 1e-4,
        "{} vs {want}",
        t.final_energy()
    );
    assert_eq!(t.final_field.j(), -1);
    assert!(t.is_monotone());
}

#[test]
fn theta_descent_in_the_normal_class_reaches_two_pi() {
    let grid: Grid = make_grid(64).unwrap();
    let psi: Vec<f64> = grid.nodes().iter().map(|&t| 0.3 * t.sin()).collect();
    let init = AngleProfile::from_periodic(grid, &psi, 0).unwrap();
    let t = descend_theta(&init, &params(2.0), &DescentOptions::default()).unwrap();
    assert!((t.final_energy() - TAU).abs() < 1e-8);
    assert!(t.final_field.theta().iter().all(|x| x.abs() < 1e-4));
}

#[test]
fn theta_descent_with_two_windings_stays_above_two_pi() {
    let grid: Grid = make_grid(64).unwrap();
    let init = AngleProfile::from_periodic(grid, &vec![0.0; 64], -2).unwrap();
    let t = descend_theta(&init, &params(1.0), &DescentOptions::default()).unwrap();
    assert!(t.final_energy() > TAU);
    assert_eq!(t.final_field.j(), -2);
}

#[test]
fn theta_energy_matches_the_field_energy() {
    let grid: Grid = make_grid(64).unwrap();
    for j in -2..=1 {
        let u = smooth_planar(&grid, j, (40 + j) as u64);
        let lift = lift_angle(&u).unwrap();
        let a = minimize::theta_energy(&lift, 1.4);
        let b = circle_energy(&u, &params(1.4)).total;
        assert!((a - b).abs() < 1e-10 * b, "j = {j}: {a} vs {b}");
    }
}

#[test]
fn descent_from_a_critical_point_does_nothing() {
    let grid: Grid = make_grid(64).unwrap();
    let n = sample_normal_field(&grid);
    let t = descend_circle(&n, &params(0.7), &DescentOptions::default()).unwrap();
    assert_eq!(t.iterations, 0);
    assert!(t.converged && t.grad_norm < 1e-8);
    assert_eq!(t.final_field.values(), n.values());
}

#[test]
fn in_plane_descent_ends_at_the_degree_resolved_minimum() {
    let grid: Grid = make_grid(64).unwrap();
    let deg0 = EllipticSolution::solve(1.0).unwrap().energy_deg0;
    for seed in 0..4 {
        let init = random_circle_init(&grid, Constraint::InPlane, seed).unwrap();
        let t = descend_circle(&init, &params(1.0), &in_plane_opts()).unwrap();
        assert!(t.final_field.is_planar());
        let want = match winding_degree(&t.final_field).unwrap() {
            0 => deg0,
            1 => TAU,
            d => panic!("seed {seed}: descent stopped in degree {d}"),
        };
        assert!((t.final_energy() - want).abs() < 1e-3, "seed {seed}");
    }
}

#[test]
fn degree_is_kept_while_increments_stay_resolvable() {
    let grid: Grid = make_grid(64).unwrap();
    let opts = DescentOptions {
        metric: Metric::L2,
        step: 1e-3,
        max_iters: 1,
        ..in_plane_opts()
    };
    let mut u = smooth_planar(&grid, 1, 8);
    let deg = winding_degree(&u).unwrap();
    assert_eq!(deg, 2);
    for _ in 0..200 {
        u = descend_circle(&u, &params(1.0), &opts).unwrap().final_field;
        let max_step = u
            .values()
            .iter()
            .zip(u.values().iter().cycle().skip(1))
            .map(|(a, b)| (a.x * b.y - a.y * b.x).atan2(a.x * b.x + a.y * b.y).abs())
            .fold(0.0, f64::max);
        if max_step < PI / 2.0 {
            assert_eq!(winding_degree(&u).unwrap(), deg);
        }
    }
}

#[test]
fn was_descent_keeps_ring_averages_zero() {
    let grid: Grid = make_grid(16).unwrap();
    let init = random_cylinder_init(&grid, 7, Constraint::WeaklyAxiallySymmetric, 4).unwrap();
    let opts = DescentOptions {
        constraint: Constraint::WeaklyAxiallySymmetric,
        max_iters: 300,
        ..Default::default()
    };
    let t = descend_cylinder(&init, &params(0.5), &opts).unwrap();
    assert!(t.is_monotone());
    for ring in init.rings().iter().chain(t.final_field.rings()) {
        let (ax, ay) = ring_average(ring.values());
        assert!(ax.abs() < 1e-10 && ay.abs() < 1e-10);
    }
}

#[test]
fn bad_starts_and_options_are_rejected() {
    let grid: Grid = make_grid(16).unwrap();
    let u = random_unit(&grid, 1);
    assert!(descend_circle(&u, &params(1.0), &in_plane_opts()).is_err());
    let bad = DescentOptions {
        step: -1.0,
        ..Default::default()
    };
    assert!(descend_circle(&u, &params(1.0), &bad).is_err());
    let thin = CylinderField::z_invariant(&u, 2);
    assert!(
        thin.is_err()
            || descend_cylinder(&thin.unwrap(), &params(1.0), &DescentOptions::default()).is_err()
    );
}

#[test]
fn multistart_is_reproducible() {
    let grid: Grid = make_grid(32).unwrap();
    let opts = DescentOptions {
        max_iters: 50,
        seed: 17,
        ..Default::default()
    };
    let a = minimize::multistart_circle(&grid, &params(2.0), &opts, 3).unwrap();
    let b = minimize::multistart_circle(&grid, &params(2.0), &opts, 3).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.energies, y.energies);
    }
}

#[test]
fn fine_grid_multistart_goes_through_the_coarse_level() {
    let grid: Grid = make_grid(256).unwrap();
    let traces =
        minimize::multistart_circle(&grid, &params(4.0), &DescentOptions::default(), 8).unwrap();
    assert!(traces
        .iter()
        .all(|t| t.final_field.len() == 256 && t.is_monotone()));
    let best = traces
        .iter()
        .map(|t| t.final_energy())
        .fold(f64::INFINITY, f64::min);
    assert!((best - TAU).abs() < 1e-8, "{best}");
    let cyl = minimize::multistart_cylinder(&grid, 33, &params(2.0), &DescentOptions::default(), 2)
        .unwrap();
    assert!(cyl
        .iter()
        .all(|t| t.final_field.z_count() == 33 && t.final_field.grid().n_points() == 256));
}

#[test]
fn single_precision_descent_runs() {
    let grid: Grid32 = make_grid(32).unwrap();
    let init = random_circle_init(&grid, Constraint::None, 2).unwrap();
    let opts = DescentOptions::<f32> {
        grad_tol: 1e-4,
        energy_tol: 1e-7,
        ..Default::default()
    };
    let t = descend_circle(&init, &EnergyParams::new(4.0f32).unwrap(), &opts).unwrap();
    assert!(t.is_monotone());
    assert!((t.final_energy() - std::f32::consts::TAU).abs() < 1e-2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn traces_never_increase(seed in any::<u64>(), k2 in 0.1f64..5.0, sobolev in any::<bool>()) {
        let grid = make_grid(32).unwrap();
        let opts = DescentOptions {
            max_iters: 150,
            metric: if sobolev { Metric::Sobolev } else { Metric::L2 },
            step: if sobolev { 0.5 } else { 0.01 },
            ..Default::default()
        };
        let t = descend_circle(&random_unit(&grid, seed), &params(k2), &opts).unwrap();
        prop_assert!(t.energies.windows(2).all(|w| w[1] < w[0]));
        prop_assert!(t.final_energy() <= t.energies[0]);
    }
}
