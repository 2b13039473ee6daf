//! Adaptive composite Gauss-Legendre quadrature and the periodic trapezoid
//! rule used as its independent cross-check.

use std::sync::OnceLock;

use num_traits::Float;

use crate::scalar::{count, lit, Real};

const ORDER: usize = 16;
const MAX_DEPTH: u32 = 48;

/// 16-point Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_legendre_16() -> &'static [(f64, f64); ORDER] {
    static RULE: OnceLock<[(f64, f64); ORDER]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let mut rule = [(0.0, 0.0); ORDER];
        for i in 0..n {
            // Chebyshev-like initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            rule[i] = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        rule
    })
}

fn panel<T: Real>(f: &impl Fn(T) -> T, a: T, b: T) -> T {
    let half = (b - a) * lit(0.5);
    let mid = (a + b) * lit(0.5);
    let s: T = gauss_legendre_16()
        .iter()
        .map(|&(x, w)| lit::<T>(w) * f(mid + half * lit(x)))
        .sum();
    s * half
}

fn adapt<T: Real>(f: &impl Fn(T) -> T, a: T, b: T, whole: T, tol: T, depth: u32) -> T {
    let mid = (a + b) * lit(0.5);
    let left = panel(f, a, mid);
    let right = panel(f, mid, b);
    let both = left + right;
    let floor = T::epsilon() * lit(64.0) * Float::abs(both);
    if Float::abs(both - whole) <= Float::max(tol, floor) || depth >= MAX_DEPTH {
        return both;
    }
    let half_tol = tol * lit(0.5);
    adapt(f, a, mid, left, half_tol, depth + 1) + adapt(f, mid, b, right, half_tol, depth + 1)
}

/// `∫_a^b f` to absolute tolerance `tol`.
///
/// The interval is first cut at every multiple of π/2 it contains, which is
/// where the elliptic-type integrands of this crate concentrate.
pub fn integrate<T: Real>(f: impl Fn(T) -> T, a: T, b: T, tol: T) -> T {
    if a == b {
        return T::zero();
    }
    if b < a {
        return -integrate(f, b, a, tol);
    }
    let quarter = T::FRAC_PI_2();
    let mut cuts = vec![a];
    let mut k = (a / quarter).floor() + T::one();
    while k * quarter < b {
        let c = k * quarter;
        if c > a {
            cuts.push(c);
        }
        k = k + T::one();
    }
    cuts.push(b);
    let pieces = count::<T>(cuts.len() - 1);
    cuts.windows(2)
        .map(|w| {
            let whole = panel(&f, w[0], w[1]);
            adapt(&f, w[0], w[1], whole, tol / pieces, 0)
        })
        .sum()
}

/// Mean of a 2π-periodic function over one period by the `m`-point
/// rectangle rule (spectrally accurate for analytic integrands).
pub fn periodic_mean<T: Real>(f: impl Fn(T) -> T, m: usize) -> T {
    let h = T::TAU() / count(m);
    let s: T = (0..m).map(|i| f(-T::PI() + h * count(i))).sum();
    s / count(m)
}
