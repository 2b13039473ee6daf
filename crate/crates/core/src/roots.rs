//! Bracketed scalar root finding and 1-D minimization.

use num_traits::Float;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Brent's method on `[lo, hi]`.
///
/// Stops when `|f| <= ftol` or the bracket is narrower than `xtol`
/// (relative to machine precision at the root).
pub fn brent<T: Real>(
    mut f: impl FnMut(T) -> T,
    lo: T,
    hi: T,
    xtol: T,
    ftol: T,
    max_iter: usize,
) -> Result<T> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if !(fa * fb < T::zero()) {
        return Err(Error::Bracket {
            lo: to_f64(lo),
            hi: to_f64(hi),
            f_lo: to_f64(fa),
            f_hi: to_f64(fb),
        });
    }
    let two = lit::<T>(2.0);
    let half = lit::<T>(0.5);
    let (mut c, mut fc) = (b, fb);
    let (mut d, mut e) = (b - a, b - a);
    for _ in 0..max_iter {
        if (fb > T::zero()) == (fc > T::zero()) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if Float::abs(fc) < Float::abs(fb) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * T::epsilon() * Float::abs(b) + half * xtol;
        let xm = half * (c - b);
        if Float::abs(xm) <= tol1 || Float::abs(fb) <= ftol {
            return Ok(b);
        }
        if Float::abs(e) >= tol1 && Float::abs(fa) > Float::abs(fb) {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = Float::abs(p);
            let min1 = lit::<T>(3.0) * xm * q - Float::abs(tol1 * q);
            let min2 = Float::abs(e * q);
            if two * p < Float::min(min1, min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if Float::abs(d) > tol1 {
            b = b + d;
        } else {
            b = b + if xm > T::zero() { tol1 } else { -tol1 };
        }
        fb = f(b);
    }
    Err(Error::NoConvergence("Brent root search"))
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
pub fn golden_min<T: Real>(mut f: impl FnMut(T) -> T, a: T, b: T, xtol: T) -> (T, T) {
    let inv_phi = lit::<T>(0.618_033_988_749_894_8);
    let (mut a, mut b) = (a, b);
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if Float::abs(b - a) <= xtol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_cubic_root() {
        let r = brent(
            |x: f64| x * x * x - 2.0 * x - 5.0,
            2.0,
            3.0,
            1e-15,
            0.0,
            100,
        )
        .unwrap();
        assert!((r - 2.094_551_481_542_326_5).abs() < 1e-13);
    }

    #[test]
    fn brent_rejects_unbracketed_interval() {
        let e = brent(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12, 0.0, 50).unwrap_err();
        assert!(matches!(e, Error::Bracket { .. }));
    }

    #[test]
    fn golden_section_locates_parabola_vertex() {
        let (x, fx) = golden_min(|x: f64| (x - 0.3).powi(2) + 1.0, -2.0, 2.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-14);
    }
}
