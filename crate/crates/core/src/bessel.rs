//! Spherical Bessel functions of the first kind.

use crate::error::{Error, Result};

const RESCALE_ABOVE: f64 = 1e200;

fn j0(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

fn j1(x: f64) -> f64 {
    if x.abs() < 0.3 {
        // x/3 · (1 - x²/10 + x⁴/280 - x⁶/15120 + x⁸/1330560)
        let x2 = x * x;
        x / 3.0 * (1.0 - x2 / 10.0 * (1.0 - x2 / 28.0 * (1.0 - x2 / 54.0 * (1.0 - x2 / 88.0))))
    } else {
        (x.sin() / x - x.cos()) / x
    }
}

/// `j_0(x) … j_order(x)` for `x ≥ 0`.
///
/// Orders below `x` only: upward recurrence from the closed forms. Otherwise
/// Miller's downward recurrence started at `order + max(20, ⌈1.3x⌉)` and
/// normalized against whichever of `j_0`, `j_1` is larger in magnitude.
pub fn spherical_bessel_sequence(order: usize, x: f64) -> Result<Vec<f64>> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("spherical Bessel argument {x} must be finite and >= 0")));
    }
    let mut out = vec![0.0; order + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return Ok(out);
    }
    let (a0, a1) = (j0(x), j1(x));
    if (order as f64) < x {
        out[0] = a0;
        if order >= 1 {
            out[1] = a1;
        }
        for n in 1..order {
            out[n + 1] = (2 * n + 1) as f64 / x * out[n] - out[n - 1];
        }
        return Ok(out);
    }

    let start = order + 20.max((1.3 * x).ceil() as usize);
    let mut above = 0.0; // f_{k+1}
    let mut current = 1e-30; // f_k
    for k in (1..=start).rev() {
        // f_{k-1} = (2k+1)/x f_k - f_{k+1}
        let below = (2 * k + 1) as f64 / x * current - above;
        if k <= order {
            out[k] = current;
        }
        above = current;
        current = below;
        if current.abs() > RESCALE_ABOVE {
            above /= RESCALE_ABOVE;
            current /= RESCALE_ABOVE;
            for v in out.iter_mut() {
                *v /= RESCALE_ABOVE;
            }
        }
    }
    out[0] = current;
    let scale = if a0.abs() >= a1.abs() { a0 / current } else { a1 / above };
    for v in out.iter_mut() {
        *v *= scale;
    }
    Ok(out)
}

/// Spherical Bessel function `j_n(x)`.
pub fn spherical_bessel_j(n: usize, x: f64) -> Result<f64> {
    Ok(spherical_bessel_sequence(n, x)?[n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(got: f64, want: f64, rel: f64) -> bool {
        (got - want).abs() <= rel * want.abs() || (got - want).abs() < 1e-14 && want.abs() < 1e-3
    }

    #[test]
    fn values_at_zero() {
        assert_eq!(spherical_bessel_j(0, 0.0).unwrap(), 1.0);
        for n in 1..10 {
            assert_eq!(spherical_bessel_j(n, 0.0).unwrap(), 0.0);
        }
        assert!(spherical_bessel_j(0, -1.0).is_err());
        assert!(spherical_bessel_j(0, f64::NAN).is_err());
    }

    #[test]
    fn closed_forms() {
        assert!(spherical_bessel_j(0, PI).unwrap().abs() < 1e-16);
        let x = 1.0f64;
        let j1 = x.sin() / (x * x) - x.cos() / x;
        assert!((spherical_bessel_j(1, 1.0).unwrap() - j1).abs() < 1e-16);
        assert!((spherical_bessel_j(1, 1.0).unwrap() - 0.3011687).abs() < 1e-7);
        let x = 0.01f64;
        let series = x * x / 15.0 * (1.0 - x * x / 14.0 * (1.0 - x * x / 36.0));
        assert!(close(spherical_bessel_j(2, x).unwrap(), series, 1e-13));
        for x in [0.29f64, 0.31, 2.0, 7.5, 40.0] {
            let j2 = (3.0 / (x * x) - 1.0) * x.sin() / x - 3.0 * x.cos() / (x * x);
            assert!(close(spherical_bessel_j(2, x).unwrap(), j2, 1e-10), "x={x}");
        }
    }

    // Reference values: mpmath, sqrt(pi/2x) J_{n+1/2}(x) at 40 digits.
    #[test]
    fn matches_multiprecision_reference() {
        let cases = [
            (1, 1.0, 0.30116867893975678925),
            (2, 2.0, 0.19844794905714657832),
            (5, 0.5, 2.9774668754574455816e-6),
            (10, 3.0, 3.5260038931752563332e-6),
            (30, 10.0, 2.5120573849989429182e-13),
            (70, 0.1, 7.4500715839135975095e-193),
            (70, 200.0, 0.0045333066172137337185),
            (50, 50.0, 0.018829107369282617367),
            (3, 100.0, 0.0089139973696122128944),
            (0, 50.0, -0.0052474970740785757183),
            (12, 3.0, 5.6846247840475823653e-8),
            (20, 1e-3, 7.6259789162179717734e-86),
            (40, 37.3, 0.0080862537831735765812),
        ];
        for (n, x, want) in cases {
            let got = spherical_bessel_j(n, x).unwrap();
            assert!(close(got, want, 1e-12), "j_{n}({x}) = {got:e}, want {want:e}");
        }
    }

    #[test]
    fn recurrence_residual() {
        for x in [0.5, 3.0, 17.0, 120.0] {
            let j = spherical_bessel_sequence(60, x).unwrap();
            for n in 1..60 {
                let lhs = j[n - 1] + j[n + 1];
                let rhs = (2 * n + 1) as f64 / x * j[n];
                assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs.abs()), "x={x} n={n}");
            }
        }
    }

    #[test]
    fn sequence_consistent_across_lengths() {
        // upward (order < x) and Miller (order ≥ x) branches agree
        let short = spherical_bessel_sequence(9, 12.0).unwrap();
        let long = spherical_bessel_sequence(40, 12.0).unwrap();
        for n in 0..10 {
            assert!((short[n] - long[n]).abs() < 1e-14, "n={n}");
        }
    }
}
