//! Exact Wigner-3j symbols from the Racah sum in rational arithmetic.
//!
//! The sum is accumulated exactly with big integers, so there is no
//! cancellation; the only rounding happens when the final square root is
//! taken in `f64`.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest angular momentum accepted by [`wigner3j`].
pub const MAX_J: i64 = 64;

fn factorial(n: i64) -> &'static BigUint {
    static TABLE: OnceLock<Vec<BigUint>> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity((3 * MAX_J + 2) as usize);
        t.push(BigUint::one());
        for k in 1..(3 * MAX_J + 2) as u64 {
            let next = t.last().unwrap() * BigUint::from(k);
            t.push(next);
        }
        t
    });
    &t[n as usize]
}

/// A real number stored as `sign · sqrt(square)` with an exact rational square.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedSqrt {
    pub negative: bool,
    pub square: BigRational,
}

impl SignedSqrt {
    pub fn zero() -> Self {
        SignedSqrt {
            negative: false,
            square: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.square.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        let v = rational_to_f64(&self.square).sqrt();
        if self.negative {
            -v
        } else {
            v
        }
    }

    pub fn mul(&self, other: &SignedSqrt) -> SignedSqrt {
        SignedSqrt {
            negative: self.negative != other.negative,
            square: &self.square * &other.square,
        }
    }
}

/// Converts a nonnegative rational to the nearest-ish `f64` (within one ulp)
/// without overflowing on huge numerators or denominators.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let negative = r.is_negative();
    let n = r.numer().abs().to_biguint().unwrap();
    let d = r.denom().abs().to_biguint().unwrap();
    let shift = 64 + d.bits() as i64 - n.bits() as i64;
    let q = if shift >= 0 { (n << shift as usize) / d } else { n / (d << (-shift) as usize) };
    let mut v = q.to_f64().unwrap();
    // scale by 2^-shift in two steps to stay inside the exponent range
    let half = shift / 2;
    v *= 2f64.powi(-half as i32);
    v *= 2f64.powi(-(shift - half) as i32);
    if negative {
        -v
    } else {
        v
    }
}

fn check_range(j: i64, m: i64) -> Result<()> {
    if j < 0 || m.abs() > j {
        return Err(Error::Domain(format!("invalid angular momentum pair (j={j}, m={m})")));
    }
    if j > MAX_J {
        return Err(Error::Domain(format!("j={j} exceeds supported maximum {MAX_J}")));
    }
    Ok(())
}

/// Exact Wigner-3j symbol `(j1 j2 j3; m1 m2 m3)` as a signed square root.
pub fn wigner3j_exact(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> Result<SignedSqrt> {
    check_range(j1, m1)?;
    check_range(j2, m2)?;
    check_range(j3, m3)?;
    if m1 + m2 + m3 != 0 || j3 < (j1 - j2).abs() || j3 > j1 + j2 {
        return Ok(SignedSqrt::zero());
    }
    if m1 == 0 && m2 == 0 && m3 == 0 && (j1 + j2 + j3) % 2 == 1 {
        return Ok(SignedSqrt::zero());
    }
    let f = |k: i64| BigInt::from(factorial(k).clone());

    let triangle_num = f(j1 + j2 - j3) * f(j1 - j2 + j3) * f(-j1 + j2 + j3);
    let triangle_den = f(j1 + j2 + j3 + 1);
    let projections = f(j1 + m1) * f(j1 - m1) * f(j2 + m2) * f(j2 - m2) * f(j3 + m3) * f(j3 - m3);
    let prefactor = BigRational::new(triangle_num * projections, triangle_den);

    let k_min = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let k_max = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let den = f(k) * f(j3 - j2 + k + m1) * f(j3 - j1 + k - m2) * f(j1 + j2 - j3 - k) * f(j1 - k - m1) * f(j2 - k + m2);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return Ok(SignedSqrt::zero());
    }
    let phase_negative = (j1 - j2 - m3).rem_euclid(2) == 1;
    Ok(SignedSqrt {
        negative: sum.is_negative() != phase_negative,
        square: &sum * &sum * prefactor,
    })
}

/// Wigner-3j symbol `(j1 j2 j3; m1 m2 m3)` for integer arguments.
///
/// Returns zero when the triangle condition or `m1 + m2 + m3 = 0` fails.
pub fn wigner3j(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> Result<f64> {
    Ok(wigner3j_exact(j1, j2, j3, m1, m2, m3)?.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_values() {
        assert_eq!(wigner3j(0, 0, 0, 0, 0, 0).unwrap(), 1.0);
        assert_eq!(wigner3j(1, 1, 3, 0, 0, 0).unwrap(), 0.0);
        assert_eq!(wigner3j(1, 1, 1, 1, 0, 0).unwrap(), 0.0);
        assert!((wigner3j(1, 1, 0, 0, 0, 0).unwrap() + 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    // Reference values: sympy.physics.wigner.wigner_3j evaluated to 20 digits.
    #[test]
    fn matches_symbolic_reference() {
        let cases = [
            ((2, 2, 2, 1, -1, 0), 0.11952286093343936400),
            ((10, 8, 6, 3, -2, -1), -0.071184471813627810488),
            ((5, 5, 10, 5, -5, 0), 0.00050768119506309387895),
            ((32, 30, 20, -7, 4, 3), 0.015851640215268896881),
            ((3, 4, 5, 1, 2, -3), -0.13740858372430334135),
        ];
        for ((a, b, c, d, e, g), want) in cases {
            let got = wigner3j(a, b, c, d, e, g).unwrap();
            assert!(((got - want) / want).abs() < 1e-13, "{got} vs {want}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(wigner3j(-1, 0, 1, 0, 0, 0).is_err());
        assert!(wigner3j(1, 1, 1, 2, 0, 0).is_err());
        assert!(wigner3j(65, 65, 0, 0, 0, 0).is_err());
    }

    #[test]
    fn orthogonality_in_j3() {
        // Σ_{j3,m3} (2j3+1) (j1 j2 j3; m1 m2 m3)(j1 j2 j3; m1' m2' m3) = δ δ
        let (j1, j2) = (3, 2);
        for m1 in -j1..=j1 {
            for m2 in -j2..=j2 {
                let mut s = 0.0;
                for j3 in (j1 - j2)..=(j1 + j2) {
                    if (m1 + m2).abs() > j3 {
                        continue;
                    }
                    let w = wigner3j(j1, j2, j3, m1, m2, -m1 - m2).unwrap();
                    s += (2 * j3 + 1) as f64 * w * w;
                }
                assert!((s - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn permutation_symmetry() {
        let mut count = 0;
        for j1 in 0..=6i64 {
            for j2 in 0..=6i64 {
                for j3 in (j1 - j2).abs()..=(j1 + j2).min(10) {
                    for m1 in -j1..=j1 {
                        for m2 in -j2..=j2 {
                            let m3 = -m1 - m2;
                            if m3.abs() > j3 {
                                continue;
                            }
                            let w = wigner3j(j1, j2, j3, m1, m2, m3).unwrap();
                            let odd = if (j1 + j2 + j3) % 2 == 0 { 1.0 } else { -1.0 };
                            // even (cyclic) permutations
                            assert_eq!(w, wigner3j(j2, j3, j1, m2, m3, m1).unwrap());
                            assert_eq!(w, wigner3j(j3, j1, j2, m3, m1, m2).unwrap());
                            // odd permutations and sign reversal of all m
                            assert_eq!(w * odd, wigner3j(j2, j1, j3, m2, m1, m3).unwrap());
                            assert_eq!(w * odd, wigner3j(j1, j3, j2, m1, m3, m2).unwrap());
                            assert_eq!(w * odd, wigner3j(j1, j2, j3, -m1, -m2, -m3).unwrap());
                            count += 1;
                        }
                    }
                }
            }
        }
        assert!(count > 1000);
    }

    #[test]
    fn rational_conversion_handles_large_operands() {
        let big = BigInt::from(10u32).pow(400);
        let r = BigRational::new(big.clone() * 3, big * 7);
        assert!((rational_to_f64(&r) - 3.0 / 7.0).abs() < 1e-16);
    }
}
