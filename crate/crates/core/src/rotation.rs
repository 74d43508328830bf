//! Rotation of angular spectra by z-y-z Euler angles via Wigner-D matrices.
//!
//! A rotation `R = Rz(α) Ry(β) Rz(γ)` acts actively on functions,
//! `(Rf)(Ω) = f(R⁻¹Ω)`, so an axisymmetric pattern pointing at +z ends up
//! pointing at `(θ, φ) = (β, α)`.

use std::sync::OnceLock;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::harmonics::{sh_index, SphericalSpectrum, C64, MAX_ORDER};
use crate::sphere::Direction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
            return Err(Error::Domain("non-finite Euler angle".into()));
        }
        if !(0.0..=std::f64::consts::PI).contains(&beta) {
            return Err(Error::Domain(format!("Euler angle beta={beta} outside [0, pi]")));
        }
        Ok(EulerAngles { alpha, beta, gamma })
    }

    pub fn identity() -> Self {
        EulerAngles { alpha: 0.0, beta: 0.0, gamma: 0.0 }
    }

    /// Rotation taking +z to `dir`, with no spin about the final axis.
    pub fn pointing(dir: &Direction) -> Self {
        EulerAngles {
            alpha: dir.phi(),
            beta: dir.theta(),
            gamma: 0.0,
        }
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        rot_z(self.alpha) * rot_y(self.beta) * rot_z(self.gamma)
    }

    /// Recovers z-y-z angles from a proper rotation matrix.
    pub fn from_matrix(r: &Matrix3<f64>) -> Self {
        let beta = r[(2, 2)].clamp(-1.0, 1.0).acos();
        let sb = (r[(0, 2)].powi(2) + r[(1, 2)].powi(2)).sqrt();
        if sb > 1e-12 {
            EulerAngles {
                alpha: r[(1, 2)].atan2(r[(0, 2)]),
                beta,
                gamma: r[(2, 1)].atan2(-r[(2, 0)]),
            }
        } else if r[(2, 2)] > 0.0 {
            EulerAngles { alpha: r[(1, 0)].atan2(r[(0, 0)]), beta: 0.0, gamma: 0.0 }
        } else {
            EulerAngles {
                alpha: (-r[(1, 0)]).atan2(-r[(0, 0)]),
                beta: std::f64::consts::PI,
                gamma: 0.0,
            }
        }
    }

    /// Angles of the rotation "`self`, then `then`".
    pub fn then(&self, then: &EulerAngles) -> EulerAngles {
        EulerAngles::from_matrix(&(then.matrix() * self.matrix()))
    }

    pub fn rotate_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.matrix() * v
    }
}

fn rot_z(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

fn rot_y(b: f64) -> Matrix3<f64> {
    let (s, c) = b.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// Double-double number `hi + lo` used to evaluate the alternating d-sum.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let s = self.hi + o.hi;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (o.hi - bb);
        let lo = err + self.lo + o.lo;
        let hi = s + lo;
        Dd { hi, lo: lo - (hi - s) }
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let err = self.hi.mul_add(o.hi, -p);
        let lo = err + self.hi * o.lo + self.lo * o.hi;
        let hi = p + lo;
        Dd { hi, lo: lo - (hi - p) }
    }

    fn powi(self, mut e: u32) -> Dd {
        let mut base = self;
        let mut acc = Dd::new(1.0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            e >>= 1;
        }
        acc
    }
}

/// Binomial coefficients up to `C(2·MAX_ORDER, ·)`, exact in double-double.
fn binomials() -> &'static [Vec<Dd>] {
    static TABLE: OnceLock<Vec<Vec<Dd>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let size = 2 * MAX_ORDER + 1;
        let mut t: Vec<Vec<Dd>> = Vec::with_capacity(size);
        for n in 0..size {
            let mut row = vec![Dd::new(1.0); n + 1];
            for k in 1..n {
                row[k] = t[n - 1][k - 1].add(t[n - 1][k]);
            }
            t.push(row);
        }
        t
    })
}

/// Wigner small-d element `d^j_{m'm}(β)` by the explicit sum formula
///
/// ```text
/// d = sqrt(C(2j, j+m) / C(2j, j+m')) Σ_s (-1)^{m'-m+s} C(j+m, s) C(j-m, j-m'-s)
///         cos(β/2)^{2j+m-m'-2s} sin(β/2)^{m'-m+2s}
/// ```
///
/// (the factorial form regrouped into binomials). The terms grow far beyond
/// the result at high order, so the sum is accumulated in double-double.
pub fn wigner_small_d(j: usize, mp: i64, m: i64, beta: f64) -> f64 {
    let ji = j as i64;
    if j > MAX_ORDER || mp.abs() > ji || m.abs() > ji {
        return 0.0;
    }
    let b = binomials();
    let (s, c) = (beta / 2.0).sin_cos();
    let (s, c) = (Dd::new(s), Dd::new(c));
    let pre = (b[2 * j][(ji + m) as usize].hi / b[2 * j][(ji + mp) as usize].hi).sqrt();
    let lo = 0.max(m - mp);
    let hi = (ji + m).min(ji - mp);
    let mut sum = Dd::new(0.0);
    for k in lo..=hi {
        let term = b[(ji + m) as usize][k as usize]
            .mul(b[(ji - m) as usize][(ji - mp - k) as usize])
            .mul(c.powi((2 * ji + m - mp - 2 * k) as u32))
            .mul(s.powi((mp - m + 2 * k) as u32));
        sum = if (mp - m + k) % 2 == 0 { sum.add(term) } else { sum.add(term.neg()) };
    }
    pre * (sum.hi + sum.lo)
}

/// Order-`j` Wigner-D block, `D[m'+j][m+j] = e^{-im'α} d^j_{m'm}(β) e^{-imγ}`.
pub fn wigner_d_block(j: usize, angles: &EulerAngles) -> Vec<Vec<C64>> {
    let ji = j as i64;
    (-ji..=ji)
        .map(|mp| {
            (-ji..=ji)
                .map(|m| {
                    let phase = -(mp as f64) * angles.alpha - (m as f64) * angles.gamma;
                    C64::from_polar(wigner_small_d(j, mp, m, angles.beta), phase)
                })
                .collect()
        })
        .collect()
}

/// Applies the block-diagonal Wigner-D rotation to a spectrum.
pub fn rotate_spectrum(spec: &SphericalSpectrum, angles: &EulerAngles) -> SphericalSpectrum {
    let mut out = SphericalSpectrum::zeros(spec.order());
    for n in 0..=spec.order() {
        let d = wigner_d_block(n, angles);
        let ni = n as i64;
        for mp in -ni..=ni {
            let row = &d[(mp + ni) as usize];
            let v: C64 = (-ni..=ni)
                .map(|m| row[(m + ni) as usize] * spec.get(n, m))
                .sum();
            out.coeffs_mut()[sh_index(n, mp)] = v;
        }
    }
    out
}

impl SphericalSpectrum {
    pub fn rotated(&self, angles: &EulerAngles) -> SphericalSpectrum {
        rotate_spectrum(self, angles)
    }
}
