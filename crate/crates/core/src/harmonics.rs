//! Complex orthonormal spherical harmonics and angular spectra.
//!
//! Convention (used everywhere in this crate):
//!
//! ```text
//! Y_nm(θ, φ) = (-1)^m · sqrt((2n+1)/(4π) · (n-m)!/(n+m)!) · P_n^m(cos θ) · e^{imφ},   m ≥ 0
//! Y_n,-m     = (-1)^m · conj(Y_nm)
//! ```
//!
//! where `P_n^m` is the associated Legendre function *without* the
//! Condon–Shortley phase, so the phase `(-1)^m` enters exactly once. This is the
//! usual physics convention (`Y_11 = -sqrt(3/8π) sin θ e^{iφ}`) and the one the
//! Gaunt coefficients and Wigner-D matrices of this crate are built against.
//! Mixing conventions silently corrupts the product spectra.
//!
//! Coefficients are stored in a flat vector at index `n² + n + m` (zero based).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sphere::Direction;

pub type C64 = Complex64;

/// Highest spherical-harmonic order supported by the evaluation routines.
pub const MAX_ORDER: usize = 64;

/// Zero-based storage index of mode `(n, m)`.
#[inline]
pub fn sh_index(n: usize, m: i64) -> usize {
    ((n * n + n) as i64 + m) as usize
}

/// Inverse of [`sh_index`].
#[inline]
pub fn sh_mode(index: usize) -> (usize, i64) {
    let n = (index as f64).sqrt() as usize;
    let n = if (n + 1) * (n + 1) <= index { n + 1 } else if n * n > index { n - 1 } else { n };
    (n, index as i64 - (n * n + n) as i64)
}

/// Number of coefficients of an order-`order` spectrum.
#[inline]
pub fn num_coeffs(order: usize) -> usize {
    (order + 1) * (order + 1)
}

#[inline]
fn sign(m: i64) -> f64 {
    if m.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Fully normalized associated Legendre values `sqrt((2n+1)/4π (n-m)!/(n+m)!) P_n^m(cos θ)`
/// for `0 ≤ m ≤ n ≤ order`, stored at `n(n+1)/2 + m`.
///
/// Uses the standard three-term recurrence on normalized functions, which
/// never forms factorial ratios.
fn normalized_legendre(order: usize, theta: f64) -> Vec<f64> {
    let (s, x) = theta.sin_cos();
    let idx = |n: usize, m: usize| n * (n + 1) / 2 + m;
    let mut p = vec![0.0; (order + 1) * (order + 2) / 2];
    p[0] = 0.5 / PI.sqrt();
    for m in 1..=order {
        let mf = m as f64;
        p[idx(m, m)] = ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s * p[idx(m - 1, m - 1)];
    }
    for m in 0..order {
        let mf = m as f64;
        p[idx(m + 1, m)] = (2.0 * mf + 3.0).sqrt() * x * p[idx(m, m)];
        for n in m + 2..=order {
            let nf = n as f64;
            let a = ((4.0 * nf * nf - 1.0) / (nf * nf - mf * mf)).sqrt();
            let b = (((nf - 1.0) * (nf - 1.0) - mf * mf) / (4.0 * (nf - 1.0) * (nf - 1.0) - 1.0)).sqrt();
            p[idx(n, m)] = a * (x * p[idx(n - 1, m)] - b * p[idx(n - 2, m)]);
        }
    }
    p
}

/// All harmonics `Y_nm(dir)` up to `order`, in storage order.
pub fn sh_vector(order: usize, dir: &Direction) -> Vec<C64> {
    let p = normalized_legendre(order, dir.theta());
    let mut y = vec![C64::new(0.0, 0.0); num_coeffs(order)];
    for n in 0..=order {
        for m in 0..=n {
            let base = sign(m as i64) * p[n * (n + 1) / 2 + m];
            let v = C64::from_polar(1.0, m as f64 * dir.phi()) * base;
            y[sh_index(n, m as i64)] = v;
            if m > 0 {
                y[sh_index(n, -(m as i64))] = v.conj() * sign(m as i64);
            }
        }
    }
    y
}

/// Evaluates a single harmonic `Y_nm` at `dir`.
pub fn eval_sh(n: i64, m: i64, dir: &Direction) -> Result<C64> {
    if n < 0 || m.abs() > n {
        return Err(Error::Domain(format!("invalid harmonic mode (n={n}, m={m})")));
    }
    if n as usize > MAX_ORDER {
        return Err(Error::Domain(format!("order {n} exceeds supported maximum {MAX_ORDER}")));
    }
    let order = n as usize;
    let p = normalized_legendre(order, dir.theta());
    let ma = m.unsigned_abs() as usize;
    let v = C64::from_polar(1.0, ma as f64 * dir.phi()) * (sign(ma as i64) * p[order * (order + 1) / 2 + ma]);
    Ok(if m < 0 { v.conj() * sign(m) } else { v })
}

/// Angular spectrum of a directional response band-limited to `order`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalSpectrum {
    order: usize,
    coeffs: Vec<C64>,
}

impl SphericalSpectrum {
    pub fn new(order: usize, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != num_coeffs(order) {
            return Err(Error::Dimension {
                expected: num_coeffs(order),
                found: coeffs.len(),
            });
        }
        Ok(SphericalSpectrum { order, coeffs })
    }

    /// Builds a spectrum from a coefficient vector whose length must be a
    /// perfect square.
    pub fn from_coeffs(coeffs: Vec<C64>) -> Result<Self> {
        let (n, _) = sh_mode(coeffs.len().max(1) - 1);
        Self::new(n, coeffs)
    }

    pub fn zeros(order: usize) -> Self {
        SphericalSpectrum {
            order,
            coeffs: vec![C64::new(0.0, 0.0); num_coeffs(order)],
        }
    }

    /// The constant function `f(Ω) = 1`.
    pub fn omni() -> Self {
        SphericalSpectrum {
            order: 0,
            coeffs: vec![C64::new((4.0 * PI).sqrt(), 0.0)],
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    /// Coefficient of mode `(n, m)`; zero above the band limit.
    pub fn get(&self, n: usize, m: i64) -> C64 {
        if n > self.order || m.unsigned_abs() as usize > n {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[sh_index(n, m)]
        }
    }

    pub fn set(&mut self, n: usize, m: i64, value: C64) {
        self.coeffs[sh_index(n, m)] = value;
    }

    /// `‖f‖²`, equal to `∫|f|² dΩ`.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Energy `Σ_m |f_nm|²` of order `n`.
    pub fn order_energy(&self, n: usize) -> f64 {
        if n > self.order {
            return 0.0;
        }
        self.coeffs[n * n..(n + 1) * (n + 1)].iter().map(|c| c.norm_sqr()).sum()
    }

    /// `gᴴ f`, equal to `∫ f g* dΩ`. Spectra of different orders are allowed.
    pub fn inner(&self, g: &SphericalSpectrum) -> C64 {
        self.coeffs
            .iter()
            .zip(&g.coeffs)
            .map(|(f, g)| g.conj() * f)
            .sum()
    }

    /// Zero-pads or truncates to `order`.
    pub fn resized(&self, order: usize) -> SphericalSpectrum {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(num_coeffs(order), C64::new(0.0, 0.0));
        SphericalSpectrum { order, coeffs }
    }

    pub fn scaled(&self, factor: C64) -> SphericalSpectrum {
        SphericalSpectrum {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Inverse transform at a single direction.
    pub fn eval(&self, dir: &Direction) -> C64 {
        isht(self, dir)
    }

    /// Spectrum of the conjugate function, see [`conjugate_spectrum`].
    pub fn conjugate(&self) -> SphericalSpectrum {
        conjugate_spectrum(self)
    }
}

/// Inverse spherical harmonic transform `f(Ω) = fᵀ y(Ω)`.
pub fn isht(spec: &SphericalSpectrum, dir: &Direction) -> C64 {
    sh_vector(spec.order, dir)
        .iter()
        .zip(&spec.coeffs)
        .map(|(y, f)| y * f)
        .sum()
}

/// Spectrum of `f*(Ω)` given the spectrum of `f`: `f̄_nm = (-1)^m conj(f_n,-m)`.
pub fn conjugate_spectrum(spec: &SphericalSpectrum) -> SphericalSpectrum {
    let mut out = SphericalSpectrum::zeros(spec.order);
    for n in 0..=spec.order {
        let ni = n as i64;
        for m in -ni..=ni {
            out.coeffs[sh_index(n, m)] = spec.coeffs[sh_index(n, -m)].conj() * sign(m);
        }
    }
    out
}

/// Reduced spectrum of a pattern rotationally symmetric about +z: entry `n`
/// holds the `m = 0` coefficient of order `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisymmetricSpectrum {
    coeffs: Vec<C64>,
}

impl AxisymmetricSpectrum {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Dimension { expected: 1, found: 0 });
        }
        Ok(AxisymmetricSpectrum { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Full spectrum of the pattern with its axis along `target`.
    pub fn steer(&self, target: &Direction) -> SphericalSpectrum {
        steer_axisymmetric(self, target)
    }

    /// Full spectrum of the unrotated (z-aligned) pattern.
    pub fn to_spectrum(&self) -> SphericalSpectrum {
        let mut s = SphericalSpectrum::zeros(self.order());
        for (n, c) in self.coeffs.iter().enumerate() {
            s.set(n, 0, *c);
        }
        s
    }

    /// Pattern value at inclination `theta` from the symmetry axis.
    pub fn eval_axis(&self, theta: f64) -> C64 {
        let p = normalized_legendre(self.order(), theta);
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * p[n * (n + 1) / 2])
            .sum()
    }
}

/// Rotates a z-aligned axisymmetric pattern to `target` by the addition
/// theorem: `f_nm = sqrt(4π/(2n+1)) f̃_n Y*_nm(target)`.
pub fn steer_axisymmetric(axi: &AxisymmetricSpectrum, target: &Direction) -> SphericalSpectrum {
    let order = axi.order();
    let y = sh_vector(order, target);
    let mut out = SphericalSpectrum::zeros(order);
    for n in 0..=order {
        let scale = axi.coeffs[n] * (4.0 * PI / (2 * n + 1) as f64).sqrt();
        let ni = n as i64;
        for m in -ni..=ni {
            let q = sh_index(n, m);
            out.coeffs[q] = scale * y[q].conj();
        }
    }
    out
}
