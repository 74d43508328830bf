//! Angular spectrum of the plane-wave term `e^{i·kd·cos α}`.

use std::f64::consts::PI;

use crate::bessel::spherical_bessel_sequence;
use crate::error::Result;
use crate::harmonics::{sh_index, sh_vector, SphericalSpectrum, C64};
use crate::sphere::Direction;

/// Coefficients `b_nm = 4π iⁿ j_n(kd) Y*_nm(Ω_r)` truncated at `order`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneWaveSpectrum {
    kd: f64,
    direction: Direction,
    spectrum: SphericalSpectrum,
}

impl PlaneWaveSpectrum {
    pub fn order(&self) -> usize {
        self.spectrum.order()
    }

    pub fn kd(&self) -> f64 {
        self.kd
    }

    pub fn direction(&self) -> &Direction {
        &self.direction
    }

    pub fn spectrum(&self) -> &SphericalSpectrum {
        &self.spectrum
    }

    pub fn into_spectrum(self) -> SphericalSpectrum {
        self.spectrum
    }
}

/// Spectrum of `Ω ↦ e^{i·kd·n(Ω)ᵀn(dir)}` up to `order`.
pub fn plane_wave_spectrum(kd: f64, dir: &Direction, order: usize) -> Result<PlaneWaveSpectrum> {
    let j = spherical_bessel_sequence(order, kd)?;
    let y = sh_vector(order, dir);
    let mut spectrum = SphericalSpectrum::zeros(order);
    let mut i_pow = C64::new(1.0, 0.0);
    for (n, jn) in j.iter().enumerate() {
        let radial = i_pow * (4.0 * PI * jn);
        let ni = n as i64;
        for m in -ni..=ni {
            let q = sh_index(n, m);
            spectrum.coeffs_mut()[q] = radial * y[q].conj();
        }
        i_pow *= C64::new(0.0, 1.0);
    }
    Ok(PlaneWaveSpectrum {
        kd,
        direction: *dir,
        spectrum,
    })
}
