//! Diffuse-field coherence from angular spectra.
//!
//! The diffuse-field power `σ²` is normalized to 1 throughout, so CSD and
//! PSD values returned here are the angular integrals themselves. The
//! displacement convention is `r₁₂ = r₂ − r₁` and the cross spectrum is
//! `Φ_fg = ∫ f g* e^{−ik n(Ω)ᵀ r₁₂} dΩ`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Vector3};

use crate::coupling::{product_spectrum, product_with_table, GauntTable};
use crate::error::{Error, Result};
use crate::harmonics::{conjugate_spectrum, num_coeffs, SphericalSpectrum, C64};
use crate::par::{map_slice, Execution};
use crate::sphere::{Direction, SphereGrid};
use crate::transform::{sht_columns, ShtMode};
use crate::wavefield::plane_wave_spectrum;

/// Products `k·d` below this are evaluated with the coincident formula.
pub const COINCIDENT_KD: f64 = 1e-12;

/// A directional response placed in the array frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorPlacement {
    pub spectrum: SphericalSpectrum,
    /// Position in meters.
    pub position: Vector3<f64>,
}

impl SensorPlacement {
    pub fn new(spectrum: SphericalSpectrum, position: Vector3<f64>) -> Self {
        SensorPlacement { spectrum, position }
    }

    pub fn at_origin(spectrum: SphericalSpectrum) -> Self {
        Self::new(spectrum, Vector3::zeros())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceResult {
    pub gamma: C64,
    pub kd: f64,
    /// Sensor distance in meters.
    pub distance: f64,
    pub frequency_hz: Option<f64>,
    pub sound_speed: Option<f64>,
}

fn energy(spec: &SphericalSpectrum, index: usize) -> Result<f64> {
    let e = spec.norm_sqr();
    if !(e > 0.0) || !e.is_finite() {
        return Err(Error::DegenerateSensor { index });
    }
    Ok(e)
}

/// `sqrt(‖f‖²‖g‖²)`, the PSD normalization of the coherence.
pub fn psd_pair_norm(f: &SphericalSpectrum, g: &SphericalSpectrum) -> Result<f64> {
    Ok((energy(f, 0)? * energy(g, 1)?).sqrt())
}

fn check_wavenumber(k: f64) -> Result<()> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::Domain(format!("wavenumber {k} must be finite and >= 0")));
    }
    Ok(())
}

/// Cross spectral density `bᴴ c` of two placed sensors at wavenumber `k`.
pub fn csd_pair(f: &SensorPlacement, g: &SensorPlacement, k: f64) -> Result<C64> {
    let order = f.spectrum.order() + g.spectrum.order();
    csd_pair_with_order(f, g, k, order)
}

/// [`csd_pair`] with the product and plane-wave spectra truncated or
/// zero-padded to `order`. Any `order ≥ N_f + N_g` gives the exact value.
pub fn csd_pair_with_order(f: &SensorPlacement, g: &SensorPlacement, k: f64, order: usize) -> Result<C64> {
    check_wavenumber(k)?;
    energy(&f.spectrum, 0)?;
    energy(&g.spectrum, 1)?;
    let r12 = g.position - f.position;
    let kd = k * r12.norm();
    if kd < COINCIDENT_KD {
        return Ok(f.spectrum.inner(&g.spectrum));
    }
    let c = product_spectrum(&f.spectrum, &conjugate_spectrum(&g.spectrum))?.resized(order);
    let b = plane_wave_spectrum(kd, &Direction::from_vector(&r12)?, order)?;
    Ok(c.inner(b.spectrum()))
}

/// Diffuse-field coherence `γ = bᴴc / sqrt(‖f‖²‖g‖²)` of two placed sensors.
pub fn coherence_pair(f: &SensorPlacement, g: &SensorPlacement, k: f64) -> Result<CoherenceResult> {
    let norm = psd_pair_norm(&f.spectrum, &g.spectrum)?;
    let csd = csd_pair(f, g, k)?;
    let distance = (g.position - f.position).norm();
    Ok(CoherenceResult {
        gamma: csd / norm,
        kd: k * distance,
        distance,
        frequency_hz: None,
        sound_speed: None,
    })
}

/// Coherence of coincident sensors (or origin-aligned beam patterns),
/// `γ = gᴴf / sqrt(‖f‖²‖g‖²)`.
pub fn coherence_coincident(f: &SphericalSpectrum, g: &SphericalSpectrum) -> Result<C64> {
    let norm = psd_pair_norm(f, g)?;
    Ok(f.inner(g) / norm)
}

/// Precomputed pair for repeated evaluation over wavenumbers: the product
/// spectrum `c` does not depend on frequency.
#[derive(Debug, Clone)]
pub struct PairEvaluator {
    product: SphericalSpectrum,
    coincident: C64,
    norm: f64,
    displacement: Vector3<f64>,
}

impl PairEvaluator {
    pub fn new(f: &SensorPlacement, g: &SensorPlacement) -> Result<Self> {
        let norm = psd_pair_norm(&f.spectrum, &g.spectrum)?;
        let gc = conjugate_spectrum(&g.spectrum);
        let table = GauntTable::shared(f.spectrum.order(), gc.order())?;
        Ok(PairEvaluator {
            product: product_with_table(&table, &f.spectrum, &gc),
            coincident: f.spectrum.inner(&g.spectrum),
            norm,
            displacement: g.position - f.position,
        })
    }

    pub fn distance(&self) -> f64 {
        self.displacement.norm()
    }

    pub fn coherence(&self, k: f64) -> Result<CoherenceResult> {
        check_wavenumber(k)?;
        let distance = self.distance();
        let kd = k * distance;
        let csd = if kd < COINCIDENT_KD {
            self.coincident
        } else {
            let dir = Direction::from_vector(&self.displacement)?;
            let b = plane_wave_spectrum(kd, &dir, self.product.order())?;
            self.product.inner(b.spectrum())
        };
        Ok(CoherenceResult {
            gamma: csd / self.norm,
            kd,
            distance,
            frequency_hz: None,
            sound_speed: None,
        })
    }
}

/// Coherence over a list of frequencies (Hz) at sound speed `c` (m/s),
/// returned in input order.
pub fn coherence_sweep(
    f: &SensorPlacement,
    g: &SensorPlacement,
    frequencies: &[f64],
    sound_speed: f64,
    exec: Execution,
) -> Result<Vec<CoherenceResult>> {
    if !(sound_speed > 0.0) || !sound_speed.is_finite() {
        return Err(Error::Domain(format!("sound speed {sound_speed} must be positive")));
    }
    let pair = PairEvaluator::new(f, g)?;
    map_slice(exec, frequencies, |&hz| {
        let mut r = pair.coherence(2.0 * PI * hz / sound_speed)?;
        r.frequency_hz = Some(hz);
        r.sound_speed = Some(sound_speed);
        Ok(r)
    })
    .into_iter()
    .collect()
}

/// Per-sensor angular spectra of a measured array: column `q` is the
/// spectrum of sensor `q`'s response.
#[derive(Debug, Clone)]
pub struct ArraySpectra {
    order: usize,
    spectra: DMatrix<C64>,
    pub condition_number: Option<f64>,
    pub warnings: Vec<String>,
}

impl ArraySpectra {
    pub fn new(order: usize, spectra: DMatrix<C64>) -> Result<Self> {
        if spectra.nrows() != num_coeffs(order) {
            return Err(Error::Dimension {
                expected: num_coeffs(order),
                found: spectra.nrows(),
            });
        }
        if spectra.ncols() == 0 {
            return Err(Error::Domain("array has no sensors".into()));
        }
        if let Some(q) = (0..spectra.ncols()).find(|&q| !spectra.column(q).iter().all(|c| c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Domain(format!("sensor {q} spectrum is not finite")));
        }
        Ok(ArraySpectra {
            order,
            spectra,
            condition_number: None,
            warnings: Vec::new(),
        })
    }

    pub fn from_spectra(spectra: &[SphericalSpectrum]) -> Result<Self> {
        let order = spectra.iter().map(|s| s.order()).max().ok_or_else(|| Error::Domain("array has no sensors".into()))?;
        let mut m = DMatrix::zeros(num_coeffs(order), spectra.len());
        for (q, s) in spectra.iter().enumerate() {
            for (i, c) in s.coeffs().iter().enumerate() {
                m[(i, q)] = *c;
            }
        }
        Self::new(order, m)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn num_sensors(&self) -> usize {
        self.spectra.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.spectra
    }

    pub fn sensor(&self, q: usize) -> SphericalSpectrum {
        SphericalSpectrum::new(self.order, self.spectra.column(q).iter().copied().collect()).expect("column length")
    }
}

/// Projects a `|grid| × Q` matrix of measured responses onto order-`order`
/// spectra, by quadrature when the grid has weights, least squares otherwise.
pub fn array_spectra_from_measurements(responses: &DMatrix<C64>, grid: &SphereGrid, order: usize) -> Result<ArraySpectra> {
    if responses.ncols() == 0 {
        return Err(Error::Domain("array has no sensors".into()));
    }
    let required = num_coeffs(order);
    if grid.len() < required {
        return Err(Error::Underdetermined {
            order,
            required,
            available: grid.len(),
        });
    }
    let out = sht_columns(responses, grid, order, ShtMode::for_grid(grid))?;
    let mut spectra = ArraySpectra::new(order, out.coeffs)?;
    spectra.condition_number = out.condition_number;
    spectra.warnings = out.warnings;
    Ok(spectra)
}

/// Order and sampling guidance for an array enclosed in radius `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderGuidance {
    /// `N = 2⌊k_max R⌋`.
    pub order: usize,
    /// Least number of measurement directions, `(N+1)²`.
    pub min_points: usize,
    /// Typical count for an equiangular measurement grid, `4(N+1)²`.
    pub equiangular_points: usize,
}

pub fn suggested_order(k_max: f64, radius: f64) -> Result<OrderGuidance> {
    if !(k_max >= 0.0) || !(radius >= 0.0) || !k_max.is_finite() || !radius.is_finite() {
        return Err(Error::Domain(format!(
            "wavenumber {k_max} and radius {radius} must be finite and >= 0"
        )));
    }
    let order = 2 * (k_max * radius).floor() as usize;
    Ok(OrderGuidance {
        order,
        min_points: num_coeffs(order),
        equiangular_points: 4 * num_coeffs(order),
    })
}

/// Normalized diffuse-field CSD matrix `Γ = D̄ᴴD̄` of the array.
pub fn diffuse_csd_matrix(spectra: &ArraySpectra) -> DMatrix<C64> {
    let q = spectra.num_sensors();
    let mut conj = DMatrix::zeros(spectra.spectra.nrows(), q);
    for s in 0..q {
        let c = conjugate_spectrum(&spectra.sensor(s));
        conj.set_column(s, &nalgebra::DVector::from_column_slice(c.coeffs()));
    }
    conj.adjoint() * conj
}

/// Pairwise coherence matrix `γ_ij = Γ_ij / sqrt(Γ_ii Γ_jj)`; Hermitian with
/// unit diagonal.
pub fn array_coherence_matrix(spectra: &ArraySpectra) -> Result<DMatrix<C64>> {
    let gamma = diffuse_csd_matrix(spectra);
    let q = gamma.nrows();
    let diag: Vec<f64> = (0..q).map(|i| gamma[(i, i)].re).collect();
    if let Some(i) = diag.iter().position(|d| !(*d > 0.0)) {
        return Err(Error::DegenerateSensor { index: i });
    }
    let mut out = DMatrix::zeros(q, q);
    for i in 0..q {
        out[(i, i)] = C64::new(1.0, 0.0);
        for j in i + 1..q {
            let v = gamma[(i, j)] / (diag[i] * diag[j]).sqrt();
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
    }
    Ok(out)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &DMatrix<C64>) -> f64 {
    m.clone().symmetric_eigenvalues().min()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bessel::spherical_bessel_j;
    use crate::harmonics::{isht, AxisymmetricSpectrum};
    use crate::rotation::EulerAngles;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn omni() -> SphericalSpectrum {
        SphericalSpectrum::omni()
    }

    fn cardioid() -> AxisymmetricSpectrum {
        let c = (4.0 * PI).sqrt();
        AxisymmetricSpectrum::from_real(&[0.5 * c, 0.5 * c / 3f64.sqrt()]).unwrap()
    }

    fn dipole() -> AxisymmetricSpectrum {
        AxisymmetricSpectrum::from_real(&[0.0, (4.0 * PI / 3.0).sqrt()]).unwrap()
    }

    fn random_spectrum(rng: &mut ChaCha8Rng, order: usize) -> SphericalSpectrum {
        let c = (0..num_coeffs(order))
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        SphericalSpectrum::new(order, c).unwrap()
    }

    fn at(spec: SphericalSpectrum, x: f64, y: f64, z: f64) -> SensorPlacement {
        SensorPlacement::new(spec, Vector3::new(x, y, z))
    }

    #[test]
    fn psd_norms() {
        assert!((psd_pair_norm(&omni(), &omni()).unwrap() - 4.0 * PI).abs() < 1e-13);
        let card = cardioid().to_spectrum();
        assert!((psd_pair_norm(&omni(), &card).unwrap() - 4.0 * PI / 3f64.sqrt()).abs() < 1e-13);
        let scaled = card.scaled(C64::new(5.0, 0.0));
        assert!((psd_pair_norm(&omni(), &scaled).unwrap() - 5.0 * 4.0 * PI / 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(
            psd_pair_norm(&omni(), &SphericalSpectrum::zeros(2)),
            Err(Error::DegenerateSensor { index: 1 })
        );
    }

    #[test]
    fn csd_of_coincident_sensors_is_inner_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = random_spectrum(&mut rng, 3);
        let g = random_spectrum(&mut rng, 2);
        let csd = csd_pair(&at(f.clone(), 0.1, 0.2, 0.3), &at(g.clone(), 0.1, 0.2, 0.3), 50.0).unwrap();
        assert!((csd - f.inner(&g)).norm() < 1e-14);
    }

    #[test]
    fn omni_pair_is_sinc() {
        for kd in [0.1, 1.0, 2.0, 7.0] {
            let csd = csd_pair(&at(omni(), 0.0, 0.0, 0.0), &at(omni(), 0.3, -0.2, 0.5), kd / 0.616441400296898).unwrap();
            assert!((csd - 4.0 * PI * spherical_bessel_j(0, kd).unwrap()).norm() < 1e-12);
        }
        let r = coherence_pair(&at(omni(), 0.0, 0.0, 0.0), &at(omni(), 0.0, 0.0, 1.0), PI).unwrap();
        assert!(r.gamma.norm() < 1e-15);
        assert!((r.kd - PI).abs() < 1e-15);
    }

    #[test]
    fn swapping_sensors_conjugates() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = at(random_spectrum(&mut rng, 2), 0.0, 0.1, 0.0);
        let g = at(random_spectrum(&mut rng, 3), 0.05, -0.02, 0.07);
        let a = csd_pair(&f, &g, 30.0).unwrap();
        let b = csd_pair(&g, &f, 30.0).unwrap();
        assert!((a - b.conj()).norm() < 1e-13);
    }

    #[test]
    fn identical_coincident_sensor_is_fully_coherent() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_spectrum(&mut rng, 4);
        let r = coherence_pair(&at(f.clone(), 1.0, 1.0, 1.0), &at(f, 1.0, 1.0, 1.0), 100.0).unwrap();
        assert!((r.gamma - 1.0).norm() < 1e-14);
    }

    #[test]
    fn collinear_dipoles() {
        let axis = Direction::new(0.7, 1.9).unwrap();
        let d = dipole().steer(&axis);
        for kd in [0.5, 2.0, 5.0] {
            let p = axis.unit_vector() * kd;
            let r = coherence_pair(&SensorPlacement::at_origin(d.clone()), &SensorPlacement::new(d.clone(), p), 1.0).unwrap();
            let want = spherical_bessel_j(0, kd).unwrap() - 2.0 * spherical_bessel_j(2, kd).unwrap();
            assert!((r.gamma - want).norm() < 1e-12, "kd={kd}: {}", r.gamma);
        }
        let r = coherence_pair(
            &SensorPlacement::at_origin(d.clone()),
            &SensorPlacement::new(d.clone(), axis.unit_vector() * 2.0),
            1.0,
        )
        .unwrap();
        assert!((r.gamma.re - 0.057753).abs() < 1e-6);
    }

    #[test]
    fn coincident_formula() {
        let f = random_spectrum(&mut ChaCha8Rng::seed_from_u64(2), 3);
        assert!((coherence_coincident(&f, &f).unwrap() - 1.0).norm() < 1e-15);
        let dx = dipole().steer(&Direction::new(PI / 2.0, 0.0).unwrap());
        let dy = dipole().steer(&Direction::new(PI / 2.0, PI / 2.0).unwrap());
        assert!(coherence_coincident(&dx, &dy).unwrap().norm() < 1e-15);
        let g = coherence_coincident(&omni(), &cardioid().to_spectrum()).unwrap();
        assert!((g - 3f64.sqrt() / 2.0).norm() < 1e-15);
        assert!(coherence_coincident(&omni(), &SphericalSpectrum::zeros(0)).is_err());
    }

    #[test]
    fn coincident_matches_zero_displacement_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = random_spectrum(&mut rng, 2);
        let g = random_spectrum(&mut rng, 4);
        let a = coherence_coincident(&f, &g).unwrap();
        let b = coherence_pair(&SensorPlacement::at_origin(f), &SensorPlacement::at_origin(g), 10.0).unwrap();
        assert!((a - b.gamma).norm() < 1e-13);
    }

    #[test]
    fn magnitude_invariant_under_complex_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let f = at(random_spectrum(&mut rng, 2), 0.0, 0.0, 0.0);
        let g = at(random_spectrum(&mut rng, 2), 0.02, 0.01, -0.03);
        let a = coherence_pair(&f, &g, 80.0).unwrap().gamma;
        let s = C64::from_polar(3.0, 0.7);
        let g2 = SensorPlacement::new(g.spectrum.scaled(s), g.position);
        let b = coherence_pair(&f, &g2, 80.0).unwrap().gamma;
        assert!((a.norm() - b.norm()).abs() < 1e-13);
        // γ ∝ conj(s)
        assert!((b - a * C64::from_polar(1.0, -0.7)).norm() < 1e-13);
    }

    #[test]
    fn rigid_motion_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let f = random_spectrum(&mut rng, 3);
        let g = random_spectrum(&mut rng, 2);
        let p1 = Vector3::new(0.01, 0.02, -0.03);
        let p2 = Vector3::new(-0.04, 0.05, 0.02);
        let k = 60.0;
        let base = coherence_pair(&SensorPlacement::new(f.clone(), p1), &SensorPlacement::new(g.clone(), p2), k).unwrap().gamma;
        let shift = Vector3::new(1.0, -2.0, 0.5);
        let moved = coherence_pair(&SensorPlacement::new(f.clone(), p1 + shift), &SensorPlacement::new(g.clone(), p2 + shift), k)
            .unwrap()
            .gamma;
        assert!((base - moved).norm() < 1e-10);
        let rot = EulerAngles::new(0.4, 2.0, 5.1).unwrap();
        let rotated = coherence_pair(
            &SensorPlacement::new(f.rotated(&rot), rot.rotate_vector(&p1)),
            &SensorPlacement::new(g.rotated(&rot), rot.rotate_vector(&p2)),
            k,
        )
        .unwrap()
        .gamma;
        assert!((base - rotated).norm() < 1e-10);
    }

    #[test]
    fn plane_wave_order_beyond_band_limit_changes_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let f = at(random_spectrum(&mut rng, 3), 0.0, 0.0, 0.0);
        let g = at(random_spectrum(&mut rng, 3), 0.03, 0.01, 0.02);
        let a = csd_pair_with_order(&f, &g, 100.0, 6).unwrap();
        let b = csd_pair_with_order(&f, &g, 100.0, 12).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn sweep_matches_pointwise_and_keeps_order() {
        let f = at(cardioid().steer(&Direction::new(0.3, 0.0).unwrap()), 0.0, 0.0, 0.0);
        let g = at(cardioid().steer(&Direction::new(1.3, 2.0).unwrap()), 0.05, 0.0, 0.02);
        let freqs: Vec<f64> = (1..=40).map(|i| 100.0 * i as f64).collect();
        let seq = coherence_sweep(&f, &g, &freqs, 343.0, Execution::Sequential).unwrap();
        let par = coherence_sweep(&f, &g, &freqs, 343.0, Execution::Parallel).unwrap();
        assert_eq!(seq, par);
        for (r, hz) in seq.iter().zip(&freqs) {
            assert_eq!(r.frequency_hz, Some(*hz));
            let direct = coherence_pair(&f, &g, 2.0 * PI * hz / 343.0).unwrap();
            assert!((direct.gamma - r.gamma).norm() < 1e-13);
            assert!(r.gamma.norm() <= 1.0 + 1e-9);
        }
        assert!(coherence_sweep(&f, &g, &freqs, 0.0, Execution::Sequential).is_err());
    }

    #[test]
    fn order_rule_of_thumb() {
        let g = suggested_order(25.0, 0.1).unwrap();
        assert_eq!((g.order, g.min_points, g.equiangular_points), (4, 25, 100));
        assert_eq!(suggested_order(10.0, 0.0).unwrap().order, 0);
        assert_eq!(suggested_order(10.0, 0.1).unwrap().order, 2);
        assert!(suggested_order(-1.0, 0.1).is_err());
    }

    #[test]
    fn single_omni_measurement() {
        let grid = SphereGrid::gauss_legendre(3);
        let responses = DMatrix::from_element(grid.len(), 1, C64::new(1.0, 0.0));
        let spectra = array_spectra_from_measurements(&responses, &grid, 2).unwrap();
        let s = spectra.sensor(0);
        assert!((s.coeffs()[0] - (4.0 * PI).sqrt()).norm() < 1e-12);
        assert!(s.coeffs()[1..].iter().all(|c| c.norm() < 1e-12));
        let gamma = array_coherence_matrix(&spectra).unwrap();
        assert_eq!(gamma.shape(), (1, 1));
        assert_eq!(gamma[(0, 0)], C64::new(1.0, 0.0));
        let none = DMatrix::<C64>::zeros(grid.len(), 0);
        assert!(array_spectra_from_measurements(&none, &grid, 2).is_err());
        assert!(matches!(
            array_spectra_from_measurements(&responses, &grid, 6),
            Err(Error::Underdetermined { required: 49, .. })
        ));
    }

    #[test]
    fn zero_sensor_is_reported_by_index() {
        let spectra = ArraySpectra::from_spectra(&[omni(), SphericalSpectrum::zeros(0)]).unwrap();
        assert_eq!(array_coherence_matrix(&spectra), Err(Error::DegenerateSensor { index: 1 }));
    }

    #[test]
    fn measured_directional_array_agrees_with_pair_formula() {
        // two steered cardioids at distinct positions; responses follow the
        // same phase convention as the pair coherence
        let k = 60.0;
        let sensors = [
            SensorPlacement::new(cardioid().steer(&Direction::new(0.4, 0.2).unwrap()), Vector3::new(0.01, 0.0, 0.0)),
            SensorPlacement::new(cardioid().steer(&Direction::new(2.0, 3.0).unwrap()), Vector3::new(-0.02, 0.01, 0.015)),
        ];
        let order = 16;
        let grid = SphereGrid::gauss_legendre(2 * order);
        let mut responses = DMatrix::zeros(grid.len(), 2);
        for (j, d) in grid.directions().iter().enumerate() {
            for (q, s) in sensors.iter().enumerate() {
                let phase = k * d.unit_vector().dot(&s.position);
                responses[(j, q)] = isht(&s.spectrum, d) * C64::from_polar(1.0, phase);
            }
        }
        let spectra = array_spectra_from_measurements(&responses, &grid, order).unwrap();
        let gamma = array_coherence_matrix(&spectra).unwrap();
        let pair = coherence_pair(&sensors[0], &sensors[1], k).unwrap().gamma;
        assert!((gamma[(0, 1)] - pair).norm() < 1e-9, "{} vs {pair}", gamma[(0, 1)]);
        assert!(min_eigenvalue(&gamma) >= -1e-10);
    }
}
