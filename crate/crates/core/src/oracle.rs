//! Reference computations that avoid the coupling and Bessel machinery:
//! direct quadrature of the coherence integrals and a Monte-Carlo diffuse
//! field made of random plane waves.

use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::differential::DifferentialWeights;
use crate::error::{Error, Result};
use crate::harmonics::{SphericalSpectrum, C64};
use crate::par::{map_indexed, Execution};
use crate::sphere::{Direction, SphereGrid};

pub const MIN_WAVES: usize = 100;
pub const MIN_TRIALS: usize = 100;
const JACKKNIFE_GROUPS: usize = 50;

/// A complex response defined for every direction.
pub trait DirectionalFunction: Sync {
    fn eval(&self, dir: &Direction) -> C64;
}

impl<F> DirectionalFunction for F
where
    F: Fn(&Direction) -> C64 + Sync,
{
    fn eval(&self, dir: &Direction) -> C64 {
        self(dir)
    }
}

impl DirectionalFunction for SphericalSpectrum {
    fn eval(&self, dir: &Direction) -> C64 {
        SphericalSpectrum::eval(self, dir)
    }
}

/// Differential pattern evaluated as a polynomial in the cosine of the angle
/// to its axis.
#[derive(Debug, Clone)]
pub struct AxisPattern {
    pub weights: DifferentialWeights,
    pub axis: Direction,
}

impl DirectionalFunction for AxisPattern {
    fn eval(&self, dir: &Direction) -> C64 {
        let x = dir.unit_vector().dot(&self.axis.unit_vector()).clamp(-1.0, 1.0);
        C64::new(self.weights.weights().iter().rev().fold(0.0, |acc, w| acc * x + w), 0.0)
    }
}

/// Samples on a set of directions, looked up by nearest neighbour.
#[derive(Debug, Clone)]
pub struct Tabulated {
    points: Vec<Vector3<f64>>,
    values: Vec<C64>,
}

impl Tabulated {
    pub fn new(directions: &[Direction], values: Vec<C64>) -> Result<Self> {
        if directions.is_empty() || directions.len() != values.len() {
            return Err(Error::Dimension { expected: directions.len().max(1), found: values.len() });
        }
        Ok(Tabulated { points: directions.iter().map(Direction::unit_vector).collect(), values })
    }
}

impl DirectionalFunction for Tabulated {
    fn eval(&self, dir: &Direction) -> C64 {
        let u = dir.unit_vector();
        let best = self
            .points
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.dot(&u).total_cmp(&b.1.dot(&u)))
            .map(|(i, _)| i)
            .unwrap_or(0);
        self.values[best]
    }
}

/// Coherence integral evaluated on a Gauss–Legendre product grid of order
/// `quad_order`. The sign convention matches [`crate::coherence::coherence_pair`]
/// with `r12 = r2 − r1`.
pub fn coherence_quadrature<F, G>(f: &F, g: &G, r12: Vector3<f64>, k: f64, quad_order: usize) -> Result<C64>
where
    F: DirectionalFunction + ?Sized,
    G: DirectionalFunction + ?Sized,
{
    coherence_quadrature_with(f, g, r12, k, quad_order, Execution::default())
}

pub fn coherence_quadrature_with<F, G>(
    f: &F,
    g: &G,
    r12: Vector3<f64>,
    k: f64,
    quad_order: usize,
    exec: Execution,
) -> Result<C64>
where
    F: DirectionalFunction + ?Sized,
    G: DirectionalFunction + ?Sized,
{
    if !k.is_finite() || k < 0.0 {
        return Err(Error::Domain(format!("wavenumber must be finite and non-negative, got {k}")));
    }
    let grid = SphereGrid::gauss_legendre(quad_order);
    let weights = grid.weights().expect("product grid carries weights");
    let kr = k * r12;
    let terms = map_indexed(exec, grid.len(), |i| {
        let d = &grid.directions()[i];
        let (fv, gv) = (f.eval(d), g.eval(d));
        let w = weights[i];
        let phase = C64::from_polar(1.0, -kr.dot(&d.unit_vector()));
        (w * fv * gv.conj() * phase, w * fv.norm_sqr(), w * gv.norm_sqr())
    });
    let (mut csd, mut pf, mut pg) = (C64::new(0.0, 0.0), 0.0, 0.0);
    for (c, a, b) in terms {
        csd += c;
        pf += a;
        pg += b;
    }
    if pf <= 0.0 {
        return Err(Error::DegenerateSensor { index: 0 });
    }
    if pg <= 0.0 {
        return Err(Error::DegenerateSensor { index: 1 });
    }
    Ok(csd / (pf * pg).sqrt())
}

/// Uniformly distributed direction: inverse CDF on `cos θ`, uniform `φ`.
pub fn sample_direction<R: Rng + ?Sized>(rng: &mut R) -> Direction {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    Direction::new(z.clamp(-1.0, 1.0).acos(), phi).expect("sampled angles are in range")
}

/// Circular complex Gaussian with unit variance.
pub fn sample_amplitude<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Monte-Carlo coherence estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub gamma: C64,
    /// Jackknife standard error of `gamma` (magnitude of the complex spread).
    pub standard_error: f64,
    pub n_waves: usize,
    pub n_trials: usize,
}

/// Sample coherence between two sensors separated by `r12` in a field of
/// `n_waves` random plane waves per trial. Trial `t` draws from stream `t`
/// of a generator seeded with `seed`, so the result does not depend on the
/// execution mode.
#[allow(clippy::too_many_arguments)]
pub fn diffuse_field_montecarlo<F, G>(
    f: &F,
    g: &G,
    r12: Vector3<f64>,
    k: f64,
    n_waves: usize,
    n_trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<MonteCarloEstimate>
where
    F: DirectionalFunction + ?Sized,
    G: DirectionalFunction + ?Sized,
{
    if n_waves < MIN_WAVES || n_trials < MIN_TRIALS {
        return Err(Error::Domain(format!(
            "need at least {MIN_WAVES} waves and {MIN_TRIALS} trials, got {n_waves} and {n_trials}"
        )));
    }
    if !k.is_finite() || k < 0.0 {
        return Err(Error::Domain(format!("wavenumber must be finite and non-negative, got {k}")));
    }
    // sensor 1 at the origin, sensor 2 at r12
    let kr = k * r12;
    let scale = (4.0 * PI / n_waves as f64).sqrt();
    let trials = map_indexed(exec, n_trials, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        let (mut x1, mut x2) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for _ in 0..n_waves {
            let d = sample_direction(&mut rng);
            let a = sample_amplitude(&mut rng) * scale;
            let phase = C64::from_polar(1.0, kr.dot(&d.unit_vector()));
            x1 += f.eval(&d) * a;
            x2 += g.eval(&d) * a * phase;
        }
        (x1 * x2.conj(), x1.norm_sqr(), x2.norm_sqr())
    });

    let groups = JACKKNIFE_GROUPS.min(n_trials);
    let mut sums = vec![(C64::new(0.0, 0.0), 0.0, 0.0); groups];
    for (t, (c, a, b)) in trials.into_iter().enumerate() {
        let s = &mut sums[t * groups / n_trials];
        s.0 += c;
        s.1 += a;
        s.2 += b;
    }
    let total = sums.iter().fold((C64::new(0.0, 0.0), 0.0, 0.0), |acc, s| (acc.0 + s.0, acc.1 + s.1, acc.2 + s.2));
    if total.1 <= 0.0 {
        return Err(Error::DegenerateSensor { index: 0 });
    }
    if total.2 <= 0.0 {
        return Err(Error::DegenerateSensor { index: 1 });
    }
    let gamma = total.0 / (total.1 * total.2).sqrt();

    let leave_out: Vec<C64> = sums
        .iter()
        .map(|s| (total.0 - s.0) / ((total.1 - s.1) * (total.2 - s.2)).sqrt())
        .collect();
    let mean = leave_out.iter().sum::<C64>() / groups as f64;
    let spread: f64 = leave_out.iter().map(|v| (v - mean).norm_sqr()).sum();
    let standard_error = ((groups as f64 - 1.0) / groups as f64 * spread).sqrt();

    Ok(MonteCarloEstimate { gamma, standard_error, n_waves, n_trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bessel::spherical_bessel_j;
    use crate::coherence::{coherence_pair, SensorPlacement};
    use crate::harmonics::num_coeffs;

    fn omni(_: &Direction) -> C64 {
        C64::new(1.0, 0.0)
    }

    fn cardioid() -> AxisPattern {
        AxisPattern { weights: DifferentialWeights::new(vec![0.5, 0.5]).unwrap(), axis: Direction::zenith() }
    }

    #[test]
    fn omni_quadrature_is_sinc() {
        let r = Vector3::new(0.0, 0.0, 0.1);
        let gamma = coherence_quadrature(&omni, &omni, r, 20.0, 20).unwrap();
        assert!((gamma - 0.4546487134128409).norm() < 1e-10);
        let same = coherence_quadrature(&cardioid(), &cardioid(), Vector3::zeros(), 5.0, 8).unwrap();
        assert!((same - 1.0).norm() < 1e-15);
    }

    #[test]
    fn quadrature_matches_pair_formula() {
        let mut f = SphericalSpectrum::zeros(3);
        let mut g = SphericalSpectrum::zeros(2);
        for (i, c) in f.coeffs_mut().iter_mut().enumerate() {
            *c = C64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos());
        }
        for (i, c) in g.coeffs_mut().iter_mut().enumerate() {
            *c = C64::new(1.0 / (i + 1) as f64, 0.2 * i as f64);
        }
        let r1 = Vector3::new(0.1, -0.2, 0.05);
        let r2 = Vector3::new(-0.05, 0.1, 0.2);
        let k = 12.0;
        let pair = coherence_pair(&SensorPlacement::new(f.clone(), r1), &SensorPlacement::new(g.clone(), r2), k).unwrap();
        let quad = coherence_quadrature(&f, &g, r2 - r1, k, 40).unwrap();
        assert!((pair.gamma - quad).norm() < 1e-10 * pair.gamma.norm().max(1e-3));
        // past the band limit the quadrature stops changing
        let more = coherence_quadrature(&f, &g, r2 - r1, k, 48).unwrap();
        assert!((more - quad).norm() < 1e-10);
    }

    #[test]
    fn quadrature_degenerate_sensor() {
        let zero = |_: &Direction| C64::new(0.0, 0.0);
        assert_eq!(
            coherence_quadrature(&omni, &zero, Vector3::zeros(), 1.0, 4),
            Err(Error::DegenerateSensor { index: 1 })
        );
        assert_eq!(
            coherence_quadrature(&zero, &omni, Vector3::zeros(), 1.0, 4),
            Err(Error::DegenerateSensor { index: 0 })
        );
    }

    #[test]
    fn execution_modes_agree() {
        let r = Vector3::new(0.02, 0.0, 0.01);
        let a = coherence_quadrature_with(&cardioid(), &omni, r, 100.0, 12, Execution::Sequential).unwrap();
        let b = coherence_quadrature_with(&cardioid(), &omni, r, 100.0, 12, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let a = diffuse_field_montecarlo(&cardioid(), &omni, r, 100.0, 100, 120, 9, Execution::Sequential).unwrap();
        let b = diffuse_field_montecarlo(&cardioid(), &omni, r, 100.0, 100, 120, 9, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn montecarlo_identical_coincident_is_one() {
        let est = diffuse_field_montecarlo(&cardioid(), &cardioid(), Vector3::zeros(), 10.0, 200, 100, 1, Execution::default()).unwrap();
        assert!((est.gamma - 1.0).norm() < 1e-14);
        assert!(est.standard_error < 1e-12);
    }

    #[test]
    fn montecarlo_sinc_null() {
        let r = Vector3::new(0.0, 0.0, PI);
        let est = diffuse_field_montecarlo(&omni, &omni, r, 1.0, 10_000, 1_000, 42, Execution::default()).unwrap();
        assert!(est.gamma.norm() < 4.0 * est.standard_error, "{est:?}");
        assert!(est.standard_error > 0.0 && est.standard_error < 0.1);
    }

    #[test]
    fn montecarlo_cardioid_omni_coincident() {
        let est = diffuse_field_montecarlo(&cardioid(), &omni, Vector3::zeros(), 1.0, 500, 1_000, 7, Execution::default()).unwrap();
        assert!((est.gamma - 0.75f64.sqrt()).norm() < 4.0 * est.standard_error, "{est:?}");
    }

    #[test]
    fn montecarlo_rejects_small_runs() {
        assert!(diffuse_field_montecarlo(&omni, &omni, Vector3::zeros(), 1.0, 99, 100, 0, Execution::default()).is_err());
        assert!(diffuse_field_montecarlo(&omni, &omni, Vector3::zeros(), 1.0, 100, 99, 0, Execution::default()).is_err());
    }

    #[test]
    fn montecarlo_is_reproducible() {
        let r = Vector3::new(0.01, 0.02, 0.0);
        let a = diffuse_field_montecarlo(&cardioid(), &omni, r, 50.0, 100, 100, 5, Execution::default()).unwrap();
        let b = diffuse_field_montecarlo(&cardioid(), &omni, r, 50.0, 100, 100, 5, Execution::default()).unwrap();
        let c = diffuse_field_montecarlo(&cardioid(), &omni, r, 50.0, 100, 100, 6, Execution::default()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.gamma, c.gamma);
    }

    #[test]
    fn montecarlo_coverage() {
        // deviation from the oracle within 4 standard errors in nearly all seeds
        let f = cardioid();
        let g = AxisPattern { weights: DifferentialWeights::new(vec![0.0, 1.0]).unwrap(), axis: Direction::new(1.2, 0.4).unwrap() };
        let r = Vector3::new(0.03, -0.01, 0.02);
        let k = 60.0;
        let exact = coherence_quadrature(&f, &g, r, k, 24).unwrap();
        let reps = 40;
        let hits = (0..reps)
            .filter(|&s| {
                let est = diffuse_field_montecarlo(&f, &g, r, k, 100, 400, 1000 + s, Execution::default()).unwrap();
                (est.gamma - exact).norm() < 4.0 * est.standard_error
            })
            .count();
        assert!(hits as f64 >= 0.95 * reps as f64, "{hits}/{reps}");
    }

    #[test]
    fn sampling_is_isotropic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 200_000;
        let mut mean = Vector3::zeros();
        let mut second = 0.0;
        for _ in 0..n {
            let u = sample_direction(&mut rng).unit_vector();
            mean += u;
            second += u.z * u.z;
        }
        mean /= n as f64;
        assert!(mean.norm() < 4.0 / (3.0 * n as f64).sqrt());
        assert!((second / n as f64 - 1.0 / 3.0).abs() < 0.005);
        let amps: Vec<C64> = (0..n).map(|_| sample_amplitude(&mut rng)).collect();
        let var = amps.iter().map(|a| a.norm_sqr()).sum::<f64>() / n as f64;
        assert!((var - 1.0).abs() < 0.01);
    }

    #[test]
    fn tabulated_nearest_neighbour() {
        let grid = SphereGrid::gauss_legendre(30);
        let values: Vec<C64> = grid.directions().iter().map(|d| C64::new(d.theta().cos(), 0.0)).collect();
        let tab = Tabulated::new(grid.directions(), values).unwrap();
        let d = grid.directions()[17];
        assert_eq!(tab.eval(&d), C64::new(d.theta().cos(), 0.0));
        let probe = Direction::new(0.77, 2.0).unwrap();
        assert!((tab.eval(&probe).re - 0.77f64.cos()).abs() < 0.1);
        assert!(Tabulated::new(grid.directions(), vec![]).is_err());
    }

    #[test]
    fn spectrum_backed_function() {
        let mut s = SphericalSpectrum::zeros(2);
        s.coeffs_mut()[num_coeffs(1) + 1] = C64::new(0.3, -0.1);
        let d = Direction::new(0.5, 1.5).unwrap();
        assert_eq!(DirectionalFunction::eval(&s, &d), s.eval(&d));
        let q = coherence_quadrature(&SphericalSpectrum::omni(), &omni, Vector3::new(0.0, 0.3, 0.0), 10.0, 20).unwrap();
        assert!((q - spherical_bessel_j(0, 3.0).unwrap()).norm() < 1e-12);
    }
}
