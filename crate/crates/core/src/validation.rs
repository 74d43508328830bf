//! Self-check suites shared by the command line and the test harness.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::coherence::{coherence_pair, csd_pair_with_order, psd_pair_norm, SensorPlacement};
use crate::coupling::gaunt;
use crate::differential::{diff_weights_to_spectrum, DifferentialWeights};
use crate::error::{Error, Result};
use crate::harmonics::{eval_sh, num_coeffs, SphericalSpectrum, C64};
use crate::oracle::{coherence_quadrature_with, diffuse_field_montecarlo, AxisPattern};
use crate::par::{map_indexed, Execution};
use crate::rotation::EulerAngles;
use crate::sphere::{Direction, SphereGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    ClosedForms,
    OracleRandom,
    MonteCarlo,
}

impl Suite {
    pub const ALL: [Suite; 3] = [Suite::ClosedForms, Suite::OracleRandom, Suite::MonteCarlo];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ClosedForms => "closed-forms",
            Suite::OracleRandom => "oracle-random",
            Suite::MonteCarlo => "montecarlo",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown suite '{s}'")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One check: `error` is compared against `tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub error: f64,
    pub tolerance: f64,
}

impl CheckLine {
    pub fn new(name: impl Into<String>, error: f64, tolerance: f64) -> Self {
        CheckLine { name: name.into(), error, tolerance }
    }

    pub fn passed(&self) -> bool {
        self.error < self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub lines: Vec<CheckLine>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(CheckLine::passed)
    }

    pub fn max_error(&self) -> f64 {
        self.lines.iter().map(|l| l.error).fold(0.0, f64::max)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {} (seed {})", self.suite, self.seed)?;
        for l in &self.lines {
            let tag = if l.passed() { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {:<48} error {:.3e} < {:.1e}", l.name, l.error, l.tolerance)?;
        }
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{tag} {} max error {:.3e}", self.suite, self.max_error())
    }
}

pub fn run_suite(suite: Suite, seed: u64, exec: Execution) -> Result<SuiteReport> {
    let lines = match suite {
        Suite::ClosedForms => closed_forms()?,
        Suite::OracleRandom => oracle_random(seed, 50, exec)?,
        Suite::MonteCarlo => montecarlo(seed, exec)?,
    };
    Ok(SuiteReport { suite, seed, lines })
}

pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// `j₂` from its trigonometric closed form.
pub fn j2_closed(x: f64) -> f64 {
    (3.0 / (x * x) - 1.0) * x.sin() / x - 3.0 * x.cos() / (x * x)
}

fn weights(w: &[f64]) -> DifferentialWeights {
    DifferentialWeights::new(w.to_vec()).expect("fixed weights are valid")
}

fn closed_forms() -> Result<Vec<CheckLine>> {
    let mut lines = Vec::new();
    let omni = SphericalSpectrum::omni();
    let origin = SensorPlacement::at_origin(omni.clone());
    for kd in [0.1, 1.0, PI, 10.0, 50.0] {
        let other = SensorPlacement::new(omni.clone(), Vector3::new(0.0, 0.0, 1.0));
        let g = coherence_pair(&origin, &other, kd)?.gamma;
        lines.push(CheckLine::new(format!("omni-omni sinc kd={kd:.4}"), (g - sinc(kd)).norm(), 1e-12));
    }

    let dipole = diff_weights_to_spectrum(&weights(&[0.0, 1.0]))?.to_spectrum();
    for kd in [0.5, 2.0, 5.0] {
        let a = SensorPlacement::at_origin(dipole.clone());
        let b = SensorPlacement::new(dipole.clone(), Vector3::new(0.0, 0.0, 1.0));
        let g = coherence_pair(&a, &b, kd)?.gamma;
        let want = sinc(kd) - 2.0 * j2_closed(kd);
        lines.push(CheckLine::new(format!("collinear dipoles kd={kd:.1}"), (g - want).norm(), 1e-10));
    }

    let card = diff_weights_to_spectrum(&weights(&[0.5, 0.5]))?;
    let want = [0.5 * (4.0 * PI).sqrt(), 0.5 * (4.0 * PI / 3.0).sqrt()];
    let err = card.coeffs().iter().zip(want).map(|(c, w)| (c - w).norm()).fold(0.0, f64::max);
    lines.push(CheckLine::new("cardioid spectrum", err, 1e-10));

    let g = coherence_pair(&SensorPlacement::at_origin(card.to_spectrum()), &origin, 3.0)?.gamma;
    lines.push(CheckLine::new("coincident cardioid-omni", (g - 0.75f64.sqrt()).norm(), 1e-10));

    // Gaunt coefficients against a dense product-grid integral
    let grid = SphereGrid::gauss_legendre(8);
    let w = grid.weights().expect("product grid carries weights");
    let mut err: f64 = 0.0;
    for n1 in 0..=2i64 {
        for n2 in 0..=2i64 {
            for n3 in 0..=4i64 {
                for m1 in -n1..=n1 {
                    for m2 in -n2..=n2 {
                        let m3 = m1 + m2;
                        if m3.abs() > n3 {
                            continue;
                        }
                        let mut q = C64::new(0.0, 0.0);
                        for (d, wi) in grid.directions().iter().zip(w) {
                            q += wi * eval_sh(n1, m1, d)? * eval_sh(n2, m2, d)? * eval_sh(n3, m3, d)?.conj();
                        }
                        err = err.max((q - gaunt(n1, m1, n2, m2, n3, m3)?).norm());
                    }
                }
            }
        }
    }
    lines.push(CheckLine::new("gaunt vs quadrature (orders <= 2, 2, 4)", err, 1e-12));
    Ok(lines)
}

/// A randomized pair of sensors and a wavenumber.
#[derive(Debug, Clone)]
pub struct RandomCase {
    pub f: SensorPlacement,
    pub g: SensorPlacement,
    pub k: f64,
    pub kd: f64,
}

fn random_spectrum(rng: &mut ChaCha8Rng, max_order: usize) -> SphericalSpectrum {
    let order = rng.random_range(0..=max_order);
    let coeffs = (0..num_coeffs(order))
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let spec = SphericalSpectrum::new(order, coeffs).expect("length matches order");
    let angles = EulerAngles::new(rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI))
        .expect("beta in range");
    spec.rotated(&angles)
}

fn random_position(rng: &mut ChaCha8Rng, scale: f64) -> Vector3<f64> {
    Vector3::from_fn(|_, _| rng.random_range(-scale..scale))
}

/// Seeded random cases with spectra up to order 4, random orientations and
/// positions, and `kd` uniform in `[0.3, 10]`.
pub fn random_cases(seed: u64, count: usize) -> Vec<RandomCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let f = SensorPlacement::new(random_spectrum(&mut rng, 4), random_position(&mut rng, 0.1));
            let mut g = SensorPlacement::new(random_spectrum(&mut rng, 4), random_position(&mut rng, 0.1));
            while (g.position - f.position).norm() < 1e-3 {
                g.position = random_position(&mut rng, 0.1);
            }
            let kd = rng.random_range(0.3..10.0);
            let k = kd / (g.position - f.position).norm();
            RandomCase { f, g, k, kd }
        })
        .collect()
}

/// Quadrature order that integrates the coherence integrand of a case.
pub fn oracle_quad_order(case: &RandomCase) -> usize {
    case.f.spectrum.order() + case.g.spectrum.order() + case.kd.ceil() as usize + 16
}

/// Pair formula against direct quadrature, relative to `max(|γ|, 1e-6)`.
pub fn pair_vs_quadrature(case: &RandomCase, exec: Execution) -> Result<f64> {
    let pair = coherence_pair(&case.f, &case.g, case.k)?.gamma;
    let r12 = case.g.position - case.f.position;
    let quad = coherence_quadrature_with(&case.f.spectrum, &case.g.spectrum, r12, case.k, oracle_quad_order(case), exec)?;
    Ok((pair - quad).norm() / quad.norm().max(1e-6))
}

/// Change in γ when the plane-wave order is raised from `N_f + N_g` by 6.
pub fn truncation_change(case: &RandomCase) -> Result<f64> {
    let order = case.f.spectrum.order() + case.g.spectrum.order();
    let norm = psd_pair_norm(&case.f.spectrum, &case.g.spectrum)?;
    let base = csd_pair_with_order(&case.f, &case.g, case.k, order)?;
    let raised = csd_pair_with_order(&case.f, &case.g, case.k, order + 6)?;
    Ok((raised - base).norm() / norm)
}

fn oracle_random(seed: u64, count: usize, exec: Execution) -> Result<Vec<CheckLine>> {
    let cases = random_cases(seed, count);
    let errors = map_indexed(exec, cases.len(), |i| {
        Ok((pair_vs_quadrature(&cases[i], Execution::Sequential)?, truncation_change(&cases[i])?))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let rel = errors.iter().map(|e| e.0).fold(0.0, f64::max);
    let trunc = errors.iter().map(|e| e.1).fold(0.0, f64::max);
    Ok(vec![
        CheckLine::new(format!("pair vs quadrature, {count} cases (relative)"), rel, 1e-8),
        CheckLine::new(format!("plane-wave order 2N -> 2N+6, {count} cases"), trunc, 1e-12),
    ])
}

/// A seeded Monte-Carlo configuration: two first- or second-order
/// differential patterns with random axes and separation.
#[derive(Debug, Clone)]
pub struct MonteCarloConfig {
    pub f: AxisPattern,
    pub g: AxisPattern,
    pub r12: Vector3<f64>,
    pub k: f64,
    pub seed: u64,
}

pub const MC_WAVES: usize = 200;
pub const MC_TRIALS: usize = 2000;

pub fn montecarlo_configs(seed: u64, count: usize) -> Vec<MonteCarloConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d63);
    let pattern = |rng: &mut ChaCha8Rng| {
        let a: f64 = rng.random_range(0.0..1.0);
        let w = if rng.random_bool(0.5) { vec![a, 1.0 - a] } else { vec![a / 2.0, a / 2.0, 1.0 - a] };
        let axis = Direction::new(rng.random_range(-1.0..1.0f64).acos(), rng.random_range(0.0..2.0 * PI))
            .unwrap_or_else(|_| Direction::zenith());
        AxisPattern { weights: DifferentialWeights::new(w).expect("finite weights"), axis }
    };
    (0..count)
        .map(|i| {
            let f = pattern(&mut rng);
            let g = pattern(&mut rng);
            let r12 = random_position(&mut rng, 0.05);
            let kd = rng.random_range(0.5..5.0);
            let k = kd / r12.norm();
            MonteCarloConfig { f, g, r12, k, seed: seed.wrapping_add(i as u64) }
        })
        .collect()
}

/// Deviation of the Monte-Carlo estimate from quadrature, in standard errors.
pub fn montecarlo_deviation(config: &MonteCarloConfig, exec: Execution) -> Result<f64> {
    let kd = config.k * config.r12.norm();
    let exact = coherence_quadrature_with(&config.f, &config.g, config.r12, config.k, 2 * 2 + kd.ceil() as usize + 16, exec)?;
    let est = diffuse_field_montecarlo(&config.f, &config.g, config.r12, config.k, MC_WAVES, MC_TRIALS, config.seed, exec)?;
    Ok((est.gamma - exact).norm() / est.standard_error)
}

fn montecarlo(seed: u64, exec: Execution) -> Result<Vec<CheckLine>> {
    montecarlo_configs(seed, 5)
        .iter()
        .enumerate()
        .map(|(i, c)| Ok(CheckLine::new(format!("monte-carlo config {i} (deviation / std err)"), montecarlo_deviation(c, exec)?, 4.0)))
        .collect()
}
