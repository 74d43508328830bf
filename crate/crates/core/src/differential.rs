//! Differential beam patterns `d(θ) = Σ w_n cosⁿθ` and their axisymmetric
//! angular spectra.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Vector3};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::coherence::{coherence_pair, CoherenceResult, SensorPlacement};
use crate::error::{Error, Result};
use crate::harmonics::{AxisymmetricSpectrum, C64, MAX_ORDER};
use crate::sphere::Direction;
use crate::wigner::rational_to_f64;

/// Tolerance on `Σ w_n = 1` for a pattern normalized to unity on axis.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Weights `w_0 … w_N` of a differential pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferentialWeights {
    weights: Vec<f64>,
}

impl DifferentialWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Domain("differential pattern needs at least one weight".into()));
        }
        if weights.len() > MAX_ORDER + 1 {
            return Err(Error::Domain(format!("pattern order {} exceeds {MAX_ORDER}", weights.len() - 1)));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Domain("non-finite differential weight".into()));
        }
        Ok(DifferentialWeights { weights })
    }

    pub fn order(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Whether the on-axis response `Σ w_n` is 1.
    pub fn is_normalized(&self) -> bool {
        (self.weights.iter().sum::<f64>() - 1.0).abs() < NORMALIZATION_TOLERANCE
    }

    /// Pattern value at angle `theta` from the look direction.
    pub fn eval(&self, theta: f64) -> f64 {
        let x = theta.cos();
        self.weights.iter().rev().fold(0.0, |acc, w| acc * x + w)
    }
}

/// Monomial coefficients of the Legendre polynomials: column `n` holds the
/// coefficients of `P_n` in the basis `1, x, …, x^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreCoeffMatrix {
    order: usize,
    matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
}

impl LegendreCoeffMatrix {
    /// Builds the matrix and its inverse exactly in rational arithmetic
    /// (Bonnet recurrence, then back-substitution on the triangular
    /// structure) and rounds once to `f64`.
    pub fn new(order: usize) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::Domain(format!("order {order} exceeds {MAX_ORDER}")));
        }
        let size = order + 1;
        let zero = BigRational::zero();
        let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(size);
        cols.push(vec![BigRational::one()]);
        if order >= 1 {
            cols.push(vec![zero.clone(), BigRational::one()]);
        }
        for n in 1..order {
            // (n+1) P_{n+1} = (2n+1) x P_n − n P_{n−1}
            let mut next = vec![zero.clone(); n + 2];
            let a = BigRational::new(BigInt::from(2 * n + 1), BigInt::from(n + 1));
            let b = BigRational::new(BigInt::from(n), BigInt::from(n + 1));
            for (i, c) in cols[n].iter().enumerate() {
                next[i + 1] += &a * c;
            }
            for (i, c) in cols[n - 1].iter().enumerate() {
                next[i] -= &b * c;
            }
            cols.push(next);
        }
        let exact = |r: usize, c: usize| cols[c].get(r).cloned().unwrap_or_else(|| zero.clone());

        // upper triangular inverse, column by column
        let mut inv = vec![vec![zero.clone(); size]; size];
        for c in 0..size {
            for r in (0..=c).rev() {
                let mut acc = if r == c { BigRational::one() } else { zero.clone() };
                for k in r + 1..=c {
                    acc -= exact(r, k) * &inv[k][c];
                }
                inv[r][c] = acc / exact(r, r);
            }
        }
        let matrix = DMatrix::from_fn(size, size, |r, c| rational_to_f64(&exact(r, c)));
        let inverse = DMatrix::from_fn(size, size, |r, c| rational_to_f64(&inv[r][c]));
        Ok(LegendreCoeffMatrix { order, matrix, inverse })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    /// Evaluates `P_n(x)` from the stored coefficients.
    pub fn eval(&self, n: usize, x: f64) -> f64 {
        (0..=n).rev().fold(0.0, |acc, i| acc * x + self.matrix[(i, n)])
    }
}

pub fn legendre_coeff_matrix(order: usize) -> Result<LegendreCoeffMatrix> {
    LegendreCoeffMatrix::new(order)
}

fn normalization(n: usize) -> f64 {
    ((2 * n + 1) as f64 / (4.0 * PI)).sqrt()
}

/// Axisymmetric spectrum of a differential pattern, `d̃ = N⁻¹ P⁻¹ w` with
/// `N = diag(sqrt((2n+1)/4π))`.
pub fn diff_weights_to_spectrum(w: &DifferentialWeights) -> Result<AxisymmetricSpectrum> {
    if !w.is_normalized() {
        log::warn!(
            "differential weights sum to {} rather than 1; pattern is not unit on axis",
            w.weights.iter().sum::<f64>()
        );
    }
    let p = LegendreCoeffMatrix::new(w.order())?;
    let legendre = p.inverse() * nalgebra::DVector::from_column_slice(&w.weights);
    AxisymmetricSpectrum::new(
        legendre
            .iter()
            .enumerate()
            .map(|(n, v)| C64::new(v / normalization(n), 0.0))
            .collect(),
    )
}

/// Inverse of [`diff_weights_to_spectrum`]: `w = P N d̃`. The spectrum must be
/// real, as differential weights are.
pub fn spectrum_to_diff_weights(axi: &AxisymmetricSpectrum) -> Result<DifferentialWeights> {
    let scale = axi.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    if axi.coeffs().iter().any(|c| c.im.abs() > 1e-12 * scale.max(1.0)) {
        return Err(Error::Domain("complex axisymmetric spectrum has no real differential weights".into()));
    }
    let p = LegendreCoeffMatrix::new(axi.order())?;
    let scaled: Vec<f64> = axi.coeffs().iter().enumerate().map(|(n, c)| c.re * normalization(n)).collect();
    let w = p.matrix() * nalgebra::DVector::from_column_slice(&scaled);
    DifferentialWeights::new(w.iter().copied().collect())
}

/// Coherence between two differential patterns looking along `dir1`, `dir2`
/// and placed at `r1`, `r2`.
#[allow(clippy::too_many_arguments)]
pub fn differential_pair_coherence(
    w1: &DifferentialWeights,
    dir1: &Direction,
    r1: Vector3<f64>,
    w2: &DifferentialWeights,
    dir2: &Direction,
    r2: Vector3<f64>,
    k: f64,
) -> Result<CoherenceResult> {
    let f = SensorPlacement::new(diff_weights_to_spectrum(w1)?.steer(dir1), r1);
    let g = SensorPlacement::new(diff_weights_to_spectrum(w2)?.steer(dir2), r2);
    coherence_pair(&f, &g, k)
}
