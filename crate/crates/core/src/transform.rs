//! Forward spherical harmonic transform by quadrature or least squares.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::harmonics::{num_coeffs, sh_vector, SphericalSpectrum, C64};
use crate::sphere::SphereGrid;

/// Condition number of the sampling matrix above which a least-squares
/// transform carries a warning.
pub const CONDITION_WARNING_THRESHOLD: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShtMode {
    /// `Σ_j w_j f(Ω_j) y*(Ω_j)`; requires grid weights.
    Quadrature,
    /// Minimum-residual fit of the sampled values; requires `|grid| ≥ (N+1)²`.
    LeastSquares,
}

impl ShtMode {
    /// Quadrature when the grid carries weights, least squares otherwise.
    pub fn for_grid(grid: &SphereGrid) -> Self {
        if grid.weights().is_some() {
            ShtMode::Quadrature
        } else {
            ShtMode::LeastSquares
        }
    }
}

/// Result of a forward transform.
#[derive(Debug, Clone)]
pub struct ShtOutput {
    pub spectrum: SphericalSpectrum,
    /// Condition number of the sampling matrix (least-squares mode only).
    pub condition_number: Option<f64>,
    pub warnings: Vec<String>,
}

/// Transforms samples of a function on `grid` into its order-`order` spectrum.
pub fn sht(values: &[C64], grid: &SphereGrid, order: usize, mode: ShtMode) -> Result<ShtOutput> {
    if values.len() != grid.len() {
        return Err(Error::Dimension {
            expected: grid.len(),
            found: values.len(),
        });
    }
    let samples = DMatrix::from_column_slice(values.len(), 1, values);
    let out = sht_columns(&samples, grid, order, mode)?;
    let spectrum = SphericalSpectrum::new(order, out.coeffs.column(0).iter().copied().collect())?;
    Ok(ShtOutput {
        spectrum,
        condition_number: out.condition_number,
        warnings: out.warnings,
    })
}

/// Column-wise transform of a `|grid| × Q` sample matrix.
#[derive(Debug, Clone)]
pub struct ShtColumns {
    /// `(N+1)² × Q` coefficient matrix.
    pub coeffs: DMatrix<C64>,
    pub condition_number: Option<f64>,
    pub warnings: Vec<String>,
}

pub fn sht_columns(samples: &DMatrix<C64>, grid: &SphereGrid, order: usize, mode: ShtMode) -> Result<ShtColumns> {
    if samples.nrows() != grid.len() {
        return Err(Error::Dimension {
            expected: grid.len(),
            found: samples.nrows(),
        });
    }
    match mode {
        ShtMode::Quadrature => {
            let weights = grid.weights().ok_or_else(|| {
                Error::InvalidGrid("quadrature transform needs grid weights".into())
            })?;
            let p = num_coeffs(order);
            let mut coeffs = DMatrix::<C64>::zeros(p, samples.ncols());
            for (j, (d, w)) in grid.directions().iter().zip(weights).enumerate() {
                let y = sh_vector(order, d);
                for col in 0..samples.ncols() {
                    let fw = samples[(j, col)] * w;
                    for (q, yq) in y.iter().enumerate() {
                        coeffs[(q, col)] += fw * yq.conj();
                    }
                }
            }
            Ok(ShtColumns {
                coeffs,
                condition_number: None,
                warnings: Vec::new(),
            })
        }
        ShtMode::LeastSquares => {
            let solver = LeastSquaresSht::new(grid, order)?;
            Ok(ShtColumns {
                coeffs: &solver.pseudo_inverse * samples,
                condition_number: Some(solver.condition_number),
                warnings: solver.warnings.clone(),
            })
        }
    }
}

/// Precomputed least-squares transform for a fixed grid and order.
///
/// The sampling matrix `Y` (`|grid| × (N+1)²`) is factored by SVD; singular
/// values below `ε·σ_max·max(dims)` are treated as rank deficiency.
#[derive(Debug, Clone)]
pub struct LeastSquaresSht {
    order: usize,
    pseudo_inverse: DMatrix<C64>,
    condition_number: f64,
    rank: usize,
    warnings: Vec<String>,
}

impl LeastSquaresSht {
    pub fn new(grid: &SphereGrid, order: usize) -> Result<Self> {
        let p = num_coeffs(order);
        if grid.len() < p {
            return Err(Error::Underdetermined {
                order,
                required: p,
                available: grid.len(),
            });
        }
        let mut y = DMatrix::<C64>::zeros(grid.len(), p);
        for (j, d) in grid.directions().iter().enumerate() {
            for (q, v) in sh_vector(order, d).into_iter().enumerate() {
                y[(j, q)] = v;
            }
        }
        let svd = y.svd(true, true);
        let sv = &svd.singular_values;
        let smax = sv.max();
        let smin = sv.min();
        let condition_number = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        let cutoff = f64::EPSILON * smax * grid.len().max(p) as f64;
        let u = svd.u.as_ref().expect("svd computed with u");
        let v_t = svd.v_t.as_ref().expect("svd computed with v_t");
        let mut pinv = DMatrix::<C64>::zeros(p, grid.len());
        let mut rank = 0;
        for (k, &s) in sv.iter().enumerate() {
            if s <= cutoff {
                continue;
            }
            rank += 1;
            // V Σ⁻¹ Uᴴ
            let vk = v_t.row(k).adjoint();
            let uk = u.column(k).adjoint();
            pinv += (vk * uk) / C64::new(s, 0.0);
        }
        let mut warnings = Vec::new();
        if condition_number > CONDITION_WARNING_THRESHOLD {
            let msg = format!(
                "sampling matrix for order {order} on {} directions is ill-conditioned (condition number {condition_number:.3e})",
                grid.len()
            );
            log::warn!("{msg}");
            warnings.push(msg);
        }
        if rank < p {
            warnings.push(format!("sampling matrix is rank deficient ({rank} of {p})"));
        }
        Ok(LeastSquaresSht {
            order,
            pseudo_inverse: pinv,
            condition_number,
            rank,
            warnings,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn transform(&self, values: &[C64]) -> Result<SphericalSpectrum> {
        if values.len() != self.pseudo_inverse.ncols() {
            return Err(Error::Dimension {
                expected: self.pseudo_inverse.ncols(),
                found: values.len(),
            });
        }
        let coeffs = (0..self.pseudo_inverse.nrows())
            .map(|q| {
                self.pseudo_inverse
                    .row(q)
                    .iter()
                    .zip(values)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect();
        SphericalSpectrum::new(self.order, coeffs)
    }
}
