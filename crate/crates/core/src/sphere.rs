//! Directions, sampling grids and Gauss–Legendre quadrature on the unit sphere.

use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::error::{Error, Result};

/// Angular tolerance (radians) under which two grid directions are duplicates.
pub const DUPLICATE_TOLERANCE: f64 = 1e-12;

/// Allowed deviation of a grid's weight sum from the sphere area.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// A direction on the unit sphere: inclination `theta` from +z, azimuth `phi`
/// measured from +x towards +y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    /// Builds a direction, normalizing `phi` into `[0, 2π)`.
    ///
    /// `theta` must lie in `[0, π]`; values overshooting by rounding noise
    /// (below 1e-12) are clamped.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::Domain(format!(
                "non-finite direction (theta={theta}, phi={phi})"
            )));
        }
        let theta = if (-1e-12..0.0).contains(&theta) {
            0.0
        } else if theta > PI && theta <= PI + 1e-12 {
            PI
        } else {
            theta
        };
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::Domain(format!("inclination {theta} outside [0, pi]")));
        }
        Ok(Direction {
            theta,
            phi: normalize_azimuth(phi),
        })
    }

    /// The +z axis.
    pub fn zenith() -> Self {
        Direction { theta: 0.0, phi: 0.0 }
    }

    /// Direction of a nonzero vector.
    pub fn from_vector(v: &Vector3<f64>) -> Result<Self> {
        let r = v.norm();
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain("direction of a zero or non-finite vector".into()));
        }
        let theta = (v.x.hypot(v.y)).atan2(v.z);
        let phi = v.y.atan2(v.x);
        Direction::new(theta, phi)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn unit_vector(&self) -> Vector3<f64> {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Vector3::new(st * cp, st * sp, ct)
    }

    pub fn antipode(&self) -> Self {
        Direction {
            theta: PI - self.theta,
            phi: normalize_azimuth(self.phi + PI),
        }
    }

    /// Great-circle angle to `other`, accurate for nearly coincident directions.
    pub fn angle_to(&self, other: &Direction) -> f64 {
        let a = self.unit_vector();
        let b = other.unit_vector();
        a.cross(&b).norm().atan2(a.dot(&b))
    }
}

fn normalize_azimuth(phi: f64) -> f64 {
    let p = phi.rem_euclid(2.0 * PI);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if p >= 2.0 * PI {
        0.0
    } else {
        p
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes in ascending order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A set of sampling directions with optional quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    directions: Vec<Direction>,
    weights: Option<Vec<f64>>,
}

impl SphereGrid {
    /// Validates and builds a grid.
    ///
    /// Weights, when present, must be nonnegative and sum to 4π within
    /// [`WEIGHT_SUM_TOLERANCE`]. Directions must be pairwise distinct by more
    /// than [`DUPLICATE_TOLERANCE`] radians.
    pub fn new(directions: Vec<Direction>, weights: Option<Vec<f64>>) -> Result<Self> {
        if directions.is_empty() {
            return Err(Error::InvalidGrid("grid has no directions".into()));
        }
        if let Some(w) = &weights {
            if w.len() != directions.len() {
                return Err(Error::InvalidGrid(format!(
                    "{} weights for {} directions",
                    w.len(),
                    directions.len()
                )));
            }
            if let Some(i) = w.iter().position(|&x| !(x >= 0.0) || !x.is_finite()) {
                return Err(Error::InvalidGrid(format!("weight {i} is negative or not finite")));
            }
            let sum: f64 = w.iter().sum();
            if (sum - 4.0 * PI).abs() >= WEIGHT_SUM_TOLERANCE {
                return Err(Error::InvalidGrid(format!(
                    "weights sum to {sum}, expected 4*pi"
                )));
            }
        }
        if let Some((i, j)) = find_duplicate(&directions) {
            return Err(Error::InvalidGrid(format!(
                "directions {i} and {j} coincide"
            )));
        }
        Ok(SphereGrid { directions, weights })
    }

    /// Gauss–Legendre nodes in `cos θ` (`order + 1` rings) times a uniform
    /// azimuth (`2·order + 2` points per ring). Integrates every function
    /// band-limited to `2·order + 1` exactly, hence is exact for products of
    /// two order-`order` functions.
    pub fn gauss_legendre(order: usize) -> Self {
        let (x, w) = gauss_legendre(order + 1);
        let n_phi = 2 * order + 2;
        let dphi = 2.0 * PI / n_phi as f64;
        let mut directions = Vec::with_capacity(x.len() * n_phi);
        let mut weights = Vec::with_capacity(x.len() * n_phi);
        for (xi, wi) in x.iter().zip(&w) {
            let theta = xi.clamp(-1.0, 1.0).acos();
            for j in 0..n_phi {
                directions.push(Direction {
                    theta,
                    phi: j as f64 * dphi,
                });
                weights.push(wi * dphi);
            }
        }
        SphereGrid {
            directions,
            weights: Some(weights),
        }
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Highest order whose coefficient count `(N+1)²` does not exceed the
    /// number of directions.
    pub fn max_supported_order(&self) -> usize {
        let mut n = 0;
        while (n + 2) * (n + 2) <= self.len() {
            n += 1;
        }
        n
    }
}

fn find_duplicate(directions: &[Direction]) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..directions.len()).collect();
    let z: Vec<f64> = directions.iter().map(|d| d.theta.cos()).collect();
    order.sort_by(|&a, &b| z[a].total_cmp(&z[b]));
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[pos + 1..] {
            if z[j] - z[i] > DUPLICATE_TOLERANCE {
                break;
            }
            if directions[i].angle_to(&directions[j]) <= DUPLICATE_TOLERANCE {
                return Some((i.min(j), i.max(j)));
            }
        }
    }
    None
}
