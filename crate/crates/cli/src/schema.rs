//! JSON input formats.

use std::path::Path;

use diffcoh::coherence::SensorPlacement;
use diffcoh::differential::{diff_weights_to_spectrum, DifferentialWeights};
use diffcoh::harmonics::{num_coeffs, AxisymmetricSpectrum, SphericalSpectrum, C64};
use diffcoh::rotation::EulerAngles;
use diffcoh::sphere::{Direction, SphereGrid};
use nalgebra::{DMatrix, Vector3};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A real number or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Real(f64),
    Complex([f64; 2]),
}

impl Number {
    pub fn to_c64(self) -> C64 {
        match self {
            Number::Real(x) => C64::new(x, 0.0),
            Number::Complex([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnalyticKind {
    Omni,
    Dipole,
    Cardioid,
    Subcardioid,
    Hypercardioid,
    Supercardioid,
}

impl AnalyticKind {
    pub fn weights(self) -> Vec<f64> {
        match self {
            AnalyticKind::Omni => vec![1.0],
            AnalyticKind::Dipole => vec![0.0, 1.0],
            AnalyticKind::Cardioid => vec![0.5, 0.5],
            AnalyticKind::Subcardioid => vec![0.7, 0.3],
            AnalyticKind::Hypercardioid => vec![0.25, 0.75],
            AnalyticKind::Supercardioid => {
                let a = (3f64.sqrt() - 1.0) / 2.0;
                vec![a, 1.0 - a]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum Pattern {
    Analytic { kind: AnalyticKind },
    Differential { weights: Vec<f64> },
    Axisymmetric { coeffs: Vec<Number> },
    Spectrum { order: usize, coeffs: Vec<Number> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Orientation {
    pub theta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Euler {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorSpec {
    pub pattern: Pattern,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<Orientation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler: Option<Euler>,
    pub position: Position,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairFile {
    pub sensors: Vec<SensorSpec>,
    #[serde(default)]
    pub sound_speed: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// `[theta, phi]` per point.
    pub directions: Vec<[f64; 2]>,
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementSet {
    pub frequencies: Vec<f64>,
    pub grid: GridSpec,
    /// Per frequency, `|grid|` rows of `Q` complex entries.
    pub responses: Vec<Vec<Vec<Number>>>,
    #[serde(default)]
    pub enclosing_radius: Option<f64>,
    #[serde(default)]
    pub sound_speed: Option<f64>,
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn angle(x: f64, degrees: bool) -> f64 {
    if degrees {
        x.to_radians()
    } else {
        x
    }
}

fn field_error(field: &str, err: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{field}: {err}"))
}

impl SensorSpec {
    /// Spectrum in the array frame and position, with angles in degrees if
    /// `degrees` is set. `field` prefixes diagnostics.
    pub fn placement(&self, degrees: bool, field: &str) -> Result<SensorPlacement, CliError> {
        if self.orientation.is_some() && self.euler.is_some() {
            return Err(field_error(field, "give either orientation or euler, not both"));
        }
        let orientation = self
            .orientation
            .map(|o| Direction::new(angle(o.theta, degrees), angle(o.phi, degrees)))
            .transpose()
            .map_err(|e| field_error(&format!("{field}.orientation"), e))?;
        let euler = self
            .euler
            .map(|e| EulerAngles::new(angle(e.alpha, degrees), angle(e.beta, degrees), angle(e.gamma, degrees)))
            .transpose()
            .map_err(|e| field_error(&format!("{field}.euler"), e))?;

        let axisymmetric = |axi: AxisymmetricSpectrum| match (orientation, euler) {
            (Some(dir), _) => axi.steer(&dir),
            (None, Some(angles)) => axi.to_spectrum().rotated(&angles),
            (None, None) => axi.to_spectrum(),
        };
        let pattern_field = format!("{field}.pattern");
        let spectrum = match &self.pattern {
            Pattern::Analytic { kind } => {
                let w = DifferentialWeights::new(kind.weights()).map_err(|e| field_error(&pattern_field, e))?;
                axisymmetric(diff_weights_to_spectrum(&w).map_err(|e| field_error(&pattern_field, e))?)
            }
            Pattern::Differential { weights } => {
                let w = DifferentialWeights::new(weights.clone()).map_err(|e| field_error(&pattern_field, e))?;
                axisymmetric(diff_weights_to_spectrum(&w).map_err(|e| field_error(&pattern_field, e))?)
            }
            Pattern::Axisymmetric { coeffs } => {
                let axi = AxisymmetricSpectrum::new(coeffs.iter().map(|c| c.to_c64()).collect())
                    .map_err(|e| field_error(&pattern_field, e))?;
                axisymmetric(axi)
            }
            Pattern::Spectrum { order, coeffs } => {
                if coeffs.len() != num_coeffs(*order) {
                    return Err(field_error(
                        &format!("{pattern_field}.spectrum.coeffs"),
                        format!("order {order} needs {} coefficients, found {}", num_coeffs(*order), coeffs.len()),
                    ));
                }
                let spec = SphericalSpectrum::new(*order, coeffs.iter().map(|c| c.to_c64()).collect())
                    .map_err(|e| field_error(&pattern_field, e))?;
                match (orientation, euler) {
                    (Some(dir), _) => spec.rotated(&EulerAngles::pointing(&dir)),
                    (None, Some(angles)) => spec.rotated(&angles),
                    (None, None) => spec,
                }
            }
        };
        if spectrum.coeffs().iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(field_error(&pattern_field, "non-finite coefficient"));
        }
        let p = self.position;
        if ![p.x, p.y, p.z].iter().all(|v| v.is_finite()) {
            return Err(field_error(&format!("{field}.position"), "non-finite coordinate"));
        }
        Ok(SensorPlacement::new(spectrum, Vector3::new(p.x, p.y, p.z)))
    }
}

impl MeasurementSet {
    pub fn grid(&self, degrees: bool) -> Result<SphereGrid, CliError> {
        if self.grid.directions.len() < 4 {
            return Err(field_error("grid.directions", format!("need at least 4 points, found {}", self.grid.directions.len())));
        }
        let dirs = self
            .grid
            .directions
            .iter()
            .enumerate()
            .map(|(i, [t, p])| Direction::new(angle(*t, degrees), angle(*p, degrees)).map_err(|e| field_error(&format!("grid.directions[{i}]"), e)))
            .collect::<Result<Vec<_>, _>>()?;
        SphereGrid::new(dirs, self.grid.weights.clone()).map_err(|e| field_error("grid", e))
    }

    /// Response matrices (`|grid| × Q`), one per frequency.
    pub fn response_matrices(&self) -> Result<Vec<DMatrix<C64>>, CliError> {
        if self.frequencies.is_empty() {
            return Err(field_error("frequencies", "empty frequency list"));
        }
        if let Some((i, f)) = self.frequencies.iter().enumerate().find(|(_, f)| !f.is_finite() || **f < 0.0) {
            return Err(field_error(&format!("frequencies[{i}]"), format!("invalid frequency {f}")));
        }
        if self.responses.len() != self.frequencies.len() {
            return Err(field_error(
                "responses",
                format!("{} frequencies but {} response matrices", self.frequencies.len(), self.responses.len()),
            ));
        }
        let rows = self.grid.directions.len();
        let cols = self.responses.first().and_then(|m| m.first()).map_or(0, Vec::len);
        if cols == 0 {
            return Err(field_error("responses", "no sensors"));
        }
        self.responses
            .iter()
            .enumerate()
            .map(|(f, m)| {
                if m.len() != rows {
                    return Err(field_error(&format!("responses[{f}]"), format!("expected {rows} rows, found {}", m.len())));
                }
                if let Some((r, row)) = m.iter().enumerate().find(|(_, row)| row.len() != cols) {
                    return Err(field_error(&format!("responses[{f}][{r}]"), format!("expected {cols} sensors, found {}", row.len())));
                }
                Ok(DMatrix::from_fn(rows, cols, |r, c| m[r][c].to_c64()))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sensor(json: &str) -> Result<SensorSpec, serde_json::Error> {
        serde_json::from_str(json)
    }

    #[test]
    fn parses_variants() {
        let s = sensor(r#"{"pattern":{"analytic":{"kind":"cardioid"}},"orientation":{"theta":0,"phi":0},"position":{"x":0,"y":0,"z":0}}"#).unwrap();
        let p = s.placement(false, "sensors[0]").unwrap();
        assert!((p.spectrum.coeffs()[0].re - 0.5 * (4.0 * std::f64::consts::PI).sqrt()).abs() < 1e-15);
        let s = sensor(r#"{"pattern":{"spectrum":{"order":1,"coeffs":[1,[0,1],0,0]}},"position":{"x":1,"y":2,"z":3}}"#).unwrap();
        let p = s.placement(false, "s").unwrap();
        assert_eq!(p.spectrum.coeffs()[1], C64::new(0.0, 1.0));
        assert_eq!(p.position, Vector3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(sensor(r#"{"pattern":{"analytic":{"kind":"omni"}},"position":{"x":0,"y":0,"z":0},"colour":1}"#).is_err());
        assert!(sensor(r#"{"pattern":{"analytic":{"kind":"omni"},"differential":{"weights":[1]}},"position":{"x":0,"y":0,"z":0}}"#).is_err());
        assert!(sensor(r#"{"pattern":{"analytic":{"kind":"omni"}}}"#).is_err());
        let s = sensor(r#"{"pattern":{"spectrum":{"order":1,"coeffs":[1,0]}},"position":{"x":0,"y":0,"z":0}}"#).unwrap();
        assert!(s.placement(false, "s").unwrap_err().to_string().contains("needs 4 coefficients"));
        let s = sensor(
            r#"{"pattern":{"analytic":{"kind":"omni"}},"orientation":{"theta":0,"phi":0},"euler":{"alpha":0,"beta":0,"gamma":0},"position":{"x":0,"y":0,"z":0}}"#,
        )
        .unwrap();
        assert!(s.placement(false, "s").is_err());
    }

    #[test]
    fn degrees_and_radians_agree() {
        let rad = sensor(r#"{"pattern":{"analytic":{"kind":"dipole"}},"orientation":{"theta":1.5707963267948966,"phi":0},"position":{"x":0,"y":0,"z":0}}"#).unwrap();
        let deg = sensor(r#"{"pattern":{"analytic":{"kind":"dipole"}},"orientation":{"theta":90,"phi":0},"position":{"x":0,"y":0,"z":0}}"#).unwrap();
        let a = rad.placement(false, "s").unwrap().spectrum;
        let b = deg.placement(true, "s").unwrap().spectrum;
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn euler_and_orientation_agree_for_axisymmetric() {
        let o = sensor(r#"{"pattern":{"differential":{"weights":[0.25,0.25,0.5]}},"orientation":{"theta":0.7,"phi":2.0},"position":{"x":0,"y":0,"z":0}}"#).unwrap();
        let e = sensor(r#"{"pattern":{"differential":{"weights":[0.25,0.25,0.5]}},"euler":{"alpha":2.0,"beta":0.7,"gamma":0.3},"position":{"x":0,"y":0,"z":0}}"#).unwrap();
        let a = o.placement(false, "s").unwrap().spectrum;
        let b = e.placement(false, "s").unwrap().spectrum;
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn measurement_dimension_checks() {
        let base = |responses: &str| {
            serde_json::from_str::<MeasurementSet>(&format!(
                r#"{{"frequencies":[100],"grid":{{"directions":[[0.1,0],[1,1],[2,2],[3,3]]}},"responses":{responses}}}"#
            ))
            .unwrap()
        };
        assert!(base("[[[1],[1],[1],[1]]]").response_matrices().is_ok());
        assert!(base("[[[1],[1],[1]]]").response_matrices().is_err());
        assert!(base("[[[1],[1],[1],[1,2]]]").response_matrices().is_err());
        assert!(base("[[[1],[1],[1],[1]],[[1],[1],[1],[1]]]").response_matrices().is_err());
        let m = base("[[[1],[1],[1],[1]]]");
        assert_eq!(m.grid(false).unwrap().len(), 4);
    }
}
