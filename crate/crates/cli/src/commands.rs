use std::f64::consts::PI;
use std::fmt::Write;
use std::path::Path;

use diffcoh::coherence::{array_coherence_matrix, array_spectra_from_measurements, coherence_sweep, suggested_order};
use diffcoh::differential::{diff_weights_to_spectrum, DifferentialWeights};
use diffcoh::error::Error;
use diffcoh::harmonics::C64;
use diffcoh::par::{map_indexed, Execution};
use diffcoh::sphere::Direction;
use diffcoh::validation::{run_suite, Suite, SuiteReport};
use serde::Serialize;

use crate::schema::{read_json, MeasurementSet, Number, Orientation, PairFile, Pattern, Position, SensorSpec};
use crate::{CliError, DEFAULT_SOUND_SPEED};

/// Parses `start:step:stop` (inclusive) or a comma-separated list.
pub fn parse_frequencies(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |msg: String| CliError::Usage(format!("--freqs: {msg}"));
    let number = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(format!("'{s}': {e}")));
    let freqs = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("range must be start:step:stop".into()));
        }
        let (start, step, stop) = (number(parts[0])?, number(parts[1])?, number(parts[2])?);
        if !(step > 0.0) || stop < start {
            return Err(bad("range needs step > 0 and stop >= start".into()));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| start + i as f64 * step).collect()
    } else {
        text.split(',').filter(|s| !s.trim().is_empty()).map(number).collect::<Result<Vec<_>, _>>()?
    };
    if freqs.is_empty() {
        return Err(bad("empty frequency list".into()));
    }
    if let Some(f) = freqs.iter().find(|f| !f.is_finite() || **f < 0.0) {
        return Err(bad(format!("invalid frequency {f}")));
    }
    Ok(freqs)
}

fn sound_speed(flag: Option<f64>, file: Option<f64>) -> Result<f64, CliError> {
    let c = flag.or(file).unwrap_or(DEFAULT_SOUND_SPEED);
    if !(c > 0.0) || !c.is_finite() {
        return Err(CliError::Usage(format!("sound speed must be positive, got {c}")));
    }
    Ok(c)
}

/// Fixed scientific formatting with 12 significant digits.
fn sci(x: f64) -> String {
    format!("{x:.11e}")
}

fn round12(x: f64) -> f64 {
    sci(x).parse().expect("formatted float parses")
}

pub fn pair(spec: &Path, freqs: &str, c_flag: Option<f64>, degrees: bool) -> Result<String, CliError> {
    let file: PairFile = read_json(spec)?;
    if file.sensors.len() != 2 {
        return Err(CliError::Usage(format!("{}: sensors: expected 2 entries, found {}", spec.display(), file.sensors.len())));
    }
    let f = file.sensors[0].placement(degrees, "sensors[0]")?;
    let g = file.sensors[1].placement(degrees, "sensors[1]")?;
    let freqs = parse_frequencies(freqs)?;
    let c = sound_speed(c_flag, file.sound_speed)?;
    let rows = coherence_sweep(&f, &g, &freqs, c, Execution::default())?;
    let mut out = String::from("frequency_hz,kd,re_gamma,im_gamma,abs_gamma\n");
    for (freq, r) in freqs.iter().zip(rows) {
        writeln!(out, "{},{},{},{},{}", sci(*freq), sci(r.kd), sci(r.gamma.re), sci(r.gamma.im), sci(r.gamma.norm()))
            .expect("writing to a string");
    }
    Ok(out)
}

#[derive(Serialize)]
struct FrequencyMatrix {
    frequency_hz: f64,
    condition_number: Option<f64>,
    min_eigenvalue: f64,
    warnings: Vec<String>,
    gamma_re: Vec<Vec<f64>>,
    gamma_im: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct ArrayOutput {
    order: usize,
    sensors: usize,
    grid_points: usize,
    sound_speed: f64,
    warnings: Vec<String>,
    frequencies: Vec<FrequencyMatrix>,
}

pub fn array(meas: &Path, order_flag: Option<usize>, c_flag: Option<f64>, degrees: bool) -> Result<String, CliError> {
    let set: MeasurementSet = read_json(meas)?;
    let grid = set.grid(degrees)?;
    let matrices = set.response_matrices()?;
    let c = sound_speed(c_flag, set.sound_speed)?;
    let mut warnings = Vec::new();
    let order = match (order_flag, set.enclosing_radius) {
        (Some(n), _) => n,
        (None, Some(radius)) => {
            let f_max = set.frequencies.iter().copied().fold(0.0, f64::max);
            suggested_order(2.0 * PI * f_max / c, radius)?.order
        }
        (None, None) => {
            warnings.push("no enclosing_radius given; using the grid's largest supported order".to_string());
            grid.max_supported_order()
        }
    };
    let results = map_indexed(Execution::default(), matrices.len(), |i| {
        let spectra = array_spectra_from_measurements(&matrices[i], &grid, order)?;
        let gamma = array_coherence_matrix(&spectra)?;
        Ok::<_, Error>((spectra, gamma))
    });
    let mut frequencies = Vec::with_capacity(results.len());
    for (freq, result) in set.frequencies.iter().zip(results) {
        let (spectra, gamma) = result.map_err(|e| match e {
            Error::Underdetermined { order, required, available } => CliError::Usage(format!(
                "order {order} needs at least (N+1)^2 = {required} measurement directions, the grid has {available}"
            )),
            other => CliError::Numerical(other),
        })?;
        let q = gamma.nrows();
        frequencies.push(FrequencyMatrix {
            frequency_hz: *freq,
            condition_number: spectra.condition_number.map(round12),
            min_eigenvalue: round12(diffcoh::coherence::min_eigenvalue(&gamma)),
            warnings: spectra.warnings.clone(),
            gamma_re: (0..q).map(|r| (0..q).map(|c| round12(gamma[(r, c)].re)).collect()).collect(),
            gamma_im: (0..q).map(|r| (0..q).map(|c| round12(gamma[(r, c)].im)).collect()).collect(),
        });
    }
    let output = ArrayOutput {
        order,
        sensors: matrices[0].ncols(),
        grid_points: grid.len(),
        sound_speed: c,
        warnings,
        frequencies,
    };
    Ok(serde_json::to_string_pretty(&output).expect("serializable") + "\n")
}

#[derive(Serialize)]
struct DiffPatternOutput {
    weights: Vec<f64>,
    normalized: bool,
    axisymmetric: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    orientation: Option<Orientation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spectrum: Option<Vec<[f64; 2]>>,
    /// Ready to use as a sensor entry.
    sensor: SensorSpec,
}

fn pairs(coeffs: &[C64]) -> Vec<[f64; 2]> {
    coeffs.iter().map(|c| [c.re, c.im]).collect()
}

pub fn diffpattern(weights: Vec<f64>, orient: Option<Vec<f64>>, degrees: bool) -> Result<String, CliError> {
    let w = DifferentialWeights::new(weights.clone()).map_err(|e| CliError::Usage(format!("--weights: {e}")))?;
    let axi = diff_weights_to_spectrum(&w)?;
    let orientation = match orient.as_deref() {
        None => None,
        Some(&[theta, phi]) => {
            let (theta, phi) = if degrees { (theta.to_radians(), phi.to_radians()) } else { (theta, phi) };
            Direction::new(theta, phi).map_err(|e| CliError::Usage(format!("--orient: {e}")))?;
            Some(Orientation { theta, phi })
        }
        Some(_) => return Err(CliError::Usage("--orient expects theta,phi".into())),
    };
    let spectrum = orientation.map(|o| {
        let dir = Direction::new(o.theta, o.phi).expect("validated above");
        axi.steer(&dir)
    });
    let pattern = match &spectrum {
        Some(s) => Pattern::Spectrum { order: s.order(), coeffs: s.coeffs().iter().map(|c| Number::Complex([c.re, c.im])).collect() },
        None => Pattern::Axisymmetric { coeffs: axi.coeffs().iter().map(|c| Number::Complex([c.re, c.im])).collect() },
    };
    let output = DiffPatternOutput {
        normalized: w.is_normalized(),
        weights,
        axisymmetric: pairs(axi.coeffs()),
        orientation,
        spectrum: spectrum.as_ref().map(|s| pairs(s.coeffs())),
        sensor: SensorSpec { pattern, orientation: None, euler: None, position: Position { x: 0.0, y: 0.0, z: 0.0 } },
    };
    Ok(serde_json::to_string_pretty(&output).expect("serializable") + "\n")
}

pub fn validate(suite: &str, seed: u64) -> Result<SuiteReport, CliError> {
    let suite: Suite = suite.parse().map_err(|e: Error| CliError::Usage(e.to_string()))?;
    Ok(run_suite(suite, seed, Execution::default())?)
}
