//! Scenario evaluation, parameter sweeps and root finding for the maximum
//! secure distance and maximum operating temperature.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{self, ArraySpec, ChannelSpectrum, PathSpec};
use crate::error::{domain, Error, Result};
use crate::keyrate::{self, RateBreakdown, ThresholdReport, ZetaConstant};
use crate::physics::{self, Environment, NoiseBudget};
use crate::roots::{bisect, Bisection};

/// Distance search bracket, meters.
pub const DISTANCE_BRACKET: (f64, f64) = (0.1, 100_000.0);
pub const DISTANCE_TOL: f64 = 0.5;
/// Temperature search bracket, kelvin.
pub const TEMPERATURE_BRACKET: (f64, f64) = (0.1, 300.0);
pub const TEMPERATURE_TOL: f64 = 0.01;
pub const MAX_ITERATIONS: usize = 200;
/// Default target secret key rate, bits per channel use.
pub const DEFAULT_TARGET_RATE: f64 = 1e-5;

/// Per-element antenna gain, in dBi or as a linear factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementGain {
    Dbi(f64),
    Linear(f64),
}

impl ElementGain {
    pub fn linear(self) -> f64 {
        match self {
            ElementGain::Dbi(db) => channel::dbi_to_linear(db),
            ElementGain::Linear(g) => g,
        }
    }
}

impl Default for ElementGain {
    fn default() -> Self {
        ElementGain::Dbi(30.0)
    }
}

/// One physical link configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Carrier frequency, Hz.
    pub frequency: f64,
    /// Ambient temperature, K.
    pub temperature: f64,
    /// Link distance, m.
    pub distance: f64,
    /// Atmospheric absorption, dB/km.
    pub absorption: f64,
    pub tx_elements: usize,
    pub rx_elements: usize,
    pub element_gain: ElementGain,
    /// V_a, SNU.
    pub alice_variance: f64,
    /// W, SNU.
    pub eve_variance: f64,
    pub spacing_over_wavelength: f64,
    /// Angle of departure, radians.
    pub aod: f64,
    /// Angle of arrival, radians.
    pub aoa: f64,
    /// Path delay, seconds.
    pub delay: f64,
    pub zeta_constant: ZetaConstant,
}

impl Scenario {
    /// A link with the reference defaults: 30 dBi elements, V_a = 1000, W = 1,
    /// quarter-wavelength spacing, broadside LOS path.
    pub fn new(
        frequency: f64,
        temperature: f64,
        distance: f64,
        absorption: f64,
        tx_elements: usize,
        rx_elements: usize,
    ) -> Self {
        Self {
            frequency,
            temperature,
            distance,
            absorption,
            tx_elements,
            rx_elements,
            element_gain: ElementGain::default(),
            alice_variance: 1000.0,
            eve_variance: 1.0,
            spacing_over_wavelength: ArraySpec::DEFAULT_SPACING,
            aod: 0.0,
            aoa: 0.0,
            delay: 0.0,
            zeta_constant: ZetaConstant::Literal,
        }
    }

    pub fn with_distance(&self, distance: f64) -> Self {
        Self {
            distance,
            ..self.clone()
        }
    }

    pub fn with_temperature(&self, temperature: f64) -> Self {
        Self {
            temperature,
            ..self.clone()
        }
    }

    pub fn with_arrays(&self, tx_elements: usize, rx_elements: usize) -> Self {
        Self {
            tx_elements,
            rx_elements,
            ..self.clone()
        }
    }

    /// Checks every field invariant except modulation feasibility, which
    /// [`evaluate`] reports separately.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("frequency", self.frequency),
            ("temperature", self.temperature),
            ("distance", self.distance),
            ("spacing_over_wavelength", self.spacing_over_wavelength),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.absorption >= 0.0) || !self.absorption.is_finite() {
            return Err(domain(format!(
                "absorption must be >= 0, got {}",
                self.absorption
            )));
        }
        if self.tx_elements == 0 || self.rx_elements == 0 {
            return Err(domain("antenna counts must be >= 1"));
        }
        let g = self.element_gain.linear();
        if !(g > 0.0) || !g.is_finite() {
            return Err(domain(format!("element gain must be positive, got {g}")));
        }
        if !(self.alice_variance > 1.0) || !self.alice_variance.is_finite() {
            return Err(domain(format!(
                "alice variance must exceed 1, got {}",
                self.alice_variance
            )));
        }
        if !(self.eve_variance >= 1.0) || !self.eve_variance.is_finite() {
            return Err(domain(format!(
                "eve variance must be >= 1, got {}",
                self.eve_variance
            )));
        }
        if !(self.aod.is_finite() && self.aoa.is_finite() && self.delay.is_finite()) {
            return Err(domain("angles and delay must be finite"));
        }
        Ok(())
    }

    fn arrays(&self) -> Result<(ArraySpec, ArraySpec)> {
        let g = self.element_gain.linear();
        Ok((
            ArraySpec::new(self.tx_elements, g, self.spacing_over_wavelength)?,
            ArraySpec::new(self.rx_elements, g, self.spacing_over_wavelength)?,
        ))
    }

    /// Noise budget, failing with [`Error::InfeasibleModulation`] when V_a ≤ V_0.
    pub fn noise_budget(&self) -> Result<NoiseBudget> {
        let env = Environment::new(self.frequency, self.temperature)?;
        let budget = NoiseBudget::new(&env, self.alice_variance, self.eve_variance)?;
        if !(budget.signal_variance > 0.0) {
            return Err(Error::InfeasibleModulation {
                alice: self.alice_variance,
                thermal: budget.thermal_variance,
            });
        }
        Ok(budget)
    }

    /// Raw (unclamped) power gain γ of the LOS path.
    pub fn path_gain(&self) -> Result<f64> {
        let (tx, rx) = self.arrays()?;
        channel::path_loss(self.frequency, self.distance, self.absorption, &tx, &rx)
    }

    pub fn spectrum(&self) -> Result<ChannelSpectrum> {
        let (tx, rx) = self.arrays()?;
        let gamma = channel::path_loss(self.frequency, self.distance, self.absorption, &tx, &rx)?;
        if gamma == 0.0 {
            return Err(Error::DegenerateChannel(format!(
                "path gain underflows at {} m",
                self.distance
            )));
        }
        let path = PathSpec::new(gamma, self.delay, self.aod, self.aoa)?;
        channel::path_spectrum(&[path], self.frequency, &tx, &rx)
    }
}

/// Everything computed for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub noise: NoiseBudget,
    pub path_gain: f64,
    pub transmissivities: Vec<f64>,
    pub clamped: bool,
    pub rate: RateBreakdown,
    pub threshold: ThresholdReport,
    /// ζ tr(H†H) - r h(W).
    pub asymptotic_rate: f64,
    /// Bob's received shot-noise level on each parallel channel.
    pub bob_variances: Vec<f64>,
}

pub fn evaluate(s: &Scenario) -> Result<Evaluation> {
    s.validate()?;
    let noise = s.noise_budget()?;
    let path_gain = s.path_gain()?;
    let spectrum = s.spectrum()?;
    let (va, v0, w) = (
        noise.alice_variance,
        noise.thermal_variance,
        noise.eve_variance,
    );
    let rate = keyrate::mimo_key_rate(&spectrum, va, v0, w)?;
    let zeta = keyrate::zeta_with(s.zeta_constant, noise.signal_variance, va, w)?;
    let threshold = keyrate::security_threshold(&spectrum, zeta, w)?;
    let asymptotic_rate = keyrate::asymptotic_rate(spectrum.trace(), spectrum.rank(), zeta, w)?;
    let bob_variances = spectrum
        .transmissivities()
        .iter()
        .map(|&t| noise.bob_variance(t))
        .collect::<Result<Vec<_>>>()?;
    Ok(Evaluation {
        noise,
        path_gain,
        transmissivities: spectrum.transmissivities().to_vec(),
        clamped: spectrum.clamped,
        rate,
        threshold,
        asymptotic_rate,
        bob_variances,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub x: f64,
    /// `None` when the point could not be evaluated.
    pub rate: Option<f64>,
    pub secure: bool,
    pub error: Option<String>,
}

/// Key rate sampled along one swept parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCurve {
    pub parameter: String,
    pub unit: String,
    pub samples: Vec<CurveSample>,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(domain("grid is empty"));
    }
    if grid.iter().any(|x| !x.is_finite()) || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain("grid must be finite and strictly increasing"));
    }
    Ok(())
}

/// Evaluates `s` at every distance of `grid`; failing points are flagged, not fatal.
pub fn rate_vs_distance(s: &Scenario, grid: &[f64]) -> Result<RateCurve> {
    check_grid(grid)?;
    let samples = grid
        .par_iter()
        .map(|&d| match evaluate(&s.with_distance(d)) {
            Ok(e) => CurveSample {
                x: d,
                rate: Some(e.rate.rate),
                secure: e.rate.rate > 0.0,
                error: None,
            },
            Err(err) => CurveSample {
                x: d,
                rate: None,
                secure: false,
                error: Some(err.to_string()),
            },
        })
        .collect();
    Ok(RateCurve {
        parameter: "distance".into(),
        unit: "m".into(),
        samples,
    })
}

/// Largest distance at which the exact key rate still reaches `target_rate`.
pub fn max_secure_distance(s: &Scenario, target_rate: f64) -> Result<Bisection> {
    if !target_rate.is_finite() {
        return Err(domain("target rate must be finite"));
    }
    let (lo, hi) = DISTANCE_BRACKET;
    // A link attenuated below f64 range carries no key.
    let excess = |d: f64| -> Result<f64> {
        match evaluate(&s.with_distance(d)) {
            Ok(e) => Ok(e.rate.rate - target_rate),
            Err(Error::DegenerateChannel(_)) if d > lo => Ok(-target_rate),
            Err(e) => Err(e),
        }
    };
    let at_lo = excess(lo)?;
    if !(at_lo > 0.0) {
        return Err(Error::NoneAchievable(format!(
            "key rate {} at {lo} m does not exceed target {target_rate}",
            at_lo + target_rate
        )));
    }
    if excess(hi)? > 0.0 {
        return Err(Error::BracketExceeded(format!(
            "target {target_rate} still met at {hi} m"
        )));
    }
    // Feasibility and shape were established at the bracket ends and do not depend on distance.
    Ok(bisect(
        |d| excess(d).expect("validated scenario"),
        lo,
        hi,
        DISTANCE_TOL,
        MAX_ITERATIONS,
    ))
}

/// ζ as a function of frequency and temperature for fixed V_a, W.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaModel {
    pub alice_variance: f64,
    pub eve_variance: f64,
    pub constant: ZetaConstant,
}

impl Default for ZetaModel {
    fn default() -> Self {
        Self {
            alice_variance: 1000.0,
            eve_variance: 1.0,
            constant: ZetaConstant::Literal,
        }
    }
}

impl ZetaModel {
    /// ζ with V_s = V_a - V_0. V_s is allowed to go negative here so the
    /// function stays monotone across the infeasible region.
    pub fn zeta_at(&self, frequency: f64, temperature: f64) -> Result<f64> {
        let n = physics::mean_thermal_photons_at(frequency, temperature)?;
        let v0 = physics::thermal_variance(n)?;
        keyrate::zeta_with(
            self.constant,
            self.alice_variance - v0,
            self.alice_variance,
            self.eve_variance,
        )
    }
}

/// Highest temperature at which ζ still exceeds `alpha` (α = 0 for W = 1).
pub fn max_operating_temperature(
    model: &ZetaModel,
    frequency: f64,
    alpha: f64,
) -> Result<Bisection> {
    let (lo, hi) = TEMPERATURE_BRACKET;
    let margin = |t: f64| -> Result<f64> { Ok(model.zeta_at(frequency, t)? - alpha) };
    if !(margin(lo)? > 0.0) {
        return Err(Error::NoneAchievable(format!(
            "ζ does not exceed α = {alpha} even at {lo} K"
        )));
    }
    if margin(hi)? > 0.0 {
        return Err(Error::BracketExceeded(format!(
            "ζ still exceeds α = {alpha} at {hi} K"
        )));
    }
    Ok(bisect(
        |t| margin(t).expect("validated inputs"),
        lo,
        hi,
        TEMPERATURE_TOL,
        MAX_ITERATIONS,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaCurve {
    /// Hz.
    pub frequency: f64,
    /// (temperature K, ζ).
    pub samples: Vec<(f64, f64)>,
}

pub fn zeta_vs_temperature(
    model: &ZetaModel,
    frequencies: &[f64],
    temperatures: &[f64],
) -> Result<Vec<ZetaCurve>> {
    check_grid(temperatures)?;
    frequencies
        .par_iter()
        .map(|&f| {
            let samples = temperatures
                .iter()
                .map(|&t| Ok((t, model.zeta_at(f, t)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(ZetaCurve {
                frequency: f,
                samples,
            })
        })
        .collect()
}

/// Frequency-dependent atmospheric absorption, linearly interpolated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionTable {
    /// (frequency GHz, attenuation dB/km), frequencies strictly increasing.
    rows: Vec<(f64, f64)>,
}

pub const ABSORPTION_HEADER: [&str; 2] = ["frequency_ghz", "attenuation_db_per_km"];

const BUILTIN_ABSORPTION: [(f64, f64); 10] = [
    (100.0, 0.4),
    (200.0, 3.0),
    (300.0, 4.0),
    (400.0, 20.0),
    (500.0, 50.0),
    (600.0, 150.0),
    (700.0, 70.0),
    (800.0, 100.0),
    (900.0, 100.0),
    (1000.0, 100.0),
];

impl AbsorptionTable {
    /// The ten-point 100 GHz – 1 THz table shipped with the crate.
    pub fn builtin() -> Self {
        Self {
            rows: BUILTIN_ABSORPTION.to_vec(),
        }
    }

    /// Validates rows; `row` numbers in errors are 1-based data rows.
    pub fn from_rows(rows: Vec<(f64, f64)>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Format {
                row: 0,
                message: "table has no rows".into(),
            });
        }
        for (i, &(f, a)) in rows.iter().enumerate() {
            let row = i + 1;
            if !(f > 0.0) || !f.is_finite() {
                return Err(Error::Format {
                    row,
                    message: format!("frequency must be positive, got {f}"),
                });
            }
            if !(a >= 0.0) || !a.is_finite() {
                return Err(Error::Format {
                    row,
                    message: format!("attenuation must be >= 0, got {a}"),
                });
            }
            if i > 0 && !(f > rows[i - 1].0) {
                return Err(Error::Format {
                    row,
                    message: format!("frequency {f} not above previous {}", rows[i - 1].0),
                });
            }
        }
        Ok(Self { rows })
    }

    /// Parses `frequency_ghz,attenuation_db_per_km` rows after a one-line header.
    /// Error rows count from the header (row 1).
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| Error::Format {
            row: 1,
            message: e.to_string(),
        })?;
        if headers.is_empty() || headers.iter().collect::<Vec<_>>() != ABSORPTION_HEADER {
            return Err(Error::Format {
                row: 1,
                message: format!("expected header `{}`", ABSORPTION_HEADER.join(",")),
            });
        }
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let row = i + 2;
            let record = record.map_err(|e| Error::Format {
                row,
                message: e.to_string(),
            })?;
            if record.len() != 2 {
                return Err(Error::Format {
                    row,
                    message: format!("expected 2 fields, got {}", record.len()),
                });
            }
            let parse = |field: &str| -> Result<f64> {
                field.parse().map_err(|_| Error::Format {
                    row,
                    message: format!("not a number: `{field}`"),
                })
            };
            rows.push((parse(&record[0])?, parse(&record[1])?));
        }
        Self::from_rows(rows).map_err(|e| match e {
            Error::Format { row, message } if row > 0 => Error::Format {
                row: row + 1,
                message,
            },
            other => other,
        })
    }

    pub fn rows(&self) -> &[(f64, f64)] {
        &self.rows
    }

    /// Attenuation at `frequency` (Hz), dB/km. No extrapolation.
    pub fn at(&self, frequency: f64) -> Result<f64> {
        let ghz = frequency / 1e9;
        let (min, max) = (self.rows[0].0, self.rows[self.rows.len() - 1].0);
        if !(ghz >= min && ghz <= max) {
            return Err(Error::OutOfRange {
                frequency_ghz: ghz,
                min_ghz: min,
                max_ghz: max,
            });
        }
        if let Some(&(_, a)) = self.rows.iter().find(|(f, _)| *f == ghz) {
            return Ok(a);
        }
        let k = self.rows.partition_point(|(f, _)| *f < ghz);
        let (f0, a0) = self.rows[k - 1];
        let (f1, a1) = self.rows[k];
        Ok(a0 + (a1 - a0) * (ghz - f0) / (f1 - f0))
    }
}

pub fn load_absorption_table(source: &str) -> Result<AbsorptionTable> {
    AbsorptionTable::parse_csv(source)
}

pub fn absorption_at(table: &AbsorptionTable, frequency: f64) -> Result<f64> {
    table.at(frequency)
}

/// Published operating limits of a 32×32 array: (GHz, dB/km, T_max K, distance m).
pub const PUBLISHED_LIMITS: [(f64, f64, u32, f64); 10] = [
    (100.0, 0.4, 4, 700.0),
    (200.0, 3.0, 8, 320.0),
    (300.0, 4.0, 13, 75.0),
    (400.0, 20.0, 17, 86.0),
    (500.0, 50.0, 21, 68.0),
    (600.0, 150.0, 26, 26.0),
    (700.0, 70.0, 30, 38.0),
    (800.0, 100.0, 35, 36.0),
    (900.0, 100.0, 39, 25.0),
    (1000.0, 100.0, 43, 21.0),
];

/// Maximum operating temperature and the secure distance there, for one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitRow {
    pub frequency_ghz: f64,
    pub absorption_db_per_km: f64,
    /// Continuous ζ = α crossing, K.
    pub crossing_temperature: f64,
    /// Integer floor of the crossing, K.
    pub max_temperature: f64,
    /// Maximum secure distance at `max_temperature`.
    pub max_distance: Result<Bisection>,
}

/// For every table frequency: the temperature limit from ζ and the maximum
/// secure distance of `template` (arrays, gain, V_a, W) at the floored limit.
/// Absorption comes from `table`; `template`'s frequency, temperature and
/// absorption are replaced.
pub fn operating_limits(
    table: &AbsorptionTable,
    template: &Scenario,
    target_rate: f64,
) -> Result<Vec<LimitRow>> {
    let model = ZetaModel {
        alice_variance: template.alice_variance,
        eve_variance: template.eve_variance,
        constant: template.zeta_constant,
    };
    table
        .rows()
        .par_iter()
        .map(|&(ghz, absorption)| {
            let frequency = ghz * 1e9;
            let base = Scenario {
                frequency,
                absorption,
                ..template.clone()
            };
            let alpha = threshold_alpha(&base)?;
            let crossing = max_operating_temperature(&model, frequency, alpha)?.root;
            let max_temperature = crossing.floor();
            let max_distance = if max_temperature > 0.0 {
                max_secure_distance(&base.with_temperature(max_temperature), target_rate)
            } else {
                Err(Error::NoneAchievable(format!(
                    "limit {crossing} K floors to 0 K"
                )))
            };
            Ok(LimitRow {
                frequency_ghz: ghz,
                absorption_db_per_km: absorption,
                crossing_temperature: crossing,
                max_temperature,
                max_distance,
            })
        })
        .collect()
}

/// α = r h(W) / tr(H†H) for the scenario's channel; exactly 0 when W = 1.
pub fn threshold_alpha(s: &Scenario) -> Result<f64> {
    if s.eve_variance == 1.0 {
        return Ok(0.0);
    }
    let spectrum = s.spectrum()?;
    Ok(keyrate::threshold_from(spectrum.trace(), spectrum.rank(), 0.0, s.eve_variance)?.alpha)
}
