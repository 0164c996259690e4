//! Thermal-noise budget of a cryogenic mm-wave/THz source.
//!
//! All variances are in shot-noise units (SNU): the vacuum quadrature
//! variance is 1.

use serde::{Deserialize, Serialize};

use crate::constants::{BOLTZMANN, PLANCK};
use crate::error::{check_transmissivity, domain, Error, Result};

/// Carrier frequency and ambient temperature of the link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    /// Hz.
    pub carrier_frequency: f64,
    /// K.
    pub temperature: f64,
}

impl Environment {
    pub fn new(carrier_frequency: f64, temperature: f64) -> Result<Self> {
        if !(carrier_frequency > 0.0 && carrier_frequency.is_finite()) {
            return Err(domain(format!(
                "carrier frequency must be positive, got {carrier_frequency}"
            )));
        }
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(domain(format!(
                "temperature must be positive, got {temperature}"
            )));
        }
        Ok(Self {
            carrier_frequency,
            temperature,
        })
    }
}

/// Variances describing Alice's prepared mode and Eve's injected noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseBudget {
    pub mean_photons: f64,
    /// V_0 = 1 + 2 n̄.
    pub thermal_variance: f64,
    /// V_a = V_s + V_0.
    pub alice_variance: f64,
    /// V_s, the Gaussian encoding variance.
    pub signal_variance: f64,
    /// W.
    pub eve_variance: f64,
}

impl NoiseBudget {
    /// Builds the budget for a total Alice variance `alice_variance` and
    /// Eve noise `eve_variance` in the given environment.
    pub fn new(env: &Environment, alice_variance: f64, eve_variance: f64) -> Result<Self> {
        if !(eve_variance >= 1.0) {
            return Err(domain(format!(
                "eve variance must be >= 1 SNU, got {eve_variance}"
            )));
        }
        let mean_photons = mean_thermal_photons(env);
        let thermal_variance = thermal_variance(mean_photons)?;
        let signal_variance = signal_variance(alice_variance, thermal_variance)?;
        Ok(Self {
            mean_photons,
            thermal_variance,
            alice_variance,
            signal_variance,
            eve_variance,
        })
    }

    /// Shot-noise level Bob sees on a channel of transmissivity `t`.
    pub fn bob_variance(&self, t: f64) -> Result<f64> {
        bob_noise_variance(t, self.thermal_variance, self.eve_variance)
    }
}

/// Bose-Einstein occupation n̄ = 1 / (exp(h f / k_B T) - 1).
///
/// Returns 0 once the exponent overflows.
pub fn mean_thermal_photons(env: &Environment) -> f64 {
    let x = PLANCK * env.carrier_frequency / (BOLTZMANN * env.temperature);
    let denom = x.exp_m1();
    if denom.is_finite() {
        1.0 / denom
    } else {
        0.0
    }
}

/// Checked variant of [`mean_thermal_photons`] taking raw frequency (Hz) and temperature (K).
pub fn mean_thermal_photons_at(carrier_frequency: f64, temperature: f64) -> Result<f64> {
    Ok(mean_thermal_photons(&Environment::new(
        carrier_frequency,
        temperature,
    )?))
}

pub fn thermal_variance(mean_photons: f64) -> Result<f64> {
    if !(mean_photons >= 0.0) {
        return Err(domain(format!(
            "mean photon number must be >= 0, got {mean_photons}"
        )));
    }
    Ok(1.0 + 2.0 * mean_photons)
}

/// V_s = V_a - V_0.
pub fn signal_variance(alice_variance: f64, thermal_variance: f64) -> Result<f64> {
    if !(thermal_variance >= 1.0) {
        return Err(domain(format!(
            "thermal variance must be >= 1 SNU, got {thermal_variance}"
        )));
    }
    if !(alice_variance >= thermal_variance) {
        return Err(Error::InfeasibleModulation {
            alice: alice_variance,
            thermal: thermal_variance,
        });
    }
    Ok(alice_variance - thermal_variance)
}

/// T V_0 + (1 - T) W.
///
/// Evaluated as W + T (V_0 - W) so that W = V_0 returns V_0 exactly.
pub fn bob_noise_variance(t: f64, thermal_variance: f64, eve_variance: f64) -> Result<f64> {
    check_transmissivity(t)?;
    if t == 1.0 {
        return Ok(thermal_variance);
    }
    Ok(eve_variance + t * (thermal_variance - eve_variance))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(f: f64, t: f64) -> Environment {
        Environment::new(f, t).unwrap()
    }

    #[test]
    fn photons_at_100ghz_4k() {
        let n = mean_thermal_photons(&env(1e11, 4.0));
        assert!((n - 0.431_129_5).abs() < 1e-6, "{n}");
    }

    #[test]
    fn photons_at_1thz_43k() {
        let n = mean_thermal_photons(&env(1e12, 43.0));
        assert!((n - 0.487_108).abs() < 1e-5, "{n}");
    }

    #[test]
    fn photons_vanish_near_zero_temperature() {
        assert_eq!(mean_thermal_photons(&env(1e11, 1e-300)), 0.0);
        assert_eq!(mean_thermal_photons(&env(1e11, 1e-3)), 0.0);
    }

    #[test]
    fn non_positive_inputs_rejected() {
        assert!(matches!(Environment::new(0.0, 4.0), Err(Error::Domain(_))));
        assert!(matches!(Environment::new(1e11, 0.0), Err(Error::Domain(_))));
        assert!(matches!(
            Environment::new(1e11, -1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            Environment::new(f64::NAN, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn thermal_variance_examples() {
        assert_eq!(thermal_variance(0.0).unwrap(), 1.0);
        assert!((thermal_variance(0.431).unwrap() - 1.862).abs() < 1e-12);
        assert_eq!(thermal_variance(0.5).unwrap(), 2.0);
        assert!(thermal_variance(-0.1).is_err());
    }

    #[test]
    fn signal_variance_examples() {
        assert!((signal_variance(1000.0, 1.862).unwrap() - 998.138).abs() < 1e-9);
        assert_eq!(signal_variance(1000.0, 1.0).unwrap(), 999.0);
        assert_eq!(signal_variance(1.0, 1.0).unwrap(), 0.0);
        assert!(matches!(
            signal_variance(1.5, 2.0),
            Err(Error::InfeasibleModulation { .. })
        ));
    }

    #[test]
    fn bob_variance_examples() {
        assert_eq!(bob_noise_variance(1.0, 1.5, 7.0).unwrap(), 1.5);
        assert_eq!(bob_noise_variance(0.0, 1.5, 7.0).unwrap(), 7.0);
        assert!(bob_noise_variance(1.1, 1.5, 7.0).is_err());
        assert!(bob_noise_variance(-0.1, 1.5, 7.0).is_err());
    }

    #[test]
    fn eve_hiding_is_exact() {
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            for v0 in [1.0, 1.862, 2.5, 17.0] {
                assert_eq!(bob_noise_variance(t, v0, v0).unwrap(), v0);
            }
        }
    }

    #[test]
    fn photons_monotone_on_grids() {
        let temps: Vec<f64> = (1..=300).map(|k| k as f64 * 0.5).collect();
        for f in [1e11, 3e11, 1e12] {
            let n: Vec<f64> = temps
                .iter()
                .map(|&t| mean_thermal_photons(&env(f, t)))
                .collect();
            assert!(n.windows(2).all(|w| w[1] > w[0]));
        }
        let freqs: Vec<f64> = (1..=100).map(|k| k as f64 * 1e10).collect();
        for t in [4.0, 20.0, 43.0] {
            let n: Vec<f64> = freqs
                .iter()
                .map(|&f| mean_thermal_photons(&env(f, t)))
                .collect();
            assert!(n.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn budget_composes() {
        let b = NoiseBudget::new(&env(1e11, 4.0), 1000.0, 1.0).unwrap();
        assert!((b.thermal_variance - 1.862_259).abs() < 1e-5);
        assert_eq!(b.alice_variance, b.signal_variance + b.thermal_variance);
        assert!(NoiseBudget::new(&env(1e11, 4.0), 1000.0, 0.5).is_err());
        assert!(matches!(
            NoiseBudget::new(&env(1e11, 300.0), 10.0, 1.0),
            Err(Error::InfeasibleModulation { .. })
        ));
    }
}
