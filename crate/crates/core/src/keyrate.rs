//! Reverse-reconciliation secret key rates under an entangling-cloner attack.
//!
//! Rates are in bits per channel use; all logarithms in rates are base 2.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelSpectrum;
use crate::error::{check_transmissivity, domain, Error, Result};

/// Eigenvalues within this distance below 1 are treated as exactly 1.
pub const EIGENVALUE_TOL: f64 = 1e-9;

/// Prefactor of ζ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZetaConstant {
    /// The rounded literal 0.72.
    #[default]
    Literal,
    /// 1 / (2 ln 2) ≈ 0.7213.
    Exact,
}

impl ZetaConstant {
    pub fn value(self) -> f64 {
        match self {
            ZetaConstant::Literal => 0.72,
            ZetaConstant::Exact => 0.5 / std::f64::consts::LN_2,
        }
    }
}

/// Rate of one parallel SISO channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelRate {
    pub transmissivity: f64,
    pub mutual_information: f64,
    pub holevo: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateBreakdown {
    /// I(a:b).
    pub mutual_information: f64,
    /// I(E:b).
    pub holevo: f64,
    /// mutual_information - holevo. Negative when insecure.
    pub rate: f64,
    pub per_channel: Vec<ChannelRate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub zeta: f64,
    /// r h(W) / tr(H†H).
    pub alpha: f64,
    pub secure: bool,
}

/// Λ(x, y) = T x + (1 - T) y.
pub fn lambda_mix(t: f64, x: f64, y: f64) -> Result<f64> {
    check_transmissivity(t)?;
    Ok(mix(t, x, y))
}

#[inline]
fn mix(t: f64, x: f64, y: f64) -> f64 {
    t * x + (1.0 - t) * y
}

/// Entropy in bits of a thermal mode with symplectic eigenvalue `x`.
pub fn entropy_h(x: f64) -> Result<f64> {
    if !(x >= 1.0 - EIGENVALUE_TOL) || !x.is_finite() {
        return Err(domain(format!(
            "symplectic eigenvalue {x} < 1 is not physical"
        )));
    }
    if x <= 1.0 {
        return Ok(0.0);
    }
    // p log p - m log m with p - m = 1, rearranged so large terms do not cancel.
    let plus = 0.5 * (x + 1.0);
    let minus = 0.5 * (x - 1.0);
    Ok((plus.ln() + minus * (1.0 / minus).ln_1p()) / std::f64::consts::LN_2)
}

pub fn mutual_information(t: f64, vs: f64, v0: f64, w: f64) -> Result<f64> {
    check_transmissivity(t)?;
    if !(vs >= 0.0) {
        return Err(domain(format!("signal variance must be >= 0, got {vs}")));
    }
    if !(v0 >= 1.0 && w >= 1.0) {
        return Err(domain(format!(
            "noise variances must be >= 1 (V_0 = {v0}, W = {w})"
        )));
    }
    Ok(0.5 * (t * vs / mix(t, v0, w)).ln_1p() / std::f64::consts::LN_2)
}

/// Closed-form Holevo information of Eve on Bob's outcome.
pub fn holevo_bound(t: f64, va: f64, w: f64) -> Result<f64> {
    check_transmissivity(t)?;
    if !(va > 1.0) || !va.is_finite() {
        return Err(domain(format!("alice variance must exceed 1, got {va}")));
    }
    if !(w >= 1.0) || !w.is_finite() {
        return Err(domain(format!("eve variance must be >= 1, got {w}")));
    }
    let nu1 = mix(t, w, va);
    let nu2 = w;
    let l_aw = mix(t, va, w);
    let l_wa1 = mix(t, w * va, 1.0);
    let delta = (va * w * nu1 + w * l_wa1) / l_aw;
    let y = va * w * w * nu1 * l_wa1 / (l_aw * l_aw);
    let mut disc = delta * delta - 4.0 * y;
    if disc < 0.0 {
        if disc < -1e-9 * delta * delta {
            return Err(Error::NumericConsistency(format!(
                "negative discriminant {disc} (Δ = {delta}, Y = {y})"
            )));
        }
        disc = 0.0;
    }
    let nu3_sq = 0.5 * (delta + disc.sqrt());
    // ν₃² ν₄² = Y; dividing avoids cancellation in the smaller root.
    let nu4_sq = y / nu3_sq;
    let total = entropy_h(nu1)? + entropy_h(nu2)?;
    let conditional = entropy_h(nu3_sq.sqrt().max(1.0))? + entropy_h(nu4_sq.sqrt().max(1.0))?;
    let chi = total - conditional;
    if chi < 0.0 && chi > -1e-12 {
        Ok(0.0)
    } else {
        Ok(chi)
    }
}

fn channel_rate(t: f64, va: f64, v0: f64, w: f64) -> Result<ChannelRate> {
    let vs = crate::physics::signal_variance(va, v0)?;
    let mutual_information = mutual_information(t, vs, v0, w)?;
    let holevo = holevo_bound(t, va, w)?;
    Ok(ChannelRate {
        transmissivity: t,
        mutual_information,
        holevo,
        rate: mutual_information - holevo,
    })
}

/// Exact rate of a single channel; V_s = V_a - V_0 is derived internally.
pub fn siso_key_rate(t: f64, va: f64, v0: f64, w: f64) -> Result<RateBreakdown> {
    let c = channel_rate(t, va, v0, w)?;
    Ok(RateBreakdown {
        mutual_information: c.mutual_information,
        holevo: c.holevo,
        rate: c.rate,
        per_channel: vec![c],
    })
}

/// Sum of the SISO rates over the parallel channels of `spectrum`.
pub fn mimo_key_rate(
    spectrum: &ChannelSpectrum,
    va: f64,
    v0: f64,
    w: f64,
) -> Result<RateBreakdown> {
    key_rate_over(spectrum.transmissivities(), va, v0, w)
}

pub fn key_rate_over(transmissivities: &[f64], va: f64, v0: f64, w: f64) -> Result<RateBreakdown> {
    if transmissivities.is_empty() {
        return Err(Error::DegenerateChannel("no parallel channels".into()));
    }
    let per_channel = transmissivities
        .iter()
        .map(|&t| channel_rate(t, va, v0, w))
        .collect::<Result<Vec<_>>>()?;
    let mutual_information: f64 = per_channel.iter().map(|c| c.mutual_information).sum();
    let holevo: f64 = per_channel.iter().map(|c| c.holevo).sum();
    Ok(RateBreakdown {
        mutual_information,
        holevo,
        rate: mutual_information - holevo,
        per_channel,
    })
}

/// Low-transmissivity slope ζ of the key rate with the default 0.72 prefactor.
pub fn zeta(vs: f64, va: f64, w: f64) -> Result<f64> {
    zeta_with(ZetaConstant::Literal, vs, va, w)
}

pub fn zeta_with(constant: ZetaConstant, vs: f64, va: f64, w: f64) -> Result<f64> {
    if !(va > 1.0) || !va.is_finite() {
        return Err(domain(format!("alice variance must exceed 1, got {va}")));
    }
    if !(w >= 1.0) {
        return Err(domain(format!("eve variance must be >= 1, got {w}")));
    }
    // ln((V_a + 1) / (V_a - 1)) without the cancellation near large V_a.
    let log_ratio = (2.0 / (va - 1.0)).ln_1p();
    Ok(constant.value() * (vs / w - log_ratio * ((va * va - w * w) / (2.0 * w) - va)))
}

/// ζ tr(H†H) - r h(W).
pub fn asymptotic_rate(trace_hh: f64, rank: usize, zeta: f64, w: f64) -> Result<f64> {
    if !(trace_hh >= 0.0) {
        return Err(domain(format!("tr(H†H) must be >= 0, got {trace_hh}")));
    }
    if rank == 0 {
        return Err(domain("rank must be >= 1"));
    }
    Ok(zeta * trace_hh - rank as f64 * entropy_h(w)?)
}

pub fn security_threshold(
    spectrum: &ChannelSpectrum,
    zeta: f64,
    w: f64,
) -> Result<ThresholdReport> {
    threshold_from(spectrum.trace(), spectrum.rank(), zeta, w)
}

pub fn threshold_from(trace_hh: f64, rank: usize, zeta: f64, w: f64) -> Result<ThresholdReport> {
    if !(trace_hh > 0.0) {
        return Err(Error::DegenerateChannel("tr(H†H) = 0".into()));
    }
    let alpha = rank as f64 * entropy_h(w)? / trace_hh;
    Ok(ThresholdReport {
        zeta,
        alpha,
        secure: zeta > alpha,
    })
}
