//! Scenario overrides from flags and `key=value` config files.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::Serialize;
use thzqkd_core::keyrate::ZetaConstant;
use thzqkd_core::sweep::ElementGain;

use crate::error::{CliError, Result};

/// `start:stop:points[:log]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub log: bool,
}

impl Grid {
    pub fn linear(start: f64, stop: f64, points: usize) -> Self {
        Self {
            start,
            stop,
            points,
            log: false,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        let last = (n - 1) as f64;
        let mut v: Vec<f64> = (0..n)
            .map(|k| {
                let u = k as f64 / last;
                if self.log {
                    (self.start.ln() + u * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + u * (self.stop - self.start)
                }
            })
            .collect();
        v[0] = self.start;
        v[n - 1] = self.stop;
        v
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let log = match parts.len() {
            3 => false,
            4 if parts[3] == "log" => true,
            4 if parts[3] == "lin" => false,
            _ => return Err(format!("grid `{s}` is not start:stop:points[:log]")),
        };
        let num = |x: &str| {
            x.parse::<f64>()
                .map_err(|_| format!("grid `{s}`: `{x}` is not a number"))
        };
        let (start, stop) = (num(parts[0])?, num(parts[1])?);
        let points: usize = parts[2]
            .parse()
            .map_err(|_| format!("grid `{s}`: `{}` is not a point count", parts[2]))?;
        if !(start.is_finite() && stop.is_finite()) || !(stop > start) {
            return Err(format!("grid `{s}`: need finite start < stop"));
        }
        if points < 2 {
            return Err(format!("grid `{s}`: need at least 2 points"));
        }
        if log && !(start > 0.0) {
            return Err(format!("grid `{s}`: log spacing needs start > 0"));
        }
        Ok(Self {
            start,
            stop,
            points,
            log,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Plot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ZetaChoice {
    /// 0.72
    Literal,
    /// 1/(2 ln 2)
    Exact,
}

impl From<ZetaChoice> for ZetaConstant {
    fn from(z: ZetaChoice) -> Self {
        match z {
            ZetaChoice::Literal => ZetaConstant::Literal,
            ZetaChoice::Exact => ZetaConstant::Exact,
        }
    }
}

/// Every setting a run can take. Unset fields fall back to the config
/// file, then to per-command defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Carrier frequency in GHz (comma-separated list where a command accepts several).
    #[arg(long, value_delimiter = ',')]
    pub freq_ghz: Option<Vec<f64>>,
    /// Ambient temperature, K.
    #[arg(long)]
    pub temp_k: Option<f64>,
    /// Link distance, m.
    #[arg(long)]
    pub distance_m: Option<f64>,
    /// Transmit antenna count(s); lists overlay curves in rate-sweep.
    #[arg(long, value_delimiter = ',')]
    pub nt: Option<Vec<usize>>,
    /// Receive antenna count(s), paired with --nt.
    #[arg(long, value_delimiter = ',')]
    pub nr: Option<Vec<usize>>,
    /// Per-element antenna gain in dBi.
    #[arg(long, conflicts_with = "gain_linear")]
    pub gain_dbi: Option<f64>,
    /// Per-element antenna gain as a linear factor.
    #[arg(long)]
    pub gain_linear: Option<f64>,
    /// Alice's modulation variance V_a, SNU.
    #[arg(long)]
    pub va: Option<f64>,
    /// Eve's TMSV variance W, SNU.
    #[arg(long)]
    pub w: Option<f64>,
    /// Absorption in dB/km, replacing the table lookup.
    #[arg(long)]
    pub delta_db_km: Option<f64>,
    /// Target secret key rate, bits per channel use.
    #[arg(long)]
    pub target_rate: Option<f64>,
    /// Sweep grid start:stop:points[:log].
    #[arg(long)]
    pub grid: Option<Grid>,
    /// CSV absorption table (frequency_ghz,attenuation_db_per_km).
    #[arg(long)]
    pub absorption_table: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output formats.
    #[arg(long, value_delimiter = ',')]
    pub format: Option<Vec<Format>>,
    /// Prefactor of ζ.
    #[arg(long, value_enum)]
    pub zeta_constant: Option<ZetaChoice>,
    /// Flat key=value file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| {
        CliError::usage(format!(
            "config line {line}: invalid value `{value}` for {key}"
        ))
    })
}

fn parse_list<T: FromStr>(line: usize, key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|v| parse_value(line, key, v.trim()))
        .collect()
}

fn parse_enum<T: ValueEnum>(line: usize, key: &str, value: &str) -> Result<T> {
    T::from_str(value, true).map_err(|_| {
        CliError::usage(format!(
            "config line {line}: invalid value `{value}` for {key}"
        ))
    })
}

impl Overrides {
    /// Parses a config file body. Keys are the long flag names with `-` or `_`.
    pub fn parse_config(text: &str) -> Result<Self> {
        let mut o = Overrides::default();
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("config line {n}: expected key=value")))?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            match key.as_str() {
                "freq_ghz" => o.freq_ghz = Some(parse_list(n, &key, value)?),
                "temp_k" => o.temp_k = Some(parse_value(n, &key, value)?),
                "distance_m" => o.distance_m = Some(parse_value(n, &key, value)?),
                "nt" => o.nt = Some(parse_list(n, &key, value)?),
                "nr" => o.nr = Some(parse_list(n, &key, value)?),
                "gain_dbi" => o.gain_dbi = Some(parse_value(n, &key, value)?),
                "gain_linear" => o.gain_linear = Some(parse_value(n, &key, value)?),
                "va" => o.va = Some(parse_value(n, &key, value)?),
                "w" => o.w = Some(parse_value(n, &key, value)?),
                "delta_db_km" => o.delta_db_km = Some(parse_value(n, &key, value)?),
                "target_rate" => o.target_rate = Some(parse_value(n, &key, value)?),
                "grid" => {
                    o.grid = Some(
                        value
                            .parse()
                            .map_err(|e| CliError::usage(format!("config line {n}: {e}")))?,
                    )
                }
                "absorption_table" => o.absorption_table = Some(PathBuf::from(value)),
                "out" => o.out = Some(PathBuf::from(value)),
                "format" => {
                    o.format = Some(
                        value
                            .split(',')
                            .map(|v| parse_enum(n, &key, v.trim()))
                            .collect::<Result<_>>()?,
                    )
                }
                "zeta_constant" => o.zeta_constant = Some(parse_enum(n, &key, value)?),
                _ => {
                    return Err(CliError::usage(format!(
                        "config line {n}: unknown key `{key}`"
                    )))
                }
            }
        }
        if o.gain_dbi.is_some() && o.gain_linear.is_some() {
            return Err(CliError::usage("config sets both gain_dbi and gain_linear"));
        }
        Ok(o)
    }

    pub fn load_config(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse_config(&text)
    }

    /// `self` over `base`, field by field.
    pub fn over(self, base: Overrides) -> Overrides {
        let gain_set = self.gain_dbi.is_some() || self.gain_linear.is_some();
        Overrides {
            freq_ghz: self.freq_ghz.or(base.freq_ghz),
            temp_k: self.temp_k.or(base.temp_k),
            distance_m: self.distance_m.or(base.distance_m),
            nt: self.nt.or(base.nt),
            nr: self.nr.or(base.nr),
            gain_dbi: if gain_set {
                self.gain_dbi
            } else {
                base.gain_dbi
            },
            gain_linear: if gain_set {
                self.gain_linear
            } else {
                base.gain_linear
            },
            va: self.va.or(base.va),
            w: self.w.or(base.w),
            delta_db_km: self.delta_db_km.or(base.delta_db_km),
            target_rate: self.target_rate.or(base.target_rate),
            grid: self.grid.or(base.grid),
            absorption_table: self.absorption_table.or(base.absorption_table),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
            zeta_constant: self.zeta_constant.or(base.zeta_constant),
            config: self.config,
        }
    }

    /// Applies the config file named by `--config`, if any.
    pub fn resolve(self) -> Result<Overrides> {
        match &self.config {
            Some(path) => {
                let base = Overrides::load_config(path)?;
                Ok(self.over(base))
            }
            None => Ok(self),
        }
    }

    pub fn element_gain(&self) -> ElementGain {
        match (self.gain_dbi, self.gain_linear) {
            (_, Some(g)) => ElementGain::Linear(g),
            (Some(db), None) => ElementGain::Dbi(db),
            (None, None) => ElementGain::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: Grid = "1:100:3:log".parse().unwrap();
        assert_eq!(g.values(), vec![1.0, 10.000000000000002, 100.0]);
        let g: Grid = "0:10:6".parse().unwrap();
        assert_eq!(g.values(), vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
        for bad in ["1:2", "2:1:5", "1:2:1", "0:1:5:log", "a:1:2", "1:2:3:cubic"] {
            assert!(bad.parse::<Grid>().is_err(), "{bad}");
        }
    }

    #[test]
    fn config_file_parsing() {
        let o = Overrides::parse_config(
            "# link\nfreq-ghz = 200, 300\nnt=8 # tx\n\ngain_linear=30\nformat=csv,plot\n",
        )
        .unwrap();
        assert_eq!(o.freq_ghz, Some(vec![200.0, 300.0]));
        assert_eq!(o.nt, Some(vec![8]));
        assert_eq!(o.element_gain(), ElementGain::Linear(30.0));
        assert_eq!(o.format, Some(vec![Format::Csv, Format::Plot]));
    }

    #[test]
    fn config_file_errors() {
        for bad in [
            "speed=3",
            "va",
            "va=abc",
            "gain_dbi=1\ngain_linear=2",
            "grid=1:2",
        ] {
            assert!(
                matches!(Overrides::parse_config(bad), Err(CliError::Usage(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn flags_override_config() {
        let config = Overrides::parse_config("va=500\nw=2\ngain_dbi=20").unwrap();
        let flags = Overrides {
            va: Some(800.0),
            gain_linear: Some(5.0),
            ..Default::default()
        };
        let merged = flags.over(config);
        assert_eq!(merged.va, Some(800.0));
        assert_eq!(merged.w, Some(2.0));
        assert_eq!(merged.element_gain(), ElementGain::Linear(5.0));
    }
}
