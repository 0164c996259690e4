//! Subcommand implementations.

use std::path::PathBuf;

use serde::Serialize;
use thzqkd_core::roots::Bisection;
use thzqkd_core::sweep::{
    self, max_operating_temperature, max_secure_distance, operating_limits, rate_vs_distance,
    threshold_alpha, zeta_vs_temperature, AbsorptionTable, Scenario, ZetaModel,
    DEFAULT_TARGET_RATE, PUBLISHED_LIMITS,
};
use thzqkd_core::Error;

use crate::config::{Format, Grid, Overrides};
use crate::error::{CliError, Result};
use crate::output::{csv_bytes, json_bytes, num, opt_num, write_file, Report, REPORT_SCHEMA};
use crate::plot::{HLine, Plot, Series};

const DEFAULT_FREQ_GHZ: f64 = 100.0;
const DEFAULT_TEMP_K: f64 = 4.0;
const DEFAULT_DISTANCE_M: f64 = 1.0;
const DEFAULT_ELEMENTS: usize = 32;

fn absorption_table(o: &Overrides) -> Result<AbsorptionTable> {
    match &o.absorption_table {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            Ok(sweep::load_absorption_table(&text)?)
        }
        None => Ok(AbsorptionTable::builtin()),
    }
}

fn absorption_source(o: &Overrides) -> String {
    match (&o.delta_db_km, &o.absorption_table) {
        (Some(d), _) => format!("fixed {} dB/km", num(*d)),
        (None, Some(p)) => p.display().to_string(),
        (None, None) => "builtin".into(),
    }
}

fn out_dir(o: &Overrides) -> PathBuf {
    o.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

fn formats(o: &Overrides, default: &[Format]) -> Vec<Format> {
    o.format.clone().unwrap_or_else(|| default.to_vec())
}

fn single<T: Copy>(name: &str, list: &Option<Vec<T>>, default: T) -> Result<T> {
    match list.as_deref() {
        None => Ok(default),
        Some([v]) => Ok(*v),
        Some(_) => Err(CliError::usage(format!(
            "--{name} takes a single value for this command"
        ))),
    }
}

fn antenna_pairs(o: &Overrides) -> Result<Vec<(usize, usize)>> {
    let nt = o.nt.clone().unwrap_or_else(|| vec![DEFAULT_ELEMENTS]);
    let nr = o.nr.clone().unwrap_or_else(|| nt.clone());
    match (nt.len(), nr.len()) {
        (0, _) | (_, 0) => Err(CliError::usage("antenna lists must not be empty")),
        (a, b) if a == b => Ok(nt.into_iter().zip(nr).collect()),
        (1, _) => Ok(nr.into_iter().map(|r| (nt[0], r)).collect()),
        (_, 1) => Ok(nt.into_iter().map(|t| (t, nr[0])).collect()),
        _ => Err(CliError::usage(
            "--nt and --nr lists must have equal length",
        )),
    }
}

fn single_pair(o: &Overrides) -> Result<(usize, usize)> {
    match antenna_pairs(o)?.as_slice() {
        [p] => Ok(*p),
        _ => Err(CliError::usage(
            "this command takes a single antenna configuration",
        )),
    }
}

fn target_rate(o: &Overrides) -> Result<f64> {
    let t = o.target_rate.unwrap_or(DEFAULT_TARGET_RATE);
    if !t.is_finite() {
        return Err(CliError::usage("--target-rate must be finite"));
    }
    Ok(t)
}

fn scenario(
    o: &Overrides,
    freq_ghz: f64,
    (nt, nr): (usize, usize),
    table: &AbsorptionTable,
) -> Result<Scenario> {
    let absorption = match o.delta_db_km {
        Some(d) => d,
        None => table.at(freq_ghz * 1e9)?,
    };
    let mut s = Scenario::new(
        freq_ghz * 1e9,
        o.temp_k.unwrap_or(DEFAULT_TEMP_K),
        o.distance_m.unwrap_or(DEFAULT_DISTANCE_M),
        absorption,
        nt,
        nr,
    );
    s.element_gain = o.element_gain();
    s.alice_variance = o.va.unwrap_or(s.alice_variance);
    s.eve_variance = o.w.unwrap_or(s.eve_variance);
    if let Some(z) = o.zeta_constant {
        s.zeta_constant = z.into();
    }
    s.validate()?;
    Ok(s)
}

fn zeta_model(o: &Overrides) -> Result<ZetaModel> {
    let s = scenario(o, DEFAULT_FREQ_GHZ, (1, 1), &AbsorptionTable::builtin())?;
    Ok(ZetaModel {
        alice_variance: s.alice_variance,
        eve_variance: s.eve_variance,
        constant: s.zeta_constant,
    })
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InfeasibleModulation { .. } | Error::DegenerateChannel(_) => "infeasible",
        Error::NoneAchievable(_) => "none-achievable",
        Error::BracketExceeded(_) => "bracket-exceeded",
        _ => "error",
    }
}

fn ghz_tag(ghz: f64) -> String {
    num(ghz).replace('.', "p")
}

fn bracket(b: &Bisection) -> Option<[f64; 2]> {
    Some([b.bracket.0, b.bracket.1])
}

#[derive(Serialize)]
struct SweepInputs<'a> {
    template: &'a Scenario,
    target_rate: f64,
    absorption: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<Grid>,
}

#[derive(Serialize)]
struct LimitRecord {
    frequency_ghz: f64,
    delta_db_per_km: f64,
    t_crossing_k: f64,
    t_max_k: f64,
    max_distance_m_at_tmax: Option<f64>,
    status: String,
    reference_t_max_k: Option<f64>,
    reference_max_distance_m: Option<f64>,
    relative_deviation: Option<f64>,
}

/// Maximum temperature and the maximum secure distance there, per frequency.
pub fn table1(o: &Overrides) -> Result<Vec<PathBuf>> {
    let table = absorption_table(o)?;
    let freqs = o
        .freq_ghz
        .clone()
        .unwrap_or_else(|| table.rows().iter().map(|r| r.0).collect());
    let rows = freqs
        .iter()
        .map(|&g| Ok((g, o.delta_db_km.map_or_else(|| table.at(g * 1e9), Ok)?)))
        .collect::<Result<Vec<_>>>()?;
    let rows_table = AbsorptionTable::from_rows(rows)?;
    let pair = single_pair(o)?;
    let target = target_rate(o)?;
    let template = scenario(o, freqs[0], pair, &rows_table)?;
    for &(g, _) in rows_table.rows() {
        scenario(o, g, pair, &rows_table)?;
    }
    let limits = operating_limits(&rows_table, &template, target)?;

    let records: Vec<LimitRecord> = limits
        .iter()
        .map(|row| {
            let reference = PUBLISHED_LIMITS.iter().find(|r| r.0 == row.frequency_ghz);
            let distance = row.max_distance.as_ref().ok().map(|b| b.root);
            let status = match &row.max_distance {
                Ok(_) => "ok".to_string(),
                Err(e) => error_kind(e).to_string(),
            };
            LimitRecord {
                frequency_ghz: row.frequency_ghz,
                delta_db_per_km: row.absorption_db_per_km,
                t_crossing_k: row.crossing_temperature,
                t_max_k: row.max_temperature,
                max_distance_m_at_tmax: distance,
                status,
                reference_t_max_k: reference.map(|r| r.2 as f64),
                reference_max_distance_m: reference.map(|r| r.3),
                relative_deviation: match (distance, reference) {
                    (Some(d), Some(r)) => Some(d / r.3 - 1.0),
                    _ => None,
                },
            }
        })
        .collect();

    let dir = out_dir(o);
    let mut written = Vec::new();
    for f in formats(o, &[Format::Csv]) {
        match f {
            Format::Csv => {
                let header = [
                    "frequency_ghz",
                    "delta_db_per_km",
                    "t_crossing_k",
                    "t_max_k",
                    "max_distance_m_at_tmax",
                    "status",
                    "reference_t_max_k",
                    "reference_max_distance_m",
                    "relative_deviation",
                ];
                let body: Vec<Vec<String>> = records
                    .iter()
                    .map(|r| {
                        vec![
                            num(r.frequency_ghz),
                            num(r.delta_db_per_km),
                            num(r.t_crossing_k),
                            num(r.t_max_k),
                            opt_num(r.max_distance_m_at_tmax),
                            r.status.clone(),
                            opt_num(r.reference_t_max_k),
                            opt_num(r.reference_max_distance_m),
                            opt_num(r.relative_deviation),
                        ]
                    })
                    .collect();
                written.push(write_file(&dir, "table1.csv", &csv_bytes(&header, &body))?);
            }
            Format::Json => {
                let report = Report {
                    schema: REPORT_SCHEMA,
                    command: "table1",
                    inputs: SweepInputs {
                        template: &template,
                        target_rate: target,
                        absorption: absorption_source(o),
                        grid: None,
                    },
                    result: &records,
                    iterations: None,
                    bracket: None,
                };
                written.push(write_file(&dir, "table1.json", &json_bytes(&report))?);
            }
            Format::Plot => {
                let plot = Plot {
                    title: format!("Maximum secure distance at T_max, {}x{}", pair.0, pair.1),
                    x_label: "frequency (GHz)".into(),
                    y_label: "distance (m)".into(),
                    log_y: true,
                    series: vec![
                        Series {
                            label: "computed".into(),
                            points: records
                                .iter()
                                .map(|r| {
                                    (
                                        r.frequency_ghz,
                                        r.max_distance_m_at_tmax.unwrap_or(f64::NAN),
                                    )
                                })
                                .collect(),
                        },
                        Series {
                            label: "reference".into(),
                            points: records
                                .iter()
                                .map(|r| {
                                    (
                                        r.frequency_ghz,
                                        r.reference_max_distance_m.unwrap_or(f64::NAN),
                                    )
                                })
                                .collect(),
                        },
                    ],
                    hlines: vec![],
                };
                written.push(write_file(&dir, "table1.svg", plot.render().as_bytes())?);
            }
        }
    }
    Ok(written)
}

#[derive(Serialize)]
struct ZetaInputs {
    alice_variance: f64,
    eve_variance: f64,
    zeta_constant: f64,
    temperatures: Grid,
}

#[derive(Serialize)]
struct ZetaRecord {
    frequency_ghz: f64,
    zero_crossing_k: Option<f64>,
    temperature_k: Vec<f64>,
    zeta: Vec<f64>,
}

/// ζ(T) for each frequency, with the α = 0 line.
pub fn fig2(o: &Overrides) -> Result<Vec<PathBuf>> {
    let model = zeta_model(o)?;
    let freqs = match &o.freq_ghz {
        Some(f) => f.clone(),
        None => absorption_table(o)?.rows().iter().map(|r| r.0).collect(),
    };
    if freqs.iter().any(|&f| !(f > 0.0) || !f.is_finite()) {
        return Err(CliError::usage("frequencies must be positive"));
    }
    let grid = o.grid.unwrap_or(Grid::linear(0.1, 60.0, 600));
    if !(grid.start > 0.0) {
        return Err(CliError::usage("temperature grid must start above 0 K"));
    }
    let hz: Vec<f64> = freqs.iter().map(|g| g * 1e9).collect();
    let curves = zeta_vs_temperature(&model, &hz, &grid.values())?;

    let dir = out_dir(o);
    let mut written = Vec::new();
    for f in formats(o, &[Format::Csv, Format::Plot]) {
        match f {
            Format::Csv => {
                for (g, c) in freqs.iter().zip(&curves) {
                    let body: Vec<Vec<String>> = c
                        .samples
                        .iter()
                        .map(|&(t, z)| vec![num(t), num(z)])
                        .collect();
                    let name = format!("fig2_{}ghz.csv", ghz_tag(*g));
                    written.push(write_file(
                        &dir,
                        &name,
                        &csv_bytes(&["temperature_k", "zeta"], &body),
                    )?);
                }
            }
            Format::Json => {
                let records: Vec<ZetaRecord> = freqs
                    .iter()
                    .zip(&curves)
                    .map(|(&g, c)| ZetaRecord {
                        frequency_ghz: g,
                        zero_crossing_k: max_operating_temperature(&model, g * 1e9, 0.0)
                            .ok()
                            .map(|b| b.root),
                        temperature_k: c.samples.iter().map(|s| s.0).collect(),
                        zeta: c.samples.iter().map(|s| s.1).collect(),
                    })
                    .collect();
                let report = Report {
                    schema: REPORT_SCHEMA,
                    command: "fig2",
                    inputs: ZetaInputs {
                        alice_variance: model.alice_variance,
                        eve_variance: model.eve_variance,
                        zeta_constant: model.constant.value(),
                        temperatures: grid,
                    },
                    result: records,
                    iterations: None,
                    bracket: None,
                };
                written.push(write_file(&dir, "fig2.json", &json_bytes(&report))?);
            }
            Format::Plot => {
                let plot = Plot {
                    title: "ζ versus temperature".into(),
                    x_label: "temperature (K)".into(),
                    y_label: "ζ".into(),
                    log_y: false,
                    series: freqs
                        .iter()
                        .zip(&curves)
                        .map(|(g, c)| Series {
                            label: format!("{} GHz", num(*g)),
                            points: c.samples.clone(),
                        })
                        .collect(),
                    hlines: vec![HLine {
                        y: 0.0,
                        label: "α = 0".into(),
                    }],
                };
                written.push(write_file(&dir, "fig2.svg", plot.render().as_bytes())?);
            }
        }
    }
    Ok(written)
}

#[derive(Serialize)]
struct CurveRecord {
    tx_elements: usize,
    rx_elements: usize,
    distance_m: Vec<f64>,
    rate_bits_per_use: Vec<Option<f64>>,
    secure: Vec<bool>,
    errors: Vec<Option<String>>,
}

/// Key rate against distance, one curve per antenna configuration.
pub fn rate_sweep(o: &Overrides) -> Result<Vec<PathBuf>> {
    let table = absorption_table(o)?;
    let freq = single("freq-ghz", &o.freq_ghz, DEFAULT_FREQ_GHZ)?;
    let pairs = antenna_pairs(o)?;
    let target = target_rate(o)?;
    let grid = o.grid.unwrap_or(Grid::linear(1.0, 1000.0, 100));
    if !(grid.start > 0.0) {
        return Err(CliError::usage("distance grid must start above 0 m"));
    }
    let scenarios = pairs
        .iter()
        .map(|&p| scenario(o, freq, p, &table))
        .collect::<Result<Vec<_>>>()?;
    let distances = grid.values();
    let curves = scenarios
        .iter()
        .map(|s| rate_vs_distance(s, &distances))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let records: Vec<CurveRecord> = pairs
        .iter()
        .zip(&curves)
        .map(|(&(nt, nr), c)| CurveRecord {
            tx_elements: nt,
            rx_elements: nr,
            distance_m: c.samples.iter().map(|s| s.x).collect(),
            rate_bits_per_use: c.samples.iter().map(|s| s.rate).collect(),
            secure: c.samples.iter().map(|s| s.secure).collect(),
            errors: c.samples.iter().map(|s| s.error.clone()).collect(),
        })
        .collect();

    let dir = out_dir(o);
    let mut written = Vec::new();
    for f in formats(o, &[Format::Csv]) {
        match f {
            Format::Csv => {
                for r in &records {
                    let body: Vec<Vec<String>> = (0..r.distance_m.len())
                        .map(|i| {
                            vec![
                                num(r.distance_m[i]),
                                opt_num(r.rate_bits_per_use[i]),
                                r.secure[i].to_string(),
                            ]
                        })
                        .collect();
                    let name = format!("rate_sweep_{}x{}.csv", r.tx_elements, r.rx_elements);
                    let header = ["distance_m", "rate_bits_per_use", "secure"];
                    written.push(write_file(&dir, &name, &csv_bytes(&header, &body))?);
                }
            }
            Format::Json => {
                let report = Report {
                    schema: REPORT_SCHEMA,
                    command: "rate-sweep",
                    inputs: SweepInputs {
                        template: &scenarios[0],
                        target_rate: target,
                        absorption: absorption_source(o),
                        grid: Some(grid),
                    },
                    result: &records,
                    iterations: None,
                    bracket: None,
                };
                written.push(write_file(&dir, "rate_sweep.json", &json_bytes(&report))?);
            }
            Format::Plot => {
                let plot = Plot {
                    title: format!(
                        "Secret key rate at {} GHz, {} K",
                        num(freq),
                        num(scenarios[0].temperature)
                    ),
                    x_label: "distance (m)".into(),
                    y_label: "key rate (bits/use)".into(),
                    log_y: true,
                    series: records
                        .iter()
                        .map(|r| Series {
                            label: format!("{}x{}", r.tx_elements, r.rx_elements),
                            points: r
                                .distance_m
                                .iter()
                                .zip(&r.rate_bits_per_use)
                                .map(|(&d, &rate)| (d, rate.unwrap_or(f64::NAN)))
                                .collect(),
                        })
                        .collect(),
                    hlines: vec![HLine {
                        y: target,
                        label: format!("target {}", num(target)),
                    }],
                };
                written.push(write_file(
                    &dir,
                    "rate_sweep.svg",
                    plot.render().as_bytes(),
                )?);
            }
        }
    }
    Ok(written)
}

#[derive(Serialize)]
struct PointInputs<'a> {
    scenario: &'a Scenario,
    target_rate: f64,
    absorption: String,
}

#[derive(Serialize)]
struct DistanceResult {
    max_distance_m: f64,
    rate_bits_per_use: f64,
}

fn emit_report<T: Serialize>(o: &Overrides, name: &str, report: &T) -> Result<Vec<u8>> {
    let bytes = json_bytes(report);
    if let Some(dir) = &o.out {
        write_file(dir, name, &bytes)?;
    }
    Ok(bytes)
}

/// JSON report of the largest distance still meeting the target rate.
pub fn max_distance(o: &Overrides) -> Result<Vec<u8>> {
    let table = absorption_table(o)?;
    let freq = single("freq-ghz", &o.freq_ghz, DEFAULT_FREQ_GHZ)?;
    let s = scenario(o, freq, single_pair(o)?, &table)?;
    let target = target_rate(o)?;
    let b = max_secure_distance(&s, target)?;
    let rate = sweep::evaluate(&s.with_distance(b.root))?.rate.rate;
    let report = Report {
        schema: REPORT_SCHEMA,
        command: "max-distance",
        inputs: PointInputs {
            scenario: &s,
            target_rate: target,
            absorption: absorption_source(o),
        },
        result: DistanceResult {
            max_distance_m: b.root,
            rate_bits_per_use: rate,
        },
        iterations: Some(b.iterations),
        bracket: bracket(&b),
    };
    emit_report(o, "max_distance.json", &report)
}

#[derive(Serialize)]
struct TemperatureInputs {
    frequency_ghz: f64,
    alice_variance: f64,
    eve_variance: f64,
    zeta_constant: f64,
    alpha: f64,
}

#[derive(Serialize)]
struct TemperatureResult {
    crossing_k: f64,
    t_max_k: f64,
}

/// JSON report of the highest temperature at which ζ exceeds α.
pub fn max_temp(o: &Overrides) -> Result<Vec<u8>> {
    let table = absorption_table(o)?;
    let freq = single("freq-ghz", &o.freq_ghz, DEFAULT_FREQ_GHZ)?;
    let model = zeta_model(o)?;
    let alpha = if model.eve_variance == 1.0 {
        0.0
    } else {
        threshold_alpha(&scenario(o, freq, single_pair(o)?, &table)?)?
    };
    let b = max_operating_temperature(&model, freq * 1e9, alpha)?;
    let report = Report {
        schema: REPORT_SCHEMA,
        command: "max-temp",
        inputs: TemperatureInputs {
            frequency_ghz: freq,
            alice_variance: model.alice_variance,
            eve_variance: model.eve_variance,
            zeta_constant: model.constant.value(),
            alpha,
        },
        result: TemperatureResult {
            crossing_k: b.root,
            t_max_k: b.root.floor(),
        },
        iterations: Some(b.iterations),
        bracket: bracket(&b),
    };
    emit_report(o, "max_temp.json", &report)
}
