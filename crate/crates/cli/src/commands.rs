//! One function per subcommand, each returning the rendered artifacts.

use std::path::Path;

use serde::Serialize;

use qcontrol::io::{fmt_sig12, OperatorJson};
use qcontrol::lab::{fit_fringe, fringe_scan, run_experiment, theta_grid, Experiment, FringePoint, Mode};
use qcontrol::photonic::NoiseModel;
use qcontrol::qudit::{add_control_with, restrict_to_qubit_levels, Polarity};
use qcontrol::resources::{compare_report, report_records, ComparisonRow, PqModel};
use qcontrol::tomography::{
    error_bars, expected_dataset, generate_dataset, ideal_chi, linear_inversion, mle_reconstruct, process_fidelity,
    ErrorBars, MleOptions,
};
use qcontrol::Operator;

use crate::output::{self, Artifact};
use crate::{Failure, Format, ModeArg, NoiseArgs, Preset};

fn render(e: String) -> Failure {
    Failure::new("io", e)
}

pub fn noise_model(a: &NoiseArgs) -> Result<NoiseModel, Failure> {
    let mut n = match a.preset {
        Preset::Ideal => NoiseModel::ideal(2000.0),
        Preset::Calibrated => NoiseModel::calibrated(),
    };
    if let Some(x) = a.noise_phase_sigma {
        n.phase_jitter_sigma = x;
    }
    if let Some(x) = a.noise_distinguishability {
        n.distinguishability = x;
    }
    if let Some(x) = a.noise_waveplate_sigma {
        n.waveplate_angle_error_sigma = x;
    }
    if let Some(x) = a.shots {
        n.poisson_counts = x;
    }
    n.validate()?;
    Ok(n)
}

pub fn mode(a: &NoiseArgs) -> Result<Mode, Failure> {
    let m = a.mode.unwrap_or(if a.seed.is_some() { ModeArg::Sampled } else { ModeArg::Exact });
    match m {
        ModeArg::Exact => Ok(Mode::Exact),
        ModeArg::Sampled => {
            let seed = a
                .seed
                .ok_or_else(|| Failure::new("usage", "--seed is required in sampled mode"))?;
            Ok(Mode::Sampled {
                noise: noise_model(a)?,
                seed,
            })
        }
    }
}

fn operator_records(op: &Operator, which: &str, out: &mut Vec<Vec<String>>) {
    let m = op.matrix();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(vec![
                which.to_string(),
                i.to_string(),
                j.to_string(),
                fmt_sig12(m[(i, j)].re),
                fmt_sig12(m[(i, j)].im),
            ]);
        }
    }
}

#[derive(Serialize)]
struct ControlDoc {
    polarity: u8,
    operator: OperatorJson,
    qubit_levels: OperatorJson,
}

pub fn control(path: &Path, polarity: &str, format: Format) -> Result<Vec<Artifact>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))?;
    let op = qcontrol::io::operator_from_json(&text)?;
    let pol = if polarity == "0" { Polarity::OnZero } else { Polarity::OnOne };
    let full = add_control_with(&op, pol)?;
    let qubit = restrict_to_qubit_levels(&full)?;
    match format {
        Format::Json => Ok(vec![output::json(
            "controlled.json",
            &ControlDoc {
                polarity: if pol == Polarity::OnOne { 1 } else { 0 },
                operator: OperatorJson::from(&full),
                qubit_levels: OperatorJson::from(&qubit),
            },
        )
        .map_err(render)?]),
        Format::Csv => {
            let mut rows = vec![vec!["block".into(), "row".into(), "col".into(), "re".into(), "im".into()]];
            operator_records(&full, "full", &mut rows);
            operator_records(&qubit, "qubit_levels", &mut rows);
            Ok(vec![output::csv("controlled.csv", &rows).map_err(render)?])
        }
    }
}

#[derive(Serialize)]
struct FidelitySummary<'a> {
    experiment: &'a str,
    mode: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    noise: Option<NoiseModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

pub fn experiment(name: &str, args: &NoiseArgs, format: Format) -> Result<Vec<Artifact>, Failure> {
    let exp: Experiment = name.parse()?;
    let mode = mode(args)?;
    let res = run_experiment(exp, &mode)?;
    let (noise, seed) = match mode {
        Mode::Exact => (None, None),
        Mode::Sampled { noise, seed } => (Some(noise), Some(seed)),
    };
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                #[serde(flatten)]
                summary: FidelitySummary<'a>,
                #[serde(flatten)]
                result: &'a qcontrol::lab::ExperimentResult,
            }
            let doc = Doc {
                summary: FidelitySummary {
                    experiment: exp.name(),
                    mode: mode.label(),
                    noise,
                    seed,
                },
                result: &res,
            };
            Ok(vec![output::json(&format!("{}.json", exp.name()), &doc).map_err(render)?])
        }
        Format::Csv => {
            let mut out = Vec::new();
            for (k, t) in res.tables.iter().enumerate() {
                out.push(output::csv(&format!("{}_table{}.csv", exp.name(), k + 1), &t.to_records()).map_err(render)?);
            }
            let mut rows = vec![vec!["quantity".to_string(), "value".into()]];
            for (k, f) in res.fidelities.iter().enumerate() {
                rows.push(vec![format!("table{}_fidelity", k + 1), fmt_sig12(*f)]);
            }
            rows.push(vec!["mean_fidelity".into(), fmt_sig12(res.mean_fidelity)]);
            if let Some(r) = res.report {
                for (k, v) in [
                    ("fp_lower", r.fp_lower),
                    ("fp_upper", r.fp_upper),
                    ("f_avg_lower", r.f_avg_lower),
                    ("f_avg_upper", r.f_avg_upper),
                ] {
                    rows.push(vec![k.into(), fmt_sig12(v)]);
                }
            }
            out.push(output::csv(&format!("{}_fidelity.csv", exp.name()), &rows).map_err(render)?);
            Ok(out)
        }
    }
}

#[derive(Serialize)]
struct TomoSummary {
    gate: String,
    mode: String,
    shots_per_setting: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    noise: Option<NoiseModel>,
    process_fidelity: f64,
    mle_iterations: u64,
    linear_inversion_psd_violation: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    resampled: Option<ErrorBars>,
}

pub fn tomo(gate: &str, args: &NoiseArgs, resamples: usize, format: Format) -> Result<Vec<Artifact>, Failure> {
    let exp: Experiment = gate.parse()?;
    if exp.target_gate().is_none() {
        return Err(Failure::new("unknown gate", format!("`{gate}` is not a controlled gate")));
    }
    let settings = exp.settings();
    let ideal = ideal_chi(&settings.sum_operator())?;
    let mode = mode(args)?;
    let (data, seed, noise) = match mode {
        Mode::Exact => {
            let shots = args.shots.unwrap_or(2000.0);
            (expected_dataset(&settings, None, shots)?, None, None)
        }
        Mode::Sampled { noise, seed } => (
            generate_dataset(&settings, &noise, noise.poisson_counts, seed)?,
            Some(seed),
            Some(noise),
        ),
    };
    let lin = linear_inversion(&data)?;
    let mle = mle_reconstruct(&data, &MleOptions::default())?;
    mle.chi.check_invariants()?;
    let fidelity = process_fidelity(&mle.chi, &ideal)?;
    let resampled = match seed {
        Some(s) if resamples > 0 => Some(error_bars(&data, &ideal, resamples, s ^ 0x5DEE_CE66_D1CE_5EED)?),
        _ => None,
    };
    let summary = TomoSummary {
        gate: exp.name().into(),
        mode: mode.label().into(),
        shots_per_setting: data.shots_per_setting,
        seed,
        noise,
        process_fidelity: fidelity,
        mle_iterations: mle.iterations,
        linear_inversion_psd_violation: lin.psd_violation,
        resampled,
    };
    let stem = format!("tomo_{}", exp.name());
    let mut out = vec![
        output::csv(&format!("{stem}_dataset.csv"), &data.to_records()).map_err(render)?,
        output::json(&format!("{stem}_chi.json"), &mle.chi.to_json()).map_err(render)?,
    ];
    out.push(match format {
        Format::Json => output::json(&format!("{stem}_fidelity.json"), &summary).map_err(render)?,
        Format::Csv => {
            let mut rows = vec![
                vec!["quantity".to_string(), "value".into()],
                vec!["process_fidelity".into(), fmt_sig12(fidelity)],
            ];
            if let Some(e) = resampled {
                rows.push(vec!["resampled_mean".into(), fmt_sig12(e.mean)]);
                rows.push(vec!["resampled_std".into(), fmt_sig12(e.std)]);
            }
            output::csv(&format!("{stem}_fidelity.csv"), &rows).map_err(render)?
        }
    });
    Ok(out)
}

pub fn fringe(points: usize, args: &NoiseArgs, format: Format) -> Result<Vec<Artifact>, Failure> {
    if points < 2 {
        return Err(Failure::new("out of range", "--points must be at least 2"));
    }
    let mode = mode(args)?;
    let pts = fringe_scan(&theta_grid(points), &mode)?;
    let (c, resid) = fit_fringe(&pts);
    match format {
        Format::Csv => Ok(vec![output::csv("fringe.csv", &qcontrol::lab::fringe::fringe_records(&pts)).map_err(render)?]),
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                mode: &'a str,
                amplitude: f64,
                max_residual: f64,
                points: &'a [FringePoint],
            }
            Ok(vec![output::json(
                "fringe.json",
                &Doc {
                    mode: mode.label(),
                    amplitude: c,
                    max_residual: resid,
                    points: &pts,
                },
            )
            .map_err(render)?])
        }
    }
}

/// `"7"` or the inclusive range `"2..10"`.
pub fn parse_n_range(s: &str) -> Result<Vec<u64>, Failure> {
    let bad = || Failure::new("parse error", format!("bad n range `{s}`"));
    let v = match s.split_once("..") {
        Some((a, b)) => {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            (a..=b).collect::<Vec<_>>()
        }
        None => vec![s.trim().parse().map_err(|_| bad())?],
    };
    if v.is_empty() {
        return Err(bad());
    }
    Ok(v)
}

pub fn resources(
    model: &str,
    n: &str,
    p: Option<u64>,
    q: Option<u64>,
    p_fraction: Option<f64>,
    format: Format,
) -> Result<Vec<Artifact>, Failure> {
    let ns = parse_n_range(n)?;
    let model = match model {
        "explicit" => match (p, q) {
            (Some(p), Some(q)) => PqModel::Explicit { p, q },
            _ => return Err(Failure::new("usage", "explicit model needs --p and --q")),
        },
        _ => PqModel::Shor { p_fraction },
    };
    let rows = compare_report(&ns, &model)?;
    match format {
        Format::Csv => Ok(vec![output::csv("resources.csv", &report_records(&rows)).map_err(render)?]),
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                model: PqModel,
                rows: &'a [ComparisonRow],
            }
            Ok(vec![output::json("resources.json", &Doc { model, rows: &rows }).map_err(render)?])
        }
    }
}
