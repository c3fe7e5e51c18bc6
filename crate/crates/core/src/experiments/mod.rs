//! End-to-end experiment runs producing CSV tables with a JSON metadata sidecar.
//!
//! CSV layouts, one per experiment family:
//!
//! | experiment | columns |
//! |---|---|
//! | `slater_2rdm` | `state_id,T,pipeline,epsilon,sigma` |
//! | `hubbard_energy`, `xxz_energy` | `experiment,size,noise,p,T,seed,pipeline,observable,truth,estimate,sigma` |
//! | `calibration` | `n,noise,p,T,degree,method,value,sigma,expected` |
//! | `compile_bench` | `n,trial,det,recomposition_error,verify_error,improved_depth,naive_depth,improved_two_qubit,naive_two_qubit,improved_single_qubit,naive_single_qubit` |
//!
//! Energy rows use `pipeline ∈ {noiseless, unmitigated, mitigated}` for the energy
//! itself and `pipeline = ratio` with `observable` set to the irrep label for the
//! estimated `ŝ/s`, whose `truth` column holds the ratio implied by the flip law.

pub mod calibration;
pub mod common;
pub mod compile_bench;
pub mod config;
pub mod energy;
pub mod slater;

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;

pub use common::{loglog_slope, median, Estimate};
pub use config::{Experiment, ExperimentConfig, NoiseSpec, RunSettings};

use crate::error::Result;
use crate::noise::ReadoutChannel;

/// Rows of one run plus a JSON summary for the sidecar.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: serde_json::Value,
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn noise_cells(noise: Option<&ReadoutChannel>) -> [String; 2] {
    match noise {
        Some(ch) => [ch.kind.name().to_string(), num(ch.p)],
        None => ["none".to_string(), "0".to_string()],
    }
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

fn energy_rows(results: &[energy::EnergyResult], seed: u64, observable: &str) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for r in results {
        let [kind, p] = noise_cells(r.noise.as_ref());
        let base = vec![r.experiment.clone(), r.size.to_string(), kind, p, r.samples.to_string(), seed.to_string()];
        for (pipeline, e) in [("noiseless", r.noiseless), ("unmitigated", r.unmitigated), ("mitigated", r.mitigated)] {
            let mut row = base.clone();
            row.extend([pipeline.to_string(), observable.to_string(), num(r.truth), num(e.value), num(e.sigma)]);
            rows.push(row);
        }
        for ratio in &r.ratios {
            let mut row = base.clone();
            row.extend([
                "ratio".to_string(),
                ratio.irrep.to_string(),
                num(ratio.expected),
                num(ratio.value),
                num(ratio.sigma),
            ]);
            rows.push(row);
        }
    }
    rows
}

const ENERGY_COLUMNS: [&str; 11] =
    ["experiment", "size", "noise", "p", "T", "seed", "pipeline", "observable", "truth", "estimate", "sigma"];

/// Run the configured experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let settings = cfg.settings();
    match &cfg.experiment {
        Experiment::Slater2Rdm(p) => {
            let out = slater::run_slater_2rdm(p, &settings)?;
            let rows = out
                .records
                .iter()
                .map(|r| {
                    vec![
                        r.state_id.to_string(),
                        r.samples.to_string(),
                        r.pipeline.to_string(),
                        num(r.epsilon),
                        num(r.sigma),
                    ]
                })
                .collect();
            Ok(RunOutput {
                header: header(&["state_id", "T", "pipeline", "epsilon", "sigma"]),
                rows,
                summary: json!({
                    "pipelines": out.summary,
                    "fit_min_samples": out.fit_min_samples,
                    "ancilla_added": out.ancilla_added,
                }),
            })
        }
        Experiment::HubbardEnergy(p) => {
            let mut results = Vec::new();
            for l in p.sites.to_vec() {
                for spec in p.noise.to_vec() {
                    let noise = spec.resolve()?;
                    results.push(energy::hubbard_energy(l, p.t, p.u, noise.as_ref(), p.samples, &settings)?);
                }
            }
            Ok(RunOutput {
                header: header(&ENERGY_COLUMNS),
                rows: energy_rows(&results, settings.seed, "energy_per_particle"),
                summary: json!({ "results": results }),
            })
        }
        Experiment::XxzEnergy(p) => {
            let mut results = Vec::new();
            for n in p.n.to_vec() {
                for spec in p.noise.to_vec() {
                    let noise = spec.resolve()?;
                    results.push(energy::xxz_energy(n, p.delta, noise.as_ref(), p.samples, &settings)?);
                }
            }
            Ok(RunOutput {
                header: header(&ENERGY_COLUMNS),
                rows: energy_rows(&results, settings.seed, "energy_per_site"),
                summary: json!({ "results": results }),
            })
        }
        Experiment::Calibration(p) => {
            let records = calibration::run_calibration(p, &settings)?;
            let noise = p.noise.resolve()?;
            let [kind, prob] = noise_cells(noise.as_ref());
            let rows = records
                .iter()
                .map(|r| {
                    vec![
                        p.n.to_string(),
                        kind.clone(),
                        prob.clone(),
                        p.samples.to_string(),
                        r.degree.to_string(),
                        serde_json::to_value(r.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                        num(r.value),
                        num(r.sigma),
                        num(r.expected),
                    ]
                })
                .collect();
            Ok(RunOutput {
                header: header(&["n", "noise", "p", "T", "degree", "method", "value", "sigma", "expected"]),
                rows,
                summary: json!({ "records": records }),
            })
        }
        Experiment::CompileBench(p) => {
            let records = compile_bench::run_compile_bench(p, &settings)?;
            let rows = records
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.trial.to_string(),
                        r.det.to_string(),
                        num(r.recomposition_error),
                        r.verify_error.map(num).unwrap_or_default(),
                        r.improved.rotation_depth.to_string(),
                        r.naive.rotation_depth.to_string(),
                        r.improved.two_qubit_count.to_string(),
                        r.naive.two_qubit_count.to_string(),
                        r.improved.single_qubit_count.to_string(),
                        r.naive.single_qubit_count.to_string(),
                    ]
                })
                .collect();
            let mut ratios = Vec::new();
            for n in p.n.to_vec() {
                let sel: Vec<_> = records.iter().filter(|r| r.n == n).collect();
                let depth: f64 = sel.iter().map(|r| r.improved.rotation_depth as f64).sum::<f64>()
                    / sel.iter().map(|r| r.naive.rotation_depth.max(1) as f64).sum::<f64>();
                let count: f64 = sel.iter().map(|r| r.improved.two_qubit_count as f64).sum::<f64>()
                    / sel.iter().map(|r| r.naive.two_qubit_count.max(1) as f64).sum::<f64>();
                ratios.push(json!({ "n": n, "depth_ratio": depth, "two_qubit_ratio": count }));
            }
            Ok(RunOutput {
                header: header(&[
                    "n",
                    "trial",
                    "det",
                    "recomposition_error",
                    "verify_error",
                    "improved_depth",
                    "naive_depth",
                    "improved_two_qubit",
                    "naive_two_qubit",
                    "improved_single_qubit",
                    "naive_single_qubit",
                ]),
                rows,
                summary: json!({ "ratios": ratios }),
            })
        }
    }
}

/// Write `output` as CSV to `writer`.
pub fn write_csv<W: Write>(output: &RunOutput, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(&output.header)?;
    for row in &output.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Sidecar contents: the config with the CSV columns and a run summary.
pub fn sidecar(cfg: &ExperimentConfig, output: &RunOutput) -> serde_json::Value {
    json!({
        "experiment": cfg.experiment.name(),
        "seed": cfg.seed,
        "shards": cfg.settings().shards,
        "batches": cfg.batches,
        "bootstrap": cfg.bootstrap,
        "columns": output.header,
        "config": cfg,
        "summary": output.summary,
        "version": env!("CARGO_PKG_VERSION"),
    })
}

/// Sidecar path: the CSV path with its extension replaced by `json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Write the CSV and its sidecar; returns both paths.
pub fn write_outputs(cfg: &ExperimentConfig, output: &RunOutput, csv_path: &Path) -> Result<(PathBuf, PathBuf)> {
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_csv(output, std::fs::File::create(csv_path)?)?;
    let meta = sidecar_path(csv_path);
    std::fs::write(&meta, serde_json::to_string_pretty(&sidecar(cfg, output))? + "\n")?;
    Ok((csv_path.to_path_buf(), meta))
}
