//! Acceptance suite: one PASS/FAIL line per top-level criterion, with details
//! indented underneath. Runs as a plain binary so the lines always reach stdout.

use std::time::Instant;

use symshadow::experiments::calibration::{run_calibration, CalibrationMethod};
use symshadow::experiments::compile_bench::compile_one;
use symshadow::experiments::config::{CalibrationParams, NoiseSpec};
use symshadow::experiments::energy::{hubbard_energy, xxz_energy};
use symshadow::experiments::slater::{random_slater, run_slater_2rdm, Pipeline};
use symshadow::experiments::{median, Experiment, ExperimentConfig, RunSettings};
use symshadow::gaussian::GaussianState;
use symshadow::noise::{NoiseKind, ReadoutChannel};
use symshadow::oracle::{fermion_mitigation_residual, fermion_test_states, qubit_mitigation_residual, test_channels};
use symshadow::qubit::{random_sector_state, sample_pauli_frame, QubitState};
use symshadow::rng::stream_rng;
use symshadow::shadows::{
    channel_eigenvalues_exact, matchgate_estimate_into, matchgate_f, measure_matchgate, noisy_eigenvalues_dense,
    pauli_estimate_into, sample_b2n, DegreeWeights, Ensemble, MajoranaColumns, PauliColumns,
};
use symshadow::Error;

struct Outcome {
    passed: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { passed: true, details: Vec::new() }
    }

    fn check(&mut self, ok: bool, detail: impl Into<String>) {
        self.passed &= ok;
        let mark = if ok { "ok  " } else { "FAIL" };
        self.details.push(format!("{mark} {}", detail.into()));
    }

    fn note(&mut self, detail: impl Into<String>) {
        self.details.push(format!("note {}", detail.into()));
    }
}

fn settings(seed: u64) -> RunSettings {
    RunSettings { seed, ..RunSettings::default() }
}

fn channel(kind: NoiseKind, p: f64) -> ReadoutChannel {
    ReadoutChannel::new(kind, p).expect("valid channel")
}

fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

fn enumeration_oracles() -> Outcome {
    let mut out = Outcome::new();

    let start = Instant::now();
    match channel_eigenvalues_exact(2, Ensemble::Matchgate, None) {
        Ok(spec) => {
            let f2 = spec.eigenvalue(2).unwrap_or(f64::NAN);
            let f4 = spec.eigenvalue(4).unwrap_or(f64::NAN);
            let odd_zero = spec.irreps.iter().filter(|e| e.label % 2 == 1).all(|e| e.value.abs() < 1e-10);
            out.check(
                spec.group_order == 384
                    && (f2 - 1.0 / 3.0).abs() < 1e-10
                    && (f4 - matchgate_f(2, 2)).abs() < 1e-10
                    && odd_zero
                    && spec.leakage < 1e-10,
                format!(
                    "matchgate n=2: |B(4)| = {}, f_2 = {f2:.12}, f_4 = {f4:.12}, leakage {:.1e} ({:.2}s)",
                    spec.group_order,
                    spec.leakage,
                    start.elapsed().as_secs_f64()
                ),
            );
            out.note(format!(
                "f_4 from the closed form C(n,k)/C(2n,2k) at n=2 is {}; a literal 1/6 disagrees with both formula and enumeration",
                matchgate_f(2, 2)
            ));
        }
        Err(e) => out.check(false, format!("matchgate n=2 enumeration: {e}")),
    }

    let start = Instant::now();
    match channel_eigenvalues_exact(2, Ensemble::SymCl, None) {
        Ok(spec) => {
            let f1 = spec.eigenvalue(1).unwrap_or(f64::NAN);
            let f2 = spec.eigenvalue(2).unwrap_or(f64::NAN);
            out.check(
                (f1 - 1.0 / 3.0).abs() < 1e-10 && (f2 - 1.0 / 9.0).abs() < 1e-10 && spec.leakage < 1e-10,
                format!(
                    "symcl n=2: f_1 = {f1:.12}, f_2 = {f2:.12}, leakage {:.1e} ({:.2}s)",
                    spec.leakage,
                    start.elapsed().as_secs_f64()
                ),
            );
        }
        Err(e) => out.check(false, format!("symcl n=2 enumeration: {e}")),
    }

    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for ch in test_channels() {
        for ens in [Ensemble::Matchgate, Ensemble::SymCl] {
            let res = channel_eigenvalues_exact(2, ens, Some(&ch))
                .and_then(|spec| noisy_eigenvalues_dense(2, ens, Some(&ch)).map(|d| (spec, d)));
            match res {
                Ok((spec, dense)) => {
                    worst = worst.max(spec.leakage);
                    for (label, value) in dense {
                        worst = worst.max((spec.eigenvalue(label).unwrap_or(f64::NAN) - value).abs());
                    }
                }
                Err(e) => failures.push(format!("{ens} {ch}: {e}")),
            }
        }
    }
    out.check(
        failures.is_empty() && worst < 1e-10,
        format!(
            "noisy eigenvalues, 3 kinds x p in {{0.1, 0.2, 0.5}}, both ensembles: max |enumerated - dense| {worst:.1e} ({:.2}s) {failures:?}",
            start.elapsed().as_secs_f64()
        ),
    );

    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    let mut failures = Vec::new();
    let slater = fermion_test_states().expect("fixed test states")[0].clone();
    for ch in test_channels() {
        if ch.z_attenuation(0).abs() < 1e-12 {
            let err = fermion_mitigation_residual(&slater, 1, &ch);
            let rejected = matches!(err, Err(Error::DegenerateRatio { .. }));
            out.check(rejected, format!("{ch}: readout fully randomizes Z, mitigation refused ({})", if rejected { "DegenerateRatio" } else { "not refused" }));
            continue;
        }
        for (eta, state) in [(0usize, GaussianState::vacuum(2)), (1, slater.clone())] {
            cases += 1;
            match fermion_mitigation_residual(&state, eta, &ch) {
                Ok(r) => worst = worst.max(r),
                Err(e) => failures.push(format!("fermion eta={eta} {ch}: {e}")),
            }
        }
        for n in [2usize, 3] {
            for m in (-(n as i64)..=n as i64).step_by(2) {
                cases += 1;
                let state = random_sector_state(n, m, &mut stream_rng(11, &[n as u64, (m + 8) as u64])).expect("sector");
                match qubit_mitigation_residual(&state, m, &ch) {
                    Ok(r) => worst = worst.max(r),
                    Err(e) => failures.push(format!("qubit n={n} m={m} {ch}: {e}")),
                }
            }
        }
    }
    out.check(
        failures.is_empty() && worst < 1e-10,
        format!(
            "mitigated = ideal over {cases} (state, channel) cases, fermion n=2 eta in {{0,1}}, qubit n in {{2,3}} all m: max deviation {worst:.1e} ({:.2}s) {failures:?}",
            start.elapsed().as_secs_f64()
        ),
    );
    out
}

fn slater_sweep() -> Outcome {
    let mut out = Outcome::new();
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/slater_sweep.json");
    let cfg = ExperimentConfig::load(std::path::Path::new(path)).expect("slater sweep config");
    let Experiment::Slater2Rdm(params) = &cfg.experiment else {
        out.check(false, "slater sweep config is not a slater_2rdm run");
        return out;
    };
    let start = Instant::now();
    let res = match run_slater_2rdm(params, &cfg.settings()) {
        Ok(r) => r,
        Err(e) => {
            out.check(false, format!("run failed: {e}"));
            return out;
        }
    };
    out.note(format!(
        "n={} eta={} states={} noise={} T={:?} ({:.1}s)",
        params.n,
        params.eta,
        params.states,
        params.noise.resolve().ok().flatten().map_or("none".to_string(), |c| c.to_string()),
        params.checkpoints,
        start.elapsed().as_secs_f64()
    ));
    for p in Pipeline::ALL {
        let s = res.pipeline(p);
        let medians: Vec<String> = s.medians.iter().map(|(t, e)| format!("{t}:{e:.4}")).collect();
        let slope = s.slope.map_or("n/a".to_string(), |v| format!("{v:.3}"));
        out.note(format!("{p}: slope {slope}, medians {}", medians.join(" ")));
    }
    for p in [Pipeline::Noiseless, Pipeline::Mitigated] {
        let slope = res.pipeline(p).slope.unwrap_or(f64::NAN);
        out.check((-0.65..=-0.35).contains(&slope), format!("{p} log-log slope {slope:.3} in [-0.65, -0.35]"));
    }
    let at = |p: Pipeline, t: u64| {
        res.pipeline(p).medians.iter().find(|(s, _)| *s == t).map(|&(_, e)| e).unwrap_or(f64::NAN)
    };
    let (lo, hi) = (at(Pipeline::Unmitigated, 30_000), at(Pipeline::Unmitigated, 300_000));
    out.check(hi <= 1.5 * lo && lo <= 1.5 * hi, format!("unmitigated plateau: eps(3e5) = {hi:.4} vs eps(3e4) = {lo:.4}"));
    let mit = at(Pipeline::Mitigated, 300_000);
    out.check(3.0 * mit <= hi, format!("mitigated eps(3e5) = {mit:.4}, {:.2}x below unmitigated", hi / mit));
    out
}

fn hubbard() -> Outcome {
    let mut out = Outcome::new();
    let ch = channel(NoiseKind::BitFlip, 0.05);
    for l in [4usize, 6] {
        match hubbard_energy(l, 1.0, 4.0, Some(&ch), 200_000, &settings(1)) {
            Ok(r) => {
                let (dm, du) = ((r.mitigated.value - r.truth).abs(), (r.unmitigated.value - r.truth).abs());
                out.check(
                    dm < du && dm < 5.0 * r.mitigated.sigma,
                    format!(
                        "L={l}: truth {:.5}, unmitigated {:.5} (|d| {du:.4}), mitigated {:.5} +- {:.5} ({:.2} sigma)",
                        r.truth,
                        r.unmitigated.value,
                        r.mitigated.value,
                        r.mitigated.sigma,
                        dm / r.mitigated.sigma
                    ),
                );
            }
            Err(e) => out.check(false, format!("L={l}: {e}")),
        }
    }
    out
}

fn xxz() -> Outcome {
    let mut out = Outcome::new();
    for p in [0.01, 0.05] {
        let ch = channel(NoiseKind::BitFlip, p);
        match xxz_energy(8, 1.5, Some(&ch), 100_000, &settings(1)) {
            Ok(r) => {
                let z = (r.mitigated.value - r.truth).abs() / r.mitigated.sigma;
                out.check(
                    z < 4.0,
                    format!("p={p}: truth {:.5}, mitigated {:.5} +- {:.5} ({z:.2} sigma)", r.truth, r.mitigated.value, r.mitigated.sigma),
                );
                let du = (r.unmitigated.value - r.truth).abs();
                if p == 0.05 {
                    out.check(
                        du > r.unmitigated.sigma,
                        format!("p={p}: unmitigated {:.5} deviates by {du:.4} > sigma {:.5}", r.unmitigated.value, r.unmitigated.sigma),
                    );
                } else {
                    out.note(format!("p={p}: unmitigated {:.5} +- {:.5}", r.unmitigated.value, r.unmitigated.sigma));
                }
            }
            Err(e) => out.check(false, format!("p={p}: {e}")),
        }
    }
    out
}

fn variance_laws() -> Outcome {
    let mut out = Outcome::new();
    let shots = 200_000;

    let mut rng = stream_rng(21, &[1]);
    let state = QubitState::from_amplitudes(
        4,
        symshadow::linalg::haar_unitary(16, &mut rng).column(0).iter().copied().collect(),
    )
    .expect("normalised");
    let columns = PauliColumns::all(4, 1);
    let z0 = columns.column(&[0], &[2]).expect("Z_0 column");
    let mut row = vec![0.0; columns.width()];
    let values: Vec<f64> = (0..shots)
        .map(|_| {
            let frame = sample_pauli_frame(4, &mut rng);
            let bits = state.measure(&frame, &mut rng);
            row.iter_mut().for_each(|x| *x = 0.0);
            pauli_estimate_into(&frame, &bits, 1, 3.0, &columns, &mut row);
            row[z0]
        })
        .collect();
    let v = sample_variance(&values);
    out.check(v <= 3.0 * 1.05, format!("single-shot Var[Z_0] = {v:.4} <= 3.15 (n=4 Haar state, {shots} shots)"));

    let (n, m) = (6usize, 2i64);
    let state = random_sector_state(n, m, &mut rng).expect("sector state");
    let columns = PauliColumns::all(n, 1);
    let zs: Vec<usize> = (0..n).map(|q| columns.column(&[q], &[2]).expect("Z column")).collect();
    let mut row = vec![0.0; columns.width()];
    let values: Vec<f64> = (0..shots)
        .map(|_| {
            let frame = sample_pauli_frame(n, &mut rng);
            let bits = state.measure(&frame, &mut rng);
            row.iter_mut().for_each(|x| *x = 0.0);
            pauli_estimate_into(&frame, &bits, 1, 3.0, &columns, &mut row);
            zs.iter().map(|&c| row[c]).sum::<f64>() / m as f64
        })
        .collect();
    let v = sample_variance(&values);
    let law = 2.0 * n as f64 / (m * m) as f64;
    out.check((v / law - 1.0).abs() < 0.10, format!("Var[s1_hat/s1] = {v:.4} vs 2n/m^2 = {law:.4} at n={n}, m={m}"));

    let n = 8;
    let state = random_slater(n, 2, &mut rng).expect("slater");
    let columns = MajoranaColumns::all(2 * n, 2);
    let weights = DegreeWeights::inverse_eigenvalues(n, 1);
    let col = columns.column(&[0, 1]).expect("one-body column");
    let mut row = vec![0.0; columns.width()];
    let values: Vec<f64> = (0..shots)
        .map(|_| {
            let q = sample_b2n(n, &mut rng);
            let bits = measure_matchgate(&state, &q, &mut rng).expect("sample");
            row.iter_mut().for_each(|x| *x = 0.0);
            matchgate_estimate_into(&q, &bits, 1, &weights, &columns, &mut row);
            row[col]
        })
        .collect();
    let v = sample_variance(&values);
    let bound = 1.0 / matchgate_f(n, 1);
    out.check(v <= bound * 1.05, format!("single-shot Var[i g0 g1] = {v:.4} <= 1/f_2 = {bound:.4} (+5%) at n={n}"));
    out
}

fn rshadow_comparator() -> Outcome {
    let mut out = Outcome::new();
    let params = CalibrationParams { n: 8, eta: 2, noise: NoiseSpec::Text("bit_flip:0.2".into()), samples: 100_000 };
    match run_calibration(&params, &settings(1)) {
        Ok(records) => {
            for degree in [2usize, 4] {
                let find = |m: CalibrationMethod| records.iter().find(|r| r.degree == degree && r.method == m);
                let (Some(sym), Some(rs)) = (find(CalibrationMethod::Symmetry), find(CalibrationMethod::Rshadow)) else {
                    out.check(false, format!("degree {degree}: missing record"));
                    continue;
                };
                let combined = sym.sigma.hypot(rs.sigma);
                let z = (sym.value - rs.value).abs() / combined;
                out.check(
                    z <= 3.0,
                    format!(
                        "degree {degree}: symmetry {:.5} +- {:.5}, rshadow {:.5} +- {:.5}, expected {:.5} ({z:.2} combined sigma)",
                        sym.value, sym.sigma, rs.value, rs.sigma, sym.expected
                    ),
                );
            }
        }
        Err(e) => out.check(false, format!("calibration run: {e}")),
    }
    out
}

fn compiler() -> Outcome {
    let mut out = Outcome::new();
    let sizes: Vec<usize> = (2..=16).collect();
    let mut records = Vec::new();
    for i in 0..200 {
        let n = sizes[i % sizes.len()];
        match compile_one(7, n, i / sizes.len()) {
            Ok(r) => records.push(r),
            Err(e) => out.check(false, format!("n={n} trial {}: {e}", i / sizes.len())),
        }
    }
    let worst_rec = records.iter().map(|r| r.recomposition_error).fold(0.0, f64::max);
    out.check(worst_rec < 1e-10, format!("recomposition over {} matrices: max {worst_rec:.1e}", records.len()));
    let verified: Vec<_> = records.iter().filter_map(|r| r.verify_error.map(|e| (e, r.det))).collect();
    let worst_ver = verified.iter().map(|v| v.0).fold(0.0, f64::max);
    let negative = verified.iter().filter(|v| v.1 < 0).count();
    out.check(
        worst_ver < 1e-9 && negative > 0,
        format!("dense action for n <= 4: {} checked ({negative} with det -1), max {worst_ver:.1e}", verified.len()),
    );
    let mut ratios = Vec::new();
    let mut strict = true;
    for &n in sizes.iter().filter(|&&n| n >= 8) {
        let sel: Vec<_> = records.iter().filter(|r| r.n == n).collect();
        strict &= sel.iter().all(|r| r.improved.rotation_depth < r.naive.rotation_depth);
        let ratio: f64 = sel.iter().map(|r| r.improved.rotation_depth as f64 / r.naive.rotation_depth as f64).sum::<f64>()
            / sel.len() as f64;
        ratios.push(format!("{n}:{ratio:.3}"));
    }
    out.check(strict, format!("improved depth < naive for every matrix with n >= 8; mean ratios {}", ratios.join(" ")));
    out
}

fn bootstrap_calibration() -> Outcome {
    let mut out = Outcome::new();
    let ch = channel(NoiseKind::BitFlip, 0.05);
    let mut values = Vec::new();
    let mut sigmas = Vec::new();
    for seed in 1..=50 {
        match xxz_energy(6, 1.5, Some(&ch), 50_000, &settings(seed)) {
            Ok(r) => {
                values.push(r.mitigated.value);
                sigmas.push(r.mitigated.sigma);
            }
            Err(e) => {
                out.check(false, format!("seed {seed}: {e}"));
                return out;
            }
        }
    }
    let spread = sample_variance(&values).sqrt();
    let med = median(&mut sigmas);
    let ratio = spread / med;
    out.check(
        (0.5..=2.0).contains(&ratio),
        format!("n=6 XXZ, bit flip 0.05, T=5e4, 50 seeds: replication std {spread:.5}, median bootstrap sigma {med:.5}, ratio {ratio:.3}"),
    );
    out
}

fn main() {
    // libtest flags such as --nocapture or a name filter are accepted and ignored.
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("exact enumeration oracles", enumeration_oracles),
        ("2-RDM error scaling at reduced scale", slater_sweep),
        ("Hubbard energy per particle", hubbard),
        ("XXZ energy per site", xxz),
        ("variance laws", variance_laws),
        ("robust-shadow comparator", rshadow_comparator),
        ("Gaussian unitary compiler", compiler),
        ("bootstrap calibration", bootstrap_calibration),
    ];
    let mut all = true;
    let mut substitutes = true;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        all &= outcome.passed;
        if matches!(name, "exact enumeration oracles" | "2-RDM error scaling at reduced scale") {
            substitutes &= outcome.passed;
        }
        println!("{} {name} ({:.1}s)", if outcome.passed { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
        for d in &outcome.details {
            println!("     {d}");
        }
    }
    println!(
        "{} sampling-complexity bounds: asymptotic with unspecified constants, not checked numerically; covered by the slope and plateau checks above",
        if substitutes { "PASS" } else { "FAIL" }
    );
    if !all || !substitutes {
        std::process::exit(1);
    }
}
