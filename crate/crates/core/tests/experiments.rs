use rand_distr::{Distribution, StandardNormal};

use symshadow::bootstrap::bootstrap_sigma;
use symshadow::experiments::energy::{hubbard_energy, xxz_energy, EnergyResult};
use symshadow::experiments::{run_experiment, write_csv, ExperimentConfig, RunSettings};
use symshadow::rng::stream_rng;

fn settings(seed: u64) -> RunSettings {
    RunSettings { seed, bootstrap: 100, ..RunSettings::default() }
}

#[test]
fn bootstrap_tracks_the_standard_error_of_iid_batches() {
    let k = 20;
    let mut rng = stream_rng(1, &[]);
    let mut ratios = Vec::new();
    for _ in 0..40 {
        let means: Vec<Vec<f64>> = (0..k).map(|_| vec![StandardNormal.sample(&mut rng)]).collect();
        let mu = means.iter().map(|m| m[0]).sum::<f64>() / k as f64;
        let sd = (means.iter().map(|m| (m[0] - mu).powi(2)).sum::<f64>() / (k - 1) as f64).sqrt();
        let sigma = bootstrap_sigma(&means, &vec![10; k], 400, &mut rng, |v| Ok(v.to_vec())).unwrap();
        ratios.push(sigma[0] / (sd / (k as f64).sqrt()));
    }
    let mean_ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
    assert!((mean_ratio - 1.0).abs() < 0.2, "{mean_ratio}");
}

#[test]
fn two_site_xxz_estimate_matches_diagonalisation() {
    let r = xxz_energy(2, 1.5, None, 20_000, &settings(3)).unwrap();
    assert!((r.truth + 1.75).abs() < 1e-12);
    for e in [r.noiseless, r.mitigated] {
        assert!((e.value - r.truth).abs() < 4.0 * e.sigma, "{e:?}");
    }
}

fn noiseless_runs() -> Vec<EnergyResult> {
    let mut out = Vec::new();
    for seed in 1..=4 {
        out.push(hubbard_energy(4, 1.0, 4.0, None, 20_000, &settings(seed)).unwrap());
        for n in [2, 4, 6] {
            out.push(xxz_energy(n, 1.5, None, 20_000, &settings(seed)).unwrap());
        }
    }
    out
}

#[test]
fn noiseless_pipelines_are_consistent_and_calibrated() {
    let runs = noiseless_runs();
    let mut within = 0;
    let mut scaled_gaps = Vec::new();
    for r in &runs {
        assert_eq!(r.noiseless, r.unmitigated);
        let gap = (r.mitigated.value - r.unmitigated.value).abs();
        let sigma = r.mitigated.sigma.max(r.unmitigated.sigma);
        assert!(gap < 3.0 * sigma, "{} size {}: gap {gap} against sigma {sigma}", r.experiment, r.size);
        scaled_gaps.push(gap / sigma);
        if (r.noiseless.value - r.truth).abs() < 5.0 * r.noiseless.sigma {
            within += 1;
        }
        for ratio in &r.ratios {
            assert_eq!(ratio.expected, 1.0);
        }
    }
    assert!(within as f64 >= 0.95 * runs.len() as f64, "{within}/{}", runs.len());
    scaled_gaps.sort_by(f64::total_cmp);
    let median = scaled_gaps[scaled_gaps.len() / 2];
    assert!(median < 1.5, "median scaled gap {median}");
}

#[test]
fn noninteracting_hubbard_truth_is_the_orbital_sum() {
    let r = hubbard_energy(6, 1.0, 0.0, None, 2_000, &settings(1)).unwrap();
    let (energies, _) = symshadow::experiments::energy::hopping_orbitals(6, 1.0, 3);
    let expect = 2.0 * energies.iter().take(3).sum::<f64>() / 6.0;
    assert!((r.truth - expect).abs() < 1e-12);
}

#[test]
fn identical_configs_give_identical_csv() {
    let text = r#"{"experiment": "slater_2rdm", "n": 4, "eta": 2, "states": 2,
                  "checkpoints": [2000, 4000], "noise": "depolarizing:0.1", "seed": 5, "bootstrap": 20}"#;
    let cfg = ExperimentConfig::from_json(text).unwrap();
    let render = || {
        let mut buf = Vec::new();
        write_csv(&run_experiment(&cfg).unwrap(), &mut buf).unwrap();
        buf
    };
    let first = render();
    assert_eq!(first, render());
    let csv = String::from_utf8(first).unwrap();
    assert!(csv.starts_with("state_id,T,pipeline,epsilon,sigma\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 4);
}
