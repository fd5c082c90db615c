use qcontrol::gates::{cnot, named_gate, NamedGate};
use qcontrol::lab::{cu_settings, run_experiment, Experiment, Mode};
use qcontrol::photonic::NoiseModel;
use qcontrol::tomography::reconstruct::Design;
use qcontrol::tomography::{
    error_bars, expected_dataset, generate_dataset, ideal_chi, linear_inversion, mle_reconstruct, process_fidelity,
    ChiMatrix, MleOptions, TomographyDataset,
};

fn settings() -> qcontrol::lab::GateSettings {
    cu_settings(&named_gate(NamedGate::X)).unwrap()
}

fn coherent_noise(shots: f64) -> NoiseModel {
    NoiseModel {
        phase_jitter_sigma: 0.25,
        distinguishability: 0.97,
        waveplate_angle_error_sigma: 0.0,
        poisson_counts: shots,
    }
}

#[test]
fn linear_and_mle_agree_on_noiseless_data() {
    let data = expected_dataset(&settings(), None, 5000.0).unwrap();
    let ideal = ideal_chi(&cnot()).unwrap();
    let li = linear_inversion(&data).unwrap();
    let mle = mle_reconstruct(&data, &MleOptions::default()).unwrap();
    let (a, b) = (
        process_fidelity(&li.chi, &ideal).unwrap(),
        process_fidelity(&mle.chi, &ideal).unwrap(),
    );
    assert!((a - b).abs() < 1e-6, "{a} vs {b}");
}

#[test]
fn mle_is_physical_on_noisy_data() {
    for seed in 0..3 {
        let data = generate_dataset(&settings(), &NoiseModel::calibrated(), 300.0, seed).unwrap();
        let r = mle_reconstruct(&data, &MleOptions::default()).unwrap();
        r.chi.check_invariants().unwrap();
    }
}

#[test]
fn fidelity_improves_with_counts() {
    let ideal = ideal_chi(&cnot()).unwrap();
    let mean = |shots: f64| {
        let d = expected_dataset(&settings(), Some(&coherent_noise(shots)), shots).unwrap();
        error_bars(&d, &ideal, 20, 5).unwrap().mean
    };
    assert!(mean(1e2) <= mean(1e5));
}

fn predicted_counts(chi: &ChiMatrix, data: &TomographyDataset) -> Vec<f64> {
    let design = Design::new(data).unwrap();
    let p = design.predict(chi.matrix());
    let total: f64 = data.records.iter().map(|r| r.count).sum();
    let scale = total / p.iter().sum::<f64>();
    p.iter().map(|x| x * scale).collect()
}

#[test]
fn reconstruction_reproduces_counts() {
    let data = generate_dataset(&settings(), &coherent_noise(2000.0), 2000.0, 21).unwrap();
    let r = mle_reconstruct(&data, &MleOptions::default()).unwrap();
    let mu = predicted_counts(&r.chi, &data);
    let inside = data
        .records
        .iter()
        .zip(&mu)
        .filter(|(rec, &m)| (rec.count - m).abs() <= 3.0 * m.max(1.0).sqrt())
        .count();
    let frac = inside as f64 / mu.len() as f64;
    assert!(frac >= 0.95, "only {frac:.3} of settings within 3 sigma");
}

/// f1 + f2 − 1 ≤ F_P ≤ min(f1, f2), with slack for shot noise: the truth
/// tables and the tomography dataset are independent samples.
#[test]
fn classical_fidelities_bound_process_fidelity() {
    const SLACK: f64 = 0.01;
    let ideal = ideal_chi(&cnot()).unwrap();
    for seed in [1u64, 2, 3] {
        let noise = coherent_noise(2000.0);
        let res = run_experiment(Experiment::Cnot, &Mode::Sampled { noise, seed }).unwrap();
        let (f1, f2) = (res.fidelities[0], res.fidelities[1]);
        let data = generate_dataset(&settings(), &noise, 2000.0, seed).unwrap();
        let fp = process_fidelity(&mle_reconstruct(&data, &MleOptions::default()).unwrap().chi, &ideal).unwrap();
        assert!(f1 + f2 - 1.0 - SLACK <= fp && fp <= f1.min(f2) + SLACK, "seed {seed}: {f1} {f2} {fp}");
    }
}

#[test]
fn chi_json_roundtrip() {
    let chi = ideal_chi(&cnot()).unwrap();
    let j = serde_json::to_string(&chi.to_json()).unwrap();
    let back = ChiMatrix::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
    assert_eq!(back, chi);
}
