//! Temporary diagnostics for the end-to-end probe criterion. Deleted before
//! release.

use cadence_core::nn::{EncoderConfig, ModelConfig, ModelParams};
use cadence_core::probe::{
    baseline_series, embed_windows, full_split_accuracies, label_efficiency_curve, FeatureSource,
    ProbeConfig,
};
use cadence_core::signal::windows_from_recordings;
use cadence_core::synth::{generate, SynthConfig};
use cadence_core::Window;

fn band_energy(w: &Window, freq_hz: f64) -> f64 {
    let n = w.data.len() as f64;
    let mut total = 0.0;
    for axis in 0..3 {
        let (mut re, mut im) = (0.0, 0.0);
        for (t, s) in w.data.iter().enumerate() {
            let phase = std::f64::consts::TAU * freq_hz * t as f64 / 30.0;
            re += s[axis] * phase.cos();
            im -= s[axis] * phase.sin();
        }
        total += (re * re + im * im) / (n * n);
    }
    total
}

#[test]
fn diagnose_probe_arms() {
    let corpus = generate(&SynthConfig { classes: 3, subjects: 20, ..Default::default() })
        .unwrap();
    let probe_windows = windows_from_recordings(&corpus[15..]).unwrap();
    println!("probe windows: {}", probe_windows.len());
    let mut counts = std::collections::BTreeMap::new();
    for w in &probe_windows {
        *counts.entry(w.label.clone().unwrap_or("NONE".into())).or_insert(0) += 1;
    }
    println!("label counts: {counts:?}");

    // Window-level separability: mean band energy at each class frequency.
    for class in 0..3 {
        let name = format!("class{class}");
        let sel: Vec<&Window> =
            probe_windows.iter().filter(|w| w.label.as_deref() == Some(&name)).collect();
        let mean_at = |f: f64| {
            sel.iter().map(|w| band_energy(w, f)).sum::<f64>() / sel.len() as f64
        };
        println!(
            "{name}: E(0.75)={:.5} E(1.125)={:.5} E(1.6875)={:.5}",
            mean_at(0.75),
            mean_at(1.125),
            mean_at(1.6875)
        );
    }

    let model = ModelConfig {
        encoder: EncoderConfig {
            input_len: 300,
            in_channels: 3,
            kernel: 5,
            stride: 2,
            channels: vec![8, 16, 32],
            embed_dim: 32,
        },
        projector_hidden: 16,
    };
    let untrained = ModelParams::<f32>::init(&model, 7).unwrap();
    let series = embed_windows(&untrained.encoder, &probe_windows).unwrap();
    let baseline = baseline_series(&probe_windows).unwrap();

    for (tag, s, source) in [
        ("untrained", &series, FeatureSource::Embedding),
        ("baseline", &baseline, FeatureSource::Baseline),
    ] {
        for n in [10usize, 50] {
            let cfg = ProbeConfig {
                n_values: vec![n],
                repeats: 5,
                train_fraction: 0.75,
                source,
                seed: 99,
            };
            let mean = label_efficiency_curve(s, &cfg).unwrap().cells[0].mean();
            println!("{tag} n={n}: {mean:.4}");
        }
        let cfg = ProbeConfig {
            n_values: vec![10],
            repeats: 5,
            train_fraction: 0.75,
            source,
            seed: 99,
        };
        let full = full_split_accuracies(s, &cfg).unwrap();
        let full_mean = full.iter().sum::<f64>() / full.len() as f64;
        println!("{tag} full-split: {full_mean:.4}");
    }
}
