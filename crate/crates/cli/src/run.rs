//! One function per subcommand, each returning a data-level `Result`.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use cadence_core::augment::{apply_chain, sample_augmentation_chain_with};
use cadence_core::config::{
    parse_probe_config, parse_train_config, probe_canonical_string, sha256_hex,
};
use cadence_core::evaluation::seg_eval_report;
use cadence_core::ingest::{
    load_dataset, read_canonical, write_canonical, DatasetDescriptor, DatasetKind,
};
use cadence_core::io::{
    parse_labels_csv, parse_segments_csv, read_embeddings, render_eval_csv, render_loss_csv,
    render_probe_csv, render_segments_csv, write_atomic, write_embeddings, NA_MARKER,
};
use cadence_core::nn::{load_checkpoint, save_checkpoint};
use cadence_core::pairing::WindowIndex;
use cadence_core::probe::{
    baseline_series, embed_windows, full_split_accuracies, label_efficiency_curve, FeatureSource,
};
use cadence_core::segmentation::segment_timeseries;
use cadence_core::signal::windows_from_recordings;
use cadence_core::synth::{generate, SynthConfig};
use cadence_core::training::train_with;
use cadence_core::{CadenceError, Result};

use crate::manifest::{manifest_dir, RunManifest};
use crate::Command;

pub fn dispatch(command: Command, seed: Option<u64>) -> Result<()> {
    match command {
        Command::Ingest { dataset, input, out } => ingest(&dataset, &input, &out, seed),
        Command::Train { data, out, config, steps, resume } => {
            train(&data, &out, config.as_deref(), steps, resume.as_deref(), seed)
        }
        Command::Embed { data, checkpoint, baseline, out } => {
            embed(&data, checkpoint.as_deref(), baseline, &out, seed)
        }
        Command::Probe { embeddings, config, source, out } => {
            probe(&embeddings, config.as_deref(), source.as_deref(), &out, seed)
        }
        Command::Segment { embeddings, out } => segment(&embeddings, &out, seed),
        Command::EvalSeg { segments, labels, out } => eval_seg(&segments, &labels, &out, seed),
        Command::AugmentPreview { data, out, count, config } => {
            augment_preview(&data, &out, count, config.as_deref(), seed)
        }
        Command::Synth { classes, subjects, blocks, block_min_s, block_max_s, noise_g, out } => {
            synth(classes, subjects, blocks, block_min_s, block_max_s, noise_g, &out, seed)
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CadenceError::io(path, e))
}

fn read_config_text(path: Option<&Path>) -> Result<String> {
    match path {
        Some(p) => read_text(p),
        None => Ok(String::new()),
    }
}

fn ratio_text(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.3}"),
        None => NA_MARKER.into(),
    }
}

fn ingest(dataset: &str, input: &Path, out: &Path, seed: Option<u64>) -> Result<()> {
    let mut manifest = RunManifest::start("ingest").input(input);
    let kind = DatasetKind::parse(dataset).ok_or_else(|| {
        CadenceError::UnknownLayout(format!(
            "unknown dataset {dataset:?} (expected pamap2, mhealth, hmpadl, dailysports, \
             or canonical)"
        ))
    })?;
    let pairs = load_dataset(&DatasetDescriptor::for_kind(kind), input)?;
    for (rec, intervals) in &pairs {
        write_canonical(rec, intervals, out)?;
    }

    manifest.config_hash = sha256_hex(format!("dataset={}\n", kind.name()).as_bytes());
    manifest.seed = seed.unwrap_or(0);
    manifest.output = out.to_path_buf();
    manifest.write(out)?;
    println!("ingested {} recordings → {}", pairs.len(), out.display());
    Ok(())
}

fn train(
    data: &Path,
    out: &Path,
    config: Option<&Path>,
    steps: Option<u64>,
    resume: Option<&Path>,
    seed: Option<u64>,
) -> Result<()> {
    let mut manifest = RunManifest::start("train").input(data);
    let mut cfg = parse_train_config(&read_config_text(config)?)?;
    if let Some(steps) = steps {
        cfg.steps = steps;
    }
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    cfg.validate()?;

    let pairs = read_canonical(data)?;
    let index = WindowIndex::new(windows_from_recordings(&pairs)?)?;
    let resume_checkpoint = match resume {
        Some(path) => {
            manifest = manifest.input(path);
            Some(load_checkpoint(path)?)
        }
        None => None,
    };

    std::fs::create_dir_all(out).map_err(|e| CadenceError::io(out, e))?;
    let checkpoint_path = out.join("checkpoint.bin");
    let result = train_with(&cfg, &index, resume_checkpoint, |ck| {
        save_checkpoint(&checkpoint_path, &ck.params, &ck.opt, ck.step, ck.seed, &ck.config_hash)
    })?;
    let first_step = result.checkpoint.step - result.loss_trace.len() as u64;
    write_atomic(
        &out.join("loss.csv"),
        render_loss_csv(first_step, &result.loss_trace).as_bytes(),
    )?;

    if let Some(path) = config {
        manifest = manifest.input(path);
    }
    manifest.config_hash = cfg.config_hash();
    manifest.seed = cfg.seed;
    manifest.output = out.to_path_buf();
    manifest.write(out)?;
    println!(
        "trained {} windows to step {}; final loss {:.4} → {}",
        index.len(),
        result.checkpoint.step,
        result.loss_trace.last().copied().unwrap_or(f32::NAN),
        out.display()
    );
    Ok(())
}

fn embed(
    data: &Path,
    checkpoint: Option<&Path>,
    baseline: bool,
    out: &Path,
    seed: Option<u64>,
) -> Result<()> {
    let mut manifest = RunManifest::start("embed").input(data);
    let pairs = read_canonical(data)?;
    let windows = windows_from_recordings(&pairs)?;
    let series = if baseline {
        manifest.config_hash = sha256_hex(b"source=baseline\n");
        baseline_series(&windows)?
    } else {
        let path = checkpoint.ok_or_else(|| {
            CadenceError::InvalidConfig("embed needs --checkpoint or --baseline".into())
        })?;
        manifest = manifest.input(path);
        let ck = load_checkpoint(path)?;
        manifest.config_hash = ck.config_hash.clone();
        embed_windows(&ck.params.encoder, &windows)?
    };
    write_embeddings(out, &series)?;

    manifest.seed = seed.unwrap_or(0);
    manifest.output = out.to_path_buf();
    manifest.write(&manifest_dir(out))?;
    println!(
        "embedded {} windows at dim {} → {}",
        series.len(),
        series.dim(),
        out.display()
    );
    Ok(())
}

fn probe(
    embeddings: &Path,
    config: Option<&Path>,
    source: Option<&str>,
    out: &Path,
    seed: Option<u64>,
) -> Result<()> {
    let mut manifest = RunManifest::start("probe").input(embeddings);
    let mut cfg = parse_probe_config(&read_config_text(config)?)?;
    if let Some(source) = source {
        cfg.source = match source {
            "embedding" => FeatureSource::Embedding,
            "baseline" => FeatureSource::Baseline,
            _ => {
                return Err(CadenceError::InvalidConfig(format!(
                    "--source {source:?}: expected embedding or baseline"
                )))
            }
        };
    }
    if let Some(seed) = seed {
        cfg.seed = seed;
    }

    let series = read_embeddings(embeddings)?;
    let report = label_efficiency_curve(&series, &cfg)?;
    let full = full_split_accuracies(&series, &cfg)?;
    write_atomic(out, render_probe_csv(&report, &full).as_bytes())?;

    if let Some(path) = config {
        manifest = manifest.input(path);
    }
    manifest.config_hash = sha256_hex(probe_canonical_string(&cfg).as_bytes());
    manifest.seed = cfg.seed;
    manifest.output = out.to_path_buf();
    manifest.write(&manifest_dir(out))?;
    for cell in &report.cells {
        println!(
            "{} n={:>3}: accuracy {:.3} ± {:.3}",
            cfg.source.name(),
            cell.n,
            cell.mean(),
            cell.ci_halfwidth()
        );
    }
    let full_mean = full.iter().sum::<f64>() / full.len() as f64;
    println!("{} full split: accuracy {:.3} → {}", cfg.source.name(), full_mean, out.display());
    Ok(())
}

fn segment(embeddings: &Path, out: &Path, seed: Option<u64>) -> Result<()> {
    let mut manifest = RunManifest::start("segment").input(embeddings);
    let series = read_embeddings(embeddings)?;
    let segments = segment_timeseries(&series)?;
    write_atomic(out, render_segments_csv(&segments).as_bytes())?;

    manifest.config_hash = sha256_hex(b"");
    manifest.seed = seed.unwrap_or(0);
    manifest.output = out.to_path_buf();
    manifest.write(&manifest_dir(out))?;
    let subjects: BTreeSet<&str> = segments.iter().map(|s| s.subject_id.as_str()).collect();
    println!(
        "{} salient segments across {} subjects → {}",
        segments.len(),
        subjects.len(),
        out.display()
    );
    Ok(())
}

fn eval_seg(segments: &Path, labels: &Path, out: &Path, seed: Option<u64>) -> Result<()> {
    let mut manifest = RunManifest::start("eval-seg").input(segments).input(labels);
    let predictions =
        parse_segments_csv(&read_text(segments)?, &segments.display().to_string())?;
    let truth: Vec<(String, Vec<_>)> = if labels.is_dir() {
        read_canonical(labels)?
            .into_iter()
            .map(|(rec, intervals)| (rec.subject_id, intervals))
            .collect()
    } else {
        parse_labels_csv(&read_text(labels)?, &labels.display().to_string())?
    };
    let report = seg_eval_report(&predictions, &truth);
    write_atomic(out, render_eval_csv(&report).as_bytes())?;

    manifest.config_hash = sha256_hex(b"");
    manifest.seed = seed.unwrap_or(0);
    manifest.output = out.to_path_buf();
    manifest.write(&manifest_dir(out))?;
    let o = &report.overall;
    println!(
        "overall: event P {} R {}, window P {} R {} → {}",
        ratio_text(o.event_precision),
        ratio_text(o.event_recall),
        ratio_text(o.window_precision),
        ratio_text(o.window_recall),
        out.display()
    );
    Ok(())
}

fn augment_preview(
    data: &Path,
    out: &Path,
    count: usize,
    config: Option<&Path>,
    seed: Option<u64>,
) -> Result<()> {
    let mut manifest = RunManifest::start("augment-preview").input(data);
    if count == 0 {
        return Err(CadenceError::InvalidConfig("preview count must be ≥ 1".into()));
    }
    let cfg = parse_train_config(&read_config_text(config)?)?;
    let ranges = &cfg.augmentation;
    let pairs = read_canonical(data)?;
    let windows = windows_from_recordings(&pairs)?;
    if windows.is_empty() {
        return Err(CadenceError::EmptyDataset);
    }
    let seed = seed.unwrap_or(0);
    let count = count.min(windows.len());

    let mut chains_csv = String::from("index,subject_id,start_ms,chain\n");
    for i in 0..count {
        let window = &windows[i * windows.len() / count];
        let chain = sample_augmentation_chain_with(ranges, seed.wrapping_add(2 * i as u64));
        let after = apply_chain(&chain, window, seed.wrapping_add(2 * i as u64 + 1))?;

        let mut csv = String::from("sample,orig_x,orig_y,orig_z,aug_x,aug_y,aug_z\n");
        for (s, (o, a)) in window.data.iter().zip(&after.data).enumerate() {
            let _ = writeln!(csv, "{s},{},{},{},{},{},{}", o[0], o[1], o[2], a[0], a[1], a[2]);
        }
        write_atomic(&out.join(format!("preview_{i:02}.csv")), csv.as_bytes())?;

        let kinds: Vec<&str> = chain.iter().map(|spec| spec.kind_name()).collect();
        let _ = writeln!(
            chains_csv,
            "{i},{},{},{}",
            window.subject_id,
            window.start_time_ms,
            kinds.join("+")
        );
    }
    write_atomic(&out.join("chains.csv"), chains_csv.as_bytes())?;

    // Identity: the preview count plus the augmentation ranges in play.
    let mut params = format!("count={count}\n");
    for line in cfg.canonical_string().lines() {
        if line.starts_with("augment.") {
            params.push_str(line);
            params.push('\n');
        }
    }
    if let Some(path) = config {
        manifest = manifest.input(path);
    }
    manifest.config_hash = sha256_hex(params.as_bytes());
    manifest.seed = seed;
    manifest.output = out.to_path_buf();
    manifest.write(out)?;
    println!("wrote {count} before/after previews → {}", out.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn synth(
    classes: usize,
    subjects: usize,
    blocks: usize,
    block_min_s: u32,
    block_max_s: u32,
    noise_g: f64,
    out: &Path,
    seed: Option<u64>,
) -> Result<()> {
    let mut manifest = RunManifest::start("synth");
    let cfg = SynthConfig {
        classes,
        subjects,
        blocks_per_subject: blocks,
        block_min_s,
        block_max_s,
        noise_g,
        seed: seed.unwrap_or(0),
    };
    let corpus = generate(&cfg)?;
    for (rec, intervals) in &corpus {
        write_canonical(rec, intervals, out)?;
    }

    let params = format!(
        "classes={}\nsubjects={}\nblocks={}\nblock_min_s={}\nblock_max_s={}\nnoise_g={}\nseed={}\n",
        cfg.classes,
        cfg.subjects,
        cfg.blocks_per_subject,
        cfg.block_min_s,
        cfg.block_max_s,
        cfg.noise_g,
        cfg.seed
    );
    manifest.config_hash = sha256_hex(params.as_bytes());
    manifest.seed = cfg.seed;
    manifest.output = out.to_path_buf();
    manifest.write(out)?;
    let samples: usize = corpus.iter().map(|(rec, _)| rec.samples.len()).sum();
    println!(
        "generated {} subjects, {} classes, {} samples → {}",
        cfg.subjects,
        cfg.classes,
        samples,
        out.display()
    );
    Ok(())
}
