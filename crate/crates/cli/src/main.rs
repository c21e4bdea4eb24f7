//! `viperkit` — command-line pipeline over the core library.
//!
//! Subcommands compose into the full workflow:
//!
//! ```text
//! gen-corpus -> detect -> perturb -> evaluate -> report
//!                `-> validate
//! ```
//!
//! Every option can also come from a flat `key=value` config file pointed at
//! by `VIPERKIT_CONFIG`; explicit flags always win. With a fixed seed and
//! corpus every command's outputs are byte-identical across runs and worker
//! counts.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;

use viperkit_core::corpus::{generate_corpus, manifest_records};
use viperkit_core::detect::{
    all_features, analyze_source, annotate_sample, validate_against_sard, AnnotatedSample,
    FeatureId,
};
use viperkit_core::eval::{
    evaluate_detector, parse_predictions, parse_report_json, reference_predictions,
    render_report_json, render_report_table, CorpusSummary, EvaluationReport, Pct,
    PredictionRecord, Predictions, RefDetector,
};
use viperkit_core::frontend::annotations::extract_annotations;
use viperkit_core::perturb::{generate_for_sample, GenReport, PerturbedVariant};
use viperkit_core::sample::{parse_manifest, render_manifest, CodeSample};

#[derive(Parser)]
#[command(name = "viperkit", version, about = "Vulnerability-feature corpus and evaluation toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a seeded synthetic corpus with FLAW/FIX annotations
    GenCorpus(GenCorpusArgs),
    /// Detect vulnerability features and write annotation records
    Detect(DetectArgs),
    /// Compare detected features against embedded FLAW annotations
    Validate(ValidateArgs),
    /// Generate self-checked FPP/FEP and spurious-feature variants
    Perturb(PerturbArgs),
    /// Score detector predictions over a perturbed corpus
    Evaluate(EvaluateArgs),
    /// Render a previously written evaluation report
    Report(ReportArgs),
}

#[derive(Args)]
struct GenCorpusArgs {
    /// Output directory for .c files and manifest.jsonl
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed; fixed seed gives a byte-identical corpus
    #[arg(long)]
    seed: Option<u64>,
    /// Vulnerable/fixed sample pairs generated per feature
    #[arg(long)]
    per_feature: Option<u32>,
}

#[derive(Args)]
struct DetectArgs {
    /// Corpus directory containing manifest.jsonl
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Where to write annotations.jsonl (defaults to the corpus directory)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated feature list (default: all)
    #[arg(long)]
    features: Option<String>,
    /// Worker threads (0 = all cores)
    #[arg(long)]
    workers: Option<usize>,
    /// Maximum tolerated fraction of unparseable files
    #[arg(long)]
    max_skip_rate: Option<f64>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    features: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct PerturbArgs {
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Variant output directory (defaults to <corpus>/variants)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated features; include SF tokens to enable spurious kinds
    #[arg(long)]
    features: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Variant directory written by `perturb` (defaults to <corpus>/variants)
    #[arg(long)]
    variants: Option<PathBuf>,
    /// Prediction file: one JSON record {id, predicted_label, detector_id} per line
    #[arg(long)]
    predictions: Option<PathBuf>,
    /// Built-in detector to score alongside (repeatable):
    /// oracle | constant_vulnerable | constant_benign | random
    #[arg(long)]
    reference: Vec<String>,
    #[arg(long)]
    features: Option<String>,
    /// FPP tolerance below the reference mean, in percentage points
    #[arg(long)]
    epsilon: Option<String>,
    /// Minimum SR_FEP counted as high, in percent
    #[arg(long)]
    fep_floor: Option<String>,
    /// Seed for the random reference detector
    #[arg(long)]
    seed: Option<u64>,
    /// Report output directory (defaults to the variant directory)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stdout rendering: table | json
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct ReportArgs {
    /// Path to a report.json written by `evaluate`
    input: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match FileConfig::from_env() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::FAILURE;
        }
    };
    let result = match cli.cmd {
        Cmd::GenCorpus(a) => cmd_gen_corpus(&cfg, a),
        Cmd::Detect(a) => cmd_detect(&cfg, a),
        Cmd::Validate(a) => cmd_validate(&cfg, a),
        Cmd::Perturb(a) => cmd_perturb(&cfg, a),
        Cmd::Evaluate(a) => cmd_evaluate(&cfg, a),
        Cmd::Report(a) => cmd_report(&cfg, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

// ---- config file ----

/// Flat `key=value` defaults loaded from the file named by `VIPERKIT_CONFIG`.
/// Lines starting with `#` and blank lines are ignored. Flags override.
struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    fn from_env() -> Result<FileConfig> {
        let mut values = BTreeMap::new();
        if let Ok(path) = std::env::var("VIPERKIT_CONFIG") {
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading VIPERKIT_CONFIG file {path}"))?;
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| anyhow!("{path}:{}: expected key=value", i + 1))?;
                values.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        Ok(FileConfig { values })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| anyhow!("config key {key}={v}: {e}")),
        }
    }
}

fn resolve<T>(flag: Option<T>, cfg: Result<Option<T>>, default: T) -> Result<T> {
    Ok(flag.or(cfg?).unwrap_or(default))
}

fn require_path(flag: Option<PathBuf>, cfg: &FileConfig, key: &str) -> Result<PathBuf> {
    flag.or_else(|| cfg.get(key).map(PathBuf::from))
        .ok_or_else(|| anyhow!("--{key} is required (flag or config)"))
}

/// Parse a decimal percentage exactly into a rational, e.g. "3" or "2.5".
fn parse_pct(s: &str) -> Result<Pct> {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() {
        bail!("empty percentage");
    }
    let digits_ok = |t: &str| t.chars().all(|c| c.is_ascii_digit());
    if !digits_ok(int) || !digits_ok(frac) {
        bail!("bad percentage: {s}");
    }
    let denom = 10i64.checked_pow(frac.len() as u32).ok_or_else(|| anyhow!("too precise: {s}"))?;
    let int_part: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| anyhow!("bad percentage: {s}"))? };
    let frac_part: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| anyhow!("bad percentage: {s}"))? };
    let v = Ratio::new(int_part * denom + frac_part, denom);
    if v < Ratio::from_integer(0) || v > Ratio::from_integer(100) {
        bail!("percentage out of [0, 100]: {s}");
    }
    Ok(v)
}

fn pct_option(flag: Option<String>, cfg: &FileConfig, key: &str, default: i64) -> Result<Pct> {
    match flag.or_else(|| cfg.get(key).map(str::to_string)) {
        Some(s) => parse_pct(&s).with_context(|| format!("--{key}")),
        None => Ok(Ratio::from_integer(default)),
    }
}

/// Parse the --features list into enabled rule features plus an SF toggle.
/// Accepts the ten feature ids and the tokens SF, SF_NODE_SET, SF_EDGE_SET,
/// SF_IDENTIFIER, SF_FORMATTING (any SF token enables all four kinds).
fn parse_features(spec: Option<&str>) -> Result<(BTreeSet<FeatureId>, bool)> {
    let Some(spec) = spec else {
        return Ok((all_features(), true));
    };
    let mut features = BTreeSet::new();
    let mut include_sf = false;
    for raw in spec.split(',') {
        let tok = raw.trim().to_ascii_uppercase();
        if tok.is_empty() {
            continue;
        }
        if tok == "ALL" {
            features.extend(FeatureId::ALL);
            include_sf = true;
        } else if tok == "SF" || tok.starts_with("SF_") {
            include_sf = true;
        } else if let Some(f) = FeatureId::parse(&tok) {
            features.insert(f);
        } else {
            bail!("unknown feature: {raw}");
        }
    }
    Ok((features, include_sf))
}

fn features_option(
    flag: Option<String>,
    cfg: &FileConfig,
) -> Result<(BTreeSet<FeatureId>, bool)> {
    let spec = flag.or_else(|| cfg.get("features").map(str::to_string));
    parse_features(spec.as_deref())
}

// ---- corpus I/O ----

fn load_corpus(dir: &Path) -> Result<Vec<CodeSample>> {
    let manifest_path = dir.join("manifest.jsonl");
    let text = std::fs::read_to_string(&manifest_path)
        .with_context(|| format!("reading {}", manifest_path.display()))?;
    let records = parse_manifest(&text).context("parsing manifest.jsonl")?;
    let mut samples = Vec::with_capacity(records.len());
    for r in records {
        let path = dir.join(&r.path);
        let source = std::fs::read_to_string(&path)
            .with_context(|| format!("reading {}", path.display()))?;
        let sample = CodeSample {
            sample_id: r.sample_id,
            path: r.path,
            label: r.label,
            cwe: r.cwe,
            vulnerable_lines: r.vulnerable_lines,
            source,
        };
        sample.check_invariants().map_err(|e| anyhow!("manifest invariant: {e}"))?;
        samples.push(sample);
    }
    Ok(samples)
}

fn load_variants(dir: &Path) -> Result<Vec<PerturbedVariant>> {
    let manifest_path = dir.join("variants.jsonl");
    let text = std::fs::read_to_string(&manifest_path)
        .with_context(|| format!("reading {}", manifest_path.display()))?;
    let mut variants = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let mut v: PerturbedVariant = serde_json::from_str(line).context("parsing variants.jsonl")?;
        let path = dir.join(v.file_name());
        v.source = std::fs::read_to_string(&path)
            .with_context(|| format!("reading {}", path.display()))?;
        variants.push(v);
    }
    Ok(variants)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Run `job` over the items on a fixed-size worker pool, preserving order so
/// worker count never changes any output.
fn map_samples<T: Send, F: Fn(&CodeSample) -> T + Sync>(
    samples: &[CodeSample],
    workers: usize,
    job: F,
) -> Result<Vec<T>> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("building worker pool")?;
    Ok(pool.install(|| samples.par_iter().map(|s| job(s)).collect()))
}

/// Parse and detect over the whole corpus; unparseable files become skip
/// strings instead of witnesses.
fn analyze_corpus(
    samples: &[CodeSample],
    features: &BTreeSet<FeatureId>,
    workers: usize,
) -> Result<(Vec<AnnotatedSample>, Vec<String>)> {
    let results = map_samples(samples, workers, |s| {
        analyze_source(&s.source, &s.vulnerable_lines, features)
            .map(|ws| annotate_sample(s, ws))
            .map_err(|e| format!("{}: {}", s.path, e))
    })?;
    let mut annotated = Vec::new();
    let mut skipped = Vec::new();
    for r in results {
        match r {
            Ok(a) => annotated.push(a),
            Err(e) => skipped.push(e),
        }
    }
    Ok((annotated, skipped))
}

// ---- subcommands ----

fn cmd_gen_corpus(cfg: &FileConfig, a: GenCorpusArgs) -> Result<()> {
    let out = require_path(a.out, cfg, "out")?;
    let seed = resolve(a.seed, cfg.parsed("seed"), 1)?;
    let per_feature = resolve(a.per_feature, cfg.parsed("per_feature"), 2)?;
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let generated = generate_corpus(seed, per_feature);
    for g in &generated {
        write_file(&out.join(&g.sample.path), &g.sample.source)?;
    }
    let records = manifest_records(&generated);
    write_file(&out.join("manifest.jsonl"), &render_manifest(&records))?;
    println!("wrote {} samples to {}", generated.len(), out.display());
    Ok(())
}

fn cmd_detect(cfg: &FileConfig, a: DetectArgs) -> Result<()> {
    let corpus = require_path(a.corpus, cfg, "corpus")?;
    let out = a.out.or_else(|| cfg.get("out").map(PathBuf::from)).unwrap_or_else(|| corpus.clone());
    let (features, _) = features_option(a.features, cfg)?;
    let workers = resolve(a.workers, cfg.parsed("workers"), 0)?;
    let max_skip_rate = resolve(a.max_skip_rate, cfg.parsed("max_skip_rate"), 0.25)?;

    let samples = load_corpus(&corpus)?;
    let (annotated, skipped) = analyze_corpus(&samples, &features, workers)?;

    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let mut lines = String::new();
    for a in &annotated {
        lines.push_str(&serde_json::to_string(a).expect("annotation serializes"));
        lines.push('\n');
    }
    write_file(&out.join("annotations.jsonl"), &lines)?;

    let mut counts: BTreeMap<FeatureId, usize> = FeatureId::ALL.iter().map(|f| (*f, 0)).collect();
    for ann in &annotated {
        for w in &ann.witnesses {
            *counts.entry(w.feature).or_insert(0) += 1;
        }
    }
    println!("samples: {}", samples.len());
    println!("witnesses: {}", annotated.iter().map(|a| a.witnesses.len()).sum::<usize>());
    for f in FeatureId::ALL {
        println!("  {}: {}", f.as_str(), counts[&f]);
    }
    println!("skipped: {}", skipped.len());
    for s in &skipped {
        println!("  {s}");
    }
    if !samples.is_empty() {
        let rate = skipped.len() as f64 / samples.len() as f64;
        if rate > max_skip_rate {
            bail!("{} of {} files unparseable exceeds ceiling {max_skip_rate}", skipped.len(), samples.len());
        }
    }
    Ok(())
}

fn cmd_validate(cfg: &FileConfig, a: ValidateArgs) -> Result<()> {
    let corpus = require_path(a.corpus, cfg, "corpus")?;
    let (features, _) = features_option(a.features, cfg)?;
    let workers = resolve(a.workers, cfg.parsed("workers"), 0)?;

    let samples = load_corpus(&corpus)?;
    let (annotated, skipped) = analyze_corpus(&samples, &features, workers)?;
    let by_id: BTreeMap<&str, &CodeSample> =
        samples.iter().map(|s| (s.sample_id.as_str(), s)).collect();
    let pairs: Vec<_> = annotated
        .into_iter()
        .map(|a| {
            let anns = extract_annotations(&by_id[a.sample_id.as_str()].source);
            (a, anns)
        })
        .collect();
    let report = validate_against_sard(&pairs);
    match report.agreement_rate {
        Some((agree, total)) => {
            println!("agreement rate: {agree}/{total} ({:.2})", report.rate().unwrap());
        }
        None => println!("warning: agreement rate UNDEFINED (no comparable samples)"),
    }
    for s in report.samples.iter().filter(|s| !s.agree) {
        println!(
            "  disagreement {}: detected lines {:?}, annotated lines {:?}",
            s.sample_id,
            s.witness_lines.iter().collect::<Vec<_>>(),
            s.annotation_lines.iter().collect::<Vec<_>>()
        );
    }
    for s in &skipped {
        println!("  skipped {s}");
    }
    Ok(())
}

fn cmd_perturb(cfg: &FileConfig, a: PerturbArgs) -> Result<()> {
    let corpus = require_path(a.corpus, cfg, "corpus")?;
    let out = a
        .out
        .or_else(|| cfg.get("out").map(PathBuf::from))
        .unwrap_or_else(|| corpus.join("variants"));
    let (features, include_sf) = features_option(a.features, cfg)?;
    let workers = resolve(a.workers, cfg.parsed("workers"), 0)?;

    let samples = load_corpus(&corpus)?;
    let (annotated, parse_skipped) = analyze_corpus(&samples, &features, workers)?;
    let by_id: BTreeMap<&str, &AnnotatedSample> =
        annotated.iter().map(|a| (a.sample_id.as_str(), a)).collect();

    let reports = map_samples(&samples, workers, |s| {
        by_id.get(s.sample_id.as_str()).map(|ann| generate_for_sample(s, ann, include_sf))
    })?;
    let mut merged = GenReport::default();
    for r in reports.into_iter().flatten() {
        merged.variants.extend(r.variants);
        merged.skipped.extend(r.skipped);
        merged.failures.extend(r.failures);
    }
    merged.skipped.extend(parse_skipped.iter().map(|s| format!("unparseable: {s}")));

    // Self-check gate: any FEP that fails to kill or FPP that fails to keep
    // its feature aborts the run before anything is written.
    if !merged.failures.is_empty() {
        for f in &merged.failures {
            eprintln!("self-check failure: {f}");
        }
        bail!("{} variants failed self-check; nothing written", merged.failures.len());
    }

    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let mut manifest = String::new();
    for v in &merged.variants {
        write_file(&out.join(v.file_name()), &v.source)?;
        manifest.push_str(&serde_json::to_string(v).expect("variant serializes"));
        manifest.push('\n');
    }
    write_file(&out.join("variants.jsonl"), &manifest)?;
    let mut skipped_text = String::new();
    for s in &merged.skipped {
        skipped_text.push_str(s);
        skipped_text.push('\n');
    }
    write_file(&out.join("skipped.txt"), &skipped_text)?;

    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for v in &merged.variants {
        let key = match v.feature {
            Some(f) => format!("{} {}", f.as_str(), v.kind.as_str()),
            None => v.kind.as_str().to_string(),
        };
        *counts.entry(key).or_insert(0) += 1;
    }
    println!("variants: {}", merged.variants.len());
    for (key, n) in &counts {
        println!("  {key}: {n}");
    }
    println!("skipped: {}", merged.skipped.len());
    for s in &merged.skipped {
        println!("  {s}");
    }
    Ok(())
}

fn cmd_evaluate(cfg: &FileConfig, a: EvaluateArgs) -> Result<()> {
    let corpus = require_path(a.corpus, cfg, "corpus")?;
    let variants_dir = a
        .variants
        .or_else(|| cfg.get("variants").map(PathBuf::from))
        .unwrap_or_else(|| corpus.join("variants"));
    let out = a
        .out
        .or_else(|| cfg.get("out").map(PathBuf::from))
        .unwrap_or_else(|| variants_dir.clone());
    let (features, _) = features_option(a.features, cfg)?;
    let epsilon = pct_option(a.epsilon, cfg, "epsilon", 3)?;
    let fep_floor = pct_option(a.fep_floor, cfg, "fep_floor", 51)?;
    let seed = resolve(a.seed, cfg.parsed("seed"), 1)?;
    let format = resolve(a.format, Ok(cfg.get("format").map(str::to_string)), "table".into())?;
    let fpp_reference_mean = match cfg.get("fpp_reference_mean") {
        Some(s) => Some(parse_pct(s).context("config key fpp_reference_mean")?),
        None => None,
    };

    let samples = load_corpus(&corpus)?;
    let variants = load_variants(&variants_dir)?;
    let skipped = std::fs::read_to_string(variants_dir.join("skipped.txt"))
        .map(|t| t.lines().map(str::to_string).collect())
        .unwrap_or_default();

    let mut records: Vec<PredictionRecord> = Vec::new();
    if let Some(path) = a.predictions.or_else(|| cfg.get("predictions").map(PathBuf::from)) {
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading {}", path.display()))?;
        records.extend(parse_predictions(&text).context("parsing predictions")?);
    }
    let mut reference = a.reference;
    if reference.is_empty() {
        if let Some(r) = cfg.get("reference") {
            reference = r.split(',').map(str::to_string).collect();
        }
    }
    for name in &reference {
        let kind = match name.trim() {
            "random" => RefDetector::Random(seed),
            other => RefDetector::parse(other).ok_or_else(|| anyhow!("unknown reference detector: {other}"))?,
        };
        records.extend(reference_predictions(kind, &samples, &variants));
    }
    if records.is_empty() {
        bail!("no predictions: pass --predictions and/or --reference");
    }

    // A prediction is required for every sample and every effective variant;
    // list every missing id before failing.
    let detector_ids = Predictions::detector_ids(&records);
    let mut missing = Vec::new();
    for id in &detector_ids {
        let preds = Predictions::index(&records, id);
        for s in &samples {
            if preds.get(&s.sample_id).is_err() {
                missing.push(format!("{id}: {}", s.sample_id));
            }
        }
        for v in variants.iter().filter(|v| !v.no_op) {
            if preds.get(&v.variant_id).is_err() {
                missing.push(format!("{id}: {}", v.variant_id));
            }
        }
    }
    if !missing.is_empty() {
        for m in &missing {
            eprintln!("missing prediction: {m}");
        }
        bail!("{} predictions missing", missing.len());
    }

    let feature_order: Vec<FeatureId> =
        FeatureId::ALL.iter().copied().filter(|f| features.contains(f)).collect();
    let disabled_features: Vec<FeatureId> =
        FeatureId::ALL.iter().copied().filter(|f| !features.contains(f)).collect();
    let mut detectors = Vec::new();
    for id in &detector_ids {
        let preds = Predictions::index(&records, id);
        let report = evaluate_detector(
            &samples,
            &variants,
            &preds,
            &feature_order,
            fpp_reference_mean,
            epsilon,
            fep_floor,
        )?;
        detectors.push(report);
    }
    let report = EvaluationReport {
        detectors,
        summary: CorpusSummary {
            samples: samples.len() as u64,
            variants: variants.len() as u64,
            skipped,
            disabled_features,
        },
    };

    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    write_file(&out.join("report.json"), &render_report_json(&report))?;
    write_file(&out.join("report.txt"), &render_report_table(&report))?;
    print!("{}", render(&report, &format)?);
    Ok(())
}

fn cmd_report(cfg: &FileConfig, a: ReportArgs) -> Result<()> {
    let input = a
        .input
        .or_else(|| cfg.get("report").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("report.json"));
    let format = resolve(a.format, Ok(cfg.get("format").map(str::to_string)), "table".into())?;
    let text = std::fs::read_to_string(&input)
        .with_context(|| format!("reading {}", input.display()))?;
    let report = parse_report_json(&text).context("parsing report")?;
    print!("{}", render(&report, &format)?);
    Ok(())
}

fn render(report: &EvaluationReport, format: &str) -> Result<String> {
    match format {
        "table" => Ok(render_report_table(report)),
        "json" => Ok(render_report_json(report) + "\n"),
        other => bail!("unknown format: {other} (expected table or json)"),
    }
}
