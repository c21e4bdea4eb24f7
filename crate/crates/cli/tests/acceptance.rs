//! Acceptance suite: one test per release criterion, each printing a single
//! PASS/FAIL line (run with `--nocapture` to see them regardless of outcome).

#[path = "../../core/tests/common/oracles.rs"]
mod oracles;

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};

use viperkit_core::corpus::{generate_corpus, GeneratedSample};
use viperkit_core::cpg::builder::build_cpg;
use viperkit_core::cpg::consts::{eval_const, ConstValue};
use viperkit_core::detect::{
    all_features, analyze_source, annotate_sample, validate_against_sard, AnnotatedSample,
    FeatureId,
};
use viperkit_core::eval::{
    evaluate_detector, pct_str, reference_predictions, satisfaction, Category,
    Pct, PredictionRecord, Predictions, RefDetector,
};
use viperkit_core::frontend::annotations::extract_annotations;
use viperkit_core::frontend::ast::StmtKind;
use viperkit_core::frontend::parser::parse;
use viperkit_core::perturb::{generate_for_sample, PerturbKind, PerturbedVariant};
use viperkit_core::sample::Label;

fn criterion(n: u32, desc: &str, body: impl FnOnce() -> Result<(), String>) {
    match body() {
        Ok(()) => println!("PASS criterion {n}: {desc}"),
        Err(e) => {
            println!("FAIL criterion {n}: {desc} ({e})");
            panic!("criterion {n} failed: {e}");
        }
    }
}

fn err(msg: impl Into<String>) -> Result<(), String> {
    Err(msg.into())
}

/// Generated corpus plus everything detection and perturbation derive from
/// it, shared by the desk-scale criteria.
struct Pipeline {
    corpus: Vec<GeneratedSample>,
    annotated: Vec<AnnotatedSample>,
    variants: Vec<PerturbedVariant>,
}

fn run_pipeline(seed: u64, per_feature: u32) -> Result<Pipeline, String> {
    let corpus = generate_corpus(seed, per_feature);
    let mut annotated = Vec::new();
    let mut variants = Vec::new();
    for g in &corpus {
        let ws = analyze_source(&g.sample.source, &g.sample.vulnerable_lines, &all_features())
            .map_err(|e| format!("{}: {}", g.sample.sample_id, e))?;
        let ann = annotate_sample(&g.sample, ws);
        let report = generate_for_sample(&g.sample, &ann, true);
        if !report.failures.is_empty() {
            return Err(format!("{}: self-check failures: {:?}", g.sample.sample_id, report.failures));
        }
        annotated.push(ann);
        variants.extend(report.variants);
    }
    Ok(Pipeline { corpus, annotated, variants })
}

#[test]
fn criterion_1_detection_fidelity() {
    criterion(1, "per-feature precision/recall 1.00 and annotation agreement 1.00 in under 10s", || {
        let start = Instant::now();
        let p = run_pipeline(11, 2)?;
        if p.corpus.len() < 40 {
            return err(format!("corpus too small: {}", p.corpus.len()));
        }
        for f in FeatureId::ALL {
            let mut tp = 0u32;
            let mut fp = 0u32;
            let mut fn_ = 0u32;
            for (g, ann) in p.corpus.iter().zip(&p.annotated) {
                let truth = g.feature == f && g.sample.label == Label::Vulnerable;
                let detected = ann.witnesses.iter().any(|w| w.feature == f);
                match (truth, detected) {
                    (true, true) => tp += 1,
                    (false, true) => fp += 1,
                    (true, false) => fn_ += 1,
                    _ => {}
                }
            }
            if fp != 0 || fn_ != 0 || tp == 0 {
                return err(format!("{}: tp={tp} fp={fp} fn={fn_}", f.as_str()));
            }
        }
        let pairs: Vec<_> = p
            .corpus
            .iter()
            .zip(&p.annotated)
            .map(|(g, a)| (a.clone(), extract_annotations(&g.sample.source)))
            .collect();
        let report = validate_against_sard(&pairs);
        match report.agreement_rate {
            Some((a, n)) if a == n && n > 0 => {}
            other => return err(format!("agreement rate not 1.00: {other:?}")),
        }
        if start.elapsed().as_secs() >= 10 {
            return err(format!("took {:?}", start.elapsed()));
        }
        Ok(())
    });
}

#[test]
fn criterion_2_fep_kill_fpp_keep() {
    criterion(2, "every FEP removes its feature and every FPP retains it on re-analysis", || {
        let p = run_pipeline(11, 2)?;
        let mut checked = 0;
        for v in &p.variants {
            let Some(f) = v.feature else { continue };
            let ws = analyze_source(&v.source, &v.vulnerable_lines, &all_features())
                .map_err(|e| format!("{}: {}", v.variant_id, e))?;
            let has = ws.iter().any(|w| w.feature == f);
            match v.kind {
                PerturbKind::Fep if has => {
                    return err(format!("{}: feature {} survived the FEP", v.variant_id, f.as_str()))
                }
                PerturbKind::Fpp if !has => {
                    return err(format!("{}: feature {} lost by the FPP", v.variant_id, f.as_str()))
                }
                _ => {}
            }
            checked += 1;
        }
        if checked == 0 {
            return err("no feature variants generated");
        }
        Ok(())
    });
}

#[test]
fn criterion_3_sf_neutrality() {
    criterion(3, "all four spurious-feature perturbations leave every witness set unchanged", || {
        let p = run_pipeline(11, 2)?;
        let by_id: BTreeMap<&str, &AnnotatedSample> =
            p.annotated.iter().map(|a| (a.sample_id.as_str(), a)).collect();
        let mut per_kind: BTreeMap<PerturbKind, u32> = BTreeMap::new();
        for v in p.variants.iter().filter(|v| v.kind.is_sf()) {
            let ws = analyze_source(&v.source, &v.vulnerable_lines, &all_features())
                .map_err(|e| format!("{}: {}", v.variant_id, e))?;
            let mut got: Vec<FeatureId> = ws.iter().map(|w| w.feature).collect();
            let mut want: Vec<FeatureId> =
                by_id[v.parent.as_str()].witnesses.iter().map(|w| w.feature).collect();
            got.sort();
            want.sort();
            if got != want {
                return err(format!("{}: witness set changed: {:?} vs {:?}", v.variant_id, got, want));
            }
            *per_kind.entry(v.kind).or_insert(0) += 1;
        }
        for kind in [
            PerturbKind::SfNodeSet,
            PerturbKind::SfEdgeSet,
            PerturbKind::SfIdentifier,
            PerturbKind::SfFormatting,
        ] {
            if per_kind.get(&kind).copied().unwrap_or(0) != p.corpus.len() as u32 {
                return err(format!("{:?}: expected one variant per sample", kind));
            }
        }
        Ok(())
    });
}

fn eval_reference(p: &Pipeline, kind: RefDetector) -> Result<viperkit_core::eval::DetectorReport, String> {
    let samples: Vec<_> = p.corpus.iter().map(|g| g.sample.clone()).collect();
    let records = reference_predictions(kind, &samples, &p.variants);
    let preds = Predictions::index(&records, &kind.id());
    evaluate_detector(
        &samples,
        &p.variants,
        &preds,
        &FeatureId::ALL,
        None,
        Ratio::from_integer(3),
        Ratio::from_integer(51),
    )
    .map_err(|e| e.to_string())
}

#[test]
fn criterion_4_constant_vulnerable_pattern() {
    criterion(4, "constant-vulnerable detector scores 100.00/0.00 HL everywhere and RA is unclassified", || {
        let p = run_pipeline(11, 2)?;
        let report = eval_reference(&p, RefDetector::ConstantVulnerable)?;
        for fr in &report.features {
            let s = &fr.satisfaction;
            if s.feature == FeatureId::RA {
                if pct_str(s.sr_fpp) != "-" || fr.category != Category::Unclassified {
                    return err(format!("RA: got {} / {:?}", pct_str(s.sr_fpp), fr.category));
                }
                continue;
            }
            if pct_str(s.sr_fpp) != "100.00" || pct_str(s.sr_fep) != "0.00" {
                return err(format!(
                    "{}: got {} / {}",
                    s.feature.as_str(),
                    pct_str(s.sr_fpp),
                    pct_str(s.sr_fep)
                ));
            }
            if fr.category != Category::HL {
                return err(format!("{}: category {:?}", s.feature.as_str(), fr.category));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_5_oracle_ceiling() {
    criterion(5, "rule-oracle detector reaches SR 100.00 on every feature with zero accuracy drift", || {
        let p = run_pipeline(11, 2)?;
        let report = eval_reference(&p, RefDetector::Oracle)?;
        for fr in &report.features {
            if pct_str(fr.satisfaction.sr_f) != "100.00" {
                return err(format!(
                    "{}: SR_f {}",
                    fr.satisfaction.feature.as_str(),
                    pct_str(fr.satisfaction.sr_f)
                ));
            }
        }
        let zero = Some(Ratio::from_integer(0));
        if report.accuracy.precision_delta != zero || report.accuracy.recall_delta != zero {
            return err(format!(
                "accuracy delta ({}, {})",
                pct_str(report.accuracy.precision_delta),
                pct_str(report.accuracy.recall_delta)
            ));
        }
        Ok(())
    });
}

/// Build a synthetic variant set plus predictions realizing exact
/// (T_FPP, T_FEP, T'_FPP, T'_FEP) counts for one feature.
fn counted_predictions(
    t_fpp: u64,
    t_fep: u64,
    kept: u64,
    flipped: u64,
) -> (Vec<PerturbedVariant>, Vec<PredictionRecord>) {
    let mut variants = Vec::new();
    let mut records = vec![PredictionRecord {
        id: "parent".into(),
        predicted_label: Label::Vulnerable,
        detector_id: "d".into(),
    }];
    let mut push = |i: u64, kind: PerturbKind, expected: Label, predicted: Label| {
        let variant_id = format!("{}_{}", if kind == PerturbKind::Fpp { "fpp" } else { "fep" }, i);
        variants.push(PerturbedVariant {
            variant_id: variant_id.clone(),
            parent: "parent".into(),
            kind,
            feature: Some(FeatureId::IBS),
            expected_label: expected,
            recipe: String::new(),
            source: String::new(),
            vulnerable_lines: Default::default(),
            no_op: false,
        });
        records.push(PredictionRecord { id: variant_id, predicted_label: predicted, detector_id: "d".into() });
    };
    for i in 0..t_fpp {
        let predicted = if i < kept { Label::Vulnerable } else { Label::NonVulnerable };
        push(i, PerturbKind::Fpp, Label::Vulnerable, predicted);
    }
    for i in 0..t_fep {
        let predicted = if i < flipped { Label::NonVulnerable } else { Label::Vulnerable };
        push(i, PerturbKind::Fep, Label::NonVulnerable, predicted);
    }
    (variants, records)
}

#[test]
fn criterion_6_formula_identities() {
    criterion(6, "SR_f equals the T-weighted mean of SR_FPP and SR_FEP, exactly", || {
        let (variants, records) = counted_predictions(3, 2, 3, 1);
        let preds = Predictions::index(&records, "d");
        let s = satisfaction(FeatureId::IBS, &variants, &preds).map_err(|e| e.to_string())?;
        let shown = (pct_str(s.sr_f), pct_str(s.sr_fpp), pct_str(s.sr_fep));
        if shown != ("80.00".into(), "100.00".into(), "50.00".into()) {
            return err(format!("hand example gave {shown:?}"));
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for i in 0..1000 {
            let t_fpp = rng.gen_range(0..20u64);
            let t_fep = rng.gen_range(0..20u64);
            let kept = rng.gen_range(0..=t_fpp);
            let flipped = rng.gen_range(0..=t_fep);
            let (variants, records) = counted_predictions(t_fpp, t_fep, kept, flipped);
            let preds = Predictions::index(&records, "d");
            let s = satisfaction(FeatureId::IBS, &variants, &preds).map_err(|e| e.to_string())?;
            let total = t_fpp + t_fep;
            if total == 0 {
                if s.sr_f.is_some() {
                    return err(format!("tuple {i}: SR_f defined on empty counts"));
                }
                continue;
            }
            let weigh = |rate: Option<Pct>, weight: u64| {
                rate.unwrap_or_else(|| Ratio::from_integer(0)) * Ratio::from_integer(weight as i64)
            };
            let mean = (weigh(s.sr_fpp, t_fpp) + weigh(s.sr_fep, t_fep))
                / Ratio::from_integer(total as i64);
            if s.sr_f != Some(mean) {
                return err(format!("tuple {i}: SR_f {:?} != weighted mean {mean}", s.sr_f));
            }
        }
        Ok(())
    });
}

fn fold(expr_text: &str) -> Result<ConstValue, String> {
    let src = format!("void f() {{ int probe = {}; }}", expr_text);
    let ast = parse(&src).map_err(|e| format!("expr `{expr_text}`: {e}"))?;
    match &ast.functions[0].body.stmts[0].kind {
        StmtKind::Decl(d) => Ok(eval_const(d.declarators[0].init.as_ref().unwrap())),
        _ => unreachable!(),
    }
}

#[test]
fn criterion_7_graph_layer_oracles() {
    criterion(7, "derived graph edges and constant folding match brute-force oracles", || {
        let mut checked = 0;
        for g in generate_corpus(11, 2) {
            let ast = parse(&g.sample.source).map_err(|e| e.to_string())?;
            for f in &ast.functions {
                let cpg = build_cpg(&g.sample.source, f);
                if oracles::statement_count(&cpg) > 12 {
                    continue;
                }
                oracles::check_graph_against_oracles(&cpg)?;
                checked += 1;
            }
        }
        if checked < 40 {
            return err(format!("only {checked} functions cross-checked"));
        }
        if fold("10*sizeof(int)")? != ConstValue::Known(40) {
            return err("10*sizeof(int) did not fold to 40");
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for i in 0..1000 {
            let e = oracles::gen_expr(&mut rng, 4);
            let want = e.expected.map(ConstValue::Known).unwrap_or(ConstValue::Unknown);
            let got = fold(&e.text)?;
            if got != want {
                return err(format!("expression {i} `{}`: {got:?} vs {want:?}", e.text));
            }
        }
        Ok(())
    });
}

// ---- scale / determinism, against the real binary ----

fn viperkit(args: &[&str]) -> Result<std::process::Output, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_viperkit"))
        .args(args)
        .env_remove("VIPERKIT_CONFIG")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "viperkit {:?} failed: {}",
            args,
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out)
}

fn snapshot(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&path).map_err(|e| e.to_string())?);
            }
        }
    }
    Ok(out)
}

fn full_run(root: &Path) -> Result<(), String> {
    let corpus = root.join("corpus");
    let corpus = corpus.to_str().unwrap();
    viperkit(&["gen-corpus", "--out", corpus, "--seed", "5", "--per-feature", "50"])?;
    viperkit(&["detect", "--corpus", corpus, "--workers", "1"])?;
    viperkit(&["perturb", "--corpus", corpus, "--workers", "1"])?;
    viperkit(&["evaluate", "--corpus", corpus, "--reference", "oracle"])?;
    Ok(())
}

#[test]
fn criterion_8_scale_and_determinism() {
    criterion(8, "1,000-sample pipeline finishes under 60s and is byte-identical across runs", || {
        let a = tempfile::tempdir().map_err(|e| e.to_string())?;
        let b = tempfile::tempdir().map_err(|e| e.to_string())?;
        let start = Instant::now();
        full_run(a.path())?;
        let elapsed = start.elapsed();
        if elapsed.as_secs() >= 60 {
            return err(format!("pipeline took {elapsed:?}"));
        }
        full_run(b.path())?;
        let sa = snapshot(a.path())?;
        let sb = snapshot(b.path())?;
        if sa.len() != sb.len() {
            return err(format!("file counts differ: {} vs {}", sa.len(), sb.len()));
        }
        for (path, bytes) in &sa {
            match sb.get(path) {
                Some(other) if other == bytes => {}
                _ => return err(format!("{path} differs between runs")),
            }
        }
        Ok(())
    });
}
