//! Evaluation harness: joins detector predictions with variant ground truth,
//! computes exact-rational satisfaction rates per feature, classifies each
//! feature into the HH/HL/LH/LL grid, and reports precision/recall deltas
//! between the original and perturbed corpora.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::detect::{all_features, analyze_source, FeatureId};
use crate::error::EvalError;
use crate::perturb::{PerturbKind, PerturbedVariant};
use crate::sample::{CodeSample, Label};

pub type Pct = Ratio<i64>;

/// One detector verdict on an original sample or a variant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    pub predicted_label: Label,
    pub detector_id: String,
}

pub fn parse_predictions(text: &str) -> Result<Vec<PredictionRecord>, serde_json::Error> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(serde_json::from_str)
        .collect()
}

pub fn render_predictions(records: &[PredictionRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("prediction serializes"));
        out.push('\n');
    }
    out
}

/// Per-detector id → label index.
pub struct Predictions {
    pub detector_id: String,
    map: BTreeMap<String, Label>,
}

impl Predictions {
    pub fn index(records: &[PredictionRecord], detector_id: &str) -> Predictions {
        let map = records
            .iter()
            .filter(|r| r.detector_id == detector_id)
            .map(|r| (r.id.clone(), r.predicted_label))
            .collect();
        Predictions { detector_id: detector_id.to_string(), map }
    }

    pub fn detector_ids(records: &[PredictionRecord]) -> Vec<String> {
        let mut ids: Vec<String> = records.iter().map(|r| r.detector_id.clone()).collect();
        ids.sort();
        ids.dedup();
        ids
    }

    pub fn get(&self, id: &str) -> Result<Label, EvalError> {
        self.map.get(id).copied().ok_or_else(|| EvalError::MissingPrediction(id.to_string()))
    }
}

/// Satisfaction counts and rates for one feature; rates are `None` when the
/// denominator is zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SatisfactionResult {
    pub feature: FeatureId,
    pub t_fpp: u64,
    pub t_fep: u64,
    pub retained_fpp: u64,
    pub flipped_fep: u64,
    /// FEP variants excluded because eliminating one of several witnesses
    /// does not change the sample's ground truth
    pub excluded_fep: u64,
    pub sr_f: Option<Pct>,
    pub sr_fpp: Option<Pct>,
    pub sr_fep: Option<Pct>,
}

fn rate(hits: u64, total: u64) -> Option<Pct> {
    if total == 0 {
        None
    } else {
        Some(Ratio::new(hits as i64 * 100, total as i64))
    }
}

/// Count prediction retention over FPPs and prediction flips over FEPs.
pub fn satisfaction(
    feature: FeatureId,
    variants: &[PerturbedVariant],
    preds: &Predictions,
) -> Result<SatisfactionResult, EvalError> {
    let mut r = SatisfactionResult {
        feature,
        t_fpp: 0,
        t_fep: 0,
        retained_fpp: 0,
        flipped_fep: 0,
        excluded_fep: 0,
        sr_f: None,
        sr_fpp: None,
        sr_fep: None,
    };
    for v in variants {
        if v.feature != Some(feature) || v.no_op {
            continue;
        }
        let original = preds.get(&v.parent)?;
        let predicted = preds.get(&v.variant_id)?;
        match v.kind {
            PerturbKind::Fpp => {
                r.t_fpp += 1;
                if predicted == original {
                    r.retained_fpp += 1;
                }
            }
            PerturbKind::Fep => {
                if v.expected_label == Label::Vulnerable {
                    r.excluded_fep += 1;
                    continue;
                }
                r.t_fep += 1;
                if predicted != original {
                    r.flipped_fep += 1;
                }
            }
            _ => {}
        }
    }
    r.sr_fpp = rate(r.retained_fpp, r.t_fpp);
    r.sr_fep = rate(r.flipped_fep, r.t_fep);
    r.sr_f = rate(r.retained_fpp + r.flipped_fep, r.t_fpp + r.t_fep);
    Ok(r)
}

/// Retention rate of one spurious-feature perturbation kind; SFs behave like
/// FPPs — the prediction should not move.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SfResult {
    pub kind: PerturbKind,
    pub total: u64,
    pub retained: u64,
    pub rate: Option<Pct>,
}

pub fn sf_retention(
    kind: PerturbKind,
    variants: &[PerturbedVariant],
    preds: &Predictions,
) -> Result<SfResult, EvalError> {
    let mut total = 0;
    let mut retained = 0;
    for v in variants {
        if v.kind != kind || v.no_op {
            continue;
        }
        let original = preds.get(&v.parent)?;
        if preds.get(&v.variant_id)? == original {
            retained += 1;
        }
        total += 1;
    }
    Ok(SfResult { kind, total, retained, rate: rate(retained, total) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Category {
    HH,
    HL,
    LH,
    LL,
    #[serde(rename = "UNCLASSIFIED")]
    Unclassified,
}

impl std::fmt::Display for Category {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Category::HH => "HH",
            Category::HL => "HL",
            Category::LH => "LH",
            Category::LL => "LL",
            Category::Unclassified => "UNCLASSIFIED",
        })
    }
}

/// FPP side is high when SR_FPP is within ε below the reference mean; FEP
/// side is high when SR_FEP clears the recommended floor. A side with no
/// defined rate leaves the feature unclassified.
pub fn classify(
    result: &SatisfactionResult,
    fpp_reference_mean: Pct,
    epsilon: Pct,
    fep_floor: Pct,
) -> Category {
    let (fpp, fep) = match (result.sr_fpp, result.sr_fep) {
        (Some(a), Some(b)) => (a, b),
        _ => return Category::Unclassified,
    };
    let fpp_high = fpp >= fpp_reference_mean - epsilon;
    let fep_high = fep >= fep_floor;
    match (fpp_high, fep_high) {
        (true, true) => Category::HH,
        (true, false) => Category::HL,
        (false, true) => Category::LH,
        (false, false) => Category::LL,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionRecall {
    pub precision: Option<Pct>,
    pub recall: Option<Pct>,
}

fn precision_recall(pairs: &[(Label, Label)]) -> PrecisionRecall {
    let tp = pairs.iter().filter(|(t, p)| *t == Label::Vulnerable && *p == Label::Vulnerable).count() as u64;
    let fp = pairs.iter().filter(|(t, p)| *t == Label::NonVulnerable && *p == Label::Vulnerable).count() as u64;
    let fn_ = pairs.iter().filter(|(t, p)| *t == Label::Vulnerable && *p == Label::NonVulnerable).count() as u64;
    PrecisionRecall { precision: rate(tp, tp + fp), recall: rate(tp, tp + fn_) }
}

/// Precision/recall with "vulnerable" as the positive class, on originals
/// (sample labels) and on variants (expected labels), plus their deltas.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccuracyDelta {
    pub original: PrecisionRecall,
    pub perturbed: PrecisionRecall,
    pub precision_delta: Option<Pct>,
    pub recall_delta: Option<Pct>,
}

pub fn accuracy_delta(
    samples: &[CodeSample],
    variants: &[PerturbedVariant],
    preds: &Predictions,
) -> Result<AccuracyDelta, EvalError> {
    let mut orig_pairs = Vec::new();
    for s in samples {
        orig_pairs.push((s.label, preds.get(&s.sample_id)?));
    }
    let mut var_pairs = Vec::new();
    for v in variants {
        if v.no_op {
            continue;
        }
        var_pairs.push((v.expected_label, preds.get(&v.variant_id)?));
    }
    let original = precision_recall(&orig_pairs);
    let perturbed = precision_recall(&var_pairs);
    let delta = |a: Option<Pct>, b: Option<Pct>| match (a, b) {
        (Some(a), Some(b)) => Some(b - a),
        _ => None,
    };
    Ok(AccuracyDelta {
        precision_delta: delta(original.precision, perturbed.precision),
        recall_delta: delta(original.recall, perturbed.recall),
        original,
        perturbed,
    })
}

// ---- reference detectors ----

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefDetector {
    Oracle,
    ConstantVulnerable,
    ConstantBenign,
    Random(u64),
}

impl RefDetector {
    pub fn id(&self) -> String {
        match self {
            RefDetector::Oracle => "oracle".into(),
            RefDetector::ConstantVulnerable => "constant_vulnerable".into(),
            RefDetector::ConstantBenign => "constant_benign".into(),
            RefDetector::Random(seed) => format!("random{}", seed),
        }
    }

    pub fn parse(s: &str) -> Option<RefDetector> {
        match s {
            "oracle" => Some(RefDetector::Oracle),
            "constant_vulnerable" => Some(RefDetector::ConstantVulnerable),
            "constant_benign" => Some(RefDetector::ConstantBenign),
            _ => s.strip_prefix("random").and_then(|d| d.parse().ok()).map(RefDetector::Random),
        }
    }
}

/// Built-in detectors for harness self-verification. The oracle re-analyzes
/// each text and predicts vulnerable iff any witness exists; the constants
/// and the seeded coin are as named.
pub fn reference_predictions(
    kind: RefDetector,
    samples: &[CodeSample],
    variants: &[PerturbedVariant],
) -> Vec<PredictionRecord> {
    use rand::Rng;
    use rand::SeedableRng;
    let detector_id = kind.id();
    let mut rng = match kind {
        RefDetector::Random(seed) => Some(rand_chacha::ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut verdict = |source: &str, lines: &std::collections::BTreeSet<u32>| -> Label {
        match kind {
            RefDetector::ConstantVulnerable => Label::Vulnerable,
            RefDetector::ConstantBenign => Label::NonVulnerable,
            RefDetector::Random(_) => {
                if rng.as_mut().unwrap().gen_bool(0.5) {
                    Label::Vulnerable
                } else {
                    Label::NonVulnerable
                }
            }
            RefDetector::Oracle => match analyze_source(source, lines, &all_features()) {
                Ok(ws) if !ws.is_empty() => Label::Vulnerable,
                _ => Label::NonVulnerable,
            },
        }
    };
    let mut out = Vec::new();
    for s in samples {
        out.push(PredictionRecord {
            id: s.sample_id.clone(),
            predicted_label: verdict(&s.source, &s.vulnerable_lines),
            detector_id: detector_id.clone(),
        });
    }
    for v in variants {
        out.push(PredictionRecord {
            id: v.variant_id.clone(),
            predicted_label: verdict(&v.source, &v.vulnerable_lines),
            detector_id: detector_id.clone(),
        });
    }
    out
}

// ---- report ----

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureReport {
    pub satisfaction: SatisfactionResult,
    pub category: Category,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectorReport {
    pub detector_id: String,
    pub fpp_reference_mean: Option<Pct>,
    pub epsilon: Pct,
    pub fep_floor: Pct,
    pub features: Vec<FeatureReport>,
    pub sf: Vec<SfResult>,
    pub accuracy: AccuracyDelta,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub samples: u64,
    pub variants: u64,
    pub skipped: Vec<String>,
    pub disabled_features: Vec<FeatureId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub detectors: Vec<DetectorReport>,
    pub summary: CorpusSummary,
}

/// Build a full per-detector report. When no reference mean is supplied the
/// detector's own cross-feature mean of defined SR_FPP values is used.
pub fn evaluate_detector(
    samples: &[CodeSample],
    variants: &[PerturbedVariant],
    preds: &Predictions,
    features: &[FeatureId],
    fpp_reference_mean: Option<Pct>,
    epsilon: Pct,
    fep_floor: Pct,
) -> Result<DetectorReport, EvalError> {
    let mut results = Vec::new();
    for f in features {
        results.push(satisfaction(*f, variants, preds)?);
    }
    let defined: Vec<Pct> = results.iter().filter_map(|r| r.sr_fpp).collect();
    let mean = fpp_reference_mean.or_else(|| {
        if defined.is_empty() {
            None
        } else {
            Some(defined.iter().sum::<Pct>() / Ratio::from_integer(defined.len() as i64))
        }
    });
    let features_out = results
        .into_iter()
        .map(|satisfaction| {
            let category = match mean {
                Some(m) => classify(&satisfaction, m, epsilon, fep_floor),
                None => Category::Unclassified,
            };
            FeatureReport { satisfaction, category }
        })
        .collect();
    let mut sf = Vec::new();
    for kind in [
        PerturbKind::SfNodeSet,
        PerturbKind::SfEdgeSet,
        PerturbKind::SfIdentifier,
        PerturbKind::SfFormatting,
    ] {
        sf.push(sf_retention(kind, variants, preds)?);
    }
    let accuracy = accuracy_delta(samples, variants, preds)?;
    Ok(DetectorReport {
        detector_id: preds.detector_id.clone(),
        fpp_reference_mean: mean,
        epsilon,
        fep_floor,
        features: features_out,
        sf,
        accuracy,
    })
}

/// Two-decimal rendering; undefined rates become "-".
pub fn pct_str(v: Option<Pct>) -> String {
    match v {
        None => "-".to_string(),
        Some(r) => format!("{:.2}", *r.numer() as f64 / *r.denom() as f64),
    }
}

pub fn render_report_json(report: &EvaluationReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

pub fn parse_report_json(text: &str) -> Result<EvaluationReport, serde_json::Error> {
    serde_json::from_str(text)
}

/// Plain-text table: one block per detector, a row per feature with FPP/FEP
/// columns, then the SF retention rows and accuracy deltas.
pub fn render_report_table(report: &EvaluationReport) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    for d in &report.detectors {
        writeln!(out, "detector: {}", d.detector_id).unwrap();
        writeln!(
            out,
            "  thresholds: fpp mean {} - eps {}, fep floor {}",
            pct_str(d.fpp_reference_mean),
            pct_str(Some(d.epsilon)),
            pct_str(Some(d.fep_floor))
        )
        .unwrap();
        writeln!(out, "  {:<8} {:>8} {:>8} {:>8} {:>14}", "feature", "SR_FPP", "SR_FEP", "SR_f", "category")
            .unwrap();
        for f in &d.features {
            writeln!(
                out,
                "  {:<8} {:>8} {:>8} {:>8} {:>14}",
                f.satisfaction.feature.to_string(),
                pct_str(f.satisfaction.sr_fpp),
                pct_str(f.satisfaction.sr_fep),
                pct_str(f.satisfaction.sr_f),
                f.category.to_string()
            )
            .unwrap();
        }
        for s in &d.sf {
            writeln!(
                out,
                "  {:<16} {:>8} ({}/{} retained)",
                s.kind.to_string(),
                pct_str(s.rate),
                s.retained,
                s.total
            )
            .unwrap();
        }
        writeln!(
            out,
            "  precision {} -> {} (delta {}), recall {} -> {} (delta {})",
            pct_str(d.accuracy.original.precision),
            pct_str(d.accuracy.perturbed.precision),
            pct_str(d.accuracy.precision_delta),
            pct_str(d.accuracy.original.recall),
            pct_str(d.accuracy.perturbed.recall),
            pct_str(d.accuracy.recall_delta)
        )
        .unwrap();
    }
    writeln!(
        out,
        "corpus: {} samples, {} variants, {} skipped",
        report.summary.samples,
        report.summary.variants,
        report.summary.skipped.len()
    )
    .unwrap();
    out
}
