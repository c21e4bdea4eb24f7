//! Perturbation engine: feature-preserving (FPP) and feature-eliminating
//! (FEP) rewrites for each detected witness, plus the four spurious-feature
//! rewrites applied to every sample. Every candidate variant is self-checked
//! by re-running detection before it is emitted: FEPs must kill their target
//! witness, FPPs must keep it, and SF variants must leave the whole witness
//! set untouched.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::detect::{analyze_source, all_features, AnnotatedSample, FeatureId, FeatureWitness};
use crate::frontend::ast::{Ast, BaseType, Block};
use crate::frontend::edits::{Edit, EditScript, LineMap};
use crate::frontend::format::normalize_formatting;
use crate::frontend::lexer::{lex_raw, prepare, RawItem, Span, TokKind};
use crate::frontend::parser::parse;
use crate::sample::{CodeSample, Label};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PerturbKind {
    #[serde(rename = "FPP")]
    Fpp,
    #[serde(rename = "FEP")]
    Fep,
    #[serde(rename = "SF_NODE_SET")]
    SfNodeSet,
    #[serde(rename = "SF_EDGE_SET")]
    SfEdgeSet,
    #[serde(rename = "SF_IDENTIFIER")]
    SfIdentifier,
    #[serde(rename = "SF_FORMATTING")]
    SfFormatting,
}

impl PerturbKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PerturbKind::Fpp => "FPP",
            PerturbKind::Fep => "FEP",
            PerturbKind::SfNodeSet => "SF_NODE_SET",
            PerturbKind::SfEdgeSet => "SF_EDGE_SET",
            PerturbKind::SfIdentifier => "SF_IDENTIFIER",
            PerturbKind::SfFormatting => "SF_FORMATTING",
        }
    }

    pub fn is_sf(&self) -> bool {
        !matches!(self, PerturbKind::Fpp | PerturbKind::Fep)
    }
}

impl std::fmt::Display for PerturbKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One rewritten sample carrying its ground truth.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerturbedVariant {
    pub variant_id: String,
    pub parent: String,
    pub kind: PerturbKind,
    pub feature: Option<FeatureId>,
    pub expected_label: Label,
    pub recipe: String,
    #[serde(skip)]
    pub source: String,
    /// vulnerable lines of the parent, remapped to the rewritten text
    pub vulnerable_lines: BTreeSet<u32>,
    /// byte-identical to the parent (possible for formatting only)
    #[serde(default)]
    pub no_op: bool,
}

impl PerturbedVariant {
    pub fn file_name(&self) -> String {
        format!("{}.c", self.variant_id)
    }
}

/// Injective map from user identifiers to symbolic names.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SymbolMap {
    pub map: BTreeMap<String, String>,
}

impl SymbolMap {
    pub fn rename(&self, name: &str) -> String {
        self.map.get(name).cloned().unwrap_or_else(|| name.to_string())
    }
}

/// Line remapping from the parent sample onto a variant.
#[derive(Debug, Clone)]
pub enum LineRemap {
    Identity,
    Shift(LineMap),
    Table(BTreeMap<u32, u32>),
}

impl LineRemap {
    pub fn map(&self, line: u32) -> u32 {
        match self {
            LineRemap::Identity => line,
            LineRemap::Shift(m) => m.map(line),
            LineRemap::Table(t) => t.get(&line).copied().unwrap_or(line),
        }
    }
}

/// Everything generation produced for one sample: checked variants, witnesses
/// that could not be edited (skipped, with reasons), and self-check failures
/// (which must abort emission).
#[derive(Debug, Default)]
pub struct GenReport {
    pub variants: Vec<PerturbedVariant>,
    pub skipped: Vec<String>,
    pub failures: Vec<String>,
}

/// Generate, self-check, and collect all perturbations for one sample.
pub fn generate_for_sample(
    sample: &CodeSample,
    annotated: &AnnotatedSample,
    include_sf: bool,
) -> GenReport {
    let mut report = GenReport::default();
    gen_vf_perturbations(sample, annotated, &mut report);
    if include_sf {
        match gen_sf_all(sample) {
            Ok(sf) => {
                for v in sf {
                    check_sf_variant(sample, annotated, &v, &mut report);
                }
            }
            Err(e) => report.failures.push(format!("{}: SF generation failed: {}", sample.sample_id, e)),
        }
    }
    report
}

// ---- VF perturbations ----

struct Candidate {
    kind: PerturbKind,
    script: EditScript,
    recipe: String,
}

/// Emit the fixed per-feature FPP/FEP variant set for every witness of the
/// sample. Witnesses whose anchors cannot express an edit (unknown lengths,
/// indivisible units) are skipped and logged, never silently dropped.
pub fn gen_vf_perturbations(sample: &CodeSample, ann: &AnnotatedSample, report: &mut GenReport) {
    let sole_witness = ann.witnesses.len() == 1;
    let mut counters: BTreeMap<(FeatureId, PerturbKind), u32> = BTreeMap::new();
    for w in &ann.witnesses {
        let cands = match witness_candidates(&sample.source, w) {
            Ok(c) => c,
            Err(reason) => {
                report.skipped.push(format!("{} {}: {}", sample.sample_id, w.feature, reason));
                continue;
            }
        };
        for c in cands {
            let k = counters.entry((w.feature, c.kind)).or_insert(0);
            *k += 1;
            let variant_id =
                format!("{}__{}__{}__{}", sample.sample_id, w.feature, c.kind, k);
            let expected = match c.kind {
                PerturbKind::Fep if sole_witness => Label::NonVulnerable,
                _ => sample.label,
            };
            match realize(sample, &variant_id, c, w.feature, expected) {
                Ok((variant, remap)) => {
                    match check_vf_variant(&variant, w, &remap) {
                        Ok(()) => report.variants.push(variant),
                        Err(e) => report.failures.push(format!("{}: {}", variant_id, e)),
                    }
                }
                Err(reason) => {
                    report.skipped.push(format!("{}: {}", variant_id, reason));
                }
            }
        }
    }
}

fn realize(
    sample: &CodeSample,
    variant_id: &str,
    c: Candidate,
    feature: FeatureId,
    expected: Label,
) -> Result<(PerturbedVariant, LineRemap), String> {
    let source = c.script.apply(&sample.source).map_err(|e| e.to_string())?;
    parse(&source).map_err(|e| format!("variant does not re-parse: {}", e))?;
    let map = c.script.line_map(&sample.source).map_err(|e| e.to_string())?;
    // Once the flaw is eliminated the parent's flaw-line markers no longer
    // describe the variant; carrying them over would let the line-anchored
    // rules (RA/WA) resurrect a witness on healthy code.
    let vulnerable_lines = if expected == Label::NonVulnerable {
        BTreeSet::new()
    } else {
        sample.vulnerable_lines.iter().map(|l| map.map(*l)).collect()
    };
    Ok((
        PerturbedVariant {
            variant_id: variant_id.to_string(),
            parent: sample.sample_id.clone(),
            kind: c.kind,
            feature: Some(feature),
            expected_label: expected,
            recipe: c.recipe,
            source,
            vulnerable_lines,
            no_op: false,
        },
        LineRemap::Shift(map),
    ))
}

fn span_text(source: &str, span: Span) -> String {
    source.get(span.byte_range()).unwrap_or("").to_string()
}

fn indent_of(source: &str, line: u32) -> String {
    source
        .lines()
        .nth(line.saturating_sub(1) as usize)
        .map(|l| l.chars().take_while(|c| c.is_whitespace()).collect())
        .unwrap_or_default()
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn lcm(a: i128, b: i128) -> i128 {
    a / gcd(a, b) * b
}

/// Rewrite a length/count expression holding `bytes` bytes expressed in
/// units of `unit` bytes; fails when the value does not divide evenly.
fn units_text(bytes: i128, unit: i128, what: &str) -> Result<String, String> {
    if unit <= 0 || bytes % unit != 0 {
        return Err(format!("{} value {} not divisible by unit {}", what, bytes, unit));
    }
    Ok((bytes / unit).to_string())
}

fn witness_candidates(source: &str, w: &FeatureWitness) -> Result<Vec<Candidate>, String> {
    let a = &w.anchors;
    let c = |k: &str| -> Result<i128, String> {
        w.constants.get(k).copied().ok_or_else(|| format!("constant {} unknown", k))
    };
    let span = |s: Option<Span>, name: &str| -> Result<Span, String> {
        s.ok_or_else(|| format!("anchor {} missing", name))
    };
    let mut out = Vec::new();
    match w.feature {
        FeatureId::IBS | FeatureId::BSB | FeatureId::BO => {
            // the length under perturbation: destination for write-side
            // rules, source for the over-read rule
            let (len_key, len_span, elem) = if w.feature == FeatureId::BO {
                ("len_s", span(a.src_len_span, "src_len_span")?, a.src_elem)
            } else {
                ("len_d", span(a.dest_len_span, "dest_len_span")?, a.dest_elem)
            };
            let len = c(len_key)?;
            let n = c("n")?;
            let count_span = span(a.count_span, "count_span")?;
            let unit = a.count_unit;

            // FPP 1: shrink the buffer, widening the overflow
            let new_len = if (len - 1) % elem == 0 { len - 1 } else { len - elem };
            if new_len >= 1 {
                let mut s = EditScript::new();
                s.push(Edit::ReplaceSpan { span: len_span, text: units_text(new_len, elem, len_key)? });
                out.push(Candidate {
                    kind: PerturbKind::Fpp,
                    script: s,
                    recipe: format!("shrink {} from {} to {} bytes", len_key, len, new_len),
                });
            }

            // FPP 2: grow the count; the source length tracks it so the
            // size-match predicate stays satisfied
            let step = if w.feature == FeatureId::BSB { lcm(unit, a.src_elem) } else { unit };
            let new_n = n + step;
            let mut s = EditScript::new();
            s.push(Edit::ReplaceSpan { span: count_span, text: units_text(new_n, unit, "n")? });
            let mut recipe = format!("grow n from {} to {} bytes", n, new_n);
            if w.feature == FeatureId::BSB {
                let src_span = span(a.src_len_span, "src_len_span")?;
                s.push(Edit::ReplaceSpan {
                    span: src_span,
                    text: units_text(new_n, a.src_elem, "len_s")?,
                });
                recipe.push_str(", co-editing len_s to match");
            }
            out.push(Candidate { kind: PerturbKind::Fpp, script: s, recipe });

            // FEP 1: grow the buffer to the count
            if n % elem == 0 {
                let mut s = EditScript::new();
                s.push(Edit::ReplaceSpan { span: len_span, text: units_text(n, elem, len_key)? });
                out.push(Candidate {
                    kind: PerturbKind::Fep,
                    script: s,
                    recipe: format!("set {} to n ({} bytes)", len_key, n),
                });
            } else {
                return Err(format!("n {} not divisible by element size {}", n, elem));
            }

            // FEP 2: shrink the count to the buffer length
            let mut s = EditScript::new();
            s.push(Edit::ReplaceSpan { span: count_span, text: units_text(len, unit, "n")? });
            out.push(Candidate {
                kind: PerturbKind::Fep,
                script: s,
                recipe: format!("set n to {} ({} bytes)", len_key, len),
            });
        }
        FeatureId::OE => {
            let len = c("len_d")?;
            let n = c("n")?;
            let len_span = span(a.dest_len_span, "dest_len_span")?;
            let count_span = span(a.count_span, "count_span")?;
            if (len + 1) % a.dest_elem != 0 || (n + 1) % a.count_unit != 0 {
                return Err("off-by-one shift not expressible in element units".into());
            }
            // FPP: move both one byte up, preserving n == LEN + 1
            let mut s = EditScript::new();
            s.push(Edit::ReplaceSpan { span: len_span, text: units_text(len + 1, a.dest_elem, "len_d")? });
            s.push(Edit::ReplaceSpan { span: count_span, text: units_text(n + 1, a.count_unit, "n")? });
            out.push(Candidate {
                kind: PerturbKind::Fpp,
                script: s,
                recipe: format!("shift len_d/n to {}/{}", len + 1, n + 1),
            });
            // FEP 1: count down to the buffer length
            let mut s = EditScript::new();
            s.push(Edit::ReplaceSpan { span: count_span, text: units_text(len, a.count_unit, "n")? });
            out.push(Candidate {
                kind: PerturbKind::Fep,
                script: s,
                recipe: format!("set n to len_d ({})", len),
            });
            // FEP 2: buffer up to the count
            let mut s = EditScript::new();
            s.push(Edit::ReplaceSpan { span: len_span, text: units_text(n, a.dest_elem, "len_d")? });
            out.push(Candidate {
                kind: PerturbKind::Fep,
                script: s,
                recipe: format!("set len_d to n ({})", n),
            });
        }
        FeatureId::DF => {
            let second_line = *w.lines.get("second_free_line").ok_or("second_free_line missing")?;
            let second_span = span(a.second_free_span, "second_free_span")?;
            let b = w.vars.get("buffer").ok_or("buffer var missing")?.clone();
            let indent = indent_of(source, second_line);
            // FPP: benign statement between the frees
            let mut s = EditScript::new();
            s.push(Edit::InsertBefore {
                line: second_line,
                text: format!("{}printf(\"\");", indent),
            });
            out.push(Candidate {
                kind: PerturbKind::Fpp,
                script: s,
                recipe: "insert benign statement between the frees".into(),
            });
            // FEP 1: re-allocate between the frees
            if let (Some(alloc), Some(args)) = (a.dest_alloc, a.alloc_args_text.clone()) {
                let callee = match alloc {
                    crate::cpg::graph::AllocKind::Malloc => "malloc",
                    crate::cpg::graph::AllocKind::Calloc => "calloc",
                    crate::cpg::graph::AllocKind::Alloca => "alloca",
                };
                let mut s = EditScript::new();
                s.push(Edit::InsertBefore {
                    line: second_line,
                    text: format!("{}{} = {}({});", indent, b, callee, args),
                });
                out.push(Candidate {
                    kind: PerturbKind::Fep,
                    script: s,
                    recipe: "re-allocate the buffer between the frees".into(),
                });
            } else {
                return Err("allocation site unavailable for re-allocation rewrite".into());
            }
            // FEP 2: neutralize the second free
            let mut s = EditScript::new();
            s.push(Edit::ReplaceSpan { span: second_span, text: "free(NULL);".into() });
            out.push(Candidate {
                kind: PerturbKind::Fep,
                script: s,
                recipe: "replace the second free with free(NULL)".into(),
            });
        }
        FeatureId::UAF => {
            let use_line = *w.lines.get("use_line").ok_or("use_line missing")?;
            let free_arg = span(a.free_arg_span, "free_arg_span")?;
            let use_span = span(a.use_span, "use_span")?;
            let indent = indent_of(source, use_line);
            // FPP: benign statement between free and use
            let mut s = EditScript::new();
            s.push(Edit::InsertBefore { line: use_line, text: format!("{}printf(\"\");", indent) });
            out.push(Candidate {
                kind: PerturbKind::Fpp,
                script: s,
                recipe: "insert benign statement between free and use".into(),
            });
            // FEP 1: neutralize the free
            let mut s = EditScript::new();
            s.push(Edit::ReplaceSpan { span: free_arg, text: "NULL".into() });
            out.push(Candidate {
                kind: PerturbKind::Fep,
                script: s,
                recipe: "replace free(b) with free(NULL)".into(),
            });
            // FEP 2: neutralize the use
            let mut s = EditScript::new();
            s.push(Edit::ReplaceSpan { span: use_span, text: "printf(\"\");".into() });
            out.push(Candidate {
                kind: PerturbKind::Fep,
                script: s,
                recipe: "replace the using statement with printf(\"\")".into(),
            });
        }
        FeatureId::BUW | FeatureId::BUR => {
            let idx = w.vars.get("idx").ok_or("idx var missing")?.clone();
            let access = span(a.access_span, "access_span")?;
            let conjoin = |cond: &str| -> EditScript {
                let mut s = EditScript::new();
                match a.guard_span {
                    Some(g) => s.push(Edit::ReplaceSpan {
                        span: g,
                        text: format!("({}) && {}", span_text(source, g), cond),
                    }),
                    None => s.push(Edit::ReplaceSpan {
                        span: access,
                        text: format!("if ({}) {{ {} }}", cond, span_text(source, access)),
                    }),
                }
                s
            };
            // FPP: a lower bound too weak for the accepted guard set
            let len_b = c("len_b")?;
            out.push(Candidate {
                kind: PerturbKind::Fpp,
                script: conjoin(&format!("{} > -{}", idx, 2 * len_b)),
                recipe: format!("conjoin weak lower bound {} > -{}", idx, 2 * len_b),
            });
            // FEPs: the two canonical non-negativity guards
            out.push(Candidate {
                kind: PerturbKind::Fep,
                script: conjoin(&format!("{} >= 0", idx)),
                recipe: format!("conjoin guard {} >= 0", idx),
            });
            out.push(Candidate {
                kind: PerturbKind::Fep,
                script: conjoin(&format!("{} > -1", idx)),
                recipe: format!("conjoin guard {} > -1", idx),
            });
        }
        FeatureId::RA => {
            let callee = span(a.callee_span, "callee_span")?;
            let mut s = EditScript::new();
            s.push(Edit::ReplaceSpan { span: callee, text: "rd_stub".into() });
            out.push(Candidate {
                kind: PerturbKind::Fep,
                script: s,
                recipe: "replace the read API with harmless stub rd_stub".into(),
            });
            // no FPP exists for read APIs: no equivalent call keeps the
            // feature while changing the text
        }
        FeatureId::WA => {
            let callee_span = span(a.callee_span, "callee_span")?;
            let callee = span_text(source, callee_span);
            // FPP: swap to a write API with identical argument roles
            let swap: Option<(&str, i128)> = match callee.as_str() {
                "memcpy" => Some(("strncpy", a.count_unit)),
                "strncpy" => Some(("memcpy", a.count_unit)),
                "memset" => Some(("wmemset", 4)),
                "wmemset" => Some(("memset", 1)),
                "wcsncpy" => Some(("strncpy", 1)),
                _ => None,
            };
            match swap {
                Some((new_callee, new_unit)) => {
                    let mut s = EditScript::new();
                    s.push(Edit::ReplaceSpan { span: callee_span, text: new_callee.into() });
                    let mut ok = true;
                    if new_unit != a.count_unit {
                        // count literal must be rescaled to keep byte counts
                        match (w.constants.get("n"), a.count_span) {
                            (Some(n), Some(cs)) if n % new_unit == 0 => {
                                s.push(Edit::ReplaceSpan {
                                    span: cs,
                                    text: (n / new_unit).to_string(),
                                });
                            }
                            _ => ok = false,
                        }
                    }
                    if ok {
                        out.push(Candidate {
                            kind: PerturbKind::Fpp,
                            script: s,
                            recipe: format!("swap {} for {}", callee, new_callee),
                        });
                    }
                }
                None => {}
            }
            // FEP: harmless stub
            let mut s = EditScript::new();
            s.push(Edit::ReplaceSpan { span: callee_span, text: "wr_stub".into() });
            out.push(Candidate {
                kind: PerturbKind::Fep,
                script: s,
                recipe: "replace the write API with harmless stub wr_stub".into(),
            });
        }
    }
    Ok(out)
}

/// FEP kill / FPP keep gate: re-analyze the rewritten text and compare
/// against the target witness with line anchors remapped.
pub fn check_vf_variant(
    variant: &PerturbedVariant,
    target: &FeatureWitness,
    remap: &LineRemap,
) -> Result<(), String> {
    let ws = analyze_source(&variant.source, &variant.vulnerable_lines, &all_features())
        .map_err(|e| format!("re-analysis failed: {}", e))?;
    let feature = variant.feature.expect("VF variant has a feature");
    match variant.kind {
        PerturbKind::Fep => {
            if ws.iter().any(|w| w.feature == feature) {
                return Err(format!("FEP failed to eliminate {}", feature));
            }
        }
        PerturbKind::Fpp => {
            let expected_lines: BTreeMap<String, u32> =
                target.lines.iter().map(|(k, v)| (k.clone(), remap.map(*v))).collect();
            let kept = ws.iter().any(|w| {
                w.feature == feature && w.vars == target.vars && w.lines == expected_lines
            });
            if !kept {
                return Err(format!("FPP failed to preserve {}", feature));
            }
        }
        _ => unreachable!("SF variants use check_sf_variant"),
    }
    Ok(())
}

// ---- SF perturbations ----

pub struct SfVariant {
    pub variant: PerturbedVariant,
    pub remap: LineRemap,
    pub symbols: SymbolMap,
}

pub fn gen_sf_all(sample: &CodeSample) -> Result<Vec<SfVariant>, String> {
    Ok(vec![
        gen_sf_node_set(sample)?,
        gen_sf_edge_set(sample)?,
        gen_sf_identifier(sample)?,
        gen_sf_formatting(sample)?,
    ])
}

fn sf_variant(
    sample: &CodeSample,
    kind: PerturbKind,
    source: String,
    recipe: &str,
    remap: LineRemap,
    symbols: SymbolMap,
    no_op: bool,
) -> SfVariant {
    let vulnerable_lines = sample.vulnerable_lines.iter().map(|l| remap.map(*l)).collect();
    SfVariant {
        variant: PerturbedVariant {
            variant_id: format!("{}__NONE__{}__1", sample.sample_id, kind),
            parent: sample.sample_id.clone(),
            kind,
            feature: None,
            expected_label: sample.label,
            recipe: recipe.to_string(),
            source,
            vulnerable_lines,
            no_op,
        },
        remap,
        symbols,
    }
}

/// The statement inserted at the start of a function body; multi-line bodies
/// get a fresh indented line, one-line bodies are rewritten in place.
fn body_insertions(source: &str, ast: &Ast, stmt_for: impl Fn(&BaseType, u8) -> String) -> EditScript {
    let mut script = EditScript::new();
    for f in &ast.functions {
        let stmt = stmt_for(&f.ret.base, f.ret.ptr_depth);
        let body: &Block = &f.body;
        if body.span.start.line < body.span.end.line {
            let first_line = body
                .stmts
                .first()
                .map(|s| s.span.start.line)
                .unwrap_or(body.span.end.line);
            let indent = if body.stmts.is_empty() {
                format!("{}    ", indent_of(source, body.span.end.line))
            } else {
                indent_of(source, first_line)
            };
            script.push(Edit::InsertBefore { line: first_line, text: format!("{}{}", indent, stmt) });
        } else {
            let inner = span_text(source, body.span);
            let inner = inner.trim_start_matches('{').trim_end_matches('}').trim();
            let rebuilt = if inner.is_empty() {
                format!("{{ {} }}", stmt)
            } else {
                format!("{{ {} {} }}", stmt, inner)
            };
            script.push(Edit::ReplaceSpan { span: body.span, text: rebuilt });
        }
    }
    script
}

pub fn gen_sf_node_set(sample: &CodeSample) -> Result<SfVariant, String> {
    let ast = parse(&sample.source).map_err(|e| e.to_string())?;
    let script = body_insertions(&sample.source, &ast, |_, _| "printf(\"\");".to_string());
    let source = script.apply(&sample.source).map_err(|e| e.to_string())?;
    let map = script.line_map(&sample.source).map_err(|e| e.to_string())?;
    Ok(sf_variant(
        sample,
        PerturbKind::SfNodeSet,
        source,
        "insert printf(\"\"); at the start of each function",
        LineRemap::Shift(map),
        SymbolMap::default(),
        false,
    ))
}

pub fn gen_sf_edge_set(sample: &CodeSample) -> Result<SfVariant, String> {
    let ast = parse(&sample.source).map_err(|e| e.to_string())?;
    let script = body_insertions(&sample.source, &ast, |ret, ptr| {
        if *ret == BaseType::Void && ptr == 0 {
            "if(0==1) return;".to_string()
        } else {
            "if(0==1) return 0;".to_string()
        }
    });
    let source = script.apply(&sample.source).map_err(|e| e.to_string())?;
    let map = script.line_map(&sample.source).map_err(|e| e.to_string())?;
    Ok(sf_variant(
        sample,
        PerturbKind::SfEdgeSet,
        source,
        "insert if(0==1) return; at the start of each function",
        LineRemap::Shift(map),
        SymbolMap::default(),
        false,
    ))
}

/// Names never symbolized: keywords, subset type names, the sensitive and
/// supporting library APIs, and well-known library objects.
const PROTECTED_NAMES: &[&str] = &[
    "void", "char", "short", "int", "long", "float", "double", "unsigned", "signed",
    "size_t", "wchar_t", "const", "static", "if", "else", "while", "for", "return",
    "sizeof", "typedef", "NULL", "stdin", "stdout", "stderr", "main",
    "memcpy", "strncpy", "strcpy", "wcsncpy", "memset", "wmemset",
    "fgets", "getch", "gets", "getchar", "fgetc",
    "malloc", "calloc", "alloca", "free",
    "printf", "fprintf", "rd_stub", "wr_stub",
];

pub fn gen_sf_identifier(sample: &CodeSample) -> Result<SfVariant, String> {
    let items = lex_raw(&sample.source).map_err(|e| e.to_string())?;
    let ast = parse(&sample.source).map_err(|e| e.to_string())?;
    let prepared = prepare(&sample.source).map_err(|e| e.to_string())?;
    let mut fn_names: BTreeSet<String> = ast.functions.iter().map(|f| f.name.clone()).collect();
    fn_names.extend(ast.prototypes.iter().cloned());
    let macro_names: BTreeSet<String> = prepared.defines.keys().cloned().collect();

    // names already in symbolic form keep themselves so the rewrite is a
    // fixed point; their indices are reserved
    let symbolic = |name: &str, prefix: &str| -> Option<u32> {
        name.strip_prefix(prefix).and_then(|d| {
            if !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()) { d.parse().ok() } else { None }
        })
    };
    let mut reserved_var: BTreeSet<u32> = BTreeSet::new();
    let mut reserved_fun: BTreeSet<u32> = BTreeSet::new();
    let mut occurrence_order: Vec<String> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for item in &items {
        if let RawItem::Tok(t) = item {
            if t.kind == TokKind::Ident
                && !PROTECTED_NAMES.contains(&t.text.as_str())
                && !macro_names.contains(&t.text)
                && seen.insert(t.text.clone())
            {
                occurrence_order.push(t.text.clone());
                if let Some(k) = symbolic(&t.text, "VAR") {
                    reserved_var.insert(k);
                }
                if let Some(k) = symbolic(&t.text, "FUN") {
                    reserved_fun.insert(k);
                }
            }
        }
    }

    let mut map = SymbolMap::default();
    let (mut next_var, mut next_fun) = (1u32, 1u32);
    for name in &occurrence_order {
        if symbolic(name, "VAR").is_some() || symbolic(name, "FUN").is_some() {
            map.map.insert(name.clone(), name.clone());
            continue;
        }
        let new = if fn_names.contains(name) {
            while reserved_fun.contains(&next_fun) {
                next_fun += 1;
            }
            let n = format!("FUN{}", next_fun);
            next_fun += 1;
            n
        } else {
            while reserved_var.contains(&next_var) {
                next_var += 1;
            }
            let n = format!("VAR{}", next_var);
            next_var += 1;
            n
        };
        map.map.insert(name.clone(), new);
    }

    let mut script = EditScript::new();
    for item in &items {
        if let RawItem::Tok(t) = item {
            if t.kind == TokKind::Ident {
                if let Some(new) = map.map.get(&t.text) {
                    if new != &t.text {
                        script.push(Edit::ReplaceSpan { span: t.span, text: new.clone() });
                    }
                }
            }
        }
    }
    let source = script.apply(&sample.source).map_err(|e| e.to_string())?;
    Ok(sf_variant(
        sample,
        PerturbKind::SfIdentifier,
        source,
        "symbolize user identifiers to VARk/FUNk",
        LineRemap::Identity,
        map,
        false,
    ))
}

pub fn gen_sf_formatting(sample: &CodeSample) -> Result<SfVariant, String> {
    let source = normalize_formatting(&sample.source).map_err(|e| e.to_string())?;
    let no_op = source == sample.source;
    // token streams are identical by construction; zipping them yields the
    // old-line to new-line correspondence
    let remap = if no_op {
        LineRemap::Identity
    } else {
        let old_toks = code_tokens(&sample.source)?;
        let new_toks = code_tokens(&source)?;
        if old_toks.len() != new_toks.len() {
            return Err("formatting changed the token count".into());
        }
        let mut table = BTreeMap::new();
        for (o, n) in old_toks.iter().zip(new_toks.iter()) {
            table.entry(o.span.start.line).or_insert(n.span.start.line);
        }
        LineRemap::Table(table)
    };
    Ok(sf_variant(
        sample,
        PerturbKind::SfFormatting,
        source,
        "normalize indentation and statement layout",
        remap,
        SymbolMap::default(),
        no_op,
    ))
}

fn code_tokens(source: &str) -> Result<Vec<crate::frontend::lexer::Token>, String> {
    Ok(lex_raw(source)
        .map_err(|e| e.to_string())?
        .into_iter()
        .filter_map(|i| match i {
            RawItem::Tok(t) => Some(t),
            _ => None,
        })
        .collect())
}

/// SF neutrality gate: the ten-rule witness set must be identical modulo
/// line shifts and identifier renaming.
pub fn check_sf_variant(
    sample: &CodeSample,
    annotated: &AnnotatedSample,
    sf: &SfVariant,
    report: &mut GenReport,
) {
    let _ = sample;
    let got = match analyze_source(&sf.variant.source, &sf.variant.vulnerable_lines, &all_features())
    {
        Ok(w) => w,
        Err(e) => {
            report.failures.push(format!("{}: does not re-parse: {}", sf.variant.variant_id, e));
            return;
        }
    };
    let mut expected: Vec<_> = annotated
        .witnesses
        .iter()
        .map(|w| {
            let mut w = w.clone();
            w.sample_id = String::new();
            w.function = sf.symbols.rename(&w.function);
            w.lines = w.lines.iter().map(|(k, v)| (k.clone(), sf.remap.map(*v))).collect();
            w.vars = w.vars.iter().map(|(k, v)| (k.clone(), sf.symbols.rename(v))).collect();
            w.key()
        })
        .collect();
    let mut actual: Vec<_> = got.iter().map(|w| w.key()).collect();
    expected.sort();
    actual.sort();
    if expected != actual {
        report.failures.push(format!(
            "{}: witness set changed ({} expected, {} found)",
            sf.variant.variant_id,
            expected.len(),
            actual.len()
        ));
        return;
    }
    report.variants.push(sf.variant.clone());
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::annotate_sample;

    fn sample(id: &str, src: &str, vulnerable: &[u32]) -> CodeSample {
        CodeSample {
            sample_id: id.into(),
            path: format!("{}.c", id),
            label: if vulnerable.is_empty() { Label::NonVulnerable } else { Label::Vulnerable },
            cwe: None,
            vulnerable_lines: vulnerable.iter().copied().collect(),
            source: src.into(),
        }
    }

    fn run(src: &str, vulnerable: &[u32]) -> GenReport {
        let s = sample("s1", src, vulnerable);
        let ws = analyze_source(src, &s.vulnerable_lines, &all_features()).unwrap();
        let ann = annotate_sample(&s, ws);
        generate_for_sample(&s, &ann, true)
    }

    #[test]
    fn ibs_yields_two_fpps_and_two_feps() {
        let src = "void f() {\n    char data[10];\n    memset(data, 'C', 40);\n}\n";
        let r = run(src, &[3]);
        assert!(r.failures.is_empty(), "{:?}", r.failures);
        let vf: Vec<_> = r.variants.iter().filter(|v| !v.kind.is_sf()).collect();
        assert_eq!(vf.iter().filter(|v| v.kind == PerturbKind::Fpp).count(), 2);
        assert_eq!(vf.iter().filter(|v| v.kind == PerturbKind::Fep).count(), 2);
        let fpp1 = vf.iter().find(|v| v.variant_id.ends_with("FPP__1")).unwrap();
        assert!(fpp1.source.contains("char data[9]"));
        let fep2 = vf.iter().find(|v| v.variant_id.ends_with("FEP__2")).unwrap();
        assert!(fep2.source.contains("memset(data, 'C', 10)"));
        assert_eq!(fep2.expected_label, Label::NonVulnerable);
    }

    #[test]
    fn uaf_fep_replaces_free_with_null() {
        let src = "void f() {\n    char *p = (char *)malloc(8);\n    free(p);\n    int x = p[0];\n}\n";
        let r = run(src, &[4]);
        assert!(r.failures.is_empty(), "{:?}", r.failures);
        let fep1 = r
            .variants
            .iter()
            .find(|v| v.variant_id.contains("UAF__FEP__1"))
            .unwrap();
        assert!(fep1.source.contains("free(NULL);"));
        let fep2 = r
            .variants
            .iter()
            .find(|v| v.variant_id.contains("UAF__FEP__2"))
            .unwrap();
        assert!(fep2.source.contains("printf(\"\");"));
    }

    #[test]
    fn buw_fep_adds_guard() {
        let src = "void f(int i) {\n    char b[10];\n    if (i < 10) {\n        b[i] = 1;\n    }\n}\n";
        let r = run(src, &[4]);
        assert!(r.failures.is_empty(), "{:?}", r.failures);
        let fep = r.variants.iter().find(|v| v.variant_id.contains("BUW__FEP__1")).unwrap();
        assert!(fep.source.contains("(i < 10) && i >= 0"));
        let fpp = r.variants.iter().find(|v| v.variant_id.contains("BUW__FPP__1")).unwrap();
        assert!(fpp.source.contains("i > -20"));
    }

    #[test]
    fn ra_has_no_fpp() {
        let src = "void f(char *buf) {\n    fgets(buf, 64, 0);\n}\n";
        let r = run(src, &[2]);
        assert!(r.failures.is_empty(), "{:?}", r.failures);
        let ra: Vec<_> =
            r.variants.iter().filter(|v| v.feature == Some(FeatureId::RA)).collect();
        assert_eq!(ra.len(), 1);
        assert_eq!(ra[0].kind, PerturbKind::Fep);
        assert!(ra[0].source.contains("rd_stub(buf, 64, 0)"));
    }

    #[test]
    fn wa_swap_preserves_and_stub_eliminates() {
        let src = "void f(char *d, char *s, int n) {\n    memcpy(d, s, n);\n}\n";
        let r = run(src, &[2]);
        assert!(r.failures.is_empty(), "{:?}", r.failures);
        let fpp = r.variants.iter().find(|v| v.variant_id.contains("WA__FPP__1")).unwrap();
        assert!(fpp.source.contains("strncpy(d, s, n)"));
        let fep = r.variants.iter().find(|v| v.variant_id.contains("WA__FEP__1")).unwrap();
        assert!(fep.source.contains("wr_stub(d, s, n)"));
    }

    #[test]
    fn sf_variants_are_neutral_on_vulnerable_sample() {
        let src = "void f() {\n    char data[10];\n    memset(data, 'C', 40);\n}\n";
        let r = run(src, &[3]);
        assert!(r.failures.is_empty(), "{:?}", r.failures);
        let sf: Vec<_> = r.variants.iter().filter(|v| v.kind.is_sf()).collect();
        assert_eq!(sf.len(), 4);
        let ident = sf.iter().find(|v| v.kind == PerturbKind::SfIdentifier).unwrap();
        assert!(ident.source.contains("VAR1"));
        assert!(ident.source.contains("FUN1"));
        assert!(ident.source.contains("memset"));
    }

    #[test]
    fn symbolization_is_idempotent() {
        let src = "void f() {\n    char data[10];\n    memset(data, 'C', 40);\n}\n";
        let s = sample("s1", src, &[3]);
        let (first, _) = {
            let v = gen_sf_identifier(&s).unwrap();
            (v.variant.source.clone(), v.symbols)
        };
        let s2 = sample("s2", &first, &[3]);
        let again = gen_sf_identifier(&s2).unwrap();
        assert_eq!(again.variant.source, first);
    }

    #[test]
    fn df_feps_kill_the_witness() {
        let src = "void f() {\n    char *p = (char *)malloc(8);\n    free(p);\n    free(p);\n}\n";
        let r = run(src, &[4]);
        assert!(r.failures.is_empty(), "{:?}", r.failures);
        let fep1 = r.variants.iter().find(|v| v.variant_id.contains("DF__FEP__1")).unwrap();
        assert!(fep1.source.contains("p = malloc(8);"));
        let fep2 = r.variants.iter().find(|v| v.variant_id.contains("DF__FEP__2")).unwrap();
        assert!(fep2.source.contains("free(NULL);"));
    }

    #[test]
    fn vulnerable_lines_shift_with_insertions() {
        let src = "void f() {\n    char *p = (char *)malloc(8);\n    free(p);\n    free(p);\n}\n";
        let r = run(src, &[4]);
        let fpp = r.variants.iter().find(|v| v.variant_id.contains("DF__FPP__1")).unwrap();
        assert_eq!(fpp.vulnerable_lines, [5u32].into_iter().collect());
    }

    #[test]
    fn edge_set_uses_typed_return() {
        let src = "int f() {\n    return 1;\n}\n";
        let s = sample("s1", src, &[]);
        let v = gen_sf_edge_set(&s).unwrap();
        assert!(v.variant.source.contains("if(0==1) return 0;"));
    }

    #[test]
    fn formatting_no_op_is_flagged() {
        let src = "void f() {\n    char data[10];\n}\n";
        let normalized = normalize_formatting(src).unwrap();
        let s = sample("s1", &normalized, &[]);
        let v = gen_sf_formatting(&s).unwrap();
        assert!(v.variant.no_op);
    }
}
