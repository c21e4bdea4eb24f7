//! Vulnerability-feature detection over abridged CPGs. Each of the ten
//! features is a graph predicate over write/read/free/index nodes, their
//! data-dependence-resolved buffer definitions, and control-dependence
//! guards. Detection is deterministic and abstains whenever a constant it
//! needs is unknown.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cpg::builder::{build_cpg, resolve_buffer_def};
use crate::cpg::consts::ConstValue;
use crate::cpg::graph::{AllocKind, Node, NodeId, NodeKind, PropertyGraph};
use crate::error::SyntaxError;
use crate::frontend::ast::{BinOp, Expr, ExprKind};
use crate::frontend::lexer::Span;
use crate::frontend::parser::parse;
use crate::sample::{CodeSample, Label};

/// The ten vulnerability features, one per detection rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FeatureId {
    /// Improper buffer size: write of n bytes into a buffer of length < n.
    IBS,
    /// Buffer size matches source: the over-long count equals the source length.
    BSB,
    /// Off-by-one error: count exceeds the destination length by exactly one.
    OE,
    /// Buffer over-read: read of n bytes from a source shorter than n.
    BO,
    /// Double free: two frees of one buffer with no intervening allocation.
    DF,
    /// Use after free: a use of a buffer reachable after its deallocation.
    UAF,
    /// Buffer underwrite: indexed write with no lower-bound check on the index.
    BUW,
    /// Buffer underread: indexed read with no lower-bound check on the index.
    BUR,
    /// Sensitive read API call on a known-vulnerable line.
    RA,
    /// Sensitive write API call on a known-vulnerable line.
    WA,
}

impl FeatureId {
    pub const ALL: [FeatureId; 10] = [
        FeatureId::IBS,
        FeatureId::BSB,
        FeatureId::OE,
        FeatureId::BO,
        FeatureId::DF,
        FeatureId::UAF,
        FeatureId::BUW,
        FeatureId::BUR,
        FeatureId::RA,
        FeatureId::WA,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FeatureId::IBS => "IBS",
            FeatureId::BSB => "BSB",
            FeatureId::OE => "OE",
            FeatureId::BO => "BO",
            FeatureId::DF => "DF",
            FeatureId::UAF => "UAF",
            FeatureId::BUW => "BUW",
            FeatureId::BUR => "BUR",
            FeatureId::RA => "RA",
            FeatureId::WA => "WA",
        }
    }

    pub fn parse(s: &str) -> Option<FeatureId> {
        FeatureId::ALL.iter().copied().find(|f| f.as_str().eq_ignore_ascii_case(s))
    }

    /// Features whose rule needs externally supplied vulnerable lines.
    pub fn needs_vulnerable_lines(&self) -> bool {
        matches!(self, FeatureId::RA | FeatureId::WA)
    }
}

impl std::fmt::Display for FeatureId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Source spans a perturbation needs to rewrite a witness. Never serialized;
/// always re-derivable by re-running detection.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Anchors {
    /// count argument expression of the sink call
    pub count_span: Option<Span>,
    /// destination length expression (array size or allocation size arg)
    pub dest_len_span: Option<Span>,
    /// source length expression
    pub src_len_span: Option<Span>,
    /// callee identifier of the sink call
    pub callee_span: Option<Span>,
    /// full statement of the sink call
    pub sink_span: Option<Span>,
    pub first_free_span: Option<Span>,
    pub second_free_span: Option<Span>,
    /// argument of the free call (UAF)
    pub free_arg_span: Option<Span>,
    /// statement using the freed buffer (UAF)
    pub use_span: Option<Span>,
    /// innermost governing condition mentioning idx (BUW/BUR)
    pub guard_span: Option<Span>,
    /// statement containing the indexed access (BUW/BUR)
    pub access_span: Option<Span>,
    /// byte multiplier of the count argument (wide-char calls use 4)
    pub count_unit: i128,
    /// granularity of the destination length expression
    pub dest_elem: i128,
    pub src_elem: i128,
    pub dest_alloc: Option<AllocKind>,
    pub src_alloc: Option<AllocKind>,
    /// original allocation argument text (DF realloc-style repair)
    pub alloc_args_text: Option<String>,
}

/// A concrete demonstration that one rule's predicate holds: named line
/// anchors, variable names, and the constants that satisfy the predicate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureWitness {
    pub sample_id: String,
    pub feature: FeatureId,
    pub function: String,
    pub lines: BTreeMap<String, u32>,
    pub vars: BTreeMap<String, String>,
    pub constants: BTreeMap<String, i128>,
    #[serde(skip)]
    pub anchors: Anchors,
}

impl FeatureWitness {
    fn new(feature: FeatureId, function: &str) -> Self {
        FeatureWitness {
            sample_id: String::new(),
            feature,
            function: function.to_string(),
            lines: BTreeMap::new(),
            vars: BTreeMap::new(),
            constants: BTreeMap::new(),
            anchors: Anchors { count_unit: 1, dest_elem: 1, src_elem: 1, ..Anchors::default() },
        }
    }

    /// The line where the flaw manifests, used for SARD comparison.
    pub fn flaw_line(&self) -> u32 {
        let key = match self.feature {
            FeatureId::DF => "second_free_line",
            FeatureId::UAF => "use_line",
            FeatureId::BUW | FeatureId::BUR => "access_line",
            _ => "use_line",
        };
        *self.lines.get(key).unwrap_or(&0)
    }

    /// Span-free identity used to compare witness sets across rewrites.
    pub fn key(&self) -> (FeatureId, String, Vec<(String, u32)>, Vec<(String, String)>, Vec<(String, i128)>)
    {
        (
            self.feature,
            self.function.clone(),
            self.lines.iter().map(|(k, v)| (k.clone(), *v)).collect(),
            self.vars.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
            self.constants.iter().map(|(k, v)| (k.clone(), *v)).collect(),
        )
    }

    /// Required anchor names per feature; mirrored by `check_schema`.
    pub fn required_anchors(feature: FeatureId) -> (&'static [&'static str], &'static [&'static str]) {
        match feature {
            FeatureId::IBS | FeatureId::OE => (&["def_line", "use_line"], &["dest"]),
            FeatureId::BSB => (&["def_line", "src_def_line", "use_line"], &["dest", "src"]),
            FeatureId::BO => (&["src_def_line", "use_line"], &["src"]),
            FeatureId::DF => (&["first_free_line", "second_free_line"], &["buffer"]),
            FeatureId::UAF => (&["dealloc_line", "use_line"], &["buffer"]),
            FeatureId::BUW | FeatureId::BUR => (&["access_line"], &["buffer", "idx"]),
            FeatureId::RA | FeatureId::WA => (&["use_line"], &[]),
        }
    }

    /// Structural witness completeness: every named anchor the feature's
    /// schema requires is present, and the recorded constants satisfy the
    /// rule predicate.
    pub fn check_schema(&self) -> Result<(), String> {
        let (lines, vars) = FeatureWitness::required_anchors(self.feature);
        for l in lines {
            if !self.lines.contains_key(*l) {
                return Err(format!("{}: missing line anchor {}", self.feature, l));
            }
        }
        for v in vars {
            if !self.vars.contains_key(*v) {
                return Err(format!("{}: missing var anchor {}", self.feature, v));
            }
        }
        let c = |k: &str| self.constants.get(k).copied();
        let ok = match self.feature {
            FeatureId::IBS => matches!((c("len_d"), c("n")), (Some(l), Some(n)) if l < n),
            FeatureId::BSB => matches!(
                (c("len_d"), c("len_s"), c("n")),
                (Some(l), Some(s), Some(n)) if l < n && n == s
            ),
            FeatureId::OE => matches!((c("len_d"), c("n")), (Some(l), Some(n)) if n == l + 1),
            FeatureId::BO => matches!((c("len_s"), c("n")), (Some(s), Some(n)) if s < n),
            _ => true,
        };
        if !ok {
            return Err(format!("{}: constants violate the rule predicate", self.feature));
        }
        Ok(())
    }
}

/// Detection over one function's graph plus the sample's labeled lines.
pub fn detect_function(
    g: &PropertyGraph,
    vulnerable_lines: &BTreeSet<u32>,
    features: &BTreeSet<FeatureId>,
) -> Vec<FeatureWitness> {
    let mut out = Vec::new();
    let overflow = detect_overflow(g);
    let overflow_lines: BTreeSet<u32> =
        overflow.iter().filter_map(|w| w.lines.get("use_line").copied()).collect();
    out.extend(overflow.into_iter().filter(|w| features.contains(&w.feature)));
    if features.contains(&FeatureId::DF) || features.contains(&FeatureId::UAF) {
        out.extend(
            detect_deallocated_use(g).into_iter().filter(|w| features.contains(&w.feature)),
        );
    }
    if features.contains(&FeatureId::BUW) || features.contains(&FeatureId::BUR) {
        out.extend(detect_range_check(g).into_iter().filter(|w| features.contains(&w.feature)));
    }
    if features.contains(&FeatureId::RA) || features.contains(&FeatureId::WA) {
        out.extend(
            detect_sensitive_api(g, vulnerable_lines, &overflow_lines)
                .into_iter()
                .filter(|w| features.contains(&w.feature)),
        );
    }
    out.sort_by(|a, b| a.key().cmp(&b.key()));
    out.dedup_by(|a, b| a.key() == b.key());
    out
}

/// Parse a source file, build per-function graphs, and run every enabled
/// rule. The vulnerable-line set is only consulted by RA/WA.
pub fn analyze_source(
    source: &str,
    vulnerable_lines: &BTreeSet<u32>,
    features: &BTreeSet<FeatureId>,
) -> Result<Vec<FeatureWitness>, SyntaxError> {
    let ast = parse(source)?;
    let mut out = Vec::new();
    for f in &ast.functions {
        let g = build_cpg(source, f);
        out.extend(detect_function(&g, vulnerable_lines, features));
    }
    Ok(out)
}

pub fn all_features() -> BTreeSet<FeatureId> {
    FeatureId::ALL.iter().copied().collect()
}

struct BufferFacts {
    def_node: NodeId,
    len: ConstValue,
    elem: i128,
    len_span: Option<Span>,
    alloc: Option<AllocKind>,
    alloc_args_text: Option<String>,
}

fn buffer_facts(g: &PropertyGraph, at: NodeId, var: &str) -> Option<BufferFacts> {
    let def = resolve_buffer_def(g, at, var)?;
    let buf = g.node(def).buffer.as_ref()?;
    Some(BufferFacts {
        def_node: def,
        len: buf.len_bytes,
        elem: buf.elem_size.unwrap_or(1),
        len_span: buf.len_span,
        alloc: buf.alloc,
        alloc_args_text: buf.alloc_args_text.clone(),
    })
}

/// Rules for the overflow family, evaluated per buffer-write call with
/// precedence OE > BSB > IBS; the over-read rule fires independently on the
/// call's source buffer.
pub fn detect_overflow(g: &PropertyGraph) -> Vec<FeatureWitness> {
    let mut out = Vec::new();
    for wf in g.nodes_of_kind(NodeKind::Wf) {
        let call = match &wf.call {
            Some(c) => c,
            None => continue,
        };
        let n = call.count_bytes;
        let dest = call.arg_dest.clone();
        let dest_facts = dest.as_ref().and_then(|d| buffer_facts(g, wf.id, d));
        let src = call.arg_src.clone();
        let src_facts = src.as_ref().and_then(|s| buffer_facts(g, wf.id, s));

        let count_span = call.count_arg.and_then(|i| call.args.get(i)).map(|a| a.span);
        let base_anchors = |a: &mut Anchors| {
            a.count_span = count_span;
            a.callee_span = Some(call.callee_span);
            a.sink_span = wf.span;
            a.count_unit = call.count_unit;
        };

        // write-side rules need both the destination length and the count
        if let (Some(d), Some(df), ConstValue::Known(nv)) = (&dest, &dest_facts, n) {
            if let ConstValue::Known(ld) = df.len {
                let feature = if nv == ld + 1 {
                    Some(FeatureId::OE)
                } else if ld < nv {
                    let matches_src = matches!(
                        src_facts.as_ref().map(|s| s.len),
                        Some(ConstValue::Known(ls)) if ls == nv
                    );
                    Some(if matches_src { FeatureId::BSB } else { FeatureId::IBS })
                } else {
                    None
                };
                if let Some(f) = feature {
                    let mut w = FeatureWitness::new(f, &g.function);
                    w.lines.insert("def_line".into(), g.node(df.def_node).line);
                    w.lines.insert("use_line".into(), wf.line);
                    w.vars.insert("dest".into(), d.clone());
                    w.constants.insert("len_d".into(), ld);
                    w.constants.insert("n".into(), nv);
                    base_anchors(&mut w.anchors);
                    w.anchors.dest_len_span = df.len_span;
                    w.anchors.dest_elem = df.elem;
                    w.anchors.dest_alloc = df.alloc;
                    if f == FeatureId::BSB {
                        let sf = src_facts.as_ref().unwrap();
                        w.lines.insert("src_def_line".into(), g.node(sf.def_node).line);
                        w.vars.insert("src".into(), src.clone().unwrap());
                        w.constants.insert(
                            "len_s".into(),
                            match sf.len {
                                ConstValue::Known(v) => v,
                                ConstValue::Unknown => unreachable!("BSB requires known LEN_s"),
                            },
                        );
                        w.anchors.src_len_span = sf.len_span;
                        w.anchors.src_elem = sf.elem;
                        w.anchors.src_alloc = sf.alloc;
                    }
                    out.push(w);
                }
            }
        }

        // over-read: the count exceeds the source buffer's length
        if let (Some(s), Some(sf), ConstValue::Known(nv)) = (&src, &src_facts, n) {
            if let ConstValue::Known(ls) = sf.len {
                if ls < nv {
                    let mut w = FeatureWitness::new(FeatureId::BO, &g.function);
                    w.lines.insert("src_def_line".into(), g.node(sf.def_node).line);
                    w.lines.insert("use_line".into(), wf.line);
                    w.vars.insert("src".into(), s.clone());
                    if let Some(d) = &dest {
                        w.vars.insert("dest".into(), d.clone());
                    }
                    w.constants.insert("len_s".into(), ls);
                    w.constants.insert("n".into(), nv);
                    base_anchors(&mut w.anchors);
                    w.anchors.src_len_span = sf.len_span;
                    w.anchors.src_elem = sf.elem;
                    w.anchors.src_alloc = sf.alloc;
                    out.push(w);
                }
            }
        }
    }
    out
}

/// CFG reachability from `from`'s successors to `to`, never passing through
/// a barrier node. `to` itself may be a barrier.
fn reachable_avoiding(
    g: &PropertyGraph,
    from: NodeId,
    to: NodeId,
    barrier: &dyn Fn(&Node) -> bool,
) -> bool {
    let mut seen = BTreeSet::new();
    let mut stack: Vec<NodeId> = g.cfg_successors(from).to_vec();
    while let Some(v) = stack.pop() {
        if v == to {
            return true;
        }
        if !seen.insert(v) || barrier(g.node(v)) {
            continue;
        }
        stack.extend(g.cfg_successors(v).iter().copied());
    }
    false
}

/// Double-free and use-after-free rules.
pub fn detect_deallocated_use(g: &PropertyGraph) -> Vec<FeatureWitness> {
    let mut out = Vec::new();
    let frees: Vec<&Node> = g
        .nodes_of_kind(NodeKind::Free)
        .filter(|n| n.call.as_ref().and_then(|c| c.arg_dest.as_ref()).is_some())
        .collect();
    for u in &frees {
        let b = u.call.as_ref().unwrap().arg_dest.clone().unwrap();
        // a reallocation of b on the path neutralizes both rules
        let alloc_barrier = |n: &Node| {
            n.kind == NodeKind::Af && n.buffer.as_ref().map(|x| x.name == b).unwrap_or(false)
        };
        for v in &frees {
            if u.id == v.id {
                continue;
            }
            if v.call.as_ref().unwrap().arg_dest.as_deref() != Some(b.as_str()) {
                continue;
            }
            if reachable_avoiding(g, u.id, v.id, &alloc_barrier) {
                let mut w = FeatureWitness::new(FeatureId::DF, &g.function);
                w.lines.insert("first_free_line".into(), u.line);
                w.lines.insert("second_free_line".into(), v.line);
                w.vars.insert("buffer".into(), b.clone());
                w.anchors.first_free_span = u.span;
                w.anchors.second_free_span = v.span;
                if let Some(bf) = buffer_facts(g, u.id, &b) {
                    w.anchors.alloc_args_text = bf.alloc_args_text;
                    w.anchors.dest_alloc = bf.alloc;
                }
                out.push(w);
            }
        }
        // any later use of b (other than another free) with no redefinition
        let def_barrier = |n: &Node| n.defs.iter().any(|d| d == &b);
        for use_node in &g.nodes {
            if use_node.id == u.id
                || use_node.kind == NodeKind::Free
                || use_node.kind == NodeKind::Var
                || !use_node.uses.iter().any(|x| x == &b)
            {
                continue;
            }
            if reachable_avoiding(g, u.id, use_node.id, &def_barrier) {
                let mut w = FeatureWitness::new(FeatureId::UAF, &g.function);
                w.lines.insert("dealloc_line".into(), u.line);
                w.lines.insert("use_line".into(), use_node.line);
                w.vars.insert("buffer".into(), b.clone());
                w.anchors.second_free_span = u.span;
                w.anchors.free_arg_span =
                    u.call.as_ref().and_then(|c| c.args.first()).map(|a| a.span);
                w.anchors.use_span = use_node.span;
                out.push(w);
            }
        }
    }
    out
}

/// Accepted lower-bound guard atoms: idx >= K (K ≥ 0) or idx > K (K ≥ −1),
/// in either operand order, anywhere in a governing condition's conjunction.
fn has_lower_bound_guard(cond: &Expr, idx: &str) -> bool {
    fn atoms<'a>(e: &'a Expr, out: &mut Vec<&'a Expr>) {
        match &e.kind {
            ExprKind::Bin { op: BinOp::And, lhs, rhs } => {
                atoms(lhs, out);
                atoms(rhs, out);
            }
            _ => out.push(e),
        }
    }
    fn const_of(e: &Expr) -> Option<i128> {
        crate::cpg::consts::eval_const(e).known()
    }
    let mut list = Vec::new();
    atoms(cond, &mut list);
    for atom in list {
        if let ExprKind::Bin { op, lhs, rhs } = &atom.kind {
            let (lv, lk) = (lhs.as_ident(), const_of(lhs));
            let (rv, rk) = (rhs.as_ident(), const_of(rhs));
            let hit = match op {
                BinOp::Ge => lv == Some(idx) && rk.map_or(false, |k| k >= 0),
                BinOp::Gt => lv == Some(idx) && rk.map_or(false, |k| k >= -1),
                BinOp::Le => rv == Some(idx) && lk.map_or(false, |k| k >= 0),
                BinOp::Lt => rv == Some(idx) && lk.map_or(false, |k| k >= -1),
                _ => false,
            };
            if hit {
                return true;
            }
        }
    }
    false
}

/// Underwrite/underread rules: an indexed buffer access whose index variable
/// is never established non-negative by any governing condition. Unknown
/// guard shapes that mention no accepted pattern count as unchecked.
pub fn detect_range_check(g: &PropertyGraph) -> Vec<FeatureWitness> {
    let mut out = Vec::new();
    for node in &g.nodes {
        for acc in &node.index_accesses {
            let idx = match &acc.index_var {
                Some(v) => v.clone(),
                None => continue, // constant or complex index: rule abstains
            };
            let mut guarded = false;
            let mut guard_span = None;
            for c in g.cd_ancestors(node.id) {
                let cn = g.node(c);
                if let Some(cond) = &cn.cond_expr {
                    let mut mentions = Vec::new();
                    cond.collect_idents(&mut mentions);
                    if mentions.iter().any(|m| m == &idx) && guard_span.is_none() {
                        guard_span = cn.span;
                    }
                    if has_lower_bound_guard(cond, &idx) {
                        guarded = true;
                        break;
                    }
                }
            }
            if guarded {
                continue;
            }
            let feature = if acc.is_write { FeatureId::BUW } else { FeatureId::BUR };
            let mut w = FeatureWitness::new(feature, &g.function);
            w.lines.insert("access_line".into(), node.line);
            w.vars.insert("buffer".into(), acc.buffer.clone());
            w.vars.insert("idx".into(), idx.clone());
            if let Some(bf) = buffer_facts(g, node.id, &acc.buffer) {
                if let ConstValue::Known(l) = bf.len {
                    w.constants.insert("len_b".into(), l);
                }
            }
            w.anchors.access_span = node.span;
            w.anchors.guard_span = guard_span;
            out.push(w);
        }
    }
    out
}

/// Location-predicated sensitive-API rules. A write-API witness is dropped
/// when an overflow rule already witnessed the same call line.
pub fn detect_sensitive_api(
    g: &PropertyGraph,
    vulnerable_lines: &BTreeSet<u32>,
    overflow_lines: &BTreeSet<u32>,
) -> Vec<FeatureWitness> {
    let mut out = Vec::new();
    for node in &g.nodes {
        let call = match &node.call {
            Some(c) => c,
            None => continue,
        };
        if !vulnerable_lines.contains(&node.line) {
            continue;
        }
        let feature = match node.kind {
            NodeKind::Rf => FeatureId::RA,
            NodeKind::Wf if !overflow_lines.contains(&node.line) => FeatureId::WA,
            _ => continue,
        };
        let mut w = FeatureWitness::new(feature, &g.function);
        w.lines.insert("use_line".into(), node.line);
        if let Some(d) = &call.arg_dest {
            w.vars.insert("dest".into(), d.clone());
        }
        if let ConstValue::Known(n) = call.count_bytes {
            w.constants.insert("n".into(), n);
        }
        w.anchors.callee_span = Some(call.callee_span);
        w.anchors.sink_span = node.span;
        w.anchors.count_span = call.count_arg.and_then(|i| call.args.get(i)).map(|a| a.span);
        w.anchors.count_unit = call.count_unit;
        out.push(w);
    }
    out
}

/// A sample plus everything detection learned about it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnnotatedSample {
    pub sample_id: String,
    pub path: String,
    pub label: Label,
    pub witnesses: Vec<FeatureWitness>,
}

/// Attach witnesses to their sample; zero-witness samples are still
/// represented so the run summary can count exclusions.
pub fn annotate_sample(sample: &CodeSample, mut witnesses: Vec<FeatureWitness>) -> AnnotatedSample {
    for w in &mut witnesses {
        w.sample_id = sample.sample_id.clone();
    }
    AnnotatedSample {
        sample_id: sample.sample_id.clone(),
        path: sample.path.clone(),
        label: sample.label,
        witnesses,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleAgreement {
    pub sample_id: String,
    pub witness_lines: BTreeSet<u32>,
    pub annotation_lines: BTreeSet<u32>,
    pub agree: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub samples: Vec<SampleAgreement>,
    /// agreements / comparable samples; None when nothing is comparable
    pub agreement_rate: Option<(u64, u64)>,
}

impl ValidationReport {
    pub fn rate(&self) -> Option<f64> {
        self.agreement_rate.map(|(a, n)| a as f64 / n as f64)
    }
}

/// Compare witness flaw lines against FLAW / POTENTIAL FLAW annotation lines
/// with a ±1 tolerance in both directions. Samples with neither witnesses
/// nor flaw annotations are not counted.
pub fn validate_against_sard(
    annotated: &[(AnnotatedSample, Vec<crate::frontend::annotations::SardAnnotation>)],
) -> ValidationReport {
    let mut samples = Vec::new();
    let mut agreements = 0u64;
    let mut comparable = 0u64;
    for (a, anns) in annotated {
        let witness_lines: BTreeSet<u32> = a.witnesses.iter().map(|w| w.flaw_line()).collect();
        let annotation_lines: BTreeSet<u32> =
            anns.iter().filter(|x| x.kind.is_flaw()).map(|x| x.line).collect();
        if witness_lines.is_empty() && annotation_lines.is_empty() {
            continue;
        }
        comparable += 1;
        let near = |a: u32, set: &BTreeSet<u32>| {
            set.iter().any(|b| (a as i64 - *b as i64).abs() <= 1)
        };
        let agree = witness_lines.iter().all(|l| near(*l, &annotation_lines))
            && annotation_lines.iter().all(|l| near(*l, &witness_lines));
        if agree {
            agreements += 1;
        }
        samples.push(SampleAgreement {
            sample_id: a.sample_id.clone(),
            witness_lines,
            annotation_lines,
            agree,
        });
    }
    ValidationReport {
        samples,
        agreement_rate: if comparable > 0 { Some((agreements, comparable)) } else { None },
    }
}
