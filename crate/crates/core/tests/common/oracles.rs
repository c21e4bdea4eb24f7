//! Brute-force dataflow and dominance oracles: small, slow, and written
//! against the definitions rather than the production algorithms, so the two
//! can disagree when either is wrong. Shared by the core oracle tests and
//! the acceptance suite.

use std::collections::BTreeSet;

use viperkit_core::cpg::graph::{EdgeKind, NodeKind, PropertyGraph, PropertyKey, Target, Value};

/// Statement nodes participating in the CFG (VAR nodes are attached after
/// dominance analysis and carry no control flow).
fn cfg_nodes(g: &PropertyGraph) -> Vec<u32> {
    g.nodes
        .iter()
        .filter(|n| n.kind != NodeKind::Var)
        .map(|n| n.id.0)
        .collect()
}

/// True iff some definition-clear CFG path carries `x` from the exit of
/// `def` to the entry of `use_at`.
fn def_reaches(g: &PropertyGraph, def: u32, x: &str, use_at: u32) -> bool {
    let mut seen = BTreeSet::new();
    let mut stack: Vec<u32> = g.cfg_succ[def as usize].iter().map(|n| n.0).collect();
    while let Some(v) = stack.pop() {
        if !seen.insert(v) {
            continue;
        }
        if v == use_at {
            return true;
        }
        if g.nodes[v as usize].defs.iter().any(|d| d == x) {
            continue;
        }
        stack.extend(g.cfg_succ[v as usize].iter().map(|n| n.0));
    }
    false
}

/// Every (def, use, var) triple connected by a definition-clear path.
pub fn brute_dd_edges(g: &PropertyGraph) -> BTreeSet<(u32, u32, String)> {
    let mut out = BTreeSet::new();
    for d in cfg_nodes(g) {
        for x in &g.nodes[d as usize].defs {
            for u in cfg_nodes(g) {
                if u != d
                    && g.nodes[u as usize].uses.iter().any(|y| y == x)
                    && def_reaches(g, d, x, u)
                {
                    out.insert((d, u, x.clone()));
                }
            }
        }
    }
    out
}

/// True iff `from` can reach EXIT without ever visiting `avoid`.
fn reaches_exit_avoiding(g: &PropertyGraph, from: u32, avoid: u32) -> bool {
    if from == avoid {
        return false;
    }
    let exit = g.exit.0;
    let mut seen = BTreeSet::new();
    let mut stack = vec![from];
    while let Some(v) = stack.pop() {
        if v == avoid || !seen.insert(v) {
            continue;
        }
        if v == exit {
            return true;
        }
        stack.extend(g.cfg_succ[v as usize].iter().map(|n| n.0));
    }
    false
}

/// All-paths post-dominator sets, indexed by node id: v post-dominates u
/// iff u cannot reach EXIT once v is removed.
pub fn brute_pdom_sets(g: &PropertyGraph) -> Vec<BTreeSet<u32>> {
    let ids = cfg_nodes(g);
    let mut sets = vec![BTreeSet::new(); g.nodes.len()];
    for &u in &ids {
        let mut set: BTreeSet<u32> = ids
            .iter()
            .copied()
            .filter(|&v| v != u && !reaches_exit_avoiding(g, u, v))
            .collect();
        set.insert(u);
        sets[u as usize] = set;
    }
    sets
}

/// Immediate post-dominator edges (v, ipdom(v)) from the brute-force sets:
/// the strict post-dominator whose own set equals the strict set.
pub fn brute_pd_edges(g: &PropertyGraph) -> BTreeSet<(u32, u32)> {
    let pdom = brute_pdom_sets(g);
    let mut out = BTreeSet::new();
    for u in cfg_nodes(g) {
        let mut strict = pdom[u as usize].clone();
        strict.remove(&u);
        for &w in &strict {
            if pdom[w as usize] == strict {
                out.insert((u, w));
                break;
            }
        }
    }
    out
}

/// Control-dependence pairs (branch, dependent) from the brute-force
/// post-dominator sets: v depends on branch u iff some successor of u is
/// post-dominated by v while v does not strictly post-dominate u.
pub fn brute_cd_edges(g: &PropertyGraph) -> BTreeSet<(u32, u32)> {
    let pdom = brute_pdom_sets(g);
    let mut out = BTreeSet::new();
    for u in cfg_nodes(g) {
        if g.cfg_succ[u as usize].len() < 2 {
            continue;
        }
        for v in cfg_nodes(g) {
            if v != u && pdom[u as usize].contains(&v) {
                continue;
            }
            if g.cfg_succ[u as usize].iter().any(|w| pdom[w.0 as usize].contains(&v)) {
                out.insert((u, v));
            }
        }
    }
    out
}

/// The production graph's edges of one kind, as comparable id pairs.
pub fn graph_edges(g: &PropertyGraph, kind: EdgeKind) -> BTreeSet<(u32, u32)> {
    g.edges.iter().filter(|e| e.kind == kind).map(|e| (e.src.0, e.dst.0)).collect()
}

/// The production DD edges with their carried variable.
pub fn graph_dd_edges(g: &PropertyGraph) -> BTreeSet<(u32, u32, String)> {
    g.edges
        .iter()
        .filter(|e| e.kind == EdgeKind::Dd)
        .map(|e| {
            let var = match g.mu_get(Target::Edge(e.id), PropertyKey::Var) {
                Ok(Some(Value::Text(t))) => t.clone(),
                _ => String::new(),
            };
            (e.src.0, e.dst.0, var)
        })
        .collect()
}

/// Statement count of a function graph (everything except ENTRY/EXIT/VAR).
pub fn statement_count(g: &PropertyGraph) -> usize {
    g.nodes
        .iter()
        .filter(|n| !matches!(n.kind, NodeKind::Entry | NodeKind::Exit | NodeKind::Var))
        .count()
}

/// Compare all three derived edge kinds against the brute-force oracles.
/// Returns a human-readable mismatch description on failure.
pub fn check_graph_against_oracles(g: &PropertyGraph) -> Result<(), String> {
    let dd = graph_dd_edges(g);
    let brute_dd = brute_dd_edges(g);
    if dd != brute_dd {
        return Err(format!("{}: DD mismatch: got {:?}, oracle {:?}", g.function, dd, brute_dd));
    }
    let pd = graph_edges(g, EdgeKind::Pd);
    let brute_pd = brute_pd_edges(g);
    if pd != brute_pd {
        return Err(format!("{}: PD mismatch: got {:?}, oracle {:?}", g.function, pd, brute_pd));
    }
    let cd = graph_edges(g, EdgeKind::Cd);
    let brute_cd = brute_cd_edges(g);
    if cd != brute_cd {
        return Err(format!("{}: CD mismatch: got {:?}, oracle {:?}", g.function, cd, brute_cd));
    }
    Ok(())
}

// ---- seeded constant-expression oracle ----

/// A generated expression together with its independently computed value
/// (`None` = must abstain as UNKNOWN).
pub struct GeneratedExpr {
    pub text: String,
    pub expected: Option<i128>,
}

/// Grow a random arithmetic expression while tracking its value by direct
/// interpretation, independent of the production folder.
pub fn gen_expr(rng: &mut impl rand::Rng, depth: u32) -> GeneratedExpr {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..4) {
            0 => {
                let v = rng.gen_range(0..1000i128);
                GeneratedExpr { text: v.to_string(), expected: Some(v) }
            }
            1 => {
                let (ty, size) = [("char", 1), ("short", 2), ("int", 4), ("long", 8)]
                    [rng.gen_range(0..4)];
                GeneratedExpr { text: format!("sizeof({ty})"), expected: Some(size) }
            }
            2 => GeneratedExpr { text: "x".into(), expected: None },
            _ => {
                let v = rng.gen_range(0..100i128);
                GeneratedExpr { text: format!("(-{v})"), expected: Some(-v) }
            }
        };
    }
    let a = gen_expr(rng, depth - 1);
    let b = gen_expr(rng, depth - 1);
    let op = ["+", "-", "*", "/", "%"][rng.gen_range(0..5)];
    let expected = match (a.expected, b.expected) {
        (Some(x), Some(y)) => match op {
            "+" => x.checked_add(y),
            "-" => x.checked_sub(y),
            "*" => x.checked_mul(y),
            "/" => (y != 0).then(|| x / y),
            _ => (y != 0).then(|| x % y),
        },
        _ => None,
    };
    GeneratedExpr { text: format!("({} {} {})", a.text, op, b.text), expected }
}
