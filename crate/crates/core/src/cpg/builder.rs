//! Per-function CPG construction: statement-level CFG, reaching-definitions
//! data dependence, post-dominance, control dependence, and DEF/USE edges,
//! with the property map populated for every node and DD edge. Analysis is
//! intraprocedural; pointers are tracked only through direct assignment
//! chains.

use std::collections::{BTreeMap, BTreeSet};

use crate::cpg::consts::{array_len_bytes, eval_const, ConstValue};
use crate::cpg::graph::*;
use crate::frontend::ast::*;
use crate::frontend::lexer::Span;

pub const WRITE_APIS: &[&str] = &["memcpy", "strncpy", "strcpy", "wcsncpy", "memset", "wmemset"];
pub const READ_APIS: &[&str] = &["fgets", "getch", "gets", "getchar", "fgetc"];
pub const ALLOC_APIS: &[&str] = &["malloc", "calloc", "alloca"];
pub const WCHAR_SIZE: i128 = 4;

pub fn is_write_api(name: &str) -> bool {
    WRITE_APIS.contains(&name)
}

pub fn is_read_api(name: &str) -> bool {
    READ_APIS.contains(&name)
}

pub fn is_alloc_api(name: &str) -> bool {
    ALLOC_APIS.contains(&name)
}

/// Build the abridged CPG for one function of a parsed translation unit.
pub fn build_cpg(source: &str, function: &FunctionDef) -> PropertyGraph {
    let mut b = Builder {
        g: PropertyGraph::new(&function.name),
        src: source,
        ret_nodes: Vec::new(),
    };
    let entry = b.g.add_node(NodeKind::Entry);
    b.g.entry = entry;
    b.g.nodes[entry.0 as usize].line = function.span.start.line;
    b.g.nodes[entry.0 as usize].defs = function.params.iter().map(|p| p.name.clone()).collect();

    let frontier = b.lower_block(&function.body, vec![entry]);

    let exit = b.g.add_node(NodeKind::Exit);
    b.g.exit = exit;
    b.g.nodes[exit.0 as usize].line = function.span.end.line;
    for p in frontier {
        b.g.add_cfg_edge(p, exit);
    }
    for r in b.ret_nodes.clone() {
        b.g.add_cfg_edge(r, exit);
    }

    let mut g = b.g;
    add_dd_edges(&mut g);
    add_dominance_edges(&mut g);
    add_def_use_edges(&mut g);
    populate_properties(&mut g);
    g
}

struct Builder<'a> {
    g: PropertyGraph,
    src: &'a str,
    ret_nodes: Vec<NodeId>,
}

impl<'a> Builder<'a> {
    fn slice(&self, span: Span) -> String {
        self.src.get(span.byte_range()).unwrap_or("").to_string()
    }

    fn connect(&mut self, preds: &[NodeId], to: NodeId) {
        for p in preds {
            self.g.add_cfg_edge(*p, to);
        }
    }

    fn lower_block(&mut self, block: &Block, mut preds: Vec<NodeId>) -> Vec<NodeId> {
        for stmt in &block.stmts {
            preds = self.lower_stmt(stmt, preds);
        }
        preds
    }

    fn lower_stmt(&mut self, stmt: &Stmt, preds: Vec<NodeId>) -> Vec<NodeId> {
        match &stmt.kind {
            StmtKind::Empty => preds,
            StmtKind::Block(b) => self.lower_block(b, preds),
            StmtKind::Decl(d) => {
                let id = self.decl_node(d, stmt.span);
                self.connect(&preds, id);
                vec![id]
            }
            StmtKind::Expr(e) => {
                let id = self.expr_node(e, stmt.span);
                self.connect(&preds, id);
                vec![id]
            }
            StmtKind::Return(value) => {
                let id = self.g.add_node(NodeKind::Ret);
                self.fill_common(id, stmt.span);
                if let Some(v) = value {
                    let mut uses = Vec::new();
                    v.collect_idents(&mut uses);
                    self.g.nodes[id.0 as usize].uses = dedup(uses);
                    self.collect_index_accesses(v, false, id);
                }
                self.connect(&preds, id);
                self.ret_nodes.push(id);
                Vec::new()
            }
            StmtKind::If { cond, then_branch, else_branch } => {
                let c = self.cond_node(cond);
                self.connect(&preds, c);
                let mut frontier = self.lower_stmt(then_branch, vec![c]);
                match else_branch {
                    Some(e) => frontier.extend(self.lower_stmt(e, vec![c])),
                    None => frontier.push(c),
                }
                dedup(frontier)
            }
            StmtKind::While { cond, body } => {
                let c = self.cond_node(cond);
                self.connect(&preds, c);
                let back = self.lower_stmt(body, vec![c]);
                self.connect(&back, c);
                vec![c]
            }
            StmtKind::For { init, cond, step, body } => {
                let preds = match init {
                    Some(i) => self.lower_stmt(i, preds),
                    None => preds,
                };
                let c = match cond {
                    Some(cond) => self.cond_node(cond),
                    None => {
                        let id = self.g.add_node(NodeKind::Cond);
                        self.g.nodes[id.0 as usize].line = stmt.span.start.line;
                        self.g.nodes[id.0 as usize].code = "for(;;)".to_string();
                        id
                    }
                };
                self.connect(&preds, c);
                let body_f = self.lower_stmt(body, vec![c]);
                match step {
                    Some(s) => {
                        let sid = self.expr_node(s, s.span);
                        self.connect(&body_f, sid);
                        self.g.add_cfg_edge(sid, c);
                    }
                    None => self.connect(&body_f, c),
                }
                vec![c]
            }
        }
    }

    fn fill_common(&mut self, id: NodeId, span: Span) {
        let n = &mut self.g.nodes[id.0 as usize];
        n.line = span.start.line;
        n.span = Some(span);
        n.code = self.src.get(span.byte_range()).unwrap_or("").to_string();
    }

    fn cond_node(&mut self, cond: &Expr) -> NodeId {
        let id = self.g.add_node(NodeKind::Cond);
        self.fill_common(id, cond.span);
        let mut uses = Vec::new();
        cond.collect_idents(&mut uses);
        self.g.nodes[id.0 as usize].uses = dedup(uses);
        self.g.nodes[id.0 as usize].cond_expr = Some(cond.clone());
        self.collect_index_accesses(cond, false, id);
        id
    }

    fn decl_node(&mut self, decl: &Decl, span: Span) -> NodeId {
        let mut kind = NodeKind::Decl;
        let mut buffer = None;
        for d in &decl.declarators {
            if d.array_len.is_some() {
                kind = NodeKind::Ad;
                buffer = Some(BufferDef {
                    name: d.name.clone(),
                    len_bytes: array_len_bytes(decl, d),
                    elem_size: crate::cpg::consts::element_size(&decl.ty, d),
                    len_span: d.array_len.as_ref().map(|e| e.span),
                    alloc: None,
                    alloc_args_text: None,
                });
                break;
            }
            if let Some(init) = &d.init {
                if let Some((alloc, len, len_span, args_text, elem)) = self.alloc_of(init) {
                    kind = NodeKind::Af;
                    buffer = Some(BufferDef {
                        name: d.name.clone(),
                        len_bytes: len,
                        elem_size: elem,
                        len_span: Some(len_span),
                        alloc: Some(alloc),
                        alloc_args_text: Some(args_text),
                    });
                    break;
                }
            }
        }
        let id = self.g.add_node(kind);
        self.fill_common(id, span);
        let node = &mut self.g.nodes[id.0 as usize];
        node.defs = decl.declarators.iter().map(|d| d.name.clone()).collect();
        let mut uses = Vec::new();
        for d in &decl.declarators {
            if let Some(l) = &d.array_len {
                l.collect_idents(&mut uses);
            }
            if let Some(i) = &d.init {
                i.collect_idents(&mut uses);
            }
        }
        self.g.nodes[id.0 as usize].uses = dedup(uses);
        self.g.nodes[id.0 as usize].buffer = buffer;
        for d in &decl.declarators {
            if let Some(i) = &d.init {
                self.collect_index_accesses(i, false, id);
            }
        }
        id
    }

    /// Recognize `malloc/calloc/alloca` behind optional casts; returns the
    /// allocation kind, byte length, size-argument span, argument text, and
    /// element granularity for length rewrites.
    fn alloc_of(&self, expr: &Expr) -> Option<(AllocKind, ConstValue, Span, String, Option<i128>)> {
        match &expr.kind {
            ExprKind::Cast { operand, .. } => self.alloc_of(operand),
            ExprKind::Call { callee, args, .. } => {
                let kind = match callee.as_str() {
                    "malloc" => AllocKind::Malloc,
                    "calloc" => AllocKind::Calloc,
                    "alloca" => AllocKind::Alloca,
                    _ => return None,
                };
                match kind {
                    AllocKind::Calloc => {
                        if args.len() != 2 {
                            return None;
                        }
                        let count = eval_const(&args[0]);
                        let size = eval_const(&args[1]);
                        let len = count.map2(size, |a, b| a.checked_mul(b));
                        let span = Span { start: args[0].span.start, end: args[1].span.end };
                        Some((kind, len, args[0].span, self.slice(span), size.known()))
                    }
                    _ => {
                        let arg = args.first()?;
                        Some((kind, eval_const(arg), arg.span, self.slice(arg.span), Some(1)))
                    }
                }
            }
            _ => None,
        }
    }

    fn expr_node(&mut self, expr: &Expr, span: Span) -> NodeId {
        let (kind, call, buffer, copy_of, defs) = self.classify_expr(expr);
        let id = self.g.add_node(kind);
        self.fill_common(id, span);
        let mut uses = Vec::new();
        expr.collect_idents(&mut uses);
        // pre/post inc-dec both read and write their operand
        let node = &mut self.g.nodes[id.0 as usize];
        node.defs = defs;
        node.call = call;
        node.buffer = buffer;
        node.copy_of = copy_of;
        let extra: Vec<String> = node.defs.iter().filter(|d| is_incdec(expr, d)).cloned().collect();
        uses.extend(extra);
        self.g.nodes[id.0 as usize].uses = dedup(uses);
        self.collect_index_accesses(expr, true, id);
        id
    }

    fn classify_expr(
        &self,
        expr: &Expr,
    ) -> (NodeKind, Option<CallInfo>, Option<BufferDef>, Option<(String, String)>, Vec<String>) {
        match &expr.kind {
            ExprKind::Assign { lhs, rhs } => {
                let defs = match &lhs.kind {
                    ExprKind::Ident(n) => vec![n.clone()],
                    _ => Vec::new(),
                };
                if let Some(lhs_name) = lhs.as_ident() {
                    if let Some((alloc, len, len_span, args_text, elem)) = self.alloc_of(rhs) {
                        let buffer = BufferDef {
                            name: lhs_name.to_string(),
                            len_bytes: len,
                            elem_size: elem,
                            len_span: Some(len_span),
                            alloc: Some(alloc),
                            alloc_args_text: Some(args_text),
                        };
                        return (NodeKind::Af, None, Some(buffer), None, defs);
                    }
                    if let Some(rhs_name) = strip_casts(rhs).as_ident() {
                        return (
                            NodeKind::Assign,
                            None,
                            None,
                            Some((lhs_name.to_string(), rhs_name.to_string())),
                            defs,
                        );
                    }
                }
                (NodeKind::Assign, None, None, None, defs)
            }
            ExprKind::Call { callee, callee_span, args } => {
                if callee == "free" {
                    let mut info = self.call_info(callee, *callee_span, args);
                    info.arg_dest = args.first().and_then(base_ident);
                    return (NodeKind::Free, Some(info), None, None, Vec::new());
                }
                if is_write_api(callee) {
                    let info = self.call_info(callee, *callee_span, args);
                    return (NodeKind::Wf, Some(info), None, None, Vec::new());
                }
                if is_read_api(callee) {
                    let info = self.call_info(callee, *callee_span, args);
                    return (NodeKind::Rf, Some(info), None, None, Vec::new());
                }
                let info = self.call_info(callee, *callee_span, args);
                (NodeKind::Call, Some(info), None, None, Vec::new())
            }
            ExprKind::Un { op: UnOp::PostInc | UnOp::PostDec | UnOp::PreInc | UnOp::PreDec, operand } => {
                let defs = operand.as_ident().map(|n| vec![n.to_string()]).unwrap_or_default();
                (NodeKind::Assign, None, None, None, defs)
            }
            _ => (NodeKind::Assign, None, None, None, Vec::new()),
        }
    }

    fn call_info(&self, callee: &str, callee_span: Span, args: &[Expr]) -> CallInfo {
        let summaries: Vec<ArgSummary> = args
            .iter()
            .map(|a| ArgSummary { text: self.slice(a.span), span: a.span, ident: base_ident(a) })
            .collect();
        let (dest_idx, src_idx, count_idx, unit): (Option<usize>, Option<usize>, Option<usize>, i128) =
            match callee {
                "memcpy" | "strncpy" => (Some(0), Some(1), Some(2), 1),
                "wcsncpy" => (Some(0), Some(1), Some(2), WCHAR_SIZE),
                "strcpy" => (Some(0), Some(1), None, 1),
                "memset" => (Some(0), None, Some(2), 1),
                "wmemset" => (Some(0), None, Some(2), WCHAR_SIZE),
                "fgets" => (Some(0), None, Some(1), 1),
                "gets" => (Some(0), None, None, 1),
                _ => (None, None, None, 1),
            };
        let count_bytes = count_idx
            .and_then(|i| args.get(i))
            .map(|e| eval_const(e).map2(ConstValue::Known(unit), |c, u| c.checked_mul(u)))
            .unwrap_or(ConstValue::Unknown);
        CallInfo {
            callee: callee.to_string(),
            callee_span,
            arg_dest: dest_idx.and_then(|i| summaries.get(i)).and_then(|s| s.ident.clone()),
            arg_src: src_idx.and_then(|i| summaries.get(i)).and_then(|s| s.ident.clone()),
            args: summaries,
            count_bytes,
            count_arg: count_idx,
            count_unit: unit,
        }
    }

    fn collect_index_accesses(&mut self, expr: &Expr, stmt_level: bool, node: NodeId) {
        fn walk(e: &Expr, write: bool, out: &mut Vec<IndexAccess>) {
            match &e.kind {
                ExprKind::Index { base, index } => {
                    if let Some(b) = strip_casts(base).as_ident() {
                        out.push(IndexAccess {
                            buffer: b.to_string(),
                            index_var: strip_casts(index).as_ident().map(str::to_string),
                            index_const: eval_const(index).known(),
                            is_write: write,
                        });
                    }
                    walk(index, false, out);
                }
                ExprKind::Assign { lhs, rhs } => {
                    walk(lhs, true, out);
                    walk(rhs, false, out);
                }
                ExprKind::Bin { lhs, rhs, .. } => {
                    walk(lhs, false, out);
                    walk(rhs, false, out);
                }
                ExprKind::Un { operand, .. } | ExprKind::Cast { operand, .. } => {
                    walk(operand, false, out)
                }
                ExprKind::Call { args, .. } => args.iter().for_each(|a| walk(a, false, out)),
                ExprKind::SizeofExpr(inner) => walk(inner, false, out),
                _ => {}
            }
        }
        let _ = stmt_level;
        let mut found = Vec::new();
        walk(expr, false, &mut found);
        self.g.nodes[node.0 as usize].index_accesses.extend(found);
    }
}

fn is_incdec(expr: &Expr, _var: &str) -> bool {
    matches!(
        expr.kind,
        ExprKind::Un { op: UnOp::PostInc | UnOp::PostDec | UnOp::PreInc | UnOp::PreDec, .. }
    )
}

pub fn strip_casts(e: &Expr) -> &Expr {
    match &e.kind {
        ExprKind::Cast { operand, .. } => strip_casts(operand),
        _ => e,
    }
}

/// Base identifier of an argument expression through casts, address-of,
/// dereference, and indexing.
pub fn base_ident(e: &Expr) -> Option<String> {
    match &e.kind {
        ExprKind::Ident(n) => Some(n.clone()),
        ExprKind::Cast { operand, .. } => base_ident(operand),
        ExprKind::Un { op: UnOp::AddrOf | UnOp::Deref, operand } => base_ident(operand),
        ExprKind::Index { base, .. } => base_ident(base),
        _ => None,
    }
}

fn dedup<T: Ord + Clone>(mut v: Vec<T>) -> Vec<T> {
    let mut seen = BTreeSet::new();
    v.retain(|x| seen.insert(x.clone()));
    v
}

// ---- data dependence ----

fn add_dd_edges(g: &mut PropertyGraph) {
    let reach = reaching_definitions(g);
    let mut new_edges = Vec::new();
    for v in &g.nodes {
        if v.kind == NodeKind::Var {
            continue;
        }
        for var in &v.uses {
            for def_idx in reach.inset[v.id.0 as usize].iter() {
                let (u, ref x) = reach.defs[*def_idx];
                if x == var && u != v.id {
                    new_edges.push((u, v.id, var.clone()));
                }
            }
        }
    }
    new_edges.sort();
    new_edges.dedup();
    for (u, v, var) in new_edges {
        let e = g.add_edge(u, v, EdgeKind::Dd);
        g.mu_set(Target::Edge(e), PropertyKey::Var, Value::Text(var)).expect("edge exists");
    }
}

pub struct ReachingDefs {
    /// all (node, var) definitions in the function
    pub defs: Vec<(NodeId, String)>,
    /// definition indices reaching each node's entry
    pub inset: Vec<BTreeSet<usize>>,
}

/// Worklist reaching-definitions over the statement CFG.
pub fn reaching_definitions(g: &PropertyGraph) -> ReachingDefs {
    let n = g.nodes.len();
    let mut defs: Vec<(NodeId, String)> = Vec::new();
    let mut gen: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for node in &g.nodes {
        for var in &node.defs {
            let idx = defs.len();
            defs.push((node.id, var.clone()));
            gen[node.id.0 as usize].insert(idx);
        }
    }
    let kill = |node: usize, set: &BTreeSet<usize>| -> BTreeSet<usize> {
        let own_vars: BTreeSet<&String> = gen[node].iter().map(|i| &defs[*i].1).collect();
        set.iter()
            .filter(|i| defs[**i].0 .0 as usize == node || !own_vars.contains(&defs[**i].1))
            .copied()
            .collect()
    };
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (u, succs) in g.cfg_succ.iter().enumerate() {
        for s in succs {
            preds[s.0 as usize].push(u);
        }
    }
    let mut inset: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut outset: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut changed = true;
    while changed {
        changed = false;
        for v in 0..n {
            let mut newin = BTreeSet::new();
            for p in &preds[v] {
                newin.extend(outset[*p].iter().copied());
            }
            let mut newout = kill(v, &newin);
            newout.extend(gen[v].iter().copied());
            if newin != inset[v] || newout != outset[v] {
                inset[v] = newin;
                outset[v] = newout;
                changed = true;
            }
        }
    }
    ReachingDefs { defs, inset }
}

// ---- post-dominance and control dependence ----

/// Iterative post-dominator sets over the reverse CFG.
pub fn postdominator_sets(g: &PropertyGraph) -> Vec<BTreeSet<u32>> {
    let n = g.nodes.len();
    let real: Vec<usize> =
        (0..n).filter(|i| g.nodes[*i].kind != NodeKind::Var).collect();
    let all: BTreeSet<u32> = real.iter().map(|i| *i as u32).collect();
    let exit = g.exit.0 as usize;
    let mut pdom: Vec<BTreeSet<u32>> = vec![all.clone(); n];
    pdom[exit] = [exit as u32].into_iter().collect();
    let mut changed = true;
    while changed {
        changed = false;
        for &v in real.iter().rev() {
            if v == exit {
                continue;
            }
            let succs = &g.cfg_succ[v];
            let mut meet: Option<BTreeSet<u32>> = None;
            for s in succs {
                let set = &pdom[s.0 as usize];
                meet = Some(match meet {
                    None => set.clone(),
                    Some(m) => m.intersection(set).copied().collect(),
                });
            }
            let mut new = meet.unwrap_or_else(|| all.clone());
            new.insert(v as u32);
            if new != pdom[v] {
                pdom[v] = new;
                changed = true;
            }
        }
    }
    pdom
}

/// Immediate post-dominator per node, from the set representation.
pub fn immediate_postdominators(g: &PropertyGraph, pdom: &[BTreeSet<u32>]) -> Vec<Option<u32>> {
    let n = g.nodes.len();
    let mut ipdom = vec![None; n];
    for v in 0..n {
        if g.nodes[v].kind == NodeKind::Var || v == g.exit.0 as usize {
            continue;
        }
        let strict: BTreeSet<u32> = pdom[v].iter().copied().filter(|x| *x != v as u32).collect();
        // the immediate post-dominator's own set equals the strict set
        for &c in &strict {
            if pdom[c as usize] == strict {
                ipdom[v] = Some(c);
                break;
            }
        }
    }
    ipdom
}

fn add_dominance_edges(g: &mut PropertyGraph) {
    let pdom = postdominator_sets(g);
    let ipdom = immediate_postdominators(g, &pdom);
    for (v, ip) in ipdom.iter().enumerate() {
        if let Some(ip) = ip {
            g.add_edge(NodeId(v as u32), NodeId(*ip), EdgeKind::Pd);
        }
    }
    // Ferrante-Ottenstein-Warren from the set representation: v is control
    // dependent on branch u iff some successor of u is post-dominated by v
    // while u itself is not strictly post-dominated by v.
    let n = g.nodes.len();
    let mut cd = Vec::new();
    for u in 0..n {
        if g.cfg_succ[u].len() < 2 {
            continue;
        }
        for v in 0..n {
            if g.nodes[v].kind == NodeKind::Var {
                continue;
            }
            let strictly_pdoms_u = v != u && pdom[u].contains(&(v as u32));
            if strictly_pdoms_u {
                continue;
            }
            if g.cfg_succ[u].iter().any(|w| pdom[w.0 as usize].contains(&(v as u32))) {
                cd.push((u as u32, v as u32));
            }
        }
    }
    for (u, v) in cd {
        g.add_edge(NodeId(u), NodeId(v), EdgeKind::Cd);
    }
}

fn add_def_use_edges(g: &mut PropertyGraph) {
    let mut var_nodes: BTreeMap<String, NodeId> = BTreeMap::new();
    let stmt_count = g.nodes.len();
    let mut pending = Vec::new();
    for v in 0..stmt_count {
        let node = &g.nodes[v];
        for d in node.defs.clone() {
            pending.push((NodeId(v as u32), d, EdgeKind::Def));
        }
        for u in node.uses.clone() {
            pending.push((NodeId(v as u32), u, EdgeKind::Use));
        }
    }
    for (stmt, var, kind) in pending {
        let vid = *var_nodes.entry(var.clone()).or_insert_with(|| {
            let id = g.add_node(NodeKind::Var);
            g.nodes[id.0 as usize].code = var.clone();
            id
        });
        g.add_edge(stmt, vid, kind);
    }
}

fn populate_properties(g: &mut PropertyGraph) {
    for i in 0..g.nodes.len() {
        let id = Target::Node(NodeId(i as u32));
        let node = g.nodes[i].clone();
        g.mu_set(id, PropertyKey::Type, Value::Text(node.kind.to_string())).unwrap();
        g.mu_set(id, PropertyKey::Line, Value::Int(node.line as i128)).unwrap();
        g.mu_set(id, PropertyKey::Code, Value::Text(node.code.clone())).unwrap();
        if let Some(call) = &node.call {
            g.mu_set(id, PropertyKey::Callee, Value::Text(call.callee.clone())).unwrap();
            let class = if is_write_api(&call.callee) {
                "write"
            } else if is_read_api(&call.callee) {
                "read"
            } else if call.callee == "free" {
                "free"
            } else if is_alloc_api(&call.callee) {
                "alloc"
            } else {
                "other"
            };
            g.mu_set(id, PropertyKey::ApiClass, Value::Text(class.to_string())).unwrap();
            if let Some(d) = &call.arg_dest {
                g.mu_set(id, PropertyKey::ArgDest, Value::Text(d.clone())).unwrap();
            }
            if let Some(s) = &call.arg_src {
                g.mu_set(id, PropertyKey::ArgSrc, Value::Text(s.clone())).unwrap();
            }
            if call.count_arg.is_some() {
                g.mu_set(id, PropertyKey::ArgCount, Value::from_const(call.count_bytes)).unwrap();
                g.mu_set(id, PropertyKey::ArgIndex, Value::Int(call.count_arg.unwrap() as i128))
                    .unwrap();
            }
            if node.kind == NodeKind::Free {
                if let Some(d) = &call.arg_dest {
                    g.mu_set(id, PropertyKey::Var, Value::Text(d.clone())).unwrap();
                }
            }
        }
        if let Some(buf) = &node.buffer {
            g.mu_set(id, PropertyKey::Len, Value::from_const(buf.len_bytes)).unwrap();
            g.mu_set(id, PropertyKey::Var, Value::Text(buf.name.clone())).unwrap();
        }
        if node.kind == NodeKind::Var {
            g.mu_set(id, PropertyKey::Var, Value::Text(node.code.clone())).unwrap();
        }
    }
}

/// Resolve the defining AD/AF node of `var` as seen from `use_node`,
/// following incoming DD edges and direct pointer-copy chains.
pub fn resolve_buffer_def(g: &PropertyGraph, use_node: NodeId, var: &str) -> Option<NodeId> {
    let mut seen = BTreeSet::new();
    let mut queue = vec![(use_node, var.to_string())];
    while let Some((at, v)) = queue.pop() {
        if !seen.insert((at, v.clone())) {
            continue;
        }
        for e in g.incoming_dd(at, &v) {
            let u = g.node(e.src);
            match u.kind {
                NodeKind::Ad | NodeKind::Af => {
                    if u.buffer.as_ref().map(|b| b.name == v).unwrap_or(false) {
                        return Some(u.id);
                    }
                }
                NodeKind::Assign => {
                    if let Some((lhs, rhs)) = &u.copy_of {
                        if lhs == &v {
                            queue.push((u.id, rhs.clone()));
                        }
                    }
                }
                _ => {}
            }
        }
    }
    None
}
