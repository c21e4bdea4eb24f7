//! The abridged code property graph: typed nodes, the five exposed edge
//! kinds (DD, CD, PD, DEF, USE), and the property function over nodes and
//! edges. CFG successor links are kept alongside for path queries but are not
//! part of the exposed edge set.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cpg::consts::ConstValue;
use crate::error::CpgError;
use crate::frontend::ast::Expr;
use crate::frontend::lexer::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

/// Node classification. `Var` nodes exist only as DEF/USE edge targets; one
/// is created per (function, variable).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Entry,
    Exit,
    /// buffer write function call (memcpy, strncpy, strcpy, wcsncpy, memset, wmemset)
    Wf,
    /// sensitive read function call (fgets, getch, gets, getchar, fgetc)
    Rf,
    /// buffer copy call outside the write list; unused by the current API lists
    Cf,
    /// allocation (malloc, calloc, alloca)
    Af,
    /// fixed-size array declaration
    Ad,
    Free,
    Cond,
    Assign,
    Decl,
    Call,
    Ret,
    Var,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NodeKind::Entry => "ENTRY",
            NodeKind::Exit => "EXIT",
            NodeKind::Wf => "WF",
            NodeKind::Rf => "RF",
            NodeKind::Cf => "CF",
            NodeKind::Af => "AF",
            NodeKind::Ad => "AD",
            NodeKind::Free => "FREE",
            NodeKind::Cond => "COND",
            NodeKind::Assign => "ASSIGN",
            NodeKind::Decl => "DECL",
            NodeKind::Call => "CALL",
            NodeKind::Ret => "RET",
            NodeKind::Var => "VAR",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    Dd,
    Cd,
    Pd,
    Def,
    Use,
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EdgeKind::Dd => "DD",
            EdgeKind::Cd => "CD",
            EdgeKind::Pd => "PD",
            EdgeKind::Def => "DEF",
            EdgeKind::Use => "USE",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PropertyKey {
    Type,
    Line,
    Code,
    Var,
    Len,
    ArgDest,
    ArgSrc,
    ArgCount,
    ArgIndex,
    Callee,
    ApiClass,
}

impl fmt::Display for PropertyKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PropertyKey::Type => "type",
            PropertyKey::Line => "line",
            PropertyKey::Code => "code",
            PropertyKey::Var => "var",
            PropertyKey::Len => "len",
            PropertyKey::ArgDest => "arg_dest",
            PropertyKey::ArgSrc => "arg_src",
            PropertyKey::ArgCount => "arg_count",
            PropertyKey::ArgIndex => "arg_index",
            PropertyKey::Callee => "callee",
            PropertyKey::ApiClass => "api_class",
        };
        f.write_str(s)
    }
}

/// Property values; `Unknown` is the byte-count sentinel.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Value {
    Text(String),
    Int(i128),
    Unknown,
}

impl Value {
    pub fn from_const(c: ConstValue) -> Value {
        match c {
            ConstValue::Known(v) => Value::Int(v),
            ConstValue::Unknown => Value::Unknown,
        }
    }

    pub fn as_const(&self) -> ConstValue {
        match self {
            Value::Int(v) => ConstValue::Known(*v),
            _ => ConstValue::Unknown,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Target {
    Node(NodeId),
    Edge(EdgeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AllocKind {
    Malloc,
    Calloc,
    Alloca,
}

/// Declared or allocated buffer facts attached to an AD/AF node.
#[derive(Debug, Clone, PartialEq)]
pub struct BufferDef {
    pub name: String,
    pub len_bytes: ConstValue,
    /// element byte size for AD nodes (1 for AF byte allocations)
    pub elem_size: Option<i128>,
    /// span of the array-length expression or the allocation size argument
    pub len_span: Option<Span>,
    pub alloc: Option<AllocKind>,
    /// source text of the allocation size argument(s), for reinsertion
    pub alloc_args_text: Option<String>,
}

/// One summarized call argument.
#[derive(Debug, Clone, PartialEq)]
pub struct ArgSummary {
    pub text: String,
    pub span: Span,
    /// base identifier when the argument is a (possibly cast/indexed) variable
    pub ident: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CallInfo {
    pub callee: String,
    pub callee_span: Span,
    pub args: Vec<ArgSummary>,
    pub arg_dest: Option<String>,
    pub arg_src: Option<String>,
    /// count in bytes (count units already scaled)
    pub count_bytes: ConstValue,
    /// index of the count argument and bytes per source count unit
    pub count_arg: Option<usize>,
    pub count_unit: i128,
}

/// An array element access `b[idx]` inside a statement.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexAccess {
    pub buffer: String,
    pub index_var: Option<String>,
    pub index_const: Option<i128>,
    pub is_write: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub line: u32,
    pub span: Option<Span>,
    pub code: String,
    pub defs: Vec<String>,
    pub uses: Vec<String>,
    pub call: Option<CallInfo>,
    pub buffer: Option<BufferDef>,
    /// pointer copy `lhs = rhs` for alias chains
    pub copy_of: Option<(String, String)>,
    pub index_accesses: Vec<IndexAccess>,
    pub cond_expr: Option<Expr>,
}

impl Node {
    pub fn new(id: NodeId, kind: NodeKind) -> Self {
        Node {
            id,
            kind,
            line: 0,
            span: None,
            code: String::new(),
            defs: Vec::new(),
            uses: Vec::new(),
            call: None,
            buffer: None,
            copy_of: None,
            index_accesses: Vec::new(),
            cond_expr: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub src: NodeId,
    pub dst: NodeId,
    pub kind: EdgeKind,
}

/// The abridged CPG for one function.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyGraph {
    pub function: String,
    pub entry: NodeId,
    pub exit: NodeId,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub cfg_succ: Vec<Vec<NodeId>>,
    properties: BTreeMap<(Target, PropertyKey), Value>,
}

impl PropertyGraph {
    pub fn new(function: &str) -> Self {
        PropertyGraph {
            function: function.to_string(),
            entry: NodeId(0),
            exit: NodeId(0),
            nodes: Vec::new(),
            edges: Vec::new(),
            cfg_succ: Vec::new(),
            properties: BTreeMap::new(),
        }
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0 as usize]
    }

    pub fn nodes_of_kind(&self, kind: NodeKind) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(move |n| n.kind == kind)
    }

    pub fn add_node(&mut self, kind: NodeKind) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node::new(id, kind));
        self.cfg_succ.push(Vec::new());
        id
    }

    pub fn add_edge(&mut self, src: NodeId, dst: NodeId, kind: EdgeKind) -> EdgeId {
        let id = EdgeId(self.edges.len() as u32);
        self.edges.push(Edge { id, src, dst, kind });
        id
    }

    pub fn add_cfg_edge(&mut self, src: NodeId, dst: NodeId) {
        let succ = &mut self.cfg_succ[src.0 as usize];
        if !succ.contains(&dst) {
            succ.push(dst);
        }
    }

    pub fn cfg_successors(&self, id: NodeId) -> &[NodeId] {
        &self.cfg_succ[id.0 as usize]
    }

    fn target_exists(&self, target: Target) -> bool {
        match target {
            Target::Node(n) => (n.0 as usize) < self.nodes.len(),
            Target::Edge(e) => (e.0 as usize) < self.edges.len(),
        }
    }

    /// μ retrieval; `Ok(None)` is ABSENT.
    pub fn mu_get(&self, target: Target, key: PropertyKey) -> Result<Option<&Value>, CpgError> {
        if !self.target_exists(target) {
            return Err(CpgError::UnknownTarget(format!("{:?}", target)));
        }
        Ok(self.properties.get(&(target, key)))
    }

    pub fn mu_set(&mut self, target: Target, key: PropertyKey, value: Value) -> Result<(), CpgError> {
        if !self.target_exists(target) {
            return Err(CpgError::UnknownTarget(format!("{:?}", target)));
        }
        self.properties.insert((target, key), value);
        Ok(())
    }

    pub fn properties(&self) -> &BTreeMap<(Target, PropertyKey), Value> {
        &self.properties
    }

    /// Incoming DD edges of `v` restricted to a variable name.
    pub fn incoming_dd(&self, v: NodeId, var: &str) -> Vec<&Edge> {
        self.edges
            .iter()
            .filter(|e| {
                e.kind == EdgeKind::Dd
                    && e.dst == v
                    && matches!(
                        self.properties.get(&(Target::Edge(e.id), PropertyKey::Var)),
                        Some(Value::Text(x)) if x == var
                    )
            })
            .collect()
    }

    /// Branch nodes `v` transitively control-depends on.
    pub fn cd_ancestors(&self, v: NodeId) -> Vec<NodeId> {
        let mut seen = std::collections::BTreeSet::new();
        let mut stack = vec![v];
        while let Some(cur) = stack.pop() {
            for e in self.edges.iter().filter(|e| e.kind == EdgeKind::Cd && e.dst == cur) {
                if seen.insert(e.src) {
                    stack.push(e.src);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Deep copy; mutations on the clone never touch the original.
    pub fn clone_graph(&self) -> PropertyGraph {
        self.clone()
    }
}
