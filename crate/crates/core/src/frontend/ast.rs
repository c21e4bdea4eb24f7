//! AST for the supported C subset. Every node carries a span into the
//! original text and a node id that is unique within the translation unit.

use serde::{Deserialize, Serialize};

use super::lexer::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AstId(pub u32);

/// Scalar base types with a fixed LP64 sizeof model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseType {
    Void,
    Char,
    Short,
    Int,
    Long,
    LongLong,
    Float,
    Double,
    WChar,
    SizeT,
    /// typedef pass-through; sizeof is unknown unless the alias resolves.
    Named,
}

impl BaseType {
    /// Byte size under the LP64 model: char=1, short=2, int=4, long=8,
    /// wchar_t=4, pointer=8.
    pub fn size_bytes(self) -> Option<i128> {
        match self {
            BaseType::Char => Some(1),
            BaseType::Short => Some(2),
            BaseType::Int => Some(4),
            BaseType::Long | BaseType::LongLong => Some(8),
            BaseType::Float => Some(4),
            BaseType::Double => Some(8),
            BaseType::WChar => Some(4),
            BaseType::SizeT => Some(8),
            BaseType::Void | BaseType::Named => None,
        }
    }
}

pub const POINTER_SIZE: i128 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeName {
    pub base: BaseType,
    /// Original spelling, e.g. "unsigned int" or a typedef name.
    pub spelling: String,
    pub ptr_depth: u8,
}

impl TypeName {
    pub fn is_pointer(&self) -> bool {
        self.ptr_depth > 0
    }

    pub fn size_bytes(&self) -> Option<i128> {
        if self.ptr_depth > 0 {
            Some(POINTER_SIZE)
        } else {
            self.base.size_bytes()
        }
    }

    pub fn is_void(&self) -> bool {
        self.base == BaseType::Void && self.ptr_depth == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnOp {
    Neg,
    Not,
    Deref,
    AddrOf,
    PreInc,
    PreDec,
    PostInc,
    PostDec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub id: AstId,
    pub span: Span,
    pub kind: ExprKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Int { value: i128, text: String },
    CharLit { value: i128, text: String },
    Str(String),
    WideStr(String),
    Ident(String),
    Call { callee: String, callee_span: Span, args: Vec<Expr> },
    Bin { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Un { op: UnOp, operand: Box<Expr> },
    Index { base: Box<Expr>, index: Box<Expr> },
    SizeofType(TypeName),
    SizeofExpr(Box<Expr>),
    Assign { lhs: Box<Expr>, rhs: Box<Expr> },
    Cast { ty: TypeName, operand: Box<Expr> },
}

impl Expr {
    pub fn as_ident(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Ident(n) => Some(n),
            _ => None,
        }
    }

    /// All identifier names read inside the expression (assignment LHS
    /// identifiers excluded, array-write bases excluded by the caller).
    pub fn collect_idents(&self, out: &mut Vec<String>) {
        match &self.kind {
            ExprKind::Ident(n) => out.push(n.clone()),
            ExprKind::Call { args, .. } => {
                for a in args {
                    a.collect_idents(out);
                }
            }
            ExprKind::Bin { lhs, rhs, .. } => {
                lhs.collect_idents(out);
                rhs.collect_idents(out);
            }
            ExprKind::Un { operand, .. } | ExprKind::Cast { operand, .. } => {
                operand.collect_idents(out)
            }
            ExprKind::Index { base, index } => {
                base.collect_idents(out);
                index.collect_idents(out);
            }
            ExprKind::SizeofExpr(e) => e.collect_idents(out),
            ExprKind::Assign { lhs, rhs } => {
                // reads on the LHS only through indices/derefs
                if let ExprKind::Index { base, index } = &lhs.kind {
                    base.collect_idents(out);
                    index.collect_idents(out);
                }
                rhs.collect_idents(out);
            }
            _ => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Declarator {
    pub name: String,
    pub name_span: Span,
    /// `Some(len)` for a fixed-size array declarator `name[len]`.
    pub array_len: Option<Expr>,
    pub init: Option<Expr>,
    pub extra_ptr: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decl {
    pub ty: TypeName,
    pub declarators: Vec<Declarator>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub id: AstId,
    pub span: Span,
    pub kind: StmtKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Decl(Decl),
    Expr(Expr),
    If { cond: Expr, then_branch: Box<Stmt>, else_branch: Option<Box<Stmt>> },
    While { cond: Expr, body: Box<Stmt> },
    For {
        init: Option<Box<Stmt>>,
        cond: Option<Expr>,
        step: Option<Expr>,
        body: Box<Stmt>,
    },
    Return(Option<Expr>),
    Block(Block),
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub ty: TypeName,
    pub name: String,
    pub name_span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDef {
    pub id: AstId,
    pub name: String,
    pub name_span: Span,
    pub ret: TypeName,
    pub params: Vec<Param>,
    pub body: Block,
    pub span: Span,
}

/// A parsed translation unit: function definitions plus file-scope
/// declarations and recorded prototypes/typedef names.
#[derive(Debug, Clone, PartialEq)]
pub struct Ast {
    pub functions: Vec<FunctionDef>,
    pub globals: Vec<Stmt>,
    pub prototypes: Vec<String>,
    pub typedefs: Vec<String>,
}
