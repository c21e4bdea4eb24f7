//! Compile-time constant evaluation under the fixed LP64 sizeof model.
//! Anything outside the foldable forms is `Unknown`, and arithmetic on
//! `Unknown` stays `Unknown` so rules abstain instead of guessing.

use serde::{Deserialize, Serialize};

use crate::frontend::ast::{BinOp, Decl, Declarator, Expr, ExprKind, TypeName, UnOp, POINTER_SIZE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConstValue {
    Known(i128),
    Unknown,
}

impl ConstValue {
    pub fn known(self) -> Option<i128> {
        match self {
            ConstValue::Known(v) => Some(v),
            ConstValue::Unknown => None,
        }
    }

    pub fn map2(self, other: ConstValue, f: impl Fn(i128, i128) -> Option<i128>) -> ConstValue {
        match (self, other) {
            (ConstValue::Known(a), ConstValue::Known(b)) => {
                f(a, b).map(ConstValue::Known).unwrap_or(ConstValue::Unknown)
            }
            _ => ConstValue::Unknown,
        }
    }
}

impl std::fmt::Display for ConstValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConstValue::Known(v) => write!(f, "{}", v),
            ConstValue::Unknown => f.write_str("UNKNOWN"),
        }
    }
}

/// Fold an expression to a byte count where possible: integer and character
/// literals, + - * / %, unary minus, sizeof(T), casts, and #define
/// substitutions (already expanded by the lexer).
pub fn eval_const(expr: &Expr) -> ConstValue {
    match &expr.kind {
        ExprKind::Int { value, .. } => ConstValue::Known(*value),
        ExprKind::CharLit { value, .. } => ConstValue::Known(*value),
        ExprKind::SizeofType(ty) => sizeof_type(ty),
        ExprKind::Cast { operand, .. } => eval_const(operand),
        ExprKind::Un { op: UnOp::Neg, operand } => {
            eval_const(operand).map2(ConstValue::Known(0), |a, _| Some(-a))
        }
        ExprKind::Bin { op, lhs, rhs } => {
            let (a, b) = (eval_const(lhs), eval_const(rhs));
            match op {
                BinOp::Add => a.map2(b, |x, y| x.checked_add(y)),
                BinOp::Sub => a.map2(b, |x, y| x.checked_sub(y)),
                BinOp::Mul => a.map2(b, |x, y| x.checked_mul(y)),
                BinOp::Div => a.map2(b, |x, y| if y == 0 { None } else { Some(x / y) }),
                BinOp::Rem => a.map2(b, |x, y| if y == 0 { None } else { Some(x % y) }),
                _ => ConstValue::Unknown,
            }
        }
        _ => ConstValue::Unknown,
    }
}

pub fn sizeof_type(ty: &TypeName) -> ConstValue {
    if ty.ptr_depth > 0 {
        return ConstValue::Known(POINTER_SIZE);
    }
    ty.base.size_bytes().map(ConstValue::Known).unwrap_or(ConstValue::Unknown)
}

/// Element byte size of an array declarator.
pub fn element_size(decl_ty: &TypeName, declarator: &Declarator) -> Option<i128> {
    if declarator.extra_ptr > 0 || decl_ty.ptr_depth > 0 {
        return Some(POINTER_SIZE);
    }
    decl_ty.base.size_bytes()
}

/// Defined byte length of an array declarator: element count times element
/// size under the LP64 model.
pub fn array_len_bytes(decl: &Decl, declarator: &Declarator) -> ConstValue {
    let len_expr = match &declarator.array_len {
        Some(e) => e,
        None => return ConstValue::Unknown,
    };
    let count = eval_const(len_expr);
    let es = match element_size(&decl.ty, declarator) {
        Some(es) => es,
        None => return ConstValue::Unknown,
    };
    count.map2(ConstValue::Known(es), |c, es| c.checked_mul(es))
}
