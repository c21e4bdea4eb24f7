//! Recursive-descent parser for the supported C subset: declarations
//! (scalars, fixed-size arrays, pointers, typedef pass-through), assignments,
//! calls, if/else, for/while, return, compound blocks, sizeof, and the usual
//! comparison/arithmetic/logical operators. goto, switch, function pointers,
//! and conditional preprocessing are outside the subset and raise a
//! `SyntaxError`.

use std::collections::BTreeSet;

use super::ast::*;
use super::lexer::{prepare, LexOutput, Span, TokKind, Token};
use crate::error::SyntaxError;

const TYPE_KEYWORDS: &[&str] = &[
    "void", "char", "short", "int", "long", "float", "double", "signed", "unsigned", "wchar_t",
    "size_t", "const",
];

const STMT_KEYWORDS: &[&str] = &["if", "else", "while", "for", "return", "sizeof", "typedef"];

const UNSUPPORTED_KEYWORDS: &[&str] =
    &["goto", "switch", "case", "default", "do", "break", "continue", "struct", "union", "enum"];

pub fn is_keyword(name: &str) -> bool {
    TYPE_KEYWORDS.contains(&name) || STMT_KEYWORDS.contains(&name) || UNSUPPORTED_KEYWORDS.contains(&name)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    next_id: u32,
    typedefs: BTreeSet<String>,
}

pub fn parse(source: &str) -> Result<Ast, SyntaxError> {
    let lex = prepare(source)?;
    parse_prepared(lex)
}

pub fn parse_prepared(lex: LexOutput) -> Result<Ast, SyntaxError> {
    let mut p = Parser { tokens: lex.tokens, pos: 0, next_id: 0, typedefs: BTreeSet::new() };
    p.translation_unit()
}

impl Parser {
    fn id(&mut self) -> AstId {
        self.next_id += 1;
        AstId(self.next_id)
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, n: usize) -> Option<&Token> {
        self.tokens.get(self.pos + n)
    }

    fn cur_line(&self) -> u32 {
        self.peek().map(|t| t.line()).unwrap_or_else(|| {
            self.tokens.last().map(|t| t.span.end.line).unwrap_or(1)
        })
    }

    fn err(&self, msg: impl Into<String>) -> SyntaxError {
        SyntaxError::new(self.cur_line(), msg)
    }

    fn bump(&mut self) -> Result<Token, SyntaxError> {
        let t = self.tokens.get(self.pos).cloned().ok_or_else(|| self.err("unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, text: &str) -> Result<Token, SyntaxError> {
        let t = self.bump()?;
        if t.text != text {
            return Err(SyntaxError::new(t.line(), format!("expected '{}', found '{}'", text, t.text)));
        }
        Ok(t)
    }

    fn at(&self, text: &str) -> bool {
        self.peek().map(|t| t.text == text).unwrap_or(false)
    }

    fn check_supported(&self, t: &Token) -> Result<(), SyntaxError> {
        if t.kind == TokKind::Ident && UNSUPPORTED_KEYWORDS.contains(&t.text.as_str()) {
            return Err(SyntaxError::new(
                t.line(),
                format!("'{}' is outside the supported subset", t.text),
            ));
        }
        Ok(())
    }

    fn is_type_start(&self, n: usize) -> bool {
        match self.peek_at(n) {
            Some(t) if t.kind == TokKind::Ident => {
                TYPE_KEYWORDS.contains(&t.text.as_str()) || self.typedefs.contains(&t.text)
            }
            _ => false,
        }
    }

    fn translation_unit(&mut self) -> Result<Ast, SyntaxError> {
        let mut ast =
            Ast { functions: Vec::new(), globals: Vec::new(), prototypes: Vec::new(), typedefs: Vec::new() };
        while let Some(t) = self.peek() {
            self.check_supported(t)?;
            if self.at("typedef") {
                self.typedef_decl(&mut ast)?;
                continue;
            }
            if !self.is_type_start(0) {
                return Err(self.err(format!(
                    "expected declaration or function definition, found '{}'",
                    self.peek().map(|t| t.text.clone()).unwrap_or_default()
                )));
            }
            // lookahead: type, '*'*, name, then '(' means function
            let save = self.pos;
            let ty = self.type_name()?;
            let name_tok = self.bump()?;
            if name_tok.kind != TokKind::Ident || is_keyword(&name_tok.text) {
                return Err(SyntaxError::new(name_tok.line(), "expected declarator name"));
            }
            if self.at("(") {
                let f = self.function_rest(ty, name_tok, &mut ast)?;
                if let Some(f) = f {
                    ast.functions.push(f);
                }
            } else {
                self.pos = save;
                let stmt = self.declaration_stmt()?;
                ast.globals.push(stmt);
            }
        }
        Ok(ast)
    }

    fn typedef_decl(&mut self, ast: &mut Ast) -> Result<(), SyntaxError> {
        self.expect("typedef")?;
        let _ty = self.type_name()?;
        let name = self.bump()?;
        if name.kind != TokKind::Ident {
            return Err(SyntaxError::new(name.line(), "expected typedef name"));
        }
        self.expect(";")?;
        self.typedefs.insert(name.text.clone());
        ast.typedefs.push(name.text);
        Ok(())
    }

    fn type_name(&mut self) -> Result<TypeName, SyntaxError> {
        let mut words: Vec<String> = Vec::new();
        let first = self.peek().ok_or_else(|| self.err("expected type"))?.clone();
        if self.typedefs.contains(&first.text) {
            self.bump()?;
            let ptr_depth = self.ptr_depth();
            return Ok(TypeName { base: BaseType::Named, spelling: first.text, ptr_depth });
        }
        while let Some(t) = self.peek() {
            if t.kind == TokKind::Ident && TYPE_KEYWORDS.contains(&t.text.as_str()) {
                words.push(t.text.clone());
                self.bump()?;
            } else {
                break;
            }
        }
        if words.is_empty() {
            return Err(self.err("expected type"));
        }
        let significant: Vec<&str> =
            words.iter().map(|s| s.as_str()).filter(|w| *w != "const" && *w != "signed").collect();
        let base = match significant.as_slice() {
            ["void"] => BaseType::Void,
            ["char"] | ["unsigned", "char"] => BaseType::Char,
            ["short"] | ["short", "int"] | ["unsigned", "short"] | ["unsigned", "short", "int"] => {
                BaseType::Short
            }
            ["int"] | ["unsigned"] | ["unsigned", "int"] => BaseType::Int,
            ["long"] | ["long", "int"] | ["unsigned", "long"] | ["unsigned", "long", "int"] => {
                BaseType::Long
            }
            ["long", "long"] | ["unsigned", "long", "long"] => BaseType::LongLong,
            ["float"] => BaseType::Float,
            ["double"] | ["long", "double"] => BaseType::Double,
            ["wchar_t"] => BaseType::WChar,
            ["size_t"] => BaseType::SizeT,
            _ => return Err(self.err(format!("unsupported type '{}'", words.join(" ")))),
        };
        let ptr_depth = self.ptr_depth();
        Ok(TypeName { base, spelling: words.join(" "), ptr_depth })
    }

    fn ptr_depth(&mut self) -> u8 {
        let mut depth = 0;
        while self.at("*") {
            self.pos += 1;
            depth += 1;
        }
        depth
    }

    fn function_rest(
        &mut self,
        ret: TypeName,
        name: Token,
        ast: &mut Ast,
    ) -> Result<Option<FunctionDef>, SyntaxError> {
        self.expect("(")?;
        let mut params = Vec::new();
        if !self.at(")") {
            loop {
                if self.at("void") && self.peek_at(1).map(|t| t.text == ")").unwrap_or(false) {
                    self.bump()?;
                    break;
                }
                let ty = self.type_name()?;
                let pname = self.bump()?;
                if pname.kind != TokKind::Ident || is_keyword(&pname.text) {
                    return Err(SyntaxError::new(pname.line(), "expected parameter name"));
                }
                params.push(Param { ty, name: pname.text.clone(), name_span: pname.span });
                if self.at(",") {
                    self.bump()?;
                } else {
                    break;
                }
            }
        }
        self.expect(")")?;
        if self.at(";") {
            // prototype
            self.bump()?;
            ast.prototypes.push(name.text);
            return Ok(None);
        }
        let body = self.block()?;
        let span = Span { start: name.span.start, end: body.span.end };
        Ok(Some(FunctionDef {
            id: self.id(),
            name: name.text,
            name_span: name.span,
            ret,
            params,
            body,
            span,
        }))
    }

    fn block(&mut self) -> Result<Block, SyntaxError> {
        let open = self.expect("{")?;
        let mut stmts = Vec::new();
        while !self.at("}") {
            if self.peek().is_none() {
                return Err(self.err("unexpected end of input in block"));
            }
            stmts.push(self.statement()?);
        }
        let close = self.expect("}")?;
        Ok(Block { stmts, span: Span { start: open.span.start, end: close.span.end } })
    }

    fn statement(&mut self) -> Result<Stmt, SyntaxError> {
        let t = self.peek().ok_or_else(|| self.err("expected statement"))?.clone();
        self.check_supported(&t)?;
        match t.text.as_str() {
            "{" => {
                let b = self.block()?;
                let span = b.span;
                Ok(Stmt { id: self.id(), span, kind: StmtKind::Block(b) })
            }
            "if" => self.if_stmt(),
            "while" => self.while_stmt(),
            "for" => self.for_stmt(),
            "return" => self.return_stmt(),
            ";" => {
                let t = self.bump()?;
                Ok(Stmt { id: self.id(), span: t.span, kind: StmtKind::Empty })
            }
            _ if self.is_type_start(0) => self.declaration_stmt(),
            _ => {
                let start = t.span.start;
                let expr = self.expr()?;
                let semi = self.expect(";")?;
                Ok(Stmt {
                    id: self.id(),
                    span: Span { start, end: semi.span.end },
                    kind: StmtKind::Expr(expr),
                })
            }
        }
    }

    fn declaration_stmt(&mut self) -> Result<Stmt, SyntaxError> {
        let start = self.peek().unwrap().span.start;
        let ty = self.type_name()?;
        let mut declarators = Vec::new();
        loop {
            let extra_ptr = self.ptr_depth();
            let name = self.bump()?;
            if name.kind != TokKind::Ident || is_keyword(&name.text) {
                return Err(SyntaxError::new(name.line(), "expected declarator name"));
            }
            let mut array_len = None;
            if self.at("[") {
                self.bump()?;
                if self.at("]") {
                    return Err(self.err("unsized arrays are outside the supported subset"));
                }
                array_len = Some(self.expr()?);
                self.expect("]")?;
            }
            let mut init = None;
            if self.at("=") {
                self.bump()?;
                init = Some(self.assign_rhs()?);
            }
            declarators.push(Declarator {
                name: name.text,
                name_span: name.span,
                array_len,
                init,
                extra_ptr,
            });
            if self.at(",") {
                self.bump()?;
            } else {
                break;
            }
        }
        let semi = self.expect(";")?;
        Ok(Stmt {
            id: self.id(),
            span: Span { start, end: semi.span.end },
            kind: StmtKind::Decl(Decl { ty, declarators }),
        })
    }

    fn if_stmt(&mut self) -> Result<Stmt, SyntaxError> {
        let kw = self.expect("if")?;
        self.expect("(")?;
        let cond = self.expr()?;
        self.expect(")")?;
        let then_branch = Box::new(self.statement()?);
        let mut else_branch = None;
        let mut end = then_branch.span.end;
        if self.at("else") {
            self.bump()?;
            let e = Box::new(self.statement()?);
            end = e.span.end;
            else_branch = Some(e);
        }
        Ok(Stmt {
            id: self.id(),
            span: Span { start: kw.span.start, end },
            kind: StmtKind::If { cond, then_branch, else_branch },
        })
    }

    fn while_stmt(&mut self) -> Result<Stmt, SyntaxError> {
        let kw = self.expect("while")?;
        self.expect("(")?;
        let cond = self.expr()?;
        self.expect(")")?;
        let body = Box::new(self.statement()?);
        let end = body.span.end;
        Ok(Stmt {
            id: self.id(),
            span: Span { start: kw.span.start, end },
            kind: StmtKind::While { cond, body },
        })
    }

    fn for_stmt(&mut self) -> Result<Stmt, SyntaxError> {
        let kw = self.expect("for")?;
        self.expect("(")?;
        let init = if self.at(";") {
            self.bump()?;
            None
        } else if self.is_type_start(0) {
            Some(Box::new(self.declaration_stmt()?))
        } else {
            let start = self.peek().unwrap().span.start;
            let e = self.expr()?;
            let semi = self.expect(";")?;
            Some(Box::new(Stmt {
                id: self.id(),
                span: Span { start, end: semi.span.end },
                kind: StmtKind::Expr(e),
            }))
        };
        let cond = if self.at(";") { None } else { Some(self.expr()?) };
        self.expect(";")?;
        let step = if self.at(")") { None } else { Some(self.expr()?) };
        self.expect(")")?;
        let body = Box::new(self.statement()?);
        let end = body.span.end;
        Ok(Stmt {
            id: self.id(),
            span: Span { start: kw.span.start, end },
            kind: StmtKind::For { init, cond, step, body },
        })
    }

    fn return_stmt(&mut self) -> Result<Stmt, SyntaxError> {
        let kw = self.expect("return")?;
        let value = if self.at(";") { None } else { Some(self.expr()?) };
        let semi = self.expect(";")?;
        Ok(Stmt {
            id: self.id(),
            span: Span { start: kw.span.start, end: semi.span.end },
            kind: StmtKind::Return(value),
        })
    }

    // ---- expressions ----

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        self.assignment()
    }

    fn assign_rhs(&mut self) -> Result<Expr, SyntaxError> {
        self.assignment()
    }

    fn assignment(&mut self) -> Result<Expr, SyntaxError> {
        let lhs = self.logical_or()?;
        if self.at("=") {
            match lhs.kind {
                ExprKind::Ident(_) | ExprKind::Index { .. } | ExprKind::Un { op: UnOp::Deref, .. } => {}
                _ => return Err(self.err("invalid assignment target")),
            }
            self.bump()?;
            let rhs = self.assignment()?;
            let span = Span { start: lhs.span.start, end: rhs.span.end };
            return Ok(Expr {
                id: self.id(),
                span,
                kind: ExprKind::Assign { lhs: Box::new(lhs), rhs: Box::new(rhs) },
            });
        }
        Ok(lhs)
    }

    fn logical_or(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.logical_and()?;
        while self.at("||") {
            self.bump()?;
            let rhs = self.logical_and()?;
            lhs = self.mk_bin(BinOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn logical_and(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.equality()?;
        while self.at("&&") {
            self.bump()?;
            let rhs = self.equality()?;
            lhs = self.mk_bin(BinOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn equality(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.relational()?;
        loop {
            let op = if self.at("==") {
                BinOp::Eq
            } else if self.at("!=") {
                BinOp::Ne
            } else {
                break;
            };
            self.bump()?;
            let rhs = self.relational()?;
            lhs = self.mk_bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn relational(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.additive()?;
        loop {
            let op = if self.at("<") {
                BinOp::Lt
            } else if self.at("<=") {
                BinOp::Le
            } else if self.at(">") {
                BinOp::Gt
            } else if self.at(">=") {
                BinOp::Ge
            } else {
                break;
            };
            self.bump()?;
            let rhs = self.additive()?;
            lhs = self.mk_bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn additive(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = if self.at("+") {
                BinOp::Add
            } else if self.at("-") {
                BinOp::Sub
            } else {
                break;
            };
            self.bump()?;
            let rhs = self.multiplicative()?;
            lhs = self.mk_bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn multiplicative(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.at("*") {
                BinOp::Mul
            } else if self.at("/") {
                BinOp::Div
            } else if self.at("%") {
                BinOp::Rem
            } else {
                break;
            };
            self.bump()?;
            let rhs = self.unary()?;
            lhs = self.mk_bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn mk_bin(&mut self, op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        let span = Span { start: lhs.span.start, end: rhs.span.end };
        Expr { id: self.id(), span, kind: ExprKind::Bin { op, lhs: Box::new(lhs), rhs: Box::new(rhs) } }
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        let t = self.peek().ok_or_else(|| self.err("expected expression"))?.clone();
        let un = match t.text.as_str() {
            "-" => Some(UnOp::Neg),
            "!" => Some(UnOp::Not),
            "*" => Some(UnOp::Deref),
            "&" => Some(UnOp::AddrOf),
            "++" => Some(UnOp::PreInc),
            "--" => Some(UnOp::PreDec),
            "+" => {
                // unary plus: parse and drop
                self.bump()?;
                return self.unary();
            }
            _ => None,
        };
        if let Some(op) = un {
            self.bump()?;
            let operand = self.unary()?;
            let span = Span { start: t.span.start, end: operand.span.end };
            return Ok(Expr { id: self.id(), span, kind: ExprKind::Un { op, operand: Box::new(operand) } });
        }
        if t.text == "sizeof" {
            self.bump()?;
            if self.at("(") && self.is_type_start(1) {
                self.bump()?;
                let ty = self.type_name()?;
                let close = self.expect(")")?;
                let span = Span { start: t.span.start, end: close.span.end };
                return Ok(Expr { id: self.id(), span, kind: ExprKind::SizeofType(ty) });
            }
            let operand = self.unary()?;
            let span = Span { start: t.span.start, end: operand.span.end };
            return Ok(Expr { id: self.id(), span, kind: ExprKind::SizeofExpr(Box::new(operand)) });
        }
        if t.text == "(" && self.is_type_start(1) {
            // cast
            self.bump()?;
            let ty = self.type_name()?;
            self.expect(")")?;
            let operand = self.unary()?;
            let span = Span { start: t.span.start, end: operand.span.end };
            return Ok(Expr { id: self.id(), span, kind: ExprKind::Cast { ty, operand: Box::new(operand) } });
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, SyntaxError> {
        let mut e = self.primary()?;
        loop {
            if self.at("[") {
                self.bump()?;
                let index = self.expr()?;
                let close = self.expect("]")?;
                let span = Span { start: e.span.start, end: close.span.end };
                e = Expr {
                    id: self.id(),
                    span,
                    kind: ExprKind::Index { base: Box::new(e), index: Box::new(index) },
                };
            } else if self.at("++") || self.at("--") {
                let t = self.bump()?;
                let op = if t.text == "++" { UnOp::PostInc } else { UnOp::PostDec };
                let span = Span { start: e.span.start, end: t.span.end };
                e = Expr { id: self.id(), span, kind: ExprKind::Un { op, operand: Box::new(e) } };
            } else {
                break;
            }
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<Expr, SyntaxError> {
        let t = self.bump()?;
        self.check_supported(&t)?;
        match t.kind {
            TokKind::Int => {
                let value = parse_int_literal(&t.text)
                    .ok_or_else(|| SyntaxError::new(t.line(), format!("bad integer literal '{}'", t.text)))?;
                Ok(Expr { id: self.id(), span: t.span, kind: ExprKind::Int { value, text: t.text } })
            }
            TokKind::CharLit => {
                let value = char_literal_value(&t.text);
                Ok(Expr { id: self.id(), span: t.span, kind: ExprKind::CharLit { value, text: t.text } })
            }
            TokKind::Str => Ok(Expr { id: self.id(), span: t.span, kind: ExprKind::Str(t.text) }),
            TokKind::WideStr => Ok(Expr { id: self.id(), span: t.span, kind: ExprKind::WideStr(t.text) }),
            TokKind::Ident => {
                if is_keyword(&t.text) {
                    return Err(SyntaxError::new(t.line(), format!("unexpected keyword '{}'", t.text)));
                }
                if self.at("(") {
                    self.bump()?;
                    let mut args = Vec::new();
                    if !self.at(")") {
                        loop {
                            args.push(self.assignment()?);
                            if self.at(",") {
                                self.bump()?;
                            } else {
                                break;
                            }
                        }
                    }
                    let close = self.expect(")")?;
                    let span = Span { start: t.span.start, end: close.span.end };
                    return Ok(Expr {
                        id: self.id(),
                        span,
                        kind: ExprKind::Call { callee: t.text, callee_span: t.span, args },
                    });
                }
                Ok(Expr { id: self.id(), span: t.span, kind: ExprKind::Ident(t.text) })
            }
            TokKind::Punct => {
                if t.text == "(" {
                    let e = self.expr()?;
                    let close = self.expect(")")?;
                    // keep the inner expression, widen the span to the parens
                    let mut e = e;
                    e.span = Span { start: t.span.start, end: close.span.end };
                    return Ok(e);
                }
                Err(SyntaxError::new(t.line(), format!("unexpected token '{}'", t.text)))
            }
        }
    }
}

pub fn parse_int_literal(text: &str) -> Option<i128> {
    let t = text.trim_end_matches(|c| matches!(c, 'u' | 'U' | 'l' | 'L'));
    if let Some(hex) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        i128::from_str_radix(hex, 16).ok()
    } else {
        t.parse::<i128>().ok()
    }
}

fn char_literal_value(text: &str) -> i128 {
    let inner = text.trim_start_matches('L').trim_matches('\'');
    let mut chars = inner.chars();
    match chars.next() {
        Some('\\') => match chars.next() {
            Some('n') => 10,
            Some('t') => 9,
            Some('r') => 13,
            Some('0') => 0,
            Some('\\') => 92,
            Some('\'') => 39,
            Some(c) => c as i128,
            None => 0,
        },
        Some(c) => c as i128,
        None => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_program() {
        let ast = parse("int main(){ char d[10]; return 0; }").unwrap();
        assert_eq!(ast.functions.len(), 1);
        let f = &ast.functions[0];
        assert_eq!(f.name, "main");
        assert_eq!(f.body.stmts.len(), 2);
        match &f.body.stmts[0].kind {
            StmtKind::Decl(d) => {
                assert_eq!(d.ty.base, BaseType::Char);
                let len = d.declarators[0].array_len.as_ref().unwrap();
                assert!(matches!(len.kind, ExprKind::Int { value: 10, .. }));
            }
            other => panic!("expected decl, got {:?}", other),
        }
    }

    #[test]
    fn write_call_with_sizeof_count() {
        let src = "void f(){ char data[10]; memset(data, 'C', 10*sizeof(int)); }";
        let ast = parse(src).unwrap();
        let f = &ast.functions[0];
        match &f.body.stmts[1].kind {
            StmtKind::Expr(e) => match &e.kind {
                ExprKind::Call { callee, args, .. } => {
                    assert_eq!(callee, "memset");
                    assert_eq!(args.len(), 3);
                    assert!(matches!(args[2].kind, ExprKind::Bin { op: BinOp::Mul, .. }));
                }
                other => panic!("expected call, got {:?}", other),
            },
            other => panic!("expected expr stmt, got {:?}", other),
        }
    }

    #[test]
    fn goto_is_rejected() {
        let err = parse("int f(){ goto l; }").unwrap_err();
        assert!(err.message.contains("goto"));
    }

    #[test]
    fn switch_is_rejected() {
        assert!(parse("int f(int x){ switch(x){} return 0; }").is_err());
    }

    #[test]
    fn cast_and_malloc_init() {
        let ast = parse("void f(){ char *p = (char *)malloc(10); free(p); }").unwrap();
        let f = &ast.functions[0];
        match &f.body.stmts[0].kind {
            StmtKind::Decl(d) => {
                let init = d.declarators[0].init.as_ref().unwrap();
                match &init.kind {
                    ExprKind::Cast { operand, .. } => {
                        assert!(matches!(&operand.kind, ExprKind::Call { callee, .. } if callee == "malloc"));
                    }
                    other => panic!("expected cast, got {:?}", other),
                }
            }
            other => panic!("expected decl, got {:?}", other),
        }
    }

    #[test]
    fn for_loop_with_postinc() {
        let ast = parse("void f(){ char b[4]; for (int i = 0; i < 4; i++) { b[i] = 'x'; } }").unwrap();
        let f = &ast.functions[0];
        assert!(matches!(f.body.stmts[1].kind, StmtKind::For { .. }));
    }

    #[test]
    fn spans_nest_properly() {
        let src = "void f(){ if (x > 0) { y = x + 1; } }";
        let ast = parse(src).unwrap();
        let f = &ast.functions[0];
        let if_stmt = &f.body.stmts[0];
        if let StmtKind::If { cond, then_branch, .. } = &if_stmt.kind {
            assert!(if_stmt.span.contains(&cond.span));
            assert!(if_stmt.span.contains(&then_branch.span));
            assert!(f.span.contains(&if_stmt.span));
        } else {
            panic!("expected if");
        }
    }

    #[test]
    fn node_ids_unique() {
        let src = "void f(){ int a = 1; int b = a + 2; if (a < b) { a = b; } }";
        let ast = parse(src).unwrap();
        let mut ids = Vec::new();
        fn walk_stmt(s: &Stmt, ids: &mut Vec<u32>) {
            ids.push(s.id.0);
            match &s.kind {
                StmtKind::Block(b) => b.stmts.iter().for_each(|s| walk_stmt(s, ids)),
                StmtKind::If { then_branch, else_branch, .. } => {
                    walk_stmt(then_branch, ids);
                    if let Some(e) = else_branch {
                        walk_stmt(e, ids);
                    }
                }
                StmtKind::While { body, .. } => walk_stmt(body, ids),
                StmtKind::For { init, body, .. } => {
                    if let Some(i) = init {
                        walk_stmt(i, ids);
                    }
                    walk_stmt(body, ids);
                }
                _ => {}
            }
        }
        for f in &ast.functions {
            ids.push(f.id.0);
            f.body.stmts.iter().for_each(|s| walk_stmt(s, &mut ids));
        }
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), ids.len());
    }
}
