//! Tokenizer for the supported C subset.
//!
//! Produces a raw item stream (tokens, comments, preprocessor directives in
//! source order) and a code-token stream with object-like `#define` constants
//! substituted. Every token carries byte-exact source coordinates so later
//! rewrites can splice text without disturbing the rest of the file.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::SyntaxError;

/// A source position. Lines and columns are 1-based; `byte` is the offset
/// into the original UTF-8 text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
    pub byte: usize,
}

/// Half-open byte span `[start, end)` with line/column endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: Pos,
    pub end: Pos,
}

impl Span {
    pub fn byte_range(&self) -> std::ops::Range<usize> {
        self.start.byte..self.end.byte
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start.byte <= other.start.byte && other.end.byte <= self.end.byte
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TokKind {
    Ident,
    Int,
    CharLit,
    Str,
    WideStr,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokKind,
    pub text: String,
    pub span: Span,
}

impl Token {
    pub fn is(&self, text: &str) -> bool {
        self.text == text
    }

    pub fn line(&self) -> u32 {
        self.span.start.line
    }
}

/// A comment with its delimiters stripped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comment {
    pub body: String,
    pub span: Span,
    pub block: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawItem {
    Tok(Token),
    Comment(Comment),
    Directive { text: String, span: Span },
}

/// Full lex result: raw items in source order plus the substituted code
/// token stream the parser consumes.
#[derive(Debug, Clone)]
pub struct LexOutput {
    pub items: Vec<RawItem>,
    pub tokens: Vec<Token>,
    pub defines: BTreeMap<String, Vec<Token>>,
}

struct Scanner<'a> {
    src: &'a [u8],
    byte: usize,
    line: u32,
    col: u32,
}

impl<'a> Scanner<'a> {
    fn new(src: &'a str) -> Self {
        Scanner { src: src.as_bytes(), byte: 0, line: 1, col: 1 }
    }

    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col, byte: self.byte }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.byte).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.src.get(self.byte + 1).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.byte += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn text(&self, start: usize) -> String {
        String::from_utf8_lossy(&self.src[start..self.byte]).into_owned()
    }
}

const PUNCT2: &[&str] = &["<=", ">=", "==", "!=", "&&", "||", "++", "--"];
const PUNCT1: &[u8] = b"+-*/%<>=!&|(){}[];,~^.?:";

/// Lex the full source into raw items. Comments and directives stay in the
/// stream; no define substitution happens here.
pub fn lex_raw(source: &str) -> Result<Vec<RawItem>, SyntaxError> {
    let mut s = Scanner::new(source);
    let mut items = Vec::new();
    let mut at_line_start = true;
    loop {
        let c = match s.peek() {
            Some(c) => c,
            None => break,
        };
        match c {
            b' ' | b'\t' | b'\r' => {
                s.bump();
            }
            b'\n' => {
                s.bump();
                at_line_start = true;
                continue;
            }
            b'#' if at_line_start => {
                let start = s.pos();
                while let Some(c) = s.peek() {
                    if c == b'\n' {
                        break;
                    }
                    s.bump();
                }
                let end = s.pos();
                items.push(RawItem::Directive {
                    text: s.text(start.byte),
                    span: Span { start, end },
                });
            }
            b'/' if s.peek2() == Some(b'/') => {
                let start = s.pos();
                s.bump();
                s.bump();
                let body_start = s.byte;
                while let Some(c) = s.peek() {
                    if c == b'\n' {
                        break;
                    }
                    s.bump();
                }
                let body = String::from_utf8_lossy(&s.src[body_start..s.byte]).into_owned();
                let end = s.pos();
                items.push(RawItem::Comment(Comment { body, span: Span { start, end }, block: false }));
            }
            b'/' if s.peek2() == Some(b'*') => {
                let start = s.pos();
                s.bump();
                s.bump();
                let body_start = s.byte;
                let mut body_end = s.byte;
                let mut closed = false;
                while let Some(c) = s.peek() {
                    if c == b'*' && s.peek2() == Some(b'/') {
                        body_end = s.byte;
                        s.bump();
                        s.bump();
                        closed = true;
                        break;
                    }
                    s.bump();
                }
                if !closed {
                    return Err(SyntaxError::new(start.line, "unterminated block comment"));
                }
                let body = String::from_utf8_lossy(&s.src[body_start..body_end]).into_owned();
                let end = s.pos();
                items.push(RawItem::Comment(Comment { body, span: Span { start, end }, block: true }));
            }
            b'"' => {
                items.push(RawItem::Tok(scan_string(&mut s, TokKind::Str)?));
            }
            b'\'' => {
                items.push(RawItem::Tok(scan_char(&mut s)?));
            }
            b'L' if s.peek2() == Some(b'"') => {
                let start = s.pos();
                s.bump();
                let mut t = scan_string(&mut s, TokKind::WideStr)?;
                t.span.start = start;
                t.text = format!("L{}", t.text);
                items.push(RawItem::Tok(t));
            }
            b'L' if s.peek2() == Some(b'\'') => {
                let start = s.pos();
                s.bump();
                let mut t = scan_char(&mut s)?;
                t.span.start = start;
                t.text = format!("L{}", t.text);
                items.push(RawItem::Tok(t));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = s.pos();
                while let Some(c) = s.peek() {
                    if c.is_ascii_alphanumeric() || c == b'_' {
                        s.bump();
                    } else {
                        break;
                    }
                }
                let end = s.pos();
                items.push(RawItem::Tok(Token {
                    kind: TokKind::Ident,
                    text: s.text(start.byte),
                    span: Span { start, end },
                }));
            }
            c if c.is_ascii_digit() => {
                let start = s.pos();
                if c == b'0' && matches!(s.peek2(), Some(b'x') | Some(b'X')) {
                    s.bump();
                    s.bump();
                    while let Some(c) = s.peek() {
                        if c.is_ascii_hexdigit() {
                            s.bump();
                        } else {
                            break;
                        }
                    }
                } else {
                    while let Some(c) = s.peek() {
                        if c.is_ascii_digit() {
                            s.bump();
                        } else {
                            break;
                        }
                    }
                }
                // integer suffixes
                while let Some(c) = s.peek() {
                    if matches!(c, b'u' | b'U' | b'l' | b'L') {
                        s.bump();
                    } else {
                        break;
                    }
                }
                let end = s.pos();
                items.push(RawItem::Tok(Token {
                    kind: TokKind::Int,
                    text: s.text(start.byte),
                    span: Span { start, end },
                }));
            }
            _ => {
                let start = s.pos();
                // two-character punctuators first
                if let Some(c2) = s.peek2() {
                    let pair = [c, c2];
                    let pair = std::str::from_utf8(&pair).unwrap_or("");
                    if PUNCT2.contains(&pair) {
                        s.bump();
                        s.bump();
                        let end = s.pos();
                        items.push(RawItem::Tok(Token {
                            kind: TokKind::Punct,
                            text: pair.to_string(),
                            span: Span { start, end },
                        }));
                        at_line_start = false;
                        continue;
                    }
                }
                if PUNCT1.contains(&c) {
                    s.bump();
                    let end = s.pos();
                    items.push(RawItem::Tok(Token {
                        kind: TokKind::Punct,
                        text: (c as char).to_string(),
                        span: Span { start, end },
                    }));
                } else {
                    return Err(SyntaxError::new(
                        s.line,
                        format!("unexpected character '{}'", c as char),
                    ));
                }
            }
        }
        at_line_start = false;
    }
    Ok(items)
}

fn scan_string(s: &mut Scanner, kind: TokKind) -> Result<Token, SyntaxError> {
    let start = s.pos();
    s.bump(); // opening quote
    loop {
        match s.bump() {
            Some(b'"') => break,
            Some(b'\\') => {
                s.bump();
            }
            Some(b'\n') | None => {
                return Err(SyntaxError::new(start.line, "unterminated string literal"));
            }
            Some(_) => {}
        }
    }
    let end = s.pos();
    Ok(Token { kind, text: s.text(start.byte), span: Span { start, end } })
}

fn scan_char(s: &mut Scanner) -> Result<Token, SyntaxError> {
    let start = s.pos();
    s.bump(); // opening quote
    loop {
        match s.bump() {
            Some(b'\'') => break,
            Some(b'\\') => {
                s.bump();
            }
            Some(b'\n') | None => {
                return Err(SyntaxError::new(start.line, "unterminated character literal"));
            }
            Some(_) => {}
        }
    }
    let end = s.pos();
    Ok(Token { kind: TokKind::CharLit, text: s.text(start.byte), span: Span { start, end } })
}

/// Lex and resolve preprocessing: `#include` lines are stripped, object-like
/// `#define` constants are substituted into the code token stream (the
/// substituted tokens keep the span of the macro use so rewrites stay
/// anchored to real source text). Any other directive is outside the subset.
pub fn prepare(source: &str) -> Result<LexOutput, SyntaxError> {
    let items = lex_raw(source)?;
    let mut defines: BTreeMap<String, Vec<Token>> = BTreeMap::new();
    let mut tokens = Vec::new();
    for item in &items {
        match item {
            RawItem::Directive { text, span } => {
                let body = text.trim_start_matches('#').trim();
                if body.starts_with("include") {
                    continue;
                }
                if let Some(rest) = body.strip_prefix("define") {
                    let rest = rest.trim_start();
                    let name_end = rest
                        .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                        .unwrap_or(rest.len());
                    let name = &rest[..name_end];
                    if name.is_empty() {
                        return Err(SyntaxError::new(span.start.line, "malformed #define"));
                    }
                    if rest[name_end..].starts_with('(') {
                        return Err(SyntaxError::new(
                            span.start.line,
                            "function-like macros are not supported",
                        ));
                    }
                    let replacement = &rest[name_end..];
                    let mut rep_tokens = Vec::new();
                    for it in lex_raw(replacement)? {
                        if let RawItem::Tok(t) = it {
                            rep_tokens.push(t);
                        }
                    }
                    defines.insert(name.to_string(), rep_tokens);
                    continue;
                }
                return Err(SyntaxError::new(
                    span.start.line,
                    format!("unsupported preprocessor directive: {}", body),
                ));
            }
            RawItem::Comment(_) => {}
            RawItem::Tok(t) => {
                substitute(t, &defines, &mut tokens, 0, span_of(t))?;
            }
        }
    }
    Ok(LexOutput { items, tokens, defines })
}

fn span_of(t: &Token) -> Span {
    t.span
}

fn substitute(
    t: &Token,
    defines: &BTreeMap<String, Vec<Token>>,
    out: &mut Vec<Token>,
    depth: u32,
    use_span: Span,
) -> Result<(), SyntaxError> {
    if depth > 8 {
        return Err(SyntaxError::new(use_span.start.line, "macro expansion too deep"));
    }
    if t.kind == TokKind::Ident {
        if let Some(rep) = defines.get(&t.text) {
            for r in rep {
                substitute(r, defines, out, depth + 1, use_span)?;
            }
            return Ok(());
        }
    }
    let mut tok = t.clone();
    tok.span = use_span;
    out.push(tok);
    Ok(())
}

/// The code-token (kind, text) sequence of a source, for token-equivalence
/// checks. Comments and directives are excluded.
pub fn token_signature(source: &str) -> Result<Vec<(TokKind, String)>, SyntaxError> {
    let items = lex_raw(source)?;
    Ok(items
        .into_iter()
        .filter_map(|i| match i {
            RawItem::Tok(t) => Some((t.kind, t.text)),
            _ => None,
        })
        .collect())
}
