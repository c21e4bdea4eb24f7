//! Token-stream reformatter: 4-space indents, one statement per line,
//! normalized brace placement. Output is a pure function of the lexed item
//! sequence, so the token stream is preserved and reformatting is idempotent.

use super::lexer::{lex_raw, RawItem, TokKind, Token};
use super::parser::parse;
use crate::error::SyntaxError;

const INDENT: &str = "    ";

pub fn normalize_formatting(source: &str) -> Result<String, SyntaxError> {
    // the contract requires parsable input
    parse(source)?;
    let items = lex_raw(source)?;
    let mut w = Writer::default();
    for item in &items {
        match item {
            RawItem::Directive { text, .. } => {
                w.flush();
                w.out.push_str(text.trim_end());
                w.out.push('\n');
            }
            RawItem::Comment(c) => {
                w.flush();
                let rendered = if c.block {
                    format!("/*{}*/", c.body)
                } else {
                    format!("//{}", c.body)
                };
                let mut first = true;
                for line in rendered.split('\n') {
                    if first {
                        w.out.push_str(&INDENT.repeat(w.indent));
                        first = false;
                    }
                    w.out.push_str(line.trim_end());
                    w.out.push('\n');
                }
            }
            RawItem::Tok(t) => w.token(t),
        }
    }
    w.flush();
    Ok(w.out)
}

#[derive(Default)]
struct Writer {
    out: String,
    line: Vec<Token>,
    indent: usize,
    paren_depth: i32,
}

impl Writer {
    fn token(&mut self, t: &Token) {
        match t.text.as_str() {
            "(" | "[" => self.paren_depth += 1,
            ")" | "]" => self.paren_depth -= 1,
            _ => {}
        }
        match t.text.as_str() {
            "{" => {
                self.line.push(t.clone());
                self.flush();
                self.indent += 1;
            }
            "}" => {
                self.flush();
                self.indent = self.indent.saturating_sub(1);
                self.line.push(t.clone());
                self.flush();
            }
            ";" if self.paren_depth == 0 => {
                self.line.push(t.clone());
                self.flush();
            }
            _ => self.line.push(t.clone()),
        }
    }

    fn flush(&mut self) {
        if self.line.is_empty() {
            return;
        }
        self.out.push_str(&INDENT.repeat(self.indent));
        for i in 0..self.line.len() {
            if i > 0 && needs_space(&self.line[i - 1], &self.line[i]) {
                self.out.push(' ');
            }
            self.out.push_str(&self.line[i].text);
        }
        self.out.push('\n');
        self.line.clear();
    }
}

fn needs_space(prev: &Token, next: &Token) -> bool {
    let p = prev.text.as_str();
    let n = next.text.as_str();
    if matches!(n, ";" | "," | ")" | "]" | "[" | "++" | "--") {
        return false;
    }
    if matches!(p, "(" | "[" | "!" | "++" | "--") {
        return false;
    }
    // call and grouping parens hug the preceding identifier or closer
    if n == "(" && (prev.kind == TokKind::Ident || p == ")" || p == "]") {
        // keep `if (...)`, `while (...)`, `for (...)`, `return (...)` spaced
        return matches!(p, "if" | "while" | "for" | "return" | "else");
    }
    true
}
