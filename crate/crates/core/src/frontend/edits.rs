//! Line- and span-anchored source rewriting. Edits are validated to be
//! in-bounds and non-overlapping, applied back-to-front so byte offsets stay
//! stable, and expose a line map so witness anchors can be re-resolved on the
//! rewritten text.

use serde::{Deserialize, Serialize};

use super::lexer::Span;
use crate::error::EditError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Edit {
    /// Replace the full text of a 1-based line (newline excluded).
    ReplaceLine { line: u32, text: String },
    /// Insert a new line before the given 1-based line.
    InsertBefore { line: u32, text: String },
    /// Replace an exact byte span.
    ReplaceSpan { span: Span, text: String },
    /// Remove a 1-based line including its newline.
    DeleteLine { line: u32 },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditScript {
    pub edits: Vec<Edit>,
}

impl EditScript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, edit: Edit) {
        self.edits.push(edit);
    }

    pub fn is_empty(&self) -> bool {
        self.edits.is_empty()
    }

    /// Resolve every edit to a byte range plus replacement text.
    fn resolve(&self, source: &str) -> Result<Vec<(usize, usize, String)>, EditError> {
        let lines = line_offsets(source);
        let mut out = Vec::with_capacity(self.edits.len());
        for e in &self.edits {
            match e {
                Edit::ReplaceLine { line, text } => {
                    let (start, end) = line_bounds(source, &lines, *line)?;
                    out.push((start, end, text.clone()));
                }
                Edit::InsertBefore { line, text } => {
                    let (start, _) = line_bounds(source, &lines, *line)?;
                    out.push((start, start, format!("{}\n", text)));
                }
                Edit::ReplaceSpan { span, text } => {
                    if span.end.byte < span.start.byte || span.end.byte > source.len() {
                        return Err(EditError::OutOfBounds(format!(
                            "span {}..{}",
                            span.start.byte, span.end.byte
                        )));
                    }
                    out.push((span.start.byte, span.end.byte, text.clone()));
                }
                Edit::DeleteLine { line } => {
                    let (start, end) = line_bounds(source, &lines, *line)?;
                    let end = if source.as_bytes().get(end) == Some(&b'\n') { end + 1 } else { end };
                    out.push((start, end, String::new()));
                }
            }
        }
        out.sort_by_key(|(s, e, _)| (*s, *e));
        for w in out.windows(2) {
            let (_, e0, _) = &w[0];
            let (s1, e1, _) = &w[1];
            // two zero-width inserts at the same point conflict too
            if s1 < e0 || (s1 == e0 && w[0].0 == *e0 && *s1 == *e1) {
                return Err(EditError::Overlap(*s1));
            }
        }
        Ok(out)
    }

    /// Apply the script; unedited bytes are untouched. An empty script
    /// returns the source byte-identically.
    pub fn apply(&self, source: &str) -> Result<String, EditError> {
        let resolved = self.resolve(source)?;
        let mut out = source.to_string();
        for (start, end, text) in resolved.into_iter().rev() {
            out.replace_range(start..end, &text);
        }
        Ok(out)
    }

    /// Map 1-based line numbers of the original source onto the rewritten
    /// text. Lines inside a replaced range map to the range's first new line.
    pub fn line_map(&self, source: &str) -> Result<LineMap, EditError> {
        let resolved = self.resolve(source)?;
        let mut shifts = Vec::new();
        for (start, end, text) in &resolved {
            let old_newlines = source[*start..*end].matches('\n').count() as i64;
            let new_newlines = text.matches('\n').count() as i64;
            let mut after_line = byte_to_line(source, *start);
            if start == end {
                // pure insertion: the line at the insertion point shifts too
                after_line = after_line.saturating_sub(1);
            }
            shifts.push((after_line, new_newlines - old_newlines));
        }
        Ok(LineMap { shifts })
    }
}

/// Cumulative line-shift table computed from an edit script.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LineMap {
    /// (line at which the edit begins, delta in line count)
    shifts: Vec<(u32, i64)>,
}

impl LineMap {
    pub fn identity() -> Self {
        LineMap { shifts: Vec::new() }
    }

    pub fn map(&self, line: u32) -> u32 {
        let mut delta = 0i64;
        for (at, d) in &self.shifts {
            if *at < line {
                delta += d;
            }
        }
        (line as i64 + delta).max(1) as u32
    }
}

fn line_offsets(source: &str) -> Vec<usize> {
    let mut offsets = vec![0usize];
    for (i, b) in source.bytes().enumerate() {
        if b == b'\n' {
            offsets.push(i + 1);
        }
    }
    offsets
}

fn byte_to_line(source: &str, byte: usize) -> u32 {
    source[..byte].bytes().filter(|b| *b == b'\n').count() as u32 + 1
}

fn line_bounds(source: &str, offsets: &[usize], line: u32) -> Result<(usize, usize), EditError> {
    if line == 0 {
        return Err(EditError::OutOfBounds("line 0".into()));
    }
    let idx = (line - 1) as usize;
    let start = *offsets.get(idx).ok_or_else(|| EditError::OutOfBounds(format!("line {}", line)))?;
    let end = offsets.get(idx + 1).map(|o| o - 1).unwrap_or(source.len());
    Ok((start, end))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::lexer::{Pos, Span};

    fn span(start: usize, end: usize, src: &str) -> Span {
        let to_pos = |b: usize| Pos {
            line: byte_to_line(src, b),
            col: 1,
            byte: b,
        };
        Span { start: to_pos(start), end: to_pos(end) }
    }

    #[test]
    fn empty_script_is_identity() {
        let src = "char d[10];\nmemset(d, 'C', 40);\n";
        assert_eq!(EditScript::new().apply(src).unwrap(), src);
    }

    #[test]
    fn replace_span_literal() {
        let src = "char d[10];";
        let at = src.find("10").unwrap();
        let mut script = EditScript::new();
        script.push(Edit::ReplaceSpan { span: span(at, at + 2, src), text: "9".into() });
        assert_eq!(script.apply(src).unwrap(), "char d[9];");
    }

    #[test]
    fn insert_before_first_body_line() {
        let src = "void f() {\n    x = 1;\n}\n";
        let mut script = EditScript::new();
        script.push(Edit::InsertBefore { line: 2, text: "    printf(\"\");".into() });
        assert_eq!(script.apply(src).unwrap(), "void f() {\n    printf(\"\");\n    x = 1;\n}\n");
    }

    #[test]
    fn overlap_is_rejected() {
        let src = "abcdef";
        let mut script = EditScript::new();
        script.push(Edit::ReplaceSpan { span: span(0, 3, src), text: "x".into() });
        script.push(Edit::ReplaceSpan { span: span(2, 5, src), text: "y".into() });
        assert!(matches!(script.apply(src), Err(EditError::Overlap(_))));
    }

    #[test]
    fn out_of_bounds_line() {
        let mut script = EditScript::new();
        script.push(Edit::ReplaceLine { line: 99, text: "x".into() });
        assert!(matches!(script.apply("one line"), Err(EditError::OutOfBounds(_))));
    }

    #[test]
    fn line_map_tracks_insertions() {
        let src = "a;\nb;\nc;\n";
        let mut script = EditScript::new();
        script.push(Edit::InsertBefore { line: 2, text: "x;".into() });
        let map = script.line_map(src).unwrap();
        assert_eq!(map.map(1), 1);
        assert_eq!(map.map(2), 3);
        assert_eq!(map.map(3), 4);
    }

    #[test]
    fn delete_line_shifts_up() {
        let src = "a;\nb;\nc;\n";
        let mut script = EditScript::new();
        script.push(Edit::DeleteLine { line: 2 });
        assert_eq!(script.apply(src).unwrap(), "a;\nc;\n");
        let map = script.line_map(src).unwrap();
        assert_eq!(map.map(3), 2);
    }
}
