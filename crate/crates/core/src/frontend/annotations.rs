//! SARD-style annotation comments: `FLAW`, `POTENTIAL FLAW`, and `FIX`
//! prefixes inside block or line comments. The annotation's line is the first
//! code line after the comment.

use serde::{Deserialize, Serialize};

use super::lexer::{lex_raw, RawItem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AnnotationKind {
    Flaw,
    PotentialFlaw,
    Fix,
}

impl AnnotationKind {
    pub fn is_flaw(self) -> bool {
        matches!(self, AnnotationKind::Flaw | AnnotationKind::PotentialFlaw)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SardAnnotation {
    pub kind: AnnotationKind,
    /// 1-based line of the first code statement after the comment.
    pub line: u32,
    pub text: String,
}

/// Scan every comment for annotation prefixes. Prefix match is
/// case-sensitive with leading whitespace ignored; non-matching comments are
/// ignored. Unlexable sources yield no annotations.
pub fn extract_annotations(source: &str) -> Vec<SardAnnotation> {
    let items = match lex_raw(source) {
        Ok(items) => items,
        Err(_) => return Vec::new(),
    };
    let mut out = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let c = match item {
            RawItem::Comment(c) => c,
            _ => continue,
        };
        let body = c.body.trim_start();
        let kind = if body.starts_with("POTENTIAL FLAW") {
            AnnotationKind::PotentialFlaw
        } else if body.starts_with("FLAW") {
            AnnotationKind::Flaw
        } else if body.starts_with("FIX") {
            AnnotationKind::Fix
        } else {
            continue;
        };
        let line = items[i + 1..]
            .iter()
            .find_map(|it| match it {
                RawItem::Tok(t) => Some(t.line()),
                _ => None,
            })
            .unwrap_or(c.span.end.line);
        out.push(SardAnnotation { kind, line, text: c.body.trim().to_string() });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flaw_annotates_next_code_line() {
        let anns = extract_annotations("/* FLAW: buffer too small */\n memset(d,'C',40);");
        assert_eq!(anns.len(), 1);
        assert_eq!(anns[0].kind, AnnotationKind::Flaw);
        assert_eq!(anns[0].line, 2);
    }

    #[test]
    fn no_comments_no_annotations() {
        assert!(extract_annotations("int x = 1;\n").is_empty());
    }

    #[test]
    fn stacked_annotations_share_target_line() {
        let src = "/* POTENTIAL FLAW: maybe */\n/* FIX: guarded */\nx = 1;\n";
        let anns = extract_annotations(src);
        assert_eq!(anns.len(), 2);
        assert_eq!(anns[0].kind, AnnotationKind::PotentialFlaw);
        assert_eq!(anns[1].kind, AnnotationKind::Fix);
        assert_eq!(anns[0].line, 3);
        assert_eq!(anns[1].line, 3);
    }

    #[test]
    fn prefix_is_case_sensitive() {
        assert!(extract_annotations("/* flaw: nope */\nx = 1;\n").is_empty());
    }

    #[test]
    fn line_comment_prefix_matches() {
        let anns = extract_annotations("// FIX: clamp\nif (i >= 0) { }\n");
        assert_eq!(anns.len(), 1);
        assert_eq!(anns[0].kind, AnnotationKind::Fix);
        assert_eq!(anns[0].line, 2);
    }

    #[test]
    fn totality_matches_prefix_count() {
        let src = "/* FLAW: a */\nx;\n/* note */\ny;\n// POTENTIAL FLAW: b\nz;\n";
        assert_eq!(extract_annotations(src).len(), 2);
    }
}
