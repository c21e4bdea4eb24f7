//! Source-level frontend: lexing, parsing, span-preserving edits,
//! formatting normalization, and flaw-comment extraction.

pub mod annotations;
pub mod ast;
pub mod edits;
pub mod format;
pub mod lexer;
pub mod parser;
