//! Abridged code property graphs: construction, constant evaluation, and
//! debug export.

pub mod builder;
pub mod consts;
pub mod export;
pub mod graph;
