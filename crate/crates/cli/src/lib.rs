//! Library side of the `eml` command-line tool: argument definitions,
//! parameter resolution and the tabular output format.

pub mod commands;
pub mod params;
pub mod table;
