//! Command-line front end: report types, command implementations and
//! output rendering.

pub mod commands;
pub mod error;
pub mod render;
pub mod report;
