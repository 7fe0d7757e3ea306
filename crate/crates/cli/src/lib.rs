//! Library half of the `gevkit` command line tool: input plumbing,
//! report structures, and the subcommand implementations. The binary in
//! `main.rs` only parses arguments and dispatches here.

pub mod commands;
pub mod ingest;
pub mod report;
pub mod schema;
