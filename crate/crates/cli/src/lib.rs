//! Library surface of the command-line driver: subcommand implementations,
//! output plumbing, and the JSON-schema checker used to validate the
//! committed output schemas.

pub mod commands;
pub mod output;
pub mod schema;
