//! Library side of the `causalview` command-line tool: the scenario file
//! schema, the table renderers and the command implementations. The binary
//! in `main.rs` only parses arguments and maps outcomes to exit codes.

pub mod commands;
pub mod output;
pub mod schema;

pub use commands::{Direction, Outcome, View};
pub use output::Format;
