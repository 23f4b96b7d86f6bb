//! File formats and report envelopes for the `ditop` command.

use serde::Serialize;

pub mod format;

/// Wrapper written around every JSON report.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, C, R> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: C,
    pub report: R,
}

impl<'a, C: Serialize, R: Serialize> Envelope<'a, C, R> {
    pub fn new(command: &'a str, config: C, report: R) -> Self {
        Self { tool: "ditop", version: env!("CARGO_PKG_VERSION"), command, config, report }
    }
}
