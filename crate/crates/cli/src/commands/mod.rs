use anyhow::Result;

use crate::config::Resolved;
use crate::report::Report;

pub mod dividend;
pub mod effort;
pub mod matching;
pub mod output;
pub mod simulate;
pub mod two_tech;
pub mod verify;

/// A finished scenario: the report plus scenario files keyed by file name.
pub struct Outcome {
    pub report: Report,
    pub files: Vec<(&'static str, String)>,
}

impl Outcome {
    pub fn report_only(report: Report) -> Outcome {
        Outcome {
            report,
            files: Vec::new(),
        }
    }
}

pub type Runner = fn(&Resolved) -> Result<Outcome>;
