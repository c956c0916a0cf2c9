//! `steer` — planar swimming with independent left/right motor speeds.
//! Same artifacts as `swim` (trajectory CSV + metrics report); the
//! scenario resolves to planar mode by default and rejects vertical.

use super::swim::run_swim_like;
use crate::config::Scenario;
use crate::{CliError, RunArgs};

pub fn run(args: &RunArgs) -> Result<(), CliError> {
    run_swim_like(args, Scenario::Steer)
}
