pub mod construct;
pub mod graph;
pub mod minimax;
pub mod rates;
pub mod report;
pub mod wiener;

use bernstein_core::rates::{RateFn, Role};

use crate::error::{CliError, FlagContext};
use crate::grammar::parse_rate;
use crate::Ctx;

/// A rate from a flag value, cut to the horizon.
pub fn rate(flag: &'static str, s: &str, role: Role, ctx: &Ctx) -> Result<RateFn, CliError> {
    parse_rate(s, role).flag(flag)?.with_horizon(ctx.horizon).flag(flag)
}
