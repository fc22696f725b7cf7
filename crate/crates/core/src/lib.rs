pub mod backward;
pub mod context;
pub mod corpus;
pub mod eval;
pub mod gen;
pub mod model;
pub mod nzf;
pub mod oracle;
pub mod par;
pub mod stateset;
pub mod stats;
pub mod zone;

pub use context::Context;
pub use stateset::StateSet;
pub use stats::Stats;
pub use eval::{check, EvalConfig, Outcome, Verdict};
