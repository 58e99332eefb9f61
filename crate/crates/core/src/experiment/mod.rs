mod mc;
mod sweep;
mod verify;

pub use mc::{run_mc, run_mc_with_threads, McReport, TrialRecord, DEFAULT_EPSILON};
pub use sweep::{convergence_sweep, SweepRow};
pub use verify::{verify_all, CheckOutcome, Profile, VerifySummary};
