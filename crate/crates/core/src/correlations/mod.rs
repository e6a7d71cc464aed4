//! CHSH functional, membership levels, exact LP over the linear levels and a
//! sampler over the locally quantum level.

mod chsh;
mod lp;
mod membership;
mod sampler;

pub use chsh::{chsh_value, max_chsh, ChshSpec};
pub use lp::{affine_form, lp_max_chsh, LpOutcome, LpProblem};
pub use membership::{
    membership, steered_moments, steering_violations, MembershipLevel, MembershipReport,
    STEERING_EPS,
};
pub use sampler::{
    sample_level3, sample_level3_workers, Level3Walker, SampleRun, SamplerConfig, LOW_ACCEPTANCE,
};
