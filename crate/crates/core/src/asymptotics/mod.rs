//! Circuit counts for finite `n` and the limiting moments built from them.

mod count;
mod integral;
mod jump;
mod moments;

pub use count::{
    count_pi_exact, count_pi_exact_with_budget, extrapolate_normalized, richardson, Extrapolation,
    PiCountResult, DEFAULT_WORK_BUDGET,
};
pub use integral::{sign_set_count, sign_sets, BlockWeight, KernelWeight, McConfig, UnitWeight};
pub use jump::{jump_distribution_sample, jump_moment_check};
pub use moments::{
    band_toeplitz_hankel_moment, constant_profile, hankel_limit_moment, pi_limit,
    profile_limit_moment, rc_limit_moment, sc_limit_moment, sigma_profile, toeplitz_limit_moment,
    Kernel, LimitMomentReport, PartitionTerm,
};
