//! Quenched polymer measures on up-right paths.
//!
//! Point-to-point measures are sampled through their backward Markov chain.
//! Semi-infinite measures are represented by the forward chain of a
//! finite-horizon Busemann field, `π(y → y+e_i) = e^{β(ω_y − B(y, y+e_i))}`.

mod measure;
mod path;
mod sample;
mod transitions;

pub use measure::{
    dlr_consistency_check, exact_path_probability, ldp_rate_profile, level_mass_defects, log_path_probability,
    rooted_mass_decay, write_decay_csv, DlrReport, RateProfile, RateRow, DLR_MAX_STEPS,
};
pub use path::PolymerPath;
pub use sample::{forward_chain_sample, sample_p2p, ChainSample};
pub use transitions::{backward_residual, backward_transitions, TransitionField, TransitionSource};
