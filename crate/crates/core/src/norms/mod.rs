//! Weighted sup-norm functionals on sampled spaces: fixed-center and sharp
//! (quotient) norms, tail/local splits, limsup estimates, dual certificates,
//! Orlicz gauges, weighted `L^q` norms, Schur-type operator bounds, Moreau
//! envelopes, truncation to a core, and pullback bounds.

pub mod lq;
pub mod moreau;
pub mod orlicz;
pub mod pullback;
pub mod schur;
pub mod sharp;
pub mod tails;

pub use lq::{lq_embedding_check, weighted_lq_norm, LqEmbedding};
pub use moreau::moreau_envelope;
pub use orlicz::luxemburg_norm;
pub use pullback::{pullback_check, PullbackCheck};
pub use schur::{apply_kernel, schur_test, Kernel, SchurReport};
pub use sharp::{
    certificate, contacts_at, fixed_norm, sharp_norm, weighted_center, Centering, Certificate,
    Contact, NormReport,
};
pub use tails::{
    asymptotic_constant, estimate_limsup, patch_check, tail_ladder, truncate_to_core,
    AsymptoticEstimate, LadderEntry, PatchCheck, RateStatus, ShellPolicy, TailLadder, Truncation,
    DIVERGENCE_CAP, DRIFT_TINY, GROWTH_SLOPE_TOL,
};
