//! Numerical certification of the quantitative claims: the lower bound on
//! `|psi|` near the real group and its internal inequality, winding numbers
//! of the candidate characters, zeros of the rejected `(a + ic)^2`, totally
//! real orbits, freeness, sampled properness, and Levi-form positivity of
//! orbit tubes.

mod lemma;
mod levi;
mod proper;
mod rank;
mod winding;

pub use lemma::{
    check_lemma, check_lemma_claim, find_phi_square_zero, phi_square_zero_report, sample_psi_level_set, ClaimConfig, LemmaConfig,
    PhiSquareZero, CLAIM_ENTRY_RANGE, DEFAULT_DELTA, DEFAULT_EPS,
};
pub use levi::{
    complex_hessian, levi_quadratic, levi_at, levi_form_check, levi_radius_scaling, tube_boundary_point, tube_distance, LeviAtPoint, LeviConfig,
    TubeSpec, FD_STEP,
};
pub use proper::{escape_score, properness_probe};
pub use rank::{
    freeness_audit, freeness_certificate, random_distinct_triple, totally_real_audit, totally_real_rank, FreenessCertificate,
    OrbitFrame, TotallyRealRank, DEGENERATE_SIGMA, RANK_TOL,
};
pub use winding::{verify_winding, winding_number, winding_of, WindingSummary};
