//! Orders of additive bases of finite cyclic groups.
//!
//! A subset `A` of `Z_n` is a basis when some h-fold sumset
//! `hA = {a_1 + ... + a_h}` is all of `Z_n`; the least such `h` is its order.
//! This crate computes orders and sumset trajectories on a dense bitset
//! kernel, enumerates bases up to affine equivalence, and measures the
//! classical bounds and structure statements about slowly growing sumsets.

pub mod affine;
pub mod arith;
pub mod bounds;
pub mod error;
pub mod render;
pub mod spectrum;
pub mod structure;
pub mod sumset;
pub mod zn_set;

pub use affine::{canonical_form, is_canonical, orbit, AffineMap};
pub use arith::{divisors, nlr, OrderValue, Rational, SignedResidue};
pub use bounds::{
    case_two_bounds, fl_growth_check, kl_bound, lower_bound_family, order_upper_via_s,
    pigeonhole_witness, rep_decompose,
};
pub use error::{Error, Result};
pub use spectrum::{
    conjecture_sweep, enumerate_bases, spectrum, verify_conjecture, EnumerationMode, SearchConfig,
};
pub use structure::{
    ap_cover, coset_profile, df_analyze, doubling_search, pipeline_trace, project,
    projection_order_bounds, DfConfig,
};
pub use sumset::{add_sets, h_fold, order, trajectory, SumsetTrajectory};
pub use zn_set::{is_basis, IntSet, ZnSet};
