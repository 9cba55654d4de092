//! Membership in the subgroups and monoids of SL2(Z) generated by the
//! parabolic matrices `A(k) = [[1,k],[0,1]]` and `B(k) = [[1,0],[k,1]]`,
//! `k ≥ 2`, with exact arithmetic throughout.

pub mod bench;
pub mod cli;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod membership;
pub mod oracle;
pub mod rng;
pub mod witness;
pub mod word;

pub use error::{Error, Result};
pub use exec::Exec;
pub use linalg::{
    apply_op, complexity_of, generator, mat_mul, Complexity, ElemOp, GenKind, Mat2, Side, Sign,
};
pub use membership::{
    congruence_precheck, decide_membership, monoid_decide, reconstruct_word,
    reconstruct_word_checked, reduce_step, sanov_check, sanov_check_decimal, Status, Step, Verdict,
};
pub use word::{Letter, Word};
