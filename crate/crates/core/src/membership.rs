//! Decision procedures for the subgroup and the monoid generated by `A(k)`
//! and `B(k)`.
//!
//! The subgroup procedure is a greedy peak reduction: while some elementary
//! operation strictly lowers the complexity `(max |m_ij|, Σ |m_ij|)`, apply
//! the best one. Members end at the identity and the applied operations spell
//! out the unique word; anything else gets stuck at a non-identity matrix.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg::{
    apply_op_big, candidate_complexity, complexity_of, scaled_sources, Complexity, ElemOp, Mat2,
    Side,
};
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    Member,
    NonMember,
    #[serde(rename = "NotSL2")]
    NotSl2,
    /// Rejected by the congruence (or sign) precheck before any reduction.
    BadForm,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Member => "Member",
            Status::NonMember => "NonMember",
            Status::NotSl2 => "NotSL2",
            Status::BadForm => "BadForm",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One reduction step: the operation applied and the complexity afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub op: ElemOp,
    pub after: Complexity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    /// Present iff `status == Member`.
    pub word: Option<Word>,
    /// Present iff `status == NonMember`.
    pub stuck: Option<Mat2>,
    pub trace: Vec<Step>,
}

impl Verdict {
    fn rejected(status: Status) -> Self {
        Verdict {
            status,
            word: None,
            stuck: None,
            trace: Vec::new(),
        }
    }

    pub fn is_member(&self) -> bool {
        self.status == Status::Member
    }

    pub fn steps(&self) -> usize {
        self.trace.len()
    }

    pub fn ops(&self) -> impl Iterator<Item = ElemOp> + '_ {
        self.trace.iter().map(|s| s.op)
    }
}

pub const VERDICT_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct VerdictJson<'a> {
    version: u32,
    status: Status,
    word: Option<String>,
    steps: usize,
    stuck: Option<&'a Mat2>,
    trace: Vec<StepJson>,
}

#[derive(Serialize)]
struct StepJson {
    op: String,
    max_abs: String,
    sum_abs: String,
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        VerdictJson {
            version: VERDICT_SCHEMA_VERSION,
            status: self.status,
            word: self.word.as_ref().map(Word::to_string),
            steps: self.steps(),
            stuck: self.stuck.as_ref(),
            trace: self
                .trace
                .iter()
                .map(|s| StepJson {
                    op: s.op.to_string(),
                    max_abs: s.after.max_abs.to_string(),
                    sum_abs: s.after.sum_abs.to_string(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

fn require_k(k: u64) -> Result<BigInt> {
    if k < 2 {
        return Err(invalid(format!("k must be at least 2, got {k}")));
    }
    Ok(BigInt::from(k))
}

/// `m11 ≡ m22 ≡ 1 (mod k²)` and `m12 ≡ m21 ≡ 0 (mod k)`. Necessary for
/// membership for every `k ≥ 2`, sufficient at `k = 2`.
pub fn congruence_precheck(m: &Mat2, k: u64) -> Result<bool> {
    let k = require_k(k)?;
    m.require_sl2()?;
    Ok(has_congruence_form(m, &k))
}

fn has_congruence_form(m: &Mat2, k: &BigInt) -> bool {
    let k2 = k * k;
    let one = BigInt::one();
    Integer::is_multiple_of(&(m.m11() - &one), &k2)
        && Integer::is_multiple_of(&(m.m22() - &one), &k2)
        && Integer::is_multiple_of(m.m12(), k)
        && Integer::is_multiple_of(m.m21(), k)
}

/// Residue mod 4 from the lowest machine word only.
fn residue_mod4(x: &BigInt) -> u8 {
    let low = (x.magnitude().iter_u64_digits().next().unwrap_or(0) & 3) as u8;
    if x.is_negative() {
        (4 - low) & 3
    } else {
        low
    }
}

fn sanov_residues_ok(r: [u8; 4]) -> bool {
    r[0] == 1 && r[3] == 1 && r[1] & 1 == 0 && r[2] & 1 == 0
}

/// Membership in the subgroup generated by `A(2)`, `B(2)`: exactly the
/// det-1 matrices `[[1+4a, 2b], [2c, 1+4d]]`.
///
/// With `verify_det == false` the caller vouches for `det == 1` and only the
/// lowest two bits of each entry are read, so the cost does not depend on the
/// size of the entries.
pub fn sanov_check(m: &Mat2, verify_det: bool) -> bool {
    let r = m.entries().each_ref().map(residue_mod4);
    sanov_residues_ok(r) && (!verify_det || m.is_sl2())
}

/// [`sanov_check`] with `verify_det == false`, read straight off the decimal
/// text "m11 m12 m21 m22": only the last two digits of each entry matter.
pub fn sanov_check_decimal(text: &str) -> Result<bool> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.len() != 4 {
        return Err(Error::Parse(format!(
            "expected 4 integers \"m11 m12 m21 m22\", found {} token(s)",
            tokens.len()
        )));
    }
    let mut r = [0u8; 4];
    for (slot, tok) in r.iter_mut().zip(&tokens) {
        let (neg, digits) = match tok.as_bytes() {
            [b'-', rest @ ..] => (true, rest),
            [b'+', rest @ ..] => (false, rest),
            all => (false, all),
        };
        if digits.is_empty() || !digits.iter().all(u8::is_ascii_digit) {
            return Err(Error::Parse(format!("not an integer: {tok:?}")));
        }
        let tail = &digits[digits.len().saturating_sub(2)..];
        let low = tail.iter().fold(0u8, |acc, d| acc * 10 + (d - b'0')) % 4;
        *slot = if neg { (4 - low) & 3 } else { low };
    }
    Ok(sanov_residues_ok(r))
}

/// Best improving operation and the complexity it leads to. Ties on the
/// resulting complexity go to the earliest op in [`ElemOp::ALL`].
fn best_op(m: &Mat2, k: &BigInt, current: &Complexity) -> Option<(ElemOp, Complexity)> {
    let mut best: Option<(ElemOp, Complexity)> = None;
    for pair in ElemOp::ALL.chunks_exact(2) {
        let scaled = scaled_sources(m, pair[0].side, pair[0].gen, k);
        for &op in pair {
            let c = candidate_complexity(m, op, &scaled);
            if &c < current && best.as_ref().is_none_or(|(_, b)| c < *b) {
                best = Some((op, c));
            }
        }
    }
    best
}

/// An elementary operation that strictly lowers the complexity of `m`, or
/// `None` if no such operation exists.
pub fn reduce_step(m: &Mat2, k: u64) -> Result<Option<ElemOp>> {
    let k = require_k(k)?;
    m.require_sl2()?;
    Ok(best_op(m, &k, &complexity_of(m)).map(|(op, _)| op))
}

fn iteration_guard(c: &Complexity) -> BigUint {
    &c.sum_abs + 4u32
}

/// Decide whether `m` lies in the subgroup generated by `A(k)`, `B(k)` and,
/// if it does, recover its word.
pub fn decide_membership(m: &Mat2, k: u64) -> Result<Verdict> {
    let kb = require_k(k)?;
    if !m.is_sl2() {
        return Ok(Verdict::rejected(Status::NotSl2));
    }
    if !has_congruence_form(m, &kb) {
        return Ok(Verdict::rejected(Status::BadForm));
    }
    if m.is_identity() {
        return Ok(Verdict {
            status: Status::Member,
            word: Some(Word::identity()),
            stuck: None,
            trace: Vec::new(),
        });
    }
    let mut current = complexity_of(m);
    if current.max_abs.is_one() {
        // Only A(±1), B(±1) remain; they cannot be members of a free group
        // on A(k), B(k). Unreachable past the congruence check, kept for
        // completeness.
        return Ok(Verdict {
            status: Status::NonMember,
            word: None,
            stuck: Some(m.clone()),
            trace: Vec::new(),
        });
    }

    let guard = iteration_guard(&current);
    let mut mat = m.clone();
    let mut trace = Vec::new();
    while let Some((op, next)) = best_op(&mat, &kb, &current) {
        mat = apply_op_big(&mat, op, &kb);
        current = next;
        trace.push(Step {
            op,
            after: current.clone(),
        });
        if BigUint::from(trace.len()) > guard {
            return Err(Error::Internal(format!(
                "reduction exceeded {guard} steps without terminating"
            )));
        }
    }

    if mat.is_identity() {
        let ops: Vec<ElemOp> = trace.iter().map(|s| s.op).collect();
        Ok(Verdict {
            status: Status::Member,
            word: Some(reconstruct_word(&ops)),
            stuck: None,
            trace,
        })
    } else {
        Ok(Verdict {
            status: Status::NonMember,
            word: None,
            stuck: Some(mat),
            trace,
        })
    }
}

/// Decide membership in the monoid generated by `A(k)`, `B(k)`, using only
/// the four inverse-generator operations on nonnegative matrices.
pub fn monoid_decide(m: &Mat2, k: u64) -> Result<Verdict> {
    let kb = require_k(k)?;
    if !m.is_sl2() {
        return Ok(Verdict::rejected(Status::NotSl2));
    }
    if m.entries().iter().any(Signed::is_negative) || !has_congruence_form(m, &kb) {
        return Ok(Verdict::rejected(Status::BadForm));
    }

    let mut current = complexity_of(m);
    let guard = iteration_guard(&current);
    let mut mat = m.clone();
    let mut trace = Vec::new();
    loop {
        let mut best: Option<(Mat2, ElemOp, Complexity)> = None;
        for op in ElemOp::INVERSES {
            let cand = apply_op_big(&mat, op, &kb);
            if cand.entries().iter().any(Signed::is_negative) {
                continue;
            }
            let c = complexity_of(&cand);
            // all entries nonnegative, so sum_abs is the plain entry sum
            if c.sum_abs < current.sum_abs && best.as_ref().is_none_or(|(_, _, b)| c < *b) {
                best = Some((cand, op, c));
            }
        }
        let Some((next, op, c)) = best else { break };
        mat = next;
        current = c;
        trace.push(Step {
            op,
            after: current.clone(),
        });
        if BigUint::from(trace.len()) > guard {
            return Err(Error::Internal(format!(
                "monoid reduction exceeded {guard} steps without terminating"
            )));
        }
    }

    if mat.is_identity() {
        let ops: Vec<ElemOp> = trace.iter().map(|s| s.op).collect();
        Ok(Verdict {
            status: Status::Member,
            word: Some(reconstruct_word(&ops)),
            stuck: None,
            trace,
        })
    } else {
        Ok(Verdict {
            status: Status::NonMember,
            word: None,
            stuck: Some(mat),
            trace,
        })
    }
}

/// Assemble the word of `M` from a trace that reduces `M` to the identity.
///
/// If the left operations applied were `L1, …, Ln` and the right ones
/// `R1, …, Rm`, then `Ln⋯L1 · M · R1⋯Rm = I`, hence
/// `M = L1⁻¹⋯Ln⁻¹ · Rm⁻¹⋯R1⁻¹`.
pub fn reconstruct_word(trace: &[ElemOp]) -> Word {
    let mut word = Word::identity();
    for op in trace.iter().filter(|op| op.side == Side::Left) {
        word.push(op.gen, -op.sign.as_i64());
    }
    for op in trace.iter().rev().filter(|op| op.side == Side::Right) {
        word.push(op.gen, -op.sign.as_i64());
    }
    word
}

/// [`reconstruct_word`], after replaying `trace` on `m` to confirm that it
/// really ends at the identity.
pub fn reconstruct_word_checked(m: &Mat2, trace: &[ElemOp], k: u64) -> Result<Word> {
    let kb = BigInt::from(k);
    let end = trace
        .iter()
        .fold(m.clone(), |acc, &op| apply_op_big(&acc, op, &kb));
    if !end.is_identity() {
        return Err(Error::Internal(format!(
            "trace ends at [{end}], not at the identity"
        )));
    }
    Ok(reconstruct_word(trace))
}
