//! The family `M(k, m) = [[1 - k²m, k²m], [-k²m, 1 + k²m]]`, `k ≥ 3`, `m ≥ 1`:
//! matrices of the congruence form that nevertheless lie outside the
//! subgroup. Powers of `M(k, 1)` are pairwise in distinct cosets, which is
//! what makes the index infinite.

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::exec::Exec;
use crate::linalg::{op_reduces_some_entry, ElemOp, Mat2};
use crate::membership::{decide_membership, Status};

fn check_params(k: u64, m: u64) -> Result<()> {
    if k < 3 {
        return Err(invalid(format!("witness family needs k >= 3, got {k}")));
    }
    if m < 1 {
        return Err(invalid("witness family needs m >= 1"));
    }
    Ok(())
}

pub fn witness_matrix(k: u64, m: u64) -> Result<Mat2> {
    check_params(k, m)?;
    let t = BigInt::from(k) * BigInt::from(k) * BigInt::from(m);
    Ok(Mat2::new(1 - &t, t.clone(), -&t, 1 + &t))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub k: u64,
    pub m: u64,
    pub matrix: Mat2,
    pub det_ok: bool,
    /// `M(k, 1)^m == M(k, m)`, by repeated multiplication.
    pub power_ok: bool,
    /// No elementary operation shrinks any single `|entry|`.
    pub locally_minimal: bool,
    /// The reduction answers NonMember and is stuck at the input itself.
    pub rejected_by_membership: bool,
    pub reduction_steps: usize,
}

impl WitnessReport {
    pub fn all_ok(&self) -> bool {
        self.det_ok && self.power_ok && self.locally_minimal && self.rejected_by_membership
    }
}

pub fn verify_witness(k: u64, m: u64) -> Result<WitnessReport> {
    let matrix = witness_matrix(k, m)?;
    let det_ok = matrix.is_sl2();

    let base = witness_matrix(k, 1)?;
    let mut power = base.clone();
    for _ in 1..m {
        power = &power * &base;
    }
    let power_ok = power == matrix;

    let kb = BigInt::from(k);
    let locally_minimal = !ElemOp::ALL
        .iter()
        .any(|&op| op_reduces_some_entry(&matrix, op, &kb));

    let verdict = decide_membership(&matrix, k)?;
    let rejected_by_membership =
        verdict.status == Status::NonMember && verdict.stuck.as_ref() == Some(&matrix);

    Ok(WitnessReport {
        k,
        m,
        matrix,
        det_ok,
        power_ok,
        locally_minimal,
        rejected_by_membership,
        reduction_steps: verdict.steps(),
    })
}

/// `verify_witness` over a `ks × ms` grid, in row-major order.
pub fn verify_grid(ks: &[u64], ms: &[u64], exec: Exec) -> Result<Vec<WitnessReport>> {
    let pairs: Vec<(u64, u64)> = ks
        .iter()
        .flat_map(|&k| ms.iter().map(move |&m| (k, m)))
        .collect();
    exec.map(pairs, |(k, m)| verify_witness(k, m))
        .into_iter()
        .collect()
}

/// Desk-scale probe of coset separation: `M(k,a)·M(k,b)⁻¹` must be a
/// non-member for every `a ≠ b` in `1..=max_m`. Exhibits witnesses, proves
/// nothing about the index.
#[derive(Debug, Clone, Serialize)]
pub struct CosetProbe {
    pub label: &'static str,
    pub k: u64,
    pub max_m: u64,
    pub pairs_checked: usize,
    pub failures: Vec<(u64, u64)>,
}

pub fn coset_separation(k: u64, max_m: u64, exec: Exec) -> Result<CosetProbe> {
    check_params(k, max_m.max(1))?;
    let mats: Vec<Mat2> = (1..=max_m)
        .map(|m| witness_matrix(k, m))
        .collect::<Result<_>>()?;
    let pairs: Vec<(u64, u64)> = (1..=max_m)
        .flat_map(|a| (1..=max_m).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    let results = exec.map(pairs.clone(), |(a, b)| {
        let quotient = &mats[a as usize - 1] * &mats[b as usize - 1].adjugate();
        decide_membership(&quotient, k).map(|v| v.status == Status::NonMember)
    });
    let mut failures = Vec::new();
    for (pair, separated) in pairs.iter().zip(results) {
        if !separated? {
            failures.push(*pair);
        }
    }
    Ok(CosetProbe {
        label: "desk-scale coset separation probe (exhibits witnesses, not a proof of infinite index)",
        k,
        max_m,
        pairs_checked: pairs.len(),
        failures,
    })
}
