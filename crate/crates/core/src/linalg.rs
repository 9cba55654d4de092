//! Exact 2x2 integer matrices, the parabolic generators `A(k)`, `B(k)`, the
//! eight elementary operations and the complexity measure that orders
//! reduction progress.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A 2x2 matrix with arbitrary-precision integer entries, stored row-major.
///
/// The plain constructor accepts any determinant. Everything that answers a
/// membership question checks `det == 1` itself.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MatJson", into = "MatJson")]
pub struct Mat2 {
    e: [BigInt; 4],
}

impl Mat2 {
    pub fn new(
        m11: impl Into<BigInt>,
        m12: impl Into<BigInt>,
        m21: impl Into<BigInt>,
        m22: impl Into<BigInt>,
    ) -> Self {
        Mat2 {
            e: [m11.into(), m12.into(), m21.into(), m22.into()],
        }
    }

    pub fn from_entries(e: [BigInt; 4]) -> Self {
        Mat2 { e }
    }

    /// Build a matrix and require it to lie in SL2(Z).
    pub fn sl2(
        m11: impl Into<BigInt>,
        m12: impl Into<BigInt>,
        m21: impl Into<BigInt>,
        m22: impl Into<BigInt>,
    ) -> Result<Self> {
        let m = Mat2::new(m11, m12, m21, m22);
        m.require_sl2()?;
        Ok(m)
    }

    pub fn identity() -> Self {
        Mat2::new(1, 0, 0, 1)
    }

    pub fn m11(&self) -> &BigInt {
        &self.e[0]
    }
    pub fn m12(&self) -> &BigInt {
        &self.e[1]
    }
    pub fn m21(&self) -> &BigInt {
        &self.e[2]
    }
    pub fn m22(&self) -> &BigInt {
        &self.e[3]
    }

    /// Row-major entries `[m11, m12, m21, m22]`.
    pub fn entries(&self) -> &[BigInt; 4] {
        &self.e
    }

    pub fn into_entries(self) -> [BigInt; 4] {
        self.e
    }

    pub fn det(&self) -> BigInt {
        &self.e[0] * &self.e[3] - &self.e[1] * &self.e[2]
    }

    pub fn is_sl2(&self) -> bool {
        self.det().is_one()
    }

    pub fn require_sl2(&self) -> Result<()> {
        let det = self.det();
        if det.is_one() {
            Ok(())
        } else {
            Err(Error::NotSl2 { det })
        }
    }

    pub fn is_identity(&self) -> bool {
        self.e[0].is_one() && self.e[1].is_zero() && self.e[2].is_zero() && self.e[3].is_one()
    }

    /// Adjugate, which is the inverse whenever `det == 1`.
    pub fn adjugate(&self) -> Mat2 {
        Mat2::new(
            self.e[3].clone(),
            -&self.e[1],
            -&self.e[2],
            self.e[0].clone(),
        )
    }

    /// Inverse of an SL2(Z) matrix.
    pub fn inverse_sl2(&self) -> Result<Mat2> {
        self.require_sl2()?;
        Ok(self.adjugate())
    }

    /// `self^exp` by repeated squaring.
    pub fn pow(&self, mut exp: u64) -> Mat2 {
        let mut base = self.clone();
        let mut acc = Mat2::identity();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Add `factor` times one row or column to the other, as selected by
    /// `side` and `gen`. This is `G·M` or `M·G` with `G = A(factor)` or
    /// `B(factor)`.
    pub(crate) fn add_multiple(&self, side: Side, gen: GenKind, factor: &BigInt) -> Mat2 {
        let [dst0, dst1] = update_slots(side, gen);
        let (a, b) = updated_pair(self, side, gen, factor);
        let mut e = self.e.clone();
        e[dst0] = a;
        e[dst1] = b;
        Mat2 { e }
    }
}

impl Default for Mat2 {
    fn default() -> Self {
        Mat2::identity()
    }
}

/// Entry slots rewritten by the row/column update for `(side, gen)`.
fn update_slots(side: Side, gen: GenKind) -> [usize; 2] {
    match (side, gen) {
        // row1 += f·row2
        (Side::Left, GenKind::A) => [0, 1],
        // row2 += f·row1
        (Side::Left, GenKind::B) => [2, 3],
        // col2 += f·col1
        (Side::Right, GenKind::A) => [1, 3],
        // col1 += f·col2
        (Side::Right, GenKind::B) => [0, 2],
    }
}

/// Source slots feeding each destination slot of `update_slots`.
fn source_slots(side: Side, gen: GenKind) -> [usize; 2] {
    match (side, gen) {
        (Side::Left, GenKind::A) => [2, 3],
        (Side::Left, GenKind::B) => [0, 1],
        (Side::Right, GenKind::A) => [0, 2],
        (Side::Right, GenKind::B) => [1, 3],
    }
}

fn updated_pair(m: &Mat2, side: Side, gen: GenKind, factor: &BigInt) -> (BigInt, BigInt) {
    let [d0, d1] = update_slots(side, gen);
    let [s0, s1] = source_slots(side, gen);
    (
        &m.e[d0] + factor * &m.e[s0],
        &m.e[d1] + factor * &m.e[s1],
    )
}

impl Mul for &Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: &Mat2) -> Mat2 {
        let [a, b, c, d] = &self.e;
        let [p, q, r, s] = &rhs.e;
        Mat2::new(a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        &self * &rhs
    }
}

/// Text form: four whitespace-separated base-10 integers, row-major.
impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.e[0], self.e[1], self.e[2], self.e[3])
    }
}

impl FromStr for Mat2 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let tokens: Vec<&str> = s.split_whitespace().collect();
        if tokens.len() != 4 {
            return Err(Error::Parse(format!(
                "expected 4 integers \"m11 m12 m21 m22\", found {} token(s)",
                tokens.len()
            )));
        }
        let mut e: [BigInt; 4] = Default::default();
        for (slot, tok) in e.iter_mut().zip(&tokens) {
            *slot = parse_int(tok)?;
        }
        Ok(Mat2 { e })
    }
}

pub(crate) fn parse_int(tok: &str) -> Result<BigInt> {
    BigInt::from_str(tok).map_err(|_| Error::Parse(format!("not an integer: {tok:?}")))
}

// JSON: {"m": [["m11","m12"],["m21","m22"]]}. Integers are accepted on input
// as long as they are exact.
#[derive(Serialize, Deserialize)]
struct MatJson {
    m: [[JsonInt; 2]; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonInt {
    Str(String),
    Num(serde_json::Number),
}

impl TryFrom<MatJson> for Mat2 {
    type Error = Error;

    fn try_from(j: MatJson) -> Result<Self> {
        let [[a, b], [c, d]] = j.m;
        let conv = |v: JsonInt| match v {
            JsonInt::Str(s) => parse_int(s.trim()),
            JsonInt::Num(n) => parse_int(&n.to_string()),
        };
        Ok(Mat2 {
            e: [conv(a)?, conv(b)?, conv(c)?, conv(d)?],
        })
    }
}

impl From<Mat2> for MatJson {
    fn from(m: Mat2) -> Self {
        let [a, b, c, d] = m.e.map(|x| JsonInt::Str(x.to_string()));
        MatJson { m: [[a, b], [c, d]] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GenKind {
    A,
    B,
}

impl GenKind {
    pub fn other(self) -> GenKind {
        match self {
            GenKind::A => GenKind::B,
            GenKind::B => GenKind::A,
        }
    }
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GenKind::A => "A",
            GenKind::B => "B",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn negate(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Minus => -1,
            Sign::Plus => 1,
        }
    }
}

/// Multiplication by `A(k)^±1` or `B(k)^±1` on the left or on the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ElemOp {
    pub side: Side,
    pub gen: GenKind,
    pub sign: Sign,
}

impl ElemOp {
    pub const fn new(side: Side, gen: GenKind, sign: Sign) -> Self {
        ElemOp { side, gen, sign }
    }

    /// All eight operations in tie-break order: right before left, `A`
    /// before `B`, `-1` before `+1`.
    pub const ALL: [ElemOp; 8] = [
        ElemOp::new(Side::Right, GenKind::A, Sign::Minus),
        ElemOp::new(Side::Right, GenKind::A, Sign::Plus),
        ElemOp::new(Side::Right, GenKind::B, Sign::Minus),
        ElemOp::new(Side::Right, GenKind::B, Sign::Plus),
        ElemOp::new(Side::Left, GenKind::A, Sign::Minus),
        ElemOp::new(Side::Left, GenKind::A, Sign::Plus),
        ElemOp::new(Side::Left, GenKind::B, Sign::Minus),
        ElemOp::new(Side::Left, GenKind::B, Sign::Plus),
    ];

    /// The four inverse-generator operations used for monoid reduction, in
    /// the same relative order as [`ElemOp::ALL`].
    pub const INVERSES: [ElemOp; 4] = [
        ElemOp::new(Side::Right, GenKind::A, Sign::Minus),
        ElemOp::new(Side::Right, GenKind::B, Sign::Minus),
        ElemOp::new(Side::Left, GenKind::A, Sign::Minus),
        ElemOp::new(Side::Left, GenKind::B, Sign::Minus),
    ];

    pub fn inverse(self) -> ElemOp {
        ElemOp {
            sign: self.sign.negate(),
            ..self
        }
    }
}

impl fmt::Display for ElemOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.side {
            Side::Left => 'L',
            Side::Right => 'R',
        };
        write!(f, "{side} {}^{}", self.gen, self.sign.as_i64())
    }
}

/// `(max |m_ij|, Σ |m_ij|)`, ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Complexity {
    pub max_abs: BigUint,
    pub sum_abs: BigUint,
}

impl fmt::Display for Complexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.max_abs, self.sum_abs)
    }
}

pub fn complexity_of(m: &Mat2) -> Complexity {
    complexity_of_entries(m.e.iter())
}

fn complexity_of_entries<'a>(entries: impl Iterator<Item = &'a BigInt>) -> Complexity {
    let mut max_abs = BigUint::zero();
    let mut sum_abs = BigUint::zero();
    for x in entries {
        let mag = x.magnitude();
        sum_abs += mag;
        if mag.cmp(&max_abs) == Ordering::Greater {
            max_abs = mag.clone();
        }
    }
    Complexity { max_abs, sum_abs }
}

/// `A(k) = [[1,k],[0,1]]` or `B(k) = [[1,0],[k,1]]`.
pub fn generator(kind: GenKind, k: u64) -> Result<Mat2> {
    if k == 0 {
        return Err(invalid("generator parameter k must be positive"));
    }
    Ok(generator_power(kind, &BigInt::from(k)))
}

/// `A(t)` or `B(t)` for an arbitrary integer `t`; `A(k)^e = A(e·k)`.
pub fn generator_power(kind: GenKind, t: &BigInt) -> Mat2 {
    match kind {
        GenKind::A => Mat2::new(1, t.clone(), 0, 1),
        GenKind::B => Mat2::new(1, 0, t.clone(), 1),
    }
}

pub fn mat_mul(lhs: &Mat2, rhs: &Mat2) -> Mat2 {
    lhs * rhs
}

/// Apply an elementary operation as a row (left) or column (right) update.
pub fn apply_op(m: &Mat2, op: ElemOp, k: u64) -> Mat2 {
    apply_op_big(m, op, &BigInt::from(k))
}

pub(crate) fn apply_op_big(m: &Mat2, op: ElemOp, k: &BigInt) -> Mat2 {
    let factor = match op.sign {
        Sign::Plus => k.clone(),
        Sign::Minus => -k,
    };
    m.add_multiple(op.side, op.gen, &factor)
}

/// Complexity of `apply_op(m, op, k)`, given `k·x` precomputed for both
/// source entries. Avoids materialising the candidate matrix.
pub(crate) fn candidate_complexity(m: &Mat2, op: ElemOp, scaled_sources: &[BigInt; 2]) -> Complexity {
    let [d0, d1] = update_slots(op.side, op.gen);
    let (a, b) = match op.sign {
        Sign::Plus => (&m.e[d0] + &scaled_sources[0], &m.e[d1] + &scaled_sources[1]),
        Sign::Minus => (&m.e[d0] - &scaled_sources[0], &m.e[d1] - &scaled_sources[1]),
    };
    let untouched = (0..4).filter(|&i| i != d0 && i != d1).map(|i| &m.e[i]);
    complexity_of_entries(untouched.chain([&a, &b]))
}

/// `k` times each source entry feeding the `(side, gen)` update.
pub(crate) fn scaled_sources(m: &Mat2, side: Side, gen: GenKind, k: &BigInt) -> [BigInt; 2] {
    let [s0, s1] = source_slots(side, gen);
    [k * &m.e[s0], k * &m.e[s1]]
}

/// True if `op` shrinks the absolute value of at least one entry.
pub(crate) fn op_reduces_some_entry(m: &Mat2, op: ElemOp, k: &BigInt) -> bool {
    let next = apply_op_big(m, op, k);
    m.e.iter()
        .zip(next.e.iter())
        .any(|(before, after)| after.abs() < before.abs())
}
