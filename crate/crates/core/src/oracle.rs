//! Brute-force ground truth: enumerate every freely reduced word up to a
//! length cap, evaluate it, and index the resulting matrices. Also the
//! exhaustive det-1 box scan used to check the mod-4 characterisation at
//! `k = 2`.
//!
//! Nothing here calls into the reduction algorithm except the explicit
//! agreement checks, which compare the two.

use std::io::{self, Write};

use indexmap::map::Entry;
use indexmap::IndexMap;
use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::exec::Exec;
use crate::linalg::{GenKind, Mat2, Side, Sign};
use crate::membership::{congruence_precheck, decide_membership, sanov_check, Status};
use crate::word::Word;

pub const DEFAULT_MAX_LEN_CAP: usize = 12;

const ALPHABET: [(GenKind, Sign); 4] = [
    (GenKind::A, Sign::Plus),
    (GenKind::A, Sign::Minus),
    (GenKind::B, Sign::Plus),
    (GenKind::B, Sign::Minus),
];

/// Every freely reduced word of length `≤ max_len`, keyed by its matrix.
/// Entries appear in enumeration order. Words that land on an already-seen
/// matrix are kept in `collisions` together with the first word.
#[derive(Debug, Clone)]
pub struct WordTable {
    pub k: u64,
    pub max_len: usize,
    entries: IndexMap<Mat2, Word>,
    collisions: Vec<(Word, Word)>,
}

impl WordTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mat2, &Word)> {
        self.entries.iter()
    }

    pub fn get(&self, m: &Mat2) -> Option<&Word> {
        self.entries.get(m)
    }

    pub fn collisions(&self) -> &[(Word, Word)] {
        &self.collisions
    }

    /// One line per entry: `word<TAB>m11 m12 m21 m22`.
    pub fn write_dump(&self, mut out: impl Write) -> io::Result<()> {
        for (m, w) in &self.entries {
            writeln!(out, "{w}\t{m}")?;
        }
        Ok(())
    }
}

/// Depth-first walk below `path`, one generator multiplication per edge.
fn walk(
    k: &BigInt,
    mat: &Mat2,
    path: &mut Vec<(GenKind, Sign)>,
    remaining: usize,
    out: &mut Vec<(Mat2, Word)>,
) {
    out.push((
        mat.clone(),
        Word::from_letters(path.iter().map(|&(g, s)| (g, s.as_i64()))),
    ));
    if remaining == 0 {
        return;
    }
    let last = path.last().copied();
    for (gen, sign) in ALPHABET {
        if last == Some((gen, sign.negate())) {
            continue;
        }
        let factor = match sign {
            Sign::Plus => k.clone(),
            Sign::Minus => -k,
        };
        let next = mat.add_multiple(Side::Right, gen, &factor);
        path.push((gen, sign));
        walk(k, &next, path, remaining - 1, out);
        path.pop();
    }
}

pub fn enumerate_words(k: u64, max_len: usize) -> Result<WordTable> {
    enumerate_words_with(k, max_len, DEFAULT_MAX_LEN_CAP, Exec::default())
}

/// Enumerate with an explicit length cap and execution strategy. The four
/// one-letter prefixes are walked independently and merged in order.
pub fn enumerate_words_with(k: u64, max_len: usize, cap: usize, exec: Exec) -> Result<WordTable> {
    if k == 0 {
        return Err(invalid("k must be positive"));
    }
    if max_len > cap {
        return Err(invalid(format!(
            "max_len {max_len} exceeds the enumeration cap {cap}"
        )));
    }
    let kb = BigInt::from(k);
    let blocks = if max_len == 0 {
        Vec::new()
    } else {
        exec.map(ALPHABET.to_vec(), |(gen, sign)| {
            let factor = match sign {
                Sign::Plus => kb.clone(),
                Sign::Minus => -&kb,
            };
            let start = Mat2::identity().add_multiple(Side::Right, gen, &factor);
            let mut out = Vec::new();
            walk(&kb, &start, &mut vec![(gen, sign)], max_len - 1, &mut out);
            out
        })
    };

    let mut entries = IndexMap::new();
    let mut collisions = Vec::new();
    entries.insert(Mat2::identity(), Word::identity());
    for (m, w) in blocks.into_iter().flatten() {
        match entries.entry(m) {
            Entry::Occupied(e) => collisions.push((e.get().clone(), w)),
            Entry::Vacant(e) => {
                e.insert(w);
            }
        }
    }
    Ok(WordTable {
        k,
        max_len,
        entries,
        collisions,
    })
}

/// Table lookup: the word of `m` if it is a product of at most
/// `table.max_len` generator letters.
pub fn brute_membership<'t>(m: &Mat2, table: &'t WordTable) -> Option<&'t Word> {
    table.get(m)
}

/// Two distinct freely reduced words of length `≤ max_len` with the same
/// matrix, searching length by length so short relations are found early.
pub fn find_collision(k: u64, max_len: usize) -> Result<Option<(Word, Word)>> {
    find_collision_with(k, max_len, DEFAULT_MAX_LEN_CAP, Exec::default())
}

pub fn find_collision_with(
    k: u64,
    max_len: usize,
    cap: usize,
    exec: Exec,
) -> Result<Option<(Word, Word)>> {
    if max_len > cap {
        return Err(invalid(format!(
            "max_len {max_len} exceeds the enumeration cap {cap}"
        )));
    }
    for len in 0..=max_len {
        let table = enumerate_words_with(k, len, cap, exec)?;
        if let Some(pair) = table.collisions.into_iter().next() {
            return Ok(Some(pair));
        }
    }
    Ok(None)
}

/// Consistency of a word table against direct evaluation, the congruence
/// form and the reduction algorithm.
#[derive(Debug, Clone, Default, Serialize)]
pub struct OracleReport {
    pub k: u64,
    pub max_len: usize,
    pub entries: usize,
    pub collisions: usize,
    pub first_collision: Option<(String, String)>,
    /// Entries whose word, re-multiplied from scratch, gives another matrix.
    pub eval_mismatches: usize,
    /// Entries failing the congruence precheck (`k ≥ 2` only).
    pub precheck_failures: usize,
    /// Entries for which the reduction did not return the table's word
    /// (`k ≥ 2` only).
    pub agreement_checked: usize,
    pub agreement_failures: Vec<String>,
}

impl OracleReport {
    pub fn is_consistent(&self) -> bool {
        let freeness_ok = self.k < 2 || self.collisions == 0;
        freeness_ok
            && self.eval_mismatches == 0
            && self.precheck_failures == 0
            && self.agreement_failures.is_empty()
    }
}

pub fn check_table(table: &WordTable, exec: Exec) -> OracleReport {
    let k = table.k;
    let items: Vec<(&Mat2, &Word)> = table.iter().collect();
    // (eval ok, precheck ok, agreement failure)
    let per_entry = exec.map(items, |(m, w)| {
        let eval_ok = &w.eval(k) == m;
        if k < 2 {
            return (eval_ok, true, None);
        }
        let pre_ok = congruence_precheck(m, k).unwrap_or(false);
        let failure = match decide_membership(m, k) {
            Ok(v) if v.status == Status::Member && v.word.as_ref() == Some(w) => None,
            Ok(v) => Some(format!(
                "{w} -> {} {}",
                v.status,
                v.word.map(|w| w.to_string()).unwrap_or_default()
            )),
            Err(e) => Some(format!("{w} -> error: {e}")),
        };
        (eval_ok, pre_ok, failure)
    });

    let mut report = OracleReport {
        k,
        max_len: table.max_len,
        entries: table.len(),
        collisions: table.collisions.len(),
        first_collision: table
            .collisions
            .first()
            .map(|(a, b)| (a.to_string(), b.to_string())),
        agreement_checked: if k >= 2 { table.len() } else { 0 },
        ..Default::default()
    };
    for (eval_ok, pre_ok, failure) in per_entry {
        report.eval_mismatches += usize::from(!eval_ok);
        report.precheck_failures += usize::from(!pre_ok);
        report.agreement_failures.extend(failure);
    }
    report
}

/// Every det-1 integer matrix with all `|entries| ≤ bound`, grouped by `m11`.
pub fn det_one_box(bound: i64, exec: Exec) -> Vec<[i64; 4]> {
    let side = (2 * bound + 1) as usize;
    exec.map_range(side, |i| {
        let a = i as i64 - bound;
        let mut out = Vec::new();
        for b in -bound..=bound {
            for c in -bound..=bound {
                let num = 1 + b * c;
                if a == 0 {
                    if num == 0 {
                        out.extend((-bound..=bound).map(|d| [a, b, c, d]));
                    }
                } else if num % a == 0 && (num / a).abs() <= bound {
                    out.push([a, b, c, num / a]);
                }
            }
        }
        out
    })
    .into_iter()
    .flatten()
    .collect()
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct BoxScan {
    pub bound: i64,
    pub det_one: usize,
    pub in_form: usize,
    pub members: usize,
    /// Matrices where the reduction verdict disagrees with the mod-4 test.
    pub mismatches: Vec<String>,
}

/// Run the `k = 2` reduction on every det-1 matrix in the box and compare it
/// with the mod-4/mod-2 characterisation.
pub fn sanov_box_scan(bound: i64, exec: Exec) -> BoxScan {
    let mats = det_one_box(bound, exec);
    let results = exec.map(mats, |[a, b, c, d]| {
        let m = Mat2::new(a, b, c, d);
        let in_form = sanov_check(&m, true);
        let verdict = decide_membership(&m, 2);
        let member = matches!(&verdict, Ok(v) if v.is_member());
        let agrees = match &verdict {
            Ok(v) if in_form => v.is_member() && v.word.as_ref().is_some_and(|w| w.eval(2) == m),
            Ok(v) => matches!(v.status, Status::NonMember | Status::BadForm),
            Err(_) => false,
        };
        (in_form, member, (!agrees).then(|| m.to_string()))
    });
    let mut scan = BoxScan {
        bound,
        det_one: results.len(),
        ..Default::default()
    };
    for (in_form, member, mismatch) in results {
        scan.in_form += usize::from(in_form);
        scan.members += usize::from(member);
        scan.mismatches.extend(mismatch);
    }
    scan
}
