//! Seeded instance generators and the step/time measurement harness.
//!
//! Every trial draws from its own PRNG stream derived from the master seed
//! and the trial's position, so rows are reproducible whatever the execution
//! strategy. Only `elapsed` varies between runs.

use std::io::{self, BufRead, Write};
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exec::Exec;
use crate::linalg::{complexity_of, GenKind, Mat2, Side, Sign};
use crate::membership::{decide_membership, Status};
use crate::rng::{SplitMix64, PRNG_NAME};
use crate::word::Word;

pub const CSV_HEADER: &str = "n,steps,elapsed_us,verdict";

/// Cap on letters drawn by [`gen_random_sl2`] before it gives up growing.
const RANDOM_WALK_MAX_LETTERS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchMode {
    /// Random freely reduced words in `A(k)^±1`, `B(k)^±1`; sizes are word
    /// lengths. Every instance is a member.
    PositiveWords,
    /// Random det-1 matrices from a walk in `A(1)^±1`, `B(1)^±1`; sizes are
    /// bounds on `Σ |m_ij|`.
    RandomSl2,
}

impl std::str::FromStr for BenchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positive-words" | "positive" => Ok(BenchMode::PositiveWords),
            "random-sl2" | "random" => Ok(BenchMode::RandomSl2),
            _ => Err(Error::Parse(format!(
                "unknown bench mode {s:?} (expected positive-words or random-sl2)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub k: u64,
    pub mode: BenchMode,
    pub sizes: Vec<u64>,
    pub trials_per_size: u32,
    pub seed: u64,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(invalid(format!("k must be at least 2, got {}", self.k)));
        }
        if self.sizes.is_empty() {
            return Err(invalid("sizes must be nonempty"));
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("sizes must be strictly increasing"));
        }
        if self.trials_per_size == 0 {
            return Err(invalid("trials_per_size must be at least 1"));
        }
        match self.mode {
            BenchMode::PositiveWords if self.sizes[0] == 0 => {
                Err(invalid("word lengths must be at least 1"))
            }
            BenchMode::RandomSl2 if self.sizes[0] < 2 => {
                Err(invalid("norm bounds must be at least 2"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRow {
    /// Word length or norm bound this row was generated for.
    pub size: u64,
    pub trial: u32,
    /// `Σ |m_ij|` of the instance.
    pub n: BigUint,
    pub steps: usize,
    pub elapsed_ns: u64,
    pub verdict: Status,
    /// PositiveWords only: whether the recovered word is the generating one.
    pub word_matches: Option<bool>,
}

impl BenchRow {
    pub fn elapsed_us(&self) -> f64 {
        self.elapsed_ns as f64 / 1000.0
    }

    /// `n,steps,elapsed_us,verdict`, with `elapsed_us` to nanosecond
    /// resolution.
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{}.{:03},{}",
            self.n,
            self.steps,
            self.elapsed_ns / 1000,
            self.elapsed_ns % 1000,
            self.verdict
        )
    }
}

fn signed(sign: Sign, k: &BigInt) -> BigInt {
    match sign {
        Sign::Plus => k.clone(),
        Sign::Minus => -k,
    }
}

const LETTERS: [(GenKind, Sign); 4] = [
    (GenKind::A, Sign::Plus),
    (GenKind::A, Sign::Minus),
    (GenKind::B, Sign::Plus),
    (GenKind::B, Sign::Minus),
];

/// Next letter of a freely reduced random word: uniform over all four at
/// the start, over the three that do not cancel `prev` afterwards.
fn next_letter(prev: Option<(GenKind, Sign)>, rng: &mut SplitMix64) -> (GenKind, Sign) {
    match prev {
        None => LETTERS[rng.below(4) as usize],
        Some((g, s)) => {
            let allowed: Vec<(GenKind, Sign)> = LETTERS
                .into_iter()
                .filter(|&l| l != (g, s.negate()))
                .collect();
            allowed[rng.below(3) as usize]
        }
    }
}

/// A uniformly random freely reduced word of `length` letters and its
/// matrix at `k`.
pub fn gen_positive(k: u64, length: u64, rng: &mut SplitMix64) -> Result<(Mat2, Word)> {
    if length == 0 {
        return Err(invalid("word length must be at least 1"));
    }
    let kb = BigInt::from(k);
    let mut mat = Mat2::identity();
    let mut word = Word::identity();
    let mut prev = None;
    for _ in 0..length {
        let (g, s) = next_letter(prev, rng);
        mat = mat.add_multiple(Side::Right, g, &signed(s, &kb));
        word.push(g, s.as_i64());
        prev = Some((g, s));
    }
    Ok((mat, word))
}

/// A random monoid word: `length` letters drawn uniformly from `{A, B}`,
/// all with positive exponent.
pub fn gen_monoid(k: u64, length: u64, rng: &mut SplitMix64) -> (Mat2, Word) {
    let kb = BigInt::from(k);
    let mut mat = Mat2::identity();
    let mut word = Word::identity();
    for _ in 0..length {
        let g = if rng.below(2) == 0 { GenKind::A } else { GenKind::B };
        mat = mat.add_multiple(Side::Right, g, &kb);
        word.push(g, 1);
    }
    (mat, word)
}

/// A random det-1 matrix with `Σ |m_ij| ≤ bound`.
///
/// Distribution: start at `I` and extend a freely reduced random word in
/// `A(1)^±1`, `B(1)^±1` (letters drawn as in [`gen_positive`]); the walk
/// stops at the first drawn letter that would push `Σ |m_ij|` past `bound`
/// and returns the matrix reached so far. Not uniform on the norm ball.
pub fn gen_random_sl2(bound: u64, rng: &mut SplitMix64) -> Result<Mat2> {
    if bound < 2 {
        return Err(invalid(format!(
            "bound {bound} admits no det-1 matrix (need at least 2)"
        )));
    }
    let one = BigInt::from(1);
    let limit = BigUint::from(bound);
    let mut mat = Mat2::identity();
    let mut prev = None;
    for _ in 0..RANDOM_WALK_MAX_LETTERS {
        let (g, s) = next_letter(prev, rng);
        let cand = mat.add_multiple(Side::Right, g, &signed(s, &one));
        if complexity_of(&cand).sum_abs > limit {
            break;
        }
        mat = cand;
        prev = Some((g, s));
    }
    Ok(mat)
}

/// PRNG stream for trial `trial` of size index `size_idx`.
pub fn trial_rng(seed: u64, size_idx: usize, trial: u32) -> SplitMix64 {
    SplitMix64::stream(seed, ((size_idx as u64) << 32) | u64::from(trial))
}

fn run_trial(config: &BenchConfig, size_idx: usize, trial: u32) -> Result<BenchRow> {
    let size = config.sizes[size_idx];
    let mut rng = trial_rng(config.seed, size_idx, trial);
    let (mat, word) = match config.mode {
        BenchMode::PositiveWords => {
            let (m, w) = gen_positive(config.k, size, &mut rng)?;
            (m, Some(w))
        }
        BenchMode::RandomSl2 => (gen_random_sl2(size, &mut rng)?, None),
    };
    let n = complexity_of(&mat).sum_abs;
    let start = Instant::now();
    let verdict = decide_membership(&mat, config.k)?;
    let elapsed_ns = start.elapsed().as_nanos().min(u128::from(u64::MAX)) as u64;
    Ok(BenchRow {
        size,
        trial,
        n,
        steps: verdict.steps(),
        elapsed_ns,
        verdict: verdict.status,
        word_matches: word.map(|w| verdict.word.as_ref() == Some(&w)),
    })
}

pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    run_bench_with(config, Exec::default(), |row| rows.push(row))?;
    Ok(rows)
}

/// Run every `size × trial`, handing rows to `emit` in generation order
/// (size-major). Trials of one size may run concurrently.
pub fn run_bench_with(
    config: &BenchConfig,
    exec: Exec,
    mut emit: impl FnMut(BenchRow),
) -> Result<()> {
    config.validate()?;
    for size_idx in 0..config.sizes.len() {
        let rows = exec.map_range(config.trials_per_size as usize, |t| {
            run_trial(config, size_idx, t as u32)
        });
        for row in rows {
            emit(row?);
        }
    }
    Ok(())
}

pub fn write_csv(rows: &[BenchRow], mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.csv_line())?;
    }
    Ok(())
}

/// Sidecar written next to the CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchMetadata {
    pub config: BenchConfig,
    pub prng: String,
    pub stream_derivation: String,
    pub distribution: String,
    pub csv_columns: String,
    pub code_version: String,
}

impl BenchMetadata {
    pub fn new(config: &BenchConfig) -> Self {
        let distribution = match config.mode {
            BenchMode::PositiveWords => {
                "uniform freely reduced word of the given letter length in A(k)^±1, B(k)^±1"
            }
            BenchMode::RandomSl2 => {
                "freely reduced random walk in A(1)^±1, B(1)^±1 from I, stopped at the first \
                 letter that would exceed the bound on sum |m_ij|; not uniform"
            }
        };
        BenchMetadata {
            config: config.clone(),
            prng: PRNG_NAME.to_string(),
            stream_derivation: "trial stream = splitmix64(mix(seed ^ mix(((size_index << 32) | trial) + 0x9E3779B97F4A7C15)))"
                .to_string(),
            distribution: distribution.to_string(),
            csv_columns: CSV_HEADER.to_string(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// `log2` of an arbitrarily large integer (`-inf` for zero).
pub fn log2_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 64 {
        return n.to_u64().map_or(f64::NEG_INFINITY, |x| (x as f64).log2());
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().unwrap_or(u64::MAX);
    (top as f64).log2() + shift as f64
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Least-squares slope of `ys` against `xs`; `None` if `xs` is constant.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone, Serialize)]
pub struct SizeSummary {
    pub size: u64,
    pub trials: usize,
    pub median_steps: f64,
    pub max_steps: usize,
    pub median_log2_n: f64,
    pub median_elapsed_us: f64,
    pub member_fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchSummary {
    pub per_size: Vec<SizeSummary>,
    /// Slope of `log elapsed` against `log n` over all rows with nonzero
    /// elapsed time and `n > 0`.
    pub loglog_slope: Option<f64>,
    /// Slope of `steps` against `log2 n`.
    pub steps_per_log2_n: Option<f64>,
}

pub fn summarize(rows: &[BenchRow]) -> BenchSummary {
    let mut sizes: Vec<u64> = rows.iter().map(|r| r.size).collect();
    sizes.dedup();
    let per_size = sizes
        .iter()
        .map(|&size| {
            let group: Vec<&BenchRow> = rows.iter().filter(|r| r.size == size).collect();
            let members = group.iter().filter(|r| r.verdict == Status::Member).count();
            SizeSummary {
                size,
                trials: group.len(),
                median_steps: median(&mut group.iter().map(|r| r.steps as f64).collect::<Vec<_>>()),
                max_steps: group.iter().map(|r| r.steps).max().unwrap_or(0),
                median_log2_n: median(&mut group.iter().map(|r| log2_big(&r.n)).collect::<Vec<_>>()),
                median_elapsed_us: median(&mut group.iter().map(|r| r.elapsed_us()).collect::<Vec<_>>()),
                member_fraction: members as f64 / group.len().max(1) as f64,
            }
        })
        .collect();

    let timed: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.elapsed_ns > 0 && r.n.bits() > 0)
        .map(|r| (log2_big(&r.n), (r.elapsed_ns as f64).log2()))
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = timed.into_iter().unzip();
    let (lx, st): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .map(|r| (log2_big(&r.n), r.steps as f64))
        .unzip();
    BenchSummary {
        per_size,
        loglog_slope: fit_slope(&xs, &ys),
        steps_per_log2_n: fit_slope(&lx, &st),
    }
}

/// Read rows back from a CSV produced by [`write_csv`]. Sizes and trial
/// numbers are recovered from the config, since rows are size-major.
pub fn read_csv(input: impl BufRead, config: &BenchConfig) -> Result<Vec<BenchRow>> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .transpose()
        .map_err(|e| Error::Parse(e.to_string()))?
        .unwrap_or_default();
    if header.trim() != CSV_HEADER {
        return Err(Error::Parse(format!("unexpected CSV header {header:?}")));
    }
    let per = config.trials_per_size as usize;
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        let [n, steps, elapsed, verdict] = fields[..] else {
            return Err(Error::Parse(format!("bad CSV row {}: {line:?}", i + 2)));
        };
        let bad = || Error::Parse(format!("bad CSV row {}: {line:?}", i + 2));
        let size = *config.sizes.get(i / per.max(1)).ok_or_else(bad)?;
        let elapsed_us: f64 = elapsed.parse().map_err(|_| bad())?;
        rows.push(BenchRow {
            size,
            trial: (i % per.max(1)) as u32,
            n: n.parse().map_err(|_| bad())?,
            steps: steps.parse().map_err(|_| bad())?,
            elapsed_ns: (elapsed_us * 1000.0).round() as u64,
            verdict: match verdict {
                "Member" => Status::Member,
                "NonMember" => Status::NonMember,
                "NotSL2" => Status::NotSl2,
                "BadForm" => Status::BadForm,
                _ => return Err(bad()),
            },
            word_matches: None,
        });
    }
    Ok(rows)
}
