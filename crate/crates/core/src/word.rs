//! Freely reduced group words over `{A, B}` with integer exponents.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{GenKind, Mat2, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: GenKind,
    pub exp: i64,
}

/// A word such as `A^1 B^-2 A^3`. Adjacent letters always use different
/// generators and no exponent is zero, so every word is freely reduced.
/// The empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn from_letters(letters: impl IntoIterator<Item = (GenKind, i64)>) -> Self {
        let mut w = Word::identity();
        for (gen, exp) in letters {
            w.push(gen, exp);
        }
        w
    }

    /// Append `gen^exp`, merging with the last letter when the generators
    /// match.
    pub fn push(&mut self, gen: GenKind, exp: i64) {
        if exp == 0 {
            return;
        }
        match self.letters.last_mut() {
            Some(last) if last.gen == gen => {
                last.exp += exp;
                if last.exp == 0 {
                    self.letters.pop();
                }
            }
            _ => self.letters.push(Letter { gen, exp }),
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Number of syllables `gen^exp`.
    pub fn syllables(&self) -> usize {
        self.letters.len()
    }

    /// Length over the alphabet `{A, A⁻¹, B, B⁻¹}`, i.e. `Σ |exp|`.
    pub fn letter_len(&self) -> u64 {
        self.letters.iter().map(|l| l.exp.unsigned_abs()).sum()
    }

    /// True when every exponent is positive (a monoid word).
    pub fn is_positive(&self) -> bool {
        self.letters.iter().all(|l| l.exp > 0)
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self
                .letters
                .iter()
                .rev()
                .map(|l| Letter {
                    gen: l.gen,
                    exp: -l.exp,
                })
                .collect(),
        }
    }

    /// Evaluate the word at `A(k)`, `B(k)`.
    pub fn eval(&self, k: u64) -> Mat2 {
        let k = BigInt::from(k);
        self.letters.iter().fold(Mat2::identity(), |acc, l| {
            acc.add_multiple(Side::Right, l.gen, &(&k * l.exp))
        })
    }
}

impl Mul for &Word {
    type Output = Word;

    fn mul(self, rhs: &Word) -> Word {
        let mut out = self.clone();
        for l in &rhs.letters {
            out.push(l.gen, l.exp);
        }
        out
    }
}

/// Exponent notation, `A^1 B^-2`. The identity prints as the empty string.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}^{}", l.gen, l.exp)?;
        }
        Ok(())
    }
}

/// Accepts the exponent notation, plus bare `A`/`B` for exponent 1.
/// Input need not be reduced; the result always is.
impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut w = Word::identity();
        for tok in s.split_whitespace() {
            let (g, exp) = match tok.split_once('^') {
                Some((g, e)) => {
                    let exp = e
                        .parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad exponent in {tok:?}")))?;
                    (g, exp)
                }
                None => (tok, 1),
            };
            let gen = match g {
                "A" => GenKind::A,
                "B" => GenKind::B,
                _ => return Err(Error::Parse(format!("unknown generator in {tok:?}"))),
            };
            w.push(gen, exp);
        }
        Ok(w)
    }
}

impl TryFrom<String> for Word {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Word> for String {
    fn from(w: Word) -> String {
        w.to_string()
    }
}
