//! Bit-parallel truth tables and window simulation.
//!
//! Row `r` of a table over `n` variables is bit `r` of the packed words,
//! LSB first; variable `i` is bit `i` of the row index, so variable 0
//! toggles fastest. Hex rendering puts row 0 in the least significant bit of
//! the last hex digit.

use crate::xag::{Network, NodeId, NodeKind, Signal};
use rustc_hash::FxHashMap;
use smallvec::{smallvec, SmallVec};
use std::fmt;
use thiserror::Error;

pub const MAX_VARS: usize = 16;

const VAR_MASKS: [u64; 6] = [
    0xaaaa_aaaa_aaaa_aaaa,
    0xcccc_cccc_cccc_cccc,
    0xf0f0_f0f0_f0f0_f0f0,
    0xff00_ff00_ff00_ff00,
    0xffff_0000_ffff_0000,
    0xffff_ffff_0000_0000,
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TtError {
    #[error("{0} variables exceeds the limit of {MAX_VARS}")]
    TooManyVars(usize),
    #[error("variable {var} out of range for a {num_vars}-variable table")]
    VarOutOfRange { var: usize, num_vars: usize },
    #[error("tables have different widths ({0} vs {1} variables)")]
    WidthMismatch(usize, usize),
    #[error("operator {0:?} needs {1} operand(s)")]
    Arity(TtOp, usize),
    #[error("node {0} has a fanin outside the window")]
    DanglingFanin(NodeId),
    #[error("invalid table literal: {0}")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TtOp {
    And,
    Xor,
    Not,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable {
    num_vars: u8,
    words: SmallVec<[u64; 4]>,
}

#[inline]
pub fn num_words(num_vars: usize) -> usize {
    if num_vars <= 6 {
        1
    } else {
        1 << (num_vars - 6)
    }
}

#[inline]
fn tail_mask(num_vars: usize) -> u64 {
    if num_vars >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << num_vars)) - 1
    }
}

impl TruthTable {
    pub fn constant(num_vars: usize, value: bool) -> Result<Self, TtError> {
        if num_vars > MAX_VARS {
            return Err(TtError::TooManyVars(num_vars));
        }
        let w = if value { tail_mask(num_vars) } else { 0 };
        Ok(TruthTable {
            num_vars: num_vars as u8,
            words: smallvec![w; num_words(num_vars)],
        })
    }

    pub fn zero(num_vars: usize) -> Self {
        Self::constant(num_vars, false).expect("width checked by caller")
    }

    /// Projection onto variable `var`.
    pub fn var(num_vars: usize, var: usize) -> Result<Self, TtError> {
        if num_vars > MAX_VARS {
            return Err(TtError::TooManyVars(num_vars));
        }
        if var >= num_vars {
            return Err(TtError::VarOutOfRange { var, num_vars });
        }
        let mut t = Self::zero(num_vars);
        if var < 6 {
            let m = VAR_MASKS[var] & tail_mask(num_vars);
            t.words.iter_mut().for_each(|w| *w = m);
        } else {
            let period = 1 << (var - 6);
            for (i, w) in t.words.iter_mut().enumerate() {
                if (i / period) % 2 == 1 {
                    *w = u64::MAX;
                }
            }
        }
        Ok(t)
    }

    /// Builds a table from raw words; padding bits are cleared.
    pub fn from_words(num_vars: usize, words: &[u64]) -> Result<Self, TtError> {
        if num_vars > MAX_VARS {
            return Err(TtError::TooManyVars(num_vars));
        }
        if words.len() != num_words(num_vars) {
            return Err(TtError::Parse(format!(
                "expected {} words, got {}",
                num_words(num_vars),
                words.len()
            )));
        }
        let mut words: SmallVec<[u64; 4]> = SmallVec::from_slice(words);
        words[0] &= tail_mask(num_vars);
        Ok(TruthTable {
            num_vars: num_vars as u8,
            words,
        })
    }

    /// Parses a row-ordered bit string such as `"0001"` (row 0 first).
    pub fn from_rows(bits: &str) -> Result<Self, TtError> {
        let len = bits.len();
        if !len.is_power_of_two() {
            return Err(TtError::Parse(bits.to_string()));
        }
        let n = len.trailing_zeros() as usize;
        let mut t = Self::constant(n, false)?;
        for (row, ch) in bits.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => t.set_bit(row, true),
                _ => return Err(TtError::Parse(bits.to_string())),
            }
        }
        Ok(t)
    }

    /// Row-ordered bit string, row 0 first.
    pub fn to_rows(&self) -> String {
        (0..self.num_rows()).map(|r| if self.bit(r) { '1' } else { '0' }).collect()
    }

    pub fn from_hex(num_vars: usize, hex: &str) -> Result<Self, TtError> {
        let hex = hex.trim_start_matches("0x");
        let mut t = Self::constant(num_vars, false)?;
        let digits = (t.num_rows() / 4).max(1);
        if hex.len() != digits {
            return Err(TtError::Parse(hex.to_string()));
        }
        for (i, ch) in hex.chars().rev().enumerate() {
            let d = ch.to_digit(16).ok_or_else(|| TtError::Parse(hex.to_string()))? as u64;
            t.words[i / 16] |= d << ((i % 16) * 4);
        }
        if t.words[0] & !tail_mask(num_vars) != 0 {
            return Err(TtError::Parse(hex.to_string()));
        }
        Ok(t)
    }

    pub fn to_hex(&self) -> String {
        let digits = (self.num_rows() / 4).max(1);
        (0..digits)
            .rev()
            .map(|i| {
                let d = (self.words[i / 16] >> ((i % 16) * 4)) & 0xf;
                char::from_digit(d as u32, 16).unwrap()
            })
            .collect()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars as usize
    }

    pub fn num_rows(&self) -> usize {
        1 << self.num_vars
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn bit(&self, row: usize) -> bool {
        (self.words[row / 64] >> (row % 64)) & 1 == 1
    }

    pub fn set_bit(&mut self, row: usize, value: bool) {
        let m = 1u64 << (row % 64);
        if value {
            self.words[row / 64] |= m;
        } else {
            self.words[row / 64] &= !m;
        }
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_const0(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_const1(&self) -> bool {
        let m = tail_mask(self.num_vars());
        self.words.iter().all(|&w| w == m)
    }

    fn check_width(&self, other: &Self) -> Result<(), TtError> {
        if self.num_vars != other.num_vars {
            Err(TtError::WidthMismatch(self.num_vars(), other.num_vars()))
        } else {
            Ok(())
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.num_vars, other.num_vars, "truth table width mismatch");
        let mut t = TruthTable {
            num_vars: self.num_vars,
            words: SmallVec::from_slice(&self.words),
        };
        for (a, &b) in t.words.iter_mut().zip(&other.words) {
            *a = f(*a, b);
        }
        t
    }

    pub fn and(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a | b)
    }

    pub fn xor(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a ^ b)
    }

    pub fn not(&self) -> Self {
        let m = tail_mask(self.num_vars());
        let mut t = TruthTable {
            num_vars: self.num_vars,
            words: SmallVec::from_slice(&self.words),
        };
        for w in t.words.iter_mut() {
            *w = !*w & m;
        }
        t
    }

    pub fn complement_if(&self, c: bool) -> Self {
        if c {
            self.not()
        } else {
            self.clone()
        }
    }

    pub fn apply(op: TtOp, a: &Self, b: Option<&Self>) -> Result<Self, TtError> {
        match (op, b) {
            (TtOp::Not, None) => Ok(a.not()),
            (TtOp::Not, Some(_)) => Err(TtError::Arity(op, 1)),
            (_, None) => Err(TtError::Arity(op, 2)),
            (TtOp::And, Some(b)) => {
                a.check_width(b)?;
                Ok(a.and(b))
            }
            (TtOp::Xor, Some(b)) => {
                a.check_width(b)?;
                Ok(a.xor(b))
            }
        }
    }

    /// `self ⇒ other`, i.e. `self ∧ ¬other` is empty.
    pub fn implies(&self, other: &Self) -> Result<bool, TtError> {
        self.check_width(other)?;
        Ok(words_imply(&self.words, &other.words))
    }
}

impl TruthTable {
    /// Cofactor with respect to `var = value`, kept at the same width (the
    /// result no longer depends on `var`).
    pub fn cofactor(&self, var: usize, value: bool) -> Self {
        let mut t = self.clone();
        if var < 6 {
            let shift = 1 << var;
            let hi = VAR_MASKS[var];
            for w in t.words.iter_mut() {
                *w = if value {
                    (*w & hi) | ((*w & hi) >> shift)
                } else {
                    (*w & !hi) | ((*w & !hi) << shift)
                };
            }
            t.words[0] &= tail_mask(self.num_vars());
        } else {
            let period = 1 << (var - 6);
            for block in (0..t.words.len()).step_by(2 * period) {
                for j in block..block + period {
                    if value {
                        t.words[j] = t.words[j + period];
                    } else {
                        t.words[j + period] = t.words[j];
                    }
                }
            }
        }
        t
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.cofactor(var, false) != self.cofactor(var, true)
    }

    /// Positive-polarity Reed-Muller coefficients: bit `m` is set iff the
    /// monomial over the variables in `m` appears in the algebraic normal form.
    pub fn mobius(&self) -> Self {
        let mut t = self.clone();
        let n = self.num_vars();
        for var in 0..n.min(6) {
            let shift = 1 << var;
            let lo = !VAR_MASKS[var];
            for w in t.words.iter_mut() {
                *w ^= (*w & lo) << shift;
            }
        }
        for var in 6..n {
            let period = 1 << (var - 6);
            for block in (0..t.words.len()).step_by(2 * period) {
                for j in block..block + period {
                    t.words[j + period] ^= t.words[j];
                }
            }
        }
        t.words[0] &= tail_mask(n);
        t
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tt{}:{}", self.num_vars, self.to_hex())
    }
}

#[inline]
pub(crate) fn words_imply(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| x & !y == 0)
}

/// Simulates `members` (topologically sorted) over `leaves`; leaf `i` gets
/// variable `i`.
pub fn simulate_window(
    net: &Network,
    leaves: &[NodeId],
    members: &[NodeId],
) -> Result<FxHashMap<NodeId, TruthTable>, TtError> {
    if leaves.len() > MAX_VARS {
        return Err(TtError::TooManyVars(leaves.len()));
    }
    let n = leaves.len();
    let mut tables: FxHashMap<NodeId, TruthTable> = FxHashMap::default();
    tables.insert(0, TruthTable::zero(n));
    for (i, &l) in leaves.iter().enumerate() {
        tables.insert(l, TruthTable::var(n, i)?);
    }
    for &m in members {
        if tables.contains_key(&m) {
            continue;
        }
        let kind = net.kind(m);
        let fanins = net.fanins(m);
        let fetch = |s: Signal| -> Result<TruthTable, TtError> {
            tables
                .get(&s.node())
                .map(|t| t.complement_if(s.is_complemented()))
                .ok_or(TtError::DanglingFanin(m))
        };
        let t = match kind {
            NodeKind::And => fetch(fanins[0])?.and(&fetch(fanins[1])?),
            NodeKind::Xor => fetch(fanins[0])?.xor(&fetch(fanins[1])?),
            _ => return Err(TtError::DanglingFanin(m)),
        };
        tables.insert(m, t);
    }
    Ok(tables)
}
