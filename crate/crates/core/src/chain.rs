//! Multiplicity sequences of chains in a dual graph.
//!
//! A chain carries the multiplicities of a linear string of rational
//! components. Principal chains join two principal components; H-J tails
//! hang off a single one and end in a dead end.

use num_bigint::BigUint;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainKind {
    /// `(a_0, ..., a_{r+1})` between two principal components.
    Principal,
    /// `(a_0, ..., a_r)` read from the principal component outward.
    HjTail,
}

/// An ordered multiplicity sequence with the interior congruence
/// `a_{i-1} + a_{i+1} = 0 (mod a_i)` at every interior index.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct ChainSeq {
    entries: Vec<u64>,
    kind: ChainKind,
}

impl ChainSeq {
    pub fn principal(entries: Vec<u64>) -> Result<Self> {
        Self::new(entries, ChainKind::Principal)
    }

    pub fn hj_tail(entries: Vec<u64>) -> Result<Self> {
        Self::new(entries, ChainKind::HjTail)
    }

    fn new(entries: Vec<u64>, kind: ChainKind) -> Result<Self> {
        let fail = |msg: &str| Error::InvalidChain(entries.clone(), msg.to_string());
        if entries.len() < 2 {
            return Err(fail("length must be at least 2"));
        }
        if entries.iter().any(|&a| a == 0) {
            return Err(fail("entries must be positive"));
        }
        for i in 1..entries.len() - 1 {
            if !interior_congruent(entries[i - 1], entries[i], entries[i + 1]) {
                return Err(fail(&format!("congruence fails at interior index {i}")));
            }
        }
        if kind == ChainKind::HjTail {
            let first = entries[0];
            let last = *entries.last().unwrap();
            if first % last != 0 {
                return Err(fail("tail end must divide the principal end"));
            }
        }
        Ok(ChainSeq { entries, kind })
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn kind(&self) -> ChainKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// gcd of all entries.
    pub fn d(&self) -> u64 {
        seq_gcd(&self.entries)
    }

    /// `(d, b)` with `b_i = a_i / d` and `gcd(b) = 1`.
    pub fn normalize(&self) -> (u64, Vec<u64>) {
        normalize_seq(&self.entries)
    }

    /// lcm of all entries, exact.
    pub fn entry_lcm(&self) -> BigUint {
        self.entries
            .iter()
            .fold(BigUint::from(1u32), |acc, &a| acc.lcm(&BigUint::from(a)))
    }

    pub fn reversed(&self) -> ChainSeq {
        let mut entries = self.entries.clone();
        entries.reverse();
        ChainSeq {
            entries,
            kind: self.kind,
        }
    }
}

impl std::fmt::Display for ChainSeq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let strs: Vec<String> = self.entries.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", strs.join(","))
    }
}

pub(crate) fn interior_congruent(prev: u64, mid: u64, next: u64) -> bool {
    // prev + next = 0 (mod mid), computed in u128 to avoid overflow
    (prev as u128 + next as u128) % mid as u128 == 0
}

pub(crate) fn seq_gcd(entries: &[u64]) -> u64 {
    entries.iter().fold(0u64, |acc, &a| acc.gcd(&a))
}

/// gcd of the entries together with the sequence divided through by it.
pub fn normalize_seq(entries: &[u64]) -> (u64, Vec<u64>) {
    assert!(!entries.is_empty(), "cannot normalize an empty sequence");
    let d = seq_gcd(entries);
    (d, entries.iter().map(|&a| a / d).collect())
}

/// A principal chain known to arise from a negative-twist annulus.
///
/// On top of the interior congruence these satisfy interior convexity
/// `a_{i-1} + a_{i+1} >= 2 a_i` and have all adjacent gcds equal to the
/// global gcd `d`. Amphidrome chains additionally have even `d` and end in
/// a normalized entry of 1 (the fork component).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct NegativeTwistChain {
    seq: ChainSeq,
    amphidrome: bool,
}

impl NegativeTwistChain {
    pub fn new(entries: Vec<u64>, amphidrome: bool) -> Result<Self> {
        let seq = ChainSeq::principal(entries)?;
        Self::from_seq(seq, amphidrome)
    }

    pub fn from_seq(seq: ChainSeq, amphidrome: bool) -> Result<Self> {
        let entries = seq.entries();
        let fail = |msg: &str| Error::InvalidChain(entries.to_vec(), msg.to_string());
        if seq.kind() != ChainKind::Principal {
            return Err(fail("negative-twist chains are principal chains"));
        }
        for i in 1..entries.len() - 1 {
            if (entries[i - 1] as u128 + entries[i + 1] as u128) < 2 * entries[i] as u128 {
                return Err(fail(&format!("convexity fails at interior index {i}")));
            }
        }
        let d = seq.d();
        for w in entries.windows(2) {
            if w[0].gcd(&w[1]) != d {
                return Err(fail("adjacent gcds must all equal the global gcd"));
            }
        }
        if amphidrome {
            if d % 2 != 0 {
                return Err(fail("amphidrome chains need an even gcd"));
            }
            if *entries.last().unwrap() != d {
                return Err(fail("amphidrome chains end in normalized entry 1"));
            }
        }
        Ok(NegativeTwistChain { seq, amphidrome })
    }

    pub fn seq(&self) -> &ChainSeq {
        &self.seq
    }

    pub fn entries(&self) -> &[u64] {
        self.seq.entries()
    }

    pub fn amphidrome(&self) -> bool {
        self.amphidrome
    }

    pub fn d(&self) -> u64 {
        self.seq.d()
    }

    /// Orbit length of the underlying cut curve: `d` for non-amphidrome
    /// chains, `d/2` for amphidrome ones.
    pub fn orbit_len(&self) -> u64 {
        if self.amphidrome {
            self.d() / 2
        } else {
            self.d()
        }
    }
}

impl std::fmt::Display for NegativeTwistChain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}{}",
            self.seq,
            if self.amphidrome { " amphidrome" } else { "" }
        )
    }
}
