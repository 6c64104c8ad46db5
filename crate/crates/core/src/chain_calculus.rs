//! Per-chain formulas: Hirzebruch-Jung expansion, the chain invariant H,
//! boundary valencies, screw numbers, twist coefficients, synthesis of a
//! chain from its boundary data, and the node count of its semistable model.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainKind, ChainSeq, NegativeTwistChain};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::valency::{remainder_sigma, Valency};

/// Everything the calculus knows about one principal chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    pub seq: ChainSeq,
    pub d: u64,
    pub h: Rational,
    pub valency_start: Valency,
    pub valency_end: Valency,
    pub orbit_len: u64,
    pub screw: Rational,
    pub fdtc: Rational,
    pub amphidrome: bool,
}

impl ChainReport {
    pub fn for_chain(chain: &NegativeTwistChain) -> Result<ChainReport> {
        let (start, end) = chain_valencies(chain)?;
        Ok(ChainReport {
            seq: chain.seq().clone(),
            d: chain.d(),
            h: chain_h(chain.seq()),
            valency_start: start,
            valency_end: end,
            orbit_len: chain.orbit_len(),
            screw: screw_number(chain)?,
            fdtc: fdtc_from_chain(chain)?,
            amphidrome: chain.amphidrome(),
        })
    }
}

/// Hirzebruch-Jung descent of `lambda/sigma`: `b_0 = lambda`, `b_1 = sigma`,
/// then `b_{j+1}` is the representative of `-b_{j-1}` in `[0, b_j)`,
/// stopping at 1. Strictly decreasing.
fn hj_descent(lambda: u64, sigma: u64) -> Vec<u64> {
    debug_assert!(lambda >= 2 && sigma >= 1 && sigma < lambda);
    let mut b = vec![lambda, sigma];
    while *b.last().unwrap() != 1 {
        let prev = b[b.len() - 2];
        let mid = b[b.len() - 1];
        // -prev mod mid; never 0 before mid reaches 1 since adjacent
        // entries stay coprime
        let next = (mid - prev % mid) % mid;
        debug_assert!(next != 0 && next < mid);
        b.push(next);
    }
    b
}

/// The H-J tail of a multiple point with valency `v`, written from the
/// principal component outward as `(m*b_0, ..., m*b_l)`.
///
/// Rejects `lambda = 1`: simple points carry no tail.
pub fn hj_expand(v: &Valency) -> Result<ChainSeq> {
    if v.lambda() < 2 {
        return Err(Error::InvalidValency {
            m: v.m(),
            lambda: v.lambda(),
            sigma: v.sigma(),
            reason: "simple point (lambda = 1) has no tail chain".into(),
        });
    }
    let entries = hj_descent(v.lambda(), v.sigma())
        .into_iter()
        .map(|b| {
            b.checked_mul(v.m())
                .expect("tail multiplicity overflows u64")
        })
        .collect();
    ChainSeq::hj_tail(entries)
}

/// The valency of the multiple point carried by an H-J tail
/// `(a_0, ..., a_r)`: `(a_r, a_0/a_r, sigma(a_1/a_r, a_0/a_r))`.
///
/// Length-2 tails read `a_1 = a_r`, their only interior datum.
pub fn hj_valency(tail: &ChainSeq) -> Result<Valency> {
    let a = tail.entries();
    let fail = |msg: &str| Error::InvalidChain(a.to_vec(), msg.to_string());
    if tail.kind() != ChainKind::HjTail {
        return Err(fail("expected an H-J tail"));
    }
    let last = *a.last().unwrap();
    if a[0] % last != 0 || a[1] % last != 0 {
        return Err(fail("tail end must divide the first two entries"));
    }
    let lambda = a[0] / last;
    let sigma = remainder_sigma((a[1] / last) as i64, lambda);
    Valency::new(last, lambda, sigma)
}

/// `H(C) = sum over adjacent pairs of gcd(a_i, a_{i+1})^2 / (a_i a_{i+1})`,
/// exact.
pub fn chain_h(seq: &ChainSeq) -> Rational {
    let mut h = Rational::zero();
    for w in seq.entries().windows(2) {
        let g = BigUint::from(w[0].gcd(&w[1]));
        let num = BigInt::from(&g * &g);
        let den = BigInt::from(BigUint::from(w[0]) * BigUint::from(w[1]));
        h += &Rational::new(num, den).expect("positive denominator");
    }
    h
}

/// Boundary valencies of the annulus behind a negative-twist chain.
///
/// Non-amphidrome chains read one valency off each end of the normalized
/// sequence; amphidrome chains carry the same valency on both boundaries.
pub fn chain_valencies(chain: &NegativeTwistChain) -> Result<(Valency, Valency)> {
    let (d, b) = chain.seq().normalize();
    let start = end_valency(d, b[0], b[1])?;
    if chain.amphidrome() {
        return Ok((start, start));
    }
    let end = end_valency(d, b[b.len() - 1], b[b.len() - 2])?;
    Ok((start, end))
}

fn end_valency(d: u64, end: u64, inner: u64) -> Result<Valency> {
    Valency::new(d, end, remainder_sigma(inner as i64, end))
}

/// Screw number of the cut curve: `-H` for non-amphidrome chains, `-2H`
/// for amphidrome ones (negative twist throughout).
pub fn screw_number(chain: &NegativeTwistChain) -> Result<Rational> {
    let h = chain_h(chain.seq());
    Ok(if chain.amphidrome() {
        -(Rational::integer(2) * h)
    } else {
        -h
    })
}

/// Fractional Dehn twist coefficient `-H / m` with `m` the orbit length.
pub fn fdtc_from_chain(chain: &NegativeTwistChain) -> Result<Rational> {
    let m = chain.orbit_len();
    Ok(-(chain_h(chain.seq()) / Rational::from(m)))
}

/// Twist coefficient from a screw number: `s/m` for non-amphidrome curves,
/// `s/(2m)` for amphidrome ones. Rejects `s >= 0`.
pub fn fdtc_from_screw(s: &Rational, orbit_len: u64, amphidrome: bool) -> Result<Rational> {
    if !s.is_negative() {
        return Err(Error::InvalidMonodromy(format!(
            "screw number {s} is not negative"
        )));
    }
    assert!(orbit_len >= 1);
    let alpha = if amphidrome { 2 * orbit_len } else { orbit_len };
    Ok(s / &Rational::from(alpha))
}

/// Caps for the bounded chain search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchCaps {
    pub max_entry: u64,
    pub max_len: usize,
}

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps {
            max_entry: 1_000_000,
            max_len: 64,
        }
    }
}

/// Find the unique negative-twist chain with the given boundary valencies
/// and screw number, by depth-first search over the congruence classes.
///
/// Non-amphidrome: both valencies carry the orbit length `m`, the
/// normalized sequence runs from `v1.lambda` to `v2.lambda` and sums
/// `1/(b_i b_{i+1})` to `|s|`; the result is scaled by `m`. Amphidrome:
/// the two valencies coincide, their first entry is the full gcd `d`, the
/// normalized sequence ends at 1 and sums to `|s|/2`; scaled by `d`.
///
/// More than one match within the caps is reported as
/// [`Error::ChainAmbiguous`], never silently resolved.
pub fn synthesize_chain(
    v1: &Valency,
    v2: &Valency,
    s: &Rational,
    amphidrome: bool,
    caps: SearchCaps,
) -> Result<NegativeTwistChain> {
    if !s.is_negative() {
        return Err(Error::InvalidMonodromy(format!(
            "screw number {s} is not negative"
        )));
    }
    if v1.m() != v2.m() {
        return Err(Error::InvalidMonodromy(format!(
            "boundary valencies {v1} and {v2} disagree on the orbit data"
        )));
    }
    let scale = v1.m();
    if amphidrome {
        if v1 != v2 {
            return Err(Error::InvalidMonodromy(format!(
                "amphidrome boundaries must carry the same valency, got {v1} and {v2}"
            )));
        }
        if scale % 2 != 0 {
            return Err(Error::InvalidMonodromy(format!(
                "amphidrome valency {v1} must carry an even gcd"
            )));
        }
    }

    let target = if amphidrome {
        s.abs() / Rational::integer(2)
    } else {
        s.abs()
    };
    // Normalized caps: the found sequence is scaled by `scale` afterwards.
    let entry_cap = caps.max_entry / scale.max(1);
    if entry_cap == 0 || v1.lambda() > entry_cap {
        return Err(Error::ChainNotFound);
    }

    let goal = if amphidrome {
        SearchGoal {
            end: 1,
            end_sigma: 0,
        }
    } else {
        SearchGoal {
            end: v2.lambda(),
            end_sigma: v2.sigma(),
        }
    };
    let mut search = Search {
        goal,
        entry_cap,
        max_len: caps.max_len,
        prefix: vec![v1.lambda()],
        solutions: Vec::new(),
    };
    search.extend(v1.sigma() % v1.lambda(), v1.lambda(), &target);

    match search.solutions.len() {
        0 => Err(Error::ChainNotFound),
        1 => {
            let b = search.solutions.pop().unwrap();
            let entries = b.iter().map(|&x| x * scale).collect();
            NegativeTwistChain::new(entries, amphidrome)
        }
        _ => {
            let scaled = |b: &[u64]| b.iter().map(|&x| x * scale).collect::<Vec<_>>();
            Err(Error::ChainAmbiguous(
                scaled(&search.solutions[0]),
                scaled(&search.solutions[1]),
            ))
        }
    }
}

struct SearchGoal {
    end: u64,
    end_sigma: u64,
}

struct Search {
    goal: SearchGoal,
    entry_cap: u64,
    max_len: usize,
    prefix: Vec<u64>,
    solutions: Vec<Vec<u64>>,
}

impl Search {
    /// Try every admissible next entry `v = residue + k*step` after the
    /// current prefix, where `remaining` is the part of `|s|` not yet
    /// accounted for.
    fn extend(&mut self, residue: u64, step: u64, remaining: &Rational) {
        if self.prefix.len() >= self.max_len || self.solutions.len() >= 2 {
            return;
        }
        let last = *self.prefix.last().unwrap();
        let convexity_floor = if self.prefix.len() >= 2 {
            // interior convexity at `last`: prev + v >= 2*last
            (2 * last as u128).saturating_sub(self.prefix[self.prefix.len() - 2] as u128)
        } else {
            1
        };
        // 1/(last*v) <= remaining needs v >= den/(num*last); smaller
        // candidates overshoot the sum and can be skipped wholesale.
        let sum_floor = {
            let num = remaining.numerator() * BigInt::from(last);
            let den = remaining.denominator();
            let ceil: BigInt = (den + &num - 1) / &num;
            match u64::try_from(&ceil) {
                Ok(v) => v as u128,
                Err(_) => return, // even the cap-sized entries overshoot
            }
        };

        let floor = convexity_floor.max(sum_floor);
        let mut v = if residue == 0 { step } else { residue };
        if (v as u128) < floor {
            let k = (floor - v as u128).div_ceil(step as u128);
            let jumped = v as u128 + k * step as u128;
            if jumped > self.entry_cap as u128 {
                return;
            }
            v = jumped as u64;
        }

        while v <= self.entry_cap {
            let term = Rational::new(
                BigInt::from(1u32),
                BigInt::from(BigUint::from(last) * BigUint::from(v)),
            )
            .unwrap();

            if &term == remaining {
                // Exact termination at v, if it matches the far valency.
                if v == self.goal.end
                    && remainder_sigma(last as i64, self.goal.end) == self.goal.end_sigma
                {
                    let mut solution = self.prefix.clone();
                    solution.push(v);
                    self.solutions.push(solution);
                    if self.solutions.len() >= 2 {
                        return;
                    }
                }
            } else if term < *remaining {
                let rest = remaining - &term;
                if v > last {
                    // Ascending from here on: future diffs only grow, so the
                    // rest of the sum stays strictly below 1/((v-last)*v).
                    // Once that bound fails it fails for every larger v.
                    let bound = Rational::new(
                        BigInt::from(1u32),
                        BigInt::from(BigUint::from(v - last) * BigUint::from(v)),
                    )
                    .unwrap();
                    if rest >= bound {
                        return;
                    }
                }
                self.prefix.push(v);
                let next_residue = (v - last % v) % v;
                self.extend(next_residue, v, &rest);
                self.prefix.pop();
                if self.solutions.len() >= 2 {
                    return;
                }
            }
            v = match v.checked_add(step) {
                Some(next) => next,
                None => return,
            };
        }
    }
}

/// Node count of the `d`-th semistable model of a chain, together with the
/// number of preimage chains, by pure integer arithmetic.
///
/// Over a node where multiplicities `p, q` meet, the degree-`d` cyclic
/// cover has `gcd(p,q)` branches of `d / lcm(p,q)` nodes each; `d` must be
/// divisible by the lcm of all entries. Serves as the integer oracle for
/// [`chain_h`]: `nodes = d * H` exactly.
pub fn semistable_node_count(seq: &ChainSeq, d: &BigUint) -> Result<(BigUint, u64)> {
    let lcm = seq.entry_lcm();
    if d % &lcm != BigUint::from(0u32) {
        return Err(Error::InvalidChain(
            seq.entries().to_vec(),
            format!("base change degree {d} is not divisible by the entry lcm {lcm}"),
        ));
    }
    let mut nodes = BigUint::from(0u32);
    for w in seq.entries().windows(2) {
        let g = w[0].gcd(&w[1]);
        let pair_lcm = BigUint::from(w[0] / g) * BigUint::from(w[1]);
        nodes += BigUint::from(g) * (d / pair_lcm);
    }
    Ok((nodes, seq.d()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn val(m: u64, l: u64, s: u64) -> Valency {
        Valency::new(m, l, s).unwrap()
    }

    fn chain(entries: &[u64], amph: bool) -> NegativeTwistChain {
        NegativeTwistChain::new(entries.to_vec(), amph).unwrap()
    }

    fn rat(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn hj_expand_examples() {
        assert_eq!(hj_expand(&val(3, 2, 1)).unwrap().entries(), &[6, 3]);
        assert_eq!(hj_expand(&val(2, 3, 2)).unwrap().entries(), &[6, 4, 2]);
        assert_eq!(hj_expand(&val(1, 4, 1)).unwrap().entries(), &[4, 1]);
        assert!(hj_expand(&val(2, 1, 0)).is_err());
    }

    #[test]
    fn hj_valency_round_trips() {
        for (entries, expect) in [
            (vec![6, 3], val(3, 2, 1)),
            (vec![6, 4, 2], val(2, 3, 2)),
            (vec![4, 1], val(1, 4, 1)),
        ] {
            let tail = ChainSeq::hj_tail(entries).unwrap();
            assert_eq!(hj_valency(&tail).unwrap(), expect);
        }
        // (8,6,4): 4 divides 8 but not 6
        let tail = ChainSeq::hj_tail(vec![8, 6, 4]).unwrap();
        assert!(hj_valency(&tail).is_err());
    }

    #[test]
    fn chain_h_examples() {
        assert_eq!(chain_h(&ChainSeq::principal(vec![6, 5, 4]).unwrap()), rat("1/12"));
        assert_eq!(chain_h(&ChainSeq::principal(vec![1, 1]).unwrap()), rat("1"));
        assert_eq!(chain_h(&ChainSeq::principal(vec![4, 2]).unwrap()), rat("1/2"));
    }

    #[test]
    fn chain_valencies_examples() {
        assert_eq!(
            chain_valencies(&chain(&[6, 5, 4], false)).unwrap(),
            (val(1, 6, 5), val(1, 4, 1))
        );
        assert_eq!(
            chain_valencies(&chain(&[2, 2], false)).unwrap(),
            (val(2, 1, 0), val(2, 1, 0))
        );
        assert_eq!(
            chain_valencies(&chain(&[4, 2], true)).unwrap(),
            (val(2, 2, 1), val(2, 2, 1))
        );
    }

    #[test]
    fn screw_and_fdtc_examples() {
        assert_eq!(screw_number(&chain(&[6, 5, 4], false)).unwrap(), rat("-1/12"));
        assert_eq!(screw_number(&chain(&[1, 1], false)).unwrap(), rat("-1"));
        assert_eq!(screw_number(&chain(&[4, 2], true)).unwrap(), rat("-1"));

        assert_eq!(fdtc_from_chain(&chain(&[6, 5, 4], false)).unwrap(), rat("-1/12"));
        assert_eq!(fdtc_from_chain(&chain(&[2, 2], false)).unwrap(), rat("-1/2"));
        assert_eq!(fdtc_from_chain(&chain(&[4, 2], true)).unwrap(), rat("-1/2"));

        assert_eq!(fdtc_from_screw(&rat("-1/12"), 1, false).unwrap(), rat("-1/12"));
        assert_eq!(fdtc_from_screw(&rat("-1"), 1, true).unwrap(), rat("-1/2"));
        assert_eq!(fdtc_from_screw(&rat("-6"), 3, false).unwrap(), rat("-2"));
        assert!(fdtc_from_screw(&rat("0"), 1, false).is_err());
        assert!(fdtc_from_screw(&rat("1/2"), 1, false).is_err());
    }

    #[test]
    fn synthesize_examples() {
        let caps = SearchCaps::default();
        let c = synthesize_chain(&val(1, 6, 5), &val(1, 4, 1), &rat("-1/12"), false, caps).unwrap();
        assert_eq!(c.entries(), &[6, 5, 4]);

        let c = synthesize_chain(&val(1, 1, 0), &val(1, 1, 0), &rat("-1"), false, caps).unwrap();
        assert_eq!(c.entries(), &[1, 1]);

        let c = synthesize_chain(&val(1, 1, 0), &val(1, 1, 0), &rat("-3"), false, caps).unwrap();
        assert_eq!(c.entries(), &[1, 1, 1, 1]);

        let c = synthesize_chain(&val(2, 2, 1), &val(2, 2, 1), &rat("-1"), true, caps).unwrap();
        assert_eq!(c.entries(), &[4, 2]);
        assert!(c.amphidrome());

        // unreachable screw number
        assert_eq!(
            synthesize_chain(&val(1, 6, 5), &val(1, 4, 1), &rat("-1/13"), false, caps),
            Err(Error::ChainNotFound)
        );
    }

    #[test]
    fn synthesize_scales_by_orbit_length() {
        let caps = SearchCaps::default();
        let c = synthesize_chain(&val(2, 3, 2), &val(2, 2, 1), &rat("-1/6"), false, caps).unwrap();
        assert_eq!(c.entries(), &[6, 4]);
        assert_eq!(c.d(), 2);
    }

    #[test]
    fn semistable_examples() {
        let seq = ChainSeq::principal(vec![6, 5, 4]).unwrap();
        let (nodes, chains) = semistable_node_count(&seq, &BigUint::from(60u32)).unwrap();
        assert_eq!(nodes, BigUint::from(5u32));
        assert_eq!(chains, 1);

        let seq = ChainSeq::principal(vec![1, 1]).unwrap();
        let (nodes, chains) = semistable_node_count(&seq, &BigUint::from(1u32)).unwrap();
        assert_eq!(nodes, BigUint::from(1u32));
        assert_eq!(chains, 1);

        let seq = ChainSeq::principal(vec![2, 2]).unwrap();
        let (nodes, chains) = semistable_node_count(&seq, &BigUint::from(2u32)).unwrap();
        assert_eq!(nodes, BigUint::from(2u32));
        assert_eq!(chains, 2);

        // 30 is not divisible by lcm(6,5,4) = 60
        let seq = ChainSeq::principal(vec![6, 5, 4]).unwrap();
        assert!(semistable_node_count(&seq, &BigUint::from(30u32)).is_err());
    }
}
