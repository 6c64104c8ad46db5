//! Exhaustive chain enumeration and the seeded corpus generator.
//!
//! Chains are generated as normalized sequences (adjacent entries coprime,
//! interior congruence and convexity) and then scaled; the emitted order is
//! by length, then lexicographic, so extremal tables are reproducible.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::NegativeTwistChain;
use crate::chain_calculus::{chain_h, chain_valencies, screw_number};
use crate::error::{Error, Result};
use crate::monodromy::{
    validate_monodromy, AnnulusEnd, AnnulusOrbit, MonodromyData, PeriodicPart,
};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumSpec {
    pub max_entry: u64,
    pub max_len: usize,
    pub genus: Option<u64>,
    pub m_cap: Option<u64>,
    /// `None` or `Some(false)`: plain chains. `Some(true)`: only chains
    /// that close an amphidrome annulus, emitted with the flag set.
    pub amphidrome: Option<bool>,
}

impl EnumSpec {
    pub fn new(max_entry: u64, max_len: usize) -> Result<EnumSpec> {
        if max_entry < 1 || max_len < 2 {
            return Err(Error::Parse(
                "enumeration caps need max_entry >= 1 and max_len >= 2".into(),
            ));
        }
        Ok(EnumSpec {
            max_entry,
            max_len,
            genus: None,
            m_cap: None,
            amphidrome: None,
        })
    }

    pub fn with_genus(mut self, g: u64) -> Self {
        self.genus = Some(g);
        self
    }

    pub fn with_m_cap(mut self, m: u64) -> Self {
        self.m_cap = Some(m);
        self
    }

    pub fn with_amphidrome(mut self, amph: Option<bool>) -> Self {
        self.amphidrome = amph;
        self
    }
}

/// Every negative-twist chain within the caps, each exactly once, ordered
/// by length then lexicographic entry sequence.
pub fn enumerate_chains(spec: &EnumSpec) -> Vec<NegativeTwistChain> {
    let amph = spec.amphidrome.unwrap_or(false);
    let mut scaled: Vec<Vec<u64>> = Vec::new();
    for_each_normalized(spec.max_entry, spec.max_len, |b| {
        let max = *b.iter().max().unwrap();
        if amph && *b.last().unwrap() != 1 {
            return;
        }
        let mut dd = 1u64;
        while dd * max <= spec.max_entry {
            let orbit = if amph {
                if dd % 2 != 0 {
                    dd += 1;
                    continue;
                }
                dd / 2
            } else {
                dd
            };
            if spec.m_cap.map_or(true, |cap| orbit <= cap) {
                scaled.push(b.iter().map(|&x| x * dd).collect());
            }
            dd += 1;
        }
    });
    scaled.sort_by(|a, b| (a.len(), a.as_slice()).cmp(&(b.len(), b.as_slice())));
    scaled
        .into_iter()
        .map(|entries| {
            NegativeTwistChain::new(entries, amph).expect("enumerated chain is valid")
        })
        .collect()
}

/// Visit every normalized sequence (gcd of adjacent entries 1, interior
/// congruence and convexity) with entries within `max_entry` and length
/// within `max_len`.
fn for_each_normalized<F: FnMut(&[u64])>(max_entry: u64, max_len: usize, mut visit: F) {
    let mut seq: Vec<u64> = Vec::with_capacity(max_len);
    for b0 in 1..=max_entry {
        seq.push(b0);
        for b1 in 1..=max_entry {
            if b0.gcd(&b1) != 1 {
                continue;
            }
            seq.push(b1);
            visit(&seq);
            descend(max_entry, max_len, &mut seq, &mut visit);
            seq.pop();
        }
        seq.pop();
    }
}

fn descend<F: FnMut(&[u64])>(max_entry: u64, max_len: usize, seq: &mut Vec<u64>, visit: &mut F) {
    if seq.len() >= max_len {
        return;
    }
    let prev = seq[seq.len() - 2];
    let last = seq[seq.len() - 1];
    // congruence: v = -prev (mod last); convexity: prev + v >= 2*last
    let residue = (last - prev % last) % last;
    let floor = (2 * last as u128).saturating_sub(prev as u128).max(1);
    let mut v = if residue == 0 { last } else { residue };
    if (v as u128) < floor {
        let k = (floor - v as u128).div_ceil(last as u128);
        let jumped = v as u128 + k * last as u128;
        if jumped > max_entry as u128 {
            return;
        }
        v = jumped as u64;
    }
    while v <= max_entry {
        seq.push(v);
        visit(seq);
        descend(max_entry, max_len, seq, visit);
        seq.pop();
        v = match v.checked_add(last) {
            Some(next) => next,
            None => return,
        };
    }
}

/// Smallest `|c| = H/m` over the chains admissible at the given genus,
/// with a witness. Admissibility follows the per-type degree caps: a
/// type-0 chain has both end orders at most `2g`, a type-i chain end
/// orders at most `4i+2` and `4(g-i)+2`; `node_type = None` scans the
/// union over all types. The orbit length is capped by `g` throughout.
pub fn extremal_fdtc(
    spec: &EnumSpec,
    node_type: Option<u64>,
) -> Result<(Rational, NegativeTwistChain)> {
    let g = spec
        .genus
        .ok_or_else(|| Error::Parse("extremal scan needs a genus".into()))?;
    if g < 2 {
        return Err(Error::Parse(format!("genus {g} is below 2")));
    }
    if let Some(i) = node_type {
        if i > g / 2 {
            return Err(Error::Parse(format!(
                "type {i} out of range for genus {g}"
            )));
        }
    }
    let m_cap = spec.m_cap.map_or(g, |cap| cap.min(g));

    let eligible = |lambda1: u64, lambda2: u64, amph: bool| -> bool {
        let type0 = lambda1 <= 2 * g && lambda2 <= 2 * g;
        if amph {
            // folded annuli never separate, so only the type-0 cap applies
            return type0;
        }
        match node_type {
            Some(0) => type0,
            Some(i) => {
                let (a, b) = (4 * i + 2, 4 * (g - i) + 2);
                (lambda1 <= a && lambda2 <= b) || (lambda1 <= b && lambda2 <= a)
            }
            None => {
                type0
                    || (1..=g / 2).any(|i| {
                        let (a, b) = (4 * i + 2, 4 * (g - i) + 2);
                        (lambda1 <= a && lambda2 <= b) || (lambda1 <= b && lambda2 <= a)
                    })
            }
        }
    };

    let mut best: Option<(Rational, NegativeTwistChain)> = None;
    let variants: &[bool] = match (spec.amphidrome, node_type) {
        (Some(true), _) => &[true],
        (Some(false), _) => &[false],
        (None, Some(i)) if i >= 1 => &[false],
        (None, _) => &[false, true],
    };
    for &amph in variants {
        let sub = EnumSpec {
            m_cap: Some(m_cap),
            amphidrome: Some(amph),
            ..*spec
        };
        for chain in enumerate_chains(&sub) {
            let (_, b) = chain.seq().normalize();
            let (l1, l2) = (b[0], *b.last().unwrap());
            if !eligible(l1, l2, amph) {
                continue;
            }
            let c = chain_h(chain.seq()) / Rational::from(chain.orbit_len());
            if best.as_ref().map_or(true, |(min, _)| &c < min) {
                best = Some((c, chain));
            }
        }
    }
    best.ok_or(Error::ChainNotFound)
}

// ---------------------------------------------------------------------------
// seeded corpus generator

struct ChainPool {
    chains: Vec<NegativeTwistChain>,
    /// oriented (first entry, last entry) -> indices, non-amphidrome
    by_ends: BTreeMap<(u64, u64), Vec<usize>>,
    /// first entry -> indices, amphidrome
    amph_by_first: BTreeMap<u64, Vec<usize>>,
}

const POOL_MAX_ENTRY: u64 = 18;
const POOL_MAX_LEN: usize = 5;

fn chain_pool() -> &'static ChainPool {
    static POOL: OnceLock<ChainPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let base = EnumSpec::new(POOL_MAX_ENTRY, POOL_MAX_LEN).unwrap();
        let mut chains = enumerate_chains(&base.with_amphidrome(Some(false)));
        let plain = chains.len();
        chains.extend(enumerate_chains(&base.with_amphidrome(Some(true))));
        let mut by_ends: BTreeMap<(u64, u64), Vec<usize>> = BTreeMap::new();
        let mut amph_by_first: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (i, c) in chains.iter().enumerate() {
            let e = c.entries();
            if i < plain {
                by_ends
                    .entry((e[0], *e.last().unwrap()))
                    .or_default()
                    .push(i);
            } else {
                amph_by_first.entry(e[0]).or_default().push(i);
            }
        }
        ChainPool {
            chains,
            by_ends,
            amph_by_first,
        }
    })
}

/// One annulus orbit being assembled by the generator.
struct PlannedOrbit {
    chain: NegativeTwistChain,
    /// part indices; amphidrome orbits use only the first
    parts: (usize, usize),
}

struct PlannedPart {
    mult: u64,
    branch: Vec<(u64, u64)>, // (lambda, sigma), m = mult/lambda
}

/// Deterministic-by-seed valid monodromy datum at genus `g`: a random
/// split into quotient pieces joined by chains drawn from a fixed pool,
/// with branch data balanced so the assembled fiber satisfies the vertex
/// congruence. Fails only if no candidate within the retry budget meets
/// every admissibility constraint; the fallback shape always does.
pub fn random_monodromy(g: u64, seed: u64) -> Result<MonodromyData> {
    if g < 2 {
        return Err(Error::Parse(format!("genus {g} is below 2")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(g);

    // occasionally a smooth datum: the zero side of the vanishing story
    if rng.gen_range(0..10) == 0 {
        let d = MonodromyData {
            genus: g,
            parts: vec![PeriodicPart {
                id: "P0".into(),
                mult: 1,
                quotient_genus: g,
                pieces: 1,
                branch_valencies: vec![],
                slots: vec![],
            }],
            annuli: vec![],
        };
        debug_assert!(validate_monodromy(&d).is_valid());
        return Ok(d);
    }

    for _ in 0..200 {
        if let Some(d) = try_generate(g, &mut rng) {
            let check = validate_monodromy(&d);
            debug_assert!(check.is_valid(), "generator bug: {:?}", check.violations);
            if check.is_valid() {
                return Ok(d);
            }
        }
    }

    // guaranteed fallback: one flexible piece with a single plain loop
    let d = fallback_datum(g);
    let check = validate_monodromy(&d);
    if check.is_valid() {
        Ok(d)
    } else {
        Err(Error::InvalidMonodromy(format!(
            "generator fallback invalid: {:?}",
            check.violations
        )))
    }
}

fn fallback_datum(g: u64) -> MonodromyData {
    let chain = NegativeTwistChain::new(vec![1, 1], false).unwrap();
    let (v1, v2) = chain_valencies(&chain).unwrap();
    MonodromyData {
        genus: g,
        parts: vec![PeriodicPart {
            id: "P0".into(),
            mult: 1,
            quotient_genus: g - 1,
            pieces: 1,
            branch_valencies: vec![],
            slots: vec!["s0".into(), "s1".into()],
        }],
        annuli: vec![AnnulusOrbit {
            id: "A0".into(),
            orbit_len: 1,
            screw: screw_number(&chain).unwrap(),
            amphidrome: false,
            ends: vec![
                AnnulusEnd {
                    part: "P0".into(),
                    slot: "s0".into(),
                    valency: v1,
                },
                AnnulusEnd {
                    part: "P0".into(),
                    slot: "s1".into(),
                    valency: v2,
                },
            ],
        }],
    }
}

fn try_generate(g: u64, rng: &mut ChaCha8Rng) -> Option<MonodromyData> {
    let pool = chain_pool();

    // the flexible piece P0 always exists and absorbs the leftover genus
    let mut parts: Vec<PlannedPart> = vec![PlannedPart {
        mult: 1,
        branch: Vec::new(),
    }];
    let mut orbits: Vec<PlannedOrbit> = Vec::new();
    let mut budget = g; // remaining total orbit length

    // bridge P0 to a fresh multiple part, returning its index
    let bridge = |parts: &mut Vec<PlannedPart>,
                      orbits: &mut Vec<PlannedOrbit>,
                      budget: &mut u64,
                      n: u64,
                      rng: &mut ChaCha8Rng|
     -> Option<usize> {
        if *budget == 0 {
            return None;
        }
        let picks = pool.by_ends.get(&(1, n))?;
        let chain = pool.chains[picks[rng.gen_range(0..picks.len())]].clone();
        if chain.orbit_len() > *budget {
            return None;
        }
        *budget -= chain.orbit_len();
        parts.push(PlannedPart {
            mult: n,
            branch: Vec::new(),
        });
        let target = parts.len() - 1;
        orbits.push(PlannedOrbit {
            chain,
            parts: (0, target),
        });
        Some(target)
    };

    let want_orbits = rng.gen_range(1..=3usize);
    for _ in 0..want_orbits {
        if budget == 0 {
            break;
        }
        let style = rng.gen_range(0..10u32);
        if style < 3 {
            // plain loop on P0
            let picks = &pool.by_ends[&(1, 1)];
            let candidates: Vec<usize> = picks
                .iter()
                .copied()
                .filter(|&i| pool.chains[i].orbit_len() <= budget)
                .collect();
            if candidates.is_empty() {
                continue;
            }
            let chain = pool.chains[candidates[rng.gen_range(0..candidates.len())]].clone();
            budget -= chain.orbit_len();
            orbits.push(PlannedOrbit {
                chain,
                parts: (0, 0),
            });
        } else if style < 6 {
            // fresh multiple part behind a bridge
            if parts.len() >= 3 {
                continue;
            }
            let n = rng.gen_range(2..=12u64);
            bridge(&mut parts, &mut orbits, &mut budget, n, rng);
        } else if style < 8 {
            // loop on an existing part
            let target = rng.gen_range(0..parts.len());
            let n = parts[target].mult;
            let candidates: Vec<usize> = pool
                .by_ends
                .get(&(n, n))
                .map(|v| {
                    v.iter()
                        .copied()
                        .filter(|&i| pool.chains[i].orbit_len() <= budget)
                        .collect()
                })
                .unwrap_or_default();
            if candidates.is_empty() {
                continue;
            }
            let chain = pool.chains[candidates[rng.gen_range(0..candidates.len())]].clone();
            budget -= chain.orbit_len();
            orbits.push(PlannedOrbit {
                chain,
                parts: (target, target),
            });
        } else {
            // amphidrome orbit; bring in a compatible part if none exists
            let target = match parts
                .iter()
                .position(|p| pool.amph_by_first.contains_key(&p.mult))
            {
                Some(t) => t,
                None => {
                    if parts.len() >= 3 || budget < 2 {
                        continue;
                    }
                    let firsts: Vec<u64> = pool
                        .amph_by_first
                        .keys()
                        .copied()
                        .filter(|&n| n <= 12)
                        .collect();
                    let n = firsts[rng.gen_range(0..firsts.len())];
                    match bridge(&mut parts, &mut orbits, &mut budget, n, rng) {
                        Some(t) => t,
                        None => continue,
                    }
                }
            };
            let n = parts[target].mult;
            let usable: Vec<usize> = pool.amph_by_first[&n]
                .iter()
                .copied()
                .filter(|&i| pool.chains[i].orbit_len() <= budget)
                .collect();
            if usable.is_empty() {
                continue;
            }
            let chain = pool.chains[usable[rng.gen_range(0..usable.len())]].clone();
            budget -= chain.orbit_len();
            orbits.push(PlannedOrbit {
                chain,
                parts: (target, target),
            });
        }
    }
    if orbits.is_empty() {
        return None;
    }

    // branch data on multiple parts; several tries since the piece genus
    // must come out a non-negative integer
    for part in parts.iter_mut().skip(1) {
        let n = part.mult;
        let divisors: Vec<u64> = (2..=n).filter(|l| n % l == 0).collect();
        if divisors.is_empty() {
            continue;
        }
        for _ in 0..rng.gen_range(1..=4usize) {
            let lambda = divisors[rng.gen_range(0..divisors.len())];
            let coprime: Vec<u64> = (1..lambda).filter(|s| s.gcd(&lambda) == 1).collect();
            let sigma = coprime[rng.gen_range(0..coprime.len())];
            part.branch.push((lambda, sigma));
        }
    }

    finish_plan(g, parts, orbits)
}

/// Balance valencies, solve the genus bookkeeping exactly, and emit the
/// datum. Returns `None` when the candidate cannot satisfy a constraint.
fn finish_plan(
    g: u64,
    mut parts: Vec<PlannedPart>,
    orbits: Vec<PlannedOrbit>,
) -> Option<MonodromyData> {
    let total_orbit_len: u64 = orbits.iter().map(|o| o.chain.orbit_len()).sum();

    // per-part slot valencies from the chains
    let mut slot_valencies: Vec<Vec<crate::valency::Valency>> = vec![Vec::new(); parts.len()];
    for o in &orbits {
        let (v1, v2) = chain_valencies(&o.chain).ok()?;
        if o.chain.amphidrome() {
            slot_valencies[o.parts.0].push(v1);
        } else {
            slot_valencies[o.parts.0].push(v1);
            slot_valencies[o.parts.1].push(v2);
        }
    }

    // total valency balancing: add (1, n, sigma) branches until the sum
    // of m*sigma over branches and slots vanishes mod n
    for (part, slots) in parts.iter_mut().zip(&slot_valencies) {
        let n = part.mult;
        if n == 1 {
            continue;
        }
        let mut sum: u128 = slots
            .iter()
            .map(|v| v.m() as u128 * v.sigma() as u128)
            .sum();
        sum += part
            .branch
            .iter()
            .map(|&(l, s)| (n / l) as u128 * s as u128)
            .sum::<u128>();
        let mut deficit = ((n as u128 - sum % n as u128) % n as u128) as u64;
        while deficit > 0 {
            let sigma = (1..=deficit)
                .rev()
                .find(|s| s.gcd(&n) == 1 && *s < n)
                .unwrap_or(1);
            part.branch.push((n, sigma));
            deficit -= sigma;
        }
    }

    // piece genera: h = 1 - (chi + circles)/2 with quotient genus 0; the
    // flexible part absorbs the remainder of g afterwards
    let mut genera = Vec::with_capacity(parts.len());
    for (i, (part, slots)) in parts.iter().zip(&slot_valencies).enumerate() {
        let n = part.mult as i128;
        let beta = slots.len() as i128;
        let s = part.branch.len() as i128;
        let sum_m: i128 = part.branch.iter().map(|&(l, _)| n / l as i128).sum();
        let chi = n * (2 - beta - s) + sum_m;
        let circles: i128 = slots.iter().map(|v| v.m() as i128).sum();
        let doubled = chi + circles; // 2 - 2h
        if doubled % 2 != 0 {
            return None;
        }
        let h = (2 - doubled) / 2;
        if h < 0 {
            return None;
        }
        // no disk or annulus pieces: those cut curves are inessential
        if h == 0 && circles <= 2 && i != 0 {
            return None;
        }
        genera.push(h as u64);
    }

    // exact genus fit through the flexible part:
    // g = sum of piece genera + total orbit length - parts + 1
    let fixed: u64 = genera.iter().skip(1).sum();
    let needed = (g + parts.len() as u64 - 1).checked_sub(fixed + total_orbit_len)?;
    // the flexible part must stay essential
    let circles0: i128 = slot_valencies[0].iter().map(|v| v.m() as i128).sum();
    if needed == 0 && circles0 <= 2 {
        return None;
    }

    // emit
    let mut out_parts = Vec::new();
    let mut slot_names: Vec<Vec<String>> = vec![Vec::new(); parts.len()];
    for (i, part) in parts.iter().enumerate() {
        let n = part.mult;
        let quotient_genus = if i == 0 {
            needed
        } else {
            // chi above was computed with quotient genus 0
            0
        };
        let slots: Vec<String> = (0..slot_valencies[i].len())
            .map(|k| format!("s{k}"))
            .collect();
        slot_names[i] = slots.clone();
        out_parts.push(PeriodicPart {
            id: format!("P{i}"),
            mult: n,
            quotient_genus,
            pieces: 1,
            branch_valencies: part
                .branch
                .iter()
                .map(|&(l, s)| crate::valency::Valency::new(n / l, l, s).unwrap())
                .collect(),
            slots,
        });
    }

    let mut used: Vec<usize> = vec![0; parts.len()];
    let mut out_annuli = Vec::new();
    for (k, o) in orbits.iter().enumerate() {
        let (v1, v2) = chain_valencies(&o.chain).ok()?;
        let mut take = |p: usize| {
            let name = slot_names[p][used[p]].clone();
            used[p] += 1;
            name
        };
        let ends = if o.chain.amphidrome() {
            vec![AnnulusEnd {
                part: format!("P{}", o.parts.0),
                slot: take(o.parts.0),
                valency: v1,
            }]
        } else {
            vec![
                AnnulusEnd {
                    part: format!("P{}", o.parts.0),
                    slot: take(o.parts.0),
                    valency: v1,
                },
                AnnulusEnd {
                    part: format!("P{}", o.parts.1),
                    slot: take(o.parts.1),
                    valency: v2,
                },
            ]
        };
        out_annuli.push(AnnulusOrbit {
            id: format!("A{k}"),
            orbit_len: o.chain.orbit_len(),
            screw: screw_number(&o.chain).ok()?,
            amphidrome: o.chain.amphidrome(),
            ends,
        });
    }

    Some(MonodromyData {
        genus: g,
        parts: out_parts,
        annuli: out_annuli,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain_calculus::{fdtc_from_chain, synthesize_chain, SearchCaps};
    use crate::monodromy::{lower_bound, verify_main_identity};

    #[test]
    fn enumerate_tiny_caps() {
        let spec = EnumSpec::new(2, 2).unwrap();
        let chains = enumerate_chains(&spec);
        let seqs: Vec<Vec<u64>> = chains.iter().map(|c| c.entries().to_vec()).collect();
        assert_eq!(seqs, vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
    }

    #[test]
    fn enumerate_contains_the_worked_chain() {
        let spec = EnumSpec::new(6, 3).unwrap();
        let chains = enumerate_chains(&spec);
        assert!(chains.iter().any(|c| c.entries() == [6, 5, 4]));
    }

    #[test]
    fn enumerate_semistable_strings() {
        let spec = EnumSpec::new(1, 4).unwrap();
        let seqs: Vec<Vec<u64>> = enumerate_chains(&spec)
            .iter()
            .map(|c| c.entries().to_vec())
            .collect();
        assert_eq!(seqs, vec![vec![1, 1], vec![1, 1, 1], vec![1, 1, 1, 1]]);
    }

    #[test]
    fn enumeration_is_deterministic_and_unique() {
        let spec = EnumSpec::new(8, 4).unwrap();
        let a = enumerate_chains(&spec);
        let b = enumerate_chains(&spec);
        assert_eq!(a, b);
        let mut seen = std::collections::BTreeSet::new();
        for c in &a {
            assert!(seen.insert(c.entries().to_vec()), "duplicate {c}");
        }
    }

    #[test]
    fn enumerated_chains_have_h_at_least_inverse_end_product() {
        let spec = EnumSpec::new(12, 5).unwrap();
        for chain in enumerate_chains(&spec) {
            let (_, b) = chain.seq().normalize();
            let bound = Rational::ratio(1, b[0] * b[b.len() - 1]);
            assert!(
                chain_h(chain.seq()) >= bound,
                "H below 1/(b0*bl) on {chain}"
            );
        }
    }

    #[test]
    fn amphidrome_enumeration_flags() {
        let spec = EnumSpec::new(4, 3).unwrap().with_amphidrome(Some(true));
        let chains = enumerate_chains(&spec);
        assert!(!chains.is_empty());
        for c in &chains {
            assert!(c.amphidrome());
            assert_eq!(*c.entries().last().unwrap(), c.d());
            assert_eq!(c.d() % 2, 0);
        }
        assert!(chains.iter().any(|c| c.entries() == [4, 2]));
    }

    #[test]
    fn round_trip_small_caps() {
        let caps = SearchCaps {
            max_entry: 12,
            max_len: 6,
        };
        for amph in [false, true] {
            let spec = EnumSpec::new(12, 4).unwrap().with_amphidrome(Some(amph));
            for chain in enumerate_chains(&spec) {
                let (v1, v2) = chain_valencies(&chain).unwrap();
                let s = screw_number(&chain).unwrap();
                let again = synthesize_chain(&v1, &v2, &s, amph, caps).unwrap();
                assert_eq!(again, chain, "round trip failed for {chain}");
                let c = fdtc_from_chain(&chain).unwrap();
                assert_eq!(
                    c.abs(),
                    chain_h(chain.seq()) / Rational::from(chain.orbit_len())
                );
            }
        }
    }

    #[test]
    fn extremal_degenerate() {
        let spec = EnumSpec::new(1, 2).unwrap().with_genus(2);
        let (min, witness) = extremal_fdtc(&spec, None).unwrap();
        assert_eq!(min, Rational::one());
        assert_eq!(witness.entries(), &[1, 1]);
    }

    #[test]
    fn extremal_respects_bound_at_small_caps() {
        let spec = EnumSpec::new(20, 5).unwrap().with_genus(2);
        let (min, witness) = extremal_fdtc(&spec, None).unwrap();
        assert!(
            min >= lower_bound(2, None).unwrap(),
            "minimum {min} from {witness} under the bound"
        );
    }

    #[test]
    fn generator_is_deterministic_and_valid() {
        for seed in 0..40 {
            let a = random_monodromy(2, seed).unwrap();
            let b = random_monodromy(2, seed).unwrap();
            assert_eq!(a, b);
            assert!(validate_monodromy(&a).is_valid());
            let orbits: u64 = a.annuli.iter().map(|x| x.orbit_len).sum();
            assert!(orbits <= 2);
        }
        let five = random_monodromy(5, 11).unwrap();
        let orbits: u64 = five.annuli.iter().map(|x| x.orbit_len).sum();
        assert!(orbits <= 5);
    }

    #[test]
    fn generator_data_satisfies_identity() {
        for g in 2..=3 {
            for seed in 0..25 {
                let d = random_monodromy(g, seed).unwrap();
                let check = verify_main_identity(&d).unwrap();
                assert!(
                    check.equal,
                    "identity failed at g={g} seed={seed}: fiber {:?} vs map {:?}",
                    check.fiber, check.map
                );
            }
        }
    }
}
