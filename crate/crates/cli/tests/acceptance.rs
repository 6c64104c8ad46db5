//! Acceptance suite: the headline identities and bounds, reproduced
//! exactly at desk scale. Each test prints one pass/fail line (visible
//! with `cargo test --test acceptance -- --nocapture`) and enforces its
//! wall-clock budget.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use fdtc_core::chain_calculus::{
    chain_h, chain_valencies, fdtc_from_chain, hj_expand, screw_number, semistable_node_count,
    synthesize_chain, SearchCaps,
};
use fdtc_core::enumeration::{enumerate_chains, extremal_fdtc, random_monodromy, EnumSpec};
use fdtc_core::monodromy::{
    cut_curve_type, lower_bound, piece_genus_rh, validate_monodromy, verify_main_identity,
    MonodromyData,
};
use fdtc_core::rational::Rational;
use fdtc_core::valency::Valency;
use num_bigint::BigInt;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

struct Criterion {
    name: &'static str,
    budget: Duration,
    started: Instant,
}

impl Criterion {
    fn start(name: &'static str, budget: Duration) -> Criterion {
        Criterion {
            name,
            budget,
            started: Instant::now(),
        }
    }

    fn pass(self) {
        let elapsed = self.started.elapsed();
        println!(
            "acceptance {}: PASS in {:.2?} (budget {:?})",
            self.name, elapsed, self.budget
        );
        assert!(
            elapsed <= self.budget,
            "{} exceeded its {:?} budget: {:?}",
            self.name,
            self.budget,
            elapsed
        );
    }
}

/// Criterion 1: the genus-2 worked fiber graph analyzed through the real
/// CLI reports two principal components, the (6,5,4) chain with H = 1/12,
/// the four tail valencies and delta = 1/12.
#[test]
fn criterion_1_worked_fiber_golden() {
    let c = Criterion::start("1 worked fiber golden", Duration::from_secs(1));
    let out = Command::new(env!("CARGO_BIN_EXE_fdtc"))
        .args(["analyze", data("example2_3.json").to_str().unwrap(), "--json"])
        .output()
        .expect("spawn fdtc");
    assert!(out.status.success());
    let report: fdtc_core::fiber::FiberReport =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();

    assert_eq!(report.principal.len(), 2);
    assert_eq!(report.chains.len(), 1);
    assert_eq!(report.chains[0].report.seq.entries(), &[6, 5, 4]);
    assert_eq!(report.chains[0].report.h, rat("1/12"));
    let mut valencies: Vec<(u64, u64, u64)> = report
        .tails
        .iter()
        .map(|t| (t.valency.m(), t.valency.lambda(), t.valency.sigma()))
        .collect();
    valencies.sort();
    assert_eq!(valencies, vec![(1, 4, 1), (2, 2, 1), (2, 3, 2), (3, 2, 1)]);
    assert_eq!(report.delta.total, rat("1/12"));
    c.pass();
}

/// Criterion 2: for 1000 seeded monodromy data at genus 2 through 5, the
/// assembled-fiber pipeline and the twist-coefficient pipeline agree on
/// delta and on every delta_i, exactly.
#[test]
fn criterion_2_identity_on_random_corpus() {
    let c = Criterion::start("2 identity on random corpus", Duration::from_secs(300));
    let mut count = 0;
    for g in 2..=5u64 {
        for seed in 0..250u64 {
            let d = random_monodromy(g, seed).expect("generator");
            assert!(validate_monodromy(&d).is_valid(), "g={g} seed={seed}");
            let check = verify_main_identity(&d).expect("verify");
            assert!(
                check.equal,
                "pipelines disagree at g={g} seed={seed}: {:?} vs {:?}",
                check.fiber, check.map
            );
            assert_eq!(check.fiber.total, check.map.total);
            assert_eq!(check.fiber.by_type, check.map.by_type);
            assert_eq!(check.fiber.untyped, check.map.untyped);
            count += 1;
        }
    }
    assert!(count >= 1000);
    c.pass();
}

/// Criterion 3: every enumerated negative-twist chain with entries up to
/// 30 and length up to 8 is reproduced by synthesizing it back from its
/// valencies and screw number, and satisfies |c| = H/m.
#[test]
fn criterion_3_chain_round_trips() {
    let c = Criterion::start("3 chain round trips", Duration::from_secs(300));
    let caps = SearchCaps {
        max_entry: 30,
        max_len: 8,
    };
    let mut count = 0usize;
    for amph in [false, true] {
        let spec = EnumSpec::new(30, 8).unwrap().with_amphidrome(Some(amph));
        for chain in enumerate_chains(&spec) {
            let (v1, v2) = chain_valencies(&chain).unwrap();
            let s = screw_number(&chain).unwrap();
            let again = synthesize_chain(&v1, &v2, &s, amph, caps)
                .unwrap_or_else(|e| panic!("resynthesis of {chain} failed: {e}"));
            assert_eq!(again, chain);

            let cval = fdtc_from_chain(&chain).unwrap();
            let h = chain_h(chain.seq());
            assert_eq!(cval.abs(), h / Rational::from(chain.orbit_len()));
            count += 1;
        }
    }
    println!("  round-tripped {count} chains");
    assert!(count > 100_000);
    c.pass();
}

/// Criterion 4: for every enumerated chain and d the lcm of its entries,
/// the semistable node count equals d * H as an exact integer.
#[test]
fn criterion_4_semistable_oracle() {
    let c = Criterion::start("4 semistable node oracle", Duration::from_secs(60));
    let spec = EnumSpec::new(30, 8).unwrap();
    for chain in enumerate_chains(&spec) {
        let seq = chain.seq();
        let d = seq.entry_lcm();
        let (nodes, _) = semistable_node_count(seq, &d).unwrap();
        let product = Rational::new(BigInt::from(d), BigInt::from(1u32)).unwrap() * chain_h(seq);
        assert_eq!(
            product.to_integer().expect("d*H is an integer"),
            BigInt::from(nodes),
            "oracle mismatch on {chain}"
        );
    }
    // the worked example by hand: 60/30 + 60/20 = 5 nodes
    let seq = fdtc_core::ChainSeq::principal(vec![6, 5, 4]).unwrap();
    let (nodes, chains) =
        semistable_node_count(&seq, &num_bigint::BigUint::from(60u32)).unwrap();
    assert_eq!(nodes, num_bigint::BigUint::from(5u32));
    assert_eq!(chains, 1);
    c.pass();
}

/// Criterion 5: extremal scans over the admissible enumerated set at caps
/// 60/8 stay above the uniform lower bounds, overall at genus 2 and 3 and
/// per type at genus 2.
#[test]
fn criterion_5_extremal_bounds() {
    let c = Criterion::start("5 extremal bounds", Duration::from_secs(600));
    let spec2 = EnumSpec::new(60, 8).unwrap().with_genus(2);
    let spec3 = EnumSpec::new(60, 8).unwrap().with_genus(3);

    let (min, witness) = extremal_fdtc(&spec2, None).unwrap();
    println!("  g=2 minimum |c| = {min} at {witness}");
    assert!(min >= lower_bound(2, None).unwrap());

    let (min, witness) = extremal_fdtc(&spec3, None).unwrap();
    println!("  g=3 minimum |c| = {min} at {witness}");
    assert!(min >= lower_bound(3, None).unwrap());

    let (min0, _) = extremal_fdtc(&spec2, Some(0)).unwrap();
    assert!(min0 >= rat("1/32"));
    let (min1, _) = extremal_fdtc(&spec2, Some(1)).unwrap();
    assert!(min1 >= rat("1/72"));
    c.pass();
}

/// Criterion 6: for every coprime pair (sigma, lambda) with lambda up to
/// 200, the descent of (1, lambda, sigma) sums 1/(b_i b_{i+1}) to
/// sigma_hat / lambda, against an extended-gcd oracle.
#[test]
fn criterion_6_hj_sum_identity() {
    let c = Criterion::start("6 H-J sum identity", Duration::from_secs(60));
    fn inverse_mod(a: u64, n: u64) -> u64 {
        let (mut r0, mut r1) = (n as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        assert_eq!(r0, 1, "not coprime");
        let inv = t0.rem_euclid(n as i128) as u64;
        if inv == 0 {
            n
        } else {
            inv
        }
    }
    let mut pairs = 0;
    for lambda in 2u64..=200 {
        for sigma in 1..lambda {
            if num_integer::gcd(sigma, lambda) != 1 {
                continue;
            }
            let tail = hj_expand(&Valency::new(1, lambda, sigma).unwrap()).unwrap();
            let sum = chain_h(&tail);
            assert_eq!(
                sum,
                Rational::ratio(inverse_mod(sigma, lambda), lambda),
                "sum mismatch at sigma={sigma} lambda={lambda}"
            );
            pairs += 1;
        }
    }
    println!("  verified {pairs} coprime pairs");
    c.pass();
}

/// Criterion 7: over the full random corpus, delta vanishes exactly when
/// every twist coefficient does, which for negative twist means no cut
/// curves at all.
#[test]
fn criterion_7_vanishing_characterization() {
    let c = Criterion::start("7 vanishing characterization", Duration::from_secs(120));
    let mut smooth_seen = false;
    let mut singular_seen = false;
    for g in 2..=5u64 {
        for seed in 0..250u64 {
            let d = random_monodromy(g, seed).unwrap();
            let delta = fdtc_core::monodromy::delta_from_map(&d).unwrap();
            let fdtcs = fdtc_core::monodromy::fdtc_all(&d).unwrap();
            let all_zero = fdtcs.values().all(|c| c.is_zero());
            assert_eq!(delta.total.is_zero(), all_zero, "g={g} seed={seed}");
            assert_eq!(all_zero, d.annuli.is_empty(), "g={g} seed={seed}");
            // per-type vanishing: delta_i = 0 iff no type-i orbit
            for (i, q) in &delta.by_type {
                let has_type_i = d
                    .annuli
                    .iter()
                    .any(|a| cut_curve_type(&d, &a.id).unwrap() == Some(*i));
                assert_eq!(!q.is_zero(), has_type_i, "g={g} seed={seed} type {i}");
            }
            smooth_seen |= d.annuli.is_empty();
            singular_seen |= !d.annuli.is_empty();
        }
    }
    assert!(smooth_seen && singular_seen, "corpus misses one side of the iff");
    c.pass();
}

/// Criterion 8: the worked genus-2 monodromy has Euler characteristic -2,
/// piece genera (1,1), a type-1 cut curve, and delta_1 = 1/12.
#[test]
fn criterion_8_worked_monodromy_euler() {
    let c = Criterion::start("8 worked monodromy Euler data", Duration::from_secs(5));
    let d = MonodromyData::from_json(&std::fs::read_to_string(data("worked_g2.json")).unwrap())
        .unwrap();
    assert!(validate_monodromy(&d).is_valid());
    assert_eq!(d.euler_characteristic(), -2);
    assert_eq!(piece_genus_rh(&d, "P1").unwrap(), 1);
    assert_eq!(piece_genus_rh(&d, "P2").unwrap(), 1);
    assert_eq!(cut_curve_type(&d, "A1").unwrap(), Some(1));
    let delta = fdtc_core::monodromy::delta_from_map(&d).unwrap();
    assert_eq!(delta.typed(1), rat("1/12"));
    assert_eq!(delta.total, rat("1/12"));
    c.pass();
}

fn rat(s: &str) -> Rational {
    s.parse().unwrap()
}
