//! Combinatorial pseudo-periodic monodromy data.
//!
//! A [`MonodromyData`] describes a negative-twist pseudo-periodic mapping
//! class at the orbit level: one record per orbit of periodic pieces, one
//! per orbit of cut-curve annuli. Operations compute the twist
//! coefficients, assemble the dual graph of the bounded fiber, evaluate
//! the delta invariants directly from the map, and check the uniform
//! lower bounds.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::chain_calculus::{fdtc_from_screw, hj_expand, synthesize_chain, SearchCaps};
use crate::error::{Error, Result};
use crate::fiber::{DeltaBreakdown, FiberGraph, FiberVertex};
use crate::rational::Rational;
use crate::valency::Valency;

/// One orbit of periodic pieces: the quotient surface piece with its sheet
/// count, branch data and named boundary slots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodicPart {
    pub id: String,
    /// Sheets over the quotient piece.
    pub mult: u64,
    pub quotient_genus: u64,
    /// Connected components of the preimage in the fiber surface.
    pub pieces: u64,
    #[serde(default)]
    pub branch_valencies: Vec<Valency>,
    #[serde(default)]
    pub slots: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnulusEnd {
    pub part: String,
    pub slot: String,
    pub valency: Valency,
}

/// One orbit of cut-curve annuli 1. Non-amphidrome orbits attach two
/// boundary-circle orbits (two ends); amphidrome orbits fold onto a single
/// attachment, given either once or as two identical entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnulusOrbit {
    pub id: String,
    pub orbit_len: u64,
    pub screw: Rational,
    pub amphidrome: bool,
    pub ends: Vec<AnnulusEnd>,
}

impl AnnulusOrbit {
    /// The two attachments; amphidrome orbits repeat their single one.
    fn attachments(&self) -> (&AnnulusEnd, &AnnulusEnd) {
        if self.ends.len() == 1 {
            (&self.ends[0], &self.ends[0])
        } else {
            (&self.ends[0], &self.ends[1])
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonodromyData {
    pub genus: u64,
    pub parts: Vec<PeriodicPart>,
    #[serde(default)]
    pub annuli: Vec<AnnulusOrbit>,
}

impl MonodromyData {
    pub fn from_json(text: &str) -> Result<MonodromyData> {
        let d: MonodromyData = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("monodromy file: {e}")))?;
        d.check_structure()?;
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("monodromy data serializes")
    }

    fn check_structure(&self) -> Result<()> {
        let mut part_ids = BTreeSet::new();
        for p in &self.parts {
            if !part_ids.insert(p.id.as_str()) {
                return Err(Error::Parse(format!("duplicate part id `{}`", p.id)));
            }
            let mut slot_ids = BTreeSet::new();
            for s in &p.slots {
                if !slot_ids.insert(s.as_str()) {
                    return Err(Error::Parse(format!(
                        "duplicate slot id `{s}` on part `{}`",
                        p.id
                    )));
                }
            }
        }
        let mut annulus_ids = BTreeSet::new();
        for a in &self.annuli {
            if !annulus_ids.insert(a.id.as_str()) {
                return Err(Error::Parse(format!("duplicate annulus id `{}`", a.id)));
            }
            if a.ends.is_empty() || a.ends.len() > 2 {
                return Err(Error::Parse(format!(
                    "annulus `{}` must list one or two ends",
                    a.id
                )));
            }
            for e in &a.ends {
                let part = self.part(&e.part).ok_or_else(|| {
                    Error::Parse(format!(
                        "annulus `{}` references unknown part `{}`",
                        a.id, e.part
                    ))
                })?;
                if !part.slots.iter().any(|s| s == &e.slot) {
                    return Err(Error::Parse(format!(
                        "annulus `{}` references unknown slot `{}` on part `{}`",
                        a.id, e.slot, e.part
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn part(&self, id: &str) -> Option<&PeriodicPart> {
        self.parts.iter().find(|p| p.id == id)
    }

    /// Total Euler characteristic carried by the periodic parts; annuli
    /// contribute zero.
    pub fn euler_characteristic(&self) -> i128 {
        self.parts.iter().map(part_chi).sum()
    }
}

fn part_chi(p: &PeriodicPart) -> i128 {
    let n = p.mult as i128;
    let base = 2 - 2 * p.quotient_genus as i128 - p.slots.len() as i128
        - p.branch_valencies.len() as i128;
    n * base + p.branch_valencies.iter().map(|v| v.m() as i128).sum::<i128>()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonodromyValidation {
    pub violations: Vec<String>,
}

impl MonodromyValidation {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check the valency semantics, slot matching, screw signs, orbit budget,
/// the Euler-characteristic identity, per-part piece genera and the total
/// valency congruence at every part. Lists every violation found.
pub fn validate_monodromy(d: &MonodromyData) -> MonodromyValidation {
    let mut violations = Vec::new();
    if let Err(e) = d.check_structure() {
        return MonodromyValidation {
            violations: vec![e.to_string()],
        };
    }

    if d.genus < 2 {
        violations.push(format!("genus {} is below 2", d.genus));
    }
    if d.parts.is_empty() {
        violations.push("no periodic parts".to_string());
    }

    for p in &d.parts {
        if p.mult == 0 {
            violations.push(format!("part `{}` has zero multiplicity", p.id));
            continue;
        }
        if p.pieces == 0 || p.mult % p.pieces != 0 {
            violations.push(format!(
                "part `{}`: piece count {} must divide the sheet count {}",
                p.id, p.pieces, p.mult
            ));
        }
        for v in &p.branch_valencies {
            if v.lambda() < 2 {
                violations.push(format!(
                    "part `{}`: branch valency {v} is a simple point",
                    p.id
                ));
            }
            if v.sheets() != p.mult {
                violations.push(format!(
                    "part `{}`: branch valency {v} does not cover {} sheets",
                    p.id, p.mult
                ));
            }
        }
    }

    // slot usage: every slot of every part consumed by exactly one end
    let mut used: BTreeMap<(String, String), u32> = BTreeMap::new();
    for a in &d.annuli {
        match (a.amphidrome, a.ends.len()) {
            (false, 2) => {}
            (true, 1) => {}
            (true, 2) if a.ends[0] == a.ends[1] => {}
            _ => {
                violations.push(format!(
                    "annulus `{}`: {} end(s) do not fit an {} orbit",
                    a.id,
                    a.ends.len(),
                    if a.amphidrome { "amphidrome" } else { "non-amphidrome" }
                ));
                continue;
            }
        }
        let (e1, e2) = a.attachments();
        let expected_m = if a.amphidrome {
            2 * a.orbit_len
        } else {
            a.orbit_len
        };
        let unique_ends: Vec<&AnnulusEnd> = if a.amphidrome { vec![e1] } else { vec![e1, e2] };
        for e in unique_ends {
            *used.entry((e.part.clone(), e.slot.clone())).or_insert(0) += 1;
            if e.valency.m() != expected_m {
                violations.push(format!(
                    "annulus `{}`: end valency {} should carry first entry {}",
                    a.id,
                    e.valency,
                    expected_m
                ));
            }
            if let Some(part) = d.part(&e.part) {
                if e.valency.sheets() != part.mult {
                    violations.push(format!(
                        "annulus `{}`: end valency {} does not cover the {} sheets of part `{}`",
                        a.id,
                        e.valency,
                        part.mult,
                        e.part
                    ));
                }
            }
        }
        if a.orbit_len == 0 {
            violations.push(format!("annulus `{}` has zero orbit length", a.id));
        }
        if !a.screw.is_negative() {
            violations.push(format!(
                "annulus `{}`: screw number {} is not negative",
                a.id, a.screw
            ));
        }
    }
    for p in &d.parts {
        for s in &p.slots {
            match used.get(&(p.id.clone(), s.clone())).copied().unwrap_or(0) {
                1 => {}
                0 => violations.push(format!("slot `{s}` on part `{}` is unused", p.id)),
                k => violations.push(format!(
                    "slot `{s}` on part `{}` is used by {k} annulus ends",
                    p.id
                )),
            }
        }
    }

    // orbit budget: an admissible system has at most g curves
    let total_curves: u64 = d.annuli.iter().map(|a| a.orbit_len).sum();
    if total_curves > d.genus {
        violations.push(format!(
            "{total_curves} cut curves exceed the genus bound {}",
            d.genus
        ));
    }

    // Euler characteristic identity
    let chi = d.euler_characteristic();
    let expect = 2 - 2 * d.genus as i128;
    if chi != expect {
        violations.push(format!(
            "Euler characteristic {chi} does not match 2 - 2g = {expect}"
        ));
    }

    // per-part piece genera
    for p in &d.parts {
        if let Err(e) = piece_genus_rh(d, &p.id) {
            violations.push(e.to_string());
        }
    }

    // total valency congruence at every part (forced by F.C = 0 on the
    // assembled fiber)
    for p in &d.parts {
        if p.mult == 0 {
            continue;
        }
        let mut sum: u128 = p
            .branch_valencies
            .iter()
            .map(|v| v.m() as u128 * v.sigma() as u128)
            .sum();
        for a in &d.annuli {
            let (e1, e2) = a.attachments();
            let ends: Vec<&AnnulusEnd> = if a.amphidrome { vec![e1] } else { vec![e1, e2] };
            for e in ends {
                if e.part == p.id {
                    sum += e.valency.m() as u128 * e.valency.sigma() as u128;
                }
            }
        }
        if sum % p.mult as u128 != 0 {
            violations.push(format!(
                "part `{}`: total valency {sum} is not 0 mod {}",
                p.id, p.mult
            ));
        }
    }

    // the decomposition must glue into one connected surface
    if !coarse_connected(d) {
        violations.push("parts and annuli do not form a connected surface".to_string());
    }

    MonodromyValidation { violations }
}

fn coarse_connected(d: &MonodromyData) -> bool {
    if d.parts.is_empty() {
        return false;
    }
    let index: BTreeMap<&str, usize> = d
        .parts
        .iter()
        .enumerate()
        .map(|(i, p)| (p.id.as_str(), i))
        .collect();
    let mut adj = vec![Vec::new(); d.parts.len()];
    for a in &d.annuli {
        let (e1, e2) = a.attachments();
        if let (Some(&i), Some(&j)) = (index.get(e1.part.as_str()), index.get(e2.part.as_str())) {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    let mut seen = vec![false; d.parts.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &o in &adj[v] {
            if !seen[o] {
                seen[o] = true;
                queue.push_back(o);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn require_valid(d: &MonodromyData) -> Result<()> {
    let v = validate_monodromy(d);
    if v.is_valid() {
        Ok(())
    } else {
        Err(Error::InvalidMonodromy(v.violations.join("; ")))
    }
}

/// Genus of each closed-up piece of a part orbit, by Riemann-Hurwitz:
/// `chi = n(2 - 2g' - b - s) + sum m_i` for the whole orbit, split across
/// the pieces, with the boundary circles counted from the slot valencies.
pub fn piece_genus_rh(d: &MonodromyData, part_id: &str) -> Result<u64> {
    let p = d
        .part(part_id)
        .ok_or_else(|| Error::InvalidMonodromy(format!("unknown part `{part_id}`")))?;
    if p.pieces == 0 {
        return Err(Error::InvalidMonodromy(format!(
            "part `{part_id}` has zero pieces"
        )));
    }
    let chi = part_chi(p);
    if chi % p.pieces as i128 != 0 {
        return Err(Error::InvalidMonodromy(format!(
            "part `{part_id}`: Euler characteristic {chi} does not split over {} pieces",
            p.pieces
        )));
    }
    let chi_piece = chi / p.pieces as i128;

    let mut circles: u128 = 0;
    for a in &d.annuli {
        let (e1, e2) = a.attachments();
        let ends: Vec<&AnnulusEnd> = if a.amphidrome { vec![e1] } else { vec![e1, e2] };
        for e in ends {
            if e.part == p.id {
                circles += e.valency.m() as u128;
            }
        }
    }
    if circles % p.pieces as u128 != 0 {
        return Err(Error::InvalidMonodromy(format!(
            "part `{part_id}`: {circles} boundary circles do not split over {} pieces",
            p.pieces
        )));
    }
    let per_piece = (circles / p.pieces as u128) as i128;

    let doubled = chi_piece + per_piece; // 2 - 2*genus
    if doubled % 2 != 0 {
        return Err(Error::InvalidMonodromy(format!(
            "part `{part_id}`: piece genus is not an integer"
        )));
    }
    let genus = (2 - doubled) / 2;
    u64::try_from(genus).map_err(|_| {
        Error::InvalidMonodromy(format!("part `{part_id}`: piece genus is negative"))
    })
}

/// Twist coefficient of every annulus orbit: `s/m`, or `s/(2m)` when
/// amphidrome.
pub fn fdtc_all(d: &MonodromyData) -> Result<BTreeMap<String, Rational>> {
    require_valid(d)?;
    let mut out = BTreeMap::new();
    for a in &d.annuli {
        out.insert(
            a.id.clone(),
            fdtc_from_screw(&a.screw, a.orbit_len, a.amphidrome)?,
        );
    }
    Ok(out)
}

/// Assemble the dual graph of the fiber bounded by this monodromy: one
/// principal vertex per part, an H-J tail per branch valency, a
/// synthesized chain per annulus orbit, amphidrome orbits ending in a
/// fork with two extra tails.
pub fn assemble_fiber(d: &MonodromyData) -> Result<FiberGraph> {
    require_valid(d)?;
    let mut vertices = Vec::new();
    let mut edges = Vec::new();

    for p in &d.parts {
        vertices.push(FiberVertex {
            id: p.id.clone(),
            mult: p.mult,
            genus: p.quotient_genus,
            piece_genus: Some(piece_genus_rh(d, &p.id)?),
        });
        for (k, v) in p.branch_valencies.iter().enumerate() {
            let tail = hj_expand(v)?;
            let mut prev = p.id.clone();
            for (j, &mult) in tail.entries().iter().enumerate().skip(1) {
                let id = format!("{}.b{}.{}", p.id, k, j);
                vertices.push(FiberVertex {
                    id: id.clone(),
                    mult,
                    genus: 0,
                    piece_genus: None,
                });
                edges.push((prev, id.clone()));
                prev = id;
            }
        }
    }

    for a in &d.annuli {
        let (e1, e2) = a.attachments();
        let chain = synthesize_chain(
            &e1.valency,
            &e2.valency,
            &a.screw,
            a.amphidrome,
            SearchCaps::default(),
        )?;
        let entries = chain.entries();
        if a.amphidrome {
            // interior plus fork, then the two stubs
            let mut prev = e1.part.clone();
            for (j, &mult) in entries.iter().enumerate().skip(1) {
                let id = if j == entries.len() - 1 {
                    format!("{}.f", a.id)
                } else {
                    format!("{}.{}", a.id, j)
                };
                vertices.push(FiberVertex {
                    id: id.clone(),
                    mult,
                    genus: 0,
                    piece_genus: None,
                });
                edges.push((prev, id.clone()));
                prev = id;
            }
            for s in 1..=2 {
                let id = format!("{}.s{}", a.id, s);
                vertices.push(FiberVertex {
                    id: id.clone(),
                    mult: a.orbit_len,
                    genus: 0,
                    piece_genus: None,
                });
                edges.push((prev.clone(), id));
            }
        } else {
            let mut prev = e1.part.clone();
            for (j, &mult) in entries.iter().enumerate().skip(1) {
                if j == entries.len() - 1 {
                    edges.push((prev.clone(), e2.part.clone()));
                    break;
                }
                let id = format!("{}.{}", a.id, j);
                vertices.push(FiberVertex {
                    id: id.clone(),
                    mult,
                    genus: 0,
                    piece_genus: None,
                });
                edges.push((prev, id.clone()));
                prev = id;
            }
        }
    }

    let g = FiberGraph {
        genus: Some(d.genus),
        vertices,
        edges,
    };
    g.check_structure()
        .map_err(|e| Error::InvalidMonodromy(format!("assembled fiber is malformed: {e}")))?;
    Ok(g)
}

/// Type of the cut curves in one annulus orbit, from the decomposition of
/// the fiber surface: 0 when deleting the orbit keeps it connected, else
/// the smaller side genus. `None` when the distribution of boundary
/// circles over multiple pieces is underdetermined.
pub fn cut_curve_type(d: &MonodromyData, orbit_id: &str) -> Result<Option<u64>> {
    let a = d
        .annuli
        .iter()
        .find(|a| a.id == orbit_id)
        .ok_or_else(|| Error::InvalidMonodromy(format!("unknown annulus `{orbit_id}`")))?;

    if d.parts.iter().any(|p| p.pieces > 1) {
        // which circles sit on which piece is not determined by the data
        return Ok(None);
    }

    let index: BTreeMap<&str, usize> = d
        .parts
        .iter()
        .enumerate()
        .map(|(i, p)| (p.id.as_str(), i))
        .collect();
    let (e1, e2) = a.attachments();
    let (p1, p2) = (index[e1.part.as_str()], index[e2.part.as_str()]);
    if p1 == p2 {
        // both sides of the deleted curves fall back onto one piece
        return Ok(Some(0));
    }

    // connectivity without this orbit's annuli
    let mut adj = vec![Vec::new(); d.parts.len()];
    for other in &d.annuli {
        if other.id == a.id {
            continue;
        }
        let (f1, f2) = other.attachments();
        let (q1, q2) = (index[f1.part.as_str()], index[f2.part.as_str()]);
        adj[q1].push(q2);
        adj[q2].push(q1);
    }
    let mut seen = vec![false; d.parts.len()];
    let mut queue = VecDeque::from([p1]);
    seen[p1] = true;
    while let Some(v) = queue.pop_front() {
        for &o in &adj[v] {
            if !seen[o] {
                seen[o] = true;
                queue.push_back(o);
            }
        }
    }
    if seen[p2] {
        return Ok(Some(0));
    }

    let side_genus = |side: &dyn Fn(usize) -> bool| -> Result<u64> {
        let chi: i128 = d
            .parts
            .iter()
            .enumerate()
            .filter(|(i, _)| side(*i))
            .map(|(_, p)| part_chi(p))
            .sum();
        let open = a.orbit_len as i128;
        let doubled = chi + open; // 2 - 2*genus
        if doubled % 2 != 0 {
            return Err(Error::InvalidMonodromy(format!(
                "annulus `{}`: side genus is not an integer",
                a.id
            )));
        }
        u64::try_from((2 - doubled) / 2).map_err(|_| {
            Error::InvalidMonodromy(format!("annulus `{}`: side genus is negative", a.id))
        })
    };
    let in_a = |i: usize| seen[i];
    let in_b = |i: usize| !seen[i];
    let ga = side_genus(&in_a)?;
    let gb = side_genus(&in_b)?;
    Ok(Some(ga.min(gb)))
}

/// Delta invariants straight from the map: each orbit contributes
/// `orbit_len * |c|`, split by cut-curve type.
pub fn delta_from_map(d: &MonodromyData) -> Result<DeltaBreakdown> {
    require_valid(d)?;
    let mut delta = DeltaBreakdown::zero();
    for a in &d.annuli {
        let c = fdtc_from_screw(&a.screw, a.orbit_len, a.amphidrome)?;
        let contribution = Rational::from(a.orbit_len) * c.abs();
        let t = cut_curve_type(d, &a.id)?;
        delta.add(t, &contribution);
    }
    Ok(delta)
}

/// Both computations of the delta invariants, compared exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    /// Through the assembled fiber graph.
    pub fiber: DeltaBreakdown,
    /// Through the sum of twist coefficients.
    pub map: DeltaBreakdown,
    pub equal: bool,
}

/// Run the assembled-fiber pipeline and the twist-coefficient pipeline
/// independently and compare every component of delta exactly.
pub fn verify_main_identity(d: &MonodromyData) -> Result<IdentityCheck> {
    let graph = assemble_fiber(d)?;
    let fiber = crate::fiber::delta_invariants(&graph)?.delta;
    let map = delta_from_map(d)?;
    let equal = fiber == map;
    Ok(IdentityCheck { fiber, map, equal })
}

/// Uniform lower bound for non-zero twist coefficients at genus `g`,
/// overall or for cut curves of a given type.
pub fn lower_bound(g: u64, node_type: Option<u64>) -> Result<Rational> {
    if g < 2 {
        return Err(Error::InvalidMonodromy(format!("genus {g} is below 2")));
    }
    let big = |x: u128| BigInt::from(x);
    let g128 = g as u128;
    let den = match node_type {
        None => {
            if g % 2 == 0 {
                big(4 * g128 * (g128 + 1) * (g128 + 1))
            } else {
                big(4 * g128 * g128 * (g128 + 2))
            }
        }
        Some(0) => big(4 * g128 * g128 * g128),
        Some(i) => {
            if i > g / 2 {
                return Err(Error::InvalidMonodromy(format!(
                    "type {i} out of range for genus {g}"
                )));
            }
            let i = i as u128;
            big(g128 * (4 * i + 2) * (4 * (g128 - i) + 2))
        }
    };
    Rational::new(BigInt::from(1), den)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub annulus: String,
    pub fdtc_abs: Rational,
    pub node_type: Option<u64>,
    pub bound: Rational,
    pub type_bound: Option<Rational>,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub checks: Vec<BoundCheck>,
}

impl BoundsReport {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

/// Assert `|c| >= 1/(4g(g+1)^2)`-style bounds for every orbit; a violation
/// indicates invalid input data.
pub fn check_bounds(d: &MonodromyData) -> Result<BoundsReport> {
    require_valid(d)?;
    let overall = lower_bound(d.genus, None)?;
    let mut checks = Vec::new();
    for a in &d.annuli {
        let c = fdtc_from_screw(&a.screw, a.orbit_len, a.amphidrome)?.abs();
        let node_type = cut_curve_type(d, &a.id)?;
        let type_bound = match node_type {
            Some(i) => Some(lower_bound(d.genus, Some(i))?),
            None => None,
        };
        let ok = c >= overall
            && match &type_bound {
                Some(tb) => &c >= tb,
                None => true,
            };
        checks.push(BoundCheck {
            annulus: a.id.clone(),
            fdtc_abs: c,
            node_type,
            bound: overall.clone(),
            type_bound,
            ok,
        });
    }
    Ok(BoundsReport { checks })
}
