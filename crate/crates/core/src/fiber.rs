//! Decorated dual graphs of singular fibers.
//!
//! A [`FiberGraph`] is the dual graph of a minimal normal-crossing fiber:
//! vertices carry multiplicities and genera, edges are nodes. Analysis
//! splits the graph into principal components, principal chains and H-J
//! tails, computes the chain invariants, classifies chains by node type
//! and aggregates the delta invariants.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::chain::{ChainSeq, NegativeTwistChain};
use crate::chain_calculus::{hj_expand, hj_valency, ChainReport};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::valency::Valency;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberVertex {
    pub id: String,
    pub mult: u64,
    pub genus: u64,
    /// Genus of the corresponding piece of the generic fiber surface.
    /// Required to type chains of non-reduced fibers; filled in by
    /// assembly, optional in hand-written files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub piece_genus: Option<u64>,
}

/// Dual graph of a singular fiber. Edges are unordered; a loop repeats the
/// vertex id. `genus` is the genus of the fibration when the graph alone
/// does not determine it (non-reduced fibers).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberGraph {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<u64>,
    pub vertices: Vec<FiberVertex>,
    pub edges: Vec<(String, String)>,
}

impl FiberGraph {
    /// Parse from the fiber file format, rejecting unknown keys, duplicate
    /// or dangling ids and zero multiplicities.
    pub fn from_json(text: &str) -> Result<FiberGraph> {
        let g: FiberGraph = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("fiber file: {e}")))?;
        g.check_structure()?;
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fiber graph serializes")
    }

    pub(crate) fn check_structure(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for v in &self.vertices {
            if !seen.insert(v.id.as_str()) {
                return Err(Error::Parse(format!("duplicate vertex id `{}`", v.id)));
            }
            if v.mult == 0 {
                return Err(Error::Parse(format!(
                    "vertex `{}` has zero multiplicity",
                    v.id
                )));
            }
        }
        for (a, b) in &self.edges {
            for id in [a, b] {
                if !seen.contains(id.as_str()) {
                    return Err(Error::Parse(format!(
                        "edge endpoint `{id}` is not a vertex id"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Outcome of [`validate_fiber`]: empty `violations` means valid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberValidation {
    pub violations: Vec<String>,
}

impl FiberValidation {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Per-chain entry of a [`FiberReport`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberChain {
    pub ends: (String, String),
    #[serde(flatten)]
    pub report: ChainReport,
    /// Node type `i` of the chain, when determinable from the decoration.
    pub node_type: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberTail {
    pub anchor: String,
    pub seq: ChainSeq,
    pub valency: Valency,
}

/// Delta invariants split by node type, with an `untyped` bucket for
/// chains the decoration cannot classify.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaBreakdown {
    pub by_type: BTreeMap<u64, Rational>,
    pub untyped: Rational,
    pub total: Rational,
}

impl DeltaBreakdown {
    pub fn zero() -> Self {
        DeltaBreakdown {
            by_type: BTreeMap::new(),
            untyped: Rational::zero(),
            total: Rational::zero(),
        }
    }

    pub fn add(&mut self, node_type: Option<u64>, amount: &Rational) {
        match node_type {
            Some(i) => {
                let slot = self.by_type.entry(i).or_insert_with(Rational::zero);
                *slot += amount;
            }
            None => self.untyped += amount,
        }
        self.total += amount;
    }

    pub fn merge(&mut self, other: &DeltaBreakdown) {
        for (i, q) in &other.by_type {
            let slot = self.by_type.entry(*i).or_insert_with(Rational::zero);
            *slot += q;
        }
        self.untyped += &other.untyped;
        self.total += &other.total;
    }

    pub fn typed(&self, i: u64) -> Rational {
        self.by_type.get(&i).cloned().unwrap_or_else(Rational::zero)
    }
}

/// Full analysis of one fiber graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberReport {
    pub genus: Option<u64>,
    pub principal: Vec<String>,
    pub chains: Vec<FiberChain>,
    pub tails: Vec<FiberTail>,
    pub delta: DeltaBreakdown,
}

// ---------------------------------------------------------------------------
// indexed view

struct Indexed<'a> {
    g: &'a FiberGraph,
    ids: Vec<&'a str>,
    /// adjacency as (edge id, other endpoint); loops appear twice
    adj: Vec<Vec<(usize, usize)>>,
    edges: Vec<(usize, usize)>,
}

impl<'a> Indexed<'a> {
    fn new(g: &'a FiberGraph) -> Result<Indexed<'a>> {
        g.check_structure()?;
        let ids: Vec<&str> = g.vertices.iter().map(|v| v.id.as_str()).collect();
        let index: BTreeMap<&str, usize> =
            ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let mut adj = vec![Vec::new(); ids.len()];
        let mut edges = Vec::new();
        for (k, (a, b)) in g.edges.iter().enumerate() {
            let (ia, ib) = (index[a.as_str()], index[b.as_str()]);
            edges.push((ia, ib));
            adj[ia].push((k, ib));
            adj[ib].push((k, ia));
        }
        Ok(Indexed { g, ids, adj, edges })
    }

    fn mult(&self, v: usize) -> u64 {
        self.g.vertices[v].mult
    }

    fn genus(&self, v: usize) -> u64 {
        self.g.vertices[v].genus
    }

    fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    fn has_loop(&self, v: usize) -> bool {
        self.adj[v].iter().any(|&(_, o)| o == v)
    }

    fn is_principal(&self, v: usize) -> bool {
        self.genus(v) > 0 || self.has_loop(v) || self.degree(v) >= 3
    }

    fn connected(&self) -> bool {
        if self.ids.is_empty() {
            return false;
        }
        let mut seen = vec![false; self.ids.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &(_, o) in &self.adj[v] {
                if !seen[o] {
                    seen[o] = true;
                    queue.push_back(o);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// F.C = 0 at v: the multiplicities across all incident edges sum to
    /// 0 mod mult(v), loops counting mult(v) twice.
    fn congruent_at(&self, v: usize) -> bool {
        let sum: u128 = self.adj[v].iter().map(|&(_, o)| self.mult(o) as u128).sum();
        sum % self.mult(v) as u128 == 0
    }
}

// ---------------------------------------------------------------------------
// extraction

struct RawChain {
    ends: (usize, usize),
    /// interior vertices, in order from ends.0 to ends.1
    interior: Vec<usize>,
    edge_ids: Vec<usize>,
}

struct RawTail {
    anchor: usize,
    /// vertices outward from the anchor, excluding it
    branch: Vec<usize>,
}

struct Extraction {
    chains: Vec<RawChain>,
    tails: Vec<RawTail>,
    violations: Vec<String>,
}

impl RawChain {
    fn seq(&self, ix: &Indexed) -> Vec<u64> {
        let mut entries = vec![ix.mult(self.ends.0)];
        entries.extend(self.interior.iter().map(|&v| ix.mult(v)));
        entries.push(ix.mult(self.ends.1));
        entries
    }

    fn reverse(&mut self) {
        std::mem::swap(&mut self.ends.0, &mut self.ends.1);
        self.interior.reverse();
        self.edge_ids.reverse();
    }
}

impl RawTail {
    fn seq(&self, ix: &Indexed) -> Vec<u64> {
        let mut entries = vec![ix.mult(self.anchor)];
        entries.extend(self.branch.iter().map(|&v| ix.mult(v)));
        entries
    }
}

fn extract(ix: &Indexed) -> Extraction {
    let n = ix.ids.len();
    let principal: Vec<bool> = (0..n).map(|v| ix.is_principal(v)).collect();
    let mut edge_used = vec![false; ix.edges.len()];
    let mut chains = Vec::new();
    let mut tails = Vec::new();
    let mut violations = Vec::new();

    for v in 0..n {
        if !principal[v] {
            continue;
        }
        for &(e, first) in &ix.adj[v] {
            if edge_used[e] {
                continue;
            }
            edge_used[e] = true;
            if principal[first] {
                // direct edge between principal components (possibly a loop)
                chains.push(RawChain {
                    ends: (v, first),
                    interior: Vec::new(),
                    edge_ids: vec![e],
                });
                continue;
            }
            // walk through non-principal vertices
            let mut interior = vec![first];
            let mut edge_ids = vec![e];
            let mut prev_edge = e;
            let mut current = first;
            loop {
                let next: Vec<(usize, usize)> = ix.adj[current]
                    .iter()
                    .copied()
                    .filter(|&(k, _)| k != prev_edge)
                    .collect();
                match next.len() {
                    0 => {
                        // dead end: H-J tail from v outward
                        tails.push(RawTail {
                            anchor: v,
                            branch: interior,
                        });
                        break;
                    }
                    1 => {
                        let (k, o) = next[0];
                        edge_used[k] = true;
                        edge_ids.push(k);
                        prev_edge = k;
                        if principal[o] {
                            chains.push(RawChain {
                                ends: (v, o),
                                interior,
                                edge_ids,
                            });
                            break;
                        }
                        interior.push(o);
                        current = o;
                    }
                    _ => {
                        violations.push(format!(
                            "non-principal vertex `{}` has degree {}",
                            ix.ids[current],
                            ix.degree(current)
                        ));
                        break;
                    }
                }
            }
        }
    }

    if let Some(k) = edge_used.iter().position(|u| !u) {
        let (a, b) = ix.edges[k];
        violations.push(format!(
            "edge `{}`-`{}` lies on a cycle of non-principal vertices with no principal anchor",
            ix.ids[a], ix.ids[b]
        ));
    }

    Extraction {
        chains,
        tails,
        violations,
    }
}

// ---------------------------------------------------------------------------
// amphidrome fork recognition

/// A chain end is a fork when it closes an amphidrome annulus: a rational
/// vertex of multiplicity d(a) (even) whose only other neighbours are two
/// dead-end tails of multiplicity d/2.
fn is_fork_end(ix: &Indexed, extraction: &Extraction, chain: &RawChain, end: usize) -> bool {
    let d = crate::chain::normalize_seq(&chain.seq(ix)).0;
    if d % 2 != 0 {
        return false;
    }
    if ix.genus(end) != 0 || ix.mult(end) != d || ix.degree(end) != 3 {
        return false;
    }
    let stubs: Vec<&RawTail> = extraction
        .tails
        .iter()
        .filter(|t| t.anchor == end)
        .collect();
    stubs.len() == 2
        && stubs
            .iter()
            .all(|t| t.branch.len() == 1 && ix.mult(t.branch[0]) == d / 2)
}

/// Decide amphidromy and orient the chain with the fork last.
fn orient_chain(ix: &Indexed, extraction: &Extraction, chain: &mut RawChain) -> bool {
    let fork0 = is_fork_end(ix, extraction, chain, chain.ends.0);
    let fork1 = is_fork_end(ix, extraction, chain, chain.ends.1);
    match (fork0, fork1) {
        (false, false) => false,
        (true, false) => {
            chain.reverse();
            true
        }
        (false, true) => true,
        (true, true) => {
            // Constant chains are symmetric; keep the end that carries
            // piece data as the attachment side.
            let pg = |v: usize| ix.g.vertices[v].piece_genus.is_some();
            if pg(chain.ends.1) && !pg(chain.ends.0) {
                chain.reverse();
            }
            true
        }
    }
}

// ---------------------------------------------------------------------------
// public operations

/// Check connectivity, the vertex congruence `F.C = 0`, that every
/// dead-end branch is a canonical H-J tail, and that every principal
/// chain has the negative-twist shape. Lists every violation found.
pub fn validate_fiber(g: &FiberGraph) -> FiberValidation {
    let ix = match Indexed::new(g) {
        Ok(ix) => ix,
        Err(e) => {
            return FiberValidation {
                violations: vec![e.to_string()],
            }
        }
    };
    let mut violations = Vec::new();
    if g.vertices.is_empty() {
        violations.push("fiber graph has no vertices".to_string());
        return FiberValidation { violations };
    }
    if !ix.connected() {
        violations.push("fiber graph is not connected".to_string());
    }
    for v in 0..ix.ids.len() {
        if !ix.congruent_at(v) {
            violations.push(format!(
                "vertex `{}`: neighbour multiplicities are not 0 mod {}",
                ix.ids[v],
                ix.mult(v)
            ));
        }
    }

    let mut extraction = extract(&ix);
    violations.append(&mut extraction.violations);

    for tail in &extraction.tails {
        let entries = tail.seq(&ix);
        match canonical_tail(&entries) {
            Ok(()) => {}
            Err(msg) => violations.push(format!(
                "dead-end branch at `{}` with multiplicities {:?}: {}",
                ix.ids[tail.anchor], entries, msg
            )),
        }
    }

    let mut raw_chains = std::mem::take(&mut extraction.chains);
    for chain in &mut raw_chains {
        let amph = orient_chain(&ix, &extraction, chain);
        if let Err(e) = NegativeTwistChain::new(chain.seq(&ix), amph) {
            violations.push(format!(
                "principal chain `{}`-`{}`: {}",
                ix.ids[chain.ends.0], ix.ids[chain.ends.1], e
            ));
        }
    }

    FiberValidation { violations }
}

/// A dead-end branch is admissible when it is exactly the H-J descent of
/// its multiple-point valency.
fn canonical_tail(entries: &[u64]) -> std::result::Result<(), String> {
    let seq = ChainSeq::hj_tail(entries.to_vec()).map_err(|e| e.to_string())?;
    let v = hj_valency(&seq).map_err(|e| e.to_string())?;
    let expanded = hj_expand(&v).map_err(|e| e.to_string())?;
    if expanded.entries() != entries {
        return Err(format!(
            "not a Hirzebruch-Jung descent (canonical tail for {v} is {expanded})"
        ));
    }
    Ok(())
}

/// Ids of the principal components: positive genus, a loop, or meeting
/// other components in at least 3 points.
pub fn principal_components(g: &FiberGraph) -> Result<BTreeSet<String>> {
    let ix = Indexed::new(g)?;
    Ok((0..ix.ids.len())
        .filter(|&v| ix.is_principal(v))
        .map(|v| ix.ids[v].to_string())
        .collect())
}

/// The arithmetic genus of the fibration: computed for reduced graphs
/// (sum of genera plus cycle rank), otherwise taken from the `genus`
/// field.
pub fn fiber_genus(g: &FiberGraph) -> Result<u64> {
    let reduced = g.vertices.iter().all(|v| v.mult == 1);
    if reduced {
        let ix = Indexed::new(g)?;
        if !ix.connected() {
            return Err(Error::InvalidFiber("graph is not connected".into()));
        }
        let cycle_rank = g.edges.len() as u64 + 1 - g.vertices.len() as u64;
        let genus = g.vertices.iter().map(|v| v.genus).sum::<u64>() + cycle_rank;
        if let Some(hint) = g.genus {
            if hint != genus {
                return Err(Error::InvalidFiber(format!(
                    "declared genus {hint} but the reduced graph has genus {genus}"
                )));
            }
        }
        return Ok(genus);
    }
    g.genus.ok_or_else(|| {
        Error::InvalidFiber("non-reduced fiber needs an explicit genus".into())
    })
}

/// Chains (with end ids) and tails of a valid graph, canonically oriented
/// and deterministically ordered.
pub fn extract_chains(g: &FiberGraph) -> Result<(Vec<(String, String, ChainSeq)>, Vec<ChainSeq>)> {
    let analysis = FiberAnalysis::new(g)?;
    let chains = analysis
        .report
        .chains
        .iter()
        .map(|c| (c.ends.0.clone(), c.ends.1.clone(), c.report.seq.clone()))
        .collect();
    let tails = analysis
        .report
        .tails
        .iter()
        .map(|t| t.seq.clone())
        .collect();
    Ok((chains, tails))
}

/// Analysis pipeline over a validated graph.
pub struct FiberAnalysis {
    report: FiberReport,
}

impl FiberAnalysis {
    pub fn new(g: &FiberGraph) -> Result<FiberAnalysis> {
        let validation = validate_fiber(g);
        if !validation.is_valid() {
            return Err(Error::InvalidFiber(validation.violations.join("; ")));
        }
        let ix = Indexed::new(g)?;
        let mut extraction = extract(&ix);
        let genus = fiber_genus(g).ok();

        // orient and classify every chain
        let mut chains: Vec<(RawChain, bool)> = Vec::new();
        let raw = std::mem::take(&mut extraction.chains);
        for mut chain in raw {
            let amph = orient_chain(&ix, &extraction, &mut chain);
            if !amph {
                canonical_orientation(&ix, &mut chain);
            }
            chains.push((chain, amph));
        }
        extraction.chains = chains.iter().map(|(c, _)| clone_raw(c)).collect();

        let mut fiber_chains = Vec::new();
        for (chain, amph) in &chains {
            let ntc = NegativeTwistChain::new(chain.seq(&ix), *amph)?;
            let report = ChainReport::for_chain(&ntc)?;
            let node_type = chain_node_type(&ix, &chains, chain, *amph);
            fiber_chains.push(FiberChain {
                ends: (
                    ix.ids[chain.ends.0].to_string(),
                    ix.ids[chain.ends.1].to_string(),
                ),
                report,
                node_type,
            });
        }
        fiber_chains.sort_by(|a, b| {
            (&a.ends, a.report.seq.entries()).cmp(&(&b.ends, b.report.seq.entries()))
        });

        let mut tails = Vec::new();
        for tail in &extraction.tails {
            let seq = ChainSeq::hj_tail(tail.seq(&ix))?;
            let valency = hj_valency(&seq)?;
            tails.push(FiberTail {
                anchor: ix.ids[tail.anchor].to_string(),
                seq,
                valency,
            });
        }
        tails.sort_by(|a, b| {
            (&a.anchor, a.seq.entries()).cmp(&(&b.anchor, b.seq.entries()))
        });

        let mut delta = DeltaBreakdown::zero();
        for c in &fiber_chains {
            delta.add(c.node_type, &c.report.h);
        }

        let principal = principal_components(g)?.into_iter().collect();

        Ok(FiberAnalysis {
            report: FiberReport {
                genus,
                principal,
                chains: fiber_chains,
                tails,
                delta,
            },
        })
    }

    pub fn report(&self) -> &FiberReport {
        &self.report
    }

    pub fn into_report(self) -> FiberReport {
        self.report
    }
}

fn clone_raw(c: &RawChain) -> RawChain {
    RawChain {
        ends: c.ends,
        interior: c.interior.clone(),
        edge_ids: c.edge_ids.clone(),
    }
}

/// Non-amphidrome chains are stored with the lexicographically smaller
/// (end id, reading) first, so reports are byte-stable.
fn canonical_orientation(ix: &Indexed, chain: &mut RawChain) {
    let key = |ends: (usize, usize), seq: &[u64]| -> (String, String, Vec<u64>) {
        (
            ix.ids[ends.0].to_string(),
            ix.ids[ends.1].to_string(),
            seq.to_vec(),
        )
    };
    let fwd = key(chain.ends, &chain.seq(ix));
    let mut rev = clone_raw(chain);
    rev.reverse();
    let bwd = key(rev.ends, &rev.seq(ix));
    if bwd < fwd {
        chain.reverse();
    }
}

/// Node type of a principal chain: 0 when deleting it keeps the graph
/// connected (amphidrome chains fold back and are always type 0), else
/// the smaller side genus. Side genera are computed by Euler-characteristic
/// additivity over the pieces behind the principal vertices, so the result
/// matches the surface-side computation on non-reduced fibers too.
fn chain_node_type(
    ix: &Indexed,
    all_chains: &[(RawChain, bool)],
    chain: &RawChain,
    amphidrome: bool,
) -> Option<u64> {
    if amphidrome {
        return Some(0);
    }
    // connectivity without this chain's edges
    let banned: BTreeSet<usize> = chain.edge_ids.iter().copied().collect();
    let n = ix.ids.len();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([chain.ends.0]);
    seen[chain.ends.0] = true;
    while let Some(v) = queue.pop_front() {
        for &(e, o) in &ix.adj[v] {
            if banned.contains(&e) || seen[o] {
                continue;
            }
            seen[o] = true;
            queue.push_back(o);
        }
    }
    if seen[chain.ends.1] {
        return Some(0);
    }

    let side_a: BTreeSet<usize> = (0..n).filter(|&v| seen[v]).collect();
    let side_b: BTreeSet<usize> = (0..n).filter(|&v| !seen[v]).collect();
    let d_cut = crate::chain::normalize_seq(&chain.seq(ix)).0;

    let ga = side_genus(ix, all_chains, &side_a, d_cut)?;
    let gb = side_genus(ix, all_chains, &side_b, d_cut)?;
    Some(ga.min(gb))
}

/// Genus of one side after cutting a chain of gcd `d_cut`:
/// `1 - (sum of piece Euler characteristics + open boundary circles)/2`.
///
/// Surface pieces sit behind the principal non-fork vertices; each
/// incident chain end contributes d(chain) boundary circles to its piece
/// (all circles of an amphidrome chain attach at the non-fork end).
/// `None` when a needed piece genus is missing or the data is
/// inconsistent.
fn side_genus(
    ix: &Indexed,
    all_chains: &[(RawChain, bool)],
    side: &BTreeSet<usize>,
    d_cut: u64,
) -> Option<u64> {
    let forks: BTreeSet<usize> = all_chains
        .iter()
        .filter(|(_, amph)| *amph)
        .map(|(c, _)| c.ends.1)
        .collect();

    let mut chi_sum: i128 = 0;
    for &v in side {
        let vg = &ix.g.vertices[v];
        let is_surface = ix.is_principal(v) && !forks.contains(&v);
        if !is_surface {
            continue;
        }
        let pg = if vg.mult == 1 { vg.genus } else { vg.piece_genus? };
        let mut circles: u128 = 0;
        for (c, amph) in all_chains {
            let d = crate::chain::normalize_seq(&c.seq(ix)).0 as u128;
            if *amph {
                // every boundary circle of the folded annulus sits at the
                // attachment end
                if c.ends.0 == v {
                    circles += d;
                }
            } else {
                if c.ends.0 == v {
                    circles += d;
                }
                if c.ends.1 == v {
                    circles += d;
                }
            }
        }
        chi_sum += 2 - 2 * pg as i128 - circles as i128;
    }

    let doubled = chi_sum + d_cut as i128;
    if doubled % 2 != 0 {
        return None;
    }
    let genus = 1 - doubled / 2;
    u64::try_from(genus).ok()
}

/// Delta invariants of a fiber graph: H summed over principal chains,
/// split by node type.
pub fn delta_invariants(g: &FiberGraph) -> Result<FiberReport> {
    Ok(FiberAnalysis::new(g)?.into_report())
}

/// Componentwise sum of the delta invariants across the singular fibers
/// of one family. All fibers must have the same, known genus.
pub fn family_delta(reports: &[FiberReport]) -> Result<(Option<u64>, DeltaBreakdown)> {
    let mut genus = None;
    for r in reports {
        let rg = r.genus.ok_or_else(|| {
            Error::InvalidFiber("family member with unknown genus".into())
        })?;
        match genus {
            None => genus = Some(rg),
            Some(prev) if prev != rg => {
                return Err(Error::InvalidFiber(format!(
                    "mixed genera {prev} and {rg} in one family"
                )));
            }
            _ => {}
        }
    }
    let mut total = DeltaBreakdown::zero();
    for r in reports {
        total.merge(&r.delta);
    }
    Ok((genus, total))
}

/// Independent oracle used in tests: side genus of a reduced fiber by
/// explicit traversal, as genus sum plus cycle rank.
pub fn reduced_side_genus_oracle(g: &FiberGraph, side: &BTreeSet<String>) -> u64 {
    let inside = |id: &str| side.contains(id);
    let genus_sum: u64 = g
        .vertices
        .iter()
        .filter(|v| inside(&v.id))
        .map(|v| v.genus)
        .sum();
    let vcount = g.vertices.iter().filter(|v| inside(&v.id)).count() as i64;
    let ecount = g
        .edges
        .iter()
        .filter(|(a, b)| inside(a) && inside(b))
        .count() as i64;
    genus_sum + (ecount - vcount + 1).max(0) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vx(id: &str, mult: u64, genus: u64) -> FiberVertex {
        FiberVertex {
            id: id.to_string(),
            mult,
            genus,
            piece_genus: None,
        }
    }

    fn edge(a: &str, b: &str) -> (String, String) {
        (a.to_string(), b.to_string())
    }

    /// The genus-2 dual graph with spine 6-5-4, tails 3 and 2-4 on the
    /// multiplicity-6 component, tails 2 and 1 on the multiplicity-4 one.
    pub(crate) fn example_graph() -> FiberGraph {
        let mut c1 = vx("C1", 6, 0);
        c1.piece_genus = Some(1);
        let mut c2 = vx("C2", 4, 0);
        c2.piece_genus = Some(1);
        FiberGraph {
            genus: Some(2),
            vertices: vec![
                c1,
                vx("S", 5, 0),
                c2,
                vx("G1", 3, 0),
                vx("G2a", 4, 0),
                vx("G2b", 2, 0),
                vx("G3", 2, 0),
                vx("G4", 1, 0),
            ],
            edges: vec![
                edge("C1", "S"),
                edge("S", "C2"),
                edge("C1", "G1"),
                edge("C1", "G2a"),
                edge("G2a", "G2b"),
                edge("C2", "G3"),
                edge("C2", "G4"),
            ],
        }
    }

    #[test]
    fn validate_example_graph() {
        let g = example_graph();
        let v = validate_fiber(&g);
        assert!(v.is_valid(), "unexpected violations: {:?}", v.violations);
    }

    #[test]
    fn validate_two_elliptic() {
        let g = FiberGraph {
            genus: None,
            vertices: vec![vx("a", 1, 1), vx("b", 1, 1)],
            edges: vec![edge("a", "b")],
        };
        assert!(validate_fiber(&g).is_valid());
        assert_eq!(fiber_genus(&g).unwrap(), 2);
    }

    #[test]
    fn validate_congruence_failure() {
        let g = FiberGraph {
            genus: None,
            vertices: vec![vx("a", 2, 0), vx("b", 1, 0)],
            edges: vec![edge("a", "b")],
        };
        let v = validate_fiber(&g);
        assert!(!v.is_valid());
        assert!(v.violations.iter().any(|m| m.contains("`a`")));
    }

    #[test]
    fn principal_detection() {
        let g = example_graph();
        let p = principal_components(&g).unwrap();
        assert_eq!(
            p.into_iter().collect::<Vec<_>>(),
            vec!["C1".to_string(), "C2".to_string()]
        );

        // cycle of three genus-0 vertices: none principal
        let g = FiberGraph {
            genus: None,
            vertices: vec![vx("a", 1, 0), vx("b", 1, 0), vx("c", 1, 0)],
            edges: vec![edge("a", "b"), edge("b", "c"), edge("c", "a")],
        };
        assert!(principal_components(&g).unwrap().is_empty());
        // and it is flagged for review rather than analysed
        let v = validate_fiber(&g);
        assert!(!v.is_valid());
        assert!(v.violations.iter().any(|m| m.contains("no principal anchor")));
    }

    #[test]
    fn extract_example_graph() {
        let g = example_graph();
        let (chains, tails) = extract_chains(&g).unwrap();
        assert_eq!(chains.len(), 1);
        assert_eq!(chains[0].0, "C1");
        assert_eq!(chains[0].1, "C2");
        assert_eq!(chains[0].2.entries(), &[6, 5, 4]);
        let mut tail_seqs: Vec<Vec<u64>> =
            tails.iter().map(|t| t.entries().to_vec()).collect();
        tail_seqs.sort();
        assert_eq!(
            tail_seqs,
            vec![vec![4, 1], vec![4, 2], vec![6, 3], vec![6, 4, 2]]
        );
    }

    #[test]
    fn loop_is_a_length_two_chain() {
        let g = FiberGraph {
            genus: Some(2),
            vertices: vec![vx("a", 1, 1)],
            edges: vec![edge("a", "a")],
        };
        let report = delta_invariants(&g).unwrap();
        assert_eq!(report.chains.len(), 1);
        assert_eq!(report.chains[0].report.seq.entries(), &[1, 1]);
        assert_eq!(report.chains[0].node_type, Some(0));
        assert_eq!(report.delta.total, Rational::one());
    }

    #[test]
    fn delta_example_graph() {
        let report = delta_invariants(&example_graph()).unwrap();
        assert_eq!(report.principal, vec!["C1", "C2"]);
        assert_eq!(report.delta.total, "1/12".parse().unwrap());
        assert_eq!(report.delta.typed(1), "1/12".parse().unwrap());
        assert_eq!(report.delta.typed(0), Rational::zero());
        assert_eq!(report.chains[0].node_type, Some(1));
        assert_eq!(report.chains[0].report.fdtc, "-1/12".parse().unwrap());
        assert_eq!(report.tails.len(), 4);
        let vals: Vec<String> = report.tails.iter().map(|t| t.valency.to_string()).collect();
        assert_eq!(vals, vec!["(3,2,1)", "(2,3,2)", "(1,4,1)", "(2,2,1)"]);
    }

    #[test]
    fn two_elliptic_fiber_is_type_one() {
        let g = FiberGraph {
            genus: None,
            vertices: vec![vx("a", 1, 1), vx("b", 1, 1)],
            edges: vec![edge("a", "b")],
        };
        let report = delta_invariants(&g).unwrap();
        assert_eq!(report.chains[0].node_type, Some(1));
        assert_eq!(report.delta.typed(1), Rational::one());
    }

    #[test]
    fn smooth_fiber_has_zero_delta() {
        let g = FiberGraph {
            genus: None,
            vertices: vec![vx("a", 1, 2)],
            edges: vec![],
        };
        let report = delta_invariants(&g).unwrap();
        assert!(report.chains.is_empty());
        assert_eq!(report.delta.total, Rational::zero());
        assert_eq!(report.genus, Some(2));
    }

    #[test]
    fn genus_examples() {
        let g = FiberGraph {
            genus: None,
            vertices: vec![vx("a", 1, 0), vx("b", 1, 0)],
            edges: vec![edge("a", "b"), edge("a", "b")],
        };
        assert_eq!(fiber_genus(&g).unwrap(), 1);
        assert_eq!(fiber_genus(&example_graph()).unwrap(), 2);
        let non_reduced_no_hint = FiberGraph {
            genus: None,
            ..example_graph()
        };
        assert!(fiber_genus(&non_reduced_no_hint).is_err());
    }

    #[test]
    fn family_sums_componentwise() {
        let a = delta_invariants(&example_graph()).unwrap();
        let smooth = delta_invariants(&FiberGraph {
            genus: None,
            vertices: vec![vx("a", 1, 2)],
            edges: vec![],
        })
        .unwrap();
        let (genus, sum) = family_delta(&[a.clone(), smooth]).unwrap();
        assert_eq!(genus, Some(2));
        assert_eq!(sum.total, "1/12".parse().unwrap());

        let two = FiberGraph {
            genus: None,
            vertices: vec![vx("a", 1, 1), vx("b", 1, 1)],
            edges: vec![edge("a", "b")],
        };
        let r = delta_invariants(&two).unwrap();
        let (_, sum) = family_delta(&[r.clone(), r]).unwrap();
        assert_eq!(sum.typed(1), Rational::integer(2));

        let (genus, sum) = family_delta(&[]).unwrap();
        assert!(genus.is_none());
        assert_eq!(sum.total, Rational::zero());

        // mixed genera rejected
        let g3 = FiberGraph {
            genus: None,
            vertices: vec![vx("a", 1, 1), vx("b", 1, 2)],
            edges: vec![edge("a", "b")],
        };
        let r3 = delta_invariants(&g3).unwrap();
        assert!(family_delta(&[a, r3]).is_err());
    }

    #[test]
    fn json_round_trip_and_unknown_keys() {
        let g = example_graph();
        let text = g.to_json();
        let back = FiberGraph::from_json(&text).unwrap();
        assert_eq!(g, back);

        assert!(FiberGraph::from_json(r#"{"vertices": [], "edges": [], "extra": 1}"#).is_err());
        let bad_edge = r#"{"vertices": [{"id": "a", "mult": 1, "genus": 2}],
                           "edges": [["a", "zz"]]}"#;
        let err = FiberGraph::from_json(bad_edge).unwrap_err();
        assert!(err.to_string().contains("zz"));
    }

    #[test]
    fn amphidrome_fork_detected() {
        // part vertex of multiplicity 4 with two branch tails, amphidrome
        // chain (4,2) ending in a fork with two multiplicity-1 stubs
        let mut p = vx("P", 4, 0);
        p.piece_genus = Some(1);
        let g = FiberGraph {
            genus: Some(2),
            vertices: vec![
                p,
                vx("t1", 1, 0),
                vx("t2", 1, 0),
                vx("F", 2, 0),
                vx("s1", 1, 0),
                vx("s2", 1, 0),
            ],
            edges: vec![
                edge("P", "t1"),
                edge("P", "t2"),
                edge("P", "F"),
                edge("F", "s1"),
                edge("F", "s2"),
            ],
        };
        let v = validate_fiber(&g);
        assert!(v.is_valid(), "violations: {:?}", v.violations);
        let report = delta_invariants(&g).unwrap();
        assert_eq!(report.chains.len(), 1);
        let chain = &report.chains[0];
        assert!(chain.report.amphidrome);
        assert_eq!(chain.report.seq.entries(), &[4, 2]);
        assert_eq!(chain.ends.1, "F");
        assert_eq!(chain.report.orbit_len, 1);
        assert_eq!(chain.report.screw, "-1".parse().unwrap());
        assert_eq!(chain.report.fdtc, "-1/2".parse().unwrap());
        assert_eq!(chain.node_type, Some(0));
        assert_eq!(report.delta.total, "1/2".parse().unwrap());
    }
}
