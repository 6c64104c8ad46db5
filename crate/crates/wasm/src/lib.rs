//! Browser demo bindings: analyze a fiber graph (with an SVG drawing of
//! its dual graph), expand Hirzebruch-Jung tails, and synthesize chains
//! from boundary data. All entry points take and return JSON strings so
//! the page needs no framework, and everything here also runs natively
//! for testing.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use fdtc_core::chain_calculus::{
    chain_h, chain_valencies, fdtc_from_chain, hj_expand, hj_valency, screw_number,
    synthesize_chain, SearchCaps,
};
use fdtc_core::fiber::{delta_invariants, validate_fiber, FiberGraph, FiberReport};
use fdtc_core::monodromy::lower_bound;
use fdtc_core::valency::Valency;

mod svg;

#[derive(Serialize)]
struct AnalyzeResponse {
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    violations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<FiberReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    svg: Option<String>,
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("response serializes")
}

/// Parse a fiber graph, validate it, and return the full report plus an
/// SVG rendering of the dual graph.
#[wasm_bindgen]
pub fn analyze_fiber(fiber_json: &str) -> String {
    let graph = match FiberGraph::from_json(fiber_json) {
        Ok(g) => g,
        Err(e) => {
            return json(&AnalyzeResponse {
                ok: false,
                error: Some(e.to_string()),
                violations: vec![],
                report: None,
                svg: None,
            })
        }
    };
    let validation = validate_fiber(&graph);
    if !validation.is_valid() {
        return json(&AnalyzeResponse {
            ok: false,
            error: Some("fiber graph failed validation".into()),
            violations: validation.violations,
            report: None,
            svg: Some(svg::render(&graph)),
        });
    }
    match delta_invariants(&graph) {
        Ok(report) => json(&AnalyzeResponse {
            ok: true,
            error: None,
            violations: vec![],
            report: Some(report),
            svg: Some(svg::render(&graph)),
        }),
        Err(e) => json(&AnalyzeResponse {
            ok: false,
            error: Some(e.to_string()),
            violations: vec![],
            report: None,
            svg: Some(svg::render(&graph)),
        }),
    }
}

#[derive(Serialize)]
struct TailResponse {
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    entries: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    descent_sum: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    valency: Option<(u64, u64, u64)>,
}

/// Expand the tail of a multiple point with valency (m, lambda, sigma).
#[wasm_bindgen]
pub fn expand_tail(m: u64, lambda: u64, sigma: u64) -> String {
    let attempt = Valency::new(m, lambda, sigma)
        .and_then(|v| hj_expand(&v).map(|t| (v, t)));
    match attempt {
        Ok((_, tail)) => {
            let round = hj_valency(&tail).expect("canonical tail has a valency");
            json(&TailResponse {
                ok: true,
                error: None,
                entries: Some(tail.entries().to_vec()),
                descent_sum: Some(chain_h(&tail).to_string()),
                valency: Some((round.m(), round.lambda(), round.sigma())),
            })
        }
        Err(e) => json(&TailResponse {
            ok: false,
            error: Some(e.to_string()),
            entries: None,
            descent_sum: None,
            valency: None,
        }),
    }
}

#[derive(Serialize)]
struct SynthResponse {
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    entries: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    screw: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fdtc: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    orbit_len: Option<u64>,
}

fn parse_valency(text: &str) -> Result<Valency, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected m,lambda,sigma, got `{text}`"));
    }
    let nums: Vec<u64> = parts
        .iter()
        .map(|p| p.parse::<u64>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    Valency::new(nums[0], nums[1], nums[2]).map_err(|e| e.to_string())
}

/// Find the chain joining two boundary valencies with the given screw
/// number, and report its invariants.
#[wasm_bindgen]
pub fn synthesize(v1: &str, v2: &str, screw: &str, amphidrome: bool) -> String {
    let fail = |msg: String| {
        json(&SynthResponse {
            ok: false,
            error: Some(msg),
            entries: None,
            h: None,
            screw: None,
            fdtc: None,
            orbit_len: None,
        })
    };
    let v1 = match parse_valency(v1) {
        Ok(v) => v,
        Err(e) => return fail(e),
    };
    let v2 = match parse_valency(v2) {
        Ok(v) => v,
        Err(e) => return fail(e),
    };
    let s: fdtc_core::Rational = match screw.parse() {
        Ok(s) => s,
        Err(e) => return fail(format!("{e}")),
    };
    let caps = SearchCaps {
        max_entry: 100_000,
        max_len: 48,
    };
    match synthesize_chain(&v1, &v2, &s, amphidrome, caps) {
        Ok(chain) => {
            let (vs, ve) = chain_valencies(&chain).expect("synthesized chain is valid");
            debug_assert_eq!((vs, ve), (v1, if amphidrome { v1 } else { v2 }));
            json(&SynthResponse {
                ok: true,
                error: None,
                entries: Some(chain.entries().to_vec()),
                h: Some(chain_h(chain.seq()).to_string()),
                screw: Some(screw_number(&chain).unwrap().to_string()),
                fdtc: Some(fdtc_from_chain(&chain).unwrap().to_string()),
                orbit_len: Some(chain.orbit_len()),
            })
        }
        Err(e) => fail(e.to_string()),
    }
}

#[derive(Serialize)]
struct BoundsResponse {
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    overall: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    by_type: Vec<(u64, String)>,
}

/// Lower-bound table for non-zero twist coefficients at one genus.
#[wasm_bindgen]
pub fn bounds_table(genus: u64) -> String {
    match lower_bound(genus, None) {
        Ok(overall) => {
            let by_type = (0..=genus / 2)
                .map(|i| (i, lower_bound(genus, Some(i)).unwrap().to_string()))
                .collect();
            json(&BoundsResponse {
                ok: true,
                error: None,
                overall: Some(overall.to_string()),
                by_type,
            })
        }
        Err(e) => json(&BoundsResponse {
            ok: false,
            error: Some(e.to_string()),
            overall: None,
            by_type: vec![],
        }),
    }
}

/// The worked genus-2 fiber file, for the preset button.
#[wasm_bindgen]
pub fn preset_fiber() -> String {
    include_str!("../presets/example_fiber.json").to_string()
}

/// A genus-2 fiber with an amphidrome fork, for the preset button.
#[wasm_bindgen]
pub fn preset_amphidrome_fiber() -> String {
    include_str!("../presets/amphidrome_fiber.json").to_string()
}
