//! Plain SVG rendering of a dual graph: breadth-first layers left to
//! right, multiplicity inside each vertex, genus annotated underneath.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write;

use fdtc_core::fiber::FiberGraph;

const STEP_X: f64 = 130.0;
const STEP_Y: f64 = 80.0;
const MARGIN: f64 = 60.0;
const RADIUS: f64 = 17.0;

pub fn render(g: &FiberGraph) -> String {
    let n = g.vertices.len();
    let index: BTreeMap<&str, usize> = g
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.id.as_str(), i))
        .collect();
    let mut adjacency = vec![Vec::new(); n];
    for (a, b) in &g.edges {
        let (ia, ib) = (index[a.as_str()], index[b.as_str()]);
        adjacency[ia].push(ib);
        adjacency[ib].push(ia);
    }

    // breadth-first layering, restarting on unreached vertices
    let mut layer = vec![usize::MAX; n];
    let mut order: Vec<usize> = Vec::new();
    for start in 0..n {
        if layer[start] != usize::MAX {
            continue;
        }
        layer[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &o in &adjacency[v] {
                if layer[o] == usize::MAX {
                    layer[o] = layer[v] + 1;
                    queue.push_back(o);
                }
            }
        }
    }

    let mut row_of_layer: BTreeMap<usize, usize> = BTreeMap::new();
    let mut pos = vec![(0.0, 0.0); n];
    let mut max_x: f64 = 0.0;
    let mut max_y: f64 = 0.0;
    for &v in &order {
        let row = row_of_layer.entry(layer[v]).or_insert(0);
        let x = MARGIN + layer[v] as f64 * STEP_X;
        let y = MARGIN + *row as f64 * STEP_Y;
        *row += 1;
        pos[v] = (x, y);
        max_x = max_x.max(x);
        max_y = max_y.max(y);
    }

    let mut out = String::new();
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\" \
         font-family=\"sans-serif\" font-size=\"13\">",
        max_x + MARGIN,
        max_y + MARGIN
    );

    // edges first; parallel edges bow apart, loops sit above the vertex
    let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (a, b) in &g.edges {
        let (ia, ib) = (index[a.as_str()], index[b.as_str()]);
        let key = (ia.min(ib), ia.max(ib));
        let copy = seen.entry(key).or_insert(0);
        let (x1, y1) = pos[ia];
        let (x2, y2) = pos[ib];
        if ia == ib {
            let _ = write!(
                out,
                "<ellipse cx=\"{}\" cy=\"{}\" rx=\"14\" ry=\"10\" fill=\"none\" stroke=\"#555\"/>",
                x1,
                y1 - RADIUS - 8.0
            );
        } else if *copy == 0 {
            let _ = write!(
                out,
                "<line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" stroke=\"#555\"/>"
            );
        } else {
            // later copies curve away from the straight edge
            let bend = 14.0 * (*copy as f64);
            let (mx, my) = ((x1 + x2) / 2.0, (y1 + y2) / 2.0);
            let (dx, dy) = (x2 - x1, y2 - y1);
            let len = (dx * dx + dy * dy).sqrt().max(1.0);
            let (nx, ny) = (-dy / len, dx / len);
            let _ = write!(
                out,
                "<path d=\"M {x1} {y1} Q {} {} {x2} {y2}\" fill=\"none\" stroke=\"#555\"/>",
                mx + nx * bend,
                my + ny * bend
            );
        }
        *copy += 1;
    }

    for (i, v) in g.vertices.iter().enumerate() {
        let (x, y) = pos[i];
        let fill = if v.genus > 0 { "#cde6f7" } else { "#f4f4f4" };
        let _ = write!(
            out,
            "<circle cx=\"{x}\" cy=\"{y}\" r=\"{RADIUS}\" fill=\"{fill}\" stroke=\"#222\"/>\
             <text x=\"{x}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
            y + 4.5,
            v.mult
        );
        let mut caption = v.id.clone();
        if v.genus > 0 {
            let _ = write!(caption, " (g={})", v.genus);
        }
        let _ = write!(
            out,
            "<text x=\"{x}\" y=\"{}\" text-anchor=\"middle\" fill=\"#666\" font-size=\"10\">{}</text>",
            y + RADIUS + 13.0,
            caption
        );
    }
    out.push_str("</svg>");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use fdtc_core::fiber::FiberVertex;

    #[test]
    fn renders_loops_and_multi_edges() {
        let g = FiberGraph {
            genus: Some(2),
            vertices: vec![
                FiberVertex {
                    id: "a".into(),
                    mult: 1,
                    genus: 1,
                    piece_genus: None,
                },
                FiberVertex {
                    id: "b".into(),
                    mult: 1,
                    genus: 0,
                    piece_genus: None,
                },
            ],
            edges: vec![
                ("a".into(), "a".into()),
                ("a".into(), "b".into()),
                ("a".into(), "b".into()),
            ],
        };
        let svg = render(&g);
        assert!(svg.contains("<ellipse"));
        assert!(svg.contains("<path"));
        assert!(svg.contains("(g=1)"));
    }
}
