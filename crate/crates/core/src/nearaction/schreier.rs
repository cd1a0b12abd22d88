use std::collections::HashMap;
use std::fmt::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::NearAction;
use crate::carrier::Point;

/// The near Schreier graph restricted to a coordinate window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchreierTruncation {
    pub radius: i64,
    pub vertices: Vec<Point>,
    /// `(generator, from, to)` with vertex indices.
    pub edges: Vec<(usize, usize, usize)>,
    /// Vertices with a neighbor outside the window.
    pub boundary: Vec<usize>,
}

#[derive(Serialize)]
struct JsonEdge<'a> {
    generator: &'a str,
    from: usize,
    to: usize,
}

#[derive(Serialize)]
struct JsonVertex {
    cell: String,
    coords: Vec<i64>,
    boundary: bool,
}

#[derive(Serialize)]
struct JsonGraph<'a> {
    schema: &'static str,
    radius: i64,
    vertices: Vec<JsonVertex>,
    edges: Vec<JsonEdge<'a>>,
    components: usize,
}

impl NearAction {
    pub fn schreier_truncation(&self, radius: i64) -> SchreierTruncation {
        let vertices = self.carrier.window(radius);
        let index: HashMap<&Point, usize> = vertices.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let per_vertex: Vec<(Vec<(usize, usize, usize)>, bool)> = vertices
            .par_iter()
            .enumerate()
            .map(|(i, x)| {
                let mut edges = Vec::new();
                let mut outside = false;
                for g in 0..self.rank() {
                    if let Some(y) = self.lifts[g].at(x) {
                        match index.get(&y) {
                            Some(&j) => edges.push((g, i, j)),
                            None => outside = true,
                        }
                    }
                    if let Some(y) = self.inverses[g].at(x) {
                        outside |= !index.contains_key(&y);
                    }
                }
                (edges, outside)
            })
            .collect();
        let mut edges = Vec::new();
        let mut boundary = Vec::new();
        for (i, (e, outside)) in per_vertex.into_iter().enumerate() {
            edges.extend(e);
            if outside {
                boundary.push(i);
            }
        }
        SchreierTruncation { radius, vertices, edges, boundary }
    }
}

impl SchreierTruncation {
    /// Connected components (ignoring edge direction), each sorted, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(_, a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort();
        out
    }

    pub fn to_dot(&self, action: &NearAction) -> String {
        let c = action.carrier();
        let names = &action.group().generators;
        let mut s = String::from("digraph schreier {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let shape = if self.boundary.binary_search(&i).is_ok() { "box" } else { "ellipse" };
            let _ = writeln!(s, "  v{i} [label=\"{}\", shape={shape}];", c.show(v));
        }
        for &(g, a, b) in &self.edges {
            let _ = writeln!(s, "  v{a} -> v{b} [label=\"{}\"];", names[g]);
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self, action: &NearAction) -> serde_json::Value {
        let c = action.carrier();
        let names = &action.group().generators;
        let g = JsonGraph {
            schema: crate::json::SCHEMA,
            radius: self.radius,
            vertices: self
                .vertices
                .iter()
                .enumerate()
                .map(|(i, v)| JsonVertex {
                    cell: c.cell(v.cell).id.clone(),
                    coords: v.coords.clone(),
                    boundary: self.boundary.binary_search(&i).is_ok(),
                })
                .collect(),
            edges: self.edges.iter().map(|&(g, a, b)| JsonEdge { generator: &names[g], from: a, to: b }).collect(),
            components: self.components().len(),
        };
        serde_json::to_value(g).expect("graph serializes")
    }
}
