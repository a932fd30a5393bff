//! Colored directed multigraphs of invariants.
//!
//! Vertex `l` stands for the `l`-th factor of `ψ ⊗ ψ̄` (or of `ρ`). Color `j`
//! contributes one edge per vertex, with head at `l` and tail at `σ_j(l)`.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::perm::{all_perms, check_grade, Perm, PermTuple};

/// Edge colors used by [`dot_export`] when no name is supplied.
pub const DEFAULT_COLORS: [&str; 8] = [
    "black", "red", "blue", "green", "orange", "purple", "brown", "gray",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvGraph {
    m: usize,
    colors: Vec<Perm>,
}

/// One connected component: its vertices in the parent graph and the
/// induced graph relabelled to `0..vertices.len()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub vertices: Vec<usize>,
    pub graph: InvGraph,
}

impl InvGraph {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.colors.len()
    }

    pub fn colors(&self) -> &[Perm] {
        &self.colors
    }

    /// Edges as `(color, tail, head)`, zero-based, color-major.
    pub fn edges(&self) -> Vec<(usize, usize, usize)> {
        self.colors
            .iter()
            .enumerate()
            .flat_map(|(j, p)| (0..self.m).map(move |l| (j, p.apply(l), l)))
            .collect()
    }

    pub fn to_tuple(&self) -> PermTuple {
        PermTuple::new(self.m, self.colors.clone()).expect("colors share the vertex count")
    }

    /// `{"m":…, "colors":[[images]…]}` with one-based images.
    pub fn to_json(&self) -> Value {
        let colors: Vec<Vec<usize>> = self.colors.iter().map(Perm::one_based).collect();
        json!({ "m": self.m, "colors": colors })
    }

    pub fn from_json(v: &Value) -> Result<InvGraph> {
        let bad = || Error::Parse("graph: expected {\"m\":…, \"colors\":[[…]…]}".into());
        let m = v.get("m").and_then(Value::as_u64).ok_or_else(bad)? as usize;
        let colors = v
            .get("colors")
            .and_then(Value::as_array)
            .ok_or_else(bad)?
            .iter()
            .map(|c| {
                let images = c
                    .as_array()
                    .ok_or_else(bad)?
                    .iter()
                    .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(bad))
                    .collect::<Result<Vec<_>>>()?;
                if images.len() != m {
                    return Err(Error::GradeMismatch(m, images.len()));
                }
                Perm::from_images(&images)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(InvGraph { m, colors })
    }
}

pub fn build_graph(sigma: &PermTuple) -> InvGraph {
    InvGraph {
        m: sigma.m(),
        colors: sigma.perms().to_vec(),
    }
}

/// Canonical byte string of the unlabelled graph.
///
/// For each relabelling the graph is written as one `m × m` adjacency bitmap
/// per color (rows are heads, columns tails); the smallest encoding wins.
pub fn canonical_graph(g: &InvGraph) -> Result<Vec<u8>> {
    check_grade(g.m)?;
    let m = g.m;
    let edges = g.edges();
    let mut best: Option<Vec<u8>> = None;
    let mut code = vec![0u8; 2 + g.k() * m * m];
    for relabel in all_perms(m) {
        code.iter_mut().for_each(|b| *b = 0);
        code[0] = m as u8;
        code[1] = g.k().min(255) as u8;
        for &(j, tail, head) in &edges {
            let (h, t) = (relabel.apply(head), relabel.apply(tail));
            code[2 + j * m * m + h * m + t] = 1;
        }
        if best.as_ref().is_none_or(|b| code < *b) {
            best = Some(code.clone());
        }
    }
    Ok(best.expect("at least one relabelling"))
}

/// Connected components of the underlying undirected multigraph, ordered by
/// smallest vertex.
pub fn connected_components(g: &InvGraph) -> Vec<Component> {
    let mut adjacency = vec![Vec::new(); g.m];
    for (_, tail, head) in g.edges() {
        adjacency[tail].push(head);
        adjacency[head].push(tail);
    }
    let mut seen = vec![false; g.m];
    let mut out = Vec::new();
    for start in 0..g.m {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        let mut vertices = Vec::new();
        seen[start] = true;
        while let Some(v) = stack.pop() {
            vertices.push(v);
            for &w in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        vertices.sort_unstable();
        let graph = build_graph(
            &g.to_tuple()
                .restrict(&vertices)
                .expect("components are closed under every color"),
        );
        out.push(Component { vertices, graph });
    }
    out
}

/// Graphviz text. Vertices are numbered from 1 and arrows run tail → head.
/// Color `j` is drawn with `color_names[j]`, falling back to
/// [`DEFAULT_COLORS`].
pub fn dot_export(g: &InvGraph, color_names: &[&str]) -> String {
    let mut out = format!("digraph \"{}\" {{\n  node [shape=circle];\n", g.to_tuple());
    for l in 0..g.m {
        out.push_str(&format!("  {};\n", l + 1));
    }
    for (j, tail, head) in g.edges() {
        let color = color_names
            .get(j)
            .copied()
            .unwrap_or(DEFAULT_COLORS[j % DEFAULT_COLORS.len()]);
        out.push_str(&format!(
            "  {} -> {} [color=\"{color}\", label=\"{}\"];\n",
            tail + 1,
            head + 1,
            j + 1
        ));
    }
    out.push_str("}\n");
    out
}

/// True iff, in the cyclic order `order`, every cycle of every color covers
/// a contiguous arc and is traversed along it in one direction.
pub fn is_adjacent_ordering(g: &InvGraph, order: &[usize]) -> bool {
    let m = g.m;
    if order.len() != m {
        return false;
    }
    let mut pos = vec![usize::MAX; m];
    for (i, &v) in order.iter().enumerate() {
        if v >= m || pos[v] != usize::MAX {
            return false;
        }
        pos[v] = i;
    }
    g.colors
        .iter()
        .all(|p| p.cycles().iter().all(|c| cycle_on_arc(p, c, order, &pos)))
}

fn cycle_on_arc(p: &Perm, cycle: &[usize], order: &[usize], pos: &[usize]) -> bool {
    let (m, len) = (order.len(), cycle.len());
    if len == 1 {
        return true;
    }
    let mut occupied = vec![false; m];
    cycle.iter().for_each(|&v| occupied[pos[v]] = true);
    let a = if len == m {
        0
    } else {
        match (0..m).find(|&i| occupied[i] && !occupied[(i + m - 1) % m]) {
            Some(a) => a,
            None => return false,
        }
    };
    if (0..len).any(|i| !occupied[(a + i) % m]) {
        return false;
    }
    let at = |i: usize| order[(a + i) % m];
    let forward = (0..len).all(|i| p.apply(at(i)) == at((i + 1) % len));
    let backward = (0..len).all(|i| p.apply(at((i + 1) % len)) == at(i));
    forward || backward
}

/// A cyclic vertex ordering under which the graph can be read as a product
/// of (partially transposed, partially traced) matrices, or `None`.
///
/// Vertex 0 is kept first, so the `(m-1)!` orderings searched are distinct
/// up to rotation.
pub fn expressible_ordering(g: &InvGraph) -> Result<Option<Vec<usize>>> {
    check_grade(g.m)?;
    if g.m == 0 {
        return Ok(Some(Vec::new()));
    }
    for rest in all_perms(g.m - 1) {
        let order: Vec<usize> = std::iter::once(0)
            .chain(rest.images().iter().map(|&x| x + 1))
            .collect();
        if is_adjacent_ordering(g, &order) {
            return Ok(Some(order));
        }
    }
    Ok(None)
}
