//! Finite graphs the samplers run on: complete graphs, truncated regular
//! trees, and lattice tori.
//!
//! Adjacency is explicit compressed sparse row storage. Neighbor lists are
//! sorted ascending, which makes symmetry and duplicate checks cheap and
//! gives every builder a canonical layout. Vertex 0 is the observation
//! vertex for all kinds: the root of a tree ball, an arbitrary (but fixed)
//! vertex of the transitive graphs.
//!
//! Builders validate their parameters eagerly and, for graphs up to 10^4
//! vertices, verify the full structural invariants after construction.
//! Larger graphs can be checked explicitly with [`Graph::validate`].

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Index of a vertex in a [`Graph`]; dense in `0..vertex_count`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
#[repr(transparent)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Graph family and its parameters. Doubles as the JSON schema for the
/// `graph` field of experiment configs.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphKind {
    /// Complete graph on `n` vertices.
    Complete { n: u32 },
    /// Ball of the given radius in the regular tree where the root has
    /// `branching + 1` children and every other internal vertex has
    /// `branching` children plus its parent. Depth-`radius` vertices are
    /// leaves of degree 1.
    TreeBall { branching: u32, radius: u32 },
    /// `dim`-dimensional torus with `side` vertices per axis and nearest
    /// neighbor edges.
    Torus { dim: u32, side: u32 },
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GraphKind::Complete { n } => write!(f, "complete(n={n})"),
            GraphKind::TreeBall { branching, radius } => {
                write!(f, "tree_ball(branching={branching},radius={radius})")
            }
            GraphKind::Torus { dim, side } => write!(f, "torus(dim={dim},side={side})"),
        }
    }
}

impl GraphKind {
    /// Checks parameter ranges without materializing anything.
    pub fn validate_params(&self) -> Result<()> {
        match *self {
            GraphKind::Complete { n } if n < 2 => {
                Err(Error::invalid("graph.n", "complete graph needs n >= 2"))
            }
            GraphKind::TreeBall { branching, .. } if branching < 1 => Err(Error::invalid(
                "graph.branching",
                "tree ball needs branching >= 1",
            )),
            GraphKind::TreeBall { radius, .. } if radius < 1 => {
                Err(Error::invalid("graph.radius", "tree ball needs radius >= 1"))
            }
            GraphKind::Torus { dim, .. } if dim < 1 => {
                Err(Error::invalid("graph.dim", "torus needs dim >= 1"))
            }
            GraphKind::Torus { side, .. } if side < 3 => Err(Error::invalid(
                "graph.side",
                "torus needs side >= 3 to keep neighbors distinct",
            )),
            _ => Ok(()),
        }
    }

    /// Number of vertices the kind describes, without building it.
    /// Useful for sizing decisions: tree balls grow like `branching^radius`
    /// and can exceed any materializable size while still being valid
    /// parameters for the light-cone sampler.
    pub fn vertex_count(&self) -> Result<u128> {
        self.validate_params()?;
        let overflow = || Error::invalid("graph", "vertex count overflows");
        match *self {
            GraphKind::Complete { n } => Ok(n as u128),
            GraphKind::TreeBall { branching, radius } => {
                let n = branching as u128;
                let r = radius;
                if n == 1 {
                    return Ok(1 + 2 * r as u128);
                }
                let pow = n.checked_pow(r).ok_or_else(overflow)?;
                // 1 + (n+1) * (n^r - 1) / (n - 1), exact in integers.
                let shell = (n + 1).checked_mul((pow - 1) / (n - 1)).ok_or_else(overflow)?;
                Ok(1 + shell)
            }
            GraphKind::Torus { dim, side } => {
                (side as u128).checked_pow(dim).ok_or_else(overflow)
            }
        }
    }
}

/// Undirected graph in compressed sparse row form.
pub struct Graph {
    kind: GraphKind,
    offsets: Vec<u32>,
    neighbors: Vec<VertexId>,
    /// Distance from vertex 0; stored for tree balls, empty otherwise.
    depths: Vec<u32>,
}

impl std::fmt::Debug for Graph {
    /// Summarizes instead of dumping adjacency: graphs can hold millions of
    /// edges.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph({}, {} vertices)", self.kind, self.vertex_count())
    }
}

/// Largest vertex count the structural checks run on automatically.
const EXHAUSTIVE_CHECK_LIMIT: usize = 10_000;

impl Graph {
    pub fn complete(n: u32) -> Result<Graph> {
        Self::from_kind(GraphKind::Complete { n })
    }

    pub fn tree_ball(branching: u32, radius: u32) -> Result<Graph> {
        Self::from_kind(GraphKind::TreeBall { branching, radius })
    }

    pub fn torus(dim: u32, side: u32) -> Result<Graph> {
        Self::from_kind(GraphKind::Torus { dim, side })
    }

    pub fn from_kind(kind: GraphKind) -> Result<Graph> {
        kind.validate_params()?;
        let count = kind.vertex_count()?;
        if count > (u32::MAX - 1) as u128 {
            return Err(Error::invalid(
                "graph",
                format!("{count} vertices exceed the explicit-adjacency limit"),
            ));
        }
        let g = match kind {
            GraphKind::Complete { n } => build_complete(n),
            GraphKind::TreeBall { branching, radius } => build_tree_ball(branching, radius),
            GraphKind::Torus { dim, side } => build_torus(dim, side),
        }?;
        debug_assert_eq!(g.vertex_count() as u128, count);
        if g.vertex_count() <= EXHAUSTIVE_CHECK_LIMIT {
            g.validate()?;
        }
        Ok(g)
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn degree(&self, x: VertexId) -> usize {
        let i = x.0 as usize;
        (self.offsets[i + 1] - self.offsets[i]) as usize
    }

    #[inline]
    pub fn neighbors(&self, x: VertexId) -> &[VertexId] {
        let i = x.0 as usize;
        &self.neighbors[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_count() as u32).map(VertexId)
    }

    /// The fixed observation vertex (tree root; vertex 0 elsewhere).
    pub fn root(&self) -> VertexId {
        VertexId(0)
    }

    /// The fixed observation edge: vertex 0 and its lowest-numbered
    /// neighbor. On a tree ball this is the root and its first child.
    pub fn observation_edge(&self) -> (VertexId, VertexId) {
        (VertexId(0), self.neighbors(VertexId(0))[0])
    }

    /// Distance from the root; `None` on kinds without a distinguished root.
    pub fn depth(&self, x: VertexId) -> Option<u32> {
        self.depths.get(x.0 as usize).copied()
    }

    /// Degree-1 leaves of a tree ball; empty on the transitive kinds.
    pub fn boundary(&self) -> Vec<VertexId> {
        match self.kind {
            GraphKind::TreeBall { radius, .. } => self
                .vertices()
                .filter(|&v| self.depths[v.0 as usize] == radius)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Tree-ball vertices at depth at most `radius - margin`, i.e. those at
    /// distance at least `margin` from every leaf. A margin larger than the
    /// radius selects nothing, which is not an error.
    pub fn interior_vertices(&self, margin: u32) -> Result<Vec<VertexId>> {
        let GraphKind::TreeBall { radius, .. } = self.kind else {
            return Err(Error::invalid(
                "margin",
                "interior selection is defined for tree balls only",
            ));
        };
        if margin > radius {
            return Ok(Vec::new());
        }
        let cutoff = radius - margin;
        Ok(self
            .vertices()
            .filter(|&v| self.depths[v.0 as usize] <= cutoff)
            .collect())
    }

    /// Full structural check: CSR well-formedness, no self loops or
    /// duplicates, symmetry, and the degree/count pattern of the kind.
    /// O(|V| + |E| log deg); run automatically at build time for graphs up
    /// to 10^4 vertices.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertex_count();
        let fail = |why: String| Err(Error::InvariantViolation(why));
        if self.offsets[0] != 0 || *self.offsets.last().unwrap() as usize != self.neighbors.len() {
            return fail("offsets do not span the neighbor array".into());
        }
        for v in 0..n {
            if self.offsets[v] > self.offsets[v + 1] {
                return fail(format!("offsets decrease at vertex {v}"));
            }
            let list = self.neighbors(VertexId(v as u32));
            if list.is_empty() {
                return fail(format!("vertex {v} is isolated"));
            }
            let mut prev: Option<VertexId> = None;
            for &w in list {
                if w.0 as usize >= n {
                    return fail(format!("vertex {v} lists out-of-range neighbor {w}"));
                }
                if w.0 as usize == v {
                    return fail(format!("vertex {v} has a self loop"));
                }
                if prev.is_some_and(|p| p >= w) {
                    return fail(format!("neighbor list of {v} is not strictly ascending"));
                }
                prev = Some(w);
                if self.neighbors(w).binary_search(&VertexId(v as u32)).is_err() {
                    return fail(format!("edge ({v},{w}) has no reverse edge"));
                }
            }
        }
        match self.kind {
            GraphKind::Complete { n: k } => {
                if n != k as usize {
                    return fail(format!("complete graph has {n} vertices, expected {k}"));
                }
                for v in self.vertices() {
                    if self.degree(v) != n - 1 {
                        return fail(format!("vertex {v} of K_{n} has degree {}", self.degree(v)));
                    }
                }
            }
            GraphKind::TreeBall { branching, radius } => {
                let expected = self.kind.vertex_count()?;
                if n as u128 != expected {
                    return fail(format!("tree ball has {n} vertices, expected {expected}"));
                }
                if self.neighbors.len() != 2 * (n - 1) {
                    return fail("tree edge count is not |V| - 1".into());
                }
                for v in self.vertices() {
                    let d = self.depths[v.0 as usize];
                    let deg = self.degree(v);
                    let want = if d == radius { 1 } else { branching as usize + 1 };
                    if deg != want {
                        return fail(format!("depth-{d} vertex {v} has degree {deg}, expected {want}"));
                    }
                }
            }
            GraphKind::Torus { dim, side } => {
                if n as u128 != (side as u128).pow(dim) {
                    return fail(format!("torus has {n} vertices, expected {side}^{dim}"));
                }
                for v in self.vertices() {
                    if self.degree(v) != 2 * dim as usize {
                        return fail(format!("torus vertex {v} has degree {}", self.degree(v)));
                    }
                }
            }
        }
        Ok(())
    }
}

fn build_complete(n: u32) -> Result<Graph> {
    let n = n as usize;
    let mut offsets = Vec::with_capacity(n + 1);
    let mut neighbors = Vec::with_capacity(n * (n - 1));
    offsets.push(0u32);
    for v in 0..n as u32 {
        for w in 0..n as u32 {
            if w != v {
                neighbors.push(VertexId(w));
            }
        }
        offsets.push(neighbors.len() as u32);
    }
    Ok(Graph {
        kind: GraphKind::Complete { n: n as u32 },
        offsets,
        neighbors,
        depths: Vec::new(),
    })
}

fn build_tree_ball(branching: u32, radius: u32) -> Result<Graph> {
    let kind = GraphKind::TreeBall { branching, radius };
    let total = kind.vertex_count()? as usize;
    let n = branching as u64;

    // BFS layout: the root, then complete levels in order. `starts[k]` is
    // the id of the first depth-k vertex.
    let mut starts = Vec::with_capacity(radius as usize + 2);
    starts.push(0u64);
    starts.push(1u64);
    let mut level = n + 1;
    for _ in 1..=radius {
        let last = *starts.last().unwrap();
        starts.push(last + level);
        level *= n;
    }
    debug_assert_eq!(*starts.last().unwrap(), total as u64);

    let mut depths = vec![0u32; total];
    for k in 1..=radius as usize {
        for v in starts[k]..starts[k + 1] {
            depths[v as usize] = k as u32;
        }
    }

    let mut offsets = Vec::with_capacity(total + 1);
    let mut neighbors = Vec::with_capacity(2 * (total - 1));
    offsets.push(0u32);
    for v in 0..total as u64 {
        let k = depths[v as usize] as usize;
        if k > 0 {
            // Position within the level determines the parent: the root
            // fans out n+1 ways, deeper parents n ways.
            let j = v - starts[k];
            let parent = if k == 1 { 0 } else { starts[k - 1] + j / n };
            neighbors.push(VertexId(parent as u32));
        }
        if (k as u32) < radius {
            let j = v - starts[k];
            let width = if k == 0 { n + 1 } else { n };
            let first = starts[k + 1] + j * width;
            for c in first..first + width {
                neighbors.push(VertexId(c as u32));
            }
        }
        offsets.push(neighbors.len() as u32);
    }
    Ok(Graph {
        kind,
        offsets,
        neighbors,
        depths,
    })
}

fn build_torus(dim: u32, side: u32) -> Result<Graph> {
    let kind = GraphKind::Torus { dim, side };
    let total = kind.vertex_count()? as usize;
    let side = side as u64;
    let dim = dim as usize;

    // Mixed-radix coordinates with axis 0 least significant, so vertex 1 is
    // the axis-0 successor of vertex 0.
    let mut strides = Vec::with_capacity(dim);
    let mut s = 1u64;
    for _ in 0..dim {
        strides.push(s);
        s *= side;
    }

    let mut offsets = Vec::with_capacity(total + 1);
    let mut neighbors = Vec::with_capacity(total * 2 * dim);
    offsets.push(0u32);
    let mut scratch = Vec::with_capacity(2 * dim);
    for v in 0..total as u64 {
        scratch.clear();
        for &stride in &strides {
            let c = (v / stride) % side;
            let up = if c + 1 == side { v + stride - stride * side } else { v + stride };
            let down = if c == 0 { v + stride * side - stride } else { v - stride };
            scratch.push(up as u32);
            scratch.push(down as u32);
        }
        scratch.sort_unstable();
        neighbors.extend(scratch.iter().map(|&w| VertexId(w)));
        offsets.push(neighbors.len() as u32);
    }
    Ok(Graph {
        kind,
        offsets,
        neighbors,
        depths: Vec::new(),
    })
}
