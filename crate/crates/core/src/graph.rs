//! Graphs, types and flags.
//!
//! Graphs are stored as adjacency bitset rows. Every object in this module is
//! immutable once built and cheap to clone.

use std::fmt;

use crate::error::GraphError;

/// Largest vertex count supported by [`Graph`]. Canonical forms pack the
/// upper-triangular adjacency matrix into a `u128`, which holds 120 bits.
pub const MAX_VERTICES: usize = 16;

type Row = u16;

/// Undirected loop-free graph on the vertices `0..n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Graph {
    n: u8,
    adj: [Row; MAX_VERTICES],
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices { n, max: MAX_VERTICES });
        }
        Ok(Graph {
            n: n as u8,
            adj: [0; MAX_VERTICES],
        })
    }

    pub fn complete(n: usize) -> Result<Self, GraphError> {
        Ok(Self::empty(n)?.complement())
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange { vertex: u.max(v), n });
            }
            if u == v {
                return Err(GraphError::Loop { vertex: u });
            }
            g.set_edge(u, v, true);
        }
        Ok(g)
    }

    /// Parses the concatenated upper-triangular adjacency rows
    /// (`(0,1) (0,2) … (0,n-1) (1,2) …`) written as `0`/`1` characters.
    /// The empty string is read as the graph on no vertices; use
    /// [`Graph::from_upper_triangle_on`] for a single vertex.
    pub fn from_upper_triangle(bits: &str) -> Result<Self, GraphError> {
        let len = bits.len();
        let n = vertices_for_pairs(len).ok_or(GraphError::BadBitstringLength { len })?;
        Self::from_upper_triangle_on(n, bits)
    }

    /// Like [`Graph::from_upper_triangle`] with the order given explicitly.
    pub fn from_upper_triangle_on(n: usize, bits: &str) -> Result<Self, GraphError> {
        let len = bits.len();
        if len != n * n.saturating_sub(1) / 2 {
            return Err(GraphError::BadBitstringLength { len });
        }
        let mut g = Self::empty(n)?;
        let mut chars = bits.chars();
        for u in 0..n {
            for v in u + 1..n {
                match chars.next() {
                    Some('1') => g.set_edge(u, v, true),
                    Some('0') => {}
                    Some(c) => return Err(GraphError::BadBitstringChar { c }),
                    None => unreachable!("length checked above"),
                }
            }
        }
        Ok(g)
    }

    pub fn upper_triangle(&self) -> String {
        let n = self.order();
        let mut s = String::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n {
            for v in u + 1..n {
                s.push(if self.has_edge(u, v) { '1' } else { '0' });
            }
        }
        s
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    /// Neighbourhood of `v` as a bitmask.
    #[inline]
    pub fn neighbours(&self, v: usize) -> u32 {
        u32::from(self.adj[v])
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn edge_count(&self) -> usize {
        self.adj[..self.order()]
            .iter()
            .map(|r| r.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.order();
        (0..n).flat_map(move |u| (u + 1..n).filter(move |&v| self.has_edge(u, v)).map(move |v| (u, v)))
    }

    pub(crate) fn set_edge(&mut self, u: usize, v: usize, present: bool) {
        debug_assert!(u != v && u < self.order() && v < self.order());
        if present {
            self.adj[u] |= 1 << v;
            self.adj[v] |= 1 << u;
        } else {
            self.adj[u] &= !(1 << v);
            self.adj[v] &= !(1 << u);
        }
    }

    /// Graph with one extra vertex `n`, adjacent to the vertices in `mask`.
    pub(crate) fn extended(&self, mask: u32) -> Self {
        let n = self.order();
        debug_assert!(n < MAX_VERTICES && mask >> n == 0);
        let mut g = *self;
        g.n += 1;
        for u in 0..n {
            if mask >> u & 1 == 1 {
                g.set_edge(u, n, true);
            }
        }
        g
    }

    pub fn complement(&self) -> Self {
        let n = self.order();
        let full: Row = if n == 0 { 0 } else { Row::MAX >> (MAX_VERTICES - n) };
        let mut g = *self;
        for v in 0..n {
            g.adj[v] = !self.adj[v] & full & !(1 << v);
        }
        g
    }

    /// Subgraph induced by `vertices`; vertex `vertices[i]` becomes `i`.
    pub fn induced(&self, vertices: &[usize]) -> Self {
        let mut g = Graph {
            n: vertices.len() as u8,
            adj: [0; MAX_VERTICES],
        };
        for (i, &u) in vertices.iter().enumerate() {
            let mut row = 0;
            for (j, &v) in vertices.iter().enumerate() {
                if i != j && self.has_edge(u, v) {
                    row |= 1 << j;
                }
            }
            g.adj[i] = row;
        }
        g
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &u)| vertices[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    pub fn is_independent(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &u)| vertices[i + 1..].iter().all(|&v| !self.has_edge(u, v)))
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph({}; {:?})", self.n, self.edges().collect::<Vec<_>>())
    }
}

fn vertices_for_pairs(len: usize) -> Option<usize> {
    (0..=MAX_VERTICES).find(|n| n * n.saturating_sub(1) / 2 == len)
}

/// A type: a graph on the labelled vertex set `0..s`.
///
/// Labels matter, so two types are equal only if their edge sets coincide.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct TypeGraph(Graph);

impl TypeGraph {
    pub fn new(graph: Graph) -> Self {
        TypeGraph(graph)
    }

    /// The unique type of order 0.
    pub fn empty_type() -> Self {
        TypeGraph(Graph::empty(0).expect("0 vertices"))
    }

    pub fn from_edges(s: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        Graph::from_edges(s, edges).map(TypeGraph)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.0.order()
    }

    pub fn graph(&self) -> &Graph {
        &self.0
    }

    pub fn complement(&self) -> Self {
        TypeGraph(self.0.complement())
    }
}

impl fmt::Debug for TypeGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Type({}; {:?})", self.order(), self.0.edges().collect::<Vec<_>>())
    }
}

/// A σ-flag: a graph with an injective embedding of the type's vertices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Flag {
    graph: Graph,
    roots: Vec<usize>,
    ty: TypeGraph,
}

impl Flag {
    /// Builds a flag, checking that `roots` are distinct vertices of `graph`
    /// inducing exactly the labelled type `ty`.
    pub fn new(graph: Graph, roots: Vec<usize>, ty: TypeGraph) -> Result<Self, GraphError> {
        if roots.len() != ty.order() {
            return Err(GraphError::RootCount {
                expected: ty.order(),
                found: roots.len(),
            });
        }
        let n = graph.order();
        let mut seen = 0u32;
        for &r in &roots {
            if r >= n {
                return Err(GraphError::VertexOutOfRange { vertex: r, n });
            }
            if seen >> r & 1 == 1 {
                return Err(GraphError::RepeatedRoot { vertex: r });
            }
            seen |= 1 << r;
        }
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                if graph.has_edge(roots[i], roots[j]) != ty.0.has_edge(i, j) {
                    return Err(GraphError::RootPatternMismatch { i, j });
                }
            }
        }
        Ok(Flag { graph, roots, ty })
    }

    /// A 0-flag, i.e. a plain graph.
    pub fn unlabelled(graph: Graph) -> Self {
        Flag {
            graph,
            roots: Vec::new(),
            ty: TypeGraph::empty_type(),
        }
    }

    /// Flag whose roots are the first `ty.order()` vertices of `graph`.
    pub fn with_leading_roots(graph: Graph, ty: TypeGraph) -> Result<Self, GraphError> {
        Self::new(graph, (0..ty.order()).collect(), ty)
    }

    /// Flag over the type induced by the first `s` vertices of `graph`.
    pub fn rooted_prefix(graph: Graph, s: usize) -> Result<Self, GraphError> {
        if s > graph.order() {
            return Err(GraphError::RootCount {
                expected: s,
                found: graph.order(),
            });
        }
        let roots: Vec<usize> = (0..s).collect();
        let ty = TypeGraph(graph.induced(&roots));
        Ok(Flag { graph, roots, ty })
    }

    pub(crate) fn from_parts_unchecked(graph: Graph, roots: Vec<usize>, ty: TypeGraph) -> Self {
        debug_assert!(Flag::new(graph, roots.clone(), ty).is_ok());
        Flag { graph, roots, ty }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn flag_type(&self) -> &TypeGraph {
        &self.ty
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.graph.order()
    }

    #[inline]
    pub fn type_order(&self) -> usize {
        self.roots.len()
    }

    /// Bitmask of the root vertices.
    pub fn root_mask(&self) -> u32 {
        self.roots.iter().fold(0, |m, &r| m | 1 << r)
    }

    /// Vertices that are not roots, ascending.
    pub fn free_vertices(&self) -> Vec<usize> {
        let mask = self.root_mask();
        (0..self.order()).filter(|v| mask >> v & 1 == 0).collect()
    }

    /// `F|_U`: the flag induced on `subset`, which must contain every root.
    /// Vertices keep their relative order and are renumbered from 0.
    pub fn induced_subflag(&self, subset: &[usize]) -> Result<Flag, GraphError> {
        let mut mask = 0u32;
        for &v in subset {
            if v >= self.order() {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: self.order() });
            }
            mask |= 1 << v;
        }
        if let Some(&r) = self.roots.iter().find(|&&r| mask >> r & 1 == 0) {
            return Err(GraphError::RootNotInSubset { vertex: r });
        }
        let vertices: Vec<usize> = (0..self.order()).filter(|v| mask >> v & 1 == 1).collect();
        let position = |v: usize| vertices.iter().position(|&u| u == v).expect("root in subset");
        let roots = self.roots.iter().map(|&r| position(r)).collect();
        Ok(Flag {
            graph: self.graph.induced(&vertices),
            roots,
            ty: self.ty,
        })
    }

    /// Complements the graph; the type is complemented accordingly and the
    /// roots are kept.
    pub fn complement(&self) -> Flag {
        Flag {
            graph: self.graph.complement(),
            roots: self.roots.clone(),
            ty: self.ty.complement(),
        }
    }

    /// Relabels so that vertex `v` becomes `perm[v]`.
    pub fn relabelled(&self, perm: &[usize]) -> Flag {
        let n = self.order();
        let mut order = vec![0; n];
        for (v, &p) in perm.iter().enumerate() {
            order[p] = v;
        }
        Flag {
            graph: self.graph.induced(&order),
            roots: self.roots.iter().map(|&r| perm[r]).collect(),
            ty: self.ty,
        }
    }
}

impl fmt::Debug for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Flag({:?}, roots {:?})", self.graph, self.roots)
    }
}
