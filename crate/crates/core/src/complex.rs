//! Simplicial complexes of dimension at most two, their oriented incidence
//! matrices and Hodge Laplacians.
//!
//! Every simplex carries the reference orientation given by increasing node
//! index, where the node index is the position of the node in the complex's
//! node list. An edge `(u, v)` with `u < v` points from `u` to `v`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Node identifier as it appears in input files: an integer or a string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeId {
    Int(i64),
    Name(String),
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Int(i) => write!(f, "{i}"),
            NodeId::Name(s) => f.write_str(s),
        }
    }
}

impl From<i64> for NodeId {
    fn from(i: i64) -> Self {
        NodeId::Int(i)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId::Name(s.to_owned())
    }
}

/// An immutable simplicial complex with nodes, oriented edges and oriented
/// triangles.
#[derive(Debug, Clone)]
pub struct SimplicialComplex {
    nodes: Vec<NodeId>,
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
    node_lookup: HashMap<String, usize>,
    edge_lookup: HashMap<[usize; 2], usize>,
    node_edges: Vec<Vec<usize>>,
    edge_triangles: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    /// Canonicalizes raw node, edge and triangle lists into a complex.
    ///
    /// Tuples are sorted into reference orientation, duplicate edges and
    /// triangles (also duplicate node identifiers) are silently merged, and the
    /// result is sorted lexicographically by node index. Faces are never
    /// inserted: a triangle whose edge is missing, or an edge whose node is
    /// missing, is rejected with [`Error::DanglingSimplex`].
    pub fn new<N, E, T>(nodes: N, edges: E, triangles: T) -> Result<Self>
    where
        N: IntoIterator,
        N::Item: Into<NodeId>,
        E: IntoIterator<Item = [NodeId; 2]>,
        T: IntoIterator<Item = [NodeId; 3]>,
    {
        let mut node_list = Vec::new();
        let mut node_lookup = HashMap::new();
        for id in nodes {
            let id = id.into();
            let key = id.to_string();
            if let std::collections::hash_map::Entry::Vacant(slot) = node_lookup.entry(key) {
                slot.insert(node_list.len());
                node_list.push(id);
            }
        }

        let resolve = |id: &NodeId, simplex: &dyn Fn() -> String| -> Result<usize> {
            node_lookup
                .get(&id.to_string())
                .copied()
                .ok_or_else(|| Error::DanglingSimplex {
                    simplex: simplex(),
                    missing: format!("node {id}"),
                })
        };

        let mut edge_idx = Vec::new();
        for [a, b] in edges {
            let name = || format!("edge ({a}, {b})");
            let (i, j) = (resolve(&a, &name)?, resolve(&b, &name)?);
            if i == j {
                return Err(Error::DegenerateSimplex(name()));
            }
            edge_idx.push([i.min(j), i.max(j)]);
        }

        let mut tri_idx = Vec::new();
        for [a, b, c] in triangles {
            let name = || format!("triangle ({a}, {b}, {c})");
            let mut t = [resolve(&a, &name)?, resolve(&b, &name)?, resolve(&c, &name)?];
            t.sort_unstable();
            if t[0] == t[1] || t[1] == t[2] {
                return Err(Error::DegenerateSimplex(name()));
            }
            tri_idx.push(t);
        }

        Self::assemble(node_list, node_lookup, edge_idx, tri_idx)
    }

    /// Builds a complex on nodes labelled `0..n_nodes` from index tuples.
    pub fn from_indices(n_nodes: usize, edges: &[[usize; 2]], triangles: &[[usize; 3]]) -> Result<Self> {
        let nodes: Vec<NodeId> = (0..n_nodes as i64).map(NodeId::Int).collect();
        let id = |i: usize| -> Result<NodeId> {
            if i < n_nodes {
                Ok(NodeId::Int(i as i64))
            } else {
                Err(Error::DanglingSimplex {
                    simplex: "input tuple".into(),
                    missing: format!("node {i}"),
                })
            }
        };
        let edges = edges
            .iter()
            .map(|&[a, b]| Ok([id(a)?, id(b)?]))
            .collect::<Result<Vec<_>>>()?;
        let triangles = triangles
            .iter()
            .map(|&[a, b, c]| Ok([id(a)?, id(b)?, id(c)?]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(nodes, edges, triangles)
    }

    fn assemble(
        nodes: Vec<NodeId>,
        node_lookup: HashMap<String, usize>,
        mut edges: Vec<[usize; 2]>,
        mut triangles: Vec<[usize; 3]>,
    ) -> Result<Self> {
        edges.sort_unstable();
        edges.dedup();
        triangles.sort_unstable();
        triangles.dedup();

        let edge_lookup: HashMap<[usize; 2], usize> =
            edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();

        let mut node_edges = vec![Vec::new(); nodes.len()];
        for (k, &[u, v]) in edges.iter().enumerate() {
            node_edges[u].push(k);
            node_edges[v].push(k);
        }

        let mut edge_triangles = vec![Vec::new(); edges.len()];
        for (t, &[u, v, w]) in triangles.iter().enumerate() {
            for face in [[u, v], [v, w], [u, w]] {
                match edge_lookup.get(&face) {
                    Some(&k) => edge_triangles[k].push(t),
                    None => {
                        return Err(Error::DanglingSimplex {
                            simplex: format!("triangle ({}, {}, {})", nodes[u], nodes[v], nodes[w]),
                            missing: format!("edge ({}, {})", nodes[face[0]], nodes[face[1]]),
                        })
                    }
                }
            }
        }

        Ok(Self {
            nodes,
            edges,
            triangles,
            node_lookup,
            edge_lookup,
            node_edges,
            edge_triangles,
        })
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Edges as node-index pairs in reference orientation.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Triangles as node-index triples in reference orientation.
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.node_lookup.get(id).copied()
    }

    /// Index of the edge between two node indices, in either order.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_lookup.get(&[a.min(b), a.max(b)]).copied()
    }

    /// Edge index of the edge between two labelled nodes, together with the
    /// orientation sign of `(a, b)` relative to the reference orientation.
    pub fn find_edge(&self, a: &str, b: &str) -> Result<(usize, f64)> {
        let i = self.node_index(a).ok_or_else(|| Error::UnknownNode(a.into()))?;
        let j = self.node_index(b).ok_or_else(|| Error::UnknownNode(b.into()))?;
        let k = self
            .edge_index(i, j)
            .ok_or_else(|| Error::UnknownEdge(a.into(), b.into()))?;
        Ok((k, if i < j { 1.0 } else { -1.0 }))
    }

    /// Node labels of edge `k` in reference orientation.
    pub fn edge_labels(&self, k: usize) -> (&NodeId, &NodeId) {
        let [u, v] = self.edges[k];
        (&self.nodes[u], &self.nodes[v])
    }

    fn check_edge(&self, edge: usize) -> Result<()> {
        if edge < self.edges.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: edge,
                len: self.edges.len(),
            })
        }
    }

    /// Lower and upper neighborhoods of an edge: the edges sharing a node with
    /// it and the edges sharing a triangle with it.
    pub fn neighborhoods(&self, edge: usize) -> Result<Neighborhood> {
        self.check_edge(edge)?;
        let [u, v] = self.edges[edge];
        let lower = self.node_edges[u]
            .iter()
            .chain(&self.node_edges[v])
            .copied()
            .filter(|&k| k != edge)
            .collect();
        let upper = self.edge_triangles[edge]
            .iter()
            .flat_map(|&t| {
                let [a, b, c] = self.triangles[t];
                [[a, b], [b, c], [a, c]]
            })
            .map(|face| self.edge_lookup[&face])
            .filter(|&k| k != edge)
            .collect();
        Ok(Neighborhood { lower, upper })
    }

    /// Number of lower plus upper neighbors of an edge.
    pub fn edge_degree(&self, edge: usize) -> Result<usize> {
        let n = self.neighborhoods(edge)?;
        Ok(n.lower.len() + n.upper.len())
    }

    /// Maximal edge degree over the complex (0 for a complex without edges).
    pub fn max_edge_degree(&self) -> usize {
        (0..self.num_edges())
            .map(|k| self.edge_degree(k).expect("index in range"))
            .max()
            .unwrap_or(0)
    }

    /// Number of connected components of the underlying graph.
    pub fn connected_components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.nodes.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut components = self.nodes.len();
        for &[u, v] in &self.edges {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru] = rv;
                components -= 1;
            }
        }
        components
    }

    /// All 3-cliques of the underlying graph, as sorted node-index triples.
    /// These are candidates for triangles; whether to fill them is up to the
    /// caller.
    pub fn three_cliques(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for &[u, v] in &self.edges {
            for &k in &self.node_edges[v] {
                let [a, b] = self.edges[k];
                let w = if a == v { b } else { a };
                if w > v && self.edge_index(u, w).is_some() {
                    out.push([u, v, w]);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Returns the same complex with the given node-index triangles added.
    pub fn with_triangles(&self, extra: &[[usize; 3]]) -> Result<Self> {
        let mut tris = self.triangles.clone();
        for &t in extra {
            let mut t = t;
            t.sort_unstable();
            tris.push(t);
        }
        Self::assemble(self.nodes.clone(), self.node_lookup.clone(), self.edges.clone(), tris)
    }
}

/// Lower (shared node) and upper (shared triangle) neighbors of an edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighborhood {
    pub lower: BTreeSet<usize>,
    pub upper: BTreeSet<usize>,
}

/// Node-edge and edge-triangle incidence matrices with entries in {-1, 0, 1}.
#[derive(Debug, Clone)]
pub struct IncidencePair {
    /// `N0 x N1`; column of edge `(u, v)` holds -1 at `u` and +1 at `v`.
    pub b1: CsrMatrix<i32>,
    /// `N1 x N2`; for triangle `(u, v, w)` the edges `(u, v)`, `(v, w)` get +1
    /// and `(u, w)` gets -1.
    pub b2: CsrMatrix<i32>,
}

impl IncidencePair {
    pub fn new(complex: &SimplicialComplex) -> Self {
        let b1 = CsrMatrix::from_triplets(
            complex.num_nodes(),
            complex.num_edges(),
            complex
                .edges
                .iter()
                .enumerate()
                .flat_map(|(k, &[u, v])| [(u, k, -1), (v, k, 1)])
                .collect(),
        );
        let b2 = CsrMatrix::from_triplets(
            complex.num_edges(),
            complex.num_triangles(),
            complex
                .triangles
                .iter()
                .enumerate()
                .flat_map(|(t, &[u, v, w])| {
                    let e = |a, b| complex.edge_lookup[&[a, b]];
                    [(e(u, v), t, 1), (e(v, w), t, 1), (e(u, w), t, -1)]
                })
                .collect(),
        );
        Self { b1, b2 }
    }

    /// `B1 * B2` in exact integer arithmetic; the zero matrix for any valid
    /// complex.
    pub fn boundary_of_boundary(&self) -> CsrMatrix<i64> {
        self.b1.map(i64::from).matmul(&self.b2.map(i64::from))
    }
}

/// Hodge Laplacians of a complex, stored sparse.
#[derive(Debug, Clone)]
pub struct HodgeLaplacians {
    /// Graph Laplacian `B1 B1^T`.
    pub l0: CsrMatrix<f64>,
    /// `B1^T B1`.
    pub l1_lower: CsrMatrix<f64>,
    /// `B2 B2^T`.
    pub l1_upper: CsrMatrix<f64>,
    /// `l1_lower + l1_upper`.
    pub l1: CsrMatrix<f64>,
}

impl HodgeLaplacians {
    pub fn new(pair: &IncidencePair) -> Self {
        let b1t = pair.b1.transpose();
        let b2t = pair.b2.transpose();
        let l0 = pair.b1.matmul(&b1t);
        let lower = b1t.matmul(&pair.b1);
        let upper = pair.b2.matmul(&b2t);
        let l1 = lower.add(&upper);
        Self {
            l0: l0.to_f64(),
            l1_lower: lower.to_f64(),
            l1_upper: upper.to_f64(),
            l1: l1.to_f64(),
        }
    }

    pub fn from_complex(complex: &SimplicialComplex) -> Self {
        Self::new(&IncidencePair::new(complex))
    }

    /// Number of edges.
    pub fn dim(&self) -> usize {
        self.l1.nrows()
    }
}

/// A complex together with its incidence matrices and Laplacians, computed
/// once and shared by the spectral, filtering and design routines.
#[derive(Debug, Clone)]
pub struct HodgeSystem {
    pub complex: SimplicialComplex,
    pub incidence: IncidencePair,
    pub laplacians: HodgeLaplacians,
}

impl HodgeSystem {
    pub fn new(complex: SimplicialComplex) -> Self {
        let incidence = IncidencePair::new(&complex);
        let laplacians = HodgeLaplacians::new(&incidence);
        Self {
            complex,
            incidence,
            laplacians,
        }
    }

    pub fn num_edges(&self) -> usize {
        self.complex.num_edges()
    }
}

/// A real value per edge; the sign gives the direction relative to the edge's
/// reference orientation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EdgeFlow {
    values: Vec<f64>,
}

impl EdgeFlow {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![0.0; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm(&self) -> f64 {
        crate::vecops::norm(&self.values)
    }

    pub fn dot(&self, other: &EdgeFlow) -> f64 {
        crate::vecops::dot(&self.values, &other.values)
    }

    pub fn scaled(&self, s: f64) -> EdgeFlow {
        EdgeFlow::new(self.values.iter().map(|v| v * s).collect())
    }

    pub fn add(&self, other: &EdgeFlow) -> EdgeFlow {
        EdgeFlow::new(crate::vecops::axpby(1.0, &self.values, 1.0, &other.values))
    }

    pub fn sub(&self, other: &EdgeFlow) -> EdgeFlow {
        EdgeFlow::new(crate::vecops::axpby(1.0, &self.values, -1.0, &other.values))
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.values.len() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: n,
                found: self.values.len(),
            })
        }
    }
}

impl From<Vec<f64>> for EdgeFlow {
    fn from(values: Vec<f64>) -> Self {
        Self::new(values)
    }
}

impl std::ops::Deref for EdgeFlow {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.values
    }
}
