//! Decomposable (chordal) undirected graphs: perfect elimination orders,
//! maximal cliques, and a running-intersection (perfect) clique sequence.
//!
//! The constructor canonicalizes the graph into *elimination coordinates*:
//! vertices are relabeled so that `0, 1, …, d−1` is a perfect elimination
//! order (PEO). When the input labeling already is a PEO it is kept unchanged
//! (the bundled benchmark graphs are all in natural PEO order); otherwise a
//! maximum-cardinality-search order is used. [`DecomposableGraph::to_original`]
//! maps positions back to input labels.
//!
//! Under a PEO, the Cholesky factor of any positive-definite matrix with the
//! graph's sparsity pattern incurs no fill-in: column `s` of the factor is
//! nonzero only at `s` and the later neighbors of `s`. The per-vertex counts
//! `ν_i = |ne(v_i) ∩ {i+1, …, d}|` therefore describe exactly the free
//! coordinates of such factors, with `Σ ν_i = |edges|`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A validated decomposable graph in elimination coordinates.
#[derive(Clone, Debug)]
pub struct DecomposableGraph {
    dim: usize,
    /// Adjacency matrix, `dim × dim`, elimination coordinates.
    adj: Vec<bool>,
    /// Edges `(lo, hi)` with `lo < hi`, sorted, elimination coordinates.
    edges: Vec<(usize, usize)>,
    /// Position → input label (0-based).
    to_original: Vec<usize>,
    /// Maximal cliques in a perfect sequence (each ascending).
    cliques: Vec<Vec<usize>>,
    /// `separators[j] = C_j ∩ (C_0 ∪ … ∪ C_{j−1})`, stored with multiplicity;
    /// `separators[0]` is empty.
    separators: Vec<Vec<usize>>,
    /// Later-neighbor counts per position.
    nu: Vec<usize>,
}

impl DecomposableGraph {
    /// Builds and validates a graph from `d` and an edge list (0-based input
    /// labels). Rejects non-decomposable graphs.
    pub fn new(d: usize, input_edges: &[(usize, usize)]) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter {
                name: "graph vertex count",
            });
        }
        // Normalize, validate, dedupe.
        let mut adj_in = vec![false; d * d];
        for &(a, b) in input_edges {
            if a >= d || b >= d || a == b {
                return Err(Error::InvalidParameter {
                    name: "graph edge endpoints",
                });
            }
            adj_in[a * d + b] = true;
            adj_in[b * d + a] = true;
        }

        // Prefer the input labeling when it already is a PEO; otherwise fall
        // back to the reversed maximum-cardinality-search order, whose
        // validity certifies chordality.
        let identity: Vec<usize> = (0..d).collect();
        let order = if verify_peo(d, &adj_in, &identity).is_ok() {
            identity
        } else {
            let candidate = reversed_mcs_order(d, &adj_in);
            if let Err(v) = verify_peo(d, &adj_in, &candidate) {
                return Err(Error::NotDecomposable { vertex: v });
            }
            candidate
        };

        // Relabel into elimination coordinates: position p holds order[p].
        let to_original = order;
        let mut pos_of = vec![0usize; d];
        for (p, &v) in to_original.iter().enumerate() {
            pos_of[v] = p;
        }
        let mut adj = vec![false; d * d];
        let mut edges = Vec::new();
        for a in 0..d {
            for b in (a + 1)..d {
                if adj_in[to_original[a] * d + to_original[b]] {
                    adj[a * d + b] = true;
                    adj[b * d + a] = true;
                    edges.push((a, b));
                }
            }
        }

        let nu: Vec<usize> = (0..d)
            .map(|p| ((p + 1)..d).filter(|&q| adj[p * d + q]).count())
            .collect();
        debug_assert_eq!(nu.iter().sum::<usize>(), edges.len());

        let cliques_unordered = maximal_cliques(d, &adj);
        let (cliques, separators) = perfect_sequence(&cliques_unordered)?;

        // Defensive audits: every edge lies in some clique, and each
        // separator equals its clique's intersection with everything earlier.
        for &(a, b) in &edges {
            if !cliques
                .iter()
                .any(|c| c.contains(&a) && c.contains(&b))
            {
                return Err(Error::NotDecomposable { vertex: to_original[a] });
            }
        }
        let mut seen = vec![false; d];
        for (j, c) in cliques.iter().enumerate() {
            let inter: Vec<usize> = c.iter().copied().filter(|&v| seen[v]).collect();
            if inter != separators[j] {
                return Err(Error::NotDecomposable {
                    vertex: to_original[c[0]],
                });
            }
            for &v in c {
                seen[v] = true;
            }
        }

        Ok(Self {
            dim: d,
            adj,
            edges,
            to_original,
            cliques,
            separators,
            nu,
        })
    }

    /// Parses the edge-list text format: first significant line `d`, then one
    /// `i j` pair per line (1-based). Blank lines and `#` comments allowed.
    pub fn from_edge_list_str(text: &str) -> Result<Self> {
        let mut d: Option<usize> = None;
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            match d {
                None => {
                    let v: usize = it.next().unwrap().parse().map_err(|_| Error::GraphParse {
                        line: lineno + 1,
                        what: "vertex count is not an integer",
                    })?;
                    if it.next().is_some() {
                        return Err(Error::GraphParse {
                            line: lineno + 1,
                            what: "expected a single vertex count",
                        });
                    }
                    d = Some(v);
                }
                Some(dv) => {
                    let a: usize = it
                        .next()
                        .ok_or(Error::GraphParse {
                            line: lineno + 1,
                            what: "missing edge endpoint",
                        })?
                        .parse()
                        .map_err(|_| Error::GraphParse {
                            line: lineno + 1,
                            what: "edge endpoint is not an integer",
                        })?;
                    let b: usize = it
                        .next()
                        .ok_or(Error::GraphParse {
                            line: lineno + 1,
                            what: "missing second edge endpoint",
                        })?
                        .parse()
                        .map_err(|_| Error::GraphParse {
                            line: lineno + 1,
                            what: "edge endpoint is not an integer",
                        })?;
                    if it.next().is_some() {
                        return Err(Error::GraphParse {
                            line: lineno + 1,
                            what: "trailing tokens after edge",
                        });
                    }
                    if a == 0 || b == 0 || a > dv || b > dv {
                        return Err(Error::GraphParse {
                            line: lineno + 1,
                            what: "edge endpoint out of range (vertices are 1-based)",
                        });
                    }
                    edges.push((a - 1, b - 1));
                }
            }
        }
        let d = d.ok_or(Error::GraphParse {
            line: 0,
            what: "missing vertex count",
        })?;
        Self::new(d, &edges)
    }

    /// The 5-vertex, 5-edge benchmark graph: edges (1,2), (1,3), (2,3),
    /// (3,4), (4,5); cliques {1,2,3}, {3,4}, {4,5}; d + |E| = 10 free
    /// parameters for graph-constrained Cholesky factors.
    pub fn default_benchmark() -> Self {
        Self::new(5, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4)])
            .expect("benchmark graph is decomposable")
    }

    /// Complete graph on `d` vertices.
    pub fn complete(d: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for a in 0..d {
            for b in (a + 1)..d {
                edges.push((a, b));
            }
        }
        Self::new(d, &edges)
    }

    /// Edgeless graph on `d` vertices.
    pub fn empty_graph(d: usize) -> Result<Self> {
        Self::new(d, &[])
    }

    /// Path graph 1 − 2 − … − d.
    pub fn path(d: usize) -> Result<Self> {
        let edges: Vec<(usize, usize)> = (1..d).map(|i| (i - 1, i)).collect();
        Self::new(d, &edges)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Edges `(lo, hi)` in elimination coordinates, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a * self.dim + b]
    }

    /// Maximal cliques in a perfect (running-intersection) sequence.
    pub fn cliques(&self) -> &[Vec<usize>] {
        &self.cliques
    }

    /// `separators()[j]` is C_j's intersection with all earlier cliques
    /// (empty for j = 0); stored with multiplicity.
    pub fn separators(&self) -> &[Vec<usize>] {
        &self.separators
    }

    /// Later-neighbor counts ν_i per position.
    pub fn nu(&self) -> &[usize] {
        &self.nu
    }

    /// Position → input label (0-based).
    pub fn to_original(&self) -> &[usize] {
        &self.to_original
    }

    /// Later neighbors of position `p`, ascending.
    pub fn later_neighbors(&self, p: usize) -> Vec<usize> {
        ((p + 1)..self.dim)
            .filter(|&q| self.adj[p * self.dim + q])
            .collect()
    }

    /// `d + |E|`: the number of free coordinates of a graph-patterned
    /// triangular factor.
    pub fn free_parameter_count(&self) -> usize {
        self.dim + self.edges.len()
    }
}

/// Checks that `order` is a perfect elimination order of the graph: every
/// vertex's later neighbors must be pairwise adjacent. Returns the first
/// offending vertex (input label) on failure.
fn verify_peo(d: usize, adj: &[bool], order: &[usize]) -> core::result::Result<(), usize> {
    let mut pos = vec![0usize; d];
    for (p, &v) in order.iter().enumerate() {
        pos[v] = p;
    }
    for &v in order {
        let later: Vec<usize> = (0..d)
            .filter(|&w| adj[v * d + w] && pos[w] > pos[v])
            .collect();
        for (i, &a) in later.iter().enumerate() {
            for &b in &later[i + 1..] {
                if !adj[a * d + b] {
                    return Err(v);
                }
            }
        }
    }
    Ok(())
}

/// Maximum cardinality search; returns the reversed visit order, which is a
/// PEO iff the graph is chordal. Ties break to the smallest input label.
fn reversed_mcs_order(d: usize, adj: &[bool]) -> Vec<usize> {
    let mut weight = vec![0usize; d];
    let mut visited = vec![false; d];
    let mut visit = Vec::with_capacity(d);
    for _ in 0..d {
        let mut best: Option<usize> = None;
        for v in (0..d).filter(|&v| !visited[v]) {
            match best {
                None => best = Some(v),
                // Strict inequality keeps ties on the smallest label.
                Some(b) if weight[v] > weight[b] => best = Some(v),
                _ => {}
            }
        }
        let v = best.expect("unvisited vertex exists");
        visited[v] = true;
        visit.push(v);
        for w in 0..d {
            if adj[v * d + w] && !visited[w] {
                weight[w] += 1;
            }
        }
    }
    visit.reverse();
    visit
}

/// Maximal cliques from the PEO structure: C(v) = {v} ∪ later-neighbors(v),
/// with non-maximal candidates removed. Elimination coordinates.
fn maximal_cliques(d: usize, adj: &[bool]) -> Vec<Vec<usize>> {
    let mut cands: Vec<Vec<usize>> = (0..d)
        .map(|p| {
            let mut c = vec![p];
            c.extend(((p + 1)..d).filter(|&q| adj[p * d + q]));
            c
        })
        .collect();
    let snapshot = cands.clone();
    cands.retain(|c| {
        !snapshot
            .iter()
            .any(|other| other.len() > c.len() && c.iter().all(|v| other.contains(v)))
    });
    cands
}

/// Orders maximal cliques into a perfect sequence via a maximum-weight
/// spanning tree on intersection sizes (a junction tree for chordal graphs),
/// taken in BFS preorder from the first clique. Separators are the
/// clique-parent intersections, which the junction property makes equal to
/// each clique's intersection with everything earlier.
fn perfect_sequence(cliques: &[Vec<usize>]) -> Result<(Vec<Vec<usize>>, Vec<Vec<usize>>)> {
    let m = cliques.len();
    if m == 0 {
        return Err(Error::EmptyInput("clique list"));
    }
    // Candidate tree edges sorted by (intersection size desc, i, j).
    let mut tree_edges: Vec<(usize, usize, usize)> = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            let w = cliques[i].iter().filter(|v| cliques[j].contains(v)).count();
            tree_edges.push((w, i, j));
        }
    }
    tree_edges.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    // Kruskal with zero-weight edges allowed so disconnected graphs still
    // span a single tree (their separators are empty).
    let mut parent_uf: Vec<usize> = (0..m).collect();
    fn find(uf: &mut Vec<usize>, x: usize) -> usize {
        if uf[x] != x {
            let r = find(uf, uf[x]);
            uf[x] = r;
        }
        uf[x]
    }
    let mut adj_tree: Vec<Vec<usize>> = vec![Vec::new(); m];
    for &(_, i, j) in &tree_edges {
        let (ri, rj) = (find(&mut parent_uf, i), find(&mut parent_uf, j));
        if ri != rj {
            parent_uf[ri] = rj;
            adj_tree[i].push(j);
            adj_tree[j].push(i);
        }
    }

    // BFS preorder from clique 0, children ascending.
    let mut order = Vec::with_capacity(m);
    let mut parent: Vec<Option<usize>> = vec![None; m];
    let mut visited = vec![false; m];
    let mut queue = alloc::collections::VecDeque::new();
    visited[0] = true;
    queue.push_back(0);
    while let Some(c) = queue.pop_front() {
        order.push(c);
        let mut kids: Vec<usize> = adj_tree[c].iter().copied().filter(|&k| !visited[k]).collect();
        kids.sort_unstable();
        for k in kids {
            visited[k] = true;
            parent[k] = Some(c);
            queue.push_back(k);
        }
    }
    debug_assert_eq!(order.len(), m);

    let ordered: Vec<Vec<usize>> = order.iter().map(|&i| cliques[i].clone()).collect();
    let mut seps = Vec::with_capacity(m);
    for (rank, &ci) in order.iter().enumerate() {
        if rank == 0 {
            seps.push(Vec::new());
        } else {
            let p = parent[ci].expect("non-root clique has a parent");
            let sep: Vec<usize> = cliques[ci]
                .iter()
                .copied()
                .filter(|v| cliques[p].contains(v))
                .collect();
            seps.push(sep);
        }
    }
    Ok((ordered, seps))
}
