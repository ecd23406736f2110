//! Completing partial distance data on a graph.
//!
//! Given lengths on the edges of a graph, look for a full squared distance
//! matrix realizable by kissing spheres in dimension `n`. On chordal graphs
//! the per-clique test is sufficient up to degenerate separators: each
//! maximal clique is realized on its own and the pieces are glued along a
//! clique tree by Lorentz maps. On graphs with a chordless cycle the
//! per-clique test is not sufficient, and [`non_chordal_witness`] builds
//! lengths that show it.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::{
    check_kissing, construct_embedding, Certificate, EmbedError, Method, RealizationFailure,
    SquaredDistanceMatrix, MINORS_MAX_ORDER, ROUND_TRIP_TOLERANCE,
};
use crate::lightcone::{d_m_squared, lorentz_align, LorentzMap, MinkowskiVector};
use crate::numkernel::{inertia, Inertia, SymMatrix, Tolerance};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompletionError {
    #[error("a graph needs at least one vertex")]
    NoVertices,
    #[error("vertex {vertex} out of range for {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge ({u}, {v}) has invalid length {len}")]
    BadLength { u: usize, v: usize, len: f64 },
    #[error("graph is not chordal")]
    NotChordal,
    #[error("graph is chordal; there is no chordless cycle to build a witness from")]
    Chordal,
    #[error("clique of size {0} exceeds the cap of {MINORS_MAX_ORDER} for non-chordal graphs")]
    CliqueTooLarge(usize),
    #[error("root clique {root} out of range for {count} cliques")]
    BadRoot { root: usize, count: usize },
    #[error("matrix order {got} does not match {expected} vertices")]
    OrderMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Kernel(#[from] crate::numkernel::KernelError),
}

/// Undirected graph with a nonnegative length on every edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphFile", into = "GraphFile")]
pub struct LengthGraph {
    vertex_count: usize,
    edges: BTreeMap<(usize, usize), f64>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    vertices: usize,
    edges: Vec<EdgeEntry>,
}

#[derive(Serialize, Deserialize)]
struct EdgeEntry {
    u: usize,
    v: usize,
    len: f64,
}

impl TryFrom<GraphFile> for LengthGraph {
    type Error = CompletionError;

    fn try_from(f: GraphFile) -> Result<Self, Self::Error> {
        LengthGraph::from_edges(f.vertices, f.edges.iter().map(|e| (e.u, e.v, e.len)))
    }
}

impl From<LengthGraph> for GraphFile {
    fn from(g: LengthGraph) -> Self {
        GraphFile {
            vertices: g.vertex_count,
            edges: g.edges.iter().map(|(&(u, v), &len)| EdgeEntry { u, v, len }).collect(),
        }
    }
}

impl LengthGraph {
    pub fn new(vertex_count: usize) -> Result<Self, CompletionError> {
        if vertex_count == 0 {
            return Err(CompletionError::NoVertices);
        }
        Ok(LengthGraph {
            vertex_count,
            edges: BTreeMap::new(),
        })
    }

    pub fn from_edges(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, CompletionError> {
        let mut g = LengthGraph::new(vertex_count)?;
        for (u, v, len) in edges {
            g.add_edge(u, v, len)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize, len: f64) -> Result<(), CompletionError> {
        for vertex in [u, v] {
            if vertex >= self.vertex_count {
                return Err(CompletionError::VertexOutOfRange {
                    vertex,
                    count: self.vertex_count,
                });
            }
        }
        if u == v {
            return Err(CompletionError::SelfLoop(u));
        }
        if !(len >= 0.0 && len.is_finite()) {
            return Err(CompletionError::BadLength { u, v, len });
        }
        let key = (u.min(v), u.max(v));
        if self.edges.contains_key(&key) {
            return Err(CompletionError::DuplicateEdge(key.0, key.1));
        }
        self.edges.insert(key, len);
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v, length)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges.iter().map(|(&(u, v), &l)| (u, v, l))
    }

    pub fn length(&self, u: usize, v: usize) -> Option<f64> {
        self.edges.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.length(u, v).is_some()
    }

    pub fn neighbors(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); self.vertex_count];
        for &(u, v) in self.edges.keys() {
            adj[u].insert(v);
            adj[v].insert(u);
        }
        adj
    }

    /// Same edges, new lengths.
    pub fn with_lengths(&self, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self, CompletionError> {
        LengthGraph::from_edges(self.vertex_count, self.edges.keys().map(|&(u, v)| (u, v, f(u, v))))
    }

    fn clique_matrix(&self, clique: &[usize]) -> Result<SquaredDistanceMatrix, EmbedError> {
        let m = SymMatrix::from_fn(clique.len(), |i, j| {
            if i == j {
                0.0
            } else {
                let l = self.length(clique[i], clique[j]).expect("clique edge");
                l * l
            }
        });
        SquaredDistanceMatrix::from_sym(m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Chordality {
    /// Perfect elimination ordering: each vertex's later neighbors form a
    /// clique.
    Chordal { peo: Vec<usize> },
    /// Chordless cycle of length at least 4, as consecutive vertices.
    NotChordal { cycle: Vec<usize> },
}

impl Chordality {
    pub fn is_chordal(&self) -> bool {
        matches!(self, Chordality::Chordal { .. })
    }
}

/// Maximum cardinality search, lowest index first on ties; the reverse visit
/// order is checked as a perfect elimination ordering.
fn mcs_order(adj: &[BTreeSet<usize>]) -> Vec<usize> {
    let k = adj.len();
    let mut weight = vec![0usize; k];
    let mut visited = vec![false; k];
    let mut order = Vec::with_capacity(k);
    for _ in 0..k {
        let v = (0..k)
            .filter(|&v| !visited[v])
            .max_by(|&a, &b| weight[a].cmp(&weight[b]).then(b.cmp(&a)))
            .expect("unvisited vertex");
        visited[v] = true;
        order.push(v);
        for &w in &adj[v] {
            if !visited[w] {
                weight[w] += 1;
            }
        }
    }
    order.reverse();
    order
}

fn later_neighbors(adj: &[BTreeSet<usize>], peo: &[usize]) -> Vec<Vec<usize>> {
    let mut pos = vec![0; peo.len()];
    for (i, &v) in peo.iter().enumerate() {
        pos[v] = i;
    }
    peo.iter()
        .map(|&v| {
            let mut later: Vec<usize> = adj[v].iter().copied().filter(|&w| pos[w] > pos[v]).collect();
            later.sort_by_key(|&w| pos[w]);
            later
        })
        .collect()
}

pub fn is_peo(adj: &[BTreeSet<usize>], peo: &[usize]) -> bool {
    later_neighbors(adj, peo).iter().all(|later| match later.split_first() {
        None => true,
        Some((&first, rest)) => rest.iter().all(|w| adj[first].contains(w)),
    })
}

fn chordless_cycle(adj: &[BTreeSet<usize>]) -> Option<Vec<usize>> {
    let k = adj.len();
    for v in 0..k {
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                if adj[a].contains(&b) {
                    continue;
                }
                // shortest a-b path avoiding v and its other neighbors
                let blocked = |w: usize| w == v || (adj[v].contains(&w) && w != a && w != b);
                let mut prev = vec![usize::MAX; k];
                prev[a] = a;
                let mut queue = VecDeque::from([a]);
                while let Some(x) = queue.pop_front() {
                    if x == b {
                        break;
                    }
                    for &y in &adj[x] {
                        if prev[y] == usize::MAX && !blocked(y) {
                            prev[y] = x;
                            queue.push_back(y);
                        }
                    }
                }
                if prev[b] != usize::MAX {
                    let mut path = vec![b];
                    while *path.last().unwrap() != a {
                        path.push(prev[*path.last().unwrap()]);
                    }
                    path.reverse();
                    let mut cycle = vec![v];
                    cycle.extend(path);
                    return Some(cycle);
                }
            }
        }
    }
    None
}

pub fn is_chordal(g: &LengthGraph) -> Chordality {
    let adj = g.neighbors();
    let peo = mcs_order(&adj);
    if is_peo(&adj, &peo) {
        Chordality::Chordal { peo }
    } else {
        let cycle = chordless_cycle(&adj).expect("a graph without a perfect elimination ordering has a chordless cycle");
        Chordality::NotChordal { cycle }
    }
}

/// Maximal cliques joined by a maximum-weight spanning tree of their
/// intersection graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliqueTree {
    /// Each clique sorted ascending; cliques in lexicographic order.
    pub cliques: Vec<Vec<usize>>,
    /// `(i, j, separator)` with `i < j`. Separators may be empty when the
    /// graph is disconnected.
    pub edges: Vec<(usize, usize, Vec<usize>)>,
}

impl CliqueTree {
    /// Every vertex's cliques form a connected subtree.
    pub fn has_running_intersection(&self, vertex_count: usize) -> bool {
        (0..vertex_count).all(|v| {
            let holders: BTreeSet<usize> = (0..self.cliques.len())
                .filter(|&c| self.cliques[c].contains(&v))
                .collect();
            let Some(&start) = holders.iter().next() else {
                return true;
            };
            let mut seen = BTreeSet::from([start]);
            let mut stack = vec![start];
            while let Some(c) = stack.pop() {
                for (i, j, _) in &self.edges {
                    let other = if *i == c { *j } else if *j == c { *i } else { continue };
                    if holders.contains(&other) && seen.insert(other) {
                        stack.push(other);
                    }
                }
            }
            seen == holders
        })
    }

    fn children(&self, root: usize) -> Vec<(usize, usize, Vec<usize>)> {
        // (child, parent, separator) in breadth-first order, neighbors ascending
        let mut adj: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new(); self.cliques.len()];
        for (i, j, s) in &self.edges {
            adj[*i].push((*j, s.clone()));
            adj[*j].push((*i, s.clone()));
        }
        for a in &mut adj {
            a.sort();
        }
        let mut seen = vec![false; self.cliques.len()];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        let mut out = Vec::new();
        while let Some(p) = queue.pop_front() {
            for (c, s) in &adj[p] {
                if !seen[*c] {
                    seen[*c] = true;
                    out.push((*c, p, s.clone()));
                    queue.push_back(*c);
                }
            }
        }
        out
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut x = x;
    while parent[x] != r {
        let next = parent[x];
        parent[x] = r;
        x = next;
    }
    r
}

pub fn maximal_cliques(g: &LengthGraph, peo: &[usize]) -> Result<CliqueTree, CompletionError> {
    let adj = g.neighbors();
    if peo.len() != g.vertex_count() || !is_peo(&adj, peo) {
        return Err(CompletionError::NotChordal);
    }
    let mut candidates: Vec<Vec<usize>> = later_neighbors(&adj, peo)
        .into_iter()
        .zip(peo)
        .map(|(mut c, &v)| {
            c.push(v);
            c.sort_unstable();
            c
        })
        .collect();
    candidates.sort();
    candidates.dedup();
    let sets: Vec<BTreeSet<usize>> = candidates.iter().map(|c| c.iter().copied().collect()).collect();
    let cliques: Vec<Vec<usize>> = (0..candidates.len())
        .filter(|&i| !(0..sets.len()).any(|j| j != i && sets[i].is_subset(&sets[j])))
        .map(|i| candidates[i].clone())
        .collect();

    let mut pairs: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    for i in 0..cliques.len() {
        for j in (i + 1)..cliques.len() {
            let s: Vec<usize> = cliques[i].iter().copied().filter(|v| cliques[j].contains(v)).collect();
            pairs.push((i, j, s));
        }
    }
    pairs.sort_by(|a, b| b.2.len().cmp(&a.2.len()).then((a.0, a.1).cmp(&(b.0, b.1))));
    let mut parent: Vec<usize> = (0..cliques.len()).collect();
    let mut edges = Vec::new();
    for (i, j, s) in pairs {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri] = rj;
            edges.push((i, j, s));
        }
    }
    edges.sort();
    Ok(CliqueTree { cliques, edges })
}

/// Maximal cliques of an arbitrary graph (Bron–Kerbosch with pivoting),
/// sorted.
pub fn all_maximal_cliques(g: &LengthGraph) -> Vec<Vec<usize>> {
    fn expand(
        adj: &[BTreeSet<usize>],
        r: &mut Vec<usize>,
        p: BTreeSet<usize>,
        x: BTreeSet<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if p.is_empty() && x.is_empty() {
            let mut c = r.clone();
            c.sort_unstable();
            out.push(c);
            return;
        }
        let pivot = *p
            .union(&x)
            .max_by_key(|&&u| (p.intersection(&adj[u]).count(), std::cmp::Reverse(u)))
            .expect("non-empty");
        let (mut p, mut x) = (p, x);
        let todo: Vec<usize> = p.difference(&adj[pivot]).copied().collect();
        for v in todo {
            r.push(v);
            expand(
                adj,
                r,
                p.intersection(&adj[v]).copied().collect(),
                x.intersection(&adj[v]).copied().collect(),
                out,
            );
            r.pop();
            p.remove(&v);
            x.insert(v);
        }
    }
    let adj = g.neighbors();
    let mut out = Vec::new();
    expand(&adj, &mut Vec::new(), (0..g.vertex_count()).collect(), BTreeSet::new(), &mut out);
    out.sort();
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct CliqueReport {
    pub vertices: Vec<usize>,
    pub certificate: Certificate,
    /// Set when the inertia test passes but no sphere configuration exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realization_failure: Option<String>,
    #[serde(skip)]
    vectors: Option<Vec<MinkowskiVector>>,
}

impl CliqueReport {
    pub fn feasible(&self) -> bool {
        self.certificate.is_embeddable() && self.realization_failure.is_none()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CliqueFeasibility {
    pub feasible: bool,
    pub cliques: Vec<CliqueReport>,
}

fn clique_report(
    g: &LengthGraph,
    clique: &[usize],
    n: usize,
    tol: &Tolerance,
) -> Result<CliqueReport, CompletionError> {
    let d = g.clique_matrix(clique)?;
    let certificate = check_kissing(&d, n, Method::Inertia, tol)?;
    let mut report = CliqueReport {
        vertices: clique.to_vec(),
        certificate,
        realization_failure: None,
        vectors: None,
    };
    if report.certificate.is_embeddable() {
        match construct_embedding(&d, n, tol) {
            Ok(r) => report.vectors = Some(r.vectors),
            Err(EmbedError::Realization(f)) => {
                report.realization_failure = Some(match f {
                    RealizationFailure::ZeroColumns { .. } => "degenerate zero-distance pattern".to_string(),
                    other => other.to_string(),
                })
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(report)
}

/// Whether every maximal clique's lengths are realizable in dimension `n`.
/// A clique that passes the eigenvalue test but cannot be realized counts as
/// infeasible.
pub fn clique_feasible(
    g: &LengthGraph,
    n: usize,
    tol: &Tolerance,
) -> Result<CliqueFeasibility, CompletionError> {
    let cliques = match is_chordal(g) {
        Chordality::Chordal { peo } => maximal_cliques(g, &peo)?.cliques,
        Chordality::NotChordal { .. } => {
            let all = all_maximal_cliques(g);
            if let Some(big) = all.iter().find(|c| c.len() > MINORS_MAX_ORDER) {
                return Err(CompletionError::CliqueTooLarge(big.len()));
            }
            all
        }
    };
    let cliques = cliques
        .iter()
        .map(|c| clique_report(g, c, n, tol))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CliqueFeasibility {
        feasible: cliques.iter().all(CliqueReport::feasible),
        cliques,
    })
}

/// The first positive-length edge whose endpoints are joined by a chain of
/// zero-length edges. Zero distance means a shared tangent point, which is
/// transitive, so such an edge rules out every completion.
pub fn zero_chain_contradiction(g: &LengthGraph) -> Option<(usize, usize)> {
    let mut parent: Vec<usize> = (0..g.vertex_count()).collect();
    for (u, v, l) in g.edges() {
        if l == 0.0 {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            parent[a] = b;
        }
    }
    g.edges()
        .find(|&(u, v, l)| l > 0.0 && find(&mut parent, u) == find(&mut parent, v))
        .map(|(u, v, _)| (u, v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CompletionVerdict {
    Completed,
    Infeasible,
    NotChordal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl ConditionCheck {
    fn new(holds: bool, detail: impl FnOnce() -> String) -> Self {
        ConditionCheck {
            holds,
            detail: (!holds).then(detail),
        }
    }
}

/// The four target-matrix conditions, each checked on its own.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetReport {
    /// Zero diagonal.
    pub c1: ConditionCheck,
    /// Edge entries equal squared lengths (non-edges unconstrained).
    pub c2: ConditionCheck,
    /// `rank D <= n + 1`.
    pub c3: ConditionCheck,
    /// Exactly one positive eigenvalue, or `D = 0`.
    pub c4: ConditionCheck,
    pub inertia: Inertia,
}

impl TargetReport {
    pub fn all_hold(&self) -> bool {
        self.c1.holds && self.c2.holds && self.c3.holds && self.c4.holds
    }
}

pub fn verify_target_matrix(
    d: &SymMatrix,
    g: &LengthGraph,
    n: usize,
    tol: &Tolerance,
) -> Result<TargetReport, CompletionError> {
    if d.order() != g.vertex_count() {
        return Err(CompletionError::OrderMismatch {
            got: d.order(),
            expected: g.vertex_count(),
        });
    }
    let scale = g.edges().map(|(_, _, l)| l * l).fold(d.max_abs(), f64::max);
    let band = ROUND_TRIP_TOLERANCE * scale;
    let bad_diag = (0..d.order()).find(|&i| d.get(i, i).abs() > band);
    let bad_edge = g.edges().find(|&(u, v, l)| (d.get(u, v) - l * l).abs() > band);
    let inr = inertia(d, tol)?;
    Ok(TargetReport {
        c1: ConditionCheck::new(bad_diag.is_none(), || {
            let i = bad_diag.unwrap();
            format!("D[{i}][{i}] = {}", d.get(i, i))
        }),
        c2: ConditionCheck::new(bad_edge.is_none(), || {
            let (u, v, l) = bad_edge.unwrap();
            format!("edge ({u}, {v}): D = {}, length^2 = {}", d.get(u, v), l * l)
        }),
        c3: ConditionCheck::new(inr.rank() <= n + 1, || format!("rank {} > {}", inr.rank(), n + 1)),
        c4: ConditionCheck::new(inr.positive == 1 || inr.rank() == 0, || {
            format!("{} positive eigenvalues", inr.positive)
        }),
        inertia: inr,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CompletionWitness {
    ChordlessCycle { cycle: Vec<usize> },
    Clique { vertices: Vec<usize>, reason: String },
    Gluing {
        clique: Vec<usize>,
        parent: Vec<usize>,
        separator: Vec<usize>,
        reason: String,
    },
    Verification { report: TargetReport },
}

#[derive(Debug, Clone)]
pub struct CompletionResult {
    pub verdict: CompletionVerdict,
    pub full_matrix: Option<SquaredDistanceMatrix>,
    pub embedding: Option<Vec<MinkowskiVector>>,
    pub witness: Option<CompletionWitness>,
    pub report: Option<TargetReport>,
}

impl CompletionResult {
    fn failed(verdict: CompletionVerdict, witness: CompletionWitness) -> Self {
        CompletionResult {
            verdict,
            full_matrix: None,
            embedding: None,
            witness: Some(witness),
            report: None,
        }
    }
}

/// Completes with the clique tree rooted at its first clique.
pub fn complete_chordal(g: &LengthGraph, n: usize, tol: &Tolerance) -> Result<CompletionResult, CompletionError> {
    complete_chordal_rooted(g, n, 0, tol)
}

pub fn complete_chordal_rooted(
    g: &LengthGraph,
    n: usize,
    root: usize,
    tol: &Tolerance,
) -> Result<CompletionResult, CompletionError> {
    let peo = match is_chordal(g) {
        Chordality::Chordal { peo } => peo,
        Chordality::NotChordal { cycle } => {
            return Ok(CompletionResult::failed(
                CompletionVerdict::NotChordal,
                CompletionWitness::ChordlessCycle { cycle },
            ))
        }
    };
    let tree = maximal_cliques(g, &peo)?;
    if root >= tree.cliques.len() {
        return Err(CompletionError::BadRoot {
            root,
            count: tree.cliques.len(),
        });
    }
    let mut local: Vec<Vec<MinkowskiVector>> = Vec::with_capacity(tree.cliques.len());
    for clique in &tree.cliques {
        let report = clique_report(g, clique, n, tol)?;
        match report.vectors {
            Some(v) => local.push(v),
            None => {
                let reason = report.realization_failure.unwrap_or_else(|| {
                    format!("not embeddable at dimension {n}: {:?}", report.certificate.witness)
                });
                return Ok(CompletionResult::failed(
                    CompletionVerdict::Infeasible,
                    CompletionWitness::Clique {
                        vertices: clique.clone(),
                        reason,
                    },
                ));
            }
        }
    }

    let position = |c: usize, v: usize| tree.cliques[c].iter().position(|&w| w == v).expect("member");
    let mut placement: Vec<Option<LorentzMap>> = vec![None; tree.cliques.len()];
    let mut z: Vec<Option<MinkowskiVector>> = vec![None; g.vertex_count()];
    placement[root] = Some(LorentzMap::identity(n));
    for (i, &v) in tree.cliques[root].iter().enumerate() {
        z[v] = Some(local[root][i].clone());
    }
    for (child, parent, sep) in tree.children(root) {
        let p_parent = placement[parent].clone().expect("parent placed first");
        let xs: Vec<MinkowskiVector> = sep.iter().map(|&v| local[child][position(child, v)].clone()).collect();
        let ys: Vec<MinkowskiVector> = sep.iter().map(|&v| local[parent][position(parent, v)].clone()).collect();
        let step = if sep.is_empty() {
            Ok(LorentzMap::identity(n))
        } else {
            lorentz_align(&xs, &ys, tol)
        };
        let private: Vec<usize> = tree.cliques[child].iter().copied().filter(|v| !sep.contains(v)).collect();
        match step {
            Ok(t) => {
                let p_child = p_parent.compose(&t).expect("same dimension");
                for &v in &private {
                    z[v] = Some(p_child.apply(&local[child][position(child, v)]).expect("same dimension"));
                }
                placement[child] = Some(p_child);
            }
            Err(align_err) => {
                let anchors: Vec<(usize, MinkowskiVector)> =
                    sep.iter().map(|&v| (v, z[v].clone().expect("separator placed"))).collect();
                let guess: Vec<MinkowskiVector> = private
                    .iter()
                    .map(|&v| p_parent.apply(&local[child][position(child, v)]).expect("same dimension"))
                    .collect();
                match anchored_fit(g, &anchors, &private, guess, tol) {
                    Some(fitted) => {
                        for (&v, x) in private.iter().zip(fitted) {
                            z[v] = Some(x);
                        }
                        // the clique now lives in global coordinates
                        local[child] = tree.cliques[child]
                            .iter()
                            .map(|&v| z[v].clone().expect("placed"))
                            .collect();
                        placement[child] = Some(LorentzMap::identity(n));
                    }
                    None => {
                        return Ok(CompletionResult::failed(
                            CompletionVerdict::Infeasible,
                            CompletionWitness::Gluing {
                                clique: tree.cliques[child].clone(),
                                parent: tree.cliques[parent].clone(),
                                separator: sep,
                                reason: format!("separator alignment failed ({align_err}) and the anchored fit did not converge"),
                            },
                        ));
                    }
                }
            }
        }
    }

    let z: Vec<MinkowskiVector> = z.into_iter().map(|v| v.expect("every vertex lies in a clique")).collect();
    let k = z.len();
    let raw = DMatrix::from_fn(k, k, |i, j| d_m_squared(&z[i], &z[j]).expect("same dimension"));
    let full = SquaredDistanceMatrix::from_computed(&raw, tol)?;
    let report = verify_target_matrix(full.matrix(), g, n, tol)?;
    if !report.all_hold() {
        return Ok(CompletionResult::failed(
            CompletionVerdict::Infeasible,
            CompletionWitness::Verification { report },
        ));
    }
    Ok(CompletionResult {
        verdict: CompletionVerdict::Completed,
        full_matrix: Some(full),
        embedding: Some(z),
        witness: None,
        report: Some(report),
    })
}

/// Levenberg–Marquardt on the inner-product constraints of the private
/// vertices against fixed anchors, then projection onto the future cone.
fn anchored_fit(
    g: &LengthGraph,
    anchors: &[(usize, MinkowskiVector)],
    private: &[usize],
    guess: Vec<MinkowskiVector>,
    tol: &Tolerance,
) -> Option<Vec<MinkowskiVector>> {
    let dim = guess.first()?.dim() + 1;
    let eta = |a: &[f64], b: &[f64]| -> f64 {
        a[..dim - 1].iter().zip(&b[..dim - 1]).map(|(x, y)| x * y).sum::<f64>() - a[dim - 1] * b[dim - 1]
    };
    let sq = |u: usize, v: usize| g.length(u, v).map(|l| l * l);
    // (i, Some(anchor) | None for self, j private index) constraints
    enum Term {
        Anchor(usize, Vec<f64>, f64),
        Pair(usize, usize, f64),
        Null(usize),
    }
    let mut terms = Vec::new();
    for (i, &u) in private.iter().enumerate() {
        for (a, x) in anchors {
            terms.push(Term::Anchor(i, x.coords(), sq(u, *a)?));
        }
        for (j, &w) in private.iter().enumerate().skip(i + 1) {
            terms.push(Term::Pair(i, j, sq(u, w)?));
        }
        terms.push(Term::Null(i));
    }
    let unknowns = private.len() * dim;
    let mut x: Vec<f64> = guess.iter().flat_map(|v| v.coords()).collect();
    let residuals = |x: &[f64]| -> Vec<f64> {
        terms
            .iter()
            .map(|t| match t {
                Term::Anchor(i, a, d) => -eta(&x[i * dim..(i + 1) * dim], a) - d,
                Term::Pair(i, j, d) => -eta(&x[i * dim..(i + 1) * dim], &x[j * dim..(j + 1) * dim]) - d,
                Term::Null(i) => eta(&x[i * dim..(i + 1) * dim], &x[i * dim..(i + 1) * dim]),
            })
            .collect()
    };
    let scale = anchors
        .iter()
        .map(|(_, v)| v.euclidean_norm())
        .chain(guess.iter().map(MinkowskiVector::euclidean_norm))
        .fold(1.0_f64, f64::max);
    let signature = |k: usize| if k % dim == dim - 1 { -1.0 } else { 1.0 };
    let mut lambda = 1e-3;
    let mut r = residuals(&x);
    let cost = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();
    for _ in 0..500 {
        let mut jac = DMatrix::zeros(terms.len(), unknowns);
        for (row, t) in terms.iter().enumerate() {
            match t {
                Term::Anchor(i, a, _) => {
                    for c in 0..dim {
                        jac[(row, i * dim + c)] = -signature(c) * a[c];
                    }
                }
                Term::Pair(i, j, _) => {
                    for c in 0..dim {
                        jac[(row, i * dim + c)] = -signature(c) * x[j * dim + c];
                        jac[(row, j * dim + c)] = -signature(c) * x[i * dim + c];
                    }
                }
                Term::Null(i) => {
                    for c in 0..dim {
                        jac[(row, i * dim + c)] = 2.0 * signature(c) * x[i * dim + c];
                    }
                }
            }
        }
        let rv = DVector::from_vec(r.clone());
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let grad = &jt * &rv;
        let mut a = jtj.clone();
        for k in 0..unknowns {
            a[(k, k)] += lambda * (1.0 + jtj[(k, k)]);
        }
        let Some(step) = a.cholesky().map(|c| c.solve(&grad)) else {
            lambda *= 10.0;
            continue;
        };
        let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(v, s)| v - s).collect();
        let rt = residuals(&trial);
        if cost(&rt) < cost(&r) {
            x = trial;
            r = rt;
            lambda = (lambda * 0.3).max(1e-12);
        } else {
            lambda *= 10.0;
        }
        if cost(&r).sqrt() <= 1e-3 * tol.residual * scale * scale || lambda > 1e12 {
            break;
        }
    }
    let out: Vec<MinkowskiVector> = x
        .chunks(dim)
        .map(|c| {
            let v = MinkowskiVector::from_coords(c);
            let time = v.spatial.iter().map(|s| s * s).sum::<f64>().sqrt();
            MinkowskiVector::new(v.spatial, time)
        })
        .collect();
    let x: Vec<f64> = out.iter().flat_map(|v| v.coords()).collect();
    let worst = residuals(&x).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    (worst <= tol.residual * scale * scale).then_some(out)
}

/// Lengths on a non-chordal graph that pass every clique test but admit no
/// completion: 1 on edges with exactly one end on a chordless cycle and on
/// the cycle's first edge, 0 elsewhere. The zero edges around the rest of the
/// cycle force its first edge's endpoints onto one tangent point.
pub fn non_chordal_witness(g: &LengthGraph) -> Result<(LengthGraph, Vec<usize>), CompletionError> {
    let cycle = match is_chordal(g) {
        Chordality::Chordal { .. } => return Err(CompletionError::Chordal),
        Chordality::NotChordal { cycle } => cycle,
    };
    let on_cycle: BTreeSet<usize> = cycle.iter().copied().collect();
    let e0 = (cycle[0].min(cycle[1]), cycle[0].max(cycle[1]));
    let witness = g.with_lengths(|u, v| {
        let ends = on_cycle.contains(&u) as usize + on_cycle.contains(&v) as usize;
        if ends == 1 || (u, v) == e0 {
            1.0
        } else {
            0.0
        }
    })?;
    Ok((witness, cycle))
}
