//! Finite labelled graphs with the edge-reversal involution, Stallings
//! folding and immersed reading of words.
//!
//! An undirected edge is stored once as `(source, label, target)`; its
//! reversal `(target, -label, source)` is implied. A loop therefore counts
//! twice towards the degree of its vertex.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{Alphabet, Letter};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub source: usize,
    pub label: Letter,
    pub target: usize,
}

impl Edge {
    pub fn new(source: usize, label: Letter, target: usize) -> Self {
        Edge {
            source,
            label,
            target,
        }
    }

    pub fn reversed(&self) -> Edge {
        Edge::new(self.target, -self.label, self.source)
    }

    /// Orientation with a positive label.
    fn normalized(&self) -> Edge {
        if self.label > 0 {
            *self
        } else {
            self.reversed()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    alphabet: Alphabet,
    vertices: usize,
    edges: Vec<Edge>,
    base: Option<usize>,
}

impl LabeledGraph {
    pub fn new(
        alphabet: Alphabet,
        vertices: usize,
        edges: Vec<Edge>,
        base: Option<usize>,
    ) -> Result<Self> {
        for e in &edges {
            if e.source >= vertices || e.target >= vertices {
                return Err(Error::InvalidInput(format!(
                    "edge {e:?} refers to a vertex outside 0..{vertices}"
                )));
            }
            if !alphabet.contains(e.label) {
                return Err(Error::InvalidLetter {
                    letter: e.label as i64,
                    rank: alphabet.rank(),
                });
            }
        }
        if let Some(b) = base {
            if b >= vertices {
                return Err(Error::InvalidInput(format!("base vertex {b} out of range")));
            }
        }
        Ok(LabeledGraph {
            alphabet,
            vertices,
            edges,
            base,
        })
    }

    /// A single vertex with no edges.
    pub fn point(alphabet: Alphabet) -> Self {
        LabeledGraph {
            alphabet,
            vertices: 1,
            edges: Vec::new(),
            base: Some(0),
        }
    }

    /// One vertex carrying a loop for each label.
    pub fn wedge(alphabet: Alphabet, labels: &[Letter]) -> Result<Self> {
        let edges = labels.iter().map(|&l| Edge::new(0, l, 0)).collect();
        LabeledGraph::new(alphabet, 1, edges, Some(0))
    }

    /// The path spelling `word`, based at its initial vertex.
    pub fn path(alphabet: Alphabet, word: &[Letter]) -> Result<Self> {
        let edges = word
            .iter()
            .enumerate()
            .map(|(i, &l)| Edge::new(i, l, i + 1))
            .collect();
        LabeledGraph::new(alphabet, word.len() + 1, edges, Some(0))
    }

    /// The closed cycle spelling `word`.
    pub fn cycle(alphabet: Alphabet, word: &[Letter]) -> Result<Self> {
        let n = word.len();
        if n == 0 {
            return Ok(LabeledGraph::point(alphabet));
        }
        let edges = word
            .iter()
            .enumerate()
            .map(|(i, &l)| Edge::new(i, l, (i + 1) % n))
            .collect();
        LabeledGraph::new(alphabet, n, edges, Some(0))
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn base(&self) -> Option<usize> {
        self.base
    }

    pub fn with_base(mut self, base: Option<usize>) -> Result<Self> {
        if matches!(base, Some(b) if b >= self.vertices) {
            return Err(Error::InvalidInput("base vertex out of range".into()));
        }
        self.base = base;
        Ok(self)
    }

    /// Number of unordered edges.
    pub fn volume(&self) -> usize {
        self.edges.len()
    }

    /// Every oriented edge, both orientations of each stored edge.
    pub fn directed_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().flat_map(|e| [*e, e.reversed()])
    }

    /// Number of incident edge-ends at `v`.
    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| (e.source == v) as usize + (e.target == v) as usize)
            .sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices];
        for e in &self.edges {
            deg[e.source] += 1;
            deg[e.target] += 1;
        }
        deg
    }

    /// Component index of every vertex, numbered in order of first vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.vertices);
        for e in &self.edges {
            uf.union(e.source, e.target);
        }
        let mut ids = HashMap::new();
        (0..self.vertices)
            .map(|v| {
                let root = uf.find(v);
                let next = ids.len();
                *ids.entry(root).or_insert(next)
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        self.vertices > 0 && self.components().iter().all(|&c| c == 0)
    }

    /// Rank of the fundamental group, `volume - V + 1`; connected graphs only.
    pub fn rank(&self) -> Result<usize> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(self.edges.len() + 1 - self.vertices)
    }

    pub fn is_folded(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.directed_edges()
            .all(|e| seen.insert((e.source, e.label)))
    }

    /// Identifies the targets of equal-label edges leaving a common vertex
    /// until no such pair remains, then merges the resulting parallel edges.
    pub fn fold(&self) -> LabeledGraph {
        let mut uf = UnionFind::new(self.vertices);
        loop {
            let mut changed = false;
            let mut outgoing: HashMap<(usize, Letter), usize> = HashMap::new();
            for e in self.directed_edges() {
                let s = uf.find(e.source);
                let t = uf.find(e.target);
                match outgoing.entry((s, e.label)) {
                    Entry::Occupied(o) => {
                        let other = uf.find(*o.get());
                        if other != t {
                            uf.union(other, t);
                            changed = true;
                        }
                    }
                    Entry::Vacant(v) => {
                        v.insert(t);
                    }
                }
            }
            if !changed {
                break;
            }
        }
        // renumber classes by their smallest original vertex
        let mut new_id = HashMap::new();
        for v in 0..self.vertices {
            let r = uf.find(v);
            let next = new_id.len();
            new_id.entry(r).or_insert(next);
        }
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| {
                Edge::new(new_id[&uf.find(e.source)], e.label, new_id[&uf.find(e.target)])
                    .normalized()
            })
            .collect();
        edges.sort();
        edges.dedup();
        LabeledGraph {
            alphabet: self.alphabet,
            vertices: new_id.len(),
            edges,
            base: self.base.map(|b| new_id[&uf.find(b)]),
        }
    }

    /// A start vertex from which `word` can be read along edge labels, if any.
    ///
    /// Any label-following path of a freely reduced word is immersed, since a
    /// backtrack would read a letter followed by its inverse.
    pub fn read_word(&self, word: &[Letter]) -> Option<usize> {
        let mut out: Vec<Vec<(Letter, usize)>> = vec![Vec::new(); self.vertices];
        for e in self.directed_edges() {
            out[e.source].push((e.label, e.target));
        }
        let mut current = vec![false; self.vertices];
        let mut next = vec![false; self.vertices];
        'start: for start in 0..self.vertices {
            current.iter_mut().for_each(|x| *x = false);
            current[start] = true;
            for &letter in word {
                next.iter_mut().for_each(|x| *x = false);
                let mut any = false;
                for v in (0..self.vertices).filter(|&v| current[v]) {
                    for &(l, t) in &out[v] {
                        if l == letter {
                            next[t] = true;
                            any = true;
                        }
                    }
                }
                if !any {
                    continue 'start;
                }
                std::mem::swap(&mut current, &mut next);
            }
            return Some(start);
        }
        None
    }

    /// The subgraph spanned by the chosen edges (vertices renumbered in
    /// increasing original order).
    pub fn edge_subgraph(&self, edge_indices: &[usize]) -> LabeledGraph {
        let mut used: Vec<usize> = edge_indices
            .iter()
            .flat_map(|&i| [self.edges[i].source, self.edges[i].target])
            .collect();
        used.sort_unstable();
        used.dedup();
        let map: HashMap<usize, usize> = used.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges = edge_indices
            .iter()
            .map(|&i| {
                let e = self.edges[i];
                Edge::new(map[&e.source], e.label, map[&e.target])
            })
            .collect();
        LabeledGraph {
            alphabet: self.alphabet,
            vertices: used.len().max(1),
            edges,
            base: self.base.and_then(|b| map.get(&b).copied()),
        }
    }

    /// Label-preserving isomorphism invariant for folded graphs (`None` if
    /// the graph is not folded). Two folded graphs have equal forms iff they
    /// are isomorphic as labelled graphs; the base vertex is ignored.
    pub fn canonical_form(&self) -> Option<Vec<Vec<u32>>> {
        let table = FoldedTable::from_graph(self)?;
        let comps = self.components();
        let count = comps.iter().copied().max().map_or(0, |m| m + 1);
        let mut codes: Vec<Vec<u32>> = (0..count)
            .map(|c| {
                (0..self.vertices)
                    .filter(|&v| comps[v] == c)
                    .map(|s| table.code_from(s))
                    .min()
                    .expect("component is nonempty")
            })
            .collect();
        codes.sort();
        Some(codes)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(GraphJson::from(self)).expect("graph serialises")
    }

    pub fn from_json(value: &serde_json::Value, alphabet: Alphabet) -> Result<Self> {
        let raw: GraphJson = serde_json::from_value(value.clone())
            .map_err(|e| Error::InvalidInput(format!("graph JSON: {e}")))?;
        let edges = raw
            .edges
            .iter()
            .map(|&[s, l, t]| {
                if s < 0 || t < 0 {
                    return Err(Error::InvalidInput("negative vertex id".into()));
                }
                let label = i32::try_from(l)
                    .map_err(|_| Error::InvalidInput(format!("label {l} out of range")))?;
                Ok(Edge::new(s as usize, label, t as usize))
            })
            .collect::<Result<Vec<_>>>()?;
        LabeledGraph::new(alphabet, raw.vertices, edges, raw.base)
    }
}

/// Wire form: one orientation per unordered edge as `[source, label, target]`.
#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: usize,
    base: Option<usize>,
    edges: Vec<[i64; 3]>,
}

impl From<&LabeledGraph> for GraphJson {
    fn from(g: &LabeledGraph) -> Self {
        GraphJson {
            vertices: g.vertices,
            base: g.base,
            edges: g
                .edges
                .iter()
                .map(|e| [e.source as i64, e.label as i64, e.target as i64])
                .collect(),
        }
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes, keeping the smaller root.
    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

const NO_EDGE: u32 = u32::MAX;

/// Dense out-edge table of a folded graph: `out[v * 2k + index(label)]` is
/// the target of the unique `label`-edge leaving `v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct FoldedTable {
    pub(crate) alphabet: Alphabet,
    pub(crate) vertices: usize,
    pub(crate) volume: usize,
    out: Vec<u32>,
}

impl FoldedTable {
    pub(crate) fn new(alphabet: Alphabet, vertices: usize) -> Self {
        FoldedTable {
            alphabet,
            vertices,
            volume: 0,
            out: vec![NO_EDGE; vertices * alphabet.size()],
        }
    }

    pub(crate) fn from_graph(g: &LabeledGraph) -> Option<Self> {
        let mut table = FoldedTable::new(g.alphabet, g.vertices);
        for e in &g.edges {
            if !table.add_edge(e.source, e.label, e.target) {
                return None;
            }
        }
        Some(table)
    }

    #[inline]
    pub(crate) fn target(&self, v: usize, label: Letter) -> Option<usize> {
        let t = self.out[v * self.alphabet.size() + self.alphabet.index(label)];
        (t != NO_EDGE).then_some(t as usize)
    }

    #[inline]
    pub(crate) fn slot_free(&self, v: usize, label: Letter) -> bool {
        self.out[v * self.alphabet.size() + self.alphabet.index(label)] == NO_EDGE
    }

    pub(crate) fn add_vertex(&mut self) -> usize {
        self.vertices += 1;
        self.out
            .extend(std::iter::repeat_n(NO_EDGE, self.alphabet.size()));
        self.vertices - 1
    }

    pub(crate) fn pop_vertex(&mut self) {
        self.vertices -= 1;
        self.out.truncate(self.vertices * self.alphabet.size());
    }

    /// Adds `u --label--> v` and its reversal; false (and no change) if that
    /// would break foldedness.
    pub(crate) fn add_edge(&mut self, u: usize, label: Letter, v: usize) -> bool {
        if !self.slot_free(u, label) || !self.slot_free(v, -label) {
            return false;
        }
        let size = self.alphabet.size();
        self.out[u * size + self.alphabet.index(label)] = v as u32;
        self.out[v * size + self.alphabet.index(-label)] = u as u32;
        self.volume += 1;
        true
    }

    pub(crate) fn remove_edge(&mut self, u: usize, label: Letter, v: usize) {
        let size = self.alphabet.size();
        self.out[u * size + self.alphabet.index(label)] = NO_EDGE;
        self.out[v * size + self.alphabet.index(-label)] = NO_EDGE;
        self.volume -= 1;
    }

    pub(crate) fn degree(&self, v: usize) -> usize {
        let size = self.alphabet.size();
        self.out[v * size..(v + 1) * size]
            .iter()
            .filter(|&&t| t != NO_EDGE)
            .count()
    }

    /// `volume - V + 1`, meaningful when connected.
    pub(crate) fn rank(&self) -> usize {
        (self.volume + 1).saturating_sub(self.vertices)
    }

    pub(crate) fn reads_from(&self, start: usize, word: &[Letter]) -> bool {
        let mut v = start;
        for &l in word {
            match self.target(v, l) {
                Some(t) => v = t,
                None => return false,
            }
        }
        true
    }

    pub(crate) fn read(&self, word: &[Letter]) -> Option<usize> {
        (0..self.vertices).find(|&s| self.reads_from(s, word))
    }

    /// Breadth-first relabelling of the component of `start`, visiting labels
    /// in alphabet order; entries are `target id + 1`, or 0 for no edge.
    pub(crate) fn code_from(&self, start: usize) -> Vec<u32> {
        let size = self.alphabet.size();
        let mut id = vec![u32::MAX; self.vertices];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([start]);
        id[start] = 0;
        let mut code = Vec::new();
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for li in 0..size {
                let t = self.out[v * size + li];
                if t == NO_EDGE {
                    code.push(0);
                    continue;
                }
                let t = t as usize;
                if id[t] == u32::MAX {
                    id[t] = (order.len() + queue.len()) as u32;
                    queue.push_back(t);
                }
                code.push(id[t] + 1);
            }
        }
        code
    }

    /// Canonical code of a connected table.
    pub(crate) fn canonical_code(&self) -> Vec<u32> {
        (0..self.vertices)
            .map(|s| self.code_from(s))
            .min()
            .unwrap_or_default()
    }

    pub(crate) fn to_graph(&self, base: Option<usize>) -> LabeledGraph {
        let mut edges = Vec::with_capacity(self.volume);
        for v in 0..self.vertices {
            for l in self.alphabet.letters().filter(|&l| l > 0) {
                if let Some(t) = self.target(v, l) {
                    edges.push(Edge::new(v, l, t));
                }
            }
        }
        LabeledGraph {
            alphabet: self.alphabet,
            vertices: self.vertices,
            edges,
            base,
        }
    }
}
