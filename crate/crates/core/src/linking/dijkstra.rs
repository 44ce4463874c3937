//! Forward path extraction over the frame-layered link graph.
//!
//! Sources are visited in label order (first frame first). From each
//! unclaimed source a Dijkstra search over unclaimed objects settles every
//! reachable node; the extracted path ends at the reachable node with the
//! largest frame index, ties going to the cheaper path and then to the
//! lexicographically smaller label sequence. Kept paths claim their objects.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::edges::{LinkEdge, ObjectRef};

#[derive(Clone, Copy, Debug, PartialEq)]
struct Entry {
    cost: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap.
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Adjacency view of the edge list with dense node ids in label order.
pub struct LinkGraph {
    offsets: Vec<usize>,
    refs: Vec<ObjectRef>,
    out: Vec<Vec<(usize, f64)>>,
}

impl LinkGraph {
    /// `frame_sizes[m]` is the object count of frame `m`.
    pub fn new(frame_sizes: &[usize], edges: &[LinkEdge]) -> Self {
        let mut offsets = Vec::with_capacity(frame_sizes.len() + 1);
        let mut refs = Vec::new();
        offsets.push(0);
        for (m, &n) in frame_sizes.iter().enumerate() {
            refs.extend((0..n).map(|i| ObjectRef::new(m, i)));
            offsets.push(refs.len());
        }
        let mut out = vec![Vec::new(); refs.len()];
        for e in edges {
            debug_assert_eq!(
                e.from.frame + 1,
                e.to.frame,
                "edges must join adjacent frames"
            );
            let from = offsets[e.from.frame] + e.from.index;
            let to = offsets[e.to.frame] + e.to.index;
            out[from].push((to, e.total_cost));
        }
        for adj in &mut out {
            adj.sort_by_key(|&(to, _)| to);
        }
        Self { offsets, refs, out }
    }

    pub fn node_count(&self) -> usize {
        self.refs.len()
    }

    pub fn node(&self, r: ObjectRef) -> usize {
        self.offsets[r.frame] + r.index
    }

    pub fn object(&self, node: usize) -> ObjectRef {
        self.refs[node]
    }

    /// Best path from `source` avoiding `claimed`, as node ids.
    pub fn best_path(&self, source: usize, claimed: &[bool]) -> Vec<usize> {
        let mut search = Search::new(self.node_count());
        search.run(self, source, claimed);
        search.best_path(self)
    }
}

struct Search {
    dist: Vec<f64>,
    pred: Vec<Option<usize>>,
    settled: Vec<bool>,
    order: Vec<usize>,
    touched: Vec<usize>,
}

impl Search {
    fn new(n: usize) -> Self {
        Self {
            dist: vec![f64::INFINITY; n],
            pred: vec![None; n],
            settled: vec![false; n],
            order: Vec::new(),
            touched: Vec::new(),
        }
    }

    fn reset(&mut self) {
        for &n in &self.touched {
            self.dist[n] = f64::INFINITY;
            self.pred[n] = None;
            self.settled[n] = false;
        }
        self.touched.clear();
        self.order.clear();
    }

    fn path(&self, mut node: usize) -> Vec<usize> {
        let mut p = vec![node];
        while let Some(prev) = self.pred[node] {
            p.push(prev);
            node = prev;
        }
        p.reverse();
        p
    }

    /// Compares the path ending in `a` with the path ending in `b` by labels.
    fn lex_cmp(&self, a: usize, b: usize) -> Ordering {
        self.path(a).cmp(&self.path(b))
    }

    fn run(&mut self, graph: &LinkGraph, source: usize, claimed: &[bool]) {
        self.reset();
        let mut heap = BinaryHeap::new();
        self.dist[source] = 0.0;
        self.touched.push(source);
        heap.push(Entry {
            cost: 0.0,
            node: source,
        });
        while let Some(Entry { cost, node }) = heap.pop() {
            if self.settled[node] || cost > self.dist[node] {
                continue;
            }
            self.settled[node] = true;
            self.order.push(node);
            for &(next, w) in &graph.out[node] {
                if claimed[next] {
                    continue;
                }
                let candidate = cost + w;
                if self.dist[next].is_infinite() {
                    self.touched.push(next);
                }
                let better = match candidate.total_cmp(&self.dist[next]) {
                    Ordering::Less => true,
                    // Paths to one node all have equal length, so comparing
                    // the predecessor chains decides the label order.
                    Ordering::Equal => {
                        self.pred[next].is_some_and(|p| self.lex_cmp(node, p) == Ordering::Less)
                    }
                    Ordering::Greater => false,
                };
                if better {
                    self.dist[next] = candidate;
                    self.pred[next] = Some(node);
                    heap.push(Entry {
                        cost: candidate,
                        node: next,
                    });
                }
            }
        }
    }

    fn best_path(&self, graph: &LinkGraph) -> Vec<usize> {
        let mut best = self.order[0];
        for &n in &self.order[1..] {
            let (fa, fb) = (graph.refs[n].frame, graph.refs[best].frame);
            let better = match fa.cmp(&fb) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => match self.dist[n].total_cmp(&self.dist[best]) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => self.lex_cmp(n, best) == Ordering::Less,
                },
            };
            if better {
                best = n;
            }
        }
        self.path(best)
    }
}

/// Extracts paths with the default claiming rule: every kept path (at least
/// `min_track_length` objects) claims all of its objects.
pub fn link_dijkstra(
    frame_sizes: &[usize],
    edges: &[LinkEdge],
    min_track_length: usize,
) -> Vec<Vec<ObjectRef>> {
    link_dijkstra_with(frame_sizes, edges, min_track_length, |p| p.len())
}

/// Like [`link_dijkstra`], but `claim` decides how many leading objects of
/// each raw path are kept and claimed. Objects past that prefix return to
/// the pool for later sources.
pub fn link_dijkstra_with(
    frame_sizes: &[usize],
    edges: &[LinkEdge],
    min_track_length: usize,
    mut claim: impl FnMut(&[ObjectRef]) -> usize,
) -> Vec<Vec<ObjectRef>> {
    let graph = LinkGraph::new(frame_sizes, edges);
    let mut claimed = vec![false; graph.node_count()];
    let mut search = Search::new(graph.node_count());
    let mut paths = Vec::new();
    for source in 0..graph.node_count() {
        if claimed[source] {
            continue;
        }
        search.run(&graph, source, &claimed);
        let raw: Vec<ObjectRef> = search
            .best_path(&graph)
            .into_iter()
            .map(|n| graph.object(n))
            .collect();
        let keep = claim(&raw).min(raw.len());
        if keep < min_track_length {
            continue;
        }
        let kept = raw[..keep].to_vec();
        for r in &kept {
            claimed[graph.node(*r)] = true;
        }
        paths.push(kept);
    }
    paths
}
