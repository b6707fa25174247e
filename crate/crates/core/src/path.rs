//! Path algorithms used by the pricing layer: resource-constrained shortest
//! paths by label setting, and loopless k-shortest paths (Yen).
//!
//! Arc prices here are *reduced* prices (original cost minus dual-weighted
//! capacity usage) and may be negative. Labels carry a visited-node bitmask,
//! so only elementary paths are produced and termination does not depend on
//! the price sign. Dominance at a node requires price, every resource, and
//! the visited set to be no worse, and the set of completed forced arcs to
//! be no smaller.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;

#[derive(Clone, Copy, Debug)]
pub struct GraphArc {
    pub tail: usize,
    pub head: usize,
}

#[derive(Clone, Debug)]
pub struct PathGraph {
    pub num_nodes: usize,
    pub arcs: Vec<GraphArc>,
}

impl PathGraph {
    pub fn new(num_nodes: usize) -> Self {
        PathGraph {
            num_nodes,
            arcs: Vec::new(),
        }
    }

    pub fn add_arc(&mut self, tail: usize, head: usize) -> usize {
        assert!(tail < self.num_nodes && head < self.num_nodes);
        self.arcs.push(GraphArc { tail, head });
        self.arcs.len() - 1
    }

    fn out_arcs(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_nodes];
        for (i, a) in self.arcs.iter().enumerate() {
            out[a.tail].push(i);
        }
        out
    }

    /// Topological order if the graph is acyclic.
    fn topo_order(&self, forbidden: &[bool]) -> Option<Vec<usize>> {
        let mut indeg = vec![0usize; self.num_nodes];
        for (i, a) in self.arcs.iter().enumerate() {
            if !forbidden.get(i).copied().unwrap_or(false) {
                indeg[a.head] += 1;
            }
        }
        let out = self.out_arcs();
        let mut stack: Vec<usize> = (0..self.num_nodes).filter(|&v| indeg[v] == 0).collect();
        stack.reverse();
        let mut order = Vec::with_capacity(self.num_nodes);
        while let Some(v) = stack.pop() {
            order.push(v);
            for &ai in &out[v] {
                if forbidden.get(ai).copied().unwrap_or(false) {
                    continue;
                }
                let h = self.arcs[ai].head;
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    stack.push(h);
                }
            }
        }
        if order.len() == self.num_nodes {
            Some(order)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathResult {
    /// Arc indices along the path, in order.
    pub arcs: Vec<usize>,
    /// Node sequence, source first, sink last.
    pub nodes: Vec<usize>,
    pub price: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathError {
    NoFeasiblePath,
    /// Negative prices on a cyclic graph: ranking by plain shortest-path
    /// search is not sound there.
    NegativePricesInCyclicGraph,
    TooManyNodes(usize),
    BadInput(String),
}

impl fmt::Display for PathError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathError::NoFeasiblePath => write!(f, "no feasible path"),
            PathError::NegativePricesInCyclicGraph => {
                write!(f, "negative arc prices on a cyclic graph")
            }
            PathError::TooManyNodes(n) => {
                write!(f, "{} nodes exceed the label-setting limit of 64", n)
            }
            PathError::BadInput(msg) => write!(f, "bad input: {}", msg),
        }
    }
}

impl std::error::Error for PathError {}

/// Query for [`rcsp_label_setting`].
pub struct RcspQuery<'a> {
    /// One price per arc; may be negative.
    pub prices: &'a [f64],
    /// `resources[r][arc]`: nonnegative consumption of resource `r`.
    pub resources: &'a [Vec<f64>],
    /// One limit per resource.
    pub limits: &'a [f64],
    pub source: usize,
    pub sink: usize,
    /// Arcs that may not be used.
    pub forbidden: &'a [usize],
    /// Arcs that must all appear in the path.
    pub forced: &'a [usize],
    /// How many best distinct paths to return (at least 1).
    pub max_results: usize,
}

#[derive(Clone)]
struct Label {
    node: usize,
    price: f64,
    usage: Vec<f64>,
    visited: u64,
    forced_done: u32,
    // parent label index in the arena and the arc taken to get here
    parent: usize,
    via_arc: usize,
    dead: bool,
}

struct QueueEntry {
    price: f64,
    seq: usize,
    label: usize,
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.price == other.price && self.seq == other.seq
    }
}
impl Eq for QueueEntry {}
impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap; invert for cheapest-first, break ties by
        // insertion order for determinism.
        other
            .price
            .partial_cmp(&self.price)
            .unwrap_or(Ordering::Equal)
            .then(other.seq.cmp(&self.seq))
    }
}

/// Exact elementary resource-constrained shortest path(s).
///
/// Returns up to `max_results` cheapest feasible source-to-sink paths in
/// nondecreasing price order. Exact because labels carry the full visited
/// set; graphs are limited to 64 nodes.
pub fn rcsp_label_setting(
    graph: &PathGraph,
    query: &RcspQuery,
) -> Result<Vec<PathResult>, PathError> {
    if graph.num_nodes > 64 {
        return Err(PathError::TooManyNodes(graph.num_nodes));
    }
    if query.prices.len() != graph.arcs.len() {
        return Err(PathError::BadInput(format!(
            "{} prices for {} arcs",
            query.prices.len(),
            graph.arcs.len()
        )));
    }
    for (r, cons) in query.resources.iter().enumerate() {
        if cons.len() != graph.arcs.len() {
            return Err(PathError::BadInput(format!(
                "resource {} length mismatch",
                r
            )));
        }
        if cons.iter().any(|c| *c < 0.0) {
            return Err(PathError::BadInput(format!(
                "resource {} has negative use",
                r
            )));
        }
    }
    if query.resources.len() != query.limits.len() {
        return Err(PathError::BadInput(
            "limits/resources length mismatch".into(),
        ));
    }
    if query.forced.len() > 32 {
        return Err(PathError::BadInput("more than 32 forced arcs".into()));
    }

    let mut banned = vec![false; graph.arcs.len()];
    for &a in query.forbidden {
        banned[a] = true;
    }
    let forced_index = |arc: usize| -> Option<u32> {
        query
            .forced
            .iter()
            .position(|&f| f == arc)
            .map(|i| i as u32)
    };
    let full_forced: u32 = if query.forced.is_empty() {
        0
    } else {
        (1u32 << query.forced.len()) - 1
    };

    let out = graph.out_arcs();
    let nres = query.limits.len();

    let mut arena: Vec<Label> = Vec::new();
    let mut at_node: Vec<Vec<usize>> = vec![Vec::new(); graph.num_nodes];
    let mut heap: BinaryHeap<QueueEntry> = BinaryHeap::new();
    let mut seq = 0usize;

    let root = Label {
        node: query.source,
        price: 0.0,
        usage: vec![0.0; nres],
        visited: 1u64 << query.source,
        forced_done: 0,
        parent: usize::MAX,
        via_arc: usize::MAX,
        dead: false,
    };
    arena.push(root);
    at_node[query.source].push(0);
    heap.push(QueueEntry {
        price: 0.0,
        seq,
        label: 0,
    });

    let dominates = |a: &Label, b: &Label| -> bool {
        a.price <= b.price + 1e-12
            && a.usage.iter().zip(&b.usage).all(|(x, y)| *x <= *y + 1e-12)
            && (a.visited & !b.visited) == 0
            && (b.forced_done & !a.forced_done) == 0
    };

    let mut sink_labels: Vec<usize> = Vec::new();

    while let Some(entry) = heap.pop() {
        let lab = arena[entry.label].clone();
        if lab.dead {
            continue;
        }
        if lab.node == query.sink {
            continue; // sink labels are not extended
        }
        for &ai in &out[lab.node] {
            if banned[ai] {
                continue;
            }
            let arc = graph.arcs[ai];
            if lab.visited & (1u64 << arc.head) != 0 {
                continue;
            }
            let mut usage = lab.usage.clone();
            let mut feasible = true;
            for r in 0..nres {
                usage[r] += query.resources[r][ai];
                if usage[r] > query.limits[r] + 1e-9 {
                    feasible = false;
                    break;
                }
            }
            if !feasible {
                continue;
            }
            let mut forced_done = lab.forced_done;
            if let Some(fi) = forced_index(ai) {
                forced_done |= 1u32 << fi;
            }
            let cand = Label {
                node: arc.head,
                price: lab.price + query.prices[ai],
                usage,
                visited: lab.visited | (1u64 << arc.head),
                forced_done,
                parent: entry.label,
                via_arc: ai,
                dead: false,
            };
            // dominance against existing labels at the head node
            let mut keep = true;
            for &li in &at_node[arc.head] {
                let other = &arena[li];
                if !other.dead && dominates(other, &cand) {
                    keep = false;
                    break;
                }
            }
            if !keep {
                continue;
            }
            for &li in &at_node[arc.head].clone() {
                if !arena[li].dead && dominates(&cand, &arena[li]) {
                    arena[li].dead = true;
                }
            }
            let id = arena.len();
            arena.push(cand);
            at_node[arc.head].push(id);
            if arc.head == query.sink {
                sink_labels.push(id);
            } else {
                seq += 1;
                heap.push(QueueEntry {
                    price: arena[id].price,
                    seq,
                    label: id,
                });
            }
        }
    }

    let mut results: Vec<PathResult> = Vec::new();
    for &li in &sink_labels {
        let lab = &arena[li];
        if lab.dead || lab.forced_done != full_forced {
            continue;
        }
        let mut arcs = Vec::new();
        let mut cur = li;
        while arena[cur].via_arc != usize::MAX {
            arcs.push(arena[cur].via_arc);
            cur = arena[cur].parent;
        }
        arcs.reverse();
        let mut nodes = vec![query.source];
        for &a in &arcs {
            nodes.push(graph.arcs[a].head);
        }
        results.push(PathResult {
            arcs,
            nodes,
            price: lab.price,
        });
    }
    results.sort_by(|a, b| {
        a.price
            .partial_cmp(&b.price)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.arcs.cmp(&b.arcs))
    });
    results.dedup_by(|a, b| a.arcs == b.arcs);
    results.truncate(query.max_results.max(1));
    if results.is_empty() {
        return Err(PathError::NoFeasiblePath);
    }
    Ok(results)
}

// Plain one-to-one shortest path used inside Yen's algorithm. Dijkstra for
// nonnegative prices; DAG relaxation otherwise.
fn shortest_path(
    graph: &PathGraph,
    prices: &[f64],
    banned_arcs: &[bool],
    banned_nodes: &[bool],
    source: usize,
    sink: usize,
) -> Result<Option<(Vec<usize>, f64)>, PathError> {
    if banned_nodes[source] || banned_nodes[sink] {
        return Ok(None);
    }
    let out = graph.out_arcs();
    let negative = prices.iter().any(|p| *p < 0.0);
    let mut dist = vec![f64::INFINITY; graph.num_nodes];
    let mut via: Vec<usize> = vec![usize::MAX; graph.num_nodes];
    dist[source] = 0.0;

    if negative {
        let order = graph
            .topo_order(banned_arcs)
            .ok_or(PathError::NegativePricesInCyclicGraph)?;
        for &v in &order {
            if dist[v].is_infinite() || banned_nodes[v] {
                continue;
            }
            for &ai in &out[v] {
                if banned_arcs.get(ai).copied().unwrap_or(false) {
                    continue;
                }
                let h = graph.arcs[ai].head;
                if banned_nodes[h] {
                    continue;
                }
                let nd = dist[v] + prices[ai];
                if nd < dist[h] - 1e-15 {
                    dist[h] = nd;
                    via[h] = ai;
                }
            }
        }
    } else {
        let mut heap: BinaryHeap<QueueEntry> = BinaryHeap::new();
        heap.push(QueueEntry {
            price: 0.0,
            seq: source,
            label: source,
        });
        let mut done = vec![false; graph.num_nodes];
        while let Some(e) = heap.pop() {
            let v = e.label;
            if done[v] {
                continue;
            }
            done[v] = true;
            if v == sink {
                break;
            }
            for &ai in &out[v] {
                if banned_arcs.get(ai).copied().unwrap_or(false) {
                    continue;
                }
                let h = graph.arcs[ai].head;
                if banned_nodes[h] || done[h] {
                    continue;
                }
                let nd = dist[v] + prices[ai];
                if nd < dist[h] - 1e-15 {
                    dist[h] = nd;
                    via[h] = ai;
                    heap.push(QueueEntry {
                        price: nd,
                        seq: h,
                        label: h,
                    });
                }
            }
        }
    }

    if dist[sink].is_infinite() {
        return Ok(None);
    }
    let mut arcs = Vec::new();
    let mut cur = sink;
    while cur != source {
        let ai = via[cur];
        arcs.push(ai);
        cur = graph.arcs[ai].tail;
    }
    arcs.reverse();
    Ok(Some((arcs, dist[sink])))
}

/// Up to `k` loopless paths in nondecreasing price (Yen's deviation scheme).
///
/// Negative prices are accepted only on acyclic graphs. Fewer than `k`
/// paths may exist; they are all returned. An unreachable sink yields an
/// empty vector.
pub fn k_shortest_paths(
    graph: &PathGraph,
    prices: &[f64],
    source: usize,
    sink: usize,
    k: usize,
) -> Result<Vec<PathResult>, PathError> {
    if prices.len() != graph.arcs.len() {
        return Err(PathError::BadInput(format!(
            "{} prices for {} arcs",
            prices.len(),
            graph.arcs.len()
        )));
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let no_arcs = vec![false; graph.arcs.len()];
    let no_nodes = vec![false; graph.num_nodes];
    let first = match shortest_path(graph, prices, &no_arcs, &no_nodes, source, sink)? {
        Some(p) => p,
        None => return Ok(Vec::new()),
    };

    let to_result = |arcs: Vec<usize>, price: f64| -> PathResult {
        let mut nodes = vec![source];
        for &a in &arcs {
            nodes.push(graph.arcs[a].head);
        }
        PathResult { arcs, nodes, price }
    };

    let mut accepted: Vec<PathResult> = vec![to_result(first.0, first.1)];
    // candidates sorted by (price, arcs) for deterministic extraction
    let mut candidates: Vec<PathResult> = Vec::new();

    while accepted.len() < k {
        let last = accepted.last().unwrap().clone();
        for spur_idx in 0..last.arcs.len() {
            let spur_node = last.nodes[spur_idx];
            let root_arcs = &last.arcs[..spur_idx];
            let root_price: f64 = root_arcs.iter().map(|&a| prices[a]).sum();

            let mut banned_arcs = vec![false; graph.arcs.len()];
            for p in &accepted {
                if p.arcs.len() > spur_idx && p.arcs[..spur_idx] == *root_arcs {
                    banned_arcs[p.arcs[spur_idx]] = true;
                }
            }
            let mut banned_nodes = vec![false; graph.num_nodes];
            for &nd in &last.nodes[..spur_idx] {
                banned_nodes[nd] = true;
            }

            if let Some((spur_arcs, spur_price)) =
                shortest_path(graph, prices, &banned_arcs, &banned_nodes, spur_node, sink)?
            {
                let mut arcs = root_arcs.to_vec();
                arcs.extend(spur_arcs);
                let cand = to_result(arcs, root_price + spur_price);
                if !accepted.iter().any(|p| p.arcs == cand.arcs)
                    && !candidates.iter().any(|p| p.arcs == cand.arcs)
                {
                    candidates.push(cand);
                }
            }
        }
        candidates.sort_by(|a, b| {
            a.price
                .partial_cmp(&b.price)
                .unwrap_or(Ordering::Equal)
                .then_with(|| a.arcs.cmp(&b.arcs))
        });
        if candidates.is_empty() {
            break;
        }
        accepted.push(candidates.remove(0));
    }
    Ok(accepted)
}
