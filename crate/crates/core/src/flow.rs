//! Exact integer min-cost flow, used to solve the small transportation
//! problems behind the signature challenger search.

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: i64,
    cost: i64,
}

#[derive(Debug, Clone)]
pub(crate) struct MinCostFlow {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl MinCostFlow {
    pub fn new(nodes: usize) -> Self {
        MinCostFlow {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64, cost: i64) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap, cost });
        self.edges.push(Edge {
            to: from,
            cap: 0,
            cost: -cost,
        });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    /// Flow currently routed through edge `id`.
    pub fn flow_on(&self, id: usize) -> i64 {
        self.edges[id + 1].cap
    }

    /// Successive shortest paths with Bellman-Ford. Returns `(flow, cost)`.
    /// The graph must not contain negative cycles initially.
    pub fn run(&mut self, source: usize, sink: usize, limit: i64) -> (i64, i64) {
        let n = self.adj.len();
        let (mut flow, mut cost) = (0i64, 0i64);
        while flow < limit {
            let mut dist = vec![i64::MAX; n];
            let mut via = vec![usize::MAX; n];
            dist[source] = 0;
            let mut changed = true;
            while changed {
                changed = false;
                for u in 0..n {
                    if dist[u] == i64::MAX {
                        continue;
                    }
                    for &e in &self.adj[u] {
                        let edge = &self.edges[e];
                        if edge.cap > 0 && dist[u] + edge.cost < dist[edge.to] {
                            dist[edge.to] = dist[u] + edge.cost;
                            via[edge.to] = e;
                            changed = true;
                        }
                    }
                }
            }
            if dist[sink] == i64::MAX {
                break;
            }
            let mut push = limit - flow;
            let mut v = sink;
            while v != source {
                let e = via[v];
                push = push.min(self.edges[e].cap);
                v = self.edges[e ^ 1].to;
            }
            let mut v = sink;
            while v != source {
                let e = via[v];
                self.edges[e].cap -= push;
                self.edges[e ^ 1].cap += push;
                v = self.edges[e ^ 1].to;
            }
            flow += push;
            cost += push * dist[sink];
        }
        (flow, cost)
    }
}

/// Optimal transportation plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Plan {
    pub value: i64,
    pub alloc: Vec<Vec<i64>>,
}

/// Ships every unit of `supply` into `capacity` (equal totals) maximizing
/// the summed `gain(row, column)` per unit. An optional `(row, column,
/// limit)` bounds a single cell. `None` when no complete plan exists.
pub(crate) fn transport(
    supply: &[i64],
    capacity: &[i64],
    gain: &dyn Fn(usize, usize) -> i64,
    cell_limit: Option<(usize, usize, i64)>,
) -> Option<Plan> {
    let total: i64 = supply.iter().sum();
    if total != capacity.iter().sum::<i64>() {
        return None;
    }
    let (rows, cols) = (supply.len(), capacity.len());
    let source = rows + cols;
    let sink = source + 1;
    let mut net = MinCostFlow::new(rows + cols + 2);
    for (r, &x) in supply.iter().enumerate() {
        net.add_edge(source, r, x, 0);
    }
    for (c, &x) in capacity.iter().enumerate() {
        net.add_edge(rows + c, sink, x, 0);
    }
    let mut cells = vec![vec![usize::MAX; cols]; rows];
    for r in 0..rows {
        for c in 0..cols {
            let cap = match cell_limit {
                Some((lr, lc, lim)) if lr == r && lc == c => lim,
                _ => supply[r],
            };
            if cap > 0 && capacity[c] > 0 {
                cells[r][c] = net.add_edge(r, rows + c, cap, -gain(r, c));
            }
        }
    }
    let (flow, cost) = net.run(source, sink, total);
    if flow < total {
        return None;
    }
    let alloc = cells
        .iter()
        .map(|row| {
            row.iter()
                .map(|&e| if e == usize::MAX { 0 } else { net.flow_on(e) })
                .collect()
        })
        .collect();
    Some(Plan { value: -cost, alloc })
}
