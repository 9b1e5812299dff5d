//! Finite truncations of locally finite graphs.
//!
//! Three families are built in: `lattice` (a hypercubic box of Z^d under the
//! l-infinity radius), `logtree` (a rooted tree whose branching number grows
//! logarithmically: a generation-g vertex has `log2(g)` children when g is a
//! power of two at least 2, and one child otherwise), and `hublattice` (Z^2
//! with extra "hub" edges joining `(2^n, 0)` to every point of the l1-sphere
//! of radius n around it, for n >= 3). The last two have unbounded degree in
//! the infinite graph, which is the regime the moment bounds in this crate
//! are designed to survive.
//!
//! Because every built graph is a finite window into an infinite one, each
//! vertex carries a *clean* flag: clean means all of its infinite-graph
//! neighbours are present in the truncation. Walk counts, spheres and
//! distances computed inside a ball that touches only clean vertices agree
//! with the infinite graph; [`Graph::clean_radius`] reports how far that
//! guarantee extends from a given vertex. For the hub lattice a hub whose
//! target sphere does not fit inside the box contributes no edges at all, and
//! both the hub and its in-box sphere points are marked unclean.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::io::{BufRead, Write};

use thiserror::Error;

/// Index of a vertex inside one [`Graph`]; dense in `0..vertex_count`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VertexId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which infinite graph a truncation was cut from, with its cut parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphFamily {
    LatticeBox { dimension: u32, radius: u32 },
    LogTree { max_generation: u32 },
    HubLattice { radius: u32 },
    /// A standalone finite graph; every vertex counts as clean.
    Custom,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("lattice dimension must be at least 1")]
    ZeroDimension,
    #[error("vertex budget exceeded: construction needs {requested} vertices, budget is {budget}")]
    BudgetExceeded { requested: u64, budget: u64 },
    #[error("vertices {x} and {y} are not connected")]
    Disconnected { x: VertexId, y: VertexId },
    #[error("vertex id {0} out of range")]
    VertexOutOfRange(u32),
    #[error("self-loop at vertex {0} is not allowed")]
    SelfLoop(u32),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(u32, u32),
    #[error("duplicate vertex label {0:?}")]
    DuplicateLabel(String),
    #[error("malformed graph text at line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("graph text does not match its declared family: {0}")]
    FamilyMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Default cap on built vertices; builders reject anything larger.
pub const DEFAULT_VERTEX_BUDGET: u64 = 2_000_000;

/// An undirected simple graph with string labels and per-vertex clean flags.
pub struct Graph {
    adjacency: Vec<Vec<VertexId>>,
    labels: Vec<String>,
    clean: Vec<bool>,
    by_label: HashMap<String, VertexId>,
    family: GraphFamily,
}

impl Graph {
    fn assemble(
        labels: Vec<String>,
        mut adjacency: Vec<Vec<VertexId>>,
        clean: Vec<bool>,
        family: GraphFamily,
    ) -> Result<Self, GraphError> {
        debug_assert_eq!(labels.len(), adjacency.len());
        debug_assert_eq!(labels.len(), clean.len());
        let mut by_label = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if by_label.insert(label.clone(), VertexId(i as u32)).is_some() {
                return Err(GraphError::DuplicateLabel(label.clone()));
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph { adjacency, labels, clean, by_label, family })
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.adjacency.len() as u32).map(VertexId)
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges as `(u, v)` pairs with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u).iter().copied().filter(move |&v| u < v).map(move |v| (u, v))
        })
    }

    /// Degree inside the truncation. For clean vertices this equals the
    /// infinite-graph valence.
    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v.index()].len()
    }

    /// Neighbours in ascending id order.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v.index()]
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v.index()]
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<VertexId> {
        self.by_label.get(label).copied()
    }

    /// Whether every infinite-graph neighbour of `v` is present.
    pub fn is_clean(&self, v: VertexId) -> bool {
        self.clean[v.index()]
    }

    pub fn family(&self) -> &GraphFamily {
        &self.family
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.index() < self.vertex_count()
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v.index() < self.vertex_count() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange(v.0))
        }
    }

    /// BFS distances from `x`; `u32::MAX` marks unreachable vertices.
    pub fn distances_from(&self, x: VertexId) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[x.index()] = 0;
        queue.push_back(x);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v.index()];
            for &u in self.neighbors(v) {
                if dist[u.index()] == u32::MAX {
                    dist[u.index()] = dv + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Graph distance; disconnected pairs are an error, not a sentinel.
    pub fn distance(&self, x: VertexId, y: VertexId) -> Result<usize, GraphError> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        let d = self.distances_from(x)[y.index()];
        if d == u32::MAX {
            Err(GraphError::Disconnected { x, y })
        } else {
            Ok(d as usize)
        }
    }

    /// Vertices at distance exactly `n` from `y`, ascending by id.
    pub fn sphere(&self, y: VertexId, n: usize) -> Result<Vec<VertexId>, GraphError> {
        self.check_vertex(y)?;
        let dist = self.distances_from(y);
        Ok(self
            .vertices()
            .filter(|v| dist[v.index()] != u32::MAX && dist[v.index()] as usize == n)
            .collect())
    }

    /// Vertices at distance at most `n` from `y`, ascending by id.
    pub fn ball(&self, y: VertexId, n: usize) -> Result<Vec<VertexId>, GraphError> {
        self.check_vertex(y)?;
        let dist = self.distances_from(y);
        Ok(self
            .vertices()
            .filter(|v| dist[v.index()] != u32::MAX && dist[v.index()] as usize <= n)
            .collect())
    }

    /// Largest `n` such that every vertex of the ball `B(x, n - 1)` is clean,
    /// i.e. how far walk counts, spheres and distances from `x` agree with
    /// the infinite graph. `usize::MAX` when no unclean vertex is reachable.
    pub fn clean_radius(&self, x: VertexId) -> usize {
        let mut dist = vec![u32::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[x.index()] = 0;
        queue.push_back(x);
        while let Some(v) = queue.pop_front() {
            if !self.clean[v.index()] {
                return dist[v.index()] as usize;
            }
            let dv = dist[v.index()];
            for &u in self.neighbors(v) {
                if dist[u.index()] == u32::MAX {
                    dist[u.index()] = dv + 1;
                    queue.push_back(u);
                }
            }
        }
        usize::MAX
    }

    /// Distance from each vertex to the nearest unclean vertex, via one
    /// multi-source BFS; `u32::MAX` where no unclean vertex is reachable.
    /// Walk counts `c_v(n)` match the infinite graph whenever
    /// `n <= distances_to_unclean()[v]`.
    pub fn distances_to_unclean(&self) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        for v in self.vertices() {
            if !self.clean[v.index()] {
                dist[v.index()] = 0;
                queue.push_back(v);
            }
        }
        while let Some(v) = queue.pop_front() {
            let dv = dist[v.index()];
            for &u in self.neighbors(v) {
                if dist[u.index()] == u32::MAX {
                    dist[u.index()] = dv + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Serialize as line-oriented text: a `graph <family> <params>` header,
    /// one `v <id> <label>` line per vertex, one `e <id> <id>` line per edge
    /// with the smaller id first.
    pub fn write_text<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "graph {}", self.family_header())?;
        for v in self.vertices() {
            writeln!(w, "v {} {}", v, self.label(v))?;
        }
        for (u, v) in self.edges() {
            writeln!(w, "e {} {}", u, v)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = Vec::new();
        self.write_text(&mut out).expect("writing to memory cannot fail");
        String::from_utf8(out).expect("graph text is valid utf-8")
    }

    fn family_header(&self) -> String {
        match &self.family {
            GraphFamily::LatticeBox { dimension, radius } => {
                format!("lattice {dimension} {radius}")
            }
            GraphFamily::LogTree { max_generation } => format!("logtree {max_generation}"),
            GraphFamily::HubLattice { radius } => format!("hublattice {radius}"),
            GraphFamily::Custom => format!("custom {}", self.vertex_count()),
        }
    }

    /// Parse the text format produced by [`Graph::write_text`].
    ///
    /// For the built-in families the graph is rebuilt from the header
    /// parameters and the vertex/edge lines are verified against it, so a
    /// file that was edited out of sync with its header is rejected. `custom`
    /// graphs are reconstructed from the lines alone.
    pub fn parse_text<R: BufRead>(r: R) -> Result<Graph, GraphError> {
        let mut header: Option<(usize, String)> = None;
        let mut v_lines: Vec<(usize, u32, String)> = Vec::new();
        let mut e_lines: Vec<(usize, u32, u32)> = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let mut tokens = trimmed.split_whitespace();
            let tag = tokens.next().expect("non-empty line has a first token");
            let malformed = |reason: &str| GraphError::Malformed {
                line: line_no,
                reason: reason.to_string(),
            };
            match tag {
                "graph" => {
                    if header.is_some() {
                        return Err(malformed("second graph header"));
                    }
                    header = Some((line_no, tokens.collect::<Vec<_>>().join(" ")));
                }
                "v" => {
                    let id: u32 = tokens
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| malformed("vertex line needs a numeric id"))?;
                    let label = tokens
                        .next()
                        .ok_or_else(|| malformed("vertex line needs a label"))?
                        .to_string();
                    if tokens.next().is_some() {
                        return Err(malformed("trailing tokens on vertex line"));
                    }
                    v_lines.push((line_no, id, label));
                }
                "e" => {
                    let a: u32 = tokens
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| malformed("edge line needs two numeric ids"))?;
                    let b: u32 = tokens
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| malformed("edge line needs two numeric ids"))?;
                    if tokens.next().is_some() {
                        return Err(malformed("trailing tokens on edge line"));
                    }
                    if a >= b {
                        return Err(malformed("edge ids must satisfy id1 < id2"));
                    }
                    e_lines.push((line_no, a, b));
                }
                _ => return Err(malformed("unknown line tag")),
            }
        }
        let (header_line, header) =
            header.ok_or(GraphError::Malformed { line: 1, reason: "missing graph header".into() })?;
        let tokens: Vec<&str> = header.split_whitespace().collect();
        let parse_param = |pos: usize| -> Result<u32, GraphError> {
            tokens
                .get(pos)
                .and_then(|t| t.parse().ok())
                .ok_or(GraphError::Malformed {
                    line: header_line,
                    reason: "header parameter missing or not a number".into(),
                })
        };
        let rebuilt = match *tokens.first().ok_or(GraphError::Malformed {
            line: header_line,
            reason: "empty graph header".into(),
        })? {
            "lattice" => build_lattice_box(parse_param(1)?, parse_param(2)?, u64::MAX)?,
            "logtree" => build_log_tree(parse_param(1)?, u64::MAX)?,
            "hublattice" => build_hub_lattice(parse_param(1)?, u64::MAX)?,
            "custom" => {
                let declared = parse_param(1)? as usize;
                return build_custom(declared, v_lines, e_lines);
            }
            other => {
                return Err(GraphError::Malformed {
                    line: header_line,
                    reason: format!("unknown graph family {other:?}"),
                })
            }
        };
        verify_against(&rebuilt, &v_lines, &e_lines)?;
        Ok(rebuilt)
    }
}

fn build_custom(
    declared: usize,
    v_lines: Vec<(usize, u32, String)>,
    e_lines: Vec<(usize, u32, u32)>,
) -> Result<Graph, GraphError> {
    if v_lines.len() != declared {
        return Err(GraphError::Malformed {
            line: 1,
            reason: format!("header declares {declared} vertices, found {}", v_lines.len()),
        });
    }
    let mut labels = vec![String::new(); declared];
    let mut seen = vec![false; declared];
    for (line, id, label) in v_lines {
        let idx = id as usize;
        if idx >= declared || seen[idx] {
            return Err(GraphError::Malformed {
                line,
                reason: format!("vertex id {id} out of range or repeated"),
            });
        }
        seen[idx] = true;
        labels[idx] = label;
    }
    let edges: Vec<(u32, u32)> = e_lines.iter().map(|&(_, a, b)| (a, b)).collect();
    from_edges(labels, &edges)
}

fn verify_against(
    rebuilt: &Graph,
    v_lines: &[(usize, u32, String)],
    e_lines: &[(usize, u32, u32)],
) -> Result<(), GraphError> {
    if v_lines.len() != rebuilt.vertex_count() {
        return Err(GraphError::FamilyMismatch(format!(
            "family builds {} vertices, file lists {}",
            rebuilt.vertex_count(),
            v_lines.len()
        )));
    }
    for &(_, id, ref label) in v_lines {
        if id as usize >= rebuilt.vertex_count() || rebuilt.label(VertexId(id)) != label {
            return Err(GraphError::FamilyMismatch(format!(
                "vertex {id} labelled {label:?} disagrees with the rebuilt family"
            )));
        }
    }
    if e_lines.len() != rebuilt.edge_count() {
        return Err(GraphError::FamilyMismatch(format!(
            "family builds {} edges, file lists {}",
            rebuilt.edge_count(),
            e_lines.len()
        )));
    }
    for &(_, a, b) in e_lines {
        let (a, b) = (VertexId(a), VertexId(b));
        if b.index() >= rebuilt.vertex_count() || !rebuilt.neighbors(a).contains(&b) {
            return Err(GraphError::FamilyMismatch(format!(
                "edge ({a}, {b}) is not present in the rebuilt family"
            )));
        }
    }
    Ok(())
}

/// Standalone finite graph from explicit labels and edges; every vertex is
/// treated as clean.
pub fn from_edges(labels: Vec<String>, edges: &[(u32, u32)]) -> Result<Graph, GraphError> {
    let n = labels.len();
    let mut adjacency = vec![Vec::new(); n];
    for &(a, b) in edges {
        if a as usize >= n {
            return Err(GraphError::VertexOutOfRange(a));
        }
        if b as usize >= n {
            return Err(GraphError::VertexOutOfRange(b));
        }
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        if adjacency[a as usize].contains(&VertexId(b)) {
            return Err(GraphError::DuplicateEdge(a.min(b), a.max(b)));
        }
        adjacency[a as usize].push(VertexId(b));
        adjacency[b as usize].push(VertexId(a));
    }
    Graph::assemble(labels, adjacency, vec![true; n], GraphFamily::Custom)
}

/// Box `{v in Z^d : |v|_inf <= radius}` with nearest-neighbour edges.
///
/// Vertices are enumerated row-major over coordinates `-radius..=radius`, so
/// ids are stable across builds. A vertex is clean iff `|v|_inf <= radius-1`.
pub fn build_lattice_box(dimension: u32, radius: u32, budget: u64) -> Result<Graph, GraphError> {
    if dimension == 0 {
        return Err(GraphError::ZeroDimension);
    }
    let side = 2 * radius as u64 + 1;
    let count = side
        .checked_pow(dimension)
        .filter(|&c| c <= budget)
        .ok_or(GraphError::BudgetExceeded {
            requested: side.saturating_pow(dimension),
            budget,
        })?;
    let count = count as usize;
    let d = dimension as usize;
    let side = side as usize;
    let r = radius as i64;

    let coords_of = |mut id: usize| -> Vec<i64> {
        let mut c = vec![0i64; d];
        for k in (0..d).rev() {
            c[k] = (id % side) as i64 - r;
            id /= side;
        }
        c
    };
    let label_of = |c: &[i64]| {
        let parts: Vec<String> = c.iter().map(i64::to_string).collect();
        format!("({})", parts.join(","))
    };

    let mut labels = Vec::with_capacity(count);
    let mut adjacency = Vec::with_capacity(count);
    let mut clean = Vec::with_capacity(count);
    let mut strides = vec![1usize; d];
    for k in (0..d.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * side;
    }
    for id in 0..count {
        let c = coords_of(id);
        labels.push(label_of(&c));
        clean.push(c.iter().all(|&x| x.unsigned_abs() + 1 <= radius as u64));
        let mut nbrs = Vec::with_capacity(2 * d);
        for k in 0..d {
            if c[k] > -r {
                nbrs.push(VertexId((id - strides[k]) as u32));
            }
            if c[k] < r {
                nbrs.push(VertexId((id + strides[k]) as u32));
            }
        }
        adjacency.push(nbrs);
    }
    Graph::assemble(labels, adjacency, clean, GraphFamily::LatticeBox { dimension, radius })
}

/// Children per generation of the log tree: `log2(g)` when `g` is a power of
/// two with `log2(g) >= 1`, otherwise one. Generations 0 and 1 both fall to
/// the one-child branch.
pub fn log_tree_offspring(generation: u32) -> u32 {
    if generation >= 2 && generation.is_power_of_two() {
        generation.trailing_zeros()
    } else {
        1
    }
}

/// Rooted tree truncated after `max_generation`; the root is generation 0.
///
/// Labels are `g<generation>.<index>` with the index counted within the
/// generation. Vertices of the last generation are unclean (their children
/// were cut off); everything else is clean.
pub fn build_log_tree(max_generation: u32, budget: u64) -> Result<Graph, GraphError> {
    let mut labels = vec!["g0.0".to_string()];
    let mut adjacency: Vec<Vec<VertexId>> = vec![Vec::new()];
    let mut clean = vec![max_generation > 0];
    let mut current: Vec<VertexId> = vec![VertexId(0)];
    let mut total: u64 = 1;
    for gen in 0..max_generation {
        let children_per_parent = log_tree_offspring(gen);
        let mut next = Vec::with_capacity(current.len() * children_per_parent as usize);
        for &parent in &current {
            for _ in 0..children_per_parent {
                total += 1;
                if total > budget {
                    return Err(GraphError::BudgetExceeded { requested: total, budget });
                }
                let child = VertexId(adjacency.len() as u32);
                labels.push(format!("g{}.{}", gen + 1, next.len()));
                adjacency.push(vec![parent]);
                adjacency[parent.index()].push(child);
                clean.push(gen + 1 < max_generation);
                next.push(child);
            }
        }
        current = next;
    }
    Graph::assemble(labels, adjacency, clean, GraphFamily::LogTree { max_generation })
}

/// Z^2 box of l-infinity radius `radius` with nearest-neighbour edges plus
/// hub edges from `(2^n, 0)` to its full l1-sphere of radius `n`, `n >= 3`.
///
/// A hub contributes edges only when its whole target sphere fits inside the
/// box (`2^n + n <= radius`); otherwise the hub keeps none of them and every
/// in-box endpoint of the dropped edges is marked unclean.
pub fn build_hub_lattice(radius: u32, budget: u64) -> Result<Graph, GraphError> {
    let base = build_lattice_box(2, radius, budget)?;
    let side = 2 * radius as usize + 1;
    let r = radius as i64;
    let id_of = |x: i64, y: i64| -> Option<VertexId> {
        if x.abs() <= r && y.abs() <= r {
            Some(VertexId(((x + r) as usize * side + (y + r) as usize) as u32))
        } else {
            None
        }
    };
    let mut adjacency: Vec<Vec<VertexId>> =
        base.vertices().map(|v| base.neighbors(v).to_vec()).collect();
    let mut clean: Vec<bool> = base.vertices().map(|v| base.is_clean(v)).collect();
    let labels: Vec<String> = base.vertices().map(|v| base.label(v).to_string()).collect();

    let sphere_points = |cx: i64, n: i64| {
        let mut pts = Vec::with_capacity(4 * n as usize);
        for dx in -n..=n {
            let rest = n - dx.abs();
            if rest == 0 {
                pts.push((cx + dx, 0));
            } else {
                pts.push((cx + dx, rest));
                pts.push((cx + dx, -rest));
            }
        }
        pts
    };

    for n in 3u32.. {
        let hub_x = 1i64 << n;
        if hub_x - n as i64 > r {
            break;
        }
        if hub_x + n as i64 <= r {
            let hub = id_of(hub_x, 0).expect("hub inside box when its sphere is");
            for (px, py) in sphere_points(hub_x, n as i64) {
                let p = id_of(px, py).expect("sphere point inside box");
                adjacency[hub.index()].push(p);
                adjacency[p.index()].push(hub);
            }
        } else {
            // Dropped hub: everything that lost an edge is no longer clean.
            if let Some(hub) = id_of(hub_x, 0) {
                clean[hub.index()] = false;
            }
            for (px, py) in sphere_points(hub_x, n as i64) {
                if let Some(p) = id_of(px, py) {
                    clean[p.index()] = false;
                }
            }
        }
    }
    Graph::assemble(labels, adjacency, clean, GraphFamily::HubLattice { radius })
}
