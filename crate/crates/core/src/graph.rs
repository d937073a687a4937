//! Welded tree graphs: two balanced binary trees of height `n` whose
//! `2·2^n` leaves are joined by a single alternating cycle (the weld).
//!
//! Vertices carry random fixed-width bit-string labels; the graph structure
//! is only reachable through those labels via the oracle module. Internally
//! everything is indexed densely, with the label table kept separate.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::color::{Color, COLORS};
use crate::coloring::three_edge_coloring;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Memory-budget guard for explicit construction (`2^(n+2) - 2` vertices).
pub const MAX_N: u32 = 20;

/// Which of the two trees a vertex belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Width in bits of vertex labels. This is `2n` except for `n < 3`, where
/// `2n` bits cannot fit all `2^(n+2) - 2` labels plus the three reserved
/// strings, so the width is padded to `n + 3`.
pub fn label_bits_for(n: u32) -> u32 {
    (2 * n).max(n + 3)
}

/// Serialized form of a welded tree: labels as hex strings and edges as
/// `[u, v, color]` triples over dense vertex indices. This is the on-disk
/// JSON schema; label round-trips are bit-exact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawGraph {
    pub n: u32,
    pub label_bits: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    pub entrance: u32,
    pub exit: u32,
    pub labels: Vec<String>,
    pub edges: Vec<(u32, u32, Color)>,
}

/// Outcome of structural validation: empty means valid.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, msg: String) {
        self.violations.push(msg);
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_ok() {
            write!(f, "ok")
        } else {
            write!(f, "{} violation(s): {}", self.violations.len(), self.violations.join("; "))
        }
    }
}

#[derive(Debug, Clone)]
struct ParsedGraph {
    n: u32,
    label_bits: u32,
    seed: Option<u64>,
    entrance: u32,
    exit: u32,
    labels: Vec<u64>,
    edges: Vec<(u32, u32, Color)>,
}

/// A fully constructed, validated welded tree. Immutable after construction
/// and safe to share across threads.
#[derive(Debug, Clone)]
pub struct WeldedTree {
    n: u32,
    label_bits: u32,
    seed: Option<u64>,
    entrance: u32,
    exit: u32,
    labels: Vec<u64>,
    label_to_index: HashMap<u64, u32>,
    adjacency: Vec<[Option<u32>; 3]>,
    columns: Vec<u16>,
    weld_class: Vec<Option<(Side, Color)>>,
    subtree_of: Vec<Option<u32>>,
    subtree_leaves: Vec<Vec<u32>>,
    subtree_height: u32,
}

impl WeldedTree {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn label_bits(&self) -> u32 {
        self.label_bits
    }

    pub fn construction_seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn entrance(&self) -> u32 {
        self.entrance
    }

    pub fn exit(&self) -> u32 {
        self.exit
    }

    pub fn entrance_label(&self) -> u64 {
        self.labels[self.entrance as usize]
    }

    pub fn exit_label(&self) -> u64 {
        self.labels[self.exit as usize]
    }

    /// Reserved string returned when a vertex has no edge of the queried color.
    pub fn noedge_label(&self) -> u64 {
        (1u64 << self.label_bits) - 1
    }

    /// Reserved string returned for inputs that are not vertex labels.
    pub fn invalid_label(&self) -> u64 {
        (1u64 << self.label_bits) - 2
    }

    pub fn label_of(&self, v: u32) -> u64 {
        self.labels[v as usize]
    }

    pub fn index_of_label(&self, label: u64) -> Option<u32> {
        self.label_to_index.get(&label).copied()
    }

    pub fn neighbor(&self, v: u32, c: Color) -> Option<u32> {
        self.adjacency[v as usize][c.index()]
    }

    pub fn column(&self, v: u32) -> u32 {
        self.columns[v as usize] as u32
    }

    pub fn side(&self, v: u32) -> Side {
        if self.column(v) <= self.n {
            Side::Left
        } else {
            Side::Right
        }
    }

    pub fn is_weld_vertex(&self, v: u32) -> bool {
        let col = self.column(v);
        col == self.n || col == self.n + 1
    }

    /// `(side, tree-edge color)` class of a weld vertex.
    pub fn weld_class(&self, v: u32) -> Option<(Side, Color)> {
        self.weld_class[v as usize]
    }

    pub fn weld_vertices(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.vertex_count() as u32).filter(|&v| self.is_weld_vertex(v))
    }

    /// Vertices in one `(side, color)` weld class, in index order.
    pub fn weld_class_members(&self, side: Side, color: Color) -> Vec<u32> {
        self.weld_vertices()
            .filter(|&v| self.weld_class[v as usize] == Some((side, color)))
            .collect()
    }

    /// The unique color with no edge at the entrance. By a parity argument the
    /// exit is missing the same color in any proper 3-coloring.
    pub fn missing_color(&self) -> Color {
        COLORS
            .into_iter()
            .find(|&c| self.neighbor(self.entrance, c).is_none())
            .expect("entrance has degree 2")
    }

    /// Graph distance from `v` to the nearest weld vertex; equals
    /// `min(|column - n|, |column - (n+1)|)`.
    pub fn distance_to_weld(&self, v: u32) -> u32 {
        let col = self.column(v) as i64;
        let n = self.n as i64;
        ((col - n).abs().min((col - n - 1).abs())) as u32
    }

    /// Height of the leaf subtrees used by the hardness experiments
    /// (`⌈n/3⌉`, rooted at column `n - ⌈n/3⌉` and its mirror).
    pub fn subtree_height(&self) -> u32 {
        self.subtree_height
    }

    pub fn subtree_count(&self) -> usize {
        self.subtree_leaves.len()
    }

    /// Index of the height-`⌈n/3⌉` subtree containing a leaf.
    pub fn subtree_of_leaf(&self, v: u32) -> Option<u32> {
        self.subtree_of[v as usize]
    }

    pub fn subtree_leaves(&self, id: u32) -> &[u32] {
        &self.subtree_leaves[id as usize]
    }

    /// Number of `color`-colored edges at `level` of the chosen tree. An edge
    /// is at level `i` when it joins that tree's columns `i-1` and `i`
    /// (counting from the tree's own root).
    pub fn gamma_count(&self, side: Side, color: Color, level: u32) -> Result<u64> {
        if level < 1 || level > self.n {
            return Err(Error::LevelOutOfRange { level, max: self.n });
        }
        let child_col = match side {
            Side::Left => level,
            Side::Right => 2 * self.n + 1 - level,
        };
        let parent_col = match side {
            Side::Left => child_col - 1,
            Side::Right => child_col + 1,
        };
        let mut count = 0;
        for v in 0..self.vertex_count() as u32 {
            if self.column(v) != child_col {
                continue;
            }
            if let Some(u) = self.neighbor(v, color) {
                if self.column(u) == parent_col {
                    count += 1;
                }
            }
        }
        Ok(count)
    }

    /// Closed-form value `gamma_count` must equal: `⌊2^i/3⌋` when
    /// (`i` odd and `c = c_*`) or (`i` even and `c ≠ c_*`), else `⌈2^i/3⌉`,
    /// where `c_*` is the color missing at the tree's root.
    pub fn gamma_expected(&self, color: Color, level: u32) -> u64 {
        let c_star = self.missing_color();
        let pow = 1u64 << level;
        let odd = level % 2 == 1;
        if (odd && color == c_star) || (!odd && color != c_star) {
            pow / 3
        } else {
            pow.div_ceil(3)
        }
    }

    pub fn to_raw(&self) -> RawGraph {
        let width = (self.label_bits as usize).div_ceil(4);
        let mut edges = Vec::new();
        for v in 0..self.vertex_count() as u32 {
            for c in COLORS {
                if let Some(u) = self.neighbor(v, c) {
                    if v < u {
                        edges.push((v, u, c));
                    }
                }
            }
        }
        edges.sort_unstable();
        RawGraph {
            n: self.n,
            label_bits: self.label_bits,
            seed: self.seed,
            entrance: self.entrance,
            exit: self.exit,
            labels: self.labels.iter().map(|l| format!("{l:0width$x}")).collect(),
            edges,
        }
    }

    pub fn from_raw(raw: &RawGraph) -> Result<Self> {
        let report = validate_raw(raw);
        if !report.is_ok() {
            return Err(Error::InvalidGraph(report.to_string()));
        }
        let parsed = parse_raw(raw).expect("validated");
        Ok(build_from_parsed(parsed))
    }

    /// Rewire the weld adjacency; used by `apply_permutation`.
    pub(crate) fn with_weld_adjacency(&self, adjacency: Vec<[Option<u32>; 3]>) -> Self {
        let mut g = self.clone();
        g.adjacency = adjacency;
        g.seed = None;
        g
    }
}

/// Validate every structural invariant of a serialized graph. Violations are
/// data, not errors: the report lists everything found.
pub fn validate_raw(raw: &RawGraph) -> ValidationReport {
    let mut report = ValidationReport::default();
    if raw.n < 1 {
        report.push("n must be at least 1".into());
        return report;
    }
    if raw.n > MAX_N {
        report.push(format!("n = {} exceeds the supported maximum {MAX_N}", raw.n));
        return report;
    }
    if raw.label_bits != label_bits_for(raw.n) {
        report.push(format!(
            "label_bits = {} but the canonical width for n = {} is {}",
            raw.label_bits,
            raw.n,
            label_bits_for(raw.n)
        ));
    }
    let expected_vertices = (1usize << (raw.n + 2)) - 2;
    if raw.labels.len() != expected_vertices {
        report.push(format!(
            "expected {expected_vertices} vertices, found {}",
            raw.labels.len()
        ));
        return report;
    }
    let parsed = match parse_raw(raw) {
        Ok(p) => p,
        Err(msgs) => {
            for m in msgs {
                report.push(m);
            }
            return report;
        }
    };
    validate_parsed(&parsed, &mut report);
    report
}

/// Validate a constructed graph. Constructors already guarantee this passes;
/// it exists so permuted and deserialized graphs can be checked exhaustively.
pub fn validate_welded_tree(g: &WeldedTree) -> ValidationReport {
    let mut report = ValidationReport::default();
    let parsed = ParsedGraph {
        n: g.n,
        label_bits: g.label_bits,
        seed: g.seed,
        entrance: g.entrance,
        exit: g.exit,
        labels: g.labels.clone(),
        edges: g.to_raw().edges,
    };
    validate_parsed(&parsed, &mut report);
    report
}

fn parse_raw(raw: &RawGraph) -> std::result::Result<ParsedGraph, Vec<String>> {
    let mut msgs = Vec::new();
    let mut labels = Vec::with_capacity(raw.labels.len());
    for (i, s) in raw.labels.iter().enumerate() {
        match u64::from_str_radix(s, 16) {
            Ok(v) => labels.push(v),
            Err(_) => {
                msgs.push(format!("label {i} ({s:?}) is not a hex string"));
                labels.push(0);
            }
        }
    }
    if msgs.is_empty() {
        Ok(ParsedGraph {
            n: raw.n,
            label_bits: raw.label_bits,
            seed: raw.seed,
            entrance: raw.entrance,
            exit: raw.exit,
            labels,
            edges: raw.edges.clone(),
        })
    } else {
        Err(msgs)
    }
}

fn validate_parsed(g: &ParsedGraph, report: &mut ValidationReport) {
    let n = g.n;
    let vertex_count = g.labels.len();
    let noedge = (1u64 << g.label_bits) - 1;
    let invalid = (1u64 << g.label_bits) - 2;

    // Labels: in range, distinct, none reserved.
    let mut seen = HashSet::with_capacity(vertex_count);
    for (i, &label) in g.labels.iter().enumerate() {
        if g.label_bits < 64 && label >> g.label_bits != 0 {
            report.push(format!("label of vertex {i} does not fit in {} bits", g.label_bits));
        }
        if label == 0 || label == noedge || label == invalid {
            report.push(format!("label of vertex {i} is a reserved string"));
        }
        if !seen.insert(label) {
            report.push(format!("label of vertex {i} duplicates another label"));
        }
    }

    if g.entrance as usize >= vertex_count || g.exit as usize >= vertex_count {
        report.push("entrance or exit index out of range".into());
        return;
    }
    if g.entrance == g.exit {
        report.push("entrance and exit coincide".into());
    }

    // Adjacency map: at most one edge per color per vertex (proper coloring),
    // no repeated vertex pairs.
    let mut adjacency: Vec<[Option<u32>; 3]> = vec![[None; 3]; vertex_count];
    let mut pairs = HashSet::new();
    for &(u, v, c) in &g.edges {
        if u as usize >= vertex_count || v as usize >= vertex_count || u == v {
            report.push(format!("edge ({u}, {v}) has a bad endpoint"));
            continue;
        }
        if !pairs.insert((u.min(v), u.max(v))) {
            report.push(format!("multiple edges between vertices {u} and {v}"));
            continue;
        }
        for (a, b) in [(u, v), (v, u)] {
            if adjacency[a as usize][c.index()].is_some() {
                report.push(format!("improper coloring at vertex {a}: two {c} edges"));
            } else {
                adjacency[a as usize][c.index()] = Some(b);
            }
        }
    }

    // Degree pattern: entrance and exit have exactly 2 colors, others 3.
    for v in 0..vertex_count as u32 {
        let deg = adjacency[v as usize].iter().flatten().count();
        let expected = if v == g.entrance || v == g.exit { 2 } else { 3 };
        if deg != expected {
            report.push(format!("vertex {v} has degree {deg}, expected {expected}"));
        }
    }
    if !report.is_ok() {
        return;
    }

    // Columns via BFS from the entrance.
    let columns = match bfs_columns(&adjacency, g.entrance) {
        Ok(c) => c,
        Err(msg) => {
            report.push(msg);
            return;
        }
    };
    let top = 2 * n + 1;
    if columns[g.exit as usize] != top {
        report.push(format!(
            "exit is at column {}, expected {top}",
            columns[g.exit as usize]
        ));
        return;
    }
    for v in 0..vertex_count as u32 {
        if columns[v as usize] > top {
            report.push(format!("vertex {v} is at column {} beyond the exit", columns[v as usize]));
            return;
        }
    }
    // Every edge joins adjacent columns.
    for &(u, v, _) in &g.edges {
        let (cu, cv) = (columns[u as usize], columns[v as usize]);
        if cu.abs_diff(cv) != 1 {
            report.push(format!("edge ({u}, {v}) joins columns {cu} and {cv}"));
        }
    }
    // Column populations match two glued balanced binary trees.
    let mut pop = vec![0u64; (top + 1) as usize];
    for v in 0..vertex_count {
        pop[columns[v] as usize] += 1;
    }
    for col in 0..=top {
        let expected = if col <= n { 1u64 << col } else { 1u64 << (top - col) };
        if pop[col as usize] != expected {
            report.push(format!(
                "column {col} holds {} vertices, expected {expected}",
                pop[col as usize]
            ));
        }
    }
    if !report.is_ok() {
        return;
    }
    // Tree shape: unique parent toward each root.
    for v in 0..vertex_count as u32 {
        let col = columns[v as usize];
        if (1..=n).contains(&col) {
            let parents = neighbor_count_at(&adjacency, &columns, v, col - 1);
            if parents != 1 {
                report.push(format!("vertex {v} has {parents} parents toward the entrance"));
            }
        }
        if (n + 1..=2 * n).contains(&col) {
            let parents = neighbor_count_at(&adjacency, &columns, v, col + 1);
            if parents != 1 {
                report.push(format!("vertex {v} has {parents} parents toward the exit"));
            }
        }
    }

    // The weld: every leaf has exactly 2 cross edges and they form one cycle.
    let weld_edges: Vec<(u32, u32)> = g
        .edges
        .iter()
        .filter(|&&(u, v, _)| {
            let (cu, cv) = (columns[u as usize], columns[v as usize]);
            cu.min(cv) == n && cu.max(cv) == n + 1
        })
        .map(|&(u, v, _)| (u, v))
        .collect();
    let expected_weld = 1u64 << (n + 1);
    if weld_edges.len() as u64 != expected_weld {
        report.push(format!(
            "weld has {} edges, expected {expected_weld}",
            weld_edges.len()
        ));
        return;
    }
    let mut weld_adj: HashMap<u32, Vec<u32>> = HashMap::new();
    for &(u, v) in &weld_edges {
        weld_adj.entry(u).or_default().push(v);
        weld_adj.entry(v).or_default().push(u);
    }
    for (v, ns) in &weld_adj {
        if ns.len() != 2 {
            report.push(format!("weld vertex {v} has {} weld edges, expected 2", ns.len()));
            return;
        }
    }
    // Walk the cycle; it must close after visiting every weld vertex.
    let start = *weld_adj.keys().min().unwrap();
    let mut prev = start;
    let mut at = weld_adj[&start][0];
    let mut visited = 1u64;
    while at != start {
        let ns = &weld_adj[&at];
        let next = if ns[0] == prev { ns[1] } else { ns[0] };
        prev = at;
        at = next;
        visited += 1;
        if visited > expected_weld {
            break;
        }
    }
    if visited != expected_weld {
        report.push(format!(
            "weld is not a single cycle: walk closed after {visited} of {expected_weld} vertices"
        ));
    }
}

fn bfs_columns(
    adjacency: &[[Option<u32>; 3]],
    entrance: u32,
) -> std::result::Result<Vec<u32>, String> {
    let mut columns = vec![u32::MAX; adjacency.len()];
    let mut queue = VecDeque::new();
    columns[entrance as usize] = 0;
    queue.push_back(entrance);
    while let Some(v) = queue.pop_front() {
        for slot in adjacency[v as usize].iter().flatten() {
            if columns[*slot as usize] == u32::MAX {
                columns[*slot as usize] = columns[v as usize] + 1;
                queue.push_back(*slot);
            }
        }
    }
    if let Some(v) = columns.iter().position(|&c| c == u32::MAX) {
        return Err(format!("vertex {v} is unreachable from the entrance"));
    }
    Ok(columns)
}

fn neighbor_count_at(
    adjacency: &[[Option<u32>; 3]],
    columns: &[u32],
    v: u32,
    col: u32,
) -> usize {
    adjacency[v as usize]
        .iter()
        .flatten()
        .filter(|&&u| columns[u as usize] == col)
        .count()
}

/// Build a canonical welded tree: heap-shaped trees, a seeded random
/// alternating weld cycle, a constructive 3-edge-coloring, and random
/// distinct labels avoiding the reserved strings. Deterministic per seed.
pub fn build_canonical(n: u32, seed: u64) -> Result<WeldedTree> {
    if n < 1 {
        return Err(Error::InvalidGraph("n must be at least 1".into()));
    }
    if n > MAX_N {
        return Err(Error::InvalidGraph(format!(
            "n = {n} exceeds the supported maximum {MAX_N}"
        )));
    }
    let left_size = (1u32 << (n + 1)) - 1;
    let vertex_count = 2 * left_size as usize;
    // Left tree: heap order, vertex (col, k) at index 2^col - 1 + k.
    // Right tree mirrors it at offset left_size, indexed by distance from exit.
    let left_index = |col: u32, k: u32| -> u32 { (1 << col) - 1 + k };
    let right_index = |depth: u32, k: u32| -> u32 { left_size + (1 << depth) - 1 + k };
    let entrance = left_index(0, 0);
    let exit = right_index(0, 0);

    let mut edges: Vec<(u32, u32)> = Vec::new();
    for col in 0..n {
        for k in 0..(1 << col) {
            let parent_l = left_index(col, k);
            let parent_r = right_index(col, k);
            for child in [2 * k, 2 * k + 1] {
                edges.push((parent_l, left_index(col + 1, child)));
                edges.push((parent_r, right_index(col + 1, child)));
            }
        }
    }

    // Random alternating cycle through the two leaf sets.
    let leaves = 1u32 << n;
    let mut left_leaves: Vec<u32> = (0..leaves).map(|k| left_index(n, k)).collect();
    let mut right_leaves: Vec<u32> = (0..leaves).map(|k| right_index(n, k)).collect();
    let mut weld_rng = RngStream::derive(seed, "weld-cycle", 0);
    weld_rng.shuffle(&mut left_leaves);
    weld_rng.shuffle(&mut right_leaves);
    for i in 0..leaves as usize {
        edges.push((left_leaves[i], right_leaves[i]));
        edges.push((right_leaves[i], left_leaves[(i + 1) % leaves as usize]));
    }

    // Columns are structural: left depth, or 2n+1 minus right depth.
    let mut columns = vec![0u32; vertex_count];
    for col in 0..=n {
        for k in 0..(1 << col) {
            columns[left_index(col, k) as usize] = col;
            columns[right_index(col, k) as usize] = 2 * n + 1 - col;
        }
    }
    let bipartition: Vec<bool> = columns.iter().map(|&c| c % 2 == 0).collect();
    let colors = three_edge_coloring(vertex_count, &bipartition, &edges)?;

    let label_bits = label_bits_for(n);
    let noedge = (1u64 << label_bits) - 1;
    let invalid = (1u64 << label_bits) - 2;
    let mut label_rng = RngStream::derive(seed, "labels", 0);
    let mut used = HashSet::with_capacity(vertex_count);
    let mut labels = Vec::with_capacity(vertex_count);
    for _ in 0..vertex_count {
        loop {
            let candidate = label_rng.next_below(1u64 << label_bits);
            if candidate != 0 && candidate != noedge && candidate != invalid && used.insert(candidate)
            {
                labels.push(candidate);
                break;
            }
        }
    }

    let parsed = ParsedGraph {
        n,
        label_bits,
        seed: Some(seed),
        entrance,
        exit,
        labels,
        edges: edges
            .iter()
            .zip(&colors)
            .map(|(&(u, v), &c)| (u, v, c))
            .collect(),
    };
    let mut report = ValidationReport::default();
    validate_parsed(&parsed, &mut report);
    if !report.is_ok() {
        return Err(Error::ColoringFailure(report.to_string()));
    }
    Ok(build_from_parsed(parsed))
}

fn build_from_parsed(g: ParsedGraph) -> WeldedTree {
    let vertex_count = g.labels.len();
    let mut adjacency: Vec<[Option<u32>; 3]> = vec![[None; 3]; vertex_count];
    for &(u, v, c) in &g.edges {
        adjacency[u as usize][c.index()] = Some(v);
        adjacency[v as usize][c.index()] = Some(u);
    }
    let columns32 = bfs_columns(&adjacency, g.entrance).expect("validated graph is connected");
    let columns: Vec<u16> = columns32.iter().map(|&c| c as u16).collect();
    let n = g.n;

    let mut weld_class = vec![None; vertex_count];
    for v in 0..vertex_count as u32 {
        let col = columns32[v as usize];
        let (side, parent_col) = if col == n {
            (Side::Left, n.wrapping_sub(1))
        } else if col == n + 1 {
            (Side::Right, n + 2)
        } else {
            continue;
        };
        for c in COLORS {
            if let Some(u) = adjacency[v as usize][c.index()] {
                if columns32[u as usize] == parent_col {
                    weld_class[v as usize] = Some((side, c));
                }
            }
        }
    }

    // Leaf subtrees of height ⌈n/3⌉ rooted at column n - ⌈n/3⌉ (and mirror).
    let height = n.div_ceil(3);
    let mut subtree_of = vec![None; vertex_count];
    let mut roots: Vec<u32> = (0..vertex_count as u32)
        .filter(|&v| {
            let col = columns32[v as usize];
            col == n - height || col == n + 1 + height
        })
        .collect();
    roots.sort_unstable();
    let root_id: HashMap<u32, u32> = roots
        .iter()
        .enumerate()
        .map(|(i, &r)| (r, i as u32))
        .collect();
    let mut subtree_leaves = vec![Vec::new(); roots.len()];
    for v in 0..vertex_count as u32 {
        let col = columns32[v as usize];
        if col != n && col != n + 1 {
            continue;
        }
        let toward_root = |w: u32| -> u32 {
            let wc = columns32[w as usize];
            let target = if wc <= n { wc - 1 } else { wc + 1 };
            COLORS
                .into_iter()
                .filter_map(|c| adjacency[w as usize][c.index()])
                .find(|&u| columns32[u as usize] == target)
                .expect("tree parent exists")
        };
        let mut at = v;
        for _ in 0..height {
            at = toward_root(at);
        }
        let id = root_id[&at];
        subtree_of[v as usize] = Some(id);
        subtree_leaves[id as usize].push(v);
    }
    for leaves in &mut subtree_leaves {
        leaves.sort_unstable();
    }

    let label_to_index = g
        .labels
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, i as u32))
        .collect();

    WeldedTree {
        n,
        label_bits: g.label_bits,
        seed: g.seed,
        entrance: g.entrance,
        exit: g.exit,
        labels: g.labels,
        label_to_index,
        adjacency,
        columns,
        weld_class,
        subtree_of,
        subtree_leaves,
        subtree_height: height,
    }
}
