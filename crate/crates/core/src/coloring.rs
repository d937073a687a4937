//! Constructive 3-edge-coloring of bipartite graphs with maximum degree 3.
//!
//! The graph is first padded with dummy edges until it is 3-regular (as a
//! multigraph), then split into a perfect matching (found with
//! Hopcroft–Karp) and a 2-regular remainder whose cycles are even and can be
//! colored by alternation. Dummy edges are discarded at the end, leaving a
//! proper 3-coloring of the original edges.

use crate::color::Color;
use crate::error::{Error, Result};

const UNMATCHED: usize = usize::MAX;
const INF: u32 = u32::MAX;

struct Multigraph {
    /// (u, v) with u on the left side of the bipartition.
    edges: Vec<(usize, usize)>,
    /// Incident edge ids per vertex.
    incident: Vec<Vec<usize>>,
}

/// Color `edges` of a bipartite graph with `Δ ≤ 3`. `left[v]` gives the
/// bipartition side of vertex `v`; every edge must cross sides.
pub(crate) fn three_edge_coloring(
    vertex_count: usize,
    left: &[bool],
    edges: &[(u32, u32)],
) -> Result<Vec<Color>> {
    let mut degree = vec![0usize; vertex_count];
    let mut g = Multigraph {
        edges: Vec::with_capacity(edges.len() + 2),
        incident: vec![Vec::with_capacity(3); vertex_count],
    };
    for &(a, b) in edges {
        let (a, b) = (a as usize, b as usize);
        if left[a] == left[b] {
            return Err(Error::ColoringFailure(format!(
                "edge ({a}, {b}) does not cross the bipartition"
            )));
        }
        let (u, v) = if left[a] { (a, b) } else { (b, a) };
        let id = g.edges.len();
        g.edges.push((u, v));
        g.incident[u].push(id);
        g.incident[v].push(id);
        degree[u] += 1;
        degree[v] += 1;
    }
    if let Some(v) = (0..vertex_count).find(|&v| degree[v] > 3) {
        return Err(Error::ColoringFailure(format!(
            "vertex {v} has degree {} > 3",
            degree[v]
        )));
    }

    // Pad to 3-regular with dummy edges between deficient vertices.
    let real_edges = g.edges.len();
    let mut deficient_left: Vec<usize> = Vec::new();
    let mut deficient_right: Vec<usize> = Vec::new();
    for v in 0..vertex_count {
        for _ in degree[v]..3 {
            if left[v] {
                deficient_left.push(v);
            } else {
                deficient_right.push(v);
            }
        }
    }
    if deficient_left.len() != deficient_right.len() {
        return Err(Error::ColoringFailure(
            "bipartition sides have unequal total deficiency".into(),
        ));
    }
    for (&u, &v) in deficient_left.iter().zip(&deficient_right) {
        let id = g.edges.len();
        g.edges.push((u, v));
        g.incident[u].push(id);
        g.incident[v].push(id);
    }

    let matched = perfect_matching(vertex_count, &g)?;

    // The remainder is 2-regular; its cycles are even because the graph is
    // bipartite, so alternating two colors around each cycle is consistent.
    let mut colors = vec![None; g.edges.len()];
    for (id, &m) in matched.iter().enumerate() {
        if m {
            colors[id] = Some(Color::Red);
        }
    }
    let mut seen = vec![false; g.edges.len()];
    for start in 0..vertex_count {
        while let Some(&first) = g.incident[start].iter().find(|&&e| !matched[e] && !seen[e]) {
            let mut edge = first;
            let mut at = start;
            let mut color = Color::Green;
            let mut steps = 0usize;
            loop {
                seen[edge] = true;
                colors[edge] = Some(color);
                color = if color == Color::Green { Color::Blue } else { Color::Green };
                steps += 1;
                let (u, v) = g.edges[edge];
                at = if u == at { v } else { u };
                let next = g.incident[at]
                    .iter()
                    .copied()
                    .find(|&e| !matched[e] && !seen[e]);
                match next {
                    Some(e) => edge = e,
                    None => break,
                }
            }
            if at != start || !steps.is_multiple_of(2) {
                return Err(Error::ColoringFailure(
                    "remainder did not decompose into even cycles".into(),
                ));
            }
        }
    }

    colors[..real_edges]
        .iter()
        .map(|c| c.ok_or_else(|| Error::ColoringFailure("uncolored edge".into())))
        .collect()
}

/// Hopcroft–Karp on the (3-regular) bipartite multigraph; returns a flag per
/// edge marking one perfect matching.
fn perfect_matching(vertex_count: usize, g: &Multigraph) -> Result<Vec<bool>> {
    let mut left_ids = Vec::new();
    let mut pos = vec![UNMATCHED; vertex_count];
    for (u, _) in &g.edges {
        if pos[*u] == UNMATCHED {
            pos[*u] = left_ids.len();
            left_ids.push(*u);
        }
    }
    let nl = left_ids.len();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(3); nl];
    for (id, &(u, v)) in g.edges.iter().enumerate() {
        adj[pos[u]].push((v, id));
    }

    let mut match_left = vec![UNMATCHED; nl]; // edge id
    let mut match_right = vec![UNMATCHED; vertex_count]; // left index
    let mut dist = vec![INF; nl];
    let mut queue = std::collections::VecDeque::new();

    loop {
        // BFS phase
        queue.clear();
        for l in 0..nl {
            if match_left[l] == UNMATCHED {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = INF;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &(r, _) in &adj[l] {
                let ml = match_right[r];
                if ml == UNMATCHED {
                    found = true;
                } else if dist[ml] == INF {
                    dist[ml] = dist[l] + 1;
                    queue.push_back(ml);
                }
            }
        }
        if !found {
            break;
        }
        // DFS phase
        for l in 0..nl {
            if match_left[l] == UNMATCHED {
                augment(l, &adj, &mut match_left, &mut match_right, &mut dist);
            }
        }
    }

    if match_left.contains(&UNMATCHED) {
        return Err(Error::ColoringFailure(
            "no perfect matching in the regularized graph".into(),
        ));
    }
    let mut flags = vec![false; g.edges.len()];
    for &e in &match_left {
        flags[e] = true;
    }
    Ok(flags)
}

fn augment(
    l: usize,
    adj: &[Vec<(usize, usize)>],
    match_left: &mut [usize],
    match_right: &mut [usize],
    dist: &mut [u32],
) -> bool {
    for i in 0..adj[l].len() {
        let (r, edge) = adj[l][i];
        let ml = match_right[r];
        if ml == UNMATCHED
            || (dist[ml] == dist[l].wrapping_add(1)
                && augment(ml, adj, match_left, match_right, dist))
        {
            match_left[l] = edge;
            match_right[r] = l;
            return true;
        }
    }
    dist[l] = INF;
    false
}
