//! Black-box adjacency access over vertex labels.
//!
//! `GraphView` evaluates the per-color neighbor function (optionally through
//! a color-preserving permutation of the weld) without any accounting; it is
//! what the quantum-circuit simulator uses, since gate applications are not
//! classical queries. `Oracle` wraps a view with a query meter: every call
//! to `query` costs exactly one increment, under any thread.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::color::Color;
use crate::graph::WeldedTree;
use crate::permutation::ColorPreservingPermutation;

/// The five reserved labels every experiment distinguishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpecialVertices {
    pub zero: u64,
    pub entrance: u64,
    pub exit: u64,
    pub noedge: u64,
    pub invalid: u64,
}

impl SpecialVertices {
    pub fn of(g: &WeldedTree) -> Self {
        let s = SpecialVertices {
            zero: 0,
            entrance: g.entrance_label(),
            exit: g.exit_label(),
            noedge: g.noedge_label(),
            invalid: g.invalid_label(),
        };
        let all = [s.zero, s.entrance, s.exit, s.noedge, s.invalid];
        debug_assert!(
            (0..5).all(|i| (i + 1..5).all(|j| all[i] != all[j])),
            "reserved labels must be pairwise distinct"
        );
        s
    }
}

/// Unmetered adjacency over labels, optionally through a permutation σ.
///
/// With σ present this answers for the permuted graph G^σ without
/// materializing it: a weld-to-weld edge of color c at v resolves as
/// σ(N_c(σ⁻¹(v))), everything else as in the base graph.
#[derive(Clone, Copy)]
pub struct GraphView<'g> {
    graph: &'g WeldedTree,
    sigma: Option<&'g ColorPreservingPermutation>,
}

impl<'g> GraphView<'g> {
    pub fn new(graph: &'g WeldedTree) -> Self {
        GraphView { graph, sigma: None }
    }

    pub fn permuted(graph: &'g WeldedTree, sigma: &'g ColorPreservingPermutation) -> Self {
        GraphView {
            graph,
            sigma: Some(sigma),
        }
    }

    pub fn graph(&self) -> &'g WeldedTree {
        self.graph
    }

    pub fn sigma(&self) -> Option<&'g ColorPreservingPermutation> {
        self.sigma
    }

    pub fn entrance_label(&self) -> u64 {
        self.graph.entrance_label()
    }

    pub fn exit_label(&self) -> u64 {
        self.graph.exit_label()
    }

    pub fn noedge_label(&self) -> u64 {
        self.graph.noedge_label()
    }

    pub fn invalid_label(&self) -> u64 {
        self.graph.invalid_label()
    }

    /// The color-c neighbor function over labels.
    pub fn eta(&self, c: Color, label: u64) -> u64 {
        let g = self.graph;
        let Some(v) = g.index_of_label(label) else {
            return g.invalid_label();
        };
        let neighbor = match self.sigma {
            Some(sigma) if g.is_weld_vertex(v) && c != g.weld_class(v).expect("weld class").1 => {
                // weld-to-weld edge: conjugate through σ
                let pre = sigma.inv(v);
                let u = g.neighbor(pre, c).expect("weld vertices have all colors");
                Some(sigma.map(u))
            }
            _ => g.neighbor(v, c),
        };
        match neighbor {
            Some(u) => g.label_of(u),
            None => g.noedge_label(),
        }
    }

    /// Index of the vertex a label names, if any.
    pub fn index_of_label(&self, label: u64) -> Option<u32> {
        self.graph.index_of_label(label)
    }
}

/// Metered query access. The meter is atomic so independent trial workers
/// can share an oracle; per-trial accounting uses one oracle per trial.
pub struct Oracle<'g> {
    view: GraphView<'g>,
    meter: AtomicU64,
}

impl<'g> Oracle<'g> {
    pub fn new(graph: &'g WeldedTree) -> Self {
        Oracle {
            view: GraphView::new(graph),
            meter: AtomicU64::new(0),
        }
    }

    pub fn permuted(graph: &'g WeldedTree, sigma: &'g ColorPreservingPermutation) -> Self {
        Oracle {
            view: GraphView::permuted(graph, sigma),
            meter: AtomicU64::new(0),
        }
    }

    pub fn from_view(view: GraphView<'g>) -> Self {
        Oracle {
            view,
            meter: AtomicU64::new(0),
        }
    }

    pub fn view(&self) -> GraphView<'g> {
        self.view
    }

    /// One classical query: exactly one meter increment.
    pub fn query(&self, c: Color, label: u64) -> u64 {
        self.meter.fetch_add(1, Ordering::Relaxed);
        self.view.eta(c, label)
    }

    pub fn meter(&self) -> u64 {
        self.meter.load(Ordering::Relaxed)
    }

    pub fn reset_meter(&self) {
        self.meter.store(0, Ordering::Relaxed);
    }

    pub fn entrance_label(&self) -> u64 {
        self.view.entrance_label()
    }

    /// The unique color absent at the entrance, found with exactly two
    /// queries: probe red and green, infer blue.
    pub fn missing_color(&self) -> Color {
        let ent = self.entrance_label();
        let noedge = self.view.noedge_label();
        if self.query(Color::Red, ent) == noedge {
            self.query(Color::Green, ent);
            Color::Red
        } else if self.query(Color::Green, ent) == noedge {
            Color::Green
        } else {
            Color::Blue
        }
    }
}

/// Exhaustive involution check used by tests: η_c(η_c(v)) = v whenever the
/// first answer is a real label.
#[cfg(test)]
fn involution_holds(view: &GraphView, label_bits: u32) -> bool {
    use crate::color::COLORS;
    let g = view.graph();
    (0..g.vertex_count() as u32).all(|v| {
        COLORS.into_iter().all(|c| {
            let label = g.label_of(v);
            let out = view.eta(c, label);
            if out == g.noedge_label() || out == g.invalid_label() {
                true
            } else {
                view.eta(c, out) == label && out < (1 << label_bits)
            }
        })
    })
}
