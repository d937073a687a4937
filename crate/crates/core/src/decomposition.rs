//! Splitting prefix states into good, bad, and ugly components.
//!
//! A basis configuration is bad when the subgraph its stored labels span
//! has met the exit or is within one adjacency of a cycle: the exit label is
//! stored, two registers repeat a non-reserved label, or the graph edges
//! among the distinct stored labels close a cycle. Address-space
//! configurations are classified through their resolution to labels.
//!
//! The per-step recursion keeps three components: `good` (never bad so
//! far), `bad` (the part of the evolved good component that just turned
//! bad), and `ugly` (everything that went bad at any earlier step, evolved
//! forward). Gates are applied to components with the checked (gadget)
//! oracle semantics, which is what those sub-states physically see.

use std::collections::BTreeMap;

use crate::address::AddressCodec;
use crate::circuit::Circuit;
use crate::color::COLORS;
use crate::error::Result;
use crate::oracle::GraphView;
use crate::simulator::{
    apply_gate, initial_state, is_address_rooted, is_rooted, BasisConfig, SimContext, SimOptions,
    SparseState, Space,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigClass {
    Good,
    Bad,
}

/// Classify a list of stored labels against the graph the view presents.
fn classify_labels(labels: &[u64], view: &GraphView) -> ConfigClass {
    let exit = view.exit_label();
    let noedge = view.noedge_label();
    let invalid = view.invalid_label();
    let entrance = view.entrance_label();
    let mut distinct = Vec::new();
    for &l in labels {
        if l == exit {
            return ConfigClass::Bad;
        }
        if l == 0 || l == noedge || l == invalid {
            continue;
        }
        if view.index_of_label(l).is_none() {
            continue; // not a vertex; cannot contribute edges
        }
        if l != entrance && distinct.contains(&l) {
            return ConfigClass::Bad; // repeated non-reserved label
        }
        if !distinct.contains(&l) {
            distinct.push(l);
        }
    }
    // Union-find over all graph edges among the distinct stored labels; a
    // closing edge means the span contains a cycle.
    distinct.sort_unstable();
    let index: BTreeMap<u64, usize> = distinct.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let mut parent: Vec<usize> = (0..distinct.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (i, &l) in distinct.iter().enumerate() {
        for c in COLORS {
            let u = view.eta(c, l);
            if let Some(&j) = index.get(&u) {
                if u > l {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri == rj {
                        return ConfigClass::Bad;
                    }
                    parent[ri] = rj;
                }
            }
        }
    }
    ConfigClass::Good
}

/// Classify a configuration in either space. Address configurations are
/// judged by the labels they resolve to; resolution here is analysis-side
/// and does not touch any query meter.
pub fn classify_config(
    config: &BasisConfig,
    space: Space,
    view: &GraphView,
    codec: &AddressCodec,
) -> ConfigClass {
    match space {
        Space::Vertex => classify_labels(&config.regs, view),
        Space::Address => {
            let labels = crate::address::l_map_white_box(view, codec, &config.regs);
            classify_labels(&labels, view)
        }
    }
}

fn split_by_class(
    state: &SparseState,
    view: &GraphView,
    codec: &AddressCodec,
) -> (SparseState, SparseState) {
    let good = state.filtered(|c| classify_config(c, state.space, view, codec) == ConfigClass::Good);
    let bad = state.filtered(|c| classify_config(c, state.space, view, codec) == ConfigClass::Bad);
    (good, bad)
}

/// The eight per-step states tracked by the decomposition.
#[derive(Debug, Clone)]
pub struct StepStates {
    pub phi_a: SparseState,
    pub phi_good: SparseState,
    pub phi_bad: SparseState,
    pub phi_ugly: SparseState,
    pub psi_a: SparseState,
    pub psi_good: SparseState,
    pub psi_bad: SparseState,
    pub psi_ugly: SparseState,
}

pub struct Decomposition {
    pub circuit: Circuit,
    pub codec: AddressCodec,
    /// Index 0 is the initial state; index i is after gate i.
    pub steps: Vec<StepStates>,
}

/// Run a circuit in both spaces, splitting the state at every step.
pub fn decompose_run(circuit: &Circuit, view: &GraphView, opts: &SimOptions) -> Result<Decomposition> {
    circuit.validate()?;
    let codec = AddressCodec::new(circuit.p.max(2), view.graph().missing_color())?;
    let vctx = SimContext::Vertex(*view);
    let actx = SimContext::Address(codec);
    // Components see the compiled-gadget semantics: skip, never abort.
    let lax = SimOptions { strict_oracle: false, ..*opts };

    let mut steps = Vec::with_capacity(circuit.gates.len() + 1);
    let phi0 = initial_state(&actx, circuit.p);
    let psi0 = initial_state(&vctx, circuit.p);
    steps.push(StepStates {
        phi_a: phi0.clone(),
        phi_good: phi0.clone(),
        phi_bad: SparseState::empty(Space::Address),
        phi_ugly: SparseState::empty(Space::Address),
        psi_a: psi0.clone(),
        psi_good: psi0.clone(),
        psi_bad: SparseState::empty(Space::Vertex),
        psi_ugly: SparseState::empty(Space::Vertex),
    });

    for (index, gate) in circuit.gates.iter().enumerate() {
        let prev = steps.last().unwrap();
        let phi_a = apply_gate(&prev.phi_a, gate, index, &actx, &lax)?;
        let (phi_good, phi_bad) = {
            let moved = apply_gate(&prev.phi_good, gate, index, &actx, &lax)?;
            split_by_class(&moved, view, &codec)
        };
        let mut phi_ugly = apply_gate(&prev.phi_ugly, gate, index, &actx, &lax)?.add(&phi_bad);
        phi_ugly.prune(lax.prune_threshold);

        let psi_a = apply_gate(&prev.psi_a, gate, index, &vctx, &lax)?;
        let (psi_good, psi_bad) = {
            let moved = apply_gate(&prev.psi_good, gate, index, &vctx, &lax)?;
            split_by_class(&moved, view, &codec)
        };
        let mut psi_ugly = apply_gate(&prev.psi_ugly, gate, index, &vctx, &lax)?.add(&psi_bad);
        psi_ugly.prune(lax.prune_threshold);

        steps.push(StepStates {
            phi_a,
            phi_good,
            phi_bad,
            phi_ugly,
            psi_a,
            psi_good,
            psi_bad,
            psi_ugly,
        });
    }
    Ok(Decomposition { circuit: circuit.clone(), codec, steps })
}

/// Resolve an address-space state to a vertex-space state register by
/// register, leaving workspace bits alone.
pub fn apply_l(state: &SparseState, view: &GraphView, codec: &AddressCodec) -> SparseState {
    debug_assert_eq!(state.space, Space::Address);
    let mut out = SparseState::empty(Space::Vertex);
    for (config, &amp) in state.iter() {
        let regs = crate::address::l_map_white_box(view, codec, &config.regs);
        out.add_amp(BasisConfig { regs, work: config.work }, amp);
    }
    out
}

/// Squared mass of the final state's bad part: an upper bound on the
/// probability that measuring the output reveals an entrance-to-exit path.
pub fn success_probability(d: &Decomposition, view: &GraphView) -> f64 {
    let last = d.steps.last().expect("at least the initial step");
    last.psi_a
        .iter()
        .filter(|(c, _)| classify_config(c, Space::Vertex, view, &d.codec) == ConfigClass::Bad)
        .map(|(_, a)| a.norm_sqr())
        .sum::<f64>()
        + 0.0
}

/// Numerical residuals of the per-step structural identities.
#[derive(Debug, Clone)]
pub struct StepReport {
    pub step: usize,
    pub phi_good_sq: f64,
    pub phi_bad_sq: f64,
    pub phi_ugly_sq: f64,
    pub psi_good_sq: f64,
    pub psi_bad_sq: f64,
    pub psi_ugly_sq: f64,
    /// Worst of the twelve per-step identities.
    pub identity_residual: f64,
    /// |‖ψ_good‖² + Σ_{j≤i} ‖ψ_bad‖² − 1|
    pub conservation_residual: f64,
    /// Amplitude distance between the resolved φ_good and ψ_good.
    pub transcript_residual: f64,
    /// |‖φ_good‖ − ‖ψ_good‖|
    pub norm_match_residual: f64,
    /// Support configurations violating (address-)rootedness.
    pub rootedness_violations: usize,
}

pub struct DecompositionReport {
    pub rows: Vec<StepReport>,
    pub max_identity_residual: f64,
    pub max_conservation_residual: f64,
    pub max_transcript_residual: f64,
    pub max_norm_match_residual: f64,
    pub rootedness_violations: usize,
}

fn support_overlap(a: &SparseState, b: &SparseState) -> f64 {
    let mut worst: f64 = 0.0;
    for (config, amp) in a.iter() {
        let other = b.amp(config).norm();
        if other > 0.0 {
            worst = worst.max(amp.norm().min(other));
        }
    }
    worst
}

fn misclassified_mass(
    state: &SparseState,
    want: ConfigClass,
    view: &GraphView,
    codec: &AddressCodec,
) -> f64 {
    state
        .iter()
        .filter(|(c, _)| classify_config(c, state.space, view, codec) != want)
        .map(|(_, a)| a.norm())
        .fold(0.0, f64::max)
}

/// Evaluate every per-step identity of the decomposition numerically.
pub fn verify_decomposition(
    d: &Decomposition,
    view: &GraphView,
    opts: &SimOptions,
) -> Result<DecompositionReport> {
    let codec = &d.codec;
    let vctx = SimContext::Vertex(*view);
    let actx = SimContext::Address(*codec);
    let lax = SimOptions { strict_oracle: false, ..*opts };
    let mut rows = Vec::new();
    let mut bad_mass_so_far = 0.0;

    for (i, step) in d.steps.iter().enumerate() {
        let mut identity: f64 = 0.0;

        // Projector fixed points and disjoint supports.
        identity = identity
            .max(misclassified_mass(&step.phi_bad, ConfigClass::Bad, view, codec))
            .max(misclassified_mass(&step.phi_good, ConfigClass::Good, view, codec))
            .max(misclassified_mass(&step.psi_bad, ConfigClass::Bad, view, codec))
            .max(misclassified_mass(&step.psi_good, ConfigClass::Good, view, codec))
            .max(support_overlap(&step.phi_good, &step.phi_bad))
            .max(support_overlap(&step.psi_good, &step.psi_bad));

        // good = full − ugly, in both spaces.
        identity = identity
            .max(step.phi_good.add(&step.phi_ugly).max_amp_diff(&step.phi_a))
            .max(step.psi_good.add(&step.psi_ugly).max_amp_diff(&step.psi_a));

        if i > 0 {
            let prev = &d.steps[i - 1];
            let gate = &d.circuit.gates[i - 1];
            let moved_phi_good = apply_gate(&prev.phi_good, gate, i - 1, &actx, &lax)?;
            let moved_psi_good = apply_gate(&prev.psi_good, gate, i - 1, &vctx, &lax)?;
            identity = identity
                .max(moved_phi_good.max_amp_diff(&step.phi_good.add(&step.phi_bad)))
                .max(moved_psi_good.max_amp_diff(&step.psi_good.add(&step.psi_bad)));

            // Both expansions of the bad and good projections of the full state.
            let moved_phi_ugly = apply_gate(&prev.phi_ugly, gate, i - 1, &actx, &lax)?;
            let moved_psi_ugly = apply_gate(&prev.psi_ugly, gate, i - 1, &vctx, &lax)?;
            let is_bad = |s: &SparseState| {
                s.filtered(|c| classify_config(c, s.space, view, codec) == ConfigClass::Bad)
            };
            let is_good = |s: &SparseState| {
                s.filtered(|c| classify_config(c, s.space, view, codec) == ConfigClass::Good)
            };
            identity = identity
                .max(is_bad(&step.phi_a).max_amp_diff(&step.phi_bad.add(&is_bad(&moved_phi_ugly))))
                .max(is_bad(&step.psi_a).max_amp_diff(&step.psi_bad.add(&is_bad(&moved_psi_ugly))))
                .max(
                    is_good(&step.phi_a)
                        .max_amp_diff(&step.phi_good.add(&is_good(&moved_phi_ugly))),
                )
                .max(
                    is_good(&step.psi_a)
                        .max_amp_diff(&step.psi_good.add(&is_good(&moved_psi_ugly))),
                );
        }

        bad_mass_so_far += step.psi_bad.norm_sq();
        let conservation = (step.psi_good.norm_sq() + bad_mass_so_far - 1.0).abs();

        let transcript = apply_l(&step.phi_good, view, codec).max_amp_diff(&step.psi_good);
        let norm_match = (step.phi_good.norm() - step.psi_good.norm()).abs();

        let mut rooted_violations = 0;
        for s in [&step.psi_good, &step.psi_bad] {
            rooted_violations += s.iter().filter(|(c, _)| !is_rooted(c, view)).count();
        }
        for s in [&step.phi_good, &step.phi_bad] {
            rooted_violations += s.iter().filter(|(c, _)| !is_address_rooted(c, codec)).count();
        }

        rows.push(StepReport {
            step: i,
            phi_good_sq: step.phi_good.norm_sq(),
            phi_bad_sq: step.phi_bad.norm_sq(),
            phi_ugly_sq: step.phi_ugly.norm_sq(),
            psi_good_sq: step.psi_good.norm_sq(),
            psi_bad_sq: step.psi_bad.norm_sq(),
            psi_ugly_sq: step.psi_ugly.norm_sq(),
            identity_residual: identity,
            conservation_residual: conservation,
            transcript_residual: transcript,
            norm_match_residual: norm_match,
            rootedness_violations: rooted_violations,
        });
    }

    let fold = |f: fn(&StepReport) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    Ok(DecompositionReport {
        max_identity_residual: fold(|r| r.identity_residual),
        max_conservation_residual: fold(|r| r.conservation_residual),
        max_transcript_residual: fold(|r| r.transcript_residual),
        max_norm_match_residual: fold(|r| r.norm_match_residual),
        rootedness_violations: rows.iter().map(|r| r.rootedness_violations).sum(),
        rows,
    })
}
