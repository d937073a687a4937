//! Sparse-amplitude simulation of circuits on the graph's vertex labels and
//! on the address tree.
//!
//! States are finite maps from basis configurations (register strings plus
//! workspace bits) to complex amplitudes, ordered canonically so iteration,
//! sampling, and merging are deterministic. Oracle gates enforce their
//! preconditions per configuration: a branch whose output register holds
//! neither zero nor the queried neighbor either aborts the run (strict
//! vertex-space semantics) or is left untouched, which is what the inline
//! checking gadget compiles to; a branch whose rewrite would disconnect the
//! stored labels from the entrance is likewise left untouched.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;

use crate::address::{Address, AddressCodec, EMPTY_STRING, NOEDGE_STRING, ZERO_STRING};
use crate::circuit::{Circuit, Gate};
use crate::color::COLORS;
use crate::error::{Error, Result};
use crate::oracle::GraphView;

/// Which register model a state lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Space {
    Vertex,
    Address,
}

/// One computational basis configuration: `p` register strings plus up to
/// 64 workspace bits. The derived ordering is the canonical iteration key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisConfig {
    pub regs: Vec<u64>,
    pub work: u64,
}

impl BasisConfig {
    pub fn work_bit(&self, index: usize) -> bool {
        (self.work >> index) & 1 == 1
    }
}

/// Sparse state: configuration → amplitude, pruned below a magnitude
/// threshold. Generally sub-normalized (decomposition components are).
#[derive(Debug, Clone)]
pub struct SparseState {
    pub space: Space,
    amps: BTreeMap<BasisConfig, Complex64>,
}

impl SparseState {
    pub fn empty(space: Space) -> Self {
        SparseState { space, amps: BTreeMap::new() }
    }

    pub fn from_config(space: Space, config: BasisConfig) -> Self {
        let mut amps = BTreeMap::new();
        amps.insert(config, Complex64::new(1.0, 0.0));
        SparseState { space, amps }
    }

    pub fn support_len(&self) -> usize {
        self.amps.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisConfig, &Complex64)> {
        self.amps.iter()
    }

    pub fn amp(&self, config: &BasisConfig) -> Complex64 {
        self.amps.get(config).copied().unwrap_or_default()
    }

    pub fn add_amp(&mut self, config: BasisConfig, amp: Complex64) {
        *self.amps.entry(config).or_insert_with(|| Complex64::new(0.0, 0.0)) += amp;
    }

    pub fn norm_sq(&self) -> f64 {
        // `+ 0.0` turns the empty sum's -0.0 into plain zero
        self.amps.values().map(|a| a.norm_sqr()).sum::<f64>() + 0.0
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn prune(&mut self, threshold: f64) {
        self.amps.retain(|_, a| a.norm() > threshold);
    }

    pub fn add(&self, other: &SparseState) -> SparseState {
        debug_assert_eq!(self.space, other.space);
        let mut out = self.clone();
        for (config, amp) in &other.amps {
            out.add_amp(config.clone(), *amp);
        }
        out
    }

    pub fn sub(&self, other: &SparseState) -> SparseState {
        debug_assert_eq!(self.space, other.space);
        let mut out = self.clone();
        for (config, amp) in &other.amps {
            out.add_amp(config.clone(), -amp);
        }
        out
    }

    /// Largest amplitude difference across the union of the two supports.
    pub fn max_amp_diff(&self, other: &SparseState) -> f64 {
        let mut worst: f64 = 0.0;
        for (config, amp) in &self.amps {
            worst = worst.max((amp - other.amp(config)).norm());
        }
        for (config, amp) in &other.amps {
            if !self.amps.contains_key(config) {
                worst = worst.max(amp.norm());
            }
        }
        worst
    }

    /// Keep only configurations satisfying the predicate.
    pub fn filtered(&self, mut keep: impl FnMut(&BasisConfig) -> bool) -> SparseState {
        SparseState {
            space: self.space,
            amps: self
                .amps
                .iter()
                .filter(|(c, _)| keep(c))
                .map(|(c, a)| (c.clone(), *a))
                .collect(),
        }
    }
}

/// Simulation limits. Both are loud failure modes, never silent truncation:
/// pruning only ever drops amplitudes at numerical-noise scale, and blowing
/// the support cap is an error.
#[derive(Debug, Clone, Copy)]
pub struct SimOptions {
    pub prune_threshold: f64,
    pub support_cap: usize,
    /// Abort (instead of skipping the branch) when an oracle gate meets a
    /// vertex-space configuration violating its precondition. Full runs of
    /// supposedly compliant circuits keep this on; the state-decomposition
    /// machinery applies gates to pieces of the state where the compiled
    /// checking gadget semantics (skip) is the correct one.
    pub strict_oracle: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            prune_threshold: 1e-14,
            support_cap: 1 << 20,
            strict_oracle: true,
        }
    }
}

/// Execution context: the graph view for the vertex space, the address
/// codec for the address space.
#[derive(Clone, Copy)]
pub enum SimContext<'g> {
    Vertex(GraphView<'g>),
    Address(AddressCodec),
}

impl SimContext<'_> {
    pub fn space(&self) -> Space {
        match self {
            SimContext::Vertex(_) => Space::Vertex,
            SimContext::Address(_) => Space::Address,
        }
    }
}

/// The starting state: first register holds the entrance label (vertex
/// space) or the encoded empty address, all other registers and the
/// workspace are zero.
pub fn initial_state(ctx: &SimContext, p: u32) -> SparseState {
    let mut regs = vec![0u64; p as usize];
    regs[0] = match ctx {
        SimContext::Vertex(view) => view.entrance_label(),
        SimContext::Address(_) => EMPTY_STRING,
    };
    SparseState::from_config(ctx.space(), BasisConfig { regs, work: 0 })
}

/// Is a vertex-space configuration anchored at the entrance? Every stored
/// string must be a vertex label, zero, or the no-edge string; the entrance
/// must be stored; and every stored vertex label must be reachable from the
/// entrance walking only across stored labels.
pub fn is_rooted(config: &BasisConfig, view: &GraphView) -> bool {
    let noedge = view.noedge_label();
    let entrance = view.entrance_label();
    let mut stored = BTreeSet::new();
    for &r in &config.regs {
        if r == 0 || r == noedge {
            continue;
        }
        if view.index_of_label(r).is_none() {
            return false;
        }
        stored.insert(r);
    }
    if !stored.contains(&entrance) {
        return false;
    }
    let mut visited = BTreeSet::new();
    let mut frontier = vec![entrance];
    visited.insert(entrance);
    while let Some(v) = frontier.pop() {
        for c in COLORS {
            let u = view.eta(c, v);
            if stored.contains(&u) && visited.insert(u) {
                frontier.push(u);
            }
        }
    }
    visited.len() == stored.len()
}

/// The address-space analog, mirroring `is_rooted` through the resolution
/// map: every stored string must encode a tree label other than the invalid
/// address, the empty address must be stored, and every stored tuple (and
/// the no-edge string) must have its parent's encoding stored.
pub fn is_address_rooted(config: &BasisConfig, codec: &AddressCodec) -> bool {
    let stored: BTreeSet<u64> = config.regs.iter().copied().collect();
    if !stored.contains(&EMPTY_STRING) {
        return false;
    }
    for &s in &stored {
        if s == ZERO_STRING || s == EMPTY_STRING {
            continue;
        }
        let t = codec.decode(s);
        match t {
            Address::Invalid => return false,
            Address::NoEdge => {} // parent is the root, already required
            Address::Tuple(_) => {
                let parent = codec.parent(&t).expect("tuples have parents");
                let ps = codec.encode(&parent).expect("parents are labels");
                if !stored.contains(&ps) {
                    return false;
                }
            }
            Address::Zero | Address::Empty => unreachable!("handled above"),
        }
    }
    true
}

fn oracle_image(ctx: &SimContext, color: crate::color::Color, input: u64) -> Result<u64> {
    match ctx {
        SimContext::Vertex(view) => Ok(view.eta(color, input)),
        SimContext::Address(codec) => {
            let t = codec.decode(input);
            let next = codec.lambda(&t, color)?;
            Ok(codec.encode(&next).expect("lambda images are labels"))
        }
    }
}

fn rewrite_is_allowed(ctx: &SimContext, candidate: &BasisConfig) -> bool {
    match ctx {
        SimContext::Vertex(view) => is_rooted(candidate, view),
        SimContext::Address(codec) => is_address_rooted(candidate, codec),
    }
}

/// Apply one gate. Linear over the input state; accepts sub-normalized
/// states so decompositions can push components through gates.
pub fn apply_gate(
    state: &SparseState,
    gate: &Gate,
    gate_index: usize,
    ctx: &SimContext,
    opts: &SimOptions,
) -> Result<SparseState> {
    debug_assert_eq!(state.space, ctx.space());
    let mut out = SparseState::empty(state.space);
    for (config, &amp) in state.iter() {
        match gate {
            Gate::Oracle { color, control, input, output } => {
                let image = oracle_image(ctx, *color, config.regs[*input])?;
                let held = config.regs[*output];
                let compliant = held == 0 || held == image;
                // The promise quantifies over every supported configuration,
                // whether or not the control fires on it.
                if !compliant && opts.strict_oracle && state.space == Space::Vertex {
                    return Err(Error::GenuinenessViolation {
                        gate: gate_index,
                        found: held,
                        expected: image,
                    });
                }
                if !config.work_bit(*control) || !compliant {
                    out.add_amp(config.clone(), amp);
                    continue;
                }
                let mut next = config.clone();
                next.regs[*output] ^= image;
                if rewrite_is_allowed(ctx, &next) {
                    out.add_amp(next, amp);
                } else {
                    out.add_amp(config.clone(), amp);
                }
            }
            Gate::SwapRot { theta, control, a, b } => {
                if !config.work_bit(*control) {
                    out.add_amp(config.clone(), amp);
                    continue;
                }
                let (cos, sin) = (theta.cos(), theta.sin());
                let mut swapped = config.clone();
                swapped.regs.swap(*a, *b);
                out.add_amp(config.clone(), amp * cos);
                out.add_amp(swapped, amp * Complex64::new(0.0, sin));
            }
            Gate::EqCheck { a, b, target } => {
                let mut next = config.clone();
                next.work ^= u64::from(config.regs[*a] == config.regs[*b]) << target;
                out.add_amp(next, amp);
            }
            Gate::NoEdgeCheck { reg, target } => {
                let noedge = match ctx {
                    SimContext::Vertex(view) => view.noedge_label(),
                    SimContext::Address(_) => NOEDGE_STRING,
                };
                let mut next = config.clone();
                next.work ^= u64::from(config.regs[*reg] == noedge) << target;
                out.add_amp(next, amp);
            }
            Gate::ZeroCheck { reg, target } => {
                let mut next = config.clone();
                next.work ^= u64::from(config.regs[*reg] == 0) << target;
                out.add_amp(next, amp);
            }
            Gate::Workspace1 { qubit, matrix } => {
                let m: Vec<Complex64> =
                    matrix.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
                let old = usize::from(config.work_bit(*qubit));
                for new in 0..2usize {
                    let coeff = m[new * 2 + old];
                    if coeff.norm() == 0.0 {
                        continue;
                    }
                    let mut next = config.clone();
                    next.work = (config.work & !(1 << qubit)) | ((new as u64) << qubit);
                    out.add_amp(next, amp * coeff);
                }
            }
            Gate::Workspace2 { qubits, matrix } => {
                let m: Vec<Complex64> =
                    matrix.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
                let old = (usize::from(config.work_bit(qubits[0])) << 1)
                    | usize::from(config.work_bit(qubits[1]));
                for new in 0..4usize {
                    let coeff = m[new * 4 + old];
                    if coeff.norm() == 0.0 {
                        continue;
                    }
                    let mut next = config.clone();
                    next.work = (config.work & !(1 << qubits[0]) & !(1 << qubits[1]))
                        | (((new >> 1) as u64) << qubits[0])
                        | (((new & 1) as u64) << qubits[1]);
                    out.add_amp(next, amp * coeff);
                }
            }
        }
    }
    out.prune(opts.prune_threshold);
    if out.support_len() > opts.support_cap {
        return Err(Error::SupportCap { cap: opts.support_cap, gate: gate_index });
    }
    Ok(out)
}

/// Run the first `i` gates from the initial state.
pub fn run_prefix(
    circuit: &Circuit,
    prefix: usize,
    ctx: &SimContext,
    opts: &SimOptions,
) -> Result<SparseState> {
    let mut state = initial_state(ctx, circuit.p);
    for (index, gate) in circuit.gates.iter().take(prefix).enumerate() {
        state = apply_gate(&state, gate, index, ctx, opts)?;
    }
    Ok(state)
}

/// All prefix states, index 0 (initial) through the full circuit.
pub fn run_trace(circuit: &Circuit, ctx: &SimContext, opts: &SimOptions) -> Result<Vec<SparseState>> {
    let mut states = Vec::with_capacity(circuit.gates.len() + 1);
    states.push(initial_state(ctx, circuit.p));
    for (index, gate) in circuit.gates.iter().enumerate() {
        let next = apply_gate(states.last().unwrap(), gate, index, ctx, opts)?;
        states.push(next);
    }
    Ok(states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::with_inline_oracle_checks;
    use crate::color::Color;
    use crate::fixtures::{bits, n3_reference};

    fn x_then_oracle(color: Color, p: u32) -> Circuit {
        Circuit::new(
            3,
            p,
            1,
            vec![
                Gate::pauli_x(0),
                Gate::Oracle { color, control: 0, input: 0, output: 1 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn initial_states_are_pinned() {
        let g = n3_reference();
        let view = GraphView::new(&g);
        let vctx = SimContext::Vertex(view);
        let s = initial_state(&vctx, 3);
        let (config, amp) = s.iter().next().unwrap();
        assert_eq!(config.regs, vec![g.entrance_label(), 0, 0]);
        assert_eq!(config.work, 0);
        assert_eq!(*amp, Complex64::new(1.0, 0.0));

        let codec = AddressCodec::new(3, g.missing_color()).unwrap();
        let actx = SimContext::Address(codec);
        let s = initial_state(&actx, 3);
        let (config, _) = s.iter().next().unwrap();
        assert_eq!(config.regs, vec![EMPTY_STRING, 0, 0]);
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_gate_computes_the_pinned_neighbor() {
        let g = n3_reference();
        let view = GraphView::new(&g);
        let ctx = SimContext::Vertex(view);
        let c = x_then_oracle(Color::Red, 2);
        let s = run_prefix(&c, 2, &ctx, &SimOptions::default()).unwrap();
        let (config, _) = s.iter().next().unwrap();
        assert_eq!(config.regs[1], bits("010110"));
    }

    #[test]
    fn translated_oracle_gate_walks_the_address_tree() {
        let g = n3_reference();
        let codec = AddressCodec::new(2, g.missing_color()).unwrap();
        let ctx = SimContext::Address(codec);
        let c = crate::circuit::translate_circuit(&x_then_oracle(Color::Blue, 2)).unwrap();
        let s = run_prefix(&c, 2, &ctx, &SimOptions::default()).unwrap();
        let (config, _) = s.iter().next().unwrap();
        let expected = codec.encode(&Address::tuple(&[Color::Blue])).unwrap();
        assert_eq!(config.regs, vec![EMPTY_STRING, expected]);
    }

    #[test]
    fn zero_angle_swap_is_identity() {
        let g = n3_reference();
        let ctx = SimContext::Vertex(GraphView::new(&g));
        let c = Circuit::new(
            3,
            2,
            1,
            vec![Gate::pauli_x(0), Gate::SwapRot { theta: 0.0, control: 0, a: 0, b: 1 }],
        )
        .unwrap();
        let before = run_prefix(&c, 1, &ctx, &SimOptions::default()).unwrap();
        let after = run_prefix(&c, 2, &ctx, &SimOptions::default()).unwrap();
        assert_eq!(before.max_amp_diff(&after), 0.0);
    }

    #[test]
    fn eq_check_flips_on_equal_registers() {
        let g = n3_reference();
        let ctx = SimContext::Vertex(GraphView::new(&g));
        let c = Circuit::new(3, 2, 1, vec![Gate::EqCheck { a: 0, b: 1, target: 0 }]).unwrap();
        // Registers (entrance, 0) differ, so nothing flips...
        let s = run_prefix(&c, 1, &ctx, &SimOptions::default()).unwrap();
        assert_eq!(s.iter().next().unwrap().0.work, 0);
        // ...but two zero registers are equal.
        let zeros = SparseState::from_config(
            Space::Vertex,
            BasisConfig { regs: vec![g.entrance_label(), 0, 0], work: 0 },
        );
        let c = Circuit::new(3, 3, 1, vec![Gate::EqCheck { a: 1, b: 2, target: 0 }]).unwrap();
        let s = apply_gate(&zeros, &c.gates[0], 0, &ctx, &SimOptions::default()).unwrap();
        assert_eq!(s.iter().next().unwrap().0.work, 1);
    }

    #[test]
    fn oracle_gate_is_its_own_inverse() {
        let g = n3_reference();
        let ctx = SimContext::Vertex(GraphView::new(&g));
        let gate = Gate::Oracle { color: Color::Blue, control: 0, input: 0, output: 1 };
        let mut start = initial_state(&ctx, 2);
        // set the control bit
        start = apply_gate(&start, &Gate::pauli_x(0), 0, &ctx, &SimOptions::default()).unwrap();
        let once = apply_gate(&start, &gate, 1, &ctx, &SimOptions::default()).unwrap();
        let twice = apply_gate(&once, &gate, 2, &ctx, &SimOptions::default()).unwrap();
        assert_eq!(start.max_amp_diff(&twice), 0.0);
        assert!(once.max_amp_diff(&twice) > 0.5);
    }

    #[test]
    fn strict_oracle_rejects_non_compliant_branches() {
        let g = n3_reference();
        let ctx = SimContext::Vertex(GraphView::new(&g));
        let c = Circuit::new(
            3,
            3,
            1,
            vec![
                Gate::pauli_x(0),
                Gate::Oracle { color: Color::Red, control: 0, input: 0, output: 1 },
                // green at the entrance answers no-edge, which is neither 0
                // nor the register's current content
                Gate::Oracle { color: Color::Green, control: 0, input: 0, output: 1 },
            ],
        )
        .unwrap();
        let err = run_prefix(&c, 3, &ctx, &SimOptions::default()).unwrap_err();
        assert!(matches!(err, Error::GenuinenessViolation { gate: 2, .. }));
        // With checked semantics the branch is skipped instead.
        let lax = SimOptions { strict_oracle: false, ..Default::default() };
        let s = run_prefix(&c, 3, &ctx, &lax).unwrap();
        assert_eq!(s.iter().next().unwrap().0.regs[1], bits("010110"));
    }

    #[test]
    fn rootedness_examples() {
        let g = n3_reference();
        let view = GraphView::new(&g);
        let ent = g.entrance_label();
        let labels = ["010110", "101000", "101001", "110100", "101010", "101111"];
        let mut regs: Vec<u64> = labels.iter().map(|s| bits(s)).collect();
        regs.push(ent);
        regs.push(0);
        assert!(is_rooted(&BasisConfig { regs: regs.clone(), work: 0 }, &view));
        // Dropping the red child of the entrance strands two labels.
        let broken: Vec<u64> = regs.iter().copied().filter(|&l| l != bits("010110")).collect();
        assert!(!is_rooted(&BasisConfig { regs: broken, work: 0 }, &view));
        // Zeros plus the entrance alone are rooted.
        assert!(is_rooted(&BasisConfig { regs: vec![0, ent, 0], work: 3 }, &view));
        // Without the entrance nothing is.
        assert!(!is_rooted(&BasisConfig { regs: vec![0, bits("010110")], work: 0 }, &view));
    }

    #[test]
    fn address_rootedness_examples() {
        let codec = AddressCodec::new(4, Color::Green).unwrap();
        let enc = |colors: &[Color]| codec.encode(&Address::tuple(colors)).unwrap();
        let rb = enc(&[Color::Red, Color::Blue]);
        let r = enc(&[Color::Red]);
        assert!(is_address_rooted(
            &BasisConfig { regs: vec![EMPTY_STRING, r, rb, 0], work: 0 },
            &codec
        ));
        // Parent missing.
        assert!(!is_address_rooted(
            &BasisConfig { regs: vec![EMPTY_STRING, rb, 0, 0], work: 0 },
            &codec
        ));
        // Empty address must be present.
        assert!(!is_address_rooted(&BasisConfig { regs: vec![0, 0], work: 0 }, &codec));
        // The invalid string is never rooted.
        assert!(!is_address_rooted(
            &BasisConfig { regs: vec![EMPTY_STRING, crate::address::INVALID_STRING], work: 0 },
            &codec
        ));
    }

    #[test]
    fn uncompute_that_would_disconnect_is_skipped() {
        let g = n3_reference();
        let ctx = SimContext::Vertex(GraphView::new(&g));
        let opts = SimOptions::default();
        // Build entrance -> blue child -> green grandchild, then try to
        // uncompute the middle label.
        let blue_child = bits("101000");
        let grandchild = bits("110100");
        let config = BasisConfig { regs: vec![g.entrance_label(), blue_child, grandchild], work: 1 };
        let state = SparseState::from_config(Space::Vertex, config.clone());
        let uncompute_middle = Gate::Oracle { color: Color::Blue, control: 0, input: 0, output: 1 };
        let s = apply_gate(&state, &uncompute_middle, 0, &ctx, &opts).unwrap();
        // Removing the blue child would strand the grandchild: skipped.
        assert_eq!(s.iter().next().unwrap().0, &config);
        // Uncomputing the leaf first is allowed.
        let uncompute_leaf = Gate::Oracle { color: Color::Green, control: 0, input: 1, output: 2 };
        let s = apply_gate(&state, &uncompute_leaf, 0, &ctx, &opts).unwrap();
        assert_eq!(s.iter().next().unwrap().0.regs, vec![g.entrance_label(), blue_child, 0]);
    }

    #[test]
    fn support_cap_is_enforced() {
        let g = n3_reference();
        let ctx = SimContext::Vertex(GraphView::new(&g));
        let c = Circuit::new(
            3,
            4,
            3,
            vec![Gate::hadamard(0), Gate::hadamard(1), Gate::hadamard(2)],
        )
        .unwrap();
        let opts = SimOptions { support_cap: 4, ..Default::default() };
        let err = run_prefix(&c, 3, &ctx, &opts).unwrap_err();
        assert!(matches!(err, Error::SupportCap { cap: 4, gate: 2 }));
    }

    #[test]
    fn inline_checking_gadget_preserves_compliant_runs() {
        let g = n3_reference();
        let ctx = SimContext::Vertex(GraphView::new(&g));
        let opts = SimOptions::default();
        let c = Circuit::new(
            3,
            4,
            2,
            vec![
                Gate::pauli_x(0),
                Gate::Oracle { color: Color::Red, control: 0, input: 0, output: 1 },
                Gate::SwapRot { theta: 0.7, control: 0, a: 1, b: 2 },
                Gate::Oracle { color: Color::Blue, control: 0, input: 0, output: 3 },
            ],
        )
        .unwrap();
        let plain = run_prefix(&c, c.gates.len(), &ctx, &opts).unwrap();
        let wrapped = with_inline_oracle_checks(&c).unwrap();
        let checked = run_prefix(&wrapped, wrapped.gates.len(), &ctx, &opts).unwrap();
        // Strip the ancilla register and scratch workspace bits, which end
        // the run uncomputed (ancilla zero, scratch (0,1) pattern).
        let mut stripped = SparseState::empty(Space::Vertex);
        for (config, amp) in checked.iter() {
            assert_eq!(config.regs[c.p as usize..], vec![0; wrapped.p as usize - c.p as usize][..]);
            assert_eq!(config.work >> c.workspace, 0b01);
            stripped.add_amp(
                BasisConfig {
                    regs: config.regs[..c.p as usize].to_vec(),
                    work: config.work & ((1 << c.workspace) - 1),
                },
                *amp,
            );
        }
        assert!(plain.max_amp_diff(&stripped) < 1e-12);
    }
}
