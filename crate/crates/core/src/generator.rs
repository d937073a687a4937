//! Random circuits that stay within the oracle-gate preconditions.
//!
//! The generator grows a circuit one gate at a time while tracking the live
//! vertex-space state, so every oracle gate it emits is compliant on every
//! supported branch by construction. This is a test and experiment utility:
//! the circuits are not meant to compute anything, only to exercise the
//! simulator and the state decomposition on nontrivial superpositions.

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate};
use crate::color::{Color, COLORS};
use crate::error::Result;
use crate::oracle::GraphView;
use crate::rng::RngStream;
use crate::simulator::{apply_gate, initial_state, SimContext, SimOptions, SparseState};

/// A random circuit of exactly `p` gates on `p` registers whose oracle gates
/// satisfy their precondition on every branch of the state they meet.
/// Requires `workspace ≥ 2`. Deterministic in the stream.
pub fn random_rooted_circuit(
    view: &GraphView,
    p: u32,
    workspace: u32,
    rng: &mut RngStream,
) -> Result<Circuit> {
    assert!(workspace >= 2, "generator needs at least two workspace qubits");
    let ctx = SimContext::Vertex(*view);
    let opts = SimOptions { strict_oracle: false, ..Default::default() };
    let mut gates: Vec<Gate> = Vec::with_capacity(p as usize);
    let mut state = initial_state(&ctx, p);

    // Drive a control bit first so oracle gates can fire.
    let first = if rng.next_bool(0.5) {
        Gate::pauli_x(0)
    } else {
        Gate::hadamard(0)
    };
    state = apply_gate(&state, &first, 0, &ctx, &opts)?;
    gates.push(first);

    while gates.len() < p as usize {
        let roll = rng.next_f64();
        let gate = if roll < 0.45 {
            match pick_oracle_gate(&state, view, p, workspace, rng) {
                Some(g) => g,
                None => random_workspace1(workspace, rng),
            }
        } else if roll < 0.65 {
            let theta = *rng.choose(&[
                std::f64::consts::FRAC_PI_2,
                std::f64::consts::FRAC_PI_4,
                0.3,
                1.1,
            ]);
            let a = rng.next_usize(p as usize);
            let mut b = rng.next_usize(p as usize);
            while b == a {
                b = rng.next_usize(p as usize);
            }
            Gate::SwapRot { theta, control: rng.next_usize(workspace as usize), a, b }
        } else if roll < 0.80 {
            random_workspace1(workspace, rng)
        } else if roll < 0.88 {
            let a = rng.next_usize(p as usize);
            let mut b = rng.next_usize(p as usize);
            while b == a {
                b = rng.next_usize(p as usize);
            }
            Gate::EqCheck { a, b, target: rng.next_usize(workspace as usize) }
        } else if roll < 0.94 {
            Gate::ZeroCheck {
                reg: rng.next_usize(p as usize),
                target: rng.next_usize(workspace as usize),
            }
        } else {
            Gate::NoEdgeCheck {
                reg: rng.next_usize(p as usize),
                target: rng.next_usize(workspace as usize),
            }
        };
        state = apply_gate(&state, &gate, gates.len(), &ctx, &opts)?;
        gates.push(gate);
    }
    Circuit::new(view.graph().n(), p, workspace, gates)
}

fn random_workspace1(workspace: u32, rng: &mut RngStream) -> Gate {
    let qubit = rng.next_usize(workspace as usize);
    match rng.next_usize(3) {
        0 => Gate::pauli_x(qubit),
        1 => Gate::hadamard(qubit),
        _ => {
            let theta = rng.next_f64() * std::f64::consts::PI;
            let phi = rng.next_f64() * std::f64::consts::PI;
            let (c, s) = (theta.cos(), theta.sin());
            let e = Complex64::from_polar(1.0, phi);
            Gate::workspace1(
                qubit,
                [
                    [Complex64::new(c, 0.0), -e * s],
                    [e.conj() * s, Complex64::new(c, 0.0)],
                ],
            )
        }
    }
}

/// Find an oracle gate that is compliant on every supported configuration
/// and whose control bit is live on at least one branch.
fn pick_oracle_gate(
    state: &SparseState,
    view: &GraphView,
    p: u32,
    workspace: u32,
    rng: &mut RngStream,
) -> Option<Gate> {
    for _ in 0..60 {
        let color = COLORS[rng.next_usize(3)];
        let input = rng.next_usize(p as usize);
        let mut output = rng.next_usize(p as usize);
        while output == input {
            output = rng.next_usize(p as usize);
        }
        let control = rng.next_usize(workspace as usize);
        if oracle_candidate_ok(state, view, color, input, output, control) {
            return Some(Gate::Oracle { color, control, input, output });
        }
    }
    None
}

fn oracle_candidate_ok(
    state: &SparseState,
    view: &GraphView,
    color: Color,
    input: usize,
    output: usize,
    control: usize,
) -> bool {
    let mut fires = false;
    for (config, _) in state.iter() {
        let image = view.eta(color, config.regs[input]);
        let held = config.regs[output];
        if held != 0 && held != image {
            return false;
        }
        fires |= config.work_bit(control);
    }
    fires
}

/// A deterministic family of "deep explorer" circuits: one register chain
/// of oracle queries along a repeat-free color sequence, controls held at 1.
/// At small `n` such chains wrap through the weld and meet the exit or
/// cycles; at larger `n` the same budget stays inside one tree.
pub fn query_chain_circuit(
    view: &GraphView,
    chain_len: u32,
    seed: u64,
) -> Result<Circuit> {
    let c_star = view.graph().missing_color();
    let mut rng = RngStream::derive(seed, "query-chain", 0);
    let mut colors = Vec::with_capacity(chain_len as usize);
    let mut last: Option<Color> = None;
    for i in 0..chain_len {
        let choices: Vec<Color> = COLORS
            .into_iter()
            .filter(|&c| Some(c) != last && (i > 0 || c != c_star))
            .collect();
        let c = *rng.choose(&choices);
        colors.push(c);
        last = Some(c);
    }
    let mut gates = vec![Gate::pauli_x(0)];
    for (i, &c) in colors.iter().enumerate() {
        gates.push(Gate::Oracle { color: c, control: 0, input: i, output: i + 1 });
    }
    Circuit::new(view.graph().n(), chain_len + 1, 1, gates)
}
