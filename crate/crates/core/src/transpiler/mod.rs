//! Lowering to CX + one-qubit gates, SWAP routing on coupling graphs, and
//! depth reporting.

mod graph;
mod qsd;

pub use graph::{CouplingGraph, Topology};
pub use qsd::{decompose_gate, MAX_DECOMPOSE_QUBITS};

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::circuit::{phase_aligned_distance, zyz_angles, Circuit, Gate};
use crate::error::{Error, Result};
use crate::mps::Statevector;
use crate::tensor::CMatrix;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranspileReport {
    pub two_qubit_count: usize,
    pub total_depth: usize,
    pub two_qubit_depth: usize,
    pub swap_count: usize,
}

impl TranspileReport {
    pub fn of(c: &Circuit, swap_count: usize) -> Self {
        Self {
            two_qubit_count: c.two_qubit_count(),
            total_depth: c.depth(true),
            two_qubit_depth: c.depth(false),
            swap_count,
        }
    }
}

/// A circuit on physical qubits. Layouts map logical qubit to physical qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct RoutedCircuit {
    pub circuit: Circuit,
    pub initial_layout: Vec<usize>,
    pub final_layout: Vec<usize>,
    pub swap_count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transpiled {
    pub circuit: Circuit,
    pub report: TranspileReport,
    pub initial_layout: Vec<usize>,
    pub final_layout: Vec<usize>,
}

/// Decomposes every gate of `c` into CX and one-qubit gates.
pub fn decompose_circuit(c: &Circuit) -> Result<Circuit> {
    let mut out = Circuit::new(c.n_qubits());
    for g in c.gates() {
        for part in decompose_gate(g)? {
            out.push(part)?;
        }
    }
    Ok(out)
}

/// Physical bookkeeping for [`route`]. A logical qubit has no position until
/// it is claimed; unclaimed physical qubits still hold untouched input wires,
/// and `origin` records where each wire started.
struct Router {
    dist: Vec<Vec<usize>>,
    neighbours: Vec<Vec<usize>>,
    occupant: Vec<Option<usize>>,
    origin: Vec<usize>,
    pos: Vec<Option<usize>>,
    initial: Vec<usize>,
    partner: Vec<Option<usize>>,
    out: Circuit,
    swaps: usize,
}

impl Router {
    fn claim(&mut self, q: usize, p: usize) {
        self.occupant[p] = Some(q);
        self.pos[q] = Some(p);
        self.initial[q] = self.origin[p];
    }

    fn free(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.occupant.len()).filter(|&p| self.occupant[p].is_none())
    }

    /// Claims a node for `q` next to its first two-qubit partner if that
    /// partner is placed, otherwise the most central free node.
    fn place(&mut self, q: usize) {
        if self.pos[q].is_some() {
            return;
        }
        let target = match self.partner[q].and_then(|o| self.pos[o]) {
            Some(near) => self.free().min_by_key(|&f| {
                let room = self.neighbours[f]
                    .iter()
                    .filter(|&&x| self.occupant[x].is_none())
                    .count();
                (self.dist[near][f], std::cmp::Reverse(room), f)
            }),
            None => self
                .free()
                .min_by_key(|&f| (self.free().map(|g| self.dist[f][g]).sum::<usize>(), f)),
        };
        self.claim(q, target.expect("a free node per unplaced qubit"));
    }

    fn at(&self, q: usize) -> usize {
        self.pos[q].expect("placed")
    }

    fn swap(&mut self, a: usize, b: usize) -> Result<()> {
        self.out.push(Gate::swap(a, b))?;
        self.swaps += 1;
        self.occupant.swap(a, b);
        self.origin.swap(a, b);
        for p in [a, b] {
            if let Some(q) = self.occupant[p] {
                self.pos[q] = Some(p);
            }
        }
        Ok(())
    }

    fn two_qubit(&mut self, g: &Gate) -> Result<()> {
        let (a, b) = (g.qubits()[0], g.qubits()[1]);
        self.place(a);
        self.place(b);
        let mut move_a = true;
        while self.dist[self.at(a)][self.at(b)] > 1 {
            let (mover, other) = if move_a { (a, b) } else { (b, a) };
            let (pm, po) = (self.at(mover), self.at(other));
            let next = *self.neighbours[pm]
                .iter()
                .find(|&&q| self.dist[q][po] + 1 == self.dist[pm][po])
                .expect("connected graph has a shortest path");
            self.swap(pm, next)?;
            move_a = !move_a;
        }
        let pos = &self.pos;
        self.out.push(g.remapped(|q| pos[q].expect("placed")))
    }
}

/// First two-qubit partner of every logical qubit.
fn first_partners(c: &Circuit) -> Vec<Option<usize>> {
    let mut partner = vec![None; c.n_qubits()];
    for g in c.gates().iter().filter(|g| g.arity() == 2) {
        let (a, b) = (g.qubits()[0], g.qubits()[1]);
        partner[a].get_or_insert(b);
        partner[b].get_or_insert(a);
    }
    partner
}

/// Greedy SWAP insertion. For each two-qubit gate whose operands are not
/// adjacent, the two operands take turns stepping one hop along a shortest
/// path toward each other (ties broken by smallest physical index).
///
/// Without an `initial_layout`, each logical qubit is placed when it is first
/// touched: on the free node nearest its first two-qubit partner, or on the
/// most central free node if that partner is not placed yet. Qubits the
/// circuit never touches take the remaining nodes in index order.
pub fn route(
    c: &Circuit,
    graph: &CouplingGraph,
    initial_layout: Option<&[usize]>,
) -> Result<RoutedCircuit> {
    let n_log = c.n_qubits();
    let n_phys = graph.n_physical();
    if n_log > n_phys {
        return Err(Error::Capacity(format!(
            "{n_log} logical qubits on a {n_phys}-qubit device"
        )));
    }
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    if let Some(l) = initial_layout {
        if l.len() != n_log || l.iter().any(|&p| p >= n_phys) {
            return Err(Error::InvalidArgument(
                "layout does not fit the device".into(),
            ));
        }
        let mut seen = vec![false; n_phys];
        for &p in l {
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument(format!(
                    "physical qubit {p} used twice"
                )));
            }
        }
    }
    let mut r = Router {
        dist: graph.distances(),
        neighbours: (0..n_phys).map(|q| graph.neighbours(q)).collect(),
        occupant: vec![None; n_phys],
        origin: (0..n_phys).collect(),
        pos: vec![None; n_log],
        initial: vec![0; n_log],
        partner: first_partners(c),
        out: Circuit::new(n_phys),
        swaps: 0,
    };
    if let Some(l) = initial_layout {
        for (q, &p) in l.iter().enumerate() {
            r.claim(q, p);
        }
    }
    for g in c.gates() {
        match g.arity() {
            1 => {
                let q = g.qubits()[0];
                r.place(q);
                let p = r.at(q);
                r.out.push(g.remapped(|_| p))?;
            }
            2 => r.two_qubit(g)?,
            k => {
                return Err(Error::InvalidArgument(format!(
                    "route expects gates on at most two qubits, found {k}"
                )))
            }
        }
    }
    for q in 0..n_log {
        if r.pos[q].is_none() {
            let p = r.free().next().expect("a free node per unplaced qubit");
            r.claim(q, p);
        }
    }
    Ok(RoutedCircuit {
        final_layout: r.pos.iter().map(|p| p.expect("placed")).collect(),
        initial_layout: r.initial,
        circuit: r.out,
        swap_count: r.swaps,
    })
}

fn is_identity_up_to_phase(m: &CMatrix) -> bool {
    phase_aligned_distance(m, &CMatrix::identity(m.nrows(), m.ncols())) < 1e-12
}

/// Fuses runs of one-qubit gates, drops those equal to the identity up to
/// phase, and cancels back-to-back identical CX pairs.
pub fn simplify(c: &Circuit) -> Result<Circuit> {
    let n = c.n_qubits();
    let mut out: Vec<Option<Gate>> = Vec::new();
    let mut stacks: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut pending: Vec<Option<CMatrix>> = vec![None; n];

    fn flush(
        q: usize,
        pending: &mut [Option<CMatrix>],
        out: &mut Vec<Option<Gate>>,
        stacks: &mut [Vec<usize>],
    ) -> Result<()> {
        if let Some(m) = pending[q].take() {
            if !is_identity_up_to_phase(&m) {
                out.push(Some(Gate::u_from_matrix(q, m)?));
                stacks[q].push(out.len() - 1);
            }
        }
        Ok(())
    }

    for g in c.gates() {
        if g.arity() == 1 {
            let q = g.qubits()[0];
            let prev = pending[q].take().unwrap_or_else(|| CMatrix::identity(2, 2));
            pending[q] = Some(g.unitary() * prev);
            continue;
        }
        for &q in g.qubits() {
            flush(q, &mut pending, &mut out, &mut stacks)?;
        }
        if g.is_named("cx") {
            let (a, b) = (g.qubits()[0], g.qubits()[1]);
            let top_a = stacks[a].last().copied();
            if let Some(i) = top_a.filter(|_| top_a == stacks[b].last().copied()) {
                if out[i]
                    .as_ref()
                    .is_some_and(|p| p.is_named("cx") && p.qubits() == g.qubits())
                {
                    out[i] = None;
                    stacks[a].pop();
                    stacks[b].pop();
                    continue;
                }
            }
        }
        out.push(Some(g.clone()));
        for &q in g.qubits() {
            stacks[q].push(out.len() - 1);
        }
    }
    for q in 0..n {
        flush(q, &mut pending, &mut out, &mut stacks)?;
    }
    Circuit::from_gates(n, out.into_iter().flatten().collect())
}

/// Decompose, route, expand SWAPs into CX, then simplify.
pub fn transpile_with_layout(
    c: &Circuit,
    graph: &CouplingGraph,
    initial_layout: Option<&[usize]>,
) -> Result<Transpiled> {
    let lowered = decompose_circuit(c)?;
    let routed = route(&lowered, graph, initial_layout)?;
    let expanded = decompose_circuit(&routed.circuit)?;
    let circuit = simplify(&expanded)?;
    let report = TranspileReport::of(&circuit, routed.swap_count);
    Ok(Transpiled {
        circuit,
        report,
        initial_layout: routed.initial_layout,
        final_layout: routed.final_layout,
    })
}

pub fn transpile(c: &Circuit, graph: &CouplingGraph) -> Result<(Circuit, TranspileReport)> {
    let t = transpile_with_layout(c, graph, None)?;
    Ok((t.circuit, t.report))
}

/// Operator-norm distance, after removing global phase, between `original`
/// and the action of `t` on the subspace where unused physical qubits start
/// in `|0>`, read through the initial and final layouts. Leakage out of that
/// subspace is added to the error.
pub fn equivalence_error(original: &Circuit, t: &Transpiled) -> Result<f64> {
    let n_log = original.n_qubits();
    let n_phys = t.circuit.n_qubits();
    if n_log > 10 || n_phys > 16 {
        return Err(Error::Capacity(
            "equivalence check is limited to 10 logical qubits".into(),
        ));
    }
    let place = |idx: usize, layout: &[usize]| -> usize {
        (0..n_log)
            .filter(|&q| (idx >> (n_log - 1 - q)) & 1 == 1)
            .map(|q| 1usize << (n_phys - 1 - layout[q]))
            .sum()
    };
    let d = 1usize << n_log;
    let mut got = CMatrix::zeros(d, d);
    let mut leak = 0.0f64;
    for j in 0..d {
        let input = Statevector::basis(n_phys, place(j, &t.initial_layout))?;
        let out = t.circuit.simulate(&input)?;
        let mut inside = vec![false; out.amplitudes().len()];
        for i in 0..d {
            let idx = place(i, &t.final_layout);
            got[(i, j)] = out.amplitudes()[idx];
            inside[idx] = true;
        }
        let outside: f64 = out
            .amplitudes()
            .iter()
            .zip(&inside)
            .filter(|(_, &keep)| !keep)
            .map(|(a, _)| a.norm_sqr())
            .sum();
        leak = leak.max(outside);
    }
    let want = original.to_matrix()?;
    Ok(phase_aligned_distance(&got, &want) + leak.sqrt())
}

/// Native gate sets for the final one-qubit rewrite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// CX plus arbitrary `U(theta, phi, lambda)`.
    CxU,
    /// CX, `rz`, `sx`: `U = rz(phi + pi) sx rz(theta - pi) sx rz(lambda)`.
    CxRzSx,
    /// CZ, `rz`, `rx`: CX becomes `H cz H` on the target.
    CzRzRx,
}

impl Basis {
    pub fn for_topology(t: Topology) -> Basis {
        match t {
            Topology::AllToAll => Basis::CxU,
            Topology::SquareGrid => Basis::CzRzRx,
            Topology::HeavyHex => Basis::CxRzSx,
        }
    }
}

fn one_qubit_in_basis(g: &Gate, basis: Basis, out: &mut Vec<Gate>) -> Result<()> {
    let q = g.qubits()[0];
    let (theta, phi, lam) = zyz_angles(g.unitary())?;
    match basis {
        Basis::CxU => out.push(g.clone()),
        Basis::CxRzSx => {
            out.push(Gate::rz(q, lam));
            out.push(Gate::named("sx", &[], &[q])?);
            out.push(Gate::rz(q, theta - PI));
            out.push(Gate::named("sx", &[], &[q])?);
            out.push(Gate::rz(q, phi + PI));
        }
        Basis::CzRzRx => {
            out.push(Gate::rz(q, lam));
            out.push(Gate::named("rx", &[FRAC_PI_2], &[q])?);
            out.push(Gate::rz(q, theta));
            out.push(Gate::named("rx", &[-FRAC_PI_2], &[q])?);
            out.push(Gate::rz(q, phi));
        }
    }
    Ok(())
}

/// Rewrites a CX + one-qubit circuit into `basis`. Two-qubit counts and
/// two-qubit depth are unchanged.
pub fn rewrite_basis(c: &Circuit, basis: Basis) -> Result<Circuit> {
    let mut gates = Vec::new();
    for g in c.gates() {
        match g.arity() {
            1 if g.is_named("rz") && basis != Basis::CxU => gates.push(g.clone()),
            1 => one_qubit_in_basis(g, basis, &mut gates)?,
            2 if g.is_named("cx") => match basis {
                Basis::CzRzRx => {
                    let (ctl, tgt) = (g.qubits()[0], g.qubits()[1]);
                    let h = Gate::h(tgt);
                    one_qubit_in_basis(&h, basis, &mut gates)?;
                    gates.push(Gate::named("cz", &[], &[ctl, tgt])?);
                    one_qubit_in_basis(&h, basis, &mut gates)?;
                }
                _ => gates.push(g.clone()),
            },
            k => {
                return Err(Error::InvalidArgument(format!(
                    "basis rewrite expects CX and one-qubit gates, found a {k}-qubit gate"
                )))
            }
        }
    }
    Circuit::from_gates(c.n_qubits(), gates)
}
