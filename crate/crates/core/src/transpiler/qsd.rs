//! Recursive quantum Shannon decomposition into CX and one-qubit gates.

use crate::circuit::{named_matrix, Gate};
use crate::error::{Error, Result};
use crate::tensor::{max_abs, thin_svd, CMatrix, C64};

/// Largest gate [`decompose_gate`] accepts.
pub const MAX_DECOMPOSE_QUBITS: usize = 8;

#[derive(Clone, Copy)]
enum Axis {
    Y,
    Z,
}

/// Rewrites `g` as CX plus one-qubit gates (up to global phase).
pub fn decompose_gate(g: &Gate) -> Result<Vec<Gate>> {
    let k = g.arity();
    if !(1..=MAX_DECOMPOSE_QUBITS).contains(&k) {
        return Err(Error::Capacity(format!(
            "cannot decompose a {k}-qubit gate (limit {MAX_DECOMPOSE_QUBITS})"
        )));
    }
    if k == 2 {
        if g.is_named("cx") || is_cx(g.unitary()) {
            return Ok(vec![Gate::cx(g.qubits()[0], g.qubits()[1])]);
        }
        if g.is_named("swap") {
            let (a, b) = (g.qubits()[0], g.qubits()[1]);
            return Ok(vec![Gate::cx(a, b), Gate::cx(b, a), Gate::cx(a, b)]);
        }
    }
    if k == 1 && g.label().is_some() {
        return Ok(vec![g.clone()]);
    }
    let mut out = Vec::new();
    shannon(g.unitary(), g.qubits(), &mut out)?;
    Ok(out)
}

fn is_cx(u: &CMatrix) -> bool {
    max_abs(&(u - named_matrix("cx", &[]).expect("cx"))) < 1e-12
}

fn shannon(u: &CMatrix, qubits: &[usize], out: &mut Vec<Gate>) -> Result<()> {
    if qubits.len() == 1 {
        out.push(Gate::u_from_matrix(qubits[0], u.clone())?);
        return Ok(());
    }
    let n = u.nrows() / 2;
    let (l0, l1, theta, r0, r1) = cosine_sine(u, n);
    let target = qubits[0];
    let rest = &qubits[1..];
    // circuit order is right to left in the factorisation
    demultiplex(&r0, &r1, target, rest, out)?;
    let angles: Vec<f64> = theta.iter().map(|t| 2.0 * t).collect();
    multiplexed_rotation(Axis::Y, &angles, target, rest, out);
    demultiplex(&l0, &l1, target, rest, out)?;
    Ok(())
}

/// `u = diag(l0, l1) · [[C, -S], [S, C]] · diag(r0, r1)` with
/// `C = diag(cos theta)`, `S = diag(sin theta)`.
fn cosine_sine(u: &CMatrix, n: usize) -> (CMatrix, CMatrix, Vec<f64>, CMatrix, CMatrix) {
    let u00 = u.view((0, 0), (n, n)).into_owned();
    let u01 = u.view((0, n), (n, n)).into_owned();
    let u10 = u.view((n, 0), (n, n)).into_owned();
    let u11 = u.view((n, n), (n, n)).into_owned();

    let (us, sv, vt) = thin_svd(&u00);
    // ascending cosines put the large-sine columns first for the QR below
    let order: Vec<usize> = (0..n).rev().collect();
    let l0 = CMatrix::from_fn(n, n, |i, j| us[(i, order[j])]);
    let r0 = CMatrix::from_fn(n, n, |i, j| vt[(order[i], j)]);
    let c: Vec<f64> = order.iter().map(|&j| sv[j].min(1.0)).collect();

    let y = &u10 * r0.adjoint();
    let qr = y.qr();
    let (mut l1, t) = (qr.q(), qr.r());
    let mut s = vec![0.0; n];
    for i in 0..n {
        let d = t[(i, i)];
        s[i] = d.norm();
        if s[i] > 0.0 {
            let ph = d / s[i];
            let mut col = l1.column_mut(i);
            col *= ph;
        }
    }
    let theta: Vec<f64> = (0..n).map(|i| s[i].atan2(c[i])).collect();
    let (cs, sn): (Vec<f64>, Vec<f64>) = theta.iter().map(|t| (t.cos(), t.sin())).unzip();

    let x = l0.adjoint() * u01;
    let z = l1.adjoint() * u11;
    let r1 = CMatrix::from_fn(n, n, |i, j| -x[(i, j)] * sn[i] + z[(i, j)] * cs[i]);
    (l0, l1, theta, r0, r1)
}

/// `diag(a, b) = (I ⊗ v) · (D ⊕ D†) · (I ⊗ w)`, emitted as `w`, a multiplexed
/// `Rz` on `target`, then `v`.
fn demultiplex(
    a: &CMatrix,
    b: &CMatrix,
    target: usize,
    rest: &[usize],
    out: &mut Vec<Gate>,
) -> Result<()> {
    let n = a.nrows();
    let ab = a * b.adjoint();
    let schur = ab.clone().schur();
    let (v, t) = schur.unpack();
    let d: Vec<C64> = (0..n).map(|i| t[(i, i)].sqrt()).collect();
    // w = D v† b
    let vb = v.adjoint() * b;
    let w = CMatrix::from_fn(n, n, |i, j| d[i] * vb[(i, j)]);
    shannon(&w, rest, out)?;
    let angles: Vec<f64> = d.iter().map(|z| -2.0 * z.arg()).collect();
    multiplexed_rotation(Axis::Z, &angles, target, rest, out);
    shannon(&v, rest, out)?;
    Ok(())
}

/// For each control basis state `i` (first control most significant), a
/// rotation by `angles[i]` on `target`.
fn multiplexed_rotation(
    axis: Axis,
    angles: &[f64],
    target: usize,
    controls: &[usize],
    out: &mut Vec<Gate>,
) {
    let rot = |theta: f64| match axis {
        Axis::Y => Gate::ry(target, theta),
        Axis::Z => Gate::rz(target, theta),
    };
    if controls.is_empty() {
        if angles[0].abs() > 1e-14 {
            out.push(rot(angles[0]));
        }
        return;
    }
    if angles.iter().all(|a| a.abs() <= 1e-14) {
        return;
    }
    let last = *controls.last().expect("non-empty");
    let head = &controls[..controls.len() - 1];
    let half = angles.len() / 2;
    let mut a = Vec::with_capacity(half);
    let mut b = Vec::with_capacity(half);
    for i in 0..half {
        let (t0, t1) = (angles[2 * i], angles[2 * i + 1]);
        a.push((t0 + t1) / 2.0);
        b.push((t0 - t1) / 2.0);
    }
    multiplexed_rotation(axis, &a, target, head, out);
    out.push(Gate::cx(last, target));
    multiplexed_rotation(axis, &b, target, head, out);
    out.push(Gate::cx(last, target));
}
