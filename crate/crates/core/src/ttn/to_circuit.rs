use super::{qubit_count, Ttn};
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::mps::{Mps, PHYS_DIM};
use crate::tensor::{complete_isometry, svd_matrix, CMatrix, RANK_TOLERANCE};

/// Embeds a `2^m x k` isometry as a unitary on `m` qubits whose input is read
/// from the first `log2 k` qubits (the rest start in `|0>`): column `j` of `v`
/// lands at column `j << (m - log2 k)`.
pub(crate) fn embed_isometry(v: &CMatrix) -> Result<CMatrix> {
    let rows = v.nrows();
    let m = qubit_count(rows)?;
    let b = qubit_count(v.ncols())?;
    let full = complete_isometry(v)?;
    let shift = m - b;
    let mut order = vec![usize::MAX; rows];
    for j in 0..v.ncols() {
        order[j << shift] = j;
    }
    let mut next = v.ncols();
    for slot in order.iter_mut().filter(|s| **s == usize::MAX) {
        *slot = next;
        next += 1;
    }
    Ok(CMatrix::from_fn(rows, rows, |i, c| full[(i, order[c])]))
}

fn normalized_column(v: &CMatrix) -> CMatrix {
    let n = v.norm();
    if n > 0.0 {
        v / crate::tensor::C64::new(n, 0.0)
    } else {
        let mut e = CMatrix::zeros(v.nrows(), 1);
        e[(0, 0)] = crate::tensor::C64::new(1.0, 0.0);
        e
    }
}

fn push_prep(c: &mut Circuit, qubits: &[usize], v: &CMatrix) -> Result<()> {
    if qubits.is_empty() {
        return Ok(());
    }
    let u = embed_isometry(&normalized_column(v))?;
    c.push(Gate::new_trusted(qubits.to_vec(), u)?)
}

/// Root gate first, then one layer of gates per tree layer from the root
/// toward the leaves. Nodes with a one-dimensional parent whose state is a
/// product across the two children are emitted as two separate gates.
pub fn ttn_to_circuit(t: &Ttn) -> Result<Circuit> {
    let mut c = Circuit::new(t.n_sites());
    let root = CMatrix::from_column_slice(t.root().len(), 1, t.root());
    if t.root().len() > 1 {
        push_prep(&mut c, t.root_qubits(), &root)?;
    }
    for layer in t.layers().iter().rev() {
        for node in layer {
            let v = node.isometry();
            let (da, db) = node.child_dims();
            if node.qubits.len() != qubit_count(da)? + qubit_count(db)? {
                return Err(Error::Internal(
                    "node qubits disagree with its dimensions".into(),
                ));
            }
            if node.up_dim() == 1 && da > 1 && db > 1 {
                let mat = CMatrix::from_fn(da, db, |i, j| v[(i * db + j, 0)]);
                let svd = svd_matrix(&mat, None)?;
                let rank1 = svd.s.get(1).is_none_or(|&s| s <= RANK_TOLERANCE * svd.s[0]);
                if rank1 {
                    let (qa, qb) = node.qubits.split_at(qubit_count(da)?);
                    push_prep(&mut c, qa, &svd.u.columns(0, 1).into_owned())?;
                    push_prep(&mut c, qb, &svd.vh.rows(0, 1).transpose())?;
                    continue;
                }
            }
            if node.qubits.is_empty() {
                continue;
            }
            c.push(Gate::new_trusted(node.qubits.clone(), embed_isometry(&v)?)?)?;
        }
    }
    Ok(c)
}

/// Linear-depth baseline: gate `i` maps the bond register on qubits
/// `i+1..` to site `i`'s physical qubit plus the next bond register. The
/// last site is folded into the previous gate when they share a bond.
pub fn staircase_circuit(m: &Mps) -> Result<Circuit> {
    let norm = m.norm();
    if (norm - 1.0).abs() > super::NORM_TOLERANCE {
        return Err(Error::NotNormalized(norm));
    }
    let n = m.n_sites();
    let canon = m.pad_bonds_pow2().canonicalize(0)?;
    let sites = canon.sites();
    let mut c = Circuit::new(n);
    let mut i = 0;
    while i < n {
        let t = &sites[i];
        let (l, r) = (t.shape()[0], t.shape()[2]);
        let fold = i + 2 == n && r > 1;
        // rows (p, r) or (p, p', 1) after folding; columns = left bond
        let (rows, v) = if fold {
            let u = &sites[i + 1];
            let a = CMatrix::from_row_slice(l * PHYS_DIM, r, t.data());
            let b = CMatrix::from_row_slice(r, PHYS_DIM, u.data());
            let ab = a * b; // (l, p) x p'
            let v = CMatrix::from_fn(PHYS_DIM * PHYS_DIM, l, |row, col| {
                let (p, q) = (row / PHYS_DIM, row % PHYS_DIM);
                ab[(col * PHYS_DIM + p, q)]
            });
            (PHYS_DIM * PHYS_DIM, v)
        } else {
            let v = CMatrix::from_fn(PHYS_DIM * r, l, |row, col| {
                t.data()[col * PHYS_DIM * r + row]
            });
            (PHYS_DIM * r, v)
        };
        let width = qubit_count(rows)?;
        let qubits: Vec<usize> = (i..i + width).collect();
        let v = if i == 0 { normalized_column(&v) } else { v };
        c.push(Gate::new_trusted(qubits, embed_isometry(&v)?)?)?;
        i += if fold { 2 } else { 1 };
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mps::{fidelity, random_mps};
    use crate::tensor::{isometry_deviation, C64};
    use crate::ttn::renormalize;

    fn prep_fidelity(c: &Circuit, m: &Mps) -> f64 {
        fidelity(&c.prepare().unwrap(), &m.to_statevector().unwrap()).unwrap()
    }

    #[test]
    fn embedding_places_columns() {
        let mut v = CMatrix::zeros(8, 2);
        v[(3, 0)] = C64::new(1.0, 0.0);
        v[(5, 1)] = C64::new(1.0, 0.0);
        let u = embed_isometry(&v).unwrap();
        assert!(isometry_deviation(&u) < 1e-12);
        assert_eq!(u[(3, 0)], C64::new(1.0, 0.0));
        assert_eq!(u[(5, 4)], C64::new(1.0, 0.0));
    }

    #[test]
    fn two_site_state_is_one_gate() {
        let m = random_mps(2, 2, 4).unwrap();
        let c = ttn_to_circuit(&renormalize(&m, None).unwrap()).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.gates()[0].arity(), 2);
        assert!(prep_fidelity(&c, &m) > 1.0 - 1e-12);
    }

    #[test]
    fn product_state_is_a_single_layer() {
        let m = Mps::product_state(&[1, 0, 1, 1, 0, 0, 1]).unwrap();
        let c = ttn_to_circuit(&renormalize(&m, None).unwrap()).unwrap();
        assert!(c.gates().iter().all(|g| g.arity() == 1));
        assert_eq!(c.len(), 7);
        assert_eq!(c.depth(true), 1);
        assert!(prep_fidelity(&c, &m) > 1.0 - 1e-12);
    }

    #[test]
    fn eight_site_layers_and_gate_sizes() {
        for seed in 0..5 {
            let m = random_mps(8, 2, seed).unwrap();
            let c = ttn_to_circuit(&renormalize(&m, None).unwrap()).unwrap();
            assert_eq!(c.multi_qubit_depth(), 3);
            assert!(c.max_gate_qubits() <= 4);
            assert!(prep_fidelity(&c, &m) > 1.0 - 1e-9);
        }
    }

    #[test]
    fn exact_compilation_small_sweep() {
        for n in [3, 5, 6, 9, 12] {
            for chi in [2, 4, 8] {
                let m = random_mps(n, chi, (n * chi) as u64).unwrap();
                let t = renormalize(&m, None).unwrap();
                let c = ttn_to_circuit(&t).unwrap();
                assert!(prep_fidelity(&c, &m) > 1.0 - 1e-9, "n={n} chi={chi}");
                let bound = (n as f64).log2().ceil() as usize + 1;
                assert!(c.multi_qubit_depth() <= bound);
            }
        }
    }

    #[test]
    fn single_site_uses_root_gate() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m = Mps::from_arrays(vec![(1, 1, vec![C64::new(h, 0.0), C64::new(0.0, h)])]).unwrap();
        let c = ttn_to_circuit(&renormalize(&m, None).unwrap()).unwrap();
        assert_eq!(c.len(), 1);
        assert!(prep_fidelity(&c, &m) > 1.0 - 1e-12);
    }

    #[test]
    fn staircase_examples() {
        let p = Mps::product_state(&[0, 1, 0, 1]).unwrap();
        let c = staircase_circuit(&p).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c.gates().iter().all(|g| g.arity() == 1));
        assert!(prep_fidelity(&c, &p) > 1.0 - 1e-12);

        let g = Mps::ghz(4).unwrap();
        let c = staircase_circuit(&g).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.gates().iter().all(|g| g.arity() == 2));
        assert!((prep_fidelity(&c, &g) - 1.0).abs() < 1e-12);

        let m = random_mps(10, 4, 2).unwrap();
        let c = staircase_circuit(&m).unwrap();
        assert_eq!(c.max_gate_qubits(), 3);
        assert_eq!(c.multi_qubit_depth(), 9);
        assert!(prep_fidelity(&c, &m) > 1.0 - 1e-9);
    }

    #[test]
    fn staircase_handles_odd_bonds() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1);
        let bonds = [1, 2, 3, 2, 1];
        let sites = bonds
            .windows(2)
            .map(|w| {
                let d = (0..w[0] * 2 * w[1])
                    .map(|_| C64::new(rand::Rng::random_range(&mut rng, -1.0..1.0), 0.0))
                    .collect();
                (w[0], w[1], d)
            })
            .collect();
        let (m, _) = Mps::from_arrays(sites).unwrap().normalized().unwrap();
        let c = staircase_circuit(&m).unwrap();
        assert!(prep_fidelity(&c, &m) > 1.0 - 1e-9);
        let t = ttn_to_circuit(&renormalize(&m, None).unwrap()).unwrap();
        assert!(prep_fidelity(&t, &m) > 1.0 - 1e-9);
    }

    #[test]
    fn tree_beats_staircase_depth() {
        for n in 6..=16 {
            let m = random_mps(n, 2, n as u64).unwrap();
            let tree = ttn_to_circuit(&renormalize(&m, None).unwrap()).unwrap();
            let stair = staircase_circuit(&m).unwrap();
            assert!(tree.multi_qubit_depth() < stair.multi_qubit_depth());
        }
    }
}
