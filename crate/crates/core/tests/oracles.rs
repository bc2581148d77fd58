//! Matrix elements against first-quantized brute force and closed forms
//! computed here, independently of the assemblers.

use std::collections::HashMap;

use bfdyn::fock::{OccupationBasis, StateVector};
use bfdyn::lattice::{kinetic_energy, preset_potential, ModeSet, ModelParams, Momentum, PotentialKind, PotentialSpec};
use bfdyn::operators::{assemble_aux, assemble_bf, assemble_full, Model};
use bfdyn::C64;

fn model(n: u32, v: &str, w: &str, mass: f64) -> Model {
    let modes = ModeSet::new(1, 1).unwrap();
    Model::new(
        modes.clone(),
        preset_potential(v, PotentialKind::Pair, &modes, 1.0).unwrap(),
        preset_potential(w, PotentialKind::Tracer, &modes, 0.7).unwrap(),
        ModelParams::new(n, mass, 2).unwrap(),
    )
    .unwrap()
}

/// `H_N` on tracer x (boson modes)^N, in plane waves, restricted to the
/// retained modes:
/// `-Delta_x / 2m - sum Delta_j + N^{-1} sum_{i != j} V(y_i - y_j) + N^{-1/2} sum_j W(x - y_j)`.
struct FirstQuantized {
    tracer: Vec<Momentum>,
    bosons: Vec<Momentum>,
    n: usize,
}

impl FirstQuantized {
    fn boson_configs(&self) -> Vec<Vec<usize>> {
        let m = self.bosons.len();
        let mut out = vec![vec![]];
        for _ in 0..self.n {
            out = out
                .into_iter()
                .flat_map(|c: Vec<usize>| (0..m).map(move |k| [c.clone(), vec![k]].concat()))
                .collect();
        }
        out
    }

    fn find(&self, set: &[Momentum], p: Momentum) -> Option<usize> {
        set.iter().position(|&q| q == p)
    }

    /// `<(q', ks')| H |(q, ks)>` as a sparse map over product states.
    fn apply(&self, q: usize, ks: &[usize], v: &PotentialSpec, w: &PotentialSpec, mass: f64) -> HashMap<(usize, Vec<usize>), C64> {
        let n = self.n as f64;
        let mut out: HashMap<(usize, Vec<usize>), C64> = HashMap::new();
        let mut add = |key: (usize, Vec<usize>), c: C64| *out.entry(key).or_default() += c;
        let qm = self.tracer[q];
        let diag = 4.0 * std::f64::consts::PI.powi(2) * qm.norm_sq() as f64 / (2.0 * mass)
            + ks.iter().map(|&k| 4.0 * std::f64::consts::PI.powi(2) * self.bosons[k].norm_sq() as f64).sum::<f64>();
        add((q, ks.to_vec()), C64::new(diag, 0.0));
        // V(y_i - y_j) = sum_p V(p) e^{ip y_i} e^{-ip y_j}
        for i in 0..self.n {
            for j in 0..self.n {
                if i == j {
                    continue;
                }
                for (p, c) in v.iter() {
                    let (Some(a), Some(b)) =
                        (self.find(&self.bosons, self.bosons[ks[i]] + p), self.find(&self.bosons, self.bosons[ks[j]] - p))
                    else {
                        continue;
                    };
                    let mut t = ks.to_vec();
                    t[i] = a;
                    t[j] = b;
                    add((q, t), c / n);
                }
            }
        }
        // W(x - y_j) = sum_p W(p) e^{ip x} e^{-ip y_j}
        for j in 0..self.n {
            for (p, c) in w.iter() {
                let (Some(a), Some(b)) = (self.find(&self.tracer, qm + p), self.find(&self.bosons, self.bosons[ks[j]] - p))
                else {
                    continue;
                };
                let mut t = ks.to_vec();
                t[j] = b;
                add((a, t), c / n.sqrt());
            }
        }
        out
    }
}

fn occupation_of(ks: &[usize], modes: usize) -> Vec<u32> {
    let mut occ = vec![0; modes];
    for &k in ks {
        occ[k] += 1;
    }
    occ
}

#[test]
fn many_body_hamiltonian_matches_first_quantization() {
    for (n, v, w) in [(2, "soft", "soft"), (3, "gauss", "soft"), (2, "soft", "zero"), (3, "zero", "gauss")] {
        let mass = 1.3;
        let m = model(n, v, w, mass);
        let (joint, h) = assemble_full(&m).unwrap();
        let fq = FirstQuantized {
            tracer: m.tracer_modes().unwrap().modes().to_vec(),
            bosons: m.modes.modes().to_vec(),
            n: n as usize,
        };
        let boson = joint.boson();
        assert_eq!(boson.mode_count(), fq.bosons.len());
        let configs = fq.boson_configs();
        // symmetric state |occ> = sqrt(prod n_k! / N!) sum over its product states
        let weight = |occ: &[u32]| -> f64 {
            let f = |k: u32| (1..=k).map(|x| x as f64).product::<f64>();
            (occ.iter().map(|&k| f(k)).product::<f64>() / f(n)).sqrt()
        };
        let mut max_dev: f64 = 0.0;
        for col in 0..joint.dim() {
            let (q, b) = joint.split(col);
            let occ = boson.occupation(b);
            let members: Vec<&Vec<usize>> = configs.iter().filter(|c| occupation_of(c, fq.bosons.len()) == occ).collect();
            let mut image: HashMap<(usize, Vec<usize>), C64> = HashMap::new();
            for ks in &members {
                for (key, c) in fq.apply(q, ks, &m.v, &m.w, mass) {
                    *image.entry(key).or_default() += c * weight(&occ);
                }
            }
            // project on the symmetric basis: <occ'| = weight(occ') sum <ks'|
            let mut column = vec![C64::default(); joint.dim()];
            for ((q2, ks2), c) in image {
                let occ2 = occupation_of(&ks2, fq.bosons.len());
                let row = joint.join(q2, boson.rank(&occ2).expect("number is conserved"));
                column[row] += c * weight(&occ2);
            }
            for (row, c) in column.iter().enumerate() {
                max_dev = max_dev.max((h.matrix().get(row, col) - c).norm());
            }
        }
        assert!(max_dev < 1e-12, "N = {n}, {v}/{w}: {max_dev:e}");
    }
}

#[test]
fn auxiliary_pair_creation_element() {
    let e = Momentum::unit(0);
    for n in [2u32, 3, 5, 8] {
        let m = model(n, "soft", "zero", 1.0);
        let (joint, aux) = assemble_aux(&m).unwrap();
        let boson = joint.boson();
        let q0 = joint.tracer().index_of(Momentum::ZERO).unwrap();
        let vac = joint.join(q0, 0);
        let mut occ = vec![0; boson.mode_count()];
        occ[boson.local_mode(m.modes.index_of(e).unwrap()).unwrap()] = 1;
        occ[boson.local_mode(m.modes.index_of(-e).unwrap()).unwrap()] = 1;
        let pair = joint.join(q0, boson.rank(&occ).unwrap());
        let nf = n as f64;
        let expected = 2.0 * 0.5 * (nf * (nf - 1.0)).sqrt() / nf;
        let got = aux.matrix().get(pair, vac);
        assert!((got - C64::new(expected, 0.0)).norm() < 1e-14, "N = {n}: {got} vs {expected}");

        // the BF element replaces sqrt(N (N - 1)) / N by one
        let (bf_joint, bf) = assemble_bf(&m, 4).unwrap();
        let bf_pair = bf_joint.join(q0, bf_joint.boson().rank(&occ).unwrap());
        let got = bf.matrix().get(bf_pair, bf_joint.join(q0, 0));
        assert!((got - C64::new(1.0, 0.0)).norm() < 1e-14);
    }
}

#[test]
fn tracer_coupling_element() {
    // e^{ipx} e^{-ipy} creates a boson at -p and kicks the tracer by +p
    let m = model(4, "zero", "soft", 1.0);
    let (joint, bf) = assemble_bf(&m, 2).unwrap();
    let boson = joint.boson();
    let e = Momentum::unit(0);
    let q = joint.tracer().index_of(Momentum::ZERO).unwrap();
    let q1 = joint.tracer().index_of(e).unwrap();
    let mut occ = vec![0; boson.mode_count()];
    occ[boson.local_mode(m.modes.index_of(-e).unwrap()).unwrap()] = 1;
    let to = joint.join(q1, boson.rank(&occ).unwrap());
    let got = bf.matrix().get(to, joint.join(q, 0));
    assert!((got - m.w.coeff(e)).norm() < 1e-15, "{got}");
}

#[test]
fn free_diagonal_energies() {
    let m = model(3, "zero", "zero", 2.0);
    let (joint, h) = assemble_full(&m).unwrap();
    let boson = joint.boson();
    for i in 0..joint.dim() {
        let (q, b) = joint.split(i);
        let occ = boson.occupation(b);
        let e: f64 = occ.iter().enumerate().map(|(l, &k)| k as f64 * kinetic_energy(boson.mode_momentum(l))).sum::<f64>()
            + kinetic_energy(joint.tracer().momentum(q)) / 4.0;
        assert!((h.matrix().get(i, i).re - e).abs() < 1e-12);
    }
    let psi = StateVector::basis_state(joint.tag(), 3).unwrap();
    assert_eq!(h.apply(&psi).unwrap().amplitudes().iter().filter(|a| a.norm() > 0.0).count(), 1);
}
