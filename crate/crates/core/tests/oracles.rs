mod common;

use common::*;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nrep::hamiltonian::{hubbard, read_fcidump};
use nrep::noise::{apply_channel, ChannelKind, NoiseChannel};
use nrep::pauli::{jordan_wigner_ladder, Ladder};
use nrep::projection::{d_to_g, d_to_q, g_to_d, psd_trace_project, q_to_d, sector_trace, ProjectionKind};
use nrep::rdm::{assemble, contract, element_operator, energy, RdmElement, RdmMeasurement};
use nrep::state::{ground_state_in_sector, operator_matrix};
use nrep::{DensityMatrix, OneRdm, TwoRdm};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn jordan_wigner_ladders_match_fock_operators() {
    for n in 1..=6 {
        for k in 0..n {
            let jw = operator_matrix(&jordan_wigner_ladder(Ladder::annihilate(k)), n);
            assert!(max_abs(&(jw - annihilator(n, k))) < 1e-15, "n={n} k={k}");
            let jw = operator_matrix(&jordan_wigner_ladder(Ladder::create(k)), n);
            assert!(max_abs(&(jw - creator(n, k))) < 1e-15, "n={n} k={k}");
        }
    }
}

#[test]
fn jordan_wigner_anticommutators() {
    for n in 1..=6 {
        let dim = 1 << n;
        let a: Vec<CMat> = (0..n)
            .map(|k| operator_matrix(&jordan_wigner_ladder(Ladder::annihilate(k)), n))
            .collect();
        let id = CMat::identity(dim, dim);
        for i in 0..n {
            for j in 0..n {
                let ad = a[j].adjoint();
                let anti = &a[i] * &ad + &ad * &a[i];
                let expected = if i == j { id.clone() } else { CMat::zeros(dim, dim) };
                assert!(max_abs(&(anti - expected)) < 1e-14, "{{c{i}, c{j}†}} n={n}");
                let anti = &a[i] * &a[j] + &a[j] * &a[i];
                assert!(max_abs(&anti) < 1e-14, "{{c{i}, c{j}}} n={n}");
            }
        }
    }
}

#[test]
fn hopping_element_matches_dense_expectation() {
    let fock = Fock::new(2);
    let op = element_operator(RdmElement::One(0, 1));
    let re_m = operator_matrix(&op.real, 2);
    let im_m = operator_matrix(&op.imag, 2);
    let mut r = rng(1);
    for _ in 0..20 {
        let rho = random_density(2, 2, &mut r);
        let direct = trace_product(rho.entries(), &fock.one(0, 1));
        let re = trace_product(rho.entries(), &re_m);
        let im = trace_product(rho.entries(), &im_m);
        assert!((re.re - direct.re).abs() < 1e-12 && re.im.abs() < 1e-12);
        assert!((im.re - direct.im).abs() < 1e-12 && im.im.abs() < 1e-12);
    }
}

#[test]
fn two_body_element_matches_dense_expectation() {
    let fock = Fock::new(4);
    let mut r = rng(2);
    for el in [RdmElement::Two(0, 1, 0, 1), RdmElement::Two(0, 2, 1, 3), RdmElement::Two(1, 2, 0, 3)] {
        let RdmElement::Two(i, j, k, l) = el else { unreachable!() };
        let op = element_operator(el);
        let re_m = operator_matrix(&op.real, 4);
        let im_m = operator_matrix(&op.imag, 4);
        for _ in 0..10 {
            let rho = random_density(4, 3, &mut r);
            let direct = trace_product(rho.entries(), &fock.two(i, j, k, l));
            let v = Complex64::new(
                trace_product(rho.entries(), &re_m).re,
                trace_product(rho.entries(), &im_m).re,
            );
            assert!((v - direct).norm() < 1e-12, "{el}");
        }
    }
}

#[test]
fn assembled_rdms_match_every_direct_entry() {
    let h = read_fcidump(&data_path("h2_0.74.fcidump")).unwrap();
    let (_, psi) = ground_state_in_sector(&h.to_qubit_operator(), 4, 2).unwrap();
    let fci = DensityMatrix::from_pure(&psi);
    let fock = Fock::new(4);
    let meas = RdmMeasurement::new(4).unwrap();
    let mut r = rng(3);
    let mut states = vec![fci];
    for _ in 0..5 {
        states.push(random_density(4, 2, &mut r));
    }
    for rho in &states {
        let (d1, d2) = assemble(&meas.exact(rho), 4).unwrap();
        let (e1, e2) = direct_rdms(&fock, rho.entries());
        assert!(max_abs(&(d1.entries() - e1.entries())) < 1e-10);
        assert!(max_abs(&(d2.entries() - e2.entries())) < 1e-10);
    }
}

#[test]
fn contraction_matches_measured_one_rdm() {
    let fock = Fock::new(4);
    for label in ["0.50", "1.50"] {
        let h = read_fcidump(&data_path(&format!("h2_{label}.fcidump"))).unwrap();
        let (_, psi) = ground_state_in_sector(&h.to_qubit_operator(), 4, 2).unwrap();
        let (d1, d2) = direct_rdms(&fock, DensityMatrix::from_pure(&psi).entries());
        let c1 = contract(&d2, 2).unwrap();
        assert!(max_abs(&(c1.entries() - d1.entries())) < 1e-10);
        assert!((c1.trace() - 2.0).abs() < 1e-10);
    }
    // three electrons in six modes
    let fock = Fock::new(6);
    let mut r = rng(4);
    let psi = random_sector_state(6, 3, &mut r);
    let (d1, d2) = direct_rdms(&fock, DensityMatrix::from_pure(&psi).entries());
    let c1 = contract(&d2, 3).unwrap();
    assert!(max_abs(&(c1.entries() - d1.entries())) < 1e-10);
    assert!((d2.trace() - 6.0).abs() < 1e-10);
}

#[test]
fn fcidump_energies_match_reference_code() {
    for (label, reference) in H2_FCI {
        let h = read_fcidump(&data_path(&format!("h2_{label}.fcidump"))).unwrap();
        let (e, _) = ground_state_in_sector(&h.to_qubit_operator(), 4, 2).unwrap();
        assert!((e - reference).abs() < 1e-9, "{label}: {e} vs {reference}");
    }
    let h = read_fcidump(&data_path("lih_1.60.fcidump")).unwrap();
    let (e, _) = ground_state_in_sector(&h.to_qubit_operator(), 12, 4).unwrap();
    assert!((e - LIH_FCI).abs() < 1e-9, "LiH: {e} vs {LIH_FCI}");
}

#[test]
fn qubit_image_spectrum_matches_fock_hamiltonian() {
    let fock = Fock::new(4);
    let systems = vec![
        read_fcidump(&data_path("h2_0.74.fcidump")).unwrap(),
        read_fcidump(&data_path("h2_2.00.fcidump")).unwrap(),
        hubbard(2, 1.0, 3.0, 2).unwrap(),
    ];
    for h in systems {
        let direct = spectrum(&fock.hamiltonian(&h));
        let image = spectrum(&operator_matrix(&h.to_qubit_operator(), 4));
        for (a, b) in direct.iter().zip(&image) {
            assert!((a - b).abs() < 1e-10);
        }
        let (e, _) = ground_state_in_sector(&h.to_qubit_operator(), 4, 2).unwrap();
        assert!((e - sector_spectrum(&fock.hamiltonian(&h), 2)[0]).abs() < 1e-10);
    }
}

#[test]
fn fci_rdms_reproduce_fci_energy() {
    let mut systems: Vec<_> = H2_FCI
        .iter()
        .map(|(l, _)| read_fcidump(&data_path(&format!("h2_{l}.fcidump"))).unwrap())
        .collect();
    systems.push(hubbard(2, 1.0, 0.0, 2).unwrap());
    systems.push(hubbard(2, 1.0, 4.0, 2).unwrap());
    systems.push(hubbard(4, 1.0, 4.0, 4).unwrap());
    for h in systems {
        let n = h.n_spin_orbitals();
        let (e, psi) = ground_state_in_sector(&h.to_qubit_operator(), n, h.n_electrons()).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        let (d1, d2) = assemble(&RdmMeasurement::new(n).unwrap().exact(&rho), n).unwrap();
        assert!((energy(&h, &d1, &d2).unwrap() - e).abs() < 1e-9);
    }
    let h = hubbard(2, 1.0, 0.0, 2).unwrap();
    let (e, _) = ground_state_in_sector(&h.to_qubit_operator(), 4, 2).unwrap();
    assert!((e + 2.0).abs() < 1e-12);
    let zero1 = OneRdm::zeros(4);
    let zero2 = TwoRdm::zeros(4);
    let h2 = read_fcidump(&data_path("h2_0.74.fcidump")).unwrap();
    assert_eq!(energy(&h2, &zero1, &zero2).unwrap(), h2.nuclear_repulsion());
}

#[test]
fn hubbard_limits() {
    let fock = Fock::new(4);
    let atomic = hubbard(2, 0.0, 5.0, 2).unwrap();
    assert!(sector_spectrum(&fock.hamiltonian(&atomic), 2)[0].abs() < 1e-12);
    let mut last = f64::NEG_INFINITY;
    for u in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0] {
        let h = hubbard(2, 1.0, u, 2).unwrap();
        let e = sector_spectrum(&fock.hamiltonian(&h), 2)[0];
        // two-site closed form (U - sqrt(U² + 16t²)) / 2
        assert!((e - 0.5 * (u - (u * u + 16.0f64).sqrt())).abs() < 1e-10);
        assert!(e >= last - 1e-12);
        last = e;
    }
}

#[test]
fn sector_maps_match_direct_expectations() {
    let n = 4;
    let fock = Fock::new(n);
    let mut r = rng(5);
    for trial in 0..20 {
        // alternate between general and fixed-particle-number states
        let rho = if trial % 2 == 0 {
            DensityMatrix::from_pure(&random_state(n, &mut r))
        } else {
            DensityMatrix::from_pure(&random_sector_state(n, 2, &mut r))
        };
        let m = rho.entries();
        let (d1, d2) = direct_rdms(&fock, m);
        let q = d_to_q(&d2, &d1).unwrap();
        let g = d_to_g(&d2, &d1).unwrap();
        let direct_q = DMatrix::from_fn(n * n, n * n, |a, b| {
            trace_product(m, &fock.two_hole(a / n, a % n, b / n, b % n))
        });
        let direct_g = DMatrix::from_fn(n * n, n * n, |a, b| {
            trace_product(m, &fock.particle_hole(a / n, a % n, b / n, b % n))
        });
        assert!(max_abs(&(q - direct_q)) < 1e-10, "Q trial {trial}");
        assert!(max_abs(&(g - direct_g)) < 1e-10, "G trial {trial}");
    }
}

#[test]
fn vacuum_sector_matrices() {
    for n in 2..=4 {
        let fock = Fock::new(n);
        let dim = 1 << n;
        let mut vac = CMat::zeros(dim, dim);
        vac[(0, 0)] = c(1.0);
        let q = d_to_q(&TwoRdm::zeros(n), &OneRdm::zeros(n)).unwrap();
        let direct_q = DMatrix::from_fn(n * n, n * n, |a, b| {
            trace_product(&vac, &fock.two_hole(a / n, a % n, b / n, b % n))
        });
        assert!(max_abs(&(q - direct_q)) < 1e-14);
    }
}

#[test]
fn sector_round_trips() {
    let n = 4;
    let fock = Fock::new(n);
    let mut r = rng(6);
    for _ in 0..10 {
        let rho = random_density(n, 2, &mut r);
        let (d1, d2) = direct_rdms(&fock, rho.entries());
        let back = q_to_d(&d_to_q(&d2, &d1).unwrap(), &d1).unwrap();
        assert!(max_abs(&(back.entries() - d2.entries())) < 1e-12);
        let back = g_to_d(&d_to_g(&d2, &d1).unwrap(), &d1).unwrap();
        assert!(max_abs(&(back.entries() - d2.entries())) < 1e-12);
    }
}

#[test]
fn sector_traces_from_exact_states() {
    let mut r = rng(7);
    for (n, particles) in [(4, 1), (4, 2), (4, 3), (6, 2), (6, 3), (6, 4)] {
        let fock = Fock::new(n);
        let rho = DensityMatrix::from_pure(&random_sector_state(n, particles, &mut r));
        let m = rho.entries();
        let (d1, d2) = direct_rdms(&fock, m);
        let tq = d_to_q(&d2, &d1).unwrap().trace().re;
        let tg = d_to_g(&d2, &d1).unwrap().trace().re;
        assert!((d2.trace() - sector_trace(ProjectionKind::D, n, particles)).abs() < 1e-10);
        assert!((tq - sector_trace(ProjectionKind::Q, n, particles)).abs() < 1e-10, "n={n} N={particles}");
        assert!((tg - sector_trace(ProjectionKind::G, n, particles)).abs() < 1e-10, "n={n} N={particles}");
    }
}

#[test]
fn single_determinant_g_is_psd() {
    let n = 4;
    let fock = Fock::new(n);
    let mut psi = CMat::zeros(1 << n, 1);
    psi[(0b0101, 0)] = c(1.0);
    let rho = &psi * psi.adjoint();
    let (d1, d2) = direct_rdms(&fock, &rho);
    let g = d_to_g(&d2, &d1).unwrap();
    let min = SymmetricEigen::new(g).eigenvalues.min();
    assert!(min > -1e-12);
}

#[test]
fn psd_trace_projection_matches_dykstra() {
    let mut r = rng(8);
    for dim in [4, 6] {
        for trial in 0..50 {
            let m = random_hermitian(dim, &mut r);
            let t: f64 = r.gen_range(0.5..3.0);
            let fast = psd_trace_project(&m, t).unwrap();
            let slow = dykstra(&m, t);
            let err = max_abs(&(&fast - &slow));
            assert!(err < 1e-8, "dim {dim} trial {trial}: {err}");
        }
    }
}

fn kraus(kind: ChannelKind, p: f64) -> Vec<CMat> {
    let m = |a: [f64; 4]| CMat::from_row_slice(2, 2, &a.map(c));
    let x = m([0.0, 1.0, 1.0, 0.0]);
    let z = m([1.0, 0.0, 0.0, -1.0]);
    let y = CMat::from_row_slice(2, 2, &[c(0.0), Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), c(0.0)]);
    let id = CMat::identity(2, 2);
    match kind {
        ChannelKind::Damping => vec![
            m([1.0, 0.0, 0.0, (1.0 - p).sqrt()]),
            m([0.0, p.sqrt(), 0.0, 0.0]),
        ],
        ChannelKind::Dephasing => vec![id * c((1.0 - p).sqrt()), z * c(p.sqrt())],
        ChannelKind::Depolarizing => {
            let s = c((p / 3.0).sqrt());
            vec![id * c((1.0 - p).sqrt()), x * s, y * s, z * s]
        }
    }
}

#[test]
fn channels_match_kraus_maps() {
    let n = 3;
    let mut r = rng(9);
    for kind in ChannelKind::ALL {
        for rate in [0.01, 0.3, 2.0] {
            let ch = NoiseChannel::new(kind, rate).unwrap();
            let ops = kraus(kind, ch.probability());
            for _ in 0..3 {
                let rho = random_density(n, 3, &mut r);
                let mut expected = rho.entries().clone();
                for q in 0..n {
                    let mut next = CMat::zeros(1 << n, 1 << n);
                    for k in &ops {
                        let e = embed(k, q, n);
                        next += &e * &expected * e.adjoint();
                    }
                    expected = next;
                }
                let got = apply_channel(&rho, &ch);
                assert!(max_abs(&(got.entries() - expected)) < 1e-14, "{kind} rate {rate}");
            }
        }
    }
}
