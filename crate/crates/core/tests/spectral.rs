mod common;

use common::{dopri5, max_abs, max_abs_diff, symmetric_eigenvalues};
use harmonic_chain::spectral::{
    build_matrix, dense_matrix, eigen_closed_form, forced_response_states, particle_energy_instant,
    particle_energy_of_state, total_energy, ForcedResponse,
};
use harmonic_chain::Error;
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn matrix_shape() {
    assert_eq!(dense_matrix(1, 2.0), vec![vec![4.0]]);
    let m = dense_matrix(3, 1.0);
    assert_eq!(m, vec![vec![2.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 1.0]]);
    let m = dense_matrix(9, 1.7);
    for i in 0..9 {
        for j in 0..9 {
            assert_eq!(m[i][j], m[j][i]);
        }
    }
}

#[test]
fn single_particle_eigenvalue() {
    let m = eigen_closed_form(1, 1.0f64).unwrap();
    assert!((m.eigenvalues()[0] - 1.0).abs() <= 1e-15);
    assert!((m.gvec[0][0].abs() - 1.0).abs() <= 1e-15);
}

#[test]
fn eigenvalues_follow_cosine_law() {
    for n in [1, 2, 7, 100] {
        let w1 = 1.3;
        let m = eigen_closed_form(n, w1).unwrap();
        let lam = m.eigenvalues();
        for k in 1..=n {
            let expected = 2.0 * w1 * w1 * ((PI * k as f64 / (n as f64 + 0.5)).cos() + 1.0);
            assert!((lam[k - 1] - expected).abs() <= 1e-12 * w1 * w1, "n={n} k={k}");
        }
        assert!(lam.windows(2).all(|w| w[0] > w[1]) && lam[n - 1] > 0.0);
    }
}

#[test]
fn eigenvalues_match_symmetric_solver() {
    for n in 1..=64 {
        let w1 = 0.9;
        let mut closed = eigen_closed_form(n, w1).unwrap().eigenvalues();
        closed.sort_by(f64::total_cmp);
        let oracle = symmetric_eigenvalues(&dense_matrix(n, w1));
        assert!(max_abs_diff(&closed, &oracle) <= 1e-9, "n={n}");
    }
}

#[test]
fn sign_identity_matches_normalized_h_vectors() {
    for n in [1, 2, 5, 17, 40] {
        let m = eigen_closed_form(n, 1.0).unwrap();
        let theta = PI / (n as f64 + 0.5);
        for k in 1..=n {
            let shift = (n - k) as f64 + 0.5;
            let h: Vec<f64> = (1..=n).map(|j| (j as f64 * shift * theta).sin() / (shift * theta).sin()).collect();
            let norm: f64 = h.iter().map(|v| v * v).sum();
            assert!((norm - m.norm_h[k - 1]).abs() <= 1e-10 * norm, "n={n} k={k}");
            let g: Vec<f64> = h.iter().map(|v| v / norm.sqrt()).collect();
            assert!(max_abs_diff(&g, &m.gvec[k - 1]) <= 1e-12, "n={n} k={k}");
        }
    }
}

#[test]
fn eigenvectors_are_orthonormal() {
    for n in [3, 64, 300] {
        let m = eigen_closed_form(n, 1.0).unwrap();
        for k in 0..n {
            for l in k..n {
                let dot: f64 = m.gvec[k].iter().zip(&m.gvec[l]).map(|(a, b)| a * b).sum();
                let target = if k == l { 1.0 } else { 0.0 };
                assert!((dot - target).abs() <= 1e-10, "n={n} ({k},{l}): {dot}");
            }
        }
    }
}

#[test]
fn residual_holds_at_every_size() {
    for n in [1, 2, 8, 64, 2000] {
        let w1 = 1.4;
        let m = eigen_closed_form(n, w1).unwrap();
        assert!(m.max_residual() <= 1e-9 * w1 * w1, "n={n}: {}", m.max_residual());
    }
}

fn chain_rhs(n: usize, w1: f64, c: f64, omega: f64) -> impl FnMut(f64, &[f64], &mut [f64]) {
    let v = build_matrix(n, w1);
    move |t, y, d| {
        let (q, p) = y.split_at(n);
        let vq = v.matvec(q);
        for i in 0..n {
            d[i] = p[i];
            d[n + i] = -vq[i];
        }
        d[2 * n - 1] += c * (omega * t).sin();
    }
}

fn compare_with_oracle(fr: &harmonic_chain::ForcedResponse, t_end: f64) -> f64 {
    let n = fr.n();
    let times: Vec<f64> = (1..=500).map(|i| t_end * i as f64 / 500.0).collect();
    let y0: Vec<f64> = fr.q0.iter().chain(&fr.p0).copied().collect();
    let oracle = dopri5(chain_rhs(n, fr.model.omega1, fr.c, fr.omega), &y0, &times, 1e-12, 1e-13);
    forced_response_states(fr, &times)
        .iter()
        .zip(&oracle)
        .map(|(s, y)| {
            let modal: Vec<f64> = s.q.iter().chain(&s.p).copied().collect();
            max_abs_diff(&modal, y)
        })
        .fold(0.0, f64::max)
}

#[test]
fn modal_solution_matches_ode_oracle() {
    let fr = ForcedResponse::new(eigen_closed_form(8, 1.0).unwrap(), 1.0, 3.0).unwrap();
    let err = compare_with_oracle(&fr, 50.0);
    assert!(err <= 1e-6, "{err}");
}

#[test]
fn modal_solution_with_initial_state_matches_ode_oracle() {
    let q0 = vec![0.1, -0.05, 0.02, 0.0, 0.07];
    let p0 = vec![0.0, 0.03, -0.01, 0.04, -0.02];
    let fr = ForcedResponse::with_initial(eigen_closed_form(5, 1.2).unwrap(), 0.7, 2.1, q0, p0).unwrap();
    let err = compare_with_oracle(&fr, 30.0);
    assert!(err <= 1e-6, "{err}");
}

#[test]
fn initial_state_is_reproduced() {
    let q0 = vec![0.3, -0.1, 0.2];
    let p0 = vec![0.05, 0.0, -0.4];
    let fr = ForcedResponse::with_initial(eigen_closed_form(3, 1.0).unwrap(), 1.0, 3.0, q0.clone(), p0.clone()).unwrap();
    let s = fr.state(0.0);
    assert_eq!((s.q, s.p), (q0, p0));
    let fr = ForcedResponse::new(eigen_closed_form(4, 1.0).unwrap(), 0.0, 3.0).unwrap();
    for t in [0.0, 1.0, 17.5] {
        let s = fr.state(t);
        assert!(s.q.iter().chain(&s.p).all(|&v| v == 0.0));
    }
}

#[test]
fn resonance_names_the_mode() {
    let model = eigen_closed_form(6, 1.0).unwrap();
    let nu = model.nu[2];
    match ForcedResponse::new(model, 1.0, nu) {
        Err(Error::Resonance { mode, .. }) => assert_eq!(mode, 3),
        other => panic!("expected resonance, got {other:?}"),
    }
}

proptest! {
    #![proptest_config(common::proptest_config(48))]

    #[test]
    fn trajectory_satisfies_equation_of_motion(n in 1usize..12, w1 in 0.5f64..1.5, omega in 2.0f64..5.0,
                                               c in -2.0f64..2.0, t in 0.5f64..40.0) {
        let fr = ForcedResponse::new(eigen_closed_form(n, w1).unwrap(), c, omega);
        prop_assume!(fr.is_ok());
        let fr = fr.unwrap();
        let h = 1e-4;
        let (a, b, m) = (fr.state(t - h), fr.state(t + h), fr.state(t));
        let vq = build_matrix(n, w1).matvec(&m.q);
        for i in 0..n {
            let acc = (b.q[i] - 2.0 * m.q[i] + a.q[i]) / (h * h);
            let mut expected = -vq[i];
            if i == n - 1 {
                expected += c * (omega * t).sin();
            }
            prop_assert!((acc - expected).abs() <= 1e-5, "i={i}: {acc} vs {expected}");
        }
    }

    #[test]
    fn energy_balance_along_trajectory(n in 1usize..10, w1 in 0.5f64..1.5, omega in 2.0f64..5.0,
                                       c in -2.0f64..2.0, t in 0.5f64..40.0) {
        let fr = ForcedResponse::new(eigen_closed_form(n, w1).unwrap(), c, omega);
        prop_assume!(fr.is_ok());
        let fr = fr.unwrap();
        let h = 1e-5;
        // free energy ½(p,p) + ½(q,Vq) without the drive term
        let free = |s: &harmonic_chain::ChainState| total_energy(s, w1, 0.0);
        let rate = (free(&fr.state(t + h)) - free(&fr.state(t - h))) / (2.0 * h);
        let s = fr.state(t);
        let power = c * (omega * t).sin() * s.p[n - 1];
        prop_assert!((rate - power).abs() <= 1e-6 * 1.0f64.max(power.abs()));
    }

    #[test]
    fn particle_energies_reconstruct_total(n in 1usize..12, omega in 2.0f64..5.0, c in -2.0f64..2.0, t in 0.0f64..40.0) {
        let fr = ForcedResponse::new(eigen_closed_form(n, 1.0).unwrap(), c, omega);
        prop_assume!(fr.is_ok());
        let fr = fr.unwrap();
        let s = fr.state(t);
        let drive = fr.drive(t);
        let mut sum = 0.0;
        for j in 1..=n {
            let (k, u) = particle_energy_of_state(&s, 1.0, drive, j).unwrap();
            let (ki, ui) = particle_energy_instant(&fr, t, j).unwrap();
            prop_assert!((k - ki).abs() <= 1e-12 && (u - ui).abs() <= 1e-12);
            sum += k + u;
        }
        let h = total_energy(&s, 1.0, drive);
        prop_assert!((sum - h).abs() <= 1e-12 * 1.0f64.max(h.abs()));
    }
}

#[test]
fn zero_state_has_zero_particle_energy() {
    let fr = ForcedResponse::new(eigen_closed_form(5, 1.0).unwrap(), 1.0, 3.0).unwrap();
    for j in 1..=5 {
        assert_eq!(particle_energy_instant(&fr, 0.0, j).unwrap(), (0.0, 0.0));
    }
    assert!(particle_energy_instant(&fr, 0.0, 6).is_err());
    assert!(particle_energy_instant(&fr, 0.0, 0).is_err());
}

#[test]
fn last_particle_kinetic_energy_starts_quartic() {
    let (c, omega) = (1.0f64, 3.0f64);
    let fr = ForcedResponse::new(eigen_closed_form(8, 1.0).unwrap(), c, omega).unwrap();
    let leading = c * c * omega * omega / 8.0;
    for t in [1e-2f64, 5e-3, 2e-3] {
        let (k, _) = particle_energy_instant(&fr, t, 8).unwrap();
        let ratio = k / t.powi(4);
        assert!((ratio / leading - 1.0).abs() <= 0.05 * (t / 1e-2).powi(2) + 1e-6, "t={t}: {ratio}");
    }
    let t = 1e-2;
    let times: Vec<f64> = vec![t];
    let y = dopri5(chain_rhs(8, 1.0, c, omega), &[0.0; 16], &times, 1e-13, 1e-20);
    let (k, _) = particle_energy_instant(&fr, t, 8).unwrap();
    assert!((k - 0.5 * y[0][15] * y[0][15]).abs() <= 1e-6 * k);
}

#[test]
fn batch_states_match_single_evaluations() {
    let fr = ForcedResponse::new(eigen_closed_form(6, 1.0).unwrap(), 1.0, 3.0).unwrap();
    let times = [0.0, 0.5, 3.0, 11.0];
    for (s, &t) in forced_response_states(&fr, &times).iter().zip(&times) {
        let single = fr.state(t);
        assert!(max_abs_diff(&s.q, &single.q) == 0.0 && max_abs(&s.p) == max_abs(&single.p));
        for j in 1..=6 {
            let (q, p) = fr.particle(t, j);
            assert!((q - s.q[j - 1]).abs() <= 1e-14 && (p - s.p[j - 1]).abs() <= 1e-14);
        }
    }
}
