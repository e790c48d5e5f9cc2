//! Independent oracles and parameter generators shared by the integration tests.

#![allow(dead_code)]

use harmonic_chain::chain_model::{Forcing, ScenarioSpec, TwoEdgeParams, Variant};
use harmonic_chain::equilibria::{closed_form, Window};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dormand-Prince 5(4) with elementary step control, stopping exactly at each
/// requested output time.
pub fn dopri5<F>(mut f: F, y0: &[f64], times: &[f64], rtol: f64, atol: f64) -> Vec<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t: f64 = 0.0;
    let mut h: f64 = 1e-3;
    let mut k = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        while t < target {
            let step = h.min(target - t);
            for s in 0..7 {
                for i in 0..n {
                    tmp[i] = y[i] + step * (0..s).map(|r| A[s][r] * k[r][i]).sum::<f64>();
                }
                f(t + C[s] * step, &tmp, &mut k[s]);
            }
            let mut err: f64 = 0.0;
            let mut next = vec![0.0; n];
            for i in 0..n {
                let hi: f64 = (0..7).map(|s| B5[s] * k[s][i]).sum();
                let lo: f64 = (0..7).map(|s| B4[s] * k[s][i]).sum();
                next[i] = y[i] + step * hi;
                let scale = atol + rtol * y[i].abs().max(next[i].abs());
                err = err.max((step * (hi - lo) / scale).abs());
            }
            if err <= 1.0 {
                t += step;
                y = next;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = step * factor;
        }
        out.push(y.clone());
    }
    out
}

/// Eigenvalues of a dense symmetric matrix, ascending.
pub fn symmetric_eigenvalues(rows: &[Vec<f64>]) -> Vec<f64> {
    let n = rows.len();
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Stationary point of a scenario's potential by dense LU on the Jacobian of
/// the (affine) force field, which is recovered column by column. The circle
/// is pinned at `x_0 = 0`.
pub fn dense_equilibrium(spec: &ScenarioSpec<f64>) -> Vec<f64> {
    let n = spec.free_len();
    let skip = usize::from(spec.variant == Variant::Circle);
    let m = n - skip;
    let zero = vec![0.0; n];
    let f0 = spec.force_of_free(&zero, 0.0);
    let mut jac = DMatrix::zeros(m, m);
    for j in 0..m {
        let mut e = zero.clone();
        e[j + skip] = 1.0;
        let fj = spec.force_of_free(&e, 0.0);
        for i in 0..m {
            jac[(i, j)] = fj[i + skip] - f0[i + skip];
        }
    }
    let rhs = -DVector::from_iterator(m, f0[skip..].iter().copied());
    let sol = jac.lu().solve(&rhs).expect("nonsingular stiffness");
    let mut x = vec![0.0; skip];
    x.extend(sol.iter().copied());
    x
}

pub fn proptest_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config { cases, failure_persistence: None, ..Default::default() }
}

/// A scenario family with its forcing parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Circle,
    PointFixedEnd,
    PointSpringEnds,
    Opposed,
    UniformFixedEnd,
    UniformSpringEnds,
    TwoEdge,
}

pub const FAMILIES: [Family; 7] = [
    Family::Circle,
    Family::PointFixedEnd,
    Family::PointSpringEnds,
    Family::Opposed,
    Family::UniformFixedEnd,
    Family::UniformSpringEnds,
    Family::TwoEdge,
];

#[derive(Debug, Clone, Copy)]
pub struct ChainParams {
    pub n: usize,
    pub length: f64,
    pub a: f64,
    pub omega0: f64,
    pub omega1: f64,
}

pub fn random_chain(rng: &mut impl Rng, max_n: usize) -> ChainParams {
    let n = rng.gen_range(2..=max_n);
    let length = rng.gen_range(1.0..20.0);
    let a = length / n as f64 * rng.gen_range(0.3..1.7);
    ChainParams { n, length, a, omega0: rng.gen_range(0.2..2.0), omega1: rng.gen_range(0.3..2.0) }
}

pub fn scenario(family: Family, p: ChainParams, f: f64) -> ScenarioSpec<f64> {
    let ChainParams { n, length, a, omega0, omega1 } = p;
    match family {
        Family::Circle => ScenarioSpec::circle(n, length, omega1, f, f / n as f64),
        Family::PointFixedEnd => ScenarioSpec::fixed_right_end(n, length, a, omega0, omega1, Forcing::PointOnFirst(f)),
        Family::PointSpringEnds => {
            ScenarioSpec::spring_both_ends(n, length, a, omega0, omega1, Forcing::PointOnFirst(f))
        }
        Family::Opposed => ScenarioSpec::spring_both_ends(n, length, a, omega0, omega1, Forcing::OpposedEnds(f)),
        Family::UniformFixedEnd => ScenarioSpec::fixed_right_end(n, length, a, omega0, omega1, Forcing::Uniform(f)),
        Family::UniformSpringEnds => {
            ScenarioSpec::spring_both_ends(n, length, a, omega0, omega1, Forcing::Uniform(f))
        }
        Family::TwoEdge => {
            let n1 = (n / 2).max(2);
            let n2 = (n - n / 2).max(2);
            let m = n1 + n2;
            ScenarioSpec::two_edge(TwoEdgeParams {
                n1,
                n2,
                m,
                length1: length,
                length2: length * 0.75,
                a0: a * m as f64 * 0.5,
                a1: a * m as f64 * 0.8,
                a2: a * m as f64 * 0.6,
                omega0,
                omega1,
                omega2: omega1 * 1.3,
            })
        }
    }
}

/// Ordering window of a family at fixed chain parameters.
pub fn window(family: Family, p: ChainParams) -> Window<f64> {
    closed_form(&scenario(family, p, 0.0)).expect("valid scenario").ordering_window
}

/// A force strictly inside the ordering window, bounded for unbounded sides.
pub fn admissible_force(rng: &mut impl Rng, family: Family, p: ChainParams) -> f64 {
    let w = window(family, p);
    let lo = w.lower_value().unwrap_or(-10.0).max(-1e3);
    let hi = w.upper_value().unwrap_or(10.0).min(1e3);
    let span = hi - lo;
    lo + span * rng.gen_range(0.02..0.98)
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
