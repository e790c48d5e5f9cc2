//! The periodically forced chain with `x_0 ≡ 0` and drive `c sin(ωt)` on the
//! last particle, in displacements `q_j = x_j - j a`:
//!
//! `q̈ = -V q + c sin(ωt) e_N`.
//!
//! `V` is tridiagonal with diagonal `2ω₁²` (last entry `ω₁²`) and
//! off-diagonal `-ω₁²`. Its eigenpairs are known in closed form: with
//! `θ = π/(N + ½)`,
//!
//! `λ_k = 2ω₁²(cos kθ + 1)`, `(g_k, e_j) = (-1)^{j-1} sin(jkθ) · 2/√(2N+1)`.

use crate::chain_model::ChainState;
use crate::error::{Error, Result};
use crate::linalg::Tridiagonal;
use crate::scalar::{accumulate, Real, Scalar};

pub const RESONANCE_TOLERANCE: f64 = 1e-9;

pub fn build_matrix<T: Scalar>(n: usize, omega1: T) -> Tridiagonal<T> {
    let w = omega1.square();
    let mut m = Tridiagonal::zeros(n);
    for i in 0..n {
        m.diag[i] = if i + 1 == n { w } else { T::two() * w };
    }
    for i in 0..n.saturating_sub(1) {
        m.lower[i] = -w;
        m.upper[i] = -w;
    }
    m
}

/// Row-major dense copy of [`build_matrix`].
pub fn dense_matrix<T: Scalar>(n: usize, omega1: T) -> Vec<Vec<T>> {
    let t = build_matrix(n, omega1);
    let mut rows = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        rows[i][i] = t.diag[i];
        if i + 1 < n {
            rows[i][i + 1] = t.upper[i];
            rows[i + 1][i] = t.lower[i];
        }
    }
    rows
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralModel<T> {
    pub n: usize,
    pub omega1: T,
    /// `ν_k = √λ_k`, strictly decreasing in `k`.
    pub nu: Vec<T>,
    /// `gvec[k][j] = (g_{k+1}, e_{j+1})`.
    pub gvec: Vec<Vec<T>>,
    /// `(g_k, e_N)`.
    pub proj_last: Vec<T>,
    /// `(h_k, h_k)` of the unnormalized eigenvectors `h_k^{(j)} = sin(j(N-k+½)θ)/sin((N-k+½)θ)`.
    pub norm_h: Vec<T>,
}

/// `sin(2π m / d)` with `m` reduced modulo `d` first.
fn sin_turn<T: Real>(m: usize, d: usize) -> T {
    let r = m % d;
    (T::TAU() * T::of_usize(r) / T::of_usize(d)).sin()
}

pub fn eigen_closed_form<T: Real>(n: usize, omega1: T) -> Result<SpectralModel<T>> {
    if n == 0 {
        return Err(Error::InvalidScenario("spectral model needs at least 1 particle".into()));
    }
    if !(omega1 > T::zero()) {
        return Err(Error::InvalidScenario("omega1 must be positive".into()));
    }
    let d = 2 * n + 1;
    let scale = T::two() / T::of_usize(d).sqrt();
    // ν_k = 2ω₁ cos(kθ/2) = 2ω₁ sin((2N+1-2k)π / (2(2N+1)))
    let nu = (1..=n)
        .map(|k| {
            let arg = T::PI() * T::of_usize(d - 2 * k) / T::of_usize(2 * d);
            T::two() * omega1 * arg.sin()
        })
        .collect();
    let gvec: Vec<Vec<T>> = (1..=n)
        .map(|k| {
            (1..=n)
                .map(|j| {
                    let s = sin_turn::<T>(j * k, d) * scale;
                    if j % 2 == 1 { s } else { -s }
                })
                .collect()
        })
        .collect();
    let proj_last = gvec.iter().map(|g| g[n - 1]).collect();
    let norm_h = (1..=n)
        .map(|k| {
            let s = sin_turn::<T>(k, d);
            T::of_usize(d) / (T::of_usize(4) * s * s)
        })
        .collect();
    Ok(SpectralModel { n, omega1, nu, gvec, proj_last, norm_h })
}

impl<T: Real> SpectralModel<T> {
    pub fn eigenvalues(&self) -> Vec<T> {
        self.nu.iter().map(|&v| v * v).collect()
    }

    /// `(g_k, v)` for every `k`.
    pub fn project(&self, v: &[T]) -> Vec<T> {
        self.gvec
            .iter()
            .map(|g| {
                let terms: Vec<T> = g.iter().zip(v).map(|(&a, &b)| a * b).collect();
                accumulate(&terms)
            })
            .collect()
    }

    /// `Σ_k coeff_k g_k`.
    pub fn synthesize(&self, coeff: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.n];
        for (g, &c) in self.gvec.iter().zip(coeff) {
            for (o, &gj) in out.iter_mut().zip(g) {
                *o = *o + c * gj;
            }
        }
        out
    }

    /// Largest `‖V g_k - λ_k g_k‖₂` over `k`.
    pub fn max_residual(&self) -> T {
        let v = build_matrix(self.n, self.omega1);
        self.gvec
            .iter()
            .zip(&self.nu)
            .map(|(g, &nu)| {
                let vg = v.matvec(g);
                let terms: Vec<T> = vg.iter().zip(g).map(|(&a, &b)| (a - nu * nu * b).square()).collect();
                accumulate(&terms).sqrt()
            })
            .fold(T::zero(), |m, r| m.max(r))
    }
}

/// Exact trajectory of the driven chain from an arbitrary initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcedResponse<T> {
    pub model: SpectralModel<T>,
    pub c: T,
    pub omega: T,
    /// `A_k = ωc/(ν_k² - ω²)`.
    pub amp: Vec<T>,
    pub q0: Vec<T>,
    pub p0: Vec<T>,
    q0_modal: Vec<T>,
    p0_modal: Vec<T>,
}

impl<T: Real> ForcedResponse<T> {
    /// Zero initial state.
    pub fn new(model: SpectralModel<T>, c: T, omega: T) -> Result<Self> {
        let n = model.n;
        Self::with_initial(model, c, omega, vec![T::zero(); n], vec![T::zero(); n])
    }

    pub fn with_initial(model: SpectralModel<T>, c: T, omega: T, q0: Vec<T>, p0: Vec<T>) -> Result<Self> {
        for v in [&q0, &p0] {
            if v.len() != model.n {
                return Err(Error::DimensionMismatch { expected: model.n, actual: v.len() });
            }
        }
        if !(omega > T::zero()) {
            return Err(Error::InvalidScenario("drive frequency must be positive".into()));
        }
        let tol = T::of_f64(RESONANCE_TOLERANCE);
        for (k, &nu) in model.nu.iter().enumerate() {
            if (omega - nu).abs() < tol * omega.max(nu) {
                return Err(Error::Resonance { mode: k + 1, omega: omega.as_f64(), nu: nu.as_f64() });
            }
        }
        let amp = model.nu.iter().map(|&nu| omega * c / (nu * nu - omega * omega)).collect();
        let q0_modal = model.project(&q0);
        let p0_modal = model.project(&p0);
        Ok(Self { model, c, omega, amp, q0, p0, q0_modal, p0_modal })
    }

    pub fn n(&self) -> usize {
        self.model.n
    }

    pub fn has_zero_initial_state(&self) -> bool {
        self.q0.iter().chain(&self.p0).all(|&v| v == T::zero())
    }

    /// Modal coordinates `(q_k, p_k)` of the state in the eigenbasis `g_k`.
    pub fn modal_state(&self, t: T) -> (Vec<T>, Vec<T>) {
        let (sw, cw) = (self.omega * t).sin_cos();
        let n = self.n();
        let mut q = Vec::with_capacity(n);
        let mut p = Vec::with_capacity(n);
        for k in 0..n {
            let nu = self.model.nu[k];
            let (sn, cn) = (nu * t).sin_cos();
            let drive = self.model.proj_last[k] * self.amp[k];
            let (a, b) = (self.q0_modal[k], self.p0_modal[k]);
            q.push(drive * (sw / self.omega - sn / nu) + a * cn + b * sn / nu);
            p.push(drive * (cw - cn) - a * nu * sn + b * cn);
        }
        (q, p)
    }

    pub fn state(&self, t: T) -> ChainState<T> {
        if t == T::zero() {
            return ChainState { q: self.q0.clone(), p: self.p0.clone(), t };
        }
        let (qm, pm) = self.modal_state(t);
        ChainState { q: self.model.synthesize(&qm), p: self.model.synthesize(&pm), t }
    }

    /// `(q_j(t), p_j(t))` for 1-based `j`, in `O(N)`.
    pub fn particle(&self, t: T, j: usize) -> (T, T) {
        let (qm, pm) = self.modal_state(t);
        self.particle_from_modal(&qm, &pm, j)
    }

    fn particle_from_modal(&self, qm: &[T], pm: &[T], j: usize) -> (T, T) {
        let col = |m: &[T]| {
            let terms: Vec<T> = self.model.gvec.iter().zip(m).map(|(g, &v)| g[j - 1] * v).collect();
            accumulate(&terms)
        };
        (col(qm), col(pm))
    }

    pub fn drive(&self, t: T) -> T {
        self.c * (self.omega * t).sin()
    }
}

pub fn forced_response_state<T: Real>(fr: &ForcedResponse<T>, t: T) -> ChainState<T> {
    fr.state(t)
}

/// States at each of `times`.
pub fn forced_response_states<T: Real>(fr: &ForcedResponse<T>, times: &[T]) -> Vec<ChainState<T>> {
    times.iter().map(|&t| fr.state(t)).collect()
}

fn check_index(n: usize, j: usize) -> Result<()> {
    if (1..=n).contains(&j) {
        Ok(())
    } else {
        Err(Error::Contract(format!("particle index {j} outside 1..={n}")))
    }
}

/// Energy of particle `j` (1-based) in a given state: `T_j = p_j²/2` and
/// half of each adjacent bond, except that particle 1 carries the whole bond
/// to the fixed end and particle `N` carries the drive work `-c q_N sin ωt`.
pub fn particle_energy_of_state<T: Real>(
    state: &ChainState<T>,
    omega1: T,
    drive: T,
    j: usize,
) -> Result<(T, T)> {
    let n = state.q.len();
    check_index(n, j)?;
    let w = omega1.square();
    let q = |i: usize| if i == 0 { T::zero() } else { state.q[i - 1] };
    let quarter = w / T::of_usize(4);
    let half = w / T::two();
    let bond = |i: usize| (q(i) - q(i - 1)).square();
    let mut u = if j == 1 { half * bond(1) } else { quarter * bond(j) };
    if j < n {
        u = u + quarter * bond(j + 1);
    }
    if j == n {
        u = u - drive * q(n);
    }
    let p = state.p[j - 1];
    Ok((p * p / T::two(), u))
}

pub fn particle_energy_instant<T: Real>(fr: &ForcedResponse<T>, t: T, j: usize) -> Result<(T, T)> {
    check_index(fr.n(), j)?;
    let n = fr.n();
    let (qm, pm) = fr.modal_state(t);
    // only q_{j-1}, q_j, q_{j+1} and p_j are needed
    let mut q = vec![T::zero(); n];
    let mut p = vec![T::zero(); n];
    for i in j.saturating_sub(1).max(1)..=(j + 1).min(n) {
        let (qi, pi) = fr.particle_from_modal(&qm, &pm, i);
        q[i - 1] = qi;
        p[i - 1] = pi;
    }
    particle_energy_of_state(&ChainState { q, p, t }, fr.model.omega1, fr.drive(t), j)
}

/// `H = ½(p,p) + ½(q,Vq) - c q_N sin ωt`.
pub fn total_energy<T: Real>(state: &ChainState<T>, omega1: T, drive: T) -> T {
    let v = build_matrix(state.q.len(), omega1);
    let vq = v.matvec(&state.q);
    let half = T::one() / T::two();
    let mut terms: Vec<T> = state.p.iter().map(|&p| half * p * p).collect();
    terms.extend(state.q.iter().zip(&vq).map(|(&a, &b)| half * a * b));
    terms.push(-drive * state.q[state.q.len() - 1]);
    accumulate(&terms)
}
