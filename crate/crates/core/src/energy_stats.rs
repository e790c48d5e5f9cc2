//! Time-averaged energies of the driven chain, their `N → ∞` limits, virial
//! residuals and the continuum energy density of the uniformly loaded chain.
//!
//! Exact averages assume a zero initial state and non-resonant driving; all
//! frequencies `ν_k` and `ω` are then distinct and cross terms average out.

use std::collections::BTreeMap;

use crate::chain_model::ChainState;
use crate::equilibria::uniform_force_fixed_end;
use crate::error::{Error, Result};
use crate::quadrature;
use crate::scalar::{accumulate, Real};
use crate::spectral::{particle_energy_of_state, total_energy, ForcedResponse};

fn check_exact<T: Real>(fr: &ForcedResponse<T>) -> Result<()> {
    if fr.has_zero_initial_state() {
        Ok(())
    } else {
        Err(Error::Contract("exact time averages need a zero initial state".into()))
    }
}

fn check_index(n: usize, j: usize) -> Result<()> {
    if (1..=n).contains(&j) {
        Ok(())
    } else {
        Err(Error::Contract(format!("particle index {j} outside 1..={n}")))
    }
}

/// `β_k = (g_k, e_N)(g_k, w)` for a sparse weight vector `w` (1-based indices).
fn mode_weights<T: Real>(fr: &ForcedResponse<T>, w: &[(usize, T)]) -> Vec<T> {
    fr.model
        .gvec
        .iter()
        .zip(&fr.model.proj_last)
        .map(|(g, &last)| last * w.iter().fold(T::zero(), |acc, &(j, c)| acc + c * g[j - 1]))
        .collect()
}

/// `⟨(Σ_j w_j q_j)²⟩ = (Σβ_kA_k)²/(2ω²) + ½Σβ_k²A_k²/ν_k²`.
pub fn mean_square_displacement<T: Real>(fr: &ForcedResponse<T>, w: &[(usize, T)]) -> Result<T> {
    check_exact(fr)?;
    for &(j, _) in w {
        check_index(fr.n(), j)?;
    }
    let beta = mode_weights(fr, w);
    let s: Vec<T> = beta.iter().zip(&fr.amp).map(|(&b, &a)| b * a).collect();
    let q: Vec<T> = s.iter().zip(&fr.model.nu).map(|(&v, &nu)| (v / nu).square()).collect();
    let s = accumulate(&s);
    Ok(s * s / (T::two() * fr.omega * fr.omega) + accumulate(&q) / T::two())
}

/// `⟨q_N sin ωt⟩ = ½ Σ_k (g_k, e_N)² c/(ν_k² - ω²)`.
pub fn mean_drive_correlation<T: Real>(fr: &ForcedResponse<T>) -> Result<T> {
    check_exact(fr)?;
    let terms: Vec<T> = fr.model.proj_last.iter().zip(&fr.amp).map(|(&g, &a)| g * g * a / fr.omega).collect();
    Ok(accumulate(&terms) / T::two())
}

/// `⟨T_j⟩ = ¼(Σ_k β_k A_k)² + ¼ Σ_k β_k² A_k²` with `β_k = (g_k,e_N)(g_k,e_j)`.
pub fn mean_kinetic_exact<T: Real>(fr: &ForcedResponse<T>, j: usize) -> Result<T> {
    check_exact(fr)?;
    check_index(fr.n(), j)?;
    let beta = mode_weights(fr, &[(j, T::one())]);
    let s: Vec<T> = beta.iter().zip(&fr.amp).map(|(&b, &a)| b * a).collect();
    let q: Vec<T> = s.iter().map(|&v| v * v).collect();
    let s = accumulate(&s);
    Ok((s * s + accumulate(&q)) / T::of_usize(4))
}

/// `⟨U_j⟩` under the half-bond convention of [`particle_energy_of_state`].
pub fn mean_potential_exact<T: Real>(fr: &ForcedResponse<T>, j: usize) -> Result<T> {
    check_exact(fr)?;
    let n = fr.n();
    check_index(n, j)?;
    let w = fr.model.omega1.square();
    let one = T::one();
    let bond = |i: usize| -> Result<T> {
        if i == 1 {
            mean_square_displacement(fr, &[(1, one)])
        } else {
            mean_square_displacement(fr, &[(i, one), (i - 1, -one)])
        }
    };
    let quarter = w / T::of_usize(4);
    let mut u = if j == 1 { w / T::two() * bond(1)? } else { quarter * bond(j)? };
    if j < n {
        u = u + quarter * bond(j + 1)?;
    }
    if j == n {
        u = u - fr.c * mean_drive_correlation(fr)?;
    }
    Ok(u)
}

/// `(⟨U_1⟩, ⟨U_N⟩)`.
pub fn mean_potential_ends_exact<T: Real>(fr: &ForcedResponse<T>) -> Result<(T, T)> {
    Ok((mean_potential_exact(fr, 1)?, mean_potential_exact(fr, fr.n())?))
}

/// `⟨T⟩ - ⟨U⟩ → ½⟨c sin(ωt) q_N⟩` for the driven chain.
pub fn forced_virial_offset<T: Real>(fr: &ForcedResponse<T>) -> Result<T> {
    Ok(fr.c * mean_drive_correlation(fr)? / T::two())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport<T> {
    pub mean_kinetic: Vec<T>,
    pub mean_potential: Vec<T>,
    pub mean_potential_first: T,
    pub mean_potential_last: T,
    /// `Σ⟨T_j⟩ - Σ⟨U_j⟩`.
    pub virial_residual: T,
    /// Large-`N` limits, present when `ω² > 4ω₁²`.
    pub limits: BTreeMap<String, T>,
}

pub fn energy_report<T: Real>(fr: &ForcedResponse<T>) -> Result<EnergyReport<T>> {
    let n = fr.n();
    let mean_kinetic = (1..=n).map(|j| mean_kinetic_exact(fr, j)).collect::<Result<Vec<_>>>()?;
    let mean_potential = (1..=n).map(|j| mean_potential_exact(fr, j)).collect::<Result<Vec<_>>>()?;
    let virial_residual = accumulate(&mean_kinetic) - accumulate(&mean_potential);
    let (w1, w) = (fr.model.omega1, fr.omega);
    let mut limits = BTreeMap::new();
    if w * w > T::of_usize(4) * w1 * w1 {
        limits.insert("I_integral".into(), limit_integral(w1, w)?);
        limits.insert("K_kinetic_last".into(), limit_kinetic_last(w1, w, fr.c)?);
        limits.insert("U_last_limit".into(), limit_potential_last(w1, w, fr.c)?);
        limits.insert("modal_kinetic_last".into(), modal_limit_kinetic_last(w1, w, fr.c)?);
        limits.insert("modal_potential_last".into(), modal_limit_potential_last(w1, w, fr.c)?);
    }
    Ok(EnergyReport {
        mean_potential_first: mean_potential[0],
        mean_potential_last: mean_potential[n - 1],
        mean_kinetic,
        mean_potential,
        virial_residual,
        limits,
    })
}

/// Limit of `⟨T_1⟩` as `N → ∞`.
pub const LIMIT_KINETIC_FIRST: f64 = 0.0;

fn check_band<T: Real>(omega1: T, omega: T) -> Result<()> {
    if !(omega1 > T::zero()) {
        return Err(Error::InvalidScenario("omega1 must be positive".into()));
    }
    if omega * omega > T::of_usize(4) * omega1 * omega1 {
        Ok(())
    } else {
        Err(Error::Domain(format!("limits need ω² > 4ω₁² (ω = {omega}, ω₁ = {omega1})")))
    }
}

fn band_denominator<T: Real>(omega1: T, omega: T, u: T) -> T {
    T::two() * omega1 * omega1 * (u.cos() + T::one()) - omega * omega
}

/// `I = ∫₀^π u² / (2ω₁²(cos u + 1) - ω²) du`.
pub fn limit_integral<T: Real>(omega1: T, omega: T) -> Result<T> {
    check_band(omega1, omega)?;
    quadrature::integrate(|u: T| u * u / band_denominator(omega1, omega, u), T::zero(), T::PI())
}

/// `K = c² I² / (4π²)`.
pub fn limit_kinetic_last<T: Real>(omega1: T, omega: T, c: T) -> Result<T> {
    let i = limit_integral(omega1, omega)?;
    Ok(c * c * i * i / (T::of_usize(4) * T::PI() * T::PI()))
}

/// `½(ω₁ c I/π)² - c² I/(4π)`.
pub fn limit_potential_last<T: Real>(omega1: T, omega: T, c: T) -> Result<T> {
    let i = limit_integral(omega1, omega)?;
    let pi = T::PI();
    Ok((omega1 * c * i / pi).square() / T::two() - c * c * i / (T::of_usize(4) * pi))
}

/// `∫₀^π h(u) / (2ω₁²(cos u + 1) - ω²) du`.
fn band_integral<T: Real, F: Fn(T) -> T>(omega1: T, omega: T, h: F) -> Result<T> {
    check_band(omega1, omega)?;
    quadrature::integrate(|u: T| h(u) / band_denominator(omega1, omega, u), T::zero(), T::PI())
}

/// Limit of the exact `⟨T_N⟩` obtained by passing to the mode-sum integral:
/// `¼ ((2ωc/π) ∫₀^π sin²(u/2)/D(u) du)²`.
pub fn modal_limit_kinetic_last<T: Real>(omega1: T, omega: T, c: T) -> Result<T> {
    let j = band_integral(omega1, omega, |u: T| (u / T::two()).sin().square())?;
    let s = T::two() * omega * c / T::PI() * j;
    Ok(s * s / T::of_usize(4))
}

/// Limit of the exact `⟨U_N⟩`:
/// `(ω₁²/4) S²/(2ω²) - (c²/π) ∫₀^π sin²(u/2)/D(u) du`, `S = (2ωc/π) ∫₀^π sin²u/D(u) du`.
pub fn modal_limit_potential_last<T: Real>(omega1: T, omega: T, c: T) -> Result<T> {
    let half = band_integral(omega1, omega, |u: T| (u / T::two()).sin().square())?;
    let full = band_integral(omega1, omega, |u: T| u.sin().square())?;
    let s = T::two() * omega * c / T::PI() * full;
    let bond = omega1 * omega1 / T::of_usize(4) * s * s / (T::two() * omega * omega);
    Ok(bond - c * c / T::PI() * half)
}

/// Something that yields total kinetic and potential energy along a bounded
/// trajectory.
pub trait EnergySampler<T> {
    /// `(T(t), U(t))`.
    fn energies(&self, t: T) -> (T, T);
    /// Sampling step that resolves the fastest oscillation.
    fn default_step(&self) -> T;
}

impl<T: Real> EnergySampler<T> for ForcedResponse<T> {
    fn energies(&self, t: T) -> (T, T) {
        let s = self.state(t);
        let kinetic = s.kinetic_energy();
        (kinetic, total_energy(&s, self.model.omega1, self.drive(t)) - kinetic)
    }

    fn default_step(&self) -> T {
        sample_step(self)
    }
}

/// `2π / (64 max(ω, ν₁))`.
pub fn sample_step<T: Real>(fr: &ForcedResponse<T>) -> T {
    T::TAU() / (T::of_usize(64) * fr.omega.max(fr.model.nu[0]))
}

/// Uniform grid on `[0, window]` with spacing at most `dt`.
fn grid<T: Real>(window: T, dt: T) -> Result<(usize, T)> {
    if !(window > T::zero() && dt > T::zero()) {
        return Err(Error::Contract("averaging window and step must be positive".into()));
    }
    let steps = (window / dt).ceil().to_usize().unwrap_or(1).max(1);
    Ok((steps, window / T::of_usize(steps)))
}

fn trapezoid_weight<T: Real>(i: usize, steps: usize) -> T {
    if i == 0 || i == steps {
        T::one() / T::two()
    } else {
        T::one()
    }
}

/// Running residual `R(t) = (1/t)∫₀ᵗ (T - U)` at every sample after the first.
pub fn virial_residual_series<T: Real, S: EnergySampler<T>>(sampler: &S, t_max: T, dt: T) -> Result<Vec<(T, T)>> {
    let (steps, h) = grid(t_max, dt)?;
    let mut out = Vec::with_capacity(steps);
    let diff = |t: T| {
        let (k, u) = sampler.energies(t);
        k - u
    };
    let mut prev = diff(T::zero());
    let mut integral = T::zero();
    let mut comp = T::zero();
    for i in 1..=steps {
        let t = h * T::of_usize(i);
        let cur = diff(t);
        // Neumaier running sum of trapezoids
        let term = (prev + cur) * h / T::two();
        let s = integral + term;
        comp = comp + if integral.abs() >= term.abs() { (integral - s) + term } else { (term - s) + integral };
        integral = s;
        out.push((t, (integral + comp) / t));
        prev = cur;
    }
    Ok(out)
}

/// `⟨T⟩ - ⟨U⟩` over `[0, window]` by the trapezoid rule at the sampler's step.
pub fn virial_residual<T: Real, S: EnergySampler<T>>(sampler: &S, window: T) -> Result<T> {
    let series = virial_residual_series(sampler, window, sampler.default_step())?;
    Ok(series.last().map(|&(_, r)| r).unwrap_or_else(T::zero))
}

/// Envelope `max_{t ∈ [T, 2T]} |R(t)| t / T` of a residual series, which decays
/// like `1/T` whenever `∫(T - U)` stays bounded.
pub fn virial_envelope<T: Real>(series: &[(T, T)], window: T) -> T {
    let upper = window * T::two();
    series
        .iter()
        .filter(|&&(t, _)| t >= window && t <= upper)
        .fold(T::zero(), |m, &(t, r)| m.max(r.abs() * t / window))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalAverages<T> {
    pub window: T,
    pub dt: T,
    pub kinetic: Vec<T>,
    pub potential: Vec<T>,
}

/// Trapezoid averages of every `T_j` and `U_j` over `[0, window]` along the
/// exact trajectory, sampled at [`sample_step`].
pub fn empirical_averages<T: Real>(fr: &ForcedResponse<T>, window: T) -> Result<EmpiricalAverages<T>> {
    empirical_averages_with_step(fr, window, sample_step(fr))
}

pub fn empirical_averages_with_step<T: Real>(fr: &ForcedResponse<T>, window: T, dt: T) -> Result<EmpiricalAverages<T>> {
    let n = fr.n();
    let (steps, h) = grid(window, dt)?;
    let mut kinetic = vec![T::zero(); n];
    let mut potential = vec![T::zero(); n];
    for i in 0..=steps {
        let t = h * T::of_usize(i);
        let wgt: T = trapezoid_weight(i, steps);
        let state: ChainState<T> = fr.state(t);
        let drive = fr.drive(t);
        for j in 1..=n {
            let (k, u) = particle_energy_of_state(&state, fr.model.omega1, drive, j)?;
            kinetic[j - 1] = kinetic[j - 1] + wgt * k;
            potential[j - 1] = potential[j - 1] + wgt * u;
        }
    }
    let norm = T::of_usize(steps);
    kinetic.iter_mut().chain(potential.iter_mut()).for_each(|v| *v = *v / norm);
    Ok(EmpiricalAverages { window, dt: h, kinetic, potential })
}

/// Scaled parameters of the uniformly loaded chain: `f = f₁/N`, `ω₁² = w₁N`,
/// `a = L/N`, no anchor spring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumParams<T> {
    pub f1: T,
    pub w1: T,
    pub length: T,
}

impl<T: Real> ContinuumParams<T> {
    fn check_positive(&self) -> Result<()> {
        let zero = T::zero();
        if self.f1 > zero && self.w1 > zero && self.length > zero {
            Ok(())
        } else {
            Err(Error::InvalidScenario("f1, w1 and L must be positive".into()))
        }
    }

    /// Positivity plus admissibility `f₁ < L w₁` of the finite-`N` equilibria.
    pub fn validate(&self) -> Result<()> {
        self.check_positive()?;
        if self.f1 >= self.length * self.w1 {
            return Err(Error::Admissibility(format!(
                "f1 = {} must be below L w1 = {}",
                self.f1,
                self.length * self.w1
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContinuumFamily {
    /// `x_k = k a`.
    Lattice,
    Equilibrium,
}

/// Energy density `u(x)` as printed for the two configuration families:
/// `-f₁x/L` and `3f₁²x²/(2L³w₁) - f₁x/L - f₁²/(2w₁)`.
pub fn continuum_density<T: Real>(p: &ContinuumParams<T>, x: T, which: ContinuumFamily) -> Result<T> {
    p.check_positive()?;
    check_position(p, x)?;
    let lattice = -p.f1 * x / p.length;
    Ok(match which {
        ContinuumFamily::Lattice => lattice,
        ContinuumFamily::Equilibrium => {
            let l3 = p.length * p.length * p.length;
            T::of_usize(3) * p.f1 * p.f1 * x * x / (T::two() * l3 * p.w1) + lattice - p.f1 * p.f1 / (T::two() * p.w1)
        }
    })
}

/// Limit density of the finite-`N` equilibrium, from its exact coordinates
/// `x_k = x₀ + ka - f k(k+1)/(2ω₁²)`: `f₁²x²/(w₁L³) - f₁x/L - f₁²/(2w₁L)`.
pub fn continuum_density_exact<T: Real>(p: &ContinuumParams<T>, x: T, which: ContinuumFamily) -> Result<T> {
    p.check_positive()?;
    check_position(p, x)?;
    let lattice = -p.f1 * x / p.length;
    Ok(match which {
        ContinuumFamily::Lattice => lattice,
        ContinuumFamily::Equilibrium => {
            let l = p.length;
            p.f1 * p.f1 * x * x / (p.w1 * l * l * l) + lattice - p.f1 * p.f1 / (T::two() * p.w1 * l)
        }
    })
}

fn check_position<T: Real>(p: &ContinuumParams<T>, x: T) -> Result<()> {
    if x >= T::zero() && x <= p.length {
        Ok(())
    } else {
        Err(Error::Domain(format!("x = {x} outside [0, {}]", p.length)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityProbe<T> {
    pub x: T,
    pub width: T,
    pub lattice: T,
    pub equilibrium: T,
    pub formula_lattice: T,
    pub formula_equilibrium: T,
    pub exact_equilibrium: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuumReport<T> {
    pub n: usize,
    /// `-f₁L/2`.
    pub target: T,
    pub x0: T,
    /// `f₁/(2w₁)`.
    pub x0_limit: T,
    pub lattice_energy: T,
    pub equilibrium_energy: T,
    pub interaction_energy: T,
    pub external_energy: T,
    /// `f₁²/(2w₁)` as printed.
    pub interaction_limit_formula: T,
    /// `f₁²/(6w₁)`.
    pub interaction_limit_exact: T,
    pub lattice_deviation: T,
    pub equilibrium_deviation: T,
    /// `∫₀^L u` of the printed densities (lattice, equilibrium).
    pub formula_integrals: (T, T),
    /// `∫₀^L u` of the exact densities (lattice, equilibrium).
    pub exact_integrals: (T, T),
    pub probes: Vec<DensityProbe<T>>,
}

/// Per-particle energies `U_k`, `k = 0..=N`, of a configuration: a quarter of
/// `ω₁²(x_k - x_{k-1} - a)²` from each adjacent bond and the load `-f x_k`
/// on the free particles `k < N`.
fn particle_energies<T: Real>(coords: &[T], a: T, w2: T, f: T) -> Vec<T> {
    let n = coords.len() - 1;
    let quarter = w2 / T::of_usize(4);
    let bond = |i: usize| (coords[i] - coords[i - 1] - a).square();
    (0..=n)
        .map(|k| {
            let mut u = T::zero();
            if k >= 1 {
                u = u + quarter * bond(k);
            }
            if k < n {
                u = u + quarter * bond(k + 1) - f * coords[k];
            }
            u
        })
        .collect()
}

/// Windowed density `(1/Δ) Σ U_k` over labels `kL/N ∈ [x - Δ/2, x + Δ/2)`.
fn windowed<T: Real>(energies: &[T], p: &ContinuumParams<T>, x: T, width: T) -> T {
    let n = energies.len() - 1;
    let lo = x - width / T::two();
    let hi = x + width / T::two();
    let picked: Vec<T> = (0..=n)
        .filter(|&k| {
            let label = T::of_usize(k) * p.length / T::of_usize(n);
            label >= lo && label < hi
        })
        .map(|k| energies[k])
        .collect();
    accumulate(&picked) / width
}

pub const DEFAULT_PROBES: [f64; 3] = [0.25, 0.5, 0.75];
pub const DEFAULT_PROBE_WIDTH: f64 = 0.05;

pub fn continuum_convergence<T: Real>(p: &ContinuumParams<T>, n: usize) -> Result<ContinuumReport<T>> {
    let probes: Vec<T> = DEFAULT_PROBES.iter().map(|&x| T::of_f64(x) * p.length).collect();
    continuum_convergence_at(p, n, &probes, T::of_f64(DEFAULT_PROBE_WIDTH) * p.length)
}

pub fn continuum_convergence_at<T: Real>(
    p: &ContinuumParams<T>,
    n: usize,
    probes: &[T],
    width: T,
) -> Result<ContinuumReport<T>> {
    p.validate()?;
    if n < 1 {
        return Err(Error::InvalidScenario("particle count must be at least 1".into()));
    }
    let nn = T::of_usize(n);
    let f = p.f1 / nn;
    let w2 = p.w1 * nn;
    let a = p.length / nn;
    let eq = uniform_force_fixed_end(n, p.length, a, T::zero(), w2.sqrt(), f)?;
    let coords = eq.config.coords();
    let lattice: Vec<T> = (0..=n).map(|k| T::of_usize(k) * a).collect();
    let eq_energies = particle_energies(&coords, a, w2, f);
    let lattice_energies = particle_energies(&lattice, a, w2, f);
    let half = T::one() / T::two();
    let interaction: Vec<T> = (1..=n).map(|i| half * w2 * (coords[i] - coords[i - 1] - a).square()).collect();
    let external: Vec<T> = coords[..n].iter().map(|&x| -f * x).collect();
    let interaction_energy = accumulate(&interaction);
    let external_energy = accumulate(&external);
    let equilibrium_energy = accumulate(&eq_energies);
    let lattice_energy = accumulate(&lattice_energies);
    let target = -p.f1 * p.length / T::two();
    let integral = |exact: bool, which: ContinuumFamily| {
        quadrature::integrate(
            |x: T| {
                let x = x.max(T::zero()).min(p.length);
                if exact {
                    continuum_density_exact(p, x, which)
                } else {
                    continuum_density(p, x, which)
                }
                .unwrap_or_else(|_| T::nan())
            },
            T::zero(),
            p.length,
        )
    };
    let probes = probes
        .iter()
        .map(|&x| {
            Ok(DensityProbe {
                x,
                width,
                lattice: windowed(&lattice_energies, p, x, width),
                equilibrium: windowed(&eq_energies, p, x, width),
                formula_lattice: continuum_density(p, x, ContinuumFamily::Lattice)?,
                formula_equilibrium: continuum_density(p, x, ContinuumFamily::Equilibrium)?,
                exact_equilibrium: continuum_density_exact(p, x, ContinuumFamily::Equilibrium)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ContinuumReport {
        n,
        target,
        x0: coords[0],
        x0_limit: p.f1 / (T::two() * p.w1),
        lattice_energy,
        equilibrium_energy,
        interaction_energy,
        external_energy,
        interaction_limit_formula: p.f1 * p.f1 / (T::two() * p.w1),
        interaction_limit_exact: p.f1 * p.f1 / (T::of_usize(6) * p.w1),
        lattice_deviation: ((lattice_energy - target) / target).abs(),
        equilibrium_deviation: ((equilibrium_energy - target) / target).abs(),
        formula_integrals: (integral(false, ContinuumFamily::Lattice)?, integral(false, ContinuumFamily::Equilibrium)?),
        exact_integrals: (integral(true, ContinuumFamily::Lattice)?, integral(true, ContinuumFamily::Equilibrium)?),
        probes,
    })
}
