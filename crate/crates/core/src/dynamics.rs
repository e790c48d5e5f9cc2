//! Time-domain simulation: damped relaxation `ẍ_k = F_k - α_k g(v_k)`,
//! driven stationary flow on the circle, and ordering diagnostics.

use std::fmt;
use std::sync::Arc;

use crate::chain_model::{ChainState, Configuration, Forcing, ScenarioSpec};
use crate::equilibria::{circle_equilibrium, Regime};
use crate::error::{Error, Result};
use crate::ode::Rk4;
use crate::scalar::Real;
use crate::spectral::{ForcedResponse, SpectralModel};

/// Velocity dissipation law `g`, strictly increasing with `g(0) = 0`.
#[derive(Clone)]
pub enum GLaw<T> {
    /// `g(v) = α v`.
    Linear(T),
    Custom(Arc<dyn Fn(T) -> T + Send + Sync>),
}

impl<T: Real> GLaw<T> {
    pub fn custom(g: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        GLaw::Custom(Arc::new(g))
    }

    pub fn eval(&self, v: T) -> T {
        match self {
            GLaw::Linear(a) => *a * v,
            GLaw::Custom(g) => g(v),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            GLaw::Linear(a) if *a >= T::zero() => Ok(()),
            GLaw::Linear(_) => Err(Error::InvalidScenario("linear dissipation needs α ≥ 0".into())),
            GLaw::Custom(g) => {
                if g(T::zero()) != T::zero() {
                    return Err(Error::InvalidScenario("dissipation law must satisfy g(0) = 0".into()));
                }
                let probes = [-4.0, -1.0, -0.25, 0.0, 0.25, 1.0, 4.0].map(T::of_f64);
                if probes.windows(2).all(|w| g(w[0]) < g(w[1])) {
                    Ok(())
                } else {
                    Err(Error::InvalidScenario("dissipation law must be strictly increasing".into()))
                }
            }
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for GLaw<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GLaw::Linear(a) => f.debug_tuple("Linear").field(a).finish(),
            GLaw::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Additional force `amplitude · sin(frequency · t)` on one free coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drive<T> {
    pub index: usize,
    pub amplitude: T,
    pub frequency: T,
}

#[derive(Debug, Clone)]
pub struct DissipativeSpec<T> {
    pub scenario: ScenarioSpec<T>,
    /// Per free coordinate.
    pub alpha: Vec<T>,
    pub g_law: GLaw<T>,
    pub drive: Option<Drive<T>>,
}

impl<T: Real> DissipativeSpec<T> {
    /// Linear damping `-α v_k` on every free coordinate.
    pub fn linear(scenario: ScenarioSpec<T>, alpha: T) -> Self {
        let alpha = vec![alpha; scenario.free_len()];
        Self { scenario, alpha, g_law: GLaw::Linear(T::one()), drive: None }
    }

    /// Dissipation `-g(v_k)` on every free coordinate.
    pub fn with_law(scenario: ScenarioSpec<T>, g_law: GLaw<T>) -> Self {
        let alpha = vec![T::one(); scenario.free_len()];
        Self { scenario, alpha, g_law, drive: None }
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        let len = self.scenario.free_len();
        if self.alpha.len() != len {
            return Err(Error::DimensionMismatch { expected: len, actual: self.alpha.len() });
        }
        if self.alpha.iter().any(|&a| !(a >= T::zero())) {
            return Err(Error::InvalidScenario("damping coefficients must be nonnegative".into()));
        }
        if let Some(d) = self.drive {
            if d.index >= len {
                return Err(Error::InvalidScenario(format!("drive index {} outside 0..{len}", d.index)));
            }
        }
        self.g_law.validate()
    }

    /// Largest frequency in the system, used for the step-size check.
    pub fn max_frequency(&self) -> T {
        let s = &self.scenario;
        let mut m = s.omega0.max(s.omega1).max(s.omega2);
        if let Some(p) = &s.two_edge {
            m = m.max(p.omega0).max(p.omega1).max(p.omega2);
        }
        if let Forcing::PeriodicOnLast { frequency, .. } = s.forcing {
            m = m.max(frequency.abs());
        }
        if let Some(d) = self.drive {
            m = m.max(d.frequency.abs());
        }
        m
    }

    fn is_autonomous(&self) -> bool {
        !self.scenario.forcing.is_time_dependent() && self.drive.is_none()
    }

    /// Conservative plus driving force on the free coordinates.
    fn force(&self, q: &[T], t: T) -> Vec<T> {
        let mut f = self.scenario.force_of_free(q, t);
        if let Some(d) = self.drive {
            f[d.index] = f[d.index] + d.amplitude * (d.frequency * t).sin();
        }
        f
    }

    /// Mechanical energy `T + U` of a state.
    pub fn energy(&self, state: &ChainState<T>) -> T {
        state.kinetic_energy() + self.scenario.potential_of_free(&state.q, state.t)
    }
}

/// How recorded `q` vectors map to particle gaps.
#[derive(Debug, Clone, PartialEq)]
pub enum GapLayout<T> {
    /// `q` holds the free coordinates of the scenario.
    Scenario(ScenarioSpec<T>),
    /// `q` holds displacements from `x_k = k a`, with `x_0 ≡ 0`.
    Lattice { spacing: T },
}

impl<T: Real> GapLayout<T> {
    pub fn gaps(&self, q: &[T]) -> Vec<T> {
        match self {
            GapLayout::Scenario(spec) => spec.configuration_from_free(q).map(|c| c.gaps()).unwrap_or_default(),
            GapLayout::Lattice { spacing } => (0..q.len())
                .map(|k| {
                    let prev = if k == 0 { T::zero() } else { q[k - 1] };
                    *spacing + q[k] - prev
                })
                .collect(),
        }
    }
}

/// Gap `index` (0-based, in [`Configuration::gaps`] order) was at or below
/// the threshold at `time`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderEvent<T> {
    pub time: T,
    pub pair: usize,
    pub gap: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<ChainState<T>>,
    /// Gaps that became nonpositive, one event per crossing.
    pub events: Vec<OrderEvent<T>>,
    pub layout: GapLayout<T>,
    /// The run stopped before `t_end` because it had converged.
    pub converged: bool,
}

impl<T: Real> Trajectory<T> {
    pub fn last(&self) -> &ChainState<T> {
        self.states.last().expect("trajectory has at least the initial state")
    }

    fn from_states(states: Vec<ChainState<T>>, layout: GapLayout<T>, converged: bool) -> Self {
        let mut events = Vec::new();
        let mut negative: Vec<bool> = Vec::new();
        for s in &states {
            let gaps = layout.gaps(&s.q);
            negative.resize(gaps.len(), false);
            for (i, &g) in gaps.iter().enumerate() {
                let bad = g <= T::zero();
                if bad && !negative[i] {
                    events.push(OrderEvent { time: s.t, pair: i, gap: g });
                }
                negative[i] = bad;
            }
        }
        let times = states.iter().map(|s| s.t).collect();
        Self { times, states, events, layout, converged }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    /// Record every `stride`-th step (the final state is always recorded).
    pub stride: usize,
    /// Stop once `max(|v_k|, |a_k|) < 1e-10` for 100 consecutive steps.
    pub stop_on_convergence: bool,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self { stride: 1, stop_on_convergence: true }
    }
}

pub const CONVERGENCE_THRESHOLD: f64 = 1e-10;
pub const CONVERGENCE_STEPS: usize = 100;
pub const MAX_STEP_FREQUENCY: f64 = 0.1;

pub fn integrate<T: Real>(spec: &DissipativeSpec<T>, init: &ChainState<T>, t_end: T, dt: T) -> Result<Trajectory<T>> {
    integrate_with(spec, init, t_end, dt, IntegrateOptions::default())
}

/// Fixed-step RK4 integration of the damped dynamics in free coordinates.
pub fn integrate_with<T: Real>(
    spec: &DissipativeSpec<T>,
    init: &ChainState<T>,
    t_end: T,
    dt: T,
    options: IntegrateOptions,
) -> Result<Trajectory<T>> {
    spec.validate()?;
    let n = spec.scenario.free_len();
    for v in [&init.q, &init.p] {
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: v.len() });
        }
    }
    if !(dt > T::zero()) || !(t_end >= init.t) {
        return Err(Error::StepSize(format!("need dt > 0 and t_end ≥ t0 (dt = {dt}, t_end = {t_end})")));
    }
    if dt * spec.max_frequency() > T::of_f64(MAX_STEP_FREQUENCY) {
        return Err(Error::StepSize(format!(
            "dt · max frequency = {} exceeds {MAX_STEP_FREQUENCY}",
            dt * spec.max_frequency()
        )));
    }
    let stride = options.stride.max(1);
    let steps = ((t_end - init.t) / dt).ceil().to_usize().unwrap_or(0);
    let mut y: Vec<T> = init.q.iter().chain(&init.p).copied().collect();
    let mut rk = Rk4::new(2 * n);
    let mut rhs = |t: T, s: &[T], d: &mut [T]| {
        let (q, p) = s.split_at(n);
        let f = spec.force(q, t);
        for k in 0..n {
            d[k] = p[k];
            d[n + k] = f[k] - spec.alpha[k] * spec.g_law.eval(p[k]);
        }
    };
    let mut states = vec![init.clone()];
    let mut quiet = 0usize;
    let mut converged = false;
    let threshold = T::of_f64(CONVERGENCE_THRESHOLD);
    let check = options.stop_on_convergence && spec.is_autonomous();
    let mut deriv = vec![T::zero(); 2 * n];
    let mut t = init.t;
    for i in 1..=steps {
        let h = if i == steps { t_end - t } else { dt };
        if h <= T::zero() {
            break;
        }
        rk.step(&mut rhs, t, &mut y, h);
        t = if i == steps { t_end } else { init.t + dt * T::of_usize(i) };
        let mut done = i == steps;
        if check {
            rhs(t, &y, &mut deriv);
            let peak = y[n..].iter().chain(&deriv[n..]).fold(T::zero(), |m, &v| m.max(v.abs()));
            quiet = if peak < threshold { quiet + 1 } else { 0 };
            if quiet >= CONVERGENCE_STEPS {
                converged = true;
                done = true;
            }
        }
        if i % stride == 0 || done {
            states.push(ChainState { q: y[..n].to_vec(), p: y[n..].to_vec(), t });
        }
        if done {
            break;
        }
    }
    Ok(Trajectory::from_states(states, GapLayout::Scenario(spec.scenario.clone()), converged))
}

/// Solves `g(v) = f/N`; exact for linear laws, bisection otherwise.
pub fn stationary_flow_velocity<T: Real>(f: T, n: usize, g_law: &GLaw<T>) -> Result<T> {
    if !(f > T::zero()) || n == 0 {
        return Err(Error::InvalidScenario("stationary flow needs f > 0 and n ≥ 1".into()));
    }
    g_law.validate()?;
    let phi = f / T::of_usize(n);
    match g_law {
        GLaw::Linear(a) if *a > T::zero() => Ok(phi / *a),
        GLaw::Linear(_) => Err(Error::Bracket("g ≡ 0 never reaches f/N".into())),
        GLaw::Custom(g) => {
            let mut hi = T::one();
            let mut doublings = 0;
            while g(hi) < phi {
                hi = hi * T::two();
                doublings += 1;
                if doublings > 200 || !hi.is_finite() {
                    return Err(Error::Bracket(format!("g(v) stays below f/N = {phi} up to v = {hi}")));
                }
            }
            let mut lo = T::zero();
            for _ in 0..400 {
                let mid = (lo + hi) / T::two();
                if mid <= lo || mid >= hi {
                    break;
                }
                if g(mid) < phi {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(if (g(lo) - phi).abs() <= (g(hi) - phi).abs() { lo } else { hi })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowReport<T> {
    /// Solution of `g(v) = f/N`.
    pub target_velocity: T,
    pub mean_velocity: T,
    pub max_velocity_deviation: T,
    pub gaps: Vec<T>,
    pub expected_gaps: Vec<T>,
    pub max_gap_deviation: T,
}

/// Circle of `N` particles driven by `f` on particle 0, with dissipation
/// `-g(v_k)` on every particle, started from uniform spacing at rest.
#[allow(clippy::too_many_arguments)]
pub fn simulate_circle_flow<T: Real>(
    n: usize,
    length: T,
    omega1: T,
    f: T,
    g_law: GLaw<T>,
    t_end: T,
    dt: T,
) -> Result<(Trajectory<T>, FlowReport<T>)> {
    let spacing = length / T::of_usize(n.max(1));
    let init = ChainState::at_rest((0..n).map(|k| T::of_usize(k) * spacing).collect());
    simulate_circle_flow_from(n, length, omega1, f, g_law, &init, t_end, dt)
}

#[allow(clippy::too_many_arguments)]
pub fn simulate_circle_flow_from<T: Real>(
    n: usize,
    length: T,
    omega1: T,
    f: T,
    g_law: GLaw<T>,
    init: &ChainState<T>,
    t_end: T,
    dt: T,
) -> Result<(Trajectory<T>, FlowReport<T>)> {
    let eq = circle_equilibrium(n, length, omega1, f)?;
    if eq.regime == Regime::NoEquilibrium {
        return Err(Error::NoEquilibrium(format!("no stationary gap profile for f = {f}")));
    }
    let scenario = ScenarioSpec::circle(n, length, omega1, f, T::zero());
    let spec = DissipativeSpec::with_law(scenario, g_law);
    let target = if f == T::zero() { T::zero() } else { stationary_flow_velocity(f.abs(), n, &spec.g_law)? * f.signum() };
    let steps = ((t_end - init.t) / dt).ceil().to_usize().unwrap_or(1).max(1);
    let options = IntegrateOptions { stride: (steps / 2000).max(1), stop_on_convergence: f == T::zero() };
    let traj = integrate_with(&spec, init, t_end, dt, options)?;
    let last = traj.last();
    let gaps = traj.layout.gaps(&last.q);
    let expected_gaps = match &eq.config {
        Configuration::Circle { gaps } => gaps.clone(),
        _ => unreachable!("circle equilibrium returns gaps"),
    };
    let mean_velocity = last.p.iter().fold(T::zero(), |a, &v| a + v) / T::of_usize(n);
    let max_velocity_deviation = last.p.iter().fold(T::zero(), |m, &v| m.max((v - target).abs()));
    let max_gap_deviation = gaps.iter().zip(&expected_gaps).fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()));
    let report = FlowReport { target_velocity: target, mean_velocity, max_velocity_deviation, gaps, expected_gaps, max_gap_deviation };
    Ok((traj, report))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderReport<T> {
    /// First recorded gap at or below the threshold.
    pub violation: Option<OrderEvent<T>>,
    /// Smallest gap over all recorded states, with where it occurred.
    pub min_gap: OrderEvent<T>,
}

pub fn order_preservation<T: Real>(traj: &Trajectory<T>, min_gap: T) -> OrderReport<T> {
    let mut violation = None;
    let mut smallest = OrderEvent { time: T::zero(), pair: 0, gap: T::infinity() };
    for s in &traj.states {
        for (i, &g) in traj.layout.gaps(&s.q).iter().enumerate() {
            if g < smallest.gap {
                smallest = OrderEvent { time: s.t, pair: i, gap: g };
            }
            if violation.is_none() && g <= min_gap {
                violation = Some(OrderEvent { time: s.t, pair: i, gap: g });
            }
        }
    }
    OrderReport { violation, min_gap: smallest }
}

/// Mode-wise bound `sup_t |q_j(t)| ≤ c Σ_k |(g_k,e_N)(g_k,e_j)| b_k` with
/// `b_k = (ω/(ω² - ν_k²))(1/ω + 1/ν_k)`, valid for zero initial state.
pub fn collision_bound<T: Real>(model: &SpectralModel<T>, c: T, omega: T) -> Result<Vec<T>> {
    let w1 = model.omega1;
    if !(omega * omega > T::of_usize(4) * w1 * w1) {
        return Err(Error::Domain(format!("collision bound needs ω² > 4ω₁² (ω = {omega})")));
    }
    let b: Vec<T> = model
        .nu
        .iter()
        .map(|&nu| omega / (omega * omega - nu * nu) * (T::one() / omega + T::one() / nu))
        .collect();
    Ok((0..model.n)
        .map(|j| {
            let s = model
                .gvec
                .iter()
                .zip(&model.proj_last)
                .zip(&b)
                .fold(T::zero(), |acc, ((g, &last), &bk)| acc + (last * g[j]).abs() * bk);
            c.abs() * s
        })
        .collect())
}

/// Samples the exact driven-chain trajectory on `[0, t_end]` every `dt`;
/// `q` holds displacements from the lattice `x_k = k a`.
pub fn forced_trajectory<T: Real>(fr: &ForcedResponse<T>, spacing: T, t_end: T, dt: T) -> Result<Trajectory<T>> {
    if !(dt > T::zero()) || !(t_end >= T::zero()) {
        return Err(Error::StepSize("need dt > 0 and t_end ≥ 0".into()));
    }
    let steps = (t_end / dt).ceil().to_usize().unwrap_or(0);
    let states = (0..=steps)
        .map(|i| fr.state(if i == steps { t_end } else { dt * T::of_usize(i) }))
        .collect();
    Ok(Trajectory::from_states(states, GapLayout::Lattice { spacing }, false))
}

/// Scenario used to integrate the driven fixed-left-end chain directly.
pub fn forced_chain_scenario<T: Real>(n: usize, spacing: T, omega1: T, c: T, omega: T) -> ScenarioSpec<T> {
    ScenarioSpec::fixed_left_end(n, spacing, omega1, Forcing::PeriodicOnLast { amplitude: c, frequency: omega })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::fixed_end_equilibrium;
    use crate::spectral::eigen_closed_form;

    #[test]
    fn linear_and_cubic_flow_velocities() {
        assert_eq!(stationary_flow_velocity(1.0, 10, &GLaw::Linear(0.5)).unwrap(), 0.2);
        let v = stationary_flow_velocity(8.0, 1, &GLaw::custom(|v: f64| v * v * v)).unwrap();
        assert!((v - 2.0).abs() < 1e-14);
        let g = GLaw::custom(|v: f64| v + v.sinh());
        let v = stationary_flow_velocity(3.7, 3, &g).unwrap();
        assert!((g.eval(v) - 3.7 / 3.0).abs() <= 1e-12);
        let capped = GLaw::custom(|v: f64| v.tanh());
        assert!(matches!(stationary_flow_velocity(5.0, 1, &capped), Err(Error::Bracket(_))));
    }

    #[test]
    fn step_size_is_checked() {
        let s = ScenarioSpec::fixed_right_end(3, 3.0, 1.0, 1.0, 2.0, Forcing::None);
        let spec = DissipativeSpec::linear(s, 1.0);
        let init = ChainState::at_rest(vec![0.0, 1.0, 2.0]);
        assert!(matches!(integrate(&spec, &init, 1.0, 0.06), Err(Error::StepSize(_))));
        assert!(integrate(&spec, &init, 1.0, 0.05).is_ok());
    }

    #[test]
    fn equilibrium_is_stationary_without_damping() {
        let eq = fixed_end_equilibrium(4, 4.0f64, 0.8, 1.0, 1.0, 0.3).unwrap();
        let free = eq.scenario.free_coordinates(&eq.config).unwrap();
        let spec = DissipativeSpec::linear(eq.scenario.clone(), 0.0);
        let traj = integrate(&spec, &ChainState::at_rest(free.clone()), 5.0, 0.01).unwrap();
        for (a, b) in traj.last().q.iter().zip(&free) {
            assert!((a - b).abs() < 1e-12);
        }
        let report = order_preservation(&traj, 0.0);
        assert!(report.violation.is_none());
        assert!((report.min_gap.gap - eq.meta("gap").unwrap()).abs() < 1e-12);
    }

    #[test]
    fn zero_drive_bound_vanishes() {
        let m = eigen_closed_form(8, 1.0).unwrap();
        assert!(collision_bound(&m, 0.0, 3.0).unwrap().iter().all(|&b| b == 0.0));
        assert!(matches!(collision_bound(&m, 1.0, 1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn crossing_is_recorded_once() {
        let fr = ForcedResponse::new(eigen_closed_form(3, 1.0).unwrap(), 40.0, 2.1).unwrap();
        let traj = forced_trajectory(&fr, 0.1, 20.0, 0.01).unwrap();
        assert!(!traj.events.is_empty());
        let report = order_preservation(&traj, 0.0);
        let v = report.violation.unwrap();
        assert_eq!((v.time, v.pair), (traj.events[0].time, traj.events[0].pair));
    }
}
