//! One function per command, each producing a [`Report`].

use harmonic_chain::chain_model::{potential_energy, Forcing, TwoEdgeParams};
use harmonic_chain::dynamics::{
    integrate_with, order_preservation, simulate_circle_flow_from, DissipativeSpec, GLaw, IntegrateOptions,
};
use harmonic_chain::energy_stats::{
    continuum_convergence_at, empirical_averages, energy_report, forced_virial_offset, limit_integral,
    limit_kinetic_last, limit_potential_last, modal_limit_kinetic_last, modal_limit_potential_last, ContinuumParams,
    DEFAULT_PROBES, DEFAULT_PROBE_WIDTH, LIMIT_KINETIC_FIRST,
};
use harmonic_chain::equilibria::{closed_form, Regime, Window};
use harmonic_chain::spectral::eigen_closed_form;
use harmonic_chain::{ChainState, Error, ForcedResponse, ScenarioSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};
use std::ops::Bound;

use crate::emit::{int, num, nums, text, Report};
use crate::error::{CliError, Result};
use crate::settings::{Command, ForcingName, Settings, VariantName};

pub const DEFAULT_ALPHA: f64 = 1.0;
pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_T_END: f64 = 100.0;
pub const DEFAULT_FLOW_T_END: f64 = 200.0;
pub const DEFAULT_STRIDE: usize = 10;

fn need<T: Copy>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| CliError::missing(name))
}

pub fn run(command: Command, p: &Settings, seed: u64) -> Result<Report> {
    match command {
        Command::Equilibrium => equilibrium(p),
        Command::Spectrum => spectrum(p),
        Command::Energy => energy(p),
        Command::Limits => limits(p),
        Command::Dynamics => dynamics(p, seed),
        Command::Flow => flow(p, seed),
        Command::Continuum => continuum(p),
        Command::Sweep => Err(CliError::config("sweep must be run through the sweep driver")),
    }
}

/// Circle spring frequency: `--omega1`, falling back to `--omega`.
fn circle_omega1(p: &Settings) -> Result<f64> {
    p.omega1.or(p.omega).ok_or_else(|| CliError::missing("omega1"))
}

fn forcing(p: &Settings, default: ForcingName) -> Result<Forcing<f64>> {
    let f = p.f.unwrap_or(0.0);
    Ok(match p.forcing.unwrap_or(default) {
        ForcingName::None => Forcing::None,
        ForcingName::Point => Forcing::PointOnFirst(f),
        ForcingName::Opposed => Forcing::OpposedEnds(f),
        ForcingName::Uniform => Forcing::Uniform(f),
        ForcingName::Periodic => {
            Forcing::PeriodicOnLast { amplitude: need(p.c, "c")?, frequency: need(p.omega, "omega")? }
        }
    })
}

pub fn scenario(p: &Settings) -> Result<ScenarioSpec> {
    let variant = need(p.variant, "variant")?;
    let spec = match variant {
        VariantName::Circle => {
            let n = need(p.n, "n")?;
            let f = p.f.unwrap_or(0.0);
            ScenarioSpec::circle(n, need(p.length, "L")?, circle_omega1(p)?, f, f / n.max(1) as f64)
        }
        VariantName::FixedRight | VariantName::SpringEnds => {
            let n = need(p.n, "n")?;
            let length = need(p.length, "L")?;
            let a = p.a.unwrap_or(length / n.max(1) as f64);
            let w1 = need(p.omega1, "omega1")?;
            let forcing = forcing(p, ForcingName::Point)?;
            if variant == VariantName::FixedRight {
                ScenarioSpec::fixed_right_end(n, length, a, p.omega0.unwrap_or(0.0), w1, forcing)
            } else {
                ScenarioSpec::spring_both_ends(n, length, a, need(p.omega0, "omega0")?, w1, forcing)
            }
        }
        VariantName::FixedLeft => {
            let default = if p.c.is_some() { ForcingName::Periodic } else { ForcingName::None };
            ScenarioSpec::fixed_left_end(need(p.n, "n")?, need(p.a, "a")?, need(p.omega1, "omega1")?, forcing(p, default)?)
        }
        VariantName::TwoEdge => ScenarioSpec::two_edge(TwoEdgeParams {
            n1: need(p.n1, "n1")?,
            n2: need(p.n2, "n2")?,
            m: need(p.m, "m")?,
            length1: need(p.length1, "L1")?,
            length2: need(p.length2, "L2")?,
            a0: need(p.a0, "a0")?,
            a1: need(p.a1, "a1")?,
            a2: need(p.a2, "a2")?,
            omega0: need(p.omega0, "omega0")?,
            omega1: need(p.omega1, "omega1")?,
            omega2: need(p.omega2, "omega2")?,
        }),
    };
    spec.validate()?;
    Ok(spec)
}

fn bound_value(b: Bound<f64>) -> (Value, Value) {
    match b {
        Bound::Included(v) => (num(v), Value::Bool(true)),
        Bound::Excluded(v) => (num(v), Value::Bool(false)),
        Bound::Unbounded => (Value::Null, Value::Bool(false)),
    }
}

fn window_value(w: &Window<f64>) -> Value {
    let (lower, lower_closed) = bound_value(w.lower);
    let (upper, upper_closed) = bound_value(w.upper);
    let mut m = Map::new();
    m.insert("lower".into(), lower);
    m.insert("lower_included".into(), lower_closed);
    m.insert("upper".into(), upper);
    m.insert("upper_included".into(), upper_closed);
    Value::Object(m)
}

fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn min_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::INFINITY, f64::min)
}

fn no_equilibrium(spec: &ScenarioSpec, detail: Option<f64>) -> CliError {
    let mut msg = format!("{} particles under the given force have no equilibrium", spec.n);
    if let Some(t) = detail {
        msg.push_str(&format!(" (threshold {t})"));
    }
    CliError::Core(Error::NoEquilibrium(msg))
}

pub fn equilibrium(p: &Settings) -> Result<Report> {
    let spec = scenario(p)?;
    let eq = closed_form(&spec)?;
    if eq.regime == Regime::NoEquilibrium {
        return Err(no_equilibrium(&spec, eq.meta("threshold")));
    }
    let coords = eq.config.coords();
    let gaps = eq.config.gaps();
    let free = spec.free_coordinates(&eq.config)?;
    let residual = max_abs(&spec.force_of_free(&free, 0.0));
    let mut r = Report::new("equilibrium", "configuration", &["index", "coordinate", "regime"]);
    for (k, &x) in coords.iter().enumerate() {
        r.push(vec![int(k), num(x), text(eq.regime.as_str())]);
    }
    r.set("variant", text(p.variant.map(|v| v.as_str()).unwrap_or_default()));
    r.set("regime", text(eq.regime.as_str()));
    r.set("energy", num(potential_energy(&spec, &eq.config, 0.0)?));
    r.set("max_force_residual", num(residual));
    r.set("x_first", num(coords[0]));
    r.set("x_last", num(*coords.last().unwrap()));
    r.set("min_gap", num(min_of(&gaps)));
    r.set("gaps", nums(&gaps));
    r.set("ordering_window", window_value(&eq.ordering_window));
    r.set("metadata", Value::Object(eq.metadata.iter().map(|(k, &v)| (k.clone(), num(v))).collect()));
    Ok(r)
}

pub fn spectrum(p: &Settings) -> Result<Report> {
    let model = eigen_closed_form(need(p.n, "n")?, need(p.omega1, "omega1")?)?;
    let lambda = model.eigenvalues();
    let mut r = Report::new("spectrum", "modes", &["k", "nu", "lambda", "proj_last"]);
    for k in 0..model.n {
        r.push(vec![int(k + 1), num(model.nu[k]), num(lambda[k]), num(model.proj_last[k])]);
    }
    r.set("n", int(model.n));
    r.set("nu_min", num(model.nu[0]));
    r.set("nu_max", num(model.nu[model.n - 1]));
    r.set("max_residual", num(model.max_residual()));
    Ok(r)
}

fn forced_response(p: &Settings) -> Result<ForcedResponse> {
    let model = eigen_closed_form(need(p.n, "n")?, need(p.omega1, "omega1")?)?;
    Ok(ForcedResponse::new(model, need(p.c, "c")?, need(p.omega, "omega")?)?)
}

pub fn energy(p: &Settings) -> Result<Report> {
    let fr = forced_response(p)?;
    let report = energy_report(&fr)?;
    let empirical = p.window.map(|w| empirical_averages(&fr, w)).transpose()?;
    let mut columns = vec!["j", "mean_kinetic", "mean_potential"];
    if empirical.is_some() {
        columns.extend(["empirical_kinetic", "empirical_potential"]);
    }
    let mut r = Report::new("energy", "energies", &columns);
    for j in 0..fr.n() {
        let mut row = vec![int(j + 1), num(report.mean_kinetic[j]), num(report.mean_potential[j])];
        if let Some(e) = &empirical {
            row.extend([num(e.kinetic[j]), num(e.potential[j])]);
        }
        r.push(row);
    }
    r.set("mean_kinetic_last", num(report.mean_kinetic[fr.n() - 1]));
    r.set("mean_potential_first", num(report.mean_potential_first));
    r.set("mean_potential_last", num(report.mean_potential_last));
    r.set("virial_residual", num(report.virial_residual));
    r.set("forced_virial_offset", num(forced_virial_offset(&fr)?));
    if let Some(e) = &empirical {
        r.set("window", num(e.window));
        r.set("sample_step", num(e.dt));
    }
    r.set("limits", Value::Object(report.limits.iter().map(|(k, &v)| (k.clone(), num(v))).collect()));
    Ok(r)
}

pub fn limits(p: &Settings) -> Result<Report> {
    let (w1, w, c) = (need(p.omega1, "omega1")?, need(p.omega, "omega")?, need(p.c, "c")?);
    let mut r = Report::new(
        "limits",
        "limits",
        &["I", "K", "U_last", "modal_kinetic_last", "modal_potential_last", "kinetic_first"],
    );
    r.push(vec![
        num(limit_integral(w1, w)?),
        num(limit_kinetic_last(w1, w, c)?),
        num(limit_potential_last(w1, w, c)?),
        num(modal_limit_kinetic_last(w1, w, c)?),
        num(modal_limit_potential_last(w1, w, c)?),
        num(LIMIT_KINETIC_FIRST),
    ]);
    r.flatten = true;
    Ok(r)
}

fn perturb(rng: &mut ChaCha8Rng, xs: &mut [f64], amplitude: f64) {
    if amplitude != 0.0 {
        for x in xs {
            *x += amplitude * rng.gen_range(-1.0..=1.0);
        }
    }
}

fn order_summary(r: &mut Report, traj: &harmonic_chain::Trajectory) {
    let order = order_preservation(traj, 0.0);
    let mut m = Map::new();
    m.insert("time".into(), num(order.min_gap.time));
    m.insert("pair".into(), int(order.min_gap.pair));
    m.insert("gap".into(), num(order.min_gap.gap));
    r.set("min_gap", num(order.min_gap.gap));
    r.set("min_gap_at", Value::Object(m));
    r.set("first_order_violation", order.violation.map_or(Value::Null, |v| num(v.time)));
}

pub fn dynamics(p: &Settings, seed: u64) -> Result<Report> {
    let spec = scenario(p)?;
    let target = if spec.forcing.is_time_dependent() {
        None
    } else {
        let eq = closed_form(&spec)?;
        if eq.regime == Regime::NoEquilibrium {
            return Err(no_equilibrium(&spec, eq.meta("threshold")));
        }
        Some(spec.free_coordinates(&eq.config)?)
    };
    let mut q = match &target {
        Some(x) => x.clone(),
        None => (1..=spec.n).map(|k| k as f64 * spec.natural_spacing).collect(),
    };
    let mut v = vec![0.0; q.len()];
    let noise = p.noise.unwrap_or(0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    perturb(&mut rng, &mut q, noise);
    perturb(&mut rng, &mut v, noise);
    let init = ChainState::new(q, v, 0.0)?;
    let dspec = DissipativeSpec::linear(spec, p.alpha.unwrap_or(DEFAULT_ALPHA));
    let options = IntegrateOptions { stride: p.stride.unwrap_or(DEFAULT_STRIDE).max(1), stop_on_convergence: true };
    let traj = integrate_with(
        &dspec,
        &init,
        p.t_end.unwrap_or(DEFAULT_T_END),
        p.dt.unwrap_or(DEFAULT_DT),
        options,
    )?;
    let mut r = Report::new("dynamics", "trajectory", &["t", "index", "q", "p"]);
    for s in &traj.states {
        for (k, (&qk, &pk)) in s.q.iter().zip(&s.p).enumerate() {
            r.push(vec![num(s.t), int(k), num(qk), num(pk)]);
        }
    }
    let last = traj.last();
    r.set("converged", traj.converged);
    r.set("final_time", num(last.t));
    r.set("initial_energy", num(dspec.energy(&init)));
    r.set("final_energy", num(dspec.energy(last)));
    r.set(
        "max_deviation",
        target.as_ref().map_or(Value::Null, |x| {
            num(last.q.iter().zip(x).fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs())))
        }),
    );
    order_summary(&mut r, &traj);
    Ok(r)
}

pub fn flow(p: &Settings, seed: u64) -> Result<Report> {
    let n = need(p.n, "n")?;
    let length = need(p.length, "L")?;
    let w1 = circle_omega1(p)?;
    let f = p.f.unwrap_or(0.0);
    let spacing = length / n.max(1) as f64;
    let mut q: Vec<f64> = (0..n).map(|k| k as f64 * spacing).collect();
    let mut v = vec![0.0; n];
    let noise = p.noise.unwrap_or(0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    perturb(&mut rng, &mut q, noise);
    perturb(&mut rng, &mut v, noise);
    let init = ChainState::new(q, v, 0.0)?;
    let (traj, report) = simulate_circle_flow_from(
        n,
        length,
        w1,
        f,
        GLaw::Linear(p.alpha.unwrap_or(DEFAULT_ALPHA)),
        &init,
        p.t_end.unwrap_or(DEFAULT_FLOW_T_END),
        p.dt.unwrap_or(DEFAULT_DT),
    )?;
    let last = traj.last();
    let mut r = Report::new("flow", "gaps", &["index", "gap", "expected_gap", "velocity"]);
    for k in 0..n {
        r.push(vec![int(k), num(report.gaps[k]), num(report.expected_gaps[k]), num(last.p[k])]);
    }
    r.set("final_time", num(last.t));
    r.set("target_velocity", num(report.target_velocity));
    r.set("mean_velocity", num(report.mean_velocity));
    r.set("max_velocity_deviation", num(report.max_velocity_deviation));
    r.set("max_gap_deviation", num(report.max_gap_deviation));
    order_summary(&mut r, &traj);
    Ok(r)
}

pub fn continuum(p: &Settings) -> Result<Report> {
    let params =
        ContinuumParams { f1: need(p.f1, "f1")?, w1: need(p.w1, "w1")?, length: p.length.unwrap_or(1.0) };
    let probes = match &p.probes {
        Some(x) => x.clone(),
        None => DEFAULT_PROBES.iter().map(|x| x * params.length).collect(),
    };
    let width = p.width.unwrap_or(DEFAULT_PROBE_WIDTH * params.length);
    let rep = continuum_convergence_at(&params, need(p.n, "n")?, &probes, width)?;
    let mut r = Report::new(
        "continuum",
        "probes",
        &["x", "width", "lattice", "equilibrium", "formula_lattice", "formula_equilibrium", "exact_equilibrium"],
    );
    for d in &rep.probes {
        r.push(vec![
            num(d.x),
            num(d.width),
            num(d.lattice),
            num(d.equilibrium),
            num(d.formula_lattice),
            num(d.formula_equilibrium),
            num(d.exact_equilibrium),
        ]);
    }
    r.set("n", int(rep.n));
    r.set("target", num(rep.target));
    r.set("lattice_energy", num(rep.lattice_energy));
    r.set("equilibrium_energy", num(rep.equilibrium_energy));
    r.set("lattice_deviation", num(rep.lattice_deviation));
    r.set("equilibrium_deviation", num(rep.equilibrium_deviation));
    r.set("interaction_energy", num(rep.interaction_energy));
    r.set("external_energy", num(rep.external_energy));
    r.set("interaction_limit_formula", num(rep.interaction_limit_formula));
    r.set("interaction_limit_exact", num(rep.interaction_limit_exact));
    r.set("x0", num(rep.x0));
    r.set("x0_limit", num(rep.x0_limit));
    r.set("formula_integrals", nums(&[rep.formula_integrals.0, rep.formula_integrals.1]));
    r.set("exact_integrals", nums(&[rep.exact_integrals.0, rep.exact_integrals.1]));
    Ok(r)
}

/// Summary fields reported per sweep point.
pub fn sweep_fields(command: Command) -> &'static [&'static str] {
    match command {
        Command::Equilibrium => &["regime", "x_first", "x_last", "min_gap", "energy"],
        Command::Spectrum => &["nu_min", "nu_max", "max_residual"],
        Command::Energy => &["mean_kinetic_last", "mean_potential_first", "mean_potential_last", "virial_residual"],
        Command::Limits => &["I", "K", "U_last", "modal_kinetic_last", "modal_potential_last"],
        Command::Dynamics => &["converged", "final_time", "final_energy", "max_deviation", "min_gap"],
        Command::Flow => &["target_velocity", "mean_velocity", "max_velocity_deviation", "max_gap_deviation"],
        Command::Continuum => &["lattice_energy", "equilibrium_energy", "target", "equilibrium_deviation"],
        Command::Sweep => &[],
    }
}
