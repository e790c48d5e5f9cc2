//! Closed-form equilibria and their ordering regimes, plus a direct
//! minimizer of the quadratic potential used to check them.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Bound;

use crate::chain_model::{Configuration, Forcing, ScenarioSpec, TwoEdgeParams, Variant};
use crate::error::{Error, Result};
use crate::linalg::Tridiagonal;
use crate::scalar::{accumulate, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    /// Strictly increasing coordinates.
    Increasing,
    /// All coordinates coincide.
    Collapsed,
    /// Strictly decreasing coordinates.
    Decreasing,
    /// Pushed against the fixed end: every coordinate equals `L`.
    Clamped,
    NoEquilibrium,
    /// Gaps of both signs (or a zero gap next to a nonzero one).
    NonMonotone,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Increasing => "Increasing",
            Regime::Collapsed => "Collapsed",
            Regime::Decreasing => "Decreasing",
            Regime::Clamped => "Clamped",
            Regime::NoEquilibrium => "NoEquilibrium",
            Regime::NonMonotone => "NonMonotone",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Interval of the force parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window<T> {
    pub lower: Bound<T>,
    pub upper: Bound<T>,
}

impl<T: Scalar> Window<T> {
    pub fn open(lower: T, upper: T) -> Self {
        Self { lower: Bound::Excluded(lower), upper: Bound::Excluded(upper) }
    }

    pub fn closed(lower: T, upper: T) -> Self {
        Self { lower: Bound::Included(lower), upper: Bound::Included(upper) }
    }

    pub fn unbounded() -> Self {
        Self { lower: Bound::Unbounded, upper: Bound::Unbounded }
    }

    pub fn contains(&self, f: T) -> bool {
        let above = match self.lower {
            Bound::Included(l) => f >= l,
            Bound::Excluded(l) => f > l,
            Bound::Unbounded => true,
        };
        let below = match self.upper {
            Bound::Included(u) => f <= u,
            Bound::Excluded(u) => f < u,
            Bound::Unbounded => true,
        };
        above && below
    }

    pub fn lower_value(&self) -> Option<T> {
        match self.lower {
            Bound::Included(v) | Bound::Excluded(v) => Some(v),
            Bound::Unbounded => None,
        }
    }

    pub fn upper_value(&self) -> Option<T> {
        match self.upper {
            Bound::Included(v) | Bound::Excluded(v) => Some(v),
            Bound::Unbounded => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult<T> {
    /// Scenario whose force balance `config` satisfies.
    pub scenario: ScenarioSpec<T>,
    pub config: Configuration<T>,
    pub regime: Regime,
    /// Forces for which the configuration is strictly ordered.
    pub ordering_window: Window<T>,
    pub metadata: BTreeMap<String, T>,
}

impl<T: Scalar> EquilibriumResult<T> {
    pub fn meta(&self, key: &str) -> Option<T> {
        self.metadata.get(key).copied()
    }
}

fn meta<T: Scalar>(pairs: &[(&str, T)]) -> BTreeMap<String, T> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidScenario(msg.to_string()))
    }
}

fn check_chain<T: Scalar>(n: usize, length: T, omega0: T, omega1: T) -> Result<()> {
    require(n >= 1, "particle count must be at least 1")?;
    require(length > T::zero(), "length must be positive")?;
    require(omega0 >= T::zero(), "omega0 must be nonnegative")?;
    require(omega1 > T::zero(), "omega1 must be positive")
}

/// Regime of a chain whose gaps are linear in the index, from its end gaps.
fn regime_from_end_gaps<T: Scalar>(first: T, last: T) -> Regime {
    let zero = T::zero();
    if first > zero && last > zero {
        Regime::Increasing
    } else if first < zero && last < zero {
        Regime::Decreasing
    } else if first == zero && last == zero {
        Regime::Collapsed
    } else {
        Regime::NonMonotone
    }
}

/// Uniform-gap profile `ε_k = ε₁ + (k-1) f N / ω²`, `k = 1..=N`.
pub fn circle_epsilon<T: Scalar>(n: usize, omega1: T, f: T) -> Vec<T> {
    let nn = T::of_usize(n);
    let w2 = omega1.square();
    let step = f * nn / w2;
    let first = -f * nn * T::of_usize(n.saturating_sub(1)) / (T::two() * w2);
    (0..n).map(|k| first + T::of_usize(k) * step).collect()
}

/// Force bound `2ω²L/(N-1)` of the circle equilibrium.
pub fn circle_threshold<T: Scalar>(n: usize, length: T, omega1: T) -> T {
    T::two() * omega1.square() * length / T::of_usize(n - 1)
}

/// Equilibrium of the driven circle with counterforce `φ = f/N` per particle.
pub fn circle_equilibrium<T: Scalar>(n: usize, length: T, omega1: T, f: T) -> Result<EquilibriumResult<T>> {
    require(n >= 2, "circle equilibrium needs at least 2 particles")?;
    require(length > T::zero(), "length must be positive")?;
    require(omega1 > T::zero(), "omega1 must be positive")?;
    let nn = T::of_usize(n);
    let phi = f / nn;
    let eps = circle_epsilon(n, omega1, f);
    let n2 = nn * nn;
    let base = length / nn;
    let gaps: Vec<T> = eps.iter().map(|&e| base + e / n2).collect();
    let w = circle_threshold(n, length, omega1);
    let window = Window::open(-w, w);
    let regime = if window.contains(f) { Regime::Increasing } else { Regime::NoEquilibrium };
    let scenario = ScenarioSpec::circle(n, length, omega1, f, phi);
    Ok(EquilibriumResult {
        scenario,
        config: Configuration::Circle { gaps },
        regime,
        ordering_window: window,
        metadata: meta(&[
            ("phi", phi),
            ("epsilon_1", eps[0]),
            ("epsilon_step", f * nn / omega1.square()),
            ("threshold", w),
        ]),
    })
}

/// Point force `f` on particle 0 of a chain with `x_N ≡ L`.
pub fn fixed_end_equilibrium<T: Scalar>(
    n: usize,
    length: T,
    a: T,
    omega0: T,
    omega1: T,
    f: T,
) -> Result<EquilibriumResult<T>> {
    check_chain(n, length, omega0, omega1)?;
    let (w0, w1) = (omega0.square(), omega1.square());
    let nn = T::of_usize(n);
    let den = w1 + w0 * nn;
    let threshold = w0 * length + w1 * a;
    let gap = (threshold - f) / den;
    let x0 = (w1 * (length - nn * a) + nn * f) / den;
    let scenario = ScenarioSpec::fixed_right_end(n, length, a, omega0, omega1, Forcing::PointOnFirst(f));
    let (regime, coords) = if f < threshold {
        let coords = (0..=n).map(|k| length - T::of_usize(n - k) * gap).collect();
        (Regime::Increasing, coords)
    } else if f == threshold {
        (Regime::Collapsed, vec![length; n + 1])
    } else {
        (Regime::Clamped, vec![length; n + 1])
    };
    Ok(EquilibriumResult {
        scenario,
        config: Configuration::Line(coords),
        regime,
        ordering_window: Window {
            lower: Bound::Included(w1 * (a - length / nn)),
            upper: Bound::Excluded(threshold),
        },
        metadata: meta(&[("x0", x0), ("gap", gap), ("threshold", threshold)]),
    })
}

/// Point force `f` on particle 0, both ends tied by `ω₀` springs.
pub fn spring_ends_equilibrium<T: Scalar>(
    n: usize,
    length: T,
    a: T,
    omega0: T,
    omega1: T,
    f: T,
) -> Result<EquilibriumResult<T>> {
    check_chain(n, length, omega0, omega1)?;
    require(omega0 > T::zero(), "omega0 must be positive for spring ends")?;
    let (w0, w1) = (omega0.square(), omega1.square());
    let nn = T::of_usize(n);
    let den = T::two() * w1 + nn * w0;
    let threshold = w0 * length + T::two() * w1 * a;
    let gap = (threshold - f) / den;
    let x0 = (f + w1 * (gap - a)) / w0;
    let regime = ordered_regime(f, threshold);
    let coords = if regime == Regime::Collapsed {
        vec![length + w1 * a / w0; n + 1]
    } else {
        (0..=n).map(|k| x0 + T::of_usize(k) * gap).collect()
    };
    let spread = length - a * nn;
    Ok(EquilibriumResult {
        scenario: ScenarioSpec::spring_both_ends(n, length, a, omega0, omega1, Forcing::PointOnFirst(f)),
        config: Configuration::Line(coords),
        regime,
        ordering_window: Window::closed(-w1 * spread / (nn + w1 / w0), w0 * spread),
        metadata: meta(&[("x0", x0), ("gap", gap), ("threshold", threshold)]),
    })
}

fn ordered_regime<T: Scalar>(f: T, threshold: T) -> Regime {
    if f < threshold {
        Regime::Increasing
    } else if f == threshold {
        Regime::Collapsed
    } else {
        Regime::Decreasing
    }
}

/// Forces `f` on particle 0 and `-f` on particle `N`, spring ends.
pub fn opposed_forces_equilibrium<T: Scalar>(
    n: usize,
    length: T,
    a: T,
    omega0: T,
    omega1: T,
    f: T,
) -> Result<EquilibriumResult<T>> {
    check_chain(n, length, omega0, omega1)?;
    let (w0, w1) = (omega0.square(), omega1.square());
    let nn = T::of_usize(n);
    let den = T::two() * w1 + nn * w0;
    let threshold = (w0 * length + T::two() * w1 * a) / T::two();
    let gap = T::two() * (threshold - f) / den;
    let x0 = (w1 * length + nn * (f - w1 * a)) / den;
    let regime = ordered_regime(f, threshold);
    let coords = if regime == Regime::Collapsed {
        vec![length / T::two(); n + 1]
    } else {
        (0..=n).map(|k| x0 + T::of_usize(k) * gap).collect()
    };
    Ok(EquilibriumResult {
        scenario: ScenarioSpec::spring_both_ends(n, length, a, omega0, omega1, Forcing::OpposedEnds(f)),
        config: Configuration::Line(coords),
        regime,
        ordering_window: Window {
            lower: Bound::Included(w1 * a - w1 * length / nn),
            upper: Bound::Excluded(threshold),
        },
        metadata: meta(&[("x0", x0), ("gap", gap), ("threshold", threshold)]),
    })
}

/// Uniform force on every free particle, `x_N ≡ L`.
///
/// Gaps are `g_k = (α_k f + β) / (ω₁² + ω₀² N)`, linear in `k`, so ordering
/// is decided by `g_1` and `g_N`.
pub fn uniform_force_fixed_end<T: Scalar>(
    n: usize,
    length: T,
    a: T,
    omega0: T,
    omega1: T,
    f: T,
) -> Result<EquilibriumResult<T>> {
    check_chain(n, length, omega0, omega1)?;
    let (w0, w1) = (omega0.square(), omega1.square());
    let two = T::two();
    let nn = T::of_usize(n);
    let den = w1 + w0 * nn;
    let beta = w0 * length + a * w1;
    let alpha = |k: usize| {
        let kk = T::of_usize(k);
        w0 * nn * (nn + T::one() - two * kk) / (two * w1) - kk
    };
    let (alpha_first, alpha_last) = (alpha(1), alpha(n));
    // end gaps in threshold form so their signs agree with the window
    let upper = -beta / alpha_last;
    let g_last = alpha_last * (f - upper) / den;
    let (g_first, lower) = if alpha_first == T::zero() {
        (beta / den, None)
    } else {
        let t = -beta / alpha_first;
        (alpha_first * (f - t) / den, Some(t))
    };
    let gap = |k: usize| {
        if k == 1 {
            g_first
        } else if k == n {
            g_last
        } else {
            (alpha(k) * f + beta) / den
        }
    };
    let mut coords = vec![length; n + 1];
    for k in (1..=n).rev() {
        coords[k - 1] = coords[k] - gap(k);
    }
    // natural order 0 <= x_0 < ... < x_N = L
    let x0_lower = -two * w1 * (length - nn * a) / (nn * (nn + T::one()));
    let ordering_window = Window {
        lower: match lower {
            Some(t) if alpha_first > T::zero() && t >= x0_lower => Bound::Excluded(t),
            _ => Bound::Included(x0_lower),
        },
        upper: Bound::Excluded(upper),
    };
    let x0 = w1 * (length + nn * (nn + T::one()) * f / (two * w1) - nn * a) / den;
    let mut metadata = meta(&[
        ("x0", x0),
        ("gap_first", g_first),
        ("gap_last", g_last),
        ("threshold", upper),
        ("x0_nonnegative_lower", x0_lower),
    ]);
    if let Some(t) = lower {
        metadata.insert("first_gap_threshold".into(), t);
    }
    Ok(EquilibriumResult {
        scenario: ScenarioSpec::fixed_right_end(n, length, a, omega0, omega1, Forcing::Uniform(f)),
        config: Configuration::Line(coords),
        regime: regime_from_end_gaps(g_first, g_last),
        ordering_window,
        metadata,
    })
}

/// Uniform force on every particle, spring ends.
///
/// Gaps are `β + f (N + 1 - 2k) / (2ω₁²)` with `β = (2ω₁²a + ω₀²L)/(2ω₁² + Nω₀²)`.
pub fn uniform_force_spring_ends<T: Scalar>(
    n: usize,
    length: T,
    a: T,
    omega0: T,
    omega1: T,
    f: T,
) -> Result<EquilibriumResult<T>> {
    check_chain(n, length, omega0, omega1)?;
    require(omega0 > T::zero(), "omega0 must be positive for spring ends")?;
    let (w0, w1) = (omega0.square(), omega1.square());
    let two = T::two();
    let nn = T::of_usize(n);
    let den = two * w1 + nn * w0;
    let beta = (two * w1 * a + w0 * length) / den;
    let slope = |k: usize| (T::of_usize(n + 1) - two * T::of_usize(k)) / (two * w1);
    let scenario = ScenarioSpec::spring_both_ends(n, length, a, omega0, omega1, Forcing::Uniform(f));
    let edge = if n > 1 { Some(beta / slope(1)) } else { None };
    let gap = |k: usize| match edge {
        Some(w) if k == 1 => slope(1) * (f + w),
        Some(w) if k == n => slope(1) * (w - f),
        _ => beta + slope(k) * f,
    };
    let gaps: Vec<T> = (1..=n).map(gap).collect();
    let r1 = gaps[0] - a;
    let x0 = (w1 * r1 + f) / w0;
    let mut coords = Vec::with_capacity(n + 1);
    coords.push(x0);
    for &g in &gaps {
        let last = *coords.last().unwrap();
        coords.push(last + g);
    }
    let b = w1 * w0 * (length - nn * a) / (den * (nn + T::one()));
    let ordering_window = match edge {
        Some(w) => Window::open(-w, w),
        None => Window::unbounded(),
    };
    let regime = regime_from_end_gaps(gaps[0], gaps[n - 1]);
    let mut metadata = meta(&[("x0", x0), ("beta", beta), ("box_b", b), ("box_lower", -two * b), ("box_upper", two * b)]);
    if let Some(w) = edge {
        metadata.insert("threshold".into(), w);
    }
    Ok(EquilibriumResult { scenario, config: Configuration::Line(coords), regime, ordering_window, metadata })
}

/// Junction stretch `R₀ = x₁ + y₁ - a₀/M` of the two-edge equilibrium.
pub fn two_edge_junction_stretch<T: Scalar>(p: &TwoEdgeParams<T>) -> T {
    let m = T::of_usize(p.m);
    let k1 = T::of_usize(p.n1 - 1);
    let k2 = T::of_usize(p.n2 - 1);
    let w0 = p.omega0.square();
    let num = p.length1 + p.length2 - p.a1 * k1 / m - p.a2 * k2 / m - p.a0 / m;
    let den = T::one() + w0 * (k1 / p.omega1.square() + k2 / p.omega2.square());
    num / den
}

/// Large-`M` approximation of `M R₀` in terms of `b = N/M` and `c = N₁/N`,
/// which counts `N₁` and `N₂` bonds on the edges instead of `N₁-1` and `N₂-1`.
pub fn two_edge_r0_asymptotic<T: Scalar>(p: &TwoEdgeParams<T>) -> T {
    let m = T::of_usize(p.m);
    let (b, c) = (p.b(), p.c());
    let one = T::one();
    let num = p.length1 + p.length2 - p.a1 * c * b - p.a2 * (one - c) * b - p.a0 / m;
    let den = one / m + b * p.omega0.square() * (c / p.omega1.square() + (one - c) / p.omega2.square());
    num / den
}

/// Minimum energy of the two-edge graph in the same large-`M` approximation.
pub fn two_edge_energy_asymptotic<T: Scalar>(p: &TwoEdgeParams<T>) -> T {
    let m = T::of_usize(p.m);
    let (b, c) = (p.b(), p.c());
    let one = T::one();
    let num = p.length1 + p.length2 - p.a1 * c * b - p.a2 * (one - c) * b - p.a0 / m;
    let bm = b * m;
    let den = T::two() * bm * (p.omega0.square() * (c / p.omega1.square() + (one - c) / p.omega2.square()) + one / bm);
    p.omega0.square() * num * num / den
}

pub fn two_edge_equilibrium<T: Scalar>(spec: &ScenarioSpec<T>) -> Result<EquilibriumResult<T>> {
    require(spec.variant == Variant::TwoEdge, "two-edge equilibrium needs a two-edge scenario")?;
    spec.validate()?;
    let p = *spec.edges();
    let zero = T::zero();
    require(
        p.omega0 > zero && p.omega1 > zero && p.omega2 > zero,
        "two-edge frequencies must be positive",
    )?;
    let m = T::of_usize(p.m);
    let w0 = p.omega0.square();
    let r = two_edge_junction_stretch(&p);
    let gap1 = w0 * r / p.omega1.square() + p.a1 / m;
    let gap2 = w0 * r / p.omega2.square() + p.a2 / m;
    let (k1, k2) = (p.n1 - 1, p.n2 - 1);
    let x: Vec<T> = (1..=p.n1).map(|i| p.length1 - T::of_usize(p.n1 - i) * gap1).collect();
    let y: Vec<T> = (1..=p.n2).map(|i| p.length2 - T::of_usize(p.n2 - i) * gap2).collect();
    let regime = if gap1 > zero && gap2 > zero { Regime::Increasing } else { Regime::NoEquilibrium };
    let energy = w0 / T::two()
        * (w0 * (T::of_usize(k2) / p.omega2.square() + T::of_usize(k1) / p.omega1.square()) + T::one())
        * r
        * r;
    Ok(EquilibriumResult {
        scenario: spec.clone(),
        config: Configuration::TwoEdge { x, y },
        regime,
        ordering_window: Window::unbounded(),
        metadata: meta(&[
            ("junction_stretch", r),
            ("r0", m * r),
            ("r0_asymptotic", two_edge_r0_asymptotic(&p)),
            ("gap1", gap1),
            ("gap2", gap2),
            ("min_energy", energy),
            ("min_energy_asymptotic", two_edge_energy_asymptotic(&p)),
        ]),
    })
}

/// Dispatches to the closed form matching the scenario's variant and forcing.
pub fn closed_form<T: Scalar>(spec: &ScenarioSpec<T>) -> Result<EquilibriumResult<T>> {
    spec.validate()?;
    let (n, l, a, w0, w1) = (spec.n, spec.length, spec.natural_spacing, spec.omega0, spec.omega1);
    let zero = T::zero();
    match (spec.variant, spec.forcing) {
        (Variant::Circle, Forcing::None) => circle_equilibrium(n, l, w1, zero),
        (Variant::Circle, Forcing::CircleDrive { f, .. }) => circle_equilibrium(n, l, w1, f),
        (Variant::FixedRightEnd, Forcing::None) => fixed_end_equilibrium(n, l, a, w0, w1, zero),
        (Variant::FixedRightEnd, Forcing::PointOnFirst(f)) => fixed_end_equilibrium(n, l, a, w0, w1, f),
        (Variant::FixedRightEnd, Forcing::Uniform(f)) => uniform_force_fixed_end(n, l, a, w0, w1, f),
        (Variant::SpringBothEnds, Forcing::None) => spring_ends_equilibrium(n, l, a, w0, w1, zero),
        (Variant::SpringBothEnds, Forcing::PointOnFirst(f)) => spring_ends_equilibrium(n, l, a, w0, w1, f),
        (Variant::SpringBothEnds, Forcing::OpposedEnds(f)) => opposed_forces_equilibrium(n, l, a, w0, w1, f),
        (Variant::SpringBothEnds, Forcing::Uniform(f)) => uniform_force_spring_ends(n, l, a, w0, w1, f),
        (Variant::TwoEdge, _) => two_edge_equilibrium(spec),
        (Variant::FixedLeftEnd, Forcing::None) => {
            require(w1 > zero, "omega1 must be positive")?;
            let coords = (0..=n).map(|k| T::of_usize(k) * a).collect();
            Ok(EquilibriumResult {
                scenario: spec.clone(),
                config: Configuration::Line(coords),
                regime: if a > zero { Regime::Increasing } else { Regime::Collapsed },
                ordering_window: Window::unbounded(),
                metadata: meta(&[("gap", a)]),
            })
        }
        (variant, forcing) => Err(Error::Contract(format!(
            "no static equilibrium for {variant:?} with forcing {forcing:?}"
        ))),
    }
}

/// Unconstrained minimizer of the scenario's quadratic potential, by a
/// direct tridiagonal solve of `∇U = 0` on the free coordinates.
///
/// The circle is translation invariant; its phase is fixed by `x₀ = 0`, and a
/// nonzero net external force means no stationary point exists.
pub fn minimize_quadratic<T: Scalar>(spec: &ScenarioSpec<T>) -> Result<Configuration<T>> {
    spec.validate()?;
    if spec.forcing.is_time_dependent() {
        return Err(Error::Contract("minimize_quadratic needs time-independent forcing".into()));
    }
    let loads = spec.loads(T::zero());
    let len = spec.free_len();
    // position of free index i in the banded unknown vector, None if pinned
    let slot: Box<dyn Fn(usize) -> Option<usize>> = match spec.variant {
        Variant::Circle => Box::new(|i| i.checked_sub(1)),
        Variant::TwoEdge => {
            let nx = spec.edges().n1 - 1;
            Box::new(move |i| Some(if i < nx { nx - 1 - i } else { i }))
        }
        _ => Box::new(Some),
    };
    let unknowns = if spec.variant == Variant::Circle { len - 1 } else { len };
    if spec.variant == Variant::Circle {
        let net = accumulate(&loads);
        let scale: f64 = loads.iter().map(|v| v.as_f64().abs()).sum();
        if net != T::zero() && net.as_f64().abs() > 1e-12 * scale {
            return Err(Error::NoEquilibrium(format!("net external force {net} on the circle")));
        }
    }
    let mut matrix = Tridiagonal::zeros(unknowns);
    let mut rhs = vec![T::zero(); unknowns];
    for (i, &load) in loads.iter().enumerate() {
        if let Some(s) = slot(i) {
            rhs[s] = rhs[s] + load;
        }
    }
    for spring in spec.springs() {
        let active: Vec<(usize, T)> =
            spring.active().iter().filter_map(|&(i, c)| slot(i).map(|s| (s, c))).collect();
        for &(si, ci) in &active {
            rhs[si] = rhs[si] - spring.stiffness * spring.offset * ci;
            for &(sj, cj) in &active {
                matrix.add(si, sj, spring.stiffness * ci * cj);
            }
        }
    }
    let solution = matrix.solve(&rhs)?;
    let free: Vec<T> = (0..len).map(|i| slot(i).map_or(T::zero(), |s| solution[s])).collect();
    spec.configuration_from_free(&free)
}
