//! Scenario and configuration types, plus the potential energy and forces
//! that every other module is built on.
//!
//! All masses are 1. A scenario's *free coordinates* are the particle
//! positions that are not pinned by the boundary conditions:
//!
//! | variant           | stored configuration        | free coordinates            |
//! |-------------------|-----------------------------|-----------------------------|
//! | `FixedRightEnd`   | `x_0..=x_N`, `x_N = L`      | `x_0..x_{N-1}`              |
//! | `FixedLeftEnd`    | `x_0..=x_N`, `x_0 = 0`      | `x_1..=x_N`                 |
//! | `SpringBothEnds`  | `x_0..=x_N`                 | `x_0..=x_N`                 |
//! | `Circle`          | gaps `Δ_1..=Δ_N`, `ΣΔ = L`  | `x_0..x_{N-1}` (unwrapped)  |
//! | `TwoEdge`         | `x_1..=x_{N1}`, `y_1..=y_{N2}` | `x_1..x_{N1-1}`, `y_1..y_{N2-1}` |

use crate::error::{Error, Result};
use crate::scalar::{accumulate, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `N` particles on a circle of length `L`, gaps taken modulo `L`.
    Circle,
    /// Particles `0..=N` on a line, `x_N ≡ L`, particle 0 tied to the origin by `ω₀`.
    FixedRightEnd,
    /// Particles `0..=N` on a line, `x_0 ≡ 0`; the periodically driven chain.
    FixedLeftEnd,
    /// Particles `0..=N`, both ends tied by `ω₀` springs to `0` and `L`.
    SpringBothEnds,
    /// Two edges with a common vertex, far ends of both edges pinned.
    TwoEdge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Forcing<T> {
    None,
    /// Constant force `f` on particle 0.
    PointOnFirst(T),
    /// Force `f` on particle 0 and `-f` on particle `N`.
    OpposedEnds(T),
    /// Constant force `f` on every free particle.
    Uniform(T),
    /// `c sin(ωt)` on the last particle.
    PeriodicOnLast { amplitude: T, frequency: T },
    /// Drive `f` on particle 0 and counterforce `-φ` on every particle of a circle.
    CircleDrive { f: T, phi: T },
}

impl<T: Scalar> Forcing<T> {
    pub fn is_time_dependent(&self) -> bool {
        matches!(self, Forcing::PeriodicOnLast { .. })
    }
}

/// Parameters of the two-edge star graph. Natural spacings are `a_i / M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoEdgeParams<T> {
    pub n1: usize,
    pub n2: usize,
    pub m: usize,
    pub length1: T,
    pub length2: T,
    pub a0: T,
    pub a1: T,
    pub a2: T,
    pub omega0: T,
    pub omega1: T,
    pub omega2: T,
}

impl<T: Scalar> TwoEdgeParams<T> {
    pub fn total(&self) -> usize {
        self.n1 + self.n2
    }

    /// `b = N / M`.
    pub fn b(&self) -> T {
        T::of_usize(self.total()) / T::of_usize(self.m)
    }

    /// `c = N₁ / N`.
    pub fn c(&self) -> T {
        T::of_usize(self.n1) / T::of_usize(self.total())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec<T> {
    pub variant: Variant,
    /// Particle count `N` (`N₁ + N₂` for the two-edge graph).
    pub n: usize,
    pub length: T,
    pub natural_spacing: T,
    pub omega0: T,
    pub omega1: T,
    pub omega2: T,
    pub forcing: Forcing<T>,
    pub two_edge: Option<TwoEdgeParams<T>>,
}

impl<T: Scalar> ScenarioSpec<T> {
    /// Circle of length `L` with `N` particles at natural spacing `L/N`.
    pub fn circle(n: usize, length: T, omega1: T, f: T, phi: T) -> Self {
        let natural_spacing = if n > 0 { length / T::of_usize(n) } else { T::zero() };
        Self {
            variant: Variant::Circle,
            n,
            length,
            natural_spacing,
            omega0: T::zero(),
            omega1,
            omega2: T::zero(),
            forcing: Forcing::CircleDrive { f, phi },
            two_edge: None,
        }
    }

    pub fn fixed_right_end(n: usize, length: T, a: T, omega0: T, omega1: T, forcing: Forcing<T>) -> Self {
        Self::line(Variant::FixedRightEnd, n, length, a, omega0, omega1, forcing)
    }

    pub fn spring_both_ends(n: usize, length: T, a: T, omega0: T, omega1: T, forcing: Forcing<T>) -> Self {
        Self::line(Variant::SpringBothEnds, n, length, a, omega0, omega1, forcing)
    }

    /// Chain pinned at the origin; its length is the natural length `N a`.
    pub fn fixed_left_end(n: usize, a: T, omega1: T, forcing: Forcing<T>) -> Self {
        let length = T::of_usize(n) * a;
        Self::line(Variant::FixedLeftEnd, n, length, a, T::zero(), omega1, forcing)
    }

    pub fn two_edge(params: TwoEdgeParams<T>) -> Self {
        Self {
            variant: Variant::TwoEdge,
            n: params.total(),
            length: params.length1 + params.length2,
            natural_spacing: params.a1 / T::of_usize(params.m.max(1)),
            omega0: params.omega0,
            omega1: params.omega1,
            omega2: params.omega2,
            forcing: Forcing::None,
            two_edge: Some(params),
        }
    }

    fn line(variant: Variant, n: usize, length: T, a: T, omega0: T, omega1: T, forcing: Forcing<T>) -> Self {
        Self {
            variant,
            n,
            length,
            natural_spacing: a,
            omega0,
            omega1,
            omega2: T::zero(),
            forcing,
            two_edge: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: &str| Err(Error::InvalidScenario(msg.to_string()));
        let zero = T::zero();
        if self.n == 0 {
            return invalid("particle count must be at least 1");
        }
        if self.omega0 < zero || self.omega1 < zero || self.omega2 < zero {
            return invalid("spring frequencies must be nonnegative");
        }
        match self.variant {
            Variant::TwoEdge => {
                let Some(p) = self.two_edge.as_ref() else {
                    return invalid("two-edge scenario without edge parameters");
                };
                if p.n1 < 2 || p.n2 < 2 {
                    return invalid("each edge needs at least 2 particles");
                }
                if p.m == 0 {
                    return invalid("scale M must be at least 1");
                }
                if !(p.length1 > zero && p.length2 > zero) {
                    return invalid("edge lengths must be positive");
                }
                if p.omega0 < zero || p.omega1 < zero || p.omega2 < zero {
                    return invalid("spring frequencies must be nonnegative");
                }
            }
            Variant::FixedLeftEnd => {}
            _ => {
                if !(self.length > zero) {
                    return invalid("length must be positive");
                }
            }
        }
        if self.variant == Variant::Circle && !(self.omega1 > zero) {
            return invalid("circle needs a positive spring frequency");
        }
        let allowed = match (self.variant, &self.forcing) {
            (_, Forcing::None) => true,
            (Variant::Circle, Forcing::CircleDrive { .. }) => true,
            (Variant::FixedRightEnd, Forcing::PointOnFirst(_) | Forcing::Uniform(_)) => true,
            (
                Variant::SpringBothEnds,
                Forcing::PointOnFirst(_) | Forcing::OpposedEnds(_) | Forcing::Uniform(_),
            ) => true,
            (Variant::FixedLeftEnd, Forcing::PeriodicOnLast { .. }) => true,
            _ => false,
        };
        if !allowed {
            return Err(Error::InvalidScenario(format!(
                "forcing {:?} is not defined for variant {:?}",
                self.forcing, self.variant
            )));
        }
        Ok(())
    }

    /// Number of free coordinates.
    pub fn free_len(&self) -> usize {
        match self.variant {
            Variant::Circle | Variant::FixedRightEnd | Variant::FixedLeftEnd => self.n,
            Variant::SpringBothEnds => self.n + 1,
            Variant::TwoEdge => {
                let p = self.edges();
                p.n1 + p.n2 - 2
            }
        }
    }

    pub(crate) fn edges(&self) -> &TwoEdgeParams<T> {
        self.two_edge.as_ref().expect("two-edge parameters")
    }

    /// Extracts the free coordinates of `config`, checking its shape and the
    /// pinned coordinates.
    pub fn free_coordinates(&self, config: &Configuration<T>) -> Result<Vec<T>> {
        let pinned_ok = |value: T, target: T| {
            let scale = 1.0_f64.max(target.as_f64().abs());
            (value - target).as_f64().abs() <= 1e-12 * scale
        };
        match (self.variant, config) {
            (Variant::FixedRightEnd | Variant::FixedLeftEnd | Variant::SpringBothEnds, Configuration::Line(x)) => {
                expect_len(self.n + 1, x.len())?;
                match self.variant {
                    Variant::FixedRightEnd => {
                        if !pinned_ok(x[self.n], self.length) {
                            return Err(Error::Contract(format!("x_N = {} but must equal L = {}", x[self.n], self.length)));
                        }
                        Ok(x[..self.n].to_vec())
                    }
                    Variant::FixedLeftEnd => {
                        if !pinned_ok(x[0], T::zero()) {
                            return Err(Error::Contract(format!("x_0 = {} but must equal 0", x[0])));
                        }
                        Ok(x[1..].to_vec())
                    }
                    _ => Ok(x.clone()),
                }
            }
            (Variant::Circle, Configuration::Circle { gaps }) => {
                expect_len(self.n, gaps.len())?;
                let total = accumulate(gaps);
                if !pinned_ok(total, self.length) {
                    return Err(Error::Contract(format!("gaps sum to {} but circle length is {}", total, self.length)));
                }
                let mut x = Vec::with_capacity(self.n);
                let mut pos = T::zero();
                x.push(pos);
                for &g in &gaps[..self.n - 1] {
                    pos = pos + g;
                    x.push(pos);
                }
                Ok(x)
            }
            (Variant::TwoEdge, Configuration::TwoEdge { x, y }) => {
                let p = self.edges();
                expect_len(p.n1, x.len())?;
                expect_len(p.n2, y.len())?;
                if !pinned_ok(x[p.n1 - 1], p.length1) || !pinned_ok(y[p.n2 - 1], p.length2) {
                    return Err(Error::Contract("edge end points must equal the edge lengths".into()));
                }
                let mut free = x[..p.n1 - 1].to_vec();
                free.extend_from_slice(&y[..p.n2 - 1]);
                Ok(free)
            }
            _ => Err(Error::Contract(format!("configuration kind does not match variant {:?}", self.variant))),
        }
    }

    /// Inverse of [`free_coordinates`](Self::free_coordinates).
    pub fn configuration_from_free(&self, free: &[T]) -> Result<Configuration<T>> {
        expect_len(self.free_len(), free.len())?;
        Ok(match self.variant {
            Variant::FixedRightEnd => {
                let mut x = free.to_vec();
                x.push(self.length);
                Configuration::Line(x)
            }
            Variant::FixedLeftEnd => {
                let mut x = Vec::with_capacity(self.n + 1);
                x.push(T::zero());
                x.extend_from_slice(free);
                Configuration::Line(x)
            }
            Variant::SpringBothEnds => Configuration::Line(free.to_vec()),
            Variant::Circle => {
                let n = self.n;
                let mut gaps: Vec<T> = (1..n).map(|k| free[k] - free[k - 1]).collect();
                gaps.push(free[0] + self.length - free[n - 1]);
                Configuration::Circle { gaps }
            }
            Variant::TwoEdge => {
                let p = self.edges();
                let mut x = free[..p.n1 - 1].to_vec();
                x.push(p.length1);
                let mut y = free[p.n1 - 1..].to_vec();
                y.push(p.length2);
                Configuration::TwoEdge { x, y }
            }
        })
    }

    /// Quadratic spring terms of the potential in free coordinates.
    pub(crate) fn springs(&self) -> Vec<Spring<T>> {
        let mut out = Vec::new();
        let w0 = self.omega0.square();
        let w1 = self.omega1.square();
        let a = self.natural_spacing;
        let n = self.n;
        match self.variant {
            Variant::FixedRightEnd => {
                out.push(Spring::one(w0, 0, T::one(), T::zero()));
                for i in 1..n {
                    out.push(Spring::bond(w1, i, i - 1, -a));
                }
                out.push(Spring::one(w1, n - 1, -T::one(), self.length - a));
            }
            Variant::SpringBothEnds => {
                out.push(Spring::one(w0, 0, T::one(), T::zero()));
                for i in 1..=n {
                    out.push(Spring::bond(w1, i, i - 1, -a));
                }
                out.push(Spring::one(w0, n, T::one(), -self.length));
            }
            Variant::FixedLeftEnd => {
                out.push(Spring::one(w1, 0, T::one(), -a));
                for i in 1..n {
                    out.push(Spring::bond(w1, i, i - 1, -a));
                }
            }
            Variant::Circle => {
                for i in 1..n {
                    out.push(Spring::bond(w1, i, i - 1, -a));
                }
                if n == 1 {
                    out.push(Spring::constant(w1, self.length - a));
                } else {
                    out.push(Spring::bond(w1, 0, n - 1, self.length - a));
                }
            }
            Variant::TwoEdge => {
                let p = self.edges();
                let m = T::of_usize(p.m);
                let (g0, g1, g2) = (p.omega0.square(), p.omega1.square(), p.omega2.square());
                let (rest0, rest1, rest2) = (p.a0 / m, p.a1 / m, p.a2 / m);
                let nx = p.n1 - 1;
                // edge 1: free x_1..x_{N1-1} at indices 0..nx, x_{N1} = L1
                for i in 1..nx {
                    out.push(Spring::bond(g1, i, i - 1, -rest1));
                }
                out.push(Spring::one(g1, nx - 1, -T::one(), p.length1 - rest1));
                // edge 2: free y_1..y_{N2-1} at indices nx.., y_{N2} = L2
                let ny = p.n2 - 1;
                for i in 1..ny {
                    out.push(Spring::bond(g2, nx + i, nx + i - 1, -rest2));
                }
                out.push(Spring::one(g2, nx + ny - 1, -T::one(), p.length2 - rest2));
                // junction through the common vertex: distance x_1 + y_1
                out.push(Spring {
                    stiffness: g0,
                    terms: [(0, T::one()), (nx, T::one())],
                    nterms: 2,
                    offset: -rest0,
                });
            }
        }
        out
    }

    /// External loads `f_i(t)` on the free coordinates (`U_ext = -Σ f_i x_i`).
    pub fn loads(&self, t: T) -> Vec<T> {
        let mut out = vec![T::zero(); self.free_len()];
        let last = out.len() - 1;
        match self.forcing {
            Forcing::None => {}
            Forcing::PointOnFirst(f) => out[0] = out[0] + f,
            Forcing::OpposedEnds(f) => {
                out[0] = out[0] + f;
                out[last] = out[last] - f;
            }
            Forcing::Uniform(f) => out.iter_mut().for_each(|v| *v = *v + f),
            Forcing::PeriodicOnLast { amplitude, frequency } => {
                out[last] = out[last] + periodic_drive(amplitude, frequency, t);
            }
            Forcing::CircleDrive { f, phi } => {
                out.iter_mut().for_each(|v| *v = *v - phi);
                out[0] = out[0] + f;
            }
        }
        out
    }

    /// Potential energy in terms of free coordinates.
    pub fn potential_of_free(&self, free: &[T], t: T) -> T {
        let half = T::one() / T::two();
        let mut terms: Vec<T> = self
            .springs()
            .iter()
            .map(|s| half * s.stiffness * s.stretch(free).square())
            .collect();
        terms.extend(self.loads(t).iter().zip(free).map(|(&f, &x)| -f * x));
        accumulate(&terms)
    }

    /// `-∇U` in terms of free coordinates.
    pub fn force_of_free(&self, free: &[T], t: T) -> Vec<T> {
        let mut force = self.loads(t);
        for s in self.springs() {
            let tension = s.stiffness * s.stretch(free);
            for &(i, c) in s.active() {
                force[i] = force[i] - tension * c;
            }
        }
        force
    }
}

fn expect_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

pub(crate) fn periodic_drive<T: Scalar>(amplitude: T, frequency: T, t: T) -> T {
    amplitude * T::of_f64((frequency.as_f64() * t.as_f64()).sin())
}

/// `½ k (Σ c_i x_i + offset)²`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Spring<T> {
    pub stiffness: T,
    pub terms: [(usize, T); 2],
    pub nterms: usize,
    pub offset: T,
}

impl<T: Scalar> Spring<T> {
    fn one(stiffness: T, i: usize, c: T, offset: T) -> Self {
        Self { stiffness, terms: [(i, c), (i, T::zero())], nterms: 1, offset }
    }

    /// `x_hi - x_lo + offset`.
    fn bond(stiffness: T, hi: usize, lo: usize, offset: T) -> Self {
        Self { stiffness, terms: [(hi, T::one()), (lo, -T::one())], nterms: 2, offset }
    }

    fn constant(stiffness: T, offset: T) -> Self {
        Self { stiffness, terms: [(0, T::zero()), (0, T::zero())], nterms: 0, offset }
    }

    pub fn active(&self) -> &[(usize, T)] {
        &self.terms[..self.nterms]
    }

    pub fn stretch(&self, free: &[T]) -> T {
        self.active().iter().fold(self.offset, |acc, &(i, c)| acc + c * free[i])
    }
}

/// Particle positions on the graph.
#[derive(Debug, Clone, PartialEq)]
pub enum Configuration<T> {
    /// `x_0..=x_N`.
    Line(Vec<T>),
    /// Gaps `Δ_1..=Δ_N`; coordinates are reconstructed from `x_0 = 0`.
    Circle { gaps: Vec<T> },
    /// `x_1..=x_{N1}` on the first edge and `y_1..=y_{N2}` on the second,
    /// both measured from the common vertex.
    TwoEdge { x: Vec<T>, y: Vec<T> },
}

impl<T: Scalar> Configuration<T> {
    /// Coordinates in storage order (circle: `x_0 = 0 .. x_{N-1}`; two-edge: `x` then `y`).
    pub fn coords(&self) -> Vec<T> {
        match self {
            Configuration::Line(x) => x.clone(),
            Configuration::Circle { gaps } => {
                let mut x = Vec::with_capacity(gaps.len());
                let mut pos = T::zero();
                x.push(pos);
                for &g in gaps.iter().take(gaps.len().saturating_sub(1)) {
                    pos = pos + g;
                    x.push(pos);
                }
                x
            }
            Configuration::TwoEdge { x, y } => x.iter().chain(y).copied().collect(),
        }
    }

    /// Nearest-neighbour gaps (two-edge: along `x` then along `y`).
    pub fn gaps(&self) -> Vec<T> {
        match self {
            Configuration::Line(x) => x.windows(2).map(|w| w[1] - w[0]).collect(),
            Configuration::Circle { gaps } => gaps.clone(),
            Configuration::TwoEdge { x, y } => x
                .windows(2)
                .map(|w| w[1] - w[0])
                .chain(y.windows(2).map(|w| w[1] - w[0]))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Configuration::Line(x) => x.len(),
            Configuration::Circle { gaps } => gaps.len(),
            Configuration::TwoEdge { x, y } => x.len() + y.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Configuration<U> {
        match self {
            Configuration::Line(x) => Configuration::Line(x.iter().map(|&v| f(v)).collect()),
            Configuration::Circle { gaps } => Configuration::Circle { gaps: gaps.iter().map(|&v| f(v)).collect() },
            Configuration::TwoEdge { x, y } => Configuration::TwoEdge {
                x: x.iter().map(|&v| f(v)).collect(),
                y: y.iter().map(|&v| f(v)).collect(),
            },
        }
    }
}

/// Phase-space state: coordinates `q`, momenta `p` (unit masses) at time `t`.
///
/// For the driven chain `q_k = x_k - k a` are displacements from the lattice;
/// for time-domain simulations `q` holds the free coordinates themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState<T> {
    pub q: Vec<T>,
    pub p: Vec<T>,
    pub t: T,
}

impl<T: Scalar> ChainState<T> {
    pub fn new(q: Vec<T>, p: Vec<T>, t: T) -> Result<Self> {
        expect_len(q.len(), p.len())?;
        Ok(Self { q, p, t })
    }

    pub fn at_rest(q: Vec<T>) -> Self {
        let p = vec![T::zero(); q.len()];
        Self { q, p, t: T::zero() }
    }

    pub fn kinetic_energy(&self) -> T {
        let half = T::one() / T::two();
        let terms: Vec<T> = self.p.iter().map(|&p| half * p * p).collect();
        accumulate(&terms)
    }
}

/// Total potential energy `U(config, t)` including boundary springs and
/// external-force work terms.
pub fn potential_energy<T: Scalar>(spec: &ScenarioSpec<T>, config: &Configuration<T>, t: T) -> Result<T> {
    spec.validate()?;
    let free = spec.free_coordinates(config)?;
    Ok(spec.potential_of_free(&free, t))
}

/// `-∇U` on the free coordinates, in free-coordinate order.
pub fn force_vector<T: Scalar>(spec: &ScenarioSpec<T>, config: &Configuration<T>, t: T) -> Result<Vec<T>> {
    spec.validate()?;
    let free = spec.free_coordinates(config)?;
    Ok(spec.force_of_free(&free, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn uniform_circle_has_no_interaction_energy() {
        let spec = ScenarioSpec::circle(5, 10.0, 1.3, 0.0, 0.0);
        let config = Configuration::Circle { gaps: vec![2.0; 5] };
        assert_eq!(potential_energy(&spec, &config, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn single_particle_fixed_right_end() {
        let spec = ScenarioSpec::fixed_right_end(1, 1.0, 0.0, 1.0, 1.0, Forcing::PointOnFirst(0.0));
        let config = Configuration::Line(vec![0.0, 1.0]);
        assert_eq!(potential_energy(&spec, &config, 0.0).unwrap(), 0.5);
    }

    #[test]
    fn hand_force_balance_is_exact_in_rationals() {
        let one = Rational::from_integer(1);
        let spec = ScenarioSpec::fixed_right_end(2, r(2, 1), one, one, one, Forcing::PointOnFirst(one));
        let config = Configuration::Line(vec![r(2, 3), r(4, 3), r(2, 1)]);
        let force = force_vector(&spec, &config, Rational::from_integer(0)).unwrap();
        assert_eq!(force, vec![Rational::from_integer(0); 2]);
    }

    #[test]
    fn natural_spacing_is_force_free() {
        let spec = ScenarioSpec::spring_both_ends(4, 4.0, 1.0, 0.7, 1.1, Forcing::None);
        let config = Configuration::Line(vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        let force = force_vector(&spec, &config, 0.0).unwrap();
        assert!(force.iter().all(|&f| f == 0.0));
    }

    #[test]
    fn wrong_length_is_a_dimension_error() {
        let spec = ScenarioSpec::fixed_right_end(3, 1.0, 0.2, 1.0, 1.0, Forcing::None);
        let err = potential_energy(&spec, &Configuration::Line(vec![0.0, 1.0]), 0.0).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 4, actual: 2 });
        let err = force_vector(&spec, &Configuration::Circle { gaps: vec![0.25; 4] }, 0.0).unwrap_err();
        assert_eq!(err.class(), "contract-violation");
    }

    #[test]
    fn pinned_end_must_be_honoured() {
        let spec = ScenarioSpec::fixed_right_end(2, 1.0, 0.2, 1.0, 1.0, Forcing::None);
        let err = potential_energy(&spec, &Configuration::Line(vec![0.0, 0.5, 0.9]), 0.0).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    #[test]
    fn forcing_must_match_variant() {
        let spec = ScenarioSpec::fixed_right_end(2, 1.0, 0.2, 1.0, 1.0, Forcing::OpposedEnds(1.0));
        assert!(spec.validate().is_err());
        let spec = ScenarioSpec::circle(3, 0.0, 1.0, 0.0, 0.0);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn free_coordinate_round_trip() {
        let p = TwoEdgeParams {
            n1: 3,
            n2: 4,
            m: 2,
            length1: 1.5,
            length2: 2.0,
            a0: 1.0,
            a1: 1.0,
            a2: 1.0,
            omega0: 1.0,
            omega1: 1.0,
            omega2: 1.0,
        };
        let spec = ScenarioSpec::two_edge(p);
        let free = vec![0.1, 0.7, 0.2, 0.9, 1.4];
        let config = spec.configuration_from_free(&free).unwrap();
        assert_eq!(spec.free_coordinates(&config).unwrap(), free);

        let circle = ScenarioSpec::circle(3, 6.0, 1.0, 0.0, 0.0);
        let config = circle.configuration_from_free(&[0.0, 1.5, 4.0]).unwrap();
        assert_eq!(config.gaps(), vec![1.5, 2.5, 2.0]);
        assert_eq!(config.coords(), vec![0.0, 1.5, 4.0]);
    }

    #[test]
    fn periodic_drive_enters_with_time() {
        let spec = ScenarioSpec::fixed_left_end(
            1,
            1.0,
            1.0,
            Forcing::PeriodicOnLast { amplitude: 2.0, frequency: 1.0 },
        );
        let config = Configuration::Line(vec![0.0, 1.5]);
        let t = std::f64::consts::FRAC_PI_2;
        let u = potential_energy(&spec, &config, t).unwrap();
        assert!((u - (0.5 * 0.25 - 1.5 * 2.0)).abs() < 1e-15);
    }
}
