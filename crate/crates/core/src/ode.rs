//! Classical fixed-step fourth-order Runge-Kutta.

use crate::scalar::Scalar;

/// Reusable RK4 stepper for `y' = f(t, y)`; `f` writes the derivative into
/// its last argument.
#[derive(Debug, Clone)]
pub struct Rk4<T> {
    k1: Vec<T>,
    k2: Vec<T>,
    k3: Vec<T>,
    k4: Vec<T>,
    tmp: Vec<T>,
}

impl<T: Scalar> Rk4<T> {
    pub fn new(dim: usize) -> Self {
        let z = vec![T::zero(); dim];
        Self { k1: z.clone(), k2: z.clone(), k3: z.clone(), k4: z.clone(), tmp: z }
    }

    /// Advances `y` from `t` to `t + h` in place.
    pub fn step<F: FnMut(T, &[T], &mut [T])>(&mut self, f: &mut F, t: T, y: &mut [T], h: T) {
        let half = h / T::two();
        let sixth = h / T::of_usize(6);
        f(t, y, &mut self.k1);
        for i in 0..y.len() {
            self.tmp[i] = y[i] + half * self.k1[i];
        }
        f(t + half, &self.tmp, &mut self.k2);
        for i in 0..y.len() {
            self.tmp[i] = y[i] + half * self.k2[i];
        }
        f(t + half, &self.tmp, &mut self.k3);
        for i in 0..y.len() {
            self.tmp[i] = y[i] + h * self.k3[i];
        }
        f(t + h, &self.tmp, &mut self.k4);
        for i in 0..y.len() {
            y[i] = y[i] + sixth * (self.k1[i] + T::two() * (self.k2[i] + self.k3[i]) + self.k4[i]);
        }
    }
}
