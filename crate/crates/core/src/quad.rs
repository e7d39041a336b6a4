//! Adaptive Gauss–Legendre quadrature over any [`Real`] scalar.
//!
//! Each panel is integrated with an n-point and a 2n-point rule; the
//! difference is used as the panel's error estimate and the 2n-point value
//! is kept.

use crate::real::Real;

/// Nodes and weights on [-1, 1].
#[derive(Clone, Debug)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let nf = n as f64;
        for i in 0..n {
            let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut x = T::lit(guess);
            let mut dp = T::one();
            for it in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= T::epsilon() * T::lit(4.0) && it > 1 {
                    let (_, d) = legendre(n, x);
                    dp = d;
                    break;
                }
            }
            nodes.push(x);
            weights.push(T::lit(2.0) / ((T::one() - x * x) * dp * dp));
        }
        GaussLegendre { nodes, weights }
    }

    pub fn apply<F: FnMut(T) -> T>(&self, f: &mut F, a: T, b: T) -> T {
        let half = (b - a) / T::lit(2.0);
        let mid = (a + b) / T::lit(2.0);
        let mut s = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += *w * f(mid + half * *x);
        }
        s * half
    }
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for j in 2..=n {
        let jf = T::from_int(j as i64);
        let p2 = ((T::lit(2.0) * jf - T::one()) * x * p1 - (jf - T::one()) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (T::one(), T::zero());
    }
    let nf = T::from_int(n as i64);
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Integral value with an estimate of its absolute error.
#[derive(Clone, Copy, Debug)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
}

#[derive(Clone, Debug)]
pub struct Integrator<T> {
    low: GaussLegendre<T>,
    high: GaussLegendre<T>,
    pub max_panels: usize,
}

impl<T: Real> Integrator<T> {
    pub fn new(n: usize) -> Self {
        Integrator { low: GaussLegendre::new(n), high: GaussLegendre::new(2 * n), max_panels: 20_000 }
    }

    /// Adaptive integration of `f` over `[a, b]` to absolute tolerance `tol`.
    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F, a: T, b: T, tol: T) -> Estimate<T> {
        self.integrate_breaks(&mut f, &[a, b], tol)
    }

    /// Same, with forced panel boundaries at `points` (sorted). Each initial
    /// panel receives an equal share of `tol`.
    pub fn integrate_breaks<F: FnMut(T) -> T>(&self, f: &mut F, points: &[T], tol: T) -> Estimate<T> {
        let total = points[points.len() - 1] - points[0];
        let share = tol / T::from_int(points.len().saturating_sub(1).max(1) as i64);
        let mut value = T::zero();
        let mut error = T::zero();
        let mut stack: Vec<(T, T, T)> = points.windows(2).rev().map(|w| (w[0], w[1], share)).collect();
        let mut panels = 0usize;
        while let Some((a, b, allowed)) = stack.pop() {
            panels += 1;
            let g1 = self.low.apply(f, a, b);
            let g2 = self.high.apply(f, a, b);
            let err = (g2 - g1).abs();
            if err <= allowed || panels >= self.max_panels || (b - a).abs() <= T::epsilon() * total.abs() {
                value += g2;
                error += err;
            } else {
                let m = (a + b) / T::lit(2.0);
                let half = allowed / T::lit(2.0);
                stack.push((m, b, half));
                stack.push((a, m, half));
            }
        }
        Estimate { value, error }
    }
}
