//! Gauss–Legendre panel quadrature with adaptive bisection of panels.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Fixed-order Gauss–Legendre rule on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre<F> {
    nodes: Vec<F>,
    weights: Vec<F>,
}

impl<F: Real> GaussLegendre<F> {
    /// Builds the `n`-point rule; nodes are the roots of Pₙ found by Newton iteration.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = vec![0.0_f64; n];
        let mut weights = vec![0.0_f64; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self {
            nodes: nodes.into_iter().map(F::lit).collect(),
            weights: weights.into_iter().map(F::lit).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[F] {
        &self.nodes
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    /// Applies the rule on [a, b].
    pub fn integrate<G: FnMut(F) -> F>(&self, a: F, b: F, mut f: G) -> F {
        let half = (b - a) * F::lit(0.5);
        let mid = (a + b) * F::lit(0.5);
        let mut acc = F::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + w * f(mid + half * x);
        }
        acc * half
    }
}

/// Value of Pₙ(x) and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature<F> {
    pub value: F,
    pub error_estimate: F,
    pub evaluations: usize,
    pub panels: usize,
}

/// Adaptive integrator: each panel is accepted once the rule on the whole panel
/// and on its two halves agree to the panel's share of the absolute tolerance.
#[derive(Debug, Clone)]
pub struct AdaptiveQuadrature<F> {
    rule: GaussLegendre<F>,
    pub abs_tol: F,
    pub max_depth: u32,
    pub max_evaluations: usize,
}

impl<F: Real> AdaptiveQuadrature<F> {
    pub fn new(order: usize, abs_tol: F) -> Self {
        Self {
            rule: GaussLegendre::new(order),
            abs_tol,
            max_depth: 60,
            max_evaluations: 5_000_000,
        }
    }

    pub fn with_tolerance(&self, abs_tol: F) -> Self {
        Self {
            abs_tol,
            ..self.clone()
        }
    }

    pub fn integrate<G: FnMut(F) -> F>(&self, a: F, b: F, mut f: G) -> Result<Quadrature<F>> {
        let n = self.rule.order();
        if a == b {
            return Ok(Quadrature {
                value: F::zero(),
                error_estimate: F::zero(),
                evaluations: 0,
                panels: 0,
            });
        }
        let width = b - a;
        let whole = self.rule.integrate(a, b, &mut f);
        let mut evaluations = n;
        let mut stack = vec![(a, b, whole, 0_u32)];
        let mut value = F::zero();
        let mut error = F::zero();
        let mut panels = 0;
        let mut unresolved = false;
        while let Some((lo, hi, estimate, depth)) = stack.pop() {
            let mid = (lo + hi) * F::lit(0.5);
            let left = self.rule.integrate(lo, mid, &mut f);
            let right = self.rule.integrate(mid, hi, &mut f);
            evaluations += 2 * n;
            let refined = left + right;
            let diff = (refined - estimate).abs();
            let share = self.abs_tol * ((hi - lo) / width).abs();
            // Differences at the level of rounding in the panel sum cannot be refined away.
            let noise = F::epsilon() * F::lit(64.0) * (left.abs() + right.abs());
            let exhausted = depth >= self.max_depth || evaluations >= self.max_evaluations;
            if diff <= share.max(noise) || exhausted || !diff.is_finite() {
                if diff > share.max(noise) || !diff.is_finite() {
                    unresolved = true;
                }
                value = value + refined;
                error = error + diff;
                panels += 1;
            } else {
                stack.push((mid, hi, right, depth + 1));
                stack.push((lo, mid, left, depth + 1));
            }
        }
        // Panels that hit the refinement limit are tolerated as long as their
        // combined discrepancy still fits the overall budget.
        if (unresolved && !(error <= self.abs_tol)) || !value.is_finite() {
            return Err(Error::Numerical {
                what: "adaptive Gauss-Legendre quadrature",
                estimate: value.as_f64(),
                error: error.as_f64(),
                evaluations,
            });
        }
        Ok(Quadrature {
            value,
            error_estimate: error,
            evaluations,
            panels,
        })
    }
}

impl<F: Real> Default for AdaptiveQuadrature<F> {
    fn default() -> Self {
        Self::new(20, F::lit(1e-8))
    }
}
