//! Globally adaptive Gauss-Legendre quadrature.
//!
//! Each panel is integrated with one rule on the whole panel and on its two halves;
//! the difference is the panel's error estimate. The panel with the largest
//! estimate is bisected until the summed estimate drops below the tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::{Error, Result};

pub const DEFAULT_ORDER: usize = 15;
pub const DEFAULT_ABS_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_EVALS: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule on `[-1, 1]`, nodes from Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
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
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: &mut F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let r = 0.5 * (b - a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + r * x);
        }
        s * r
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
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

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    /// Rule on the left and right halves.
    left: f64,
    right: f64,
    error: f64,
}

impl Panel {
    fn value(&self) -> f64 {
        self.left + self.right
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then(other.a.total_cmp(&self.a))
    }
}

#[derive(Debug, Clone)]
pub struct Integrator {
    rule: GaussLegendre,
    pub abs_tol: f64,
    pub max_evals: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self::new(DEFAULT_ORDER, DEFAULT_ABS_TOL, DEFAULT_MAX_EVALS)
    }
}

impl Integrator {
    pub fn new(order: usize, abs_tol: f64, max_evals: usize) -> Self {
        Self {
            rule: GaussLegendre::new(order),
            abs_tol,
            max_evals,
        }
    }

    /// Integral of `f` over `[a, b]`, with the initial panels split at `breaks`.
    pub fn integrate<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
        breaks: &[f64],
    ) -> Result<QuadratureResult> {
        if a == b {
            return Ok(QuadratureResult {
                value: 0.0,
                error: 0.0,
                evaluations: 0,
            });
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let mut edges = vec![lo];
        let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > lo && x < hi).collect();
        inner.sort_by(f64::total_cmp);
        inner.dedup();
        edges.extend(inner);
        edges.push(hi);

        let per_rule = self.rule.order();
        let mut evaluations = 0usize;
        let mut heap = BinaryHeap::new();
        for w in edges.windows(2) {
            let (pa, pb) = (w[0], w[1]);
            let pm = 0.5 * (pa + pb);
            let whole = self.rule.integrate(&mut f, pa, pb);
            let left = self.rule.integrate(&mut f, pa, pm);
            let right = self.rule.integrate(&mut f, pm, pb);
            evaluations += 3 * per_rule;
            heap.push(Panel {
                a: pa,
                b: pb,
                left,
                right,
                error: (left + right - whole).abs(),
            });
        }

        let min_width = 1e-13 * (hi - lo).max(1.0);
        let mut settled: Vec<Panel> = Vec::new();
        let mut running: f64 = heap.iter().map(|p| p.error).sum();
        loop {
            if running <= self.abs_tol || heap.is_empty() || evaluations >= self.max_evals {
                // Re-sum exactly; the running total drifts with cancellation.
                let all = || heap.iter().chain(settled.iter());
                let total_error: f64 = all().map(|p| p.error).sum();
                let value = sign * all().map(Panel::value).sum::<f64>();
                if total_error <= self.abs_tol || heap.is_empty() {
                    return Ok(QuadratureResult {
                        value,
                        error: total_error,
                        evaluations,
                    });
                }
                if evaluations >= self.max_evals {
                    return Err(Error::Quadrature {
                        value,
                        error: total_error,
                        evaluations,
                    });
                }
                running = total_error;
            }
            let worst = heap.pop().expect("non-empty heap");
            if worst.b - worst.a < min_width {
                settled.push(worst);
                continue;
            }
            running -= worst.error;
            let m = 0.5 * (worst.a + worst.b);
            for (pa, pb, whole) in [(worst.a, m, worst.left), (m, worst.b, worst.right)] {
                let pm = 0.5 * (pa + pb);
                let left = self.rule.integrate(&mut f, pa, pm);
                let right = self.rule.integrate(&mut f, pm, pb);
                evaluations += 2 * per_rule;
                let error = (left + right - whole).abs();
                running += error;
                heap.push(Panel {
                    a: pa,
                    b: pb,
                    left,
                    right,
                    error,
                });
            }
        }
    }
}
