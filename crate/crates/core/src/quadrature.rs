//! Composite Gauss-Legendre quadrature over equal panels.
//!
//! Panels are evaluated in parallel; per-panel partial integrals are
//! collected in panel order and reduced with [`pairwise_sum`], so the result
//! does not depend on the number of worker threads.

use rayon::prelude::*;

use crate::error::Result;
use crate::model::Interval;
use crate::summation::{pairwise_sum, CompensatedSum};

/// Nodes and weights of the `n`-point rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on `P_n` from the Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
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
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule: `panels` equal panels, one Gauss-Legendre rule per panel.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    interval: Interval,
    panels: usize,
    rule: GaussLegendre,
}

impl CompositeRule {
    pub fn new(interval: Interval, panels: usize, nodes_per_panel: usize) -> Self {
        Self {
            interval,
            panels: panels.max(1),
            rule: GaussLegendre::new(nodes_per_panel),
        }
    }

    /// Panels no wider than `max_width`.
    pub fn with_max_width(interval: Interval, max_width: f64, nodes_per_panel: usize) -> Self {
        let panels = (interval.length() / max_width).ceil();
        let panels = if panels.is_finite() && panels >= 1.0 {
            panels as usize
        } else {
            1
        };
        Self::new(interval, panels, nodes_per_panel)
    }

    /// Same interval, panels halved in width.
    pub fn refined(&self) -> Self {
        Self {
            interval: self.interval,
            panels: 2 * self.panels,
            rule: self.rule.clone(),
        }
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn nodes(&self) -> usize {
        self.panels * self.rule.len()
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn rule(&self) -> &GaussLegendre {
        &self.rule
    }

    /// Half the panel width.
    pub fn half_width(&self) -> f64 {
        0.5 * self.interval.length() / self.panels as f64
    }

    /// Integrates `M` functions at once. `init` builds per-worker scratch
    /// state handed to every evaluation of `f`.
    pub fn integrate<const M: usize, S, I, F>(&self, init: I, f: F) -> Result<[f64; M]>
    where
        I: Fn() -> S + Sync + Send,
        F: Fn(f64, &mut S) -> Result<[f64; M]> + Sync + Send,
    {
        self.integrate_panels(init, |mid, half, scratch| {
            let mut acc = [CompensatedSum::new(); M];
            for (x, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
                let values = f(mid + half * x, scratch)?;
                for (slot, v) in acc.iter_mut().zip(values) {
                    slot.add(w * half * v);
                }
            }
            Ok(acc.map(|a| a.value()))
        })
    }

    /// Like [`Self::integrate`], but `panel(mid, half, scratch)` returns the
    /// whole integral over `[mid - half, mid + half]`, for callers that
    /// share work between the nodes of a panel.
    pub fn integrate_panels<const M: usize, S, I, F>(&self, init: I, panel: F) -> Result<[f64; M]>
    where
        I: Fn() -> S + Sync + Send,
        F: Fn(f64, f64, &mut S) -> Result<[f64; M]> + Sync + Send,
    {
        let width = self.interval.length() / self.panels as f64;
        let lo = self.interval.lo();
        let half = 0.5 * width;
        let partials: Vec<[f64; M]> = (0..self.panels)
            .into_par_iter()
            .map_init(&init, |scratch, p| {
                panel(lo + p as f64 * width + half, half, scratch)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut out = [0.0; M];
        let mut column = Vec::with_capacity(partials.len());
        for (m, slot) in out.iter_mut().enumerate() {
            column.clear();
            column.extend(partials.iter().map(|p| p[m]));
            *slot = pairwise_sum(&column);
        }
        Ok(out)
    }
}
