//! Composite Gauss–Legendre rules.

use serde::{Deserialize, Serialize};

use crate::error::{MorseError, Result};

/// Nodes and weights of the `order`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..order.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut derivative = 0.0;
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(order, x);
                derivative = dp;
                let step = p / dp;
                x -= step;
                if step.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(order, x);
            if dp.is_finite() {
                derivative = dp;
            }
            let w = 2.0 / ((1.0 - x * x) * derivative * derivative);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Panel count, points per panel and accuracy settings of a composite rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub panels: usize,
    pub order: usize,
    /// Support boundary: densities below this fraction of their peak are dropped.
    pub truncation: f64,
    /// Largest accepted change between a rule and its refinement.
    pub refinement_tolerance: f64,
}

impl Default for QuadratureConfig {
    /// 200 points per axis: 10 panels of 20 nodes.
    fn default() -> Self {
        Self {
            panels: 10,
            order: 20,
            truncation: 1e-14,
            refinement_tolerance: 1e-7,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.panels == 0 || self.order == 0 {
            return Err(MorseError::Domain(
                "quadrature needs at least one panel and one node".into(),
            ));
        }
        if !(self.truncation > 0.0 && self.truncation < 1.0) {
            return Err(MorseError::Domain(format!(
                "truncation must lie in (0, 1), got {}",
                self.truncation
            )));
        }
        if !(self.refinement_tolerance > 0.0) {
            return Err(MorseError::Domain(
                "refinement tolerance must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Same rule with twice as many panels.
    pub fn refined(&self) -> Self {
        Self {
            panels: 2 * self.panels,
            ..*self
        }
    }

    pub fn points_per_axis(&self) -> usize {
        self.panels * self.order
    }
}

/// Flattened nodes and weights of a composite rule on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    /// Equal-width panels over `[a, b]`.
    pub fn uniform(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let edges: Vec<f64> = (0..=panels)
            .map(|i| a + (b - a) * i as f64 / panels as f64)
            .collect();
        Self::on_edges(&edges, order)
    }

    /// One `order`-point panel between each consecutive pair of `edges`.
    pub fn on_edges(edges: &[f64], order: usize) -> Self {
        let base = GaussLegendre::new(order);
        let mut nodes = Vec::with_capacity((edges.len().saturating_sub(1)) * order);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for pair in edges.windows(2) {
            let half = 0.5 * (pair[1] - pair[0]);
            let mid = 0.5 * (pair[1] + pair[0]);
            for (&x, &w) in base.nodes().iter().zip(base.weights()) {
                nodes.push(mid + half * x);
                weights.push(half * w);
            }
        }
        Self { nodes, weights }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}
