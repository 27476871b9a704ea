//! Gauss–Legendre rules on [0, 1] and finite intervals.

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_NODES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { nodes: DEFAULT_NODES }
    }
}

impl QuadratureSpec {
    pub fn new(nodes: usize) -> Result<Self> {
        let q = QuadratureSpec { nodes };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(Error::InvalidArgument(format!(
                "quadrature needs at least 2 nodes, got {}",
                self.nodes
            )));
        }
        Ok(())
    }

    /// (node, weight) pairs on [a, b], sorted by increasing node.
    pub fn rule(&self, a: f64, b: f64) -> Result<Vec<(f64, f64)>> {
        self.validate()?;
        let gl = GaussLegendre::new(self.nodes)
            .map_err(|e| Error::InvalidArgument(format!("quadrature: {e}")))?;
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut pairs: Vec<(f64, f64)> = gl
            .into_node_weight_pairs()
            .into_iter()
            .map(|(x, w)| (mid + half * x, half * w))
            .collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        Ok(pairs)
    }

    pub fn unit_rule(&self) -> Result<Vec<(f64, f64)>> {
        self.rule(0.0, 1.0)
    }
}

/// Σ wᵢ·vᵢ in the given (node) order.
pub fn weighted_sum(weights: impl IntoIterator<Item = f64>, values: impl IntoIterator<Item = f64>) -> f64 {
    weights.into_iter().zip(values).fold(0.0, |acc, (w, v)| acc + w * v)
}
