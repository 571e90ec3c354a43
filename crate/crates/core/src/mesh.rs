use serde::Serialize;

use crate::error::{Error, Result};

/// Node set on `[0, L]`, refined polynomially towards singular endpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradedMesh {
    nodes: Vec<f64>,
    grading: f64,
}

impl GradedMesh {
    /// `n` elements on `[0, 1]`, graded with exponent `mu` towards both ends.
    pub fn symmetric(n: usize, mu: f64) -> Result<Self> {
        check(n, mu)?;
        let mut nodes: Vec<f64> = (0..=n)
            .map(|j| {
                let t = j as f64 / n as f64;
                if t <= 0.5 {
                    0.5 * (2.0 * t).powf(mu)
                } else {
                    1.0 - 0.5 * (2.0 * (1.0 - t)).powf(mu)
                }
            })
            .collect();
        nodes[n] = 1.0;
        Ok(GradedMesh { nodes, grading: mu })
    }

    /// `n` elements on `[0, 1]`, graded with exponent `mu` towards `1` only.
    pub fn toward_right(n: usize, mu: f64) -> Result<Self> {
        check(n, mu)?;
        let mut nodes: Vec<f64> = (0..=n).map(|j| 1.0 - (1.0 - j as f64 / n as f64).powf(mu)).collect();
        nodes[0] = 0.0;
        nodes[n] = 1.0;
        Ok(GradedMesh { nodes, grading: mu })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::symmetric(n, 1.0)
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Invalid("a mesh needs at least two nodes".into()));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Invalid("mesh nodes must be strictly increasing".into()));
        }
        Ok(GradedMesh { nodes, grading: f64::NAN })
    }

    /// Every other node; `None` when the element count is odd.
    pub fn coarsened(&self) -> Option<GradedMesh> {
        let n = self.elements();
        if n % 2 != 0 || n < 2 {
            return None;
        }
        Some(GradedMesh { nodes: self.nodes.iter().step_by(2).copied().collect(), grading: self.grading })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    pub fn length(&self) -> f64 {
        self.nodes[self.nodes.len() - 1] - self.nodes[0]
    }

    pub fn min_width(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// Piecewise-linear interpolation of nodal values.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let n = &self.nodes;
        let i = match n.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => return values[i],
            Err(0) => return values[0],
            Err(i) if i >= n.len() => return values[n.len() - 1],
            Err(i) => i - 1,
        };
        let t = (x - n[i]) / (n[i + 1] - n[i]);
        values[i] * (1.0 - t) + values[i + 1] * t
    }
}

fn check(n: usize, mu: f64) -> Result<()> {
    if n < 1 {
        return Err(Error::Invalid("mesh needs at least one element".into()));
    }
    if !(mu >= 1.0 && mu.is_finite()) {
        return Err(Error::Invalid(format!("grading exponent must be >= 1, got {mu}")));
    }
    Ok(())
}
