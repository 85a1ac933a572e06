use crate::{Error, Result};

/// Nodes of a one-dimensional mesh on `(a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalMesh {
    nodes: Vec<f64>,
}

impl IntervalMesh {
    pub fn uniform(a: f64, b: f64, n_elems: usize) -> Result<Self> {
        if n_elems == 0 {
            return Err(Error::InvalidMesh("need at least one element".into()));
        }
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::InvalidMesh(format!("bad endpoints ({a}, {b})")));
        }
        let h = (b - a) / n_elems as f64;
        let mut nodes: Vec<f64> = (0..=n_elems).map(|i| a + i as f64 * h).collect();
        nodes[n_elems] = b;
        Self::from_nodes(nodes)
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidMesh("need at least two nodes".into()));
        }
        if let Some(i) = nodes
            .windows(2)
            .position(|w| !(w[1] > w[0]) || !w[0].is_finite() || !w[1].is_finite())
        {
            return Err(Error::InvalidMesh(format!(
                "nodes not strictly increasing at index {i}"
            )));
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elems(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn a(&self) -> f64 {
        self.nodes[0]
    }

    pub fn b(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// `|Ω| = b - a`.
    pub fn length(&self) -> f64 {
        self.b() - self.a()
    }

    pub fn element_length(&self, e: usize) -> f64 {
        self.nodes[e + 1] - self.nodes[e]
    }

    pub fn midpoint(&self, e: usize) -> f64 {
        0.5 * (self.nodes[e] + self.nodes[e + 1])
    }

    pub fn midpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.windows(2).map(|w| 0.5 * (w[0] + w[1]))
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }

    /// Midpoint-rule quadrature of `f` over the mesh.
    pub fn integrate_midpoint(&self, f: impl Fn(f64) -> f64) -> f64 {
        (0..self.n_elems())
            .map(|e| self.element_length(e) * f(self.midpoint(e)))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_mesh_covers_interval() {
        let m = IntervalMesh::uniform(0.0, 1.0, 7).unwrap();
        assert_eq!(m.n_nodes(), 8);
        assert_eq!(m.nodes()[0], 0.0);
        assert_eq!(m.nodes()[7], 1.0);
        let total: f64 = (0..7).map(|e| m.element_length(e)).sum();
        assert!((total - 1.0).abs() <= 1e-12);
        assert!((0..7).all(|e| m.element_length(e) > 0.0));
    }

    #[test]
    fn rejects_bad_meshes() {
        assert!(IntervalMesh::uniform(0.0, 1.0, 0).is_err());
        assert!(IntervalMesh::uniform(1.0, 0.0, 4).is_err());
        assert!(IntervalMesh::from_nodes(vec![0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(IntervalMesh::from_nodes(vec![0.0]).is_err());
    }
}
