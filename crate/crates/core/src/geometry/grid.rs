use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{rat, Rational};

/// `n` nodes on a `sqrt(n) x sqrt(n)` lattice in the unit square, spacing
/// `1/sqrt(n)`, each node at the centre of its cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridNetwork {
    pub n: usize,
    pub side: usize,
}

pub fn exact_sqrt(n: usize) -> Option<usize> {
    let s = (n as f64).sqrt().round() as usize;
    (s * s == n).then_some(s)
}

impl GridNetwork {
    pub fn new(n: usize) -> Result<Self> {
        let side = exact_sqrt(n).filter(|&s| s > 0).ok_or_else(|| {
            Error::InvalidParams(format!("grid layout needs a perfect-square n, got {n}"))
        })?;
        Ok(GridNetwork { n, side })
    }

    /// Column and row of `node`.
    pub fn cell(&self, node: usize) -> (usize, usize) {
        (node % self.side, node / self.side)
    }

    pub fn node_at(&self, x: usize, y: usize) -> usize {
        y * self.side + x
    }

    pub fn position(&self, node: usize) -> (Rational, Rational) {
        let (x, y) = self.cell(node);
        let d = 2 * self.side as i128;
        (rat(2 * x as i128 + 1, d), rat(2 * y as i128 + 1, d))
    }

    pub fn dist2(&self, a: usize, b: usize) -> Rational {
        let (ax, ay) = self.position(a);
        let (bx, by) = self.position(b);
        let (dx, dy) = (ax - bx, ay - by);
        dx * dx + dy * dy
    }
}
