use serde::Serialize;

use super::grid::{exact_sqrt, GridNetwork};
use super::protocol::{check_protocol_feasible, ActiveLink, Feasibility};
use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::rational::{ceil_int, ceil_sqrt2_times, int, Rational};

/// `(ceil(sqrt(2) (1 + delta)) + 1)^2`.
pub fn reuse_factor(delta: Rational) -> u64 {
    let s = ceil_sqrt2_times(&(int(1) + delta)) + 1;
    (s * s) as u64
}

/// `ceil(4 (2 + delta)^2 / delta^2)`.
pub fn concurrency_cap(delta: Rational) -> u64 {
    let two = int(2) + delta;
    ceil_int(&(int(4) * two * two / (delta * delta))) as u64
}

/// Squarelet clusters of `gc` nodes, coloured for spatial reuse.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterLayout {
    pub n: usize,
    pub gc: usize,
    /// Nodes along a cluster edge, `sqrt(gc)`.
    pub edge: usize,
    /// Clusters along the unit-square edge.
    pub per_side: usize,
    pub reuse: u64,
    /// Colour period along each axis, `sqrt(K)`.
    pub period: usize,
}

impl ClusterLayout {
    /// Square layout with clusters of `edge x edge` nodes.
    pub fn new(grid: &GridNetwork, edge: usize, delta: Rational) -> Result<Self> {
        if edge == 0 || !grid.side.is_multiple_of(edge) {
            return Err(Error::NoFeasibleCluster(format!(
                "cluster edge {edge} does not divide the grid side {}",
                grid.side
            )));
        }
        let reuse = reuse_factor(delta);
        Ok(ClusterLayout {
            n: grid.n,
            gc: edge * edge,
            edge,
            per_side: grid.side / edge,
            reuse,
            period: exact_sqrt(reuse as usize).expect("reuse factor is a square"),
        })
    }

    pub fn clusters(&self) -> usize {
        self.per_side * self.per_side
    }

    pub fn cluster_of(&self, grid: &GridNetwork, node: usize) -> usize {
        let (x, y) = grid.cell(node);
        (y / self.edge) * self.per_side + x / self.edge
    }

    /// Nodes of `cluster` in ascending id order.
    pub fn members(&self, grid: &GridNetwork, cluster: usize) -> Vec<usize> {
        let (cx, cy) = (cluster % self.per_side, cluster / self.per_side);
        let mut nodes: Vec<usize> = (0..self.edge)
            .flat_map(|dy| (0..self.edge).map(move |dx| (dx, dy)))
            .map(|(dx, dy)| grid.node_at(cx * self.edge + dx, cy * self.edge + dy))
            .collect();
        nodes.sort_unstable();
        nodes
    }

    /// Colour in `0..K`, from the cluster's row and column classes.
    pub fn color(&self, cluster: usize) -> usize {
        let (cx, cy) = (cluster % self.per_side, cluster / self.per_side);
        (cy % self.period) * self.period + cx % self.period
    }

    /// Cluster side length squared, `gc / n`.
    pub fn side2(&self) -> Rational {
        int(self.gc as i128) / int(self.n as i128)
    }
}

/// Smallest squarelet cluster holding the library (`gc M >= m`) whose nodes
/// all reach each other (`r^2 >= 2 gc / n`).
pub fn build_clusters(params: &SystemParams) -> Result<(GridNetwork, ClusterLayout)> {
    if params.full_range() {
        return Err(Error::NotApplicable(
            "r >= sqrt(2): every node reaches every other, no clustering needed".into(),
        ));
    }
    let grid = GridNetwork::new(params.n())?;
    let r2 = params.range() * params.range();
    let cache = params.cache_size();
    let m = int(params.m() as i128);
    for edge in (1..=grid.side).filter(|e| grid.side % e == 0) {
        let layout = ClusterLayout::new(&grid, edge, params.delta())?;
        if int(layout.gc as i128) * cache >= m && r2 >= int(2) * layout.side2() {
            return Ok((grid, layout));
        }
    }
    Err(Error::NoFeasibleCluster(format!(
        "no cluster size with gc M >= m and r >= sqrt(2 gc / n) for n = {}, m = {}, M = {cache}, r = {}",
        params.n(),
        params.m(),
        params.range()
    )))
}

/// Receivers of a transmitter in coloring checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Receivers {
    /// Every other node of the transmitter's cluster.
    Cluster,
    /// Every node strictly within range of the transmitter.
    Range,
}

/// Checks every slot in which each cluster of one colour has a single
/// transmitter, over every choice of transmitters.
pub fn verify_coloring(
    grid: &GridNetwork,
    layout: &ClusterLayout,
    r: Rational,
    delta: Rational,
    receivers: Receivers,
) -> Feasibility {
    let mut violations = Vec::new();
    let members: Vec<Vec<usize>> = (0..layout.clusters()).map(|c| layout.members(grid, c)).collect();
    for color in 0..layout.reuse as usize {
        let same: Vec<usize> = (0..layout.clusters()).filter(|&c| layout.color(c) == color).collect();
        // pairwise check covers every simultaneous choice: the model is a
        // conjunction over (transmitter, receiver) pairs
        for &a in &same {
            for &ta in &members[a] {
                let rx: Vec<usize> = match receivers {
                    Receivers::Cluster => members[a].iter().copied().filter(|&v| v != ta).collect(),
                    Receivers::Range => (0..grid.n).filter(|&v| v != ta && grid.dist2(ta, v) < r * r).collect(),
                };
                let own = ActiveLink { tx: ta, rx };
                let alone = check_protocol_feasible(grid, std::slice::from_ref(&own), r, delta);
                violations.extend(alone.violations);
                for &b in same.iter().filter(|&&b| b != a) {
                    for &tb in &members[b] {
                        let slot = [own.clone(), ActiveLink { tx: tb, rx: Vec::new() }];
                        violations.extend(check_protocol_feasible(grid, &slot, r, delta).violations);
                    }
                }
            }
        }
    }
    violations.sort_by_key(|v| format!("{v:?}"));
    violations.dedup();
    Feasibility {
        feasible: violations.is_empty(),
        violations,
    }
}
