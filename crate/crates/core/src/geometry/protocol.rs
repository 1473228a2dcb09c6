use serde::Serialize;

use super::grid::GridNetwork;
use crate::rational::{int, Rational};

/// One transmitter and its intended receivers, active in a slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActiveLink {
    pub tx: usize,
    pub rx: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// Receiver at distance `>= r` from its transmitter.
    OutOfRange { tx: usize, rx: usize },
    /// Another transmitter closer than `(1 + delta) r` to the receiver.
    Interference { tx: usize, rx: usize, interferer: usize },
    /// Receiver is itself transmitting in the slot.
    HalfDuplex { tx: usize, rx: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

/// Protocol-model check of one slot.
pub fn check_protocol_feasible(
    grid: &GridNetwork,
    slot: &[ActiveLink],
    r: Rational,
    delta: Rational,
) -> Feasibility {
    let r2 = r * r;
    let guard = (int(1) + delta) * (int(1) + delta) * r2;
    let mut violations = Vec::new();
    for link in slot {
        for &rx in &link.rx {
            if slot.iter().any(|l| l.tx == rx) {
                violations.push(Violation::HalfDuplex { tx: link.tx, rx });
            }
            if grid.dist2(link.tx, rx) >= r2 {
                violations.push(Violation::OutOfRange { tx: link.tx, rx });
            }
            for other in slot.iter().filter(|l| l.tx != link.tx) {
                if grid.dist2(other.tx, rx) < guard {
                    violations.push(Violation::Interference {
                        tx: link.tx,
                        rx,
                        interferer: other.tx,
                    });
                }
            }
        }
    }
    Feasibility {
        feasible: violations.is_empty(),
        violations,
    }
}

/// Largest number of transmitters with a receiver inside a disk of radius `r`
/// centred at any receiver of the slot.
pub fn max_concurrent_near(grid: &GridNetwork, slot: &[ActiveLink], r: Rational) -> usize {
    let r2 = r * r;
    slot.iter()
        .flat_map(|l| l.rx.iter())
        .map(|&centre| {
            slot.iter()
                .filter(|l| l.rx.iter().any(|&v| grid.dist2(centre, v) < r2))
                .count()
        })
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn link(tx: usize, rx: &[usize]) -> ActiveLink {
        ActiveLink {
            tx,
            rx: rx.to_vec(),
        }
    }

    #[test]
    fn single_link_in_range() {
        let g = GridNetwork::new(49).unwrap();
        let f = check_protocol_feasible(&g, &[link(0, &[1])], rat(1, 5), rat(2, 5));
        assert!(f.feasible);
        let f = check_protocol_feasible(&g, &[link(0, &[2])], rat(1, 5), rat(2, 5));
        assert_eq!(f.violations, vec![Violation::OutOfRange { tx: 0, rx: 2 }]);
    }

    #[test]
    fn guard_zone_boundary() {
        // interferer 3 cells from receiver 1: d = 3/7; guard (1 + delta) r
        let g = GridNetwork::new(49).unwrap();
        let slot = [link(0, &[1]), link(4, &[5])];
        let r = rat(1, 5);
        // (1 + delta) r = 3/7 exactly: allowed
        let delta = rat(15, 7) - int(1);
        assert!(check_protocol_feasible(&g, &slot, r, delta).feasible);
        // a hair larger guard: violated, pair listed
        let delta = delta + rat(1, 1000);
        let f = check_protocol_feasible(&g, &slot, r, delta);
        assert!(!f.feasible);
        assert!(f.violations.contains(&Violation::Interference { tx: 0, rx: 1, interferer: 4 }));
    }

    #[test]
    fn half_duplex_flagged() {
        let g = GridNetwork::new(9).unwrap();
        let f = check_protocol_feasible(&g, &[link(0, &[1]), link(1, &[2])], int(1), rat(1, 10));
        assert!(f.violations.contains(&Violation::HalfDuplex { tx: 0, rx: 1 }));
    }
}
