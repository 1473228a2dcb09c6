use serde::Serialize;

use super::cluster::{concurrency_cap, ClusterLayout};
use super::grid::GridNetwork;
use super::protocol::{check_protocol_feasible, max_concurrent_near, ActiveLink};
use crate::decentral::{HashTransmission, RandTransmission};
use crate::det::{members, place_any, run_det, CodedTransmission};
use crate::error::{Error, Result};
use crate::model::{Demand, Library, SystemParams};
use crate::rational::{ceil_int, int, Rational};

/// A transmission to be placed in time: one sender, its receivers, and the
/// information bits carried.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlannedTx {
    pub tx: usize,
    pub rx: Vec<usize>,
    pub bits: Rational,
}

impl From<&CodedTransmission> for PlannedTx {
    fn from(t: &CodedTransmission) -> Self {
        PlannedTx {
            tx: t.sender,
            rx: t.receivers(),
            bits: t.bits,
        }
    }
}

impl From<&RandTransmission> for PlannedTx {
    fn from(t: &RandTransmission) -> Self {
        PlannedTx {
            tx: t.sender,
            rx: members(t.group & !(1 << t.sender)),
            bits: t.bits,
        }
    }
}

impl From<&HashTransmission> for PlannedTx {
    fn from(t: &HashTransmission) -> Self {
        PlannedTx {
            tx: t.sender,
            rx: vec![t.receiver],
            bits: t.bits,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlotLink {
    pub cluster: usize,
    pub tx: usize,
    pub rx: Vec<usize>,
    pub bits: Rational,
}

/// One channel use; empty slots of a phase are not stored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Slot {
    pub index: u64,
    pub color: usize,
    pub links: Vec<SlotLink>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schedule {
    pub slots: Vec<Slot>,
    /// `t_s`, in channel uses.
    pub channel_uses: u64,
    /// Fixed phase length of the clustered schedule.
    pub phase_len: Option<u64>,
    pub reuse: u64,
    /// `t_s` without ceil-rounding of payloads into channel uses.
    pub exact_uses: Rational,
    /// `channel_uses - exact_uses`.
    pub surplus: Rational,
    pub max_concurrency: usize,
    pub concurrency_cap: u64,
}

/// CSV row of the slot export.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlotRow {
    pub slot_index: u64,
    pub color: usize,
    pub cluster_id: usize,
    pub tx_node: usize,
    pub rx_nodes: String,
    pub bits: String,
}

impl Schedule {
    pub fn rows(&self) -> Vec<SlotRow> {
        self.slots
            .iter()
            .flat_map(|s| {
                s.links.iter().map(move |l| SlotRow {
                    slot_index: s.index,
                    color: s.color,
                    cluster_id: l.cluster,
                    tx_node: l.tx,
                    rx_nodes: l.rx.iter().map(usize::to_string).collect::<Vec<_>>().join(";"),
                    bits: l.bits.to_string(),
                })
            })
            .collect()
    }
}

/// Splits each payload into channel uses of at most `rate` bits.
fn expand(txs: &[&PlannedTx], rate: Rational, cluster: usize) -> Vec<SlotLink> {
    let mut uses = Vec::new();
    for t in txs {
        let mut left = t.bits;
        while left > int(0) {
            let bits = left.min(rate);
            uses.push(SlotLink {
                cluster,
                tx: t.tx,
                rx: t.rx.clone(),
                bits,
            });
            left -= bits;
        }
    }
    uses
}

fn exact_uses(txs: &[&PlannedTx], rate: Rational) -> Rational {
    txs.iter().map(|t| t.bits / rate).sum()
}

fn check_slot(grid: &GridNetwork, slot: &Slot, params: &SystemParams) -> Result<usize> {
    let links: Vec<ActiveLink> = slot
        .links
        .iter()
        .map(|l| ActiveLink {
            tx: l.tx,
            rx: l.rx.clone(),
        })
        .collect();
    let f = check_protocol_feasible(grid, &links, params.range(), params.delta());
    if let Some(v) = f.violations.first() {
        return Err(Error::InfeasibleTransmission(format!(
            "slot {} violates the protocol model: {v:?}",
            slot.index
        )));
    }
    Ok(max_concurrent_near(grid, &links, params.range()))
}

/// Places transmissions into channel uses of `C_r` bits.
///
/// Without a layout every transmission runs alone. With a layout the
/// schedule runs `K` phases of equal length, one per colour; in each phase
/// every cluster of that colour plays its own transmissions in order.
/// Every emitted slot is checked against the protocol model.
pub fn schedule(
    params: &SystemParams,
    txs: &[PlannedTx],
    layout: Option<(&GridNetwork, &ClusterLayout)>,
) -> Result<Schedule> {
    let rate = params.link_rate();
    let cap = concurrency_cap(params.delta());
    let Some((grid, layout)) = layout else {
        let all: Vec<&PlannedTx> = txs.iter().collect();
        let grid = GridNetwork::new(params.n()).ok();
        let mut slots = Vec::new();
        let mut max_concurrency = 0;
        for (i, link) in expand(&all, rate, 0).into_iter().enumerate() {
            let slot = Slot {
                index: i as u64,
                color: 0,
                links: vec![link],
            };
            if let Some(g) = &grid {
                max_concurrency = max_concurrency.max(check_slot(g, &slot, params)?);
            }
            slots.push(slot);
        }
        let exact = exact_uses(&all, rate);
        let channel_uses = slots.len() as u64;
        return Ok(Schedule {
            channel_uses,
            phase_len: None,
            reuse: 1,
            surplus: int(channel_uses as i128) - exact,
            exact_uses: exact,
            slots,
            max_concurrency: max_concurrency.max(usize::from(channel_uses > 0)),
            concurrency_cap: cap,
        });
    };

    let mut per_cluster: Vec<Vec<&PlannedTx>> = vec![Vec::new(); layout.clusters()];
    for t in txs {
        let c = layout.cluster_of(grid, t.tx);
        if let Some(&v) = t.rx.iter().find(|&&v| layout.cluster_of(grid, v) != c) {
            return Err(Error::InfeasibleTransmission(format!(
                "transmission from node {} to node {v} spans clusters",
                t.tx
            )));
        }
        per_cluster[c].push(t);
    }
    let sequences: Vec<Vec<SlotLink>> = per_cluster
        .iter()
        .enumerate()
        .map(|(c, list)| expand(list, rate, c))
        .collect();
    let phase_len = sequences.iter().map(Vec::len).max().unwrap_or(0) as u64;
    let exact_phase = per_cluster
        .iter()
        .map(|list| exact_uses(list, rate))
        .max()
        .unwrap_or_default();
    let mut slots = Vec::new();
    let mut max_concurrency = 0;
    for color in 0..layout.reuse as usize {
        for j in 0..phase_len as usize {
            let links: Vec<SlotLink> = sequences
                .iter()
                .enumerate()
                .filter(|(c, seq)| layout.color(*c) == color && j < seq.len())
                .map(|(_, seq)| seq[j].clone())
                .collect();
            if links.is_empty() {
                continue;
            }
            let slot = Slot {
                index: color as u64 * phase_len + j as u64,
                color,
                links,
            };
            max_concurrency = max_concurrency.max(check_slot(grid, &slot, params)?);
            slots.push(slot);
        }
    }
    let reuse = layout.reuse;
    let channel_uses = reuse * phase_len;
    let exact = int(reuse as i128) * exact_phase;
    Ok(Schedule {
        slots,
        channel_uses,
        phase_len: Some(phase_len),
        reuse,
        surplus: int(channel_uses as i128) - exact,
        exact_uses: exact,
        max_concurrency,
        concurrency_cap: cap,
    })
}

/// `T = F L' / t_s`.
pub fn throughput_measured(params: &SystemParams, channel_uses: u64) -> Result<Rational> {
    if channel_uses == 0 {
        return Err(Error::ZeroSlots);
    }
    Ok(int((params.packet_bits() * params.segment_len() as u64) as i128) / int(channel_uses as i128))
}

/// Runs the deterministic scheme independently inside every cluster, each
/// cluster caching the whole library, and returns the transmissions with
/// global node ids. Every decode is checked byte-exactly.
pub fn clustered_det_transmissions(
    params: &SystemParams,
    library: &Library,
    grid: &GridNetwork,
    layout: &ClusterLayout,
    demand: &Demand,
) -> Result<Vec<PlannedTx>> {
    demand.validate(params)?;
    let sub = params.with_nodes(layout.gc)?;
    let placement = place_any(&sub, library)?;
    let mut out = Vec::new();
    for c in 0..layout.clusters() {
        let nodes = layout.members(grid, c);
        let local = Demand::new(
            nodes.iter().map(|&u| demand.files[u]).collect(),
            nodes.iter().map(|&u| demand.segments[u]).collect(),
        );
        let run = run_det(&sub, library, &placement, &local)?;
        out.extend(run.transmissions.iter().map(|t| PlannedTx {
            tx: nodes[t.sender],
            rx: t.receivers().into_iter().map(|v| nodes[v]).collect(),
            bits: t.bits,
        }));
    }
    Ok(out)
}

/// Channel uses needed for one payload.
pub fn uses_for(bits: Rational, rate: Rational) -> u64 {
    ceil_int(&(bits / rate)).max(0) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::rate_det_formula;
    use crate::det::{deliver_det, place_det};
    use crate::geometry::build_clusters;
    use crate::model::{gen_library, RateTable};
    use crate::rational::rat;

    #[test]
    fn full_range_three_users() {
        let p = SystemParams::builder(3, 3, int(2))
            .rate_table(RateTable::constant(int(2), int(8)).unwrap())
            .build()
            .unwrap();
        let lib = gen_library(&p, 1);
        let pl = place_det(&p, &lib).unwrap();
        let d = Demand::aligned(vec![0, 1, 2]);
        let txs: Vec<PlannedTx> = deliver_det(&p, &pl, &d).unwrap().iter().map(PlannedTx::from).collect();
        let s = schedule(&p, &txs, None).unwrap();
        assert_eq!(s.channel_uses, 3);
        assert_eq!(s.surplus, int(0));
        // T = C_r / R
        let t = throughput_measured(&p, s.channel_uses).unwrap();
        assert_eq!(t, p.link_rate() / rate_det_formula(3, 3, int(2)).unwrap());
    }

    #[test]
    fn empty_and_zero() {
        let p = SystemParams::builder(3, 3, int(2)).build().unwrap();
        let s = schedule(&p, &[], None).unwrap();
        assert_eq!(s.channel_uses, 0);
        assert_eq!(throughput_measured(&p, 0), Err(Error::ZeroSlots));
    }

    #[test]
    fn rounding_surplus_reported() {
        let p = SystemParams::builder(3, 3, int(2))
            .rate_table(RateTable::constant(int(2), int(5)).unwrap())
            .build()
            .unwrap();
        let tx = PlannedTx {
            tx: 0,
            rx: vec![1],
            bits: int(8),
        };
        let s = schedule(&p, &[tx], None).unwrap();
        assert_eq!(s.channel_uses, 2);
        assert_eq!(s.surplus, rat(2, 5));
        assert_eq!(uses_for(int(8), int(5)), 2);
    }

    fn n64() -> SystemParams {
        SystemParams::builder(64, 4, int(1))
            .range(rat(9, 25))
            .delta(rat(2, 5))
            .rate_table(RateTable::constant(int(1), int(12)).unwrap())
            .build()
            .unwrap()
    }

    #[test]
    fn clustered_matches_reuse_formula() {
        let p = n64();
        let (grid, layout) = build_clusters(&p).unwrap();
        let lib = gen_library(&p, 3);
        let d = Demand::aligned((0..64).map(|u| u % 4).collect());
        let txs = clustered_det_transmissions(&p, &lib, &grid, &layout, &d).unwrap();
        let s = schedule(&p, &txs, Some((&grid, &layout))).unwrap();
        assert_eq!(s.phase_len, Some(12));
        assert_eq!(s.channel_uses, 9 * 12);
        assert!(s.max_concurrency as u64 <= s.concurrency_cap);
        let t = throughput_measured(&p, s.channel_uses).unwrap();
        let rc = rate_det_formula(4, 4, int(1)).unwrap();
        assert_eq!(t, p.link_rate() / int(9) / rc);
        assert_eq!(t, rat(4, 9));
        // same profile in every cluster: K times one cluster's uses
        let one: Vec<PlannedTx> = txs.iter().filter(|t| layout.cluster_of(&grid, t.tx) == 0).cloned().collect();
        let single = schedule(&p, &one, Some((&grid, &layout))).unwrap();
        assert_eq!(s.channel_uses, single.channel_uses);
        assert_eq!(s.channel_uses, 9 * single.phase_len.unwrap());
        assert_eq!(s.rows().len(), 16 * 12);
    }

    #[test]
    fn spanning_transmission_rejected() {
        let p = n64();
        let (grid, layout) = build_clusters(&p).unwrap();
        let tx = PlannedTx {
            tx: 0,
            rx: vec![2],
            bits: int(12),
        };
        assert!(matches!(
            schedule(&p, &[tx], Some((&grid, &layout))),
            Err(Error::InfeasibleTransmission(_))
        ));
    }
}
