//! Deterministic placement, XOR coded-multicast delivery and decoding,
//! with two-point memory sharing for fractional `t`.

mod decode;
mod delivery;
mod placement;
mod sharing;
mod subpacket;
mod transcript;

pub use decode::decode_det;
pub use delivery::{canonical_labels, deliver_det, rate_det_measured, CodedTransmission, Label};
pub use placement::{place_det, place_layers, DetCache, DetPlacement, PieceKey};
pub use sharing::{layers_for, memory_share, SharingReport, SharingSplit};
pub use subpacket::{
    check_subpacketization, extract_bits, insert_bits, members, position, set_of, Layer, NodeSet,
    SubsetIndex,
};
pub use transcript::{transcript_jsonl, LabelRecord, TranscriptRecord};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Demand, Library, SystemParams};
use crate::rational::Rational;

/// Result of delivering and decoding one demand.
#[derive(Debug, Clone)]
pub struct DetRun {
    pub demand: Demand,
    pub transmissions: Vec<CodedTransmission>,
    pub rate: Rational,
}

/// Places with memory sharing when `t` is fractional.
pub fn place_any(params: &SystemParams, library: &Library) -> Result<DetPlacement> {
    place_layers(params, library, layers_for(params))
}

/// Delivers `demand`, decodes at every node and checks each packet byte-exactly.
pub fn run_det(params: &SystemParams, library: &Library, placement: &DetPlacement, demand: &Demand) -> Result<DetRun> {
    let transmissions = deliver_det(params, placement, demand)?;
    for node in 0..params.n() {
        let packets = decode_det(params, placement, node, &transmissions, demand)?;
        for (k, got) in packets.iter().enumerate() {
            let packet = demand.packet(node, k);
            if got.as_slice() != library.packet(demand.files[node], packet) {
                return Err(Error::DecodeMismatch { node, packet });
            }
        }
    }
    let rate = rate_det_measured(&transmissions, params);
    Ok(DetRun {
        demand: demand.clone(),
        transmissions,
        rate,
    })
}

/// Worst-case rate over `demands`, verifying every decode.
pub fn simulate_det(params: &SystemParams, library: &Library, demands: &[Demand]) -> Result<Rational> {
    let placement = place_any(params, library)?;
    let rates: Vec<Rational> = demands
        .par_iter()
        .map(|d| run_det(params, library, &placement, d).map(|r| r.rate))
        .collect::<Result<_>>()?;
    Ok(rates.into_iter().max().unwrap_or_default())
}
