use serde::{Deserialize, Serialize};

use super::delivery::CodedTransmission;
use super::subpacket::members;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub receiver: usize,
    pub file: usize,
    pub packet: usize,
    pub set: Vec<usize>,
    pub j: usize,
}

/// One transcript line; `bits` is the exact rational `"p/q"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub round: usize,
    pub layer: usize,
    pub sender: usize,
    pub group: Vec<usize>,
    pub labels: Vec<LabelRecord>,
    pub bits: String,
    pub payload: String,
}

impl From<&CodedTransmission> for TranscriptRecord {
    fn from(t: &CodedTransmission) -> Self {
        TranscriptRecord {
            round: t.round,
            layer: t.layer,
            sender: t.sender,
            group: members(t.group),
            labels: t
                .labels
                .iter()
                .map(|l| LabelRecord {
                    receiver: l.receiver,
                    file: l.file,
                    packet: l.packet,
                    set: members(l.set),
                    j: l.j,
                })
                .collect(),
            bits: format!("{}/{}", t.bits.numer(), t.bits.denom()),
            payload: hex::encode(&t.payload),
        }
    }
}

/// JSON lines, one transmission per line.
pub fn transcript_jsonl(transmissions: &[CodedTransmission]) -> Result<String> {
    let mut out = String::new();
    for t in transmissions {
        out.push_str(&serde_json::to_string(&TranscriptRecord::from(t))?);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::det::{place_layers, deliver_det, layers_for};
    use crate::model::{gen_library, Demand, SystemParams};
    use crate::rational::int;

    #[test]
    fn one_line_per_transmission() {
        let p = SystemParams::builder(3, 3, int(2)).build().unwrap();
        let lib = gen_library(&p, 1);
        let pl = place_layers(&p, &lib, layers_for(&p)).unwrap();
        let tx = deliver_det(&p, &pl, &Demand::aligned(vec![0, 1, 2])).unwrap();
        let text = transcript_jsonl(&tx).unwrap();
        let lines: Vec<TranscriptRecord> = text
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0].group, vec![0, 1, 2]);
        assert_eq!(lines[0].bits, "8/1");
        assert_eq!(lines[0].payload, hex::encode(&tx[0].payload));
        assert_eq!(lines[0].labels[0].set, vec![0, 2]);
    }
}
