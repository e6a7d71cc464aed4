//! JSON box format.
//!
//! ```json
//! { "blocks": { "XX": {"pp": 0.25, "pm": 0.25, "mp": 0.25, "mm": 0.25}, ... },
//!   "compact": [15 numbers] }
//! ```
//!
//! All nine two-letter blocks are required. `compact` is optional and, when
//! present, must agree with the blocks within [`COMPACT_AGREEMENT_TOL`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CompactState, Entry, JointBox, Setting, COMPACT_LEN};

pub const COMPACT_AGREEMENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockJson {
    pp: f64,
    pm: f64,
    mp: f64,
    mm: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxJson {
    blocks: BTreeMap<String, BlockJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    compact: Option<Vec<f64>>,
}

fn pair_key(x_a: Setting, x_b: Setting) -> String {
    format!("{x_a}{x_b}")
}

pub fn parse_box(text: &str) -> Result<JointBox> {
    let raw: BoxJson = serde_json::from_str(text)?;
    let mut blocks = [[0.0; 4]; 9];
    let mut seen = 0;
    for x_a in Setting::ALL {
        for x_b in Setting::ALL {
            let key = pair_key(x_a, x_b);
            let blk = raw
                .blocks
                .get(&key)
                .ok_or_else(|| Error::Schema(format!("missing block {key}")))?;
            blocks[3 * x_a.index() + x_b.index()] = [blk.pp, blk.pm, blk.mp, blk.mm];
            seen += 1;
        }
    }
    if raw.blocks.len() != seen {
        let extra: Vec<&String> = raw
            .blocks
            .keys()
            .filter(|k| {
                !Setting::ALL
                    .iter()
                    .any(|a| Setting::ALL.iter().any(|b| pair_key(*a, *b) == **k))
            })
            .collect();
        return Err(Error::Schema(format!("unknown blocks {extra:?}")));
    }
    if blocks.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Schema("non-finite probability".into()));
    }
    let b = JointBox::from_blocks(blocks);
    if let Some(c) = raw.compact {
        if c.len() != COMPACT_LEN {
            return Err(Error::Schema(format!(
                "compact must have {COMPACT_LEN} entries, got {}",
                c.len()
            )));
        }
        let mut arr = [0.0; COMPACT_LEN];
        arr.copy_from_slice(&c);
        let dev = CompactState::from_array(arr).expand().max_abs_diff(&b);
        if dev.is_nan() || dev > COMPACT_AGREEMENT_TOL {
            return Err(Error::Schema(format!(
                "compact and blocks disagree by {dev:.3e}"
            )));
        }
    }
    Ok(b)
}

pub fn box_to_json(b: &JointBox, with_compact: bool) -> Result<String> {
    let mut blocks = BTreeMap::new();
    for x_a in Setting::ALL {
        for x_b in Setting::ALL {
            let blk = b.block(x_a, x_b);
            blocks.insert(
                pair_key(x_a, x_b),
                BlockJson {
                    pp: blk[Entry::PP.index()],
                    pm: blk[Entry::PM.index()],
                    mp: blk[Entry::MP.index()],
                    mm: blk[Entry::MM.index()],
                },
            );
        }
    }
    let compact = with_compact.then(|| CompactState::read_off(b).to_array().to_vec());
    Ok(serde_json::to_string_pretty(&BoxJson { blocks, compact })?)
}
