//! Ticketed schemes whose tickets hold one Count-to-Zero symbol plus
//! at most a domain value per primitive.

mod minval;
mod point;
mod product;
mod thresholds;

pub use minval::{Direction, ValueScheme, Values};
pub use point::SharpPoint;
pub use product::SharpProductThresholds;
pub use thresholds::SharpThresholds;

use std::collections::BTreeMap;

use crate::bits::BitString;
use crate::ctz::{ctz_learn, ctz_unlearn, symbol_from_bits, symbol_to_bits};
use crate::error::Result;
use crate::scheme::Verdict;

/// Count-to-Zero over groups of items: `keys[i]` is the group of item `i`.
/// Returns the per-group aux verdicts and one symbol ticket per item, the
/// `k`-th occurrence of a group taking the `k`-th family element.
pub(crate) fn group_ctz<K: Ord + Clone>(keys: &[K]) -> Result<(BTreeMap<K, Verdict>, Vec<BitString>)> {
    let mut members: BTreeMap<K, Vec<usize>> = BTreeMap::new();
    for (i, k) in keys.iter().enumerate() {
        members.entry(k.clone()).or_default().push(i);
    }
    let mut tickets = vec![BitString::new(); keys.len()];
    let mut verdicts = BTreeMap::new();
    for (k, idx) in members {
        let (v, symbols) = ctz_learn(idx.len() as u64)?;
        for (&i, s) in idx.iter().zip(symbols) {
            tickets[i] = symbol_to_bits(s);
        }
        verdicts.insert(k, v);
    }
    Ok((verdicts, tickets))
}

/// True iff the deleted symbols are a whole group (never true for no deletions).
pub(crate) fn fully_deleted(tickets: &[&BitString]) -> Result<bool> {
    if tickets.is_empty() {
        return Ok(false);
    }
    let symbols = tickets
        .iter()
        .map(|t| symbol_from_bits(t))
        .collect::<Result<Vec<_>>>()?;
    Ok(ctz_unlearn(&symbols, None)? == Verdict::Bottom)
}
