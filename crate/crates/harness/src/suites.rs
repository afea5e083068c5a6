//! Verification suites shared by the CLI and the acceptance target. Each
//! returns the list of failures it found; empty means pass.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use tilu_core::ctz::{ctz_learn, ctz_unlearn, CtzAdapter};
use tilu_core::scheme::{build_scheme, LearnOutput, Outcome, Scheme, UnlearnRequest, Verdict};
use tilu_core::sperner::{
    ack, alpha, family_segment, global_family, inv_ack, segment_range, verify_sperner, SpernerMultiset,
};
use tilu_core::{ConceptClass, Dataset};

use crate::enumerate::permutation;
use crate::oracle::sample;

/// Count-to-Zero for `m = 1..=max_m`: every `Q_k` with `k < m` escapes `Q_m`,
/// full deletion gives ⊥, and deleting a proper prefix gives ⊤.
pub fn ctz_suite(max_m: u64) -> Vec<String> {
    let mut fails = Vec::new();
    let fams: Vec<SpernerMultiset> = match (1..=max_m).map(global_family).collect() {
        Ok(f) => f,
        Err(e) => return vec![e.to_string()],
    };
    for m in 1..=max_m {
        let fm = &fams[m as usize - 1];
        if fm.size() != m {
            fails.push(format!("|Q_{m}| = {}", fm.size()));
        }
        for k in 1..m {
            if fams[k as usize - 1].is_submultiset_of(fm) {
                fails.push(format!("Q_{k} is contained in Q_{m}"));
            }
        }
        let (_, t) = match ctz_learn(m) {
            Ok(x) => x,
            Err(e) => {
                fails.push(e.to_string());
                continue;
            }
        };
        if ctz_unlearn(&t, None).ok() != Some(Verdict::Bottom) {
            fails.push(format!("deleting all {m} did not give bottom"));
        }
        for k in 1..m as usize {
            if ctz_unlearn(&t[..k], None).ok() != Some(Verdict::Top) {
                fails.push(format!("deleting {k} of {m} did not give top"));
            }
        }
    }
    fails
}

/// Count-to-Zero built from scheme `id` over `class`, for `m = 0..=max_m`
/// and every deletion size, on a prefix and on a seeded random subset.
pub fn adapter_suite(id: &str, class: &ConceptClass, max_m: usize, seed: u64) -> Vec<String> {
    let adapter = match build_scheme(id, class).and_then(|s| CtzAdapter::new(s, class)) {
        Ok(a) => a,
        Err(e) => return vec![e.to_string()],
    };
    let mut fails = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for m in 0..=max_m {
        let data = adapter.dataset(m);
        let out = match adapter.learn_count(m) {
            Ok(o) => o,
            Err(e) => {
                fails.push(format!("m={m}: {e}"));
                continue;
            }
        };
        let run = |idx: &[usize]| {
            let req = UnlearnRequest::select(&data, &out, idx);
            adapter.unlearn(&req, Some(&out.aux))
        };
        let empty = run(&[]);
        if empty != Ok(Outcome::Verdict(Verdict::from_bit(m > 0))) {
            fails.push(format!("m={m}, no deletion: {empty:?}"));
        }
        for k in 1..=m {
            let want = Ok(Outcome::Verdict(Verdict::from_bit(k < m)));
            let prefix: Vec<usize> = (0..k).collect();
            let mut random = permutation(m, &mut rng);
            random.truncate(k);
            random.sort_unstable();
            for idx in [prefix, random] {
                let got = run(&idx);
                if got != want {
                    fails.push(format!("m={m}, deleted {idx:?}: {got:?}"));
                }
            }
        }
    }
    fails
}

fn ticket_lengths(out: &LearnOutput) -> Vec<usize> {
    let mut v: Vec<usize> = out.tickets.iter().map(|t| t.len()).collect();
    v.sort_unstable();
    v
}

/// For `count` seeded datasets: repeated learning is bit-identical; learning a
/// permutation gives the same outcome, aux bits and ticket-length multiset;
/// and a random deletion set gives the same unlearn result in both orders.
pub fn permutation_suite(id: &str, class: &ConceptClass, count: usize, max_n: usize, seed: u64) -> Vec<String> {
    let scheme = match build_scheme(id, class) {
        Ok(s) => s,
        Err(e) => return vec![e.to_string()],
    };
    let mut fails = Vec::new();
    for i in 0..count as u64 {
        let s = seed.wrapping_add(i);
        let data = sample(id, class, max_n, s);
        let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0x5eed);
        let perm = permutation(data.len(), &mut rng);
        let permuted = Dataset {
            class: class.clone(),
            items: perm.iter().map(|&j| data.items[j].clone()).collect(),
        };
        let (a, b, c) = (scheme.learn(&data), scheme.learn(&data), scheme.learn(&permuted));
        let (a, b, c) = match (a, b, c) {
            (Ok(a), Ok(b), Ok(c)) => (a, b, c),
            (Err(x), Err(y), Err(z)) if x == y && y == z => continue,
            other => {
                fails.push(format!("seed {s}: learn results differ: {other:?}"));
                continue;
            }
        };
        if a != b {
            fails.push(format!("seed {s}: repeated learn differs"));
        }
        if a.outcome != c.outcome || a.aux != c.aux || ticket_lengths(&a) != ticket_lengths(&c) {
            fails.push(format!("seed {s}: permuted learn differs"));
        }
        let deleted: Vec<usize> = (0..data.len()).filter(|_| rng.gen()).collect();
        let deleted_p: Vec<usize> = (0..data.len()).filter(|&j| deleted.contains(&perm[j])).collect();
        let u = scheme.unlearn(&UnlearnRequest::select(&data, &a, &deleted), Some(&a.aux));
        let v = scheme.unlearn(&UnlearnRequest::select(&permuted, &c, &deleted_p), Some(&c.aux));
        let w = scheme.unlearn(&UnlearnRequest::select(&data, &b, &deleted), Some(&b.aux));
        if u != v || u != w || u.is_err() {
            fails.push(format!("seed {s}: unlearn results {u:?} / {v:?} / {w:?}"));
        }
    }
    fails
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlphabetRow {
    pub m: u64,
    pub symbols: usize,
    pub cumulative: usize,
}

/// Distinct symbols of each member and of the union so far.
pub fn alphabet_rows(max_m: u64) -> tilu_core::Result<Vec<AlphabetRow>> {
    let mut seen = BTreeSet::new();
    let mut rows = Vec::with_capacity(max_m as usize);
    for m in 1..=max_m {
        let f = global_family(m)?;
        seen.extend(f.counts.keys().copied());
        rows.push(AlphabetRow {
            m,
            symbols: f.counts.len(),
            cumulative: seen.len(),
        });
    }
    Ok(rows)
}

pub const SEGMENTS: &[(u64, u64)] = &[(1, 1), (1, 2), (1, 4), (1, 8), (2, 2), (2, 3), (3, 2)];

pub fn segment_members(r: u64, t: u64) -> tilu_core::Result<Vec<SpernerMultiset>> {
    let (lo, hi) = segment_range(r, t)?;
    let hi = hi.ok_or(tilu_core::Error::OverCap {
        value: format!("segment ({r},{t})"),
        cap: tilu_core::sperner::ACK_CAP,
    })?;
    (lo..=hi).map(|m| family_segment(r, t, m)).collect()
}

#[derive(Debug, Clone, Copy)]
pub struct SpernerGrid {
    pub size_max: u64,
    pub pairwise_max: u64,
    pub alphabet_max: u64,
    pub alphabet_limit: usize,
}

impl Default for SpernerGrid {
    fn default() -> Self {
        Self {
            size_max: 10_000,
            pairwise_max: 300,
            alphabet_max: 10_000,
            alphabet_limit: 48,
        }
    }
}

pub fn sperner_suite(grid: SpernerGrid) -> Vec<String> {
    let mut fails = Vec::new();
    for m in 1..=grid.size_max {
        match global_family(m) {
            Ok(f) if f.size() == m => {}
            Ok(f) => fails.push(format!("|Q_{m}| = {}", f.size())),
            Err(e) => fails.push(format!("Q_{m}: {e}")),
        }
    }
    match (1..=grid.pairwise_max).map(global_family).collect::<tilu_core::Result<Vec<_>>>() {
        Ok(fams) if verify_sperner(&fams) => {}
        Ok(_) => fails.push(format!("Q_1..Q_{} is not an antichain", grid.pairwise_max)),
        Err(e) => fails.push(e.to_string()),
    }
    for &(r, t) in SEGMENTS {
        match segment_members(r, t) {
            Ok(ms) if verify_sperner(&ms) => {}
            Ok(_) => fails.push(format!("segment ({r},{t}) is not an antichain")),
            Err(e) => fails.push(format!("segment ({r},{t}): {e}")),
        }
    }
    match alphabet_rows(grid.alphabet_max) {
        Ok(rows) => {
            let used = rows.last().map_or(0, |r| r.cumulative);
            if used > grid.alphabet_limit {
                fails.push(format!("{used} symbols used up to m = {}", grid.alphabet_max));
            }
        }
        Err(e) => fails.push(e.to_string()),
    }
    fails
}

pub fn ackermann_suite() -> Vec<String> {
    let mut fails = Vec::new();
    let cap = u64::MAX;
    for t in 1..=20u64 {
        if ack(1, t, cap) != Some(2 * t) {
            fails.push(format!("A_1({t})"));
        }
        if ack(2, t, cap) != Some(1 << t) {
            fails.push(format!("A_2({t})"));
        }
    }
    if ack(3, 4, cap) != Some(65_536) {
        fails.push("A_3(4)".into());
    }
    let expect = |n: u64| match n {
        0..=2 => 1,
        3..=4 => 2,
        5..=16 => 3,
        _ => 4,
    };
    for n in 2..=1_000_000u64 {
        if inv_ack(n) != expect(n) {
            fails.push(format!("inv_ack({n}) = {}", inv_ack(n)));
            break;
        }
    }
    if alpha(3, cap) != Some(16) {
        fails.push("alpha(3)".into());
    }
    fails
}
