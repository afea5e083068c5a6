//! Ackermann towers and size-indexing Sperner families of multisets.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Largest size accepted by [`global_family`].
pub const SIZE_CAP: u64 = 1 << 32;

/// Internal cap for Ackermann evaluation; anything above is OVERCAP.
pub const ACK_CAP: u64 = 1 << 40;

/// `A_r(t)` if it is at most `cap`, else `None` (OVERCAP).
///
/// `A_r(1) = 2`, `A_1(t) = 2t`, `A_{r+1}(t) = A_r(A_{r+1}(t-1))`.
pub fn ack(r: u64, t: u64, cap: u64) -> Option<u64> {
    assert!(r >= 1 && t >= 1, "ack is defined for r, t >= 1");
    let out = if r == 1 {
        t.checked_mul(2)?
    } else {
        // Iterate x <- A_{r-1}(x) from A_r(1) = 2; the sequence grows, so
        // OVERCAP is reached after few steps.
        let mut x = 2u64;
        for _ in 1..t {
            x = ack(r - 1, x, cap)?;
        }
        x
    };
    (out <= cap).then_some(out)
}

/// `α(t) = A_t(t)` capped.
pub fn alpha(t: u64, cap: u64) -> Option<u64> {
    ack(t, t, cap)
}

/// Smallest `t` with `n <= α(t)`.
pub fn inv_ack(n: u64) -> u64 {
    assert!(n >= 1);
    (1..)
        .find(|&t| alpha(t, n.max(2)).is_none_or(|a| n <= a))
        .unwrap()
}

/// A packed symbol: 4 bits tier, 8 bits segment, 4 bits local symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpernerSymbol {
    pub tier: u8,
    pub segment: u8,
    pub local: u8,
}

impl SpernerSymbol {
    pub const BITS: usize = 16;

    pub fn pack(self) -> u16 {
        u16::from(self.tier) << 12 | u16::from(self.segment) << 4 | u16::from(self.local)
    }

    pub fn unpack(v: u16) -> Self {
        Self {
            tier: (v >> 12) as u8,
            segment: (v >> 4) as u8,
            local: (v & 0xf) as u8,
        }
    }
}

/// Multiset of symbols stored as counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SpernerMultiset {
    pub counts: BTreeMap<u16, u64>,
}

impl SpernerMultiset {
    pub fn add(&mut self, symbol: u16, count: u64) {
        if count > 0 {
            *self.counts.entry(symbol).or_default() += count;
        }
    }

    pub fn size(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Elements in sorted order.
    pub fn elements(&self) -> Vec<u16> {
        self.counts
            .iter()
            .flat_map(|(&s, &c)| std::iter::repeat_n(s, c as usize))
            .collect()
    }

    pub fn from_elements(elements: &[u16]) -> Self {
        let mut m = Self::default();
        for &e in elements {
            m.add(e, 1);
        }
        m
    }

    pub fn is_submultiset_of(&self, other: &Self) -> bool {
        self.counts
            .iter()
            .all(|(s, c)| other.counts.get(s).is_some_and(|d| c <= d))
    }

    fn relabel(&self, f: impl Fn(u16) -> u16) -> Self {
        let mut m = Self::default();
        for (&s, &c) in &self.counts {
            m.add(f(s), c);
        }
        m
    }
}

/// Range `[A_r(t), A_r(A_r(t))]` covered by `family_segment(r, t, ·)`; the
/// upper end is `None` when it exceeds the internal cap.
pub fn segment_range(r: u64, t: u64) -> Result<(u64, Option<u64>)> {
    let lo = ack(r, t, ACK_CAP).ok_or_else(|| Error::OverCap {
        value: format!("A_{r}({t})"),
        cap: ACK_CAP,
    })?;
    Ok((lo, ack(r, lo, ACK_CAP)))
}

/// The `m`-element member of the family with alphabet `1..=2r` covering
/// `[A_r(t), A_r(A_r(t))]`.
pub fn family_segment(r: u64, t: u64, m: u64) -> Result<SpernerMultiset> {
    let (lo, hi) = segment_range(r, t)?;
    if m < lo || hi.is_some_and(|h| m > h) || m > ACK_CAP {
        return Err(Error::OutOfRange {
            m,
            lo,
            hi: hi.unwrap_or(ACK_CAP),
        });
    }
    let mut out = SpernerMultiset::default();
    if r == 1 {
        out.add(1, 4 * t - m);
        out.add(2, 2 * m - 4 * t);
        return Ok(out);
    }
    if t == 1 {
        return family_segment(1, 1, m);
    }
    let big_t = lo;
    let s = m - big_t + 2;
    let mut j = 1;
    while ack(r, j + 1, s).is_some() {
        j += 1;
    }
    out.add((2 * r - 1) as u16, big_t - j - 1);
    out.add((2 * r) as u16, j - 1);
    let inner_t = if j >= 2 {
        ack(r, j - 1, ACK_CAP).expect("below A_r(j) <= s")
    } else {
        1
    };
    for (sym, c) in family_segment(r - 1, inner_t, s)?.counts {
        out.add(sym, c);
    }
    Ok(out)
}

/// Tier of size `m`: 0 for `m = 1`, else the `t >= 2` with `α(t-1) <= m < α(t)`.
pub fn tier_of(m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    (2..).find(|&t| alpha(t, m).is_none()).unwrap()
}

/// The `m`-th member of the global size-indexing family, with packed symbols.
pub fn global_family(m: u64) -> Result<SpernerMultiset> {
    if m == 0 || m > SIZE_CAP {
        return Err(Error::OverCap {
            value: m.to_string(),
            cap: SIZE_CAP,
        });
    }
    let t = tier_of(m);
    if t == 0 {
        let mut out = SpernerMultiset::default();
        out.add(
            SpernerSymbol {
                tier: 0,
                segment: 0,
                local: 1,
            }
            .pack(),
            1,
        );
        return Ok(out);
    }
    let mut i = 1;
    while ack(t, i + 1, m).is_some() {
        i += 1;
    }
    let inner_t = if i >= 2 {
        ack(t, i - 1, ACK_CAP).expect("below A_t(i) <= m")
    } else {
        1
    };
    let seg = family_segment(t - 1, inner_t, m)?;
    Ok(seg.relabel(|local| {
        SpernerSymbol {
            tier: t as u8,
            segment: i as u8,
            local: local as u8,
        }
        .pack()
    }))
}

/// Pairwise non-containment of a list of multisets; `Some((i, j))` names a
/// pair with member `i` a sub-multiset of member `j`.
pub fn find_containment(ms: &[SpernerMultiset]) -> Option<(usize, usize)> {
    if ms.len() <= 2048 {
        find_containment_brute(ms)
    } else {
        find_containment_bitset(ms)
    }
}

pub fn verify_sperner(ms: &[SpernerMultiset]) -> bool {
    find_containment(ms).is_none()
}

pub fn find_containment_brute(ms: &[SpernerMultiset]) -> Option<(usize, usize)> {
    for (i, a) in ms.iter().enumerate() {
        for (j, b) in ms.iter().enumerate() {
            if i != j && a.is_submultiset_of(b) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Dominance search with per-symbol prefix bitsets over bucketed count
/// thresholds: the bitsets give a superset of the dominated members, which
/// is then checked exactly.
pub fn find_containment_bitset(ms: &[SpernerMultiset]) -> Option<(usize, usize)> {
    const BUCKETS: usize = 256;
    let n = ms.len();
    let words = n.div_ceil(64);
    let symbols: Vec<u16> = {
        let mut s: Vec<u16> = ms.iter().flat_map(|m| m.counts.keys().copied()).collect();
        s.sort_unstable();
        s.dedup();
        s
    };
    let dense: Vec<Vec<u64>> = ms
        .iter()
        .map(|m| {
            symbols
                .iter()
                .map(|s| m.counts.get(s).copied().unwrap_or(0))
                .collect()
        })
        .collect();
    // For each symbol: boundary values and prefix bitsets {a : count <= boundary}.
    let mut tables: Vec<(Vec<u64>, Vec<Vec<u64>>)> = Vec::with_capacity(symbols.len());
    for k in 0..symbols.len() {
        let mut values: Vec<u64> = dense.iter().map(|v| v[k]).collect();
        values.sort_unstable();
        values.dedup();
        let step = values.len().div_ceil(BUCKETS);
        let mut bounds: Vec<u64> = values.iter().copied().skip(step - 1).step_by(step).collect();
        if bounds.last() != values.last() {
            bounds.push(*values.last().unwrap());
        }
        let sets = bounds
            .iter()
            .map(|&bound| {
                let mut bits = vec![0u64; words];
                for (a, v) in dense.iter().enumerate() {
                    if v[k] <= bound {
                        bits[a / 64] |= 1 << (a % 64);
                    }
                }
                bits
            })
            .collect();
        tables.push((bounds, sets));
    }
    let mut cand = vec![0u64; words];
    for (b, vb) in dense.iter().enumerate() {
        cand.iter_mut().for_each(|w| *w = u64::MAX);
        for (k, (bounds, sets)) in tables.iter().enumerate() {
            let g = bounds.partition_point(|&x| x < vb[k]);
            for (c, s) in cand.iter_mut().zip(&sets[g]) {
                *c &= s;
            }
        }
        for (wi, &w) in cand.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let a = wi * 64 + w.trailing_zeros() as usize;
                w &= w - 1;
                if a < n && a != b && dense[a].iter().zip(vb).all(|(x, y)| x <= y) {
                    return Some((a, b));
                }
            }
        }
    }
    None
}

/// Distinct symbols used by `global_family(1..=max_m)`.
pub fn alphabet_used(max_m: u64) -> Result<usize> {
    let mut all = std::collections::BTreeSet::new();
    for m in 1..=max_m {
        all.extend(global_family(m)?.counts.into_keys());
    }
    Ok(all.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(pairs: &[(u16, u64)]) -> SpernerMultiset {
        let mut m = SpernerMultiset::default();
        for &(s, c) in pairs {
            m.add(s, c);
        }
        m
    }

    #[test]
    fn ack_examples() {
        assert_eq!(ack(1, 5, 1_000_000_000), Some(10));
        assert_eq!(ack(2, 4, 1_000_000_000), Some(16));
        assert_eq!(ack(3, 4, 1_000_000_000), Some(65536));
        assert_eq!(ack(3, 5, 1_000_000_000), None);
        assert_eq!(ack(4, 4, u64::MAX), None);
        for t in 1..=20 {
            assert_eq!(ack(1, t, u64::MAX), Some(2 * t));
            assert_eq!(ack(2, t, u64::MAX), Some(1 << t));
        }
    }

    #[test]
    fn inv_ack_boundaries() {
        assert_eq!([1, 2].map(inv_ack), [1, 1]);
        assert_eq!([3, 4].map(inv_ack), [2, 2]);
        assert_eq!([5, 16].map(inv_ack), [3, 3]);
        assert_eq!([17, 1_000_000].map(inv_ack), [4, 4]);
    }

    #[test]
    fn tiers_follow_alpha() {
        assert_eq!(tier_of(1), 0);
        assert_eq!([2, 3].map(tier_of), [2, 2]);
        assert_eq!([4, 15].map(tier_of), [3, 3]);
        assert_eq!([16, 65536, SIZE_CAP].map(tier_of), [4, 4, 4]);
    }

    #[test]
    fn segment_examples() {
        assert_eq!(family_segment(1, 2, 5).unwrap(), ms(&[(1, 3), (2, 2)]));
        assert_eq!(family_segment(2, 2, 4).unwrap(), ms(&[(3, 2), (1, 2)]));
        assert_eq!(family_segment(2, 2, 16).unwrap(), ms(&[(4, 2), (1, 2), (2, 12)]));
        assert!(matches!(family_segment(1, 2, 9), Err(Error::OutOfRange { .. })));
        assert!(matches!(family_segment(1, 2, 3), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn global_examples() {
        let one = global_family(1).unwrap();
        assert_eq!(one.size(), 1);
        let sym = |seg, local| SpernerSymbol { tier: 2, segment: seg, local }.pack();
        assert_eq!(global_family(2).unwrap(), ms(&[(sym(1, 1), 2)]));
        assert_eq!(global_family(3).unwrap(), ms(&[(sym(1, 1), 1), (sym(1, 2), 2)]));
        assert!(global_family(0).is_err());
        assert!(global_family(SIZE_CAP + 1).is_err());
        assert_eq!(global_family(SIZE_CAP).unwrap().size(), SIZE_CAP);
    }

    #[test]
    fn pack_round_trip() {
        for tier in 0..16u8 {
            for segment in [0u8, 1, 7, 255] {
                for local in 0..16u8 {
                    let s = SpernerSymbol { tier, segment, local };
                    assert_eq!(SpernerSymbol::unpack(s.pack()), s);
                }
            }
        }
    }

    #[test]
    fn verify_examples() {
        assert!(verify_sperner(&[ms(&[(1, 2)]), ms(&[(1, 1), (2, 2)])]));
        assert!(!verify_sperner(&[ms(&[(1, 1)]), ms(&[(1, 1), (2, 1)])]));
        let fam: Vec<_> = (2..64).map(|m| global_family(m).unwrap()).collect();
        assert!(verify_sperner(&fam));
    }

    #[test]
    fn sizes_are_exact() {
        for m in 1..=2000 {
            assert_eq!(global_family(m).unwrap().size(), m);
        }
    }

    #[test]
    fn segments_are_sperner_over_full_range() {
        for (r, t) in [(1, 1), (1, 2), (1, 4), (1, 8), (2, 2), (2, 3)] {
            let (lo, hi) = segment_range(r, t).unwrap();
            let fam: Vec<_> = (lo..=hi.unwrap())
                .map(|m| {
                    let q = family_segment(r, t, m).unwrap();
                    assert_eq!(q.size(), m);
                    assert!(q.counts.keys().all(|&s| (1..=2 * r as u16).contains(&s)));
                    q
                })
                .collect();
            assert!(verify_sperner(&fam), "segment ({r},{t})");
        }
    }

    #[test]
    fn bitset_agrees_with_brute_force() {
        let mut fam: Vec<_> = (1..=300).map(|m| global_family(m).unwrap()).collect();
        assert_eq!(find_containment_bitset(&fam), None);
        assert_eq!(find_containment_brute(&fam), None);
        let seg: Vec<_> = (8..=256).map(|m| family_segment(2, 3, m).unwrap()).collect();
        assert_eq!(find_containment_bitset(&seg), None);
        // Injected violations.
        fam.push(fam[120].clone());
        assert!(find_containment_bitset(&fam).is_some());
        assert!(find_containment_brute(&fam).is_some());
        let mut seg2 = seg.clone();
        let mut bigger = seg2[40].clone();
        bigger.add(1, 3);
        seg2.push(bigger);
        assert!(find_containment_bitset(&seg2).is_some());
        assert!(find_containment_brute(&seg2).is_some());
    }

    #[test]
    fn alphabet_is_small() {
        let used = alphabet_used(10_000).unwrap();
        assert!(used <= 48, "{used}");
        assert_eq!(used, 13);
    }
}
