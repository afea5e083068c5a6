//! Merkle-style tree scheme for any mergeable class.
//!
//! Leaves are padded with neutral encodings to `2^D`. Ticket `i` is the
//! `D`-bit leaf index followed by the `D` sibling encodings along the path,
//! root side first, so every ticket has `D + C·D` bits. The auxiliary state is
//! the learned hypothesis.

use std::collections::BTreeMap;

use crate::bits::{bits_for, BitString};
use crate::domain::{ConceptClass, Dataset, Example, Hypothesis};
use crate::error::{Error, Result};
use crate::mergeable::{Codec, EncodedState};
use crate::scheme::{require_aux, LearnOutput, Outcome, Scheme, UnlearnRequest};

#[derive(Debug, Clone)]
pub struct TreeScheme {
    codec: Codec,
}

/// Depth of the padded tree over `n` leaves.
pub fn depth(n: usize) -> usize {
    bits_for(n as u64)
}

/// Node `(level, k)` covers leaves `k·2^(D-level) .. (k+1)·2^(D-level)`.
type Node = (usize, usize);

impl TreeScheme {
    pub fn new(class: &ConceptClass) -> Result<Self> {
        Ok(Self {
            codec: Codec::new(class)?,
        })
    }

    pub fn codec(&self) -> &Codec {
        &self.codec
    }

    pub fn ticket_bits(&self, n: usize) -> usize {
        let d = depth(n);
        d + self.codec.width() * d
    }

    /// Encodings of every node, level by level from the leaves up.
    fn levels(&self, items: &[Example]) -> Result<Vec<Vec<EncodedState>>> {
        let d = depth(items.len());
        let mut leaves = Vec::with_capacity(1 << d);
        for z in items {
            leaves.push(self.codec.encode(std::slice::from_ref(z))?);
        }
        leaves.resize(1 << d, self.codec.neutral());
        let mut levels = vec![leaves];
        for _ in 0..d {
            let below = levels.last().unwrap();
            let mut up = Vec::with_capacity(below.len() / 2);
            for pair in below.chunks(2) {
                up.push(self.codec.merge(&pair[0], &pair[1])?);
            }
            levels.push(up);
        }
        levels.reverse();
        Ok(levels)
    }

    fn learn_items(&self, items: &[Example]) -> Result<LearnOutput> {
        let root = self.codec.encode(items)?;
        let h = self.codec.decode(&root);
        let aux = self.codec.class().hypothesis_to_bits(&h)?;
        if items.is_empty() {
            return Ok(LearnOutput {
                outcome: Outcome::Hypothesis(h),
                aux,
                tickets: Vec::new(),
            });
        }
        let levels = self.levels(items)?;
        let d = levels.len() - 1;
        let tickets = (0..items.len())
            .map(|i| {
                let mut t = BitString::new();
                t.push(i as u64, d);
                for (level, row) in levels.iter().enumerate().skip(1) {
                    let sibling = (i >> (d - level)) ^ 1;
                    self.codec.write(&row[sibling], &mut t);
                }
                t
            })
            .collect();
        Ok(LearnOutput {
            outcome: Outcome::Hypothesis(h),
            aux,
            tickets,
        })
    }

    fn unlearn_inner(&self, req: &UnlearnRequest, aux: &BitString) -> Result<Hypothesis> {
        req.check_distinct()?;
        let class = self.codec.class();
        if req.is_empty() {
            return class.hypothesis_from_bits(aux);
        }
        let c = self.codec.width();
        let len = req.items[0].ticket.len();
        if len % (c + 1) != 0 {
            return Err(Error::MalformedTicket(format!("tree ticket of {len} bits")));
        }
        let d = len / (c + 1);
        let mut known: BTreeMap<Node, EncodedState> = BTreeMap::new();
        let mut deleted = Vec::new();
        for del in &req.items {
            if del.ticket.len() != len {
                return Err(Error::InconsistentTickets("tickets differ in length".into()));
            }
            let mut r = del.ticket.reader();
            let leaf = r.read(d)? as usize;
            if leaf != del.index {
                return Err(Error::InconsistentTickets(format!(
                    "ticket for index {} names leaf {leaf}",
                    del.index
                )));
            }
            deleted.push(leaf);
            for level in 1..=d {
                let node = (level, (leaf >> (d - level)) ^ 1);
                let e = self.codec.read(&mut r)?;
                if let Some(prev) = known.insert(node, e.clone()) {
                    if prev != e {
                        return Err(Error::InconsistentTickets(format!(
                            "node {node:?} has two encodings"
                        )));
                    }
                }
            }
            r.finish()?;
        }
        // Frontier: known sibling nodes whose subtree holds no deleted leaf.
        let mut acc = self.codec.neutral();
        for ((level, k), e) in &known {
            let touched = deleted.iter().any(|&leaf| leaf >> (d - level) == *k);
            if !touched {
                acc = self.codec.merge(&acc, e)?;
            }
        }
        Ok(self.codec.decode(&acc))
    }

    /// Frontier nodes for a deletion set over `n` leaves, for tests and docs.
    pub fn frontier(n: usize, deleted: &[usize]) -> Vec<(usize, usize)> {
        let d = depth(n);
        let mut out = Vec::new();
        for level in 1..=d {
            for k in 0..(1 << level) {
                let has = |lvl: usize, node: usize| deleted.iter().any(|&i| i >> (d - lvl) == node);
                if !has(level, k) && has(level - 1, k >> 1) {
                    out.push((level, k));
                }
            }
        }
        out
    }
}

impl Scheme for TreeScheme {
    fn id(&self) -> String {
        format!("tree:{}", self.codec.class().name())
    }

    fn learn(&self, data: &Dataset) -> Result<LearnOutput> {
        if &data.class != self.codec.class() {
            return Err(Error::ClassMismatch {
                expected: self.codec.class().name().into(),
                found: data.class.name().into(),
            });
        }
        self.learn_items(&data.items)
    }

    fn unlearn(&self, req: &UnlearnRequest, aux: Option<&BitString>) -> Result<Outcome> {
        self.unlearn_inner(req, require_aux(aux)?)
            .map(Outcome::Hypothesis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::canonical_erm;

    fn th(domain: u32, pts: &[(u32, u8)]) -> Dataset {
        Dataset::new(
            ConceptClass::Thresholds { domain },
            pts.iter().map(|&(x, y)| Example::scalar(x, y)).collect(),
        )
        .unwrap()
    }

    fn hyp(o: Outcome) -> Hypothesis {
        match o {
            Outcome::Hypothesis(h) => h,
            other => panic!("expected hypothesis, got {other}"),
        }
    }

    #[test]
    fn learn_thresholds() {
        let s = th(8, &[(3, 0), (5, 1)]);
        let t = TreeScheme::new(&s.class).unwrap();
        let out = t.learn(&s).unwrap();
        assert_eq!(out.outcome, Outcome::Hypothesis(Hypothesis::Threshold(3)));
        assert_eq!(out.tickets.len(), 2);
        assert_eq!(out.tickets[0].len(), t.ticket_bits(2));
    }

    #[test]
    fn eight_leaf_layout() {
        // Leaf 5 (index 4) sees siblings {1..4}, {7,8}, {6} root side first.
        let pts: Vec<(u32, u8)> = (1..=8).map(|x| (x, 0)).collect();
        let s = th(8, &pts);
        let t = TreeScheme::new(&s.class).unwrap();
        let out = t.learn(&s).unwrap();
        let mut r = out.tickets[4].reader();
        assert_eq!(r.read(3).unwrap(), 4);
        let c = t.codec();
        assert_eq!(c.read(&mut r).unwrap(), EncodedState::Threshold(4));
        assert_eq!(c.read(&mut r).unwrap(), EncodedState::Threshold(8));
        assert_eq!(c.read(&mut r).unwrap(), EncodedState::Threshold(6));
        r.finish().unwrap();
    }

    #[test]
    fn single_item_has_index_only_ticket() {
        let s = th(8, &[(3, 0)]);
        let t = TreeScheme::new(&s.class).unwrap();
        let out = t.learn(&s).unwrap();
        assert!(out.tickets[0].is_empty());
        let req = UnlearnRequest::select(&s, &out, &[0]);
        assert_eq!(hyp(t.unlearn(&req, Some(&out.aux)).unwrap()), Hypothesis::Threshold(0));
    }

    #[test]
    fn unlearn_examples() {
        let s = th(8, &[(3, 0), (5, 1), (2, 0), (7, 1)]);
        let t = TreeScheme::new(&s.class).unwrap();
        let out = t.learn(&s).unwrap();
        let none = UnlearnRequest::default();
        assert_eq!(hyp(t.unlearn(&none, Some(&out.aux)).unwrap()), Hypothesis::Threshold(3));
        let one = UnlearnRequest::select(&s, &out, &[0]);
        assert_eq!(hyp(t.unlearn(&one, Some(&out.aux)).unwrap()), Hypothesis::Threshold(2));
        let all = UnlearnRequest::select(&s, &out, &[0, 1, 2, 3]);
        assert_eq!(hyp(t.unlearn(&all, Some(&out.aux)).unwrap()), Hypothesis::Threshold(0));
    }

    #[test]
    fn inconsistent_tickets_are_reported() {
        let s = th(8, &[(3, 0), (5, 1), (2, 0), (7, 1)]);
        let t = TreeScheme::new(&s.class).unwrap();
        let out = t.learn(&s).unwrap();
        let mut req = UnlearnRequest::select(&s, &out, &[0, 1]);
        // Leaves 0 and 1 both carry the encoding of node (1, 1); corrupt one copy.
        let mut forged = BitString::new();
        forged.push(1, 2);
        t.codec().write(&EncodedState::Threshold(1), &mut forged);
        t.codec().write(&EncodedState::Threshold(3), &mut forged);
        req.items[1].ticket = forged;
        assert!(matches!(
            t.unlearn(&req, Some(&out.aux)),
            Err(Error::InconsistentTickets(_))
        ));
        let mut dup = UnlearnRequest::select(&s, &out, &[0]);
        dup.items.push(dup.items[0].clone());
        assert_eq!(t.unlearn(&dup, Some(&out.aux)), Err(Error::DuplicateIndex(0)));
        let wrong = UnlearnRequest::select(&s, &out, &[2]);
        let mut moved = wrong.clone();
        moved.items[0].index = 3;
        assert!(t.unlearn(&moved, Some(&out.aux)).is_err());
    }

    #[test]
    fn frontier_partitions_survivors() {
        for n in 1..=9usize {
            let d = depth(n);
            for mask in 1u32..(1 << n) {
                let deleted: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                let mut covered = vec![0u32; 1 << d];
                for (level, k) in TreeScheme::frontier(n, &deleted) {
                    let w = 1 << (d - level);
                    for leaf in k * w..(k + 1) * w {
                        covered[leaf] += 1;
                    }
                }
                for (leaf, &c) in covered.iter().enumerate() {
                    let expect = u32::from(!deleted.contains(&leaf));
                    assert_eq!(c, expect, "n={n} mask={mask:b} leaf={leaf}");
                }
            }
        }
    }

    #[test]
    fn exhaustive_small_thresholds() {
        let class = ConceptClass::Thresholds { domain: 4 };
        let t = TreeScheme::new(&class).unwrap();
        let n_codes = class.example_count() as u64;
        for n in 0..=4u32 {
            for word in 0..n_codes.pow(n) {
                let mut w = word;
                let items: Vec<Example> = (0..n)
                    .map(|_| {
                        let z = class.example_from_code(w % n_codes).unwrap();
                        w /= n_codes;
                        z
                    })
                    .collect();
                let s = Dataset::new(class.clone(), items).unwrap();
                let Ok(out) = t.learn(&s) else { continue };
                for mask in 0u32..(1 << n) {
                    let del: Vec<usize> = (0..n as usize).filter(|i| mask >> i & 1 == 1).collect();
                    let req = UnlearnRequest::select(&s, &out, &del);
                    let got = hyp(t.unlearn(&req, Some(&out.aux)).unwrap());
                    let survivors = s.without_indices(&del);
                    assert_eq!(got, canonical_erm(&survivors).unwrap());
                }
            }
        }
    }
}
