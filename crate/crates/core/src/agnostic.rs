//! Thresholds without a realizability assumption, and a ticketed test of
//! realizability.

use std::collections::BTreeMap;

use crate::bits::{bits_for, BitReader, BitString};
use crate::domain::{minimal_threshold, ConceptClass, Dataset, Example, Hypothesis};
use crate::error::{Error, Result};
use crate::scheme::{check_class, require_aux, LearnOutput, Outcome, Scheme, UnlearnRequest, Verdict};
use crate::sharp::{Direction, Values};

/// Locally minimal threshold `a` in `[p−1, q]` and its loss on the full dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntervalStat {
    pub a: u32,
    pub err: u64,
}

/// Minimal ERM for thresholds over a binary tree on the domain padded to a
/// power of two.
///
/// Ticket of an item with value `x`: the stats of the sibling subtrees along
/// the path to leaf `x` (root side first), the leaf's own stat, then the
/// counts of `(x, 0)` and `(x, 1)`. Values are `ceil(log2(P+1))` bits, errors
/// and counts `ceil(log2(n+1))` bits, the latter recovered from the ticket
/// length. Aux: the hypothesis.
#[derive(Debug, Clone)]
pub struct AgnosticThresholds {
    class: ConceptClass,
    domain: u32,
    levels: usize,
}

impl AgnosticThresholds {
    pub fn new(class: &ConceptClass) -> Result<Self> {
        match class {
            ConceptClass::Thresholds { domain } => Ok(Self {
                class: class.clone(),
                domain: *domain,
                levels: bits_for(u64::from(*domain)),
            }),
            other => Err(Error::ClassMismatch {
                expected: "thresholds".into(),
                found: other.name().into(),
            }),
        }
    }

    pub fn padded_domain(&self) -> u32 {
        1 << self.levels
    }

    fn value_bits(&self) -> usize {
        bits_for(u64::from(self.padded_domain()) + 1)
    }

    pub fn ticket_bits(&self, n: usize) -> usize {
        let we = bits_for(n as u64 + 1);
        (self.levels + 1) * (self.value_bits() + we) + 2 * we
    }

    /// Leaves `[p, q]` under node `k` of `level`.
    fn span(&self, level: usize, k: usize) -> (u32, u32) {
        let w = 1u32 << (self.levels - level);
        (k as u32 * w + 1, (k as u32 + 1) * w)
    }

    fn write_stat(&self, s: IntervalStat, we: usize, out: &mut BitString) {
        out.push(u64::from(s.a), self.value_bits());
        out.push(s.err, we);
    }

    fn read_stat(&self, r: &mut BitReader<'_>, we: usize) -> Result<IntervalStat> {
        let a = r.read(self.value_bits())? as u32;
        let err = r.read(we)?;
        if a > self.padded_domain() {
            return Err(Error::MalformedTicket(format!("threshold {a} off the tree")));
        }
        Ok(IntervalStat { a, err })
    }
}

/// `loss[a]` for `a in 0..=p`, and the label counts per value.
fn losses(p: u32, items: &[Example]) -> Result<(Vec<u64>, Vec<[u64; 2]>)> {
    let mut cnt = vec![[0u64; 2]; p as usize + 1];
    for z in items {
        let x = z.scalar_x().filter(|&x| x >= 1 && x <= p).ok_or_else(|| Error::OutOfDomain(z.to_string()))?;
        cnt[x as usize][usize::from(z.y)] += 1;
    }
    let mut loss = vec![cnt.iter().map(|c| c[0]).sum::<u64>()];
    for a in 1..=p as usize {
        loss.push(loss[a - 1] - cnt[a][0] + cnt[a][1]);
    }
    Ok((loss, cnt))
}

fn local_min(loss: &[u64], p: u32, q: u32) -> IntervalStat {
    let mut best = IntervalStat { a: p - 1, err: loss[p as usize - 1] };
    for a in p..=q {
        if loss[a as usize] < best.err {
            best = IntervalStat { a, err: loss[a as usize] };
        }
    }
    best
}

fn deleted_loss(a: u32, deleted: &[Example]) -> u64 {
    deleted.iter().filter(|z| (z.scalar_x().unwrap() > a) != z.y).count() as u64
}

impl Scheme for AgnosticThresholds {
    fn id(&self) -> String {
        "agnostic:thresholds".into()
    }

    fn learn(&self, data: &Dataset) -> Result<LearnOutput> {
        check_class(&self.class, data)?;
        let p = self.padded_domain();
        let (loss, cnt) = losses(p, &data.items)?;
        let root = local_min(&loss, 1, p);
        let h = Hypothesis::Threshold(root.a.min(self.domain));
        let aux = self.class.hypothesis_to_bits(&h)?;
        let we = bits_for(data.len() as u64 + 1);
        let d = self.levels;
        let tickets = data
            .items
            .iter()
            .map(|z| {
                let leaf = z.scalar_x().unwrap() as usize - 1;
                let mut t = BitString::new();
                for level in 1..=d {
                    let (lo, hi) = self.span(level, (leaf >> (d - level)) ^ 1);
                    self.write_stat(local_min(&loss, lo, hi), we, &mut t);
                }
                let x = leaf as u32 + 1;
                self.write_stat(local_min(&loss, x, x), we, &mut t);
                t.push(cnt[x as usize][0], we);
                t.push(cnt[x as usize][1], we);
                t
            })
            .collect();
        Ok(LearnOutput {
            outcome: Outcome::Hypothesis(h),
            aux,
            tickets,
        })
    }

    fn unlearn(&self, req: &UnlearnRequest, aux: Option<&BitString>) -> Result<Outcome> {
        req.check_distinct()?;
        let aux = require_aux(aux)?;
        if req.is_empty() {
            return Ok(Outcome::Hypothesis(self.class.hypothesis_from_bits(aux)?));
        }
        let d = self.levels;
        let len = req.items[0].ticket.len();
        let fixed = (d + 1) * self.value_bits();
        if len < fixed || (len - fixed) % (d + 3) != 0 {
            return Err(Error::MalformedTicket(format!("agnostic ticket of {len} bits")));
        }
        let we = (len - fixed) / (d + 3);
        let mut nodes: BTreeMap<(usize, usize), IntervalStat> = BTreeMap::new();
        // Per touched value: own stat and the two label counts.
        let mut leaves: BTreeMap<u32, (IntervalStat, u64, u64)> = BTreeMap::new();
        let mut deleted = Vec::with_capacity(req.len());
        for del in &req.items {
            let x = del
                .example
                .scalar_x()
                .filter(|&x| x >= 1 && x <= self.domain)
                .ok_or_else(|| Error::OutOfDomain(del.example.to_string()))?;
            deleted.push(del.example.clone());
            if del.ticket.len() != len {
                return Err(Error::InconsistentTickets("tickets differ in length".into()));
            }
            let mut r = del.ticket.reader();
            let leaf = x as usize - 1;
            for level in 1..=d {
                let node = (level, (leaf >> (d - level)) ^ 1);
                let s = self.read_stat(&mut r, we)?;
                if nodes.insert(node, s).is_some_and(|prev| prev != s) {
                    return Err(Error::InconsistentTickets(format!("node {node:?} has two stats")));
                }
            }
            let own = (self.read_stat(&mut r, we)?, r.read(we)?, r.read(we)?);
            r.finish()?;
            if leaves.insert(x, own).is_some_and(|prev| prev != own) {
                return Err(Error::InconsistentTickets(format!("value {x} has two leaf records")));
            }
        }
        let touched = |level: usize, k: usize| leaves.keys().any(|&x| (x as usize - 1) >> (d - level) == k);
        // (a, loss on S) for every candidate.
        let mut candidates: Vec<(u32, u64)> = Vec::new();
        for (&(level, k), s) in &nodes {
            if !touched(level, k) {
                candidates.push((s.a, s.err));
            }
        }
        for (&x, &(own, c0, c1)) in &leaves {
            let (below, at) = if own.a == x {
                ((own.err + c0).checked_sub(c1), Some(own.err))
            } else {
                (Some(own.err), (own.err + c1).checked_sub(c0))
            };
            match (below, at) {
                (Some(b), Some(a)) => candidates.extend([(x - 1, b), (x, a)]),
                _ => return Err(Error::MalformedTicket(format!("leaf record of {x} is inconsistent"))),
            }
        }
        let mut best: Option<(u64, u32)> = None;
        for (a, err) in candidates {
            let gone = deleted_loss(a, &deleted);
            let left = err.checked_sub(gone).ok_or_else(|| {
                Error::InconsistentTickets(format!("deleted loss exceeds recorded loss at {a}"))
            })?;
            if best.is_none_or(|b| (left, a) < b) {
                best = Some((left, a));
            }
        }
        let (_, a) = best.expect("the partition is never empty");
        Ok(Outcome::Hypothesis(Hypothesis::Threshold(a.min(self.domain))))
    }
}

/// Minimal ERM through the scheme-independent path, for comparisons.
pub fn minimal_erm(domain: u32, items: &[Example]) -> Hypothesis {
    Hypothesis::Threshold(minimal_threshold(domain, items))
}

/// Realizability of 1D threshold data: MaxVal over the 0-labeled values and
/// MinVal over the 1-labeled values. Aux: the verdict bit (1 for ⊤, not
/// realizable), then the MaxVal and MinVal auxes. Each ticket is the item's
/// MaxVal or MinVal ticket.
#[derive(Debug, Clone)]
pub struct Realizability {
    class: ConceptClass,
    max0: Values,
    min1: Values,
}

fn verdict(x0: Option<u32>, x1: Option<u32>) -> Verdict {
    match (x0, x1) {
        (Some(a), Some(b)) => Verdict::from_bit(a >= b),
        _ => Verdict::Bottom,
    }
}

impl Realizability {
    pub fn new(class: &ConceptClass) -> Result<Self> {
        match class {
            ConceptClass::Thresholds { domain } => Ok(Self {
                class: class.clone(),
                max0: Values::new(*domain, Direction::Max),
                min1: Values::new(*domain, Direction::Min),
            }),
            other => Err(Error::ClassMismatch {
                expected: "thresholds".into(),
                found: other.name().into(),
            }),
        }
    }

    fn split(items: &[Example], label: bool) -> Result<(Vec<usize>, Vec<u32>)> {
        let idx: Vec<usize> = (0..items.len()).filter(|&i| items[i].y == label).collect();
        let xs = idx
            .iter()
            .map(|&i| items[i].scalar_x().ok_or_else(|| Error::OutOfDomain(items[i].to_string())))
            .collect::<Result<Vec<_>>>()?;
        Ok((idx, xs))
    }
}

impl Scheme for Realizability {
    fn id(&self) -> String {
        "realizability:thresholds".into()
    }

    fn learn(&self, data: &Dataset) -> Result<LearnOutput> {
        check_class(&self.class, data)?;
        let (i0, x0) = Self::split(&data.items, false)?;
        let (i1, x1) = Self::split(&data.items, true)?;
        let (v0, a0, t0) = self.max0.learn(&x0)?;
        let (v1, a1, t1) = self.min1.learn(&x1)?;
        let v = verdict(v0, v1);
        let mut aux = BitString::new();
        aux.push_bit(v.bit());
        aux.extend(&a0);
        aux.extend(&a1);
        let mut tickets = vec![BitString::new(); data.len()];
        for (i, t) in i0.into_iter().zip(t0).chain(i1.into_iter().zip(t1)) {
            tickets[i] = t;
        }
        Ok(LearnOutput {
            outcome: Outcome::Verdict(v),
            aux,
            tickets,
        })
    }

    fn unlearn(&self, req: &UnlearnRequest, aux: Option<&BitString>) -> Result<Outcome> {
        req.check_distinct()?;
        let aux = require_aux(aux)?;
        let (w0, w1) = (self.max0.aux_bits(), self.min1.aux_bits());
        if aux.len() != 1 + w0 + w1 {
            return Err(Error::MalformedAux(format!("{} bits", aux.len())));
        }
        let mut r = aux.reader();
        if !r.read_bit()? {
            return Ok(Outcome::Verdict(Verdict::Bottom));
        }
        let mut a0 = BitString::new();
        a0.push(r.read(w0)?, w0);
        let mut a1 = BitString::new();
        a1.push(r.read(w1)?, w1);
        let mut d0 = Vec::new();
        let mut d1 = Vec::new();
        for del in &req.items {
            let x = del.example.scalar_x().ok_or_else(|| Error::OutOfDomain(del.example.to_string()))?;
            if del.example.y {
                d1.push((x, &del.ticket));
            } else {
                d0.push((x, &del.ticket));
            }
        }
        let v0 = self.max0.unlearn(&d0, &a0)?;
        let v1 = self.min1.unlearn(&d1, &a1)?;
        Ok(Outcome::Verdict(verdict(v0, v1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(domain: u32, pts: &[(u32, u8)]) -> Dataset {
        let class = ConceptClass::Thresholds { domain };
        Dataset::new(class, pts.iter().map(|&(x, y)| Example::scalar(x, y)).collect()).unwrap()
    }

    fn run(s: &dyn Scheme, data: &Dataset, del: &[usize]) -> Outcome {
        let out = s.learn(data).unwrap();
        let req = UnlearnRequest::select(data, &out, del);
        s.unlearn(&req, Some(&out.aux)).unwrap()
    }

    #[test]
    fn agnostic_examples() {
        let data = ds(4, &[(1, 1), (2, 0), (3, 1), (4, 0)]);
        let s = AgnosticThresholds::new(&data.class).unwrap();
        let out = s.learn(&data).unwrap();
        assert_eq!(out.outcome, Outcome::Hypothesis(Hypothesis::Threshold(0)));
        assert!(out.tickets.iter().all(|t| t.len() == s.ticket_bits(4)));
        assert_eq!(run(&s, &data, &[0, 3]), Outcome::Hypothesis(Hypothesis::Threshold(2)));
        assert_eq!(run(&s, &data, &[0, 1, 2, 3]), Outcome::Hypothesis(Hypothesis::Threshold(0)));
        let data = ds(4, &[(2, 0), (3, 1)]);
        assert_eq!(run(&s, &data, &[]), Outcome::Hypothesis(Hypothesis::Threshold(2)));
        assert_eq!(run(&s, &data, &[0]), Outcome::Hypothesis(Hypothesis::Threshold(0)));
        assert_eq!(run(&s, &ds(4, &[]), &[]), Outcome::Hypothesis(Hypothesis::Threshold(0)));
    }

    #[test]
    fn singleton_threshold_can_flip() {
        // The locally best threshold at leaf 2 moves from 2 to 1 once (2, 0) goes.
        let data = ds(4, &[(2, 0), (2, 0), (2, 1), (1, 0)]);
        let s = AgnosticThresholds::new(&data.class).unwrap();
        for del in [&[0usize, 1][..], &[0], &[2], &[3], &[0, 3]] {
            let survivors = data.without_indices(del);
            assert_eq!(
                run(&s, &data, del),
                Outcome::Hypothesis(minimal_erm(4, &survivors.items)),
                "{del:?}"
            );
        }
    }

    #[test]
    fn realizability_examples() {
        let r = Realizability::new(&ConceptClass::Thresholds { domain: 6 }).unwrap();
        let data = ds(6, &[(3, 0), (2, 1)]);
        assert_eq!(r.learn(&data).unwrap().outcome, Outcome::Verdict(Verdict::Top));
        assert_eq!(run(&r, &data, &[0]), Outcome::Verdict(Verdict::Bottom));
        assert_eq!(run(&r, &data, &[]), Outcome::Verdict(Verdict::Top));
        let data = ds(6, &[(2, 0), (3, 1)]);
        for del in [&[][..], &[0], &[1], &[0, 1]] {
            assert_eq!(run(&r, &data, del), Outcome::Verdict(Verdict::Bottom));
        }
        assert_eq!(r.learn(&ds(6, &[])).unwrap().outcome, Outcome::Verdict(Verdict::Bottom));
    }
}
