use std::collections::BTreeMap;

use crate::bits::{bits_for, BitString};
use crate::domain::{canonical_erm, smallest_unlabeled_zero, ConceptClass, Dataset, Example, Hypothesis};
use crate::error::{Error, Result};
use crate::scheme::{check_class, require_aux, LearnOutput, Outcome, Scheme, UnlearnRequest};

use super::{fully_deleted, group_ctz};

/// Point functions. Aux: `a − 1`, a flag set iff some `(a, 1)` is present,
/// and `b − 1` for the smallest `b` with `(b, 0)` absent; `ceil(log2|X|)` bits
/// per value. Ticket: the Count-to-Zero symbol of the item's x-value group.
#[derive(Debug, Clone)]
pub struct SharpPoint {
    class: ConceptClass,
    domain: u32,
}

impl SharpPoint {
    pub fn new(class: &ConceptClass) -> Result<Self> {
        match class {
            ConceptClass::PointFunctions { domain } => Ok(Self {
                class: class.clone(),
                domain: *domain,
            }),
            other => Err(Error::ClassMismatch {
                expected: "points".into(),
                found: other.name().into(),
            }),
        }
    }

    fn width(&self) -> usize {
        bits_for(u64::from(self.domain))
    }
}

impl Scheme for SharpPoint {
    fn id(&self) -> String {
        "sharp:point".into()
    }

    fn learn(&self, data: &Dataset) -> Result<LearnOutput> {
        check_class(&self.class, data)?;
        let h = canonical_erm(data)?;
        let Hypothesis::Point(a) = h else {
            unreachable!("point class yields point hypotheses")
        };
        let positive = data.items.iter().any(|z| z.y);
        let b = smallest_unlabeled_zero(self.domain, &data.items).ok_or(Error::Unrealizable)?;
        let mut aux = BitString::new();
        aux.push(u64::from(a - 1), self.width());
        aux.push_bit(positive);
        aux.push(u64::from(b - 1), self.width());
        let keys: Vec<u32> = data.items.iter().filter_map(Example::scalar_x).collect();
        let (_, tickets) = group_ctz(&keys)?;
        Ok(LearnOutput {
            outcome: Outcome::Hypothesis(h),
            aux,
            tickets,
        })
    }

    fn unlearn(&self, req: &UnlearnRequest, aux: Option<&BitString>) -> Result<Outcome> {
        req.check_distinct()?;
        let aux = require_aux(aux)?;
        let mut r = aux.reader();
        let a = r.read(self.width())? as u32 + 1;
        let positive = r.read_bit()?;
        let mut b = r.read(self.width())? as u32 + 1;
        r.finish().map_err(|e| Error::MalformedAux(e.to_string()))?;
        let mut groups: BTreeMap<u32, Vec<&BitString>> = BTreeMap::new();
        for d in &req.items {
            let x = d.example.scalar_x().ok_or_else(|| Error::OutOfDomain(d.example.to_string()))?;
            groups.entry(x).or_default().push(&d.ticket);
        }
        let gone = |j: u32| fully_deleted(groups.get(&j).map_or(&[][..], Vec::as_slice));
        if positive && !gone(a)? {
            return Ok(Outcome::Hypothesis(Hypothesis::Point(a)));
        }
        for j in (1..b).rev() {
            if gone(j)? {
                b = j;
            }
        }
        Ok(Outcome::Hypothesis(Hypothesis::Point(b)))
    }
}
