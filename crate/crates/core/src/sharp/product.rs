use crate::bits::BitString;
use crate::domain::{closure, loss_on, ConceptClass, Dataset, Example, Hypothesis, Point};
use crate::error::{Error, Result};
use crate::scheme::{check_class, require_aux, LearnOutput, Outcome, Scheme, UnlearnRequest};

use super::{Direction, Values};

/// Product of `d` thresholds: one MinVal per coordinate over the 1-labeled
/// points. Aux and 1-labeled tickets are the `d` MinVal parts concatenated;
/// 0-labeled tickets are empty.
#[derive(Debug, Clone)]
pub struct SharpProductThresholds {
    class: ConceptClass,
    d: usize,
    m: u32,
    values: Values,
}

impl SharpProductThresholds {
    pub fn new(class: &ConceptClass) -> Result<Self> {
        match class {
            ConceptClass::ProductThresholds { d, m } => Ok(Self {
                class: class.clone(),
                d: *d,
                m: *m,
                values: Values::new(*m, Direction::Min),
            }),
            other => Err(Error::ClassMismatch {
                expected: "prodthresh".into(),
                found: other.name().into(),
            }),
        }
    }

    fn coords<'a>(&self, z: &'a Example) -> Result<&'a [u32]> {
        match &z.x {
            Point::Vector(v) if v.len() == self.d => Ok(v),
            _ => Err(Error::OutOfDomain(z.to_string())),
        }
    }

    fn threshold(&self, b: Option<u32>) -> u32 {
        b.map_or(self.m, |b| b - 1)
    }
}

impl Scheme for SharpProductThresholds {
    fn id(&self) -> String {
        "sharp:prodthresh".into()
    }

    fn learn(&self, data: &Dataset) -> Result<LearnOutput> {
        check_class(&self.class, data)?;
        let h = closure(&self.class, &data.items)?;
        if loss_on(&self.class, &h, &data.items)? != 0 {
            return Err(Error::Unrealizable);
        }
        let positives: Vec<usize> = (0..data.len()).filter(|&i| data.items[i].y).collect();
        let mut aux = BitString::new();
        let mut tickets = vec![BitString::new(); data.len()];
        for j in 0..self.d {
            let xs = positives
                .iter()
                .map(|&i| self.coords(&data.items[i]).map(|v| v[j]))
                .collect::<Result<Vec<_>>>()?;
            let (_, a, ts) = self.values.learn(&xs)?;
            aux.extend(&a);
            for (&i, t) in positives.iter().zip(ts) {
                tickets[i].extend(&t);
            }
        }
        Ok(LearnOutput {
            outcome: Outcome::Hypothesis(h),
            aux,
            tickets,
        })
    }

    fn unlearn(&self, req: &UnlearnRequest, aux: Option<&BitString>) -> Result<Outcome> {
        req.check_distinct()?;
        let aux = require_aux(aux)?;
        let (wa, wt) = (self.values.aux_bits(), self.values.ticket_bits());
        if aux.len() != self.d * wa {
            return Err(Error::MalformedAux(format!("{} bits", aux.len())));
        }
        let mut parts: Vec<Vec<(u32, BitString)>> = vec![Vec::new(); self.d];
        for del in req.items.iter().filter(|del| del.example.y) {
            let v = self.coords(&del.example)?;
            if del.ticket.len() != self.d * wt {
                return Err(Error::MalformedTicket(format!("{} bits", del.ticket.len())));
            }
            let mut r = del.ticket.reader();
            for (j, part) in parts.iter_mut().enumerate() {
                let mut t = BitString::new();
                for _ in 0..wt {
                    t.push_bit(r.read_bit()?);
                }
                part.push((v[j], t));
            }
        }
        let mut r = aux.reader();
        let mut a = Vec::with_capacity(self.d);
        for part in &parts {
            let mut sub = BitString::new();
            sub.push(r.read(wa)?, wa);
            let deleted: Vec<(u32, &BitString)> = part.iter().map(|(x, t)| (*x, t)).collect();
            a.push(self.threshold(self.values.unlearn(&deleted, &sub)?));
        }
        Ok(Outcome::Hypothesis(Hypothesis::ProductThreshold(a)))
    }
}
