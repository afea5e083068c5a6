use crate::bits::{bits_for, BitReader, BitString};
use crate::ctz::symbol_from_bits;
use crate::domain::{ConceptClass, Dataset, Example};
use crate::error::{Error, Result};
use crate::scheme::{check_class, require_aux, LearnOutput, Outcome, Scheme, UnlearnRequest};
use crate::sperner::SpernerSymbol;

use super::{fully_deleted, group_ctz};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Min,
    Max,
}

/// MinVal / MaxVal over `1..=domain`.
///
/// Aux: the extreme value (`ceil(log2(domain+1))` bits, 0 for none). Ticket:
/// the 16-bit symbol of the item's value group, then the next distinct value
/// in walk order (successor for MinVal, predecessor for MaxVal, 0 for none).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Values {
    domain: u32,
    dir: Direction,
}

impl Values {
    pub fn new(domain: u32, dir: Direction) -> Self {
        Self { domain, dir }
    }

    pub fn value_bits(&self) -> usize {
        bits_for(u64::from(self.domain) + 1)
    }

    pub fn aux_bits(&self) -> usize {
        self.value_bits()
    }

    pub fn ticket_bits(&self) -> usize {
        SpernerSymbol::BITS + self.value_bits()
    }

    fn write_value(&self, v: Option<u32>, out: &mut BitString) {
        out.push(u64::from(v.unwrap_or(0)), self.value_bits());
    }

    fn read_value(&self, r: &mut BitReader<'_>) -> Result<Option<u32>> {
        match r.read(self.value_bits())? as u32 {
            0 => Ok(None),
            v if v <= self.domain => Ok(Some(v)),
            v => Err(Error::OutOfDomain(format!("value {v} outside 1..={}", self.domain))),
        }
    }

    fn first(&self, values: &[u32]) -> Option<u32> {
        match self.dir {
            Direction::Min => values.iter().copied().min(),
            Direction::Max => values.iter().copied().max(),
        }
    }

    /// Whether `a` comes strictly after `b` in walk order.
    fn after(&self, a: u32, b: u32) -> bool {
        match self.dir {
            Direction::Min => a > b,
            Direction::Max => a < b,
        }
    }

    /// `(value, aux, tickets)`.
    pub fn learn(&self, values: &[u32]) -> Result<(Option<u32>, BitString, Vec<BitString>)> {
        if let Some(&v) = values.iter().find(|&&v| v == 0 || v > self.domain) {
            return Err(Error::OutOfDomain(format!("value {v} outside 1..={}", self.domain)));
        }
        let first = self.first(values);
        let mut aux = BitString::new();
        self.write_value(first, &mut aux);
        let (_, symbols) = group_ctz(values)?;
        let tickets = values
            .iter()
            .zip(symbols)
            .map(|(&v, mut t)| {
                let next = self.first(
                    &values.iter().copied().filter(|&w| self.after(w, v)).collect::<Vec<_>>(),
                );
                self.write_value(next, &mut t);
                t
            })
            .collect();
        Ok((first, aux, tickets))
    }

    /// `deleted` pairs each deleted value with its ticket.
    pub fn unlearn(&self, deleted: &[(u32, &BitString)], aux: &BitString) -> Result<Option<u32>> {
        let mut r = aux.reader();
        let mut b = self.read_value(&mut r)?;
        r.finish().map_err(|e| Error::MalformedAux(e.to_string()))?;
        let mut parsed = Vec::with_capacity(deleted.len());
        for &(v, t) in deleted {
            if t.len() != self.ticket_bits() {
                return Err(Error::MalformedTicket(format!("{} bits", t.len())));
            }
            let mut r = t.reader();
            let mut sym = BitString::new();
            sym.push(r.read(SpernerSymbol::BITS)?, SpernerSymbol::BITS);
            symbol_from_bits(&sym)?;
            let next = self.read_value(&mut r)?;
            parsed.push((v, sym, next));
        }
        while let Some(v) = b {
            let here: Vec<_> = parsed.iter().filter(|(w, _, _)| *w == v).collect();
            let syms: Vec<&BitString> = here.iter().map(|(_, s, _)| s).collect();
            if !fully_deleted(&syms)? {
                return Ok(Some(v));
            }
            let next = here[0].2;
            if here.iter().any(|(_, _, n)| *n != next) {
                return Err(Error::InconsistentTickets(format!("group {v} disagrees on its neighbour")));
            }
            if let Some(n) = next {
                if !self.after(n, v) {
                    return Err(Error::InconsistentTickets(format!("neighbour {n} of {v} goes backwards")));
                }
            }
            b = next;
        }
        Ok(None)
    }
}

/// MinVal / MaxVal on the x values of a scalar dataset; labels are ignored.
#[derive(Debug, Clone)]
pub struct ValueScheme {
    class: ConceptClass,
    values: Values,
}

impl ValueScheme {
    pub fn new(class: &ConceptClass, dir: Direction) -> Result<Self> {
        let domain = class.scalar_domain().ok_or_else(|| Error::Unsupported {
            scheme: "sharp:minval".into(),
            what: format!("class {} has no scalar domain", class.name()),
        })?;
        Ok(Self {
            class: class.clone(),
            values: Values::new(domain, dir),
        })
    }

    pub fn values(&self) -> Values {
        self.values
    }
}

fn scalar_values(items: &[Example]) -> Result<Vec<u32>> {
    items
        .iter()
        .map(|z| z.scalar_x().ok_or_else(|| Error::OutOfDomain(z.to_string())))
        .collect()
}

impl Scheme for ValueScheme {
    fn id(&self) -> String {
        match self.values.dir {
            Direction::Min => "sharp:minval".into(),
            Direction::Max => "sharp:maxval".into(),
        }
    }

    fn learn(&self, data: &Dataset) -> Result<LearnOutput> {
        check_class(&self.class, data)?;
        let (v, aux, tickets) = self.values.learn(&scalar_values(&data.items)?)?;
        Ok(LearnOutput {
            outcome: Outcome::Value(v),
            aux,
            tickets,
        })
    }

    fn unlearn(&self, req: &UnlearnRequest, aux: Option<&BitString>) -> Result<Outcome> {
        req.check_distinct()?;
        let aux = require_aux(aux)?;
        let xs = scalar_values(&req.examples())?;
        let deleted: Vec<(u32, &BitString)> = xs.into_iter().zip(req.items.iter().map(|d| &d.ticket)).collect();
        self.values.unlearn(&deleted, aux).map(Outcome::Value)
    }
}
