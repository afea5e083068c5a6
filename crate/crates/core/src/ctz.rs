//! Count-to-Zero: decide from the deleted tickets alone whether anything
//! survives.
//!
//! Learning `m` items issues the elements of `global_family(m)` as tickets
//! (16-bit packed symbols, big-endian) and a 1-bit aux (⊤ iff `m > 0`).
//! Deleting `k > 0` tickets answers ⊥ iff their symbol counts equal
//! `global_family(k)`; the aux is only read when nothing is deleted.

use crate::bits::BitString;
use crate::domain::{ConceptClass, Dataset, Example, Hypothesis, Point, ORACLE_CAP};
use crate::error::{Error, Result};
use crate::scheme::{LearnOutput, Outcome, Scheme, UnlearnRequest, Verdict};
use crate::sperner::{global_family, SpernerMultiset, SpernerSymbol};

pub fn symbol_to_bits(symbol: u16) -> BitString {
    let mut b = BitString::new();
    b.push(u64::from(symbol >> 8), 8);
    b.push(u64::from(symbol & 0xff), 8);
    b
}

pub fn symbol_from_bits(b: &BitString) -> Result<u16> {
    if b.len() != SpernerSymbol::BITS {
        return Err(Error::MalformedTicket(format!("symbol of {} bits", b.len())));
    }
    let mut r = b.reader();
    let hi = r.read(8)? as u16;
    let lo = r.read(8)? as u16;
    Ok(hi << 8 | lo)
}

/// `(aux, tickets)` for a set of `m` items.
pub fn ctz_learn(m: u64) -> Result<(Verdict, Vec<u16>)> {
    if m == 0 {
        return Ok((Verdict::Bottom, Vec::new()));
    }
    Ok((Verdict::Top, global_family(m)?.elements()))
}

/// `aux` is only consulted when `deleted` is empty.
pub fn ctz_unlearn(deleted: &[u16], aux: Option<Verdict>) -> Result<Verdict> {
    if deleted.is_empty() {
        return aux.ok_or(Error::AbsentAux);
    }
    let got = SpernerMultiset::from_elements(deleted);
    let full = global_family(deleted.len() as u64)?;
    Ok(if got == full {
        Verdict::Bottom
    } else {
        Verdict::Top
    })
}

/// Count-to-Zero through the common scheme interface: `learn` counts the
/// dataset items, whatever their class.
#[derive(Debug, Clone, Copy, Default)]
pub struct CtzScheme;

impl Scheme for CtzScheme {
    fn id(&self) -> String {
        "ctz".into()
    }

    fn learn(&self, data: &Dataset) -> Result<LearnOutput> {
        let (aux, tickets) = ctz_learn(data.len() as u64)?;
        let mut a = BitString::new();
        a.push_bit(aux.bit());
        Ok(LearnOutput {
            outcome: Outcome::Verdict(aux),
            aux: a,
            tickets: tickets.into_iter().map(symbol_to_bits).collect(),
        })
    }

    fn unlearn(&self, req: &UnlearnRequest, aux: Option<&BitString>) -> Result<Outcome> {
        req.check_distinct()?;
        let aux = match aux {
            Some(a) if a.len() == 1 => Some(Verdict::from_bit(a.bit(0))),
            Some(a) => return Err(Error::MalformedAux(format!("{} bits", a.len()))),
            None => None,
        };
        let symbols = req
            .items
            .iter()
            .map(|d| symbol_from_bits(&d.ticket))
            .collect::<Result<Vec<_>>>()?;
        ctz_unlearn(&symbols, aux).map(Outcome::Verdict)
    }
}

/// Count-to-Zero built from any scheme for a class with two distinct
/// hypotheses: learn the constant dataset `(x, h_2(x)) × m`, where `h_1` is
/// learned from the empty set and `x` is the first point where the first
/// hypothesis `h_2 ≠ h_1` disagrees with it.
pub struct CtzAdapter {
    inner: Box<dyn Scheme>,
    class: ConceptClass,
    example: Example,
}

impl CtzAdapter {
    pub fn new(inner: Box<dyn Scheme>, class: &ConceptClass) -> Result<Self> {
        let empty = Dataset::empty(class.clone());
        let h1 = match inner.learn(&empty)?.outcome {
            Outcome::Hypothesis(h) => h,
            other => {
                return Err(Error::Unsupported {
                    scheme: inner.id(),
                    what: format!("count-to-zero wrapping of outcome {other}"),
                })
            }
        };
        let points = class.points(ORACLE_CAP)?;
        let example = Self::witness(class, &h1, &points)?;
        Ok(Self {
            inner,
            class: class.clone(),
            example,
        })
    }

    fn witness(class: &ConceptClass, h1: &Hypothesis, points: &[Point]) -> Result<Example> {
        for h2 in class.hypotheses(ORACLE_CAP)? {
            for x in points {
                let y = class.predict(&h2, x)?;
                if y != class.predict(h1, x)? {
                    return Ok(Example::new(x.clone(), y));
                }
            }
        }
        Err(Error::TrivialClass)
    }

    /// The repeated example `(x, h_2(x))`.
    pub fn example(&self) -> &Example {
        &self.example
    }

    pub fn dataset(&self, m: usize) -> Dataset {
        Dataset {
            class: self.class.clone(),
            items: vec![self.example.clone(); m],
        }
    }

    pub fn learn_count(&self, m: usize) -> Result<LearnOutput> {
        let out = self.inner.learn(&self.dataset(m))?;
        let verdict = Verdict::from_bit(m > 0);
        Ok(LearnOutput {
            outcome: Outcome::Verdict(verdict),
            ..out
        })
    }
}

impl Scheme for CtzAdapter {
    fn id(&self) -> String {
        format!("ctz-via:{}", self.inner.id())
    }

    fn learn(&self, data: &Dataset) -> Result<LearnOutput> {
        self.learn_count(data.len())
    }

    fn unlearn(&self, req: &UnlearnRequest, aux: Option<&BitString>) -> Result<Outcome> {
        let mut inner_req = req.clone();
        for d in &mut inner_req.items {
            d.example = self.example.clone();
        }
        match self.inner.unlearn(&inner_req, aux)? {
            Outcome::Hypothesis(h) => {
                let hit = self.class.predict(&h, &self.example.x)? == self.example.y;
                Ok(Outcome::Verdict(Verdict::from_bit(hit)))
            }
            other => Err(Error::Unsupported {
                scheme: self.inner.id(),
                what: format!("count-to-zero wrapping of outcome {other}"),
            }),
        }
    }
}
