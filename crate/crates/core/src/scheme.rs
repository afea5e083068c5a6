//! The uniform learn / unlearn contract, bit accounting and dispatch by id.

use std::fmt;

use crate::bits::BitString;
use crate::domain::{ConceptClass, Dataset, Example, Hypothesis};
use crate::error::{Error, Result};

/// Count-to-Zero and realizability answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// ⊤
    Top,
    /// ⊥
    Bottom,
}

impl Verdict {
    pub fn from_bit(b: bool) -> Self {
        if b {
            Verdict::Top
        } else {
            Verdict::Bottom
        }
    }

    pub fn bit(self) -> bool {
        self == Verdict::Top
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Top => "top",
            Verdict::Bottom => "bottom",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Outcome {
    Hypothesis(Hypothesis),
    Verdict(Verdict),
    /// MinVal / MaxVal result; `None` when no value survives.
    Value(Option<u32>),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Hypothesis(h) => write!(f, "{h}"),
            Outcome::Verdict(v) => write!(f, "{v}"),
            Outcome::Value(Some(v)) => write!(f, "value:{v}"),
            Outcome::Value(None) => write!(f, "none"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LearnOutput {
    pub outcome: Outcome,
    pub aux: BitString,
    /// One per input item, in input order.
    pub tickets: Vec<BitString>,
}

impl LearnOutput {
    pub fn aux_bits(&self) -> usize {
        self.aux.len()
    }

    pub fn max_ticket_bits(&self) -> usize {
        self.tickets.iter().map(BitString::len).max().unwrap_or(0)
    }
}

/// One deleted item: its index in the learn call, the example and its ticket.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deletion {
    pub index: usize,
    pub example: Example,
    pub ticket: BitString,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UnlearnRequest {
    pub items: Vec<Deletion>,
}

impl UnlearnRequest {
    /// Builds the request for `indices` of a learn call on `data`.
    pub fn select(data: &Dataset, out: &LearnOutput, indices: &[usize]) -> Self {
        Self {
            items: indices
                .iter()
                .map(|&i| Deletion {
                    index: i,
                    example: data.items[i].clone(),
                    ticket: out.tickets[i].clone(),
                })
                .collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn examples(&self) -> Vec<Example> {
        self.items.iter().map(|d| d.example.clone()).collect()
    }

    /// Rejects repeated indices.
    pub fn check_distinct(&self) -> Result<()> {
        let mut seen: Vec<usize> = self.items.iter().map(|d| d.index).collect();
        seen.sort_unstable();
        for w in seen.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateIndex(w[0]));
            }
        }
        Ok(())
    }
}

/// A learning-unlearning scheme. Central schemes issue zero-length tickets.
pub trait Scheme: Send + Sync {
    fn id(&self) -> String;

    fn learn(&self, data: &Dataset) -> Result<LearnOutput>;

    /// `aux` may be `None` only for schemes that support an absent auxiliary
    /// state (Count-to-Zero with a non-empty request).
    fn unlearn(&self, req: &UnlearnRequest, aux: Option<&BitString>) -> Result<Outcome>;
}

pub(crate) fn require_aux<'a>(aux: Option<&'a BitString>) -> Result<&'a BitString> {
    aux.ok_or(Error::AbsentAux)
}

pub(crate) fn check_class(expected: &ConceptClass, data: &Dataset) -> Result<()> {
    if &data.class == expected {
        Ok(())
    } else {
        Err(Error::ClassMismatch {
            expected: expected.name().into(),
            found: data.class.name().into(),
        })
    }
}

/// All scheme ids accepted by [`build_scheme`], with `<class>` standing for a
/// mergeable class name and `<id>` for any other id.
pub const SCHEME_IDS: &[&str] = &[
    "tree:<class>",
    "chain:<class>",
    "central:thresholds",
    "central:augpoint",
    "central:noreppoint",
    "sharp:point",
    "sharp:minval",
    "sharp:maxval",
    "sharp:prodthresh",
    "sharp:thresholds",
    "agnostic:thresholds",
    "realizability:thresholds",
    "ctz",
    "ctz-via:<id>",
];

/// Instantiates scheme `id` for `class`.
pub fn build_scheme(id: &str, class: &ConceptClass) -> Result<Box<dyn Scheme>> {
    use crate::{agnostic, central, chain, ctz, sharp, tree};
    if let Some(inner) = id.strip_prefix("ctz-via:") {
        return Ok(Box::new(ctz::CtzAdapter::new(build_scheme(inner, class)?, class)?));
    }
    let (family, rest) = id.split_once(':').unwrap_or((id, ""));
    match (family, rest) {
        ("tree" | "chain", name) if name != class.name() => Err(Error::ClassMismatch {
            expected: name.into(),
            found: class.name().into(),
        }),
        ("tree", _) => Ok(Box::new(tree::TreeScheme::new(class)?)),
        ("chain", _) => Ok(Box::new(chain::ChainScheme::new(class)?)),
        ("central", "thresholds") => Ok(Box::new(central::CentralThresholds::new(class)?)),
        ("central", "augpoint") => Ok(Box::new(central::AugmentedPoints::new(class)?)),
        ("central", "noreppoint") => Ok(Box::new(central::NoRepetitionPoints::new(class)?)),
        ("sharp", "point") => Ok(Box::new(sharp::SharpPoint::new(class)?)),
        ("sharp", "minval") => Ok(Box::new(sharp::ValueScheme::new(class, sharp::Direction::Min)?)),
        ("sharp", "maxval") => Ok(Box::new(sharp::ValueScheme::new(class, sharp::Direction::Max)?)),
        ("sharp", "prodthresh") => Ok(Box::new(sharp::SharpProductThresholds::new(class)?)),
        ("sharp", "thresholds") => Ok(Box::new(sharp::SharpThresholds::new(class)?)),
        ("agnostic", "thresholds") => Ok(Box::new(agnostic::AgnosticThresholds::new(class)?)),
        ("realizability", "thresholds") => Ok(Box::new(agnostic::Realizability::new(class)?)),
        ("ctz", "") => Ok(Box::new(ctz::CtzScheme)),
        _ => Err(Error::UnknownScheme(id.into())),
    }
}

pub fn run_learn(id: &str, data: &Dataset) -> Result<LearnOutput> {
    build_scheme(id, &data.class)?.learn(data)
}

pub fn run_unlearn(
    id: &str,
    class: &ConceptClass,
    req: &UnlearnRequest,
    aux: Option<&BitString>,
) -> Result<Outcome> {
    build_scheme(id, class)?.unlearn(req, aux)
}

/// One learn call followed by at most one unlearn call.
pub struct Session {
    scheme: Box<dyn Scheme>,
    data: Dataset,
    output: LearnOutput,
    consumed: bool,
}

impl Session {
    pub fn learn(scheme: Box<dyn Scheme>, data: Dataset) -> Result<Self> {
        let output = scheme.learn(&data)?;
        Ok(Self {
            scheme,
            data,
            output,
            consumed: false,
        })
    }

    pub fn output(&self) -> &LearnOutput {
        &self.output
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn is_consumed(&self) -> bool {
        self.consumed
    }

    /// Deletes the items at `indices`, presenting their stored tickets.
    pub fn unlearn(&mut self, indices: &[usize]) -> Result<Outcome> {
        if self.consumed {
            return Err(Error::AlreadyUnlearned);
        }
        if let Some(&i) = indices.iter().find(|&&i| i >= self.data.len()) {
            return Err(Error::OutOfRange {
                m: i as u64,
                lo: 0,
                hi: self.data.len() as u64,
            });
        }
        let req = UnlearnRequest::select(&self.data, &self.output, indices);
        let out = self.scheme.unlearn(&req, Some(&self.output.aux))?;
        self.consumed = true;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn th(pts: &[(u32, u8)]) -> Dataset {
        let class = ConceptClass::Thresholds { domain: 6 };
        Dataset::new(class, pts.iter().map(|&(x, y)| Example::scalar(x, y)).collect()).unwrap()
    }

    #[test]
    fn dispatch() {
        let data = th(&[(2, 0), (5, 1)]);
        assert_eq!(run_learn("tree:thresholds", &data).unwrap().outcome, Outcome::Hypothesis(Hypothesis::Threshold(2)));
        assert!(matches!(run_learn("tree:parities", &data), Err(Error::ClassMismatch { .. })));
        assert!(matches!(run_learn("bogus", &data), Err(Error::UnknownScheme(_))));
        assert!(matches!(run_learn("sharp:point", &data), Err(Error::ClassMismatch { .. })));
        for id in ["chain:thresholds", "central:thresholds", "sharp:thresholds", "agnostic:thresholds"] {
            let out = run_learn(id, &data).unwrap();
            let got = run_unlearn(id, &data.class, &UnlearnRequest::default(), Some(&out.aux)).unwrap();
            assert_eq!(got, out.outcome, "{id}");
        }
        let out = run_learn("ctz", &data).unwrap();
        let all = UnlearnRequest::select(&data, &out, &[0, 1]);
        assert_eq!(run_unlearn("ctz", &data.class, &all, None).unwrap(), Outcome::Verdict(Verdict::Bottom));
    }

    #[test]
    fn session_is_one_shot() {
        let data = th(&[(2, 0), (5, 1)]);
        let mut s = Session::learn(build_scheme("tree:thresholds", &data.class).unwrap(), data).unwrap();
        assert!(s.unlearn(&[7]).is_err());
        assert!(!s.is_consumed());
        assert_eq!(s.unlearn(&[0]).unwrap(), Outcome::Hypothesis(Hypothesis::Threshold(0)));
        assert_eq!(s.unlearn(&[1]), Err(Error::AlreadyUnlearned));
    }
}
