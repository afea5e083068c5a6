//! Central-model schemes: only the auxiliary state and the deleted examples
//! are available at unlearning time, so every ticket is empty.

use crate::bits::{bits_for, BitString};
use crate::domain::{
    loss_on, smallest_unlabeled_zero, thresholds_realizable, ConceptClass, Dataset, Example,
    Hypothesis,
};
use crate::error::{Error, Result};
use crate::scheme::{check_class, require_aux, LearnOutput, Outcome, Scheme, UnlearnRequest};

/// Binary search over thresholds on the padded domain `{1, …, 2^D − 2}`.
///
/// The reachable search points `0..=2^D − 2` form a complete binary search
/// tree rooted at `2^(D−1) − 1`, so a path is determined by its last point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchGrid {
    domain: u32,
    depth: u32,
}

impl SearchGrid {
    pub fn new(domain: u32) -> Self {
        let mut depth = 2;
        while (1u64 << depth) - 2 < u64::from(domain) {
            depth += 1;
        }
        Self { domain, depth }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn padded_domain(&self) -> u32 {
        ((1u64 << self.depth) - 2) as u32
    }

    /// Bits of a search point.
    pub fn point_bits(&self) -> usize {
        self.depth as usize
    }

    fn root(&self) -> u32 {
        (1 << (self.depth - 1)) - 1
    }

    fn step(&self, i: usize) -> Option<u32> {
        (self.depth as usize).checked_sub(i + 2).map(|e| 1 << e)
    }

    /// `a_0, …, a_i` for a realizable dataset.
    pub fn search(&self, items: &[Example]) -> Vec<u32> {
        let p = items
            .iter()
            .filter(|z| !z.y)
            .filter_map(Example::scalar_x)
            .max()
            .unwrap_or(0);
        let q = items
            .iter()
            .filter(|z| z.y)
            .filter_map(Example::scalar_x)
            .min()
            .map_or(1 << self.depth, |x| x)
            - 1;
        let mut path = vec![self.root()];
        loop {
            let a = *path.last().unwrap();
            if a >= p && a <= q {
                return path;
            }
            let step = self.step(path.len() - 1).expect("realizable search ends in the tree");
            path.push(if a < p { a + step } else { a - step });
        }
    }

    /// The unique search path ending at `target`.
    pub fn path_to(&self, target: u32) -> Result<Vec<u32>> {
        if target > self.padded_domain() {
            return Err(Error::MalformedAux(format!("search point {target} off the grid")));
        }
        let mut path = vec![self.root()];
        while let Some(&a) = path.last().filter(|&&a| a != target) {
            let step = self.step(path.len() - 1).expect("every grid point is reachable");
            path.push(if target > a { a + step } else { a - step });
        }
        Ok(path)
    }

    /// Search points above the real domain label nothing in it; report them as `h_{>|X|}`.
    pub fn hypothesis(&self, a: u32) -> Hypothesis {
        Hypothesis::Threshold(a.min(self.domain))
    }
}

fn threshold_domain(class: &ConceptClass) -> Result<u32> {
    match class {
        ConceptClass::Thresholds { domain } => Ok(*domain),
        other => Err(Error::ClassMismatch {
            expected: "thresholds".into(),
            found: other.name().into(),
        }),
    }
}

/// Binary-search scheme. Aux: `a_i` (`D` bits), then `err_0 … err_i`, each
/// `ceil(log2(n+1))` bits; the error width is recovered from the aux length.
#[derive(Debug, Clone)]
pub struct CentralThresholds {
    class: ConceptClass,
    grid: SearchGrid,
}

impl CentralThresholds {
    pub fn new(class: &ConceptClass) -> Result<Self> {
        Ok(Self {
            class: class.clone(),
            grid: SearchGrid::new(threshold_domain(class)?),
        })
    }

    pub fn grid(&self) -> SearchGrid {
        self.grid
    }
}

impl Scheme for CentralThresholds {
    fn id(&self) -> String {
        "central:thresholds".into()
    }

    fn learn(&self, data: &Dataset) -> Result<LearnOutput> {
        check_class(&self.class, data)?;
        if !thresholds_realizable(&data.items) {
            return Err(Error::Unrealizable);
        }
        let path = self.grid.search(&data.items);
        let last = *path.last().unwrap();
        let we = bits_for(data.len() as u64 + 1);
        let mut aux = BitString::new();
        aux.push(u64::from(last), self.grid.point_bits());
        for &a in &path {
            let err = data.items.iter().filter(|z| (z.scalar_x().unwrap() > a) != z.y).count();
            aux.push(err as u64, we);
        }
        Ok(LearnOutput {
            outcome: Outcome::Hypothesis(self.grid.hypothesis(last)),
            aux,
            tickets: vec![BitString::new(); data.len()],
        })
    }

    fn unlearn(&self, req: &UnlearnRequest, aux: Option<&BitString>) -> Result<Outcome> {
        req.check_distinct()?;
        let aux = require_aux(aux)?;
        let mut r = aux.reader();
        let last = r.read(self.grid.point_bits())? as u32;
        let path = self.grid.path_to(last)?;
        let rest = r.remaining();
        if rest % path.len() != 0 {
            return Err(Error::MalformedAux(format!("{rest} error bits for {} points", path.len())));
        }
        let we = rest / path.len();
        let deleted = req.examples();
        for &a in &path {
            let err = r.read(we)? as usize;
            let gone = deleted
                .iter()
                .filter(|z| z.scalar_x().is_some_and(|x| (x > a) != z.y))
                .count();
            if err < gone {
                return Err(Error::InconsistentTickets(format!(
                    "more deleted errors than recorded at a = {a}"
                )));
            }
            if err == gone {
                return Ok(Outcome::Hypothesis(self.grid.hypothesis(a)));
            }
        }
        Err(Error::MalformedAux("no zero-loss point on the search path".into()))
    }
}

/// Point functions plus the zero hypothesis. Aux: the hypothesis
/// (`ceil(log2(|X|+1))` bits, 0 for zero), then the count `c` of `(a, 1)`.
#[derive(Debug, Clone)]
pub struct AugmentedPoints {
    class: ConceptClass,
}

impl AugmentedPoints {
    pub fn new(class: &ConceptClass) -> Result<Self> {
        match class {
            ConceptClass::PointsWithZero { .. } => Ok(Self { class: class.clone() }),
            other => Err(Error::ClassMismatch {
                expected: "augpoints".into(),
                found: other.name().into(),
            }),
        }
    }
}

impl Scheme for AugmentedPoints {
    fn id(&self) -> String {
        "central:augpoint".into()
    }

    fn learn(&self, data: &Dataset) -> Result<LearnOutput> {
        check_class(&self.class, data)?;
        let a = data.items.iter().find(|z| z.y).and_then(Example::scalar_x);
        let h = Hypothesis::PointOrZero(a);
        if loss_on(&self.class, &h, &data.items)? != 0 {
            return Err(Error::Unrealizable);
        }
        let c = data.items.iter().filter(|z| z.y).count();
        let mut aux = self.class.hypothesis_to_bits(&h)?;
        aux.push(c as u64, bits_for(data.len() as u64 + 1));
        Ok(LearnOutput {
            outcome: Outcome::Hypothesis(h),
            aux,
            tickets: vec![BitString::new(); data.len()],
        })
    }

    fn unlearn(&self, req: &UnlearnRequest, aux: Option<&BitString>) -> Result<Outcome> {
        req.check_distinct()?;
        let aux = require_aux(aux)?;
        let mut r = aux.reader();
        let h = self.class.read_hypothesis(&mut r)?;
        let c = r.read(r.remaining())? as usize;
        let Hypothesis::PointOrZero(Some(a)) = h else {
            return Ok(Outcome::Hypothesis(h));
        };
        let gone = req
            .items
            .iter()
            .filter(|d| d.example == Example::scalar(a, 1))
            .count();
        Ok(Outcome::Hypothesis(if gone == c {
            Hypothesis::PointOrZero(None)
        } else {
            h
        }))
    }
}

/// Point functions on repetition-free data. Aux: `a − 1` and `b − 1`
/// (`ceil(log2|X|)` bits each) and a flag set iff some `(a, 1)` is present.
#[derive(Debug, Clone)]
pub struct NoRepetitionPoints {
    class: ConceptClass,
    domain: u32,
}

impl NoRepetitionPoints {
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

impl Scheme for NoRepetitionPoints {
    fn id(&self) -> String {
        "central:noreppoint".into()
    }

    fn learn(&self, data: &Dataset) -> Result<LearnOutput> {
        check_class(&self.class, data)?;
        let mut sorted = data.items.clone();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::RepeatedExample(w[0].to_string()));
        }
        let b = smallest_unlabeled_zero(self.domain, &data.items);
        let positive = data.items.iter().find(|z| z.y).and_then(Example::scalar_x);
        let (a, b) = match (positive, b) {
            (Some(a), Some(b)) => (a, b),
            (None, Some(b)) => (b, b),
            (_, None) => return Err(Error::Unrealizable),
        };
        let h = Hypothesis::Point(a);
        if loss_on(&self.class, &h, &data.items)? != 0 {
            return Err(Error::Unrealizable);
        }
        let mut aux = BitString::new();
        aux.push(u64::from(a - 1), self.width());
        aux.push(u64::from(b - 1), self.width());
        aux.push_bit(positive.is_some());
        Ok(LearnOutput {
            outcome: Outcome::Hypothesis(h),
            aux,
            tickets: vec![BitString::new(); data.len()],
        })
    }

    fn unlearn(&self, req: &UnlearnRequest, aux: Option<&BitString>) -> Result<Outcome> {
        req.check_distinct()?;
        let aux = require_aux(aux)?;
        let mut r = aux.reader();
        let a = r.read(self.width())? as u32 + 1;
        let b = r.read(self.width())? as u32 + 1;
        let flag = r.read_bit()?;
        r.finish().map_err(|e| Error::MalformedAux(e.to_string()))?;
        if req.is_empty() || (flag && !req.items.iter().any(|d| d.example == Example::scalar(a, 1))) {
            return Ok(Outcome::Hypothesis(Hypothesis::Point(a)));
        }
        let c = req
            .items
            .iter()
            .filter(|d| !d.example.y)
            .filter_map(|d| d.example.scalar_x())
            .min()
            .unwrap_or(u32::MAX);
        Ok(Outcome::Hypothesis(Hypothesis::Point(b.min(c))))
    }
}
