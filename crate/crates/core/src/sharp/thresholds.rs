use crate::bits::BitString;
use crate::central::SearchGrid;
use crate::domain::{thresholds_realizable, ConceptClass, Dataset, Example};
use crate::error::{Error, Result};
use crate::scheme::{check_class, require_aux, LearnOutput, Outcome, Scheme, UnlearnRequest};

use super::{fully_deleted, group_ctz};

/// 1D thresholds via the binary-search path. The sorted path values cut the
/// line into cells `(v_k, v_{k+1}]`, each with its own Count-to-Zero.
/// Aux: `a_i` (`D` bits) and one verdict bit per cell. Ticket: the symbol of
/// the item's cell, or empty outside every cell.
#[derive(Debug, Clone)]
pub struct SharpThresholds {
    class: ConceptClass,
    grid: SearchGrid,
}

/// Cell index of `x` among the sorted cut points.
fn cell_of(cuts: &[u32], x: u32) -> Option<usize> {
    cuts.windows(2).position(|w| w[0] < x && x <= w[1])
}

fn sorted(path: &[u32]) -> Vec<u32> {
    let mut v = path.to_vec();
    v.sort_unstable();
    v
}

impl SharpThresholds {
    pub fn new(class: &ConceptClass) -> Result<Self> {
        match class {
            ConceptClass::Thresholds { domain } => Ok(Self {
                class: class.clone(),
                grid: SearchGrid::new(*domain),
            }),
            other => Err(Error::ClassMismatch {
                expected: "thresholds".into(),
                found: other.name().into(),
            }),
        }
    }

    pub fn grid(&self) -> SearchGrid {
        self.grid
    }
}

impl Scheme for SharpThresholds {
    fn id(&self) -> String {
        "sharp:thresholds".into()
    }

    fn learn(&self, data: &Dataset) -> Result<LearnOutput> {
        check_class(&self.class, data)?;
        if !thresholds_realizable(&data.items) {
            return Err(Error::Unrealizable);
        }
        let path = self.grid.search(&data.items);
        let last = *path.last().unwrap();
        let cuts = sorted(&path);
        let cells: Vec<Option<usize>> = data
            .items
            .iter()
            .map(|z| z.scalar_x().and_then(|x| cell_of(&cuts, x)))
            .collect();
        let inside: Vec<usize> = (0..data.len()).filter(|&i| cells[i].is_some()).collect();
        let keys: Vec<usize> = inside.iter().map(|&i| cells[i].unwrap()).collect();
        let (verdicts, symbols) = group_ctz(&keys)?;
        let mut tickets = vec![BitString::new(); data.len()];
        for (&i, t) in inside.iter().zip(symbols) {
            tickets[i] = t;
        }
        let mut aux = BitString::new();
        aux.push(u64::from(last), self.grid.point_bits());
        for k in 0..cuts.len() - 1 {
            aux.push_bit(verdicts.get(&k).is_some_and(|v| v.bit()));
        }
        Ok(LearnOutput {
            outcome: Outcome::Hypothesis(self.grid.hypothesis(last)),
            aux,
            tickets,
        })
    }

    fn unlearn(&self, req: &UnlearnRequest, aux: Option<&BitString>) -> Result<Outcome> {
        req.check_distinct()?;
        let aux = require_aux(aux)?;
        let mut r = aux.reader();
        let last = r.read(self.grid.point_bits())? as u32;
        let path = self.grid.path_to(last)?;
        let cuts = sorted(&path);
        let mut occupied = Vec::with_capacity(cuts.len() - 1);
        for k in 0..cuts.len() - 1 {
            let stored = r.read_bit()?;
            let deleted: Vec<&BitString> = req
                .items
                .iter()
                .filter(|d| d.example.scalar_x().and_then(|x| cell_of(&cuts, x)) == Some(k))
                .map(|d| &d.ticket)
                .collect();
            occupied.push(if deleted.is_empty() {
                stored
            } else {
                !fully_deleted(&deleted)?
            });
        }
        r.finish().map_err(|e| Error::MalformedAux(e.to_string()))?;
        for &a in &path {
            let (lo, hi) = (a.min(last), a.max(last));
            let clear = (0..occupied.len()).all(|k| !occupied[k] || cuts[k] < lo || cuts[k + 1] > hi);
            if clear {
                return Ok(Outcome::Hypothesis(self.grid.hypothesis(a)));
            }
        }
        unreachable!("the last path point always qualifies")
    }
}

impl SharpThresholds {
    /// Items whose ticket is non-empty.
    pub fn ticketed(&self, items: &[Example]) -> usize {
        let cuts = sorted(&self.grid.search(items));
        items
            .iter()
            .filter(|z| z.scalar_x().and_then(|x| cell_of(&cuts, x)).is_some())
            .count()
    }
}
