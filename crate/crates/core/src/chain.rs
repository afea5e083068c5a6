//! Compression-chain scheme.
//!
//! The dataset is peeled into cells `T_1 = compress(S)`, `T_2 =
//! compress(S ∖ T_1)`, ... until the compression of the remainder is empty.
//! A ticket is a cell index of `ceil(log2(n+1))` bits (0 for items left in
//! the remainder) followed by `2K` example slots of `ceil(log2|Z|)` bits
//! holding `T_j` then `T_{j+1}`. Unused slots hold a sentinel example that no
//! compression of this class can contain.

use crate::bits::{bits_for, BitReader, BitString};
use crate::domain::{multiset_difference, ConceptClass, Dataset, Example, Hypothesis};
use crate::error::{Error, Result};
use crate::mergeable::Codec;
use crate::scheme::{require_aux, LearnOutput, Outcome, Scheme, UnlearnRequest};

#[derive(Debug, Clone)]
pub struct ChainScheme {
    codec: Codec,
}

/// Cell partition built by learn. Cells hold indices into the dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub cells: Vec<Vec<usize>>,
    pub remainder: Vec<usize>,
}

impl ChainScheme {
    pub fn new(class: &ConceptClass) -> Result<Self> {
        Ok(Self {
            codec: Codec::new(class)?,
        })
    }

    pub fn codec(&self) -> &Codec {
        &self.codec
    }

    fn slot_bits(&self) -> usize {
        bits_for(self.codec.class().example_count() as u64)
    }

    /// Code of an example that never appears in a compression.
    fn sentinel(&self) -> u64 {
        match self.codec.class() {
            // (1, 1): thresholds compressions only keep 0-labels.
            ConceptClass::Thresholds { .. } => 1,
            // Parities: (0, 0) never raises the rank. Closures: a 0-label.
            _ => 0,
        }
    }

    pub fn ticket_bits(&self, n: usize) -> usize {
        bits_for(n as u64 + 1) + 2 * self.codec.k() * self.slot_bits()
    }

    pub fn build(&self, items: &[Example]) -> Result<Chain> {
        let mut rest: Vec<usize> = (0..items.len()).collect();
        let mut cells = Vec::new();
        loop {
            let view: Vec<Example> = rest.iter().map(|&i| items[i].clone()).collect();
            let t = self.codec.compress(&view)?;
            if t.is_empty() {
                break;
            }
            cells.push(t.iter().map(|&p| rest[p]).collect());
            rest = rest
                .iter()
                .enumerate()
                .filter(|(p, _)| !t.contains(p))
                .map(|(_, &i)| i)
                .collect();
        }
        Ok(Chain {
            cells,
            remainder: rest,
        })
    }

    fn write_cell(&self, items: &[Example], cell: Option<&Vec<usize>>, out: &mut BitString) {
        let b = self.slot_bits();
        let cell = cell.map(Vec::as_slice).unwrap_or(&[]);
        for slot in 0..self.codec.k() {
            let code = match cell.get(slot) {
                Some(&i) => self
                    .codec
                    .class()
                    .example_code(&items[i])
                    .expect("validated example"),
                None => self.sentinel(),
            };
            out.push(code, b);
        }
    }

    fn read_cell(&self, r: &mut BitReader<'_>) -> Result<Vec<Example>> {
        let b = self.slot_bits();
        let mut cell = Vec::new();
        for _ in 0..self.codec.k() {
            let code = r.read(b)?;
            if code != self.sentinel() {
                cell.push(self.codec.class().example_from_code(code)?);
            }
        }
        Ok(cell)
    }

    fn learn_items(&self, items: &[Example]) -> Result<LearnOutput> {
        let h = self.codec.decode(&self.codec.encode(items)?);
        let aux = self.codec.class().hypothesis_to_bits(&h)?;
        let chain = self.build(items)?;
        let idx_bits = bits_for(items.len() as u64 + 1);
        let mut cell_of = vec![0usize; items.len()];
        for (j, cell) in chain.cells.iter().enumerate() {
            for &i in cell {
                cell_of[i] = j + 1;
            }
        }
        let tickets = cell_of
            .iter()
            .map(|&j| {
                let mut t = BitString::new();
                t.push(j as u64, idx_bits);
                let (a, b) = if j == 0 {
                    (None, None)
                } else {
                    (chain.cells.get(j - 1), chain.cells.get(j))
                };
                self.write_cell(items, a, &mut t);
                self.write_cell(items, b, &mut t);
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
        let payload = 2 * self.codec.k() * self.slot_bits();
        // Cell contents T_j (1-based) and the deleted examples per cell.
        let mut cells: Vec<Option<Vec<Example>>> = Vec::new();
        let mut deleted: Vec<Vec<Example>> = Vec::new();
        let set = |cells: &mut Vec<Option<Vec<Example>>>, j: usize, c: Vec<Example>| {
            if cells.len() <= j {
                cells.resize(j + 1, None);
            }
            match &cells[j] {
                Some(prev) if *prev != c => Err(Error::InconsistentTickets(format!(
                    "two contents for cell {j}"
                ))),
                _ => {
                    cells[j] = Some(c);
                    Ok(())
                }
            }
        };
        for del in &req.items {
            let len = del.ticket.len();
            if len < payload {
                return Err(Error::MalformedTicket(format!("chain ticket of {len} bits")));
            }
            let mut r = del.ticket.reader();
            let j = r.read(len - payload)? as usize;
            let first = self.read_cell(&mut r)?;
            let second = self.read_cell(&mut r)?;
            r.finish()?;
            if j == 0 {
                continue;
            }
            if !first.contains(&del.example) {
                return Err(Error::InconsistentTickets(format!(
                    "item {} is not in its cell {j}",
                    del.index
                )));
            }
            set(&mut cells, j, first)?;
            set(&mut cells, j + 1, second)?;
            if deleted.len() <= j {
                deleted.resize(j + 1, Vec::new());
            }
            deleted[j].push(del.example.clone());
        }
        // Smallest cell without deletions.
        let ell = (1..).find(|&j| deleted.get(j).is_none_or(Vec::is_empty)).unwrap();
        if ell == 1 {
            return class.hypothesis_from_bits(aux);
        }
        let mut survivors = Vec::new();
        for j in 1..=ell {
            let cell = cells
                .get(j)
                .and_then(Option::as_ref)
                .ok_or(Error::ChainGap(j))?;
            let gone = deleted.get(j).map(Vec::as_slice).unwrap_or(&[]);
            let left = multiset_difference(cell, gone);
            if left.len() + gone.len() != cell.len() {
                return Err(Error::InconsistentTickets(format!(
                    "cell {j} lacks a deleted item"
                )));
            }
            survivors.extend(left);
        }
        Ok(self.codec.decode(&self.codec.encode(&survivors)?))
    }
}

impl Scheme for ChainScheme {
    fn id(&self) -> String {
        format!("chain:{}", self.codec.class().name())
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
