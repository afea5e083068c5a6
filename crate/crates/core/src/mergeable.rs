//! Encode / Decode / Merge / Compress for the mergeable classes.
//!
//! Serialized payloads (fields LSB-first, see [`crate::bits`]):
//!
//! | class | payload | bits |
//! |---|---|---|
//! | thresholds | `x_-` | `ceil(log2(|X|+1))` |
//! | parities | EMPTY flag, then `d` rows of `d+1` bits (zero rows pad) | `1 + d(d+1)` |
//! | closures | NEUTRAL flag, then the closure hypothesis (zeros if NEUTRAL) | `1 + hypothesis bits` |
//!
//! The standalone form prefixes the payload with an 8-bit class tag.

use crate::bits::{bits_for, BitReader, BitString};
use crate::domain::{closure, thresholds_realizable, ConceptClass, Example, Hypothesis, Point};
use crate::error::{Error, Result};
use crate::gf2::AffineSubspace;

const TAG_THRESHOLDS: u64 = 1;
const TAG_PARITIES: u64 = 2;
const TAG_CLOSURE: u64 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EncodedState {
    /// Largest 0-labeled `x`, or 0.
    Threshold(u32),
    /// Affine solution set; the full space is the neutral element.
    Parity(AffineSubspace),
    /// Closure of the 1-labels; equal to the closure of the empty set when NEUTRAL.
    Closure(Hypothesis),
}

/// The codec of one concept class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codec {
    class: ConceptClass,
    k: usize,
    bottom: Option<Hypothesis>,
}

impl Codec {
    /// Fails with `NoCodec` for point functions and for explicit tables that
    /// are not intersection-closed.
    pub fn new(class: &ConceptClass) -> Result<Self> {
        let (k, bottom) = match class {
            ConceptClass::Thresholds { .. } => (1, None),
            ConceptClass::Parities { d } => (*d, None),
            ConceptClass::ProductThresholds { d, .. } => (*d, Some(closure(class, &[])?)),
            ConceptClass::ExplicitIntersectionClosed(t) => {
                if !t.is_intersection_closed() {
                    return Err(Error::NoCodec("explicit table is not intersection-closed".into()));
                }
                (t.vc_dimension(), Some(closure(class, &[])?))
            }
            ConceptClass::PointFunctions { .. } | ConceptClass::PointsWithZero { .. } => {
                return Err(Error::NoCodec(format!("{} is not mergeable", class.name())));
            }
        };
        Ok(Self {
            class: class.clone(),
            k,
            bottom,
        })
    }

    pub fn class(&self) -> &ConceptClass {
        &self.class
    }

    /// Compression size bound `K`.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Payload width `C` in bits.
    pub fn width(&self) -> usize {
        match &self.class {
            ConceptClass::Thresholds { domain } => bits_for(u64::from(*domain) + 1),
            ConceptClass::Parities { d } => 1 + d * (d + 1),
            c => 1 + c.hypothesis_bits(),
        }
    }

    pub fn neutral(&self) -> EncodedState {
        match &self.class {
            ConceptClass::Thresholds { .. } => EncodedState::Threshold(0),
            ConceptClass::Parities { d } => EncodedState::Parity(AffineSubspace::full(*d)),
            _ => EncodedState::Closure(self.bottom.clone().expect("closure codec")),
        }
    }

    pub fn encode(&self, items: &[Example]) -> Result<EncodedState> {
        for z in items {
            self.class.check_example(z)?;
        }
        match &self.class {
            ConceptClass::Thresholds { .. } => {
                if !thresholds_realizable(items) {
                    return Err(Error::Unrealizable);
                }
                let x = items
                    .iter()
                    .filter(|z| !z.y)
                    .filter_map(Example::scalar_x)
                    .max()
                    .unwrap_or(0);
                Ok(EncodedState::Threshold(x))
            }
            ConceptClass::Parities { d } => {
                let mut w = AffineSubspace::full(*d);
                for z in items {
                    let Point::Bits(b) = z.x else { unreachable!() };
                    if !w.constrain(b, z.y) {
                        return Err(Error::Unrealizable);
                    }
                }
                Ok(EncodedState::Parity(w))
            }
            class => {
                let h = closure(class, items)?;
                for z in items.iter().filter(|z| !z.y) {
                    if class.predict(&h, &z.x)? {
                        return Err(Error::Unrealizable);
                    }
                }
                Ok(EncodedState::Closure(h))
            }
        }
    }

    pub fn decode(&self, e: &EncodedState) -> Hypothesis {
        match e {
            EncodedState::Threshold(a) => Hypothesis::Threshold(*a),
            EncodedState::Parity(w) => Hypothesis::Parity(w.lex_min()),
            EncodedState::Closure(h) => h.clone(),
        }
    }

    pub fn merge(&self, a: &EncodedState, b: &EncodedState) -> Result<EncodedState> {
        match (a, b) {
            (EncodedState::Threshold(p), EncodedState::Threshold(q)) => {
                Ok(EncodedState::Threshold(*p.max(q)))
            }
            (EncodedState::Parity(v), EncodedState::Parity(w)) => v
                .intersect(w)
                .map(EncodedState::Parity)
                .ok_or(Error::EmptyIntersection),
            (EncodedState::Closure(g), EncodedState::Closure(h)) => {
                Ok(EncodedState::Closure(self.join(g, h)?))
            }
            _ => Err(Error::ClassMismatch {
                expected: self.class.name().into(),
                found: format!("{a:?} / {b:?}"),
            }),
        }
    }

    /// Smallest hypothesis containing both, i.e. the closure of the union.
    fn join(&self, g: &Hypothesis, h: &Hypothesis) -> Result<Hypothesis> {
        match (&self.class, g, h) {
            (_, Hypothesis::ProductThreshold(a), Hypothesis::ProductThreshold(b)) => Ok(
                Hypothesis::ProductThreshold(a.iter().zip(b).map(|(p, q)| *p.min(q)).collect()),
            ),
            (
                ConceptClass::ExplicitIntersectionClosed(t),
                Hypothesis::Explicit(i),
                Hypothesis::Explicit(j),
            ) => {
                let (gi, hj) = (&t.rows()[*i], &t.rows()[*j]);
                let mut row = vec![true; gi.len()];
                for r in t.rows() {
                    let covers = r.iter().zip(gi.iter().zip(hj)).all(|(c, (p, q))| *c || !(*p || *q));
                    if covers {
                        for (b, c) in row.iter_mut().zip(r) {
                            *b &= *c;
                        }
                    }
                }
                t.find(&row)
                    .map(Hypothesis::Explicit)
                    .ok_or_else(|| Error::NoCodec("table is not intersection-closed".into()))
            }
            _ => Err(Error::ClassMismatch {
                expected: self.class.name().into(),
                found: format!("{g} / {h}"),
            }),
        }
    }

    /// Indices (ascending) of a compression of `items`: a sub-multiset of at
    /// most `K` items with the same encoding that stays a compression after
    /// deleting any item outside it.
    pub fn compress(&self, items: &[Example]) -> Result<Vec<usize>> {
        let full = self.encode(items)?;
        match (&self.class, &full) {
            (ConceptClass::Thresholds { .. }, EncodedState::Threshold(x)) => Ok(if *x == 0 {
                Vec::new()
            } else {
                let z = Example::scalar(*x, 0);
                vec![items.iter().position(|w| *w == z).expect("x_- occurs")]
            }),
            (ConceptClass::Parities { d }, _) => {
                let mut w = AffineSubspace::full(*d);
                let mut keep = Vec::new();
                for (i, z) in items.iter().enumerate() {
                    let Point::Bits(b) = z.x else { unreachable!() };
                    let before = w.rank();
                    w.constrain(b, z.y);
                    if w.rank() > before {
                        keep.push(i);
                    }
                }
                Ok(keep)
            }
            _ => {
                // Backward elimination over first occurrences of distinct 1-labels.
                let mut keep: Vec<usize> = Vec::new();
                for (i, z) in items.iter().enumerate() {
                    if z.y && !keep.iter().any(|&j| items[j] == *z) {
                        keep.push(i);
                    }
                }
                let mut pos = 0;
                while pos < keep.len() {
                    let trial: Vec<Example> = keep
                        .iter()
                        .enumerate()
                        .filter(|(p, _)| *p != pos)
                        .map(|(_, &j)| items[j].clone())
                        .collect();
                    if closure(&self.class, &trial)? == self.decode(&full) {
                        keep.remove(pos);
                    } else {
                        pos += 1;
                    }
                }
                Ok(keep)
            }
        }
    }

    /// Checks the three compression properties for `t` (indices into `items`).
    pub fn is_valid_compression(&self, items: &[Example], t: &[usize]) -> Result<bool> {
        let mut sorted = t.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != t.len() || t.len() > self.k || t.iter().any(|&i| i >= items.len()) {
            return Ok(false);
        }
        let sub: Vec<Example> = t.iter().map(|&i| items[i].clone()).collect();
        let et = self.encode(&sub)?;
        if et != self.encode(items)? {
            return Ok(false);
        }
        for i in (0..items.len()).filter(|i| !t.contains(i)) {
            let rest: Vec<Example> = items
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, z)| z.clone())
                .collect();
            if self.encode(&rest)? != et {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn write(&self, e: &EncodedState, out: &mut BitString) {
        match e {
            EncodedState::Threshold(x) => out.push(u64::from(*x), self.width()),
            EncodedState::Parity(w) => {
                let d = w.dimension();
                out.push_bit(false);
                for k in 0..d {
                    out.push(w.rows().get(k).copied().unwrap_or(0), d + 1);
                }
            }
            EncodedState::Closure(h) => {
                let neutral = Some(h) == self.bottom.as_ref();
                out.push_bit(neutral);
                if neutral {
                    out.push(0, self.class.hypothesis_bits());
                } else {
                    self.class
                        .write_hypothesis(h, out)
                        .expect("closure lies in its class");
                }
            }
        }
    }

    pub fn read(&self, r: &mut BitReader<'_>) -> Result<EncodedState> {
        match &self.class {
            ConceptClass::Thresholds { domain } => {
                let x = r.read(self.width())?;
                if x > u64::from(*domain) {
                    return Err(Error::MalformedTicket(format!("x_- = {x} outside domain")));
                }
                Ok(EncodedState::Threshold(x as u32))
            }
            ConceptClass::Parities { d } => {
                if r.read_bit()? {
                    return Err(Error::EmptyIntersection);
                }
                let mut rows = Vec::new();
                for _ in 0..*d {
                    let row = r.read(d + 1)?;
                    if row != 0 {
                        rows.push(row);
                    }
                }
                AffineSubspace::from_rows(*d, rows)
                    .map(EncodedState::Parity)
                    .ok_or_else(|| Error::MalformedTicket("non-canonical affine subspace".into()))
            }
            class => {
                let neutral = r.read_bit()?;
                if neutral {
                    if r.read(class.hypothesis_bits())? != 0 {
                        return Err(Error::MalformedTicket("NEUTRAL with payload".into()));
                    }
                    Ok(self.neutral())
                } else {
                    let h = class
                        .read_hypothesis(r)
                        .map_err(|e| Error::MalformedTicket(e.to_string()))?;
                    Ok(EncodedState::Closure(h))
                }
            }
        }
    }

    /// Tag byte followed by the payload.
    pub fn serialize(&self, e: &EncodedState) -> BitString {
        let tag = match e {
            EncodedState::Threshold(_) => TAG_THRESHOLDS,
            EncodedState::Parity(_) => TAG_PARITIES,
            EncodedState::Closure(_) => TAG_CLOSURE,
        };
        let mut out = BitString::new();
        out.push(tag, 8);
        self.write(e, &mut out);
        out
    }

    pub fn deserialize(&self, s: &BitString) -> Result<EncodedState> {
        let mut r = s.reader();
        let expected = match self.class {
            ConceptClass::Thresholds { .. } => TAG_THRESHOLDS,
            ConceptClass::Parities { .. } => TAG_PARITIES,
            _ => TAG_CLOSURE,
        };
        let tag = r.read(8)?;
        if tag != expected {
            return Err(Error::ClassMismatch {
                expected: self.class.name().into(),
                found: format!("tag {tag}"),
            });
        }
        let e = self.read(&mut r)?;
        r.finish()?;
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{canonical_erm, erm_set, Dataset, ExplicitTable, ORACLE_CAP};
    use proptest::prelude::*;

    fn th(pts: &[(u32, u8)]) -> Vec<Example> {
        pts.iter().map(|&(x, y)| Example::scalar(x, y)).collect()
    }

    fn vecs(pts: &[((u32, u32), u8)]) -> Vec<Example> {
        pts.iter()
            .map(|&((a, b), y)| Example::new(Point::Vector(vec![a, b]), y == 1))
            .collect()
    }

    fn bits(pts: &[(u64, u8)]) -> Vec<Example> {
        pts.iter().map(|&(x, y)| Example::new(Point::Bits(x), y == 1)).collect()
    }

    const TH8: ConceptClass = ConceptClass::Thresholds { domain: 8 };
    const PROD: ConceptClass = ConceptClass::ProductThresholds { d: 2, m: 4 };
    const PAR2: ConceptClass = ConceptClass::Parities { d: 2 };

    #[test]
    fn encode_examples() {
        let c = Codec::new(&TH8).unwrap();
        assert_eq!(c.encode(&th(&[(3, 0), (5, 1)])).unwrap(), EncodedState::Threshold(3));
        assert_eq!(c.encode(&th(&[(5, 1)])).unwrap(), EncodedState::Threshold(0));
        assert_eq!(c.encode(&th(&[(5, 0), (3, 1)])), Err(Error::Unrealizable));
        let p = Codec::new(&PROD).unwrap();
        assert_eq!(
            p.encode(&vecs(&[((2, 3), 1), ((4, 2), 1)])).unwrap(),
            EncodedState::Closure(Hypothesis::ProductThreshold(vec![1, 1]))
        );
    }

    #[test]
    fn decode_examples() {
        let c = Codec::new(&TH8).unwrap();
        assert_eq!(c.decode(&EncodedState::Threshold(3)), Hypothesis::Threshold(3));
        assert_eq!(c.decode(&c.neutral()), Hypothesis::Threshold(0));
        let p = Codec::new(&PAR2).unwrap();
        let w = p.encode(&bits(&[(0b11, 0)])).unwrap();
        assert_eq!(p.decode(&w), Hypothesis::Parity(0));
        let q = Codec::new(&PROD).unwrap();
        assert_eq!(q.decode(&q.neutral()), Hypothesis::ProductThreshold(vec![4, 4]));
    }

    #[test]
    fn merge_examples() {
        let c = Codec::new(&TH8).unwrap();
        let m = c
            .merge(&EncodedState::Threshold(3), &EncodedState::Threshold(6))
            .unwrap();
        assert_eq!(m, EncodedState::Threshold(6));
        let p = Codec::new(&PAR2).unwrap();
        let w1 = p.encode(&bits(&[(0b10, 1)])).unwrap();
        let w2 = p.encode(&bits(&[(0b01, 0)])).unwrap();
        let w = p.merge(&w1, &w2).unwrap();
        assert_eq!(p.decode(&w), Hypothesis::Parity(0b10));
        assert_eq!(p.merge(&w, &p.neutral()).unwrap(), w);
        let w3 = p.encode(&bits(&[(0b10, 0)])).unwrap();
        assert_eq!(p.merge(&w1, &w3), Err(Error::EmptyIntersection));
    }

    #[test]
    fn compress_examples() {
        let c = Codec::new(&TH8).unwrap();
        let s = th(&[(3, 0), (5, 1), (2, 0)]);
        assert_eq!(c.compress(&s).unwrap(), vec![0]);
        assert!(c.compress(&th(&[(5, 1)])).unwrap().is_empty());
        let p = Codec::new(&PROD).unwrap();
        assert_eq!(p.compress(&vecs(&[((2, 3), 1), ((3, 2), 1)])).unwrap(), vec![0, 1]);
        let q = Codec::new(&PAR2).unwrap();
        assert_eq!(
            q.compress(&bits(&[(0b10, 1), (0b01, 0), (0b11, 1)])).unwrap(),
            vec![0, 1]
        );
    }

    #[test]
    fn point_functions_have_no_codec() {
        assert!(matches!(
            Codec::new(&ConceptClass::PointFunctions { domain: 4 }),
            Err(Error::NoCodec(_))
        ));
        let t = ExplicitTable::new(vec![vec![true, false], vec![false, true]]).unwrap();
        assert!(matches!(
            Codec::new(&ConceptClass::ExplicitIntersectionClosed(t)),
            Err(Error::NoCodec(_))
        ));
    }

    #[test]
    fn serialization_widths() {
        let c = Codec::new(&TH8).unwrap();
        assert_eq!(c.width(), 4);
        let s = c.serialize(&EncodedState::Threshold(8));
        assert_eq!(s.len(), 12);
        assert_eq!(c.deserialize(&s).unwrap(), EncodedState::Threshold(8));
        let p = Codec::new(&ConceptClass::Parities { d: 3 }).unwrap();
        assert_eq!(p.width(), 13);
        let q = Codec::new(&PROD).unwrap();
        assert_eq!(q.width(), 1 + 2 * 3);
        assert!(q.deserialize(&c.serialize(&EncodedState::Threshold(1))).is_err());
    }

    fn small_classes() -> Vec<ConceptClass> {
        let t = ExplicitTable::new(vec![
            vec![false, false, false],
            vec![true, false, false],
            vec![false, true, false],
            vec![true, true, false],
            vec![true, true, true],
        ])
        .unwrap();
        vec![
            ConceptClass::Thresholds { domain: 5 },
            ConceptClass::ProductThresholds { d: 2, m: 3 },
            ConceptClass::Parities { d: 2 },
            ConceptClass::Parities { d: 3 },
            ConceptClass::ExplicitIntersectionClosed(t),
        ]
    }

    fn arb_items(class: &ConceptClass, codes: &[u64]) -> Vec<Example> {
        let n = class.example_count() as u64;
        codes
            .iter()
            .map(|c| class.example_from_code(c % n).unwrap())
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]

        #[test]
        fn codec_laws(which in 0usize..5, a in proptest::collection::vec(any::<u64>(), 0..5), b in proptest::collection::vec(any::<u64>(), 0..4)) {
            let class = &small_classes()[which];
            let c = Codec::new(class).unwrap();
            let s1 = arb_items(class, &a);
            let s2 = arb_items(class, &b);
            let mut joined = s1.clone();
            joined.extend(s2.iter().cloned());
            let Ok(e) = c.encode(&joined) else {
                let ds = Dataset::new(class.clone(), joined).unwrap();
                prop_assert!(!crate::domain::is_realizable(&ds, ORACLE_CAP).unwrap());
                return Ok(());
            };
            // Permutation invariance.
            let mut rev = joined.clone();
            rev.reverse();
            prop_assert_eq!(&c.encode(&rev).unwrap(), &e);
            // Decode matches the canonical ERM.
            let ds = Dataset::new(class.clone(), joined.clone()).unwrap();
            let h = c.decode(&e);
            prop_assert_eq!(&h, &canonical_erm(&ds).unwrap());
            prop_assert!(erm_set(&ds, ORACLE_CAP).unwrap().contains(&h));
            // Merge of the parts.
            let m = c.merge(&c.encode(&s1).unwrap(), &c.encode(&s2).unwrap()).unwrap();
            prop_assert_eq!(&m, &e);
            prop_assert_eq!(&c.merge(&e, &c.neutral()).unwrap(), &e);
            // Compression.
            let t = c.compress(&joined).unwrap();
            prop_assert!(c.is_valid_compression(&joined, &t).unwrap());
            // Serialization.
            let mut out = BitString::new();
            c.write(&e, &mut out);
            prop_assert_eq!(out.len(), c.width());
            let mut r = out.reader();
            prop_assert_eq!(&c.read(&mut r).unwrap(), &e);
            prop_assert_eq!(&c.deserialize(&c.serialize(&e)).unwrap(), &e);
        }
    }

    #[test]
    fn explicit_compression_within_vc_dimension() {
        let class = &small_classes()[4];
        let c = Codec::new(class).unwrap();
        assert_eq!(c.k(), 2);
        let s = th(&[(1, 1), (2, 1), (1, 1)]);
        let t = c.compress(&s).unwrap();
        assert_eq!(t, vec![0, 1]);
        assert!(c.is_valid_compression(&s, &t).unwrap());
        assert!(!c.is_valid_compression(&s, &[0]).unwrap());
    }
}
