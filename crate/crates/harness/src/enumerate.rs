//! Dataset enumeration and seeded random generation.

use rand::seq::SliceRandom;
use rand::Rng;
use tilu_core::{ConceptClass, Dataset, Example, Hypothesis, Point};

/// Every labeled example of a class, in code order.
pub fn alphabet(class: &ConceptClass) -> tilu_core::Result<Vec<Example>> {
    (0..class.example_count() as u64)
        .map(|c| class.example_from_code(c))
        .collect()
}

/// Number of multisets of size `k` over `z` symbols: `C(z + k − 1, k)`.
pub fn multiset_count(z: u64, k: u64) -> u128 {
    if k == 0 {
        return 1;
    }
    if z == 0 {
        return 0;
    }
    let (top, k) = (u128::from(z + k - 1), u128::from(k));
    (0..k).fold(1u128, |acc, i| acc * (top - i) / (i + 1))
}

/// Multisets of sizes `0..=max_n`.
pub fn total_multisets(z: u64, max_n: u64) -> u128 {
    (0..=max_n).map(|k| multiset_count(z, k)).sum()
}

/// Non-decreasing index vectors of length `k` over `0..z`, in lexicographic order.
pub struct Multisets {
    z: usize,
    next: Option<Vec<usize>>,
}

impl Multisets {
    pub fn new(z: usize, k: usize) -> Self {
        let next = (k == 0 || z > 0).then(|| vec![0; k]);
        Self { z, next }
    }
}

impl Iterator for Multisets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let mut i = succ.len();
        while i > 0 && succ[i - 1] == self.z - 1 {
            i -= 1;
        }
        if i > 0 {
            let v = succ[i - 1] + 1;
            for s in &mut succ[i - 1..] {
                *s = v;
            }
            self.next = Some(succ);
        }
        Some(cur)
    }
}

/// All datasets of size `0..=max_n` over `alphabet`, each as a sorted multiset.
pub fn datasets<'a>(
    class: &'a ConceptClass,
    alphabet: &'a [Example],
    max_n: usize,
) -> impl Iterator<Item = Dataset> + 'a {
    (0..=max_n).flat_map(move |k| {
        Multisets::new(alphabet.len(), k).map(move |idx| Dataset {
            class: class.clone(),
            items: idx.iter().map(|&i| alphabet[i].clone()).collect(),
        })
    })
}

pub fn random_point<R: Rng>(class: &ConceptClass, rng: &mut R) -> Point {
    match class {
        ConceptClass::Thresholds { domain }
        | ConceptClass::PointFunctions { domain }
        | ConceptClass::PointsWithZero { domain } => Point::Scalar(rng.gen_range(1..=*domain)),
        ConceptClass::ExplicitIntersectionClosed(t) => Point::Scalar(rng.gen_range(1..=t.domain())),
        ConceptClass::ProductThresholds { d, m } => Point::Vector((0..*d).map(|_| rng.gen_range(1..=*m)).collect()),
        ConceptClass::Parities { d } => Point::Bits(rng.gen_range(0..1u64 << d)),
    }
}

pub fn random_hypothesis<R: Rng>(class: &ConceptClass, rng: &mut R) -> Hypothesis {
    match class {
        ConceptClass::Thresholds { domain } => Hypothesis::Threshold(rng.gen_range(0..=*domain)),
        ConceptClass::ProductThresholds { d, m } => {
            Hypothesis::ProductThreshold((0..*d).map(|_| rng.gen_range(0..=*m)).collect())
        }
        ConceptClass::Parities { d } => Hypothesis::Parity(rng.gen_range(0..1u64 << d)),
        ConceptClass::PointFunctions { domain } => Hypothesis::Point(rng.gen_range(1..=*domain)),
        ConceptClass::PointsWithZero { domain } => {
            let a = rng.gen_range(0..=*domain);
            Hypothesis::PointOrZero((a > 0).then_some(a))
        }
        ConceptClass::ExplicitIntersectionClosed(t) => Hypothesis::Explicit(rng.gen_range(0..t.rows().len())),
    }
}

/// `n` points labeled by a random hypothesis of the class.
pub fn random_realizable<R: Rng>(class: &ConceptClass, n: usize, rng: &mut R) -> Dataset {
    let h = random_hypothesis(class, rng);
    let items = (0..n)
        .map(|_| {
            let x = random_point(class, rng);
            let y = class.predict(&h, &x).expect("sampled point lies in the class domain");
            Example::new(x, y)
        })
        .collect();
    Dataset {
        class: class.clone(),
        items,
    }
}

/// `n` points with uniformly random labels.
pub fn random_labeled<R: Rng>(class: &ConceptClass, n: usize, rng: &mut R) -> Dataset {
    let items = (0..n).map(|_| Example::new(random_point(class, rng), rng.gen())).collect();
    Dataset {
        class: class.clone(),
        items,
    }
}

/// Drops repeated examples, keeping first occurrences.
pub fn dedup(data: &Dataset) -> Dataset {
    let mut seen = std::collections::BTreeSet::new();
    Dataset {
        class: data.class.clone(),
        items: data.items.iter().filter(|z| seen.insert((*z).clone())).cloned().collect(),
    }
}

/// A uniformly random permutation of `0..n`.
pub fn permutation<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
