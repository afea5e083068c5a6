//! Examples, datasets, concept classes and hypotheses, together with the
//! loss, the exhaustive ERM oracle and the canonical tie-breaking rule every
//! scheme reproduces.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::bits::{bits_for, BitReader, BitString};
use crate::error::{Error, Result};
use crate::gf2::{dot, AffineSubspace};

/// A domain point. 1D classes use `Scalar` in `1..=domain`, product
/// thresholds use `Vector` with coordinates in `1..=m`, and parities use
/// `Bits` (coordinate `j` of `d` at bit `d-1-j`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Scalar(u32),
    Vector(Vec<u32>),
    Bits(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Example {
    pub x: Point,
    pub y: bool,
}

impl Example {
    pub fn new(x: Point, y: bool) -> Self {
        Self { x, y }
    }

    pub fn scalar(x: u32, y: u8) -> Self {
        Self::new(Point::Scalar(x), y == 1)
    }

    pub fn scalar_x(&self) -> Option<u32> {
        match self.x {
            Point::Scalar(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        match &self.x {
            Point::Scalar(v) => write!(f, "{v}")?,
            Point::Vector(v) => {
                let parts: Vec<String> = v.iter().map(u32::to_string).collect();
                write!(f, "({})", parts.join(","))?
            }
            Point::Bits(b) => write!(f, "bits:{b:b}")?,
        }
        write!(f, ",{})", u8::from(self.y))
    }
}

/// Truth table of a finite class: `rows[h][x-1]` is `h(x)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExplicitTable {
    domain: u32,
    rows: Vec<Vec<bool>>,
}

impl ExplicitTable {
    pub fn new(rows: Vec<Vec<bool>>) -> Result<Self> {
        let domain = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || domain == 0 || rows.iter().any(|r| r.len() != domain) {
            return Err(Error::Parse {
                line: 1,
                msg: "explicit table must be a non-empty rectangle".into(),
            });
        }
        Ok(Self {
            domain: domain as u32,
            rows,
        })
    }

    pub fn domain(&self) -> u32 {
        self.domain
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    /// Index of the first row equal to `row`.
    pub fn find(&self, row: &[bool]) -> Option<usize> {
        self.rows.iter().position(|r| r == row)
    }

    /// Pointwise AND of any two rows is again a row.
    pub fn is_intersection_closed(&self) -> bool {
        self.rows.iter().all(|a| {
            self.rows.iter().all(|b| {
                let and: Vec<bool> = a.iter().zip(b).map(|(p, q)| *p && *q).collect();
                self.find(&and).is_some()
            })
        })
    }

    /// Largest shattered subset size, by brute force over subsets of the domain.
    pub fn vc_dimension(&self) -> usize {
        let n = self.domain as usize;
        assert!(n <= 20, "brute-force VC dimension limited to 20 points");
        let mut best = 0;
        for mask in 0u32..(1 << n) {
            let size = mask.count_ones() as usize;
            if size <= best {
                continue;
            }
            let pts: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let mut seen = std::collections::HashSet::new();
            for r in &self.rows {
                let pattern: u32 = pts
                    .iter()
                    .enumerate()
                    .map(|(k, &p)| u32::from(r[p]) << k)
                    .sum();
                seen.insert(pattern);
            }
            if seen.len() == 1 << size {
                best = size;
            }
        }
        best
    }
}

/// Class descriptor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConceptClass {
    /// `h_{>a}(x) = 1{x > a}` over `x in 1..=domain`, `a in 0..=domain`.
    Thresholds { domain: u32 },
    /// `h_{>a}(x) = 1{x_j > a_j for all j}` over `{1..=m}^d`, `a in {0..=m}^d`.
    ProductThresholds { d: usize, m: u32 },
    /// `h_w(x) = <w, x>` over GF(2)^d.
    Parities { d: usize },
    /// `h_a(x) = 1{x = a}` over `1..=domain`.
    PointFunctions { domain: u32 },
    /// Point functions plus the all-zero hypothesis.
    PointsWithZero { domain: u32 },
    ExplicitIntersectionClosed(ExplicitTable),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Hypothesis {
    Threshold(u32),
    ProductThreshold(Vec<u32>),
    Parity(u64),
    Point(u32),
    /// `None` is the zero hypothesis.
    PointOrZero(Option<u32>),
    Explicit(usize),
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypothesis::Threshold(a) => write!(f, "h>{a}"),
            Hypothesis::ProductThreshold(a) => {
                let parts: Vec<String> = a.iter().map(u32::to_string).collect();
                write!(f, "h>({})", parts.join(","))
            }
            Hypothesis::Parity(w) => write!(f, "parity:{w:b}"),
            Hypothesis::Point(a) => write!(f, "point:{a}"),
            Hypothesis::PointOrZero(Some(a)) => write!(f, "point:{a}"),
            Hypothesis::PointOrZero(None) => write!(f, "zero"),
            Hypothesis::Explicit(i) => write!(f, "row:{i}"),
        }
    }
}

impl ConceptClass {
    pub fn name(&self) -> &'static str {
        match self {
            ConceptClass::Thresholds { .. } => "thresholds",
            ConceptClass::ProductThresholds { .. } => "prodthresh",
            ConceptClass::Parities { .. } => "parities",
            ConceptClass::PointFunctions { .. } => "points",
            ConceptClass::PointsWithZero { .. } => "augpoints",
            ConceptClass::ExplicitIntersectionClosed(_) => "explicit",
        }
    }

    /// Header line of the dataset file format.
    pub fn header(&self) -> String {
        match self {
            ConceptClass::Thresholds { domain } => format!("class=thresholds domain={domain}"),
            ConceptClass::ProductThresholds { d, m } => format!("class=prodthresh d={d} m={m}"),
            ConceptClass::Parities { d } => format!("class=parities d={d}"),
            ConceptClass::PointFunctions { domain } => format!("class=points domain={domain}"),
            ConceptClass::PointsWithZero { domain } => format!("class=augpoints domain={domain}"),
            ConceptClass::ExplicitIntersectionClosed(t) => {
                let rows: Vec<String> = t
                    .rows
                    .iter()
                    .map(|r| r.iter().map(|&b| if b { '1' } else { '0' }).collect())
                    .collect();
                format!("class=explicit table={}", rows.join("/"))
            }
        }
    }

    /// Size of the 1D domain, if the class is one-dimensional.
    pub fn scalar_domain(&self) -> Option<u32> {
        match self {
            ConceptClass::Thresholds { domain }
            | ConceptClass::PointFunctions { domain }
            | ConceptClass::PointsWithZero { domain } => Some(*domain),
            ConceptClass::ExplicitIntersectionClosed(t) => Some(t.domain),
            _ => None,
        }
    }

    pub fn contains_point(&self, x: &Point) -> bool {
        match (self, x) {
            (ConceptClass::ProductThresholds { d, m }, Point::Vector(v)) => {
                v.len() == *d && v.iter().all(|&c| (1..=*m).contains(&c))
            }
            (ConceptClass::Parities { d }, Point::Bits(b)) => *d == 64 || b >> d == 0,
            (_, Point::Scalar(v)) => self.scalar_domain().is_some_and(|n| (1..=n).contains(v)),
            _ => false,
        }
    }

    pub fn check_example(&self, z: &Example) -> Result<()> {
        if self.contains_point(&z.x) {
            Ok(())
        } else {
            Err(Error::OutOfDomain(z.to_string()))
        }
    }

    pub fn contains_hypothesis(&self, h: &Hypothesis) -> bool {
        match (self, h) {
            (ConceptClass::Thresholds { domain }, Hypothesis::Threshold(a)) => a <= domain,
            (ConceptClass::ProductThresholds { d, m }, Hypothesis::ProductThreshold(a)) => {
                a.len() == *d && a.iter().all(|c| c <= m)
            }
            (ConceptClass::Parities { d }, Hypothesis::Parity(w)) => w >> d == 0,
            (ConceptClass::PointFunctions { domain }, Hypothesis::Point(a)) => {
                (1..=*domain).contains(a)
            }
            (ConceptClass::PointsWithZero { domain }, Hypothesis::PointOrZero(a)) => {
                a.is_none_or(|a| (1..=*domain).contains(&a))
            }
            (ConceptClass::ExplicitIntersectionClosed(t), Hypothesis::Explicit(i)) => {
                *i < t.rows.len()
            }
            _ => false,
        }
    }

    fn mismatch(&self, what: impl fmt::Display) -> Error {
        Error::ClassMismatch {
            expected: self.name().to_string(),
            found: what.to_string(),
        }
    }

    /// `h(x)`.
    pub fn predict(&self, h: &Hypothesis, x: &Point) -> Result<bool> {
        Ok(match (h, x) {
            (Hypothesis::Threshold(a), Point::Scalar(v)) => v > a,
            (Hypothesis::ProductThreshold(a), Point::Vector(v)) if a.len() == v.len() => {
                v.iter().zip(a).all(|(x, a)| x > a)
            }
            (Hypothesis::Parity(w), Point::Bits(b)) => dot(*w, *b),
            (Hypothesis::Point(a), Point::Scalar(v)) => a == v,
            (Hypothesis::PointOrZero(a), Point::Scalar(v)) => *a == Some(*v),
            (Hypothesis::Explicit(i), Point::Scalar(v)) => match self {
                ConceptClass::ExplicitIntersectionClosed(t) => t.rows[*i][*v as usize - 1],
                _ => return Err(self.mismatch(h)),
            },
            _ => return Err(self.mismatch(h)),
        })
    }

    pub fn hypothesis_count(&self) -> u128 {
        match self {
            ConceptClass::Thresholds { domain } => u128::from(*domain) + 1,
            ConceptClass::ProductThresholds { d, m } => (u128::from(*m) + 1).pow(*d as u32),
            ConceptClass::Parities { d } => 1u128 << d,
            ConceptClass::PointFunctions { domain } => u128::from(*domain),
            ConceptClass::PointsWithZero { domain } => u128::from(*domain) + 1,
            ConceptClass::ExplicitIntersectionClosed(t) => t.rows.len() as u128,
        }
    }

    /// Every hypothesis, or `TooLarge` beyond `cap`.
    pub fn hypotheses(&self, cap: u128) -> Result<Vec<Hypothesis>> {
        let needed = self.hypothesis_count();
        if needed > cap {
            return Err(Error::TooLarge { needed, cap });
        }
        Ok(match self {
            ConceptClass::Thresholds { domain } => (0..=*domain).map(Hypothesis::Threshold).collect(),
            ConceptClass::ProductThresholds { d, m } => product_grid(*d, 0, *m)
                .into_iter()
                .map(Hypothesis::ProductThreshold)
                .collect(),
            ConceptClass::Parities { d } => (0..1u64 << d).map(Hypothesis::Parity).collect(),
            ConceptClass::PointFunctions { domain } => (1..=*domain).map(Hypothesis::Point).collect(),
            ConceptClass::PointsWithZero { domain } => std::iter::once(None)
                .chain((1..=*domain).map(Some))
                .map(Hypothesis::PointOrZero)
                .collect(),
            ConceptClass::ExplicitIntersectionClosed(t) => {
                (0..t.rows.len()).map(Hypothesis::Explicit).collect()
            }
        })
    }

    pub fn point_count(&self) -> u128 {
        match self {
            ConceptClass::ProductThresholds { d, m } => u128::from(*m).pow(*d as u32),
            ConceptClass::Parities { d } => 1u128 << d,
            _ => u128::from(self.scalar_domain().unwrap()),
        }
    }

    /// Every domain point in ascending order.
    pub fn points(&self, cap: u128) -> Result<Vec<Point>> {
        let needed = self.point_count();
        if needed > cap {
            return Err(Error::TooLarge { needed, cap });
        }
        Ok(match self {
            ConceptClass::ProductThresholds { d, m } => {
                product_grid(*d, 1, *m).into_iter().map(Point::Vector).collect()
            }
            ConceptClass::Parities { d } => (0..1u64 << d).map(Point::Bits).collect(),
            _ => (1..=self.scalar_domain().unwrap()).map(Point::Scalar).collect(),
        })
    }

    /// `|Z| = 2 |X|`.
    pub fn example_count(&self) -> u128 {
        2 * self.point_count()
    }

    /// Dense code of an example in `0..example_count()`: point rank times two plus label.
    pub fn example_code(&self, z: &Example) -> Result<u64> {
        self.check_example(z)?;
        let rank = match (&z.x, self) {
            (Point::Scalar(v), _) => u64::from(*v - 1),
            (Point::Bits(b), _) => *b,
            (Point::Vector(v), ConceptClass::ProductThresholds { m, .. }) => v
                .iter()
                .fold(0u64, |acc, &c| acc * u64::from(*m) + u64::from(c - 1)),
            _ => return Err(self.mismatch(z)),
        };
        Ok(rank * 2 + u64::from(z.y))
    }

    pub fn example_from_code(&self, code: u64) -> Result<Example> {
        if u128::from(code) >= self.example_count() {
            return Err(Error::MalformedTicket(format!("example code {code} out of range")));
        }
        let y = code & 1 == 1;
        let rank = code >> 1;
        let x = match self {
            ConceptClass::ProductThresholds { d, m } => {
                let mut coords = vec![0u32; *d];
                let mut r = rank;
                for c in coords.iter_mut().rev() {
                    *c = (r % u64::from(*m)) as u32 + 1;
                    r /= u64::from(*m);
                }
                Point::Vector(coords)
            }
            ConceptClass::Parities { .. } => Point::Bits(rank),
            _ => Point::Scalar(rank as u32 + 1),
        };
        Ok(Example::new(x, y))
    }

    /// Bits of the fixed-width hypothesis field.
    pub fn hypothesis_bits(&self) -> usize {
        match self {
            ConceptClass::Thresholds { domain } => bits_for(u64::from(*domain) + 1),
            ConceptClass::ProductThresholds { d, m } => d * bits_for(u64::from(*m) + 1),
            ConceptClass::Parities { d } => *d,
            ConceptClass::PointFunctions { domain } => bits_for(u64::from(*domain)),
            ConceptClass::PointsWithZero { domain } => bits_for(u64::from(*domain) + 1),
            ConceptClass::ExplicitIntersectionClosed(t) => bits_for(t.rows.len() as u64),
        }
    }

    pub fn write_hypothesis(&self, h: &Hypothesis, out: &mut BitString) -> Result<()> {
        if !self.contains_hypothesis(h) {
            return Err(self.mismatch(h));
        }
        let w = self.hypothesis_bits();
        match h {
            Hypothesis::Threshold(a) => out.push(u64::from(*a), w),
            Hypothesis::ProductThreshold(a) => {
                let cw = w / a.len().max(1);
                for &c in a {
                    out.push(u64::from(c), cw);
                }
            }
            Hypothesis::Parity(v) => out.push(*v, w),
            Hypothesis::Point(a) => out.push(u64::from(*a - 1), w),
            Hypothesis::PointOrZero(a) => out.push(u64::from(a.unwrap_or(0)), w),
            Hypothesis::Explicit(i) => out.push(*i as u64, w),
        }
        Ok(())
    }

    pub fn read_hypothesis(&self, r: &mut BitReader<'_>) -> Result<Hypothesis> {
        let w = self.hypothesis_bits();
        let h = match self {
            ConceptClass::Thresholds { .. } => Hypothesis::Threshold(r.read(w)? as u32),
            ConceptClass::ProductThresholds { d, m } => {
                let cw = bits_for(u64::from(*m) + 1);
                let mut a = Vec::with_capacity(*d);
                for _ in 0..*d {
                    a.push(r.read(cw)? as u32);
                }
                Hypothesis::ProductThreshold(a)
            }
            ConceptClass::Parities { .. } => Hypothesis::Parity(r.read(w)?),
            ConceptClass::PointFunctions { .. } => Hypothesis::Point(r.read(w)? as u32 + 1),
            ConceptClass::PointsWithZero { .. } => {
                let v = r.read(w)? as u32;
                Hypothesis::PointOrZero((v != 0).then_some(v))
            }
            ConceptClass::ExplicitIntersectionClosed(_) => Hypothesis::Explicit(r.read(w)? as usize),
        };
        if self.contains_hypothesis(&h) {
            Ok(h)
        } else {
            Err(Error::MalformedAux(format!("hypothesis {h} outside class")))
        }
    }

    pub fn hypothesis_to_bits(&self, h: &Hypothesis) -> Result<BitString> {
        let mut s = BitString::new();
        self.write_hypothesis(h, &mut s)?;
        Ok(s)
    }

    pub fn hypothesis_from_bits(&self, s: &BitString) -> Result<Hypothesis> {
        let mut r = s.reader();
        let h = self.read_hypothesis(&mut r)?;
        r.finish().map_err(|e| Error::MalformedAux(e.to_string()))?;
        Ok(h)
    }
}

fn product_grid(d: usize, lo: u32, hi: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                (lo..=hi).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out
}

/// An ordered sequence of examples (duplicates allowed) tagged with its class.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dataset {
    pub class: ConceptClass,
    pub items: Vec<Example>,
}

impl Dataset {
    pub fn new(class: ConceptClass, items: Vec<Example>) -> Result<Self> {
        for z in &items {
            class.check_example(z)?;
        }
        Ok(Self { class, items })
    }

    pub fn empty(class: ConceptClass) -> Self {
        Self {
            class,
            items: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Items whose index is not in `deleted`.
    pub fn without_indices(&self, deleted: &[usize]) -> Dataset {
        let items = self
            .items
            .iter()
            .enumerate()
            .filter(|(i, _)| !deleted.contains(i))
            .map(|(_, z)| z.clone())
            .collect();
        Dataset {
            class: self.class.clone(),
            items,
        }
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.class.header())?;
        for z in &self.items {
            let xs = match &z.x {
                Point::Scalar(v) => v.to_string(),
                Point::Vector(v) => v.iter().map(u32::to_string).collect::<Vec<_>>().join(","),
                Point::Bits(b) => {
                    let ConceptClass::Parities { d } = self.class else {
                        unreachable!("bit points only occur in parity datasets")
                    };
                    (0..d)
                        .map(|j| ((b >> (d - 1 - j)) & 1).to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                }
            };
            writeln!(f, "{xs} ; {}", u8::from(z.y))?;
        }
        Ok(())
    }
}

fn parse_header(line: &str) -> Result<ConceptClass> {
    let err = |msg: String| Error::Parse { line: 1, msg };
    let mut kv = BTreeMap::new();
    for tok in line.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, got `{tok}`")))?;
        kv.insert(k, v);
    }
    let num = |k: &str| -> Result<u64> {
        kv.get(k)
            .ok_or_else(|| err(format!("missing `{k}`")))?
            .parse()
            .map_err(|e| err(format!("bad `{k}`: {e}")))
    };
    let class = match kv.get("class").copied() {
        Some("thresholds") => ConceptClass::Thresholds {
            domain: num("domain")? as u32,
        },
        Some("prodthresh") => ConceptClass::ProductThresholds {
            d: num("d")? as usize,
            m: num("m")? as u32,
        },
        Some("parities") => {
            let d = num("d")? as usize;
            if d == 0 || d > 62 {
                return Err(err(format!("parity dimension {d} unsupported")));
            }
            ConceptClass::Parities { d }
        }
        Some("points") => ConceptClass::PointFunctions {
            domain: num("domain")? as u32,
        },
        Some("augpoints") => ConceptClass::PointsWithZero {
            domain: num("domain")? as u32,
        },
        Some("explicit") => {
            let table = kv.get("table").ok_or_else(|| err("missing `table`".into()))?;
            let rows = table
                .split('/')
                .map(|r| {
                    r.chars()
                        .map(|c| match c {
                            '0' => Ok(false),
                            '1' => Ok(true),
                            _ => Err(err(format!("bad table character `{c}`"))),
                        })
                        .collect::<Result<Vec<bool>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            ConceptClass::ExplicitIntersectionClosed(ExplicitTable::new(rows)?)
        }
        other => return Err(err(format!("unknown class {other:?}"))),
    };
    let degenerate = match &class {
        ConceptClass::ProductThresholds { d, m } => *d == 0 || *m == 0,
        ConceptClass::Parities { .. } | ConceptClass::ExplicitIntersectionClosed(_) => false,
        c => c.scalar_domain() == Some(0),
    };
    if degenerate {
        return Err(err("empty domain".into()));
    }
    Ok(class)
}

impl FromStr for ConceptClass {
    type Err = Error;

    /// Parses a header line such as `class=thresholds domain=6`.
    fn from_str(s: &str) -> Result<Self> {
        parse_header(s.trim())
    }
}

impl FromStr for Dataset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let class = parse_header(header)?;
        let mut items = Vec::new();
        for (line, text) in lines {
            let err = |msg: String| Error::Parse { line, msg };
            let (xs, ys) = text
                .split_once(';')
                .ok_or_else(|| err("expected `x ; y`".into()))?;
            let coords = xs
                .split(',')
                .map(|c| c.trim().parse::<u64>().map_err(|e| err(format!("bad coordinate: {e}"))))
                .collect::<Result<Vec<u64>>>()?;
            let y = match ys.trim() {
                "0" => false,
                "1" => true,
                other => return Err(err(format!("label must be 0 or 1, got `{other}`"))),
            };
            let x = match &class {
                ConceptClass::ProductThresholds { .. } => {
                    Point::Vector(coords.iter().map(|&c| c as u32).collect())
                }
                ConceptClass::Parities { d } => {
                    if coords.len() != *d || coords.iter().any(|&c| c > 1) {
                        return Err(err(format!("expected {d} bits")));
                    }
                    Point::Bits(coords.iter().fold(0, |acc, &c| acc << 1 | c))
                }
                _ => {
                    if coords.len() != 1 {
                        return Err(err("expected a single coordinate".into()));
                    }
                    Point::Scalar(coords[0] as u32)
                }
            };
            let z = Example::new(x, y);
            class.check_example(&z).map_err(|e| err(e.to_string()))?;
            items.push(z);
        }
        Ok(Dataset { class, items })
    }
}

/// `L(h; S)`: number of items with `h(x) != y`.
pub fn loss(h: &Hypothesis, data: &Dataset) -> Result<usize> {
    loss_on(&data.class, h, &data.items)
}

pub fn loss_on(class: &ConceptClass, h: &Hypothesis, items: &[Example]) -> Result<usize> {
    if !class.contains_hypothesis(h) {
        return Err(class.mismatch(h));
    }
    let mut total = 0;
    for z in items {
        if class.predict(h, &z.x)? != z.y {
            total += 1;
        }
    }
    Ok(total)
}

/// Default enumeration cap for the oracles.
pub const ORACLE_CAP: u128 = 1 << 24;

/// Exact argmin set by exhaustive enumeration. Test oracle only.
pub fn erm_set(data: &Dataset, cap: u128) -> Result<Vec<Hypothesis>> {
    let hs = data.class.hypotheses(cap)?;
    let losses = hs
        .iter()
        .map(|h| loss(h, data))
        .collect::<Result<Vec<_>>>()?;
    let best = losses.iter().copied().min().unwrap_or(0);
    Ok(hs
        .into_iter()
        .zip(losses)
        .filter(|(_, l)| *l == best)
        .map(|(h, _)| h)
        .collect())
}

pub fn is_realizable(data: &Dataset, cap: u128) -> Result<bool> {
    let hs = data.class.hypotheses(cap)?;
    for h in &hs {
        if loss(h, data)? == 0 {
            return Ok(true);
        }
    }
    Ok(hs.is_empty() && data.is_empty())
}

/// Fast realizability test for 1D thresholds: every 0-label left of every 1-label.
pub fn thresholds_realizable(items: &[Example]) -> bool {
    let max0 = items.iter().filter(|z| !z.y).filter_map(Example::scalar_x).max();
    let min1 = items.iter().filter(|z| z.y).filter_map(Example::scalar_x).min();
    match (max0, min1) {
        (Some(p), Some(q)) => p < q,
        _ => true,
    }
}

/// Smallest threshold among those with minimal loss. Defined for every dataset.
pub fn minimal_threshold(domain: u32, items: &[Example]) -> u32 {
    let n = domain as usize;
    // Loss of h_{>a}: 0-labels with x > a plus 1-labels with x <= a.
    let mut zeros = vec![0usize; n + 2];
    let mut ones = vec![0usize; n + 2];
    for z in items {
        let x = z.scalar_x().expect("scalar example") as usize;
        if z.y {
            ones[x] += 1;
        } else {
            zeros[x] += 1;
        }
    }
    let mut loss: usize = zeros.iter().sum();
    let (mut best, mut best_a) = (loss, 0);
    for a in 1..=n {
        loss = loss + ones[a] - zeros[a];
        if loss < best {
            best = loss;
            best_a = a;
        }
    }
    best_a as u32
}

/// Closure of the 1-labeled points in an intersection-closed class: the
/// pointwise-smallest hypothesis labelling all of them 1. Not checked
/// against the 0-labels.
pub fn closure(class: &ConceptClass, items: &[Example]) -> Result<Hypothesis> {
    match class {
        ConceptClass::ProductThresholds { d, m } => {
            let mut a = vec![*m; *d];
            for z in items.iter().filter(|z| z.y) {
                let Point::Vector(v) = &z.x else {
                    return Err(class.mismatch(z));
                };
                for (aj, &xj) in a.iter_mut().zip(v) {
                    *aj = (*aj).min(xj - 1);
                }
            }
            Ok(Hypothesis::ProductThreshold(a))
        }
        ConceptClass::ExplicitIntersectionClosed(t) => {
            let mut row = vec![true; t.domain as usize];
            for r in &t.rows {
                let covers = items
                    .iter()
                    .filter(|z| z.y)
                    .all(|z| matches!(z.x, Point::Scalar(v) if r[v as usize - 1]));
                if covers {
                    for (b, &c) in row.iter_mut().zip(r) {
                        *b &= c;
                    }
                }
            }
            t.find(&row)
                .map(Hypothesis::Explicit)
                .ok_or(Error::Unrealizable)
        }
        _ => Err(Error::NoCodec(format!("{} is not intersection-closed", class.name()))),
    }
}

/// The fixed representative of the ERM set that every scheme must reproduce.
///
/// * thresholds: smallest `a` of minimal loss (defined for any dataset);
/// * product thresholds and explicit intersection-closed classes: the closure;
/// * parities: lexicographically smallest consistent `w`;
/// * point functions: the 1-labeled point, else the smallest `b` with no `(b, 0)`;
/// * points with zero: the 1-labeled point, else the zero hypothesis.
pub fn canonical_erm(data: &Dataset) -> Result<Hypothesis> {
    let class = &data.class;
    let items = &data.items;
    let h = match class {
        ConceptClass::Thresholds { domain } => {
            return Ok(Hypothesis::Threshold(minimal_threshold(*domain, items)));
        }
        ConceptClass::ProductThresholds { .. } => closure(class, items)?,
        ConceptClass::ExplicitIntersectionClosed(t) => {
            if t.is_intersection_closed() {
                closure(class, items)?
            } else {
                let hs = class.hypotheses(u128::MAX)?;
                let mut found = None;
                for h in hs {
                    if loss(&h, data)? == 0 {
                        found = Some(h);
                        break;
                    }
                }
                found.ok_or(Error::Unrealizable)?
            }
        }
        ConceptClass::Parities { d } => {
            let mut w = AffineSubspace::full(*d);
            for z in items {
                let Point::Bits(b) = z.x else {
                    return Err(class.mismatch(z));
                };
                if !w.constrain(b, z.y) {
                    return Err(Error::Unrealizable);
                }
            }
            Hypothesis::Parity(w.lex_min())
        }
        ConceptClass::PointFunctions { domain } | ConceptClass::PointsWithZero { domain } => {
            let positive = items.iter().find(|z| z.y).and_then(Example::scalar_x);
            let with_zero = matches!(class, ConceptClass::PointsWithZero { .. });
            match (positive, with_zero) {
                (Some(a), false) => Hypothesis::Point(a),
                (Some(a), true) => Hypothesis::PointOrZero(Some(a)),
                (None, true) => Hypothesis::PointOrZero(None),
                (None, false) => {
                    let b = smallest_unlabeled_zero(*domain, items).ok_or(Error::Unrealizable)?;
                    Hypothesis::Point(b)
                }
            }
        }
    };
    if loss(&h, data)? != 0 {
        return Err(Error::Unrealizable);
    }
    Ok(h)
}

/// Smallest `b` in `1..=domain` such that `(b, 0)` does not occur.
pub fn smallest_unlabeled_zero(domain: u32, items: &[Example]) -> Option<u32> {
    let mut seen = vec![false; domain as usize + 1];
    for z in items.iter().filter(|z| !z.y) {
        if let Some(x) = z.scalar_x() {
            seen[x as usize] = true;
        }
    }
    (1..=domain).find(|&b| !seen[b as usize])
}

/// Removes one copy of each element of `deleted` from `items`.
pub fn multiset_difference(items: &[Example], deleted: &[Example]) -> Vec<Example> {
    let mut counts: BTreeMap<&Example, usize> = BTreeMap::new();
    for z in deleted {
        *counts.entry(z).or_default() += 1;
    }
    let mut out = Vec::with_capacity(items.len());
    for z in items {
        match counts.get_mut(z) {
            Some(c) if *c > 0 => *c -= 1,
            _ => out.push(z.clone()),
        }
    }
    out
}
