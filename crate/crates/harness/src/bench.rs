//! Aux and ticket sizes on seeded random data, checked against the
//! closed-form bound of each scheme.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use tilu_core::agnostic::AgnosticThresholds;
use tilu_core::central::SearchGrid;
use tilu_core::chain::ChainScheme;
use tilu_core::scheme::{build_scheme, LearnOutput};
use tilu_core::sperner::SpernerSymbol;
use tilu_core::tree::TreeScheme;
use tilu_core::{bits_for, ConceptClass, Dataset};

use crate::enumerate::{dedup, random_labeled, random_realizable};
use crate::oracle::realizable_only;

/// One CSV row. `aux_bits` is C_s, `ticket_bits` the largest C_t.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRow {
    pub scheme: String,
    pub class: String,
    pub n: usize,
    pub aux_bits: usize,
    pub ticket_bits: usize,
    pub wall_ns: u64,
}

pub const DEFAULT_SCHEMES: &[&str] = &[
    "tree:thresholds",
    "chain:thresholds",
    "central:thresholds",
    "sharp:thresholds",
    "agnostic:thresholds",
];

/// `8, 16, …` up to `max_n`.
pub fn sweep(max_n: usize) -> Vec<usize> {
    std::iter::successors(Some(8usize), |n| n.checked_mul(2))
        .take_while(|&n| n <= max_n)
        .collect()
}

/// Random data of exactly `n` items (fewer after de-duplication for the
/// repetition-free scheme).
pub fn dataset(id: &str, class: &ConceptClass, n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = if realizable_only(id) {
        random_realizable(class, n, &mut rng)
    } else {
        random_labeled(class, n, &mut rng)
    };
    if id == "central:noreppoint" {
        dedup(&d)
    } else {
        d
    }
}

fn scalar(class: &ConceptClass) -> u64 {
    u64::from(class.scalar_domain().unwrap_or(0))
}

/// Violations of the closed-form size bounds of scheme `id`.
pub fn check_bounds(id: &str, class: &ConceptClass, out: &LearnOutput) -> tilu_core::Result<Vec<String>> {
    let n = out.tickets.len();
    let cs = out.aux_bits();
    let lens: Vec<usize> = out.tickets.iter().map(|t| t.len()).collect();
    let ct = out.max_ticket_bits();
    let sym = SpernerSymbol::BITS;
    let mut v = Vec::new();
    let mut need = |ok: bool, what: String| {
        if !ok {
            v.push(format!("{id} n={n}: {what}"));
        }
    };
    let family = id.split(':').next().unwrap_or("");
    match (family, id) {
        ("tree", _) => {
            let t = TreeScheme::new(class)?;
            let want = if n == 0 { 0 } else { t.ticket_bits(n) };
            need(lens.iter().all(|&l| l == want), format!("tickets {lens:?} != D + C*D = {want}"));
            need(cs == class.hypothesis_bits(), format!("aux {cs} != hypothesis bits"));
        }
        ("chain", _) => {
            let c = ChainScheme::new(class)?;
            let bound = 2 * c.codec().k() * bits_for(class.example_count() as u64) + bits_for(n as u64 + 1);
            need(ct <= bound, format!("ticket {ct} > 2K log|Z| + log(n+1) = {bound}"));
        }
        (_, "central:thresholds") => {
            let d = SearchGrid::new(scalar(class) as u32).point_bits();
            let bound = d * (1 + bits_for(n as u64 + 1));
            need(cs <= bound, format!("aux {cs} > log|X|(1 + log(n+1)) = {bound}"));
            need(ct == 0, format!("ticket {ct} != 0"));
        }
        (_, "central:augpoint" | "central:noreppoint") => need(ct == 0, format!("ticket {ct} != 0")),
        (_, "sharp:thresholds") => {
            let d = SearchGrid::new(scalar(class) as u32).point_bits();
            need(cs <= 2 * d, format!("aux {cs} > 2 log|X| = {}", 2 * d));
            need(ct <= sym, format!("ticket {ct} > {sym}"));
        }
        (_, "sharp:point") => {
            need(ct <= sym, format!("ticket {ct} > {sym}"));
            need(cs == 2 * bits_for(scalar(class)) + 1, format!("aux {cs}"));
        }
        (_, "sharp:minval" | "sharp:maxval" | "realizability:thresholds") => {
            let want = sym + bits_for(scalar(class) + 1);
            need(lens.iter().all(|&l| l == want), format!("tickets {lens:?} != {want}"));
        }
        (_, "sharp:prodthresh") => {
            if let ConceptClass::ProductThresholds { d, m } = class {
                let bound = d * (sym + bits_for(u64::from(*m) + 1));
                need(ct <= bound, format!("ticket {ct} > d(16 + log(m+1)) = {bound}"));
            }
        }
        (_, "agnostic:thresholds") => {
            let want = AgnosticThresholds::new(class)?.ticket_bits(n);
            need(lens.iter().all(|&l| l == want), format!("tickets {lens:?} != {want}"));
        }
        (_, "ctz") => {
            need(lens.iter().all(|&l| l == sym), format!("tickets {lens:?} != {sym}"));
            need(cs == 1, format!("aux {cs} != 1"));
        }
        _ => {}
    }
    Ok(v)
}

/// Rows in scheme-major order and all bound violations.
pub fn run(
    schemes: &[String],
    class: &ConceptClass,
    ns: &[usize],
    seed: u64,
) -> tilu_core::Result<(Vec<BenchRow>, Vec<String>)> {
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for id in schemes {
        let scheme = build_scheme(id, class)?;
        for &n in ns {
            let data = dataset(id, class, n, seed ^ n as u64);
            let start = Instant::now();
            let out = scheme.learn(&data)?;
            let wall_ns = start.elapsed().as_nanos() as u64;
            violations.extend(check_bounds(id, class, &out)?);
            rows.push(BenchRow {
                scheme: id.clone(),
                class: class.header(),
                n: data.len(),
                aux_bits: out.aux_bits(),
                ticket_bits: out.max_ticket_bits(),
                wall_ns,
            });
        }
    }
    Ok((rows, violations))
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}
