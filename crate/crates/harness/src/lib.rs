//! Runner, oracle checks and size benchmarks for the tilu-core schemes.

pub mod artifacts;
pub mod bench;
pub mod enumerate;
pub mod oracle;
pub mod suites;

use tilu_core::{ConceptClass, ExplicitTable};

/// Intervals of `1..=domain` plus the empty set: an intersection-closed table.
pub fn interval_table(domain: u32) -> ExplicitTable {
    let n = domain as usize;
    let mut rows = vec![vec![false; n]];
    for lo in 0..n {
        for hi in lo..n {
            rows.push((0..n).map(|x| lo <= x && x <= hi).collect());
        }
    }
    ExplicitTable::new(rows).expect("interval rows are distinct")
}

/// The class a scheme id runs on by default, sized by `domain`
/// (`m` for product thresholds with `d = 2`, `d` for parities).
pub fn default_class(scheme: &str, domain: u32) -> ConceptClass {
    let inner = scheme.strip_prefix("ctz-via:").unwrap_or(scheme);
    let name = inner.split_once(':').map_or(inner, |(_, c)| c);
    match name {
        "prodthresh" => ConceptClass::ProductThresholds { d: 2, m: domain },
        "parities" => ConceptClass::Parities { d: domain as usize },
        "point" | "noreppoint" | "points" => ConceptClass::PointFunctions { domain },
        "augpoint" | "augpoints" => ConceptClass::PointsWithZero { domain },
        "explicit" => ConceptClass::ExplicitIntersectionClosed(interval_table(domain)),
        _ => ConceptClass::Thresholds { domain },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_table_is_closed() {
        let t = interval_table(4);
        assert_eq!(t.rows().len(), 11);
        assert!(t.is_intersection_closed());
    }

    #[test]
    fn default_classes() {
        assert_eq!(default_class("tree:parities", 3), ConceptClass::Parities { d: 3 });
        assert_eq!(default_class("central:augpoint", 5), ConceptClass::PointsWithZero { domain: 5 });
        assert_eq!(default_class("ctz-via:sharp:point", 5), ConceptClass::PointFunctions { domain: 5 });
        assert_eq!(default_class("ctz", 5), ConceptClass::Thresholds { domain: 5 });
    }
}
