//! Affine subspaces of GF(2)^d kept as fully reduced constraint systems.
//!
//! A vector `w` is a `u64` whose bit `d-1-j` holds coordinate `j` (0-based),
//! so numeric order on `u64` is lexicographic order on coordinate tuples.
//! A constraint `<c, w> = r` is a row with `c` in bits `0..d` and `r` in bit `d`.

/// Solution set `{w : <c_k, w> = r_k for all k}` of a consistent system.
///
/// Rows are in reduced row-echelon form with the pivot of each row being its
/// most significant coefficient bit, sorted by descending pivot, and every
/// pivot column cleared from all other rows. That form is unique for a given
/// solution set, so two equal subspaces have identical `rows`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineSubspace {
    d: usize,
    rows: Vec<u64>,
}

fn pivot(row: u64, d: usize) -> Option<usize> {
    let coeffs = row & coeff_mask(d);
    if coeffs == 0 {
        None
    } else {
        Some(63 - coeffs.leading_zeros() as usize)
    }
}

fn coeff_mask(d: usize) -> u64 {
    if d == 64 {
        u64::MAX
    } else {
        (1u64 << d) - 1
    }
}

pub fn dot(a: u64, b: u64) -> bool {
    (a & b).count_ones() % 2 == 1
}

impl AffineSubspace {
    /// The whole space (no constraints).
    pub fn full(d: usize) -> Self {
        assert!(d < 64, "dimension {d} too large");
        Self { d, rows: Vec::new() }
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// Number of independent constraints.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Rebuilds from serialized rows; `None` if they are not in canonical form.
    pub fn from_rows(d: usize, rows: Vec<u64>) -> Option<Self> {
        let mut s = Self::full(d);
        for &r in &rows {
            if r >> (d + 1) != 0 || !s.constrain(r & coeff_mask(d), (r >> d) & 1 == 1) {
                return None;
            }
        }
        (s.rows == rows).then_some(s)
    }

    /// Adds `<coeffs, w> = rhs`. Returns `false` and leaves `self` unchanged
    /// when the system becomes inconsistent.
    pub fn constrain(&mut self, coeffs: u64, rhs: bool) -> bool {
        let d = self.d;
        let mut row = (coeffs & coeff_mask(d)) | (u64::from(rhs) << d);
        for &r in &self.rows {
            let p = pivot(r, d).expect("stored rows have pivots");
            if row >> p & 1 == 1 {
                row ^= r;
            }
        }
        let Some(p) = pivot(row, d) else {
            return row >> d & 1 == 0;
        };
        for r in &mut self.rows {
            if *r >> p & 1 == 1 {
                *r ^= row;
            }
        }
        let at = self
            .rows
            .iter()
            .position(|&r| pivot(r, d).unwrap() < p)
            .unwrap_or(self.rows.len());
        self.rows.insert(at, row);
        true
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        assert_eq!(self.d, other.d);
        let mut out = self.clone();
        for &r in &other.rows {
            if !out.constrain(r & coeff_mask(self.d), (r >> self.d) & 1 == 1) {
                return None;
            }
        }
        Some(out)
    }

    pub fn contains(&self, w: u64) -> bool {
        self.rows
            .iter()
            .all(|&r| dot(r & coeff_mask(self.d), w) == ((r >> self.d) & 1 == 1))
    }

    /// Lexicographically smallest member.
    pub fn lex_min(&self) -> u64 {
        let mut sys = self.clone();
        let mut w = 0u64;
        for bit in (0..self.d).rev() {
            if !sys.constrain(1 << bit, false) {
                let ok = sys.constrain(1 << bit, true);
                debug_assert!(ok);
                w |= 1 << bit;
            }
        }
        w
    }
}
