//! Integer partitions (Young diagrams) and their box data.

use std::fmt;

use crate::symfunc::SymfuncError;

/// An integer partition `μ₁ ≥ μ₂ ≥ … ≥ μ_ℓ > 0`, i.e. a Young diagram.
///
/// The empty partition is the zero partition. Boxes are addressed as
/// `(p, q)` with `p` the 1-based row and `q` the 1-based column.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Builds a partition from weakly decreasing nonnegative parts.
    /// Trailing zeros are trimmed; an increasing pair is rejected.
    pub fn new(parts: impl Into<Vec<u32>>) -> Result<Self, SymfuncError> {
        let mut parts = parts.into();
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(SymfuncError::NotWeaklyDecreasing { parts });
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Partition { parts })
    }

    /// The zero partition (no boxes).
    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// One-row partition `(m)`; `m = 0` gives the zero partition.
    pub fn row(m: u32) -> Self {
        if m == 0 {
            Self::empty()
        } else {
            Partition { parts: vec![m] }
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of boxes `|μ|`.
    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Number of nonzero rows `ℓ(μ)`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Row `p` length (1-based), zero past the last row.
    pub fn part(&self, p: usize) -> u32 {
        if p >= 1 && p <= self.parts.len() {
            self.parts[p - 1]
        } else {
            0
        }
    }

    /// The conjugate diagram (rows and columns swapped).
    pub fn conjugate(&self) -> Partition {
        let cols = self.parts.first().copied().unwrap_or(0) as usize;
        let mut conj = Vec::with_capacity(cols);
        for q in 1..=cols {
            let rows = self.parts.iter().take_while(|&&m| m as usize >= q).count();
            conj.push(rows as u32);
        }
        Partition { parts: conj }
    }

    /// Iterates over boxes `(p, q)`, row by row, both 1-based.
    pub fn boxes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(i, &m)| (1..=m as usize).map(move |q| (i + 1, q)))
    }

    /// Content `q − p` of a box.
    pub fn content(p: usize, q: usize) -> i64 {
        q as i64 - p as i64
    }

    /// Hook length `h(p, q) = μ_p − q + μ′_q − p + 1`.
    pub fn hook_length(&self, p: usize, q: usize) -> u32 {
        let arm = self.part(p) - q as u32;
        let conj_col = self
            .parts
            .iter()
            .take_while(|&&m| m as usize >= q)
            .count() as u32;
        let leg = conj_col - p as u32;
        arm + leg + 1
    }

    /// All partitions of weight `m`, in lexicographically descending order,
    /// e.g. `(4), (3,1), (2,2), (2,1,1), (1,1,1,1)` for `m = 4`.
    pub fn all_of_weight(m: u32) -> Vec<Partition> {
        Self::all_of_weight_bounded(m, m as usize)
    }

    /// Partitions of weight `m` with at most `max_len` rows, lex descending.
    pub fn all_of_weight_bounded(m: u32, max_len: usize) -> Vec<Partition> {
        let mut out = Vec::new();
        if max_len == 0 {
            if m == 0 {
                out.push(Partition::empty());
            }
            return out;
        }
        let mut stack = Vec::new();
        descend(m, m, max_len, &mut stack, &mut out);
        out
    }
}

fn descend(remaining: u32, cap: u32, rows_left: usize, stack: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition { parts: stack.clone() });
        return;
    }
    if rows_left == 0 {
        return;
    }
    let hi = remaining.min(cap);
    // Largest first part first keeps the output lex descending.
    for first in (1..=hi).rev() {
        // Feasibility: the rest must fit in (rows_left - 1) rows of size <= first.
        if (remaining - first) as u64 > (first as u64) * (rows_left as u64 - 1) {
            continue;
        }
        stack.push(first);
        descend(remaining - first, first, rows_left - 1, stack, out);
        stack.pop();
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition{:?}", self.parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}
