//! Dense linear algebra over F2 on packed `u64` rows.

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

#[inline]
pub(crate) fn get(row: &[u64], i: usize) -> bool {
    (row[i >> 6] >> (i & 63)) & 1 == 1
}

#[inline]
pub(crate) fn flip(row: &mut [u64], i: usize) {
    row[i >> 6] ^= 1 << (i & 63);
}

#[inline]
pub(crate) fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

fn lowest_set(row: &[u64]) -> Option<usize> {
    row.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
}

pub(crate) fn packed_from_indices(n_cols: usize, indices: impl IntoIterator<Item = usize>) -> Vec<u64> {
    let mut row = vec![0u64; words_for(n_cols)];
    for i in indices {
        flip(&mut row, i);
    }
    row
}

/// Reduced row echelon basis of a row space.
///
/// Every pivot column is zero in all rows except its own, so membership of a
/// vector is decided by XOR-ing only the rows whose pivot it hits.
#[derive(Clone, Debug)]
pub struct RowEchelon {
    n_cols: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl RowEchelon {
    pub fn new(n_cols: usize) -> Self {
        Self { n_cols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_rows<I: IntoIterator<Item = Vec<u64>>>(n_cols: usize, rows: I) -> Self {
        let mut basis = Self::new(n_cols);
        for r in rows {
            basis.push(r);
        }
        basis
    }

    /// Adds a row to the spanning set. Returns `true` if the rank grew.
    pub fn push(&mut self, mut row: Vec<u64>) -> bool {
        debug_assert_eq!(row.len(), words_for(self.n_cols));
        self.reduce(&mut row);
        let Some(pivot) = lowest_set(&row) else {
            return false;
        };
        for existing in &mut self.rows {
            if get(existing, pivot) {
                xor_into(existing, &row);
            }
        }
        self.rows.push(row);
        self.pivots.push(pivot);
        true
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Reduces `v` to its canonical remainder modulo the row space.
    pub fn reduce(&self, v: &mut [u64]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if get(v, p) {
                xor_into(v, row);
            }
        }
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Membership test that only touches rows whose pivot is set in `v`.
    ///
    /// Valid because the basis is fully reduced: XOR-ing one row never
    /// changes another row's pivot bit.
    pub fn contains_sparse(&self, v: &[u64], pivot_of_col: &[u32]) -> bool {
        let mut w = v.to_vec();
        for (k, &word) in v.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let col = k * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let r = pivot_of_col[col];
                if r != u32::MAX {
                    xor_into(&mut w, &self.rows[r as usize]);
                }
            }
        }
        w.iter().all(|&x| x == 0)
    }

    /// Column to row lookup for [`RowEchelon::contains_sparse`].
    pub fn pivot_index(&self) -> Vec<u32> {
        let mut idx = vec![u32::MAX; self.n_cols];
        for (r, &p) in self.pivots.iter().enumerate() {
            idx[p] = r as u32;
        }
        idx
    }
}

pub fn rank<I: IntoIterator<Item = Vec<u64>>>(n_cols: usize, rows: I) -> usize {
    RowEchelon::from_rows(n_cols, rows).rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_has_full_rank() {
        let rows = (0..70).map(|i| packed_from_indices(70, [i]));
        assert_eq!(rank(70, rows), 70);
    }

    proptest! {
        #[test]
        fn sparse_and_full_membership_agree(
            rows in proptest::collection::vec(proptest::collection::vec(0usize..90, 0..6), 0..40),
            probe in proptest::collection::vec(0usize..90, 0..10),
            combo in proptest::collection::vec(any::<bool>(), 40),
        ) {
            let packed: Vec<Vec<u64>> = rows.iter().map(|r| packed_from_indices(90, r.iter().copied())).collect();
            let basis = RowEchelon::from_rows(90, packed.clone());
            let idx = basis.pivot_index();
            let mut in_span = vec![0u64; words_for(90)];
            for (r, take) in packed.iter().zip(&combo) {
                if *take { xor_into(&mut in_span, r); }
            }
            prop_assert!(basis.contains(&in_span));
            prop_assert!(basis.contains_sparse(&in_span, &idx));
            let v = packed_from_indices(90, probe);
            prop_assert_eq!(basis.contains(&v), basis.contains_sparse(&v, &idx));
        }
    }
}
