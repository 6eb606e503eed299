//! Bitsets with an attached unordered member list.
//!
//! Syndromes and error supports are touched at a handful of positions per
//! decoder step but scanned as a whole when grouping into lines, so both
//! views are kept in sync.

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct IndexSet {
    universe: usize,
    words: Vec<u64>,
    pos: Vec<u32>,
    members: Vec<u32>,
}

impl IndexSet {
    pub fn new(universe: usize) -> Self {
        assert!(universe < NONE as usize, "universe too large");
        Self {
            universe,
            words: vec![0; universe.div_ceil(64)],
            pos: vec![NONE; universe],
            members: Vec::new(),
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(universe: usize, indices: I) -> Self {
        let mut set = Self::new(universe);
        for i in indices {
            set.insert(i);
        }
        set
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    /// Returns `true` if the element was newly inserted.
    pub fn insert(&mut self, i: usize) -> bool {
        if self.contains(i) {
            return false;
        }
        self.words[i >> 6] |= 1 << (i & 63);
        self.pos[i] = self.members.len() as u32;
        self.members.push(i as u32);
        true
    }

    /// Returns `true` if the element was present.
    pub fn remove(&mut self, i: usize) -> bool {
        if !self.contains(i) {
            return false;
        }
        self.words[i >> 6] &= !(1 << (i & 63));
        let at = self.pos[i] as usize;
        let last = self.members.pop().expect("member list out of sync");
        if last as usize != i {
            self.members[at] = last;
            self.pos[last as usize] = at as u32;
        }
        self.pos[i] = NONE;
        true
    }

    /// Flips membership of `i` and returns the new state.
    #[inline]
    pub fn toggle(&mut self, i: usize) -> bool {
        if self.remove(i) {
            false
        } else {
            self.insert(i);
            true
        }
    }

    pub fn clear(&mut self) {
        for &m in &self.members {
            self.pos[m as usize] = NONE;
        }
        self.members.clear();
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    /// Members in insertion-dependent order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().map(|&m| m as usize)
    }

    pub fn sorted(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.iter().collect();
        v.sort_unstable();
        v
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn symmetric_difference_with(&mut self, other: &IndexSet) {
        assert_eq!(self.universe, other.universe);
        for i in other.iter() {
            self.toggle(i);
        }
    }

    /// Checks that the bitset and the member list describe the same set.
    pub fn is_consistent(&self) -> bool {
        let popcount: u32 = self.words.iter().map(|w| w.count_ones()).sum();
        popcount as usize == self.members.len()
            && self
                .members
                .iter()
                .enumerate()
                .all(|(k, &m)| self.contains(m as usize) && self.pos[m as usize] as usize == k)
    }
}

impl PartialEq for IndexSet {
    fn eq(&self, other: &Self) -> bool {
        self.universe == other.universe && self.words == other.words
    }
}

impl Eq for IndexSet {}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn toggle_twice_is_identity() {
        let mut s = IndexSet::new(130);
        assert!(s.toggle(129));
        assert!(!s.toggle(129));
        assert!(s.is_empty());
        assert!(s.is_consistent());
    }

    proptest! {
        #[test]
        fn matches_reference_set(ops in proptest::collection::vec(0usize..200, 0..400)) {
            let mut s = IndexSet::new(200);
            let mut reference = std::collections::BTreeSet::new();
            for i in ops {
                s.toggle(i);
                if !reference.remove(&i) {
                    reference.insert(i);
                }
            }
            prop_assert!(s.is_consistent());
            prop_assert_eq!(s.sorted(), reference.into_iter().collect::<Vec<_>>());
        }
    }
}
