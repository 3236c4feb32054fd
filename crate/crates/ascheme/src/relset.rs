/// A set of relation indices of a fixed scheme, stored as a 256-bit mask.
///
/// Schemes are capped at 255 relations, so four words always suffice.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RelSet {
    bits: [u64; 4],
}

impl RelSet {
    pub fn empty() -> Self {
        RelSet::default()
    }

    pub fn singleton(s: u16) -> Self {
        let mut r = RelSet::default();
        r.insert(s);
        r
    }

    /// The full set {0, .., rank-1}.
    pub fn full(rank: usize) -> Self {
        let mut r = RelSet::default();
        for s in 0..rank {
            r.insert(s as u16);
        }
        r
    }

    pub fn insert(&mut self, s: u16) {
        self.bits[(s >> 6) as usize] |= 1u64 << (s & 63);
    }

    pub fn remove(&mut self, s: u16) {
        self.bits[(s >> 6) as usize] &= !(1u64 << (s & 63));
    }

    pub fn contains(&self, s: u16) -> bool {
        self.bits[(s >> 6) as usize] >> (s & 63) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union(&self, other: &RelSet) -> RelSet {
        let mut r = *self;
        for i in 0..4 {
            r.bits[i] |= other.bits[i];
        }
        r
    }

    pub fn intersect(&self, other: &RelSet) -> RelSet {
        let mut r = *self;
        for i in 0..4 {
            r.bits[i] &= other.bits[i];
        }
        r
    }

    pub fn minus(&self, other: &RelSet) -> RelSet {
        let mut r = *self;
        for i in 0..4 {
            r.bits[i] &= !other.bits[i];
        }
        r
    }

    pub fn is_subset(&self, other: &RelSet) -> bool {
        self.bits
            .iter()
            .zip(other.bits.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = u16> + '_ {
        self.bits.iter().enumerate().flat_map(|(i, &w)| {
            let base = (i as u16) << 6;
            BitIter { word: w, base }
        })
    }

    pub fn to_vec(&self) -> Vec<u16> {
        self.iter().collect()
    }
}

impl FromIterator<u16> for RelSet {
    fn from_iter<T: IntoIterator<Item = u16>>(iter: T) -> Self {
        let mut r = RelSet::default();
        for s in iter {
            r.insert(s);
        }
        r
    }
}

impl std::fmt::Debug for RelSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

struct BitIter {
    word: u64,
    base: u16,
}

impl Iterator for BitIter {
    type Item = u16;
    fn next(&mut self) -> Option<u16> {
        if self.word == 0 {
            return None;
        }
        let tz = self.word.trailing_zeros() as u16;
        self.word &= self.word - 1;
        Some(self.base + tz)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_iterate_roundtrip() {
        let set: RelSet = [0u16, 3, 63, 64, 200, 254].into_iter().collect();
        assert_eq!(set.to_vec(), vec![0, 3, 63, 64, 200, 254]);
        assert_eq!(set.len(), 6);
        assert!(set.contains(64));
        assert!(!set.contains(65));
    }

    #[test]
    fn set_algebra() {
        let a: RelSet = [1u16, 2, 3].into_iter().collect();
        let b: RelSet = [3u16, 4].into_iter().collect();
        assert_eq!(a.union(&b).to_vec(), vec![1, 2, 3, 4]);
        assert_eq!(a.intersect(&b).to_vec(), vec![3]);
        assert_eq!(a.minus(&b).to_vec(), vec![1, 2]);
        assert!(a.intersect(&b).is_subset(&a));
        assert!(!a.is_subset(&b));
    }
}
