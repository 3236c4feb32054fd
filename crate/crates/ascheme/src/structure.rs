//! Closed subsets of a scheme: generation, thin radical and residue,
//! strong normality, relation stabilizers and point partitions.

use crate::error::{Error, Result};
use crate::relset::RelSet;
use crate::scheme::Scheme;

/// A closed subset T of the relations of a scheme, together with the
/// partition of the point set into blocks xT.
#[derive(Clone, Debug)]
pub struct ClosedSubset {
    rels: RelSet,
    blocks: Vec<Vec<u32>>,
    block_of: Vec<u32>,
}

impl ClosedSubset {
    /// Validate closure and compute the block partition.
    pub fn new(scheme: &Scheme, rels: RelSet) -> Result<ClosedSubset> {
        if !is_closed(scheme, &rels) {
            return Err(Error::NotClosed);
        }
        let n = scheme.n();
        let mut block_of = vec![u32::MAX; n];
        let mut blocks = Vec::new();
        for x in 0..n as u32 {
            if block_of[x as usize] != u32::MAX {
                continue;
            }
            let members: Vec<u32> = (0..n as u32)
                .filter(|&y| rels.contains(scheme.color(x, y)))
                .collect();
            let id = blocks.len() as u32;
            for &y in &members {
                block_of[y as usize] = id;
            }
            blocks.push(members);
        }
        Ok(ClosedSubset {
            rels,
            blocks,
            block_of,
        })
    }

    pub fn rels(&self) -> &RelSet {
        &self.rels
    }

    pub fn contains(&self, s: u16) -> bool {
        self.rels.contains(s)
    }

    /// Number of relations in T.
    pub fn size(&self) -> usize {
        self.rels.len()
    }

    /// The order n_T (sum of valencies), which equals the block size.
    pub fn order(&self, scheme: &Scheme) -> u64 {
        scheme.set_order(&self.rels)
    }

    /// Blocks of the point partition X/T, ordered by least member.
    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn block_of(&self, x: u32) -> u32 {
        self.block_of[x as usize]
    }

    /// True iff every member relation has valency 1.
    pub fn is_thin(&self, scheme: &Scheme) -> bool {
        self.rels.iter().all(|s| scheme.valency(s) == 1)
    }
}

/// TT ⊆ T check (with 0 ∈ T and nonempty).
pub fn is_closed(scheme: &Scheme, rels: &RelSet) -> bool {
    if !rels.contains(0) {
        return false;
    }
    for s in rels.iter() {
        if !rels.contains(scheme.converse(s)) {
            return false;
        }
        for t in rels.iter() {
            if !scheme.product(s, t).is_subset(rels) {
                return false;
            }
        }
    }
    true
}

/// Smallest closed subset containing the seed: the fixed point of
/// T -> T ∪ T* ∪ TT starting from seed ∪ {0}.
pub fn generated_closed_subset(scheme: &Scheme, seed: &RelSet) -> ClosedSubset {
    let mut current = seed.union(&RelSet::singleton(0));
    loop {
        let mut next = current;
        for s in current.iter() {
            next.insert(scheme.converse(s));
        }
        for s in current.iter() {
            for t in current.iter() {
                next = next.union(&scheme.product(s, t));
            }
        }
        if next == current {
            break;
        }
        current = next;
    }
    ClosedSubset::new(scheme, current).expect("closure fixed point is closed")
}

/// The set of all valency-1 relations. Always closed.
pub fn thin_radical(scheme: &Scheme) -> ClosedSubset {
    let rels: RelSet = scheme.relations().filter(|&s| scheme.valency(s) == 1).collect();
    ClosedSubset::new(scheme, rels).expect("thin radical is closed")
}

/// The closed subset generated by all s*s.
pub fn thin_residue(scheme: &Scheme) -> ClosedSubset {
    let mut seed = RelSet::empty();
    for s in scheme.relations() {
        seed = seed.union(&scheme.product(scheme.converse(s), s));
    }
    generated_closed_subset(scheme, &seed)
}

/// s*Ts ⊆ T for every relation s.
pub fn is_strongly_normal(scheme: &Scheme, t: &ClosedSubset) -> bool {
    for s in scheme.relations() {
        let left = scheme
            .complex_product(&RelSet::singleton(scheme.converse(s)), t.rels())
            .expect("nonempty factors");
        let full = scheme
            .complex_product(&left, &RelSet::singleton(s))
            .expect("nonempty factors");
        if !full.is_subset(t.rels()) {
            return false;
        }
    }
    true
}

/// L(s) = {t : ts = s}. Not necessarily closed; returned as a plain set.
pub fn left_stabilizer(scheme: &Scheme, s: u16) -> RelSet {
    scheme
        .relations()
        .filter(|&t| scheme.product(t, s) == RelSet::singleton(s))
        .collect()
}

/// R(s) = {t : st = s}.
pub fn right_stabilizer(scheme: &Scheme, s: u16) -> RelSet {
    scheme
        .relations()
        .filter(|&t| scheme.product(s, t) == RelSet::singleton(s))
        .collect()
}

/// All closed subsets, by breadth-first closure of one-relation
/// extensions. Ordered by (size, relation set).
pub fn all_closed_subsets(scheme: &Scheme) -> Vec<RelSet> {
    let mut found = std::collections::BTreeSet::new();
    let trivial = generated_closed_subset(scheme, &RelSet::singleton(0));
    let mut queue = vec![*trivial.rels()];
    found.insert(*trivial.rels());
    while let Some(current) = queue.pop() {
        for s in scheme.relations() {
            if current.contains(s) {
                continue;
            }
            let bigger = generated_closed_subset(scheme, &current.union(&RelSet::singleton(s)));
            if found.insert(*bigger.rels()) {
                queue.push(*bigger.rels());
            }
        }
    }
    let mut out: Vec<RelSet> = found.into_iter().collect();
    out.sort_by_key(|r| (r.len(), r.to_vec()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{thin_scheme, wreath};
    use crate::group::FiniteGroup;

    fn cyclic_thin(n: usize) -> Scheme {
        thin_scheme(&FiniteGroup::cyclic(n))
    }

    fn rank2(n: usize) -> Scheme {
        let mut color = vec![1u16; n * n];
        for x in 0..n {
            color[x * n + x] = 0;
        }
        Scheme::from_flat(n, color).unwrap()
    }

    #[test]
    fn generated_subsets() {
        let c9 = cyclic_thin(9);
        assert_eq!(
            generated_closed_subset(&c9, &RelSet::singleton(0)).size(),
            1
        );
        // an order-9 generator generates everything
        assert_eq!(
            generated_closed_subset(&c9, &RelSet::singleton(1)).size(),
            9
        );
        // the order-3 element generates the subgroup {0,3,6}
        let sub = generated_closed_subset(&c9, &RelSet::singleton(3));
        assert_eq!(sub.rels().to_vec(), vec![0, 3, 6]);

        let r2 = rank2(5);
        assert_eq!(
            generated_closed_subset(&r2, &RelSet::singleton(1)).size(),
            2
        );
    }

    #[test]
    fn radical_and_residue_extremes() {
        let c9 = cyclic_thin(9);
        assert_eq!(thin_radical(&c9).size(), 9);
        assert_eq!(thin_residue(&c9).size(), 1);

        let r2 = rank2(5);
        assert_eq!(thin_radical(&r2).size(), 1);
        assert_eq!(thin_residue(&r2).size(), 2);
    }

    #[test]
    fn wreath_radical_and_residue() {
        let c3 = cyclic_thin(3);
        let w = wreath(&c3, &c3);
        assert_eq!(w.n(), 9);
        assert_eq!(w.rank(), 5);
        let radical = thin_radical(&w);
        assert_eq!(radical.order(&w), 3);
        let residue = thin_residue(&w);
        assert_eq!(residue.order(&w), 3);
        // the residue is the inner copy: relations 0,1,2
        assert_eq!(residue.rels().to_vec(), vec![0, 1, 2]);
        // blocks of the inner copy are the 3 fibers
        assert_eq!(residue.blocks().len(), 3);
        assert_eq!(residue.blocks()[0], vec![0, 1, 2]);
    }

    #[test]
    fn strong_normality() {
        let c9 = cyclic_thin(9);
        let whole = ClosedSubset::new(&c9, RelSet::full(9)).unwrap();
        assert!(is_strongly_normal(&c9, &whole));
        let sub = generated_closed_subset(&c9, &RelSet::singleton(3));
        assert!(is_strongly_normal(&c9, &sub)); // abelian: all subgroups
        let r2 = rank2(5);
        let trivial = ClosedSubset::new(&r2, RelSet::singleton(0)).unwrap();
        assert!(!is_strongly_normal(&r2, &trivial));
    }

    #[test]
    fn residue_is_least_strongly_normal() {
        for s in [cyclic_thin(6), rank2(6), wreath(&cyclic_thin(3), &cyclic_thin(3))] {
            let residue = thin_residue(&s);
            let mut intersection = RelSet::full(s.rank());
            for rels in all_closed_subsets(&s) {
                let t = ClosedSubset::new(&s, rels).unwrap();
                if is_strongly_normal(&s, &t) {
                    assert!(residue.rels().is_subset(t.rels()));
                    intersection = intersection.intersect(t.rels());
                }
            }
            assert_eq!(intersection, *residue.rels());
        }
    }

    #[test]
    fn stabilizers() {
        let c9 = cyclic_thin(9);
        for s in c9.relations() {
            assert_eq!(left_stabilizer(&c9, s).to_vec(), vec![0]);
        }
        // coarse relation of a wreath product absorbs the inner copy
        let w = wreath(&cyclic_thin(3), &cyclic_thin(3));
        let coarse = 3u16;
        let r = right_stabilizer(&w, coarse);
        assert!(RelSet::from_iter([0u16, 1, 2]).is_subset(&r));
    }

    #[test]
    fn point_partitions() {
        let c9 = cyclic_thin(9);
        let trivial = ClosedSubset::new(&c9, RelSet::singleton(0)).unwrap();
        assert_eq!(trivial.blocks().len(), 9);
        let whole = ClosedSubset::new(&c9, RelSet::full(9)).unwrap();
        assert_eq!(whole.blocks().len(), 1);
        let sub = generated_closed_subset(&c9, &RelSet::singleton(3));
        assert_eq!(sub.blocks().len(), 3);
        for b in sub.blocks() {
            assert_eq!(b.len() as u64, sub.order(&c9));
        }
    }

    #[test]
    fn closed_subset_rejects_non_closed() {
        let c9 = cyclic_thin(9);
        assert!(ClosedSubset::new(&c9, RelSet::from_iter([0u16, 1])).is_err());
    }
}
