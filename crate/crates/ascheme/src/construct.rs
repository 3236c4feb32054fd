//! Scheme constructions: thin schemes of groups, subschemes, quotients,
//! wreath products, orbital schemes and translation (fusion) schemes.

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::perm::{Perm, PermGroup};
use crate::relset::RelSet;
use crate::scheme::Scheme;
use crate::structure::ClosedSubset;

/// The thin scheme of a group: color(x,y) = x^{-1} y. Rank |G|, all
/// valencies 1.
pub fn thin_scheme(group: &FiniteGroup) -> Scheme {
    let n = group.order();
    let mut color = vec![0u16; n * n];
    for x in 0..n {
        let xi = group.inv(x as u16);
        for y in 0..n {
            color[x * n + y] = group.mul(xi, y as u16);
        }
    }
    Scheme::from_flat(n, color).expect("group tables give valid schemes")
}

/// The subscheme on the block xT, with relations relabeled by their order
/// in the parent.
pub fn subscheme(scheme: &Scheme, t: &ClosedSubset, x: u32) -> Scheme {
    let block = &t.blocks()[t.block_of(x) as usize];
    let m = block.len();
    let mut relabel = std::collections::BTreeMap::new();
    for s in t.rels().iter() {
        let next = relabel.len() as u16;
        relabel.insert(s, next);
    }
    let mut color = vec![0u16; m * m];
    for (a, &pa) in block.iter().enumerate() {
        for (b, &pb) in block.iter().enumerate() {
            color[a * m + b] = relabel[&scheme.color(pa, pb)];
        }
    }
    Scheme::from_flat(m, color).expect("subschemes on closed-subset blocks are schemes")
}

/// The quotient scheme S//T on the blocks X/T, together with the relation
/// map s -> s^T. Quotient colors are numbered by first appearance in the
/// row-major block matrix, so the output is deterministic.
pub fn quotient(scheme: &Scheme, t: &ClosedSubset) -> (Scheme, Vec<u16>) {
    let blocks = t.blocks();
    let m = blocks.len();
    // class of a relation: the double coset TsT as a relation set
    let mut class_of_rel: Vec<RelSet> = Vec::with_capacity(scheme.rank());
    for s in scheme.relations() {
        let ts = scheme
            .complex_product(t.rels(), &RelSet::singleton(s))
            .expect("nonempty");
        let tst = scheme.complex_product(&ts, t.rels()).expect("nonempty");
        class_of_rel.push(tst);
    }
    let mut class_ids: std::collections::HashMap<RelSet, u16> = std::collections::HashMap::new();
    let mut color = vec![0u16; m * m];
    for a in 0..m {
        let xa = blocks[a][0];
        for b in 0..m {
            let xb = blocks[b][0];
            let class = &class_of_rel[scheme.color(xa, xb) as usize];
            let next = class_ids.len() as u16;
            let id = *class_ids.entry(*class).or_insert(next);
            color[a * m + b] = id;
        }
    }
    let rel_map: Vec<u16> = class_of_rel.iter().map(|c| class_ids[c]).collect();
    let q = Scheme::from_flat(m, color).expect("quotients over closed subsets are schemes");
    (q, rel_map)
}

/// The wreath product F ≀ H on W x Y, with points laid out fiber-major:
/// point (w, y) is y*|W| + w, so the fine relations are block-diagonal.
/// Fine relations keep their F-index; the coarse relation of h is
/// rank(F) + h - 1.
pub fn wreath(f: &Scheme, h: &Scheme) -> Scheme {
    let w = f.n();
    let y = h.n();
    let n = w * y;
    let rf = f.rank() as u16;
    let mut color = vec![0u16; n * n];
    for y1 in 0..y {
        for w1 in 0..w {
            let p1 = y1 * w + w1;
            for y2 in 0..y {
                for w2 in 0..w {
                    let p2 = y2 * w + w2;
                    color[p1 * n + p2] = if y1 == y2 {
                        f.color(w1 as u32, w2 as u32)
                    } else {
                        rf + h.color(y1 as u32, y2 as u32) - 1
                    };
                }
            }
        }
    }
    Scheme::from_flat(n, color).expect("wreath products of schemes are schemes")
}

/// The orbital scheme of a transitive permutation group: colors are the
/// orbits of the componentwise action on X x X.
pub fn orbital_scheme(group: &PermGroup) -> Result<Scheme> {
    if !group.is_transitive() {
        return Err(Error::NotTransitive);
    }
    let (ids, count) = group.orbitals();
    if count > crate::scheme::MAX_RANK {
        return Err(Error::TooManyRelations(count));
    }
    let color: Vec<u16> = ids.iter().map(|&c| c as u16).collect();
    Scheme::from_flat(group.degree(), color)
}

/// The translation scheme of an abelian group under a set of
/// automorphisms: colors are the orbits of the generated group on G,
/// color(x,y) = orbit of y - x. Always commutative and schurian.
pub fn fusion_from_automorphisms(group: &FiniteGroup, auts: &[Perm]) -> Result<Scheme> {
    if !group.is_abelian() {
        return Err(Error::NotAbelian);
    }
    for p in auts {
        if !group.is_automorphism(p) {
            return Err(Error::NotAutomorphism);
        }
    }
    let n = group.order();
    let action = PermGroup::new(n, auts.to_vec());
    let (orbit_raw, _) = action.orbit_partition();
    // renumber orbits by least element so the identity orbit is color 0
    let mut renumber = vec![u16::MAX; n];
    let mut next = 0u16;
    for e in 0..n {
        let root = orbit_raw[e] as usize;
        if renumber[root] == u16::MAX {
            renumber[root] = next;
            next += 1;
        }
    }
    let orbit_of = |e: u16| renumber[orbit_raw[e as usize] as usize];
    let mut color = vec![0u16; n * n];
    for x in 0..n {
        let xi = group.inv(x as u16);
        for y in 0..n {
            color[x * n + y] = orbit_of(group.mul(xi, y as u16));
        }
    }
    Scheme::from_flat(n, color)
}

/// Convenience: the orbital scheme of the regular action of a group.
pub fn regular_representation(group: &FiniteGroup) -> PermGroup {
    let n = group.order();
    let gens = (1..n as u16)
        .map(|g| {
            Perm::from_images((0..n as u16).map(|x| group.mul(x, g) as u32).collect())
                .expect("right translations are bijections")
        })
        .collect();
    PermGroup::new(n, gens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{generated_closed_subset, thin_radical, thin_residue};

    fn c(n: usize) -> Scheme {
        thin_scheme(&FiniteGroup::cyclic(n))
    }

    #[test]
    fn thin_schemes() {
        let s = thin_scheme(&FiniteGroup::cyclic(2));
        assert_eq!((s.n(), s.rank()), (2, 2));
        let s9 = thin_scheme(&FiniteGroup::abelian(&[3, 3]));
        assert_eq!((s9.n(), s9.rank()), (9, 9));
        assert!(s9.is_commutative());
        let s3 = thin_scheme(&FiniteGroup::symmetric(3));
        assert_eq!((s3.n(), s3.rank()), (6, 6));
        assert!(!s3.is_commutative());
    }

    #[test]
    fn subscheme_extremes() {
        let s = c(6);
        let whole = generated_closed_subset(&s, &s.all_relations());
        assert_eq!(subscheme(&s, &whole, 0), s);
        let trivial = generated_closed_subset(&s, &RelSet::singleton(0));
        assert_eq!(subscheme(&s, &trivial, 2).n(), 1);
    }

    #[test]
    fn wreath_shape() {
        let w = wreath(&c(3), &c(3));
        assert_eq!(w.n(), 9);
        assert_eq!(w.rank(), 5);
        let mut valencies: Vec<u32> = w.relations().map(|s| w.valency(s)).collect();
        valencies.sort_unstable();
        assert_eq!(valencies, vec![1, 1, 1, 3, 3]);
        assert!(w.is_commutative());

        // wreath with a 1-point scheme is the original
        let one = Scheme::from_flat(1, vec![0]).unwrap();
        assert_eq!(wreath(&c(4), &one), c(4));
    }

    #[test]
    fn wreath_of_inner_block_is_the_factor() {
        let w = wreath(&c(3), &c(3));
        let inner = thin_residue(&w);
        assert_eq!(subscheme(&w, &inner, 0), c(3));
        let radical = thin_radical(&w);
        assert_eq!(radical.rels().to_vec(), vec![0, 1, 2]);
    }

    #[test]
    fn quotient_basics() {
        let s = c(6);
        let trivial = generated_closed_subset(&s, &RelSet::singleton(0));
        let (q, rel_map) = quotient(&s, &trivial);
        assert_eq!(q, s);
        assert_eq!(rel_map, (0..6u16).collect::<Vec<_>>());

        // quotient of a wreath by its inner copy is the outer factor
        let w = wreath(&c(3), &c(3));
        let inner = thin_residue(&w);
        let (q, rel_map) = quotient(&w, &inner);
        assert_eq!(q.n(), 3);
        assert_eq!(q.rank(), 3);
        // all inner relations map to the quotient identity
        assert_eq!(rel_map[0], 0);
        assert_eq!(rel_map[1], 0);
        assert_eq!(rel_map[2], 0);
        assert!(q.relations().all(|s| q.valency(s) == 1));
    }

    #[test]
    fn quotient_by_strongly_normal_is_thin() {
        let w = wreath(&c(2), &c(4));
        let residue = thin_residue(&w);
        assert!(crate::structure::is_strongly_normal(&w, &residue));
        let (q, _) = quotient(&w, &residue);
        assert!(q.relations().all(|s| q.valency(s) == 1));
    }

    #[test]
    fn orbital_schemes() {
        let c3 = regular_representation(&FiniteGroup::cyclic(3));
        let s = orbital_scheme(&c3).unwrap();
        assert_eq!(s, c(3));

        // full symmetric group gives the rank-2 scheme
        let s4 = PermGroup::new(
            4,
            vec![
                Perm::from_cycles(4, &[vec![0, 1]]).unwrap(),
                Perm::from_cycles(4, &[vec![0, 1, 2, 3]]).unwrap(),
            ],
        );
        let s = orbital_scheme(&s4).unwrap();
        assert_eq!(s.rank(), 2);

        let intransitive = PermGroup::new(3, vec![Perm::from_cycles(3, &[vec![0, 1]]).unwrap()]);
        assert_eq!(orbital_scheme(&intransitive).unwrap_err(), Error::NotTransitive);
    }

    #[test]
    fn fusion_schemes() {
        let g = FiniteGroup::abelian(&[3, 3]);
        // no automorphisms: the thin scheme
        let s = fusion_from_automorphisms(&g, &[]).unwrap();
        assert_eq!(s, thin_scheme(&g));

        // negation fuses x with -x: rank 5, symmetric
        let neg = g.matrix_endomorphism(&[vec![2, 0], vec![0, 2]]).unwrap();
        let s = fusion_from_automorphisms(&g, &[neg]).unwrap();
        assert_eq!(s.rank(), 5);
        assert!(s.is_symmetric());
        assert!(s.is_commutative());

        let s3 = FiniteGroup::symmetric(3);
        assert_eq!(
            fusion_from_automorphisms(&s3, &[]).unwrap_err(),
            Error::NotAbelian
        );
        let not_aut = Perm::from_cycles(9, &[vec![0, 1]]).unwrap();
        assert_eq!(
            fusion_from_automorphisms(&g, &[not_aut]).unwrap_err(),
            Error::NotAutomorphism
        );
    }

    #[test]
    fn order_bookkeeping() {
        let w = wreath(&c(4), &c(5));
        assert_eq!(w.n(), 20);
        assert_eq!(w.rank(), 4 + 5 - 1);
        let total: u64 = w.relations().map(|s| w.valency(s) as u64).sum();
        assert_eq!(total, 20);
        // coarse valencies are n_h * |W|
        for h in 4..8u16 {
            assert_eq!(w.valency(h), 4);
        }
    }
}
