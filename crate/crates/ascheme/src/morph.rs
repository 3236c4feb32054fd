//! Isomorphisms, algebraic isomorphisms, automorphism groups and
//! faithful-map checks.
//!
//! Searches are plain backtracking over point (or relation) images. The
//! pruning rule is exact consistency with everything already placed: a
//! candidate image must reproduce the colors to all placed points. Every
//! search counts nodes against a budget and aborts with `Error::Budget`
//! instead of hanging.

use crate::error::{Error, Result};
use crate::perm::{Perm, PermGroup};
use crate::scheme::Scheme;
use num_bigint::BigUint;

pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Node counter shared by one search invocation.
#[derive(Debug, Clone)]
pub struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Budget {
        Budget { limit, used: 0 }
    }

    pub fn default_limit() -> Budget {
        Budget::new(DEFAULT_BUDGET)
    }

    #[inline]
    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            Err(Error::Budget(self.limit))
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }
}

/// An isomorphism between two schemes: a point bijection together with
/// the relation bijection it induces.
#[derive(Debug, Clone)]
pub struct SchemeIsomorphism {
    pub point_map: Vec<u32>,
    pub rel_map: Vec<u16>,
}

/// Search for an isomorphism from s1 to s2.
pub fn find_isomorphism(
    s1: &Scheme,
    s2: &Scheme,
    budget: &mut Budget,
) -> Result<Option<SchemeIsomorphism>> {
    if s1.n() != s2.n() || s1.rank() != s2.rank() {
        return Ok(None);
    }
    let mut v1: Vec<u32> = s1.relations().map(|s| s1.valency(s)).collect();
    let mut v2: Vec<u32> = s2.relations().map(|s| s2.valency(s)).collect();
    v1.sort_unstable();
    v2.sort_unstable();
    if v1 != v2 {
        return Ok(None);
    }

    let n = s1.n();
    let rank = s1.rank();
    let mut state = IsoState {
        s1,
        s2,
        img: vec![u32::MAX; n],
        used: vec![false; n],
        rel_map: vec![u16::MAX; rank],
        rel_inv: vec![u16::MAX; rank],
    };
    // the diagonal always maps to the diagonal
    state.rel_map[0] = 0;
    state.rel_inv[0] = 0;
    if search_point(&mut state, 0, budget)? {
        Ok(Some(SchemeIsomorphism {
            point_map: state.img,
            rel_map: state.rel_map,
        }))
    } else {
        Ok(None)
    }
}

struct IsoState<'a> {
    s1: &'a Scheme,
    s2: &'a Scheme,
    img: Vec<u32>,
    used: Vec<bool>,
    rel_map: Vec<u16>,
    rel_inv: Vec<u16>,
}

impl<'a> IsoState<'a> {
    /// Try to bind relation r1 -> r2 (and the converse pair); records the
    /// bindings actually added so they can be undone. False on conflict.
    fn bind(&mut self, r1: u16, r2: u16, added: &mut Vec<u16>) -> bool {
        if self.rel_map[r1 as usize] != u16::MAX {
            return self.rel_map[r1 as usize] == r2;
        }
        if self.rel_inv[r2 as usize] != u16::MAX {
            return false;
        }
        if self.s1.valency(r1) != self.s2.valency(r2) {
            return false;
        }
        let c1 = self.s1.converse(r1);
        let c2 = self.s2.converse(r2);
        if (c1 == r1) != (c2 == r2) {
            return false;
        }
        self.rel_map[r1 as usize] = r2;
        self.rel_inv[r2 as usize] = r1;
        added.push(r1);
        if c1 != r1 && !self.bind(c1, c2, added) {
            return false;
        }
        true
    }

    fn unbind(&mut self, added: &[u16]) {
        for &r1 in added {
            let r2 = self.rel_map[r1 as usize];
            self.rel_map[r1 as usize] = u16::MAX;
            self.rel_inv[r2 as usize] = u16::MAX;
        }
    }
}

fn search_point(state: &mut IsoState, k: usize, budget: &mut Budget) -> Result<bool> {
    let n = state.s1.n();
    if k == n {
        return Ok(true);
    }
    for c in 0..n as u32 {
        if state.used[c as usize] {
            continue;
        }
        budget.tick()?;
        let mut added = Vec::new();
        let mut ok = true;
        for j in 0..k as u32 {
            let r1 = state.s1.color(j, k as u32);
            let r2 = state.s2.color(state.img[j as usize], c);
            if !state.bind(r1, r2, &mut added) {
                ok = false;
                break;
            }
        }
        if ok {
            state.img[k] = c;
            state.used[c as usize] = true;
            if search_point(state, k + 1, budget)? {
                return Ok(true);
            }
            state.img[k] = u32::MAX;
            state.used[c as usize] = false;
        }
        state.unbind(&added);
    }
    Ok(false)
}

/// Search for a relation bijection preserving all intersection numbers.
pub fn algebraic_isomorphism(
    s1: &Scheme,
    s2: &Scheme,
    budget: &mut Budget,
) -> Result<Option<Vec<u16>>> {
    if s1.n() != s2.n() || s1.rank() != s2.rank() {
        return Ok(None);
    }
    let rank = s1.rank();
    let mut map = vec![u16::MAX; rank];
    let mut inv = vec![u16::MAX; rank];
    map[0] = 0;
    inv[0] = 0;
    if search_rel(s1, s2, &mut map, &mut inv, 1, budget)? {
        Ok(Some(map))
    } else {
        Ok(None)
    }
}

fn search_rel(
    s1: &Scheme,
    s2: &Scheme,
    map: &mut Vec<u16>,
    inv: &mut Vec<u16>,
    k: usize,
    budget: &mut Budget,
) -> Result<bool> {
    let rank = s1.rank();
    if k == rank {
        return Ok(true);
    }
    if map[k] != u16::MAX {
        return search_rel(s1, s2, map, inv, k + 1, budget);
    }
    let s = k as u16;
    for t in 1..rank as u16 {
        if inv[t as usize] != u16::MAX {
            continue;
        }
        budget.tick()?;
        if s1.valency(s) != s2.valency(t) {
            continue;
        }
        let cs = s1.converse(s);
        let ct = s2.converse(t);
        if (cs == s) != (ct == t) {
            continue;
        }
        if cs < s && map[cs as usize] != ct {
            continue;
        }
        // consistency of all triples made of placed relations and s
        let placed: Vec<u16> = (0..rank as u16)
            .filter(|&a| map[a as usize] != u16::MAX || a == s)
            .collect();
        let lookup = |a: u16| if a == s { t } else { map[a as usize] };
        let mut ok = true;
        'check: for &a in &placed {
            for &b in &placed {
                for &c in &placed {
                    if a != s && b != s && c != s {
                        continue;
                    }
                    if s1.intersection_number(a, b, c)
                        != s2.intersection_number(lookup(a), lookup(b), lookup(c))
                    {
                        ok = false;
                        break 'check;
                    }
                }
            }
        }
        if !ok {
            continue;
        }
        map[k] = t;
        inv[t as usize] = s;
        let bound_conv = cs > s && map[cs as usize] == u16::MAX;
        if bound_conv {
            map[cs as usize] = ct;
            inv[ct as usize] = cs;
        }
        if search_rel(s1, s2, map, inv, k + 1, budget)? {
            return Ok(true);
        }
        map[k] = u16::MAX;
        inv[t as usize] = u16::MAX;
        if bound_conv {
            map[cs as usize] = u16::MAX;
            inv[ct as usize] = u16::MAX;
        }
    }
    Ok(false)
}

/// The automorphism group of a scheme, with its order.
#[derive(Debug)]
pub struct AutGroup {
    pub group: PermGroup,
    pub order: BigUint,
}

/// Compute generators of Aut(S) by the stabilizer ladder: working from
/// the deepest point stabilizer outward, add one coset representative
/// for every new image of the next base point. Base points are taken in
/// index order (every point of a scheme touches every color, so color
/// diversity never separates them).
pub fn automorphism_group(scheme: &Scheme, budget: &mut Budget) -> Result<AutGroup> {
    let n = scheme.n();
    let mut gens: Vec<Perm> = Vec::new();
    for k in (0..n as u32).rev() {
        // generators found so far all fix 0..k-1; extend by maps k -> y
        let mut orbit_of_k = orbit_under(&gens, n, k);
        for y in k + 1..n as u32 {
            if orbit_of_k[y as usize] {
                continue;
            }
            if (0..k).any(|j| scheme.color(j, k) != scheme.color(j, y)) {
                continue;
            }
            budget.tick()?;
            if let Some(perm) = extend_automorphism(scheme, k, y, budget)? {
                gens.push(perm);
                orbit_of_k = orbit_under(&gens, n, k);
            }
        }
    }
    let group = PermGroup::new(n, gens);
    let order = group.stab_chain(&[]).order();
    Ok(AutGroup { group, order })
}

fn orbit_under(gens: &[Perm], n: usize, start: u32) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start as usize] = true;
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = g.apply(x);
            if !seen[y as usize] {
                seen[y as usize] = true;
                stack.push(y);
            }
        }
    }
    seen
}

/// Find one automorphism fixing 0..k-1 pointwise and sending k to y.
fn extend_automorphism(
    scheme: &Scheme,
    k: u32,
    y: u32,
    budget: &mut Budget,
) -> Result<Option<Perm>> {
    let n = scheme.n();
    let mut img: Vec<u32> = (0..k).collect();
    img.push(y);
    let mut used = vec![false; n];
    for &i in &img {
        used[i as usize] = true;
    }
    if dfs_extend(scheme, &mut img, &mut used, budget)? {
        let perm = Perm::from_images(img).expect("search produces bijections");
        debug_assert!(is_full_automorphism(scheme, &perm));
        Ok(Some(perm))
    } else {
        Ok(None)
    }
}

fn dfs_extend(
    scheme: &Scheme,
    img: &mut Vec<u32>,
    used: &mut Vec<bool>,
    budget: &mut Budget,
) -> Result<bool> {
    let n = scheme.n();
    let k = img.len() as u32;
    if k as usize == n {
        return Ok(true);
    }
    for c in 0..n as u32 {
        if used[c as usize] {
            continue;
        }
        budget.tick()?;
        let ok = (0..k).all(|j| {
            scheme.color(j, k) == scheme.color(img[j as usize], c)
                && scheme.color(k, j) == scheme.color(c, img[j as usize])
        });
        if !ok {
            continue;
        }
        img.push(c);
        used[c as usize] = true;
        if dfs_extend(scheme, img, used, budget)? {
            return Ok(true);
        }
        img.pop();
        used[c as usize] = false;
    }
    Ok(false)
}

/// Full-domain color preservation; the induced relation map is the
/// identity, so this is exactly membership in Aut(S).
pub fn is_full_automorphism(scheme: &Scheme, perm: &Perm) -> bool {
    let n = scheme.n() as u32;
    if perm.degree() != scheme.n() {
        return false;
    }
    for x in 0..n {
        for y in 0..n {
            if scheme.color(perm.apply(x), perm.apply(y)) != scheme.color(x, y) {
                return false;
            }
        }
    }
    true
}

/// Brute-force automorphism enumeration; usable as an oracle for n <= 8.
pub fn automorphisms_brute_force(scheme: &Scheme) -> Vec<Perm> {
    let n = scheme.n();
    assert!(n <= 8, "factorial enumeration is an oracle for small n only");
    let mut out = Vec::new();
    let mut images: Vec<u32> = (0..n as u32).collect();
    heap_permutations(&mut images, n, &mut |p| {
        let perm = Perm::from_images(p.to_vec()).unwrap();
        if is_full_automorphism(scheme, &perm) {
            out.push(perm);
        }
    });
    out
}

fn heap_permutations(v: &mut Vec<u32>, k: usize, visit: &mut impl FnMut(&[u32])) {
    if k == 1 {
        visit(v);
        return;
    }
    for i in 0..k {
        heap_permutations(v, k - 1, visit);
        if k % 2 == 0 {
            v.swap(i, k - 1);
        } else {
            v.swap(0, k - 1);
        }
    }
}

/// A partial point map, injective on its domain.
#[derive(Debug, Clone)]
pub struct PartialMap {
    pub domain: Vec<u32>,
    pub images: Vec<u32>,
}

impl PartialMap {
    pub fn new(domain: Vec<u32>, images: Vec<u32>) -> Result<PartialMap> {
        if domain.len() != images.len() {
            return Err(Error::BadDimensions);
        }
        let mut seen = std::collections::HashSet::new();
        if !images.iter().all(|&y| seen.insert(y)) {
            return Err(Error::Io("partial map is not injective".into()));
        }
        Ok(PartialMap { domain, images })
    }
}

/// r(x,y) = r(xφ,yφ) for all x,y in the domain.
pub fn is_faithful(scheme: &Scheme, map: &PartialMap) -> bool {
    for (i, &x) in map.domain.iter().enumerate() {
        for (j, &y) in map.domain.iter().enumerate() {
            if scheme.color(x, y) != scheme.color(map.images[i], map.images[j]) {
                return false;
            }
        }
    }
    true
}

/// C and D are compatible with respect to φ: r(x,y) = r(xφ,yφ) on C x D.
pub fn compatible(scheme: &Scheme, c: &[u32], d: &[u32], phi: &Perm) -> bool {
    for &x in c {
        for &y in d {
            if scheme.color(x, y) != scheme.color(phi.apply(x), phi.apply(y)) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{thin_scheme, wreath};
    use crate::group::FiniteGroup;

    fn c(n: usize) -> Scheme {
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
    fn isomorphism_to_self() {
        let s = wreath(&c(2), &c(3));
        let iso = find_isomorphism(&s, &s, &mut Budget::default_limit())
            .unwrap()
            .unwrap();
        assert_eq!(iso.point_map, (0..6).collect::<Vec<u32>>());
        assert_eq!(iso.rel_map, (0..s.rank() as u16).collect::<Vec<u16>>());
    }

    #[test]
    fn c4_and_klein_four_are_not_isomorphic() {
        let c4 = c(4);
        let v4 = thin_scheme(&FiniteGroup::abelian(&[2, 2]));
        assert!(find_isomorphism(&c4, &v4, &mut Budget::default_limit())
            .unwrap()
            .is_none());
        assert!(algebraic_isomorphism(&c4, &v4, &mut Budget::default_limit())
            .unwrap()
            .is_none());
    }

    #[test]
    fn relabeled_scheme_is_isomorphic() {
        let s = wreath(&c(3), &c(2));
        let sigma = Perm::from_cycles(6, &[vec![0, 4, 2], vec![1, 5]]).unwrap();
        let n = s.n();
        let mut color = vec![0u16; n * n];
        for x in 0..n as u32 {
            for y in 0..n as u32 {
                color[sigma.apply(x) as usize * n + sigma.apply(y) as usize] = s.color(x, y);
            }
        }
        let s2 = Scheme::from_flat(n, color).unwrap();
        let iso = find_isomorphism(&s, &s2, &mut Budget::default_limit())
            .unwrap()
            .unwrap();
        for x in 0..n as u32 {
            for y in 0..n as u32 {
                assert_eq!(
                    iso.rel_map[s.color(x, y) as usize],
                    s2.color(iso.point_map[x as usize], iso.point_map[y as usize])
                );
            }
        }
    }

    #[test]
    fn algebraic_isomorphism_on_isomorphic_schemes() {
        let s = wreath(&c(2), &c(2));
        let m = algebraic_isomorphism(&s, &s, &mut Budget::default_limit())
            .unwrap()
            .unwrap();
        assert_eq!(m[0], 0);
    }

    #[test]
    fn aut_of_thin_scheme_is_the_group() {
        for g in [
            FiniteGroup::cyclic(3),
            FiniteGroup::cyclic(4),
            FiniteGroup::abelian(&[2, 2]),
            FiniteGroup::abelian(&[3, 3]),
        ] {
            let s = thin_scheme(&g);
            let aut = automorphism_group(&s, &mut Budget::default_limit()).unwrap();
            assert_eq!(aut.order, BigUint::from(g.order()));
        }
    }

    #[test]
    fn aut_matches_brute_force_on_small_schemes() {
        for s in [c(3), c(4), c(5), rank2(5), wreath(&c(2), &c(3))] {
            let brute = automorphisms_brute_force(&s).len();
            let aut = automorphism_group(&s, &mut Budget::default_limit()).unwrap();
            assert_eq!(aut.order, BigUint::from(brute));
            for g in aut.group.gens() {
                assert!(is_full_automorphism(&s, g));
            }
        }
    }

    #[test]
    fn aut_of_rank2_is_symmetric_group() {
        let aut = automorphism_group(&rank2(6), &mut Budget::default_limit()).unwrap();
        assert_eq!(aut.order, BigUint::from(720u32));
    }

    #[test]
    fn aut_of_wreath_is_wreath_of_auts() {
        let w = wreath(&c(3), &c(3));
        let aut = automorphism_group(&w, &mut Budget::default_limit()).unwrap();
        // 3 per-block translations on 3 blocks, times the outer ones
        assert_eq!(aut.order, BigUint::from(81u32));
    }

    #[test]
    fn budget_aborts() {
        let err = automorphism_group(&rank2(40), &mut Budget::new(50)).unwrap_err();
        assert_eq!(err, Error::Budget(50));
    }

    #[test]
    fn orbitals_refine_relations() {
        let w = wreath(&c(2), &c(3));
        let aut = automorphism_group(&w, &mut Budget::default_limit()).unwrap();
        let (ids, count) = aut.group.orbitals();
        assert!(count >= w.rank());
        let n = w.n();
        let mut rel_of_orbital = vec![u16::MAX; count];
        for x in 0..n {
            for y in 0..n {
                let o = ids[x * n + y] as usize;
                let r = w.color(x as u32, y as u32);
                if rel_of_orbital[o] == u16::MAX {
                    rel_of_orbital[o] = r;
                } else {
                    assert_eq!(rel_of_orbital[o], r);
                }
            }
        }
    }

    #[test]
    fn faithful_and_compatible() {
        let s = c(3);
        let id = PartialMap::new(vec![0, 1], vec![0, 1]).unwrap();
        assert!(is_faithful(&s, &id));
        // swapping two points against a fixed third breaks colors
        let swap = PartialMap::new(vec![0, 1, 2], vec![1, 0, 2]).unwrap();
        assert!(!is_faithful(&s, &swap));

        let rot = Perm::from_cycles(3, &[vec![0, 1, 2]]).unwrap();
        assert!(compatible(&s, &[0, 1], &[2], &rot));
        let t = Perm::from_cycles(3, &[vec![0, 1]]).unwrap();
        assert!(!compatible(&s, &[0, 1], &[2], &t));
        assert!(compatible(&s, &[2], &[2], &t));
    }
}
