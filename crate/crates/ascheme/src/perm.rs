use crate::error::{Error, Result};
use num_bigint::BigUint;

/// A permutation of {0, .., n-1} in image form: `p[x]` is the image of `x`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &y in &images {
            if (y as usize) >= n || seen[y as usize] {
                return Err(Error::Io(format!("not a permutation of 0..{n}")));
            }
            seen[y as usize] = true;
        }
        Ok(Perm(images))
    }

    /// Build from disjoint-cycle notation; points missing from the cycles are fixed.
    pub fn from_cycles(n: usize, cycles: &[Vec<u32>]) -> Result<Self> {
        let mut images: Vec<u32> = (0..n as u32).collect();
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                let y = cycle[(k + 1) % cycle.len()];
                if x as usize >= n || y as usize >= n {
                    return Err(Error::Io(format!("cycle point out of range 0..{n}")));
                }
                images[x as usize] = y;
            }
        }
        Perm::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.0[x as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &y)| i as u32 == y)
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&y| other.0[y as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (x, &y) in self.0.iter().enumerate() {
            inv[y as usize] = x as u32;
        }
        Perm(inv)
    }

    pub fn order(&self) -> u64 {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut ord: u64 = 1;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len: u64 = 0;
            let mut x = start as u32;
            while !seen[x as usize] {
                seen[x as usize] = true;
                x = self.apply(x);
                len += 1;
            }
            ord = lcm(ord, len);
        }
        ord
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl std::fmt::Debug for Perm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.cycle_string())
    }
}

impl Perm {
    /// Disjoint-cycle string, fixed points omitted; identity prints as `()`.
    pub fn cycle_string(&self) -> String {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 0..n {
            if seen[start] || self.0[start] as usize == start {
                seen[start] = true;
                continue;
            }
            out.push('(');
            let mut x = start as u32;
            let mut first = true;
            while !seen[x as usize] {
                seen[x as usize] = true;
                if !first {
                    out.push(',');
                }
                out.push_str(&x.to_string());
                first = false;
                x = self.apply(x);
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

/// Parse one or more cycles like `(0,1,2)(3,4)` into a permutation of 0..n-1.
pub fn parse_cycles(n: usize, text: &str) -> Result<Perm> {
    let mut cycles = Vec::new();
    let mut rest = text.trim();
    if rest == "()" {
        return Ok(Perm::identity(n));
    }
    while !rest.is_empty() {
        if !rest.starts_with('(') {
            return Err(Error::Io(format!("expected '(' in cycle notation: {text}")));
        }
        let close = rest
            .find(')')
            .ok_or_else(|| Error::Io(format!("unclosed cycle in: {text}")))?;
        let body = &rest[1..close];
        let cycle: Result<Vec<u32>> = body
            .split(/* allow both separators */ |c| c == ',' || c == ' ')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<u32>()
                    .map_err(|_| Error::Io(format!("bad point '{s}' in cycle")))
            })
            .collect();
        cycles.push(cycle?);
        rest = rest[close + 1..].trim_start();
    }
    Perm::from_cycles(n, &cycles)
}

/// A permutation group on {0, .., degree-1} given by generators.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
}

impl PermGroup {
    pub fn new(degree: usize, gens: Vec<Perm>) -> Self {
        let gens = gens.into_iter().filter(|g| !g.is_identity()).collect();
        PermGroup { degree, gens }
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            gens: Vec::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn gens(&self) -> &[Perm] {
        &self.gens
    }

    pub fn orbit(&self, start: u32) -> Vec<u32> {
        let mut seen = vec![false; self.degree];
        let mut orbit = vec![start];
        seen[start as usize] = true;
        let mut head = 0;
        while head < orbit.len() {
            let x = orbit[head];
            head += 1;
            for g in &self.gens {
                let y = g.apply(x);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    orbit.push(y);
                }
            }
        }
        orbit
    }

    /// Orbit ids per point, numbered by least point in each orbit.
    pub fn orbit_partition(&self) -> (Vec<u32>, usize) {
        let mut id = vec![u32::MAX; self.degree];
        let mut count = 0;
        for start in 0..self.degree as u32 {
            if id[start as usize] != u32::MAX {
                continue;
            }
            for p in self.orbit(start) {
                id[p as usize] = count;
            }
            count += 1;
        }
        (id, count as usize)
    }

    pub fn is_transitive(&self) -> bool {
        self.degree <= 1 || self.orbit(0).len() == self.degree
    }

    /// True iff `points` is a single orbit of the group (as a set).
    pub fn transitive_on(&self, points: &[u32]) -> bool {
        if points.is_empty() {
            return true;
        }
        let orbit = self.orbit(points[0]);
        if orbit.len() != points.len() {
            return false;
        }
        let mut inside = vec![false; self.degree];
        for &p in points {
            inside[p as usize] = true;
        }
        orbit.iter().all(|&p| inside[p as usize])
    }

    /// Orbits on ordered pairs. Returns (pair -> orbital id, orbital count);
    /// pair (x,y) is indexed x*degree+y and ids follow first appearance in
    /// row-major order.
    pub fn orbitals(&self) -> (Vec<u32>, usize) {
        let n = self.degree;
        let mut uf = UnionFind::new(n * n);
        for g in &self.gens {
            for x in 0..n {
                let gx = g.apply(x as u32) as usize;
                for y in 0..n {
                    let gy = g.apply(y as u32) as usize;
                    uf.union(x * n + y, gx * n + gy);
                }
            }
        }
        let mut id = vec![u32::MAX; n * n];
        let mut count = 0u32;
        for p in 0..n * n {
            let root = uf.find(p);
            if id[root] == u32::MAX {
                id[root] = count;
                count += 1;
            }
            id[p] = id[root];
        }
        (id, count as usize)
    }

    /// Deterministic Schreier-Sims. `base_hint` points are preferred, in
    /// order, when new base points are needed.
    pub fn stab_chain(&self, base_hint: &[u32]) -> StabChain {
        let mut chain = StabChain {
            degree: self.degree,
            levels: Vec::new(),
            base_hint: base_hint.to_vec(),
        };
        for g in &self.gens {
            chain.add_generator(0, g.clone());
        }
        chain
    }

    /// Schreier-Sims with the given points forced as the leading base, so
    /// `stabilizer_gens(k)` generates the pointwise stabilizer of
    /// `base[..k]` even when some generators fix those points.
    pub fn stab_chain_with_base(&self, base: &[u32]) -> StabChain {
        let mut chain = StabChain {
            degree: self.degree,
            levels: Vec::new(),
            base_hint: base.to_vec(),
        };
        for &p in base {
            chain.levels.push(Level::new(p, self.degree));
        }
        for g in &self.gens {
            chain.add_generator(0, g.clone());
        }
        chain
    }

    /// Generators of the stabilizer of one point.
    pub fn point_stabilizer(&self, point: u32) -> PermGroup {
        let chain = self.stab_chain_with_base(&[point]);
        PermGroup::new(self.degree, chain.stabilizer_gens(1))
    }

    pub fn order(&self) -> BigUint {
        self.stab_chain(&[]).order()
    }
}

/// A stabilizer chain: the group at level i is the stabilizer of the
/// first i base points, generated by the level's generator list.
pub struct StabChain {
    degree: usize,
    levels: Vec<Level>,
    base_hint: Vec<u32>,
}

struct Level {
    point: u32,
    gens: Vec<Perm>,
    /// transversal[q] maps `point` to q for q in the orbit.
    transversal: Vec<Option<Perm>>,
    orbit: Vec<u32>,
    sifted: std::collections::HashSet<Perm>,
}

impl Level {
    fn new(point: u32, degree: usize) -> Level {
        let mut transversal = vec![None; degree];
        transversal[point as usize] = Some(Perm::identity(degree));
        Level {
            point,
            gens: Vec::new(),
            transversal,
            orbit: vec![point],
            sifted: std::collections::HashSet::new(),
        }
    }
}

impl StabChain {
    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn order(&self) -> BigUint {
        let mut ord = BigUint::from(1u32);
        for level in &self.levels {
            ord *= BigUint::from(level.orbit.len());
        }
        ord
    }

    /// Generators of the stabilizer of the first `k` base points.
    pub fn stabilizer_gens(&self, k: usize) -> Vec<Perm> {
        if k >= self.levels.len() {
            return Vec::new();
        }
        self.levels[k].gens.clone()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        let (level, residue) = self.strip(g, 0);
        level == self.levels.len() && residue.is_identity()
    }

    fn strip(&self, g: &Perm, from: usize) -> (usize, Perm) {
        let mut h = g.clone();
        for (j, level) in self.levels.iter().enumerate().skip(from) {
            let img = h.apply(level.point);
            match &level.transversal[img as usize] {
                None => return (j, h),
                Some(t) => h = h.then(&t.inverse()),
            }
        }
        (self.levels.len(), h)
    }

    /// Add a generator known to fix the first `at` base points.
    fn add_generator(&mut self, at: usize, g: Perm) {
        if g.is_identity() {
            return;
        }
        let (stop, residue) = self.strip(&g, at);
        if residue.is_identity() {
            return;
        }
        if stop == self.levels.len() {
            let point = self.pick_base_point(&residue);
            self.levels.push(Level::new(point, self.degree));
        }
        // the residue fixes base[0..stop], so it belongs to every level
        // from `at` through `stop`
        for lvl in at..=stop {
            self.levels[lvl].gens.push(residue.clone());
        }
        for lvl in (at..=stop).rev() {
            self.rebuild_orbit(lvl);
        }
        for lvl in at..=stop {
            self.sift_schreier_generators(lvl);
        }
    }

    fn pick_base_point(&self, g: &Perm) -> u32 {
        for &p in &self.base_hint {
            if g.apply(p) != p {
                return p;
            }
        }
        (0..self.degree as u32)
            .find(|&p| g.apply(p) != p)
            .expect("non-identity permutation moves some point")
    }

    fn rebuild_orbit(&mut self, level: usize) {
        let point = self.levels[level].point;
        let gens = self.levels[level].gens.clone();
        let mut transversal: Vec<Option<Perm>> = vec![None; self.degree];
        let mut orbit = vec![point];
        transversal[point as usize] = Some(Perm::identity(self.degree));
        let mut head = 0;
        while head < orbit.len() {
            let q = orbit[head];
            head += 1;
            for g in &gens {
                let r = g.apply(q);
                if transversal[r as usize].is_none() {
                    let t = transversal[q as usize].as_ref().unwrap().then(g);
                    transversal[r as usize] = Some(t);
                    orbit.push(r);
                }
            }
        }
        self.levels[level].orbit = orbit;
        self.levels[level].transversal = transversal;
    }

    fn sift_schreier_generators(&mut self, level: usize) {
        let gens = self.levels[level].gens.clone();
        let orbit = self.levels[level].orbit.clone();
        for &q in &orbit {
            for g in &gens {
                let tq = self.levels[level].transversal[q as usize]
                    .as_ref()
                    .unwrap()
                    .clone();
                let r = g.apply(q);
                let tr = self.levels[level].transversal[r as usize]
                    .as_ref()
                    .unwrap()
                    .clone();
                let schreier = tq.then(g).then(&tr.inverse());
                if schreier.is_identity() || !self.levels[level].sifted.insert(schreier.clone()) {
                    continue;
                }
                self.add_generator(level + 1, schreier);
            }
        }
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let p = self.parent[x] as usize;
            self.parent[x] = self.parent[p];
            x = p;
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo as u32;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(n: usize) -> PermGroup {
        let shift = Perm::from_images((0..n as u32).map(|x| (x + 1) % n as u32).collect()).unwrap();
        PermGroup::new(n, vec![shift])
    }

    fn symmetric(n: usize) -> PermGroup {
        let swap = Perm::from_cycles(n, &[vec![0, 1]]).unwrap();
        let cycle = Perm::from_images((0..n as u32).map(|x| (x + 1) % n as u32).collect()).unwrap();
        PermGroup::new(n, vec![swap, cycle])
    }

    #[test]
    fn compose_and_invert() {
        let a = Perm::from_cycles(4, &[vec![0, 1, 2]]).unwrap();
        let b = Perm::from_cycles(4, &[vec![2, 3]]).unwrap();
        let ab = a.then(&b);
        assert_eq!(ab.apply(0), 1);
        assert_eq!(ab.apply(1), 3);
        assert!(a.then(&a.inverse()).is_identity());
        assert_eq!(a.order(), 3);
    }

    #[test]
    fn orders_via_stab_chain() {
        assert_eq!(cyclic(7).order(), BigUint::from(7u32));
        assert_eq!(symmetric(5).order(), BigUint::from(120u32));
        assert_eq!(symmetric(8).order(), BigUint::from(40320u32));
        assert_eq!(PermGroup::trivial(5).order(), BigUint::from(1u32));
    }

    #[test]
    fn stabilizer_of_first_base_point() {
        let chain = symmetric(5).stab_chain(&[0]);
        assert_eq!(chain.base()[0], 0);
        let stab = PermGroup::new(5, chain.stabilizer_gens(1));
        assert_eq!(stab.order(), BigUint::from(24u32));
        assert!(stab.gens().iter().all(|g| g.apply(0) == 0));
    }

    #[test]
    fn forced_base_stabilizer() {
        // C7 x a 2-cycle on disjoint points: generator fixes point 7
        let g = PermGroup::new(
            9,
            vec![
                Perm::from_cycles(9, &[vec![0, 1, 2, 3, 4, 5, 6]]).unwrap(),
                Perm::from_cycles(9, &[vec![7, 8]]).unwrap(),
            ],
        );
        // the plain chain would not pick 7 as base[0] since the first
        // generator fixes it; the forced chain must
        let stab = g.point_stabilizer(7);
        assert_eq!(stab.order(), BigUint::from(7u32));
        let stab0 = g.point_stabilizer(0);
        assert_eq!(stab0.order(), BigUint::from(2u32));
        assert_eq!(g.order(), BigUint::from(14u32));
    }

    #[test]
    fn membership() {
        let chain = symmetric(4).stab_chain(&[]);
        assert!(chain.contains(&Perm::from_cycles(4, &[vec![0, 3, 1]]).unwrap()));
        let c5 = cyclic(5).stab_chain(&[]);
        assert!(!c5.contains(&Perm::from_cycles(5, &[vec![0, 1]]).unwrap()));
    }

    #[test]
    fn orbitals_of_cyclic_group() {
        let (ids, count) = cyclic(3).orbitals();
        assert_eq!(count, 3);
        // diagonal is one orbital
        assert_eq!(ids[0], ids[4]);
        assert_eq!(ids[0], ids[8]);
    }

    #[test]
    fn orbitals_of_trivial_group() {
        let (_, count) = PermGroup::trivial(4).orbitals();
        assert_eq!(count, 16);
    }

    #[test]
    fn cycle_parsing() {
        let p = parse_cycles(6, "(0,1,2)(3 4)").unwrap();
        assert_eq!(p.apply(0), 1);
        assert_eq!(p.apply(4), 3);
        assert_eq!(p.apply(5), 5);
        assert_eq!(p.cycle_string(), "(0,1,2)(3,4)");
        assert!(parse_cycles(3, "(0,9)").is_err());
    }
}
