use crate::error::{Error, Result};
use crate::relset::RelSet;

pub const MAX_POINTS: usize = 10_000;
pub const MAX_RANK: usize = 255;

/// A validated association scheme on points {0, .., n-1}.
///
/// Relations are small integers; relation 0 is always the diagonal. The
/// color matrix, converse map, valencies and the full intersection-number
/// tensor are fixed at construction, so a `Scheme` is immutable and all
/// queries are pure reads.
#[derive(Clone)]
pub struct Scheme {
    n: usize,
    rank: usize,
    color: Vec<u16>,
    converse: Vec<u16>,
    valency: Vec<u32>,
    tensor: Vec<u32>,
}

impl PartialEq for Scheme {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.color == other.color
    }
}
impl Eq for Scheme {}

impl std::fmt::Debug for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Scheme(n={}, rank={})", self.n, self.rank)
    }
}

impl Scheme {
    /// Validate a flat row-major color matrix and build the scheme.
    ///
    /// Checks, in order: dimensions, relation-index usage, the diagonal
    /// axiom, the converse axiom, and constancy of all intersection
    /// numbers. The first violated axiom is reported with a witness; the
    /// intersection-number check reports the lexicographically first
    /// violated triple (s,t,u).
    pub fn from_flat(n: usize, color: Vec<u16>) -> Result<Scheme> {
        if n == 0 || color.len() != n * n {
            return Err(Error::BadDimensions);
        }
        if n > MAX_POINTS {
            return Err(Error::TooLarge(n));
        }
        let rank = color.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        if rank > MAX_RANK {
            return Err(Error::TooManyRelations(rank));
        }

        let mut used = vec![false; rank];
        for &c in &color {
            used[c as usize] = true;
        }
        if let Some(s) = used.iter().position(|&u| !u) {
            return Err(Error::EmptyRelation(s as u16));
        }

        // Axiom (i): relation 0 is exactly the diagonal.
        for x in 0..n {
            for y in 0..n {
                let c = color[x * n + y];
                if (x == y) != (c == 0) {
                    return Err(Error::NotAPartitionOfDiagonal { x, y });
                }
            }
        }

        // Axiom (ii): the transpose color depends only on the color.
        let mut converse = vec![u16::MAX; rank];
        let mut first_pair = vec![(0usize, 0usize); rank];
        for x in 0..n {
            for y in 0..n {
                let s = color[x * n + y] as usize;
                let t = color[y * n + x];
                if converse[s] == u16::MAX {
                    converse[s] = t;
                    first_pair[s] = (x, y);
                } else if converse[s] != t {
                    let (fx, fy) = first_pair[s];
                    return Err(Error::NoConverse {
                        s: s as u16,
                        x: fx,
                        y: fy,
                        t1: converse[s],
                        x2: x,
                        y2: y,
                        t2: t,
                    });
                }
            }
        }

        // Axiom (iii): intersection numbers are constant per (s,t,u).
        // The tensor is filled from the first pair of each color, then every
        // other pair is recounted against it.
        let mut tensor = vec![0u32; rank * rank * rank];
        let mut ref_pair: Vec<Option<(usize, usize)>> = vec![None; rank];
        let mut support: Vec<Vec<(u16, u16)>> = vec![Vec::new(); rank];
        for x in 0..n {
            for y in 0..n {
                let u = color[x * n + y] as usize;
                if ref_pair[u].is_none() {
                    ref_pair[u] = Some((x, y));
                    for z in 0..n {
                        let s = color[x * n + z] as usize;
                        let t = color[z * n + y] as usize;
                        let idx = (s * rank + t) * rank + u;
                        if tensor[idx] == 0 {
                            support[u].push((s as u16, t as u16));
                        }
                        tensor[idx] += 1;
                    }
                    support[u].sort_unstable();
                }
            }
        }

        let mut scratch = vec![0u32; rank * rank];
        let mut touched: Vec<usize> = Vec::with_capacity(n);
        // best violation ordered by (s,t,u)
        let mut best: Option<Error> = None;
        let mut best_key = (u16::MAX, u16::MAX, u16::MAX);
        for x in 0..n {
            for y in 0..n {
                let u = color[x * n + y] as usize;
                if ref_pair[u] == Some((x, y)) {
                    continue;
                }
                touched.clear();
                for z in 0..n {
                    let s = color[x * n + z] as usize;
                    let t = color[z * n + y] as usize;
                    let idx = s * rank + t;
                    if scratch[idx] == 0 {
                        touched.push(idx);
                    }
                    scratch[idx] += 1;
                }
                let mut mismatch = false;
                for &idx in &touched {
                    if scratch[idx] != tensor[idx * rank + u] {
                        mismatch = true;
                    }
                }
                if mismatch || touched.len() != support[u].len() {
                    let (rx, ry) = ref_pair[u].unwrap();
                    // walk both supports to find the lex-least differing (s,t)
                    for &(s, t) in &support[u] {
                        let idx = s as usize * rank + t as usize;
                        let c2 = scratch[idx];
                        let c1 = tensor[idx * rank + u];
                        if c1 != c2 {
                            consider_violation(
                                &mut best,
                                &mut best_key,
                                s,
                                t,
                                u as u16,
                                rx,
                                ry,
                                c1,
                                x,
                                y,
                                c2,
                            );
                            break;
                        }
                    }
                    let mut extra: Vec<usize> = touched
                        .iter()
                        .copied()
                        .filter(|&idx| tensor[idx * rank + u] == 0)
                        .collect();
                    extra.sort_unstable();
                    if let Some(&idx) = extra.first() {
                        let s = (idx / rank) as u16;
                        let t = (idx % rank) as u16;
                        let (rx, ry) = ref_pair[u].unwrap();
                        consider_violation(
                            &mut best,
                            &mut best_key,
                            s,
                            t,
                            u as u16,
                            rx,
                            ry,
                            0,
                            x,
                            y,
                            scratch[idx],
                        );
                    }
                }
                for &idx in &touched {
                    scratch[idx] = 0;
                }
            }
        }
        if let Some(err) = best {
            return Err(err);
        }

        let valency: Vec<u32> = (0..rank)
            .map(|s| tensor[(s * rank + converse[s] as usize) * rank])
            .collect();
        debug_assert_eq!(valency.iter().map(|&v| v as u64).sum::<u64>(), n as u64);

        Ok(Scheme {
            n,
            rank,
            color,
            converse,
            valency,
            tensor,
        })
    }

    pub fn from_matrix(rows: &[Vec<u16>]) -> Result<Scheme> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::BadDimensions);
        }
        let flat: Vec<u16> = rows.iter().flatten().copied().collect();
        Scheme::from_flat(n, flat)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    #[inline]
    pub fn color(&self, x: u32, y: u32) -> u16 {
        self.color[x as usize * self.n + y as usize]
    }

    pub fn color_matrix(&self) -> &[u16] {
        &self.color
    }

    pub fn converse(&self, s: u16) -> u16 {
        self.converse[s as usize]
    }

    pub fn valency(&self, s: u16) -> u32 {
        self.valency[s as usize]
    }

    pub fn relations(&self) -> impl Iterator<Item = u16> {
        0..self.rank as u16
    }

    pub fn all_relations(&self) -> RelSet {
        RelSet::full(self.rank)
    }

    /// The intersection number a_{stu} = |xs ∩ yt*| for any (x,y) in u.
    #[inline]
    pub fn intersection_number(&self, s: u16, t: u16, u: u16) -> u32 {
        self.tensor[(s as usize * self.rank + t as usize) * self.rank + u as usize]
    }

    /// Sum of valencies over a relation set.
    pub fn set_order(&self, rels: &RelSet) -> u64 {
        rels.iter().map(|s| self.valency[s as usize] as u64).sum()
    }

    /// Points y with (x,y) in s.
    pub fn points_in(&self, x: u32, s: u16) -> Vec<u32> {
        let row = &self.color[x as usize * self.n..(x as usize + 1) * self.n];
        row.iter()
            .enumerate()
            .filter(|&(_, &c)| c == s)
            .map(|(y, _)| y as u32)
            .collect()
    }

    /// For a thin relation t, the unique point y with (x,y) in t.
    pub fn thin_step(&self, x: u32, t: u16) -> u32 {
        debug_assert_eq!(self.valency[t as usize], 1);
        let row = &self.color[x as usize * self.n..(x as usize + 1) * self.n];
        row.iter()
            .position(|&c| c == t)
            .expect("thin relation has an image in every row") as u32
    }

    /// Complex product {u : a_pqu != 0 for some p in P, q in Q}.
    pub fn complex_product(&self, p: &RelSet, q: &RelSet) -> Result<RelSet> {
        if p.is_empty() || q.is_empty() {
            return Err(Error::EmptyFactor);
        }
        let mut out = RelSet::empty();
        for s in p.iter() {
            for t in q.iter() {
                for u in 0..self.rank as u16 {
                    if self.intersection_number(s, t, u) != 0 {
                        out.insert(u);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Complex product of two single relations.
    pub fn product(&self, s: u16, t: u16) -> RelSet {
        let mut out = RelSet::empty();
        for u in 0..self.rank as u16 {
            if self.intersection_number(s, t, u) != 0 {
                out.insert(u);
            }
        }
        out
    }

    /// 0/1 adjacency matrix of relation s, row-major.
    pub fn adjacency_matrix(&self, s: u16) -> Vec<u8> {
        self.color
            .iter()
            .map(|&c| if c == s { 1 } else { 0 })
            .collect()
    }

    /// True iff a_{stu} = a_{tsu} for all triples.
    pub fn is_commutative(&self) -> bool {
        let r = self.rank;
        for s in 0..r {
            for t in 0..s {
                for u in 0..r {
                    if self.tensor[(s * r + t) * r + u] != self.tensor[(t * r + s) * r + u] {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.rank as u16).all(|s| self.converse[s as usize] == s)
    }

    /// True iff |X| and every valency are powers of the prime p.
    pub fn is_p_scheme(&self, p: u32) -> bool {
        is_prime(p)
            && is_power_of(self.n as u64, p as u64)
            && self.valency.iter().all(|&v| is_power_of(v as u64, p as u64))
    }

    pub fn check_basic_identities(&self) -> BasicIdentityReport {
        let r = self.rank as u16;
        let mut report = BasicIdentityReport::default();

        'one: for u in 0..r {
            for v in 0..r {
                let expect = if u == v { self.valency(u) } else { 0 };
                if self.intersection_number(self.converse(u), v, 0) != expect {
                    report.identity_element = Some((u, v, 0));
                    break 'one;
                }
            }
        }

        'two: for u in 0..r {
            for v in 0..r {
                for w in 0..r {
                    if self.intersection_number(u, v, w)
                        != self.intersection_number(
                            self.converse(v),
                            self.converse(u),
                            self.converse(w),
                        )
                    {
                        report.converse_symmetry = Some((u, v, w));
                        break 'two;
                    }
                }
            }
        }

        'three: for u in 0..r {
            for v in 0..r {
                for w in 0..r {
                    let a = self.intersection_number(u, v, self.converse(w)) as u64
                        * self.valency(w) as u64;
                    let b = self.intersection_number(v, w, self.converse(u)) as u64
                        * self.valency(u) as u64;
                    let c = self.intersection_number(w, u, self.converse(v)) as u64
                        * self.valency(v) as u64;
                    if a != b || b != c {
                        report.triple_rotation = Some((u, v, w));
                        break 'three;
                    }
                }
            }
        }

        'four: for u in 0..r {
            for v in 0..r {
                let total: u64 = (0..r)
                    .map(|s| self.intersection_number(u, v, s) as u64 * self.valency(s) as u64)
                    .sum();
                if total != self.valency(u) as u64 * self.valency(v) as u64 {
                    report.valency_product = Some((u, v, 0));
                    break 'four;
                }
            }
        }

        'five: for u in 0..r {
            for v in 0..r {
                let l = lcm(self.valency(u) as u64, self.valency(v) as u64);
                for w in 0..r {
                    let prod = self.intersection_number(u, v, w) as u64 * self.valency(w) as u64;
                    if prod % l != 0 {
                        report.lcm_divides = Some((u, v, w));
                        break 'five;
                    }
                }
            }
        }

        'six: for u in 0..r {
            for v in 0..r {
                let g = gcd(self.valency(u) as u64, self.valency(v) as u64);
                if g < self.product(u, v).len() as u64 {
                    report.gcd_bounds_product = Some((u, v, 0));
                    break 'six;
                }
            }
        }

        report
    }
}

/// Outcome of the six standard intersection-number identities. Each field
/// is `None` on success, or the first violating triple.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct BasicIdentityReport {
    pub identity_element: Option<(u16, u16, u16)>,
    pub converse_symmetry: Option<(u16, u16, u16)>,
    pub triple_rotation: Option<(u16, u16, u16)>,
    pub valency_product: Option<(u16, u16, u16)>,
    pub lcm_divides: Option<(u16, u16, u16)>,
    pub gcd_bounds_product: Option<(u16, u16, u16)>,
}

impl BasicIdentityReport {
    pub fn all_pass(&self) -> bool {
        self.identity_element.is_none()
            && self.converse_symmetry.is_none()
            && self.triple_rotation.is_none()
            && self.valency_product.is_none()
            && self.lcm_divides.is_none()
            && self.gcd_bounds_product.is_none()
    }
}

#[allow(clippy::too_many_arguments)]
fn consider_violation(
    best: &mut Option<Error>,
    best_key: &mut (u16, u16, u16),
    s: u16,
    t: u16,
    u: u16,
    x: usize,
    y: usize,
    c1: u32,
    x2: usize,
    y2: usize,
    c2: u32,
) {
    let key = (s, t, u);
    if key < *best_key {
        *best_key = key;
        *best = Some(Error::NonConstantIntersection {
            s,
            t,
            u,
            x,
            y,
            c1,
            x2,
            y2,
            c2,
        });
    }
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn is_power_of(mut v: u64, p: u64) -> bool {
    if v == 0 {
        return false;
    }
    while v % p == 0 {
        v /= p;
    }
    v == 1
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Thin scheme of the cyclic group: color(x,y) = (y-x) mod n.
    pub fn cyclic_thin(n: usize) -> Scheme {
        let mut color = vec![0u16; n * n];
        for x in 0..n {
            for y in 0..n {
                color[x * n + y] = ((y + n - x) % n) as u16;
            }
        }
        Scheme::from_flat(n, color).unwrap()
    }

    /// Rank-2 scheme: diagonal plus everything else.
    pub fn rank2(n: usize) -> Scheme {
        let mut color = vec![1u16; n * n];
        for x in 0..n {
            color[x * n + x] = 0;
        }
        Scheme::from_flat(n, color).unwrap()
    }

    #[test]
    fn cyclic_c3_is_valid() {
        let s = cyclic_thin(3);
        assert_eq!(s.rank(), 3);
        assert_eq!(s.n(), 3);
        assert!(s.relations().all(|r| s.valency(r) == 1));
        assert_eq!(s.converse(1), 2);
        assert!(s.is_commutative());
    }

    #[test]
    fn rank2_is_valid() {
        let s = rank2(4);
        assert_eq!(s.rank(), 2);
        assert_eq!(s.valency(0), 1);
        assert_eq!(s.valency(1), 3);
        // a_{111} = n - 2 on the rank-2 scheme
        assert_eq!(s.intersection_number(1, 1, 1), 2);
        assert_eq!(rank2(5).intersection_number(1, 1, 1), 3);
    }

    #[test]
    fn thin_scheme_products_follow_the_group() {
        let s = cyclic_thin(5);
        for a in 0..5u16 {
            for b in 0..5u16 {
                for u in 0..5u16 {
                    let expect = if (a + b) % 5 == u { 1 } else { 0 };
                    assert_eq!(s.intersection_number(a, b, u), expect);
                }
            }
        }
    }

    #[test]
    fn broken_cell_is_rejected_with_witness() {
        // mutate one off-diagonal cell of the C3 thin matrix
        let mut color = cyclic_thin(3).color_matrix().to_vec();
        color[1] = 2; // (0,1) was 1
        let err = Scheme::from_flat(3, color).unwrap_err();
        match err {
            Error::NoConverse { .. } | Error::NonConstantIntersection { .. } => {}
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn diagonal_violations_rejected() {
        assert_eq!(
            Scheme::from_flat(2, vec![0, 1, 1, 1]).unwrap_err(),
            Error::NotAPartitionOfDiagonal { x: 1, y: 1 }
        );
        assert_eq!(
            Scheme::from_flat(2, vec![0, 0, 0, 0]).unwrap_err(),
            Error::NotAPartitionOfDiagonal { x: 0, y: 1 }
        );
    }

    #[test]
    fn unused_relation_index_rejected() {
        let err = Scheme::from_flat(2, vec![0, 3, 3, 0]).unwrap_err();
        assert_eq!(err, Error::EmptyRelation(1));
    }

    #[test]
    fn direct_recount_matches_tensor() {
        for s in [cyclic_thin(6), rank2(7)] {
            let n = s.n() as u32;
            for x in 0..n {
                for y in 0..n {
                    let u = s.color(x, y);
                    for a in s.relations() {
                        for b in s.relations() {
                            let count = (0..n)
                                .filter(|&z| s.color(x, z) == a && s.color(z, y) == b)
                                .count() as u32;
                            assert_eq!(count, s.intersection_number(a, b, u));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn complex_products() {
        let s = rank2(4);
        let e = RelSet::singleton(0);
        let r = RelSet::singleton(1);
        assert_eq!(s.complex_product(&e, &r).unwrap(), r);
        // {1}{1} = {0,1} on at least 4 points
        assert_eq!(s.complex_product(&r, &r).unwrap(), RelSet::full(2));
        assert_eq!(
            s.complex_product(&RelSet::empty(), &r).unwrap_err(),
            Error::EmptyFactor
        );
    }

    #[test]
    fn identities_pass_on_valid_schemes() {
        for s in [cyclic_thin(4), cyclic_thin(9), rank2(4), rank2(10)] {
            assert!(s.check_basic_identities().all_pass());
        }
    }

    #[test]
    fn adjacency_rows_sum_to_valency() {
        let s = rank2(5);
        let m = s.adjacency_matrix(1);
        for x in 0..5 {
            let sum: u32 = (0..5).map(|y| m[x * 5 + y] as u32).sum();
            assert_eq!(sum, s.valency(1));
        }
        assert_eq!(
            s.adjacency_matrix(0),
            vec![
                1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1u8
            ]
        );
    }

    #[test]
    fn p_scheme_detection() {
        assert!(cyclic_thin(9).is_p_scheme(3));
        assert!(!rank2(6).is_p_scheme(2)); // 6 is not a power of 2
        assert!(!rank2(4).is_p_scheme(2)); // valency 3 is not a power of 2
        assert!(!cyclic_thin(4).is_p_scheme(6)); // 6 is not prime
    }
}
