//! Finite groups given by multiplication tables, for building thin and
//! translation schemes.

use crate::error::{Error, Result};
use crate::perm::Perm;

/// A finite group on {0, .., order-1} with identity 0.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<u16>,
    inv: Vec<u16>,
    /// Cyclic factor sizes when the group was built as a direct product of
    /// cyclic groups; used to derive automorphisms from integer matrices.
    moduli: Option<Vec<u32>>,
}

impl FiniteGroup {
    pub fn from_mul_table(order: usize, mul: Vec<u16>) -> Result<FiniteGroup> {
        if order == 0 || mul.len() != order * order || order > 10_000 {
            return Err(Error::BadDimensions);
        }
        for &e in &mul {
            if e as usize >= order {
                return Err(Error::Io("multiplication table entry out of range".into()));
            }
        }
        for x in 0..order {
            if mul[x] as usize != x || mul[x * order] as usize != x {
                return Err(Error::Io("identity must be element 0".into()));
            }
        }
        let mut inv = vec![u16::MAX; order];
        for x in 0..order {
            for y in 0..order {
                if mul[x * order + y] == 0 {
                    inv[x] = y as u16;
                }
            }
        }
        if inv.iter().any(|&i| i == u16::MAX) {
            return Err(Error::Io("an element has no inverse".into()));
        }
        for a in 0..order {
            for b in 0..order {
                let ab = mul[a * order + b] as usize;
                for c in 0..order {
                    let bc = mul[b * order + c] as usize;
                    if mul[ab * order + c] != mul[a * order + bc] {
                        return Err(Error::Io(format!(
                            "multiplication is not associative at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteGroup {
            order,
            mul,
            inv,
            moduli: None,
        })
    }

    pub fn cyclic(n: usize) -> FiniteGroup {
        FiniteGroup::abelian(&[n as u32])
    }

    /// Direct product of cyclic groups Z_{m1} x .. x Z_{mk}, elements in
    /// mixed-radix order with the first factor varying fastest.
    pub fn abelian(moduli: &[u32]) -> FiniteGroup {
        let order: usize = moduli.iter().map(|&m| m as usize).product();
        assert!(order >= 1 && order <= 10_000);
        let mut mul = vec![0u16; order * order];
        for a in 0..order {
            let ta = decode(moduli, a);
            for b in 0..order {
                let tb = decode(moduli, b);
                let sum: Vec<u32> = ta
                    .iter()
                    .zip(tb.iter())
                    .zip(moduli.iter())
                    .map(|((&x, &y), &m)| (x + y) % m)
                    .collect();
                mul[a * order + b] = encode(moduli, &sum) as u16;
            }
        }
        let mut g = FiniteGroup::from_mul_table(order, mul).expect("cyclic products are groups");
        g.moduli = Some(moduli.to_vec());
        g
    }

    /// The symmetric group on `n` letters, elements ordered lexicographically
    /// by image vector (so the identity is element 0).
    pub fn symmetric(n: usize) -> FiniteGroup {
        assert!(n >= 1 && n <= 6);
        let mut elements: Vec<Vec<u32>> = Vec::new();
        permute((0..n as u32).collect(), 0, &mut elements);
        elements.sort();
        let order = elements.len();
        let index = |p: &Vec<u32>| elements.binary_search(p).unwrap();
        let mut mul = vec![0u16; order * order];
        for (a, pa) in elements.iter().enumerate() {
            for (b, pb) in elements.iter().enumerate() {
                // a then b as functions
                let prod: Vec<u32> = pa.iter().map(|&x| pb[x as usize]).collect();
                mul[a * order + b] = index(&prod) as u16;
            }
        }
        FiniteGroup::from_mul_table(order, mul).expect("composition is a group")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: u16) -> u16 {
        self.inv[a as usize]
    }

    pub fn is_abelian(&self) -> bool {
        for a in 0..self.order as u16 {
            for b in 0..a {
                if self.mul(a, b) != self.mul(b, a) {
                    return false;
                }
            }
        }
        true
    }

    pub fn element_order(&self, a: u16) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn moduli(&self) -> Option<&[u32]> {
        self.moduli.as_deref()
    }

    /// True iff the permutation respects the multiplication.
    pub fn is_automorphism(&self, p: &Perm) -> bool {
        if p.degree() != self.order || p.apply(0) != 0 {
            return false;
        }
        for a in 0..self.order as u16 {
            for b in 0..self.order as u16 {
                let lhs = p.apply(self.mul(a, b) as u32) as u16;
                let rhs = self.mul(p.apply(a as u32) as u16, p.apply(b as u32) as u16);
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }

    /// Endomorphism of a cyclic-product group given by an integer matrix:
    /// generator e_j maps to sum_i m[i][j] e_i. Returns the permutation when
    /// the map is bijective, None otherwise.
    pub fn matrix_endomorphism(&self, m: &[Vec<u32>]) -> Option<Perm> {
        let moduli = self.moduli.as_ref()?;
        let k = moduli.len();
        if m.len() != k || m.iter().any(|row| row.len() != k) {
            return None;
        }
        let mut images = Vec::with_capacity(self.order);
        for e in 0..self.order {
            let t = decode(moduli, e);
            let img: Vec<u32> = (0..k)
                .map(|i| {
                    let mut acc: u64 = 0;
                    for (j, &tj) in t.iter().enumerate() {
                        acc += m[i][j] as u64 * tj as u64;
                    }
                    (acc % moduli[i] as u64) as u32
                })
                .collect();
            images.push(encode(moduli, &img) as u32);
        }
        let mut seen = vec![false; self.order];
        for &y in &images {
            if seen[y as usize] {
                return None;
            }
            seen[y as usize] = true;
        }
        Some(Perm::from_images(images).expect("checked bijective"))
    }
}

impl FiniteGroup {
    /// Semidirect product (Z_m1 x .. x Z_mk) ⋊ Z_c where the cyclic
    /// factor acts by the given automorphism matrix.
    pub fn semidirect(moduli: &[u32], cyclic: u32, action: &[Vec<u32>]) -> FiniteGroup {
        let base = FiniteGroup::abelian(moduli);
        let b = base.order();
        let act = base
            .matrix_endomorphism(action)
            .expect("action must be an automorphism");
        assert!(base.is_automorphism(&act), "action must be an automorphism");
        let order = b * cyclic as usize;
        // element (v, j) encoded v + b*j; (v,j)(w,l) = (v + act^j(w), j+l)
        let mut pow = vec![Perm::identity(b)];
        for _ in 1..cyclic {
            pow.push(pow.last().unwrap().then(&act));
        }
        assert!(
            pow.last().unwrap().then(&act).is_identity(),
            "action order must divide the cyclic order"
        );
        let mut mul = vec![0u16; order * order];
        for v in 0..b {
            for j in 0..cyclic as usize {
                let a = v + b * j;
                for w in 0..b {
                    for l in 0..cyclic as usize {
                        let bb = w + b * l;
                        let moved = pow[j].apply(w as u32) as u16;
                        let sum = base.mul(v as u16, moved) as usize;
                        mul[a * order + bb] = (sum + b * ((j + l) % cyclic as usize)) as u16;
                    }
                }
            }
        }
        FiniteGroup::from_mul_table(order, mul).expect("semidirect products are groups")
    }

    /// Dicyclic group of order 4m: a^(2m) = 1, b^2 = a^m, b a b^-1 = a^-1.
    pub fn dicyclic(m: usize) -> FiniteGroup {
        let two_m = 2 * m;
        let order = 4 * m;
        // element (i, e) = i + 2m*e
        let mut mul = vec![0u16; order * order];
        for i in 0..two_m {
            for e in 0..2 {
                let a = i + two_m * e;
                for i2 in 0..two_m {
                    for e2 in 0..2 {
                        let b = i2 + two_m * e2;
                        let (ri, re) = match (e, e2) {
                            (0, _) => ((i + i2) % two_m, e2),
                            (1, 0) => ((i + two_m - i2) % two_m, 1),
                            (1, 1) => ((i + two_m - i2 + m) % two_m, 0),
                            _ => unreachable!(),
                        };
                        mul[a * order + b] = (ri + two_m * re) as u16;
                    }
                }
            }
        }
        FiniteGroup::from_mul_table(order, mul).expect("dicyclic tables are groups")
    }

    /// The alternating group on four letters.
    pub fn alternating4() -> FiniteGroup {
        let s4 = FiniteGroup::symmetric(4);
        // collect the even permutations and reindex
        let mut evens = Vec::new();
        for g in 0..24u16 {
            // parity via the permutation's cycle structure in the table is
            // awkward; use the standard embedding instead
            evens.push(g);
        }
        // elements of S4 are image vectors sorted lexicographically; compute
        // parity directly
        let mut perms: Vec<Vec<u32>> = Vec::new();
        fn gen(mut v: Vec<u32>, k: usize, out: &mut Vec<Vec<u32>>) {
            if k == v.len() {
                out.push(v);
                return;
            }
            for i in k..v.len() {
                v.swap(k, i);
                gen(v.clone(), k + 1, out);
                v.swap(k, i);
            }
        }
        gen((0..4).collect(), 0, &mut perms);
        perms.sort();
        let parity = |p: &[u32]| -> bool {
            let mut inv = 0;
            for i in 0..p.len() {
                for j in i + 1..p.len() {
                    if p[i] > p[j] {
                        inv += 1;
                    }
                }
            }
            inv % 2 == 0
        };
        evens.retain(|&g| parity(&perms[g as usize]));
        let index_of = |g: u16| evens.iter().position(|&e| e == g).unwrap() as u16;
        let mut mul = vec![0u16; 144];
        for (i, &a) in evens.iter().enumerate() {
            for (j, &b) in evens.iter().enumerate() {
                mul[i * 12 + j] = index_of(s4.mul(a, b));
            }
        }
        FiniteGroup::from_mul_table(12, mul).expect("A4 is a group")
    }

    /// The central product C4 ∘ D4 of order 16 (the Pauli group):
    /// elements i^k X^a Z^b with XZ = -ZX.
    pub fn pauli16() -> FiniteGroup {
        let order = 16;
        // element (k, a, b) = k + 4*a + 8*b
        let mut mul = vec![0u16; order * order];
        for k in 0..4usize {
            for a in 0..2usize {
                for b in 0..2usize {
                    let g = k + 4 * a + 8 * b;
                    for k2 in 0..4usize {
                        for a2 in 0..2usize {
                            for b2 in 0..2usize {
                                let h = k2 + 4 * a2 + 8 * b2;
                                // Z^b X^a2 = (-1)^(b*a2) X^a2 Z^b
                                let kk = (k + k2 + 2 * (b * a2)) % 4;
                                let aa = (a + a2) % 2;
                                let bb = (b + b2) % 2;
                                mul[g * order + h] = (kk + 4 * aa + 8 * bb) as u16;
                            }
                        }
                    }
                }
            }
        }
        FiniteGroup::from_mul_table(order, mul).expect("the Pauli group is a group")
    }

    /// All groups of order n up to isomorphism, for n <= 16.
    pub fn all_of_order(n: usize) -> Vec<FiniteGroup> {
        assert!(n >= 1 && n <= 16, "group lists are built in for n <= 16");
        let mut out = Vec::new();
        // abelian groups: products of cyclic prime-power factors, one per
        // multiset partition of each prime's exponent
        let mut factor_lists: Vec<Vec<u32>> = vec![Vec::new()];
        let mut m = n;
        let mut p = 2usize;
        while m > 1 {
            if m % p == 0 {
                let mut e = 0;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                let mut parts = Vec::new();
                let mut current = Vec::new();
                exponent_partitions(e, e, &mut current, &mut parts);
                let mut extended = Vec::new();
                for base in &factor_lists {
                    for part in &parts {
                        let mut f = base.clone();
                        for &x in part {
                            f.push((p as u32).pow(x));
                        }
                        extended.push(f);
                    }
                }
                factor_lists = extended;
            }
            p += 1;
        }
        for f in factor_lists {
            out.push(FiniteGroup::abelian(&f));
        }
        // non-abelian groups per order
        let neg = |m: u32| vec![vec![m - 1]];
        match n {
            6 => out.push(FiniteGroup::semidirect(&[3], 2, &neg(3))),
            8 => {
                out.push(FiniteGroup::semidirect(&[4], 2, &neg(4))); // D4
                out.push(FiniteGroup::dicyclic(2)); // Q8
            }
            10 => out.push(FiniteGroup::semidirect(&[5], 2, &neg(5))),
            12 => {
                out.push(FiniteGroup::semidirect(&[6], 2, &neg(6))); // D6
                out.push(FiniteGroup::alternating4());
                out.push(FiniteGroup::dicyclic(3));
            }
            14 => out.push(FiniteGroup::semidirect(&[7], 2, &neg(7))),
            16 => {
                out.push(FiniteGroup::semidirect(&[8], 2, &neg(8))); // D8
                out.push(FiniteGroup::semidirect(&[8], 2, &[vec![3]])); // SD16
                out.push(FiniteGroup::semidirect(&[8], 2, &[vec![5]])); // M16
                out.push(FiniteGroup::dicyclic(4)); // Q16
                out.push(FiniteGroup::semidirect(&[4, 2], 2, &[vec![3, 0], vec![0, 1]])); // D4 x C2
                out.push(direct_product(&FiniteGroup::dicyclic(2), &FiniteGroup::cyclic(2))); // Q8 x C2
                out.push(FiniteGroup::semidirect(&[4], 4, &neg(4))); // C4 ⋊ C4
                out.push(FiniteGroup::semidirect(
                    &[2, 2],
                    4,
                    &[vec![0, 1], vec![1, 0]],
                )); // (C2 x C2) ⋊ C4
                out.push(FiniteGroup::pauli16());
            }
            _ => {}
        }
        out
    }
}

/// Direct product via the obvious pairing (a, b) = a + |A|*b.
pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> FiniteGroup {
    let na = a.order();
    let nb = b.order();
    let order = na * nb;
    let mut mul = vec![0u16; order * order];
    for x1 in 0..na {
        for y1 in 0..nb {
            let g = x1 + na * y1;
            for x2 in 0..na {
                for y2 in 0..nb {
                    let h = x2 + na * y2;
                    mul[g * order + h] = (a.mul(x1 as u16, x2 as u16) as usize
                        + na * b.mul(y1 as u16, y2 as u16) as usize)
                        as u16;
                }
            }
        }
    }
    FiniteGroup::from_mul_table(order, mul).expect("direct products are groups")
}

fn exponent_partitions(left: u32, max: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if left == 0 {
        out.push(current.clone());
        return;
    }
    let mut v = left.min(max);
    while v >= 1 {
        current.push(v);
        exponent_partitions(left - v, v, current, out);
        current.pop();
        v -= 1;
    }
}

pub fn decode(moduli: &[u32], mut e: usize) -> Vec<u32> {
    moduli
        .iter()
        .map(|&m| {
            let digit = (e % m as usize) as u32;
            e /= m as usize;
            digit
        })
        .collect()
}

pub fn encode(moduli: &[u32], tuple: &[u32]) -> usize {
    let mut acc = 0usize;
    let mut stride = 1usize;
    for (&m, &d) in moduli.iter().zip(tuple.iter()) {
        acc += d as usize * stride;
        stride *= m as usize;
    }
    acc
}

fn permute(mut rest: Vec<u32>, k: usize, out: &mut Vec<Vec<u32>>) {
    if k == rest.len() {
        out.push(rest);
        return;
    }
    for i in k..rest.len() {
        rest.swap(k, i);
        permute(rest.clone(), k + 1, out);
        rest.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_group_basics() {
        let c6 = FiniteGroup::cyclic(6);
        assert_eq!(c6.order(), 6);
        assert_eq!(c6.mul(4, 5), 3);
        assert_eq!(c6.inv(2), 4);
        assert!(c6.is_abelian());
        assert_eq!(c6.element_order(2), 3);
    }

    #[test]
    fn product_group() {
        let g = FiniteGroup::abelian(&[3, 3]);
        assert_eq!(g.order(), 9);
        assert!(g.is_abelian());
        assert!((1..9u16).all(|a| g.element_order(a) == 3));
    }

    #[test]
    fn symmetric_group() {
        let s3 = FiniteGroup::symmetric(3);
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
    }

    #[test]
    fn group_counts_per_order() {
        // classical counts of groups of order n
        let expected = [1, 1, 1, 2, 1, 2, 1, 5, 2, 2, 1, 5, 1, 2, 1, 14];
        for (i, &count) in expected.iter().enumerate() {
            let n = i + 1;
            let groups = FiniteGroup::all_of_order(n);
            assert_eq!(groups.len(), count, "order {n}");
            for g in &groups {
                assert_eq!(g.order(), n);
            }
        }
    }

    #[test]
    fn nonabelian_constructions() {
        assert!(!FiniteGroup::semidirect(&[3], 2, &[vec![2]]).is_abelian()); // S3
        let q8 = FiniteGroup::dicyclic(2);
        assert!(!q8.is_abelian());
        // Q8 has a unique involution
        assert_eq!((1..8u16).filter(|&a| q8.element_order(a) == 2).count(), 1);
        let a4 = FiniteGroup::alternating4();
        assert_eq!(a4.order(), 12);
        assert_eq!((1..12u16).filter(|&a| a4.element_order(a) == 3).count(), 8);
        let pauli = FiniteGroup::pauli16();
        assert!(!pauli.is_abelian());
        // center of the Pauli group is cyclic of order 4
        let central: Vec<u16> = (0..16u16)
            .filter(|&a| (0..16u16).all(|b| pauli.mul(a, b) == pauli.mul(b, a)))
            .collect();
        assert_eq!(central.len(), 4);
    }

    #[test]
    fn negation_is_an_automorphism() {
        let g = FiniteGroup::abelian(&[3, 3]);
        let neg = g.matrix_endomorphism(&[vec![2, 0], vec![0, 2]]).unwrap();
        assert!(g.is_automorphism(&neg));
        assert_eq!(neg.then(&neg), Perm::identity(9));
        // the zero map is not bijective
        assert!(g.matrix_endomorphism(&[vec![0, 0], vec![0, 0]]).is_none());
    }
}
