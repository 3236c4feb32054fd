use ascheme::construct::*;
use ascheme::enumerate::{canonical_form, enumerate_schemes, EnumOptions};
use ascheme::group::FiniteGroup;
use ascheme::perm::{parse_cycles, PermGroup};
use ascheme::Scheme;
use std::collections::BTreeSet;

fn main() {
    let n = 10usize;
    let enumerated: BTreeSet<Vec<u16>> = enumerate_schemes(n, &EnumOptions::default())
        .iter()
        .map(canonical_form)
        .collect();
    println!("enumerated: {}", enumerated.len());

    let mut witnesses: Vec<(String, Scheme)> = Vec::new();
    let z10 = FiniteGroup::cyclic(10);
    let c2 = thin_scheme(&FiniteGroup::cyclic(2));
    let c5 = thin_scheme(&FiniteGroup::cyclic(5));
    witnesses.push(("thin Z10".into(), thin_scheme(&z10)));
    witnesses.push(("C2 wr C5".into(), wreath(&c2, &c5)));
    witnesses.push(("C5 wr C2".into(), wreath(&c5, &c2)));
    // fusions of Z10 by subgroups of Aut = C4 = <3>
    for m in [vec![vec![3u32]], vec![vec![9u32]], vec![vec![7u32]]] {
        let a = z10.matrix_endomorphism(&m).unwrap();
        witnesses.push((format!("Z10 fused by {m:?}"), fusion_from_automorphisms(&z10, &[a]).unwrap()));
    }
    // petersen via A5 on pairs: generators of S5 acting on 2-subsets
    // pairs ordered: (0,1),(0,2),(0,3),(0,4),(1,2),(1,3),(1,4),(2,3),(2,4),(3,4)
    let pairs: Vec<(u32, u32)> = (0..5u32).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
    let lift = |g: &ascheme::Perm| {
        let imgs: Vec<u32> = pairs
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (g.apply(a), g.apply(b));
                let (x, y) = if x < y { (x, y) } else { (y, x) };
                pairs.iter().position(|&p| p == (x, y)).unwrap() as u32
            })
            .collect();
        ascheme::Perm::from_images(imgs).unwrap()
    };
    let s5a = parse_cycles(5, "(0,1)").unwrap();
    let s5b = parse_cycles(5, "(0,1,2,3,4)").unwrap();
    let j52 = orbital_scheme(&PermGroup::new(10, vec![lift(&s5a), lift(&s5b)])).unwrap();
    witnesses.push(("J(5,2)".into(), j52));
    // dihedral D10 of degree 10 (rotation + reflection)
    let rot = parse_cycles(10, "(0,1,2,3,4,5,6,7,8,9)").unwrap();
    let refl = parse_cycles(10, "(1,9)(2,8)(3,7)(4,6)").unwrap();
    witnesses.push((
        "orbital D10".into(),
        orbital_scheme(&PermGroup::new(10, vec![rot.clone(), refl])).unwrap(),
    ));
    // PGL(2,9)-ish? skip; try C10 x flip fusions etc.
    let d5 = {
        // dihedral group of order 10 as a mul table via symmetric embedding
        // elements: r^i, r^i s  (i<5);  use semidirect Z5 x Z2
        let mut mul = vec![0u16; 100];
        let idx = |i: usize, j: usize| (i + 5 * j) as u16;
        for i in 0..5 {
            for j in 0..2 {
                for k in 0..5 {
                    for l in 0..2 {
                        // (r^i s^j)(r^k s^l) = r^(i + k*(-1)^j) s^(j+l)
                        let kk = if j == 1 { (5 - k) % 5 } else { k };
                        let a = idx(i, j);
                        let b = idx(k, l);
                        mul[a as usize * 10 + b as usize] = idx((i + kk) % 5, (j + l) % 2);
                    }
                }
            }
        }
        FiniteGroup::from_mul_table(10, mul).unwrap()
    };
    witnesses.push(("thin D5".into(), thin_scheme(&d5)));
    witnesses.push((
        "orbital regular D5".into(),
        orbital_scheme(&regular_representation(&d5)).unwrap(),
    ));

    let mut missing = 0;
    let mut seen = BTreeSet::new();
    for (name, s) in &witnesses {
        let c = canonical_form(s);
        let inside = enumerated.contains(&c);
        seen.insert(c);
        if !inside {
            missing += 1;
            println!("MISSING from enumeration: {name} (rank {})", s.rank());
        }
    }
    println!("witness classes: {}, missing: {missing}", seen.len());
}
