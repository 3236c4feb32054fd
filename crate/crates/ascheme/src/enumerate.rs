//! Exhaustive isomorph-free enumeration of association schemes of small
//! order, and the canonical form used to deduplicate them.
//!
//! Generation runs per "type" (the nonincreasing valency sequence plus
//! the converse pairing structure): the first row is fixed to the sorted
//! pattern, the upper triangle is filled cell by cell under row/column
//! count bounds, and every completed row pins intersection numbers that
//! all later point pairs must reproduce. Completed matrices are already
//! valid schemes; they are reduced to canonical form and deduplicated.

use crate::perm::Perm;
use crate::scheme::Scheme;
use std::collections::BTreeSet;

/// Options restricting an enumeration run.
#[derive(Debug, Clone, Default)]
pub struct EnumOptions {
    /// Keep only types whose valencies are powers of this prime.
    pub p_valenced: Option<u32>,
    /// Skip the all-thin type (group tables), e.g. to add groups directly.
    pub skip_thin: bool,
    /// Keep only types with at most this many relations.
    pub max_rank: Option<usize>,
    /// Keep only types with exactly this many valency-1 relations.
    pub thin_count: Option<usize>,
    /// Print per-type progress to stderr.
    pub verbose: bool,
}

/// All association schemes on n points, one canonical representative per
/// isomorphism class, sorted by (rank, canonical matrix).
///
/// The all-thin type is not searched: thin schemes are exactly the group
/// tables, and the groups of each order up to 16 are built directly.
pub fn enumerate_schemes(n: usize, opts: &EnumOptions) -> Vec<Scheme> {
    let mut found: BTreeSet<(usize, Vec<u16>)> = BTreeSet::new();
    if !opts.skip_thin
        && n <= 16
        && opts.max_rank.map(|m| m >= n).unwrap_or(true)
        && opts.thin_count.map(|t| t == n).unwrap_or(true)
    {
        for g in crate::group::FiniteGroup::all_of_order(n) {
            let scheme = crate::construct::thin_scheme(&g);
            let canon = canonical_form(&scheme);
            found.insert((scheme.rank(), canon));
        }
    }
    for ty in enumerate_types(n, opts) {
        let label = format!("{:?}/conv {:?}", ty.valencies, ty.conv);
        let before = found.len();
        let mut filler = Filler::new(n, &ty);
        filler.run(&mut |matrix| {
            let scheme = Scheme::from_flat(n, matrix.to_vec())
                .expect("completed matrices satisfy the axioms");
            let canon = canonical_form(&scheme);
            found.insert((scheme.rank(), canon));
        });
        if opts.verbose {
            eprintln!(
                "type {label}: {} leaves, {} nodes, {} rowc, sigma {:?}, pairs {:?}, {} new classes",
                filler.leaves,
                filler.nodes,
                filler.row_completions,
                filler.sigma_time,
                filler.pair_time,
                found.len() - before
            );
        }
    }
    found
        .into_iter()
        .map(|(_, canon)| Scheme::from_flat(n, canon).expect("canonical forms are schemes"))
        .collect()
}

/// A valency sequence with its converse pairing. Color 0 is the diagonal.
#[derive(Debug, Clone)]
pub struct TypeSpec {
    /// valency per color 0..=d; valencies[0] = 1 and the rest nonincreasing.
    pub valencies: Vec<u32>,
    /// converse per color; self-paired or an adjacent partner of equal valency.
    pub conv: Vec<u16>,
}

fn enumerate_types(n: usize, opts: &EnumOptions) -> Vec<TypeSpec> {
    let mut parts = Vec::new();
    let mut current = Vec::new();
    partitions((n - 1) as u32, n as u32 - 1, &mut current, &mut parts);
    let mut out = Vec::new();
    for part in parts {
        if let Some(p) = opts.p_valenced {
            if !part.iter().all(|&v| is_power(v, p)) {
                continue;
            }
        }
        if let Some(max) = opts.max_rank {
            if part.len() + 1 > max {
                continue;
            }
        }
        if part.iter().all(|&v| v == 1) {
            // thin schemes are group tables; handled separately
            continue;
        }
        // the valency-1 relations form a closed subset (a group), whose
        // order divides the number of points
        let thin = 1 + part.iter().filter(|&&v| v == 1).count();
        if n % thin != 0 {
            continue;
        }
        if let Some(tc) = opts.thin_count {
            if thin != tc {
                continue;
            }
        }
        // converse structures per run of equal valencies: f self-paired
        // colors first, then adjacent transposed pairs
        let mut runs: Vec<(u32, usize)> = Vec::new();
        for &v in &part {
            match runs.last_mut() {
                Some((rv, m)) if *rv == v => *m += 1,
                _ => runs.push((v, 1)),
            }
        }
        let mut convs: Vec<Vec<u16>> = vec![vec![0]];
        let mut base = 1u16;
        for &(v, m) in &runs {
            let symmetric_ok = (n as u64 * v as u64) % 2 == 0;
            let mut extended = Vec::new();
            for prefix in &convs {
                let mut f = m;
                loop {
                    let valid = (m - f) % 2 == 0 && (f == 0 || symmetric_ok);
                    if valid {
                        let mut conv = prefix.clone();
                        for i in 0..f {
                            conv.push(base + i as u16);
                        }
                        let mut c = base + f as u16;
                        while (c as usize) < base as usize + m {
                            conv.push(c + 1);
                            conv.push(c);
                            c += 2;
                        }
                        extended.push(conv);
                    }
                    if f == 0 {
                        break;
                    }
                    f -= 1;
                }
            }
            convs = extended;
            base += m as u16;
        }
        for conv in convs {
            let mut valencies = vec![1u32];
            valencies.extend(&part);
            out.push(TypeSpec {
                valencies,
                conv,
            });
        }
    }
    out
}

fn partitions(left: u32, max: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if left == 0 {
        out.push(current.clone());
        return;
    }
    let mut v = left.min(max);
    while v >= 1 {
        current.push(v);
        partitions(left - v, v, current, out);
        current.pop();
        v -= 1;
    }
}

fn is_power(mut v: u32, p: u32) -> bool {
    if v == 0 {
        return false;
    }
    while v % p == 0 {
        v /= p;
    }
    v == 1
}

/// How many completed rows the symmetry prune inspects, and the largest
/// permutation set it is willing to enumerate.
const PRUNE_ROWS: usize = 6;
const PRUNE_PERMS: usize = 1000;

struct Filler {
    n: usize,
    d: usize,
    valencies: Vec<u32>,
    conv: Vec<u16>,
    /// group id of each point (0 for point 0, then one id per color run
    /// of the fixed first row).
    group_of: Vec<u16>,
    color: Vec<u16>,
    row_count: Vec<u32>,
    tensor: Vec<u32>,
    pinned: Vec<bool>,
    /// partial intersection counts per ordered pair: for (α,β) the counts
    /// over the z whose cells (α,z) and (z,β) are both set, indexed
    /// (α*n + β)*d1*d1 + s*d1 + t. Bounded by the pinned tensor.
    part: Vec<u32>,
    /// per row, the tie class of each later column: columns in one class
    /// are interchangeable so far, and the row values on a class must be
    /// nondecreasing in the canonical representative.
    ties: Vec<Vec<u16>>,
    scratch: Vec<u32>,
    nodes: u64,
    leaves: u64,
    row_completions: u64,
    sigma_time: std::time::Duration,
    pair_time: std::time::Duration,
}

impl Filler {
    fn new(n: usize, ty: &TypeSpec) -> Filler {
        let d = ty.valencies.len() - 1;
        let mut color = vec![u16::MAX; n * n];
        let mut row_count = vec![0u32; n * (d + 1)];
        let mut group_of = vec![0u16; n];
        color[0] = 0;
        // fixed first row: color c occupies a contiguous run of columns
        let mut col = 1usize;
        for c in 1..=d as u16 {
            for _ in 0..ty.valencies[c as usize] {
                color[col] = c;
                color[col * n] = ty.conv[c as usize];
                group_of[col] = c;
                row_count[c as usize] += 1;
                row_count[col * (d + 1) + ty.conv[c as usize] as usize] += 1;
                col += 1;
            }
        }
        for x in 0..n {
            color[x * n + x] = 0;
            row_count[x * (d + 1)] = 1;
        }
        let d1 = d + 1;
        Filler {
            n,
            d,
            valencies: ty.valencies.clone(),
            conv: ty.conv.clone(),
            group_of,
            color,
            row_count,
            tensor: vec![0; d1 * d1 * d1],
            pinned: vec![false; d1],
            part: vec![0; n * n * d1 * d1],
            ties: vec![Vec::new(); n],
            scratch: Vec::new(),
            nodes: 0,
            leaves: 0,
            row_completions: 0,
            sigma_time: Default::default(),
            pair_time: Default::default(),
        }
    }

    /// Tie classes of the columns beyond x for row x: two columns are
    /// tied when they sit in the same first-row group and agree on all
    /// rows before x. Classes are contiguous column ranges because the
    /// sorting constraint keeps equal vectors adjacent.
    fn compute_ties(&mut self, x: usize) {
        let n = self.n;
        let mut ties = vec![0u16; n];
        let mut id = 0u16;
        for z in x + 1..n {
            if z > x + 1 {
                let same_group = self.group_of[z] == self.group_of[z - 1];
                let same_vec =
                    (1..x).all(|r| self.color[r * n + z] == self.color[r * n + z - 1]);
                if !(same_group && same_vec) {
                    id += 1;
                }
            }
            ties[z] = id;
        }
        self.ties[x] = ties;
    }

    /// Replay the initially fixed cells (diagonal, first row, first
    /// column) through the incremental pair accounting. The accounting
    /// is event-driven, so the cells are cleared and re-set one by one.
    fn seed_initial_cells(&mut self) {
        let n = self.n;
        let mut cells: Vec<usize> = (0..n).map(|x| x * n + x).collect();
        for y in 1..n {
            cells.push(y);
            cells.push(y * n);
        }
        let values: Vec<u16> = cells.iter().map(|&idx| self.color[idx]).collect();
        for &idx in &cells {
            self.color[idx] = u16::MAX;
        }
        for (&idx, &v) in cells.iter().zip(values.iter()) {
            self.color[idx] = v;
            self.apply_cell(idx / n, idx % n);
        }
    }

    /// Account a newly set cell (i,j) in every partial pair count it
    /// completes; false when a pinned intersection number is exceeded.
    fn apply_cell(&mut self, i: usize, j: usize) -> bool {
        let n = self.n;
        let d1 = self.d + 1;
        let dd = d1 * d1;
        let cij = self.color[i * n + j] as usize;
        let mut ok = true;
        // as (i,z=j): complete contributions to pairs (i,β) with (j,β) set
        for beta in 0..n {
            if beta == i {
                continue;
            }
            let cjb = self.color[j * n + beta];
            if cjb == u16::MAX {
                continue;
            }
            let idx = (i * n + beta) * dd + cij * d1 + cjb as usize;
            self.part[idx] += 1;
            let u = self.color[i * n + beta];
            if u != u16::MAX
                && self.pinned[u as usize]
                && self.part[idx] > self.tensor[(cij * d1 + cjb as usize) * d1 + u as usize]
            {
                ok = false;
            }
        }
        // as (z=i,j): complete contributions to pairs (α,j) with (α,i) set
        for alpha in 0..n {
            if alpha == j {
                continue;
            }
            let cai = self.color[alpha * n + i];
            if cai == u16::MAX {
                continue;
            }
            let idx = (alpha * n + j) * dd + cai as usize * d1 + cij;
            self.part[idx] += 1;
            let u = self.color[alpha * n + j];
            if u != u16::MAX
                && self.pinned[u as usize]
                && self.part[idx] > self.tensor[(cai as usize * d1 + cij) * d1 + u as usize]
            {
                ok = false;
            }
        }
        // the pair (i,j) itself now has a color: everything accumulated
        // must fit under it
        if ok && i != j && self.pinned[cij] {
            let base = (i * n + j) * dd;
            for st in 0..dd {
                if self.part[base + st] > self.tensor[st * d1 + cij] {
                    ok = false;
                    break;
                }
            }
        }
        ok
    }

    fn undo_cell(&mut self, i: usize, j: usize) {
        let n = self.n;
        let d1 = self.d + 1;
        let dd = d1 * d1;
        let cij = self.color[i * n + j] as usize;
        for beta in 0..n {
            if beta == i {
                continue;
            }
            let cjb = self.color[j * n + beta];
            if cjb == u16::MAX {
                continue;
            }
            self.part[(i * n + beta) * dd + cij * d1 + cjb as usize] -= 1;
        }
        for alpha in 0..n {
            if alpha == j {
                continue;
            }
            let cai = self.color[alpha * n + i];
            if cai == u16::MAX {
                continue;
            }
            self.part[(alpha * n + j) * dd + cai as usize * d1 + cij] -= 1;
        }
    }

    fn run(&mut self, sink: &mut dyn FnMut(&[u16])) {
        self.seed_initial_cells();
        // pin from the pair (0,0)
        let mut pins = Vec::new();
        if !self.check_pair(0, 0, &mut pins) {
            self.unpin(&pins);
            return;
        }
        if self.n == 1 {
            self.leaves += 1;
            sink(&self.color);
            self.unpin(&pins);
            return;
        }
        let mut remaining: Vec<usize> = (2..self.n).collect();
        self.compute_ties(1);
        self.fill_row(1, &mut remaining, sink);
        self.unpin(&pins);
    }

    /// Row x is complete: pin and verify its pairs, apply the symmetry
    /// prune, then move to the next row or emit the leaf.
    fn complete_row(&mut self, x: usize, sink: &mut dyn FnMut(&[u16])) {
        let n = self.n;
        self.row_completions += 1;
        let t0 = std::time::Instant::now();
        let mut pins = Vec::new();
        let mut ok = true;
        for a in 0..=x {
            if !self.check_pair(a, x, &mut pins) || !self.check_pair(x, a, &mut pins) {
                ok = false;
                break;
            }
        }
        self.pair_time += t0.elapsed();
        let t1 = std::time::Instant::now();
        if ok && x <= PRUNE_ROWS && !self.prefix_is_minimal(x) {
            ok = false;
        }
        self.sigma_time += t1.elapsed();
        if ok {
            if x + 2 == n {
                // the last row is complete as soon as row n-2 is
                let mut last_pins = Vec::new();
                let mut last_ok = true;
                for a in 0..n {
                    if !self.check_pair(a, n - 1, &mut last_pins)
                        || !self.check_pair(n - 1, a, &mut last_pins)
                    {
                        last_ok = false;
                        break;
                    }
                }
                if last_ok {
                    self.leaves += 1;
                    sink(&self.color);
                }
                self.unpin(&last_pins);
            } else if x + 1 >= n {
                // n = 2: the single non-fixed row was the last one
                self.leaves += 1;
                sink(&self.color);
            } else {
                let mut remaining: Vec<usize> = (x + 2..n).collect();
                self.compute_ties(x + 1);
                self.fill_row(x + 1, &mut remaining, sink);
            }
        }
        self.unpin(&pins);
    }

    /// Fill the remaining columns of row x, most constrained column
    /// first. A column's domain is the set of colors passing capacity
    /// bounds, the tie-class sorting bounds, and the pinned deficits of
    /// all pairs through complete rows. Domains are u32 bitmasks.
    fn fill_row(&mut self, x: usize, remaining: &mut Vec<usize>, sink: &mut dyn FnMut(&[u16])) {
        if remaining.is_empty() {
            self.complete_row(x, sink);
            return;
        }
        self.nodes += 1;
        let n = self.n;
        let d = self.d;
        let d1 = d + 1;
        let dd = d1 * d1;

        let mut avail = [0u32; 32];
        let mut best_idx = usize::MAX;
        let mut best_mask: u32 = 0;
        let mut best_len = u32::MAX;
        for idx in 0..remaining.len() {
            let z = remaining[idx];
            // sortedness bounds from set columns in the same tie class
            let mut lower = 1u16;
            let mut upper = d as u16;
            let tie = self.ties[x][z];
            let mut w = z;
            while w > x + 1 && self.ties[x][w - 1] == tie {
                w -= 1;
                let v = self.color[x * n + w];
                if v != u16::MAX && v > lower {
                    lower = v;
                }
            }
            let mut w = z;
            while w + 1 < n && self.ties[x][w + 1] == tie {
                w += 1;
                let v = self.color[x * n + w];
                if v != u16::MAX && v < upper {
                    upper = v;
                }
            }
            if lower > upper {
                return;
            }
            // capacity bits
            let mut mask: u32 = 0;
            for c in lower..=upper {
                let cc = self.conv[c as usize] as usize;
                if self.row_count[x * d1 + c as usize] < self.valencies[c as usize]
                    && self.row_count[z * d1 + cc] < self.valencies[cc]
                {
                    mask |= 1 << c;
                }
            }
            // pinned-deficit bits
            for a in 0..x {
                if mask == 0 {
                    return;
                }
                let u1 = self.color[a * n + x] as usize;
                if self.pinned[u1] {
                    let s = self.color[a * n + z] as usize;
                    let base = (a * n + x) * dd + s * d1;
                    let tbase = s * d1;
                    let mut m = mask;
                    while m != 0 {
                        let c = m.trailing_zeros() as usize;
                        m &= m - 1;
                        let cc = self.conv[c] as usize;
                        if self.part[base + cc] >= self.tensor[(tbase + cc) * d1 + u1] {
                            mask &= !(1 << c);
                        }
                    }
                }
                let u2 = self.color[x * n + a] as usize;
                if self.pinned[u2] {
                    let t = self.color[z * n + a] as usize;
                    let base = (x * n + a) * dd + t;
                    let mut m = mask;
                    while m != 0 {
                        let c = m.trailing_zeros() as usize;
                        m &= m - 1;
                        if self.part[base + c * d1] >= self.tensor[(c * d1 + t) * d1 + u2] {
                            mask &= !(1 << c);
                        }
                    }
                }
            }
            if mask == 0 {
                return;
            }
            let len = mask.count_ones();
            if len < best_len {
                best_len = len;
                best_idx = idx;
                best_mask = mask;
            }
            let mut m = mask;
            while m != 0 {
                let c = m.trailing_zeros() as usize;
                m &= m - 1;
                avail[c] += 1;
            }
        }
        for c in 1..=d {
            let need = self.valencies[c] - self.row_count[x * d1 + c];
            if avail[c] < need {
                return;
            }
        }

        let y = remaining.remove(best_idx);
        let mut m = best_mask;
        while m != 0 {
            let c = m.trailing_zeros() as u16;
            m &= m - 1;
            let cc = self.conv[c as usize];
            self.color[x * n + y] = c;
            self.color[y * n + x] = cc;
            self.row_count[x * d1 + c as usize] += 1;
            self.row_count[y * d1 + cc as usize] += 1;

            let fits = self.apply_cell(x, y) & self.apply_cell(y, x);
            if fits {
                self.fill_row(x, remaining, sink);
            }
            self.undo_cell(y, x);
            self.undo_cell(x, y);

            self.color[x * n + y] = u16::MAX;
            self.color[y * n + x] = u16::MAX;
            self.row_count[x * d1 + c as usize] -= 1;
            self.row_count[y * d1 + cc as usize] -= 1;
        }
        remaining.insert(best_idx, y);
    }

    /// Verify (and pin on first sight) the intersection counts of the
    /// pair (a,b), whose rows are both complete.
    fn check_pair(&mut self, a: usize, b: usize, pins: &mut Vec<u16>) -> bool {
        let n = self.n;
        let d1 = self.d + 1;
        let u = self.color[a * n + b] as usize;
        if !self.pinned[u] {
            self.pinned[u] = true;
            pins.push(u as u16);
            let base = u;
            for st in 0..d1 * d1 {
                self.tensor[st * d1 + base] = 0;
            }
            for z in 0..n {
                let s = self.color[a * n + z] as usize;
                let t = self.color[z * n + b] as usize;
                self.tensor[(s * d1 + t) * d1 + u] += 1;
            }
            return self.pinned_slice_consistent(u as u16);
        }
        // recount and compare
        let mut scratch = vec![0u32; d1 * d1];
        for z in 0..n {
            let s = self.color[a * n + z] as usize;
            let t = self.color[z * n + b] as usize;
            scratch[s * d1 + t] += 1;
        }
        for st in 0..d1 * d1 {
            if scratch[st] != self.tensor[st * d1 + u] {
                return false;
            }
        }
        true
    }

    /// Standard identities relating the freshly pinned u-slice to the
    /// slices already pinned: a_{stu} = a_{t*s*u*}, the triple rotation
    /// a_{stw*} n_w = a_{tws*} n_s = a_{wst*} n_t, and the running bound
    /// sum_u a_{stu} n_u <= n_s n_t.
    fn pinned_slice_consistent(&self, u: u16) -> bool {
        let d1 = self.d + 1;
        let at = |s: usize, t: usize, w: usize| self.tensor[(s * d1 + t) * d1 + w];
        let uc = self.conv[u as usize] as usize;
        let u = u as usize;
        for s in 0..d1 {
            let sc = self.conv[s] as usize;
            for t in 0..d1 {
                let tc = self.conv[t] as usize;
                if self.pinned[uc] && at(s, t, u) != at(tc, sc, uc) {
                    return false;
                }
                // rotation with w = u*: a_{s,t,u} n_{u*} = a_{t,u*,s*} n_s
                //                                       = a_{u*,s,t*} n_t
                let lhs = at(s, t, u) as u64 * self.valencies[uc] as u64;
                if self.pinned[sc] {
                    let rhs = at(t, uc, sc) as u64 * self.valencies[s] as u64;
                    if lhs != rhs {
                        return false;
                    }
                }
                if self.pinned[tc] {
                    let rhs = at(uc, s, tc) as u64 * self.valencies[t] as u64;
                    if lhs != rhs {
                        return false;
                    }
                }
                // partial valency-product bound over the pinned slices
                let mut sum = 0u64;
                let mut all = true;
                for w in 0..d1 {
                    if self.pinned[w] {
                        sum += at(s, t, w) as u64 * self.valencies[w] as u64;
                    } else {
                        all = false;
                    }
                }
                let product = self.valencies[s] as u64 * self.valencies[t] as u64;
                if sum > product || (all && sum != product) {
                    return false;
                }
            }
        }
        true
    }

    fn unpin(&mut self, pins: &[u16]) {
        for &u in pins {
            self.pinned[u as usize] = false;
        }
    }

    /// Orderly prune: the filled prefix (rows 1..=x of the upper
    /// triangle) must be minimal among the relabelings that permute
    /// points within first-row color groups and preserve {1..x}.
    fn prefix_is_minimal(&self, x: usize) -> bool {
        // group the prefix points by their first-row color group
        let mut blocks: Vec<Vec<u32>> = Vec::new();
        let mut current: Vec<u32> = Vec::new();
        for p in 1..=x as u32 {
            if !current.is_empty()
                && self.group_of[p as usize] != self.group_of[current[0] as usize]
            {
                blocks.push(std::mem::take(&mut current));
            }
            current.push(p);
        }
        if !current.is_empty() {
            blocks.push(current);
        }
        let total: usize = blocks.iter().map(|b| factorial(b.len())).product();
        if total > PRUNE_PERMS {
            return true;
        }
        let mut sigma: Vec<u32> = (0..self.n as u32).collect();
        self.block_perms_ok(&blocks, 0, &mut sigma, x)
    }

    /// Walk the cartesian product of within-block permutations; false as
    /// soon as any relabeling beats the prefix.
    fn block_perms_ok(&self, blocks: &[Vec<u32>], i: usize, sigma: &mut Vec<u32>, x: usize) -> bool {
        if i == blocks.len() {
            return self.compare_relabel(sigma, x);
        }
        let mut arrangement = blocks[i].clone();
        self.block_arrangements(blocks, i, &mut arrangement, 0, sigma, x)
    }

    fn block_arrangements(
        &self,
        blocks: &[Vec<u32>],
        i: usize,
        arrangement: &mut Vec<u32>,
        k: usize,
        sigma: &mut Vec<u32>,
        x: usize,
    ) -> bool {
        if k == arrangement.len() {
            for (slot, &point) in blocks[i].iter().zip(arrangement.iter()) {
                sigma[*slot as usize] = point;
            }
            let ok = self.block_perms_ok(blocks, i + 1, sigma, x);
            for &slot in blocks[i].iter() {
                sigma[slot as usize] = slot;
            }
            return ok;
        }
        for j in k..arrangement.len() {
            arrangement.swap(k, j);
            if !self.block_arrangements(blocks, i, arrangement, k + 1, sigma, x) {
                arrangement.swap(k, j);
                return false;
            }
            arrangement.swap(k, j);
        }
        true
    }

    /// Compare the sigma-relabeled prefix against the prefix in
    /// generation order; false means a strictly smaller relabeling exists.
    fn compare_relabel(&self, sigma: &[u32], x: usize) -> bool {
        let n = self.n;
        for r in 1..=x {
            for col in r + 1..n {
                let orig = self.color[r * n + col];
                let mapped = self.color[sigma[r] as usize * n + sigma[col] as usize];
                if mapped < orig {
                    return false;
                }
                if mapped > orig {
                    return true;
                }
            }
        }
        true
    }
}

fn factorial(k: usize) -> usize {
    (1..=k).product()
}

/// Canonical form: the lexicographically least relabeled color matrix,
/// where cells are compared in the triangular order (all cells among the
/// first k+1 chosen points before any cell involving the next point) and
/// colors are renamed by first appearance along that order. The output
/// is the row-major matrix of the winning relabeling.
///
/// The search is pruned by the label symmetries of the scheme: the
/// color-fixing automorphism group is computed up front, color-permuting
/// symmetries are collected as they are discovered, and candidate points
/// at each level are reduced to orbit representatives under the
/// pointwise stabilizer of the chosen prefix.
pub fn canonical_form(scheme: &Scheme) -> Vec<u16> {
    let mut aut_gens = Vec::new();
    if scheme.n() > 2 {
        if let Ok(aut) = crate::morph::automorphism_group(
            scheme,
            &mut crate::morph::Budget::new(crate::morph::DEFAULT_BUDGET),
        ) {
            aut_gens = aut.group.gens().to_vec();
        }
    }
    let n = scheme.n();
    let mut search = CanonSearch {
        scheme,
        n,
        pi: Vec::with_capacity(n),
        used: vec![false; n],
        cmap: vec![u16::MAX; scheme.rank()],
        next_color: 0,
        key: Vec::with_capacity(n * n),
        best_key: None,
        best_pi: Vec::new(),
        syms: aut_gens,
    };
    let mut starts: Vec<u32> = (0..n as u32).collect();
    search.reduce_to_orbit_reps(&mut starts);
    for start in starts {
        search.descend(start, true);
    }
    let best_pi = search.best_pi.clone();
    render_row_major(scheme, &best_pi)
}

struct CanonSearch<'a> {
    scheme: &'a Scheme,
    n: usize,
    pi: Vec<u32>,
    used: Vec<bool>,
    cmap: Vec<u16>,
    next_color: u16,
    key: Vec<u16>,
    best_key: Option<Vec<u16>>,
    best_pi: Vec<u32>,
    /// label symmetries: automorphisms plus discovered color-permuting
    /// self-maps, kept as a short generator list
    syms: Vec<Perm>,
}

impl<'a> CanonSearch<'a> {
    /// Extend the current prefix with the point `cand`. `tied` tracks
    /// whether the key so far equals the best key's prefix; comparison
    /// against the best key only prunes while still tied.
    fn descend(&mut self, cand: u32, tied: bool) {
        let k = self.pi.len();
        let mut new_cells: Vec<u16> = Vec::with_capacity(2 * k + 1);
        for i in 0..k {
            new_cells.push(self.scheme.color(self.pi[i], cand));
            new_cells.push(self.scheme.color(cand, self.pi[i]));
        }
        new_cells.push(self.scheme.color(cand, cand));

        // rename colors by first appearance, recording what we add
        let mut added_colors: Vec<u16> = Vec::new();
        let key_checkpoint = self.key.len();
        let mut worse = false;
        let mut tied = tied;
        for &c in &new_cells {
            let mapped = {
                if self.cmap[c as usize] == u16::MAX {
                    self.cmap[c as usize] = self.next_color;
                    self.next_color += 1;
                    added_colors.push(c);
                }
                self.cmap[c as usize]
            };
            self.key.push(mapped);
            if tied {
                if let Some(best) = &self.best_key {
                    let pos = self.key.len() - 1;
                    match mapped.cmp(&best[pos]) {
                        std::cmp::Ordering::Greater => {
                            worse = true;
                            break;
                        }
                        std::cmp::Ordering::Less => tied = false,
                        std::cmp::Ordering::Equal => {}
                    }
                }
            }
        }

        if !worse {
            self.pi.push(cand);
            self.used[cand as usize] = true;
            if self.pi.len() == self.n {
                match &self.best_key {
                    None => {
                        self.best_key = Some(self.key.clone());
                        self.best_pi = self.pi.clone();
                    }
                    Some(best) => {
                        if self.key < *best {
                            self.best_key = Some(self.key.clone());
                            self.best_pi = self.pi.clone();
                        } else if self.key == *best {
                            // pi and best_pi induce a symmetry of the scheme
                            let mut images = vec![0u32; self.n];
                            for (a, b) in self.best_pi.iter().zip(self.pi.iter()) {
                                images[*a as usize] = *b;
                            }
                            if let Ok(p) = Perm::from_images(images) {
                                if !p.is_identity() {
                                    self.add_symmetry(p);
                                }
                            }
                        }
                    }
                }
            } else {
                let mut cands: Vec<u32> = (0..self.n as u32)
                    .filter(|&p| !self.used[p as usize])
                    .collect();
                self.reduce_to_orbit_reps(&mut cands);
                for cand in cands {
                    self.descend(cand, tied);
                }
            }
            self.pi.pop();
            self.used[cand as usize] = false;
        }

        self.key.truncate(key_checkpoint);
        for c in added_colors {
            self.cmap[c as usize] = u16::MAX;
            self.next_color -= 1;
        }
    }

    fn add_symmetry(&mut self, p: Perm) {
        let group = crate::perm::PermGroup::new(self.n, self.syms.clone());
        if !group.stab_chain(&[]).contains(&p) {
            self.syms.push(p);
        }
    }

    /// Keep one candidate per orbit of the pointwise prefix stabilizer.
    fn reduce_to_orbit_reps(&self, cands: &mut Vec<u32>) {
        if self.syms.is_empty() || cands.len() <= 1 {
            return;
        }
        let group = crate::perm::PermGroup::new(self.n, self.syms.clone());
        let chain = group.stab_chain_with_base(&self.pi);
        let stab_gens = chain.stabilizer_gens(self.pi.len());
        if stab_gens.is_empty() {
            return;
        }
        let stab = crate::perm::PermGroup::new(self.n, stab_gens);
        let (orbit_ids, _) = stab.orbit_partition();
        let mut seen = std::collections::HashSet::new();
        cands.retain(|&c| seen.insert(orbit_ids[c as usize]));
    }
}

fn render_row_major(scheme: &Scheme, pi: &[u32]) -> Vec<u16> {
    let n = scheme.n();
    // color renaming by first appearance in triangular order
    let mut cmap = vec![u16::MAX; scheme.rank()];
    let mut next = 0u16;
    for k in 0..n {
        for i in 0..k {
            for &c in &[
                scheme.color(pi[i], pi[k]),
                scheme.color(pi[k], pi[i]),
            ] {
                if cmap[c as usize] == u16::MAX {
                    cmap[c as usize] = next;
                    next += 1;
                }
            }
        }
        let c = scheme.color(pi[k], pi[k]);
        if cmap[c as usize] == u16::MAX {
            cmap[c as usize] = next;
            next += 1;
        }
    }
    let mut out = vec![0u16; n * n];
    for x in 0..n {
        for y in 0..n {
            out[x * n + y] = cmap[scheme.color(pi[x], pi[y]) as usize];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{thin_scheme, wreath};
    use crate::group::FiniteGroup;

    #[test]
    fn canonical_form_is_relabeling_invariant() {
        let s = wreath(
            &thin_scheme(&FiniteGroup::cyclic(2)),
            &thin_scheme(&FiniteGroup::cyclic(3)),
        );
        let canon = canonical_form(&s);
        // conjugate by a few permutations and compare
        for cycles in [vec![vec![0u32, 3, 1]], vec![vec![2u32, 4], vec![0, 5]]] {
            let sigma = Perm::from_cycles(6, &cycles).unwrap();
            let n = s.n();
            let mut color = vec![0u16; n * n];
            for x in 0..n as u32 {
                for y in 0..n as u32 {
                    color[sigma.apply(x) as usize * n + sigma.apply(y) as usize] = s.color(x, y);
                }
            }
            let s2 = Scheme::from_flat(n, color).unwrap();
            assert_eq!(canonical_form(&s2), canon);
        }
    }

    #[test]
    fn tiny_orders() {
        // order 1: one scheme; order 2: one; order 3: two (trivial, thin C3)
        assert_eq!(enumerate_schemes(1, &EnumOptions::default()).len(), 1);
        assert_eq!(enumerate_schemes(2, &EnumOptions::default()).len(), 1);
        assert_eq!(enumerate_schemes(3, &EnumOptions::default()).len(), 2);
    }

    #[test]
    fn order_4_has_four_schemes() {
        let schemes = enumerate_schemes(4, &EnumOptions::default());
        assert_eq!(schemes.len(), 4);
        // ranks: 2 (trivial), 3 (C4-type), 4 (C4 and C2xC2 thin)
        let ranks: Vec<usize> = schemes.iter().map(|s| s.rank()).collect();
        assert_eq!(ranks, vec![2, 3, 4, 4]);
    }

    #[test]
    fn order_5_has_three_schemes() {
        assert_eq!(enumerate_schemes(5, &EnumOptions::default()).len(), 3);
    }

    #[test]
    fn order_6_has_eight_schemes() {
        assert_eq!(enumerate_schemes(6, &EnumOptions::default()).len(), 8);
    }

    #[test]
    fn order_7_has_four_schemes() {
        assert_eq!(enumerate_schemes(7, &EnumOptions::default()).len(), 4);
    }
}
