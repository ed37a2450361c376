//! Set-partition combinatorics on the ground set `[n] = {1, .., n}`:
//! partial partitions (with and without singleton parts), ordered partial
//! partitions and their flip involutions, Bell numbers, the part-count
//! refinement `B_{n,k}`, Stirling numbers, and the compatibility predicate
//! used by the coefficient oracle.
//!
//! Subsets are bit masks over `u64`, so ground sets are capped at 63
//! elements; element `e` (1-based) occupies bit `e - 1`. Enumerators are
//! lazy iterators in a fixed deterministic order: graded by support size,
//! then by numeric subset value, then by restricted-growth-string order of
//! the partition (and lexicographic part permutation for ordered ones).
//! No ordering is canonical mathematically; this one is simply documented.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

fn bit(element: usize) -> u64 {
    1u64 << (element - 1)
}

/// Elements of a mask in increasing order, 1-based.
pub fn mask_elements(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        let e = m.trailing_zeros() as usize + 1;
        out.push(e);
        m &= m - 1;
    }
    out
}

/// A set of pairwise disjoint nonempty subsets of `[n]`, stored with the
/// parts sorted by least element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialPartition {
    n: usize,
    parts: Vec<u64>,
}

impl PartialPartition {
    pub fn new(n: usize, mut parts: Vec<u64>) -> PartialPartition {
        assert!(n <= 63, "ground sets larger than 63 are not supported");
        let mut seen = 0u64;
        for &p in &parts {
            assert!(p != 0, "empty part");
            assert!(p & seen == 0, "parts must be disjoint");
            assert!(p < (1u64 << n).max(1) || n == 63, "part outside [n]");
            seen |= p;
        }
        parts.sort_by_key(|p| p.trailing_zeros());
        PartialPartition { n, parts }
    }

    pub fn empty(n: usize) -> PartialPartition {
        PartialPartition::new(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    /// Union of the parts.
    pub fn support(&self) -> u64 {
        self.parts.iter().fold(0, |acc, p| acc | p)
    }

    /// Index of the part containing `element`, if any.
    pub fn part_of(&self, element: usize) -> Option<usize> {
        self.parts.iter().position(|p| p & bit(element) != 0)
    }

    /// Whether `element ~ element`, i.e. the element lies in some part.
    pub fn related_self(&self, element: usize) -> bool {
        self.support() & bit(element) != 0
    }

    /// Whether `a ~ b` under the induced partial equivalence relation.
    pub fn related(&self, a: usize, b: usize) -> bool {
        self.parts.iter().any(|p| p & bit(a) != 0 && p & bit(b) != 0)
    }

    /// `prod_{S in P} (-1)^(|S|+1)`, i.e. `(-1)^(|support| + #parts)`.
    pub fn sign(&self) -> i32 {
        let exp = self.support().count_ones() as usize + self.parts.len();
        if exp % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for PartialPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, &p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (j, e) in mask_elements(p).into_iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

/// Gosper's hack: next larger integer with the same popcount.
fn next_same_popcount(v: u64) -> Option<u64> {
    if v == 0 {
        return None;
    }
    let c = v & v.wrapping_neg();
    let r = v.checked_add(c)?;
    Some(r | (((v ^ r) / c) >> 2))
}

/// Restricted growth strings in lexicographic order; one string per set
/// partition of an `m`-element set.
fn next_rgs(a: &mut [u8]) -> bool {
    let m = a.len();
    for i in (1..m).rev() {
        let mx = a[..i].iter().copied().max().unwrap_or(0) + 1;
        if a[i] < mx {
            a[i] += 1;
            for x in a[i + 1..].iter_mut() {
                *x = 0;
            }
            return true;
        }
    }
    false
}

fn rgs_to_parts(elements: &[usize], rgs: &[u8]) -> Vec<u64> {
    let k = rgs.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut parts = vec![0u64; k];
    for (i, &e) in elements.iter().enumerate() {
        parts[rgs[i] as usize] |= bit(e);
    }
    parts
}

/// Lazy enumerator of partial partitions of `[n]`.
pub struct PartialPartitionIter {
    n: usize,
    no_singletons: bool,
    max_parts: Option<usize>,
    support_size: usize,
    support: Option<u64>,
    elements: Vec<usize>,
    rgs: Option<Vec<u8>>,
}

impl PartialPartitionIter {
    fn start_support(&mut self, support: u64) {
        self.support = Some(support);
        self.elements = mask_elements(support);
        self.rgs = Some(vec![0u8; self.elements.len()]);
    }

    fn advance_support(&mut self) -> bool {
        let next = match self.support {
            Some(s) => next_same_popcount(s).filter(|&v| self.n == 63 || v < (1u64 << self.n)),
            None => None,
        };
        if let Some(s) = next {
            self.start_support(s);
            return true;
        }
        // move to the next support size
        if self.support_size >= self.n {
            return false;
        }
        self.support_size += 1;
        self.start_support((1u64 << self.support_size) - 1);
        true
    }
}

impl Iterator for PartialPartitionIter {
    type Item = PartialPartition;

    fn next(&mut self) -> Option<PartialPartition> {
        loop {
            let produced = match self.rgs.as_mut() {
                None => None,
                Some(rgs) => {
                    let parts = rgs_to_parts(&self.elements, rgs);
                    if !next_rgs(rgs) {
                        self.rgs = None;
                    }
                    Some(parts)
                }
            };

            match produced {
                Some(parts) => {
                    if self.no_singletons && parts.iter().any(|p| p.count_ones() < 2) {
                        continue;
                    }
                    if let Some(k) = self.max_parts {
                        if parts.len() > k {
                            continue;
                        }
                    }
                    return Some(PartialPartition {
                        n: self.n,
                        parts,
                    });
                }
                None => {
                    if !self.advance_support() {
                        return None;
                    }
                }
            }
        }
    }
}

/// Streams every partial partition of `[n]` exactly once. With
/// `no_singletons` set, parts of size one are skipped, leaving exactly
/// `bell(n)` items (they biject with ordinary partitions of `[n]`);
/// `max_parts` additionally bounds the number of parts.
pub fn partial_partitions(
    n: usize,
    no_singletons: bool,
    max_parts: Option<usize>,
) -> PartialPartitionIter {
    assert!(n <= 63, "ground sets larger than 63 are not supported");
    let mut it = PartialPartitionIter {
        n,
        no_singletons,
        max_parts,
        support_size: 0,
        support: None,
        elements: Vec::new(),
        rgs: None,
    };
    it.start_support(0);
    it
}

/// A tuple of pairwise disjoint nonempty subsets of `[n]`; the order of
/// the parts matters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedPartialPartition {
    n: usize,
    parts: Vec<u64>,
}

impl OrderedPartialPartition {
    pub fn new(n: usize, parts: Vec<u64>) -> OrderedPartialPartition {
        assert!(n <= 63, "ground sets larger than 63 are not supported");
        let mut seen = 0u64;
        for &p in &parts {
            assert!(p != 0, "empty part");
            assert!(p & seen == 0, "parts must be disjoint");
            seen |= p;
        }
        OrderedPartialPartition { n, parts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn support(&self) -> u64 {
        self.parts.iter().fold(0, |acc, p| acc | p)
    }

    fn position(&self, element: usize) -> Option<usize> {
        self.parts.iter().position(|p| p & bit(element) != 0)
    }

    /// The induced relation: `a <= b` iff `a` sits in a part no later than
    /// the part of `b`.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        match (self.position(a), self.position(b)) {
            (Some(i), Some(j)) => i <= j,
            _ => false,
        }
    }

    /// Applies the involution `f_z`. Exactly one of four cases fires:
    /// a leading singleton `{z}` is discarded; a later singleton `{z}` is
    /// merged into the preceding part; an element of a bigger part is
    /// split off into its own immediately following part; an absent
    /// element becomes a new first part.
    pub fn flip(&self, z: usize) -> OrderedPartialPartition {
        assert!(z >= 1 && z <= self.n, "element out of range");
        let zb = bit(z);
        let mut parts = self.parts.clone();
        match self.position(z) {
            Some(0) if parts[0] == zb => {
                parts.remove(0);
            }
            Some(j) if parts[j] == zb => {
                parts[j - 1] |= zb;
                parts.remove(j);
            }
            Some(j) => {
                parts[j] &= !zb;
                parts.insert(j + 1, zb);
            }
            None => {
                parts.insert(0, zb);
            }
        }
        OrderedPartialPartition { n: self.n, parts }
    }
}

impl fmt::Display for OrderedPartialPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, &p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (j, e) in mask_elements(p).into_iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, ")")
    }
}

/// Checks the three ordered-partial-partition axioms on an explicit
/// relation matrix (`rel[a][b]` = "a <= b", zero-indexed).
pub fn is_opp_relation(rel: &[Vec<bool>]) -> bool {
    let n = rel.len();
    for x in 0..n {
        for y in 0..n {
            // weak reflexivity
            if rel[x][y] && !(rel[x][x] && rel[y][y]) {
                return false;
            }
            // weak connectedness
            if rel[x][x] && rel[y][y] && !(rel[x][y] || rel[y][x]) {
                return false;
            }
            // transitivity
            for z in 0..n {
                if rel[x][y] && rel[y][z] && !rel[x][z] {
                    return false;
                }
            }
        }
    }
    true
}

/// Streams every ordered partial partition of `[n]` exactly once:
/// each partial partition, in the order of [`partial_partitions`], expands
/// into all permutations of its parts (lexicographic on part indices).
pub fn ordered_partial_partitions(
    n: usize,
) -> impl Iterator<Item = OrderedPartialPartition> {
    partial_partitions(n, false, None).flat_map(move |pp| {
        let parts = pp.parts().to_vec();
        permutations(parts.len()).into_iter().map(move |perm| {
            OrderedPartialPartition::new(n, perm.iter().map(|&i| parts[i]).collect())
        })
    })
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..k).collect();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

fn next_permutation(a: &mut [usize]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

pub fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `bell(n)`: number of partitions of `[n]`, via the Bell triangle.
pub fn bell(n: usize) -> BigInt {
    let mut row = vec![BigInt::one()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().unwrap().clone());
        for v in &row {
            let last = next.last().unwrap().clone();
            next.push(last + v);
        }
        row = next;
    }
    row[0].clone()
}

/// `B_{n,k}`: partitions of `[n]` into exactly `k` parts, all of size at
/// least two. Zero when `n < 2k`; satisfies
/// `B_{n,k} = (k+1) B_{n-1,k} + (n-1) B_{n-2,k-1}`.
pub fn bell_nk(n: usize, k: usize) -> BigInt {
    if n < 2 * k {
        return BigInt::zero();
    }
    if k == 0 {
        return BigInt::one();
    }
    let mut table = vec![vec![BigInt::zero(); k + 1]; n + 1];
    for row in table.iter_mut() {
        row[0] = BigInt::one();
    }
    for i in 2..=n {
        for j in 1..=k.min(i / 2) {
            let a = BigInt::from(j + 1) * &table[i - 1][j];
            let b = BigInt::from(i - 1) * &table[i - 2][j - 1];
            table[i][j] = a + b;
        }
    }
    table[n][k].clone()
}

/// Stirling numbers of the second kind `S(k, m)`.
pub fn stirling2(k: usize, m: usize) -> BigInt {
    if m > k {
        return BigInt::zero();
    }
    if k == 0 {
        return BigInt::one(); // S(0,0)
    }
    if m == 0 {
        return BigInt::zero();
    }
    let mut row = vec![BigInt::one()]; // S(0, 0..=0)
    for i in 1..=k {
        let mut next = vec![BigInt::zero(); i + 1];
        for j in 1..=i {
            let carry = if j < row.len() {
                BigInt::from(j) * &row[j]
            } else {
                BigInt::zero()
            };
            next[j] = carry + &row[j - 1];
        }
        row = next;
    }
    row[m].clone()
}

/// Number of ordered set partitions of a `k`-element set.
pub fn fubini(k: usize) -> BigInt {
    (0..=k).map(|m| stirling2(k, m) * factorial(m)).sum()
}

/// A total map `[n] -> [n]`, stored as 1-based images.
pub type GroundMap = Vec<usize>;

fn assert_ground_map(f: &[usize]) {
    let n = f.len();
    assert!(f.iter().all(|&v| v >= 1 && v <= n), "map must land in [n]");
}

/// The partial partitions compatible with `f`: for every `i`, a fixed
/// point of `f` must be outside the support, and otherwise `f(i)` must be
/// in the support with either `i ~ f(i)` or `i` outside the support.
pub fn compatible_partial_partitions(f: &[usize]) -> Vec<PartialPartition> {
    assert_ground_map(f);
    let n = f.len();
    partial_partitions(n, false, None)
        .filter(|p| {
            (1..=n).all(|i| {
                let fi = f[i - 1];
                if fi == i {
                    !p.related_self(i)
                } else {
                    p.related_self(fi) && (p.related(i, fi) || !p.related_self(i))
                }
            })
        })
        .collect()
}

/// The monomial coefficient `c_f = sum sgn(P) |P|!` over the partial
/// partitions compatible with `f`, computed in the integers.
pub fn function_coefficient(f: &[usize]) -> BigInt {
    compatible_partial_partitions(f)
        .iter()
        .map(|p| BigInt::from(p.sign()) * factorial(p.num_parts()))
        .sum()
}

/// `Some(sign)` when `f` is a permutation, `None` otherwise.
pub fn permutation_sign(f: &[usize]) -> Option<i32> {
    assert_ground_map(f);
    let n = f.len();
    let mut seen = vec![false; n];
    for &v in f {
        if seen[v - 1] {
            return None;
        }
        seen[v - 1] = true;
    }
    let mut visited = vec![false; n];
    let mut sign = 1;
    for start in 0..n {
        if visited[start] {
            continue;
        }
        let mut len = 0;
        let mut cur = start;
        while !visited[cur] {
            visited[cur] = true;
            cur = f[cur] - 1;
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    Some(sign)
}
