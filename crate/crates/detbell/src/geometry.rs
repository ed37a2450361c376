//! The axis-aligned tile `F_A` of a strictly diagonally dominant matrix
//! with positive diagonal and negative off-diagonal entries: its vertex
//! skeleton labelled by ordered partial partitions, its exact volume via
//! the chain inclusion-exclusion, and exact neighbour/coverage checks for
//! the induced lattice tiling.
//!
//! Everything here runs in exact rational arithmetic; the only geometric
//! primitives are interval comparisons, so there are no tolerances to
//! tune. `F_A` is materialized as a signed union of boxes (one per chain
//! of column subsets), and all predicates reduce to an axis-aligned cell
//! decomposition of that union.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::combinatorics::{mask_elements, ordered_partial_partitions, OrderedPartialPartition};
use crate::scalar::{Domain, Matrix, Scalar};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("matrix is not admissible: {0}")]
    NotAdmissible(String),
    #[error("neighbour checks are capped at n = {max}, got n = {got}")]
    DimensionTooLarge { max: usize, got: usize },
    #[error("descent did not terminate within the {budget}-step budget; this would contradict the covering lemma")]
    NonTermination { budget: usize },
    #[error("no tile covers sample point {point}; this would contradict the covering lemma")]
    CoverageGap { point: String },
}

/// A square rational matrix with strictly positive diagonal, strictly
/// negative off-diagonal entries, and strictly positive row sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleMatrix {
    n: usize,
    entries: Vec<BigRational>,
}

impl AdmissibleMatrix {
    pub fn new(m: &Matrix) -> Result<AdmissibleMatrix, GeometryError> {
        let n = m.n();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let v = m.get(i, j).to_rational().ok_or_else(|| {
                    GeometryError::NotAdmissible(format!(
                        "matrix must be over Z or Q, got {}",
                        m.domain()
                    ))
                })?;
                if i == j && !v.is_positive() {
                    return Err(GeometryError::NotAdmissible(format!(
                        "diagonal entry ({},{}) = {v} is not positive",
                        i + 1,
                        i + 1
                    )));
                }
                if i != j && !v.is_negative() {
                    return Err(GeometryError::NotAdmissible(format!(
                        "off-diagonal entry ({},{}) = {v} is not negative",
                        i + 1,
                        j + 1
                    )));
                }
                entries.push(v);
            }
        }
        let a = AdmissibleMatrix { n, entries };
        for i in 0..n {
            if !a.row_sum(i).is_positive() {
                return Err(GeometryError::NotAdmissible(format!(
                    "row {} has non-positive sum {}",
                    i + 1,
                    a.row_sum(i)
                )));
            }
        }
        Ok(a)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry `(i, j)`, zero-indexed.
    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.n + j]
    }

    pub fn row_sum(&self, i: usize) -> BigRational {
        (0..self.n).map(|j| self.get(i, j).clone()).sum()
    }

    /// Column `j` as a vector (this is `A e_j`).
    pub fn column(&self, j: usize) -> Vec<BigRational> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    /// `A v` for an integer vector `v`.
    pub fn apply(&self, v: &[BigInt]) -> Vec<BigRational> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.get(i, j) * BigRational::from_integer(v[j].clone()))
                    .sum()
            })
            .collect()
    }

    pub fn to_matrix(&self) -> Matrix {
        let entries = self.entries.iter().map(|v| Scalar::Rat(v.clone())).collect();
        Matrix::new(self.n, Domain::Rational, entries).expect("entries are rational")
    }
}

/// One chain `S_1 < S_2 < .. < S_k` of column subsets (strict inclusions,
/// every gap of size at least two), stored by its increments `T_l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainTerm {
    /// The increments `T_l = S_l minus S_(l-1)`, each of size >= 2.
    pub increments: Vec<u64>,
    /// Side lengths of the intersection box, one per axis.
    pub side_lengths: Vec<BigRational>,
}

impl ChainTerm {
    pub fn depth(&self) -> usize {
        self.increments.len()
    }

    /// The cumulative sets `S_1 < .. < S_k`.
    pub fn cumulative_sets(&self) -> Vec<u64> {
        let mut acc = 0u64;
        self.increments
            .iter()
            .map(|t| {
                acc |= t;
                acc
            })
            .collect()
    }

    /// Unsigned box volume.
    pub fn volume(&self) -> BigRational {
        self.side_lengths.iter().product()
    }

    /// `(-1)^k` times the box volume.
    pub fn signed_volume(&self) -> BigRational {
        let v = self.volume();
        if self.depth() % 2 == 1 {
            -v
        } else {
            v
        }
    }
}

/// A closed axis-aligned box with rational corners.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatBox {
    pub lo: Vec<BigRational>,
    pub hi: Vec<BigRational>,
}

impl RatBox {
    pub fn translate(&self, offset: &[BigRational]) -> RatBox {
        RatBox {
            lo: self.lo.iter().zip(offset).map(|(a, b)| a + b).collect(),
            hi: self.hi.iter().zip(offset).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn contains(&self, p: &[BigRational]) -> bool {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(p)
            .all(|((lo, hi), x)| lo <= x && x <= hi)
    }

    fn contains_interior(&self, p: &[BigRational]) -> bool {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(p)
            .all(|((lo, hi), x)| lo < x && x < hi)
    }

    /// Closed boxes touching (possibly only on their boundary).
    pub fn touches(&self, other: &RatBox) -> bool {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(other.lo.iter().zip(&other.hi))
            .all(|((alo, ahi), (blo, bhi))| alo.max(blo) <= ahi.min(bhi))
    }

    /// Open interiors overlapping.
    pub fn interior_overlaps(&self, other: &RatBox) -> bool {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(other.lo.iter().zip(&other.hi))
            .all(|((alo, ahi), (blo, bhi))| alo.max(blo) < ahi.min(bhi))
    }

    pub fn volume(&self) -> BigRational {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(lo, hi)| hi - lo)
            .product()
    }
}

/// Enumerates every chain of column subsets with gaps of size >= 2,
/// including the empty chain (the bare cuboid `C_A`), with the side
/// lengths of the corresponding intersection box.
pub fn chain_terms(a: &AdmissibleMatrix) -> Vec<ChainTerm> {
    let n = a.n();
    let full: u64 = if n == 0 { 0 } else { (1u64 << n) - 1 };
    let mut out = Vec::new();
    let mut increments: Vec<u64> = Vec::new();
    enumerate_chains(a, full, &mut increments, &mut out);
    out
}

fn enumerate_chains(
    a: &AdmissibleMatrix,
    remaining: u64,
    increments: &mut Vec<u64>,
    out: &mut Vec<ChainTerm>,
) {
    out.push(ChainTerm {
        increments: increments.clone(),
        side_lengths: chain_side_lengths(a, increments),
    });
    // extend the chain by any increment of size >= 2 from the unused elements
    let mut t = remaining;
    loop {
        if t.count_ones() >= 2 {
            increments.push(t);
            enumerate_chains(a, remaining & !t, increments, out);
            increments.pop();
        }
        if t == 0 {
            break;
        }
        t = (t - 1) & remaining;
    }
}

/// Side lengths of the box cut out by a chain: an element `i` inside
/// increment `T_l` contributes `-sum of a_ij over the rest of T_l`, an
/// element outside the union contributes `a_ii + sum of a_ij over the
/// union`.
fn chain_side_lengths(a: &AdmissibleMatrix, increments: &[u64]) -> Vec<BigRational> {
    let n = a.n();
    let union: u64 = increments.iter().fold(0, |acc, t| acc | t);
    (0..n)
        .map(|i| {
            if let Some(t) = increments.iter().find(|t| *t & (1u64 << i) != 0) {
                -mask_elements(*t & !(1u64 << i))
                    .into_iter()
                    .map(|j| a.get(i, j - 1).clone())
                    .sum::<BigRational>()
            } else {
                a.get(i, i).clone()
                    + mask_elements(union)
                        .into_iter()
                        .map(|j| a.get(i, j - 1).clone())
                        .sum::<BigRational>()
            }
        })
        .collect()
}

/// The closed box a chain carves out: coordinate `i` runs over the
/// intersection of the intervals `[m_l, m_l + a_ii]`, where `m_l` is the
/// `i`-th coordinate of the translated cuboid at level `l`.
fn chain_box(a: &AdmissibleMatrix, term: &ChainTerm) -> RatBox {
    let n = a.n();
    let mut lo = vec![BigRational::zero(); n];
    let mut hi: Vec<BigRational> = (0..n).map(|i| a.get(i, i).clone()).collect();
    let mut shift = vec![BigRational::zero(); n];
    for t in &term.increments {
        for j in mask_elements(*t) {
            for i in 0..n {
                shift[i] += a.get(i, j - 1);
            }
        }
        for i in 0..n {
            let candidate_lo = shift[i].clone();
            let candidate_hi = &shift[i] + a.get(i, i);
            if candidate_lo > lo[i] {
                lo[i] = candidate_lo;
            }
            if candidate_hi < hi[i] {
                hi[i] = candidate_hi;
            }
        }
    }
    debug_assert!(
        (0..n).all(|i| &hi[i] - &lo[i] == term.side_lengths[i]),
        "box extents must reproduce the chain side lengths"
    );
    RatBox { lo, hi }
}

/// Volume of `F_A` by inclusion-exclusion over chains. For admissible
/// matrices this equals the determinant; the code path shares nothing
/// with the determinant evaluators.
pub fn volume_inclusion_exclusion(a: &AdmissibleMatrix) -> BigRational {
    chain_terms(a).iter().map(|t| t.signed_volume()).sum()
}

/// The vertex/edge skeleton of `F_A`: one vertex per ordered partial
/// partition with coordinates `v_i = sum of a_ij over j with i <= j`, and
/// one edge (labelled by its axis) per flip pair.
#[derive(Debug, Clone)]
pub struct PolytopeSkeleton {
    pub n: usize,
    pub vertices: Vec<(OrderedPartialPartition, Vec<BigRational>)>,
    /// `(vertex index, vertex index, axis)`, axis 1-based.
    pub edges: Vec<(usize, usize, usize)>,
}

pub fn skeleton(a: &AdmissibleMatrix) -> PolytopeSkeleton {
    let n = a.n();
    let opps: Vec<OrderedPartialPartition> = ordered_partial_partitions(n).collect();
    let index: HashMap<OrderedPartialPartition, usize> = opps
        .iter()
        .enumerate()
        .map(|(k, p)| (p.clone(), k))
        .collect();
    let vertices: Vec<(OrderedPartialPartition, Vec<BigRational>)> = opps
        .iter()
        .map(|p| {
            let coords = (1..=n)
                .map(|i| {
                    (1..=n)
                        .filter(|&j| p.leq(i, j))
                        .map(|j| a.get(i - 1, j - 1).clone())
                        .sum()
                })
                .collect();
            (p.clone(), coords)
        })
        .collect();
    let mut edges = Vec::new();
    for (k, p) in opps.iter().enumerate() {
        for z in 1..=n {
            let partner = index[&p.flip(z)];
            if k < partner {
                edges.push((k, partner, z));
            }
        }
    }
    PolytopeSkeleton {
        n,
        vertices,
        edges,
    }
}

/// The closed cells of the axis-aligned arrangement of the chain boxes on
/// which the signed indicator is 1: their union is `F_A` up to boundary.
/// Also the runtime check that the signed indicator only takes values 0
/// and 1, which is the box-level form of the volume lemma.
pub fn positive_cells(a: &AdmissibleMatrix) -> Vec<RatBox> {
    let n = a.n();
    let terms = chain_terms(a);
    let boxes: Vec<(usize, RatBox)> = terms
        .iter()
        .map(|t| (t.depth(), chain_box(a, t)))
        .collect();
    let mut breakpoints: Vec<Vec<BigRational>> = vec![Vec::new(); n];
    for (_, b) in &boxes {
        for i in 0..n {
            breakpoints[i].push(b.lo[i].clone());
            breakpoints[i].push(b.hi[i].clone());
        }
    }
    for axis in breakpoints.iter_mut() {
        axis.sort();
        axis.dedup();
    }
    let mut cells = Vec::new();
    let mut choice = vec![0usize; n];
    'cells: loop {
        let cell = RatBox {
            lo: (0..n).map(|i| breakpoints[i][choice[i]].clone()).collect(),
            hi: (0..n)
                .map(|i| breakpoints[i][choice[i] + 1].clone())
                .collect(),
        };
        let two = BigRational::from_integer(2.into());
        let mid: Vec<BigRational> = cell
            .lo
            .iter()
            .zip(&cell.hi)
            .map(|(lo, hi)| (lo + hi) / &two)
            .collect();
        let mut val = 0i64;
        for (depth, b) in &boxes {
            if b.contains_interior(&mid) {
                val += if depth % 2 == 1 { -1 } else { 1 };
            }
        }
        assert!(
            val == 0 || val == 1,
            "signed chain indicator took value {val}; the inclusion-exclusion would be wrong"
        );
        if val == 1 {
            cells.push(cell);
        }
        // advance the mixed-radix cell cursor
        for i in 0..n {
            choice[i] += 1;
            if choice[i] + 1 < breakpoints[i].len() {
                continue 'cells;
            }
            choice[i] = 0;
        }
        break;
    }
    cells
}

/// Whether a point lies in the closed tile described by its positive cells.
pub fn point_in_tile(cells: &[RatBox], p: &[BigRational]) -> bool {
    cells.iter().any(|c| c.contains(p))
}

#[derive(Debug, Clone)]
pub struct NeighbourReport {
    /// Offsets `v` (entries all in {0,1} or all in {0,-1}) whose translate
    /// shares boundary with the tile.
    pub neighbour_count: usize,
    pub expected_neighbours: usize,
    /// No neighbour translate overlaps the tile in its interior.
    pub boundary_only: bool,
    /// Number of non-neighbour offsets with max-norm at most 2 verified
    /// to miss the tile entirely.
    pub non_neighbours_checked: usize,
    pub non_neighbours_disjoint: bool,
}

/// The candidate neighbour offsets: nonzero `v` with entries all in
/// `{0, 1}` or all in `{0, -1}`.
pub fn neighbour_offsets(n: usize) -> Vec<Vec<BigInt>> {
    let mut out = Vec::new();
    for sign in [1i64, -1] {
        for mask in 1u64..(1u64 << n) {
            out.push(
                (0..n)
                    .map(|i| BigInt::from(if mask >> i & 1 == 1 { sign } else { 0 }))
                    .collect(),
            );
        }
    }
    out
}

/// Exact neighbour audit of the tiling at small dimension: every
/// candidate neighbour must meet the tile in boundary only, and every
/// other lattice offset with max-norm at most 2 must miss it entirely.
pub fn check_neighbours(a: &AdmissibleMatrix) -> Result<NeighbourReport, GeometryError> {
    let n = a.n();
    if n > 3 {
        return Err(GeometryError::DimensionTooLarge { max: 3, got: n });
    }
    let cells = positive_cells(a);
    let neighbours = neighbour_offsets(n);
    let mut neighbour_count = 0;
    let mut boundary_only = true;
    for v in &neighbours {
        let offset = a.apply(v);
        let translated: Vec<RatBox> = cells.iter().map(|c| c.translate(&offset)).collect();
        let mut touches = false;
        let mut interior = false;
        for c in &cells {
            for t in &translated {
                if c.touches(t) {
                    touches = true;
                    if c.interior_overlaps(t) {
                        interior = true;
                    }
                }
            }
        }
        if interior {
            boundary_only = false;
        }
        if touches && !interior {
            neighbour_count += 1;
        }
    }

    // all remaining lattice offsets with max-norm <= 2
    let mut non_neighbours_checked = 0;
    let mut non_neighbours_disjoint = true;
    let mut v = vec![-2i64; n];
    'outer: loop {
        let is_zero = v.iter().all(|&x| x == 0);
        let all01 = v.iter().all(|&x| x == 0 || x == 1);
        let all0m1 = v.iter().all(|&x| x == 0 || x == -1);
        if !is_zero && !all01 && !all0m1 {
            let vi: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
            let offset = a.apply(&vi);
            let translated: Vec<RatBox> = cells.iter().map(|c| c.translate(&offset)).collect();
            let hit = cells
                .iter()
                .any(|c| translated.iter().any(|t| c.touches(t)));
            if hit {
                non_neighbours_disjoint = false;
            }
            non_neighbours_checked += 1;
        }
        for i in 0..n {
            v[i] += 1;
            if v[i] <= 2 {
                continue 'outer;
            }
            v[i] = -2;
        }
        break;
    }

    Ok(NeighbourReport {
        neighbour_count,
        expected_neighbours: 2 * ((1 << n) - 1),
        boundary_only,
        non_neighbours_checked,
        non_neighbours_disjoint,
    })
}

#[derive(Debug, Clone)]
pub struct CoverageReport {
    pub points_covered: usize,
    pub max_descent_steps: usize,
    pub step_budget: usize,
}

/// For each sample point, finds the lattice translate of the tile that
/// covers it: descend into the base cuboid by repeatedly subtracting the
/// column whose coordinate overshoots, then locate the covering translate
/// among the binary-shifted copies. The descent carries a step budget;
/// exceeding it or failing to locate a tile would contradict the covering
/// lemma and is reported as an error.
pub fn check_coverage(
    a: &AdmissibleMatrix,
    samples: &[Vec<BigRational>],
) -> Result<CoverageReport, GeometryError> {
    let n = a.n();
    let cells = positive_cells(a);
    let abs_sum: BigRational = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| a.get(i, j).abs())
        .sum();
    let step_budget = (abs_sum * BigRational::from_integer(10.into()))
        .ceil()
        .to_integer()
        .to_usize()
        .unwrap_or(usize::MAX);
    let row_sums: Vec<BigRational> = (0..n).map(|i| a.row_sum(i)).collect();
    let mut max_steps = 0;

    for x in samples {
        // initial shift: t copies of the all-ones column combination make
        // every coordinate non-negative
        let mut t = BigInt::zero();
        for i in 0..n {
            if x[i].is_negative() {
                let need = (-&x[i] / &row_sums[i]).ceil().to_integer();
                if need > t {
                    t = need;
                }
            }
        }
        let mut y: Vec<BigRational> = (0..n)
            .map(|i| &x[i] + &row_sums[i] * BigRational::from_integer(t.clone()))
            .collect();
        let mut steps = 0usize;
        while let Some(i) = (0..n).find(|&i| y[i] > *a.get(i, i)) {
            for (yk, delta) in y.iter_mut().zip(a.column(i)) {
                *yk -= delta;
            }
            steps += 1;
            if steps > step_budget {
                return Err(GeometryError::NonTermination {
                    budget: step_budget,
                });
            }
        }
        debug_assert!(y.iter().all(|v| !v.is_negative()), "descent keeps y >= 0");

        // y is in the cuboid; chase removed translates until the tile
        // itself covers the point. Every removed part of the cuboid is a
        // translate by a column-subset sum, so each round subtracts one
        // such sum and stays inside the cuboid; the accumulated shift is
        // a nonnegative integer vector (not necessarily binary).
        loop {
            if point_in_tile(&cells, &y) {
                break;
            }
            let subset = (1u64..(1u64 << n)).rev().find(|&s| {
                let shift: Vec<BigRational> = (0..n)
                    .map(|i| {
                        mask_elements(s)
                            .into_iter()
                            .map(|j| a.get(i, j - 1).clone())
                            .sum()
                    })
                    .collect();
                (0..n).all(|i| {
                    let moved = &y[i] - &shift[i];
                    !moved.is_negative() && moved <= *a.get(i, i)
                })
            });
            let Some(s) = subset else {
                return Err(GeometryError::CoverageGap {
                    point: format!("{x:?}"),
                });
            };
            for (i, yk) in y.iter_mut().enumerate() {
                for j in mask_elements(s) {
                    *yk -= a.get(i, j - 1);
                }
            }
            steps += 1;
            if steps > step_budget {
                return Err(GeometryError::NonTermination {
                    budget: step_budget,
                });
            }
        }
        max_steps = max_steps.max(steps);
    }
    Ok(CoverageReport {
        points_covered: samples.len(),
        max_descent_steps: max_steps,
        step_budget,
    })
}

/// Colour of the tile at lattice coordinate `v`: the coordinate sum modulo
/// `n + 1`. Neighbouring tiles always receive distinct colours.
pub fn colouring(v: &[i64]) -> u64 {
    let m = v.len() as i64 + 1;
    let s: i64 = v.iter().sum();
    s.rem_euclid(m) as u64
}

/// An SVG drawing of the 2-dimensional tile and its six neighbours,
/// coloured by coordinate sum. Coordinates are scaled exactly to a common
/// integer grid, so the output involves no rounding.
pub fn tile_svg(a: &AdmissibleMatrix) -> Result<String, GeometryError> {
    let n = a.n();
    if n != 2 {
        return Err(GeometryError::DimensionTooLarge { max: 2, got: n });
    }
    let sk = skeleton(a);
    // walk the 2-regular edge cycle to order the hexagon boundary
    let mut adjacency: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(u, v, _) in &sk.edges {
        adjacency.entry(u).or_default().push(v);
        adjacency.entry(v).or_default().push(u);
    }
    let mut cycle = vec![0usize];
    let mut prev = usize::MAX;
    loop {
        let cur = *cycle.last().unwrap();
        let next = adjacency[&cur]
            .iter()
            .copied()
            .find(|&w| w != prev)
            .expect("cycle vertex has two neighbours");
        if next == 0 {
            break;
        }
        prev = cur;
        cycle.push(next);
    }

    // common denominator so every coordinate becomes an exact integer
    let mut denom = BigInt::one();
    for (_, coords) in &sk.vertices {
        for c in coords {
            denom = num_integer::lcm(denom.clone(), c.denom().clone());
        }
    }
    for row in 0..2 {
        for col in 0..2 {
            denom = num_integer::lcm(denom.clone(), a.get(row, col).denom().clone());
        }
    }
    let scale = BigRational::from_integer(denom.clone());
    let as_int = |v: &BigRational| (v * &scale).to_integer();

    let mut polygons = Vec::new();
    let offsets: Vec<Vec<i64>> = std::iter::once(vec![0i64, 0])
        .chain([
            vec![1, 0],
            vec![0, 1],
            vec![1, 1],
            vec![-1, 0],
            vec![0, -1],
            vec![-1, -1],
        ])
        .collect();
    let palette = ["#8dd3c7", "#fdb462", "#b3de69"];
    let mut min_x = BigInt::zero();
    let mut max_x = BigInt::zero();
    let mut min_y = BigInt::zero();
    let mut max_y = BigInt::zero();
    for v in &offsets {
        let vi: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        let shift = a.apply(&vi);
        let pts: Vec<(BigInt, BigInt)> = cycle
            .iter()
            .map(|&k| {
                let c = &sk.vertices[k].1;
                (as_int(&(&c[0] + &shift[0])), as_int(&(&c[1] + &shift[1])))
            })
            .collect();
        for (x, y) in &pts {
            min_x = min_x.clone().min(x.clone());
            max_x = max_x.clone().max(x.clone());
            min_y = min_y.clone().min(y.clone());
            max_y = max_y.clone().max(y.clone());
        }
        let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x},{y}")).collect();
        let colour = palette[colouring(v) as usize % palette.len()];
        polygons.push(format!(
            "  <polygon points=\"{}\" fill=\"{}\" stroke=\"#333\" stroke-width=\"{}\" />",
            path.join(" "),
            colour,
            &denom / BigInt::from(8) + 1u8,
        ));
    }
    let width = &max_x - &min_x;
    let height = &max_y - &min_y;
    Ok(format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{min_x} {min_y} {width} {height}\">\n\
         <g transform=\"translate(0,{sum}) scale(1,-1)\">\n{body}\n  </g>\n</svg>\n",
        sum = &min_y + &max_y,
        body = polygons.join("\n"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::det_formulas::det_leibniz;

    fn adm(rows: &[Vec<i64>]) -> AdmissibleMatrix {
        AdmissibleMatrix::new(&Matrix::from_i64_rows(rows, &Domain::Integer)).unwrap()
    }

    fn fig1() -> AdmissibleMatrix {
        adm(&[vec![5, -2], vec![-1, 3]])
    }

    fn canonical(n: usize) -> AdmissibleMatrix {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { n as i64 } else { -1 })
                    .collect()
            })
            .collect();
        adm(&rows)
    }

    fn rat(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    #[test]
    fn admissibility_is_enforced() {
        let bad_diag = Matrix::from_i64_rows(&[vec![0, -1], vec![-1, 3]], &Domain::Integer);
        assert!(matches!(
            AdmissibleMatrix::new(&bad_diag),
            Err(GeometryError::NotAdmissible(_))
        ));
        let bad_off = Matrix::from_i64_rows(&[vec![5, 2], vec![-1, 3]], &Domain::Integer);
        assert!(AdmissibleMatrix::new(&bad_off).is_err());
        let bad_sum = Matrix::from_i64_rows(&[vec![1, -2], vec![-1, 3]], &Domain::Integer);
        assert!(AdmissibleMatrix::new(&bad_sum).is_err());
        assert!(AdmissibleMatrix::new(&Matrix::identity(2, &Domain::F2)).is_err());
    }

    #[test]
    fn hexagon_skeleton_matches_the_known_coordinates() {
        let sk = skeleton(&fig1());
        assert_eq!(sk.vertices.len(), 6);
        assert_eq!(sk.edges.len(), 6);
        let coords: Vec<Vec<BigRational>> =
            sk.vertices.iter().map(|(_, c)| c.clone()).collect();
        for want in [
            vec![rat(0), rat(0)],
            vec![rat(5), rat(0)],
            vec![rat(5), rat(2)],
            vec![rat(3), rat(2)],
            vec![rat(3), rat(3)],
            vec![rat(0), rat(3)],
        ] {
            assert!(coords.contains(&want), "missing vertex {want:?}");
        }
        // every vertex has degree n = 2
        let mut degree = [0usize; 6];
        for &(u, v, _) in &sk.edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        assert!(degree.iter().all(|&d| d == 2));
    }

    #[test]
    fn interval_skeleton() {
        let a = adm(&[vec![4]]);
        let sk = skeleton(&a);
        assert_eq!(sk.vertices.len(), 2);
        assert_eq!(sk.edges.len(), 1);
        let mut coords: Vec<BigRational> =
            sk.vertices.iter().map(|(_, c)| c[0].clone()).collect();
        coords.sort();
        assert_eq!(coords, vec![rat(0), rat(4)]);
    }

    #[test]
    fn skeleton_is_n_regular_with_axis_consistent_edges() {
        for a in [canonical(3), canonical(4)] {
            let n = a.n();
            let sk = skeleton(&a);
            let mut degree = vec![0usize; sk.vertices.len()];
            for &(u, v, axis) in &sk.edges {
                degree[u] += 1;
                degree[v] += 1;
                let cu = &sk.vertices[u].1;
                let cv = &sk.vertices[v].1;
                for k in 0..n {
                    if k == axis - 1 {
                        assert_ne!(cu[k], cv[k], "edge must move along its axis");
                    } else {
                        assert_eq!(cu[k], cv[k], "edge must stay put off-axis");
                    }
                }
            }
            assert!(degree.iter().all(|&d| d == n));
        }
        assert_eq!(skeleton(&canonical(3)).vertices.len(), 26);
    }

    #[test]
    fn volumes_match_the_determinant() {
        assert_eq!(volume_inclusion_exclusion(&fig1()), rat(13));
        assert_eq!(volume_inclusion_exclusion(&canonical(3)), rat(16));
        let b4 = canonical(4);
        assert_eq!(
            Scalar::Rat(volume_inclusion_exclusion(&b4)),
            det_leibniz(&b4.to_matrix())
        );
    }

    #[test]
    fn fig4_chain_breakdown() {
        // 27 - 8 - 3: the cuboid, the full-set chain, three pair chains
        let terms = chain_terms(&canonical(3));
        let cuboid: BigRational = terms
            .iter()
            .filter(|t| t.depth() == 0)
            .map(|t| t.volume())
            .sum();
        let full: BigRational = terms
            .iter()
            .filter(|t| t.depth() == 1 && t.increments[0] == 0b111)
            .map(|t| t.volume())
            .sum();
        let pairs: BigRational = terms
            .iter()
            .filter(|t| t.depth() == 1 && t.increments[0].count_ones() == 2)
            .map(|t| t.volume())
            .sum();
        assert_eq!(cuboid, rat(27));
        assert_eq!(full, rat(8));
        assert_eq!(pairs, rat(3));
        assert_eq!(terms.len(), 5);
    }

    #[test]
    fn cells_reconstruct_the_volume() {
        for a in [fig1(), canonical(3)] {
            let total: BigRational = positive_cells(&a).iter().map(|c| c.volume()).sum();
            assert_eq!(total, volume_inclusion_exclusion(&a));
        }
    }

    #[test]
    fn neighbour_audit() {
        let report = check_neighbours(&fig1()).unwrap();
        assert_eq!(report.neighbour_count, 6);
        assert_eq!(report.expected_neighbours, 6);
        assert!(report.boundary_only);
        assert!(report.non_neighbours_disjoint);
        assert!(report.non_neighbours_checked > 0);

        let report = check_neighbours(&canonical(3)).unwrap();
        assert_eq!(report.neighbour_count, 14);
        assert!(report.boundary_only);
        assert!(report.non_neighbours_disjoint);

        assert!(matches!(
            check_neighbours(&canonical(4)),
            Err(GeometryError::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn coverage_descent() {
        let a = fig1();
        let samples = vec![
            vec![rat(100), rat(-50)],
            vec![rat(1), rat(1)], // interior point of the cuboid
            vec![rat(-3), rat(7)],
        ];
        let report = check_coverage(&a, &samples).unwrap();
        assert_eq!(report.points_covered, 3);
        assert!(report.max_descent_steps <= report.step_budget);
    }

    #[test]
    fn interior_point_needs_no_descent() {
        let a = fig1();
        let report = check_coverage(&a, &[vec![rat(1), rat(1)]]).unwrap();
        assert_eq!(report.max_descent_steps, 0);
    }

    #[test]
    fn colouring_separates_neighbours() {
        for n in 1..=6usize {
            for v in neighbour_offsets(n) {
                let vi: Vec<i64> = v.iter().map(|x| x.to_i64().unwrap()).collect();
                assert_ne!(colouring(&vi), 0, "offset {vi:?} must change colour");
            }
        }
        assert_eq!(colouring(&[1, 0]), 1);
        assert_eq!(colouring(&[1, 1, 1]), 3);
        assert_eq!(colouring(&[-1, 0]), 2);
    }

    #[test]
    fn faces_from_axis_labelled_subgraphs() {
        let a = canonical(3);
        let sk = skeleton(&a);
        for (z1, z2) in [(1usize, 2usize), (1, 3), (2, 3)] {
            // connected components of the subgraph with labels in {z1, z2}
            let mut parent: Vec<usize> = (0..sk.vertices.len()).collect();
            fn find(p: &mut [usize], mut x: usize) -> usize {
                while p[x] != x {
                    p[x] = p[p[x]];
                    x = p[x];
                }
                x
            }
            let mut degree = vec![0usize; sk.vertices.len()];
            for &(u, v, axis) in &sk.edges {
                if axis == z1 || axis == z2 {
                    degree[u] += 1;
                    degree[v] += 1;
                    let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                    parent[ru] = rv;
                }
            }
            assert!(degree.iter().all(|&d| d == 2), "subgraph must be 2-regular");
            let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
            for k in 0..sk.vertices.len() {
                groups.entry(find(&mut parent, k)).or_default().push(k);
            }
            let off_axis = (1..=3).find(|z| *z != z1 && *z != z2).unwrap() - 1;
            for (_, members) in groups {
                assert!(members.len() >= 4, "a 2-face has at least 4 vertices");
                let fixed = &sk.vertices[members[0]].1[off_axis];
                for &m in &members {
                    assert_eq!(
                        &sk.vertices[m].1[off_axis], fixed,
                        "component must be coplanar off-axis"
                    );
                }
                for axis in [z1 - 1, z2 - 1] {
                    let mut values: Vec<&BigRational> =
                        members.iter().map(|&m| &sk.vertices[m].1[axis]).collect();
                    values.sort();
                    values.dedup();
                    assert!(values.len() >= 2, "face must extend along axis {axis}");
                }
            }
        }
    }

    #[test]
    fn unit_cube_census_for_the_canonical_matrix() {
        for n in 2..=4usize {
            let a = canonical(n);
            let cells = positive_cells(&a);
            let half = BigRational::new(1.into(), 2.into());
            let mut census = 0u64;
            let mut corner = vec![1i64; n];
            'cubes: loop {
                let mid: Vec<BigRational> =
                    corner.iter().map(|&c| rat(c) - &half).collect();
                let inside = cells.iter().any(|b| b.contains_interior(&mid));
                let mut sorted = corner.clone();
                sorted.sort_unstable();
                let expected = sorted
                    .iter()
                    .enumerate()
                    .all(|(i, &x)| 1 <= x && x <= i as i64 + 1);
                assert_eq!(inside, expected, "cube at {corner:?}");
                if inside {
                    census += 1;
                }
                for i in 0..n {
                    corner[i] += 1;
                    if corner[i] <= n as i64 {
                        continue 'cubes;
                    }
                    corner[i] = 1;
                }
                break;
            }
            assert_eq!(census, ((n + 1) as u64).pow(n as u32 - 1), "n = {n}");
        }
    }

    #[test]
    fn svg_emits_seven_tiles() {
        let svg = tile_svg(&fig1()).unwrap();
        assert_eq!(svg.matches("<polygon").count(), 7);
        assert!(svg.starts_with("<svg"));
        assert!(tile_svg(&canonical(3)).is_err());
    }
}
