//! Backtracking search over tuples of rank-1 4x4 matrices on GF(2),
//! establishing that no 9-tuple (and, with the unique-hit filter, no
//! 10-tuple) can span the 6-dimensional antisymmetric subspace, which is
//! what a shorter-than-12 decomposition of the 4x4 determinant tensor
//! would require.
//!
//! The search explores lexicographically nondecreasing tuples whose first
//! matrix is one of the two canonical single-entry forms. The pruning
//! invariant: appending one matrix grows the intersection of the running
//! span with the antisymmetric subspace by at most one dimension, so a
//! prefix of length `s` whose intersection has dimension below
//! `6 - (r - s)` can never complete. Intersection dimensions are tracked
//! as `rank(span) - rank(span in the quotient mod antisymmetric)`, with
//! tiny copy-on-branch echelon states, so parallel workers never share
//! mutable state and the outcome is schedule-independent.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// A 4x4 matrix over GF(2), bit `4*(i-1) + (j-1)` holding entry `(i, j)`,
/// bit 0 least significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PackedF2Matrix(pub u16);

impl PackedF2Matrix {
    pub fn from_rows(rows: &[[u8; 4]; 4]) -> PackedF2Matrix {
        let mut bits = 0u16;
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v & 1 == 1 {
                    bits |= 1 << (4 * i + j);
                }
            }
        }
        PackedF2Matrix(bits)
    }

    /// Entry `(i, j)`, 1-based.
    pub fn get(&self, i: usize, j: usize) -> u8 {
        (self.0 >> (4 * (i - 1) + (j - 1)) & 1) as u8
    }

    pub fn transpose(&self) -> PackedF2Matrix {
        let mut out = 0u16;
        for i in 0..4 {
            for j in 0..4 {
                if self.0 >> (4 * i + j) & 1 == 1 {
                    out |= 1 << (4 * j + i);
                }
            }
        }
        PackedF2Matrix(out)
    }

    /// Outer product `u v^T` of two vectors given as 4-bit masks.
    pub fn outer(u: u8, v: u8) -> PackedF2Matrix {
        let mut bits = 0u16;
        for i in 0..4 {
            if u >> i & 1 == 1 {
                bits |= (v as u16 & 0xf) << (4 * i);
            }
        }
        PackedF2Matrix(bits)
    }

    pub fn rank(&self) -> u32 {
        let mut rows = [
            self.0 & 0xf,
            self.0 >> 4 & 0xf,
            self.0 >> 8 & 0xf,
            self.0 >> 12 & 0xf,
        ];
        let mut rank = 0;
        for col in 0..4 {
            let Some(p) = (rank..4).find(|&r| rows[r] >> col & 1 == 1) else {
                continue;
            };
            rows.swap(rank, p);
            for r in 0..4 {
                if r != rank && rows[r] >> col & 1 == 1 {
                    rows[r] ^= rows[rank];
                }
            }
            rank += 1;
        }
        rank as u32
    }

    /// `u^T M v` for vectors given as 4-bit masks.
    pub fn bilinear(&self, u: u8, v: u8) -> u8 {
        ((self.0 & PackedF2Matrix::outer(u, v).0).count_ones() & 1) as u8
    }
}

/// Lexicographic order on the entry string `(1,1), (1,2), .., (4,4)` with
/// `0 < 1`; since the entry string reads bits from least significant up,
/// this is the numeric order of the bit-reversed word.
pub fn lex_leq(a: PackedF2Matrix, b: PackedF2Matrix) -> bool {
    a.0.reverse_bits() <= b.0.reverse_bits()
}

/// All 225 rank-1 matrices (15 nonzero `u` times 15 nonzero `v`), sorted
/// lexicographically.
pub fn enum_rank1_f2() -> Vec<PackedF2Matrix> {
    let mut out = Vec::with_capacity(225);
    for u in 1u8..16 {
        for v in 1u8..16 {
            out.push(PackedF2Matrix::outer(u, v));
        }
    }
    out.sort_by_key(|m| m.0.reverse_bits());
    out
}

/// Basis masks of the antisymmetric (alternating) subspace of 4x4
/// matrices over GF(2): `e_i (x) e_j + e_j (x) e_i` for `i < j`.
pub fn antisymmetric_masks() -> [u16; 6] {
    let mut out = [0u16; 6];
    let mut k = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            out[k] = (1 << (4 * i + j)) | (1 << (4 * j + i));
            k += 1;
        }
    }
    out
}

/// Canonical representative modulo the antisymmetric subspace: fold every
/// strictly-lower entry onto its mirror, leaving support on the diagonal
/// and upper triangle only (a 10-dimensional coordinate system for the
/// quotient).
pub fn quotient_rep(m: u16) -> u16 {
    let mut v = m;
    for i in 0..4u16 {
        for j in 0..i {
            let low = 1 << (4 * i + j);
            if v & low != 0 {
                v ^= low | (1 << (4 * j + i));
            }
        }
    }
    v
}

/// Copy-on-branch span tracker: one echelon for the raw span, one for its
/// image in the quotient modulo the antisymmetric subspace. The
/// intersection dimension is the difference of the two ranks.
#[derive(Debug, Clone, Copy)]
pub struct SpanState {
    full: [u16; 16],
    quot: [u16; 16],
    full_rank: u8,
    quot_rank: u8,
}

impl SpanState {
    pub fn new() -> SpanState {
        SpanState {
            full: [0; 16],
            quot: [0; 16],
            full_rank: 0,
            quot_rank: 0,
        }
    }

    fn reduce(rows: &mut [u16; 16], mut v: u16) -> bool {
        while v != 0 {
            let lead = 15 - v.leading_zeros() as usize;
            if rows[lead] == 0 {
                rows[lead] = v;
                return true;
            }
            v ^= rows[lead];
        }
        false
    }

    pub fn insert(&mut self, m: PackedF2Matrix) {
        if Self::reduce(&mut self.full, m.0) {
            self.full_rank += 1;
        }
        if Self::reduce(&mut self.quot, quotient_rep(m.0)) {
            self.quot_rank += 1;
        }
    }

    /// Dimension of `span intersect antisymmetric`.
    pub fn intersection_dim(&self) -> u8 {
        self.full_rank - self.quot_rank
    }
}

impl Default for SpanState {
    fn default() -> Self {
        SpanState::new()
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("r must lie in 1..=11, got {0}")]
    InvalidR(usize),
    #[error("r = 11 is beyond desk scale and compile-time gated; rebuild with the `r11` feature")]
    R11Disabled,
    #[error("node budget of {0} exceeded")]
    RunAborted(u64),
    #[error("certificate rejected: {0}")]
    CertificateRejected(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// The two canonical first matrices: a single 1 in the last or the
/// penultimate entry. Any decomposition can be basis-changed so that its
/// lexicographically first matrix is one of these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FirstMatrix {
    LastEntry,
    PenultimateEntry,
}

impl FirstMatrix {
    pub fn matrix(&self) -> PackedF2Matrix {
        match self {
            FirstMatrix::LastEntry => PackedF2Matrix(1 << 15),
            FirstMatrix::PenultimateEntry => PackedF2Matrix(1 << 14),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub r: usize,
    /// Restrict to one canonical first matrix; `None` searches both.
    pub first_matrix: Option<FirstMatrix>,
    /// Worker threads; 0 picks rayon's default.
    pub workers: usize,
    /// Discard completed tuples that violate the unique-hit lemma.
    pub lemma_filter: bool,
    pub node_budget: Option<u64>,
    pub checkpoint: Option<PathBuf>,
}

impl SearchConfig {
    pub fn new(r: usize) -> SearchConfig {
        SearchConfig {
            r,
            first_matrix: None,
            workers: 0,
            lemma_filter: true,
            node_budget: None,
            checkpoint: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    NoSolution,
    Candidates(Vec<Vec<PackedF2Matrix>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrunedSample {
    /// Alphabet indices of the pruned prefix, in order.
    pub prefix: Vec<u16>,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub r: usize,
    pub lemma_filter: bool,
    pub outcome: SearchOutcome,
    pub nodes_visited: u64,
    pub pruned: u64,
    pub lemma_eliminated: u64,
    pub wall_millis: u64,
    pub pruned_samples: Vec<PrunedSample>,
}

const SAMPLES_PER_JOB: usize = 4;
const MAX_SAMPLES: usize = 1000;

struct JobOutput {
    nodes: u64,
    pruned: u64,
    lemma_eliminated: u64,
    candidates: Vec<Vec<u16>>,
    samples: Vec<PrunedSample>,
}

#[derive(Serialize, Deserialize, Default)]
struct Checkpoint {
    r: usize,
    lemma_filter: bool,
    jobs: HashMap<usize, CheckpointJob>,
}

#[derive(Serialize, Deserialize, Clone)]
struct CheckpointJob {
    nodes: u64,
    pruned: u64,
    lemma_eliminated: u64,
    candidates: Vec<Vec<u16>>,
    samples: Vec<PrunedSample>,
}

/// Runs the backtracking search. The outcome, node counts and candidate
/// list are independent of the worker count.
pub fn search(config: &SearchConfig) -> Result<SearchResult, SearchError> {
    if config.r == 0 || config.r > 11 {
        return Err(SearchError::InvalidR(config.r));
    }
    if config.r == 11 && !cfg!(feature = "r11") {
        return Err(SearchError::R11Disabled);
    }
    let start = Instant::now();
    let alphabet = enum_rank1_f2();
    let quotients: Vec<u16> = alphabet.iter().map(|m| quotient_rep(m.0)).collect();
    let r = config.r;

    let firsts: Vec<FirstMatrix> = match config.first_matrix {
        Some(f) => vec![f],
        None => vec![FirstMatrix::LastEntry, FirstMatrix::PenultimateEntry],
    };

    // seed depth-2 jobs (depth-1 and depth-2 prune checks applied here)
    let mut jobs: Vec<(Vec<u16>, SpanState)> = Vec::new();
    let mut seed_nodes = 0u64;
    let mut seed_pruned = 0u64;
    let mut seed_samples = Vec::new();
    let mut seed_candidates: Vec<Vec<u16>> = Vec::new();
    let mut seed_lemma = 0u64;
    for first in &firsts {
        let first_idx = alphabet
            .iter()
            .position(|m| *m == first.matrix())
            .expect("canonical matrices are rank 1") as u16;
        seed_nodes += 1;
        let mut st = SpanState::new();
        st.insert(alphabet[first_idx as usize]);
        if prune(st, 1, r) {
            seed_pruned += 1;
            seed_samples.push(PrunedSample {
                prefix: vec![first_idx],
            });
            continue;
        }
        if r == 1 {
            complete(
                &[first_idx],
                st,
                &alphabet,
                config.lemma_filter,
                &mut seed_candidates,
                &mut seed_lemma,
            );
            continue;
        }
        for idx in first_idx..225 {
            seed_nodes += 1;
            let mut st2 = st;
            st2.insert(alphabet[idx as usize]);
            if prune(st2, 2, r) {
                seed_pruned += 1;
                if seed_samples.len() < MAX_SAMPLES {
                    seed_samples.push(PrunedSample {
                        prefix: vec![first_idx, idx],
                    });
                }
                continue;
            }
            if r == 2 {
                complete(
                    &[first_idx, idx],
                    st2,
                    &alphabet,
                    config.lemma_filter,
                    &mut seed_candidates,
                    &mut seed_lemma,
                );
            } else {
                jobs.push((vec![first_idx, idx], st2));
            }
        }
    }

    // resume support: load any previously completed jobs
    let mut checkpoint = match &config.checkpoint {
        Some(path) if path.exists() => {
            let loaded: Checkpoint = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            if loaded.r != r || loaded.lemma_filter != config.lemma_filter {
                Checkpoint {
                    r,
                    lemma_filter: config.lemma_filter,
                    jobs: HashMap::new(),
                }
            } else {
                loaded
            }
        }
        _ => Checkpoint {
            r,
            lemma_filter: config.lemma_filter,
            jobs: HashMap::new(),
        },
    };
    checkpoint.r = r;
    checkpoint.lemma_filter = config.lemma_filter;

    let todo: Vec<usize> = (0..jobs.len())
        .filter(|k| !checkpoint.jobs.contains_key(k))
        .collect();
    let nodes_so_far: u64 = checkpoint.jobs.values().map(|j| j.nodes).sum();
    let budget_counter = AtomicU64::new(seed_nodes + nodes_so_far);
    let aborted = AtomicBool::new(false);
    let checkpoint_state = Mutex::new((checkpoint, config.checkpoint.clone()));

    let run_job = |&k: &usize| -> (usize, Option<JobOutput>) {
        if aborted.load(Ordering::Relaxed) {
            return (k, None);
        }
        let (prefix, state) = &jobs[k];
        let mut ctx = DfsCtx {
            alphabet: &alphabet,
            quotients: &quotients,
            r,
            lemma_filter: config.lemma_filter,
            out: JobOutput {
                nodes: 0,
                pruned: 0,
                lemma_eliminated: 0,
                candidates: Vec::new(),
                samples: Vec::new(),
            },
        };
        let mut stack = prefix.clone();
        dfs(&mut ctx, &mut stack, *state);
        if let Some(budget) = config.node_budget {
            let total = budget_counter.fetch_add(ctx.out.nodes, Ordering::Relaxed) + ctx.out.nodes;
            if total > budget {
                aborted.store(true, Ordering::Relaxed);
            }
        }
        let record = CheckpointJob {
            nodes: ctx.out.nodes,
            pruned: ctx.out.pruned,
            lemma_eliminated: ctx.out.lemma_eliminated,
            candidates: ctx.out.candidates.clone(),
            samples: ctx.out.samples.clone(),
        };
        {
            let mut guard = checkpoint_state.lock().unwrap();
            guard.0.jobs.insert(k, record);
            if let Some(path) = guard.1.clone() {
                let body = serde_json::to_string(&guard.0).expect("serializable checkpoint");
                let _ = std::fs::write(path, body);
            }
        }
        (k, Some(ctx.out))
    };

    let outputs: Vec<(usize, Option<JobOutput>)> = if config.workers == 0 {
        todo.par_iter().map(run_job).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .expect("thread pool");
        pool.install(|| todo.par_iter().map(run_job).collect())
    };

    if aborted.load(Ordering::Relaxed) {
        return Err(SearchError::RunAborted(config.node_budget.unwrap_or(0)));
    }

    // merge in canonical job order: fresh outputs plus checkpointed ones
    let (final_checkpoint, _) = checkpoint_state.into_inner().unwrap();
    let mut merged: Vec<(usize, CheckpointJob)> = final_checkpoint.jobs.into_iter().collect();
    drop(outputs);
    merged.sort_by_key(|(k, _)| *k);

    let mut nodes = seed_nodes;
    let mut pruned = seed_pruned;
    let mut lemma_eliminated = seed_lemma;
    let mut candidates: Vec<Vec<u16>> = seed_candidates;
    let mut samples = seed_samples;
    for (_, j) in merged {
        nodes += j.nodes;
        pruned += j.pruned;
        lemma_eliminated += j.lemma_eliminated;
        candidates.extend(j.candidates);
        for s in j.samples {
            if samples.len() < MAX_SAMPLES {
                samples.push(s);
            }
        }
    }

    let tuples: Vec<Vec<PackedF2Matrix>> = dedup_by_transpose(
        candidates
            .into_iter()
            .map(|c| c.iter().map(|&i| alphabet[i as usize]).collect())
            .collect(),
    );
    let outcome = if tuples.is_empty() {
        SearchOutcome::NoSolution
    } else {
        SearchOutcome::Candidates(tuples)
    };
    Ok(SearchResult {
        r,
        lemma_filter: config.lemma_filter,
        outcome,
        nodes_visited: nodes,
        pruned,
        lemma_eliminated,
        wall_millis: start.elapsed().as_millis() as u64,
        pruned_samples: samples,
    })
}

/// A prefix of length `s` dies when its antisymmetric intersection cannot
/// reach dimension 6 in the remaining `r - s` steps.
fn prune(state: SpanState, s: usize, r: usize) -> bool {
    (state.intersection_dim() as i64) < 6 - (r as i64 - s as i64)
}

fn complete(
    prefix: &[u16],
    state: SpanState,
    alphabet: &[PackedF2Matrix],
    lemma_filter: bool,
    candidates: &mut Vec<Vec<u16>>,
    lemma_eliminated: &mut u64,
) {
    debug_assert_eq!(state.intersection_dim(), 6);
    if lemma_filter {
        let tuple: Vec<PackedF2Matrix> = prefix.iter().map(|&i| alphabet[i as usize]).collect();
        if !lemma_filter_check(&tuple) {
            *lemma_eliminated += 1;
            return;
        }
    }
    candidates.push(prefix.to_vec());
}

struct DfsCtx<'a> {
    alphabet: &'a [PackedF2Matrix],
    quotients: &'a [u16],
    r: usize,
    lemma_filter: bool,
    out: JobOutput,
}

fn dfs(ctx: &mut DfsCtx<'_>, prefix: &mut Vec<u16>, state: SpanState) {
    let depth = prefix.len();
    if depth == ctx.r {
        complete(
            prefix,
            state,
            ctx.alphabet,
            ctx.lemma_filter,
            &mut ctx.out.candidates,
            &mut ctx.out.lemma_eliminated,
        );
        return;
    }
    let start = *prefix.last().expect("jobs seed two levels");
    for idx in start..225 {
        ctx.out.nodes += 1;
        let mut st = state;
        if SpanState::reduce(&mut st.full, ctx.alphabet[idx as usize].0) {
            st.full_rank += 1;
        }
        if SpanState::reduce(&mut st.quot, ctx.quotients[idx as usize]) {
            st.quot_rank += 1;
        }
        if prune(st, depth + 1, ctx.r) {
            ctx.out.pruned += 1;
            if ctx.out.samples.len() < SAMPLES_PER_JOB {
                let mut p = prefix.clone();
                p.push(idx);
                ctx.out.samples.push(PrunedSample { prefix: p });
            }
            continue;
        }
        prefix.push(idx);
        dfs(ctx, prefix, st);
        prefix.pop();
    }
}

/// Deduplicates candidate tuples up to transposing every matrix (and
/// re-sorting); the smaller of a tuple and its transpose is kept.
pub fn dedup_by_transpose(tuples: Vec<Vec<PackedF2Matrix>>) -> Vec<Vec<PackedF2Matrix>> {
    let canon = |t: &[PackedF2Matrix]| -> Vec<u16> {
        let mut transposed: Vec<u16> = t.iter().map(|m| m.transpose().0.reverse_bits()).collect();
        transposed.sort_unstable();
        let plain: Vec<u16> = t.iter().map(|m| m.0.reverse_bits()).collect();
        plain.min(transposed)
    };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for t in tuples {
        if seen.insert(canon(&t)) {
            out.push(t);
        }
    }
    out
}

/// The unique-hit filter: a minimal decomposition admits no pair of
/// nonzero vectors `(u, v)` with `u^T A_i v = 1` for exactly one index.
pub fn lemma_filter_check(tuple: &[PackedF2Matrix]) -> bool {
    for u in 1u8..16 {
        for v in 1u8..16 {
            let mask = PackedF2Matrix::outer(u, v).0;
            let hits = tuple
                .iter()
                .filter(|m| (m.0 & mask).count_ones() & 1 == 1)
                .count();
            if hits == 1 {
                return false;
            }
        }
    }
    true
}

/// Contraction of the 4x4 determinant tensor with `(u, v)` on its first
/// two slots: entry `(l, m)` sums `u_j v_k` over the complementary pair.
pub fn det_contraction(u: u8, v: u8) -> PackedF2Matrix {
    let mut bits = 0u16;
    for l in 0..4u8 {
        for m in 0..4u8 {
            if l == m {
                continue;
            }
            let rest: Vec<u8> = (0..4).filter(|&x| x != l && x != m).collect();
            let (p, q) = (rest[0], rest[1]);
            let val = (u >> p & 1) & (v >> q & 1) ^ (u >> q & 1) & (v >> p & 1);
            if val == 1 {
                bits |= 1 << (4 * l + m);
            }
        }
    }
    PackedF2Matrix(bits)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairContractionVerdict {
    Feasible,
    /// 1-based index whose candidate sets across constraints are
    /// incompatible.
    Infeasible { index: usize },
}

/// For every `(u, v)` hit by exactly two indices `{i, j}`, the two
/// companion matrices on the other side of the decomposition are forced
/// to split the rank-2 contraction into two rank-1 matrices; each such
/// constraint leaves six candidates. An index whose candidate sets across
/// constraints have empty intersection rules out the whole tuple.
pub fn pair_contraction_check(tuple: &[PackedF2Matrix]) -> PairContractionVerdict {
    let rank1: HashSet<u16> = enum_rank1_f2().iter().map(|m| m.0).collect();
    let mut candidates: HashMap<usize, HashSet<u16>> = HashMap::new();
    for u in 1u8..16 {
        for v in 1u8..16 {
            let mask = PackedF2Matrix::outer(u, v).0;
            let hits: Vec<usize> = tuple
                .iter()
                .enumerate()
                .filter(|(_, m)| (m.0 & mask).count_ones() & 1 == 1)
                .map(|(i, _)| i)
                .collect();
            if hits.len() != 2 {
                continue;
            }
            let contraction = det_contraction(u, v).0;
            let splittings: HashSet<u16> = rank1
                .iter()
                .copied()
                .filter(|&r| rank1.contains(&(contraction ^ r)))
                .collect();
            for &i in &hits {
                match candidates.get_mut(&i) {
                    None => {
                        candidates.insert(i, splittings.clone());
                    }
                    Some(set) => {
                        set.retain(|r| splittings.contains(r));
                    }
                }
                if candidates[&i].is_empty() {
                    return PairContractionVerdict::Infeasible { index: i + 1 };
                }
            }
        }
    }
    PairContractionVerdict::Feasible
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub r: usize,
    pub lemma_filter: bool,
    pub outcome: String,
    pub nodes_visited: u64,
    pub pruned: u64,
    pub lemma_eliminated: u64,
    pub candidates: Vec<Vec<u16>>,
    pub wall_seconds: f64,
    pub alphabet_hash: String,
    pub pruned_samples: Vec<PrunedSample>,
    pub body_hash: String,
}

fn alphabet_hash() -> String {
    let mut hasher = Sha256::new();
    for m in enum_rank1_f2() {
        hasher.update(m.0.to_le_bytes());
    }
    hex::encode(hasher.finalize())
}

fn body_digest(cert: &Certificate) -> String {
    let mut clone = Certificate {
        body_hash: String::new(),
        outcome: cert.outcome.clone(),
        alphabet_hash: cert.alphabet_hash.clone(),
        candidates: cert.candidates.clone(),
        pruned_samples: cert.pruned_samples.clone(),
        ..*cert
    };
    clone.body_hash = String::new();
    let body = serde_json::to_string(&clone).expect("serializable certificate");
    hex::encode(Sha256::digest(body.as_bytes()))
}

/// Renders a replayable certificate of a finished run.
pub fn certificate(result: &SearchResult) -> Certificate {
    let candidates = match &result.outcome {
        SearchOutcome::NoSolution => Vec::new(),
        SearchOutcome::Candidates(ts) => ts
            .iter()
            .map(|t| t.iter().map(|m| m.0).collect())
            .collect(),
    };
    let mut cert = Certificate {
        r: result.r,
        lemma_filter: result.lemma_filter,
        outcome: match &result.outcome {
            SearchOutcome::NoSolution => "no_solution".into(),
            SearchOutcome::Candidates(_) => "candidates".into(),
        },
        nodes_visited: result.nodes_visited,
        pruned: result.pruned,
        lemma_eliminated: result.lemma_eliminated,
        candidates,
        wall_seconds: result.wall_millis as f64 / 1000.0,
        alphabet_hash: alphabet_hash(),
        pruned_samples: result.pruned_samples.clone(),
        body_hash: String::new(),
    };
    cert.body_hash = body_digest(&cert);
    cert
}

pub fn write_certificate(result: &SearchResult, path: &Path) -> Result<(), SearchError> {
    let cert = certificate(result);
    std::fs::write(path, serde_json::to_string_pretty(&cert)?)?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct CertificateReport {
    pub samples_replayed: usize,
    pub extensions_checked: u64,
}

/// Re-checks a certificate: hashes must match, and every logged pruned
/// node is replayed from scratch — its intersection dimension is
/// recomputed with a fresh elimination, the prune inequality is
/// re-verified, and every nondecreasing single-matrix extension is checked
/// to grow the intersection by at most one dimension, which is what makes
/// the prune sound for all deeper completions.
pub fn verify_certificate(json: &str) -> Result<CertificateReport, SearchError> {
    let cert: Certificate =
        serde_json::from_str(json).map_err(|e| SearchError::CertificateRejected(e.to_string()))?;
    if cert.alphabet_hash != alphabet_hash() {
        return Err(SearchError::CertificateRejected(
            "alphabet hash mismatch".into(),
        ));
    }
    if cert.body_hash != body_digest(&cert) {
        return Err(SearchError::CertificateRejected(
            "body hash mismatch (certificate was modified)".into(),
        ));
    }
    let alphabet = enum_rank1_f2();
    let mut extensions = 0u64;
    for sample in &cert.pruned_samples {
        if sample.prefix.is_empty() || sample.prefix.iter().any(|&i| i as usize >= 225) {
            return Err(SearchError::CertificateRejected(format!(
                "malformed pruned sample {:?}",
                sample.prefix
            )));
        }
        if sample.prefix.windows(2).any(|w| w[0] > w[1]) {
            return Err(SearchError::CertificateRejected(format!(
                "pruned sample {:?} is not nondecreasing",
                sample.prefix
            )));
        }
        let dim = intersection_dim_from_scratch(
            &sample
                .prefix
                .iter()
                .map(|&i| alphabet[i as usize])
                .collect::<Vec<_>>(),
        );
        let s = sample.prefix.len();
        if (dim as i64) >= 6 - (cert.r as i64 - s as i64) {
            return Err(SearchError::CertificateRejected(format!(
                "sample {:?} was not actually prunable (dim {dim})",
                sample.prefix
            )));
        }
        // completions are nondecreasing, so only matrices from the last
        // index upward can extend this prefix
        let last = *sample.prefix.last().unwrap();
        for idx in last..225 {
            let mut extended: Vec<PackedF2Matrix> =
                sample.prefix.iter().map(|&i| alphabet[i as usize]).collect();
            extended.push(alphabet[idx as usize]);
            let grown = intersection_dim_from_scratch(&extended);
            extensions += 1;
            if grown > dim + 1 {
                return Err(SearchError::CertificateRejected(format!(
                    "extension of {:?} by {idx} grew the intersection by more than one",
                    sample.prefix
                )));
            }
        }
    }
    Ok(CertificateReport {
        samples_replayed: cert.pruned_samples.len(),
        extensions_checked: extensions,
    })
}

/// Intersection dimension computed non-incrementally: rank of the stacked
/// `{A_i}` plus 6, minus the rank of `{A_i}` stacked with the
/// antisymmetric basis.
pub fn intersection_dim_from_scratch(tuple: &[PackedF2Matrix]) -> u8 {
    let span_rank = gf2_rank(tuple.iter().map(|m| m.0));
    let joint_rank = gf2_rank(
        tuple
            .iter()
            .map(|m| m.0)
            .chain(antisymmetric_masks().into_iter()),
    );
    span_rank + 6 - joint_rank
}

fn gf2_rank<I: IntoIterator<Item = u16>>(rows: I) -> u8 {
    let mut echelon = [0u16; 16];
    let mut rank = 0u8;
    for v in rows {
        if SpanState::reduce(&mut echelon, v) {
            rank += 1;
        }
    }
    rank
}
