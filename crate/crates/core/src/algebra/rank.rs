//! Exact linear algebra over `Q(i)` and sampled generic ranks of Jacobians.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{degree, GaussianRational, Order, Series, SeriesMap};

pub type Matrix = Vec<Vec<GaussianRational>>;

/// Row rank by Gaussian elimination over `Q(i)`.
pub fn rank(mat: &[Vec<GaussianRational>]) -> usize {
    let mut a: Matrix = mat.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].inv().expect("nonzero pivot");
        for i in r + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for k in c..cols {
                let t = &f * &a[r][k];
                a[i][k] -= &t;
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

pub fn det(mat: &[Vec<GaussianRational>]) -> GaussianRational {
    let n = mat.len();
    let mut a: Matrix = mat.to_vec();
    let mut acc = GaussianRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return GaussianRational::zero();
        };
        if p != c {
            a.swap(p, c);
            acc = -acc;
        }
        acc *= &a[c][c];
        let inv = a[c][c].inv().expect("nonzero pivot");
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for k in c..n {
                let t = &f * &a[c][k];
                a[i][k] -= &t;
            }
        }
    }
    acc
}

/// Symbolic determinant by Laplace expansion along the first row.
pub fn det_series(mat: &[Vec<Series>]) -> Series {
    let n = mat.len();
    assert!(n > 0 && mat.iter().all(|r| r.len() == n), "square matrix required");
    if n == 1 {
        return mat[0][0].clone();
    }
    let mut acc = Series::zero(mat[0][0].space(), mat.iter().flatten().fold(Order::Exact, |o, s| o.min(s.order())));
    for j in 0..n {
        if mat[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Series>> = mat[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, s)| s.clone())
                    .collect()
            })
            .collect();
        let t = &mat[0][j] * &det_series(&minor);
        acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
    }
    acc
}

/// Incremental row echelon form over sparse vectors keyed by `K`.
#[derive(Clone, Debug)]
pub struct SparseEchelon<K: Ord + Clone> {
    rows: BTreeMap<K, BTreeMap<K, GaussianRational>>,
}

impl<K: Ord + Clone> Default for SparseEchelon<K> {
    fn default() -> Self {
        Self {
            rows: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> SparseEchelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reduces `v` against the stored rows; stores it and returns `true` if
    /// it is independent of them.
    pub fn insert(&mut self, v: impl IntoIterator<Item = (K, GaussianRational)>) -> bool {
        let mut v: BTreeMap<K, GaussianRational> =
            v.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        loop {
            let Some((lead, c)) = v.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
                return false;
            };
            match self.rows.get(&lead) {
                Some(row) => {
                    // rows are normalized to leading coefficient 1
                    for (k, x) in row {
                        let t = &c * x;
                        let e = v.entry(k.clone()).or_default();
                        *e -= &t;
                        if e.is_zero() {
                            v.remove(k);
                        }
                    }
                }
                None => {
                    let inv = c.inv().expect("nonzero leading coefficient");
                    for x in v.values_mut() {
                        *x *= &inv;
                    }
                    self.rows.insert(lead, v);
                    return true;
                }
            }
        }
    }
}

/// Outcome of a sampled generic-rank computation.
#[derive(Clone, Debug, PartialEq)]
pub struct RankResult {
    pub rank: usize,
    /// Point (or, for truncated input, direction of the sampling line) where
    /// `rank` was attained.
    pub witness: Vec<GaussianRational>,
    /// The rank is proven equal to the generic rank, not only a lower bound.
    pub certified: bool,
    /// Ranks were computed on jets along random lines through the origin.
    pub jet: bool,
    pub per_trial: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct RankOptions {
    pub trials: usize,
    pub seed: u64,
    pub numer_bound: i64,
    pub certify: bool,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions {
            trials: 5,
            seed: 0,
            numer_bound: 99,
            certify: true,
        }
    }
}

pub const DENOM_BOUND: i64 = 9;

fn random_rational(rng: &mut ChaCha8Rng, bound: i64) -> BigRational {
    let n = rng.gen_range(-bound..=bound);
    let d = rng.gen_range(1..=DENOM_BOUND);
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn random_gaussian(rng: &mut ChaCha8Rng, bound: i64) -> GaussianRational {
    GaussianRational::new(random_rational(rng, bound), random_rational(rng, bound))
}

pub fn random_point(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Vec<GaussianRational> {
    (0..n).map(|_| random_gaussian(rng, bound)).collect()
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn eval_matrix(jac: &[Vec<Series>], point: &[GaussianRational]) -> Matrix {
    jac.iter()
        .map(|row| row.iter().map(|s| s.eval(point).expect("point dimension")).collect())
        .collect()
}

/// Exact rank of a symbolic matrix at one point.
pub fn rank_at(jac: &[Vec<Series>], point: &[GaussianRational]) -> usize {
    rank(&eval_matrix(jac, point))
}

/// Univariate truncated series `sum_{j < P} a_j t^j`.
type Jet = Vec<GaussianRational>;

fn jet_valuation(a: &Jet) -> Option<usize> {
    a.iter().position(|c| !c.is_zero())
}

fn jet_mul(a: &Jet, b: &Jet, p: usize) -> Jet {
    let mut out = vec![GaussianRational::zero(); p];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(p - i) {
            if !y.is_zero() {
                out[i + j] += &(x * y);
            }
        }
    }
    out
}

/// `a / b` where `val(b) = v <= val(a)`; known modulo `t^(p - v)`.
fn jet_div(a: &Jet, b: &Jet, v: usize, p: usize) -> Jet {
    let q = p - v;
    let a2: Vec<_> = a[v..].to_vec();
    let b2: Vec<_> = b[v..].to_vec();
    let inv0 = b2[0].inv().expect("unit");
    let mut out = vec![GaussianRational::zero(); p];
    for k in 0..q {
        let mut s = a2[k].clone();
        for j in 1..=k {
            if !b2[j].is_zero() && !out[k - j].is_zero() {
                s -= &(&b2[j] * &out[k - j]);
            }
        }
        out[k] = &s * &inv0;
    }
    out
}

/// Rank over the Laurent-series field of a matrix of jets known modulo
/// `t^p`. Pivots are chosen with globally minimal valuation, which keeps
/// the working precision at `p`, so the result is a lower bound for the
/// rank of the true matrix.
fn jet_rank(mut a: Vec<Vec<Jet>>, p: usize) -> usize {
    let mut rank = 0;
    let mut live_rows: Vec<usize> = (0..a.len()).collect();
    let mut live_cols: Vec<usize> = (0..a.first().map_or(0, Vec::len)).collect();
    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        for &i in &live_rows {
            for &j in &live_cols {
                if let Some(v) = jet_valuation(&a[i][j]) {
                    if best.map_or(true, |b| v < b.2) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        let Some((pi, pj, v)) = best else {
            return rank;
        };
        rank += 1;
        live_rows.retain(|&i| i != pi);
        live_cols.retain(|&j| j != pj);
        let pivot_row = a[pi].clone();
        for &i in &live_rows {
            if jet_valuation(&a[i][pj]).is_none() {
                continue;
            }
            let f = jet_div(&a[i][pj], &pivot_row[pj], v, p);
            for &j in &live_cols {
                let t = jet_mul(&f, &pivot_row[j], p);
                for (x, y) in a[i][j].iter_mut().zip(t.iter()) {
                    *x -= y;
                }
            }
        }
        if live_rows.is_empty() || live_cols.is_empty() {
            return rank;
        }
    }
}

fn series_on_line(s: &Series, dir: &[GaussianRational], p: usize) -> Jet {
    let mut out = vec![GaussianRational::zero(); p];
    for (e, c) in s.terms() {
        let d = degree(e) as usize;
        if d >= p {
            continue;
        }
        let mut t = c.clone();
        for (v, &k) in e.iter().enumerate() {
            if k > 0 {
                t *= &dir[v].pow(k as u32);
            }
        }
        out[d] += &t;
    }
    out
}

/// Number of rows and of columns that are not identically zero; an upper
/// bound for the generic rank.
fn support_bound(jac: &[Vec<Series>]) -> usize {
    let rows = jac.iter().filter(|r| r.iter().any(|s| !s.is_zero())).count();
    let cols = jac
        .first()
        .map(|r| (0..r.len()).filter(|&j| jac.iter().any(|row| !row[j].is_zero())).count())
        .unwrap_or(0);
    rows.min(cols)
}

fn minors_vanish(jac: &[Vec<Series>], size: usize) -> bool {
    let rows = jac.len();
    let cols = jac.first().map_or(0, Vec::len);
    let rsets = subsets(rows, size);
    let csets = subsets(cols, size);
    for rs in &rsets {
        for cs in &csets {
            let m: Vec<Vec<Series>> = rs
                .iter()
                .map(|&i| cs.iter().map(|&j| jac[i][j].clone()).collect())
                .collect();
            if !det_series(&m).is_zero() {
                return false;
            }
        }
    }
    true
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Largest matrix dimension for symbolic minor certification.
pub const CERTIFY_MAX: usize = 6;

/// Generic rank of the Jacobian of `map` with respect to the domain
/// variables `wrt`, sampled over all domain variables.
pub fn generic_rank(map: &SeriesMap, wrt: &[usize], trials: usize, seed: u64) -> RankResult {
    generic_rank_with(
        map,
        wrt,
        &RankOptions {
            trials,
            seed,
            ..RankOptions::default()
        },
    )
}

pub fn generic_rank_with(map: &SeriesMap, wrt: &[usize], opts: &RankOptions) -> RankResult {
    let jac = map.jacobian(wrt).expect("wrt indices belong to the domain");
    jacobian_generic_rank(&jac, map.domain().len(), opts)
}

/// As [`generic_rank_with`], for an already differentiated matrix whose
/// entries live over a space of dimension `dim`.
pub fn jacobian_generic_rank(jac: &[Vec<Series>], dim: usize, opts: &RankOptions) -> RankResult {
    let trials = opts.trials.max(1);
    let rows = jac.len();
    let cols = jac.first().map_or(0, Vec::len);
    let full = rows.min(cols);
    let order = jac.iter().flatten().fold(Order::Exact, |o, s| o.min(s.order()));
    let mut rng = rng_from_seed(opts.seed);
    let points: Vec<Vec<GaussianRational>> =
        (0..trials).map(|_| random_point(&mut rng, dim, opts.numer_bound)).collect();
    let bound = support_bound(jac);
    let jet = !order.is_exact();
    let per_trial: Vec<usize> = points
        .par_iter()
        .map(|pt| match order {
            Order::Exact => rank_at(jac, pt),
            Order::Truncated(n) => {
                let p = n as usize + 1;
                let m = jac
                    .iter()
                    .map(|row| row.iter().map(|s| series_on_line(s, pt, p)).collect())
                    .collect();
                jet_rank(m, p)
            }
        })
        .collect();
    let (best, &rank) = per_trial
        .iter()
        .enumerate()
        .rev()
        .max_by_key(|(_, r)| **r)
        .unwrap_or((0, &0));
    // `rev` + `max_by_key` returns the first maximal trial
    let mut certified = rank == full || rank == bound;
    if !certified && opts.certify && !jet && rows <= CERTIFY_MAX && cols <= CERTIFY_MAX {
        certified = minors_vanish(jac, rank + 1);
    }
    RankResult {
        rank,
        witness: points.get(best).cloned().unwrap_or_default(),
        certified,
        jet,
        per_trial,
    }
}
