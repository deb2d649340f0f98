//! Brackets of the complexified CR fields in the `(w, zeta, xi)` chart:
//! Hörmander numbers, Levi type and the `e_1` determinant.

use rayon::prelude::*;

use crate::algebra::rank::{det_series, jacobian_generic_rank, rank, RankOptions};
use crate::algebra::rank::SparseEchelon;
use crate::algebra::{GaussianRational, Monomial, Order, Series, VectorField};
use crate::error::{Error, Result};
use crate::invariants::{segre_invariants, ProfileOptions};
use crate::manifold::{Basepoint, CRManifold};

/// `L_j = d/dw_j` and `Lbar_j = d/dzeta_j - i*theta_{zeta_j}(zeta, w, Qbar) d/dxi`,
/// as fields over the manifold space with directions `(w, zeta, xi)`.
pub fn chart_fields(mf: &CRManifold) -> Result<(Vec<VectorField>, Vec<VectorField>)> {
    let sp = mf.space();
    let coords = mf.chart_indices();
    let (m, d) = (mf.m(), mf.d());
    let i = GaussianRational::i();
    let mut ls = Vec::with_capacity(m);
    let mut lbs = Vec::with_capacity(m);
    for j in 0..m {
        ls.push(VectorField::coordinate(sp, coords.clone(), j, mf.order()));
        let mut lb = VectorField::coordinate(sp, coords.clone(), m + j, mf.order());
        for k in 0..d {
            let t = mf.restrict(&mf.theta()[k].diff(mf.zeta_idx(j))?)?;
            lb.set_coeff(2 * m + k, -t.scale(&i));
        }
        lbs.push(lb);
    }
    Ok((ls, lbs))
}

/// The generating system `D = (L_1..L_m, Lbar_1..Lbar_m)`.
pub fn generators(mf: &CRManifold) -> Result<Vec<VectorField>> {
    let (mut ls, lbs) = chart_fields(mf)?;
    ls.extend(lbs);
    Ok(ls)
}

/// The ambient complexified CR fields, over `(w, z, zeta, xi)`.
pub fn ambient_generators(mf: &CRManifold) -> Result<Vec<VectorField>> {
    let (l, lb) = mf.vector_fields()?;
    let mut v = l.fields;
    v.extend(lb.fields);
    Ok(v)
}

/// Whether an ambient field annihilates every `rho_j` once `z = Qbar` is imposed.
pub fn is_tangent(mf: &CRManifold, x: &VectorField) -> Result<bool> {
    for r in mf.rho() {
        if !mf.restrict(&x.apply(&r)?)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether the chart field is the restriction of the ambient field to the
/// manifold, read in the `(w, zeta, xi)` directions.
pub fn restricts_to(mf: &CRManifold, ambient: &VectorField, chart: &VectorField) -> Result<bool> {
    for (pos, &v) in mf.chart_indices().iter().enumerate() {
        if mf.restrict(ambient.coeff(v))? != *chart.coeff(pos) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Options for span computations at a basepoint.
#[derive(Clone, Debug)]
pub struct SpanOptions {
    pub trials: usize,
    pub seed: u64,
}

impl Default for SpanOptions {
    fn default() -> Self {
        SpanOptions { trials: 5, seed: 0 }
    }
}

/// Rank of the coefficient vectors of `rows` at the basepoint; generic rank
/// over all manifold variables for a symbolic basepoint.
fn span_rank(mf: &CRManifold, rows: &[Vec<Series>], base: &Basepoint, opts: &SpanOptions) -> Result<usize> {
    if rows.is_empty() {
        return Ok(0);
    }
    match base.coords(mf.n()) {
        Some(p) => {
            if !mf.order().is_exact() && !base.is_origin() {
                return Err(Error::UnsupportedBasepoint(
                    "numeric basepoints away from the origin need EXACT order".into(),
                ));
            }
            let mat: Vec<Vec<GaussianRational>> = rows
                .iter()
                .map(|r| r.iter().map(|s| s.eval(&p)).collect::<std::result::Result<_, _>>())
                .collect::<std::result::Result<_, _>>()?;
            Ok(rank(&mat))
        }
        None => {
            let ro = RankOptions {
                trials: opts.trials,
                seed: opts.seed,
                ..RankOptions::default()
            };
            Ok(jacobian_generic_rank(rows, mf.space().len(), &ro).rank)
        }
    }
}

/// One jump of the bracket-span dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LadderStep {
    pub mu: usize,
    pub l: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HormanderData {
    pub ladder: Vec<LadderStep>,
    /// Number of jumps after the first level.
    pub h: usize,
    pub minimal: bool,
    /// Span dimension after each bracket length `1, 2, ...`.
    pub dims: Vec<usize>,
    /// Computation stopped early because truncated coefficients ran out of
    /// precision.
    pub precision_limited: bool,
}

impl HormanderData {
    /// `l_1 + ... + l_h`.
    pub fn sum_l(&self) -> usize {
        self.ladder.iter().skip(1).map(|s| s.l).sum()
    }
}

/// Default longest bracket length: `2d + 2`.
pub fn default_max_length(mf: &CRManifold) -> usize {
    2 * mf.d() + 2
}

fn key_entries(x: &VectorField) -> Vec<((usize, Monomial), GaussianRational)> {
    x.entries().collect()
}

/// Left-normed brackets level by level. Each level only keeps fields that
/// are linearly independent over `Q(i)` of everything kept so far; this does
/// not change pointwise spans since the bracket is bilinear over constants.
pub fn bracket_levels(mf: &CRManifold, max_length: usize) -> Result<(Vec<Vec<VectorField>>, bool)> {
    let gens = generators(mf)?;
    let mut echelon = SparseEchelon::new();
    let mut first = Vec::new();
    for g in &gens {
        if echelon.insert(key_entries(g)) {
            first.push(g.clone());
        }
    }
    let cap = match mf.order() {
        Order::Exact => usize::MAX,
        Order::Truncated(n) => n as usize + 1,
    };
    let mut levels = vec![first];
    let mut limited = false;
    while levels.len() < max_length {
        if levels.len() >= cap {
            limited = true;
            break;
        }
        let prev = levels.last().expect("nonempty");
        let cand: Vec<VectorField> = gens
            .par_iter()
            .flat_map_iter(|x| prev.iter().map(move |y| x.bracket(y)))
            .collect::<std::result::Result<_, _>>()?;
        let mut next = Vec::new();
        for c in cand {
            if !c.is_zero() && echelon.insert(key_entries(&c)) {
                next.push(c);
            }
        }
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }
    Ok((levels, limited))
}

fn coeff_rows(fields: &[VectorField]) -> Vec<Vec<Series>> {
    fields.iter().map(|f| f.coeffs().to_vec()).collect()
}

/// Span dimensions `dim D^1(p), dim D^2(p), ...` up to `max_length`.
pub fn span_dims(mf: &CRManifold, base: &Basepoint, max_length: usize, opts: &SpanOptions) -> Result<(Vec<usize>, bool)> {
    let (levels, limited) = bracket_levels(mf, max_length)?;
    let full = 2 * mf.m() + mf.d();
    let mut rows = Vec::new();
    let mut dims = Vec::new();
    for lvl in &levels {
        rows.extend(coeff_rows(lvl));
        let r = span_rank(mf, &rows, base, opts)?;
        dims.push(r);
        if r == full {
            break;
        }
    }
    // closed algebra: the span stays put for longer words
    let last = *dims.last().unwrap_or(&0);
    if !limited {
        while dims.len() < max_length && last < full {
            dims.push(last);
        }
    }
    Ok((dims, limited))
}

pub fn hormander_numbers(mf: &CRManifold, base: &Basepoint, max_length: usize) -> Result<HormanderData> {
    hormander_numbers_with(mf, base, max_length, &SpanOptions::default())
}

pub fn hormander_numbers_with(
    mf: &CRManifold,
    base: &Basepoint,
    max_length: usize,
    opts: &SpanOptions,
) -> Result<HormanderData> {
    mf.check_basepoint(base)?;
    let max_length = max_length.max(2);
    let (dims, precision_limited) = span_dims(mf, base, max_length, opts)?;
    let mut ladder = vec![LadderStep {
        mu: 1,
        l: dims[0],
        dim: dims[0],
    }];
    for (i, w) in dims.windows(2).enumerate() {
        if w[1] > w[0] {
            ladder.push(LadderStep {
                mu: i + 2,
                l: w[1] - w[0],
                dim: w[1],
            });
        }
    }
    let full = 2 * mf.m() + mf.d();
    Ok(HormanderData {
        h: ladder.len() - 1,
        minimal: ladder.last().map(|s| s.dim) == Some(full),
        ladder,
        dims,
        precision_limited,
    })
}

/// Holomorphic gradients `(-i*thetabar_{j,w}, e_j)` of the `rho_j`.
pub fn rho_gradients(mf: &CRManifold) -> Result<Vec<Vec<Series>>> {
    let (m, d) = (mf.m(), mf.d());
    let sp = mf.space();
    let i = GaussianRational::i();
    let mut out = Vec::with_capacity(d);
    for k in 0..d {
        let mut row = Vec::with_capacity(m + d);
        for j in 0..m {
            row.push(-mf.theta_bar()[k].diff(mf.w_idx(j))?.scale(&i));
        }
        for l in 0..d {
            row.push(if l == k {
                Series::one(sp, mf.order())
            } else {
                Series::zero(sp, mf.order())
            });
        }
        out.push(row);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeviReport {
    /// Smallest `k` with full span, if reached within `kmax`.
    pub levi_type: Option<usize>,
    pub kmax: usize,
    /// Span dimension after applying words of length `0, 1, ..., `.
    pub dims: Vec<usize>,
}

/// Default search depth: `m + d`.
pub fn default_levi_kmax(mf: &CRManifold) -> usize {
    mf.m() + mf.d()
}

fn row_entries(row: &[Series]) -> Vec<((usize, Monomial), GaussianRational)> {
    row.iter()
        .enumerate()
        .flat_map(|(j, s)| s.terms().iter().map(move |(e, c)| ((j, e.clone()), c.clone())))
        .collect()
}

/// Smallest `k` such that `Lbar^beta` of the gradients, `|beta| <= k`,
/// span `C^n` at the basepoint.
pub fn levi_type(mf: &CRManifold, base: &Basepoint, kmax: usize) -> Result<LeviReport> {
    levi_type_with(mf, base, kmax, &SpanOptions::default())
}

pub fn levi_type_with(mf: &CRManifold, base: &Basepoint, kmax: usize, opts: &SpanOptions) -> Result<LeviReport> {
    mf.check_basepoint(base)?;
    let n = mf.n();
    let (_, lbs) = chart_fields(mf)?;
    let mut echelon = SparseEchelon::new();
    let mut level: Vec<Vec<Series>> = Vec::new();
    for g in rho_gradients(mf)? {
        if echelon.insert(row_entries(&g)) {
            level.push(g);
        }
    }
    let mut rows = level.clone();
    let mut dims = vec![span_rank(mf, &rows, base, opts)?];
    let cap = match mf.order() {
        Order::Exact => usize::MAX,
        Order::Truncated(n) => n as usize,
    };
    let mut k = 0;
    while dims[k] < n && k < kmax && k < cap && !level.is_empty() {
        let cand: Vec<Vec<Series>> = lbs
            .par_iter()
            .flat_map_iter(|x| {
                level
                    .iter()
                    .map(move |row| row.iter().map(|s| x.apply(s)).collect::<std::result::Result<Vec<_>, _>>())
            })
            .collect::<std::result::Result<_, _>>()?;
        let mut next = Vec::new();
        for c in cand {
            if echelon.insert(row_entries(&c)) {
                next.push(c);
            }
        }
        rows.extend(next.iter().cloned());
        level = next;
        k += 1;
        dims.push(span_rank(mf, &rows, base, opts)?);
    }
    Ok(LeviReport {
        levi_type: (dims[k] == n).then_some(k),
        kmax,
        dims,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct E1Determinant {
    /// `det[theta_{j, w_i}](zeta, w, 0)` over the manifold space.
    pub det: Series,
    /// `e_1(0) = 2` exactly when the determinant is not identically zero.
    pub nonzero: bool,
}

pub fn e1_determinant(mf: &CRManifold) -> Result<E1Determinant> {
    if mf.m() != 2 || mf.d() != 2 {
        return Err(Error::WrongDimensions(format!(
            "the e1 determinant needs m = d = 2, got m = {}, d = {}",
            mf.m(),
            mf.d()
        )));
    }
    let zero = GaussianRational::zero();
    let at_z0 = |s: Series| s.partial_eval(&[(mf.z_idx(0), zero.clone()), (mf.z_idx(1), zero.clone())]);
    let mut mat = Vec::with_capacity(2);
    for j in 0..2 {
        let mut row = Vec::with_capacity(2);
        for i in 0..2 {
            row.push(at_z0(mf.theta()[j].diff(mf.w_idx(i))?));
        }
        mat.push(row);
    }
    let det = det_series(&mat);
    Ok(E1Determinant {
        nonzero: !det.is_zero(),
        det,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HoloNondegeneracy {
    pub nondegenerate: bool,
    pub levi_gen: Option<usize>,
    /// A degenerate verdict only means "not nondegenerate up to `kmax`".
    pub kmax: usize,
}

pub fn holomorphic_nondegeneracy(mf: &CRManifold, kmax: usize) -> Result<HoloNondegeneracy> {
    let rep = levi_type(mf, &Basepoint::Symbolic, kmax)?;
    Ok(HoloNondegeneracy {
        nondegenerate: rep.levi_type.is_some(),
        levi_gen: rep.levi_type,
        kmax,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Crosscheck {
    pub sum_l: usize,
    pub sum_e: usize,
    pub hormander_minimal: bool,
    pub segre_minimal: bool,
}

impl Crosscheck {
    pub fn agrees(&self) -> bool {
        self.sum_l == self.sum_e && self.hormander_minimal == self.segre_minimal
    }
}

/// Compares the bracket ladder with the Segre rank increments.
pub fn crosscheck_totals(mf: &CRManifold, base: &Basepoint, opts: &ProfileOptions) -> Result<Crosscheck> {
    let inv = segre_invariants(mf, base, opts)?;
    let max_length = default_max_length(mf).max(inv.profile.r.len() + 1);
    let span = SpanOptions {
        trials: opts.trials,
        seed: opts.seed,
    };
    let h = hormander_numbers_with(mf, base, max_length, &span)?;
    Ok(Crosscheck {
        sum_l: h.sum_l(),
        sum_e: inv.sum_e(),
        hormander_minimal: h.minimal,
        segre_minimal: inv.minimal,
    })
}
