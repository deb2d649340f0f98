//! Formal flows of systems of commuting vector-field tuples, the greedy
//! rank-increment construction and the resulting orbit dimension.

use std::sync::Arc;

use rayon::prelude::*;

use crate::algebra::rank::{jacobian_generic_rank, rank, rank_at, random_point, rng_from_seed, RankOptions, SparseEchelon};
use crate::algebra::{GaussianRational, Order, Role, Series, SeriesMap, VarSpace, VarSpaceBuilder, VectorField};
use crate::error::{Error, Result};
use crate::lie::chart_fields;
use crate::manifold::CRManifold;

/// `a` tuples of `m` commuting polynomial vector fields on `C^n`.
#[derive(Clone, Debug)]
pub struct VFSystem {
    n: usize,
    m: usize,
    space: Arc<VarSpace>,
    fields: Vec<Vec<VectorField>>,
    /// Rank `am` also holds at sampled points.
    pub generic_rank_ok: bool,
}

impl VFSystem {
    /// Validates commutation within each tuple and rank `am` at the origin.
    pub fn new(space: &Arc<VarSpace>, fields: Vec<Vec<VectorField>>) -> Result<Self> {
        let n = space.len();
        let m = fields.first().map_or(0, Vec::len);
        if fields.is_empty() || m == 0 {
            return Err(Error::WrongDimensions("a system needs at least one nonempty tuple".into()));
        }
        let all: Vec<usize> = (0..n).collect();
        for (alpha, tuple) in fields.iter().enumerate() {
            if tuple.len() != m {
                return Err(Error::WrongDimensions(format!(
                    "tuple {} has {} fields, expected {m}",
                    alpha + 1,
                    tuple.len()
                )));
            }
            for f in tuple {
                if !VarSpace::same(f.space(), space) || f.coords() != all.as_slice() {
                    return Err(Error::InvalidArgument("fields must be written in the system coordinates".into()));
                }
            }
            for i in 0..m {
                for j in i + 1..m {
                    if !tuple[i].bracket(&tuple[j])?.is_zero() {
                        return Err(Error::InvalidArgument(format!(
                            "components {} and {} of tuple {} do not commute",
                            i + 1,
                            j + 1,
                            alpha + 1
                        )));
                    }
                }
            }
        }
        let am = fields.len() * m;
        let rows: Vec<Vec<Series>> = fields.iter().flatten().map(|f| f.coeffs().to_vec()).collect();
        let r0 = rank_at(&rows, &vec![GaussianRational::zero(); n]);
        if r0 < am {
            return Err(Error::RankAssumptionViolated { rank: r0, expected: am });
        }
        let generic_rank_ok = jacobian_generic_rank(&rows, n, &RankOptions::default()).rank == am;
        Ok(VFSystem {
            n,
            m,
            space: space.clone(),
            fields,
            generic_rank_ok,
        })
    }

    /// The pair `(L, Lbar)` of a CR manifold on `C^{2m+d}` with coordinates
    /// `(w, zeta, xi)`.
    pub fn cr_pair(mf: &CRManifold) -> Result<Self> {
        let mut b = VarSpaceBuilder::new();
        let chart = mf.chart_indices();
        b.block(Role::Coord, chart.iter().map(|&v| mf.space().name(v).to_string()));
        let space = b.build()?;
        let mut mapping = vec![0; mf.space().len()];
        for (pos, &v) in chart.iter().enumerate() {
            mapping[v] = pos;
        }
        // coefficients never involve z after restriction; map z anywhere
        let coords: Vec<usize> = (0..space.len()).collect();
        let (ls, lbs) = chart_fields(mf)?;
        let move_field = |f: &VectorField| -> Result<VectorField> {
            let coeffs = f.coeffs().iter().map(|c| c.embed(&space, &mapping)).collect();
            Ok(VectorField::new(&space, coords.clone(), coeffs)?)
        };
        let l = ls.iter().map(move_field).collect::<Result<Vec<_>>>()?;
        let lb = lbs.iter().map(move_field).collect::<Result<Vec<_>>>()?;
        Self::new(&space, vec![l, lb])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn a(&self) -> usize {
        self.fields.len()
    }

    pub fn space(&self) -> &Arc<VarSpace> {
        &self.space
    }

    pub fn fields(&self) -> &[Vec<VectorField>] {
        &self.fields
    }

    pub fn tuple(&self, alpha: usize) -> &[VectorField] {
        &self.fields[alpha]
    }

    /// Default truncation order for non-terminating flows: `2(n + 1)`.
    pub fn default_order(&self) -> u32 {
        2 * (self.n as u32 + 1)
    }
}

/// Space `s1..sm, x1..xn` of a flow.
fn flow_space(sys_space: &VarSpace, m: usize) -> Arc<VarSpace> {
    let mut b = VarSpaceBuilder::new();
    b.block(Role::Time, (1..=m).map(|j| format!("s{j}")).collect::<Vec<_>>());
    b.block(Role::Coord, sys_space.names().to_vec());
    b.build().expect("time names differ from coordinates")
}

/// `exp(s_1 X_1 + ... + s_m X_m)(x)` as the Lie series `sum_j D^j(x)/j!`.
///
/// The result is exact when the series terminates within `order` steps and
/// truncated at total degree `order` in `(s, x)` otherwise.
pub fn formal_flow(space: &Arc<VarSpace>, tuple: &[VectorField], order: u32) -> Result<SeriesMap> {
    let m = tuple.len();
    let n = space.len();
    let fs = flow_space(space, m);
    let mapping: Vec<usize> = (m..m + n).collect();
    let coords = mapping.clone();
    // D = sum_i s_i X_i acting on the x-variables only
    let mut d_coeffs = vec![Series::zero(&fs, Order::Exact); n];
    for (i, x) in tuple.iter().enumerate() {
        let s = Series::var(&fs, i, Order::Exact);
        for (c, a) in d_coeffs.iter_mut().zip(x.coeffs()) {
            // a tail of degree > N only feeds terms of degree > N: every
            // application of D adds one factor s and removes one derivative
            *c = &*c + &(&s * &a.polynomial_part().embed(&fs, &mapping));
        }
    }
    let d = VectorField::new(&fs, coords.clone(), d_coeffs)?;
    let mut comps = Vec::with_capacity(n);
    let mut exact = true;
    let mut terms: Vec<Vec<Series>> = Vec::with_capacity(n);
    for &v in &coords {
        let mut acc = vec![Series::var(&fs, v, Order::Exact)];
        let mut t = acc[0].clone();
        let mut j = 1u32;
        loop {
            t = d.apply(&t)?.scale(&GaussianRational::from_frac(1, j as i64));
            if t.is_zero() {
                break;
            }
            if j > order {
                exact = false;
                break;
            }
            acc.push(t.clone());
            j += 1;
        }
        terms.push(acc);
    }
    let coeff_order = tuple.iter().fold(Order::Exact, |o, x| o.min(x.order()));
    let ord = if exact { coeff_order } else { coeff_order.min(Order::Truncated(order)) };
    for acc in terms {
        let sum = acc.iter().fold(Series::zero(&fs, ord), |s, t| &s + t);
        comps.push(sum.with_order(ord));
    }
    Ok(SeriesMap::new(&fs, space, comps)?)
}

/// Flow of one tuple of the system.
pub fn tuple_flow(sys: &VFSystem, alpha: usize, order: u32) -> Result<SeriesMap> {
    formal_flow(&sys.space, sys.tuple(alpha), order)
}

/// Flows of each component in sequence, `exp(s_{p(m)} X_{p(m)}) o ... o exp(s_{p(1)} X_{p(1)})`.
pub fn composed_flow(space: &Arc<VarSpace>, tuple: &[VectorField], perm: &[usize], order: u32) -> Result<SeriesMap> {
    let m = tuple.len();
    let fs = flow_space(space, m);
    let n = space.len();
    let mut state: Vec<Series> = (0..n).map(|v| Series::var(&fs, m + v, Order::Exact)).collect();
    for &i in perm {
        let f = formal_flow(space, std::slice::from_ref(&tuple[i]), order)?;
        let mut subs = vec![Series::var(&fs, i, Order::Exact)];
        subs.extend(state.iter().cloned());
        state = f
            .components()
            .iter()
            .map(|c| c.compose(&subs))
            .collect::<std::result::Result<_, _>>()?;
    }
    Ok(SeriesMap::new(&fs, space, state)?)
}

/// Concatenated flows from the origin along `word`; parameters are the
/// chain blocks `u{k}_{j}`.
pub fn word_chain(sys: &VFSystem, word: &[usize], flows: &[SeriesMap]) -> Result<SeriesMap> {
    let (m, n) = (sys.m, sys.n);
    let cs = VarSpace::chain(m, word.len(), None);
    let ord = flows.iter().fold(Order::Exact, |o, f| o.min(f.order()));
    let mut state: Vec<Series> = (0..n).map(|_| Series::zero(&cs, ord)).collect();
    for (k, &alpha) in word.iter().enumerate() {
        let mut subs: Vec<Series> = (0..m).map(|j| Series::var(&cs, k * m + j, Order::Exact)).collect();
        subs.extend(state.iter().cloned());
        state = flows[alpha]
            .components()
            .iter()
            .map(|c| c.compose(&subs))
            .collect::<std::result::Result<_, _>>()?;
    }
    Ok(SeriesMap::new(&cs, &sys.space, state)?)
}

#[derive(Clone, Debug)]
pub struct OrbitOptions {
    pub trials: usize,
    pub seed: u64,
    /// Longest word; `None` means `a + n - am`.
    pub kmax: Option<usize>,
    /// Truncation order of non-terminating flows; `None` means `2(n + 1)`.
    pub order: Option<u32>,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions {
            trials: 5,
            seed: 0,
            kmax: None,
            order: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WordRank {
    pub rank: usize,
    pub certified: bool,
}

fn word_rank(sys: &VFSystem, word: &[usize], flows: &[SeriesMap], opts: &OrbitOptions) -> Result<WordRank> {
    let c = word_chain(sys, word, flows)?;
    let wrt: Vec<usize> = (0..c.domain().len()).collect();
    let jac = c.jacobian(&wrt)?;
    let ro = RankOptions {
        trials: opts.trials,
        seed: opts.seed ^ (word.len() as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        ..RankOptions::default()
    };
    let r = jacobian_generic_rank(&jac, c.domain().len(), &ro);
    Ok(WordRank {
        rank: r.rank,
        certified: r.certified,
    })
}

/// Return-to-origin record for the selected word.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitWitness {
    pub params: Vec<GaussianRational>,
    pub returns: bool,
    pub rank: usize,
    pub expected_rank: usize,
}

impl OrbitWitness {
    pub fn verified(&self) -> bool {
        self.returns && self.rank == self.expected_rank
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitResult {
    /// Selected word, 0-based tuple indices.
    pub selected: Vec<usize>,
    pub e: Vec<usize>,
    pub kappa0: usize,
    pub mu0: usize,
    pub multitype: Vec<usize>,
    pub orbit_dim: usize,
    pub certified: bool,
    /// Every flow terminated, so ranks are exact evaluations.
    pub exact_flows: bool,
    pub witness: Option<OrbitWitness>,
    /// For `a = 2`: the increments obtained when starting with the second tuple.
    pub alternate_e: Option<Vec<usize>>,
}

fn greedy_run(
    sys: &VFSystem,
    start: Vec<usize>,
    flows: &[SeriesMap],
    kmax: usize,
    opts: &OrbitOptions,
) -> Result<(Vec<usize>, Vec<usize>, usize, bool)> {
    let mut word = start;
    let first = word_rank(sys, &word, flows, opts)?;
    let mut r = first.rank;
    let mut certified = first.certified;
    let mut e = Vec::new();
    while r < sys.n && word.len() < kmax {
        let probes: Vec<WordRank> = (0..sys.a())
            .into_par_iter()
            .map(|alpha| {
                let mut w = word.clone();
                w.push(alpha);
                word_rank(sys, &w, flows, opts)
            })
            .collect::<Result<_>>()?;
        let best = probes.iter().map(|p| p.rank).max().unwrap_or(r);
        if best <= r {
            break;
        }
        let alpha = probes.iter().position(|p| p.rank == best).expect("max exists");
        certified &= probes[alpha].certified;
        word.push(alpha);
        e.push(best - r);
        r = best;
    }
    Ok((word, e, r, certified))
}

/// Greedy word of maximal rank increments; stops when no tuple increases
/// the rank.
pub fn greedy_multitype(sys: &VFSystem, opts: &OrbitOptions) -> Result<OrbitResult> {
    let (a, m, n) = (sys.a(), sys.m, sys.n);
    let order = opts.order.unwrap_or_else(|| sys.default_order());
    let kmax = opts.kmax.unwrap_or(a + n - a * m);
    let flows: Vec<SeriesMap> = (0..a).map(|al| tuple_flow(sys, al, order)).collect::<Result<_>>()?;
    let exact_flows = flows.iter().all(|f| f.order().is_exact());
    let (selected, e, _, certified) = greedy_run(sys, (0..a).collect(), &flows, kmax, opts)?;
    let alternate_e = if a == 2 {
        Some(greedy_run(sys, vec![1, 0], &flows, kmax, opts)?.1)
    } else {
        None
    };
    let sum: usize = e.iter().sum();
    let orbit_dim = a * m + sum;
    let witness = if exact_flows {
        Some(orbit_witness(sys, &selected, &flows, orbit_dim, opts)?)
    } else {
        None
    };
    let mut multitype = vec![m; a];
    multitype.extend(&e);
    Ok(OrbitResult {
        kappa0: e.len(),
        mu0: a + e.len(),
        multitype,
        orbit_dim,
        e,
        selected,
        certified,
        exact_flows,
        witness,
        alternate_e,
    })
}

pub fn orbit_dimension(sys: &VFSystem, opts: &OrbitOptions) -> Result<usize> {
    Ok(greedy_multitype(sys, opts)?.orbit_dim)
}

/// Samples parameters of the selected word with the last block zero where
/// the rank is maximal, then follows the word back with negated times.
fn orbit_witness(
    sys: &VFSystem,
    word: &[usize],
    flows: &[SeriesMap],
    expected: usize,
    opts: &OrbitOptions,
) -> Result<OrbitWitness> {
    let m = sys.m;
    let k = word.len();
    let short = word_chain(sys, word, flows)?;
    let short_jac = short.jacobian(&(0..m * k).collect::<Vec<_>>())?;
    let mut long_word = word.to_vec();
    long_word.extend(word[..k - 1].iter().rev());
    let long = word_chain(sys, &long_word, flows)?;
    let long_jac = long.jacobian(&(0..m * long_word.len()).collect::<Vec<_>>())?;
    let mut rng = rng_from_seed(opts.seed ^ 0x4f52_4249);
    let mut attempts = 0;
    for bound in [99i64, 990] {
        for _ in 0..crate::invariants::WITNESS_RETRIES {
            attempts += 1;
            let mut s = random_point(&mut rng, m * (k - 1), bound);
            s.extend(vec![GaussianRational::zero(); m]);
            if rank_at(&short_jac, &s) != expected {
                continue;
            }
            let mut params = s.clone();
            for blk in (0..k - 1).rev() {
                params.extend(s[blk * m..(blk + 1) * m].iter().map(|c| -c));
            }
            let returns = long.evaluate(&params)?.iter().all(GaussianRational::is_zero);
            let rank = rank_at(&long_jac, &params);
            return Ok(OrbitWitness {
                params,
                returns,
                rank,
                expected_rank: expected,
            });
        }
    }
    Err(Error::WitnessNotFound { attempts })
}

/// Dimension at the origin of the Lie algebra generated by all component
/// fields, from left-normed brackets of length up to `max_length`.
pub fn lie_span_dimension(sys: &VFSystem, max_length: usize) -> Result<usize> {
    let gens: Vec<VectorField> = sys.fields.iter().flatten().cloned().collect();
    let origin = vec![GaussianRational::zero(); sys.n];
    let mut echelon = SparseEchelon::new();
    let mut level = Vec::new();
    for g in &gens {
        if echelon.insert(g.entries().collect::<Vec<_>>()) {
            level.push(g.clone());
        }
    }
    let mut values: Vec<Vec<GaussianRational>> = level.iter().map(|f| f.eval(&origin)).collect::<std::result::Result<_, _>>()?;
    for _ in 1..max_length {
        if rank(&values) == sys.n || level.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for x in &gens {
            for y in &level {
                let b = x.bracket(y)?;
                if !b.is_zero() && echelon.insert(b.entries().collect::<Vec<_>>()) {
                    values.push(b.eval(&origin)?);
                    next.push(b);
                }
            }
        }
        level = next;
    }
    Ok(rank(&values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_series;

    fn system(names: &[&str], tuples: &[&[&[&str]]]) -> VFSystem {
        let sp = VarSpace::coords(names.iter().copied()).unwrap();
        let all: Vec<usize> = (0..names.len()).collect();
        let fields = tuples
            .iter()
            .map(|t| {
                t.iter()
                    .map(|coeffs| {
                        let cs = coeffs.iter().map(|c| parse_series(c, &sp, Order::Exact).unwrap()).collect();
                        VectorField::new(&sp, all.clone(), cs).unwrap()
                    })
                    .collect()
            })
            .collect();
        VFSystem::new(&sp, fields).unwrap()
    }

    #[test]
    fn translation_and_shear_flows() {
        let sp = VarSpace::coords(["x", "y"]).unwrap();
        let field = |a: &str, b: &str| {
            let cs = vec![parse_series(a, &sp, Order::Exact).unwrap(), parse_series(b, &sp, Order::Exact).unwrap()];
            VectorField::new(&sp, vec![0, 1], cs).unwrap()
        };
        let f = formal_flow(&sp, &[field("1", "0")], 6).unwrap();
        assert!(f.order().is_exact());
        assert_eq!(f.component(0).to_string(), "s1 + x");
        let g = formal_flow(&sp, &[field("0", "x")], 6).unwrap();
        assert_eq!(g.component(1).to_string(), "s1*x + y");
    }

    #[test]
    fn exponential_flow_is_truncated() {
        let sp = VarSpace::coords(["x"]).unwrap();
        let x = parse_series("x", &sp, Order::Exact).unwrap();
        let f = formal_flow(&sp, &[VectorField::new(&sp, vec![0], vec![x]).unwrap()], 4).unwrap();
        assert_eq!(f.order(), Order::Truncated(4));
        let c = f.component(0);
        assert_eq!(c.coeff(&[3, 1]), GaussianRational::from_frac(1, 6));
        assert_eq!(c.coeff(&[0, 1]), GaussianRational::one());
    }

    #[test]
    fn heisenberg_like_orbit() {
        let s = system(&["x", "y", "z"], &[&[&["1", "0", "0"]], &[&["0", "1", "x"]]]);
        let r = greedy_multitype(&s, &OrbitOptions::default()).unwrap();
        assert_eq!(r.orbit_dim, 3);
        assert_eq!(r.multitype, [1, 1, 1]);
        assert!(r.witness.unwrap().verified());
        assert_eq!(lie_span_dimension(&s, 6).unwrap(), 3);
    }

    #[test]
    fn commuting_translations() {
        let s = system(&["x", "y", "z"], &[&[&["1", "0", "0"]], &[&["0", "1", "0"]]]);
        let r = greedy_multitype(&s, &OrbitOptions::default()).unwrap();
        assert_eq!((r.orbit_dim, r.multitype.clone()), (2, vec![1, 1]));
    }

    #[test]
    fn rank_assumption_checked() {
        let sp = VarSpace::coords(["x", "y"]).unwrap();
        let x = parse_series("x", &sp, Order::Exact).unwrap();
        let z = Series::zero(&sp, Order::Exact);
        let f = VectorField::new(&sp, vec![0, 1], vec![x, z]).unwrap();
        assert!(matches!(
            VFSystem::new(&sp, vec![vec![f]]),
            Err(Error::RankAssumptionViolated { rank: 0, expected: 1 })
        ));
    }

    #[test]
    fn cr_pair_matches_heisenberg_profile() {
        let mf = CRManifold::parse(1, 1, &["w1^2*zeta1^2"], Order::Exact).unwrap();
        let sys = VFSystem::cr_pair(&mf).unwrap();
        let r = greedy_multitype(&sys, &OrbitOptions::default()).unwrap();
        assert_eq!(r.e, [1]);
        assert_eq!(r.alternate_e.as_deref(), Some(&[1][..]));
    }
}
