//! Generic-rank profiles of Segre chains and the invariants read off them.

use crate::algebra::rank::{
    jacobian_generic_rank, random_point, rank_at, rng_from_seed, RankOptions, RankResult,
};
use crate::algebra::{GaussianRational, Role, SeriesMap};
use crate::chains::{gamma, psi_of, Chart, ChainMap, GammaIter, Parity};
use crate::error::{Error, Result};
use crate::manifold::{Basepoint, CRManifold};

/// Sampling and stopping controls shared by the rank computations.
#[derive(Clone, Debug)]
pub struct ProfileOptions {
    pub trials: usize,
    pub seed: u64,
    /// Longest chain examined; `None` means `2d + 3`.
    pub kmax: Option<usize>,
    /// Keep computing up to `kmax` after the ranks stabilize.
    pub paranoid: bool,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            trials: 5,
            seed: 0,
            kmax: None,
            paranoid: false,
        }
    }
}

impl ProfileOptions {
    pub fn kmax_for(&self, mf: &CRManifold) -> usize {
        self.kmax.unwrap_or(2 * mf.d() + 3).max(3)
    }

    fn rank_opts(&self, salt: u64) -> RankOptions {
        RankOptions {
            trials: self.trials,
            seed: self.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15),
            ..RankOptions::default()
        }
    }
}

/// Generic rank of a map with respect to the given domain variables.
pub fn map_rank(map: &SeriesMap, wrt: &[usize], opts: &RankOptions) -> Result<RankResult> {
    let jac = map.jacobian(wrt)?;
    Ok(jacobian_generic_rank(&jac, map.domain().len(), opts))
}

/// Generic rank of a chain map, in the `(w, zeta, xi)` chart, with respect
/// to its chain parameters only.
pub fn chain_rank(mf: &CRManifold, c: &ChainMap, opts: &RankOptions) -> Result<RankResult> {
    map_rank(&c.in_chart(mf, Chart::WZetaXi)?, &c.chain_params(), opts)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankProfile {
    /// `r[k-1]` is the generic rank of `Gamma_k`.
    pub r: Vec<usize>,
    /// Strictly positive increments `e_k = r_{k+2} - r_{k+1}`.
    pub e: Vec<usize>,
    pub witnesses: Vec<Vec<GaussianRational>>,
    /// Every rank was proven equal to the generic rank.
    pub certified: bool,
    /// Ranks were computed on jets (truncated input).
    pub jet: bool,
    /// Rank of the conjugate-first chain of the last computed length.
    pub rbar_last: usize,
    pub sigma_consistent: bool,
    /// In paranoid mode: no rank changed after the stopping point.
    pub stable: bool,
}

/// Ranks of `Gamma_1, Gamma_2, ...` until they stabilize, fill the
/// complexification, or reach `kmax`.
pub fn rank_profile(mf: &CRManifold, base: &Basepoint, opts: &ProfileOptions) -> Result<RankProfile> {
    let kmax = opts.kmax_for(mf);
    let full = 2 * mf.m() + mf.d();
    let mut r = Vec::new();
    let mut witnesses = Vec::new();
    let mut certified = true;
    let mut jet = false;
    let mut stop_at = None;
    let mut stable = true;
    for (i, c) in GammaIter::new(mf, kmax, base, Parity::L)?.enumerate() {
        let c = c?;
        let k = i + 1;
        let res = chain_rank(mf, &c, &opts.rank_opts(k as u64))?;
        jet |= res.jet;
        match stop_at {
            None => {
                certified &= res.certified;
                r.push(res.rank);
                witnesses.push(res.witness);
                let settled = k >= 3 && (res.rank == r[k - 2] || res.rank == full);
                if settled {
                    stop_at = Some(k);
                    if !opts.paranoid {
                        break;
                    }
                }
            }
            Some(s) => {
                if res.rank != r[s - 1] {
                    stable = false;
                }
            }
        }
    }
    let e: Vec<usize> = (3..=r.len())
        .map(|k| r[k - 1].saturating_sub(r[k - 2]))
        .take_while(|&x| x > 0)
        .collect();
    let last = r.len();
    let cbar = gamma(mf, last, base, Parity::Lbar)?;
    let rbar_last = chain_rank(mf, &cbar, &opts.rank_opts(1000 + last as u64))?.rank;
    Ok(RankProfile {
        sigma_consistent: rbar_last == r[last - 1],
        r,
        e,
        witnesses,
        certified,
        jet,
        rbar_last,
        stable,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SegreInvariants {
    pub kappa: usize,
    pub mu: usize,
    pub nu: usize,
    pub multitype: Vec<usize>,
    pub minimal: bool,
    pub orbit_dim_complexified: usize,
    pub orbit_dim_intrinsic: usize,
    pub orbit_dim_real: usize,
    pub profile: RankProfile,
}

impl SegreInvariants {
    pub fn from_profile(mf: &CRManifold, profile: RankProfile) -> Self {
        let m = mf.m();
        let kappa = profile.e.len();
        let sum: usize = profile.e.iter().sum();
        let mut multitype = vec![m, m];
        multitype.extend(&profile.e);
        SegreInvariants {
            kappa,
            mu: 2 + kappa,
            nu: 1 + kappa,
            multitype,
            minimal: sum == mf.d(),
            orbit_dim_complexified: 2 * m + sum,
            orbit_dim_intrinsic: m + sum,
            orbit_dim_real: 2 * m + sum,
            profile,
        }
    }

    pub fn sum_e(&self) -> usize {
        self.profile.e.iter().sum()
    }
}

pub fn segre_invariants(mf: &CRManifold, base: &Basepoint, opts: &ProfileOptions) -> Result<SegreInvariants> {
    Ok(SegreInvariants::from_profile(mf, rank_profile(mf, base, opts)?))
}

/// For a hypersurface: minimal iff `theta(zeta, w, 0)` is not identically zero.
pub fn hypersurface_minimality(mf: &CRManifold) -> Result<bool> {
    if mf.d() != 1 {
        return Err(Error::NotAHypersurface(mf.d()));
    }
    let t = mf.theta()[0].partial_eval(&[(mf.z_idx(0), GaussianRational::zero())]);
    Ok(!t.is_zero())
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessRecord {
    pub mu: usize,
    pub parity: Parity,
    /// `(w_1, ..., w_{mu-1}, 0)`, flattened.
    pub w_star: Vec<GaussianRational>,
    /// `(-w_{mu-1}, ..., -w_1)`, flattened.
    pub omega_star: Vec<GaussianRational>,
    /// The chain of length `2mu - 1` returns exactly to the basepoint.
    pub returns: bool,
    pub rank: usize,
    pub expected_rank: usize,
    pub attempts: usize,
    pub enlarged: bool,
    /// No search was needed (`mu = 2`).
    pub trivial: bool,
}

impl WitnessRecord {
    pub fn verified(&self) -> bool {
        self.returns && self.rank == self.expected_rank
    }

    /// `(w*, omega*)` as one parameter vector of length `m(2mu - 1)`.
    pub fn full_point(&self) -> Vec<GaussianRational> {
        let mut v = self.w_star.clone();
        v.extend(self.omega_star.iter().cloned());
        v
    }
}

/// Retries per sampling box.
pub const WITNESS_RETRIES: usize = 20;

fn numeric_base(mf: &CRManifold, base: &Basepoint) -> Result<Vec<GaussianRational>> {
    if !mf.order().is_exact() {
        return Err(Error::InvalidArgument("witness search evaluates chains and needs EXACT order".into()));
    }
    base.coords(mf.n())
        .ok_or_else(|| Error::UnsupportedBasepoint("witness search needs a numeric basepoint".into()))
}

/// Searches a point `(w*, omega*)` where the chain of length `2mu - 1`
/// returns to the basepoint with full rank.
pub fn find_witness(
    mf: &CRManifold,
    base: &Basepoint,
    inv: &SegreInvariants,
    parity: Parity,
    opts: &ProfileOptions,
) -> Result<WitnessRecord> {
    let p = numeric_base(mf, base)?;
    let (m, mu) = (mf.m(), inv.mu);
    let target = inv.orbit_dim_complexified;
    let chains: Vec<ChainMap> = GammaIter::new(mf, 2 * mu - 1, base, parity)?.collect::<Result<_>>()?;
    let short = &chains[mu - 1];
    let long = &chains[2 * mu - 2];
    let short_map = short.in_chart(mf, Chart::WZetaXi)?;
    let short_jac = short_map.jacobian(&short.chain_params())?;
    let long_jac = long.in_chart(mf, Chart::WZetaXi)?.jacobian(&long.chain_params())?;
    let mut rng = rng_from_seed(opts.seed ^ 0x5745_4954);
    let mut attempts = 0;
    for (enlarged, bound) in [(false, 99i64), (true, 990)] {
        for _ in 0..WITNESS_RETRIES {
            attempts += 1;
            let mut w = random_point(&mut rng, m * (mu - 1), bound);
            w.extend(vec![GaussianRational::zero(); m]);
            if rank_at(&short_jac, &w) != target {
                continue;
            }
            let mut omega = Vec::with_capacity(m * (mu - 1));
            for blk in (0..mu - 1).rev() {
                omega.extend(w[blk * m..(blk + 1) * m].iter().map(|c| -c));
            }
            let mut full = w.clone();
            full.extend(omega.iter().cloned());
            let image = long.map.evaluate(&full)?;
            let rank = rank_at(&long_jac, &full);
            return Ok(WitnessRecord {
                mu,
                parity,
                w_star: w,
                omega_star: omega,
                returns: image == p,
                rank,
                expected_rank: target,
                attempts,
                enlarged,
                trivial: false,
            });
        }
    }
    Err(Error::WitnessNotFound { attempts })
}

/// Witness for the chain starting with `L`; trivial when `mu = 2`.
pub fn witness_point(
    mf: &CRManifold,
    base: &Basepoint,
    inv: &SegreInvariants,
    opts: &ProfileOptions,
) -> Result<WitnessRecord> {
    numeric_base(mf, base)?;
    if inv.mu == 2 {
        return Ok(WitnessRecord {
            mu: 2,
            parity: Parity::L,
            w_star: Vec::new(),
            omega_star: Vec::new(),
            returns: true,
            rank: 2 * mf.m(),
            expected_rank: 2 * mf.m(),
            attempts: 0,
            enlarged: false,
            trivial: true,
        });
    }
    find_witness(mf, base, inv, Parity::L, opts)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsiIdentity {
    pub k: usize,
    /// `m + gen-rk psi^{k+1}`.
    pub lhs: usize,
    /// `gen-rk Gamma_{k+2}`.
    pub rhs: usize,
}

impl PsiIdentity {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsiReport {
    pub identities: Vec<PsiIdentity>,
    /// `underline psi^{2 nu}` maps the truncated witness back to `p`.
    pub witness_returns: Option<bool>,
    pub witness_rank: Option<usize>,
    pub expected_witness_rank: usize,
}

impl PsiReport {
    pub fn all_hold(&self) -> bool {
        self.identities.iter().all(PsiIdentity::holds)
            && self.witness_returns.unwrap_or(true)
            && self.witness_rank.map_or(true, |r| r == self.expected_witness_rank)
    }
}

/// Checks `m + gen-rk psi^{k+1} = gen-rk Gamma_{k+2}` along the computed
/// profile and, at a numeric basepoint, the return property of
/// `underline psi^{2 nu}` at the truncated conjugate-first witness.
pub fn psi_rank_checks(mf: &CRManifold, base: &Basepoint, opts: &ProfileOptions) -> Result<PsiReport> {
    let inv = segre_invariants(mf, base, opts)?;
    let r = &inv.profile.r;
    let chains: Vec<ChainMap> = GammaIter::new(mf, r.len(), base, Parity::L)?.collect::<Result<_>>()?;
    let mut identities = Vec::new();
    for k in 0..r.len().saturating_sub(1) {
        let c = &chains[k];
        let psi = psi_of(mf, c)?;
        let rk = map_rank(&psi, &c.chain_params(), &opts.rank_opts(2000 + k as u64))?.rank;
        identities.push(PsiIdentity {
            k,
            lhs: mf.m() + rk,
            rhs: r[k + 1],
        });
    }
    let expected = inv.orbit_dim_intrinsic;
    let (mut witness_returns, mut witness_rank) = (None, None);
    if mf.order().is_exact() && !base.is_symbolic() {
        let wit = find_witness(mf, base, &inv, Parity::Lbar, opts)?;
        let two_nu = 2 * inv.nu;
        let pt: Vec<GaussianRational> = wit.full_point()[..mf.m() * two_nu].to_vec();
        let c = gamma(mf, two_nu, base, Parity::Lbar)?;
        let psi = psi_of(mf, &c)?;
        let p = base.coords(mf.n()).expect("numeric");
        witness_returns = Some(psi.evaluate(&pt)? == p[..mf.n()]);
        let jac = psi.jacobian(&c.chain_params())?;
        witness_rank = Some(rank_at(&jac, &pt));
    }
    Ok(PsiReport {
        identities,
        witness_returns,
        witness_rank,
        expected_witness_rank: expected,
    })
}

/// Domain indices of basepoint parameters in a chain domain, if any.
pub fn base_params(c: &ChainMap) -> Vec<usize> {
    let dom = c.map.domain();
    (0..dom.len())
        .filter(|&v| matches!(dom.role_of(v), Role::BaseW | Role::BaseZeta | Role::BaseXi))
        .collect()
}
