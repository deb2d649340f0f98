//! Concatenated flows of the complexified CR fields (Segre chains), their
//! projections, and the nested-substitution maps `v^k`.

use std::sync::Arc;

use crate::algebra::{AlgebraError, Role, Series, SeriesMap, VarSpace, VarSpaceBuilder};
use crate::error::{Error, Result};
use crate::manifold::{sigma_map, Basepoint, CRManifold};

/// Which field a chain starts with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    L,
    Lbar,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::L => Parity::Lbar,
            Parity::Lbar => Parity::L,
        }
    }

    /// Field used by the `i`-th flow (1-based).
    pub fn at(self, i: usize) -> Parity {
        if i % 2 == 1 {
            self
        } else {
            self.flip()
        }
    }
}

/// Coordinates used to present a chain map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chart {
    Ambient,
    /// `(w, zeta, xi)`, where `z` is recovered from the graph equation.
    WZetaXi,
    /// `(w, z, zeta)`, where `xi` is recovered from the conjugate equation.
    WZZeta,
}

/// `Gamma_k` (or its conjugate-first sibling) as a map from the chain
/// parameters, plus basepoint parameters when the basepoint is symbolic,
/// into the ambient `(w, z, zeta, xi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainMap {
    pub k: usize,
    pub parity: Parity,
    pub basepoint: Basepoint,
    pub map: SeriesMap,
}

fn named_space(blocks: &[(Role, Vec<String>)]) -> Arc<VarSpace> {
    let mut b = VarSpaceBuilder::new();
    for (role, names) in blocks {
        b.block(*role, names.iter().cloned());
    }
    b.build().expect("distinct names")
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|j| format!("{prefix}{j}")).collect()
}

/// `(w, z)` coordinates.
pub fn t_space(m: usize, d: usize) -> Arc<VarSpace> {
    named_space(&[(Role::W, numbered("w", m)), (Role::Z, numbered("z", d))])
}

/// `(zeta, xi)` coordinates.
pub fn tau_space(m: usize, d: usize) -> Arc<VarSpace> {
    named_space(&[(Role::Zeta, numbered("zeta", m)), (Role::Xi, numbered("xi", d))])
}

pub fn chart_space(mf: &CRManifold, chart: Chart) -> Arc<VarSpace> {
    let (m, d) = (mf.m(), mf.d());
    match chart {
        Chart::Ambient => mf.space().clone(),
        Chart::WZetaXi => named_space(&[
            (Role::W, numbered("w", m)),
            (Role::Zeta, numbered("zeta", m)),
            (Role::Xi, numbered("xi", d)),
        ]),
        Chart::WZZeta => named_space(&[
            (Role::W, numbered("w", m)),
            (Role::Z, numbered("z", d)),
            (Role::Zeta, numbered("zeta", m)),
        ]),
    }
}

fn chart_indices(mf: &CRManifold, chart: Chart) -> Vec<usize> {
    let (m, d) = (mf.m(), mf.d());
    match chart {
        Chart::Ambient => (0..2 * (m + d)).collect(),
        Chart::WZetaXi => mf.chart_indices(),
        Chart::WZZeta => (0..2 * m + d).collect(),
    }
}

impl ChainMap {
    /// Domain indices of the chain parameters (never the basepoint ones).
    pub fn chain_params(&self) -> Vec<usize> {
        let dom = self.map.domain();
        (0..dom.len())
            .filter(|&v| matches!(dom.role_of(v), Role::Chain(_)))
            .collect()
    }

    pub fn in_chart(&self, mf: &CRManifold, chart: Chart) -> Result<SeriesMap> {
        Ok(self
            .map
            .project(&chart_indices(mf, chart), &chart_space(mf, chart))?)
    }

    /// `pi_t` of the map.
    pub fn pi_t(&self, mf: &CRManifold) -> Result<SeriesMap> {
        let idx: Vec<usize> = (0..mf.n()).collect();
        Ok(self.map.project(&idx, &t_space(mf.m(), mf.d()))?)
    }

    /// `pi_tau` of the map.
    pub fn pi_tau(&self, mf: &CRManifold) -> Result<SeriesMap> {
        let idx: Vec<usize> = (mf.n()..2 * mf.n()).collect();
        Ok(self.map.project(&idx, &tau_space(mf.m(), mf.d()))?)
    }
}

/// Starting point of a chain, as constant (or parametrized) series over `space`.
pub fn initial_state(mf: &CRManifold, base: &Basepoint, space: &Arc<VarSpace>) -> Result<Vec<Series>> {
    let ord = mf.order();
    match base {
        Basepoint::Symbolic => {
            let var = |r: Role| -> Vec<Series> {
                space.indices_of(r).into_iter().map(|v| Series::var(space, v, ord)).collect()
            };
            let (pw, pzeta, pxi) = (var(Role::BaseW), var(Role::BaseZeta), var(Role::BaseXi));
            if pw.len() != mf.m() || pxi.len() != mf.d() {
                return Err(Error::UnsupportedBasepoint("space lacks basepoint parameters".into()));
            }
            let z = mf.q_bar(&pw, &pzeta, &pxi)?;
            let mut st = pw;
            st.extend(z);
            st.extend(pzeta);
            st.extend(pxi);
            Ok(st)
        }
        other => {
            mf.check_basepoint(other)?;
            let pt = other.coords(mf.n()).expect("numeric basepoint");
            Ok(pt.into_iter().map(|c| Series::constant(space, c, ord)).collect())
        }
    }
}

fn flow_unchecked(mf: &CRManifold, which: Parity, state: &[Series], param: &[Series]) -> Result<Vec<Series>> {
    let (m, d) = (mf.m(), mf.d());
    let w = &state[..m];
    let z = &state[m..m + d];
    let zeta = &state[m + d..2 * m + d];
    let xi = &state[2 * m + d..];
    match which {
        Parity::L => {
            let w2: Vec<Series> = w.iter().zip(param).map(|(a, b)| a + b).collect();
            let z2 = mf.q_bar(&w2, zeta, xi)?;
            let mut out = w2;
            out.extend(z2);
            out.extend_from_slice(zeta);
            out.extend_from_slice(xi);
            Ok(out)
        }
        Parity::Lbar => {
            let zeta2: Vec<Series> = zeta.iter().zip(param).map(|(a, b)| a + b).collect();
            let xi2 = mf.q(&zeta2, w, z)?;
            let mut out = w.to_vec();
            out.extend_from_slice(z);
            out.extend(zeta2);
            out.extend(xi2);
            Ok(out)
        }
    }
}

/// One m-flow of `L` or `Lbar` for time `param` starting at `state` (a
/// parametrized point of the complexification).
pub fn flow(mf: &CRManifold, which: Parity, state: &[Series], param: &[Series]) -> Result<Vec<Series>> {
    if state.len() != 2 * mf.n() || param.len() != mf.m() {
        return Err(Error::WrongDimensions(format!(
            "flow needs {} state and {} time components",
            2 * mf.n(),
            mf.m()
        )));
    }
    if mf.rho_along(state)?.iter().any(|r| !r.is_zero()) {
        return Err(Error::OffManifold);
    }
    flow_unchecked(mf, which, state, param)
}

/// Lazily produces `Gamma_1, Gamma_2, ...` up to `kmax`, sharing prefixes.
pub struct GammaIter<'a> {
    mf: &'a CRManifold,
    parity: Parity,
    base: Basepoint,
    kmax: usize,
    space: Arc<VarSpace>,
    state: Vec<Series>,
    k: usize,
}

impl<'a> GammaIter<'a> {
    pub fn new(mf: &'a CRManifold, kmax: usize, base: &Basepoint, parity: Parity) -> Result<Self> {
        let space = VarSpace::chain(mf.m(), kmax, base.is_symbolic().then_some(mf.d()));
        let state = initial_state(mf, base, &space)?;
        Ok(GammaIter {
            mf,
            parity,
            base: base.clone(),
            kmax,
            space,
            state,
            k: 0,
        })
    }

    fn emit(&self) -> Result<ChainMap> {
        let (m, k, kmax) = (self.mf.m(), self.k, self.kmax);
        let target = VarSpace::chain(m, k, self.base.is_symbolic().then_some(self.mf.d()));
        let mapping: Vec<usize> = (0..self.space.len())
            .map(|v| {
                if v < m * k {
                    v
                } else if v < m * kmax {
                    0
                } else {
                    v - m * (kmax - k)
                }
            })
            .collect();
        let comps = self.state.iter().map(|s| s.embed(&target, &mapping)).collect();
        Ok(ChainMap {
            k,
            parity: self.parity,
            basepoint: self.base.clone(),
            map: SeriesMap::new(&target, self.mf.space(), comps)?,
        })
    }
}

impl Iterator for GammaIter<'_> {
    type Item = Result<ChainMap>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.k >= self.kmax {
            return None;
        }
        self.k += 1;
        let m = self.mf.m();
        let ord = self.mf.order();
        let param: Vec<Series> = self
            .space
            .indices_of(Role::Chain(self.k))
            .into_iter()
            .map(|v| Series::var(&self.space, v, ord))
            .collect();
        debug_assert_eq!(param.len(), m);
        match flow_unchecked(self.mf, self.parity.at(self.k), &self.state, &param) {
            Ok(s) => self.state = s,
            Err(e) => return Some(Err(e)),
        }
        Some(self.emit())
    }
}

/// `Gamma_k` for parity `L`, `underline Gamma_k` for parity `Lbar`.
pub fn gamma(mf: &CRManifold, k: usize, base: &Basepoint, parity: Parity) -> Result<ChainMap> {
    if k == 0 {
        return Err(Error::InvalidArgument("chain length must be at least 1".into()));
    }
    GammaIter::new(mf, k, base, parity)?
        .last()
        .expect("k >= 1")
}

/// All of `Gamma_1..Gamma_kmax`.
pub fn gammas(mf: &CRManifold, kmax: usize, base: &Basepoint, parity: Parity) -> Result<Vec<ChainMap>> {
    GammaIter::new(mf, kmax, base, parity)?.collect()
}

/// `psi^k`: the `(w, z)` part of `Gamma_k` for odd `k`, the `(zeta, xi)`
/// part for even `k`; the conjugate-first chain swaps the two rules.
pub fn psi_of(mf: &CRManifold, c: &ChainMap) -> Result<SeriesMap> {
    let odd = c.k % 2 == 1;
    let to_t = match c.parity {
        Parity::L => odd,
        Parity::Lbar => !odd,
    };
    if to_t {
        c.pi_t(mf)
    } else {
        c.pi_tau(mf)
    }
}

pub fn psi(mf: &CRManifold, k: usize, base: &Basepoint, parity: Parity) -> Result<SeriesMap> {
    psi_of(mf, &gamma(mf, k, base, parity)?)
}

/// The nested substitution `v^k`, built from `Q` and `Qbar` alone:
/// `v^k(a_1..a_k) = (a_1, Qbar(a_1, a_2, Q(a_2, a_3, Qbar(...))))` with
/// zero tails.
pub fn v_map(mf: &CRManifold, k: usize) -> Result<SeriesMap> {
    let (m, d) = (mf.m(), mf.d());
    let ord = mf.order();
    let space = VarSpace::chain(m, k, None);
    let cod = t_space(m, d);
    if k == 0 {
        let comps = vec![Series::zero(&space, ord); m + d];
        return Ok(SeriesMap::new(&space, &cod, comps)?);
    }
    let block = |i: usize| -> Vec<Series> {
        if i > k {
            vec![Series::zero(&space, ord); m]
        } else {
            space
                .indices_of(Role::Chain(i))
                .into_iter()
                .map(|v| Series::var(&space, v, ord))
                .collect()
        }
    };
    let mut val = vec![Series::zero(&space, ord); d];
    for j in (1..=k).rev() {
        val = if j % 2 == 1 {
            mf.q_bar(&block(j), &block(j + 1), &val)?
        } else {
            mf.q(&block(j), &block(j + 1), &val)?
        };
    }
    let mut comps = block(1);
    comps.extend(val);
    Ok(SeriesMap::new(&space, &cod, comps)?)
}

/// `vbar^k`: coefficients conjugated, parameters kept.
pub fn v_bar_map(mf: &CRManifold, k: usize) -> Result<SeriesMap> {
    let v = v_map(mf, k)?;
    Ok(v.map_components(|c| Ok(c.conj_coefficients()))?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReparamVerdict {
    pub k: usize,
    pub holds: bool,
    /// Lowest monomial of the first nonzero difference, if any.
    pub defect: Option<String>,
}

/// Largest chain length covered by the tabulated reparametrizations.
pub const REPARAM_MAX: usize = 5;

/// Checks `v^k(...) = pi_t Gamma_k` (odd `k`) or `vbar^k(...) = pi_tau
/// Gamma_k` (even `k`) at the origin, where the `j`-th argument of `v^k`
/// is `w_{k-j+1} + w_{k-j-1} + ...`.
pub fn check_reparam(mf: &CRManifold, k: usize) -> Result<ReparamVerdict> {
    if k == 0 || k > REPARAM_MAX {
        return Err(Error::InvalidArgument(format!(
            "reparametrization identities are tabulated for 1 <= k <= {REPARAM_MAX}"
        )));
    }
    let g = gamma(mf, k, &Basepoint::Origin, Parity::L)?;
    let target = if k % 2 == 1 { g.pi_t(mf)? } else { g.pi_tau(mf)? };
    let v = if k % 2 == 1 { v_map(mf, k)? } else { v_bar_map(mf, k)? };
    let dom = g.map.domain().clone();
    let ord = mf.order();
    let m = mf.m();
    let mut subs = Vec::with_capacity(m * k);
    for j in 1..=k {
        for c in 0..m {
            let mut acc = Series::zero(&dom, ord);
            let mut i = k - j + 1;
            loop {
                acc = &acc + &Series::var(&dom, (i - 1) * m + c, ord);
                if i <= 2 {
                    break;
                }
                i -= 2;
            }
            subs.push(acc);
        }
    }
    let lhs = v.map_components(|c| c.compose(&subs))?;
    let diff = lhs.difference(&SeriesMap::new(&dom, lhs.codomain(), target.components().to_vec())?)?;
    let defect = diff.components().iter().find_map(|c| c.leading_low_term());
    Ok(ReparamVerdict {
        k,
        holds: defect.is_none(),
        defect,
    })
}

/// Applies `sigma` to a chain map: components are conjugated and swapped
/// along the `t <-> tau` pairing, parameters are real, the parity flips.
pub fn sigma_image(c: &ChainMap) -> Result<ChainMap> {
    let basepoint = match &c.basepoint {
        Basepoint::Symbolic => {
            return Err(Error::UnsupportedBasepoint(
                "the conjugate of a symbolic basepoint is not of the same parametrized form".into(),
            ))
        }
        Basepoint::Origin => Basepoint::Origin,
        Basepoint::Numeric(p) => {
            let cod = c.map.codomain();
            let q = (0..p.len())
                .map(|x| {
                    cod.partner(x)
                        .map(|y| p[y].conj())
                        .ok_or_else(|| AlgebraError::UnpairedVariable(cod.name(x).to_string()))
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Basepoint::Numeric(q)
        }
    };
    Ok(ChainMap {
        k: c.k,
        parity: c.parity.flip(),
        basepoint,
        map: sigma_map(&c.map)?,
    })
}

/// `rho` vanishes identically along the chain.
pub fn in_manifold(mf: &CRManifold, c: &ChainMap) -> Result<bool> {
    Ok(mf.rho_along(c.map.components())?.iter().all(Series::is_zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_series, Order};

    fn comps(c: &SeriesMap) -> Vec<String> {
        c.components().iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn heisenberg_first_flow_from_origin() {
        let h = CRManifold::parse(1, 1, &["w1*zeta1"], Order::Exact).unwrap();
        let g1 = gamma(&h, 1, &Basepoint::Origin, Parity::L).unwrap();
        assert_eq!(comps(&g1.map), ["u1_1", "0", "0", "0"]);
    }

    #[test]
    fn quartic_gamma2_and_gamma3() {
        let q = CRManifold::parse(1, 1, &["w1^2*zeta1^2"], Order::Exact).unwrap();
        let g2 = gamma(&q, 2, &Basepoint::Origin, Parity::L).unwrap();
        assert_eq!(comps(&g2.map), ["u1_1", "0", "u2_1", "-i*u1_1^2*u2_1^2"]);
        let g3 = gamma(&q, 3, &Basepoint::Origin, Parity::L).unwrap();
        let dom = g3.map.domain();
        let e = |s| parse_series(s, dom, Order::Exact).unwrap();
        assert_eq!(g3.map.component(0), &e("u1_1 + u3_1"));
        assert_eq!(g3.map.component(1), &e("i*u2_1^2*(u3_1^2 + 2*u1_1*u3_1)"));
    }

    #[test]
    fn levi_flat_chains_decouple() {
        let f = CRManifold::parse(1, 1, &["0"], Order::Exact).unwrap();
        let g = gamma(&f, 5, &Basepoint::Origin, Parity::L).unwrap();
        assert_eq!(comps(&g.map), ["u1_1 + u3_1 + u5_1", "0", "u2_1 + u4_1", "0"]);
        let s = sigma_image(&g).unwrap();
        assert_eq!(comps(&s.map), ["u2_1 + u4_1", "0", "u1_1 + u3_1 + u5_1", "0"]);
    }

    #[test]
    fn psi_and_v_small_cases() {
        let h = CRManifold::parse(1, 1, &["w1*zeta1"], Order::Exact).unwrap();
        let p2 = psi(&h, 2, &Basepoint::Origin, Parity::L).unwrap();
        assert_eq!(comps(&p2), ["u2_1", "-i*u1_1*u2_1"]);
        let v2 = v_map(&h, 2).unwrap();
        assert_eq!(comps(&v2), ["u1_1", "i*u1_1*u2_1"]);
        let v0 = v_map(&h, 0).unwrap();
        assert!(v0.is_zero() && v0.len() == 2);
    }

    #[test]
    fn flow_rejects_off_manifold_state() {
        let h = CRManifold::parse(1, 1, &["w1*zeta1"], Order::Exact).unwrap();
        let sp = VarSpace::chain(1, 1, None);
        let one = Series::one(&sp, Order::Exact);
        let zero = Series::zero(&sp, Order::Exact);
        let state = vec![zero.clone(), one, zero.clone(), zero];
        let t = vec![Series::var(&sp, 0, Order::Exact)];
        assert_eq!(flow(&h, Parity::L, &state, &t), Err(Error::OffManifold));
    }
}
