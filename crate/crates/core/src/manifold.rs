//! CR-generic manifolds in graph form `z = xi + i*thetabar(w, zeta, xi)`,
//! their complexified CR vector fields and Segre varieties.

use std::sync::Arc;

use crate::algebra::{
    parse_series, AlgebraError, GaussianRational, Order, Role, Series, SeriesMap, VarSpace,
    VectorField,
};
use crate::error::{Error, Result};

/// A point of the complexification, or a symbolic generic point.
#[derive(Clone, Debug, PartialEq)]
pub enum Basepoint {
    Origin,
    /// Ambient coordinates `(w, z, zeta, xi)`.
    Numeric(Vec<GaussianRational>),
    /// `(w_p, zeta_p, xi_p)` are free parameters and `z_p = Qbar(w_p, zeta_p, xi_p)`.
    Symbolic,
}

impl Basepoint {
    pub fn is_symbolic(&self) -> bool {
        matches!(self, Basepoint::Symbolic)
    }

    /// Ambient coordinates of a non-symbolic basepoint.
    pub fn coords(&self, n: usize) -> Option<Vec<GaussianRational>> {
        match self {
            Basepoint::Origin => Some(vec![GaussianRational::zero(); 2 * n]),
            Basepoint::Numeric(v) => Some(v.clone()),
            Basepoint::Symbolic => None,
        }
    }

    pub fn is_origin(&self) -> bool {
        match self {
            Basepoint::Origin => true,
            Basepoint::Numeric(v) => v.iter().all(GaussianRational::is_zero),
            Basepoint::Symbolic => false,
        }
    }
}

/// The fixed point (numeric or symbolic) of a Segre variety.
#[derive(Clone, Debug, PartialEq)]
pub enum LeafBase {
    Numeric(Vec<GaussianRational>),
    Symbolic,
}

/// An m-tuple of commuting vector fields on the ambient `(w, z, zeta, xi)`.
#[derive(Clone, Debug)]
pub struct MVectorField {
    pub fields: Vec<VectorField>,
    /// Every field annihilates every `rho_j` on the manifold.
    pub tangent: bool,
    /// All mutual brackets vanish.
    pub commuting: bool,
}

/// A CR-generic manifold of CR dimension `m` and codimension `d`.
#[derive(Clone, Debug)]
pub struct CRManifold {
    m: usize,
    d: usize,
    order: Order,
    space: Arc<VarSpace>,
    theta_bar: Vec<Series>,
    theta: Vec<Series>,
}

impl CRManifold {
    /// Validates `theta_bar` (series over [`VarSpace::manifold`]) and
    /// derives `theta` as its conjugate.
    pub fn new(m: usize, d: usize, theta_bar: Vec<Series>, order: Order) -> Result<Self> {
        if m == 0 || d == 0 {
            return Err(Error::WrongDimensions(format!("m = {m}, d = {d}: both must be positive")));
        }
        if theta_bar.len() != d {
            return Err(Error::WrongDimensions(format!(
                "expected {d} components, got {}",
                theta_bar.len()
            )));
        }
        let space = theta_bar[0].space().clone();
        if *space != *VarSpace::manifold(m, d) {
            return Err(AlgebraError::VarSpaceMismatch.into());
        }
        let theta_bar: Vec<Series> = theta_bar.into_iter().map(|s| s.with_order(order.min(s.order()))).collect();
        for (j, s) in theta_bar.iter().enumerate() {
            if !VarSpace::same(s.space(), &space) {
                return Err(AlgebraError::VarSpaceMismatch.into());
            }
            if !s.constant_term().is_zero() {
                return Err(Error::NonzeroConstant { component: j + 1 });
            }
            for v in space.indices_of(Role::Z) {
                if s.depends_on(v) {
                    return Err(Error::ForbiddenVariable {
                        component: j + 1,
                        var: space.name(v).to_string(),
                    });
                }
            }
        }
        let theta = theta_bar
            .iter()
            .map(|s| s.sigma_conjugate())
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let order = theta_bar.iter().fold(order, |o, s| o.min(s.order()));
        let mf = CRManifold {
            m,
            d,
            order,
            space,
            theta_bar,
            theta,
        };
        mf.check_reality()?;
        Ok(mf)
    }

    /// Parses one expression per component.
    pub fn parse(m: usize, d: usize, exprs: &[&str], order: Order) -> Result<Self> {
        let space = VarSpace::manifold(m, d);
        let tb = exprs
            .iter()
            .map(|e| parse_series(e, &space, order))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::new(m, d, tb, order)
    }

    /// Converts a real graph `2y = h(w, wbar, x)` (with `z = x + i*y`) to
    /// graph form by solving `thetabar = h(w, zeta, xi + i*thetabar/2)`.
    pub fn graph_from_real(m: usize, d: usize, h: Vec<Series>, order: Order) -> Result<Self> {
        if h.len() != d {
            return Err(Error::WrongDimensions(format!("expected {d} components, got {}", h.len())));
        }
        let real = VarSpace::real_graph(m, d);
        for (j, hj) in h.iter().enumerate() {
            if !VarSpace::same(hj.space(), &real) {
                return Err(AlgebraError::VarSpaceMismatch.into());
            }
            if !hj.constant_term().is_zero() {
                return Err(Error::NonzeroConstant { component: j + 1 });
            }
            if hj.terms().keys().any(|e| crate::algebra::degree(e) == 1) {
                return Err(Error::SingularInput);
            }
            let diff = &hj.sigma_conjugate()? - hj;
            if let Some(mono) = diff.leading_low_term() {
                return Err(Error::RealityViolation {
                    component: j + 1,
                    monomial: mono,
                });
            }
        }
        let space = VarSpace::manifold(m, d);
        let x_dependent = h
            .iter()
            .any(|hj| real.indices_of(Role::X).iter().any(|&v| hj.depends_on(v)));
        let order = h.iter().fold(order, |o, s| o.min(s.order()));
        let max_iter = match order {
            Order::Truncated(n) => n as usize + 2,
            Order::Exact => 64,
        };
        let half_i = GaussianRational::from_parts(0, 1, 1, 2);
        let var = |v: usize| Series::var(&space, v, order);
        let mut tb: Vec<Series> = vec![Series::zero(&space, order); d];
        let mut converged = false;
        for _ in 0..max_iter {
            let mut subs = Vec::with_capacity(real.len());
            for j in 0..m {
                subs.push(var(j));
            }
            for j in 0..m {
                subs.push(var(m + d + j));
            }
            for k in 0..d {
                subs.push(&var(2 * m + d + k) + &tb[k].scale(&half_i));
            }
            let next = h
                .iter()
                .map(|hj| hj.compose(&subs))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            if next == tb {
                converged = true;
                break;
            }
            tb = next;
            if !x_dependent {
                converged = true;
                break;
            }
        }
        if !converged && order.is_exact() {
            return Err(Error::InvalidArgument(
                "the graph conversion of an x-dependent h is not a polynomial; use a truncated order".into(),
            ));
        }
        Self::new(m, d, tb, order)
    }

    pub fn parse_real(m: usize, d: usize, exprs: &[&str], order: Order) -> Result<Self> {
        let space = VarSpace::real_graph(m, d);
        let h = exprs
            .iter()
            .map(|e| parse_series(e, &space, order))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::graph_from_real(m, d, h, order)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.m + self.d
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn space(&self) -> &Arc<VarSpace> {
        &self.space
    }

    pub fn theta_bar(&self) -> &[Series] {
        &self.theta_bar
    }

    pub fn theta(&self) -> &[Series] {
        &self.theta
    }

    pub fn w_idx(&self, j: usize) -> usize {
        j
    }

    pub fn z_idx(&self, k: usize) -> usize {
        self.m + k
    }

    pub fn zeta_idx(&self, j: usize) -> usize {
        self.m + self.d + j
    }

    pub fn xi_idx(&self, k: usize) -> usize {
        2 * self.m + self.d + k
    }

    /// Indices of the intrinsic chart `(w, zeta, xi)`.
    pub fn chart_indices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.m).collect();
        v.extend((0..self.m).map(|j| self.zeta_idx(j)));
        v.extend((0..self.d).map(|k| self.xi_idx(k)));
        v
    }

    fn var(&self, v: usize) -> Series {
        Series::var(&self.space, v, self.order)
    }

    /// `thetabar(w, zeta, xi)` for series arguments over a common space.
    pub fn theta_bar_at(&self, w: &[Series], zeta: &[Series], xi: &[Series]) -> Result<Vec<Series>> {
        let target = w[0].space();
        let zero = Series::zero(target, Order::Exact);
        let mut subs: Vec<Series> = w.to_vec();
        subs.extend(std::iter::repeat(zero).take(self.d));
        subs.extend_from_slice(zeta);
        subs.extend_from_slice(xi);
        Ok(self
            .theta_bar
            .iter()
            .map(|t| t.compose(&subs))
            .collect::<std::result::Result<Vec<_>, _>>()?)
    }

    /// `theta(zeta, w, z)`.
    pub fn theta_at(&self, zeta: &[Series], w: &[Series], z: &[Series]) -> Result<Vec<Series>> {
        let target = w[0].space();
        let zero = Series::zero(target, Order::Exact);
        let mut subs: Vec<Series> = w.to_vec();
        subs.extend_from_slice(z);
        subs.extend_from_slice(zeta);
        subs.extend(std::iter::repeat(zero).take(self.d));
        Ok(self
            .theta
            .iter()
            .map(|t| t.compose(&subs))
            .collect::<std::result::Result<Vec<_>, _>>()?)
    }

    /// `Qbar(w, zeta, xi) = xi + i*thetabar(w, zeta, xi)`.
    pub fn q_bar(&self, w: &[Series], zeta: &[Series], xi: &[Series]) -> Result<Vec<Series>> {
        let tb = self.theta_bar_at(w, zeta, xi)?;
        let i = GaussianRational::i();
        Ok(xi.iter().zip(&tb).map(|(x, t)| x + &t.scale(&i)).collect())
    }

    /// `Q(zeta, w, z) = z - i*theta(zeta, w, z)`.
    pub fn q(&self, zeta: &[Series], w: &[Series], z: &[Series]) -> Result<Vec<Series>> {
        let th = self.theta_at(zeta, w, z)?;
        let i = GaussianRational::i();
        Ok(z.iter().zip(&th).map(|(x, t)| x - &t.scale(&i)).collect())
    }

    fn block_vars(&self, idx: impl Iterator<Item = usize>) -> Vec<Series> {
        idx.map(|v| self.var(v)).collect()
    }

    pub fn w_vars(&self) -> Vec<Series> {
        self.block_vars(0..self.m)
    }

    pub fn z_vars(&self) -> Vec<Series> {
        self.block_vars((0..self.d).map(|k| self.z_idx(k)))
    }

    pub fn zeta_vars(&self) -> Vec<Series> {
        self.block_vars((0..self.m).map(|j| self.zeta_idx(j)))
    }

    pub fn xi_vars(&self) -> Vec<Series> {
        self.block_vars((0..self.d).map(|k| self.xi_idx(k)))
    }

    /// `theta(zeta, w, xi + i*thetabar) - thetabar`, zero for a real manifold.
    pub fn reality_defect(&self) -> Result<Vec<Series>> {
        let (w, zeta, xi) = (self.w_vars(), self.zeta_vars(), self.xi_vars());
        let qb = self.q_bar(&w, &zeta, &xi)?;
        let th = self.theta_at(&zeta, &w, &qb)?;
        Ok(th.iter().zip(&self.theta_bar).map(|(a, b)| a - b).collect())
    }

    fn check_reality(&self) -> Result<()> {
        for (j, s) in self.reality_defect()?.iter().enumerate() {
            if let Some(mono) = s.leading_low_term() {
                return Err(Error::RealityViolation {
                    component: j + 1,
                    monomial: mono,
                });
            }
        }
        Ok(())
    }

    /// `rho_j = z_j - xi_j - i*thetabar_j(w, zeta, xi)`.
    pub fn rho(&self) -> Vec<Series> {
        let i = GaussianRational::i();
        (0..self.d)
            .map(|k| &(&self.var(self.z_idx(k)) - &self.var(self.xi_idx(k))) - &self.theta_bar[k].scale(&i))
            .collect()
    }

    /// `rho` pulled back along ambient components `(w, z, zeta, xi)`.
    pub fn rho_along(&self, comps: &[Series]) -> Result<Vec<Series>> {
        Ok(self
            .rho()
            .iter()
            .map(|r| r.compose(comps))
            .collect::<std::result::Result<Vec<_>, _>>()?)
    }

    /// Substitutes `z = Qbar(w, zeta, xi)` into a series over the ambient space.
    pub fn restrict(&self, f: &Series) -> Result<Series> {
        let (w, zeta, xi) = (self.w_vars(), self.zeta_vars(), self.xi_vars());
        let qb = self.q_bar(&w, &zeta, &xi)?;
        let mut subs = w;
        subs.extend(qb);
        subs.extend(zeta);
        subs.extend(xi);
        Ok(f.compose(&subs)?)
    }

    /// The complexified CR fields `L_j = d/dw_j + i*thetabar_{w_j} d/dz` and
    /// `Lbar_j = d/dzeta_j - i*theta_{zeta_j} d/dxi`, with certificates.
    pub fn vector_fields(&self) -> Result<(MVectorField, MVectorField)> {
        let all: Vec<usize> = (0..self.space.len()).collect();
        let i = GaussianRational::i();
        let mut ls = Vec::with_capacity(self.m);
        let mut lbs = Vec::with_capacity(self.m);
        for j in 0..self.m {
            let mut l = VectorField::coordinate(&self.space, all.clone(), self.w_idx(j), self.order);
            let mut lb = VectorField::coordinate(&self.space, all.clone(), self.zeta_idx(j), self.order);
            for k in 0..self.d {
                l.set_coeff(self.z_idx(k), self.theta_bar[k].diff(self.w_idx(j))?.scale(&i));
                lb.set_coeff(self.xi_idx(k), -self.theta[k].diff(self.zeta_idx(j))?.scale(&i));
            }
            ls.push(l);
            lbs.push(lb);
        }
        Ok((self.certify(ls)?, self.certify(lbs)?))
    }

    fn certify(&self, fields: Vec<VectorField>) -> Result<MVectorField> {
        let rho = self.rho();
        let mut tangent = true;
        for f in &fields {
            for r in &rho {
                if !self.restrict(&f.apply(r)?)?.is_zero() {
                    tangent = false;
                }
            }
        }
        let mut commuting = true;
        for a in 0..fields.len() {
            for b in a + 1..fields.len() {
                if !fields[a].bracket(&fields[b])?.is_zero() {
                    commuting = false;
                }
            }
        }
        Ok(MVectorField {
            fields,
            tangent,
            commuting,
        })
    }

    /// Ambient basepoint from chart coordinates `(w, zeta, xi)`.
    pub fn basepoint_from_chart(&self, chart: &[GaussianRational]) -> Result<Basepoint> {
        let (m, d) = (self.m, self.d);
        if chart.len() != 2 * m + d {
            return Err(Error::WrongDimensions(format!(
                "expected {} chart coordinates, got {}",
                2 * m + d,
                chart.len()
            )));
        }
        if !self.order.is_exact() && chart.iter().any(|c| !c.is_zero()) {
            return Err(Error::UnsupportedBasepoint(
                "numeric basepoints away from the origin need EXACT order".into(),
            ));
        }
        let mut amb = vec![GaussianRational::zero(); 2 * (m + d)];
        for j in 0..m {
            amb[self.w_idx(j)] = chart[j].clone();
            amb[self.zeta_idx(j)] = chart[m + j].clone();
        }
        for k in 0..d {
            amb[self.xi_idx(k)] = chart[2 * m + k].clone();
        }
        let i = GaussianRational::i();
        for k in 0..d {
            let t = self.theta_bar[k].eval(&amb)?;
            amb[self.z_idx(k)] = &chart[2 * m + k] + &(&i * &t);
        }
        Ok(Basepoint::Numeric(amb))
    }

    /// Accepts a numeric ambient point only if it satisfies `z = Qbar` exactly.
    pub fn check_basepoint(&self, base: &Basepoint) -> Result<()> {
        match base {
            Basepoint::Origin | Basepoint::Symbolic => Ok(()),
            Basepoint::Numeric(p) => {
                if p.len() != 2 * self.n() {
                    return Err(Error::WrongDimensions(format!(
                        "expected {} ambient coordinates, got {}",
                        2 * self.n(),
                        p.len()
                    )));
                }
                if !self.order.is_exact() && p.iter().any(|c| !c.is_zero()) {
                    return Err(Error::UnsupportedBasepoint(
                        "numeric basepoints away from the origin need EXACT order".into(),
                    ));
                }
                for r in self.rho() {
                    if !r.eval(p)?.is_zero() {
                        return Err(Error::OffManifold);
                    }
                }
                Ok(())
            }
        }
    }

    fn leaf_params(&self, space: &Arc<VarSpace>, role: Role, base: &LeafBase, offset: usize, len: usize) -> Result<Vec<Series>> {
        match base {
            LeafBase::Symbolic => Ok(space
                .indices_of(role)
                .into_iter()
                .map(|v| Series::var(space, v, self.order))
                .collect()),
            LeafBase::Numeric(vals) => {
                if vals.len() != self.n() {
                    return Err(Error::WrongDimensions(format!(
                        "expected {} point coordinates, got {}",
                        self.n(),
                        vals.len()
                    )));
                }
                Ok(vals[offset..offset + len]
                    .iter()
                    .map(|c| Series::constant(space, c.clone(), self.order))
                    .collect())
            }
        }
    }

    /// The complexified Segre variety of `tau_p = (zeta_p, xi_p)`:
    /// `s -> (s, xi_p + i*thetabar(s, zeta_p, xi_p), zeta_p, xi_p)`, over
    /// [`VarSpace::leaf`].
    pub fn segre_leaf(&self, tau_p: &LeafBase) -> Result<SeriesMap> {
        let sp = VarSpace::leaf(self.m, self.d);
        let s: Vec<Series> = sp.indices_of(Role::Leaf).into_iter().map(|v| Series::var(&sp, v, self.order)).collect();
        let zeta_p = self.leaf_params(&sp, Role::BaseZeta, tau_p, 0, self.m)?;
        let xi_p = self.leaf_params(&sp, Role::BaseXi, tau_p, self.m, self.d)?;
        let z = self.q_bar(&s, &zeta_p, &xi_p)?;
        let mut comps = s;
        comps.extend(z);
        comps.extend(zeta_p);
        comps.extend(xi_p);
        Ok(SeriesMap::new(&sp, &self.space, comps)?)
    }

    /// The conjugate complexified Segre variety of `t_p = (w_p, z_p)`:
    /// `s -> (w_p, z_p, s, z_p - i*theta(s, w_p, z_p))`.
    pub fn conjugate_segre_leaf(&self, t_p: &LeafBase) -> Result<SeriesMap> {
        let sp = VarSpace::leaf(self.m, self.d);
        let s: Vec<Series> = sp.indices_of(Role::Leaf).into_iter().map(|v| Series::var(&sp, v, self.order)).collect();
        let w_p = self.leaf_params(&sp, Role::BaseW, t_p, 0, self.m)?;
        let z_p = self.leaf_params(&sp, Role::BaseZ, t_p, self.m, self.d)?;
        let xi = self.q(&s, &w_p, &z_p)?;
        let mut comps = w_p;
        comps.extend(z_p);
        comps.extend(s);
        comps.extend(xi);
        Ok(SeriesMap::new(&sp, &self.space, comps)?)
    }

    /// Solves `z = xi + i*thetabar(w, zeta, xi)` for `xi = z - i*theta'`
    /// by fixed-point iteration and returns `theta'` to order `n`. For a
    /// real manifold this agrees with [`theta`](Self::theta).
    pub fn invert_graph(&self, n: u32) -> Result<Vec<Series>> {
        let ord = Order::Truncated(n);
        for (j, t) in self.theta_bar.iter().enumerate() {
            for k in 0..self.d {
                let mut e: crate::algebra::Monomial = smallvec::smallvec![0; self.space.len()];
                e[self.xi_idx(k)] = 1;
                if !t.coeff(&e).is_zero() {
                    return Err(Error::InvalidArgument(format!(
                        "component {} has a linear xi term; fixed-point inversion does not contract",
                        j + 1
                    )));
                }
            }
        }
        let tb: Vec<Series> = self.theta_bar.iter().map(|t| t.with_order(self.order.min(ord))).collect();
        let v = |i: usize| Series::var(&self.space, i, ord);
        let z: Vec<Series> = (0..self.d).map(|k| v(self.z_idx(k))).collect();
        let mut xi = z.clone();
        let i = GaussianRational::i();
        for _ in 0..=n {
            let mut subs: Vec<Series> = (0..self.m).map(v).collect();
            subs.extend((0..self.d).map(|_| Series::zero(&self.space, ord)));
            subs.extend((0..self.m).map(|j| v(self.zeta_idx(j))));
            subs.extend(xi.iter().cloned());
            let next: Vec<Series> = tb
                .iter()
                .zip(&z)
                .map(|(t, zk)| Ok(zk - &t.compose(&subs)?.scale(&i)))
                .collect::<std::result::Result<Vec<_>, AlgebraError>>()?;
            if next == xi {
                break;
            }
            xi = next;
        }
        Ok(xi.iter().zip(&z).map(|(x, zk)| (x - zk).scale(&i)).collect())
    }
}

/// Image of an ambient-valued map under `sigma(t, tau) = (conj tau, conj t)`:
/// component `x` becomes the conjugate of component `partner(x)`.
pub fn sigma_map(map: &SeriesMap) -> Result<SeriesMap> {
    let cod = map.codomain();
    let mut comps = Vec::with_capacity(map.len());
    for x in 0..cod.len() {
        let p = cod
            .partner(x)
            .ok_or_else(|| AlgebraError::UnpairedVariable(cod.name(x).to_string()))?;
        comps.push(map.component(p).sigma_conjugate()?);
    }
    Ok(SeriesMap::new(map.domain(), cod, comps)?)
}
