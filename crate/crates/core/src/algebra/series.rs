//! Sparse multivariate polynomials and truncated power series over `Q(i)`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use super::{AlgebraError, GaussianRational, VarSpace};

/// Exponent vector, one entry per variable of the owning [`VarSpace`].
pub type Monomial = SmallVec<[u16; 16]>;

pub fn degree(m: &Monomial) -> u32 {
    m.iter().map(|&e| e as u32).sum()
}

/// Graded-lexicographic comparison: total degree first, then lexicographic.
pub fn grlex(a: &Monomial, b: &Monomial) -> Ordering {
    degree(a).cmp(&degree(b)).then_with(|| a.cmp(b))
}

/// Truncation order of a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    /// Polynomial mode: nothing is truncated.
    Exact,
    /// All terms of total degree `<= N` are known; higher ones are discarded.
    Truncated(u32),
}

impl Order {
    pub fn min(self, other: Order) -> Order {
        match (self, other) {
            (Order::Exact, o) | (o, Order::Exact) => o,
            (Order::Truncated(a), Order::Truncated(b)) => Order::Truncated(a.min(b)),
        }
    }

    pub fn admits(self, deg: u32) -> bool {
        match self {
            Order::Exact => true,
            Order::Truncated(n) => deg <= n,
        }
    }

    pub fn is_exact(self) -> bool {
        self == Order::Exact
    }

    /// Order after one differentiation.
    pub fn lowered(self) -> Order {
        match self {
            Order::Exact => Order::Exact,
            Order::Truncated(n) => Order::Truncated(n.saturating_sub(1)),
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Exact => write!(f, "EXACT"),
            Order::Truncated(n) => write!(f, "{n}"),
        }
    }
}

/// A sparse series: a finite map from exponent vectors to nonzero
/// coefficients, over a fixed variable space, with a truncation order.
#[derive(Clone)]
pub struct Series {
    space: Arc<VarSpace>,
    terms: BTreeMap<Monomial, GaussianRational>,
    order: Order,
}

impl PartialEq for Series {
    fn eq(&self, other: &Self) -> bool {
        VarSpace::same(&self.space, &other.space)
            && self.order == other.order
            && self.terms == other.terms
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series[{}]({})", self.order, self)
    }
}

impl Series {
    pub fn zero(space: &Arc<VarSpace>, order: Order) -> Self {
        Series {
            space: space.clone(),
            terms: BTreeMap::new(),
            order,
        }
    }

    pub fn constant(space: &Arc<VarSpace>, c: GaussianRational, order: Order) -> Self {
        let mut s = Self::zero(space, order);
        if !c.is_zero() {
            s.terms.insert(Self::unit_monomial(space.len()), c);
        }
        s
    }

    pub fn one(space: &Arc<VarSpace>, order: Order) -> Self {
        Self::constant(space, GaussianRational::one(), order)
    }

    /// The coordinate function of variable `var`.
    pub fn var(space: &Arc<VarSpace>, var: usize, order: Order) -> Self {
        let mut e = Self::unit_monomial(space.len());
        e[var] = 1;
        Self::monomial(space, e, GaussianRational::one(), order)
    }

    pub fn named(space: &Arc<VarSpace>, name: &str, order: Order) -> Result<Self, AlgebraError> {
        Ok(Self::var(space, space.var(name)?, order))
    }

    pub fn monomial(
        space: &Arc<VarSpace>,
        exps: Monomial,
        c: GaussianRational,
        order: Order,
    ) -> Self {
        debug_assert_eq!(exps.len(), space.len());
        let mut s = Self::zero(space, order);
        if !c.is_zero() && order.admits(degree(&exps)) {
            s.terms.insert(exps, c);
        }
        s
    }

    /// Builds a series from raw terms, dropping zeros and over-degree terms
    /// and merging duplicates.
    pub fn from_terms(
        space: &Arc<VarSpace>,
        terms: impl IntoIterator<Item = (Monomial, GaussianRational)>,
        order: Order,
    ) -> Self {
        let mut s = Self::zero(space, order);
        for (e, c) in terms {
            s.add_term(e, &c);
        }
        s
    }

    fn unit_monomial(n: usize) -> Monomial {
        SmallVec::from_elem(0, n)
    }

    fn add_term(&mut self, e: Monomial, c: &GaussianRational) {
        if c.is_zero() || !self.order.admits(degree(&e)) {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn space(&self) -> &Arc<VarSpace> {
        &self.space
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, GaussianRational> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest total degree of a stored term (0 for the zero series).
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(degree).max().unwrap_or(0)
    }

    /// Lowest total degree of a stored term, `None` for zero.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().map(degree).min()
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.terms
            .get(&Self::unit_monomial(self.space.len()))
            .cloned()
            .unwrap_or_default()
    }

    pub fn coeff(&self, e: &[u16]) -> GaussianRational {
        let key: Monomial = SmallVec::from_slice(e);
        self.terms.get(&key).cloned().unwrap_or_default()
    }

    /// Whether any stored term involves variable `var`.
    pub fn depends_on(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    /// Reinterprets the series with a new truncation order (dropping terms
    /// above it). Raising the order of a truncated series is not sound and
    /// is rejected by a debug assertion.
    pub fn with_order(&self, order: Order) -> Series {
        debug_assert!(
            self.order.is_exact() || self.order.min(order) == order,
            "cannot raise the order of a truncated series"
        );
        let mut s = Self::zero(&self.space, order);
        for (e, c) in &self.terms {
            if order.admits(degree(e)) {
                s.terms.insert(e.clone(), c.clone());
            }
        }
        s
    }

    /// The known terms as an exact polynomial. Callers must truncate any
    /// result derived from it at an order that the discarded tail cannot
    /// reach.
    pub fn polynomial_part(&self) -> Series {
        Series {
            space: self.space.clone(),
            terms: self.terms.clone(),
            order: Order::Exact,
        }
    }

    fn check_space(&self, other: &Series) -> Result<(), AlgebraError> {
        if VarSpace::same(&self.space, &other.space) {
            Ok(())
        } else {
            Err(AlgebraError::VarSpaceMismatch)
        }
    }

    pub fn try_add(&self, other: &Series) -> Result<Series, AlgebraError> {
        self.check_space(other)?;
        let order = self.order.min(other.order);
        let mut s = self.with_order(order);
        for (e, c) in &other.terms {
            s.add_term(e.clone(), c);
        }
        Ok(s)
    }

    pub fn try_sub(&self, other: &Series) -> Result<Series, AlgebraError> {
        self.check_space(other)?;
        let order = self.order.min(other.order);
        let mut s = self.with_order(order);
        for (e, c) in &other.terms {
            s.add_term(e.clone(), &-c);
        }
        Ok(s)
    }

    pub fn try_mul(&self, other: &Series) -> Result<Series, AlgebraError> {
        self.check_space(other)?;
        let order = self.order.min(other.order);
        let (a, b) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc: HashMap<Monomial, GaussianRational> = HashMap::new();
        let bdeg: Vec<(u32, &Monomial, &GaussianRational)> =
            b.terms.iter().map(|(e, c)| (degree(e), e, c)).collect();
        for (ea, ca) in &a.terms {
            let da = degree(ea);
            for &(db, eb, cb) in &bdeg {
                if !order.admits(da + db) {
                    continue;
                }
                let e: Monomial = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                let c = ca * cb;
                match acc.entry(e) {
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(c);
                    }
                    std::collections::hash_map::Entry::Occupied(mut o) => {
                        *o.get_mut() += &c;
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(Series {
            space: self.space.clone(),
            terms,
            order,
        })
    }

    pub fn scale(&self, c: &GaussianRational) -> Series {
        if c.is_zero() {
            return Self::zero(&self.space, self.order);
        }
        Series {
            space: self.space.clone(),
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
            order: self.order,
        }
    }

    pub fn pow(&self, e: u32) -> Series {
        let mut acc = Series::one(&self.space, self.order);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Partial derivative with respect to variable index `var`.
    pub fn diff(&self, var: usize) -> Result<Series, AlgebraError> {
        if var >= self.space.len() {
            return Err(AlgebraError::UnknownVariable(format!("#{var}")));
        }
        let order = self.order.lowered();
        let mut s = Self::zero(&self.space, order);
        for (e, c) in &self.terms {
            let k = e[var];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            s.add_term(e2, &(c * &GaussianRational::from_int(k as i64)));
        }
        Ok(s)
    }

    pub fn diff_named(&self, name: &str) -> Result<Series, AlgebraError> {
        self.diff(self.space.var(name)?)
    }

    /// Conjugates coefficients and transports exponents along the pairing
    /// of the variable space.
    pub fn sigma_conjugate(&self) -> Result<Series, AlgebraError> {
        let n = self.space.len();
        let mut perm = Vec::with_capacity(n);
        for v in 0..n {
            match self.space.partner(v) {
                Some(p) => perm.push(p),
                None => {
                    // only variables that actually occur need a partner
                    if self.depends_on(v) {
                        return Err(AlgebraError::UnpairedVariable(self.space.name(v).to_string()));
                    }
                    perm.push(v);
                }
            }
        }
        let mut s = Self::zero(&self.space, self.order);
        for (e, c) in &self.terms {
            let mut e2 = Self::unit_monomial(n);
            for v in 0..n {
                e2[perm[v]] = e[v];
            }
            s.terms.insert(e2, c.conj());
        }
        Ok(s)
    }

    /// Conjugates coefficients only (variables are treated as real).
    pub fn conj_coefficients(&self) -> Series {
        Series {
            space: self.space.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.conj())).collect(),
            order: self.order,
        }
    }

    /// Moves the series into `target`, sending variable `v` to `mapping[v]`.
    pub fn embed(&self, target: &Arc<VarSpace>, mapping: &[usize]) -> Series {
        assert_eq!(mapping.len(), self.space.len());
        let mut s = Self::zero(target, self.order);
        for (e, c) in &self.terms {
            let mut e2 = Self::unit_monomial(target.len());
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    e2[mapping[v]] += k;
                }
            }
            s.add_term(e2, c);
        }
        s
    }

    /// `f ∘ subs`: substitutes `subs[v]` for variable `v`. All substituted
    /// series must live in one common space, which becomes the result space.
    ///
    /// A truncated `f` only admits substitutions without constant terms.
    pub fn compose(&self, subs: &[Series]) -> Result<Series, AlgebraError> {
        if subs.len() != self.space.len() {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.space.len(),
                found: subs.len(),
            });
        }
        let target = match subs.first() {
            Some(s) => s.space.clone(),
            None => {
                return Err(AlgebraError::DimensionMismatch {
                    expected: 1,
                    found: 0,
                })
            }
        };
        let mut order = self.order;
        for s in subs {
            if !VarSpace::same(&s.space, &target) {
                return Err(AlgebraError::VarSpaceMismatch);
            }
            order = order.min(s.order);
        }
        if !self.order.is_exact() {
            for (v, s) in subs.iter().enumerate() {
                if self.depends_on(v) && !s.constant_term().is_zero() {
                    return Err(AlgebraError::TruncationUnsound(self.space.name(v).to_string()));
                }
            }
        }
        let mut cache: HashMap<(usize, u16), Series> = HashMap::new();
        let mut out = Series::zero(&target, order);
        for (e, c) in &self.terms {
            let mut acc = Series::constant(&target, c.clone(), order);
            for (v, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let p = power_cached(&mut cache, subs, v, k, order);
                acc = &acc * &p;
                if acc.is_zero() {
                    break;
                }
            }
            for (e2, c2) in acc.terms {
                out.add_term(e2, &c2);
            }
        }
        Ok(out)
    }

    /// Value at a point (the polynomial part in truncated mode).
    pub fn eval(&self, point: &[GaussianRational]) -> Result<GaussianRational, AlgebraError> {
        if point.len() != self.space.len() {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.space.len(),
                found: point.len(),
            });
        }
        let mut pows: HashMap<(usize, u16), GaussianRational> = HashMap::new();
        let mut acc = GaussianRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (v, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let p = pows
                    .entry((v, k))
                    .or_insert_with(|| point[v].pow(k as u32));
                t *= p;
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Substitutes constants for some variables, keeping the space.
    pub fn partial_eval(&self, values: &[(usize, GaussianRational)]) -> Series {
        let mut s = Series::zero(&self.space, self.order);
        for (e, c) in &self.terms {
            let mut t = c.clone();
            let mut e2 = e.clone();
            for (v, val) in values {
                let k = e[*v];
                if k > 0 {
                    t *= &val.pow(k as u32);
                    e2[*v] = 0;
                }
            }
            s.add_term(e2, &t);
        }
        s
    }

    /// Terms in graded-lexicographic order, highest first.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &GaussianRational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| grlex(b.0, a.0));
        v
    }

    /// The lowest monomial (graded-lex) with nonzero coefficient, rendered.
    pub fn leading_low_term(&self) -> Option<String> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| grlex(a.0, b.0));
        v.first()
            .map(|(e, c)| format_term(&self.space, e, c))
    }
}

fn power_cached(
    cache: &mut HashMap<(usize, u16), Series>,
    subs: &[Series],
    v: usize,
    k: u16,
    order: Order,
) -> Series {
    if let Some(p) = cache.get(&(v, k)) {
        return p.clone();
    }
    let p = if k == 1 {
        subs[v].with_order(order)
    } else {
        let half = power_cached(cache, subs, v, k / 2, order);
        let sq = &half * &half;
        if k % 2 == 1 {
            let one = power_cached(cache, subs, v, 1, order);
            &sq * &one
        } else {
            sq
        }
    };
    cache.insert((v, k), p.clone());
    p
}

fn format_monomial(space: &VarSpace, e: &Monomial) -> String {
    let mut parts = Vec::new();
    for (v, &k) in e.iter().enumerate() {
        match k {
            0 => {}
            1 => parts.push(space.name(v).to_string()),
            _ => parts.push(format!("{}^{}", space.name(v), k)),
        }
    }
    parts.join("*")
}

fn format_term(space: &VarSpace, e: &Monomial, c: &GaussianRational) -> String {
    let mono = format_monomial(space, e);
    if mono.is_empty() {
        return c.to_string();
    }
    let cs = c.to_string();
    if c.is_one() {
        mono
    } else if (-c).is_one() {
        format!("-{mono}")
    } else if !c.re.is_zero_ref() && !c.im.is_zero_ref() {
        format!("({cs})*{mono}")
    } else {
        format!("{cs}*{mono}")
    }
}

trait ZeroRef {
    fn is_zero_ref(&self) -> bool;
}

impl ZeroRef for num_rational::BigRational {
    fn is_zero_ref(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

impl fmt::Display for Series {
    /// Canonical rendering: graded-lex order (highest first), parseable by
    /// [`parse_series`](super::parse_series).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.sorted_terms() {
            let t = format_term(&self.space, e, c);
            if first {
                write!(f, "{t}")?;
                first = false;
            } else if let Some(rest) = t.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {t}")?;
            }
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl<'a> std::ops::$tr<&'a Series> for &'a Series {
            type Output = Series;
            /// Panics if the variable spaces differ.
            fn $m(self, o: &Series) -> Series {
                self.$try(o).expect("series over different variable spaces")
            }
        }
        impl std::ops::$tr for Series {
            type Output = Series;
            fn $m(self, o: Series) -> Series {
                (&self).$try(&o).expect("series over different variable spaces")
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl std::ops::Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale(&GaussianRational::from_int(-1))
    }
}

impl std::ops::Neg for Series {
    type Output = Series;
    fn neg(self) -> Series {
        -&self
    }
}

/// Arithmetic selector for [`series_arith`].
#[derive(Clone, Debug)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Scale(GaussianRational),
}

/// Exact `a op b` (for `Scale`, `b` is ignored).
pub fn series_arith(a: &Series, b: &Series, op: ArithOp) -> Result<Series, AlgebraError> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Sub => a.try_sub(b),
        ArithOp::Mul => a.try_mul(b),
        ArithOp::Scale(c) => Ok(a.scale(&c)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_series;

    fn m11() -> Arc<VarSpace> {
        VarSpace::manifold(1, 1)
    }

    fn p(s: &str) -> Series {
        parse_series(s, &m11(), Order::Exact).unwrap()
    }

    #[test]
    fn additive_inverse_cancels() {
        let a = p("w1*zeta1");
        assert!((&a + &(-&a)).is_zero());
    }

    #[test]
    fn monomial_product() {
        let s = &p("w1") * &p("zeta1");
        assert_eq!(s, p("w1*zeta1"));
        assert!(s.coeff(&[1, 0, 1, 0]).is_one());
    }

    #[test]
    fn binomial_square_truncated() {
        // hand expansion of (w + z)^2
        let sp = m11();
        let a = parse_series("w1 + z1", &sp, Order::Truncated(2)).unwrap();
        let sq = &a * &a;
        let expect = parse_series("w1^2 + 2*w1*z1 + z1^2", &sp, Order::Truncated(2)).unwrap();
        assert_eq!(sq, expect);
        // one more factor falls entirely above the order
        assert!((&sq * &a).is_zero());
    }

    #[test]
    fn mismatched_spaces_rejected() {
        let a = p("w1");
        let b = Series::var(&VarSpace::manifold(2, 1), 0, Order::Exact);
        assert_eq!(a.try_add(&b), Err(AlgebraError::VarSpaceMismatch));
    }

    #[test]
    fn power_rule_and_constants() {
        let sp = m11();
        let f = p("w1^2*zeta1^2");
        assert_eq!(f.diff_named("w1").unwrap(), p("2*w1*zeta1^2"));
        assert!(p("7 + 3*i").diff(0).unwrap().is_zero());
        assert!(matches!(
            f.diff_named("q"),
            Err(AlgebraError::UnknownVariable(_))
        ));
        let t = parse_series("w1^3", &sp, Order::Truncated(5)).unwrap();
        assert_eq!(t.diff(0).unwrap().order(), Order::Truncated(4));
    }

    #[test]
    fn heisenberg_cr_field_coefficient() {
        // d/dw of wζ is ζ, the z-coefficient (up to i) of the CR field
        assert_eq!(p("w1*zeta1").diff_named("w1").unwrap(), p("zeta1"));
    }

    #[test]
    fn sigma_on_symmetric_monomials() {
        assert_eq!(p("i*w1*zeta1").sigma_conjugate().unwrap(), p("-i*w1*zeta1"));
        let real = p("w1*zeta1 + w1^2*zeta1 + w1*zeta1^2");
        assert_eq!(real.sigma_conjugate().unwrap(), real);
        assert_eq!(p("(1+2*i)*w1*xi1^2").sigma_conjugate().unwrap(), p("(1-2*i)*zeta1*z1^2"));
    }

    #[test]
    fn sigma_requires_pairing() {
        let sp = VarSpace::coords(["x", "y"]).unwrap();
        let f = parse_series("x*y", &sp, Order::Exact).unwrap();
        assert!(matches!(f.sigma_conjugate(), Err(AlgebraError::UnpairedVariable(_))));
    }

    #[test]
    fn compose_heisenberg_qbar_at_origin() {
        // z -> xi + i w zeta, then zeta, xi -> 0
        let sp = m11();
        let f = p("z1");
        let ex = Order::Exact;
        let step1 = f
            .compose(&[
                Series::var(&sp, 0, ex),
                p("xi1 + i*w1*zeta1"),
                Series::var(&sp, 2, ex),
                Series::var(&sp, 3, ex),
            ])
            .unwrap();
        let zero = Series::zero(&sp, ex);
        let step2 = step1
            .compose(&[Series::var(&sp, 0, ex), Series::var(&sp, 1, ex), zero.clone(), zero])
            .unwrap();
        assert!(step2.is_zero());
    }

    #[test]
    fn compose_identity_is_noop() {
        let sp = m11();
        let f = p("3*w1^2*xi1 - i*zeta1 + 1/2");
        let id: Vec<_> = (0..4).map(|v| Series::var(&sp, v, Order::Exact)).collect();
        assert_eq!(f.compose(&id).unwrap(), f);
    }

    #[test]
    fn truncated_compose_rejects_constants() {
        let sp = m11();
        let f = parse_series("w1^2", &sp, Order::Truncated(4)).unwrap();
        let mut subs: Vec<_> = (0..4).map(|v| Series::var(&sp, v, Order::Exact)).collect();
        subs[0] = p("1 + w1");
        assert!(matches!(f.compose(&subs), Err(AlgebraError::TruncationUnsound(_))));
        // an exact polynomial accepts constants
        assert_eq!(p("w1^2").compose(&subs).unwrap(), p("1 + 2*w1 + w1^2"));
    }

    #[test]
    fn display_is_grlex_descending() {
        assert_eq!(p("w1 + 2*i*w1^2*zeta1 - zeta1").to_string(), "2*i*w1^2*zeta1 + w1 - zeta1");
        assert_eq!(p("(1+i)*w1 - 1/3").to_string(), "(1+i)*w1 - 1/3");
        assert_eq!(Series::zero(&m11(), Order::Exact).to_string(), "0");
    }

    #[test]
    fn eval_at_point() {
        let f = p("w1^2*zeta1 + i");
        let pt = [2.into(), 0.into(), 3.into(), 0.into()];
        assert_eq!(f.eval(&pt).unwrap(), GaussianRational::from_parts(12, 1, 1, 1));
    }
}
