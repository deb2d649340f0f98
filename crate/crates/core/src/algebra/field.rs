use std::fmt;
use std::sync::Arc;

use super::{AlgebraError, GaussianRational, Monomial, Order, Series, VarSpace};

/// A first-order differential operator `sum_i a_i d/dx_{c_i}` whose
/// coefficients are series over `space` and whose directions `c_i` are a
/// subset of that space's variables.
#[derive(Clone, PartialEq)]
pub struct VectorField {
    space: Arc<VarSpace>,
    coords: Vec<usize>,
    coeffs: Vec<Series>,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (c, a) in self.coords.iter().zip(&self.coeffs) {
            if !a.is_zero() {
                parts.push(format!("({a})*d/d{}", self.space.name(*c)));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl VectorField {
    pub fn new(space: &Arc<VarSpace>, coords: Vec<usize>, coeffs: Vec<Series>) -> Result<Self, AlgebraError> {
        if coords.len() != coeffs.len() {
            return Err(AlgebraError::DimensionMismatch {
                expected: coords.len(),
                found: coeffs.len(),
            });
        }
        for c in &coeffs {
            if !VarSpace::same(c.space(), space) {
                return Err(AlgebraError::VarSpaceMismatch);
            }
        }
        for &c in &coords {
            if c >= space.len() {
                return Err(AlgebraError::UnknownVariable(format!("#{c}")));
            }
        }
        Ok(VectorField {
            space: space.clone(),
            coords,
            coeffs,
        })
    }

    pub fn zero(space: &Arc<VarSpace>, coords: Vec<usize>, order: Order) -> Self {
        let coeffs = coords.iter().map(|_| Series::zero(space, order)).collect();
        VectorField {
            space: space.clone(),
            coords,
            coeffs,
        }
    }

    /// `d/dx_{coords[j]}`.
    pub fn coordinate(space: &Arc<VarSpace>, coords: Vec<usize>, j: usize, order: Order) -> Self {
        let mut f = Self::zero(space, coords, order);
        f.coeffs[j] = Series::one(space, order);
        f
    }

    pub fn space(&self) -> &Arc<VarSpace> {
        &self.space
    }

    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    pub fn coeffs(&self) -> &[Series] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> &Series {
        &self.coeffs[j]
    }

    pub fn set_coeff(&mut self, j: usize, s: Series) {
        assert!(VarSpace::same(s.space(), &self.space));
        self.coeffs[j] = s;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Series::is_zero)
    }

    pub fn order(&self) -> Order {
        self.coeffs.iter().fold(Order::Exact, |o, c| o.min(c.order()))
    }

    fn check(&self, other: &VectorField) -> Result<(), AlgebraError> {
        if !VarSpace::same(&self.space, &other.space) {
            return Err(AlgebraError::VarSpaceMismatch);
        }
        if self.coords != other.coords {
            return Err(AlgebraError::ChartMismatch);
        }
        Ok(())
    }

    /// `X(f)`.
    pub fn apply(&self, f: &Series) -> Result<Series, AlgebraError> {
        if !VarSpace::same(f.space(), &self.space) {
            return Err(AlgebraError::VarSpaceMismatch);
        }
        let mut acc = Series::zero(&self.space, self.order().min(f.order().lowered()));
        for (c, a) in self.coords.iter().zip(&self.coeffs) {
            if a.is_zero() || !f.depends_on(*c) {
                continue;
            }
            acc = &acc + &(a * &f.diff(*c)?);
        }
        Ok(acc)
    }

    /// `[X, Y]`, componentwise `X(Y_i) - Y(X_i)`.
    pub fn bracket(&self, other: &VectorField) -> Result<VectorField, AlgebraError> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(xi, yi)| Ok(&self.apply(yi)? - &other.apply(xi)?))
            .collect::<Result<Vec<_>, AlgebraError>>()?;
        Ok(VectorField {
            space: self.space.clone(),
            coords: self.coords.clone(),
            coeffs,
        })
    }

    pub fn try_add(&self, other: &VectorField) -> Result<VectorField, AlgebraError> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(VectorField {
            space: self.space.clone(),
            coords: self.coords.clone(),
            coeffs,
        })
    }

    pub fn scale(&self, c: &GaussianRational) -> VectorField {
        VectorField {
            space: self.space.clone(),
            coords: self.coords.clone(),
            coeffs: self.coeffs.iter().map(|a| a.scale(c)).collect(),
        }
    }

    /// Coefficient vector at a point of `space`.
    pub fn eval(&self, point: &[GaussianRational]) -> Result<Vec<GaussianRational>, AlgebraError> {
        self.coeffs.iter().map(|a| a.eval(point)).collect()
    }

    /// Flattened `(direction, monomial) -> coefficient` entries, used for
    /// linear independence tests over `Q(i)`.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, Monomial), GaussianRational)> + '_ {
        self.coeffs.iter().enumerate().flat_map(|(j, a)| {
            a.terms().iter().map(move |(e, c)| ((j, e.clone()), c.clone()))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_series;

    fn chart() -> (Arc<VarSpace>, Vec<usize>) {
        let sp = VarSpace::coords(["w", "zeta", "xi"]).unwrap();
        (sp, vec![0, 1, 2])
    }

    #[test]
    fn constant_fields_commute() {
        let (sp, c) = chart();
        let a = VectorField::coordinate(&sp, c.clone(), 0, Order::Exact);
        let b = VectorField::coordinate(&sp, c, 1, Order::Exact);
        assert!(a.bracket(&b).unwrap().is_zero());
    }

    #[test]
    fn heisenberg_pair_bracket() {
        let (sp, c) = chart();
        let l = VectorField::coordinate(&sp, c.clone(), 0, Order::Exact);
        let mut lb = VectorField::coordinate(&sp, c, 1, Order::Exact);
        lb.set_coeff(2, parse_series("-i*w", &sp, Order::Exact).unwrap());
        let br = l.bracket(&lb).unwrap();
        assert!(br.coeff(0).is_zero() && br.coeff(1).is_zero());
        assert_eq!(br.coeff(2), &parse_series("-i", &sp, Order::Exact).unwrap());
    }

    #[test]
    fn chart_mismatch_detected() {
        let (sp, _) = chart();
        let a = VectorField::coordinate(&sp, vec![0, 1], 0, Order::Exact);
        let b = VectorField::coordinate(&sp, vec![0, 2], 0, Order::Exact);
        assert_eq!(a.bracket(&b), Err(AlgebraError::ChartMismatch));
    }
}
