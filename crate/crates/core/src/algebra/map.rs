use std::fmt;
use std::sync::Arc;

use super::{AlgebraError, GaussianRational, Order, Series, VarSpace};

/// An ordered tuple of series over a common domain, one per codomain
/// coordinate.
#[derive(Clone, PartialEq)]
pub struct SeriesMap {
    domain: Arc<VarSpace>,
    codomain: Arc<VarSpace>,
    components: Vec<Series>,
}

impl fmt::Debug for SeriesMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(
                self.codomain
                    .names()
                    .iter()
                    .zip(self.components.iter().map(|c| c.to_string())),
            )
            .finish()
    }
}

impl SeriesMap {
    /// Components are brought to their common (minimal) order.
    pub fn new(
        domain: &Arc<VarSpace>,
        codomain: &Arc<VarSpace>,
        components: Vec<Series>,
    ) -> Result<Self, AlgebraError> {
        if components.len() != codomain.len() {
            return Err(AlgebraError::DimensionMismatch {
                expected: codomain.len(),
                found: components.len(),
            });
        }
        let mut order = Order::Exact;
        for c in &components {
            if !VarSpace::same(c.space(), domain) {
                return Err(AlgebraError::VarSpaceMismatch);
            }
            order = order.min(c.order());
        }
        let components = components
            .into_iter()
            .map(|c| if c.order() == order { c } else { c.with_order(order) })
            .collect();
        Ok(SeriesMap {
            domain: domain.clone(),
            codomain: codomain.clone(),
            components,
        })
    }

    /// The identity map of a space.
    pub fn identity(space: &Arc<VarSpace>, order: Order) -> Self {
        let comps = (0..space.len()).map(|v| Series::var(space, v, order)).collect();
        SeriesMap {
            domain: space.clone(),
            codomain: space.clone(),
            components: comps,
        }
    }

    pub fn domain(&self) -> &Arc<VarSpace> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<VarSpace> {
        &self.codomain
    }

    pub fn components(&self) -> &[Series] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Series {
        &self.components[i]
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn order(&self) -> Order {
        self.components
            .iter()
            .fold(Order::Exact, |o, c| o.min(c.order()))
    }

    /// Keeps the listed components, relabelled by `codomain`.
    pub fn project(&self, idx: &[usize], codomain: &Arc<VarSpace>) -> Result<SeriesMap, AlgebraError> {
        let comps = idx.iter().map(|&i| self.components[i].clone()).collect();
        SeriesMap::new(&self.domain, codomain, comps)
    }

    /// `f ∘ self` for a series `f` over this map's codomain.
    pub fn pull_back(&self, f: &Series) -> Result<Series, AlgebraError> {
        if !VarSpace::same(f.space(), &self.codomain) {
            return Err(AlgebraError::VarSpaceMismatch);
        }
        f.compose(&self.components)
    }

    /// `outer ∘ self`.
    pub fn then(&self, outer: &SeriesMap) -> Result<SeriesMap, AlgebraError> {
        let comps = outer
            .components
            .iter()
            .map(|c| self.pull_back(c))
            .collect::<Result<Vec<_>, _>>()?;
        SeriesMap::new(&self.domain, &outer.codomain, comps)
    }

    pub fn evaluate(&self, point: &[GaussianRational]) -> Result<Vec<GaussianRational>, AlgebraError> {
        self.components.iter().map(|c| c.eval(point)).collect()
    }

    /// Partial derivatives of every component with respect to `wrt`
    /// (domain variable indices); row `i`, column `j` is `d f_i / d v_j`.
    pub fn jacobian(&self, wrt: &[usize]) -> Result<Vec<Vec<Series>>, AlgebraError> {
        self.components
            .iter()
            .map(|c| wrt.iter().map(|&v| c.diff(v)).collect())
            .collect()
    }

    /// Same as [`jacobian`](Self::jacobian) with variables given by name.
    pub fn jacobian_named(&self, wrt: &[&str]) -> Result<Vec<Vec<Series>>, AlgebraError> {
        let idx = wrt
            .iter()
            .map(|n| self.domain.var(n))
            .collect::<Result<Vec<_>, _>>()?;
        self.jacobian(&idx)
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Series::is_zero)
    }

    /// Componentwise difference (same domain and codomain size).
    pub fn difference(&self, other: &SeriesMap) -> Result<SeriesMap, AlgebraError> {
        if self.len() != other.len() {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.try_sub(b))
            .collect::<Result<Vec<_>, _>>()?;
        SeriesMap::new(&self.domain, &self.codomain, comps)
    }

    pub fn map_components(
        &self,
        f: impl Fn(&Series) -> Result<Series, AlgebraError>,
    ) -> Result<SeriesMap, AlgebraError> {
        let comps = self.components.iter().map(f).collect::<Result<Vec<_>, _>>()?;
        let domain = comps
            .first()
            .map(|c: &Series| c.space().clone())
            .unwrap_or_else(|| self.domain.clone());
        SeriesMap::new(&domain, &self.codomain, comps)
    }
}
