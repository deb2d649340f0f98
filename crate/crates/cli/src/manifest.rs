//! Line-oriented `key = value` manifests for manifolds and vector-field systems.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use segre_core::algebra::{parse_series, AlgebraError, Order, Series, VarSpace, VectorField};
use segre_core::manifold::CRManifold;
use segre_core::orbit::VFSystem;

/// A manifest problem tied to a 1-based line (0 when no line applies).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestError {
    pub line: usize,
    pub msg: String,
}

impl fmt::Display for ManifestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.msg)
        } else {
            write!(f, "line {}: {}", self.line, self.msg)
        }
    }
}

fn err(line: usize, msg: impl Into<String>) -> ManifestError {
    ManifestError { line, msg: msg.into() }
}

/// How the defining functions are written.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    /// `theta_bar_j` in `(w, zeta, xi)`.
    Complex,
    /// `h_j` with `2y_j = h_j(w, wbar, x)`.
    Real,
}

/// A value together with the line it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifoldManifest {
    pub name: Option<String>,
    pub m: usize,
    pub d: usize,
    pub order: Option<Order>,
    pub form: Form,
    pub exprs: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemManifest {
    pub name: Option<String>,
    pub n: usize,
    pub m: usize,
    pub a: usize,
    pub coords: Vec<String>,
    /// `(alpha, i, coordinate) -> expression`, 1-based `alpha` and `i`.
    pub entries: BTreeMap<(usize, usize, String), Entry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Manifest {
    Manifold(ManifoldManifest),
    System(SystemManifest),
}

/// Parses `EXACT` or a nonnegative truncation order.
pub fn parse_order(s: &str) -> Option<Order> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("exact") {
        Some(Order::Exact)
    } else {
        s.parse().ok().map(Order::Truncated)
    }
}

fn order_str(o: Order) -> String {
    match o {
        Order::Exact => "EXACT".into(),
        Order::Truncated(n) => n.to_string(),
    }
}

fn parse_count(key: &str, e: &Entry) -> Result<usize, ManifestError> {
    e.value
        .parse()
        .map_err(|_| err(e.line, format!("`{key}` must be a nonnegative integer, got `{}`", e.value)))
}

fn indexed(key: &str, prefix: &str) -> Option<usize> {
    key.strip_prefix(prefix)?.parse().ok()
}

impl Manifest {
    pub fn parse(src: &str) -> Result<Manifest, ManifestError> {
        let mut kv: BTreeMap<String, Entry> = BTreeMap::new();
        for (i, raw) in src.lines().enumerate() {
            let line = i + 1;
            let text = raw.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let (k, v) = text
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected `key = value`, got `{text}`")))?;
            let key = k.trim().to_ascii_lowercase();
            let value = v.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(err(line, "empty key or value"));
            }
            if let Some(prev) = kv.insert(key.clone(), Entry { line, value }) {
                return Err(err(line, format!("`{key}` already set on line {}", prev.line)));
            }
        }
        let kind = match kv.remove("kind") {
            Some(e) if e.value == "manifold" => false,
            Some(e) if e.value == "system" => true,
            Some(e) => return Err(err(e.line, format!("unknown kind `{}`", e.value))),
            None => kv.contains_key("a"),
        };
        if kind {
            Self::system(kv).map(Manifest::System)
        } else {
            Self::manifold(kv).map(Manifest::Manifold)
        }
    }

    fn need(kv: &mut BTreeMap<String, Entry>, key: &str) -> Result<Entry, ManifestError> {
        kv.remove(key).ok_or_else(|| err(0, format!("missing `{key}`")))
    }

    fn manifold(mut kv: BTreeMap<String, Entry>) -> Result<ManifoldManifest, ManifestError> {
        let name = kv.remove("name").map(|e| e.value);
        let m = parse_count("m", &Self::need(&mut kv, "m")?)?;
        let d = parse_count("d", &Self::need(&mut kv, "d")?)?;
        if m == 0 || d == 0 {
            return Err(err(0, "`m` and `d` must be positive"));
        }
        let order = match kv.remove("order") {
            Some(e) => Some(parse_order(&e.value).ok_or_else(|| err(e.line, format!("bad order `{}`", e.value)))?),
            None => None,
        };
        let mut complex = BTreeMap::new();
        let mut real = BTreeMap::new();
        for (k, e) in kv {
            if let Some(j) = indexed(&k, "theta_bar_") {
                complex.insert(j, e);
            } else if let Some(j) = indexed(&k, "h_") {
                real.insert(j, e);
            } else {
                return Err(err(e.line, format!("unknown key `{k}`")));
            }
        }
        let (form, map) = match (complex.is_empty(), real.is_empty()) {
            (false, true) => (Form::Complex, complex),
            (true, false) => (Form::Real, real),
            (true, true) => return Err(err(0, "no defining functions (`theta_bar_j` or `h_j`)")),
            (false, false) => return Err(err(0, "mixes `theta_bar_j` and `h_j` entries")),
        };
        let mut exprs = Vec::with_capacity(d);
        for j in 1..=d {
            exprs.push(map.get(&j).cloned().ok_or_else(|| err(0, format!("missing defining function {j}")))?);
        }
        if let Some((j, e)) = map.iter().find(|(j, _)| **j == 0 || **j > d) {
            return Err(err(e.line, format!("index {j} out of range 1..={d}")));
        }
        Ok(ManifoldManifest {
            name,
            m,
            d,
            order,
            form,
            exprs,
        })
    }

    fn system(mut kv: BTreeMap<String, Entry>) -> Result<SystemManifest, ManifestError> {
        let name = kv.remove("name").map(|e| e.value);
        let n = parse_count("n", &Self::need(&mut kv, "n")?)?;
        let m = parse_count("m", &Self::need(&mut kv, "m")?)?;
        let a = parse_count("a", &Self::need(&mut kv, "a")?)?;
        if n == 0 || m == 0 || a == 0 {
            return Err(err(0, "`n`, `m` and `a` must be positive"));
        }
        let coords: Vec<String> = match kv.remove("coords") {
            Some(e) => {
                let c: Vec<String> = e.value.split(',').map(|s| s.trim().to_string()).collect();
                if c.len() != n || c.iter().any(String::is_empty) {
                    return Err(err(e.line, format!("`coords` must list {n} names")));
                }
                c
            }
            None => (1..=n).map(|j| format!("x{j}")).collect(),
        };
        let mut entries = BTreeMap::new();
        for (k, e) in kv {
            let bad = || err(e.line, format!("unknown key `{k}`"));
            let rest = k.strip_prefix("field_").ok_or_else(bad)?;
            let mut parts = rest.splitn(3, '_');
            let alpha: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let i: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let var = parts.next().ok_or_else(bad)?.to_string();
            if alpha == 0 || alpha > a || i == 0 || i > m {
                return Err(err(e.line, format!("field index ({alpha}, {i}) out of range")));
            }
            if !coords.contains(&var) {
                return Err(err(e.line, format!("unknown coordinate `{var}`")));
            }
            entries.insert((alpha, i, var), e);
        }
        Ok(SystemManifest {
            name,
            n,
            m,
            a,
            coords,
            entries,
        })
    }

    /// Canonical text; parsing it again gives back an equal manifest up to
    /// line numbers.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        match self {
            Manifest::Manifold(mm) => {
                if let Some(n) = &mm.name {
                    out += &format!("name = {n}\n");
                }
                out += &format!("m = {}\nd = {}\n", mm.m, mm.d);
                if let Some(o) = mm.order {
                    out += &format!("order = {}\n", order_str(o));
                }
                let key = match mm.form {
                    Form::Complex => "theta_bar_",
                    Form::Real => "h_",
                };
                for (j, e) in mm.exprs.iter().enumerate() {
                    out += &format!("{key}{} = {}\n", j + 1, e.value);
                }
            }
            Manifest::System(sm) => {
                out += "kind = system\n";
                if let Some(n) = &sm.name {
                    out += &format!("name = {n}\n");
                }
                out += &format!("n = {}\nm = {}\na = {}\ncoords = {}\n", sm.n, sm.m, sm.a, sm.coords.join(","));
                for ((alpha, i, v), e) in &sm.entries {
                    out += &format!("field_{alpha}_{i}_{v} = {}\n", e.value);
                }
            }
        }
        out
    }

    /// Same content, ignoring source lines.
    pub fn same_content(&self, other: &Manifest) -> bool {
        self.serialize() == other.serialize()
    }

    pub fn name(&self) -> Option<&str> {
        match self {
            Manifest::Manifold(m) => m.name.as_deref(),
            Manifest::System(s) => s.name.as_deref(),
        }
    }
}

/// Failure to turn a manifest into a model: either a located expression
/// error or a module error.
#[derive(Debug)]
pub enum BuildError {
    Manifest(ManifestError),
    Module(segre_core::Error),
}

impl From<segre_core::Error> for BuildError {
    fn from(e: segre_core::Error) -> Self {
        BuildError::Module(e)
    }
}

fn parse_at(e: &Entry, space: &Arc<VarSpace>, order: Order) -> Result<Series, BuildError> {
    parse_series(&e.value, space, order).map_err(|x| match x {
        AlgebraError::Parse { col, msg } => BuildError::Manifest(err(e.line, format!("column {col}: {msg}"))),
        AlgebraError::UnknownVariable(v) => BuildError::Manifest(err(e.line, format!("unknown variable `{v}`"))),
        other => BuildError::Module(other.into()),
    })
}

/// Default truncation order when an exact real-graph solve does not terminate.
pub const FALLBACK_ORDER: u32 = 10;

impl ManifoldManifest {
    /// Builds the manifold; `order` overrides the manifest's own order.
    pub fn build(&self, order: Option<Order>) -> Result<CRManifold, BuildError> {
        let requested = order.or(self.order);
        let ord = requested.unwrap_or(Order::Exact);
        match self.form {
            Form::Complex => {
                let space = VarSpace::manifold(self.m, self.d);
                let tb = self.exprs.iter().map(|e| parse_at(e, &space, ord)).collect::<Result<Vec<_>, _>>()?;
                Ok(CRManifold::new(self.m, self.d, tb, ord)?)
            }
            Form::Real => {
                let space = VarSpace::real_graph(self.m, self.d);
                let h = self.exprs.iter().map(|e| parse_at(e, &space, ord)).collect::<Result<Vec<_>, _>>()?;
                match CRManifold::graph_from_real(self.m, self.d, h.clone(), ord) {
                    Err(segre_core::Error::InvalidArgument(_)) if requested.is_none() => {
                        let o = Order::Truncated(FALLBACK_ORDER);
                        let h = h.iter().map(|s| s.with_order(o)).collect();
                        Ok(CRManifold::graph_from_real(self.m, self.d, h, o)?)
                    }
                    r => Ok(r?),
                }
            }
        }
    }
}

impl SystemManifest {
    pub fn build(&self) -> Result<VFSystem, BuildError> {
        let space = VarSpace::coords(self.coords.iter().cloned()).map_err(|e| BuildError::Manifest(err(0, e.to_string())))?;
        let all: Vec<usize> = (0..self.n).collect();
        let mut fields = Vec::with_capacity(self.a);
        for alpha in 1..=self.a {
            let mut tuple = Vec::with_capacity(self.m);
            for i in 1..=self.m {
                let mut coeffs = Vec::with_capacity(self.n);
                for v in &self.coords {
                    coeffs.push(match self.entries.get(&(alpha, i, v.clone())) {
                        Some(e) => parse_at(e, &space, Order::Exact)?,
                        None => Series::zero(&space, Order::Exact),
                    });
                }
                tuple.push(VectorField::new(&space, all.clone(), coeffs).map_err(segre_core::Error::from)?);
            }
            fields.push(tuple);
        }
        Ok(VFSystem::new(&space, fields)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifold_roundtrip() {
        let src = "# quartic\nm=1\nd = 1\ntheta_bar_1 = w1^2*zeta1^2\n";
        let m = Manifest::parse(src).unwrap();
        let again = Manifest::parse(&m.serialize()).unwrap();
        assert!(m.same_content(&again));
        let Manifest::Manifold(mm) = m else { panic!() };
        assert_eq!(mm.exprs[0].line, 4);
        assert!(mm.build(None).is_ok());
    }

    #[test]
    fn system_keys() {
        let src = "n=3\nm=1\na=2\ncoords=x,y,z\nfield_1_1_x=1\nfield_2_1_y=1\nfield_2_1_z=x\n";
        let Manifest::System(s) = Manifest::parse(src).unwrap() else { panic!() };
        assert_eq!(s.entries.len(), 3);
        assert_eq!(s.build().unwrap().a(), 2);
    }

    #[test]
    fn located_errors() {
        let e = Manifest::parse("m=1\nd=1\nd=2\n").unwrap_err();
        assert_eq!(e.line, 3);
        let Manifest::Manifold(mm) = Manifest::parse("m=1\nd=1\ntheta_bar_1 = w1*(zeta1\n").unwrap() else { panic!() };
        match mm.build(None) {
            Err(BuildError::Manifest(e)) => assert_eq!(e.line, 3),
            other => panic!("{other:?}"),
        }
        let Manifest::Manifold(mm) = Manifest::parse("m=1\nd=1\ntheta_bar_1 = exp(w1)\n").unwrap() else { panic!() };
        assert!(matches!(mm.build(None), Err(BuildError::Manifest(_))));
    }
}
