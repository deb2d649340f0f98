//! Ordered variable spaces split into role-tagged blocks, with an optional
//! antiholomorphic pairing used by [`Series::sigma_conjugate`](super::Series::sigma_conjugate).

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::AlgebraError;

/// What a block of variables stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    /// Holomorphic CR-tangent coordinates `w`.
    W,
    /// Holomorphic transverse coordinates `z`.
    Z,
    /// Complexified conjugates `zeta` of `w`.
    Zeta,
    /// Complexified conjugates `xi` of `z`.
    Xi,
    /// `wbar` in a real graph `2y = h(w, wbar, x)`.
    WBar,
    /// Real parts `x` in a real graph.
    X,
    /// The `k`-th chain parameter block (1-based).
    Chain(usize),
    /// Basepoint parameters `(w_p, zeta_p, xi_p)` of a symbolic basepoint.
    BaseW,
    BaseZ,
    BaseZeta,
    BaseXi,
    /// Leaf variables of a parametrized Segre variety.
    Leaf,
    /// Ambient coordinates of a vector-field system.
    Coord,
    /// Flow times.
    Time,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub role: Role,
    pub start: usize,
    pub len: usize,
}

impl Block {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len
    }
}

/// An ordered list of uniquely named variables.
///
/// Every variable belongs to exactly one block. The optional pairing is an
/// involution on indices (a variable may be paired with itself, as real
/// parameters are).
#[derive(Clone, PartialEq, Eq)]
pub struct VarSpace {
    names: Vec<String>,
    blocks: Vec<Block>,
    block_of: Vec<usize>,
    partner: Vec<Option<usize>>,
    index: HashMap<String, usize>,
}

impl fmt::Debug for VarSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VarSpace{:?}", self.names)
    }
}

#[derive(Default)]
pub struct VarSpaceBuilder {
    names: Vec<String>,
    blocks: Vec<Block>,
    pairs: Vec<(usize, usize)>,
}

impl VarSpaceBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a block; returns its block index.
    pub fn block<S: Into<String>>(
        &mut self,
        role: Role,
        names: impl IntoIterator<Item = S>,
    ) -> usize {
        let start = self.names.len();
        self.names.extend(names.into_iter().map(Into::into));
        self.blocks.push(Block {
            role,
            start,
            len: self.names.len() - start,
        });
        self.blocks.len() - 1
    }

    /// Pairs block `a` with block `b` elementwise (`a == b` self-pairs).
    pub fn pair(&mut self, a: usize, b: usize) -> &mut Self {
        assert_eq!(self.blocks[a].len, self.blocks[b].len, "paired blocks differ in size");
        self.pairs.push((a, b));
        self
    }

    pub fn build(&self) -> Result<Arc<VarSpace>, AlgebraError> {
        let n = self.names.len();
        let mut index = HashMap::with_capacity(n);
        for (i, name) in self.names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(AlgebraError::DuplicateVariable(name.clone()));
            }
        }
        let mut block_of = vec![0; n];
        for (b, blk) in self.blocks.iter().enumerate() {
            for i in blk.range() {
                block_of[i] = b;
            }
        }
        let mut partner = vec![None; n];
        for &(a, b) in &self.pairs {
            let (ba, bb) = (&self.blocks[a], &self.blocks[b]);
            for j in 0..ba.len {
                partner[ba.start + j] = Some(bb.start + j);
                partner[bb.start + j] = Some(ba.start + j);
            }
        }
        Ok(Arc::new(VarSpace {
            names: self.names.clone(),
            blocks: self.blocks.clone(),
            block_of,
            partner,
            index,
        }))
    }
}

fn numbered(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|j| format!("{prefix}{j}")).collect()
}

impl VarSpace {
    /// `w1..wm, z1..zd, zeta1..zetam, xi1..xid` with `w <-> zeta`, `z <-> xi`.
    pub fn manifold(m: usize, d: usize) -> Arc<VarSpace> {
        let mut b = VarSpaceBuilder::new();
        let w = b.block(Role::W, numbered("w", m));
        let z = b.block(Role::Z, numbered("z", d));
        let zeta = b.block(Role::Zeta, numbered("zeta", m));
        let xi = b.block(Role::Xi, numbered("xi", d));
        b.pair(w, zeta).pair(z, xi);
        b.build().expect("manifold names are unique")
    }

    /// `w1..wm, wbar1..wbarm, x1..xd` for real graphs `2y = h(w, wbar, x)`.
    pub fn real_graph(m: usize, d: usize) -> Arc<VarSpace> {
        let mut b = VarSpaceBuilder::new();
        let w = b.block(Role::W, numbered("w", m));
        let wb = b.block(Role::WBar, numbered("wbar", m));
        let x = b.block(Role::X, numbered("x", d));
        b.pair(w, wb).pair(x, x);
        b.build().expect("real graph names are unique")
    }

    /// Chain parameters `u{i}_{j}` for `i = 1..=k`, `j = 1..=m`, each self-paired.
    ///
    /// With `base_dims = Some(d)` the symbolic basepoint parameters
    /// `pw*, pzeta*, pxi*` are appended; `pw <-> pzeta` are paired and `pxi` is
    /// left unpaired, since the conjugate of a symbolic basepoint is not of the
    /// same parametrized form.
    pub fn chain(m: usize, k: usize, base_dims: Option<usize>) -> Arc<VarSpace> {
        let mut b = VarSpaceBuilder::new();
        for i in 1..=k {
            let blk = b.block(
                Role::Chain(i),
                (1..=m).map(|j| format!("u{i}_{j}")).collect::<Vec<_>>(),
            );
            b.pair(blk, blk);
        }
        if let Some(d) = base_dims {
            let pw = b.block(Role::BaseW, numbered("pw", m));
            let pz = b.block(Role::BaseZeta, numbered("pzeta", m));
            b.block(Role::BaseXi, numbered("pxi", d));
            b.pair(pw, pz);
        }
        b.build().expect("chain names are unique")
    }

    /// Leaf variables `s1..sm` (self-paired) followed by the point
    /// parameters `pw*, pz*, pzeta*, pxi*` with `pw <-> pzeta`, `pz <-> pxi`.
    pub fn leaf(m: usize, d: usize) -> Arc<VarSpace> {
        let mut b = VarSpaceBuilder::new();
        let s = b.block(Role::Leaf, numbered("s", m));
        let pw = b.block(Role::BaseW, numbered("pw", m));
        let pz = b.block(Role::BaseZ, numbered("pz", d));
        let pzeta = b.block(Role::BaseZeta, numbered("pzeta", m));
        let pxi = b.block(Role::BaseXi, numbered("pxi", d));
        b.pair(s, s).pair(pw, pzeta).pair(pz, pxi);
        b.build().expect("leaf names are unique")
    }

    /// Unpaired coordinates with the given names.
    pub fn coords<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Arc<VarSpace>, AlgebraError> {
        let mut b = VarSpaceBuilder::new();
        b.block(Role::Coord, names);
        b.build()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn var(&self, name: &str) -> Result<usize, AlgebraError> {
        self.index_of(name)
            .ok_or_else(|| AlgebraError::UnknownVariable(name.to_string()))
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block_with_role(&self, role: Role) -> Option<&Block> {
        self.blocks.iter().find(|b| b.role == role)
    }

    /// Variable indices of the block with `role` (empty if absent).
    pub fn indices_of(&self, role: Role) -> Vec<usize> {
        self.block_with_role(role)
            .map(|b| b.range().collect())
            .unwrap_or_default()
    }

    pub fn role_of(&self, var: usize) -> Role {
        self.blocks[self.block_of[var]].role
    }

    pub fn partner(&self, var: usize) -> Option<usize> {
        self.partner[var]
    }

    pub fn fully_paired(&self) -> bool {
        self.partner.iter().all(Option::is_some)
    }

    /// Structural identity, with a pointer fast path.
    pub fn same(a: &Arc<VarSpace>, b: &Arc<VarSpace>) -> bool {
        Arc::ptr_eq(a, b) || **a == **b
    }
}
