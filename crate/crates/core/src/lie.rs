//! Exact matrix models of the rank-one simple Lie algebras so(n,1), su(n,1)
//! and sp(n,1).
//!
//! Every model is realified to real matrices preserving the form
//! `J = diag(1, …, 1, -1)` (each entry a 1×1, 2×2 or 4×4 block), so all
//! structure constants are rational. The basis is ordered
//! `m₀ ⊕ a₀ ⊕ n₀⁺ ⊕ n₀⁻` and `n₀⁻` is the image of `n₀⁺` under the Cartan
//! involution `θ(X) = -Xᵀ`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::linalg::{CoordinateSolver, RationalMatrix};
use crate::rational::{int, Rational, RationalRepr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "family", content = "n", rename_all = "kebab-case")]
pub enum Family {
    /// `H^n`, isometry algebra so(n,1).
    RealHyperbolic(u32),
    /// `CH^n`, su(n,1), real dimension 2n.
    ComplexHyperbolic(u32),
    /// `HH^n`, sp(n,1), real dimension 4n.
    QuaternionicHyperbolic(u32),
    /// The Cayley plane, real dimension 16.
    OctonionicHyperbolic,
}

impl Family {
    /// Real dimension `d` of the symmetric space.
    pub fn dim(&self) -> u32 {
        match *self {
            Family::RealHyperbolic(n) => n,
            Family::ComplexHyperbolic(n) => 2 * n,
            Family::QuaternionicHyperbolic(n) => 4 * n,
            Family::OctonionicHyperbolic => 16,
        }
    }

    /// Restricted root multiplicities `(m_α, m_2α)`.
    pub fn root_multiplicities(&self) -> (u32, u32) {
        match *self {
            Family::RealHyperbolic(n) => (n.saturating_sub(1), 0),
            Family::ComplexHyperbolic(n) => (2 * n - 2, 1),
            Family::QuaternionicHyperbolic(n) => (4 * n - 4, 3),
            Family::OctonionicHyperbolic => (8, 7),
        }
    }

    pub fn is_even_dimensional(&self) -> bool {
        self.dim().is_multiple_of(2)
    }

    fn parameter(&self) -> Option<u32> {
        match *self {
            Family::RealHyperbolic(n)
            | Family::ComplexHyperbolic(n)
            | Family::QuaternionicHyperbolic(n) => Some(n),
            Family::OctonionicHyperbolic => None,
        }
    }

    /// Checks the family parameter range.
    pub fn validate(&self) -> Result<(), LieError> {
        match *self {
            Family::RealHyperbolic(n) if n < 2 => Err(LieError::InvalidParameter(format!(
                "real hyperbolic family needs n >= 2, got {n}"
            ))),
            Family::ComplexHyperbolic(0) | Family::QuaternionicHyperbolic(0) => Err(
                LieError::InvalidParameter("family parameter n must be at least 1".into()),
            ),
            _ => Ok(()),
        }
    }

    pub fn slug(&self) -> &'static str {
        match self {
            Family::RealHyperbolic(_) => "real-hyperbolic",
            Family::ComplexHyperbolic(_) => "complex-hyperbolic",
            Family::QuaternionicHyperbolic(_) => "quaternionic-hyperbolic",
            Family::OctonionicHyperbolic => "octonionic-hyperbolic",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.parameter() {
            Some(n) => write!(f, "{}({n})", self.slug()),
            None => write!(f, "{}", self.slug()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Root {
    Alpha,
    TwoAlpha,
}

impl Root {
    /// `α(H0)` or `2α(H0)`.
    pub fn value(self) -> i64 {
        match self {
            Root::Alpha => 1,
            Root::TwoAlpha => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BasisLabel {
    M0(usize),
    A0,
    NPlus { root: Root, index: usize },
    NMinus { root: Root, index: usize },
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let root = |r: &Root| match r {
            Root::Alpha => "alpha",
            Root::TwoAlpha => "2alpha",
        };
        match self {
            BasisLabel::M0(i) => write!(f, "M0[{i}]"),
            BasisLabel::A0 => write!(f, "A0"),
            BasisLabel::NPlus { root: r, index } => write!(f, "N+[{},{index}]", root(r)),
            BasisLabel::NMinus { root: r, index } => write!(f, "N-[{},{index}]", root(r)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    Dimension,
    Antisymmetry,
    Jacobi,
    RootGrading,
    MaInvariance,
    RootAddition,
    Centralizer,
    KillingSign,
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Identity::Dimension => "dimension",
            Identity::Antisymmetry => "antisymmetry",
            Identity::Jacobi => "Jacobi",
            Identity::RootGrading => "root grading",
            Identity::MaInvariance => "[m0+a0, n] in n",
            Identity::RootAddition => "[g_alpha, g_alpha] in g_2alpha",
            Identity::Centralizer => "m0 centralizes a0",
            Identity::KillingSign => "trace form signs",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LieError {
    #[error("unsupported family {0}: no rational matrix model")]
    UnsupportedFamily(String),
    #[error("invalid family parameter: {0}")]
    InvalidParameter(String),
    #[error("ad(H0) eigenspaces disagree with the root table: {0}")]
    DegenerateRank(String),
    #[error("structure violation ({identity}): {detail}")]
    StructureViolation { identity: Identity, detail: String },
}

/// Coefficient vector over the model basis.
pub type CoeffVector = Vec<Rational>;

/// Sparse coefficient vector, sorted by index.
pub type SparseVector = Vec<(usize, Rational)>;

#[derive(Debug, Clone)]
pub struct BasisElement {
    pub label: BasisLabel,
    pub matrix: RationalMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSplit {
    pub ma_part: CoeffVector,
    pub nplus_part: CoeffVector,
    pub nminus_part: CoeffVector,
}

impl ComponentSplit {
    pub fn reconstruct(&self) -> CoeffVector {
        self.ma_part
            .iter()
            .zip(&self.nplus_part)
            .zip(&self.nminus_part)
            .map(|((a, b), c)| a + b + c)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct LieAlgebraModel {
    family: Family,
    ambient_size: usize,
    basis: Vec<BasisElement>,
    structure: Vec<Vec<SparseVector>>,
    m_dim: usize,
    n_dim: usize,
    roots: Vec<Root>,
}

/// Left multiplication by the units of ℝ, ℂ or ℍ as real matrices.
fn units(t: usize) -> Vec<RationalMatrix> {
    let from = |rows: &[&[i64]]| {
        RationalMatrix::from_fn(rows.len(), rows.len(), |r, c| int(rows[r][c]))
    };
    match t {
        1 => vec![RationalMatrix::identity(1)],
        2 => vec![RationalMatrix::identity(2), from(&[&[0, -1], &[1, 0]])],
        4 => vec![
            RationalMatrix::identity(4),
            from(&[&[0, -1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]]),
            from(&[&[0, 0, -1, 0], &[0, 0, 0, 1], &[1, 0, 0, 0], &[0, -1, 0, 0]]),
            from(&[&[0, 0, 0, -1], &[0, 0, -1, 0], &[0, 1, 0, 0], &[1, 0, 0, 0]]),
        ],
        _ => unreachable!("division algebra of dimension {t}"),
    }
}

fn block(size: usize, t: usize, i: usize, j: usize, b: &RationalMatrix) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(size, size);
    for r in 0..t {
        for c in 0..t {
            m[(t * i + r, t * j + c)] = b[(r, c)].clone();
        }
    }
    m
}

/// Spanning set `{J·A : A anti-hermitian}` of u(n,1;F), with the trace
/// condition imposed for su(n,1), plus the a₀ generator.
fn generators(family: Family) -> (Vec<RationalMatrix>, RationalMatrix, usize) {
    let (t, n) = match family {
        Family::RealHyperbolic(n) => (1, n as usize),
        Family::ComplexHyperbolic(n) => (2, n as usize),
        Family::QuaternionicHyperbolic(n) => (4, n as usize),
        Family::OctonionicHyperbolic => unreachable!("rejected before construction"),
    };
    let size = t * (n + 1);
    let u = units(t);
    let mut gens = Vec::new();
    for i in 0..=n {
        for j in i + 1..=n {
            for unit in &u {
                gens.push(&block(size, t, i, j, unit) - &block(size, t, j, i, &unit.transpose()));
            }
        }
    }
    match t {
        2 => {
            // trace(J·A) = 0 with A = i(E_kk + E_nn)
            for k in 0..n {
                gens.push(&block(size, t, k, k, &u[1]) + &block(size, t, n, n, &u[1]));
            }
        }
        4 => {
            for k in 0..=n {
                for unit in &u[1..] {
                    gens.push(block(size, t, k, k, unit));
                }
            }
        }
        _ => {}
    }
    let mut j = RationalMatrix::identity(size);
    for r in t * n..size {
        j[(r, r)] = int(-1);
    }
    let gens = gens.iter().map(|a| &j * a).collect();
    let id = RationalMatrix::identity(t);
    let h0 = &block(size, t, 0, n, &id) + &block(size, t, n, 0, &id);
    (gens, h0, size)
}

fn theta(x: &RationalMatrix) -> RationalMatrix {
    -&x.transpose()
}

/// Positive definite pairing `tr(X Yᵀ)`.
fn theta_pairing(x: &RationalMatrix, y: &RationalMatrix) -> Rational {
    x.entries()
        .iter()
        .zip(y.entries())
        .filter(|(a, b)| !a.is_zero() && !b.is_zero())
        .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
}

fn gram_schmidt(vectors: Vec<RationalMatrix>) -> Vec<RationalMatrix> {
    let mut out: Vec<RationalMatrix> = Vec::with_capacity(vectors.len());
    for mut v in vectors {
        for b in &out {
            let c = theta_pairing(&v, b) / theta_pairing(b, b);
            if !c.is_zero() {
                v = &v - &b.scale(&c);
            }
        }
        if !v.is_zero() {
            out.push(v);
        }
    }
    out
}

fn combine(gens: &[RationalMatrix], coeffs: &[Rational], size: usize) -> RationalMatrix {
    let mut out = RationalMatrix::zeros(size, size);
    for (g, c) in gens.iter().zip(coeffs) {
        if !c.is_zero() {
            out = &out + &g.scale(c);
        }
    }
    out
}

/// Clears denominators and common factors so eigenvectors have small integer entries.
fn primitive(m: RationalMatrix) -> RationalMatrix {
    use num_integer::Integer;
    let mut lcm = num_bigint::BigInt::one();
    for x in m.entries() {
        lcm = lcm.lcm(x.denom());
    }
    let scaled = m.scale(&Rational::from_integer(lcm));
    let mut g = num_bigint::BigInt::zero();
    for x in scaled.entries() {
        g = g.gcd(x.numer());
    }
    if g.is_zero() {
        return scaled;
    }
    scaled.scale(&Rational::new(num_bigint::BigInt::one(), g))
}

fn structure_table(basis: &[BasisElement]) -> Result<Vec<Vec<SparseVector>>, LieError> {
    let dim = basis.len();
    let matrices: Vec<RationalMatrix> = basis.iter().map(|b| b.matrix.clone()).collect();
    let full = CoordinateSolver::new(&matrices)
        .ok_or_else(|| LieError::DegenerateRank("assembled basis is dependent".into()))?;
    let mut structure = vec![vec![SparseVector::new(); dim]; dim];
    for i in 0..dim {
        for j in i + 1..dim {
            let c = full.coordinates(&matrices[i].commutator(&matrices[j])).ok_or_else(|| {
                LieError::StructureViolation {
                    identity: Identity::Dimension,
                    detail: format!("[{}, {}] is outside the span", basis[i].label, basis[j].label),
                }
            })?;
            let sparse: SparseVector =
                c.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect();
            structure[j][i] = sparse.iter().map(|(k, v)| (*k, -v)).collect();
            structure[i][j] = sparse;
        }
    }
    Ok(structure)
}

pub fn build_model(family: Family) -> Result<LieAlgebraModel, LieError> {
    if family == Family::OctonionicHyperbolic {
        return Err(LieError::UnsupportedFamily(family.to_string()));
    }
    family.validate()?;
    let (gens, h0, size) = generators(family);
    let dim = gens.len();
    let solver = CoordinateSolver::new(&gens).ok_or_else(|| {
        LieError::DegenerateRank("generators are linearly dependent".into())
    })?;
    let mut ad_columns = Vec::with_capacity(dim);
    for g in &gens {
        let c = solver.coordinates(&h0.commutator(g)).ok_or_else(|| {
            LieError::DegenerateRank("[H0, X] left the algebra".into())
        })?;
        ad_columns.push(c);
    }
    let ad = RationalMatrix::from_columns(dim, &ad_columns);
    let eigenspace = |lambda: i64| -> Vec<RationalMatrix> {
        let shifted = &ad - &RationalMatrix::identity(dim).scale(&int(lambda));
        shifted
            .nullspace()
            .iter()
            .map(|v| primitive(combine(&gens, v, size)))
            .collect()
    };

    let (m_alpha, m_2alpha) = family.root_multiplicities();
    let spaces: Vec<(i64, Vec<RationalMatrix>)> =
        (-2..=2).map(|l| (l, eigenspace(l))).collect();
    let total: usize = spaces.iter().map(|(_, s)| s.len()).sum();
    if total != dim {
        return Err(LieError::DegenerateRank(format!(
            "ad(H0) eigenspaces for -2..2 span {total} of {dim} dimensions"
        )));
    }
    let count = |l: i64| spaces.iter().find(|(x, _)| *x == l).map_or(0, |(_, s)| s.len());
    for (l, expected) in [(1, m_alpha), (-1, m_alpha), (2, m_2alpha), (-2, m_2alpha)] {
        if count(l) != expected as usize {
            return Err(LieError::DegenerateRank(format!(
                "eigenvalue {l} has multiplicity {} but the {family} table says {expected}",
                count(l)
            )));
        }
    }

    let h0_norm = h0.trace_pairing(&h0);
    let kernel = spaces.iter().find(|(l, _)| *l == 0).map(|(_, s)| s.clone()).unwrap_or_default();
    let mut m_candidates = Vec::new();
    for z in kernel {
        let c = z.trace_pairing(&h0) / &h0_norm;
        let projected = &z - &h0.scale(&c);
        if !projected.is_zero() {
            m_candidates.push(primitive(projected));
        }
    }
    let m_basis = gram_schmidt(m_candidates);
    let expected_m = dim - 1 - 2 * (m_alpha + m_2alpha) as usize;
    if m_basis.len() != expected_m {
        return Err(LieError::DegenerateRank(format!(
            "m0 has dimension {} but {expected_m} was expected",
            m_basis.len()
        )));
    }

    let mut basis = Vec::with_capacity(dim);
    for (i, z) in m_basis.into_iter().enumerate() {
        basis.push(BasisElement { label: BasisLabel::M0(i), matrix: z });
    }
    basis.push(BasisElement { label: BasisLabel::A0, matrix: h0.clone() });
    let mut roots = Vec::new();
    let mut plus = Vec::new();
    for (root, l) in [(Root::Alpha, 1), (Root::TwoAlpha, 2)] {
        let space = spaces.iter().find(|(x, _)| *x == l).map(|(_, s)| s.clone()).unwrap_or_default();
        for (index, z) in gram_schmidt(space).into_iter().enumerate() {
            plus.push((root, index, primitive(z)));
            roots.push(root);
        }
    }
    for (root, index, z) in &plus {
        basis.push(BasisElement {
            label: BasisLabel::NPlus { root: *root, index: *index },
            matrix: z.clone(),
        });
    }
    for (root, index, z) in &plus {
        basis.push(BasisElement {
            label: BasisLabel::NMinus { root: *root, index: *index },
            matrix: theta(z),
        });
    }

    let structure = structure_table(&basis)?;

    let n_dim = plus.len();
    Ok(LieAlgebraModel {
        family,
        ambient_size: size,
        basis,
        structure,
        m_dim: expected_m,
        n_dim,
        roots,
    })
}

impl LieAlgebraModel {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn ambient_size(&self) -> usize {
        self.ambient_size
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Dimension `d` of the symmetric space.
    pub fn space_dim(&self) -> usize {
        self.n_dim + 1
    }

    pub fn m_dim(&self) -> usize {
        self.m_dim
    }

    /// `dim n₀⁺ = d − 1`.
    pub fn n_dim(&self) -> usize {
        self.n_dim
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn label(&self, i: usize) -> BasisLabel {
        self.basis[i].label
    }

    pub fn matrix(&self, i: usize) -> &RationalMatrix {
        &self.basis[i].matrix
    }

    pub fn h0_index(&self) -> usize {
        self.m_dim
    }

    pub fn m_indices(&self) -> std::ops::Range<usize> {
        0..self.m_dim
    }

    pub fn nplus_indices(&self) -> std::ops::Range<usize> {
        self.m_dim + 1..self.m_dim + 1 + self.n_dim
    }

    pub fn nminus_indices(&self) -> std::ops::Range<usize> {
        self.m_dim + 1 + self.n_dim..self.dim()
    }

    /// Restricted root of the `j`-th element of `n₀⁺` (and of its θ-image).
    pub fn root(&self, j: usize) -> Root {
        self.roots[j]
    }

    /// Eigenvalue of ad(H0) on basis element `i`.
    pub fn ad_h0_eigenvalue(&self, i: usize) -> i64 {
        match self.basis[i].label {
            BasisLabel::M0(_) | BasisLabel::A0 => 0,
            BasisLabel::NPlus { root, .. } => root.value(),
            BasisLabel::NMinus { root, .. } => -root.value(),
        }
    }

    /// Structure constants of `[e_i, e_j]`.
    pub fn structure_constants(&self, i: usize, j: usize) -> &SparseVector {
        &self.structure[i][j]
    }

    pub fn unit(&self, i: usize) -> CoeffVector {
        let mut v = vec![Rational::zero(); self.dim()];
        v[i] = Rational::one();
        v
    }

    pub fn element_matrix(&self, coeffs: &[Rational]) -> RationalMatrix {
        let n = self.ambient_size;
        let mut out = RationalMatrix::zeros(n, n);
        for (b, c) in self.basis.iter().zip(coeffs) {
            if !c.is_zero() {
                out = &out + &b.matrix.scale(c);
            }
        }
        out
    }

    /// Trace form `tr(XY)` on basis elements.
    pub fn trace_form(&self, i: usize, j: usize) -> Rational {
        self.basis[i].matrix.trace_pairing(&self.basis[j].matrix)
    }

    /// Same model with `n₀⁺` replaced by the columns of `p` (coordinates over
    /// the current `n₀⁺` basis) and `n₀⁻` by their θ-images. `p` must be
    /// invertible and must not mix the α and 2α blocks.
    pub fn with_nplus_basis(&self, p: &RationalMatrix) -> Result<Self, LieError> {
        let k = self.n_dim;
        if p.rows() != k || p.cols() != k || p.determinant().is_zero() {
            return Err(LieError::InvalidParameter("change of basis must be invertible".into()));
        }
        for i in 0..k {
            for j in 0..k {
                if !p[(i, j)].is_zero() && self.roots[i] != self.roots[j] {
                    return Err(LieError::InvalidParameter(
                        "change of basis mixes root spaces".into(),
                    ));
                }
            }
        }
        let plus = self.nplus_indices();
        let mut basis = self.basis[..plus.start].to_vec();
        let size = self.ambient_size;
        let columns: Vec<RationalMatrix> = (0..k)
            .map(|j| {
                let mut z = RationalMatrix::zeros(size, size);
                for i in 0..k {
                    if !p[(i, j)].is_zero() {
                        z = &z + &self.basis[plus.start + i].matrix.scale(&p[(i, j)]);
                    }
                }
                z
            })
            .collect();
        for (j, z) in columns.iter().enumerate() {
            basis.push(BasisElement { label: self.basis[plus.start + j].label, matrix: z.clone() });
        }
        for (j, z) in columns.iter().enumerate() {
            let label = self.basis[self.nminus_indices().start + j].label;
            basis.push(BasisElement { label, matrix: theta(z) });
        }
        let structure = structure_table(&basis)?;
        Ok(LieAlgebraModel { basis, structure, ..self.clone() })
    }

    #[doc(hidden)]
    pub fn corrupt_structure_constant(&mut self, i: usize, j: usize, k: usize, delta: Rational) {
        for (a, b, d) in [(i, j, delta.clone()), (j, i, -delta)] {
            let entry = &mut self.structure[a][b];
            match entry.iter_mut().find(|(x, _)| *x == k) {
                Some((_, v)) => *v += d,
                None => {
                    entry.push((k, d));
                    entry.sort_by_key(|(x, _)| *x);
                }
            }
            entry.retain(|(_, v)| !v.is_zero());
        }
    }
}

pub fn bracket(model: &LieAlgebraModel, x: &[Rational], y: &[Rational]) -> CoeffVector {
    let dim = model.dim();
    let mut out = vec![Rational::zero(); dim];
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            if yj.is_zero() || i == j {
                continue;
            }
            let coeff = xi * yj;
            for (k, c) in &model.structure[i][j] {
                out[*k] += &coeff * c;
            }
        }
    }
    out
}

pub fn project_components(model: &LieAlgebraModel, z: &[Rational]) -> ComponentSplit {
    let dim = model.dim();
    let mut split = ComponentSplit {
        ma_part: vec![Rational::zero(); dim],
        nplus_part: vec![Rational::zero(); dim],
        nminus_part: vec![Rational::zero(); dim],
    };
    let plus = model.nplus_indices();
    let minus = model.nminus_indices();
    for (i, c) in z.iter().enumerate() {
        let target = if plus.contains(&i) {
            &mut split.nplus_part
        } else if minus.contains(&i) {
            &mut split.nminus_part
        } else {
            &mut split.ma_part
        };
        target[i] = c.clone();
    }
    split
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureCheck {
    pub identity: Identity,
    pub cases: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub family: Family,
    pub dim: usize,
    pub m_dim: usize,
    pub root_multiplicities: (u32, u32),
    pub checks: Vec<StructureCheck>,
}

fn violation(identity: Identity, detail: String) -> LieError {
    LieError::StructureViolation { identity, detail }
}

/// Checks every model invariant exactly; fails on the first violated identity.
pub fn verify_structure(model: &LieAlgebraModel) -> Result<StructureReport, LieError> {
    let dim = model.dim();
    let lbl = |i: usize| model.label(i);
    let mut checks = Vec::new();

    let (ma, m2a) = model.family.root_multiplicities();
    let n_count = (ma + m2a) as usize;
    if model.n_dim != n_count
        || model.nminus_indices().len() != n_count
        || model.space_dim() != model.family.dim() as usize
    {
        return Err(violation(
            Identity::Dimension,
            format!("n0 dimension {} vs table {n_count}", model.n_dim),
        ));
    }
    checks.push(StructureCheck { identity: Identity::Dimension, cases: 1 });

    let mut cases = 0;
    for i in 0..dim {
        if !model.structure[i][i].is_empty() {
            return Err(violation(Identity::Antisymmetry, format!("[{0}, {0}] != 0", lbl(i))));
        }
        for j in i + 1..dim {
            let neg: SparseVector = model.structure[j][i].iter().map(|(k, v)| (*k, -v)).collect();
            if neg != model.structure[i][j] {
                return Err(violation(
                    Identity::Antisymmetry,
                    format!("[{}, {}] != -[{}, {}]", lbl(i), lbl(j), lbl(j), lbl(i)),
                ));
            }
            cases += 1;
        }
    }
    checks.push(StructureCheck { identity: Identity::Antisymmetry, cases });

    // Jacobi on basis triples: [[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j] = 0.
    let mut cases = 0;
    let mut acc = vec![Rational::zero(); dim];
    for i in 0..dim {
        for j in i + 1..dim {
            for k in j + 1..dim {
                for a in acc.iter_mut() {
                    *a = Rational::zero();
                }
                for (p, q, r) in [(i, j, k), (j, k, i), (k, i, j)] {
                    for (l, c) in &model.structure[p][q] {
                        for (m, d) in &model.structure[*l][r] {
                            acc[*m] += c * d;
                        }
                    }
                }
                if let Some(m) = acc.iter().position(|a| !a.is_zero()) {
                    return Err(violation(
                        Identity::Jacobi,
                        format!(
                            "cyclic sum for ({}, {}, {}) has component {} on {}",
                            lbl(i),
                            lbl(j),
                            lbl(k),
                            acc[m],
                            lbl(m)
                        ),
                    ));
                }
                cases += 1;
            }
        }
    }
    checks.push(StructureCheck { identity: Identity::Jacobi, cases });

    let h0 = model.h0_index();
    let mut cases = 0;
    for i in 0..dim {
        let expected: SparseVector = match model.ad_h0_eigenvalue(i) {
            0 => Vec::new(),
            l => vec![(i, int(l))],
        };
        if model.structure[h0][i] != expected {
            return Err(violation(
                Identity::RootGrading,
                format!("[H0, {}] is not {}·{}", lbl(i), model.ad_h0_eigenvalue(i), lbl(i)),
            ));
        }
        cases += 1;
    }
    checks.push(StructureCheck { identity: Identity::RootGrading, cases });

    let plus = model.nplus_indices();
    let minus = model.nminus_indices();
    let mut cases = 0;
    for i in 0..=h0 {
        for (range, name) in [(&plus, "n0+"), (&minus, "n0-")] {
            for j in range.clone() {
                if let Some((k, _)) = model.structure[i][j].iter().find(|(k, _)| !range.contains(k)) {
                    return Err(violation(
                        Identity::MaInvariance,
                        format!("[{}, {}] has a component on {} outside {name}", lbl(i), lbl(j), lbl(*k)),
                    ));
                }
                cases += 1;
            }
        }
    }
    checks.push(StructureCheck { identity: Identity::MaInvariance, cases });

    let mut cases = 0;
    for range in [&plus, &minus] {
        for i in range.clone() {
            for j in range.clone() {
                let target = model.ad_h0_eigenvalue(i) + model.ad_h0_eigenvalue(j);
                if let Some((k, _)) = model.structure[i][j]
                    .iter()
                    .find(|(k, _)| model.ad_h0_eigenvalue(*k) != target)
                {
                    return Err(violation(
                        Identity::RootAddition,
                        format!("[{}, {}] has a component on {}", lbl(i), lbl(j), lbl(*k)),
                    ));
                }
                cases += 1;
            }
        }
    }
    checks.push(StructureCheck { identity: Identity::RootAddition, cases });

    for i in model.m_indices() {
        if !model.structure[i][h0].is_empty() {
            return Err(violation(Identity::Centralizer, format!("[{}, H0] != 0", lbl(i))));
        }
    }
    checks.push(StructureCheck { identity: Identity::Centralizer, cases: model.m_dim });

    // -Gram on m0 must be positive definite (leading minors), tr(H0²) > 0.
    let m = model.m_dim;
    let neg_gram = RationalMatrix::from_fn(m, m, |a, b| -model.trace_form(a, b));
    for size in 1..=m {
        let minor = RationalMatrix::from_fn(size, size, |a, b| neg_gram[(a, b)].clone());
        if !minor.determinant().is_positive() {
            return Err(violation(
                Identity::KillingSign,
                format!("trace form is not negative definite on m0 (minor {size})"),
            ));
        }
    }
    if !model.trace_form(h0, h0).is_positive() {
        return Err(violation(Identity::KillingSign, "tr(H0^2) <= 0".into()));
    }
    checks.push(StructureCheck { identity: Identity::KillingSign, cases: m + 1 });

    Ok(StructureReport {
        family: model.family,
        dim,
        m_dim: model.m_dim,
        root_multiplicities: model.family.root_multiplicities(),
        checks,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisDump {
    pub label: String,
    pub matrix: Vec<Vec<RationalRepr>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BracketTerm {
    pub k: usize,
    pub value: RationalRepr,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<BracketTerm>,
}

/// JSON-facing dump of a model; only `i < j` brackets are listed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelDump {
    pub family: Family,
    pub ambient_size: usize,
    pub dim: usize,
    pub space_dim: usize,
    pub root_multiplicities: (u32, u32),
    pub basis: Vec<BasisDump>,
    pub bracket_table: Vec<BracketEntry>,
}

impl LieAlgebraModel {
    pub fn dump(&self) -> ModelDump {
        let basis = self
            .basis
            .iter()
            .map(|b| BasisDump {
                label: b.label.to_string(),
                matrix: (0..self.ambient_size)
                    .map(|r| {
                        (0..self.ambient_size)
                            .map(|c| RationalRepr::from(&b.matrix[(r, c)]))
                            .collect()
                    })
                    .collect(),
            })
            .collect();
        let mut bracket_table = Vec::new();
        for i in 0..self.dim() {
            for j in i + 1..self.dim() {
                if self.structure[i][j].is_empty() {
                    continue;
                }
                bracket_table.push(BracketEntry {
                    i,
                    j,
                    terms: self.structure[i][j]
                        .iter()
                        .map(|(k, v)| BracketTerm { k: *k, value: RationalRepr::from(v) })
                        .collect(),
                });
            }
        }
        ModelDump {
            family: self.family,
            ambient_size: self.ambient_size,
            dim: self.dim(),
            space_dim: self.space_dim(),
            root_multiplicities: self.family.root_multiplicities(),
            basis,
            bracket_table,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn dimensions_of_small_models() {
        let rh2 = build_model(Family::RealHyperbolic(2)).unwrap();
        assert_eq!((rh2.dim(), rh2.n_dim(), rh2.m_dim()), (3, 1, 0));
        let ch2 = build_model(Family::ComplexHyperbolic(2)).unwrap();
        assert_eq!((ch2.dim(), ch2.m_dim()), (8, 1));
        let alpha = (0..ch2.n_dim()).filter(|&j| ch2.root(j) == Root::Alpha).count();
        assert_eq!((alpha, ch2.n_dim() - alpha), (2, 1));
        let qh2 = build_model(Family::QuaternionicHyperbolic(2)).unwrap();
        assert_eq!((qh2.dim(), qh2.m_dim(), qh2.n_dim()), (21, 6, 7));
        let alpha = (0..qh2.n_dim()).filter(|&j| qh2.root(j) == Root::Alpha).count();
        assert_eq!((alpha, qh2.n_dim() - alpha), (4, 3));
    }

    #[test]
    fn rejects_octonionic_and_bad_parameters() {
        assert!(matches!(
            build_model(Family::OctonionicHyperbolic),
            Err(LieError::UnsupportedFamily(_))
        ));
        assert!(matches!(
            build_model(Family::RealHyperbolic(1)),
            Err(LieError::InvalidParameter(_))
        ));
        assert!(matches!(
            build_model(Family::ComplexHyperbolic(0)),
            Err(LieError::InvalidParameter(_))
        ));
    }

    #[test]
    fn brackets_in_the_three_dimensional_model() {
        let model = build_model(Family::RealHyperbolic(2)).unwrap();
        let h = model.unit(model.h0_index());
        let e = model.unit(model.nplus_indices().start);
        let f = model.unit(model.nminus_indices().start);
        assert!(bracket(&model, &e, &e).iter().all(Zero::is_zero));
        assert_eq!(bracket(&model, &h, &e), e);
        let ef = bracket(&model, &e, &f);
        let split = project_components(&model, &ef);
        assert!(split.ma_part.iter().any(|c| !c.is_zero()));
        assert!(split.nplus_part.iter().all(Zero::is_zero));
        assert!(split.nminus_part.iter().all(Zero::is_zero));
    }

    #[test]
    fn projection_of_basis_vectors() {
        let model = build_model(Family::ComplexHyperbolic(2)).unwrap();
        let z = model.unit(model.nplus_indices().start + 1);
        let split = project_components(&model, &z);
        assert_eq!(split.nplus_part, z);
        assert!(split.ma_part.iter().all(Zero::is_zero));
        assert!(split.nminus_part.iter().all(Zero::is_zero));
    }

    #[test]
    fn structure_checks_pass_and_detect_corruption() {
        for family in [
            Family::RealHyperbolic(3),
            Family::ComplexHyperbolic(2),
            Family::QuaternionicHyperbolic(1),
        ] {
            let model = build_model(family).unwrap();
            let report = verify_structure(&model).unwrap();
            assert!(report.checks.iter().any(|c| c.identity == Identity::RootAddition));
        }
        let mut model = build_model(Family::RealHyperbolic(3)).unwrap();
        let e = model.nplus_indices().start;
        let f = model.nminus_indices().start;
        let m0 = model.m_indices().start;
        model.corrupt_structure_constant(e, f, m0, rat(1, 1));
        match verify_structure(&model) {
            Err(LieError::StructureViolation { identity, .. }) => assert_eq!(identity, Identity::Jacobi),
            other => panic!("expected a Jacobi violation, got {other:?}"),
        }
    }

    #[test]
    fn two_alpha_brackets_land_in_two_alpha() {
        let model = build_model(Family::ComplexHyperbolic(2)).unwrap();
        let plus: Vec<usize> = model.nplus_indices().collect();
        let (a, b) = (plus[0], plus[1]);
        let c = bracket(&model, &model.unit(a), &model.unit(b));
        let support: Vec<usize> = (0..model.dim()).filter(|&k| !c[k].is_zero()).collect();
        assert!(!support.is_empty());
        assert!(support.iter().all(|&k| model.ad_h0_eigenvalue(k) == 2));
    }

    #[test]
    fn dump_lists_every_basis_element() {
        let model = build_model(Family::RealHyperbolic(2)).unwrap();
        let dump = model.dump();
        assert_eq!(dump.basis.len(), 3);
        assert_eq!(dump.basis[0].label, "A0");
        let json = serde_json::to_string(&dump).unwrap();
        let back: ModelDump = serde_json::from_str(&json).unwrap();
        assert_eq!(back.bracket_table.len(), dump.bracket_table.len());
    }
}
