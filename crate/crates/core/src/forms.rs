//! Invariant exterior forms over `(a₀ ⊕ n₀⁺ ⊕ n₀⁻)*` with coefficients in
//! `ℚ·π^k·i^m`, and the End-valued 2-forms `ω^±`, their determinants `Ω^±`,
//! the eigenvalue forms `μ^±` and primitives `α^±`.
//!
//! Covector indices: `0` is `H0*`, `1..=k` are the duals of `n₀⁺` and
//! `k+1..=2k` the duals of `n₀⁻`, where `k = d − 1`. A monomial is stored as
//! a bitmask of its (increasing) indices.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Mul, Neg};
use thiserror::Error;

use crate::exec::Execution;
use crate::lie::{LieAlgebraModel, LieError, Root};
use crate::rational::{int, rat, Rational};

const MAX_AMBIENT: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormError {
    #[error("degree {degree} exceeds the ambient dimension {ambient}")]
    DegreeOverflow { degree: usize, ambient: usize },
    #[error("forms live on spaces of dimension {0} and {1}")]
    AmbientMismatch(usize, usize),
    #[error("cannot add forms of degrees {0} and {1}")]
    DegreeMismatch(usize, usize),
    #[error("cannot add {0} and {1}: different pi or i powers")]
    MixedScale(Scale, Scale),
    #[error("covector index {index} out of range for dimension {ambient}")]
    IndexOutOfRange { index: usize, ambient: usize },
    #[error("determinant needs even-degree entries of a common scale")]
    NonCommutingEntries,
    #[error("the eigenvalue form is defined for even dim(X); got {0}")]
    OddDimension(usize),
    #[error("expected one real eigenvalue form, {survivors} survived validation ({detail})")]
    EigenvalueAmbiguous { survivors: usize, detail: String },
    #[error("eigenvalue form is not a multiple of kappa: {0}")]
    NotProportional(String),
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// The `π^pi_pow · i^i_pow` part of a scalar, `i_pow ∈ {0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Scale {
    pub pi_pow: i32,
    pub i_pow: u8,
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pi^{} i^{}", self.pi_pow, self.i_pow)
    }
}

/// `q · π^pi_pow · i^i_pow`. Powers `i²` are folded into the sign of `q`, so
/// `i_pow` is 0 (real) or 1 (imaginary). Zero is always stored with trivial powers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScaledScalar {
    pub q: Rational,
    pub pi_pow: i32,
    pub i_pow: u8,
}

impl ScaledScalar {
    pub fn new(q: Rational, pi_pow: i32, i_pow: i32) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        let i = i_pow.rem_euclid(4);
        let (q, i) = if i >= 2 { (-q, i - 2) } else { (q, i) };
        ScaledScalar { q, pi_pow, i_pow: i as u8 }
    }

    pub fn rational(q: Rational) -> Self {
        Self::new(q, 0, 0)
    }

    pub fn zero() -> Self {
        ScaledScalar { q: Rational::zero(), pi_pow: 0, i_pow: 0 }
    }

    pub fn one() -> Self {
        Self::rational(Rational::one())
    }

    /// `i / (2π)`.
    pub fn i_over_two_pi() -> Self {
        Self::new(rat(1, 2), -1, 1)
    }

    pub fn scale(&self) -> Scale {
        Scale { pi_pow: self.pi_pow, i_pow: self.i_pow }
    }

    pub fn is_zero(&self) -> bool {
        self.q.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.i_pow == 0
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(Self::new(self.q.recip(), -self.pi_pow, -(self.i_pow as i32)))
    }

    /// Sum when both terms share powers of π and i (or one is zero).
    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        if self.is_zero() {
            return Some(other.clone());
        }
        if other.is_zero() {
            return Some(self.clone());
        }
        (self.scale() == other.scale())
            .then(|| Self::new(&self.q + &other.q, self.pi_pow, self.i_pow as i32))
    }

    /// Numerical value of a real scalar.
    pub fn to_f64(&self) -> Option<f64> {
        self.is_real()
            .then(|| crate::rational::to_f64(&self.q) * std::f64::consts::PI.powi(self.pi_pow))
    }
}

impl Serialize for ScaledScalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("ScaledScalar", 4)?;
        st.serialize_field("num", &self.q.numer().to_string())?;
        st.serialize_field("den", &self.q.denom().to_string())?;
        st.serialize_field("pi_pow", &self.pi_pow)?;
        st.serialize_field("i_pow", &self.i_pow)?;
        st.end()
    }
}

impl Mul for &ScaledScalar {
    type Output = ScaledScalar;
    fn mul(self, rhs: &ScaledScalar) -> ScaledScalar {
        ScaledScalar::new(
            &self.q * &rhs.q,
            self.pi_pow + rhs.pi_pow,
            self.i_pow as i32 + rhs.i_pow as i32,
        )
    }
}

impl Neg for &ScaledScalar {
    type Output = ScaledScalar;
    fn neg(self) -> ScaledScalar {
        ScaledScalar::new(-&self.q, self.pi_pow, self.i_pow as i32)
    }
}

impl fmt::Display for ScaledScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.q)?;
        if self.pi_pow != 0 {
            write!(f, "*pi^{}", self.pi_pow)?;
        }
        if self.i_pow == 1 {
            write!(f, "*i")?;
        }
        Ok(())
    }
}

/// Sign of sorting the concatenation of two disjoint increasing index sets.
fn merge_sign(a: u64, b: u64) -> Option<bool> {
    if a & b != 0 {
        return None;
    }
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        inversions += (a >> j).count_ones();
    }
    Some(inversions % 2 == 1)
}

fn mask_indices(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut rest = mask;
    while rest != 0 {
        out.push(rest.trailing_zeros() as usize);
        rest &= rest - 1;
    }
    out
}

type Terms = BTreeMap<u64, Rational>;

fn accumulate(terms: &mut Terms, mask: u64, value: Rational) {
    if value.is_zero() {
        return;
    }
    match terms.entry(mask) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(value);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += value;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

fn wedge_terms(a: &Terms, b: &Terms) -> Terms {
    let mut out = Terms::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            if let Some(negative) = merge_sign(*ma, *mb) {
                let v = ca * cb;
                accumulate(&mut out, ma | mb, if negative { -v } else { v });
            }
        }
    }
    out
}

/// Alternating form of fixed degree on an `ambient`-dimensional space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExteriorForm {
    ambient: usize,
    degree: usize,
    scale: Scale,
    terms: Terms,
}

impl ExteriorForm {
    pub fn zero(ambient: usize, degree: usize) -> Self {
        assert!(ambient <= MAX_AMBIENT, "ambient dimension {ambient} is too large");
        ExteriorForm { ambient, degree, scale: Scale::default(), terms: Terms::new() }
    }

    pub fn constant(ambient: usize, c: ScaledScalar) -> Self {
        let mut f = Self::zero(ambient, 0);
        if !c.is_zero() {
            f.scale = c.scale();
            f.terms.insert(0, c.q);
        }
        f
    }

    /// `e^{i_1} ∧ … ∧ e^{i_p}` for indices in any order (sign applied).
    pub fn monomial(ambient: usize, indices: &[usize]) -> Result<Self, FormError> {
        Self::from_terms(ambient, indices.len(), [(indices.to_vec(), Rational::one())])
    }

    pub fn covector(ambient: usize, i: usize) -> Result<Self, FormError> {
        Self::monomial(ambient, &[i])
    }

    pub fn from_terms<I>(ambient: usize, degree: usize, terms: I) -> Result<Self, FormError>
    where
        I: IntoIterator<Item = (Vec<usize>, Rational)>,
    {
        if degree > ambient {
            return Err(FormError::DegreeOverflow { degree, ambient });
        }
        let mut f = Self::zero(ambient, degree);
        for (indices, c) in terms {
            if indices.len() != degree {
                return Err(FormError::DegreeMismatch(degree, indices.len()));
            }
            let mut mask = 0u64;
            let mut negative = false;
            let mut repeated = false;
            for &i in &indices {
                if i >= ambient {
                    return Err(FormError::IndexOutOfRange { index: i, ambient });
                }
                match merge_sign(mask, 1 << i) {
                    Some(s) => negative ^= s,
                    None => repeated = true,
                }
                mask |= 1 << i;
            }
            if !repeated {
                accumulate(&mut f.terms, mask, if negative { -c } else { c });
            }
        }
        Ok(f)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn scalar(&self, q: &Rational) -> ScaledScalar {
        ScaledScalar::new(q.clone(), self.scale.pi_pow, self.scale.i_pow as i32)
    }

    /// Coefficient of `e^{i_1} ∧ … ∧ e^{i_p}` with indices in any order.
    pub fn coefficient(&self, indices: &[usize]) -> ScaledScalar {
        let Ok(probe) = Self::monomial(self.ambient, indices) else {
            return ScaledScalar::zero();
        };
        match probe.terms.iter().next() {
            Some((mask, sign)) => self.terms.get(mask).map_or_else(ScaledScalar::zero, |c| self.scalar(&(c * sign))),
            None => ScaledScalar::zero(),
        }
    }

    /// Coefficient of the top monomial `e^0 ∧ … ∧ e^{n−1}`.
    pub fn top_coefficient(&self) -> ScaledScalar {
        let all: Vec<usize> = (0..self.ambient).collect();
        self.coefficient(&all)
    }

    /// Terms in increasing mask order as (indices, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, ScaledScalar)> + '_ {
        self.terms.iter().map(|(m, c)| (mask_indices(*m), self.scalar(c)))
    }

    pub fn scaled(&self, c: &ScaledScalar) -> Self {
        if c.is_zero() || self.is_zero() {
            return Self::zero(self.ambient, self.degree);
        }
        let s = &self.scalar(&Rational::one()) * c;
        ExteriorForm {
            ambient: self.ambient,
            degree: self.degree,
            scale: s.scale(),
            terms: self.terms.iter().map(|(m, v)| (*m, v * &s.q)).collect(),
        }
    }

    fn compatible(&self, other: &Self) -> Result<(), FormError> {
        if self.ambient != other.ambient {
            return Err(FormError::AmbientMismatch(self.ambient, other.ambient));
        }
        if self.degree != other.degree {
            return Err(FormError::DegreeMismatch(self.degree, other.degree));
        }
        if !self.is_zero() && !other.is_zero() && self.scale != other.scale {
            return Err(FormError::MixedScale(self.scale, other.scale));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, FormError> {
        self.compatible(other)?;
        let mut out = if self.is_zero() { other.clone() } else { self.clone() };
        if !self.is_zero() {
            for (m, v) in &other.terms {
                accumulate(&mut out.terms, *m, v.clone());
            }
        }
        if out.terms.is_empty() {
            out.scale = Scale::default();
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, FormError> {
        self.checked_add(&other.scaled(&ScaledScalar::rational(int(-1))))
    }

    /// Ratio `self = c · other` when it exists.
    pub fn proportionality(&self, other: &Self) -> Option<ScaledScalar> {
        if self.ambient != other.ambient || self.degree != other.degree || other.is_zero() {
            return None;
        }
        let (m, v) = other.terms.iter().next()?;
        let c = self.terms.get(m)? / v;
        let candidate = other.scaled(&ScaledScalar::rational(c.clone()));
        (candidate.terms == self.terms).then(|| {
            ScaledScalar::new(
                c,
                self.scale.pi_pow - other.scale.pi_pow,
                self.scale.i_pow as i32 - other.scale.i_pow as i32,
            )
        })
    }

    pub fn dump(&self) -> FormDump {
        FormDump {
            degree: self.degree,
            ambient: self.ambient,
            terms: self
                .terms()
                .map(|(indices, c)| FormTerm {
                    indices,
                    num: c.q.numer().to_string(),
                    den: c.q.denom().to_string(),
                    pi_pow: c.pi_pow,
                    i_pow: c.i_pow,
                })
                .collect(),
        }
    }
}

pub fn wedge(f: &ExteriorForm, g: &ExteriorForm) -> Result<ExteriorForm, FormError> {
    if f.ambient != g.ambient {
        return Err(FormError::AmbientMismatch(f.ambient, g.ambient));
    }
    let degree = f.degree + g.degree;
    if degree > f.ambient {
        return Err(FormError::DegreeOverflow { degree, ambient: f.ambient });
    }
    let terms = wedge_terms(&f.terms, &g.terms);
    if terms.is_empty() {
        return Ok(ExteriorForm::zero(f.ambient, degree));
    }
    let s = &f.scalar(&Rational::one()) * &g.scalar(&Rational::one());
    Ok(ExteriorForm {
        ambient: f.ambient,
        degree,
        scale: s.scale(),
        terms: terms.into_iter().map(|(m, v)| (m, v * &s.q)).collect(),
    })
}

/// Interior product with the basis vector dual to covector `direction`.
pub fn contract(form: &ExteriorForm, direction: usize) -> ExteriorForm {
    if form.degree == 0 {
        return ExteriorForm::zero(form.ambient, 0);
    }
    let bit = 1u64 << direction;
    let mut out = ExteriorForm::zero(form.ambient, form.degree - 1);
    for (m, v) in &form.terms {
        if m & bit != 0 {
            let before = (m & (bit - 1)).count_ones();
            accumulate(&mut out.terms, m & !bit, if before % 2 == 1 { -v } else { v.clone() });
        }
    }
    if !out.is_zero() {
        out.scale = form.scale;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn opposite(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Dimension `2d − 1` of the covector space.
pub fn form_ambient(model: &LieAlgebraModel) -> usize {
    2 * model.n_dim() + 1
}

/// Covector index of a model basis element, `None` for `m₀`.
pub fn covector_of(model: &LieAlgebraModel, basis_index: usize) -> Option<usize> {
    if basis_index == model.h0_index() {
        Some(0)
    } else if model.nplus_indices().contains(&basis_index) || model.nminus_indices().contains(&basis_index) {
        Some(basis_index - model.h0_index())
    } else {
        None
    }
}

/// Model basis index of a covector.
pub fn basis_of(model: &LieAlgebraModel, covector: usize) -> usize {
    model.h0_index() + covector
}

/// `ad(H0)` weight of the vector dual to each covector.
pub fn covector_weights(model: &LieAlgebraModel) -> Vec<i64> {
    (0..form_ambient(model))
        .map(|c| model.ad_h0_eigenvalue(basis_of(model, c)))
        .collect()
}

/// Square matrix of 2-forms; entry `(r, c)` is the `r`-th output coordinate
/// of the `c`-th input basis vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FormMatrix {
    size: usize,
    ambient: usize,
    entries: Vec<ExteriorForm>,
}

impl FormMatrix {
    pub fn new(size: usize, ambient: usize, degree: usize) -> Self {
        FormMatrix {
            size,
            ambient,
            entries: vec![ExteriorForm::zero(ambient, degree); size * size],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, r: usize, c: usize) -> &ExteriorForm {
        &self.entries[r * self.size + c]
    }

    pub fn set(&mut self, r: usize, c: usize, f: ExteriorForm) {
        self.entries[r * self.size + c] = f;
    }

    /// Evaluates every entry on the pair of vectors dual to covectors `(a, b)`.
    pub fn evaluate(&self, a: usize, b: usize) -> Vec<Vec<ScaledScalar>> {
        (0..self.size)
            .map(|r| (0..self.size).map(|c| self.get(r, c).coefficient(&[a, b])).collect())
            .collect()
    }

    /// Leibniz determinant over the commutative ring of even forms. The first
    /// row is split across workers; partial sums are added in column order.
    pub fn determinant(&self, exec: Execution) -> Result<ExteriorForm, FormError> {
        let n = self.size;
        let live: Vec<&ExteriorForm> = self.entries.iter().filter(|e| !e.is_zero()).collect();
        let scale = live.first().map(|e| e.scale).unwrap_or_default();
        let degree = self.entries.first().map_or(0, |e| e.degree);
        if degree % 2 == 1 || live.iter().any(|e| e.scale != scale || e.degree != degree) {
            return Err(FormError::NonCommutingEntries);
        }
        let total = degree * n;
        if total > self.ambient {
            return Err(FormError::DegreeOverflow { degree: total, ambient: self.ambient });
        }
        let partials = exec.map_range(n.max(1), |c| {
            let mut out = Terms::new();
            if n == 0 {
                out.insert(0, Rational::one());
                return out;
            }
            let entry = &self.get(0, c).terms;
            if !entry.is_empty() {
                if n == 1 {
                    return entry.clone();
                }
                self.expand(1, 1 << c, entry, false, &mut out);
            }
            out
        });
        let mut terms = Terms::new();
        for p in partials {
            for (m, v) in p {
                accumulate(&mut terms, m, v);
            }
        }
        let s = ScaledScalar::new(Rational::one(), scale.pi_pow, scale.i_pow as i32).pow(n as u32);
        let det = ExteriorForm { ambient: self.ambient, degree: total, scale: Scale::default(), terms };
        Ok(if det.is_zero() { det } else { det.scaled(&s) })
    }

    fn expand(&self, row: usize, used: u64, acc: &Terms, negative: bool, out: &mut Terms) {
        let n = self.size;
        for c in 0..n {
            if used & (1 << c) != 0 {
                continue;
            }
            let entry = &self.get(row, c).terms;
            if entry.is_empty() {
                continue;
            }
            let next = wedge_terms(acc, entry);
            if next.is_empty() {
                continue;
            }
            // inversions added by placing column c after the used ones
            let flips = (used >> (c + 1)).count_ones() % 2 == 1;
            let sign = negative ^ flips;
            if row + 1 == n {
                for (m, v) in next {
                    accumulate(out, m, if sign { -v } else { v });
                }
            } else {
                self.expand(row + 1, used | (1 << c), &next, sign, out);
            }
        }
    }

    /// `self − λ·I` for a form `λ` of the entry degree.
    pub fn shifted(&self, lambda: &ExteriorForm) -> Result<FormMatrix, FormError> {
        let mut out = self.clone();
        for i in 0..self.size {
            out.set(i, i, self.get(i, i).checked_sub(lambda)?);
        }
        Ok(out)
    }
}

/// `ω^±`: entry `(k, j)` is the 2-form `(X, Y) ↦ ⟨Z^k, −[[X, Y]₀, Z_j]⟩` on
/// pairs of `n₀⁺ ⊕ n₀⁻` directions, `Z_j` running over `n₀^±`.
pub fn omega_r(model: &LieAlgebraModel, sign: Sign) -> FormMatrix {
    let k = model.n_dim();
    let ambient = form_ambient(model);
    let target = match sign {
        Sign::Plus => model.nplus_indices(),
        Sign::Minus => model.nminus_indices(),
    };
    let mut out = FormMatrix::new(k, ambient, 2);
    let mut raw: Vec<Terms> = vec![Terms::new(); k * k];
    for a in 1..ambient {
        for b in a + 1..ambient {
            let xy = model.structure_constants(basis_of(model, a), basis_of(model, b));
            let zero_part: Vec<&(usize, Rational)> =
                xy.iter().filter(|(i, _)| *i <= model.h0_index()).collect();
            if zero_part.is_empty() {
                continue;
            }
            for (j, zj) in target.clone().enumerate() {
                let mut image = BTreeMap::<usize, Rational>::new();
                for (i, c) in &zero_part {
                    for (l, v) in model.structure_constants(*i, zj) {
                        *image.entry(*l).or_insert_with(Rational::zero) -= c * v;
                    }
                }
                for (l, v) in image {
                    if v.is_zero() {
                        continue;
                    }
                    let row = l - target.start;
                    accumulate(&mut raw[row * k + j], (1 << a) | (1 << b), v);
                }
            }
        }
    }
    for (idx, terms) in raw.into_iter().enumerate() {
        out.entries[idx] = ExteriorForm { ambient, degree: 2, scale: Scale::default(), terms };
    }
    out
}

/// `Ω^± = det((i/2π) ω^±)`, of degree `2d − 2`.
pub fn capital_omega_r(
    model: &LieAlgebraModel,
    sign: Sign,
    exec: Execution,
) -> Result<ExteriorForm, FormError> {
    let det = omega_r(model, sign).determinant(exec)?;
    Ok(det.scaled(&ScaledScalar::i_over_two_pi().pow(model.n_dim() as u32)))
}

/// `κ(X, Y)`: the `H0` coefficient of `[X, Y]`.
pub fn contact_two_form(model: &LieAlgebraModel) -> ExteriorForm {
    let ambient = form_ambient(model);
    let h0 = model.h0_index();
    let mut f = ExteriorForm::zero(ambient, 2);
    for a in 1..ambient {
        for b in a + 1..ambient {
            if let Some((_, v)) = model
                .structure_constants(basis_of(model, a), basis_of(model, b))
                .iter()
                .find(|(i, _)| *i == h0)
            {
                accumulate(&mut f.terms, (1 << a) | (1 << b), v.clone());
            }
        }
    }
    f
}

/// Chevalley–Eilenberg differential on `(a₀ ⊕ n₀⁺ ⊕ n₀⁻)*`, extended as an
/// antiderivation from `de^l = −Σ_{i<j} c_{ij}^l e^i ∧ e^j`. With this sign
/// `d(H0*) = −κ`. The `m₀` components of brackets are dropped, so `d² = 0`
/// holds on `M`-basic forms (and on every form when `m₀ = 0`).
pub fn invariant_d(form: &ExteriorForm, model: &LieAlgebraModel) -> Result<ExteriorForm, FormError> {
    let ambient = form_ambient(model);
    if form.ambient != ambient {
        return Err(FormError::AmbientMismatch(form.ambient, ambient));
    }
    if form.degree + 1 > ambient {
        return Err(FormError::DegreeOverflow { degree: form.degree + 1, ambient });
    }
    let mut de: Vec<Vec<(u64, Rational)>> = vec![Vec::new(); ambient];
    for i in 0..ambient {
        for j in i + 1..ambient {
            for (l, v) in model.structure_constants(basis_of(model, i), basis_of(model, j)) {
                if let Some(cl) = covector_of(model, *l) {
                    de[cl].push(((1 << i) | (1 << j), -v));
                }
            }
        }
    }
    let mut out = ExteriorForm::zero(ambient, form.degree + 1);
    for (mask, v) in &form.terms {
        for l in mask_indices(*mask) {
            let bit = 1u64 << l;
            let left = mask & (bit - 1);
            let right = mask & !(bit | (bit - 1));
            let outer = left.count_ones() % 2 == 1;
            for (pair, c) in &de[l] {
                let Some(s1) = merge_sign(left, *pair) else { continue };
                let Some(s2) = merge_sign(left | pair, right) else { continue };
                let value = v * c;
                accumulate(&mut out.terms, left | pair | right, if outer ^ s1 ^ s2 { -value } else { value });
            }
        }
    }
    if !out.is_zero() {
        out.scale = form.scale;
    }
    Ok(out)
}

/// Infinitesimal coadjoint action of `H0` (the derivation extending
/// `−ad(H0)*`): a monomial is multiplied by minus the sum of its weights.
pub fn coadjoint_h0(form: &ExteriorForm, model: &LieAlgebraModel) -> ExteriorForm {
    let weights = covector_weights(model);
    let mut out = ExteriorForm::zero(form.ambient, form.degree);
    for (mask, v) in &form.terms {
        let w: i64 = mask_indices(*mask).iter().map(|&i| weights[i]).sum();
        accumulate(&mut out.terms, *mask, v * int(-w));
    }
    if !out.is_zero() {
        out.scale = form.scale;
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct MuCandidate {
    pub root: Root,
    pub block_size: usize,
    /// Candidate form is nonzero.
    pub nonzero: bool,
    /// `det(ω − λ I) = 0` holds exactly.
    pub validated: bool,
}

#[derive(Debug, Clone)]
pub struct MuExtraction {
    pub sign: Sign,
    pub form: ExteriorForm,
    /// `μ = λ κ`.
    pub lambda: Rational,
    pub root: Root,
    pub candidates: Vec<MuCandidate>,
}

/// The unique real eigenvalue 2-form of `ω^±`.
///
/// Candidates are the averaged diagonals of `ω^±` over the `α` and `2α`
/// blocks; a candidate `λ` survives when `det(ω^± − λ I)` vanishes exactly.
pub fn mu_r(model: &LieAlgebraModel, sign: Sign, exec: Execution) -> Result<MuExtraction, FormError> {
    let d = model.space_dim();
    if d % 2 == 1 {
        return Err(FormError::OddDimension(d));
    }
    let omega = omega_r(model, sign);
    let ambient = form_ambient(model);
    let mut candidates = Vec::new();
    let mut survivors = Vec::new();
    for root in [Root::Alpha, Root::TwoAlpha] {
        let block: Vec<usize> = (0..model.n_dim()).filter(|&j| model.root(j) == root).collect();
        if block.is_empty() {
            continue;
        }
        let mut sum = ExteriorForm::zero(ambient, 2);
        for &j in &block {
            sum = sum.checked_add(omega.get(j, j))?;
        }
        let lambda = sum.scaled(&ScaledScalar::rational(rat(1, block.len() as i64)));
        let nonzero = !lambda.is_zero();
        let validated = nonzero && omega.shifted(&lambda)?.determinant(exec)?.is_zero();
        candidates.push(MuCandidate { root, block_size: block.len(), nonzero, validated });
        if validated && !survivors.iter().any(|(_, f): &(Root, ExteriorForm)| *f == lambda) {
            survivors.push((root, lambda));
        }
    }
    if survivors.len() != 1 {
        let detail = candidates
            .iter()
            .map(|c| format!("{:?}: nonzero={} validated={}", c.root, c.nonzero, c.validated))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(FormError::EigenvalueAmbiguous { survivors: survivors.len(), detail });
    }
    let (root, form) = survivors.pop().expect("one survivor");
    let kappa = contact_two_form(model);
    let ratio = form
        .proportionality(&kappa)
        .filter(|c| c.pi_pow == 0 && c.i_pow == 0)
        .ok_or_else(|| FormError::NotProportional(format!("{sign} block {root:?}")))?;
    Ok(MuExtraction { sign, form, lambda: ratio.q, root, candidates })
}

/// `α^± = −(i/2π) λ H0*`, the invariant primitive with `dα^± = (i/2π) μ^±`.
pub fn alpha_r(model: &LieAlgebraModel, sign: Sign, exec: Execution) -> Result<ExteriorForm, FormError> {
    let mu = mu_r(model, sign, exec)?;
    Ok(alpha_from_mu(model, &mu))
}

pub fn alpha_from_mu(model: &LieAlgebraModel, mu: &MuExtraction) -> ExteriorForm {
    let c = &ScaledScalar::i_over_two_pi() * &ScaledScalar::rational(-&mu.lambda);
    ExteriorForm::covector(form_ambient(model), 0)
        .expect("H0* exists")
        .scaled(&c)
}

/// Exact checks of the closed/basic/invariant properties for one sign.
#[derive(Debug, Clone, Serialize)]
pub struct FormChecks {
    pub sign: Sign,
    pub omega_degree: usize,
    pub d_omega_zero: bool,
    pub contract_h0_zero: bool,
    pub coadjoint_invariant: bool,
    pub d_alpha_matches_mu: bool,
    pub mu_lambda: String,
    pub mu_root: Root,
    pub mu_candidates: Vec<MuCandidate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FormsReport {
    pub family: crate::lie::Family,
    pub checks: Vec<FormChecks>,
    pub antisymmetric: bool,
}

impl FormsReport {
    pub fn all_pass(&self) -> bool {
        self.antisymmetric
            && self.checks.iter().all(|c| {
                c.d_omega_zero && c.contract_h0_zero && c.coadjoint_invariant && c.d_alpha_matches_mu
            })
    }
}

pub fn check_forms(model: &LieAlgebraModel, exec: Execution) -> Result<FormsReport, FormError> {
    let kappa = contact_two_form(model);
    let mut omegas = Vec::new();
    let mut checks = Vec::new();
    for sign in [Sign::Plus, Sign::Minus] {
        let omega = capital_omega_r(model, sign, exec)?;
        let mu = mu_r(model, sign, exec)?;
        let alpha = alpha_from_mu(model, &mu);
        let d_alpha = invariant_d(&alpha, model)?;
        let target = mu.form.scaled(&ScaledScalar::i_over_two_pi());
        let invariant = [&omega, &mu.form, &alpha, &kappa]
            .iter()
            .all(|f| coadjoint_h0(f, model).is_zero());
        checks.push(FormChecks {
            sign,
            omega_degree: omega.degree(),
            d_omega_zero: invariant_d(&omega, model)?.is_zero(),
            contract_h0_zero: contract(&omega, 0).is_zero(),
            coadjoint_invariant: invariant,
            d_alpha_matches_mu: d_alpha.checked_sub(&target)?.is_zero(),
            mu_lambda: mu.lambda.to_string(),
            mu_root: mu.root,
            mu_candidates: mu.candidates,
        });
        omegas.push(omega);
    }
    let antisymmetric = omegas[0].checked_add(&omegas[1])?.is_zero();
    Ok(FormsReport { family: model.family(), checks, antisymmetric })
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FormTerm {
    pub indices: Vec<usize>,
    pub num: String,
    pub den: String,
    pub pi_pow: i32,
    pub i_pow: u8,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FormDump {
    pub degree: usize,
    pub ambient: usize,
    pub terms: Vec<FormTerm>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{build_model, Family};

    fn rh2() -> LieAlgebraModel {
        build_model(Family::RealHyperbolic(2)).unwrap()
    }

    #[test]
    fn scalar_normal_form() {
        let i = ScaledScalar::new(int(1), 0, 1);
        assert_eq!(&i * &i, ScaledScalar::rational(int(-1)));
        let c = ScaledScalar::i_over_two_pi().pow(2);
        assert_eq!(c, ScaledScalar::new(rat(-1, 4), -2, 0));
        assert!(c.is_real());
        assert_eq!(ScaledScalar::new(int(3), 0, 7), ScaledScalar::new(int(-3), 0, 1));
        let r = i.recip().unwrap();
        assert_eq!(&r * &i, ScaledScalar::one());
        assert!(ScaledScalar::new(int(0), 5, 1).checked_add(&i).is_some());
        assert!(ScaledScalar::one().checked_add(&i).is_none());
    }

    #[test]
    fn wedge_signs() {
        let e = |i| ExteriorForm::covector(3, i).unwrap();
        let e01 = wedge(&e(0), &e(1)).unwrap();
        let e10 = wedge(&e(1), &e(0)).unwrap();
        assert_eq!(e10, e01.scaled(&ScaledScalar::rational(int(-1))));
        assert!(wedge(&e(2), &e(2)).unwrap().is_zero());
        let top = wedge(&wedge(&e(1), &e(2)).unwrap(), &e(0)).unwrap();
        assert_eq!(top.top_coefficient(), ScaledScalar::one());
        assert!(matches!(wedge(&top, &e(0)), Err(FormError::DegreeOverflow { .. })));
        let m = ExteriorForm::monomial(3, &[2, 0]).unwrap();
        assert_eq!(m.coefficient(&[0, 2]), ScaledScalar::rational(int(-1)));
        assert_eq!(m.coefficient(&[2, 0]), ScaledScalar::one());
    }

    #[test]
    fn contraction() {
        let ef = ExteriorForm::monomial(3, &[1, 2]).unwrap();
        assert_eq!(contract(&ef, 1), ExteriorForm::covector(3, 2).unwrap());
        assert_eq!(contract(&ef, 2), ExteriorForm::covector(3, 1).unwrap().scaled(&ScaledScalar::rational(int(-1))));
        assert!(contract(&contract(&ef, 1), 1).is_zero());
    }

    #[test]
    fn three_dimensional_omega() {
        let model = rh2();
        let plus = omega_r(&model, Sign::Plus);
        let minus = omega_r(&model, Sign::Minus);
        let kappa = contact_two_form(&model);
        // [E, F] = c H0 with c ≠ 0, [H0, E] = E, so ω⁺ = −κ and ω⁻ = +κ.
        assert!(!kappa.is_zero());
        assert_eq!(plus.get(0, 0), &kappa.scaled(&ScaledScalar::rational(int(-1))));
        assert_eq!(minus.get(0, 0), &kappa);
        let big = capital_omega_r(&model, Sign::Plus, Execution::Sequential).unwrap();
        assert_eq!(big.degree(), 2);
        assert_eq!(big.scale(), Scale { pi_pow: -1, i_pow: 1 });
    }

    #[test]
    fn kappa_vanishes_on_nplus_pairs() {
        let model = build_model(Family::ComplexHyperbolic(2)).unwrap();
        let kappa = contact_two_form(&model);
        let k = model.n_dim();
        for a in 1..=k {
            for b in a + 1..=k {
                assert!(kappa.coefficient(&[a, b]).is_zero());
            }
            assert!(kappa.coefficient(&[0, a]).is_zero());
        }
    }

    #[test]
    fn d_of_h0_star_is_minus_kappa() {
        for family in [Family::RealHyperbolic(2), Family::ComplexHyperbolic(2)] {
            let model = build_model(family).unwrap();
            let h = ExteriorForm::covector(form_ambient(&model), 0).unwrap();
            let dh = invariant_d(&h, &model).unwrap();
            let kappa = contact_two_form(&model);
            assert!(dh.checked_add(&kappa).unwrap().is_zero());
            assert!(invariant_d(&kappa, &model).unwrap().is_zero());
            let c = ExteriorForm::constant(form_ambient(&model), ScaledScalar::one());
            assert!(invariant_d(&c, &model).unwrap().is_zero());
        }
    }

    #[test]
    fn mu_in_three_dimensions() {
        let model = rh2();
        let kappa = contact_two_form(&model);
        let minus = mu_r(&model, Sign::Minus, Execution::Sequential).unwrap();
        let plus = mu_r(&model, Sign::Plus, Execution::Sequential).unwrap();
        assert_eq!(minus.form, kappa);
        assert_eq!(plus.form, kappa.scaled(&ScaledScalar::rational(int(-1))));
        let alpha = alpha_from_mu(&model, &minus);
        let d_alpha = invariant_d(&alpha, &model).unwrap();
        let target = minus.form.scaled(&ScaledScalar::i_over_two_pi());
        assert_eq!(d_alpha, target);
        for i in 1..3 {
            assert!(contract(&alpha, i).is_zero());
        }
    }

    #[test]
    fn mu_for_four_dimensional_real_model() {
        let model = build_model(Family::RealHyperbolic(4)).unwrap();
        let mu = mu_r(&model, Sign::Plus, Execution::Sequential).unwrap();
        assert_eq!(mu.root, Root::Alpha);
        assert_eq!(mu.lambda, int(-1));
        assert!(matches!(
            mu_r(&build_model(Family::RealHyperbolic(3)).unwrap(), Sign::Plus, Execution::Sequential),
            Err(FormError::OddDimension(3))
        ));
    }

    #[test]
    fn determinant_modes_agree() {
        let model = build_model(Family::ComplexHyperbolic(2)).unwrap();
        let m = omega_r(&model, Sign::Plus);
        assert_eq!(
            m.determinant(Execution::Sequential).unwrap(),
            m.determinant(Execution::Parallel).unwrap()
        );
    }

    #[test]
    fn dump_round_trip() {
        let model = rh2();
        let dump = contact_two_form(&model).dump();
        let json = serde_json::to_string(&dump).unwrap();
        let back: FormDump = serde_json::from_str(&json).unwrap();
        assert_eq!(back, dump);
        assert_eq!(back.terms[0].indices, vec![1, 2]);
    }
}
