//! Euler characteristics of compact duals and of their spaces of oriented
//! geodesics from Weyl group orders, and the three closed-form multiplicity
//! evaluators built on them.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::lie::Family;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EulerError {
    #[error("root system {0} has invalid rank")]
    InvalidRank(String),
    #[error("dimension {0} is odd")]
    OddDimension(u32),
    #[error("chi(X) chi(Y^d_geo) with chi(X) = {chi} is not a multiple of chi(Y^d) = {dual}")]
    NonDivisibleChi { chi: i64, dual: i64 },
    #[error("Betti numbers violate Poincare duality: b_{p} = {bp} but b_{q} = {bq}")]
    DualityViolation { p: usize, bp: u64, q: usize, bq: u64 },
    #[error("Betti vector of length {0} does not describe an odd-dimensional manifold")]
    WrongParity(usize),
    #[error("b_0 must be 1, got {0}")]
    NotConnected(u64),
    #[error("invalid family parameter: {0}")]
    InvalidFamily(String),
}

/// Compact simple factor by Cartan type, or a torus of the given rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootSystem {
    A(u32),
    B(u32),
    C(u32),
    D(u32),
    F4,
    Torus(u32),
}

impl RootSystem {
    pub fn rank(&self) -> u32 {
        match *self {
            RootSystem::A(n) | RootSystem::B(n) | RootSystem::C(n) | RootSystem::D(n) => n,
            RootSystem::F4 => 4,
            RootSystem::Torus(r) => r,
        }
    }
}

impl fmt::Display for RootSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootSystem::A(n) => write!(f, "A{n}"),
            RootSystem::B(n) => write!(f, "B{n}"),
            RootSystem::C(n) => write!(f, "C{n}"),
            RootSystem::D(n) => write!(f, "D{n}"),
            RootSystem::F4 => write!(f, "F4"),
            RootSystem::Torus(r) => write!(f, "T{r}"),
        }
    }
}

fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}

pub fn weyl_order(rs: RootSystem) -> Result<u128, EulerError> {
    if rs.rank() == 0 {
        return Err(EulerError::InvalidRank(rs.to_string()));
    }
    Ok(match rs {
        RootSystem::A(n) => factorial(n + 1),
        RootSystem::B(n) | RootSystem::C(n) => (1u128 << n) * factorial(n),
        RootSystem::D(n) => (1u128 << (n - 1)) * factorial(n),
        RootSystem::F4 => 1152,
        RootSystem::Torus(_) => 1,
    })
}

/// Compact group `G_c` and a closed subgroup `H`, as lists of factors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomogeneousSpace {
    pub group: Vec<RootSystem>,
    pub isotropy: Vec<RootSystem>,
}

impl HomogeneousSpace {
    fn new(group: Vec<RootSystem>, isotropy: Vec<RootSystem>) -> Self {
        HomogeneousSpace { group, isotropy }
    }

    /// `|W(G)| / |W(H)|` when the ranks agree, otherwise 0.
    pub fn euler_characteristic(&self) -> Result<i64, EulerError> {
        let rank = |f: &[RootSystem]| f.iter().map(RootSystem::rank).sum::<u32>();
        if rank(&self.group) != rank(&self.isotropy) {
            return Ok(0);
        }
        let order = |f: &[RootSystem]| -> Result<u128, EulerError> {
            f.iter().try_fold(1u128, |acc, r| Ok(acc * weyl_order(*r)?))
        };
        Ok((order(&self.group)? / order(&self.isotropy)?) as i64)
    }
}

fn checked(family: Family) -> Result<Family, EulerError> {
    match family {
        Family::RealHyperbolic(n) if n < 2 => Err(EulerError::InvalidFamily(family.to_string())),
        Family::ComplexHyperbolic(0) | Family::QuaternionicHyperbolic(0) => {
            Err(EulerError::InvalidFamily(family.to_string()))
        }
        _ => Ok(family),
    }
}

/// `Y^d = G_c / K_c`.
pub fn compact_dual(family: Family) -> Result<HomogeneousSpace, EulerError> {
    use RootSystem::*;
    Ok(match checked(family)? {
        Family::RealHyperbolic(d) if d % 2 == 0 => HomogeneousSpace::new(vec![B(d / 2)], vec![D(d / 2)]),
        Family::RealHyperbolic(d) => HomogeneousSpace::new(vec![D(d / 2 + 1)], vec![B(d / 2)]),
        Family::ComplexHyperbolic(1) => HomogeneousSpace::new(vec![A(1)], vec![Torus(1)]),
        Family::ComplexHyperbolic(n) => HomogeneousSpace::new(vec![A(n)], vec![Torus(1), A(n - 1)]),
        Family::QuaternionicHyperbolic(n) => HomogeneousSpace::new(vec![C(n + 1)], vec![C(n), C(1)]),
        Family::OctonionicHyperbolic => HomogeneousSpace::new(vec![F4], vec![B(4)]),
    })
}

/// `Y^d_geo = G_c / H_c`, the oriented closed geodesics of the compact dual.
pub fn geodesic_space(family: Family) -> Result<HomogeneousSpace, EulerError> {
    use RootSystem::*;
    let mut isotropy = match checked(family)? {
        Family::RealHyperbolic(d) if d % 2 == 0 => vec![Torus(1), B(d / 2 - 1)],
        Family::RealHyperbolic(d) => vec![Torus(1), D(d / 2)],
        Family::ComplexHyperbolic(n) => vec![Torus(2), A(n.saturating_sub(2))],
        Family::QuaternionicHyperbolic(n) => vec![Torus(1), C(1), C(n - 1)],
        Family::OctonionicHyperbolic => vec![Torus(1), B(3)],
    };
    // CH(1): the circle stabilizer has rank one.
    if family == Family::ComplexHyperbolic(1) {
        isotropy = vec![Torus(1)];
    }
    isotropy.retain(|r| r.rank() > 0);
    Ok(HomogeneousSpace::new(compact_dual(family)?.group, isotropy))
}

pub fn euler_char_dual(family: Family) -> Result<i64, EulerError> {
    compact_dual(family)?.euler_characteristic()
}

pub fn euler_char_geodesic_space(family: Family) -> Result<i64, EulerError> {
    geodesic_space(family)?.euler_characteristic()
}

/// `m₀ = χ(X) χ(Y^d_geo) / χ(Y^d)`.
pub fn multiplicity_thm2(family: Family, chi_x: i64) -> Result<i64, EulerError> {
    if family.dim() % 2 == 1 {
        return Err(EulerError::OddDimension(family.dim()));
    }
    let dual = euler_char_dual(family)?;
    let numerator = chi_x * euler_char_geodesic_space(family)?;
    if numerator % dual != 0 {
        return Err(EulerError::NonDivisibleChi { chi: chi_x, dual });
    }
    Ok(numerator / dual)
}

/// `m₀ = (d/2) χ(X)`.
pub fn multiplicity_cor1(d: u32, chi_x: i64) -> Result<i64, EulerError> {
    if d % 2 == 1 || d == 0 {
        return Err(EulerError::OddDimension(d));
    }
    Ok(d as i64 / 2 * chi_x)
}

/// Betti numbers `b_0, …, b_{2n+1}` of a closed odd-dimensional manifold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct BettiVector(Vec<u64>);

impl BettiVector {
    pub fn new(b: Vec<u64>) -> Result<Self, EulerError> {
        if b.is_empty() || b.len() % 2 == 1 {
            return Err(EulerError::WrongParity(b.len()));
        }
        if b[0] != 1 {
            return Err(EulerError::NotConnected(b[0]));
        }
        let top = b.len() - 1;
        for p in 0..=top / 2 {
            if b[p] != b[top - p] {
                return Err(EulerError::DualityViolation { p, bp: b[p], q: top - p, bq: b[top - p] });
            }
        }
        Ok(BettiVector(b))
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }
}

impl TryFrom<Vec<u64>> for BettiVector {
    type Error = EulerError;
    fn try_from(b: Vec<u64>) -> Result<Self, EulerError> {
        BettiVector::new(b)
    }
}

impl From<BettiVector> for Vec<u64> {
    fn from(b: BettiVector) -> Vec<u64> {
        b.0
    }
}

/// `2 Σ_{p=n+1}^{2n+1} (−1)^p (p − n) b_p` for `dim X = 2n + 1`.
///
/// The signed value is returned as is; whether a negative value is read as a
/// zero or a pole is a convention left to the caller.
pub fn multiplicity_thm3(betti: &BettiVector) -> i64 {
    let b = betti.as_slice();
    let n = (b.len() - 2) / 2;
    let sum: i64 = (n + 1..=2 * n + 1)
        .map(|p| {
            let sign = if p % 2 == 0 { 1 } else { -1 };
            sign * (p - n) as i64 * b[p] as i64
        })
        .sum();
    2 * sum
}

#[derive(Debug, Clone, Serialize)]
pub struct EulerRow {
    pub family: Family,
    pub d: u32,
    pub dual: String,
    pub chi_dual: i64,
    pub geodesic_space: String,
    pub chi_geodesic: i64,
    pub ratio: String,
    pub half_d: u32,
    pub consistent: bool,
}

fn describe(space: &HomogeneousSpace) -> String {
    let join = |f: &[RootSystem]| f.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("x");
    format!("{}/{}", join(&space.group), join(&space.isotropy))
}

/// Families listed in the Euler table.
pub fn table_families() -> Vec<Family> {
    let mut out: Vec<Family> = (1..=4).map(|m| Family::RealHyperbolic(2 * m)).collect();
    out.extend((1..=4).map(Family::ComplexHyperbolic));
    out.extend((1..=3).map(Family::QuaternionicHyperbolic));
    out.push(Family::OctonionicHyperbolic);
    out
}

pub fn euler_row(family: Family) -> Result<EulerRow, EulerError> {
    let dual = compact_dual(family)?;
    let geo = geodesic_space(family)?;
    let chi_dual = dual.euler_characteristic()?;
    let chi_geodesic = geo.euler_characteristic()?;
    let d = family.dim();
    let ratio = if chi_dual != 0 && chi_geodesic % chi_dual == 0 {
        (chi_geodesic / chi_dual).to_string()
    } else if chi_dual != 0 {
        format!("{chi_geodesic}/{chi_dual}")
    } else {
        "undefined".into()
    };
    Ok(EulerRow {
        family,
        d,
        dual: describe(&dual),
        chi_dual,
        geodesic_space: describe(&geo),
        chi_geodesic,
        ratio,
        half_d: d / 2,
        consistent: d.is_multiple_of(2) && chi_geodesic == (d / 2) as i64 * chi_dual,
    })
}

pub fn euler_table() -> Result<Vec<EulerRow>, EulerError> {
    table_families().into_iter().map(euler_row).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weyl_orders() {
        assert_eq!(weyl_order(RootSystem::A(2)).unwrap(), 6);
        assert_eq!(weyl_order(RootSystem::B(2)).unwrap(), 8);
        assert_eq!(weyl_order(RootSystem::C(3)).unwrap(), 48);
        assert_eq!(weyl_order(RootSystem::D(4)).unwrap(), 192);
        // degrees of F4 are 2, 6, 8, 12
        assert_eq!(weyl_order(RootSystem::F4).unwrap(), 2 * 6 * 8 * 12);
        assert!(weyl_order(RootSystem::A(0)).is_err());
    }

    #[test]
    fn duals() {
        for m in 1..5 {
            assert_eq!(euler_char_dual(Family::RealHyperbolic(2 * m)).unwrap(), 2);
            assert_eq!(euler_char_dual(Family::RealHyperbolic(2 * m + 1)).unwrap(), 0);
        }
        for n in 1..5 {
            assert_eq!(euler_char_dual(Family::ComplexHyperbolic(n)).unwrap(), n as i64 + 1);
            assert_eq!(euler_char_dual(Family::QuaternionicHyperbolic(n)).unwrap(), n as i64 + 1);
        }
        assert_eq!(euler_char_dual(Family::OctonionicHyperbolic).unwrap(), 3);
    }

    #[test]
    fn geodesic_spaces() {
        assert_eq!(euler_char_geodesic_space(Family::RealHyperbolic(4)).unwrap(), 4);
        assert_eq!(euler_char_geodesic_space(Family::ComplexHyperbolic(2)).unwrap(), 6);
        assert_eq!(euler_char_geodesic_space(Family::OctonionicHyperbolic).unwrap(), 24);
        assert_eq!(euler_char_geodesic_space(Family::ComplexHyperbolic(1)).unwrap(), 2);
    }

    #[test]
    fn theorem_two_and_corollary() {
        assert_eq!(multiplicity_thm2(Family::RealHyperbolic(2), -2).unwrap(), -2);
        assert_eq!(multiplicity_thm2(Family::ComplexHyperbolic(2), 6).unwrap(), 12);
        assert_eq!(multiplicity_thm2(Family::RealHyperbolic(4), -4).unwrap(), -8);
        assert_eq!(multiplicity_thm2(Family::ComplexHyperbolic(2), 4).unwrap(), 8);
        assert_eq!(multiplicity_cor1(2, -2).unwrap(), -2);
        assert_eq!(multiplicity_cor1(4, -4).unwrap(), -8);
        assert_eq!(multiplicity_cor1(16, 9).unwrap(), 72);
        assert!(multiplicity_cor1(3, 1).is_err());
    }

    #[test]
    fn theorem_three() {
        let eval = |b: &[u64]| multiplicity_thm3(&BettiVector::new(b.to_vec()).unwrap());
        assert_eq!(eval(&[1, 0, 0, 1]), -4);
        assert_eq!(eval(&[1, 2, 2, 1]), 0);
        assert_eq!(eval(&[1, 0, 0, 0, 0, 1]), -6);
        assert!(matches!(BettiVector::new(vec![1, 0, 1, 1]), Err(EulerError::DualityViolation { .. })));
        assert!(matches!(BettiVector::new(vec![1, 0, 1]), Err(EulerError::WrongParity(3))));
        assert!(matches!(BettiVector::new(vec![2, 0, 0, 2]), Err(EulerError::NotConnected(2))));
    }

    #[test]
    fn table_rows_are_consistent() {
        let rows = euler_table().unwrap();
        assert!(rows.iter().all(|r| r.consistent));
        let oct = rows.iter().find(|r| r.family == Family::OctonionicHyperbolic).unwrap();
        assert_eq!((oct.chi_dual, oct.chi_geodesic, oct.ratio.as_str()), (3, 24, "8"));
        let rh4 = rows.iter().find(|r| r.family == Family::RealHyperbolic(4)).unwrap();
        assert_eq!((rh4.chi_dual, rh4.chi_geodesic, rh4.ratio.as_str()), (2, 4, "2"));
    }
}
