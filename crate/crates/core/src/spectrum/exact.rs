//! Exact arithmetic in `Q(√2)(β)` with `β² = 2 + 2√2`, enough to check the
//! built-in octagon generators symbolically.

use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::rational::{int, rat};

/// `p + q√2` with rational `p`, `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadSqrt2 {
    pub p: BigRational,
    pub q: BigRational,
}

impl QuadSqrt2 {
    pub fn new(p: BigRational, q: BigRational) -> Self {
        Self { p, q }
    }

    pub fn int(p: i64, q: i64) -> Self {
        Self { p: int(p), q: int(q) }
    }

    pub fn zero() -> Self {
        Self::int(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        crate::rational::to_f64(&self.p) + crate::rational::to_f64(&self.q) * std::f64::consts::SQRT_2
    }
}

impl Add for &QuadSqrt2 {
    type Output = QuadSqrt2;
    fn add(self, o: &QuadSqrt2) -> QuadSqrt2 {
        QuadSqrt2::new(&self.p + &o.p, &self.q + &o.q)
    }
}

impl Sub for &QuadSqrt2 {
    type Output = QuadSqrt2;
    fn sub(self, o: &QuadSqrt2) -> QuadSqrt2 {
        QuadSqrt2::new(&self.p - &o.p, &self.q - &o.q)
    }
}

impl Mul for &QuadSqrt2 {
    type Output = QuadSqrt2;
    fn mul(self, o: &QuadSqrt2) -> QuadSqrt2 {
        let two = int(2);
        QuadSqrt2::new(&self.p * &o.p + &two * &self.q * &o.q, &self.p * &o.q + &self.q * &o.p)
    }
}

impl Neg for &QuadSqrt2 {
    type Output = QuadSqrt2;
    fn neg(self) -> QuadSqrt2 {
        QuadSqrt2::new(-&self.p, -&self.q)
    }
}

/// `x + yβ` with `x, y ∈ Q(√2)` and `β² = 2 + 2√2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower {
    pub x: QuadSqrt2,
    pub y: QuadSqrt2,
}

impl Tower {
    pub fn new(x: QuadSqrt2, y: QuadSqrt2) -> Self {
        Self { x, y }
    }

    pub fn base(x: QuadSqrt2) -> Self {
        Self { x, y: QuadSqrt2::zero() }
    }

    pub fn zero() -> Self {
        Self::base(QuadSqrt2::zero())
    }

    pub fn one() -> Self {
        Self::base(QuadSqrt2::int(1, 0))
    }

    /// `β` scaled by `c`.
    pub fn beta(c: QuadSqrt2) -> Self {
        Self { x: QuadSqrt2::zero(), y: c }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.x.to_f64() + self.y.to_f64() * (2.0 + 2.0 * std::f64::consts::SQRT_2).sqrt()
    }

    fn beta_squared() -> QuadSqrt2 {
        QuadSqrt2::int(2, 2)
    }
}

impl Add for &Tower {
    type Output = Tower;
    fn add(self, o: &Tower) -> Tower {
        Tower::new(&self.x + &o.x, &self.y + &o.y)
    }
}

impl Sub for &Tower {
    type Output = Tower;
    fn sub(self, o: &Tower) -> Tower {
        Tower::new(&self.x - &o.x, &self.y - &o.y)
    }
}

impl Mul for &Tower {
    type Output = Tower;
    fn mul(self, o: &Tower) -> Tower {
        let yy = &(&self.y * &o.y) * &Tower::beta_squared();
        Tower::new(&(&self.x * &o.x) + &yy, &(&self.x * &o.y) + &(&self.y * &o.x))
    }
}

impl Neg for &Tower {
    type Output = Tower;
    fn neg(self) -> Tower {
        Tower::new(-&self.x, -&self.y)
    }
}

/// Row-major exact 2×2 matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix(pub [Tower; 4]);

impl ExactMatrix {
    pub fn identity() -> Self {
        Self([Tower::one(), Tower::zero(), Tower::zero(), Tower::one()])
    }

    pub fn mul(&self, o: &ExactMatrix) -> ExactMatrix {
        let [a, b, c, d] = &self.0;
        let [e, f, g, h] = &o.0;
        ExactMatrix([&(a * e) + &(b * g), &(a * f) + &(b * h), &(c * e) + &(d * g), &(c * f) + &(d * h)])
    }

    pub fn det(&self) -> Tower {
        let [a, b, c, d] = &self.0;
        &(a * d) - &(b * c)
    }

    pub fn trace(&self) -> Tower {
        &self.0[0] + &self.0[3]
    }

    /// Inverse of a determinant-one matrix.
    pub fn adjugate(&self) -> ExactMatrix {
        let [a, b, c, d] = &self.0;
        ExactMatrix([d.clone(), -b, -c, a.clone()])
    }

    pub fn to_f64(&self) -> [f64; 4] {
        [self.0[0].to_f64(), self.0[1].to_f64(), self.0[2].to_f64(), self.0[3].to_f64()]
    }
}

/// `sin(kπ/4)` and `cos(kπ/4)` as elements of `Q(√2)`.
pub fn octant_sin_cos(k: i64) -> (QuadSqrt2, QuadSqrt2) {
    let half = || rat(1, 2);
    let z = || BigRational::zero();
    let one = || BigRational::one();
    let table = [
        (QuadSqrt2::new(z(), z()), QuadSqrt2::new(one(), z())),
        (QuadSqrt2::new(z(), half()), QuadSqrt2::new(z(), half())),
        (QuadSqrt2::new(one(), z()), QuadSqrt2::new(z(), z())),
        (QuadSqrt2::new(z(), half()), QuadSqrt2::new(z(), -half())),
    ];
    let k = k.rem_euclid(8) as usize;
    let (s, c) = table[k % 4].clone();
    if k >= 4 { (-&s, -&c) } else { (s, c) }
}

/// `T_k = R_{kπ/8} T₀ R_{-kπ/8}` in closed form:
/// `[[A + B sin(kπ/4), B cos(kπ/4)], [B cos(kπ/4), A − B sin(kπ/4)]]`
/// with `A = 1 + √2` and `B = β`.
pub fn octagon_translation(k: i64) -> ExactMatrix {
    let a = Tower::base(QuadSqrt2::int(1, 1));
    let (s, c) = octant_sin_cos(k);
    let bs = Tower::beta(s);
    let bc = Tower::beta(c);
    ExactMatrix([&a + &bs, bc.clone(), bc, &a - &bs])
}
