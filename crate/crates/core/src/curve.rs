//! Elliptic curves over Q in long Weierstrass form with exact rational points.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("singular curve: discriminant is zero")]
    Singular,
    #[error("point {0} is not on the curve")]
    PointNotOnCurve(String),
    #[error("twist parameter must be nonzero")]
    ZeroTwist,
    #[error("curve is not in short form y^2 = x^3 + Ax + B")]
    NotShortForm,
    #[error("kernel point does not have order 2")]
    KernelNotOrder2,
    #[error("no decomposition with |A| <= {0}")]
    BoundExceeded(i64),
    #[error("decompositions have different lengths {0} and {1}")]
    BasisMismatch(usize, usize),
    #[error("cannot parse {0:?}")]
    Parse(String),
}

/// A rational point: the point at infinity or an affine pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Point {
    Infinity,
    Affine(Rat, Rat),
}

impl Point {
    pub fn from_ints(x: i64, y: i64) -> Point {
        Point::Affine(Rat::from_integer(x.into()), Rat::from_integer(y.into()))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn x(&self) -> Option<&Rat> {
        match self {
            Point::Infinity => None,
            Point::Affine(x, _) => Some(x),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Infinity => write!(f, "O"),
            Point::Affine(x, y) => write!(f, "({x},{y})"),
        }
    }
}

impl FromStr for Point {
    type Err = CurveError;

    /// Parses `(x,y)` with integer or `p/q` coordinates, or `O` for infinity.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "O" {
            return Ok(Point::Infinity);
        }
        let inner = t
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| CurveError::Parse(s.to_string()))?;
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 2 {
            return Err(CurveError::Parse(s.to_string()));
        }
        Ok(Point::Affine(parse_rat(parts[0])?, parse_rat(parts[1])?))
    }
}

/// Parses an integer or `p/q`.
pub fn parse_rat(s: &str) -> Result<Rat, CurveError> {
    s.trim().parse::<Rat>().map_err(|_| CurveError::Parse(s.to_string()))
}

fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over Q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EllipticCurve {
    pub a: [Rat; 5],
    pub label: Option<String>,
}

impl EllipticCurve {
    pub fn new(a: [Rat; 5]) -> Result<EllipticCurve, CurveError> {
        let e = EllipticCurve { a, label: None };
        if e.discriminant().is_zero() {
            return Err(CurveError::Singular);
        }
        Ok(e)
    }

    pub fn from_ints(a: [i64; 5]) -> Result<EllipticCurve, CurveError> {
        EllipticCurve::new(a.map(rat))
    }

    /// y^2 = x^3 + Ax + B.
    pub fn short(a: Rat, b: Rat) -> Result<EllipticCurve, CurveError> {
        EllipticCurve::new([Rat::zero(), Rat::zero(), Rat::zero(), a, b])
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn b2(&self) -> Rat {
        let [a1, a2, ..] = &self.a;
        a1 * a1 + rat(4) * a2
    }

    pub fn b4(&self) -> Rat {
        let [a1, _, a3, a4, _] = &self.a;
        a1 * a3 + rat(2) * a4
    }

    pub fn b6(&self) -> Rat {
        let [_, _, a3, _, a6] = &self.a;
        a3 * a3 + rat(4) * a6
    }

    pub fn b8(&self) -> Rat {
        let [a1, a2, a3, a4, a6] = &self.a;
        a1 * a1 * a6 + rat(4) * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    }

    pub fn c4(&self) -> Rat {
        let b2 = self.b2();
        &b2 * &b2 - rat(24) * self.b4()
    }

    pub fn c6(&self) -> Rat {
        let b2 = self.b2();
        -(&b2 * &b2 * &b2) + rat(36) * &b2 * self.b4() - rat(216) * self.b6()
    }

    pub fn discriminant(&self) -> Rat {
        let (b2, b4, b6, b8) = (self.b2(), self.b4(), self.b6(), self.b8());
        -(&b2 * &b2 * &b8) - rat(8) * &b4 * &b4 * &b4 - rat(27) * &b6 * &b6 + rat(9) * &b2 * &b4 * &b6
    }

    pub fn j_invariant(&self) -> Result<Rat, CurveError> {
        let d = self.discriminant();
        if d.is_zero() {
            return Err(CurveError::Singular);
        }
        let c4 = self.c4();
        Ok(&c4 * &c4 * &c4 / d)
    }

    pub fn is_short(&self) -> bool {
        self.a[0].is_zero() && self.a[1].is_zero() && self.a[2].is_zero()
    }

    /// (A, B) of a short-form curve.
    pub fn short_coefficients(&self) -> Result<(Rat, Rat), CurveError> {
        if !self.is_short() {
            return Err(CurveError::NotShortForm);
        }
        Ok((self.a[3].clone(), self.a[4].clone()))
    }

    /// The model y^2 = x^3 - c4/48 x - c6/864 reached by completing the square and cube.
    pub fn short_model(&self) -> EllipticCurve {
        if self.is_short() {
            return EllipticCurve {
                a: self.a.clone(),
                label: None,
            };
        }
        EllipticCurve {
            a: [
                Rat::zero(),
                Rat::zero(),
                Rat::zero(),
                -self.c4() / rat(48),
                -self.c6() / rat(864),
            ],
            label: None,
        }
    }

    /// Image of a point under the change of variables to `short_model`.
    pub fn to_short(&self, p: &Point) -> Point {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => {
                let [a1, _, a3, _, _] = &self.a;
                let xs = x + self.b2() / rat(12);
                let ys = y + (a1 * x + a3) / rat(2);
                Point::Affine(xs, ys)
            }
        }
    }

    /// Inverse of `to_short`.
    pub fn from_short(&self, p: &Point) -> Point {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(xs, ys) => {
                let [a1, _, a3, _, _] = &self.a;
                let x = xs - self.b2() / rat(12);
                let y = ys - (a1 * &x + a3) / rat(2);
                Point::Affine(x, y)
            }
        }
    }

    pub fn on_curve(&self, p: &Point) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine(x, y) => {
                let [a1, a2, a3, a4, a6] = &self.a;
                let lhs = y * y + a1 * x * y + a3 * y;
                let rhs = x * x * x + a2 * x * x + a4 * x + a6;
                lhs == rhs
            }
        }
    }

    fn check(&self, p: &Point) -> Result<(), CurveError> {
        if self.on_curve(p) {
            Ok(())
        } else {
            Err(CurveError::PointNotOnCurve(p.to_string()))
        }
    }

    pub fn neg(&self, p: &Point) -> Result<Point, CurveError> {
        self.check(p)?;
        Ok(match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => {
                let [a1, _, a3, _, _] = &self.a;
                Point::Affine(x.clone(), -y - a1 * x - a3)
            }
        })
    }

    /// Chord and tangent addition.
    pub fn add(&self, p: &Point, q: &Point) -> Result<Point, CurveError> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.add_unchecked(p, q))
    }

    fn add_unchecked(&self, p: &Point, q: &Point) -> Point {
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return q.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let [a1, a2, a3, a4, a6] = &self.a;
        let (lambda, nu) = if x1 == x2 {
            let denom = rat(2) * y1 + a1 * x1 + a3;
            if y1 + y2 + a1 * x2 + a3 == Rat::zero() || denom.is_zero() {
                return Point::Infinity;
            }
            let num = rat(3) * x1 * x1 + rat(2) * a2 * x1 + a4 - a1 * y1;
            let nu = (-(x1 * x1 * x1) + a4 * x1 + rat(2) * a6 - a3 * y1) / &denom;
            (num / denom, nu)
        } else {
            let lambda = (y2 - y1) / (x2 - x1);
            let nu = (y1 * x2 - y2 * x1) / (x2 - x1);
            (lambda, nu)
        };
        let x3 = &lambda * &lambda + a1 * &lambda - a2 - x1 - x2;
        let y3 = -(&lambda + a1) * &x3 - &nu - a3;
        Point::Affine(x3, y3)
    }

    /// k * P by double and add; negative k uses -P.
    pub fn mul(&self, k: i64, p: &Point) -> Result<Point, CurveError> {
        self.check(p)?;
        let base = if k < 0 { self.neg(p)? } else { p.clone() };
        let mut n = k.unsigned_abs();
        let mut acc = Point::Infinity;
        let mut pow = base;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add_unchecked(&acc, &pow);
            }
            pow = self.add_unchecked(&pow, &pow);
            n >>= 1;
        }
        Ok(acc)
    }

    /// Order of a torsion point, searching up to `bound`.
    pub fn point_order(&self, p: &Point, bound: u64) -> Result<Option<u64>, CurveError> {
        self.check(p)?;
        let mut acc = p.clone();
        for k in 1..=bound {
            if acc.is_infinity() {
                return Ok(Some(k));
            }
            acc = self.add_unchecked(&acc, p);
        }
        Ok(None)
    }

    /// y^2 = x^3 + d^2 A x + d^3 B for a short-form curve.
    pub fn quadratic_twist(&self, d: i64) -> Result<EllipticCurve, CurveError> {
        if d == 0 {
            return Err(CurveError::ZeroTwist);
        }
        let (a, b) = self.short_coefficients()?;
        let d = rat(d);
        EllipticCurve::short(&d * &d * a, &d * &d * &d * b)
    }
}

impl fmt::Display for EllipticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3, a4, a6] = &self.a;
        write!(f, "[{a1},{a2},{a3},{a4},{a6}]")
    }
}

impl FromStr for EllipticCurve {
    type Err = CurveError;

    /// Parses `[a1,a2,a3,a4,a6]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| CurveError::Parse(s.to_string()))?;
        let v = inner.split(',').map(parse_rat).collect::<Result<Vec<_>, _>>()?;
        let a: [Rat; 5] = v.try_into().map_err(|_| CurveError::Parse(s.to_string()))?;
        EllipticCurve::new(a)
    }
}

/// Rational torsion as invariant factors and generating points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Torsion {
    /// Invariant factors m1 | m2, empty for the trivial group.
    pub structure: Vec<u64>,
    pub generators: Vec<Point>,
    pub points: Vec<Point>,
}

/// Whether the invariant factors name one of the fifteen groups Z/M (M <= 10 or 12) and Z/2 x Z/2M (M <= 4).
pub fn mazur_validate(structure: &[u64]) -> bool {
    match structure {
        [] => true,
        [m] => (2..=10).contains(m) || *m == 12,
        [2, m] => matches!(m, 2 | 4 | 6 | 8),
        _ => false,
    }
}

/// Rational torsion by the Lutz-Nagell bound on y^2 = x^3 - 27 c4 x - 54 c6 after clearing denominators.
pub fn torsion_subgroup(e: &EllipticCurve) -> Torsion {
    let c4 = e.c4();
    let c6 = e.c6();
    // scale so that A = -27 c4 u^4 and B = -54 c6 u^6 are integers
    let mut u = BigInt::one();
    loop {
        let u_r = Rat::from_integer(u.clone());
        let u2 = &u_r * &u_r;
        let a = rat(-27) * &c4 * &u2 * &u2;
        let b = rat(-54) * &c6 * &u2 * &u2 * &u2;
        if a.is_integer() && b.is_integer() {
            let model = EllipticCurve::short(a.clone(), b.clone()).expect("isomorphic to a nonsingular curve");
            if reduction_bound(&model) == 1 {
                return torsion_structure(e, vec![Point::Infinity]);
            }
            let candidates = lutz_nagell(&a.to_integer(), &b.to_integer());
            let back = |p: &Point| -> Point {
                match p {
                    Point::Infinity => Point::Infinity,
                    Point::Affine(x, y) => {
                        // x = (36 x0 + 3 b2) u^2, y = 108 (2 y0 + a1 x0 + a3) u^3
                        let x0 = (x / &u2 - rat(3) * e.b2()) / rat(36);
                        let y_sum = y / (&u2 * &u_r) / rat(108);
                        let [a1, _, a3, _, _] = &e.a;
                        let y0 = (y_sum - a1 * &x0 - a3) / rat(2);
                        Point::Affine(x0, y0)
                    }
                }
            };
            let mut points = vec![Point::Infinity];
            for p in candidates {
                if model.point_order(&p, 12).expect("candidate on model").is_some() {
                    points.push(back(&p));
                }
            }
            return torsion_structure(e, points);
        }
        u *= lcm_denominators(&c4, &c6);
    }
}

fn lcm_denominators(c4: &Rat, c6: &Rat) -> BigInt {
    let l = c4.denom().lcm(c6.denom());
    if l.is_one() {
        BigInt::from(2)
    } else {
        l
    }
}

fn torsion_structure(e: &EllipticCurve, mut points: Vec<Point>) -> Torsion {
    points.sort_by_key(|p| p.to_string());
    let n = points.len() as u64;
    let order = |p: &Point| e.point_order(p, n).expect("on curve").expect("torsion");
    let two_torsion: Vec<&Point> = points.iter().filter(|p| !p.is_infinity() && order(p) == 2).collect();
    if n == 1 {
        return Torsion {
            structure: vec![],
            generators: vec![],
            points,
        };
    }
    if two_torsion.len() == 3 {
        let m = n / 2;
        let g = points
            .iter()
            .find(|p| order(p) == m)
            .expect("cyclic factor of order n/2")
            .clone();
        let span: Vec<Point> = (0..m as i64).map(|k| e.mul(k, &g).expect("on curve")).collect();
        let t = two_torsion
            .iter()
            .find(|p| !span.contains(p))
            .map(|p| (*p).clone())
            .expect("second factor");
        return Torsion {
            structure: vec![2, m],
            generators: vec![g, t],
            points,
        };
    }
    let g = points.iter().find(|p| order(p) == n).expect("cyclic torsion").clone();
    Torsion {
        structure: vec![n],
        generators: vec![g],
        points,
    }
}

/// Integral points with y = 0 or y^2 dividing 4A^3 + 27B^2.
fn lutz_nagell(a: &BigInt, b: &BigInt) -> Vec<Point> {
    let disc: BigInt = BigInt::from(4) * a * a * a + BigInt::from(27) * b * b;
    let mut ys = vec![BigInt::zero()];
    for d in square_divisor_roots(&disc.abs()) {
        ys.push(d.clone());
        ys.push(-d);
    }
    let mut out = Vec::new();
    for y in ys {
        let c = b - &y * &y;
        for x in integer_cubic_roots(a, &c) {
            let p = Point::Affine(Rat::from_integer(x), Rat::from_integer(y.clone()));
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

/// Number of good odd primes whose point counts bound the torsion order.
const REDUCTION_PRIMES: usize = 12;

/// gcd of #E(F_p) over good odd primes; the torsion order divides it.
fn reduction_bound(model: &EllipticCurve) -> u64 {
    let mut g = 0u64;
    let mut used = 0;
    for p in (3u64..).step_by(2).filter(|&p| is_small_prime(p)) {
        if let Some(ap) = frobenius_trace(model, p) {
            g = g.gcd(&((p as i64 + 1 - ap) as u64));
            used += 1;
            if used == REDUCTION_PRIMES || g == 1 {
                break;
            }
        }
    }
    g
}

fn is_small_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Largest trial divisor used when factoring discriminants.
const TRIAL_LIMIT: u32 = 1_000_000;

fn trial_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_LIMIT as usize;
        let mut sieve = vec![true; n + 1];
        let mut out = Vec::new();
        for i in 2..=n {
            if sieve[i] {
                out.push(i as u32);
                for j in (i * i..=n).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        out
    })
}

/// Positive d with d^2 dividing n.
fn square_divisor_roots(n: &BigInt) -> Vec<BigInt> {
    let mut rest = n.clone();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    for &p in trial_primes() {
        let pb = BigInt::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut e = 0;
        while (&rest % p).is_zero() {
            rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((pb, e));
        }
    }
    if rest > BigInt::one() {
        let r = rest.sqrt();
        if &r * &r == rest {
            factors.push((r, 2));
        } else {
            factors.push((rest, 1));
        }
    }
    let mut roots = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::new();
        for r in &roots {
            let mut pk = BigInt::one();
            for _ in 0..=e / 2 {
                next.push(r * &pk);
                pk *= &p;
            }
        }
        roots = next;
    }
    roots
}

/// Integer roots of x^3 + a x + c.
fn integer_cubic_roots(a: &BigInt, c: &BigInt) -> Vec<BigInt> {
    let f = |x: &BigInt| -> BigInt { x * x * x + a * x + c };
    let bound = BigInt::one() + a.abs().max(c.abs());
    // monotone pieces: critical points lie in (s, s + 1) up to sign when a < 0
    let pieces: Vec<(BigInt, BigInt, bool)> = if a.is_negative() {
        let s = (-a / BigInt::from(3)).sqrt();
        vec![
            (-bound.clone(), -&s - 1, true),
            (-s.clone(), s.clone(), false),
            (&s + 1, bound, true),
        ]
    } else {
        vec![(-bound.clone(), bound, true)]
    };
    let mut roots = Vec::new();
    for (mut lo, mut hi, increasing) in pieces {
        if lo > hi {
            continue;
        }
        while lo < hi {
            let mid: BigInt = (&lo + &hi).div_floor(&BigInt::from(2));
            let v = f(&mid);
            let right = if increasing { !v.is_negative() } else { !v.is_positive() };
            if right {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        if f(&lo).is_zero() && !roots.contains(&lo) {
            roots.push(lo);
        }
    }
    roots.sort();
    roots
}

/// Coefficients of a point in a Mordell-Weil basis: A for the free generator, then torsion coefficients.
pub fn mw_decompose(
    e: &EllipticCurve,
    p: &Point,
    free: &Point,
    torsion: &[Point],
    bound: i64,
) -> Result<Vec<i64>, CurveError> {
    e.check(p)?;
    e.check(free)?;
    let mut orders = Vec::new();
    for t in torsion {
        orders.push(
            e.point_order(t, 12)?
                .ok_or(CurveError::PointNotOnCurve(format!("{t} has infinite order")))? as i64,
        );
    }
    let mut tors: Vec<(Vec<i64>, Point)> = vec![(vec![], Point::Infinity)];
    for (t, &o) in torsion.iter().zip(&orders) {
        let mut next = Vec::new();
        for (c, q) in &tors {
            let mut acc = q.clone();
            for k in 0..o {
                let mut cc = c.clone();
                cc.push(k);
                next.push((cc, acc.clone()));
                acc = e.add(&acc, t)?;
            }
        }
        tors = next;
    }
    let mut pos = Point::Infinity;
    let mut neg = Point::Infinity;
    let minus_free = e.neg(free)?;
    for a in 0..=bound {
        for (sign, base) in [(1, &pos), (-1, &neg)] {
            if sign == -1 && a == 0 {
                continue;
            }
            for (c, q) in &tors {
                if e.add(base, q)? == *p {
                    let mut out = vec![sign * a];
                    out.extend(c);
                    return Ok(out);
                }
            }
        }
        pos = e.add(&pos, free)?;
        neg = e.add(&neg, &minus_free)?;
    }
    Err(CurveError::BoundExceeded(bound))
}

/// Whether two decompositions agree componentwise modulo 2.
pub fn translation_type(d1: &[i64], d2: &[i64]) -> Result<bool, CurveError> {
    if d1.len() != d2.len() {
        return Err(CurveError::BasisMismatch(d1.len(), d2.len()));
    }
    Ok(d1.iter().zip(d2).all(|(a, b)| (a - b).rem_euclid(2) == 0))
}

/// A degree-2 isogeny from `domain` to a short-form `codomain` with kernel {O, (kernel_x, 0)}
/// on the short model of the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isogeny2 {
    pub domain: EllipticCurve,
    pub codomain: EllipticCurve,
    pub kernel_x: Rat,
    pub t: Rat,
    pub w: Rat,
}

/// The isogeny with kernel generated by a point of order 2.
pub fn two_isogeny(e: &EllipticCurve, kernel: &Point) -> Result<Isogeny2, CurveError> {
    e.check(kernel)?;
    if kernel.is_infinity() || e.neg(kernel)? != *kernel {
        return Err(CurveError::KernelNotOrder2);
    }
    let short = e.short_model();
    let (a, b) = short.short_coefficients()?;
    let x0 = match e.to_short(kernel) {
        Point::Affine(x, y) if y.is_zero() => x,
        _ => return Err(CurveError::KernelNotOrder2),
    };
    let t = rat(3) * &x0 * &x0 + &a;
    let w = &x0 * &t;
    let codomain = EllipticCurve::short(a - rat(5) * &t, b - rat(7) * &w)?;
    Ok(Isogeny2 {
        domain: e.clone(),
        codomain,
        kernel_x: x0,
        t,
        w,
    })
}

impl Isogeny2 {
    /// (x, y) -> (x + t/(x - x0), y (1 - t/(x - x0)^2)) on the short model of the domain.
    pub fn eval(&self, p: &Point) -> Result<Point, CurveError> {
        self.domain.check(p)?;
        match self.domain.to_short(p) {
            Point::Infinity => Ok(Point::Infinity),
            Point::Affine(x, y) => {
                let d = &x - &self.kernel_x;
                if d.is_zero() {
                    return Ok(Point::Infinity);
                }
                let q = &self.t / &d;
                let y2 = y * (Rat::one() - &q / &d);
                Ok(Point::Affine(x + q, y2))
            }
        }
    }
}

/// (u, r) with x = u^2 x' + r, y = u^3 y' carrying short-form `c` onto short-form `target`, u > 0.
pub fn minimal_scaling_match(c: &EllipticCurve, target: &EllipticCurve) -> Option<(Rat, Rat)> {
    let (a, b) = c.short_coefficients().ok()?;
    let (at, bt) = target.short_coefficients().ok()?;
    if a.is_zero() != at.is_zero() || b.is_zero() != bt.is_zero() {
        return None;
    }
    let u2 = if a.is_zero() {
        rational_root(&(&b / &bt), 3)?
    } else if b.is_zero() {
        rational_root(&(&a / &at), 2)?
    } else {
        (&b * &at) / (&bt * &a)
    };
    let u = rational_root(&u2, 2)?;
    let u4 = &u2 * &u2;
    (a == &u4 * at && b == &u4 * &u2 * bt).then(|| (u, Rat::zero()))
}

/// Image of a point of `c` on `target` under the change of variables from `minimal_scaling_match`.
pub fn apply_scaling(p: &Point, u: &Rat, r: &Rat) -> Point {
    match p {
        Point::Infinity => Point::Infinity,
        Point::Affine(x, y) => {
            let u2 = u * u;
            Point::Affine((x - r) / &u2, y / (&u2 * u))
        }
    }
}

/// Positive rational k-th root, if it exists.
fn rational_root(q: &Rat, k: u32) -> Option<Rat> {
    if !q.is_positive() {
        return None;
    }
    let n = q.numer().nth_root(k);
    let d = q.denom().nth_root(k);
    let r = Rat::new(n, d);
    (num_traits::pow(r.clone(), k as usize) == *q).then_some(r)
}

/// a_p = p + 1 - #E(F_p) for an odd prime of good reduction of an integral model.
pub fn frobenius_trace(e: &EllipticCurve, p: u64) -> Option<i64> {
    if p < 3 || !e.a.iter().all(|c| c.is_integer()) {
        return None;
    }
    let pi = BigInt::from(p);
    let disc = e.discriminant().to_integer();
    if (disc % &pi).is_zero() {
        return None;
    }
    let m = |c: &Rat| -> i64 {
        let r = c.to_integer().mod_floor(&pi);
        i64::try_from(r).expect("reduced below p")
    };
    let [a1, a2, a3, a4, a6] = [m(&e.a[0]), m(&e.a[1]), m(&e.a[2]), m(&e.a[3]), m(&e.a[4])];
    let p = p as i64;
    let legendre = |v: i64| -> i64 {
        let v = v.rem_euclid(p);
        if v == 0 {
            return 0;
        }
        let mut acc = 1i64;
        let mut base = v;
        let mut k = (p - 1) / 2;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            k >>= 1;
        }
        if acc == 1 {
            1
        } else {
            -1
        }
    };
    let mut count = 1i64;
    for x in 0..p {
        let rhs = ((x * x % p * x + a2 * x % p * x + a4 * x + a6) % p + p) % p;
        let lin = (a1 * x + a3) % p;
        count += 1 + legendre(lin * lin + 4 * rhs);
    }
    Some(p + 1 - count)
}
