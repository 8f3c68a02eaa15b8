//! 2x2 matrices over Z/NZ.

use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::arith::{crt, factorize, inv_mod};

/// Largest supported modulus. Entries are packed into 16-bit lanes.
pub const MAX_MODULUS: u32 = 1 << 15;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gl2Error {
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("matrix {0} is not invertible (det {1} mod {2})")]
    NotInvertible(String, u32, u32),
    #[error("moduli {0} and {1} are not coprime")]
    NonCoprimeModuli(u32, u32),
    #[error("{0} does not divide {1}")]
    NotADivisor(u32, u32),
    #[error("unsupported modulus {0}")]
    BadModulus(u64),
    #[error("cannot parse matrix literal {0:?}")]
    Parse(String),
}

/// A 2x2 matrix `[[a, b], [c, d]]` with entries reduced mod `modulus`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2 {
    modulus: u32,
    e: [u32; 4],
}

impl Mat2 {
    /// Builds a matrix from signed row-major entries, reducing them mod `n`.
    pub fn new(n: u64, entries: [i64; 4]) -> Result<Self, Gl2Error> {
        if n == 0 || n > MAX_MODULUS as u64 {
            return Err(Gl2Error::BadModulus(n));
        }
        let r = |x: i64| x.rem_euclid(n as i64) as u32;
        Ok(Mat2 {
            modulus: n as u32,
            e: [r(entries[0]), r(entries[1]), r(entries[2]), r(entries[3])],
        })
    }

    pub(crate) fn from_raw(n: u32, e: [u32; 4]) -> Self {
        debug_assert!(e.iter().all(|&x| x < n.max(1)));
        Mat2 { modulus: n, e }
    }

    pub fn identity(n: u64) -> Result<Self, Gl2Error> {
        Mat2::new(n, [1, 0, 0, 1])
    }

    pub fn minus_identity(n: u64) -> Result<Self, Gl2Error> {
        Mat2::new(n, [-1, 0, 0, -1])
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn entries(&self) -> [u32; 4] {
        self.e
    }

    /// Packs the four residues into one word; distinct matrices of one modulus get distinct keys.
    #[inline]
    pub fn key(&self) -> u64 {
        (self.e[0] as u64) | (self.e[1] as u64) << 16 | (self.e[2] as u64) << 32 | (self.e[3] as u64) << 48
    }

    #[inline]
    pub fn from_key(n: u32, k: u64) -> Self {
        let m = 0xffff;
        Mat2 {
            modulus: n,
            e: [
                (k & m) as u32,
                (k >> 16 & m) as u32,
                (k >> 32 & m) as u32,
                (k >> 48 & m) as u32,
            ],
        }
    }

    pub fn is_identity(&self) -> bool {
        let one = 1 % self.modulus;
        self.e == [one, 0, 0, one]
    }

    pub fn mul(&self, other: &Mat2) -> Result<Mat2, Gl2Error> {
        if self.modulus != other.modulus {
            return Err(Gl2Error::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(self.mul_same(other))
    }

    /// Product of two matrices already known to share a modulus.
    #[inline]
    pub(crate) fn mul_same(&self, o: &Mat2) -> Mat2 {
        debug_assert_eq!(self.modulus, o.modulus);
        let n = self.modulus as u64;
        let [a, b, c, d] = self.e.map(|x| x as u64);
        let [p, q, r, s] = o.e.map(|x| x as u64);
        Mat2 {
            modulus: self.modulus,
            e: [
                ((a * p + b * r) % n) as u32,
                ((a * q + b * s) % n) as u32,
                ((c * p + d * r) % n) as u32,
                ((c * q + d * s) % n) as u32,
            ],
        }
    }

    pub fn det(&self) -> u32 {
        let n = self.modulus as u64;
        let [a, b, c, d] = self.e.map(|x| x as u64);
        ((a * d % n + n - b * c % n) % n) as u32
    }

    pub fn trace(&self) -> u32 {
        ((self.e[0] as u64 + self.e[3] as u64) % self.modulus as u64) as u32
    }

    pub fn is_invertible(&self) -> bool {
        (self.det() as u64).gcd(&(self.modulus as u64)) == 1
    }

    pub fn inv(&self) -> Result<Mat2, Gl2Error> {
        let n = self.modulus as u64;
        let di = inv_mod(self.det() as u64, n)
            .ok_or_else(|| Gl2Error::NotInvertible(self.to_string(), self.det(), self.modulus))?;
        let [a, b, c, d] = self.e.map(|x| x as u64);
        let neg = |x: u64| (n - x % n) % n;
        Ok(Mat2 {
            modulus: self.modulus,
            e: [d * di % n, neg(b) * di % n, neg(c) * di % n, a * di % n].map(|x| x as u32),
        })
    }

    pub fn pow(&self, mut k: u64) -> Mat2 {
        let mut base = *self;
        let mut acc = Mat2::from_raw(self.modulus, [1 % self.modulus, 0, 0, 1 % self.modulus]);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_same(&base);
            }
            base = base.mul_same(&base);
            k >>= 1;
        }
        acc
    }

    /// Entrywise reduction to a divisor `m` of the modulus.
    pub fn reduce(&self, m: u64) -> Result<Mat2, Gl2Error> {
        if m == 0 || !(self.modulus as u64).is_multiple_of(m) {
            return Err(Gl2Error::NotADivisor(m as u32, self.modulus));
        }
        Ok(Mat2 {
            modulus: m as u32,
            e: self.e.map(|x| (x as u64 % m) as u32),
        })
    }

    /// The unique matrix mod MN reducing to `x` mod M and `y` mod N.
    pub fn crt_combine(x: &Mat2, y: &Mat2) -> Result<Mat2, Gl2Error> {
        let (m, n) = (x.modulus as u64, y.modulus as u64);
        if m.gcd(&n) != 1 {
            return Err(Gl2Error::NonCoprimeModuli(x.modulus, y.modulus));
        }
        if m * n > MAX_MODULUS as u64 {
            return Err(Gl2Error::BadModulus(m * n));
        }
        let e = std::array::from_fn(|i| crt(x.e[i] as u64, m, y.e[i] as u64, n).expect("coprime") as u32);
        Ok(Mat2 {
            modulus: (m * n) as u32,
            e,
        })
    }

    /// Canonical lift to a multiple `target` of the modulus.
    ///
    /// On each prime-power component of `target` the lift keeps the same residues
    /// where the modulus already sees that prime, and is the identity elsewhere.
    pub fn lift(&self, target: u64) -> Result<Mat2, Gl2Error> {
        let m = self.modulus as u64;
        if target == 0 || !target.is_multiple_of(m) {
            return Err(Gl2Error::NotADivisor(self.modulus, target as u32));
        }
        if target > MAX_MODULUS as u64 {
            return Err(Gl2Error::BadModulus(target));
        }
        if !self.is_invertible() {
            return Err(Gl2Error::NotInvertible(self.to_string(), self.det(), self.modulus));
        }
        let mut acc = Mat2::identity(1)?;
        for (p, a) in factorize(target) {
            let pa = p.pow(a);
            let part = if m.is_multiple_of(p) {
                let pb = m.gcd(&pa);
                let r = self.reduce(pb)?;
                Mat2::from_raw(pa as u32, r.e)
            } else {
                Mat2::identity(pa)?
            };
            acc = Mat2::crt_combine(&acc, &part)?;
        }
        Ok(acc)
    }

    /// Least k >= 1 with x^k = Id.
    pub fn order(&self) -> Result<u64, Gl2Error> {
        if !self.is_invertible() {
            return Err(Gl2Error::NotInvertible(self.to_string(), self.det(), self.modulus));
        }
        let mut k = 1;
        let mut y = *self;
        while !y.is_identity() {
            y = y.mul_same(self);
            k += 1;
        }
        Ok(k)
    }

    /// Parses a literal `[a,b,c,d]` and reduces it mod `n`.
    pub fn parse(s: &str, n: u64) -> Result<Mat2, Gl2Error> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| Gl2Error::Parse(s.to_string()))?;
        let vals: Vec<i64> = inner
            .split(',')
            .map(|v| v.trim().parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|_| Gl2Error::Parse(s.to_string()))?;
        let arr: [i64; 4] = vals.try_into().map_err(|_| Gl2Error::Parse(s.to_string()))?;
        Mat2::new(n, arr)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.e;
        write!(f, "[{a},{b},{c},{d}]")
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self, self.modulus)
    }
}
