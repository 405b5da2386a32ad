//! Arithmetic in GF(p^ℓ).
//!
//! Elements are encoded as integers `0..q` by packing the coefficients of
//! their polynomial representative base `p`, lowest degree first. So in
//! GF(4) with modulus x²+x+1 the element α (= x) is `2` and α² = α+1 is `3`.
//! The encoding is canonical and is what every file format carries.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

/// Orders up to this size get full addition and multiplication tables.
const TABLE_LIMIT: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NonPrime(u32),
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("exponent must be at least 1")]
    ZeroExponent,
    #[error("modulus {0:?} is reducible over GF({1})")]
    ReduciblePolynomial(Vec<u32>, u32),
    #[error("modulus {0:?} is not a monic polynomial of degree {1} over GF({2})")]
    BadModulus(Vec<u32>, u32, u32),
    #[error("field order p^ell exceeds {MAX_ORDER}")]
    TooLarge,
    #[error("cannot parse field spec {0:?} (expected p, p^ell or q)")]
    Parse(String),
    #[error("GF({0}) does not embed in GF({1})")]
    NoEmbedding(u32, u32),
}

struct Tables {
    q: u32,
    add: Vec<u32>,
    mul: Vec<u32>,
    // log/exp are only populated for large non-prime fields
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

/// A finite field GF(p^ℓ) with a fixed irreducible modulus.
#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    ell: u32,
    modulus: Vec<u32>,
    tables: Arc<Tables>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}; {:?})", self.p, self.ell, self.modulus)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ell == 1 {
            write!(f, "GF({})", self.p)
        } else {
            write!(f, "GF({}^{})", self.p, self.ell)
        }
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.ell == other.ell && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^ell`, if it is a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while q % p != 0 {
        p += 1;
    }
    let mut rest = q;
    let mut ell = 0;
    while rest % p == 0 {
        rest /= p;
        ell += 1;
    }
    (rest == 1).then_some((p, ell))
}

// Polynomials over GF(p), coefficient vectors low-to-high with no trailing zeros.

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod_prime(a: u32, p: u32) -> u32 {
    // p is small; Fermat
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = inv_mod_prime(b[db], p);
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let c = (*r.last().unwrap() as u64 * lead_inv as u64 % p as u64) as u32;
        if c != 0 {
            for (i, &bi) in b.iter().enumerate() {
                let idx = dr - db + i;
                let sub = (c as u64 * bi as u64 % p as u64) as u32;
                r[idx] = (r[idx] + p - sub) % p;
            }
        }
        r.pop();
        r = poly_trim(r);
    }
    r
}

fn digits(mut a: u32, p: u32, ell: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(ell as usize);
    for _ in 0..ell {
        out.push(a % p);
        a /= p;
    }
    out
}

fn pack(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let deg = modulus.len() - 1;
    for d in 1..=deg / 2 {
        for low in 0..(p as u64).pow(d as u32) {
            let mut f = digits(low as u32, p, d as u32);
            f.push(1);
            if poly_rem(modulus, &f, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest irreducible monic polynomial of degree `ell`.
fn default_modulus(p: u32, ell: u32) -> Vec<u32> {
    if ell == 1 {
        return vec![0, 1];
    }
    for low in 0..(p as u64).pow(ell) {
        let mut f = digits(low as u32, p, ell);
        f.push(1);
        if f[0] != 0 && is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldSpec {
    /// Builds GF(p^ell). Without a modulus the smallest irreducible monic
    /// polynomial of degree `ell` is used.
    pub fn new(p: u32, ell: u32, modulus: Option<Vec<u32>>) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NonPrime(p));
        }
        if ell == 0 {
            return Err(FieldError::ZeroExponent);
        }
        let q = (p as u64).checked_pow(ell).filter(|&q| q <= MAX_ORDER as u64);
        let q = q.ok_or(FieldError::TooLarge)? as u32;
        let modulus = match modulus {
            None => default_modulus(p, ell),
            Some(m) => {
                if m.len() != ell as usize + 1 || m[ell as usize] != 1 || m.iter().any(|&c| c >= p) {
                    return Err(FieldError::BadModulus(m, ell, p));
                }
                if !is_irreducible(&m, p) {
                    return Err(FieldError::ReduciblePolynomial(m, p));
                }
                m
            }
        };
        let tables = Arc::new(build_tables(p, ell, q, &modulus));
        Ok(FieldSpec { p, ell, modulus, tables })
    }

    pub fn prime(p: u32) -> Result<Self, FieldError> {
        Self::new(p, 1, None)
    }

    /// GF(q) for a prime power `q`, default modulus.
    pub fn of_order(q: u32) -> Result<Self, FieldError> {
        let (p, ell) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        Self::new(p, ell, None)
    }

    /// Parses `"p"`, `"p^ell"` or a prime power `"q"`.
    pub fn parse(spec: &str) -> Result<Self, FieldError> {
        let bad = || FieldError::Parse(spec.to_string());
        let spec = spec.trim();
        if let Some((p, ell)) = spec.split_once('^') {
            let p: u32 = p.trim().parse().map_err(|_| bad())?;
            let ell: u32 = ell.trim().parse().map_err(|_| bad())?;
            Self::new(p, ell, None)
        } else {
            let q: u32 = spec.parse().map_err(|_| bad())?;
            Self::of_order(q)
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn q(&self) -> u32 {
        self.tables.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The class of `x`; a generator over the prime field.
    pub fn alpha(&self) -> u32 {
        if self.ell == 1 {
            // x ≡ 0 mod x; the prime field's "α" is not meaningful
            0
        } else {
            self.p
        }
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let t = &self.tables;
        if t.q <= TABLE_LIMIT {
            t.add[(a * t.q + b) as usize]
        } else if self.p == 2 {
            a ^ b
        } else if self.ell == 1 {
            (a + b) % self.p
        } else {
            let mut out = 0;
            let mut scale = 1;
            let (mut a, mut b) = (a, b);
            for _ in 0..self.ell {
                out += ((a % self.p + b % self.p) % self.p) * scale;
                a /= self.p;
                b /= self.p;
                scale *= self.p;
            }
            out
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.tables.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let t = &self.tables;
        if t.q <= TABLE_LIMIT {
            t.mul[(a * t.q + b) as usize]
        } else if a == 0 || b == 0 {
            0
        } else if self.ell == 1 {
            ((a as u64 * b as u64) % self.p as u64) as u32
        } else {
            let s = t.log[a as usize] + t.log[b as usize];
            t.exp[(s % (t.q - 1)) as usize]
        }
    }

    /// Multiplicative inverse. Panics on zero.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        self.tables.inv[a as usize]
    }

    #[inline]
    pub fn div(&self, a: u32, b: u32) -> u32 {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Elements in canonical order.
    pub fn elements(&self) -> std::ops::Range<u32> {
        0..self.q()
    }

    /// The extension GF(p^(ell·degree)) with its default modulus.
    pub fn extension(&self, degree: u32) -> Result<FieldSpec, FieldError> {
        FieldSpec::new(self.p, self.ell * degree, None)
    }

    /// Table mapping each element of `self` to its image in `big`. The map
    /// sends α to the smallest root of `self`'s modulus in `big`.
    pub fn embedding_into(&self, big: &FieldSpec) -> Result<Vec<u32>, FieldError> {
        if big.p != self.p || big.ell % self.ell != 0 {
            return Err(FieldError::NoEmbedding(self.q(), big.q()));
        }
        if self.ell == 1 {
            return Ok((0..self.q()).collect());
        }
        let eval = |x: u32| {
            self.modulus
                .iter()
                .rev()
                .fold(0u32, |acc, &c| big.add(big.mul(acc, x), c))
        };
        let root = big
            .elements()
            .find(|&x| eval(x) == 0)
            .ok_or(FieldError::NoEmbedding(self.q(), big.q()))?;
        let powers: Vec<u32> = (0..self.ell).map(|i| big.pow(root, i as u64)).collect();
        Ok(self
            .elements()
            .map(|a| {
                digits(a, self.p, self.ell)
                    .iter()
                    .zip(&powers)
                    .fold(0, |acc, (&c, &pw)| big.add(acc, big.mul(c, pw)))
            })
            .collect())
    }
}

fn poly_mul_mod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let mut prod = vec![0u32; a.len() + b.len()];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + ai as u64 * bj as u64) % p as u64) as u32;
        }
    }
    poly_rem(&poly_trim(prod), modulus, p)
}

fn build_tables(p: u32, ell: u32, q: u32, modulus: &[u32]) -> Tables {
    let neg: Vec<u32> = (0..q)
        .map(|a| {
            let d: Vec<u32> = digits(a, p, ell).iter().map(|&c| (p - c) % p).collect();
            pack(&d, p)
        })
        .collect();
    let mul_raw = |a: u32, b: u32| -> u32 {
        if ell == 1 {
            ((a as u64 * b as u64) % p as u64) as u32
        } else {
            let r = poly_mul_mod(&digits(a, p, ell), &digits(b, p, ell), modulus, p);
            pack(&r, p)
        }
    };
    let add_raw = |a: u32, b: u32| -> u32 {
        let da = digits(a, p, ell);
        let db = digits(b, p, ell);
        let d: Vec<u32> = da.iter().zip(&db).map(|(&x, &y)| (x + y) % p).collect();
        pack(&d, p)
    };
    let (mut add, mut mul) = (Vec::new(), Vec::new());
    let (mut exp, mut log) = (Vec::new(), Vec::new());
    let mut inv = vec![0u32; q as usize];
    if q <= TABLE_LIMIT {
        add = (0..q * q).map(|i| add_raw(i / q, i % q)).collect();
        mul = (0..q * q).map(|i| mul_raw(i / q, i % q)).collect();
        for a in 1..q {
            inv[a as usize] = (1..q).find(|&b| mul[(a * q + b) as usize] == 1).unwrap();
        }
    } else if ell == 1 {
        for a in 1..q {
            inv[a as usize] = inv_mod_prime(a, p);
        }
    } else {
        // find a primitive element and build log/exp
        let order = q - 1;
        let gen = (2..q)
            .find(|&g| {
                let mut x = 1;
                for k in 1..=order {
                    x = mul_raw(x, g);
                    if x == 1 {
                        return k == order;
                    }
                }
                false
            })
            .expect("multiplicative group is cyclic");
        exp = vec![0; order as usize];
        log = vec![0; q as usize];
        let mut x = 1;
        for k in 0..order {
            exp[k as usize] = x;
            log[x as usize] = k;
            x = mul_raw(x, gen);
        }
        for a in 1..q {
            let l = log[a as usize];
            inv[a as usize] = exp[((order - l) % order) as usize];
        }
    }
    Tables { q, add, mul, exp, log, neg, inv }
}

#[derive(Serialize, Deserialize)]
struct FieldRepr {
    p: u32,
    ell: u32,
    modulus: Vec<u32>,
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FieldRepr { p: self.p, ell: self.ell, modulus: self.modulus.clone() }.serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FieldInput {
    Order(u32),
    Text(String),
    Full {
        p: u32,
        #[serde(default = "one")]
        ell: u32,
        modulus: Option<Vec<u32>>,
    },
}

fn one() -> u32 {
    1
}

/// Accepts `{"p":2,"ell":2,"modulus":[1,1,1]}` (modulus optional), a field
/// order such as `4`, or a string such as `"2^2"`.
impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let f = match FieldInput::deserialize(d)? {
            FieldInput::Order(q) => FieldSpec::of_order(q),
            FieldInput::Text(s) => FieldSpec::parse(&s),
            FieldInput::Full { p, ell, modulus } => FieldSpec::new(p, ell, modulus),
        };
        f.map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_fields() {
        let f = FieldSpec::new(2, 1, None).unwrap();
        assert_eq!(f.q(), 2);
        assert_eq!(f.modulus(), &[0, 1]);
        let f3 = FieldSpec::prime(3).unwrap();
        assert_eq!(f3.q(), 3);
        assert_eq!(f3.add(2, 2), 1);
        assert_eq!(f3.mul(2, 2), 1);
        assert_eq!(f3.neg(1), 2);
    }

    #[test]
    fn gf4_alpha_squared() {
        let f = FieldSpec::new(2, 2, Some(vec![1, 1, 1])).unwrap();
        let a = f.alpha();
        assert_eq!(f.mul(a, a), f.add(a, 1));
        assert_eq!(FieldSpec::of_order(4).unwrap(), f);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(FieldSpec::new(4, 1, None).unwrap_err(), FieldError::NonPrime(4));
        assert!(matches!(
            FieldSpec::new(2, 2, Some(vec![1, 0, 1])),
            Err(FieldError::ReduciblePolynomial(..))
        ));
        assert!(matches!(FieldSpec::of_order(6), Err(FieldError::NotPrimePower(6))));
        assert!(matches!(FieldSpec::new(2, 17, None), Err(FieldError::TooLarge)));
    }

    #[test]
    fn default_moduli() {
        assert_eq!(FieldSpec::of_order(8).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(FieldSpec::of_order(9).unwrap().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(FieldSpec::parse("2^2").unwrap().q(), 4);
        assert_eq!(FieldSpec::parse("9").unwrap().ell(), 2);
        assert_eq!(FieldSpec::parse("5").unwrap().q(), 5);
        assert!(FieldSpec::parse("x").is_err());
    }

    #[test]
    fn field_axioms_small_and_large() {
        for q in [4u32, 9, 16, 27, 25, 512, 1024] {
            let f = FieldSpec::of_order(q).unwrap();
            let sample: Vec<u32> = (0..q).step_by((q as usize / 40).max(1)).collect();
            for &a in &sample {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1, "q={q} a={a}");
                }
                for &b in &sample {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in sample.iter().take(5) {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn embedding_is_a_homomorphism() {
        let small = FieldSpec::of_order(4).unwrap();
        let big = FieldSpec::of_order(16).unwrap();
        let map = small.embedding_into(&big).unwrap();
        for a in small.elements() {
            for b in small.elements() {
                assert_eq!(map[small.mul(a, b) as usize], big.mul(map[a as usize], map[b as usize]));
                assert_eq!(map[small.add(a, b) as usize], big.add(map[a as usize], map[b as usize]));
            }
        }
        assert!(small.embedding_into(&FieldSpec::of_order(8).unwrap()).is_err());
    }
}
