//! Arithmetic in the tower GF(p) ⊆ GF(r) ⊆ GF(q) ⊆ GF(q²).
//!
//! Every element of every field in the tower is stored as an element of the
//! top field GF(q²). An element is encoded as the integer `Σ c_i p^i`, where
//! `c_i` are the coefficients of its polynomial representative modulo the
//! defining polynomial. So `0` and `1` encode themselves, and the prime field
//! GF(p) is exactly the encodings `0..p`.
//!
//! Multiplication, inversion and Frobenius powers go through discrete-log
//! tables. Addition is XOR in characteristic 2 and a Zech-logarithm lookup
//! otherwise. A subfield GF(p^d) is the set of elements fixed by `x ↦ x^(p^d)`,
//! i.e. zero together with the powers of `g^((q²-1)/(p^d-1))` for the table
//! generator `g`.
//!
//! Tables are limited to `q² ≤ 2^16` ([`MAX_FIELD_ORDER`]).

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported order of the top field GF(q²).
pub const MAX_FIELD_ORDER: u64 = 1 << 16;

const NO_LOG: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("degenerate tower: e = {e}, m = {m} (both must be at least 1)")]
    Degenerate { e: u32, m: u32 },
    #[error("field of order {p}^{degree} exceeds the table bound of {MAX_FIELD_ORDER} elements")]
    TooLarge { p: u32, degree: u32 },
    #[error("modulus must be monic of degree {expected} with coefficients below {p}")]
    BadModulus { expected: u32, p: u32 },
    #[error("modulus is not irreducible over GF({0})")]
    Reducible(u32),
    #[error("{0} is not the order of a subfield of this tower")]
    NotASubfield(u32),
    #[error("value {value} is not an element of GF({order})")]
    NotInField { value: u16, order: u32 },
    #[error("operands live in different fields: GF({0}) and GF({1})")]
    MixedFields(u32, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("basis elements are not linearly independent over GF({0})")]
    DependentBasis(u32),
    #[error("a basis of GF(q²) over GF({r}) needs {expected} elements, got {got}")]
    BasisSize { r: u32, expected: usize, got: usize },
}

/// The chain GF(p) ⊆ GF(r) ⊆ GF(q) ⊆ GF(q²) with `r = p^e`, `q = r^m`.
#[derive(Clone)]
pub struct Tower {
    p: u32,
    e: u32,
    m: u32,
    r: u32,
    q: u32,
    q2: u32,
    degree: u32,
    modulus: Vec<u32>,
    generator: u16,
    /// `exp[k] = g^k` for `0 ≤ k < 2(q²-1)`, doubled so sums of two logs index directly.
    exp: Vec<u16>,
    log: Vec<u32>,
    /// `zech[k] = log(1 + g^k)`, or `NO_LOG` when `1 + g^k = 0`. Empty for p = 2.
    zech: Vec<u32>,
    trace: Vec<u16>,
}

impl std::fmt::Debug for Tower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tower")
            .field("p", &self.p)
            .field("r", &self.r)
            .field("q", &self.q)
            .field("q2", &self.q2)
            .field("modulus", &self.modulus)
            .finish()
    }
}

/// A field element tagged with the order of the field it lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u16,
    order: u32,
}

impl FieldElement {
    pub fn value(self) -> u16 {
        self.value
    }

    pub fn order(self) -> u32 {
        self.order
    }
}

/// Serialized description of a tower, recorded next to every exported artifact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerInfo {
    pub characteristic: u32,
    pub r: u32,
    pub m: u32,
    pub q: u32,
    /// Coefficients of the defining polynomial of GF(q²) over GF(p), low to high.
    pub modulus: Vec<u32>,
}

impl Tower {
    /// Builds the tower for `r = p^e`, `q = r^m`, defining GF(q²) by the first
    /// primitive polynomial of degree `2me` in lexicographic order.
    pub fn new(p: u32, e: u32, m: u32) -> Result<Self, GfError> {
        let degree = check_sizes(p, e, m)?;
        let modulus = first_primitive(p, degree);
        Self::build(p, e, m, degree, modulus)
    }

    /// Builds the tower with an explicit defining polynomial (coefficients low
    /// to high, monic). The polynomial only needs to be irreducible; a
    /// generator of the multiplicative group is searched for.
    pub fn with_modulus(p: u32, e: u32, m: u32, modulus: &[u32]) -> Result<Self, GfError> {
        let degree = check_sizes(p, e, m)?;
        if modulus.len() != degree as usize + 1
            || modulus[degree as usize] != 1
            || modulus.iter().any(|&c| c >= p)
        {
            return Err(GfError::BadModulus {
                expected: degree,
                p,
            });
        }
        if !is_irreducible(p, modulus) {
            return Err(GfError::Reducible(p));
        }
        Self::build(p, e, m, degree, modulus.to_vec())
    }

    fn build(p: u32, e: u32, m: u32, degree: u32, modulus: Vec<u32>) -> Result<Self, GfError> {
        let r = p.pow(e);
        let q = r.pow(m);
        let q2 = q * q;
        let n = (q2 - 1) as usize;
        let poly = PolyRing {
            p,
            modulus: &modulus,
        };

        let generator = (1..q2)
            .find(|&g| poly.has_full_order(g, n as u64))
            .ok_or(GfError::Reducible(p))?;

        let mut exp = vec![0u16; 2 * n];
        let mut log = vec![NO_LOG; q2 as usize];
        let mut x = 1u32;
        for k in 0..n {
            if log[x as usize] != NO_LOG {
                // the generator check makes this unreachable for a valid modulus
                return Err(GfError::Reducible(p));
            }
            exp[k] = x as u16;
            exp[k + n] = x as u16;
            log[x as usize] = k as u32;
            x = poly.mul(x, generator);
        }

        let zech = if p == 2 {
            Vec::new()
        } else {
            (0..n)
                .map(|k| {
                    let s = poly.add(1, exp[k] as u32);
                    if s == 0 {
                        NO_LOG
                    } else {
                        log[s as usize]
                    }
                })
                .collect()
        };

        let mut tower = Tower {
            p,
            e,
            m,
            r,
            q,
            q2,
            degree,
            modulus,
            generator: generator as u16,
            exp,
            log,
            zech,
            trace: Vec::new(),
        };
        let h = 2 * m;
        tower.trace = (0..q2 as u16)
            .map(|a| {
                let mut acc = 0;
                let mut conj = a;
                for _ in 0..h {
                    acc = tower.add(acc, conj);
                    conj = tower.frobenius_r(conj);
                }
                acc
            })
            .collect();
        Ok(tower)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Exponent of `r` over `p`.
    pub fn e(&self) -> u32 {
        self.e
    }

    /// Tower exponent, `q = r^m`.
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn q2(&self) -> u32 {
        self.q2
    }

    /// Degree of GF(q²) over GF(r), `h = 2m`.
    pub fn h(&self) -> usize {
        2 * self.m as usize
    }

    /// Degree of GF(q²) over GF(p).
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> u16 {
        self.generator
    }

    pub fn info(&self) -> TowerInfo {
        TowerInfo {
            characteristic: self.p,
            r: self.r,
            m: self.m,
            q: self.q,
            modulus: self.modulus.clone(),
        }
    }

    fn group_order(&self) -> u32 {
        self.q2 - 1
    }

    // ---- raw arithmetic on encodings of GF(q²) ----

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        if self.p == 2 {
            return a ^ b;
        }
        if a == 0 {
            return b;
        }
        if b == 0 {
            return a;
        }
        let la = self.log[a as usize];
        let lb = self.log[b as usize];
        let d = if lb >= la {
            lb - la
        } else {
            lb + self.group_order() - la
        };
        match self.zech[d as usize] {
            NO_LOG => 0,
            z => self.exp[(la + z) as usize],
        }
    }

    #[inline]
    pub fn neg(&self, a: u16) -> u16 {
        if self.p == 2 || a == 0 {
            return a;
        }
        // -1 = g^((q²-1)/2) in odd characteristic
        self.exp[(self.log[a as usize] + self.group_order() / 2) as usize]
    }

    #[inline]
    pub fn sub(&self, a: u16, b: u16) -> u16 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    /// Multiplicative inverse. Panics on zero; see [`Tower::try_inv`].
    #[inline]
    pub fn inv(&self, a: u16) -> u16 {
        assert!(a != 0, "inverse of zero");
        let l = self.log[a as usize];
        self.exp[((self.group_order() - l) % self.group_order()) as usize]
    }

    pub fn pow(&self, a: u16, exponent: u128) -> u16 {
        if exponent == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = self.group_order() as u128;
        let l = self.log[a as usize] as u128 * (exponent % n) % n;
        self.exp[l as usize]
    }

    /// Discrete log with respect to [`Tower::generator`], `None` for zero.
    pub fn log(&self, a: u16) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    /// `g^k` for the table generator `g`.
    pub fn exp(&self, k: u64) -> u16 {
        self.exp[(k % self.group_order() as u64) as usize]
    }

    /// The `r`-th power map, a generator of Gal(GF(q²)/GF(r)).
    #[inline]
    pub fn frobenius_r(&self, a: u16) -> u16 {
        if a == 0 {
            return 0;
        }
        let n = self.group_order() as u64;
        self.exp[(self.log[a as usize] as u64 * self.r as u64 % n) as usize]
    }

    /// Relative trace `x + x^r + … + x^(r^(h-1))` from GF(q²) to GF(r).
    #[inline]
    pub fn trace_to_r(&self, a: u16) -> u16 {
        self.trace[a as usize]
    }

    /// The unique `α` with `α^(r^(h-1)) = β`.
    pub fn rth_root_preimage(&self, beta: u16) -> u16 {
        // x ↦ x^(r^(h-1)) is inverse to x ↦ x^r on GF(q²)
        self.frobenius_r(beta)
    }

    // ---- subfields ----

    /// Whether GF(`order`) is a subfield of GF(q²).
    pub fn is_subfield_order(&self, order: u32) -> bool {
        let mut size = self.p;
        for d in 1..=self.degree {
            if size == order {
                return self.degree.is_multiple_of(d);
            }
            size = size.saturating_mul(self.p);
        }
        false
    }

    /// Membership test for the subfield of the given order.
    #[inline]
    pub fn in_subfield(&self, a: u16, order: u32) -> bool {
        if a == 0 {
            return true;
        }
        let step = self.group_order() / (order - 1);
        self.log[a as usize].is_multiple_of(step)
    }

    /// Canonical listing of GF(`order`): `0, 1, ω, ω², …` with
    /// `ω = g^((q²-1)/(order-1))`.
    pub fn subfield_elements(&self, order: u32) -> Result<Vec<u16>, GfError> {
        if !self.is_subfield_order(order) {
            return Err(GfError::NotASubfield(order));
        }
        let step = (self.group_order() / (order - 1)) as usize;
        let mut elems = Vec::with_capacity(order as usize);
        elems.push(0);
        elems.extend((0..order as usize - 1).map(|k| self.exp[k * step]));
        Ok(elems)
    }

    // ---- typed, field-checked arithmetic ----

    pub fn element(&self, order: u32, value: u16) -> Result<FieldElement, GfError> {
        if !self.is_subfield_order(order) {
            return Err(GfError::NotASubfield(order));
        }
        if value as u32 >= self.q2 || !self.in_subfield(value, order) {
            return Err(GfError::NotInField { value, order });
        }
        Ok(FieldElement { value, order })
    }

    /// Views `a` as an element of the subfield of order `order`.
    pub fn restrict(&self, a: FieldElement, order: u32) -> Result<FieldElement, GfError> {
        self.element(order, a.value)
    }

    /// Embeds `a` into the top field GF(q²).
    pub fn embed(&self, a: FieldElement) -> FieldElement {
        FieldElement {
            value: a.value,
            order: self.q2,
        }
    }

    fn same_field(a: FieldElement, b: FieldElement) -> Result<u32, GfError> {
        if a.order != b.order {
            return Err(GfError::MixedFields(a.order, b.order));
        }
        Ok(a.order)
    }

    pub fn try_add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, GfError> {
        let order = Self::same_field(a, b)?;
        Ok(FieldElement {
            value: self.add(a.value, b.value),
            order,
        })
    }

    pub fn try_sub(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, GfError> {
        let order = Self::same_field(a, b)?;
        Ok(FieldElement {
            value: self.sub(a.value, b.value),
            order,
        })
    }

    pub fn try_mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, GfError> {
        let order = Self::same_field(a, b)?;
        Ok(FieldElement {
            value: self.mul(a.value, b.value),
            order,
        })
    }

    pub fn try_inv(&self, a: FieldElement) -> Result<FieldElement, GfError> {
        if a.value == 0 {
            return Err(GfError::DivisionByZero);
        }
        Ok(FieldElement {
            value: self.inv(a.value),
            order: a.order,
        })
    }

    pub fn negate(&self, a: FieldElement) -> FieldElement {
        FieldElement {
            value: self.neg(a.value),
            order: a.order,
        }
    }

    pub fn power(&self, a: FieldElement, exponent: u128) -> FieldElement {
        FieldElement {
            value: self.pow(a.value, exponent),
            order: a.order,
        }
    }

    /// Relative trace of an element of GF(q²), landing in GF(r).
    pub fn trace(&self, a: FieldElement) -> Result<FieldElement, GfError> {
        if a.order != self.q2 {
            return Err(GfError::MixedFields(a.order, self.q2));
        }
        Ok(FieldElement {
            value: self.trace_to_r(a.value),
            order: self.r,
        })
    }
}

/// A basis `b_0, …, b_(h-1)` of GF(q²) over GF(r), with a precomputed table of
/// coordinates for every element.
#[derive(Debug, Clone)]
pub struct RBasis {
    elements: Vec<u16>,
    h: usize,
    coords: Vec<u16>,
}

impl RBasis {
    /// The power basis `1, g, g², …, g^(h-1)` of the table generator.
    pub fn power(tower: &Tower) -> Self {
        let g = tower.generator();
        let elems: Vec<u16> = (0..tower.h() as u128).map(|t| tower.pow(g, t)).collect();
        Self::new(tower, &elems).expect("a primitive element has degree h over GF(r)")
    }

    /// A normal basis `γ, γ^r, …, γ^(r^(h-1))` for the first normal element `γ`
    /// in encoding order.
    pub fn normal(tower: &Tower) -> Self {
        (1..tower.q2() as u16)
            .find_map(|gamma| {
                let mut conj = Vec::with_capacity(tower.h());
                let mut x = gamma;
                for _ in 0..tower.h() {
                    conj.push(x);
                    x = tower.frobenius_r(x);
                }
                Self::new(tower, &conj).ok()
            })
            .expect("normal bases exist over finite fields")
    }

    /// Validates that `elements` form a GF(r)-basis and tabulates coordinates.
    pub fn new(tower: &Tower, elements: &[u16]) -> Result<Self, GfError> {
        let h = tower.h();
        if elements.len() != h {
            return Err(GfError::BasisSize {
                r: tower.r(),
                expected: h,
                got: elements.len(),
            });
        }
        let sub = tower.subfield_elements(tower.r())?;
        let r = sub.len();
        let q2 = tower.q2() as usize;
        let mut coords = vec![0u16; q2 * h];
        let mut seen = vec![false; q2];
        let mut digits = vec![0usize; h];
        for _ in 0..q2 {
            let value = digits
                .iter()
                .zip(elements)
                .fold(0u16, |acc, (&d, &b)| tower.add(acc, tower.mul(sub[d], b)));
            if seen[value as usize] {
                return Err(GfError::DependentBasis(tower.r()));
            }
            seen[value as usize] = true;
            for (t, &d) in digits.iter().enumerate() {
                coords[value as usize * h + t] = sub[d];
            }
            for d in digits.iter_mut() {
                *d += 1;
                if *d < r {
                    break;
                }
                *d = 0;
            }
        }
        Ok(RBasis {
            elements: elements.to_vec(),
            h,
            coords,
        })
    }

    pub fn elements(&self) -> &[u16] {
        &self.elements
    }

    /// Coordinates of `a` over GF(r), each an element of GF(r).
    #[inline]
    pub fn coords(&self, a: u16) -> &[u16] {
        &self.coords[a as usize * self.h..(a as usize + 1) * self.h]
    }

    /// `Σ c_t b_t`.
    pub fn combine(&self, tower: &Tower, coords: &[u16]) -> u16 {
        coords
            .iter()
            .zip(&self.elements)
            .fold(0, |acc, (&c, &b)| tower.add(acc, tower.mul(c, b)))
    }
}

fn check_sizes(p: u32, e: u32, m: u32) -> Result<u32, GfError> {
    if !is_prime(p) {
        return Err(GfError::NotPrime(p));
    }
    if e == 0 || m == 0 {
        return Err(GfError::Degenerate { e, m });
    }
    let degree = 2u64 * e as u64 * m as u64;
    let order = (p as u128).checked_pow(degree.min(128) as u32);
    match order {
        Some(o) if degree <= 64 && o <= MAX_FIELD_ORDER as u128 => Ok(degree as u32),
        _ => Err(GfError::TooLarge {
            p,
            degree: degree.min(u32::MAX as u64) as u32,
        }),
    }
}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Polynomials over GF(p) modulo a monic modulus, with elements packed as
/// base-p integers. Used only while building tables.
struct PolyRing<'a> {
    p: u32,
    modulus: &'a [u32],
}

impl PolyRing<'_> {
    fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    fn unpack(&self, mut a: u32) -> Vec<u32> {
        let mut v = vec![0; self.degree()];
        for c in v.iter_mut() {
            *c = a % self.p;
            a /= self.p;
        }
        v
    }

    fn pack(&self, v: &[u32]) -> u32 {
        v.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        let (a, b) = (self.unpack(a), self.unpack(b));
        let s: Vec<u32> = a.iter().zip(&b).map(|(x, y)| (x + y) % self.p).collect();
        self.pack(&s)
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        let d = self.degree();
        let p = self.p as u64;
        let (a, b) = (self.unpack(a), self.unpack(b));
        let mut prod = vec![0u64; 2 * d];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for k in (d..2 * d).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (t, &mcoef) in self.modulus[..d].iter().enumerate() {
                let idx = k - d + t;
                prod[idx] = (prod[idx] + (p - c) * mcoef as u64) % p;
            }
        }
        let out: Vec<u32> = prod[..d].iter().map(|&c| c as u32).collect();
        self.pack(&out)
    }

    fn pow(&self, a: u32, mut e: u64) -> u32 {
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

    fn has_full_order(&self, g: u32, n: u64) -> bool {
        self.pow(g, n) == 1 && prime_factors(n).iter().all(|&l| self.pow(g, n / l) != 1)
    }
}

fn first_primitive(p: u32, degree: u32) -> Vec<u32> {
    let n = (p as u64).pow(degree) - 1;
    let count = (p as u64).pow(degree);
    for low in 0..count {
        let mut modulus = Vec::with_capacity(degree as usize + 1);
        let mut rest = low;
        for _ in 0..degree {
            modulus.push((rest % p as u64) as u32);
            rest /= p as u64;
        }
        if modulus[0] == 0 {
            continue;
        }
        modulus.push(1);
        let ring = PolyRing {
            p,
            modulus: &modulus,
        };
        // z is encoded as p (or as 0·1 + 1·z); for degree 1 there is no z
        let z = if degree == 1 { (p - modulus[0]) % p } else { p };
        if z != 0 && ring.has_full_order(z, n) {
            return modulus;
        }
    }
    unreachable!("primitive polynomials exist in every degree")
}

/// Trial division by every monic polynomial of degree at most half the degree.
fn is_irreducible(p: u32, modulus: &[u32]) -> bool {
    let degree = modulus.len() - 1;
    if degree <= 1 {
        return true;
    }
    for d in 1..=degree / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut divisor = Vec::with_capacity(d + 1);
            let mut rest = low;
            for _ in 0..d {
                divisor.push((rest % p as u64) as u32);
                rest /= p as u64;
            }
            divisor.push(1);
            if poly_rem_is_zero(p, modulus, &divisor) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_is_zero(p: u32, a: &[u32], monic_divisor: &[u32]) -> bool {
    let p = p as u64;
    let mut rem: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let d = monic_divisor.len() - 1;
    for k in (d..rem.len()).rev() {
        let c = rem[k];
        if c == 0 {
            continue;
        }
        for (t, &dc) in monic_divisor.iter().enumerate() {
            let idx = k - d + t;
            rem[idx] = (rem[idx] + (p - c) * dc as u64) % p;
        }
    }
    rem[..d].iter().all(|&c| c == 0)
}
