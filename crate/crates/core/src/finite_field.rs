//! Arithmetic in small finite fields F_{p^m} = F_p[x]/(modulus).
//!
//! Elements carry an `Arc` to their field so that mixed-field arithmetic is
//! caught at runtime. All fields used here are tiny (p^m ≤ 3^8), so discrete
//! logarithms and embeddings are found by scanning.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, PartialEq, Eq)]
pub struct FqConfig {
    p: u32,
    m: usize,
    /// Low-to-high coefficients, length m + 1, monic.
    modulus: Vec<u32>,
}

pub type Fq = Arc<FqConfig>;

/// Conway polynomials, so that the class of x generates the unit group.
const DEFAULT_MODULI: &[(u32, usize, &[u32])] = &[
    (2, 1, &[1, 1]),
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (3, 1, &[1, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (3, 4, &[2, 0, 0, 2, 1]),
    (5, 1, &[3, 1]),
    (5, 2, &[2, 4, 1]),
    (7, 1, &[4, 1]),
    (7, 2, &[3, 6, 1]),
];

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
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

/// Build F_{p^m}. Without a modulus, the table above is used, falling back to
/// the first primitive irreducible polynomial in lexicographic order.
pub fn field_create(p: u32, m: usize, modulus: Option<&[u32]>) -> Result<Fq> {
    if !is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    if m == 0 {
        return Err(Error::InvalidModulus { m });
    }
    let modulus = match modulus {
        Some(poly) => {
            let poly: Vec<u32> = poly.iter().map(|&c| c % p).collect();
            if poly.len() != m + 1 || poly[m] != 1 {
                return Err(Error::InvalidModulus { m });
            }
            if !poly_irreducible(&poly, p) {
                return Err(Error::ReducibleModulus { p });
            }
            poly
        }
        None => match DEFAULT_MODULI.iter().find(|(q, k, _)| *q == p && *k == m) {
            Some((_, _, poly)) => poly.to_vec(),
            None => first_primitive(p, m),
        },
    };
    Ok(Arc::new(FqConfig { p, m, modulus }))
}

fn first_primitive(p: u32, m: usize) -> Vec<u32> {
    let count = (p as u64).pow(m as u32);
    for idx in 0..count {
        let mut poly = digits(idx, p, m);
        poly.push(1);
        if !poly_irreducible(&poly, p) {
            continue;
        }
        let field = Arc::new(FqConfig { p, m, modulus: poly.clone() });
        if FqElem::x(&field).is_generator() {
            return poly;
        }
    }
    unreachable!("every finite field has a primitive polynomial")
}

fn digits(mut n: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((n % p as u64) as u32);
        n /= p as u64;
    }
    out
}

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

/// Remainder of `a` modulo the monic polynomial `b` over F_p.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    while r.len() > db {
        let lead = r[r.len() - 1];
        let shift = r.len() - 1 - db;
        for (i, &bc) in b.iter().enumerate() {
            let idx = shift + i;
            r[idx] = (r[idx] + p - (lead as u64 * bc as u64 % p as u64) as u32) % p;
        }
        poly_trim(&mut r);
    }
    r
}

/// Trial division by every monic polynomial of degree ≤ deg/2.
fn poly_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        for idx in 0..(p as u64).pow(d as u32) {
            let mut g = digits(idx, p, d);
            g.push(1);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl FqConfig {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn size(&self) -> u64 {
        (self.p as u64).pow(self.m as u32)
    }
}

#[derive(Clone)]
pub struct FqElem {
    field: Fq,
    c: Vec<u32>,
}

impl PartialEq for FqElem {
    fn eq(&self, other: &Self) -> bool {
        self.c == other.c && (Arc::ptr_eq(&self.field, &other.field) || self.field == other.field)
    }
}

impl Eq for FqElem {}

impl Hash for FqElem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.c.hash(state);
    }
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Polynomial form in the generator, e.g. `2a+1`.
impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms = Vec::new();
        for (i, &c) in self.c.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coef = if c == 1 && i > 0 { String::new() } else { c.to_string() };
            terms.push(match i {
                0 => coef,
                1 => format!("{coef}a"),
                _ => format!("{coef}a^{i}"),
            });
        }
        write!(f, "{}", terms.join("+"))
    }
}

impl Serialize for FqElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FqElem", 3)?;
        st.serialize_field("p", &self.field.p)?;
        st.serialize_field("m", &self.field.m)?;
        st.serialize_field("coeffs", &self.c)?;
        st.end()
    }
}

impl FqElem {
    pub fn zero(field: &Fq) -> Self {
        FqElem { field: field.clone(), c: vec![0; field.m] }
    }

    pub fn one(field: &Fq) -> Self {
        Self::from_int(field, 1)
    }

    pub fn from_int(field: &Fq, n: i64) -> Self {
        let mut e = Self::zero(field);
        e.c[0] = n.rem_euclid(field.p as i64) as u32;
        e
    }

    pub fn from_coeffs(field: &Fq, coeffs: &[u32]) -> Self {
        let p = field.p;
        let reduced = poly_rem(&coeffs.iter().map(|&c| c % p).collect::<Vec<_>>(), &field.modulus, p);
        let mut c = vec![0; field.m];
        c[..reduced.len()].copy_from_slice(&reduced);
        FqElem { field: field.clone(), c }
    }

    /// The class of x. For m = 1 this is the root of the linear modulus.
    pub fn x(field: &Fq) -> Self {
        if field.m == 1 {
            Self::from_int(field, -(field.modulus[0] as i64))
        } else {
            Self::from_coeffs(field, &[0, 1])
        }
    }

    /// The distinguished generator α (the class of x for the default moduli).
    pub fn gen(field: &Fq) -> Self {
        Self::x(field)
    }

    pub fn from_index(field: &Fq, idx: u64) -> Self {
        FqElem { field: field.clone(), c: digits(idx, field.p, field.m) }
    }

    /// Base-p encoding of the coefficient vector.
    pub fn index(&self) -> u64 {
        self.c.iter().rev().fold(0u64, |acc, &c| acc * self.field.p as u64 + c as u64)
    }

    pub fn elements(field: &Fq) -> impl Iterator<Item = FqElem> + '_ {
        (0..field.size()).map(move |i| FqElem::from_index(field, i))
    }

    /// F_p-basis 1, x, ..., x^{m-1}.
    pub fn basis(field: &Fq) -> Vec<FqElem> {
        (0..field.m)
            .map(|i| {
                let mut e = FqElem::zero(field);
                e.c[i] = 1;
                e
            })
            .collect()
    }

    pub fn field(&self) -> &Fq {
        &self.field
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.c[0] == 1 && self.c[1..].iter().all(|&c| c == 0)
    }

    /// Some(c) when the element lies in F_p.
    pub fn as_prime(&self) -> Option<u32> {
        if self.c[1..].iter().all(|&c| c == 0) {
            Some(self.c[0])
        } else {
            None
        }
    }

    fn same_field(&self, other: &FqElem) {
        assert!(Arc::ptr_eq(&self.field, &other.field) || self.field == other.field, "mixed-field arithmetic");
    }

    pub fn scale(&self, k: u32) -> FqElem {
        let p = self.field.p as u64;
        FqElem { field: self.field.clone(), c: self.c.iter().map(|&c| (c as u64 * k as u64 % p) as u32).collect() }
    }

    fn mul_ref(&self, other: &FqElem) -> FqElem {
        self.same_field(other);
        let p = self.field.p as u64;
        let m = self.field.m;
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.c.iter().enumerate() {
                prod[i + j] += a as u64 * b as u64;
            }
        }
        for v in prod.iter_mut() {
            *v %= p;
        }
        let md = &self.field.modulus;
        for k in (m..prod.len()).rev() {
            let lead = prod[k];
            if lead == 0 {
                continue;
            }
            for i in 0..m {
                prod[k - m + i] = (prod[k - m + i] + (p - lead) * md[i] as u64) % p;
            }
            prod[k] = 0;
        }
        FqElem { field: self.field.clone(), c: prod[..m].iter().map(|&v| v as u32).collect() }
    }

    pub fn pow(&self, mut e: u64) -> FqElem {
        let mut base = self.clone();
        let mut acc = FqElem::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            base = base.mul_ref(&base);
            e >>= 1;
        }
        acc
    }

    /// Power with a possibly negative exponent, reduced mod q - 1.
    pub fn powi(&self, e: i64) -> Result<FqElem> {
        if self.is_zero() {
            return if e > 0 { Ok(self.clone()) } else { Err(Error::ZeroInput) };
        }
        let order = self.field.size() as i64 - 1;
        Ok(self.pow(e.rem_euclid(order) as u64))
    }

    pub fn inv(&self) -> Result<FqElem> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        Ok(self.pow(self.field.size() - 2))
    }

    pub fn div(&self, other: &FqElem) -> Result<FqElem> {
        Ok(self.mul_ref(&other.inv()?))
    }

    /// x^(p^k); k may exceed m.
    pub fn frobenius(&self, k: usize) -> FqElem {
        let m = self.field.m;
        let k = k % m;
        let mut out = self.clone();
        for _ in 0..k {
            out = out.pow(self.field.p as u64);
        }
        out
    }

    /// Unique p-th root.
    pub fn pth_root(&self) -> FqElem {
        self.frobenius(self.field.m - 1)
    }

    pub fn trace_to_prime(&self) -> u32 {
        let mut acc = self.clone();
        let mut conj = self.clone();
        for _ in 1..self.field.m {
            conj = conj.frobenius(1);
            acc = &acc + &conj;
        }
        acc.c[0]
    }

    pub fn norm_to_prime(&self) -> u32 {
        let q = self.field.size();
        self.pow((q - 1) / (self.field.p as u64 - 1)).c[0]
    }

    pub fn is_square(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        if self.field.p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        Ok(self.pow((self.field.size() - 1) / 2).is_one())
    }

    pub fn order(&self) -> Result<u64> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        let mut n = self.field.size() - 1;
        for r in prime_factors(n) {
            while n % r == 0 && self.pow(n / r).is_one() {
                n /= r;
            }
        }
        Ok(n)
    }

    pub fn is_generator(&self) -> bool {
        self.order().map(|o| o == self.field.size() - 1).unwrap_or(false)
    }

    /// Least k ≥ 0 with base^k = self.
    pub fn dlog(&self, base: &FqElem) -> Result<u64> {
        self.same_field(base);
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        if !base.is_generator() {
            return Err(Error::NotGenerator);
        }
        let mut acc = FqElem::one(&self.field);
        for k in 0..self.field.size() - 1 {
            if &acc == self {
                return Ok(k);
            }
            acc = acc.mul_ref(base);
        }
        unreachable!("a generator reaches every unit")
    }

    /// `0` or `a^k` in terms of the distinguished generator.
    pub fn power_string(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let k = self.dlog(&FqElem::gen(&self.field)).expect("default generator is primitive");
        format!("a^{k}")
    }

    /// Accepts integers, `a`, `a^k`, optionally negated, and sums such as `2a+1`.
    pub fn parse(field: &Fq, s: &str) -> Result<FqElem> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse(s));
        }
        let bad = || Error::Parse(s.clone());
        let gen = FqElem::gen(field);
        let mut total = FqElem::zero(field);
        let mut rest = s.as_str();
        while !rest.is_empty() {
            let (neg, body) = match rest.as_bytes()[0] {
                b'-' => (true, &rest[1..]),
                b'+' => (false, &rest[1..]),
                _ => (false, rest),
            };
            let end = body.find(['+', '-']).unwrap_or(body.len());
            let term = &body[..end];
            rest = &body[end..];
            let value = if let Some(pos) = term.find(['a', 'α']) {
                let coef: i64 = if pos == 0 { 1 } else { term[..pos].parse().map_err(|_| bad())? };
                let tail = &term[pos + term[pos..].chars().next().unwrap().len_utf8()..];
                let exp: i64 = if tail.is_empty() {
                    1
                } else {
                    tail.strip_prefix('^').ok_or_else(bad)?.parse().map_err(|_| bad())?
                };
                FqElem::from_int(field, coef).mul_ref(&gen.powi(exp)?)
            } else {
                FqElem::from_int(field, term.parse().map_err(|_| bad())?)
            };
            total = if neg { &total - &value } else { &total + &value };
        }
        Ok(total)
    }
}

impl<'a> Add<&'a FqElem> for &'a FqElem {
    type Output = FqElem;
    fn add(self, o: &FqElem) -> FqElem {
        self.same_field(o);
        let p = self.field.p;
        FqElem { field: self.field.clone(), c: self.c.iter().zip(&o.c).map(|(&a, &b)| (a + b) % p).collect() }
    }
}

impl<'a> Sub<&'a FqElem> for &'a FqElem {
    type Output = FqElem;
    fn sub(self, o: &FqElem) -> FqElem {
        self.same_field(o);
        let p = self.field.p;
        FqElem { field: self.field.clone(), c: self.c.iter().zip(&o.c).map(|(&a, &b)| (a + p - b) % p).collect() }
    }
}

impl<'a> Mul<&'a FqElem> for &'a FqElem {
    type Output = FqElem;
    fn mul(self, o: &FqElem) -> FqElem {
        self.mul_ref(o)
    }
}

impl Neg for &FqElem {
    type Output = FqElem;
    fn neg(self) -> FqElem {
        let p = self.field.p;
        FqElem { field: self.field.clone(), c: self.c.iter().map(|&a| (p - a) % p).collect() }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr<FqElem> for FqElem {
            type Output = FqElem;
            fn $f(self, o: FqElem) -> FqElem {
                (&self).$f(&o)
            }
        }
        impl<'a> $tr<&'a FqElem> for FqElem {
            type Output = FqElem;
            fn $f(self, o: &FqElem) -> FqElem {
                (&self).$f(o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for FqElem {
    type Output = FqElem;
    fn neg(self) -> FqElem {
        -&self
    }
}

/// A field embedding F_{p^m} → F_{p^n}, m | n, fixed by the image of x.
#[derive(Clone, Debug)]
pub struct Embedding {
    src: Fq,
    dst: Fq,
    image_of_x: FqElem,
    inverse: Arc<HashMap<u64, u64>>,
}

impl Embedding {
    /// Sends x to the root of the source modulus with least discrete log.
    pub fn new(src: &Fq, dst: &Fq) -> Result<Embedding> {
        if src.p != dst.p || dst.m % src.m != 0 {
            return Err(Error::FieldMismatch);
        }
        let g = FqElem::gen(dst);
        let step = (dst.size() - 1) / (src.size() - 1);
        let sub_gen = g.pow(step);
        let mut image = None;
        let mut cand = FqElem::one(dst);
        for _ in 0..src.size() - 1 {
            let val = src
                .modulus
                .iter()
                .rev()
                .fold(FqElem::zero(dst), |acc, &c| acc.mul_ref(&cand) + FqElem::from_int(dst, c as i64));
            if val.is_zero() {
                image = Some(cand.clone());
                break;
            }
            cand = cand.mul_ref(&sub_gen);
        }
        let image_of_x = image.ok_or(Error::FieldMismatch)?;
        let mut emb = Embedding { src: src.clone(), dst: dst.clone(), image_of_x, inverse: Arc::new(HashMap::new()) };
        let inverse: HashMap<u64, u64> = FqElem::elements(src).map(|a| (emb.apply(&a).index(), a.index())).collect();
        emb.inverse = Arc::new(inverse);
        Ok(emb)
    }

    pub fn src(&self) -> &Fq {
        &self.src
    }

    pub fn dst(&self) -> &Fq {
        &self.dst
    }

    pub fn apply(&self, a: &FqElem) -> FqElem {
        a.c.iter().rev().fold(FqElem::zero(&self.dst), |acc, &c| {
            acc.mul_ref(&self.image_of_x) + FqElem::from_int(&self.dst, c as i64)
        })
    }

    /// Preimage of an element of the image, if any.
    pub fn preimage(&self, b: &FqElem) -> Option<FqElem> {
        self.inverse.get(&b.index()).map(|&i| FqElem::from_index(&self.src, i))
    }
}
