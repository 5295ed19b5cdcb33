//! Truncated Witt vectors W(l)/p^N, truncated power series over them, and the
//! Artin-Hasse exponential with constructive checks of its multiplicativity.
//!
//! W(l)/p^N is realised as (Z/p^N)[t]/(F) where F is the minimal polynomial of
//! the Teichmüller lift of the residue generator. With that choice t itself is
//! a Teichmüller lift and Frobenius is simply t ↦ t^p.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::finite_field::{Fq, FqElem};
use crate::local_field::{LocalElem, TameTower};

pub(crate) fn inv_mod(a: u64, q: u64) -> Option<u64> {
    let (mut r0, mut r1) = (q as i128, (a % q) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let t = r0 / r1;
        (r0, r1) = (r1, r0 - t * r1);
        (s0, s1) = (s1, s0 - t * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(q as i128) as u64)
}

pub(crate) fn mulmod(a: u64, b: u64, q: u64) -> u64 {
    (a as u128 * b as u128 % q as u128) as u64
}

fn vp_int(mut a: u64, p: u64, cap: u32) -> u32 {
    if a == 0 {
        return cap;
    }
    let mut v = 0;
    while a % p == 0 {
        a /= p;
        v += 1;
    }
    v.min(cap)
}

#[derive(Debug)]
pub struct WittRing {
    field: Fq,
    p: u64,
    n: u32,
    q: u64,
    /// Low-to-high, length m + 1, monic.
    modulus: Vec<u64>,
}

pub type Witt = Arc<WittRing>;

/// W(l)/p^n with the Teichmüller modulus.
pub fn witt_ring(field: &Fq, n: u32) -> Witt {
    assert!(n >= 1, "precision must be positive");
    let p = field.p() as u64;
    let q = p.checked_pow(n).filter(|&q| q < 1 << 62).expect("p^N must fit in 62 bits");
    let naive: Vec<u64> = field.modulus().iter().map(|&c| c as u64).collect();
    let m = field.degree();
    let scratch = Arc::new(WittRing { field: field.clone(), p, n, q, modulus: naive });
    let t = if m == 1 {
        WittElem::from_int(&scratch, -(field.modulus()[0] as i64))
    } else {
        let mut c = vec![0; m];
        c[1] = 1;
        WittElem { ring: scratch.clone(), c }
    };
    let t = t.teichmuller_limit();
    // Π_i (X − t^{p^i}) has coefficients in Z/p^N.
    let mut poly = vec![WittElem::one(&scratch)];
    let mut conj = t.clone();
    for _ in 0..m {
        let mut next = vec![WittElem::zero(&scratch); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] = &next[i + 1] + c;
            next[i] = &next[i] - &(c * &conj);
        }
        poly = next;
        conj = conj.pow(p);
    }
    let modulus: Vec<u64> = poly
        .iter()
        .map(|c| {
            debug_assert!(c.c[1..].iter().all(|&x| x == 0));
            c.c[0]
        })
        .collect();
    Arc::new(WittRing { field: field.clone(), p, n, q, modulus })
}

impl WittRing {
    pub fn field(&self) -> &Fq {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    /// p^N.
    pub fn modulus_q(&self) -> u64 {
        self.q
    }

    pub fn degree(&self) -> usize {
        self.field.degree()
    }

    pub fn lifted_modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Reduces a t-polynomial of length ≤ 2m − 1 with entries < q.
    pub(crate) fn reduce_tpoly(&self, prod: &mut [u128]) -> Vec<u64> {
        let m = self.degree();
        let q = self.q as u128;
        for k in (m..prod.len()).rev() {
            let lead = prod[k];
            if lead == 0 {
                continue;
            }
            for i in 0..m {
                prod[k - m + i] = (prod[k - m + i] + (q - lead) * self.modulus[i] as u128) % q;
            }
        }
        prod[..m].iter().map(|&v| v as u64).collect()
    }

    pub(crate) fn mul_raw(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let m = self.degree();
        let q = self.q as u128;
        let mut prod = vec![0u128; 2 * m - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % q;
            }
        }
        self.reduce_tpoly(&mut prod)
    }
}

#[derive(Clone)]
pub struct WittElem {
    ring: Witt,
    c: Vec<u64>,
}

impl PartialEq for WittElem {
    fn eq(&self, o: &Self) -> bool {
        self.c == o.c && self.ring.q == o.ring.q
    }
}

impl Eq for WittElem {}

impl fmt::Debug for WittElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.c)
    }
}

impl WittElem {
    pub fn zero(ring: &Witt) -> Self {
        WittElem { ring: ring.clone(), c: vec![0; ring.degree()] }
    }

    pub fn one(ring: &Witt) -> Self {
        Self::from_int(ring, 1)
    }

    pub fn from_int(ring: &Witt, n: i64) -> Self {
        let mut e = Self::zero(ring);
        e.c[0] = (n as i128).rem_euclid(ring.q as i128) as u64;
        e
    }

    pub fn from_coeffs(ring: &Witt, coeffs: &[u64]) -> Self {
        assert_eq!(coeffs.len(), ring.degree());
        WittElem { ring: ring.clone(), c: coeffs.iter().map(|&x| x % ring.q).collect() }
    }

    /// Coefficientwise lift of a residue (not multiplicative).
    pub fn lift(ring: &Witt, a: &FqElem) -> Self {
        WittElem { ring: ring.clone(), c: a.coeffs().iter().map(|&x| x as u64).collect() }
    }

    pub fn ring(&self) -> &Witt {
        &self.ring
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn residue(&self) -> FqElem {
        let p = self.ring.p;
        let cs: Vec<u32> = self.c.iter().map(|&x| (x % p) as u32).collect();
        FqElem::from_coeffs(&self.ring.field, &cs)
    }

    /// p-adic valuation, N for zero.
    pub fn valuation(&self) -> u32 {
        self.c.iter().map(|&x| vp_int(x, self.ring.p, self.ring.n)).min().unwrap_or(self.ring.n)
    }

    pub fn scale(&self, k: u64) -> WittElem {
        let q = self.ring.q;
        let k = k % q;
        WittElem { ring: self.ring.clone(), c: self.c.iter().map(|&x| mulmod(x, k, q)).collect() }
    }

    fn mul_ref(&self, o: &WittElem) -> WittElem {
        WittElem { ring: self.ring.clone(), c: self.ring.mul_raw(&self.c, &o.c) }
    }

    pub fn pow(&self, mut e: u64) -> WittElem {
        let mut base = self.clone();
        let mut acc = WittElem::one(&self.ring);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            base = base.mul_ref(&base);
            e >>= 1;
        }
        acc
    }

    pub fn is_unit(&self) -> bool {
        !self.residue().is_zero()
    }

    /// Newton iteration from the residue inverse.
    pub fn inv(&self) -> Result<WittElem> {
        let r = self.residue().inv()?;
        let mut x = WittElem::lift(&self.ring, &r);
        let two = WittElem::from_int(&self.ring, 2);
        let mut correct = 1;
        while correct < self.ring.n {
            x = &x * &(&two - &(self * &x));
            correct *= 2;
        }
        Ok(x)
    }

    /// Fixpoint of w ↦ w^{p^m}.
    fn teichmuller_limit(&self) -> WittElem {
        let qres = self.ring.field.size();
        let mut w = self.clone();
        for _ in 0..=self.ring.n {
            let next = w.pow(qres);
            if next == w {
                break;
            }
            w = next;
        }
        w
    }

    /// Frobenius φ^k.
    pub fn phi(&self, k: usize) -> WittElem {
        let m = self.ring.degree();
        let k = k % m;
        if k == 0 || m == 1 {
            return self.clone();
        }
        let t = WittElem::from_coeffs(&self.ring, &{
            let mut v = vec![0; m];
            v[1] = 1;
            v
        });
        let tp = t.pow(self.ring.p.pow(k as u32));
        let mut acc = WittElem::zero(&self.ring);
        for &c in self.c.iter().rev() {
            acc = &(&acc * &tp) + &WittElem::from_int(&self.ring, c as i64);
        }
        acc
    }

    /// Exact division by p^k; the result is only meaningful mod p^{N-k}.
    pub fn div_p_pow(&self, k: u32) -> Option<WittElem> {
        let d = self.ring.p.pow(k);
        if self.c.iter().any(|&x| x % d != 0) {
            return None;
        }
        Some(WittElem { ring: self.ring.clone(), c: self.c.iter().map(|&x| x / d).collect() })
    }

    /// Reduction to a ring of lower precision over the same residue field.
    pub fn reduce(&self, ring: &Witt) -> WittElem {
        assert!(ring.n <= self.ring.n && ring.field == self.ring.field);
        WittElem { ring: ring.clone(), c: self.c.iter().map(|&x| x % ring.q).collect() }
    }

    /// Same coefficients, read in a ring of higher precision.
    pub fn widen(&self, ring: &Witt) -> WittElem {
        assert!(ring.n >= self.ring.n && ring.field == self.ring.field);
        WittElem { ring: ring.clone(), c: self.c.clone() }
    }
}

impl<'a> std::ops::Add<&'a WittElem> for &'a WittElem {
    type Output = WittElem;
    fn add(self, o: &WittElem) -> WittElem {
        let q = self.ring.q;
        WittElem {
            ring: self.ring.clone(),
            c: self.c.iter().zip(&o.c).map(|(&a, &b)| ((a as u128 + b as u128) % q as u128) as u64).collect(),
        }
    }
}

impl<'a> std::ops::Sub<&'a WittElem> for &'a WittElem {
    type Output = WittElem;
    fn sub(self, o: &WittElem) -> WittElem {
        let q = self.ring.q;
        WittElem { ring: self.ring.clone(), c: self.c.iter().zip(&o.c).map(|(&a, &b)| (a + (q - b)) % q).collect() }
    }
}

impl<'a> std::ops::Mul<&'a WittElem> for &'a WittElem {
    type Output = WittElem;
    fn mul(self, o: &WittElem) -> WittElem {
        self.mul_ref(o)
    }
}

impl std::ops::Neg for &WittElem {
    type Output = WittElem;
    fn neg(self) -> WittElem {
        let q = self.ring.q;
        WittElem { ring: self.ring.clone(), c: self.c.iter().map(|&a| (q - a) % q).collect() }
    }
}

pub fn teichmuller(a: &FqElem, ring: &Witt) -> WittElem {
    WittElem::lift(ring, a).teichmuller_limit()
}

/// Exact rational coefficients of E_p(x) up to x^{len-1}, from
/// (k+1) e_{k+1} = Σ_{n : p^n ≤ k+1} e_{k+1-p^n}.
pub fn artin_hasse_rational(p: u64, len: usize) -> Vec<BigRational> {
    let mut e = vec![BigRational::one()];
    for k in 0..len.saturating_sub(1) {
        let mut s = BigRational::zero();
        let mut pn = 1usize;
        while pn <= k + 1 {
            s += &e[k + 1 - pn];
            pn *= p as usize;
        }
        e.push(s / BigRational::from_integer(BigInt::from(k + 1)));
    }
    e.truncate(len);
    e
}

fn rational_mod(r: &BigRational, p: u64, q: u64) -> Result<u64> {
    let den = r.denom();
    if (den % BigInt::from(p)).is_zero() {
        return Err(Error::PrecisionLoss(format!("denominator {den} divisible by {p}")));
    }
    let qb = BigInt::from(q);
    let num = r.numer().mod_floor(&qb).to_u64().unwrap();
    let d = den.abs().mod_floor(&qb).to_u64().unwrap();
    let mut v = mulmod(num, inv_mod(d, q).unwrap(), q);
    if den.is_negative() {
        v = (q - v) % q;
    }
    Ok(v)
}

/// Coefficients of E_p(x) mod p^N.
pub fn artin_hasse_mod(p: u64, n: u32, len: usize) -> Result<Vec<u64>> {
    let q = p.pow(n);
    artin_hasse_rational(p, len).iter().map(|r| rational_mod(r, p, q)).collect()
}

/// Power series over W(l)/p^N truncated at x^prec.
#[derive(Clone, Debug)]
pub struct TruncSeries {
    ring: Witt,
    prec: usize,
    c: Vec<WittElem>,
}

impl PartialEq for TruncSeries {
    fn eq(&self, o: &Self) -> bool {
        self.prec == o.prec && self.c == o.c
    }
}

impl Eq for TruncSeries {}

impl TruncSeries {
    pub fn zero(ring: &Witt, prec: usize) -> Self {
        TruncSeries { ring: ring.clone(), prec, c: vec![WittElem::zero(ring); prec] }
    }

    pub fn one(ring: &Witt, prec: usize) -> Self {
        let mut s = Self::zero(ring, prec);
        s.c[0] = WittElem::one(ring);
        s
    }

    pub fn from_coeffs(ring: &Witt, coeffs: Vec<WittElem>) -> Self {
        TruncSeries { ring: ring.clone(), prec: coeffs.len(), c: coeffs }
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn coeff(&self, k: usize) -> &WittElem {
        &self.c[k]
    }

    pub fn coeffs(&self) -> &[WittElem] {
        &self.c
    }

    pub fn mul(&self, o: &TruncSeries) -> TruncSeries {
        let mut out = TruncSeries::zero(&self.ring, self.prec.min(o.prec));
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate().take(out.prec.saturating_sub(i)) {
                if !b.is_zero() {
                    out.c[i + j] = &out.c[i + j] + &(a * b);
                }
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> TruncSeries {
        let mut base = self.clone();
        let mut acc = TruncSeries::one(&self.ring, self.prec);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a series with unit constant term.
    pub fn inv(&self) -> Result<TruncSeries> {
        let c0inv = self.c[0].inv()?;
        let mut out = TruncSeries::zero(&self.ring, self.prec);
        out.c[0] = c0inv.clone();
        for k in 1..self.prec {
            let mut s = WittElem::zero(&self.ring);
            for j in 1..=k {
                s = &s + &(&self.c[j] * &out.c[k - j]);
            }
            out.c[k] = -&(&s * &c0inv);
        }
        Ok(out)
    }

    /// f(c·x^k).
    pub fn substitute(&self, c: &WittElem, k: usize) -> TruncSeries {
        let mut out = TruncSeries::zero(&self.ring, self.prec);
        let mut cj = WittElem::one(&self.ring);
        for (j, a) in self.c.iter().enumerate() {
            if j * k >= self.prec {
                break;
            }
            out.c[j * k] = a * &cj;
            cj = &cj * c;
        }
        out
    }

    pub fn reduce(&self, ring: &Witt) -> TruncSeries {
        TruncSeries { ring: ring.clone(), prec: self.prec, c: self.c.iter().map(|a| a.reduce(ring)).collect() }
    }

    fn first_difference(&self, o: &TruncSeries) -> Option<usize> {
        (0..self.prec.min(o.prec)).find(|&k| self.c[k] != o.c[k])
    }
}

/// E_p(x) as a series over `ring` truncated at x^m.
pub fn artin_hasse(ring: &Witt, m: usize) -> Result<TruncSeries> {
    let coeffs = artin_hasse_mod(ring.p, ring.n, m)?;
    Ok(TruncSeries::from_coeffs(ring, coeffs.iter().map(|&x| WittElem::from_int(ring, x as i64)).collect()))
}

/// δ_0, ..., δ_{count-1} of the multiplicativity recursion, each reduced to `ring`.
pub fn ah_delta_sequence(a: &FqElem, b: &FqElem, ring: &Witt, count: usize) -> Result<Vec<WittElem>> {
    let big = witt_ring(&ring.field, ring.n + count as u32 + 1);
    let p = ring.p;
    let sum = a + b;
    let num0 = &(&teichmuller(a, &big) + &teichmuller(b, &big)) - &teichmuller(&sum, &big);
    let d0 = num0.div_p_pow(1).ok_or(Error::InexactDivision { step: 0, k: 1 })?;
    let mut deltas = vec![d0.clone()];
    for n in 1..count {
        let mut num = d0.phi(n);
        for (i, di) in deltas.iter().enumerate() {
            let term = di.pow(p.pow((n - i) as u32)).scale(p.pow(i as u32));
            num = &num - &term;
        }
        let dn = num.div_p_pow(n as u32).ok_or(Error::InexactDivision { step: n, k: n as u32 })?;
        deltas.push(dn);
    }
    Ok(deltas.iter().map(|d| d.reduce(ring)).collect())
}

#[derive(Clone, Debug)]
pub struct VerificationWitness {
    pub lemma: &'static str,
    pub witness: TruncSeries,
    pub passed: bool,
    pub first_failure: Option<usize>,
}

impl VerificationWitness {
    fn compare(lemma: &'static str, witness: TruncSeries, lhs: &TruncSeries, rhs: &TruncSeries) -> Self {
        let first_failure = lhs.first_difference(rhs);
        VerificationWitness { lemma, witness, passed: first_failure.is_none(), first_failure }
    }

    pub fn into_result(self) -> Result<VerificationWitness> {
        match self.first_failure {
            None => Ok(self),
            Some(degree) => Err(Error::IdentityFailed { lemma: self.lemma, degree }),
        }
    }
}

fn deltas_needed(p: u64, m: usize) -> usize {
    let mut count = 0;
    let mut pk = 1usize;
    while pk < m {
        count += 1;
        pk *= p as usize;
    }
    count.max(1)
}

/// Checks f(x)^p · E([a+b]x) = E([a]x) · E([b]x) with f = Π E(δ_i x^{p^i}).
pub fn verify_ah_multiplicativity(a: &FqElem, b: &FqElem, n: u32, m: usize) -> Result<VerificationWitness> {
    let ring = witt_ring(a.field(), n);
    let p = ring.p;
    let e = artin_hasse(&ring, m)?;
    let deltas = ah_delta_sequence(a, b, &ring, deltas_needed(p, m))?;
    let mut f = TruncSeries::one(&ring, m);
    for (i, d) in deltas.iter().enumerate() {
        f = f.mul(&e.substitute(d, p.pow(i as u32) as usize));
    }
    let ta = teichmuller(a, &ring);
    let tb = teichmuller(b, &ring);
    let tab = teichmuller(&(a + b), &ring);
    let lhs = f.pow(p).mul(&e.substitute(&tab, 1));
    let rhs = e.substitute(&ta, 1).mul(&e.substitute(&tb, 1));
    Ok(VerificationWitness::compare("multiplicativity", f, &lhs, &rhs))
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// exp(c x^k) for c ∈ pW, computed in `big` and reduced to `ring`.
fn exp_pw(c: &WittElem, k: usize, ring: &Witt, m: usize) -> Result<TruncSeries> {
    let big = c.ring.clone();
    let p = big.p;
    let mut out = TruncSeries::zero(ring, m);
    let mut cj = WittElem::one(&big);
    let mut fact = BigInt::one();
    let mut j = 0usize;
    while j * k < m {
        if j > 0 {
            cj = &cj * c;
            fact *= BigInt::from(j);
        }
        let mut f = fact.clone();
        let mut v = 0u32;
        while (&f % BigInt::from(p)).is_zero() {
            f /= BigInt::from(p);
            v += 1;
        }
        if v + ring.n > big.n {
            return Err(Error::PrecisionLoss(format!("exp term {j} needs more than {} digits", big.n)));
        }
        let num = cj.div_p_pow(v).ok_or(Error::PrecisionLoss(format!("exp term {j} not integral")))?;
        let unit = f.mod_floor(&BigInt::from(big.q)).to_u64().unwrap();
        let term = num.scale(inv_mod(unit, big.q).unwrap());
        out.c[j * k] = term.reduce(ring);
        j += 1;
    }
    Ok(out)
}

/// Checks E(x)·E((1+pδ)x)^{-1}·Π_m E(pδ x^{p^m}) = (Π_n exp(c_n x^{p^n}))^p.
pub fn verify_ah_scaling(delta: &WittElem, n: u32, m: usize) -> Result<VerificationWitness> {
    let field = delta.ring.field.clone();
    let ring = witt_ring(&field, n);
    let p = ring.p;
    let extra = (m as u32) / (p as u32 - 1) + 2;
    let big = witt_ring(&field, n + extra + 1);
    let d_big = delta.reduce(&witt_ring(&field, n.min(delta.ring.n))).widen(&big);
    let d = d_big.reduce(&ring);

    let e = artin_hasse(&ring, m)?;
    let one_pd = &WittElem::one(&ring) + &d.scale(p);
    let pd = d.scale(p);
    let mut lhs = e.mul(&e.substitute(&one_pd, 1).inv()?);
    let mut pk = 1usize;
    while pk < m {
        lhs = lhs.mul(&e.substitute(&pd, pk));
        pk *= p as usize;
    }

    let mut witness = TruncSeries::one(&ring, m);
    let mut level = 0u32;
    let mut pn = 1u64;
    while (pn as usize) < m {
        let mut a_n = WittElem::zero(&big);
        for i in 1..=pn {
            let coef = binomial(pn, i);
            let shift = i as i64 - level as i64;
            // C(p^n, i) p^{i-n} is integral.
            let mut c = coef;
            if shift >= 0 {
                c *= BigInt::from(p).pow(shift as u32);
            } else {
                let d = BigInt::from(p).pow((-shift) as u32);
                debug_assert!((&c % &d).is_zero());
                c /= d;
            }
            let cm = c.mod_floor(&BigInt::from(big.q)).to_u64().unwrap();
            a_n = &a_n + &d_big.pow(i).scale(cm);
        }
        let mut b_n = WittElem::zero(&big);
        for j in 0..=level {
            let pj = p.pow(j);
            let coef = BigInt::from(p).pow((pj - j as u64) as u32).mod_floor(&BigInt::from(big.q)).to_u64().unwrap();
            b_n = &b_n + &d_big.pow(pj).scale(coef);
        }
        let c_n = (&b_n - &a_n).div_p_pow(1).ok_or(Error::InexactDivision { step: level as usize, k: 1 })?;
        witness = witness.mul(&exp_pw(&c_n, pn as usize, &ring, m)?);
        level += 1;
        pn *= p;
    }
    let rhs = witness.pow(p);
    Ok(VerificationWitness::compare("scaling", witness, &lhs, &rhs))
}

/// Checks that E(β^p)·E(−pβ)^{-1} is a p-th power in the tower.
pub fn verify_frobenius_shift(tower: &Arc<TameTower>, beta: &LocalElem) -> Result<bool> {
    let p = tower.p() as i64;
    let e = tower.e() as i64;
    let v = beta.valuation() as i64;
    if v * p * (p - 1) <= e {
        return Err(Error::ValuationTooSmall { num: v, den: e });
    }
    let lhs = beta.pow(p as u64).artin_hasse_eval()?;
    let rhs = beta.scale_int(-p).artin_hasse_eval()?;
    let ratio = lhs.mul(&rhs.inv_unit()?);
    tower.is_pth_power(&ratio)
}
