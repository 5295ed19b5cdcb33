//! The tame tower M = L(π), π^e = u·p, as a free W(l)/p^N-module of rank e,
//! together with Artin-Hasse digits of M^× modulo p-th powers.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::finite_field::{field_create, Embedding, Fq, FqElem};
use crate::padic::{artin_hasse_mod, teichmuller, witt_ring, Witt, WittElem};

#[derive(Debug)]
pub struct TameTower {
    p: u32,
    f: u32,
    g: u32,
    e: u32,
    n: u32,
    ring: Witt,
    u: WittElem,
    up: Vec<u64>,
    u_bar_inv: FqElem,
    zeta: FqElem,
    ah: Vec<u64>,
    top: Option<u32>,
    kappa: Option<FqElem>,
    top_beta: Option<FqElem>,
}

/// Builds the tower over l = F_{p^{fg}} (default modulus).
pub fn tower_create(p: u32, f: u32, g: u32, e: u32, u: &UnitSpec, n: u32) -> Result<Arc<TameTower>> {
    let l = field_create(p, (f * g) as usize, None)?;
    tower_over(&l, f, e, u, n)
}

/// Specification of the tower unit u ∈ W(k)^×.
#[derive(Clone, Debug)]
pub enum UnitSpec {
    Int(i64),
    /// ±[a] for a in l.
    Teichmuller(FqElem, bool),
    Witt(WittElem),
}

impl UnitSpec {
    fn realise(&self, ring: &Witt) -> WittElem {
        match self {
            UnitSpec::Int(k) => WittElem::from_int(ring, *k),
            UnitSpec::Teichmuller(a, neg) => {
                let t = teichmuller(a, ring);
                if *neg {
                    -&t
                } else {
                    t
                }
            }
            UnitSpec::Witt(w) => w.clone(),
        }
    }
}

/// Builds the tower over a given residue field l of degree f·g.
pub fn tower_over(l: &Fq, f: u32, e: u32, u: &UnitSpec, n: u32) -> Result<Arc<TameTower>> {
    let p = l.p();
    let m = l.degree() as u32;
    if f == 0 || m % f != 0 {
        return Err(Error::InvalidModulus { m: l.degree() });
    }
    let g = m / f;
    if g % p == 0 {
        return Err(Error::BadUnramifiedDegree { g });
    }
    let q1 = (p as u64).pow(f) - 1;
    if e == 0 || q1 % e as u64 != 0 {
        return Err(Error::BadRamification { e, q1 });
    }
    let ring = witt_ring(l, n);
    let u = u.realise(&ring);
    if !u.is_unit() {
        return Err(Error::ZeroInput);
    }
    if u.phi(f as usize) != u {
        return Err(Error::TowerTooSmall("tower unit is not defined over W(k)".into()));
    }
    let up = u.scale(p as u64).coeffs().to_vec();
    let u_bar_inv = u.residue().inv()?;
    let zeta = FqElem::gen(l).pow((l.size() - 1) / e as u64);
    let ah = artin_hasse_mod(p as u64, n, (e * n) as usize + 2)?;

    let (top, kappa, top_beta) = if (e * p) % (p - 1) == 0 {
        let top = e * p / (p - 1);
        // c^{p-1} = −1/ū; the image of b ↦ b^p + b/ū is ker(tr(c^{-p}·)).
        let target = -&u_bar_inv;
        let c = FqElem::elements(l).find(|c| !c.is_zero() && c.pow(p as u64 - 1) == target);
        match c {
            Some(c) => {
                let kappa = c.pow(p as u64).inv()?;
                let b0 = FqElem::basis(l).into_iter().find(|b| b.trace_to_prime() != 0).unwrap();
                let t = b0.trace_to_prime();
                let beta = &b0.scale(crate::padic::inv_mod(t as u64, p as u64).unwrap() as u32) * &kappa.inv()?;
                (Some(top), Some(kappa), Some(beta))
            }
            None => (Some(top), None, None),
        }
    } else {
        (None, None, None)
    };

    Ok(Arc::new(TameTower { p, f, g, e, n, ring, u, up, u_bar_inv, zeta, ah, top, kappa, top_beta }))
}

impl TameTower {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    /// π-adic precision horizon e·N.
    pub fn horizon(&self) -> u32 {
        self.e * self.n
    }

    pub fn ring(&self) -> &Witt {
        &self.ring
    }

    pub fn residue_field(&self) -> &Fq {
        self.ring.field()
    }

    pub fn unit(&self) -> &WittElem {
        &self.u
    }

    /// Primitive e-th root of unity ζ̄ in l; the tame generator sends π to [ζ̄]π.
    pub fn zeta(&self) -> &FqElem {
        &self.zeta
    }

    /// Level ep/(p−1) when it is an integer.
    pub fn top_level(&self) -> Option<u32> {
        self.top
    }

    /// Constant κ with U_top ∩ (p-th powers)·U_{top+1} = {1 + [b]π^top : tr(κb) = 0}.
    pub fn kappa(&self) -> Option<&FqElem> {
        self.kappa.as_ref()
    }

    pub fn has_top_digit(&self) -> bool {
        self.kappa.is_some()
    }

    /// Residue β with tr(κβ) = 1, used for the top basis unit.
    pub fn top_beta(&self) -> Option<&FqElem> {
        self.top_beta.as_ref()
    }

    /// Levels 1 ≤ m < ep/(p−1) prime to p.
    pub fn levels(&self) -> Vec<u32> {
        let (p, e) = (self.p, self.e);
        (1..).take_while(|&m| m * (p - 1) < e * p).filter(|m| m % p != 0).collect()
    }

    fn below_top(&self, m: u32) -> bool {
        m * (self.p - 1) < self.e * self.p
    }

    /// F_p-dimension of M^×/(M^×)^p in the coordinate layout.
    pub fn digit_dim(&self) -> usize {
        1 + self.levels().len() * self.ring.degree() + usize::from(self.has_top_digit())
    }

    pub fn zero(self: &Arc<Self>) -> LocalElem {
        LocalElem { tower: self.clone(), c: vec![0; self.width()], prec: self.horizon() }
    }

    pub fn one(self: &Arc<Self>) -> LocalElem {
        self.constant(&WittElem::one(&self.ring))
    }

    pub fn constant(self: &Arc<Self>, w: &WittElem) -> LocalElem {
        let mut x = self.zero();
        x.c[..self.ring.degree()].copy_from_slice(w.coeffs());
        x
    }

    pub fn int(self: &Arc<Self>, k: i64) -> LocalElem {
        self.constant(&WittElem::from_int(&self.ring, k))
    }

    pub fn teich(self: &Arc<Self>, a: &FqElem) -> LocalElem {
        self.constant(&teichmuller(a, &self.ring))
    }

    /// π^k = (up)^{⌊k/e⌋} π^{k mod e}.
    pub fn pi_pow(self: &Arc<Self>, k: u32) -> LocalElem {
        let (q, r) = (k / self.e, k % self.e);
        let up = WittElem::from_coeffs(&self.ring, &self.up);
        let coef = up.pow(q as u64);
        let mut x = self.zero();
        if k < self.horizon() {
            let m = self.ring.degree();
            x.c[r as usize * m..(r as usize + 1) * m].copy_from_slice(coef.coeffs());
        }
        x
    }

    pub fn pi(self: &Arc<Self>) -> LocalElem {
        self.pi_pow(1)
    }

    /// Element Σ_j c_j π^j from W-coefficients, j < e.
    pub fn from_coeffs(self: &Arc<Self>, coeffs: &[WittElem]) -> LocalElem {
        assert!(coeffs.len() <= self.e as usize);
        let mut x = self.zero();
        let m = self.ring.degree();
        for (j, c) in coeffs.iter().enumerate() {
            x.c[j * m..(j + 1) * m].copy_from_slice(c.coeffs());
        }
        x
    }

    fn width(&self) -> usize {
        self.e as usize * self.ring.degree()
    }

    /// E([a]π^n).
    pub fn ah_unit(self: &Arc<Self>, a: &FqElem, n: u32) -> Result<LocalElem> {
        if n == 0 {
            return Err(Error::PrecisionExceeded("level must be positive".into()));
        }
        if n >= self.horizon() {
            return Err(Error::PrecisionExceeded(format!("level {n} beyond horizon {}", self.horizon())));
        }
        self.teich(a).mul(&self.pi_pow(n)).artin_hasse_eval()
    }

    /// Greedy digit extraction modulo p-th powers.
    pub fn decompose(self: &Arc<Self>, x: &LocalElem) -> Result<UnitDigits> {
        let v = x.valuation();
        if v >= x.prec {
            return Err(Error::ZeroElement);
        }
        let unit = x.div_pi_pow(v)?;
        let r = unit.residue();
        let one_unit = unit.mul(&self.teich(&r.inv()?));
        let mut digits = self.decompose_one_unit(&one_unit)?;
        digits.pi_exp = v as i64;
        digits.teich = Some(r);
        Ok(digits)
    }

    /// Digits of a principal unit.
    pub fn decompose_unit(self: &Arc<Self>, x: &LocalElem) -> Result<UnitDigits> {
        self.decompose_one_unit(x)
    }

    fn decompose_one_unit(self: &Arc<Self>, x: &LocalElem) -> Result<UnitDigits> {
        let p = self.p;
        let need = match self.top {
            Some(t) => t + 1,
            None => (self.e * p).div_ceil(p - 1),
        };
        if x.prec < need {
            return Err(Error::PrecisionExceeded(format!("need π-precision {need}, have {}", x.prec)));
        }
        let one = self.one();
        if !x.residue().is_one() {
            return Err(Error::PrecisionExceeded("not a principal unit".into()));
        }
        let mut x = x.clone();
        let mut out = UnitDigits::empty();
        loop {
            let d = x.sub(&one);
            let m = d.valuation();
            if m >= x.prec || !self.below_top(m) && Some(m) != self.top {
                break;
            }
            let a = d.digit_at(m);
            if Some(m) == self.top {
                if let Some(kappa) = &self.kappa {
                    let t = (&a * kappa).trace_to_prime();
                    if t != 0 {
                        out.top = Some(t);
                    }
                }
                break;
            }
            if m % p == 0 {
                let b = a.pth_root();
                let base = one.add(&self.teich(&b).mul(&self.pi_pow(m / p)));
                x = x.mul(&base.pow(p as u64).inv_unit()?);
            } else {
                x = x.mul(&self.ah_unit(&a, m)?.inv_unit()?);
                out.digits.insert(m, a);
            }
        }
        Ok(out)
    }

    pub fn is_pth_power(self: &Arc<Self>, x: &LocalElem) -> Result<bool> {
        let d = self.decompose(x)?;
        Ok(d.pi_exp.rem_euclid(self.p as i64) == 0 && d.digits.is_empty() && d.top.is_none())
    }

    /// F_p-coordinates: [π-exponent mod p, digits level by level in the F_p basis of l, top].
    pub fn coordinates(&self, d: &UnitDigits) -> Vec<u32> {
        let mut v = vec![d.pi_exp.rem_euclid(self.p as i64) as u32];
        let m = self.ring.degree();
        for level in self.levels() {
            match d.digits.get(&level) {
                Some(a) => v.extend_from_slice(a.coeffs()),
                None => v.extend(std::iter::repeat(0).take(m)),
            }
        }
        if self.has_top_digit() {
            v.push(d.top.unwrap_or(0));
        }
        v
    }

    pub fn from_coordinates(&self, v: &[u32]) -> UnitDigits {
        assert_eq!(v.len(), self.digit_dim());
        let l = self.residue_field();
        let m = l.degree();
        let mut d = UnitDigits::empty();
        d.pi_exp = v[0] as i64;
        for (i, level) in self.levels().into_iter().enumerate() {
            let a = FqElem::from_coeffs(l, &v[1 + i * m..1 + (i + 1) * m]);
            if !a.is_zero() {
                d.digits.insert(level, a);
            }
        }
        if self.has_top_digit() && v[v.len() - 1] != 0 {
            d.top = Some(v[v.len() - 1]);
        }
        d
    }

    /// Coordinates of an arbitrary nonzero element.
    pub fn coordinates_of(self: &Arc<Self>, x: &LocalElem) -> Result<Vec<u32>> {
        Ok(self.coordinates(&self.decompose(x)?))
    }

    /// π^{exp}·[teich]·Π E([a]π^m)·E([β]π^top)^t.
    pub fn reconstruct(self: &Arc<Self>, d: &UnitDigits) -> Result<LocalElem> {
        let mut x = self.one();
        for (&m, a) in &d.digits {
            x = x.mul(&self.ah_unit(a, m)?);
        }
        if let (Some(t), Some(top), Some(beta)) = (d.top, self.top, &self.top_beta) {
            x = x.mul(&self.ah_unit(beta, top)?.pow(t as u64));
        }
        if let Some(r) = &d.teich {
            x = x.mul(&self.teich(r));
        }
        if d.pi_exp < 0 {
            return Err(Error::PrecisionExceeded("negative π-exponent".into()));
        }
        Ok(x.mul(&self.pi_pow(d.pi_exp as u32)))
    }

    /// Whether g = (s, t) is a ring automorphism of M (needs φ^s(u) = u).
    pub fn galois_valid(&self, g: &GaloisElem) -> bool {
        self.u.phi(g.frob) == self.u
    }

    pub fn galois_apply(self: &Arc<Self>, g: &GaloisElem, x: &LocalElem) -> Result<LocalElem> {
        if !self.galois_valid(g) {
            return Err(Error::NotAnAutomorphism);
        }
        let m = self.ring.degree();
        let z = teichmuller(&self.zeta.pow(g.tame as u64), &self.ring);
        let mut zj = WittElem::one(&self.ring);
        let mut out = self.zero();
        out.prec = x.prec;
        for j in 0..self.e as usize {
            let c = WittElem::from_coeffs(&self.ring, &x.c[j * m..(j + 1) * m]).phi(g.frob);
            let c = &c * &zj;
            out.c[j * m..(j + 1) * m].copy_from_slice(c.coeffs());
            zj = &zj * &z;
        }
        out.normalize();
        Ok(out)
    }

    /// Action on digits: a ↦ ζ̄^{tm}·a^{p^s} at level m.
    pub fn galois_digits(&self, g: &GaloisElem, d: &UnitDigits) -> UnitDigits {
        let mut out = UnitDigits::empty();
        out.pi_exp = d.pi_exp;
        out.teich = d.teich.as_ref().map(|r| &r.frobenius(g.frob) * &self.zeta.pow((g.tame as u64) * d.pi_exp as u64));
        for (&m, a) in &d.digits {
            let b = &a.frobenius(g.frob) * &self.zeta.pow(g.tame as u64 * m as u64);
            out.digits.insert(m, b);
        }
        out.top = d.top;
        out
    }
}

/// Element of Gal(M/Q_p)-type automorphisms: Frobenius power on l and π ↦ [ζ̄^t]π.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GaloisElem {
    pub frob: usize,
    pub tame: u32,
}

impl GaloisElem {
    pub fn identity() -> Self {
        GaloisElem { frob: 0, tame: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnitDigits {
    pub pi_exp: i64,
    #[serde(skip)]
    pub teich: Option<FqElem>,
    pub digits: BTreeMap<u32, FqElem>,
    pub top: Option<u32>,
}

impl UnitDigits {
    pub fn empty() -> Self {
        UnitDigits { pi_exp: 0, teich: None, digits: BTreeMap::new(), top: None }
    }

    pub fn is_trivial_mod_p(&self, p: u32) -> bool {
        self.pi_exp.rem_euclid(p as i64) == 0 && self.digits.is_empty() && self.top.is_none()
    }
}

/// Σ c_j π^j, known modulo π^prec.
#[derive(Clone)]
pub struct LocalElem {
    tower: Arc<TameTower>,
    c: Vec<u64>,
    prec: u32,
}

impl PartialEq for LocalElem {
    fn eq(&self, o: &Self) -> bool {
        self.prec == o.prec && self.c == o.c
    }
}

impl Eq for LocalElem {}

impl fmt::Debug for LocalElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.tower.ring.degree();
        let parts: Vec<String> = (0..self.tower.e as usize)
            .filter(|j| self.c[j * m..(j + 1) * m].iter().any(|&x| x != 0))
            .map(|j| format!("{:?}π^{j}", &self.c[j * m..(j + 1) * m]))
            .collect();
        write!(f, "{} + O(π^{})", if parts.is_empty() { "0".into() } else { parts.join(" + ") }, self.prec)
    }
}

fn vp(mut a: u64, p: u64) -> u32 {
    let mut v = 0;
    while a % p == 0 && a != 0 {
        a /= p;
        v += 1;
    }
    v
}

impl LocalElem {
    pub fn tower(&self) -> &Arc<TameTower> {
        &self.tower
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn coeff(&self, j: usize) -> WittElem {
        let m = self.tower.ring.degree();
        WittElem::from_coeffs(&self.tower.ring, &self.c[j * m..(j + 1) * m])
    }

    pub fn with_precision(&self, prec: u32) -> LocalElem {
        let mut x = self.clone();
        x.prec = prec.min(self.prec);
        x.normalize();
        x
    }

    /// Clears digits at or beyond the precision.
    fn normalize(&mut self) {
        let t = &self.tower;
        let m = t.ring.degree();
        let p = t.p as u64;
        for j in 0..t.e {
            let keep = if self.prec > j { (self.prec - j).div_ceil(t.e) } else { 0 };
            let md = if keep >= t.n { t.ring.modulus_q() } else { p.pow(keep) };
            for x in &mut self.c[j as usize * m..(j as usize + 1) * m] {
                *x %= md;
            }
        }
    }

    /// π-adic valuation, capped at the precision.
    pub fn valuation(&self) -> u32 {
        let t = &self.tower;
        let m = t.ring.degree();
        let p = t.p as u64;
        let mut best = self.prec;
        for j in 0..t.e as usize {
            for &x in &self.c[j * m..(j + 1) * m] {
                if x != 0 {
                    best = best.min(t.e * vp(x, p) + j as u32);
                }
            }
        }
        best
    }

    pub fn is_zero(&self) -> bool {
        self.valuation() >= self.prec
    }

    pub fn residue(&self) -> FqElem {
        self.coeff(0).residue()
    }

    /// Leading residue at level m = ek + j: residue(c_j/p^k)·ū^{−k}.
    pub fn digit_at(&self, level: u32) -> FqElem {
        let t = &self.tower;
        let (k, j) = (level / t.e, level % t.e);
        let c = self.coeff(j as usize);
        let shifted = c.div_p_pow(k).expect("level below valuation");
        &shifted.residue() * &t.u_bar_inv.pow(k as u64)
    }

    pub fn add(&self, o: &LocalElem) -> LocalElem {
        let q = self.tower.ring.modulus_q();
        let mut out = LocalElem {
            tower: self.tower.clone(),
            c: self.c.iter().zip(&o.c).map(|(&a, &b)| ((a as u128 + b as u128) % q as u128) as u64).collect(),
            prec: self.prec.min(o.prec),
        };
        out.normalize();
        out
    }

    pub fn neg(&self) -> LocalElem {
        let q = self.tower.ring.modulus_q();
        let mut out = self.clone();
        for x in &mut out.c {
            *x = (q - *x) % q;
        }
        out.normalize();
        out
    }

    pub fn sub(&self, o: &LocalElem) -> LocalElem {
        self.add(&o.neg())
    }

    pub fn scale_int(&self, k: i64) -> LocalElem {
        self.mul(&self.tower.int(k))
    }

    pub fn scale_witt(&self, w: &WittElem) -> LocalElem {
        self.mul(&self.tower.constant(w))
    }

    pub fn mul(&self, o: &LocalElem) -> LocalElem {
        let t = &self.tower;
        let ring = &t.ring;
        let m = ring.degree();
        let e = t.e as usize;
        let q = ring.modulus_q() as u128;
        let w = 2 * m - 1;
        let mut acc = vec![0u128; (2 * e - 1) * w];
        for j1 in 0..e {
            let a = &self.c[j1 * m..(j1 + 1) * m];
            if a.iter().all(|&x| x == 0) {
                continue;
            }
            for j2 in 0..e {
                let b = &o.c[j2 * m..(j2 + 1) * m];
                let row = (j1 + j2) * w;
                for (i1, &x) in a.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    for (i2, &y) in b.iter().enumerate() {
                        let slot = &mut acc[row + i1 + i2];
                        *slot = (*slot + x as u128 * y as u128) % q;
                    }
                }
            }
        }
        let mut rows: Vec<Vec<u64>> = (0..2 * e - 1).map(|j| ring.reduce_tpoly(&mut acc[j * w..(j + 1) * w])).collect();
        for j in (e..2 * e - 1).rev() {
            let folded = ring.mul_raw(&rows[j], &t.up);
            for (dst, src) in rows[j - e].iter_mut().zip(folded) {
                *dst = ((*dst as u128 + src as u128) % q) as u64;
            }
        }
        let prec = (self.prec + o.valuation()).min(o.prec + self.valuation()).min(t.horizon());
        let mut out = LocalElem { tower: t.clone(), c: rows[..e].concat(), prec };
        out.normalize();
        out
    }

    pub fn pow(&self, mut k: u64) -> LocalElem {
        let mut base = self.clone();
        let mut acc = self.tower.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Inverse of a unit by Newton iteration.
    pub fn inv_unit(&self) -> Result<LocalElem> {
        if self.valuation() != 0 {
            return Err(Error::ZeroInput);
        }
        let t = &self.tower;
        let r = self.residue().inv()?;
        let mut x = t.teich(&r);
        let two = t.int(2);
        let mut correct = 1;
        while correct < self.prec {
            x = x.mul(&two.sub(&self.mul(&x)));
            correct *= 2;
        }
        Ok(x.with_precision(self.prec))
    }

    /// x·π^k.
    pub fn mul_pi_pow(&self, k: u32) -> LocalElem {
        self.mul(&self.tower.pi_pow(k))
    }

    /// x/π^k for v(x) ≥ k; loses k digits of absolute precision.
    pub fn div_pi_pow(&self, k: u32) -> Result<LocalElem> {
        if k == 0 {
            return Ok(self.clone());
        }
        if self.valuation() < k {
            return Err(Error::PrecisionExceeded(format!("valuation {} below {k}", self.valuation())));
        }
        let t = &self.tower;
        let m = t.ring.degree();
        let e = t.e;
        // π^{-1} = π^{e-1}/(up): shift down by one k times.
        let u_inv = t.u.inv()?;
        let mut cur = self.clone();
        for _ in 0..k {
            let c0 = cur.coeff(0).div_p_pow(1).ok_or_else(|| Error::PrecisionExceeded("inexact π-division".into()))?;
            let c0 = &c0 * &u_inv;
            let mut next = t.zero();
            for j in 1..e as usize {
                next.c[(j - 1) * m..j * m].copy_from_slice(&cur.c[j * m..(j + 1) * m]);
            }
            next.c[(e as usize - 1) * m..].copy_from_slice(c0.coeffs());
            next.prec = cur.prec - 1;
            next.normalize();
            cur = next;
        }
        Ok(cur)
    }

    /// E(x) for v(x) ≥ 1.
    pub fn artin_hasse_eval(&self) -> Result<LocalElem> {
        let t = &self.tower;
        let v = self.valuation();
        if v == 0 {
            return Err(Error::PrecisionExceeded("Artin-Hasse argument must lie in the maximal ideal".into()));
        }
        let mut out = t.one();
        let mut power = t.one();
        let mut k = 1usize;
        while (k as u32) * v < self.prec {
            power = power.mul(self);
            let coef = t.ah[k];
            if coef != 0 {
                out = out.add(&power.mul(&t.int(coef as i64)));
            }
            k += 1;
        }
        Ok(out.with_precision(self.prec))
    }

    /// The same element of M written in a tower with uniformizer π′, given π = s·π′.
    pub fn rescale_uniformizer(&self, target: &Arc<TameTower>, s: &WittElem) -> LocalElem {
        assert_eq!(target.e, self.tower.e);
        let m = self.tower.ring.degree();
        let mut out = target.zero();
        let mut sj = WittElem::one(&self.tower.ring);
        for j in 0..self.tower.e as usize {
            let c = &self.coeff(j) * &sj;
            out.c[j * m..(j + 1) * m].copy_from_slice(c.coeffs());
            sj = &sj * s;
        }
        out.prec = self.prec;
        out.normalize();
        out
    }

    /// Image under W(l) → W(l′) induced by an embedding l → l′ (same π and e).
    pub fn embed(&self, target: &Arc<TameTower>, emb: &WittEmbedding) -> LocalElem {
        let m2 = target.ring.degree();
        let mut out = target.zero();
        for j in 0..self.tower.e as usize {
            let c = emb.apply(&self.coeff(j));
            out.c[j * m2..(j + 1) * m2].copy_from_slice(c.coeffs());
        }
        out.prec = self.prec;
        out.normalize();
        out
    }
}

/// W(l) → W(l′) sending the Teichmüller generator t to [image of x].
#[derive(Clone, Debug)]
pub struct WittEmbedding {
    field_emb: Embedding,
    target: Witt,
    image_of_t: WittElem,
}

impl WittEmbedding {
    pub fn new(src: &Witt, dst: &Witt) -> Result<Self> {
        let field_emb = Embedding::new(src.field(), dst.field())?;
        let x = FqElem::x(src.field());
        let image_of_t = teichmuller(&field_emb.apply(&x), dst);
        Ok(WittEmbedding { field_emb, target: dst.clone(), image_of_t })
    }

    pub fn field_embedding(&self) -> &Embedding {
        &self.field_emb
    }

    pub fn apply(&self, w: &WittElem) -> WittElem {
        let m = w.ring().degree();
        if m == 1 {
            return WittElem::from_int(&self.target, w.coeffs()[0] as i64);
        }
        w.coeffs().iter().rev().fold(WittElem::zero(&self.target), |acc, &c| {
            &(&acc * &self.image_of_t) + &WittElem::from_int(&self.target, c as i64)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tower_e8(u: i64) -> Arc<TameTower> {
        tower_create(3, 2, 1, 8, &UnitSpec::Int(u), 4).unwrap()
    }

    #[test]
    fn creation_checks() {
        assert!(matches!(tower_create(3, 2, 1, 9, &UnitSpec::Int(1), 4), Err(Error::BadRamification { e: 9, q1: 8 })));
        assert!(matches!(tower_create(3, 1, 3, 2, &UnitSpec::Int(1), 4), Err(Error::BadUnramifiedDegree { g: 3 })));
        let t = tower_create(3, 1, 1, 2, &UnitSpec::Int(-1), 3).unwrap();
        assert_eq!(t.top_level(), Some(3));
        assert_eq!(t.kappa().unwrap().as_prime(), Some(1));
        let pi = t.pi();
        assert_eq!(pi.pow(2), t.int(-3));
    }

    #[test]
    fn pi_relation_and_valuation() {
        let t = tower_e8(1);
        assert_eq!(t.pi().pow(8), t.int(3));
        assert_eq!(t.pi_pow(13).valuation(), 13);
        assert_eq!(t.int(9).valuation(), 16);
        assert_eq!(t.levels(), vec![1, 2, 4, 5, 7, 8, 10, 11]);
        assert_eq!(t.digit_dim(), 1 + 16 + 1);
    }

    #[test]
    fn division_by_pi() {
        let t = tower_e8(-1);
        let x = t.pi_pow(11).add(&t.pi_pow(12));
        let y = x.div_pi_pow(11).unwrap();
        assert_eq!(y.with_precision(20), t.one().add(&t.pi()).with_precision(20));
    }

    #[test]
    fn ah_unit_leading_terms() {
        let t = tower_e8(1);
        let k = t.residue_field().clone();
        assert_eq!(t.ah_unit(&FqElem::zero(&k), 3).unwrap(), t.one());
        let x = t.ah_unit(&FqElem::one(&k), 5).unwrap();
        // 1 + π^5 + 5π^10 + 5π^15 + ...
        let approx = t.one().add(&t.pi_pow(5)).add(&t.pi_pow(10).scale_int(5)).add(&t.pi_pow(15).scale_int(5));
        assert!(x.sub(&approx).valuation() >= 20);
        let a = FqElem::gen(&k);
        let y = t.ah_unit(&a, 7).unwrap();
        assert_eq!(y.sub(&t.one()).valuation(), 7);
        assert_eq!(y.sub(&t.one()).digit_at(7), a);
    }

    #[test]
    fn inverse_is_inverse() {
        let t = tower_e8(-1);
        let k = t.residue_field().clone();
        let x = t.ah_unit(&FqElem::gen(&k), 1).unwrap().mul(&t.teich(&FqElem::gen(&k)));
        assert_eq!(x.mul(&x.inv_unit().unwrap()), t.one());
    }

    #[test]
    fn digit_round_trips() {
        let t = tower_e8(1);
        let k = t.residue_field().clone();
        let a = FqElem::gen(&k);
        let b = FqElem::from_int(&k, 2);
        let d = t.decompose_unit(&t.ah_unit(&a, 7).unwrap()).unwrap();
        assert_eq!(d.digits.into_iter().collect::<Vec<_>>(), vec![(7, a.clone())]);
        let x = t.ah_unit(&a, 5).unwrap().mul(&t.ah_unit(&b, 7).unwrap());
        let d = t.decompose_unit(&x).unwrap();
        assert_eq!(d.digits.into_iter().collect::<Vec<_>>(), vec![(5, a.clone()), (7, b)]);
        assert!(!t.is_pth_power(&t.ah_unit(&a, 5).unwrap()).unwrap());
    }

    #[test]
    fn cube_has_no_digits() {
        let t = tower_e8(1);
        let k = t.residue_field().clone();
        let y = t.ah_unit(&FqElem::gen(&k), 1).unwrap().mul(&t.pi_pow(3)).add(&t.teich(&FqElem::gen(&k)));
        assert!(t.is_pth_power(&y.pow(3)).unwrap());
    }

    #[test]
    fn cyclotomic_trace_criterion() {
        let t = tower_create(3, 2, 1, 2, &UnitSpec::Int(-1), 4).unwrap();
        for beta in FqElem::elements(t.residue_field()) {
            let x = t.one().add(&t.teich(&beta).mul(&t.pi_pow(3)));
            assert_eq!(t.is_pth_power(&x).unwrap(), beta.trace_to_prime() == 0, "{beta}");
        }
    }

    #[test]
    fn galois_on_digits_matches_galois_on_units() {
        let t = tower_e8(-1);
        let k = t.residue_field().clone();
        let a = FqElem::gen(&k);
        let x = t.ah_unit(&a, 5).unwrap();
        for g in [GaloisElem { frob: 0, tame: 1 }, GaloisElem { frob: 1, tame: 3 }] {
            let gx = t.galois_apply(&g, &x).unwrap();
            let lhs = t.decompose(&gx).unwrap();
            let rhs = t.galois_digits(&g, &t.decompose(&x).unwrap());
            assert_eq!(lhs.digits, rhs.digits);
        }
        let gpi = t.galois_apply(&GaloisElem { frob: 0, tame: 1 }, &t.pi()).unwrap();
        assert_eq!(gpi, t.teich(t.zeta()).mul(&t.pi()));
    }

    #[test]
    fn galois_needs_fixed_unit() {
        let l = field_create(3, 2, None).unwrap();
        let t = tower_over(&l, 2, 4, &UnitSpec::Teichmuller(FqElem::gen(&l).pow(2), false), 3).unwrap();
        assert!(t.galois_apply(&GaloisElem { frob: 1, tame: 0 }, &t.pi()).is_err());
        assert!(t.galois_apply(&GaloisElem { frob: 0, tame: 1 }, &t.pi()).is_ok());
    }
}
