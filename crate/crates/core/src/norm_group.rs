//! Norms from N = M(θ), θ a root of a monic polynomial over O_M, and the
//! image of Norm_{N/M}(N^×) in M^×/(M^×)^p.

use std::sync::Arc;

use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finite_field::FqElem;
use crate::linalg::FpSpan;
use crate::local_field::{GaloisElem, LocalElem, TameTower};

#[derive(Clone, Debug)]
pub struct WildExtension {
    tower: Arc<TameTower>,
    /// Coefficients g_0, ..., g_D with g_D = 1.
    poly: Vec<LocalElem>,
}

impl WildExtension {
    pub fn new(tower: &Arc<TameTower>, poly: Vec<LocalElem>) -> Result<Self> {
        if poly.len() < 2 {
            return Err(Error::UnsupportedExtension("defining polynomial must have degree at least 1".into()));
        }
        if poly.last().unwrap().sub(&tower.one()).valuation() < tower.horizon() {
            return Err(Error::UnsupportedExtension("defining polynomial is not monic".into()));
        }
        Ok(WildExtension { tower: tower.clone(), poly })
    }

    /// g with coefficients in Z, low degree first, leading 1 included.
    pub fn from_integers(tower: &Arc<TameTower>, coeffs: &[i64]) -> Result<Self> {
        Self::new(tower, coeffs.iter().map(|&c| tower.int(c)).collect())
    }

    pub fn tower(&self) -> &Arc<TameTower> {
        &self.tower
    }

    pub fn degree(&self) -> usize {
        self.poly.len() - 1
    }

    pub fn poly(&self) -> &[LocalElem] {
        &self.poly
    }

    fn coeff_valuation(&self, k: usize) -> Option<i64> {
        let c = &self.poly[k];
        let v = c.valuation();
        (v < c.precision()).then_some(v as i64)
    }

    /// Root valuations v_π(θ) with multiplicities, from the Newton polygon.
    pub fn newton_slopes(&self) -> Vec<(Ratio<i64>, usize)> {
        let pts: Vec<(i64, i64)> =
            (0..=self.degree()).filter_map(|k| self.coeff_valuation(k).map(|v| (k as i64, v))).collect();
        let mut hull: Vec<(i64, i64)> = Vec::new();
        for &pt in &pts {
            while hull.len() >= 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                // drop b if it lies on or above the segment a..pt
                if (b.1 - a.1) * (pt.0 - a.0) >= (pt.1 - a.1) * (b.0 - a.0) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(pt);
        }
        let mut out = Vec::new();
        if pts.first().map(|p| p.0) != Some(0) {
            // g(0) vanishes to working precision: treat as roots of infinite valuation
            out.push((Ratio::from_integer(i64::MAX), pts[0].0 as usize));
        }
        for w in hull.windows(2) {
            let len = w[1].0 - w[0].0;
            out.push((Ratio::new(w[0].1 - w[1].1, len), len as usize));
        }
        out
    }

    pub fn is_eisenstein(&self) -> bool {
        let d = self.degree();
        self.coeff_valuation(0) == Some(1) && (1..d).all(|k| self.coeff_valuation(k).map_or(true, |v| v >= 1))
    }

    /// r = D·v_π(θ) when N/M is totally ramified of degree D with v_N(θ) = r.
    pub fn root_level(&self) -> Result<u32> {
        let slopes = self.newton_slopes();
        let d = self.degree() as i64;
        match slopes.as_slice() {
            [(s, _)] if (s * d).is_integer() && s.numer().gcd(&d) == 1 || d == 1 => Ok((s * d).to_integer() as u32),
            _ => Err(Error::UnsupportedExtension(format!(
                "Newton polygon {slopes:?} is not a single slope with denominator {d}"
            ))),
        }
    }

    /// Exponents (a, b) with θ^a π^b a uniformizer of N.
    pub fn uniformizer_exponents(&self) -> Result<(u32, i64)> {
        let r = self.root_level()? as i64;
        let d = self.degree() as i64;
        if d == 1 {
            return Ok((0, 1));
        }
        let a = (1..d).find(|a| (a * r) % d == 1).unwrap();
        Ok((a as u32, (1 - a * r) / d))
    }

    /// h·θ^j mod g for h of degree < D.
    fn mul_theta(&self, h: &[LocalElem]) -> Vec<LocalElem> {
        let d = self.degree();
        let top = h[d - 1].clone();
        let mut out = Vec::with_capacity(d);
        out.push(top.mul(&self.poly[0]).neg());
        for k in 1..d {
            out.push(h[k - 1].sub(&top.mul(&self.poly[k])));
        }
        out
    }

    /// Norm_{N/M}(h(θ)) as the determinant of multiplication by h(θ).
    pub fn norm_element(&self, h: &[LocalElem]) -> Result<LocalElem> {
        let d = self.degree();
        if h.len() > d {
            return Err(Error::UnsupportedExtension(format!("h has degree {} >= {d}", h.len() - 1)));
        }
        let mut col: Vec<LocalElem> = h.to_vec();
        col.resize(d, self.tower.zero());
        let mut cols = Vec::with_capacity(d);
        for j in 0..d {
            if j > 0 {
                col = self.mul_theta(&col);
            }
            cols.push(col.clone());
        }
        // rows indexed by output coordinate
        let a: Vec<Vec<LocalElem>> = (0..d).map(|i| (0..d).map(|j| cols[j][i].clone()).collect()).collect();
        determinant(a)
    }

    /// Norm of an element of M.
    pub fn norm_scalar(&self, c: &LocalElem) -> LocalElem {
        c.pow(self.degree() as u64)
    }
}

/// Determinant by elimination with minimal-valuation pivots.
pub fn determinant(mut a: Vec<Vec<LocalElem>>) -> Result<LocalElem> {
    let d = a.len();
    let tower = a[0][0].tower().clone();
    let mut det = tower.one();
    let mut negate = false;
    for k in 0..d {
        let mut best: Option<(u32, usize, usize)> = None;
        for (r, row) in a.iter().enumerate().skip(k) {
            for (c, x) in row.iter().enumerate().skip(k) {
                let v = x.valuation();
                if v < x.precision() && best.map_or(true, |b| v < b.0) {
                    best = Some((v, r, c));
                }
            }
        }
        let Some((v, r, c)) = best else {
            return Err(Error::ZeroElement);
        };
        if r != k {
            a.swap(r, k);
            negate = !negate;
        }
        if c != k {
            for row in a.iter_mut() {
                row.swap(c, k);
            }
            negate = !negate;
        }
        let pivot = a[k][k].clone();
        let unit_inv = pivot.div_pi_pow(v)?.inv_unit()?;
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in rest {
            if row[k].is_zero() {
                continue;
            }
            let factor = row[k].div_pi_pow(v)?.mul(&unit_inv);
            for (x, y) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..]) {
                *x = x.sub(&factor.mul(y));
            }
        }
        det = det.mul(&pivot);
    }
    Ok(if negate { det.neg() } else { det })
}

/// One generator of N^× used for the norm subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormGenerator {
    pub level: u32,
    pub theta_exp: u32,
    pub pi_exp: i64,
    pub digit: Vec<u32>,
}

/// F_p-row space of digit coordinates of norms, inside M^×/(M^×)^p.
#[derive(Clone, Debug)]
pub struct NormSubgroup {
    tower: Arc<TameTower>,
    span: FpSpan,
    bound: u32,
    generators: usize,
}

impl NormSubgroup {
    pub fn tower(&self) -> &Arc<TameTower> {
        &self.tower
    }

    pub fn span(&self) -> &FpSpan {
        &self.span
    }

    pub fn rank(&self) -> usize {
        self.span.rank()
    }

    pub fn ambient_dim(&self) -> usize {
        self.span.ambient_dim()
    }

    pub fn codim(&self) -> usize {
        self.ambient_dim() - self.rank()
    }

    /// [M^× : Norm_{N/M}(N^×)].
    pub fn index(&self) -> u64 {
        (self.tower.p() as u64).pow(self.codim() as u32)
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    pub fn contains_coordinates(&self, v: &[u32]) -> bool {
        self.span.contains(v)
    }

    pub fn contains(&self, x: &LocalElem) -> Result<bool> {
        Ok(self.span.contains(&self.tower.coordinates_of(x)?))
    }

    /// Whether g maps the row space into itself.
    pub fn is_galois_stable(&self, g: &GaloisElem) -> Result<bool> {
        if !self.tower.galois_valid(g) {
            return Err(Error::NotAnAutomorphism);
        }
        Ok(self.span.rows().iter().all(|row| {
            let d = self.tower.galois_digits(g, &self.tower.from_coordinates(row));
            self.span.contains(&self.tower.coordinates(&d))
        }))
    }

    /// Builds a subgroup directly from coordinate rows.
    pub fn from_rows(tower: &Arc<TameTower>, rows: &[Vec<u32>]) -> Self {
        let mut span = FpSpan::new(tower.p(), tower.digit_dim());
        for r in rows {
            span.insert(r);
        }
        NormSubgroup { tower: tower.clone(), span, bound: 0, generators: rows.len() }
    }
}

/// The generating family of N^× at N-levels 1..=bound, with θ and [l^×].
pub fn generator_family(ext: &WildExtension, bound: u32) -> Result<Vec<NormGenerator>> {
    let d = ext.degree() as i64;
    let r = ext.root_level()? as i64;
    let l = ext.tower.residue_field();
    let mut out = Vec::new();
    for level in 1..=bound as i64 {
        let i = (0..d).find(|&i| (r * i - level).rem_euclid(d) == 0).unwrap();
        let j = (r * i - level) / d;
        for b in FqElem::basis(l) {
            out.push(NormGenerator { level: level as u32, theta_exp: i as u32, pi_exp: j, digit: b.coeffs().to_vec() });
        }
    }
    Ok(out)
}

/// The element of N represented by a generator, as a polynomial in θ
/// (π^j + [a]θ^i for j ≥ 0, else 1 + [a]θ^iπ^{-j}).
pub fn generator_poly(ext: &WildExtension, g: &NormGenerator) -> Vec<LocalElem> {
    let t = &ext.tower;
    let d = ext.degree();
    let a = FqElem::from_coeffs(t.residue_field(), &g.digit);
    let mut h = vec![t.zero(); d];
    let (unit_part, mono) = if g.pi_exp >= 0 {
        (t.pi_pow(g.pi_exp as u32), t.teich(&a))
    } else {
        (t.one(), t.teich(&a).mul_pi_pow((-g.pi_exp) as u32))
    };
    h[0] = unit_part;
    if g.theta_exp == 0 {
        h[0] = h[0].add(&mono);
        return h;
    }
    // θ^i reduced mod g when i ≥ D cannot occur: i < D
    h[g.theta_exp as usize] = mono;
    h
}

/// Default level bound e_N·p/(p−1) for N of degree D over M.
pub fn default_bound(ext: &WildExtension) -> u32 {
    let t = &ext.tower;
    let e_n = t.e() * ext.degree() as u32;
    e_n * t.p() / (t.p() - 1)
}

/// Row space spanned by the coordinates of the norms of the generator family,
/// θ, π and the Teichmüller generator.
pub fn norm_subgroup(ext: &WildExtension, bound: u32) -> Result<NormSubgroup> {
    let t = &ext.tower;
    let d = ext.degree();
    let mut span = FpSpan::new(t.p(), t.digit_dim());
    let mut count = 0;
    let mut add = |x: LocalElem, span: &mut FpSpan| -> Result<()> {
        span.insert(&t.coordinates_of(&x)?);
        count += 1;
        Ok(())
    };
    let mut theta = vec![t.zero(); d];
    if d == 1 {
        theta[0] = ext.poly[0].neg();
        let n = ext.norm_element(&theta);
        if let Ok(n) = n {
            add(n, &mut span)?;
        }
    } else {
        theta[1] = t.one();
        add(ext.norm_element(&theta)?, &mut span)?;
    }
    add(ext.norm_scalar(&t.pi()), &mut span)?;
    add(ext.norm_scalar(&t.teich(&FqElem::gen(t.residue_field()))), &mut span)?;
    for g in generator_family(ext, bound)? {
        let n = ext.norm_element(&generator_poly(ext, &g))?;
        add(n, &mut span)?;
    }
    Ok(NormSubgroup { tower: t.clone(), span, bound, generators: count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_field::{tower_create, UnitSpec};

    #[test]
    fn newton_polygon_of_ia() {
        let t = tower_create(3, 2, 1, 8, &UnitSpec::Int(1), 6).unwrap();
        let ext = WildExtension::from_integers(&t, &[6, 0, 0, 0, 0, 0, 3, 6, 0, 1]).unwrap();
        assert_eq!(ext.newton_slopes(), vec![(Ratio::new(8, 9), 9)]);
        assert_eq!(ext.root_level().unwrap(), 8);
        assert!(!ext.is_eisenstein());
        let (a, b) = ext.uniformizer_exponents().unwrap();
        assert_eq!(8 * a as i64 + 9 * b, 1);
    }

    #[test]
    fn norm_of_theta_and_scalars() {
        let t = tower_create(3, 2, 1, 2, &UnitSpec::Int(-1), 8).unwrap();
        let ext = WildExtension::from_integers(&t, &[3, 3, 0, 1]).unwrap();
        assert_eq!(ext.newton_slopes(), vec![(Ratio::new(2, 3), 3)]);
        let theta = vec![t.zero(), t.one(), t.zero()];
        assert_eq!(ext.norm_element(&theta).unwrap(), t.int(-3));
        let c = t.int(5).add(&t.pi());
        let n = ext.norm_element(std::slice::from_ref(&c)).unwrap();
        assert_eq!(n, c.pow(3).with_precision(n.precision()));
    }

    #[test]
    fn linear_extension_has_index_one() {
        let t = tower_create(3, 2, 1, 2, &UnitSpec::Int(-1), 6).unwrap();
        let ext = WildExtension::from_integers(&t, &[-2, 1]).unwrap();
        let ns = norm_subgroup(&ext, default_bound(&ext)).unwrap();
        assert_eq!(ns.index(), 1);
    }
}
