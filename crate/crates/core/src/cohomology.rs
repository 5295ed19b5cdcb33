//! The basis {c_τ} ∪ {c_un} ∪ {c_tr} of H^1(G_K, F̄_p(χ)) realised as linear
//! functionals on the digit coordinates of M^×/(M^×)^p.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finite_field::{field_create, Embedding, Fq, FqElem};
use crate::linalg::nullspace;
use crate::local_field::{LocalElem, TameTower};
use crate::norm_group::NormSubgroup;
use crate::serre_combinatorics::{basis_labels, BasisLabel, GaloisCharData, LvAhDescriptor};

#[derive(Clone, Debug)]
pub struct BasisData {
    character: GaloisCharData,
    tower: Arc<TameTower>,
    ambient: Fq,
    iota: Embedding,
    mu: FqElem,
    levels: Vec<u32>,
    taus: Vec<usize>,
    has_u_triv: bool,
    has_u_cyc: bool,
}

fn lcm(a: usize, b: usize) -> usize {
    let g = num_integer::gcd(a, b);
    a / g * b
}

/// Builds the basis data; the unramified part of χ is read as μ(Frob_K)
/// for the lift of Frobenius fixing π.
pub fn basis_data(chi: &GaloisCharData, tower: &Arc<TameTower>) -> Result<BasisData> {
    let p = chi.p();
    let f = chi.f();
    if tower.p() != p || tower.f() as usize != f {
        return Err(Error::FieldMismatch);
    }
    let sig = &chi.signature;
    let e = tower.e() as u64;
    let mut levels = Vec::with_capacity(f);
    let mut taus = Vec::with_capacity(f);
    for i in 0..f as i64 {
        let n = sig.n_prime(i, e).ok_or_else(|| Error::TowerTooSmall(format!("e = {e} does not kill χ on inertia")))?;
        if n == 0 {
            return Err(Error::TowerTooSmall(format!("level n'_{i} vanishes")));
        }
        levels.push(n as u32);
        taus.push(sig.tau_prime(i));
    }
    let l = tower.residue_field().clone();
    let (ambient, mu) = match &chi.unramified {
        None => (l.clone(), None),
        Some(u) => {
            let deg = lcm(l.degree(), u.field().degree());
            let amb = if deg == l.degree() { l.clone() } else { field_create(p, deg, None)? };
            (amb.clone(), Some(Embedding::new(u.field(), &amb)?.apply(u)))
        }
    };
    let mu = mu.unwrap_or_else(|| FqElem::one(&ambient));
    if mu.pow(tower.g() as u64) != FqElem::one(&ambient) {
        return Err(Error::TowerTooSmall(format!("unramified part has order not dividing g = {}", tower.g())));
    }
    let has_u_cyc = chi.is_cyclotomic();
    if has_u_cyc && !tower.has_top_digit() {
        return Err(Error::TowerTooSmall("cyclotomic χ needs μ_p in M".into()));
    }
    for &n in &levels {
        if !tower.levels().contains(&n) {
            return Err(Error::LevelMismatch(n));
        }
    }
    let iota = Embedding::new(&l, &ambient)?;
    Ok(BasisData {
        character: chi.clone(),
        tower: tower.clone(),
        ambient,
        iota,
        mu,
        levels,
        taus,
        has_u_triv: chi.is_trivial(),
        has_u_cyc,
    })
}

impl BasisData {
    pub fn character(&self) -> &GaloisCharData {
        &self.character
    }

    pub fn tower(&self) -> &Arc<TameTower> {
        &self.tower
    }

    /// Field of values of the classes.
    pub fn ambient(&self) -> &Fq {
        &self.ambient
    }

    /// n_i'.
    pub fn level(&self, i: usize) -> u32 {
        self.levels[i]
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    /// Index j of τ_i' = τ_j.
    pub fn tau(&self, i: usize) -> usize {
        self.taus[i]
    }

    pub fn has_u_triv(&self) -> bool {
        self.has_u_triv
    }

    pub fn has_u_cyc(&self) -> bool {
        self.has_u_cyc
    }

    pub fn labels(&self) -> Vec<BasisLabel> {
        basis_labels(&self.character)
    }

    pub fn mu(&self) -> &FqElem {
        &self.mu
    }

    /// τ_j extended to l by the fixed embedding: a ↦ ι(a)^{p^j}.
    pub fn embedding(&self, j: usize, a: &FqElem) -> FqElem {
        self.iota.apply(a).frobenius(j)
    }

    /// Σ_{g ∈ Gal(l/k)} μ^{-1}(g) τ̃_i'(g a).
    fn character_sum(&self, i: usize, a: &FqElem) -> FqElem {
        let f = self.tower.f() as usize;
        let mu_inv = self.mu.inv().unwrap();
        let mut coef = FqElem::one(&self.ambient);
        let mut acc = FqElem::zero(&self.ambient);
        for s in 0..self.tower.g() as usize {
            let term = self.embedding(self.taus[i], &a.frobenius(f * s));
            acc = &acc + &(&coef * &term);
            coef = &coef * &mu_inv;
        }
        acc
    }

    /// c_i(E([a]π^n)) for n a basis level.
    pub fn evaluate_dual(&self, i: usize, a: &FqElem, n: u32) -> Result<FqElem> {
        if !self.levels.contains(&n) {
            return Err(Error::LevelMismatch(n));
        }
        if self.levels[i] != n {
            return Ok(FqElem::zero(&self.ambient));
        }
        Ok(self.character_sum(i, a))
    }

    /// χ(g) for g = (frob s, tame t) in Gal(M/K): μ^{s/f}·τ_0'(ζ^t)^{n_0'}.
    pub fn chi_value(&self, frob: usize, tame: u64) -> FqElem {
        let f = self.tower.f() as usize;
        let z = self.embedding(self.taus[0], &self.tower.zeta().pow(tame));
        &self.mu.pow((frob / f) as u64) * &z.pow(self.levels[0] as u64)
    }

    /// The functional of a basis label on the coordinate vector space.
    pub fn functional(&self, label: BasisLabel) -> Result<Vec<FqElem>> {
        let t = &self.tower;
        let mut v = vec![FqElem::zero(&self.ambient); t.digit_dim()];
        match label {
            BasisLabel::Tau(i) if i < self.levels.len() => {
                let m = t.residue_field().degree();
                let pos =
                    t.levels().iter().position(|&x| x == self.levels[i]).ok_or(Error::LevelMismatch(self.levels[i]))?;
                for k in 0..m {
                    let mut c = vec![0; m];
                    c[k] = 1;
                    v[1 + pos * m + k] = self.character_sum(i, &FqElem::from_coeffs(t.residue_field(), &c));
                }
            }
            BasisLabel::Un if self.has_u_triv => v[0] = FqElem::one(&self.ambient),
            BasisLabel::Tr if self.has_u_cyc => {
                let last = v.len() - 1;
                v[last] = FqElem::one(&self.ambient);
            }
            _ => return Err(Error::BasisMismatch),
        }
        Ok(v)
    }

    fn pair(&self, func: &[FqElem], coords: &[u32]) -> FqElem {
        func.iter().zip(coords).fold(FqElem::zero(&self.ambient), |acc, (c, &x)| &acc + &c.scale(x))
    }

    /// Value of a basis class on an element of M^×.
    pub fn evaluate_label(&self, label: BasisLabel, x: &LocalElem) -> Result<FqElem> {
        let coords = self.tower.coordinates_of(x)?;
        Ok(self.pair(&self.functional(label)?, &coords))
    }

    pub fn evaluate(&self, cv: &ClassVector, x: &LocalElem) -> Result<FqElem> {
        self.check(cv)?;
        let coords = self.tower.coordinates_of(x)?;
        let mut acc = FqElem::zero(&self.ambient);
        for (label, c) in cv.labels.iter().zip(&cv.coords) {
            acc = &acc + &(c * &self.pair(&self.functional(*label)?, &coords));
        }
        Ok(acc)
    }

    fn check(&self, cv: &ClassVector) -> Result<()> {
        if cv.labels != self.labels() || cv.coords.iter().any(|c| c.field() != &self.ambient) {
            return Err(Error::BasisMismatch);
        }
        Ok(())
    }

    /// The class Σ x_k c_k with the given coordinates.
    pub fn class(&self, coords: Vec<FqElem>) -> Result<ClassVector> {
        let cv = ClassVector { labels: self.labels(), coords, up_to_scalar: false };
        if cv.coords.len() != cv.labels.len() {
            return Err(Error::BasisMismatch);
        }
        self.check(&cv)?;
        Ok(cv)
    }

    pub fn basis_class(&self, label: BasisLabel) -> Result<ClassVector> {
        let labels = self.labels();
        let k = labels.iter().position(|&l| l == label).ok_or(Error::BasisMismatch)?;
        let mut coords = vec![FqElem::zero(&self.ambient); labels.len()];
        coords[k] = FqElem::one(&self.ambient);
        self.class(coords)
    }
}

/// Coordinates of a class in the basis {c_τ0, …, c_τ(f−1)} ∪ {c_un} ∪ {c_tr}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassVector {
    pub labels: Vec<BasisLabel>,
    pub coords: Vec<FqElem>,
    pub up_to_scalar: bool,
}

impl ClassVector {
    pub fn support(&self) -> BTreeSet<BasisLabel> {
        self.labels.iter().zip(&self.coords).filter(|(_, c)| !c.is_zero()).map(|(l, _)| *l).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Scaled so that the first nonzero coordinate is 1.
    pub fn normalized(&self) -> ClassVector {
        let mut out = self.clone();
        if let Some(lead) = self.coords.iter().find(|c| !c.is_zero()) {
            let inv = lead.inv().unwrap();
            out.coords = self.coords.iter().map(|c| c * &inv).collect();
        }
        out
    }

    /// Equality of spanned lines.
    pub fn same_line(&self, other: &ClassVector) -> bool {
        self.labels == other.labels && self.normalized().coords == other.normalized().coords
    }
}

/// The class whose kernel contains the norm subgroup, up to scalar.
pub fn class_from_norm_subgroup(ns: &NormSubgroup, bd: &BasisData) -> Result<ClassVector> {
    if !Arc::ptr_eq(ns.tower(), bd.tower()) {
        return Err(Error::BasisMismatch);
    }
    if ns.index() == 1 {
        let q = (bd.tower.p() as u64).pow(bd.tower.f());
        return Err(Error::IndexMismatch { expected: q, found: 1 });
    }
    let labels = bd.labels();
    let funcs: Vec<Vec<FqElem>> = labels.iter().map(|&l| bd.functional(l)).collect::<Result<_>>()?;
    let rows: Vec<Vec<FqElem>> =
        ns.span().rows().iter().map(|r| funcs.iter().map(|f| bd.pair(f, r)).collect()).collect();
    let ker = nullspace(&bd.ambient, &rows, labels.len());
    if ker.len() != 1 {
        return Err(Error::AmbiguousKernel(ker.len()));
    }
    let cv = ClassVector { labels, coords: ker.into_iter().next().unwrap(), up_to_scalar: true };
    Ok(cv.normalized())
}

/// Least s with the class in Fil^s.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FilDegree {
    /// The zero class lies in every step.
    Zero,
    At(Ratio<i64>),
}

impl Serialize for FilDegree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FilDegree::Zero => s.serialize_none(),
            FilDegree::At(r) => s.serialize_str(&r.to_string()),
        }
    }
}

pub fn label_degree(bd: &BasisData, label: BasisLabel) -> Ratio<i64> {
    let p = bd.tower.p() as i64;
    match label {
        BasisLabel::Tau(i) => Ratio::new(bd.tower.e() as i64 + bd.levels[i] as i64, bd.tower.e() as i64),
        BasisLabel::Un => Ratio::from_integer(0),
        BasisLabel::Tr => Ratio::new(2 * p - 1, p - 1),
    }
}

pub fn filtration_degree(cv: &ClassVector, bd: &BasisData) -> FilDegree {
    cv.support().into_iter().map(|l| label_degree(bd, l)).max().map_or(FilDegree::Zero, FilDegree::At)
}

/// Whether the class lies in L_V^AH for the descriptor.
pub fn in_lv_ah(cv: &ClassVector, bd: &BasisData, desc: &LvAhDescriptor) -> Result<bool> {
    bd.check(cv)?;
    if desc.index_set.iter().any(|&i| i >= bd.tower.f() as usize) {
        return Err(Error::BasisMismatch);
    }
    Ok(cv.support().is_subset(&desc.labels(&bd.character)))
}
