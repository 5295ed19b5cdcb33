//! Tame signatures, filtration jumps, admissibility and the weight recipe.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Ratio;
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finite_field::{is_prime, FqElem};

/// Subset of Z/fZ.
pub type IndexSet = BTreeSet<usize>;

fn modf(i: i64, f: usize) -> usize {
    i.rem_euclid(f as i64) as usize
}

/// All subsets of Z/fZ, ordered by bitmask.
pub fn all_subsets(f: usize) -> Vec<IndexSet> {
    (0u32..1 << f).map(|mask| (0..f).filter(|i| mask >> i & 1 == 1).collect()).collect()
}

/// Shift every index by `k` mod f.
pub fn rotate_set(j: &IndexSet, k: i64, f: usize) -> IndexSet {
    j.iter().map(|&i| modf(i as i64 + k, f)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TameSignature {
    p: u32,
    a: Vec<u32>,
}

impl TameSignature {
    pub fn new(p: u32, a: Vec<u32>) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if a.is_empty() {
            return Err(Error::InvalidSignature("empty signature".into()));
        }
        if a.iter().any(|&x| x < 1 || x > p) {
            return Err(Error::InvalidSignature(format!("entries must lie in 1..={p}")));
        }
        if a.iter().all(|&x| x == p) {
            return Err(Error::InvalidSignature("all entries equal p".into()));
        }
        Ok(TameSignature { p, a })
    }

    /// Signature of ω_{f,0}^n restricted to inertia.
    pub fn from_exponent(p: u32, f: usize, n: i64) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        let q1 = (p as i64).pow(f as u32) - 1;
        // n - (1 + p + ... + p^{f-1}) in 0..q1, then digits + 1
        let ones = q1 / (p as i64 - 1);
        let mut r = (n - ones).rem_euclid(q1.max(1)) as u64;
        if q1 == 1 {
            r = 0;
        }
        let mut a = Vec::with_capacity(f);
        for _ in 0..f {
            a.push((r % p as u64) as u32 + 1);
            r /= p as u64;
        }
        TameSignature::new(p, a)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn f(&self) -> usize {
        self.a.len()
    }

    pub fn digits(&self) -> &[u32] {
        &self.a
    }

    /// a_i with i read mod f.
    pub fn a(&self, i: i64) -> u32 {
        self.a[modf(i, self.f())]
    }

    /// p^f - 1.
    pub fn q1(&self) -> u64 {
        (self.p as u64).pow(self.f() as u32) - 1
    }

    pub fn n(&self, i: i64) -> u64 {
        let p = self.p as u64;
        (0..self.f()).rev().fold(0, |acc, j| acc * p + self.a(i + j as i64) as u64)
    }

    pub fn period(&self) -> usize {
        let f = self.f();
        (1..=f).find(|&k| f % k == 0 && self.rotate(k as i64) == *self).unwrap_or(f)
    }

    /// Frob^k applied: a'_i = a_{i-k}.
    pub fn rotate(&self, k: i64) -> TameSignature {
        let a = (0..self.f()).map(|i| self.a(i as i64 - k)).collect();
        TameSignature { p: self.p, a }
    }

    /// Lexicographically least rotation and the shift producing it.
    pub fn canonical(&self) -> (TameSignature, usize) {
        (0..self.f()).map(|k| (self.rotate(k as i64), k)).min().expect("nonempty signature")
    }

    pub fn is_generic(&self) -> bool {
        self.a.iter().all(|&x| x < self.p)
    }

    pub fn is_primitive(&self) -> bool {
        self.period() == self.f()
    }

    pub fn is_trivial_on_inertia(&self) -> bool {
        self.a.iter().all(|&x| x == self.p - 1)
    }

    pub fn is_cyclotomic_on_inertia(&self) -> bool {
        self.a.iter().all(|&x| x == 1)
    }

    fn chain_end(&self, i: i64) -> i64 {
        // least j > i with a_{j+1} != p-1
        let mut j = i + 1;
        while self.a(j + 1) == self.p - 1 {
            j += 1;
        }
        j
    }

    /// Embedding index τ_i' as an element of Z/fZ.
    pub fn tau_prime(&self, i: i64) -> usize {
        if self.a(i + 1) != self.p {
            modf(i + 1, self.f())
        } else {
            modf(self.chain_end(i) + 1, self.f())
        }
    }

    /// n_i' for ramification index e, or None if e·n/(p^f-1) is not integral.
    pub fn n_prime(&self, i: i64, e: u64) -> Option<u64> {
        let q1 = self.q1();
        let (n, sub) = if self.a(i + 1) != self.p { (self.n(i + 1), 0) } else { (self.n(self.chain_end(i) + 1), e) };
        let num = e as u128 * n as u128;
        if num % q1 as u128 != 0 {
            return None;
        }
        Some((num / q1 as u128) as u64 - sub)
    }
}

impl fmt::Display for TameSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.a.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A character G_K -> F̄_p^×: inertial signature plus the value of the
/// unramified part on Frob_K (`None` when that part is trivial).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GaloisCharData {
    pub signature: TameSignature,
    pub unramified: Option<FqElem>,
}

impl GaloisCharData {
    pub fn new(signature: TameSignature, unramified: Option<FqElem>) -> Self {
        let unramified = unramified.filter(|u| !u.is_one());
        GaloisCharData { signature, unramified }
    }

    pub fn from_signature(signature: TameSignature) -> Self {
        GaloisCharData::new(signature, None)
    }

    pub fn trivial(p: u32, f: usize) -> Result<Self> {
        Ok(Self::from_signature(TameSignature::new(p, vec![p - 1; f])?))
    }

    pub fn cyclotomic(p: u32, f: usize) -> Result<Self> {
        Ok(Self::from_signature(TameSignature::new(p, vec![1; f])?))
    }

    pub fn p(&self) -> u32 {
        self.signature.p()
    }

    pub fn f(&self) -> usize {
        self.signature.f()
    }

    /// Exponent n_0 with χ|_I = ω_{f,0}^{n_0}.
    pub fn exponent(&self) -> u64 {
        self.signature.n(0)
    }

    pub fn is_trivial(&self) -> bool {
        self.signature.is_trivial_on_inertia() && self.unramified.is_none()
    }

    pub fn is_cyclotomic(&self) -> bool {
        self.signature.is_cyclotomic_on_inertia() && self.unramified.is_none()
    }

    pub fn is_cyclotomic_on_inertia(&self) -> bool {
        self.signature.is_cyclotomic_on_inertia()
    }

    /// χ1 χ2^{-1}.
    pub fn quotient(&self, other: &GaloisCharData) -> Result<GaloisCharData> {
        let (p, f) = (self.p(), self.f());
        if other.p() != p || other.f() != f {
            return Err(Error::FieldMismatch);
        }
        let q1 = self.signature.q1() as i64;
        let n = (self.exponent() as i64 - other.exponent() as i64).rem_euclid(q1.max(1));
        let sig = TameSignature::from_exponent(p, f, n)?;
        let unr = match (&self.unramified, &other.unramified) {
            (None, None) => None,
            (Some(u), None) => Some(u.clone()),
            (None, Some(v)) => Some(v.inv()?),
            (Some(u), Some(v)) => {
                if u.field() != v.field() {
                    return Err(Error::FieldMismatch);
                }
                Some(u.div(v)?)
            }
        };
        Ok(GaloisCharData::new(sig, unr))
    }

    pub fn rotate(&self, k: i64) -> GaloisCharData {
        GaloisCharData { signature: self.signature.rotate(k), unramified: self.unramified.clone() }
    }
}

/// V_{d,b} = ⊗_i (det^{d_i} ⊗ Sym^{b_i - 1}) ⊗_{k,τ_i} F̄_p.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SerreWeight {
    p: u32,
    d: Vec<u32>,
    b: Vec<u32>,
}

impl SerreWeight {
    pub fn new(p: u32, d: Vec<u32>, b: Vec<u32>) -> Result<Self> {
        if d.len() != b.len() || d.is_empty() {
            return Err(Error::InvalidSignature("weight vectors differ in length".into()));
        }
        if d.iter().any(|&x| x > p - 1) || d.iter().all(|&x| x == p - 1) {
            return Err(Error::InvalidSignature("d must lie in 0..p-1, not all p-1".into()));
        }
        if b.iter().any(|&x| x < 1 || x > p) {
            return Err(Error::InvalidSignature("b must lie in 1..=p".into()));
        }
        Ok(SerreWeight { p, d, b })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn f(&self) -> usize {
        self.d.len()
    }

    pub fn d(&self) -> &[u32] {
        &self.d
    }

    pub fn b(&self) -> &[u32] {
        &self.b
    }

    fn d_exponent(&self) -> u64 {
        let p = self.p as u64;
        self.d.iter().rev().fold(0, |acc, &x| acc * p + x as u64)
    }

    fn b_exponent(&self, j: &IndexSet, inside: bool) -> u64 {
        let p = self.p as u64;
        (0..self.f()).rev().fold(0, |acc, i| acc * p + if j.contains(&i) == inside { self.b[i] as u64 } else { 0 })
    }

    /// Relabel by Frob^k, matching `TameSignature::rotate`.
    pub fn rotate(&self, k: i64) -> SerreWeight {
        let f = self.f();
        let pick = |v: &[u32]| (0..f).map(|i| v[modf(i as i64 - k, f)]).collect();
        SerreWeight { p: self.p, d: pick(&self.d), b: pick(&self.b) }
    }

    /// V ⊗ det^k, with det^k read through ω_{f,0}^k: d ↦ d + k in base p, mod p^f − 1.
    pub fn twist(&self, k: i64) -> SerreWeight {
        let p = self.p as u64;
        let q1 = p.pow(self.f() as u32) - 1;
        let mut r = (self.d_exponent() as i64 + k).rem_euclid(q1 as i64) as u64;
        let d = (0..self.f())
            .map(|_| {
                let x = (r % p) as u32;
                r /= p;
                x
            })
            .collect();
        SerreWeight { p: self.p, d, b: self.b.clone() }
    }

    /// Parse "[d0,d1;b0,b1]".
    pub fn parse(p: u32, s: &str) -> Result<Self> {
        let bad = || Error::Parse(s.to_string());
        let inner = s.trim().strip_prefix('[').and_then(|t| t.strip_suffix(']')).ok_or_else(bad)?;
        let (ds, bs) = inner.split_once(';').ok_or_else(bad)?;
        let nums = |t: &str| -> Result<Vec<u32>> {
            t.split(',').map(|x| x.trim().parse::<u32>().map_err(|_| bad())).collect()
        };
        SerreWeight::new(p, nums(ds)?, nums(bs)?)
    }
}

impl fmt::Display for SerreWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u32]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "[{};{}]", join(&self.d), join(&self.b))
    }
}

impl Serialize for SerreWeight {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct WeightPairSet {
    pub pairs: Vec<(SerreWeight, IndexSet)>,
}

impl WeightPairSet {
    /// Distinct weights, sorted.
    pub fn weights(&self) -> Vec<SerreWeight> {
        let set: BTreeSet<_> = self.pairs.iter().map(|(v, _)| v.clone()).collect();
        set.into_iter().collect()
    }

    /// S_V: the J paired with `v`.
    pub fn subsets_for(&self, v: &SerreWeight) -> Vec<IndexSet> {
        self.pairs.iter().filter(|(w, _)| w == v).map(|(_, j)| j.clone()).collect()
    }

    pub fn contains(&self, v: &SerreWeight, j: &IndexSet) -> bool {
        self.pairs.iter().any(|(w, k)| w == v && k == j)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationDims {
    pub p: u32,
    /// Nonzero d_s keyed by s; s = 0 carries the unramified line.
    pub dims: BTreeMap<Ratio<i64>, usize>,
    pub trivial: bool,
    pub cyclotomic: bool,
}

impl FiltrationDims {
    pub fn total(&self) -> usize {
        self.dims.values().sum()
    }

    /// dim Fil^s.
    pub fn fil(&self, s: Ratio<i64>) -> usize {
        self.dims.range(..=s).map(|(_, d)| d).sum()
    }

    /// dim Fil^{<s}.
    pub fn fil_lt(&self, s: Ratio<i64>) -> usize {
        self.dims.range(..s).map(|(_, d)| d).sum()
    }

    pub fn get(&self, s: Ratio<i64>) -> usize {
        self.dims.get(&s).copied().unwrap_or(0)
    }
}

impl Serialize for FiltrationDims {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Jump {
            s: String,
            dim: usize,
        }
        let mut seq = s.serialize_seq(Some(self.dims.len()))?;
        for (k, &dim) in &self.dims {
            seq.serialize_element(&Jump { s: k.to_string(), dim })?;
        }
        seq.end()
    }
}

/// Dimensions of the jumps gr^s H^1(G_K, F̄_p(χ)).
pub fn filtration_dims(chi: &GaloisCharData) -> FiltrationDims {
    let sig = &chi.signature;
    let (p, f) = (sig.p(), sig.f() as i64);
    let q1 = sig.q1() as i64;
    let pi = p as i64;
    let mut dims = BTreeMap::new();
    if chi.is_trivial() {
        *dims.entry(Ratio::from_integer(0)).or_insert(0) += 1;
    }
    for i in 0..f {
        if sig.a(i) == p {
            let mut k = 1;
            while sig.a(i + k) == p - 1 {
                k += 1;
            }
            *dims.entry(Ratio::new(sig.n(i + k) as i64, q1)).or_insert(0) += 1;
        } else {
            *dims.entry(Ratio::new(q1 + sig.n(i) as i64, q1)).or_insert(0) += 1;
        }
    }
    if chi.is_cyclotomic() {
        *dims.entry(Ratio::new(2 * pi - 1, pi - 1)).or_insert(0) += 1;
    }
    FiltrationDims { p, dims, trivial: chi.is_trivial(), cyclotomic: chi.is_cyclotomic() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SubspaceDims {
    pub un: usize,
    pub gt: usize,
    pub fl: usize,
    pub cg: usize,
    pub ty: usize,
    pub total: usize,
}

pub fn subspace_dims(chi: &GaloisCharData) -> SubspaceDims {
    let fd = filtration_dims(chi);
    let p = chi.p() as i64;
    let flat = Ratio::new(p, p - 1);
    SubspaceDims {
        un: fd.fil(Ratio::from_integer(1)),
        gt: fd.fil_lt(flat),
        fl: fd.fil(flat),
        cg: fd.fil(Ratio::from_integer(2)),
        ty: fd.fil_lt(Ratio::from_integer(1) + flat),
        total: fd.total(),
    }
}

pub fn dependent_pairs(sig: &TameSignature) -> BTreeSet<(usize, usize)> {
    let (p, f) = (sig.p(), sig.f() as i64);
    let mut out = BTreeSet::new();
    for i in 0..f {
        if sig.a(i + 1) != p {
            continue;
        }
        for t in 1..f {
            if sig.a(i + t + 1) == p {
                continue;
            }
            let ok = (1..=t)
                .any(|s| (i + 2..=i + s).all(|k| sig.a(k) == p - 1) && (i + s + 1..=i + t).all(|k| sig.a(k) == p));
            if ok {
                out.insert((modf(i, f as usize), modf(i + t, f as usize)));
            }
        }
    }
    out
}

pub fn is_admissible(sig: &TameSignature, j: &IndexSet) -> bool {
    dependent_pairs(sig).iter().all(|(lo, hi)| !j.contains(hi) || j.contains(lo))
}

/// δ on integers: the start of a (p, p-1, ..., p-1) run ending at j.
pub fn delta(sig: &TameSignature, j: i64) -> i64 {
    let p = sig.p();
    let mut k = j;
    for _ in 0..sig.f() {
        match sig.a(k) {
            x if x == p => return k - 1,
            x if x == p - 1 => k -= 1,
            _ => return j,
        }
    }
    j
}

pub fn delta_set(sig: &TameSignature, j: &IndexSet) -> IndexSet {
    j.iter().map(|&i| modf(delta(sig, i as i64), sig.f())).collect()
}

/// Valid first choices [i_1] ∈ δ(J) ∖ J.
pub fn mu_choices(sig: &TameSignature, j: &IndexSet) -> Vec<usize> {
    delta_set(sig, j).difference(j).copied().collect()
}

/// μ(J) built from a given starting index i_1; None if i_1 is not a valid choice.
pub fn mu_shift_from(sig: &TameSignature, j: &IndexSet, i1: usize) -> Option<IndexSet> {
    let f = sig.f() as i64;
    if j.contains(&i1) || !delta_set(sig, j).contains(&i1) {
        return None;
    }
    let i1 = i1 as i64;
    let j1 = (i1 + 1..=i1 + f).find(|&x| j.contains(&modf(x, f as usize)) && delta(sig, x) == i1)?;
    let lifts: Vec<i64> = (j1..j1 + f).filter(|&x| j.contains(&modf(x, f as usize))).collect();
    let mut prev = i1;
    let mut out = IndexSet::new();
    out.insert(modf(i1, f as usize));
    for &jk in &lifts[1..] {
        let d = delta(sig, jk);
        prev = if prev < d { d } else { jk };
        out.insert(modf(prev, f as usize));
    }
    Some(out)
}

pub fn mu_shift(sig: &TameSignature, j: &IndexSet) -> IndexSet {
    match mu_choices(sig, j).first() {
        None => j.clone(),
        Some(&i1) => mu_shift_from(sig, j, i1).expect("i_1 drawn from δ(J) ∖ J"),
    }
}

fn weight_from_d_exponent(p: u32, f: usize, dexp: u64, b: Vec<u32>) -> SerreWeight {
    let mut r = dexp;
    let d = (0..f)
        .map(|_| {
            let x = (r % p as u64) as u32;
            r /= p as u64;
            x
        })
        .collect();
    SerreWeight { p, d, b }
}

fn b_vectors(p: u32, f: usize) -> impl Iterator<Item = Vec<u32>> {
    let count = (p as u64).pow(f as u32);
    (0..count).map(move |mut idx| {
        (0..f)
            .map(|_| {
                let x = (idx % p as u64) as u32 + 1;
                idx /= p as u64;
                x
            })
            .collect()
    })
}

/// W'(χ1, χ2).
pub fn weight_pairs(chi1: &GaloisCharData, chi2: &GaloisCharData) -> WeightPairSet {
    let (p, f) = (chi1.p(), chi1.f());
    let q1 = chi1.signature.q1().max(1) as i64;
    let (n1, n2) = (chi1.exponent() as i64, chi2.exponent() as i64);
    let subsets = all_subsets(f);
    let mut pairs = Vec::new();
    for j in &subsets {
        for b in b_vectors(p, f) {
            let probe = SerreWeight { p, d: vec![0; f], b: b.clone() };
            let x = probe.b_exponent(j, true) as i64;
            let y = probe.b_exponent(j, false) as i64;
            let dexp = (n1 - x).rem_euclid(q1);
            if (n2 - y - dexp).rem_euclid(q1) != 0 {
                continue;
            }
            let dexp = if q1 == 1 { 0 } else { dexp as u64 };
            pairs.push((weight_from_d_exponent(p, f, dexp, b), j.clone()));
        }
    }
    pairs.sort();
    WeightPairSet { pairs }
}

/// S_V(χ1, χ2), computed directly for a single weight.
pub fn subsets_for_weight(v: &SerreWeight, chi1: &GaloisCharData, chi2: &GaloisCharData) -> Vec<IndexSet> {
    let q1 = chi1.signature.q1().max(1) as i64;
    let dexp = v.d_exponent() as i64;
    all_subsets(v.f())
        .into_iter()
        .filter(|j| {
            let e1 = dexp + v.b_exponent(j, true) as i64 - chi1.exponent() as i64;
            let e2 = dexp + v.b_exponent(j, false) as i64 - chi2.exponent() as i64;
            e1.rem_euclid(q1) == 0 && e2.rem_euclid(q1) == 0
        })
        .collect()
}

/// The two conditions singling out J_max among S_V.
pub fn satisfies_j_max_conditions(v: &SerreWeight, j: &IndexSet) -> bool {
    let (p, f) = (v.p(), v.f() as i64);
    let b = |i: i64| v.b[modf(i, f as usize)];
    let inj = |i: i64| j.contains(&modf(i, f as usize));
    for i in 0..f {
        if b(i) != p {
            continue;
        }
        for jj in i + 1..i + f {
            if (i + 1..jj).any(|k| b(k) != p - 1) {
                break;
            }
            if b(jj) == 1 && (i..jj).all(|k| !inj(k)) && inj(jj) {
                return false;
            }
        }
    }
    let all = |x: u32| v.b.iter().all(|&y| y == x);
    if (all(p - 1) || (p == 2 && all(2))) && j.is_empty() {
        return false;
    }
    true
}

pub fn j_max(v: &SerreWeight, chi1: &GaloisCharData, chi2: &GaloisCharData) -> Option<IndexSet> {
    let cands = subsets_for_weight(v, chi1, chi2);
    let first = cands.first()?.clone();
    Some(cands.into_iter().find(|j| satisfies_j_max_conditions(v, j)).unwrap_or(first))
}

/// Labels of the basis {c_τ} ∪ {c_un} ∪ {c_tr} of H^1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BasisLabel {
    Tau(usize),
    Un,
    Tr,
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::Tau(i) => write!(f, "c_tau{i}"),
            BasisLabel::Un => write!(f, "c_un"),
            BasisLabel::Tr => write!(f, "c_tr"),
        }
    }
}

pub fn basis_labels(chi: &GaloisCharData) -> Vec<BasisLabel> {
    let mut out: Vec<_> = (0..chi.f()).map(BasisLabel::Tau).collect();
    if chi.is_trivial() {
        out.push(BasisLabel::Un);
    }
    if chi.is_cyclotomic() {
        out.push(BasisLabel::Tr);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LvAhDescriptor {
    pub index_set: IndexSet,
    pub include_unramified: bool,
    pub full_space: bool,
}

impl LvAhDescriptor {
    /// Basis labels spanning L_V^AH.
    pub fn labels(&self, chi: &GaloisCharData) -> BTreeSet<BasisLabel> {
        if self.full_space {
            return basis_labels(chi).into_iter().collect();
        }
        let mut out: BTreeSet<_> = self.index_set.iter().map(|&i| BasisLabel::Tau(i)).collect();
        if self.include_unramified {
            out.insert(BasisLabel::Un);
        }
        out
    }
}

pub fn lv_ah_descriptor(v: &SerreWeight, chi1: &GaloisCharData, chi2: &GaloisCharData) -> Result<LvAhDescriptor> {
    let jm = j_max(v, chi1, chi2).ok_or(Error::WeightNotInRecipe)?;
    let chi = chi1.quotient(chi2)?;
    let p = v.p();
    let full_space = chi.is_cyclotomic() && jm.len() == v.f() && v.b.iter().all(|&x| x == p);
    Ok(LvAhDescriptor { index_set: mu_shift(&chi.signature, &jm), include_unramified: chi.is_trivial(), full_space })
}

/// A class known only through which basis vectors it involves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymbolicClass {
    Zero,
    Generic,
    Support(BTreeSet<BasisLabel>),
}

impl SymbolicClass {
    pub fn support(&self, chi: &GaloisCharData) -> BTreeSet<BasisLabel> {
        match self {
            SymbolicClass::Zero => BTreeSet::new(),
            SymbolicClass::Generic => basis_labels(chi).into_iter().collect(),
            SymbolicClass::Support(s) => s.clone(),
        }
    }

    pub fn in_span(&self, chi: &GaloisCharData, desc: &LvAhDescriptor) -> bool {
        self.support(chi).is_subset(&desc.labels(chi))
    }
}

/// W^AH(ρ) for ρ an extension of χ2 by χ1 whose class is judged by `oracle`.
pub fn weights_reducible<F>(chi1: &GaloisCharData, chi2: &GaloisCharData, oracle: F) -> Vec<SerreWeight>
where
    F: Fn(&LvAhDescriptor) -> bool,
{
    weight_pairs(chi1, chi2)
        .weights()
        .into_iter()
        .filter(|v| lv_ah_descriptor(v, chi1, chi2).map(|d| oracle(&d)).unwrap_or(false))
        .collect()
}

/// W(ρ) for irreducible ρ with ρ|_I ~ ψ^a ⊕ ψ^{p^f a}, ψ of niveau 2f.
pub fn weights_irreducible(p: u32, f: usize, a: u64) -> Result<Vec<SerreWeight>> {
    if !is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    let pf = (p as u64).pow(f as u32);
    let big = pf * pf - 1;
    if a % (pf + 1) == 0 {
        return Err(Error::ReducibleInput);
    }
    let a = a % big;
    let q1 = pf - 1;
    let mut out = BTreeSet::new();
    for b in b_vectors(p, f) {
        for mask in 0u32..1 << f {
            // J' picks i or i + f over each i
            let x = (0..f).fold(0u64, |acc, i| {
                let pos = if mask >> i & 1 == 1 { i + f } else { i };
                (acc + b[i] as u64 * (p as u64).pow(pos as u32)) % big
            });
            let rest = (a + big - x) % big;
            if rest % (pf + 1) != 0 {
                continue;
            }
            let dexp = (rest / (pf + 1)) % q1.max(1);
            out.insert(weight_from_d_exponent(p, f, if q1 == 1 { 0 } else { dexp }, b.clone()));
        }
    }
    Ok(out.into_iter().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum QpClassKind {
    Split,
    NonSplit,
    PeuRamifiee,
    NotPeuRamifiee,
}

impl QpClassKind {
    /// Symbolic class for the f = 1 basis.
    pub fn class(self, chi: &GaloisCharData) -> SymbolicClass {
        match self {
            QpClassKind::Split => SymbolicClass::Zero,
            QpClassKind::NonSplit => SymbolicClass::Generic,
            QpClassKind::PeuRamifiee if chi.is_cyclotomic() => {
                SymbolicClass::Support([BasisLabel::Tau(0)].into_iter().collect())
            }
            QpClassKind::NotPeuRamifiee if chi.is_cyclotomic() => {
                SymbolicClass::Support([BasisLabel::Tau(0), BasisLabel::Tr].into_iter().collect())
            }
            _ => SymbolicClass::Generic,
        }
    }
}

/// The classical answer over Q_p, for ρ|_I ~ (ω^a *; 0 1).
pub fn weights_qp(
    p: u32,
    a: u32,
    chi_is_cyclotomic: bool,
    chi_is_trivial: bool,
    kind: QpClassKind,
) -> Vec<SerreWeight> {
    debug_assert!(!chi_is_trivial || a == p - 1);
    let w = |d: u32, b: u32| SerreWeight { p, d: vec![d], b: vec![b] };
    let split = kind == QpClassKind::Split;
    let not_peu = chi_is_cyclotomic && matches!(kind, QpClassKind::NotPeuRamifiee | QpClassKind::NonSplit);
    let mut out = if 1 < a && a < p - 1 && !split {
        vec![w(0, a)]
    } else if 1 < a && a + 2 < p && split {
        vec![w(0, a), w(a, p - 1 - a)]
    } else if a + 2 == p && p > 3 && split {
        vec![w(0, p - 2), w(p - 2, p), w(p - 2, 1)]
    } else if a == p - 1 && p > 2 {
        vec![w(0, p - 1)]
    } else if a == 1 && not_peu {
        vec![w(0, p)]
    } else if a == 1 && p > 3 && split {
        vec![w(0, p), w(0, 1), w(1, p - 2)]
    } else if a == 1 && p == 3 && split {
        vec![w(0, 3), w(0, 1), w(1, 3), w(1, 1)]
    } else {
        vec![w(0, p), w(0, 1)]
    };
    out.sort();
    out.dedup();
    out
}
