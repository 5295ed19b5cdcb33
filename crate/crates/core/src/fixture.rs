//! Norm-pipeline fixtures: a tower, a defining polynomial for N/M and the
//! expected outcome, loaded from JSON and replayed end to end.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::cohomology::{
    basis_data, class_from_norm_subgroup, filtration_degree, in_lv_ah, BasisData, ClassVector, FilDegree,
};
use crate::error::{Error, Result};
use crate::finite_field::{field_create, Embedding, Fq, FqElem};
use crate::local_field::{tower_over, GaloisElem, LocalElem, TameTower, UnitSpec};
use crate::norm_group::{default_bound, norm_subgroup, NormSubgroup, WildExtension};
use crate::serre_combinatorics::{weights_reducible, GaloisCharData, SerreWeight, TameSignature};

/// Environment variable naming the fixture directory.
pub const FIXTURE_DIR_VAR: &str = "SERRE_AH_FIXTURES";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum UnitJson {
    Int(i64),
    /// ±[a], a written as in `FqElem::parse`.
    Teichmuller {
        a: String,
        negate: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerJson {
    pub p: u32,
    pub f: u32,
    pub g: u32,
    pub e: u32,
    pub unit: UnitJson,
    pub precision: u32,
}

/// 1 + Σ coef·[a^power]·π^level; membership must equal `expected` for every
/// a ∈ l^×.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MembershipJson {
    pub name: String,
    /// (coef, power, level) triples.
    pub terms: Vec<(i64, u64, u32)>,
    pub expected: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    #[default]
    Pass,
    Open,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub label: String,
    #[serde(default)]
    pub expected: Expectation,
    #[serde(default)]
    pub provenance: String,
    pub tower: TowerJson,
    /// Coefficients g_0..g_D, each Σ c_j π^j with integer c_j.
    pub poly: Vec<Vec<i64>>,
    #[serde(default)]
    pub bound: Option<u32>,
    pub expected_index: u64,
    pub signature: Vec<u32>,
    /// Unramified part of χ on Frob_K, if nontrivial.
    #[serde(default)]
    pub mu: Option<String>,
    /// Exponent k of the tame twist applied to the normalized weights.
    #[serde(default)]
    pub twist: i64,
    #[serde(default)]
    pub slope: Option<String>,
    #[serde(default)]
    pub expected_support: Option<Vec<String>>,
    pub expected_weights: Vec<String>,
    #[serde(default)]
    pub memberships: Vec<MembershipJson>,
}

impl Fixture {
    pub fn from_json(s: &str) -> Result<Fixture> {
        serde_json::from_str(s).map_err(|e| Error::Fixture(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Fixture> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::Fixture(format!("{}: {e}", path.display())))?;
        Self::from_json(&s)
    }

    /// Residue field l of the fixture tower.
    pub fn residue_field(&self) -> Result<Fq> {
        field_create(self.tower.p, (self.tower.f * self.tower.g) as usize, None)
    }

    /// The tower unit, with Teichmüller data pushed into `l`.
    pub fn unit_in(&self, l: &Fq) -> Result<UnitSpec> {
        Ok(match &self.tower.unit {
            UnitJson::Int(k) => UnitSpec::Int(*k),
            UnitJson::Teichmuller { a, negate } => {
                let a = FqElem::parse(&self.residue_field()?, a)?;
                UnitSpec::Teichmuller(Embedding::new(a.field(), l)?.apply(&a), *negate)
            }
        })
    }

    pub fn build_tower(&self) -> Result<Arc<TameTower>> {
        let t = &self.tower;
        let l = self.residue_field()?;
        tower_over(&l, t.f, t.e, &self.unit_in(&l)?, t.precision)
    }

    pub fn build_extension(&self, tower: &Arc<TameTower>) -> Result<WildExtension> {
        let poly = self
            .poly
            .iter()
            .map(|c| {
                c.iter().enumerate().fold(tower.zero(), |acc, (j, &k)| acc.add(&tower.int(k).mul_pi_pow(j as u32)))
            })
            .collect();
        WildExtension::new(tower, poly)
    }

    pub fn character(&self) -> Result<GaloisCharData> {
        let sig = TameSignature::new(self.tower.p, self.signature.clone())?;
        let mu = match &self.mu {
            None => None,
            Some(s) => Some(FqElem::parse(&self.residue_field()?, s)?),
        };
        Ok(GaloisCharData::new(sig, mu))
    }
}

/// Directory holding the fixtures: `$SERRE_AH_FIXTURES`, else `fallback`.
pub fn fixture_dir(fallback: &Path) -> PathBuf {
    std::env::var_os(FIXTURE_DIR_VAR).map(PathBuf::from).unwrap_or_else(|| fallback.to_path_buf())
}

/// All `*.json` fixtures in a directory, sorted by file name.
pub fn load_dir(dir: &Path) -> Result<Vec<(PathBuf, Fixture)>> {
    let rd = std::fs::read_dir(dir).map_err(|e| Error::Fixture(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> =
        rd.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x == "json")).collect();
    paths.sort();
    paths.into_iter().map(|p| Fixture::load(&p).map(|f| (p, f))).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct MembershipResult {
    pub name: String,
    pub expected: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixtureReport {
    pub label: String,
    pub index: u64,
    pub expected_index: u64,
    pub galois_stable: bool,
    pub coordinates: Option<Vec<String>>,
    pub support: Option<Vec<String>>,
    pub filtration_degree: Option<FilDegree>,
    pub slope_ok: Option<bool>,
    pub memberships: Vec<MembershipResult>,
    pub weights: Vec<String>,
    pub weights_ok: bool,
    /// Index and Galois stability hold, so a later mismatch points at the
    /// fixture's expectation or at the class/weight step.
    pub fixture_consistent: bool,
    pub pass: bool,
}

/// 1 + Σ coef·[a^power]·π^level.
pub fn membership_element(tower: &Arc<TameTower>, m: &MembershipJson, a: &FqElem) -> LocalElem {
    m.terms.iter().fold(tower.one(), |acc, &(c, k, n)| acc.add(&tower.teich(&a.pow(k)).scale_int(c).mul_pi_pow(n)))
}

/// Generators of Gal(M/K) acting on the tower: the tame generator and, when
/// it fixes the unit, the Frobenius of l/k_K.
pub fn gal_generators(tower: &TameTower) -> Vec<GaloisElem> {
    let mut out = vec![GaloisElem { frob: 0, tame: 1 }];
    let frob = GaloisElem { frob: tower.f() as usize, tame: 0 };
    if tower.g() > 1 && tower.galois_valid(&frob) {
        out.push(frob);
    }
    out
}

/// Norm subgroup, basis data and (when the kernel is a line) the class of a
/// fixture over a given tower.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub ns: NormSubgroup,
    pub bd: BasisData,
    pub class: Option<ClassVector>,
}

impl Pipeline {
    /// The normalized weights, before the fixture twist.
    pub fn weights(&self) -> Result<Option<Vec<SerreWeight>>> {
        let Some(cv) = &self.class else {
            return Ok(None);
        };
        let chi = self.bd.character();
        let trivial = GaloisCharData::trivial(chi.p(), chi.f())?;
        Ok(Some(weights_reducible(chi, &trivial, |d| in_lv_ah(cv, &self.bd, d).unwrap_or(false))))
    }
}

pub fn pipeline(fx: &Fixture, tower: &Arc<TameTower>) -> Result<Pipeline> {
    let ext = fx.build_extension(tower)?;
    let ns = norm_subgroup(&ext, fx.bound.unwrap_or_else(|| default_bound(&ext)))?;
    let bd = basis_data(&fx.character()?, tower)?;
    let class = match class_from_norm_subgroup(&ns, &bd) {
        Ok(cv) => Some(cv),
        Err(Error::IndexMismatch { .. }) | Err(Error::AmbiguousKernel(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(Pipeline { ns, bd, class })
}

pub fn run_fixture(fx: &Fixture) -> Result<FixtureReport> {
    let tower = fx.build_tower()?;
    let Pipeline { ns, bd, class } = pipeline(fx, &tower)?;
    let mut galois_stable = true;
    for g in gal_generators(&tower) {
        galois_stable &= ns.is_galois_stable(&g)?;
    }
    let l = tower.residue_field();
    let mut memberships = Vec::new();
    for m in &fx.memberships {
        let mut holds = true;
        for a in FqElem::elements(l).filter(|a| !a.is_zero()) {
            holds &= ns.contains(&membership_element(&tower, m, &a))? == m.expected;
        }
        memberships.push(MembershipResult { name: m.name.clone(), expected: m.expected, holds });
    }
    let chi = bd.character().clone();
    let mut weights = Vec::new();
    let (mut coordinates, mut support, mut fil, mut slope_ok) = (None, None, None, None);
    if let Some(cv) = &class {
        let trivial = GaloisCharData::trivial(chi.p(), chi.f())?;
        let mut ws: Vec<String> = weights_reducible(&chi, &trivial, |d| in_lv_ah(cv, &bd, d).unwrap_or(false))
            .iter()
            .map(|w| w.twist(fx.twist).to_string())
            .collect();
        ws.sort();
        weights = ws;
        coordinates = Some(cv.coords.iter().map(|c| c.power_string()).collect());
        support = Some(cv.support().iter().map(|l| l.to_string()).collect());
        let deg = filtration_degree(cv, &bd);
        if let Some(s) = &fx.slope {
            let s: Ratio<i64> = s.parse().map_err(|_| Error::Fixture(format!("bad slope {s:?}")))?;
            slope_ok = Some(deg == FilDegree::At(s));
        }
        fil = Some(deg);
    }
    let mut expected_weights = fx.expected_weights.clone();
    expected_weights.sort();
    let weights_ok = class.is_some() && weights == expected_weights;
    let support_ok = match (&fx.expected_support, &support) {
        (Some(e), Some(s)) => {
            let mut e = e.clone();
            e.sort();
            &e == s
        }
        (Some(_), None) => false,
        (None, _) => true,
    };
    let fixture_consistent = ns.index() == fx.expected_index && galois_stable;
    let pass = fixture_consistent
        && weights_ok
        && support_ok
        && slope_ok != Some(false)
        && memberships.iter().all(|m| m.holds);
    Ok(FixtureReport {
        label: fx.label.clone(),
        index: ns.index(),
        expected_index: fx.expected_index,
        galois_stable,
        coordinates,
        support,
        filtration_degree: fil,
        slope_ok,
        memberships,
        weights,
        weights_ok,
        fixture_consistent,
        pass,
    })
}
