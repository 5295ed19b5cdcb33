//! Projective matching of Hecke data (a_v, d_v, N(v)) with conjugacy classes
//! of PGL_2(F_9).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::finite_field::{field_create, Fq, FqElem};

/// Conjugacy classes of PGL_2(F_9).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassLabel {
    One,
    TwoU,
    Three,
    Four,
    FiveA,
    FiveB,
    TwoV,
    EightA,
    EightB,
    TenA,
    TenB,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 11] = [
        ClassLabel::One,
        ClassLabel::TwoU,
        ClassLabel::Three,
        ClassLabel::Four,
        ClassLabel::FiveA,
        ClassLabel::FiveB,
        ClassLabel::TwoV,
        ClassLabel::EightA,
        ClassLabel::EightB,
        ClassLabel::TenA,
        ClassLabel::TenB,
    ];

    /// Image under the outer involution.
    pub fn bar(self) -> ClassLabel {
        use ClassLabel::*;
        match self {
            FiveA => FiveB,
            FiveB => FiveA,
            EightA => EightB,
            EightB => EightA,
            TenA => TenB,
            TenB => TenA,
            x => x,
        }
    }

    pub fn as_str(self) -> &'static str {
        use ClassLabel::*;
        match self {
            One => "1",
            TwoU => "2u",
            Three => "3",
            Four => "4",
            FiveA => "5A",
            FiveB => "5B",
            TwoV => "2v",
            EightA => "8A",
            EightB => "8B",
            TenA => "10A",
            TenB => "10B",
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassLabel::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| Error::Parse(s.to_string()))
    }
}

impl Serialize for ClassLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for ClassLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Permutation representation a factorization partition comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartitionGroup {
    #[serde(rename = "PGL2(9)")]
    Pgl29,
    A6,
    S4,
}

/// One column of the matching table: square class of d_v, b_v, the class,
/// and its cycle types (exponent notation, alternatives separated by '|').
struct Column {
    square: bool,
    b: &'static str,
    class: ClassLabel,
    pgl: &'static str,
    a6: &'static str,
    s4: &'static str,
}

const TABLE: [Column; 11] = [
    Column { square: true, b: "1", class: ClassLabel::One, pgl: "1^10", a6: "1^6", s4: "1^4" },
    Column { square: true, b: "0", class: ClassLabel::TwoU, pgl: "2^4 1^2", a6: "2^2 1^2", s4: "2^2|2 1^2" },
    Column { square: true, b: "1", class: ClassLabel::Three, pgl: "3^3 1", a6: "3^2|3 1^3", s4: "3 1" },
    Column { square: true, b: "2", class: ClassLabel::Four, pgl: "4^2 1^2", a6: "4 2", s4: "4" },
    Column { square: true, b: "a^2", class: ClassLabel::FiveA, pgl: "5^2", a6: "5 1", s4: "" },
    Column { square: true, b: "a^6", class: ClassLabel::FiveB, pgl: "5^2", a6: "5 1", s4: "" },
    Column { square: false, b: "0", class: ClassLabel::TwoV, pgl: "2^5", a6: "", s4: "" },
    Column { square: false, b: "a", class: ClassLabel::EightA, pgl: "8 1^2", a6: "", s4: "" },
    Column { square: false, b: "a^3", class: ClassLabel::EightB, pgl: "8 1^2", a6: "", s4: "" },
    Column { square: false, b: "a^5", class: ClassLabel::TenB, pgl: "10", a6: "", s4: "" },
    Column { square: false, b: "a^7", class: ClassLabel::TenA, pgl: "10", a6: "", s4: "" },
];

/// "3^2 1" → [3, 3, 1].
fn expand(cycle_type: &str) -> Vec<u32> {
    let mut out = Vec::new();
    for part in cycle_type.split_whitespace() {
        let (base, exp) = part.split_once('^').unwrap_or((part, "1"));
        let (base, exp): (u32, usize) = (base.parse().unwrap(), exp.parse().unwrap());
        out.extend(std::iter::repeat(base).take(exp));
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

fn column_partitions(c: &Column, group: PartitionGroup) -> Vec<Vec<u32>> {
    let s = match group {
        PartitionGroup::Pgl29 => c.pgl,
        PartitionGroup::A6 => c.a6,
        PartitionGroup::S4 => c.s4,
    };
    if s.is_empty() {
        return Vec::new();
    }
    s.split('|').map(expand).collect()
}

/// F_9 = F_3[a]/(a^2 − a − 1).
pub fn f9() -> Fq {
    field_create(3, 2, Some(&[2, 2, 1])).unwrap()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenRecord {
    pub a: FqElem,
    pub d: FqElem,
    pub nv: u64,
    pub partition: Option<(PartitionGroup, Vec<u32>)>,
    pub expected: Option<ClassLabel>,
}

impl EigenRecord {
    pub fn new(a: FqElem, d: FqElem, nv: u64) -> Self {
        EigenRecord { a, d, nv, partition: None, expected: None }
    }
}

/// b_v = a_v^2 / (d_v·N(v)), with N(v) read mod 3.
pub fn b_invariant(rec: &EigenRecord) -> Result<FqElem> {
    if rec.nv % 3 == 0 {
        return Err(Error::BadNorm(rec.nv));
    }
    let field = rec.a.field();
    let nv = FqElem::from_int(field, (rec.nv % 3) as i64);
    (&rec.a * &rec.a).div(&(&rec.d * &nv))
}

pub fn classify(rec: &EigenRecord) -> Result<BTreeSet<ClassLabel>> {
    let b = b_invariant(rec)?;
    let square = rec.d.is_square()?;
    let field = rec.a.field();
    let mut out = BTreeSet::new();
    for c in &TABLE {
        if c.square != square || FqElem::parse(field, c.b)? != b {
            continue;
        }
        if let Some((group, parts)) = &rec.partition {
            let mut parts = parts.clone();
            parts.sort_unstable_by(|a, b| b.cmp(a));
            if !column_partitions(c, *group).contains(&parts) {
                continue;
            }
        }
        out.insert(c.class);
    }
    if out.is_empty() {
        return Err(Error::NoMatch { b: b.power_string(), square });
    }
    Ok(out)
}

/// The record at the conjugate prime: (s·a^3, d^3), class barred.
pub fn conjugate_record(rec: &EigenRecord, sign: i64) -> EigenRecord {
    EigenRecord {
        a: rec.a.pow(3).scale(sign.rem_euclid(3) as u32),
        d: rec.d.pow(3),
        nv: rec.nv,
        partition: rec.partition.clone(),
        expected: rec.expected.map(ClassLabel::bar),
    }
}

/// Legendre symbol (n/5).
pub fn legendre5(n: u64) -> i64 {
    match n % 5 {
        0 => 0,
        1 | 4 => 1,
        _ => -1,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RowResult {
    pub label: String,
    pub b: Option<String>,
    pub candidates: Vec<ClassLabel>,
    pub expected: Option<ClassLabel>,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    pub rows: Vec<RowResult>,
    pub passed: usize,
    pub failed: usize,
}

impl TableReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }
}

/// Checks that each expected label is among the candidates.
pub fn check_table(rows: &[(String, EigenRecord)]) -> TableReport {
    let mut out = Vec::with_capacity(rows.len());
    for (label, rec) in rows {
        let res = classify(rec);
        let b = b_invariant(rec).ok().map(|b| b.power_string());
        let (candidates, error) = match res {
            Ok(c) => (c.into_iter().collect::<Vec<_>>(), None),
            Err(e) => (Vec::new(), Some(e.to_string())),
        };
        let pass = error.is_none() && rec.expected.map_or(true, |e| candidates.contains(&e));
        out.push(RowResult { label: label.clone(), b, candidates, expected: rec.expected, pass, error });
    }
    let passed = out.iter().filter(|r| r.pass).count();
    let failed = out.len() - passed;
    TableReport { rows: out, passed, failed }
}

/// One row as stored in JSON: {"a":"a^3","d":"a^7","N":7,"expect":"10A"}.
/// A leading '±' on `a` marks the sign ambiguity; `d` defaults to 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<String>,
    pub a: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<String>,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<ClassLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<PartitionGroup>,
}

impl RowJson {
    pub fn record(&self, field: &Fq) -> Result<EigenRecord> {
        let a = self.a.trim();
        let a = a.strip_prefix('±').unwrap_or(a);
        let a = FqElem::parse(field, a)?;
        let d = match &self.d {
            Some(d) => FqElem::parse(field, d)?,
            None => FqElem::one(field),
        };
        if d.is_zero() {
            return Err(Error::ZeroInput);
        }
        let partition = self.partition.clone().map(|p| (self.group.unwrap_or(PartitionGroup::Pgl29), p));
        Ok(EigenRecord { a, d, nv: self.n, partition, expected: self.expect })
    }
}

/// How eigenvalues at σ(v) follow from those at v.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConjugateRule {
    /// a_σ = a^3, class barred.
    Cube,
    /// a_σ = δ(v)a^3 with δ(v) = (N(v)/5), class barred.
    CubeDelta,
    /// a_σ and the class are those of the named example at v.
    Swap(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExampleJson {
    pub name: String,
    pub conjugate: ConjugateRule,
    pub rows: Vec<RowJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableJson {
    pub examples: Vec<ExampleJson>,
}

impl TableJson {
    /// Rows at v and, via each example's rule, at σ(v).
    pub fn records(&self, with_conjugates: bool) -> Result<Vec<(String, EigenRecord)>> {
        let field = f9();
        let mut out = Vec::new();
        for ex in &self.examples {
            for row in &ex.rows {
                let tag = row.v.clone().unwrap_or_else(|| format!("N={}", row.n));
                let rec = row.record(&field)?;
                if with_conjugates {
                    match &ex.conjugate {
                        ConjugateRule::Cube => {
                            out.push((format!("{} sigma({tag})", ex.name), conjugate_record(&rec, 1)))
                        }
                        ConjugateRule::CubeDelta => {
                            let s = legendre5(row.n);
                            out.push((format!("{} sigma({tag})", ex.name), conjugate_record(&rec, s)))
                        }
                        ConjugateRule::Swap(other) => {
                            let partner = self
                                .examples
                                .iter()
                                .find(|e| &e.name == other)
                                .ok_or_else(|| Error::Fixture(format!("unknown example {other}")))?;
                            if let Some(r) = partner.rows.iter().find(|r| r.v == row.v && r.n == row.n) {
                                out.push((format!("{} sigma({tag})", ex.name), r.record(&field)?));
                            }
                        }
                    }
                }
                out.push((format!("{} {tag}", ex.name), rec));
            }
        }
        Ok(out)
    }
}
