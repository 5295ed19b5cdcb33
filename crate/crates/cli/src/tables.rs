//! Table regeneration for `replay-tables`, diffed against JSON goldens.

use std::path::Path;

use serde_json::{json, Value};

use serre_ah::fixture::{load_dir, run_fixture, Expectation};
use serre_ah::hecke_match::{check_table, TableJson};
use serre_ah::serre_combinatorics::*;
use serre_ah::{field_create, FqElem};

use crate::{at, Failure, Outcome};

pub const TABLES: [&str; 7] = ["qp", "case1", "case2", "case3", "irreducible", "fixtures", "hecke"];

fn strings(ws: &[SerreWeight]) -> Vec<String> {
    let mut v: Vec<String> = ws.iter().map(|w| w.to_string()).collect();
    v.sort();
    v
}

fn sig(p: u32, a: &[u32]) -> Result<TameSignature, Failure> {
    at("serre_combinatorics", TameSignature::new(p, a.to_vec()))
}

/// Recipe output for every class support drawn from the basis, plus zero.
fn by_support(chi: &GaloisCharData) -> Result<Value, Failure> {
    let one = at("serre_combinatorics", GaloisCharData::trivial(chi.p(), chi.f()))?;
    let labels = basis_labels(chi);
    let mut rows = Vec::new();
    for mask in 0u32..1 << labels.len() {
        let support: Vec<BasisLabel> = (0..labels.len()).filter(|i| mask >> i & 1 == 1).map(|i| labels[i]).collect();
        let class = if support.is_empty() {
            SymbolicClass::Zero
        } else {
            SymbolicClass::Support(support.iter().copied().collect())
        };
        let ws = weights_reducible(chi, &one, |d| class.in_span(chi, d));
        rows.push(json!({
            "support": support.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
            "weights": strings(&ws),
        }));
    }
    Ok(Value::Array(rows))
}

fn pairs(chi: &GaloisCharData) -> Result<Value, Failure> {
    let one = at("serre_combinatorics", GaloisCharData::trivial(chi.p(), chi.f()))?;
    let wp = weight_pairs(chi, &one);
    Ok(wp.pairs.iter().map(|(v, j)| json!({ "weight": v.to_string(), "J": j })).collect())
}

fn qp() -> Result<(Value, bool), Failure> {
    let mut rows = Vec::new();
    let mut ok = true;
    for p in [3u32, 5, 7] {
        let fp = at("finite_field", field_create(p, 1, None))?;
        let one = at("serre_combinatorics", GaloisCharData::trivial(p, 1))?;
        for a in 1..p {
            for unr in [None, Some(FqElem::from_int(&fp, 2))] {
                let twisted = unr.is_some();
                let chi = GaloisCharData::new(sig(p, &[a])?, unr);
                for kind in
                    [QpClassKind::Split, QpClassKind::NonSplit, QpClassKind::PeuRamifiee, QpClassKind::NotPeuRamifiee]
                {
                    let class = kind.class(&chi);
                    let got = strings(&weights_reducible(&chi, &one, |d| class.in_span(&chi, d)));
                    let table = strings(&weights_qp(p, a, chi.is_cyclotomic(), chi.is_trivial(), kind));
                    ok &= got == table;
                    rows.push(json!({
                        "p": p, "a": a, "unramified_twist": twisted, "kind": kind,
                        "weights": got, "table": table,
                    }));
                }
            }
        }
    }
    Ok((Value::Array(rows), ok))
}

fn case1() -> Result<Value, Failure> {
    let mut rows = Vec::new();
    for p in [3u32, 5, 7] {
        for a0 in 1..p {
            for a1 in a0 + 1..p {
                let chi = GaloisCharData::from_signature(sig(p, &[a0, a1])?);
                rows.push(json!({ "p": p, "sig": [a0, a1], "pairs": pairs(&chi)?, "recipe": by_support(&chi)? }));
            }
        }
    }
    Ok(Value::Array(rows))
}

fn case2() -> Result<Value, Failure> {
    let mut rows = Vec::new();
    for p in [3u32, 5, 7] {
        let field = at("finite_field", field_create(p, 2, None))?;
        let chi = at("serre_combinatorics", GaloisCharData::cyclotomic(p, 2))?;
        rows.push(json!({ "p": p, "sig": [p - 1, p - 1], "mu": null, "recipe": by_support(&chi)? }));
        for a0 in 2..p {
            for unr in [None, Some(FqElem::gen(&field))] {
                let mu = unr.as_ref().map(|u| u.power_string());
                let chi = GaloisCharData::new(sig(p, &[a0, a0])?, unr);
                rows.push(json!({ "p": p, "sig": [a0, a0], "mu": mu, "recipe": by_support(&chi)? }));
            }
        }
    }
    Ok(Value::Array(rows))
}

fn case3() -> Result<Value, Failure> {
    let mut rows = Vec::new();
    for p in [3u32, 5, 7] {
        for a0 in 1..p {
            let chi = GaloisCharData::from_signature(sig(p, &[a0, p])?);
            let s = &chi.signature;
            let adm: Vec<IndexSet> = all_subsets(2).into_iter().filter(|j| is_admissible(s, j)).collect();
            rows.push(json!({
                "p": p, "sig": [a0, p],
                "pairs": pairs(&chi)?,
                "admissible": adm,
                "recipe": by_support(&chi)?,
            }));
        }
    }
    Ok(Value::Array(rows))
}

/// Irreducible quadratic case: exponents a_0 + a_1 p (Case IV) and a_0 (Case V).
fn irreducible() -> Result<Value, Failure> {
    let mut rows = Vec::new();
    for p in [3u32, 5, 7] {
        for a0 in 2..p {
            for a1 in 1..p - 1 {
                let ws = at("serre_combinatorics", weights_irreducible(p, 2, (a0 + a1 * p) as u64))?;
                rows.push(json!({ "case": "IV", "p": p, "a": [a0, a1], "weights": strings(&ws) }));
            }
        }
        for a0 in 1..p {
            let ws = at("serre_combinatorics", weights_irreducible(p, 2, a0 as u64))?;
            rows.push(json!({ "case": "V", "p": p, "a": [a0], "weights": strings(&ws) }));
        }
    }
    Ok(Value::Array(rows))
}

fn fixtures(dir: &Path) -> Result<(Value, bool), Failure> {
    let mut rows = Vec::new();
    let mut ok = true;
    for (_, fx) in at("fixture", load_dir(dir))? {
        if fx.expected == Expectation::Open {
            rows.push(json!({ "label": fx.label, "status": "open" }));
            continue;
        }
        let r = at("norm_group", run_fixture(&fx))?;
        ok &= r.pass;
        rows.push(json!({
            "label": r.label,
            "status": if r.pass { "pass" } else { "fail" },
            "index": r.index,
            "filtration_degree": r.filtration_degree,
            "weights": r.weights,
        }));
    }
    // Fixtures for the IIb examples are not shipped; the rows stay open.
    for label in ["IIb1", "IIb2"] {
        if !rows.iter().any(|r| r["label"] == label) {
            rows.push(json!({ "label": label, "status": "open" }));
        }
    }
    Ok((Value::Array(rows), ok))
}

fn hecke(dir: &Path) -> Result<(Value, bool), Failure> {
    let path = dir.join("hecke").join("examples.json");
    let text = std::fs::read_to_string(&path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let table: TableJson =
        serde_json::from_str(&text).map_err(|e| Failure { code: 2, module: "hecke_match", message: e.to_string() })?;
    let report = check_table(&at("hecke_match", table.records(true))?);
    let ok = report.all_pass();
    Ok((serde_json::to_value(&report).unwrap(), ok))
}

pub fn generate(dir: &Path, name: &str) -> Result<(Value, bool), Failure> {
    match name {
        "qp" => qp(),
        "case1" => case1().map(|v| (v, true)),
        "case2" => case2().map(|v| (v, true)),
        "case3" => case3().map(|v| (v, true)),
        "irreducible" => irreducible().map(|v| (v, true)),
        "fixtures" => fixtures(dir),
        "hecke" => hecke(dir),
        _ => Err(Failure::usage(format!("unknown table {name:?}; expected one of {} or all", TABLES.join(", ")))),
    }
}

/// Paths in `golden` that differ from `got`, as JSON pointers.
fn diff(path: String, golden: &Value, got: &Value, out: &mut Vec<String>) {
    match (golden, got) {
        (Value::Object(a), Value::Object(b)) => {
            let keys: std::collections::BTreeSet<&String> = a.keys().chain(b.keys()).collect();
            for k in keys {
                match (a.get(k), b.get(k)) {
                    (Some(x), Some(y)) => diff(format!("{path}/{k}"), x, y, out),
                    _ => out.push(format!("{path}/{k}")),
                }
            }
        }
        (Value::Array(a), Value::Array(b)) if a.len() == b.len() => {
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                diff(format!("{path}/{i}"), x, y, out);
            }
        }
        _ if golden == got => {}
        _ => out.push(if path.is_empty() { "/".into() } else { path }),
    }
}

pub fn replay(dir: &Path, table: &str, bless: bool) -> Outcome {
    let names: Vec<&str> = if table == "all" { TABLES.to_vec() } else { vec![table] };
    let goldens = dir.join("goldens");
    let mut report = serde_json::Map::new();
    let mut all_ok = true;
    for name in names {
        let (got, checks) = generate(dir, name)?;
        let path = goldens.join(format!("{name}.json"));
        let entry = if bless {
            std::fs::create_dir_all(&goldens).map_err(|e| Failure::usage(format!("{}: {e}", goldens.display())))?;
            let text = serde_json::to_string_pretty(&got).unwrap() + "\n";
            std::fs::write(&path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            json!({ "blessed": true, "checks_pass": checks })
        } else {
            let text =
                std::fs::read_to_string(&path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            let golden: Value =
                serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            let mut d = Vec::new();
            diff(String::new(), &golden, &got, &mut d);
            all_ok &= d.is_empty();
            json!({ "diff": d, "checks_pass": checks })
        };
        all_ok &= checks;
        report.insert(name.to_string(), entry);
    }
    Ok((Value::Object(report), all_ok))
}
