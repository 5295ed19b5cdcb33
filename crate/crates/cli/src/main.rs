mod tables;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use serre_ah::fixture::{
    fixture_dir, membership_element, pipeline, run_fixture, Fixture, MembershipJson, FIXTURE_DIR_VAR,
};
use serre_ah::hecke_match::{check_table, f9, RowJson, TableJson};
use serre_ah::padic::{verify_ah_multiplicativity, verify_ah_scaling};
use serre_ah::serre_combinatorics::*;
use serre_ah::{field_create, teichmuller, witt_ring, Error, FqElem};

#[derive(Parser)]
#[command(name = "serre-ah", version, about = "Serre weights through Artin-Hasse digit bases")]
struct Cli {
    /// Write the JSON document here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Fixture directory (also read from the environment).
    #[arg(long, global = true, env = FIXTURE_DIR_VAR, default_value = "fixtures")]
    fixtures: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct CharArgs {
    /// Residue characteristic.
    #[arg(long)]
    p: u32,
    /// Residue degree of K over Q_p.
    #[arg(long)]
    f: usize,
    /// Tame signature a_0,...,a_{f-1}.
    #[arg(long, value_delimiter = ',')]
    sig: Vec<u32>,
    /// Unramified part of χ on Frob_K, as an element of F_{p^f} ("a^3", "2").
    #[arg(long)]
    mu: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// W^AH(ρ) for ρ an extension of 1 by χ with the given class.
    Weights {
        #[command(flatten)]
        chi: CharArgs,
        /// zero, generic, or a support list such as tau0,tr.
        #[arg(long, default_value = "generic")]
        class: String,
        /// Tame twist exponent applied to the output.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        twist: i64,
    },
    /// Jumps of the ramification filtration on H^1(G_K, χ).
    Filtration {
        #[command(flatten)]
        chi: CharArgs,
    },
    /// Dependent pairs and admissible subsets.
    Admissible {
        #[command(flatten)]
        chi: CharArgs,
    },
    /// δ(J) and μ(J).
    Mu {
        #[command(flatten)]
        chi: CharArgs,
        /// Subset J of Z/fZ, e.g. 0,1 (empty for ∅).
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        j: Vec<usize>,
    },
    /// Artin-Hasse multiplicativity and scaling identities over F_p and F_{p^2}.
    VerifyLemmas {
        /// Residue characteristic.
        #[arg(long)]
        p: u32,
        /// Witt vectors are taken modulo p^N.
        #[arg(long = "N")]
        n: u32,
        /// Series are compared modulo x^M.
        #[arg(long = "M")]
        m: usize,
    },
    /// Norm group, class, filtration degree and weights of a fixture.
    ClassFromNorms {
        /// Fixture file, relative to the fixture directory unless it exists as given.
        #[arg(long)]
        fixture: PathBuf,
        /// Override the π-adic precision of the fixture.
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Membership of 1 + Σ c[a^k]π^n in the norm group, for every a ∈ l^×.
    NormMembership {
        /// Fixture file, relative to the fixture directory unless it exists as given.
        #[arg(long)]
        fixture: PathBuf,
        /// Terms c,k,n separated by ';', e.g. "1,1,5;-1,3,7".
        #[arg(long, allow_hyphen_values = true)]
        terms: String,
    },
    /// Classify Hecke data against the PGL_2(F_9) class table.
    MatchHecke {
        /// A JSON file, or the JSON itself: a row array or an examples table.
        #[arg(long)]
        input: PathBuf,
    },
    /// Regenerate the weight, fixture and Hecke tables and diff them against the goldens.
    ReplayTables {
        /// qp, case1, case2, case3, irreducible, fixtures, hecke or all.
        #[arg(long, default_value = "all")]
        table: String,
        /// Overwrite the goldens with the regenerated output.
        #[arg(long)]
        bless: bool,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    module: &'static str,
    message: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 2, module: "cli", message: msg.into() }
    }

    fn core(module: &'static str, e: Error) -> Self {
        let code = match e {
            Error::PrecisionExceeded(_) | Error::PrecisionLoss(_) | Error::ZeroElement => 3,
            Error::Fixture(_)
            | Error::Parse(_)
            | Error::InvalidSignature(_)
            | Error::NotPrime(_)
            | Error::ReducibleModulus { .. }
            | Error::InvalidModulus { .. }
            | Error::EvenCharacteristic
            | Error::BadRamification { .. }
            | Error::BadUnramifiedDegree { .. }
            | Error::ReducibleInput => 2,
            _ => 1,
        };
        Failure { code, module, message: e.to_string() }
    }
}

type Outcome = Result<(Value, bool), Failure>;

fn at<T>(module: &'static str, r: serre_ah::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::core(module, e))
}

fn character(c: &CharArgs) -> Result<GaloisCharData, Failure> {
    if c.sig.len() != c.f {
        return Err(Failure::usage(format!("--sig has {} entries, expected f = {}", c.sig.len(), c.f)));
    }
    let sig = at("serre_combinatorics", TameSignature::new(c.p, c.sig.clone()))?;
    let mu = match &c.mu {
        None => None,
        Some(s) => {
            let field = at("finite_field", field_create(c.p, c.f, None))?;
            Some(at("finite_field", FqElem::parse(&field, s))?)
        }
    };
    Ok(GaloisCharData::new(sig, mu))
}

fn parse_class(s: &str) -> Result<SymbolicClass, Failure> {
    match s {
        "zero" => Ok(SymbolicClass::Zero),
        "generic" => Ok(SymbolicClass::Generic),
        _ => {
            let mut out = BTreeSet::new();
            for part in s.split(',').map(str::trim) {
                let label = match part {
                    "un" | "c_un" => BasisLabel::Un,
                    "tr" | "c_tr" => BasisLabel::Tr,
                    _ => {
                        let i = part.trim_start_matches("c_").strip_prefix("tau").and_then(|i| i.parse().ok());
                        BasisLabel::Tau(i.ok_or_else(|| Failure::usage(format!("unknown class label {part:?}")))?)
                    }
                };
                out.insert(label);
            }
            Ok(SymbolicClass::Support(out))
        }
    }
}

fn resolve_fixture(dir: &Path, path: &Path) -> PathBuf {
    if path.exists() || path.is_absolute() {
        path.to_path_buf()
    } else {
        dir.join(path)
    }
}

fn load_fixture(dir: &Path, path: &Path) -> Result<Fixture, Failure> {
    at("fixture", Fixture::load(&resolve_fixture(dir, path)))
}

fn run(cli: &Cli) -> Outcome {
    let dir = fixture_dir(&cli.fixtures);
    match &cli.command {
        Command::Weights { chi, class, twist } => {
            let chi1 = character(chi)?;
            let one = at("serre_combinatorics", GaloisCharData::trivial(chi.p, chi.f))?;
            let class = parse_class(class)?;
            let weights: Vec<String> = weights_reducible(&chi1, &one, |d| class.in_span(&chi1, d))
                .iter()
                .map(|w| w.twist(*twist).to_string())
                .collect();
            Ok((json!({ "p": chi.p, "f": chi.f, "sig": chi.sig, "weights": weights }), true))
        }
        Command::Filtration { chi } => {
            let c = character(chi)?;
            let fd = filtration_dims(&c);
            let sd = subspace_dims(&c);
            Ok((
                json!({ "jumps": fd, "total": fd.total(), "trivial": fd.trivial, "cyclotomic": fd.cyclotomic, "subspaces": sd }),
                true,
            ))
        }
        Command::Admissible { chi } => {
            let c = character(chi)?;
            let s = &c.signature;
            let pairs: Vec<_> = dependent_pairs(s).into_iter().collect();
            let adm: Vec<_> = all_subsets(chi.f).into_iter().filter(|j| is_admissible(s, j)).collect();
            Ok((json!({ "dependent_pairs": pairs, "admissible": adm, "generic": s.is_generic() }), true))
        }
        Command::Mu { chi, j } => {
            let c = character(chi)?;
            if let Some(bad) = j.iter().find(|&&i| i >= chi.f) {
                return Err(Failure::usage(format!("index {bad} is outside Z/{}Z", chi.f)));
            }
            let j: IndexSet = j.iter().copied().collect();
            let s = &c.signature;
            Ok((
                json!({ "J": j, "delta": delta_set(s, &j), "mu": mu_shift(s, &j), "admissible": is_admissible(s, &j) }),
                true,
            ))
        }
        Command::VerifyLemmas { p, n, m } => verify_lemmas(*p, *n, *m),
        Command::ClassFromNorms { fixture, precision } => {
            let mut fx = load_fixture(&dir, fixture)?;
            if let Some(prec) = precision {
                fx.tower.precision = *prec;
            }
            let r = at("norm_group", run_fixture(&fx))?;
            let doc = json!({
                "label": r.label,
                "index": r.index,
                "galois_stable": r.galois_stable,
                "coordinates": r.coordinates,
                "support": r.support,
                "filtration_degree": r.filtration_degree,
                "memberships": r.memberships,
                "weights": r.weights,
                "expected_weights": fx.expected_weights,
                "fixture_consistent": r.fixture_consistent,
                "pass": r.pass,
            });
            Ok((doc, r.pass))
        }
        Command::NormMembership { fixture, terms } => {
            let fx = load_fixture(&dir, fixture)?;
            let mut parsed = Vec::new();
            for t in terms.split(';').filter(|t| !t.trim().is_empty()) {
                let v: Vec<&str> = t.split(',').map(str::trim).collect();
                let bad = || Failure::usage(format!("bad term {t:?}"));
                if v.len() != 3 {
                    return Err(bad());
                }
                parsed.push((
                    v[0].parse().map_err(|_| bad())?,
                    v[1].parse().map_err(|_| bad())?,
                    v[2].parse().map_err(|_| bad())?,
                ));
            }
            let m = MembershipJson { name: terms.clone(), terms: parsed, expected: true };
            let tower = at("local_field", fx.build_tower())?;
            let p = at("norm_group", pipeline(&fx, &tower))?;
            let mut rows = Vec::new();
            for a in FqElem::elements(tower.residue_field()).filter(|a| !a.is_zero()) {
                let member = at("norm_group", p.ns.contains(&membership_element(&tower, &m, &a)))?;
                rows.push(json!({ "a": a.power_string(), "member": member }));
            }
            Ok((json!({ "label": fx.label, "index": p.ns.index(), "element": terms, "results": rows }), true))
        }
        Command::MatchHecke { input } => {
            let raw = input.to_string_lossy();
            let text = if raw.trim_start().starts_with(['[', '{']) {
                raw.into_owned()
            } else {
                let path = resolve_fixture(&dir, input);
                std::fs::read_to_string(&path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?
            };
            let schema = |e: serde_json::Error| Failure { code: 2, module: "hecke_match", message: e.to_string() };
            let rows = if text.trim_start().starts_with('[') {
                let rows: Vec<RowJson> = serde_json::from_str(&text).map_err(schema)?;
                let field = f9();
                rows.iter()
                    .enumerate()
                    .map(|(i, r)| r.record(&field).map(|rec| (r.v.clone().unwrap_or_else(|| format!("row {i}")), rec)))
                    .collect::<serre_ah::Result<Vec<_>>>()
            } else {
                let table: TableJson = serde_json::from_str(&text).map_err(schema)?;
                table.records(true)
            };
            let rows = at("hecke_match", rows)?;
            let report = check_table(&rows);
            let ok = report.all_pass();
            Ok((serde_json::to_value(&report).unwrap(), ok))
        }
        Command::ReplayTables { table, bless } => tables::replay(&dir, table, *bless),
    }
}

#[derive(Serialize)]
struct LemmaRow {
    lemma: &'static str,
    field: String,
    input: String,
    passed: bool,
    first_failure: Option<usize>,
    witness: Option<Vec<Vec<u64>>>,
}

fn verify_lemmas(p: u32, n: u32, m: usize) -> Outcome {
    let mut rows = Vec::new();
    for deg in [1usize, 2] {
        let field = at("finite_field", field_create(p, deg, None))?;
        let ring = witt_ring(&field, n);
        let name = format!("F_{}", field.size());
        for a in FqElem::elements(&field) {
            for b in FqElem::elements(&field) {
                let w = at("padic", verify_ah_multiplicativity(&a, &b, n, m))?;
                rows.push(LemmaRow {
                    lemma: w.lemma,
                    field: name.clone(),
                    input: format!("a={} b={}", a.power_string(), b.power_string()),
                    passed: w.passed,
                    first_failure: w.first_failure,
                    witness: (!w.passed).then(|| w.witness.coeffs().iter().map(|c| c.coeffs().to_vec()).collect()),
                });
            }
            let delta = teichmuller(&a, &ring);
            let w = at("padic", verify_ah_scaling(&delta, n, m))?;
            rows.push(LemmaRow {
                lemma: w.lemma,
                field: name.clone(),
                input: format!("delta=[{}]", a.power_string()),
                passed: w.passed,
                first_failure: w.first_failure,
                witness: (!w.passed).then(|| w.witness.coeffs().iter().map(|c| c.coeffs().to_vec()).collect()),
            });
        }
    }
    let failed = rows.iter().filter(|r| !r.passed).count();
    Ok((json!({ "p": p, "N": n, "M": m, "checked": rows.len(), "failed": failed, "results": rows }), failed == 0))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((doc, ok)) => {
            let text = serde_json::to_string_pretty(&doc).unwrap() + "\n";
            match &cli.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("cli: {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(f) => {
            eprintln!("{}: {}", f.module, f.message);
            println!("{}", json!({ "error": f.message, "module": f.module }));
            ExitCode::from(f.code)
        }
    }
}
