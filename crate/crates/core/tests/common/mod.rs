//! Helpers shared by the integration suites.
#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use serre_ah::cohomology::*;
use serre_ah::fixture::*;
use serre_ah::linalg::nullspace;
use serre_ah::serre_combinatorics::*;
use serre_ah::*;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture(name: &str) -> Fixture {
    Fixture::load(&fixtures_dir().join(format!("{name}.json"))).unwrap()
}

pub fn same(a: &LocalElem, b: &LocalElem) -> bool {
    let prec = a.precision().min(b.precision());
    a.sub(b).valuation() >= prec
}

pub fn random_fq(l: &Fq, rng: &mut ChaCha8Rng) -> FqElem {
    FqElem::from_index(l, rng.gen_range(0..l.size()))
}

/// Σ [a_j]π^j over j < e with uniform a_j.
pub fn random_elem(t: &Arc<TameTower>, rng: &mut ChaCha8Rng) -> LocalElem {
    let l = t.residue_field();
    let mut x = t.zero();
    for j in 0..t.e() {
        x = x.add(&t.teich(&random_fq(l, rng)).mul_pi_pow(j));
    }
    x
}

pub fn random_witt(ring: &Witt, rng: &mut ChaCha8Rng) -> WittElem {
    let q = ring.modulus_q();
    let coeffs: Vec<u64> = (0..ring.degree()).map(|_| rng.gen_range(0..q)).collect();
    WittElem::from_coeffs(ring, &coeffs)
}

/// Σ c_j π^j with every c_j uniform in W/p^n.
pub fn random_integral(t: &Arc<TameTower>, rng: &mut ChaCha8Rng) -> LocalElem {
    let cs: Vec<WittElem> = (0..t.e()).map(|_| random_witt(t.ring(), rng)).collect();
    t.from_coeffs(&cs)
}

/// π^k·u with u a uniform unit and k < `max_v`.
pub fn random_nonzero(t: &Arc<TameTower>, rng: &mut ChaCha8Rng, max_v: u32) -> LocalElem {
    let l = t.residue_field();
    let r = loop {
        let r = random_fq(l, rng);
        if !r.is_zero() {
            break r;
        }
    };
    let u = t.teich(&r).add(&random_integral(t, rng).mul_pi_pow(1));
    u.mul_pi_pow(rng.gen_range(0..max_v))
}

/// A p-th root of x ∈ U_m, m > ep/(p−1), built by successive correction:
/// (1+[c]π^s)^p ≡ 1 + p[c]π^s modulo higher terms once s + e > ep/(p−1).
pub fn pth_root_above_top(t: &Arc<TameTower>, x: &LocalElem) -> LocalElem {
    let (p, e) = (t.p(), t.e());
    let one = t.one();
    let mut y = one.clone();
    loop {
        let d = x.mul(&y.pow(p as u64).inv_unit().unwrap()).sub(&one);
        let v = d.valuation();
        if v >= d.precision() {
            return y;
        }
        assert!(v * (p - 1) > e * p, "level {v} is not above ep/(p-1)");
        let s = v - e;
        let lead = t.int(p as i64).mul_pi_pow(s).digit_at(v);
        let c = &d.digit_at(v) * &lead.inv().unwrap();
        y = y.mul(&one.add(&t.teich(&c).mul_pi_pow(s)));
    }
}

/// Whether 1 + [β]π^{ep/(p−1)} is a p-th power, by brute force: a root lies
/// in U_s with s = e/(p−1), and (1+[b]π^s)^p ≡ 1 + [b^p + c₀b]π^{ps} where c₀
/// is the leading digit of pπ^s; everything deeper is a p-th power.
pub fn top_unit_is_pth_power(t: &Arc<TameTower>, beta: &FqElem) -> bool {
    let (p, e) = (t.p(), t.e());
    assert_eq!(e % (p - 1), 0);
    let s = e / (p - 1);
    let c0 = t.int(p as i64).mul_pi_pow(s).digit_at(p * s);
    FqElem::elements(t.residue_field()).any(|b| &(&b.pow(p as u64) + &(&c0 * &b)) == beta)
}

/// Answers of in_lv_ah over every weight descriptor of χ.
pub fn answers(bd: &BasisData, cv: &ClassVector) -> Vec<(String, bool)> {
    let chi = bd.character();
    let trivial = GaloisCharData::trivial(chi.p(), chi.f()).unwrap();
    weight_pairs(chi, &trivial)
        .weights()
        .into_iter()
        .filter_map(|v| {
            let d = lv_ah_descriptor(&v, chi, &trivial).ok()?;
            Some((v.to_string(), in_lv_ah(cv, bd, &d).unwrap()))
        })
        .collect()
}

/// Tower for π′ = (1+3w)π, i.e. unit u·(1+3w)^e.
pub fn rescaled_tower(fx: &Fixture, t: &Arc<TameTower>, w: &WittElem) -> (Arc<TameTower>, WittElem) {
    let ring = t.ring();
    let s = &WittElem::one(ring) + &w.scale(3);
    let u2 = t.unit() * &s.pow(t.e() as u64);
    let t2 = tower_over(t.residue_field(), fx.tower.f, fx.tower.e, &UnitSpec::Witt(u2), fx.tower.precision).unwrap();
    (t2, s)
}

/// Coordinates in bd2's basis of the functional x ↦ value(x) on the digit space of bd2's tower.
pub fn solve_class(bd2: &BasisData, value: impl Fn(&LocalElem) -> FqElem) -> ClassVector {
    let t2 = bd2.tower();
    let labels = bd2.labels();
    let funcs: Vec<Vec<FqElem>> = labels.iter().map(|&l| bd2.functional(l).unwrap()).collect();
    let dim = t2.digit_dim();
    let rows: Vec<Vec<FqElem>> = (0..dim)
        .map(|k| {
            let mut e = vec![0u32; dim];
            e[k] = 1;
            let x = t2.reconstruct(&t2.from_coordinates(&e)).unwrap();
            let mut row: Vec<FqElem> = funcs.iter().map(|f| f[k].clone()).collect();
            row.push(-&value(&x));
            row
        })
        .collect();
    let ker = nullspace(bd2.ambient(), &rows, labels.len() + 1);
    assert_eq!(ker.len(), 1);
    let v = &ker[0];
    let inv = v[labels.len()].inv().unwrap();
    bd2.class(v[..labels.len()].iter().map(|c| c * &inv).collect()).unwrap()
}

/// Invariance of in_lv_ah under 20 random π ↦ (1+3w)π, per fixture.
pub fn uniformizer_invariance(name: &str, rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let fx = fixture(name);
    let t = fx.build_tower().unwrap();
    let base = pipeline(&fx, &t).unwrap();
    let want = answers(&base.bd, base.class.as_ref().ok_or(format!("{name}: no class"))?);
    for _ in 0..20 {
        let w = random_witt(t.ring(), rng);
        let (t2, _) = rescaled_tower(&fx, &t, &w);
        let p2 = pipeline(&fx, &t2).map_err(|e| format!("{name}: {e}"))?;
        if p2.ns.index() != base.ns.index() {
            return Err(format!("{name}: index {} after rescaling", p2.ns.index()));
        }
        let got = answers(&p2.bd, p2.class.as_ref().ok_or(format!("{name}: no class after rescaling"))?);
        if got != want {
            return Err(format!("{name}: answers changed under w = {w:?}"));
        }
    }
    Ok(())
}

/// Invariance of in_lv_ah when l is enlarged to F_81.
pub fn larger_field_invariance(name: &str) -> std::result::Result<(), String> {
    let fx = fixture(name);
    let t = fx.build_tower().unwrap();
    let base = pipeline(&fx, &t).unwrap();
    let want = answers(&base.bd, base.class.as_ref().ok_or(format!("{name}: no class"))?);
    let l2 = field_create(3, 4, None).unwrap();
    let t2 = tower_over(&l2, fx.tower.f, fx.tower.e, &fx.unit_in(&l2).unwrap(), fx.tower.precision).unwrap();
    let p2 = pipeline(&fx, &t2).map_err(|e| format!("{name}: {e}"))?;
    if p2.ns.index() != base.ns.index() {
        return Err(format!("{name}: index {} over F_81", p2.ns.index()));
    }
    for g in gal_generators(&t2) {
        if !p2.ns.is_galois_stable(&g).unwrap() {
            return Err(format!("{name}: not Galois stable over F_81"));
        }
    }
    let got = answers(&p2.bd, p2.class.as_ref().ok_or(format!("{name}: no class over F_81"))?);
    if got != want {
        return Err(format!("{name}: answers changed over F_81"));
    }
    Ok(())
}

/// 20 random classes per signature, transported to a rescaled uniformizer.
pub fn transported_invariance(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    for (sig, e, u) in [(vec![1, 2], 8, 1), (vec![1, 3], 4, 1), (vec![1, 1], 2, -1)] {
        let t = tower_create(3, 2, 1, e, &UnitSpec::Int(u), 8).unwrap();
        let chi = GaloisCharData::from_signature(TameSignature::new(3, sig.clone()).unwrap());
        let bd = basis_data(&chi, &t).unwrap();
        let l = bd.ambient().clone();
        for _ in 0..20 {
            let coords: Vec<FqElem> = bd.labels().iter().map(|_| random_fq(&l, rng)).collect();
            let cv = bd.class(coords).unwrap();
            let w = random_witt(t.ring(), rng);
            let ring = t.ring();
            let s = &WittElem::one(ring) + &w.scale(3);
            let u2 = t.unit() * &s.pow(e as u64);
            let t2 = tower_over(t.residue_field(), 2, e, &UnitSpec::Witt(u2), 8).unwrap();
            let bd2 = basis_data(&chi, &t2).unwrap();
            // x written in π′ = sπ becomes x written in π
            let cv2 = solve_class(&bd2, |x| bd.evaluate(&cv, &x.rescale_uniformizer(&t, &s)).unwrap());
            if answers(&bd2, &cv2) != answers(&bd, &cv) {
                return Err(format!("sig {sig:?}: transported answers differ"));
            }
        }
    }
    Ok(())
}

fn check(ok: bool, what: &str) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(format!("failed: {what}"))
    }
}

fn check_eq<T: PartialEq + std::fmt::Debug>(a: T, b: T) -> std::result::Result<(), String> {
    if a == b {
        Ok(())
    } else {
        Err(format!("{a:?} != {b:?}"))
    }
}

fn add_mod(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| (x + y) % p).collect()
}

pub fn round_trip(t: &Arc<TameTower>, rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let p = t.p();
    let v: Vec<u32> = (0..t.digit_dim()).map(|_| rng.gen_range(0..p)).collect();
    let mut d = t.from_coordinates(&v);
    d.teich = Some(loop {
        let r = random_fq(t.residue_field(), rng);
        if !r.is_zero() {
            break r;
        }
    });
    let x = t.reconstruct(&d).unwrap();
    check_eq(t.coordinates_of(&x).unwrap(), v)
}

pub fn homomorphism(t: &Arc<TameTower>, rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let x = random_nonzero(t, rng, 3);
    let y = random_nonzero(t, rng, 3);
    let cx = t.coordinates_of(&x).unwrap();
    let cy = t.coordinates_of(&y).unwrap();
    check_eq(t.coordinates_of(&x.mul(&y)).unwrap(), add_mod(&cx, &cy, t.p()))?;
    // p-th powers carry no digits
    check(t.is_pth_power(&x.pow(t.p() as u64)).unwrap(), "x^p has no digits")
}

pub fn threshold(t: &Arc<TameTower>, rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let (p, e) = (t.p(), t.e());
    let bound = e * p / (p - 1);
    let m = bound + 1 + rng.gen_range(0..6);
    let x = t.one().add(&random_integral(t, rng).mul_pi_pow(m));
    let y = pth_root_above_top(t, &x);
    check(same(&y.pow(p as u64), &x), "explicit root")?;
    check(t.is_pth_power(&x).unwrap(), "deep unit is a p-th power")?;
    // below the bound, a level prime to p is never reached by a p-th power
    let below: Vec<u32> = (1..bound).filter(|m| m % p != 0 && m * (p - 1) < e * p).collect();
    let m = below[rng.gen_range(0..below.len())];
    let a = loop {
        let a = random_fq(t.residue_field(), rng);
        if !a.is_zero() {
            break a;
        }
    };
    let z = t.one().add(&t.teich(&a).mul_pi_pow(m)).add(&random_integral(t, rng).mul_pi_pow(m + 1));
    check(!t.is_pth_power(&z).unwrap(), "level prime to p is not a p-th power")
}

/// The (p, f, e) = (3, 2, 8) and (3, 1, 2) towers.
pub fn unit_towers() -> [Arc<TameTower>; 2] {
    [tower_create(3, 2, 1, 8, &UnitSpec::Int(1), 4).unwrap(), tower_create(3, 1, 1, 2, &UnitSpec::Int(-1), 6).unwrap()]
}

/// Towers over F_9 with an integral top level ep/(p−1).
pub fn top_level_towers() -> Vec<Arc<TameTower>> {
    [(8, 1), (8, -1), (2, -1), (4, 1)]
        .into_iter()
        .map(|(e, u)| tower_create(3, 2, 1, e, &UnitSpec::Int(u), 4).unwrap())
        .collect()
}

/// 1 + [β]π^top is a p-th power exactly when tr(κβ) = 0, for every β ∈ l.
pub fn trace_criterion(t: &Arc<TameTower>) -> std::result::Result<(), String> {
    let top = t.top_level().ok_or("no integral top level")?;
    let kappa = t.kappa().ok_or("no top digit")?.clone();
    let mut count = 0;
    for beta in FqElem::elements(t.residue_field()) {
        let x = t.one().add(&t.teich(&beta).mul_pi_pow(top));
        let want = top_unit_is_pth_power(t, &beta);
        check(t.is_pth_power(&x).unwrap() == want, &format!("e={} beta={beta}: digits", t.e()))?;
        check(((&kappa * &beta).trace_to_prime() == 0) == want, &format!("e={} beta={beta}: trace", t.e()))?;
        count += usize::from(want);
    }
    // the criterion cuts out an F_p-hyperplane of l
    check_eq(count as u64, t.residue_field().size() / t.p() as u64)
}
