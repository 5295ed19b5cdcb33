use std::collections::BTreeSet;

use num_rational::Ratio;
use proptest::prelude::*;
use serre_ah::serre_combinatorics::*;
use serre_ah::{field_create, FqElem};

fn sig(p: u32, a: &[u32]) -> TameSignature {
    TameSignature::new(p, a.to_vec()).unwrap()
}

fn set(v: &[usize]) -> IndexSet {
    v.iter().copied().collect()
}

/// Weight with d reduced to the normalized range.
fn wn(p: u32, d: &[u32], b: &[u32]) -> SerreWeight {
    let f = d.len();
    let q1 = (p as u64).pow(f as u32) - 1;
    let mut r = d.iter().rev().fold(0u64, |acc, &x| acc * p as u64 + x as u64) % q1;
    let d: Vec<u32> = (0..f)
        .map(|_| {
            let x = (r % p as u64) as u32;
            r /= p as u64;
            x
        })
        .collect();
    SerreWeight::new(p, d, b.to_vec()).unwrap()
}

fn sorted(mut v: Vec<SerreWeight>) -> Vec<SerreWeight> {
    v.sort();
    v.dedup();
    v
}

fn all_signatures(p: u32, f: usize) -> Vec<TameSignature> {
    let count = (p as u64).pow(f as u32);
    (0..count)
        .filter_map(|mut idx| {
            let a = (0..f)
                .map(|_| {
                    let x = (idx % p as u64) as u32 + 1;
                    idx /= p as u64;
                    x
                })
                .collect();
            TameSignature::new(p, a).ok()
        })
        .collect()
}

fn support(labels: &[BasisLabel]) -> SymbolicClass {
    SymbolicClass::Support(labels.iter().copied().collect())
}

fn recipe(chi: &GaloisCharData, class: &SymbolicClass) -> Vec<SerreWeight> {
    let one = GaloisCharData::trivial(chi.p(), chi.f()).unwrap();
    let quot = chi.quotient(&one).unwrap();
    sorted(weights_reducible(chi, &one, |d| class.in_span(&quot, d)))
}

const T0: BasisLabel = BasisLabel::Tau(0);
const T1: BasisLabel = BasisLabel::Tau(1);

#[test]
fn filtration_total_dimension() {
    for p in [2u32, 3, 5] {
        for f in 1..=4 {
            for s in all_signatures(p, f) {
                let chi = GaloisCharData::from_signature(s.clone());
                let fd = filtration_dims(&chi);
                let expect = f + chi.is_trivial() as usize + chi.is_cyclotomic() as usize;
                assert_eq!(fd.total(), expect, "p={p} sig={s}");
                if p == 2 && s.is_trivial_on_inertia() {
                    assert!(fd.trivial && fd.cyclotomic);
                    assert_eq!(fd.total(), f + 2);
                }
                let pr = p as i64;
                for (k, &d) in &fd.dims {
                    assert!(
                        *k == Ratio::from_integer(0)
                            || (*k > Ratio::from_integer(1) && *k <= Ratio::new(2 * pr - 1, pr - 1))
                    );
                    assert!(
                        d <= f / s.period() || *k == Ratio::from_integer(0) || *k == Ratio::new(2 * pr - 1, pr - 1)
                    );
                    let m = (k - Ratio::from_integer(1)) * Ratio::from_integer(s.q1() as i64);
                    if *k > Ratio::from_integer(1) && *k < Ratio::new(2 * pr - 1, pr - 1) {
                        assert!(m.is_integer() && m.to_integer() % pr != 0, "jump {k} for {s}");
                    }
                }
            }
        }
    }
}

#[test]
fn generic_signatures_have_no_gentle_jumps() {
    for p in [3u32, 5] {
        for f in 1..=3 {
            for s in all_signatures(p, f).into_iter().filter(|s| s.is_generic()) {
                let fd = filtration_dims(&GaloisCharData::from_signature(s.clone()));
                let flat = Ratio::new(p as i64, p as i64 - 1);
                assert!(fd.dims.keys().all(|k| *k == Ratio::from_integer(0) || *k >= flat), "{s}");
            }
        }
    }
}

#[test]
fn subspace_dimension_counts() {
    for p in [2u32, 3, 5] {
        for f in 1..=3 {
            for s in all_signatures(p, f) {
                let chi = GaloisCharData::from_signature(s.clone());
                let d = subspace_dims(&chi);
                assert_eq!(d.un, chi.is_trivial() as usize);
                assert_eq!(d.total - d.ty, chi.is_cyclotomic() as usize);
                let fl_gt = if s.is_cyclotomic_on_inertia() { f } else { 0 };
                assert_eq!(d.fl - d.gt, fl_gt, "{s}");
                assert_eq!(d.ty - d.un, f);
                let top = s.digits().iter().filter(|&&x| x == p).count();
                assert_eq!(d.gt - d.un, top);
                if s.is_generic() {
                    assert_eq!(d.cg, d.ty);
                }
                assert!(d.un <= d.gt && d.gt <= d.fl && d.fl <= d.ty && d.cg <= d.ty && d.ty <= d.total);
            }
        }
    }
}

#[test]
fn mu_properties_exhaustive() {
    for p in [2u32, 3, 5] {
        for f in 1..=4 {
            for s in all_signatures(p, f) {
                for j in all_subsets(f) {
                    let m = mu_shift(&s, &j);
                    assert!(is_admissible(&s, &m), "sig={s} J={j:?} mu={m:?}");
                    let dj = delta_set(&s, &j);
                    assert!(dj.is_subset(&m));
                    assert!(m.is_subset(&dj.union(&j).copied().collect()));
                    assert_eq!(m.len(), j.len());
                    for i1 in mu_choices(&s, &j) {
                        assert_eq!(mu_shift_from(&s, &j, i1).as_ref(), Some(&m), "choice {i1} sig={s} J={j:?}");
                    }
                    if dj.is_subset(&j) {
                        assert_eq!(m, j);
                    }
                }
            }
        }
    }
}

#[test]
fn admissibility_criteria_via_n_prime() {
    for p in [2u32, 3, 5] {
        for f in 1..=4 {
            for s in all_signatures(p, f) {
                let e = s.q1();
                let full: IndexSet = (0..f).collect();
                for i in 0..f {
                    let np = s.n_prime(i as i64, e).unwrap();
                    assert!(np > 0);
                    assert_eq!(is_admissible(&s, &set(&[i])), np <= e, "singleton sig={s} i={i}");
                    let mut rest = full.clone();
                    rest.remove(&i);
                    assert_eq!(is_admissible(&s, &rest), np * (p as u64 - 1) >= e, "complement sig={s} i={i}");
                }
            }
        }
    }
}

#[test]
fn generic_iff_all_admissible_iff_no_pairs() {
    for p in [2u32, 3, 5] {
        for f in 1..=4 {
            for s in all_signatures(p, f) {
                let all_adm = all_subsets(f).iter().all(|j| is_admissible(&s, j));
                let none = dependent_pairs(&s).is_empty();
                assert_eq!(s.is_generic(), all_adm, "{s}");
                assert_eq!(all_adm, none, "{s}");
            }
        }
    }
}

#[test]
fn dependent_pair_counts() {
    // number of pairs starting at i is s or s - 1, as described after the definition
    for p in [3u32, 5] {
        for f in 2..=4 {
            for sg in all_signatures(p, f) {
                let pairs = dependent_pairs(&sg);
                for i in 0..f as i64 {
                    let from_i = pairs.iter().filter(|(a, _)| *a == i as usize).count();
                    if sg.a(i + 1) != p {
                        assert_eq!(from_i, 0);
                        continue;
                    }
                    let mut s = 1;
                    while s < f as i64 && sg.a(i + s + 1) == p - 1 {
                        s += 1;
                    }
                    let tail_all_p = (i + s + 1..=i + f as i64 + 1).all(|k| sg.a(k) == p);
                    let expect = if tail_all_p { s - 1 } else { s } as usize;
                    assert_eq!(from_i, expect.min(f - 1), "sig={sg} i={i}");
                }
            }
        }
    }
}

#[test]
fn j_max_unique() {
    for p in [2u32, 3, 5] {
        for f in 1..=3 {
            let one = GaloisCharData::trivial(p, f).unwrap();
            for s in all_signatures(p, f) {
                let chi = GaloisCharData::from_signature(s.clone());
                let wp = weight_pairs(&chi, &one);
                for v in wp.weights() {
                    let good: Vec<_> =
                        wp.subsets_for(&v).into_iter().filter(|j| satisfies_j_max_conditions(&v, j)).collect();
                    assert_eq!(good.len(), 1, "sig={s} V={v} S_V={:?}", wp.subsets_for(&v));
                }
            }
        }
    }
}

#[test]
fn swapping_characters_complements_j() {
    for p in [2u32, 3, 5] {
        for f in 1..=3 {
            let full: IndexSet = (0..f).collect();
            for s in all_signatures(p, f) {
                let chi = GaloisCharData::from_signature(s);
                let one = GaloisCharData::trivial(p, f).unwrap();
                let a = weight_pairs(&chi, &one);
                let b = weight_pairs(&one, &chi);
                let mut flipped: Vec<_> = b
                    .pairs
                    .iter()
                    .map(|(v, j)| (v.clone(), full.difference(j).copied().collect::<IndexSet>()))
                    .collect();
                flipped.sort();
                assert_eq!(a.pairs, flipped);
            }
        }
    }
}

#[test]
fn rotation_equivariance() {
    for p in [2u32, 3, 5] {
        for f in 2..=4 {
            for s in all_signatures(p, f) {
                let r = s.rotate(1);
                let shifted: BTreeSet<_> =
                    dependent_pairs(&s).iter().map(|&(a, b)| ((a + 1) % f, (b + 1) % f)).collect();
                assert_eq!(dependent_pairs(&r), shifted);
                for j in all_subsets(f) {
                    let rj = rotate_set(&j, 1, f);
                    assert_eq!(mu_shift(&r, &rj), rotate_set(&mu_shift(&s, &j), 1, f));
                    assert_eq!(is_admissible(&r, &rj), is_admissible(&s, &j));
                }
                let chi = GaloisCharData::from_signature(s.clone());
                let fd = filtration_dims(&chi);
                assert_eq!(filtration_dims(&chi.rotate(1)).dims, fd.dims);
            }
        }
    }
}

#[test]
fn rotation_of_weights_and_descriptors() {
    let p = 3;
    for f in 2..=3 {
        let one = GaloisCharData::trivial(p, f).unwrap();
        for s in all_signatures(p, f) {
            let chi = GaloisCharData::from_signature(s.clone());
            let rchi = chi.rotate(1);
            let wp = weight_pairs(&chi, &one);
            let rwp = weight_pairs(&rchi, &one);
            let mut moved: Vec<_> = wp.pairs.iter().map(|(v, j)| (v.rotate(1), rotate_set(j, 1, f))).collect();
            moved.sort();
            assert_eq!(rwp.pairs, moved, "sig={s}");
            for v in wp.weights() {
                let d = lv_ah_descriptor(&v, &chi, &one).unwrap();
                let rd = lv_ah_descriptor(&v.rotate(1), &rchi, &one).unwrap();
                assert_eq!(rd.index_set, rotate_set(&d.index_set, 1, f));
            }
        }
    }
}

#[test]
fn descriptor_errors_when_absent() {
    let chi = GaloisCharData::from_signature(sig(3, &[1, 2]));
    let one = GaloisCharData::trivial(3, 2).unwrap();
    let v = wn(3, &[1, 1], &[1, 1]);
    assert_eq!(j_max(&v, &chi, &one), None);
    assert_eq!(lv_ah_descriptor(&v, &chi, &one), Err(serre_ah::Error::WeightNotInRecipe));
}

#[test]
fn descriptor_flags() {
    let one = GaloisCharData::trivial(3, 2).unwrap();
    let cyc = GaloisCharData::cyclotomic(3, 2).unwrap();
    let d = lv_ah_descriptor(&wn(3, &[0, 0], &[3, 3]), &cyc, &one).unwrap();
    assert!(d.full_space);
    let d = lv_ah_descriptor(&wn(3, &[0, 0], &[1, 1]), &cyc, &one).unwrap();
    assert!(!d.full_space);
    assert_eq!(d.index_set, set(&[0, 1]));

    // for trivial χ the empty set never occurs as J_max, so c_un alone is only
    // reachable through a hand-built descriptor
    for p in [2u32, 3, 5] {
        for f in 1..=3 {
            let triv = GaloisCharData::trivial(p, f).unwrap();
            for v in weight_pairs(&triv, &triv).weights() {
                assert!(!j_max(&v, &triv, &triv).unwrap().is_empty());
                assert!(lv_ah_descriptor(&v, &triv, &triv).unwrap().include_unramified);
            }
        }
    }
    let triv = GaloisCharData::trivial(2, 2).unwrap();
    let d = LvAhDescriptor { index_set: set(&[]), include_unramified: true, full_space: false };
    assert_eq!(d.labels(&triv), [BasisLabel::Un].into_iter().collect());

    let v = wn(3, &[0, 0], &[2, 2]);
    assert!(!j_max(&v, &one, &one).unwrap().is_empty());
}

#[test]
fn case_i_tables() {
    for p in [3u32, 5, 7] {
        for a0 in 1..p {
            for a1 in a0 + 1..p {
                let chi = GaloisCharData::from_signature(sig(p, &[a0, a1]));
                let one = GaloisCharData::trivial(p, 2).unwrap();
                let (b0, b1) = if a1 < p - 1 {
                    (p - 1 - a0, p - 1 - a1)
                } else if a0 < p - 2 {
                    (p - 2 - a0, p)
                } else {
                    (p, p - 1)
                };
                let vt = wn(p, &[0, 0], &[a0, a1]);
                let v0 = wn(p, &[p - 1, a1 - 1], &[a0 + 1, p - a1]);
                let v1 = wn(p, &[a0 - 1, p - 1], &[p - a0, a1 + 1]);
                let ve = wn(p, &[a0, a1], &[b0, b1]);
                let mut expect = vec![
                    (vt.clone(), set(&[0, 1])),
                    (v0.clone(), set(&[0])),
                    (v1.clone(), set(&[1])),
                    (ve.clone(), set(&[])),
                ];
                expect.sort();
                let wp = weight_pairs(&chi, &one);
                assert_eq!(wp.pairs, expect, "p={p} a=({a0},{a1})");
                for (v, j) in &expect {
                    assert_eq!(j_max(v, &chi, &one).as_ref(), Some(j));
                    assert_eq!(&mu_shift(&chi.signature, j), j);
                    assert!(is_admissible(&chi.signature, j));
                }
                assert_eq!(recipe(&chi, &SymbolicClass::Generic), vec![vt.clone()]);
                assert_eq!(recipe(&chi, &support(&[T1])), sorted(vec![vt.clone(), v1.clone()]));
                assert_eq!(recipe(&chi, &support(&[T0])), sorted(vec![vt.clone(), v0.clone()]));
                assert_eq!(recipe(&chi, &SymbolicClass::Zero), sorted(vec![vt, v0, v1, ve]));
            }
        }
    }
}

#[test]
fn case_ii_cyclotomic_lists() {
    for p in [3u32, 5, 7] {
        let chi = GaloisCharData::cyclotomic(p, 2).unwrap();
        let vpp = wn(p, &[0, 0], &[p, p]);
        let v11 = wn(p, &[0, 0], &[1, 1]);
        let vb1 = wn(p, &[0, p - 1], &[p - 1, 2]);
        let vb2 = wn(p, &[p - 1, 0], &[2, p - 1]);
        assert_eq!(recipe(&chi, &SymbolicClass::Generic), vec![vpp.clone()]);
        assert_eq!(recipe(&chi, &support(&[T0, T1])), sorted(vec![vpp.clone(), v11.clone()]));
        assert_eq!(recipe(&chi, &support(&[T1])), sorted(vec![vpp.clone(), v11.clone(), vb1.clone()]));
        assert_eq!(recipe(&chi, &support(&[T0])), sorted(vec![vpp.clone(), v11.clone(), vb2.clone()]));
        let mut c = vec![vpp, v11, vb1, vb2, wn(p, &[1, 1], &[p - 2, p - 2])];
        if p == 3 {
            c.push(wn(p, &[1, 1], &[3, 3]));
        }
        assert_eq!(recipe(&chi, &SymbolicClass::Zero), sorted(c));
    }
}

#[test]
fn case_ii_generic_lists() {
    for p in [3u32, 5, 7] {
        let field = field_create(p, 2, None).unwrap();
        let twist = FqElem::gen(&field);
        for a0 in 2..p {
            for unr in [None, Some(twist.clone())] {
                let chi = GaloisCharData::new(sig(p, &[a0, a0]), unr);
                let base = wn(p, &[0, 0], &[a0, a0]);
                let vb1 = wn(p, &[a0 - 1, p - 1], &[p - a0, a0 + 1]);
                let vb2 = wn(p, &[p - 1, a0 - 1], &[a0 + 1, p - a0]);
                let un: &[BasisLabel] = if chi.is_trivial() { &[BasisLabel::Un] } else { &[] };
                let with_un = |extra: &[BasisLabel]| {
                    let mut v = extra.to_vec();
                    v.extend_from_slice(un);
                    support(&v)
                };
                assert_eq!(recipe(&chi, &SymbolicClass::Generic), vec![base.clone()]);
                assert_eq!(recipe(&chi, &with_un(&[T1])), sorted(vec![base.clone(), vb1.clone()]));
                assert_eq!(recipe(&chi, &with_un(&[T0])), sorted(vec![base.clone(), vb2.clone()]));
                let mut c = vec![base, vb2, vb1];
                if a0 < p - 1 {
                    c.push(wn(p, &[a0, a0], &[p - 1 - a0, p - 1 - a0]));
                }
                if a0 == p - 2 {
                    c.push(wn(p, &[p - 2, p - 2], &[p, p]));
                }
                assert_eq!(recipe(&chi, &with_un(&[])), sorted(c), "p={p} a0={a0} trivial={}", chi.is_trivial());
            }
        }
    }
}

#[test]
fn case_ii_top_exponent_has_two_subsets() {
    for p in [3u32, 5, 7] {
        let chi = GaloisCharData::trivial(p, 2).unwrap();
        let wp = weight_pairs(&chi, &chi);
        for v in wp.weights() {
            assert_eq!(wp.subsets_for(&v).len(), 2, "p={p} V={v}");
        }
        let extra = [
            (wn(p, &[p - 2, p - 1], &[1, p]), set(&[0]), set(&[1])),
            (wn(p, &[p - 1, p - 2], &[p, 1]), set(&[1]), set(&[0])),
        ];
        for (v, not_max, max) in &extra {
            assert!(wp.contains(v, not_max));
            assert_eq!(j_max(v, &chi, &chi).as_ref(), Some(max));
        }
        let jmaxes: BTreeSet<_> = wp.weights().iter().map(|v| j_max(v, &chi, &chi).unwrap()).collect();
        assert!(!jmaxes.contains(&set(&[])));
    }
}

#[test]
fn case_iii_tables() {
    for p in [3u32, 5, 7] {
        let one = GaloisCharData::trivial(p, 2).unwrap();
        for a0 in 1..p {
            let chi = GaloisCharData::from_signature(sig(p, &[a0, p]));
            let (b0, b1) = if a0 + 2 < p {
                (p - 2 - a0, p - 1)
            } else if a0 + 2 == p {
                // the congruences force b_1 = p - 2 here
                (p, p - 2)
            } else {
                (p - 1, p - 2)
            };
            let cols = if a0 < p - 1 {
                vec![
                    (wn(p, &[0, 0], &[a0, p]), set(&[0, 1])),
                    (wn(p, &[p - 2, p - 1], &[a0 + 2, p]), set(&[0])),
                    (wn(p, &[a0, p - 1], &[p - 1 - a0, 1]), set(&[1])),
                    (wn(p, &[a0, p], &[b0, b1]), set(&[])),
                ]
            } else {
                vec![
                    (wn(p, &[0, 0], &[p - 1, p]), set(&[0, 1])),
                    (wn(p, &[p - 1, 0], &[1, p - 1]), set(&[0])),
                    (wn(p, &[p - 1, p - 2], &[p, 2]), set(&[1])),
                    (wn(p, &[0, 1], &[b0, b1]), set(&[])),
                ]
            };
            let mut expect = cols.clone();
            expect.sort();
            assert_eq!(weight_pairs(&chi, &one).pairs, expect, "p={p} a0={a0}");
            let s = &chi.signature;
            assert_eq!(mu_shift(s, &set(&[0, 1])), set(&[0, 1]));
            assert_eq!(mu_shift(s, &set(&[0])), set(&[0]));
            assert_eq!(mu_shift(s, &set(&[1])), set(&[0]));
            let adm: Vec<_> = all_subsets(2).into_iter().filter(|j| is_admissible(s, j)).collect();
            assert_eq!(adm, vec![set(&[]), set(&[0]), set(&[0, 1])]);
            if a0 < p - 1 {
                let vs: Vec<_> = cols.iter().map(|(v, _)| v.clone()).collect();
                assert_eq!(recipe(&chi, &SymbolicClass::Generic), vec![vs[0].clone()]);
                assert_eq!(recipe(&chi, &support(&[T0])), sorted(vs[..3].to_vec()));
                assert_eq!(recipe(&chi, &SymbolicClass::Zero), sorted(vs));
            }
        }
    }
}

#[test]
fn irreducible_quadratic_closed_forms() {
    for p in [3u32, 5, 7] {
        for a0 in 2..p {
            for a1 in 1..p - 1 {
                let a = (a0 + a1 * p) as u64;
                let expect = sorted(vec![
                    wn(p, &[0, 0], &[a0, a1]),
                    wn(p, &[a0 - 1, a1], &[p + 1 - a0, p - 1 - a1]),
                    wn(p, &[a0 - 1, p - 1], &[p - a0, a1 + 1]),
                    wn(p, &[0, a1], &[a0 - 1, p - a1]),
                ]);
                assert_eq!(weights_irreducible(p, 2, a).unwrap(), expect, "IV p={p} a=({a0},{a1})");
            }
        }
        for a0 in 1..p {
            let mut expect = vec![
                wn(p, &[p - 2, p - 1], &[a0 + 1, p]),
                wn(p, &[a0 - 1, 0], &[p + 1 - a0, p - 1]),
                wn(p, &[a0 - 1, p - 1], &[p - a0, 1]),
            ];
            if a0 > 1 {
                expect.push(wn(p, &[0, 0], &[a0 - 1, p]));
            }
            assert_eq!(weights_irreducible(p, 2, a0 as u64).unwrap(), sorted(expect), "V p={p} a0={a0}");
        }
    }
}

#[test]
fn irreducible_rejects_reducible_exponent() {
    assert_eq!(weights_irreducible(3, 2, 10), Err(serre_ah::Error::ReducibleInput));
    assert_eq!(weights_irreducible(5, 1, 12), Err(serre_ah::Error::ReducibleInput));
}

#[test]
fn qp_table_matches_recipe() {
    for p in [3u32, 5, 7] {
        let fp = field_create(p, 1, None).unwrap();
        let one = GaloisCharData::trivial(p, 1).unwrap();
        for a in 1..p {
            for unr in [None, Some(FqElem::from_int(&fp, 2))] {
                let chi = GaloisCharData::new(sig(p, &[a]), unr);
                for kind in
                    [QpClassKind::Split, QpClassKind::NonSplit, QpClassKind::PeuRamifiee, QpClassKind::NotPeuRamifiee]
                {
                    let class = kind.class(&chi);
                    let got = sorted(weights_reducible(&chi, &one, |d| class.in_span(&chi, d)));
                    let table = weights_qp(p, a, chi.is_cyclotomic(), chi.is_trivial(), kind);
                    assert_eq!(got, table, "p={p} a={a} cyc={} kind={kind:?}", chi.is_cyclotomic());
                }
            }
        }
    }
}

fn arb_signature() -> impl Strategy<Value = TameSignature> {
    (prop::sample::select(vec![2u32, 3, 5, 7]), 1usize..=4)
        .prop_flat_map(|(p, f)| (Just(p), prop::collection::vec(1..=p, f)))
        .prop_filter_map("all p", |(p, a)| TameSignature::new(p, a).ok())
}

proptest! {
    #[test]
    fn n_i_congruence(s in arb_signature()) {
        let q1 = s.q1();
        let p = s.p() as u64;
        for i in 0..s.f() {
            let lhs = s.n(i as i64) as u128 * (p as u128).pow(i as u32) % q1.max(1) as u128;
            prop_assert_eq!(lhs, s.n(0) as u128 % q1.max(1) as u128);
        }
        prop_assert_eq!(TameSignature::from_exponent(s.p(), s.f(), s.n(0) as i64).unwrap(), s);
    }

    #[test]
    fn canonical_form_is_a_rotation(s in arb_signature()) {
        let (c, k) = s.canonical();
        prop_assert_eq!(s.rotate(k as i64), c.clone());
        for r in 0..s.f() {
            prop_assert!(c <= s.rotate(r as i64));
        }
    }

    #[test]
    fn mu_random(s in arb_signature(), mask in 0u32..16) {
        let f = s.f();
        let j: IndexSet = (0..f).filter(|i| mask >> i & 1 == 1).collect();
        let m = mu_shift(&s, &j);
        prop_assert!(is_admissible(&s, &m));
        prop_assert_eq!(m.len(), j.len());
        let r = s.rotate(2);
        prop_assert_eq!(mu_shift(&r, &rotate_set(&j, 2, f)), rotate_set(&m, 2, f));
    }

    #[test]
    fn weight_pair_congruences(s in arb_signature()) {
        prop_assume!(s.p() <= 5 && s.f() <= 3);
        let chi = GaloisCharData::from_signature(s.clone());
        let one = GaloisCharData::trivial(s.p(), s.f()).unwrap();
        let wp = weight_pairs(&chi, &one);
        let q1 = s.q1().max(1) as i64;
        let p = s.p() as i64;
        for (v, j) in &wp.pairs {
            let dexp: i64 = v.d().iter().rev().fold(0, |acc, &x| acc * p + x as i64);
            let bj: i64 = (0..s.f()).rev().fold(0, |acc, i| acc * p + if j.contains(&i) { v.b()[i] as i64 } else { 0 });
            let bn: i64 = (0..s.f()).rev().fold(0, |acc, i| acc * p + if j.contains(&i) { 0 } else { v.b()[i] as i64 });
            prop_assert_eq!((dexp + bj - s.n(0) as i64).rem_euclid(q1), 0);
            prop_assert_eq!((dexp + bn).rem_euclid(q1), 0);
        }
        prop_assert!(!wp.pairs.is_empty());
    }
}
