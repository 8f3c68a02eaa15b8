use std::sync::OnceLock;

use gl2kit::arith::{divisors, gl2_order, unit_generators};
use gl2kit::curve::{apply_scaling, mazur_validate, minimal_scaling_match, torsion_subgroup, two_isogeny, Rat};
use gl2kit::invariants::{coset_action, genus_from_action};
use gl2kit::registry::CurveEntry;
use gl2kit::{CurveInvariants, EllipticCurve, Mat2, Point, Registries, Subgroup, DEFAULT_CAP};
use num_traits::Zero;
use proptest::prelude::*;

fn registries() -> &'static Registries {
    static REG: OnceLock<Registries> = OnceLock::new();
    REG.get_or_init(|| Registries::shipped().expect("shipped registries load"))
}

fn invertible(n: u64) -> impl Strategy<Value = Mat2> {
    prop::array::uniform4(0..n as i64)
        .prop_map(move |e| Mat2::new(n, e).unwrap())
        .prop_filter("invertible", |m| m.is_invertible())
}

fn gens(n: u64, max: usize) -> impl Strategy<Value = Vec<Mat2>> {
    prop::collection::vec(invertible(n), 1..=max)
}

fn group(n: u64, max: usize) -> impl Strategy<Value = Subgroup> {
    gens(n, max).prop_map(move |g| Subgroup::closure(n, &g, DEFAULT_CAP).unwrap())
}

/// A group with -Id and full determinant, so that its modular curve is defined.
fn curve_group(n: u64) -> impl Strategy<Value = Subgroup> {
    gens(n, 2).prop_map(move |mut g| {
        g.push(Mat2::minus_identity(n).unwrap());
        for u in unit_generators(n) {
            g.push(Mat2::new(n, [1, 0, 0, u as i64]).unwrap());
        }
        Subgroup::closure(n, &g, DEFAULT_CAP).unwrap()
    })
}

fn conjugate(h: &Subgroup, x: &Mat2) -> Subgroup {
    let xi = x.inv().unwrap();
    let g: Vec<Mat2> = h
        .generators()
        .iter()
        .map(|g| x.mul(g).unwrap().mul(&xi).unwrap())
        .collect();
    Subgroup::closure(h.modulus(), &g, DEFAULT_CAP).unwrap()
}

fn same_group(a: &Subgroup, b: &Subgroup) -> bool {
    a.order() == b.order() && a.is_subgroup_of(b)
}

const COPRIME_PAIRS: [(u64, u64); 6] = [(2, 3), (3, 2), (2, 5), (2, 7), (3, 4), (3, 5)];

fn crt_case() -> impl Strategy<Value = (Mat2, Mat2)> {
    prop::sample::select(COPRIME_PAIRS.to_vec()).prop_flat_map(|(m, n)| (invertible(m), invertible(n)))
}

proptest! {
    #[test]
    fn crt_combine_reduces_back((x, y) in crt_case()) {
        let (m, n) = (x.modulus() as u64, y.modulus() as u64);
        let z = Mat2::crt_combine(&x, &y).unwrap();
        prop_assert_eq!(z.reduce(m).unwrap(), x);
        prop_assert_eq!(z.reduce(n).unwrap(), y);
    }

    #[test]
    fn det_is_multiplicative(n in 2u64..=30, e1 in prop::array::uniform4(-50i64..50), e2 in prop::array::uniform4(-50i64..50)) {
        let x = Mat2::new(n, e1).unwrap();
        let y = Mat2::new(n, e2).unwrap();
        let xy = x.mul(&y).unwrap();
        prop_assert_eq!(xy.det() as u64, (x.det() as u64 * y.det() as u64) % n);
    }

    #[test]
    fn inverse_is_two_sided(x in (2u64..=60).prop_flat_map(invertible)) {
        let n = x.modulus() as u64;
        let xi = x.inv().unwrap();
        prop_assert!(x.mul(&xi).unwrap().is_identity());
        prop_assert!(xi.mul(&x).unwrap().is_identity());
        prop_assert_eq!(Mat2::identity(n).unwrap().mul(&x).unwrap(), x);
    }

    #[test]
    fn element_order_is_exact(x in (2u64..=40).prop_flat_map(invertible)) {
        let n = x.modulus() as u64;
        let k = x.order().unwrap();
        prop_assert_eq!(gl2_order(n) % k, 0);
        prop_assert!(x.pow(k).is_identity());
        for d in divisors(k) {
            if d < k {
                prop_assert!(!x.pow(d).is_identity());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_order_and_reductions(a in group(2, 2), b in group(3, 2)) {
        let p = Subgroup::product(&a, &b, DEFAULT_CAP).unwrap();
        prop_assert_eq!(p.order(), a.order() * b.order());
        prop_assert!(same_group(&p.reduce(2).unwrap(), &a));
        prop_assert!(same_group(&p.reduce(3).unwrap(), &b));
    }

    #[test]
    fn low_index_subgroups_obey_lagrange(h in (2u64..=7).prop_flat_map(|n| group(n, 3)), idx in 2usize..=3) {
        for k in h.subgroups_of_index(idx, DEFAULT_CAP).unwrap() {
            prop_assert_eq!(k.order() * idx, h.order());
            prop_assert!(k.is_subgroup_of(&h));
        }
    }

    #[test]
    fn index_two_subgroups_are_normal_and_contain_squares(h in (2u64..=7).prop_flat_map(|n| group(n, 3))) {
        for k in h.subgroups_of_index(2, DEFAULT_CAP).unwrap() {
            for g in h.generators() {
                prop_assert!(same_group(&conjugate(&k, g), &k));
            }
            for x in h.elements() {
                prop_assert!(k.contains(&x.mul(x).unwrap()));
            }
            for x in h.elements().iter().take(40) {
                for y in h.generators() {
                    let c = x.mul(y).unwrap().mul(&x.inv().unwrap()).unwrap().mul(&y.inv().unwrap()).unwrap();
                    prop_assert!(k.contains(&c));
                }
            }
        }
    }

    #[test]
    fn conjugacy_is_an_equivalence(a in group(8, 2), d in group(8, 2), x in invertible(8), y in invertible(8)) {
        let b = conjugate(&a, &x);
        let c = conjugate(&b, &y);
        prop_assert!(Subgroup::are_conjugate(&a, &b).unwrap().is_some());
        prop_assert!(Subgroup::are_conjugate(&b, &a).unwrap().is_some());
        prop_assert!(Subgroup::are_conjugate(&a, &c).unwrap().is_some());
        let ad = Subgroup::are_conjugate(&a, &d).unwrap().is_some();
        let da = Subgroup::are_conjugate(&d, &a).unwrap().is_some();
        prop_assert_eq!(ad, da);
        if let Some(z) = Subgroup::are_conjugate(&a, &d).unwrap() {
            prop_assert!(same_group(&conjugate(&a, &z), &d));
        }
    }

    #[test]
    fn twists_lie_in_the_group_with_minus_id(h in (3u64..=8).prop_flat_map(|n| group(n, 2))) {
        let full = h.with_minus_id(DEFAULT_CAP).unwrap();
        for k in h.quadratic_twists(DEFAULT_CAP).unwrap() {
            prop_assert!(k.elements().iter().all(|x| full.contains(x)));
            prop_assert!(same_group(&k.with_minus_id(DEFAULT_CAP).unwrap(), &full));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn riemann_hurwitz_is_exact(h in (2u64..=12).prop_flat_map(curve_group)) {
        let action = coset_action(&h).unwrap();
        let (g, nu2, nu3, cusps) = genus_from_action(&action).unwrap();
        let lhs = 12 * (g as i64 - 1) + 3 * nu2 as i64 + 4 * nu3 as i64 + 6 * cusps as i64;
        prop_assert_eq!(lhs, action.degree() as i64);
    }

    #[test]
    fn genus_is_conjugation_invariant((h, x) in (2u64..=8).prop_flat_map(|n| (curve_group(n), invertible(n)))) {
        let a = CurveInvariants::compute(&h).unwrap();
        let b = CurveInvariants::compute(&conjugate(&h, &x)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn index_of_a_subgroup_is_a_multiple((h, extra) in (2u64..=9).prop_flat_map(|n| (curve_group(n), invertible(n)))) {
        let bigger = h.extend(&[extra], DEFAULT_CAP).unwrap();
        let small = CurveInvariants::compute(&h).unwrap();
        let big = CurveInvariants::compute(&bigger).unwrap();
        prop_assert_eq!(small.index % big.index, 0);
    }

    #[test]
    fn product_genus_ignores_generator_order(a in curve_group(4), b in curve_group(3)) {
        let rev = |h: &Subgroup| {
            let g: Vec<Mat2> = h.generators().iter().rev().cloned().collect();
            Subgroup::closure(h.modulus(), &g, DEFAULT_CAP).unwrap()
        };
        let direct = CurveInvariants::compute(&Subgroup::product(&a, &b, DEFAULT_CAP).unwrap()).unwrap();
        let swapped = CurveInvariants::compute(&Subgroup::product(&rev(&b), &rev(&a), DEFAULT_CAP).unwrap()).unwrap();
        let componentwise = CurveInvariants::of_product(&[&a, &b]).unwrap();
        prop_assert_eq!(direct, swapped);
        prop_assert_eq!(direct, componentwise);
    }
}

/// Registry curves with a free generator.
fn ranked_curves() -> Vec<&'static CurveEntry> {
    registries().curves.values().filter(|c| c.rank > 0).collect()
}

/// a * g + (torsion combination `t`) on a registry curve.
fn sample_point(c: &CurveEntry, a: i64, t: usize) -> Point {
    let e = &c.curve;
    let mut p = e.mul(a, &c.free_gens()[0]).unwrap();
    let tors = torsion_subgroup(e).points;
    p = e.add(&p, &tors[t % tors.len()]).unwrap();
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_law_axioms(i in any::<prop::sample::Index>(), a in -3i64..=3, b in -3i64..=3, c in -3i64..=3, t in 0usize..4) {
        let curves = ranked_curves();
        let entry = curves[i.index(curves.len())];
        let e = &entry.curve;
        let p = sample_point(entry, a, t);
        let q = sample_point(entry, b, t + 1);
        let r = sample_point(entry, c, 0);
        let left = e.add(&e.add(&p, &q).unwrap(), &r).unwrap();
        let right = e.add(&p, &e.add(&q, &r).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(e.add(&p, &q).unwrap(), e.add(&q, &p).unwrap());
        prop_assert!(e.add(&p, &e.neg(&p).unwrap()).unwrap().is_infinity());
        prop_assert!(e.on_curve(&e.add(&p, &q).unwrap()));
    }

    #[test]
    fn two_isogenies_are_homomorphisms(i in any::<prop::sample::Index>(), a in -2i64..=2, b in -2i64..=2, t in 0usize..4) {
        let reg = registries();
        let fact = &reg.isogenies[i.index(reg.isogenies.len())];
        let dom = &reg.curves[&fact.domain];
        let phi = two_isogeny(&dom.curve, &fact.kernel).unwrap();
        let e = &dom.curve;
        let p = sample_point(dom, a, t);
        let q = sample_point(dom, b, t + 1);
        let lhs = phi.eval(&e.add(&p, &q).unwrap()).unwrap();
        let rhs = phi.codomain.add(&phi.eval(&p).unwrap(), &phi.eval(&q).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        let target = &reg.curves[&fact.codomain].curve;
        prop_assert_eq!(phi.codomain.j_invariant().unwrap(), target.j_invariant().unwrap());
    }

    #[test]
    fn dual_isogeny_composes_to_doubling(i in any::<prop::sample::Index>(), a in -2i64..=2, t in 0usize..4) {
        let reg = registries();
        let fact = &reg.isogenies[i.index(reg.isogenies.len())];
        let dom = &reg.curves[&fact.domain];
        let e = &dom.curve;
        let short = e.short_model();
        let phi = two_isogeny(e, &fact.kernel).unwrap();
        let p = sample_point(dom, a, t);
        let twice = short.mul(2, &e.to_short(&p)).unwrap();
        let image = phi.eval(&p).unwrap();
        let mut found = false;
        for k in torsion_subgroup(&phi.codomain).points {
            if k.is_infinity() || phi.codomain.neg(&k).unwrap() != k {
                continue;
            }
            let psi = two_isogeny(&phi.codomain, &k).unwrap();
            let Some((u, r)) = minimal_scaling_match(&psi.codomain, &short) else { continue };
            let back = apply_scaling(&psi.eval(&image).unwrap(), &u, &r);
            if back == twice || back == short.neg(&twice).unwrap() {
                found = true;
            }
        }
        prop_assert!(found);
    }

    #[test]
    fn twists_keep_j_and_scale_the_discriminant(a in -30i64..30, b in -30i64..30, d in prop::sample::select(vec![-7i64, -3, -2, -1, 2, 3, 5, 6, 11])) {
        let disc = 4 * a * a * a + 27 * b * b;
        prop_assume!(disc != 0);
        let e = EllipticCurve::short(Rat::from_integer(a.into()), Rat::from_integer(b.into())).unwrap();
        let t = e.quadratic_twist(d).unwrap();
        prop_assert_eq!(e.j_invariant().unwrap(), t.j_invariant().unwrap());
        let d6 = Rat::from_integer(d.pow(6).into());
        prop_assert_eq!(t.discriminant(), e.discriminant() * d6);
    }

    #[test]
    fn torsion_satisfies_mazur(coeffs in prop::array::uniform5(-12i64..12)) {
        let e = EllipticCurve::from_ints(coeffs);
        prop_assume!(e.is_ok());
        let e = e.unwrap();
        prop_assume!(!e.discriminant().is_zero());
        let t = torsion_subgroup(&e);
        prop_assert!(mazur_validate(&t.structure));
        prop_assert_eq!(t.points.len() as u64, t.structure.iter().product::<u64>());
        for p in &t.points {
            prop_assert!(e.on_curve(p));
        }
    }
}
