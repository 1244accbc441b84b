//! Round-trip and invariance checks for the double-point classifier:
//! every catalogued normal form must classify back to its own type and
//! coindex, and the verdict must not depend on the coordinates chosen.

use charp_core::{Fq, FqElem, MPoly, Ring};
use charp_lattice::{AdeClass, Coindex, RdpType};
use charp_singular::{artin_normal_form, classify_germ, resolve, Classification, Resolution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn expect_rdp(c: &Classification) -> RdpType {
    match c {
        Classification::Rdp(t) => *t,
        other => panic!("expected a rational double point, got {other:?}"),
    }
}

#[test]
fn catalogued_normal_forms_classify_back_to_their_type() {
    // (characteristic, class, coindex argument, expected coindex)
    let mut cases: Vec<(u64, AdeClass, Option<u32>, Coindex)> = Vec::new();
    // Wild D-types in characteristic 2.
    for m in 2..=8u32 {
        cases.push((2, AdeClass::d(2 * m), Some(0), Coindex::R(0)));
        cases.push((2, AdeClass::d(2 * m + 1), Some(0), Coindex::R(0)));
    }
    for m in 1..=4u32 {
        for r in 1..=m {
            cases.push((2, AdeClass::d(4 * m), Some(r), Coindex::R(r)));
        }
    }
    // Wild E-types.
    cases.push((2, AdeClass::e(6), Some(0), Coindex::R(0)));
    cases.push((2, AdeClass::e(7), Some(0), Coindex::R(0)));
    for r in 0..=2 {
        cases.push((2, AdeClass::e(8), Some(r), Coindex::R(r)));
    }
    for r in 0..=1 {
        cases.push((3, AdeClass::e(6), Some(r), Coindex::R(r)));
    }
    cases.push((3, AdeClass::e(7), Some(0), Coindex::R(0)));
    cases.push((3, AdeClass::e(8), Some(0), Coindex::R(0)));
    for r in 0..=1 {
        cases.push((5, AdeClass::e(8), Some(r), Coindex::R(r)));
    }
    // Tame representatives across the families.
    cases.push((7, AdeClass::a(6), None, Coindex::Na));
    cases.push((5, AdeClass::a(4), None, Coindex::Na));
    cases.push((2, AdeClass::a(3), None, Coindex::Na));
    cases.push((3, AdeClass::d(4), None, Coindex::Na));
    cases.push((3, AdeClass::d(5), None, Coindex::Na));
    cases.push((5, AdeClass::d(6), None, Coindex::Na));
    cases.push((5, AdeClass::e(6), None, Coindex::Na));
    cases.push((5, AdeClass::e(7), None, Coindex::Na));
    cases.push((7, AdeClass::e(8), None, Coindex::Na));

    for (p, class, arg, want) in cases {
        let form = artin_normal_form(p, class, arg)
            .unwrap_or_else(|e| panic!("normal form for {class} (p={p}, {arg:?}): {e}"));
        let got = expect_rdp(
            &classify_germ(&form)
                .unwrap_or_else(|e| panic!("classify {class} (p={p}, {arg:?}): {e}")),
        );
        assert_eq!(
            got,
            RdpType { class, coindex: want },
            "round trip for {class} with coindex {arg:?} in characteristic {p}"
        );
    }
}

#[test]
fn exceptional_curves_all_have_self_intersection_minus_two() {
    for (p, class, arg) in [
        (2u64, AdeClass::d(6), Some(0)),
        (3, AdeClass::e(6), Some(1)),
        (5, AdeClass::e(8), Some(1)),
        (7, AdeClass::a(4), None),
    ] {
        let form = artin_normal_form(p, class, arg).unwrap();
        match resolve(&form, 24).unwrap() {
            Resolution::Graph(g) => {
                assert_eq!(g.len(), class.rank() as usize);
                assert!(g.self_intersections.iter().all(|&s| s == -2));
            }
            Resolution::NonRdp(r) => panic!("{class} must resolve: {r}"),
        }
    }
}

fn det3(m: &[[FqElem; 3]; 3]) -> FqElem {
    let mut acc = m[0][0].mul(&m[1][1].mul(&m[2][2]).sub(&m[1][2].mul(&m[2][1])));
    acc = acc.sub(&m[0][1].mul(&m[1][0].mul(&m[2][2]).sub(&m[1][2].mul(&m[2][0]))));
    acc.add(&m[0][2].mul(&m[1][0].mul(&m[2][1]).sub(&m[1][1].mul(&m[2][0]))))
}

fn random_linear_change(ring: &Ring, rng: &mut ChaCha8Rng) -> Vec<MPoly> {
    let field = ring.field();
    let p = field.p();
    loop {
        let mut m: Vec<[FqElem; 3]> = Vec::with_capacity(3);
        for _ in 0..3 {
            let row = [
                field.from_int(rng.gen_range(0..p) as i64),
                field.from_int(rng.gen_range(0..p) as i64),
                field.from_int(rng.gen_range(0..p) as i64),
            ];
            m.push(row);
        }
        let m: [[FqElem; 3]; 3] = [m[0].clone(), m[1].clone(), m[2].clone()];
        if det3(&m).is_zero() {
            continue;
        }
        return (0..3)
            .map(|i| {
                let mut img = MPoly::zero(ring);
                for (j, entry) in m[i].iter().enumerate() {
                    img = img.add(&MPoly::var(ring, j).scale(entry));
                }
                img
            })
            .collect();
    }
}

#[test]
fn classification_is_invariant_under_linear_changes() {
    let germs: Vec<(u64, AdeClass, Option<u32>)> = vec![
        (2, AdeClass::d(5), Some(0)),
        (2, AdeClass::e(8), Some(2)),
        (3, AdeClass::e(6), Some(1)),
        (5, AdeClass::e(8), Some(1)),
        (7, AdeClass::a(3), None),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
    for (p, class, arg) in germs {
        let form = artin_normal_form(p, class, arg).unwrap();
        let base = classify_germ(&form).unwrap();
        let ring = form.ring().clone();
        for trial in 0..20 {
            let imgs = random_linear_change(&ring, &mut rng);
            let moved = form.subst(&imgs);
            let got = classify_germ(&moved).unwrap();
            assert_eq!(
                got, base,
                "linear change #{trial} altered the verdict for {class} (p={p})"
            );
        }
    }
}

#[test]
fn tjurina_agrees_between_normal_form_and_transformed_germ() {
    let form = artin_normal_form(2, AdeClass::d(8), Some(1)).unwrap();
    let ring = form.ring().clone();
    let x = MPoly::var(&ring, 0);
    let y = MPoly::var(&ring, 1);
    let z = MPoly::var(&ring, 2);
    // Formal (non-linear) coordinate change with unit Jacobian.
    let imgs = [
        x.add(&y.mul(&y)),
        y.add(&z.mul(&z).mul(&z)),
        z.add(&x.mul(&y)),
    ];
    let moved = form.subst(&imgs);
    assert_eq!(
        charp_singular::tjurina(&form).unwrap(),
        charp_singular::tjurina(&moved).unwrap()
    );
}

#[test]
fn the_quadratic_cone_in_every_characteristic_is_a1() {
    for p in [2u64, 3, 5, 7, 11, 13] {
        let fq = Fq::prime(p).unwrap();
        let ring = Ring::new(&fq, &["x", "y", "z"]);
        let germ = MPoly::parse(&ring, "z^2+x*y").unwrap();
        let got = expect_rdp(&classify_germ(&germ).unwrap());
        assert_eq!(got, RdpType::plain(AdeClass::a(1)));
    }
}
