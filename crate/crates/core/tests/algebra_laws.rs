use std::collections::BTreeMap;

use num_complex::Complex64;
use proptest::prelude::*;
use qlax_core::algebra::{AlgebraDescriptor, AlgebraElement, CircleDiffOp, ScalarField};
use qlax_core::sample;

const J: usize = 4;
const M: usize = 4;

fn rel(a: &AlgebraElement, b: &AlgebraElement) -> f64 {
    a.relative_distance(b).unwrap()
}

fn descriptors() -> Vec<AlgebraDescriptor> {
    vec![
        AlgebraDescriptor::matrix(3),
        AlgebraDescriptor::Matrix {
            n: 4,
            field: ScalarField::Complex,
        },
        AlgebraDescriptor::CircleDiffOp {
            max_order: J,
            modes: M,
        },
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn ring_axioms(seed in any::<u64>(), which in 0usize..3) {
        let desc = &descriptors()[which];
        let mut rng = sample::rng(seed);
        let a = sample::element(&mut rng, desc, 1.0);
        let b = sample::element(&mut rng, desc, 1.0);
        let c = sample::element(&mut rng, desc, 1.0);
        let one = AlgebraElement::one(desc);
        let ab_c = a.mul(&b).unwrap().mul(&c).unwrap();
        let a_bc = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(rel(&ab_c, &a_bc) <= 1e-12);
        let left = a.mul(&b.add(&c).unwrap()).unwrap();
        let right = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert!(rel(&left, &right) <= 1e-12);
        let left = a.add(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&c).unwrap().add(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(rel(&left, &right) <= 1e-12);
        prop_assert_eq!(one.mul(&a).unwrap(), a.clone());
        prop_assert_eq!(a.mul(&one).unwrap(), a.clone());
    }

    #[test]
    fn commutator_is_a_derivation(seed in any::<u64>(), which in 0usize..3) {
        let desc = &descriptors()[which];
        let mut rng = sample::rng(seed);
        let p = sample::element(&mut rng, desc, 1.0);
        let x = sample::element(&mut rng, desc, 1.0);
        let y = sample::element(&mut rng, desc, 1.0);
        let lhs = p.commutator(&x.mul(&y).unwrap()).unwrap();
        let rhs = p
            .commutator(&x)
            .unwrap()
            .mul(&y)
            .unwrap()
            .add(&x.mul(&p.commutator(&y).unwrap()).unwrap())
            .unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn scaling_and_axpy_agree(seed in any::<u64>(), alpha in -3.0f64..3.0) {
        let desc = AlgebraDescriptor::matrix(3);
        let mut rng = sample::rng(seed);
        let a = sample::element(&mut rng, &desc, 1.0);
        let b = sample::element(&mut rng, &desc, 1.0);
        let mut c = a.clone();
        c.axpy(alpha, &b).unwrap();
        let d = a.add(&b.scale(alpha)).unwrap();
        prop_assert!(rel(&c, &d) <= 1e-15);
    }
}

#[test]
fn mismatched_backends_are_rejected() {
    let a = AlgebraElement::one(&AlgebraDescriptor::matrix(2));
    let b = AlgebraElement::one(&AlgebraDescriptor::matrix(3));
    assert!(a.mul(&b).is_err());
    let d = AlgebraElement::one(&AlgebraDescriptor::CircleDiffOp {
        max_order: 1,
        modes: 1,
    });
    assert!(a.add(&d).is_err());
}

// Trigonometric polynomial as mode -> coefficient; the operator action is
// computed from the coefficient table only.
type Trig = BTreeMap<i64, Complex64>;

fn act(op: &CircleDiffOp, f: &Trig) -> Trig {
    let mut out = Trig::new();
    let m = op.modes() as i64;
    for (&k, &fk) in f {
        let ik = Complex64::new(0.0, k as f64);
        for j in 0..=op.max_order() {
            let dk = ik.powu(j as u32) * fk;
            for mode in -m..=m {
                let c = op.coefficient(j, mode);
                if c != Complex64::new(0.0, 0.0) {
                    *out.entry(mode + k).or_default() += c * dk;
                }
            }
        }
    }
    out
}

fn trig_distance(a: &Trig, b: &Trig) -> f64 {
    let keys: std::collections::BTreeSet<i64> = a.keys().chain(b.keys()).copied().collect();
    keys.iter()
        .map(|k| {
            let z = Complex64::new(0.0, 0.0);
            (a.get(k).copied().unwrap_or(z) - b.get(k).copied().unwrap_or(z)).norm()
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn diffop_product_is_composition_of_actions(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let a = sample::diffop(&mut rng, J, M, 2, 2, 1.0);
        let b = sample::diffop(&mut rng, J, M, 2, 2, 1.0);
        let ab = a.mul(&b).unwrap();
        let (a, b, ab) = (a.as_diffop().unwrap(), b.as_diffop().unwrap(), ab.as_diffop().unwrap());
        // An order-J operator is determined by its action on J + 1 exponentials.
        for k in 0..=(J as i64 + 1) {
            let e: Trig = [(k, Complex64::new(1.0, 0.0))].into_iter().collect();
            let direct = act(ab, &e);
            let nested = act(a, &act(b, &e));
            prop_assert!(trig_distance(&direct, &nested) <= 1e-12 * 100.0);
        }
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

// Operator as (order, mode) -> coefficient, multiplied by the Leibniz rule
// (a D^i)(b D^j) = Σ_l C(i, l) a b^{(l)} D^{i+j-l}.
type Sparse = BTreeMap<(usize, i64), Complex64>;

fn leibniz(a: &Sparse, b: &Sparse) -> Sparse {
    let mut out = Sparse::new();
    for (&(i, ma), &ca) in a {
        for (&(j, mb), &cb) in b {
            for l in 0..=i {
                let deriv = Complex64::new(0.0, mb as f64).powu(l as u32);
                *out.entry((i + j - l, ma + mb)).or_default() += ca * cb * deriv * binom(i, l);
            }
        }
    }
    out
}

fn to_op(s: &Sparse) -> AlgebraElement {
    let mut op = CircleDiffOp::zero(J, M);
    for (&(j, m), &c) in s {
        op = op.with_term(j, &[(m, c)]).unwrap();
    }
    op.into()
}

#[test]
fn curated_leibniz_cases() {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let d: Sparse = [((1, 0), c(1.0, 0.0))].into();
    let d2: Sparse = [((2, 0), c(1.0, 0.0))].into();
    let sin1: Sparse = [((0, 1), c(0.0, -0.5)), ((0, -1), c(0.0, 0.5))].into();
    let cos1: Sparse = [((0, 1), c(0.5, 0.0)), ((0, -1), c(0.5, 0.0))].into();
    let e2: Sparse = [((0, 2), c(1.0, 0.0))].into();
    let mixed: Sparse = [((1, 1), c(0.3, 0.1)), ((0, -1), c(-0.7, 0.2))].into();
    let ops = [d, d2, sin1, cos1, e2, mixed];
    let mut cases = 0;
    for a in &ops {
        for b in &ops {
            let expected = leibniz(a, b);
            let max_order = expected.keys().map(|k| k.0).max().unwrap_or(0);
            let max_mode = expected.keys().map(|k| k.1.unsigned_abs() as usize).max().unwrap_or(0);
            if max_order > J || max_mode > M || cases == 20 {
                continue;
            }
            let got = to_op(a).mul(&to_op(b)).unwrap();
            let want = to_op(&expected);
            assert!(got.sub(&want).unwrap().norm() <= 1e-12, "case {cases}");
            cases += 1;
        }
    }
    assert_eq!(cases, 20);
}

#[test]
fn derivative_of_sine_matches_by_hand() {
    let d: AlgebraElement = CircleDiffOp::derivative(2, 2).unwrap().into();
    let s: AlgebraElement = CircleDiffOp::sin(2, 2, 1).unwrap().into();
    let c: AlgebraElement = CircleDiffOp::cos(2, 2, 1).unwrap().into();
    let lhs = d.mul(&s).unwrap();
    let rhs = s.mul(&d).unwrap().add(&c).unwrap();
    assert!(lhs.sub(&rhs).unwrap().norm() <= 1e-15);
}

#[test]
fn overflow_is_an_error_not_a_truncation() {
    let d: AlgebraElement = CircleDiffOp::derivative(1, 1).unwrap().into();
    assert!(d.mul(&d).is_err());
    let e: AlgebraElement = CircleDiffOp::zero(1, 1)
        .with_term(0, &[(1, Complex64::new(1.0, 0.0))])
        .unwrap()
        .into();
    assert!(e.mul(&e).is_err());
}
