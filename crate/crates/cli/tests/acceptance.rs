//! Acceptance gate: one check per criterion, each printing a PASS/FAIL line
//! with the measured worst value, its tolerance and the runtime budget.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qlax_core::algebra::{AlgebraDescriptor, AlgebraElement, CircleDiffOp, Matrix, ScalarField};
use qlax_core::appendix::AppendixModel;
use qlax_core::dyson::{left_log_derivative_residual, time_ordered_exp};
use qlax_core::lax::{conserved_traces, lax_residual, oracle_errors, solve_lax, uniqueness_discrepancy};
use qlax_core::monoid::{gr1_composition_table, Cobordism1, CobordismMonoid, IndexMonoid, IndexedSeries};
use qlax_core::sample::{self, SampleRng};
use qlax_core::symmetry::{
    apply_operator, check_ad_exp_ad, dense_ad, equivariance_discrepancy, solve_symmetry,
    symmetry_residual, symmetry_residual_full,
};
use qlax_core::{GradedSeries, LaxProblem, OperatorPath, Preset, TimeGrid};
use rand::Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn max(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

fn grid() -> TimeGrid {
    TimeGrid::new(1e-3, 1.0).unwrap()
}

fn rel(a: &AlgebraElement, b: &AlgebraElement) -> f64 {
    a.relative_distance(b).unwrap()
}

// Criterion 1 -------------------------------------------------------------

fn ring_law_error(rng: &mut SampleRng, desc: &AlgebraDescriptor) -> f64 {
    let a = sample::element(rng, desc, 1.0);
    let b = sample::element(rng, desc, 1.0);
    let c = sample::element(rng, desc, 1.0);
    let one = AlgebraElement::one(desc);
    let mul = |x: &AlgebraElement, y: &AlgebraElement| x.mul(y).unwrap();
    let add = |x: &AlgebraElement, y: &AlgebraElement| x.add(y).unwrap();
    max([
        rel(&mul(&mul(&a, &b), &c), &mul(&a, &mul(&b, &c))),
        rel(&mul(&a, &add(&b, &c)), &add(&mul(&a, &b), &mul(&a, &c))),
        rel(&mul(&add(&a, &b), &c), &add(&mul(&a, &c), &mul(&b, &c))),
        rel(&mul(&one, &a), &a),
        rel(&mul(&a, &one), &a),
    ])
}

type Sparse = BTreeMap<(usize, i64), Complex64>;

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `(a D^i)(b D^j) = Σ_l C(i, l) a b^{(l)} D^{i+j−l}` on sparse tables.
fn hand_leibniz(a: &Sparse, b: &Sparse) -> Sparse {
    let mut out = Sparse::new();
    for (&(i, ma), &ca) in a {
        for (&(j, mb), &cb) in b {
            for l in 0..=i {
                let d = Complex64::new(0.0, mb as f64).powu(l as u32);
                *out.entry((i + j - l, ma + mb)).or_default() += ca * cb * d * binom(i, l);
            }
        }
    }
    out
}

fn sparse_op(s: &Sparse, j: usize, m: usize) -> AlgebraElement {
    let mut op = CircleDiffOp::zero(j, m);
    for (&(order, mode), &c) in s {
        op = op.with_term(order, &[(mode, c)]).unwrap();
    }
    op.into()
}

fn curated_leibniz() -> (usize, f64) {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let ops: Vec<Sparse> = vec![
        [((1, 0), c(1.0, 0.0))].into(),
        [((2, 0), c(1.0, 0.0))].into(),
        [((0, 1), c(0.0, -0.5)), ((0, -1), c(0.0, 0.5))].into(),
        [((0, 1), c(0.5, 0.0)), ((0, -1), c(0.5, 0.0))].into(),
        [((0, 2), c(1.0, 0.0))].into(),
        [((1, 1), c(0.3, 0.1)), ((0, -1), c(-0.7, 0.2))].into(),
    ];
    let (j, m) = (4, 4);
    let mut cases = 0;
    let mut worst: f64 = 0.0;
    'outer: for a in &ops {
        for b in &ops {
            if cases == 20 {
                break 'outer;
            }
            let want = hand_leibniz(a, b);
            if want.keys().any(|k| k.0 > j || k.1.unsigned_abs() as usize > m) {
                continue;
            }
            let got = sparse_op(a, j, m).mul(&sparse_op(b, j, m)).unwrap();
            worst = worst.max(got.sub(&sparse_op(&want, j, m)).unwrap().norm());
            cases += 1;
        }
    }
    (cases, worst)
}

fn criterion_1() -> Verdict {
    let mut rng = sample::rng(1);
    let diffop = AlgebraDescriptor::CircleDiffOp { max_order: 4, modes: 4 };
    let mut matrix_worst: f64 = 0.0;
    let mut diffop_worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=6);
        let field = if rng.gen_bool(0.5) { ScalarField::Real } else { ScalarField::Complex };
        matrix_worst = matrix_worst.max(ring_law_error(&mut rng, &AlgebraDescriptor::Matrix { n, field }));
        diffop_worst = diffop_worst.max(ring_law_error(&mut rng, &diffop));
    }
    let (cases, leibniz) = curated_leibniz();
    verdict(
        matrix_worst <= 1e-12 && diffop_worst <= 1e-12 && cases == 20 && leibniz <= 1e-12,
        format!(
            "ring laws rel err matrix {matrix_worst:.2e}, diffop {diffop_worst:.2e} (1000 samples each, tol 1e-12); \
             {cases} Leibniz cases max err {leibniz:.2e} (tol 1e-12)"
        ),
    )
}

// Criterion 2 -------------------------------------------------------------

fn criterion_2() -> Verdict {
    let mut rng = sample::rng(2);
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let n = rng.gen_range(1..=6);
        let order = rng.gen_range(1..=10);
        let field = if i % 2 == 0 { ScalarField::Real } else { ScalarField::Complex };
        let d = AlgebraDescriptor::Matrix { n, field };
        let s = sample::series(&mut rng, &d, order, 1, 0.5);
        let back = s.exp().unwrap().log().unwrap();
        worst = worst.max(max(s.relative_distances(&back).unwrap()));
        let u = GradedSeries::unit(&d, order).add(&s).unwrap();
        let back = u.log().unwrap().exp().unwrap();
        worst = worst.max(max(u.relative_distances(&back).unwrap()));
    }
    verdict(worst <= 1e-10, format!("exp/log roundtrips on 200 series, worst grade rel err {worst:.2e} (tol 1e-10)"))
}

// Criterion 3 -------------------------------------------------------------

fn criterion_3() -> Verdict {
    let mut rng = sample::rng(3);
    let b = sample::element(&mut rng, &AlgebraDescriptor::matrix(4), 0.7);
    let order = 8;
    let g = time_ordered_exp(&OperatorPath::constant(b.clone()), 0.5, order, &grid()).unwrap();
    let last = g.values.last().unwrap();
    let mut power = AlgebraElement::one(&b.descriptor());
    let mut fact = 1.0;
    let mut grade_err: f64 = 0.0;
    for i in 0..=order {
        if i > 0 {
            power = power.mul(&b).unwrap();
            fact *= i as f64;
        }
        grade_err = grade_err.max(last.coeff(i).sub(&power.scale(1.0 / fact)).unwrap().norm());
    }
    let mut residual: f64 = 0.0;
    for preset in Preset::ALL {
        let (_, path) = preset.data();
        let g = time_ordered_exp(&path, 0.5, order, &grid()).unwrap();
        residual = residual.max(left_log_derivative_residual(&g, &path, 0.5).unwrap().max());
    }
    verdict(
        grade_err <= 1e-8 && residual <= 1e-6,
        format!("constant-path grade err {grade_err:.2e} (tol 1e-8); preset left-log residual {residual:.2e} (tol 1e-6)"),
    )
}

// Criterion 4 -------------------------------------------------------------

fn sl2_closed_form_error() -> f64 {
    let p = LaxProblem::from_preset(Preset::Sl2Nilpotent, 0.5, 8, grid()).unwrap();
    let res = solve_lax(&p).unwrap();
    let e = |i, j| -> AlgebraElement { Matrix::unit(2, i, j, ScalarField::Real).into() };
    let h = e(0, 0).sub(&e(1, 1)).unwrap();
    let mut worst: f64 = 0.0;
    for (k, t) in grid().times().into_iter().enumerate() {
        let mut want = GradedSeries::zero(&h.descriptor(), 8);
        want.set_coeff(0, e(1, 0)).unwrap();
        want.set_coeff(1, h.scale(t)).unwrap();
        want.set_coeff(2, e(0, 1).scale(-t * t)).unwrap();
        worst = worst.max(max(res.values[k].distances(&want).unwrap()));
        let s = 0.5 * t;
        let closed = e(1, 0).add(&h.scale(s)).unwrap().sub(&e(0, 1).scale(s * s)).unwrap();
        worst = worst.max(res.values[k].evaluate(0.5).sub(&closed).unwrap().norm());
    }
    worst
}

fn criterion_4() -> Verdict {
    let mut uniq: f64 = 0.0;
    let mut resid: f64 = 0.0;
    for preset in Preset::ALL {
        let p = LaxProblem::from_preset(preset, 0.5, 8, grid()).unwrap();
        let res = solve_lax(&p).unwrap();
        uniq = uniq.max(uniqueness_discrepancy(&res).unwrap().max());
        resid = resid.max(lax_residual(&res).unwrap().max());
    }
    let closed = sl2_closed_form_error();
    let p = LaxProblem::from_preset(Preset::Toda3, 0.5, 8, grid()).unwrap();
    let res = solve_lax(&p).unwrap();
    let drift = max((1..=4).map(|k| conserved_traces(&res, k).unwrap().drift.max()));
    verdict(
        uniq <= 1e-8 && resid <= 1e-6 && closed <= 1e-10 && drift <= 1e-8,
        format!(
            "(a) solver agreement {uniq:.2e} (tol 1e-8); (b) residual {resid:.2e} (tol 1e-6); \
             (c) sl2 closed form {closed:.2e} (tol 1e-10); (d) toda-3 trace drift k=1..4 {drift:.2e} (tol 1e-8)"
        ),
    )
}

// Criterion 5 -------------------------------------------------------------

fn criterion_5() -> Verdict {
    let mut problems = vec![
        ("toda-3".to_string(), LaxProblem::from_preset(Preset::Toda3, 0.2, 4, grid()).unwrap()),
        ("rotation-2".to_string(), LaxProblem::from_preset(Preset::Rotation2, 0.2, 4, grid()).unwrap()),
    ];
    let d = AlgebraDescriptor::matrix(4);
    let mut rng = sample::rng(7);
    let l0 = sample::element(&mut rng, &d, 0.5);
    let path = sample::path(&mut rng, &d, 2, 0.4);
    problems.push(("random n=4".into(), LaxProblem::new(l0, path, 0.2, 4, grid()).unwrap()));
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, p) in &problems {
        let e = oracle_errors(p, &[0.2, 0.1, 0.05]).unwrap();
        let ratios: Vec<f64> = e.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        pass &= ratios.iter().all(|r| (4.5..=5.5).contains(r));
        parts.push(format!("{name} {:.3}/{:.3}", ratios[0], ratios[1]));
    }
    verdict(pass, format!("N=4 log2 error ratios {} (band [4.5, 5.5])", parts.join(", ")))
}

// Criterion 6 -------------------------------------------------------------

fn criterion_6() -> Verdict {
    let d = AlgebraDescriptor::matrix(3);
    let mut rng = sample::rng(6);
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let x = sample::element(&mut rng, &d, 1.0);
        let y = sample::element(&mut rng, &d, 1.0);
        let path = sample::path(&mut rng, &d, 2, 0.5);
        let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let p = LaxProblem::new(x.clone(), path, 0.5, 6, grid()).unwrap();
        let lx = solve_lax(&p).unwrap();
        let ly = solve_lax(&p.with_initial(y.clone()).unwrap()).unwrap();
        let combo = x.scale(a).add(&y.scale(b)).unwrap();
        let lc = solve_lax(&p.with_initial(combo).unwrap()).unwrap();
        for k in 0..lx.values.len() {
            let lin = lx.values[k].scale(a).add(&ly.values[k].scale(b)).unwrap();
            worst = worst.max(max(lc.values[k].relative_distances(&lin).unwrap()));
        }
    }
    verdict(worst <= 1e-12, format!("linearity in L(0) on 3 random pairs, worst rel err {worst:.2e} (tol 1e-12)"))
}

// Criterion 7 -------------------------------------------------------------

fn criterion_7() -> Verdict {
    let mut rng = sample::rng(70);
    let mut derivation: f64 = 0.0;
    for _ in 0..200 {
        let d = AlgebraDescriptor::matrix(rng.gen_range(1..=5));
        let p = sample::element(&mut rng, &d, 1.0);
        let x = sample::element(&mut rng, &d, 1.0);
        let y = sample::element(&mut rng, &d, 1.0);
        let ad = dense_ad(&p).unwrap();
        let lhs = apply_operator(&ad, &x.mul(&y).unwrap()).unwrap();
        let rhs = apply_operator(&ad, &x)
            .unwrap()
            .mul(&y)
            .unwrap()
            .add(&x.mul(&apply_operator(&ad, &y).unwrap()).unwrap())
            .unwrap();
        derivation = derivation.max(lhs.sub(&rhs).unwrap().norm());
    }
    let d = AlgebraDescriptor::matrix(4);
    let mut rng = sample::rng(7);
    let l0 = sample::element(&mut rng, &d, 0.5);
    let path = sample::path(&mut rng, &d, 2, 0.4);
    let mut problems = vec![LaxProblem::new(l0, path, 0.5, 6, grid()).unwrap()];
    problems.push(LaxProblem::from_preset(Preset::Toda3, 0.5, 6, grid()).unwrap());
    let (mut ad_exp, mut sym3, mut phi, mut equi): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for p in &problems {
        let lax = solve_lax(p).unwrap();
        let s = solve_symmetry(&dense_ad(&p.l0).unwrap(), &p.path, p.q0, p.order, &p.grid).unwrap();
        ad_exp = ad_exp.max(check_ad_exp_ad(&p.path, p.q0, p.order, &p.grid, &p.l0).unwrap().max());
        sym3 = sym3.max(symmetry_residual(&s).unwrap().max());
        phi = phi.max(symmetry_residual_full(&s, &lax).unwrap().max());
        equi = equi.max(equivariance_discrepancy(&s, &lax).unwrap().max());
    }
    verdict(
        derivation <= 1e-12 && ad_exp <= 1e-9 && sym3 <= 1e-6 && phi <= 1e-6 && equi <= 1e-8,
        format!(
            "ad derivation {derivation:.2e} (tol 1e-12); Ad=exp(ad) {ad_exp:.2e} (tol 1e-9); \
             symmetry residual {sym3:.2e}, phi_q {phi:.2e} (tol 1e-6); equivariance {equi:.2e} (tol 1e-8)"
        ),
    )
}

// Criterion 8 -------------------------------------------------------------

fn criterion_8() -> Verdict {
    let defined: Vec<String> = gr1_composition_table()
        .into_iter()
        .filter(|(_, _, p)| p.is_some())
        .map(|(a, b, _)| format!("{a}*{b}"))
        .collect();
    let mut expected = vec!["[0;1]*[0;1]", "[0;1]*]0;1]", "[0;1[*[0;1]", "[0;1[*]0;1]"];
    expected.sort();
    let mut got = defined.clone();
    got.sort();
    let table_ok = got == expected;
    let all = Cobordism1::all();
    let mut assoc_ok = true;
    for a in all {
        for b in all {
            for c in all {
                let l = a.compose(b).and_then(|ab| ab.compose(c));
                let r = b.compose(c).and_then(|bc| a.compose(bc));
                assoc_ok &= l == r;
            }
        }
    }
    let grade1 = CobordismMonoid.enumerate_grade(1).len();
    let mut rng = sample::rng(8);
    let d = AlgebraDescriptor::matrix(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let order = rng.gen_range(0..=8);
        let a = sample::series(&mut rng, &d, order, 0, 1.0);
        let b = sample::series(&mut rng, &d, order, 0, 1.0);
        let via = IndexedSeries::from_graded(&a).mul(&IndexedSeries::from_graded(&b)).unwrap().to_graded();
        worst = worst.max(max(via.distances(&a.mul(&b).unwrap()).unwrap()));
    }
    verdict(
        table_ok && assoc_ok && grade1 == 5 && worst <= 1e-12,
        format!(
            "defined compositions {defined:?}; associativity on 125 triples {}; grade-1 count {grade1}; \
             N-series vs graded product {worst:.2e} (tol 1e-12)",
            if assoc_ok { "holds" } else { "FAILS" }
        ),
    )
}

// Criterion 9 -------------------------------------------------------------

fn criterion_9() -> Verdict {
    let m = AppendixModel::default();
    let mut violations = 0;
    for t in [0.9, -0.9, 0.5, -0.5, 0.1] {
        let r = m.verify_diffeo_bounds(t).unwrap();
        assert_eq!(r.points, 2001);
        violations += r.value_violations + r.derivative_violations;
    }
    let v = m.velocity_at_zero().unwrap().max_deviation();
    let w = m.demonstrate_nonregularity(0.5, 0.6).unwrap();
    verdict(
        violations == 0 && v <= 1e-6 && w.translation_exits && w.c_t_inside,
        format!(
            "bound violations {violations} on 2001 points x 5 times; velocity deviation {v:.2e} (tol 1e-6); \
             translation 0.5+0.6 = {} exits: {}",
            w.translation, w.translation_exits
        ),
    )
}

// Criterion 10 ------------------------------------------------------------

fn read_tree(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn criterion_10() -> Verdict {
    let tmp = tempfile::TempDir::new().unwrap();
    let mut trees = Vec::new();
    let mut codes = Vec::new();
    for name in ["first", "second"] {
        let dir = tmp.path().join(name);
        let out = Command::new(env!("CARGO_BIN_EXE_qlax"))
            .args(["selftest", "--out"])
            .arg(&dir)
            .output()
            .unwrap();
        codes.push(out.status.code().unwrap());
        trees.push(read_tree(&dir));
    }
    let identical = trees[0] == trees[1];
    let bytes: usize = trees[0].iter().map(|(_, b)| b.len()).sum();
    verdict(
        identical && codes == [0, 0] && !trees[0].is_empty(),
        format!(
            "two selftest runs: exit codes {codes:?}, {} files / {bytes} bytes, byte-identical: {identical}",
            trees[0].len()
        ),
    )
}

type Criterion = (u32, Duration, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, Duration::from_secs(5), criterion_1),
        (2, Duration::from_secs(5), criterion_2),
        (3, Duration::from_secs(10), criterion_3),
        (4, Duration::from_secs(20), criterion_4),
        (5, Duration::from_secs(10), criterion_5),
        (6, Duration::from_secs(90), criterion_6),
        (7, Duration::from_secs(20), criterion_7),
        (8, Duration::from_secs(2), criterion_8),
        (9, Duration::from_secs(2), criterion_9),
        (10, Duration::from_secs(90), criterion_10),
    ];
    let mut failed = Vec::new();
    for (id, budget, run) in criteria {
        let start = Instant::now();
        let v = run();
        let elapsed = start.elapsed();
        let pass = v.pass && elapsed <= budget;
        println!(
            "criterion {id:>2}: {} | {} | {:.2}s (budget {}s)",
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        if !pass {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all 10 acceptance criteria pass");
}
