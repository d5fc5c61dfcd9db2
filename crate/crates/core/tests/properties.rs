//! Randomized properties over seeded generators.

mod common;

use mas_core::exterior::GraphMap;
use mas_core::fieldexpr::ScalarField;
use mas_core::fluids::GridField;
use mas_core::sample;
use proptest::prelude::*;
use rand::Rng;

fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    sample::rng(seed)
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-10 * (1.0 + scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wedge_is_graded_commutative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = common::chart(4);
        let (p, q) = (r.gen_range(0..=2), r.gen_range(0..=2));
        let a = common::form(&mut r, &c, p, 2);
        let b = common::form(&mut r, &c, q, 2);
        let pt = common::point(&mut r, 4);
        let sign = if (p * q) % 2 == 0 { 1.0 } else { -1.0 };
        let x = a.wedge(&b).unwrap().eval(&pt).unwrap();
        let y = b.wedge(&a).unwrap().scale(sign).eval(&pt).unwrap();
        prop_assert!(close(x.sub(&y).unwrap().max_abs(), 0.0, x.max_abs()));
    }

    #[test]
    fn d_squared_vanishes(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = common::chart(4);
        let p = r.gen_range(0..=2);
        let a = common::form(&mut r, &c, p, 2);
        let pt = common::point(&mut r, 4);
        let dd = a.d().d().eval(&pt).unwrap().max_abs();
        prop_assert!(dd < 1e-9, "d²α = {dd}");
    }

    #[test]
    fn wedge_matches_determinant_expansion(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = common::chart(4);
        let (p, q) = (r.gen_range(1..=2), r.gen_range(1..=2));
        let a = common::form(&mut r, &c, p, 1);
        let b = common::form(&mut r, &c, q, 1);
        let pt = common::point(&mut r, 4);
        let vs: Vec<Vec<f64>> = (0..p + q).map(|_| common::point(&mut r, 4)).collect();
        let refs: Vec<&[f64]> = vs.iter().map(|v| v.as_slice()).collect();
        let w = a.wedge(&b).unwrap().eval(&pt).unwrap();
        let direct = w.apply(&refs).unwrap();
        prop_assert!(close(direct, common::brute_apply(&w, &vs), direct.abs()));
    }

    #[test]
    fn pullback_commutes_with_d(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = common::chart(4);
        let src = common::named_chart("s", 3);
        let p = r.gen_range(0..=2);
        let a = common::form(&mut r, &c, p, 1);
        let f = common::poly_map(&mut r, &src, &c);
        let pt = common::point(&mut r, 3);
        let pulled = f.pullback(&a).unwrap();
        let x = f.pullback(&a.d()).unwrap().eval(&pt).unwrap();
        let y = pulled.d().eval(&pt).unwrap();
        // cancellation inside d is bounded by the first-jet size of F*α
        let scale = pulled.taylor(&pt, 1).unwrap().terms()
            .flat_map(|(_, t)| t.coeffs().iter().map(|v| v.abs()).collect::<Vec<_>>())
            .fold(0.0, f64::max);
        prop_assert!(close(x.sub(&y).unwrap().max_abs(), 0.0, scale));
    }

    #[test]
    fn pullback_is_functorial(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = common::chart(4);
        let (s, t) = (common::named_chart("s", 2), common::named_chart("t", 3));
        let a = common::form(&mut r, &c, 1, 1);
        let psi = common::poly_map(&mut r, &s, &t);
        let phi = common::poly_map(&mut r, &t, &c);
        let comp: Vec<ScalarField> = phi.components().iter().map(|f| f.compose(&s, psi.components()).unwrap()).collect();
        let comp = GraphMap::new(&s, &c, comp).unwrap();
        let pt = common::point(&mut r, 2);
        let x = comp.pullback(&a).unwrap().eval(&pt).unwrap();
        let y = psi.pullback(&phi.pullback(&a).unwrap()).unwrap().eval(&pt).unwrap();
        prop_assert!(close(x.sub(&y).unwrap().max_abs(), 0.0, x.max_abs()));
    }

    #[test]
    fn jet_gradient_matches_differences(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = common::chart(3);
        let f = common::scalar(&mut r, &c, 3);
        let x = common::point(&mut r, 3);
        let g = f.eval_jet(&x, 1).unwrap().gradient();
        for i in 0..3 {
            let d = |h: f64| {
                let (mut a, mut b) = (x.clone(), x.clone());
                a[i] += h;
                b[i] -= h;
                (f.eval(&a).unwrap() - f.eval(&b).unwrap()) / (2.0 * h)
            };
            let fd = (4.0 * d(5e-4) - d(1e-3)) / 3.0;
            prop_assert!((g[i] - fd).abs() <= 1e-6 * g[i].abs().max(1.0), "∂{i}: {} vs {fd}", g[i]);
        }
    }

    #[test]
    fn order_zero_jets_agree_bitwise(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = common::chart(3);
        let f = common::scalar(&mut r, &c, 3);
        let x = common::point(&mut r, 3);
        let v = f.eval(&x).unwrap();
        prop_assert_eq!(v.to_bits(), f.eval_jet(&x, 0).unwrap().value().to_bits());
        prop_assert_eq!(v.to_bits(), f.eval_jet(&x, 2).unwrap().value().to_bits());
    }

    #[test]
    fn symbolic_and_jet_derivatives_agree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = common::chart(3);
        let f = common::scalar(&mut r, &c, 2);
        let x = common::point(&mut r, 3);
        let h = f.eval_jet(&x, 2).unwrap().hessian();
        for i in 0..3 {
            for j in 0..3 {
                let s = f.diff(i).diff(j).eval(&x).unwrap();
                prop_assert!(close(s, h[i][j], s.abs()), "∂{i}∂{j}: {s} vs {}", h[i][j]);
            }
        }
    }

    #[test]
    fn grid_csv_round_trips(seed in any::<u64>(), n in 4usize..9, with_p in any::<bool>()) {
        let mut r = rng(seed);
        let c = common::chart(2);
        let u = common::vector_field(&mut r, &c, 1);
        let p = common::scalar(&mut r, &c, 1);
        let h = r.gen_range(0.05..0.5);
        let g = GridField::sample(&u, with_p.then_some(&p), &[-1.0, 0.5], &[h, h], &[n, n + 1]).unwrap();
        let back = GridField::from_reader(g.to_csv().unwrap().as_bytes()).unwrap();
        prop_assert_eq!(&back.shape, &g.shape);
        prop_assert_eq!(&back.u, &g.u);
        prop_assert_eq!(&back.p, &g.p);
        for (a, b) in back.spacing.iter().zip(&g.spacing) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn grid_rejects_bad_input() {
    let bad = [
        "x1,u1\n0,0\n",
        "x1,x2,u1,u2\n",
        "x1,x2,u1,u2\n0,0,1,1\n0,1,1,1\n",
        "x1,x2,u1,u2\n0,0,abc,1\n",
    ];
    for src in bad {
        assert!(GridField::from_reader(src.as_bytes()).is_err(), "accepted {src:?}");
    }
    // shuffled rows are not a row-major lattice
    let c = common::chart(2);
    let u = mas_core::exterior::VectorField::parse(&c, &["y2", "-y1"]).unwrap();
    let g = GridField::sample(&u, None, &[0.0, 0.0], &[0.1, 0.1], &[4, 4]).unwrap();
    let csv = g.to_csv().unwrap();
    let mut lines: Vec<&str> = csv.lines().collect();
    lines.swap(1, 2);
    assert!(GridField::from_reader(lines.join("\n").as_bytes()).is_err());
}
