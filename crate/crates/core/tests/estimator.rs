use std::f64::consts::PI;

use lpgraph::estimator::*;
use lpgraph::Graph;
use proptest::prelude::*;

/// `J₀` by its power series; accurate to rounding for `x ≤ 20`.
fn bessel_j0(x: f64) -> f64 {
    let q = -(x * x) / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..80 {
        term *= q / (k * k) as f64;
        sum += term;
    }
    sum
}

/// Composite Simpson rule with `n` (even) panels.
fn simpson(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

fn chain3() -> Graph {
    Graph::new(3, [(1, 3), (2, 3)]).unwrap()
}

fn bump_at(c: [f64; 2], s: f64) -> impl Fn(f64, f64) -> f64 + Sync {
    move |x, y| {
        let d2 = ((x - c[0]).powi(2) + (y - c[1]).powi(2)) / (s * s);
        if d2 < 9.0 {
            (-d2 / 2.0).exp()
        } else {
            0.0
        }
    }
}

#[test]
fn bessel_series_sanity() {
    assert_eq!(bessel_j0(0.0), 1.0);
    // first zero of J₀
    assert!(bessel_j0(2.404_825_557_695_773).abs() < 1e-14);
}

#[test]
fn kernel_mass_by_independent_integration() {
    for eps in [1.0 / 8.0, 1.0 / 16.0, 1.0 / 64.0] {
        let k = make_kernel(eps, 256).unwrap();
        // plane integral of w_ε(|y|)/(2π) in polar coordinates
        let mass = simpson(1.0 - eps, 1.0 + eps, 2000, |r| k.profile(r) * r);
        assert!((mass - 1.0).abs() < 1e-6, "eps {eps}: {mass}");
        assert!((k.mass() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn transform_matches_the_bessel_oracle() {
    let eps = 1.0 / 64.0;
    let k = make_kernel(eps, 1024).unwrap();
    for rho in [0.5, 1.0, 2.0, 3.0] {
        let got = k.fourier(rho).unwrap();
        // exact transform of the smoothed measure
        let exact = simpson(1.0 - eps, 1.0 + eps, 400, |r| k.profile(r) * r * bessel_j0(2.0 * PI * r * rho));
        assert!((got - exact).abs() < 1e-8, "rho {rho}: {got} vs {exact}");
    }
    let sharp = bessel_j0(2.0 * PI);
    assert!((k.fourier(1.0).unwrap() - sharp).abs() < 1e-3 + eps);
}

#[test]
fn decay_table_is_normalized() {
    let k = kernel_for_grid(1.0 / 32.0, 1.0 / 128.0, Some(2048)).unwrap();
    let freqs: Vec<f64> = (0..=62).map(|i| 2.0 + i as f64).collect();
    for row in kernel_decay_check(&k, &freqs).unwrap() {
        assert!(row.normalized <= 1.0, "{row:?}");
    }
    assert!(kernel_decay_check(&k, &[1e4]).is_err());
}

#[test]
fn family_areas_and_norms() {
    let h = 1.0 / 256.0;
    let k = GridField::cells_for(1.5, h);
    let ball = test_family(Family::Ball { radius: 0.125 }, h, k).unwrap();
    assert!((ball.integral() / (PI / 64.0) - 1.0).abs() < 0.05);
    let ann = test_family(Family::Annulus { thickness: 0.125 }, h, k).unwrap();
    assert!((ann.integral() / (2.0 * PI * 0.125) - 1.0).abs() < 0.05);
    for p in [1.0, 1.5, 3.0] {
        let n = lp_norm(&ball, p).unwrap();
        assert!((n / (PI / 64.0).powf(1.0 / p) - 1.0).abs() < 0.05);
    }
    let one = test_family(Family::Constant, h, k).unwrap();
    assert_eq!(lp_norm(&one, f64::INFINITY).unwrap(), 1.0);
    assert!(lp_norm(&one, 0.5).is_err());
    assert!(test_family(Family::Ball { radius: 2.0 }, h, k).is_err());
}

#[test]
fn averages_of_annulus_and_big_ball() {
    let (eps, h) = (1.0 / 32.0, 1.0 / 64.0);
    let kern = kernel_for_grid(eps, h, None).unwrap();
    // annulus around the unit circle averages to 1 at the origin
    let delta = 1.0 / 8.0;
    let k = GridField::cells_for(1.0 + delta + 1.0 + eps + 2.0 * h, h);
    let ann = test_family(Family::Annulus { thickness: delta }, h, k).unwrap();
    let a = circular_average(&ann, &kern).unwrap();
    let centre = a.interpolate(0.0, 0.0);
    assert!((centre - 1.0).abs() < 0.02, "{centre}");

    // big ball: A χ_{B_R} is 1 well inside B_{R−1−ε}
    let (eps, h) = (1.0 / 8.0, 1.0 / 16.0);
    let kern = kernel_for_grid(eps, h, None).unwrap();
    let r = 3.0;
    let k = GridField::cells_for(r + 1.0 + eps + 2.0 * h, h);
    let ball = test_family(Family::Ball { radius: r }, h, k).unwrap();
    let a = circular_average(&ball, &kern).unwrap();
    let lim = r - 1.0 - eps - h;
    for (idx, v) in a.values().iter().enumerate() {
        let (x, y) = a.point(idx);
        if x.hypot(y) < lim {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn tree_factor_matches_direct_on_the_chain() {
    let h = 1.0 / 16.0;
    let k = GridField::cells_for(4.0, h);
    let fs: Vec<GridField> = [[-0.6, 0.1], [0.7, -0.2], [0.05, 0.3]]
        .iter()
        .map(|&c| GridField::from_fn(h, k, bump_at(c, 0.3)).unwrap())
        .collect();
    let kern = make_kernel(1.0 / 16.0, 128).unwrap();
    let a = form_evaluate(&chain3(), &fs, &kern, FormMethod::TreeFactor).unwrap();
    let b = form_evaluate(&chain3(), &fs, &kern, FormMethod::Direct).unwrap();
    assert!(a > 0.0);
    assert!((a - b).abs() <= 1e-6 * b, "{a} vs {b}");
}

#[test]
fn triangle_value_is_symmetric_in_its_fields() {
    let h = 1.0 / 16.0;
    let k = GridField::cells_for(3.0, h);
    let fs: Vec<GridField> = [[0.0, 0.6], [-0.5, -0.3], [0.55, -0.25]]
        .iter()
        .map(|&c| GridField::from_fn(h, k, bump_at(c, 0.3)).unwrap())
        .collect();
    let kern = make_kernel(1.0 / 32.0, 128).unwrap();
    let g = Graph::complete(3);
    let base = form_evaluate(&g, &fs, &kern, FormMethod::RadonPair).unwrap();
    for p in [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
        let perm: Vec<GridField> = p.iter().map(|&i| fs[i].clone()).collect();
        let v = form_evaluate(&g, &perm, &kern, FormMethod::RadonPair).unwrap();
        assert!((v - base).abs() < 1e-3 * base, "{p:?}: {v} vs {base}");
    }
}

#[test]
fn zero_field_gives_zero() {
    let h = 1.0 / 8.0;
    let k = GridField::cells_for(3.0, h);
    let f = GridField::from_fn(h, k, bump_at([0.0, 0.0], 0.3)).unwrap();
    let z = f.zeros_like();
    let kern = make_kernel(1.0 / 8.0, 64).unwrap();
    for g in [chain3(), Graph::complete(3)] {
        let v = form_evaluate(&g, &[f.clone(), z.clone(), f.clone()], &kern, FormMethod::Auto).unwrap();
        assert_eq!(v, 0.0);
    }
}

#[test]
fn unit_ratio_never_exceeds_one() {
    let t = ratio_experiment(
        1.0,
        1.0,
        Shape::Ball,
        &[0.5, 0.25],
        Scale::Ratio(0.25),
        GridPolicy {
            half_width: None,
            h: Scale::Ratio(0.5),
        },
        None,
    )
    .unwrap();
    for r in &t.rows {
        assert!(r.ratio <= 1.0 + 1e-6, "{r:?}");
    }
}

/// Small compact fields for the property tests: sums of bumps with random
/// centers and amplitudes.
fn field(coeffs: &[(f64, f64, f64)]) -> GridField {
    let h = 1.0 / 8.0;
    let k = GridField::cells_for(3.5, h);
    let c = coeffs.to_vec();
    GridField::from_fn(h, k, move |x, y| c.iter().map(|&(a, cx, cy)| a * bump_at([cx, cy], 0.2)(x, y)).sum()).unwrap()
}

fn bumps() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((0.0f64..1.0, -0.8f64..0.8, -0.8f64..0.8), 1..3)
}

fn chain_value(fs: &[GridField]) -> f64 {
    let kern = make_kernel(1.0 / 8.0, 64).unwrap();
    form_evaluate(&chain3(), fs, &kern, FormMethod::TreeFactor).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn linear_in_each_field(a in bumps(), b in bumps(), c in bumps(), d in bumps(), s in -2.0f64..2.0, slot in 0usize..3) {
        let base = [field(&a), field(&b), field(&c)];
        let extra = field(&d);
        let mut mixed = base.clone();
        let combo: Vec<f64> = base[slot].values().iter().zip(extra.values()).map(|(x, y)| x + s * y).collect();
        mixed[slot] = GridField::new(extra.h(), extra.k(), combo).unwrap();
        let mut other = base.clone();
        other[slot] = extra;
        let lhs = chain_value(&mixed);
        let rhs = chain_value(&base) + s * chain_value(&other);
        let scale = chain_value(&base).abs() + s.abs() * chain_value(&other).abs() + 1e-300;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale, "{lhs} vs {rhs}");
    }

    #[test]
    fn positive_and_monotone(a in bumps(), b in bumps(), c in bumps(), d in bumps()) {
        let fs = [field(&a), field(&b), field(&c)];
        let v = chain_value(&fs);
        prop_assert!(v >= 0.0);
        let mut bigger = fs.clone();
        let grown: Vec<(f64, f64, f64)> = c.iter().chain(&d).copied().collect();
        bigger[2] = field(&grown);
        prop_assert!(chain_value(&bigger) >= v);
    }

    #[test]
    fn leaves_commute(a in bumps(), b in bumps(), c in bumps()) {
        let (fa, fb, fc) = (field(&a), field(&b), field(&c));
        let x = chain_value(&[fa.clone(), fb.clone(), fc.clone()]);
        let y = chain_value(&[fb, fa, fc]);
        prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1e-300));
    }

    #[test]
    fn covariant_under_grid_shifts(a in bumps(), b in bumps(), c in bumps(), dx in -4isize..4, dy in -4isize..4) {
        let fs = [field(&a), field(&b), field(&c)];
        let moved: Vec<GridField> = fs.iter().map(|f| f.shifted(dx, dy)).collect();
        let x = chain_value(&fs);
        let y = chain_value(&moved);
        prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1e-300), "{x} vs {y}");
    }
}
