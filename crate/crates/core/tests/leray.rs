use std::f64::consts::PI;

use lpgraph::estimator::{form_evaluate, make_kernel, FormMethod, GridField};
use lpgraph::leray::*;
use lpgraph::Graph;

const WIDTH: f64 = 0.3;
const CUT: f64 = 3.0 * WIDTH;

/// Truncated Gaussians near an equilateral unit triangle, slightly skewed.
fn centers() -> [[f64; 2]; 3] {
    let r = 1.0 / 3f64.sqrt();
    [0.0, 1.0, 2.0].map(|k: f64| {
        let a = PI / 2.0 + k * 2.0 * PI / 3.0;
        [r * a.cos() + 0.05 * k, r * a.sin()]
    })
}

fn gauss(c: [f64; 2], p: [f64; 2]) -> f64 {
    let d2 = (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2);
    if d2 <= CUT * CUT {
        (-d2 / (2.0 * WIDTH * WIDTH)).exp()
    } else {
        0.0
    }
}

fn field(c: [f64; 2], amp: f64) -> FnField<impl Fn([f64; 2]) -> f64 + Sync> {
    FnField {
        f: move |p| amp * gauss(c, p),
        bounds: Some(Bounds::new([c[0] - CUT, c[1] - CUT], [c[0] + CUT, c[1] + CUT])),
    }
}

fn as_dyn<T: TestFunction>(fs: &[T]) -> Vec<&dyn TestFunction> {
    fs.iter().map(|f| f as &dyn TestFunction).collect()
}

/// The Monte Carlo density carries arc-length mass `2π` per edge.
fn per_edge_norm(g: &Graph) -> f64 {
    (2.0 * PI).powi(g.edge_count() as i32)
}

#[test]
fn grid_and_monte_carlo_agree_on_the_triangle() {
    let g = Graph::complete(3);
    let eps = 1.0 / 32.0;
    let h = 1.0 / 16.0;
    let k = GridField::cells_for(3.0, h);
    let grids: Vec<GridField> = centers()
        .iter()
        .map(|&c| GridField::from_fn(h, k, move |x, y| gauss(c, [x, y])).unwrap())
        .collect();
    let grid = form_evaluate(&g, &grids, &make_kernel(eps, 128).unwrap(), FormMethod::RadonPair).unwrap();

    let fs: Vec<_> = centers().iter().map(|&c| field(c, 1.0)).collect();
    let est = leray_mc_form(&g, &as_dyn(&fs), eps, 1_000_000, 7).unwrap();
    let mc = est.value / per_edge_norm(&g);
    assert!(est.accepted > 10_000);
    assert!((mc - grid).abs() <= 0.1 * grid, "grid {grid} mc {mc}");
}

#[test]
fn common_rigid_motion_leaves_the_estimate_unchanged() {
    let g = Graph::complete(3);
    let fs: Vec<_> = centers().iter().map(|&c| field(c, 1.0)).collect();
    let motion = RigidMotion {
        angle: 0.7,
        shift: [2.5, -1.25],
    };
    let moved: Vec<Moved> = fs
        .iter()
        .map(|f| Moved {
            inner: f,
            motion,
        })
        .collect();
    let a = leray_mc_form(&g, &as_dyn(&fs), 1.0 / 32.0, 400_000, 1).unwrap();
    let b = leray_mc_form(&g, &as_dyn(&moved), 1.0 / 32.0, 400_000, 2).unwrap();
    let se = a.std_error.hypot(b.std_error);
    assert!((a.value - b.value).abs() <= 3.0 * se, "{a:?} vs {b:?}");
}

#[test]
fn linear_and_monotone_with_a_fixed_sample_stream() {
    let g = Graph::path(3);
    let c = centers();
    let base = [field(c[0], 1.0), field(c[1], 1.0), field(c[2], 1.0)];
    let doubled = [field(c[0], 1.0), field(c[1], 2.5), field(c[2], 1.0)];
    let a = leray_mc_form(&g, &as_dyn(&base), 0.05, 50_000, 3).unwrap();
    let b = leray_mc_form(&g, &as_dyn(&doubled), 0.05, 50_000, 3).unwrap();
    assert!(a.value > 0.0);
    assert!((b.value - 2.5 * a.value).abs() <= 1e-12 * b.value);
    assert!(b.value >= a.value);
}

#[test]
fn vanishing_input_gives_exact_zero() {
    let g = Graph::cycle(4);
    let c = [0.0, 0.0];
    let fs = [field(c, 1.0), field(c, 0.0), field(c, 1.0), field(c, 1.0)];
    let est = leray_mc_form(&g, &as_dyn(&fs), 0.05, 10_000, 0).unwrap();
    assert_eq!((est.value, est.std_error), (0.0, 0.0));

    let empty = FnField {
        f: |_: [f64; 2]| 1.0,
        bounds: None,
    };
    let fs: [&dyn TestFunction; 2] = [&empty, &empty];
    let est = leray_mc_form(&Graph::path(2), &fs, 0.05, 10_000, 0).unwrap();
    assert_eq!(est.value, 0.0);
}

#[test]
fn far_apart_supports_are_reported_or_zero() {
    let g = Graph::path(2);
    let fs = [field([0.0, 0.0], 1.0), field([5.0, 0.0], 1.0)];
    match leray_mc_form(&g, &as_dyn(&fs), 0.05, 10_000, 0) {
        Ok(e) => assert_eq!(e.value, 0.0),
        Err(e) => assert!(matches!(e, LerayError::ZeroAcceptance { .. })),
    }
}

#[test]
fn seeds_reproduce_bit_for_bit() {
    let g = Graph::complete(3);
    let fs: Vec<_> = centers().iter().map(|&c| field(c, 1.0)).collect();
    let a = leray_mc_form(&g, &as_dyn(&fs), 1.0 / 16.0, 20_000, 9).unwrap();
    let b = leray_mc_form(&g, &as_dyn(&fs), 1.0 / 16.0, 20_000, 9).unwrap();
    assert_eq!(a, b);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let c = pool.install(|| leray_mc_form(&g, &as_dyn(&fs), 1.0 / 16.0, 20_000, 9).unwrap());
    assert_eq!(a, c);
}
