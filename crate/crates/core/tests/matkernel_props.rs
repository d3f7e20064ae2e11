use obsassign::matkernel::{eig_sym2, gram, numerical_rank, singular_values, Sym2, TallMatrix, Vec2};
use proptest::prelude::*;

fn coord() -> impl Strategy<Value = f64> {
    -100.0f64..100.0
}

fn tall(max_rows: usize) -> impl Strategy<Value = TallMatrix> {
    prop::collection::vec((coord(), coord()).prop_map(|(x, y)| Vec2::new(x, y)), 1..=max_rows).prop_map(TallMatrix::new)
}

/// Largest singular value of an N×2 matrix by power iteration on MᵀM,
/// with entries accumulated straight from the rows.
fn power_sigma_max(m: &TallMatrix) -> f64 {
    let apply = |v: [f64; 2]| {
        let mut out = [0.0; 2];
        for r in m.rows() {
            let d = r.x * v[0] + r.y * v[1];
            out[0] += r.x * d;
            out[1] += r.y * d;
        }
        out
    };
    let mut v = [0.8, 0.6];
    let mut lambda = 0.0;
    for _ in 0..5000 {
        let w = apply(v);
        let n = w[0].hypot(w[1]);
        if n == 0.0 {
            return 0.0;
        }
        let next = [w[0] / n, w[1] / n];
        lambda = n;
        if (next[0] - v[0]).abs() + (next[1] - v[1]).abs() < 1e-15 {
            break;
        }
        v = next;
    }
    lambda.sqrt()
}

/// Smallest singular value as the minimum of ‖M v‖ over unit `v`, found by a
/// grid over the angle refined with golden-section search.
fn search_sigma_min(m: &TallMatrix) -> f64 {
    let f = |theta: f64| {
        let (s, c) = theta.sin_cos();
        m.rows().iter().map(|r| (r.x * c + r.y * s).powi(2)).sum::<f64>()
    };
    let grid = 720;
    let (mut best, mut best_t) = (f64::INFINITY, 0.0);
    for k in 0..grid {
        let t = std::f64::consts::PI * k as f64 / grid as f64;
        let v = f(t);
        if v < best {
            best = v;
            best_t = t;
        }
    }
    let step = std::f64::consts::PI / grid as f64;
    let (mut a, mut b) = (best_t - step, best_t + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b)).max(0.0).sqrt()
}

proptest! {
    #[test]
    fn eig_roots_satisfy_characteristic_polynomial(rows in tall(6)) {
        let g = gram(&rows);
        let (lo, hi) = eig_sym2(g);
        prop_assert!(lo <= hi);
        let scale = g.trace().powi(2).max(1e-300);
        for l in [lo, hi] {
            let residual = l * l - g.trace() * l + g.det();
            prop_assert!(residual.abs() <= 1e-10 * scale, "residual {residual} scale {scale}");
        }
    }

    #[test]
    fn gram_trace_is_sum_of_squared_row_norms(rows in tall(8)) {
        let expected: f64 = rows.rows().iter().map(|r| r.x * r.x + r.y * r.y).sum();
        prop_assert!((gram(&rows).trace() - expected).abs() <= 1e-12 * expected.max(1.0));
    }

    #[test]
    fn singular_values_match_iterative_oracle(rows in tall(6)) {
        let (smin, smax) = singular_values(&rows);
        let pmax = power_sigma_max(&rows);
        prop_assert!((smax - pmax).abs() <= 1e-8 * pmax.max(1e-12), "{smax} vs {pmax}");
        let pmin = search_sigma_min(&rows);
        prop_assert!((smin - pmin).abs() <= 1e-8 * pmax.max(1e-12), "{smin} vs {pmin}");
    }

    #[test]
    fn extra_row_never_lowers_eigenvalues(rows in tall(6), x in coord(), y in coord()) {
        let (lo, hi) = eig_sym2(gram(&rows));
        let mut more = rows.clone();
        more.push(Vec2::new(x, y));
        let (lo2, hi2) = eig_sym2(gram(&more));
        let tol = 1e-10 * hi2.max(1.0);
        prop_assert!(lo2 >= lo - tol, "{lo2} < {lo}");
        prop_assert!(hi2 >= hi - tol, "{hi2} < {hi}");
    }

    #[test]
    fn rank_of_gram_matches_geometry(x in coord(), y in coord(), k in -5.0f64..5.0) {
        prop_assume!(x.abs() > 1e-3 || y.abs() > 1e-3);
        prop_assume!(k.abs() > 1e-3);
        let one = gram(&TallMatrix::new(vec![Vec2::new(x, y)]));
        prop_assert_eq!(numerical_rank(one, 1e-9), 1);
        let collinear = gram(&TallMatrix::new(vec![Vec2::new(x, y), Vec2::new(k * x, k * y)]));
        prop_assert_eq!(numerical_rank(collinear, 1e-9), 1);
        let orth = gram(&TallMatrix::new(vec![Vec2::new(x, y), Vec2::new(-y, x)]));
        prop_assert_eq!(numerical_rank(orth, 1e-9), 2);
    }
}

#[test]
fn zero_matrix_has_rank_zero() {
    assert_eq!(numerical_rank(Sym2::ZERO, 1e-9), 0);
    assert_eq!(singular_values(&TallMatrix::new(vec![Vec2::ZERO])), (0.0, 0.0));
}
