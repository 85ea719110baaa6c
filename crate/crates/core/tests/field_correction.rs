use std::f64::consts::PI;

use num_complex::Complex64;
use vortexfield_core::canonical::CanonicalMap;
use vortexfield_core::micromag::{picard_solve, v_external, ThetaSolver};
use vortexfield_core::oracle::{descent_minimize, DescentOptions};
use vortexfield_core::renorm::g_functional;
use vortexfield_core::{
    ConformalDomain, EnergyModel, ExternalField, GridSpec, PicardOptions, PolarField, VortexConfig,
};

fn grid() -> GridSpec {
    GridSpec::new(32, 64).unwrap()
}

fn pair(s1: f64, s2: f64) -> VortexConfig {
    VortexConfig::pair(s1, s2).unwrap()
}

fn field(h1: f64, h2: f64) -> ExternalField {
    ExternalField::new(h1, h2).unwrap()
}

fn v(a: &VortexConfig, h: &ExternalField) -> f64 {
    v_external(
        a,
        h,
        grid(),
        &PicardOptions {
            tol: 1e-12,
            max_iter: 50,
        },
    )
    .unwrap()
    .0
}

#[test]
fn picard_matches_descent_oracle() {
    let grid = GridSpec::new(16, 32).unwrap();
    let cases = [
        (pair(0.0, PI), field(0.0, 0.01)),
        (pair(0.3, 2.0), field(-0.05, 0.02)),
        (pair(1.0, 4.0), field(0.07, -0.07)),
    ];
    for (a, h) in cases {
        let (picard, report) = picard_solve(&a, &h, grid, 1e-12, 50).unwrap();
        assert!(report.converged);
        let (descent, dr) = descent_minimize(&a, &h, grid, &DescentOptions::default()).unwrap();
        assert!(dr.converged, "{dr:?}");
        assert!(picard.max_abs_diff(&descent) < 1e-6);
    }
}

#[test]
fn g_decreases_along_picard_iterates() {
    let a = pair(0.3, 2.6);
    for h in [field(-0.1, 0.0), field(0.05, 0.08), field(0.0, 0.01)] {
        let mut previous = f64::INFINITY;
        for n in 1..=6 {
            let (theta, _) = picard_solve(&a, &h, grid(), 1e-300, n).unwrap();
            let g = g_functional(&a, &theta, &h).unwrap();
            assert!(g <= previous + 1e-10, "n = {n}: {g} > {previous}");
            previous = g;
        }
    }
}

#[test]
fn minimizer_beats_zero_candidate() {
    let a = pair(0.0, PI);
    for h in [field(0.0, 0.01), field(-0.01, 0.0), field(0.2, -0.1)] {
        let zero = g_functional(&a, &PolarField::zeros(grid()), &h).unwrap();
        assert!(v(&a, &h) <= zero + 1e-12);
    }
}

#[test]
fn lipschitz_in_the_field() {
    let a = pair(0.5, 2.5);
    let hs: Vec<ExternalField> = [-0.1, 0.0, 0.1]
        .iter()
        .flat_map(|&x| [-0.1, 0.0, 0.1].map(|y| field(x, y)))
        .collect();
    let values: Vec<f64> = hs.iter().map(|h| v(&a, h)).collect();
    let lip = 1.1 * PI;
    for i in 0..hs.len() {
        for j in 0..hs.len() {
            let dh = (hs[i].vector() - hs[j].vector()).norm();
            assert!((values[i] - values[j]).abs() <= lip * dh + 1e-12);
        }
    }
}

#[test]
fn correction_is_concave_in_field_strength() {
    // V(εh) ≥ ε V(h) since V is a minimum of affine functions of h and V(0) = 0;
    // |V(εh)| ≤ ε |V(h)| follows whenever V(h) ≤ 0
    let a = pair(0.2, 3.5);
    for h in [field(0.1, 0.05), field(-0.01, 0.0), field(-0.08, 0.03)] {
        let full = v(&a, &h);
        for eps in [0.5, 0.25] {
            let part = v(&a, &h.scaled(eps).unwrap());
            assert!(part >= eps * full - 1e-12, "{part} {full}");
            if full <= 0.0 {
                assert!(part.abs() <= eps * full.abs() + 1e-8);
            }
        }
    }
}

#[test]
fn field_sign_symmetry_for_perpendicular_fields() {
    // for antipodal vortices on the real axis only the component along the axis breaks h ↦ -h
    let a = pair(0.0, PI);
    let up = v(&a, &field(0.0, 0.01));
    let down = v(&a, &field(0.0, -0.01));
    assert!((up - down).abs() < 1e-12, "{up} {down}");
    let left = v(&a, &field(-0.01, 0.0));
    let right = v(&a, &field(0.01, 0.0));
    assert!(left < right);
}

#[test]
fn swapping_labels_flips_the_field() {
    let model = |h: ExternalField| EnergyModel::new(ConformalDomain::disk(), h, grid()).unwrap();
    let (s1, s2) = (0.4, 2.9);
    let h = field(0.03, -0.02);
    let forward = model(h).energy_at([s1, s2]).unwrap().total;
    let swapped = model(field(-0.03, 0.02)).energy_at([s2, s1]).unwrap().total;
    assert!((forward - swapped).abs() < 1e-12);
    let zero = model(ExternalField::zero());
    assert_eq!(
        zero.energy_at([s1, s2]).unwrap().total,
        zero.energy_at([s2, s1]).unwrap().total
    );
}

fn bump(center: Complex64, width: f64) -> impl Fn(f64, f64) -> f64 {
    move |r, t| {
        let x = Complex64::from_polar(r, t);
        (1.0 - r * r) * (-(x - center).norm_sqr() / (width * width)).exp()
    }
}

#[test]
fn fixed_point_minimizes_g_against_bumps() {
    let a = pair(0.3, 3.3);
    let h = field(-0.05, 0.03);
    let (theta, _) = picard_solve(&a, &h, grid(), 1e-13, 50).unwrap();
    let g_star = g_functional(&a, &theta, &h).unwrap();
    let bumps = [
        bump(Complex64::new(0.0, 0.0), 0.5),
        bump(Complex64::new(0.5, 0.2), 0.2),
        bump(Complex64::new(-0.3, -0.6), 0.3),
    ];
    for b in &bumps {
        let b = PolarField::from_fn(grid(), b);
        for eps in [-0.3, -0.1, 0.1, 0.3] {
            let values = theta
                .values()
                .iter()
                .zip(b.values())
                .map(|(t, b)| t + eps * b)
                .collect();
            let perturbed = PolarField::from_values(grid(), values).unwrap();
            let g = g_functional(&a, &perturbed, &h).unwrap();
            assert!(g - g_star >= -1e-10, "{eps}: {}", g - g_star);
        }
    }
}

#[test]
fn solver_reuse_matches_one_shot() {
    let a = pair(1.0, 5.0);
    let h = field(0.02, 0.02);
    let solver = ThetaSolver::new(grid());
    let (t1, _) = solver.solve(&a, &h, &PicardOptions::default()).unwrap();
    let (t2, _) = picard_solve(&a, &h, grid(), 1e-9, 50).unwrap();
    assert_eq!(t1.values(), t2.values());
    let m = CanonicalMap::new(&a).unwrap().sample_on_grid(&grid());
    assert!(m.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
}
