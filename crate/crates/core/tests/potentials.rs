mod common;

use common::*;
use qbe_core::equilibrium::fermi_dirac;
use qbe_core::grid::{Field2, Field3};
use qbe_core::potentials::{scalar_potential, steady_state_scalar, vector_potential};
use qbe_core::units::UnitSystem;
use qbe_core::{ModelParameters, Prepared, ThermalPotentials};

fn max_rel_diff(a: &Field2, b: &Field2) -> f64 {
    let scale = b.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.data().iter().zip(b.data()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

fn default_potentials() -> (Prepared, ThermalPotentials, Field3) {
    let prep = default_prepared(300.0);
    let run = prep.solve().unwrap();
    (prep, run.potentials, run.f)
}

#[test]
fn gauge_invariance_with_analytic_derivatives() {
    let (prep, pot, _) = default_potentials();
    let (x, t) = (prep.grid.x.values(), prep.grid.t.values());
    let base = pot.reconstruct_force();
    let c = 0.37;
    let cases: [(&dyn Fn(f64, f64) -> f64, &dyn Fn(f64, f64) -> f64); 3] = [
        (&|_, _| 0.0, &|_, _| c),
        (&|_, _| c, &|_, _| 0.0),
        (&|_, t| t, &|x, _| x),
    ];
    for (dx, dt) in cases {
        let moved = pot.gauge_transform_analytic(x, t, dx, dt).unwrap();
        assert!(max_rel_diff(&moved.reconstruct_force(), &base) < 1e-10);
    }
}

#[test]
fn gauge_examples() {
    let (prep, pot, _) = default_potentials();
    let (nx, nt) = (prep.grid.x.len(), prep.grid.t.len());
    let (x, t) = (prep.grid.x.values(), prep.grid.t.values());

    let constant = pot.gauge_transform(&Field2::from_fn(nx, nt, |_, _| 4.2)).unwrap();
    for (u, v) in constant.phi().data().iter().zip(pot.phi().data()) {
        assert!((u - v).abs() < 1e-12);
    }
    for (u, v) in constant.a_vec().data().iter().zip(pot.a_vec().data()) {
        assert!((u - v).abs() < 1e-12);
    }

    let c = 0.5;
    let shifted = pot.gauge_transform(&Field2::from_fn(nx, nt, |_, k| c * t[k])).unwrap();
    for j in 0..nx {
        for k in 0..nt {
            assert!((shifted.phi().get(j, k) - (pot.phi().get(j, k) - c)).abs() < 1e-12);
            assert!((shifted.a_vec().get(j, k) - pot.a_vec().get(j, k)).abs() < 1e-12);
        }
    }

    let mixed = pot.gauge_transform(&Field2::from_fn(nx, nt, |j, k| x[j] * t[k])).unwrap();
    for j in 0..nx {
        for k in 0..nt {
            assert!((mixed.phi().get(j, k) - (pot.phi().get(j, k) - x[j])).abs() < 1e-10);
            assert!((mixed.a_vec().get(j, k) - (pot.a_vec().get(j, k) + t[k])).abs() < 1e-10);
        }
    }
    assert!(max_rel_diff(&mixed.reconstruct_force(), &pot.reconstruct_force()) < 1e-10);
}

#[test]
fn sampled_gauge_is_exact_to_rounding() {
    // the x and t difference operators act on separate axes and commute
    let err = |n_x: usize, n_t: usize| {
        let prep = Prepared::new(ModelParameters { n_x, n_t, ..Default::default() }).unwrap();
        let pot = prep.solve().unwrap().potentials;
        let (x, t) = (prep.grid.x.values(), prep.grid.t.values());
        let chi = Field2::from_fn(n_x, n_t, |j, k| 1e-3 * (2.0 * x[j]).sin() * (0.03 * t[k]).cos());
        max_rel_diff(&pot.gauge_transform(&chi).unwrap().reconstruct_force(), &pot.reconstruct_force())
    };
    assert!(err(41, 21) < 1e-10);
    assert!(err(81, 41) < 1e-10);
}

#[test]
fn split_reconstructs_damping_force() {
    let err = |n_x: usize, n_t: usize| {
        let prep = Prepared::new(ModelParameters { n_x, n_t, ..Default::default() }).unwrap();
        let run = prep.solve().unwrap();
        let ip = run.solution.refs.p_index;
        let want = Field2::from_fn(n_x, n_t, |j, k| prep.kernels.a(ip, j) * run.hole.get(ip, j, k));
        max_rel_diff(&run.potentials.reconstruct_force(), &want)
    };
    let default = err(81, 41);
    let refined = err(161, 81);
    assert!(default < 1e-3, "{default}");
    assert!(default / refined > 3.5, "{default} {refined}");
}

#[test]
fn scalar_potential_matches_fine_grid() {
    let (prep, pot, _) = default_potentials();
    let ip = prep.refs.p_index;
    let pr = prep.grid.p.values()[ip];
    let n_fine = 10 * (prep.grid.x.len() - 1) + 1;
    let h = prep.params.length / (n_fine - 1) as f64;
    let g: Vec<f64> = (0..n_fine)
        .map(|k| {
            let t = prep.profile.temperature_at(k as f64 * h).unwrap();
            let a = prep.evaluator.damping_coefficient_a(pr, t).unwrap().value;
            a * (1.0 - fermi_dirac(prep.band.xi(pr), UnitSystem::thermal_energy(t)))
        })
        .collect();
    let mut acc = 0.0;
    for k in 1..n_fine {
        acc += 0.5 * h * (g[k - 1] + g[k]);
        if k % 10 == 0 {
            let got = pot.phi().get(k / 10, 0);
            assert!(rel(got, acc) < 5e-4, "{got} {acc}");
        }
    }
}

#[test]
fn vector_potential_matches_closed_form() {
    let prep = default_prepared(300.0);
    let run = prep.solve().unwrap();
    let s = &run.solution;
    let (ip, jx) = (s.refs.p_index, s.refs.x_index);
    let a = prep.kernels.a(ip, jx);
    let f0 = prep.equilibrium.f0().get(ip, jx);
    let amp = s.norm * s.p_factor[ip] * s.x_factor[jx];
    let lam = s.lambda;
    for (k, &t) in prep.grid.t.values().iter().enumerate().skip(1) {
        let want = a * (f0 * t - amp * (1.0 - (-lam * t).exp()) / lam);
        let got = run.potentials.a_vec().get(jx, k);
        assert!(rel(got, want) < 5e-4, "t={t} {got} {want}");
    }
}

#[test]
fn equilibrium_has_no_vector_potential() {
    let prep = default_prepared(300.0);
    let (np, nx, nt) = prep.grid.shape();
    let f = Field3::from_fn(np, nx, nt, |i, j, _| prep.equilibrium.f0().get(i, j));
    let a = vector_potential(&prep.grid, &prep.kernels, &prep.equilibrium, &f, prep.refs.p_index);
    assert!(a.data().iter().all(|&v| v == 0.0));
}

#[test]
fn zero_kernels_give_zero_potentials() {
    let b = bare(101, 21, 5, 1.2, 2.0, 1.0);
    let phi = scalar_potential(&b.grid, &b.kernels, &b.equilibrium, 60);
    assert!(phi.iter().all(|&v| v == 0.0));
}

#[test]
fn uniform_temperature_gives_linear_scalar_potential() {
    let prep = Prepared::new(ModelParameters { gradient: 0.0, ..Default::default() }).unwrap();
    let ip = prep.refs.p_index;
    let slope = prep.kernels.a(ip, 0) * (1.0 - prep.equilibrium.f0().get(ip, 0));
    let phi = scalar_potential(&prep.grid, &prep.kernels, &prep.equilibrium, ip);
    for (j, &x) in prep.grid.x.values().iter().enumerate() {
        assert!((phi[j] - slope * x).abs() <= 1e-12 * (slope * x).abs() + 1e-18);
    }
}

#[test]
fn gradient_bends_scalar_potential() {
    let prep = default_prepared(300.0);
    let ip = prep.refs.p_index;
    let phi = scalar_potential(&prep.grid, &prep.kernels, &prep.equilibrium, ip);
    let h = prep.grid.x.step();
    let n = phi.len();
    let first = (phi[1] - phi[0]) / h;
    let last = (phi[n - 1] - phi[n - 2]) / h;
    assert!(rel(last, first) > 1e-3, "{first} {last}");
}

#[test]
fn steady_state_scalar_examples() {
    let (prep, _, f) = default_potentials();
    let ip = prep.refs.p_index;
    let nx = prep.grid.x.len();
    let zero = steady_state_scalar(&prep.grid, &prep.kernels, &vec![0.0; nx], ip);
    assert!(zero.iter().all(|&v| v == 0.0));

    let b = bare(11, 21, 3, 1.2, 2.0, 1.0);
    let a_const = qbe_core::kernels::KernelSet::from_fields(
        Field2::from_fn(11, 21, |_, _| -0.002),
        Field2::zeros(11, 21),
        vec![0.0; 11],
        vec![0.0; 11],
        Field2::zeros(11, 21),
        false,
    )
    .unwrap();
    let ones = steady_state_scalar(&b.grid, &a_const, &[1.0; 21], 7);
    for (j, &x) in b.grid.x.values().iter().enumerate() {
        assert!((ones[j] + 0.002 * x).abs() < 1e-15);
    }

    // φ_ss of the t = 0 hole slice = φ + ∫ A f₁′ dx
    let hole: Vec<f64> = (0..nx).map(|j| 1.0 - f.get(ip, j, 0)).collect();
    let ss = steady_state_scalar(&prep.grid, &prep.kernels, &hole, ip);
    let phi = scalar_potential(&prep.grid, &prep.kernels, &prep.equilibrium, ip);
    let dev: Vec<f64> = (0..nx).map(|j| prep.kernels.a(ip, j) * (prep.equilibrium.f0().get(ip, j) - f.get(ip, j, 0))).collect();
    let corr = qbe_core::quadrature::cumulative_trapezoid(&dev, prep.grid.x.step());
    for j in 0..nx {
        assert!((ss[j] - phi[j] - corr[j]).abs() <= 1e-12 * ss[j].abs().max(1e-12));
    }
}
