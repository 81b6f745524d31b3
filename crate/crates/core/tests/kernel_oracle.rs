//! Kernel coefficients against a brute-force quadrature written
//! independently of the library: hand-rolled complex division and a
//! composite Simpson rule with ten times the default resolution.

use qbe_core::equilibrium::chemical_potential_for_density;
use qbe_core::kernels::QuadratureOptions;
use qbe_core::{Band, KernelEvaluator, PhononBath};

const KB: f64 = 8.617_333_262e-5;
const MASS: f64 = 0.5;

#[derive(Clone, Copy)]
enum Kind {
    A,
    B,
    E,
}

/// 1/(r + i·d) as (re, im).
fn inv(r: f64, d: f64) -> (f64, f64) {
    let den = r * r + d * d;
    (r / den, -d / den)
}

fn brute_force(kind: Kind, bath: (f64, f64, f64, f64), xi: f64, p: f64, t: f64) -> f64 {
    let (cs, qd, g2, delta) = bath;
    let n = 2560;
    let h = qd / n as f64;
    let mut acc_im = 0.0;
    for k in 0..=n {
        let q = k as f64 * h;
        let w = cs * q;
        let occ = if t > 0.0 { (-w / (KB * t)).exp() } else { 0.0 };
        let (_, em_i) = inv(xi - w, delta);
        let (_, ab_i) = inv(xi + w, delta);
        let im = match kind {
            // only imaginary parts survive Re[±i·Z]
            Kind::A => g2 * q * q * (occ * em_i + (occ + 1.0) * ab_i),
            Kind::B => g2 * q * q * ((occ + 1.0) * em_i + occ * ab_i),
            Kind::E => g2 * q * (em_i - ab_i),
        };
        let wgt = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
        acc_im += wgt * im;
    }
    let integral_im = acc_im * h / 3.0;
    // 2πi·(1/2π)∫ = i∫ ; Re[i·Z] = −Im Z
    let orient = if p > 0.0 { -1.0 } else if p < 0.0 { 1.0 } else { 0.0 };
    match kind {
        Kind::A => -integral_im * orient,
        Kind::B => integral_im * orient,
        Kind::E => integral_im,
    }
}

fn setup(t0: f64) -> (KernelEvaluator, Band, (f64, f64, f64, f64)) {
    let bath = PhononBath::default();
    let mu = chemical_potential_for_density(MASS, 0.03, t0).unwrap();
    let band = Band::new(MASS, mu).unwrap();
    let ev = KernelEvaluator::new(bath, band, QuadratureOptions::default()).unwrap();
    (ev, band, (bath.sound_speed(), bath.debye_cutoff(), bath.coupling_g2(), bath.delta()))
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn damping_at_fermi_momentum_300k() {
    let (ev, band, bath) = setup(300.0);
    let pf = band.fermi_momentum().unwrap();
    let got = ev.damping_coefficient_a(pf, 300.0).unwrap().value;
    let want = brute_force(Kind::A, bath, band.xi(pf), pf, 300.0);
    assert!(rel(got, want) < 1e-3, "{got} vs {want}");
}

#[test]
fn relaxation_at_fermi_momentum_250k() {
    let (ev, band, bath) = setup(250.0);
    let pf = band.fermi_momentum().unwrap();
    let got = ev.relaxation_coefficient_b(pf, 250.0).unwrap().value;
    let want = brute_force(Kind::B, bath, band.xi(pf), pf, 250.0);
    assert!(rel(got, want) < 1e-3, "{got} vs {want}");
}

#[test]
fn gain_at_half_phonon_band() {
    let (ev, _, bath) = setup(300.0);
    let xi = bath.0 * bath.1 / 2.0;
    let got = ev.gain_at_energy(xi, 0.2).unwrap().value;
    let want = brute_force(Kind::E, bath, xi, 0.2, 0.0);
    assert!(rel(got, want) < 1e-3, "{got} vs {want}");
}

#[test]
fn five_momenta_two_temperatures() {
    for t in [250.0, 300.0] {
        let (ev, band, bath) = setup(t);
        let pf = band.fermi_momentum().unwrap();
        for p in [-0.4, 0.5 * pf, pf, 2.0 * pf, 0.6] {
            let xi = band.xi(p);
            let a = ev.damping_coefficient_a(p, t).unwrap().value;
            let b = ev.relaxation_coefficient_b(p, t).unwrap().value;
            let e = ev.gain_coefficient_e(p).unwrap().value;
            assert!(rel(a, brute_force(Kind::A, bath, xi, p, t)) < 1e-3, "A p={p} T={t}");
            assert!(rel(b, brute_force(Kind::B, bath, xi, p, t)) < 1e-3, "B p={p} T={t}");
            let we = brute_force(Kind::E, bath, xi, p, t);
            // E vanishes on the Fermi surface; compare absolutely there
            assert!((e - we).abs() <= 1e-3 * we.abs() + 1e-15, "E p={p} T={t} {e} {we}");
        }
    }
}
