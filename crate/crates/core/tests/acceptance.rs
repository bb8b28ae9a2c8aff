//! End-to-end acceptance criteria. Each test prints one PASS/FAIL line
//! (written to the raw stdout handle so it survives output capture) and
//! then asserts.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qbh::amplification::{amplification_phase_scan, gain_metrics, susceptibility, Direction, Quadrature, Sector};
use qbh::model::{quadrature_dynamical, realspace_dynamical};
use qbh::quench::oracle::{loschmidt_biorthogonal, loschmidt_oracle, mode_coefficients};
use qbh::quench::{critical_set, dtop, loschmidt_gk, quench_mode, return_rate, QuenchProtocol, DEFAULT_N_RANGE};
use qbh::scalar::modulus;
use qbh::spectral::{
    block_diagonalize_imag, block_diagonalize_real, edge_fraction, ipr_localization, spectrum_sweep,
};
use qbh::topology::{delta0, moebius_lower_bound, winding_pair, Nssh2Family};
use qbh::{Boundary, BzGrid, Closure, CouplingSet64, Regime};

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "[criterion {id:>2}] {verdict} {name}: {detail}");
    let _ = out.flush();
}

fn cs(j: f64, d: f64, th: f64) -> CouplingSet64 {
    CouplingSet64::new(j, d, th).unwrap()
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn random_block_residual(imaginary: bool, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let k = rng.gen_range(-PI..PI);
        let c = cs(1.0, rng.gen_range(-0.95..0.95), rng.gen_range(0.0..1.0));
        let r = if imaginary { block_diagonalize_imag(k, &c) } else { block_diagonalize_real(k, &c) };
        worst = worst.max(r);
    }
    (worst, start.elapsed().as_secs_f64())
}

#[test]
fn criterion_01_block_equivalence_real() {
    let (worst, secs) = random_block_residual(false, 1);
    let pass = worst < 1e-12 && secs < 1.0;
    report(1, "block equivalence (real regime)", pass, &format!("max residual {worst:.2e}, {secs:.3} s"));
    assert!(pass);
}

#[test]
fn criterion_02_block_equivalence_imaginary() {
    let (worst, secs) = random_block_residual(true, 2);
    let pass = worst < 1e-12;
    report(2, "block equivalence (imaginary regime)", pass, &format!("max residual {worst:.2e}, {secs:.3} s"));
    assert!(pass);
}

#[test]
fn criterion_03_phase_table() {
    let grid = BzGrid::uniform(2001).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for &(d, want) in &[(-0.9, 0.0), (-0.1, 0.5), (0.9, 1.0)] {
        let w = winding_pair(&Nssh2Family(cs(1.0, d, 0.4)), &grid).unwrap();
        let ok = (w.nu - want).abs() < 1e-3 && w.imag_residual < 1e-6;
        pass &= ok;
        detail.push(format!("nu({d})={:.6} imag {:.1e}", w.nu, w.imag_residual));
    }
    report(3, "phase table at theta=0.4", pass, &detail.join(", "));
    assert!(pass);
}

#[test]
fn criterion_04_moebius_window() {
    let lo = moebius_lower_bound(0.4);
    let deltas = linspace(-1.0, 1.0, 41);
    let grid = BzGrid::uniform(400).unwrap();
    let sweep = spectrum_sweep(1.0, 0.4, &deltas, Regime::Real, &Boundary::Periodic(grid)).unwrap();
    let mut mismatches = Vec::new();
    let mut inside = 0;
    for (d, vals) in sweep.deltas.iter().zip(&sweep.values) {
        let has_imag = vals.iter().any(|z| z.re.abs() < 1e-9 && z.im.abs() > 1e-6);
        let expected = *d > lo && *d < 0.0;
        inside += usize::from(expected);
        if has_imag != expected {
            mismatches.push(format!("{d:+.2}"));
        }
    }
    let pass = mismatches.is_empty() && inside > 0;
    report(
        4,
        "Moebius window of purely imaginary eigenvalues",
        pass,
        &format!("window ({lo:.4}, 0), {inside} grid points inside, mismatches {mismatches:?}"),
    );
    assert!(pass);
}

#[test]
fn criterion_05_obc_reality_and_zero_modes() {
    let deltas = linspace(-0.9, 0.9, 19);
    let sweep = spectrum_sweep(1.0, 0.4, &deltas, Regime::Real, &Boundary::open(20).unwrap()).unwrap();
    let reality = sweep.reality_residuals().into_iter().fold(0.0f64, f64::max);
    let mins = sweep.min_abs();
    let mut bad = Vec::new();
    for (d, m) in deltas.iter().zip(&mins) {
        if *d > 0.0 && *m >= 1e-3 {
            bad.push(format!("no zero mode at {d:+.1} (min {m:.1e})"));
        }
        if *d < -0.3 && *m < 1e-3 {
            bad.push(format!("zero mode at {d:+.1} (min {m:.1e})"));
        }
    }
    let pass = reality < 1e-6 && bad.is_empty();
    report(5, "OBC reality and zero modes (N=20)", pass, &format!("max |Im|/max|lambda| {reality:.1e}; {bad:?}"));
    assert!(pass);
}

#[test]
fn criterion_06_imaginary_transition() {
    let d0 = delta0(0.4);
    let step = 0.01;
    let deltas = linspace(-0.9, 0.9, 181);
    let grid = BzGrid::uniform(800).unwrap();
    let sweep = spectrum_sweep(1.0, 0.4, &deltas, Regime::Imaginary, &Boundary::Periodic(grid)).unwrap();
    let mins = sweep.min_abs();
    let (imin, _) = mins.iter().enumerate().fold((0, f64::INFINITY), |a, (i, &m)| if m < a.1 { (i, m) } else { a });
    let at = deltas[imin];
    let exact_zero = delta0(0.0_f64) == 0.0;
    let pass = (at - d0).abs() <= step + 1e-12 && (d0 + 0.1189).abs() < 1e-4 && exact_zero;
    report(
        6,
        "imaginary-regime gap closing at delta0",
        pass,
        &format!("argmin gap at {at:+.3}, delta0 {d0:.6}, delta0(0)==0: {exact_zero}"),
    );
    assert!(pass);
}

#[test]
fn criterion_07_loschmidt_three_way() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut accepted = 0;
    let mut worst = 0.0f64;
    while accepted < 200 {
        let k = rng.gen_range(-PI..PI);
        let ci = cs(rng.gen_range(0.5..2.0), rng.gen_range(-0.95..0.95), rng.gen_range(0.0..1.0));
        let cf = cs(rng.gen_range(0.5..2.0), rng.gen_range(-0.95..0.95), rng.gen_range(0.0..1.0));
        let t = rng.gen_range(0.0..6.0);
        let m = quench_mode(k, &ci, &cf).unwrap();
        if modulus(m.energy_initial) < 0.05 || modulus(m.energy_final) < 0.05 {
            continue;
        }
        let g = loschmidt_gk(k, &ci, &cf, t).unwrap();
        let a = loschmidt_oracle(k, &ci, &cf, t).unwrap();
        let b = loschmidt_biorthogonal(k, &ci, &cf, t).unwrap();
        worst = worst.max((g - a).norm() / (1.0 + g.norm())).max((g - b).norm() / (1.0 + g.norm()));
        accepted += 1;
    }
    let mut norm_worst = 0.0f64;
    for _ in 0..100 {
        let k = rng.gen_range(-PI..PI);
        let ci = cs(1.0, rng.gen_range(-0.95..0.95), rng.gen_range(0.0..1.0));
        let cf = cs(1.0, rng.gen_range(-0.95..0.95), rng.gen_range(0.0..1.0));
        let m = mode_coefficients(k, &ci, &cf).unwrap();
        norm_worst = norm_worst.max((m.normalization() - 1.0).norm());
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst < 1e-9 && norm_worst < 1e-12 && secs < 5.0;
    report(
        7,
        "Loschmidt amplitude three-way agreement",
        pass,
        &format!("max deviation {worst:.1e}, normalization {norm_worst:.1e}, {secs:.2} s"),
    );
    assert!(pass);
}

/// Distinct half-integer plateau values between consecutive critical times.
/// Samples within one grid step of a critical time are excluded; a plateau
/// counts when all its samples sit within 0.02 of one half-integer.
fn plateaus(t: &[f64], series: &[f64], tcs: &[f64], step: f64) -> Vec<f64> {
    let mut edges = vec![f64::NEG_INFINITY];
    edges.extend_from_slice(tcs);
    edges.push(f64::INFINITY);
    let mut found: Vec<f64> = Vec::new();
    for w in edges.windows(2) {
        let vals: Vec<f64> = t
            .iter()
            .zip(series)
            .filter(|(ti, _)| **ti > w[0] + step && **ti < w[1] - step)
            .map(|(_, v)| *v)
            .collect();
        if vals.is_empty() {
            continue;
        }
        let target = (vals[0] * 2.0).round() / 2.0;
        if vals.iter().all(|v| (v - target).abs() < 0.02) && !found.iter().any(|f| (f - target).abs() < 1e-9) {
            found.push(target);
        }
    }
    found
}

fn cusps_match(cusps: &[f64], tcs: &[f64], step: f64) -> bool {
    let near = |x: f64, set: &[f64]| set.iter().any(|y| (x - y).abs() <= step + 1e-12);
    !tcs.is_empty() && cusps.iter().all(|&c| near(c, tcs)) && tcs.iter().all(|&t| near(t, cusps))
}

#[test]
fn criterion_08_chiral_dtop() {
    let start = Instant::now();
    let ci = cs(1.0, -0.9, 0.0);
    let mut pass = true;
    let mut detail = Vec::new();

    // Moebius final state
    let p = QuenchProtocol::with_defaults(ci, cs(1.0, -0.1, 0.4), 12.0).unwrap();
    let step = p.t_step();
    let crit = critical_set(&p, DEFAULT_N_RANGE).unwrap();
    let d = dtop(&p).unwrap();
    let rr = return_rate(&p).unwrap();
    let max_minus = d.dtop_minus.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let plus = plateaus(&d.t, &d.dtop_plus, &crit.times(), step);
    let cusp_ok = cusps_match(&rr.cusp_times(), &crit.times(), step);
    let ok_minus = max_minus < 0.02;
    pass &= ok_minus && plus.len() >= 2 && cusp_ok;
    detail.push(format!(
        "moebius: max|DTOP-|={max_minus:.4} ({}), DTOP+ plateaus {plus:?}, cusps match t_c: {cusp_ok}",
        if ok_minus { "ok" } else { "exceeds 0.02" }
    ));

    // non-trivial final state
    let p = QuenchProtocol::with_defaults(ci, cs(1.0, 0.9, 0.4), 12.0).unwrap();
    let crit = critical_set(&p, DEFAULT_N_RANGE).unwrap();
    let d = dtop(&p).unwrap();
    let rr = return_rate(&p).unwrap();
    let plus = plateaus(&d.t, &d.dtop_plus, &crit.times(), step);
    let minus = plateaus(&d.t, &d.dtop_minus, &crit.times(), step);
    let cusp_ok = cusps_match(&rr.cusp_times(), &crit.times(), step);
    pass &= plus.len() >= 2 && minus.len() >= 2 && cusp_ok;
    detail.push(format!("nontrivial: DTOP+ plateaus {plus:?}, DTOP- plateaus {minus:?}, cusps match t_c: {cusp_ok}"));

    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 60.0;
    detail.push(format!("{secs:.1} s"));
    report(8, "chiral DTOP and return-rate cusps", pass, &detail.join("; "));
    assert!(pass);
}

#[test]
fn criterion_09_quadrature_fixtures() {
    let c = cs(1.0, 0.3, 0.7);
    let (v, wr, wl) = (c.v(), c.w_r(), c.w_l());
    let (s, d) = ((wr + wl) / 2.0, (wl - wr) / 2.0);
    #[rustfmt::skip]
    let hx = DMatrix::from_row_slice(8, 8, &[
        0.0, v, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        -v, 0.0, 0.0, 0.0, -s, 0.0, d, 0.0,
        0.0, 0.0, 0.0, -v, 0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, v, 0.0, d, 0.0, s, 0.0,
        0.0, s, 0.0, d, 0.0, v, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0, -v, 0.0, 0.0, 0.0,
        0.0, d, 0.0, -s, 0.0, 0.0, 0.0, -v,
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0, v, 0.0,
    ]);
    #[rustfmt::skip]
    let hp = DMatrix::from_row_slice(8, 8, &[
        0.0, v, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        -v, 0.0, 0.0, 0.0, -s, 0.0, -d, 0.0,
        0.0, 0.0, 0.0, -v, 0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, v, 0.0, -d, 0.0, s, 0.0,
        0.0, s, 0.0, -d, 0.0, v, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0, -v, 0.0, 0.0, 0.0,
        0.0, -d, 0.0, -s, 0.0, 0.0, 0.0, -v,
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0, v, 0.0,
    ]);
    let q = quadrature_dynamical(&c, 2, Closure::Open).unwrap();
    let pass = q.h_x == hx && q.h_p == hp;
    report(
        9,
        "N=2 quadrature matrices equal the reference fixtures exactly",
        pass,
        &format!("h_x exact: {}, h_p exact: {}", q.h_x == hx, q.h_p == hp),
    );
    assert!(pass);
}

#[test]
fn criterion_10_amplification() {
    // v = 1, w = 2 at θ = 0: J = 1.5, δ = 1/3
    let c = cs(1.5, 1.0 / 3.0, 0.0);
    let (v, g0) = (c.v(), c.w_r() / c.v());
    let rep = susceptibility(&c, 4).unwrap();
    // reference 8×8 magnitudes: G₀^m on same-slot entries at block distance m
    let upper = DMatrix::from_fn(8, 8, |i, j| {
        if i % 2 == j % 2 && j >= i { g0.powi(((j - i) / 2) as i32) / v } else { 0.0 }
    });
    let lower = upper.transpose();
    let mut closed = 0.0f64;
    for q in [Quadrature::X, Quadrature::P] {
        closed = closed.max((rep.sector(Sector::Ac, q).map(f64::abs) - &upper).amax());
        closed = closed.max((rep.sector(Sector::Bd, q).map(f64::abs) - &lower).amax());
    }
    let dirs_ok = gain_metrics(&rep).iter().all(|p| match p.sector {
        Sector::Ac => p.direction == Direction::Leftward,
        Sector::Bd => p.direction == Direction::Rightward,
    });

    let d0 = delta0(0.4);
    let deltas = linspace(-0.9, 0.9, 50);
    let rows = amplification_phase_scan(1.0, 0.4, &deltas, 10).unwrap();
    let mut scan_bad = Vec::new();
    for r in &rows {
        if (r.delta - d0).abs() < 1e-3 {
            continue;
        }
        let topological = r.nu == Some(1.0);
        let amplified = r.profiles.iter().all(|p| p.end_to_end > 1.0);
        let damped = r.profiles.iter().all(|p| p.end_to_end <= 1.0);
        if (topological && !amplified) || (!topological && !damped) {
            scan_bad.push(format!("{:+.3}", r.delta));
        }
    }
    let pass = closed < 1e-10 && dirs_ok && scan_bad.is_empty();
    report(
        10,
        "amplification closed form, directions and topology link",
        pass,
        &format!("closed-form deviation {closed:.1e}, directions AC left/BD right: {dirs_ok}, scan mismatches {scan_bad:?}"),
    );
    assert!(pass);
}

#[test]
fn criterion_11_skin_effect() {
    let c = cs(1.0, 0.5, 0.4);
    let cells = 40;
    let g = realspace_dynamical(&c, cells, Regime::Real, Closure::Open).unwrap();
    let modes = ipr_localization(g.data()).unwrap();
    let real_frac = edge_fraction(&modes, cells, 0.2);

    let g = realspace_dynamical(&c, cells, Regime::Imaginary, Closure::Open).unwrap();
    let modes = ipr_localization(g.data()).unwrap();
    let bulk: Vec<_> = modes.into_iter().filter(|m| modulus(m.value) > 1e-3).collect();
    let imag_frac = edge_fraction(&bulk, cells, 0.2);

    let pass = real_frac >= 0.9 && imag_frac < 0.2;
    report(
        11,
        "skin effect in the real regime only",
        pass,
        &format!("real-regime edge fraction {real_frac:.3}, imaginary-regime bulk edge fraction {imag_frac:.3}"),
    );
    assert!(pass);
}
