use anyhow::Result;
use nalgebra::DMatrix;
use qbh::amplification::{
    amplification_phase_scan, closed_form_theta0, heatmap_csv, nambu_to_quadrature, scan_csv, susceptibility, Quadrature,
    Sector,
};
use qbh::matrix::max_abs;
use qbh::model::{
    bloch_nssh1, bloch_nssh2, energy_nssh1, quadrature_dynamical, realspace_dynamical, BlochVector,
};
use qbh::quench::oracle::{loschmidt_biorthogonal, loschmidt_oracle, mode_coefficients};
use qbh::quench::{
    critical_csv, critical_set, dtop, dtop_csv, loschmidt_gk, pgp_field, pgp_grid_csv, quench_mode, return_rate,
    return_rate_csv, PgpField,
};
use qbh::scalar::{cre, fmt_sci, modulus};
use qbh::spectral::{block_diagonalize_imag, block_diagonalize_real, spectrum_sweep};
use qbh::topology::{
    classify_phase_imag, delta0, parametric_energy_loops, phase_diagram, phase_diagram_csv, winding_pair,
    Nssh1Family, Nssh2Family, PhaseKind,
};
use qbh::{Boundary, BzGrid, Closure, CouplingSet64, QuenchProtocol64, Regime};

use crate::config::{Command, RunConfig};
use crate::output::{Table, Tolerance};

/// Files and observed residuals of one command.
pub struct Outcome {
    pub tables: Vec<Table>,
    pub tolerances: Vec<Tolerance>,
}

pub fn run(c: &RunConfig) -> Result<Outcome> {
    match c.command {
        Command::Spectrum => spectrum(c),
        Command::Winding => winding(c),
        Command::PhaseDiagram => phase(c),
        Command::Quench => quench(c),
        Command::Amplify => amplify(c),
        Command::Check => check(),
    }
}

fn header(meta: &[(String, String)], body: String) -> String {
    let mut out: String = meta.iter().map(|(k, v)| format!("# {k}={v}\n")).collect();
    out.push_str(&body);
    out
}

fn point_meta(c: &RunConfig) -> Vec<(String, String)> {
    vec![
        ("J".into(), fmt_sci(c.point.j())),
        ("theta".into(), fmt_sci(c.point.theta())),
        ("regime".into(), c.regime.name().into()),
    ]
}

fn spectrum(c: &RunConfig) -> Result<Outcome> {
    let deltas = c.deltas.points();
    let b = if c.open_boundary { Boundary::open(c.cells)? } else { Boundary::Periodic(BzGrid::uniform(c.nk)?) };
    let s = spectrum_sweep(c.point.j(), c.point.theta(), &deltas, c.regime, &b)?;
    let (gaps, real) = (s.min_abs(), s.reality_residuals());
    let mut body = String::from("delta,min_abs_lambda,reality_residual\n");
    for ((d, g), r) in deltas.iter().zip(&gaps).zip(&real) {
        body.push_str(&format!("{},{},{}\n", fmt_sci(*d), fmt_sci(*g), fmt_sci(*r)));
    }
    let (imin, gmin) = gaps.iter().enumerate().fold((0, f64::INFINITY), |a, (i, &g)| if g < a.1 { (i, g) } else { a });
    let mut tol = vec![
        Tolerance::info("argmin_gap_delta", deltas[imin]),
        Tolerance::info("min_gap", gmin),
        Tolerance::info("max_reality_residual", real.iter().copied().fold(0.0, f64::max)),
    ];
    if c.regime == Regime::Imaginary {
        tol.push(Tolerance::info("delta0", delta0(c.point.theta())));
    }
    Ok(Outcome { tables: vec![Table::new("spectrum", s.to_csv()), Table::new("gap", header(&s.metadata(), body))], tolerances: tol })
}

fn bloch(c: &CouplingSet64, regime: Regime, k: f64) -> BlochVector<f64> {
    match regime {
        Regime::Real => bloch_nssh2(k, c),
        Regime::Imaginary => bloch_nssh1(k, c),
    }
}

fn winding(c: &RunConfig) -> Result<Outcome> {
    let grid = BzGrid::uniform(c.winding_nk)?;
    let deltas = c.deltas.points();
    let rows = phase_diagram(c.point.j(), &deltas, &[c.point.theta()], c.regime, &grid)?;
    let mut meta = point_meta(c);
    meta.push(("nk".into(), grid.len().to_string()));
    let table = Table::new("winding", header(&meta, phase_diagram_csv(&rows)));

    // parametric loop data at the configured point
    let p = &c.point;
    let energies: Vec<(qbh::Cx<f64>, qbh::Cx<f64>)> = match c.regime {
        Regime::Real => {
            let l = parametric_energy_loops(p, &grid);
            meta.push(("loops_merged".into(), l.merged.to_string()));
            l.plus.into_iter().zip(l.minus).collect()
        }
        Regime::Imaginary => grid.points().iter().map(|&k| (energy_nssh1(k, p), -energy_nssh1(k, p))).collect(),
    };
    meta.push(("delta".into(), fmt_sci(p.delta())));
    let mut body = String::from("k,dr_x,dr_y,di_x,di_y,re_e_plus,im_e_plus,re_e_minus,im_e_minus\n");
    for (&k, (ep, em)) in grid.points().iter().zip(&energies) {
        let d = bloch(p, c.regime, k);
        let cols = [k, d.dr[0], d.dr[1], d.di[0], d.di[1], ep.re, ep.im, em.re, em.im];
        body.push_str(&cols.map(fmt_sci).join(","));
        body.push('\n');
    }
    let w = match c.regime {
        Regime::Real => winding_pair(&Nssh2Family(*p), &grid)?,
        Regime::Imaginary => winding_pair(&Nssh1Family(*p), &grid)?,
    };
    let tolerances = vec![
        Tolerance::info("nu1", w.nu1),
        Tolerance::info("nu2", w.nu2),
        Tolerance::info("nu", w.nu),
        Tolerance::info("imag_residual", w.imag_residual),
        Tolerance::info("max_sweep_imag_residual", max_finite(rows.iter().map(|r| r.winding.imag_residual))),
    ];
    Ok(Outcome { tables: vec![table, Table::new("loops", header(&meta, body))], tolerances })
}

fn max_finite(xs: impl Iterator<Item = f64>) -> f64 {
    xs.filter(|x| x.is_finite()).fold(0.0, f64::max)
}

fn phase(c: &RunConfig) -> Result<Outcome> {
    let grid = BzGrid::uniform(c.winding_nk)?;
    let rows = phase_diagram(c.point.j(), &c.deltas.points(), &c.thetas.points(), c.regime, &grid)?;
    let meta = vec![
        ("J".into(), fmt_sci(c.point.j())),
        ("regime".into(), c.regime.name().into()),
        ("nk".into(), grid.len().to_string()),
    ];
    // ν against its label away from critical points
    let label_dev = max_finite(rows.iter().filter_map(|r| r.kind.nu().map(|nu| (r.winding.nu - nu).abs())));
    let critical = rows.iter().filter(|r| r.kind == PhaseKind::Critical).count();
    Ok(Outcome {
        tables: vec![Table::new("phase_diagram", header(&meta, phase_diagram_csv(&rows)))],
        tolerances: vec![
            Tolerance::info("max_nu_label_deviation", label_dev),
            Tolerance::info("max_imag_residual", max_finite(rows.iter().map(|r| r.winding.imag_residual))),
            Tolerance::info("critical_points", critical as f64),
        ],
    })
}

fn stride<T: Clone>(xs: &[T], s: usize) -> Vec<T> {
    xs.iter().step_by(s).cloned().collect()
}

fn quench(c: &RunConfig) -> Result<Outcome> {
    let q = &c.quench;
    let p = QuenchProtocol64::with_grids(q.initial, q.final_couplings, q.half_zone, q.time_samples, q.t_max)?;
    let rr = return_rate(&p)?;
    let crit = critical_set(&p, 0..=q.n_max)?;
    let d = dtop(&p)?;
    let f = pgp_field(&p)?;
    let (ks, kt) = (q.pgp_k_stride, q.pgp_t_stride);
    let pick = |i: usize, j: usize| (i * ks, j * kt);
    let (nk, nt) = (f.k.len().div_ceil(ks), f.t.len().div_ceil(kt));
    let coarse = PgpField {
        k: stride(&f.k, ks),
        t: stride(&f.t, kt),
        phi_pgp: DMatrix::from_fn(nk, nt, |i, j| f.phi_pgp[pick(i, j)]),
        phi_dyn: DMatrix::from_fn(nk, nt, |i, j| f.phi_dyn[pick(i, j)]),
        phi_total: DMatrix::from_fn(nk, nt, |i, j| f.phi_total[pick(i, j)]),
        holes: DMatrix::from_fn(nk, nt, |i, j| f.holes[pick(i, j)]),
    };
    let strides = vec![("pgp_k_stride".to_string(), ks.to_string()), ("pgp_t_stride".to_string(), kt.to_string())];

    let tcs = crit.times();
    let cusps = rr.cusp_times();
    let nearest = |t: f64| tcs.iter().map(|tc| (tc - t).abs()).fold(f64::INFINITY, f64::min);
    let edge = |s: &[f64]| s.iter().map(|x| (x - x.round()).abs()).fold(0.0, f64::max);
    let tolerances = vec![
        Tolerance::info("critical_times", tcs.len() as f64),
        Tolerance::info("return_rate_cusps", cusps.len() as f64),
        Tolerance::info("max_cusp_to_critical_time", max_finite(cusps.iter().map(|&t| nearest(t)))),
        Tolerance::info("time_step", p.t_step()),
        Tolerance::info("max_critical_residual", max_finite(crit.entries.iter().map(|e| e.residual.abs()))),
        Tolerance::info("max_abs_dtop_minus", d.dtop_minus.iter().map(|x| x.abs()).fold(0.0, f64::max)),
        Tolerance::info("max_dtop_plus_off_integer", edge(&d.dtop_plus)),
        Tolerance::info("max_dtop_minus_off_integer", edge(&d.dtop_minus)),
    ];
    Ok(Outcome {
        tables: vec![
            Table::new("return_rate", return_rate_csv(&p, &rr)),
            Table::new("dtop", dtop_csv(&p, &d)),
            Table::new("critical_times", critical_csv(&p, &crit)),
            Table::new("pgp_grid", header(&strides, pgp_grid_csv(&p, &coarse))),
        ],
        tolerances,
    })
}

fn amplify(c: &RunConfig) -> Result<Outcome> {
    let rep = susceptibility(&c.point, c.amplify_cells)?;
    let rows = amplification_phase_scan(c.point.j(), c.point.theta(), &c.deltas.points(), c.amplify_cells)?;
    // literal correspondence: every gain profile beyond unit end-to-end gain ⟺ ν = 1
    let mismatches = rows
        .iter()
        .filter(|r| {
            let topological = r.nu == Some(1.0);
            let amplified = r.profiles.iter().all(|p| p.end_to_end > 1.0);
            let damped = r.profiles.iter().all(|p| p.end_to_end <= 1.0);
            !(topological && amplified || !topological && damped)
        })
        .count();
    let meta = vec![
        ("J".into(), fmt_sci(c.point.j())),
        ("theta".into(), fmt_sci(c.point.theta())),
        ("cells".into(), c.amplify_cells.to_string()),
    ];
    Ok(Outcome {
        tables: vec![Table::new("chi_heatmap", heatmap_csv(&rep)), Table::new("amplification_scan", header(&meta, scan_csv(&rows)))],
        tolerances: vec![
            Tolerance::info("inverse_residual_x", rep.inverse_residual.0),
            Tolerance::info("inverse_residual_p", rep.inverse_residual.1),
            Tolerance::below("scaled_residual_x", rep.scaled_residual.0, 1e-15),
            Tolerance::below("scaled_residual_p", rep.scaled_residual.1, 1e-15),
            Tolerance::info("condition_x", rep.condition.0),
            Tolerance::info("condition_p", rep.condition.1),
            Tolerance::info("scan_topology_mismatches", mismatches as f64),
        ],
    })
}

fn cs(j: f64, d: f64, th: f64) -> CouplingSet64 {
    CouplingSet64::new(j, d, th).expect("fixed check parameters are valid")
}

/// Fixed-point invariant suite. Every entry carries a limit; a single failure
/// makes the run exit with the tolerance status.
fn check() -> Result<Outcome> {
    let ks: Vec<f64> = (0..13).map(|i| -3.0 + 0.5 * i as f64).collect();
    let params: Vec<CouplingSet64> = [-0.9, -0.5, -0.1, 0.3, 0.8]
        .iter()
        .flat_map(|&d| [0.0, 0.4, 1.0].map(|th| cs(1.0, d, th)))
        .collect();
    let mut tol = Vec::new();

    let mut real = 0.0f64;
    let mut imag = 0.0f64;
    for c in &params {
        for &k in &ks {
            real = real.max(block_diagonalize_real(k, c));
            imag = imag.max(block_diagonalize_imag(k, c));
        }
    }
    tol.push(Tolerance::below("block_equivalence_real", real, 1e-12));
    tol.push(Tolerance::below("block_equivalence_imaginary", imag, 1e-12));

    let grid = BzGrid::uniform(2001)?;
    let mut nu_dev = 0.0f64;
    for (d, want) in [(-0.9, 0.0), (-0.1, 0.5), (0.9, 1.0)] {
        nu_dev = nu_dev.max((winding_pair(&Nssh2Family(cs(1.0, d, 0.4)), &grid)?.nu - want).abs());
    }
    tol.push(Tolerance::below("winding_table_theta_0.4", nu_dev, 1e-6));
    let d0: f64 = delta0(0.4);
    tol.push(Tolerance::below("delta0_theta_0.4", (d0 + 0.1189).abs(), 1e-4));
    let mut imag_ok = delta0(0.0_f64) == 0.0;
    for d in [-0.9, -0.3, -0.05, 0.2, 0.9] {
        let kind = classify_phase_imag(&cs(1.0, d, 0.4), &grid)?.kind;
        imag_ok &= kind == if d > d0 { PhaseKind::NonTrivial } else { PhaseKind::Trivial };
    }
    tol.push(Tolerance::flag("imaginary_labels_follow_delta0", imag_ok));

    let quenches = [(cs(1.0, -0.9, 0.0), cs(1.0, 0.9, 0.4)), (cs(1.0, -0.9, 0.0), cs(1.0, -0.1, 0.4)), (cs(1.0, 0.3, 0.7), cs(0.8, -0.4, 0.2))];
    let mut three_way = 0.0f64;
    let mut norm = 0.0f64;
    for (ci, cf) in &quenches {
        for &k in &ks {
            let m = quench_mode(k, ci, cf)?;
            norm = norm.max(modulus(mode_coefficients(k, ci, cf)?.normalization() - cre(1.0)));
            if modulus(m.energy_initial) < 0.05 || modulus(m.energy_final) < 0.05 {
                continue;
            }
            for t in [0.0, 0.7, 2.3, 5.9] {
                let g = loschmidt_gk(k, ci, cf, t)?;
                let scale = 1.0 + g.norm();
                three_way = three_way.max((g - loschmidt_oracle(k, ci, cf, t)?).norm() / scale);
                three_way = three_way.max((g - loschmidt_biorthogonal(k, ci, cf, t)?).norm() / scale);
            }
        }
    }
    tol.push(Tolerance::below("loschmidt_three_way", three_way, 1e-9));
    tol.push(Tolerance::below("mode_normalization", norm, 1e-12));

    let c = cs(1.0, 0.3, 0.7);
    let n = 4;
    let m = nambu_to_quadrature(&realspace_dynamical(&c, n, Regime::Imaginary, Closure::Open)?)?;
    let q = quadrature_dynamical(&c, n, Closure::Open)?;
    let h = 4 * n;
    let data = m.data();
    let cross = max_abs(&data.view((0, h), (h, h)).into_owned()).max(max_abs(&data.view((h, 0), (h, h)).into_owned()));
    let diag = max_abs(&(data.view((0, 0), (h, h)).into_owned() - q.h_x.map(cre)))
        .max(max_abs(&(data.view((h, h), (h, h)).into_owned() - q.h_p.map(cre))));
    tol.push(Tolerance::below("quadrature_decoupling", cross.max(diag), 1e-12));

    let c0 = cs(1.5, 1.0 / 3.0, 0.0);
    let rep = susceptibility(&c0, 6)?;
    let (ac, bd) = closed_form_theta0(&c0, 6)?;
    let mut closed = 0.0f64;
    for qd in [Quadrature::X, Quadrature::P] {
        let scale = ac.amax();
        closed = closed.max((rep.sector(Sector::Ac, qd).map(f64::abs) - &ac).amax() / scale);
        closed = closed.max((rep.sector(Sector::Bd, qd).map(f64::abs) - &bd).amax() / scale);
    }
    tol.push(Tolerance::below("susceptibility_closed_form", closed, 1e-12));

    let obc = spectrum_sweep(1.0, 0.4, &[-0.5, 0.5], Regime::Real, &Boundary::open(20)?)?;
    tol.push(Tolerance::below("obc_reality", obc.reality_residuals().into_iter().fold(0.0, f64::max), 1e-6));

    let p = QuenchProtocol64::with_grids(quenches[0].0, quenches[0].1, 400, 800, 12.0)?;
    let rr = return_rate(&p)?;
    tol.push(Tolerance::flag("return_rate_zero_at_t0", rr.return_rate[0] == 0.0));
    let tcs = critical_set(&p, 0..=9)?.times();
    let cusps = rr.cusp_times();
    let near = |a: &[f64], t: f64| a.iter().map(|x| (x - t).abs()).fold(f64::INFINITY, f64::min);
    let dt = p.t_step();
    let span = |t: f64| t > 3.0 * dt && t < 12.0 - 3.0 * dt;
    let matched = tcs.iter().filter(|&&t| span(t)).all(|&t| near(&cusps, t) <= 1.5 * dt)
        && cusps.iter().all(|&t| near(&tcs, t) <= 1.5 * dt)
        && !tcs.is_empty();
    tol.push(Tolerance::flag("return_rate_cusps_at_critical_times", matched));

    Ok(Outcome { tables: vec![Table::new("check", check_table(&tol))], tolerances: tol })
}

fn check_table(tol: &[Tolerance]) -> String {
    let mut out = String::from("name,observed,limit,pass\n");
    for t in tol {
        let limit = t.limit.map_or("none".to_string(), fmt_sci);
        out.push_str(&format!("{},{},{limit},{}\n", t.name, fmt_sci(t.observed), t.pass));
    }
    out
}
