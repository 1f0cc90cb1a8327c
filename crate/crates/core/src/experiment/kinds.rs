use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{ExperimentConfig, FieldSource, Fixture, Kind, LawKind};
use super::report::Check;
use super::SITE_GUARD;
use crate::cif::{
    build_tree, cdf_scan_directions, cif_cdf_check, competition_interface, direction_summary, interface_chain,
    interface_transitions, separation_violations, write_interfaces_csv, InterfaceResult,
};
use crate::cocycle::{
    busemann_from_p2l, busemann_from_p2p, cesaro_busemann, check_monotonicity, cocycle_shape_check, direction_scan,
    dual_tilt, estimate_near_axis, estimate_point_to_line, estimate_shape, horizon_doubling, BusemannField, DualTilt,
};
use crate::coupling::{
    coalescence_experiment, junction_statistics, ordering_check, strip_busemann_law, CoalescenceStats, ConstantLaw,
    CoupledStepRule, CouplingField, StepLaw,
};
use crate::csv::{self, fmt_real};
use crate::env::rng::{replica_rng, replica_seed, stream};
use crate::env::{generate_field, Site, WeightField, WeightSampler, WeightSpec, Window, E1, E2, ORIGIN};
use crate::error::{Error, Result};
use crate::gibbs::{
    backward_transitions, dlr_consistency_check, ldp_rate_profile, level_mass_defects, rooted_mass_decay,
    TransitionField,
};
use crate::partition::{comparison_check, p2p_table, Beta, Mode};
use crate::stats::{two_sample_chi_square, MeanSe};

pub(crate) struct Outcome {
    pub checks: Vec<Check>,
    pub values: BTreeMap<String, f64>,
    pub artifacts: Vec<PathBuf>,
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    dir: &'a Path,
    out: Outcome,
}

impl Ctx<'_> {
    fn check(&mut self, c: Check) {
        self.out.checks.push(c);
    }

    fn value(&mut self, k: impl Into<String>, v: f64) {
        self.out.values.insert(k.into(), v);
    }

    fn artifact(&mut self, file: &str) -> PathBuf {
        let p = self.dir.join(file);
        self.out.artifacts.push(p.clone());
        p
    }

    fn spec(&self) -> WeightSpec {
        self.cfg.weights
    }

    fn beta(&self) -> Beta {
        self.cfg.beta
    }
}

/// The 2x2 hand grid `ω(0,0)=1, ω(1,0)=5, ω(0,1)=2, ω(1,1)=3`, padded with
/// zeros to a 4x4 window so that point-to-point fields can aim at `(3,3)`.
pub fn hand_fixture() -> WeightField {
    let w = Window::square(4);
    let vals = w
        .sites()
        .map(|s| match (s.u, s.v) {
            (0, 0) => 1.0,
            (1, 0) => 5.0,
            (0, 1) => 2.0,
            (1, 1) => 3.0,
            _ => 0.0,
        })
        .collect();
    WeightField::from_values(w, vals).expect("fixture is well formed")
}

fn guard(sites: u64, what: &str) -> Result<()> {
    if sites > SITE_GUARD {
        return Err(Error::Guard(format!(
            "{what} needs {sites} sites, more than the limit of {SITE_GUARD}"
        )));
    }
    Ok(())
}

fn square(side: i64, what: &str) -> Result<Window> {
    guard((side as u64).saturating_mul(side as u64), what)?;
    Ok(Window::square(side as usize))
}

fn need_finite(beta: Beta, kind: Kind) -> Result<()> {
    if beta.is_infinite() {
        return Err(Error::Config {
            field: "beta".into(),
            message: format!("kind `{kind}` needs a finite temperature"),
        });
    }
    Ok(())
}

pub(crate) fn execute(cfg: &ExperimentConfig, dir: &Path) -> Result<Outcome> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut ctx = Ctx {
        cfg,
        dir,
        out: Outcome {
            checks: Vec::new(),
            values: BTreeMap::new(),
            artifacts: Vec::new(),
        },
    };
    match cfg.kind {
        Kind::Shape => shape(&mut ctx)?,
        Kind::Busemann => busemann(&mut ctx)?,
        Kind::Monotonicity => monotonicity(&mut ctx)?,
        Kind::Cesaro => cesaro(&mut ctx)?,
        Kind::Dlr => dlr(&mut ctx)?,
        Kind::Ldp => ldp(&mut ctx)?,
        Kind::Decay => decay(&mut ctx)?,
        Kind::Coalescence => coalescence(&mut ctx)?,
        Kind::Junctions => junctions(&mut ctx)?,
        Kind::Interface => interface(&mut ctx)?,
        Kind::Cdf => cdf(&mut ctx)?,
        Kind::Scan => scan(&mut ctx)?,
    }
    Ok(ctx.out)
}

/// `c + H(t)/β` for constant weights.
fn flat_shape(c: f64, beta: Beta, t: f64) -> f64 {
    let h = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    if beta.is_infinite() {
        c
    } else {
        c + (h(t) + h(1.0 - t)) / beta.value()
    }
}

/// Tilt dual to direction `t`, from a three-point shape estimate at size `n`.
fn estimated_dual(ctx: &Ctx<'_>, t: f64, n: i64, dt: f64) -> Result<DualTilt> {
    let grid = [t - dt, t, t + dt];
    let shape = estimate_shape(
        ctx.spec(),
        ctx.beta(),
        &grid,
        &[n],
        50,
        replica_seed(ctx.cfg.seed, 0x7368),
    )?;
    dual_tilt(&shape, t)
}

fn shape(ctx: &mut Ctx<'_>) -> Result<()> {
    let cfg = ctx.cfg;
    let ts = if cfg.directions.is_empty() {
        vec![0.25, 0.5, 0.75]
    } else {
        cfg.directions.clone()
    };
    let ns = if cfg.levels.is_empty() {
        vec![1000]
    } else {
        cfg.levels.clone()
    };
    let reps = cfg.replicas.unwrap_or(20);
    for &n in &ns {
        guard((n as u64 + 1).pow(2), "levels")?;
    }
    let est = estimate_shape(ctx.spec(), ctx.beta(), &ts, &ns, reps, cfg.seed)?;
    est.write_csv(ctx.artifact("shape.csv"))?;
    for (i, &t) in est.t_grid.iter().enumerate() {
        ctx.value(format!("lambda({t})"), est.lambda_at(i).mean);
    }
    if let WeightSpec::Constant { c } = ctx.spec() {
        let worst = est
            .t_grid
            .iter()
            .enumerate()
            .map(|(i, &t)| (est.lambda_at(i).mean - flat_shape(c, ctx.beta(), t)).abs())
            .fold(0.0, f64::max);
        ctx.check(Check::at_most("entropy_reference", worst, 0.01));
    } else {
        if est
            .t_grid
            .iter()
            .any(|&t| est.t_grid.iter().any(|&s| s != t && (s - (1.0 - t)).abs() < 1e-9))
        {
            ctx.check(Check::at_most("symmetry_gap_se", est.symmetry_defect(), 2.0));
        }
        let cc = est.second_differences();
        if !cc.is_empty() {
            let worst = cc.iter().map(|&(_, d, se)| d / se).fold(f64::NEG_INFINITY, f64::max);
            ctx.check(Check::at_most("second_difference_se", worst, 2.0));
        }
    }
    if let Some(t) = cfg.direction {
        let d = dual_tilt(&est, t)?;
        ctx.value("dual_tilt_1", d.tilt[0]);
        ctx.value("dual_tilt_2", d.tilt[1]);
        ctx.value("dual_pl_residual", d.pl.mean);
    }
    if let Some(s) = cfg.near_axis {
        let scale = cfg.scale.unwrap_or(200.0);
        guard(
            ((scale / s).ceil() as u64 + 1) * ((scale + 1.0) as u64 + 1),
            "near_axis / scale",
        )?;
        let m = estimate_near_axis(ctx.spec(), ctx.beta(), s, scale, reps, replica_seed(cfg.seed, 0x6d61))?;
        let var = ctx.spec().variance();
        if var > 0.0 {
            let denom = 2.0 * (s * var).sqrt();
            ctx.check(Check::at_least(
                "near_axis_ratio_low",
                (m.mean - ctx.spec().mean()) / denom,
                0.8,
            ));
            ctx.check(Check::at_most(
                "near_axis_ratio_high",
                (m.mean - ctx.spec().mean()) / denom,
                1.2,
            ));
        }
        ctx.value("near_axis_lambda", m.mean);
        ctx.value("near_axis_se", m.se);
    }
    Ok(())
}

/// Rows `(u, v, b1, b2)` restricted to `w`.
fn write_field_csv(b: &BusemannField, w: Window, path: &Path) -> Result<()> {
    csv::write(
        path,
        &["u", "v", "b1", "b2"],
        w.sites()
            .filter(|s| b.window().contains(*s))
            .map(|s| vec![s.u.to_string(), s.v.to_string(), fmt_real(b.b1(s)), fmt_real(b.b2(s))]),
    )
}

fn busemann(ctx: &mut Ctx<'_>) -> Result<()> {
    let cfg = ctx.cfg;
    let size = cfg.size.unwrap_or(200);
    let tilt = cfg.tilt.unwrap_or([0.0, 0.0]);
    let src = cfg.provenance.unwrap_or(FieldSource::P2l);
    let reps = cfg.replicas.unwrap_or(1);
    let mut rec: f64 = 0.0;
    let mut clo: f64 = 0.0;
    let (mut decreasing, mut profiles, mut perturbed) = (0, vec![0.0; cfg.levels.len()], vec![0.0; cfg.levels.len()]);
    let m_hat = if cfg.levels.is_empty() {
        None
    } else {
        if src != FieldSource::P2l {
            return Err(Error::Config {
                field: "levels".into(),
                message: "the shape check needs point-to-line fields".into(),
            });
        }
        let h = cfg.horizon.unwrap_or(2 * size);
        let f = estimate_point_to_line(ctx.spec(), ctx.beta(), tilt, h, 50, replica_seed(cfg.seed, 0x706c))?;
        Some([f.mean - tilt[0], f.mean - tilt[1]])
    };
    let mut rows = Vec::new();
    for r in 0..reps as u64 {
        let seed = if reps == 1 { cfg.seed } else { replica_seed(cfg.seed, r) };
        let b = match src {
            FieldSource::P2l => {
                let h = cfg.horizon.unwrap_or(2 * size);
                let field = generate_field(ctx.spec(), seed, square(h.max(size) + 1, "horizon")?)?;
                let b = busemann_from_p2l(&field, ctx.beta(), tilt, h)?;
                rec = rec.max(b.recovery_residual(&field));
                b
            }
            FieldSource::P2p => {
                let h = cfg.horizon.unwrap_or(2 * size).max(size);
                let field = generate_field(ctx.spec(), seed, square(h + 1, "horizon")?)?;
                let b = busemann_from_p2p(&field, ctx.beta(), Site::new(h, h), square(size, "size")?)?;
                rec = rec.max(b.recovery_residual(&field));
                b
            }
        };
        clo = clo.max(b.closure_residual());
        if r == 0 {
            write_field_csv(&b, Window::square(size as usize), &ctx.artifact("busemann.csv"))?;
        }
        if let Some(m) = m_hat {
            let p = cocycle_shape_check(&b, m, &cfg.levels)?;
            let q = cocycle_shape_check(&b, [m[0] + 0.1, m[1]], &cfg.levels)?;
            if p.windows(2).all(|w| w[1].1 < w[0].1) {
                decreasing += 1;
            }
            for k in 0..p.len() {
                profiles[k] += p[k].1 / reps as f64;
                perturbed[k] += q[k].1 / reps as f64;
                rows.push(vec![
                    r.to_string(),
                    p[k].0.to_string(),
                    fmt_real(p[k].1),
                    fmt_real(q[k].1),
                ]);
            }
        }
    }
    ctx.check(Check::at_most("recovery_residual", rec, 1e-9));
    ctx.check(Check::at_most("closure_residual", clo, 1e-9));
    if let Some(m) = m_hat {
        csv::write(
            ctx.artifact("shape_check.csv"),
            &["replica", "n", "deviation", "perturbed"],
            rows,
        )?;
        ctx.value("m_hat_1", m[0]);
        ctx.value("m_hat_2", m[1]);
        ctx.check(Check::at_least(
            "decreasing_fraction",
            decreasing as f64 / reps as f64,
            0.9,
        ));
        let gap = profiles
            .iter()
            .zip(&perturbed)
            .map(|(a, b)| b - a)
            .fold(f64::INFINITY, f64::min);
        ctx.check(Check::at_least("negative_control_gap", gap, f64::MIN_POSITIVE));
    }
    Ok(())
}

fn monotonicity(ctx: &mut Ctx<'_>) -> Result<()> {
    let cfg = ctx.cfg;
    let size = cfg.size.unwrap_or(80);
    let lo = cfg.tilt.unwrap_or([0.0, 0.0]);
    let hi = cfg.tilt_hi.unwrap_or([lo[0] + 0.5, lo[1] - 0.5]);
    let reps = cfg.replicas.unwrap_or(10);
    let w = square(size + 1, "size")?;
    let results: Vec<_> = (0..reps as u64)
        .into_par_iter()
        .map(|r| -> Result<_> {
            let field = generate_field(ctx.spec(), replica_seed(cfg.seed, r), w)?;
            let a = busemann_from_p2l(&field, ctx.beta(), lo, size)?;
            let b = busemann_from_p2l(&field, ctx.beta(), hi, size)?;
            let m = check_monotonicity(&a, &b)?;
            let mut rng = replica_rng(cfg.seed, stream::SAMPLER, r);
            let mut cmp_bad = 0;
            let top = size.max(4);
            for _ in 0..50 {
                use rand::Rng;
                let x = Site::new(rng.random_range(0..top / 4), rng.random_range(0..top / 4));
                let base = x + E1 + E2;
                let v = Site::new(rng.random_range(base.u..top), rng.random_range(base.v..top));
                let u = Site::new(rng.random_range(v.u..=top), rng.random_range(base.v..=v.v));
                if !comparison_check(&field, x, u, v, ctx.beta())?.holds(1e-12) {
                    cmp_bad += 1;
                }
            }
            let order = match cfg.steps {
                Some(steps) if (steps as i64) < size => {
                    let (pa, pb) = (
                        TransitionField::from_busemann(&a, &field)?,
                        TransitionField::from_busemann(&b, &field)?,
                    );
                    let seeds: Vec<u64> = (0..100).map(|s| replica_seed(cfg.coupling_seed, r * 100 + s)).collect();
                    Some(ordering_check(&pa, &pb, &seeds, ORIGIN, steps)?)
                }
                Some(_) => {
                    return Err(Error::Config {
                        field: "steps".into(),
                        message: format!("must be below size = {size}"),
                    })
                }
                None => None,
            };
            Ok((m, cmp_bad, order))
        })
        .collect::<Result<_>>()?;
    let rows = results.iter().enumerate().map(|(r, (m, c, o))| {
        vec![
            r.to_string(),
            m.sites.to_string(),
            m.violations.to_string(),
            fmt_real(m.min_margin_e1),
            fmt_real(m.min_margin_e2),
            c.to_string(),
            o.map(|o| o.violations.to_string()).unwrap_or_default(),
        ]
    });
    csv::write(
        ctx.artifact("monotonicity.csv"),
        &[
            "replica",
            "sites",
            "violations",
            "min_margin_e1",
            "min_margin_e2",
            "comparison_violations",
            "ordering_violations",
        ],
        rows,
    )?;
    let v: usize = results.iter().map(|r| r.0.violations).sum();
    let c: usize = results.iter().map(|r| r.1).sum();
    ctx.check(Check::at_most("cocycle_violations", v as f64, 0.0));
    ctx.check(Check::at_most("comparison_violations", c as f64, 0.0));
    if cfg.steps.is_some() {
        let o: usize = results
            .iter()
            .filter_map(|r| r.2)
            .map(|o| o.violations + o.truncated)
            .sum();
        ctx.check(Check::at_most("ordering_violations", o as f64, 0.0));
    }
    Ok(())
}

fn cesaro(ctx: &mut Ctx<'_>) -> Result<()> {
    let cfg = ctx.cfg;
    need_finite(ctx.beta(), cfg.kind)?;
    let n = cfg.size.unwrap_or(400);
    guard((n as u64 + 9).pow(2), "size")?;
    let (tilt, pl) = match cfg.tilt {
        Some(h) => (h, None),
        None => {
            let d = estimated_dual(ctx, cfg.direction.unwrap_or(0.5), n, 0.1)?;
            ctx.value("pl_residual", d.pl.mean);
            (d.tilt, Some(d.pl.mean))
        }
    };
    let samples = cfg.replicas.unwrap_or(200);
    let (b, rep) = cesaro_busemann(
        ctx.spec(),
        Window::square(8),
        ctx.beta(),
        tilt,
        n,
        samples,
        cfg.seed,
        pl,
    )?;
    b.write_csv(ctx.artifact("cesaro.csv"))?;
    let z = rep.z_scores();
    for (i, (m, z)) in rep.mean.iter().zip(z).enumerate() {
        ctx.value(format!("mean_b{}", i + 1), m.mean);
        ctx.value(format!("se_b{}", i + 1), m.se);
        ctx.value(format!("target_b{}", i + 1), rep.target[i]);
        ctx.check(Check::at_most(format!("z_b{}", i + 1), z, 3.0));
    }
    Ok(())
}

fn dlr(ctx: &mut Ctx<'_>) -> Result<()> {
    let cfg = ctx.cfg;
    need_finite(ctx.beta(), cfg.kind)?;
    let mut rows = Vec::new();
    let (mut worst, mut mass): (f64, f64) = (0.0, 0.0);
    let tol = if cfg.fixture == Some(Fixture::Hand) {
        let field = hand_fixture();
        let b = busemann_from_p2p(&field, ctx.beta(), Site::new(3, 3), Window::square(3))?;
        let r = dlr_consistency_check(&b, &field, ORIGIN, 2)?;
        let m = level_mass_defects(&b, &field, ORIGIN, 2)?;
        worst = r.max_discrepancy;
        mass = m.iter().map(|x| x.1).fold(r.mass_defect, f64::max);
        rows.push(vec![
            "0".into(),
            r.paths.to_string(),
            fmt_real(r.max_discrepancy),
            fmt_real(mass),
        ]);
        1e-12
    } else {
        let steps = cfg.size.unwrap_or(10);
        if steps > crate::gibbs::DLR_MAX_STEPS {
            return Err(Error::Guard(format!(
                "{steps} levels exceed the enumeration limit of {}",
                crate::gibbs::DLR_MAX_STEPS
            )));
        }
        let tilt = cfg.tilt.unwrap_or([0.0, 0.0]);
        let reps = cfg.replicas.unwrap_or(20);
        let side = 3 * steps + 1;
        for r in 0..reps as u64 {
            let field = generate_field(ctx.spec(), replica_seed(cfg.seed, r), Window::square(side as usize))?;
            let b = busemann_from_p2l(&field, ctx.beta(), tilt, side - 1)?;
            let d = dlr_consistency_check(&b, &field, ORIGIN, steps)?;
            let m = level_mass_defects(&b, &field, ORIGIN, steps)?
                .iter()
                .map(|x| x.1)
                .fold(d.mass_defect, f64::max);
            worst = worst.max(d.max_discrepancy);
            mass = mass.max(m);
            rows.push(vec![
                r.to_string(),
                d.paths.to_string(),
                fmt_real(d.max_discrepancy),
                fmt_real(m),
            ]);
        }
        1e-10
    };
    csv::write(
        ctx.artifact("dlr.csv"),
        &["replica", "paths", "max_discrepancy", "mass_defect"],
        rows,
    )?;
    ctx.check(Check::at_most("max_discrepancy", worst, tol));
    ctx.check(Check::at_most("level_mass_defect", mass, 1e-8));
    Ok(())
}

fn ldp(ctx: &mut Ctx<'_>) -> Result<()> {
    let cfg = ctx.cfg;
    need_finite(ctx.beta(), cfg.kind)?;
    let n = cfg.size.unwrap_or(500);
    let t = cfg.direction.unwrap_or(0.5);
    let reps = cfg.replicas.unwrap_or(40);
    guard((2 * n as u64 + 2).pow(2), "size")?;
    let dt = 0.05;
    let shape = estimate_shape(
        ctx.spec(),
        ctx.beta(),
        &[t - dt, t, t + dt],
        &[n],
        50,
        replica_seed(cfg.seed, 0x7368),
    )?;
    let tilt = match cfg.tilt {
        Some(h) => h,
        None => dual_tilt(&shape, t)?.tilt,
    };
    ctx.value("tilt_1", tilt[0]);
    ctx.value("tilt_2", tilt[1]);
    let side = 2 * n as usize + 2;
    let profiles: Vec<_> = (0..reps as u64)
        .into_par_iter()
        .map(|r| -> Result<_> {
            let field = generate_field(ctx.spec(), replica_seed(cfg.seed, r), Window::square(side))?;
            let b = busemann_from_p2l(&field, ctx.beta(), tilt, 2 * n)?;
            ldp_rate_profile(&b, &field, ORIGIN, n, tilt, Some(&shape))
        })
        .collect::<Result<_>>()?;
    let identity = profiles.iter().map(|p| p.identity_residual).fold(0.0, f64::max);
    let curve: Vec<MeanSe> = (0..=n as usize)
        .map(|a| MeanSe::of(&profiles.iter().map(|p| p.rows[a].rate).collect::<Vec<_>>()))
        .collect();
    let first = &profiles[0];
    csv::write(
        ctx.artifact("ldp.csv"),
        &["t", "rate", "se", "predicted", "predicted_se"],
        curve.iter().zip(&first.rows).map(|(m, row)| {
            let (p, pse) = row.predicted.unwrap_or((f64::NAN, f64::NAN));
            vec![
                fmt_real(row.t),
                fmt_real(m.mean),
                fmt_real(m.se),
                fmt_real(p),
                fmt_real(pse),
            ]
        }),
    )?;
    let lowest = curve
        .iter()
        .map(|m| {
            if m.se > 0.0 {
                m.mean / m.se
            } else if m.mean >= 0.0 {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        })
        .fold(f64::INFINITY, f64::min);
    let a = (t * n as f64).round() as usize;
    let at = curve[a];
    ctx.value("rate_at_dual", at.mean);
    ctx.value("rate_at_dual_se", at.se);
    ctx.check(Check::at_most("identity_residual", identity, 1e-10));
    ctx.check(Check::at_least("min_rate_se", lowest, -2.0));
    ctx.check(Check::at_most("rate_at_dual_se_units", at.mean / at.se, 2.0));
    Ok(())
}

fn decay(ctx: &mut Ctx<'_>) -> Result<()> {
    let cfg = ctx.cfg;
    need_finite(ctx.beta(), cfg.kind)?;
    let levels = if cfg.levels.is_empty() {
        vec![8, 16, 32, 64]
    } else {
        cfg.levels.clone()
    };
    let k = *levels.iter().max().expect("non-empty");
    let tilt = cfg.tilt.unwrap_or([0.0, 0.0]);
    let reps = cfg.replicas.unwrap_or(10);
    let w = square(4 * k + 2, "levels")?;
    let x = Site::new(k, k);
    let profiles: Vec<Vec<(i64, f64)>> = (0..reps as u64)
        .into_par_iter()
        .map(|r| -> Result<_> {
            let field = generate_field(ctx.spec(), replica_seed(cfg.seed, r), w)?;
            let b = busemann_from_p2l(&field, ctx.beta(), tilt, 4 * k + 1)?;
            rooted_mass_decay(&TransitionField::from_busemann(&b, &field)?, x, &levels)
        })
        .collect::<Result<_>>()?;
    csv::write(
        ctx.artifact("decay.csv"),
        &["replica", "n", "max_hit"],
        profiles.iter().enumerate().flat_map(|(r, p)| {
            p.iter()
                .map(move |&(n, m)| vec![r.to_string(), n.to_string(), fmt_real(m)])
        }),
    )?;
    let strict = profiles
        .iter()
        .filter(|p| p.windows(2).all(|w| w[1].1 < w[0].1))
        .count();
    ctx.check(Check::at_least(
        "strictly_decreasing_fraction",
        strict as f64 / reps as f64,
        1.0,
    ));
    if matches!(ctx.spec(), WeightSpec::Constant { .. }) && tilt == [0.0, 0.0] {
        let gap = profiles
            .iter()
            .flatten()
            .map(|&(n, m)| (m - central_binomial(n)).abs())
            .fold(0.0, f64::max);
        ctx.check(Check::at_most("binomial_gap", gap, 1e-12));
    }
    Ok(())
}

/// `C(n, ⌊n/2⌋) / 2ⁿ`.
fn central_binomial(n: i64) -> f64 {
    let k = n / 2;
    let mut p = 1.0;
    for i in 0..k {
        p *= (n - i) as f64 / (k - i) as f64;
    }
    p / 2f64.powi(n as i32)
}

/// Survival of the lazy difference walk of two `p ≡ ½` walks started one apart.
fn lazy_survival(steps: usize) -> f64 {
    let mut p = vec![0.0; steps + 3];
    p[1] = 1.0;
    for _ in 0..steps {
        let mut q = vec![0.0; p.len()];
        for i in 1..p.len() - 1 {
            q[i] += 0.5 * p[i];
            q[i + 1] += 0.25 * p[i];
            q[i - 1] += 0.25 * p[i];
        }
        q[0] = 0.0;
        p = q;
    }
    p.iter().sum()
}

fn coalescence(ctx: &mut Ctx<'_>) -> Result<()> {
    let cfg = ctx.cfg;
    let law = cfg.law.unwrap_or(LawKind::Half);
    let horizon = cfg.horizon.unwrap_or(10_000);
    let seeds_n = cfg.replicas.unwrap_or(1000);
    let pairs = [(Site::new(0, 1), Site::new(1, 0))];
    let seeds = |f: u64| -> Vec<u64> {
        (0..seeds_n as u64)
            .map(|s| replica_seed(cfg.coupling_seed, f * 1_000_003 + s))
            .collect()
    };
    let stats = match law {
        LawKind::Half => {
            let half = ConstantLaw(0.5);
            let st = coalescence_experiment(&CoupledStepRule::new(&half), &pairs, horizon as usize, &seeds(0))?;
            let expect = 1.0 - lazy_survival(horizon as usize);
            ctx.value("expected_fraction", expect);
            ctx.value(
                "expected_fraction_sd",
                (expect * (1.0 - expect) / seeds_n as f64).sqrt(),
            );
            st
        }
        LawKind::Busemann => {
            let fields = cfg.fields.unwrap_or(5);
            let w = cfg.half_width.unwrap_or(1000);
            let t = cfg.direction.unwrap_or(0.5);
            let tilt = cfg.tilt.unwrap_or([0.0, 0.0]);
            let levels = horizon + horizon / 5;
            guard(levels as u64 * (2 * w as u64 + 1), "horizon / half_width")?;
            let mut all = CoalescenceStats {
                records: Vec::new(),
                horizon: horizon as usize,
                elliptic: true,
            };
            for f in 0..fields as u64 {
                let sampler = WeightSampler::new(ctx.spec(), replica_seed(cfg.seed, f))?;
                let strip = strip_busemann_law(&sampler, ORIGIN, ctx.beta(), tilt, t, w, levels)?;
                let st = coalescence_experiment(&CoupledStepRule::new(&strip), &pairs, horizon as usize, &seeds(f))?;
                all.elliptic &= st.elliptic;
                all.records.extend(st.records);
            }
            ctx.value("censored_fraction", all.fraction_censored());
            all
        }
    };
    stats.write_csv(ctx.artifact("coalescence.csv"))?;
    for (bin, count) in stats.histogram(1) {
        ctx.value(format!("levels_from_{bin}"), count as f64);
    }
    ctx.value("elliptic", f64::from(u8::from(stats.elliptic)));
    let need = if law == LawKind::Half { 0.99 } else { 0.95 };
    ctx.check(Check::at_least("fraction_coalesced", stats.fraction_coalesced(), need));
    ctx.check(Check::at_most(
        "post_merge_violations",
        stats.post_merge_violations() as f64,
        0.0,
    ));
    Ok(())
}

fn junctions(ctx: &mut Ctx<'_>) -> Result<()> {
    let cfg = ctx.cfg;
    let sides = if cfg.levels.is_empty() {
        vec![16, 32, 64]
    } else {
        cfg.levels.clone()
    };
    let reps = cfg.replicas.unwrap_or(20);
    let law = cfg.law.unwrap_or(LawKind::Half);
    let big = *sides.iter().max().expect("non-empty");
    let busemann_law = match law {
        LawKind::Half => None,
        LawKind::Busemann => {
            let w = square(2 * big + 1, "levels")?;
            let field = generate_field(ctx.spec(), cfg.seed, w)?;
            let b = busemann_from_p2l(&field, ctx.beta(), cfg.tilt.unwrap_or([0.0, 0.0]), 2 * big)?;
            Some(TransitionField::from_busemann(&b, &field)?)
        }
    };
    let half = ConstantLaw(0.5);
    let step_law: &dyn StepLaw = match &busemann_law {
        Some(t) => t,
        None => &half,
    };
    let rule = CoupledStepRule::new(step_law);
    let mut rows = Vec::new();
    let mut identity = true;
    let mut densities = Vec::new();
    for &side in &sides {
        let reports: Vec<_> = (0..reps as u64)
            .into_par_iter()
            .map(|r| {
                junction_statistics(
                    &rule,
                    ORIGIN,
                    side as usize,
                    &CouplingField::new(replica_seed(cfg.coupling_seed, r)),
                )
            })
            .collect::<Result<_>>()?;
        let mut ds = Vec::new();
        for (r, j) in reports.iter().enumerate() {
            identity &= j.leaves == j.junctions + j.trees;
            ds.push(j.density());
            rows.push(vec![
                side.to_string(),
                r.to_string(),
                j.junctions.to_string(),
                j.leaves.to_string(),
                j.trees.to_string(),
                fmt_real(j.density()),
            ]);
        }
        let m = MeanSe::of(&ds);
        ctx.value(format!("density_{side}"), m.mean);
        densities.push(m.mean);
    }
    csv::write(
        ctx.artifact("junctions.csv"),
        &["side", "replica", "junctions", "leaves", "trees", "density"],
        rows,
    )?;
    ctx.check(Check::at_least("forest_identity", f64::from(u8::from(identity)), 1.0));
    let dec = densities.windows(2).all(|w| w[1] < w[0]);
    ctx.check(Check::at_least("density_decreasing", f64::from(u8::from(dec)), 1.0));
    Ok(())
}

/// Tree interfaces for `replicas` coupling seeds in one environment.
fn tree_interfaces(
    field: &WeightField,
    beta: Beta,
    steps: usize,
    seeds: &[u64],
) -> Result<(Vec<InterfaceResult>, usize, TransitionField)> {
    let w = *field.window();
    let table = p2p_table(field, ORIGIN, w, beta, Mode::FromAnchor)?;
    let bw = backward_transitions(&table, field)?;
    let out: Vec<(InterfaceResult, usize)> = seeds
        .par_iter()
        .enumerate()
        .map(|(i, &s)| -> Result<_> {
            let tree = build_tree(&bw, CouplingField::new(s))?;
            let res = competition_interface(&tree, steps)?;
            let bad = if i < 20 { separation_violations(&tree, &res)? } else { 0 };
            Ok((res, bad))
        })
        .collect::<Result<_>>()?;
    let cif = interface_transitions(&table, field)?;
    let bad = out.iter().map(|o| o.1).sum();
    Ok((out.into_iter().map(|o| o.0).collect(), bad, cif))
}

fn interface(ctx: &mut Ctx<'_>) -> Result<()> {
    let cfg = ctx.cfg;
    need_finite(ctx.beta(), cfg.kind)?;
    let steps = cfg.steps.unwrap_or(2000);
    let reps = cfg.replicas.unwrap_or(1000);
    let field = generate_field(ctx.spec(), cfg.seed, square(steps as i64 + 2, "steps")?)?;
    let seeds: Vec<u64> = (0..reps as u64).map(|r| replica_seed(cfg.coupling_seed, r)).collect();
    let (tree, bad, cif) = tree_interfaces(&field, ctx.beta(), steps, &seeds)?;
    let chain: Vec<InterfaceResult> = (0..reps as u64)
        .into_par_iter()
        .map(|r| interface_chain(&cif, steps, &mut replica_rng(cfg.sampler_seed, stream::SAMPLER, r)))
        .collect::<Result<_>>()?;
    let dirs: Vec<f64> = tree.iter().map(|r| r.direction()).collect();
    csv::write(
        ctx.artifact("directions.csv"),
        &["replica", "tree_direction", "chain_direction"],
        tree.iter()
            .zip(&chain)
            .enumerate()
            .map(|(r, (a, b))| vec![r.to_string(), fmt_real(a.direction()), fmt_real(b.direction())]),
    )?;
    write_interfaces_csv(&tree[..tree.len().min(10)], ctx.artifact("interfaces.csv"))?;
    let s = direction_summary(&dirs, 0.001, 0.01);
    ctx.value("median_direction", s.median);
    ctx.value("largest_atom", s.largest_atom);
    let ends = |v: &[InterfaceResult]| v.iter().map(|r| r.path.end().u).collect::<Vec<_>>();
    let chi = two_sample_chi_square(&ends(&tree), &ends(&chain), 20);
    ctx.value("chi_square", chi.statistic);
    ctx.value("chi_square_dof", chi.dof as f64);
    ctx.check(Check::at_least("tree_vs_chain_p_value", chi.p_value, 0.01));
    ctx.check(Check::at_most("separation_violations", bad as f64, 0.0));
    ctx.check(Check::at_least("inside_fraction", s.inside as f64 / reps as f64, 1.0));
    if matches!(ctx.spec(), WeightSpec::Constant { .. }) {
        ctx.check(Check::at_least(
            "median_half_plausible",
            f64::from(u8::from(s.median_half_plausible())),
            1.0,
        ));
    }
    Ok(())
}

fn cdf(ctx: &mut Ctx<'_>) -> Result<()> {
    let cfg = ctx.cfg;
    need_finite(ctx.beta(), cfg.kind)?;
    let steps = cfg.steps.unwrap_or(2000);
    let reps = cfg.replicas.unwrap_or(1000);
    let alpha = cfg.alpha.unwrap_or(0.01);
    let grid = if cfg.directions.is_empty() {
        (0..21).map(|j| 0.02 + 0.048 * j as f64).collect()
    } else {
        cfg.directions.clone()
    };
    let field = generate_field(ctx.spec(), cfg.seed, square(steps as i64 + 2, "steps")?)?;
    let seeds: Vec<u64> = (0..reps as u64).map(|r| replica_seed(cfg.coupling_seed, r)).collect();
    let (ifs, bad, _) = tree_interfaces(&field, ctx.beta(), steps, &seeds)?;
    let radius = steps as i64 + 1;
    let scan = direction_scan(&field, ORIGIN, ctx.beta(), &cdf_scan_directions(&grid, steps), radius)?;
    let cmp = cif_cdf_check(&field, &scan, &ifs, &grid, alpha)?;
    cmp.write_csv(ctx.artifact("cdf.csv"))?;
    let far_steps = 2 * steps + 1;
    let sampler = WeightSampler::new(ctx.spec(), cfg.seed)?;
    let far = direction_scan(
        &sampler,
        ORIGIN,
        ctx.beta(),
        &cdf_scan_directions(&grid, far_steps),
        far_steps as i64 + 1,
    )?;
    let w0 = field.at(ORIGIN);
    let mut far_rows = far.rows.iter();
    let mut drift: f64 = 0.0;
    for row in &cmp.rows {
        let a = crate::cocycle::direction_target(row.xi, far_steps as i64 + 1).u;
        if let Some(f) = far_rows.find(|r| crate::cocycle::direction_target(r.0, far_steps as i64 + 1).u == a + 1) {
            drift = drift.max((row.busemann - ctx.beta().boltzmann(w0 - f.1).min(1.0)).abs());
        }
    }
    ctx.value("horizon_doubling_drift", drift);
    ctx.value("sup_discrepancy", cmp.sup_discrepancy());
    ctx.value("cdf_first", cmp.rows[0].empirical);
    ctx.value("cdf_last", cmp.rows[cmp.rows.len() - 1].empirical);
    ctx.check(Check::at_most("outside_band", cmp.outside_band() as f64, 0.0));
    ctx.check(Check::at_least(
        "empirical_monotone",
        f64::from(u8::from(cmp.empirical_monotone())),
        1.0,
    ));
    ctx.check(Check::at_most("separation_violations", bad as f64, 0.0));
    Ok(())
}

fn scan(ctx: &mut Ctx<'_>) -> Result<()> {
    let cfg = ctx.cfg;
    let radius = cfg.size.unwrap_or(1000);
    guard(((radius + 1) as u64).pow(2), "size")?;
    let grid = if cfg.directions.is_empty() {
        (1..50).map(|k| k as f64 / 50.0).collect()
    } else {
        cfg.directions.clone()
    };
    let w = WeightSampler::new(ctx.spec(), cfg.seed)?;
    let p = direction_scan(&w, ORIGIN, ctx.beta(), &grid, radius)?;
    p.write_csv(ctx.artifact("scan.csv"))?;
    ctx.value("max_jump", p.max_jump);
    let t = cfg.direction.unwrap_or(0.5);
    let d = horizon_doubling(&w, ORIGIN, ctx.beta(), t, radius)?;
    ctx.value("doubling_b1", d[0]);
    ctx.value("doubling_b2", d[1]);
    ctx.check(Check::at_most("monotonicity_violations", p.violations as f64, 0.0));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::p2p_table;

    #[test]
    fn hand_fixture_values() {
        let f = hand_fixture();
        let t = p2p_table(&f, ORIGIN, Window::square(2), Beta::ONE, Mode::FromAnchor).unwrap();
        assert!((t.at(Site::new(1, 1)) - (6f64.exp() + 3f64.exp()).ln()).abs() < 1e-12);
        assert_eq!(f.at(Site::new(3, 3)), 0.0);
    }

    #[test]
    fn central_binomial_values() {
        assert!((central_binomial(2) - 0.5).abs() < 1e-15);
        assert!((central_binomial(4) - 6.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn lazy_survival_short() {
        // one step: hit 0 with probability 1/4
        assert!((lazy_survival(1) - 0.75).abs() < 1e-15);
    }
}
