//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test --test acceptance`. A single criterion can be picked
//! with `POLYMERLAB_ONLY=7,12`.

mod common;

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polymerlab::cif::{
    build_tree, cdf_scan_directions, cif_cdf_check, competition_interface, direction_summary, separation_violations,
    InterfaceResult,
};
use polymerlab::cocycle::{
    busemann_from_p2l, busemann_from_p2p, cesaro_busemann, check_monotonicity, cocycle_shape_check, direction_scan,
    dual_tilt, estimate_near_axis, estimate_shape, BusemannField,
};
use polymerlab::coupling::{
    coalescence_experiment, ordering_check, strip_busemann_law, ConstantLaw, CoupledStepRule, CouplingField,
};
use polymerlab::env::{generate_field, Site, WeightSampler, WeightSpec, Window, E1, E2, ORIGIN};
use polymerlab::experiment;
use polymerlab::gibbs::{
    backward_transitions, dlr_consistency_check, ldp_rate_profile, level_mass_defects, rooted_mass_decay,
    TransitionField,
};
use polymerlab::partition::{comparison_check, p2l_table, p2p_table, Beta, Mode};
use polymerlab::stats::MeanSe;

use common::{binomial_half, brute_p2l, brute_p2p, entropy, lazy_walk_survival};

type Outcome = Result<(bool, String), String>;

fn gaussian() -> WeightSpec {
    WeightSpec::standard_gaussian()
}

fn beta(x: f64) -> Beta {
    Beta::new(x).unwrap()
}

const BETAS: [f64; 4] = [0.5, 1.0, 4.0, f64::INFINITY];

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for i in 0..50u64 {
        let n = rng.random_range(1..=20i64);
        let a = rng.random_range(0..=n);
        let b = BETAS[i as usize % 4];
        let h = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let field = generate_field(gaussian(), 100 + i, Window::square(21)).map_err(err)?;
        let y = Site::new(a, n - a);
        let w = Window::spanning(ORIGIN, y).map_err(err)?;
        let dp = p2p_table(&field, ORIGIN, w, beta(b), Mode::FromAnchor)
            .map_err(err)?
            .at(y);
        worst = worst.max(rel_err(dp, brute_p2p(&field, ORIGIN, y, b)));
        let to = p2p_table(&field, y, w, beta(b), Mode::ToAnchor)
            .map_err(err)?
            .at(ORIGIN);
        worst = worst.max(rel_err(to, brute_p2p(&field, ORIGIN, y, b)));
        let pl = p2l_table(&field, beta(b), h, n).map_err(err)?.at(ORIGIN);
        worst = worst.max(rel_err(pl, brute_p2l(&field, ORIGIN, n as u32, b, h)));
    }
    Ok((
        worst <= 1e-10,
        format!("max relative error {worst:.2e} (tol 1e-10) over 50 instances"),
    ))
}

/// p2l and p2p Busemann fields on a 200x200 window for each temperature.
fn fields_200() -> Result<Vec<(f64, BusemannField, BusemannField, polymerlab::env::WeightField)>, String> {
    let field = generate_field(gaussian(), 2, Window::square(401)).map_err(err)?;
    BETAS
        .iter()
        .map(|&b| {
            let pl = busemann_from_p2l(&field, beta(b), [0.1, -0.1], 400).map_err(err)?;
            let pp = busemann_from_p2p(&field, beta(b), Site::new(400, 400), Window::square(200)).map_err(err)?;
            Ok((b, pl, pp, field.clone()))
        })
        .collect()
}

fn recovery() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut sites = 0;
    let mut lines = Vec::new();
    for (b, pl, pp, field) in fields_200()? {
        let r = pl.recovery_residual(&field).max(pp.recovery_residual(&field));
        sites += pl.recovery_sites().count() + pp.recovery_sites().count();
        lines.push(format!("beta={b}: {r:.1e}"));
        worst = worst.max(r);
    }
    Ok((
        worst <= 1e-9,
        format!(
            "max residual {worst:.2e} (tol 1e-9) at {sites} sites; {}",
            lines.join(", ")
        ),
    ))
}

fn random_staircase(rng: &mut ChaCha8Rng, x: Site) -> Vec<Site> {
    let mut steps: Vec<Site> = std::iter::repeat_n(E1, x.u as usize)
        .chain(std::iter::repeat_n(E2, x.v as usize))
        .collect();
    steps.shuffle(rng);
    let mut s = ORIGIN;
    let mut out = vec![s];
    for d in steps {
        s = s + d;
        out.push(s);
    }
    out
}

fn closure() -> Outcome {
    let mut plaquette: f64 = 0.0;
    let mut path_gap: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (_, pl, pp, _) in fields_200()? {
        plaquette = plaquette.max(pl.closure_residual()).max(pp.closure_residual());
        for _ in 0..25 {
            let x = Site::new(rng.random_range(0..199), rng.random_range(0..199));
            for b in [&pl, &pp] {
                let p1 = b.sum_along(&random_staircase(&mut rng, x)).map_err(err)?;
                let p2 = b.sum_along(&random_staircase(&mut rng, x)).map_err(err)?;
                path_gap = path_gap.max((p1 - p2).abs());
            }
        }
    }
    Ok((
        plaquette <= 1e-9 && path_gap <= 1e-8,
        format!(
            "plaquette residual {plaquette:.2e} (tol 1e-9); staircase gap {path_gap:.2e} over 100 pairs per field type (tol 1e-8)"
        ),
    ))
}

fn monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut violations = 0;
    let mut sites = 0;
    let mut min_margin = f64::INFINITY;
    for i in 0..100u64 {
        let field = generate_field(gaussian(), 400 + i, Window::square(81)).map_err(err)?;
        let b = beta(BETAS[i as usize % 4]);
        let h = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let hp = [h[0] + rng.random_range(0.0..0.5), h[1] - rng.random_range(0.0..0.5)];
        let fa = busemann_from_p2l(&field, b, h, 80).map_err(err)?;
        let fb = busemann_from_p2l(&field, b, hp, 80).map_err(err)?;
        let r = check_monotonicity(&fa, &fb).map_err(err)?;
        violations += r.violations;
        sites += r.sites;
        min_margin = min_margin.min(r.min_margin_e1).min(r.min_margin_e2);
    }
    let mut cmp_bad = 0;
    for i in 0..500u64 {
        let field = generate_field(gaussian(), 900 + i / 50, Window::square(40)).map_err(err)?;
        let x = Site::new(rng.random_range(0..10), rng.random_range(0..10));
        let base = x + E1 + E2;
        let v = Site::new(rng.random_range(base.u..39), rng.random_range(base.v..39));
        let u = Site::new(rng.random_range(v.u..40), rng.random_range(base.v..=v.v));
        let r = comparison_check(&field, x, u, v, beta(BETAS[i as usize % 4])).map_err(err)?;
        if !r.holds(1e-12) {
            cmp_bad += 1;
        }
    }
    Ok((
        violations == 0 && cmp_bad == 0,
        format!(
            "{violations} cocycle violations over 100 tilt pairs ({sites} sites, min margin {min_margin:.2e}); {cmp_bad} comparison violations over 500 triples"
        ),
    ))
}

fn dlr() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut paths = 0;
    for i in 0..20u64 {
        let field = generate_field(gaussian(), 500 + i, Window::square(31)).map_err(err)?;
        let h = [rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)];
        let b = busemann_from_p2l(&field, Beta::ONE, h, 30).map_err(err)?;
        let x = Site::new(rng.random_range(0..5), rng.random_range(0..5));
        let r = dlr_consistency_check(&b, &field, x, x.level() + 10).map_err(err)?;
        worst = worst.max(r.max_discrepancy);
        paths += r.paths;
    }
    Ok((
        worst <= 1e-10,
        format!("max discrepancy {worst:.2e} (tol 1e-10) over {paths} paths"),
    ))
}

fn level_mass() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..5u64 {
        let field = generate_field(gaussian(), 600 + i, Window::square(101)).map_err(err)?;
        let b = busemann_from_p2l(&field, Beta::ONE, [0.2 * i as f64 - 0.4, 0.0], 100).map_err(err)?;
        let d = level_mass_defects(&b, &field, ORIGIN, 50).map_err(err)?;
        worst = d.iter().map(|r| r.1).fold(worst, f64::max);
    }
    Ok((
        worst <= 1e-8,
        format!("max |mass - 1| {worst:.2e} over levels 1..=50, 5 fields (tol 1e-8)"),
    ))
}

fn entropy_reference() -> Outcome {
    let ts = [0.25, 0.5, 0.75];
    let s = estimate_shape(WeightSpec::Constant { c: 0.0 }, Beta::ONE, &ts, &[2000], 1, 7).map_err(err)?;
    let mut worst: f64 = 0.0;
    for &t in &ts {
        let l = s.lambda(t).map_err(err)?;
        worst = worst.max((l.mean - entropy(t)).abs());
    }
    Ok((worst <= 0.01, format!("max |lambda - H| {worst:.4} (tol 0.01)")))
}

fn symmetry_concavity() -> Outcome {
    let ts: Vec<f64> = (0..=10).map(|k| 0.05 + 0.09 * k as f64).collect();
    let s = estimate_shape(gaussian(), Beta::ONE, &ts, &[1000], 50, 8).map_err(err)?;
    let mut worst_sym: f64 = 0.0;
    for k in 0..5 {
        let (a, b) = (s.lambda_at(k), s.lambda_at(10 - k));
        worst_sym = worst_sym.max((a.mean - b.mean).abs() / a.se.hypot(b.se));
    }
    let worst_cc = s
        .second_differences()
        .iter()
        .map(|&(_, d, se)| d / se)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((
        worst_sym <= 2.0 && worst_cc <= 2.0,
        format!(
            "max symmetry gap {worst_sym:.2} SE (tol 2); max second difference {worst_cc:.2} SE (tol +2); lambda(1/2) = {:.4}",
            s.lambda(0.5).map_err(err)?.mean
        ),
    ))
}

const MARTIN_S: f64 = 0.0025;
const MARTIN_SCALE: f64 = 200.0;

fn martin() -> Outcome {
    let spec = gaussian();
    let l = estimate_near_axis(spec, Beta::ONE, MARTIN_S, MARTIN_SCALE, 40, 9).map_err(err)?;
    let denom = 2.0 * (MARTIN_S * spec.variance()).sqrt();
    let ratio = (l.mean - spec.mean()) / denom;
    let ratio_se = l.se / denom;
    Ok((
        (0.8..=1.2).contains(&ratio),
        format!(
            "ratio {ratio:.4} +- {ratio_se:.4} (band [0.8, 1.2]) at s = {MARTIN_S}, N = {}",
            (MARTIN_SCALE / MARTIN_S).ceil()
        ),
    ))
}

fn cesaro() -> Outcome {
    let spec = gaussian();
    let shape = estimate_shape(spec, Beta::ONE, &[0.4, 0.5, 0.6], &[400], 50, 10).map_err(err)?;
    let d = dual_tilt(&shape, 0.5).map_err(err)?;
    let (_, rep) = cesaro_busemann(
        spec,
        Window::square(8),
        Beta::ONE,
        d.tilt,
        400,
        200,
        11,
        Some(d.pl.mean),
    )
    .map_err(err)?;
    let z = rep.z_scores();
    Ok((
        z[0] <= 3.0 && z[1] <= 3.0,
        format!(
            "tilt ({:.4}, {:.4}); mean b = ({:.4}, {:.4}) +- ({:.4}, {:.4}); z = ({:.2}, {:.2}) (tol 3); f_pl(h) = {:.4}",
            d.tilt[0],
            d.tilt[1],
            rep.mean[0].mean,
            rep.mean[1].mean,
            rep.mean[0].se,
            rep.mean[1].se,
            z[0],
            z[1],
            d.pl.mean
        ),
    ))
}

fn shape_check() -> Outcome {
    let spec = gaussian();
    let shape = estimate_shape(spec, Beta::ONE, &[0.4, 0.5, 0.6], &[400], 50, 12).map_err(err)?;
    let d = dual_tilt(&shape, 0.5).map_err(err)?;
    let m_hat = [-d.tilt[0] + d.pl.mean, -d.tilt[1] + d.pl.mean];
    let bad = [m_hat[0] + 0.1, m_hat[1]];
    let ns = [50, 100, 200];
    let mut decreasing = 0;
    let (mut true_mean, mut bad_mean) = ([0.0; 3], [0.0; 3]);
    for r in 0..20u64 {
        let field = generate_field(spec, 1200 + r, Window::square(402)).map_err(err)?;
        let b = busemann_from_p2l(&field, Beta::ONE, d.tilt, 400).map_err(err)?;
        let p = cocycle_shape_check(&b, m_hat, &ns).map_err(err)?;
        let q = cocycle_shape_check(&b, bad, &ns).map_err(err)?;
        if p.windows(2).all(|w| w[1].1 < w[0].1) {
            decreasing += 1;
        }
        for k in 0..3 {
            true_mean[k] += p[k].1 / 20.0;
            bad_mean[k] += q[k].1 / 20.0;
        }
    }
    let control = (0..3).all(|k| bad_mean[k] > true_mean[k]);
    Ok((
        decreasing >= 18 && control,
        format!(
            "decreasing in {decreasing}/20 replicas (need 18); mean profile {:.3?}, perturbed {:.3?}",
            true_mean, bad_mean
        ),
    ))
}

fn coalescence() -> Outcome {
    let seeds: Vec<u64> = (0..1000).collect();
    let pair = [(Site::new(0, 1), Site::new(1, 0))];
    let law = ConstantLaw(0.5);
    let st = coalescence_experiment(&CoupledStepRule::new(&law), &pair, 10_000, &seeds).map_err(err)?;
    let frac = st.fraction_coalesced();
    let survive = lazy_walk_survival(1, 10_000);
    let expected = 1.0 - survive;
    let sd = (expected * survive / 1000.0).sqrt();
    let consistent = (frac - expected).abs() <= 3.0 * sd;

    let mut bus_total = 0;
    let mut bus_met = 0;
    let mut censored = 0;
    let mut bus_violations = 0;
    for f in 0..5u64 {
        let w = WeightSampler::new(gaussian(), 1300 + f).map_err(err)?;
        let law = strip_busemann_law(&w, ORIGIN, Beta::ONE, [0.0, 0.0], 0.5, 1000, 12_000).map_err(err)?;
        let seeds: Vec<u64> = (0..100).map(|s| 10_000 * (f + 1) + s).collect();
        let st = coalescence_experiment(&CoupledStepRule::new(&law), &pair, 10_000, &seeds).map_err(err)?;
        bus_total += st.records.len();
        bus_met += st.coalesced();
        censored += st.records.iter().filter(|r| r.level.is_none() && r.censored).count();
        bus_violations += st.post_merge_violations();
    }
    let bus_frac = bus_met as f64 / bus_total as f64;
    Ok((
        frac >= 0.99 && st.post_merge_violations() == 0 && bus_frac >= 0.95 && bus_violations == 0,
        format!(
            "p=1/2: {:.1}% coalesced (need 99%; exact expectation {:.2}%, {}within 3 sd), {} post-merge violations; \
             Busemann rules: {:.1}% of {bus_total} coalesced (need 95%), {censored} censored, {bus_violations} post-merge violations",
            100.0 * frac,
            100.0 * expected,
            if consistent { "" } else { "NOT " },
            st.post_merge_violations(),
            100.0 * bus_frac
        ),
    ))
}

fn ordering() -> Outcome {
    let mut violations = 0;
    let mut walks = 0;
    let mut truncated = 0;
    let seeds: Vec<u64> = (0..100).collect();
    for f in 0..3u64 {
        let field = generate_field(gaussian(), 1400 + f, Window::square(602)).map_err(err)?;
        let lo = busemann_from_p2l(&field, Beta::ONE, [0.0, 0.0], 601).map_err(err)?;
        let hi = busemann_from_p2l(&field, Beta::ONE, [1.0, -1.0], 601).map_err(err)?;
        let (lo, hi) = (
            TransitionField::from_busemann(&lo, &field).map_err(err)?,
            TransitionField::from_busemann(&hi, &field).map_err(err)?,
        );
        let r = ordering_check(&lo, &hi, &seeds, ORIGIN, 500).map_err(err)?;
        violations += r.violations;
        walks += r.walks;
        truncated += r.truncated;
    }
    Ok((
        violations == 0 && truncated == 0,
        format!("{violations} violations over {walks} walks x 500 steps, {truncated} truncated"),
    ))
}

fn decay() -> Outcome {
    let levels = [8, 16, 32, 64];
    let x = Site::new(80, 80);
    let mut strict = 0;
    for s in 0..10u64 {
        let field = generate_field(gaussian(), 1500 + s, Window::square(202)).map_err(err)?;
        let b = busemann_from_p2l(&field, Beta::ONE, [0.0, 0.0], 201).map_err(err)?;
        let fw = TransitionField::from_busemann(&b, &field).map_err(err)?;
        let prof = rooted_mass_decay(&fw, x, &levels).map_err(err)?;
        if prof.windows(2).all(|w| w[1].1 < w[0].1) {
            strict += 1;
        }
    }
    let half = TransitionField::constant(Window::square(202), 0.5).map_err(err)?;
    let prof = rooted_mass_decay(&half, x, &levels).map_err(err)?;
    let gap = prof
        .iter()
        .map(|&(n, m)| (m - binomial_half(n as u64, n as u64 / 2)).abs())
        .fold(0.0, f64::max);
    Ok((
        strict == 10 && gap <= 1e-15,
        format!("strictly decreasing on {strict}/10 seeds; p=1/2 max gap to binomial {gap:.1e}"),
    ))
}

/// Mean rate curve over replicas at distance `n`, with the tilt dual to `1/2`
/// estimated at the same size, and the worst identity residual.
fn rate_curve(n: i64, reps: u64, seed: u64) -> Result<(Vec<MeanSe>, f64), String> {
    let spec = gaussian();
    let shape = estimate_shape(spec, Beta::ONE, &[0.45, 0.5, 0.55], &[n], 50, seed).map_err(err)?;
    let d = dual_tilt(&shape, 0.5).map_err(err)?;
    let side = 2 * n as usize + 2;
    let mut rates = vec![Vec::with_capacity(reps as usize); n as usize + 1];
    let mut identity: f64 = 0.0;
    for r in 0..reps {
        let field = generate_field(spec, seed * 1000 + r, Window::square(side)).map_err(err)?;
        let b = busemann_from_p2l(&field, Beta::ONE, d.tilt, 2 * n).map_err(err)?;
        let p = ldp_rate_profile(&b, &field, ORIGIN, n, d.tilt, None).map_err(err)?;
        identity = identity.max(p.identity_residual);
        for (a, row) in p.rows.iter().enumerate() {
            rates[a].push(row.rate);
        }
    }
    Ok((rates.iter().map(|xs| MeanSe::of(xs)).collect(), identity))
}

fn ldp() -> Outcome {
    let n = 500;
    let (curve, identity) = rate_curve(n, 40, 15)?;
    let lowest = curve
        .iter()
        .map(|m| m.mean / m.se.max(f64::MIN_POSITIVE))
        .fold(f64::INFINITY, f64::min);
    let mid = curve[n as usize / 2];
    let at_dual = mid.mean / mid.se;
    // finite-size diagnostic: the offset at the dual direction against size
    let (half, _) = rate_curve(n / 2, 40, 16)?;
    let small = half[n as usize / 4];
    let exponent = (small.mean / mid.mean).ln() / 2f64.ln();
    Ok((
        lowest >= -2.0 && at_dual <= 2.0 && identity <= 1e-10,
        format!(
            "min rate {lowest:.2} SE (need >= -2); rate at dual direction {:.5} +- {:.5} = {at_dual:.2} SE (need <= 2); \
             identity residual {identity:.1e}; at n = {}: {:.5} +- {:.5}, decay exponent {exponent:.2}",
            mid.mean,
            mid.se,
            n / 2,
            small.mean,
            small.se
        ),
    ))
}

fn interface() -> Outcome {
    let steps = 2000usize;
    let replicas = 1000u64;
    let win = Window::square(steps + 2);
    type Run = (polymerlab::env::WeightField, Vec<InterfaceResult>, usize);
    let interfaces = |spec: WeightSpec, seed: u64| -> Result<Run, String> {
        let field = generate_field(spec, seed, win).map_err(err)?;
        let table = p2p_table(&field, ORIGIN, win, Beta::ONE, Mode::FromAnchor).map_err(err)?;
        let bw = backward_transitions(&table, &field).map_err(err)?;
        let mut out = Vec::with_capacity(replicas as usize);
        let mut bad = 0;
        for r in 0..replicas {
            let tree = build_tree(&bw, CouplingField::new(seed * 100_000 + r)).map_err(err)?;
            let res = competition_interface(&tree, steps).map_err(err)?;
            if r < 20 {
                bad += separation_violations(&tree, &res).map_err(err)?;
            }
            out.push(res);
        }
        Ok((field, out, bad))
    };
    let dirs = |v: &[InterfaceResult]| v.iter().map(|r| r.direction()).collect::<Vec<_>>();

    let (_, flat, bad0) = interfaces(WeightSpec::Constant { c: 0.0 }, 16)?;
    let flat_summary = direction_summary(&dirs(&flat), 0.001, 0.01);

    let (field, ifs, bad1) = interfaces(gaussian(), 17)?;
    let summary = direction_summary(&dirs(&ifs), 0.001, 0.01);
    let grid: Vec<f64> = (0..21).map(|j| 0.02 + 0.048 * j as f64).collect();
    let radius = steps as i64 + 1;
    let scan = direction_scan(&field, ORIGIN, Beta::ONE, &cdf_scan_directions(&grid, steps), radius).map_err(err)?;
    let cmp = cif_cdf_check(&field, &scan, &ifs, &grid, 0.01).map_err(err)?;
    if std::env::var("POLYMERLAB_VERBOSE").is_ok() {
        for r in &cmp.rows {
            println!(
                "  xi {:.3} empirical {:.3} busemann {:.4} band [{:.3}, {:.3}]",
                r.xi, r.empirical, r.busemann, r.lo, r.hi
            );
        }
    }
    let sampler = WeightSampler::new(gaussian(), 17).map_err(err)?;
    let far_steps = 2 * steps + 1;
    let far = direction_scan(
        &sampler,
        ORIGIN,
        Beta::ONE,
        &cdf_scan_directions(&grid, far_steps),
        far_steps as i64 + 1,
    )
    .map_err(err)?;
    let w0 = field.at(ORIGIN);
    let drift = cmp
        .rows
        .iter()
        .zip(&far.rows)
        .map(|(a, b)| (a.busemann - Beta::ONE.boltzmann(w0 - b.1)).abs())
        .fold(0.0, f64::max);
    let first = cmp.rows[0];
    let last = cmp.rows[cmp.rows.len() - 1];
    let pass = flat_summary.median_half_plausible()
        && cmp.outside_band() == 0
        && cmp.empirical_monotone()
        && summary.inside == ifs.len()
        && bad0 + bad1 == 0;
    Ok((
        pass,
        format!(
            "flat median {:.4} (1/2 plausible: {}); Gaussian: {} of 21 grid points outside 99% bands, sup gap {:.3}, \
             horizon-doubling drift {:.3}, CDF(0.02) = {:.3}, CDF(0.98) = {:.3}, median {:.3}, largest atom {:.3}, \
             {} separation violations",
            flat_summary.median,
            flat_summary.median_half_plausible(),
            cmp.outside_band(),
            cmp.sup_discrepancy(),
            drift,
            first.empirical,
            last.empirical,
            summary.median,
            summary.largest_atom,
            bad0 + bad1
        ),
    ))
}

fn csv_files(dir: &std::path::Path) -> std::io::Result<Vec<(String, Vec<u8>)>> {
    let mut out = Vec::new();
    for sub in std::fs::read_dir(dir)? {
        let sub = sub?.path();
        if !sub.is_dir() {
            continue;
        }
        for f in std::fs::read_dir(&sub)? {
            let f = f?.path();
            if f.extension().is_some_and(|e| e == "csv") {
                let rel = f.strip_prefix(dir).unwrap().display().to_string();
                out.push((rel, std::fs::read(&f)?));
            }
        }
    }
    out.sort();
    Ok(out)
}

// The example manifest, run twice with different worker counts.
fn reproducibility() -> Outcome {
    let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs/suite.toml");
    let configs = experiment::load_manifest(&manifest).map_err(|e| e.to_string())?;
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = Vec::new();
    for (i, workers) in [Some(1), None].into_iter().enumerate() {
        let out = tmp.path().join(format!("run{i}"));
        let opts = experiment::RunOptions {
            out: out.clone(),
            workers,
            beta: None,
        };
        let suite = experiment::suite(&configs, &opts).map_err(|e| e.to_string())?;
        if let Some(bad) = suite.items.iter().find(|it| it.error.is_some()) {
            return Err(format!("{}: {}", bad.name, bad.error.as_deref().unwrap_or("")));
        }
        runs.push(csv_files(&out).map_err(|e| e.to_string())?);
    }
    let (a, b) = (&runs[0], &runs[1]);
    let names_match = a.iter().map(|x| &x.0).eq(b.iter().map(|x| &x.0));
    let differing: Vec<&str> = a
        .iter()
        .zip(b)
        .filter(|(x, y)| x != y)
        .map(|(x, _)| x.0.as_str())
        .collect();
    let bytes: usize = a.iter().map(|x| x.1.len()).sum();
    Ok((
        names_match && differing.is_empty() && !a.is_empty(),
        format!(
            "{} CSV files, {bytes} bytes, {} differ {differing:?}",
            a.len(),
            differing.len()
        ),
    ))
}

struct Criterion {
    id: usize,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let only: Option<Vec<usize>> = std::env::var("POLYMERLAB_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let secs = Duration::from_secs;
    let all = [
        Criterion {
            id: 1,
            name: "oracle equivalence",
            budget: secs(10),
            run: oracle_equivalence,
        },
        Criterion {
            id: 2,
            name: "recovery identity",
            budget: secs(5),
            run: recovery,
        },
        Criterion {
            id: 3,
            name: "cocycle closure",
            budget: secs(5),
            run: closure,
        },
        Criterion {
            id: 4,
            name: "monotonicity and comparison",
            budget: secs(30),
            run: monotonicity,
        },
        Criterion {
            id: 5,
            name: "DLR consistency",
            budget: secs(30),
            run: dlr,
        },
        Criterion {
            id: 6,
            name: "level-mass normalization",
            budget: secs(5),
            run: level_mass,
        },
        Criterion {
            id: 7,
            name: "shape entropy reference",
            budget: secs(60),
            run: entropy_reference,
        },
        Criterion {
            id: 8,
            name: "shape symmetry and concavity",
            budget: secs(600),
            run: symmetry_concavity,
        },
        Criterion {
            id: 9,
            name: "near-axis boundary trend",
            budget: secs(600),
            run: martin,
        },
        Criterion {
            id: 10,
            name: "Cesaro mean identity",
            budget: secs(300),
            run: cesaro,
        },
        Criterion {
            id: 11,
            name: "cocycle shape check",
            budget: secs(300),
            run: shape_check,
        },
        Criterion {
            id: 12,
            name: "coalescence",
            budget: secs(300),
            run: coalescence,
        },
        Criterion {
            id: 13,
            name: "path ordering",
            budget: secs(60),
            run: ordering,
        },
        Criterion {
            id: 14,
            name: "rooted-mass decay",
            budget: secs(60),
            run: decay,
        },
        Criterion {
            id: 15,
            name: "LDP rate",
            budget: secs(120),
            run: ldp,
        },
        Criterion {
            id: 16,
            name: "competition interface",
            budget: secs(900),
            run: interface,
        },
        Criterion {
            id: 17,
            name: "reproducibility",
            budget: secs(600),
            run: reproducibility,
        },
    ];
    let mut failed = Vec::new();
    for c in all.iter().filter(|c| only.as_ref().is_none_or(|o| o.contains(&c.id))) {
        let start = Instant::now();
        let out = (c.run)();
        let took = start.elapsed();
        let in_time = took <= c.budget;
        let (pass, detail) = match out {
            Ok((p, d)) => (p && in_time, d),
            Err(e) => (false, format!("error: {e}")),
        };
        println!(
            "criterion {:>2} [{}] {}: {} ({:.1} s of {} s{})",
            c.id,
            if pass { "PASS" } else { "FAIL" },
            c.name,
            detail,
            took.as_secs_f64(),
            c.budget.as_secs(),
            if in_time { "" } else { ", over budget" }
        );
        if !pass {
            failed.push(c.id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
