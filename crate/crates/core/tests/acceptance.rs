//! Acceptance criteria 1 to 9. Prints one `PASS`/`FAIL` line per criterion
//! and exits nonzero if any fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gluevar_core::bounds::{self, extreme_generic, gluevar_bound, witness_residuals};
use gluevar_core::choquet::{choquet_eval, gluevar_mixture_eval, is_symmetric, moments};
use gluevar_core::oracle::{oracle_extreme, random_params, relative_error, sample_feasible};
use gluevar_core::{
    BoundError, BoundResult, CaseLabel, DistClass, Direction, Distortion, GlueVaRParams, Level, MomentSpec, Regime,
    Side, SpecialKind, StepQuantile,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, name: &str, ok: bool, detail: &str) {
    println!("criterion {id} [{name}]: {} {detail}", if ok { "PASS" } else { "FAIL" });
}

fn random_spec(rng: &mut ChaCha8Rng, class: DistClass) -> MomentSpec {
    MomentSpec::new(rng.gen_range(-5.0..5.0), rng.gen_range(0.1..5.0), class).unwrap()
}

fn classes() -> [DistClass; 2] {
    [DistClass::General, DistClass::Symmetric]
}

fn directions() -> [Direction; 2] {
    [Direction::Worst, Direction::Best]
}

/// Closed form when one exists, otherwise the generic engine.
fn any_bound(p: &GlueVaRParams, spec: &MomentSpec, dir: Direction) -> BoundResult {
    match gluevar_bound(p, spec, dir) {
        Ok(r) => r,
        Err(BoundError::UnsupportedRegime { .. }) => extreme_generic(&p.distortion(), spec, dir).unwrap(),
        Err(e) => panic!("{p:?} {spec:?} {dir:?}: {e}"),
    }
}

fn criterion_1_closed_form_matches_generic() -> bool {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut seen: BTreeSet<&'static str> = BTreeSet::new();
    let mut worst_err: f64 = 0.0;
    let mut failures = 0;
    let mut tuples = 0;
    while tuples < 10_000 {
        let p = random_params(&mut rng);
        let class = if tuples % 2 == 0 { DistClass::General } else { DistClass::Symmetric };
        if class == DistClass::Symmetric && Regime::of(&p) == Regime::Straddle {
            continue;
        }
        tuples += 1;
        let spec = random_spec(&mut rng, class);
        for dir in directions() {
            let closed = gluevar_bound(&p, &spec, dir).unwrap();
            let generic = extreme_generic(&p.distortion(), &spec, dir).unwrap();
            seen.insert(closed.case.label.as_str());
            let e = relative_error(closed.value, generic.value, spec.sigma);
            worst_err = worst_err.max(e);
            if e > 1e-10 {
                failures += 1;
                eprintln!("{p:?} {spec:?} {dir:?}: closed {} generic {}", closed.value, generic.value);
            }
        }
    }
    let missing: Vec<&str> = CaseLabel::ALL_CLOSED
        .iter()
        .map(|l| l.as_str())
        .filter(|l| !seen.contains(l))
        .collect();
    let elapsed = start.elapsed();
    let ok = failures == 0 && missing.is_empty() && elapsed <= Duration::from_secs(10);
    report(
        1,
        "closed form vs generic",
        ok,
        &format!("max rel err {worst_err:.2e}, missing cases {missing:?}, {elapsed:.2?}"),
    );
    ok
}

fn criterion_2_oracle_convergence() -> bool {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 2_000;
    let mut worst: f64 = 0.0;
    let mut tuples = 0;
    while tuples < 100 {
        // knots at least 0.1 apart and inside [0.15, 0.85], so that n = 2000 resolves every segment
        let alpha: f64 = rng.gen_range(0.15..0.75);
        let beta: f64 = rng.gen_range(alpha + 0.1..0.85);
        let h2: f64 = rng.gen_range(0.0..1.0);
        let h1: f64 = rng.gen_range(0.0..=h2);
        let p = GlueVaRParams::new(alpha, beta, h1, h2).unwrap();
        let class = if tuples % 2 == 0 { DistClass::General } else { DistClass::Symmetric };
        if class == DistClass::Symmetric && Regime::of(&p) == Regime::Straddle {
            continue;
        }
        tuples += 1;
        let spec = random_spec(&mut rng, class);
        for dir in directions() {
            let closed = gluevar_bound(&p, &spec, dir).unwrap();
            let o = oracle_extreme(&p.distortion(), &spec, dir, n).unwrap();
            let e = (o.value - closed.value).abs() / spec.sigma;
            worst = worst.max(e);
            if e > 5e-3 {
                eprintln!("{p:?} {spec:?} {dir:?}: oracle {} closed {}", o.value, closed.value);
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = worst <= 5e-3 && elapsed <= Duration::from_secs(30);
    report(2, "oracle convergence", ok, &format!("max |oracle - closed|/sigma {worst:.2e}, {elapsed:.2?}"));
    ok
}

/// The three-point distribution obtained by reading the worst general
/// three-point formula literally, with `η` as defined alongside it.
fn literal_three_point_candidate(p: &GlueVaRParams, spec: &MomentSpec) -> StepQuantile {
    let (a, b, h1) = (p.alpha, p.beta, p.h1);
    let eta = a + (1.0 - h1 - b + a).powi(2) / (b - a) + (h1 - 1.0 + b).powi(2) / (1.0 - b);
    let den = (1.0 - h1) * eta + b * (b - a);
    let (mu, s) = (spec.mu, spec.sigma);
    StepQuantile::from_pairs(&[
        (a, mu - s * ((b - a) * (1.0 - b) / den).sqrt()),
        (b, mu + s * (1.0 - h1 - b + a) / (b - a).sqrt() * ((1.0 - b) / den).sqrt()),
        (1.0, mu + s * (h1 - 1.0 + b) / (1.0 - b).sqrt() * ((b - a) / den).sqrt()),
    ])
    .unwrap()
}

fn criterion_3_witness_attainment() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    let mut bad = 0;
    let mut worst: f64 = 0.0;
    for i in 0..5_000 {
        let p = random_params(&mut rng);
        let class = classes()[i % 2];
        let spec = random_spec(&mut rng, class);
        let scale = spec.sigma.max(spec.mu.abs()).max(1.0);
        for dir in directions() {
            let r = any_bound(&p, &spec, dir);
            let d = p.distortion();
            let target = match (&r.witness, &r.limit_witness) {
                (Some(w), _) => Some((d.clone(), w)),
                (None, Some(w)) => Some((d.with_jump_side(d.jump_value().opposite()), w)),
                _ => None,
            };
            if let Some((dd, w)) = target {
                checked += 1;
                let (m, a) = witness_residuals(&dd, &spec, w, r.value);
                worst = worst.max(m.max(a) / scale);
                let sym_ok = class == DistClass::General || is_symmetric(w, 1e-10 * scale);
                if m > 1e-10 * scale || a > 1e-10 * scale || !sym_ok {
                    bad += 1;
                    eprintln!("{p:?} {spec:?} {dir:?}: residuals {m:.2e} {a:.2e} symmetric {sym_ok}");
                }
            }
        }
    }

    let p = GlueVaRParams::new(0.95, 0.99, 0.3, 0.8).unwrap();
    let spec = MomentSpec::general(0.0, 1.0).unwrap();
    let d = p.distortion();
    let lemma = gluevar_bound(&p, &spec, Direction::Worst).unwrap();
    let w = lemma.witness.as_ref().unwrap();
    let (lm, la) = witness_residuals(&d, &spec, w, lemma.value);
    let lemma_ok = lm <= 1e-10 && la <= 1e-10;
    let literal = literal_three_point_candidate(&p, &spec);
    let (cm, _) = witness_residuals(&d, &spec, &literal, lemma.value);
    let literal_fails = cm > 1e-10;

    let ok = bad == 0 && checked > 0 && lemma_ok && literal_fails;
    report(
        3,
        "witness attainment",
        ok,
        &format!(
            "{checked} witnesses, max residual {worst:.2e}; lemma witness residual {:.2e}; literal candidate first value {:.4}, moment residual {cm:.2e}",
            lm.max(la),
            literal.values()[0]
        ),
    );
    ok
}

fn criterion_4_worked_values() -> bool {
    let spec = MomentSpec::general(0.0, 1.0).unwrap();
    let run = |a, b, h1, h2, dir| gluevar_bound(&GlueVaRParams::new(a, b, h1, h2).unwrap(), &spec, dir).unwrap();
    let w1 = run(0.95, 0.99, 0.3, 0.8, Direction::Worst);
    let w2 = run(0.9, 0.95, 0.02, 0.6, Direction::Worst);
    let b1 = run(0.1, 0.5, 0.4, 0.6, Direction::Best);
    let b2 = run(0.6, 0.9, 0.05, 0.85, Direction::Best);
    let eta = w1.intermediates.eta.unwrap();
    let checks = [
        (w1.value, 4.5),
        (eta, 20.25),
        (w2.value, 3.0),
        (b1.value, -1.0),
        (b2.value, -1.0 / 6.0),
    ];
    let ok = checks.iter().all(|(got, want)| (got - want).abs() <= 1e-12);
    report(
        4,
        "worked values",
        ok,
        &format!("{} (eta {}), {}, {}, {}", w1.value, eta, w2.value, b1.value, b2.value),
    );
    ok
}

fn criterion_5_var_tvar_rvar_coincide() -> bool {
    let spec = MomentSpec::general(0.0, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    for alpha in [0.5f64, 0.9, 0.95, 0.99] {
        let want = (alpha / (1.0 - alpha)).sqrt();
        for (kind, beta) in [
            (SpecialKind::Var, None),
            (SpecialKind::Tvar, None),
            (SpecialKind::Rvar, Some((1.0 + alpha) / 2.0)),
        ] {
            let p = GlueVaRParams::special(kind, alpha, beta).unwrap();
            let r = gluevar_bound(&p, &spec, Direction::Worst).unwrap();
            worst = worst.max((r.value - want).abs());
        }
    }
    let ok = worst <= 1e-12;
    report(5, "VaR = TVaR = RVaR worst case", ok, &format!("max deviation {worst:.2e}"));
    ok
}

fn criterion_6_limits() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut general_ok = true;
    let mut dev_alpha: f64 = 0.0;
    let mut dev_one: f64 = 0.0;
    for _ in 0..100 {
        let alpha: f64 = rng.gen_range(0.3..0.99);
        let r = bounds::remark_limits_check(alpha, (1.0 + alpha) / 2.0).unwrap();
        dev_alpha = dev_alpha.max((r.rvar_near_alpha - r.var_best).abs());
        dev_one = dev_one.max((r.rvar_near_one - 0.0).abs().max((r.rvar_near_one - r.tvar_best).abs()));
        general_ok &= (r.rvar_near_alpha - r.var_best).abs() <= 1e-5
            && (r.rvar_near_one - 0.0).abs() <= 1e-4
            && (r.rvar_near_one - r.tvar_best).abs() <= 1e-4;
    }

    // symmetric worst case at (0.2, 0.4) compared with the mean
    let spec = MomentSpec::symmetric(0.0, 1.0).unwrap();
    let mut max_excess: f64 = 0.0;
    let mut at = (0.0, 0.0);
    for _ in 0..100 {
        let h2: f64 = rng.gen_range(0.0..1.0);
        let h1: f64 = rng.gen_range(0.0..=h2);
        let p = GlueVaRParams::new(0.2, 0.4, h1, h2).unwrap();
        let r = gluevar_bound(&p, &spec, Direction::Worst).unwrap();
        if (r.value - spec.mu).abs() > max_excess {
            max_excess = (r.value - spec.mu).abs();
            at = (h1, h2);
        }
    }
    let symmetric_ok = max_excess <= 1e-12;
    let ok = general_ok && symmetric_ok;
    report(
        6,
        "limits",
        ok,
        &format!(
            "RVaR->VaR dev {dev_alpha:.2e}, RVaR->TVaR dev {dev_one:.2e}; symmetric sup - mu up to {max_excess:.5} at (h1, h2) = ({:.3}, {:.3})",
            at.0, at.1
        ),
    );
    ok
}

fn random_discrete(rng: &mut ChaCha8Rng) -> StepQuantile {
    let atoms = rng.gen_range(1..12);
    let class = if rng.gen_bool(0.5) { DistClass::General } else { DistClass::Symmetric };
    if atoms == 1 {
        return StepQuantile::degenerate(rng.gen_range(-3.0..3.0));
    }
    let spec = random_spec(rng, class);
    sample_feasible(&spec, atoms, rng.gen()).unwrap()
}

fn criterion_7_mixture_identity() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let dists: Vec<StepQuantile> = (0..1_000).map(|_| random_discrete(&mut rng)).collect();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let alpha: f64 = rng.gen_range(0.01..0.98);
        let beta: f64 = rng.gen_range(alpha + 0.005..1.0);
        let h2: f64 = rng.gen_range(0.0..1.0);
        let h1: f64 = rng.gen_range(0.0..=h2);
        let p = GlueVaRParams::new(alpha, beta, h1, h2).unwrap();
        let d = p.distortion();
        for q in &dists {
            let (_, var) = moments(q);
            let direct = choquet_eval(&d, q);
            let mix = gluevar_mixture_eval(&p, q).unwrap();
            worst = worst.max(relative_error(direct, mix, var.max(0.0).sqrt()));
        }
    }
    let ok = worst <= 1e-10;
    report(7, "mixture identity", ok, &format!("max rel err {worst:.2e}"));
    ok
}

fn criterion_8_falsification_sweep() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut violations = 0;
    let mut closest: f64 = f64::INFINITY;
    for i in 0..10_000 {
        let class = classes()[i % 2];
        let spec = random_spec(&mut rng, class);
        let p = random_params(&mut rng);
        let q = sample_feasible(&spec, rng.gen_range(2..10), rng.gen()).unwrap();
        let v = choquet_eval(&p.distortion(), &q);
        let hi = any_bound(&p, &spec, Direction::Worst).value;
        let lo = any_bound(&p, &spec, Direction::Best).value;
        let tol = 1e-10 * spec.sigma.max(spec.mu.abs()).max(1.0);
        closest = closest.min(hi - v).min(v - lo);
        if v > hi + tol || v < lo - tol {
            violations += 1;
            eprintln!("{p:?} {spec:?}: value {v} outside [{lo}, {hi}]");
        }
    }
    let ok = violations == 0;
    report(8, "falsification sweep", ok, &format!("{violations} violations, closest gap {closest:.2e}"));
    ok
}

/// Random nondecreasing piecewise-linear distortion with occasional jumps.
fn random_distortion(rng: &mut ChaCha8Rng) -> Distortion {
    let k = rng.gen_range(0..6);
    let mut xs: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..0.99)).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    let mut vals: Vec<f64> = (0..2 * xs.len()).map(|_| rng.gen_range(0.0..1.0)).collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut pts = vec![(0.0, 0.0)];
    for (i, &x) in xs.iter().enumerate() {
        pts.push((x, vals[2 * i]));
        if rng.gen_bool(0.4) {
            pts.push((x, vals[2 * i + 1]));
        }
    }
    pts.push((1.0, 1.0));
    let side = if rng.gen_bool(0.5) { Side::Left } else { Side::Right };
    Distortion::from_breakpoints(&pts, side).unwrap()
}

fn criterion_9_envelopes() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut bad = 0;
    for _ in 0..1_000 {
        let d = if rng.gen_bool(0.5) {
            random_distortion(&mut rng)
        } else {
            random_params(&mut rng).distortion()
        };
        let lo = d.convex_envelope();
        let hi = d.concave_envelope();
        let mut ok = d.dual().dual() == d;
        for i in 0..=1_000 {
            let x = Level::from_ratio(i, 1_000);
            for side in [Side::Left, Side::Right] {
                let (a, b, c) = (lo.eval_level(x, side), d.eval_level(x, side), hi.eval_level(x, side));
                ok &= a <= b + 1e-12 && b <= c + 1e-12;
            }
        }
        let slope = lo.right_derivative().unwrap();
        ok &= slope.is_nondecreasing();
        if !ok {
            bad += 1;
            eprintln!("{d}");
        }
    }
    let ok = bad == 0;
    report(9, "envelope properties", ok, &format!("{bad} of 1000 distortions failed"));
    ok
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> bool); 9] = [
        (1, criterion_1_closed_form_matches_generic),
        (2, criterion_2_oracle_convergence),
        (3, criterion_3_witness_attainment),
        (4, criterion_4_worked_values),
        (5, criterion_5_var_tvar_rvar_coincide),
        (6, criterion_6_limits),
        (7, criterion_7_mixture_identity),
        (8, criterion_8_falsification_sweep),
        (9, criterion_9_envelopes),
    ];
    let mut failed = 0;
    for (id, run) in criteria {
        let ok = std::panic::catch_unwind(run).unwrap_or_else(|_| {
            report(id, "panicked", false, "");
            false
        });
        if !ok {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
