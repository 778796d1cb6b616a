//! Acceptance gate. Each test checks one criterion at its stated tolerance and
//! prints a single `PASS`/`FAIL` line with the measured numbers and runtime.
//!
//! Run with `cargo test -p quadcert-core --test acceptance -- --nocapture`.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use quadcert_core::basis::MatrixSet;
use quadcert_core::hqpb::{self, gtrs_solve, trtls_objective, trtls_solve, Recovery};
use quadcert_core::jnr::{self, closure_limit_image, CLOSURE_KS};
use quadcert_core::linalg::{eig_sym, quad_form, SubspaceCone, SymMatrix};
use quadcert_core::pdcomb::{find_pd_combination, PdOutcome, DEFAULT_MAX_ITER};
use quadcert_core::random::{
    random_cone, random_grid, random_hqpb, random_rank3_set, random_slemma, random_symmetric,
};
use quadcert_core::slemma::{self, SLemmaCertificate, SLemmaInstance, SLemmaOutcome, Variant};
use quadcert_core::soc::{self, KktPointData, SocOutcome, Vertex};
use quadcert_core::yuan::{self, YuanOutcome};
use quadcert_core::{Error, HqpbInstance, SeedStream, Tolerances};
use rand::Rng;

fn report(id: u32, title: &str, pass: bool, elapsed: Duration, limit: Option<Duration>, detail: String) {
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let verdict = if pass && in_time { "PASS" } else { "FAIL" };
    let budget = limit.map(|l| format!(" / limit {:.0}s", l.as_secs_f64())).unwrap_or_default();
    println!(
        "criterion {id:>2} [{verdict}] {title}: {detail} ({:.2}s{budget})",
        elapsed.as_secs_f64()
    );
    assert!(pass, "criterion {id} failed: {detail}");
    assert!(in_time, "criterion {id} exceeded its runtime limit");
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn criterion_01_non_acute_pair() {
    let start = Instant::now();
    let tol = Tolerances::default();
    let set = jnr::non_acute_pair();
    let witness = jnr::acuteness_probe(&set, &tol, 0).unwrap();
    let mut detail = String::new();
    let mut pass = false;
    if let Some(w) = &witness {
        let plus = jnr::image(&set, &w.x_plus).unwrap();
        let minus = jnr::image(&set, &w.x_minus).unwrap();
        let neg_p: Vec<f64> = w.p.iter().map(|v| -v).collect();
        let r_plus = norm(&plus.iter().zip(&w.p).map(|(a, b)| a - b).collect::<Vec<_>>());
        let r_minus = norm(&minus.iter().zip(&neg_p).map(|(a, b)| a - b).collect::<Vec<_>>());
        pass = r_plus <= 1e-7 && r_minus <= 1e-7 && (norm(&w.p) - 1.0).abs() < 1e-12;
        detail = format!("witness p={:?}, residuals {r_plus:.1e}/{r_minus:.1e}", w.p);
    } else {
        detail.push_str("no witness found");
    }
    let convex = jnr::convexity_probe(&set, 50, &tol, 0).unwrap();
    pass &= convex.failures.is_empty();
    detail += &format!(
        "; convexity {} probes, {} failures, max residual {:.1e}",
        convex.probes,
        convex.failures.len(),
        convex.max_residual
    );
    report(1, "non-acute pair", pass, start.elapsed(), secs(5), detail);
}

fn criterion_02_non_closed_pair() {
    let start = Instant::now();
    let set = jnr::non_closed_pair();
    let mut worst_rel: f64 = 0.0;
    for k in CLOSURE_KS {
        // independent closed form from the sequence definition
        let x = [(k + 1.0 / k) / 2f64.sqrt(), k / 2f64.sqrt(), 0.0];
        let im = jnr::image(&set, &x).unwrap();
        let expected = [1.0 + 1.0 / (2.0 * k * k), 1.0 + 1.0 / (k * k)];
        assert_eq!(closure_limit_image(k), expected);
        for j in 0..2 {
            worst_rel = worst_rel.max((im[j] - expected[j]).abs() / expected[j]);
        }
    }
    let demo = jnr::closure_gap_demo(10_000, 0);
    for row in &demo.rows {
        for j in 0..2 {
            worst_rel = worst_rel.max((row.image[j] - row.expected[j]).abs() / row.expected[j]);
        }
    }
    let b1 = set.get(0);
    let b2 = set.get(1);
    let mut rng = SeedStream::new(2).rng();
    let mut identity_dev: f64 = 0.0;
    for _ in 0..10_000 {
        let x: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
        let lhs = quad_form(b2, &x).unwrap() - quad_form(b1, &x).unwrap();
        identity_dev = identity_dev.max((lhs - (x[0] - x[1]).powi(2)).abs());
    }
    let diff = b2.sub(b1).unwrap();
    let exact = diff.to_rows() == vec![vec![1.0, -1.0, 0.0], vec![-1.0, 1.0, 0.0], vec![0.0, 0.0, 0.0]];
    let pass = worst_rel <= 1e-9 && identity_dev <= 1e-10 && demo.identity_max_deviation <= 1e-10 && exact;
    let detail = format!(
        "max relative image error {worst_rel:.1e}, identity deviation {identity_dev:.1e} (demo {:.1e}), difference matrix exact: {exact}",
        demo.identity_max_deviation
    );
    report(2, "non-closed pair", pass, start.elapsed(), secs(5), detail);
}

fn criterion_03_lift_pipeline() {
    let start = Instant::now();
    let tol = Tolerances::default();
    let mut worst = f64::INFINITY;
    let mut found = 0;
    for trial in 0..100u64 {
        let mut rng = SeedStream::new(trial).split("lift").rng();
        let n = 1 + (trial as usize % 6);
        let lift = jnr::dines_lift(&random_symmetric(&mut rng, n), &random_symmetric(&mut rng, n)).unwrap();
        let rep = find_pd_combination(&lift, None, &tol, DEFAULT_MAX_ITER, trial).unwrap();
        if let PdOutcome::Found(c) = rep.outcome {
            found += 1;
            worst = worst.min(c.certified_min_eig);
        }
    }
    let pass = found == 100 && worst >= 1.0 - 1e-8;
    report(
        3,
        "lifted pair pd combination",
        pass,
        start.elapsed(),
        secs(30),
        format!("{found}/100 found, worst certified min eig {worst:.12}"),
    );
}

fn criterion_04_yuan_exclusivity() {
    let start = Instant::now();
    let tol = Tolerances::default();
    let (mut certs, mut falsifiers, mut inconclusive, mut both, mut unverified) = (0, 0, 0, 0, 0);
    for trial in 0..200u64 {
        let mut rng = SeedStream::new(trial).split("yuan-suite").rng();
        let n = rng.random_range(3..=8);
        let m = rng.random_range(1..=6);
        let set = random_rank3_set(&mut rng, n, m);
        let cone = if trial % 2 == 0 {
            SubspaceCone::full(n)
        } else {
            let k = rng.random_range(3..=n);
            random_cone(&mut rng, n, k)
        };
        match yuan::yuan_certificate(&set, &cone, &tol, trial).unwrap() {
            YuanOutcome::Certificate { weights, .. } => {
                if yuan::verify_certificate(&set, &cone, &weights, &tol).unwrap() {
                    certs += 1;
                } else {
                    unverified += 1;
                }
                if let Some(x) = yuan::falsifier_search(&set, &cone, &tol, trial ^ 0xabc).unwrap() {
                    if yuan::verify_falsifier(&set, &cone, &x, &tol) {
                        both += 1;
                    }
                }
            }
            YuanOutcome::Falsifier { x, .. } => {
                if yuan::verify_falsifier(&set, &cone, &x, &tol) {
                    falsifiers += 1;
                } else {
                    unverified += 1;
                }
            }
            YuanOutcome::Inconclusive { .. } => inconclusive += 1,
        }
    }
    let decided = certs + falsifiers;
    let pass = decided * 100 >= 95 * 200 && both == 0 && unverified == 0;
    report(
        4,
        "certificate/falsifier exclusivity",
        pass,
        start.elapsed(),
        secs(120),
        format!(
            "{certs} certificates, {falsifiers} falsifiers, {inconclusive} inconclusive, {unverified} unverified, {both} with both"
        ),
    );
}

fn desk(b0: SymMatrix, beta0: f64) -> SLemmaInstance {
    SLemmaInstance {
        objective: b0,
        objective_level: beta0,
        constraints: vec![SymMatrix::identity(3)],
        levels: vec![1.0],
        variant: Variant::Inequality,
        slater_point: None,
    }
}

fn criterion_05_slemma_soundness() {
    let start = Instant::now();
    let tol = Tolerances::default();
    let i3 = SymMatrix::identity(3);
    let mut notes = Vec::new();

    let free = desk(i3.clone(), 0.0);
    let a = slemma::slemma_certificate(&free, &tol, 0).unwrap();
    let ok_a = matches!(&a, SLemmaOutcome::Certificate(c) if c.t == vec![0.0]);
    notes.push(format!("unconditional: {}", if ok_a { "t=0" } else { "mismatch" }));

    let tight = desk(i3.scaled(-1.0), -1.0);
    let b = slemma::slemma_certificate(&tight, &tol, 0).unwrap();
    let ok_b = match &b {
        SLemmaOutcome::Certificate(c) => {
            let v = slemma::verify_certificate(&tight, c, &tol, 0).unwrap();
            (c.t[0] - 1.0).abs() <= 1e-7 && c.scalar_slack.abs() <= tol.tol_feas && v.pass
        }
        _ => false,
    };
    notes.push(format!("tight ball: {}", if ok_b { "t=1, zero slack" } else { "mismatch" }));

    let loose = desk(i3.scaled(-1.0), -0.5);
    let c = slemma::slemma_certificate(&loose, &tol, 0).unwrap();
    let ok_c = c
        == SLemmaOutcome::Counterexample {
            x: vec![1.0, 0.0, 0.0],
            values: vec![-1.0, 1.0],
        };
    notes.push(format!("unit sphere: {}", if ok_c { "counterexample e1" } else { "mismatch" }));

    let mut desk_certs: Vec<(SLemmaInstance, SLemmaCertificate)> = Vec::new();
    for (inst, out) in [(free, a), (tight, b)] {
        if let SLemmaOutcome::Certificate(c) = out {
            desk_certs.push((inst, c));
        }
    }
    let (mut certs, mut verified, mut samples) = (0, 0, usize::MAX);
    for trial in 0..40u64 {
        let mut rng = SeedStream::new(trial).split("slemma-suite").rng();
        let n = rng.random_range(3..=5);
        let m = rng.random_range(1..=2);
        let inst = random_slemma(&mut rng, n, m);
        if let Ok(SLemmaOutcome::Certificate(c)) = slemma::slemma_certificate(&inst, &tol, trial) {
            desk_certs.push((inst, c));
        }
    }
    for (i, (inst, c)) in desk_certs.iter().enumerate() {
        certs += 1;
        let v = slemma::verify_certificate(inst, c, &tol, i as u64).unwrap();
        samples = samples.min(v.samples_checked);
        if v.pass && v.samples_checked == slemma::VERIFY_SAMPLES {
            verified += 1;
        }
    }
    notes.push(format!("{verified}/{certs} certificates verified with ≥{samples} samples each"));
    let pass = ok_a && ok_b && ok_c && verified == certs;
    report(5, "implication certificates", pass, start.elapsed(), secs(60), notes.join("; "));
}

/// Exact minimum of `xᵀA₀x` along the ray through `d`, or `None` when the ray
/// misses the feasible set.
fn ray_minimum(inst: &HqpbInstance, d: &[f64]) -> Option<f64> {
    let q0 = quad_form(&inst.objective, d).unwrap();
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;
    for (m, [a, b]) in [(&inst.first, inst.first_bounds), (&inst.second, inst.second_bounds)] {
        let q = quad_form(m, d).unwrap();
        if q > 0.0 {
            lo = lo.max(a / q);
            hi = hi.min(b / q);
        } else if q < 0.0 {
            lo = lo.max(b / q);
            hi = hi.min(a / q);
        } else if a > 0.0 || b < 0.0 {
            return None;
        }
    }
    if lo > hi {
        return None;
    }
    if q0 >= 0.0 {
        Some(q0 * lo)
    } else if hi.is_finite() {
        Some(q0 * hi)
    } else {
        Some(f64::NEG_INFINITY)
    }
}

fn criterion_06_hqpb_duality() {
    let start = Instant::now();
    let tol = Tolerances::default();
    let example = HqpbInstance {
        objective: SymMatrix::from_diagonal(&[-1.0, 0.0, 0.0]),
        first: SymMatrix::identity(3),
        first_bounds: [1.0, 4.0],
        second: SymMatrix::from_diagonal(&[1.0, 1.0, 0.0]),
        second_bounds: [0.25, 1.0],
        slater_point: None,
    };
    let (dual, rec) = hqpb::solve(&example, &tol, 0).unwrap();
    let example_ok = (dual.dual_value + 1.0).abs() <= 1e-5
        && matches!(&rec, Recovery::Recovered(p) if p.gap.abs() <= 1e-5 && example.is_feasible(&p.x, &tol));

    let (mut recovered, mut weak_violations, mut gap_violations, mut errors) = (0, 0, 0, Vec::new());
    let mut worst_weak: f64 = 0.0;
    for trial in 0..100u64 {
        let mut rng = SeedStream::new(trial).split("hqpb-suite").rng();
        let n = rng.random_range(3..=6);
        let inst = random_hqpb(&mut rng, n);
        let scale = inst.scale();
        let (dual, rec) = match hqpb::solve(&inst, &tol, trial) {
            Ok(r) => r,
            Err(e) => {
                errors.push(format!("#{trial}: {e}"));
                continue;
            }
        };
        let mut srng = SeedStream::new(trial).split("hqpb-weak").rng();
        for _ in 0..2000 {
            let d: Vec<f64> = (0..n).map(|_| srng.random_range(-1.0..1.0)).collect();
            if let Some(v) = ray_minimum(&inst, &d) {
                let excess = dual.dual_value - v;
                worst_weak = worst_weak.max(excess / scale);
                if excess > 1e-7 * scale {
                    weak_violations += 1;
                }
            }
        }
        if let Recovery::Recovered(p) = rec {
            recovered += 1;
            if p.gap.abs() > 1e-5 * scale || !inst.is_feasible(&p.x, &tol) {
                gap_violations += 1;
            }
        }
    }
    let pass = example_ok && weak_violations == 0 && gap_violations == 0 && recovered >= 90 && errors.is_empty();
    report(
        6,
        "two-sided duality",
        pass,
        start.elapsed(),
        secs(300),
        format!(
            "example dual {:.8}; recovery {recovered}/100, weak-duality violations {weak_violations} (worst excess {worst_weak:.1e}·scale), gap violations {gap_violations}, errors {errors:?}",
            dual.dual_value
        ),
    );
}

fn criterion_07_brute_force_oracle() {
    let start = Instant::now();
    let tol = Tolerances::default();
    let (polar, azimuth) = (400, 400);
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for trial in 0..20u64 {
        let mut rng = SeedStream::new(trial).split("hqpb-grid").rng();
        let inst = random_hqpb(&mut rng, 3);
        let dual = match hqpb::dual_solve(&inst, &tol, trial) {
            Ok(d) => d,
            Err(e) => {
                failures.push(format!("#{trial}: {e}"));
                continue;
            }
        };
        let value = |theta: f64, phi: f64| {
            let d = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            ray_minimum(&inst, &d).unwrap_or(f64::INFINITY)
        };
        // the objective is even in x, so a hemisphere suffices
        let (dt, dp) = (PI / (2 * polar) as f64, 2.0 * PI / azimuth as f64);
        let mut cells: Vec<(f64, f64, f64)> = Vec::with_capacity(polar * azimuth);
        for i in 0..polar {
            for j in 0..azimuth {
                let (theta, phi) = (dt * (i as f64 + 0.5), dp * j as f64);
                cells.push((value(theta, phi), theta, phi));
            }
        }
        cells.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut grid_min = cells[0].0;
        // zoom into the best cells: the minimum often sits at a corner of a
        // thin feasible wedge that a uniform grid only approaches linearly
        for &(v0, t0, p0) in cells.iter().take(32).filter(|c| c.0.is_finite()) {
            let (mut best, mut tc, mut pc) = (v0, t0, p0);
            let (mut ht, mut hp) = (dt, dp);
            for _ in 0..10 {
                for a in -10..=10 {
                    for b in -10..=10 {
                        let (t, p) = (tc + ht * a as f64 / 10.0, pc + hp * b as f64 / 10.0);
                        let v = value(t, p);
                        if v < best {
                            (best, tc, pc) = (v, t, p);
                        }
                    }
                }
                ht /= 4.0;
                hp /= 4.0;
            }
            grid_min = grid_min.min(best);
        }
        let err = (grid_min - dual.dual_value).abs();
        worst = worst.max(err);
        if err > 1e-2 {
            failures.push(format!("#{trial}: grid {grid_min:.6} vs dual {:.6}", dual.dual_value));
        }
    }
    report(
        7,
        "sphere-grid oracle",
        failures.is_empty(),
        start.elapsed(),
        secs(300),
        format!(
            "20 instances, {} grid directions plus zoomed refinement, exact radial minimization, worst |grid − dual| {worst:.1e}; {failures:?}",
            polar * azimuth
        ),
    );
}

fn criterion_08_gtrs_closed_forms() {
    let start = Instant::now();
    let tol = Tolerances::default();
    let i2 = SymMatrix::identity(2);
    let zero = [0.0, 0.0];
    let cases = [
        ("shifted", i2.clone(), vec![-1.0, 0.0], -1.0),
        ("inner", i2.clone(), vec![0.0, 0.0], 1.0),
        ("outer", i2.scaled(-1.0), vec![0.0, 0.0], -4.0),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, a0, lin0, expected) in cases {
        let r = gtrs_solve(&a0, &lin0, &i2, &zero, 1.0, 4.0, &tol, 0).unwrap();
        let c = quad_form(&i2, &r.x).unwrap();
        let infeasible = (1.0 - c).max(c - 4.0).max(0.0);
        let ok = (r.value - expected).abs() <= 1e-5 && infeasible <= 1e-7;
        pass &= ok;
        notes.push(format!("{name} {:.8} (x violation {infeasible:.1e})", r.value));
    }
    report(8, "interval trust region", pass, start.elapsed(), None, notes.join(", "));
}

fn criterion_09_trtls_closed_forms() {
    let start = Instant::now();
    let tol = Tolerances::default();
    let a = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    let half = trtls_solve(&a, &[0.0, 0.0], 1.0, 4.0, &tol, 0).unwrap();
    let zero = trtls_solve(&a, &[0.0, 0.0], 0.0, 4.0, &tol, 0).unwrap();
    let b = [1.0, 0.0];
    let scanned = trtls_solve(&a, &b, 0.0, 4.0, &tol, 0).unwrap();
    let oracle = (0..=200_000)
        .map(|k| {
            let t = -2.0 + 4.0 * k as f64 / 200_000.0;
            trtls_objective(&a, &b, &[t, 0.0])
        })
        .fold(f64::INFINITY, f64::min);
    let pass = (half.value - 0.5).abs() <= 1e-5
        && zero.value.abs() <= 1e-5
        && (scanned.value - oracle).abs() <= 1e-4;
    report(
        9,
        "regularized total least squares",
        pass,
        start.elapsed(),
        None,
        format!(
            "values {:.8}, {:.2e}; scan oracle {oracle:.8} vs {:.8}",
            half.value, zero.value, scanned.value
        ),
    );
}

fn unit(n: usize, i: usize, s: f64) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = s;
    v
}

fn kkt(n: usize, grad_g: Vec<Vec<f64>>, grad_h: Vec<Vec<f64>>, hessians: Vec<SymMatrix>, lambdas: Vec<Vec<f64>>) -> KktPointData {
    let q = grad_h.len();
    KktPointData {
        n,
        p: lambdas.first().map(Vec::len).unwrap_or(grad_g.len()),
        grad_f: vec![0.0; n],
        grad_g_active: grad_g,
        grad_h,
        vertices: lambdas.into_iter().map(|lambda| Vertex { lambda, mu: vec![0.0; q] }).collect(),
        hessians,
    }
}

fn criterion_10_soc_pipeline() {
    let start = Instant::now();
    let tol = Tolerances::default();
    let balanced = kkt(
        3,
        vec![],
        vec![],
        vec![
            SymMatrix::from_diagonal(&[1.0, -1.0, 0.0]),
            SymMatrix::from_diagonal(&[-1.0, 1.0, 0.0]),
        ],
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
    );
    let cert_ok = match soc::soc_certificate(&balanced, None, &tol, 0).unwrap() {
        SocOutcome::Certificate(c) => {
            max_abs_diff(&c.weights.t, &[0.5, 0.5]) <= 1e-6 && max_abs_diff(&c.lambda, &[0.5, 0.5]) <= 1e-6
        }
        _ => false,
    };

    let id = vec![SymMatrix::identity(2)];
    let one = vec![vec![0.0]];
    let single = kkt(2, vec![unit(2, 0, 1.0)], vec![], id.clone(), one.clone());
    let dependent = kkt(2, vec![], vec![unit(2, 0, 1.0), unit(2, 0, 2.0)], id.clone(), vec![vec![]]);
    let opposed = kkt(2, vec![unit(2, 0, 1.0), unit(2, 0, -1.0)], vec![], id, vec![vec![0.0, 0.0]]);
    let mfcq = [
        soc::mfcq_check(&single, &tol).unwrap().holds,
        soc::mfcq_check(&dependent, &tol).unwrap().holds,
        soc::mfcq_check(&opposed, &tol).unwrap().holds,
    ];
    let mfcq_ok = mfcq == [true, false, false];

    let mut gate_passes = 0;
    for trial in 0..100u64 {
        let mut rng = SeedStream::new(trial).split("soc-rank2").rng();
        let n = rng.random_range(3..=7);
        let m = rng.random_range(1..=5);
        let gens = MatrixSet::new(vec![random_symmetric(&mut rng, n), random_symmetric(&mut rng, n)]).unwrap();
        let hessians = quadcert_core::basis::generate(&random_grid(&mut rng, m, 2), &gens)
            .unwrap()
            .into_members();
        let lambdas = (0..m).map(|i| vec![i as f64 + 1.0]).collect();
        let data = kkt(n, vec![], vec![], hessians, lambdas);
        match soc::soc_certificate(&data, None, &tol, trial) {
            Err(Error::Hypothesis(_)) => {}
            Ok(_) => gate_passes += 1,
            Err(e) => panic!("unexpected error {e}"),
        }
    }
    let pass = cert_ok && mfcq_ok && gate_passes == 100;
    report(
        10,
        "second-order pipeline",
        pass,
        start.elapsed(),
        None,
        format!("balanced certificate ok: {cert_ok}; mfcq {mfcq:?}; rank-2 gate {gate_passes}/100"),
    );
}

fn criterion_11_numerical_hygiene() {
    let start = Instant::now();
    let mut worst_eig: f64 = 0.0;
    for trial in 0..1000u64 {
        let mut rng = SeedStream::new(trial).split("eig-hygiene").rng();
        let n = 1 + (trial as usize % 20);
        let a = random_symmetric(&mut rng, n);
        let scale = Tolerances::scale([&a]);
        let e = eig_sym(&a).unwrap();
        worst_eig = worst_eig.max(e.reconstruction_residual(&a) / scale);
    }
    let mut worst_fd: f64 = 0.0;
    for trial in 0..100u64 {
        let mut rng = SeedStream::new(trial).split("fd-hygiene").rng();
        let n = rng.random_range(1..=6);
        let m = rng.random_range(1..=4);
        let set = MatrixSet::new((0..m).map(|_| random_symmetric(&mut rng, n)).collect()).unwrap();
        let target: Vec<f64> = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
        let (_, g) = jnr::membership_objective(&set, &target, &x).unwrap();
        let f = |y: &[f64]| -> f64 {
            set.members()
                .iter()
                .zip(&target)
                .map(|(b, t)| (quad_form(b, y).unwrap() - t).powi(2))
                .sum()
        };
        let h = 1e-5;
        let fd: Vec<f64> = (0..n)
            .map(|i| {
                let mut p = x.clone();
                let mut q = x.clone();
                p[i] += h;
                q[i] -= h;
                (f(&p) - f(&q)) / (2.0 * h)
            })
            .collect();
        let rel = norm(&fd.iter().zip(&g).map(|(a, b)| a - b).collect::<Vec<_>>()) / norm(&g).max(1e-12);
        worst_fd = worst_fd.max(rel);
    }
    let pass = worst_eig <= 1e-9 && worst_fd <= 1e-5;
    report(
        11,
        "numerical hygiene",
        pass,
        start.elapsed(),
        None,
        format!("worst eigen reconstruction {worst_eig:.1e}·scale, worst gradient mismatch {worst_fd:.1e} relative"),
    );
}

fn main() {
    let criteria: [fn(); 11] = [
        criterion_01_non_acute_pair,
        criterion_02_non_closed_pair,
        criterion_03_lift_pipeline,
        criterion_04_yuan_exclusivity,
        criterion_05_slemma_soundness,
        criterion_06_hqpb_duality,
        criterion_07_brute_force_oracle,
        criterion_08_gtrs_closed_forms,
        criterion_09_trtls_closed_forms,
        criterion_10_soc_pipeline,
        criterion_11_numerical_hygiene,
    ];
    std::panic::set_hook(Box::new(|info| eprintln!("{info}")));
    let failed = criteria
        .iter()
        .filter(|c| std::panic::catch_unwind(**c).is_err())
        .count();
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
