//! Subcommand dispatch. Every certificate or counterexample is checked again
//! through the owning module's verification routine before it earns exit 0
//! or 1; a result that fails its recheck is reported as inconclusive.

use quadcert_core::basis::rank_and_basis;
use quadcert_core::hqpb::{self, FrontendSolution, Recovery};
use quadcert_core::linalg::{dot, norm};
use quadcert_core::pdcomb::{find_pd_combination, PdOutcome};
use quadcert_core::{
    eig_sym, jnr, quad_form, restrict, slemma, soc, yuan, Error, KktPointData, MatrixSet, SLemmaOutcome, SocOutcome,
    SubspaceCone, SymMatrix, Tolerances, YuanOutcome,
};

use crate::document::{
    Document, GtrsPayload, HqpbPayload, JnrPayload, Kind, MatricesPayload, SlemmaPayload, SocPayload, TrtlsPayload,
};
use crate::output::{Exit, Report, Table};

/// Resolved run parameters: document values overridden by flags.
#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub tol: Tolerances,
    pub seed: u64,
    pub max_iter: usize,
}

pub fn execute(kind: Kind, doc: &Document, settings: &Settings) -> Report {
    let result = match kind {
        Kind::Basis => run_basis(doc, settings),
        Kind::Pdcomb => run_pdcomb(doc, settings),
        Kind::Yuan => run_yuan(doc, settings),
        Kind::Slemma => run_slemma(doc, settings),
        Kind::Hqpb => run_hqpb(doc, settings),
        Kind::Gtrs => run_gtrs(doc, settings),
        Kind::Trtls => run_trtls(doc, settings),
        Kind::Soc => run_soc(doc, settings),
        Kind::Jnr => run_jnr(doc, settings),
    };
    result.unwrap_or_else(|failure| failure.into_report())
}

/// Failure raised before a result exists.
#[derive(Debug)]
pub enum Failure {
    Payload(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    pub fn into_report(self) -> Report {
        match self {
            Failure::Payload(msg) => Report::error("inputError", Exit::Input, msg),
            Failure::Core(e) => error_report(&e),
        }
    }
}

pub fn error_report(e: &Error) -> Report {
    let (outcome, exit) = match e {
        Error::Asymmetry { .. }
        | Error::DimensionMismatch { .. }
        | Error::NonFinite(_)
        | Error::InvalidInput(_)
        | Error::VertexInvalid { .. } => ("inputError", Exit::Input),
        Error::Hypothesis(_) => ("hypothesisViolation", Exit::Precondition),
        Error::Slater(_) => ("slaterViolation", Exit::Precondition),
        Error::ConeTooSmall { .. } => ("coneTooSmall", Exit::Precondition),
        Error::Unbounded { .. } => ("unbounded", Exit::Inconclusive),
        Error::EmptySpectrahedron { .. } => ("emptySpectrahedron", Exit::Inconclusive),
        Error::Convergence { .. } => ("convergenceFailure", Exit::Inconclusive),
        Error::RecoveryFailed(_) => ("recoveryFailed", Exit::Inconclusive),
        Error::DegenerateRecovery { .. } => ("degenerateRecovery", Exit::Inconclusive),
    };
    let report = Report::error(outcome, exit, e.to_string());
    match e {
        Error::RecoveryFailed(f) => report.witness(f.as_ref()),
        _ => report,
    }
}

type Outcome = Result<Report, Failure>;

fn payload<T: serde::de::DeserializeOwned>(doc: &Document) -> Result<T, Failure> {
    doc.payload().map_err(Failure::Payload)
}

fn cone_from(n: usize, spanning: Option<&[Vec<f64>]>, tol: &Tolerances) -> Result<Option<SubspaceCone>, Failure> {
    spanning
        .map(|v| SubspaceCone::from_spanning(n, v, tol.tol_rank).map_err(Failure::from))
        .transpose()
}

/// Verified results keep their exit code; failed rechecks demote to
/// inconclusive with the reason attached.
fn checked(report: Report, passed: bool, what: &str) -> Report {
    if passed {
        report
    } else {
        let mut r = report.diagnostic("verificationFailed", what);
        r.exit = Some(Exit::Inconclusive);
        r
    }
}

fn run_basis(doc: &Document, s: &Settings) -> Outcome {
    let p: MatricesPayload = payload(doc)?;
    let set = MatrixSet::new(p.matrices)?;
    let result = rank_and_basis(&set, &s.tol);
    let residual = result.reconstruction_residual(&set);
    let scale = Tolerances::scale(set.members());
    let report = Report::new("basis", Exit::Verified)
        .residual("reconstruction", residual)
        .diagnostic("marginal", result.marginal)
        .certificate(&result);
    Ok(checked(report, residual <= 1e3 * s.tol.tol_rank * scale, "reconstruction residual"))
}

fn pd_report(set: &MatrixSet, cone: Option<&SubspaceCone>, s: &Settings) -> Outcome {
    let search = find_pd_combination(set, cone, &s.tol, s.max_iter, s.seed)?;
    let base = |outcome: &str, exit| {
        Report::new(outcome, exit)
            .diagnostic("iterations", search.iterations)
            .diagnostic("budgetExhausted", search.budget_exhausted)
    };
    Ok(match &search.outcome {
        PdOutcome::Found(c) => {
            let combo = SymMatrix::combination(set.order(), &c.s, set.members())?;
            let combo = match cone {
                Some(k) => restrict(&combo, k)?,
                None => combo,
            };
            let recheck = eig_sym(&combo)?.min_value();
            let report = base("found", Exit::Verified)
                .certificate(c)
                .residual("recheckMinEig", recheck)
                .residual("coefficientNorm", norm(&c.s));
            checked(report, recheck > 0.0, "combination is not positive definite")
        }
        PdOutcome::NotFound { best_value, best_point } => base("notFound", Exit::Inconclusive)
            .diagnostic("bestValue", best_value)
            .diagnostic("bestPoint", best_point),
    })
}

fn run_pdcomb(doc: &Document, s: &Settings) -> Outcome {
    let p: MatricesPayload = payload(doc)?;
    let set = MatrixSet::new(p.matrices)?;
    let cone = cone_from(set.order(), p.cone.as_deref(), &s.tol)?;
    pd_report(&set, cone.as_ref(), s)
}

fn yuan_report(set: &MatrixSet, cone: &SubspaceCone, outcome: YuanOutcome, s: &Settings) -> Outcome {
    Ok(match outcome {
        YuanOutcome::Certificate {
            weights,
            min_eig_restricted,
        } => {
            let ok = yuan::verify_certificate(set, cone, &weights, &s.tol)?;
            let report = Report::new("certificate", Exit::Verified)
                .residual("restrictedMinEig", min_eig_restricted)
                .residual("simplexDefect", (weights.t.iter().sum::<f64>() - 1.0).abs())
                .certificate(&weights);
            checked(report, ok, "certificate recheck")
        }
        YuanOutcome::Falsifier { x, values } => {
            let ok = yuan::verify_falsifier(set, cone, &x, &s.tol);
            let report = Report::new("falsifier", Exit::Refuted)
                .residual("maxValue", values.iter().copied().fold(f64::NEG_INFINITY, f64::max))
                .residual("coneDistance", cone.distance(&x))
                .witness(serde_json::json!({ "x": x, "values": values }));
            checked(report, ok, "falsifier recheck")
        }
        YuanOutcome::Inconclusive {
            best_cert_value,
            best_falsifier_max,
        } => Report::new("inconclusive", Exit::Inconclusive)
            .diagnostic("bestCertValue", best_cert_value)
            .diagnostic("bestFalsifierMax", best_falsifier_max),
    })
}

fn run_yuan(doc: &Document, s: &Settings) -> Outcome {
    let p: MatricesPayload = payload(doc)?;
    let set = MatrixSet::new(p.matrices)?;
    let cone = cone_from(set.order(), p.cone.as_deref(), &s.tol)?.unwrap_or_else(|| SubspaceCone::full(set.order()));
    let outcome = yuan::yuan_certificate(&set, &cone, &s.tol, s.seed)?;
    Ok(yuan_report(&set, &cone, outcome, s)?.diagnostic("coneDim", cone.dim()))
}

fn run_slemma(doc: &Document, s: &Settings) -> Outcome {
    let instance: SlemmaPayload = payload(doc)?;
    Ok(match slemma::slemma_certificate(&instance, &s.tol, s.seed)? {
        SLemmaOutcome::Certificate(cert) => {
            let v = slemma::verify_certificate(&instance, &cert, &s.tol, s.seed)?;
            let report = Report::new("certificate", Exit::Verified)
                .residual("psdMinEig", v.psd_min_eig)
                .residual("scalarSlack", v.scalar_slack)
                .diagnostic("samplesChecked", v.samples_checked)
                .diagnostic("sampleFailures", v.sample_failures)
                .certificate(&cert);
            checked(report, v.pass, "certificate recheck")
        }
        SLemmaOutcome::Counterexample { x, values } => {
            let ok = instance.is_counterexample(&x, &s.tol);
            let report = Report::new("counterexample", Exit::Refuted)
                .residual("violation", instance.violation(&x))
                .witness(serde_json::json!({ "x": x, "values": values }));
            checked(report, ok, "counterexample recheck")
        }
        SLemmaOutcome::Inconclusive {
            best_phi,
            box_radius,
            best_counterexample_gap,
        } => Report::new("inconclusive", Exit::Inconclusive)
            .diagnostic("bestPhi", best_phi)
            .diagnostic("boxRadius", box_radius)
            .diagnostic("bestCounterexampleGap", best_counterexample_gap),
    })
}

fn run_hqpb(doc: &Document, s: &Settings) -> Outcome {
    let instance: HqpbPayload = payload(doc)?;
    let (dual, recovery) = hqpb::solve(&instance, &s.tol, s.seed)?;
    let pencil_min = eig_sym(&instance.pencil(dual.gamma))?.min_value();
    let psd_ok = pencil_min >= -s.tol.tol_psd * instance.scale();
    Ok(match recovery {
        Recovery::Recovered(p) => {
            let feasible = instance.is_feasible(&p.x, &s.tol);
            let gap_ok = p.gap.abs() <= s.tol.tol_gap * (1.0 + dual.dual_value.abs());
            let report = Report::new("solution", Exit::Verified)
                .residual("gap", p.gap)
                .residual("violation", instance.violation(&p.x))
                .residual("pencilMinEig", pencil_min)
                .diagnostic("cuts", dual.cuts)
                .diagnostic("nullDim", p.null_dim)
                .certificate(&dual)
                .witness(&p);
            checked(report, feasible && gap_ok && psd_ok, "primal-dual recheck")
        }
        Recovery::Failed(f) => Report::new("recoveryFailed", Exit::Inconclusive)
            .residual("pencilMinEig", pencil_min)
            .diagnostic("cuts", dual.cuts)
            .certificate(&dual)
            .witness(&f),
    })
}

fn frontend_report(sol: FrontendSolution, violation: f64, value_error: f64, s: &Settings) -> Report {
    let gap_ok = sol.gap.abs() <= s.tol.tol_gap * (1.0 + sol.dual.dual_value.abs());
    let scale = 1.0 + sol.value.abs();
    let report = Report::new("solution", Exit::Verified)
        .residual("gap", sol.gap)
        .residual("violation", violation)
        .residual("valueError", value_error)
        .diagnostic("cuts", sol.dual.cuts)
        .certificate(&sol.dual)
        .witness(serde_json::json!({ "x": sol.x, "value": sol.value, "lifted": sol.lifted }));
    checked(
        report,
        violation <= s.tol.tol_feas && gap_ok && value_error <= 1e-9 * scale,
        "solution recheck",
    )
}

fn interval_violation(v: f64, lower: f64, upper: f64) -> f64 {
    let scale = 1.0 + lower.abs().max(upper.abs());
    (lower - v).max(v - upper).max(0.0) / scale
}

fn run_gtrs(doc: &Document, s: &Settings) -> Outcome {
    let p: GtrsPayload = payload(doc)?;
    let sol = hqpb::gtrs_solve(&p.a0, &p.lin0, &p.a1, &p.lin1, p.lower, p.upper, &s.tol, s.seed)?;
    let c = quad_form(&p.a1, &sol.x)? + 2.0 * dot(&p.lin1, &sol.x);
    let value = quad_form(&p.a0, &sol.x)? + 2.0 * dot(&p.lin0, &sol.x);
    let violation = interval_violation(c, p.lower, p.upper);
    let err = (value - sol.value).abs();
    Ok(frontend_report(sol, violation, err, s))
}

fn run_trtls(doc: &Document, s: &Settings) -> Outcome {
    let p: TrtlsPayload = payload(doc)?;
    let sol = hqpb::trtls_solve(&p.a, &p.b, p.lower, p.upper, &s.tol, s.seed)?;
    let violation = interval_violation(dot(&sol.x, &sol.x), p.lower, p.upper);
    let err = (hqpb::trtls_objective(&p.a, &p.b, &sol.x) - sol.value).abs();
    Ok(frontend_report(sol, violation, err, s))
}

fn run_soc(doc: &Document, s: &Settings) -> Outcome {
    let p: SocPayload = payload(doc)?;
    let data = KktPointData {
        n: p.n,
        p: p.p,
        grad_f: p.grad_f,
        grad_g_active: p.grad_g_active,
        grad_h: p.grad_h,
        hessians: p.hessians,
        vertices: p.vertices,
    };
    data.validate()?;
    let cone = match cone_from(data.n, p.cone.as_deref(), &s.tol)? {
        Some(k) => k,
        None => soc::critical_lineality(&data, &s.tol)?,
    };
    let mfcq = soc::mfcq_check(&data, &s.tol)?;
    let outcome = soc::soc_certificate(&data, Some(&cone), &s.tol, s.seed)?;
    let set = MatrixSet::new(data.hessians.clone())?;
    let report = match outcome {
        SocOutcome::Certificate(cert) => {
            let ok = yuan::verify_certificate(&set, &cone, &cert.weights, &s.tol)?;
            let report = Report::new("certificate", Exit::Verified)
                .residual("restrictedMinEig", cert.restricted_min_eig)
                .certificate(&cert);
            checked(report, ok, "certificate recheck")
        }
        SocOutcome::Falsifier { v, values } => {
            let ok = yuan::verify_falsifier(&set, &cone, &v, &s.tol);
            let report = Report::new("falsifier", Exit::Refuted)
                .residual("maxValue", values.iter().copied().fold(f64::NEG_INFINITY, f64::max))
                .witness(serde_json::json!({ "v": v, "values": values }));
            checked(report, ok, "falsifier recheck")
        }
        SocOutcome::Inconclusive {
            best_cert_value,
            best_falsifier_max,
        } => Report::new("inconclusive", Exit::Inconclusive)
            .diagnostic("bestCertValue", best_cert_value)
            .diagnostic("bestFalsifierMax", best_falsifier_max),
    };
    Ok(report.diagnostic("mfcq", &mfcq).diagnostic("coneDim", cone.dim()))
}

fn run_jnr(doc: &Document, s: &Settings) -> Outcome {
    let probe: JnrPayload = payload(doc)?;
    match probe {
        JnrPayload::Sample { matrices, count } => {
            let set = MatrixSet::new(matrices)?;
            let cloud = jnr::sample_range(&set, count, s.seed)?;
            let deviation = cloud.recompute_deviation(&set);
            let (m, n) = (set.len(), set.order());
            let header = (1..=m)
                .map(|j| format!("p{j}"))
                .chain((1..=n).map(|i| format!("x{i}")))
                .collect();
            let rows = cloud
                .points
                .iter()
                .zip(&cloud.preimages)
                .map(|(p, x)| p.iter().chain(x).copied().collect())
                .collect();
            let scale = Tolerances::scale(set.members());
            let report = Report::new("pointCloud", Exit::Verified)
                .residual("recomputeDeviation", deviation)
                .diagnostic("points", cloud.points.len())
                .certificate(&cloud)
                .table(Table { header, rows });
            Ok(checked(report, deviation <= 1e-12 * scale, "image recomputation"))
        }
        JnrPayload::Membership {
            matrices,
            target,
            starts,
            norm_cap,
        } => {
            let set = MatrixSet::new(matrices)?;
            let r = jnr::membership_test(&set, &target, &s.tol, starts, s.seed, norm_cap)?;
            let recheck = residual_of(&set, &r.argmin, &target)?;
            let report = if r.member {
                let report = Report::new("member", Exit::Verified).witness(&r);
                checked(report, recheck <= s.tol.tol_feas * (1.0 + norm(&target)), "image recomputation")
            } else {
                Report::new("notFound", Exit::Inconclusive).diagnostic("closest", &r)
            };
            Ok(report.residual("residual", recheck))
        }
        JnrPayload::Convexity { matrices, pairs } => {
            let set = MatrixSet::new(matrices)?;
            let r = jnr::convexity_probe(&set, pairs, &s.tol, s.seed)?;
            let (outcome, exit) = if r.failures.is_empty() {
                ("noFailures", Exit::Verified)
            } else {
                ("failures", Exit::Inconclusive)
            };
            Ok(Report::new(outcome, exit)
                .residual("maxResidual", r.max_residual)
                .diagnostic("guaranteed", r.guaranteed)
                .diagnostic("rank", r.rank)
                .diagnostic("probes", r.probes)
                .diagnostic("failures", &r.failures))
        }
        JnrPayload::Acuteness { matrices } => {
            let set = MatrixSet::new(matrices)?;
            Ok(match jnr::acuteness_probe(&set, &s.tol, s.seed)? {
                Some(w) => {
                    let minus: Vec<f64> = w.p.iter().map(|v| -v).collect();
                    let plus = residual_of(&set, &w.x_plus, &w.p)?;
                    let neg = residual_of(&set, &w.x_minus, &minus)?;
                    let report = Report::new("notAcute", Exit::Refuted)
                        .residual("residualPlus", plus)
                        .residual("residualMinus", neg)
                        .witness(&w);
                    let unit = (norm(&w.p) - 1.0).abs() <= 1e-9;
                    checked(report, unit && plus.max(neg) <= s.tol.tol_feas, "witness recheck")
                }
                None => Report::new("noWitness", Exit::Inconclusive),
            })
        }
        JnrPayload::ClosureDemo { samples } => {
            let r = jnr::closure_gap_demo(samples, s.seed);
            let worst = r
                .rows
                .iter()
                .flat_map(|row| row.image.iter().zip(&row.expected).map(|(a, b)| (a - b).abs() / b.abs()))
                .fold(0.0, f64::max);
            let rows = r
                .rows
                .iter()
                .map(|row| vec![row.k, row.image[0], row.image[1], row.expected[0], row.expected[1]])
                .collect();
            let header = ["k", "image1", "image2", "expected1", "expected2"].map(String::from).to_vec();
            let report = Report::new("closureTable", Exit::Verified)
                .residual("maxRelativeError", worst)
                .residual("identityMaxDeviation", r.identity_max_deviation)
                .certificate(&r)
                .table(Table { header, rows });
            Ok(checked(
                report,
                worst <= 1e-9 && r.identity_max_deviation <= 1e-10,
                "closure table recheck",
            ))
        }
        JnrPayload::Lift { b1, b2 } => {
            let set = jnr::dines_lift(&b1, &b2)?;
            Ok(pd_report(&set, None, s)?.diagnostic("liftedOrder", set.order()))
        }
    }
}

fn residual_of(set: &MatrixSet, x: &[f64], target: &[f64]) -> Result<f64, Failure> {
    let image = jnr::image(set, x)?;
    Ok(image.iter().zip(target).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
}

/// CSV is offered only for the tabular jnr results.
pub fn csv_capable(doc: &Document) -> bool {
    doc.kind == Kind::Jnr
        && matches!(
            doc.payload.get("probe").and_then(|v| v.as_str()),
            Some("sample") | Some("closureDemo")
        )
}
