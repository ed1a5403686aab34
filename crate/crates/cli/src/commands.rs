use std::path::Path;

use gausscj::choi::{partial_trace_b, ChannelBlocks, ChoiMatrix, KrausSet};
use gausscj::ebreak::{ppt_min_eigenvalue, separable_choi, EbChannel, FinitePovm, PreparationEnsemble};
use gausscj::fock::{
    omega_numeric, ppt_probe_truncated, quad_operator, verify_partial_trace, DEFAULT_GUARD, MIN_TRUNCATION,
};
use gausscj::gaussian::{
    case1_exponent, case2_data, classify, noise_decomposition, one_mode_report, CjCase, ModeKind, OneModeChannel,
    OneModeReport,
};
use gausscj::matkernel::{identity, max_abs, max_diff, RealMatrix};
use gausscj::symplectic::{validate, GaussianChannelSpec};
use gausscj::{Error, Tolerances};

use crate::input::{self, ChannelSpec, FiniteData};
use crate::report::{Report, Section, Value};
use crate::CliError;

/// Pass/fail thresholds of the oracle checks in `verify`.
#[derive(Clone, Copy, Debug)]
pub struct OracleTolerances {
    /// Relative deviation of `λ_max(Ω)` from the closed-form norm.
    pub norm: f64,
    pub partial_trace: f64,
    pub lowest_eigenvalue: f64,
    /// Slack below zero accepted from the PPT probe on EB channels.
    pub ppt: f64,
}

impl Default for OracleTolerances {
    fn default() -> Self {
        Self { norm: 1e-3, partial_trace: 5e-3, lowest_eigenvalue: 1e-4, ppt: 1e-3 }
    }
}

pub fn tolerance_section(tol: &Tolerances, oracle: Option<&OracleTolerances>) -> Section {
    let mut s = Section::new("tolerances");
    s.put("hermitian", tol.hermitian)
        .put("psd", tol.psd)
        .put("trace", tol.trace)
        .put("rank", tol.rank)
        .put("rank_stability", tol.rank_stability)
        .put("kraus_drop", tol.kraus_drop)
        .put("pure_window", tol.pure_window)
        .put("lambda_floor", tol.lambda_floor)
        .put("unitary", tol.unitary)
        .put("symmetry", tol.symmetry);
    if let Some(o) = oracle {
        s.put("oracle_norm_rel", o.norm)
            .put("oracle_partial_trace", o.partial_trace)
            .put("oracle_lowest_eigenvalue", o.lowest_eigenvalue)
            .put("oracle_ppt", o.ppt);
    }
    s
}

fn invalid_gaussian(e: Error) -> CliError {
    match e {
        Error::InvalidChannel(msg) => CliError::Invalid(format!(
            "channel violates mu >= +-(i/2) Delta_K, Delta_K = Delta_B - K^T Delta_A K: {msg}"
        )),
        other => CliError::Lib(other),
    }
}

fn mode_labels(modes: &[ModeKind<f64>]) -> Vec<String> {
    modes
        .iter()
        .map(|m| match m {
            ModeKind::Mixed(_) => "mixed".to_owned(),
            ModeKind::Pure => "pure".to_owned(),
        })
        .collect()
}

/// `(k, m)` when `K = kI₂`, `μ = mI₂` with `k ≥ 0`.
fn as_one_mode(k: &RealMatrix<f64>, mu: &RealMatrix<f64>) -> Option<(f64, f64)> {
    if k.shape() != (2, 2) || mu.shape() != (2, 2) {
        return None;
    }
    let (kv, mv) = (k[(0, 0)], mu[(0, 0)]);
    let eps = 1e-12 * (1.0 + kv.abs() + mv.abs());
    let is_scalar = |a: &RealMatrix<f64>, v: f64| max_abs(&(a - RealMatrix::identity(2, 2).scale(v))) <= eps;
    (kv >= 0.0 && is_scalar(k, kv) && is_scalar(mu, mv)).then_some((kv, mv))
}

fn one_mode_section(rep: &OneModeReport<f64>) -> Section {
    let ch = rep.channel;
    let mut s = Section::new("one_mode");
    s.put("k", ch.k)
        .put("m", ch.m)
        .put("validity_threshold", ch.gap() / 2.0)
        .put("case", rep.case.to_string())
        .put("closed_form_norm", ch.closed_form_norm())
        .put("entanglement_breaking", rep.entanglement_breaking)
        .put("eb_threshold", (ch.k * ch.k + 1.0) / 2.0)
        .put("norm_at_most_one", ch.closed_form_norm() <= 1.0)
        .put("non_eb_window", !rep.entanglement_breaking && ch.closed_form_norm() <= 1.0);
    if let Some(l) = rep.lambda {
        s.put("lambda", l);
    }
    if let Some(c) = rep.prefactor {
        s.put("prefactor", c);
    }
    if let Some(e) = rep.kernel_eigenvalue {
        s.put("kernel_eigenvalue", e);
    }
    s
}

fn norm_section(norm: &gausscj::gaussian::CjNorm<f64>, route: &str) -> Section {
    let mut s = Section::new("norm");
    s.put("kind", norm.kind());
    if let Some(v) = norm.value() {
        s.put("value", v);
    }
    s.put("route", route);
    s
}

fn analyze_gaussian(
    s_a: usize,
    s_b: usize,
    k: &RealMatrix<f64>,
    mu: &RealMatrix<f64>,
    tol: &Tolerances,
    report: &mut Report,
) -> Result<(), CliError> {
    let spec = GaussianChannelSpec::new(s_a, s_b, k.clone(), mu.clone(), tol).map_err(invalid_gaussian)?;
    let verdict = validate(&spec, tol)?;
    let mut v = Section::new("validity");
    v.put("constraint", "mu + (i/2) Delta_K >= 0")
        .put("min_eigenvalue", verdict.min_eigenvalue)
        .put("slack", tol.psd)
        .put("valid", verdict.valid);
    report.push(v);
    if !verdict.valid {
        return Err(CliError::Invalid(format!(
            "channel violates mu >= +-(i/2) Delta_K: min eigenvalue of mu + (i/2) Delta_K is {:e} < -{:e}",
            verdict.min_eigenvalue, tol.psd
        )));
    }
    let cls = classify(&spec, tol).map_err(invalid_gaussian)?;
    let w = &cls.williamson;
    let mut c = Section::new("classification");
    c.put("case", cls.case.to_string())
        .put("bounded", cls.bounded)
        .put("dims", w.dims.to_vec())
        .put("rank_mu", w.ranks.0)
        .put("rank_delta_k", w.ranks.1)
        .put("rank_mu_minus_i_delta_k", w.ranks.2)
        .put("symplectic_eigenvalues", w.sympl_eigs.clone())
        .put("modes", mode_labels(&cls.modes));
    report.push(c);
    let [d1, d2, d3, d4] = cls.dims;
    let route = if d4 > 0 {
        "mu degenerate"
    } else if d3 == 0 {
        "1/sqrt(det Delta_K det[abs(Delta_K^-1 mu) + I/2])"
    } else if d1 + d2 == 0 {
        "1/sqrt(det mu)"
    } else {
        "upper bound 1/sqrt(det mu)"
    };
    report.push(norm_section(&cls.norm, route));

    let noise = noise_decomposition(&spec, tol)?;
    let mut n = Section::new("noise");
    n.put("dims", noise.dims.to_vec())
        .put("quantum", noise.quantum_dims)
        .put("classical_positive", noise.classical_positive)
        .put("classical_zero", noise.classical_zero)
        .put("labels", noise.labels.iter().map(|l| l.to_string()).collect::<Vec<_>>());
    report.push(n);

    match cls.case {
        CjCase::Case1 => {
            let e = case1_exponent(&spec, tol)?;
            let mut s = Section::new("case1");
            s.put("gibbs_prefactor", e.gibbs_prefactor)
                .put("omega_prefactor", e.omega_prefactor)
                .put("theta", e.theta.clone())
                .put("epsilon", input::real_rows(&e.epsilon));
            report.push(s);
        }
        CjCase::Case2 => {
            let d = case2_data(&spec, tol)?;
            let mut s = Section::new("case2");
            s.put("prefactor", d.prefactor)
                .put("kernel_eigenvalue", d.kernel_eigenvalue())
                .put("quadratic_scale", d.quadratic_scale);
            report.push(s);
        }
        _ => {}
    }
    if let Some((kv, mv)) = as_one_mode(k, mu) {
        let ch = OneModeChannel::new(kv, mv, tol).map_err(invalid_gaussian)?;
        report.push(one_mode_section(&one_mode_report(&ch, tol)?));
    }
    Ok(())
}

fn choi_of(spec: &ChannelSpec, tol: &Tolerances) -> Result<ChoiMatrix<f64>, CliError> {
    match spec {
        ChannelSpec::Finite { d_a, d_b, data } => match data {
            FiniteData::Choi(m) => Ok(ChoiMatrix::from_matrix(*d_a, *d_b, m.clone(), tol)?),
            FiniteData::Kraus(ops) => {
                let ks = KrausSet::new(ops.clone())?;
                let res = ks.completeness_residual();
                if res > tol.trace {
                    return Err(CliError::Lib(Error::IncompleteKrausSet { deviation: res }));
                }
                Ok(ChoiMatrix::from_blocks(&ChannelBlocks::from_kraus(&ks, tol)?, tol)?)
            }
        },
        ChannelSpec::Eb { povm, states, .. } => {
            let eb = EbChannel::new(
                FinitePovm::new(povm.clone(), tol)?,
                PreparationEnsemble::from_matrices(states.clone(), tol)?,
            )?;
            Ok(separable_choi(&eb, tol)?)
        }
        ChannelSpec::Gaussian { .. } => Err(CliError::Usage("a finite or eb spec is required".into())),
    }
}

fn choi_section(c: &ChoiMatrix<f64>, tol: &Tolerances) -> Result<Section, CliError> {
    let (d_a, d_b) = (c.d_a(), c.d_b());
    let eig = c.eigenvalues(tol)?;
    let top = eig.iter().copied().fold(0.0, f64::max);
    let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let rank = eig.iter().filter(|&&x| x > tol.kraus_drop * top).count();
    let ptd = max_diff(&partial_trace_b(c.matrix(), d_b, d_a), &identity(d_a));
    let ppt = ppt_min_eigenvalue(c.matrix(), d_b, d_a, tol)?;
    let mut s = Section::new("choi");
    s.put("d_A", d_a)
        .put("d_B", d_b)
        .put("eigenvalues", eig)
        .put("min_eigenvalue", lo)
        .put("norm", top)
        .put("kraus_rank", rank)
        .put("partial_trace_deviation", ptd)
        .put("ppt_min_eigenvalue", ppt)
        .put("entanglement_witnessed", ppt < -tol.psd);
    Ok(s)
}

pub fn analyze(path: &Path, tol: &Tolerances) -> Result<Report, CliError> {
    let spec = input::read(path)?;
    let mut report = Report::new("analyze");
    report.push(input::echo(&spec));
    report.push(tolerance_section(tol, None));
    match &spec {
        ChannelSpec::Gaussian { s_a, s_b, k, mu } => analyze_gaussian(*s_a, *s_b, k, mu, tol, &mut report)?,
        ChannelSpec::Finite { .. } | ChannelSpec::Eb { .. } => {
            let c = choi_of(&spec, tol)?;
            report.push(choi_section(&c, tol)?);
            if let ChannelSpec::Eb { povm, .. } = &spec {
                let mut s = Section::new("eb");
                s.put("outcomes", povm.len())
                    .put("separable", true)
                    .put("norm_at_most_one", c.norm(tol)? <= 1.0 + tol.psd);
                report.push(s);
            }
        }
    }
    Ok(report)
}

pub fn one_mode(k: f64, m: f64, tol: &Tolerances) -> Result<Report, CliError> {
    let mut report = Report::new("one-mode");
    report.push(tolerance_section(tol, None));
    let ch = OneModeChannel::new(k, m, tol).map_err(invalid_gaussian)?;
    let rep = one_mode_report(&ch, tol).map_err(invalid_gaussian)?;
    report.push(norm_section(&rep.norm, "1/(m + |k^2 - 1|/2)"));
    report.push(one_mode_section(&rep));
    Ok(report)
}

pub struct VerifyArgs {
    pub k: f64,
    pub m: f64,
    pub n_levels: usize,
    pub levels: usize,
    pub sigma_mean: f64,
}

fn check(s: &mut Section, name: &str, value: f64, threshold: f64) -> bool {
    let pass = value <= threshold;
    s.put(name, value).put(&format!("{name}_threshold"), threshold).put(&format!("{name}_pass"), pass);
    pass
}

/// Runs the oracle suite; the flag is false when a check failed.
pub fn verify(a: &VerifyArgs, tol: &Tolerances, oracle: &OracleTolerances) -> Result<(Report, bool), CliError> {
    let mut report = Report::new("verify");
    report.push(tolerance_section(tol, Some(oracle)));
    if a.n_levels < MIN_TRUNCATION {
        return Err(CliError::Lib(Error::TruncationTooSmall { n: a.n_levels, min: MIN_TRUNCATION }));
    }
    let ch = OneModeChannel::new(a.k, a.m, tol).map_err(invalid_gaussian)?;
    let rep = one_mode_report(&ch, tol).map_err(invalid_gaussian)?;
    report.push(one_mode_section(&rep));

    // every comparison runs at N and at a larger confirmation truncation;
    // pass/fail reads the larger one
    let fine = a.n_levels + a.n_levels / 2;
    let mut s = Section::new("oracle");
    s.put("truncation", a.n_levels)
        .put("confirmation_truncation", fine)
        .put("guard", DEFAULT_GUARD)
        .put("route", rep.case.to_string());
    let gap = ch.gap();
    let mut ok = true;
    let lowest = |n| -> Result<f64, CliError> { Ok((quad_operator(a.k, n, tol)?.lowest_eigenvalue(tol)? - gap).abs()) };
    match rep.case {
        CjCase::Case1 => {
            let exact = ch.closed_form_norm();
            let norm_dev =
                |n| -> Result<f64, CliError> { Ok((omega_numeric(a.k, a.m, n, tol)?.norm() - exact).abs() / exact) };
            s.put("norm_rel_deviation_at_truncation", norm_dev(a.n_levels)?);
            ok &= check(&mut s, "norm_rel_deviation", norm_dev(fine)?, oracle.norm);
            s.put("levels", a.levels).put(
                "partial_trace_deviation_at_truncation",
                verify_partial_trace(a.k, a.m, a.n_levels, a.levels, tol)?,
            );
            let pt = verify_partial_trace(a.k, a.m, fine, a.levels, tol)?;
            ok &= check(&mut s, "partial_trace_deviation", pt, oracle.partial_trace);
            s.put("lowest_eigenvalue_deviation_at_truncation", lowest(a.n_levels)?);
            ok &= check(&mut s, "lowest_eigenvalue_deviation", lowest(fine)?, oracle.lowest_eigenvalue);
            let ppt = ppt_probe_truncated(a.k, a.m, a.sigma_mean, a.n_levels, tol)?;
            s.put("sigma_mean", a.sigma_mean).put("ppt_min_eigenvalue", ppt);
            if rep.entanglement_breaking {
                let pass = ppt >= -oracle.ppt;
                s.put("ppt_threshold", -oracle.ppt).put("ppt_pass", pass);
                ok &= pass;
            } else {
                s.put("entanglement_witnessed", ppt < -oracle.ppt);
            }
        }
        CjCase::Case2 => {
            s.put("lowest_eigenvalue_deviation_at_truncation", lowest(a.n_levels)?);
            ok &= check(&mut s, "lowest_eigenvalue_deviation", lowest(fine)?, oracle.lowest_eigenvalue);
        }
        other => {
            return Err(CliError::Lib(Error::NotCase1(format!("k = {} gives {other}; the oracle needs k != 1", a.k))))
        }
    }
    s.put("status", if ok { "pass" } else { "fail" });
    report.push(s);
    Ok((report, ok))
}

pub fn kraus(path: &Path, out: &Path, tol: &Tolerances) -> Result<Report, CliError> {
    let spec = input::read(path)?;
    let c = choi_of(&spec, tol)?;
    let ks = gausscj::choi::kraus_from_choi(&c, tol)?;
    let mut file = Report::new("kraus");
    let mut body = Section::new("channel");
    body.put("kind", "finite")
        .put("d_A", c.d_a())
        .put("d_B", c.d_b())
        .put("kraus", Value::Rows(ks.ops().iter().map(input::complex_flat).collect()));
    file.push(body);
    std::fs::write(out, kraus_file(&file)).map_err(|e| CliError::Io(format!("cannot write {}: {e}", out.display())))?;

    let mut report = Report::new("kraus");
    report.push(input::echo(&spec));
    report.push(tolerance_section(tol, None));
    let mut s = Section::new("kraus");
    s.put("count", ks.len())
        .put("completeness_residual", ks.completeness_residual())
        .put("output", out.display().to_string());
    report.push(s);
    Ok(report)
}

/// The Kraus output is itself a `finite` spec file.
fn kraus_file(r: &Report) -> String {
    let text = r.machine();
    let body = text.split("[channel]\n").nth(1).unwrap_or_default();
    format!("schema_version = \"1\"\n{body}")
}
