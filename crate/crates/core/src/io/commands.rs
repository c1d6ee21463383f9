use num::complex::Complex64;
use rayon::prelude::*;

use super::config::{parse_source, Command, RunConfig, ZetaSpec};
use super::metric_spec::{parse_metric_spec, NamedMetric};
use super::report::{emit_report, format_frequency, Cell, Report, Table, Tag};
use crate::algebra::{rational_to_f64, BoundaryFunction, GaussianRational, Rational};
use crate::checks::{all_criteria, interior_grid, SYMBOL_TOL};
use crate::error::{Error, Result};
use crate::geometry::{normal_form_solve, MetricExpansion};
use crate::numerics::{numeric_connection, ModeProblem};
use crate::perturbation::{compare_leading, d1_check, PerturbationSpec};
use crate::poisson::{
    einstein_log_recursion, exceptional_log_coefficient, gz_expand, gz_expand_with, mode_symbol,
    residue_relation_check, residue_trace_check, ScalarValue,
};
use crate::series::{BaseTag, LogCap, PhgSeries};
use crate::spectral::SpectralParams;

type Bf = BoundaryFunction<GaussianRational>;

/// Process exit status.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ExitStatus {
    Pass = 0,
    CheckFailed = 1,
    Usage = 2,
    Internal = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    /// Bad input (unparsable, malformed or outside the supported class) is a
    /// usage error; everything else is internal.
    pub fn for_error(e: &Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::Schema { .. }
            | Error::NotSymmetric { .. }
            | Error::NotPositiveDefinite
            | Error::NotReal
            | Error::DimensionMismatch { .. }
            | Error::Unsupported(_)
            | Error::IllPosed(_)
            | Error::Io(_) => ExitStatus::Usage,
            _ => ExitStatus::Internal,
        }
    }
}

struct Inputs {
    metric: NamedMetric,
    source: Bf,
    trunc: usize,
}

fn load(cfg: &RunConfig) -> Result<Inputs> {
    let path = cfg
        .metric
        .as_ref()
        .ok_or_else(|| Error::Parse(format!("{} requires --metric", cfg.command)))?;
    let mut metric = parse_metric_spec(path)?;
    if metric.name.is_empty() {
        metric.name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
    }
    let n = metric.metric.n();
    let source = match &cfg.source {
        Some(s) => parse_source(s, n)?,
        None => Bf::one(n),
    };
    let trunc = cfg.truncation.unwrap_or(metric.metric.trunc());
    metric.metric = metric.metric.with_trunc(trunc);
    Ok(Inputs { metric, source, trunc })
}

fn expand(cfg: &RunConfig, inp: &Inputs) -> Result<Report> {
    let g = &inp.metric.metric;
    let mut rep = Report::new("expand", &inp.metric.name);
    match &cfg.zeta {
        ZetaSpec::Symbolic => {
            let e = gz_expand(g, &inp.source, inp.trunc)?;
            let mut t = Table::new("coefficients p_(j,l)(zeta)", &["j", "l", "mode", "coefficient"]);
            for ((j, l), c) in e.series.terms() {
                for (xi, v) in c.terms() {
                    t.push(vec![
                        Cell::exact(j),
                        Cell::exact(l),
                        Cell::text(format_frequency(xi)),
                        Cell::exact(v),
                    ]);
                }
            }
            rep.tables.push(t);
            rep.check(
                "residual vanishes through the truncation",
                e.residual(g)?.is_zero(),
                format!("J = {}", inp.trunc),
            );
        }
        ZetaSpec::Grid { .. } => {
            let mut t = Table::new("coefficients at exact zeta", &["zeta", "j", "l", "mode", "coefficient"]);
            for z in cfg.zeta.points() {
                let params = SpectralParams::at(g.n(), GaussianRational::real(z.clone()));
                let e = match gz_expand_with(g, &inp.source, &params, inp.trunc) {
                    Err(Error::DivisionByZero) => {
                        t.push(vec![
                            Cell::exact(&z),
                            Cell::text("-"),
                            Cell::text("-"),
                            Cell::text("-"),
                            Cell::text("exceptional"),
                        ]);
                        continue;
                    }
                    other => other?,
                };
                for ((j, l), c) in e.series.terms() {
                    for (xi, v) in c.terms() {
                        t.push(vec![
                            Cell::exact(&z),
                            Cell::exact(j),
                            Cell::exact(l),
                            Cell::text(format_frequency(xi)),
                            Cell::exact(v),
                        ]);
                    }
                }
            }
            rep.tables.push(t);
        }
    }
    Ok(rep)
}

fn residues(inp: &Inputs) -> Result<Report> {
    let g = &inp.metric.metric;
    let mut rep = Report::new("residues", &inp.metric.name);
    let e = gz_expand(g, &inp.source, inp.trunc)?;
    let mut poles = e.pole_table(2);
    poles.sort_by(|a, b| {
        rational_cmp(&a.zeta0, &b.zeta0)
            .then(a.l.cmp(&b.l))
            .then(a.j.cmp(&b.j))
            .then(a.frequency.cmp(&b.frequency))
    });
    let mut t = Table::new("poles", &["zeta0", "l", "j", "mode", "order", "leading", "residue"]);
    for p in &poles {
        t.push(vec![
            Cell::exact(&p.zeta0),
            Cell::exact(p.l),
            Cell::exact(p.j),
            Cell::text(format_frequency(&p.frequency)),
            Cell::exact(p.laurent.order),
            Cell::exact(p.laurent.leading()),
            Cell::exact(p.laurent.residue()),
        ]);
    }
    rep.tables.push(t);
    if let [c] = g.corrections() {
        let r = residue_trace_check(g.h0(), c.j, c.l, &c.tensor)?;
        let mut t = Table::new(
            "residue trace",
            &["l", "zeta0", "top log", "pole order", "leading", "max pole order"],
        );
        for lv in &r.levels {
            t.push(vec![
                Cell::exact(lv.l),
                Cell::exact(&lv.zeta0),
                lv.top_log.map(Cell::exact).unwrap_or_else(|| Cell::text("-")),
                Cell::exact(lv.pole_order),
                Cell::exact(&lv.leading),
                Cell::exact(lv.max_pole_order),
            ]);
        }
        rep.tables.push(t);
        let mut s = Table::new("trace comparison", &["quantity", "value"]);
        s.push(vec![Cell::text("trace"), Cell::exact(&r.trace)]);
        let opt = |v: Option<GaussianRational>| v.map(|v| Cell::exact(&v)).unwrap_or_else(|| Cell::text("-"));
        s.push(vec![Cell::text("engine constant"), opt(r.engine_constant())]);
        s.push(vec![
            Cell::text("closed form at l = k+1"),
            Cell::closed_form(&r.closed_form),
        ]);
        s.push(vec![Cell::text("engine / closed form"), opt(r.ratio_to_closed_form())]);
        rep.tables.push(s);
    }
    Ok(rep)
}

fn rational_cmp(a: &GaussianRational, b: &GaussianRational) -> std::cmp::Ordering {
    a.re.cmp(&b.re).then(a.im.cmp(&b.im))
}

fn einstein_log(inp: &Inputs) -> Result<Report> {
    let g = &inp.metric.metric;
    let n = g.n();
    let mut rep = Report::new("einstein-log", &inp.metric.name);
    let g = g.with_trunc(inp.trunc.max(n));
    let out = einstein_log_recursion(&g, &inp.source)?;
    let exc = exceptional_log_coefficient(&g, &inp.source, n)?;
    let mut t = Table::new("log coefficient p_n", &["mode", "p_n", "exceptional limit"]);
    let mut modes: Vec<Vec<i64>> = out.p_n.terms().keys().chain(exc.terms().keys()).cloned().collect();
    modes.sort();
    modes.dedup();
    for xi in &modes {
        t.push(vec![
            Cell::text(format_frequency(xi)),
            Cell::exact(out.p_n.coefficient(xi)),
            Cell::exact(exc.coefficient(xi)),
        ]);
    }
    rep.tables.push(t);
    rep.check(
        "recursion residual vanishes",
        out.residual.is_zero(),
        format!("through x^{n}"),
    );
    rep.check("exceptional limit equals p_n", out.p_n == exc, format!("l = {n}"));
    if g.is_flat() || g.corrections().is_empty() {
        let mut r = Table::new("2 Res S = p_n", &["mode", "q^2", "residue", "p_n"]);
        for xi in inp.source.terms().keys() {
            let rel = residue_relation_check(g.h0(), xi)?;
            r.push(vec![
                Cell::text(format_frequency(xi)),
                Cell::exact(&rel.q2),
                Cell::closed_form(&rel.residue),
                Cell::exact(&rel.p_n),
            ]);
            rep.check(
                format!("residue relation at {}", format_frequency(xi)),
                rel.holds,
                format!("q^2 = {}", rel.q2),
            );
        }
        rep.tables.push(r);
    }
    Ok(rep)
}

/// Base metric and L from the last correction of the metric file.
pub fn split_last_correction(g: &MetricExpansion) -> Result<PerturbationSpec> {
    let Some((last, rest)) = g.corrections().split_last() else {
        return Err(Error::IllPosed(
            "perturb needs at least one correction; the last one is L".into(),
        ));
    };
    let base = MetricExpansion::new(g.h0().to_vec(), rest.to_vec(), g.trunc())?;
    PerturbationSpec::new(base, last.tensor.clone(), last.j, last.l)
}

fn perturb(inp: &Inputs) -> Result<Report> {
    let spec = split_last_correction(&inp.metric.metric)?;
    let mut rep = Report::new("perturb", &inp.metric.name);
    let c = compare_leading(&spec)?;
    let n = spec.n();
    let mut t = Table::new(
        format!("leading block at x^{} (ln x)^{}", spec.k, spec.m),
        &["term", "engine", "closed form"],
    );
    for i in 0..n {
        for j in i..n {
            t.push(vec![
                Cell::text(format!("d{i}d{j}")),
                Cell::exact(&c.engine.second[i][j]),
                Cell::closed_form(&c.closed.second[i][j]),
            ]);
        }
    }
    t.push(vec![
        Cell::text("zeroth"),
        Cell::exact(&c.engine.zeroth),
        Cell::closed_form(&c.closed.zeroth),
    ]);
    rep.tables.push(t);
    rep.check("H part matches", c.h_part_matches, "second-order tangential terms");
    rep.check(
        "scalar part is k(k-n)/4 T",
        c.scalar_matches,
        format!("k = {}, n = {n}", spec.k),
    );
    rep.check(
        "no first-order terms",
        c.no_extra_terms && c.engine.lower_clean,
        "leading block",
    );
    if spec.k == n {
        rep.check(
            "zeroth coefficient vanishes at k = n",
            c.engine.zeroth.is_zero(),
            "k = n",
        );
    }
    rep.check(
        "order-zero part matches the potential formula",
        d1_check(&spec, spec.default_trunc())?,
        "derivative-free terms",
    );
    Ok(rep)
}

fn mode_scatter(cfg: &RunConfig, inp: &Inputs) -> Result<Report> {
    let g = &inp.metric.metric;
    let n = g.n();
    let tol = cfg.tol.unwrap_or(SYMBOL_TOL);
    let zetas: Vec<Rational> = match &cfg.zeta {
        ZetaSpec::Symbolic => interior_grid(n),
        grid => grid.points(),
    };
    let mut modes: Vec<Vec<i64>> = inp
        .source
        .terms()
        .keys()
        .filter(|xi| xi.iter().any(|v| *v != 0))
        .cloned()
        .collect();
    if modes.is_empty() {
        // a constant source has only the trivial mode; sweep the unit frequencies
        modes = (0..n).map(|i| (0..n).map(|k| i64::from(k == i)).collect()).collect();
    }
    let jobs: Vec<(Vec<i64>, Rational)> = modes
        .iter()
        .flat_map(|xi| zetas.iter().map(move |z| (xi.clone(), z.clone())))
        .collect();
    let flat_model = g.corrections().is_empty();
    let results: Vec<Result<Option<(Complex64, f64, Option<Complex64>)>>> = jobs
        .par_iter()
        .map(|(xi, z)| {
            let zeta = Complex64::new(rational_to_f64(z), 0.0);
            let mut p = ModeProblem::new(g.clone(), xi.clone(), zeta)?;
            p.trunc = inp.trunc;
            let pair = match numeric_connection(&p) {
                Ok(pair) => pair,
                Err(Error::IllPosed(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let sym = if flat_model {
                match mode_symbol(g.h0_inv(), xi, n, zeta)?.value {
                    ScalarValue::Float(v) => Some(v),
                    _ => None,
                }
            } else {
                None
            };
            Ok(Some((pair.ratio(), pair.condition, sym)))
        })
        .collect();
    let mut rep = Report::new("mode-scatter", &inp.metric.name);
    let mut t = Table::new(
        "numeric b/a",
        &["mode", "zeta", "b/a", "condition", "symbol", "relative error"],
    );
    let mut worst = 0.0f64;
    for ((xi, z), r) in jobs.iter().zip(results) {
        let Some((v, cond, sym)) = r? else {
            let dash = || Cell::text("-");
            t.push(vec![
                Cell::text(format_frequency(xi)),
                Cell::rational(z),
                Cell::text("exceptional"),
                dash(),
                dash(),
                dash(),
            ]);
            continue;
        };
        let (sym_cell, err_cell) = match sym {
            Some(s) => {
                let e = (v - s).norm() / s.norm();
                worst = worst.max(e);
                (Cell::complex(s, Tag::ClosedForm), Cell::float(e, tol))
            }
            None => (Cell::text("-"), Cell::text("-")),
        };
        t.push(vec![
            Cell::text(format_frequency(xi)),
            Cell::rational(z),
            Cell::complex(v, Tag::Numeric(tol)),
            Cell::float(cond, 0.0),
            sym_cell,
            err_cell,
        ]);
    }
    rep.tables.push(t);
    if flat_model && !jobs.is_empty() {
        rep.check("b/a matches the symbol", worst <= tol, format!("tolerance {tol:e}"));
    }
    Ok(rep)
}

fn normal_form(inp: &Inputs) -> Result<Report> {
    let g = &inp.metric.metric;
    let n = g.n();
    let u = PhgSeries::monomial(inp.source.clone(), BaseTag::Zero, 1, 0, inp.trunc, LogCap::default())?;
    let nf = normal_form_solve(g, &u, &Bf::zero(n), inp.trunc)?;
    let mut rep = Report::new("normal-form", &inp.metric.name);
    let mut t = Table::new("omega", &["j", "l", "mode", "coefficient"]);
    for ((j, l), c) in nf.omega.terms() {
        for (xi, v) in c.terms() {
            t.push(vec![
                Cell::exact(j),
                Cell::exact(l),
                Cell::text(format_frequency(xi)),
                Cell::exact(v),
            ]);
        }
    }
    rep.tables.push(t);
    rep.check(
        "eikonal residual vanishes",
        nf.residual.is_zero(),
        format!("through x^{}", inp.trunc),
    );
    if let Some(h) = &nf.h_new {
        let mut m = Table::new(
            "metric in the new defining function",
            &["j", "l", "entry", "mode", "coefficient"],
        );
        for c in h.corrections() {
            for i in 0..n {
                for k in i..n {
                    for (xi, v) in c.tensor.get(i, k).terms() {
                        m.push(vec![
                            Cell::exact(c.j),
                            Cell::exact(c.l),
                            Cell::text(format!("h{i}{k}")),
                            Cell::text(format_frequency(xi)),
                            Cell::exact(v),
                        ]);
                    }
                }
            }
        }
        rep.tables.push(m);
    }
    Ok(rep)
}

/// Runs criteria 1 to 8 on the shipped corpus.
pub fn check_all(tol: Option<f64>) -> Result<Report> {
    let mut rep = Report::new("check-all", "corpus");
    for (name, r) in all_criteria(tol.unwrap_or(SYMBOL_TOL)) {
        match r {
            Ok(r) => rep.merge(r),
            Err(e) => rep.check(name, false, format!("error: {e}")),
        }
    }
    Ok(rep)
}

/// Builds the report for one command.
pub fn build_report(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    if cfg.command == Command::CheckAll {
        return check_all(cfg.tol);
    }
    let inp = load(cfg)?;
    match cfg.command {
        Command::Expand => expand(cfg, &inp),
        Command::Residues => residues(&inp),
        Command::EinsteinLog => einstein_log(&inp),
        Command::Perturb => perturb(&inp),
        Command::ModeScatter => mode_scatter(cfg, &inp),
        Command::NormalForm => normal_form(&inp),
        Command::CheckAll => unreachable!("handled above"),
    }
}

/// Runs the command, writes reports when `out` is set, and returns the exit
/// status together with the report (if one was produced).
pub fn run_command(cfg: &RunConfig) -> (ExitStatus, Result<Report>) {
    let rep = match build_report(cfg) {
        Ok(r) => r,
        Err(e) => return (ExitStatus::for_error(&e), Err(e)),
    };
    if let Some(out) = &cfg.out {
        if let Err(e) = emit_report(&rep, out) {
            return (ExitStatus::Internal, Err(e));
        }
    }
    let status = if rep.passed() {
        ExitStatus::Pass
    } else {
        ExitStatus::CheckFailed
    };
    (status, Ok(rep))
}

/// Sets the rayon pool size from PHGSCAT_WORKERS, if present.
pub fn configure_workers() -> Result<()> {
    let Ok(v) = std::env::var("PHGSCAT_WORKERS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("PHGSCAT_WORKERS must be a count, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{gr, Scalar as _};
    use crate::io::corpus::CORPUS;
    use std::path::PathBuf;

    fn corpus_file(name: &str) -> PathBuf {
        assert!(CORPUS.iter().any(|(n, _)| *n == name));
        PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("corpus")
            .join(format!("{name}.json"))
    }

    fn cfg(command: Command, metric: &str) -> RunConfig {
        let mut c = RunConfig::new(command);
        c.metric = Some(corpus_file(metric));
        c
    }

    #[test]
    fn expand_flat_n2_contains_p20() {
        let mut c = cfg(Command::Expand, "flat-n2");
        c.source = Some("1,0=1".into());
        c.truncation = Some(4);
        let (status, rep) = run_command(&c);
        assert_eq!(status, ExitStatus::Pass);
        let rep = rep.unwrap();
        let want = crate::checks::flat_p20(1).to_string();
        let t = &rep.tables[0];
        assert!(t
            .rows
            .iter()
            .any(|r| r[0] == Cell::exact(2) && r[1] == Cell::exact(0) && r[3] == Cell::exact(&want)));
    }

    #[test]
    fn perturb_at_k_equal_n_vanishes() {
        let (status, rep) = run_command(&cfg(Command::Perturb, "log-k2m2-n3"));
        assert_eq!(status, ExitStatus::Pass, "{:?}", rep.as_ref().map(|r| r.to_text()));
        // log-k1m1-n2 has k = 1 < n; use the quadratic n = 2 metric for k = n
        let (status, rep) = run_command(&cfg(Command::Perturb, "quadratic-n2"));
        assert_eq!(status, ExitStatus::Pass);
        let rep = rep.unwrap();
        assert!(rep
            .checks
            .iter()
            .any(|c| c.name.contains("vanishes at k = n") && c.passed));
        let zeroth = rep.tables[0].rows.last().unwrap();
        assert_eq!(zeroth[1], Cell::exact(Bf::zero(2)));
    }

    #[test]
    fn usage_errors() {
        let (status, _) = run_command(&RunConfig::new(Command::Expand));
        assert_eq!(status, ExitStatus::Usage);
        let mut c = cfg(Command::Expand, "flat-n2");
        c.source = Some("1,0,0=1".into());
        assert_eq!(run_command(&c).0, ExitStatus::Usage);
    }

    #[test]
    fn einstein_log_flat_n2() {
        let mut c = cfg(Command::EinsteinLog, "flat-n2");
        c.source = Some("1,0=1;1,1=1".into());
        let (status, rep) = run_command(&c);
        assert_eq!(status, ExitStatus::Pass, "{}", rep.unwrap().to_text());
    }

    #[test]
    fn normal_form_and_residues_run() {
        let mut c = cfg(Command::NormalForm, "flat-n1");
        c.source = Some("1".into());
        c.truncation = Some(4);
        let (status, rep) = run_command(&c);
        assert_eq!(status, ExitStatus::Pass);
        let rep = rep.unwrap();
        assert!(rep.tables[0].rows.iter().any(|r| r[3] == Cell::exact(gr(1, 1))));
        let (status, _) = run_command(&cfg(Command::Residues, "log-k1m1-n2"));
        assert_eq!(status, ExitStatus::Pass);
        let _ = GaussianRational::one();
    }
}
