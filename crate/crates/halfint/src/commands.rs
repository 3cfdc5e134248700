//! Subcommand implementations.

use std::f64::consts::PI;
use std::thread;

use halfint_core::arith::{self, DiscriminantFilter};
use halfint_core::charsums::{self, GaussianTest};
use halfint_core::classical::{self, EigenData, IntegralForm};
use halfint_core::halfint::{self, EigenPair, HalfIntegralForm};
use halfint_core::lfunctions::{self, AfeKernel, AlphaG, LValueRecord};
use halfint_core::moments::{self, MomentReport, TestFunctionPair, WeightData};
use halfint_core::zeros::{self, Bracket, Geodesic, LineForm, LineParams, ZeroReport};
use serde_json::{json, Value};

use crate::cache::{Cache, CacheKey};
use crate::cli::{ClosedForm, Command};
use crate::codec::{elem_string, field_json, series_to_json};
use crate::config::{Format, RunConfig};
use crate::report::{Body, Failure, Report};
use crate::CliError;

/// Tolerance for exact-in-principle floating identities (character sums).
const GRID_TOL: f64 = 1e-6;
/// Non-negativity slack for central values.
const NONNEG_SLACK: f64 = 1e-8;

pub struct Context {
    pub cfg: RunConfig,
    pub cache: Option<Cache>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl Context {
    pub fn new(cfg: RunConfig) -> Result<Self, CliError> {
        let cache = cfg.cache_dir().map(Cache::open).transpose()?;
        Ok(Context { cfg, cache })
    }

    fn series(
        &self,
        key: CacheKey,
        compute: impl FnOnce() -> Result<Vec<halfint_core::QSeries>, CliError>,
    ) -> Result<Vec<halfint_core::QSeries>, CliError> {
        match &self.cache {
            Some(c) => c.get_or_compute(&key, compute),
            None => compute(),
        }
    }

    pub fn plus_basis(&self, k: u32, trunc: usize) -> Result<Vec<HalfIntegralForm>, CliError> {
        let s = self.series(CacheKey::plus(k, trunc), || {
            Ok(halfint::plus_cusp_basis(k, trunc)?
                .iter()
                .map(|g| g.series().expect("rational basis"))
                .collect())
        })?;
        s.iter()
            .enumerate()
            .map(|(i, s)| {
                let mut g = HalfIntegralForm::from_series(k, s);
                if !(g.plus_flag && g.cusp_flag) {
                    return Err(CliError::Core(halfint_core::Error::Domain(format!(
                        "cached form {i} of k = {k} is not a plus cusp form"
                    ))));
                }
                g.id = format!("plus{k}/basis{}", i + 1);
                Ok(g)
            })
            .collect()
    }

    pub fn cusp_basis(&self, weight: u32, trunc: usize) -> Result<Vec<IntegralForm>, CliError> {
        let s = self.series(CacheKey::cusp(weight, trunc), || {
            Ok(classical::cusp_basis(weight, trunc)?
                .into_iter()
                .map(|f| f.series)
                .collect())
        })?;
        Ok(s.into_iter()
            .map(|series| IntegralForm {
                weight,
                series,
                is_eigen: false,
            })
            .collect())
    }

    /// Eigenpairs with g known at least to `trunc`.
    pub fn eigenpairs(&self, k: u32, trunc: usize) -> Result<Vec<EigenPair>, CliError> {
        if k < 2 || classical::dim_cusp(2 * k) == 0 {
            return Err(usage(format!("the plus space of weight {k} + 1/2 is zero")));
        }
        let basis = self.plus_basis(k, trunc.max(halfint::hecke_trunc(k)))?;
        Ok(halfint::eigenbasis_from_basis(k, &basis)?)
    }

    pub fn weight_data(
        &self,
        k: u32,
        pairs: Vec<EigenPair>,
        d_max: u64,
    ) -> Result<WeightData, CliError> {
        Ok(WeightData::from_pairs(
            k,
            pairs,
            d_max,
            self.cfg.err_budget,
            self.cfg.trace_tol,
        )?)
    }

    /// α_g for every form, widening the discriminant range until a reference is found.
    fn alphas(&self, k: u32, pairs: &[EigenPair]) -> Result<Vec<AlphaG>, CliError> {
        let mut last = None;
        for bound in [8u64, 24, 60] {
            let w = self.weight_data(k, pairs.to_vec(), bound)?;
            match w.alphas(bound) {
                Ok(a) => return Ok(a),
                Err(e) => last = Some(e),
            }
        }
        Err(last.expect("at least one attempt").into())
    }
}

pub fn run(ctx: &Context, cmd: &Command) -> Result<Report, CliError> {
    match cmd {
        Command::Basis { k, weight, trunc } => basis(ctx, *k, *weight, *trunc),
        Command::Eigenbasis { k, show } => eigenbasis(ctx, *k, *show),
        Command::Lift { k } => lift(ctx, *k),
        Command::Lvalue { weight, d, d_max } => lvalue(ctx, *weight, d, *d_max),
        Command::WaldspurgerCheck { k, d } => waldspurger(ctx, *k, d),
        Command::Zeros { k, alpha, yfloor } => zero_scan(ctx, *k, alpha, *yfloor),
        Command::Signchanges { k, x, h, step } => signchanges(ctx, *k, *x, *h, *step),
        Command::Moments { big_k, x } => moment_reports(ctx, *big_k, *x),
        Command::CharsumVerify { closed_form } => Ok(charsum_grid(*closed_form)),
        Command::Constants => Ok(constants(&ctx.cfg)),
        Command::Selftest => selftest(ctx),
    }
}

fn basis(
    ctx: &Context,
    k: Option<u32>,
    weight: Option<u32>,
    trunc: usize,
) -> Result<Report, CliError> {
    let v = match (k, weight) {
        (Some(k), None) => {
            let b = ctx.plus_basis(k, trunc)?;
            let forms: Vec<Value> =
                b.iter().map(|g| json!({ "id": g.id, "series": series_to_json(&g.series().expect("rational")) })).collect();
            json!({ "level": 4, "k": k, "space": "plus", "trunc": trunc, "dim": b.len(), "forms": forms })
        }
        (None, Some(w)) => {
            let b = ctx.cusp_basis(w, trunc)?;
            let forms: Vec<Value> =
                b.iter().enumerate().map(|(i, f)| json!({ "id": format!("S{w}/basis{}", i + 1), "series": series_to_json(&f.series) })).collect();
            json!({ "level": 1, "weight": w, "space": "cusp", "trunc": trunc, "dim": b.len(), "forms": forms })
        }
        _ => return Err(usage("give exactly one of --k and --weight")),
    };
    Ok(Report::json(v))
}

fn pair_json(p: &EigenPair, show: usize) -> Value {
    let g = &p.g;
    let eig: Vec<Value> = p
        .eigen_table
        .iter()
        .map(|(q, e)| json!({ "p": q, "exact": elem_string(e), "value": g.field.embed(e, g.root) }))
        .collect();
    let coeffs: Vec<Value> = (0..=show.min(g.trunc()))
        .map(|n| {
            json!({
                "n": n,
                "exact": elem_string(g.coeff(n)),
                "value": g.coeff_f64(n),
                "normalized": halfint::normalized_coeff(g, n),
            })
        })
        .collect();
    json!({
        "g_id": g.id,
        "lift": p.f.id,
        "field": field_json(&g.field),
        "root": g.root,
        "trunc": g.trunc(),
        "eigenvalues": eig,
        "coefficients": coeffs,
    })
}

fn eigenbasis(ctx: &Context, k: u32, show: usize) -> Result<Report, CliError> {
    let pairs = ctx.eigenpairs(k, 0)?;
    let forms: Vec<Value> = pairs.iter().map(|p| pair_json(p, show)).collect();
    Ok(Report::json(
        json!({ "k": k, "dim": pairs.len(), "forms": forms }),
    ))
}

fn lift(ctx: &Context, k: u32) -> Result<Report, CliError> {
    let pairs = ctx.eigenpairs(k, 0)?;
    let mut failures = Vec::new();
    let mut forms = Vec::new();
    for p in &pairs {
        let g = &p.g;
        let mut rows = Vec::new();
        for &q in &halfint::PLUS_PRIMES {
            let a = p.f.eigenvalue(q).expect("lift eigenvalue");
            let tg = halfint::hecke_tp2(g, q)?;
            let bad = (0..=tg.trunc()).find(|&n| tg.coeff(n) != &g.field.mul(a, g.coeff(n)));
            if let Some(n) = bad {
                failures.push(Failure::new(
                    format!("{}: (T({q}²)g)({n}) = a_f({q}) a_g({n})", g.id),
                    elem_string(tg.coeff(n)),
                    elem_string(&g.field.mul(a, g.coeff(n))),
                ));
            }
            rows.push(json!({
                "p": q,
                "eigenvalue": elem_string(a),
                "value": g.field.embed(a, g.root),
                "a_f": p.f.eigenvalue_f64(q),
                "coefficients_checked": tg.trunc() + 1,
                "holds": bad.is_none(),
            }));
        }
        forms.push(json!({ "g_id": g.id, "lift": p.f.id, "table": rows }));
    }
    Ok(Report {
        body: Body::Json(json!({ "k": k, "forms": forms })),
        failures,
    })
}

fn record_json(r: &LValueRecord) -> Value {
    json!({
        "f_id": r.f_id,
        "weight": r.weight,
        "d": r.d,
        "value": r.value,
        "err_budget": r.err_budget,
        "residual": r.residual,
        "m_max": r.m_max,
        "declared_zero": r.declared_zero,
    })
}

fn check_records(records: &[LValueRecord], failures: &mut Vec<Failure>) {
    for r in records {
        if r.value < -NONNEG_SLACK {
            failures.push(Failure::new(
                format!("L(1/2, {} x chi_{}) >= 0", r.f_id, r.d),
                r.value,
                -NONNEG_SLACK,
            ));
        }
        if r.residual > r.err_budget {
            failures.push(Failure::new(
                format!("truncation stability of L(1/2, {} x chi_{})", r.f_id, r.d),
                r.residual,
                r.err_budget,
            ));
        }
    }
}

fn lvalue(ctx: &Context, weight: u32, ds: &[i64], d_max: Option<u64>) -> Result<Report, CliError> {
    if weight % 2 == 1 || classical::dim_cusp(weight) == 0 {
        return Err(usage(format!("S_{weight}(1) is zero")));
    }
    let k = weight / 2;
    let ds: Vec<i64> = match d_max {
        Some(m) if ds.is_empty() => arith::discriminants_for(k, m, ctx.cfg.filter),
        None => ds.to_vec(),
        _ => return Err(usage("give --d or --d-max, not both")),
    };
    if let Some(d) = ds.iter().find(|&&d| !arith::is_fundamental_discriminant(d)) {
        return Err(usage(format!("{d} is not a fundamental discriminant")));
    }
    let eigens = classical::eigenbasis_level1(weight, 64)?;
    let kernel = AfeKernel::new(weight)?;
    let top = ds.iter().map(|d| d.unsigned_abs()).max().unwrap_or(1);
    let lambdas = classical::lambda_tables(&eigens, kernel.required_len(top, ctx.cfg.err_budget))?;
    let mut records = Vec::new();
    for &d in &ds {
        records.extend(lfunctions::l_central_twists(
            &eigens,
            &lambdas,
            d,
            ctx.cfg.err_budget,
            &kernel,
        )?);
    }
    let mut failures = Vec::new();
    check_records(&records, &mut failures);
    let body = match ctx.cfg.format {
        Format::Json => Body::Json(
            json!({ "weight": weight, "records": records.iter().map(record_json).collect::<Vec<_>>() }),
        ),
        Format::Csv => Body::Csv {
            columns: vec![
                "k",
                "weight",
                "f_id",
                "d",
                "value",
                "err_budget",
                "residual",
                "m_max",
                "declared_zero",
            ],
            rows: records
                .iter()
                .map(|r| {
                    vec![
                        k.to_string(),
                        r.weight.to_string(),
                        r.f_id.clone(),
                        r.d.to_string(),
                        r.value.to_string(),
                        r.err_budget.to_string(),
                        r.residual.to_string(),
                        r.m_max.to_string(),
                        r.declared_zero.to_string(),
                    ]
                })
                .collect(),
        },
    };
    Ok(Report { body, failures })
}

fn waldspurger(ctx: &Context, k: u32, ds: &[i64]) -> Result<Report, CliError> {
    let ds: Vec<i64> = if ds.is_empty() {
        if k.is_multiple_of(2) {
            vec![1, 5, 13, 17]
        } else {
            vec![-3, -4, -7, -8]
        }
    } else {
        ds.to_vec()
    };
    if ds.len() < 2 {
        return Err(usage("need at least two discriminants"));
    }
    for &d in &ds {
        if !arith::is_fundamental_discriminant(d) || lfunctions::root_number(2 * k, d) < 0 {
            return Err(usage(format!(
                "{d} is not a fundamental discriminant of sign (-1)^{k}"
            )));
        }
    }
    let top = ds.iter().map(|d| d.unsigned_abs()).max().unwrap();
    let pairs = ctx.eigenpairs(k, top as usize)?;
    let w = ctx.weight_data(k, pairs, top)?;
    let ls: Vec<Vec<LValueRecord>> = ds
        .iter()
        .map(|&d| w.l_values(d))
        .collect::<Result<_, _>>()?;
    let mut failures = Vec::new();
    let mut forms = Vec::new();
    for (i, p) in w.pairs.iter().enumerate() {
        let values: Vec<Value> = ds
            .iter()
            .zip(&ls)
            .map(|(&d, l)| json!({ "d": d, "c_g": halfint::normalized_coeff(&p.g, d.unsigned_abs() as usize), "l_value": record_json(&l[i]) }))
            .collect();
        let mut ratios = Vec::new();
        for a in 0..ds.len() {
            for b in a + 1..ds.len() {
                let e = lfunctions::waldspurger_ratio_check(p, &ls[a][i], &ls[b][i])?;
                if !(e < ctx.cfg.verify_tol) {
                    failures.push(Failure::new(
                        format!("{}: c_g(|{}|)²/c_g(|{}|)² = L ratio", p.g.id, ds[a], ds[b]),
                        format!("relative error {e:e}"),
                        format!("{:e}", ctx.cfg.verify_tol),
                    ));
                }
                ratios.push(json!({ "d1": ds[a], "d2": ds[b], "relative_error": e }));
            }
        }
        let recs: Vec<LValueRecord> = ls.iter().map(|l| l[i].clone()).collect();
        check_records(&recs, &mut failures);
        forms.push(json!({ "g_id": p.g.id, "lift": p.f.id, "values": values, "ratios": ratios }));
    }
    Ok(Report {
        body: Body::Json(json!({ "k": k, "forms": forms })),
        failures,
    })
}

fn parse_geodesic(s: &str) -> Result<Geodesic, CliError> {
    match s.trim() {
        "0" | "0.0" => Ok(Geodesic::Zero),
        "-1/2" | "-0.5" => Ok(Geodesic::Half),
        other => Err(usage(format!("--alpha must be 0 or -1/2, got {other}"))),
    }
}

fn bracket_json(b: &Bracket) -> Value {
    json!({ "y_lo": b.y_lo, "y_hi": b.y_hi, "sign_lo": b.sign_lo, "sign_hi": b.sign_hi })
}

pub fn zero_report_json(r: &ZeroReport) -> Value {
    let changes: Vec<Value> = r
        .sign_changes
        .iter()
        .map(|s| json!({ "l1": s.l1, "l2": s.l2, "bracket": s.bracket.as_ref().map(bracket_json), "failure": s.failure }))
        .collect();
    json!({
        "g_id": r.g_id,
        "k": r.k,
        "alpha": r.alpha,
        "y_floor": r.y_floor,
        "l_max": r.l_max,
        "regime": if r.in_regime { "asymptotic" } else { "heuristic" },
        "heuristic_count": r.heuristic_count,
        "certified_sign_changes": r.certified_sign_changes,
        "certified_zeros": r.certified_zeros,
        "false_brackets": r.false_brackets,
        "midpoint_certified": r.midpoint_certified,
        "sign_changes": changes,
        "inconclusive": r.inconclusive,
        "grid_zeros": r.grid_zeros.iter().map(bracket_json).collect::<Vec<_>>(),
        "grid_inconclusive": r.grid_inconclusive,
    })
}

/// Soundness conditions for one scan.
pub fn zero_failures(r: &ZeroReport) -> Vec<Failure> {
    let mut out = Vec::new();
    if r.certified_zeros != r.certified_sign_changes {
        out.push(Failure::new(
            format!(
                "{} at alpha {}: certified zeros = certified sign changes",
                r.g_id, r.alpha
            ),
            r.certified_zeros,
            r.certified_sign_changes,
        ));
    }
    if r.false_brackets != 0 {
        out.push(Failure::new(
            format!("{} at alpha {}: no false brackets", r.g_id, r.alpha),
            r.false_brackets,
            0,
        ));
    }
    out
}

/// Coefficients needed to bound the tail at y.
fn trunc_for_line(k: u32, window_b: f64, y: f64) -> usize {
    let kf = k as f64;
    let s = kf + 0.5;
    let y0 = 0.5 * kf - 0.25;
    let delta = (window_b * (kf - 0.5) * kf.ln()).sqrt();
    ((2.0 * s + y0 + delta) / (2.0 * PI * y)).ceil() as usize + 2
}

fn line_forms(
    ctx: &Context,
    k: u32,
    trunc: usize,
) -> Result<(Vec<AlphaG>, Vec<LineForm>), CliError> {
    let pairs = ctx.eigenpairs(k, trunc)?;
    let alphas = ctx.alphas(k, &pairs)?;
    let params = LineParams {
        window_b: ctx.cfg.window_b,
    };
    let forms = pairs
        .iter()
        .zip(&alphas)
        .map(|(p, a)| LineForm::new(p, a.alpha, params))
        .collect::<Result<_, _>>()?;
    Ok((alphas, forms))
}

fn alpha_json(a: &AlphaG) -> Value {
    json!({ "g_id": a.g_id, "alpha": a.alpha, "reference_d": a.reference_d })
}

fn zero_scan(ctx: &Context, k: u32, alpha: &str, yfloor: f64) -> Result<Report, CliError> {
    let geo = parse_geodesic(alpha)?;
    if !(yfloor > 0.0 && yfloor.is_finite()) {
        return Err(usage("--yfloor must be positive"));
    }
    let (alphas, forms) = line_forms(ctx, k, trunc_for_line(k, ctx.cfg.window_b, yfloor))?;
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for f in &forms {
        let r = zeros::real_zero_scan(f, geo, yfloor)?;
        failures.extend(zero_failures(&r));
        reports.push(zero_report_json(&r));
    }
    let body = json!({
        "k": k,
        "geodesic": geo.alpha(),
        "y_floor": yfloor,
        "alphas": alphas.iter().map(alpha_json).collect::<Vec<_>>(),
        "reports": reports,
    });
    Ok(Report {
        body: Body::Json(body),
        failures,
    })
}

fn signchanges(ctx: &Context, k: u32, x: u64, h: u64, step: u64) -> Result<Report, CliError> {
    if x == 0 || step == 0 {
        return Err(usage("--X and --step must be positive"));
    }
    let (_, forms) = line_forms(ctx, k, (2 * x + h) as usize)?;
    let mut rows = Vec::new();
    for f in &forms {
        let t = zeros::short_interval_stats(f, x, h, step, ctx.cfg.filter)?;
        for r in &t.rows {
            rows.push(vec![
                t.g_id.clone(),
                r.x.to_string(),
                h.to_string(),
                r.s1.to_string(),
                r.s_abs.to_string(),
                r.count.to_string(),
                r.flagged.to_string(),
                t.threshold.to_string(),
            ]);
        }
    }
    Ok(Report {
        body: Body::Csv {
            columns: vec![
                "g_id",
                "x",
                "h",
                "s1",
                "s_abs",
                "count",
                "flagged",
                "threshold",
            ],
            rows,
        },
        failures: Vec::new(),
    })
}

pub fn moment_json(r: &MomentReport) -> Value {
    let cells: Vec<Value> = r
        .cells
        .iter()
        .map(|c| {
            json!({
                "k": c.k,
                "g_id": c.g_id,
                "d": c.d,
                "reference_d": c.reference_d,
                "weight": c.weight,
                "coeff_route": c.coeff_route,
                "l_route": c.l_route,
            })
        })
        .collect();
    json!({
        "moment": r.moment,
        "K": r.big_k,
        "X": r.x,
        "filter": r.filter.name(),
        "convention": r.convention,
        "route_a": r.route_a,
        "route_b": r.route_b,
        "agreement": r.agreement,
        "predicted": r.predicted,
        "prediction_terms": r.prediction_terms,
        "deviation": r.deviation,
        "cells": cells,
    })
}

/// Weight data for every k in the support of h, built in parallel.
pub fn moment_data(
    ctx: &Context,
    big_k: u32,
    x: f64,
    tf: &TestFunctionPair,
) -> Result<Vec<WeightData>, CliError> {
    let ks: Vec<u32> = moments::k_range(big_k, &tf.h)
        .into_iter()
        .filter(|&k| classical::dim_cusp(2 * k) > 0)
        .collect();
    let d_max = (tf.phi.support().1 * x).floor() as u64;
    thread::scope(|s| {
        let handles: Vec<_> = ks
            .iter()
            .map(|&k| {
                s.spawn(move || {
                    ctx.eigenpairs(k, d_max as usize)
                        .and_then(|p| ctx.weight_data(k, p, d_max))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

fn moment_reports(ctx: &Context, big_k: u32, x: f64) -> Result<Report, CliError> {
    if big_k < 2 || !(x >= 1.0 && x.is_finite()) {
        return Err(usage("need K >= 2 and X >= 1"));
    }
    let tf = TestFunctionPair::standard();
    let data = moment_data(ctx, big_k, x, &tf)?;
    let s1 = moments::s1_empirical(big_k, x, &tf, &data, ctx.cfg.filter)?;
    let s2 = moments::s2_empirical(big_k, x, &tf, &data, ctx.cfg.filter)?;
    let mut failures = Vec::new();
    for r in [&s1, &s2] {
        if !(r.agreement < ctx.cfg.verify_tol) {
            failures.push(Failure::new(
                format!(
                    "moment {} at K = {big_k}, X = {x}: coefficient route = L-value route",
                    r.moment
                ),
                r.route_a,
                r.route_b,
            ));
        }
    }
    let xk = x * big_k as f64;
    let zeta2 = PI * PI / 6.0;
    let body = json!({
        "reports": [moment_json(&s1), moment_json(&s2)],
        "normalizations": {
            "xk_over_pi2": xk / (PI * PI),
            "xk_over_6zeta2": xk / (6.0 * zeta2),
        },
    });
    Ok(Report {
        body: Body::Json(body),
        failures,
    })
}

/// Odd squarefree d ≤ 15, c ≤ 30, every admissible (v, η).
fn twisted_grid(form: ClosedForm, failures: &mut Vec<Failure>) -> Value {
    let mut rows = Vec::new();
    let mut max_res: f64 = 0.0;
    for d in (1..=15u64).filter(|&d| d % 2 == 1 && arith::is_squarefree(d)) {
        for c in 1..=30u64 {
            let want = match form {
                ClosedForm::Stated => charsums::twisted_charsum_reference(d, c),
                ClosedForm::Ramanujan => charsums::twisted_charsum_ramanujan(d, c),
            };
            for (v, eta) in charsums::admissible_pairs(d, c) {
                let got = charsums::twisted_charsum(d, c, v, eta)
                    .expect("admissible")
                    .value;
                let res = (got - want).norm() / want.abs().max(1.0);
                max_res = max_res.max(res);
                if !(res < GRID_TOL) {
                    failures.push(Failure::new(
                        format!("twisted character sum d = {d}, c = {c}, v = {v}, eta = {eta}"),
                        format!("{got}"),
                        want,
                    ));
                }
                rows.push(json!([d, c, v, eta, got.re, got.im, want, res]));
            }
        }
    }
    json!({
        "closed_form": match form { ClosedForm::Stated => "c^2 phi(d)/d", ClosedForm::Ramanujan => "c_d(c/d) c^2/d" },
        "columns": ["d", "c", "v", "eta", "re", "im", "expected", "residual"],
        "checks": rows,
        "max_residual": max_res,
    })
}

fn gauss_grid(failures: &mut Vec<Failure>) -> Value {
    let mut rows = Vec::new();
    let mut max_res: f64 = 0.0;
    for p in [3u64, 5, 7] {
        for beta in 1..=4u32 {
            let n = p.pow(beta);
            for l in 0..p.pow(4) as i64 {
                let a = charsums::gauss_tau_formula(l, n).expect("odd modulus");
                let b = charsums::gauss_tau_bruteforce(l, n).expect("odd modulus");
                let res = (a - b).norm();
                max_res = max_res.max(res);
                if !(res < 1e-9 * (n as f64).max(1.0)) {
                    failures.push(Failure::new(
                        format!("tau_{l}({p}^{beta}) table = direct sum"),
                        format!("{a}"),
                        format!("{b}"),
                    ));
                }
                rows.push(json!([p, beta, l, res]));
            }
        }
    }
    json!({ "columns": ["p", "beta", "l", "residual"], "checks": rows, "max_residual": max_res })
}

fn kloosterman_grid(failures: &mut Vec<Failure>) -> Value {
    let (mut checks, mut max_sym, mut max_weil): (usize, f64, f64) = (0, 0.0, 0.0);
    for c in 1..=100u64 {
        for m in 0..12i64 {
            for n in 0..12i64 {
                let a = charsums::kloosterman(m, n, c).value;
                let b = charsums::kloosterman(n, m, c).value;
                let g = arith::gcd(arith::gcd(m.unsigned_abs(), n.unsigned_abs()), c);
                let bound = arith::num_divisors(c) as f64 * (g as f64).sqrt() * (c as f64).sqrt();
                max_sym = max_sym.max((a - b).norm());
                max_weil = max_weil.max(a.norm() / bound);
                checks += 1;
                if (a - b).norm() > 1e-9 * c as f64 || a.norm() > bound * (1.0 + 1e-9) {
                    failures.push(Failure::new(
                        format!("S({m},{n};{c}) symmetry and Weil bound"),
                        format!("{a}"),
                        format!("{b}, bound {bound}"),
                    ));
                }
            }
        }
    }
    json!({ "checks": checks, "max_symmetry_residual": max_sym, "max_weil_ratio": max_weil })
}

fn poisson_grid(failures: &mut Vec<Failure>) -> Value {
    let f = GaussianTest { width: 40.0 };
    let mut rows = Vec::new();
    for (n, q) in [(1u64, 16u64), (3, 16), (15, 16)] {
        for eta in (1..16i64).step_by(2) {
            let r = charsums::twisted_poisson_residual(n, q, eta, f).expect("coprime data");
            if !(r.residual < 1e-9) {
                failures.push(Failure::new(
                    format!("twisted Poisson n = {n}, q = {q}, eta = {eta}"),
                    r.lhs,
                    format!("{}", r.rhs),
                ));
            }
            rows.push(json!({ "n": n, "q": q, "eta": eta, "lhs": r.lhs, "rhs_re": r.rhs.re, "rhs_im": r.rhs.im, "residual": r.residual }));
        }
    }
    json!({ "width": f.width, "checks": rows })
}

fn charsum_grid(form: ClosedForm) -> Report {
    let mut failures = Vec::new();
    let body = json!({
        "twisted": twisted_grid(form, &mut failures),
        "gauss": gauss_grid(&mut failures),
        "kloosterman": kloosterman_grid(&mut failures),
        "poisson": poisson_grid(&mut failures),
    });
    Report {
        body: Body::Json(body),
        failures,
    }
}

fn constants(cfg: &RunConfig) -> Report {
    let p = cfg.p_max;
    let g_lo = moments::euler_g0(p / 10);
    let g = moments::euler_g0(p);
    let c = moments::constant_c(p);
    let c2 = moments::constant_c(2 * p);
    let mut failures = Vec::new();
    let dg = (g.value - g_lo.value).abs();
    if !(dg < 1e-8) {
        failures.push(Failure::new(
            format!("G(0) stable between p <= {} and p <= {p}", p / 10),
            g_lo.value,
            g.value,
        ));
    }
    let dc = (c.value - c2.value).abs();
    if !(dc < 1e-6) {
        failures.push(Failure::new(
            format!("C stable between p <= {p} and p <= {}", 2 * p),
            c.value,
            c2.value,
        ));
    }
    let body = json!({
        "g0": { "p_max": p, "value": g.value, "raw": g.raw, "raw_tail_bound": g.raw_tail_bound, "tail_bound": g.tail_bound },
        "g0_coarse": { "p_max": p / 10, "value": g_lo.value },
        "g0_stability": dg,
        "g0_prime": c.g0_prime,
        "euler_gamma": c.gamma,
        "zeta_prime_2": moments::zeta_prime_2(),
        "zeta_log_derivative_2": c.zeta_ratio,
        "c": c.value,
        "c_doubled": { "p_max": 2 * p, "value": c2.value },
        "c_stability": dc,
        "main_term_factor": { "xk_over_pi2": 1.0 / (PI * PI), "xk_over_6zeta2": 1.0 / (PI * PI) },
    });
    Report {
        body: Body::Json(body),
        failures,
    }
}

fn selftest(ctx: &Context) -> Result<Report, CliError> {
    let mut failures = Vec::new();
    let mut sections = Vec::new();
    let before = failures.len();
    let grid = charsum_grid(ClosedForm::Ramanujan);
    failures.extend(grid.failures);
    sections.push(json!({ "name": "character sums", "failures": failures.len() - before }));

    let before = failures.len();
    let mut checked = 0;
    for k in [6u32, 8, 9, 10, 11] {
        let pairs = ctx.eigenpairs(k, 400 * 40)?;
        for p in &pairs {
            for d in arith::discriminants_for(k, 40, DiscriminantFilter::Fundamental) {
                for n in 1..=20u64 {
                    let c = halfint::shimura_identity_check(p, d, n)?;
                    checked += 1;
                    if !c.holds {
                        failures.push(Failure::new(
                            format!("{}: a_g(n²|d|) identity at d = {d}, n = {n}", p.g.id),
                            elem_string(&c.lhs),
                            elem_string(&c.rhs),
                        ));
                    }
                }
            }
        }
    }
    sections.push(json!({ "name": "Shimura identities", "checks": checked, "failures": failures.len() - before }));

    let before = failures.len();
    let mut max_res: f64 = 0.0;
    for w in [12u32, 16, 18, 20, 22, 26] {
        let fs: Vec<EigenData> = classical::eigenbasis_level1(w, 64)?;
        let hw = lfunctions::omega_f_solve(&fs, ctx.cfg.trace_tol)?;
        for m in 1..=4 {
            for n in 1..=4 {
                let r = lfunctions::petersson_residual(&fs, &hw, m, n)?;
                max_res = max_res.max(r.residual);
                if !(r.residual < 1e-8) {
                    failures.push(Failure::new(
                        format!("Petersson weight {w} ({m},{n})"),
                        r.spectral,
                        r.geometric,
                    ));
                }
            }
        }
    }
    sections.push(json!({ "name": "Petersson residuals", "max_residual": max_res, "failures": failures.len() - before }));
    Ok(Report {
        body: Body::Json(json!({ "sections": sections })),
        failures,
    })
}
