//! One function per subcommand, each producing check reports.

use std::time::Instant;

use diffvir_core::checks::{
    run_criterion, sort_reports, suite, CheckReport, Profile, BETA_DERIVATIVE_TOL, COMMUTATOR_TOL, CRITERIA,
    FRAGMENT_TOL, PSD_TOL, ROTATION_TOL,
};
use diffvir_core::diffeo::{beta, beta_derivative_check, cocycle_coboundary, gelfand_fuchs, virasoro_cocycle};
use diffvir_core::oracle::{commutator_reduce, Oracle, VirasoroWord};
use diffvir_core::virasoro::{
    direct_sum, discrete_series_c, discrete_series_h, discrete_series_pairs, phase_align, rotation_2pi_scalar_defect,
    rotation_2pi_scalar_defect_unchecked, SeriesConvention,
};
use diffvir_core::{
    CentralCharge, CircleDiffeo, FragmentationCover, LowestWeight, ModuleTruncation, QuadratureGrid, SpectralFunction,
};
use serde_json::{json, Value};

use crate::specs::{parse_diffeo, parse_field};
use crate::{CliError, CocycleKind, Command, Common, Convention, FieldOp, UsageError};

const DEFAULT_C: f64 = 1.0;
const DEFAULT_H: f64 = 0.0;
const DEFAULT_N: usize = 8;
const DEFAULT_GRID: usize = 64;
/// Default bound on `sup|γ ∘ γ⁻¹ − ι|` for `invert`.
const INVERSE_TOL: f64 = 1e-9;

pub struct Output {
    pub reports: Vec<CheckReport>,
    /// Extra trailing lines (the suite summary).
    pub summary: Option<String>,
}

impl From<CheckReport> for Output {
    fn from(r: CheckReport) -> Self {
        Self { reports: vec![r], summary: None }
    }
}

type Res<T> = Result<T, CliError>;

fn field(spec: &str) -> Res<SpectralFunction> {
    Ok(parse_field(spec)?)
}

fn diffeo(spec: &str) -> Res<CircleDiffeo> {
    Ok(parse_diffeo(spec)??)
}

fn required<'a>(value: &'a Option<String>, flag: &str) -> Res<&'a str> {
    value.as_deref().ok_or_else(|| UsageError(format!("--{flag} is required here")).into())
}

fn to_json<T: serde::Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("values serialize")
}

impl Common {
    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn c(&self) -> f64 {
        self.c.unwrap_or(DEFAULT_C)
    }

    fn n(&self) -> usize {
        self.n.unwrap_or(DEFAULT_N)
    }

    fn grid(&self) -> Res<QuadratureGrid> {
        Ok(QuadratureGrid::new(self.grid.unwrap_or(DEFAULT_GRID))?)
    }

    /// The single lowest weight of a one-module command.
    fn weight(&self) -> Res<LowestWeight> {
        let h = match self.h.as_slice() {
            [] => DEFAULT_H,
            [h] => *h,
            _ => return Err(UsageError("this subcommand takes a single --h".into()).into()),
        };
        Ok(LowestWeight::new(self.c(), h))
    }

    fn module(&self) -> Res<ModuleTruncation> {
        Ok(ModuleTruncation::build(self.weight()?, self.n(), false)?)
    }

    fn blocks(&self) -> Res<Vec<ModuleTruncation>> {
        if self.h.is_empty() {
            return Err(UsageError("--h needs at least one weight".into()).into());
        }
        self.h.iter().map(|&h| Ok(ModuleTruncation::build(LowestWeight::new(self.c(), h), self.n(), false)?)).collect()
    }

    fn module_params(&self) -> Res<Value> {
        let w = self.weight()?;
        Ok(json!({ "c": w.c, "h": w.h, "N": self.n() }))
    }
}

pub fn run(command: &Command, common: &Common) -> Res<Output> {
    let tol = common.tol(f64::INFINITY);
    let report = match command {
        Command::Field { op, f, g, values, target } => field_op(*op, f, g, values, *target, common)?,
        Command::Norm { f, gagliardo } => {
            let s = common.s.ok_or_else(|| UsageError("--s is required".into()))?;
            let fun = field(f)?;
            if *gagliardo {
                let grid = common.grid()?;
                let value = fun.gagliardo_seminorm(s, &grid)?;
                CheckReport::operation(
                    "gagliardo_seminorm",
                    json!({ "f": f, "s": s, "grid": grid.points() }),
                    value,
                    tol,
                )
            } else {
                CheckReport::operation("sobolev_norm", json!({ "f": f, "s": s }), fun.sobolev_norm(s), tol)
            }
        }
        Command::S32 { f } => CheckReport::operation("s32_norm", json!({ "f": f }), field(f)?.s32_norm(), tol),
        Command::Diffeo { gamma } => {
            let g = diffeo(gamma)?;
            CheckReport::operation("make_diffeo", json!({ "gamma": gamma }), g.min_derivative(), tol)
                .with_result(to_json(g.periodic_part()))
        }
        Command::Compose { gamma1, gamma2 } => {
            let g = diffeo(gamma1)?.compose(&diffeo(gamma2)?);
            CheckReport::operation("compose", json!({ "gamma1": gamma1, "gamma2": gamma2 }), g.sup_deviation(), tol)
                .with_result(to_json(g.periodic_part()))
        }
        Command::Invert { gamma } => {
            let g = diffeo(gamma)?;
            let inv = g.invert()?;
            let defect = g.compose(&inv).sup_deviation();
            CheckReport::operation("invert", json!({ "gamma": gamma }), defect, common.tol(INVERSE_TOL))
                .with_result(to_json(inv.periodic_part()))
        }
        Command::Pushforward { gamma, f } => {
            let out = diffeo(gamma)?.pushforward(&field(f)?)?;
            CheckReport::operation("pushforward", json!({ "gamma": gamma, "f": f }), out.sup_norm(), tol)
                .with_result(to_json(&out))
        }
        Command::Schwarzian { gamma } => {
            let grid = common.grid()?;
            let values = diffeo(gamma)?.schwarzian(&grid);
            let sup = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let rows: Vec<Value> = values.iter().enumerate().map(|(j, z)| json!([grid.node(j), z.re, z.im])).collect();
            CheckReport::operation("schwarzian", json!({ "gamma": gamma, "grid": grid.points() }), sup, tol)
                .with_result(Value::Array(rows))
        }
        Command::Beta { gamma, f, g, derivative, step } => {
            let c = CentralCharge(common.c());
            if *derivative {
                let g = required(g, "g")?;
                let value = beta_derivative_check(c, &field(f)?, &field(g)?, *step)?;
                CheckReport::operation(
                    "beta_derivative_check",
                    json!({ "c": c.0, "f": f, "g": g, "step": step }),
                    value,
                    common.tol(BETA_DERIVATIVE_TOL),
                )
            } else {
                let gamma = required(gamma, "gamma")?;
                let value = beta(c, &diffeo(gamma)?, &field(f)?);
                CheckReport::operation("beta", json!({ "c": c.0, "gamma": gamma, "f": f }), value, tol)
            }
        }
        Command::Omega { f, g, kind } => {
            let (ff, gg) = (field(f)?, field(g)?);
            let (name, value) = match kind {
                CocycleKind::Printed => ("gelfand_fuchs", gelfand_fuchs(&ff, &gg)),
                CocycleKind::Bracket => ("virasoro_cocycle", virasoro_cocycle(&ff, &gg)),
                CocycleKind::Coboundary => ("cocycle_coboundary", cocycle_coboundary(&ff, &gg)),
            };
            CheckReport::operation(name, json!({ "f": f, "g": g }), value, tol)
        }
        Command::Expflow { f, t } => {
            let g = CircleDiffeo::exp_flow(&field(f)?, *t)?;
            CheckReport::operation("exp_flow", json!({ "f": f, "t": t }), g.sup_deviation(), tol)
                .with_result(to_json(g.periodic_part()))
        }
        Command::Mollify { f, gamma, width, cutoff } => match (f, gamma) {
            (Some(f), None) => {
                let fun = field(f)?;
                let out = fun.mollify(*width, *cutoff)?;
                let dist = (&fun - &out).sup_norm();
                CheckReport::operation("mollify", json!({ "f": f, "width": width, "cutoff": cutoff }), dist, tol)
                    .with_result(to_json(&out))
            }
            (None, Some(gamma)) => {
                let g = diffeo(gamma)?;
                let out = g.mollify(*width)?;
                let dist = out.sup_distance(&g);
                CheckReport::operation("mollify_diffeo", json!({ "gamma": gamma, "width": width }), dist, tol)
                    .with_result(to_json(out.periodic_part()))
            }
            _ => return Err(UsageError("mollify takes exactly one of --f and --gamma".into()).into()),
        },
        Command::Fragment { gamma, local } => fragment(gamma, *local, common)?,
        Command::Series { m, p, q, convention } => {
            let conv = match convention {
                Convention::Printed => SeriesConvention::Printed,
                Convention::Standard => SeriesConvention::Standard,
            };
            let c = discrete_series_c(*m, conv)?;
            let params = json!({ "m": m, "p": p, "q": q, "convention": format!("{convention:?}").to_lowercase() });
            match (p, q) {
                (Some(p), Some(q)) => {
                    let h = discrete_series_h(*m, *p, *q)?;
                    CheckReport::operation("discrete_series", params, c, tol).with_result(json!({ "c": c, "h": h }))
                }
                (None, None) => {
                    let pairs: Vec<Value> =
                        discrete_series_pairs(*m, conv)?.into_iter().map(|(c, h)| json!([c, h])).collect();
                    CheckReport::operation("discrete_series", params, c, tol).with_result(Value::Array(pairs))
                }
                _ => return Err(UsageError("give both --p and --q, or neither".into()).into()),
            }
        }
        Command::Gram { exact, unitary } => {
            if *exact {
                exact_gram(common)?
            } else {
                float_gram(*unitary, common)?
            }
        }
        Command::Lmatrix { mode } => {
            let m = common.module()?.l_matrix(*mode)?;
            let mut params = common.module_params()?;
            params["mode"] = json!(mode);
            CheckReport::operation("l_matrix", params, m.frobenius_norm(), tol).with_result(m.to_json())
        }
        Command::Tmatrix { f } => {
            let m = common.module()?.t_matrix(&field(f)?)?;
            let mut params = common.module_params()?;
            params["f"] = json!(f);
            CheckReport::operation("t_matrix", params, m.frobenius_norm(), tol).with_result(m.to_json())
        }
        Command::Tgamma { gamma, f } => {
            let m = common.module()?.t_gamma_matrix(&diffeo(gamma)?, &field(f)?)?;
            let mut params = common.module_params()?;
            params["gamma"] = json!(gamma);
            params["f"] = json!(f);
            CheckReport::operation("t_gamma_matrix", params, m.frobenius_norm(), tol).with_result(m.to_json())
        }
        Command::Commdefect { f, g } => {
            let (value, window) = common.module()?.commutator_defect(&field(f)?, &field(g)?)?;
            let mut params = common.module_params()?;
            params["f"] = json!(f);
            params["g"] = json!(g);
            CheckReport::operation("commutator_defect", params, value, common.tol(COMMUTATOR_TOL)).windowed(0, window)
        }
        Command::Energybound { f } => {
            let value = common.module()?.energy_bound_ratio(&field(f)?)?;
            let mut params = common.module_params()?;
            params["f"] = json!(f);
            CheckReport::operation("energy_bound_ratio", params, value, tol)
        }
        Command::ExpT { f } => {
            let s = common.s.unwrap_or(1.0);
            let u = common.module()?.exp_t(&field(f)?, s)?;
            let mut params = common.module_params()?;
            params["f"] = json!(f);
            params["s"] = json!(s);
            CheckReport::operation("exp_t", params, u.unitarity_residual(), tol).with_result(u.to_json())
        }
        Command::Covdefect { g, f, probe } => {
            let value = common.module()?.covariance_defect(&field(g)?, &field(f)?, *probe, common.seed)?;
            let mut params = common.module_params()?;
            params["g"] = json!(g);
            params["f"] = json!(f);
            params["probe"] = json!(probe);
            params["seed"] = json!(common.seed);
            CheckReport::operation("covariance_defect", params, value, tol)
        }
        Command::Align { f, g } => {
            let s = common.s.unwrap_or(1.0);
            let module = common.module()?;
            let u = module.exp_t(&field(f)?, s)?;
            let v = module.exp_t(&field(g)?, s)?;
            let (phase, distance) = phase_align(&u, &v)?;
            let mut params = common.module_params()?;
            params["f"] = json!(f);
            params["g"] = json!(g);
            params["s"] = json!(s);
            CheckReport::operation("phase_align", params, distance, tol)
                .with_result(json!({ "phase": [phase.re, phase.im] }))
        }
        Command::Directsum { f } => {
            let m = direct_sum(&common.blocks()?, &field(f)?)?;
            let params = json!({ "c": common.c(), "h": common.h, "N": common.n(), "f": f });
            CheckReport::operation("direct_sum", params, m.frobenius_norm(), tol).with_result(m.to_json())
        }
        Command::Rot2pi { unchecked } => {
            let blocks = common.blocks()?;
            let value = if *unchecked {
                rotation_2pi_scalar_defect_unchecked(&blocks)?
            } else {
                rotation_2pi_scalar_defect(&blocks)?
            };
            let params = json!({ "c": common.c(), "h": common.h, "N": common.n(), "unchecked": unchecked });
            CheckReport::operation("rotation_2pi_scalar_defect", params, value, common.tol(ROTATION_TOL))
        }
        Command::Oracle { word, parts, commutator, max_level } => oracle(word, parts, commutator, *max_level, tol)?,
        Command::Suite { criterion } => return run_suite(criterion, common),
    };
    Ok(report.into())
}

fn field_op(
    op: FieldOp,
    f: &Option<String>,
    g: &Option<String>,
    values: &[f64],
    target: usize,
    common: &Common,
) -> Res<CheckReport> {
    let tol = common.tol(f64::INFINITY);
    let report = match op {
        FieldOp::FromSamples => {
            let fun = SpectralFunction::from_samples(values)?;
            CheckReport::operation("from_samples", json!({ "samples": values.len() }), fun.sup_norm(), tol)
                .with_result(to_json(&fun))
        }
        FieldOp::Samples => {
            let spec = required(f, "f")?;
            let grid = common.grid()?;
            let samples = field(spec)?.to_samples(&grid);
            let sup = samples.iter().map(|v| v.abs()).fold(0.0, f64::max);
            CheckReport::operation("to_samples", json!({ "f": spec, "grid": grid.points() }), sup, tol)
                .with_result(to_json(&samples))
        }
        FieldOp::Derivative => {
            let spec = required(f, "f")?;
            let out = field(spec)?.derivative();
            CheckReport::operation("derivative", json!({ "f": spec }), out.sup_norm(), tol).with_result(to_json(&out))
        }
        FieldOp::Multiply => {
            let (fs, gs) = (required(f, "f")?, required(g, "g")?);
            let out = field(fs)?.multiply(&field(gs)?);
            CheckReport::operation("multiply", json!({ "f": fs, "g": gs }), out.sup_norm(), tol)
                .with_result(to_json(&out))
        }
        FieldOp::Reciprocal => {
            let spec = required(f, "f")?;
            let (out, residual) = field(spec)?.reciprocal_one_plus(target)?;
            CheckReport::operation("reciprocal_one_plus", json!({ "f": spec, "target": target }), residual, tol)
                .with_result(to_json(&out))
        }
    };
    Ok(report)
}

fn fragment(gamma: &str, local: Option<usize>, common: &Common) -> Res<CheckReport> {
    let cover = FragmentationCover::default();
    let k = cover.resolution();
    let g = diffeo(gamma)?;
    let tol = common.tol(FRAGMENT_TOL);
    let params = json!({ "gamma": gamma, "local": local, "epsilon": cover.epsilon(), "resolution": k });
    let (name, factors) = match local {
        Some(idx) => {
            let (a, b) = cover.fragment_local(&g, idx)?;
            ("fragment_local", vec![a, b])
        }
        None => {
            let (a, b, c) = cover.fragment(&g)?;
            ("fragment", vec![a, b, c])
        }
    };
    let product =
        factors.iter().rev().skip(1).fold(factors.last().expect("factors").clone(), |acc, f| f.compose_at(&acc, k));
    let error = product.sup_distance(&g);
    let result: Vec<Value> = factors.iter().map(|f| to_json(f.periodic_part())).collect();
    Ok(CheckReport::operation(name, params, error, tol).with_result(Value::Array(result)))
}

fn float_gram(unitary: bool, common: &Common) -> Res<CheckReport> {
    let module = ModuleTruncation::build(common.weight()?, common.n(), unitary)?;
    let mut lowest = f64::INFINITY;
    let levels: Vec<Value> = (0..=module.level_cap())
        .map(|level| {
            let gram = module.gram(level);
            let eigen = gram.symmetric_eigenvalues();
            lowest = lowest.min(eigen.min());
            let rows: Vec<Vec<f64>> = gram.row_iter().map(|r| r.iter().copied().collect()).collect();
            json!({
                "level": level,
                "basis": module.basis(level),
                "gram": rows,
                "quotient_dim": module.signature(level).len(),
            })
        })
        .collect();
    let mut params = common.module_params()?;
    params["unitary_mode"] = json!(unitary);
    // −λ_min, so that a positive semidefinite form passes.
    Ok(CheckReport::operation("gram", params, -lowest, common.tol(PSD_TOL)).with_result(Value::Array(levels)))
}

fn exact_gram(common: &Common) -> Res<CheckReport> {
    let max_level = common.n();
    let mut oracle = Oracle::new(max_level);
    let levels = (0..=max_level)
        .map(|level| {
            let m = oracle.shapovalov_matrix(level)?;
            let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
            Ok(json!({ "level": level, "basis": diffvir_core::partition::partitions(level as u32), "gram": rows }))
        })
        .collect::<diffvir_core::Result<Vec<Value>>>()?;
    Ok(CheckReport::operation("shapovalov_matrix", json!({ "max_level": max_level }), 0.0, f64::INFINITY)
        .with_result(Value::Array(levels)))
}

fn oracle(word: &[i64], parts: &[u32], commutator: &[i64], max_level: usize, tol: f64) -> Res<CheckReport> {
    match (commutator, word.is_empty()) {
        ([n, m], true) => {
            let words: Vec<Value> = commutator_reduce(*n, *m)
                .into_iter()
                .map(|w| json!({ "modes": w.modes, "coefficient": w.coefficient.to_string() }))
                .collect();
            Ok(CheckReport::operation("commutator_reduce", json!({ "n": n, "m": m }), words.len() as f64, tol)
                .with_result(Value::Array(words)))
        }
        ([], false) => {
            let mut oracle = Oracle::new(max_level);
            let poly = oracle.normal_order(&VirasoroWord::new(word.to_vec()), parts)?;
            Ok(CheckReport::operation(
                "normal_order",
                json!({ "word": word, "parts": parts, "max_level": max_level }),
                poly.terms().count() as f64,
                tol,
            )
            .with_result(json!(poly.to_string())))
        }
        _ => Err(UsageError("give either --word (with optional --parts) or --commutator n,m".into()).into()),
    }
}

fn run_suite(criteria: &[u8], common: &Common) -> Res<Output> {
    let profile = Profile::from(common.profile);
    let start = Instant::now();
    let reports = if criteria.is_empty() {
        suite(profile, common.seed, common.timings)
    } else {
        if let Some(bad) = criteria.iter().find(|c| !CRITERIA.contains(c)) {
            return Err(UsageError(format!("no criterion {bad}; criteria are 1..=12")).into());
        }
        let mut out = Vec::new();
        for &id in criteria {
            let t = Instant::now();
            let mut rs = run_criterion(id, profile, common.seed);
            if common.timings {
                let ms = t.elapsed().as_millis() as u64;
                rs.iter_mut().for_each(|r| r.runtime_ms = Some(ms));
            }
            out.extend(rs);
        }
        sort_reports(&mut out);
        out
    };
    let passed = reports.iter().filter(|r| r.pass).count();
    let mut summary = json!({
        "summary": {
            "profile": profile,
            "seed": common.seed,
            "checks": reports.len(),
            "passed": passed,
            "failed": reports.len() - passed,
        }
    });
    if common.timings {
        summary["summary"]["runtime_ms"] = json!(start.elapsed().as_millis() as u64);
    }
    Ok(Output { reports, summary: Some(summary.to_string()) })
}
