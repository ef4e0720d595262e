//! Named property checks shared by the CLI suite and the acceptance tests.
//!
//! Every check returns [`CheckReport`]s whose `pass` flag is decided here, with
//! tolerances pinned as constants. Randomness flows from a single seed; each
//! criterion derives its own stream so results do not depend on execution order.

use std::time::Instant;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::diffeo::{
    beta, beta_derivative_check, cocycle_coboundary, gelfand_fuchs, CentralCharge, CircleDiffeo, FragmentationCover,
};
use crate::error::{Error, Result};
use crate::oracle::{rational, Oracle};
use crate::spectral::{QuadratureGrid, SpectralFunction};
use crate::virasoro::{
    direct_sum, rotation_2pi_scalar_defect, rotation_2pi_scalar_defect_unchecked, LowestWeight, ModuleTruncation,
};

pub const DEFAULT_SEED: u64 = 2024;

pub const GRAM_REL_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-9;
pub const COMMUTATOR_TOL: f64 = 1e-9;
pub const COCYCLE_TOL: f64 = 1e-8;
pub const BETA_DERIVATIVE_TOL: f64 = 1e-5;
pub const BETA_DERIVATIVE_STEP: f64 = 1e-3;
pub const OMEGA_TOL: f64 = 1e-10;
pub const COMPOSITION_TOL: f64 = 1e-7;
/// Best energy-bound constant for `(c, h) = (1, 0)`, `f = cos θ` at `N = 12`,
/// recorded at first computation.
pub const ENERGY_FIXTURE: f64 = 0.417_104_066_065_610;
pub const ENERGY_FIXTURE_SLACK: f64 = 1e-6;
pub const FRAGMENT_TOL: f64 = 1e-9;
pub const ROTATION_TOL: f64 = 1e-10;
/// Largest relative change of an empirical constant under a cutoff doubling.
pub const STABILITY_TOL: f64 = 0.25;

/// Which parameter set to run: `Quick` keeps `N ≤ 8` and small sample counts,
/// `Full` uses the acceptance parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Quick,
    Full,
}

impl Profile {
    fn pick<T>(self, quick: T, full: T) -> T {
        match self {
            Profile::Quick => quick,
            Profile::Full => full,
        }
    }
}

/// One check outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    /// Acceptance criterion the check belongs to; absent for single operations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criterion: Option<u8>,
    pub params: Value,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[usize; 2]>,
    pub pass: bool,
    /// Serialized as `null` when unbounded.
    #[serde(deserialize_with = "tolerance_or_unbounded")]
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
    /// Payload of a single operation (a function, a matrix, factors, ...).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
}

fn tolerance_or_unbounded<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

impl CheckReport {
    /// Defect-type report: passes when `value ≤ tolerance`.
    pub fn defect(name: &str, criterion: u8, params: Value, value: f64, tolerance: f64) -> Self {
        Self::with_pass(name, criterion, params, value, tolerance, value <= tolerance)
    }

    /// Passes when `value < tolerance` strictly.
    pub fn strict(name: &str, criterion: u8, params: Value, value: f64, tolerance: f64) -> Self {
        Self::with_pass(name, criterion, params, value, tolerance, value < tolerance)
    }

    pub fn with_pass(name: &str, criterion: u8, params: Value, value: f64, tolerance: f64, pass: bool) -> Self {
        Self {
            check_name: name.to_string(),
            criterion: Some(criterion),
            params,
            value,
            window: None,
            pass: pass && value.is_finite(),
            tolerance,
            runtime_ms: None,
            result: None,
        }
    }

    /// Report of a single operation outside the acceptance suite. Passes when
    /// `value ≤ tolerance`; use `f64::INFINITY` for an unbounded value.
    pub fn operation(name: &str, params: Value, value: f64, tolerance: f64) -> Self {
        Self { criterion: None, ..Self::defect(name, 0, params, value, tolerance) }
    }

    pub fn with_result(mut self, result: Value) -> Self {
        self.result = Some(result);
        self
    }

    fn failed(name: &str, criterion: u8, err: &Error) -> Self {
        Self::with_pass(name, criterion, json!({ "error": err.to_string() }), f64::NAN, 0.0, false)
    }

    pub fn windowed(mut self, lo: usize, hi: usize) -> Self {
        self.window = Some([lo, hi]);
        self
    }
}

/// Canonical ordering: by check name, then by serialized parameters.
pub fn sort_reports(reports: &mut [CheckReport]) {
    reports.sort_by_cached_key(|r| (r.check_name.clone(), r.params.to_string()));
}

pub const CRITERIA: [u8; 12] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12];

/// Runs one criterion. Numerical errors become failed reports rather than
/// aborting the run.
pub fn run_criterion(criterion: u8, profile: Profile, seed: u64) -> Vec<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (u64::from(criterion) << 40));
    let (name, outcome) = match criterion {
        1 => ("gram_oracle", gram_oracle(profile, &mut rng)),
        2 => ("unitarity_grid", unitarity(profile)),
        3 => ("virasoro_relation", virasoro_relation(profile)),
        4 => ("beta_cocycle", beta_cocycle(profile, &mut rng)),
        5 => ("beta_derivative", beta_derivative(profile, &mut rng)),
        6 => ("operator_composition", operator_composition(profile, &mut rng)),
        7 => ("energy_bound", energy_bound(profile)),
        8 => ("fragment", fragmentation(profile, &mut rng)),
        9 => ("rot2pi", rotation_scalar()),
        10 => ("mollifier", mollifier(profile, &mut rng)),
        11 => ("covariance_decrease", covariance(profile, seed)),
        12 => ("sobolev", sobolev(profile, &mut rng)),
        other => ("unknown", Err(Error::InvalidArgument(format!("no criterion {other}")))),
    };
    outcome.unwrap_or_else(|e| vec![CheckReport::failed(name, criterion, &e)])
}

/// Every criterion, run in parallel and returned in canonical order.
pub fn suite(profile: Profile, seed: u64, timings: bool) -> Vec<CheckReport> {
    let mut reports: Vec<CheckReport> = CRITERIA
        .par_iter()
        .flat_map_iter(|&id| {
            let start = Instant::now();
            let mut out = run_criterion(id, profile, seed);
            if timings {
                let ms = start.elapsed().as_millis() as u64;
                out.iter_mut().for_each(|r| r.runtime_ms = Some(ms));
            }
            out
        })
        .collect();
    sort_reports(&mut reports);
    reports
}

/// Random trigonometric polynomial of the given degree with coefficients
/// uniform in `[−1, 1]`.
pub fn random_field(rng: &mut impl Rng, degree: usize) -> SpectralFunction {
    let a: Vec<f64> = (0..=degree).map(|_| rng.random_range(-1.0..1.0)).collect();
    let b: Vec<f64> = (0..=degree).map(|_| rng.random_range(-1.0..1.0)).collect();
    SpectralFunction::from_trig(&a, &b)
}

/// Random diffeomorphism of degree `degree` with `sup|γ − ι|` in
/// `[max_dev/2, max_dev)`.
pub fn random_diffeo(rng: &mut impl Rng, degree: usize, max_dev: f64) -> Result<CircleDiffeo> {
    let p = random_field(rng, degree);
    let target = max_dev * rng.random_range(0.5..0.999);
    CircleDiffeo::new(p.scale(target / p.sup_norm().max(1e-300)))
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn gram_oracle(profile: Profile, rng: &mut ChaCha8Rng) -> Result<Vec<CheckReport>> {
    let max_level = profile.pick(4, 6);
    let samples = profile.pick(5, 20);
    let mut oracle = Oracle::new(max_level);
    let exact = (0..=max_level).map(|k| oracle.shapovalov_matrix(k)).collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let c = rational(rng.random_range(1..=60), rng.random_range(1..=12));
        let h = rational(rng.random_range(0..=40), rng.random_range(1..=12));
        let module = ModuleTruncation::build(LowestWeight::new(to_f64(&c), to_f64(&h)), max_level, false)?;
        for (level, matrix) in exact.iter().enumerate() {
            let gram = module.gram(level);
            for (i, row) in matrix.iter().enumerate() {
                for (j, entry) in row.iter().enumerate() {
                    let truth = to_f64(&entry.eval(&c, &h));
                    let err = (gram[(i, j)] - truth).abs();
                    worst = worst.max(if truth == 0.0 { err } else { err / truth.abs() });
                }
            }
        }
    }
    let params = json!({ "samples": samples, "max_level": max_level });
    Ok(vec![CheckReport::defect("gram_oracle", 1, params, worst, GRAM_REL_TOL)])
}

fn min_gram_eigenvalue(module: &ModuleTruncation) -> f64 {
    (0..=module.level_cap())
        .map(|k| module.gram(k))
        .filter(|g| g.nrows() > 0)
        .map(|g| g.symmetric_eigenvalues().min())
        .fold(f64::INFINITY, f64::min)
}

fn unitarity(profile: Profile) -> Result<Vec<CheckReport>> {
    let max_level = profile.pick(4, 6);
    let points = profile.pick(4, 10);
    let grid: Vec<(f64, f64)> = (0..points)
        .flat_map(|i| {
            (0..points).map(move |j| {
                let t = |k: usize| k as f64 / (points - 1) as f64;
                (1.0 + 2.0 * t(i), 2.0 * t(j))
            })
        })
        .collect();
    let lowest = grid
        .par_iter()
        .map(|&(c, h)| {
            ModuleTruncation::build(LowestWeight::new(c, h), max_level, false).map(|m| min_gram_eigenvalue(&m))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let grid_params = json!({ "c": [1.0, 3.0], "h": [0.0, 2.0], "points": points, "max_level": max_level });
    // Report −λ_min so the defect convention (pass when ≤ tolerance) applies.
    let grid_report = CheckReport::defect("unitarity_grid", 2, grid_params, -lowest, PSD_TOL);

    let weight = LowestWeight::new(0.4, 0.3);
    let probe = ModuleTruncation::build(weight, 8, false)?;
    let (found, level) = (0..=8)
        .map(|k| (probe.gram(k).symmetric_eigenvalues().min(), k))
        .fold((f64::INFINITY, 0), |acc, x| if x.0 < acc.0 { x } else { acc });
    let rejected = matches!(ModuleTruncation::build(weight, 8, true), Err(Error::NonUnitary { .. }));
    let params = json!({ "c": 0.4, "h": 0.3, "max_level": 8, "level": level, "unitary_mode_rejects": rejected });
    let detect =
        CheckReport::with_pass("nonunitary_detection", 2, params, found, -PSD_TOL, found < -PSD_TOL && rejected);
    Ok(vec![grid_report, detect])
}

/// `1, cos kθ, sin kθ` for `k ≤ degree`.
pub fn basis_fields(degree: usize) -> Vec<(String, SpectralFunction)> {
    let mut out = vec![("1".to_string(), SpectralFunction::constant(1.0))];
    for k in 1..=degree {
        out.push((format!("cos{k}"), SpectralFunction::cos(k)));
        out.push((format!("sin{k}"), SpectralFunction::sin(k)));
    }
    out
}

fn virasoro_relation(profile: Profile) -> Result<Vec<CheckReport>> {
    let n = profile.pick(8, 12);
    let fields = basis_fields(3);
    let per_weight = [(1.0, 0.0), (1.0, 0.5), (0.8, 0.0)]
        .par_iter()
        .map(|&(c, h)| {
            let module = ModuleTruncation::build(LowestWeight::new(c, h), n, true)?;
            let mut worst = 0.0f64;
            let mut gap = 0.0f64;
            let mut smallest_window = n;
            for (_, f) in &fields {
                for (_, g) in &fields {
                    let (d, w) = module.commutator_defect(f, g)?;
                    worst = worst.max(d);
                    smallest_window = smallest_window.min(w);
                    // With the printed integral the residual is the scalar
                    // −c·(coboundary)(g, f) on the window, exactly.
                    let (printed, _) = module.commutator_defect_with(f, g, gelfand_fuchs)?;
                    let expected = (c * cocycle_coboundary(g, f)).abs() * (module.level_offsets()[w + 1] as f64).sqrt();
                    gap = gap.max((printed - expected).abs());
                }
            }
            let params = json!({ "c": c, "h": h, "N": n, "pairs": fields.len() * fields.len() });
            Ok([
                CheckReport::defect("virasoro_relation", 3, params.clone(), worst, COMMUTATOR_TOL)
                    .windowed(0, smallest_window),
                CheckReport::defect("printed_omega_gap", 3, params, gap, COMMUTATOR_TOL).windowed(0, smallest_window),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_weight.into_iter().flatten().collect())
}

fn beta_cocycle(profile: Profile, rng: &mut ChaCha8Rng) -> Result<Vec<CheckReport>> {
    let samples = profile.pick(10, 50);
    let c = CentralCharge(1.0);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let g1 = random_diffeo(rng, 4, 0.05)?;
        let g2 = random_diffeo(rng, 4, 0.05)?;
        let f = random_field(rng, 3);
        let lhs = beta(c, &g1.compose(&g2), &f);
        let rhs = beta(c, &g1, &g2.pushforward(&f)?) + beta(c, &g2, &f);
        worst = worst.max((lhs - rhs).abs());
    }
    let params = json!({ "samples": samples, "c": c.0, "max_deviation": 0.05 });
    Ok(vec![CheckReport::defect("beta_cocycle", 4, params, worst, COCYCLE_TOL)])
}

fn beta_derivative(profile: Profile, rng: &mut ChaCha8Rng) -> Result<Vec<CheckReport>> {
    let samples = profile.pick(5, 20);
    let c = CentralCharge(1.0);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let f = random_field(rng, 3);
        let g = random_field(rng, 3);
        worst = worst.max(beta_derivative_check(c, &f, &g, BETA_DERIVATIVE_STEP)?);
    }
    let params = json!({ "samples": samples, "c": c.0, "step": BETA_DERIVATIVE_STEP });
    let derivative = CheckReport::defect("beta_derivative", 5, params, worst, BETA_DERIVATIVE_TOL);
    let omega = gelfand_fuchs(&SpectralFunction::cos(1), &SpectralFunction::sin(1));
    let omega_report =
        CheckReport::defect("omega_cos_sin", 5, json!({ "omega": omega }), (omega + 1.0 / 24.0).abs(), OMEGA_TOL);
    Ok(vec![derivative, omega_report])
}

fn operator_composition(profile: Profile, rng: &mut ChaCha8Rng) -> Result<Vec<CheckReport>> {
    let n = profile.pick(8, 10);
    let samples = profile.pick(3, 10);
    let weight = LowestWeight::new(1.0, 0.5);
    let module = ModuleTruncation::build(weight, n, true)?;
    let c = CentralCharge(weight.c);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let g1 = random_diffeo(rng, 4, 0.05)?;
        let g2 = random_diffeo(rng, 4, 0.05)?;
        let f = random_field(rng, 3);
        let joint = module.t_gamma_matrix(&g1.compose(&g2), &f)?;
        let mut nested = module.t_gamma_matrix(&g1, &g2.pushforward(&f)?)?.into_entries();
        let shift = beta(c, &g2, &f);
        for i in 0..nested.nrows() {
            nested[(i, i)] -= shift;
        }
        worst = worst.max((joint.entries() - nested).norm());
    }
    let params = json!({ "c": weight.c, "h": weight.h, "N": n, "samples": samples });
    Ok(vec![CheckReport::defect("operator_composition", 6, params, worst, COMPOSITION_TOL)])
}

fn energy_bound(profile: Profile) -> Result<Vec<CheckReport>> {
    let levels: Vec<usize> = profile.pick(vec![4, 8], vec![4, 8, 12]);
    let weight = LowestWeight::new(1.0, 0.0);
    let f = SpectralFunction::cos(1);
    let ratios = levels
        .iter()
        .map(|&n| ModuleTruncation::build(weight, n, true)?.energy_bound_ratio(&f))
        .collect::<Result<Vec<_>>>()?;
    let drop = ratios.windows(2).map(|w| w[0] - w[1]).fold(0.0f64, f64::max);
    let top = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let params = json!({ "c": 1.0, "h": 0.0, "f": "cos", "N": levels, "ratios": ratios });
    let monotone = CheckReport::defect("energy_bound_monotone", 7, params.clone(), drop, 0.0);
    let fixture = CheckReport::defect("energy_bound_fixture", 7, params, top, ENERGY_FIXTURE + ENERGY_FIXTURE_SLACK);

    let n = *levels.last().expect("nonempty");
    let constant = ModuleTruncation::build(weight, n, true)?.energy_bound_ratio(&SpectralFunction::constant(1.0))?;
    let closed = n as f64 / (1.0 + n as f64);
    let params = json!({ "c": 1.0, "h": 0.0, "f": "1", "N": n, "closed_form": closed });
    let unit = CheckReport::with_pass(
        "energy_bound_constant",
        7,
        params,
        constant,
        1.0,
        constant < 1.0 && (constant - closed).abs() < 1e-12,
    );
    Ok(vec![monotone, fixture, unit])
}

fn fragmentation(profile: Profile, rng: &mut ChaCha8Rng) -> Result<Vec<CheckReport>> {
    let samples = profile.pick(3, 25);
    let cover = FragmentationCover::default();
    let eps = cover.epsilon();
    let k = cover.resolution();
    let mut recon = 0.0f64;
    let mut support = 0.0f64;
    for _ in 0..samples {
        let p = random_field(rng, 4);
        let size = p.sup_norm().max(p.derivative().sup_norm());
        let gamma = CircleDiffeo::new(p.scale(0.8 * eps * rng.random_range(0.5..1.0) / size))?;
        let (g1, g2, g3) = cover.fragment(&gamma)?;
        recon = recon.max(g1.compose_at(&g2.compose_at(&g3, k), k).sup_distance(&gamma));
        for (g, interval) in [&g1, &g2, &g3].into_iter().zip(cover.intervals()) {
            support = support.max(cover.deviation_outside(g, interval));
        }
    }
    let params = json!({ "samples": samples, "epsilon": eps, "resolution": k });
    let (i1, i2, i3) = cover.fragment(&CircleDiffeo::identity())?;
    let identity_dev = [i1, i2, i3].iter().map(CircleDiffeo::sup_deviation).fold(0.0, f64::max);
    Ok(vec![
        CheckReport::defect("fragment_reconstruction", 8, params.clone(), recon, FRAGMENT_TOL),
        CheckReport::defect("fragment_support", 8, params, support, crate::diffeo::SUPPORT_TOL),
        CheckReport::defect("fragment_identity", 8, json!({}), identity_dev, 0.0),
    ])
}

fn rotation_scalar() -> Result<Vec<CheckReport>> {
    let n = 6;
    let block = |h: f64| ModuleTruncation::build(LowestWeight::new(1.0, h), n, true);
    let integer = [block(0.5)?, block(1.5)?, block(2.5)?];
    let defect = rotation_2pi_scalar_defect(&integer)?;
    let integer_report = CheckReport::defect(
        "rot2pi_integer_spacing",
        9,
        json!({ "c": 1.0, "h": [0.5, 1.5, 2.5], "N": n }),
        defect,
        ROTATION_TOL,
    );

    let fractional = [block(0.5)?, block(0.75)?];
    let rejected = matches!(rotation_2pi_scalar_defect(&fractional), Err(Error::NonIntegerSpacing(..)))
        && matches!(direct_sum(&fractional, &SpectralFunction::cos(1)), Err(Error::NonIntegerSpacing(..)));
    let rejection = CheckReport::defect(
        "rot2pi_spacing_rejected",
        9,
        json!({ "c": 1.0, "h": [0.5, 0.75], "N": n }),
        if rejected { 0.0 } else { 1.0 },
        0.0,
    );

    let bypass = [block(0.0)?, block(1.0 / 3.0)?];
    let measured = rotation_2pi_scalar_defect_unchecked(&bypass)?;
    let closed =
        (num_complex::Complex64::cis(std::f64::consts::TAU / 3.0) - 1.0).norm() * (bypass[1].dim() as f64).sqrt();
    let err = (measured - closed).abs();
    let bypass_report = CheckReport::with_pass(
        "rot2pi_bypass",
        9,
        json!({ "c": 1.0, "h": [0.0, 1.0 / 3.0], "N": n, "defect": measured, "closed_form": closed }),
        err,
        ROTATION_TOL,
        measured > 0.0 && err <= ROTATION_TOL,
    );
    Ok(vec![integer_report, rejection, bypass_report])
}

fn mollifier(profile: Profile, rng: &mut ChaCha8Rng) -> Result<Vec<CheckReport>> {
    let samples = profile.pick(3, 10);
    let s = 3.2;
    let widths: Vec<f64> = (2..=6).map(|j| 0.5f64.powi(j)).collect();
    let mut worst_hs = 0.0f64;
    let mut worst_push = 0.0f64;
    for _ in 0..samples {
        let gamma = random_diffeo(rng, 6, 0.05)?;
        let f = random_field(rng, 3);
        let pushed = gamma.pushforward(&f)?;
        let mut hs = Vec::with_capacity(widths.len());
        let mut push = Vec::with_capacity(widths.len());
        for &w in &widths {
            let smooth = gamma.mollify(w)?;
            hs.push((gamma.periodic_part() - smooth.periodic_part()).sobolev_norm(s));
            push.push((&pushed - &smooth.pushforward(&f)?).s32_norm());
        }
        worst_hs = hs.windows(2).map(|x| x[1] / x[0]).fold(worst_hs, f64::max);
        worst_push = push.windows(2).map(|x| x[1] / x[0]).fold(worst_push, f64::max);
    }
    let params = json!({ "samples": samples, "s": s, "widths": widths });
    // Value is the largest ratio of consecutive distances; strict decrease
    // means it stays below one.
    Ok(vec![
        CheckReport::strict("mollifier_hs_decrease", 10, params.clone(), worst_hs, 1.0),
        CheckReport::strict("mollifier_pushforward_decrease", 10, params, worst_push, 1.0),
    ])
}

fn covariance(profile: Profile, seed: u64) -> Result<Vec<CheckReport>> {
    let levels: Vec<usize> = profile.pick(vec![4, 6, 8], vec![6, 10, 14]);
    let weight = LowestWeight::new(1.0, 0.5);
    let g = SpectralFunction::cos(1).scale(0.05);
    let f = SpectralFunction::sin(1);
    let defects = levels
        .iter()
        .map(|&n| ModuleTruncation::build(weight, n, true)?.covariance_defect(&g, &f, 1, seed))
        .collect::<Result<Vec<_>>>()?;
    let worst = defects.windows(2).map(|x| x[1] / x[0]).fold(0.0f64, f64::max);
    let params = json!({
        "c": weight.c, "h": weight.h, "g": "0.05*cos", "f": "sin", "probe_level": 1,
        "N": levels, "defects": defects,
    });
    Ok(vec![CheckReport::strict("covariance_decrease", 11, params, worst, 1.0)])
}

/// Coefficients uniform in the unit disc times `(1 + n)^{-4}`, so every norm
/// used below converges as the cutoff grows.
fn decaying_field(rng: &mut ChaCha8Rng, cutoff: usize) -> SpectralFunction {
    let coeffs = (0..=cutoff)
        .map(|n| {
            let decay = (1.0 + n as f64).powi(-4);
            let re = rng.random_range(-1.0..1.0) * decay;
            let im = if n == 0 { 0.0 } else { rng.random_range(-1.0..1.0) * decay };
            num_complex::Complex64::new(re, im)
        })
        .collect();
    SpectralFunction::new(coeffs)
}

/// `sup_{|n| ≤ 2K} w(n)² Σ_m w(m)⁻² w(n−m)⁻²` over `|m|, |n−m| ≤ K` with
/// `w(n)² = (1+n²)^s`: the Cauchy–Schwarz algebra constant (squared) for
/// band-limited factors.
pub fn algebra_constant(s: f64, cutoff: usize) -> f64 {
    let k = cutoff as i64;
    let w2 = |n: i64| (1.0 + (n * n) as f64).powf(s);
    (-2 * k..=2 * k)
        .map(|n| {
            let lo = (n - k).max(-k);
            let hi = (n + k).min(k);
            w2(n) * (lo..=hi).map(|m| 1.0 / (w2(m) * w2(n - m))).sum::<f64>()
        })
        .fold(0.0, f64::max)
        .sqrt()
}

/// `(Σ_{n∈ℤ} (1+|n|^{3/2})² / (1+n²)^s)^{1/2}`, the Cauchy–Schwarz embedding
/// constant `‖f‖_{3/2} ≤ C ‖f‖_{H^s}` (finite for `s > 2`).
pub fn embedding_constant(s: f64) -> f64 {
    let term = |n: f64| (1.0 + n.powf(1.5)).powi(2) / (1.0 + n * n).powf(s);
    let terms = 1_000_000;
    let big = terms as f64;
    // Tail past `terms` from the two leading powers of the summand.
    let tail = big.powf(4.0 - 2.0 * s) / (2.0 * s - 4.0) + 2.0 * big.powf(2.5 - 2.0 * s) / (2.0 * s - 2.5);
    (term(0.0) + 2.0 * ((1..=terms).map(|n| term(n as f64)).sum::<f64>() + tail)).sqrt()
}

fn relative_change(a: f64, b: f64) -> f64 {
    (b - a).abs() / a.abs().max(1e-300)
}

fn sobolev(profile: Profile, rng: &mut ChaCha8Rng) -> Result<Vec<CheckReport>> {
    let samples = profile.pick(50, 200);
    let cutoffs = [16usize, 32];
    let mut reports = Vec::new();

    for s in [1.0, 1.6, 2.5] {
        let mut maxima = Vec::new();
        let mut bound_ratio = 0.0f64;
        for &k in &cutoffs {
            let constant = algebra_constant(s, k);
            let mut worst = 0.0f64;
            for _ in 0..samples {
                let f = decaying_field(rng, k);
                let g = decaying_field(rng, k);
                worst = worst.max(f.multiply(&g).sobolev_norm(s) / (f.sobolev_norm(s) * g.sobolev_norm(s)));
            }
            bound_ratio = bound_ratio.max(worst / constant);
            maxima.push(worst);
        }
        let params = json!({ "s": s, "samples": samples, "cutoffs": cutoffs, "empirical_max": maxima });
        reports.push(CheckReport::defect("sobolev_algebra_bound", 12, params.clone(), bound_ratio, 1.0));
        reports.push(CheckReport::defect(
            "sobolev_algebra_stability",
            12,
            params,
            relative_change(maxima[0], maxima[1]),
            STABILITY_TOL,
        ));
    }

    // ‖f‖ + ‖f′‖_{H^{s−1}} against ‖f‖_{H^s}; the ratio lies in [1/2, √2] for s ≥ 1.
    for s in [1.6, 2.5] {
        let mut corridors = Vec::new();
        let mut violation = 0.0f64;
        for &k in &cutoffs {
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for _ in 0..samples {
                let f = decaying_field(rng, k);
                let r = (f.sobolev_norm(0.0) + f.derivative().sobolev_norm(s - 1.0)) / f.sobolev_norm(s);
                lo = lo.min(r);
                hi = hi.max(r);
            }
            violation = violation.max((0.5 / lo).max(hi / 2f64.sqrt()));
            corridors.push([lo, hi]);
        }
        let params = json!({ "s": s, "samples": samples, "cutoffs": cutoffs, "corridors": corridors });
        reports.push(CheckReport::defect("derivative_corridor", 12, params.clone(), violation, 1.0));
        let drift =
            relative_change(corridors[0][0], corridors[1][0]).max(relative_change(corridors[0][1], corridors[1][1]));
        reports.push(CheckReport::defect("derivative_corridor_stability", 12, params, drift, STABILITY_TOL));
    }

    // Gagliardo double integral against the Fourier seminorm. The quadrature is
    // translation invariant, so it is diagonal in modes and every ratio lies in
    // the envelope of the single-mode ratios.
    for s in [0.5, 1.3] {
        let mut corridors = Vec::new();
        let mut outside = 0.0f64;
        for &k in &cutoffs {
            let grid = QuadratureGrid::for_cutoff(2 * k);
            let single: Vec<f64> = (1..=k)
                .map(|n| {
                    let f = SpectralFunction::cos(n);
                    Ok(f.gagliardo_seminorm(s, &grid)? / f.homogeneous_sobolev_norm(s).powi(2))
                })
                .collect::<Result<_>>()?;
            let env_lo = single.iter().copied().fold(f64::INFINITY, f64::min);
            let env_hi = single.iter().copied().fold(0.0, f64::max);
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for _ in 0..samples.min(50) {
                let f = decaying_field(rng, k);
                let r = f.gagliardo_seminorm(s, &grid)? / f.homogeneous_sobolev_norm(s).powi(2);
                lo = lo.min(r);
                hi = hi.max(r);
            }
            outside = outside.max((env_lo - lo).max(hi - env_hi).max(0.0) / env_hi);
            corridors.push([lo, hi]);
        }
        let params = json!({ "s": s, "cutoffs": cutoffs, "corridors": corridors });
        reports.push(CheckReport::defect("gagliardo_corridor", 12, params.clone(), outside, 1e-9));
        let drift =
            relative_change(corridors[0][0], corridors[1][0]).max(relative_change(corridors[0][1], corridors[1][1]));
        reports.push(CheckReport::defect("gagliardo_stability", 12, params, drift, STABILITY_TOL));
    }

    let s = 2.1;
    let constant = embedding_constant(s);
    let mut worst = 0.0f64;
    for &k in &cutoffs {
        for _ in 0..samples {
            let f = decaying_field(rng, k);
            worst = worst.max(f.s32_norm() / (constant * f.sobolev_norm(s)));
        }
    }
    let params = json!({ "s": s, "samples": samples, "constant": constant });
    reports.push(CheckReport::defect("sobolev_embedding", 12, params, worst, 1.0));
    Ok(reports)
}
