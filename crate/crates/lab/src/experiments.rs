//! The experiment registry: every runnable command behind one trait,
//! registered by name and selected at runtime from the CLI or a config
//! section.

use ntlab_core::characters::{self, DConvention};
use ntlab_core::poisson;
use ntlab_core::residue::{self, AMode, MeanMode};
use ntlab_core::window::make_window;
use ntlab_core::{gauss, primes};

use crate::envelope::{envelope_eval, Theorem};
use crate::record::{ExperimentRecord, ParamValue, Params};
use crate::LabError;

/// Knobs shared by every run.
#[derive(Debug, Clone, Copy)]
pub struct RunContext {
    /// ε in the reported (xy)^ε factor.
    pub eps: f64,
}

impl Default for RunContext {
    fn default() -> Self {
        RunContext { eps: 0.01 }
    }
}

/// One runnable command.
pub trait Experiment: Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    /// Execute a single grid point.
    fn run(&self, params: &Params, ctx: &RunContext) -> Result<ExperimentRecord, LabError>;
    /// True when a completed record violates an invariant the command is
    /// expected to certify (drives the process exit code).
    fn invariant_violated(&self, _record: &ExperimentRecord) -> bool {
        false
    }
}

/// All registered experiments, in CLI listing order.
pub fn registry() -> &'static [&'static dyn Experiment] {
    static REGISTRY: &[&dyn Experiment] = &[
        &MeanExperiment,
        &SmoothMeanExperiment,
        &JutilaExperiment,
        &LargeSieveExperiment,
        &PolyaVerifyExperiment,
        &GaussVerifyExperiment,
        &PoissonVerifyExperiment,
        &PrimeCharSumExperiment,
    ];
    REGISTRY
}

/// Look an experiment up by its registered name.
pub fn find(name: &str) -> Option<&'static dyn Experiment> {
    registry().iter().copied().find(|e| e.name() == name)
}

/// Typed parameter access with per-key errors.
struct P<'a>(&'a Params);

impl P<'_> {
    fn f64_or(&self, key: &str, default: f64) -> Result<f64, LabError> {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => v.as_f64().ok_or_else(|| LabError::Config {
                context: format!("parameter `{key}`"),
                message: "expected a number".into(),
            }),
        }
    }

    fn u64_or(&self, key: &str, default: u64) -> Result<u64, LabError> {
        let v = self.f64_or(key, default as f64)?;
        if v < 0.0 || !v.is_finite() {
            return Err(LabError::Config {
                context: format!("parameter `{key}`"),
                message: format!("expected a nonnegative integer, got {v}"),
            });
        }
        Ok(v as u64)
    }

    fn text_or(&self, key: &str, default: &str) -> String {
        match self.0.get(key) {
            Some(ParamValue::Text(s)) => s.clone(),
            Some(ParamValue::Num(v)) => format!("{v}"),
            None => default.to_string(),
        }
    }

    fn opt_f64(&self, key: &str) -> Result<Option<f64>, LabError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v.as_f64().map(Some).ok_or_else(|| LabError::Config {
                context: format!("parameter `{key}`"),
                message: "expected a number".into(),
            }),
        }
    }
}

fn domain_err(context: &str, err: ntlab_core::Error) -> LabError {
    LabError::Config {
        context: context.to_string(),
        message: err.to_string(),
    }
}

struct MeanExperiment;

impl Experiment for MeanExperiment {
    fn name(&self) -> &'static str {
        "mean"
    }

    fn summary(&self) -> &'static str {
        "average of P_(a,d)(x) over 2 <= a <= y with its S1 + S2 split"
    }

    fn run(&self, params: &Params, ctx: &RunContext) -> Result<ExperimentRecord, LabError> {
        let p = P(params);
        let d = p.u64_or("d", 2)?;
        let x = p.u64_or("x", 10_000)?;
        let y = p.u64_or("y", 1_000)?;
        let a_mode = match p.text_or("a_mode", "all").as_str() {
            "all" => AMode::All,
            "nonsquare" => AMode::Nonsquare,
            other => {
                return Err(LabError::Config {
                    context: "parameter `a_mode`".into(),
                    message: format!("expected all|nonsquare, got {other:?}"),
                })
            }
        };
        let mode = match p.text_or("mode", "character").as_str() {
            "character" => MeanMode::Character,
            "direct" => MeanMode::Direct,
            other => {
                return Err(LabError::Config {
                    context: "parameter `mode`".into(),
                    message: format!("expected character|direct, got {other:?}"),
                })
            }
        };
        let r = residue::mean_value(d, x, y, a_mode, mode).map_err(|e| domain_err("mean", e))?;
        let theorem = if d == 2 {
            Theorem::QuadraticMean
        } else {
            Theorem::HigherOrderMean
        };
        let envelope = envelope_eval(theorem, x as f64, y as f64);
        let eps_factor = ((x as f64) * (y as f64)).powf(ctx.eps);

        let mut rec = ExperimentRecord::new(self.name(), params.clone());
        rec.values.insert("S".into(), r.s);
        rec.values.insert("S1".into(), r.s1);
        rec.values.insert("S2".into(), r.s2);
        rec.values.insert("main_term".into(), r.main_term);
        rec.values.insert("abs_error".into(), r.abs_error);
        rec.values
            .insert("envelope_eps".into(), envelope * eps_factor);
        rec.envelope = Some(envelope);
        rec.ratio = Some(r.abs_error / envelope);
        Ok(rec)
    }
}

struct SmoothMeanExperiment;

impl Experiment for SmoothMeanExperiment {
    fn name(&self) -> &'static str {
        "smooth-mean"
    }

    fn summary(&self) -> &'static str {
        "window-weighted average of P_(8a,2)(x) over odd squarefree a near Y"
    }

    fn run(&self, params: &Params, _ctx: &RunContext) -> Result<ExperimentRecord, LabError> {
        let p = P(params);
        let x = p.u64_or("x", 10_000)?;
        let y = p.u64_or("y", p.u64_or("Y", 10_000)?)?;
        let u = p.opt_f64("U")?;
        let z = p.opt_f64("z")?;
        let r = poisson::smoothed_mean(x, y, u, z).map_err(|e| domain_err("smooth-mean", e))?;

        let (xf, yf) = (x as f64, y as f64);
        // The conditional error scale: log log x + (x^{7/8}/Y^{1/4} + x/Y^{1/2})·log(xY).
        let envelope =
            xf.ln().ln() + (xf.powf(0.875) / yf.powf(0.25) + xf / yf.sqrt()) * (xf * yf).ln();

        let mut rec = ExperimentRecord::new(self.name(), params.clone());
        rec.values.insert("S".into(), r.s);
        rec.values.insert("S1".into(), r.s1);
        rec.values.insert("S2".into(), r.s2);
        rec.values.insert("S21".into(), r.s21);
        rec.values.insert("S22".into(), r.s22);
        rec.values.insert("S_sq".into(), r.s_sq);
        rec.values.insert("S_nonsq".into(), r.s_nonsq);
        rec.values.insert("main_term".into(), r.main);
        rec.values.insert("abs_error".into(), r.abs_error);
        rec.values.insert("U".into(), r.u_param);
        rec.values.insert("z".into(), r.z);
        rec.values.insert("d_count".into(), r.d_count as f64);
        rec.values.insert("poisson_resid".into(), r.poisson_resid);
        rec.values
            .insert("poisson_tail_bound".into(), r.poisson_tail_bound);
        rec.envelope = Some(envelope);
        rec.ratio = Some(r.abs_error / envelope);
        Ok(rec)
    }
}

struct JutilaExperiment;

impl Experiment for JutilaExperiment {
    fn name(&self) -> &'static str {
        "jutila"
    }

    fn summary(&self) -> &'static str {
        "mean square of real character sums (D/n), n <= Y, |D| <= X (report-only)"
    }

    fn run(&self, params: &Params, _ctx: &RunContext) -> Result<ExperimentRecord, LabError> {
        let p = P(params);
        let x = p.u64_or("x", 1_000)?;
        let y = p.u64_or("y", 1_000)?;
        let convention = match p.text_or("convention", "fundamental").as_str() {
            "fundamental" => DConvention::Fundamental,
            "all-nonsquare" => DConvention::AllNonsquare,
            other => {
                return Err(LabError::Config {
                    context: "parameter `convention`".into(),
                    message: format!("expected fundamental|all-nonsquare, got {other:?}"),
                })
            }
        };
        if x < 2 || y < 1 {
            return Err(LabError::Config {
                context: "jutila".into(),
                message: "needs X >= 2 and Y >= 1".into(),
            });
        }
        let r = characters::jutila_statistic(x, y, convention);
        let envelope = x as f64 * y as f64 * (x as f64).ln().powi(2);
        let mut rec = ExperimentRecord::new(self.name(), params.clone());
        rec.values.insert("S".into(), r.lhs);
        rec.values.insert("characters".into(), r.characters as f64);
        rec.envelope = Some(envelope);
        rec.ratio = Some(r.bound_ratio);
        Ok(rec)
    }

    fn invariant_violated(&self, record: &ExperimentRecord) -> bool {
        // Report-only: the sweep must complete with finite ratios.
        record.ratio.is_none_or(|r| !r.is_finite())
    }
}

struct LargeSieveExperiment;

impl Experiment for LargeSieveExperiment {
    fn name(&self) -> &'static str {
        "large-sieve"
    }

    fn summary(&self) -> &'static str {
        "order-k character mean square over prime moduli in (Q,2Q] (report-only)"
    }

    fn run(&self, params: &Params, _ctx: &RunContext) -> Result<ExperimentRecord, LabError> {
        let p = P(params);
        let q = p.u64_or("q", p.u64_or("x", 100)?)?;
        let m = p.u64_or("m", p.u64_or("y", 100)?)?;
        let k = p.u64_or("k", 3)?;
        let seed = p.u64_or("seed", 1)?;
        let coeffs = random_sign_coeffs(m, seed);
        let r = characters::large_sieve_statistic(q, m, k, &coeffs)
            .map_err(|e| domain_err("large-sieve", e))?;
        let mut rec = ExperimentRecord::new(self.name(), params.clone());
        rec.values.insert("S".into(), r.lhs);
        rec.values.insert("moduli".into(), r.moduli as f64);
        rec.values
            .insert("coefficients".into(), coeffs.len() as f64);
        rec.envelope = Some(r.envelope);
        rec.ratio = Some(r.ratio);
        Ok(rec)
    }

    fn invariant_violated(&self, record: &ExperimentRecord) -> bool {
        record.ratio.is_none_or(|r| !r.is_finite())
    }
}

/// ±1 coefficients on the squarefree integers in (M, 2M], deterministic in
/// the seed.
pub fn random_sign_coeffs(m: u64, seed: u64) -> Vec<(u64, i64)> {
    let mu = ntlab_core::arith::mobius_sieve(2 * m as usize);
    let mut state = seed ^ 0x9e37_79b9_7f4a_7c15;
    let mut next = move || {
        // SplitMix64 step
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    (m + 1..=2 * m)
        .filter(|&v| mu[v as usize] != 0)
        .map(|v| (v, if next() & 1 == 0 { 1i64 } else { -1 }))
        .collect()
}

struct PolyaVerifyExperiment;

impl Experiment for PolyaVerifyExperiment {
    fn name(&self) -> &'static str {
        "polya-verify"
    }

    fn summary(&self) -> &'static str {
        "exhaustive partial-sum maxima against 6*sqrt(p)*log p for p <= cap"
    }

    fn run(&self, params: &Params, _ctx: &RunContext) -> Result<ExperimentRecord, LabError> {
        let p = P(params);
        let cap = p.u64_or("x", 2_000)?;
        let d = p.u64_or("d", 0)?; // 0 = every d in {2,3,4,6}
        let scan = if d == 0 {
            characters::polya_vinogradov_scan(cap)
        } else {
            let odd_primes = primes::primes_in(3, cap + 1);
            let mut worst = characters::PolyaScan {
                worst_ratio: -1.0,
                p: 0,
                d,
                witness: (0, 0, 0),
                tables: 0,
            };
            for q in odd_primes {
                if (q - 1) % d != 0 {
                    continue;
                }
                let r = characters::polya_vinogradov_check(q, d)
                    .map_err(|e| domain_err("polya-verify", e))?;
                worst.tables += 1;
                if r.max_ratio > worst.worst_ratio {
                    worst.worst_ratio = r.max_ratio;
                    worst.p = q;
                    worst.witness = r.witness;
                }
            }
            worst
        };
        let mut rec = ExperimentRecord::new(self.name(), params.clone());
        rec.values.insert("worst_ratio".into(), scan.worst_ratio);
        rec.values.insert("worst_p".into(), scan.p as f64);
        rec.values.insert("worst_d".into(), scan.d as f64);
        rec.values.insert("witness_j".into(), scan.witness.0 as f64);
        rec.values.insert("witness_M".into(), scan.witness.1 as f64);
        rec.values.insert("witness_N".into(), scan.witness.2 as f64);
        rec.values.insert("tables".into(), scan.tables as f64);
        rec.envelope = Some(1.0);
        rec.ratio = Some(scan.worst_ratio);
        Ok(rec)
    }

    fn invariant_violated(&self, record: &ExperimentRecord) -> bool {
        record.value("worst_ratio").is_none_or(|r| r >= 1.0)
    }
}

struct GaussVerifyExperiment;

impl Experiment for GaussVerifyExperiment {
    fn name(&self) -> &'static str {
        "gauss-verify"
    }

    fn summary(&self) -> &'static str {
        "definition vs prime-power table for G_m(k), odd k <= cap, |m| <= m-cap"
    }

    fn run(&self, params: &Params, _ctx: &RunContext) -> Result<ExperimentRecord, LabError> {
        let p = P(params);
        let k_cap = p.u64_or("k", 3_465)?;
        let m_cap = p.u64_or("m", 60)? as i64;
        let scan = gauss::verify_scan(k_cap, m_cap);
        let mut rec = ExperimentRecord::new(self.name(), params.clone());
        rec.values.insert("max_rel_err".into(), scan.max_rel_err);
        rec.values.insert("worst_k".into(), scan.worst_k as f64);
        rec.values.insert("worst_m".into(), scan.worst_m as f64);
        rec.values.insert("cases".into(), scan.cases as f64);
        rec.envelope = Some(1e-6);
        rec.ratio = Some(scan.max_rel_err / 1e-6);
        Ok(rec)
    }

    fn invariant_violated(&self, record: &ExperimentRecord) -> bool {
        record.value("max_rel_err").is_none_or(|r| r > 1e-6)
    }
}

struct PoissonVerifyExperiment;

impl Experiment for PoissonVerifyExperiment {
    fn name(&self) -> &'static str {
        "poisson-verify"
    }

    fn summary(&self) -> &'static str {
        "window-weighted symbol sum against its Gauss-sum dual for odd k"
    }

    fn run(&self, params: &Params, _ctx: &RunContext) -> Result<ExperimentRecord, LabError> {
        let p = P(params);
        let k = p.u64_or("k", 1)?;
        let x = p.f64_or("x", 1_000.0)?;
        let z = p.f64_or("z", 1.0)?;
        let u = p.f64_or("U", 8.0)?;
        let m_cap = p.opt_f64("m_cap")?.map(|v| v as i64);
        let window = make_window(u).map_err(|e| domain_err("poisson-verify", e))?;
        let r = poisson::poisson_identity_check(k, x, z, &window, m_cap)
            .map_err(|e| domain_err("poisson-verify", e))?;
        let mut rec = ExperimentRecord::new(self.name(), params.clone());
        rec.values.insert("lhs".into(), r.lhs);
        rec.values.insert("rhs".into(), r.rhs);
        rec.values.insert("rel_err".into(), r.rel_err);
        rec.values.insert("m_cap".into(), r.m_cap as f64);
        rec.values
            .insert("m_cap_required".into(), r.m_cap_required as f64);
        rec.values.insert("tail_bound".into(), r.tail_bound);
        rec.envelope = Some(1e-6);
        rec.ratio = Some(r.rel_err / 1e-6);
        Ok(rec)
    }

    fn invariant_violated(&self, record: &ExperimentRecord) -> bool {
        record.value("rel_err").is_none_or(|r| r > 1e-6)
    }
}

struct PrimeCharSumExperiment;

impl Experiment for PrimeCharSumExperiment {
    fn name(&self) -> &'static str {
        "prime-char-sum"
    }

    fn summary(&self) -> &'static str {
        "sums of chi(p) over p <= X for the order-d characters mod k (report-only)"
    }

    fn run(&self, params: &Params, _ctx: &RunContext) -> Result<ExperimentRecord, LabError> {
        let p = P(params);
        let q = p.u64_or("k", 7)?;
        let d = p.u64_or("d", 2)?;
        let x = p.u64_or("x", 10_000)?;
        let table = characters::build_table(q, d).map_err(|e| domain_err("prime-char-sum", e))?;
        let mut rec = ExperimentRecord::new(self.name(), params.clone());
        let mut worst = 0.0f64;
        for j in 1..d {
            let r = characters::prime_char_sum_statistic(&table, j, x)
                .map_err(|e| domain_err("prime-char-sum", e))?;
            rec.values.insert(format!("sum_re_{j}"), r.sum.re);
            rec.values.insert(format!("sum_im_{j}"), r.sum.im);
            rec.values.insert(format!("grh_ratio_{j}"), r.grh_ratio);
            worst = worst.max(r.grh_ratio);
        }
        rec.values.insert("grh_ratio_max".into(), worst);
        rec.values.insert("primes".into(), primes::pi(x) as f64);
        rec.ratio = Some(worst);
        Ok(rec)
    }

    fn invariant_violated(&self, record: &ExperimentRecord) -> bool {
        record.value("grh_ratio_max").is_none_or(|r| !r.is_finite())
    }
}
