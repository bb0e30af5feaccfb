//! Rigorous floating-point evaluation of Siegel-unit powers at `tau = r*i`,
//! search for certifying parameters, and the analytic determinant bound.
//!
//! Values are carried in log-polar form ([`LogComplex`]): a high-precision
//! `ln|value|` and phase plus a single `f64` absolute error bound covering
//! both components.  At `tau = r*i` the nome `q = exp(-2*pi*r)` is real, so
//! every unit is an explicitly convergent product; truncating it costs a
//! geometric tail that is folded into the error bound rather than ignored.
//!
//! The determinant story: if every non-identity coset ratio satisfies
//! `|g^sigma(ri) / g(ri)| < epsilon`, the Galois-orbit matrix of a subgroup
//! of order `n` has `|det| >= |g(ri)|^n * (1 - (n! - 1) * epsilon)`, because
//! exactly one permutation in the expansion collects the diagonal-free
//! identity products and every other permutation is damped below `epsilon`.
//! With `epsilon < 1/(d! - 1)` for `d` the full group order, every subgroup
//! inherits a positive lower bound at once.

use crate::coeffring::{embed_complex, Rat};
use crate::hp::{self, Cplx, Ctx};
use crate::modgroup::{enumerate_group, GroupElement, Subgroup};
use crate::qseries::QSeries;
use crate::siegel::{siegel_power_q_order, GConfig, IndexVector, SiegelError};
use astro_float::BigFloat;
use num::{BigInt, One, Signed, ToPrimitive};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericError {
    #[error("evaluation point r must be positive, got {0}")]
    NonPositiveR(String),
    #[error("magnitude exp({0}) is not representable; refuse to overflow silently")]
    Unrepresentable(f64),
    #[error("parameter search exhausted its budget of {budget} candidates without certifying")]
    BudgetExhausted {
        budget: usize,
        best: Box<SearchOutcome>,
    },
    #[error(transparent)]
    Siegel(#[from] SiegelError),
}

/// A nonzero complex value in log-polar form: `value = exp(log_mag + i*phase)`,
/// with `err` an absolute bound on the error of **each** component.
#[derive(Clone, Debug)]
pub struct LogComplex {
    pub log_mag: BigFloat,
    pub phase: BigFloat,
    pub err: f64,
}

impl LogComplex {
    /// The exact value 1.
    pub fn exact_one(ctx: &Ctx) -> LogComplex {
        LogComplex {
            log_mag: ctx.zero(),
            phase: ctx.zero(),
            err: 0.0,
        }
    }

    pub fn mul(&self, rhs: &LogComplex, ctx: &mut Ctx) -> LogComplex {
        let log_mag = ctx.add(&self.log_mag, &rhs.log_mag);
        let phase_raw = ctx.add(&self.phase, &rhs.phase);
        let phase = ctx.reduce_phase(&phase_raw);
        let pad = ctx.eps() * (1.0 + hp::to_f64(&log_mag).abs().min(1e12)) * 4.0;
        LogComplex {
            log_mag,
            phase,
            err: self.err + rhs.err + pad,
        }
    }

    pub fn inv(&self, ctx: &mut Ctx) -> LogComplex {
        let phase = ctx.reduce_phase(&self.phase.neg());
        LogComplex {
            log_mag: self.log_mag.neg(),
            phase,
            err: self.err,
        }
    }

    pub fn div(&self, rhs: &LogComplex, ctx: &mut Ctx) -> LogComplex {
        let r = rhs.inv(ctx);
        self.mul(&r, ctx)
    }

    pub fn powi(&self, k: i64, ctx: &mut Ctx) -> LogComplex {
        let kk = ctx.from_i64(k);
        let log_mag = ctx.mul(&self.log_mag, &kk);
        let phase_raw = ctx.mul(&self.phase, &kk);
        let phase = ctx.reduce_phase(&phase_raw);
        let pad = ctx.eps() * (1.0 + hp::to_f64(&log_mag).abs().min(1e12)) * 4.0;
        LogComplex {
            log_mag,
            phase,
            err: self.err * k.unsigned_abs() as f64 + pad,
        }
    }

    /// `f64` image of `ln|value|`.
    pub fn log_mag_f64(&self) -> f64 {
        hp::to_f64(&self.log_mag)
    }

    /// Rectangular value at context precision.  Refuses log-magnitudes the
    /// backend exponent range cannot carry.
    pub fn to_cplx(&self, ctx: &mut Ctx) -> Result<Cplx, NumericError> {
        let lm = self.log_mag_f64();
        if lm.abs() > 1e8 {
            return Err(NumericError::Unrepresentable(lm));
        }
        let mag = ctx.exp(&self.log_mag);
        let c = ctx.cos(&self.phase);
        let s = ctx.sin(&self.phase);
        Ok(Cplx {
            re: ctx.mul(&mag, &c),
            im: ctx.mul(&mag, &s),
        })
    }

    /// First-order relative error of the rectangular value implied by the
    /// component bound `err`.
    pub fn rel_err(&self) -> f64 {
        2.0 * self.err
    }
}

// --- evaluation of a single unit ------------------------------------------------

fn rat_is_positive(r: &Rat) -> bool {
    r.is_positive()
}

/// Evaluate `u = g_v^(12N)` at `tau = r*i` from its q-product, in log-polar
/// form with a rigorous truncation tail folded into `err`.
pub fn eval_siegel_unit(v: &IndexVector, r: &Rat, prec: usize) -> Result<LogComplex, NumericError> {
    let mut ctx = Ctx::new(prec);
    eval_unit_from_rep(&mut ctx, v.level(), v.a() as i64, v.b() as i64, r)
}

/// Same evaluation from an explicit `(a, b)` representative mod N; exists so
/// representative independence of the *value* is testable, mirroring the
/// series layer.
fn eval_unit_from_rep(
    ctx: &mut Ctx,
    level: u32,
    a: i64,
    b: i64,
    r: &Rat,
) -> Result<LogComplex, NumericError> {
    if !rat_is_positive(r) {
        return Err(NumericError::NonPositiveR(format!("{r}")));
    }
    let n = level as i64;
    let (a, b) = (a.rem_euclid(n), b.rem_euclid(n));
    assert!(a != 0 || b != 0, "zero index vector");

    // ln q = -2*pi*r, ln t = ln q / N.
    let two_pi = ctx.two_pi();
    let r_f = ctx.from_ratio(r);
    let ln_q = ctx.mul(&two_pi, &r_f).neg();
    let n_f = ctx.from_i64(n);
    let ln_t = ctx.div(&ln_q, &n_f);

    // Number of q-levels before the tail drops below target accuracy.
    let r_f64 = hp::to_f64(&r_f).max(1e-12);
    let n_max = (((ctx.prec() as f64 + 32.0) * std::f64::consts::LN_2)
        / (2.0 * std::f64::consts::PI * r_f64))
        .ceil()
        .clamp(2.0, 400_000.0) as i64;

    // Cached direction tables for zeta^b and zeta^-b.
    let theta = {
        let bb = ctx.from_i64(b.rem_euclid(n));
        let f = ctx.div(&bb, &n_f);
        ctx.mul(&two_pi, &f)
    };
    let dir_pos = (ctx.cos(&theta), ctx.sin(&theta));
    let dir_neg = (dir_pos.0.clone(), dir_pos.1.neg());

    let mut log_mag = ctx.zero();
    let mut phase = ctx.zero();
    let mut ops = 0.0f64;

    // One factor (1 - x * e^(i*theta)) with x = t^e (e in t-units).
    let absorb = |ctx: &mut Ctx,
                      e_t: i64,
                      dir: &(BigFloat, BigFloat),
                      log_mag: &mut BigFloat,
                      phase: &mut BigFloat| {
        let x = if e_t == 0 {
            ctx.one()
        } else {
            let ee = ctx.from_i64(e_t);
            let le = ctx.mul(&ee, &ln_t);
            ctx.exp(&le)
        };
        let xc = ctx.mul(&x, &dir.0);
        let xs = ctx.mul(&x, &dir.1);
        let one = ctx.one();
        let re = ctx.sub(&one, &xc);
        let im = xs.neg();
        let abs2 = {
            let rr = ctx.mul(&re, &re);
            let ii = ctx.mul(&im, &im);
            ctx.add(&rr, &ii)
        };
        let l = ctx.ln(&abs2);
        let half = ctx.from_ratio(&Rat::new(1.into(), 2.into()));
        let lh = ctx.mul(&l, &half);
        *log_mag = ctx.add(log_mag, &lh);
        let ph = ctx.atan2(&im, &re);
        *phase = ctx.add(phase, &ph);
    };

    // First family: exponents k*N + a in t-units, k >= 0 (constant factor
    // when a = 0, k = 0 — then b != 0 keeps it away from zero).
    let mut k = 0i64;
    while k <= n_max {
        absorb(ctx, k * n + a, &dir_pos, &mut log_mag, &mut phase);
        ops += 12.0;
        k += 1;
    }
    // Second family: exponents k*N - a, k >= 1.
    let mut k = 1i64;
    while k <= n_max {
        absorb(ctx, k * n - a, &dir_neg, &mut log_mag, &mut phase);
        ops += 12.0;
        k += 1;
    }

    // Raise the product part to the 12N-th power.
    let twelve_n = ctx.from_i64(12 * n);
    log_mag = ctx.mul(&log_mag, &twelve_n);
    phase = ctx.mul(&phase, &twelve_n);

    // q-power: q_ord * ln q contributes magnitude only (q is real positive).
    let q_ord = siegel_power_q_order(&IndexVector::new(level, a as u32, b as u32).expect("nonzero"));
    let q_ord_f = ctx.from_ratio(&q_ord);
    let qpart = ctx.mul(&q_ord_f, &ln_q);
    log_mag = ctx.add(&log_mag, &qpart);

    // Root-of-unity prefactor: phase 2*pi * (6b(a-N) mod N) / N.
    let pref = (6 * b * (a - n)).rem_euclid(n);
    if pref != 0 {
        let pf = ctx.from_ratio(&Rat::new(pref.into(), n.into()));
        let ph = ctx.mul(&two_pi, &pf);
        phase = ctx.add(&phase, &ph);
    }
    phase = ctx.reduce_phase(&phase);

    // Error: geometric product tail plus accumulated rounding.
    // Each dropped factor pair obeys |ln(1 - x*zeta)| <= 2x for x <= 1/2,
    // and x <= R^(k-1) at q-level k, so the tail after n_max levels is
    // bounded by 12N * 4 * R^n_max / (1 - R).
    let big_r = (-2.0 * std::f64::consts::PI * r_f64).exp();
    let tail = if big_r < 0.5 {
        12.0 * n as f64 * 4.0 * big_r.powi((n_max as i32).min(12_000)) / (1.0 - big_r)
    } else {
        // Slow convergence: bound the tail crudely but honestly.
        let decay = big_r.powf(n_max as f64 - 1.0);
        12.0 * n as f64 * 4.0 * decay / (1.0 - big_r).max(1e-300)
    };
    let magnitude_scale = 1.0 + hp::to_f64(&log_mag).abs().min(1e12);
    let rounding = ops * (12 * n) as f64 * ctx.eps() * magnitude_scale;
    let err = (tail + rounding).max(f64::MIN_POSITIVE);

    Ok(LogComplex {
        log_mag,
        phase,
        err,
    })
}

// --- coset ratios ---------------------------------------------------------------

/// Evaluates coset ratios `g^sigma(ri) / g(ri)` with per-unit caching: only
/// `O(N^2)` distinct units back the whole group.
pub struct RatioEvaluator {
    cfg: GConfig,
    r: Rat,
    ctx: Ctx,
    units: HashMap<IndexVector, LogComplex>,
}

impl RatioEvaluator {
    pub fn new(cfg: &GConfig, r: &Rat, prec: usize) -> Result<RatioEvaluator, NumericError> {
        if !rat_is_positive(r) {
            return Err(NumericError::NonPositiveR(format!("{r}")));
        }
        Ok(RatioEvaluator {
            cfg: *cfg,
            r: r.clone(),
            ctx: Ctx::new(prec),
            units: HashMap::new(),
        })
    }

    pub fn precision(&self) -> usize {
        self.ctx.prec()
    }

    pub fn ctx_mut(&mut self) -> &mut Ctx {
        &mut self.ctx
    }

    fn unit(&mut self, v: &IndexVector) -> Result<LogComplex, NumericError> {
        if let Some(u) = self.units.get(v) {
            return Ok(u.clone());
        }
        let u = eval_unit_from_rep(&mut self.ctx, v.level(), v.a() as i64, v.b() as i64, &self.r)?;
        self.units.insert(*v, u.clone());
        Ok(u)
    }

    /// `g(ri)` itself (log-polar).
    pub fn g_value(&mut self) -> Result<LogComplex, NumericError> {
        let (l, m) = (self.cfg.l() as i64, self.cfg.m() as i64);
        let u1 = self.unit(&self.cfg.v1())?;
        let u2 = self.unit(&self.cfg.v2())?;
        let p1 = u1.powi(-l, &mut self.ctx);
        let p2 = u2.powi(-m, &mut self.ctx);
        Ok(p1.mul(&p2, &mut self.ctx))
    }

    /// `g^sigma(ri) / g(ri)`.  Exact 1 for the identity; units shared by
    /// `sigma` and the identity cancel exactly rather than numerically, so
    /// unitriangular cosets only pay for the factors that really differ.
    pub fn log_ratio(&mut self, sigma: &GroupElement) -> Result<LogComplex, NumericError> {
        if sigma.is_identity() {
            return Ok(LogComplex::exact_one(&self.ctx));
        }
        let (l, m) = (self.cfg.l() as i64, self.cfg.m() as i64);
        let (v1, v2) = (self.cfg.v1(), self.cfg.v2());
        let w1 = sigma.act_on_index(&v1);
        let w2 = sigma.act_on_index(&v2);
        let mut acc = LogComplex::exact_one(&self.ctx);
        if w1 != v1 {
            let a = self.unit(&w1)?;
            let b = self.unit(&v1)?;
            let q = a.div(&b, &mut self.ctx);
            let p = q.powi(-l, &mut self.ctx);
            acc = acc.mul(&p, &mut self.ctx);
        }
        if w2 != v2 {
            let a = self.unit(&w2)?;
            let b = self.unit(&v2)?;
            let q = a.div(&b, &mut self.ctx);
            let p = q.powi(-m, &mut self.ctx);
            acc = acc.mul(&p, &mut self.ctx);
        }
        Ok(acc)
    }

    /// Largest `ln|ratio|` over the given cosets (identity skipped), with
    /// the matching error bound and witness.
    pub fn max_ratio(
        &mut self,
        sigmas: &[GroupElement],
    ) -> Result<Option<MaxRatio>, NumericError> {
        let mut best: Option<MaxRatio> = None;
        for s in sigmas {
            if s.is_identity() {
                continue;
            }
            let lr = self.log_ratio(s)?;
            let candidate = MaxRatio {
                log_mag: lr.log_mag.clone(),
                log_mag_f64: lr.log_mag_f64(),
                err: lr.err,
                witness: *s,
            };
            best = Some(match best {
                None => candidate,
                Some(b) => {
                    if self.ctx.cmp(&candidate.log_mag, &b.log_mag) == std::cmp::Ordering::Greater
                    {
                        candidate
                    } else {
                        b
                    }
                }
            });
        }
        Ok(best)
    }
}

/// Largest coset-ratio magnitude seen in a sweep, in log form.
#[derive(Clone, Debug)]
pub struct MaxRatio {
    pub log_mag: BigFloat,
    pub log_mag_f64: f64,
    pub err: f64,
    pub witness: GroupElement,
}

// --- parameter search -------------------------------------------------------------

/// Parameters under which every non-identity coset ratio is certified below
/// `epsilon` at `tau = r*i`.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchParams {
    pub level: u32,
    pub l: u32,
    pub m: u32,
    pub r: Rat,
    pub epsilon: Rat,
    /// Order of the full Galois group (the `d` in `epsilon = 1/(d! - 1)`).
    pub d: usize,
}

impl SearchParams {
    /// `R = e^(-2*pi*r)`, the modulus of `q` at `tau = r*i`.
    pub fn big_r(&self) -> f64 {
        let rf = self.r.numer().to_f64().unwrap_or(f64::INFINITY)
            / self.r.denom().to_f64().unwrap_or(1.0);
        (-2.0 * std::f64::consts::PI * rf).exp()
    }
}

/// Result of a certification attempt at fixed parameters.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub params: SearchParams,
    /// `ln` of the largest non-identity coset ratio encountered.
    pub max_ratio_log: f64,
    pub max_ratio_err: f64,
    pub ln_epsilon: f64,
    pub max_witness: Option<GroupElement>,
    pub certified: bool,
    pub precision: usize,
    pub candidates_tested: usize,
}

impl SearchOutcome {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "N": self.params.level,
            "l": self.params.l,
            "m": self.params.m,
            "r": format!("{}/{}", self.params.r.numer(), self.params.r.denom()),
            "epsilon": format!("{}/{}", self.params.epsilon.numer(), self.params.epsilon.denom()),
            "d": self.params.d,
            "R": self.params.big_r(),
            "max_ratio_log": self.max_ratio_log,
            "max_ratio_err": self.max_ratio_err,
            "ln_epsilon": self.ln_epsilon,
            "max_witness": self.max_witness.map(|w| w.entries().to_vec()),
            "certified": self.certified,
            "precision": self.precision,
            "candidates_tested": self.candidates_tested,
        })
    }
}

/// `1 / (d! - 1)` as an exact rational.
pub fn default_epsilon(d: usize) -> Rat {
    let mut f = BigInt::one();
    for k in 2..=d {
        f *= BigInt::from(k);
    }
    Rat::new(BigInt::one(), f - BigInt::one())
}

/// Certify fixed `(l, m, r)` against `epsilon`: evaluates every
/// non-identity coset ratio and demands `max + err < ln(epsilon) - err`.
pub fn certify_params(
    cfg: &GConfig,
    r: &Rat,
    epsilon: &Rat,
    prec: usize,
    candidates_tested: usize,
) -> Result<SearchOutcome, NumericError> {
    let group = enumerate_group(cfg.level());
    let d = group.len();
    let mut ev = RatioEvaluator::new(cfg, r, prec)?;
    let ln_eps = {
        let e = ev.ctx_mut().from_ratio(epsilon);
        let l = ev.ctx_mut().ln(&e);
        hp::to_f64(&l)
    };
    let max = ev
        .max_ratio(&group)?
        .expect("groups at level >= 2 have non-identity elements");
    let certified = max.log_mag_f64 + 2.0 * max.err < ln_eps - 1e-9 * (1.0 + ln_eps.abs());
    Ok(SearchOutcome {
        params: SearchParams {
            level: cfg.level(),
            l: cfg.l(),
            m: cfg.m(),
            r: r.clone(),
            epsilon: epsilon.clone(),
            d,
        },
        max_ratio_log: max.log_mag_f64,
        max_ratio_err: max.err,
        ln_epsilon: ln_eps,
        max_witness: Some(max.witness),
        certified,
        precision: prec,
        candidates_tested,
    })
}

/// Search `(l, m, r) = (m+1, m, r)` over a doubling grid until every
/// non-identity coset ratio sits below `epsilon` (default `1/(d! - 1)`)
/// with margin.  Diagonal order: candidates with smaller `log2(r) + log2(m)`
/// first, smaller `r` first within a diagonal.  Each candidate counts
/// against `budget`; precision escalates (doubling, up to
/// [`crate::MAX_PRECISION`]) only when the verdict is within the error band.
pub fn find_parameters(
    level: u32,
    epsilon: Option<Rat>,
    budget: usize,
    prec: usize,
) -> Result<SearchOutcome, NumericError> {
    let d = enumerate_group(level).len();
    let epsilon = epsilon.unwrap_or_else(|| default_epsilon(d));
    let budget = budget.max(1);
    let mut best: Option<SearchOutcome> = None;
    let mut tested = 0usize;
    let mut diag = 0u32;
    'outer: loop {
        for i in 0..=diag {
            let j = diag - i;
            if tested >= budget {
                break 'outer;
            }
            let r = Rat::from_integer(BigInt::from(1i64 << i.min(40)));
            let m = 1u32 << j.min(20);
            let cfg = match GConfig::new(level, m + 1, m) {
                Ok(c) => c,
                Err(_) => continue,
            };
            tested += 1;
            let mut p = prec;
            loop {
                let outcome = certify_params(&cfg, &r, &epsilon, p, tested)?;
                if outcome.certified {
                    return Ok(outcome);
                }
                // Escalate only when the answer is inside the error band.
                let inside_band = outcome.max_ratio_log - 2.0 * outcome.max_ratio_err
                    < outcome.ln_epsilon
                    && p < crate::MAX_PRECISION;
                let better = match &best {
                    None => true,
                    Some(b) => {
                        outcome.max_ratio_log + outcome.max_ratio_err
                            < b.max_ratio_log + b.max_ratio_err
                    }
                };
                if better {
                    best = Some(outcome.clone());
                }
                if inside_band {
                    p *= 2;
                } else {
                    break;
                }
            }
        }
        diag += 1;
        if diag > 64 {
            break;
        }
    }
    Err(NumericError::BudgetExhausted {
        budget,
        best: Box::new(best.expect("at least one candidate tested")),
    })
}

// --- determinant certificates --------------------------------------------------------

/// Numeric certificate for one subgroup: the ratio-matrix determinant and
/// its analytic lower bound `1 - (n! - 1) * epsilon_hat`.
#[derive(Clone, Debug)]
pub struct DetCertificate {
    pub order: usize,
    pub det: LogComplex,
    pub det_mag_f64: f64,
    pub det_err_abs: f64,
    pub max_offdiag_log: f64,
    pub max_offdiag_err: f64,
    /// Upper estimate `exp(max_log + err)` of the largest non-identity ratio.
    pub epsilon_hat: f64,
    pub lower_bound: f64,
    /// The same bound with all error terms zeroed: what exact arithmetic
    /// would have concluded.  Separates "parameters too weak" from
    /// "precision too low".
    pub lower_bound_exact: f64,
    pub pass: bool,
}

impl DetCertificate {
    /// True when the failure is attributable to the error budget rather
    /// than the parameters: exact arithmetic would have certified, so a
    /// higher precision may flip the verdict.
    pub fn error_limited(&self) -> bool {
        !self.pass && self.lower_bound_exact > 0.0
    }
}

/// Evaluate the orbit ratio matrix `C[i][j] = g^(sigma_j sigma_i)(ri)/g(ri)`
/// of a subgroup and bound its determinant from below.  Only `n` distinct
/// values occur (the products range over the subgroup), so the evaluation
/// cost is `n` ratios plus one `n x n` elimination.
pub fn ratio_matrix_det(
    cfg: &GConfig,
    subgroup: &Subgroup,
    r: &Rat,
    prec: usize,
) -> Result<DetCertificate, NumericError> {
    let n = subgroup.order();
    let mut ev = RatioEvaluator::new(cfg, r, prec)?;

    let mut values: HashMap<GroupElement, LogComplex> = HashMap::new();
    for h in subgroup.elements() {
        let v = ev.log_ratio(h)?;
        values.insert(*h, v);
    }

    // Largest non-identity magnitude: every non-identity element of the
    // subgroup appears among the products sigma_j * sigma_i.
    let mut max_log = f64::NEG_INFINITY;
    let mut max_err = 0.0f64;
    for h in subgroup.elements() {
        if h.is_identity() {
            continue;
        }
        let v = &values[h];
        let lm = v.log_mag_f64();
        if lm > max_log {
            max_log = lm;
            max_err = v.err;
        } else {
            max_err = max_err.max(v.err);
        }
    }
    let (epsilon_hat, max_offdiag_log, max_offdiag_err) = if n == 1 {
        (0.0, f64::NEG_INFINITY, 0.0)
    } else {
        ((max_log + max_err).exp(), max_log, max_err)
    };

    // Analytic bound 1 - (n! - 1) * epsilon_hat, computed in logs so huge
    // factorials cannot overflow: ln(n!) >= ln(n! - 1) keeps it conservative.
    let ln_n_fact: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
    let bound_from_log = |log_eps: f64| {
        if n == 1 {
            return 1.0;
        }
        let t = ln_n_fact + log_eps;
        if t > 700.0 {
            f64::NEG_INFINITY
        } else {
            1.0 - t.exp()
        }
    };
    let lower_bound = bound_from_log(epsilon_hat.max(f64::MIN_POSITIVE).ln());
    let lower_bound_exact = bound_from_log(if n == 1 { f64::NEG_INFINITY } else { max_log });

    // Rectangular matrix and elimination determinant.
    let ctx = ev.ctx_mut();
    let elements: Vec<GroupElement> = subgroup.elements().to_vec();
    let mut max_rel = 0.0f64;
    let mut mat: Vec<Vec<Cplx>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let prod = elements[j].multiply(&elements[i]);
            let lc = &values[&prod];
            max_rel = max_rel.max(lc.rel_err());
            row.push(lc.to_cplx(ctx)?);
        }
        mat.push(row);
    }
    let det = eliminate_det(&mut mat, ctx);
    let det_mag = det.abs(ctx);
    let det_mag_f64 = hp::to_f64(&det_mag);

    // Determinant in log-polar form for reporting.
    let det_lc = if det_mag.is_zero() {
        LogComplex {
            log_mag: ctx.from_f64(f64::NEG_INFINITY),
            phase: ctx.zero(),
            err: f64::INFINITY,
        }
    } else {
        let lm = ctx.ln(&det_mag);
        let ph = ctx.atan2(&det.im.clone(), &det.re.clone());
        LogComplex {
            log_mag: lm,
            phase: ph,
            err: 0.0, // representational; the absolute bound below governs
        }
    };

    // First-order error: each entry carries relative error <= max_rel, the
    // permanent of |C| is at most 1 + (n! - 1) * epsilon_hat, and the
    // elimination itself costs O(n^3) rounded operations on entries of
    // magnitude <= 1 + epsilon_hat.
    let perm_bound = if lower_bound.is_finite() {
        2.0 - lower_bound.min(1.0)
    } else {
        f64::INFINITY
    };
    let nf = n as f64;
    let det_err_abs = if perm_bound.is_finite() {
        nf * max_rel * perm_bound
            + nf * nf * nf * ctx.eps() * (1.0 + epsilon_hat).powi(n.min(64) as i32) * 8.0
    } else {
        f64::INFINITY
    };

    let pass = lower_bound > 0.0
        && det_mag_f64.is_finite()
        && det_mag_f64 > det_err_abs
        && det_mag_f64 + det_err_abs >= lower_bound;

    Ok(DetCertificate {
        order: n,
        det: det_lc,
        det_mag_f64,
        det_err_abs,
        max_offdiag_log,
        max_offdiag_err,
        epsilon_hat,
        lower_bound,
        lower_bound_exact,
        pass,
    })
}

/// Partial-pivot Gaussian elimination determinant.
fn eliminate_det(mat: &mut [Vec<Cplx>], ctx: &mut Ctx) -> Cplx {
    let n = mat.len();
    let mut det = Cplx::one(ctx);
    let mut sign_flip = false;
    for col in 0..n {
        // Pivot: largest |entry|^2 in this column at or below the diagonal.
        let mut pivot = col;
        let mut best = mat[col][col].abs2(ctx);
        for (row, entries) in mat.iter().enumerate().skip(col + 1) {
            let cand = entries[col].abs2(ctx);
            if ctx.cmp(&cand, &best) == std::cmp::Ordering::Greater {
                best = cand;
                pivot = row;
            }
        }
        if best.is_zero() {
            return Cplx::zero(ctx);
        }
        if pivot != col {
            mat.swap(pivot, col);
            sign_flip = !sign_flip;
        }
        let diag = mat[col][col].clone();
        det = det.mul(&diag, ctx);
        for row in col + 1..n {
            if mat[row][col].is_zero() {
                continue;
            }
            let factor = mat[row][col].div(&diag, ctx);
            let (top, bottom) = mat.split_at_mut(row);
            let (src, dst) = (&top[col], &mut bottom[0]);
            for (d, s) in dst[col..].iter_mut().zip(&src[col..]) {
                let sub = factor.mul(s, ctx);
                *d = d.sub(&sub, ctx);
            }
        }
    }
    if sign_flip {
        det.neg(ctx)
    } else {
        det
    }
}

// --- series-vs-product cross-check ------------------------------------------------

/// Report comparing the two independent evaluations of `g_v^(12N)(ri)`:
/// the truncated `t`-expansion embedded coefficient-by-coefficient versus
/// the direct q-product.
#[derive(Clone, Debug)]
pub struct CrossCheck {
    pub distance: f64,
    pub tolerance: f64,
    pub ok: bool,
}

/// Evaluate a series at `t = exp(-2*pi*r/N)` by embedding each coefficient.
/// The tail beyond the horizon is bounded geometrically from the recent
/// coefficient sizes; this assumes `t < 1/2` (true for `r >= N/8`) and the
/// subgeometric coefficient growth these unit expansions have.
pub fn eval_series_at(
    series: &QSeries,
    r: &Rat,
    ctx: &mut Ctx,
) -> Result<(Cplx, f64), NumericError> {
    if !rat_is_positive(r) {
        return Err(NumericError::NonPositiveR(format!("{r}")));
    }
    let n = series.level() as i64;
    let two_pi = ctx.two_pi();
    let r_f = ctx.from_ratio(r);
    let n_f = ctx.from_i64(n);
    let ln_q = ctx.mul(&two_pi, &r_f).neg();
    let ln_t = ctx.div(&ln_q, &n_f);
    let t_f64 = hp::to_f64(&ln_t).exp();
    assert!(t_f64 < 0.5, "tail bound needs t < 1/2; raise r");

    let mut acc = Cplx::zero(ctx);
    let mut coeff_err_sum = 0.0f64;
    let mut max_l1 = 1.0f64;
    let mut max_l1_exp = series.min_exp();
    for (e, c) in series.iter_window() {
        if c.is_zero() {
            continue;
        }
        let (cv, ce) = embed_complex(c, ctx);
        let ee = ctx.from_i64(e);
        let lt = ctx.mul(&ee, &ln_t);
        let tp = ctx.exp(&lt);
        let term = cv.scale(&tp, ctx);
        acc = acc.add(&term, ctx);
        let t_pow = t_f64.powi(e.clamp(-8_000, 8_000) as i32);
        let c_l1 = hp::to_f64(&cv.abs(ctx)).abs();
        coeff_err_sum += (ce + c_l1 * ctx.eps() * 8.0) * t_pow.min(1e300);
        if c_l1 >= max_l1 {
            max_l1 = c_l1;
            max_l1_exp = e;
        }
    }
    // Geometric tail: coefficient norms grow subgeometrically (like
    // exp(C*sqrt(e))), so allow a factor-2 ratio per step *from the largest
    // in-window coefficient onward* — the growth ratio at these horizons is
    // already below 2 per step and keeps shrinking.  The anchor gap matters:
    // sparse supports (exponents in one residue class) put the anchor several
    // steps under the horizon, and the first dropped coefficient can exceed
    // the anchored maximum.  Times 4 for headroom.
    let two_t = (2.0 * t_f64).min(0.999_999);
    let gap = (series.horizon() - max_l1_exp).clamp(0, 8_000) as i32;
    let tail = 4.0 * max_l1 * two_t.powi(gap)
        * t_f64.powi(max_l1_exp.clamp(-8_000, 8_000) as i32)
        / (1.0 - two_t).max(1e-6);
    Ok((acc, coeff_err_sum + tail))
}

/// Cross-check the product evaluation of `g_v^(12N)(ri)` against its
/// embedded series expansion at the given horizon.
pub fn cross_check_unit(
    v: &IndexVector,
    r: &Rat,
    horizon: i64,
    prec: usize,
) -> Result<CrossCheck, NumericError> {
    let mut ctx = Ctx::new(prec);
    let series = crate::siegel::siegel_power_expansion(v, horizon)?;
    let (sv, serr) = eval_series_at(&series, r, &mut ctx)?;
    let product = eval_unit_from_rep(&mut ctx, v.level(), v.a() as i64, v.b() as i64, r)?;
    let pv = product.to_cplx(&mut ctx)?;
    let pmag = hp::to_f64(&pv.abs(&ctx)).abs();
    let perr = pmag * (product.err.exp_m1().max(product.err)) * 2.0;
    let diff = sv.sub(&pv, &ctx).abs(&ctx);
    let distance = hp::to_f64(&diff);
    let tolerance = serr + perr + pmag * ctx.eps() * 64.0;
    Ok(CrossCheck {
        distance,
        tolerance,
        ok: distance <= tolerance,
    })
}
