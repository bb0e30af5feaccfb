//! q-product expansions of 12N-th powers of Siegel functions, exact order
//! formulas, and the order inequality that drives every certificate in this
//! crate.
//!
//! For an index vector `v = (a, b)/N` (nonzero mod Z^2) the function
//! `g_v^(12N)` is a modular unit for X(N): holomorphic and nonvanishing away
//! from the cusps.  In `t = q^(1/N)` and `z = zeta_N` it expands as
//!
//! ```text
//! g_v^(12N) = z^(6b(a-N)) * t^(6a^2 - 6aN + N^2)
//!             * [ prod_{n>=0} (1 - t^(nN+a) z^b)
//!               * prod_{n>=1} (1 - t^(nN-a) z^-b) ]^(12N)
//! ```
//!
//! The distinguished unit studied here is
//! `g = g_(0,1)^(-12N*l) * g_(1,0)^(-12N*m)` with `l > m > 0`; the Galois
//! group acts through [`GroupElement::act_on_index`] on the two index
//! vectors, and the `t`-order of `g^sigma / g` is a finite, exactly
//! computable rational that is nonnegative for every coset and zero exactly
//! on the unitriangular classes.  That gap is the engine of the symbolic
//! freeness certificates.

use crate::coeffring::{CycNum, Rat};
use crate::modgroup::{enumerate_group, Family, GroupElement};
use crate::qseries::{QSeries, SeriesError};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SiegelError {
    #[error("index vector is zero mod Z^2 at level {0}")]
    ZeroVector(u32),
    #[error("horizon must be at least 1, got {0}")]
    BadHorizon(i64),
    #[error("invalid unit exponents: require l > m > 0, got l={l}, m={m}")]
    BadExponents { l: u32, m: u32 },
    #[error("level must be at least 2, got {0}")]
    BadLevel(u32),
    #[error("group element of level {1} applied at level {0}")]
    LevelMismatch(u32, u32),
    #[error("orbit cache has no expansion prepared for {0}")]
    NotPrepared(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// A nonzero index vector `(a, b)/N in (1/N)Z^2 / Z^2`, stored as the
/// canonical representative of `{v, -v}` (lexicographically smaller entry
/// pair).  Siegel-unit powers depend on the vector only through this class.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexVector {
    level: u32,
    a: u32,
    b: u32,
}

impl IndexVector {
    pub fn new(level: u32, a: u32, b: u32) -> Result<IndexVector, SiegelError> {
        if level < 2 {
            return Err(SiegelError::BadLevel(level));
        }
        let (a, b) = (a % level, b % level);
        if a == 0 && b == 0 {
            return Err(SiegelError::ZeroVector(level));
        }
        let neg = |x: u32| (level - x) % level;
        let (a, b) = (a, b).min((neg(a), neg(b)));
        Ok(IndexVector { level, a, b })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn b(&self) -> u32 {
        self.b
    }
}

impl fmt::Debug for IndexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})/{}", self.a, self.b, self.level)
    }
}

impl fmt::Display for IndexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})/{}", self.a, self.b, self.level)
    }
}

/// All canonical nonzero index vectors at a level, sorted.
pub fn canonical_vectors(level: u32) -> Vec<IndexVector> {
    let mut out = Vec::new();
    for a in 0..level {
        for b in 0..level {
            if a == 0 && b == 0 {
                continue;
            }
            let v = IndexVector::new(level, a, b).expect("nonzero");
            if v.a() == a && v.b() == b {
                out.push(v);
            }
        }
    }
    out.sort();
    out
}

/// Parameters of the distinguished unit
/// `g = g_(0,1)^(-12N*l) * g_(1,0)^(-12N*m)`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct GConfig {
    level: u32,
    l: u32,
    m: u32,
}

impl GConfig {
    pub fn new(level: u32, l: u32, m: u32) -> Result<GConfig, SiegelError> {
        if level < 2 {
            return Err(SiegelError::BadLevel(level));
        }
        if !(l > m && m > 0) {
            return Err(SiegelError::BadExponents { l, m });
        }
        Ok(GConfig { level, l, m })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// First base vector `(0, 1)/N`.
    pub fn v1(&self) -> IndexVector {
        IndexVector::new(self.level, 0, 1).expect("nonzero")
    }

    /// Second base vector `(1, 0)/N`.
    pub fn v2(&self) -> IndexVector {
        IndexVector::new(self.level, 1, 0).expect("nonzero")
    }
}

// --- exact order formulas ----------------------------------------------------

/// Second Bernoulli polynomial `B_2(x) = x^2 - x + 1/6`.
pub fn bernoulli2(x: &Rat) -> Rat {
    x * x - x + Rat::new(1.into(), 6.into())
}

/// Fractional part `<x> = x - floor(x)`, in `[0, 1)`.
pub fn frac_part(x: &Rat) -> Rat {
    x - x.floor()
}

/// q-order of `g_v^(12N)`: `6N * B_2(<a/N>)`.
pub fn siegel_power_q_order(v: &IndexVector) -> Rat {
    let n = Rat::from_integer((v.level() as i64).into());
    let x = Rat::new((v.a() as i64).into(), (v.level() as i64).into());
    Rat::from_integer(6.into()) * &n * bernoulli2(&frac_part(&x))
}

/// t-order of `g_v^(12N)` where `t = q^(1/N)`: the integer
/// `6a^2 - 6aN + N^2`.
pub fn siegel_power_t_order(v: &IndexVector) -> i64 {
    let (a, n) = (v.a() as i64, v.level() as i64);
    6 * a * a - 6 * a * n + n * n
}

/// t-order of `g = g_(0,1)^(-12N*l) * g_(1,0)^(-12N*m)`; always negative,
/// so `g` is genuinely singular at the cusp `i*infinity`.
pub fn g_t_order(cfg: &GConfig) -> i64 {
    let (l, m) = (cfg.l() as i64, cfg.m() as i64);
    -l * siegel_power_t_order(&cfg.v1()) - m * siegel_power_t_order(&cfg.v2())
}

/// q-order of `g` as a rational.
pub fn g_q_order(cfg: &GConfig) -> Rat {
    Rat::new(g_t_order(cfg).into(), (cfg.level() as i64).into())
}

/// t-order of `g^sigma`, from the exact per-factor formula.
pub fn g_image_t_order(cfg: &GConfig, sigma: &GroupElement) -> Result<i64, SiegelError> {
    if sigma.level() != cfg.level() {
        return Err(SiegelError::LevelMismatch(cfg.level(), sigma.level()));
    }
    let (l, m) = (cfg.l() as i64, cfg.m() as i64);
    let w1 = sigma.act_on_index(&cfg.v1());
    let w2 = sigma.act_on_index(&cfg.v2());
    Ok(-l * siegel_power_t_order(&w1) - m * siegel_power_t_order(&w2))
}

/// t-order of the coset ratio `g^sigma / g` (an exact integer).
pub fn ratio_t_order(cfg: &GConfig, sigma: &GroupElement) -> Result<i64, SiegelError> {
    Ok(g_image_t_order(cfg, sigma)? - g_t_order(cfg))
}

/// q-order of the coset ratio `g^sigma / g`.
pub fn ratio_q_order(cfg: &GConfig, sigma: &GroupElement) -> Result<Rat, SiegelError> {
    Ok(Rat::new(
        ratio_t_order(cfg, sigma)?.into(),
        (cfg.level() as i64).into(),
    ))
}

// --- q-product expansions ------------------------------------------------------

/// Expansion of `g_v^(12N)` computed from an explicit representative
/// `(a, b)` taken mod N, without canonical `{v, -v}` reduction.  Exists so
/// that representative independence is a checkable theorem here rather than
/// a silent normalization.
pub fn expansion_from_rep(level: u32, a: u32, b: u32, horizon: i64) -> Result<QSeries, SiegelError> {
    if level < 2 {
        return Err(SiegelError::BadLevel(level));
    }
    if horizon < 1 {
        return Err(SiegelError::BadHorizon(horizon));
    }
    let n = level as i64;
    let (a, b) = ((a % level) as i64, (b % level) as i64);
    if a == 0 && b == 0 {
        return Err(SiegelError::ZeroVector(level));
    }
    let t_ord = 6 * a * a - 6 * a * n + n * n;
    let w = horizon - t_ord;
    if w <= 0 {
        // The unit is O(t^t_ord) with t_ord >= horizon: everything known
        // up to the horizon vanishes.
        return Ok(QSeries::zero(level, horizon));
    }

    // Base product P(t) = prod (1 - z^b t^(kN+a)) * prod (1 - z^-b t^(kN-a))
    // on the window [0, w); factors with exponent >= w are 1 + O(t^w).
    let mut base = vec![CycNum::zero(level); w as usize];
    base[0] = CycNum::one(level);
    let zb = CycNum::root_of_unity(level, b);
    let zb_inv = CycNum::root_of_unity(level, -b);
    let mut k = 0i64;
    while k * n + a < w {
        mul_binomial_factor(&mut base, (k * n + a) as usize, &zb);
        k += 1;
    }
    let mut k = 1i64;
    while k * n - a < w {
        mul_binomial_factor(&mut base, (k * n - a) as usize, &zb_inv);
        k += 1;
    }

    let base = QSeries::from_window(level, 0, w, base);
    let powed = base.pow(12 * n)?;
    let prefactor = CycNum::root_of_unity(level, 6 * b * (a - n));
    Ok(powed.scale(&prefactor).shift(t_ord))
}

/// In-place multiplication of a window starting at t^0 by `(1 - z * t^e)`.
/// `e == 0` degenerates to scaling by the constant `1 - z`.
fn mul_binomial_factor(window: &mut [CycNum], e: usize, z: &CycNum) {
    if e == 0 {
        let c = CycNum::one(z.conductor()).sub(z);
        for x in window.iter_mut() {
            if !x.is_zero() {
                *x = x.mul(&c);
            }
        }
        return;
    }
    // Descending, so the source slot x - e is still the original value.
    for x in (e..window.len()).rev() {
        if window[x - e].is_zero() {
            continue;
        }
        let sub = window[x - e].mul(z);
        window[x] = window[x].sub(&sub);
    }
}

/// Expansion of `g_v^(12N)` on `[t_order, horizon)`.
pub fn siegel_power_expansion(v: &IndexVector, horizon: i64) -> Result<QSeries, SiegelError> {
    expansion_from_rep(v.level(), v.a(), v.b(), horizon)
}

/// Expansion of `u(w1)^(-l) * u(w2)^(-m)` where `u(v) = g_v^(12N)` — the
/// shape of `g^sigma` for `w1 = sigma(0,1)`, `w2 = sigma(1,0)`.
pub fn g_expansion_from_indices(
    cfg: &GConfig,
    w1: &IndexVector,
    w2: &IndexVector,
    horizon: i64,
) -> Result<QSeries, SiegelError> {
    if horizon < 1 {
        return Err(SiegelError::BadHorizon(horizon));
    }
    let (l, m) = (cfg.l() as i64, cfg.m() as i64);
    let (t1, t2) = (siegel_power_t_order(w1), siegel_power_t_order(w2));
    let target = -l * t1 - m * t2;
    let w = horizon - target;
    if w <= 0 {
        return Ok(QSeries::zero(cfg.level(), horizon));
    }
    let u1 = siegel_power_expansion(w1, t1 + w)?;
    let u2 = siegel_power_expansion(w2, t2 + w)?;
    let p1 = u1.pow(-l)?;
    let p2 = u2.pow(-m)?;
    Ok(p1.mul(&p2)?.truncate(horizon))
}

/// Expansion of the distinguished unit `g` itself.
pub fn g_expansion(cfg: &GConfig, horizon: i64) -> Result<QSeries, SiegelError> {
    g_expansion_from_indices(cfg, &cfg.v1(), &cfg.v2(), horizon)
}

/// Expansion of the Galois image `g^sigma`.
pub fn g_image_expansion(
    cfg: &GConfig,
    sigma: &GroupElement,
    horizon: i64,
) -> Result<QSeries, SiegelError> {
    if sigma.level() != cfg.level() {
        return Err(SiegelError::LevelMismatch(cfg.level(), sigma.level()));
    }
    let w1 = sigma.act_on_index(&cfg.v1());
    let w2 = sigma.act_on_index(&cfg.v2());
    g_expansion_from_indices(cfg, &w1, &w2, horizon)
}

// --- shared expansion cache ---------------------------------------------------

/// Precomputed factor powers for a whole set of Galois images.  Only
/// `O(N^2)` distinct Siegel-unit powers appear across the entire group, so
/// sweeping over many cosets reduces to one cached `pow` per index vector
/// plus a single series product per coset.
pub struct OrbitExpansions {
    cfg: GConfig,
    horizon: i64,
    pow_l: HashMap<IndexVector, QSeries>,
    pow_m: HashMap<IndexVector, QSeries>,
}

impl OrbitExpansions {
    /// Prepare every expansion needed to form `g^sigma` for the given
    /// elements (the identity is always included).
    pub fn new(
        cfg: &GConfig,
        horizon: i64,
        sigmas: &[GroupElement],
    ) -> Result<OrbitExpansions, SiegelError> {
        if horizon < 1 {
            return Err(SiegelError::BadHorizon(horizon));
        }
        let (l, m) = (cfg.l() as i64, cfg.m() as i64);
        let mut pairs = vec![(cfg.v1(), cfg.v2())];
        for s in sigmas {
            if s.level() != cfg.level() {
                return Err(SiegelError::LevelMismatch(cfg.level(), s.level()));
            }
            pairs.push((s.act_on_index(&cfg.v1()), s.act_on_index(&cfg.v2())));
        }
        let min_target = pairs
            .iter()
            .map(|(w1, w2)| -l * siegel_power_t_order(w1) - m * siegel_power_t_order(w2))
            .min()
            .expect("nonempty");
        // One shared window length makes every pairwise product reach the
        // requested horizon.
        let w = (horizon - min_target).max(1);
        let mut pow_l = HashMap::new();
        let mut pow_m = HashMap::new();
        for (w1, w2) in &pairs {
            if !pow_l.contains_key(w1) {
                let t1 = siegel_power_t_order(w1);
                let u = siegel_power_expansion(w1, t1 + w)?;
                pow_l.insert(*w1, u.pow(-l)?);
            }
            if !pow_m.contains_key(w2) {
                let t2 = siegel_power_t_order(w2);
                let u = siegel_power_expansion(w2, t2 + w)?;
                pow_m.insert(*w2, u.pow(-m)?);
            }
        }
        Ok(OrbitExpansions {
            cfg: *cfg,
            horizon,
            pow_l,
            pow_m,
        })
    }

    pub fn horizon(&self) -> i64 {
        self.horizon
    }

    pub fn cfg(&self) -> &GConfig {
        &self.cfg
    }

    /// `g^sigma` truncated to the cache horizon.
    pub fn g_image(&self, sigma: &GroupElement) -> Result<QSeries, SiegelError> {
        let w1 = sigma.act_on_index(&self.cfg.v1());
        let w2 = sigma.act_on_index(&self.cfg.v2());
        let p1 = self
            .pow_l
            .get(&w1)
            .ok_or_else(|| SiegelError::NotPrepared(format!("{w1}")))?;
        let p2 = self
            .pow_m
            .get(&w2)
            .ok_or_else(|| SiegelError::NotPrepared(format!("{w2}")))?;
        Ok(p1.mul(p2)?.truncate(self.horizon))
    }

    /// The unit `g` itself.
    pub fn g(&self) -> Result<QSeries, SiegelError> {
        self.g_image(&GroupElement::identity(self.cfg.level()))
    }
}

// --- the order inequality over the whole group ---------------------------------

/// One Galois coset in the order table.
#[derive(Clone, Debug)]
pub struct OrderRow {
    pub sigma: GroupElement,
    pub ratio_t_order: i64,
    pub in_gamma1: bool,
}

/// Exact `t`-orders of `g^sigma / g` over every coset, plus the two facts
/// the certificates need: no ratio has negative order, and order zero
/// happens exactly on the unitriangular classes.
#[derive(Clone, Debug)]
pub struct OrderInequalityReport {
    pub level: u32,
    pub l: u32,
    pub m: u32,
    pub rows: Vec<OrderRow>,
    pub all_nonnegative: bool,
    pub equality_exactly_on_gamma1: bool,
}

impl OrderInequalityReport {
    pub fn pass(&self) -> bool {
        self.all_nonnegative && self.equality_exactly_on_gamma1
    }
}

pub fn order_inequality_report(cfg: &GConfig) -> OrderInequalityReport {
    let mut rows = Vec::new();
    let mut all_nonnegative = true;
    let mut equality_exactly = true;
    for sigma in enumerate_group(cfg.level()) {
        let ord = ratio_t_order(cfg, &sigma).expect("same level");
        let in_g1 = Family::Gamma1.contains(&sigma);
        if ord < 0 {
            all_nonnegative = false;
        }
        if (ord == 0) != in_g1 {
            equality_exactly = false;
        }
        rows.push(OrderRow {
            sigma,
            ratio_t_order: ord,
            in_gamma1: in_g1,
        });
    }
    OrderInequalityReport {
        level: cfg.level(),
        l: cfg.l(),
        m: cfg.m(),
        rows,
        all_nonnegative,
        equality_exactly_on_gamma1: equality_exactly,
    }
}

/// `B_2(<a/N>)` as an exact rational, the area-shape of the order table.
pub fn bernoulli2_at(level: u32, a: u32) -> Rat {
    let x = Rat::new(((a % level) as i64).into(), (level as i64).into());
    bernoulli2(&x)
}
