//! Freeness certificates for the unit `g` and the subgroup sweep behind the
//! complete-freeness verdict.
//!
//! Two certificate routes exist, matched to the structure of each subgroup
//! `H` of the Galois group:
//!
//! * **Symbolic** (exact): when `H` meets the unitriangular family only in
//!   the identity, every non-identity element has a strictly positive
//!   `t`-order gap `ord(g^sigma / g) > 0`.  In the Leibniz expansion of
//!   `det(g^{sigma_j sigma_i})` the unique permutation pairing each element
//!   with its inverse attains `t`-order `n * ord(g)`, and every other term
//!   is strictly deeper, so the determinant's leading coefficient is
//!   `+-lead(g)^n != 0`.  No floating point involved.  Optionally the
//!   determinant is recomputed literally on truncated series as a
//!   cross-check.
//!
//! * **Numeric** (rigorous floating point): subgroups meeting the
//!   unitriangular family have order-gap zero somewhere, so the symbolic
//!   route does not apply.  Instead the ratio matrix is evaluated at
//!   `tau = r*i` and `|det| >= 1 - (n! - 1) * epsilon_hat` does the work,
//!   with every rounding and truncation error accounted.
//!
//! [`sweep_complete_freeness`] runs the appropriate certificate over every
//! subgroup of the requested scope; the unit is completely free exactly when
//! all certificates pass.

use crate::coeffring::Rat;
use crate::modgroup::{
    enumerate_family, enumerate_group, enumerate_subgroups, Family, GroupElement, GroupError,
    Subgroup,
};
use crate::numeric::{ratio_matrix_det, DetCertificate, NumericError};
use crate::par::parallel_map;
use crate::qseries::{QSeries, SeriesError};
use crate::siegel::{g_t_order, ratio_t_order, GConfig, OrbitExpansions, SiegelError};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FreenessError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Siegel(#[from] SiegelError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("symbolic certificate does not apply: {0}")]
    NotApplicable(String),
}

fn rat_str(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

// --- primitivity -----------------------------------------------------------------

/// How a Galois conjugate was shown to differ from `g` (or that it wasn't,
/// within the horizon).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistinctBy {
    /// The `t`-orders differ by this nonzero amount; no series needed.
    OrderGap(i64),
    /// Orders agree, but the expansions differ first at this exponent.
    SeriesCoefficient(i64),
    /// No difference seen below the horizon: not a disproof, just unresolved.
    Unresolved,
}

#[derive(Clone, Debug)]
pub struct PrimitivityWitness {
    pub sigma: GroupElement,
    pub status: DistinctBy,
}

/// Result of checking that `sigma != 1` implies `g^sigma != g`: exactly the
/// statement that `g` generates the full function field over the base.
#[derive(Clone, Debug)]
pub struct PrimitivityReport {
    pub level: u32,
    pub l: u32,
    pub m: u32,
    pub horizon: i64,
    pub group_order: usize,
    pub witnesses: Vec<PrimitivityWitness>,
    pub all_distinct: bool,
}

impl PrimitivityReport {
    pub fn pass(&self) -> bool {
        self.all_distinct
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let witnesses: Vec<serde_json::Value> = self
            .witnesses
            .iter()
            .map(|w| {
                let (kind, value) = match w.status {
                    DistinctBy::OrderGap(k) => ("order-gap", Some(k)),
                    DistinctBy::SeriesCoefficient(e) => ("series-coefficient", Some(e)),
                    DistinctBy::Unresolved => ("unresolved", None),
                };
                serde_json::json!({
                    "sigma": w.sigma.entries().to_vec(),
                    "distinct_by": kind,
                    "value": value,
                })
            })
            .collect();
        serde_json::json!({
            "kind": "primitivity",
            "N": self.level,
            "l": self.l,
            "m": self.m,
            "horizon": self.horizon,
            "group_order": self.group_order,
            "all_distinct": self.all_distinct,
            "witnesses": witnesses,
        })
    }
}

/// Check that every nontrivial Galois conjugate of `g` differs from `g`.
///
/// Conjugates with a nonzero order gap differ for free.  The gap-zero ones
/// (the unitriangular classes) are compared coefficient-by-coefficient up to
/// the horizon; a difference is conclusive, while agreement through the
/// horizon is reported as unresolved rather than as equality.
pub fn check_primitivity(cfg: &GConfig, horizon: i64) -> Result<PrimitivityReport, FreenessError> {
    let group = enumerate_group(cfg.level());
    let mut gap_zero = Vec::new();
    let mut gaps: HashMap<GroupElement, i64> = HashMap::new();
    for sigma in &group {
        let gap = ratio_t_order(cfg, sigma)?;
        gaps.insert(*sigma, gap);
        if gap == 0 && !sigma.is_identity() {
            gap_zero.push(*sigma);
        }
    }
    let orbit = OrbitExpansions::new(cfg, horizon, &gap_zero)?;
    let g = orbit.g()?;
    let mut witnesses = Vec::new();
    let mut all_distinct = true;
    for sigma in &group {
        if sigma.is_identity() {
            continue;
        }
        let gap = gaps[sigma];
        let status = if gap != 0 {
            DistinctBy::OrderGap(gap)
        } else {
            let image = orbit.g_image(sigma)?;
            match image.first_difference(&g, orbit.horizon())? {
                Some(e) => DistinctBy::SeriesCoefficient(e),
                None => {
                    all_distinct = false;
                    DistinctBy::Unresolved
                }
            }
        };
        witnesses.push(PrimitivityWitness {
            sigma: *sigma,
            status,
        });
    }
    Ok(PrimitivityReport {
        level: cfg.level(),
        l: cfg.l(),
        m: cfg.m(),
        horizon,
        group_order: group.len(),
        witnesses,
        all_distinct,
    })
}

// --- symbolic certificates ---------------------------------------------------------

/// Literal series determinant cross-check attached to a symbolic
/// certificate.
#[derive(Clone, Debug)]
pub struct SeriesDetCheck {
    pub horizon: i64,
    pub det_t_order: Option<i64>,
    pub agrees: bool,
}

/// Exact certificate that `det(g^{sigma_j sigma_i}) != 0` for one subgroup,
/// by the order-gap argument.
#[derive(Clone, Debug)]
pub struct SymbolicCertificate {
    pub order: usize,
    /// `(h, ord(g^h / g))` for every non-identity `h` in the subgroup.
    pub gaps: Vec<(GroupElement, i64)>,
    pub min_gap: Option<i64>,
    /// Predicted `t`-order of the determinant: `order * ord(g)`.
    pub det_t_order: i64,
    pub series_check: Option<SeriesDetCheck>,
    pub pass: bool,
}

impl SymbolicCertificate {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "order": self.order,
            "gaps": self.gaps.iter()
                .map(|(h, k)| serde_json::json!({"sigma": h.entries().to_vec(), "gap": k}))
                .collect::<Vec<_>>(),
            "min_gap": self.min_gap,
            "det_t_order": self.det_t_order,
            "series_check": self.series_check.as_ref().map(|c| serde_json::json!({
                "horizon": c.horizon,
                "det_t_order": c.det_t_order,
                "agrees": c.agrees,
            })),
            "pass": self.pass,
        })
    }
}

/// Produce the symbolic certificate for a subgroup with trivial
/// unitriangular intersection.  `series_check_horizon` additionally
/// recomputes the determinant on literal truncated expansions and compares
/// its `t`-order against the prediction; this is meant for small subgroups
/// (the cost is roughly `order * 2^order` series products).
pub fn certify_subgroup_symbolic(
    cfg: &GConfig,
    subgroup: &Subgroup,
    series_check_horizon: Option<i64>,
) -> Result<SymbolicCertificate, FreenessError> {
    for h in subgroup.elements() {
        if !h.is_identity() && Family::Gamma1.contains(h) {
            return Err(FreenessError::NotApplicable(format!(
                "subgroup contains the unitriangular element {h}; its order gap is zero, use the numeric certificate"
            )));
        }
    }
    let mut gaps = Vec::new();
    let mut pass = true;
    for h in subgroup.elements() {
        if h.is_identity() {
            continue;
        }
        let gap = ratio_t_order(cfg, h)?;
        if gap <= 0 {
            pass = false;
        }
        gaps.push((*h, gap));
    }
    let min_gap = gaps.iter().map(|(_, k)| *k).min();
    let n = subgroup.order();
    let det_t_order = n as i64 * g_t_order(cfg);
    let series_check = match series_check_horizon {
        Some(hor) if pass => {
            let check = series_det_check(cfg, subgroup, hor, det_t_order)?;
            if !check.agrees {
                pass = false;
            }
            Some(check)
        }
        _ => None,
    };
    Ok(SymbolicCertificate {
        order: n,
        gaps,
        min_gap,
        det_t_order,
        series_check,
        pass,
    })
}

/// Determinant of `[g^{sigma_j sigma_i}]` on literal truncated expansions,
/// by memoized minor expansion over column subsets.
fn series_det_check(
    cfg: &GConfig,
    subgroup: &Subgroup,
    horizon: i64,
    predicted_order: i64,
) -> Result<SeriesDetCheck, FreenessError> {
    let elements = subgroup.elements();
    let n = elements.len();
    assert!(n <= 16, "series determinant limited to small subgroups");
    let orbit = OrbitExpansions::new(cfg, horizon, elements)?;
    let mut entries: Vec<Vec<QSeries>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let prod = elements[j].multiply(&elements[i]);
            row.push(orbit.g_image(&prod)?);
        }
        entries.push(row);
    }
    let det = series_det(&entries)?;
    let det_t_order = det.t_order().ok();
    let agrees = det_t_order == Some(predicted_order);
    Ok(SeriesDetCheck {
        horizon,
        det_t_order,
        agrees,
    })
}

/// Memoized Laplace expansion: `minor(mask)` is the determinant of the
/// submatrix on rows `0..popcount(mask)` and the column set `mask`.
fn series_det(entries: &[Vec<QSeries>]) -> Result<QSeries, SeriesError> {
    let n = entries.len();
    let mut memo: HashMap<u32, QSeries> = HashMap::new();
    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    fn minor(
        mask: u32,
        entries: &[Vec<QSeries>],
        memo: &mut HashMap<u32, QSeries>,
    ) -> Result<QSeries, SeriesError> {
        if let Some(d) = memo.get(&mask) {
            return Ok(d.clone());
        }
        let k = mask.count_ones() as usize;
        let row = k - 1;
        let mut acc: Option<QSeries> = None;
        let mut idx = 0usize;
        for j in 0..entries.len() {
            if mask & (1 << j) == 0 {
                continue;
            }
            let term = if k == 1 {
                entries[row][j].clone()
            } else {
                let sub = minor(mask & !(1 << j), entries, memo)?;
                entries[row][j].mul(&sub)?
            };
            // Sign of expanding along the last row: (-1)^(row + idx).
            let signed = if (row + idx) % 2 == 0 {
                term
            } else {
                term.neg()
            };
            acc = Some(match acc {
                None => signed,
                Some(a) => a.add(&signed)?,
            });
            idx += 1;
        }
        let d = acc.expect("nonempty mask");
        memo.insert(mask, d.clone());
        Ok(d)
    }
    minor(full, entries, &mut memo)
}

// --- numeric certificates ----------------------------------------------------------

/// A numeric determinant certificate plus how it was obtained.
#[derive(Clone, Debug)]
pub struct NumericCertificate {
    pub certificate: DetCertificate,
    pub r: Rat,
    pub precision: usize,
    pub escalated: bool,
}

impl NumericCertificate {
    pub fn to_json_value(&self) -> serde_json::Value {
        let c = &self.certificate;
        serde_json::json!({
            "order": c.order,
            "det_mag": c.det_mag_f64,
            "det_err": c.det_err_abs,
            "max_offdiag_log": c.max_offdiag_log,
            "epsilon_hat": c.epsilon_hat,
            "lower_bound": c.lower_bound,
            "r": rat_str(&self.r),
            "precision": self.precision,
            "escalated": self.escalated,
            "pass": c.pass,
        })
    }
}

/// Numeric certificate for one subgroup at `tau = r*i`.  A failure that is
/// error-limited (exact arithmetic would have certified) is retried once at
/// double precision, capped at [`crate::MAX_PRECISION`]; a failure of the
/// parameters themselves is final — no amount of precision fixes a ratio
/// that genuinely exceeds the budget.
pub fn certify_subgroup_numeric(
    cfg: &GConfig,
    subgroup: &Subgroup,
    r: &Rat,
    precision: usize,
) -> Result<NumericCertificate, FreenessError> {
    let first = ratio_matrix_det(cfg, subgroup, r, precision)?;
    if first.pass || !first.error_limited() || precision >= crate::MAX_PRECISION {
        return Ok(NumericCertificate {
            certificate: first,
            r: r.clone(),
            precision,
            escalated: false,
        });
    }
    let higher = (precision * 2).min(crate::MAX_PRECISION);
    let second = ratio_matrix_det(cfg, subgroup, r, higher)?;
    Ok(NumericCertificate {
        certificate: second,
        r: r.clone(),
        precision: higher,
        escalated: true,
    })
}

// --- the sweep ----------------------------------------------------------------------

/// Which subgroup lattice to sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    /// Subgroups of the vanishing-upper-entry family only; every certificate
    /// is symbolic.
    Gamma0Upper,
    /// Every subgroup of the Galois group (complete freeness).
    Full,
}

impl Scope {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scope::Gamma0Upper => "gamma0-upper",
            Scope::Full => "full",
        }
    }
}

/// Knobs for [`sweep_complete_freeness`].
#[derive(Clone, Debug)]
pub struct SweepOptions {
    /// Evaluation point for numeric certificates.
    pub r: Rat,
    /// Starting precision for numeric certificates.
    pub precision: usize,
    /// Worker threads for independent subgroup certificates.
    pub parallel: usize,
    /// Run the literal series determinant cross-check on symbolic
    /// certificates of subgroups up to this order (0 disables).
    pub series_check_max_order: usize,
    /// Horizon for that cross-check.
    pub series_horizon: i64,
}

impl SweepOptions {
    pub fn for_level(level: u32) -> SweepOptions {
        SweepOptions {
            r: Rat::from_integer(2.into()),
            precision: crate::DEFAULT_PRECISION,
            parallel: 1,
            series_check_max_order: 4,
            series_horizon: crate::default_horizon(level),
        }
    }
}

/// Which certificate route a subgroup took.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertMethod {
    Symbolic,
    Numeric,
}

impl CertMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CertMethod::Symbolic => "symbolic",
            CertMethod::Numeric => "numeric",
        }
    }
}

/// Outcome for one subgroup in the sweep.
#[derive(Clone, Debug)]
pub struct SubgroupRecord {
    pub generators: Vec<GroupElement>,
    pub order: usize,
    pub method: CertMethod,
    pub symbolic: Option<SymbolicCertificate>,
    pub numeric: Option<NumericCertificate>,
    pub pass: bool,
}

impl SubgroupRecord {
    pub fn to_json_value(&self) -> serde_json::Value {
        // `certificate`/`value` summarize the route: the minimal order gap
        // for the symbolic argument, the determinant lower bound for the
        // numeric one.  The full certificates sit alongside.
        let (certificate, value) = match self.method {
            CertMethod::Symbolic => (
                "order-gap",
                self.symbolic
                    .as_ref()
                    .and_then(|c| c.min_gap)
                    .map_or(serde_json::Value::Null, |g| serde_json::json!(g)),
            ),
            CertMethod::Numeric => (
                "det-lower-bound",
                self.numeric
                    .as_ref()
                    .map_or(serde_json::Value::Null, |c| {
                        serde_json::json!(c.certificate.lower_bound)
                    }),
            ),
        };
        serde_json::json!({
            "generators": self.generators.iter().map(|g| g.entries().to_vec()).collect::<Vec<_>>(),
            "order": self.order,
            "method": self.method.as_str(),
            "certificate": certificate,
            "value": value,
            "symbolic": self.symbolic.as_ref().map(|c| c.to_json_value()),
            "numeric": self.numeric.as_ref().map(|c| c.to_json_value()),
            "pass": self.pass,
        })
    }
}

/// The full sweep verdict.
#[derive(Clone, Debug)]
pub struct FreenessReport {
    pub level: u32,
    pub l: u32,
    pub m: u32,
    pub scope: Scope,
    pub r: Rat,
    pub records: Vec<SubgroupRecord>,
    pub overall: bool,
}

impl FreenessReport {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": "freeness-sweep",
            "N": self.level,
            "l": self.l,
            "m": self.m,
            "scope": self.scope.as_str(),
            "r": rat_str(&self.r),
            "subgroup_count": self.records.len(),
            "records": self.records.iter().map(|r| r.to_json_value()).collect::<Vec<_>>(),
            "overall": self.overall,
        })
    }
}

/// Certify every subgroup in the scope, symbolically where the order gap
/// allows and numerically elsewhere.  `overall` is true exactly when every
/// subgroup certificate passed — i.e. when `g` is (completely, for the full
/// scope) free for the swept lattice.
pub fn sweep_complete_freeness(
    cfg: &GConfig,
    scope: Scope,
    opts: &SweepOptions,
) -> Result<FreenessReport, FreenessError> {
    let ambient = match scope {
        Scope::Full => enumerate_group(cfg.level()),
        Scope::Gamma0Upper => enumerate_family(cfg.level(), Family::Gamma0Upper),
    };
    let subgroups = enumerate_subgroups(cfg.level(), &ambient)?;
    let outcomes = parallel_map(subgroups, opts.parallel, |h| certify_one(cfg, &h, opts));
    let mut records = Vec::with_capacity(outcomes.len());
    let mut overall = true;
    for outcome in outcomes {
        let record = outcome?;
        overall &= record.pass;
        records.push(record);
    }
    Ok(FreenessReport {
        level: cfg.level(),
        l: cfg.l(),
        m: cfg.m(),
        scope,
        r: opts.r.clone(),
        records,
        overall,
    })
}

fn certify_one(
    cfg: &GConfig,
    subgroup: &Subgroup,
    opts: &SweepOptions,
) -> Result<SubgroupRecord, FreenessError> {
    let meets_gamma1 = subgroup
        .elements()
        .iter()
        .any(|x| !x.is_identity() && Family::Gamma1.contains(x));
    let (method, symbolic, numeric, pass) = if meets_gamma1 {
        let cert = certify_subgroup_numeric(cfg, subgroup, &opts.r, opts.precision)?;
        let pass = cert.certificate.pass;
        (CertMethod::Numeric, None, Some(cert), pass)
    } else {
        let check = (subgroup.order() > 1
            && subgroup.order() <= opts.series_check_max_order)
            .then_some(opts.series_horizon);
        let cert = certify_subgroup_symbolic(cfg, subgroup, check)?;
        let pass = cert.pass;
        (CertMethod::Symbolic, Some(cert), None, pass)
    };
    Ok(SubgroupRecord {
        generators: subgroup.generators().to_vec(),
        order: subgroup.order(),
        method,
        symbolic,
        numeric,
        pass,
    })
}
