//! Truncated Laurent series in `t = q^(1/N)` over Q(zeta_N), with explicit
//! knowledge horizons.
//!
//! A [`QSeries`] represents a function whose coefficient at `t^e` is
//!
//! * known to be zero for `e < min_exp`,
//! * stored for `min_exp <= e < horizon`,
//! * **unknown** for `e >= horizon`.
//!
//! Every operation propagates the horizon honestly: multiplying by a series
//! that starts at `t^m` shifts how far the unknown tail can contaminate the
//! product, so `horizon(a*b) = min(h_a + m_b, h_b + m_a)`, and inverting
//! costs `2 * min_exp`: `horizon(1/a) = h_a - 2 m_a`.  Nothing ever claims a
//! coefficient beyond what the inputs support.

use crate::coeffring::{CycNum, Rat};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("series level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),
    #[error("leading coefficient zero or unknown up to horizon; cannot invert")]
    ZeroLeadingCoefficient,
    #[error("horizon too small: need knowledge up to t^{needed}, have t^{have}")]
    HorizonTooSmall { needed: i64, have: i64 },
    #[error("t-order undetermined: all known coefficients vanish below horizon {horizon}")]
    OrderUndetermined { horizon: i64 },
}

/// Truncated Laurent series over Q(zeta_level).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QSeries {
    level: u32,
    min_exp: i64,
    horizon: i64,
    coeffs: Vec<CycNum>,
}

impl QSeries {
    /// Build a series from a raw window.  `coeffs[k]` is the coefficient of
    /// `t^(min_exp + k)`; the window must end exactly at `horizon`.  Leading
    /// zeros are absorbed into `min_exp`.
    pub fn from_window(level: u32, min_exp: i64, horizon: i64, coeffs: Vec<CycNum>) -> QSeries {
        assert_eq!(
            coeffs.len() as i64,
            horizon - min_exp,
            "window length must equal horizon - min_exp"
        );
        for c in &coeffs {
            assert_eq!(
                c.conductor(),
                level,
                "coefficient conductor must equal series level"
            );
        }
        let mut s = QSeries {
            level,
            min_exp,
            horizon,
            coeffs,
        };
        s.normalize();
        s
    }

    /// The all-zero function as far as knowledge extends: every coefficient
    /// below `horizon` is zero.
    pub fn zero(level: u32, horizon: i64) -> QSeries {
        QSeries {
            level,
            min_exp: horizon,
            horizon,
            coeffs: Vec::new(),
        }
    }

    /// The constant 1, known below `horizon`.
    pub fn one(level: u32, horizon: i64) -> QSeries {
        Self::monomial(level, 0, CycNum::one(level), horizon)
    }

    /// `coeff * t^exp`, known below `horizon`.
    pub fn monomial(level: u32, exp: i64, coeff: CycNum, horizon: i64) -> QSeries {
        assert!(horizon > exp, "monomial exponent must sit below the horizon");
        let mut coeffs = vec![CycNum::zero(level); (horizon - exp) as usize];
        coeffs[0] = coeff;
        Self::from_window(level, exp, horizon, coeffs)
    }

    /// Series from sparse `(exponent, coefficient)` terms.
    pub fn from_terms(level: u32, horizon: i64, terms: &[(i64, CycNum)]) -> QSeries {
        let lo = terms
            .iter()
            .map(|(e, _)| *e)
            .min()
            .unwrap_or(horizon)
            .min(horizon);
        let mut coeffs = vec![CycNum::zero(level); (horizon - lo) as usize];
        for (e, c) in terms {
            assert!(*e < horizon, "term at t^{e} is beyond the horizon {horizon}");
            coeffs[(e - lo) as usize] = coeffs[(e - lo) as usize].add(c);
        }
        Self::from_window(level, lo, horizon, coeffs)
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(0) => {}
            Some(k) => {
                self.coeffs.drain(..k);
                self.min_exp += k as i64;
            }
            None => {
                self.coeffs.clear();
                self.min_exp = self.horizon;
            }
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Exponent of the lowest stored term (equals `horizon` for a series
    /// that vanishes up to its horizon).
    pub fn min_exp(&self) -> i64 {
        self.min_exp
    }

    pub fn horizon(&self) -> i64 {
        self.horizon
    }

    /// True when every known coefficient vanishes.  Says nothing about the
    /// function beyond the horizon.
    pub fn is_zero_up_to_horizon(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `t^e`, or `None` when `e` is beyond the horizon.
    pub fn coeff(&self, e: i64) -> Option<CycNum> {
        if e >= self.horizon {
            None
        } else if e < self.min_exp {
            Some(CycNum::zero(self.level))
        } else {
            Some(self.coeffs[(e - self.min_exp) as usize].clone())
        }
    }

    /// Stored window as `(exponent, coefficient)` pairs, zeros included.
    pub fn iter_window(&self) -> impl Iterator<Item = (i64, &CycNum)> {
        let lo = self.min_exp;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(k, c)| (lo + k as i64, c))
    }

    /// `t`-order of the series: the exponent of the first nonzero
    /// coefficient.  Errors when everything known vanishes — the order may
    /// lie beyond the horizon, so "zero so far" is not an answer.
    pub fn t_order(&self) -> Result<i64, SeriesError> {
        if self.coeffs.is_empty() {
            Err(SeriesError::OrderUndetermined {
                horizon: self.horizon,
            })
        } else {
            Ok(self.min_exp)
        }
    }

    /// Leading coefficient (paired with [`QSeries::t_order`]).
    pub fn leading_coeff(&self) -> Result<&CycNum, SeriesError> {
        self.coeffs
            .first()
            .ok_or(SeriesError::OrderUndetermined {
                horizon: self.horizon,
            })
    }

    fn check_level(&self, rhs: &QSeries) -> Result<(), SeriesError> {
        if self.level != rhs.level {
            Err(SeriesError::LevelMismatch(self.level, rhs.level))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, rhs: &QSeries) -> Result<QSeries, SeriesError> {
        self.check_level(rhs)?;
        let horizon = self.horizon.min(rhs.horizon);
        let lo = self.min_exp.min(rhs.min_exp).min(horizon);
        let mut coeffs = Vec::with_capacity((horizon - lo) as usize);
        for e in lo..horizon {
            let a = self.coeff(e).expect("below own horizon");
            let b = rhs.coeff(e).expect("below own horizon");
            coeffs.push(a.add(&b));
        }
        Ok(QSeries::from_window(self.level, lo, horizon, coeffs))
    }

    pub fn sub(&self, rhs: &QSeries) -> Result<QSeries, SeriesError> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> QSeries {
        QSeries {
            level: self.level,
            min_exp: self.min_exp,
            horizon: self.horizon,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn scale(&self, k: &CycNum) -> QSeries {
        assert_eq!(k.conductor(), self.level, "scalar conductor must equal level");
        if k.is_zero() {
            return QSeries::zero(self.level, self.horizon);
        }
        let mut s = QSeries {
            level: self.level,
            min_exp: self.min_exp,
            horizon: self.horizon,
            coeffs: self.coeffs.iter().map(|c| c.mul(k)).collect(),
        };
        s.normalize();
        s
    }

    /// Multiply by `t^k` (exact re-indexing).
    pub fn shift(&self, k: i64) -> QSeries {
        QSeries {
            level: self.level,
            min_exp: self.min_exp + k,
            horizon: self.horizon + k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Product with honest horizon propagation:
    /// `horizon = min(h_a + m_b, h_b + m_a)`.
    pub fn mul(&self, rhs: &QSeries) -> Result<QSeries, SeriesError> {
        self.check_level(rhs)?;
        let horizon = (self.horizon + rhs.min_exp).min(rhs.horizon + self.min_exp);
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Ok(QSeries::zero(self.level, horizon));
        }
        let lo = self.min_exp + rhs.min_exp;
        let n = (horizon - lo) as usize;
        let mut coeffs = vec![CycNum::zero(self.level); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let ei = self.min_exp + i as i64;
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let e = ei + rhs.min_exp + j as i64;
                if e >= horizon {
                    break;
                }
                let k = (e - lo) as usize;
                coeffs[k] = coeffs[k].add(&a.mul(b));
            }
        }
        Ok(QSeries::from_window(self.level, lo, horizon, coeffs))
    }

    /// Multiplicative inverse.  Requires a nonzero leading coefficient;
    /// knowledge shrinks to `horizon - 2 * min_exp`.
    pub fn inv(&self) -> Result<QSeries, SeriesError> {
        let lead = self
            .coeffs
            .first()
            .ok_or(SeriesError::ZeroLeadingCoefficient)?;
        let len = self.coeffs.len();
        let lead_inv = lead.inv().expect("nonzero in a field");
        // u = sum u_k x^k with u_0 = lead; v = 1/u by the standard recurrence
        // v_n = -(1/u_0) * sum_{i=1..n} u_i v_{n-i}.
        let mut v: Vec<CycNum> = Vec::with_capacity(len);
        v.push(lead_inv.clone());
        for n in 1..len {
            let mut acc = CycNum::zero(self.level);
            for i in 1..=n {
                if self.coeffs[i].is_zero() {
                    continue;
                }
                acc = acc.add(&self.coeffs[i].mul(&v[n - i]));
            }
            v.push(acc.mul(&lead_inv).neg());
        }
        Ok(QSeries::from_window(
            self.level,
            -self.min_exp,
            -self.min_exp + len as i64,
            v,
        ))
    }

    /// Integer power by binary exponentiation; negative exponents invert
    /// first (and pay the corresponding horizon cost).
    pub fn pow(&self, e: i64) -> Result<QSeries, SeriesError> {
        if e == 0 {
            let len = if self.coeffs.is_empty() {
                (self.horizon - self.min_exp).max(1)
            } else {
                self.coeffs.len() as i64
            };
            return Ok(QSeries::one(self.level, len));
        }
        let base = if e < 0 { self.inv()? } else { self.clone() };
        if base.coeffs.is_empty() {
            // zero up to its horizon: the power is zero up to |e| * horizon.
            return Ok(QSeries::zero(self.level, base.horizon * e.abs()));
        }
        let mut k = e.unsigned_abs();
        let mut acc: Option<QSeries> = None;
        let mut sq = base;
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul(&sq)?,
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            sq = sq.mul(&sq)?;
        }
        Ok(acc.expect("nonzero exponent"))
    }

    /// Equality of all coefficients strictly below `upto`.  Errors if either
    /// side's horizon falls short of `upto`.
    pub fn eq_up_to(&self, rhs: &QSeries, upto: i64) -> Result<bool, SeriesError> {
        Ok(self.first_difference(rhs, upto)?.is_none())
    }

    /// Smallest exponent below `upto` where the two series differ, if any.
    pub fn first_difference(
        &self,
        rhs: &QSeries,
        upto: i64,
    ) -> Result<Option<i64>, SeriesError> {
        self.check_level(rhs)?;
        let have = self.horizon.min(rhs.horizon);
        if upto > have {
            return Err(SeriesError::HorizonTooSmall { needed: upto, have });
        }
        let lo = self.min_exp.min(rhs.min_exp);
        for e in lo..upto {
            if self.coeff(e) != rhs.coeff(e) {
                return Ok(Some(e));
            }
        }
        Ok(None)
    }

    /// Forget knowledge at and above `new_horizon` (no-op if the horizon is
    /// already lower).
    pub fn truncate(&self, new_horizon: i64) -> QSeries {
        let horizon = self.horizon.min(new_horizon);
        if horizon >= self.horizon {
            return self.clone();
        }
        let keep = (horizon - self.min_exp).max(0) as usize;
        let mut s = QSeries {
            level: self.level,
            min_exp: self.min_exp.min(horizon),
            horizon,
            coeffs: self.coeffs[..keep].to_vec(),
        };
        s.normalize();
        s
    }

    // --- serialization ------------------------------------------------------

    pub fn to_dump(&self) -> QSeriesDump {
        // Emit the full window including leading knowledge: consumers index
        // coefficient k as exponent min_exp + k.
        QSeriesDump {
            level: self.level,
            min_exp: self.min_exp,
            horizon: self.horizon,
            coeffs: self.coeffs.iter().map(|c| c.to_strings()).collect(),
        }
    }

    pub fn from_dump(d: &QSeriesDump) -> Result<QSeries, String> {
        if d.level < 1 {
            return Err(format!("bad level {}", d.level));
        }
        if d.horizon - d.min_exp != d.coeffs.len() as i64 {
            return Err(format!(
                "window length {} does not match horizon {} - min_exp {}",
                d.coeffs.len(),
                d.horizon,
                d.min_exp
            ));
        }
        let mut coeffs = Vec::with_capacity(d.coeffs.len());
        for raw in &d.coeffs {
            coeffs.push(CycNum::from_strings(d.level, raw)?);
        }
        Ok(QSeries::from_window(d.level, d.min_exp, d.horizon, coeffs))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_dump()).expect("series serialization")
    }

    pub fn from_json(s: &str) -> Result<QSeries, String> {
        let dump: QSeriesDump = serde_json::from_str(s).map_err(|e| e.to_string())?;
        QSeries::from_dump(&dump)
    }
}

/// Wire format for a series: coefficients as vectors of `p/q` strings in the
/// power basis of Q(zeta_level).
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct QSeriesDump {
    pub level: u32,
    pub min_exp: i64,
    pub horizon: i64,
    pub coeffs: Vec<Vec<String>>,
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (e, c) in self.iter_window() {
            if c.is_zero() {
                continue;
            }
            if wrote {
                write!(f, " + ")?;
            }
            let cs = c.to_string();
            let needs_parens = cs.contains(' ') || cs.contains('-');
            if e == 0 {
                write!(f, "{cs}")?;
            } else {
                if needs_parens {
                    write!(f, "({cs})")?;
                } else {
                    write!(f, "{cs}")?;
                }
                if e == 1 {
                    write!(f, "*t")?;
                } else {
                    write!(f, "*t^{e}")?;
                }
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.horizon)
    }
}

/// Convenience: rational constant as a series coefficient.
pub fn rat_coeff(level: u32, n: i64, d: i64) -> CycNum {
    CycNum::from_rational(level, Rat::new(n.into(), d.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(level: u32, v: i64) -> CycNum {
        CycNum::from_integer(level, v)
    }

    fn series(level: u32, min_exp: i64, horizon: i64, vals: &[i64]) -> QSeries {
        let coeffs = vals.iter().map(|&v| c(level, v)).collect();
        QSeries::from_window(level, min_exp, horizon, coeffs)
    }

    #[test]
    fn one_plus_t_times_one_minus_t() {
        let a = series(2, 0, 10, &[1, 1, 0, 0, 0, 0, 0, 0, 0, 0]);
        let b = series(2, 0, 10, &[1, -1, 0, 0, 0, 0, 0, 0, 0, 0]);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.horizon(), 10);
        assert_eq!(p.coeff(0).unwrap(), c(2, 1));
        assert_eq!(p.coeff(1).unwrap(), c(2, 0));
        assert_eq!(p.coeff(2).unwrap(), c(2, -1));
        for e in 3..10 {
            assert!(p.coeff(e).unwrap().is_zero());
        }
    }

    #[test]
    fn monomial_products_shift_exponents() {
        let a = QSeries::monomial(3, -3, c(3, 1), 7); // t^-3 known to t^7
        let b = QSeries::monomial(3, 5, c(3, 1), 9); // t^5 known to t^9
        let p = a.mul(&b).unwrap();
        assert_eq!(p.t_order().unwrap(), 2);
        // horizon = min(h_a + m_b, h_b + m_a) = min(7 + 5, 9 - 3) = 6
        assert_eq!(p.horizon(), 6);
    }

    #[test]
    fn geometric_series_inverse() {
        let one_minus_t = series(2, 0, 12, &[1, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
        let inv = one_minus_t.inv().unwrap();
        assert_eq!(inv.horizon(), 12);
        for e in 0..12 {
            assert!(inv.coeff(e).unwrap().is_one(), "coefficient at t^{e}");
        }
        let prod = one_minus_t.mul(&inv).unwrap();
        assert!(prod.eq_up_to(&QSeries::one(2, prod.horizon()), prod.horizon()).unwrap());
    }

    #[test]
    fn inverse_of_monomial() {
        let t2 = QSeries::monomial(2, 2, c(2, 1), 10);
        let inv = t2.inv().unwrap();
        assert_eq!(inv.t_order().unwrap(), -2);
        assert_eq!(inv.horizon(), 10 - 2 * 2);
        assert!(inv.coeff(-2).unwrap().is_one());
    }

    #[test]
    fn inverse_horizon_cost_is_twice_min_exp() {
        let a = series(2, -3, 5, &[2, 0, 1, 0, 0, 0, 0, 0]);
        let inv = a.inv().unwrap();
        assert_eq!(inv.min_exp(), 3);
        assert_eq!(inv.horizon(), 5 - 2 * (-3));
        let prod = a.mul(&inv).unwrap();
        let h = prod.horizon();
        assert!(prod.eq_up_to(&QSeries::one(2, h), h).unwrap());
    }

    #[test]
    fn negative_binomial_power() {
        // (1 - t)^-3 has coefficients C(n+2, 2).
        let a = series(2, 0, 15, &[1, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
        let p = a.pow(-3).unwrap();
        for n in 0..15i64 {
            let expect = (n + 2) * (n + 1) / 2;
            assert_eq!(p.coeff(n).unwrap(), c(2, expect), "coefficient of t^{n}");
        }
    }

    #[test]
    fn square_of_binomial() {
        let a = series(2, 0, 8, &[1, 1, 0, 0, 0, 0, 0, 0]);
        let p = a.pow(2).unwrap();
        assert_eq!(p.coeff(0).unwrap(), c(2, 1));
        assert_eq!(p.coeff(1).unwrap(), c(2, 2));
        assert_eq!(p.coeff(2).unwrap(), c(2, 1));
        assert!(p.coeff(3).unwrap().is_zero());
    }

    #[test]
    fn zeroth_power_is_one() {
        let a = series(2, -2, 6, &[3, 1, 4, 1, 5, 9, 2, 6]);
        let p = a.pow(0).unwrap();
        assert!(p.coeff(0).unwrap().is_one());
        assert_eq!(p.horizon(), 8);
    }

    #[test]
    fn t_order_of_examples() {
        let a = series(2, 2, 9, &[3, 0, 0, 1, 0, 0, 0]);
        assert_eq!(a.t_order().unwrap(), 2);
        let b = QSeries::monomial(5, -7, c(5, 1), 0);
        assert_eq!(b.t_order().unwrap(), -7);
    }

    #[test]
    fn all_zero_series_has_undetermined_order() {
        let z = QSeries::zero(2, 30);
        assert_eq!(
            z.t_order().unwrap_err(),
            SeriesError::OrderUndetermined { horizon: 30 }
        );
        // A window of explicit zeros normalizes to the same state.
        let z2 = series(2, 0, 4, &[0, 0, 0, 0]);
        assert!(z2.is_zero_up_to_horizon());
        assert!(z2.t_order().is_err());
        assert_eq!(z2, QSeries::zero(2, 4));
    }

    #[test]
    fn eq_up_to_respects_horizons() {
        let a = series(2, 0, 5, &[1, 2, 3, 4, 5]);
        let b = series(2, 0, 8, &[1, 2, 3, 4, 5, 6, 7, 8]);
        assert!(a.eq_up_to(&b, 5).unwrap());
        assert_eq!(
            a.eq_up_to(&b, 6).unwrap_err(),
            SeriesError::HorizonTooSmall { needed: 6, have: 5 }
        );
        let c2 = series(2, 0, 5, &[1, 2, 9, 4, 5]);
        assert_eq!(a.first_difference(&c2, 5).unwrap(), Some(2));
    }

    #[test]
    fn zeros_below_min_exp_count_as_known() {
        let a = series(2, 3, 6, &[7, 0, 1]);
        let b = series(2, -2, 6, &[0, 0, 0, 0, 0, 7, 0, 1]);
        assert_eq!(a, b, "leading zeros normalize away");
        assert!(a.eq_up_to(&b, 6).unwrap());
    }

    #[test]
    fn level_mismatch_is_an_error() {
        let a = QSeries::one(2, 5);
        let b = QSeries::one(3, 5);
        assert_eq!(a.mul(&b).unwrap_err(), SeriesError::LevelMismatch(2, 3));
    }

    #[test]
    fn mul_by_known_zero_keeps_combined_horizon() {
        let z = QSeries::zero(2, 10);
        let a = series(2, -2, 6, &[1, 0, 0, 0, 1, 0, 0, 0]);
        let p = z.mul(&a).unwrap();
        assert!(p.is_zero_up_to_horizon());
        // horizon = min(h_z + m_a, h_a + m_z) = min(10 - 2, 6 + 10) = 8
        assert_eq!(p.horizon(), 8);
    }

    #[test]
    fn json_roundtrip_preserves_everything() {
        let a = QSeries::from_terms(
            3,
            6,
            &[
                (-2, CycNum::root_of_unity(3, 1)),
                (0, rat_coeff(3, -7, 3)),
                (4, CycNum::one(3)),
            ],
        );
        let json = a.to_json();
        let back = QSeries::from_json(&json).unwrap();
        assert_eq!(a, back);
        // Dump shape: window length equals horizon - min_exp.
        let dump = a.to_dump();
        assert_eq!(dump.coeffs.len() as i64, dump.horizon - dump.min_exp);
        assert_eq!(dump.coeffs[0].len(), 2); // phi(3) coordinates
    }

    #[test]
    fn display_is_compact() {
        let a = QSeries::from_terms(2, 5, &[(-1, c(2, 2)), (3, c(2, -1))]);
        assert_eq!(a.to_string(), "2*t^-1 + (-1)*t^3 + O(t^5)");
    }

    // --- property tests ------------------------------------------------------

    fn arb_series(level: u32) -> impl Strategy<Value = QSeries> {
        let phi = crate::coeffring::euler_phi(level) as usize;
        (
            -4i64..=4,
            1usize..=7,
            proptest::collection::vec(
                proptest::collection::vec((-9i64..=9, 1i64..=3), phi),
                1..=7,
            ),
        )
            .prop_map(move |(lo, len, raw)| {
                let len = len.min(raw.len());
                let coeffs: Vec<CycNum> = raw
                    .into_iter()
                    .take(len)
                    .map(|cs| {
                        CycNum::new(
                            level,
                            cs.into_iter().map(|(n, d)| Rat::new(n.into(), d.into())).collect(),
                        )
                        .unwrap()
                    })
                    .collect();
                let n = coeffs.len() as i64;
                QSeries::from_window(level, lo, lo + n, coeffs)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn mul_commutes(a in arb_series(3), b in arb_series(3)) {
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        }

        #[test]
        fn mul_associates(a in arb_series(2), b in arb_series(2), d in arb_series(2)) {
            let lhs = a.mul(&b).unwrap().mul(&d).unwrap();
            let rhs = a.mul(&b.mul(&d).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn t_order_is_additive(a in arb_series(4), b in arb_series(4)) {
            let p = a.mul(&b).unwrap();
            match (a.t_order(), b.t_order()) {
                (Ok(oa), Ok(ob)) => {
                    // field coefficients: no zero divisors, so the product
                    // leads exactly at the sum (window is nonempty here).
                    prop_assert_eq!(p.t_order().unwrap(), oa + ob);
                }
                _ => {
                    prop_assert!(p.is_zero_up_to_horizon());
                }
            }
        }

        #[test]
        fn inverse_roundtrips(a in arb_series(3)) {
            if a.leading_coeff().is_ok() {
                let inv = a.inv().unwrap();
                let p = a.mul(&inv).unwrap();
                let h = p.horizon();
                prop_assert!(p.eq_up_to(&QSeries::one(3, h), h).unwrap());
            }
        }

        #[test]
        fn pow_addition_law(a in arb_series(2), e1 in -2i64..=3, e2 in -2i64..=3) {
            if a.leading_coeff().is_ok() {
                let lhs = a.pow(e1 + e2).unwrap();
                let rhs = a.pow(e1).unwrap().mul(&a.pow(e2).unwrap()).unwrap();
                let h = lhs.horizon().min(rhs.horizon());
                if h > lhs.min_exp().min(rhs.min_exp()) {
                    prop_assert!(lhs.eq_up_to(&rhs, h).unwrap());
                }
            }
        }

        #[test]
        fn truncation_only_forgets(a in arb_series(3), k in 0i64..=5) {
            let h = a.horizon() - k;
            let t = a.truncate(h);
            prop_assert!(t.horizon() <= a.horizon());
            for e in t.min_exp().min(a.min_exp())..t.horizon() {
                prop_assert_eq!(t.coeff(e), a.coeff(e));
            }
        }
    }
}
