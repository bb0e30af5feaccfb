//! The cyclotomic field Q(zeta_M) in the power basis.
//!
//! A [`CycNum`] is a rational linear combination of `1, z, ..., z^(phi(M)-1)`
//! where `z = zeta_M = exp(2*pi*i/M)` and arithmetic is performed modulo the
//! M-th cyclotomic polynomial.  Exactness is the point: series coefficients
//! and order computations downstream never touch floating point.

use crate::hp::{Cplx, Ctx};
use num::{BigInt, BigRational, One, Signed, Zero};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

pub type Int = BigInt;
pub type Rat = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoeffError {
    #[error("division by zero in Q(zeta_{0})")]
    DivisionByZero(u32),
    #[error("conductor must be >= 1, got {0}")]
    BadConductor(u32),
    #[error("coordinate vector longer than phi({conductor}) = {phi}")]
    TooManyCoordinates { conductor: u32, phi: usize },
}

/// Euler's totient.
pub fn euler_phi(m: u32) -> u32 {
    let mut n = m;
    let mut result = m;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

// --- integer polynomial helpers (ascending coefficients) -------------------

fn poly_trim(a: &mut Vec<Int>) {
    while a.len() > 1 && a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
}

fn poly_mul_int(a: &[Int], b: &[Int]) -> Vec<Int> {
    let mut out = vec![Int::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    poly_trim(&mut out);
    out
}

/// Exact division of integer polynomials; the divisor must be monic and the
/// remainder must vanish (guaranteed at the call sites by the divisor
/// identity for cyclotomic polynomials).
fn poly_div_exact_int(num: &[Int], den: &[Int]) -> Vec<Int> {
    assert!(den.last().is_some_and(|c| c.is_one()), "monic divisor");
    let mut rem: Vec<Int> = num.to_vec();
    let dd = den.len() - 1;
    if rem.len() <= dd {
        assert!(rem.iter().all(|c| c.is_zero()), "nonzero remainder");
        return vec![Int::zero()];
    }
    let mut quot = vec![Int::zero(); rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        let c = rem[i].clone();
        if c.is_zero() {
            continue;
        }
        quot[i - dd] = c.clone();
        for (j, dj) in den.iter().enumerate() {
            let idx = i - dd + j;
            let sub = &c * dj;
            rem[idx] -= sub;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "nonzero remainder");
    poly_trim(&mut quot);
    quot
}

/// Coefficients of the M-th cyclotomic polynomial, ascending, monic, degree
/// `phi(M)`.  Computed by exact division of `x^M - 1` by the product of all
/// proper-divisor cyclotomic polynomials.
pub fn cyclotomic_polynomial(m: u32) -> Vec<Int> {
    assert!(m >= 1, "conductor must be positive");
    let mut table: HashMap<u32, Vec<Int>> = HashMap::new();
    for d in 1..=m {
        if m % d != 0 {
            continue;
        }
        // x^d - 1
        let mut xd = vec![Int::zero(); d as usize + 1];
        xd[0] = -Int::one();
        xd[d as usize] = Int::one();
        let mut denom = vec![Int::one()];
        for e in 1..d {
            if d % e == 0 {
                denom = poly_mul_int(&denom, &table[&e]);
            }
        }
        let phi_d = poly_div_exact_int(&xd, &denom);
        table.insert(d, phi_d);
    }
    table.remove(&m).unwrap()
}

// --- the field registry ------------------------------------------------------

struct FieldData {
    phi: usize,
    /// Monic modulus, ascending, length phi + 1.
    modulus: Vec<Rat>,
}

fn field(m: u32) -> Arc<FieldData> {
    static REGISTRY: OnceLock<Mutex<HashMap<u32, Arc<FieldData>>>> = OnceLock::new();
    let reg = REGISTRY.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = reg.lock().expect("field registry lock");
    guard
        .entry(m)
        .or_insert_with(|| {
            let ints = cyclotomic_polynomial(m);
            let modulus: Vec<Rat> = ints.into_iter().map(Rat::from_integer).collect();
            Arc::new(FieldData {
                phi: modulus.len() - 1,
                modulus,
            })
        })
        .clone()
}

// --- rational polynomial helpers --------------------------------------------

fn rpoly_deg(a: &[Rat]) -> Option<usize> {
    a.iter().rposition(|c| !c.is_zero())
}

/// Reduce `poly` in place modulo the monic `modulus`, returning exactly
/// `deg(modulus)` coordinates.
fn rpoly_reduce(mut poly: Vec<Rat>, modulus: &[Rat]) -> Vec<Rat> {
    let phi = modulus.len() - 1;
    if poly.len() > phi {
        for i in (phi..poly.len()).rev() {
            if poly[i].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut poly[i], Rat::zero());
            for (j, mj) in modulus.iter().take(phi).enumerate() {
                let sub = &c * mj;
                poly[i - phi + j] -= sub;
            }
        }
    }
    poly.resize(phi, Rat::zero());
    poly
}

/// Quotient and remainder of rational polynomials; divisor nonzero.
fn rpoly_divmod(num: &[Rat], den: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let dd = rpoly_deg(den).expect("nonzero divisor");
    let lead = den[dd].clone();
    let mut rem: Vec<Rat> = num.to_vec();
    let nd = match rpoly_deg(&rem) {
        Some(d) if d >= dd => d,
        _ => return (vec![Rat::zero()], rem),
    };
    let mut quot = vec![Rat::zero(); nd - dd + 1];
    for i in (dd..=nd).rev() {
        if rem[i].is_zero() {
            continue;
        }
        let c = &rem[i] / &lead;
        quot[i - dd] = c.clone();
        for j in 0..=dd {
            let sub = &c * &den[j];
            rem[i - dd + j] -= sub;
        }
    }
    (quot, rem)
}

// --- CycNum -----------------------------------------------------------------

/// An element of Q(zeta_M), stored as `phi(M)` rational coordinates in the
/// power basis.  Values are cheap to clone relative to the series arithmetic
/// built on top of them, and safe to share across threads.
#[derive(Clone, PartialEq, Eq)]
pub struct CycNum {
    conductor: u32,
    coords: Vec<Rat>,
}

impl CycNum {
    /// Element with the given power-basis coordinates (length at most
    /// `phi(M)`; shorter vectors are zero-padded).
    pub fn new(conductor: u32, mut coords: Vec<Rat>) -> Result<CycNum, CoeffError> {
        if conductor == 0 {
            return Err(CoeffError::BadConductor(conductor));
        }
        let f = field(conductor);
        if coords.len() > f.phi {
            return Err(CoeffError::TooManyCoordinates {
                conductor,
                phi: f.phi,
            });
        }
        coords.resize(f.phi, Rat::zero());
        Ok(CycNum { conductor, coords })
    }

    /// Element from an arbitrary-degree polynomial in `zeta_M`, reduced
    /// modulo the cyclotomic polynomial.
    pub fn from_poly(conductor: u32, poly: Vec<Rat>) -> CycNum {
        let f = field(conductor);
        CycNum {
            conductor,
            coords: rpoly_reduce(poly, &f.modulus),
        }
    }

    pub fn zero(conductor: u32) -> CycNum {
        let f = field(conductor);
        CycNum {
            conductor,
            coords: vec![Rat::zero(); f.phi],
        }
    }

    pub fn one(conductor: u32) -> CycNum {
        Self::from_rational(conductor, Rat::one())
    }

    pub fn from_rational(conductor: u32, value: Rat) -> CycNum {
        let f = field(conductor);
        let mut coords = vec![Rat::zero(); f.phi];
        coords[0] = value;
        CycNum { conductor, coords }
    }

    pub fn from_integer(conductor: u32, value: i64) -> CycNum {
        Self::from_rational(conductor, Rat::from_integer(Int::from(value)))
    }

    /// `zeta_M^k` for any integer exponent.
    pub fn root_of_unity(conductor: u32, k: i64) -> CycNum {
        let kk = k.rem_euclid(conductor as i64) as usize;
        let mut poly = vec![Rat::zero(); kk + 1];
        poly[kk] = Rat::one();
        Self::from_poly(conductor, poly)
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(|c| c.is_zero())
    }

    /// The rational value if all higher coordinates vanish.
    pub fn as_rational(&self) -> Option<&Rat> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coords[0])
        } else {
            None
        }
    }

    fn assert_same_field(&self, rhs: &CycNum, op: &str) {
        assert_eq!(
            self.conductor, rhs.conductor,
            "{op} between Q(zeta_{}) and Q(zeta_{}): no implicit coercion",
            self.conductor, rhs.conductor
        );
    }

    pub fn add(&self, rhs: &CycNum) -> CycNum {
        self.assert_same_field(rhs, "addition");
        let coords = self
            .coords
            .iter()
            .zip(&rhs.coords)
            .map(|(a, b)| a + b)
            .collect();
        CycNum {
            conductor: self.conductor,
            coords,
        }
    }

    pub fn sub(&self, rhs: &CycNum) -> CycNum {
        self.assert_same_field(rhs, "subtraction");
        let coords = self
            .coords
            .iter()
            .zip(&rhs.coords)
            .map(|(a, b)| a - b)
            .collect();
        CycNum {
            conductor: self.conductor,
            coords,
        }
    }

    pub fn neg(&self) -> CycNum {
        CycNum {
            conductor: self.conductor,
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, rhs: &CycNum) -> CycNum {
        self.assert_same_field(rhs, "multiplication");
        let f = field(self.conductor);
        if f.phi == 1 {
            return CycNum {
                conductor: self.conductor,
                coords: vec![&self.coords[0] * &rhs.coords[0]],
            };
        }
        let mut prod = vec![Rat::zero(); 2 * f.phi - 1];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coords.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                prod[i + j] += a * b;
            }
        }
        CycNum {
            conductor: self.conductor,
            coords: rpoly_reduce(prod, &f.modulus),
        }
    }

    pub fn scale(&self, k: &Rat) -> CycNum {
        CycNum {
            conductor: self.conductor,
            coords: self.coords.iter().map(|c| c * k).collect(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// the (irreducible) cyclotomic modulus.
    pub fn inv(&self) -> Result<CycNum, CoeffError> {
        if self.is_zero() {
            return Err(CoeffError::DivisionByZero(self.conductor));
        }
        let f = field(self.conductor);
        // r0 = modulus, r1 = self; maintain t with t*self == r (mod modulus).
        let mut r0 = f.modulus.clone();
        let mut r1 = self.coords.clone();
        let mut t0 = vec![Rat::zero()];
        let mut t1 = vec![Rat::one()];
        while let Some(d1) = rpoly_deg(&r1) {
            if d1 == 0 {
                let c = r1[0].clone();
                let inv_coords: Vec<Rat> = t1.iter().map(|t| t / &c).collect();
                return Ok(CycNum {
                    conductor: self.conductor,
                    coords: rpoly_reduce(inv_coords, &f.modulus),
                });
            }
            let (q, rem) = rpoly_divmod(&r0, &r1);
            r0 = std::mem::replace(&mut r1, rem);
            let qt1 = {
                let mut p = vec![Rat::zero(); q.len() + t1.len() - 1];
                for (i, qi) in q.iter().enumerate() {
                    if qi.is_zero() {
                        continue;
                    }
                    for (j, tj) in t1.iter().enumerate() {
                        p[i + j] += qi * tj;
                    }
                }
                p
            };
            let mut next = t0.clone();
            next.resize(next.len().max(qt1.len()), Rat::zero());
            for (i, v) in qt1.iter().enumerate() {
                next[i] -= v;
            }
            t0 = std::mem::replace(&mut t1, next);
        }
        // r1 reached zero before a constant: impossible for irreducible modulus.
        unreachable!("cyclotomic modulus is irreducible");
    }

    /// Integer power, negative exponents through the inverse.
    pub fn pow(&self, e: i64) -> Result<CycNum, CoeffError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = CycNum::one(self.conductor);
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&sq);
            }
            k >>= 1;
            if k > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }

    /// Render the coordinates as `p/q` strings (always with an explicit
    /// denominator), the wire format used by the series serializer.
    pub fn to_strings(&self) -> Vec<String> {
        self.coords
            .iter()
            .map(|c| format!("{}/{}", c.numer(), c.denom()))
            .collect()
    }

    /// Parse coordinates produced by [`CycNum::to_strings`]; bare integers
    /// are accepted as well.
    pub fn from_strings(conductor: u32, raw: &[String]) -> Result<CycNum, String> {
        let mut coords = Vec::with_capacity(raw.len());
        for s in raw {
            let r = parse_rational(s).ok_or_else(|| format!("bad rational {s:?}"))?;
            coords.push(r);
        }
        CycNum::new(conductor, coords).map_err(|e| e.to_string())
    }
}

/// Parse `p/q` or a bare integer into a rational.
pub fn parse_rational(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let numer: Int = n.trim().parse().ok()?;
        let denom: Int = d.trim().parse().ok()?;
        if denom.is_zero() {
            return None;
        }
        Some(Rat::new(numer, denom))
    } else {
        let numer: Int = s.parse().ok()?;
        Some(Rat::from_integer(numer))
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNum(zeta_{}: {})", self.conductor, self)
    }
}

impl fmt::Display for CycNum {
    /// Polynomial in `z = zeta_M`, ascending powers, zero terms skipped.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if wrote {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                if mag.denom().is_one() {
                    write!(f, "{}", mag.numer())?;
                } else {
                    write!(f, "{}", mag)?;
                }
                if i > 0 {
                    write!(f, "*")?;
                }
            }
            if i == 1 {
                write!(f, "z")?;
            } else if i > 1 {
                write!(f, "z^{i}")?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Complex image of `a` under `zeta_M -> exp(2*pi*i/M)`, together with an
/// absolute error bound on each component.
pub fn embed_complex(a: &CycNum, ctx: &mut Ctx) -> (Cplx, f64) {
    let m = a.conductor();
    let two_pi = ctx.two_pi();
    let m_f = ctx.from_i64(m as i64);
    let theta = ctx.div(&two_pi, &m_f);
    let zeta = Cplx {
        re: ctx.cos(&theta),
        im: ctx.sin(&theta),
    };
    // Horner from the top coordinate down.
    let mut acc = Cplx::zero(ctx);
    let mut scale_sum = 0.0f64;
    for c in a.coords().iter().rev() {
        acc = acc.mul(&zeta, ctx);
        let cf = ctx.from_ratio(c);
        acc.re = ctx.add(&acc.re, &cf);
        scale_sum += rat_to_f64_abs(c);
    }
    // |zeta| = 1, so the accumulated magnitude is at most the coordinate
    // l1-norm; each Horner step costs a bounded number of rounded ops.
    let ops = 8.0 * (a.coords().len() as f64 + 1.0);
    let err = (scale_sum.max(1.0)) * ops * ctx.eps();
    (acc, err.max(f64::MIN_POSITIVE))
}

fn rat_to_f64_abs(r: &Rat) -> f64 {
    use num::ToPrimitive;
    match r.to_f64() {
        Some(v) if v.is_finite() => v.abs(),
        _ => f64::MAX,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hp::to_f64;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(Int::from(n), Int::from(d))
    }

    #[test]
    fn cyclotomic_polynomials_match_known_tables() {
        let known: &[(u32, &[i64])] = &[
            (1, &[-1, 1]),
            (2, &[1, 1]),
            (3, &[1, 1, 1]),
            (4, &[1, 0, 1]),
            (5, &[1, 1, 1, 1, 1]),
            (6, &[1, -1, 1]),
            (8, &[1, 0, 0, 0, 1]),
            (9, &[1, 0, 0, 1, 0, 0, 1]),
            (12, &[1, 0, -1, 0, 1]),
        ];
        for (m, coeffs) in known {
            let got = cyclotomic_polynomial(*m);
            let want: Vec<Int> = coeffs.iter().map(|&c| Int::from(c)).collect();
            assert_eq!(got, want, "Phi_{m}");
        }
    }

    #[test]
    fn cyclotomic_product_identity() {
        // prod_{d | M} Phi_d = x^M - 1 for every M up to 30.
        for m in 1u32..=30 {
            let mut prod = vec![Int::one()];
            for d in 1..=m {
                if m % d == 0 {
                    prod = poly_mul_int(&prod, &cyclotomic_polynomial(d));
                }
            }
            let mut expect = vec![Int::zero(); m as usize + 1];
            expect[0] = -Int::one();
            expect[m as usize] = Int::one();
            assert_eq!(prod, expect, "divisor identity at M={m}");
        }
    }

    #[test]
    fn cyclotomic_degree_is_phi() {
        for m in 1u32..=40 {
            assert_eq!(
                cyclotomic_polynomial(m).len() as u32 - 1,
                euler_phi(m),
                "deg Phi_{m}"
            );
        }
    }

    #[test]
    fn roots_of_unity_have_exact_order() {
        for m in 2u32..=10 {
            for k in 1..m {
                let z = CycNum::root_of_unity(m, k as i64);
                let order = m / gcd(m, k);
                let mut acc = CycNum::one(m);
                for step in 1..=order {
                    acc = acc.mul(&z);
                    if step < order {
                        assert!(!acc.is_one(), "zeta_{m}^{k} order below {order}");
                    }
                }
                assert!(acc.is_one(), "zeta_{m}^{k} to the {order} not 1");
            }
        }
    }

    fn gcd(a: u32, b: u32) -> u32 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn one_plus_zeta3_times_one_plus_zeta3_squared_is_one() {
        let one = CycNum::one(3);
        let z = CycNum::root_of_unity(3, 1);
        let z2 = CycNum::root_of_unity(3, 2);
        let prod = one.add(&z).mul(&one.add(&z2));
        assert!(prod.is_one());
    }

    #[test]
    fn one_minus_zeta2_to_the_24_is_2_to_the_24() {
        let x = CycNum::one(2).sub(&CycNum::root_of_unity(2, 1)); // 1 - (-1) = 2
        let p = x.pow(24).unwrap();
        assert_eq!(p.as_rational().unwrap(), &rat(16777216, 1));
    }

    #[test]
    fn rational_inverse_in_any_conductor() {
        for m in [1u32, 2, 3, 4, 5, 12] {
            let two = CycNum::from_integer(m, 2);
            let inv = two.inv().unwrap();
            assert_eq!(inv.as_rational().unwrap(), &rat(1, 2), "1/2 in zeta_{m}");
        }
    }

    #[test]
    fn zero_has_no_inverse() {
        assert_eq!(
            CycNum::zero(5).inv().unwrap_err(),
            CoeffError::DivisionByZero(5)
        );
    }

    #[test]
    #[should_panic(expected = "no implicit coercion")]
    fn mixed_conductor_arithmetic_is_refused() {
        let a = CycNum::one(3);
        let b = CycNum::one(4);
        let _ = a.mul(&b);
    }

    #[test]
    fn embedding_matches_f64_oracle() {
        let mut ctx = Ctx::new(128);
        // 1 - zeta_3 = 3/2 - sqrt(3)/2 * i
        let x = CycNum::one(3).sub(&CycNum::root_of_unity(3, 1));
        let (v, err) = embed_complex(&x, &mut ctx);
        assert!(err < 1e-20);
        assert!((to_f64(&v.re) - 1.5).abs() < 1e-12);
        assert!((to_f64(&v.im) + 0.8660254037844386).abs() < 1e-12);

        // zeta_4 = i
        let i4 = CycNum::root_of_unity(4, 1);
        let (v, _) = embed_complex(&i4, &mut ctx);
        assert!(to_f64(&v.re).abs() < 1e-12);
        assert!((to_f64(&v.im) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn embedding_is_multiplicative() {
        let mut ctx = Ctx::new(192);
        let a = CycNum::from_poly(5, vec![rat(1, 2), rat(-2, 3), rat(0, 1), rat(5, 7)]);
        let b = CycNum::from_poly(5, vec![rat(3, 1), rat(1, 5), rat(-1, 2)]);
        let (va, ea) = embed_complex(&a, &mut ctx);
        let (vb, eb) = embed_complex(&b, &mut ctx);
        let (vab, eab) = embed_complex(&a.mul(&b), &mut ctx);
        let prod = va.mul(&vb, &ctx);
        let dre = (to_f64(&prod.re) - to_f64(&vab.re)).abs();
        let dim = (to_f64(&prod.im) - to_f64(&vab.im)).abs();
        let tol = (ea + eb + eab) * 10.0 + 1e-30;
        assert!(dre < tol && dim < tol, "dre={dre} dim={dim}");
    }

    #[test]
    fn display_formats_are_readable() {
        let x = CycNum::from_poly(
            12,
            vec![rat(-1, 1), rat(1, 2), rat(0, 1), rat(-3, 1)],
        );
        assert_eq!(x.to_string(), "-1 + 1/2*z - 3*z^3");
        assert_eq!(CycNum::zero(7).to_string(), "0");
        assert_eq!(CycNum::root_of_unity(8, 1).to_string(), "z");
    }

    #[test]
    fn string_roundtrip() {
        let x = CycNum::from_poly(6, vec![rat(22, 7), rat(-5, 3)]);
        let s = x.to_strings();
        assert_eq!(s, vec!["22/7".to_string(), "-5/3".to_string()]);
        let back = CycNum::from_strings(6, &s).unwrap();
        assert_eq!(back, x);
    }

    // --- property tests ----------------------------------------------------

    fn cyc_from(m: u32, raw: &[(i64, i64)]) -> CycNum {
        let phi = euler_phi(m) as usize;
        let cs: Vec<Rat> = raw.iter().take(phi).map(|&(n, d)| rat(n, d)).collect();
        CycNum::new(m, cs).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_laws_hold(m in prop_oneof![Just(2u32), Just(3), Just(4), Just(5), Just(6)],
                          ra in proptest::collection::vec((-20i64..=20, 1i64..=6), 8),
                          rb in proptest::collection::vec((-20i64..=20, 1i64..=6), 8),
                          rc in proptest::collection::vec((-20i64..=20, 1i64..=6), 8)) {
            let a = cyc_from(m, &ra);
            let b = cyc_from(m, &rb);
            let c = cyc_from(m, &rc);
            // commutativity, associativity, distributivity
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        }

        #[test]
        fn inverse_law_holds(m in prop_oneof![Just(2u32), Just(3), Just(4), Just(5), Just(8)],
                             coords in proptest::collection::vec((-9i64..=9, 1i64..=4), 0..6)) {
            let phi = euler_phi(m) as usize;
            let cs: Vec<Rat> = coords.into_iter().take(phi).map(|(n, d)| rat(n, d)).collect();
            let a = CycNum::new(m, cs).unwrap();
            if !a.is_zero() {
                let ai = a.inv().unwrap();
                prop_assert!(a.mul(&ai).is_one());
            }
        }

        #[test]
        fn pow_addition_law(e1 in -6i64..=6, e2 in -6i64..=6) {
            let a = CycNum::from_poly(5, vec![rat(1, 1), rat(1, 2)]);
            let lhs = a.pow(e1 + e2).unwrap();
            let rhs = a.pow(e1).unwrap().mul(&a.pow(e2).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
