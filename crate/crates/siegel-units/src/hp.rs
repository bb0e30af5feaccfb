//! Thin deterministic layer over arbitrary-precision binary floating point.
//!
//! All numeric work in this crate funnels through a [`Ctx`], which pins the
//! working precision and the rounding mode.  Identical inputs therefore
//! produce identical bits on every run and platform, which the command-line
//! tools rely on for reproducible reports.

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num::bigint::Sign as IntSign;
use num::{BigInt, BigRational, Zero};
use std::cmp::Ordering;

const RM: RoundingMode = RoundingMode::ToEven;

/// Precision-carrying context for floating-point work.
///
/// Holds the constants cache (`pi` and friends are computed once per context
/// and reused).  Methods that consult the cache take `&mut self`.
pub struct Ctx {
    p: usize,
    cc: Consts,
}

impl Ctx {
    /// A context computing with `prec_bits` bits of mantissa, clamped to
    /// `[64, MAX_PRECISION]`.
    pub fn new(prec_bits: usize) -> Ctx {
        let p = prec_bits.clamp(64, crate::MAX_PRECISION);
        Ctx {
            p,
            cc: Consts::new().expect("constants cache allocation"),
        }
    }

    pub fn prec(&self) -> usize {
        self.p
    }

    /// Relative rounding error of a single arithmetic operation at this
    /// precision.
    pub fn eps(&self) -> f64 {
        // 2^(1-p), floored so the bound never degenerates to an exact claim.
        let e = (1.0f64 - self.p as f64) * std::f64::consts::LN_2;
        e.exp().max(f64::MIN_POSITIVE)
    }

    // --- constructors -----------------------------------------------------

    pub fn zero(&self) -> BigFloat {
        BigFloat::from_i8(0, self.p)
    }

    pub fn one(&self) -> BigFloat {
        BigFloat::from_i8(1, self.p)
    }

    pub fn from_f64(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.p)
    }

    pub fn from_i64(&self, x: i64) -> BigFloat {
        BigFloat::from_i64(x, self.p)
    }

    /// Exact conversion: the integer is carried in full, even beyond the
    /// context precision (subsequent rounded operations bring it back down).
    pub fn from_bigint(&self, x: &BigInt) -> BigFloat {
        let (sign, words) = x.to_u64_digits();
        if words.is_empty() {
            return self.zero();
        }
        let bits = x.bits();
        let s = match sign {
            IntSign::Minus => Sign::Neg,
            _ => Sign::Pos,
        };
        // Value = 0.words * 2^e with the word slice little-endian; passing
        // e = 64 * len and letting normalization shift yields the integer
        // exactly.
        let e = (words.len() as i64 * 64).min(i32::MAX as i64) as i32;
        debug_assert!(bits <= words.len() as u64 * 64);
        BigFloat::from_words(&words, s, e)
    }

    /// `num/den` rounded to context precision plus guard bits.
    pub fn from_ratio(&self, x: &BigRational) -> BigFloat {
        if x.is_zero() {
            return self.zero();
        }
        let n = self.from_bigint(x.numer());
        let d = self.from_bigint(x.denom());
        n.div(&d, self.p + 64, RM)
    }

    // --- arithmetic -------------------------------------------------------

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.p, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.p, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.p, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.p, RM)
    }

    pub fn neg(&self, a: &BigFloat) -> BigFloat {
        a.neg()
    }

    pub fn abs(&self, a: &BigFloat) -> BigFloat {
        if a.is_negative() {
            a.neg()
        } else {
            a.clone()
        }
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.p, RM)
    }

    /// `a^k` for signed `k`.
    pub fn powi(&self, a: &BigFloat, k: i64) -> BigFloat {
        if k >= 0 {
            a.powi(k as usize, self.p, RM)
        } else {
            a.powi(k.unsigned_abs() as usize, self.p, RM)
                .reciprocal(self.p, RM)
        }
    }

    // --- transcendental ---------------------------------------------------

    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.p, RM)
    }

    pub fn two_pi(&mut self) -> BigFloat {
        let pi = self.pi();
        self.add(&pi, &pi)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.p, RM, &mut self.cc)
    }

    pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(self.p, RM, &mut self.cc)
    }

    pub fn sin(&mut self, a: &BigFloat) -> BigFloat {
        a.sin(self.p, RM, &mut self.cc)
    }

    pub fn cos(&mut self, a: &BigFloat) -> BigFloat {
        a.cos(self.p, RM, &mut self.cc)
    }

    pub fn atan(&mut self, a: &BigFloat) -> BigFloat {
        a.atan(self.p, RM, &mut self.cc)
    }

    /// Phase of the point `(x, y)`, in `(-pi, pi]`.
    pub fn atan2(&mut self, y: &BigFloat, x: &BigFloat) -> BigFloat {
        let sx = sign_of(x);
        let sy = sign_of(y);
        if sx == Ordering::Greater {
            let q = self.div(y, x);
            self.atan(&q)
        } else if sx == Ordering::Less {
            let q = self.div(y, x);
            let base = self.atan(&q);
            let pi = self.pi();
            if sy == Ordering::Less {
                self.sub(&base, &pi)
            } else {
                self.add(&base, &pi)
            }
        } else {
            // x == 0
            match sy {
                Ordering::Greater => {
                    let pi = self.pi();
                    self.div(&pi, &self.from_i64(2))
                }
                Ordering::Less => {
                    let pi = self.pi();
                    self.div(&pi, &self.from_i64(-2))
                }
                Ordering::Equal => self.zero(),
            }
        }
    }

    /// Reduce `a` into `(-pi, pi]` by subtracting multiples of `2*pi`.
    pub fn reduce_phase(&mut self, a: &BigFloat) -> BigFloat {
        let two_pi = self.two_pi();
        let pi = self.pi();
        // k = round(a / 2pi) via f64; magnitudes here are modest.
        let approx = to_f64(a) / (2.0 * std::f64::consts::PI);
        let k = approx.round();
        let mut r = if k == 0.0 {
            a.clone()
        } else {
            let kk = self.from_f64(k);
            let shift = self.mul(&kk, &two_pi);
            self.sub(a, &shift)
        };
        // One correction step in case of boundary rounding.
        while self.cmp(&r, &pi) == Ordering::Greater {
            r = self.sub(&r, &two_pi);
        }
        let neg_pi = pi.neg();
        while self.cmp(&r, &neg_pi) != Ordering::Greater {
            r = self.add(&r, &two_pi);
        }
        r
    }

    // --- comparison & output ----------------------------------------------

    /// Total order on finite values; panics on NaN (nothing in this crate
    /// should produce one).
    pub fn cmp(&self, a: &BigFloat, b: &BigFloat) -> Ordering {
        match a.cmp(b) {
            Some(s) if s < 0 => Ordering::Less,
            Some(s) if s > 0 => Ordering::Greater,
            Some(_) => Ordering::Equal,
            None => panic!("NaN in high-precision comparison"),
        }
    }

    /// Deterministic scientific-notation rendering with exactly `sig`
    /// significant decimal digits: `-d.dddd...e[+-]k`.
    pub fn fmt_dec(&mut self, a: &BigFloat, sig: usize) -> String {
        let sig = sig.max(1);
        if a.is_inf_pos() {
            return "inf".into();
        }
        if a.is_inf_neg() {
            return "-inf".into();
        }
        if a.is_nan() {
            return "nan".into();
        }
        if a.is_zero() {
            let frac = "0".repeat(sig - 1);
            return if frac.is_empty() {
                "0e+0".into()
            } else {
                format!("0.{frac}e+0")
            };
        }
        let (s, mut digits, mut e10) = a
            .convert_to_radix(Radix::Dec, RM, &mut self.cc)
            .expect("decimal conversion");
        // Value = 0.digits * 10^e10.  Round to `sig` digits.
        while digits.len() > 1 && digits[0] == 0 {
            digits.remove(0);
            e10 -= 1;
        }
        if digits.len() > sig {
            let round_up = digits[sig] >= 5;
            digits.truncate(sig);
            if round_up {
                let mut i = sig;
                loop {
                    if i == 0 {
                        digits.insert(0, 1);
                        digits.truncate(sig);
                        e10 += 1;
                        break;
                    }
                    i -= 1;
                    if digits[i] == 9 {
                        digits[i] = 0;
                    } else {
                        digits[i] += 1;
                        break;
                    }
                }
            }
        }
        while digits.len() < sig {
            digits.push(0);
        }
        let sign = if s == Sign::Neg { "-" } else { "" };
        let head = digits[0];
        let tail: String = digits[1..].iter().map(|d| (b'0' + d) as char).collect();
        // 0.d1d2... * 10^e10  ==  d1.d2... * 10^(e10-1)
        let exp = e10 as i64 - 1;
        let esign = if exp < 0 { '-' } else { '+' };
        if tail.is_empty() {
            format!("{sign}{head}e{esign}{}", exp.abs())
        } else {
            format!("{sign}{head}.{tail}e{esign}{}", exp.abs())
        }
    }
}

/// Sign of a finite value.
pub fn sign_of(a: &BigFloat) -> Ordering {
    if a.is_zero() {
        Ordering::Equal
    } else if a.is_negative() {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Best-effort `f64` image (used for error bookkeeping and report fields,
/// never inside a certified bound's exact part).  Saturates on overflow.
pub fn to_f64(a: &BigFloat) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    if a.is_inf_pos() {
        return f64::INFINITY;
    }
    if a.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if a.is_nan() {
        return f64::NAN;
    }
    let (words, _n, s, e, _) = a.as_raw_parts().expect("finite value");
    let top = match words.last() {
        Some(&w) => w,
        None => return 0.0,
    };
    // words are little-endian; the top word holds the most significant bits
    // of the mantissa, so value ~= top/2^64 * 2^e.
    let mut x = (top as f64) * 2f64.powi(-64);
    if words.len() >= 2 {
        x += (words[words.len() - 2] as f64) * 2f64.powi(-128);
    }
    let v = x * 2f64.powi(e);
    if s == Sign::Neg {
        -v
    } else {
        v
    }
}

/// Complex number in rectangular coordinates at context precision.
#[derive(Clone, Debug)]
pub struct Cplx {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl Cplx {
    pub fn zero(ctx: &Ctx) -> Cplx {
        Cplx {
            re: ctx.zero(),
            im: ctx.zero(),
        }
    }

    pub fn one(ctx: &Ctx) -> Cplx {
        Cplx {
            re: ctx.one(),
            im: ctx.zero(),
        }
    }

    pub fn add(&self, rhs: &Cplx, ctx: &Ctx) -> Cplx {
        Cplx {
            re: ctx.add(&self.re, &rhs.re),
            im: ctx.add(&self.im, &rhs.im),
        }
    }

    pub fn sub(&self, rhs: &Cplx, ctx: &Ctx) -> Cplx {
        Cplx {
            re: ctx.sub(&self.re, &rhs.re),
            im: ctx.sub(&self.im, &rhs.im),
        }
    }

    pub fn mul(&self, rhs: &Cplx, ctx: &Ctx) -> Cplx {
        let ac = ctx.mul(&self.re, &rhs.re);
        let bd = ctx.mul(&self.im, &rhs.im);
        let ad = ctx.mul(&self.re, &rhs.im);
        let bc = ctx.mul(&self.im, &rhs.re);
        Cplx {
            re: ctx.sub(&ac, &bd),
            im: ctx.add(&ad, &bc),
        }
    }

    pub fn div(&self, rhs: &Cplx, ctx: &Ctx) -> Cplx {
        let d = rhs.abs2(ctx);
        let conj = Cplx {
            re: rhs.re.clone(),
            im: ctx.neg(&rhs.im),
        };
        let num = self.mul(&conj, ctx);
        Cplx {
            re: ctx.div(&num.re, &d),
            im: ctx.div(&num.im, &d),
        }
    }

    pub fn scale(&self, k: &BigFloat, ctx: &Ctx) -> Cplx {
        Cplx {
            re: ctx.mul(&self.re, k),
            im: ctx.mul(&self.im, k),
        }
    }

    pub fn neg(&self, ctx: &Ctx) -> Cplx {
        Cplx {
            re: ctx.neg(&self.re),
            im: ctx.neg(&self.im),
        }
    }

    pub fn abs2(&self, ctx: &Ctx) -> BigFloat {
        let rr = ctx.mul(&self.re, &self.re);
        let ii = ctx.mul(&self.im, &self.im);
        ctx.add(&rr, &ii)
    }

    pub fn abs(&self, ctx: &Ctx) -> BigFloat {
        ctx.sqrt(&self.abs2(ctx))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::FromPrimitive;
    use std::str::FromStr;

    #[test]
    fn bigint_conversion_is_exact() {
        let ctx = Ctx::new(256);
        let big = BigInt::from_str("340282366920938463463374607431768211457").unwrap(); // 2^128 + 1
        let x = ctx.from_bigint(&big);
        let two = ctx.from_i64(2);
        let p128 = ctx.powi(&two, 128);
        let diff = ctx.sub(&x, &p128);
        let one = ctx.one();
        assert_eq!(ctx.cmp(&diff, &one), std::cmp::Ordering::Equal);
    }

    #[test]
    fn ratio_conversion_matches_f64() {
        let ctx = Ctx::new(128);
        let r = BigRational::new(BigInt::from(355), BigInt::from(113));
        let x = ctx.from_ratio(&r);
        assert!((to_f64(&x) - 355.0 / 113.0).abs() < 1e-14);
    }

    #[test]
    fn pi_matches_f64() {
        let mut ctx = Ctx::new(128);
        let pi = ctx.pi();
        assert!((to_f64(&pi) - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn exp_ln_roundtrip() {
        let mut ctx = Ctx::new(192);
        for v in [0.5f64, 1.0, 2.75, 13.0] {
            let x = ctx.from_f64(v);
            let e = ctx.exp(&x);
            let back = ctx.ln(&e);
            let diff = ctx.sub(&back, &x);
            assert!(to_f64(&diff).abs() < 1e-50, "roundtrip failed for {v}");
        }
    }

    #[test]
    fn atan2_matches_f64_in_all_quadrants() {
        let mut ctx = Ctx::new(128);
        for (y, x) in [
            (1.0f64, 2.0),
            (1.0, -2.0),
            (-1.0, -2.0),
            (-1.0, 2.0),
            (1.0, 0.0),
            (-1.0, 0.0),
            (0.0, 2.0),
        ] {
            let yy = ctx.from_f64(y);
            let xx = ctx.from_f64(x);
            let a = ctx.atan2(&yy, &xx);
            assert!(
                (to_f64(&a) - y.atan2(x)).abs() < 1e-14,
                "atan2({y},{x}) mismatch"
            );
        }
    }

    #[test]
    fn reduce_phase_lands_in_principal_range() {
        let mut ctx = Ctx::new(128);
        for v in [0.0f64, 3.0, -3.0, 10.0, -10.0, 100.5, std::f64::consts::TAU] {
            let x = ctx.from_f64(v);
            let r = ctx.reduce_phase(&x);
            let rf = to_f64(&r);
            assert!(rf <= std::f64::consts::PI + 1e-12, "high for {v}: {rf}");
            assert!(rf > -std::f64::consts::PI - 1e-12, "low for {v}: {rf}");
            let mut expect = v.rem_euclid(2.0 * std::f64::consts::PI);
            if expect > std::f64::consts::PI {
                expect -= 2.0 * std::f64::consts::PI;
            }
            let mut d = (rf - expect).abs();
            d = d.min((d - 2.0 * std::f64::consts::PI).abs());
            assert!(d < 1e-9, "phase for {v}: {rf} vs {expect}");
        }
    }

    #[test]
    fn fmt_dec_is_stable_and_exactly_sized() {
        let mut ctx = Ctx::new(256);
        let x = ctx.from_f64(1.5);
        assert_eq!(ctx.fmt_dec(&x, 5), "1.5000e+0");
        let x = ctx.from_f64(0.25);
        assert_eq!(ctx.fmt_dec(&x, 4), "2.500e-1");
        let third = ctx.from_ratio(&BigRational::new(BigInt::from(1), BigInt::from(3)));
        assert_eq!(ctx.fmt_dec(&third, 10), "3.333333333e-1");
        let neg = ctx.from_f64(-1234.5);
        assert_eq!(ctx.fmt_dec(&neg, 6), "-1.23450e+3");
        let z = ctx.zero();
        assert_eq!(ctx.fmt_dec(&z, 3), "0.00e+0");
        // Rounding carry across all-nines.
        let nine = ctx.from_ratio(&BigRational::from_f64(0.9999).unwrap());
        assert_eq!(ctx.fmt_dec(&nine, 3), "1.00e+0");
    }

    #[test]
    fn fmt_dec_deterministic_across_contexts() {
        let mut c1 = Ctx::new(256);
        let mut c2 = Ctx::new(256);
        let a1 = {
            let x = c1.from_i64(7);
            let l = c1.ln(&x);
            c1.fmt_dec(&l, 40)
        };
        let a2 = {
            let x = c2.from_i64(7);
            let l = c2.ln(&x);
            c2.fmt_dec(&l, 40)
        };
        assert_eq!(a1, a2);
        assert!(a1.starts_with("1.945910149"));
    }

    #[test]
    fn to_f64_tracks_magnitude() {
        let mut ctx = Ctx::new(256);
        let x = ctx.from_f64(123.456);
        assert!((to_f64(&x) - 123.456).abs() < 1e-12);
        let big = ctx.from_f64(1e300);
        assert!((to_f64(&big) / 1e300 - 1.0).abs() < 1e-12);
        let e = ctx.from_f64(800.0);
        let huge = ctx.exp(&e); // beyond f64 range
        assert!(to_f64(&huge).is_infinite());
    }

    #[test]
    fn complex_multiplication() {
        let ctx = Ctx::new(128);
        let a = Cplx {
            re: ctx.from_f64(1.0),
            im: ctx.from_f64(2.0),
        };
        let b = Cplx {
            re: ctx.from_f64(3.0),
            im: ctx.from_f64(-1.0),
        };
        let c = a.mul(&b, &ctx);
        assert!((to_f64(&c.re) - 5.0).abs() < 1e-20);
        assert!((to_f64(&c.im) - 5.0).abs() < 1e-20);
        let q = c.div(&b, &ctx);
        assert!((to_f64(&q.re) - 1.0).abs() < 1e-20);
        assert!((to_f64(&q.im) - 2.0).abs() < 1e-20);
    }
}
