//! Exact arithmetic for Siegel units and machine certificates that a
//! distinguished modular unit is a *completely free* (normal-basis) element
//! for the extension of modular function fields C(X(N)) / C(X(1)).
//!
//! The library builds the unit
//!
//! ```text
//!     g = g_{(0,1)/N}^{-12N*l} * g_{(1,0)/N}^{-12N*m},        l > m > 0,
//! ```
//!
//! from 12N-th powers of Siegel functions, expands it as a power series in
//! `t = q^(1/N)` with coefficients in the cyclotomic field Q(zeta_N), lets
//! the Galois group SL_2(Z/N)/{+-1} act on it, and certifies freeness of the
//! Galois orbit two independent ways:
//!
//! * **symbolically** — a strict gap between the `t`-order of the diagonal
//!   and off-diagonal entries of the orbit matrix forces every orbit
//!   determinant to be nonzero ([`freeness::certify_subgroup_symbolic`]);
//! * **numerically** — a rigorous lower bound `1 - (n! - 1) * max_ratio > 0`
//!   on the determinant of the orbit matrix evaluated at `tau = r*i`, with
//!   all floating-point error propagated explicitly
//!   ([`freeness::certify_subgroup_numeric`]).
//!
//! Module map:
//!
//! * [`coeffring`] — the cyclotomic field Q(zeta_N) in the power basis.
//! * [`qseries`] — truncated Laurent series in `t` over Q(zeta_N) with
//!   explicit knowledge horizons.
//! * [`modgroup`] — the finite group SL_2(Z/N)/{+-1}, its subgroups, and its
//!   action on index vectors.
//! * [`siegel`] — q-product expansions of Siegel-unit powers, exact order
//!   formulas, and the order inequality underlying primitivity.
//! * [`hp`] — a thin high-precision floating-point layer (binary splitting
//!   precision, deterministic decimal formatting).
//! * [`numeric`] — log-polar evaluation of units at `tau = r*i`, parameter
//!   search, and the analytic determinant bound.
//! * [`freeness`] — primitivity checks, per-subgroup certificates, and the
//!   complete-freeness sweep report.

pub mod coeffring;
pub mod freeness;
pub mod hp;
pub mod modgroup;
pub mod numeric;
mod par;
pub mod qseries;
pub mod siegel;

pub use coeffring::CycNum;
pub use modgroup::{GroupElement, Subgroup};
pub use qseries::QSeries;
pub use siegel::{GConfig, IndexVector};

/// Default series horizon used by the command-line tools and sweeps: the
/// expansion of any unit in play is known on a window of `40 * N` powers
/// of `t`.
pub fn default_horizon(level: u32) -> i64 {
    40 * level as i64
}

/// Default binary floating-point precision (bits) for numeric certificates.
pub const DEFAULT_PRECISION: usize = 256;

/// Largest supported floating-point precision in bits.  Error bookkeeping
/// stores absolute bounds in `f64`, which stays meaningful up to here.
pub const MAX_PRECISION: usize = 1024;
