//! Acceptance gate: one test per criterion, exhaustive at desk scale.
//!
//! Each criterion is a single test function so the harness prints exactly
//! one pass/fail line per criterion.  Exact statements carry zero
//! tolerance; numeric statements must pass with margin beyond their
//! propagated error bounds at 256-bit working precision.

use siegel_units::coeffring::Rat;
use siegel_units::freeness::{
    certify_subgroup_numeric, check_primitivity, sweep_complete_freeness, CertMethod, DistinctBy,
    Scope, SweepOptions,
};
use siegel_units::modgroup::{enumerate_group, enumerate_subgroups, Family};
use siegel_units::numeric::{cross_check_unit, find_parameters};
use siegel_units::siegel::{
    bernoulli2, canonical_vectors, expansion_from_rep, frac_part, g_expansion, g_t_order,
    order_inequality_report, siegel_power_expansion, siegel_power_t_order,
};
use siegel_units::{default_horizon, GConfig};

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

/// `ord_t g_v^(12N) = 6 N^2 B_2(<a/N>)` exactly, for every index vector at
/// every level through 6, with the product expansion confirming both the
/// exponent and a nonzero leading coefficient.
#[test]
fn criterion_1_order_formula_exact_for_levels_2_through_6() {
    for level in 2u32..=6 {
        let n = i64::from(level);
        for v in canonical_vectors(level) {
            let x = frac_part(&rat(i64::from(v.a()), n));
            let closed_form = rat(6 * n * n, 1) * bernoulli2(&x);
            let formula = siegel_power_t_order(&v);
            assert_eq!(
                closed_form,
                rat(formula, 1),
                "closed form disagrees with integer order at N={level}, v=({}, {})",
                v.a(),
                v.b()
            );
            let series = siegel_power_expansion(&v, formula.max(0) + 6).expect("expansion");
            assert_eq!(
                series.t_order().expect("leading term inside window"),
                formula,
                "expansion order mismatch at N={level}, v=({}, {})",
                v.a(),
                v.b()
            );
        }
    }
}

/// The 12N-th power depends only on `±v (mod Z^2)` — checked on raw
/// representatives, not on canonical ones, so the identity is a theorem and
/// not a normalization.  The index-level cocycle holds exhaustively.
#[test]
fn criterion_2_sign_symmetry_and_action_cocycle() {
    for level in 2u32..=4 {
        let n = i64::from(level);
        for a in 0..level {
            for b in 0..level {
                if a == 0 && b == 0 {
                    continue;
                }
                let t_ord = 6 * i64::from(a) * i64::from(a) - 6 * i64::from(a) * n + n * n;
                let horizon = t_ord.max(0) + 8;
                let plus = expansion_from_rep(level, a, b, horizon).expect("expansion");
                let minus =
                    expansion_from_rep(level, (level - a) % level, (level - b) % level, horizon)
                        .expect("expansion");
                assert_eq!(plus, minus, "expansion(v) != expansion(-v) at N={level}, ({a},{b})");
            }
        }

        let group = enumerate_group(level);
        for sigma in &group {
            for rho in &group {
                let composed = sigma.multiply(rho);
                for v in canonical_vectors(level) {
                    assert_eq!(
                        rho.act_on_index(&sigma.act_on_index(&v)),
                        composed.act_on_index(&v),
                        "cocycle failure at N={level}"
                    );
                }
            }
        }
    }
}

/// `ord(g^sigma) >= ord(g)` over every coset, with equality exactly on the
/// image of ±Gamma_1(N), for three exponent pairs at each level through 6.
#[test]
fn criterion_3_order_inequality_exhaustive() {
    for level in 2u32..=6 {
        for (l, m) in [(2, 1), (3, 1), (5, 2)] {
            let cfg = GConfig::new(level, l, m).expect("valid exponents");
            let report = order_inequality_report(&cfg);
            assert!(
                report.all_nonnegative,
                "negative ratio order at N={level}, l={l}, m={m}"
            );
            assert!(
                report.equality_exactly_on_gamma1,
                "equality set differs from the unitriangular classes at N={level}, l={l}, m={m}"
            );
            for row in &report.rows {
                assert_eq!(row.in_gamma1, Family::Gamma1.contains(&row.sigma));
                assert_eq!(row.ratio_t_order == 0, row.in_gamma1);
            }
        }
    }
}

/// Every non-identity Galois conjugate of `g` differs from `g`, each with
/// an explicit order-gap or differing-coefficient witness at the default
/// horizon — no coset may stay unresolved.
#[test]
fn criterion_4_primitivity_with_explicit_witnesses() {
    for level in [2u32, 3, 4, 5] {
        let cfg = GConfig::new(level, 2, 1).expect("valid exponents");
        let report = check_primitivity(&cfg, default_horizon(level)).expect("primitivity check");
        assert!(report.all_distinct, "conjugate collision at N={level}");
        assert_eq!(
            report.witnesses.len(),
            report.group_order - 1,
            "one witness per non-identity coset at N={level}"
        );
        for witness in &report.witnesses {
            match witness.status {
                DistinctBy::OrderGap(k) => assert_ne!(k, 0),
                DistinctBy::SeriesCoefficient(_) => {}
                DistinctBy::Unresolved => {
                    panic!("unresolved coset at N={level}: {:?}", witness.sigma)
                }
            }
        }
    }
}

/// Complete freeness over the upper-triangular scope: every subgroup of the
/// Gamma^0(N)-quotient certifies symbolically with strictly positive order
/// gaps, and every subgroup of order <= 6 additionally has its literal
/// series determinant at t-order exactly k * ord(g).
#[test]
fn criterion_5_gamma0_symbolic_sweep_with_series_determinants() {
    for level in 2u32..=4 {
        let cfg = GConfig::new(level, 2, 1).expect("valid exponents");
        let mut opts = SweepOptions::for_level(level);
        opts.series_check_max_order = 6;
        let report =
            sweep_complete_freeness(&cfg, Scope::Gamma0Upper, &opts).expect("sweep");
        assert!(report.overall, "sweep failed at N={level}");

        // Degenerate order-1 case of the determinant law: det(A) = g itself.
        let g = g_expansion(&cfg, g_t_order(&cfg).max(0) + 4).expect("expansion");
        assert_eq!(g.t_order().expect("order"), g_t_order(&cfg));

        for record in &report.records {
            assert_eq!(record.method, CertMethod::Symbolic);
            let cert = record.symbolic.as_ref().expect("symbolic certificate");
            assert!(cert.pass);
            for (sigma, gap) in &cert.gaps {
                assert!(
                    *gap > 0,
                    "non-positive gap {gap} at N={level} for {sigma:?}"
                );
            }
            assert_eq!(
                cert.det_t_order,
                record.order as i64 * g_t_order(&cfg),
                "determinant order law at N={level}, |H|={}",
                record.order
            );
            if record.order > 1 {
                assert!(record.order <= 6, "gamma0 scope stays within order 6");
                let check = cert.series_check.as_ref().expect("series determinant ran");
                assert!(check.agrees, "series determinant order mismatch at N={level}");
                assert_eq!(check.det_t_order, Some(cert.det_t_order));
            }
        }
    }
}

/// End-to-end numeric freeness: the parameter search certifies every coset
/// ratio below 1/(d!-1) with margin beyond its error bound, and every
/// subgroup of the full quotient then receives a passing determinant
/// certificate whose analytic lower bound 1 - (n!-1) * max_ratio stays
/// strictly positive, all at 256-bit precision.
#[test]
fn criterion_6_full_numeric_certification_at_levels_2_and_3() {
    for (level, budget, expected_d) in [(2u32, 40usize, 6usize), (3, 160, 12)] {
        let outcome = find_parameters(level, None, budget, 256).expect("search certifies");
        assert!(outcome.certified);
        assert_eq!(outcome.params.d, expected_d);
        assert_eq!(outcome.params.d, enumerate_group(level).len());
        assert!(
            outcome.max_ratio_log + outcome.max_ratio_err < outcome.ln_epsilon,
            "certified margin must exceed the propagated error at N={level}"
        );

        let cfg =
            GConfig::new(level, outcome.params.l, outcome.params.m).expect("searched exponents");
        let subgroups =
            enumerate_subgroups(level, &enumerate_group(level)).expect("lattice");
        for subgroup in &subgroups {
            let numeric = certify_subgroup_numeric(&cfg, subgroup, &outcome.params.r, 256)
                .expect("numeric certificate");
            let cert = &numeric.certificate;
            assert!(
                cert.pass,
                "subgroup of order {} failed at N={level}",
                subgroup.order()
            );
            assert!(cert.lower_bound > 0.0, "analytic bound at N={level}");
            assert!(
                cert.det_mag_f64 > cert.det_err_abs,
                "determinant magnitude must clear its error bound at N={level}"
            );
        }
    }
}

/// The two independent evaluations of `g_v^(12N)(ri)` — the q-product and
/// the embedded truncated series — agree within their combined error
/// bounds for every index vector, both evaluation points, levels 2..4.
#[test]
fn criterion_7_product_versus_series_cross_oracle() {
    for level in 2u32..=4 {
        for r_int in [1i64, 2] {
            let r = rat(r_int, 1);
            for v in canonical_vectors(level) {
                let check = cross_check_unit(&v, &r, default_horizon(level), 256)
                    .expect("cross check");
                assert!(
                    check.ok,
                    "N={level}, r={r_int}, v=({},{}) distance {:.3e} exceeds tolerance {:.3e}",
                    v.a(),
                    v.b(),
                    check.distance,
                    check.tolerance
                );
            }
        }
    }
}
