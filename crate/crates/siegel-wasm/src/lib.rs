//! Browser bindings for the demo page: thin JSON-string wrappers around the
//! exact expansion, the order table, and the freeness sweep.
//!
//! Every function returns a JSON string — either the same document the CLI
//! would print, or `{"error": "..."}` — so the page never has to deal with
//! thrown exceptions crossing the FFI boundary.  The functions are plain
//! enough to be unit-tested on the native target; the wasm32 build only
//! changes the calling convention.

use wasm_bindgen::prelude::*;

use siegel_units::coeffring::parse_rational;
use siegel_units::freeness::{sweep_complete_freeness, Scope, SweepOptions};
use siegel_units::siegel::{
    bernoulli2_at, g_q_order, order_inequality_report, siegel_power_expansion,
};
use siegel_units::{GConfig, IndexVector};

fn err_json(message: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": message.to_string() }).to_string()
}

fn rat_f64(r: &siegel_units::coeffring::Rat) -> f64 {
    let digits = 1_000_000.0;
    let scaled = (r * siegel_units::coeffring::Rat::from_integer(1_000_000.into())).trunc();
    scaled.to_integer().to_string().parse::<f64>().unwrap_or(f64::NAN) / digits
}

/// Exact expansion of `g_v^(12N)` in `t = q^(1/N)`, as the standard series
/// dump `{level, min_exp, horizon, coeffs}`.
#[wasm_bindgen]
pub fn expand_unit(level: u32, a: i32, b: i32, horizon: i32) -> String {
    if level < 2 {
        return err_json("level must be at least 2");
    }
    if horizon < 1 {
        return err_json("horizon must be at least 1");
    }
    let aa = i64::from(a).rem_euclid(i64::from(level)) as u32;
    let bb = i64::from(b).rem_euclid(i64::from(level)) as u32;
    let v = match IndexVector::new(level, aa, bb) {
        Ok(v) => v,
        Err(e) => return err_json(e),
    };
    match siegel_power_expansion(&v, i64::from(horizon)) {
        Ok(series) => series.to_json(),
        Err(e) => err_json(e),
    }
}

/// Order data for the page: the exact q-order of `g`, the per-coset ratio
/// order table (the Lemma-style inequality with its equality set), and the
/// `B_2(<a/N>)` markers the canvas draws on the parabola arc.
#[wasm_bindgen]
pub fn order_report(level: u32, l: u32, m: u32) -> String {
    let cfg = match GConfig::new(level, l, m) {
        Ok(cfg) => cfg,
        Err(e) => return err_json(e),
    };
    let report = order_inequality_report(&cfg);
    let rows: Vec<serde_json::Value> = report
        .rows
        .iter()
        .map(|row| {
            serde_json::json!({
                "sigma": row.sigma.entries().to_vec(),
                "ratio_t_order": row.ratio_t_order,
                "in_gamma1": row.in_gamma1,
            })
        })
        .collect();
    let markers: Vec<serde_json::Value> = (0..=level)
        .map(|a| {
            let b2 = bernoulli2_at(level, a % level);
            serde_json::json!({
                "a": a,
                "x": f64::from(a) / f64::from(level),
                "b2": rat_f64(&b2),
                "b2_exact": b2.to_string(),
            })
        })
        .collect();
    serde_json::json!({
        "kind": "order-report",
        "N": level,
        "l": l,
        "m": m,
        "q_order": g_q_order(&cfg).to_string(),
        "pass": report.pass(),
        "equality_exactly_on_gamma1": report.equality_exactly_on_gamma1,
        "rows": rows,
        "markers": markers,
    })
    .to_string()
}

/// Freeness sweep over every subgroup of the chosen scope; the same report
/// the CLI `certify` subcommand emits.  `r` is an exact rational like "2"
/// or "5/2"; the series cross-check is kept small so the page stays
/// responsive at large exponents.
#[wasm_bindgen]
pub fn certify_freeness(level: u32, l: u32, m: u32, scope: &str, r: &str) -> String {
    let cfg = match GConfig::new(level, l, m) {
        Ok(cfg) => cfg,
        Err(e) => return err_json(e),
    };
    let scope = match scope {
        "gamma0" => Scope::Gamma0Upper,
        "full" => Scope::Full,
        other => return err_json(format!("unknown scope \"{other}\"")),
    };
    let mut opts = SweepOptions::for_level(level);
    opts.series_check_max_order = if l <= 8 { 4 } else { 0 };
    match parse_rational(r) {
        Some(rr) if rr > siegel_units::coeffring::Rat::from_integer(0.into()) => opts.r = rr,
        _ => return err_json("r must be a positive rational"),
    }
    match sweep_complete_freeness(&cfg, scope, &opts) {
        Ok(report) => serde_json::to_string(&report.to_json_value()).unwrap_or_else(err_json),
        Err(e) => err_json(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_payload_matches_the_library() {
        let text = expand_unit(2, 0, 1, 6);
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["level"], 2);
        assert_eq!(doc["min_exp"], 4);
        assert_eq!(doc["coeffs"][0][0], "16777216/1");
    }

    #[test]
    fn bad_inputs_come_back_as_error_objects() {
        for text in [
            expand_unit(1, 0, 1, 6),
            expand_unit(2, 0, 0, 6),
            expand_unit(2, 0, 1, 0),
            order_report(2, 1, 2),
            certify_freeness(2, 2, 1, "sideways", "2"),
            certify_freeness(2, 2, 1, "gamma0", "-1"),
        ] {
            let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
            assert!(doc.get("error").is_some(), "expected error in {text}");
        }
    }

    #[test]
    fn order_report_carries_the_known_level_2_facts() {
        let doc: serde_json::Value =
            serde_json::from_str(&order_report(2, 2, 1)).unwrap();
        assert_eq!(doc["q_order"], "-3");
        assert_eq!(doc["pass"], true);
        assert_eq!(doc["rows"].as_array().unwrap().len(), 6);
        let markers = doc["markers"].as_array().unwrap();
        assert_eq!(markers.len(), 3);
        assert_eq!(markers[0]["b2_exact"], "1/6");
        assert_eq!(markers[1]["b2_exact"], "-1/12");
        assert!((markers[1]["b2"].as_f64().unwrap() + 1.0 / 12.0).abs() < 1e-6);
    }

    #[test]
    fn gamma0_certification_passes_at_the_reference_exponents() {
        let doc: serde_json::Value =
            serde_json::from_str(&certify_freeness(2, 2, 1, "gamma0", "2")).unwrap();
        assert_eq!(doc["overall"], true);
        assert_eq!(doc["records"].as_array().unwrap().len(), 2);
    }
}
