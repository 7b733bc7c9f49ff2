//! The five subcommands. Each renders its whole report into a string so the
//! caller decides where it goes; timings and progress go to a separate
//! diagnostics list so the report bytes never depend on the machine.

use std::time::Instant;

use hypercubic_core::asymptotics::{
    exact_count, leading_constant, zeta3_self_check, CountMethod, LeadingConstant,
};
use hypercubic_core::forms::SurfaceSpec;
use hypercubic_core::oracle::{counts_up_to, HeightBound};
use hypercubic_core::exactarith::primes_up_to;
use hypercubic_core::tamagawa::{
    convergence_factor_product, euler_product, gamma_l, omega_infinity_closed,
    omega_infinity_quadrature, omega_p, one_minus_inverse_cube, peyre_consistency,
    tamagawa_fiber, ALPHA_L, BETA_L, DELTA_L,
};
use hypercubic_core::verify::{run_suite, Suite, VerifyParams};
use serde_json::Value;

use crate::args::{brute_cap, Command, Format, RunConfig, DEFAULT_RADIUS, DEFAULT_TAMAGAWA_RADIUS};
use crate::output::{csv_line, g12, json_line, object};
use crate::CliError;

/// A rendered report plus an optional consistency failure (exit status 1).
#[derive(Debug, Default)]
pub struct Outcome {
    pub report: String,
    pub diagnostics: Vec<String>,
    pub failure: Option<String>,
}

pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    match config.command {
        Command::Count => cmd_count(config),
        Command::Constant => cmd_constant(config),
        Command::Converge => cmd_converge(config),
        Command::Tamagawa => cmd_tamagawa(config),
        Command::Verify => cmd_verify(config),
    }
}

fn spec(config: &RunConfig) -> &SurfaceSpec {
    config.surface.as_ref().expect("validated: surface present")
}

fn a_field(spec: &SurfaceSpec) -> String {
    spec.cayley_parameter().map(|a| a.to_string()).unwrap_or_default()
}

/// Leading keys shared by every per-surface JSON object.
fn surface_keys(spec: &SurfaceSpec) -> Vec<(&'static str, Value)> {
    let mut keys = vec![("surface", Value::from(spec.label()))];
    if let Some(a) = spec.cayley_parameter() {
        keys.push(("a", a.into()));
    }
    keys
}

fn with_surface(spec: &SurfaceSpec, rest: Vec<(&'static str, Value)>) -> Value {
    let mut map = serde_json::Map::new();
    for (k, v) in surface_keys(spec).into_iter().chain(rest) {
        map.insert(k.to_string(), v);
    }
    Value::Object(map)
}

fn check_brute_cap(spec: &SurfaceSpec, bounds: &[HeightBound], force: bool) -> Result<(), CliError> {
    let cap = brute_cap(spec);
    match bounds.iter().map(|b| b.b()).max() {
        Some(b) if b > cap && !force => Err(CliError::Usage(format!(
            "brute-force counting on {} is capped at B = {cap} (got {b}); pass --force to run anyway",
            spec.label()
        ))),
        _ => Ok(()),
    }
}

/// Counts for every bound; brute force enumerates once at the largest bound.
fn counts(spec: &SurfaceSpec, bounds: &[HeightBound], method: CountMethod) -> Result<Vec<u64>, CliError> {
    match method {
        CountMethod::Fiber => bounds
            .iter()
            .map(|&b| exact_count(spec, b, method).map_err(CliError::from))
            .collect(),
        CountMethod::Brute => {
            let max = *bounds.last().expect("validated: bounds nonempty");
            let all = counts_up_to(spec, max)?;
            Ok(bounds.iter().map(|b| all[(b.b() - 1) as usize]).collect())
        }
    }
}

fn cmd_count(config: &RunConfig) -> Result<Outcome, CliError> {
    let spec = spec(config);
    let other = match config.method {
        CountMethod::Fiber => CountMethod::Brute,
        CountMethod::Brute => CountMethod::Fiber,
    };
    if config.method == CountMethod::Brute || config.check {
        check_brute_cap(spec, &config.bounds, config.force)?;
    }
    let values = counts(spec, &config.bounds, config.method)?;
    let mut failure = None;
    let checked = if config.check {
        let cross = counts(spec, &config.bounds, other)?;
        for ((b, x), y) in config.bounds.iter().zip(&values).zip(&cross) {
            if x != y && failure.is_none() {
                failure = Some(format!(
                    "{spec}, B = {}: {} count {x}, {} count {y}",
                    b.b(),
                    config.method.label(),
                    other.label()
                ));
            }
        }
        Some(cross)
    } else {
        None
    };

    let report = match config.format {
        Format::Json => {
            let rows: Vec<Value> = config
                .bounds
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    let mut rest = vec![
                        ("B", b.b().into()),
                        ("method", config.method.label().into()),
                        ("count", values[i].into()),
                    ];
                    if let Some(c) = &checked {
                        rest.push(("check", other.label().into()));
                        rest.push(("check_count", c[i].into()));
                    }
                    with_surface(spec, rest)
                })
                .collect();
            match rows.len() {
                1 => json_line(&rows[0]),
                _ => json_line(&Value::Array(rows)),
            }
        }
        Format::Csv => {
            let mut header = vec!["surface", "a", "B", "method", "count"];
            if checked.is_some() {
                header.push("check_count");
            }
            let mut s = csv_line(&header.iter().map(|h| h.to_string()).collect::<Vec<_>>());
            for (i, b) in config.bounds.iter().enumerate() {
                let mut row = vec![
                    spec.label().to_string(),
                    a_field(spec),
                    b.b().to_string(),
                    config.method.label().to_string(),
                    values[i].to_string(),
                ];
                if let Some(c) = &checked {
                    row.push(c[i].to_string());
                }
                s.push_str(&csv_line(&row));
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for (i, b) in config.bounds.iter().enumerate() {
                s.push_str(&format!("{spec} B={} method={} count={}", b.b(), config.method.label(), values[i]));
                if let Some(c) = &checked {
                    s.push_str(&format!(" {}={}", other.label(), c[i]));
                }
                s.push('\n');
            }
            s
        }
    };
    Ok(Outcome {
        report,
        diagnostics: Vec::new(),
        failure,
    })
}

/// `R, R/2, R/4, ...` down to 1, in increasing order, at most `rows` entries.
fn halvings(radius: i64, rows: usize) -> Vec<i64> {
    let mut out = Vec::new();
    let mut r = radius;
    while r >= 1 && out.len() < rows {
        out.push(r);
        r /= 2;
    }
    out.reverse();
    out
}

fn cmd_constant(config: &RunConfig) -> Result<Outcome, CliError> {
    let spec = spec(config);
    let radius = config.radius.unwrap_or(DEFAULT_RADIUS);
    let (constant, k) = leading_constant(spec, radius)?;
    let table: Vec<(i64, LeadingConstant)> = halvings(radius, 8)
        .into_iter()
        .map(|r| Ok((r, leading_constant(spec, r)?.0)))
        .collect::<Result<_, CliError>>()?;
    let (zeta3, zeta3_check) = zeta3_self_check();
    let zeta3_dev = (zeta3 - zeta3_check).abs();
    let s = &constant.series;

    let report = match config.format {
        Format::Json => {
            let rows: Vec<Value> = table
                .iter()
                .map(|(r, c)| {
                    object([
                        ("radius", (*r).into()),
                        ("terms", c.series.terms_used.into()),
                        ("partial_sum", c.series.partial_sum.into()),
                        ("tail_bound", c.series.tail_bound.into()),
                        ("constant", c.value.into()),
                        ("uncertainty", c.uncertainty.into()),
                    ])
                })
                .collect();
            json_line(&with_surface(
                spec,
                vec![
                    ("radius", radius.into()),
                    ("k", k.into()),
                    ("terms", s.terms_used.into()),
                    ("partial_sum", s.partial_sum.into()),
                    ("tail_bound", s.tail_bound.into()),
                    ("constant", constant.value.into()),
                    ("uncertainty", constant.uncertainty.into()),
                    ("zeta3", zeta3.into()),
                    ("zeta3_self_check", zeta3_dev.into()),
                    ("halvings", Value::Array(rows)),
                ],
            ))
        }
        Format::Csv => {
            let mut out = csv_line(
                &["surface", "a", "radius", "terms", "partial_sum", "tail_bound", "constant", "uncertainty"]
                    .map(String::from),
            );
            for (r, c) in &table {
                out.push_str(&csv_line(&[
                    spec.label().to_string(),
                    a_field(spec),
                    r.to_string(),
                    c.series.terms_used.to_string(),
                    g12(c.series.partial_sum),
                    g12(c.series.tail_bound),
                    g12(c.value),
                    g12(c.uncertainty),
                ]));
            }
            out
        }
        Format::Text => {
            let mut out = format!("surface: {spec}\n");
            out.push_str(&format!("exponent: N(B) ~ C B^{k}\n"));
            out.push_str(&format!("radius: {radius} ({} series terms)\n", s.terms_used));
            out.push_str(&format!("series partial sum: {}\n", g12(s.partial_sum)));
            out.push_str(&format!("series tail bound: {}\n", g12(s.tail_bound)));
            out.push_str(&format!(
                "constant: {} +- {}\n",
                g12(constant.value),
                g12(constant.uncertainty)
            ));
            out.push_str(&format!(
                "zeta(3): {} (self-check deviation {})\n",
                g12(zeta3),
                g12(zeta3_dev)
            ));
            out.push_str("radius\tpartial_sum\ttail_bound\tconstant\n");
            for (r, c) in &table {
                out.push_str(&format!(
                    "{r}\t{}\t{}\t{}\n",
                    g12(c.series.partial_sum),
                    g12(c.series.tail_bound),
                    g12(c.value)
                ));
            }
            out
        }
    };
    Ok(Outcome {
        report,
        ..Outcome::default()
    })
}

fn cmd_converge(config: &RunConfig) -> Result<Outcome, CliError> {
    let spec = spec(config);
    let radius = config.radius.unwrap_or(DEFAULT_RADIUS);
    if config.method == CountMethod::Brute {
        check_brute_cap(spec, &config.bounds, config.force)?;
    }
    let (constant, k) = leading_constant(spec, radius)?;
    let values = counts(spec, &config.bounds, config.method)?;
    let rows: Vec<(i64, u64, f64, f64)> = config
        .bounds
        .iter()
        .zip(values)
        .map(|(b, n)| {
            let predicted = constant.value * (b.b() as f64).powi(k);
            (b.b(), n, predicted, (n as f64 - predicted).abs() / predicted)
        })
        .collect();

    let report = match config.format {
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|&(b, n, p, e)| {
                    let a = spec.cayley_parameter().map(Value::from).unwrap_or(Value::Null);
                    object([
                        ("surface", spec.label().into()),
                        ("a", a),
                        ("B", b.into()),
                        ("count", n.into()),
                        ("predicted", p.into()),
                        ("rel_error", e.into()),
                    ])
                })
                .collect();
            json_line(&Value::Array(rows))
        }
        Format::Csv => {
            let mut out = csv_line(&["surface", "a", "B", "count", "predicted", "rel_error"].map(String::from));
            for &(b, n, p, e) in &rows {
                out.push_str(&csv_line(&[
                    spec.label().to_string(),
                    a_field(spec),
                    b.to_string(),
                    n.to_string(),
                    g12(p),
                    g12(e),
                ]));
            }
            out
        }
        Format::Text => {
            let mut out = format!(
                "{spec}, constant {} +- {} (radius {radius}), N(B) ~ C B^{k}\n",
                g12(constant.value),
                g12(constant.uncertainty)
            );
            out.push_str("B\tcount\tpredicted\trel_error\n");
            for &(b, n, p, e) in &rows {
                out.push_str(&format!("{b}\t{n}\t{}\t{}\n", g12(p), g12(e)));
            }
            out
        }
    };
    Ok(Outcome {
        report,
        ..Outcome::default()
    })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_tamagawa(config: &RunConfig) -> Result<Outcome, CliError> {
    let limit = config.primes;
    let (mu, lambda) = config.pair;
    let radius = config.radius.unwrap_or(DEFAULT_TAMAGAWA_RADIUS);
    let mut failures = Vec::new();

    let primes = primes_up_to(usize::try_from(limit).map_err(|_| CliError::Usage("--primes is too large".into()))?);
    let mut densities = Vec::with_capacity(primes.len());
    for &p in &primes {
        let d = omega_p(p)?;
        let ok = convergence_factor_product(&d) == one_minus_inverse_cube(p);
        if !ok {
            failures.push(format!("p = {p}: omega_p (1 - 1/p) != 1 - p^-3"));
        }
        densities.push((d, ok));
    }

    let euler = euler_product(limit)?;
    let (zeta3, _) = zeta3_self_check();
    let euler_dev = (euler * zeta3 - 1.0).abs();
    // the omitted factors multiply to 1 + O(sum_{n > P} n^-3) < 1 + 1/P^2
    let euler_bound = 1.0 / (limit as f64).powi(2);
    let euler_ok = euler_dev <= euler_bound;
    if !euler_ok {
        failures.push(format!("|E({limit}) zeta(3) - 1| = {euler_dev:e} > {euler_bound:e}"));
    }

    let closed = omega_infinity_closed(mu, lambda)?;
    let quad = omega_infinity_quadrature(mu, lambda, config.quad_tol)?;
    let quad_dev = (closed - quad).abs();
    // the Gauss-Kronrod estimate is conservative, allow one order of magnitude
    let quad_ok = quad_dev <= 10.0 * config.quad_tol;
    if !quad_ok {
        failures.push(format!(
            "(mu, lambda) = ({mu}, {lambda}): quadrature {quad} vs closed form {closed}"
        ));
    }
    let fiber = tamagawa_fiber(mu, lambda)?;

    let peyre = peyre_consistency(radius)?;
    if let Some(f) = peyre.failures.first() {
        failures.push(format!(
            "fiberwise consistency fails at y = ({}, {})",
            f.y.mu, f.y.lambda
        ));
    }

    let report = match config.format {
        Format::Json => {
            let table: Vec<Value> = densities
                .iter()
                .map(|(d, ok)| {
                    object([
                        ("p", d.p.into()),
                        ("omega_p", d.value.to_string().into()),
                        ("convergence_factor_check", (*ok).into()),
                    ])
                })
                .collect();
            json_line(&object([
                (
                    "constants",
                    object([
                        ("alpha_L", ALPHA_L.into()),
                        ("beta_L", BETA_L.into()),
                        ("gamma_L", gamma_l().to_string().into()),
                        ("delta_L", DELTA_L.into()),
                    ]),
                ),
                ("local_densities", Value::Array(table)),
                (
                    "euler_product",
                    object([
                        ("primes_up_to", limit.into()),
                        ("value", euler.into()),
                        ("inverse_zeta3", (1.0 / zeta3).into()),
                        ("deviation", euler_dev.into()),
                        ("bound", euler_bound.into()),
                        ("verdict", verdict(euler_ok).into()),
                    ]),
                ),
                (
                    "fiber",
                    object([
                        ("mu", mu.into()),
                        ("lambda", lambda.into()),
                        ("f", i64::try_from(fiber.f_value).map(Value::from).unwrap_or_else(|_| fiber.f_value.to_string().into())),
                        ("omega_inf_closed", closed.into()),
                        ("omega_inf_quadrature", quad.into()),
                        ("quad_tol", config.quad_tol.into()),
                        ("deviation", quad_dev.into()),
                        ("verdict", verdict(quad_ok).into()),
                        ("tau_L", fiber.tau.into()),
                    ]),
                ),
                (
                    "consistency",
                    object([
                        ("radius", radius.into()),
                        ("fibers", peyre.fibers_checked.into()),
                        ("max_float_discrepancy", peyre.max_float_discrepancy.into()),
                        ("verdict", verdict(peyre.passed()).into()),
                    ]),
                ),
            ]))
        }
        Format::Csv => {
            let mut out = csv_line(&["p", "omega_p", "omega_p_value", "convergence_factor_check"].map(String::from));
            for (d, ok) in &densities {
                let approx = (d.p * d.p + d.p + 1) as f64 / (d.p * d.p) as f64;
                out.push_str(&csv_line(&[
                    d.p.to_string(),
                    d.value.to_string(),
                    g12(approx),
                    verdict(*ok).to_string(),
                ]));
            }
            out
        }
        Format::Text => {
            let mut out = format!(
                "constants: alpha_L = {ALPHA_L}, beta_L = {BETA_L}, gamma_L = {}, delta_L = {DELTA_L}\n",
                gamma_l()
            );
            out.push_str(&format!("local densities omega_p = (p^2 + p + 1) / p^2, p <= {limit}:\n"));
            for (d, ok) in &densities {
                out.push_str(&format!(
                    "  p = {}: {}  omega_p (1 - 1/p) = 1 - p^-3: {}\n",
                    d.p,
                    d.value,
                    verdict(*ok)
                ));
            }
            out.push_str(&format!(
                "Euler product prod_(p <= {limit}) (1 - p^-3) = {}, 1/zeta(3) = {}, |E zeta(3) - 1| = {} <= {}: {}\n",
                g12(euler),
                g12(1.0 / zeta3),
                g12(euler_dev),
                g12(euler_bound),
                verdict(euler_ok)
            ));
            out.push_str(&format!(
                "fiber (mu, lambda) = ({mu}, {lambda}), f = {}\n",
                fiber.f_value
            ));
            out.push_str(&format!("  omega_inf closed form: {}\n", g12(closed)));
            out.push_str(&format!(
                "  omega_inf quadrature:  {} (tol {}, |diff| {}): {}\n",
                g12(quad),
                g12(config.quad_tol),
                g12(quad_dev),
                verdict(quad_ok)
            ));
            out.push_str(&format!("  tau_L = omega_inf / zeta(3) = {}\n", g12(fiber.tau)));
            out.push_str(&format!(
                "consistency gamma_L tau_L(fiber) = fiber term of the leading constant, {} fibers with mu^2 + lambda^2 <= {}: {}\n",
                peyre.fibers_checked,
                peyre.radius_sq,
                verdict(peyre.passed())
            ));
            out
        }
    };
    Ok(Outcome {
        report,
        diagnostics: Vec::new(),
        failure: failures.into_iter().next(),
    })
}

fn cmd_verify(config: &RunConfig) -> Result<Outcome, CliError> {
    let params = VerifyParams::default();
    let suites: Vec<Suite> = match config.suite {
        Some(s) => vec![s],
        None => Suite::ALL.to_vec(),
    };
    let mut reports = Vec::new();
    let mut diagnostics = Vec::new();
    for suite in suites {
        let start = Instant::now();
        let report = run_suite(suite, &params)?;
        diagnostics.push(format!("{suite}: {:.2}s", start.elapsed().as_secs_f64()));
        reports.push(report);
    }
    let failure = reports.iter().find(|r| !r.hard_passed()).map(|r| {
        let c = r.first_failure().expect("a failed suite has a failed check");
        format!("{} / {}: {}", r.suite, c.label, c.detail)
    });

    let report = match config.format {
        Format::Json => {
            let rows: Vec<Value> = reports
                .iter()
                .map(|r| {
                    let checks: Vec<Value> = r
                        .checks
                        .iter()
                        .map(|c| {
                            object([
                                ("label", c.label.clone().into()),
                                ("passed", c.passed.into()),
                                ("detail", c.detail.clone().into()),
                            ])
                        })
                        .collect();
                    object([
                        ("suite", r.suite.name().into()),
                        ("soft", r.suite.is_soft().into()),
                        ("verdict", r.verdict().into()),
                        ("checks", Value::Array(checks)),
                        ("table", r.table.clone().into()),
                    ])
                })
                .collect();
            json_line(&Value::Array(rows))
        }
        Format::Csv => {
            let mut out = csv_line(&["suite", "soft", "check", "passed", "detail"].map(String::from));
            for r in &reports {
                for c in &r.checks {
                    out.push_str(&csv_line(&[
                        r.suite.name().to_string(),
                        r.suite.is_soft().to_string(),
                        c.label.clone(),
                        c.passed.to_string(),
                        c.detail.clone(),
                    ]));
                }
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for r in &reports {
                out.push_str(&format!("{}: {}\n", r.suite, r.verdict()));
                for c in &r.checks {
                    out.push_str(&format!(
                        "  [{}] {}: {}\n",
                        if c.passed { "ok" } else { "FAIL" },
                        c.label,
                        c.detail
                    ));
                }
                for row in &r.table {
                    out.push_str(&format!("  {row}\n"));
                }
            }
            let hard_ok = reports.iter().all(|r| r.hard_passed());
            out.push_str(&format!("overall: {}\n", verdict(hard_ok)));
            out
        }
    };
    Ok(Outcome {
        report,
        diagnostics,
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halving_rows() {
        assert_eq!(halvings(1, 8), vec![1]);
        assert_eq!(halvings(10, 8), vec![1, 2, 5, 10]);
        assert_eq!(halvings(1000, 3), vec![250, 500, 1000]);
    }
}
