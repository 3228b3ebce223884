use std::fmt::Write as _;
use std::thread;

use anyhow::{bail, Context, Result};
use num_bigint::BigInt;
use rnajoint::asym::{
    analytic_constant, asymptotic_table, dominant_singularity, extract_constant, DEFAULT_TOLERANCE, VERIFIED_SIGMA_MAX,
};
use rnajoint::oracle::count_joint_bruteforce_capped;
use rnajoint::{joint_gf, secondary_gf, shape_gf_closed, shape_gf_grammar, Caps, Error, Real, SecondaryParams};
use serde::Serialize;
use serde_json::json;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ShapeMethod {
    Closed,
    Grammar,
}

/// Rendered command output. `ok` is false when an internal consistency
/// check failed; the text is still written so the failure can be inspected.
#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub ok: bool,
    pub warnings: Vec<String>,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, ok: true, warnings: Vec::new() }
    }
}

fn counts_csv(header: &str, counts: &[BigInt]) -> String {
    let mut out = format!("{header}\n");
    for (k, c) in counts.iter().enumerate() {
        let _ = writeln!(out, "{k},{c}");
    }
    out
}

fn counts_json(index: &str, counts: &[BigInt]) -> String {
    let rows: Vec<_> = counts.iter().enumerate().map(|(k, c)| json!({ index: k, "count": c.to_string() })).collect();
    to_json(&rows)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn secondary(sigma: u32, lambda: Option<u32>, order: usize, format: Format) -> Result<Output> {
    let p = match lambda {
        Some(l) => SecondaryParams::new(sigma, l),
        None => SecondaryParams::canonical(sigma),
    }?;
    let counts = secondary_gf(p, order).integer_coeffs()?;
    Ok(Output::ok(match format {
        Format::Csv => counts_csv("n,count", &counts),
        Format::Json => counts_json("n", &counts),
    }))
}

pub fn joint(sigma: u32, order: usize, format: Format) -> Result<Output> {
    check_sigma(sigma)?;
    let counts = joint_gf(sigma, order)?.integer_coeffs()?;
    Ok(Output::ok(match format {
        Format::Csv => counts_csv("s,count", &counts),
        Format::Json => counts_json("s", &counts),
    }))
}

pub fn shapes(grade: u32, method: ShapeMethod, format: Format) -> Result<Output> {
    let caps = Caps::grade(grade);
    let g = match method {
        ShapeMethod::Closed => shape_gf_closed(caps),
        ShapeMethod::Grammar => shape_gf_grammar(caps),
    }?;
    let mut rows = Vec::new();
    for (e, c) in g.iter() {
        if !c.is_integer() {
            bail!("non-integral shape coefficient {c} at {e:?}");
        }
        rows.push((*e, c.to_integer()));
    }
    let text = match format {
        Format::Csv => {
            let mut out = String::from("t,h,a1,a2,count\n");
            for ([t, h, a1, a2], c) in &rows {
                let _ = writeln!(out, "{t},{h},{a1},{a2},{c}");
            }
            out
        }
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|([t, h, a1, a2], c)| json!({ "t": t, "h": h, "a1": a1, "a2": a2, "count": c.to_string() }))
                .collect();
            to_json(&v)
        }
    };
    Ok(Output::ok(text))
}

fn check_sigma(sigma: u32) -> Result<()> {
    if sigma < 1 {
        bail!("sigma must be at least 1, got {sigma}");
    }
    Ok(())
}

fn uniqueness_warning(sigma: u32) -> Option<String> {
    (sigma > VERIFIED_SIGMA_MAX).then(|| {
        format!("sigma {sigma} is outside 1..={VERIFIED_SIGMA_MAX}; uniqueness of the dominant singularity is not verified")
    })
}

fn real_json(x: &Real) -> serde_json::Value {
    json!(x.to_string())
}

pub fn asym(sigma: u32, order: usize, precision_bits: usize, format: Format) -> Result<Output> {
    check_sigma(sigma)?;
    let sing = dominant_singularity(sigma, precision_bits)?;
    let c_analytic = analytic_constant(sigma, &sing.kappa)?;
    let h = joint_gf(sigma, order)?.integer_coeffs()?;
    let mut warnings: Vec<String> = uniqueness_warning(sigma).into_iter().collect();
    let (c, method, depth, spread) = match extract_constant(&h, &sing.kappa, DEFAULT_TOLERANCE) {
        Ok(ex) => (ex.value, "richardson", Some(ex.depth), Some(ex.spread.to_f64())),
        Err(Error::PoorConvergence { spread, tolerance }) => {
            warnings.push(format!(
                "extrapolation from {order} coefficients did not settle (spread {spread:.3e} > {tolerance:.0e}); reporting the analytic constant"
            ));
            (c_analytic.clone(), "analytic", None, Some(spread))
        }
        Err(e) => return Err(e.into()),
    };
    let kappa_inv = sing.kappa.recip();
    let text = match format {
        Format::Json => {
            let mut v = json!({
                "sigma": sigma,
                "kappa": real_json(&sing.kappa),
                "kappa_inv": real_json(&kappa_inv),
                "c": real_json(&c),
                "c_method": method,
                "c_analytic": real_json(&c_analytic),
                "exponent": -1.5,
                "precision_bits": precision_bits,
                "order": order,
                "richardson_depth": depth,
                "richardson_spread": spread,
                "sign_changes": sing.sign_changes,
                "verified_unique": sigma <= VERIFIED_SIGMA_MAX,
            });
            if !warnings.is_empty() {
                v["warning"] = json!(warnings.join("; "));
            }
            to_json(&v)
        }
        Format::Csv => {
            let mut out = String::from("sigma,kappa,kappa_inv,c,c_method,c_analytic,verified_unique\n");
            let _ = writeln!(
                out,
                "{sigma},{},{kappa_inv},{c},{method},{c_analytic},{}",
                sing.kappa,
                sigma <= VERIFIED_SIGMA_MAX
            );
            out
        }
    };
    Ok(Output { text, ok: true, warnings })
}

#[derive(Serialize)]
struct ValidateRow {
    sigma: u32,
    s: usize,
    oracle: String,
    gf: String,
    #[serde(rename = "match")]
    matches: bool,
}

pub fn validate(sigma: u32, max_size: usize, cap: usize, format: Format) -> Result<Output> {
    check_sigma(sigma)?;
    let gf = joint_gf(sigma, max_size)?.integer_coeffs()?;
    let oracle: Vec<BigInt> = thread::scope(|scope| {
        let handles: Vec<_> = (0..=max_size)
            .map(|s| scope.spawn(move || count_joint_bruteforce_capped(sigma, s, cap)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("oracle worker panicked")).collect::<rnajoint::Result<_>>()
    })
    .context("brute-force enumeration")?;
    let rows: Vec<ValidateRow> = (0..=max_size)
        .map(|s| ValidateRow {
            sigma,
            s,
            oracle: oracle[s].to_string(),
            gf: gf[s].to_string(),
            matches: oracle[s] == gf[s],
        })
        .collect();
    let ok = rows.iter().all(|r| r.matches);
    let text = match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut out = String::from("sigma,s,oracle,gf,match\n");
            for r in &rows {
                let _ = writeln!(out, "{},{},{},{},{}", r.sigma, r.s, r.oracle, r.gf, r.matches);
            }
            out
        }
    };
    Ok(Output { text, ok, warnings: Vec::new() })
}

pub fn plot(sigma: u32, order: usize, precision_bits: usize, format: Format) -> Result<Output> {
    check_sigma(sigma)?;
    let sizes: Vec<usize> = (0..=order).collect();
    let (_, rows) = asymptotic_table(sigma, &sizes, order, precision_bits)?;
    let warnings: Vec<String> = uniqueness_warning(sigma).into_iter().collect();
    let text = match format {
        Format::Csv => {
            let mut out = String::from("s,exact,asymptotic,ratio\n");
            for r in &rows {
                let f = |x: &Option<Real>| x.as_ref().map(|v| v.to_f64().to_string()).unwrap_or_default();
                let _ = writeln!(out, "{},{},{},{}", r.s, r.exact, f(&r.asymptotic), f(&r.ratio));
            }
            out
        }
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "s": r.s,
                        "exact": r.exact.to_string(),
                        "asymptotic": r.asymptotic.as_ref().map(|x| x.to_f64()),
                        "ratio": r.ratio.as_ref().map(|x| x.to_f64()),
                    })
                })
                .collect();
            to_json(&v)
        }
    };
    Ok(Output { text, ok: true, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn secondary_csv_rows() {
        let out = secondary(1, Some(2), 8, Format::Csv).unwrap();
        let counts: Vec<&str> = out.text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
        assert_eq!(counts, ["1", "1", "1", "2", "4", "8", "17", "37", "82"]);
    }

    #[test]
    fn order_zero_is_single_row() {
        assert_eq!(secondary(1, Some(2), 0, Format::Csv).unwrap().text, "n,count\n0,1\n");
    }

    #[test]
    fn lambda_one_rejected() {
        assert!(secondary(1, Some(1), 8, Format::Csv).is_err());
    }

    #[test]
    fn shapes_grade_two() {
        let out = shapes(2, ShapeMethod::Closed, Format::Csv).unwrap();
        assert_eq!(out.text.lines().next(), Some("t,h,a1,a2,count"));
        assert!(out.text.lines().any(|l| l == "0,0,0,0,1"));
        let grammar = shapes(6, ShapeMethod::Grammar, Format::Csv).unwrap();
        assert_eq!(grammar.text, shapes(6, ShapeMethod::Closed, Format::Csv).unwrap().text);
    }

    #[test]
    fn validate_small_sizes() {
        let out = validate(2, 6, 10, Format::Json).unwrap();
        assert!(out.ok);
        let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 7);
        assert_eq!(v[1]["gf"], "2");
    }
}
