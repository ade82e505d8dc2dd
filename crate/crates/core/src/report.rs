//! Text outputs: the trace CSV and `%.6g`-style number rendering.

use std::io::{self, Write};

use crate::bo::OptimizationTrace;

pub const TRACE_HEADER: &str =
    "index,phase,a,b,c,theta1,theta2,d,mass_kg,max_stress_mpa,feasible,failure_mode,best_so_far_kg";

/// Renders `x` like C's `%.6g`: six significant digits, trailing zeros
/// trimmed, exponent form outside `1e-4 ≤ |x| < 1e6`.
pub fn fmt_sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = usize::try_from(5 - exp).unwrap_or(0);
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes the trace as CSV with `\n` line endings.
pub fn write_trace_csv<W: Write>(trace: &OptimizationTrace, mut out: W) -> io::Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for r in &trace.records {
        let p = &r.params;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.index,
            r.phase,
            fmt_sig6(p.a),
            fmt_sig6(p.b),
            fmt_sig6(p.c),
            fmt_sig6(p.theta1),
            fmt_sig6(p.theta2),
            fmt_sig6(r.d),
            fmt_sig6(r.mass),
            fmt_sig6(r.max_abs_stress),
            r.feasible,
            r.failure_mode,
            fmt_sig6(r.best_so_far_mass),
        )?;
    }
    Ok(())
}

pub fn trace_csv(trace: &OptimizationTrace) -> String {
    let mut buf = Vec::new();
    write_trace_csv(trace, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}
