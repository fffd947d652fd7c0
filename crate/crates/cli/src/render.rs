//! Text and structured renderings of an [`AnalysisReport`].

use std::fmt::Write;

use holint_core::holonomy::OrbitKind;
use holint_core::series_core::MultiIndex3;

use crate::analysis::{AnalysisReport, Outcome};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Text,
    Structured,
}

pub fn render(report: &AnalysisReport, format: Format) -> String {
    match format {
        Format::Text => render_text(report),
        Format::Structured => render_structured(report),
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn render_structured(report: &AnalysisReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn index(e: &MultiIndex3) -> String {
    let [i, j, k] = e.exponents();
    format!("({i},{j},{k})")
}

fn indices(v: &[MultiIndex3]) -> String {
    if v.is_empty() {
        return "none".into();
    }
    v.iter().map(index).collect::<Vec<_>>().join(" ")
}

fn section<T>(out: &mut String, name: &str, outcome: &Option<Outcome<T>>, body: impl FnOnce(&mut String, &T)) {
    let Some(outcome) = outcome else { return };
    match outcome {
        Outcome::Ok { result } => {
            let _ = writeln!(out, "[{name}]");
            body(out, result);
        }
        Outcome::Skipped { reason } => {
            let _ = writeln!(out, "[{name}] skipped: {reason}");
        }
        Outcome::Failed { error, budget_exceeded } => {
            let tag = if *budget_exceeded { "budget exceeded" } else { "failed" };
            let _ = writeln!(out, "[{name}] {tag}: {error}");
        }
    }
}

pub fn render_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let p = &r.provenance;
    let _ = writeln!(out, "{} {}", p.tool, p.version);
    let _ = writeln!(out, "input sha256 {}", p.input_sha256);
    let tasks: Vec<&str> = p.tasks.iter().map(|t| t.as_str()).collect();
    let _ = writeln!(out, "seed {}, order {}, tasks {}", p.seed, p.order, tasks.join(","));
    out.push_str("\n[field]\n");
    for line in r.field.lines() {
        let _ = writeln!(out, "  {line}");
    }

    section(&mut out, "star", &r.star, |out, s| {
        if s.holds {
            let i = s.distinguished_index.map_or(0, |i| i + 1);
            let v = s.distinguished_value.as_ref().map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(out, "  holds; distinguished eigenvalue lambda{i} = {v}; line direction {}", s.line_direction);
        } else {
            out.push_str("  fails\n");
        }
    });
    section(&mut out, "resonances", &r.resonances, |out, s| {
        let _ = writeln!(out, "  degree <= {}: {} indices, rank {}", s.degree_bound, s.indices.len(), s.rank);
        let _ = writeln!(out, "  {}", indices(&s.indices));
    });
    section(&mut out, "first_integral", &r.first_integral, |out, s| {
        let d = &s.direction;
        let _ = writeln!(out, "  direction (m, n, k) = ({}, {}, {}), unit {}", d.m, d.n, d.k, d.unit);
        let _ = writeln!(out, "  F = ({}, {})", s.components[0], s.components[1]);
        let _ = writeln!(out, "  residual for the linear part: {}, {}", s.linear_residuals[0], s.linear_residuals[1]);
        let _ = writeln!(out, "  transversal: {}", s.transversal);
        match &s.field_residuals {
            Some([a, b]) => {
                let _ = writeln!(out, "  residual for the field: {a}, {b}");
            }
            None => out.push_str("  residual for the field: order too low\n"),
        }
    });
    section(&mut out, "meromorphic_invariant", &r.meromorphic_invariant, |out, s| {
        let e = s.invariant.exponent;
        let _ = writeln!(out, "  E = ({}, {}, {}), adapted: {}", e[0], e[1], e[2], s.invariant.adapted);
        let _ = writeln!(out, "  x^{} / x^{}", index(&s.invariant.numerator), index(&s.invariant.denominator));
        let _ = writeln!(out, "  quotient residual: linear part {}, field {}", s.linear_residual, s.field_residual);
    });
    section(&mut out, "distribution", &r.distribution, |out, s| {
        let j = &s.jet;
        let _ = writeln!(out, "  solved through degree {}", s.solve_order);
        let _ = writeln!(out, "  p = {}", j.p_bar);
        let _ = writeln!(out, "  resonant: {}", indices(&j.resonant_indices));
        let _ = writeln!(out, "  obstructions: {}", indices(&j.obstructions));
        let _ = writeln!(out, "  data conflicts: {}", indices(&j.data_conflicts));
        let order = j.residual_order.map_or_else(|| "none".to_string(), |o| o.to_string());
        let _ = writeln!(out, "  residual vanishes through degree {order}; integrable: {}", s.integrable);
    });
    section(&mut out, "resolution", &r.resolution, |out, slices| {
        for s in slices {
            let _ = write!(out, "  z0 = {}", s.z0);
            if let Some(t) = &s.tree {
                let _ = write!(out, ": {} blow-ups, dicritical: {}", t.blowups, s.dicritical);
            }
            if let Some(e) = &s.error {
                let _ = write!(out, " ({e})");
            }
            out.push('\n');
            if let Some(t) = &s.tree {
                for line in t.to_text().lines() {
                    let _ = writeln!(out, "    {line}");
                }
            }
        }
    });
    section(&mut out, "holonomy", &r.holonomy, |out, h| {
        let _ = writeln!(out, "  z0 = {}, {} samples, error bound {:.3e}", h.z0, h.samples, h.error_bound);
        let verdict = match h.verdict.kind {
            OrbitKind::Periodic { period } => format!("period {period}"),
            OrbitKind::FiniteWithinBudget { orbit_size } => format!("finite orbits within budget, size {orbit_size}"),
            OrbitKind::Escaped { iterate } => format!("escaped at iterate {iterate}"),
            OrbitKind::Undecided => "undecided".into(),
        };
        let _ = writeln!(out, "  verdict: {verdict}");
        if let Some(o) = &h.linear_oracle {
            let _ = writeln!(
                out,
                "  linear oracle: angles ({}, {}), period {}, max deviation {:.3e}",
                o.angles[0], o.angles[1], o.period, o.max_deviation
            );
        }
    });
    if !r.invariant_violations.is_empty() {
        out.push_str("[invariant violations]\n");
        for v in &r.invariant_violations {
            let _ = writeln!(out, "  {v}");
        }
    }
    out
}
