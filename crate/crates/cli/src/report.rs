//! Human-readable rendering of an [`ApportionmentResult`].

use std::fmt::Write;

use apportion_core::{ApportionmentResult, Entity};

pub fn render_text(result: &ApportionmentResult, entities: &[Entity]) -> String {
    let mut out = String::new();
    let resolved = result.final_allocation.as_ref();
    let _ = writeln!(
        out,
        "method {}, {} {}, backend {}, tie policy {}",
        result.method,
        result.seats,
        if result.seats == 1 { "seat" } else { "seats" },
        result.backend,
        result.tie_policy
    );
    out.push('\n');

    let header = ["label", "score", "below", "tied", "seats"];
    let rows: Vec<[String; 5]> = entities
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let tied = if result.tie_set.contains(&i) { "yes" } else { "" };
            let seats = resolved.map_or_else(|| "?".to_string(), |a| a[i].to_string());
            [e.label.clone(), e.score.to_string(), result.guaranteed[i].to_string(), tied.into(), seats]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: [&str; 5]| {
        let mut s = format!("{:<w$}", cells[0], w = widths[0]);
        for (cell, w) in cells.iter().zip(widths).skip(1) {
            let _ = write!(s, "  {cell:>w$}");
        }
        s.trim_end().to_string()
    };
    let _ = writeln!(out, "{}", line(header));
    for row in &rows {
        let _ = writeln!(out, "{}", line([&row[0], &row[1], &row[2], &row[3], &row[4]].map(String::as_str)));
    }
    out.push('\n');

    match &result.threshold {
        None => out.push_str("threshold none (no seats to award)\n"),
        Some(t) => {
            let _ = writeln!(
                out,
                "threshold {} = {} (divisor index {}, entity {})",
                t.exact, t.decimal, t.divisor_index, t.label
            );
        }
    }
    if let Some(f) = &result.fallback {
        let _ = writeln!(out, "note: linear selection fell back to the heap simulation ({f})");
    }
    if result.tie_set.len() > 1 {
        let names: Vec<&str> = result.tie_set.iter().map(|&i| entities[i].label.as_str()).collect();
        let seats = if result.residual == 1 { "seat" } else { "seats" };
        let state = match resolved {
            _ if result.residual == names.len() as u64 => "all awarded",
            Some(_) => "resolved by tie policy",
            None => "unresolved",
        };
        let _ = writeln!(
            out,
            "tie: {} {seats} for {} entities at the threshold ({}), {state}",
            result.residual,
            names.len(),
            names.join(", ")
        );
    }
    out
}
