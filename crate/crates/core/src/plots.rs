//! gnuplot scripts for the four standard figures.
//!
//! Each script reads one or more per-seed trace files and refers to columns
//! by header name only. Trace rows are indexed by the 0-based step `k`, so
//! the horizon is `n = k + 1`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// One figure: output stem, y-axis label, and the plotted expression.
#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub stem: &'static str,
    pub ylabel: &'static str,
    pub expr: &'static str,
    /// Header columns the expression reads.
    pub columns: &'static [&'static str],
    pub logscale_y: bool,
}

pub const FIGURES: [Figure; 4] = [
    Figure {
        stem: "fig_g_n",
        ylabel: "G_n",
        expr: "column(\"G_n\")",
        columns: &["G_n", "k"],
        logscale_y: false,
    },
    Figure {
        stem: "fig_regret_log",
        ylabel: "(1/log n) sum R_k",
        expr: "(column(\"k\") >= 2 ? column(\"cum_regret\")/log(column(\"k\")+1) : NaN)",
        columns: &["k", "cum_regret"],
        logscale_y: false,
    },
    Figure {
        stem: "fig_regret_mean",
        ylabel: "(1/n) sum R_k",
        expr: "column(\"cum_regret\")/(column(\"k\")+1)",
        columns: &["k", "cum_regret"],
        logscale_y: true,
    },
    Figure {
        stem: "fig_l_n",
        ylabel: "L_n",
        expr: "column(\"L_n\")",
        columns: &["L_n", "k"],
        logscale_y: false,
    },
];

/// Renders the script for `fig` over the given trace files (paths relative
/// to the script's directory).
pub fn render(fig: &Figure, traces: &[String]) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator comma\n");
    s.push_str("set datafile missing \"\"\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str("set terminal pngcairo size 900,600\n");
    s.push_str(&format!("set output \"{}.png\"\n", fig.stem));
    s.push_str("set logscale x\n");
    if fig.logscale_y {
        s.push_str("set logscale y\n");
    }
    s.push_str("set xlabel \"n\"\n");
    s.push_str(&format!("set ylabel \"{}\"\n", fig.ylabel));
    s.push_str("set grid\n");
    let plots: Vec<String> = traces
        .iter()
        .map(|t| {
            format!(
                "\"{t}\" using (column(\"k\")+1):({}) with lines title \"{t}\"",
                fig.expr
            )
        })
        .collect();
    s.push_str("plot ");
    s.push_str(&plots.join(", \\\n     "));
    s.push('\n');
    s
}

/// Writes one `.gp` script per figure into `dir`.
pub fn write_scripts(dir: &Path, traces: &[String]) -> io::Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for fig in &FIGURES {
        let path = dir.join(format!("{}.gp", fig.stem));
        fs::write(&path, render(fig, traces))?;
        written.push(path);
    }
    Ok(written)
}

/// Every `column("...")` name appearing in a script.
pub fn referenced_columns(script: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = script;
    while let Some(i) = rest.find("column(\"") {
        rest = &rest[i + 8..];
        if let Some(j) = rest.find('"') {
            out.push(rest[..j].to_string());
            rest = &rest[j..];
        }
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declared_columns_match_expressions() {
        for fig in &FIGURES {
            let cols = referenced_columns(&render(fig, &["t.csv".into()]));
            let mut want: Vec<String> = fig.columns.iter().map(|s| s.to_string()).collect();
            want.sort();
            assert_eq!(cols, want, "{}", fig.stem);
        }
    }

    #[test]
    fn one_series_per_trace() {
        let s = render(&FIGURES[0], &["a.csv".into(), "b.csv".into()]);
        assert!(s.contains("\"a.csv\" using") && s.contains("\"b.csv\" using"));
    }
}
