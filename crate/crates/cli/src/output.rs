//! Table rendering and the machine-readable report format.

use causalview::{JointDistribution, JointDistribution3};
use serde_json::{json, Value};

/// Output mode shared by every command: aligned text for people, a single
/// JSON object on stdout for CI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

fn fmt_p(p: f64) -> String {
    format!("{p:>12.6}")
}

/// Aligned probability table with marginals and total.
pub fn render_table(title: &str, jd: &JointDistribution) -> String {
    let mut out = String::new();
    out.push_str(title);
    out.push('\n');
    let row_w = jd
        .row_labels()
        .iter()
        .map(|l| l.len())
        .max()
        .unwrap_or(1)
        .max(3)
        + 2;
    out.push_str(&format!("{:row_w$}", ""));
    for l in jd.col_labels() {
        out.push_str(&format!("{:>12}", format!("b={l}")));
    }
    out.push_str(&format!("{:>14}\n", "A marg"));
    let rows = jd.row_marginals();
    for (i, l) in jd.row_labels().iter().enumerate() {
        out.push_str(&format!("{:row_w$}", format!("a={l}")));
        for j in 0..jd.n_cols() {
            out.push_str(&fmt_p(jd.p(i, j)));
        }
        out.push_str(&format!("  {}\n", fmt_p(rows[i])));
    }
    out.push_str(&format!("{:row_w$}", "B marg"));
    for m in jd.col_marginals() {
        out.push_str(&fmt_p(m));
    }
    out.push_str(&format!("   total {:.6}\n", jd.total()));
    out
}

/// Tripartite table rendered as one bipartite block per C outcome.
pub fn render_table3(title: &str, jd: &JointDistribution3) -> String {
    let mut out = String::new();
    out.push_str(title);
    out.push('\n');
    for (k, lc) in jd.labels_c().iter().enumerate() {
        out.push_str(&format!("  c={lc}:\n"));
        let row_w = jd
            .labels_a()
            .iter()
            .map(|l| l.len())
            .max()
            .unwrap_or(1)
            .max(3)
            + 4;
        out.push_str(&format!("{:row_w$}", ""));
        for l in jd.labels_b() {
            out.push_str(&format!("{:>12}", format!("b={l}")));
        }
        out.push('\n');
        for (i, la) in jd.labels_a().iter().enumerate() {
            out.push_str(&format!("{:row_w$}", format!("  a={la}")));
            for j in 0..jd.labels_b().len() {
                out.push_str(&fmt_p(jd.p(i, j, k)));
            }
            out.push('\n');
        }
    }
    out.push_str(&format!("  total {:.6}\n", jd.total()));
    out
}

pub fn table_json(view: &str, jd: &JointDistribution) -> Value {
    json!({
        "view": view,
        "row_labels": jd.row_labels(),
        "col_labels": jd.col_labels(),
        "probs": (0..jd.n_rows())
            .map(|i| (0..jd.n_cols()).map(|j| jd.p(i, j)).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "row_marginals": jd.row_marginals(),
        "col_marginals": jd.col_marginals(),
        "total": jd.total(),
    })
}

pub fn table3_json(view: &str, jd: &JointDistribution3) -> Value {
    json!({
        "view": view,
        "labels_a": jd.labels_a(),
        "labels_b": jd.labels_b(),
        "labels_c": jd.labels_c(),
        "probs": jd.probs(),
        "total": jd.total(),
    })
}

/// Emits the machine report as one JSON line.
pub fn print_machine(value: &Value) {
    println!("{value}");
}
