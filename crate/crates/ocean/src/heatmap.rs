//! Clustered SVG heatmaps of one TDP metric over a scan's (row set, column set) grid.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use kodama::{linkage, Method};

use crate::error::{Error, Result};
use crate::results::{Metric, Ratio, ResultRow};

/// The metric grid with rows and columns in display order.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub row_names: Vec<String>,
    pub col_names: Vec<String>,
    /// `values[i][k]` belongs to `row_names[i]` and `col_names[k]`.
    pub values: Vec<Vec<Ratio>>,
}

/// Arranges results in a grid and orders both axes by average-linkage clustering on
/// Euclidean distance. Names are sorted before clustering and merged clusters list
/// the one holding the smaller name first, so the layout depends only on the data.
pub fn build_heatmap(results: &[ResultRow], metric: Metric) -> Result<Heatmap> {
    if results.is_empty() {
        return Err(Error::Validation("results table is empty".into()));
    }
    let mut cells: BTreeMap<(&str, &str), Ratio> = BTreeMap::new();
    for r in results {
        if cells
            .insert((&r.row_set, &r.col_set), r.metric(metric))
            .is_some()
        {
            return Err(Error::Validation(format!(
                "duplicate result for ({}, {})",
                r.row_set, r.col_set
            )));
        }
    }
    let mut rows: Vec<&str> = results.iter().map(|r| r.row_set.as_str()).collect();
    let mut cols: Vec<&str> = results.iter().map(|r| r.col_set.as_str()).collect();
    rows.sort_unstable();
    rows.dedup();
    cols.sort_unstable();
    cols.dedup();
    if cells.len() != rows.len() * cols.len() {
        return Err(Error::Validation(format!(
            "results cover {} of the {} (row set, column set) pairs",
            cells.len(),
            rows.len() * cols.len()
        )));
    }
    let grid: Vec<Vec<Ratio>> = rows
        .iter()
        .map(|r| cols.iter().map(|c| cells[&(*r, *c)]).collect())
        .collect();
    let numeric: Vec<Vec<f64>> = grid
        .iter()
        .map(|row| row.iter().map(|v| v.value()).collect())
        .collect();
    let row_order = leaf_order(&numeric);
    let transposed: Vec<Vec<f64>> = (0..cols.len())
        .map(|k| numeric.iter().map(|row| row[k]).collect())
        .collect();
    let col_order = leaf_order(&transposed);
    Ok(Heatmap {
        row_names: row_order.iter().map(|&i| rows[i].to_string()).collect(),
        col_names: col_order.iter().map(|&k| cols[k].to_string()).collect(),
        values: row_order
            .iter()
            .map(|&i| col_order.iter().map(|&k| grid[i][k]).collect())
            .collect(),
    })
}

/// Dendrogram leaf order of the given observation vectors.
pub fn leaf_order(points: &[Vec<f64>]) -> Vec<usize> {
    let n = points.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut condensed = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n - 1 {
        for j in i + 1..n {
            let d2: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            condensed.push(d2.sqrt());
        }
    }
    let dendrogram = linkage(&mut condensed, n, Method::Average);
    // clusters[c] = leaves of cluster c, smallest-index leaf first
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for step in dendrogram.steps() {
        let (a, b) = (&clusters[step.cluster1], &clusters[step.cluster2]);
        let (first, second) = if a.iter().min() <= b.iter().min() {
            (a, b)
        } else {
            (b, a)
        };
        let merged = first.iter().chain(second).copied().collect();
        clusters.push(merged);
    }
    clusters.pop().unwrap_or_default()
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Linear white-to-navy scale on `[0, 1]`.
fn color(v: f64) -> String {
    let v = v.clamp(0.0, 1.0);
    let lerp = |from: f64, to: f64| (from + (to - from) * v).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        lerp(255.0, 8.0),
        lerp(255.0, 48.0),
        lerp(255.0, 107.0)
    )
}

const CELL: usize = 18;

/// Renders the heatmap as a standalone SVG document. Each cell is a `rect` carrying
/// `data-row`, `data-col`, `data-value` (the TDP as a decimal) and `data-ratio`.
pub fn render_svg(map: &Heatmap, metric: Metric) -> String {
    let label_chars = |names: &[String]| names.iter().map(|n| n.chars().count()).max().unwrap_or(0);
    let left = 10 + 7 * label_chars(&map.row_names);
    let top = 10 + 7 * label_chars(&map.col_names);
    let legend = 60;
    let width = left + CELL * map.col_names.len() + legend;
    let height = (top + CELL * map.row_names.len() + 10).max(top + 110);
    let metric_name = match metric {
        Metric::Pair => "pair",
        Metric::Row => "row",
        Metric::Col => "col",
    };
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11" data-metric="{metric_name}">"#
    );
    let _ = writeln!(s, r#"<title>{metric_name} TDP lower bounds</title>"#);
    for (i, name) in map.row_names.iter().enumerate() {
        let y = top + CELL * i + CELL / 2 + 4;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{y}" text-anchor="end">{}</text>"#,
            left - 4,
            escape(name)
        );
    }
    for (k, name) in map.col_names.iter().enumerate() {
        let x = left + CELL * k + CELL / 2 + 4;
        let y = top - 4;
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{y}" transform="rotate(-90 {x} {y})">{}</text>"#,
            escape(name)
        );
    }
    let _ = writeln!(s, r#"<g class="cells">"#);
    for (i, row) in map.values.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            let _ = writeln!(
                s,
                r#"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="{}" data-row="{}" data-col="{}" data-value="{}" data-ratio="{}/{}"/>"#,
                left + CELL * k,
                top + CELL * i,
                color(v.value()),
                escape(&map.row_names[i]),
                escape(&map.col_names[k]),
                v.value(),
                v.num,
                v.den
            );
        }
    }
    let _ = writeln!(s, "</g>");
    let lx = left + CELL * map.col_names.len() + 20;
    let _ = writeln!(s, r#"<g class="legend">"#);
    for step in 0..=10 {
        let v = 1.0 - step as f64 / 10.0;
        let _ = writeln!(
            s,
            r#"<rect x="{lx}" y="{}" width="12" height="8" fill="{}"/>"#,
            top + 8 * step,
            color(v)
        );
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}">1</text>"#, lx + 16, top + 8);
    let _ = writeln!(s, r#"<text x="{}" y="{}">0</text>"#, lx + 16, top + 88);
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(r: &str, c: &str, num: u64, den: u64) -> ResultRow {
        let ratio = Ratio { num, den };
        ResultRow {
            row_set: r.into(),
            col_set: c.into(),
            n_rows: den,
            n_cols: 1,
            pair_tdp: ratio,
            row_tdp_lower: ratio,
            row_tdp_upper: ratio,
            col_tdp_lower: ratio,
            col_tdp_upper: ratio,
            row_exact: true,
            col_exact: true,
            iterations: 0,
        }
    }

    #[test]
    fn grid_has_one_cell_per_pair() {
        let rs = [
            result("b", "x", 1, 2),
            result("a", "x", 0, 2),
            result("a", "y", 2, 2),
            result("b", "y", 1, 4),
        ];
        let map = build_heatmap(&rs, Metric::Row).unwrap();
        let svg = render_svg(&map, Metric::Row);
        assert_eq!(svg.matches("data-value=").count(), 4);
    }

    #[test]
    fn incomplete_or_empty_results_rejected() {
        assert!(build_heatmap(&[], Metric::Pair).is_err());
        let rs = [result("a", "x", 1, 2), result("b", "y", 1, 2)];
        assert!(build_heatmap(&rs, Metric::Pair).is_err());
    }

    #[test]
    fn zeros_render_in_one_color() {
        let rs: Vec<_> = ["a", "b", "c"]
            .iter()
            .flat_map(|r| ["x", "y"].map(|c| result(r, c, 0, 3)))
            .collect();
        let svg = render_svg(&build_heatmap(&rs, Metric::Pair).unwrap(), Metric::Pair);
        let fills: std::collections::BTreeSet<&str> = svg
            .lines()
            .filter(|l| l.contains("data-value"))
            .map(|l| {
                l.split("fill=\"")
                    .nth(1)
                    .unwrap()
                    .split('"')
                    .next()
                    .unwrap()
            })
            .collect();
        assert_eq!(fills.len(), 1);
    }

    #[test]
    fn similar_profiles_cluster_together() {
        let points = vec![
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![0.1, 0.0],
            vec![0.9, 1.0],
        ];
        let order = leaf_order(&points);
        let pos = |i: usize| order.iter().position(|&x| x == i).unwrap();
        assert_eq!(pos(0).abs_diff(pos(2)), 1);
        assert_eq!(pos(1).abs_diff(pos(3)), 1);
        assert_eq!(order[0], 0);
    }

    #[test]
    fn escapes_markup_in_names() {
        let rs = [result("a<b", "x&y", 1, 1)];
        let svg = render_svg(&build_heatmap(&rs, Metric::Col).unwrap(), Metric::Col);
        assert!(svg.contains("a&lt;b") && svg.contains("x&amp;y"));
    }
}
