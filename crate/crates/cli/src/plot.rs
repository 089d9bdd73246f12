//! Line plots of CSV columns as standalone SVG.

use std::collections::BTreeMap;
use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 120.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 50.0;
const TICKS: usize = 5;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlotSpec {
    pub x: String,
    pub y: String,
    /// Column whose values split the rows into series.
    pub series: Option<String>,
}

pub struct Table {
    /// Text of `#` lines before the header, without the marker.
    pub comments: Vec<String>,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub fn parse_csv(text: &str) -> Result<Table, String> {
    let comments: Vec<String> = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(|l| l.trim_start_matches('#').trim().to_string())
        .collect();
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| format!("malformed csv header: {e}"))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() || headers.iter().all(String::is_empty) {
        return Err("csv has no header row".into());
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| format!("malformed csv: {e}"))?;
        rows.push(rec.iter().map(str::to_string).collect());
    }
    if rows.is_empty() {
        return Err("csv has no data rows".into());
    }
    Ok(Table { comments, headers, rows })
}

fn column(t: &Table, name: &str) -> Result<usize, String> {
    t.headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| format!("column {name:?} not in header {:?}", t.headers))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Renders `spec.y` against `spec.x`, one polyline per distinct value of
/// the series column (in sorted order), points sorted by x.
pub fn render_svg(table: &Table, spec: &PlotSpec) -> Result<String, String> {
    let xi = column(table, &spec.x)?;
    let yi = column(table, &spec.y)?;
    let si = spec.series.as_deref().map(|s| column(table, s)).transpose()?;
    let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for (line, row) in table.rows.iter().enumerate() {
        let num = |i: usize| {
            row.get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("row {}: column {:?} is not a number", line + 1, table.headers[i]))
        };
        let key = si.map(|i| row.get(i).cloned().unwrap_or_default()).unwrap_or_default();
        series.entry(key).or_default().push((num(xi)?, num(yi)?));
    }
    // Numeric series names sort numerically.
    let mut names: Vec<String> = series.keys().cloned().collect();
    names.sort_by(|a, b| match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => x.total_cmp(&y),
        _ => a.cmp(b),
    });
    let (x0, x1) = range(series.values().flatten().map(|p| p.0));
    let (y0, y1) = range(series.values().flatten().map(|p| p.1));
    let pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| MARGIN_TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    for c in &table.comments {
        writeln!(s, "<!-- {} -->", escape(c).replace("--", "- -")).unwrap();
    }
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    let (bx, by) = (MARGIN_LEFT, MARGIN_TOP + ph);
    writeln!(s, r#"<line x1="{bx}" y1="{by}" x2="{}" y2="{by}" stroke="black"/>"#, bx + pw).unwrap();
    writeln!(s, r#"<line x1="{bx}" y1="{by}" x2="{bx}" y2="{MARGIN_TOP}" stroke="black"/>"#).unwrap();
    for k in 0..=TICKS {
        let t = k as f64 / TICKS as f64;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        writeln!(s, r#"<line x1="{px:.2}" y1="{by}" x2="{px:.2}" y2="{}" stroke="black"/>"#, by + 5.0).unwrap();
        writeln!(s, r#"<text x="{px:.2}" y="{}" text-anchor="middle">{xv:.3}</text>"#, by + 18.0).unwrap();
        writeln!(s, r#"<line x1="{}" y1="{py:.2}" x2="{bx}" y2="{py:.2}" stroke="black"/>"#, bx - 5.0).unwrap();
        writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{yv:.3}</text>"#, bx - 8.0, py + 4.0).unwrap();
    }
    writeln!(
        s,
        r#"<text class="x-label" x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
        bx + pw / 2.0,
        HEIGHT - 10.0,
        escape(&spec.x)
    )
    .unwrap();
    writeln!(
        s,
        r#"<text class="y-label" x="15" y="{:.2}" text-anchor="middle" transform="rotate(-90 15 {:.2})">{}</text>"#,
        MARGIN_TOP + ph / 2.0,
        MARGIN_TOP + ph / 2.0,
        escape(&spec.y)
    )
    .unwrap();
    for (i, name) in names.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut pts = series[name].clone();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let label = match &spec.series {
            Some(col) => format!("{col}={name}"),
            None => spec.y.clone(),
        };
        writeln!(s, r#"<g class="series" data-name="{}">"#, escape(name)).unwrap();
        writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, path.join(" ")).unwrap();
        for &(x, y) in &pts {
            writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, sx(x), sy(y)).unwrap();
        }
        let ly = MARGIN_TOP + 15.0 * i as f64 + 10.0;
        writeln!(
            s,
            r#"<text x="{:.2}" y="{ly:.2}" fill="{color}">{}</text>"#,
            WIDTH - MARGIN_RIGHT + 10.0,
            escape(&label)
        )
        .unwrap();
        writeln!(s, "</g>").unwrap();
    }
    writeln!(s, "</svg>").unwrap();
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SWEEP: &str = "# netlearn 0.1.0 seed=1 config=ab\n\
        family,params,q,vertex,rate\n\
        star,leaves=3,0.6,0,0.7\n\
        star,leaves=3,0.7,0,0.8\n\
        star,leaves=3,0.6,1,0.6\n\
        star,leaves=3,0.7,1,0.7\n";

    fn spec() -> PlotSpec {
        PlotSpec { x: "q".into(), y: "rate".into(), series: Some("vertex".into()) }
    }

    #[test]
    fn one_series_per_vertex() {
        let t = parse_csv(SWEEP).unwrap();
        let svg = render_svg(&t, &spec()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("<!-- netlearn 0.1.0 seed=1 config=ab -->"));
        assert!(svg.contains(r#"class="x-label""#) && svg.contains(">q</text>"));
        assert!(svg.contains(">rate</text>"));
    }

    #[test]
    fn empty_csv_is_an_error() {
        assert!(parse_csv("").is_err());
        assert!(parse_csv("# only a comment\n").is_err());
        assert!(parse_csv("q,rate\n").is_err());
    }

    #[test]
    fn bad_columns_are_errors() {
        let t = parse_csv(SWEEP).unwrap();
        let mut s = spec();
        s.y = "nope".into();
        assert!(render_svg(&t, &s).is_err());
        s.y = "family".into();
        assert!(render_svg(&t, &s).is_err());
    }
}
