//! Artifact rendering: CSV/JSON serialization and stream selection.
//!
//! Without `--out` the data goes to stdout and the human summary to stderr,
//! so `eit-cli spectrum > fig2.csv` captures a clean artifact. With `--out`
//! the data goes to the file and the summary to stdout.

use std::fmt::Write as _;
use std::path::PathBuf;

use eit_core::{ContourGrid, SpectrumRecord};
use serde_json::{json, Map, Value};

/// Numeric cell format: 12 significant digits, lowercase scientific, with
/// failed entries spelled `nan` (JSON renders those as `null` instead).
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.11e}")
    }
}

fn comment_header(echo: &Map<String, Value>) -> String {
    let mut s = String::new();
    for (key, value) in echo {
        writeln!(s, "# {key} = {value}").unwrap();
    }
    s
}

/// One row per grid point with the fixed column schema shared by `spectrum`
/// and `groupvel`.
pub fn records_csv(echo: &Map<String, Value>, records: &[SpectrumRecord]) -> String {
    let mut s = comment_header(echo);
    s.push_str("delta,omega_c,f0sq,re_sigma31,im_sigma31,alpha,n_r,v_g\n");
    for r in records {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            num(r.delta),
            num(r.omega_c),
            num(r.f0sq),
            num(r.re_sigma31),
            num(r.im_sigma31),
            num(r.alpha),
            num(r.n_r),
            num(r.v_g),
        )
        .unwrap();
    }
    s
}

pub fn records_json(echo: &Map<String, Value>, records: &[SpectrumRecord]) -> String {
    let doc = json!({ "config": echo, "records": records });
    serde_json::to_string_pretty(&doc).unwrap() + "\n"
}

/// Matrix artifact: header row carries the f₀² column coordinates, each data
/// row starts with its Ω_c coordinate.
pub fn contour_csv(echo: &Map<String, Value>, grid: &ContourGrid) -> String {
    let mut s = comment_header(echo);
    s.push_str("# rows: omega_c; columns: f0sq; cells: alpha (1/m)\n");
    let header: Vec<String> = grid.f0sq.iter().map(|&f| num(f)).collect();
    writeln!(s, "omega_c\\f0sq,{}", header.join(",")).unwrap();
    for (oc, row) in grid.omega_c.iter().zip(&grid.alpha) {
        let cells: Vec<String> = row.iter().map(|&a| num(a)).collect();
        writeln!(s, "{},{}", num(*oc), cells.join(",")).unwrap();
    }
    s
}

pub fn contour_json(echo: &Map<String, Value>, grid: &ContourGrid) -> String {
    let doc = json!({
        "config": echo,
        "omega_c": grid.omega_c,
        "f0sq": grid.f0sq,
        "alpha": grid.alpha,
    });
    serde_json::to_string_pretty(&doc).unwrap() + "\n"
}

/// Key/value artifact for verdict reports and other non-tabular outputs.
pub fn keyvals_csv(echo: &Map<String, Value>, pairs: &[(&str, String)]) -> String {
    let mut s = comment_header(echo);
    s.push_str("key,value\n");
    for (key, value) in pairs {
        writeln!(s, "{key},{value}").unwrap();
    }
    s
}

pub fn keyvals_json(echo: &Map<String, Value>, body: Value) -> String {
    let doc = json!({ "config": echo, "report": body });
    serde_json::to_string_pretty(&doc).unwrap() + "\n"
}

/// Where the data artifact and the summary lines go for this invocation.
pub struct Sink {
    out: Option<PathBuf>,
}

impl Sink {
    pub fn new(out: Option<PathBuf>) -> Self {
        Sink { out }
    }

    pub fn write_data(&self, text: &str) -> Result<(), String> {
        match &self.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| format!("cannot write {}: {e}", path.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    pub fn summary(&self, line: &str) {
        if self.out.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
}

/// Friendly magnitude formatting for summary lines: plain decimal in the
/// human-readable range, scientific outside it.
pub fn pretty(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else if x.is_finite() && (1e-3..1e4).contains(&x.abs()) {
        format!("{x:.4}")
    } else {
        format!("{x:.4e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digit_cells_and_nan_spelling() {
        assert_eq!(num(0.4163432834), "4.16343283400e-1");
        assert_eq!(num(f64::NAN), "nan");
        assert_eq!(num(0.0), "0.00000000000e0");
    }

    #[test]
    fn csv_embeds_echo_as_comments_before_the_header() {
        let mut echo = Map::new();
        echo.insert("f0sq".to_string(), 0.7.into());
        let records = vec![];
        let text = records_csv(&echo, &records);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# f0sq = 0.7");
        assert_eq!(lines[1], "delta,omega_c,f0sq,re_sigma31,im_sigma31,alpha,n_r,v_g");
    }

    #[test]
    fn pretty_switches_to_scientific_outside_the_readable_range() {
        assert_eq!(pretty(0.4163), "0.4163");
        assert_eq!(pretty(7.2006e8), "7.2006e8");
        assert_eq!(pretty(0.0), "0");
    }
}
