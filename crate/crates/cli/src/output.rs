//! CSV emission: `#` metadata lines, a snake_case header, LF line endings
//! and reals with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::RunConfig;
use crate::error::CliError;

/// A cell of a CSV row.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Text(String),
}

/// Real numbers in scientific notation with 17 significant digits, which
/// round-trips every finite `f64`.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Render a table whose columns all have the same length.
pub fn render_table(cfg: &RunConfig, header: &[String], rows: &[Vec<Cell>]) -> String {
    let mut s = String::new();
    writeln!(s, "# seed={:#018x}", cfg.seed).unwrap();
    writeln!(s, "# config={}", cfg.canonical()).unwrap();
    s.push_str(&header.join(","));
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Real(x) => format_real(*x),
                Cell::Text(t) => t.clone(),
            })
            .collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Render `t` followed by named real columns.
pub fn render_columns(cfg: &RunConfig, t: &[f64], columns: &[(String, Vec<f64>)]) -> String {
    let mut header = vec!["t".to_string()];
    header.extend(columns.iter().map(|(n, _)| n.clone()));
    let rows: Vec<Vec<Cell>> = (0..t.len())
        .map(|i| {
            let mut r = vec![Cell::Real(t[i])];
            r.extend(columns.iter().map(|(_, v)| Cell::Real(v[i])));
            r
        })
        .collect();
    render_table(cfg, &header, &rows)
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<std::path::PathBuf, CliError> {
    let io = |e| CliError::Io { path: dir.display().to_string(), source: e };
    std::fs::create_dir_all(dir).map_err(io)?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Command, Overrides};

    #[test]
    fn reals_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, -2.5e17, std::f64::consts::PI, 5e-324] {
            let s = format_real(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_real(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn table_layout() {
        let cfg = RunConfig::resolve(Command::Predict, Overrides { seed: Some("0x2a".into()), ..Overrides::default() })
            .unwrap();
        let s = render_columns(&cfg, &[1.0, 2.0], &[("mean".into(), vec![0.5, 0.25])]);
        let lines: Vec<&str> = s.split('\n').collect();
        assert_eq!(lines[0], "# seed=0x000000000000002a");
        assert!(lines[1].starts_with("# config=command=predict "));
        assert_eq!(lines[2], "t,mean");
        assert_eq!(lines[3], "1.0000000000000000e0,5.0000000000000000e-1");
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[5], "");
        assert!(!s.contains('\r'));
        assert!(!s.lines().any(|l| l.ends_with(',')));
    }
}
