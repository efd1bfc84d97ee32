use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::CliError;

/// `x` with 12 significant digits, positional where that stays short.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..=11).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

pub fn open(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::input(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

pub struct Csv {
    w: Box<dyn Write>,
}

impl Csv {
    /// Writes the comment lines and the header row.
    pub fn new(mut w: Box<dyn Write>, comments: &[String], header: &[&str]) -> io::Result<Self> {
        for c in comments {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "{}", header.join(","))?;
        Ok(Self { w })
    }

    pub fn row(&mut self, values: &[f64]) -> io::Result<()> {
        let cells: Vec<String> = values.iter().map(|&v| sig12(v)).collect();
        writeln!(self.w, "{}", cells.join(","))
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.w.flush()
    }
}

/// Parses `t,K` rows, skipping `#` comments and a non-numeric header.
pub fn read_kendall_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let (mut ts, mut ks) = (Vec::new(), Vec::new());
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cells = line.split(',').map(str::trim);
        let (a, b) = (cells.next().unwrap_or(""), cells.next().unwrap_or(""));
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(t), Ok(k)) => {
                ts.push(t);
                ks.push(k);
            }
            _ if ts.is_empty() => continue,
            _ => return Err(CliError::input(format!("{}:{}: expected two numbers", path.display(), i + 1))),
        }
    }
    if ts.is_empty() {
        return Err(CliError::input(format!("{}: no data rows", path.display())));
    }
    Ok((ts, ks))
}
