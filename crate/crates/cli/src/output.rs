//! Where results go, and in what shape.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::{CliError, Format, RunConfig, VERSION};

/// JSON document wrapping `data` with the tool version and resolved config.
pub fn envelope<T: Serialize>(cfg: &RunConfig, key: &str, data: &T) -> Result<String, CliError> {
    let mut doc = serde_json::Map::new();
    doc.insert("tool".into(), "coxlab".into());
    doc.insert("version".into(), VERSION.into());
    doc.insert("config".into(), to_value(cfg)?);
    doc.insert(key.into(), to_value(data)?);
    Ok(coxlab::io::to_json_string(&doc)?)
}

pub fn to_value<T: Serialize>(v: &T) -> Result<serde_json::Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Runtime(e.to_string()))
}

/// CSV with a `#` preamble carrying the version and resolved config.
pub fn csv<T: Serialize>(cfg: &RunConfig, rows: &[T]) -> Result<String, CliError> {
    let config = serde_json::to_string(cfg).map_err(|e| CliError::Runtime(e.to_string()))?;
    let mut buf = Vec::new();
    coxlab::io::write_csv(
        &mut buf,
        &[format!("coxlab {VERSION}"), format!("config: {config}")],
        rows,
    )?;
    String::from_utf8(buf).map_err(|e| CliError::Runtime(e.to_string()))
}

pub fn table<T: Serialize>(cfg: &RunConfig, key: &str, rows: &[T]) -> Result<String, CliError> {
    match cfg.format {
        Format::Csv => csv(cfg, rows),
        Format::Json => envelope(cfg, key, &rows),
    }
}

/// Writes to `--out` if given, else stdout.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
            }
            fs::write(path, text).map_err(|e| io_err(path, e))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Runtime(e.to_string()))
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

/// Gnuplot script plotting the CSV at `data`; written next to it.
pub fn gnuplot(data: &Path, kind: Plot) -> Result<PathBuf, CliError> {
    let name = data.display().to_string().replace('\'', "''");
    let body = match kind {
        Plot::Thin => format!(
            "set xlabel 'R'\nset ylabel 'vol(thin part) / vol(P)'\nset yrange [0:1.05]\n\
             plot '{name}' using 3:4:5 with yerrorbars title 'thin ratio', \\\n     \
             '' using 3:8 with lines dashtype 2 title 'lower bound'\n"
        ),
        Plot::Tree => format!(
            "set xlabel 'n'\nset ylabel 'depth'\nset logscale x 2\n\
             plot '{name}' using 1:2 with lines title 'radius', \\\n     \
             '' using 1:3 with lines title 'min leaf depth', \\\n     \
             '' using 1:(floor(log($1)/log(2)) + 1) with lines dashtype 2 title 'floor(log2 n) + 1'\n"
        ),
        Plot::Ball => format!(
            "set xlabel 'L'\nset ylabel 'elements'\nset logscale y\n\
             plot '{name}' using 1:2 with linespoints title 'ball size'\n"
        ),
    };
    let script = format!(
        "# coxlab {VERSION}\nset datafile separator ','\nset key autotitle columnhead\n{body}"
    );
    let path = data.with_extension("gp");
    fs::write(&path, script).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

#[derive(Debug, Clone, Copy)]
pub enum Plot {
    Thin,
    Tree,
    Ball,
}
