//! Text format for states.
//!
//! ```text
//! # qdecouple state v1
//! kind: density
//! layout: A:2 B:2
//! 0x1p-1,0x0p+0 0x0p+0,0x0p+0 ...
//! ```
//!
//! `kind` is `density` (one matrix row per line, `re,im` pairs separated by
//! whitespace) or `pure` (one `re,im` amplitude per line). Numbers are written
//! as hexadecimal floats so reading back is bit-exact; decimal numbers are also
//! accepted on input. Lines starting with `#` and blank lines are ignored.

use std::path::Path;

use super::{hexfloat, DensityOperator, PureState};
use crate::error::{Error, Result};
use crate::tensor::{CMatrix, Factor, Operator, SubsystemLayout, C64};

#[derive(Debug, Clone, PartialEq)]
pub enum StateData {
    Density(DensityOperator),
    Pure(PureState),
}

impl StateData {
    pub fn into_density(self) -> DensityOperator {
        match self {
            StateData::Density(d) => d,
            StateData::Pure(p) => p.to_density(),
        }
    }
}

const HEADER: &str = "# qdecouple state v1";

fn encode(z: C64) -> String {
    // finite by construction of validated states
    let re = hexfloat::format(z.re).unwrap_or_else(|| "nan".into());
    let im = hexfloat::format(z.im).unwrap_or_else(|| "nan".into());
    format!("{re},{im}")
}

fn layout_line(layout: &SubsystemLayout) -> String {
    format!("layout: {layout}")
}

pub fn write_density(rho: &DensityOperator) -> String {
    let m = rho.op().entries();
    let mut out = format!("{HEADER}\nkind: density\n{}\n", layout_line(rho.layout()));
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| encode(m[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_pure(psi: &PureState) -> String {
    let mut out = format!("{HEADER}\nkind: pure\n{}\n", layout_line(psi.layout()));
    for a in psi.amplitudes() {
        out.push_str(&encode(*a));
        out.push('\n');
    }
    out
}

pub fn write_state(state: &StateData) -> String {
    match state {
        StateData::Density(d) => write_density(d),
        StateData::Pure(p) => write_pure(p),
    }
}

fn parse_number(s: &str, line: usize) -> Result<f64> {
    let t = s.trim();
    let v = if t.contains("0x") || t.contains("0X") {
        hexfloat::parse(t)
    } else {
        t.parse::<f64>().ok()
    };
    v.filter(|x| x.is_finite()).ok_or_else(|| Error::Parse {
        line,
        message: format!("bad number `{t}`"),
    })
}

fn parse_complex(s: &str, line: usize) -> Result<C64> {
    let (re, im) = s.split_once(',').ok_or_else(|| Error::Parse {
        line,
        message: format!("expected `re,im`, found `{s}`"),
    })?;
    Ok(C64::new(parse_number(re, line)?, parse_number(im, line)?))
}

fn parse_layout(text: &str, line: usize) -> Result<SubsystemLayout> {
    let mut factors = Vec::new();
    for part in text.split_whitespace() {
        let (label, dim) = part.rsplit_once(':').ok_or_else(|| Error::Parse {
            line,
            message: format!("expected `label:dim`, found `{part}`"),
        })?;
        let dim: usize = dim.parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad dimension in `{part}`"),
        })?;
        factors.push(Factor::new(label, dim));
    }
    SubsystemLayout::from_factors(factors)
}

pub fn parse_state(text: &str) -> Result<StateData> {
    let mut kind: Option<String> = None;
    let mut layout: Option<SubsystemLayout> = None;
    let mut values: Vec<Vec<C64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(k) = line.strip_prefix("kind:") {
            kind = Some(k.trim().to_string());
        } else if let Some(l) = line.strip_prefix("layout:") {
            layout = Some(parse_layout(l, line_no)?);
        } else {
            let row = line
                .split_whitespace()
                .map(|tok| parse_complex(tok, line_no))
                .collect::<Result<Vec<_>>>()?;
            values.push(row);
        }
    }
    let layout = layout.ok_or_else(|| Error::Parse {
        line: 0,
        message: "missing `layout:` line".into(),
    })?;
    let d = layout.total_dim();
    match kind.as_deref() {
        Some("density") => {
            if values.len() != d || values.iter().any(|r| r.len() != d) {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("density needs {d} rows of {d} entries"),
                });
            }
            let m = CMatrix::from_fn(d, d, |i, j| values[i][j]);
            Ok(StateData::Density(DensityOperator::new(Operator::new(layout, m)?)?))
        }
        Some("pure") => {
            let amps: Vec<C64> = values.into_iter().flatten().collect();
            Ok(StateData::Pure(PureState::new(layout, amps)?))
        }
        other => Err(Error::Parse {
            line: 0,
            message: format!("unknown or missing kind {other:?}"),
        }),
    }
}

pub fn read_state_file(path: &Path) -> Result<StateData> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_state(&text)
}

pub fn write_state_file(path: &Path, state: &StateData) -> Result<()> {
    std::fs::write(path, write_state(state)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
