//! The `.qcal` layout file format.
//!
//! ```text
//! qcal 1
//! # free-form comment lines
//! name xor3_v2
//! geom cell=18 pitch=20 A=2.304e-28
//! cell x=0 y=0 zone=0 kind=input label=B polarization=-1
//! cell x=60 y=20 zone=1 kind=output label=XOR
//! ```
//!
//! `geom` is optional and defaults to the standard geometry. Cell keys are
//! `x`, `y`, `zone`, `kind` (required) and `label`, `polarization`,
//! `orient` (optional). Serialization sorts cells by `(y, x)` and writes keys
//! in the order above.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::{GeometryConfig, Orientation, Point, Polarization};
use crate::layout::{Cell, ClockZone, Layout, Role};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

fn fail<T>(line: usize, message: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError {
        line,
        message: message.into(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutDocument {
    pub format_version: u32,
    pub layout: Layout,
    /// Full-line comments, without the leading `# `.
    pub comments: Vec<String>,
}

impl LayoutDocument {
    pub fn new(layout: Layout) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            layout,
            comments: Vec::new(),
        }
    }

    pub fn with_comment(mut self, text: impl Into<String>) -> Self {
        self.comments.push(text.into());
        self
    }

    /// Same document with cells in file order.
    pub fn canonical(&self) -> Self {
        Self {
            layout: self.layout.canonical(),
            ..self.clone()
        }
    }
}

fn number(line: usize, key: &str, v: &str) -> Result<f64, FormatError> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => fail(line, format!("`{key}` expects a number, got `{v}`")),
    }
}

/// Splits `k=v` tokens, rejecting unknown and repeated keys.
fn pairs<'a>(
    line: usize,
    tokens: &[&'a str],
    allowed: &[&str],
) -> Result<Vec<(&'a str, &'a str)>, FormatError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for t in tokens {
        let Some((k, v)) = t.split_once('=') else {
            return fail(line, format!("expected key=value, got `{t}`"));
        };
        if !allowed.contains(&k) {
            return fail(line, format!("unknown key `{k}`"));
        }
        if !seen.insert(k) {
            return fail(line, format!("repeated key `{k}`"));
        }
        out.push((k, v));
    }
    Ok(out)
}

fn parse_geometry(line: usize, tokens: &[&str]) -> Result<GeometryConfig, FormatError> {
    let d = GeometryConfig::default();
    let (mut width, mut pitch, mut a) = (d.cell_width, d.pitch, d.coulomb_constant);
    for (k, v) in pairs(line, tokens, &["cell", "pitch", "A"])? {
        let x = number(line, k, v)?;
        match k {
            "cell" => width = x,
            "pitch" => pitch = x,
            _ => a = x,
        }
    }
    GeometryConfig::new(width, pitch, a).or_else(|e| fail(line, e.to_string()))
}

fn parse_cell(line: usize, tokens: &[&str]) -> Result<Cell, FormatError> {
    let (mut x, mut y, mut zone, mut kind) = (None, None, None, None);
    let (mut label, mut polarization, mut orientation) = (None, None, Orientation::Normal);
    for (k, v) in pairs(
        line,
        tokens,
        &["x", "y", "zone", "kind", "label", "polarization", "orient"],
    )? {
        match k {
            "x" => x = Some(number(line, k, v)?),
            "y" => y = Some(number(line, k, v)?),
            "zone" => {
                let z: i64 = v
                    .parse()
                    .or_else(|_| fail(line, format!("bad zone `{v}`")))?;
                zone = Some(ClockZone::new(z).or_else(|e| fail(line, e.to_string()))?);
            }
            "kind" => kind = Some(v),
            "label" => {
                if v.is_empty() {
                    return fail(line, "empty label");
                }
                label = Some(v.to_string());
            }
            "polarization" => {
                polarization = Some(
                    v.parse::<Polarization>()
                        .or_else(|e| fail(line, e.to_string()))?,
                )
            }
            _ => {
                orientation = match v {
                    "norm" => Orientation::Normal,
                    "rot45" => Orientation::Rotated,
                    _ => return fail(line, format!("bad orientation `{v}`")),
                }
            }
        }
    }
    let missing = |key: &str| FormatError {
        line,
        message: format!("missing `{key}`"),
    };
    let (x, y) = (
        x.ok_or_else(|| missing("x"))?,
        y.ok_or_else(|| missing("y"))?,
    );
    let zone = zone.ok_or_else(|| missing("zone"))?;
    let role = match (kind.ok_or_else(|| missing("kind"))?, label) {
        ("normal", None) => Role::Normal,
        ("input", Some(l)) => Role::Input(l),
        ("output", Some(l)) => Role::Output(l),
        ("fixed", None) => Role::Fixed(polarization.ok_or_else(|| missing("polarization"))?),
        ("input" | "output", None) => return Err(missing("label")),
        ("normal" | "fixed", Some(_)) => {
            return fail(line, "only input and output cells take a label")
        }
        (other, _) => return fail(line, format!("unknown kind `{other}`")),
    };
    Ok(Cell {
        center: Point::new(x, y),
        orientation,
        role,
        zone,
        polarization,
    })
}

pub fn parse(text: &str) -> Result<LayoutDocument, FormatError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, l)) if l.split_whitespace().eq(["qcal", "1"]) => {}
        Some((_, l)) if l.split_whitespace().next() == Some("qcal") => {
            return fail(1, format!("unsupported version `{}`", l.trim()))
        }
        _ => return fail(1, "expected header `qcal 1`"),
    }

    let mut comments = Vec::new();
    let mut name: Option<String> = None;
    let mut geometry: Option<GeometryConfig> = None;
    let mut cells = Vec::new();
    let mut labels: HashSet<(bool, String)> = HashSet::new();

    for (n, raw) in lines {
        if let Some(c) = raw.trim_start().strip_prefix('#') {
            comments.push(c.strip_prefix(' ').unwrap_or(c).to_string());
            continue;
        }
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (keyword, rest) = content
            .split_once(char::is_whitespace)
            .unwrap_or((content, ""));
        let tokens: Vec<&str> = rest.split_whitespace().collect();
        match keyword {
            "name" => {
                if name.is_some() {
                    return fail(n, "repeated `name`");
                }
                if rest.trim().is_empty() {
                    return fail(n, "empty name");
                }
                name = Some(rest.trim().to_string());
            }
            "geom" => {
                if geometry.is_some() || !cells.is_empty() {
                    return fail(n, "`geom` must appear once, before any cell");
                }
                geometry = Some(parse_geometry(n, &tokens)?);
            }
            "cell" => {
                if name.is_none() {
                    return fail(n, "`name` must precede cells");
                }
                let cell = parse_cell(n, &tokens)?;
                if let Role::Input(l) | Role::Output(l) = &cell.role {
                    if !labels.insert((matches!(cell.role, Role::Input(_)), l.clone())) {
                        return fail(n, format!("duplicate label `{l}`"));
                    }
                }
                cells.push(cell);
            }
            other => return fail(n, format!("unknown directive `{other}`")),
        }
    }

    let name = match name {
        Some(name) => name,
        None => return fail(text.lines().count().max(1), "missing `name`"),
    };
    Ok(LayoutDocument {
        format_version: FORMAT_VERSION,
        layout: Layout {
            name,
            cells,
            geometry: geometry.unwrap_or_default(),
        },
        comments,
    })
}

pub fn serialize(doc: &LayoutDocument) -> String {
    let layout = doc.layout.canonical();
    let g = &layout.geometry;
    let mut s = format!("qcal {}\n", doc.format_version);
    for c in &doc.comments {
        if c.is_empty() {
            s.push_str("#\n");
        } else {
            let _ = writeln!(s, "# {c}");
        }
    }
    let _ = writeln!(s, "name {}", layout.name);
    let _ = writeln!(
        s,
        "geom cell={} pitch={} A={:e}",
        g.cell_width, g.pitch, g.coulomb_constant
    );
    for c in &layout.cells {
        let _ = write!(
            s,
            "cell x={} y={} zone={} kind={}",
            c.center.x,
            c.center.y,
            c.zone,
            c.role.kind()
        );
        if let Some(l) = c.role.label() {
            let _ = write!(s, " label={l}");
        }
        if let Some(p) = c.pinned().or(c.polarization) {
            let _ = write!(s, " polarization={p}");
        }
        if c.orientation == Orientation::Rotated {
            s.push_str(" orient=rot45");
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "qcal 1\n\
        # hand written\n\
        name demo gate\n\
        cell x=40 y=0 zone=1 kind=output label=Y  # trailing note\n\
        cell x=0 y=0 zone=0 kind=input label=A polarization=+1\n\
        \n\
        cell x=20 y=0 zone=0 kind=normal polarization=-1\n\
        cell x=20 y=20 zone=0 kind=fixed polarization=-1 orient=rot45\n";

    #[test]
    fn parses_sample() {
        let d = parse(SAMPLE).unwrap();
        assert_eq!(d.layout.name, "demo gate");
        assert_eq!(d.comments, vec!["hand written"]);
        assert_eq!(d.layout.len(), 4);
        assert_eq!(d.layout.cells[0].role, Role::Output("Y".into()));
        assert_eq!(d.layout.cells[3].role, Role::Fixed(Polarization::Minus));
        assert_eq!(d.layout.cells[3].orientation, Orientation::Rotated);
        assert_eq!(d.layout.geometry, GeometryConfig::default());
    }

    #[test]
    fn canonical_output() {
        let text = serialize(&parse(SAMPLE).unwrap());
        let expected = "qcal 1\n\
            # hand written\n\
            name demo gate\n\
            geom cell=18 pitch=20 A=2.304e-28\n\
            cell x=0 y=0 zone=0 kind=input label=A polarization=+1\n\
            cell x=20 y=0 zone=0 kind=normal polarization=-1\n\
            cell x=40 y=0 zone=1 kind=output label=Y\n\
            cell x=20 y=20 zone=0 kind=fixed polarization=-1 orient=rot45\n";
        assert_eq!(text, expected);
        assert_eq!(serialize(&parse(&text).unwrap()), text);
        assert_eq!(parse(&text).unwrap(), parse(SAMPLE).unwrap().canonical());
    }

    fn err(text: &str) -> FormatError {
        parse(text).unwrap_err()
    }

    #[test]
    fn zone_out_of_range() {
        let e = err("qcal 1\nname z\ncell x=0 y=0 zone=5 kind=normal\n");
        assert_eq!(e.line, 3);
        assert!(e.message.contains("zone"));
    }

    #[test]
    fn duplicate_input_label() {
        let e = err("qcal 1\nname d\ncell x=0 y=0 zone=0 kind=input label=A\ncell x=20 y=0 zone=0 kind=input label=A\n");
        assert_eq!(e.line, 4);
        assert!(e.message.contains("duplicate"));
    }

    #[test]
    fn same_label_on_input_and_output_is_allowed() {
        parse("qcal 1\nname d\ncell x=0 y=0 zone=0 kind=input label=A\ncell x=20 y=0 zone=0 kind=output label=A\n").unwrap();
    }

    #[test]
    fn rejects_malformed_lines() {
        assert_eq!(err("qcal 2\nname x\n").line, 1);
        assert_eq!(err("name x\n").line, 1);
        assert!(
            err("qcal 1\nname x\ncell x=0 y=0 zone=0 kind=normal colour=red\n")
                .message
                .contains("unknown key")
        );
        assert!(err("qcal 1\nname x\ncell x=0 x=1 y=0 zone=0 kind=normal\n")
            .message
            .contains("repeated"));
        assert!(err("qcal 1\nname x\ncell x=0 y=0 zone=0 kind=input\n")
            .message
            .contains("label"));
        assert!(err("qcal 1\nname x\ncell x=0 y=0 zone=0 kind=fixed\n")
            .message
            .contains("polarization"));
        assert!(
            err("qcal 1\nname x\ncell x=0 y=0 zone=0 kind=normal polarization=0\n")
                .message
                .contains("polarization")
        );
        assert!(err("qcal 1\nname x\ncell x=a y=0 zone=0 kind=normal\n")
            .message
            .contains("number"));
        assert!(err("qcal 1\ncell x=0 y=0 zone=0 kind=normal\n")
            .message
            .contains("name"));
        assert!(err("qcal 1\nname x\nwire 3\n")
            .message
            .contains("directive"));
        assert!(err("qcal 1\nname x\ngeom cell=18 pitch=10\n").line == 3);
    }

    #[test]
    fn geometry_line() {
        let d = parse("qcal 1\nname g\ngeom cell=18 pitch=20 A=23.04e-29\n").unwrap();
        assert_eq!(d.layout.geometry, GeometryConfig::default());
    }
}
