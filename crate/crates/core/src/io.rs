//! File formats: polygon and ball JSON, family specs, R lists and CSV tables.
//!
//! Every real written by this module carries 17 significant digits, which is
//! enough to round-trip an `f64` exactly.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::error::{Error, Result};
use crate::kernel::{HPoint, IdealPoint, Isometry, LorentzVector, Vertex};
use crate::polygon::{AngleOrder, CoxeterPolygon, Polygon};
use crate::refgroup::GroupBall;
use crate::tolerance::TOL;

/// Largest vertex count accepted from a family spec or a polygon file.
pub const MAX_VERTICES: usize = 100_000;
/// Largest number of entries in an R list.
pub const MAX_R_VALUES: usize = 10_000;

/// JSON layout: objects one key per line, arrays inline unless they hold
/// objects; every float as `d.dddddddddddddddde±x`.
#[derive(Default)]
struct SigFormatter {
    stack: Vec<Frame>,
}

struct Frame {
    object: bool,
    /// Object: some key was written. Array: some element is an object.
    broken: bool,
}

impl SigFormatter {
    fn newline<W: ?Sized + Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(b"\n")?;
        for _ in 0..self.stack.len() {
            w.write_all(b"  ")?;
        }
        Ok(())
    }
}

impl Formatter for SigFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.stack.push(Frame {
            object: false,
            broken: false,
        });
        w.write_all(b"[")
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        let frame = self.stack.pop().expect("balanced");
        if frame.broken {
            self.newline(w)?;
        }
        w.write_all(b"]")
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if first {
            Ok(())
        } else {
            w.write_all(b",")
        }
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        if let Some(parent) = self.stack.last_mut().filter(|f| !f.object) {
            parent.broken = true;
            self.newline(w)?;
        }
        self.stack.push(Frame {
            object: true,
            broken: false,
        });
        w.write_all(b"{")
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        let frame = self.stack.pop().expect("balanced");
        if frame.broken {
            self.newline(w)?;
        }
        w.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        if let Some(f) = self.stack.last_mut() {
            f.broken = true;
        }
        self.newline(w)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b": ")
    }
}

/// Serializes `value` as JSON with 17 significant digits per real.
/// Non-finite reals become `null`.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFormatter::default());
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// Formats a real for CSV cells and reports.
pub fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

// ---------------------------------------------------------------- polygons

/// On-disk polygon. Vertices are listed counterclockwise as seen in the
/// Klein projection; ideal vertices are null vectors with `x0 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolygonFile {
    pub vertices: Vec<[f64; 3]>,
    pub ideal: Vec<bool>,
    /// Present for Coxeter polygons.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orders: Option<Vec<AngleOrder>>,
    /// Free-form provenance: tool version, generating config.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

/// A polygon read from a file: Coxeter when orders were given.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedPolygon {
    Coxeter(CoxeterPolygon),
    General(Polygon),
}

impl LoadedPolygon {
    pub fn polygon(&self) -> &Polygon {
        match self {
            LoadedPolygon::Coxeter(p) => p.polygon(),
            LoadedPolygon::General(p) => p,
        }
    }

    pub fn coxeter(&self) -> Option<&CoxeterPolygon> {
        match self {
            LoadedPolygon::Coxeter(p) => Some(p),
            LoadedPolygon::General(_) => None,
        }
    }
}

impl PolygonFile {
    pub fn from_polygon(p: &Polygon, orders: Option<&[AngleOrder]>) -> Self {
        PolygonFile {
            vertices: p.vertices().iter().map(|v| v.vector().to_array()).collect(),
            ideal: p.vertices().iter().map(Vertex::is_ideal).collect(),
            orders: orders.map(<[_]>::to_vec),
            meta: None,
        }
    }

    pub fn from_coxeter(p: &CoxeterPolygon) -> Self {
        Self::from_polygon(p.polygon(), Some(p.orders()))
    }

    pub fn with_meta(mut self, meta: serde_json::Value) -> Self {
        self.meta = Some(meta);
        self
    }

    /// Validates the file and builds the polygon. Nothing is repaired:
    /// off-sheet vertices, clockwise order and non-convex shapes are errors.
    pub fn load(&self) -> Result<LoadedPolygon> {
        let n = self.vertices.len();
        if n > MAX_VERTICES {
            return Err(Error::Parse(format!(
                "{n} vertices exceeds the limit of {MAX_VERTICES}"
            )));
        }
        if self.ideal.len() != n {
            return Err(Error::Parse(format!(
                "{} ideal flags for {n} vertices",
                self.ideal.len()
            )));
        }
        let vertices = self
            .vertices
            .iter()
            .zip(&self.ideal)
            .enumerate()
            .map(|(i, (&x, &ideal))| {
                let v = LorentzVector::from_array(x);
                let vertex = if ideal {
                    IdealPoint::new(v).map(Vertex::Ideal)
                } else {
                    HPoint::new(v).map(Vertex::Finite)
                };
                vertex.map_err(|e| Error::InvalidPolygon(format!("vertex {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let loaded = match &self.orders {
            Some(orders) => LoadedPolygon::Coxeter(CoxeterPolygon::new(vertices, orders.clone())?),
            None => LoadedPolygon::General(Polygon::new(vertices)?),
        };
        let p = loaded.polygon();
        if !p.is_convex() {
            return Err(Error::InvalidPolygon(
                "not convex, or not listed counterclockwise".into(),
            ));
        }
        if !(p.area() > 0.0) {
            return Err(Error::InvalidPolygon("non-positive area".into()));
        }
        Ok(loaded)
    }
}

pub fn parse_polygon_json(s: &str) -> Result<LoadedPolygon> {
    let file: PolygonFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    file.load()
}

pub fn polygon_json(
    p: &Polygon,
    orders: Option<&[AngleOrder]>,
    meta: Option<serde_json::Value>,
) -> Result<String> {
    let mut file = PolygonFile::from_polygon(p, orders);
    file.meta = meta;
    to_json_string(&file)
}

// ------------------------------------------------------------------ balls

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallElementRecord {
    pub word: Vec<usize>,
    pub matrix: [[f64; 3]; 3],
}

/// On-disk group ball. Words index the side reflections of the polygon the
/// ball was built from, and multiply left to right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallFile {
    pub n_generators: usize,
    pub basepoint: [f64; 3],
    pub elements: Vec<BallElementRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

impl BallFile {
    pub fn from_ball(ball: &GroupBall) -> Self {
        BallFile {
            n_generators: ball.generators().len(),
            basepoint: ball.basepoint().vector().to_array(),
            elements: ball
                .elements()
                .iter()
                .map(|e| BallElementRecord {
                    word: e.word.clone(),
                    matrix: e.matrix.rows(),
                })
                .collect(),
            meta: None,
        }
    }

    /// Structural checks: finite Lorentz matrices, letters in range, no
    /// letter repeated back to back.
    pub fn validate(&self) -> Result<()> {
        HPoint::new(LorentzVector::from_array(self.basepoint))
            .map_err(|e| Error::Parse(format!("basepoint: {e}")))?;
        for (i, rec) in self.elements.iter().enumerate() {
            if let Some(&s) = rec.word.iter().find(|&&s| s >= self.n_generators) {
                return Err(Error::Parse(format!(
                    "element {i}: letter {s} out of range"
                )));
            }
            if rec.word.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Parse(format!("element {i}: word is not reduced")));
            }
            if rec.matrix.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::Parse(format!(
                    "element {i}: non-finite matrix entry"
                )));
            }
            let m = Isometry::from_rows_unchecked(rec.matrix);
            if !m.is_lorentz(TOL.constructed) {
                return Err(Error::Parse(format!("element {i}: matrix is not Lorentz")));
            }
        }
        Ok(())
    }

    /// Re-evaluates every word with `generators` and compares matrices,
    /// relative to their size. Returns the worst relative discrepancy.
    pub fn verify_against(&self, generators: &[Isometry], tol: f64) -> Result<f64> {
        if generators.len() != self.n_generators {
            return Err(Error::Precondition(format!(
                "file has {} generators, polygon has {}",
                self.n_generators,
                generators.len()
            )));
        }
        self.validate()?;
        let mut worst: f64 = 0.0;
        for (i, rec) in self.elements.iter().enumerate() {
            let m = rec
                .word
                .iter()
                .fold(Isometry::IDENTITY, |acc, &s| acc.compose(&generators[s]));
            let stored = Isometry::from_rows_unchecked(rec.matrix);
            let err = m.max_entry_distance(&stored) / m.max_abs().max(1.0);
            if err > tol {
                return Err(Error::Counterexample(format!(
                    "element {i}: word {:?} evaluates {err:e} away from the stored matrix",
                    rec.word
                )));
            }
            worst = worst.max(err);
        }
        Ok(worst)
    }
}

pub fn parse_ball_json(s: &str) -> Result<BallFile> {
    let file: BallFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    file.validate()?;
    Ok(file)
}

// ---------------------------------------------------------- family specs

/// One of the built-in polygon families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum FamilySpec {
    Triangle { p: u32, q: u32, r: u32 },
    Regular { n: u32, m: u32 },
    Ideal { n: u32 },
}

impl FamilySpec {
    pub fn build(&self) -> Result<CoxeterPolygon> {
        match *self {
            FamilySpec::Triangle { p, q, r } => CoxeterPolygon::triangle(p, q, r),
            FamilySpec::Regular { n, m } => CoxeterPolygon::regular(n, m),
            FamilySpec::Ideal { n } => CoxeterPolygon::ideal_regular(n),
        }
    }

    /// Identifier usable as a file stem, e.g. `triangle-2-3-7`.
    pub fn id(&self) -> String {
        match *self {
            FamilySpec::Triangle { p, q, r } => format!("triangle-{p}-{q}-{r}"),
            FamilySpec::Regular { n, m } => format!("regular-{n}-{m}"),
            FamilySpec::Ideal { n } => format!("ideal-{n}"),
        }
    }

    /// Parses pre-split tokens such as `["triangle", "2", "3", "7"]`.
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S]) -> Result<Self> {
        let (head, args) = tokens
            .split_first()
            .ok_or_else(|| Error::Parse("empty family spec".into()))?;
        let ints = args
            .iter()
            .map(|t| {
                let t = t.as_ref();
                t.parse::<u32>().map_err(|_| {
                    Error::Parse(format!("expected a non-negative integer, got {t:?}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let arity = |k: usize| {
            if ints.len() == k {
                Ok(())
            } else {
                Err(Error::Parse(format!(
                    "{} takes {k} parameters, got {}",
                    head.as_ref(),
                    ints.len()
                )))
            }
        };
        let spec = match head.as_ref() {
            "triangle" => {
                arity(3)?;
                FamilySpec::Triangle {
                    p: ints[0],
                    q: ints[1],
                    r: ints[2],
                }
            }
            "regular" => {
                arity(2)?;
                FamilySpec::Regular {
                    n: ints[0],
                    m: ints[1],
                }
            }
            "ideal" => {
                arity(1)?;
                FamilySpec::Ideal { n: ints[0] }
            }
            other => {
                return Err(Error::Parse(format!(
                    "unknown family {other:?} (expected triangle, regular or ideal)"
                )))
            }
        };
        let n = match spec {
            FamilySpec::Triangle { .. } => 3,
            FamilySpec::Regular { n, .. } | FamilySpec::Ideal { n } => n as usize,
        };
        if n > MAX_VERTICES {
            return Err(Error::Parse(format!(
                "{n} vertices exceeds the limit of {MAX_VERTICES}"
            )));
        }
        Ok(spec)
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    /// Accepts `triangle 2 3 7`, `triangle,2,3,7` or the id form `triangle-2-3-7`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let tokens: Vec<&str> = if s.contains(|c: char| c.is_whitespace() || c == ',') {
            s.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .collect()
        } else {
            s.split('-').collect()
        };
        Self::from_tokens(&tokens)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FamilySpec::Triangle { p, q, r } => write!(f, "triangle {p} {q} {r}"),
            FamilySpec::Regular { n, m } => write!(f, "regular {n} {m}"),
            FamilySpec::Ideal { n } => write!(f, "ideal {n}"),
        }
    }
}

// ---------------------------------------------------------------- R lists

/// Parses a comma- or whitespace-separated list of non-negative, finite radii.
pub fn parse_r_list(s: &str) -> Result<Vec<f64>> {
    let values = s
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            let r: f64 = t
                .parse()
                .map_err(|_| Error::Parse(format!("not a number: {t:?}")))?;
            if !r.is_finite() || r < 0.0 {
                return Err(Error::Parse(format!(
                    "R must be finite and non-negative, got {t}"
                )));
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(Error::Parse("empty R list".into()));
    }
    if values.len() > MAX_R_VALUES {
        return Err(Error::Parse(format!("more than {MAX_R_VALUES} R values")));
    }
    Ok(values)
}

// -------------------------------------------------------------------- CSV

/// Writes `rows` as CSV. `preamble` lines are emitted first, each prefixed
/// with `# ` (gnuplot and `csv` readers with a comment char skip them).
pub fn write_csv<T: Serialize, W: Write>(mut w: W, preamble: &[String], rows: &[T]) -> Result<()> {
    for line in preamble {
        for l in line.lines() {
            writeln!(w, "# {l}")?;
        }
    }
    let mut out = csv::Writer::from_writer(w);
    for row in rows {
        out.serialize(row)
            .map_err(|e| Error::Parse(e.to_string()))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads CSV written by [`write_csv`].
pub fn read_csv<T: serde::de::DeserializeOwned, R: io::Read>(r: R) -> Result<Vec<T>> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(r)
        .deserialize()
        .map(|row| row.map_err(|e| Error::Parse(e.to_string())))
        .collect()
}
