//! CSV dumps of generated families, one row per object.
//!
//! The first column names the family the object belongs to; the remaining
//! columns depend on the object kind:
//!
//! | kind       | columns                      |
//! |------------|------------------------------|
//! | tubes      | `x,y,t,a,b,delta`            |
//! | quadratics | `a,b,c`                      |
//! | rectangles | `a,b,c,lo,hi,delta`          |
//!
//! Floats are written in shortest round-trip form, so a reload is exact.

use std::io::{Read, Write};

use hkakeya::constructions;
use hkakeya::tube::TubeFamily;
use hkakeya::{CurviRect, HDirection, HPoint, HTube, Interval, Quadratic};
use thiserror::Error;

use crate::config::Config;

#[derive(Debug, Clone, PartialEq)]
pub enum Objects {
    Tubes(Vec<HTube>),
    Quadratics(Vec<Quadratic>),
    Rects(Vec<CurviRect>),
}

impl Objects {
    pub fn len(&self) -> usize {
        match self {
            Objects::Tubes(v) => v.len(),
            Objects::Quadratics(v) => v.len(),
            Objects::Rects(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn kind(&self) -> Kind {
        match self {
            Objects::Tubes(_) => Kind::Tubes,
            Objects::Quadratics(_) => Kind::Quadratics,
            Objects::Rects(_) => Kind::Rects,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedFamily {
    pub name: String,
    pub objects: Objects,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Tubes,
    Quadratics,
    Rects,
}

impl Kind {
    fn header(self) -> &'static [&'static str] {
        match self {
            Kind::Tubes => &["family", "x", "y", "t", "a", "b", "delta"],
            Kind::Quadratics => &["family", "a", "b", "c"],
            Kind::Rects => &["family", "a", "b", "c", "lo", "hi", "delta"],
        }
    }

    fn from_header(h: &csv::StringRecord) -> Option<Kind> {
        [Kind::Tubes, Kind::Quadratics, Kind::Rects].into_iter().find(|k| h.iter().eq(k.header().iter().copied()))
    }
}

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("families of different kinds cannot share one dump")]
    MixedKinds,
    #[error("unrecognised header `{0}`")]
    Header(String),
    #[error("row {row}: {reason}")]
    Row { row: usize, reason: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] hkakeya::Error),
}

/// Generators accepted by [`generate`].
pub const GENERATORS: [&str; 6] = ["bush", "opposed-pair", "bipartite-balls", "clamshell", "clamshell-rects", "parabolic-net"];

pub fn write_families<W: Write>(out: W, families: &[NamedFamily]) -> Result<(), DumpError> {
    let kind = families.first().map(|f| f.objects.kind()).unwrap_or(Kind::Quadratics);
    if families.iter().any(|f| f.objects.kind() != kind) {
        return Err(DumpError::MixedKinds);
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(kind.header())?;
    for fam in families {
        let name = fam.name.as_str();
        match &fam.objects {
            Objects::Tubes(v) => {
                for t in v {
                    let c = t.center;
                    w.write_record([name, &num(c.x), &num(c.y), &num(c.t), &num(t.dir.a()), &num(t.dir.b()), &num(t.delta)])?;
                }
            }
            Objects::Quadratics(v) => {
                for q in v {
                    w.write_record([name, &num(q.a), &num(q.b), &num(q.c)])?;
                }
            }
            Objects::Rects(v) => {
                for r in v {
                    let q = r.center;
                    w.write_record([
                        name,
                        &num(q.a),
                        &num(q.b),
                        &num(q.c),
                        &num(r.base.lo),
                        &num(r.base.hi),
                        &num(r.thickness),
                    ])?;
                }
            }
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn num(v: f64) -> String {
    v.to_string()
}

/// Reads a dump back; families keep their first-appearance order.
pub fn read_families<R: Read>(input: R) -> Result<Vec<NamedFamily>, DumpError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    let kind = Kind::from_header(&header).ok_or_else(|| DumpError::Header(header.iter().collect::<Vec<_>>().join(",")))?;
    let mut out: Vec<NamedFamily> = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let vals: Vec<f64> = rec
            .iter()
            .skip(1)
            .map(|s| s.parse::<f64>().map_err(|_| DumpError::Row { row, reason: format!("`{s}` is not a number") }))
            .collect::<Result<_, _>>()?;
        let name = rec.get(0).unwrap_or_default();
        if out.last().map(|f| f.name.as_str()) != Some(name) {
            let objects = match kind {
                Kind::Tubes => Objects::Tubes(Vec::new()),
                Kind::Quadratics => Objects::Quadratics(Vec::new()),
                Kind::Rects => Objects::Rects(Vec::new()),
            };
            out.push(NamedFamily { name: name.to_string(), objects });
        }
        match &mut out.last_mut().expect("pushed above").objects {
            Objects::Tubes(v) => {
                let dir = HDirection::new(vals[3], vals[4])?;
                v.push(HTube::new(HPoint::new(vals[0], vals[1], vals[2]), dir, vals[5])?);
            }
            Objects::Quadratics(v) => v.push(Quadratic::new(vals[0], vals[1], vals[2])),
            Objects::Rects(v) => {
                if !(vals[3] <= vals[4]) || !(vals[5] > 0.0) {
                    return Err(DumpError::Row { row, reason: "rectangle needs lo <= hi and delta > 0".into() });
                }
                v.push(CurviRect::new(Quadratic::new(vals[0], vals[1], vals[2]), Interval::new(vals[3], vals[4]), vals[5]));
            }
        }
    }
    Ok(out)
}

fn delta_of(cfg: &Config, default_exp: u32) -> f64 {
    cfg.ladder((default_exp, default_exp))[0]
}

/// Builds the named family with parameters from `cfg` (first rung of the
/// ladder is δ).
pub fn generate(generator: &str, cfg: &Config) -> Result<Option<Vec<NamedFamily>>, hkakeya::Error> {
    let fam = |name: &str, objects| NamedFamily { name: name.to_string(), objects };
    Ok(Some(match generator {
        "bush" => {
            let (t1, t2) = constructions::build_bush(delta_of(cfg, 8))?;
            vec![fam("T1", Objects::Tubes(t1)), fam("T2", Objects::Tubes(t2))]
        }
        "opposed-pair" => {
            let pair = constructions::build_opposed_pair(delta_of(cfg, 8), cfg.rho.unwrap_or(1.0))?;
            vec![fam("F", Objects::Quadratics(pair.f)), fam("G", Objects::Quadratics(pair.g))]
        }
        "bipartite-balls" => {
            let pair = constructions::build_bipartite_balls(delta_of(cfg, 5), cfg.rho.unwrap_or(0.25))?;
            vec![fam("F", Objects::Quadratics(pair.f)), fam("G", Objects::Quadratics(pair.g))]
        }
        "clamshell" | "clamshell-rects" => {
            let c = clamshell_from(cfg)?;
            if generator == "clamshell" {
                vec![fam("F", Objects::Quadratics(c.f)), fam("G", Objects::Quadratics(c.g))]
            } else {
                vec![fam("stacks", Objects::Rects(c.stacks)), fam("pieces", Objects::Rects(c.rects))]
            }
        }
        "parabolic-net" => {
            let (x, y) = constructions::build_parabolic_net(delta_of(cfg, 4))?;
            debug_assert_eq!(x.to_tubes().len(), x.count());
            vec![fam("X", Objects::Tubes(x.to_tubes())), fam("Y", Objects::Tubes(y.to_tubes()))]
        }
        _ => return Ok(None),
    }))
}

/// Clamshell parameters with the defaults `(2⁻⁸, 2⁻⁴, 16, 4, 256)`.
pub fn clamshell_from(cfg: &Config) -> Result<constructions::Clamshell, hkakeya::Error> {
    constructions::build_clamshell(
        delta_of(cfg, 8),
        cfg.t.unwrap_or(1.0 / 16.0),
        cfg.mu.unwrap_or(16),
        cfg.nu.unwrap_or(4),
        cfg.n.unwrap_or(256),
    )
}
