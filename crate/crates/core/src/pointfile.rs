//! The on-disk point file format.
//!
//! Line 1 declares the domain: `dim=<d> box=<lo..hi,...>` for a box in R^d,
//! or `circle`. Every following non-empty line is one point: comma-separated
//! 128-bit fractions as 32-digit hexadecimal, optionally followed by
//! `# decimal,...` with human-readable coordinates. The hex fields are
//! authoritative; the decimals are a derived comment, ignored on parse, so
//! thinning outputs reproduce bit-for-bit.

use crate::error::{Result, ThinError};
use crate::point::{BoxSpec, CirclePoint, CirclePointSet, EuclideanPointSet, UnitPoint};

/// A parsed point file: a Euclidean point set with its box, or a circular
/// point set.
#[derive(Debug, Clone, PartialEq)]
pub enum PointFile {
    Box {
        bx: BoxSpec,
        points: EuclideanPointSet,
    },
    Circle { points: CirclePointSet },
}

fn parse_err(line_no: usize, msg: impl std::fmt::Display) -> ThinError {
    ThinError::Parse(format!("line {line_no}: {msg}"))
}

fn parse_hex128(field: &str, line_no: usize) -> Result<u128> {
    u128::from_str_radix(field.trim(), 16)
        .map_err(|e| parse_err(line_no, format!("bad hex fraction {field:?}: {e}")))
}

impl PointFile {
    pub fn parse(text: &str) -> Result<PointFile> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| ThinError::Parse("empty file".into()))?;
        let header = header.trim();

        let point_lines = lines.filter(|(_, l)| !l.trim().is_empty());
        if header == "circle" {
            let mut pts = Vec::new();
            for (i, line) in point_lines {
                let data = line.split('#').next().unwrap_or("").trim();
                pts.push(CirclePoint(parse_hex128(data, i + 1)?));
            }
            return Ok(PointFile::Circle {
                points: CirclePointSet::new(pts)?,
            });
        }

        let bx = parse_box_header(header)?;
        let dim = bx.dimension();
        let mut coords = Vec::new();
        for (i, line) in point_lines {
            let data = line.split('#').next().unwrap_or("").trim();
            let fields: Vec<&str> = data.split(',').collect();
            if fields.len() != dim {
                return Err(parse_err(
                    i + 1,
                    format!("expected {dim} coordinates, found {}", fields.len()),
                ));
            }
            let mut fr = Vec::with_capacity(dim);
            for f in fields {
                fr.push(UnitPoint(parse_hex128(f, i + 1)?));
            }
            coords.push(fr);
        }
        Ok(PointFile::Box {
            points: EuclideanPointSet::from_fractions(dim, coords)?,
            bx,
        })
    }

    pub fn write(&self) -> String {
        match self {
            PointFile::Circle { points } => {
                let mut out = String::from("circle\n");
                for p in points.points() {
                    out.push_str(&format!("{:032x} # {}\n", p.0, p.to_f64()));
                }
                out
            }
            PointFile::Box { bx, points } => {
                let bounds: Vec<String> = bx
                    .lower
                    .iter()
                    .zip(&bx.upper)
                    .map(|(lo, hi)| format!("{lo}..{hi}"))
                    .collect();
                let mut out = format!("dim={} box={}\n", bx.dimension(), bounds.join(","));
                let abs = points.absolute(bx);
                for (fr, a) in points.fractions().iter().zip(&abs) {
                    let hex: Vec<String> = fr.iter().map(|f| format!("{:032x}", f.0)).collect();
                    let dec: Vec<String> = a.iter().map(|x| format!("{x}")).collect();
                    out.push_str(&format!("{} # {}\n", hex.join(","), dec.join(",")));
                }
                out
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            PointFile::Box { points, .. } => points.len(),
            PointFile::Circle { points } => points.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn parse_box_header(header: &str) -> Result<BoxSpec> {
    let mut dim: Option<usize> = None;
    let mut bounds: Option<(Vec<f64>, Vec<f64>)> = None;
    for token in header.split_whitespace() {
        if let Some(v) = token.strip_prefix("dim=") {
            dim = Some(
                v.parse()
                    .map_err(|e| ThinError::Parse(format!("bad dim {v:?}: {e}")))?,
            );
        } else if let Some(v) = token.strip_prefix("box=") {
            let mut lower = Vec::new();
            let mut upper = Vec::new();
            for part in v.split(',') {
                let (lo, hi) = part.split_once("..").ok_or_else(|| {
                    ThinError::Parse(format!("bad bound {part:?}, expected lo..hi"))
                })?;
                lower.push(lo.parse().map_err(|e| {
                    ThinError::Parse(format!("bad lower bound {lo:?}: {e}"))
                })?);
                upper.push(hi.parse().map_err(|e| {
                    ThinError::Parse(format!("bad upper bound {hi:?}: {e}"))
                })?);
            }
            bounds = Some((lower, upper));
        } else {
            return Err(ThinError::Parse(format!("unknown header token {token:?}")));
        }
    }
    let dim = dim.ok_or_else(|| ThinError::Parse("header missing dim=".into()))?;
    let (lower, upper) = bounds.ok_or_else(|| ThinError::Parse("header missing box=".into()))?;
    if lower.len() != dim {
        return Err(ThinError::Parse(format!(
            "dim={dim} but box has {} bounds",
            lower.len()
        )));
    }
    BoxSpec::new(lower, upper)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_round_trip_is_bit_exact() {
        let bx = BoxSpec::new(vec![0.0, -1.5], vec![2.0, 4.0]).unwrap();
        let points = EuclideanPointSet::from_fractions(
            2,
            vec![
                vec![UnitPoint(0x0123_4567_89AB_CDEF_0011_2233_4455_6677), UnitPoint(7)],
                vec![UnitPoint(u128::MAX), UnitPoint(1 << 100)],
            ],
        )
        .unwrap();
        let pf = PointFile::Box { bx, points };
        let text = pf.write();
        let back = PointFile::parse(&text).unwrap();
        assert_eq!(back, pf);
        assert_eq!(back.write(), text);
    }

    #[test]
    fn circle_round_trip() {
        let points = CirclePointSet::new(vec![
            CirclePoint(5),
            CirclePoint(1 << 127),
            CirclePoint(0xDEAD_BEEF << 64),
        ])
        .unwrap();
        let pf = PointFile::Circle { points };
        let back = PointFile::parse(&pf.write()).unwrap();
        assert_eq!(back, pf);
    }

    #[test]
    fn decimals_are_comments_only() {
        let text = "circle\n00000000000000000000000000000005 # totally wrong decimal\n";
        let pf = PointFile::parse(text).unwrap();
        match pf {
            PointFile::Circle { points } => assert_eq!(points.points(), &[CirclePoint(5)]),
            _ => panic!("wrong domain"),
        }
    }

    #[test]
    fn empty_files_and_errors() {
        assert!(PointFile::parse("").is_err());
        let pf = PointFile::parse("circle\n").unwrap();
        assert!(pf.is_empty());

        assert!(PointFile::parse("dim=2\nff").is_err()); // missing box
        assert!(PointFile::parse("dim=1 box=0..1\nzz # x\n").is_err()); // bad hex
        assert!(PointFile::parse("dim=2 box=0..1\n").is_err()); // dim mismatch
        let err = PointFile::parse("dim=1 box=0..1\n0,0 # a\n");
        assert!(err.is_err()); // wrong coordinate count
    }

    #[test]
    fn header_with_negative_bounds() {
        let pf = PointFile::parse("dim=2 box=-1..1,-2.5..0\n").unwrap();
        match pf {
            PointFile::Box { bx, .. } => {
                assert_eq!(bx.lower, vec![-1.0, -2.5]);
                assert_eq!(bx.upper, vec![1.0, 0.0]);
            }
            _ => panic!("wrong domain"),
        }
    }
}
