//! Text formats: sample lists, scalar fields, poses, planar points, tour
//! files and OBJ polylines. Every input format accepts `#` comments and
//! blank lines.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mesh::Point3;
use crate::metric::RigidMotionSample;

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn parse_row<T: FromStr>(path: &Path, line: usize, text: &str, want: usize) -> Result<Vec<T>> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != want {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("expected {want} values, found {}", fields.len()),
        });
    }
    fields
        .iter()
        .map(|f| {
            f.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("cannot parse {f:?}"),
            })
        })
        .collect()
}

fn parse_rows<T: FromStr>(path: &Path, text: &str, want: usize) -> Result<Vec<Vec<T>>> {
    content_lines(text).map(|(line, l)| parse_row(path, line, l, want)).collect()
}

/// One non-negative integer index per line.
pub fn parse_indices(path: &Path, text: &str) -> Result<Vec<usize>> {
    Ok(parse_rows(path, text, 1)?.into_iter().map(|r| r[0]).collect())
}

/// One finite float per line.
pub fn parse_scalars(path: &Path, text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (line, l) in content_lines(text) {
        let v: f64 = parse_row(path, line, l, 1)?[0];
        if !v.is_finite() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: "value is not finite".into(),
            });
        }
        out.push(v);
    }
    Ok(out)
}

/// `x y` per line.
pub fn parse_points2(path: &Path, text: &str) -> Result<Vec<[f64; 2]>> {
    Ok(parse_rows::<f64>(path, text, 2)?.into_iter().map(|r| [r[0], r[1]]).collect())
}

/// `qw qx qy qz tx ty tz` per line; quaternions are canonicalised.
pub fn parse_poses(path: &Path, text: &str) -> Result<Vec<RigidMotionSample>> {
    content_lines(text)
        .map(|(line, l)| {
            let r: Vec<f64> = parse_row(path, line, l, 7)?;
            RigidMotionSample::new([r[0], r[1], r[2], r[3]], [r[4], r[5], r[6]]).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn read_indices(path: &Path) -> Result<Vec<usize>> {
    parse_indices(path, &read_text(path)?)
}

pub fn read_scalars(path: &Path) -> Result<Vec<f64>> {
    parse_scalars(path, &read_text(path)?)
}

pub fn read_points2(path: &Path) -> Result<Vec<[f64; 2]>> {
    parse_points2(path, &read_text(path)?)
}

pub fn read_poses(path: &Path) -> Result<Vec<RigidMotionSample>> {
    parse_poses(path, &read_text(path)?)
}

pub fn format_indices(indices: &[usize]) -> String {
    let mut s = String::new();
    for i in indices {
        let _ = writeln!(s, "{i}");
    }
    s
}

pub fn format_points2(points: &[[f64; 2]]) -> String {
    let mut s = String::new();
    for p in points {
        let _ = writeln!(s, "{} {}", p[0], p[1]);
    }
    s
}

/// Tour file: one index per line, tours separated by a blank line.
pub fn format_tours(tours: &[Vec<usize>]) -> String {
    tours.iter().map(|t| format_indices(t)).collect::<Vec<_>>().join("\n")
}

/// Inverse of [`format_tours`].
pub fn parse_tours(path: &Path, text: &str) -> Result<Vec<Vec<usize>>> {
    let mut tours = Vec::new();
    let mut current = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let l = line.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            if !current.is_empty() {
                tours.push(std::mem::take(&mut current));
            }
            continue;
        }
        current.push(parse_row::<usize>(path, i + 1, l, 1)?[0]);
    }
    if !current.is_empty() {
        tours.push(current);
    }
    Ok(tours)
}

/// OBJ file with one `l` element per polyline.
pub fn polylines_to_obj(polylines: &[Vec<Point3>]) -> String {
    let mut s = String::new();
    for line in polylines {
        for p in line {
            let _ = writeln!(s, "v {} {} {}", p[0], p[1], p[2]);
        }
    }
    let mut base = 1;
    for line in polylines {
        if line.len() >= 2 {
            s.push('l');
            for k in 0..line.len() {
                let _ = write!(s, " {}", base + k);
            }
            s.push('\n');
        }
        base += line.len();
    }
    s
}
