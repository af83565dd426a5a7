//! Text and image formats: field CSV, PGM export, tree directories and the
//! shipped input fixtures.
//!
//! A field CSV starts with one header line and then holds `rows` lines of
//! `cols` comma-separated values:
//!
//! ```text
//! # eps=01 origin=-1,-1 rows=3 cols=3 boundary=zero
//! 0,1,0
//! 0,1/2^1,0
//! 0,1,0
//! ```
//!
//! Exact fields write `num/2^k`, float fields write decimals.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsd::{Branches, NodeShape, ShearletTree};
use crate::lattice::EpsWord;
use crate::subdivision::{Boundary, SampledField};
use crate::symbol::{Dyadic, Exp, Scalar};

fn parse_pair(s: &str) -> Option<Exp> {
    let (a, b) = s.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

/// Render a field in the CSV format.
#[must_use]
pub fn field_to_csv<T: Scalar>(f: &SampledField<T>) -> String {
    let (x, y) = f.origin();
    let mut out = format!(
        "# eps={} origin={x},{y} rows={} cols={} boundary={}\n",
        f.eps(),
        f.rows(),
        f.cols(),
        f.boundary()
    );
    for row in f.to_rows() {
        out.push_str(&row.iter().map(Scalar::to_text).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

/// Parse a field from the CSV format.
///
/// ```
/// use shearsub::{io, Dyadic, SampledField};
/// let f: SampledField<Dyadic> = io::field_from_csv("# eps= origin=0,0 rows=1 cols=2 boundary=zero\n1,3/2^2\n").unwrap();
/// assert_eq!(f.get((1, 0)), Dyadic::new(3, 2));
/// assert_eq!(io::field_to_csv(&f), "# eps= origin=0,0 rows=1 cols=2 boundary=zero\n1,3/2^2\n");
/// ```
///
/// # Errors
/// [`Error::Parse`] for malformed headers or values, [`Error::ShapeMismatch`]
/// when the data disagrees with the header.
pub fn field_from_csv<T: Scalar>(text: &str) -> Result<SampledField<T>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .and_then(|l| l.trim().strip_prefix('#'))
        .ok_or_else(|| Error::Parse("field CSV must start with a '# eps=... ' header".into()))?;
    let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
    for token in header.split_whitespace() {
        let (k, v) = token.split_once('=').ok_or_else(|| Error::Parse(format!("bad header token {token:?}")))?;
        fields.insert(k, v);
    }
    let get = |k: &str| fields.get(k).copied().ok_or_else(|| Error::Parse(format!("header lacks {k}=")));
    let eps: EpsWord = get("eps")?.parse()?;
    let origin = parse_pair(get("origin")?).ok_or_else(|| Error::Parse("origin must be i,j".into()))?;
    let rows: usize = get("rows")?.parse().map_err(|_| Error::Parse("rows must be a count".into()))?;
    let cols: usize = get("cols")?.parse().map_err(|_| Error::Parse("cols must be a count".into()))?;
    let boundary: Boundary = get("boundary")?.parse()?;
    let mut values = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for line in lines {
        seen += 1;
        let row = line.split(',').map(T::from_text).collect::<Result<Vec<T>>>()?;
        if row.len() != cols {
            return Err(Error::ShapeMismatch(format!("row {seen} has {} values, header says {cols}", row.len())));
        }
        values.extend(row);
    }
    if seen != rows {
        return Err(Error::ShapeMismatch(format!("{seen} rows, header says {rows}")));
    }
    SampledField::from_parts(origin, rows, cols, values, eps, boundary)
}

/// Read a field CSV file.
///
/// # Errors
/// I/O and parse failures.
pub fn read_field<T: Scalar>(path: &Path) -> Result<SampledField<T>> {
    field_from_csv(&fs::read_to_string(path)?)
}

/// Write a field CSV file.
///
/// # Errors
/// I/O failures.
pub fn write_field<T: Scalar>(path: &Path, f: &SampledField<T>) -> Result<()> {
    Ok(fs::write(path, field_to_csv(f))?)
}

/// Binary PGM (P5) image of a field, row 0 on top.
///
/// Values map affinely from `[min, max]` to `[0, 255]`; a constant field
/// maps to 128. The comment line records `min` and `max` so that a gray
/// level `g` reads back as `min + (max - min) g / 255`.
#[must_use]
pub fn field_to_pgm<T: Scalar>(f: &SampledField<T>) -> Vec<u8> {
    let values: Vec<f64> = f.values().iter().map(|v| v.to_f64()).collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if values.is_empty() { (0.0, 0.0) } else { (lo, hi) };
    let mut out = format!("P5\n# affine min={lo:?} max={hi:?}\n{} {}\n255\n", f.cols(), f.rows()).into_bytes();
    out.extend(values.iter().map(|&v| {
        if hi > lo {
            ((v - lo) / (hi - lo) * 255.0).round().clamp(0.0, 255.0) as u8
        } else {
            128
        }
    }));
    out
}

/// The `(min, max)` recorded in a PGM produced by [`field_to_pgm`].
#[must_use]
pub fn pgm_scaling(pgm: &[u8]) -> Option<(f64, f64)> {
    let text = String::from_utf8_lossy(&pgm[..pgm.len().min(256)]);
    let line = text.lines().find_map(|l| l.strip_prefix("# affine "))?;
    let mut lo = None;
    let mut hi = None;
    for token in line.split_whitespace() {
        match token.split_once('=') {
            Some(("min", v)) => lo = v.parse().ok(),
            Some(("max", v)) => hi = v.parse().ok(),
            _ => {}
        }
    }
    Some((lo?, hi?))
}

/// Node record in a tree manifest.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ManifestNode {
    pub word: String,
    pub origin: Exp,
    pub rows: usize,
    pub cols: usize,
}

/// `manifest.json` of a tree directory.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub depth: usize,
    /// `[rows, cols]` of the input.
    pub dims: [usize; 2],
    pub boundary: String,
    /// `"full"` or the bits of the single analyzed path.
    pub branches: String,
    pub root_eps: String,
    pub nodes: Vec<ManifestNode>,
    pub scaling_files: Vec<String>,
    pub detail_files: Vec<String>,
}

/// File name of the scaling array at `word`.
#[must_use]
pub fn scaling_file_name(word: &EpsWord) -> String {
    format!("c_{word}.csv")
}

/// File name of the detail array `γ` on the edge into `word`.
#[must_use]
pub fn detail_file_name(word: &EpsWord, g: Exp) -> String {
    format!("d_{word}_{}-{}.csv", g.0, g.1)
}

fn parse_detail_name(name: &str) -> Option<(EpsWord, Exp)> {
    let rest = name.strip_prefix("d_")?.strip_suffix(".csv")?;
    let (word, g) = rest.split_once('_')?;
    let (g1, g2) = g.split_once('-')?;
    Some((word.parse().ok()?, (g1.parse().ok()?, g2.parse().ok()?)))
}

/// Write a tree as `manifest.json` plus one CSV per array.
///
/// # Errors
/// I/O failures.
pub fn write_tree<T: Scalar>(dir: &Path, tree: &ShearletTree<T>) -> Result<()> {
    fs::create_dir_all(dir)?;
    let root = tree.shapes.get(&EpsWord::empty()).copied().unwrap_or(NodeShape { origin: (0, 0), rows: 0, cols: 0 });
    let mut manifest = Manifest {
        depth: tree.depth,
        dims: [root.rows, root.cols],
        boundary: tree.boundary.to_string(),
        branches: match &tree.branches {
            Branches::Full => "full".into(),
            Branches::Path(p) => p.to_string(),
        },
        root_eps: tree.root_eps.to_string(),
        nodes: tree
            .shapes
            .iter()
            .map(|(w, s)| ManifestNode { word: w.to_string(), origin: s.origin, rows: s.rows, cols: s.cols })
            .collect(),
        scaling_files: Vec::new(),
        detail_files: Vec::new(),
    };
    for (w, c) in &tree.scaling {
        let name = scaling_file_name(w);
        write_field(&dir.join(&name), c)?;
        manifest.scaling_files.push(name);
    }
    for ((w, g), d) in &tree.details {
        let name = detail_file_name(w, *g);
        write_field(&dir.join(&name), d)?;
        manifest.detail_files.push(name);
    }
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(())
}

/// Read a tree written by [`write_tree`].
///
/// # Errors
/// I/O and parse failures; [`Error::Parse`] for inconsistent manifests.
pub fn read_tree<T: Scalar>(dir: &Path) -> Result<ShearletTree<T>> {
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
    let branches = if manifest.branches == "full" {
        Branches::Full
    } else {
        Branches::Path(manifest.branches.parse()?)
    };
    let mut tree = ShearletTree {
        depth: manifest.depth,
        boundary: manifest.boundary.parse()?,
        branches,
        scaling: BTreeMap::new(),
        details: BTreeMap::new(),
        shapes: BTreeMap::new(),
        root_eps: manifest.root_eps.parse()?,
    };
    for n in &manifest.nodes {
        tree.shapes.insert(n.word.parse()?, NodeShape { origin: n.origin, rows: n.rows, cols: n.cols });
    }
    for name in &manifest.scaling_files {
        let word: EpsWord = name
            .strip_prefix("c_")
            .and_then(|r| r.strip_suffix(".csv"))
            .ok_or_else(|| Error::Parse(format!("bad scaling file name {name:?}")))?
            .parse()?;
        tree.scaling.insert(word, read_field(&dir.join(name))?);
    }
    for name in &manifest.detail_files {
        let key = parse_detail_name(name).ok_or_else(|| Error::Parse(format!("bad detail file name {name:?}")))?;
        tree.details.insert(key, read_field(&dir.join(name))?);
    }
    Ok(tree)
}

fn dyadic_rows(rows: &[&[(i128, u32)]]) -> Vec<Vec<Dyadic>> {
    rows.iter().map(|r| r.iter().map(|&(n, k)| Dyadic::new(n, k)).collect()).collect()
}

/// The 3×3 vertical line, centered at index `0`.
#[must_use]
pub fn fixture_c1() -> SampledField<Dyadic> {
    let row: &[(i128, u32)] = &[(0, 0), (1, 0), (0, 0)];
    SampledField::from_rows((-1, -1), dyadic_rows(&[row, row, row])).expect("rectangular fixture")
}

/// The 5×5 cross with offset half-height arms, centered at index `0`.
#[must_use]
pub fn fixture_c2() -> SampledField<Dyadic> {
    let upper: &[(i128, u32)] = &[(0, 0), (1, 1), (0, 0), (0, 0), (0, 0)];
    let middle: &[(i128, u32)] = &[(1, 0); 5];
    let lower: &[(i128, u32)] = &[(0, 0), (0, 0), (0, 0), (1, 1), (0, 0)];
    SampledField::from_rows((-2, -2), dyadic_rows(&[upper, upper, middle, lower, lower])).expect("rectangular fixture")
}

/// A 9×9 array with a single one at the center index `0`.
#[must_use]
pub fn fixture_delta() -> SampledField<Dyadic> {
    SampledField::delta(4)
}

/// Fixture by name: `c1`, `c2` or `delta`.
#[must_use]
pub fn fixture(name: &str) -> Option<SampledField<Dyadic>> {
    match name {
        "c1" => Some(fixture_c1()),
        "c2" => Some(fixture_c2()),
        "delta" => Some(fixture_delta()),
        _ => None,
    }
}
