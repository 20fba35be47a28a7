//! Minimal reader for triangle-surface OFF files.

use std::path::Path;

use super::{MeshError, SimplicialComplex};

/// Parses OFF text. Only triangular faces are accepted.
pub fn parse_off(text: &str) -> Result<SimplicialComplex, MeshError> {
    let tokens: Vec<&str> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
        .collect();
    if tokens.first() != Some(&"OFF") {
        return Err(MeshError::Parse(format!("expected OFF header, found {:?}", tokens.first())));
    }
    let mut cursor = Cursor { tokens: &tokens, pos: 1 };
    let nv: usize = cursor.next("vertex count")?;
    let nf: usize = cursor.next("face count")?;
    let _ne: usize = cursor.next("edge count")?;
    let mut positions = Vec::with_capacity(nv);
    for _ in 0..nv {
        positions.push([cursor.next("x")?, cursor.next("y")?, cursor.next("z")?]);
    }
    let mut faces = Vec::with_capacity(nf);
    for f in 0..nf {
        let k: usize = cursor.next("face size")?;
        if k != 3 {
            return Err(MeshError::Parse(format!("face {f} has {k} vertices, only triangles are supported")));
        }
        let tri: Vec<usize> = vec![cursor.next("index")?, cursor.next("index")?, cursor.next("index")?];
        if tri.iter().any(|&v| v >= nv) {
            return Err(MeshError::Parse(format!("face {f} references a missing vertex")));
        }
        faces.push(tri);
    }
    SimplicialComplex::build_with_positions(&faces, &positions)
}

struct Cursor<'a> {
    tokens: &'a [&'a str],
    pos: usize,
}

impl Cursor<'_> {
    fn next<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, MeshError>
    where
        T::Err: std::fmt::Display,
    {
        let t = self.tokens.get(self.pos).ok_or_else(|| MeshError::Parse(format!("truncated input: missing {what}")))?;
        self.pos += 1;
        t.parse::<T>().map_err(|e| MeshError::Parse(format!("{what}: {e}")))
    }
}

pub fn read_off(path: &Path) -> Result<SimplicialComplex, MeshError> {
    let text = std::fs::read_to_string(path).map_err(|e| MeshError::Io(e.to_string()))?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("off").to_string();
    Ok(parse_off(&text)?.with_name(name))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_a_square() {
        let text = "OFF\n4 2 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n3 0 1 2\n3 0 2 3\n";
        let m = parse_off(text).unwrap();
        assert_eq!(m.count(2), 2);
        assert_eq!(m.count(1), 5);
        assert!(m.geometry().is_some());
    }

    #[test]
    fn rejects_quads() {
        let text = "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
        assert!(matches!(parse_off(text), Err(MeshError::Parse(_))));
    }

    #[test]
    fn rejects_missing_header() {
        assert!(matches!(parse_off("3 1 0"), Err(MeshError::Parse(_))));
    }
}
