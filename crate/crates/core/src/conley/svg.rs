//! SVG rendering of planar grids with N, L and Inv shading.

use std::fmt::Write;

use super::grid::{CellSet, Grid};
use super::ConleyError;

const CELL_PX: f64 = 8.0;

/// Layers are drawn in order; later layers paint over earlier ones.
pub fn render(grid: &Grid, layers: &[(&CellSet, &str)]) -> Result<String, ConleyError> {
    if grid.dim() != 2 {
        return Err(ConleyError::BadGrid("SVG output needs a planar grid".into()));
    }
    let res = grid.resolution();
    let (w, h) = (res[0] as f64 * CELL_PX, res[1] as f64 * CELL_PX);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(out, r##"<rect width="{w}" height="{h}" fill="#ffffff" stroke="#000000"/>"##);
    for (set, colour) in layers {
        for c in set.iter() {
            let k = grid.coords(c);
            let x = k[0] as f64 * CELL_PX;
            let y = h - (k[1] as f64 + 1.0) * CELL_PX;
            let _ = writeln!(out, r#"<rect x="{x}" y="{y}" width="{CELL_PX}" height="{CELL_PX}" fill="{colour}"/>"#);
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// N in light grey, L in orange, Inv X in dark blue.
pub fn render_index_pair(grid: &Grid, n: &CellSet, l: &CellSet, inv: &CellSet) -> Result<String, ConleyError> {
    render(grid, &[(n, "#c8c8c8"), (l, "#f0a030"), (inv, "#203080")])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_cells() {
        let g = Grid::cube(2, 1.0, 4).unwrap();
        let s: CellSet = [0, 5].into_iter().collect();
        let svg = render_index_pair(&g, &s, &CellSet::new(), &CellSet::new()).unwrap();
        assert_eq!(svg.matches("<rect").count(), 3);
        assert!(render(&Grid::cube(1, 1.0, 4).unwrap(), &[]).is_err());
    }
}
