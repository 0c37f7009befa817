use crate::error::{Error, Result};

/// Hexahedral mesh. Local vertex `a + 2b + 4c` of a cell maps to the
/// reference corner `(-1)^(1-a), (-1)^(1-b), (-1)^(1-c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HexMesh {
    pub vertices: Vec<[f64; 3]>,
    pub cells: Vec<[usize; 8]>,
}

impl HexMesh {
    pub fn new(vertices: Vec<[f64; 3]>, cells: Vec<[usize; 8]>) -> Result<Self> {
        for (c, cell) in cells.iter().enumerate() {
            if let Some(&v) = cell.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::Argument(format!(
                    "cell {c} references vertex {v} of {}",
                    vertices.len()
                )));
            }
        }
        Ok(HexMesh { vertices, cells })
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn cell_coordinates(&self, c: usize) -> [[f64; 3]; 8] {
        self.cells[c].map(|v| self.vertices[v])
    }
}

/// `n_cells` cubes of edge `cell_size` stacked along z.
pub fn build_bar_mesh(n_cells: usize, cell_size: f64) -> Result<HexMesh> {
    if n_cells < 1 {
        return Err(Error::Argument("a bar needs at least one cell".into()));
    }
    if !(cell_size > 0.0 && cell_size.is_finite()) {
        return Err(Error::Argument(format!("invalid cell size {cell_size}")));
    }
    let mut vertices = Vec::with_capacity(4 * (n_cells + 1));
    for k in 0..=n_cells {
        for b in 0..2 {
            for a in 0..2 {
                vertices.push([a as f64 * cell_size, b as f64 * cell_size, k as f64 * cell_size]);
            }
        }
    }
    let cells = (0..n_cells).map(|c| std::array::from_fn(|l| 4 * c + l)).collect();
    HexMesh::new(vertices, cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_cube() {
        let m = build_bar_mesh(1, 1.0).unwrap();
        assert_eq!(m.n_vertices(), 8);
        assert_eq!(m.cells[0], [0, 1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(m.vertices[7], [1.0, 1.0, 1.0]);
    }

    #[test]
    fn shared_face() {
        let m = build_bar_mesh(2, 1.0).unwrap();
        assert_eq!(m.n_vertices(), 12);
        assert_eq!(&m.cells[0][4..], &m.cells[1][..4]);
        assert_eq!(build_bar_mesh(1024, 0.5).unwrap().n_cells(), 1024);
    }

    #[test]
    fn bad_input() {
        assert!(build_bar_mesh(0, 1.0).is_err());
        assert!(HexMesh::new(vec![[0.0; 3]], vec![[0, 0, 0, 0, 0, 0, 0, 1]]).is_err());
    }
}
