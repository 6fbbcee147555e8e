//! Pegasus adjacency in the standard-shift segment geometry, with nice coordinates.

use std::collections::{BTreeSet, HashMap};

/// Qubit in Pegasus coordinates `(u, w, k, z)`: orientation, perpendicular
/// offset, track within the tile, parallel offset.
pub type PegasusQubit = (usize, usize, usize, usize);

const VERTICAL_OFFSETS: [usize; 12] = [2, 2, 2, 2, 10, 10, 10, 10, 6, 6, 6, 6];
const HORIZONTAL_OFFSETS: [usize; 12] = [6, 6, 6, 6, 2, 2, 2, 2, 10, 10, 10, 10];

#[derive(Clone, Debug)]
pub struct PegasusNiceModel {
    pub size: usize,
    /// Whether the pair couplers `(u,w,2j,z)-(u,w,2j+1,z)` exist.
    pub odd_couplers: bool,
}

impl PegasusNiceModel {
    pub fn standard(size: usize) -> Self {
        PegasusNiceModel { size, odd_couplers: true }
    }

    pub fn qubits(&self) -> Vec<PegasusQubit> {
        let m = self.size;
        let mut out = Vec::new();
        for u in 0..2 {
            for w in 0..m {
                for k in 0..12 {
                    for z in 0..m.saturating_sub(1) {
                        out.push((u, w, k, z));
                    }
                }
            }
        }
        out
    }

    fn contains(&self, q: PegasusQubit) -> bool {
        let m = self.size;
        q.0 < 2 && q.1 < m && q.2 < 12 && q.3 + 1 < m
    }

    /// Segment of a qubit: fixed line coordinate and the inclusive span along it.
    fn segment(q: PegasusQubit) -> (usize, usize, usize) {
        let (u, w, k, z) = q;
        let offset = if u == 0 { VERTICAL_OFFSETS[k] } else { HORIZONTAL_OFFSETS[k] };
        let start = 12 * z + offset;
        (12 * w + k, start, start + 11)
    }

    pub fn adjacent(&self, a: PegasusQubit, b: PegasusQubit) -> bool {
        if a == b || !self.contains(a) || !self.contains(b) {
            return false;
        }
        if a.0 != b.0 {
            let (vert, horiz) = if a.0 == 0 { (a, b) } else { (b, a) };
            let (vx, vy0, vy1) = Self::segment(vert);
            let (hy, hx0, hx1) = Self::segment(horiz);
            return (hx0..=hx1).contains(&vx) && (vy0..=vy1).contains(&hy);
        }
        if a.1 != b.1 {
            return false;
        }
        if a.2 == b.2 {
            return a.3.abs_diff(b.3) == 1;
        }
        self.odd_couplers && a.3 == b.3 && a.2 / 2 == b.2 / 2
    }

    /// Converts nice coordinates `(t, y, x, u, k)` to Pegasus coordinates.
    pub fn nice_to_pegasus(t: usize, y: usize, x: usize, u: usize, k: usize) -> PegasusQubit {
        match t {
            0 => (u, if u == 1 { y + 1 } else { x }, 4 + k, if u == 1 { x } else { y }),
            1 => (u, if u == 1 { y + 1 } else { x + 1 }, if u == 1 { k } else { 8 + k }, if u == 1 { x } else { y }),
            _ => (u, if u == 1 { y + 1 } else { x + 1 }, if u == 1 { 8 + k } else { k }, if u == 1 { x + 1 } else { y }),
        }
    }

    /// Whether some `t = 0` nice cell induces exactly the augmented Chimera cell:
    /// `K_{4,4}` between the two orientations plus pairs `(0,1)`, `(2,3)` on each side.
    pub fn contains_augmented_cell(&self) -> bool {
        if self.size < 2 {
            return false;
        }
        let expected = augmented_cell_edges();
        for y in 0..self.size - 1 {
            for x in 0..self.size - 1 {
                let mut local: HashMap<PegasusQubit, (usize, usize)> = HashMap::new();
                for u in 0..2 {
                    for k in 0..4 {
                        local.insert(Self::nice_to_pegasus(0, y, x, u, k), (u, k));
                    }
                }
                if local.len() != 8 || !local.keys().all(|&q| self.contains(q)) {
                    continue;
                }
                let qs: Vec<_> = local.keys().copied().collect();
                let mut induced = BTreeSet::new();
                for (i, &a) in qs.iter().enumerate() {
                    for &b in &qs[i + 1..] {
                        if self.adjacent(a, b) {
                            let (la, lb) = (local[&a], local[&b]);
                            induced.insert((la.min(lb), la.max(lb)));
                        }
                    }
                }
                if induced == expected {
                    return true;
                }
            }
        }
        false
    }
}

/// Edge list of the augmented unit cell over local labels `(orientation, index)`.
fn augmented_cell_edges() -> BTreeSet<((usize, usize), (usize, usize))> {
    let mut out = BTreeSet::new();
    for a in 0..4 {
        for b in 0..4 {
            out.insert(((0, a), (1, b)));
        }
    }
    for u in 0..2 {
        out.insert(((u, 0), (u, 1)));
        out.insert(((u, 2), (u, 3)));
    }
    out
}

pub fn pegasus_contains_augmented_cell(model: &PegasusNiceModel) -> bool {
    model.contains_augmented_cell()
}
