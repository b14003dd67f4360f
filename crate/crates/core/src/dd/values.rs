use num_complex::Complex64;
use rustc_hash::FxHashMap;

use super::{Weight, TOLERANCE};

/// Interning table for edge weights.
///
/// The complex plane is cut into square buckets of width [`TOLERANCE`]. A
/// bucket holds at most one representative, since two values in the same
/// bucket already compare equal. A lookup probes the value's own bucket and
/// its eight neighbours, so any value within tolerance of an existing
/// representative resolves to that representative.
#[derive(Debug)]
pub(crate) struct ValueTable {
    values: Vec<Complex64>,
    buckets: FxHashMap<(i64, i64), u32>,
}

const NEIGHBOURS: [(i64, i64); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

fn key(v: Complex64) -> (i64, i64) {
    (
        (v.re / TOLERANCE).floor() as i64,
        (v.im / TOLERANCE).floor() as i64,
    )
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a.re - b.re).abs() <= TOLERANCE && (a.im - b.im).abs() <= TOLERANCE
}

impl ValueTable {
    pub(crate) fn new() -> Self {
        let mut t = ValueTable {
            values: Vec::new(),
            buckets: FxHashMap::default(),
        };
        let zero = t.insert_new(Complex64::new(0.0, 0.0));
        let one = t.insert_new(Complex64::new(1.0, 0.0));
        debug_assert_eq!((zero, one), (Weight::ZERO, Weight::ONE));
        t
    }

    fn insert_new(&mut self, v: Complex64) -> Weight {
        let id = self.values.len() as u32;
        self.values.push(v);
        self.buckets.insert(key(v), id);
        Weight(id)
    }

    #[inline]
    pub(crate) fn get(&self, w: Weight) -> Complex64 {
        self.values[w.0 as usize]
    }

    pub(crate) fn len(&self) -> usize {
        self.values.len()
    }

    pub(crate) fn intern(&mut self, v: Complex64) -> Weight {
        assert!(
            v.re.is_finite() && v.im.is_finite(),
            "non-finite edge weight {v}"
        );
        if v.re.abs() <= TOLERANCE && v.im.abs() <= TOLERANCE {
            return Weight::ZERO;
        }
        if close(v, Complex64::new(1.0, 0.0)) {
            return Weight::ONE;
        }
        let (kr, ki) = key(v);
        if let Some(&id) = self.buckets.get(&(kr, ki)) {
            if close(self.values[id as usize], v) {
                return Weight(id);
            }
        }
        for (dr, di) in NEIGHBOURS {
            if let Some(&id) = self.buckets.get(&(kr + dr, ki + di)) {
                if close(self.values[id as usize], v) {
                    return Weight(id);
                }
            }
        }
        self.insert_new(v)
    }
}
