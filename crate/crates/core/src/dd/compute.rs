use std::hash::{Hash, Hasher};

use rustc_hash::FxHasher;

/// Fixed-size, direct-mapped memo table. A colliding insert overwrites.
#[derive(Debug)]
pub(crate) struct ComputeTable<K, V> {
    slots: Vec<Option<(K, V)>>,
    mask: usize,
    enabled: bool,
    pub(crate) hits: u64,
    pub(crate) lookups: u64,
}

impl<K: Copy + Eq + Hash, V: Copy> ComputeTable<K, V> {
    pub(crate) fn new(bits: u32, enabled: bool) -> Self {
        let size = if enabled { 1usize << bits } else { 1 };
        ComputeTable {
            slots: vec![None; size],
            mask: size - 1,
            enabled,
            hits: 0,
            lookups: 0,
        }
    }

    fn slot(&self, key: &K) -> usize {
        let mut h = FxHasher::default();
        key.hash(&mut h);
        let x = h.finish();
        ((x ^ (x >> 29)) as usize) & self.mask
    }

    #[inline]
    pub(crate) fn get(&mut self, key: &K) -> Option<V> {
        if !self.enabled {
            return None;
        }
        self.lookups += 1;
        match &self.slots[self.slot(key)] {
            Some((k, v)) if k == key => {
                self.hits += 1;
                Some(*v)
            }
            _ => None,
        }
    }

    #[inline]
    pub(crate) fn insert(&mut self, key: K, value: V) {
        if self.enabled {
            let i = self.slot(&key);
            self.slots[i] = Some((key, value));
        }
    }

    pub(crate) fn clear(&mut self) {
        self.slots.iter_mut().for_each(|s| *s = None);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overwrite_on_collision_and_disable() {
        let mut t: ComputeTable<u32, u32> = ComputeTable::new(1, true);
        for k in 0..16 {
            t.insert(k, k * 10);
        }
        let present = (0..16).filter(|k| t.get(k) == Some(k * 10)).count();
        assert!(present <= 2);
        t.clear();
        assert!((0..16).all(|k| t.get(&k).is_none()));

        let mut off: ComputeTable<u32, u32> = ComputeTable::new(8, false);
        off.insert(1, 2);
        assert_eq!(off.get(&1), None);
    }
}
