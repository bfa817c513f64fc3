//! Size limits shared by the brute-force routines.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest |D| for which a class group is enumerated.
    pub class_group: u64,
    /// Largest number of ring elements ell^(2d) in the unit-group oracle.
    pub unit_ring: u64,
    /// Largest field size p^k.
    pub field: u64,
    /// Largest |D_K| in heuristic scans.
    pub scan: u64,
    /// Largest |D_0| searched when enumerating compatible orders without a finite bound.
    pub compatible_search: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            class_group: 10_000_000,
            unit_ring: 20_000_000,
            field: 200_000,
            scan: 1_000_000,
            compatible_search: 5_000,
        }
    }
}
