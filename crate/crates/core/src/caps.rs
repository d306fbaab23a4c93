//! Enumeration caps.
//!
//! Every brute-force routine checks its worst-case work against one of these
//! limits before starting and returns [`crate::Error::CapExceeded`] instead of
//! truncating.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Caps {
    /// Largest point set accepted by the definitional 2d-tuple energy oracle.
    pub bruteforce_points: usize,
    /// Largest number of k-subsets enumerated by local-property scans.
    pub subsets: u128,
    /// Largest number of index tuples enumerated by the set-intersection witness
    /// and by the disjoint-pair enumeration behind `E_d*`.
    pub tuples: u128,
    /// Largest number of point/curve evaluations in incidence counting.
    pub evaluations: u128,
    /// Largest number of curves in a translated curve family.
    pub family: u128,
    /// Largest product of structure-set sizes in translation-symmetry search.
    pub structure: u128,
    /// Largest total degree accepted by polynomial decomposition.
    pub decompose_degree: u32,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            bruteforce_points: 12,
            subsets: 1_000_000,
            tuples: 100_000_000,
            evaluations: 100_000_000,
            family: 1_000_000,
            structure: 10_000,
            decompose_degree: 12,
        }
    }
}
