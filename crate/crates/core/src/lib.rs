//! Bigraded persistent homology of finite pseudo-metric spaces.
//!
//! The Vietoris–Rips filtration of a space is turned into three families of
//! barcodes: ordinary persistent homology, the bigraded homology of the
//! moment-angle complexes of the filtration (through the Hochster
//! decomposition), and their double homology. Barcodes are compared with the
//! bottleneck distance, spaces with the Gromov–Hausdorff distance.

pub mod complex;
pub mod distances;
pub mod double;
pub mod error;
pub mod harness;
pub mod hochster;
pub mod homology;
pub mod linalg;
pub mod metric;
pub mod persistence;

pub use complex::{critical_values, vietoris_rips, FiltrationGrid, RipsFiltration, SimplicialComplex};
pub use distances::{bottleneck, interleaving_via_isometry, ExtendedInterval};
pub use double::{double_homology, induced_map_hh, DoubleChainComplex, DoubleHomology};
pub use error::{Error, Result};
pub use hochster::{betti_table, bigraded_homology, Bigrade, HochsterGroup};
pub use homology::{induced_map, reduced_homology, HomologyBasis};
pub use linalg::{FMatrix, PrimeField};
pub use metric::{gromov_hausdorff, gromov_hausdorff_bijective, PseudoMetricSpace};
pub use persistence::{persistent_homology, phhz, phz, Bar, Barcode, Grade, Tower};

/// Hard ceiling on the configurable vertex cap.
pub const MAX_VERTEX_CAP: usize = 24;

/// Computation settings shared by the pipelines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Config {
    pub field: PrimeField,
    /// Largest vertex set for which all subsets are enumerated.
    pub max_vertices: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            field: PrimeField::F2,
            max_vertices: complex::DEFAULT_VERTEX_CAP,
        }
    }
}

impl Config {
    pub fn new(field: PrimeField, max_vertices: usize) -> Result<Self> {
        if max_vertices > MAX_VERTEX_CAP {
            return Err(Error::CapExceeded {
                what: "vertex cap",
                size: max_vertices,
                cap: MAX_VERTEX_CAP,
                hint: "",
            });
        }
        Ok(Config {
            field,
            max_vertices,
        })
    }

    pub fn with_field(field: PrimeField) -> Self {
        Config {
            field,
            ..Config::default()
        }
    }
}
