//! Bigraded homology of moment-angle complexes through full subcomplexes.
//!
//! `H_{-i,2j}(Z_K)` is the direct sum of `H̃_{j-i-1}(K_I)` over the vertex
//! subsets `I` with `|I| = j`. Coordinates in a bigrade are the concatenated
//! bases of the nonzero summands, subsets taken in increasing mask order.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::homology::{induced_map, reduced_homology, HomologyBasis};
use crate::linalg::{FMatrix, PrimeField};
use crate::Config;

/// Bidegree `(-i, 2j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bigrade {
    pub i: usize,
    pub j: usize,
}

impl Bigrade {
    pub const ORIGIN: Bigrade = Bigrade { i: 0, j: 0 };

    pub fn new(i: usize, j: usize) -> Self {
        Bigrade { i, j }
    }

    /// Bigrade of the summand `H̃_p(K_I)` with `|I| = size`.
    pub fn of_summand(p: isize, size: usize) -> Self {
        Bigrade {
            i: (size as isize - p - 1) as usize,
            j: size,
        }
    }

    /// The degree `p = j - i - 1` of the contributing reduced homology.
    pub fn degree(self) -> isize {
        self.j as isize - self.i as isize - 1
    }

    /// `(-i, 2j)` as displayed.
    pub fn display(self) -> (i64, i64) {
        (-(self.i as i64), 2 * self.j as i64)
    }

    pub fn from_display(a: i64, b: i64) -> Result<Self> {
        if a > 0 || b < 0 || b % 2 != 0 {
            return Err(Error::InvalidInput(format!("({a},{b}) is not a bidegree")));
        }
        Ok(Bigrade::new((-a) as usize, (b / 2) as usize))
    }

    /// The target of `∂'`.
    pub fn next(self) -> Self {
        Bigrade::new(self.i + 1, self.j + 1)
    }

    /// Whether a nonzero group may sit here for a complex on `m` vertices.
    pub fn in_trapezoid(self, m: usize) -> bool {
        (self.i == 0 && self.j == 0) || (1 <= self.i && self.i < self.j && self.j <= m)
    }
}

impl fmt::Display for Bigrade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.display();
        write!(f, "({a},{b})")
    }
}

/// Position of one summand inside the coordinates of a bigrade.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SummandSlot {
    pub subset: u32,
    pub offset: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Layout {
    pub slots: Vec<SummandSlot>,
    pub dim: usize,
}

impl Layout {
    pub fn slot(&self, subset: u32) -> Option<&SummandSlot> {
        self.slots
            .binary_search_by_key(&subset, |s| s.subset)
            .ok()
            .map(|k| &self.slots[k])
    }
}

/// All Hochster summands of a complex with their homology bases.
#[derive(Clone, Debug)]
pub struct HochsterGroup {
    field: PrimeField,
    complex: SimplicialComplex,
    summands: Vec<Arc<HomologyBasis>>,
    layouts: BTreeMap<Bigrade, Layout>,
}

fn check_cap(m: usize, config: &Config) -> Result<()> {
    if m > config.max_vertices {
        return Err(Error::CapExceeded {
            what: "vertex set",
            size: m,
            cap: config.max_vertices,
            hint: " (subset enumeration is exponential; raise the cap or use a smaller input)",
        });
    }
    Ok(())
}

impl HochsterGroup {
    pub fn new(k: &SimplicialComplex, config: &Config) -> Result<Self> {
        Self::build(k, config, None)
    }

    /// Like [`HochsterGroup::new`], sharing every summand whose full subcomplex
    /// is unchanged from `previous`.
    pub fn reusing(k: &SimplicialComplex, previous: &HochsterGroup, config: &Config) -> Result<Self> {
        if previous.universe() != k.universe() || previous.field != config.field {
            return Self::build(k, config, None);
        }
        Self::build(k, config, Some(previous))
    }

    fn build(k: &SimplicialComplex, config: &Config, previous: Option<&HochsterGroup>) -> Result<Self> {
        let m = k.universe();
        check_cap(m, config)?;
        let field = config.field;
        let summands: Vec<Arc<HomologyBasis>> = (0..1u64 << m)
            .into_par_iter()
            .map(|mask| {
                let mask = mask as u32;
                let sub = k.full_subcomplex(mask).expect("mask lies in the universe");
                if let Some(prev) = previous {
                    if prev.complex.full_subcomplex(mask).expect("same universe") == sub {
                        return Arc::clone(&prev.summands[mask as usize]);
                    }
                }
                Arc::new(reduced_homology(&sub, field))
            })
            .collect();

        let mut layouts: BTreeMap<Bigrade, Layout> = BTreeMap::new();
        for (mask, h) in summands.iter().enumerate() {
            let size = (mask as u32).count_ones() as usize;
            for p in h.nonzero_degrees() {
                let layout = layouts.entry(Bigrade::of_summand(p, size)).or_default();
                let dim = h.dim(p);
                layout.slots.push(SummandSlot {
                    subset: mask as u32,
                    offset: layout.dim,
                    dim,
                });
                layout.dim += dim;
            }
        }
        Ok(HochsterGroup {
            field,
            complex: k.clone(),
            summands,
            layouts,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn universe(&self) -> usize {
        self.complex.universe()
    }

    pub fn summand(&self, subset: u32) -> &HomologyBasis {
        &self.summands[subset as usize]
    }

    pub(crate) fn summand_arc(&self, subset: u32) -> &Arc<HomologyBasis> {
        &self.summands[subset as usize]
    }

    pub fn layout(&self, b: Bigrade) -> Option<&Layout> {
        self.layouts.get(&b)
    }

    pub fn layouts(&self) -> &BTreeMap<Bigrade, Layout> {
        &self.layouts
    }

    pub fn dim(&self, b: Bigrade) -> usize {
        self.layouts.get(&b).map_or(0, |l| l.dim)
    }

    /// Nonzero bigraded Betti numbers.
    pub fn betti_table(&self) -> BTreeMap<Bigrade, usize> {
        self.layouts.iter().map(|(&b, l)| (b, l.dim)).collect()
    }
}

/// `H_{*,*}(Z_K)` with the default vertex cap.
pub fn bigraded_homology(k: &SimplicialComplex, field: PrimeField) -> Result<HochsterGroup> {
    HochsterGroup::new(k, &Config::with_field(field))
}

/// Nonzero entries `β_{-i,2j}(K)`.
pub fn betti_table(k: &SimplicialComplex, field: PrimeField) -> Result<BTreeMap<Bigrade, usize>> {
    Ok(bigraded_homology(k, field)?.betti_table())
}

/// Nonzero entries of a Betti table lying outside the admissible region.
pub fn trapezoid_violations(table: &BTreeMap<Bigrade, usize>, m: usize) -> Vec<Bigrade> {
    table
        .iter()
        .filter(|&(&b, &d)| d > 0 && !b.in_trapezoid(m))
        .map(|(&b, _)| b)
        .collect()
}

/// Per-bigrade matrices of `H(Z_K) → H(Z_L)` for `K ⊆ L` on the same vertex set.
///
/// Each matrix is block diagonal over the subsets `I`.
pub fn induced_bigraded_map(
    source: &HochsterGroup,
    target: &HochsterGroup,
) -> Result<BTreeMap<Bigrade, FMatrix>> {
    if source.universe() != target.universe() {
        return Err(Error::VertexSetMismatch(source.universe(), target.universe()));
    }
    let field = target.field;
    let empty = Layout::default();
    let mut out = BTreeMap::new();
    let grades: std::collections::BTreeSet<Bigrade> =
        source.layouts.keys().chain(target.layouts.keys()).copied().collect();
    for b in grades {
        let src = source.layout(b).unwrap_or(&empty);
        let tgt = target.layout(b).unwrap_or(&empty);
        let mut m = FMatrix::zeros(field, tgt.dim, src.dim);
        for s in &src.slots {
            let Some(t) = tgt.slot(s.subset) else {
                continue;
            };
            let p = b.degree();
            let block = if Arc::ptr_eq(source.summand_arc(s.subset), target.summand_arc(s.subset)) {
                FMatrix::identity(field, s.dim)
            } else {
                induced_map(source.summand(s.subset), target.summand(s.subset), p)?
            };
            for r in 0..t.dim {
                for c in 0..s.dim {
                    m.set(t.offset + r, s.offset + c, block.get(r, c));
                }
            }
        }
        out.insert(b, m);
    }
    Ok(out)
}
