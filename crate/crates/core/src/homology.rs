//! Reduced simplicial homology with explicit cycle representatives.
//!
//! Chains live on the augmented complex, so the empty simplex spans degree −1
//! and `H̃_{-1}(∅) = k`. A basis is stored only for degrees where the group is
//! nonzero; that is all the induced maps need.

use crate::complex::{bits, SimplicialComplex};
use crate::error::{Error, Result};
use crate::linalg::{quotient_basis, FMatrix, PrimeField, Quotient};

#[derive(Clone, Debug)]
struct DegreeBasis {
    /// Oriented `p`-simplices indexing the chain coordinates, sorted by mask.
    simplices: Vec<u32>,
    classes: Quotient,
}

/// Bases of `H̃_p(K)` for `p = -1 ..= vertex_count - 2`.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    field: PrimeField,
    /// Entry `k` describes degree `k - 1`; `None` means the group is zero.
    degrees: Vec<Option<DegreeBasis>>,
}

/// Boundary matrix `∂_p`, rows indexed by `lower` (the `(p-1)`-simplices).
fn boundary_matrix(field: PrimeField, upper: &[u32], lower: &[u32]) -> FMatrix {
    let mut m = FMatrix::zeros(field, lower.len(), upper.len());
    for (c, &sigma) in upper.iter().enumerate() {
        for (k, v) in bits(sigma).enumerate() {
            let face = sigma & !(1 << v);
            let r = lower
                .binary_search(&face)
                .expect("faces of a simplex belong to the complex");
            m.set(r, c, field.sign(k % 2 == 1));
        }
    }
    m
}

/// Reduced homology of `k` over `field`.
pub fn reduced_homology(k: &SimplicialComplex, field: PrimeField) -> HomologyBasis {
    let nverts = k.vertex_count();
    let top = nverts as isize - 2;
    let mut degrees: Vec<Option<DegreeBasis>> = vec![None; (top + 2).max(1) as usize];

    if nverts == 0 {
        let classes = quotient_basis(
            &FMatrix::identity(field, 1),
            &FMatrix::zeros(field, 1, 0),
        )
        .expect("trivial quotient");
        degrees[0] = Some(DegreeBasis {
            simplices: vec![0],
            classes,
        });
        return HomologyBasis { field, degrees };
    }
    if k.cone_apex().is_some() {
        return HomologyBasis { field, degrees };
    }

    // faces of dimension -1 ..= top + 1
    let faces = k.faces_by_dim(top + 1);
    let mut incoming = boundary_matrix(field, &faces[1], &faces[0]);
    for p in 0..=top {
        let idx = (p + 1) as usize;
        let outgoing = incoming;
        let upper: &[u32] = faces.get(idx + 1).map_or(&[], |f| f.as_slice());
        incoming = boundary_matrix(field, upper, &faces[idx]);
        let cycles = outgoing.kernel_basis();
        if cycles.is_empty() {
            continue;
        }
        let boundary_rank = incoming.rank();
        if cycles.len() == boundary_rank {
            continue;
        }
        let z = FMatrix::from_columns(field, faces[idx].len(), &cycles)
            .expect("kernel vectors have one entry per simplex");
        let classes = quotient_basis(&z, &incoming).expect("boundaries are cycles");
        degrees[idx] = Some(DegreeBasis {
            simplices: faces[idx].clone(),
            classes,
        });
    }
    HomologyBasis { field, degrees }
}

impl HomologyBasis {
    pub fn field(&self) -> PrimeField {
        self.field
    }

    fn degree(&self, p: isize) -> Option<&DegreeBasis> {
        if p < -1 {
            return None;
        }
        self.degrees.get((p + 1) as usize).and_then(Option::as_ref)
    }

    /// `dim H̃_p`; zero outside the computed range.
    pub fn dim(&self, p: isize) -> usize {
        self.degree(p).map_or(0, |d| d.classes.dim())
    }

    /// Reduced Betti numbers indexed by `p + 1`.
    pub fn betti(&self) -> Vec<usize> {
        (0..self.degrees.len()).map(|k| self.dim(k as isize - 1)).collect()
    }

    /// Degrees with nonzero homology.
    pub fn nonzero_degrees(&self) -> impl Iterator<Item = isize> + '_ {
        (0..self.degrees.len())
            .filter(|&k| self.degrees[k].is_some())
            .map(|k| k as isize - 1)
    }

    pub fn is_acyclic(&self) -> bool {
        self.degrees.iter().all(Option::is_none)
    }

    /// Simplices indexing the rows of [`HomologyBasis::representatives`].
    pub fn simplices(&self, p: isize) -> &[u32] {
        self.degree(p).map_or(&[], |d| &d.simplices)
    }

    /// Representative cycles, one column per basis class.
    pub fn representatives(&self, p: isize) -> Option<&FMatrix> {
        self.degree(p).map(|d| d.classes.representatives())
    }

    /// Coordinates of the class of a cycle given on the simplices `support`.
    pub fn class_of(&self, p: isize, support: &[u32], coeffs: &[u32]) -> Result<Vec<u32>> {
        let Some(d) = self.degree(p) else {
            return Ok(Vec::new());
        };
        let mut chain = vec![0u32; d.simplices.len()];
        for (&s, &c) in support.iter().zip(coeffs) {
            if c == 0 {
                continue;
            }
            let r = d.simplices.binary_search(&s).map_err(|_| Error::NotAFace(s))?;
            chain[r] = c;
        }
        d.classes.project(&chain).map_err(|_| {
            Error::Invariant(format!("chain in degree {p} is not a cycle of the target"))
        })
    }
}

/// Matrix of `H̃_p(K) → H̃_p(L)` induced by the inclusion `K ⊆ L`.
///
/// Shape is `dim H̃_p(L) × dim H̃_p(K)`.
pub fn induced_map(source: &HomologyBasis, target: &HomologyBasis, p: isize) -> Result<FMatrix> {
    let field = target.field;
    if source.field != field {
        return Err(Error::InvalidInput("homology over different fields".into()));
    }
    let mut out = FMatrix::zeros(field, target.dim(p), source.dim(p));
    if out.rows() == 0 || out.cols() == 0 {
        return Ok(out);
    }
    let reps = source.representatives(p).expect("nonzero source degree");
    let support = source.simplices(p);
    for c in 0..reps.cols() {
        let coords = target.class_of(p, support, &reps.column(c))?;
        for (r, v) in coords.into_iter().enumerate() {
            out.set(r, c, v);
        }
    }
    Ok(out)
}
