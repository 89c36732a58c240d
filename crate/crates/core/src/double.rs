//! Double homology: the homology of `H(Z_K)` under the second differential `∂'`.
//!
//! `∂'` sends the summand `H̃_p(K_I)` to the summands `H̃_p(K_{I ∪ {j}})`,
//! `j ∉ I`, through the maps induced by inclusion, each weighted by
//! `(-1)^{p+1} ε(j, I)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::hochster::{induced_bigraded_map, Bigrade, HochsterGroup, Layout};
use crate::homology::induced_map;
use crate::linalg::{quotient_basis, FMatrix, PrimeField, Quotient};
use crate::Config;

/// `ε(j, I) = (-1)^{#{i ∈ I : i < j}}`.
pub fn sign_epsilon(j: usize, subset: u32) -> Result<i8> {
    if subset >> j & 1 == 1 {
        return Err(Error::VertexInSubset(j));
    }
    let below = if j >= 32 { subset } else { subset & ((1u32 << j) - 1) };
    Ok(if below.count_ones() % 2 == 0 { 1 } else { -1 })
}

/// `H(Z_K)` together with `∂'` in every bigrade.
#[derive(Clone, Debug)]
pub struct DoubleChainComplex {
    group: Arc<HochsterGroup>,
    /// `∂' : (i, j) → (i + 1, j + 1)` for every bigrade with a nonzero source.
    differentials: BTreeMap<Bigrade, FMatrix>,
}

fn differential(group: &HochsterGroup, b: Bigrade, src: &Layout) -> Result<FMatrix> {
    let field = group.field();
    let empty = Layout::default();
    let tgt = group.layout(b.next()).unwrap_or(&empty);
    let mut d = FMatrix::zeros(field, tgt.dim, src.dim);
    if tgt.dim == 0 {
        return Ok(d);
    }
    let p = b.degree();
    let global = (p + 1) % 2 == 1;
    for s in &src.slots {
        for j in 0..group.universe() {
            if s.subset >> j & 1 == 1 {
                continue;
            }
            let Some(t) = tgt.slot(s.subset | 1 << j) else {
                continue;
            };
            let eps = sign_epsilon(j, s.subset)? < 0;
            let sign = field.sign(global ^ eps);
            let phi = induced_map(group.summand(s.subset), group.summand(t.subset), p)?;
            for r in 0..t.dim {
                for c in 0..s.dim {
                    let v = phi.get(r, c);
                    if v != 0 {
                        let cur = d.get(t.offset + r, s.offset + c);
                        d.set(t.offset + r, s.offset + c, field.add(cur, field.mul(sign, v)));
                    }
                }
            }
        }
    }
    Ok(d)
}

impl DoubleChainComplex {
    /// Assembles `∂'` and checks `∂' ∘ ∂' = 0`.
    pub fn new(group: Arc<HochsterGroup>) -> Result<Self> {
        let mut differentials = BTreeMap::new();
        for (&b, layout) in group.layouts() {
            differentials.insert(b, differential(&group, b, layout)?);
        }
        let complex = DoubleChainComplex {
            group,
            differentials,
        };
        complex.check_nilpotent()?;
        Ok(complex)
    }

    fn check_nilpotent(&self) -> Result<()> {
        for (&b, d) in &self.differentials {
            let Some(next) = self.differentials.get(&b.next()) else {
                continue;
            };
            if d.rows() == 0 || next.rows() == 0 {
                continue;
            }
            if !next.mul(d)?.is_zero() {
                return Err(Error::Invariant(format!("∂'∘∂' is nonzero at {b}")));
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &HochsterGroup {
        &self.group
    }

    pub fn field(&self) -> PrimeField {
        self.group.field()
    }

    /// `∂'` leaving bigrade `b`, of shape `dim(b.next()) × dim(b)`.
    pub fn differential(&self, b: Bigrade) -> FMatrix {
        self.differentials.get(&b).cloned().unwrap_or_else(|| {
            FMatrix::zeros(self.field(), self.group.dim(b.next()), self.group.dim(b))
        })
    }

    /// `∂'` arriving at bigrade `b`.
    pub fn incoming(&self, b: Bigrade) -> FMatrix {
        if b.i == 0 || b.j == 0 {
            return FMatrix::zeros(self.field(), self.group.dim(b), 0);
        }
        self.differential(Bigrade::new(b.i - 1, b.j - 1))
    }
}

/// `∂'` for the Hochster group of `group`; returned for inspection in tests and tools.
pub fn build_partial_prime(group: HochsterGroup) -> Result<DoubleChainComplex> {
    DoubleChainComplex::new(Arc::new(group))
}

/// `HH_{*,*}(Z_K)` with representatives in Hochster coordinates.
#[derive(Clone, Debug)]
pub struct DoubleHomology {
    chain: DoubleChainComplex,
    classes: BTreeMap<Bigrade, Quotient>,
}

impl DoubleHomology {
    pub fn new(chain: DoubleChainComplex) -> Result<Self> {
        let field = chain.field();
        let mut classes = BTreeMap::new();
        for (&b, layout) in chain.group.layouts() {
            let out = chain.differential(b);
            let cycles = if out.rows() == 0 {
                FMatrix::identity(field, layout.dim)
            } else {
                let kernel = out.kernel_basis();
                if kernel.is_empty() {
                    continue;
                }
                FMatrix::from_columns(field, layout.dim, &kernel)?
            };
            let q = quotient_basis(&cycles, &chain.incoming(b))?;
            if q.dim() > 0 {
                classes.insert(b, q);
            }
        }
        Ok(DoubleHomology { chain, classes })
    }

    pub fn compute(k: &SimplicialComplex, config: &Config) -> Result<Self> {
        Self::from_group(HochsterGroup::new(k, config)?)
    }

    pub fn from_group(group: HochsterGroup) -> Result<Self> {
        DoubleHomology::new(DoubleChainComplex::new(Arc::new(group))?)
    }

    pub fn chain(&self) -> &DoubleChainComplex {
        &self.chain
    }

    pub fn group(&self) -> &HochsterGroup {
        &self.chain.group
    }

    pub fn dim(&self, b: Bigrade) -> usize {
        self.classes.get(&b).map_or(0, Quotient::dim)
    }

    /// Nonzero dimensions of `HH`.
    pub fn dims(&self) -> BTreeMap<Bigrade, usize> {
        self.classes.iter().map(|(&b, q)| (b, q.dim())).collect()
    }

    /// Representative cycles of the classes in bigrade `b`, one per column.
    pub fn representatives(&self, b: Bigrade) -> Option<&FMatrix> {
        self.classes.get(&b).map(Quotient::representatives)
    }
}

/// `HH_{*,*}(Z_K)` with the default vertex cap.
pub fn double_homology(k: &SimplicialComplex, field: PrimeField) -> Result<DoubleHomology> {
    DoubleHomology::compute(k, &Config::with_field(field))
}

/// Per-bigrade matrices of `HH(Z_K) → HH(Z_L)` for `K ⊆ L`.
///
/// The block map on Hochster groups is checked to commute with `∂'`.
pub fn induced_map_hh(
    source: &DoubleHomology,
    target: &DoubleHomology,
) -> Result<BTreeMap<Bigrade, FMatrix>> {
    let field = target.chain.field();
    let blocks = induced_bigraded_map(source.group(), target.group())?;
    for (&b, f) in &blocks {
        let Some(f_next) = blocks.get(&b.next()) else {
            continue;
        };
        let lhs = target.chain.differential(b).mul(f)?;
        let rhs = f_next.mul(&source.chain.differential(b))?;
        if lhs != rhs {
            return Err(Error::Invariant(format!(
                "inclusion does not commute with ∂' at {b}"
            )));
        }
    }
    let mut out = BTreeMap::new();
    let grades: std::collections::BTreeSet<Bigrade> =
        source.classes.keys().chain(target.classes.keys()).copied().collect();
    for b in grades {
        let mut m = FMatrix::zeros(field, target.dim(b), source.dim(b));
        if let (Some(reps), Some(q)) = (source.representatives(b), target.classes.get(&b)) {
            let f = &blocks[&b];
            for c in 0..reps.cols() {
                let image = f.mul_vec(&reps.column(c))?;
                let coords = q.project(&image).map_err(|_| {
                    Error::Invariant(format!("image of a ∂'-cycle is not a cycle at {b}"))
                })?;
                for (r, v) in coords.into_iter().enumerate() {
                    m.set(r, c, v);
                }
            }
        }
        out.insert(b, m);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::vietoris_rips;
    use crate::hochster::bigraded_homology;
    use crate::metric::PseudoMetricSpace;

    fn dims(entries: &[((i64, i64), usize)]) -> BTreeMap<Bigrade, usize> {
        entries
            .iter()
            .map(|&((a, b), d)| (Bigrade::from_display(a, b).unwrap(), d))
            .collect()
    }

    fn square() -> SimplicialComplex {
        SimplicialComplex::flag(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    #[test]
    fn epsilon_signs() {
        assert_eq!(sign_epsilon(3, 0).unwrap(), 1);
        // vertices 1,2,3 are bits 0,1,2
        assert_eq!(sign_epsilon(2, 0b011).unwrap(), 1);
        assert_eq!(sign_epsilon(1, 0b101).unwrap(), -1);
        assert_eq!(sign_epsilon(1, 0b010), Err(Error::VertexInSubset(1)));
    }

    #[test]
    fn simplices_have_trivial_double_homology() {
        for m in 1..6 {
            let hh = double_homology(&SimplicialComplex::simplex(m).unwrap(), PrimeField::F3).unwrap();
            assert_eq!(hh.dims(), dims(&[((0, 0), 1)]));
        }
    }

    #[test]
    fn two_points_have_zero_differential() {
        let g = bigraded_homology(&SimplicialComplex::discrete(2).unwrap(), PrimeField::F3).unwrap();
        let c = build_partial_prime(g).unwrap();
        assert!(c.differential(Bigrade::ORIGIN).is_zero());
        assert!(c.differential(Bigrade::new(1, 2)).is_zero());
    }

    #[test]
    fn three_points() {
        for field in [PrimeField::F2, PrimeField::F3] {
            let g = bigraded_homology(&SimplicialComplex::discrete(3).unwrap(), field).unwrap();
            let c = build_partial_prime(g).unwrap();
            let d = c.differential(Bigrade::new(1, 2));
            assert_eq!((d.rows(), d.cols()), (2, 3));
            assert_eq!(d.rank(), 2);
            let hh = DoubleHomology::new(c).unwrap();
            assert_eq!(hh.dims(), dims(&[((0, 0), 1), ((-1, 4), 1)]));
        }
    }

    #[test]
    fn square_and_bipartite() {
        let k23 = SimplicialComplex::flag(
            5,
            &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)],
        )
        .unwrap();
        for field in [PrimeField::F2, PrimeField::F3, PrimeField::new(5).unwrap()] {
            let expected = dims(&[((0, 0), 1), ((-1, 4), 2), ((-2, 8), 1)]);
            assert_eq!(double_homology(&square(), field).unwrap().dims(), expected);
            assert_eq!(double_homology(&k23, field).unwrap().dims(), expected);
        }
    }

    #[test]
    fn gluing_an_edge_to_a_square() {
        let k = square().glue_simplex(0b0001, 1).unwrap();
        let hh = double_homology(&k, PrimeField::F3).unwrap();
        assert_eq!(hh.dims(), dims(&[((0, 0), 1), ((-1, 4), 1)]));
    }

    #[test]
    fn doubling_keeps_double_homology() {
        let k = SimplicialComplex::flag(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (3, 4)]).unwrap();
        let base = double_homology(&k, PrimeField::F3).unwrap().dims();
        for v in 0..5 {
            let d = double_homology(&k.double_vertex(v).unwrap(), PrimeField::F3).unwrap();
            assert_eq!(d.dims(), base);
        }
    }

    #[test]
    fn strong_outlier_projection() {
        // 0 is far from the cluster {1, 2, 3}
        let x = PseudoMetricSpace::from_matrix(&[
            [0.0, 5.0, 5.0, 6.0],
            [5.0, 0.0, 1.0, 1.0],
            [5.0, 1.0, 0.0, 1.0],
            [6.0, 1.0, 1.0, 0.0],
        ])
        .unwrap();
        let cfg = Config::with_field(PrimeField::F3);
        let at = |t: f64| DoubleHomology::compute(&vietoris_rips(&x, t).unwrap(), &cfg).unwrap();
        let (a, b, c) = (at(1.0), at(5.0), at(6.0));
        let ab = induced_map_hh(&a, &b).unwrap();
        for (g, m) in &ab {
            assert_eq!((m.rows(), m.cols()), (a.dim(*g), a.dim(*g)));
            assert_eq!(m.rank(), a.dim(*g));
        }
        let bc = induced_map_hh(&b, &c).unwrap();
        assert_eq!(bc[&Bigrade::ORIGIN], FMatrix::identity(PrimeField::F3, 1));
        let m = &bc[&Bigrade::new(1, 2)];
        assert_eq!((m.rows(), m.cols()), (0, 1));

        let ac = induced_map_hh(&a, &c).unwrap();
        for (g, m) in ac {
            let composed = bc[&g].mul(&ab[&g]).unwrap();
            assert_eq!(m, composed);
        }
    }
}
