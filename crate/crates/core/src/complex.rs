//! Abstract simplicial complexes on at most 32 labelled vertices.
//!
//! A simplex is a bitmask over the vertex universe `[m]`; its orientation is
//! the increasing order of its vertices. Vietoris–Rips complexes are flag
//! complexes and are stored as their 1-skeleton only, with faces enumerated on
//! demand up to the dimension a caller asks for.

use std::fmt;

use crate::error::{Error, Result};
use crate::metric::{PseudoMetricSpace, TOLERANCE};

/// Representational limit of vertex bitmasks.
pub const MAX_UNIVERSE: usize = 32;

/// Default cap on the number of vertices fed to subset enumeration.
pub const DEFAULT_VERTEX_CAP: usize = 20;

/// Iterates the set bits of `mask` in increasing order.
pub fn bits(mut mask: u32) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (mask != 0).then(|| {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            b
        })
    })
}

/// Mask of the given vertex indices.
pub fn mask_of(vertices: &[usize]) -> u32 {
    vertices.iter().fold(0, |m, &v| m | 1 << v)
}

#[derive(Clone)]
enum Faces {
    /// Clique complex of the graph with these neighbour masks.
    Flag(Vec<u32>),
    /// Every face, sorted by mask, including the empty face.
    Explicit(Vec<u32>),
}

#[derive(Clone)]
pub struct SimplicialComplex {
    universe: usize,
    vertices: u32,
    faces: Faces,
}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let facets: Vec<Vec<usize>> = self.facets().into_iter().map(|m| bits(m).collect()).collect();
        f.debug_struct("SimplicialComplex")
            .field("universe", &self.universe)
            .field("flag", &self.is_flag())
            .field("facets", &facets)
            .finish()
    }
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        if self.universe != other.universe || self.vertices != other.vertices {
            return false;
        }
        match (&self.faces, &other.faces) {
            (Faces::Flag(a), Faces::Flag(b)) => a == b,
            _ => self.all_faces() == other.all_faces(),
        }
    }
}

impl Eq for SimplicialComplex {}

fn check_universe(m: usize) -> Result<()> {
    if m > MAX_UNIVERSE {
        return Err(Error::CapExceeded {
            what: "vertex universe",
            size: m,
            cap: MAX_UNIVERSE,
            hint: "",
        });
    }
    Ok(())
}

fn full_mask(m: usize) -> u32 {
    if m == 32 {
        u32::MAX
    } else {
        (1u32 << m) - 1
    }
}

impl SimplicialComplex {
    /// Clique complex of a graph on `[m]` given by its edges.
    pub fn flag(m: usize, edges: &[(usize, usize)]) -> Result<Self> {
        check_universe(m)?;
        let mut adj = vec![0u32; m];
        for &(a, b) in edges {
            if a >= m || b >= m {
                return Err(Error::NotAVertex(a.max(b)));
            }
            if a != b {
                adj[a] |= 1 << b;
                adj[b] |= 1 << a;
            }
        }
        Ok(SimplicialComplex {
            universe: m,
            vertices: full_mask(m),
            faces: Faces::Flag(adj),
        })
    }

    /// Clique complex from neighbour masks; the diagonal is ignored.
    pub fn flag_from_adjacency(adj: Vec<u32>) -> Result<Self> {
        let m = adj.len();
        check_universe(m)?;
        let mut adj = adj;
        for (v, row) in adj.iter_mut().enumerate() {
            *row &= !(1 << v) & full_mask(m);
        }
        for a in 0..m {
            for b in bits(adj[a]) {
                if adj[b] >> a & 1 == 0 {
                    return Err(Error::InvalidInput("adjacency is not symmetric".into()));
                }
            }
        }
        Ok(SimplicialComplex {
            universe: m,
            vertices: full_mask(m),
            faces: Faces::Flag(adj),
        })
    }

    /// The complex generated by the given facets.
    ///
    /// Vertices of `[m]` lying in no facet are absent (ghost vertices).
    pub fn from_facets<F: AsRef<[usize]>>(m: usize, facets: &[F]) -> Result<Self> {
        check_universe(m)?;
        let mut masks = Vec::with_capacity(facets.len());
        for f in facets {
            if let Some(&v) = f.as_ref().iter().find(|&&v| v >= m) {
                return Err(Error::NotAVertex(v));
            }
            masks.push(mask_of(f.as_ref()));
        }
        Ok(SimplicialComplex::from_facet_masks(m, &masks))
    }

    fn from_facet_masks(m: usize, facets: &[u32]) -> Self {
        let mut faces = vec![0u32];
        for &f in facets {
            // all submasks of f
            let mut sub = f;
            loop {
                faces.push(sub);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & f;
            }
        }
        faces.sort_unstable();
        faces.dedup();
        let vertices = faces.iter().fold(0, |acc, &f| acc | f);
        SimplicialComplex {
            universe: m,
            vertices,
            faces: Faces::Explicit(faces),
        }
    }

    /// The full simplex `Δ^{m-1}`.
    pub fn simplex(m: usize) -> Result<Self> {
        check_universe(m)?;
        let adj = (0..m).map(|v| full_mask(m) & !(1 << v)).collect();
        Ok(SimplicialComplex {
            universe: m,
            vertices: full_mask(m),
            faces: Faces::Flag(adj),
        })
    }

    /// `m` disjoint points.
    pub fn discrete(m: usize) -> Result<Self> {
        SimplicialComplex::flag(m, &[])
    }

    /// Size of the vertex universe `[m]`.
    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn vertex_mask(&self) -> u32 {
        self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.count_ones() as usize
    }

    pub fn is_flag(&self) -> bool {
        matches!(self.faces, Faces::Flag(_))
    }

    /// Neighbour masks restricted to the vertex set, when stored as a flag complex.
    pub fn adjacency(&self) -> Option<&[u32]> {
        match &self.faces {
            Faces::Flag(adj) => Some(adj),
            Faces::Explicit(_) => None,
        }
    }

    pub fn contains(&self, face: u32) -> bool {
        if face & !self.vertices != 0 {
            return false;
        }
        match &self.faces {
            Faces::Flag(adj) => bits(face).all(|v| adj[v] & face == face & !(1 << v)),
            Faces::Explicit(all) => all.binary_search(&face).is_ok(),
        }
    }

    pub fn is_simplex(&self) -> bool {
        self.contains(self.vertices)
    }

    /// A vertex `v` such that `σ ∪ {v}` is a face for every face `σ`.
    pub fn cone_apex(&self) -> Option<usize> {
        match &self.faces {
            Faces::Flag(adj) => bits(self.vertices).find(|&v| adj[v] | 1 << v == self.vertices),
            Faces::Explicit(all) => bits(self.vertices).find(|&v| {
                all.iter().all(|&f| f >> v & 1 == 1 || self.contains(f | 1 << v))
            }),
        }
    }

    /// Faces grouped by dimension `-1..=max_dim`; entry `k` holds dimension `k - 1`.
    /// Each group is sorted by mask.
    pub fn faces_by_dim(&self, max_dim: isize) -> Vec<Vec<u32>> {
        let groups = (max_dim + 2).max(0) as usize;
        let mut out = vec![Vec::new(); groups];
        if groups == 0 {
            return out;
        }
        match &self.faces {
            Faces::Flag(adj) => {
                out[0].push(0);
                if groups > 1 {
                    cliques(adj, 0, self.vertices, 1, groups - 1, &mut out);
                }
            }
            Faces::Explicit(all) => {
                for &f in all {
                    let k = f.count_ones() as usize;
                    if k < groups {
                        out[k].push(f);
                    }
                }
            }
        }
        for g in &mut out {
            g.sort_unstable();
        }
        out
    }

    pub fn faces_of_dim(&self, dim: isize) -> Vec<u32> {
        if dim < -1 {
            return Vec::new();
        }
        self.faces_by_dim(dim).pop().unwrap_or_default()
    }

    /// Every face including the empty one, sorted by mask.
    pub fn all_faces(&self) -> Vec<u32> {
        let mut all: Vec<u32> = self
            .faces_by_dim(self.vertex_count() as isize - 1)
            .into_iter()
            .flatten()
            .collect();
        all.sort_unstable();
        all
    }

    pub fn facets(&self) -> Vec<u32> {
        let all = self.all_faces();
        all.iter()
            .copied()
            .filter(|&f| bits(self.vertices & !f).all(|v| !self.contains(f | 1 << v)))
            .filter(|&f| f != 0 || self.vertices == 0)
            .collect()
    }

    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.universe == other.universe && self.all_faces().iter().all(|&f| other.contains(f))
    }

    /// `K_I`: all faces contained in `subset`, keeping the original vertex labels.
    pub fn full_subcomplex(&self, subset: u32) -> Result<Self> {
        if subset & !full_mask(self.universe) != 0 {
            return Err(Error::InvalidInput(format!(
                "subset {subset:#b} is not contained in [{}]",
                self.universe
            )));
        }
        let vertices = self.vertices & subset;
        let faces = match &self.faces {
            Faces::Flag(adj) => Faces::Flag(
                (0..self.universe)
                    .map(|v| if vertices >> v & 1 == 1 { adj[v] & vertices } else { 0 })
                    .collect(),
            ),
            Faces::Explicit(all) => {
                Faces::Explicit(all.iter().copied().filter(|&f| f & !subset == 0).collect())
            }
        };
        Ok(SimplicialComplex {
            universe: self.universe,
            vertices,
            faces,
        })
    }

    /// Relabels the vertices as `0..k` in increasing order and drops the rest of `[m]`.
    pub fn compacted(&self) -> SimplicialComplex {
        let order: Vec<usize> = bits(self.vertices).collect();
        let k = order.len();
        let relabel = |mask: u32| {
            order
                .iter()
                .enumerate()
                .filter(|(_, &v)| mask >> v & 1 == 1)
                .fold(0u32, |acc, (i, _)| acc | 1 << i)
        };
        let faces = match &self.faces {
            Faces::Flag(adj) => Faces::Flag(order.iter().map(|&v| relabel(adj[v])).collect()),
            Faces::Explicit(all) => {
                let mut f: Vec<u32> = all.iter().map(|&m| relabel(m)).collect();
                f.sort_unstable();
                Faces::Explicit(f)
            }
        };
        SimplicialComplex {
            universe: k,
            vertices: full_mask(k),
            faces,
        }
    }

    /// Doubling at vertex `i`: adds `i' = m` and every `σ ∪ {i'}` with `i ∈ σ ∈ K`.
    pub fn double_vertex(&self, i: usize) -> Result<Self> {
        if i >= self.universe || self.vertices >> i & 1 == 0 {
            return Err(Error::NotAVertex(i));
        }
        check_universe(self.universe + 1)?;
        let new = self.universe;
        let faces = match &self.faces {
            Faces::Flag(adj) => {
                let mut adj = adj.clone();
                let twin = adj[i] | 1 << i;
                for v in bits(adj[i]) {
                    adj[v] |= 1 << new;
                }
                adj[i] |= 1 << new;
                adj.push(twin);
                Faces::Flag(adj)
            }
            Faces::Explicit(all) => {
                let mut f = all.clone();
                for &s in all.iter().filter(|&&s| s >> i & 1 == 1) {
                    f.push(s | 1 << new);
                    f.push(s & !(1 << i) | 1 << new);
                }
                f.sort_unstable();
                f.dedup();
                Faces::Explicit(f)
            }
        };
        Ok(SimplicialComplex {
            universe: self.universe + 1,
            vertices: self.vertices | 1 << new,
            faces,
        })
    }

    /// `K' ∪_I Δ^n`: glues an `n`-simplex along the face `I`, adding
    /// `n + 1 - |I|` fresh vertices `m, m+1, ...`.
    pub fn glue_simplex(&self, face: u32, n: usize) -> Result<Self> {
        if !self.contains(face) {
            return Err(Error::NotAFace(face));
        }
        let shared = face.count_ones() as usize;
        if n + 1 <= shared {
            return Err(Error::InvalidInput(format!(
                "a {n}-simplex cannot be glued along a face with {shared} vertices"
            )));
        }
        let fresh = n + 1 - shared;
        let m = self.universe + fresh;
        check_universe(m)?;
        let fresh_mask = full_mask(m) & !full_mask(self.universe);
        let top = face | fresh_mask;
        let faces = match &self.faces {
            // cliques through a fresh vertex stay inside the glued simplex
            Faces::Flag(adj) => {
                let mut adj = adj.clone();
                adj.resize(m, 0);
                for v in bits(top) {
                    adj[v] |= top & !(1 << v);
                }
                Faces::Flag(adj)
            }
            Faces::Explicit(_) => {
                let mut facets = self.facets();
                facets.push(top);
                return Ok(SimplicialComplex::from_facet_masks(m, &facets));
            }
        };
        Ok(SimplicialComplex {
            universe: m,
            vertices: self.vertices | fresh_mask,
            faces,
        })
    }

    /// The same complex stored face by face.
    pub fn to_explicit(&self) -> SimplicialComplex {
        SimplicialComplex {
            universe: self.universe,
            vertices: self.vertices,
            faces: Faces::Explicit(self.all_faces()),
        }
    }
}

/// Depth-first clique enumeration: `current` has `size - 1` vertices, every
/// vertex of `candidates` is adjacent to all of them and larger than the last.
fn cliques(adj: &[u32], current: u32, candidates: u32, size: usize, max_size: usize, out: &mut [Vec<u32>]) {
    for v in bits(candidates) {
        let face = current | 1 << v;
        out[size].push(face);
        if size < max_size {
            let higher = if v == 31 { 0 } else { !((2u32 << v) - 1) };
            let next = candidates & adj[v] & higher;
            if next != 0 {
                cliques(adj, face, next, size + 1, max_size, out);
            }
        }
    }
}

/// Strictly increasing filtration values starting at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct FiltrationGrid {
    values: Vec<f64>,
}

impl FiltrationGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.first() != Some(&0.0) {
            return Err(Error::InvalidInput("a filtration grid starts at 0".into()));
        }
        if values.windows(2).any(|w| !(w[1] - w[0] > TOLERANCE)) {
            return Err(Error::InvalidInput(
                "filtration grid values must increase by more than the tolerance".into(),
            ));
        }
        Ok(FiltrationGrid { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Index of the largest grid value `<= t + TOLERANCE`.
    pub fn level(&self, t: f64) -> usize {
        self.values.partition_point(|&v| v <= t + TOLERANCE).saturating_sub(1)
    }
}

/// `{0} ∪ {d(x,y) : x != y}`, sorted, with values closer than the tolerance merged.
pub fn critical_values(x: &PseudoMetricSpace) -> FiltrationGrid {
    let mut all = vec![0.0];
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            all.push(x.distance(i, j));
        }
    }
    all.sort_by(f64::total_cmp);
    let mut values: Vec<f64> = Vec::with_capacity(all.len());
    for v in all {
        if values.last().is_none_or(|&last| v - last > TOLERANCE) {
            values.push(v);
        }
    }
    FiltrationGrid { values }
}

/// `R(X, t)`: flag complex with an edge wherever `d(x,y) <= t` (within tolerance).
pub fn vietoris_rips(x: &PseudoMetricSpace, t: f64) -> Result<SimplicialComplex> {
    let n = x.len();
    check_universe(n)?;
    let mut adj = vec![0u32; n];
    for i in 0..n {
        for j in i + 1..n {
            if x.distance(i, j) <= t + TOLERANCE {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
    }
    Ok(SimplicialComplex {
        universe: n,
        vertices: full_mask(n),
        faces: Faces::Flag(adj),
    })
}

/// The Vietoris–Rips filtration of a space, indexed by its critical values.
#[derive(Clone, Debug)]
pub struct RipsFiltration {
    grid: FiltrationGrid,
    n: usize,
    /// Grid index at which each edge appears.
    levels: Vec<usize>,
}

impl RipsFiltration {
    pub fn new(x: &PseudoMetricSpace) -> Result<Self> {
        let n = x.len();
        check_universe(n)?;
        let grid = critical_values(x);
        let mut levels = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                levels[i * n + j] = grid.level(x.distance(i, j));
            }
        }
        Ok(RipsFiltration { grid, n, levels })
    }

    pub fn grid(&self) -> &FiltrationGrid {
        &self.grid
    }

    pub fn point_count(&self) -> usize {
        self.n
    }

    pub fn edge_level(&self, i: usize, j: usize) -> usize {
        self.levels[i * self.n + j]
    }

    /// `R(X, grid[k])`.
    pub fn complex_at(&self, k: usize) -> SimplicialComplex {
        let n = self.n;
        let adj = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i && self.levels[i * n + j] <= k)
                    .fold(0u32, |acc, j| acc | 1 << j)
            })
            .collect();
        SimplicialComplex {
            universe: n,
            vertices: full_mask(n),
            faces: Faces::Flag(adj),
        }
    }

    /// Sorted grid indices where the subspace on `subset` changes, starting at 0.
    pub fn levels_within(&self, subset: u32) -> Vec<usize> {
        let mut out = vec![0];
        let pts: Vec<usize> = bits(subset).collect();
        for (a, &i) in pts.iter().enumerate() {
            for &j in &pts[a + 1..] {
                out.push(self.edge_level(i, j));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}
