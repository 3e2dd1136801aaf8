//! Problem-domain types and random instance generation: tight-frame analysis
//! operators, cosparse signals and Gaussian measurement matrices.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, Matrix, Vector};

/// Threshold, relative to `||x||`, under which `(Omega x)_j` counts as zero
/// when checking that a freshly drawn signal has the requested cosparsity.
pub const COSPARSITY_COUNT_TOL: f64 = 1e-8;

/// Redraw budget for degenerate random draws.
const MAX_DRAW_ATTEMPTS: usize = 64;

/// Seed for the crate's fixed PRNG (ChaCha8).
///
/// Sub-streams are derived with [`RngSeed::derive`], which mixes the parent
/// seed and a stream tag through SplitMix64, so any number of independent,
/// reproducible streams can be split off one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngSeed {
    pub fn derive(self, stream: u64) -> RngSeed {
        RngSeed(splitmix64(splitmix64(self.0) ^ stream.wrapping_mul(0xd1b5_4a32_d192_ed03)))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    // Filled row by row so the stream-to-entry mapping matches the row-major
    // file layout.
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = StandardNormal.sample(rng);
        }
    }
    m
}

fn gaussian_vector(len: usize, rng: &mut ChaCha8Rng) -> Vector {
    Vector::from_fn(len, |_, _| StandardNormal.sample(rng))
}

/// A full column rank `N x d` analysis operator together with its derived
/// data: the dictionary `D = pinv(Omega)` and an orthonormal basis of the
/// nullspace of `D` (one vector per row), computed once at construction.
#[derive(Debug, Clone)]
pub struct AnalysisOperator {
    omega: Matrix,
    dict: Matrix,
    dict_nullspace: Matrix,
}

impl AnalysisOperator {
    pub fn new(omega: Matrix) -> Result<Self> {
        let (n_rows, dim) = omega.shape();
        if dim == 0 || n_rows < dim {
            return Err(Error::InvalidParameter(format!(
                "analysis operator must be N x d with N >= d >= 1, got {n_rows} x {dim}"
            )));
        }
        let svd = numerics::svd(&omega)?;
        if svd.numerical_rank != dim {
            return Err(Error::RankDeficient {
                rank: svd.numerical_rank,
                expected: dim,
            });
        }
        let dict = numerics::pseudo_inverse(&omega)?;
        let dict_nullspace = numerics::nullspace_basis(&dict)?;
        Ok(Self {
            omega,
            dict,
            dict_nullspace,
        })
    }

    /// `N x d`.
    pub fn omega(&self) -> &Matrix {
        &self.omega
    }

    /// `d x N`, the pseudo-inverse of `omega`.
    pub fn dict(&self) -> &Matrix {
        &self.dict
    }

    /// `(N - d) x N`, orthonormal rows spanning the nullspace of `dict`.
    pub fn dict_nullspace(&self) -> &Matrix {
        &self.dict_nullspace
    }

    pub fn n_rows(&self) -> usize {
        self.omega.nrows()
    }

    pub fn dim(&self) -> usize {
        self.omega.ncols()
    }

    pub fn analyze(&self, x: &Vector) -> Vector {
        &self.omega * x
    }
}

/// Sorted, distinct row indices of the analysis operator that are orthogonal
/// to a signal. Its size is the cosparsity `l`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Cosupport {
    indices: Vec<usize>,
}

impl Cosupport {
    pub fn new(mut indices: Vec<usize>, n_rows: usize) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("cosupport has duplicate indices".into()));
        }
        if let Some(&last) = indices.last() {
            if last >= n_rows {
                return Err(Error::InvalidParameter(format!(
                    "cosupport index {last} out of range for {n_rows} rows"
                )));
            }
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn l(&self) -> usize {
        self.indices.len()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.indices.binary_search(&j).is_ok()
    }
}

impl TryFrom<Vec<usize>> for Cosupport {
    type Error = Error;

    fn try_from(indices: Vec<usize>) -> Result<Self> {
        Cosupport::new(indices, usize::MAX)
    }
}

impl From<Cosupport> for Vec<usize> {
    fn from(c: Cosupport) -> Self {
        c.indices
    }
}

/// One generated ground-truth recovery problem with exact measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct CosparseInstance {
    pub x: Vector,
    pub cosupport: Cosupport,
    pub m_mat: Matrix,
    pub y: Vector,
    /// Grid coordinate `delta`; the realized ratio is `m / d`.
    pub delta: f64,
    /// Grid coordinate `rho`; the realized ratio is `(d - l) / m`.
    pub rho: f64,
    pub seed: RngSeed,
}

impl CosparseInstance {
    pub fn m(&self) -> usize {
        self.m_mat.nrows()
    }

    pub fn l(&self) -> usize {
        self.cosupport.l()
    }
}

/// Random `n_rows x dim` operator with orthonormal columns: the transpose of a
/// random tight frame, built by orthonormalizing an i.i.d. Gaussian matrix.
pub fn generate_tight_frame(n_rows: usize, dim: usize, seed: RngSeed) -> Result<AnalysisOperator> {
    if dim == 0 || n_rows < dim {
        return Err(Error::InvalidParameter(format!(
            "tight frame needs n_rows >= dim >= 1, got {n_rows} x {dim}"
        )));
    }
    let mut rng = seed.rng();
    for _ in 0..MAX_DRAW_ATTEMPTS {
        let g = gaussian_matrix(n_rows, dim, &mut rng);
        let qr = g.qr();
        let r_diag = qr.r().diagonal().map(f64::abs);
        if r_diag.min() <= 1e-8 * r_diag.max() {
            continue;
        }
        return AnalysisOperator::new(qr.q());
    }
    Err(Error::DegenerateDraw {
        attempts: MAX_DRAW_ATTEMPTS,
        reason: "Gaussian draw for the tight frame was rank deficient".into(),
    })
}

/// Unit-norm signal orthogonal to a uniformly random set of `l` rows of the
/// operator, and generically to no other row.
pub fn generate_cosparse_signal(
    op: &AnalysisOperator,
    l: usize,
    seed: RngSeed,
) -> Result<(Vector, Cosupport)> {
    let (n_rows, dim) = (op.n_rows(), op.dim());
    if l > dim {
        return Err(Error::InvalidParameter(format!(
            "cosparsity {l} exceeds the signal dimension {dim}"
        )));
    }
    let mut rng = seed.rng();
    for _ in 0..MAX_DRAW_ATTEMPTS {
        let cosupport = Cosupport::new(index::sample(&mut rng, n_rows, l).into_vec(), n_rows)?;
        let basis = if l == 0 {
            Matrix::identity(dim, dim)
        } else {
            numerics::nullspace_basis(&numerics::select_rows(op.omega(), cosupport.indices()))?
        };
        if basis.nrows() == 0 {
            continue;
        }
        let g = gaussian_vector(dim, &mut rng);
        let x = basis.tr_mul(&(&basis * g));
        let norm = x.norm();
        if norm == 0.0 {
            continue;
        }
        let x = x / norm;
        let nonzeros = op
            .analyze(&x)
            .iter()
            .filter(|v| v.abs() > COSPARSITY_COUNT_TOL)
            .count();
        if nonzeros != n_rows - l {
            continue;
        }
        return Ok((x, cosupport));
    }
    Err(Error::DegenerateDraw {
        attempts: MAX_DRAW_ATTEMPTS,
        reason: format!("no signal with exactly {l} zero analysis coefficients"),
    })
}

/// `m x dim` matrix of i.i.d. standard normal draws with every column scaled
/// to unit Euclidean norm.
pub fn generate_measurement_matrix(m: usize, dim: usize, seed: RngSeed) -> Result<Matrix> {
    if m == 0 || m > dim {
        return Err(Error::InvalidParameter(format!(
            "measurement count must satisfy 1 <= m <= d, got m = {m}, d = {dim}"
        )));
    }
    let mut rng = seed.rng();
    let mut mat = gaussian_matrix(m, dim, &mut rng);
    for mut col in mat.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= norm;
        }
    }
    Ok(mat)
}

/// Measurement count and cosparsity for grid coordinates `(delta, rho)` at
/// signal dimension `dim`: `m = round(delta d)`, `l = d - max(1, round(rho m))`.
///
/// The signal is kept at least one-dimensional: `l = d` would force `x = 0`.
pub fn grid_dimensions(delta: f64, rho: f64, dim: usize) -> Result<(usize, usize)> {
    if !(delta > 0.0 && delta <= 1.0 && rho > 0.0 && rho <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "grid coordinates must lie in (0, 1], got delta = {delta}, rho = {rho}"
        )));
    }
    let m = (delta * dim as f64).round() as usize;
    if m == 0 {
        return Err(Error::InvalidParameter(format!(
            "delta = {delta} gives no measurements at d = {dim}"
        )));
    }
    let free = ((rho * m as f64).round() as usize).clamp(1, dim);
    Ok((m, dim - free))
}

/// Draws a cosparse signal and a fresh measurement matrix for one grid cell
/// and measures the signal exactly.
pub fn make_instance(
    op: &AnalysisOperator,
    delta: f64,
    rho: f64,
    seed: RngSeed,
) -> Result<CosparseInstance> {
    let dim = op.dim();
    let (m, l) = grid_dimensions(delta, rho, dim)?;
    let (x, cosupport) = generate_cosparse_signal(op, l, seed.derive(1))?;
    let m_mat = generate_measurement_matrix(m, dim, seed.derive(2))?;
    let y = &m_mat * &x;
    Ok(CosparseInstance {
        x,
        cosupport,
        m_mat,
        y,
        delta,
        rho,
        seed,
    })
}

/// Like [`make_instance`] but with explicit `m` and `l`, for small
/// hand-sized problems. The recorded grid coordinates are the realized ratios.
pub fn make_instance_with_dims(
    op: &AnalysisOperator,
    m: usize,
    l: usize,
    seed: RngSeed,
) -> Result<CosparseInstance> {
    let dim = op.dim();
    let (x, cosupport) = generate_cosparse_signal(op, l, seed.derive(1))?;
    let m_mat = generate_measurement_matrix(m, dim, seed.derive(2))?;
    let y = &m_mat * &x;
    Ok(CosparseInstance {
        x,
        cosupport,
        m_mat,
        y,
        delta: m as f64 / dim as f64,
        rho: (dim - l) as f64 / m as f64,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_tight_frame_is_orthogonal_with_empty_nullspace() {
        let op = generate_tight_frame(3, 3, RngSeed(11)).unwrap();
        let gram = op.omega().tr_mul(op.omega());
        assert!((gram - Matrix::identity(3, 3)).amax() < 1e-12);
        assert_eq!(op.dict_nullspace().nrows(), 0);
    }

    #[test]
    fn tight_frame_shape_and_properties() {
        let op = generate_tight_frame(240, 200, RngSeed(5)).unwrap();
        assert_eq!(op.omega().shape(), (240, 200));
        let gram = op.omega().tr_mul(op.omega());
        assert!((gram - Matrix::identity(200, 200)).norm() <= 1e-10 * (200f64).sqrt());
        assert!((op.dict() - op.omega().transpose()).amax() <= 1e-10);
        assert_eq!(op.dict_nullspace().shape(), (40, 240));
    }

    #[test]
    fn tight_frame_rejects_wide_shape() {
        assert!(generate_tight_frame(3, 4, RngSeed(0)).is_err());
    }

    #[test]
    fn operator_rejects_rank_deficient_omega() {
        let omega = Matrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, -1.0, -2.0]);
        assert!(matches!(
            AnalysisOperator::new(omega),
            Err(Error::RankDeficient { rank: 1, expected: 2 })
        ));
    }

    #[test]
    fn zero_cosparsity_signal() {
        let op = generate_tight_frame(12, 10, RngSeed(1)).unwrap();
        let (x, cos) = generate_cosparse_signal(&op, 0, RngSeed(2)).unwrap();
        assert_eq!(cos.l(), 0);
        assert!((x.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn full_cosparsity_on_square_operator_is_degenerate() {
        let op = generate_tight_frame(6, 6, RngSeed(1)).unwrap();
        let err = generate_cosparse_signal(&op, 6, RngSeed(2)).unwrap_err();
        assert!(matches!(err, Error::DegenerateDraw { .. }));
        assert!(generate_cosparse_signal(&op, 7, RngSeed(2)).is_err());
    }

    #[test]
    fn cosparse_signal_at_full_scale() {
        let op = generate_tight_frame(240, 200, RngSeed(3)).unwrap();
        let (x, cos) = generate_cosparse_signal(&op, 180, RngSeed(4)).unwrap();
        let gamma = op.analyze(&x);
        let nonzeros = gamma.iter().filter(|v| v.abs() > 1e-8).count();
        assert_eq!(nonzeros, 60);
        for &j in cos.indices() {
            assert!(gamma[j].abs() <= 1e-10);
        }
    }

    #[test]
    fn measurement_columns_have_unit_norm() {
        let scalar = generate_measurement_matrix(1, 1, RngSeed(8)).unwrap();
        assert!((scalar[(0, 0)].abs() - 1.0).abs() < 1e-15);
        let m = generate_measurement_matrix(100, 200, RngSeed(9)).unwrap();
        assert_eq!(m.shape(), (100, 200));
        for col in m.column_iter() {
            assert!((col.norm() - 1.0).abs() <= 1e-12);
        }
        assert!(generate_measurement_matrix(0, 3, RngSeed(0)).is_err());
        assert!(generate_measurement_matrix(4, 3, RngSeed(0)).is_err());
    }

    #[test]
    fn grid_dimension_rounding() {
        assert_eq!(grid_dimensions(1.0, 1.0, 200).unwrap(), (200, 0));
        assert_eq!(grid_dimensions(0.5, 0.5, 200).unwrap(), (100, 150));
        // rho m rounds to zero: keep one free dimension.
        assert_eq!(grid_dimensions(0.05, 0.05, 50).unwrap(), (3, 49));
        assert!(grid_dimensions(0.0, 0.5, 200).is_err());
        assert!(grid_dimensions(0.5, 1.5, 200).is_err());
        assert!(grid_dimensions(0.001, 0.5, 200).is_err());
    }

    #[test]
    fn instance_invariants() {
        let op = generate_tight_frame(24, 20, RngSeed(21)).unwrap();
        let inst = make_instance(&op, 0.5, 0.5, RngSeed(22)).unwrap();
        assert_eq!(inst.m(), 10);
        assert_eq!(inst.l(), 15);
        assert_eq!(inst.y, &inst.m_mat * &inst.x);
        let gamma = op.analyze(&inst.x);
        for &j in inst.cosupport.indices() {
            assert!(gamma[j].abs() <= 1e-10 * inst.x.norm());
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_tight_frame(15, 12, RngSeed(77)).unwrap();
        let b = generate_tight_frame(15, 12, RngSeed(77)).unwrap();
        assert_eq!(a.omega(), b.omega());
        let i1 = make_instance(&a, 0.75, 0.4, RngSeed(5)).unwrap();
        let i2 = make_instance(&b, 0.75, 0.4, RngSeed(5)).unwrap();
        assert_eq!(i1, i2);
        let i3 = make_instance(&a, 0.75, 0.4, RngSeed(6)).unwrap();
        assert_ne!(i1.x, i3.x);
    }

    #[test]
    fn derived_seeds_differ() {
        let s = RngSeed(42);
        assert_ne!(s.derive(0), s.derive(1));
        assert_ne!(s.derive(1), RngSeed(43).derive(1));
        assert_eq!(s.derive(7), RngSeed(42).derive(7));
    }

    #[test]
    fn cosupport_validation() {
        let c = Cosupport::new(vec![3, 1, 2], 4).unwrap();
        assert_eq!(c.indices(), &[1, 2, 3]);
        assert!(c.contains(2) && !c.contains(0));
        assert!(Cosupport::new(vec![1, 1], 4).is_err());
        assert!(Cosupport::new(vec![4], 4).is_err());
    }
}
