use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point is off the manifold (max constraint residual {residual:.3e})")]
    OffManifold { residual: f64 },

    #[error("constraint jacobian has rank {rank}, expected {expected} (singular point)")]
    RankDeficient { rank: usize, expected: usize },

    #[error("contact check needs an odd-dimensional manifold, got dimension {0}")]
    EvenDimension(usize),

    #[error("manifold dimension {0} is outside the supported range (at most 7)")]
    UnsupportedDimension(usize),

    #[error("Reeb system is singular at this point (contact condition fails)")]
    SingularReebSystem,

    #[error("Reeb residual {0:.3e} exceeds tolerance")]
    ReebResidual(f64),

    #[error("index {index} out of range for {len} generators")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("matrix is not antisymmetric (max asymmetry {0:.3e})")]
    NotAntisymmetric(f64),

    #[error("bilinear form is degenerate")]
    DegenerateForm,

    #[error("structure constants are not antisymmetric at ({i}, {j}, {k})")]
    StructureAntisymmetry { i: usize, j: usize, k: usize },

    #[error("Jacobi identity fails for basis triple ({i}, {j}, {k}) in algebra `{algebra}`")]
    JacobiViolation {
        algebra: String,
        i: usize,
        j: usize,
        k: usize,
    },

    #[error("kernel algebra is not an ideal of the stabilizer (|<mu,[A,B]>| = {0:.3e})")]
    IdealViolation(f64),

    #[error("generator matrices do not represent the algebra: [M_{i}, M_{j}] mismatch {residual:.3e}")]
    NotARepresentation { i: usize, j: usize, residual: f64 },

    #[error("contact form is not invariant under generator {generator}: Lie derivative has max coefficient {residual:.3e}")]
    FormNotInvariant { generator: usize, residual: f64 },

    #[error("generator {generator} is not tangent to constraint {constraint}: derivative has max coefficient {residual:.3e}")]
    NotTangent {
        generator: usize,
        constraint: usize,
        residual: f64,
    },

    #[error("conformal factor is not positive at a sample (value {0:.3e})")]
    NonPositiveFactor(f64),

    #[error("integration left the manifold (residual {0:.3e} after re-projection)")]
    LeftManifold(f64),

    #[error("mu must be nonzero")]
    ZeroMu,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no dimension is shared by at least 90% of {total} samples (best: {best} on {count})")]
    NoDimensionConsensus {
        best: usize,
        count: usize,
        total: usize,
    },

    #[error("numeric dimension {numeric} disagrees with the formula value {formula}")]
    InconsistentDimension { numeric: usize, formula: usize },

    #[error("level set is empty: {0}")]
    EmptyLevel(String),

    #[error("mu is not a regular value and the level set is not clean at the samples")]
    NotRegular,

    #[error("scenario `{0}` has no torus weight matrix")]
    NotTorus(String),

    #[error("scenario `{0}` is bookkeeping-only and has no numeric action")]
    BookkeepingOnly(String),

    #[error("negative quotient dimension (stratum {stratum_dim}, orbit {orbit_dim})")]
    NegativeQuotient { stratum_dim: usize, orbit_dim: usize },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("unknown algebra `{0}`")]
    UnknownAlgebra(String),

    #[error("unknown check `{0}`")]
    UnknownCheck(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
