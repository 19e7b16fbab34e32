use thiserror::Error;

/// Everything that can go wrong while building or evaluating the geometry.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid cone: {0}")]
    InvalidCone(ConeDefect),

    #[error("facet {index}: {defect}")]
    InvalidFacet { index: usize, defect: FacetDefect },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("direction is not in the interior of the cone")]
    OutsideDomain,

    #[error("direction is orthogonal to the normal of facet {facet}")]
    DegenerateDirection { facet: usize },

    #[error("quadrature grid is empty at resolution {resolution}; increase the resolution")]
    EmptyGrid { resolution: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid decay pair: {0}")]
    InvalidDecay(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ConeDefect {
    #[error("axis is not a unit vector")]
    NonUnitAxis,
    #[error("half angle must lie in (0, pi/2)")]
    HalfAngleOutOfRange,
    #[error("generator {0} is not a unit vector")]
    NonUnitGenerator(usize),
    #[error("no generators given")]
    Empty,
    #[error("generators have inconsistent dimensions")]
    RaggedGenerators,
    #[error("dimension must be at least 2")]
    DimensionTooSmall,
    #[error("polyhedral cones are supported in dimensions 2 and 3 only")]
    UnsupportedDimension,
    #[error("not pointed: the cone contains a line")]
    ContainsLine,
    #[error("empty interior: generators do not span the space")]
    LowerDimensional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum FacetDefect {
    #[error("normal is not a unit vector")]
    NonUnitNormal,
    #[error("normal lies outside the dual cone")]
    NormalOutsideDual,
    #[error("depth must be positive and finite")]
    NonPositiveDepth,
    #[error("normal duplicates an earlier facet")]
    DuplicateNormal,
    #[error("wrong dimension")]
    WrongDimension,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
