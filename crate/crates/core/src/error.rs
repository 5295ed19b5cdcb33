use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus is reducible over F_{p}")]
    ReducibleModulus { p: u32 },
    #[error("modulus must be monic of degree {m}")]
    InvalidModulus { m: usize },
    #[error("operation undefined on zero")]
    ZeroInput,
    #[error("operation undefined in characteristic 2")]
    EvenCharacteristic,
    #[error("base does not generate the multiplicative group")]
    NotGenerator,
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("cannot parse field element {0:?}")]
    Parse(String),

    #[error("division by p^{k} is not exact at step {step}")]
    InexactDivision { step: usize, k: u32 },
    #[error("{lemma} identity failed at x^{degree}")]
    IdentityFailed { lemma: &'static str, degree: usize },
    #[error("valuation {num}/{den} of beta is not above the convergence bound")]
    ValuationTooSmall { num: i64, den: i64 },
    #[error("p-adic precision exhausted: {0}")]
    PrecisionLoss(String),

    #[error("e = {e} does not divide p^f - 1 = {q1}")]
    BadRamification { e: u32, q1: u64 },
    #[error("unramified degree {g} is divisible by p")]
    BadUnramifiedDegree { g: u32 },
    #[error("precision horizon exceeded: {0}")]
    PrecisionExceeded(String),
    #[error("Galois element does not fix the tower unit")]
    NotAnAutomorphism,

    #[error("norm of zero")]
    ZeroElement,
    #[error("norm subgroup has index {found}, expected {expected}")]
    IndexMismatch { expected: u64, found: u64 },
    #[error("annihilator of the norm group has dimension {0}")]
    AmbiguousKernel(usize),
    #[error("unsupported extension: {0}")]
    UnsupportedExtension(String),

    #[error("invalid tame signature: {0}")]
    InvalidSignature(String),
    #[error("weight does not occur in the recipe")]
    WeightNotInRecipe,
    #[error("character is reducible: exponent divisible by p^f + 1")]
    ReducibleInput,

    #[error("character is not trivial on the tower: {0}")]
    TowerTooSmall(String),
    #[error("level {0} is not a basis level")]
    LevelMismatch(u32),
    #[error("class and descriptor use different bases")]
    BasisMismatch,

    #[error("fixture error: {0}")]
    Fixture(String),

    #[error("norm {0} is divisible by 3")]
    BadNorm(u64),
    #[error("no class matches b = {b} (square: {square})")]
    NoMatch { b: String, square: bool },
}

pub type Result<T> = std::result::Result<T, Error>;
