use thiserror::Error;

/// Errors split into two families: domain errors (invalid parameters,
/// violated preconditions) and capacity errors (inputs past the configured
/// desk-scale limits). The CLI maps them to exit codes 1 and 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("field order {q} exceeds the construction limit {cap}")]
    FieldTooLarge { q: u64, cap: u64 },
    #[error("field order {q} exceeds the table limit {cap} and tables were required")]
    TablesUnavailable { q: u64, cap: u64 },
    #[error("{q} is not a prime power")]
    NotPrimePower { q: u64 },
    #[error("element index {idx} out of range for field of order {q}")]
    IndexOutOfRange { idx: u64, q: u64 },
    #[error("coefficient {c} out of range for characteristic {p}")]
    CoefficientOutOfRange { c: u64, p: u64 },
    #[error("discrete log requires exp/log tables (field of order {q} is table-free)")]
    NoTables { q: u64 },
    #[error("discrete log of zero is undefined")]
    DiscreteLogOfZero,
    #[error("division by zero in the field")]
    DivisionByZero,
    #[error("field of order {ext} does not extend a field of order {base}")]
    IncompatibleOrders { base: u64, ext: u64 },
    #[error("field of order {q} is not a quadratic extension of a field of order {q_base}")]
    NotQuadratic { q: u64, q_base: u64 },
    #[error("serialized field does not match the deterministic construction for p={p}, m={m}")]
    FieldDescriptionMismatch { p: u64, m: u32 },

    #[error("{d} does not divide {modulus}")]
    NonDivisor { d: u64, modulus: u64 },
    #[error("no lift exists: gcd({r}, {step}) != 1")]
    NoLift { r: u64, step: u64 },
    #[error("{t} is not a unit modulo {modulus}")]
    NotAUnit { t: u64, modulus: u64 },

    #[error("binomial coefficients must be nonzero")]
    ZeroCoefficient,
    #[error("exponent {exp} reduces to 0 mod {modulus}; binomial exponents must be nonzero units of the exponent group")]
    ExponentZero { exp: u64, modulus: u64 },
    #[error("exponents {e1} and {e2} are congruent mod {modulus}; a binomial needs two distinct terms")]
    CongruentExponents { e1: u64, e2: u64, modulus: u64 },
    #[error("family parameters are degenerate: {which} is 0 mod q^e - 1")]
    DegenerateFamily { which: &'static str },
    #[error("family parameters do not match the field: expected order {expected}, field has order {actual}")]
    FamilyFieldMismatch { expected: u64, actual: u64 },
    #[error("operation requires a quadratic extension (e = 2), got e = {e}")]
    NotQuadraticFamily { e: u32 },
    #[error("operands live in different fields ({q1} vs {q2})")]
    FieldMismatch { q1: u64, q2: u64 },

    #[error("enumeration over {q} elements exceeds the cap {cap} for {what}")]
    EnumerationCap { q: u64, cap: u64, what: &'static str },

    #[error("exponent {n} is not an orbit minimum for d = {d}")]
    NotInNd { n: u64, d: u64 },
    #[error("binomial is not a permutation of its field; canonical triples are defined for permutation binomials")]
    NotAPermutation,

    #[error("hypothesis violated: {what}")]
    HypothesisViolated { what: &'static str },
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("degree parameter {value} exceeds the cap {cap} for dense polynomial work")]
    DegreeCap { value: u64, cap: u64 },

    #[error("unknown result id {0:?}")]
    UnknownResultId(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("internal invariant broke: {0}")]
    Internal(String),
}

impl Error {
    /// True for resource-limit errors (CLI exit code 2); everything else is a
    /// domain error (exit code 1).
    pub fn is_capacity(&self) -> bool {
        matches!(
            self,
            Error::FieldTooLarge { .. }
                | Error::TablesUnavailable { .. }
                | Error::EnumerationCap { .. }
                | Error::DegreeCap { .. }
        )
    }
}
