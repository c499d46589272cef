//! Arbitrary-precision rational scalars and vectors, the l1/l-infinity
//! norms, and the binary encoding lengths that drive the granularity
//! constants of the reductions.
//!
//! `Rat` is kept in canonical form by construction (reduced, positive
//! denominator, zero is 0/1), so exact equality is structural equality.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub use num_rational::BigRational as Rat;

/// A point or direction in Q^n. Length is fixed by context.
pub type Point = Vec<Rat>;

/// Norm selector for the inverse objective `||c - d||`.
///
/// Only l1 and l-infinity keep the problem linear; the Euclidean norm is out
/// of scope because its unit ball has irrational boundary points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    Linf,
}

impl Norm {
    /// The dual norm: l1 and l-infinity are dual to each other.
    pub fn dual(self) -> Norm {
        match self {
            Norm::L1 => Norm::Linf,
            Norm::Linf => Norm::L1,
        }
    }

    pub fn eval(self, v: &[Rat]) -> Rat {
        norm(v, self)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Norm::L1 => "l1",
            Norm::Linf => "linf",
        }
    }

    pub fn parse(s: &str) -> Option<Norm> {
        match s {
            "l1" => Some(Norm::L1),
            "linf" => Some(Norm::Linf),
            _ => None,
        }
    }
}

impl std::fmt::Display for Norm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `p/q` as an exact rational. Panics on `q = 0`.
pub fn ratio(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// `2^exp`, exact for negative exponents as well.
pub fn pow2(exp: i64) -> Rat {
    let mag = BigInt::one() << exp.unsigned_abs();
    if exp >= 0 {
        Rat::from_integer(mag)
    } else {
        Rat::new(BigInt::one(), mag)
    }
}

pub fn zeros(n: usize) -> Vec<Rat> {
    vec![Rat::zero(); n]
}

pub fn is_zero_vec(v: &[Rat]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Rat], k: &Rat) -> Vec<Rat> {
    a.iter().map(|x| x * k).collect()
}

/// Encoding length of an integer: `1 + ceil(log2(|n| + 1))`.
pub fn encoding_length_int(n: &BigInt) -> u64 {
    // ceil(log2(m + 1)) == bits(m) for m >= 0.
    1 + n.magnitude().bits()
}

/// Encoding length of a canonical rational `p/q`: `<p> + <q>`.
///
/// The denominator is always encoded, even when it is 1; this keeps the
/// bounds conservative and monotone.
pub fn encoding_length_rat(r: &Rat) -> u64 {
    encoding_length_int(r.numer()) + encoding_length_int(r.denom())
}

/// Encoding length of a vector: componentwise sum.
pub fn encoding_length_vec(v: &[Rat]) -> u64 {
    v.iter().map(encoding_length_rat).sum()
}

/// Exact l1 or l-infinity norm.
pub fn norm(v: &[Rat], which: Norm) -> Rat {
    match which {
        Norm::L1 => v.iter().map(|x| x.abs()).sum(),
        Norm::Linf => v.iter().map(|x| x.abs()).max().unwrap_or_else(Rat::zero),
    }
}

/// Squared Euclidean norm. The square stays rational, so this is the only
/// l2 quantity the crate ever materializes.
pub fn l2_norm_squared(v: &[Rat]) -> Rat {
    v.iter().map(|x| x * x).sum()
}

/// Render in the `p/q` (or plain `p` for integers) format used by every
/// file format in the crate.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `p` or `p/q`. Rejects a zero denominator and anything that is not
/// a pair of plain integers.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let (p_str, q_str) = match s.split_once('/') {
        Some((p, q)) => (p, Some(q)),
        None => (s, None),
    };
    let p: BigInt = p_str.parse().map_err(|_| format!("invalid rational `{s}`"))?;
    let q: BigInt = match q_str {
        Some(q) => q.parse().map_err(|_| format!("invalid rational `{s}`"))?,
        None => BigInt::one(),
    };
    if q.is_zero() {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(Rat::new(p, q))
}

pub fn format_vec(v: &[Rat]) -> Vec<String> {
    v.iter().map(format_rat).collect()
}

pub fn parse_vec(v: &[String]) -> Result<Vec<Rat>, String> {
    v.iter().map(|s| parse_rat(s)).collect()
}

/// Lexicographic comparison of two equal-length vectors.
pub fn lex_cmp(a: &[Rat], b: &[Rat]) -> std::cmp::Ordering {
    debug_assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            std::cmp::Ordering::Equal => continue,
            ord => return ord,
        }
    }
    std::cmp::Ordering::Equal
}
