use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type RationalVector = Vec<BigRational>;

pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rational_vector(entries: &[(i64, i64)]) -> RationalVector {
    entries.iter().map(|&(p, q)| ratio(p, q)).collect()
}

pub fn int_rational_vector(entries: &[i64]) -> RationalVector {
    entries.iter().map(|&p| ratio(p, 1)).collect()
}

/// Always "p/q", with a positive denominator in lowest terms.
pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::ConfigError(format!("cannot parse rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(BigRational::new(p, BigInt::one()))
        }
    }
}

pub fn to_f64(v: &RationalVector) -> Vec<f64> {
    v.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect()
}

/// Exact rational value of each float (binary expansion).
pub fn from_f64_exact(v: &[f64]) -> Result<RationalVector> {
    v.iter()
        .map(|&x| {
            BigRational::from_float(x)
                .ok_or_else(|| Error::DegenerateInput(format!("non-finite entry {x}")))
        })
        .collect()
}

/// Serde adapter: rational vectors as arrays of "p/q" strings.
pub mod serde_rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &RationalVector, s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(format_rational).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<RationalVector, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        strs.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_strings() {
        let q = ratio(-4, 6);
        assert_eq!(format_rational(&q), "-2/3");
        assert_eq!(parse_rational("-2/3").unwrap(), q);
        assert_eq!(parse_rational("5").unwrap(), ratio(5, 1));
        assert_eq!(format_rational(&ratio(5, 1)), "5/1");
        assert!(parse_rational("1/0").is_err());
    }
}
