//! Complex numbers as `{"re": .., "im": ..}`; non-finite parts become `null`.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
struct Repr {
    re: Option<f64>,
    im: Option<f64>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    Repr {
        re: finite(z.re),
        im: finite(z.im),
    }
    .serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
    let r = Repr::deserialize(d)?;
    Ok(Complex64::new(r.re.unwrap_or(f64::NAN), r.im.unwrap_or(f64::NAN)))
}

pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Option<Complex64>, s: S) -> Result<S::Ok, S::Error> {
        z.map(|z| Repr {
            re: finite(z.re),
            im: finite(z.im),
        })
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Complex64>, D::Error> {
        Ok(Option::<Repr>::deserialize(d)?
            .map(|r| Complex64::new(r.re.unwrap_or(f64::NAN), r.im.unwrap_or(f64::NAN))))
    }
}
