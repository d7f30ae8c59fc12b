//! Serialization of non-finite floats as the strings `"inf"`, `"-inf"`,
//! `"nan"`, which JSON cannot represent natively.

use serde::Serializer;

pub fn extended_f64<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
    if value.is_nan() {
        s.serialize_str("nan")
    } else if *value == f64::INFINITY {
        s.serialize_str("inf")
    } else if *value == f64::NEG_INFINITY {
        s.serialize_str("-inf")
    } else {
        s.serialize_f64(*value)
    }
}
