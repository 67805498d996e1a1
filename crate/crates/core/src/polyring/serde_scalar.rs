//! Serialize rationals as strings (`"3/4"`, `"-2"`), for use with
//! `#[serde(serialize_with = ...)]`.

use serde::ser::{SerializeSeq, Serializer};

use super::Scalar;

pub fn one<S: Serializer>(q: &Scalar, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(q)
}

pub fn option<S: Serializer>(q: &Option<Scalar>, s: S) -> Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.collect_str(q),
        None => s.serialize_none(),
    }
}

pub fn vec<S: Serializer>(v: &[Scalar], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

pub fn matrix<S: Serializer>(m: &[Vec<Scalar>], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(m.len()))?;
    for row in m {
        seq.serialize_element(&row.iter().map(ToString::to_string).collect::<Vec<_>>())?;
    }
    seq.end()
}
