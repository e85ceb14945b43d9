//! Integers as plain JSON numbers of any size.

use num_bigint::BigInt;
use serde_json::{Number, Value};

pub fn int(n: &BigInt) -> Value {
    Value::Number(
        n.to_string()
            .parse::<Number>()
            .expect("decimal integer is a JSON number"),
    )
}

pub fn ints<'a, I>(values: I) -> Value
where
    I: IntoIterator<Item = &'a BigInt>,
{
    Value::Array(values.into_iter().map(int).collect())
}

pub fn parse_int(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n.to_string().parse().ok(),
        _ => None,
    }
}

pub fn parse_ints(v: &Value) -> Option<Vec<BigInt>> {
    v.as_array()?.iter().map(parse_int).collect()
}
