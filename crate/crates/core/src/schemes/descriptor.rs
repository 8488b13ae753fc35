use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{
    almost_constant_scheme, corrupt_rec, hybrid_pke, ske_otp_prf, ske_random_perm, toy_lwe,
    toy_perm, toy_rollo, transformed_scheme, EncodeParams, ErrorProfile, SchemeError, SchemeRef,
    SchemeWidths, SkeRef, SkeWidths,
};
use crate::rng::derive_seed;

/// Serializable recipe for a scheme: `{name, widths, seed, params}`.
///
/// Building the same descriptor twice yields schemes with identical tables.
/// `widths` is informational on output and ignored on input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeDescriptor {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub widths: Option<Value>,
    pub seed: u64,
    #[serde(default = "empty_params")]
    pub params: Value,
}

fn empty_params() -> Value {
    Value::Object(Map::new())
}

impl SchemeDescriptor {
    pub fn new(name: &str, seed: u64, params: Value) -> Self {
        Self {
            name: name.to_string(),
            widths: None,
            seed,
            params,
        }
    }

    pub fn with_widths(mut self, widths: SchemeWidths) -> Self {
        self.widths = serde_json::to_value(widths).ok();
        self
    }

    pub fn with_ske_widths(mut self, widths: SkeWidths) -> Self {
        self.widths = serde_json::to_value(widths).ok();
        self
    }

    fn param(&self, key: &str) -> Option<&Value> {
        self.params.get(key).filter(|v| !v.is_null())
    }

    fn u64_param(&self, key: &str, default: u64) -> Result<u64, SchemeError> {
        match self.param(key) {
            None => Ok(default),
            Some(v) => v.as_u64().ok_or_else(|| {
                SchemeError::Descriptor(format!(
                    "{}: `{key}` must be a non-negative integer",
                    self.name
                ))
            }),
        }
    }

    fn u32_param(&self, key: &str, default: u32) -> Result<u32, SchemeError> {
        let v = self.u64_param(key, default as u64)?;
        u32::try_from(v)
            .map_err(|_| SchemeError::Descriptor(format!("{}: `{key}` is too large", self.name)))
    }

    /// A nested scheme parameter given either as a bare name or a full descriptor.
    fn nested(
        &self,
        key: &str,
        default: &str,
        label: u64,
    ) -> Result<SchemeDescriptor, SchemeError> {
        let seed = derive_seed(self.seed, label);
        match self.param(key) {
            None => Ok(nested_default(default, seed)),
            Some(Value::String(name)) => Ok(nested_default(name, seed)),
            Some(v) => {
                // An inline descriptor without a seed inherits the derived one.
                let mut v = v.clone();
                if let Value::Object(map) = &mut v {
                    map.entry("seed").or_insert(Value::from(seed));
                }
                serde_json::from_value(v)
            }
            .map_err(|e| SchemeError::Descriptor(format!("{}: `{key}`: {e}", self.name))),
        }
    }
}

/// Defaults for a scheme named inside a composite. A public-key scheme inside
/// a hybrid must carry the default three-bit symmetric key.
fn nested_default(name: &str, seed: u64) -> SchemeDescriptor {
    let params = match name {
        "toy-rollo" => serde_json::json!({ "l": 3, "k": 3 }),
        _ => empty_params(),
    };
    SchemeDescriptor::new(name, seed, params)
}

/// Either kind of scheme a descriptor can name.
#[derive(Clone, Debug)]
pub enum SchemeSpec {
    Pke(SchemeRef),
    Ske(SkeRef),
}

pub const PKE_NAMES: &[&str] = &[
    "toy-lwe",
    "toy-rollo",
    "hybrid",
    "transformed",
    "almost-constant",
    "toy-perm",
    "corrupt-rec",
];

pub const SKE_NAMES: &[&str] = &["ske-otp-prf", "ske-random-perm"];

impl SchemeSpec {
    pub fn build(d: &SchemeDescriptor) -> Result<Self, SchemeError> {
        let pke = |s: SchemeRef| Ok(SchemeSpec::Pke(s));
        match d.name.as_str() {
            "toy-lwe" => {
                let n = d.u32_param("n", 4)?;
                let q = d.u64_param("q", 2)?;
                let profile = match d.param("profile") {
                    None => ErrorProfile::SparseLowWeight,
                    Some(v) => serde_json::from_value(v.clone()).map_err(|_| {
                        SchemeError::Descriptor(format!(
                            "toy-lwe: profile must be \"sparse-low-weight\" or \"dense\", got {v}"
                        ))
                    })?,
                };
                let encode = match d.param("encode") {
                    None => EncodeParams::identity(n),
                    Some(Value::String(s)) if s == "identity" => EncodeParams::identity(n),
                    Some(Value::String(s)) if s == "random" => EncodeParams::random(n, d.seed),
                    Some(v) => {
                        let pi: Vec<u32> = serde_json::from_value(v.clone()).map_err(|_| {
                            SchemeError::Descriptor(format!(
                                "toy-lwe: encode must be \"identity\", \"random\" or a position list, got {v}"
                            ))
                        })?;
                        EncodeParams::new(pi, 0, q)?
                    }
                };
                pke(Arc::new(toy_lwe(n, q, profile, encode, d.seed)?))
            }
            "toy-rollo" => pke(Arc::new(toy_rollo(
                d.u32_param("l", 1)?,
                d.u32_param("k", 3)?,
                d.seed,
            )?)),
            "hybrid" => {
                let inner = build_scheme(&d.nested("pke", "toy-rollo", 1)?)?;
                let ske = build_ske(&d.nested("ske", "ske-otp-prf", 2)?)?;
                pke(Arc::new(hybrid_pke(inner, ske)?))
            }
            "transformed" => {
                let inner = build_scheme(&d.nested("inner", "toy-rollo", 1)?)?;
                pke(Arc::new(transformed_scheme(inner, d.seed)?))
            }
            "almost-constant" => pke(Arc::new(almost_constant_scheme(
                d.u32_param("m_bits", 2)?,
                d.seed,
            )?)),
            "toy-perm" => pke(Arc::new(toy_perm(
                d.u32_param("m_bits", 2)?,
                d.u32_param("r_bits", 2)?,
                d.seed,
            )?)),
            "corrupt-rec" => {
                let inner = build_scheme(&d.nested("inner", "toy-rollo", 1)?)?;
                pke(Arc::new(corrupt_rec(inner, d.u64_param("fault_r", 0)?)?))
            }
            "ske-otp-prf" => Ok(SchemeSpec::Ske(Arc::new(ske_otp_prf(
                d.u32_param("key_bits", 3)?,
                d.u32_param("m_bits", 1)?,
                d.u32_param("nonce_bits", 2)?,
                d.seed,
            )?))),
            "ske-random-perm" => Ok(SchemeSpec::Ske(Arc::new(ske_random_perm(
                d.u32_param("key_bits", 3)?,
                d.u32_param("m_bits", 1)?,
                d.u32_param("nonce_bits", 6)?,
                d.seed,
            )?))),
            other => Err(SchemeError::UnknownScheme(other.to_string())),
        }
    }
}

/// Builds a public-key scheme from its descriptor.
pub fn build_scheme(d: &SchemeDescriptor) -> Result<SchemeRef, SchemeError> {
    match SchemeSpec::build(d)? {
        SchemeSpec::Pke(s) => Ok(s),
        SchemeSpec::Ske(_) => Err(SchemeError::Descriptor(format!(
            "`{}` is a secret-key scheme",
            d.name
        ))),
    }
}

/// Builds a secret-key scheme from its descriptor.
pub fn build_ske(d: &SchemeDescriptor) -> Result<SkeRef, SchemeError> {
    match SchemeSpec::build(d)? {
        SchemeSpec::Ske(s) => Ok(s),
        SchemeSpec::Pke(_) => Err(SchemeError::Descriptor(format!(
            "`{}` is a public-key scheme",
            d.name
        ))),
    }
}
