//! Oracle unitaries built from a scheme's classical functions.
//!
//! Type-1 operators XOR a function value into an output register. The
//! canonical type-2 operators are compositions of type-1 operators with a
//! wire swap in between: Enc, swap, then Dec (needs `sk`) or Rec (needs only
//! `pk`) to uncompute the message register. The result maps
//! `|r, m, 0…0⟩ ↦ |r, Enc_pk(m; r), 0…0⟩`.

mod audit;
pub mod circuit;
mod contract;
mod oracle;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

pub use audit::{Audit, AuditSnapshot};
pub use contract::{
    check_bijective, check_involution, check_type2_contract, CheckOutcome, ContractViolation,
};
pub use oracle::{type2_oracle_call, type2_oracle_call_at, type2_oracle_call_full};

use crate::bits::mask;
use crate::qsim::{BasisPermutation, QsimError, RegisterLayout};
use crate::rng::invert_permutation;
use crate::schemes::{ClassicalScheme, Keypair, SchemeRef, SchemeWidths};
use audit::Audited;
use circuit::{chain, relabel, reorder, xor_oracle};

/// Register names shared by every builder.
pub mod reg {
    pub const R: &str = "r";
    pub const M: &str = "m";
    pub const Y: &str = "y";
    pub const C: &str = "c";
    pub const Z: &str = "z";
    pub const PAD: &str = "pad";
    pub const WORK: &str = "work";
    pub const TDF_WORK: &str = "tdf_work";
    pub(crate) const T: &str = "t";
}

/// Largest `r_bits + m_bits` for the exhaustive construction-time checks.
pub const PRECHECK_CAP: u32 = 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OperatorKind {
    Type1Enc,
    Type1Dec,
    Type1Rec,
    Type2Canonical,
    TypePi,
    Type2Transformed,
}

/// Which circuit realizes a type-2 operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    /// Enc, swap, Dec: perfectly correct schemes, needs `sk`.
    ViaDec,
    /// Enc, swap, Rec: recoverable schemes, `pk` only.
    ViaRec,
    /// Trapdoor permutation in front of the Rec circuit of the inner scheme.
    Transformed,
}

impl Construction {
    pub fn label(self) -> &'static str {
        match self {
            Construction::ViaDec => "fig2",
            Construction::ViaRec => "fig3",
            Construction::Transformed => "transformed",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum KeyMaterial {
    PublicOnly,
    PublicAndSecret,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error("scheme {0} declares no Rec")]
    NotRecoverable(String),
    #[error("decryption fails for m = {m}, r = {r}")]
    NotPerfectlyCorrect { m: u64, r: u64 },
    #[error("Rec returns {got} instead of m = {m} at r = {r}")]
    RecoveryCheckFailed { m: u64, r: u64, got: u64 },
    #[error("trapdoor tables disagree at {0}")]
    InconsistentTrapdoor(u64),
    #[error("scheme {0} is not a trapdoor-transformed scheme")]
    NotTransformed(String),
    #[error("exhaustive check over {width} bits exceeds cap {cap}")]
    WidthOverflow { width: u32, cap: u32 },
    #[error("operator of kind {0:?} is not a type-2 operator")]
    NotType2(OperatorKind),
    #[error("message permutation is not a bijection on {0} bits")]
    NotABijection(u32),
}

/// A built oracle unitary together with its provenance.
#[derive(Clone, Debug)]
pub struct OracleOperator {
    kind: OperatorKind,
    construction: Option<Construction>,
    perm: BasisPermutation,
    key_material: KeyMaterial,
    audit: Arc<Audit>,
    scheme_name: String,
    widths: SchemeWidths,
    ancillas: Vec<String>,
}

impl OracleOperator {
    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn construction(&self) -> Option<Construction> {
        self.construction
    }

    pub fn perm(&self) -> &BasisPermutation {
        &self.perm
    }

    pub fn layout(&self) -> &RegisterLayout {
        self.perm.input()
    }

    pub fn output_layout(&self) -> &RegisterLayout {
        self.perm.output()
    }

    pub fn key_material(&self) -> KeyMaterial {
        self.key_material
    }

    pub fn audit(&self) -> AuditSnapshot {
        self.audit.snapshot()
    }

    pub fn scheme_name(&self) -> &str {
        &self.scheme_name
    }

    pub fn widths(&self) -> &SchemeWidths {
        &self.widths
    }

    /// Output registers restored to `|0…0⟩` by a type-2 operator.
    pub fn ancillas(&self) -> &[String] {
        &self.ancillas
    }

    /// Names of the ciphertext registers in the output layout.
    pub fn ciphertext_registers(&self) -> Vec<&str> {
        self.widths
            .ct_parts
            .iter()
            .map(|(n, _)| n.as_str())
            .collect()
    }

    pub fn is_type2(&self) -> bool {
        matches!(
            self.kind,
            OperatorKind::Type2Canonical | OperatorKind::Type2Transformed
        )
    }

    /// Output index of `|r, c, 0…0⟩` in a type-2 operator's output layout.
    pub fn type2_output_index(&self, r: u64, c: u64) -> u64 {
        let anc: u32 = self
            .ancillas
            .iter()
            .map(|n| self.output_layout().width_of(n).unwrap_or(0))
            .sum();
        (((r << self.widths.c_bits) | c) << anc) & mask(self.output_layout().total_width())
    }

    /// Input index of `|r, m, 0…0⟩` in a type-2 operator's input layout.
    pub fn type2_input_index(&self, r: u64, m: u64) -> u64 {
        let rest = self.layout().total_width() - self.widths.r_bits - self.widths.m_bits;
        ((r << self.widths.m_bits) | m) << rest
    }
}

fn layout(spec: &[(&str, u32)]) -> Result<RegisterLayout, QsimError> {
    RegisterLayout::new_skipping_empty(spec.iter().map(|(n, w)| (n.to_string(), *w)))
}

fn ciphertext_output(w: &SchemeWidths, tail: &[(&str, u32)]) -> Result<RegisterLayout, QsimError> {
    let mut regs: Vec<(String, u32)> = Vec::new();
    if w.r_bits > 0 {
        regs.push((reg::R.into(), w.r_bits));
    }
    regs.extend(w.ct_parts.iter().cloned());
    regs.extend(
        tail.iter()
            .filter(|(_, w)| *w > 0)
            .map(|(n, w)| (n.to_string(), *w)),
    );
    RegisterLayout::new(regs)
}

/// Splits a register-argument slice into `(r, rest)` when `r` may be absent.
fn with_r(has_r: bool, a: &[u64]) -> (u64, &[u64]) {
    if has_r {
        (a[0], &a[1..])
    } else {
        (0, a)
    }
}

fn r_inputs<'a>(has_r: bool, rest: &[&'a str]) -> Vec<&'a str> {
    let mut v = Vec::with_capacity(rest.len() + 1);
    if has_r {
        v.push(reg::R);
    }
    v.extend_from_slice(rest);
    v
}

/// `y ^= Enc_pk(m; r)` on `layout`, which must hold `r` (if any), `m` and `target`.
fn enc_step(
    s: &Arc<Audited>,
    pk: u64,
    layout: &RegisterLayout,
    target: &str,
) -> Result<BasisPermutation, QsimError> {
    let has_r = s.widths().r_bits > 0;
    let s = s.clone();
    xor_oracle(layout, &r_inputs(has_r, &[reg::M]), target, move |a| {
        let (r, rest) = with_r(has_r, a);
        s.enc(pk, rest[0], r)
    })
}

/// `z ^= Rec_pk(r, c)`.
fn rec_step(
    s: &Arc<Audited>,
    pk: u64,
    layout: &RegisterLayout,
) -> Result<BasisPermutation, QsimError> {
    let has_r = s.widths().r_bits > 0;
    let s = s.clone();
    xor_oracle(layout, &r_inputs(has_r, &[reg::C]), reg::Z, move |a| {
        let (r, rest) = with_r(has_r, a);
        s.rec(pk, r, rest[0]).expect("Rec declared")
    })
}

/// `z ^= Dec_sk(c)`.
fn dec_step(
    s: &Arc<Audited>,
    sk: u64,
    layout: &RegisterLayout,
) -> Result<BasisPermutation, QsimError> {
    let s = s.clone();
    xor_oracle(layout, &[reg::C], reg::Z, move |a| s.dec(sk, a[0]))
}

fn audited(scheme: &SchemeRef) -> (Arc<Audit>, Arc<Audited>) {
    let audit = Arc::new(Audit::default());
    let s = Audited::wrap(scheme.clone(), audit.clone());
    (audit, s)
}

fn precheck_width(w: &SchemeWidths) -> Result<(), OperatorError> {
    let width = w.r_bits + w.m_bits;
    if width > PRECHECK_CAP {
        return Err(OperatorError::WidthOverflow {
            width,
            cap: PRECHECK_CAP,
        });
    }
    Ok(())
}

/// `(r, m, y) ↦ (r, m, y ⊕ Enc_pk(m; r))` on `{r, m, y}`.
pub fn build_type1_enc(scheme: &SchemeRef, pk: u64) -> Result<OracleOperator, OperatorError> {
    let w = scheme.widths().clone();
    let (audit, s) = audited(scheme);
    let l = layout(&[(reg::R, w.r_bits), (reg::M, w.m_bits), (reg::Y, w.c_bits)])?;
    let perm = enc_step(&s, pk, &l, reg::Y)?;
    Ok(OracleOperator {
        kind: OperatorKind::Type1Enc,
        construction: None,
        perm,
        key_material: KeyMaterial::PublicOnly,
        audit,
        scheme_name: scheme.name().to_string(),
        widths: w,
        ancillas: Vec::new(),
    })
}

/// `(c, z) ↦ (c, z ⊕ Dec_sk(c))` on `{c, z}`.
pub fn build_type1_dec(scheme: &SchemeRef, sk: u64) -> Result<OracleOperator, OperatorError> {
    let w = scheme.widths().clone();
    let (audit, s) = audited(scheme);
    let l = layout(&[(reg::C, w.c_bits), (reg::Z, w.m_bits)])?;
    let perm = dec_step(&s, sk, &l)?;
    Ok(OracleOperator {
        kind: OperatorKind::Type1Dec,
        construction: None,
        perm,
        key_material: KeyMaterial::PublicAndSecret,
        audit,
        scheme_name: scheme.name().to_string(),
        widths: w,
        ancillas: Vec::new(),
    })
}

/// `(r, c, z) ↦ (r, c, z ⊕ Rec_pk(r, c))` on `{r, c, z}`.
pub fn build_type1_rec(scheme: &SchemeRef, pk: u64) -> Result<OracleOperator, OperatorError> {
    if !scheme.has_rec() {
        return Err(OperatorError::NotRecoverable(scheme.name().to_string()));
    }
    let w = scheme.widths().clone();
    let (audit, s) = audited(scheme);
    let l = layout(&[(reg::R, w.r_bits), (reg::C, w.c_bits), (reg::Z, w.m_bits)])?;
    let perm = rec_step(&s, pk, &l)?;
    Ok(OracleOperator {
        kind: OperatorKind::Type1Rec,
        construction: None,
        perm,
        key_material: KeyMaterial::PublicOnly,
        audit,
        scheme_name: scheme.name().to_string(),
        widths: w,
        ancillas: Vec::new(),
    })
}

/// Input `{r, m, pad, work}` where `pad ‖ work` is the Enc output wire and
/// `work` (message width) ends up holding the uncomputed message.
fn type2_input(w: &SchemeWidths) -> Result<RegisterLayout, QsimError> {
    layout(&[
        (reg::R, w.r_bits),
        (reg::M, w.m_bits),
        (reg::PAD, w.c_bits - w.m_bits),
        (reg::WORK, w.m_bits),
    ])
}

/// Enc, swap, then `uncompute` on `{r, c, z}`.
fn canonical_circuit(
    s: &Arc<Audited>,
    pk: u64,
    uncompute: BasisPermutation,
) -> Result<BasisPermutation, QsimError> {
    let w = s.widths().clone();
    let input = type2_input(&w)?;
    let rmy = layout(&[(reg::R, w.r_bits), (reg::M, w.m_bits), (reg::Y, w.c_bits)])?;
    let rcz = layout(&[(reg::R, w.r_bits), (reg::C, w.c_bits), (reg::Z, w.m_bits)])?;
    let output = ciphertext_output(&w, &[(reg::WORK, w.m_bits)])?;
    let swap = reorder(&rmy, &r_inputs(w.r_bits > 0, &[reg::Y, reg::M]))?;
    chain(vec![
        relabel(&input, &rmy)?,
        enc_step(s, pk, &rmy, reg::Y)?,
        swap.clone(),
        relabel(swap.output(), &rcz)?,
        uncompute,
        relabel(&rcz, &output)?,
    ])
}

fn check_width_order(w: &SchemeWidths) -> Result<(), OperatorError> {
    if w.c_bits < w.m_bits {
        return Err(QsimError::LayoutMismatch(format!(
            "ciphertext width {} below message width {}",
            w.c_bits, w.m_bits
        ))
        .into());
    }
    Ok(())
}

/// Enc, swap, Dec-uncompute. Requires exhaustive perfect correctness on `keys`.
pub fn build_type2_canonical_perfect(
    scheme: &SchemeRef,
    keys: Keypair,
) -> Result<OracleOperator, OperatorError> {
    let w = scheme.widths().clone();
    check_width_order(&w)?;
    precheck_width(&w)?;
    let (audit, s) = audited(scheme);
    for r in 0..1u64 << w.r_bits {
        for m in 0..1u64 << w.m_bits {
            if s.dec(keys.sk, s.enc(keys.pk, m, r)) != m {
                return Err(OperatorError::NotPerfectlyCorrect { m, r });
            }
        }
    }
    dec_circuit_unchecked(scheme, keys, audit, s)
}

fn dec_circuit_unchecked(
    scheme: &SchemeRef,
    keys: Keypair,
    audit: Arc<Audit>,
    s: Arc<Audited>,
) -> Result<OracleOperator, OperatorError> {
    let w = scheme.widths().clone();
    let rcz = layout(&[(reg::R, w.r_bits), (reg::C, w.c_bits), (reg::Z, w.m_bits)])?;
    let perm = canonical_circuit(&s, keys.pk, dec_step(&s, keys.sk, &rcz)?)?;
    Ok(OracleOperator {
        kind: OperatorKind::Type2Canonical,
        construction: Some(Construction::ViaDec),
        perm,
        key_material: KeyMaterial::PublicAndSecret,
        audit,
        scheme_name: scheme.name().to_string(),
        widths: w,
        ancillas: vec![reg::WORK.to_string()],
    })
}

/// Enc, swap, Rec-uncompute. Requires Rec to pass an exhaustive check on `pk`.
/// Never evaluates Dec and never sees `sk`.
pub fn build_type2_canonical_recoverable(
    scheme: &SchemeRef,
    pk: u64,
) -> Result<OracleOperator, OperatorError> {
    if !scheme.has_rec() {
        return Err(OperatorError::NotRecoverable(scheme.name().to_string()));
    }
    let w = scheme.widths().clone();
    check_width_order(&w)?;
    precheck_width(&w)?;
    let (audit, s) = audited(scheme);
    for r in 0..1u64 << w.r_bits {
        for m in 0..1u64 << w.m_bits {
            let got = s.rec(pk, r, s.enc(pk, m, r)).expect("Rec declared");
            if got != m {
                return Err(OperatorError::RecoveryCheckFailed { m, r, got });
            }
        }
    }
    rec_circuit_unchecked(scheme, pk, audit, s)
}

fn rec_circuit_unchecked(
    scheme: &SchemeRef,
    pk: u64,
    audit: Arc<Audit>,
    s: Arc<Audited>,
) -> Result<OracleOperator, OperatorError> {
    let w = scheme.widths().clone();
    let rcz = layout(&[(reg::R, w.r_bits), (reg::C, w.c_bits), (reg::Z, w.m_bits)])?;
    let perm = canonical_circuit(&s, pk, rec_step(&s, pk, &rcz)?)?;
    Ok(OracleOperator {
        kind: OperatorKind::Type2Canonical,
        construction: Some(Construction::ViaRec),
        perm,
        key_material: KeyMaterial::PublicOnly,
        audit,
        scheme_name: scheme.name().to_string(),
        widths: w,
        ancillas: vec![reg::WORK.to_string()],
    })
}

/// Builds a canonical circuit without the construction-time checks, so that a
/// contract checker can observe what a faulty scheme actually does.
pub fn build_type2_unchecked(
    scheme: &SchemeRef,
    keys: Keypair,
    construction: Construction,
) -> Result<OracleOperator, OperatorError> {
    check_width_order(scheme.widths())?;
    let (audit, s) = audited(scheme);
    match construction {
        Construction::ViaDec => dec_circuit_unchecked(scheme, keys, audit, s),
        Construction::ViaRec if scheme.has_rec() => {
            rec_circuit_unchecked(scheme, keys.pk, audit, s)
        }
        Construction::ViaRec => Err(OperatorError::NotRecoverable(scheme.name().to_string())),
        Construction::Transformed => transformed_unchecked(scheme, keys.pk),
    }
}

/// `(r, m, y) ↦ (r, π(m), y ⊕ Enc_pk(m; r))`.
pub fn build_type_pi(
    scheme: &SchemeRef,
    pk: u64,
    pi: &[u64],
) -> Result<OracleOperator, OperatorError> {
    let w = scheme.widths().clone();
    if pi.len() != 1usize << w.m_bits || invert_permutation(pi).is_none() {
        return Err(OperatorError::NotABijection(w.m_bits));
    }
    let (audit, s) = audited(scheme);
    let l = layout(&[(reg::R, w.r_bits), (reg::M, w.m_bits), (reg::Y, w.c_bits)])?;
    let (shift, width) = l.field(reg::M)?;
    let table: Arc<[u64]> = pi.into();
    let mask_m = BasisPermutation::from_fn(l.clone(), l.clone(), move |i| {
        let m = (i >> shift) & mask(width);
        (i & !(mask(width) << shift)) | (table[m as usize] << shift)
    })?;
    let perm = enc_step(&s, pk, &l, reg::Y)?.then(&mask_m)?;
    Ok(OracleOperator {
        kind: OperatorKind::TypePi,
        construction: None,
        perm,
        key_material: KeyMaterial::PublicOnly,
        audit,
        scheme_name: scheme.name().to_string(),
        widths: w,
        ancillas: Vec::new(),
    })
}

/// Type-2 operator of a trapdoor-transformed scheme.
///
/// `t ^= F(m)`, swap `m ↔ t`, `t ^= F⁻¹(m)` (clearing `t`), then the Rec
/// circuit of the inner scheme on the permuted message. Evaluating `F⁻¹` uses
/// the trapdoor, so the operator is flagged as using secret material.
pub fn build_type2_transformed(
    scheme: &SchemeRef,
    pk: u64,
) -> Result<OracleOperator, OperatorError> {
    let t = scheme
        .as_transformed()
        .ok_or_else(|| OperatorError::NotTransformed(scheme.name().to_string()))?;
    t.check_trapdoor().map_err(|e| match e {
        crate::schemes::SchemeError::InconsistentTrapdoor(x) => {
            OperatorError::InconsistentTrapdoor(x)
        }
        _ => OperatorError::NotTransformed(scheme.name().to_string()),
    })?;
    let inner = t.inner();
    let w = inner.widths().clone();
    precheck_width(&w)?;
    for r in 0..1u64 << w.r_bits {
        for m in 0..1u64 << w.m_bits {
            let got = inner.rec(pk, r, inner.enc(pk, m, r)).expect("Rec declared");
            if got != m {
                return Err(OperatorError::RecoveryCheckFailed { m, r, got });
            }
        }
    }
    transformed_unchecked(scheme, pk)
}

fn transformed_unchecked(scheme: &SchemeRef, pk: u64) -> Result<OracleOperator, OperatorError> {
    let t = scheme
        .as_transformed()
        .ok_or_else(|| OperatorError::NotTransformed(scheme.name().to_string()))?
        .clone();
    let (audit, s) = audited(t.inner());
    let w = t.inner().widths().clone();
    check_width_order(&w)?;
    let has_r = w.r_bits > 0;
    let input = layout(&[
        (reg::R, w.r_bits),
        (reg::M, w.m_bits),
        (reg::TDF_WORK, w.m_bits),
        (reg::PAD, w.c_bits - w.m_bits),
        (reg::WORK, w.m_bits),
    ])?;
    let rmty = layout(&[
        (reg::R, w.r_bits),
        (reg::M, w.m_bits),
        (reg::T, w.m_bits),
        (reg::Y, w.c_bits),
    ])?;
    let rctz = layout(&[
        (reg::R, w.r_bits),
        (reg::C, w.c_bits),
        (reg::T, w.m_bits),
        (reg::Z, w.m_bits),
    ])?;
    let output = ciphertext_output(&w, &[(reg::TDF_WORK, w.m_bits), (reg::WORK, w.m_bits)])?;

    let (tf, af) = (Arc::new(t.clone()), audit.clone());
    let forward = xor_oracle(&rmty, &[reg::M], reg::T, move |a| {
        af.count_tdf();
        tf.tdf(a[0])
    })?;
    let swap_mt = reorder(&rmty, &r_inputs(has_r, &[reg::T, reg::M, reg::Y]))?;
    let (ti, ai) = (Arc::new(t), audit.clone());
    let inverse = xor_oracle(&rmty, &[reg::M], reg::T, move |a| {
        ai.count_tdf_inverse();
        ti.tdf_inverse(a[0])
    })?;
    let swap_my = reorder(&rmty, &r_inputs(has_r, &[reg::Y, reg::T, reg::M]))?;
    let perm = chain(vec![
        relabel(&input, &rmty)?,
        forward,
        swap_mt.clone(),
        relabel(swap_mt.output(), &rmty)?,
        inverse,
        enc_step(&s, pk, &rmty, reg::Y)?,
        swap_my.clone(),
        relabel(swap_my.output(), &rctz)?,
        rec_step(&s, pk, &rctz)?,
        relabel(&rctz, &output)?,
    ])?;
    Ok(OracleOperator {
        kind: OperatorKind::Type2Transformed,
        construction: Some(Construction::Transformed),
        perm,
        key_material: KeyMaterial::PublicAndSecret,
        audit,
        scheme_name: scheme.name().to_string(),
        widths: w,
        ancillas: vec![reg::TDF_WORK.to_string(), reg::WORK.to_string()],
    })
}

/// The type-2 operator for `construction`, with its construction-time checks.
pub fn build_type2(
    scheme: &SchemeRef,
    keys: Keypair,
    construction: Construction,
) -> Result<OracleOperator, OperatorError> {
    match construction {
        Construction::ViaDec => build_type2_canonical_perfect(scheme, keys),
        Construction::ViaRec => build_type2_canonical_recoverable(scheme, keys.pk),
        Construction::Transformed => build_type2_transformed(scheme, keys.pk),
    }
}
