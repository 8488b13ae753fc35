use rand::RngCore;

use super::{reg, OperatorError, OracleOperator};
use crate::qsim::{QsimError, QuantumState, RegisterLayout};
use crate::rng::uniform_bits;
use crate::scalar::Scalar;

fn check_call<T: Scalar>(
    op: &OracleOperator,
    plaintext: &QuantumState<T>,
) -> Result<(), OperatorError> {
    if !op.is_type2() {
        return Err(OperatorError::NotType2(op.kind()));
    }
    let expected = RegisterLayout::single(reg::M, op.widths().m_bits)?;
    if plaintext.layout() != &expected {
        return Err(QsimError::LayoutMismatch(format!(
            "plaintext over {:?}, oracle expects {expected:?}",
            plaintext.layout()
        ))
        .into());
    }
    Ok(())
}

/// Encrypts a quantum plaintext under fresh classical randomness.
///
/// Samples `r` uniformly, applies the operator to `|r⟩ ⊗ φ ⊗ |0…0⟩` and
/// discards the randomness and the restored ancillas. The output lives on the
/// ciphertext registers.
pub fn type2_oracle_call<T: Scalar>(
    op: &OracleOperator,
    plaintext: &QuantumState<T>,
    rng: &mut dyn RngCore,
) -> Result<QuantumState<T>, OperatorError> {
    let r = uniform_bits(rng, op.widths().r_bits);
    type2_oracle_call_at(op, plaintext, r)
}

/// [`type2_oracle_call`] with the randomness fixed to `r`.
///
/// Since the operator never changes `r`, it acts on the block `r = const`
/// alone; only that block is simulated.
pub fn type2_oracle_call_at<T: Scalar>(
    op: &OracleOperator,
    plaintext: &QuantumState<T>,
    r: u64,
) -> Result<QuantumState<T>, OperatorError> {
    check_call(op, plaintext)?;
    let block = if op.widths().r_bits > 0 {
        op.perm().restrict(reg::R, r)?
    } else {
        op.perm().clone()
    };
    let ancilla = block.input().without(reg::M)?;
    let input = plaintext.tensor(&QuantumState::basis_index(ancilla, 0)?)?;
    let output = input.apply_permutation(&block)?;
    Ok(output.partial_trace(&op.ciphertext_registers())?)
}

/// Reference path for [`type2_oracle_call_at`]: simulates the randomness
/// register explicitly and traces it out. Only feasible at small widths.
pub fn type2_oracle_call_full<T: Scalar>(
    op: &OracleOperator,
    plaintext: &QuantumState<T>,
    r: u64,
) -> Result<QuantumState<T>, OperatorError> {
    check_call(op, plaintext)?;
    let w = op.widths();
    let mut state = plaintext.clone();
    if w.r_bits > 0 {
        let rl = RegisterLayout::single(reg::R, w.r_bits)?;
        state = QuantumState::basis_index(rl, r)?.tensor(&state)?;
    }
    let ancilla = op.layout().select(
        &op.layout()
            .names()
            .filter(|n| *n != reg::R && *n != reg::M)
            .collect::<Vec<_>>(),
    )?;
    let input = state.tensor(&QuantumState::basis_index(ancilla, 0)?)?;
    let output = input.apply_permutation(op.perm())?;
    Ok(output.partial_trace(&op.ciphertext_registers())?)
}
