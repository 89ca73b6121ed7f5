//! Byte encodings for values carried inside frame payloads.

use alloc::vec::Vec;

/// A value with a self-delimiting byte encoding.
///
/// `decode` consumes exactly the bytes written by `encode` from the front of
/// `input`. The one exception is a type that is documented to consume the
/// remainder of its payload, such as a concrete ciphertext.
pub trait Wire: Sized {
    fn encode(&self, out: &mut Vec<u8>);
    fn decode(input: &mut &[u8]) -> Result<Self, WireError>;

    fn to_wire(&self) -> Vec<u8> {
        let mut v = Vec::new();
        self.encode(&mut v);
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WireError;

pub(crate) fn take<'a>(input: &mut &'a [u8], n: usize) -> Result<&'a [u8], WireError> {
    if input.len() < n {
        return Err(WireError);
    }
    let (head, tail) = input.split_at(n);
    *input = tail;
    Ok(head)
}

pub(crate) fn take_array<const N: usize>(input: &mut &[u8]) -> Result<[u8; N], WireError> {
    let mut out = [0u8; N];
    out.copy_from_slice(take(input, N)?);
    Ok(out)
}
