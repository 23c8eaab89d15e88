//! Pluggable signature schemes. The default is a deterministic keyed digest
//! that is easy to reason about in simulations and offers no real security.

use sha2::{Digest, Sha256};
use thiserror::Error;

/// Private-use algorithm number for the toy scheme.
pub const TOY_ALGORITHM: u8 = 253;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown signature scheme {0}")]
pub struct UnknownScheme(pub u8);

pub trait SignatureScheme: Send + Sync {
    fn algorithm(&self) -> u8;
    /// Public material corresponding to `secret`.
    fn public_from_secret(&self, secret: &[u8]) -> Vec<u8>;
    fn sign(&self, data: &[u8], secret: &[u8]) -> Vec<u8>;
    fn verify(&self, data: &[u8], signature: &[u8], public: &[u8]) -> bool;
}

/// public = SHA-256(tag ‖ secret); signature = SHA-256(public ‖ data).
#[derive(Debug, Clone, Copy, Default)]
pub struct ToyScheme;

const TOY_TAG: &[u8] = b"dnsglue-toy-key";

impl SignatureScheme for ToyScheme {
    fn algorithm(&self) -> u8 {
        TOY_ALGORITHM
    }

    fn public_from_secret(&self, secret: &[u8]) -> Vec<u8> {
        Sha256::new()
            .chain_update(TOY_TAG)
            .chain_update(secret)
            .finalize()
            .to_vec()
    }

    fn sign(&self, data: &[u8], secret: &[u8]) -> Vec<u8> {
        let token = self.public_from_secret(secret);
        Sha256::new()
            .chain_update(&token)
            .chain_update(data)
            .finalize()
            .to_vec()
    }

    fn verify(&self, data: &[u8], signature: &[u8], public: &[u8]) -> bool {
        let expected = Sha256::new().chain_update(public).chain_update(data).finalize();
        expected.as_slice() == signature
    }
}

pub fn scheme_for(algorithm: u8) -> Result<&'static dyn SignatureScheme, UnknownScheme> {
    match algorithm {
        TOY_ALGORITHM => Ok(&ToyScheme),
        other => Err(UnknownScheme(other)),
    }
}

pub fn scheme_sign(algorithm: u8, data: &[u8], secret: &[u8]) -> Result<Vec<u8>, UnknownScheme> {
    Ok(scheme_for(algorithm)?.sign(data, secret))
}

pub fn scheme_verify(algorithm: u8, data: &[u8], signature: &[u8], public: &[u8]) -> Result<bool, UnknownScheme> {
    Ok(scheme_for(algorithm)?.verify(data, signature, public))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_verify_contract() {
        let secret = b"zsk secret";
        let public = ToyScheme.public_from_secret(secret);
        let data = b"some rrset octets".to_vec();
        let sig = scheme_sign(TOY_ALGORITHM, &data, secret).unwrap();
        assert!(scheme_verify(TOY_ALGORITHM, &data, &sig, &public).unwrap());

        for bit in 0..data.len() * 8 {
            let mut flipped = data.clone();
            flipped[bit / 8] ^= 1 << (bit % 8);
            assert!(!ToyScheme.verify(&flipped, &sig, &public));
        }
        for bit in 0..sig.len() * 8 {
            let mut flipped = sig.clone();
            flipped[bit / 8] ^= 1 << (bit % 8);
            assert!(!ToyScheme.verify(&data, &flipped, &public));
        }
        let other = ToyScheme.public_from_secret(b"another key");
        assert!(!ToyScheme.verify(&data, &sig, &other));
        assert_eq!(scheme_sign(8, &data, secret), Err(UnknownScheme(8)));
    }
}
