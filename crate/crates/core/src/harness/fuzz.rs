use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::lang::ElementaryType;
use crate::vm::{Address, Value};

const STRING_ALPHABET: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789";
const MAX_STRING_LEN: usize = 8;

/// Canonical signature text, e.g. `balanceOf(address)`.
pub fn signature(method: &str, params: &[ElementaryType]) -> String {
    let types: Vec<&str> = params.iter().map(|t| t.keyword()).collect();
    format!("{method}({})", types.join(","))
}

/// Arguments for a read-only call after trace index `step`. A pure function
/// of its inputs, so original and mutant see the same values.
pub fn fuzz_args(seed: u64, step: usize, method: &str, params: &[ElementaryType], accounts: &[Address]) -> Vec<Value> {
    if params.is_empty() {
        return Vec::new();
    }
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update((step as u64).to_le_bytes());
    h.update(method.as_bytes());
    h.update([0]);
    h.update(signature(method, params).as_bytes());
    let digest = h.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    let mut rng = ChaCha8Rng::from_seed(key);
    params
        .iter()
        .map(|t| match t {
            ElementaryType::Uint => Value::Uint(rng.gen_range(0..1u64 << 32)),
            ElementaryType::Bool => Value::Bool(rng.gen()),
            ElementaryType::Address => Value::Address(accounts.choose(&mut rng).copied().unwrap_or(Address(0))),
            ElementaryType::String => {
                let len = rng.gen_range(0..=MAX_STRING_LEN);
                let s: String =
                    (0..len).map(|_| STRING_ALPHABET[rng.gen_range(0..STRING_ALPHABET.len())] as char).collect();
                Value::Str(s)
            }
        })
        .collect()
}
