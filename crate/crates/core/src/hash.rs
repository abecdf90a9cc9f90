//! Stable content digests.
//!
//! All content hashes in this workspace are lowercase hex SHA-256. Image
//! hashes are computed over the raw pixel buffer (not encoded bytes) so they
//! are stable across encoders and platforms.

use alloc::string::String;
use core::fmt::Write;

use sha2::{Digest, Sha256};

/// SHA-256 over a sequence of byte slices, rendered as lowercase hex.
pub fn sha256_hex<'a, I>(parts: I) -> String
where
    I: IntoIterator<Item = &'a [u8]>,
{
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update(part);
    }
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        let _ = write!(out, "{byte:02x}");
    }
    out
}
