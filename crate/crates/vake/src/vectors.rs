//! Golden vector files for cross-implementation checks.
//!
//! | file              | line format                          |
//! |-------------------|--------------------------------------|
//! | `kdf.txt`         | `<z> <td> <label> <okm>`             |
//! | `crc.txt`         | `<input> <crc16>`                    |
//! | `codec.txt`       | `<message> <session id> <rc> <frame>`|
//! | `sas_digits.txt`  | `<sas> <digits>`                     |
//! | `sas_words.txt`   | `<sas> <even word> <odd word>`       |
//!
//! Byte strings are lowercase hex; an empty input is written as `-`.
//! Output depends on nothing but the word list.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use vake_core::crc::crc16_ccitt_false;
use vake_core::crypto::{Ciphertext, Concrete, Digest, PublicShare, RandomNonce, SharedSecret, Suite};
use vake_core::protocol::{encode_frame, AbortCode, Message};
use vake_core::sas::{render_digits, render_words, SasValue, WordList};
use vake_core::schedule::{LABEL_K1, LABEL_K2, LABEL_K3, LABEL_SAS, LABEL_SESSION};

pub const LABELS: [&str; 5] = [LABEL_K1, LABEL_K2, LABEL_K3, LABEL_SESSION, LABEL_SAS];

/// Session id used by every codec vector.
pub const CODEC_SESSION_ID: u32 = 0xdead_beef;

fn hex_or_dash(b: &[u8]) -> String {
    if b.is_empty() {
        "-".into()
    } else {
        hex::encode(b)
    }
}

/// `(shared secret, transcript digest)` inputs for the KDF vectors.
pub fn kdf_inputs() -> Vec<([u8; 32], [u8; 32])> {
    vec![
        (std::array::from_fn(|i| i as u8), std::array::from_fn(|i| 0xa0 + i as u8)),
        ([0; 32], [0xff; 32]),
        (std::array::from_fn(|i| (i * 37 + 11) as u8), std::array::from_fn(|i| (255 - i * 5) as u8)),
    ]
}

pub fn crc_inputs() -> Vec<Vec<u8>> {
    vec![
        b"123456789".to_vec(),
        Vec::new(),
        vec![0x00],
        vec![0xff],
        b"vake".to_vec(),
        (0..=255).collect(),
    ]
}

/// One reference message of every type, concrete backend.
pub fn codec_messages() -> Vec<(&'static str, Message<Concrete>)> {
    vec![
        ("role_nonce", Message::RoleNonce { r: 0x0123_4567_89ab_cdef }),
        ("commit", Message::Commit { c: Digest([0x11; 32]) }),
        ("key_share_r", Message::KeyShareR { share: PublicShare([0x22; 32]), salt: RandomNonce([0x33; 16]) }),
        ("key_share_i", Message::KeyShareI { share: PublicShare([0x44; 32]), salt: RandomNonce([0x55; 16]) }),
        ("enc_id_i", Message::EncIdI { ct: Ciphertext(vec![0x66; 20]) }),
        ("enc_id_r", Message::EncIdR { ct: Ciphertext(vec![0x77; 48]) }),
        ("sas_ctl", Message::SasCtl { ct: Ciphertext(vec![0x88; 17]) }),
        ("abort", Message::Abort { code: AbortCode::SasMismatch }),
    ]
}

pub fn kdf_file() -> String {
    let mut out = String::new();
    for (z, td) in kdf_inputs() {
        for label in LABELS {
            let okm = Concrete.derive_key(&SharedSecret(z), &Digest(td), label);
            out += &format!("{} {} {label} {}\n", hex::encode(z), hex::encode(td), hex::encode(okm.0));
        }
    }
    out
}

pub fn crc_file() -> String {
    crc_inputs().iter().map(|i| format!("{} {:04x}\n", hex_or_dash(i), crc16_ccitt_false(i))).collect()
}

pub fn codec_file() -> String {
    codec_messages()
        .iter()
        .enumerate()
        .map(|(rc, (name, m))| {
            let frame = encode_frame(m, CODEC_SESSION_ID, rc as u8);
            format!("{name} {CODEC_SESSION_ID:08x} {rc} {}\n", hex::encode(frame))
        })
        .collect()
}

pub fn sas_digits_file() -> String {
    (0..=u16::MAX).map(|v| format!("{v:04x} {}\n", render_digits(SasValue(v)))).collect()
}

pub fn sas_words_file(words: &WordList) -> String {
    (0..=u16::MAX)
        .map(|v| {
            let (even, odd) = render_words(SasValue(v), words);
            format!("{v:04x} {even} {odd}\n")
        })
        .collect()
}

/// Writes all vector files into `dir`, creating it if needed.
pub fn emit(dir: &Path, words: &WordList) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let files = [
        ("kdf.txt", kdf_file()),
        ("crc.txt", crc_file()),
        ("codec.txt", codec_file()),
        ("sas_digits.txt", sas_digits_file()),
        ("sas_words.txt", sas_words_file(words)),
    ];
    let mut written = Vec::new();
    for (name, text) in files {
        let path = dir.join(name);
        fs::write(&path, text)?;
        written.push(path);
    }
    Ok(written)
}
