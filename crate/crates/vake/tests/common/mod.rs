//! Oracles that share no code with the implementation under test.

#![allow(dead_code)]

use hmac::{Hmac, Mac};
use sha2::Sha256;

type HmacSha256 = Hmac<Sha256>;

/// HKDF-SHA-256 built directly on HMAC, 32 bytes of output.
pub fn hkdf32(salt: &[u8], ikm: &[u8], info: &[u8]) -> [u8; 32] {
    let mut ext = HmacSha256::new_from_slice(salt).unwrap();
    ext.update(ikm);
    let prk = ext.finalize().into_bytes();
    let mut exp = HmacSha256::new_from_slice(&prk).unwrap();
    exp.update(info);
    exp.update(&[1]);
    exp.finalize().into_bytes().into()
}

pub fn crc16(data: &[u8]) -> u16 {
    crc::Crc::<u16>::new(&crc::CRC_16_IBM_3740).checksum(data)
}

/// `tag | sid | rc | len | payload | crc`, all big-endian.
pub fn frame(tag: u8, sid: u32, rc: u8, payload: &[u8]) -> Vec<u8> {
    let mut f = vec![tag];
    f.extend_from_slice(&sid.to_be_bytes());
    f.push(rc);
    f.extend_from_slice(&(payload.len() as u16).to_be_bytes());
    f.extend_from_slice(payload);
    let c = crc16(&f);
    f.extend_from_slice(&c.to_be_bytes());
    f
}

/// The reference frames by message name: `(tag, payload)`.
pub fn reference_payloads() -> Vec<(&'static str, u8, Vec<u8>)> {
    let cat = |parts: &[&[u8]]| parts.concat();
    vec![
        ("role_nonce", 1, 0x0123_4567_89ab_cdefu64.to_be_bytes().to_vec()),
        ("commit", 2, vec![0x11; 32]),
        ("key_share_r", 3, cat(&[&[0x22; 32], &[0x33; 16]])),
        ("key_share_i", 4, cat(&[&[0x44; 32], &[0x55; 16]])),
        ("enc_id_i", 5, vec![0x66; 20]),
        ("enc_id_r", 6, vec![0x77; 48]),
        ("sas_ctl", 7, vec![0x88; 17]),
        ("abort", 0x0f, vec![5]),
    ]
}

pub fn unhex(s: &str) -> Vec<u8> {
    if s == "-" {
        Vec::new()
    } else {
        hex::decode(s).unwrap()
    }
}
