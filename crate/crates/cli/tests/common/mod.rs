//! Synthetic corpus fixtures, built from the grammars' layouts.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use ipg_cli::corpus::{corpus_dir, load_manifest, Entry, Manifest};
use ipg_core::ast::Grammar;

pub fn manifest() -> Manifest {
    load_manifest(&corpus_dir()).unwrap()
}

pub fn path(rel: &str) -> PathBuf {
    corpus_dir().join(rel)
}

pub fn grammar(e: &Entry) -> Grammar {
    let src = fs::read_to_string(path(&e.grammar)).unwrap();
    ipg_core::prepare(&src).unwrap_or_else(|d| panic!("{}: {d:?}", e.name))
}

/// Set `IPG_BLESS=1` to rewrite fixtures and golden files.
pub fn blessing() -> bool {
    std::env::var_os("IPG_BLESS").is_some_and(|v| v == "1")
}

/// Writes `bytes` when blessing, otherwise checks the file matches.
pub fn check_or_write(p: &Path, bytes: &[u8]) -> Result<(), String> {
    if blessing() {
        fs::create_dir_all(p.parent().unwrap()).unwrap();
        fs::write(p, bytes).unwrap();
        return Ok(());
    }
    match fs::read(p) {
        Ok(have) if have == bytes => Ok(()),
        Ok(_) => Err(format!("{} is stale; rerun with IPG_BLESS=1", p.display())),
        Err(e) => Err(format!("{}: {e}", p.display())),
    }
}

fn put_u16(b: &mut [u8], at: usize, v: u16) {
    b[at..at + 2].copy_from_slice(&v.to_le_bytes());
}

fn put_u32(b: &mut [u8], at: usize, v: u32) {
    b[at..at + 4].copy_from_slice(&v.to_le_bytes());
}

fn put_u64(b: &mut [u8], at: usize, v: u64) {
    b[at..at + 8].copy_from_slice(&v.to_le_bytes());
}

fn align8(n: usize) -> usize {
    n.div_ceil(8) * 8
}

/// One section of the synthetic ELF file.
#[derive(Clone, Debug)]
pub struct ElfSection {
    pub kind: u32,
    pub ofs: u64,
    pub data: Vec<u8>,
}

/// The sections after the null section, at the offsets they were placed.
pub fn elf_sections() -> Vec<ElfSection> {
    let mut dynamic = Vec::new();
    for (tag, val) in [(1u64, 0x10u64), (5, 0x80), (0, 0)] {
        dynamic.extend(tag.to_le_bytes());
        dynamic.extend(val.to_le_bytes());
    }
    let bodies: [(u32, Vec<u8>); 3] = [
        (1, b"hello, world!\n".to_vec()),
        (6, dynamic),
        (3, b"\0.text\0.dynamic\0".to_vec()),
    ];
    let mut at = 64;
    bodies
        .into_iter()
        .map(|(kind, data)| {
            at = align8(at);
            let s = ElfSection {
                kind,
                ofs: at as u64,
                data,
            };
            at += s.data.len();
            s
        })
        .collect()
}

pub fn elf() -> Vec<u8> {
    let secs = elf_sections();
    let last = secs.last().unwrap();
    let shoff = align8(last.ofs as usize + last.data.len());
    let shnum = secs.len() + 1;
    let mut b = vec![0u8; shoff + 64 * shnum];
    b[..4].copy_from_slice(b"\x7fELF");
    b[4] = 2; // 64-bit
    b[5] = 1; // little-endian
    b[6] = 1;
    put_u16(&mut b, 16, 1);
    put_u64(&mut b, 40, shoff as u64);
    put_u16(&mut b, 52, 64);
    put_u16(&mut b, 58, 64);
    put_u16(&mut b, 60, shnum as u16);
    for (i, s) in secs.iter().enumerate() {
        let o = s.ofs as usize;
        b[o..o + s.data.len()].copy_from_slice(&s.data);
        let h = shoff + 64 * (i + 1);
        put_u32(&mut b, h + 4, s.kind);
        put_u64(&mut b, h + 24, s.ofs);
        put_u64(&mut b, h + 32, s.data.len() as u64);
    }
    b
}

/// A GIF with `n` blocks, alternating extension and image blocks.
pub fn gif(n: usize, trailer: bool) -> Vec<u8> {
    let mut b = b"GIF89a".to_vec();
    b.extend([1, 0, 1, 0]); // 1x1
    b.extend([0x80, 0, 0]); // global color table of two entries
    b.extend([0, 0, 0, 0xff, 0xff, 0xff]);
    for i in 0..n {
        if i % 2 == 0 {
            b.extend([0x21, 0xf9, 4, 0, 10, 0, 0, 0]);
        } else {
            b.push(0x2c);
            b.extend([0, 0, 0, 0, 1, 0, 1, 0, 0]);
            b.extend([2, 2, 0x4c, 0x01, 0]);
        }
    }
    if trailer {
        b.push(0x3b);
    }
    b
}

/// Objects of the two-pass fixture: body text, and which object's header
/// stores this object's length.
pub const PDF_OBJECTS: [(&str, usize); 3] = [("alpha", 1), ("be", 2), ("gamma ray", 0)];

/// `(offset, length)` of every object.
pub fn pdf_object_windows() -> Vec<(usize, usize)> {
    let mut at = 8 + 8 * PDF_OBJECTS.len();
    PDF_OBJECTS
        .iter()
        .map(|(text, _)| {
            let w = (at, 8 + text.len() + 2);
            at += w.1;
            w
        })
        .collect()
}

pub fn pdf_objects(corrupt_link: bool) -> Vec<u8> {
    let wins = pdf_object_windows();
    let n = PDF_OBJECTS.len();
    let mut b = vec![0u8; 8 + 8 * n];
    put_u32(&mut b, 0, 8);
    put_u32(&mut b, 4, n as u32);
    for (i, (ofs, _)) in wins.iter().enumerate() {
        put_u32(&mut b, 8 + 8 * i, *ofs as u32);
    }
    for (k, (text, _)) in PDF_OBJECTS.iter().enumerate() {
        // object k's header holds the length of the object that names k
        let i = PDF_OBJECTS.iter().position(|&(_, h)| h == k).unwrap();
        let link = if corrupt_link && k == 0 { 9 } else { i as u32 };
        b.extend(link.to_le_bytes());
        b.extend((wins[i].1 as u32).to_le_bytes());
        b.push(b'(');
        b.extend(text.as_bytes());
        b.push(b')');
    }
    b
}

pub fn fixtures() -> Vec<(&'static str, Vec<u8>)> {
    let mut elf_bad = elf();
    elf_bad[1] = b'e';
    let fig6 = |a0: u8| [2, 0, 0, 0, a0, 0, 0, 0, 9, 0, 0, 0].to_vec();
    let mut fig2 = vec![8, 0, 0, 0, 5, 0, 0, 0];
    fig2.extend(b"hello!!");
    vec![
        ("fig1_aabb.bin", b"aabb".to_vec()),
        ("fig1_aaXYbb.bin", b"aaXYbb".to_vec()),
        ("fig1_aab.bin", b"aab".to_vec()),
        ("fig2_hello.bin", fig2.clone()),
        ("fig2_short.bin", fig2[..11].to_vec()),
        ("fig3_101.bin", b"101".to_vec()),
        ("fig3_21.bin", b"21".to_vec()),
        ("fig4_1000stop.bin", b"1000stop".to_vec()),
        ("fig4_100stap.bin", b"100stap".to_vec()),
        ("fig6_two.bin", fig6(7)),
        ("fig6_ten.bin", fig6(10)),
        ("anbncn_3.bin", b"aaabbbccc".to_vec()),
        ("anbncn_bad.bin", b"aaabbcccb".to_vec()),
        ("elf_min.bin", elf()),
        ("elf_badmagic.bin", elf_bad),
        ("gif_1.bin", gif(1, true)),
        ("gif_2.bin", gif(2, true)),
        ("gif_7.bin", gif(7, true)),
        ("gif_notrailer.bin", gif(2, false)),
        (
            "pdf_startxref.bin",
            b"%PDF-1.4\n1 0 obj\n<< >>\nendobj\ntrailer\n<< /Size 2 >>\nstartxref\n317".to_vec(),
        ),
        ("pdf_nodigits.bin", b"%PDF-1.4\nstartxref\n".to_vec()),
        ("pdf_objects.bin", pdf_objects(false)),
        ("pdf_badlink.bin", pdf_objects(true)),
        ("pingpong_s.bin", b"s".to_vec()),
        ("fig11b_0.bin", b"0".to_vec()),
        ("fig11d_empty.bin", Vec::new()),
    ]
}
