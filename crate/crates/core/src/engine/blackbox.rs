//! Blackbox parsers: opaque functions handed an interval-delimited slice.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// What a successful blackbox reports back.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlackboxOutput {
    /// One past the last consumed byte, relative to the slice.
    pub consumed: usize,
    pub attrs: Vec<(String, i64)>,
}

pub type BlackboxFn = dyn Fn(&[u8]) -> Option<BlackboxOutput> + Send + Sync;

/// Static description of a builtin blackbox.
pub struct Builtin {
    pub name: &'static str,
    pub attrs: &'static [&'static str],
    /// Succeeds only after consuming at least one byte.
    pub consumes: bool,
    pub run: fn(&[u8]) -> Option<BlackboxOutput>,
}

fn int_output(width: usize, val: i64) -> Option<BlackboxOutput> {
    Some(BlackboxOutput {
        consumed: width,
        attrs: vec![("val".to_string(), val)],
    })
}

fn fixed<const N: usize>(bytes: &[u8]) -> Option<[u8; N]> {
    bytes.get(..N)?.try_into().ok()
}

fn byte(s: &[u8]) -> Option<BlackboxOutput> {
    int_output(1, i64::from(*s.first()?))
}

fn u16le(s: &[u8]) -> Option<BlackboxOutput> {
    int_output(2, u16::from_le_bytes(fixed(s)?).into())
}

fn u32le(s: &[u8]) -> Option<BlackboxOutput> {
    int_output(4, u32::from_le_bytes(fixed(s)?).into())
}

fn u64le(s: &[u8]) -> Option<BlackboxOutput> {
    int_output(8, i64::try_from(u64::from_le_bytes(fixed(s)?)).ok()?)
}

fn u16be(s: &[u8]) -> Option<BlackboxOutput> {
    int_output(2, u16::from_be_bytes(fixed(s)?).into())
}

fn u32be(s: &[u8]) -> Option<BlackboxOutput> {
    int_output(4, u32::from_be_bytes(fixed(s)?).into())
}

fn ascii_int(s: &[u8]) -> Option<BlackboxOutput> {
    let digits = s.iter().take_while(|b| b.is_ascii_digit()).count();
    if digits == 0 {
        return None;
    }
    let mut val: i64 = 0;
    for &b in &s[..digits] {
        val = val.checked_mul(10)?.checked_add(i64::from(b - b'0'))?;
    }
    int_output(digits, val)
}

fn raw(s: &[u8]) -> Option<BlackboxOutput> {
    Some(BlackboxOutput {
        consumed: s.len(),
        attrs: Vec::new(),
    })
}

pub const BUILTINS: &[Builtin] = &[
    Builtin { name: "Byte", attrs: &["val"], consumes: true, run: byte },
    Builtin { name: "UInt16LE", attrs: &["val"], consumes: true, run: u16le },
    Builtin { name: "UInt32LE", attrs: &["val"], consumes: true, run: u32le },
    Builtin { name: "UInt64LE", attrs: &["val"], consumes: true, run: u64le },
    Builtin { name: "UInt16BE", attrs: &["val"], consumes: true, run: u16be },
    Builtin { name: "UInt32BE", attrs: &["val"], consumes: true, run: u32be },
    Builtin { name: "AsciiInt", attrs: &["val"], consumes: true, run: ascii_int },
    Builtin { name: "Raw", attrs: &[], consumes: false, run: raw },
];

pub fn builtin(name: &str) -> Option<&'static Builtin> {
    BUILTINS.iter().find(|b| b.name == name)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegistryError {
    DupName(String),
}

impl fmt::Display for RegistryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegistryError::DupName(n) => write!(f, "DUP_NAME: blackbox `{n}` is already registered"),
        }
    }
}

#[derive(Clone)]
pub struct Registered {
    pub attrs: Vec<String>,
    pub func: Arc<BlackboxFn>,
}

/// Named blackboxes available to the engine, with builtins pre-registered.
#[derive(Clone)]
pub struct BlackboxRegistry {
    entries: BTreeMap<String, Registered>,
}

impl Default for BlackboxRegistry {
    fn default() -> Self {
        Self::new()
    }
}

impl BlackboxRegistry {
    pub fn new() -> Self {
        let mut entries = BTreeMap::new();
        for b in BUILTINS {
            let run = b.run;
            entries.insert(
                b.name.to_string(),
                Registered {
                    attrs: b.attrs.iter().map(|a| a.to_string()).collect(),
                    func: Arc::new(run),
                },
            );
        }
        BlackboxRegistry { entries }
    }

    pub fn register<F>(&mut self, name: &str, attrs: &[&str], func: F) -> Result<(), RegistryError>
    where
        F: Fn(&[u8]) -> Option<BlackboxOutput> + Send + Sync + 'static,
    {
        if self.entries.contains_key(name) {
            return Err(RegistryError::DupName(name.to_string()));
        }
        self.entries.insert(
            name.to_string(),
            Registered {
                attrs: attrs.iter().map(|a| a.to_string()).collect(),
                func: Arc::new(func),
            },
        );
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Registered> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}
