use std::fmt;

const FNV_OFFSET: u64 = 0xCBF2_9CE4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01B3;

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    fnv1a64_extend(FNV_OFFSET, bytes)
}

fn fnv1a64_extend(mut hash: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

/// Fingerprint of a file version: FNV-1a over `path ‖ 0x00 ‖ size ‖ mtime_ns`
/// (little-endian). A rewritten file gets a new id, so stale entries are
/// never served.
pub fn make_file_id(path: &[u8], size: u64, mtime_ns: u64) -> u64 {
    debug_assert!(!path.is_empty());
    let mut h = fnv1a64_extend(FNV_OFFSET, path);
    h = fnv1a64_extend(h, &[0]);
    h = fnv1a64_extend(h, &size.to_le_bytes());
    fnv1a64_extend(h, &mtime_ns.to_le_bytes())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum SectionKind {
    Footer = 0,
    StripeFooter = 1,
    StripeIndex = 2,
}

impl SectionKind {
    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(SectionKind::Footer),
            1 => Some(SectionKind::StripeFooter),
            2 => Some(SectionKind::StripeIndex),
            _ => None,
        }
    }
}

/// Identifies one metadata section of one file version.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CacheKey {
    pub file_id: u64,
    pub section: SectionKind,
    pub stripe: u32,
}

pub const KEY_LEN: usize = 13;

impl CacheKey {
    pub fn footer(file_id: u64) -> Self {
        CacheKey {
            file_id,
            section: SectionKind::Footer,
            stripe: 0,
        }
    }

    pub fn stripe_footer(file_id: u64, stripe: u32) -> Self {
        CacheKey {
            file_id,
            section: SectionKind::StripeFooter,
            stripe,
        }
    }

    pub fn stripe_index(file_id: u64, stripe: u32) -> Self {
        CacheKey {
            file_id,
            section: SectionKind::StripeIndex,
            stripe,
        }
    }

    /// Wire form: `u64 file_id ‖ u8 section ‖ u32 stripe`, little-endian.
    pub fn to_bytes(&self) -> [u8; KEY_LEN] {
        let mut out = [0u8; KEY_LEN];
        out[..8].copy_from_slice(&self.file_id.to_le_bytes());
        out[8] = self.section as u8;
        out[9..].copy_from_slice(&self.stripe.to_le_bytes());
        out
    }

    pub fn from_bytes(b: &[u8; KEY_LEN]) -> Option<Self> {
        let section = SectionKind::from_code(b[8])?;
        let stripe = u32::from_le_bytes(b[9..].try_into().unwrap());
        if section == SectionKind::Footer && stripe != 0 {
            return None;
        }
        Some(CacheKey {
            file_id: u64::from_le_bytes(b[..8].try_into().unwrap()),
            section,
            stripe,
        })
    }

    /// Lowercase hex of the wire form (26 chars); used as the on-disk file name.
    pub fn to_hex(&self) -> String {
        self.to_bytes().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        if s.len() != KEY_LEN * 2 || !s.bytes().all(|c| matches!(c, b'0'..=b'9' | b'a'..=b'f')) {
            return None;
        }
        let mut b = [0u8; KEY_LEN];
        for (i, out) in b.iter_mut().enumerate() {
            *out = u8::from_str_radix(&s[2 * i..2 * i + 2], 16).ok()?;
        }
        Self::from_bytes(&b)
    }
}

impl fmt::Display for CacheKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}/{:?}/{}", self.file_id, self.section, self.stripe)
    }
}
