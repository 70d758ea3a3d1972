use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CorpusError;

/// A lowercase ASCII language code of two or three letters (`en`, `es`, `gsw`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LangCode {
    bytes: [u8; 3],
    len: u8,
}

impl LangCode {
    pub fn new(code: &str) -> Result<Self, CorpusError> {
        let raw = code.as_bytes();
        if !(2..=3).contains(&raw.len()) || !raw.iter().all(u8::is_ascii_lowercase) {
            return Err(CorpusError::InvalidCode(code.to_string()));
        }
        let mut bytes = [0u8; 3];
        bytes[..raw.len()].copy_from_slice(raw);
        Ok(LangCode {
            bytes,
            len: raw.len() as u8,
        })
    }

    pub fn as_str(&self) -> &str {
        // only ever built from validated ASCII
        std::str::from_utf8(&self.bytes[..self.len as usize]).expect("ascii code")
    }
}

impl fmt::Debug for LangCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

impl fmt::Display for LangCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LangCode {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LangCode::new(s)
    }
}

impl Serialize for LangCode {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for LangCode {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        LangCode::new(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NeutralKind {
    Other,
    Punct,
    Emoji,
    Hashtag,
}

impl NeutralKind {
    pub const ALL: [NeutralKind; 4] = [
        NeutralKind::Other,
        NeutralKind::Punct,
        NeutralKind::Emoji,
        NeutralKind::Hashtag,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NeutralKind::Other => "other",
            NeutralKind::Punct => "punct",
            NeutralKind::Emoji => "emoji",
            NeutralKind::Hashtag => "hashtag",
        }
    }
}

/// Normalized token-level language tag.
///
/// Canonical text forms: `lang:<code>`, `shared:<code>`, `shared:other`,
/// `mix`, `other`, `punct`, `emoji`, `hashtag`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tag {
    Lang(LangCode),
    Shared(LangCode),
    SharedOther,
    Mix,
    Neutral(NeutralKind),
}

impl Tag {
    pub fn lang(code: &str) -> Self {
        Tag::Lang(LangCode::new(code).expect("valid language code"))
    }

    pub fn shared(code: &str) -> Self {
        Tag::Shared(LangCode::new(code).expect("valid language code"))
    }

    pub fn is_shared(&self) -> bool {
        matches!(self, Tag::Shared(_) | Tag::SharedOther)
    }

    pub fn is_neutral(&self) -> bool {
        matches!(self, Tag::Neutral(_))
    }

    pub fn lang_code(&self) -> Option<LangCode> {
        match self {
            Tag::Lang(code) => Some(*code),
            _ => None,
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Lang(code) => write!(f, "lang:{code}"),
            Tag::Shared(code) => write!(f, "shared:{code}"),
            Tag::SharedOther => f.write_str("shared:other"),
            Tag::Mix => f.write_str("mix"),
            Tag::Neutral(kind) => f.write_str(kind.as_str()),
        }
    }
}

impl FromStr for Tag {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let tag = match s {
            "shared:other" => Tag::SharedOther,
            "mix" => Tag::Mix,
            "other" => Tag::Neutral(NeutralKind::Other),
            "punct" => Tag::Neutral(NeutralKind::Punct),
            "emoji" => Tag::Neutral(NeutralKind::Emoji),
            "hashtag" => Tag::Neutral(NeutralKind::Hashtag),
            _ => {
                if let Some(code) = s.strip_prefix("lang:") {
                    Tag::Lang(LangCode::new(code)?)
                } else if let Some(code) = s.strip_prefix("shared:") {
                    Tag::Shared(LangCode::new(code)?)
                } else {
                    return Err(CorpusError::UnknownTag(s.to_string()));
                }
            }
        };
        Ok(tag)
    }
}

impl Serialize for Tag {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Tag {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The two base languages of a bilingual corpus. `l1` is the language
/// conventionally listed first (English in all the corpora this was built for).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LanguagePair {
    pub l1: LangCode,
    pub l2: LangCode,
    pub name: String,
}

impl LanguagePair {
    pub fn new(l1: &str, l2: &str) -> Result<Self, CorpusError> {
        let l1 = LangCode::new(l1)?;
        let l2 = LangCode::new(l2)?;
        if l1 == l2 {
            return Err(CorpusError::DegeneratePair(l1.to_string()));
        }
        Ok(LanguagePair {
            l1,
            l2,
            name: format!("{l1}-{l2}"),
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn default_name(&self) -> String {
        format!("{}-{}", self.l1, self.l2)
    }

    pub fn contains(&self, code: LangCode) -> bool {
        code == self.l1 || code == self.l2
    }

    /// The pair language of a `lang:` tag, if it is one of the two.
    pub fn pair_lang(&self, tag: &Tag) -> Option<LangCode> {
        tag.lang_code().filter(|c| self.contains(*c))
    }
}

impl FromStr for LanguagePair {
    type Err = CorpusError;

    /// Accepts `en-es`, `en:es`, `en,es` or `en es`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s
            .split(|c: char| c == '-' || c == ':' || c == ',' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .collect();
        match parts.as_slice() {
            [l1, l2] => LanguagePair::new(l1, l2),
            _ => Err(CorpusError::InvalidPair(s.to_string())),
        }
    }
}
