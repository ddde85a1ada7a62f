use std::fmt;

/// A message symbol on a lattice track. `Symbol(0)` is silence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Symbol(pub u8);

impl Symbol {
    pub const SILENCE: Symbol = Symbol(0);

    pub fn is_silence(self) -> bool {
        self.0 == 0
    }
}

/// Named symbols plus the implicit silence symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Alphabet {
            names: names.into_iter().map(Into::into).collect(),
        }
    }

    /// Silence plus the two bit symbols `0` and `1`.
    pub fn bits() -> Self {
        Alphabet::new(["0", "1"])
    }

    /// Silence plus a single flash symbol.
    pub fn signal() -> Self {
        Alphabet::new(["sig"])
    }

    /// Number of symbols including silence.
    pub fn size(&self) -> usize {
        self.names.len() + 1
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        (0..self.size()).map(|s| Symbol(s as u8))
    }

    pub fn contains(&self, s: Symbol) -> bool {
        usize::from(s.0) < self.size()
    }

    pub fn name(&self, s: Symbol) -> &str {
        if s.is_silence() {
            "-"
        } else {
            self.names
                .get(usize::from(s.0) - 1)
                .map(String::as_str)
                .unwrap_or("?")
        }
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| Symbol(i as u8 + 1))
    }
}

/// Bit symbols in [`Alphabet::bits`].
pub mod bit {
    use super::Symbol;

    pub const ZERO: Symbol = Symbol(1);
    pub const ONE: Symbol = Symbol(2);

    pub fn encode(b: bool) -> Symbol {
        if b {
            ONE
        } else {
            ZERO
        }
    }

    pub fn decode(s: Symbol) -> Option<bool> {
        match s {
            ZERO => Some(false),
            ONE => Some(true),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}
