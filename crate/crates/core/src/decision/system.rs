use std::fmt;
use std::str::FromStr;

use crate::structures::FrameProperties;

/// A normal modal system: K plus a subset of T, 4, 5 and D, normalised so
/// that systems with the same theorems compare equal (KT5 and KT45 are both
/// S5, D is dropped when T is present).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SystemId {
    t: bool,
    four: bool,
    five: bool,
    d: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown modal system `{0}`")]
pub struct UnknownSystem(pub String);

impl SystemId {
    pub const K: SystemId = SystemId::new(false, false, false, false);
    pub const KD: SystemId = SystemId::new(false, false, false, true);
    pub const T: SystemId = SystemId::new(true, false, false, false);
    pub const K4: SystemId = SystemId::new(false, true, false, false);
    pub const KD4: SystemId = SystemId::new(false, true, false, true);
    pub const S4: SystemId = SystemId::new(true, true, false, false);
    pub const K5: SystemId = SystemId::new(false, false, true, false);
    pub const KD5: SystemId = SystemId::new(false, false, true, true);
    pub const K45: SystemId = SystemId::new(false, true, true, false);
    pub const KD45: SystemId = SystemId::new(false, true, true, true);
    pub const S5: SystemId = SystemId::new(true, true, true, false);

    pub const ALL: [SystemId; 11] = [
        SystemId::K,
        SystemId::KD,
        SystemId::T,
        SystemId::K4,
        SystemId::KD4,
        SystemId::S4,
        SystemId::K5,
        SystemId::KD5,
        SystemId::K45,
        SystemId::KD45,
        SystemId::S5,
    ];

    pub const fn new(t: bool, four: bool, five: bool, d: bool) -> SystemId {
        SystemId {
            t,
            four: four || (t && five),
            five,
            d: d && !t,
        }
    }

    pub fn has_t(self) -> bool {
        self.t
    }
    pub fn has_4(self) -> bool {
        self.four
    }
    pub fn has_5(self) -> bool {
        self.five
    }
    /// D as an axiom of the system (false when T makes it redundant).
    pub fn has_d(self) -> bool {
        self.d
    }
    /// Whether `~K false` is a theorem.
    pub fn is_serial(self) -> bool {
        self.d || self.t
    }

    /// Axiom schemas beyond K, in the order T, 4, 5, D. S5 lists T, 4 and 5.
    pub fn schemas(self) -> Vec<Schema> {
        let mut out = vec![Schema::K];
        if self.t {
            out.push(Schema::T);
        }
        if self.four {
            out.push(Schema::Four);
        }
        if self.five {
            out.push(Schema::Five);
        }
        if self.d {
            out.push(Schema::D);
        }
        out
    }

    /// Frame conditions characterising the system's class of structures.
    pub fn frame_conditions(self) -> FrameProperties {
        FrameProperties {
            reflexive: self.t,
            transitive: self.four,
            symmetric: self.t && self.five,
            euclidean: self.five,
            serial: self.is_serial(),
        }
    }

    pub fn name(self) -> &'static str {
        match (self.t, self.four, self.five, self.d) {
            (false, false, false, false) => "K",
            (false, false, false, true) => "KD",
            (true, false, false, _) => "T",
            (false, true, false, false) => "K4",
            (false, true, false, true) => "KD4",
            (true, true, false, _) => "S4",
            (false, false, true, false) => "K5",
            (false, false, true, true) => "KD5",
            (false, true, true, false) => "K45",
            (false, true, true, true) => "KD45",
            (true, _, true, _) => "S5",
        }
    }
}

/// The axiom schemas of the normal systems.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Schema {
    K,
    T,
    Four,
    Five,
    D,
}

impl Schema {
    pub fn name(self) -> &'static str {
        match self {
            Schema::K => "K",
            Schema::T => "T",
            Schema::Four => "4",
            Schema::Five => "5",
            Schema::D => "D",
        }
    }
}

impl FromStr for Schema {
    type Err = UnknownSystem;

    fn from_str(s: &str) -> Result<Schema, UnknownSystem> {
        Ok(match s {
            "K" => Schema::K,
            "T" => Schema::T,
            "4" => Schema::Four,
            "5" => Schema::Five,
            "D" => Schema::D,
            _ => return Err(UnknownSystem(s.to_string())),
        })
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SystemId {
    type Err = UnknownSystem;

    /// Accepts the usual names (`K`, `KD45`, `S4`, `S5`, `T`, `D`) and any
    /// `K` followed by letters from `T`, `D`, `4`, `5`.
    fn from_str(s: &str) -> Result<SystemId, UnknownSystem> {
        let upper = s.trim().to_ascii_uppercase();
        match upper.as_str() {
            "S4" => return Ok(SystemId::S4),
            "S5" => return Ok(SystemId::S5),
            "T" => return Ok(SystemId::T),
            "D" => return Ok(SystemId::KD),
            _ => {}
        }
        let rest = upper
            .strip_prefix('K')
            .ok_or_else(|| UnknownSystem(s.to_string()))?;
        let (mut t, mut four, mut five, mut d) = (false, false, false, false);
        for c in rest.chars() {
            let flag = match c {
                'T' => &mut t,
                '4' => &mut four,
                '5' => &mut five,
                'D' => &mut d,
                _ => return Err(UnknownSystem(s.to_string())),
            };
            if *flag {
                return Err(UnknownSystem(s.to_string()));
            }
            *flag = true;
        }
        Ok(SystemId::new(t, four, five, d))
    }
}
