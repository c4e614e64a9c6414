// SPDX-License-Identifier: Apache-2.0

//! Two-input gate types and sets of gate types.
//!
//! A [`GateType`] is a 4-bit truth table. Bit `2a + b` holds `f(a, b)`, where
//! `a` is the left input and `b` the right input. Every parser, generator and
//! named set in this crate uses that convention, so `XOR` is `0b0110` and the
//! serialization order of the 16 types is simply their truth-table value.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// One of the 16 two-input Boolean functions.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GateType(u8);

const NAMES: [&str; 16] = [
    "FALSE",
    "NOR",
    "NOT_A_AND_B",
    "NOT_A",
    "A_AND_NOT_B",
    "NOT_B",
    "XOR",
    "NAND",
    "AND",
    "XNOR",
    "B",
    "NOT_A_OR_B",
    "A",
    "A_OR_NOT_B",
    "OR",
    "TRUE",
];

const SYMBOLS: [&str; 16] = [
    "FALSE", "NOR", "¬A∧B", "¬A", "A∧¬B", "¬B", "XOR", "NAND", "AND", "XNOR", "B", "¬A∨B", "A",
    "A∨¬B", "OR", "TRUE",
];

impl GateType {
    pub const FALSE: GateType = GateType(0b0000);
    pub const NOR: GateType = GateType(0b0001);
    pub const NOT_A_AND_B: GateType = GateType(0b0010);
    pub const NOT_A: GateType = GateType(0b0011);
    pub const A_AND_NOT_B: GateType = GateType(0b0100);
    pub const NOT_B: GateType = GateType(0b0101);
    pub const XOR: GateType = GateType(0b0110);
    pub const NAND: GateType = GateType(0b0111);
    pub const AND: GateType = GateType(0b1000);
    pub const XNOR: GateType = GateType(0b1001);
    pub const B: GateType = GateType(0b1010);
    pub const NOT_A_OR_B: GateType = GateType(0b1011);
    pub const A: GateType = GateType(0b1100);
    pub const A_OR_NOT_B: GateType = GateType(0b1101);
    pub const OR: GateType = GateType(0b1110);
    pub const TRUE: GateType = GateType(0b1111);

    /// Builds a gate type from its truth table; only the low four bits are used.
    pub const fn from_tt(tt: u8) -> GateType {
        GateType(tt & 0xF)
    }

    pub const fn tt(self) -> u8 {
        self.0
    }

    /// All 16 types in truth-table order.
    pub fn all() -> impl Iterator<Item = GateType> + Clone {
        (0u8..16).map(GateType)
    }

    pub fn name(self) -> &'static str {
        NAMES[self.0 as usize]
    }

    /// Logic-notation label, e.g. `¬A∨B`.
    pub fn symbol(self) -> &'static str {
        SYMBOLS[self.0 as usize]
    }

    #[inline]
    pub const fn apply(self, a: bool, b: bool) -> bool {
        (self.0 >> ((a as u8) << 1 | b as u8)) & 1 == 1
    }

    /// Evaluates the gate on 64 input patterns at once.
    #[inline]
    pub fn apply_words(self, a: u64, b: u64) -> u64 {
        match self.0 {
            0b0000 => 0,
            0b0001 => !(a | b),
            0b0010 => !a & b,
            0b0011 => !a,
            0b0100 => a & !b,
            0b0101 => !b,
            0b0110 => a ^ b,
            0b0111 => !(a & b),
            0b1000 => a & b,
            0b1001 => !(a ^ b),
            0b1010 => b,
            0b1011 => !a | b,
            0b1100 => a,
            0b1101 => a | !b,
            0b1110 => a | b,
            _ => u64::MAX,
        }
    }

    /// Complements the output: `f'(a,b) = ¬f(a,b)`.
    pub const fn neg_out(self) -> GateType {
        GateType(!self.0 & 0xF)
    }

    /// Complements the left input: `f'(a,b) = f(¬a,b)`.
    pub const fn neg_left(self) -> GateType {
        GateType(((self.0 >> 2) & 0b11) | ((self.0 & 0b11) << 2))
    }

    /// Complements the right input: `f'(a,b) = f(a,¬b)`.
    pub const fn neg_right(self) -> GateType {
        GateType(((self.0 >> 1) & 0b0101) | ((self.0 & 0b0101) << 1))
    }

    /// Ties the left input to one: `f'(a,b) = f(1,b)`.
    pub const fn fix_left_true(self) -> GateType {
        let hi = (self.0 >> 2) & 0b11;
        GateType(hi | hi << 2)
    }

    /// Ties the right input to one: `f'(a,b) = f(a,1)`.
    pub const fn fix_right_true(self) -> GateType {
        let b1 = (self.0 >> 1) & 1;
        let b3 = (self.0 >> 3) & 1;
        GateType(b1 | b1 << 1 | b3 << 2 | b3 << 3)
    }

    /// Applies input and output polarities in one step.
    pub const fn with_polarity(self, neg_left: bool, neg_right: bool, neg_out: bool) -> GateType {
        let mut t = self;
        if neg_left {
            t = t.neg_left();
        }
        if neg_right {
            t = t.neg_right();
        }
        if neg_out {
            t = t.neg_out();
        }
        t
    }
}

impl fmt::Debug for GateType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for GateType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if let Some(i) = NAMES.iter().position(|n| n.eq_ignore_ascii_case(t)) {
            return Ok(GateType(i as u8));
        }
        if let Some(i) = SYMBOLS.iter().position(|n| *n == t) {
            return Ok(GateType(i as u8));
        }
        let alias = match t.to_ascii_uppercase().as_str() {
            "ZERO" | "CONST0" | "0" => Some(GateType::FALSE),
            "ONE" | "CONST1" | "1" => Some(GateType::TRUE),
            "BUF_A" => Some(GateType::A),
            "BUF_B" => Some(GateType::B),
            "IMPLIES" | "A_IMPLIES_B" => Some(GateType::NOT_A_OR_B),
            "B_IMPLIES_A" => Some(GateType::A_OR_NOT_B),
            _ => None,
        };
        alias.ok_or_else(|| Error::Parse {
            line: None,
            msg: format!("unknown gate type `{t}`"),
        })
    }
}

impl Serialize for GateType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for GateType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A subset of the 16 gate types, stored as a 16-bit characteristic vector.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct TypeSet(u16);

impl TypeSet {
    pub const EMPTY: TypeSet = TypeSet(0);

    /// The full library.
    pub const L: TypeSet = TypeSet(0xFFFF);

    /// Types sufficient for every gate outside the output layer once output
    /// negations are pushed forward.
    pub const R: TypeSet = TypeSet::from_types(&[
        GateType::XOR,
        GateType::OR,
        GateType::NAND,
        GateType::TRUE,
        GateType::NOT_A,
        GateType::NOT_B,
        GateType::NOT_A_OR_B,
        GateType::A_OR_NOT_B,
    ]);

    /// Domain of a gate whose two gate predecessors both have fanout one.
    pub const S: TypeSet = TypeSet::from_types(&[GateType::AND, GateType::NAND, GateType::XOR]);

    /// Domain of a gate whose left predecessor alone has fanout one.
    pub const Z_LEFT: TypeSet = TypeSet::from_types(&[
        GateType::XOR,
        GateType::AND,
        GateType::NAND,
        GateType::NOR,
        GateType::OR,
        GateType::A,
    ]);

    /// Domain of a gate whose right predecessor alone has fanout one.
    pub const Z_RIGHT: TypeSet = TypeSet::from_types(&[
        GateType::XOR,
        GateType::AND,
        GateType::NAND,
        GateType::NOR,
        GateType::OR,
        GateType::B,
    ]);

    pub const fn from_bits(bits: u16) -> TypeSet {
        TypeSet(bits)
    }

    pub const fn from_types(types: &[GateType]) -> TypeSet {
        let mut bits = 0u16;
        let mut i = 0;
        while i < types.len() {
            bits |= 1 << types[i].0;
            i += 1;
        }
        TypeSet(bits)
    }

    pub const fn singleton(t: GateType) -> TypeSet {
        TypeSet(1 << t.0)
    }

    pub const fn bits(self) -> u16 {
        self.0
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn contains(self, t: GateType) -> bool {
        self.0 >> t.0 & 1 == 1
    }

    pub fn insert(&mut self, t: GateType) {
        self.0 |= 1 << t.0;
    }

    pub fn remove(&mut self, t: GateType) {
        self.0 &= !(1 << t.0);
    }

    pub const fn union(self, other: TypeSet) -> TypeSet {
        TypeSet(self.0 | other.0)
    }

    pub const fn intersection(self, other: TypeSet) -> TypeSet {
        TypeSet(self.0 & other.0)
    }

    pub const fn is_subset(self, other: TypeSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Types in ascending truth-table order.
    pub fn iter(self) -> impl Iterator<Item = GateType> + Clone {
        GateType::all().filter(move |t| self.contains(*t))
    }

    /// Image of the set under a per-type map.
    pub fn map(self, f: impl Fn(GateType) -> GateType) -> TypeSet {
        self.iter().fold(TypeSet::EMPTY, |mut acc, t| {
            acc.insert(f(t));
            acc
        })
    }

    /// `{ ¬g : g ∈ self }`
    pub fn negated(self) -> TypeSet {
        self.map(GateType::neg_out)
    }
}

impl FromIterator<GateType> for TypeSet {
    fn from_iter<I: IntoIterator<Item = GateType>>(iter: I) -> Self {
        iter.into_iter().fold(TypeSet::EMPTY, |mut acc, t| {
            acc.insert(t);
            acc
        })
    }
}

impl fmt::Debug for TypeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference(t: GateType, a: bool, b: bool) -> bool {
        // written out from the canonical names, independent of the bit layout
        match t.name() {
            "FALSE" => false,
            "AND" => a && b,
            "A_AND_NOT_B" => a && !b,
            "A" => a,
            "NOT_A_AND_B" => !a && b,
            "B" => b,
            "XOR" => a != b,
            "OR" => a || b,
            "NOR" => !(a || b),
            "XNOR" => a == b,
            "NOT_B" => !b,
            "A_OR_NOT_B" => a || !b,
            "NOT_A" => !a,
            "NOT_A_OR_B" => !a || b,
            "NAND" => !(a && b),
            "TRUE" => true,
            other => panic!("unexpected name {other}"),
        }
    }

    #[test]
    fn names_match_truth_tables() {
        for t in GateType::all() {
            for a in [false, true] {
                for b in [false, true] {
                    assert_eq!(t.apply(a, b), reference(t, a, b), "{t} on ({a},{b})");
                }
            }
        }
        let names: std::collections::HashSet<_> = GateType::all().map(|t| t.name()).collect();
        assert_eq!(names.len(), 16);
        assert_eq!(GateType::XOR.tt(), 0b0110);
    }

    #[test]
    fn apply_examples() {
        assert!(GateType::AND.apply(true, true));
        assert!(!GateType::NOT_A_OR_B.apply(true, false));
        assert!(GateType::TRUE.apply(false, false));
    }

    #[test]
    fn operator_examples() {
        assert_eq!(GateType::AND.neg_out(), GateType::NAND);
        assert_eq!(GateType::NOT_A_OR_B.neg_left(), GateType::OR);
        assert_eq!(GateType::AND.fix_left_true(), GateType::B);
        assert_eq!(GateType::AND.fix_right_true(), GateType::A);
    }

    #[test]
    fn word_evaluation_matches_scalar() {
        let a = 0b1100u64;
        let b = 0b1010u64;
        for t in GateType::all() {
            assert_eq!(t.apply_words(a, b) & 0xF, t.tt() as u64, "{t}");
        }
    }

    #[test]
    fn named_set_sizes() {
        assert_eq!(TypeSet::L.len(), 16);
        assert_eq!(TypeSet::R.len(), 8);
        assert_eq!(TypeSet::S.len(), 3);
        assert_eq!(TypeSet::Z_LEFT.len(), 6);
        assert_eq!(TypeSet::Z_RIGHT.len(), 6);
        assert!(TypeSet::S.is_subset(TypeSet::Z_LEFT));
    }

    #[test]
    fn parse_names_and_symbols() {
        for t in GateType::all() {
            assert_eq!(t.name().parse::<GateType>().unwrap(), t);
            assert_eq!(t.symbol().parse::<GateType>().unwrap(), t);
        }
        assert_eq!("nand".parse::<GateType>().unwrap(), GateType::NAND);
        assert!("MUX".parse::<GateType>().is_err());
    }
}
