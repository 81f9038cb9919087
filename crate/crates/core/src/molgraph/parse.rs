//! Parser for a practical SMILES subset.
//!
//! Supported: organic-subset atoms, bracket atoms (isotope, element, chirality,
//! hydrogen count, charge, atom class), bonds `- = # : / \`, branches, ring
//! closures (`1`..`9`, `%nn`) and lowercase aromatic atoms. Stereo markers,
//! isotopes, hydrogen counts and atom classes are parsed and dropped.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{bridges, elements, AtomSpec, BondOrder, GraphError, MolGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmilesError {
    #[error("empty SMILES")]
    Empty,
    #[error("unknown token {token:?} at position {pos}")]
    UnknownToken { pos: usize, token: char },
    #[error("unbalanced parenthesis at position {pos}")]
    UnbalancedParen { pos: usize },
    #[error("ring bond {label} opened but never closed")]
    UnclosedRing { label: u16 },
    #[error("invalid ring closure {label} at position {pos}")]
    InvalidRingBond { pos: usize, label: u16 },
    #[error("bond symbol at position {pos} is not followed by an atom")]
    DanglingBond { pos: usize },
    #[error("multiple fragments ('.' at position {pos})")]
    MultiFragment { pos: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

struct PendingBond {
    order: BondOrder,
    pos: usize,
}

struct RawBond {
    a: usize,
    b: usize,
    order: BondOrder,
    implicit: bool,
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
    atoms: Vec<AtomSpec>,
    bonds: Vec<RawBond>,
    prev: Option<usize>,
    branches: Vec<(usize, usize)>,
    pending: Option<PendingBond>,
    rings: BTreeMap<u16, (usize, Option<BondOrder>, usize)>,
}

/// Parses `input` into a heavy-atom [`MolGraph`].
///
/// Implicit bonds between two aromatic atoms are aromatic when they lie on a
/// ring and single otherwise (e.g. the biaryl bond in `c1ccccc1c1ccccc1`).
pub fn parse_smiles(input: &str) -> Result<MolGraph, SmilesError> {
    let input = input.trim();
    if input.is_empty() {
        return Err(SmilesError::Empty);
    }
    if let Some((pos, token)) = input.char_indices().find(|(_, c)| !c.is_ascii()) {
        return Err(SmilesError::UnknownToken { pos, token });
    }
    let mut parser = Parser {
        text: input.as_bytes(),
        pos: 0,
        atoms: Vec::new(),
        bonds: Vec::new(),
        prev: None,
        branches: Vec::new(),
        pending: None,
        rings: BTreeMap::new(),
    };
    parser.run()?;
    parser.finish(input)
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn unknown(&self, pos: usize) -> SmilesError {
        SmilesError::UnknownToken {
            pos,
            token: self.text.get(pos).map_or('\0', |&b| b as char),
        }
    }

    fn run(&mut self) -> Result<(), SmilesError> {
        while let Some(c) = self.peek() {
            let start = self.pos;
            match c {
                b'(' => {
                    let Some(prev) = self.prev else {
                        return Err(SmilesError::UnbalancedParen { pos: start });
                    };
                    if let Some(p) = &self.pending {
                        return Err(SmilesError::DanglingBond { pos: p.pos });
                    }
                    self.branches.push((prev, start));
                    self.pos += 1;
                }
                b')' => {
                    if let Some(p) = &self.pending {
                        return Err(SmilesError::DanglingBond { pos: p.pos });
                    }
                    let Some((atom, _)) = self.branches.pop() else {
                        return Err(SmilesError::UnbalancedParen { pos: start });
                    };
                    self.prev = Some(atom);
                    self.pos += 1;
                }
                b'-' | b'=' | b'#' | b':' | b'/' | b'\\' => {
                    if self.pending.is_some() || self.prev.is_none() {
                        return Err(self.unknown(start));
                    }
                    let order = match c {
                        b'=' => BondOrder::Double,
                        b'#' => BondOrder::Triple,
                        b':' => BondOrder::Aromatic,
                        _ => BondOrder::Single,
                    };
                    self.pending = Some(PendingBond { order, pos: start });
                    self.pos += 1;
                }
                b'.' => return Err(SmilesError::MultiFragment { pos: start }),
                b'0'..=b'9' | b'%' => self.ring_closure()?,
                b'[' => {
                    let spec = self.bracket_atom()?;
                    self.add_atom(spec);
                }
                _ => {
                    let spec = self.organic_atom()?;
                    self.add_atom(spec);
                }
            }
        }
        if let Some(p) = &self.pending {
            return Err(SmilesError::DanglingBond { pos: p.pos });
        }
        if let Some(&(_, pos)) = self.branches.last() {
            return Err(SmilesError::UnbalancedParen { pos });
        }
        if let Some((&label, _)) = self.rings.iter().next() {
            return Err(SmilesError::UnclosedRing { label });
        }
        Ok(())
    }

    fn add_atom(&mut self, spec: AtomSpec) {
        let index = self.atoms.len();
        self.atoms.push(spec);
        if let Some(prev) = self.prev {
            let pending = self.pending.take();
            let implicit = pending.is_none();
            let order = pending.map_or_else(|| self.implicit_order(prev, index), |p| p.order);
            self.bonds.push(RawBond {
                a: prev,
                b: index,
                order,
                implicit,
            });
        }
        self.prev = Some(index);
    }

    fn implicit_order(&self, a: usize, b: usize) -> BondOrder {
        if self.atoms[a].aromatic && self.atoms[b].aromatic {
            BondOrder::Aromatic
        } else {
            BondOrder::Single
        }
    }

    fn ring_closure(&mut self) -> Result<(), SmilesError> {
        let start = self.pos;
        let label = if self.text[self.pos] == b'%' {
            let digits = self.text.get(self.pos + 1..self.pos + 3);
            match digits {
                Some(d) if d.iter().all(u8::is_ascii_digit) => {
                    self.pos += 3;
                    ((d[0] - b'0') as u16) * 10 + (d[1] - b'0') as u16
                }
                _ => return Err(self.unknown(start)),
            }
        } else {
            self.pos += 1;
            (self.text[start] - b'0') as u16
        };
        let Some(atom) = self.prev else {
            return Err(self.unknown(start));
        };
        let pending = self.pending.take().map(|p| p.order);
        match self.rings.remove(&label) {
            None => {
                self.rings.insert(label, (atom, pending, start));
            }
            Some((opener, open_order, _)) => {
                let order = match (open_order, pending) {
                    (Some(a), Some(b)) if a != b => return Err(SmilesError::InvalidRingBond { pos: start, label }),
                    (Some(a), _) | (None, Some(a)) => Some(a),
                    (None, None) => None,
                };
                let duplicate = self
                    .bonds
                    .iter()
                    .any(|b| (b.a == opener && b.b == atom) || (b.a == atom && b.b == opener));
                if opener == atom || duplicate {
                    return Err(SmilesError::InvalidRingBond { pos: start, label });
                }
                self.bonds.push(RawBond {
                    a: opener,
                    b: atom,
                    order: order.unwrap_or_else(|| self.implicit_order(opener, atom)),
                    implicit: order.is_none(),
                });
            }
        }
        Ok(())
    }

    fn organic_atom(&mut self) -> Result<AtomSpec, SmilesError> {
        let start = self.pos;
        let c = self.text[start];
        let next = self.text.get(start + 1).copied();
        let (z, aromatic, len) = match (c, next) {
            (b'C', Some(b'l')) => (17, false, 2),
            (b'B', Some(b'r')) => (35, false, 2),
            (b'B', _) => (5, false, 1),
            (b'C', _) => (6, false, 1),
            (b'N', _) => (7, false, 1),
            (b'O', _) => (8, false, 1),
            (b'P', _) => (15, false, 1),
            (b'S', _) => (16, false, 1),
            (b'F', _) => (9, false, 1),
            (b'I', _) => (53, false, 1),
            (b'b', _) => (5, true, 1),
            (b'c', _) => (6, true, 1),
            (b'n', _) => (7, true, 1),
            (b'o', _) => (8, true, 1),
            (b'p', _) => (15, true, 1),
            (b's', _) => (16, true, 1),
            (b'*', _) => (0, false, 1),
            _ => return Err(self.unknown(start)),
        };
        self.pos += len;
        Ok(AtomSpec {
            atomic_number: z,
            aromatic,
            formal_charge: 0,
        })
    }

    fn bracket_atom(&mut self) -> Result<AtomSpec, SmilesError> {
        let open = self.pos;
        self.pos += 1;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let (atomic_number, aromatic) = self.bracket_symbol()?;
        // chirality
        if self.peek() == Some(b'@') {
            self.pos += 1;
            if self.peek() == Some(b'@') {
                self.pos += 1;
            } else if let Some(tag) = self.text.get(self.pos..self.pos + 2) {
                if matches!(tag, b"TH" | b"AL" | b"SP" | b"TB" | b"OH") {
                    self.pos += 2;
                    while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        self.pos += 1;
                    }
                }
            }
        }
        if self.peek() == Some(b'H') {
            self.pos += 1;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        let mut formal_charge: i32 = 0;
        if let Some(sign @ (b'+' | b'-')) = self.peek() {
            let unit = if sign == b'+' { 1 } else { -1 };
            self.pos += 1;
            let digits_start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            if self.pos > digits_start {
                let magnitude: i32 = std::str::from_utf8(&self.text[digits_start..self.pos])
                    .ok()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| self.unknown(digits_start))?;
                formal_charge = unit * magnitude;
            } else {
                formal_charge = unit;
                while self.peek() == Some(sign) {
                    formal_charge += unit;
                    self.pos += 1;
                }
            }
        }
        if self.peek() == Some(b':') {
            self.pos += 1;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        match self.peek() {
            Some(b']') => self.pos += 1,
            Some(_) => return Err(self.unknown(self.pos)),
            None => return Err(self.unknown(open)),
        }
        let formal_charge =
            i8::try_from(formal_charge).map_err(|_| SmilesError::UnknownToken { pos: open, token: '[' })?;
        Ok(AtomSpec {
            atomic_number,
            aromatic,
            formal_charge,
        })
    }

    fn bracket_symbol(&mut self) -> Result<(u8, bool), SmilesError> {
        let start = self.pos;
        match self.peek() {
            Some(b'*') => {
                self.pos += 1;
                Ok((0, false))
            }
            Some(c) if c.is_ascii_uppercase() => {
                let mut end = start + 1;
                if self.text.get(end).is_some_and(|c| c.is_ascii_lowercase()) {
                    end += 1;
                }
                self.pos = end;
                let symbol = std::str::from_utf8(&self.text[start..end]).expect("ascii");
                Ok((elements::atomic_number(symbol), false))
            }
            Some(c) if c.is_ascii_lowercase() => {
                let upper = (c as char).to_ascii_uppercase();
                if let Some(&next) = self.text.get(start + 1) {
                    if next.is_ascii_lowercase() {
                        let two = format!("{upper}{}", next as char);
                        let z = elements::atomic_number(&two);
                        if z != 0 {
                            self.pos += 2;
                            return Ok((z, true));
                        }
                    }
                }
                self.pos += 1;
                Ok((elements::atomic_number(&upper.to_string()), true))
            }
            _ => Err(self.unknown(start)),
        }
    }

    fn finish(self, source: &str) -> Result<MolGraph, SmilesError> {
        let mut edges: Vec<_> = self.bonds.iter().map(|b| (b.a, b.b, b.order)).collect();
        let graph = MolGraph::new(&self.atoms, &edges, source)?;
        // Implicit aromatic bonds that are bridges join two aromatic systems.
        let is_bridge = bridges(&graph);
        let mut changed = false;
        for ((edge, raw), bridge) in edges.iter_mut().zip(&self.bonds).zip(is_bridge) {
            if raw.implicit && bridge && edge.2 == BondOrder::Aromatic {
                edge.2 = BondOrder::Single;
                changed = true;
            }
        }
        if changed {
            Ok(MolGraph::new(&self.atoms, &edges, source)?)
        } else {
            Ok(graph)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orders(g: &MolGraph) -> Vec<BondOrder> {
        g.bonds().iter().map(|b| b.order).collect()
    }

    #[test]
    fn ethanol() {
        let g = parse_smiles("CCO").unwrap();
        let z: Vec<u8> = g.atoms().iter().map(|a| a.atomic_number).collect();
        assert_eq!(z, vec![6, 6, 8]);
        assert_eq!(orders(&g), vec![BondOrder::Single; 2]);
    }

    #[test]
    fn benzene() {
        let g = parse_smiles("c1ccccc1").unwrap();
        assert_eq!(g.atom_count(), 6);
        assert!(g.atoms().iter().all(|a| a.aromatic && a.in_ring));
        assert_eq!(orders(&g), vec![BondOrder::Aromatic; 6]);
    }

    #[test]
    fn unclosed_ring() {
        assert_eq!(
            parse_smiles("C1CC").unwrap_err(),
            SmilesError::UnclosedRing { label: 1 }
        );
    }

    #[test]
    fn unbalanced_parens() {
        assert!(matches!(
            parse_smiles("CC(C").unwrap_err(),
            SmilesError::UnbalancedParen { pos: 2 }
        ));
        assert!(matches!(
            parse_smiles("CC)C").unwrap_err(),
            SmilesError::UnbalancedParen { pos: 2 }
        ));
        assert!(matches!(
            parse_smiles("(C)C").unwrap_err(),
            SmilesError::UnbalancedParen { pos: 0 }
        ));
    }

    #[test]
    fn multi_fragment_and_unknown() {
        assert_eq!(parse_smiles("CC.O").unwrap_err(), SmilesError::MultiFragment { pos: 2 });
        assert!(matches!(
            parse_smiles("CXC").unwrap_err(),
            SmilesError::UnknownToken { pos: 1, token: 'X' }
        ));
        assert!(matches!(
            parse_smiles("C$C").unwrap_err(),
            SmilesError::UnknownToken { token: '$', .. }
        ));
        assert_eq!(parse_smiles("  ").unwrap_err(), SmilesError::Empty);
        assert!(matches!(
            parse_smiles("CC=").unwrap_err(),
            SmilesError::DanglingBond { pos: 2 }
        ));
    }

    #[test]
    fn bracket_atoms() {
        let g = parse_smiles("[13CH3][N+](C)(C)[O-]").unwrap();
        assert_eq!(g.atom_count(), 5);
        assert_eq!(g.atom(0).atomic_number, 6);
        assert_eq!(g.atom(1).formal_charge, 1);
        assert_eq!(g.atom(4).formal_charge, -1);
        let g = parse_smiles("[Fe++]").unwrap();
        assert_eq!(g.atom(0).formal_charge, 2);
        assert_eq!(g.atom(0).atomic_number, 26);
        let g = parse_smiles("[Cu-2]").unwrap();
        assert_eq!(g.atom(0).formal_charge, -2);
        let g = parse_smiles("[NH4+:12]").unwrap();
        assert_eq!(g.atom(0).atomic_number, 7);
        let g = parse_smiles("[Xx]C").unwrap();
        assert_eq!(g.atom(0).atomic_number, 0);
        let g = parse_smiles("c1cc[se]c1").unwrap();
        assert_eq!(g.atom(3).atomic_number, 34);
        assert!(g.atom(3).aromatic);
        let g = parse_smiles("[nH]1cccc1").unwrap();
        assert!(g.atom(0).aromatic);
        assert_eq!(g.atom(0).atomic_number, 7);
    }

    #[test]
    fn stereo_is_discarded() {
        let a = parse_smiles("F/C=C/F").unwrap();
        let b = parse_smiles("FC=CF").unwrap();
        assert_eq!(orders(&a), orders(&b));
        let g = parse_smiles("N[C@@H](C)C(=O)O").unwrap();
        assert_eq!(g.atom_count(), 6);
        let g = parse_smiles("C[C@TH1H](N)O").unwrap();
        assert_eq!(g.atom_count(), 4);
    }

    #[test]
    fn ring_closures() {
        let g = parse_smiles("C%10CC%10").unwrap();
        assert_eq!(g.bond_count(), 3);
        let g = parse_smiles("C=1CC1").unwrap();
        assert_eq!(g.bond_between(0, 2).unwrap().order, BondOrder::Double);
        let g = parse_smiles("C1CC=1").unwrap();
        assert_eq!(g.bond_between(0, 2).unwrap().order, BondOrder::Double);
        assert!(matches!(
            parse_smiles("C=1CC#1").unwrap_err(),
            SmilesError::InvalidRingBond { label: 1, .. }
        ));
        assert!(matches!(
            parse_smiles("C11").unwrap_err(),
            SmilesError::InvalidRingBond { .. }
        ));
        assert!(matches!(
            parse_smiles("C12CC12").unwrap_err(),
            SmilesError::InvalidRingBond { .. }
        ));
        // ring labels can be reused after closing
        let g = parse_smiles("C1CC1C1CC1").unwrap();
        assert_eq!(g.bond_count(), 7);
    }

    #[test]
    fn biaryl_bond_is_single() {
        let g = parse_smiles("c1ccccc1c1ccccc1").unwrap();
        let single: Vec<_> = g
            .bonds()
            .iter()
            .filter(|b| b.order == BondOrder::Single)
            .map(|b| b.endpoints)
            .collect();
        assert_eq!(single, vec![(5, 6)]);
        let g = parse_smiles("c1ccccc1:c1ccccc1").unwrap();
        assert_eq!(g.bond_between(5, 6).unwrap().order, BondOrder::Aromatic);
    }

    #[test]
    fn branches() {
        let g = parse_smiles("CC(=O)(O)N").unwrap();
        assert_eq!(g.degree(1), 4);
        assert_eq!(g.bond_between(1, 2).unwrap().order, BondOrder::Double);
        let g = parse_smiles("C(C)(C)(C)C").unwrap();
        assert_eq!(g.degree(0), 4);
    }
}
