use super::{elements, Atom, BondOrder, MolGraph};

const ORGANIC: [u8; 10] = [5, 6, 7, 8, 9, 15, 16, 17, 35, 53];
const AROMATIC_ORGANIC: [u8; 6] = [5, 6, 7, 8, 15, 16];

/// Emits a SMILES string for `graph`, traversing atoms in canonical rank order.
///
/// Isomorphic graphs produce the same string. Re-parsing the output yields a
/// graph isomorphic to the input (hydrogen counts are never written).
pub fn to_smiles(graph: &MolGraph) -> String {
    let all: Vec<usize> = (0..graph.atom_count()).collect();
    let ranks = crate::motif::canonical_ranks(graph, &all);
    let mut writer = Writer {
        graph,
        ranks,
        visited: vec![false; graph.atom_count()],
        closures: vec![Vec::new(); graph.atom_count()],
        out: String::new(),
    };
    writer.write()
}

struct Writer<'a> {
    graph: &'a MolGraph,
    ranks: Vec<usize>,
    visited: Vec<bool>,
    /// ring-closure bonds per atom, in emission order: (partner, bond index)
    closures: Vec<Vec<(usize, usize)>>,
    out: String,
}

impl Writer<'_> {
    fn sorted_neighbors(&self, atom: usize) -> Vec<(usize, usize)> {
        let mut nbs: Vec<(usize, usize)> = self.graph.neighbors(atom).iter().map(|nb| (nb.atom, nb.bond)).collect();
        nbs.sort_by_key(|&(a, _)| self.ranks[a]);
        nbs
    }

    fn write(&mut self) -> String {
        let n = self.graph.atom_count();
        let start = (0..n).min_by_key(|&a| self.ranks[a]).unwrap_or(0);
        // first pass: discover ring closures with the same traversal order as emission
        let mut children = vec![Vec::new(); n];
        let mut seen = vec![false; n];
        let mut used_bond = vec![false; self.graph.bond_count()];
        self.discover(start, &mut seen, &mut used_bond, &mut children);
        let mut labels = LabelPool::default();
        let mut open: Vec<Option<u16>> = vec![None; self.graph.bond_count()];
        self.emit(start, None, &children, &mut labels, &mut open);
        std::mem::take(&mut self.out)
    }

    fn discover(
        &mut self,
        atom: usize,
        seen: &mut [bool],
        used_bond: &mut [bool],
        children: &mut [Vec<(usize, usize)>],
    ) {
        seen[atom] = true;
        for (nb, bond) in self.sorted_neighbors(atom) {
            if used_bond[bond] {
                continue;
            }
            used_bond[bond] = true;
            if seen[nb] {
                self.closures[nb].push((atom, bond));
                self.closures[atom].push((nb, bond));
            } else {
                children[atom].push((nb, bond));
                self.discover(nb, seen, used_bond, children);
            }
        }
    }

    fn emit(
        &mut self,
        atom: usize,
        via: Option<usize>,
        children: &[Vec<(usize, usize)>],
        labels: &mut LabelPool,
        open: &mut [Option<u16>],
    ) {
        if let Some(bond) = via {
            self.bond_symbol(bond);
        }
        self.visited[atom] = true;
        self.out.push_str(&atom_token(self.graph.atom(atom)));
        for (_, bond) in self.closures[atom].clone() {
            match open[bond].take() {
                Some(label) => {
                    self.push_label(label);
                    labels.release(label);
                }
                None => {
                    let label = labels.acquire();
                    self.bond_symbol(bond);
                    self.push_label(label);
                    open[bond] = Some(label);
                }
            }
        }
        let kids = &children[atom];
        for (i, &(child, bond)) in kids.iter().enumerate() {
            let last = i + 1 == kids.len();
            if !last {
                self.out.push('(');
            }
            self.emit(child, Some(bond), children, labels, open);
            if !last {
                self.out.push(')');
            }
        }
    }

    fn push_label(&mut self, label: u16) {
        if label < 10 {
            self.out.push(char::from(b'0' + label as u8));
        } else {
            self.out.push_str(&format!("%{label:02}"));
        }
    }

    fn bond_symbol(&mut self, bond: usize) {
        let b = self.graph.bonds()[bond];
        let (x, y) = b.endpoints;
        let both_aromatic = self.graph.atom(x).aromatic && self.graph.atom(y).aromatic;
        let implicit = if both_aromatic && self.graph.bond_in_ring(bond) {
            BondOrder::Aromatic
        } else {
            BondOrder::Single
        };
        if b.order != implicit {
            self.out.push(b.order.symbol());
        }
    }
}

#[derive(Default)]
struct LabelPool {
    in_use: Vec<bool>,
}

impl LabelPool {
    fn acquire(&mut self) -> u16 {
        for (i, used) in self.in_use.iter_mut().enumerate().skip(1) {
            if !*used {
                *used = true;
                return i as u16;
            }
        }
        if self.in_use.is_empty() {
            self.in_use.push(true);
        }
        self.in_use.push(true);
        (self.in_use.len() - 1) as u16
    }

    fn release(&mut self, label: u16) {
        self.in_use[label as usize] = false;
    }
}

fn atom_token(atom: &Atom) -> String {
    let z = atom.atomic_number;
    let symbol = elements::symbol(z);
    let organic = if atom.aromatic {
        AROMATIC_ORGANIC.contains(&z)
    } else {
        ORGANIC.contains(&z)
    };
    if z == 0 && atom.formal_charge == 0 && !atom.aromatic {
        return "*".to_string();
    }
    let symbol = if atom.aromatic {
        symbol.to_ascii_lowercase()
    } else {
        symbol.to_string()
    };
    if organic && atom.formal_charge == 0 {
        return symbol;
    }
    let charge = match atom.formal_charge {
        0 => String::new(),
        1 => "+".to_string(),
        -1 => "-".to_string(),
        c if c > 0 => format!("+{c}"),
        c => format!("-{}", -c),
    };
    format!("[{symbol}{charge}]")
}
