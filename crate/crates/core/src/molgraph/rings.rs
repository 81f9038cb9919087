use super::MolGraph;

/// Per-atom and per-bond cycle membership.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingFlags {
    pub atoms: Vec<bool>,
    pub bonds: Vec<bool>,
}

/// Returns a flag per bond that is true iff the bond is a bridge.
///
/// Iterative lowlink DFS; handles disconnected graphs.
pub fn bridges(graph: &MolGraph) -> Vec<bool> {
    let n = graph.atom_count();
    let mut is_bridge = vec![false; graph.bond_count()];
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0;
    // (vertex, bond used to enter it, next neighbor position)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        stack.push((root, usize::MAX, 0));
        while let Some(frame) = stack.last_mut() {
            let (v, parent_bond, pos) = *frame;
            if let Some(nb) = graph.neighbors(v).get(pos) {
                frame.2 += 1;
                if nb.bond == parent_bond {
                    continue;
                }
                if disc[nb.atom] == usize::MAX {
                    disc[nb.atom] = timer;
                    low[nb.atom] = timer;
                    timer += 1;
                    stack.push((nb.atom, nb.bond, 0));
                } else {
                    low[v] = low[v].min(disc[nb.atom]);
                }
            } else {
                stack.pop();
                if let Some(&(parent, _, _)) = stack.last() {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > disc[parent] {
                        is_bridge[parent_bond] = true;
                    }
                }
            }
        }
    }
    is_bridge
}

/// Flags every atom and bond lying on at least one cycle.
///
/// A bond is cyclic iff it is not a bridge; an atom is cyclic iff it has a
/// cyclic bond.
pub fn ring_membership(graph: &MolGraph) -> RingFlags {
    let bonds: Vec<bool> = bridges(graph).into_iter().map(|b| !b).collect();
    let mut atoms = vec![false; graph.atom_count()];
    for (bond, &cyclic) in graph.bonds().iter().zip(&bonds) {
        if cyclic {
            atoms[bond.endpoints.0] = true;
            atoms[bond.endpoints.1] = true;
        }
    }
    RingFlags { atoms, bonds }
}
