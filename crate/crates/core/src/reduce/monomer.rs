use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::algebra::library::at_most_one;
use crate::algebra::{Instance, Rational};
use crate::error::{Error, Result};
use crate::eval::WeightedGraph;

/// `Z(inst) = scale · Z_MD(graph)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomerDimer {
    pub graph: WeightedGraph,
    pub scale: Rational,
}

/// Translates a degree-2 instance over `AMO_3` into a weighted graph whose
/// vertices are the atoms and whose edges are the variables.
pub fn to_monomer_dimer(inst: &Instance) -> Result<MonomerDimer> {
    let amo = at_most_one(3);
    for (a, atom) in inst.atoms().iter().enumerate() {
        if inst.atom_signature(atom).table() != amo.table() {
            return Err(Error::NotInClass {
                atom: a,
                sig: atom.sig.clone(),
                class: "AMO_3".into(),
            });
        }
    }
    let uses = super::uses(inst);
    for (v, u) in uses.iter().enumerate() {
        if u.len() != 2 {
            return Err(Error::DegreePolicy {
                var: inst.vars().name(v).to_string(),
                degree: u.len(),
                policy: "= 2".into(),
            });
        }
    }
    let n_atoms = inst.atoms().len();
    let mut scale = Rational::one();
    let mut deleted = vec![false; n_atoms];
    let mut forced_uses = vec![0usize; n_atoms];
    let mut edges: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for (v, u) in uses.iter().enumerate() {
        let w = inst.weight(v);
        let (a, b) = (u[0].0, u[1].0);
        if w.w0.is_zero() {
            // The variable is forced to 1, so both of its atoms are saturated.
            scale *= &w.w1;
            for atom in [a, b] {
                deleted[atom] = true;
                forced_uses[atom] += 1;
            }
        } else {
            scale *= &w.w0;
            if a != b && !w.w1.is_zero() {
                let key = (a.min(b), a.max(b));
                *edges.entry(key).or_insert_with(Rational::zero) += &w.w1 / &w.w0;
            }
        }
    }
    if forced_uses.iter().any(|&c| c > 1) {
        scale = Rational::zero();
    }
    let mut index = vec![usize::MAX; n_atoms];
    let mut vertices = 0;
    for a in 0..n_atoms {
        if !deleted[a] {
            index[a] = vertices;
            vertices += 1;
        }
    }
    let edges = edges
        .into_iter()
        .filter(|((a, b), _)| !deleted[*a] && !deleted[*b])
        .map(|((a, b), w)| (index[a], index[b], w))
        .collect();
    Ok(MonomerDimer {
        graph: WeightedGraph { vertices, edges },
        scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::num::int;
    use crate::algebra::Weight;
    use crate::eval::{brute_force_z, matching_brute_force};

    fn build(atoms: usize, vars: &[(usize, usize, i64, i64)]) -> Instance {
        let mut b = Instance::builder();
        b.signature("R", at_most_one(3));
        let mut scopes = vec![Vec::new(); atoms];
        for (i, &(a, c, w0, w1)) in vars.iter().enumerate() {
            let v = b.var(format!("v{i}"), Weight::new(int(w0), int(w1)));
            scopes[a].push(v);
            scopes[c].push(v);
        }
        // Fill the free slots with variables of weight (1,0), which never
        // contribute an edge.
        let mut slots: Vec<usize> = (0..atoms).flat_map(|a| std::iter::repeat_n(a, 3 - scopes[a].len())).collect();
        if slots.len() % 2 == 1 {
            scopes.push(Vec::new());
            slots.extend([atoms; 3]);
        }
        for (k, pair) in slots.chunks(2).enumerate() {
            let p = b.var(format!("pad{k}"), Weight::new(int(1), int(0)));
            scopes[pair[0]].push(p);
            scopes[pair[1]].push(p);
        }
        for scope in scopes {
            b.atom_idx("R", scope);
        }
        b.build().unwrap()
    }

    #[test]
    fn triangle() {
        let inst = build(3, &[(0, 1, 1, 1), (1, 2, 1, 1), (2, 0, 1, 1)]);
        let md = to_monomer_dimer(&inst).unwrap();
        assert_eq!(md.graph.edges.len(), 3);
        let z_md = matching_brute_force(&md.graph).unwrap();
        assert_eq!(z_md, int(4));
        assert_eq!(brute_force_z(&inst).unwrap(), &md.scale * z_md);
    }

    #[test]
    fn forced_variable_deletes_atoms() {
        let inst = build(3, &[(0, 1, 0, 1), (1, 2, 1, 1), (2, 0, 1, 1)]);
        let md = to_monomer_dimer(&inst).unwrap();
        assert_eq!(md.graph.vertices, 2);
        assert!(md.graph.edges.is_empty());
        assert_eq!(brute_force_z(&inst).unwrap(), &md.scale * matching_brute_force(&md.graph).unwrap());
    }

    #[test]
    fn parallel_edges_merge() {
        let inst = build(2, &[(0, 1, 1, 2), (0, 1, 1, 3)]);
        let md = to_monomer_dimer(&inst).unwrap();
        assert_eq!(md.graph.edges, vec![(0, 1, int(5))]);
        assert_eq!(brute_force_z(&inst).unwrap(), int(6));
        assert_eq!(matching_brute_force(&md.graph).unwrap(), int(6));
    }
}
