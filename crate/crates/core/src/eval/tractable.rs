use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::num::{common_denominator, product};
use crate::algebra::{Atom, Instance, Rational};
use crate::classify::{decompose, Decomposition};
use crate::error::{Error, Result};

/// Decompositions of the signatures used by `inst`, keyed by name; `None`
/// for identically-zero signatures.
fn decompositions(inst: &Instance) -> Result<HashMap<&str, Option<Decomposition>>> {
    let mut out = HashMap::new();
    for atom in inst.atoms() {
        if !out.contains_key(atom.sig.as_str()) {
            let sig = inst.atom_signature(atom);
            let d = match decompose(sig) {
                Ok(d) => Some(d),
                Err(Error::IdenticallyZero) => None,
                Err(e) => return Err(e),
            };
            out.insert(atom.sig.as_str(), d);
        }
    }
    Ok(out)
}

fn not_in_class(i: usize, atom: &Atom, class: &str) -> Error {
    Error::NotInClass {
        atom: i,
        sig: atom.sig.clone(),
        class: class.to_string(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PinStatus {
    Free,
    /// Only representative value 0 is consistent with the pins.
    Forced0,
    Forced1,
    Contradictory,
}

/// A connected component of the parity constraints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityComponent {
    pub representative: usize,
    /// `(variable, parity)` with `x_v = x_rep ⊕ parity`.
    pub members: Vec<(usize, bool)>,
    pub pin: PinStatus,
}

struct ParityUnionFind {
    parent: Vec<usize>,
    parity: Vec<bool>,
    conflict: Vec<bool>,
}

impl ParityUnionFind {
    fn new(n: usize) -> Self {
        ParityUnionFind {
            parent: (0..n).collect(),
            parity: vec![false; n],
            conflict: vec![false; n],
        }
    }

    fn find(&mut self, v: usize) -> (usize, bool) {
        let mut path = Vec::new();
        let mut r = v;
        while self.parent[r] != r {
            path.push(r);
            r = self.parent[r];
        }
        // compress, accumulating parity from the top of the path down
        let mut acc = false;
        for &u in path.iter().rev() {
            acc ^= self.parity[u];
            self.parity[u] = acc;
            self.parent[u] = r;
        }
        (r, if path.is_empty() { false } else { self.parity[v] })
    }

    /// Records `x_u ⊕ x_v = p`.
    fn union(&mut self, u: usize, v: usize, p: bool) {
        let (ru, pu) = self.find(u);
        let (rv, pv) = self.find(v);
        if ru == rv {
            if pu ^ pv != p {
                self.conflict[ru] = true;
            }
            return;
        }
        let (big, small) = if ru < rv { (ru, rv) } else { (rv, ru) };
        self.parent[small] = big;
        self.parity[small] = pu ^ pv ^ p;
        self.conflict[big] |= self.conflict[small];
    }
}

struct ParitySystem {
    uf: ParityUnionFind,
    /// `allowed[v][b]`: value `b` survives the pins on `v`.
    allowed: Vec<[bool; 2]>,
    weights: Vec<[Rational; 2]>,
    constant: Rational,
}

fn parity_system(inst: &Instance) -> Result<ParitySystem> {
    let n = inst.num_vars();
    let decs = decompositions(inst)?;
    let mut sys = ParitySystem {
        uf: ParityUnionFind::new(n),
        allowed: vec![[true; 2]; n],
        weights: inst.weights().iter().map(|w| [w.w0.clone(), w.w1.clone()]).collect(),
        constant: Rational::one(),
    };
    for (i, atom) in inst.atoms().iter().enumerate() {
        let Some(d) = &decs[atom.sig.as_str()] else {
            sys.constant = Rational::zero();
            continue;
        };
        if d.factors.iter().any(|g| g.support_size() > 2) {
            return Err(not_in_class(i, atom, "Weighted-NEQ-conj"));
        }
        sys.constant *= &d.scalar;
        for (block, g) in d.blocks.iter().zip(&d.factors) {
            let vars: Vec<usize> = block.iter().map(|&p| atom.scope[p]).collect();
            match g.support()[..] {
                [a] => {
                    for (j, &v) in vars.iter().enumerate() {
                        sys.allowed[v][1 - (a >> j & 1) as usize] = false;
                    }
                    sys.constant *= g.value(a);
                }
                [a, b] => {
                    debug_assert_eq!(a ^ b, (1 << vars.len()) - 1, "indecomposable pair is complementary");
                    let r = vars[0];
                    for (j, &v) in vars.iter().enumerate().skip(1) {
                        sys.uf.union(r, v, (a ^ a >> j) & 1 == 1);
                    }
                    let at_a = (a & 1) as usize;
                    let w = &mut sys.weights[r];
                    w[at_a] *= g.value(a);
                    w[1 - at_a] *= g.value(b);
                }
                _ => unreachable!("support sizes checked above"),
            }
        }
    }
    Ok(sys)
}

fn components(sys: &mut ParitySystem) -> Vec<ParityComponent> {
    let n = sys.allowed.len();
    let mut by_root: HashMap<usize, Vec<(usize, bool)>> = HashMap::new();
    for v in 0..n {
        let (r, p) = sys.uf.find(v);
        by_root.entry(r).or_default().push((v, p));
    }
    let mut roots: Vec<usize> = by_root.keys().copied().collect();
    roots.sort_unstable();
    roots
        .into_iter()
        .map(|r| {
            let members = by_root.remove(&r).unwrap();
            let ok = |b: bool| {
                !sys.uf.conflict[r] && members.iter().all(|&(v, p)| sys.allowed[v][(b ^ p) as usize])
            };
            let pin = match (ok(false), ok(true)) {
                (true, true) => PinStatus::Free,
                (true, false) => PinStatus::Forced0,
                (false, true) => PinStatus::Forced1,
                (false, false) => PinStatus::Contradictory,
            };
            ParityComponent {
                representative: r,
                members,
                pin,
            }
        })
        .collect()
}

/// Parity components of a Weighted-NEQ-conj instance.
pub fn parity_components(inst: &Instance) -> Result<Vec<ParityComponent>> {
    let mut sys = parity_system(inst)?;
    Ok(components(&mut sys))
}

/// Linear-time `Z` for instances whose atoms are all Weighted-NEQ-conj.
pub fn eval_weighted_neq_conj(inst: &Instance) -> Result<Rational> {
    let mut sys = parity_system(inst)?;
    if sys.constant.is_zero() {
        return Ok(Rational::zero());
    }
    let mut factors = vec![sys.constant.clone()];
    for comp in components(&mut sys) {
        let value = |b: bool| product(comp.members.iter().map(|&(v, p)| &sys.weights[v][(b ^ p) as usize]));
        let f = match comp.pin {
            PinStatus::Free => value(false) + value(true),
            PinStatus::Forced0 => value(false),
            PinStatus::Forced1 => value(true),
            PinStatus::Contradictory => return Ok(Rational::zero()),
        };
        if f.is_zero() {
            return Ok(f);
        }
        factors.push(f);
    }
    Ok(product(&factors))
}

type Matrix = [[Rational; 2]; 2];

fn transposed(m: &Matrix) -> Matrix {
    [
        [m[0][0].clone(), m[1][0].clone()],
        [m[0][1].clone(), m[1][1].clone()],
    ]
}

/// `Z` for degree-≤2 instances of basically binary atoms, by transfer
/// matrices along the paths and cycles of the factor graph.
pub fn eval_basically_binary_deg2(inst: &Instance) -> Result<Rational> {
    let n = inst.num_vars();
    if let Some((v, &d)) = inst.degrees().iter().enumerate().find(|(_, &d)| d > 2) {
        return Err(Error::DegreePolicy {
            var: inst.vars().name(v).to_string(),
            degree: d,
            policy: "<= 2".into(),
        });
    }
    let decs = decompositions(inst)?;
    let mut weights: Vec<[Rational; 2]> = inst.weights().iter().map(|w| [w.w0.clone(), w.w1.clone()]).collect();
    let mut constant = Rational::one();
    let mut edges: Vec<(usize, usize, Matrix)> = Vec::new();
    for (i, atom) in inst.atoms().iter().enumerate() {
        let Some(d) = &decs[atom.sig.as_str()] else {
            return Ok(Rational::zero());
        };
        if !d.is_basically_binary() {
            return Err(not_in_class(i, atom, "basically binary"));
        }
        constant *= &d.scalar;
        for (block, g) in d.blocks.iter().zip(&d.factors) {
            let t = g.table();
            match block[..] {
                [p] => {
                    let v = atom.scope[p];
                    weights[v][0] *= &t[0];
                    weights[v][1] *= &t[1];
                }
                [p, q] => {
                    let (u, v) = (atom.scope[p], atom.scope[q]);
                    if u == v {
                        weights[u][0] *= &t[0b00];
                        weights[u][1] *= &t[0b11];
                    } else {
                        // bit 0 of the block index is u
                        let m = [[t[0b00].clone(), t[0b10].clone()], [t[0b01].clone(), t[0b11].clone()]];
                        edges.push((u, v, m));
                    }
                }
                _ => unreachable!("basically binary blocks"),
            }
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, &(u, v, _)) in edges.iter().enumerate() {
        adj[u].push(e);
        adj[v].push(e);
    }
    let mut seen_var = vec![false; n];
    let mut seen_edge = vec![false; edges.len()];
    // Follows unused edges from `start`, multiplying transfer matrices in
    // integer arithmetic over one running denominator. Returns the matrix
    // `rows[a][b]` (start = a, current variable = b), the denominator and
    // the variable reached.
    let walk = |start: usize, seen_var: &mut Vec<bool>, seen_edge: &mut Vec<bool>| -> ([[BigInt; 2]; 2], BigInt, usize) {
        let (w, mut den) = common_denominator(&[&weights[start][0], &weights[start][1]]);
        let mut rows = [[w[0].clone(), BigInt::zero()], [BigInt::zero(), w[1].clone()]];
        let mut cur = start;
        seen_var[start] = true;
        while let Some(&e) = adj[cur].iter().find(|&&e| !seen_edge[e]) {
            seen_edge[e] = true;
            let (u, v, ref m) = edges[e];
            let (next, m) = if u == cur { (v, m.clone()) } else { (u, transposed(m)) };
            let closing = next == start;
            let (mn, mden) = common_denominator(&[&m[0][0], &m[0][1], &m[1][0], &m[1][1]]);
            let (wn, wden) = if closing {
                (vec![BigInt::one(), BigInt::one()], BigInt::one())
            } else {
                common_denominator(&[&weights[next][0], &weights[next][1]])
            };
            for row in rows.iter_mut() {
                let out = [0, 1].map(|b| (&row[0] * &mn[b] + &row[1] * &mn[2 + b]) * &wn[b]);
                *row = out;
            }
            den *= mden * wden;
            if closing {
                return (rows, den, start);
            }
            seen_var[next] = true;
            cur = next;
        }
        (rows, den, cur)
    };
    let mut factors = vec![constant];
    for v in 0..n {
        if !seen_var[v] && adj[v].len() <= 1 {
            let (r, den, _) = walk(v, &mut seen_var, &mut seen_edge);
            factors.push(Rational::new(&r[0][0] + &r[0][1] + &r[1][0] + &r[1][1], den));
        }
    }
    for v in 0..n {
        if !seen_var[v] {
            let (r, den, end) = walk(v, &mut seen_var, &mut seen_edge);
            debug_assert_eq!(end, v, "remaining components are cycles");
            factors.push(Rational::new(&r[0][0] + &r[1][1], den));
        }
    }
    let z = product(&factors);
    Ok(z)
}
