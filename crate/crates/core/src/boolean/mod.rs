//! Finite Boolean algebras of subsets, maps between them and the
//! homomorphism extension used to build disjointness preserving minorants.
//!
//! Elements of an algebra with `k` atoms are bit masks below `2^k`.
//! Homomorphisms are stored as atom images; every other value is a join.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{enumerate_fragments, AtomSet, LatVec};

/// Largest atom count for exhaustive pair checks (`2^10` elements).
pub const CLASSIFY_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FiniteBoolAlg {
    atoms: usize,
}

impl FiniteBoolAlg {
    pub fn new(atoms: usize) -> Result<Self> {
        if atoms > 63 {
            return Err(Error::CapExceeded {
                what: "Boolean algebra atoms",
                size: atoms,
                cap: 63,
            });
        }
        Ok(FiniteBoolAlg { atoms })
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn size(&self) -> u64 {
        1 << self.atoms
    }

    pub fn one(&self) -> u64 {
        self.size() - 1
    }

    pub fn contains(&self, x: u64) -> bool {
        x <= self.one()
    }

    pub fn complement(&self, x: u64) -> u64 {
        self.one() & !x
    }

    pub fn elements(&self) -> std::ops::Range<u64> {
        0..self.size()
    }
}

/// A total map between finite Boolean algebras, as a value table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoolMap {
    domain: FiniteBoolAlg,
    codomain: FiniteBoolAlg,
    table: Vec<u64>,
}

impl BoolMap {
    pub fn new(domain: FiniteBoolAlg, codomain: FiniteBoolAlg, table: Vec<u64>) -> Result<Self> {
        if table.len() as u64 != domain.size() {
            return Err(Error::contract(format!(
                "map table has {} entries for an algebra with {} elements",
                table.len(),
                domain.size()
            )));
        }
        if let Some(&v) = table.iter().find(|&&v| !codomain.contains(v)) {
            return Err(Error::contract(format!(
                "map value {v} lies outside the codomain algebra"
            )));
        }
        Ok(BoolMap {
            domain,
            codomain,
            table,
        })
    }

    pub fn from_fn(domain: FiniteBoolAlg, codomain: FiniteBoolAlg, f: impl Fn(u64) -> u64) -> Result<Self> {
        Self::new(domain, codomain, domain.elements().map(f).collect())
    }

    pub fn domain(&self) -> FiniteBoolAlg {
        self.domain
    }

    pub fn codomain(&self) -> FiniteBoolAlg {
        self.codomain
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    pub fn apply(&self, x: u64) -> u64 {
        self.table[x as usize]
    }

    /// `self ≤ other` pointwise.
    pub fn le(&self, other: &BoolMap) -> bool {
        self.table
            .iter()
            .zip(&other.table)
            .all(|(a, b)| a & !b == 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MapClass {
    Homomorphism,
    JoinPreserving,
    MeetPreserving,
    None,
}

/// First pair `(x, y)` breaking a law, with the law's name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub law: &'static str,
    pub x: u64,
    pub y: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub class: MapClass,
    pub join_preserving: bool,
    pub meet_preserving: bool,
    /// `ψ(0) = 0` and `ψ(xᶜ) = ψ(1) − ψ(x)` for every `x`.
    pub complement_compatible: bool,
    pub violations: Vec<Violation>,
}

/// Exhaustive pair check of the lattice laws.
pub fn classify_map(m: &BoolMap) -> Result<Classification> {
    let d = m.domain;
    if d.atoms > CLASSIFY_CAP {
        return Err(Error::CapExceeded {
            what: "classify_map domain atoms",
            size: d.atoms,
            cap: CLASSIFY_CAP,
        });
    }
    let mut join_v = None;
    let mut meet_v = None;
    for x in d.elements() {
        for y in x..d.size() {
            if join_v.is_none() && m.apply(x | y) != m.apply(x) | m.apply(y) {
                join_v = Some(Violation { law: "join", x, y });
            }
            if meet_v.is_none() && m.apply(x & y) != m.apply(x) & m.apply(y) {
                meet_v = Some(Violation { law: "meet", x, y });
            }
        }
    }
    let top = m.apply(d.one());
    let mut comp_v = (m.apply(0) != 0).then_some(Violation {
        law: "complement",
        x: 0,
        y: d.one(),
    });
    if comp_v.is_none() {
        comp_v = d
            .elements()
            .find(|&x| m.apply(d.complement(x)) != top & !m.apply(x))
            .map(|x| Violation {
                law: "complement",
                x,
                y: d.complement(x),
            });
    }
    let join_preserving = join_v.is_none();
    let meet_preserving = meet_v.is_none();
    let complement_compatible = comp_v.is_none();
    let class = match (join_preserving, meet_preserving, complement_compatible) {
        (true, true, true) => MapClass::Homomorphism,
        (true, _, _) => MapClass::JoinPreserving,
        (false, true, _) => MapClass::MeetPreserving,
        (false, false, _) => MapClass::None,
    };
    Ok(Classification {
        class,
        join_preserving,
        meet_preserving,
        complement_compatible,
        violations: [join_v, meet_v, comp_v].into_iter().flatten().collect(),
    })
}

/// A Boolean subalgebra, given by its atoms (cells partitioning the atoms of
/// the ambient algebra).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubAlgebra {
    alg: FiniteBoolAlg,
    cells: Vec<u64>,
}

impl SubAlgebra {
    pub fn new(alg: FiniteBoolAlg, mut cells: Vec<u64>) -> Result<Self> {
        let mut seen = 0u64;
        for &c in &cells {
            if c == 0 || !alg.contains(c) {
                return Err(Error::contract(format!("subalgebra cell {c} is empty or out of range")));
            }
            if c & seen != 0 {
                return Err(Error::contract(format!("subalgebra cell {c} overlaps another cell")));
            }
            seen |= c;
        }
        if seen != alg.one() {
            return Err(Error::contract("subalgebra cells do not cover every atom"));
        }
        cells.sort_by_key(|c| c.trailing_zeros());
        Ok(SubAlgebra { alg, cells })
    }

    /// `{0, 1}`.
    pub fn trivial(alg: FiniteBoolAlg) -> Self {
        let cells = if alg.atoms == 0 { vec![] } else { vec![alg.one()] };
        SubAlgebra { alg, cells }
    }

    /// The whole algebra.
    pub fn full(alg: FiniteBoolAlg) -> Self {
        SubAlgebra {
            alg,
            cells: (0..alg.atoms).map(|a| 1 << a).collect(),
        }
    }

    pub fn algebra(&self) -> FiniteBoolAlg {
        self.alg
    }

    pub fn cells(&self) -> &[u64] {
        &self.cells
    }

    /// Every element, as a join of the cells selected by a counter.
    pub fn elements(&self) -> impl Iterator<Item = u64> + '_ {
        (0u64..1 << self.cells.len()).map(|sel| {
            self.cells
                .iter()
                .enumerate()
                .filter(|(i, _)| sel >> i & 1 == 1)
                .fold(0, |acc, (_, c)| acc | c)
        })
    }
}

/// A Boolean homomorphism as the images of the domain atoms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoolHom {
    domain: FiniteBoolAlg,
    codomain: FiniteBoolAlg,
    images: Vec<u64>,
}

impl BoolHom {
    /// Atom images must be pairwise disjoint and join to `1_B`.
    pub fn new(domain: FiniteBoolAlg, codomain: FiniteBoolAlg, images: Vec<u64>) -> Result<Self> {
        if images.len() != domain.atoms {
            return Err(Error::contract("one image per domain atom is required"));
        }
        check_atom_images(&images, codomain)?;
        Ok(BoolHom {
            domain,
            codomain,
            images,
        })
    }

    pub fn images(&self) -> &[u64] {
        &self.images
    }

    pub fn domain(&self) -> FiniteBoolAlg {
        self.domain
    }

    pub fn codomain(&self) -> FiniteBoolAlg {
        self.codomain
    }

    pub fn apply(&self, x: u64) -> u64 {
        self.images
            .iter()
            .enumerate()
            .filter(|(a, _)| x >> a & 1 == 1)
            .fold(0, |acc, (_, im)| acc | im)
    }

    pub fn to_map(&self) -> BoolMap {
        BoolMap::from_fn(self.domain, self.codomain, |x| self.apply(x)).expect("images lie in the codomain")
    }
}

fn check_atom_images(images: &[u64], codomain: FiniteBoolAlg) -> Result<()> {
    let mut seen = 0u64;
    for &im in images {
        if !codomain.contains(im) {
            return Err(Error::contract(format!("image {im} lies outside the codomain")));
        }
        if im & seen != 0 {
            return Err(Error::contract("atom images overlap"));
        }
        seen |= im;
    }
    if seen != codomain.one() {
        return Err(Error::contract("atom images do not join to the top element"));
    }
    Ok(())
}

/// Extends a homomorphism `ψ₀: A₀ → B` dominated by a join-preserving
/// `φ: A → B` to a homomorphism `ψ: A → B` with `ψ ≤ φ`.
///
/// `psi0` lists the images of the cells of `sub`. Each atom `b` of `B` lies in
/// exactly one `ψ₀(C)`; it is assigned to the lowest atom `a ∈ C` with
/// `b ∈ φ(a)`. Such an atom exists because `ψ₀(C) ≤ φ(C) = ⋁_{a ∈ C} φ(a)`, and
/// the choices for different `b` never interact, so no backtracking is needed.
pub fn monteiro_extend(phi: &BoolMap, sub: &SubAlgebra, psi0: &[u64]) -> Result<BoolHom> {
    let a = phi.domain;
    let b = phi.codomain;
    if sub.alg != a {
        return Err(Error::contract("subalgebra lives in a different algebra"));
    }
    if psi0.len() != sub.cells.len() {
        return Err(Error::contract("one ψ₀ image per subalgebra cell is required"));
    }
    let class = classify_map(phi)?;
    if !class.join_preserving {
        return Err(Error::contract(format!(
            "φ is not join preserving: {:?}",
            class.violations.first()
        )));
    }
    check_atom_images(psi0, b)?;
    let psi0_of = |x: u64| {
        sub.cells
            .iter()
            .zip(psi0)
            .filter(|(c, _)| x & *c != 0)
            .fold(0, |acc, (_, im)| acc | im)
    };
    for x in sub.elements() {
        if psi0_of(x) & !phi.apply(x) != 0 {
            return Err(Error::contract(format!(
                "ψ₀({x}) = {} is not below φ({x}) = {}",
                psi0_of(x),
                phi.apply(x)
            )));
        }
    }

    let mut images = vec![0u64; a.atoms];
    for bit in 0..b.atoms {
        let target = 1u64 << bit;
        let (cell, _) = sub
            .cells
            .iter()
            .zip(psi0)
            .find(|(_, im)| *im & target != 0)
            .expect("ψ₀ images cover the codomain");
        let atom = (0..a.atoms)
            .filter(|i| cell >> i & 1 == 1)
            .find(|&i| phi.apply(1 << i) & target != 0)
            .ok_or_else(|| {
                Error::Infeasible(format!(
                    "codomain atom {bit} lies in ψ₀ of cell {cell} but in φ of none of its atoms"
                ))
            })?;
        images[atom] |= target;
    }
    let psi = BoolHom::new(a, b, images)?;
    let map = psi.to_map();
    if classify_map(&map)?.class != MapClass::Homomorphism || !map.le(phi) {
        return Err(Error::internal("extension failed verification"));
    }
    if sub.cells.iter().zip(psi0).any(|(&c, &im)| psi.apply(c) != im) {
        return Err(Error::internal("extension disagrees with ψ₀"));
    }
    Ok(psi)
}

/// The fragment algebra `𝔉_e` of a positive `e`: checks exhaustively that
/// `x ∨ y`, `x ∧ y` and `e − x` of fragments are the fragments of the union,
/// intersection and complement of their masks, i.e. that mask ↦ fragment is a
/// Boolean isomorphism from the powerset of `supp(e)`.
pub fn verify_fragment_algebra(e: &LatVec, cap: usize) -> Result<bool> {
    if !e.is_positive() {
        return Err(Error::contract("the fragment algebra bridge needs e ≥ 0"));
    }
    let support = enumerate_fragments(e, cap)?.support().to_vec();
    let k = support.len();
    let frag = |bits: u64| e.restrict(&AtomSet::from_bits(&support, bits));
    let frags: Vec<LatVec> = (0u64..1 << k).map(frag).collect();
    let one = (1u64 << k) - 1;
    for x in 0..=one {
        if e.sub(&frags[x as usize])? != frags[(one & !x) as usize] {
            return Ok(false);
        }
        for y in x..=one {
            let (fx, fy) = (&frags[x as usize], &frags[y as usize]);
            if fx.join(fy)? != frags[(x | y) as usize] || fx.meet(fy)? != frags[(x & y) as usize] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
