//! Builders for the bundled example structures.
//!
//! Boolean algebras use the element numbering "element = bitmask of the
//! atoms below it", so `zero` is 0 and `one` is `2^k - 1`.

use crate::semantics::{ChoiceRule, ChoiceStructure, Elem};
use crate::syntax::Signature;

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

/// The signature `meet/2 join/2 compl/1 zero one`, plus `c/1` when `monadic`.
pub fn ba_signature(monadic: bool) -> Signature {
    let mut funs = vec![("meet".to_string(), 2), ("join".to_string(), 2), ("compl".to_string(), 1)];
    if monadic {
        funs.push(("c".to_string(), 1));
    }
    Signature::new(vec![], funs, names(&["zero", "one"])).expect("fixed signature")
}

fn ba_tables(k: usize) -> (usize, Vec<Vec<Elem>>) {
    let n = 1usize << k;
    let full = n - 1;
    let mut meet = Vec::with_capacity(n * n);
    let mut join = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            meet.push(x & y);
            join.push(x | y);
        }
    }
    let compl = (0..n).map(|x| full & !x).collect();
    (n, vec![meet, join, compl])
}

/// The Boolean algebra with `k` atoms, choosing by least element.
pub fn boolean_algebra(k: usize) -> ChoiceStructure {
    let (n, funs) = ba_tables(k);
    ChoiceStructure::new(ba_signature(false), n, vec![], funs, vec![0, n - 1], ChoiceRule::Min { empty: 0 })
        .expect("valid Boolean algebra")
}

/// A monadic algebra on `k` atoms whose `c` maps `x` to the union of the
/// atom blocks meeting `x`. `blocks` partitions `0..k`.
pub fn monadic_algebra(k: usize, blocks: &[Vec<usize>]) -> ChoiceStructure {
    let (n, mut funs) = ba_tables(k);
    let masks: Vec<usize> = blocks.iter().map(|b| b.iter().map(|a| 1 << a).sum()).collect();
    let c = (0..n).map(|x| masks.iter().filter(|&&m| m & x != 0).fold(0, |acc, m| acc | m)).collect();
    funs.push(c);
    ChoiceStructure::new(ba_signature(true), n, vec![], funs, vec![0, n - 1], ChoiceRule::Min { empty: 0 })
        .expect("valid monadic algebra")
}

/// `c(x) = one` for every `x ≠ zero`.
pub fn simple_monadic(k: usize) -> ChoiceStructure {
    monadic_algebra(k, &[(0..k).collect()])
}

/// `c` is the identity.
pub fn identity_monadic(k: usize) -> ChoiceStructure {
    let blocks: Vec<Vec<usize>> = (0..k).map(|a| vec![a]).collect();
    monadic_algebra(k, &blocks)
}

/// The product of the simple 4-element and the simple 2-element monadic
/// algebras.
pub fn product_monadic() -> ChoiceStructure {
    monadic_algebra(3, &[vec![0, 1], vec![2]])
}

/// B2 with the choice table `{0,1} ↦ 1`, `∅ ↦ 0`.
pub fn b2_table() -> ChoiceStructure {
    boolean_algebra(1).with_choice(ChoiceRule::Table(vec![0, 0, 1, 1])).expect("valid table")
}

/// The directed 3-cycle: `succ(i) = i+1 mod 3`, `adj = graph of succ`,
/// no constants. Its automorphism group is transitive.
pub fn cycle3() -> ChoiceStructure {
    let sig = Signature::new(vec![("adj".to_string(), 2)], vec![("succ".to_string(), 1)], vec![])
        .expect("fixed signature");
    let adj = (0..3).map(|i| vec![i, (i + 1) % 3]).collect();
    let succ = (0..3).map(|i| (i + 1) % 3).collect();
    ChoiceStructure::new(sig, 3, vec![adj], vec![succ], vec![], ChoiceRule::Min { empty: 0 })
        .expect("valid cycle")
}

/// A one-element structure with a unary relation holding of its element.
pub fn singleton() -> ChoiceStructure {
    let sig = Signature::new(vec![("p".to_string(), 1)], vec![], vec![]).expect("fixed signature");
    ChoiceStructure::new(sig, 1, vec![vec![vec![0]]], vec![], vec![], ChoiceRule::Min { empty: 0 })
        .expect("valid singleton")
}

/// How a corpus structure reads as an algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Ba,
    Ca1,
    Plain,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Ba => "ba",
            Kind::Ca1 => "ca1",
            Kind::Plain => "plain",
        }
    }

    pub fn parse(s: &str) -> Option<Kind> {
        match s {
            "ba" => Some(Kind::Ba),
            "ca1" => Some(Kind::Ca1),
            "plain" => Some(Kind::Plain),
            _ => None,
        }
    }
}

pub struct Entry {
    pub name: &'static str,
    pub kind: Kind,
    pub structure: ChoiceStructure,
}

/// Every bundled structure, in manifest order.
pub fn entries() -> Vec<Entry> {
    let e = |name, kind, structure| Entry { name, kind, structure };
    vec![
        e("b2", Kind::Ba, boolean_algebra(1)),
        e("b2_table", Kind::Ba, b2_table()),
        e("b4", Kind::Ba, boolean_algebra(2)),
        e("b8", Kind::Ba, boolean_algebra(3)),
        e("b16", Kind::Ba, boolean_algebra(4)),
        e("ca1_simple4", Kind::Ca1, simple_monadic(2)),
        e("ca1_ident4", Kind::Ca1, identity_monadic(2)),
        e("ca1_simple8", Kind::Ca1, simple_monadic(3)),
        e("ca1_ident8", Kind::Ca1, identity_monadic(3)),
        e("ca1_product8", Kind::Ca1, product_monadic()),
        e("cyc3", Kind::Plain, cycle3()),
        e("one1", Kind::Plain, singleton()),
    ]
}

/// The homomorphism B4 → B2 keeping the first atom.
pub const B4_TO_B2_HOM: &str = "# B4 -> B2, x |-> x meet a\n0 -> 0\n1 -> 1\n2 -> 0\n3 -> 1\n";

/// The manifest: kind and expected dimension stability per structure.
pub fn manifest() -> String {
    let mut out = String::from("# Bundled structures. dim_stable: closure at dimension 1 and 2 agree.\n");
    for e in entries() {
        out.push_str(&format!(
            "\n[[structure]]\nname = \"{}\"\nfile = \"{}.struct\"\nkind = \"{}\"\ndim_stable = true\n",
            e.name,
            e.name,
            e.kind.as_str()
        ));
    }
    out
}

/// Every file of the bundled corpus directory as `(file name, contents)`.
pub fn files() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = entries()
        .into_iter()
        .map(|e| (format!("{}.struct", e.name), crate::semantics::write_structure(&e.structure)))
        .collect();
    out.push(("b4_to_b2.hom".into(), B4_TO_B2_HOM.into()));
    out.push(("manifest.toml".into(), manifest()));
    out
}
