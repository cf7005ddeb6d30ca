//! End-to-end acceptance run over the bundled corpus. Prints one line per
//! criterion and exits non-zero if any criterion fails.

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use epscan_core::algebra::brute::{brute_force_congruence, brute_force_isomorphic};
use epscan_core::algebra::{check_isomorphism, from_structure, is_isomorphic, is_isomorphic_boolean, AlgebraKind, MonadicAlgebra};
use epscan_core::canonical::{build_canonical_model, check_atomic, check_elementary, lift_hom, naturality_oracle, parse_hom};
use epscan_core::corpus;
use epscan_core::definability::oracle::{brute_force_sets, DepthMode, ORACLE_MAX_CARRIER};
use epscan_core::definability::{definable_closure, stability_check, DEFAULT_MAX_ROUNDS};
use epscan_core::enumerate::{enumerate, EnumConfig, RandomGen};
use epscan_core::semantics::{assignments, parse_structure, Assignment, ChoiceRule, ChoiceStructure, Evaluator};
use epscan_core::syntax::{desugar, substitute, Formula, Term, Var};
use epscan_core::termalgebra::{analyze_kernel, build_lt1, build_phi, check_sigma_prop, check_theorem_main, infer_kind};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

const SEED: u64 = 0x5eed;

#[derive(Deserialize)]
struct Manifest {
    structure: Vec<Entry>,
}

#[derive(Deserialize)]
struct Entry {
    name: String,
    file: String,
    kind: String,
    dim_stable: bool,
}

struct Loaded {
    entry: Entry,
    m: ChoiceStructure,
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn load_corpus() -> Vec<Loaded> {
    let dir = root().join("corpus");
    let text = std::fs::read_to_string(dir.join("manifest.toml")).expect("corpus manifest");
    let manifest: Manifest = toml::from_str(&text).expect("manifest parses");
    manifest
        .structure
        .into_iter()
        .map(|entry| {
            let text = std::fs::read_to_string(dir.join(&entry.file)).expect("structure file");
            let m = parse_structure(&text).unwrap_or_else(|e| panic!("{}: {e}", entry.file));
            Loaded { entry, m }
        })
        .collect()
}

type Outcome = Result<String, String>;

fn fail<T>(msg: impl Into<String>) -> Result<T, String> {
    Err(msg.into())
}

// ---------------------------------------------------------------- 1 and 2

/// Checks transfinity, extensionality and quantifier coherence for one
/// formula against every assignment of the other variable.
struct AxiomRun<'m> {
    m: &'m ChoiceStructure,
    ev: Evaluator<'m>,
    vars: [Var; 2],
    checks: usize,
}

impl<'m> AxiomRun<'m> {
    fn new(m: &'m ChoiceStructure) -> Self {
        AxiomRun { m, ev: Evaluator::new(m), vars: [Var(0), Var(1)], checks: 0 }
    }

    /// Transfinity for `v`: every instance `φ[t/v]` true at `a` forces
    /// `φ[εv φ / v]`. Terms are the given ones plus every carrier element,
    /// the latter through the extension.
    fn transfinity(&mut self, phi: &Formula, v: Var, terms: &[Term]) -> Result<(), String> {
        let eps = Term::eps(v, phi.clone());
        let witness = substitute(phi, &eps, v);
        let instances: Vec<Formula> = terms.iter().map(|t| substitute(phi, t, v)).collect();
        // terms may mention v itself, so both variables get values
        for a in assignments(self.m.size(), &self.vars) {
            let ext = self.ev.extension(&a, phi, v).map_err(|e| e.to_string())?;
            let holds = self.ev.formula(&a, &witness).map_err(|e| e.to_string())?;
            self.checks += 1;
            if !ext.is_empty() && !holds {
                return fail(format!("transfinity: {phi:?} at {v} under {a:?}, extension {ext:?}"));
            }
            for (t, inst) in terms.iter().zip(&instances) {
                self.checks += 1;
                if self.ev.formula(&a, inst).map_err(|e| e.to_string())? && !holds {
                    return fail(format!("transfinity: {phi:?} with {t:?} for {v} under {a:?}"));
                }
            }
        }
        Ok(())
    }

    fn coherence(&mut self, phi: &Formula) -> Result<(), String> {
        let d = desugar(phi);
        let fv: Vec<Var> = phi.free_vars().into_iter().collect();
        for a in assignments(self.m.size(), &fv) {
            self.checks += 1;
            let direct = self.ev.formula(&a, phi).map_err(|e| e.to_string())?;
            let via_eps = self.ev.formula(&a, &d).map_err(|e| e.to_string())?;
            if direct != via_eps {
                return fail(format!("coherence: {phi:?} under {a:?}: {direct} vs {via_eps}"));
            }
        }
        Ok(())
    }

    /// Extensionality: formulas with the same extension at `v` under the
    /// same assignment give their ε-terms the same value.
    fn extensionality(&mut self, formulas: &[Arc<Formula>]) -> Result<(), String> {
        for v in self.vars {
            let w = if v == self.vars[0] { self.vars[1] } else { self.vars[0] };
            for a in assignments(self.m.size(), &[w]) {
                let mut seen = HashMap::new();
                for phi in formulas {
                    let ext = self.ev.extension(&a, phi, v).map_err(|e| e.to_string())?;
                    let value = self.ev.term(&a, &Term::Eps(v, Arc::clone(phi))).map_err(|e| e.to_string())?;
                    self.checks += 1;
                    if let Some(&(prev, ref other)) = seen.get(&ext) {
                        if prev != value {
                            return fail(format!("extensionality: {other:?} and {phi:?} at {v} under {a:?}"));
                        }
                    } else {
                        seen.insert(ext, (value, Arc::clone(phi)));
                    }
                }
            }
        }
        Ok(())
    }
}

fn leaves(m: &ChoiceStructure) -> Vec<Term> {
    let mut out = vec![Term::var(0), Term::var(1)];
    out.extend(m.signature().constant_ids().map(Term::Const));
    out
}

fn semantic_axioms(m: &ChoiceStructure, seed: u64) -> Result<(usize, usize), String> {
    let sig = m.signature();
    let mut run = AxiomRun::new(m);
    let terms = leaves(m);
    // exhaustive at depth 3 without function application; see the README
    let cfg = EnumConfig { functions: false, ..EnumConfig::new(&[0, 1], 3) };
    let levels = enumerate(sig, &cfg);
    let exhaustive: Vec<Arc<Formula>> = levels.all_formulas().cloned().collect();
    for phi in &exhaustive {
        for v in run.vars {
            run.transfinity(phi, v, &terms)?;
        }
        run.coherence(phi)?;
    }
    run.extensionality(&exhaustive)?;
    // full signature, all connectives, depth 4
    let gen = RandomGen::new(sig, &[0, 1]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random = Vec::with_capacity(1000);
    for _ in 0..1000 {
        let phi = gen.formula(&mut rng, 4);
        let ts: Vec<Term> = (0..3).map(|_| gen.term(&mut rng, 2)).collect();
        let v = run.vars[rng.gen_range(0..2)];
        run.transfinity(&phi, v, &ts)?;
        run.coherence(&phi)?;
        random.push(Arc::new(phi));
    }
    run.extensionality(&random)?;
    Ok((exhaustive.len(), run.checks))
}

fn criterion_1(corpus: &[Loaded]) -> Outcome {
    let start = Instant::now();
    let mut formulas = 0;
    let mut checks = 0;
    for (i, l) in corpus.iter().enumerate() {
        let (f, c) = semantic_axioms(&l.m, SEED + i as u64).map_err(|e| format!("{}: {e}", l.entry.name))?;
        formulas += f;
        checks += c;
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(60) {
        return fail(format!("took {:.1} s", elapsed.as_secs_f64()));
    }
    Ok(format!("{formulas} exhaustive + {} random formulas, {checks} instances, {:.1} s", 1000 * corpus.len(), elapsed.as_secs_f64()))
}

fn criterion_2(corpus: &[Loaded]) -> Outcome {
    let mut total = 0;
    for (i, l) in corpus.iter().enumerate() {
        let m = &l.m;
        let gen = RandomGen::new(m.signature(), &[0, 1, 2]);
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ (i as u64) << 8);
        let mut ev = Evaluator::new(m);
        for _ in 0..1000 {
            let phi = gen.formula(&mut rng, 4);
            let t = gen.term(&mut rng, 2);
            let v = Var(rng.gen_range(0..3));
            let a = Assignment::from_values(&(0..3).map(|_| rng.gen_range(0..m.size())).collect::<Vec<_>>());
            let lhs = ev.formula(&a, &substitute(&phi, &t, v)).map_err(|e| e.to_string())?;
            let value = ev.term(&a, &t).map_err(|e| e.to_string())?;
            let rhs = ev.formula(&a.clone().with(v, value), &phi).map_err(|e| e.to_string())?;
            if lhs != rhs {
                return fail(format!("{}: {phi:?} with {t:?} for {v} under {a:?}", l.entry.name));
            }
            total += 1;
        }
    }
    Ok(format!("{total} triples"))
}

// ---------------------------------------------------------------- 3 to 6

fn criterion_3(corpus: &[Loaded]) -> Outcome {
    let mut compared = Vec::new();
    for l in corpus {
        let m = &l.m;
        let report = stability_check(m, 0).map_err(|e| e.to_string())?;
        if report.stable != l.entry.dim_stable {
            return fail(format!("{}: stable {} but the manifest says {}", l.entry.name, report.stable, l.entry.dim_stable));
        }
        if m.size() > ORACLE_MAX_CARRIER {
            continue;
        }
        let fam = definable_closure(m, 2, DEFAULT_MAX_ROUNDS).map_err(|e| e.to_string())?;
        let engine: BTreeSet<_> = fam.set_list().into_iter().collect();
        let oracle = brute_force_sets(m, 4, DepthMode::Connective).map_err(|e| e.to_string())?;
        if engine != oracle.sets {
            return fail(format!("{}: engine {} sets, brute force {}", l.entry.name, engine.len(), oracle.sets.len()));
        }
        compared.push(l.entry.name.as_str());
    }
    Ok(format!("U agrees on {}; stability flags match on {} structures", compared.join(", "), corpus.len()))
}

fn canonical(m: &ChoiceStructure) -> Result<epscan_core::canonical::CanonicalModel, String> {
    let fam = definable_closure(m, 1, DEFAULT_MAX_ROUNDS).map_err(|e| e.to_string())?;
    build_canonical_model(m, &fam).map_err(|e| e.to_string())
}

fn criterion_4(corpus: &[Loaded]) -> Outcome {
    let mut checked = 0;
    for l in corpus {
        let r = check_atomic(&canonical(&l.m)?).map_err(|e| e.to_string())?;
        if !r.passed() {
            return fail(format!("{}: {:?}", l.entry.name, r.violations));
        }
        checked += r.checked;
    }
    Ok(format!("{checked} representatives over {} canonical models", corpus.len()))
}

fn criterion_5(corpus: &[Loaded]) -> Outcome {
    let mut formulas = 0;
    for (i, l) in corpus.iter().enumerate() {
        let r = check_elementary(&canonical(&l.m)?, 3, 500, SEED + i as u64).map_err(|e| e.to_string())?;
        if let Some(c) = &r.counterexample {
            return fail(format!("{}: {} under {:?}", l.entry.name, c.formula, c.assignment));
        }
        if r.exhaustive_formulas == 0 || r.sampled_formulas != 500 {
            return fail(format!("{}: {} exhaustive, {} sampled", l.entry.name, r.exhaustive_formulas, r.sampled_formulas));
        }
        formulas += r.exhaustive_formulas + r.sampled_formulas;
    }
    Ok(format!("{formulas} formulas, no counterexample"))
}

fn criterion_6(corpus: &[Loaded]) -> Outcome {
    let by_name = |n: &str| corpus.iter().find(|l| l.entry.name == n).map(|l| &l.m).expect("corpus member");
    let mut cases: Vec<(String, &ChoiceStructure, &ChoiceStructure, Vec<usize>)> = corpus
        .iter()
        .filter(|l| l.m.size() <= ORACLE_MAX_CARRIER)
        .map(|l| (format!("id {}", l.entry.name), &l.m, &l.m, (0..l.m.size()).collect()))
        .collect();
    let (b4, b2) = (by_name("b4"), by_name("b2"));
    let text = std::fs::read_to_string(root().join("corpus/b4_to_b2.hom")).expect("hom file");
    let h = parse_hom(&text, b4.size(), b2.size()).map_err(|e| e.to_string())?;
    cases.push(("b4 -> b2".into(), b4, b2, h));
    for (name, m1, m2, h) in &cases {
        let r = lift_hom(h, &canonical(m1)?, &canonical(m2)?).map_err(|e| e.to_string())?;
        let o = naturality_oracle(h, m1, m2, 4).map_err(|e| e.to_string())?;
        let engine = (r.range_condition, r.single_valued, r.square_commutes);
        let oracle = (o.range_condition, o.single_valued, o.square_commutes);
        if engine != oracle {
            return fail(format!("{name}: lift {engine:?}, oracle {oracle:?}"));
        }
    }
    Ok(format!("{} homomorphisms agree with the oracle", cases.len()))
}

// ---------------------------------------------------------------- laws

/// The Boolean and closure laws, read off the operations. Triples are
/// exhaustive up to 16 elements and sampled above; pairs are exhaustive up
/// to 256 elements and sampled above.
fn law_suite(a: &MonadicAlgebra, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = a.size();
    let (zero, one) = (a.zero(), a.one());
    let pick = |rng: &mut ChaCha8Rng| rng.gen_range(0..n);
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    if n <= 256 {
        for x in 0..n {
            for y in 0..n {
                pairs.push((x, y));
            }
        }
    } else {
        pairs = (0..20_000).map(|_| (pick(rng), pick(rng))).collect();
    }
    let triples: Vec<(usize, usize, usize)> = if n <= 16 {
        (0..n * n * n).map(|i| (i % n, i / n % n, i / (n * n))).collect()
    } else {
        (0..20_000).map(|_| (pick(rng), pick(rng), pick(rng))).collect()
    };
    let law = |ok: bool, name: &str, args: &[usize]| if ok { Ok(()) } else { fail(format!("{name} fails at {args:?}")) };
    let c = |x| a.c0(x);
    law(c(zero) == zero, "c0 0 = 0", &[])?;
    for x in 0..n.min(1 << 16) {
        law(a.join(x, a.compl(x)) == one && a.meet(x, a.compl(x)) == zero, "complement", &[x])?;
        law(a.meet(x, one) == x && a.join(x, zero) == x, "identity", &[x])?;
        law(a.join(x, c(x)) == c(x), "x <= c0 x", &[x])?;
        law(c(c(x)) == c(x), "c0 idempotent", &[x])?;
    }
    for &(x, y) in &pairs {
        law(a.meet(x, y) == a.meet(y, x) && a.join(x, y) == a.join(y, x), "commutativity", &[x, y])?;
        law(a.meet(x, a.join(x, y)) == x && a.join(x, a.meet(x, y)) == x, "absorption", &[x, y])?;
        law(c(a.meet(x, c(y))) == a.meet(c(x), c(y)), "c0(x & c0 y) = c0 x & c0 y", &[x, y])?;
        law(c(a.join(x, y)) == a.join(c(x), c(y)), "c0 additive", &[x, y])?;
    }
    for &(x, y, z) in &triples {
        law(a.meet(x, a.meet(y, z)) == a.meet(a.meet(x, y), z), "meet associative", &[x, y, z])?;
        law(a.join(x, a.join(y, z)) == a.join(a.join(x, y), z), "join associative", &[x, y, z])?;
        law(a.meet(x, a.join(y, z)) == a.join(a.meet(x, y), a.meet(x, z)), "distributivity", &[x, y, z])?;
    }
    Ok(())
}

// ---------------------------------------------------------------- 7 and 8

fn criterion_7(corpus: &[Loaded], algebras: &mut Vec<(String, MonadicAlgebra)>) -> Outcome {
    let mut lines = Vec::new();
    for l in corpus {
        let m = &l.m;
        let name = &l.entry.name;
        let fam = definable_closure(m, 1, DEFAULT_MAX_ROUNDS).map_err(|e| e.to_string())?;
        let c = build_canonical_model(m, &fam).map_err(|e| e.to_string())?;
        let lt1 = build_lt1(m, &fam).map_err(|e| e.to_string())?;
        let phi = build_phi(m, &lt1, &c).map_err(|e| e.to_string())?;
        // surjectivity and transfinity recomputed from the image
        let hit: BTreeSet<usize> = phi.image.iter().copied().collect();
        if hit.len() != c.size() || !phi.surjective {
            return fail(format!("{name}: Φ hits {} of {}", hit.len(), c.size()));
        }
        for (x, s) in lt1.sets.iter().enumerate() {
            if !s.is_empty() && !s.contains(c.universe[phi.image[x]].value) {
                return fail(format!("{name}: Φ({s:?}) ∉ S"));
            }
        }
        if !phi.transfinity {
            return fail(format!("{name}: transfinity flag false"));
        }
        let nr0 = lt1.algebra.nr0().algebra;
        if is_isomorphic(&nr0, &MonadicAlgebra::two()).is_none() {
            return fail(format!("{name}: Nr0(Lt1) has {} elements", nr0.size()));
        }
        let k = analyze_kernel(&lt1, &phi, c.size()).map_err(|e| e.to_string())?;
        let brute_ca1 = brute_force_congruence(&lt1.algebra, &phi.kernel, true).is_ok();
        let brute_ba = brute_force_congruence(&lt1.algebra, &phi.kernel, false).is_ok();
        if (k.ca1.congruence, k.ba.congruence) != (brute_ca1, brute_ba) {
            return fail(format!(
                "{name}: kernel verdicts CA1 {} BA {}, brute force {brute_ca1} {brute_ba}",
                k.ca1.congruence, k.ba.congruence
            ));
        }
        if let Some(q) = &k.quotient {
            for x in 0..lt1.size() {
                if q.iota[q.projection[x]] != phi.image[x] {
                    return fail(format!("{name}: ι∘π ≠ Φ at {:?}", lt1.sets[x]));
                }
            }
            if !q.triangle {
                return fail(format!("{name}: triangle flag false"));
            }
            algebras.push((format!("{name} Lt1/Ker"), q.algebra.clone()));
        }
        algebras.push((format!("{name} Lt1"), lt1.algebra.clone()));
        algebras.push((format!("{name} Nr0(Lt1)"), nr0));
        algebras.push((format!("{name} generated CA1 quotient"), k.generated_ca1.algebra.clone()));
        algebras.push((format!("{name} generated BA quotient"), k.generated_ba.algebra.clone()));
        lines.push(format!("{name} {}/{}", u8::from(brute_ca1), u8::from(brute_ba)));
    }
    Ok(format!("Φ onto with Φ(S) ∈ S, Nr0(Lt1) ≅ 2; kernel CA1/BA congruence: {}", lines.join(" ")))
}

/// Every partition of `0..k`, as block lists.
fn partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in partitions(k - 1) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].push(k - 1);
            out.push(q);
        }
        let mut q = p;
        q.push(vec![k - 1]);
        out.push(q);
    }
    out
}

fn criterion_8(corpus: &[Loaded], algebras: &mut Vec<(String, MonadicAlgebra)>) -> Outcome {
    let mut cases: Vec<(String, ChoiceStructure)> = (1..=4).map(|k| (format!("B{}", 1 << k), corpus::boolean_algebra(k))).collect();
    for l in corpus.iter().filter(|l| l.entry.kind != "plain") {
        cases.push((l.entry.name.clone(), l.m.clone()));
    }
    for k in 1..=4 {
        for p in partitions(k) {
            cases.push((format!("CA1 {k} atoms {p:?}"), corpus::monadic_algebra(k, &p)));
        }
    }
    let mut slowest = (Duration::ZERO, String::new());
    let (mut part1, mut part2, mut sigma) = (0, 0, 0);
    for (name, m) in &cases {
        let kind = infer_kind(m);
        let start = Instant::now();
        let t = check_theorem_main(m, kind).map_err(|e| format!("{name}: {e}"))?;
        let mid = Instant::now();
        let s = check_sigma_prop(m, kind).map_err(|e| format!("{name}: {e}"))?;
        let end = Instant::now();
        for d in [mid - start, end - mid] {
            if d > Duration::from_secs(10) {
                return fail(format!("{name}: {:.1} s", d.as_secs_f64()));
            }
            if d > slowest.0 {
                slowest = (d, name.clone());
            }
        }
        part1 += usize::from(t.part1);
        sigma += usize::from(s.holds());
        // both sides of the biconditional, recomputed here by brute force
        let canon = canonical(m)?;
        let canon_alg = from_structure(&canon.structure, kind).map_err(|e| e.to_string())?.algebra;
        algebras.push((format!("{name} canonical"), canon_alg.clone()));
        if kind == AlgebraKind::Ca1 {
            let fam = definable_closure(m, 1, DEFAULT_MAX_ROUNDS).map_err(|e| e.to_string())?;
            let lt1 = build_lt1(m, &fam).map_err(|e| e.to_string())?;
            let phi = build_phi(m, &lt1, &canon).map_err(|e| e.to_string())?;
            let k = analyze_kernel(&lt1, &phi, canon.size()).map_err(|e| e.to_string())?;
            let (_, term) = k.term_algebra(true);
            let iso = brute_force_isomorphic(&canon_alg, term).is_some();
            let nr0 = canon_alg.nr0().algebra.size() == 2;
            if t.part2_isomorphic != Some(iso) || t.part2_nr0_is_two != Some(nr0) || t.part2 != Some(iso == nr0) {
                return fail(format!("{name}: report {:?}/{:?}, recomputed {iso}/{nr0}", t.part2_isomorphic, t.part2_nr0_is_two));
            }
            part2 += usize::from(iso == nr0);
        } else if t.part2.is_some() {
            return fail(format!("{name}: part 2 evaluated on a Boolean algebra"));
        }
    }
    let monadic = cases.iter().filter(|(_, m)| infer_kind(m) == AlgebraKind::Ca1).count();
    Ok(format!(
        "{} algebras, all verdicts definite; part 1 holds on {part1}, part 2 on {part2}/{monadic}, sigma on {sigma}; slowest {:.0} ms ({})",
        cases.len(),
        slowest.0.as_secs_f64() * 1e3,
        slowest.1
    ))
}

// ---------------------------------------------------------------- 9

/// The same structure with its carrier relabelled by a random permutation.
fn shuffled(m: &ChoiceStructure, rng: &mut ChaCha8Rng) -> ChoiceStructure {
    let n = m.size();
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    let sig = m.signature();
    let funs = sig
        .function_ids()
        .map(|f| {
            let arity = sig.function(f).arity;
            let old = m.function_table(f);
            let mut new = vec![0; old.len()];
            for args in epscan_core::semantics::tuples(n, arity) {
                let idx = |xs: &[usize]| xs.iter().fold(0, |acc, &x| acc * n + x);
                let mapped: Vec<usize> = args.iter().map(|&x| p[x]).collect();
                new[idx(&mapped)] = p[old[idx(&args)]];
            }
            new
        })
        .collect();
    let consts = sig.constant_ids().map(|c| p[m.constant(c)]).collect();
    ChoiceStructure::new(sig.clone(), n, vec![], funs, consts, ChoiceRule::Min { empty: 0 }).expect("relabelled structure")
}

fn random_partition(k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for a in 0..k {
        let i = rng.gen_range(0..=blocks.len());
        if i == blocks.len() {
            blocks.push(vec![a]);
        } else {
            blocks[i].push(a);
        }
    }
    blocks
}

fn criterion_9(algebras: &mut Vec<(String, MonadicAlgebra)>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut iso_ba = 0;
    for i in 0..50 {
        let (k1, k2) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let a = from_structure(&shuffled(&corpus::boolean_algebra(k1), &mut rng), AlgebraKind::Ba).map_err(|e| e.to_string())?;
        let b = from_structure(&shuffled(&corpus::boolean_algebra(k2), &mut rng), AlgebraKind::Ba).map_err(|e| e.to_string())?;
        let verdict = is_isomorphic_boolean(&a.algebra, &b.algebra);
        if verdict.is_some() != (a.algebra.size() == b.algebra.size()) {
            return fail(format!("BA pair {i}: {k1} vs {k2} atoms, verdict {}", verdict.is_some()));
        }
        if let Some(iso) = &verdict {
            if !check_isomorphism(&a.algebra, &b.algebra, iso) {
                return fail(format!("BA pair {i}: witness is not an isomorphism"));
            }
            iso_ba += 1;
        }
        algebras.push((format!("BA pair {i} left"), a.algebra));
        algebras.push((format!("BA pair {i} right"), b.algebra));
    }
    let mut iso_ca = 0;
    for i in 0..50 {
        let k1 = rng.gen_range(1..=4);
        let k2 = if rng.gen_bool(0.5) { k1 } else { rng.gen_range(1..=4) };
        let p1 = random_partition(k1, &mut rng);
        let p2 = random_partition(k2, &mut rng);
        let a = from_structure(&shuffled(&corpus::monadic_algebra(k1, &p1), &mut rng), AlgebraKind::Ca1).map_err(|e| e.to_string())?;
        let b = from_structure(&shuffled(&corpus::monadic_algebra(k2, &p2), &mut rng), AlgebraKind::Ca1).map_err(|e| e.to_string())?;
        let fast = is_isomorphic(&a.algebra, &b.algebra);
        let brute = brute_force_isomorphic(&a.algebra, &b.algebra);
        if fast.is_some() != brute.is_some() {
            return fail(format!("CA1 pair {i}: {p1:?} vs {p2:?}: search {}, brute force {}", fast.is_some(), brute.is_some()));
        }
        if let Some(iso) = &fast {
            if !check_isomorphism(&a.algebra, &b.algebra, iso) {
                return fail(format!("CA1 pair {i}: witness is not an isomorphism"));
            }
            iso_ca += 1;
        }
        algebras.push((format!("CA1 pair {i} left"), a.algebra));
        algebras.push((format!("CA1 pair {i} right"), b.algebra));
    }
    let mut checked = 0;
    for (name, a) in algebras.iter() {
        law_suite(a, &mut rng).map_err(|e| format!("{name}: {e}"))?;
        checked += 1;
    }
    Ok(format!("{iso_ba}/50 BA pairs and {iso_ca}/50 CA1 pairs isomorphic, all verdicts agree; {checked} constructed algebras pass the laws"))
}

// ---------------------------------------------------------------- 10

fn criterion_10() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_epscan"))
            .args(["check", "all", "corpus", "--json", "--no-timing"])
            .current_dir(root())
            .output()
            .expect("epscan runs")
    };
    let (a, b) = (run(), run());
    if a.status.code() == Some(2) {
        return fail(format!("input error: {}", String::from_utf8_lossy(&a.stderr)));
    }
    if a.stdout.is_empty() || a.stdout != b.stdout || a.status.code() != b.status.code() {
        return fail("the two runs differ");
    }
    Ok(format!("{} bytes, identical", a.stdout.len()))
}

fn main() {
    let corpus = load_corpus();
    let mut algebras = Vec::new();
    let results: Vec<(&str, Outcome)> = vec![
        ("semantic axioms", criterion_1(&corpus)),
        ("substitution lemma", criterion_2(&corpus)),
        ("definability oracle", criterion_3(&corpus)),
        ("canonical atomicity", criterion_4(&corpus)),
        ("canonical elementarity", criterion_5(&corpus)),
        ("naturality", criterion_6(&corpus)),
        ("Lt1 and Φ", criterion_7(&corpus, &mut algebras)),
        ("main theorem and sigma", criterion_8(&corpus, &mut algebras)),
        ("isomorphism and laws", criterion_9(&mut algebras)),
        ("determinism", criterion_10()),
    ];
    let mut failed = 0;
    for (i, (name, r)) in results.iter().enumerate() {
        match r {
            Ok(msg) => println!("criterion {:>2} {name}: PASS ({msg})", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({msg})", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
