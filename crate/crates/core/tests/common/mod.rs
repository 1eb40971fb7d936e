#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qtmlab::corpus::load_corpus;
use qtmlab::machine::{Branch, MachineDesc, MachineKind, Move, Rules, StateId, Symbol};
use qtmlab::quantum::{check_wellformed_local, Condition};
use qtmlab::{parse_amplitude, CycQ8};

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn corpus() -> Vec<MachineDesc> {
    load_corpus(&corpus_dir()).expect("corpus loads").into_iter().map(|(_, m)| m).collect()
}

pub fn corpus_of(kind: MachineKind) -> Vec<MachineDesc> {
    corpus().into_iter().filter(|m| m.kind() == kind).collect()
}

pub fn well_formed_qtms() -> Vec<MachineDesc> {
    corpus_of(MachineKind::Qtm)
        .into_iter()
        .filter(|m| check_wellformed_local(m).unwrap().is_well_formed())
        .collect()
}

pub fn machine(name: &str) -> MachineDesc {
    corpus().into_iter().find(|m| m.name() == name).unwrap_or_else(|| panic!("no corpus machine `{name}`"))
}

/// All strings over {0, 1} of length at most `n`, shortest first.
pub fn binary_strings(n: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..n {
        layer = layer.iter().flat_map(|s| [format!("{s}0"), format!("{s}1")]).collect();
        out.extend(layer.iter().cloned());
    }
    out
}

pub fn amp(s: &str) -> CycQ8 {
    parse_amplitude(s).unwrap()
}

fn random_branch(rng: &mut ChaCha8Rng, m: &MachineDesc, weight: CycQ8) -> Branch<CycQ8> {
    let next = StateId(rng.gen_range(0..m.states().len() as u32));
    Branch::new(next, *Symbol::ALL.choose(rng).unwrap(), *Move::ALL.choose(rng).unwrap(), weight)
}

/// One random edit of a QTM rule table aimed at `target`. The edit may
/// produce an invalid table; callers retry.
fn mutate(rng: &mut ChaCha8Rng, m: &MachineDesc, target: Condition) -> Option<MachineDesc> {
    let mut table = m.qtm_rules()?.clone();
    let sources: Vec<_> = table.keys().copied().collect();
    let src = *sources.choose(rng)?;
    match target {
        Condition::C1 => {
            let factor = ["2", "1/2", "r2", "1/r2", "3/5"].choose(rng).unwrap();
            let bs = table.get_mut(&src)?;
            let i = rng.gen_range(0..bs.len());
            bs[i].weight = &bs[i].weight * &amp(factor);
        }
        Condition::C2 => {
            // A second source reuses the first one's superposition.
            let other = *sources.choose(rng)?;
            if other == src {
                return None;
            }
            let bs = table[&src].clone();
            table.insert(other, bs);
        }
        Condition::C3 | Condition::C4 => {
            // A unit-norm rule whose branches land one or two cells apart
            // from a branch of another source.
            let two = rng.gen_bool(0.5);
            let w = if two { amp("1/r2") } else { amp("1") };
            let mut bs = vec![random_branch(rng, m, w.clone())];
            if two {
                let w2 = if rng.gen_bool(0.5) { w.clone() } else { -w };
                let b = random_branch(rng, m, w2);
                bs.push(b);
            }
            table.insert(src, bs);
        }
    }
    m.with_rules(Rules::Qtm(table)).ok().map(|x| x.renamed(format!("{}~{}", m.name(), target.id())))
}

/// `count` distinct mutants of the well-formed corpus that the local check
/// flags with `target`, drawn from a seeded generator.
pub fn violators(target: Condition, count: usize, seed: u64) -> Vec<MachineDesc> {
    let bases = well_formed_qtms();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<MachineDesc> = Vec::new();
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        assert!(attempts < 200_000, "could not find {count} mutants violating {}", target.id());
        let base = bases.choose(&mut rng).unwrap();
        let Some(mutant) = mutate(&mut rng, base, target) else { continue };
        let report = check_wellformed_local(&mutant).unwrap();
        if report.conditions().contains(&target) && !out.iter().any(|o| o.rules() == mutant.rules()) {
            let n = out.len();
            out.push(mutant.renamed(format!("{}#{n}", mutant.name())));
        }
    }
    out
}

fn distinct_branches<W>(rng: &mut ChaCha8Rng, states: u32, weights: Vec<W>) -> Vec<Branch<W>> {
    let mut out: Vec<Branch<W>> = Vec::new();
    for w in weights {
        let b = Branch::new(
            StateId(rng.gen_range(0..states)),
            *Symbol::ALL.choose(rng).unwrap(),
            *Move::ALL.choose(rng).unwrap(),
            w,
        );
        if !out.iter().any(|o| o.target() == b.target()) {
            out.push(b);
        }
    }
    out
}

/// A random valid machine of the given kind with 2 to 4 states. Quantum
/// tables are total but usually not well-formed.
pub fn random_machine(rng: &mut ChaCha8Rng, kind: MachineKind) -> MachineDesc {
    use qtmlab::machine::RuleTable;
    use qtmlab::Rat;

    let n = rng.gen_range(2..=4u32);
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let halt = StateId(n - 1);
    let sources = (0..n - 1).flat_map(|q| Symbol::ALL.map(|s| (StateId(q), s)));
    let rules = match kind {
        MachineKind::Tm => {
            let mut t = RuleTable::new();
            for src in sources {
                if rng.gen_bool(0.8) {
                    t.insert(src, distinct_branches(rng, n, vec![()]));
                }
            }
            Rules::Tm(t)
        }
        MachineKind::Ptm => {
            let mut t = RuleTable::new();
            for src in sources {
                if rng.gen_bool(0.2) {
                    continue;
                }
                let k = rng.gen_range(1..=3);
                let raw: Vec<u32> = (0..k).map(|_| rng.gen_range(1..6)).collect();
                let bs = distinct_branches(rng, n, raw);
                let total: u32 = bs.iter().map(|b| b.weight).sum();
                let bs = bs
                    .into_iter()
                    .map(|b| Branch::new(b.next, b.write, b.mv, Rat::new(b.weight.into(), total.into())))
                    .collect();
                t.insert(src, bs);
            }
            Rules::Ptm(t)
        }
        MachineKind::Qtm => {
            let pool = ["1", "-1", "i", "-i", "1/r2", "-1/r2", "1/2 + 1/2*i", "3/5", "4/5*i"];
            let mut t = RuleTable::new();
            for src in sources {
                let k = rng.gen_range(1..=2);
                let ws: Vec<CycQ8> = (0..k).map(|_| amp(pool.choose(rng).unwrap())).collect();
                t.insert(src, distinct_branches(rng, n, ws));
            }
            Rules::Qtm(t)
        }
    };
    let name = format!("rand{}", rng.gen_range(0..1000u32));
    MachineDesc::new(name, states, StateId(0), halt, rules).expect("generated tables are valid")
}
