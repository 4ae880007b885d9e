use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::{Serialize, Serializer};

use super::{ChainSchema, Index, Membership, StagePos, SubgroupDescriptor, TRANSVERSAL_CAP};
use crate::groups::{probe_elements, Element, Group, ProbeConfig};
use crate::ordinal::CardinalBound;
use crate::Ordinal;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Finite steps checked past each limit stage.
    pub levels: u64,
    pub probes: usize,
    pub seed: u64,
    /// Longest probe word.
    pub word_len: usize,
    /// Steps per block scanned when looking for a stage that excludes a
    /// probe, and when resolving limit stages.
    pub resolution_budget: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { levels: 4, probes: 64, seed: 0, word_len: 8, resolution_budget: 64 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail { reason: String, stage: String, witness: String },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndexReport {
    Root,
    Limit,
    Finite(BigUint),
    Infinite,
    /// Distinct cosets seen among the probes.
    Unverified { lower_bound: usize },
}

impl Serialize for IndexReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            IndexReport::Root => s.serialize_str("root"),
            IndexReport::Limit => s.serialize_str("limit"),
            IndexReport::Infinite => s.serialize_str("infinite"),
            IndexReport::Finite(n) => Index::Finite(n.clone()).serialize(s),
            IndexReport::Unverified { lower_bound } => s.serialize_str(&format!("unverified (>= {lower_bound})")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Descent {
    Ok,
    Violated,
    Unresolved,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub stage: String,
    pub index: IndexReport,
    pub descent: Descent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationReport {
    pub probe: String,
    pub first_excluding_stage: Option<String>,
}

impl Serialize for SeparationReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SeparationReport", 2)?;
        st.serialize_field("probe", &self.probe)?;
        st.serialize_field("first_excluding_stage", self.first_excluding_stage.as_deref().unwrap_or("unresolved"))?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainCertificate {
    pub verdict: Verdict,
    pub kappa: CardinalBound,
    pub length: Ordinal,
    pub levels_checked: u64,
    pub levels: Vec<LevelReport>,
    pub separations: Vec<SeparationReport>,
    pub seed: u64,
    pub probes_used: usize,
    pub flags: Vec<String>,
}

impl ChainCertificate {
    pub fn separation_of(&self, probe: &str) -> Option<&SeparationReport> {
        self.separations.iter().find(|s| s.probe == probe)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

pub fn verify_prefix(chain: &ChainSchema, levels: u64, probes: usize, seed: u64) -> ChainCertificate {
    verify_with(chain, &VerifyOptions { levels, probes, seed, ..VerifyOptions::default() })
}

/// Checks a finite prefix of `chain` against seeded probe elements.
pub fn verify_with(chain: &ChainSchema, opts: &VerifyOptions) -> ChainCertificate {
    let levels = opts.levels.max(1);
    let budget = opts.resolution_budget.max(levels);
    let probes = probe_elements(chain.group(), &ProbeConfig { count: opts.probes, max_len: opts.word_len, seed: opts.seed });
    let mut run = Run { chain, probes: &probes, budget, cache: BTreeMap::new(), fail: None, doubts: Vec::new() };
    let mut reports = Vec::new();

    reports.push(LevelReport { stage: "0".into(), index: IndexReport::Root, descent: Descent::NotApplicable });
    for (i, m) in run.memberships(StagePos::new(0, 0)).into_iter().enumerate() {
        if m != Membership::Member {
            run.record_fail("stage 0 does not contain the probe", StagePos::new(0, 0), &probes[i]);
        }
    }

    let q = chain.blocks();
    for b in 0..=q {
        if b > 0 {
            let descent = run.check_limit(b, levels);
            reports.push(LevelReport { stage: StagePos::new(b, 0).to_string(), index: IndexReport::Limit, descent });
        }
        let steps = if b < q { levels } else { chain.tail_len() };
        for n in 1..=steps {
            let (parent, child) = (StagePos::new(b, n - 1), StagePos::new(b, n));
            let descent = run.check_descent(parent, child);
            let index = run.check_index(parent, child);
            reports.push(LevelReport { stage: child.to_string(), index, descent });
        }
    }

    let terminal = chain.terminal();
    let terminal_decidable = terminal.step > 0 || terminal.block == 0 || chain.limit_closed_form(terminal.block - 1).is_some();
    if terminal_decidable {
        for (i, m) in run.memberships(terminal).into_iter().enumerate() {
            if m == Membership::Member {
                run.record_fail("final stage contains a nontrivial probe", terminal, &probes[i]);
            }
        }
    }

    let separations: Vec<SeparationReport> = probes
        .iter()
        .enumerate()
        .map(|(i, p)| SeparationReport { probe: p.to_string(), first_excluding_stage: run.first_excluding(i).map(|s| s.to_string()) })
        .collect();
    let unresolved = separations.iter().filter(|s| s.first_excluding_stage.is_none()).count();
    if unresolved > 0 {
        run.doubts.push(format!("{unresolved} probe(s) not separated within {budget} steps per block"));
    }

    let verdict = match (run.fail.take(), run.doubts.is_empty()) {
        (Some(fail), _) => fail,
        (None, true) => Verdict::Pass,
        (None, false) => Verdict::Inconclusive { reason: run.doubts.join("; ") },
    };
    ChainCertificate {
        verdict,
        kappa: chain.kappa(),
        length: chain.length(),
        levels_checked: levels,
        levels: reports,
        separations,
        seed: opts.seed,
        probes_used: probes.len(),
        flags: chain.flags().to_vec(),
    }
}

struct Run<'a> {
    chain: &'a ChainSchema,
    probes: &'a [Element],
    budget: u64,
    cache: BTreeMap<StagePos, Vec<Membership>>,
    fail: Option<Verdict>,
    doubts: Vec<String>,
}

impl Run<'_> {
    fn group(&self) -> &Group {
        self.chain.group()
    }

    fn stage(&self, pos: StagePos) -> SubgroupDescriptor {
        self.chain.stage_with_budget(pos, self.budget).expect("checked stages lie within the chain")
    }

    fn memberships(&mut self, pos: StagePos) -> Vec<Membership> {
        if let Some(v) = self.cache.get(&pos) {
            return v.clone();
        }
        let stage = self.stage(pos);
        let v: Vec<Membership> = self.probes.iter().map(|p| stage.contains(p)).collect();
        self.cache.insert(pos, v.clone());
        v
    }

    fn record_fail(&mut self, reason: impl Into<String>, pos: StagePos, witness: &Element) {
        if self.fail.is_none() {
            self.fail = Some(Verdict::Fail { reason: reason.into(), stage: pos.to_string(), witness: witness.to_string() });
        }
    }

    fn check_descent(&mut self, parent: StagePos, child: StagePos) -> Descent {
        let above = self.memberships(parent);
        let below = self.memberships(child);
        let mut status = Descent::Ok;
        for (i, (a, b)) in above.iter().zip(&below).enumerate() {
            match (b, a) {
                (Membership::Member, Membership::NonMember) => {
                    self.record_fail(format!("stage {child} is not contained in stage {parent}"), child, &self.probes[i].clone());
                    return Descent::Violated;
                }
                (Membership::Member, Membership::Unresolved) => status = Descent::Unresolved,
                _ => {}
            }
        }
        if status == Descent::Unresolved {
            self.doubts.push(format!("descent into {child} unresolved"));
        }
        status
    }

    fn check_index(&mut self, parent_pos: StagePos, child_pos: StagePos) -> IndexReport {
        let parent = self.stage(parent_pos);
        let child = self.stage(child_pos);
        let kappa = self.chain.kappa();
        let group = self.group().clone();
        let report = match (child.index(), child.transversal()) {
            (Index::Infinite, _) => {
                self.record_fail(format!("step into {child_pos} has infinite index"), child_pos, &group.identity());
                return IndexReport::Infinite;
            }
            (Index::Finite(k), Some(reps)) => {
                if BigUint::from(reps.len()) != *k {
                    let w = reps.last().cloned().unwrap_or_else(|| group.identity());
                    self.record_fail(format!("{} coset representatives listed for index {k}", reps.len()), child_pos, &w);
                }
                self.check_transversal(&parent, &child, reps, child_pos);
                IndexReport::Finite(k.clone())
            }
            (Index::Finite(k), None) => IndexReport::Finite(k.clone()),
            (Index::Unverified, _) => {
                let lower_bound = self.count_cosets(&parent, &child);
                self.doubts.push(format!("index into {child_pos} not bounded (>= {lower_bound} cosets seen)"));
                if let CardinalBound::Finite(kap) = kappa {
                    if lower_bound as u64 >= kap {
                        self.record_fail(format!("at least {lower_bound} cosets into {child_pos}, not < {kappa}"), child_pos, &group.identity());
                    }
                }
                return IndexReport::Unverified { lower_bound };
            }
        };
        if let IndexReport::Finite(k) = &report {
            let admitted = match kappa {
                CardinalBound::Aleph0 => true,
                CardinalBound::Finite(kap) => *k < BigUint::from(kap),
            };
            if !admitted {
                let witness = child
                    .transversal()
                    .and_then(|reps| reps.iter().find(|t| child.contains(t) == Membership::NonMember).cloned())
                    .unwrap_or_else(|| group.identity());
                self.record_fail(format!("index {k} is not < {kappa}"), child_pos, &witness);
            }
        }
        report
    }

    fn check_transversal(&mut self, parent: &SubgroupDescriptor, child: &SubgroupDescriptor, reps: &[Element], pos: StagePos) {
        let group = self.group().clone();
        for t in reps {
            match parent.contains(t) {
                Membership::Member => {}
                Membership::NonMember => {
                    self.record_fail(format!("coset representative outside the stage before {pos}"), pos, t);
                    return;
                }
                Membership::Unresolved => self.doubts.push(format!("representative {t} for {pos} unresolved")),
            }
        }
        if reps.len() <= TRANSVERSAL_CAP {
            let inverses: Vec<Element> = reps.iter().map(|t| group.invert(t).expect("representative in group")).collect();
            for i in 0..reps.len() {
                for j in i + 1..reps.len() {
                    let q = group.multiply(&inverses[i], &reps[j]).expect("representative in group");
                    match child.contains(&q) {
                        Membership::NonMember => {}
                        Membership::Member => {
                            self.record_fail(format!("representatives {} and {} share a coset of {pos}", reps[i], reps[j]), pos, &q);
                            return;
                        }
                        Membership::Unresolved => self.doubts.push(format!("coset distinctness for {pos} unresolved")),
                    }
                }
            }
            let above = self.memberships(StagePos { step: pos.step - 1, ..pos });
            for (p, m) in self.probes.iter().zip(above) {
                if m != Membership::Member {
                    continue;
                }
                let mut seen = Membership::NonMember;
                for inv in &inverses {
                    let m = child.contains(&group.multiply(inv, p).expect("probe in group"));
                    seen = match (seen, m) {
                        (_, Membership::Member) | (Membership::Member, _) => Membership::Member,
                        (_, Membership::Unresolved) | (Membership::Unresolved, _) => Membership::Unresolved,
                        _ => Membership::NonMember,
                    };
                    if seen == Membership::Member {
                        break;
                    }
                }
                match seen {
                    Membership::Member => {}
                    Membership::NonMember => {
                        self.record_fail(format!("probe lies in no listed coset of {pos}"), pos, p);
                        return;
                    }
                    Membership::Unresolved => self.doubts.push(format!("coverage of {pos} unresolved")),
                }
            }
        } else {
            self.doubts.push(format!("transversal for {pos} too large to check"));
        }
    }

    /// Distinct cosets of `child` among the probes lying in `parent`.
    fn count_cosets(&self, parent: &SubgroupDescriptor, child: &SubgroupDescriptor) -> usize {
        let group = self.group();
        let mut reps: Vec<Element> = Vec::new();
        for p in self.probes.iter().chain(std::iter::once(&group.identity())) {
            if parent.contains(p) != Membership::Member {
                continue;
            }
            let fresh = reps.iter().all(|r| {
                let q = group.multiply(&group.invert(r).expect("probe in group"), p).expect("probe in group");
                child.contains(&q) == Membership::NonMember
            });
            if fresh {
                reps.push(p.clone());
            }
        }
        reps.len()
    }

    /// Closed form at `ω·b` against the block before it.
    fn check_limit(&mut self, b: u64, levels: u64) -> Descent {
        let pos = StagePos::new(b, 0);
        let Some(closed) = self.chain.limit_closed_form(b - 1).cloned() else {
            return Descent::NotApplicable;
        };
        let lazy = self.chain.lazy_limit(b, self.budget);
        let before = self.memberships(StagePos::new(b - 1, levels.min(self.budget)));
        for (i, p) in self.probes.iter().enumerate() {
            if closed.contains(p) != Membership::Member {
                continue;
            }
            if before[i] == Membership::NonMember || lazy.contains(p) == Membership::NonMember {
                self.record_fail(format!("limit stage {pos} is not the intersection of the stages before it"), pos, &p.clone());
                return Descent::Violated;
            }
        }
        Descent::Ok
    }

    /// First stage, in chain order, that provably excludes probe `i`.
    fn first_excluding(&mut self, i: usize) -> Option<StagePos> {
        let q = self.chain.blocks();
        let p = self.probes[i].clone();
        for b in 0..=q {
            if b > 0 && self.chain.limit_closed_form(b - 1).is_some() {
                let pos = StagePos::new(b, 0);
                if self.member_at(pos, i, &p) == Membership::NonMember {
                    return Some(pos);
                }
            }
            let steps = if b < q { self.budget } else { self.chain.tail_len() };
            for n in 1..=steps {
                let pos = StagePos::new(b, n);
                if self.member_at(pos, i, &p) == Membership::NonMember {
                    return Some(pos);
                }
            }
        }
        None
    }

    fn member_at(&mut self, pos: StagePos, i: usize, p: &Element) -> Membership {
        match self.cache.get(&pos) {
            Some(v) => v[i],
            None => self.stage(pos).contains(p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::{finite_group_chain, two_adic_chain};
    use crate::groups::{make_cyclic, make_integers};

    fn first_stage(cert: &ChainCertificate, probe: i64) -> Option<String> {
        cert.separation_of(&probe.to_string()).and_then(|s| s.first_excluding_stage.clone())
    }

    #[test]
    fn two_adic_passes() {
        let cert = verify_prefix(&two_adic_chain(&make_integers()), 6, 64, 0);
        assert_eq!(cert.verdict, Verdict::Pass);
        assert_eq!(first_stage(&cert, 3).as_deref(), Some("1"));
        assert_eq!(first_stage(&cert, 4).as_deref(), Some("3"));
    }

    #[test]
    fn index_five_is_not_below_five() {
        let chain = finite_group_chain(&make_cyclic(5).unwrap()).unwrap().with_kappa(CardinalBound::Finite(5));
        let cert = verify_prefix(&chain, 4, 16, 0);
        let Verdict::Fail { reason, stage, witness } = &cert.verdict else { panic!("{:?}", cert.verdict) };
        assert!(reason.contains("index 5"), "{reason}");
        assert_eq!(stage, "1");
        assert_ne!(witness, "0");
        let ok = verify_prefix(&chain.with_kappa(CardinalBound::Finite(6)), 4, 16, 0);
        assert_eq!(ok.verdict, Verdict::Pass);
    }

    #[test]
    fn certificates_are_reproducible() {
        let chain = two_adic_chain(&make_integers());
        let a = verify_prefix(&chain, 4, 32, 11).to_json();
        let b = verify_prefix(&chain, 4, 32, 11).to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"first_excluding_stage\""));
    }
}
