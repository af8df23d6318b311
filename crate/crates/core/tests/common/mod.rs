//! Property checks and independent oracles. Shared by this crate's tests and
//! by the workspace acceptance target, which runs them at full case counts.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BTreeSet;

use chrono::{DateTime, Duration, TimeZone, Utc};
use fable_core::assessment::{consensus, score_assessment, Answer, AnswerValue, Assessment, DimensionScore, ScoreVector};
use fable_core::clock::SteppingClock;
use fable_core::ids::{AssessorId, ClaimId};
use fable_core::questionnaire::{canonical_fable, DimensionId, Questionnaire};
use fable_core::store::{
    read_log, replay, restore, snapshot, AssessmentRecord, Claim, ClaimStatus, Event, EventRecord, Note, StatusChange,
    Store, StoreError, LOG_FILE,
};
use fable_core::triage::{compare_entries, rank_queue, Candidate, PriorityProfile, QueueEntry, RankingMode};
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub type Check = Result<(), String>;

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Check
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn t0() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 3, 1, 9, 0, 0).unwrap()
}

// ---- generators ----

fn answer_value() -> impl Strategy<Value = AnswerValue> {
    prop_oneof![Just(AnswerValue::Yes), Just(AnswerValue::No), Just(AnswerValue::Unknown)]
}

/// One value per canonical question, in questionnaire order.
fn answer_row() -> impl Strategy<Value = Vec<AnswerValue>> {
    prop::collection::vec(answer_value(), 18)
}

fn assessment_of(q: &Questionnaire, assessor: &str, values: &[AnswerValue]) -> Assessment {
    Assessment {
        claim_id: ClaimId::new("claim"),
        assessor_id: AssessorId::new(assessor),
        questionnaire_version: q.version(),
        created_at: t0(),
        answers: q
            .questions()
            .iter()
            .zip(values)
            .map(|(question, v)| Answer::new(question.id.clone(), *v))
            .collect(),
    }
}

/// Small per-dimension domains so that ties, dominance chains and
/// undefined scores all occur often.
fn dimension_score(d: DimensionId, allow_undefined: bool) -> impl Strategy<Value = DimensionScore> {
    (1u32..=3, 0u32..=3, 0u32..=3).prop_map(move |(total, a, y)| {
        let answered = if allow_undefined { a % (total + 1) } else { 1 + a % total };
        DimensionScore::from_counts(d, y % (answered + 1), answered, total)
    })
}

fn vector(allow_undefined: bool) -> impl Strategy<Value = ScoreVector> {
    let [f, a, b, l, e] = DimensionId::ALL.map(|d| dimension_score(d, allow_undefined));
    (f, a, b, l, e).prop_map(|(f, a, b, l, e)| ScoreVector::new([f, a, b, l, e]))
}

fn any_vector() -> impl Strategy<Value = ScoreVector> {
    prop_oneof![3 => vector(false), 1 => vector(true)]
}

fn tie_break() -> impl Strategy<Value = [DimensionId; 5]> {
    Just(DimensionId::ALL.to_vec())
        .prop_shuffle()
        .prop_map(|v| v.try_into().unwrap())
}

fn profile() -> impl Strategy<Value = PriorityProfile> {
    (
        prop::array::uniform5(0i64..=5),
        prop_oneof![Just(RankingMode::WeightedScalar), Just(RankingMode::ParetoOnly)],
        0i64..=4,
        tie_break(),
    )
        .prop_filter("some positive weight", |(w, ..)| w.iter().any(|x| *x > 0))
        .prop_map(|(w, mode, cov, tb)| {
            PriorityProfile::new("p", w.map(Rational64::from_integer), mode, Rational64::new(cov, 4), tb).unwrap()
        })
}

fn candidates(max: usize) -> impl Strategy<Value = Vec<Candidate>> {
    prop::collection::vec((any_vector(), 0i64..4), 0..=max).prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, (scores, minutes))| Candidate {
                claim_id: ClaimId::new(format!("c{i:02}")),
                created_at: t0() + Duration::minutes(minutes),
                scores,
            })
            .collect()
    })
}

// ---- oracles ----

/// Dominance written straight from the definition, over rationals as
/// (yes, answered) pairs compared by cross-multiplication.
pub fn oracle_dominates(a: &ScoreVector, b: &ScoreVector) -> bool {
    let pairs: Vec<_> = DimensionId::ALL.iter().map(|d| (a.get(*d), b.get(*d))).collect();
    if pairs.iter().any(|(x, y)| x.answered_count == 0 || y.answered_count == 0) {
        return false;
    }
    let cmp = |x: &DimensionScore, y: &DimensionScore| {
        (u64::from(x.yes_count) * u64::from(y.answered_count)).cmp(&(u64::from(y.yes_count) * u64::from(x.answered_count)))
    };
    pairs.iter().all(|(x, y)| cmp(x, y) != Ordering::Less) && pairs.iter().any(|(x, y)| cmp(x, y) == Ordering::Greater)
}

pub fn oracle_frontier(vs: &[ScoreVector]) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for i in 0..vs.len() {
        let mut dominated = false;
        for j in 0..vs.len() {
            if oracle_dominates(&vs[j], &vs[i]) {
                dominated = true;
            }
        }
        if !dominated {
            out.insert(i);
        }
    }
    out
}

fn oracle_scalar(p: &PriorityProfile, v: &ScoreVector) -> Option<BigRational> {
    let mut num = BigRational::zero();
    let mut den = BigRational::zero();
    for d in DimensionId::ALL {
        let w = p.weight(d);
        let s = v.get(d);
        if *w.numer() > 0 && s.answered_count > 0 {
            let w = BigRational::new(BigInt::from(*w.numer()), BigInt::from(*w.denom()));
            num += w.clone() * BigRational::new(BigInt::from(s.yes_count), BigInt::from(s.answered_count));
            den += w;
        }
    }
    (!den.is_zero()).then(|| num / den)
}

/// The published queue order, implemented naively: a key per entry and a
/// lexicographic comparison over those keys.
pub fn oracle_order(p: &PriorityProfile, claims: &[Candidate]) -> Vec<ClaimId> {
    let vectors: Vec<ScoreVector> = claims.iter().map(|c| c.scores.clone()).collect();
    let frontier = oracle_frontier(&vectors);
    let score = |v: &ScoreVector, d: DimensionId| {
        let s = v.get(d);
        (s.answered_count > 0).then(|| BigRational::new(BigInt::from(s.yes_count), BigInt::from(s.answered_count)))
    };
    // None sorts after every defined value when descending
    let desc = |a: &Option<BigRational>, b: &Option<BigRational>| match (a, b) {
        (Some(x), Some(y)) => y.cmp(x),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    };
    let mut idx: Vec<usize> = (0..claims.len()).collect();
    idx.sort_by(|&i, &j| {
        let (a, b) = (&claims[i], &claims[j]);
        let mut o = match p.mode() {
            RankingMode::WeightedScalar => desc(&oracle_scalar(p, &a.scores), &oracle_scalar(p, &b.scores)),
            RankingMode::ParetoOnly => frontier.contains(&j).cmp(&frontier.contains(&i)),
        };
        for d in p.tie_break() {
            if o == Ordering::Equal {
                o = desc(&score(&a.scores, *d), &score(&b.scores, *d));
            }
        }
        o.then(a.created_at.cmp(&b.created_at)).then(a.claim_id.cmp(&b.claim_id))
    });
    idx.into_iter().map(|i| claims[i].claim_id.clone()).collect()
}

// ---- scoring ----

/// Every answer combination for every dimension of the canonical
/// questionnaire (k = 6, 3, 3, 2, 4), checked against direct counting.
pub fn scoring_oracle() -> Check {
    let q = canonical_fable();
    let mut ks = BTreeSet::new();
    for d in DimensionId::ALL {
        let ids: Vec<String> = q.questions_for(d).map(|x| x.id.clone()).collect();
        let k = ids.len();
        ks.insert(k);
        for code in 0..3usize.pow(k as u32) {
            let values: Vec<AnswerValue> = (0..k)
                .map(|i| match (code / 3usize.pow(i as u32)) % 3 {
                    0 => AnswerValue::Yes,
                    1 => AnswerValue::No,
                    _ => AnswerValue::Unknown,
                })
                .collect();
            let a = Assessment {
                claim_id: ClaimId::new("claim"),
                assessor_id: AssessorId::new("x"),
                questionnaire_version: 1,
                created_at: t0(),
                answers: ids.iter().zip(&values).map(|(id, v)| Answer::new(id.clone(), *v)).collect(),
            };
            let v = score_assessment(&q, &a).map_err(|e| e.to_string())?;
            let yes = values.iter().filter(|v| **v == AnswerValue::Yes).count() as i64;
            let no = values.iter().filter(|v| **v == AnswerValue::No).count() as i64;
            let expected_score = (yes + no > 0).then(|| Rational64::new(yes, yes + no));
            let expected_coverage = Rational64::new(yes + no, k as i64);
            let got = v.get(d);
            if got.score != expected_score || got.coverage != expected_coverage {
                return Err(format!(
                    "{d:?} {values:?}: got score {:?} coverage {}, expected {expected_score:?} {expected_coverage}",
                    got.score, got.coverage
                ));
            }
            for other in DimensionId::ALL.into_iter().filter(|o| *o != d) {
                let s = v.get(other);
                if s.score.is_some() || !s.coverage.is_zero() {
                    return Err(format!("{other:?} changed while enumerating {d:?}"));
                }
            }
        }
    }
    if ks != BTreeSet::from([2, 3, 4, 6]) {
        return Err(format!("dimension sizes {ks:?} do not cover 2, 3, 4 and 6"));
    }
    Ok(())
}

pub fn score_bounds(cases: u32) -> Check {
    let q = canonical_fable();
    run(cases, answer_row(), |row| {
        let v = score_assessment(&q, &assessment_of(&q, "a", &row)).unwrap();
        for s in v.iter() {
            prop_assert!(s.yes_count <= s.answered_count && s.answered_count <= s.total_count);
            prop_assert!(s.coverage >= Rational64::zero() && s.coverage <= Rational64::from_integer(1));
            if let Some(x) = s.score {
                prop_assert!(x >= Rational64::zero() && x <= Rational64::from_integer(1));
            }
        }
        Ok(())
    })
}

pub fn monotonicity(cases: u32) -> Check {
    let q = canonical_fable();
    run(cases, (answer_row(), 0usize..18), |(row, i)| {
        let d = q.questions()[i].dimension;
        let before = score_assessment(&q, &assessment_of(&q, "a", &row)).unwrap().score(d);
        let with = |value| {
            let mut changed = row.clone();
            changed[i] = value;
            score_assessment(&q, &assessment_of(&q, "a", &changed)).unwrap().score(d)
        };
        let no_decrease = |after: Option<Rational64>| match (before, after) {
            (Some(b), Some(a)) => a >= b,
            (Some(_), None) => false,
            (None, _) => true,
        };
        let no_increase = |after: Option<Rational64>| match (before, after) {
            (Some(b), Some(a)) => a <= b,
            (Some(_), None) => false,
            (None, _) => true,
        };
        match row[i] {
            AnswerValue::No => prop_assert!(no_decrease(with(AnswerValue::Yes)), "No->Yes decreased {d:?}"),
            AnswerValue::Unknown => {
                prop_assert!(no_decrease(with(AnswerValue::Yes)), "Unknown->Yes decreased {d:?}");
                prop_assert!(no_increase(with(AnswerValue::No)), "Unknown->No increased {d:?}");
            }
            AnswerValue::Yes => {}
        }
        Ok(())
    })
}

pub fn dimension_isolation(cases: u32) -> Check {
    let q = canonical_fable();
    let dims = prop::sample::select(DimensionId::ALL.to_vec());
    run(cases, (answer_row(), answer_row(), dims), |(a, b, d)| {
        let mixed: Vec<AnswerValue> = q
            .questions()
            .iter()
            .enumerate()
            .map(|(i, question)| if question.dimension == d { b[i] } else { a[i] })
            .collect();
        let va = score_assessment(&q, &assessment_of(&q, "a", &a)).unwrap();
        let vm = score_assessment(&q, &assessment_of(&q, "a", &mixed)).unwrap();
        for other in DimensionId::ALL.into_iter().filter(|o| *o != d) {
            prop_assert_eq!(va.get(other), vm.get(other));
        }
        Ok(())
    })
}

pub fn consensus_permutation(cases: u32) -> Check {
    let q = canonical_fable();
    run(cases, (prop::collection::vec(answer_row(), 1..=6), any::<u64>()), |(rows, seed)| {
        let list: Vec<Assessment> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| assessment_of(&q, &format!("assessor-{i}"), r))
            .collect();
        let mut shuffled = list.clone();
        shuffled.shuffle(&mut StdRng::seed_from_u64(seed));
        prop_assert_eq!(consensus(&q, &list).unwrap(), consensus(&q, &shuffled).unwrap());
        Ok(())
    })
}

// ---- triage ----

fn order(entries: &[QueueEntry]) -> Vec<ClaimId> {
    entries.iter().map(|e| e.claim_id.clone()).collect()
}

pub fn weight_scale_invariance(cases: u32) -> Check {
    let factor = (1i64..=1000, 1i64..=1000).prop_map(|(n, d)| Rational64::new(n, d));
    run(cases, (profile(), factor, candidates(12)), |(p, c, claims)| {
        let scaled = p.scaled(c).unwrap();
        let a = rank_queue(&p, &claims).unwrap();
        let b = rank_queue(&scaled, &claims).unwrap();
        prop_assert_eq!(order(&a), order(&b));
        prop_assert_eq!(
            a.iter().map(|e| e.rank).collect::<Vec<_>>(),
            b.iter().map(|e| e.rank).collect::<Vec<_>>()
        );
        Ok(())
    })
}

pub fn dominance_laws(cases: u32) -> Check {
    use fable_core::triage::dominates;
    run(cases, (any_vector(), any_vector(), any_vector()), |(a, b, c)| {
        prop_assert!(!dominates(&a, &a), "irreflexive");
        prop_assert!(!(dominates(&a, &b) && dominates(&b, &a)), "antisymmetric");
        if dominates(&a, &b) && dominates(&b, &c) {
            prop_assert!(dominates(&a, &c), "transitive");
        }
        prop_assert_eq!(dominates(&a, &b), oracle_dominates(&a, &b));
        Ok(())
    })
}

/// Dense chains: b and c are derived from a by lowering scores, so the
/// transitive case is exercised on every run.
pub fn dominance_chains(cases: u32) -> Check {
    use fable_core::triage::dominates;
    let lowered = |v: &ScoreVector, mask: u8| {
        ScoreVector::new(DimensionId::ALL.map(|d| {
            let s = v.get(d);
            if mask & (1 << d.index()) != 0 && s.yes_count > 0 {
                DimensionScore::from_counts(d, s.yes_count - 1, s.answered_count, s.total_count)
            } else {
                s.clone()
            }
        }))
    };
    run(cases, (vector(false), 1u8..32, 1u8..32), |(a, m1, m2)| {
        let b = lowered(&a, m1);
        let c = lowered(&b, m2);
        if dominates(&a, &b) && dominates(&b, &c) {
            prop_assert!(dominates(&a, &c));
        }
        prop_assert!(!dominates(&c, &a));
        Ok(())
    })
}

pub fn frontier_oracle(cases: u32) -> Check {
    use fable_core::triage::pareto_frontier;
    run(cases, prop::collection::vec(any_vector(), 0..=8), |vs| {
        prop_assert_eq!(pareto_frontier(&vs), oracle_frontier(&vs));
        Ok(())
    })
}

pub fn comparator_totality(cases: u32) -> Check {
    run(cases, (profile(), candidates(10), any::<u64>()), |(p, claims, seed)| {
        let entries = rank_queue(&p, &claims).unwrap();
        for a in &entries {
            prop_assert_eq!(compare_entries(&p, a, a), Ordering::Equal);
            for b in &entries {
                let ab = compare_entries(&p, a, b);
                prop_assert_eq!(ab, compare_entries(&p, b, a).reverse());
                if a.claim_id != b.claim_id {
                    prop_assert_ne!(ab, Ordering::Equal, "distinct claims must not tie");
                }
                for c in &entries {
                    if ab == Ordering::Less && compare_entries(&p, b, c) == Ordering::Less {
                        prop_assert_eq!(compare_entries(&p, a, c), Ordering::Less);
                    }
                }
            }
        }
        for pair in entries.windows(2) {
            prop_assert_eq!(compare_entries(&p, &pair[0], &pair[1]), Ordering::Less);
        }
        let mut shuffled = claims.clone();
        shuffled.shuffle(&mut StdRng::seed_from_u64(seed));
        let again = rank_queue(&p, &shuffled).unwrap();
        prop_assert_eq!(serde_json::to_string(&entries).unwrap(), serde_json::to_string(&again).unwrap());
        Ok(())
    })
}

pub fn reference_sort(cases: u32) -> Check {
    run(cases, (profile(), candidates(50)), |(p, claims)| {
        let entries = rank_queue(&p, &claims).unwrap();
        prop_assert_eq!(order(&entries), oracle_order(&p, &claims));
        for e in &entries {
            prop_assert_eq!(e.rank.is_some(), e.scalar.is_some());
            prop_assert_eq!(e.scalar.is_some(), p.mode() == RankingMode::WeightedScalar && oracle_scalar(&p, &e.score_vector).is_some());
        }
        Ok(())
    })
}

// ---- store ----

/// A log of `n` random valid events, built through the public store API.
pub fn random_log(seed: u64, n: usize) -> Vec<EventRecord> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut store = Store::in_memory();
    store.set_clock(std::sync::Arc::new(SteppingClock::new(t0(), Duration::seconds(1))));
    let q = canonical_fable();
    store.append(Event::QuestionnaireRegistered(q.clone())).unwrap();
    let assessors = ["ana", "bo", "cy"];
    let mut tick = 0i64;
    while store.records().len() < n {
        let state = store.state();
        let ids: Vec<ClaimId> = state.claims.keys().cloned().collect();
        let roll = if ids.is_empty() { 0 } else { rng.random_range(0..10) };
        let event = match roll {
            0..=2 => Event::ClaimAdded(Claim {
                claim_id: ClaimId::new(format!("claim-{}", state.claims.len())),
                text: format!("text {}", rng.random::<u32>()),
                source_url: rng.random_bool(0.5).then(|| "https://example.org/x".to_string()),
                platform: None,
                created_at: t0() + Duration::seconds(rng.random_range(0..100)),
                status: ClaimStatus::Open,
            }),
            3..=5 => {
                tick += 1;
                let values: Vec<AnswerValue> = (0..q.questions().len())
                    .map(|_| [AnswerValue::Yes, AnswerValue::No, AnswerValue::Unknown][rng.random_range(0..3)])
                    .collect();
                let mut a = assessment_of(&q, assessors[rng.random_range(0..3)], &values);
                a.claim_id = ids[rng.random_range(0..ids.len())].clone();
                a.created_at = t0() + Duration::minutes(tick);
                a.answers.retain(|_| rng.random_bool(0.9));
                Event::AssessmentRecorded(AssessmentRecord {
                    assessment: a,
                    idempotency_key: rng.random_bool(0.3).then(|| format!("k-{tick}")),
                })
            }
            6 => {
                let id = &ids[rng.random_range(0..ids.len())];
                let from = state.claims[id].status;
                let next = [ClaimStatus::InProgress, ClaimStatus::Published, ClaimStatus::Dismissed]
                    .into_iter()
                    .filter(|s| from.can_move_to(*s))
                    .collect::<Vec<_>>();
                match next.get(rng.random_range(0..next.len().max(1))) {
                    Some(status) => Event::StatusChanged(StatusChange {
                        claim_id: id.clone(),
                        status: *status,
                    }),
                    None => continue,
                }
            }
            7 | 8 => Event::NoteAdded(Note {
                claim_id: ids[rng.random_range(0..ids.len())].clone(),
                author_id: AssessorId::new(assessors[rng.random_range(0..3)]),
                body: format!("note {}", rng.random::<u16>()),
                created_at: t0(),
            }),
            _ => {
                let w = [(); 5].map(|_| Rational64::from_integer(rng.random_range(1..4)));
                Event::ProfileSaved(
                    PriorityProfile::new(
                        format!("profile-{}", rng.random_range(0..3)),
                        w,
                        RankingMode::WeightedScalar,
                        Rational64::new(1, 2),
                        DimensionId::ALL,
                    )
                    .unwrap(),
                )
            }
        };
        store.append(event).unwrap();
    }
    store.records().to_vec()
}

/// replay(log ++ [e]) = apply(replay(log), e) at every prefix, and the
/// incremental fold ends at replay(log).
pub fn fold_equivalence(seed: u64, n: usize) -> Check {
    let log = random_log(seed, n);
    let mut rng = StdRng::seed_from_u64(seed ^ 0x5eed);
    let mut incremental = replay(&[]).map_err(|e| e.to_string())?;
    let cuts: BTreeSet<usize> = (0..25).map(|_| rng.random_range(0..log.len())).collect();
    for (i, record) in log.iter().enumerate() {
        if cuts.contains(&i) {
            let direct = replay(&log[..=i]).map_err(|e| e.to_string())?;
            let mut stepped = replay(&log[..i]).map_err(|e| e.to_string())?;
            stepped.apply(record).map_err(|e| e.to_string())?;
            if direct != stepped {
                return Err(format!("fold mismatch at seq {}", record.seq));
            }
        }
        incremental.apply(record).map_err(|e| e.to_string())?;
    }
    if incremental != replay(&log).map_err(|e| e.to_string())? {
        return Err("incremental state differs from replay".into());
    }
    Ok(())
}

/// restore(snapshot at s, tail after s) = replay(log) for random s, in
/// memory and through the data directory.
pub fn snapshot_tail(seed: u64, n: usize) -> Check {
    let log = random_log(seed, n);
    let full = replay(&log).map_err(|e| e.to_string())?;
    let mut rng = StdRng::seed_from_u64(seed ^ 0xface);
    for s in [0, log.len()].into_iter().chain((0..10).map(|_| rng.random_range(0..=log.len()))) {
        let snap = snapshot(&replay(&log[..s]).map_err(|e| e.to_string())?);
        let restored = restore(snap, &log[s..]).map_err(|e| e.to_string())?;
        if restored != full {
            return Err(format!("snapshot at {s} plus tail differs from full replay"));
        }
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let s = rng.random_range(0..=log.len());
    write_log(dir.path(), &log[..s])?;
    {
        let store = Store::open(dir.path()).map_err(|e| e.to_string())?;
        store.write_snapshot(dir.path()).map_err(|e| e.to_string())?;
    }
    write_log(dir.path(), &log)?;
    let reopened = Store::open(dir.path()).map_err(|e| e.to_string())?;
    if *reopened.state() != full {
        return Err(format!("reopening with snapshot at {s} differs from full replay"));
    }
    Ok(())
}

fn encode(log: &[EventRecord]) -> Vec<u8> {
    let mut bytes = Vec::new();
    for r in log {
        bytes.extend(serde_json::to_vec(r).unwrap());
        bytes.push(b'\n');
    }
    bytes
}

fn write_log(dir: &std::path::Path, log: &[EventRecord]) -> Check {
    std::fs::write(dir.join(LOG_FILE), encode(log)).map_err(|e| e.to_string())
}

/// Cuts the log file inside a record and checks that opening it reports
/// corruption at that line instead of dropping the torn record.
pub fn truncation_detected(seed: u64, n: usize, trials: usize) -> Check {
    let log = random_log(seed, n);
    let bytes = encode(&log);
    let boundaries: BTreeSet<usize> = bytes
        .iter()
        .enumerate()
        .filter(|(_, b)| **b == b'\n')
        .map(|(i, _)| i + 1)
        .collect();
    let mut rng = StdRng::seed_from_u64(seed ^ 0xdead);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut checked = 0;
    while checked < trials {
        let cut = rng.random_range(1..bytes.len());
        if boundaries.contains(&cut) {
            continue;
        }
        checked += 1;
        let torn_line = boundaries.range(..cut).count() + 1;
        std::fs::write(dir.path().join(LOG_FILE), &bytes[..cut]).map_err(|e| e.to_string())?;
        match Store::open(dir.path()) {
            Err(StoreError::Corrupt { line, .. }) if line == torn_line => {}
            Err(e) => return Err(format!("cut at byte {cut}: expected corruption at line {torn_line}, got {e}")),
            Ok(s) => {
                return Err(format!(
                    "cut at byte {cut}: torn log opened with {} records",
                    s.records().len()
                ))
            }
        }
        if !matches!(read_log(&bytes[..cut]), Err(StoreError::Corrupt { .. })) {
            return Err(format!("read_log accepted a log cut at byte {cut}"));
        }
    }
    // a cut exactly on a record boundary is a valid shorter log
    let last = *boundaries.range(..bytes.len()).next_back().unwrap_or(&0);
    std::fs::write(dir.path().join(LOG_FILE), &bytes[..last]).map_err(|e| e.to_string())?;
    let s = Store::open(dir.path()).map_err(|e| e.to_string())?;
    if s.records().len() != log.len() - 1 {
        return Err("boundary cut did not yield the shorter log".into());
    }
    Ok(())
}
