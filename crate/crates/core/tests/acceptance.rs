//! Acceptance runner: checks every criterion and prints one PASS/FAIL line
//! each. Runs without the libtest harness so the report stays readable.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use proptest::test_runner::{Config, TestRunner};

use qpd_core::counters::{
    a_counter, count_odd_form, count_r, is_square, odd_multiplicity_count, oracle_pd, oracle_pdk,
    pd4_closed_form,
};
use qpd_core::identities::{builtin_ledger, check_identity};
use qpd_core::qfactory::{pd_series, pdk_series};
use qpd_core::verify::{
    builtin_registry, check_conjectures, mine_congruences, recurrence_pdk_mod2, verify_claims,
    Claim, ClaimStatus, MineOptions, Verdict, VerifyOptions,
};
use qpd_core::{Parallelism, Ring};

type Outcome = Result<String, String>;

/// Id, title, time budget in seconds, check.
type Criterion = (&'static str, &'static str, u64, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn claims(ids: &[&str]) -> Vec<Claim> {
    let reg = builtin_registry();
    ids.iter()
        .map(|id| {
            reg.iter()
                .find(|c| c.id == *id)
                .cloned()
                .unwrap_or_else(|| panic!("no claim {id}"))
        })
        .collect()
}

/// Verifies claims up to `argument_max`; returns the number of instances.
fn claims_pass(ids: &[&str], argument_max: u64) -> Result<usize, String> {
    let reports =
        verify_claims(&claims(ids), VerifyOptions::new(argument_max)).map_err(|e| e.to_string())?;
    for r in &reports {
        ensure!(
            r.verdict == Verdict::Verified,
            "{} {:?} {:?}: {:?}",
            r.claim_id,
            r.params,
            r.verdict,
            r.first_failure()
        );
    }
    Ok(reports.len())
}

fn identities_pass(ids: &[&str], precision: usize) -> Result<(), String> {
    let ledger = builtin_ledger();
    for id in ids {
        let claim = ledger
            .iter()
            .find(|c| c.id == *id)
            .ok_or_else(|| format!("no identity {id}"))?;
        let report = check_identity(claim, precision).map_err(|e| e.to_string())?;
        ensure!(report.passed, "{id} fails at {:?}", report.mismatch);
    }
    Ok(())
}

fn parity(x: &BigInt) -> u64 {
    u64::from(x.is_odd())
}

fn oracle_series_equivalence() -> Outcome {
    let pd = pd_series(60, Ring::Exact).map_err(|e| e.to_string())?;
    for n in 0..=60u64 {
        ensure!(pd.coeff(n as usize) == oracle_pd(n), "PD({n}) differs");
    }
    for k in [2u64, 3, 4, 8, 9] {
        let s = pdk_series(k, 50, Ring::Exact).map_err(|e| e.to_string())?;
        for n in 0..=50u64 {
            let want = oracle_pdk(k, n).map_err(|e| e.to_string())?;
            ensure!(s.coeff(n as usize) == want, "PD_{k}({n}) differs");
        }
    }
    Ok("PD to 60, PD_k to 50 for k in {2,3,4,8,9}".into())
}

fn pd2_parity_closed_form() -> Outcome {
    let s = pdk_series(2, 5000, Ring::Mod(2)).map_err(|e| e.to_string())?;
    for n in 0..=5000u64 {
        let root = (n as f64).sqrt() as u64;
        let expected = n == 0 || (is_square(n) && !root.is_multiple_of(3));
        ensure!(
            (s.residue(n as usize, 2) == 1) == expected,
            "PD_2({n}) parity"
        );
    }
    claims_pass(&["K-11"], 5000)?;
    Ok("n <= 5000".into())
}

fn pd_power_of_two_parity() -> Outcome {
    for l in 1..=5u32 {
        let s = pdk_series(1 << l, 1000, Ring::Mod(2)).map_err(|e| e.to_string())?;
        let table = a_counter(l)
            .map_err(|e| e.to_string())?
            .table(1000, Parallelism::default());
        for (n, count) in table.iter().enumerate() {
            ensure!(
                s.residue(n, 2) == count % 2,
                "PD_{}({n}) vs count_a",
                1u64 << l
            );
        }
    }
    Ok("l <= 5, n <= 1000".into())
}

fn power_of_two_families() -> Outcome {
    let n = claims_pass(
        &[
            "C-33a", "C-33b", "C-34", "C-36a", "C-36b", "C-36c", "C-36", "K-32", "K-34",
        ],
        4000,
    )?;
    Ok(format!("{n} instances to argument 4000"))
}

fn odd_multiplicity_parity() -> Outcome {
    for n in 0..=60u64 {
        ensure!(
            parity(&oracle_pd(n)) == parity(&odd_multiplicity_count(n)),
            "PD({n}) vs b_{n}"
        );
    }
    identities_pass(&["ID-OM"], 2000)?;
    claims_pass(&["K-37"], 2000)?;
    Ok("oracle to 60, series to 2000".into())
}

fn pd4_counter_closed_form() -> Outcome {
    let table = a_counter(2)
        .map_err(|e| e.to_string())?
        .table(20_000, Parallelism::default());
    for (n, &count) in table.iter().enumerate() {
        ensure!(count % 2 == u64::from(pd4_closed_form(n as u64)), "n = {n}");
    }
    Ok("n <= 20000".into())
}

fn parity_recurrence() -> Outcome {
    for k in [2u64, 3, 4, 5, 7, 8, 9] {
        let bits = recurrence_pdk_mod2(k, 3000).map_err(|e| e.to_string())?;
        let s = pdk_series(k, 3000, Ring::Mod(2)).map_err(|e| e.to_string())?;
        for (n, &b) in bits.iter().enumerate() {
            ensure!(u64::from(b) == s.residue(n, 2), "k = {k}, n = {n}");
        }
    }
    let start = Instant::now();
    let bits = recurrence_pdk_mod2(3, 1_000_000).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure!(bits.len() == 1_000_001, "recurrence length {}", bits.len());
    ensure!(took < Duration::from_secs(60), "10^6 terms took {took:?}");
    Ok(format!(
        "k in {{2,3,4,5,7,8,9}} to 3000; 10^6 terms in {:.1} s",
        took.as_secs_f64()
    ))
}

fn pd2_mod4_suite() -> Outcome {
    claims_pass(&["K-62"], 1000)?;
    claims_pass(&["K-64"], 2001)?;
    identities_pass(
        &["ID-L63", "ID-65a", "ID-65b", "ID-67", "ID-64", "ID-66"],
        1000,
    )?;
    claims_pass(&["C-66a", "C-66b"], 3000)?;
    Ok("counters to 1000, identities at N = 1000, families to 3000".into())
}

fn theta_identity_suite() -> Outcome {
    let ids = [
        "ID-71",
        "ID-71a",
        "ID-D4",
        "ID-RR0",
        "ID-RR1",
        "ID-RR2",
        "ID-RR3",
        "ID-RR4",
        "ID-B1",
        "ID-B1-exact",
        "ID-B1-phi",
        "ID-B2a",
        "ID-B2b",
        "ID-PHI",
        "ID-PSI",
        "ID-PHI-ETA",
        "ID-PSI-ETA",
        "ID-PSI2",
        "ID-JTP-1",
        "ID-JTP-2",
        "ID-JTP-3",
    ];
    identities_pass(&ids, 500)?;
    Ok(format!("{} identities at N = 500", ids.len()))
}

fn power_of_three_suite() -> Outcome {
    claims_pass(&["K-82", "K-83"], 800)?;
    claims_pass(&["K-87"], 1500)?;
    claims_pass(&["K-12", "K-84"], 2000)?;
    let n = claims_pass(
        &["C-85a", "C-85b", "C-86a", "C-86b", "C-86c", "C-810"],
        3000,
    )?;
    for m in 1..=2000u64 {
        let r = count_r(m).map_err(|e| e.to_string())?;
        ensure!(
            r == count_odd_form(m),
            "count_r({m}) != count_odd_form({m})"
        );
    }
    Ok(format!(
        "{n} family instances to 3000, count equality to 2000"
    ))
}

fn conjectures_and_miner() -> Outcome {
    let reports = check_conjectures(&builtin_registry(), VerifyOptions::new(3000))
        .map_err(|e| e.to_string())?;
    ensure!(
        reports.len() == 9,
        "expected 9 conjecture instances, got {}",
        reports.len()
    );
    for r in &reports {
        ensure!(
            r.status == ClaimStatus::Conjectural,
            "{} not labelled conjectural",
            r.claim_id
        );
        ensure!(
            r.verdict == Verdict::Consistent,
            "{} {:?}: {:?}",
            r.claim_id,
            r.params,
            r.verdict
        );
    }
    let registry = builtin_registry();
    let searches = [
        (
            2u64,
            4u64,
            48u64,
            vec![(16u64, 12u64), (24, 20), (25, 5), (32, 24), (48, 26)],
        ),
        (9, 3, 54, vec![(54, 15), (54, 33), (54, 45), (54, 51)]),
    ];
    for (k, m, a_max, wanted) in searches {
        let cands = mine_congruences(&MineOptions::new(k, m, a_max, 3000), &registry)
            .map_err(|e| e.to_string())?;
        for (a, r) in wanted {
            let hit = cands.iter().find(|c| c.step == a && c.r == r);
            ensure!(hit.is_some(), "miner missed PD_{k}({a}n+{r}) mod {m}");
            ensure!(
                hit.unwrap().support >= 20,
                "support too small for ({a}, {r})"
            );
        }
    }
    Ok("9 instances consistent to 3000; miner finds all six families".into())
}

fn fail<T: std::fmt::Debug>(name: &str, e: proptest::test_runner::TestError<T>) -> String {
    format!("{name}: {e}")
}

fn property_suites() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: 128,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&common::coeff_triple(), |(a, b, c)| {
            common::ring_axioms(&a, &b, &c, None)?;
            common::ring_axioms(&a, &b, &c, Some(4))
        })
        .map_err(|e| fail("ring axioms", e))?;
    runner
        .run(&common::coeff_triple(), |(a, _, _)| {
            common::inverse_property(&a, None)?;
            common::inverse_property(&a, Some(9))
        })
        .map_err(|e| fail("inverse", e))?;
    runner
        .run(&(common::coeff_triple(), 1u64..5), |((a, b, _), k)| {
            common::substitution_morphism(&a, &b, k, Some(4))
        })
        .map_err(|e| fail("substitution", e))?;
    runner
        .run(&(common::coeff_triple(), 1u64..6), |((a, _, _), step)| {
            common::progression_interleave(&a, step)
        })
        .map_err(|e| fail("dissection", e))?;
    runner
        .run(&(-10_000i64..10_000, -10_000i64..10_000), |(a, b)| {
            common::psi_property(a, b)
        })
        .map_err(|e| fail("psi", e))?;
    runner
        .run(&common::any_expr(), |e| common::parser_round_trip(&e))
        .map_err(|e| fail("parser round trip", e))?;
    runner
        .run(&(common::ring_expr(), common::ring_expr()), |(a, b)| {
            common::evaluation_homomorphism(&a, &b, Some(4))
        })
        .map_err(|e| fail("evaluation", e))?;
    for p in [2, 3] {
        for k in 1..=6 {
            common::frobenius(p, k, 200).map_err(|e| format!("frobenius p={p} k={k}: {e}"))?;
        }
    }
    for j in 3..=8 {
        common::residue_sets(j).map_err(|e| format!("residues j={j}: {e}"))?;
    }
    Ok(
        "ring, inverse, substitution, dissection, psi, parser, evaluation, frobenius, residues"
            .into(),
    )
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let criteria: [Criterion; 12] = [
        (
            "AC-1",
            "oracle and series agree",
            30,
            oracle_series_equivalence,
        ),
        ("AC-2", "PD_2 parity closed form", 5, pd2_parity_closed_form),
        (
            "AC-3",
            "PD_{2^l} parity against count_a",
            60,
            pd_power_of_two_parity,
        ),
        (
            "AC-4",
            "power-of-two congruence families",
            60,
            power_of_two_families,
        ),
        (
            "AC-5",
            "PD parity against odd multiplicities",
            30,
            odd_multiplicity_parity,
        ),
        (
            "AC-6",
            "PD_4 parity closed form from counters",
            30,
            pd4_counter_closed_form,
        ),
        ("AC-7", "parity recurrence", 60, parity_recurrence),
        ("AC-8", "PD_2 modulo 4 suite", 60, pd2_mod4_suite),
        ("AC-9", "theta identity suite", 60, theta_identity_suite),
        ("AC-10", "powers of three suite", 120, power_of_three_suite),
        ("AC-11", "conjectures and miner", 120, conjectures_and_miner),
        ("AC-12", "property suites", 120, property_suites),
    ];
    let mut failed = 0;
    for (id, title, budget, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        let outcome = match outcome {
            Ok(_) if secs > budget as f64 => Err(format!("over the {budget} s budget")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("{id:<6} PASS {secs:>7.2}s  {title}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("{id:<6} FAIL {secs:>7.2}s  {title}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", 12 - failed, 12);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
