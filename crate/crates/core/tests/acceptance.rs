//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if
//! any criterion fails.
//!
//! Runs without the libtest harness: one sequential pass, so the timing
//! criterion never shares the machine with the exhaustive checks, and the
//! report is printed even when everything passes.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use forestnull::generate::{self, SampleNonzero, Shape};
use forestnull::oracle::{in_span, same_span};
use forestnull::{kernel, rank, scalation};
use forestnull::{AcyclicMatrix, Basis, Field, Forest, Oracle, PrimeField, Rationals};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const P: u64 = 1_000_003;

/// Failure messages per criterion, first few kept.
#[derive(Default)]
struct Tally {
    checked: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn report(id: usize, title: &str, t: &Tally, detail: &str) -> bool {
    let status = if t.passed() { "PASS" } else { "FAIL" };
    println!(
        "criterion {id}: {status} {title} ({} checks{detail})",
        t.checked
    );
    for f in t.failures.iter().take(5) {
        println!("    {f}");
    }
    t.passed()
}

fn describe<F: Field>(m: &AcyclicMatrix<F>) -> String {
    format!(
        "{} n={} edges={:?}",
        m.field().spec(),
        m.n(),
        m.pattern().edges()
    )
}

/// Criteria 1, 2, 3, 6 and 7 share their instances.
#[derive(Default)]
struct Shared {
    c1: Tally,
    c2: Tally,
    c3: Tally,
    c6: Tally,
    c7: Tally,
}

fn shared_checks<F: Field>(m: &AcyclicMatrix<F>, oracle: &Oracle, s: &mut Shared) {
    let f = m.field();
    let forest = m.pattern();
    let n = m.n();
    let tag = || describe(m);

    let basis = scalation::null_basis(m);
    let dense = oracle.dense_null_space(m).unwrap();
    let annihilated = basis.vectors().iter().all(|x| m.annihilates(x).unwrap());
    s.c1.check(annihilated, || format!("M x != 0 for {}", tag()));
    s.c1.check(same_span(f, &basis, &dense).unwrap(), || {
        format!("span differs for {}", tag())
    });

    let nu = oracle.matching_number(forest);
    s.c2.check(basis.dimension() == n - 2 * nu, || {
        format!("dim null != n - 2nu for {}", tag())
    });
    s.c2.check(oracle.rank(m).unwrap() == 2 * nu, || {
        format!("rank != 2nu for {}", tag())
    });
    s.c2.check(kernel::maximum_matching(forest).nu == nu, || {
        format!("nu differs for {}", tag())
    });

    let supp = kernel::support(forest);
    s.c3.check(supp.supp == oracle.dense_null_support(m).unwrap(), || {
        format!("supp != dense support for {}", tag())
    });
    s.c3.check(
        supp.supp == oracle.support_by_matching(forest).unwrap(),
        || format!("supp != matching-deletion support for {}", tag()),
    );
    let independent = forest
        .edges()
        .iter()
        .all(|&(a, b)| !(supp.contains(a) && supp.contains(b)));
    s.c3.check(independent, || {
        format!("supp not independent for {}", tag())
    });
    s.c3.check(supp.supp.len() - supp.core.len() == n - 2 * nu, || {
        format!("|supp| - |core| != n - 2nu for {}", tag())
    });

    let rows = oracle.dense_row_space(m).unwrap();
    s.c6.check(same_span(f, &rank::rank_basis(m), &rows).unwrap(), || {
        format!("rank basis span differs for {}", tag())
    });
    let r = rank::rank_normalization(m);
    let adjacency = AcyclicMatrix::adjacency(f.clone(), forest);
    let carried = rank::rank_basis(&adjacency)
        .into_vectors()
        .into_iter()
        .map(|b| r.apply(f, &b).unwrap())
        .collect();
    s.c6.check(
        same_span(f, &Basis::new(n, carried), &rows).unwrap(),
        || format!("R^M Rank(A(F)) != Rank(M) for {}", tag()),
    );

    for x in dense.vectors() {
        s.c7.check(scalation::restriction_check(m, x).unwrap(), || {
            format!("restriction fails for {}", tag())
        });
    }
}

fn shared_instances(oracle: &Oracle) -> Shared {
    let mut s = Shared::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let q = Rationals;
    let gf = PrimeField::new(P).unwrap();
    for n in 1..=9 {
        for edges in generate::nonisomorphic_trees(n) {
            let forest = Forest::new(n, &edges).unwrap();
            shared_checks(
                &generate::random_values(q, &forest, &mut rng),
                oracle,
                &mut s,
            );
            shared_checks(
                &generate::random_values(gf, &forest, &mut rng),
                oracle,
                &mut s,
            );
        }
    }
    for seed in 0..500u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let n = rng.random_range(1..=200);
        let shape = if seed % 2 == 0 {
            Shape::Tree
        } else {
            Shape::Forest(rng.random_range(1..=n.min(8)))
        };
        let forest = generate::random_forest(n, shape, &mut rng).unwrap();
        shared_checks(
            &generate::random_values(q, &forest, &mut rng),
            oracle,
            &mut s,
        );
        shared_checks(
            &generate::random_values(gf, &forest, &mut rng),
            oracle,
            &mut s,
        );
    }
    s
}

fn support_by_mis(oracle: &Oracle, t: &mut Tally) {
    for n in 1..=12 {
        for forest in generate::nonisomorphic_forests(n) {
            let supp = kernel::support(&forest).supp;
            t.check(supp == oracle.support_by_mis(&forest).unwrap(), || {
                format!(
                    "supp != MIS intersection for n={n} edges={:?}",
                    forest.edges()
                )
            });
        }
    }
}

fn relabel(n: usize, edges: &[(usize, usize)], rng: &mut ChaCha8Rng) -> Forest {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let edges: Vec<_> = edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
    Forest::new(n, &edges).unwrap()
}

fn sparsest_on(forest: &Forest, oracle: &Oracle, rng: &mut ChaCha8Rng, t: &mut Tally) {
    let q = Rationals;
    let tag = || format!("n={} edges={:?}", forest.vertex_count(), forest.edges());
    let basis = kernel::sparsest_null_basis(&q, forest);
    let minimum = oracle
        .min_support_total(&AcyclicMatrix::adjacency(q, forest))
        .unwrap();
    t.check(basis.total_nonzeros() == minimum, || {
        format!(
            "total {} != minimum {minimum} for {}",
            basis.total_nonzeros(),
            tag()
        )
    });
    let unit = basis
        .vectors()
        .iter()
        .flat_map(|v| v.entries())
        .all(|(_, x)| q.is_one(x) || q.is_one(&q.neg(x)));
    t.check(unit, || format!("entry outside {{-1, 0, 1}} for {}", tag()));
    for m in [
        supports(&generate::random_values(q, forest, rng)),
        supports(&generate::random_values(
            PrimeField::new(P).unwrap(),
            forest,
            rng,
        )),
    ] {
        let expected: Vec<Vec<usize>> = basis.vectors().iter().map(|v| v.support()).collect();
        t.check(m == expected, || {
            format!("null_basis supports differ for {}", tag())
        });
    }
}

fn supports<F: Field>(m: &AcyclicMatrix<F>) -> Vec<Vec<usize>> {
    scalation::null_basis(m)
        .vectors()
        .iter()
        .map(|v| v.support())
        .collect()
}

fn sparsest(oracle: &Oracle, t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 1..=7 {
        for edges in generate::labeled_trees(n) {
            sparsest_on(&Forest::new(n, &edges).unwrap(), oracle, &mut rng, t);
        }
    }
    // n = 8: every isomorphism class under a dozen random labelings.
    for n in [8] {
        for edges in generate::nonisomorphic_trees(n) {
            sparsest_on(&Forest::new(n, &edges).unwrap(), oracle, &mut rng, t);
            for _ in 0..12 {
                sparsest_on(&relabel(n, &edges, &mut rng), oracle, &mut rng, t);
            }
        }
    }
}

fn transfer_pair<F: SampleNonzero>(field: F, seed: u64, oracle: &Oracle, t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=100);
    let shape = if seed.is_multiple_of(3) {
        Shape::Forest(rng.random_range(1..=n.min(5)))
    } else {
        Shape::Tree
    };
    let forest = generate::random_forest(n, shape, &mut rng).unwrap();
    let m = generate::random_values(field.clone(), &forest, &mut rng);
    let other = generate::random_values(field.clone(), &forest, &mut rng);
    let tag = || format!("seed {seed}: {}", describe(&m));

    let null_m = oracle.dense_null_space(&m).unwrap();
    let null_n = oracle.dense_null_space(&other).unwrap();
    let mut images = Vec::new();
    for x in null_m.vectors() {
        let y = scalation::transfer_null(&m, &other, x).unwrap();
        t.check(other.annihilates(&y).unwrap(), || {
            format!("null image not in Null(N), {}", tag())
        });
        t.check(
            scalation::transfer_null(&other, &m, &y).unwrap() == *x,
            || format!("null round trip, {}", tag()),
        );
        images.push(y);
    }
    t.check(
        same_span(&field, &Basis::new(n, images), &null_n).unwrap(),
        || format!("null images do not span Null(N), {}", tag()),
    );

    let rows_m = oracle.dense_row_space(&m).unwrap();
    let rows_n = oracle.dense_row_space(&other).unwrap();
    let mut images = Vec::new();
    for x in rows_m.vectors() {
        let y = rank::transfer_rank(&m, &other, x).unwrap();
        t.check(in_span(&field, &rows_n, &y), || {
            format!("row image not in Rank(N), {}", tag())
        });
        t.check(rank::transfer_rank(&other, &m, &y).unwrap() == *x, || {
            format!("row round trip, {}", tag())
        });
        images.push(y);
    }
    t.check(
        same_span(&field, &Basis::new(n, images), &rows_n).unwrap(),
        || format!("row images do not span Rank(N), {}", tag()),
    );
}

fn transfers(oracle: &Oracle, t: &mut Tally) {
    for seed in 0..200u64 {
        if seed % 2 == 0 {
            transfer_pair(Rationals, 5000 + seed, oracle, t);
        } else {
            transfer_pair(PrimeField::new(P).unwrap(), 5000 + seed, oracle, t);
        }
    }
}

fn p3_row_reading(oracle: &Oracle, t: &mut Tally) {
    let q = Rationals;
    let m = AcyclicMatrix::from_entries(
        q,
        3,
        vec![
            (0, 1, q.integer(2)),
            (1, 0, q.integer(3)),
            (1, 2, q.integer(5)),
            (2, 1, q.integer(7)),
        ],
    )
    .unwrap();
    let basis = rank::rank_basis(&m);
    t.check(
        same_span(&q, &basis, &oracle.dense_row_space(&m).unwrap()).unwrap(),
        || "B(M_P3) does not span the row space".into(),
    );
    t.check(
        !same_span(&q, &basis, &oracle.dense_column_space(&m).unwrap()).unwrap(),
        || "B(M_P3) spans the column space".into(),
    );
}

fn median(mut xs: Vec<Duration>) -> Duration {
    xs.sort();
    xs[xs.len() / 2]
}

fn timing(t: &mut Tally) -> String {
    const REPEAT: usize = 7;
    let gf = PrimeField::new(P).unwrap();
    let sizes: Vec<usize> = (15..=18).map(|k| 1 << k).collect();
    let matrices: Vec<_> = sizes
        .iter()
        .map(|&n| generate::gen_random(gf, n, 1, Shape::Tree).unwrap())
        .collect();
    // Warm up allocator and caches.
    for m in &matrices {
        std::hint::black_box(scalation::null_basis(m));
    }
    let medians: Vec<Duration> = matrices
        .iter()
        .map(|m| {
            median(
                (0..REPEAT)
                    .map(|_| {
                        let start = Instant::now();
                        std::hint::black_box(scalation::null_basis(m));
                        start.elapsed()
                    })
                    .collect(),
            )
        })
        .collect();
    let mut detail = String::new();
    for (i, (n, d)) in sizes.iter().zip(&medians).enumerate() {
        detail.push_str(&format!("; n={n} median {:.2} ms", d.as_secs_f64() * 1e3));
        if i > 0 {
            let ratio = d.as_secs_f64() / medians[i - 1].as_secs_f64();
            detail.push_str(&format!(" ratio {ratio:.2}"));
            t.check(ratio <= 2.5, || {
                format!("t({n}) / t({}) = {ratio:.3} > 2.5", sizes[i - 1])
            });
        }
    }
    let last = *medians.last().unwrap();
    t.check(last < Duration::from_secs(5), || {
        format!("n = 2^18 took {last:?}")
    });
    detail
}

fn run(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_forestnull"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn determinism(t: &mut Tally) {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();
    for (field, shape) in [
        ("rational", "tree"),
        ("gf:1000003", "forest:4"),
        ("gf:7", "tree"),
    ] {
        let file = path(&format!("m-{}.mtx", field.replace(':', "")));
        let gen = [
            "--field", field, "gen", "--n", "300", "--seed", "9", "--shape", shape,
        ];
        let (code, first) = run(&gen);
        t.check(code == 0, || format!("gen exited {code}"));
        t.check(run(&gen) == (0, first.clone()), || {
            format!("gen differs across runs for {field}")
        });
        std::fs::write(&file, &first).unwrap();
        let queries: [&[&str]; 6] = [
            &["null-basis", &file, "--format", "json"],
            &["null-basis", &file, "--format", "mm"],
            &["rank-basis", &file, "--format", "json"],
            &["rank-basis", &file, "--format", "mm"],
            &["support", &file, "--json"],
            &["support", &file],
        ];
        for q in queries {
            let a = run(q);
            let b = run(q);
            t.check(a.0 == 0 && a == b, || {
                format!("{q:?} not reproducible for {field}")
            });
        }
    }
    let m = generate::gen_random(PrimeField::new(P).unwrap(), 5000, 3, Shape::Forest(7)).unwrap();
    t.check(
        scalation::null_basis(&m) == scalation::null_basis(&m),
        || "null_basis differs".into(),
    );
    t.check(rank::rank_basis(&m) == rank::rank_basis(&m), || {
        "rank_basis differs".into()
    });
}

fn guarded(id: usize, t: &mut Tally, body: impl FnOnce(&mut Tally)) {
    if let Err(e) = catch_unwind(AssertUnwindSafe(|| body(t))) {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        t.failures.push(format!("criterion {id} panicked: {msg}"));
    }
}

fn main() -> ExitCode {
    let oracle = Oracle::default();
    let started = Instant::now();

    // Time first, on a quiet heap.
    let mut c8 = Tally::default();
    let mut timing_detail = String::new();
    guarded(8, &mut c8, |t| timing_detail = timing(t));

    let mut shared = Shared::default();
    let mut panicked = Tally::default();
    guarded(1, &mut panicked, |_| shared = shared_instances(&oracle));
    let shared_time = started.elapsed();
    shared.c1.failures.extend(panicked.failures);

    let mut c3_mis = Tally::default();
    guarded(3, &mut c3_mis, |t| support_by_mis(&oracle, t));
    shared.c3.checked += c3_mis.checked;
    shared.c3.failures.extend(c3_mis.failures);

    let mut c4 = Tally::default();
    guarded(4, &mut c4, |t| sparsest(&oracle, t));
    let mut c5 = Tally::default();
    guarded(5, &mut c5, |t| transfers(&oracle, t));
    let mut p3 = Tally::default();
    guarded(6, &mut p3, |t| p3_row_reading(&oracle, t));
    shared.c6.checked += p3.checked;
    shared.c6.failures.extend(p3.failures);
    let mut c9 = Tally::default();
    guarded(9, &mut c9, determinism);

    let results = [
        report(
            1,
            "null_basis annihilates and spans the dense null space",
            &shared.c1,
            &format!("; {shared_time:.1?}"),
        ),
        report(2, "dim null = n - 2nu and rank = 2nu", &shared.c2, ""),
        report(3, "support laws", &shared.c3, ""),
        report(
            4,
            "sparsest basis total equals the brute-force minimum",
            &c4,
            "",
        ),
        report(5, "null and row space transfers", &c5, ""),
        report(6, "row space structure", &shared.c6, ""),
        report(7, "null vectors vanish off the S-set", &shared.c7, ""),
        report(
            8,
            "linear scaling of null_basis over GF(1000003)",
            &c8,
            &timing_detail,
        ),
        report(9, "byte-identical repeated runs", &c9, ""),
    ];
    println!("acceptance total {:.1?}", started.elapsed());
    let failed: Vec<usize> = (1..=9).filter(|&i| !results[i - 1]).collect();
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
