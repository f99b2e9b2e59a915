//! Cross-module properties checked against the independent oracles.

mod common;

use vgc_core::{
    build_chain, comet, count_partitions, enumerate_partitions, find_witness, gkc, scanner,
    GkcKind, IPrimeSet, PrimeTable, ScanOptions,
};

fn chain(limit: u64, max_order: u32) -> Vec<IPrimeSet> {
    let t = PrimeTable::sieve(limit).unwrap();
    build_chain(&t, max_order, limit).unwrap()
}

#[test]
fn sieve_counts_match_oracle() {
    let big = PrimeTable::sieve(10_000).unwrap();
    let mut oracle_count = 0u64;
    for n in 2..=10_000u64 {
        if common::naive_is_prime(n) {
            oracle_count += 1;
        }
        let table_count = big.primes().partition_point(|&p| p <= n) as u64;
        assert_eq!(table_count, oracle_count, "pi({n})");
    }
    // spot-resieve a few bounds to tie the prefix view to real sieve calls
    for limit in [2u64, 97, 1_000, 4_999, 10_000] {
        let t = PrimeTable::sieve(limit).unwrap();
        assert_eq!(
            t.count(),
            big.primes().partition_point(|&p| p <= limit) as u64
        );
    }
}

#[test]
fn sieve_count_at_a_million_matches_miller_rabin() {
    let t = PrimeTable::sieve(1_000_000).unwrap();
    assert_eq!(t.count(), common::mr_prime_count(1_000_000));
    assert_eq!(t.count(), 78_498);
}

#[test]
fn iprime_sets_match_index_chain_oracle() {
    let c = chain(100_000, 3);
    for order in 0..=3u32 {
        let expected = common::index_chain_set(100_000, order);
        assert_eq!(
            c[order as usize].elements(),
            expected.as_slice(),
            "order {order}"
        );
    }
}

#[test]
fn iprime_nesting_holds_to_a_million() {
    let c = chain(1_000_000, 8);
    for pair in c.windows(2) {
        let (outer, inner) = (&pair[0], &pair[1]);
        let mut cursor = outer.elements().iter();
        for &m in inner.elements() {
            assert!(
                cursor.any(|&o| o == m),
                "order {} element {m} missing from order {}",
                inner.order(),
                outer.order()
            );
        }
    }
}

#[test]
fn partition_counts_match_brute_force() {
    let c = chain(4_200, 2);
    for n in 2..=2_000u64 {
        for a in 0..=2usize {
            for b in 0..=a {
                let brute = common::brute_partitions(2 * n, c[a].elements(), c[b].elements());
                let m = enumerate_partitions(n, &c[a], &c[b]).unwrap();
                let rows: std::collections::BTreeSet<(u64, u64)> = m
                    .rows()
                    .iter()
                    .map(|&(u, v)| (u.max(v), u.min(v)))
                    .collect();
                assert_eq!(rows.len(), m.rows().len(), "dedup at n={n} ({a},{b})");
                assert_eq!(rows, brute, "n={n} ({a},{b})");
                assert_eq!(
                    count_partitions(n, &c[a], &c[b]).unwrap(),
                    brute.len() as u64
                );
            }
        }
    }
}

#[test]
fn witness_agrees_with_enumeration_to_5000() {
    let c = chain(10_100, 2);
    for n in 2..=5_000u64 {
        for a in 0..=2usize {
            for b in 0..=a {
                let m = enumerate_partitions(n, &c[a], &c[b]).unwrap();
                let w = find_witness(n, &c[a], &c[b]).unwrap();
                match m.rows().first() {
                    Some(&first) => assert_eq!(w, Some(first), "n={n} ({a},{b})"),
                    None => assert_eq!(w, None, "n={n} ({a},{b})"),
                }
            }
        }
    }
}

#[test]
fn g_is_monotone_under_set_inclusion_to_5000() {
    let c = chain(10_100, 2);
    let pairs = [(0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (2, 2)];
    for n in 2..=5_000u64 {
        let g: Vec<u64> = pairs
            .iter()
            .map(|&(a, b)| count_partitions(n, &c[a as usize], &c[b as usize]).unwrap())
            .collect();
        for (i, &(a, b)) in pairs.iter().enumerate() {
            for (j, &(cc, d)) in pairs.iter().enumerate() {
                if a >= cc && b >= d {
                    assert!(
                        g[i] <= g[j],
                        "n={n}: g({a},{b})={} > g({cc},{d})={}",
                        g[i],
                        g[j]
                    );
                }
            }
        }
    }
}

#[test]
fn witness_exists_above_the_verified_limit_for_2_0() {
    let c = chain(20_100, 2);
    for n in 2_565..=10_000u64 {
        assert!(
            find_witness(n, &c[2], &c[0]).unwrap().is_some(),
            "n={n} should decompose for (2,0)"
        );
    }
}

#[test]
fn scan_reports_identical_across_worker_counts() {
    let c = chain(200_000, 1);
    let mut reports = Vec::new();
    for workers in [1usize, 2, 4] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .unwrap();
        let r = pool
            .install(|| scanner::scan(1, 1, 200_000, &c))
            .unwrap();
        reports.push(r);
    }
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[1], reports[2]);
}

#[test]
fn scan_exceptions_verified_by_witness_search() {
    let c = chain(50_000, 2);
    let r = scanner::scan(2, 1, 50_000, &c).unwrap();
    for &e in &r.exceptions {
        assert_eq!(find_witness(e / 2, &c[2], &c[1]).unwrap(), None, "2n={e}");
    }
    // and a sample of non-exceptions all decompose
    let mut idx = 0usize;
    for two_n in (4..=50_000u64).step_by(1_234) {
        while idx < r.exceptions.len() && r.exceptions[idx] < two_n {
            idx += 1;
        }
        if r.exceptions.get(idx) != Some(&two_n) {
            assert!(find_witness(two_n / 2, &c[2], &c[1]).unwrap().is_some());
        }
    }
}

#[test]
fn variant_witnesses_are_goldbach_rows() {
    let t = PrimeTable::sieve(100_000).unwrap();
    for two_n in (4..=100_000u64).step_by(2) {
        for kind in GkcKind::ALL {
            if let Some((p, q)) = gkc::check(kind, two_n, &t).unwrap() {
                assert_eq!(p + q, two_n);
                assert!(t.is_prime(p).unwrap() && t.is_prime(q).unwrap());
                if kind.distinct_required() {
                    assert_ne!(p, q);
                }
                // a distinct witness is a non-redundant partition row
                if p != q {
                    let (u, v) = (p.max(q), p.min(q));
                    assert!(u > two_n / 2 && v < two_n / 2);
                }
            }
        }
    }
}

#[test]
fn variant_scans_match_per_n_checks() {
    let t = PrimeTable::sieve(4_000).unwrap();
    for kind in GkcKind::ALL {
        let r = gkc::scan_variant(kind, 4_000, &t).unwrap();
        let mut expected = Vec::new();
        for two_n in (2..=4_000u64).step_by(2) {
            let absent = if two_n < 4 {
                true
            } else {
                gkc::check(kind, two_n, &t).unwrap().is_none()
            };
            if absent {
                expected.push(two_n);
            }
        }
        assert_eq!(r.exceptions, expected, "{kind}");
    }
}

#[test]
fn variant_checkpoint_resume_equivalence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gkc.vgck");
    let t = PrimeTable::sieve(100_000).unwrap();
    let opts = ScanOptions {
        chunk_evens: 1_000,
        checkpoint_path: Some(path.clone()),
    };
    gkc::scan_variant_with(GkcKind::NtGkc, 30_000, &t, &opts, |_| {}).unwrap();
    let resumed =
        gkc::resume_scan_variant(&path, GkcKind::NtGkc, 100_000, &t, &opts, |_| {}).unwrap();
    let direct = gkc::scan_variant(GkcKind::NtGkc, 100_000, &t).unwrap();
    assert_eq!(resumed, direct);

    // wrong variant is rejected
    assert!(matches!(
        gkc::resume_scan_variant(&path, GkcKind::Gkrc, 100_000, &t, &opts, |_| {}),
        Err(vgc_core::Error::CheckpointMismatch { .. })
    ));
}

#[test]
fn comet_series_deterministic_across_worker_counts() {
    let c = chain(4_000, 2);
    let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let s1 = pool1.install(|| comet::g_series(2, 0, 3, 1_800, &c)).unwrap();
    let s4 = pool4.install(|| comet::g_series(2, 0, 3, 1_800, &c)).unwrap();
    assert_eq!(s1, s4);
}
