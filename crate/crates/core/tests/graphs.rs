//! Graph sets for grades 2 and 3 on one and two subsystems, compared against
//! stored DOT files. Set `LUINV_BLESS=1` to rewrite them.

use std::path::PathBuf;

use luinv_core::contract::{eval_mixed, eval_pure, relative_error};
use luinv_core::invgraph::{build_graph, canonical_graph, connected_components, dot_export};
use luinv_core::perm::{enumerate_orbits, sim_decompose};
use luinv_core::states::{random_pure, rng_from_seed, DensityMatrix, Dims};

fn graph_set(m: usize) -> String {
    let mut out = String::new();
    for k in 1..=2 {
        for label in enumerate_orbits(m, k - 1).unwrap() {
            for member in sim_decompose(label.rep()).unwrap().members {
                out.push_str(&format!("// m={m} k={k} pure label {label}\n"));
                out.push_str(&dot_export(&build_graph(member.rep()), &["black", "red"]));
            }
        }
    }
    out
}

fn check_golden(name: &str, text: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    if std::env::var_os("LUINV_BLESS").is_some() {
        std::fs::write(&path, text).unwrap();
    }
    let stored = std::fs::read_to_string(&path).unwrap();
    assert_eq!(stored, text, "{name} differs from the stored file");
}

#[test]
fn grade_two_graph_set() {
    let text = graph_set(2);
    assert_eq!(text.matches("digraph").count(), 2 + 4);
    check_golden("grade2_k1_k2.dot", &text);
}

#[test]
fn grade_three_graph_set() {
    let text = graph_set(3);
    assert_eq!(text.matches("digraph").count(), 3 + 11);
    check_golden("grade3_k1_k2.dot", &text);
}

#[test]
fn writings_have_distinct_graphs_and_equal_values() {
    for m in 1..=3 {
        for k in 1..=3 {
            let dims = Dims::new(vec![2; k]).unwrap();
            let psi = random_pure(&dims, (10 * m + k) as u64);
            let pi = psi.projector();
            for label in enumerate_orbits(m, k - 1).unwrap() {
                let members = sim_decompose(label.rep()).unwrap().members;
                let graphs: std::collections::BTreeSet<_> = members
                    .iter()
                    .map(|c| canonical_graph(&build_graph(c.rep())).unwrap())
                    .collect();
                assert_eq!(graphs.len(), members.len());
                let want = eval_pure(label.rep(), &psi).unwrap();
                for c in &members {
                    let got = eval_mixed(c.rep(), &pi).unwrap();
                    assert!(relative_error(got, want) < 1e-10, "{label} via {c}");
                }
            }
        }
    }
}

#[test]
fn invariants_factor_over_components() {
    let mut rng = rng_from_seed(77);
    let rho = DensityMatrix::random(&Dims::new(vec![2, 2]).unwrap(), 4, &mut rng);
    for m in 1..=4 {
        for label in enumerate_orbits(m, 2).unwrap() {
            let whole = eval_mixed(label.rep(), &rho).unwrap();
            let product = connected_components(&build_graph(label.rep()))
                .iter()
                .map(|c| eval_mixed(&c.graph.to_tuple(), &rho).unwrap())
                .product();
            assert!(relative_error(whole, product) < 1e-10, "{label}");
        }
    }
}
