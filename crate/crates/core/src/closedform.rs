//! Index-free evaluators for grades 1, 2 and 3.
//!
//! Grade 2: `Tr(Tr_{j: σ_j = e} X)²`.
//! Grade 3: `Tr ∏_τ (𝕀_{j: σ_j = τ} ⊗ Tr_{j: σ_j ∈ {τ, e}} X^{T_{j: σ_j = s²}})`
//! over the three transpositions, taken left to right in order of their fixed
//! point: `ts` (fixes 1), `ts²` (fixes 2), `t` (fixes 3).
//!
//! Pure-state versions use `X = |ψ⟩⟨ψ|` and the label `(σ₁,…,σ_{k-1}, e)`,
//! which puts the last subsystem in every trace set.

use crate::contract::Kind;
use crate::error::{Error, Result};
use crate::formula::{Formula, MatExpr};
use crate::perm::{sim_decompose, OrbitLabel, Perm, PermTuple};
use crate::states::{DensityMatrix, Dims, PureState, SubsystemSet, C64};

/// The three transpositions of `S₃`, in the order their factors are
/// multiplied. With `(ab)(l) = a(b(l))` the fixed points are 1, 2, 3.
pub const M3_ORDER: [&str; 3] = ["ts", "ts2", "t"];

fn check_pure_arity(sigma: &PermTuple, psi: &PureState) -> Result<()> {
    let k = psi.dims().k();
    if k == 0 || sigma.r() != k - 1 {
        return Err(Error::ArityMismatch {
            expected: k.saturating_sub(1),
            got: sigma.r(),
        });
    }
    Ok(())
}

fn check_mixed_arity(sigma: &PermTuple, rho: &DensityMatrix) -> Result<()> {
    if sigma.r() != rho.dims().k() {
        return Err(Error::ArityMismatch {
            expected: rho.dims().k(),
            got: sigma.r(),
        });
    }
    Ok(())
}

fn check_grade(sigma: &PermTuple, m: usize) -> Result<()> {
    if sigma.m() != m {
        return Err(Error::WrongLabelGrade {
            m,
            detail: format!("label has grade {}", sigma.m()),
        });
    }
    Ok(())
}

fn positions_where(sigma: &PermTuple, pred: impl Fn(&Perm) -> bool) -> Vec<usize> {
    (0..sigma.r()).filter(|&j| pred(sigma.get(j))).collect()
}

fn named_positions(sigma: &PermTuple, names: &[&str]) -> Vec<usize> {
    positions_where(sigma, |p| p.name().is_some_and(|n| names.contains(&n)))
}

pub fn pure_m1(psi: &PureState) -> C64 {
    psi.projector().trace()
}

pub fn mixed_m1(rho: &DensityMatrix) -> C64 {
    rho.trace()
}

fn m2_value(sigma: &PermTuple, op: &DensityMatrix) -> Result<C64> {
    check_grade(sigma, 2)?;
    let traced = SubsystemSet::new(positions_where(sigma, Perm::is_identity), op.dims().k())?;
    Ok(op.partial_trace(&traced)?.pow(2).trace())
}

/// `Tr(Tr_{{k} ∪ {j: σ_j = e}} π)²`.
pub fn pure_m2(sigma: &PermTuple, psi: &PureState) -> Result<C64> {
    check_pure_arity(sigma, psi)?;
    m2_value(&sigma.with_identity_appended(), &psi.projector())
}

/// The complementary writing `Tr(Tr_{j: σ_j = t} π)²`.
pub fn pure_m2_complement(sigma: &PermTuple, psi: &PureState) -> Result<C64> {
    check_pure_arity(sigma, psi)?;
    check_grade(sigma, 2)?;
    let pi = psi.projector();
    let traced = SubsystemSet::new(positions_where(sigma, |p| !p.is_identity()), pi.dims().k())?;
    Ok(pi.partial_trace(&traced)?.pow(2).trace())
}

/// `Tr(Tr_{j: σ_j = e} ρ)²`.
pub fn mixed_m2(sigma: &PermTuple, rho: &DensityMatrix) -> Result<C64> {
    check_mixed_arity(sigma, rho)?;
    m2_value(sigma, rho)
}

/// One factor `𝕀_{j: σ_j = τ} ⊗ Tr_{j: σ_j ∈ {τ, e}} X^{T_{j: σ_j = s²}}`, living on
/// the subsystems where `σ_j ≠ e`.
pub fn m3_factor(tau: &str, sigma: &PermTuple, op: &DensityMatrix) -> Result<DensityMatrix> {
    check_grade(sigma, 3)?;
    let k = op.dims().k();
    if sigma.r() != k {
        return Err(Error::ArityMismatch {
            expected: k,
            got: sigma.r(),
        });
    }
    let transposed =
        op.partial_transpose(&SubsystemSet::new(named_positions(sigma, &["s2"]), k)?)?;
    let tau_set = named_positions(sigma, &[tau]);
    let traced = SubsystemSet::new(named_positions(sigma, &[tau, "e"]), k)?;
    let reduced = transposed.partial_trace(&traced)?;

    let active = named_positions(sigma, &["s", "s2", "t", "ts", "ts2"]);
    let active_dims = Dims::unchecked(active.iter().map(|&j| op.dims().as_slice()[j]).collect());
    let id_positions = tau_set
        .iter()
        .map(|j| active.iter().position(|a| a == j).unwrap())
        .collect();
    reduced.tensor_with_identity(
        &SubsystemSet::new(id_positions, active.len())?,
        &active_dims,
    )
}

/// Grade-3 trace product with the factors multiplied in `order`.
pub fn m3_product(sigma: &PermTuple, op: &DensityMatrix, order: [&str; 3]) -> Result<C64> {
    let mut acc: Option<DensityMatrix> = None;
    for tau in order {
        let f = m3_factor(tau, sigma, op)?;
        acc = Some(match acc {
            None => f,
            Some(a) => a.matmul(&f)?,
        });
    }
    Ok(acc.unwrap().trace())
}

pub fn pure_m3(sigma: &PermTuple, psi: &PureState) -> Result<C64> {
    check_pure_arity(sigma, psi)?;
    m3_product(&sigma.with_identity_appended(), &psi.projector(), M3_ORDER)
}

pub fn mixed_m3(sigma: &PermTuple, rho: &DensityMatrix) -> Result<C64> {
    check_mixed_arity(sigma, rho)?;
    m3_product(sigma, rho, M3_ORDER)
}

/// Closed-form value of a pure label of grade 1, 2 or 3.
pub fn closed_form_pure(sigma: &PermTuple, psi: &PureState) -> Result<C64> {
    match sigma.m() {
        1 => {
            check_pure_arity(sigma, psi)?;
            Ok(pure_m1(psi))
        }
        2 => pure_m2(sigma, psi),
        3 => pure_m3(sigma, psi),
        m => Err(Error::WrongLabelGrade {
            m,
            detail: "closed forms exist for grades 1 to 3 only".into(),
        }),
    }
}

pub fn closed_form_mixed(sigma: &PermTuple, rho: &DensityMatrix) -> Result<C64> {
    match sigma.m() {
        1 => {
            check_mixed_arity(sigma, rho)?;
            Ok(mixed_m1(rho))
        }
        2 => mixed_m2(sigma, rho),
        3 => mixed_m3(sigma, rho),
        m => Err(Error::WrongLabelGrade {
            m,
            detail: "closed forms exist for grades 1 to 3 only".into(),
        }),
    }
}

/// Formula descriptor of the grade-1/2/3 closed form for a full-arity tuple
/// (`r = k`), printed with `pi` or `rho` according to `kind`.
pub fn descriptor(sigma: &PermTuple, kind: Kind) -> Result<Formula> {
    let terms = match sigma.m() {
        1 => vec![(MatExpr::State, 1)],
        2 => {
            let traced = positions_where(sigma, Perm::is_identity);
            vec![(
                MatExpr::Power(Box::new(MatExpr::ptrace(traced, MatExpr::State)), 2),
                1,
            )]
        }
        3 => {
            let s2 = named_positions(sigma, &["s2"]);
            let factors = M3_ORDER
                .iter()
                .map(|tau| {
                    let base = MatExpr::ptranspose(s2.clone(), MatExpr::State);
                    let reduced = MatExpr::ptrace(named_positions(sigma, &[tau, "e"]), base);
                    MatExpr::pad(named_positions(sigma, &[tau]), reduced)
                })
                .collect();
            vec![(MatExpr::Product(factors), 1)]
        }
        m => {
            return Err(Error::WrongLabelGrade {
                m,
                detail: "closed forms exist for grades 1 to 3 only".into(),
            })
        }
    };
    Ok(Formula { kind, terms })
}

/// One graph of a `∼`-class with the formula read off from it.
#[derive(Clone, Debug)]
pub struct Writing {
    pub class: OrbitLabel,
    pub formula: Formula,
}

/// Every writing of one invariant. For a pure label (`r = k-1`) this walks
/// all `≈`-classes of its `∼`-class, the anchor first; for a mixed label it
/// is the single closed form.
pub fn alternate_writings(sigma: &PermTuple, kind: Kind) -> Result<Vec<Writing>> {
    if sigma.m() > 3 {
        return Err(Error::WrongLabelGrade {
            m: sigma.m(),
            detail: "closed forms exist for grades 1 to 3 only".into(),
        });
    }
    match kind {
        Kind::Mixed => {
            let class = crate::perm::canonical_form(sigma)?;
            Ok(vec![Writing {
                formula: descriptor(sigma, Kind::Mixed)?,
                class,
            }])
        }
        Kind::Pure => {
            let sim = sim_decompose(sigma)?;
            let mut members = sim.members.clone();
            members.sort_by_key(|m| *m != sim.anchor);
            members
                .into_iter()
                .map(|class| {
                    Ok(Writing {
                        formula: descriptor(class.rep(), Kind::Pure)?,
                        class,
                    })
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contract::{eval_mixed, eval_pure, relative_error};
    use crate::states::{random_pure, rng_from_seed, CMatrix};

    fn tup(m: usize, names: &[&str]) -> PermTuple {
        PermTuple::from_names(m, names).unwrap()
    }

    fn dims(v: &[usize]) -> Dims {
        Dims::new(v.to_vec()).unwrap()
    }

    #[test]
    fn grade_one_examples() {
        let psi = PureState::from_real(dims(&[2]), &[1.0, 0.0]).unwrap();
        assert_eq!(pure_m1(&psi), C64::new(1.0, 0.0));
        let bell = PureState::from_real(dims(&[2, 2]), &[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(pure_m1(&bell), C64::new(2.0, 0.0));
    }

    #[test]
    fn grade_two_examples() {
        let psi = random_pure(&dims(&[2, 3, 2]), 4);
        let all_e = pure_m2(&tup(2, &["e", "e"]), &psi).unwrap();
        assert!(relative_error(all_e, C64::new(psi.norm_sqr().powi(2), 0.0)) < 1e-12);

        let bell = PureState::from_real(dims(&[2, 2]), &[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((pure_m2(&tup(2, &["t"]), &bell).unwrap() - C64::new(2.0, 0.0)).norm() < 1e-14);

        for names in [["e", "e"], ["e", "t"], ["t", "e"], ["t", "t"]] {
            let sigma = tup(2, &names);
            let a = pure_m2(&sigma, &psi).unwrap();
            let b = pure_m2_complement(&sigma, &psi).unwrap();
            let c = eval_pure(&sigma, &psi).unwrap();
            assert!(
                relative_error(a, b) < 1e-10 && relative_error(a, c) < 1e-10,
                "{names:?}"
            );
        }

        assert!(matches!(
            pure_m2(&tup(3, &["t", "t"]), &psi),
            Err(Error::WrongLabelGrade { m: 2, .. })
        ));
    }

    #[test]
    fn grade_three_pure_examples() {
        let psi = random_pure(&dims(&[3, 2]), 6);
        let pi = psi.projector();
        let pi1 = pi
            .partial_trace(&SubsystemSet::new(vec![1], 2).unwrap())
            .unwrap();
        let want = pi1.pow(3).trace();
        assert!(relative_error(pure_m3(&tup(3, &["s"]), &psi).unwrap(), want) < 1e-10);

        let psi = random_pure(&dims(&[3, 3, 3]), 7);
        let pi = psi.projector();
        let pi12 = pi
            .partial_trace(&SubsystemSet::new(vec![2], 3).unwrap())
            .unwrap();
        let kempe = pi12
            .partial_transpose(&SubsystemSet::new(vec![0], 2).unwrap())
            .unwrap()
            .pow(3)
            .trace();
        assert!(relative_error(pure_m3(&tup(3, &["s", "s2"]), &psi).unwrap(), kempe) < 1e-10);

        let f = Formula::parse("Tr((tr[2,3](pi) (x) tr[1,3](pi)) * tr[3](pi))").unwrap();
        let want = f.eval_pure(&psi).unwrap();
        assert!(relative_error(pure_m3(&tup(3, &["t", "ts"]), &psi).unwrap(), want) < 1e-10);

        let single = random_pure(&dims(&[3]), 2);
        let v = pure_m3(&PermTuple::identity(3, 0), &single).unwrap();
        assert!(relative_error(v, C64::new(single.norm_sqr().powi(3), 0.0)) < 1e-12);
    }

    #[test]
    fn grade_three_mixed_examples() {
        let mut rng = rng_from_seed(3);
        let rho = DensityMatrix::random(&dims(&[2, 3]), 6, &mut rng);
        let rho2 = rho
            .partial_trace(&SubsystemSet::new(vec![0], 2).unwrap())
            .unwrap();
        let padded = rho2
            .tensor_with_identity(&SubsystemSet::new(vec![0], 2).unwrap(), rho.dims())
            .unwrap();
        let want = padded.matmul(&rho.pow(2)).unwrap().trace();
        assert!(relative_error(mixed_m3(&tup(3, &["t", "s"]), &rho).unwrap(), want) < 1e-10);

        let (a, b, c) = (0.2, 1.3, 0.9);
        let diag = DensityMatrix::new(
            dims(&[3]),
            CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                C64::new(a, 0.0),
                C64::new(b, 0.0),
                C64::new(c, 0.0),
            ])),
        )
        .unwrap();
        let v = mixed_m3(&tup(3, &["s"]), &diag).unwrap();
        assert!((v.re - (a * a * a + b * b * b + c * c * c)).abs() < 1e-13);

        let v = mixed_m2(&tup(2, &["t", "t"]), &rho).unwrap();
        assert!(relative_error(v, rho.pow(2).trace()) < 1e-12);
    }

    #[test]
    fn every_tuple_not_only_canonical_ones() {
        let mut rng = rng_from_seed(10);
        let rho = DensityMatrix::random(&dims(&[2, 2]), 4, &mut rng);
        let group = crate::perm::all_perms(3);
        for a in &group {
            for b in &group {
                let sigma = PermTuple::new(3, vec![a.clone(), b.clone()]).unwrap();
                let cf = mixed_m3(&sigma, &rho).unwrap();
                let oracle = eval_mixed(&sigma, &rho).unwrap();
                assert!(relative_error(cf, oracle) < 1e-10, "{sigma}");
            }
        }
    }

    #[test]
    fn three_transposition_types_with_a_cycle() {
        let mut rng = rng_from_seed(16);
        let rho = DensityMatrix::random(&dims(&[2, 2, 2, 2]), 16, &mut rng);
        for names in [
            ["ts", "t", "s", "e"],
            ["t", "ts", "ts2", "s2"],
            ["s", "ts2", "t", "ts"],
        ] {
            let sigma = tup(3, &names);
            let cf = mixed_m3(&sigma, &rho).unwrap();
            let oracle = eval_mixed(&sigma, &rho).unwrap();
            assert!(
                relative_error(cf, oracle) < 1e-10,
                "{sigma}: {cf} vs {oracle}"
            );
        }
    }

    #[test]
    fn factor_order_matters_and_rotations_do_not() {
        let mut rng = rng_from_seed(14);
        let rho = DensityMatrix::random(&dims(&[2, 2, 2]), 8, &mut rng);
        let sigma = tup(3, &["s", "t", "ts"]);
        let base = m3_product(&sigma, &rho, M3_ORDER).unwrap();
        for rot in [["ts2", "t", "ts"], ["t", "ts", "ts2"]] {
            let v = m3_product(&sigma, &rho, rot).unwrap();
            assert!(relative_error(v, base) < 1e-12);
        }
        let reversed = m3_product(&sigma, &rho, ["t", "ts2", "ts"]).unwrap();
        assert!(relative_error(reversed, base) > 1e-6);
    }

    #[test]
    fn descriptors_evaluate_to_closed_forms() {
        let mut rng = rng_from_seed(15);
        let rho = DensityMatrix::random(&dims(&[2, 3]), 3, &mut rng);
        for m in 1..=3 {
            for label in crate::perm::enumerate_orbits(m, 2).unwrap() {
                let f = descriptor(label.rep(), Kind::Mixed).unwrap();
                let reparsed = Formula::parse(&f.to_string()).unwrap();
                let a = reparsed.eval(&rho).unwrap();
                let b = closed_form_mixed(label.rep(), &rho).unwrap();
                assert!(relative_error(a, b) < 1e-12, "{label}: {f}");
            }
        }
    }

    #[test]
    fn writings_of_pure_labels() {
        let writings = alternate_writings(&tup(2, &["t", "t"]), Kind::Pure).unwrap();
        assert_eq!(writings.len(), 2);
        assert_eq!(writings[0].formula.to_string(), "Tr(tr[3](pi)^2)");
        assert_eq!(writings[1].formula.to_string(), "Tr(tr[1,2](pi)^2)");

        let psi = random_pure(&dims(&[2, 3]), 9);
        let writings = alternate_writings(&tup(3, &["s"]), Kind::Pure).unwrap();
        assert_eq!(writings.len(), 4);
        let target = eval_pure(&tup(3, &["s"]), &psi).unwrap();
        for w in &writings {
            assert!(
                relative_error(w.formula.eval_pure(&psi).unwrap(), target) < 1e-10,
                "{}",
                w.formula
            );
        }
    }
}
