//! Deciding subnormality of the Cauchy dual of a 2-isometric tree shift.
//!
//! Structural criteria give definite answers; otherwise the dual moment
//! sequences `d_{S′}(u, ·)` at a set of witness vertices are tested for the
//! Stieltjes property. A passing generic test only means "consistent to
//! order n".

use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::{d_sequence, stieltjes_test, MomentSequence, MomentVerdict, Table1Row};
use crate::shift::{classify_adjacency, TwoIsometryVerdict, WeightedShift, DEFAULT_TOL};
use crate::tree::Vertex;

/// Which criterion settled the question. Serialized names are stable
/// report identifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DecisionPath {
    /// 2-isometry with the kernel condition: the dual is a subnormal
    /// contraction.
    #[serde(rename = "cdsubn")]
    KernelCondition,
    /// Quasi-Brownian adjacency operator: the dual is a subnormal contraction.
    #[serde(rename = "BrownianG")]
    QuasiBrownian,
    /// 2-isometric adjacency operator whose non-root degrees lie in `{1, l}`,
    /// or with `l − 1` root children of degree 2.
    #[serde(rename = "constant-t")]
    AdjacencyDegreePattern,
    /// Sibling norms agree from some generation `k >= 1` on and all weights
    /// up to generation `k` are nonzero: the dual is subnormal iff the plain
    /// kernel condition holds.
    #[serde(rename = "main2")]
    PerturbedKernelCondition,
    /// Hankel tests on dual moment sequences at witness vertices.
    #[serde(rename = "generic-moment-test")]
    GenericMomentTest,
}

impl DecisionPath {
    pub fn id(self) -> &'static str {
        match self {
            DecisionPath::KernelCondition => "cdsubn",
            DecisionPath::QuasiBrownian => "BrownianG",
            DecisionPath::AdjacencyDegreePattern => "constant-t",
            DecisionPath::PerturbedKernelCondition => "main2",
            DecisionPath::GenericMomentTest => "generic-moment-test",
        }
    }

    pub fn citation(self) -> &'static str {
        match self {
            DecisionPath::KernelCondition => {
                "2-isometry with the kernel condition: S′ is a subnormal contraction, S′*ⁿS′ⁿ = (I + nΔ)⁻¹"
            }
            DecisionPath::QuasiBrownian => {
                "quasi-Brownian isometry: S′ is a subnormal contraction, S′*ⁿS′ⁿ = (I + (S*S)^{1−2n})(I + S*S)⁻¹"
            }
            DecisionPath::AdjacencyDegreePattern => {
                "2-isometric adjacency operator with degrees in {1, l} or l − 1 root children of degree 2: S′ is a subnormal contraction"
            }
            DecisionPath::PerturbedKernelCondition => {
                "2-isometry with sibling-constant norms from generation k on and nonzero weights up to generation k: S′ is subnormal iff the kernel condition holds"
            }
            DecisionPath::GenericMomentTest => {
                "S′ is subnormal iff every d_{S′}(u, ·) is a Stieltjes moment sequence; finite Hankel prefixes can only refute"
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "order", rename_all = "snake_case")]
pub enum Subnormality {
    Subnormal,
    NotSubnormal,
    /// Every tested Hankel matrix passed; nothing is proved.
    ConsistentToOrder(usize),
}

#[derive(Clone, Debug)]
pub struct SubnormalityOptions {
    /// Largest moment index tested at each witness (capped by depth).
    pub nmax: usize,
    pub tol: f64,
    /// Witness vertices for the generic test; default is the root and the
    /// first vertex of every generation.
    pub witnesses: Option<Vec<Vertex>>,
    /// Reject operators that are not 2-isometries (the structural criteria
    /// need it). When false, such operators go straight to the generic test.
    pub require_two_isometry: bool,
}

impl Default for SubnormalityOptions {
    fn default() -> Self {
        Self {
            nmax: 12,
            tol: DEFAULT_TOL,
            witnesses: None,
            require_two_isometry: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessEvidence {
    pub vertex: String,
    pub sequence: MomentSequence,
    pub stieltjes: MomentVerdict,
    /// Stieltjes test of `d_{S′}(u, n+1)`. When this passes and the full
    /// sequence fails, the missing `γ_0 = 1` is exactly what breaks it.
    pub shifted_stieltjes: Option<MomentVerdict>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubnormalityReport {
    pub verdict: Subnormality,
    pub decision_path: DecisionPath,
    pub citation: String,
    pub summary: String,
    /// Generation `k` of the sibling-constancy condition used by the
    /// perturbed criterion.
    pub perturbation_generation: Option<usize>,
    /// `max_n |d_{S′}(ω, n) − r_n|` against the closed form of the path taken.
    pub closed_form_deviation: Option<f64>,
    pub evidence: Vec<WitnessEvidence>,
    pub two_isometry: TwoIsometryVerdict,
    pub nmax: usize,
    pub tolerance: f64,
    pub notes: Vec<String>,
}

impl SubnormalityReport {
    pub fn root_evidence(&self) -> Option<&WitnessEvidence> {
        self.evidence.first()
    }
}

/// Decides whether the Cauchy dual of `s` is subnormal.
pub fn dual_subnormality(s: &WeightedShift, opts: &SubnormalityOptions) -> Result<SubnormalityReport> {
    let t = s.tree();
    let n = t.materialized_depth();
    let tol = opts.tol;
    let two = s.is_two_isometry(tol)?;
    let mut notes = Vec::new();
    if !two.holds() {
        let w = two.verdict.witness.clone().map(|w| w.vertex).unwrap_or_default();
        if opts.require_two_isometry {
            return Err(Error::Classification(format!(
                "not a 2-isometry (witness `{w}`); the decision procedure needs one"
            )));
        }
        notes.push(format!("not a 2-isometry (witness `{w}`); structural criteria skipped"));
        return generic(s, opts, two, notes);
    }

    let root = t.root();
    let root_nmax = opts.nmax.min(n);
    let report = |verdict, path: DecisionPath, summary: String, k, dev, evidence, notes| SubnormalityReport {
        verdict,
        decision_path: path,
        citation: path.citation().to_string(),
        summary,
        perturbation_generation: k,
        closed_form_deviation: dev,
        evidence,
        two_isometry: two.clone(),
        nmax: root_nmax,
        tolerance: tol,
        notes,
    };

    let kc = s.satisfies_kernel_condition(0, tol)?;
    if kc.holds {
        let t2 = s.vertex_norm_sq(root)?;
        let ev = evidence_at(s, root, root_nmax, tol)?;
        let dev = deviation(&ev.sequence, |m| Table1Row::Kernel.r(t2, m));
        return Ok(report(
            Subnormality::Subnormal,
            DecisionPath::KernelCondition,
            format!(
                "subnormal contraction: kernel condition verified to depth {}; root sequence matches 1/(1 + n(‖S e_ω‖² − 1)) within {dev:e}",
                kc.verified_depth
            ),
            None,
            Some(dev),
            vec![ev],
            notes,
        ));
    }

    let adjacency = t.vertices().skip(1).all(|v| s.weight(v) == 1.0);
    if adjacency && t.is_leafless() {
        let classes = classify_adjacency(t, tol)?;
        let l = t.degree(root);
        if classes.quasi_brownian_isometry.holds {
            let ev = evidence_at(s, root, root_nmax, tol)?;
            let dev = deviation(&ev.sequence, |m| Table1Row::QuasiBrownian.r(l as f64, m));
            return Ok(report(
                Subnormality::Subnormal,
                DecisionPath::QuasiBrownian,
                format!(
                    "subnormal contraction: quasi-Brownian adjacency operator of valency {l}; root sequence matches (1 + l^(1−2n))/(1 + l) within {dev:e}"
                ),
                None,
                Some(dev),
                vec![ev],
                notes,
            ));
        }
        let degrees_one_or_l = t
            .vertices()
            .skip(1)
            .filter(|&v| t.degree_known(v))
            .all(|v| t.degree(v) == 1 || t.degree(v) == l);
        let root_twos = t.children(root).iter().filter(|&&v| t.degree(v) == 2).count();
        if degrees_one_or_l || (l >= 2 && root_twos == l - 1) {
            let ev = evidence_at(s, root, root_nmax, tol)?;
            let dev =
                (!degrees_one_or_l).then(|| deviation(&ev.sequence, |m| Table1Row::AdjacencyPattern.r(l as f64, m)));
            return Ok(report(
                Subnormality::Subnormal,
                DecisionPath::AdjacencyDegreePattern,
                format!(
                    "subnormal contraction: 2-isometric adjacency operator, root degree {l}, {}",
                    if degrees_one_or_l {
                        "all other degrees in {1, l}".to_string()
                    } else {
                        format!("{root_twos} root children of degree 2")
                    }
                ),
                None,
                dev,
                vec![ev],
                notes,
            ));
        }
    }

    // Only k with at least two verified generations of sibling constancy.
    for k in 1..=n.saturating_sub(2) / 2 {
        if !s.satisfies_kernel_condition(k, tol)?.holds {
            continue;
        }
        let zero = (1..=k)
            .flat_map(|g| t.generation(g).expect("g <= N").iter().copied())
            .find(|&v| s.weight(v) == 0.0);
        if let Some(z) = zero {
            notes.push(format!(
                "sibling norms agree from generation {k} on, but `{}` in generation {} has zero weight; the perturbed criterion does not apply, falling back to moment tests",
                t.id(z),
                t.depth(z)
            ));
            return generic(s, opts, two, notes);
        }
        let witness = kc.witness.as_ref().map(|w| w.vertex.clone()).unwrap_or_default();
        let ev = evidence_at(s, root, root_nmax, tol)?;
        let corroboration = if ev.stieltjes.holds {
            format!("root Hankel prefix consistent to order {root_nmax}")
        } else {
            format!(
                "root Stieltjes failure at order {}",
                ev.stieltjes.failing_order.unwrap_or_default()
            )
        };
        return Ok(report(
            Subnormality::NotSubnormal,
            DecisionPath::PerturbedKernelCondition,
            format!(
                "NOT subnormal: sibling norms agree from generation {k} on but not at `{witness}`; {corroboration}"
            ),
            Some(k),
            None,
            vec![ev],
            notes,
        ));
    }

    generic(s, opts, two, notes)
}

fn generic(
    s: &WeightedShift,
    opts: &SubnormalityOptions,
    two: TwoIsometryVerdict,
    mut notes: Vec<String>,
) -> Result<SubnormalityReport> {
    let t = s.tree();
    let n = t.materialized_depth();
    let witnesses: Vec<Vertex> = match &opts.witnesses {
        Some(w) => w.clone(),
        None => std::iter::once(t.root())
            .chain((1..=n).filter_map(|g| t.generation(g).ok()?.first().copied()))
            .filter(|&v| n - t.depth(v) >= 2)
            .collect(),
    };
    if witnesses.is_empty() {
        return Err(Error::Range("no witness vertex leaves room for three moments".into()));
    }
    let mut evidence = Vec::new();
    let mut min_order = usize::MAX;
    for &w in &witnesses {
        let nmax = opts.nmax.min(n - t.depth(w));
        if nmax < 2 {
            return Err(Error::Range(format!(
                "witness `{}` leaves only {nmax} moments below the materialized depth",
                t.id(w)
            )));
        }
        min_order = min_order.min(nmax);
        let ev = evidence_at(s, w, nmax, opts.tol)?;
        let failed = !ev.stieltjes.holds;
        evidence.push(ev);
        if failed {
            break;
        }
    }
    let failure = evidence.iter().find(|e| !e.stieltjes.holds);
    let (verdict, summary) = match failure {
        Some(e) => {
            let order = e.stieltjes.failing_order.unwrap_or_default();
            let ext = match &e.shifted_stieltjes {
                Some(v) if v.holds => "; the shifted sequence passes, so the backward extension is inadmissible",
                _ => "",
            };
            (
                Subnormality::NotSubnormal,
                format!(
                    "NOT subnormal: d_{{S′}}(`{}`, ·) fails the Stieltjes test at Hankel order {order}{ext}",
                    e.vertex
                ),
            )
        }
        None => (
            Subnormality::ConsistentToOrder(min_order),
            format!(
                "consistent to order {min_order} at {} witness vertices; not a proof of subnormality",
                evidence.len()
            ),
        ),
    };
    if s.has_zero_weights() {
        notes.push(crate::shift::ZERO_WEIGHT_NOTE.to_string());
    }
    Ok(SubnormalityReport {
        verdict,
        decision_path: DecisionPath::GenericMomentTest,
        citation: DecisionPath::GenericMomentTest.citation().to_string(),
        summary,
        perturbation_generation: None,
        closed_form_deviation: None,
        evidence,
        two_isometry: two,
        nmax: opts.nmax,
        tolerance: opts.tol,
        notes,
    })
}

fn evidence_at(s: &WeightedShift, u: Vertex, nmax: usize, tol: f64) -> Result<WitnessEvidence> {
    let sequence = d_sequence(s, u, nmax, true)?;
    let stieltjes = stieltjes_test(&sequence, tol);
    let shifted_stieltjes = if sequence.len() >= 4 {
        Some(stieltjes_test(&sequence.shifted()?, tol))
    } else {
        None
    };
    Ok(WitnessEvidence {
        vertex: s.tree().id(u).to_string(),
        sequence,
        stieltjes,
        shifted_stieltjes,
    })
}

fn deviation(seq: &MomentSequence, f: impl Fn(usize) -> f64) -> f64 {
    seq.values
        .iter()
        .enumerate()
        .map(|(m, v)| (v - f(m)).abs())
        .fold(0.0, f64::max)
}
