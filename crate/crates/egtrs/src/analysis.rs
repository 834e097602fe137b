//! The verdict engine: generates the pair families, decides feasibility and
//! joinability of each pair, and folds the results through the proof and
//! disproof theorems.
//!
//! Two proof routes are available. The Huet route needs every pair of
//! `CCP-R`, `CVPto-R`, `CCP-ER`, `CCP-RE`, `CVPto-E` and `CVPeq-R` to be
//! joinable modulo E with plain rewriting. The JK route needs every pair of
//! `LCCP-R`, `CVPps-R`, `DCP-R`, `LCCP-ER` and `CVPps-E` to be joinable
//! modulo E with E-matching rewriting; down pairs can be dropped in its
//! Church-Rosser form. Both routes need E-termination, which is assumed,
//! never proved. Disproof needs no assumption.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::deduction::{Bounds, Engine, Feasibility};
use crate::joinability::{join_pair, Certificate, JoinMode, PairEvidence, PairJoin};
use crate::pairs::{generate_family, ConditionalPair, Family};
use crate::relations::Rel;
use crate::system::{Diagnostic, Egtrs, Flavor};
use crate::terms::Subst;

/// Families the Huet route needs.
pub const HUET_FAMILIES: [Family; 6] =
    [Family::CcpR, Family::CvpToR, Family::CcpER, Family::CcpRE, Family::CvpToE, Family::CvpEqR];

/// Families the JK route needs.
pub const JK_FAMILIES: [Family; 5] = [Family::LccpR, Family::CvpPsR, Family::DcpR, Family::LccpER, Family::CvpPsE];

/// Families searched for a non-joinable pair.
pub const DISPROOF_FAMILIES: [Family; 5] = [Family::CcpR, Family::CvpToR, Family::LccpR, Family::CvpPsR, Family::DcpR];

/// Which proof routes to attempt.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RouteChoice {
    Huet,
    Jk,
    #[default]
    Both,
}

impl RouteChoice {
    pub fn parse(s: &str) -> Option<RouteChoice> {
        match s.to_ascii_lowercase().as_str() {
            "huet" => Some(RouteChoice::Huet),
            "jk" => Some(RouteChoice::Jk),
            "both" => Some(RouteChoice::Both),
            _ => None,
        }
    }

    fn huet(self) -> bool {
        self != RouteChoice::Jk
    }

    fn jk(self) -> bool {
        self != RouteChoice::Huet
    }
}

/// A proof route.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Route {
    Huet,
    Jk,
    JkNoDcp,
}

impl Route {
    pub fn label(&self) -> &'static str {
        match self {
            Route::Huet => "Huet",
            Route::Jk => "JK",
            Route::JkNoDcp => "JK-noDCP",
        }
    }

    /// The families the route needs.
    pub fn families(&self) -> &'static [Family] {
        match self {
            Route::Huet => &HUET_FAMILIES,
            Route::Jk => &JK_FAMILIES,
            Route::JkNoDcp => &[Family::LccpR, Family::CvpPsR, Family::LccpER, Family::CvpPsE],
        }
    }

    /// The joinability every pair of the route needs.
    pub fn mode(&self) -> JoinMode {
        match self {
            Route::Huet => JoinMode::modulo(Rel::R),
            Route::Jk | Route::JkNoDcp => JoinMode::modulo(Rel::RE),
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// User assertions that stand in for arguments outside automated reach.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Annotations {
    pub e_terminating: bool,
    /// Pair ids asserted joinable, optionally in a given mode.
    pub joinable: BTreeMap<String, Option<JoinMode>>,
    pub infeasible: BTreeSet<String>,
}

/// Analysis settings.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Options {
    pub bounds: Bounds,
    pub route: RouteChoice,
    pub assume_e_termination: bool,
}

/// Why an analysis could not be carried out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnalysisError {
    /// An annotation names a pair that is not generated.
    UnknownPairId(String),
    /// A pair was found non-joinable although a proof route succeeded.
    Inconsistent { pair: String, route: Route },
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalysisError::UnknownPairId(id) => write!(f, "annotation refers to unknown pair id `{id}`"),
            AnalysisError::Inconsistent { pair, route } => {
                write!(f, "internal inconsistency: pair {pair} does not join, yet route {route} succeeded")
            }
        }
    }
}

/// The status of one pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairOutcome {
    pub pair: ConditionalPair,
    pub feasibility: Feasibility,
    /// The joinability the pair's route needs.
    pub mode: JoinMode,
    pub join: PairJoin,
    /// The pair has an instance that does not join with rewriting modulo E,
    /// which refutes E-confluence.
    pub refutes: bool,
    /// Ids of the annotations this outcome relies on.
    pub annotations: Vec<String>,
}

/// The outcomes of one family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyReport {
    pub family: Family,
    pub pairs: Vec<PairOutcome>,
}

/// A pair blocking a proof route.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blocker {
    pub pair: String,
    pub route: Route,
    pub reason: String,
}

/// The result of one proof route.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RouteResult {
    pub route: Route,
    /// The theorem or corollary the route relies on.
    pub theorem: &'static str,
    pub succeeded: bool,
    pub blockers: Vec<Blocker>,
}

/// The overall answer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    EConfluent { route: Route, theorem: &'static str },
    NotEConfluent { pair: String, sigma: Subst, certificate: Certificate },
    Maybe { blockers: Vec<Blocker> },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::EConfluent { .. } => "EConfluent",
            Verdict::NotEConfluent { .. } => "NotEConfluent",
            Verdict::Maybe { .. } => "Maybe",
        }
    }
}

/// Everything an analysis found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub verdict: Verdict,
    pub routes: Vec<RouteResult>,
    pub families: Vec<FamilyReport>,
    /// Warnings on the equations, and a note when E-termination is missing.
    pub validation: Vec<Diagnostic>,
    pub bounds: Bounds,
    /// Annotations some outcome relied on, in the order first used.
    pub annotations_used: Vec<String>,
}

impl Report {
    /// The outcomes of one family, if it was analyzed.
    pub fn family(&self, f: Family) -> Option<&FamilyReport> {
        self.families.iter().find(|r| r.family == f)
    }

    /// The outcome of a pair, by id.
    pub fn pair(&self, id: &str) -> Option<&PairOutcome> {
        self.families.iter().flat_map(|f| f.pairs.iter()).find(|p| p.pair.id == id)
    }
}

const HUET_THEOREM: &str = "critical and variable pairs theorem";
const HUET_LINEAR: &str = "left-linear corollary";
const JK_THEOREM: &str = "PS-peaks theorem";
const JK_CR_THEOREM: &str = "Church-Rosser modulo E theorem";
const JK_COROLLARY: &str = "left-mu-homogeneous and mu-compatible corollary";

/// The premises of the Huet left-linear corollary: the rules are
/// μ-left-linear and μ-compatible, the oriented equations left-μ-homogeneous
/// and μ-compatible.
pub fn huet_left_linear(sys: &Egtrs) -> bool {
    sys.rules_as(Flavor::Rm).iter().all(|r| {
        let p = r.properties(&sys.mu);
        p.mu_left_linear && p.mu_compatible
    }) && sys.eboth().iter().all(|r| {
        let p = r.properties(&sys.mu);
        p.left_mu_homogeneous && p.mu_compatible
    })
}

/// The premises of the JK corollary: every rule and oriented equation is
/// left-μ-homogeneous and μ-compatible.
pub fn jk_homogeneous(sys: &Egtrs) -> bool {
    sys.rules_as(Flavor::Rm).iter().chain(sys.eboth().iter()).all(|r| {
        let p = r.properties(&sys.mu);
        p.left_mu_homogeneous && p.mu_compatible
    })
}

fn evaluate(engine: &Engine, pair: ConditionalPair, mode: JoinMode, ann: &Annotations, disprove: bool) -> PairOutcome {
    let mut annotations = Vec::new();
    let feasibility = if ann.infeasible.contains(&pair.id) {
        annotations.push(format!("assume-infeasible {}", pair.id));
        Feasibility::Infeasible("annotation".into())
    } else {
        engine.pair_feasibility(&pair)
    };
    let mut refutes = false;
    let mut join = match &feasibility {
        Feasibility::Infeasible(why) => PairJoin::Joinable(PairEvidence::Infeasible(why.clone())),
        _ if disprove => match join_pair(engine, &pair, JoinMode::modulo(Rel::RmodE)) {
            found @ PairJoin::NotJoinable { .. } => {
                refutes = true;
                found
            }
            _ => join_pair(engine, &pair, mode),
        },
        _ => join_pair(engine, &pair, mode),
    };
    if !join.is_joinable() && !matches!(join, PairJoin::NotJoinable { .. }) {
        if let Some(asserted) = ann.joinable.get(&pair.id) {
            if asserted.is_none_or(|m| m.implies(&mode)) {
                annotations.push(format!("assume-joinable {}", pair.id));
                join = PairJoin::Joinable(PairEvidence::Annotation(*asserted));
            }
        }
    }
    PairOutcome { pair, feasibility, mode, join, refutes, annotations }
}

fn blocker(o: &PairOutcome, route: Route) -> Option<Blocker> {
    let reason = match &o.join {
        PairJoin::Joinable(_) => return None,
        PairJoin::NotJoinable { sigma, .. } => format!("instance {sigma} does not join in {}", o.mode),
        PairJoin::Unknown(why) => why.clone(),
    };
    Some(Blocker { pair: o.pair.id.clone(), route, reason })
}

/// Runs the full analysis.
pub fn analyze(sys: &Egtrs, opts: &Options, ann: &Annotations) -> Result<Report, AnalysisError> {
    let engine = Engine::new(sys, opts.bounds);
    let generated: Vec<(Family, Vec<ConditionalPair>)> =
        Family::ALL.into_iter().map(|f| (f, generate_family(sys, f))).collect();
    let known: BTreeSet<&str> = generated.iter().flat_map(|(_, ps)| ps.iter().map(|p| p.id.as_str())).collect();
    for id in ann.joinable.keys().chain(ann.infeasible.iter()) {
        if !known.contains(id.as_str()) {
            return Err(AnalysisError::UnknownPairId(id.clone()));
        }
    }

    let huet_linear = huet_left_linear(sys);
    let mut families = Vec::new();
    for (family, pairs) in generated {
        let in_huet = HUET_FAMILIES.contains(&family);
        let wanted =
            (in_huet && opts.route.huet()) || (!in_huet && opts.route.jk()) || DISPROOF_FAMILIES.contains(&family);
        if !wanted {
            continue;
        }
        let mode = if in_huet { Route::Huet.mode() } else { Route::Jk.mode() };
        let disprove = DISPROOF_FAMILIES.contains(&family);
        let mut outcomes: Vec<PairOutcome> =
            pairs.into_iter().map(|p| evaluate(&engine, p, mode, ann, disprove)).collect();
        if huet_linear && in_huet && family.is_cvp() {
            for o in &mut outcomes {
                if matches!(o.join, PairJoin::Unknown(_)) {
                    o.join = PairJoin::Joinable(PairEvidence::Waived(HUET_LINEAR));
                }
            }
        }
        families.push(FamilyReport { family, pairs: outcomes });
    }

    let mut validation = sys.equation_diagnostics();
    let e_terminating = opts.assume_e_termination || ann.e_terminating;
    let voided = !validation.is_empty();
    if !e_terminating {
        validation.push(Diagnostic {
            code: "e-termination-not-asserted",
            message: "no proof route applies without an E-termination assertion".into(),
        });
    } else if voided {
        validation.push(Diagnostic {
            code: "e-termination-impossible",
            message: "the E-termination assertion is void because the equations violate its necessary conditions"
                .into(),
        });
    }

    let outcome = |f: Family| families.iter().find(|r| r.family == f);
    let route_result = |route: Route, theorem: &'static str| {
        let blockers: Vec<Blocker> = route
            .families()
            .iter()
            .filter_map(|f| outcome(*f))
            .flat_map(|r| r.pairs.iter().filter_map(|o| blocker(o, route)))
            .collect();
        RouteResult { route, theorem, succeeded: blockers.is_empty() && e_terminating && !voided, blockers }
    };
    let mut routes = Vec::new();
    if opts.route.huet() {
        routes.push(route_result(Route::Huet, if huet_linear { HUET_LINEAR } else { HUET_THEOREM }));
    }
    if opts.route.jk() {
        let ps_pairs =
            [Family::CvpPsR, Family::CvpPsE].iter().any(|f| outcome(*f).is_some_and(|r| !r.pairs.is_empty()));
        let theorem = if !ps_pairs && jk_homogeneous(sys) { JK_COROLLARY } else { JK_CR_THEOREM };
        let no_dcp = route_result(Route::JkNoDcp, theorem);
        if no_dcp.succeeded {
            routes.push(no_dcp);
        } else {
            routes.push(route_result(Route::Jk, JK_THEOREM));
        }
    }

    let witness =
        families.iter().filter(|r| DISPROOF_FAMILIES.contains(&r.family)).flat_map(|r| r.pairs.iter()).find_map(|o| {
            match &o.join {
                PairJoin::NotJoinable { sigma, certificate } if o.refutes => {
                    Some((o.pair.id.clone(), sigma.clone(), certificate.clone()))
                }
                _ => None,
            }
        });

    let proved = routes.iter().find(|r| r.succeeded);
    let verdict = match (witness, proved) {
        (Some((pair, _, _)), Some(r)) => return Err(AnalysisError::Inconsistent { pair, route: r.route }),
        (Some((pair, sigma, certificate)), None) => Verdict::NotEConfluent { pair, sigma, certificate },
        (None, Some(r)) => Verdict::EConfluent { route: r.route, theorem: r.theorem },
        (None, None) => Verdict::Maybe { blockers: routes.iter().flat_map(|r| r.blockers.iter().cloned()).collect() },
    };

    let mut annotations_used: Vec<String> = Vec::new();
    for o in families.iter().flat_map(|r| r.pairs.iter()) {
        for a in &o.annotations {
            if !annotations_used.contains(a) {
                annotations_used.push(a.clone());
            }
        }
    }
    if ann.e_terminating && !opts.assume_e_termination {
        annotations_used.insert(0, "assume-e-terminating".to_string());
    }

    Ok(Report { verdict, routes, families, validation, bounds: opts.bounds, annotations_used })
}
