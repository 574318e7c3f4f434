//! Transition systems, finitely represented lasso paths, explicit path
//! universes, universe-relative HyperCTL* evaluation, and the two-player
//! model-checking game as an independent second semantics.
//!
//! Path quantifiers of the denotational semantics are restricted to the
//! members of an explicit [`PathUniverse`] starting at the right vertex.
//! This coincides with the true semantics whenever the universe contains,
//! for every reachable context, the needed witnesses and counterexamples;
//! callers are responsible for choosing adequate bounds.

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::trace::{canonical_lasso, Alphabet, Labels, UpTrace};
use std::collections::{BTreeMap, HashMap};

/// A finite Kripke structure. Every vertex has at least one outgoing edge.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSystem {
    alphabet: Alphabet,
    ids: Vec<String>,
    labels: Vec<Labels>,
    successors: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    initial: usize,
}

impl TransitionSystem {
    pub fn new(
        alphabet: Alphabet,
        vertices: Vec<(String, Labels)>,
        edges: Vec<(usize, usize)>,
        initial: usize,
    ) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidInput(
                "transition system needs a vertex".to_string(),
            ));
        }
        if initial >= vertices.len() {
            return Err(Error::InvalidInput(
                "initial vertex out of range".to_string(),
            ));
        }
        let mut ids = Vec::with_capacity(vertices.len());
        let mut labels = Vec::with_capacity(vertices.len());
        for (id, l) in vertices {
            if ids.contains(&id) {
                return Err(Error::InvalidInput(format!("duplicate vertex id {id:?}")));
            }
            ids.push(id);
            labels.push(l);
        }
        let mut edges = edges;
        edges.sort();
        edges.dedup();
        let mut successors = vec![Vec::new(); ids.len()];
        for &(a, b) in &edges {
            if a >= ids.len() || b >= ids.len() {
                return Err(Error::InvalidInput(
                    "edge endpoint out of range".to_string(),
                ));
            }
            successors[a].push(b);
        }
        for (v, succ) in successors.iter().enumerate() {
            if succ.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "vertex {:?} has no outgoing edge",
                    ids[v]
                )));
            }
        }
        Ok(TransitionSystem {
            alphabet,
            ids,
            labels,
            successors,
            edges,
            initial,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn vertex_by_id(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|i| i == id)
    }

    pub fn label(&self, v: usize) -> Labels {
        self.labels[v]
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.successors[v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a, b)).is_ok()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }
}

/// A finitely represented path `stem · cycle^ω` through a host system.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LassoPath {
    stem: Vec<usize>,
    cycle: Vec<usize>,
}

impl LassoPath {
    pub fn new(host: &TransitionSystem, stem: Vec<usize>, cycle: Vec<usize>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidInput(
                "lasso loop must be nonempty".to_string(),
            ));
        }
        let path = LassoPath { stem, cycle };
        if !path.valid_in(host) {
            return Err(Error::InvalidInput(
                "lasso is not a path of the host system".to_string(),
            ));
        }
        Ok(path)
    }

    pub fn stem(&self) -> &[usize] {
        &self.stem
    }

    pub fn cycle(&self) -> &[usize] {
        &self.cycle
    }

    /// Checks all consecutive pairs (stem, junction, and loop wrap).
    pub fn valid_in(&self, host: &TransitionSystem) -> bool {
        let n = host.vertex_count();
        if self.stem.iter().chain(self.cycle.iter()).any(|&v| v >= n) {
            return false;
        }
        for w in self.stem.windows(2) {
            if !host.has_edge(w[0], w[1]) {
                return false;
            }
        }
        if let Some(&last) = self.stem.last() {
            if !host.has_edge(last, self.cycle[0]) {
                return false;
            }
        }
        for w in self.cycle.windows(2) {
            if !host.has_edge(w[0], w[1]) {
                return false;
            }
        }
        host.has_edge(*self.cycle.last().unwrap(), self.cycle[0])
    }

    /// Vertex at position `n`.
    pub fn at(&self, n: usize) -> usize {
        if n < self.stem.len() {
            self.stem[n]
        } else {
            self.cycle[(n - self.stem.len()) % self.cycle.len()]
        }
    }

    pub fn first(&self) -> usize {
        self.at(0)
    }

    pub fn stem_len(&self) -> usize {
        self.stem.len()
    }

    pub fn cycle_len(&self) -> usize {
        self.cycle.len()
    }

    /// Suffix from position `j`; a suffix of a lasso path is a lasso path.
    pub fn suffix(&self, j: usize) -> LassoPath {
        if j < self.stem.len() {
            LassoPath {
                stem: self.stem[j..].to_vec(),
                cycle: self.cycle.clone(),
            }
        } else {
            let k = (j - self.stem.len()) % self.cycle.len();
            let mut cycle = self.cycle.clone();
            cycle.rotate_left(k);
            LassoPath {
                stem: Vec::new(),
                cycle,
            }
        }
    }

    pub fn canonical(&self) -> LassoPath {
        let (stem, cycle) = canonical_lasso(&self.stem, &self.cycle);
        LassoPath { stem, cycle }
    }

    /// The trace of the path: its label sequence, as an ultimately periodic
    /// trace over the host alphabet.
    pub fn trace(&self, host: &TransitionSystem) -> UpTrace {
        let stem = self.stem.iter().map(|&v| host.label(v)).collect();
        let cycle = self.cycle.iter().map(|&v| host.label(v)).collect();
        UpTrace::new(stem, cycle).expect("loop is nonempty")
    }
}

/// A finite, suffix-closed set of lasso paths over one host system; the
/// quantification domain of universe-relative evaluation.
#[derive(Debug, Clone)]
pub struct PathUniverse {
    host: TransitionSystem,
    paths: Vec<LassoPath>,
    by_start: HashMap<usize, Vec<usize>>,
}

impl PathUniverse {
    /// Canonicalizes, closes under suffixes, deduplicates, and indexes.
    pub fn new(host: TransitionSystem, paths: impl IntoIterator<Item = LassoPath>) -> Result<Self> {
        let mut all: Vec<LassoPath> = Vec::new();
        for p in paths {
            if !p.valid_in(&host) {
                return Err(Error::InvalidInput(
                    "universe path is not a path of the host system".to_string(),
                ));
            }
            let distinct = p.stem_len() + p.cycle_len();
            for j in 0..distinct {
                all.push(p.suffix(j).canonical());
            }
        }
        all.sort();
        all.dedup();
        let mut by_start: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, p) in all.iter().enumerate() {
            by_start.entry(p.first()).or_default().push(i);
        }
        Ok(PathUniverse {
            host,
            paths: all,
            by_start,
        })
    }

    pub fn host(&self) -> &TransitionSystem {
        &self.host
    }

    pub fn paths(&self) -> &[LassoPath] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn contains(&self, p: &LassoPath) -> bool {
        self.paths.binary_search(&p.canonical()).is_ok()
    }

    /// Universe members starting at `v`.
    pub fn paths_from(&self, v: usize) -> impl Iterator<Item = &LassoPath> {
        self.by_start
            .get(&v)
            .into_iter()
            .flatten()
            .map(move |&i| &self.paths[i])
    }
}

/// Enumerates every lasso path from every vertex within the given bounds,
/// canonicalized and suffix-closed.
pub fn enumerate_lassos(
    ts: &TransitionSystem,
    max_stem: usize,
    max_loop: usize,
    cap: usize,
) -> Result<PathUniverse> {
    if max_loop == 0 {
        return Err(Error::InvalidInput(
            "loop length bound must be at least 1".to_string(),
        ));
    }
    let mut found: Vec<LassoPath> = Vec::new();

    fn cycles_from(
        ts: &TransitionSystem,
        start: usize,
        max_loop: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        fn rec(
            ts: &TransitionSystem,
            seq: &mut Vec<usize>,
            max_loop: usize,
            out: &mut Vec<Vec<usize>>,
        ) {
            let last = *seq.last().unwrap();
            if ts.has_edge(last, seq[0]) {
                out.push(seq.clone());
            }
            if seq.len() < max_loop {
                for &next in ts.successors(last) {
                    seq.push(next);
                    rec(ts, seq, max_loop, out);
                    seq.pop();
                }
            }
        }
        let mut seq = vec![start];
        rec(ts, &mut seq, max_loop, out);
    }

    for start in 0..ts.vertex_count() {
        let mut stems: Vec<Vec<usize>> = Vec::new();
        let mut frontier = vec![vec![start]];
        stems.push(Vec::new()); // cycle starts directly at `start`
        for _ in 0..max_stem {
            let mut next = Vec::new();
            for stem in &frontier {
                for &succ in ts.successors(*stem.last().unwrap()) {
                    let mut s = stem.clone();
                    s.push(succ);
                    next.push(s);
                }
            }
            stems.extend(frontier);
            frontier = next;
        }
        stems.extend(frontier);
        // stems[0] is the pseudo-stem: cycle anchored at `start` itself;
        // the markers of real stems carry their own vertices
        for stem in stems {
            let mut cycles = Vec::new();
            if stem.is_empty() {
                cycles_from(ts, start, max_loop, &mut cycles);
            } else {
                if stem.len() > max_stem {
                    continue;
                }
                for &c0 in ts.successors(*stem.last().unwrap()) {
                    cycles_from(ts, c0, max_loop, &mut cycles);
                }
            }
            for cycle in cycles {
                let lasso = LassoPath {
                    stem: stem.clone(),
                    cycle,
                };
                debug_assert!(lasso.valid_in(ts));
                found.push(lasso);
                if found.len() > cap {
                    return Err(Error::ResourceLimit(format!(
                        "lasso enumeration exceeded {cap} paths"
                    )));
                }
            }
        }
    }
    PathUniverse::new(ts.clone(), found)
}

/// Partial map from path variables to lasso paths with recency stamps.
/// Shifting suffixes every bound path uniformly and preserves the stamps.
#[derive(Debug, Clone)]
pub struct PathAssignment {
    bindings: BTreeMap<String, (LassoPath, u64)>,
    next_stamp: u64,
    shift: usize,
}

impl Default for PathAssignment {
    fn default() -> Self {
        Self::empty()
    }
}

impl PathAssignment {
    pub fn empty() -> Self {
        PathAssignment {
            bindings: BTreeMap::new(),
            next_stamp: 0,
            shift: 0,
        }
    }

    pub fn bind(&self, var: impl Into<String>, path: LassoPath) -> Self {
        let mut next = self.clone();
        next.bindings.insert(var.into(), (path, next.next_stamp));
        next.next_stamp += 1;
        next
    }

    pub fn shifted(&self, j: usize) -> Self {
        let mut next = self.clone();
        for (p, _) in next.bindings.values_mut() {
            *p = p.suffix(j);
        }
        next.shift += j;
        next
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn path(&self, var: &str) -> Option<&LassoPath> {
        self.bindings.get(var).map(|(p, _)| p)
    }

    /// First vertex of the most recently added or changed binding; the host
    /// initial vertex when the assignment is empty.
    pub fn recent_vertex(&self, host: &TransitionSystem) -> usize {
        self.bindings
            .values()
            .max_by_key(|(_, stamp)| *stamp)
            .map(|(p, _)| p.first())
            .unwrap_or_else(|| host.initial())
    }

    fn most_recent_var(&self) -> Option<&str> {
        self.bindings
            .iter()
            .max_by_key(|(_, (_, stamp))| *stamp)
            .map(|(v, _)| v.as_str())
    }

    /// Only the binding map and the identity of the most recent variable
    /// matter for evaluation; this is the hashable reduction used as a game
    /// vertex component.
    fn canonical_key(&self) -> AssignmentKey {
        AssignmentKey {
            bindings: self
                .bindings
                .iter()
                .map(|(v, (p, _))| (v.clone(), p.clone()))
                .collect(),
            recent: self.most_recent_var().map(|s| s.to_string()),
        }
    }

    fn joint_bounds(&self) -> (usize, usize) {
        let stem = self
            .bindings
            .values()
            .map(|(p, _)| p.stem_len())
            .max()
            .unwrap_or(0);
        let mut period = 1usize;
        for (p, _) in self.bindings.values() {
            let l = p.cycle_len();
            let mut a = period;
            let mut b = l;
            while b != 0 {
                let r = a % b;
                a = b;
                b = r;
            }
            period = period / a * l;
        }
        (stem, period)
    }

    /// Witness bound for Until offsets: `S + 2P` of the folded joint lasso
    /// (one full extra period beyond `S + P`).
    ///
    /// Suffixing every bound path by `j` and by `j + P` yields identical
    /// assignments once `j >= S`: all stems are exhausted and every loop
    /// length divides `P`. Hence the truth of any subformula under the
    /// shifted assignment is periodic in the shift with period `P` from `S`
    /// on, and an Until witness at offset `S + P` or later is subsumed by
    /// the one a period earlier, whose prefix obligations are a subset.
    /// The extra period is slack.
    pub fn until_bound(&self) -> usize {
        let (s, p) = self.joint_bounds();
        s + 2 * p
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct AssignmentKey {
    bindings: Vec<(String, LassoPath)>,
    recent: Option<String>,
}

/// Universe-relative HyperCTL* satisfaction.
pub fn eval_hyperctlstar(
    ts: &TransitionSystem,
    universe: &PathUniverse,
    sentence: &Formula,
) -> Result<bool> {
    if universe.host() != ts {
        return Err(Error::UniverseMismatch);
    }
    if !sentence.is_ctlstar_wellformed() {
        return Err(Error::Dialect(
            "every temporal operator must be under a quantifier".to_string(),
        ));
    }
    if !sentence.is_sentence() {
        return Err(Error::UnboundVariable(
            sentence
                .free_variables()
                .into_iter()
                .collect::<Vec<_>>()
                .join(", "),
        ));
    }
    let core = sentence.desugar();
    eval_rec(ts, universe, &core, &PathAssignment::empty())
}

fn eval_rec(
    ts: &TransitionSystem,
    universe: &PathUniverse,
    f: &Formula,
    assignment: &PathAssignment,
) -> Result<bool> {
    match f {
        Formula::True => Ok(true),
        Formula::False => Ok(false),
        Formula::Atom { prop, var } => {
            let path = assignment
                .path(var)
                .ok_or_else(|| Error::UnboundVariable(var.clone()))?;
            let idx = ts
                .alphabet()
                .index_of(prop)
                .ok_or_else(|| Error::AlphabetMismatch(format!("unknown proposition {prop:?}")))?;
            Ok(ts.label(path.first()).contains(idx))
        }
        Formula::Not(a) => Ok(!eval_rec(ts, universe, a, assignment)?),
        Formula::Or(a, b) => {
            Ok(eval_rec(ts, universe, a, assignment)? || eval_rec(ts, universe, b, assignment)?)
        }
        Formula::Next(a) => eval_rec(ts, universe, a, &assignment.shifted(1)),
        Formula::Until(a, b) => {
            let bound = assignment.until_bound();
            for j in 0..bound {
                let here = assignment.shifted(j);
                if eval_rec(ts, universe, b, &here)? {
                    return Ok(true);
                }
                if !eval_rec(ts, universe, a, &here)? {
                    return Ok(false);
                }
            }
            Ok(false)
        }
        Formula::Exists(var, body) => {
            let from = assignment.recent_vertex(ts);
            for p in universe.paths_from(from) {
                if eval_rec(ts, universe, body, &assignment.bind(var.clone(), p.clone()))? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Forall(var, body) => {
            let from = assignment.recent_vertex(ts);
            for p in universe.paths_from(from) {
                if !eval_rec(ts, universe, body, &assignment.bind(var.clone(), p.clone()))? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        other => Err(Error::InvalidInput(format!(
            "non-core operator {other:?} after desugaring"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Player {
    Verifier,
    Falsifier,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Verifier => Player::Falsifier,
            Player::Falsifier => Player::Verifier,
        }
    }
}

/// A game position `(Π, ψ, b)`, or the auxiliary `(Π, ψ1 U ψ2, b, j)`
/// holding a chosen witness offset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct VertexKey {
    assignment: AssignmentKey,
    formula: Formula,
    negations: u8,
    witness: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct GameVertexInfo {
    pub formula: Formula,
    pub negations: u8,
    pub witness: Option<usize>,
    pub owner: Player,
    pub successors: Vec<usize>,
    /// `Some(winner)` on terminal vertices.
    pub terminal: Option<Player>,
    pub bindings: Vec<(String, LassoPath)>,
}

/// The model-checking game graph: a finite DAG, since every move either
/// shrinks the formula or resolves an Until offset.
#[derive(Debug)]
pub struct Game {
    vertices: Vec<GameVertexInfo>,
    initial: usize,
}

#[derive(Debug, Clone)]
pub struct GameSolution {
    pub winner: Player,
    /// For each non-terminal reachable vertex owned by the winner, the
    /// successor a winning strategy picks.
    pub strategy: HashMap<usize, usize>,
}

impl Game {
    pub fn vertices(&self) -> &[GameVertexInfo] {
        &self.vertices
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    /// Length (in moves) of the longest play from the initial vertex.
    pub fn longest_play(&self) -> usize {
        fn depth(g: &Game, v: usize, memo: &mut Vec<Option<usize>>) -> usize {
            if let Some(d) = memo[v] {
                return d;
            }
            let d = g.vertices[v]
                .successors
                .iter()
                .map(|&s| 1 + depth(g, s, memo))
                .max()
                .unwrap_or(0);
            memo[v] = Some(d);
            d
        }
        let mut memo = vec![None; self.vertices.len()];
        depth(self, self.initial, &mut memo)
    }

    /// Structured-text dump: one JSON line per vertex with ownership and
    /// successor list.
    pub fn dump(&self) -> String {
        use crate::syntax::print_formula;
        let mut out = String::new();
        for (i, v) in self.vertices.iter().enumerate() {
            let owner = match v.owner {
                Player::Verifier => "verifier",
                Player::Falsifier => "falsifier",
            };
            let value = serde_json::json!({
                "bindings": v.bindings.iter().map(|(var, p)| {
                    serde_json::json!({
                        "cycle": p.cycle(),
                        "stem": p.stem(),
                        "var": var,
                    })
                }).collect::<Vec<_>>(),
                "formula": print_formula(&v.formula),
                "id": i,
                "negations": v.negations,
                "owner": owner,
                "successors": v.successors,
                "terminal": v.terminal.map(|p| p == Player::Verifier),
                "witness": v.witness,
            });
            out.push_str(&value.to_string());
            out.push('\n');
        }
        out
    }
}

/// Builds the model-checking game for a HyperCTL* sentence.
pub fn build_game(
    ts: &TransitionSystem,
    universe: &PathUniverse,
    sentence: &Formula,
) -> Result<Game> {
    if universe.host() != ts {
        return Err(Error::UniverseMismatch);
    }
    if !sentence.is_ctlstar_wellformed() || !sentence.is_sentence() {
        return Err(Error::Dialect(
            "game needs a well-formed HyperCTL* sentence".to_string(),
        ));
    }
    let core = sentence.desugar();
    let mut builder = GameBuilder {
        ts,
        universe,
        vertices: Vec::new(),
        index: HashMap::new(),
    };
    let initial = builder.vertex(&PathAssignment::empty(), &core, 0, None)?;
    Ok(Game {
        vertices: builder.vertices,
        initial,
    })
}

struct GameBuilder<'a> {
    ts: &'a TransitionSystem,
    universe: &'a PathUniverse,
    vertices: Vec<GameVertexInfo>,
    index: HashMap<VertexKey, usize>,
}

impl<'a> GameBuilder<'a> {
    fn vertex(
        &mut self,
        assignment: &PathAssignment,
        f: &Formula,
        negations: u8,
        witness: Option<usize>,
    ) -> Result<usize> {
        let key = VertexKey {
            assignment: assignment.canonical_key(),
            formula: f.clone(),
            negations,
            witness,
        };
        if let Some(&i) = self.index.get(&key) {
            return Ok(i);
        }
        let id = self.vertices.len();
        self.vertices.push(GameVertexInfo {
            formula: f.clone(),
            negations,
            witness,
            owner: Player::Falsifier,
            successors: Vec::new(),
            terminal: None,
            bindings: key.assignment.bindings.clone(),
        });
        self.index.insert(key, id);

        let b0 = negations == 0;
        let (owner, successors, terminal) = match (f, witness) {
            (Formula::True, _) => {
                let win = if b0 {
                    Player::Verifier
                } else {
                    Player::Falsifier
                };
                (Player::Falsifier, Vec::new(), Some(win))
            }
            (Formula::False, _) => {
                let win = if b0 {
                    Player::Falsifier
                } else {
                    Player::Verifier
                };
                (Player::Falsifier, Vec::new(), Some(win))
            }
            (Formula::Atom { prop, var }, _) => {
                let path = assignment
                    .path(var)
                    .ok_or_else(|| Error::UnboundVariable(var.clone()))?;
                let idx = self.ts.alphabet().index_of(prop).ok_or_else(|| {
                    Error::AlphabetMismatch(format!("unknown proposition {prop:?}"))
                })?;
                let holds = self.ts.label(path.first()).contains(idx);
                let win = if holds == b0 {
                    Player::Verifier
                } else {
                    Player::Falsifier
                };
                (Player::Falsifier, Vec::new(), Some(win))
            }
            (Formula::Not(a), _) => {
                let s = self.vertex(assignment, a, negations ^ 1, None)?;
                (Player::Falsifier, vec![s], None)
            }
            (Formula::Or(x, y), _) => {
                let sx = self.vertex(assignment, x, negations, None)?;
                let sy = self.vertex(assignment, y, negations, None)?;
                let owner = if b0 {
                    Player::Verifier
                } else {
                    Player::Falsifier
                };
                (owner, vec![sx, sy], None)
            }
            (Formula::Next(a), _) => {
                let s = self.vertex(&assignment.shifted(1), a, negations, None)?;
                (Player::Falsifier, vec![s], None)
            }
            (Formula::Until(..), None) => {
                let bound = assignment.until_bound();
                let mut succ = Vec::with_capacity(bound);
                for j in 0..bound {
                    succ.push(self.vertex(assignment, f, negations, Some(j))?);
                }
                let owner = if b0 {
                    Player::Verifier
                } else {
                    Player::Falsifier
                };
                (owner, succ, None)
            }
            (Formula::Until(x, y), Some(j)) => {
                let mut succ = Vec::with_capacity(j + 1);
                succ.push(self.vertex(&assignment.shifted(j), y, negations, None)?);
                for j2 in 0..j {
                    succ.push(self.vertex(&assignment.shifted(j2), x, negations, None)?);
                }
                // the player who picked j defends it; the opponent
                // challenges one obligation
                let owner = if b0 {
                    Player::Falsifier
                } else {
                    Player::Verifier
                };
                (owner, succ, None)
            }
            (Formula::Exists(var, body), _) => {
                let from = assignment.recent_vertex(self.ts);
                let mut succ = Vec::new();
                for p in self.universe.paths_from(from) {
                    succ.push(self.vertex(
                        &assignment.bind(var.clone(), p.clone()),
                        body,
                        negations,
                        None,
                    )?);
                }
                let owner = if b0 {
                    Player::Verifier
                } else {
                    Player::Falsifier
                };
                (owner, succ, None)
            }
            (Formula::Forall(var, body), _) => {
                let from = assignment.recent_vertex(self.ts);
                let mut succ = Vec::new();
                for p in self.universe.paths_from(from) {
                    succ.push(self.vertex(
                        &assignment.bind(var.clone(), p.clone()),
                        body,
                        negations,
                        None,
                    )?);
                }
                let owner = if b0 {
                    Player::Falsifier
                } else {
                    Player::Verifier
                };
                (owner, succ, None)
            }
            (other, _) => {
                return Err(Error::InvalidInput(format!(
                    "non-core operator {other:?} in game construction"
                )))
            }
        };
        // a choice vertex with no moves loses for its owner
        let terminal = if terminal.is_none() && successors.is_empty() {
            Some(owner.opponent())
        } else {
            terminal
        };
        let v = &mut self.vertices[id];
        v.owner = owner;
        v.successors = successors;
        v.terminal = terminal;
        Ok(id)
    }
}

/// Solves the game by backward induction over the finite DAG.
pub fn solve_game(game: &Game) -> GameSolution {
    fn winner(game: &Game, v: usize, memo: &mut Vec<Option<Player>>) -> Player {
        if let Some(w) = memo[v] {
            return w;
        }
        let info = &game.vertices[v];
        let w = if let Some(t) = info.terminal {
            t
        } else {
            let owner = info.owner;
            if info
                .successors
                .iter()
                .any(|&s| winner(game, s, memo) == owner)
            {
                owner
            } else {
                owner.opponent()
            }
        };
        memo[v] = Some(w);
        w
    }

    let mut memo = vec![None; game.vertices.len()];
    let overall = winner(game, game.initial, &mut memo);
    let mut strategy = HashMap::new();
    for (v, info) in game.vertices.iter().enumerate() {
        if info.terminal.is_some() || info.owner != overall || info.successors.is_empty() {
            continue;
        }
        let pick = info
            .successors
            .iter()
            .position(|&s| winner(game, s, &mut memo) == overall)
            .unwrap_or(0);
        strategy.insert(v, info.successors[pick]);
    }
    GameSolution {
        winner: overall,
        strategy,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Dialect};

    fn single_vertex_a() -> (TransitionSystem, PathUniverse) {
        let alpha = Alphabet::new(["a"]).unwrap();
        let l = alpha.labels(&["a"]).unwrap();
        let ts = TransitionSystem::new(alpha, vec![("v".to_string(), l)], vec![(0, 0)], 0).unwrap();
        let u = enumerate_lassos(&ts, 0, 1, 1000).unwrap();
        (ts, u)
    }

    fn ctl(s: &str) -> Formula {
        parse_formula(s, Dialect::HyperCtlStar).unwrap()
    }

    #[test]
    fn vertex_without_successor_rejected() {
        let alpha = Alphabet::new(["a"]).unwrap();
        let err = TransitionSystem::new(
            alpha,
            vec![
                ("v".to_string(), Labels::empty()),
                ("w".to_string(), Labels::empty()),
            ],
            vec![(0, 1)],
            0,
        );
        assert!(err.is_err());
    }

    #[test]
    fn single_vertex_eval_and_game() {
        let (ts, u) = single_vertex_a();
        assert!(eval_hyperctlstar(&ts, &u, &ctl("exists p. a[p]")).unwrap());
        assert!(!eval_hyperctlstar(&ts, &u, &ctl("exists p. !a[p]")).unwrap());

        let g = build_game(&ts, &u, &ctl("exists p. a[p]")).unwrap();
        assert_eq!(solve_game(&g).winner, Player::Verifier);
        let g = build_game(&ts, &u, &ctl("exists p. !a[p]")).unwrap();
        assert_eq!(solve_game(&g).winner, Player::Falsifier);
    }

    #[test]
    fn negation_vertex_has_unique_successor() {
        let (ts, u) = single_vertex_a();
        let g = build_game(&ts, &u, &ctl("exists p. !a[p]")).unwrap();
        let neg = g
            .vertices()
            .iter()
            .find(|v| matches!(v.formula, Formula::Not(_)))
            .expect("negation vertex present");
        assert_eq!(neg.successors.len(), 1);
        let child = &g.vertices()[neg.successors[0]];
        assert_eq!(child.negations, neg.negations ^ 1);
    }

    #[test]
    fn atom_terminal_winner_matches_label() {
        let (ts, u) = single_vertex_a();
        let g = build_game(&ts, &u, &ctl("exists p. a[p]")).unwrap();
        let term = g
            .vertices()
            .iter()
            .find(|v| matches!(v.formula, Formula::Atom { .. }) && v.negations == 0)
            .expect("atom vertex present");
        assert_eq!(term.terminal, Some(Player::Verifier));
    }

    #[test]
    fn enumerate_lasso_bounds() {
        let (ts, _) = single_vertex_a();
        let u = enumerate_lassos(&ts, 0, 1, 10).unwrap();
        assert_eq!(u.len(), 1);
        assert!(matches!(
            enumerate_lassos(&ts, 0, 0, 10),
            Err(Error::InvalidInput(_))
        ));

        // two-vertex cycle: every start vertex is represented
        let alpha = Alphabet::new(["a"]).unwrap();
        let ts2 = TransitionSystem::new(
            alpha.clone(),
            vec![
                ("x".to_string(), alpha.labels(&["a"]).unwrap()),
                ("y".to_string(), Labels::empty()),
            ],
            vec![(0, 1), (1, 0)],
            0,
        )
        .unwrap();
        let u2 = enumerate_lassos(&ts2, 1, 2, 1000).unwrap();
        let starts: std::collections::BTreeSet<usize> =
            u2.paths().iter().map(|p| p.first()).collect();
        assert_eq!(starts.len(), 2);
    }

    #[test]
    fn rcnt_anchors_nested_quantifiers() {
        // v0 -> {v0, v1}, v1 -> v1; binding a path starting at v1 means
        // nested quantifiers see only paths from v1
        let alpha = Alphabet::new(["a", "b"]).unwrap();
        let ts = TransitionSystem::new(
            alpha.clone(),
            vec![
                ("v0".to_string(), alpha.labels(&["a"]).unwrap()),
                ("v1".to_string(), alpha.labels(&["b"]).unwrap()),
            ],
            vec![(0, 0), (0, 1), (1, 1)],
            0,
        )
        .unwrap();
        let u = enumerate_lassos(&ts, 2, 2, 10_000).unwrap();
        // after stepping into v1 every quantified path starts at v1
        let f = ctl("exists p. X (b[p] & forall q. b[q])");
        assert!(eval_hyperctlstar(&ts, &u, &f).unwrap());
    }

    #[test]
    fn play_length_is_bounded_by_twice_depth() {
        let (ts, u) = single_vertex_a();
        for s in [
            "exists p. a[p]",
            "exists p. a[p] U !a[p]",
            "forall p. exists q. (a[p] & a[q]) U a[q]",
            "exists p. X X a[p]",
        ] {
            let f = ctl(s);
            let g = build_game(&ts, &u, &f).unwrap();
            let d = f.desugar().nesting_depth();
            assert!(
                g.longest_play() <= 2 * d,
                "{s}: longest play {} exceeds 2d = {}",
                g.longest_play(),
                2 * d
            );
        }
    }

    #[test]
    fn universe_mismatch_detected() {
        let (ts, _) = single_vertex_a();
        let alpha = Alphabet::new(["a"]).unwrap();
        let other = TransitionSystem::new(
            alpha.clone(),
            vec![("w".to_string(), Labels::empty())],
            vec![(0, 0)],
            0,
        )
        .unwrap();
        let u = enumerate_lassos(&other, 0, 1, 10).unwrap();
        assert!(matches!(
            eval_hyperctlstar(&ts, &u, &ctl("exists p. a[p]")),
            Err(Error::UniverseMismatch)
        ));
    }

    #[test]
    fn suffix_closure_materialization_is_invariant() {
        let alpha = Alphabet::new(["a", "b"]).unwrap();
        let ts = TransitionSystem::new(
            alpha.clone(),
            vec![
                ("v0".to_string(), alpha.labels(&["a"]).unwrap()),
                ("v1".to_string(), alpha.labels(&["b"]).unwrap()),
            ],
            vec![(0, 1), (1, 0)],
            0,
        )
        .unwrap();
        let base = vec![LassoPath::new(&ts, vec![0], vec![1, 0]).unwrap()];
        let u1 = PathUniverse::new(ts.clone(), base.clone()).unwrap();
        let mut explicit = base.clone();
        for p in &base {
            for j in 0..(p.stem_len() + p.cycle_len()) {
                explicit.push(p.suffix(j));
            }
        }
        let u2 = PathUniverse::new(ts.clone(), explicit).unwrap();
        assert_eq!(u1.paths(), u2.paths());
        for s in [
            "exists p. a[p]",
            "exists p. X b[p]",
            "forall p. a[p] | b[p]",
        ] {
            let f = ctl(s);
            assert_eq!(
                eval_hyperctlstar(&ts, &u1, &f).unwrap(),
                eval_hyperctlstar(&ts, &u2, &f).unwrap()
            );
        }
    }

    #[test]
    fn game_matches_eval_on_tf_like_system() {
        let alpha = Alphabet::new(["b0", "b1", "fbt"]).unwrap();
        let ts = TransitionSystem::new(
            alpha.clone(),
            vec![
                ("init".to_string(), Labels::empty()),
                ("v0".to_string(), alpha.labels(&["fbt", "b0"]).unwrap()),
                ("v1".to_string(), alpha.labels(&["fbt", "b1"]).unwrap()),
            ],
            vec![(0, 1), (0, 2), (1, 1), (1, 2), (2, 1), (2, 2)],
            0,
        )
        .unwrap();
        let u = enumerate_lassos(&ts, 2, 2, 100_000).unwrap();
        for s in [
            "exists p. X (fbt[p] & b1[p])",
            "forall p. !fbt[p]",
            "exists p. X (b0[p] U b1[p])",
            "forall p. exists q. X (b0[q] <-> b0[p])",
        ] {
            let f = ctl(s);
            let direct = eval_hyperctlstar(&ts, &u, &f).unwrap();
            let g = build_game(&ts, &u, &f).unwrap();
            let via_game = solve_game(&g).winner == Player::Verifier;
            assert_eq!(direct, via_game, "{s}");
        }
    }
}
