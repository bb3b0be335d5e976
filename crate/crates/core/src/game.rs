//! The coin-and-bucket game.
//!
//! A state is a row of buckets, each holding some heads and some tails.
//! A move takes one coin out of a bucket and drops it into a bucket; the
//! incoming coin must take the orientation that is strictly less common in
//! the destination, and the mover chooses when the destination is tied
//! (an empty bucket is a 0-0 tie). A state is oriented when no bucket mixes
//! orientations, and orientable when some legal sequence reaches one.

use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Coin {
    H,
    T,
}

impl Coin {
    pub fn flip(self) -> Coin {
        match self {
            Coin::H => Coin::T,
            Coin::T => Coin::H,
        }
    }
}

impl fmt::Display for Coin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coin::H => "H",
            Coin::T => "T",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Bucket {
    pub heads: u32,
    pub tails: u32,
}

impl Bucket {
    pub fn new(heads: u32, tails: u32) -> Self {
        Bucket { heads, tails }
    }

    pub fn count(&self, c: Coin) -> u32 {
        match c {
            Coin::H => self.heads,
            Coin::T => self.tails,
        }
    }

    fn count_mut(&mut self, c: Coin) -> &mut u32 {
        match c {
            Coin::H => &mut self.heads,
            Coin::T => &mut self.tails,
        }
    }

    pub fn total(&self) -> u32 {
        self.heads + self.tails
    }

    pub fn is_oriented(&self) -> bool {
        self.heads == 0 || self.tails == 0
    }

    pub fn is_tied(&self) -> bool {
        self.heads == self.tails
    }

    /// The strictly less common orientation, if there is one.
    pub fn minority(&self) -> Option<Coin> {
        use std::cmp::Ordering::*;
        match self.heads.cmp(&self.tails) {
            Less => Some(Coin::H),
            Greater => Some(Coin::T),
            Equal => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GameState {
    pub buckets: Vec<Bucket>,
}

impl GameState {
    pub fn empty(k: usize) -> Self {
        GameState { buckets: vec![Bucket::default(); k] }
    }

    pub fn from_pairs(pairs: &[(u32, u32)]) -> Self {
        GameState { buckets: pairs.iter().map(|&(h, t)| Bucket::new(h, t)).collect() }
    }

    /// Builds a state by dropping coins one at a time (no game rule applied).
    pub fn from_coins(k: usize, coins: &[(usize, Coin)]) -> Self {
        let mut s = GameState::empty(k);
        for &(b, c) in coins {
            *s.buckets[b].count_mut(c) += 1;
        }
        s
    }

    pub fn pairs(&self) -> Vec<(u32, u32)> {
        self.buckets.iter().map(|b| (b.heads, b.tails)).collect()
    }

    pub fn total_coins(&self) -> u32 {
        self.buckets.iter().map(Bucket::total).sum()
    }

    pub fn is_oriented(&self) -> bool {
        self.buckets.iter().all(Bucket::is_oriented)
    }
}

impl fmt::Display for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, b) in self.buckets.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({}H,{}T)", b.heads, b.tails)?;
        }
        f.write_str("]")
    }
}

/// `c_{k,n}`: `k` buckets, the first holding `floor(n/2)` heads and `ceil(n/2)` tails.
pub fn initial_ckn(k: usize, n: u32) -> GameState {
    assert!(k >= 1, "need at least one bucket");
    let mut s = GameState::empty(k);
    s.buckets[0] = Bucket::new(n / 2, n - n / 2);
    s
}

/// Ordered by (source, removed, destination, tie choice) so that move lists
/// compare lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Move {
    pub source: usize,
    pub removed: Coin,
    pub destination: usize,
    pub tie_choice: Option<Coin>,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}->{}", self.source + 1, self.removed, self.destination + 1)?;
        if let Some(c) = self.tie_choice {
            write!(f, "[{c}]")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rules {
    pub allow_self_moves: bool,
}

impl Default for Rules {
    fn default() -> Self {
        Rules { allow_self_moves: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MoveError {
    #[error("bucket {index} does not exist ({buckets} buckets)")]
    NoSuchBucket { index: usize, buckets: usize },
    #[error("self-moves are disabled (bucket {0})")]
    SelfMoveDisabled(usize),
    #[error("bucket {bucket} holds no {coin} coin")]
    NoSuchCoin { bucket: usize, coin: Coin },
    #[error("destination {0} is tied, a tie choice is required")]
    MissingTieChoice(usize),
    #[error("destination {0} is not tied, a tie choice is not allowed")]
    UnexpectedTieChoice(usize),
}

/// Orientation the incoming coin takes; `None` when the mover must choose.
///
/// For a self-move the destination is judged after the coin has left it.
fn forced_orientation(s: &GameState, m: &Move) -> Option<Coin> {
    let mut dest = s.buckets[m.destination];
    if m.source == m.destination {
        *dest.count_mut(m.removed) -= 1;
    }
    dest.minority()
}

/// The coin a move must deliver, or `None` when the destination is tied
/// and the mover chooses.
pub fn forced_coin(s: &GameState, source: usize, removed: Coin, destination: usize) -> Option<Coin> {
    forced_orientation(s, &Move { source, removed, destination, tie_choice: None })
}

pub fn apply_move(s: &GameState, m: &Move, rules: Rules) -> Result<GameState, MoveError> {
    let k = s.buckets.len();
    for &index in &[m.source, m.destination] {
        if index >= k {
            return Err(MoveError::NoSuchBucket { index, buckets: k });
        }
    }
    if m.source == m.destination && !rules.allow_self_moves {
        return Err(MoveError::SelfMoveDisabled(m.source));
    }
    if s.buckets[m.source].count(m.removed) == 0 {
        return Err(MoveError::NoSuchCoin { bucket: m.source, coin: m.removed });
    }
    let incoming = match (forced_orientation(s, m), m.tie_choice) {
        (Some(c), None) => c,
        (None, Some(c)) => c,
        (None, None) => return Err(MoveError::MissingTieChoice(m.destination)),
        (Some(_), Some(_)) => return Err(MoveError::UnexpectedTieChoice(m.destination)),
    };
    let mut out = s.clone();
    *out.buckets[m.source].count_mut(m.removed) -= 1;
    *out.buckets[m.destination].count_mut(incoming) += 1;
    Ok(out)
}

/// Every legal move from `s`, in ascending [`Move`] order.
pub fn legal_moves(s: &GameState, rules: Rules) -> Vec<Move> {
    let k = s.buckets.len();
    let mut out = Vec::new();
    for source in 0..k {
        for removed in [Coin::H, Coin::T] {
            if s.buckets[source].count(removed) == 0 {
                continue;
            }
            for destination in 0..k {
                if source == destination && !rules.allow_self_moves {
                    continue;
                }
                let probe = Move { source, removed, destination, tie_choice: None };
                match forced_orientation(s, &probe) {
                    Some(_) => out.push(probe),
                    None => {
                        out.push(Move { tie_choice: Some(Coin::H), ..probe });
                        out.push(Move { tie_choice: Some(Coin::T), ..probe });
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchResult {
    Orientable(Vec<Move>),
    Unorientable { states: usize },
    BudgetExceeded { states: usize },
}

impl SearchResult {
    pub fn is_orientable(&self) -> bool {
        matches!(self, SearchResult::Orientable(_))
    }

    pub fn is_unorientable(&self) -> bool {
        matches!(self, SearchResult::Unorientable { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            SearchResult::Orientable(_) => "ORIENTABLE",
            SearchResult::Unorientable { .. } => "UNORIENTABLE",
            SearchResult::BudgetExceeded { .. } => "BUDGET_EXCEEDED",
        }
    }
}

fn key(s: &GameState) -> Vec<u32> {
    s.buckets.iter().flat_map(|b| [b.heads, b.tails]).collect()
}

/// Breadth-first search over bucket-count vectors.
///
/// Successors are generated in ascending move order and a state keeps the
/// parent that discovered it first, so the returned witness is a shortest
/// one and the lexicographically least among the shortest. `budget` bounds
/// the number of distinct states expanded.
pub fn orientable(s: &GameState, budget: usize, rules: Rules) -> SearchResult {
    assert!(budget >= 1, "budget must be positive");
    if s.is_oriented() {
        return SearchResult::Orientable(Vec::new());
    }
    let mut parent: HashMap<Vec<u32>, Option<(Vec<u32>, Move)>> = HashMap::new();
    let mut queue = VecDeque::new();
    parent.insert(key(s), None);
    queue.push_back(s.clone());
    let mut expanded = 0usize;
    while let Some(cur) = queue.pop_front() {
        if expanded >= budget {
            return SearchResult::BudgetExceeded { states: expanded };
        }
        expanded += 1;
        let cur_key = key(&cur);
        for m in legal_moves(&cur, rules) {
            let next = apply_move(&cur, &m, rules).expect("generated moves are legal");
            let nk = key(&next);
            if parent.contains_key(&nk) {
                continue;
            }
            parent.insert(nk.clone(), Some((cur_key.clone(), m)));
            if next.is_oriented() {
                return SearchResult::Orientable(trace(&parent, nk));
            }
            queue.push_back(next);
        }
    }
    SearchResult::Unorientable { states: expanded }
}

fn trace(parent: &HashMap<Vec<u32>, Option<(Vec<u32>, Move)>>, mut at: Vec<u32>) -> Vec<Move> {
    let mut moves = Vec::new();
    while let Some(Some((prev, m))) = parent.get(&at) {
        moves.push(*m);
        at = prev.clone();
    }
    moves.reverse();
    moves
}

/// Replays `moves` from `s`, returning the final state.
pub fn replay(s: &GameState, moves: &[Move], rules: Rules) -> Result<GameState, MoveError> {
    let mut cur = s.clone();
    for m in moves {
        cur = apply_move(&cur, m, rules)?;
    }
    Ok(cur)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cascade {
    pub final_state: GameState,
    pub moves: Vec<Move>,
    pub success: bool,
}

/// The halving strategy: move every head of bucket `i` into bucket `i+1`,
/// choosing tails on ties, for `i = 1..k-1`.
pub fn greedy_cascade(k: usize, n: u32) -> Cascade {
    let rules = Rules::default();
    let mut s = initial_ckn(k, n);
    let mut moves = Vec::new();
    for i in 0..k.saturating_sub(1) {
        while s.buckets[i].heads > 0 {
            let mut m = Move { source: i, removed: Coin::H, destination: i + 1, tie_choice: None };
            if s.buckets[i + 1].is_tied() {
                m.tie_choice = Some(Coin::T);
            }
            s = apply_move(&s, &m, rules).expect("cascade moves are legal");
            moves.push(m);
        }
    }
    let success = s.is_oriented();
    Cascade { final_state: s, moves, success }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub k: usize,
    pub verdicts: Vec<(u32, String)>,
    /// Largest `n` such that `c_{k,m}` is orientable for every `m <= n` in range.
    pub threshold: Option<u32>,
    /// Any `n >= 2^k` reported orientable.
    pub contradictions: Vec<u32>,
    pub budget_exceeded: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdTable {
    pub rules: Rules,
    pub n_max: u32,
    pub rows: Vec<ThresholdRow>,
}

impl ThresholdTable {
    /// True when every row's threshold equals `2^k - 1` and nothing contradicts it.
    pub fn matches_proof_bound(&self) -> bool {
        self.rows.iter().all(|r| {
            let bound = (1u32 << r.k) - 1;
            r.contradictions.is_empty() && r.budget_exceeded.is_empty() && r.threshold == Some(bound.min(self.n_max))
        })
    }

    /// Rows whose data refutes orientability of every `n <= 2^(k+1) - 1`.
    pub fn refutes_text_bound(&self) -> Vec<usize> {
        self.rows
            .iter()
            .filter(|r| {
                let claimed = (1u32 << (r.k + 1)) - 1;
                r.verdicts.iter().any(|(n, v)| *n <= claimed && v == "UNORIENTABLE")
            })
            .map(|r| r.k)
            .collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("self-moves: {}\n", if self.rules.allow_self_moves { "allowed" } else { "disallowed" }));
        out.push_str(" k |");
        for n in 1..=self.n_max {
            out.push_str(&format!("{n:>3}"));
        }
        out.push_str(" | threshold  2^k-1  2^(k+1)-1\n");
        for r in &self.rows {
            out.push_str(&format!("{:>2} |", r.k));
            for (_, v) in &r.verdicts {
                let c = match v.as_str() {
                    "ORIENTABLE" => "O",
                    "UNORIENTABLE" => "U",
                    _ => "?",
                };
                out.push_str(&format!("{c:>3}"));
            }
            let t = r.threshold.map_or("-".to_string(), |t| t.to_string());
            out.push_str(&format!(" | {:>9}  {:>5}  {:>9}", t, (1u32 << r.k) - 1, (1u32 << (r.k + 1)) - 1));
            if !r.contradictions.is_empty() {
                out.push_str(&format!("  CONTRADICTS n>=2^k at {:?}", r.contradictions));
            }
            out.push('\n');
        }
        let refuted = self.refutes_text_bound();
        if refuted.is_empty() {
            out.push_str("orientable for all n <= 2^(k+1)-1: not refuted in range\n");
        } else {
            out.push_str(&format!("orientable for all n <= 2^(k+1)-1: refuted for k in {refuted:?}\n"));
        }
        out.push_str(&format!(
            "threshold equals 2^k-1 for every k: {}\n",
            if self.matches_proof_bound() { "yes" } else { "no" }
        ));
        out
    }
}

pub fn threshold_table(k_max: usize, n_max: u32, budget: usize, rules: Rules) -> ThresholdTable {
    let mut rows = Vec::new();
    for k in 1..=k_max {
        let mut verdicts = Vec::new();
        let mut threshold = None;
        let mut all_orientable = true;
        let mut contradictions = Vec::new();
        let mut budget_exceeded = Vec::new();
        for n in 1..=n_max {
            let r = orientable(&initial_ckn(k, n), budget, rules);
            match &r {
                SearchResult::Orientable(_) => {
                    if all_orientable {
                        threshold = Some(n);
                    }
                    if (n as u64) >= (1u64 << k) {
                        contradictions.push(n);
                    }
                }
                SearchResult::Unorientable { .. } => all_orientable = false,
                SearchResult::BudgetExceeded { .. } => {
                    all_orientable = false;
                    budget_exceeded.push(n);
                }
            }
            verdicts.push((n, r.label().to_string()));
        }
        rows.push(ThresholdRow { k, verdicts, threshold, contradictions, budget_exceeded });
    }
    ThresholdTable { rules, n_max, rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    const R: Rules = Rules { allow_self_moves: true };

    #[test]
    fn ckn_shapes() {
        assert_eq!(initial_ckn(2, 3).pairs(), vec![(1, 2), (0, 0)]);
        assert_eq!(initial_ckn(1, 0).pairs(), vec![(0, 0)]);
        assert_eq!(initial_ckn(3, 7).pairs(), vec![(3, 4), (0, 0), (0, 0)]);
    }

    #[test]
    fn move_into_empty_bucket_takes_choice() {
        let s = GameState::from_pairs(&[(1, 2), (0, 0)]);
        let m = Move { source: 0, removed: Coin::H, destination: 1, tie_choice: Some(Coin::T) };
        assert_eq!(apply_move(&s, &m, R).unwrap().pairs(), vec![(0, 2), (0, 1)]);

        let s = GameState::from_pairs(&[(0, 0), (1, 2)]);
        let m = Move { source: 1, removed: Coin::T, destination: 0, tie_choice: Some(Coin::H) };
        assert_eq!(apply_move(&s, &m, R).unwrap().pairs(), vec![(1, 0), (1, 1)]);
    }

    #[test]
    fn illegal_moves_name_the_rule() {
        let s = GameState::from_pairs(&[(0, 3), (1, 0)]);
        let m = Move { source: 0, removed: Coin::H, destination: 1, tie_choice: None };
        assert_eq!(apply_move(&s, &m, R), Err(MoveError::NoSuchCoin { bucket: 0, coin: Coin::H }));
        let m = Move { source: 0, removed: Coin::T, destination: 1, tie_choice: Some(Coin::H) };
        assert_eq!(apply_move(&s, &m, R), Err(MoveError::UnexpectedTieChoice(1)));
        let s = GameState::from_pairs(&[(0, 3), (0, 0)]);
        let m = Move { source: 0, removed: Coin::T, destination: 1, tie_choice: None };
        assert_eq!(apply_move(&s, &m, R), Err(MoveError::MissingTieChoice(1)));
        let m = Move { source: 0, removed: Coin::T, destination: 0, tie_choice: None };
        assert_eq!(apply_move(&s, &m, Rules { allow_self_moves: false }), Err(MoveError::SelfMoveDisabled(0)));
    }

    #[test]
    fn self_move_judges_destination_after_removal() {
        // (1H,1T): removing H leaves (0H,1T), so the coin must come back as H.
        let s = GameState::from_pairs(&[(1, 1)]);
        let m = Move { source: 0, removed: Coin::H, destination: 0, tie_choice: None };
        assert_eq!(apply_move(&s, &m, R).unwrap().pairs(), vec![(1, 1)]);
    }

    #[test]
    fn orientation_predicate() {
        assert!(GameState::empty(3).is_oriented());
        assert!(GameState::from_pairs(&[(2, 0), (0, 5)]).is_oriented());
        assert!(!GameState::from_pairs(&[(1, 1)]).is_oriented());
    }

    #[test]
    fn small_verdicts() {
        assert!(orientable(&initial_ckn(1, 2), 1000, R).is_unorientable());
        assert!(orientable(&initial_ckn(2, 3), 1000, R).is_orientable());
        assert_eq!(orientable(&GameState::from_pairs(&[(0, 4)]), 1, R), SearchResult::Orientable(vec![]));
    }

    #[test]
    fn budget_is_reported() {
        let r = orientable(&initial_ckn(3, 12), 3, R);
        assert_eq!(r, SearchResult::BudgetExceeded { states: 3 });
    }

    #[test]
    fn cascade_k3_n7() {
        let c = greedy_cascade(3, 7);
        assert_eq!(c.final_state.pairs(), vec![(0, 4), (0, 2), (0, 1)]);
        assert!(c.success);
        let c = greedy_cascade(1, 1);
        assert!(c.moves.is_empty() && c.success);
        let c = greedy_cascade(1, 2);
        assert!(c.moves.is_empty() && !c.success);
    }
}
