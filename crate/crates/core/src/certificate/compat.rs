use super::model::{BoxFrame, BoxId, Certificate, FrameId};
use super::profile::Profile;
use super::CertError;
use crate::game::{orientable, Coin, GameState, Rules, SearchResult};
use crate::patterns::Site;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// A partial configuration: per site, a partial symbol assigning coins to
/// some `(θ, σ)` components. Components are written at most once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "ConfigFile", try_from = "ConfigFile")]
pub struct Configuration {
    components: usize,
    /// Value of every component never assigned.
    pub fill: Option<Coin>,
    entries: BTreeMap<Site, BTreeMap<usize, Coin>>,
    writes: u64,
    rejected: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ConfigFile {
    components: usize,
    fill: Option<Coin>,
    assignments: Vec<(i64, i64, usize, Coin)>,
}

impl From<Configuration> for ConfigFile {
    fn from(c: Configuration) -> Self {
        ConfigFile { components: c.components, fill: c.fill, assignments: c.assignments() }
    }
}

impl TryFrom<ConfigFile> for Configuration {
    type Error = CertError;

    fn try_from(f: ConfigFile) -> Result<Self, CertError> {
        let mut c = Configuration::new(f.components, f.fill);
        for (x, y, comp, coin) in f.assignments {
            c.assign(Site::new(x, y), comp, coin)?;
        }
        Ok(c)
    }
}

impl Configuration {
    pub fn new(components: usize, fill: Option<Coin>) -> Self {
        Configuration { components, fill, entries: BTreeMap::new(), writes: 0, rejected: 0 }
    }

    pub fn components(&self) -> usize {
        self.components
    }

    /// Writes one component; any second write to it is refused.
    pub fn assign(&mut self, s: Site, comp: usize, coin: Coin) -> Result<(), CertError> {
        if comp >= self.components {
            return Err(CertError::NoSuchComponent(comp));
        }
        let sym = self.entries.entry(s).or_default();
        if let Some(&old) = sym.get(&comp) {
            self.rejected += 1;
            return Err(CertError::DoubleAssignment { site: s, component: comp, old, new: coin });
        }
        sym.insert(comp, coin);
        self.writes += 1;
        Ok(())
    }

    /// The explicitly assigned value.
    pub fn assigned(&self, s: Site, comp: usize) -> Option<Coin> {
        self.entries.get(&s)?.get(&comp).copied()
    }

    /// The assigned value, else the fill.
    pub fn value(&self, s: Site, comp: usize) -> Option<Coin> {
        self.assigned(s, comp).or(self.fill)
    }

    /// The full symbol at a site.
    pub fn symbol(&self, s: Site) -> Vec<Option<Coin>> {
        (0..self.components).map(|c| self.value(s, c)).collect()
    }

    /// `(x, y, component, coin)` in site then component order.
    pub fn assignments(&self) -> Vec<(i64, i64, usize, Coin)> {
        self.entries.iter().flat_map(|(s, sym)| sym.iter().map(move |(&c, &v)| (s.x, s.y, c, v))).collect()
    }

    pub fn assigned_sites(&self) -> impl Iterator<Item = &Site> {
        self.entries.keys()
    }

    /// Successful writes and refused second writes so far.
    pub fn audit(&self) -> (u64, u64) {
        (self.writes, self.rejected)
    }
}

/// Where a witness's coin lands: bucket index and component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placement {
    pub box_id: BoxId,
    pub anchor: Site,
    pub bucket: usize,
    pub component: usize,
}

/// Bucket `((r_x·n + r_y)·K_dir + θ)·K_sec + (σ - 1)` for residues
/// `(r_x, r_y)` of the anchor modulo the level `n`.
pub fn bucket_index(p: &Profile, n: usize, anchor: Site, theta: usize, sigma: usize) -> usize {
    let nn = n as i64;
    let (rx, ry) = (anchor.x.rem_euclid(nn) as usize, anchor.y.rem_euclid(nn) as usize);
    ((rx * n + ry) * p.k_dir + theta) * p.k_sec + (sigma - 1)
}

/// Bucket placements of a frame's witnesses, in box order.
pub fn placements(c: &Certificate, p: &Profile, id: FrameId) -> Result<Vec<Placement>, CertError> {
    let f = c.frame(id).ok_or(CertError::NoSuchFrame(id))?;
    let mut out = Vec::new();
    for (i, b) in f.boxes.iter().enumerate() {
        let box_id = BoxId { level: id.level, frame: id.index, index: i };
        let w = b.witness.as_ref().ok_or(CertError::MissingWitness(box_id))?;
        let sigma = b.section_of_local(&BoxFrame::of(b, p).local(&w.point));
        out.push(Placement {
            box_id,
            anchor: w.anchor,
            bucket: bucket_index(p, id.level, w.anchor, b.orientation, sigma),
            component: p.component(b.orientation, sigma),
        });
    }
    Ok(out)
}

/// The frame's coin-and-bucket state under `x`.
pub fn cbc(x: &Configuration, c: &Certificate, p: &Profile, id: FrameId) -> Result<GameState, CertError> {
    let mut coins = Vec::new();
    for pl in placements(c, p, id)? {
        let coin = x.value(pl.anchor, pl.component).ok_or(CertError::UndefinedComponent(pl.box_id))?;
        coins.push((pl.bucket, coin));
    }
    Ok(GameState::from_coins(p.bucket_count(id.level), &coins))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameVerdict {
    pub frame: FrameId,
    pub state: GameState,
    pub result: SearchResult,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatReport {
    pub frames: Vec<FrameVerdict>,
}

impl CompatReport {
    pub fn compatible(&self) -> bool {
        self.frames.iter().all(|f| f.result.is_unorientable())
    }
}

/// Orientability with results shared between identical states.
#[derive(Debug, Default)]
pub struct Oracle {
    budget: usize,
    memo: HashMap<Vec<(u32, u32)>, SearchResult>,
}

impl Oracle {
    pub fn new(budget: usize) -> Self {
        Oracle { budget, memo: HashMap::new() }
    }

    pub fn solve(&mut self, s: &GameState) -> SearchResult {
        let budget = self.budget;
        self.memo.entry(s.pairs()).or_insert_with(|| orientable(s, budget, Rules::default())).clone()
    }
}

pub fn compatible(x: &Configuration, c: &Certificate, p: &Profile, budget: usize) -> Result<CompatReport, CertError> {
    let mut oracle = Oracle::new(budget);
    let mut frames = Vec::new();
    for id in c.frame_ids() {
        let state = cbc(x, c, p, id)?;
        let result = oracle.solve(&state);
        frames.push(FrameVerdict { frame: id, state, result });
    }
    Ok(CompatReport { frames })
}

/// Witnesses sharing a component and an anchor.
pub fn anchor_collision(c: &Certificate, p: &Profile) -> Result<Option<(BoxId, BoxId)>, CertError> {
    let mut seen: HashMap<(Site, usize), BoxId> = HashMap::new();
    for id in c.frame_ids() {
        for pl in placements(c, p, id)? {
            if let Some(&other) = seen.get(&(pl.anchor, pl.component)) {
                return Ok(Some((other, pl.box_id)));
            }
            seen.insert((pl.anchor, pl.component), pl.box_id);
        }
    }
    Ok(None)
}

/// Coins for one frame: within each bucket, in box order, the first half
/// (rounded down) heads and the rest tails.
pub fn split_coins(pls: &[Placement]) -> Vec<Coin> {
    let mut total: BTreeMap<usize, usize> = BTreeMap::new();
    for pl in pls {
        *total.entry(pl.bucket).or_default() += 1;
    }
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    pls.iter()
        .map(|pl| {
            let k = seen.entry(pl.bucket).or_default();
            *k += 1;
            if *k <= total[&pl.bucket] / 2 {
                Coin::H
            } else {
                Coin::T
            }
        })
        .collect()
}

/// Assigns each witness's own component at its anchor so that every
/// frame's state is unorientable; everything else reads as heads.
pub fn choose_compatible_config(c: &Certificate, p: &Profile, budget: usize) -> Result<Configuration, CertError> {
    if let Some((a, b)) = anchor_collision(c, p)? {
        return Err(CertError::AnchorCollision(a, b));
    }
    let mut oracle = Oracle::new(budget);
    let mut x = Configuration::new(p.components(), Some(Coin::H));
    for id in c.frame_ids() {
        let pls = placements(c, p, id)?;
        let coins = split_coins(&pls);
        let state = GameState::from_coins(
            p.bucket_count(id.level),
            &pls.iter().zip(&coins).map(|(pl, &coin)| (pl.bucket, coin)).collect::<Vec<_>>(),
        );
        let result = oracle.solve(&state);
        if !result.is_unorientable() {
            return Err(CertError::TargetNotUnorientable { frame: id, verdict: result.label().to_string() });
        }
        for (pl, coin) in pls.iter().zip(coins) {
            x.assign(pl.anchor, pl.component, coin)?;
        }
    }
    Ok(x)
}

/// Two anchors of one `n`-frame, congruent mod `n`, whose symbols differ:
/// the first two differently-oriented coins of the first mixed bucket.
pub fn aperiodicity_extract(
    x: &Configuration,
    c: &Certificate,
    p: &Profile,
    n: usize,
) -> Result<(Site, Site), CertError> {
    for id in c.frame_ids().into_iter().filter(|f| f.level == n) {
        let mut buckets: BTreeMap<usize, Vec<(Site, Coin)>> = BTreeMap::new();
        for pl in placements(c, p, id)? {
            let coin = x.value(pl.anchor, pl.component).ok_or(CertError::UndefinedComponent(pl.box_id))?;
            buckets.entry(pl.bucket).or_default().push((pl.anchor, coin));
        }
        for coins in buckets.values_mut() {
            coins.sort();
            for (i, a) in coins.iter().enumerate() {
                if let Some(b) = coins[i + 1..].iter().find(|b| b.1 != a.1) {
                    return Ok((a.0, b.0));
                }
            }
        }
    }
    Err(CertError::NoMixedBucket(n))
}

/// The `(θ, σ)` layer of `x` restricted to the anchors of a frame's
/// witnesses carrying that component, as `0 = H`, `1 = T`.
pub fn layer_restriction(
    x: &Configuration,
    c: &Certificate,
    p: &Profile,
    id: FrameId,
    component: usize,
) -> Result<Vec<(Site, u32)>, CertError> {
    let mut out = Vec::new();
    for pl in placements(c, p, id)?.into_iter().filter(|pl| pl.component == component) {
        let coin = x.value(pl.anchor, component).ok_or(CertError::UndefinedComponent(pl.box_id))?;
        out.push((pl.anchor, u32::from(coin == Coin::T)));
    }
    Ok(out)
}
