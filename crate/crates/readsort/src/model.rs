//! Finite-context models (FCM) and substitution-tolerant context models (STCM)
//! over the DNA alphabet {A,C,G,T}, mixed into an ensemble with two phases:
//! train (counts update) and frozen (pure code-length estimation).

use rand::RngExt;
use rand::SeedableRng;
use rand::rngs::ChaCha8Rng;

use crate::error::{Error, Result};

/// The fixed 4-symbol alphabet. log2 of its size is exactly 2.
pub const ALPHABET: [u8; 4] = *b"ACGT";
pub const ALPHABET_BITS: f64 = 2.0;

/// Per-symbol probability floor applied when accumulating code length.
/// Bounds worst-case cost at 16 bits per symbol.
pub const PROB_FLOOR: f64 = 1.0 / 65536.0;

/// Maps an A/C/G/T byte to its symbol index, or None for anything else.
#[inline]
pub fn encode_base(b: u8) -> Option<u8> {
    match b {
        b'A' => Some(0),
        b'C' => Some(1),
        b'G' => Some(2),
        b'T' => Some(3),
        _ => None,
    }
}

#[inline]
pub fn decode_base(i: u8) -> u8 {
    ALPHABET[i as usize]
}

pub fn complement(i: u8) -> u8 {
    3 - i
}

/// Maps raw sequence bytes into symbol indices for the analysis phase.
/// Bytes outside the alphabet become a pseudo-random symbol from the seeded
/// generator; the substitution never touches emitted FASTQ.
pub struct SymbolMapper {
    rng: ChaCha8Rng,
}

impl SymbolMapper {
    pub fn new(seed: u64) -> Self {
        SymbolMapper {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    #[inline]
    pub fn map(&mut self, byte: u8) -> u8 {
        match encode_base(byte) {
            Some(i) => i,
            None => self.rng.random_range(0..4u8),
        }
    }

    pub fn map_sequence(&mut self, bytes: &[u8]) -> Vec<u8> {
        bytes.iter().map(|&b| self.map(b)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FcmConfig {
    /// Context depth in symbols, 0..=20. Orders above 12 use hashed tables.
    pub order: u32,
    /// Laplace-style estimator smoothing.
    pub alpha: f64,
}

impl FcmConfig {
    pub fn new(order: u32) -> Self {
        FcmConfig {
            order,
            alpha: 1.0 / 16.0,
        }
    }

    pub fn hashed(&self) -> bool {
        self.order > 12
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StcmConfig {
    pub base: FcmConfig,
    /// Consecutive argmax mismatches tolerated before the private context
    /// resets to the true history. 0 makes the model identical to its base FCM.
    pub max_substitutions: u32,
    /// Smoothing used for contexts with no observations.
    pub fallback_alpha: f64,
}

impl StcmConfig {
    pub fn new(order: u32, max_substitutions: u32) -> Self {
        let base = FcmConfig::new(order);
        StcmConfig {
            base,
            max_substitutions,
            fallback_alpha: base.alpha,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelConfig {
    Fcm(FcmConfig),
    Stcm(StcmConfig),
}

impl ModelConfig {
    fn base(&self) -> &FcmConfig {
        match self {
            ModelConfig::Fcm(c) => c,
            ModelConfig::Stcm(c) => &c.base,
        }
    }

    pub fn order(&self) -> u32 {
        self.base().order
    }
}

/// Number of slots (log2) in a hashed count table.
const HASH_BITS: u32 = 22;
const HASH_PROBES: usize = 8;

#[derive(Clone, Default)]
struct HashSlot {
    fingerprint: u32,
    counts: [u16; 4],
}

/// Symbol counts per context. Exact direct-indexed table for order <= 12,
/// open-addressed table with 32-bit fingerprints above that (collisions are
/// tolerated; they only perturb probabilities).
enum CountTable {
    Exact(Vec<[u16; 4]>),
    Hashed(Vec<HashSlot>),
}

#[inline]
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

impl CountTable {
    fn new(order: u32) -> Self {
        if order <= 12 {
            CountTable::Exact(vec![[0; 4]; 1usize << (2 * order)])
        } else {
            CountTable::Hashed(vec![HashSlot::default(); 1usize << HASH_BITS])
        }
    }

    #[inline]
    fn get(&self, ctx: u64) -> [u16; 4] {
        match self {
            CountTable::Exact(t) => t[ctx as usize],
            CountTable::Hashed(t) => {
                let h = splitmix64(ctx);
                let fp = ((h >> 40) as u32) | 1;
                let mask = t.len() as u64 - 1;
                for probe in 0..HASH_PROBES {
                    let slot = &t[((h.wrapping_add(probe as u64)) & mask) as usize];
                    if slot.fingerprint == fp {
                        return slot.counts;
                    }
                    if slot.fingerprint == 0 {
                        return [0; 4];
                    }
                }
                // all probes occupied by other contexts: share the first slot
                t[(h & mask) as usize].counts
            }
        }
    }

    #[inline]
    fn increment(&mut self, ctx: u64, sym: u8) {
        match self {
            CountTable::Exact(t) => bump(&mut t[ctx as usize], sym),
            CountTable::Hashed(t) => {
                let h = splitmix64(ctx);
                let fp = ((h >> 40) as u32) | 1;
                let mask = t.len() as u64 - 1;
                let mut target = (h & mask) as usize;
                for probe in 0..HASH_PROBES {
                    let idx = ((h.wrapping_add(probe as u64)) & mask) as usize;
                    let slot = &mut t[idx];
                    if slot.fingerprint == fp {
                        target = idx;
                        break;
                    }
                    if slot.fingerprint == 0 {
                        slot.fingerprint = fp;
                        target = idx;
                        break;
                    }
                }
                bump(&mut t[target].counts, sym);
            }
        }
    }

    fn clear(&mut self) {
        match self {
            CountTable::Exact(t) => t.fill([0; 4]),
            CountTable::Hashed(t) => t.fill(HashSlot::default()),
        }
    }
}

#[inline]
fn bump(counts: &mut [u16; 4], sym: u8) {
    if counts[sym as usize] == u16::MAX {
        for c in counts.iter_mut() {
            *c >>= 1;
        }
    }
    counts[sym as usize] += 1;
}

struct Model {
    config: ModelConfig,
    table: CountTable,
    ctx_mask: u64,
}

/// Per-pass rolling state for one model: the context register, the true
/// history (STCM only) and the consecutive-mismatch counter.
#[derive(Clone, Copy, Default)]
struct ModelState {
    ctx: u64,
    history: u64,
    seen: u32,
    mismatches: u32,
}

impl Model {
    fn new(config: ModelConfig) -> Self {
        let order = config.order();
        let ctx_mask = if order == 0 {
            0
        } else {
            (1u64 << (2 * order)) - 1
        };
        Model {
            config,
            table: CountTable::new(order),
            ctx_mask,
        }
    }

    #[inline]
    fn formed(&self, st: &ModelState) -> bool {
        st.seen >= self.config.order()
    }

    /// Conditional distribution over the alphabet given the current state.
    /// Uniform until the context register has filled.
    #[inline]
    fn predict(&self, st: &ModelState) -> [f64; 4] {
        if !self.formed(st) {
            return [0.25; 4];
        }
        let counts = self.table.get(st.ctx);
        let total: u32 = counts.iter().map(|&c| c as u32).sum();
        let alpha = match &self.config {
            ModelConfig::Fcm(c) => c.alpha,
            ModelConfig::Stcm(c) => {
                if total == 0 {
                    c.fallback_alpha
                } else {
                    c.base.alpha
                }
            }
        };
        let denom = total as f64 + 4.0 * alpha;
        [
            (counts[0] as f64 + alpha) / denom,
            (counts[1] as f64 + alpha) / denom,
            (counts[2] as f64 + alpha) / denom,
            (counts[3] as f64 + alpha) / denom,
        ]
    }

    #[inline]
    fn train_update(&mut self, st: &ModelState, sym: u8) {
        if self.formed(st) {
            self.table.increment(st.ctx, sym);
        }
    }

    /// Advances the rolling context after `sym` has been observed (and, when
    /// training, counted).
    #[inline]
    fn advance(&self, st: &mut ModelState, sym: u8) {
        match &self.config {
            ModelConfig::Fcm(_) => {
                st.ctx = ((st.ctx << 2) | sym as u64) & self.ctx_mask;
            }
            ModelConfig::Stcm(c) => {
                st.history = ((st.history << 2) | sym as u64) & self.ctx_mask;
                if !self.formed(st) {
                    st.ctx = st.history;
                } else {
                    let counts = self.table.get(st.ctx);
                    let argmax = counts
                        .iter()
                        .enumerate()
                        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
                        .map(|(i, _)| i as u8)
                        .unwrap();
                    if sym == argmax {
                        st.mismatches = 0;
                        st.ctx = ((st.ctx << 2) | sym as u64) & self.ctx_mask;
                    } else {
                        st.mismatches += 1;
                        if st.mismatches > c.max_substitutions {
                            st.mismatches = 0;
                            st.ctx = st.history;
                        } else {
                            st.ctx = ((st.ctx << 2) | argmax as u64) & self.ctx_mask;
                        }
                    }
                }
            }
        }
        st.seen = st.seen.saturating_add(1);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub models: Vec<ModelConfig>,
    /// Mixing weight-decay factor in (0,1).
    pub gamma: f64,
}

impl Default for EnsembleConfig {
    /// Ensemble used for classification and filtering: short, medium and long
    /// FCM contexts plus one substitution-tolerant long-context model.
    fn default() -> Self {
        EnsembleConfig {
            models: vec![
                ModelConfig::Fcm(FcmConfig::new(3)),
                ModelConfig::Fcm(FcmConfig::new(8)),
                ModelConfig::Fcm(FcmConfig::new(13)),
                ModelConfig::Stcm(StcmConfig::new(18, 3)),
            ],
            gamma: 0.99,
        }
    }
}

impl EnsembleConfig {
    pub fn single_fcm(order: u32) -> Self {
        EnsembleConfig {
            models: vec![ModelConfig::Fcm(FcmConfig::new(order))],
            gamma: 0.99,
        }
    }

    pub fn fcm_orders(orders: &[u32]) -> Self {
        EnsembleConfig {
            models: orders
                .iter()
                .map(|&o| ModelConfig::Fcm(FcmConfig::new(o)))
                .collect(),
            gamma: 0.99,
        }
    }
}

/// A set of context models with adaptive mixing weights. Trainable, then
/// frozen for side-effect-free code-length estimation.
pub struct ModelEnsemble {
    models: Vec<Model>,
    /// Normalized mixing weights; snapshot taken at freeze time seeds every
    /// subsequent estimation pass.
    weights: Vec<f64>,
    gamma: f64,
    frozen: bool,
}

impl ModelEnsemble {
    pub fn new(config: &EnsembleConfig) -> Self {
        assert!(!config.models.is_empty(), "ensemble needs at least one model");
        assert!(config.gamma > 0.0 && config.gamma < 1.0);
        let n = config.models.len();
        ModelEnsemble {
            models: config.models.iter().map(|&c| Model::new(c)).collect(),
            weights: vec![1.0 / n as f64; n],
            gamma: config.gamma,
            frozen: false,
        }
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// One left-to-right training pass. The context resets at the start of
    /// each call, so callers control what counts as contiguous material.
    pub fn train(&mut self, sequence: &[u8]) -> Result<()> {
        if self.frozen {
            return Err(Error::FrozenModel);
        }
        let mut states = vec![ModelState::default(); self.models.len()];
        let mut weights = self.weights.clone();
        let single = self.models.len() == 1;
        for &sym in sequence {
            debug_assert!(sym < 4);
            if single {
                let st = &states[0];
                self.models[0].train_update(st, sym);
                self.models[0].advance(&mut states[0], sym);
            } else {
                for (i, model) in self.models.iter_mut().enumerate() {
                    let probs = model.predict(&states[i]);
                    weights[i] = (weights[i] * probs[sym as usize]).powf(self.gamma);
                    model.train_update(&states[i], sym);
                    model.advance(&mut states[i], sym);
                }
                normalize(&mut weights);
            }
        }
        self.weights = weights;
        Ok(())
    }

    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    /// Drops all counts and resets weights; used by the adaptive coder at
    /// block boundaries.
    pub fn reset_counts(&mut self) {
        for model in &mut self.models {
            model.table.clear();
        }
        let n = self.weights.len();
        self.weights = vec![1.0 / n as f64; n];
    }

    /// Mixed conditional probability of `symbol` after `context`, using the
    /// current counts and the post-training mixing weights.
    pub fn probability(&self, context: &[u8], symbol: u8) -> f64 {
        let mut states = vec![ModelState::default(); self.models.len()];
        for &sym in context {
            for (i, model) in self.models.iter().enumerate() {
                model.advance(&mut states[i], sym);
            }
        }
        let mut mixed = [0.0f64; 4];
        for (i, model) in self.models.iter().enumerate() {
            let probs = model.predict(&states[i]);
            for s in 0..4 {
                mixed[s] += self.weights[i] * probs[s];
            }
        }
        mixed[symbol as usize]
    }

    /// Bits needed to represent `sequence` under the frozen mixed estimator.
    /// Deterministic; counts are untouched. Mixing weights adapt along the
    /// sequence but start from the post-training snapshot every call.
    pub fn code_length(&self, sequence: &[u8]) -> Result<f64> {
        if !self.frozen {
            return Err(Error::NotFrozen);
        }
        let mut scorer = EnsembleScorer::new(self);
        let mut bits = 0.0;
        for &sym in sequence {
            bits += scorer.symbol_bits(sym);
        }
        Ok(bits)
    }
}

#[inline]
fn normalize(weights: &mut [f64]) {
    let sum: f64 = weights.iter().sum();
    if sum <= 0.0 || !sum.is_finite() {
        let n = weights.len() as f64;
        weights.fill(1.0 / n);
    } else {
        for w in weights.iter_mut() {
            *w /= sum;
        }
    }
}

/// Read-only estimation walker over a frozen ensemble. Carries its own
/// context and mixing-weight state, so frozen ensembles can be shared across
/// threads with schedule-independent results.
pub struct EnsembleScorer<'a> {
    ensemble: &'a ModelEnsemble,
    states: Vec<ModelState>,
    weights: Vec<f64>,
}

impl<'a> EnsembleScorer<'a> {
    pub fn new(ensemble: &'a ModelEnsemble) -> Self {
        EnsembleScorer {
            ensemble,
            states: vec![ModelState::default(); ensemble.models.len()],
            weights: ensemble.weights.clone(),
        }
    }

    /// Mixed distribution for the next symbol.
    #[inline]
    pub fn next_probs(&self) -> [f64; 4] {
        let mut mixed = [0.0f64; 4];
        for (i, model) in self.ensemble.models.iter().enumerate() {
            let probs = model.predict(&self.states[i]);
            for s in 0..4 {
                mixed[s] += self.weights[i] * probs[s];
            }
        }
        mixed
    }

    /// Advances every model past `sym`, adapting the private mixing weights.
    #[inline]
    pub fn observe(&mut self, sym: u8) {
        let single = self.ensemble.models.len() == 1;
        for (i, model) in self.ensemble.models.iter().enumerate() {
            if !single {
                let probs = model.predict(&self.states[i]);
                self.weights[i] =
                    (self.weights[i] * probs[sym as usize]).powf(self.ensemble.gamma);
            }
            model.advance(&mut self.states[i], sym);
        }
        if !single {
            normalize(&mut self.weights);
        }
    }

    /// Code length contribution of observing `sym` next (floored), advancing
    /// the walker.
    #[inline]
    pub fn symbol_bits(&mut self, sym: u8) -> f64 {
        let probs = self.next_probs();
        let p = probs[sym as usize].max(PROB_FLOOR);
        self.observe(sym);
        -p.log2()
    }
}

/// Adaptive walker over an unfrozen ensemble: predicts, then counts the
/// observed symbol. Drives the built-in compressor in both directions.
pub struct AdaptiveWalker<'a> {
    ensemble: &'a mut ModelEnsemble,
    states: Vec<ModelState>,
    weights: Vec<f64>,
}

impl<'a> AdaptiveWalker<'a> {
    pub fn new(ensemble: &'a mut ModelEnsemble) -> Result<Self> {
        if ensemble.frozen {
            return Err(Error::FrozenModel);
        }
        let n = ensemble.models.len();
        let weights = ensemble.weights.clone();
        Ok(AdaptiveWalker {
            ensemble,
            states: vec![ModelState::default(); n],
            weights,
        })
    }

    #[inline]
    pub fn next_probs(&self) -> [f64; 4] {
        let mut mixed = [0.0f64; 4];
        for (i, model) in self.ensemble.models.iter().enumerate() {
            let probs = model.predict(&self.states[i]);
            for s in 0..4 {
                mixed[s] += self.weights[i] * probs[s];
            }
        }
        mixed
    }

    #[inline]
    pub fn observe(&mut self, sym: u8) {
        let single = self.ensemble.models.len() == 1;
        for (i, model) in self.ensemble.models.iter_mut().enumerate() {
            if !single {
                let probs = model.predict(&self.states[i]);
                self.weights[i] = (self.weights[i] * probs[sym as usize]).powf(self.ensemble.gamma);
            }
            model.train_update(&self.states[i], sym);
            model.advance(&mut self.states[i], sym);
        }
        if !single {
            normalize(&mut self.weights);
        }
    }

    /// Resets counts, contexts and weights; starts a fresh statistics block.
    pub fn reset(&mut self) {
        self.ensemble.reset_counts();
        self.states.fill(ModelState::default());
        self.weights = self.ensemble.weights.clone();
    }
}
