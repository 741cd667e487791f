//! Dense-coding advantage of a state across a sender/receiver cut, under
//! global, local-product, or one-round feedback encodings. The advantage is
//! the entropy of the receiver reduction minus the smallest output entropy
//! any admissible pre-processing of the sender side can reach; lower bounds
//! come from explicit channels (optimized or supplied as candidates), upper
//! bounds from local filtering, and exact zeros from structural
//! separability certificates.

use serde::Serialize;

use crate::channels::{
    apply_to_parties, channel_from_params, feedback_to_channel, product_channel,
    substitution_channel, ChannelClass, FeedbackProtocol, IsometryParams, KrausChannel,
};
use crate::error::{Error, Result};
use crate::optimize::{minimize_with_starts, OptimizerConfig, RestartTrace};
use crate::qcore::entropy::{von_neumann_entropy_state, von_neumann_entropy};
use crate::qcore::matrix::QMatrix;
use crate::qcore::state::{PartitionedState, PureState};
use crate::states::NamedState;
use crate::channels::weyl_ensemble;

/// Positive-advantage threshold for verdicts.
pub const EPS_DC: f64 = 1e-4;

/// Largest working-space dimension the optimizers will touch.
pub const MAX_WORK_DIM: usize = 256;

/// Sender/receiver split of a state's parties.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cut {
    pub senders: Vec<usize>,
    pub receivers: Vec<usize>,
}

impl Cut {
    pub fn new(senders: Vec<usize>, receivers: Vec<usize>) -> Self {
        Cut { senders, receivers }
    }

    /// The standard bipartite cut: party 0 sends, party 1 receives.
    pub fn bipartite() -> Self {
        Cut::new(vec![0], vec![1])
    }

    pub fn validate(&self, s: &PartitionedState) -> Result<()> {
        let n = s.n_parties();
        let mut all: Vec<usize> = self
            .senders
            .iter()
            .chain(self.receivers.iter())
            .copied()
            .collect();
        all.sort_unstable();
        let distinct = all.windows(2).all(|w| w[0] < w[1]);
        if self.senders.is_empty()
            || self.receivers.is_empty()
            || !distinct
            || all.iter().any(|&p| p >= n)
        {
            return Err(Error::InvalidCut(format!(
                "senders {:?} / receivers {:?} on {n} parties",
                self.senders, self.receivers
            )));
        }
        Ok(())
    }

    /// Parties involved, ascending.
    fn involved(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self
            .senders
            .iter()
            .chain(self.receivers.iter())
            .copied()
            .collect();
        all.sort_unstable();
        all
    }
}

/// Working context: the reduction to the cut's parties plus the index maps
/// from original party indices into it.
struct Workspace {
    work: PartitionedState,
    involved: Vec<usize>,
    senders: Vec<usize>,   // ascending, work indices
    receivers: Vec<usize>, // ascending, work indices
    s_receiver: f64,
}

impl Workspace {
    fn build(s: &PartitionedState, cut: &Cut) -> Result<Workspace> {
        cut.validate(s)?;
        let involved = cut.involved();
        let work = if involved.len() == s.n_parties() {
            s.clone()
        } else {
            s.partial_trace(&involved)?
        };
        if work.total_dim() > MAX_WORK_DIM {
            return Err(Error::SizeGuard(format!(
                "working dimension {} exceeds {MAX_WORK_DIM}",
                work.total_dim()
            )));
        }
        let to_work = |p: usize| involved.iter().position(|&q| q == p).unwrap();
        let mut senders: Vec<usize> = cut.senders.iter().map(|&p| to_work(p)).collect();
        senders.sort_unstable();
        let mut receivers: Vec<usize> = cut.receivers.iter().map(|&p| to_work(p)).collect();
        receivers.sort_unstable();
        let s_receiver = von_neumann_entropy_state(&work.partial_trace(&receivers)?);
        Ok(Workspace {
            work,
            involved,
            senders,
            receivers,
            s_receiver,
        })
    }

    fn to_work(&self, p: usize) -> usize {
        self.involved.iter().position(|&q| q == p).unwrap()
    }

    fn sender_dims(&self) -> Vec<usize> {
        self.senders.iter().map(|&p| self.work.dims()[p]).collect()
    }

    /// Output entropy after acting on the listed work parties.
    fn objective(&self, ch: &KrausChannel, parties: &[usize]) -> Result<f64> {
        let out = apply_to_parties(ch, &self.work, parties)?;
        Ok(von_neumann_entropy_state(&out))
    }
}

/// Coherent information of the cut: S(receivers) - S(senders + receivers).
pub fn coherent_information(s: &PartitionedState, cut: &Cut) -> Result<f64> {
    let ws = Workspace::build(s, cut)?;
    Ok(ws.s_receiver - von_neumann_entropy_state(&ws.work))
}

/// A classical-quantum ensemble: probabilities with signal states.
pub type Ensemble = Vec<(f64, QMatrix)>;

/// Holevo quantity chi = S(sum_i p_i rho_i) - sum_i p_i S(rho_i).
pub fn holevo(ensemble: &Ensemble) -> Result<f64> {
    let first = ensemble
        .first()
        .ok_or(Error::BadEnsemble(0.0))?;
    let psum: f64 = ensemble.iter().map(|(p, _)| p).sum();
    if (psum - 1.0).abs() > 1e-9 || ensemble.iter().any(|(p, _)| *p < -1e-12) {
        return Err(Error::BadEnsemble(psum));
    }
    let d = first.1.rows();
    let mut avg = QMatrix::zeros(d, d);
    let mut cond = 0.0;
    for (p, rho) in ensemble {
        if rho.rows() != d {
            return Err(Error::DimensionMismatch { expected: d, got: rho.rows() });
        }
        avg = avg.add(&rho.scale_re(*p));
        if *p > 0.0 {
            cond += p * von_neumann_entropy(rho)?;
        }
    }
    Ok(von_neumann_entropy(&avg)? - cond)
}

/// The shift-and-phase signal ensemble built on an encoded state: party 0
/// of `pre` is modulated by the d^2 orthogonal unitaries, each with equal
/// probability. Its Holevo quantity is log2(d') plus the coherent
/// information of `pre` across the 0:rest cut.
pub fn weyl_encoded_ensemble(pre: &PartitionedState) -> Result<Ensemble> {
    let d = pre.dims()[0];
    let d_rest = pre.total_dim() / d;
    let i_rest = QMatrix::identity(d_rest);
    let us = weyl_ensemble(d);
    let prob = 1.0 / us.len() as f64;
    Ok(us
        .iter()
        .map(|u| {
            let full = u.kron(&i_rest);
            (prob, full.mul(pre.matrix()).mul(&full.dagger()))
        })
        .collect())
}

/// An explicit encoding channel offered to the search as a starting lower
/// bound. `parties` are the state party indices matching the channel's
/// input factorization (a permutation of the cut's senders).
#[derive(Debug, Clone)]
pub struct CandidateChannel {
    pub label: String,
    pub channel: KrausChannel,
    pub parties: Vec<usize>,
}

/// How the winning lower bound was realized.
#[derive(Debug, Clone, Serialize)]
pub enum BestChannel {
    Candidate(String),
    Isometry(IsometryParams),
    LocalIsometries(Vec<IsometryParams>),
    Feedback { measuring: usize },
}

/// Concrete channel and the work-state parties it acts on.
#[derive(Debug, Clone)]
pub struct Realization {
    pub channel: KrausChannel,
    pub parties: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdvantageReport {
    pub class: ChannelClass,
    /// Lower bound on the advantage from the best encoding found.
    pub value: f64,
    /// Entropy of the receiver reduction.
    pub s_receiver: f64,
    /// Smallest output entropy reached.
    pub best_objective: f64,
    /// Output dimension of the winning channel.
    pub d_out: usize,
    /// One-shot dense-coding capacity log2(d_out) + value.
    pub capacity: f64,
    pub best: BestChannel,
    pub converged: bool,
    pub traces: Vec<RestartTrace>,
    #[serde(skip_serializing)]
    pub realization: Option<Realization>,
}

/// Default output dimension and Kraus count of the free search. Qubit
/// inputs get the full Stinespring headroom; larger inputs are kept at
/// their own dimension with two Kraus operators to keep the coordinate
/// count tractable.
fn search_shape(d_in: usize, cfg: &OptimizerConfig) -> (usize, usize) {
    let (d_def, k_def) = if d_in <= 2 { (d_in * d_in, d_in) } else { (d_in, 2) };
    (cfg.d_out.unwrap_or(d_def), cfg.kraus.unwrap_or(k_def))
}

struct SearchState {
    best_objective: f64,
    best: BestChannel,
    realization: Option<Realization>,
    converged: bool,
    traces: Vec<RestartTrace>,
}

impl SearchState {
    fn offer(&mut self, objective: f64, best: BestChannel, real: Realization, converged: bool) {
        if objective < self.best_objective {
            self.best_objective = objective;
            self.best = best;
            self.realization = Some(real);
            self.converged = converged;
        }
    }
}

pub fn quantum_advantage(
    s: &PartitionedState,
    cut: &Cut,
    class: &ChannelClass,
    cfg: &OptimizerConfig,
) -> Result<AdvantageReport> {
    quantum_advantage_with(s, cut, class, cfg, &[])
}

/// Search for the best admissible encoding: explicit candidates (identity,
/// substitution, and any supplied) plus a free optimization over smoothly
/// parametrized channels of the class.
pub fn quantum_advantage_with(
    s: &PartitionedState,
    cut: &Cut,
    class: &ChannelClass,
    cfg: &OptimizerConfig,
    extra: &[CandidateChannel],
) -> Result<AdvantageReport> {
    cfg.validate()?;
    class.validate(&cut.senders)?;
    let ws = Workspace::build(s, cut)?;
    let d_in: usize = ws.sender_dims().iter().product();

    let mut search = SearchState {
        best_objective: f64::INFINITY,
        best: BestChannel::Candidate("identity".into()),
        realization: None,
        converged: true,
        traces: Vec::new(),
    };

    // structural candidates: do nothing, or discard and send fresh
    let identity = KrausChannel::identity(d_in);
    let obj = ws.objective(&identity, &ws.senders)?;
    search.offer(
        obj,
        BestChannel::Candidate("identity".into()),
        Realization { channel: identity, parties: ws.senders.clone() },
        true,
    );
    let subst = substitution_channel(d_in, &PureState::basis(vec![d_in], &[0]));
    let obj = ws.objective(&subst, &ws.senders)?;
    search.offer(
        obj,
        BestChannel::Candidate("substitution".into()),
        Realization { channel: subst, parties: ws.senders.clone() },
        true,
    );
    for cand in extra {
        let mut sorted = cand.parties.clone();
        sorted.sort_unstable();
        if sorted != {
            let mut s = cut.senders.clone();
            s.sort_unstable();
            s
        } {
            return Err(Error::InvalidCut(format!(
                "candidate '{}' acts on {:?}, cut senders are {:?}",
                cand.label, cand.parties, cut.senders
            )));
        }
        let parties: Vec<usize> = cand.parties.iter().map(|&p| ws.to_work(p)).collect();
        let obj = ws.objective(&cand.channel, &parties)?;
        search.offer(
            obj,
            BestChannel::Candidate(cand.label.clone()),
            Realization { channel: cand.channel.clone(), parties },
            true,
        );
    }

    match class {
        ChannelClass::Global => optimize_global(&ws, cfg, &mut search),
        ChannelClass::LocalProduct { partition } => {
            optimize_local(&ws, partition, cfg, &mut search)
        }
        ChannelClass::OneWayFeedback { partition } => {
            optimize_feedback(&ws, partition, cfg, &mut search)
        }
    }

    let realization = search.realization.expect("identity candidate always offered");
    let d_out = realization.channel.d_out();
    let value = ws.s_receiver - search.best_objective;
    Ok(AdvantageReport {
        class: class.clone(),
        value,
        s_receiver: ws.s_receiver,
        best_objective: search.best_objective,
        d_out,
        capacity: (d_out as f64).log2() + value,
        best: search.best,
        converged: search.converged,
        traces: search.traces,
        realization: Some(realization),
    })
}

fn optimize_global(ws: &Workspace, cfg: &OptimizerConfig, search: &mut SearchState) {
    let d_in: usize = ws.sender_dims().iter().product();
    let (d_out, k) = search_shape(d_in, cfg);
    let dof = IsometryParams::dof(d_out, k);
    let eval = |x: &[f64]| -> f64 {
        let p = IsometryParams { d_in, d_out, k, generator: x.to_vec() };
        ws.objective(&channel_from_params(&p), &ws.senders)
            .unwrap_or(f64::INFINITY)
    };
    let res = minimize_with_starts(eval, dof, cfg, &[]);
    let p = IsometryParams { d_in, d_out, k, generator: res.best_x.clone() };
    search.offer(
        res.best_f,
        BestChannel::Isometry(p.clone()),
        Realization { channel: channel_from_params(&p), parties: ws.senders.clone() },
        res.converged,
    );
    search.traces = res.traces;
}

/// Per-group search shapes and the slicing of one flat coordinate vector.
#[allow(clippy::type_complexity)]
fn group_shapes(
    ws: &Workspace,
    partition: &[Vec<usize>],
    cfg: &OptimizerConfig,
) -> (Vec<(usize, usize, usize)>, Vec<Vec<usize>>, usize) {
    let mut shapes = Vec::new();
    let mut work_groups = Vec::new();
    let mut dof = 0;
    for group in partition {
        let wg: Vec<usize> = group.iter().map(|&p| ws.to_work(p)).collect();
        let d_g: usize = wg.iter().map(|&p| ws.work.dims()[p]).product();
        let (d_out, k) = search_shape(d_g, cfg);
        dof += IsometryParams::dof(d_out, k);
        shapes.push((d_g, d_out, k));
        work_groups.push(wg);
    }
    (shapes, work_groups, dof)
}

fn slice_params(
    shapes: &[(usize, usize, usize)],
    x: &[f64],
) -> Vec<IsometryParams> {
    let mut out = Vec::with_capacity(shapes.len());
    let mut off = 0;
    for &(d_in, d_out, k) in shapes {
        let n = IsometryParams::dof(d_out, k);
        out.push(IsometryParams {
            d_in,
            d_out,
            k,
            generator: x[off..off + n].to_vec(),
        });
        off += n;
    }
    out
}

fn optimize_local(
    ws: &Workspace,
    partition: &[Vec<usize>],
    cfg: &OptimizerConfig,
    search: &mut SearchState,
) {
    let (shapes, work_groups, dof) = group_shapes(ws, partition, cfg);
    let order: Vec<usize> = work_groups.iter().flatten().copied().collect();
    let build = |x: &[f64]| -> Result<KrausChannel> {
        let chans: Vec<KrausChannel> =
            slice_params(&shapes, x).iter().map(channel_from_params).collect();
        product_channel(&chans)
    };
    let eval = |x: &[f64]| -> f64 {
        build(x)
            .and_then(|ch| ws.objective(&ch, &order))
            .unwrap_or(f64::INFINITY)
    };
    let res = minimize_with_starts(eval, dof, cfg, &[]);
    if let Ok(ch) = build(&res.best_x) {
        search.offer(
            res.best_f,
            BestChannel::LocalIsometries(slice_params(&shapes, &res.best_x)),
            Realization { channel: ch, parties: order },
            res.converged,
        );
    }
    search.traces = res.traces;
}

fn optimize_feedback(
    ws: &Workspace,
    partition: &[Vec<usize>],
    cfg: &OptimizerConfig,
    search: &mut SearchState,
) {
    if partition.len() < 2 {
        // a single group makes feedback coincide with a global encoding
        optimize_global(ws, cfg, search);
        return;
    }
    let sender_dims = ws.sender_dims();
    // groups as slot indices into the sender list
    let slot_of = |work_party: usize| ws.senders.iter().position(|&p| p == work_party).unwrap();
    let slot_groups: Vec<Vec<usize>> = partition
        .iter()
        .map(|g| g.iter().map(|&p| slot_of(ws.to_work(p))).collect())
        .collect();

    for measuring in 0..partition.len() {
        let d_meas: usize = slot_groups[measuring]
            .iter()
            .map(|&s| sender_dims[s])
            .product();
        let outcomes = d_meas;
        let meas_dof = IsometryParams::dof(d_meas, outcomes);
        let rest: Vec<usize> = (0..partition.len()).filter(|&g| g != measuring).collect();
        let rest_shapes: Vec<(usize, usize, usize)> = rest
            .iter()
            .map(|&g| {
                let d_g: usize = slot_groups[g].iter().map(|&s| sender_dims[s]).product();
                let (d_out, k) = search_shape(d_g, cfg);
                (d_g, d_out, k)
            })
            .collect();
        let cond_dof: usize = rest_shapes
            .iter()
            .map(|&(_, d_out, k)| IsometryParams::dof(d_out, k))
            .sum();
        let dof = meas_dof + outcomes * cond_dof;

        let build = |x: &[f64]| -> Result<(KrausChannel, Vec<usize>)> {
            let meas = channel_from_params(&IsometryParams {
                d_in: d_meas,
                d_out: d_meas,
                k: outcomes,
                generator: x[..meas_dof].to_vec(),
            });
            let mut conditionals = Vec::with_capacity(outcomes);
            for m in 0..outcomes {
                let slice = &x[meas_dof + m * cond_dof..meas_dof + (m + 1) * cond_dof];
                let chans: Vec<KrausChannel> = slice_params(&rest_shapes, slice)
                    .iter()
                    .map(channel_from_params)
                    .collect();
                conditionals.push(product_channel(&chans)?);
            }
            let proto = FeedbackProtocol { measuring, measurement: meas, conditionals };
            feedback_to_channel(&proto, &sender_dims, &slot_groups)
        };
        let eval = |x: &[f64]| -> f64 {
            build(x)
                .and_then(|(ch, slots)| {
                    let parties: Vec<usize> = slots.iter().map(|&s| ws.senders[s]).collect();
                    ws.objective(&ch, &parties)
                })
                .unwrap_or(f64::INFINITY)
        };
        let res = minimize_with_starts(eval, dof, cfg, &[]);
        if let Ok((ch, slots)) = build(&res.best_x) {
            let parties: Vec<usize> = slots.iter().map(|&s| ws.senders[s]).collect();
            let improved = res.best_f < search.best_objective;
            search.offer(
                res.best_f,
                BestChannel::Feedback { measuring },
                Realization { channel: ch, parties },
                res.converged,
            );
            if improved {
                search.traces = res.traces;
            }
        }
    }
}

/// Regularized advantage over n identical copies (n = 1 or 2). For two
/// copies no free search is run; the bound comes from the candidates and
/// the tensor square of the best single-copy encoding.
pub fn advantage_n_copies(
    s: &PartitionedState,
    cut: &Cut,
    class: &ChannelClass,
    n: usize,
    cfg: &OptimizerConfig,
) -> Result<AdvantageReport> {
    match n {
        1 => return quantum_advantage(s, cut, class, cfg),
        2 => {}
        _ => {
            return Err(Error::OutOfRange { name: "copies", value: n as f64 });
        }
    }
    let single = quantum_advantage(s, cut, class, cfg)?;
    let real = single.realization.as_ref().expect("report carries realization");

    let offset = s.n_parties();
    let doubled = s.tensor(s);
    let cut2 = Cut::new(
        cut.senders
            .iter()
            .copied()
            .chain(cut.senders.iter().map(|&p| p + offset))
            .collect(),
        cut.receivers
            .iter()
            .copied()
            .chain(cut.receivers.iter().map(|&p| p + offset))
            .collect(),
    );
    let ws = Workspace::build(&doubled, &cut2)?;

    // re-express the single-copy realization in original party indices
    let single_ws = Workspace::build(s, cut)?;
    let orig_parties: Vec<usize> = real
        .parties
        .iter()
        .map(|&wp| single_ws.involved[wp])
        .collect();
    let pair = product_channel(&[real.channel.clone(), real.channel.clone()])?;
    let pair_parties: Vec<usize> = orig_parties
        .iter()
        .copied()
        .chain(orig_parties.iter().map(|&p| p + offset))
        .map(|p| ws.to_work(p))
        .collect();

    let d_in: usize = ws.sender_dims().iter().product();
    let mut best = (
        ws.objective(&KrausChannel::identity(d_in), &ws.senders)?,
        "identity".to_string(),
        KrausChannel::identity(d_in),
        ws.senders.clone(),
    );
    let subst = substitution_channel(d_in, &PureState::basis(vec![d_in], &[0]));
    let obj = ws.objective(&subst, &ws.senders)?;
    if obj < best.0 {
        best = (obj, "substitution".into(), subst, ws.senders.clone());
    }
    let obj = ws.objective(&pair, &pair_parties)?;
    if obj < best.0 {
        best = (obj, "single-copy pair".into(), pair, pair_parties);
    }

    let value = (ws.s_receiver - best.0) / 2.0;
    let d_out = best.2.d_out();
    Ok(AdvantageReport {
        class: class.clone(),
        value,
        s_receiver: single.s_receiver,
        best_objective: best.0 / 2.0,
        d_out,
        capacity: (d_out as f64).log2() / 2.0 + value,
        best: BestChannel::Candidate(best.1),
        converged: single.converged,
        traces: Vec::new(),
        realization: Some(Realization { channel: best.2, parties: best.3 }),
    })
}

/// An entropy-nonincreasing local filter bound on the advantage:
/// for any filter A with unit operator norm, the advantage is at most
/// S(receivers) minus the entropy of the filtered, renormalized state.
#[derive(Debug, Clone, Serialize)]
pub struct FilterBound {
    pub value: f64,
    /// Smallest singular value of the normalized optimal filter.
    pub min_singular: f64,
    pub converged: bool,
    #[serde(skip_serializing)]
    pub filter: QMatrix,
}

fn filter_objective(ws: &Workspace, filter: &QMatrix) -> f64 {
    let norm = filter.operator_norm();
    if norm < 1e-12 {
        return f64::INFINITY;
    }
    let a = filter.scale_re(1.0 / norm);
    // fronted order: senders then receivers
    let order: Vec<usize> = ws.senders.iter().chain(ws.receivers.iter()).copied().collect();
    let fronted = ws.work.permute(&order);
    let d_rest: usize = ws.receivers.iter().map(|&p| ws.work.dims()[p]).product();
    let full = a.kron(&QMatrix::identity(d_rest));
    let filtered = full.mul(fronted.matrix()).mul(&full.dagger());
    let t = filtered.trace().re;
    if t < 1e-10 {
        return f64::INFINITY;
    }
    von_neumann_entropy(&filtered.scale_re(1.0 / t).hermitize()).unwrap_or(f64::INFINITY)
}

fn filter_matrix(dims: &[usize], x: &[f64]) -> QMatrix {
    // per-factor complex square matrices, tensored in order
    let mut off = 0;
    let mut acc: Option<QMatrix> = None;
    for &d in dims {
        let m = QMatrix::from_fn(d, d, |r, c| {
            let i = off + 2 * (r * d + c);
            crate::qcore::matrix::C64::new(x[i], x[i + 1])
        });
        off += 2 * d * d;
        acc = Some(match acc {
            None => m,
            Some(a) => a.kron(&m),
        });
    }
    acc.expect("at least one factor")
}

fn filter_bound_impl(
    s: &PartitionedState,
    cut: &Cut,
    factor_dims: Vec<usize>,
    cfg: &OptimizerConfig,
) -> Result<FilterBound> {
    cfg.validate()?;
    let ws = Workspace::build(s, cut)?;
    let dof: usize = factor_dims.iter().map(|d| 2 * d * d).sum();

    // deterministic starts: identity filters and each one-factor basis
    // projector (rank-deficient corners are frequent optima)
    let ident: Vec<f64> = {
        let mut x = vec![0.0; dof];
        let mut off = 0;
        for &d in &factor_dims {
            for i in 0..d {
                x[off + 2 * (i * d + i)] = 1.0;
            }
            off += 2 * d * d;
        }
        x
    };
    let mut starts = vec![ident.clone()];
    let mut off = 0;
    for &d in &factor_dims {
        for i in 0..d {
            let mut x = ident.clone();
            for j in 0..d {
                if j != i {
                    x[off + 2 * (j * d + j)] = 0.0;
                }
            }
            starts.push(x);
        }
        off += 2 * d * d;
    }

    let eval = |x: &[f64]| filter_objective(&ws, &filter_matrix(&factor_dims, x));
    let res = minimize_with_starts(eval, dof, cfg, &starts);
    let raw = filter_matrix(&factor_dims, &res.best_x);
    let filter = raw.scale_re(1.0 / raw.operator_norm());
    Ok(FilterBound {
        value: ws.s_receiver - res.best_f,
        min_singular: filter.min_singular_value(),
        converged: res.converged,
        filter,
    })
}

/// Upper bound from a single filter on the whole sender space.
pub fn filter_bound_global(
    s: &PartitionedState,
    cut: &Cut,
    cfg: &OptimizerConfig,
) -> Result<FilterBound> {
    let ws = Workspace::build(s, cut)?;
    let d: usize = ws.sender_dims().iter().product();
    filter_bound_impl(s, cut, vec![d], cfg)
}

/// Upper bound from a product of per-group filters.
pub fn filter_bound_product(
    s: &PartitionedState,
    cut: &Cut,
    partition: &[Vec<usize>],
    cfg: &OptimizerConfig,
) -> Result<FilterBound> {
    ChannelClass::LocalProduct { partition: partition.to_vec() }.validate(&cut.senders)?;
    let ws = Workspace::build(s, cut)?;
    // partition groups must match the ascending sender order the filter
    // construction tensors over
    let flat: Vec<usize> = partition
        .iter()
        .flat_map(|g| g.iter().map(|&p| ws.to_work(p)))
        .collect();
    if flat != ws.senders {
        return Err(Error::InvalidCut(format!(
            "product filter partition {partition:?} must list senders in ascending order"
        )));
    }
    let dims: Vec<usize> = partition
        .iter()
        .map(|g| g.iter().map(|&p| ws.to_work(p)).map(|p| ws.work.dims()[p]).product())
        .collect();
    filter_bound_impl(s, cut, dims, cfg)
}

/// Outcome of a no-advantage analysis per encoding class.
#[derive(Debug, Clone, Serialize)]
pub enum Verdict {
    /// A concrete encoding beats the threshold; its value is a certified
    /// lower bound.
    Advantage { value: f64 },
    /// Structural certificates force the advantage to zero exactly.
    NoAdvantageCertified { reason: String },
    /// Nothing above the threshold was found within the search budget.
    NoAdvantageAtBudget { best: f64 },
}

impl Verdict {
    pub fn is_certified_zero(&self) -> bool {
        matches!(self, Verdict::NoAdvantageCertified { .. })
    }

    pub fn advantage_value(&self) -> Option<f64> {
        match self {
            Verdict::Advantage { value } => Some(*value),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DcVerdicts {
    pub global: Verdict,
    pub feedback: Verdict,
    pub local: Verdict,
    pub eps: f64,
}

/// Extra encoding candidates per class; local candidates are also legal
/// feedback and global encodings, feedback candidates also global ones.
#[derive(Default)]
pub struct ClassCandidates {
    pub global: Vec<CandidateChannel>,
    pub feedback: Vec<CandidateChannel>,
    pub local: Vec<CandidateChannel>,
}

/// Entropy is non-decreasing from a separable state's reduction to the
/// whole, so a chain of separability certificates peeling off one sender
/// group at a time forces every product encoding's output entropy up to
/// S(receivers). Each peel needs the peeled group separable from the rest
/// of the full state; the final step needs the (last group + receivers)
/// reduction separable across that group : receivers.
fn product_no_go(named: &NamedState, cut: &Cut, partition: &[Vec<usize>]) -> Option<String> {
    for (last, group) in partition.iter().enumerate() {
        let peeled: Vec<&Vec<usize>> = partition
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != last)
            .map(|(_, g)| g)
            .collect();
        if !peeled
            .iter()
            .all(|g| named.full_cut_certificate(g).is_some())
        {
            continue;
        }
        let mut keep: Vec<usize> = group.iter().chain(cut.receivers.iter()).copied().collect();
        keep.sort_unstable();
        let left: Vec<usize> = group
            .iter()
            .map(|&p| keep.iter().position(|&q| q == p).unwrap())
            .collect();
        if named.reduction_certificate(&keep, &left).is_some() {
            let names: Vec<String> = peeled
                .iter()
                .map(|g| g.iter().map(|&p| named.state.labels()[p].clone()).collect::<Vec<_>>().join(""))
                .collect();
            return Some(format!(
                "separability chain peeling {} then cutting the last group from the receivers",
                names.join(", ")
            ));
        }
    }
    None
}

/// Classical communication between sender groups is a separable operation
/// across every cut that respects the grouping, so two full-state
/// separability certificates kill all feedback (indeed all LOCC)
/// encodings: one separating some group G (with the other groups not
/// split) from a side containing all receivers, one cutting exactly
/// (G + receivers) from the remaining senders.
fn feedback_no_go(named: &NamedState, cut: &Cut, partition: &[Vec<usize>]) -> Option<String> {
    let n = named.state.n_parties();
    for group in partition {
        // (a) a cut with the group on one side, all receivers on the other,
        // and no sender group split
        let found_a = named.certificates.iter().any(|cert| {
            if cert.reduction.is_some() {
                return false;
            }
            let comp: Vec<usize> = (0..n).filter(|i| !cert.left_parties.contains(i)).collect();
            let hit = [&cert.left_parties, &comp].iter().any(|left| {
                let in_left = |p: usize| left.contains(&p);
                group.iter().all(|&p| in_left(p))
                    && cut.receivers.iter().all(|&p| !in_left(p))
                    && partition.iter().all(|g| {
                        g.iter().all(|&p| in_left(p)) || g.iter().all(|&p| !in_left(p))
                    })
            });
            hit
        });
        if !found_a {
            continue;
        }
        // (b) exactly (group + receivers) against the remaining senders
        let side: Vec<usize> = group.iter().chain(cut.receivers.iter()).copied().collect();
        if named.full_cut_certificate(&side).is_some() {
            let name: String = group
                .iter()
                .map(|&p| named.state.labels()[p].clone())
                .collect::<Vec<_>>()
                .join("");
            return Some(format!(
                "two separability cuts isolate {name} with the receivers"
            ));
        }
    }
    None
}

/// A separability certificate across senders : receivers kills even global
/// encodings.
fn global_no_go(named: &NamedState, cut: &Cut) -> Option<String> {
    let involved = cut.involved();
    let hit = if involved.len() == named.state.n_parties() {
        named.full_cut_certificate(&cut.senders).is_some()
    } else {
        let left: Vec<usize> = cut
            .senders
            .iter()
            .map(|&p| involved.iter().position(|&q| q == p).unwrap())
            .collect();
        named.reduction_certificate(&involved, &left).is_some()
    };
    hit.then(|| "state separable across senders : receivers".to_string())
}

/// Decide, per encoding class, whether the state is dense-codeable across
/// the cut. Structural certificates are consulted first; remaining classes
/// fall back to the channel search seeded with the supplied candidates.
pub fn classify_dc(
    named: &NamedState,
    cut: &Cut,
    partition: &[Vec<usize>],
    cfg: &OptimizerConfig,
    cands: &ClassCandidates,
) -> Result<DcVerdicts> {
    named.verify_certificates()?;
    let s = &named.state;
    cut.validate(s)?;

    let global_cert = global_no_go(named, cut);
    let mut feedback_cert = feedback_no_go(named, cut, partition);
    let mut local_cert = product_no_go(named, cut, partition);
    // a zero higher in the hierarchy propagates down
    if let Some(reason) = &global_cert {
        feedback_cert.get_or_insert_with(|| reason.clone());
    }
    if let Some(reason) = &feedback_cert {
        local_cert.get_or_insert_with(|| reason.clone());
    }

    let verdict_from = |value: f64| {
        if value > EPS_DC {
            Verdict::Advantage { value }
        } else {
            Verdict::NoAdvantageAtBudget { best: value }
        }
    };

    let local = match local_cert {
        Some(reason) => Verdict::NoAdvantageCertified { reason },
        None => {
            let class = ChannelClass::LocalProduct { partition: partition.to_vec() };
            let rep = quantum_advantage_with(s, cut, &class, cfg, &cands.local)?;
            verdict_from(rep.value)
        }
    };
    let feedback = match feedback_cert {
        Some(reason) => Verdict::NoAdvantageCertified { reason },
        None => {
            let class = ChannelClass::OneWayFeedback { partition: partition.to_vec() };
            let mut extra = cands.feedback.clone();
            extra.extend(cands.local.iter().cloned());
            let rep = quantum_advantage_with(s, cut, &class, cfg, &extra)?;
            let floor = local.advantage_value().unwrap_or(f64::NEG_INFINITY);
            verdict_from(rep.value.max(floor))
        }
    };
    let global = match global_cert {
        Some(reason) => Verdict::NoAdvantageCertified { reason },
        None => {
            let mut extra = cands.global.clone();
            extra.extend(cands.feedback.iter().cloned());
            extra.extend(cands.local.iter().cloned());
            let rep = quantum_advantage_with(s, cut, &ChannelClass::Global, cfg, &extra)?;
            let floor = feedback
                .advantage_value()
                .or(local.advantage_value())
                .unwrap_or(f64::NEG_INFINITY);
            verdict_from(rep.value.max(floor))
        }
    };

    Ok(DcVerdicts { global, feedback, local, eps: EPS_DC })
}
