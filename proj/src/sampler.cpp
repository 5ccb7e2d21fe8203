#include "idealpoint/sampler.hpp"

#include "idealpoint/polya_gamma.hpp"
#include "idealpoint/truncated_normal.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <set>

namespace idealpoint {

namespace {

// Draws x ~ N(P^-1 r, P^-1) given the precision P.
bool draw_from_precision(const Eigen::MatrixXd& precision, const Eigen::VectorXd& r, Rng& rng,
                         Eigen::Ref<Eigen::VectorXd> out) {
    Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success) return false;
    Eigen::VectorXd z(r.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = standard_normal(rng);
    out = llt.solve(r) + llt.matrixU().solve(z);
    return true;
}

// Per-cell weight and weighted response of the Gaussian working model.
struct Working {
    double weight;
    double weighted_response;
};

inline Working working_cell(Link link, double latent, bool yea) noexcept {
    if (link == Link::Probit) return {1.0, latent};
    return {latent, yea ? 0.5 : -0.5};
}

std::vector<char> anchor_mask(const AnchorSpec& anchors, std::size_t n) {
    std::vector<char> mask(n, 0);
    for (const auto& a : anchors) mask[a.legislator] = 1;
    return mask;
}

} // namespace

AnchorSpec unit_anchors(std::size_t low, std::size_t high) {
    return {Anchor{low, Eigen::VectorXd::Constant(1, -1.0)}, Anchor{high, Eigen::VectorXd::Constant(1, 1.0)}};
}

bool validate_anchors(const AnchorSpec& anchors, std::size_t n, std::size_t d) {
    std::set<std::size_t> seen;
    for (std::size_t a = 0; a < anchors.size(); ++a) {
        const auto& anchor = anchors[a];
        if (anchor.legislator >= n)
            throw ValidationError("anchor index " + std::to_string(anchor.legislator) + " is out of range");
        if (!seen.insert(anchor.legislator).second)
            throw ValidationError("legislator " + std::to_string(anchor.legislator) + " is anchored twice");
        if (static_cast<std::size_t>(anchor.value.size()) != d)
            throw ValidationError("anchor value dimension does not match the model dimension");
        if (!anchor.value.allFinite()) throw ValidationError("anchor values must be finite");
        for (std::size_t b = 0; b < a; ++b) {
            if (anchors[b].value == anchor.value) throw ValidationError("anchor values must be pairwise distinct");
        }
    }
    return anchors.size() >= d + 1;
}

std::size_t ChainConfig::retained() const noexcept {
    if (thin == 0 || burn_in >= iterations) return 0;
    return (iterations - burn_in) / thin;
}

std::vector<std::string> ChainConfig::validate(std::size_t n) const {
    std::vector<std::string> warnings;
    if (dim < 1) throw ValidationError("dimension must be at least 1");
    if (priors.dim() != dim) throw ValidationError("prior dimension does not match the model dimension");
    priors.validate();
    if (thin < 1) throw ValidationError("thin must be at least 1");
    if (burn_in >= iterations) throw ValidationError("burn-in must be smaller than the total number of sweeps");
    if (retained() < 1) throw ValidationError("schedule retains no draws");
    if (threads < 1) throw ValidationError("threads must be at least 1");
    if (!validate_anchors(anchors, n, dim))
        warnings.push_back("fewer than d + 1 anchors: location, scale and reflection are not identified");
    return warnings;
}

ObservedIndex::ObservedIndex(const VoteMatrix& vm) : rows_(vm.legislators()), cols_(vm.motions()) {
    for (std::size_t i = 0; i < vm.legislators(); ++i) {
        for (std::size_t j = 0; j < vm.motions(); ++j) {
            Vote v = vm(i, j);
            if (!is_observed(v)) continue;
            const bool yea = v == Vote::Yea;
            rows_[i].push_back({static_cast<std::uint32_t>(j), yea});
            cols_[j].push_back({static_cast<std::uint32_t>(i), yea});
        }
    }
}

void sample_latent(ChainState& state, const ObservedIndex& index, Link link, const SweepStreams& streams,
                   int threads) {
    const auto n = static_cast<std::ptrdiff_t>(index.legislators());
    const auto& items = state.items;
    const auto& beta = state.betas.beta;
    auto& latent = state.latent;
#pragma omp parallel for num_threads(threads) schedule(static) if (threads > 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        Rng rng = streams.stream(Phase::Latent, static_cast<std::uint64_t>(i));
        const auto bi = beta.row(i);
        for (const auto& cell : index.row(static_cast<std::size_t>(i))) {
            const Eigen::Index j = cell.other;
            const double eta = items.mu(j) + items.alpha.row(j).dot(bi);
            latent(i, j) = link == Link::Probit ? truncated_normal_at_zero(rng, eta, cell.yea)
                                                : polya_gamma_draw(rng, eta);
        }
    }
}

void update_item_params(ChainState& state, const ObservedIndex& index, Link link, const PriorConfig& priors,
                        const SweepStreams& streams, int threads) {
    const Eigen::Index d = state.items.alpha.cols();
    const Eigen::MatrixXd prior_precision = priors.A0.inverse();
    const Eigen::VectorXd prior_shift = prior_precision * priors.a0;
    const auto m = static_cast<std::ptrdiff_t>(index.motions());
    const auto& beta = state.betas.beta;
    const auto& latent = state.latent;
    bool failed = false;
#pragma omp parallel for num_threads(threads) schedule(static) if (threads > 1) reduction(|| : failed)
    for (std::ptrdiff_t j = 0; j < m; ++j) {
        Eigen::MatrixXd precision = prior_precision;
        Eigen::VectorXd r = prior_shift;
        Eigen::VectorXd x(d + 1);
        x(0) = 1.0;
        for (const auto& cell : index.column(static_cast<std::size_t>(j))) {
            const Eigen::Index i = cell.other;
            const Working w = working_cell(link, latent(i, j), cell.yea);
            x.tail(d) = beta.row(i).transpose();
            precision.noalias() += w.weight * x * x.transpose();
            r.noalias() += w.weighted_response * x;
        }
        Rng rng = streams.stream(Phase::Items, static_cast<std::uint64_t>(j));
        Eigen::VectorXd theta(d + 1);
        if (!draw_from_precision(precision, r, rng, theta)) {
            failed = true;
            continue;
        }
        state.items.mu(j) = theta(0);
        state.items.alpha.row(j) = theta.tail(d).transpose();
    }
    if (failed) throw NumericalError("item-parameter posterior precision is not positive definite");
}

void update_ideal_points(ChainState& state, const ObservedIndex& index, Link link, const PriorConfig& priors,
                         const AnchorSpec& anchors, const SweepStreams& streams, int threads) {
    const Eigen::Index d = state.betas.beta.cols();
    Eigen::VectorXd prior_mean = priors.b;
    Eigen::MatrixXd prior_cov = priors.B;
    if (priors.hierarchical()) {
        if (!state.hyper) throw ValidationError("hierarchical prior needs hyperparameter state");
        prior_mean = state.hyper->mean;
        prior_cov = state.hyper->var * Eigen::MatrixXd::Identity(d, d);
    }
    const Eigen::MatrixXd prior_precision = prior_cov.inverse();
    const Eigen::VectorXd prior_shift = prior_precision * prior_mean;
    const auto mask = anchor_mask(anchors, index.legislators());
    const auto n = static_cast<std::ptrdiff_t>(index.legislators());
    const auto& items = state.items;
    const auto& latent = state.latent;
    bool failed = false;
#pragma omp parallel for num_threads(threads) schedule(static) if (threads > 1) reduction(|| : failed)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        if (mask[static_cast<std::size_t>(i)]) continue;
        Eigen::MatrixXd precision = prior_precision;
        Eigen::VectorXd r = prior_shift;
        for (const auto& cell : index.row(static_cast<std::size_t>(i))) {
            const Eigen::Index j = cell.other;
            const Working w = working_cell(link, latent(i, j), cell.yea);
            const auto a = items.alpha.row(j).transpose();
            precision.noalias() += w.weight * a * a.transpose();
            r.noalias() += (w.weighted_response - w.weight * items.mu(j)) * a;
        }
        Rng rng = streams.stream(Phase::IdealPoints, static_cast<std::uint64_t>(i));
        Eigen::VectorXd b(d);
        if (!draw_from_precision(precision, r, rng, b)) {
            failed = true;
            continue;
        }
        state.betas.beta.row(i) = b.transpose();
    }
    if (failed) throw NumericalError("ideal-point posterior precision is not positive definite");
}

void update_hierarchy(ChainState& state, const PriorConfig& priors, const AnchorSpec& anchors,
                      const SweepStreams& streams) {
    if (!priors.hierarchical()) throw ValidationError("update_hierarchy called with a non-hierarchical prior");
    if (!state.hyper) state.hyper = initial_hyper(priors);
    auto& hyper = *state.hyper;
    const auto& beta = state.betas.beta;
    const Eigen::Index d = beta.cols();
    const auto mask = anchor_mask(anchors, static_cast<std::size_t>(beta.rows()));

    Rng rng = streams.stream(Phase::Hierarchy, 0);
    double n_free = 0.0;
    double ss = 0.0;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
    for (Eigen::Index i = 0; i < beta.rows(); ++i) {
        if (mask[static_cast<std::size_t>(i)]) continue;
        n_free += 1.0;
        ss += (beta.row(i).transpose() - hyper.mean).squaredNorm();
        sum += beta.row(i).transpose();
    }
    hyper.var = inverse_gamma_draw(rng, priors.ig_shape + 0.5 * n_free * static_cast<double>(d),
                                   priors.ig_scale + 0.5 * ss);
    if (priors.kind == PriorKind::HierMeanVar) {
        const double precision = n_free / hyper.var + 1.0 / priors.hyper_mean_var;
        for (Eigen::Index k = 0; k < d; ++k) {
            const double mean = (sum(k) / hyper.var + priors.hyper_mean / priors.hyper_mean_var) / precision;
            hyper.mean(k) = mean + standard_normal(rng) / std::sqrt(precision);
        }
    }
}

ChainState init_state(const VoteMatrix& vm, const ChainConfig& cfg) {
    const std::size_t n = vm.legislators(), m = vm.motions();
    validate_anchors(cfg.anchors, n, cfg.dim);
    ChainState state;
    state.items = ItemParams::zeros(m, cfg.dim);
    state.betas.beta = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cfg.dim));
    for (const auto& a : cfg.anchors) state.betas.beta.row(static_cast<Eigen::Index>(a.legislator)) = a.value.transpose();
    if (cfg.priors.hierarchical()) state.hyper = initial_hyper(cfg.priors);
    state.latent = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m),
                                             std::numeric_limits<double>::quiet_NaN());
    ObservedIndex index(vm);
    sample_latent(state, index, cfg.link, SweepStreams{cfg.seed, 0}, cfg.threads);
    return state;
}

GibbsSampler::GibbsSampler(const VoteMatrix& vm, ChainConfig cfg)
    : vm_(vm), cfg_(std::move(cfg)), index_(vm_) {
    warnings_ = cfg_.validate(vm_.legislators());
    if (vm_.observed_count() == 0) throw ValidationError("vote matrix has no observed votes");
    state_ = init_state(vm_, cfg_);
}

void GibbsSampler::sweep() {
    ++sweep_;
    const SweepStreams streams{cfg_.seed, sweep_};
    // The initial state already carries a latent draw for sweep 1.
    if (sweep_ > 1) sample_latent(state_, index_, cfg_.link, streams, cfg_.threads);
    update_item_params(state_, index_, cfg_.link, cfg_.priors, streams, cfg_.threads);
    update_ideal_points(state_, index_, cfg_.link, cfg_.priors, cfg_.anchors, streams, cfg_.threads);
    if (cfg_.priors.hierarchical()) update_hierarchy(state_, cfg_.priors, cfg_.anchors, streams);
}

double GibbsSampler::current_loglik() const {
    const auto n = static_cast<std::ptrdiff_t>(index_.legislators());
    std::vector<double> rows(static_cast<std::size_t>(n), 0.0);
    const auto& items = state_.items;
    const auto& beta = state_.betas.beta;
    const Link link = cfg_.link;
    const int threads = cfg_.threads;
#pragma omp parallel for num_threads(threads) schedule(static) if (threads > 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double acc = 0.0;
        const auto bi = beta.row(i);
        for (const auto& cell : index_.row(static_cast<std::size_t>(i))) {
            const Eigen::Index j = cell.other;
            acc += cell_log_prob(link, items.mu(j) + items.alpha.row(j).dot(bi), cell.yea);
        }
        rows[static_cast<std::size_t>(i)] = acc;
    }
    double total = 0.0;
    for (double v : rows) total += v;
    return total;
}

void PosteriorDraws::resize(std::size_t draws, bool hierarchical) {
    const auto s = static_cast<Eigen::Index>(draws);
    mu.resize(s, static_cast<Eigen::Index>(motions));
    alpha.resize(s, static_cast<Eigen::Index>(motions * dim));
    beta.resize(s, static_cast<Eigen::Index>(legislators * dim));
    loglik.resize(s);
    if (hierarchical) {
        hyper_mean.resize(s, static_cast<Eigen::Index>(dim));
        hyper_var.resize(s);
    } else {
        hyper_mean.resize(0, 0);
        hyper_var.resize(0);
    }
}

void PosteriorDraws::record(std::size_t s, const ChainState& state, double ll) {
    const auto row = static_cast<Eigen::Index>(s);
    const auto d = static_cast<Eigen::Index>(dim);
    mu.row(row) = state.items.mu.transpose();
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(motions); ++j)
        for (Eigen::Index k = 0; k < d; ++k) alpha(row, j * d + k) = state.items.alpha(j, k);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(legislators); ++i)
        for (Eigen::Index k = 0; k < d; ++k) beta(row, i * d + k) = state.betas.beta(i, k);
    loglik(row) = ll;
    if (hyper_var.size() > 0 && state.hyper) {
        hyper_mean.row(row) = state.hyper->mean.transpose();
        hyper_var(row) = state.hyper->var;
    }
}

ItemParams PosteriorDraws::items_at(std::size_t s) const {
    const auto row = static_cast<Eigen::Index>(s);
    const auto d = static_cast<Eigen::Index>(dim);
    ItemParams items = ItemParams::zeros(motions, dim);
    items.mu = mu.row(row).transpose();
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(motions); ++j)
        for (Eigen::Index k = 0; k < d; ++k) items.alpha(j, k) = alpha(row, j * d + k);
    return items;
}

IdealPoints PosteriorDraws::betas_at(std::size_t s) const {
    const auto row = static_cast<Eigen::Index>(s);
    const auto d = static_cast<Eigen::Index>(dim);
    IdealPoints b{Eigen::MatrixXd(static_cast<Eigen::Index>(legislators), d)};
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(legislators); ++i)
        for (Eigen::Index k = 0; k < d; ++k) b.beta(i, k) = beta(row, i * d + k);
    return b;
}

ItemParams PosteriorDraws::mean_items() const {
    const auto d = static_cast<Eigen::Index>(dim);
    ItemParams items = ItemParams::zeros(motions, dim);
    items.mu = mu.colwise().mean().transpose();
    const Eigen::RowVectorXd a = alpha.colwise().mean();
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(motions); ++j)
        for (Eigen::Index k = 0; k < d; ++k) items.alpha(j, k) = a(j * d + k);
    return items;
}

IdealPoints PosteriorDraws::mean_betas() const {
    const auto d = static_cast<Eigen::Index>(dim);
    const Eigen::RowVectorXd b = beta.colwise().mean();
    IdealPoints out{Eigen::MatrixXd(static_cast<Eigen::Index>(legislators), d)};
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(legislators); ++i)
        for (Eigen::Index k = 0; k < d; ++k) out.beta(i, k) = b(i * d + k);
    return out;
}

PosteriorDraws run_chain(const VoteMatrix& vm, const ChainConfig& cfg) {
    GibbsSampler sampler(vm, cfg);
    PosteriorDraws draws;
    draws.legislators = vm.legislators();
    draws.motions = vm.motions();
    draws.dim = cfg.dim;
    draws.config = cfg;
    draws.resize(cfg.retained(), cfg.priors.hierarchical());
    std::size_t kept = 0;
    for (std::size_t s = 1; s <= cfg.iterations; ++s) {
        sampler.sweep();
        if (s > cfg.burn_in && (s - cfg.burn_in) % cfg.thin == 0)
            draws.record(kept++, sampler.state(), sampler.current_loglik());
    }
    return draws;
}

std::vector<PosteriorDraws> run_chains_parallel(const VoteMatrix& vm, const ChainConfig& cfg,
                                                std::span<const std::uint64_t> seeds) {
    if (seeds.empty()) throw ValidationError("at least one chain seed is required");
    std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
    if (unique.size() != seeds.size()) throw ValidationError("chain seeds must be distinct");
    cfg.validate(vm.legislators());

    std::vector<std::future<PosteriorDraws>> futures;
    for (auto seed : seeds) {
        ChainConfig c = cfg;
        c.seed = seed;
        futures.push_back(std::async(std::launch::async, [&vm, c] { return run_chain(vm, c); }));
    }
    std::vector<PosteriorDraws> out;
    for (auto& f : futures) out.push_back(f.get());
    return out;
}

} // namespace idealpoint
