#pragma once

#include "idealpoint/model.hpp"
#include "idealpoint/random.hpp"
#include "idealpoint/rollcall.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace idealpoint {

/// A legislator whose ideal point is held fixed during sampling.
struct Anchor {
    std::size_t legislator = 0;
    Eigen::VectorXd value;
};

using AnchorSpec = std::vector<Anchor>;

/// Fixes `low` at -1 and `high` at +1 (the one-dimensional convention).
AnchorSpec unit_anchors(std::size_t low, std::size_t high);

/// Throws on out-of-range indices, repeated legislators, wrong dimension or
/// coinciding values. Returns false when fewer than d + 1 anchors are given,
/// which leaves the space unidentified.
bool validate_anchors(const AnchorSpec& anchors, std::size_t n, std::size_t d);

struct ChainConfig {
    std::size_t dim = 1;
    Link link = Link::Logit;
    PriorConfig priors = PriorConfig::defaults(1);
    AnchorSpec anchors;
    std::size_t iterations = 6000; // total sweeps, burn-in included
    std::size_t burn_in = 1000;
    std::size_t thin = 1;
    std::uint64_t seed = 0;
    int threads = 1; // within-chain worker threads; never changes the draws

    /// floor((iterations - burn_in) / thin)
    std::size_t retained() const noexcept;

    /// Throws ValidationError on an invalid schedule, prior or anchor set.
    /// Returns human-readable warnings (e.g. too few anchors).
    std::vector<std::string> validate(std::size_t n) const;
};

/// Observed cells grouped both ways, built once per vote matrix.
class ObservedIndex {
  public:
    struct Cell {
        std::uint32_t other; // motion index in a row list, legislator index in a column list
        bool yea;
    };

    explicit ObservedIndex(const VoteMatrix& vm);

    std::span<const Cell> row(std::size_t i) const { return rows_[i]; }
    std::span<const Cell> column(std::size_t j) const { return cols_[j]; }
    std::size_t legislators() const noexcept { return rows_.size(); }
    std::size_t motions() const noexcept { return cols_.size(); }

  private:
    std::vector<std::vector<Cell>> rows_;
    std::vector<std::vector<Cell>> cols_;
};

/// Current values of every unknown in one chain.
///
/// `latent` is n x m. Under probit it holds the truncated-normal latent
/// utilities y*; under logit it holds the Polya-Gamma mixing weights omega,
/// for which the working response is (y - 1/2) / omega with precision omega.
/// Cells with a missing vote are NaN and are never touched.
struct ChainState {
    ItemParams items;
    IdealPoints betas;
    Eigen::MatrixXd latent;
    std::optional<HyperState> hyper;
};

/// Zeros for mu, alpha and free betas; anchors at their values; hierarchical
/// values at their prior means; then one latent draw.
ChainState init_state(const VoteMatrix& vm, const ChainConfig& cfg);

/// Redraws the latent quantity of every observed cell given current
/// parameters. Missing cells are left as they are.
void sample_latent(ChainState& state, const ObservedIndex& index, Link link, const SweepStreams& streams,
                   int threads = 1);

/// Draws (mu_j, alpha_j) for every motion from its Gaussian full conditional,
/// using all legislators (anchors included) with an observed vote on j.
void update_item_params(ChainState& state, const ObservedIndex& index, Link link, const PriorConfig& priors,
                        const SweepStreams& streams, int threads = 1);

/// Draws beta_i for every non-anchored legislator from its Gaussian full
/// conditional. Anchored rows are not written.
void update_ideal_points(ChainState& state, const ObservedIndex& index, Link link, const PriorConfig& priors,
                         const AnchorSpec& anchors, const SweepStreams& streams, int threads = 1);

/// Conjugate update of the hierarchical ideal-point prior: the shared
/// variance, then (mean-and-variance mode only) the mean.
void update_hierarchy(ChainState& state, const PriorConfig& priors, const AnchorSpec& anchors,
                      const SweepStreams& streams);

/// Retained draws of one chain.
struct PosteriorDraws {
    std::size_t legislators = 0;
    std::size_t motions = 0;
    std::size_t dim = 1;
    Eigen::MatrixXd mu;         // draws x m
    Eigen::MatrixXd alpha;      // draws x (m d); column j d + k
    Eigen::MatrixXd beta;       // draws x (n d); column i d + k
    Eigen::VectorXd loglik;     // per-draw log-likelihood
    Eigen::MatrixXd hyper_mean; // draws x d, empty for fixed priors
    Eigen::VectorXd hyper_var;  // empty for fixed priors
    ChainConfig config;

    std::size_t draws() const noexcept { return static_cast<std::size_t>(mu.rows()); }
    ItemParams items_at(std::size_t s) const;
    IdealPoints betas_at(std::size_t s) const;
    ItemParams mean_items() const;
    IdealPoints mean_betas() const;

    void resize(std::size_t draws, bool hierarchical);
    void record(std::size_t s, const ChainState& state, double loglik);
};

/// Runs one chain sweep by sweep.
class GibbsSampler {
  public:
    GibbsSampler(const VoteMatrix& vm, ChainConfig cfg);

    /// latent -> items -> ideal points -> hierarchy.
    void sweep();

    const ChainState& state() const noexcept { return state_; }
    ChainState& state() noexcept { return state_; }
    const ChainConfig& config() const noexcept { return cfg_; }
    std::size_t sweeps_done() const noexcept { return sweep_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    /// Log-likelihood at the current state; deterministic for any thread count.
    double current_loglik() const;

  private:
    VoteMatrix vm_;
    ChainConfig cfg_;
    ObservedIndex index_;
    ChainState state_;
    std::size_t sweep_ = 0;
    std::vector<std::string> warnings_;
};

PosteriorDraws run_chain(const VoteMatrix& vm, const ChainConfig& cfg);

/// Runs one chain per seed concurrently. Seeds must be distinct.
std::vector<PosteriorDraws> run_chains_parallel(const VoteMatrix& vm, const ChainConfig& cfg,
                                                std::span<const std::uint64_t> seeds);

} // namespace idealpoint
