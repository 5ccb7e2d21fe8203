#pragma once

#include "idealpoint/model.hpp"
#include "idealpoint/rollcall.hpp"
#include "idealpoint/sampler.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace idealpoint {

struct EssResult {
    double ess = 0.0;
    bool degenerate = false; // constant chain; ess is reported as 0
};

/// N / (1 + 2 sum rho_k), truncated by Geyer's initial positive sequence and
/// capped at N. Requires at least 10 values.
EssResult effective_sample_size(std::span<const double> chain);

/// Multi-chain ESS from the combined within/between autocorrelation
/// (Gelman et al., BDA3 section 11.5). Chains are cut to the shortest length.
EssResult effective_sample_size(const std::vector<std::vector<double>>& chains);

/// Split-chain potential scale reduction factor. Optional convergence check;
/// NaN for constant input.
double split_rhat(const std::vector<std::vector<double>>& chains);

struct InfoCriteria {
    double dic = 0.0;
    double waic = 0.0;
    double effective_params_dic = 0.0;
    double effective_params_waic = 0.0;
    double lppd = 0.0;
    double loglik_at_mean = 0.0; // log L at the posterior-mean parameters
    double mean_loglik = 0.0;    // mean over draws of log L
};

/// DIC and WAIC in one pass over draws and observed cells. Per-cell
/// log-likelihood variance uses the S - 1 denominator.
InfoCriteria information_criteria(const PosteriorDraws& draws, const VoteMatrix& vm, Link link, int threads = 1);

/// -2 log L(theta_bar) + 2 p_D with p_D = 2 (log L(theta_bar) - mean log L).
double dic(const PosteriorDraws& draws, const VoteMatrix& vm, Link link);

/// -2 (lppd - p_W).
double waic(const PosteriorDraws& draws, const VoteMatrix& vm, Link link);

enum class PpcStatistic {
    OverallYeaRate,      // Yea fraction among observed cells
    MotionYeaRateSd,     // sd of per-motion Yea rates
    LegislatorYeaRateSd, // sd of per-legislator Yea rates
    MeanMotionAgreement, // mean over motions of the majority side's share
};

std::string_view to_string(PpcStatistic s) noexcept;
PpcStatistic parse_ppc_statistic(std::string_view name);
std::vector<PpcStatistic> all_ppc_statistics();

double ppc_statistic(PpcStatistic s, const VoteMatrix& vm);

struct PpcResult {
    std::string statistic;
    double observed = 0.0;
    std::vector<double> replicated;
    double p_value = 0.0; // fraction of replicates >= observed
};

/// Replicates votes at the observed positions from every `stride`-th draw
/// and compares each statistic with its observed value. All statistics share
/// the same replicate matrices.
std::vector<PpcResult> posterior_predictive_checks(const PosteriorDraws& draws, const VoteMatrix& vm, Link link,
                                                   std::span<const PpcStatistic> statistics, std::uint64_t seed,
                                                   std::size_t stride = 1);

PpcResult posterior_predictive_check(const PosteriorDraws& draws, const VoteMatrix& vm, Link link,
                                     std::string_view statistic, std::uint64_t seed, std::size_t stride = 1);

/// Draws a replicate vote matrix from the given parameters; missing cells of
/// `vm` stay missing.
VoteMatrix replicate_votes(const VoteMatrix& vm, const ItemParams& items, const IdealPoints& betas, Link link,
                           Rng& rng);

} // namespace idealpoint
