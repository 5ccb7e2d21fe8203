#pragma once

#include "idealpoint/rollcall.hpp"
#include "idealpoint/sampler.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace idealpoint {

struct ParamSummary {
    std::string kind; // mu, alpha or beta
    std::size_t index = 0;
    std::size_t dim = 0;
    double mean = 0.0;
    double sd = 0.0;
    double q025 = 0.0;
    double q975 = 0.0;
    bool significant = false; // 0 outside [q025, q975]
    bool anchored = false;
};

/// Linear-interpolation quantile (Hyndman-Fan type 7).
double quantile_type7(std::span<const double> values, double p);

ParamSummary summarize_values(std::string kind, std::size_t index, std::size_t dim, std::span<const double> values);

/// Summaries for every mu, alpha and beta, in that order.
std::vector<ParamSummary> posterior_summary(const PosteriorDraws& draws);

/// Number of non-anchored ideal points whose interval excludes zero.
std::size_t significant_ideal_points(const std::vector<ParamSummary>& summaries);

struct PivotThresholds {
    double low = -1.0;
    double high = 1.0;
    double band = 0.2;
};

struct PivotProbabilities {
    double below_low = 0.0;  // P(beta < low)
    double above_high = 0.0; // P(beta > high)
    double center = 0.0;     // P(-band < beta < band)
};

/// Requires low <= -band < band <= high, so the three events are disjoint.
std::vector<PivotProbabilities> pivot_probabilities(const PosteriorDraws& draws, const PivotThresholds& t = {},
                                                    std::size_t dim = 0);

/// "Name (99%)".
std::string format_pivot(const std::string& name, double probability);

struct DiscriminationReport {
    std::size_t significant = 0;
    double fraction = 0.0;
    std::vector<bool> flags;
};

DiscriminationReport discrimination_significance(const PosteriorDraws& draws, std::size_t dim = 0);

enum class BlocKey { Party, Bloc };

struct BlocSummary {
    std::string group;
    std::size_t members = 0;
    double mean = 0.0;
    std::optional<double> cv; // sd / |mean| of member means; empty for one member or zero mean
};

/// Groups posterior-mean ideal points by party or bloc.
std::vector<BlocSummary> bloc_summary(std::span<const double> posterior_means,
                                      const std::vector<std::string>& legislator_ids,
                                      const std::vector<LegislatorMeta>& meta, BlocKey key = BlocKey::Bloc);

struct RecoveryMetrics {
    double pearson_r = 0.0;
    double slope = 0.0;     // least-squares slope of estimate on truth
    double intercept = 0.0;
};

RecoveryMetrics recovery_metrics(std::span<const double> estimates, std::span<const double> truth);

/// `param_kind,index,mean,sd,q025,q975,significant`. For d > 1 the kind
/// carries the dimension, e.g. `alpha.1`.
std::string summary_table(const std::vector<ParamSummary>& summaries, std::size_t dim);

} // namespace idealpoint
