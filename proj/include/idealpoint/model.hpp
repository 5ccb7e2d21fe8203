#pragma once

#include "idealpoint/rollcall.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>

namespace idealpoint {

enum class Link { Probit, Logit };

Link parse_link(std::string_view name);
std::string_view to_string(Link link) noexcept;

double normal_cdf(double x) noexcept;
double normal_log_pdf(double x, double mean, double variance) noexcept;

/// G(x): standard-normal CDF for probit, expit for logit. Throws
/// NumericalError on non-finite input.
double link_eval(Link link, double x);

/// Probabilities are clamped to [kProbFloor, 1 - kProbFloor] before logs.
inline constexpr double kProbFloor = 1e-12;

/// log p(y | eta) for one observed cell, with clamping.
double cell_log_prob(Link link, double eta, bool yea) noexcept;

/// Per-motion approval (mu) and discrimination (alpha, m x d).
struct ItemParams {
    Eigen::VectorXd mu;
    Eigen::MatrixXd alpha;

    std::size_t motions() const noexcept { return static_cast<std::size_t>(mu.size()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(alpha.cols()); }

    static ItemParams zeros(std::size_t m, std::size_t d) {
        return {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m)),
                Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d))};
    }
};

/// Ideal points, n x d.
struct IdealPoints {
    Eigen::MatrixXd beta;

    std::size_t legislators() const noexcept { return static_cast<std::size_t>(beta.rows()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(beta.cols()); }
};

/// Yea/Nay locations and shock scale of one motion under quadratic utility.
struct VoteAlternatives {
    Eigen::VectorXd psi;
    Eigen::VectorXd zeta;
    double sigma = 1.0;
};

/// mu = (zeta'zeta - psi'psi) / sigma, alpha = 2 (psi - zeta) / sigma.
std::pair<double, Eigen::VectorXd> alternatives_to_item_params(const VoteAlternatives& va);

double vote_probability(double mu, const Eigen::Ref<const Eigen::VectorXd>& alpha,
                        const Eigen::Ref<const Eigen::VectorXd>& beta, Link link);

/// Bernoulli log-likelihood summed over observed cells.
double log_likelihood(const VoteMatrix& vm, const ItemParams& items, const IdealPoints& betas, Link link);

enum class PriorKind {
    Fixed,       // b, B fixed
    HierVar,     // B = s I with s ~ InverseGamma(c, dd), b = 0
    HierMeanVar, // additionally b ~ Normal(a, b_var I)
};

PriorKind parse_prior_kind(std::string_view name);
std::string_view to_string(PriorKind kind) noexcept;

struct PriorConfig {
    Eigen::VectorXd a0; // (d+1), item prior mean
    Eigen::MatrixXd A0; // (d+1)x(d+1), item prior covariance
    Eigen::VectorXd b;  // d, ideal-point prior mean (Fixed)
    Eigen::MatrixXd B;  // dxd, ideal-point prior covariance (Fixed)
    PriorKind kind = PriorKind::Fixed;
    double hyper_mean = 0.0;      // a
    double hyper_mean_var = 25.0; // b
    double ig_shape = 3.0;        // c
    double ig_scale = 2.0;        // dd

    std::size_t dim() const noexcept { return static_cast<std::size_t>(b.size()); }
    bool hierarchical() const noexcept { return kind != PriorKind::Fixed; }

    /// a0 = 0, A0 = 25 I, b = 0, B = I.
    static PriorConfig defaults(std::size_t d, PriorKind kind = PriorKind::Fixed);

    /// Throws ValidationError on non-finite values, shape mismatch,
    /// non-PD covariances or c <= 2 in hierarchical mode.
    void validate() const;
};

/// Current values of the hierarchical ideal-point prior: b and the scalar
/// variance s of B = s I.
struct HyperState {
    Eigen::VectorXd mean;
    double var = 1.0;
};

/// Hyperparameter starting point: prior means (b = a or 0, s = dd/(c-1)).
HyperState initial_hyper(const PriorConfig& pc);

/// Joint log prior density. Anchored legislators are left out of the
/// ideal-point sum. `hyper` must be present when pc is hierarchical.
double log_prior(const ItemParams& items, const IdealPoints& betas, const PriorConfig& pc,
                 const std::optional<HyperState>& hyper, std::span<const std::size_t> anchored = {});

double mvn_log_density(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& mean,
                       const Eigen::Ref<const Eigen::MatrixXd>& cov);

double inverse_gamma_log_density(double x, double shape, double scale) noexcept;

} // namespace idealpoint
