#include "idealpoint/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace idealpoint {

Link parse_link(std::string_view name) {
    if (name == "probit") return Link::Probit;
    if (name == "logit") return Link::Logit;
    throw ValidationError("unknown link '" + std::string(name) + "' (expected probit or logit)");
}

std::string_view to_string(Link link) noexcept { return link == Link::Probit ? "probit" : "logit"; }

PriorKind parse_prior_kind(std::string_view name) {
    if (name == "fixed") return PriorKind::Fixed;
    if (name == "hier-var") return PriorKind::HierVar;
    if (name == "hier-meanvar") return PriorKind::HierMeanVar;
    throw ValidationError("unknown prior '" + std::string(name) + "' (expected fixed, hier-var or hier-meanvar)");
}

std::string_view to_string(PriorKind kind) noexcept {
    switch (kind) {
    case PriorKind::Fixed: return "fixed";
    case PriorKind::HierVar: return "hier-var";
    case PriorKind::HierMeanVar: return "hier-meanvar";
    }
    return "fixed";
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

double normal_log_pdf(double x, double mean, double variance) noexcept {
    const double z = x - mean;
    return -0.5 * (std::log(2.0 * std::numbers::pi * variance) + z * z / variance);
}

double link_eval(Link link, double x) {
    if (!std::isfinite(x)) throw NumericalError("link evaluated at a non-finite point");
    if (link == Link::Probit) return normal_cdf(x);
    return 1.0 / (1.0 + std::exp(-x));
}

double cell_log_prob(Link link, double eta, bool yea) noexcept {
    // G is symmetric, so 1 - G(eta) = G(-eta) without cancellation.
    const double x = yea ? eta : -eta;
    double p = link == Link::Probit ? normal_cdf(x) : 1.0 / (1.0 + std::exp(-x));
    p = std::clamp(p, kProbFloor, 1.0 - kProbFloor);
    return std::log(p);
}

std::pair<double, Eigen::VectorXd> alternatives_to_item_params(const VoteAlternatives& va) {
    if (!(va.sigma > 0.0)) throw ValidationError("shock scale sigma must be positive");
    if (va.psi.size() != va.zeta.size()) throw ValidationError("psi and zeta dimensions differ");
    const double mu = (va.zeta.squaredNorm() - va.psi.squaredNorm()) / va.sigma;
    Eigen::VectorXd alpha = 2.0 * (va.psi - va.zeta) / va.sigma;
    return {mu, std::move(alpha)};
}

double vote_probability(double mu, const Eigen::Ref<const Eigen::VectorXd>& alpha,
                        const Eigen::Ref<const Eigen::VectorXd>& beta, Link link) {
    if (alpha.size() != beta.size()) throw ValidationError("alpha and beta dimensions differ");
    return link_eval(link, mu + alpha.dot(beta));
}

double log_likelihood(const VoteMatrix& vm, const ItemParams& items, const IdealPoints& betas, Link link) {
    const std::size_t n = vm.legislators(), m = vm.motions();
    if (items.motions() != m || betas.legislators() != n || items.dim() != betas.dim())
        throw ValidationError("parameter dimensions do not match the vote matrix");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto bi = betas.beta.row(static_cast<Eigen::Index>(i));
        for (std::size_t j = 0; j < m; ++j) {
            Vote v = vm(i, j);
            if (!is_observed(v)) continue;
            const auto jj = static_cast<Eigen::Index>(j);
            const double eta = items.mu(jj) + items.alpha.row(jj).dot(bi);
            total += cell_log_prob(link, eta, v == Vote::Yea);
        }
    }
    return total;
}

namespace {

bool is_spd(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() == 0) return false;
    if (!m.isApprox(m.transpose(), 1e-12) || !m.allFinite()) return false;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    return llt.info() == Eigen::Success;
}

} // namespace

PriorConfig PriorConfig::defaults(std::size_t d, PriorKind kind) {
    const auto dd = static_cast<Eigen::Index>(d);
    PriorConfig pc;
    pc.a0 = Eigen::VectorXd::Zero(dd + 1);
    pc.A0 = 25.0 * Eigen::MatrixXd::Identity(dd + 1, dd + 1);
    pc.b = Eigen::VectorXd::Zero(dd);
    pc.B = Eigen::MatrixXd::Identity(dd, dd);
    pc.kind = kind;
    return pc;
}

void PriorConfig::validate() const {
    const auto d = b.size();
    if (d < 1) throw ValidationError("prior dimension must be at least 1");
    if (a0.size() != d + 1 || A0.rows() != d + 1 || B.rows() != d)
        throw ValidationError("prior hyperparameter shapes are inconsistent");
    if (!a0.allFinite() || !b.allFinite()) throw ValidationError("prior means must be finite");
    if (!is_spd(A0)) throw ValidationError("item prior covariance A0 is not symmetric positive definite");
    if (!is_spd(B)) throw ValidationError("ideal-point prior covariance B is not symmetric positive definite");
    if (hierarchical()) {
        if (!std::isfinite(ig_shape) || !(ig_shape > 2.0))
            throw ValidationError("inverse-gamma shape c must exceed 2 for a finite prior variance");
        if (!std::isfinite(ig_scale) || !(ig_scale > 0.0)) throw ValidationError("inverse-gamma scale must be positive");
        if (!std::isfinite(hyper_mean) || !std::isfinite(hyper_mean_var) || !(hyper_mean_var > 0.0))
            throw ValidationError("hyperprior on the ideal-point mean must be finite with positive variance");
    }
}

HyperState initial_hyper(const PriorConfig& pc) {
    HyperState h;
    const auto d = static_cast<Eigen::Index>(pc.dim());
    h.mean = pc.kind == PriorKind::HierMeanVar ? Eigen::VectorXd::Constant(d, pc.hyper_mean) : Eigen::VectorXd::Zero(d);
    h.var = pc.ig_scale / (pc.ig_shape - 1.0);
    return h;
}

double mvn_log_density(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& mean,
                       const Eigen::Ref<const Eigen::MatrixXd>& cov) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw ValidationError("covariance is not positive definite");
    const Eigen::VectorXd z = llt.matrixL().solve(x - mean);
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const auto k = static_cast<double>(x.size());
    return -0.5 * (k * std::log(2.0 * std::numbers::pi) + log_det + z.squaredNorm());
}

double inverse_gamma_log_density(double x, double shape, double scale) noexcept {
    if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
    return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

double log_prior(const ItemParams& items, const IdealPoints& betas, const PriorConfig& pc,
                 const std::optional<HyperState>& hyper, std::span<const std::size_t> anchored) {
    pc.validate();
    const auto d = static_cast<Eigen::Index>(pc.dim());
    if (items.motions() > 0 && static_cast<Eigen::Index>(items.dim()) != d)
        throw ValidationError("item parameter dimension does not match the prior");
    if (betas.legislators() > 0 && static_cast<Eigen::Index>(betas.dim()) != d)
        throw ValidationError("ideal point dimension does not match the prior");

    double total = 0.0;
    Eigen::VectorXd theta(d + 1);
    for (std::size_t j = 0; j < items.motions(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        theta(0) = items.mu(jj);
        theta.tail(d) = items.alpha.row(jj).transpose();
        total += mvn_log_density(theta, pc.a0, pc.A0);
    }

    Eigen::VectorXd mean = pc.b;
    Eigen::MatrixXd cov = pc.B;
    if (pc.hierarchical()) {
        if (!hyper) throw ValidationError("hierarchical prior needs current hyperparameter values");
        mean = pc.kind == PriorKind::HierMeanVar ? hyper->mean : Eigen::VectorXd::Zero(d);
        cov = hyper->var * Eigen::MatrixXd::Identity(d, d);
        total += inverse_gamma_log_density(hyper->var, pc.ig_shape, pc.ig_scale);
        if (pc.kind == PriorKind::HierMeanVar) {
            for (Eigen::Index k = 0; k < d; ++k) total += normal_log_pdf(hyper->mean(k), pc.hyper_mean, pc.hyper_mean_var);
        }
    }
    for (std::size_t i = 0; i < betas.legislators(); ++i) {
        if (std::find(anchored.begin(), anchored.end(), i) != anchored.end()) continue;
        total += mvn_log_density(betas.beta.row(static_cast<Eigen::Index>(i)).transpose(), mean, cov);
    }
    return total;
}

} // namespace idealpoint
