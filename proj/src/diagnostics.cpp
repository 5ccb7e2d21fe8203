#include "idealpoint/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace idealpoint {

namespace {

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Biased (1/N) autocovariance at lag k.
double autocovariance(std::span<const double> x, double mean, std::size_t k) {
    const std::size_t n = x.size();
    double acc = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) acc += (x[t] - mean) * (x[t + k] - mean);
    return acc / static_cast<double>(n);
}

// Sums autocorrelations by Geyer's initial positive sequence; returns tau.
template <typename Rho>
double integrated_time(Rho rho, std::size_t max_lag) {
    double tau = -1.0;
    for (std::size_t m = 0; 2 * m + 1 < max_lag; ++m) {
        const double pair = rho(2 * m) + rho(2 * m + 1);
        if (!(pair > 0.0)) break;
        tau += 2.0 * pair;
    }
    return tau;
}

double sample_variance(std::span<const double> x) {
    const double m = mean_of(x);
    double acc = 0.0;
    for (double v : x) acc += (v - m) * (v - m);
    return acc / static_cast<double>(x.size() - 1);
}

} // namespace

EssResult effective_sample_size(std::span<const double> chain) {
    if (chain.size() < 10) throw ValidationError("effective sample size needs at least 10 draws");
    const double n = static_cast<double>(chain.size());
    const double mean = mean_of(chain);
    const double gamma0 = autocovariance(chain, mean, 0);
    if (!(gamma0 > 0.0)) return {0.0, true};
    const double tau =
        integrated_time([&](std::size_t k) { return autocovariance(chain, mean, k) / gamma0; }, chain.size());
    return {std::min(n, n / tau), false};
}

EssResult effective_sample_size(const std::vector<std::vector<double>>& chains) {
    if (chains.empty()) throw ValidationError("effective sample size needs at least one chain");
    std::size_t len = chains.front().size();
    for (const auto& c : chains) len = std::min(len, c.size());
    if (len < 10) throw ValidationError("effective sample size needs at least 10 draws per chain");
    if (chains.size() == 1) return effective_sample_size(std::span<const double>(chains.front().data(), len));

    const auto m = chains.size();
    std::vector<double> means(m), vars(m);
    for (std::size_t c = 0; c < m; ++c) {
        std::span<const double> x(chains[c].data(), len);
        means[c] = mean_of(x);
        vars[c] = sample_variance(x);
    }
    const double n = static_cast<double>(len);
    const double within = std::accumulate(vars.begin(), vars.end(), 0.0) / static_cast<double>(m);
    const double between_over_n = sample_variance(means);
    const double var_plus = (n - 1.0) / n * within + between_over_n;
    if (!(var_plus > 0.0)) return {0.0, true};

    auto rho = [&](std::size_t k) {
        double acov = 0.0;
        for (std::size_t c = 0; c < m; ++c)
            acov += autocovariance(std::span<const double>(chains[c].data(), len), means[c], k);
        acov /= static_cast<double>(m);
        // Biased within-chain autocovariances are rescaled to the S-1 variance at lag 0.
        return 1.0 - (within - acov * n / (n - 1.0)) / var_plus;
    };
    const double total = n * static_cast<double>(m);
    const double tau = integrated_time(rho, len);
    return {std::min(total, total / tau), false};
}

double split_rhat(const std::vector<std::vector<double>>& chains) {
    std::vector<std::span<const double>> halves;
    std::size_t len = std::numeric_limits<std::size_t>::max();
    for (const auto& c : chains) len = std::min(len, c.size());
    if (chains.empty() || len < 4) throw ValidationError("split R-hat needs at least 4 draws per chain");
    const std::size_t half = len / 2;
    for (const auto& c : chains) {
        halves.emplace_back(c.data(), half);
        halves.emplace_back(c.data() + half, half);
    }
    std::vector<double> means, vars;
    for (auto h : halves) {
        means.push_back(mean_of(h));
        vars.push_back(sample_variance(h));
    }
    const double n = static_cast<double>(half);
    const double within = mean_of(vars);
    const double var_plus = (n - 1.0) / n * within + sample_variance(means);
    if (!(within > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(var_plus / within);
}

InfoCriteria information_criteria(const PosteriorDraws& draws, const VoteMatrix& vm, Link link, int threads) {
    const std::size_t S = draws.draws();
    if (S < 2) throw ValidationError("information criteria need at least 2 draws");
    if (draws.legislators != vm.legislators() || draws.motions != vm.motions())
        throw ValidationError("draws do not match the vote matrix dimensions");
    const auto d = static_cast<Eigen::Index>(draws.dim);
    const auto n = static_cast<std::ptrdiff_t>(vm.legislators());
    const auto m = static_cast<Eigen::Index>(vm.motions());

    // Per-row accumulators, reduced in row order afterwards.
    Eigen::MatrixXd row_loglik = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(S), n);
    std::vector<double> row_lppd(static_cast<std::size_t>(n), 0.0), row_pw(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for num_threads(threads) schedule(static) if (threads > 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        std::vector<double> lp(S);
        for (Eigen::Index j = 0; j < m; ++j) {
            const Vote v = vm(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            if (!is_observed(v)) continue;
            double max_lp = -std::numeric_limits<double>::infinity();
            for (std::size_t s = 0; s < S; ++s) {
                const auto r = static_cast<Eigen::Index>(s);
                double eta = draws.mu(r, j);
                for (Eigen::Index k = 0; k < d; ++k) eta += draws.alpha(r, j * d + k) * draws.beta(r, i * d + k);
                lp[s] = cell_log_prob(link, eta, v == Vote::Yea);
                row_loglik(r, i) += lp[s];
                max_lp = std::max(max_lp, lp[s]);
            }
            double sum_exp = 0.0, mean = 0.0;
            for (double x : lp) {
                sum_exp += std::exp(x - max_lp);
                mean += x;
            }
            mean /= static_cast<double>(S);
            double var = 0.0;
            for (double x : lp) var += (x - mean) * (x - mean);
            var /= static_cast<double>(S - 1);
            row_lppd[static_cast<std::size_t>(i)] += max_lp + std::log(sum_exp / static_cast<double>(S));
            row_pw[static_cast<std::size_t>(i)] += var;
        }
    }

    InfoCriteria ic;
    double pw = 0.0;
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        ic.lppd += row_lppd[static_cast<std::size_t>(i)];
        pw += row_pw[static_cast<std::size_t>(i)];
    }
    double mean_ll = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
        double total = 0.0;
        for (std::ptrdiff_t i = 0; i < n; ++i) total += row_loglik(static_cast<Eigen::Index>(s), i);
        mean_ll += total;
    }
    ic.mean_loglik = mean_ll / static_cast<double>(S);
    ic.loglik_at_mean = log_likelihood(vm, draws.mean_items(), draws.mean_betas(), link);
    ic.effective_params_dic = 2.0 * (ic.loglik_at_mean - ic.mean_loglik);
    ic.dic = -2.0 * ic.loglik_at_mean + 2.0 * ic.effective_params_dic;
    ic.effective_params_waic = pw;
    ic.waic = -2.0 * (ic.lppd - pw);
    return ic;
}

double dic(const PosteriorDraws& draws, const VoteMatrix& vm, Link link) {
    return information_criteria(draws, vm, link).dic;
}

double waic(const PosteriorDraws& draws, const VoteMatrix& vm, Link link) {
    return information_criteria(draws, vm, link).waic;
}

std::string_view to_string(PpcStatistic s) noexcept {
    switch (s) {
    case PpcStatistic::OverallYeaRate: return "overall_yea_rate";
    case PpcStatistic::MotionYeaRateSd: return "motion_yea_rate_sd";
    case PpcStatistic::LegislatorYeaRateSd: return "legislator_yea_rate_sd";
    case PpcStatistic::MeanMotionAgreement: return "mean_motion_agreement";
    }
    return "";
}

PpcStatistic parse_ppc_statistic(std::string_view name) {
    for (auto s : all_ppc_statistics())
        if (to_string(s) == name) return s;
    throw ValidationError("unknown posterior predictive statistic '" + std::string(name) + "'");
}

std::vector<PpcStatistic> all_ppc_statistics() {
    return {PpcStatistic::OverallYeaRate, PpcStatistic::MotionYeaRateSd, PpcStatistic::LegislatorYeaRateSd,
            PpcStatistic::MeanMotionAgreement};
}

namespace {

double population_sd(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double acc = 0.0;
    for (double v : x) acc += (v - mean) * (v - mean);
    return std::sqrt(acc / static_cast<double>(x.size()));
}

std::vector<double> observed_rates(const VoteMatrix& vm) {
    std::vector<double> out;
    for (double r : motion_yea_rates(vm))
        if (!std::isnan(r)) out.push_back(r);
    return out;
}

} // namespace

double ppc_statistic(PpcStatistic s, const VoteMatrix& vm) {
    switch (s) {
    case PpcStatistic::OverallYeaRate: {
        std::size_t yea = 0, obs = 0;
        for (Vote v : vm.cells()) {
            if (!is_observed(v)) continue;
            ++obs;
            yea += v == Vote::Yea;
        }
        return obs ? static_cast<double>(yea) / static_cast<double>(obs) : 0.0;
    }
    case PpcStatistic::MotionYeaRateSd: return population_sd(observed_rates(vm));
    case PpcStatistic::LegislatorYeaRateSd: {
        std::vector<double> rates;
        for (std::size_t i = 0; i < vm.legislators(); ++i) {
            std::size_t yea = 0, obs = 0;
            for (std::size_t j = 0; j < vm.motions(); ++j) {
                Vote v = vm(i, j);
                if (!is_observed(v)) continue;
                ++obs;
                yea += v == Vote::Yea;
            }
            if (obs) rates.push_back(static_cast<double>(yea) / static_cast<double>(obs));
        }
        return population_sd(rates);
    }
    case PpcStatistic::MeanMotionAgreement: {
        auto rates = observed_rates(vm);
        if (rates.empty()) return 0.0;
        double acc = 0.0;
        for (double r : rates) acc += std::max(r, 1.0 - r);
        return acc / static_cast<double>(rates.size());
    }
    }
    return 0.0;
}

VoteMatrix replicate_votes(const VoteMatrix& vm, const ItemParams& items, const IdealPoints& betas, Link link,
                           Rng& rng) {
    VoteMatrix rep = vm;
    for (std::size_t i = 0; i < vm.legislators(); ++i) {
        const auto bi = betas.beta.row(static_cast<Eigen::Index>(i));
        for (std::size_t j = 0; j < vm.motions(); ++j) {
            if (!is_observed(vm(i, j))) continue;
            const auto jj = static_cast<Eigen::Index>(j);
            const double p = link_eval(link, items.mu(jj) + items.alpha.row(jj).dot(bi));
            rep.set(i, j, rng.uniform() < p ? Vote::Yea : Vote::Nay);
        }
    }
    return rep;
}

std::vector<PpcResult> posterior_predictive_checks(const PosteriorDraws& draws, const VoteMatrix& vm, Link link,
                                                   std::span<const PpcStatistic> statistics, std::uint64_t seed,
                                                   std::size_t stride) {
    if (stride < 1) throw ValidationError("predictive stride must be at least 1");
    if (draws.draws() == 0) throw ValidationError("posterior predictive check needs at least one draw");
    if (draws.legislators != vm.legislators() || draws.motions != vm.motions())
        throw ValidationError("draws do not match the vote matrix dimensions");
    std::vector<PpcResult> results;
    for (auto s : statistics) results.push_back({std::string(to_string(s)), ppc_statistic(s, vm), {}, 0.0});
    for (std::size_t s = 0; s < draws.draws(); s += stride) {
        Rng rng(mix_seed(seed, s));
        const VoteMatrix rep = replicate_votes(vm, draws.items_at(s), draws.betas_at(s), link, rng);
        for (std::size_t k = 0; k < statistics.size(); ++k)
            results[k].replicated.push_back(ppc_statistic(statistics[k], rep));
    }
    for (auto& r : results) {
        const auto hits = std::count_if(r.replicated.begin(), r.replicated.end(),
                                        [&](double v) { return v >= r.observed; });
        r.p_value = static_cast<double>(hits) / static_cast<double>(r.replicated.size());
    }
    return results;
}

PpcResult posterior_predictive_check(const PosteriorDraws& draws, const VoteMatrix& vm, Link link,
                                     std::string_view statistic, std::uint64_t seed, std::size_t stride) {
    const PpcStatistic s = parse_ppc_statistic(statistic);
    return posterior_predictive_checks(draws, vm, link, std::span<const PpcStatistic>(&s, 1), seed, stride).front();
}

} // namespace idealpoint
