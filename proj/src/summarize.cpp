#include "idealpoint/summarize.hpp"

#include "idealpoint/draws_io.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace idealpoint {

double quantile_type7(std::span<const double> values, double p) {
    if (values.empty()) throw ValidationError("quantile of an empty sample");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

ParamSummary summarize_values(std::string kind, std::size_t index, std::size_t dim, std::span<const double> values) {
    if (values.size() < 2) throw ValidationError("posterior summaries need at least 2 draws");
    ParamSummary ps;
    ps.kind = std::move(kind);
    ps.index = index;
    ps.dim = dim;
    const double n = static_cast<double>(values.size());
    ps.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - ps.mean) * (v - ps.mean);
    ps.sd = std::sqrt(ss / (n - 1.0));
    ps.q025 = quantile_type7(values, 0.025);
    ps.q975 = quantile_type7(values, 0.975);
    ps.significant = !(ps.q025 <= 0.0 && 0.0 <= ps.q975);
    return ps;
}

std::vector<ParamSummary> posterior_summary(const PosteriorDraws& draws) {
    if (draws.draws() < 2) throw ValidationError("posterior summaries need at least 2 draws");
    std::vector<ParamSummary> out;
    std::vector<double> col(draws.draws());
    auto column = [&](const Eigen::MatrixXd& mat, Eigen::Index c) {
        for (std::size_t s = 0; s < draws.draws(); ++s) col[s] = mat(static_cast<Eigen::Index>(s), c);
        return std::span<const double>(col);
    };
    const auto d = static_cast<Eigen::Index>(draws.dim);
    for (std::size_t j = 0; j < draws.motions; ++j)
        out.push_back(summarize_values("mu", j, 0, column(draws.mu, static_cast<Eigen::Index>(j))));
    for (std::size_t j = 0; j < draws.motions; ++j)
        for (Eigen::Index k = 0; k < d; ++k)
            out.push_back(summarize_values("alpha", j, static_cast<std::size_t>(k),
                                           column(draws.alpha, static_cast<Eigen::Index>(j) * d + k)));
    std::vector<char> anchored(draws.legislators, 0);
    for (const auto& a : draws.config.anchors)
        if (a.legislator < draws.legislators) anchored[a.legislator] = 1;
    for (std::size_t i = 0; i < draws.legislators; ++i)
        for (Eigen::Index k = 0; k < d; ++k) {
            auto ps = summarize_values("beta", i, static_cast<std::size_t>(k),
                                       column(draws.beta, static_cast<Eigen::Index>(i) * d + k));
            ps.anchored = anchored[i] != 0;
            out.push_back(std::move(ps));
        }
    return out;
}

std::size_t significant_ideal_points(const std::vector<ParamSummary>& summaries) {
    return static_cast<std::size_t>(std::count_if(summaries.begin(), summaries.end(), [](const ParamSummary& p) {
        return p.kind == "beta" && !p.anchored && p.significant;
    }));
}

std::vector<PivotProbabilities> pivot_probabilities(const PosteriorDraws& draws, const PivotThresholds& t,
                                                    std::size_t dim) {
    if (!(t.band >= 0.0 && t.low <= -t.band && t.band < t.high && -t.band < t.band) && !(t.band == 0.0 && t.low < t.high))
        throw ValidationError("pivot thresholds must satisfy low <= -band < band <= high");
    if (t.band > 0.0 && t.high < t.band) throw ValidationError("pivot thresholds must satisfy band <= high");
    if (dim >= draws.dim) throw ValidationError("pivot dimension out of range");
    std::vector<PivotProbabilities> out(draws.legislators);
    const auto d = static_cast<Eigen::Index>(draws.dim);
    const double S = static_cast<double>(draws.draws());
    for (std::size_t i = 0; i < draws.legislators; ++i) {
        const auto c = static_cast<Eigen::Index>(i) * d + static_cast<Eigen::Index>(dim);
        double lo = 0, hi = 0, mid = 0;
        for (Eigen::Index s = 0; s < draws.beta.rows(); ++s) {
            const double b = draws.beta(s, c);
            if (b < t.low) lo += 1;
            if (b > t.high) hi += 1;
            if (b > -t.band && b < t.band) mid += 1;
        }
        out[i] = {lo / S, hi / S, mid / S};
    }
    return out;
}

std::string format_pivot(const std::string& name, double probability) {
    return name + " (" + std::to_string(static_cast<int>(std::lround(probability * 100.0))) + "%)";
}

DiscriminationReport discrimination_significance(const PosteriorDraws& draws, std::size_t dim) {
    if (draws.draws() < 2) throw ValidationError("significance needs at least 2 draws");
    if (dim >= draws.dim) throw ValidationError("discrimination dimension out of range");
    DiscriminationReport rep;
    const auto d = static_cast<Eigen::Index>(draws.dim);
    std::vector<double> col(draws.draws());
    for (std::size_t j = 0; j < draws.motions; ++j) {
        const auto c = static_cast<Eigen::Index>(j) * d + static_cast<Eigen::Index>(dim);
        for (std::size_t s = 0; s < draws.draws(); ++s) col[s] = draws.alpha(static_cast<Eigen::Index>(s), c);
        const double lo = quantile_type7(col, 0.025), hi = quantile_type7(col, 0.975);
        const bool sig = !(lo <= 0.0 && 0.0 <= hi);
        rep.flags.push_back(sig);
        rep.significant += sig;
    }
    rep.fraction = draws.motions ? static_cast<double>(rep.significant) / static_cast<double>(draws.motions) : 0.0;
    return rep;
}

std::vector<BlocSummary> bloc_summary(std::span<const double> posterior_means,
                                      const std::vector<std::string>& legislator_ids,
                                      const std::vector<LegislatorMeta>& meta, BlocKey key) {
    if (posterior_means.size() != legislator_ids.size())
        throw ValidationError("posterior means and legislator ids differ in length");
    std::map<std::string, std::vector<double>> groups;
    for (std::size_t i = 0; i < legislator_ids.size(); ++i) {
        auto it = std::find_if(meta.begin(), meta.end(), [&](const LegislatorMeta& lm) { return lm.id == legislator_ids[i]; });
        if (it == meta.end()) throw ValidationError("no metadata for legislator '" + legislator_ids[i] + "'");
        groups[key == BlocKey::Party ? it->party : it->bloc].push_back(posterior_means[i]);
    }
    std::vector<BlocSummary> out;
    for (const auto& [name, values] : groups) {
        BlocSummary bs;
        bs.group = name;
        bs.members = values.size();
        const double n = static_cast<double>(values.size());
        bs.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
        if (values.size() >= 2 && bs.mean != 0.0) {
            double ss = 0.0;
            for (double v : values) ss += (v - bs.mean) * (v - bs.mean);
            bs.cv = std::sqrt(ss / (n - 1.0)) / std::fabs(bs.mean);
        }
        out.push_back(std::move(bs));
    }
    return out;
}

RecoveryMetrics recovery_metrics(std::span<const double> estimates, std::span<const double> truth) {
    if (estimates.size() != truth.size()) throw ValidationError("estimates and truth differ in length");
    if (truth.size() < 3) throw ValidationError("recovery metrics need at least 3 points");
    const double n = static_cast<double>(truth.size());
    const double mx = std::accumulate(truth.begin(), truth.end(), 0.0) / n;
    const double my = std::accumulate(estimates.begin(), estimates.end(), 0.0) / n;
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        const double dx = truth[k] - mx, dy = estimates[k] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (!(sxx > 0.0)) throw ValidationError("true values have zero variance");
    RecoveryMetrics r;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    r.pearson_r = syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
    return r;
}

std::string summary_table(const std::vector<ParamSummary>& summaries, std::size_t dim) {
    std::string out = "param_kind,index,mean,sd,q025,q975,significant\n";
    for (const auto& p : summaries) {
        std::string kind = p.kind;
        if (dim > 1 && p.kind != "mu") kind += "." + std::to_string(p.dim);
        out += kind + "," + std::to_string(p.index) + "," + format_double(p.mean) + "," + format_double(p.sd) + "," +
               format_double(p.q025) + "," + format_double(p.q975) + "," + (p.significant ? "1" : "0") + "\n";
    }
    return out;
}

} // namespace idealpoint
