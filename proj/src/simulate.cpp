#include "idealpoint/simulate.hpp"

#include "idealpoint/draws_io.hpp"
#include "idealpoint/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace idealpoint {

namespace {

// substream tags for generate_parliament
constexpr std::uint64_t kBetaStream = 11;
constexpr std::uint64_t kItemStream = 12;
constexpr std::uint64_t kVoteStream = 13;
constexpr std::uint64_t kMaskStream = 14;

std::string padded(char prefix, std::size_t k, std::size_t total) {
    const std::size_t width = std::to_string(total).size();
    std::string num = std::to_string(k);
    return std::string(1, prefix) + std::string(width - std::min(width, num.size()), '0') + num;
}

double group_center(const GroupSpec& g) { return 0.5 * (g.lo + g.hi); }

} // namespace

void ScenarioSpec::validate() const {
    if (n < 2) throw ValidationError("scenario needs at least 2 legislators");
    if (m < 1) throw ValidationError("scenario needs at least 1 motion");
    if (!(item_variance > 0.0)) throw ValidationError("item variance must be positive");
    if (!(beta_lo < beta_hi)) throw ValidationError("beta range must satisfy a < b");
    if (!(missing_rate >= 0.0 && missing_rate < 1.0)) throw ValidationError("missing rate must lie in [0, 1)");
    if (groups.empty()) throw ValidationError("scenario needs at least one group");
    double total = 0.0;
    for (const auto& g : groups) {
        if (!(g.proportion > 0.0 && g.proportion <= 1.0))
            throw ValidationError("group proportion must lie in (0, 1]");
        if (!(g.lo < g.hi)) throw ValidationError("group interval must satisfy lo < hi");
        if (g.lo < beta_lo - 1e-12 || g.hi > beta_hi + 1e-12)
            throw ValidationError("group interval '" + g.label + "' leaves the beta range");
        if (g.heterogeneous && g.placements.empty())
            throw ValidationError("heterogeneous group '" + g.label + "' has no placements");
        total += g.proportion;
    }
    if (std::fabs(total - 1.0) > 1e-9) throw ValidationError("group proportions must sum to 1");
}

std::vector<GroupSpec> balanced_groups() {
    return {
        {"G1", 0.5, -3.0, -0.5, false, {}, 0.0},
        {"G2", 0.5, 0.5, 3.0, false, {}, 0.0},
    };
}

std::vector<GroupSpec> unbalanced_groups() {
    GroupSpec g1{"G1", 0.75, 0.5, 4.0, false, {}, 0.0};
    GroupSpec g2{"G2", 0.15, -3.0, -1.0, false, {}, 0.0};
    GroupSpec g4{"G4", 0.08, -0.75, 0.25, false, {}, 0.0};
    // group 3 straddles the others: one member between G1 and G4, one between G2 and G4
    const double jitter = 0.1;
    const double p14 = 0.5 * (group_center(g1) + group_center(g4));
    const double p24 = 0.5 * (group_center(g2) + group_center(g4));
    GroupSpec g3{"G3", 0.02, std::min(p14, p24) - jitter, std::max(p14, p24) + jitter, true, {p14, p24}, jitter};
    return {g1, g2, g3, g4};
}

ScenarioSpec with_parliament(ScenarioSpec spec, Parliament parliament) {
    spec.parliament = parliament;
    if (parliament == Parliament::Balanced) {
        spec.groups = balanced_groups();
        spec.beta_lo = -3.0;
        spec.beta_hi = 3.0;
    } else {
        spec.groups = unbalanced_groups();
        spec.beta_lo = -3.0;
        spec.beta_hi = 4.0;
    }
    return spec;
}

std::vector<std::size_t> group_sizes(const std::vector<double>& proportions, std::size_t n) {
    if (proportions.empty()) throw ValidationError("no group proportions");
    double total = 0.0;
    for (double p : proportions) {
        if (!(p > 0.0 && p <= 1.0)) throw ValidationError("group proportion must lie in (0, 1]");
        total += p;
    }
    if (std::fabs(total - 1.0) > 1e-9) throw ValidationError("group proportions must sum to 1");

    std::vector<std::size_t> sizes(proportions.size());
    std::vector<double> remainder(proportions.size());
    std::size_t assigned = 0;
    for (std::size_t g = 0; g < proportions.size(); ++g) {
        const double quota = proportions[g] * static_cast<double>(n);
        sizes[g] = static_cast<std::size_t>(std::floor(quota + 1e-9));
        remainder[g] = quota - static_cast<double>(sizes[g]);
        assigned += sizes[g];
    }
    std::vector<std::size_t> order(proportions.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b] + 1e-12; });
    for (std::size_t k = 0; assigned < n; ++k, ++assigned) sizes[order[k % order.size()]] += 1;
    return sizes;
}

MaskResult apply_missingness(const VoteMatrix& vm, double rate, Rng& rng) {
    if (!(rate >= 0.0 && rate < 1.0)) throw ValidationError("missing rate must lie in [0, 1)");
    VoteMatrix out = vm;
    // one uniform per cell whether or not it is masked, so masks at a lower
    // rate are subsets of masks at a higher rate
    for (std::size_t i = 0; i < vm.legislators(); ++i)
        for (std::size_t j = 0; j < vm.motions(); ++j) {
            const double u = rng.uniform();
            if (is_observed(vm(i, j)) && u < rate) out.set(i, j, Vote::Missing);
        }
    MaskResult res{std::move(out), {}};
    for (std::size_t i = 0; i < vm.legislators(); ++i)
        if (res.matrix.observed_in_row(i) == 0) res.all_missing_rows.push_back(i);
    return res;
}

SyntheticParliament generate_parliament(const ScenarioSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n, m = spec.m;

    std::vector<double> props;
    for (const auto& g : spec.groups) props.push_back(g.proportion);
    const auto sizes = group_sizes(props, n);

    IdealPoints betas{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), 1)};
    std::vector<std::size_t> group(n);
    Rng beta_rng(mix_seed(spec.seed, kBetaStream));
    std::size_t i = 0;
    for (std::size_t g = 0; g < spec.groups.size(); ++g) {
        const auto& gs = spec.groups[g];
        for (std::size_t k = 0; k < sizes[g]; ++k, ++i) {
            double b;
            if (gs.heterogeneous) {
                const double u = beta_rng.uniform();
                b = gs.placements[k % gs.placements.size()] + gs.jitter * (2.0 * u - 1.0);
            } else {
                b = gs.lo + (gs.hi - gs.lo) * beta_rng.uniform();
            }
            betas.beta(static_cast<Eigen::Index>(i), 0) = b;
            group[i] = g;
        }
    }

    ItemParams items = ItemParams::zeros(m, 1);
    Rng item_rng(mix_seed(spec.seed, kItemStream));
    const double sd = std::sqrt(spec.item_variance);
    for (std::size_t j = 0; j < m; ++j) {
        items.mu(static_cast<Eigen::Index>(j)) = sd * standard_normal(item_rng);
        items.alpha(static_cast<Eigen::Index>(j), 0) = sd * standard_normal(item_rng);
    }

    std::vector<std::string> lids(n), mids(m);
    for (std::size_t r = 0; r < n; ++r) lids[r] = padded('L', r + 1, n);
    for (std::size_t j = 0; j < m; ++j) mids[j] = padded('V', j + 1, m);
    std::vector<Vote> cells(n * m);
    Rng vote_rng(mix_seed(spec.seed, kVoteStream));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < m; ++j) {
            const double eta = items.mu(static_cast<Eigen::Index>(j)) +
                               items.alpha(static_cast<Eigen::Index>(j), 0) * betas.beta(static_cast<Eigen::Index>(r), 0);
            cells[r * m + j] = vote_rng.uniform() < link_eval(spec.data_link, eta) ? Vote::Yea : Vote::Nay;
        }
    VoteMatrix full(std::move(lids), std::move(mids), std::move(cells));

    Rng mask_rng(mix_seed(spec.seed, kMaskStream));
    auto masked = apply_missingness(full, spec.missing_rate, mask_rng);
    return {std::move(items), std::move(betas), std::move(group), std::move(masked.matrix),
            std::move(masked.all_missing_rows)};
}

std::vector<ScenarioSpec> scenario_catalog() {
    const ScenarioSpec base = with_parliament(ScenarioSpec{}, Parliament::Unbalanced);
    std::vector<ScenarioSpec> out;
    const char* placement_names[] = {"opposite, close to center", "left and center", "center and right",
                                     "opposite, different distances", "extremists"};
    for (int k = 1; k <= 5; ++k) {
        ScenarioSpec s = base;
        s.id = k;
        s.anchors = static_cast<AnchorPlacement>(k);
        s.name = std::string("anchors: ") + placement_names[k - 1];
        out.push_back(s);
    }
    ScenarioSpec s6 = base;
    s6.id = 6;
    s6.name = "scenario 4 fitted with probit";
    s6.fit_link = Link::Probit;
    out.push_back(s6);
    ScenarioSpec s7 = base;
    s7.id = 7;
    s7.name = "scenario 4 with 10% missing";
    s7.missing_rate = 0.1;
    out.push_back(s7);
    ScenarioSpec s8 = base;
    s8.id = 8;
    s8.name = "scenario 4 with 60% missing";
    s8.missing_rate = 0.6;
    out.push_back(s8);
    ScenarioSpec s9 = base;
    s9.id = 9;
    s9.name = "scenario 4 with hierarchical variance";
    s9.prior = PriorKind::HierVar;
    out.push_back(s9);
    ScenarioSpec s10 = base;
    s10.id = 10;
    s10.name = "scenario 4 with hierarchical mean and variance";
    s10.prior = PriorKind::HierMeanVar;
    out.push_back(s10);
    return out;
}

ScenarioSpec catalog_scenario(int id) {
    for (auto& s : scenario_catalog())
        if (s.id == id) return s;
    throw ValidationError("unknown scenario " + std::to_string(id));
}

AnchorSpec choose_anchors(AnchorPlacement placement, const IdealPoints& truth) {
    const auto n = truth.legislators();
    if (n < 2) throw ValidationError("need at least 2 legislators to anchor");
    auto col = truth.beta.col(0);
    auto nearest = [&](double target, std::optional<std::size_t> skip) {
        std::size_t best = n;
        double best_d = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (skip && *skip == i) continue;
            const double d = std::fabs(col(static_cast<Eigen::Index>(i)) - target);
            if (best == n || d < best_d) {
                best = i;
                best_d = d;
            }
        }
        return best;
    };
    double t1 = 0.0, t2 = 0.0;
    switch (placement) {
    case AnchorPlacement::OppositeNearCenter: t1 = -0.3; t2 = 0.3; break;
    case AnchorPlacement::LeftCenter: t1 = -2.5; t2 = 0.0; break;
    case AnchorPlacement::CenterRight: t1 = 0.0; t2 = 2.5; break;
    case AnchorPlacement::OppositeDifferentDistances: t1 = -1.5; t2 = 3.0; break;
    case AnchorPlacement::Extremists: t1 = col.minCoeff(); t2 = col.maxCoeff(); break;
    }
    const std::size_t a = nearest(t1, std::nullopt);
    const std::size_t b = nearest(t2, a);
    return unit_anchors(a, b);
}

VoteMatrix append_unanimous_motions(const VoteMatrix& vm, std::size_t count, double missing_rate, Rng& rng) {
    if (!(missing_rate >= 0.0 && missing_rate < 1.0)) throw ValidationError("missing rate must lie in [0, 1)");
    const std::size_t n = vm.legislators(), m = vm.motions();
    std::vector<std::string> mids = vm.motion_ids();
    for (std::size_t k = 0; k < count; ++k) mids.push_back("U" + std::to_string(k + 1));
    std::vector<Vote> cells;
    cells.reserve(n * (m + count));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) cells.push_back(vm(i, j));
        for (std::size_t k = 0; k < count; ++k) {
            const Vote v = k % 2 == 0 ? Vote::Yea : Vote::Nay;
            cells.push_back(rng.uniform() < missing_rate ? Vote::Missing : v);
        }
    }
    return VoteMatrix(vm.legislator_ids(), std::move(mids), std::move(cells));
}

ChainConfig scenario_chain_config(const ScenarioSpec& spec, const AnchorSpec& anchors, const FitSchedule& schedule) {
    ChainConfig cfg;
    cfg.dim = 1;
    cfg.link = spec.fit_link;
    cfg.priors = PriorConfig::defaults(1, spec.prior);
    cfg.anchors = anchors;
    cfg.iterations = schedule.iterations;
    cfg.burn_in = schedule.burn_in;
    cfg.thin = schedule.thin;
    cfg.seed = schedule.seed;
    cfg.threads = schedule.threads;
    return cfg;
}

ScenarioResult fit_scenario(const ScenarioSpec& spec, SyntheticParliament data, const FitSchedule& schedule) {
    ScenarioResult res{spec, std::move(data), {}, {}, {}, {}, 0.0};
    res.anchors = choose_anchors(spec.anchors, res.data.betas);
    const auto cfg = scenario_chain_config(spec, res.anchors, schedule);
    res.draws = run_chain(res.data.votes, cfg);
    res.criteria = information_criteria(res.draws, res.data.votes, spec.fit_link, schedule.threads);

    const auto n = res.data.votes.legislators();
    std::vector<char> anchored(n, 0);
    for (const auto& a : res.anchors) anchored[a.legislator] = 1;
    const auto post = res.draws.mean_betas();
    std::vector<double> est, truth;
    double width = 0.0;
    std::vector<double> col(res.draws.draws());
    for (std::size_t i = 0; i < n; ++i) {
        if (anchored[i]) continue;
        est.push_back(post.beta(static_cast<Eigen::Index>(i), 0));
        truth.push_back(res.data.betas.beta(static_cast<Eigen::Index>(i), 0));
        for (std::size_t s = 0; s < col.size(); ++s)
            col[s] = res.draws.beta(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(i));
        width += quantile_type7(col, 0.975) - quantile_type7(col, 0.025);
    }
    res.recovery = recovery_metrics(est, truth);
    res.mean_ci_width = est.empty() ? 0.0 : width / static_cast<double>(est.size());
    return res;
}

ScenarioResult run_scenario(const ScenarioSpec& spec, const FitSchedule& schedule) {
    return fit_scenario(spec, generate_parliament(spec), schedule);
}

std::string truth_table(const ScenarioSpec& spec, const SyntheticParliament& data) {
    std::string out = "legislator_id,group,true_beta\n";
    const auto& ids = data.votes.legislator_ids();
    for (std::size_t i = 0; i < ids.size(); ++i)
        out += ids[i] + "," + spec.groups.at(data.group[i]).label + "," +
               format_double(data.betas.beta(static_cast<Eigen::Index>(i), 0)) + "\n";
    return out;
}

std::string item_truth_table(const SyntheticParliament& data) {
    std::string out = "motion_id,true_mu,true_alpha\n";
    const auto& ids = data.votes.motion_ids();
    for (std::size_t j = 0; j < ids.size(); ++j)
        out += ids[j] + "," + format_double(data.items.mu(static_cast<Eigen::Index>(j))) + "," +
               format_double(data.items.alpha(static_cast<Eigen::Index>(j), 0)) + "\n";
    return out;
}

} // namespace idealpoint
