#include "idealpoint/diagnostics.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace idealpoint;

namespace {

double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<double> ar1(double rho, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n);
    x[0] = standard_normal(rng) / std::sqrt(1.0 - rho * rho);
    for (std::size_t t = 1; t < n; ++t) x[t] = rho * x[t - 1] + standard_normal(rng);
    return x;
}

// Two draws on a 1 x 2 parliament with two observed cells.
struct Toy {
    VoteMatrix vm = parse_vote_matrix("legislator_id,a,b\nx,1,0\ny,NA,NA\n");
    PosteriorDraws draws;
    Toy() {
        draws.legislators = 2;
        draws.motions = 2;
        draws.dim = 1;
        draws.resize(2, false);
        draws.mu << 0.2, -0.4, 0.6, 0.1;
        draws.alpha << 1.0, 0.5, -0.3, 1.5;
        draws.beta << 0.7, 0.0, -0.2, 0.0;
        draws.loglik.setZero();
    }
};

} // namespace

TEST_CASE("effective sample size calibration") {
    SUBCASE("iid") {
        const auto x = ar1(0.0, 10000, 1);
        const auto r = effective_sample_size(x);
        CHECK_FALSE(r.degenerate);
        CHECK(std::fabs(r.ess - 10000.0) <= 1000.0);
        CHECK(r.ess <= 10000.0);
    }
    SUBCASE("AR(1) rho = 0.5") {
        const auto x = ar1(0.5, 10000, 2);
        const double closed = 10000.0 * (1.0 - 0.5) / (1.0 + 0.5);
        CHECK(std::fabs(effective_sample_size(x).ess - closed) <= 0.15 * closed);
    }
    SUBCASE("constant chain") {
        const std::vector<double> c(50, 3.0);
        const auto r = effective_sample_size(c);
        CHECK(r.degenerate);
        CHECK(r.ess == 0.0);
    }
    SUBCASE("too short") {
        const std::vector<double> c = {1, 2, 3};
        CHECK_THROWS_AS(effective_sample_size(c), ValidationError);
    }
    SUBCASE("pooled chains beat a single chain") {
        std::vector<std::vector<double>> chains;
        for (std::uint64_t s = 0; s < 4; ++s) chains.push_back(ar1(0.0, 2000, 10 + s));
        const double single = effective_sample_size(chains.front()).ess;
        const double pooled = effective_sample_size(chains).ess;
        CHECK(pooled >= single);
        CHECK(pooled == doctest::Approx(8000.0).epsilon(0.15));
    }
}

TEST_CASE("split R-hat") {
    std::vector<std::vector<double>> same, shifted;
    for (std::uint64_t s = 0; s < 4; ++s) {
        same.push_back(ar1(0.3, 1000, 20 + s));
        auto x = ar1(0.3, 1000, 30 + s);
        for (auto& v : x) v += 3.0 * static_cast<double>(s);
        shifted.push_back(x);
    }
    CHECK(split_rhat(same) < 1.02);
    CHECK(split_rhat(shifted) > 1.5);
    CHECK(std::isnan(split_rhat({std::vector<double>(20, 1.0), std::vector<double>(20, 1.0)})));
}

TEST_CASE("DIC and WAIC match hand computation on a 2-draw, 2-cell toy") {
    Toy toy;
    // log p(cell | draw)
    double lp[2][2];
    for (int s = 0; s < 2; ++s) {
        const double b = toy.draws.beta(s, 0);
        lp[s][0] = std::log(expit(toy.draws.mu(s, 0) + toy.draws.alpha(s, 0) * b));
        lp[s][1] = std::log(1.0 - expit(toy.draws.mu(s, 1) + toy.draws.alpha(s, 1) * b));
    }
    const double mean_ll = 0.5 * ((lp[0][0] + lp[0][1]) + (lp[1][0] + lp[1][1]));
    const double mu0 = 0.5 * (0.2 + 0.6), mu1 = 0.5 * (-0.4 + 0.1);
    const double a0 = 0.5 * (1.0 - 0.3), a1 = 0.5 * (0.5 + 1.5), bb = 0.5 * (0.7 - 0.2);
    const double ll_bar = std::log(expit(mu0 + a0 * bb)) + std::log(1.0 - expit(mu1 + a1 * bb));
    const double pd = 2.0 * (ll_bar - mean_ll);
    const double dic_oracle = -2.0 * ll_bar + 2.0 * pd;

    double lppd = 0.0, pw = 0.0;
    for (int c = 0; c < 2; ++c) {
        lppd += std::log(0.5 * (std::exp(lp[0][c]) + std::exp(lp[1][c])));
        const double m = 0.5 * (lp[0][c] + lp[1][c]);
        pw += (lp[0][c] - m) * (lp[0][c] - m) + (lp[1][c] - m) * (lp[1][c] - m); // S - 1 = 1
    }
    const double waic_oracle = -2.0 * (lppd - pw);

    const auto ic = information_criteria(toy.draws, toy.vm, Link::Logit);
    CHECK(std::fabs(ic.dic - dic_oracle) < 1e-9);
    CHECK(std::fabs(ic.waic - waic_oracle) < 1e-9);
    CHECK(std::fabs(ic.effective_params_dic - pd) < 1e-9);
    CHECK(std::fabs(ic.effective_params_waic - pw) < 1e-9);
    CHECK(std::fabs(dic(toy.draws, toy.vm, Link::Logit) - dic_oracle) < 1e-9);
    CHECK(std::fabs(waic(toy.draws, toy.vm, Link::Logit) - waic_oracle) < 1e-9);
    CHECK(ic.lppd >= ic.mean_loglik);
}

TEST_CASE("identical draws have no effective parameters") {
    Toy toy;
    toy.draws.mu.row(1) = toy.draws.mu.row(0);
    toy.draws.alpha.row(1) = toy.draws.alpha.row(0);
    toy.draws.beta.row(1) = toy.draws.beta.row(0);
    const auto ic = information_criteria(toy.draws, toy.vm, Link::Probit);
    CHECK(std::fabs(ic.effective_params_dic) < 1e-12);
    CHECK(std::fabs(ic.effective_params_waic) < 1e-12);
    CHECK(ic.dic == doctest::Approx(-2.0 * ic.loglik_at_mean));
    CHECK(ic.waic == doctest::Approx(-2.0 * ic.lppd));
}

TEST_CASE("criteria are invariant to draw order and need two draws") {
    const auto vm = parse_vote_matrix("legislator_id,a,b,c\nx,1,0,1\ny,0,1,NA\nz,1,1,0\n");
    ChainConfig cfg;
    cfg.anchors = unit_anchors(0, 1);
    cfg.iterations = 120;
    cfg.burn_in = 20;
    cfg.seed = 9;
    const auto d = run_chain(vm, cfg);
    auto rev = d;
    rev.mu = d.mu.colwise().reverse();
    rev.alpha = d.alpha.colwise().reverse();
    rev.beta = d.beta.colwise().reverse();
    const auto a = information_criteria(d, vm, Link::Logit);
    const auto b = information_criteria(rev, vm, Link::Logit);
    CHECK(a.dic == doctest::Approx(b.dic).epsilon(1e-12));
    CHECK(a.waic == doctest::Approx(b.waic).epsilon(1e-12));
    CHECK(a.lppd >= a.mean_loglik);
    CHECK(information_criteria(d, vm, Link::Logit, 3).waic == a.waic);

    auto one = d;
    one.resize(1, false);
    CHECK_THROWS_AS(information_criteria(one, vm, Link::Logit), ValidationError);
}

TEST_CASE("PPC statistics by hand") {
    const auto vm = parse_vote_matrix("legislator_id,a,b,c\nx,1,0,1\ny,1,1,NA\nz,1,0,0\nw,NA,NA,NA\n");
    CHECK(ppc_statistic(PpcStatistic::OverallYeaRate, vm) == doctest::Approx(5.0 / 8.0));
    // motion rates 1, 1/3, 1/2
    const double mr[] = {1.0, 1.0 / 3.0, 0.5};
    const double mm = (mr[0] + mr[1] + mr[2]) / 3.0;
    double v = 0.0;
    for (double r : mr) v += (r - mm) * (r - mm) / 3.0;
    CHECK(ppc_statistic(PpcStatistic::MotionYeaRateSd, vm) == doctest::Approx(std::sqrt(v)));
    // legislator rates 2/3, 1, 1/3 (w has no votes)
    const double lr[] = {2.0 / 3.0, 1.0, 1.0 / 3.0};
    const double lm = (lr[0] + lr[1] + lr[2]) / 3.0;
    double lv = 0.0;
    for (double r : lr) lv += (r - lm) * (r - lm) / 3.0;
    CHECK(ppc_statistic(PpcStatistic::LegislatorYeaRateSd, vm) == doctest::Approx(std::sqrt(lv)));
    CHECK(ppc_statistic(PpcStatistic::MeanMotionAgreement, vm) == doctest::Approx((1.0 + 2.0 / 3.0 + 0.5) / 3.0));

    CHECK(parse_ppc_statistic("mean_motion_agreement") == PpcStatistic::MeanMotionAgreement);
    CHECK_THROWS_AS(parse_ppc_statistic("gini"), ValidationError);
}

TEST_CASE("posterior predictive checks") {
    const auto vm = parse_vote_matrix("legislator_id,a,b,c,d\nx,1,0,1,NA\ny,0,1,0,1\nz,1,1,NA,0\nw,0,NA,1,1\n");
    ChainConfig cfg;
    cfg.anchors = unit_anchors(0, 1);
    cfg.iterations = 220;
    cfg.burn_in = 20;
    cfg.seed = 77;
    const auto d = run_chain(vm, cfg);

    SUBCASE("replicates respect the missing mask") {
        Rng rng(1);
        const auto rep = replicate_votes(vm, d.items_at(0), d.betas_at(0), Link::Logit, rng);
        for (std::size_t k = 0; k < vm.cells().size(); ++k)
            CHECK(is_observed(rep.cells()[k]) == is_observed(vm.cells()[k]));
    }
    SUBCASE("p-values count replicates at or above the observed value") {
        const auto all = all_ppc_statistics();
        const auto res = posterior_predictive_checks(d, vm, Link::Logit, all, 5, 4);
        REQUIRE(res.size() == 4);
        for (const auto& r : res) {
            CHECK(r.replicated.size() == 50);
            const auto hits = std::count_if(r.replicated.begin(), r.replicated.end(),
                                            [&](double v) { return v >= r.observed; });
            CHECK(r.p_value == doctest::Approx(static_cast<double>(hits) / 50.0));
            CHECK(r.p_value >= 0.0);
            CHECK(r.p_value <= 1.0);
        }
        const auto again = posterior_predictive_checks(d, vm, Link::Logit, all, 5, 4);
        CHECK(again[2].replicated == res[2].replicated);
        CHECK_THROWS_AS(posterior_predictive_check(d, vm, Link::Logit, "nope", 1), ValidationError);
        CHECK_THROWS_AS(posterior_predictive_checks(d, vm, Link::Logit, all, 5, 0), ValidationError);
    }
    SUBCASE("all-Yea data under a model forced to p ~ 1 ties in every replicate") {
        const auto yes = parse_vote_matrix("legislator_id,a,b\nx,1,1\ny,1,1\n");
        PosteriorDraws forced;
        forced.legislators = 2;
        forced.motions = 2;
        forced.dim = 1;
        forced.resize(20, false);
        forced.mu.setConstant(40.0);
        forced.alpha.setZero();
        forced.beta.setZero();
        const auto r = posterior_predictive_check(forced, yes, Link::Logit, "overall_yea_rate", 3);
        CHECK(r.observed == 1.0);
        CHECK(r.p_value == 1.0);
    }
}
