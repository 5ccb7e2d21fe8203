#include "idealpoint/summarize.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace idealpoint;

namespace {

PosteriorDraws blank_draws(std::size_t S, std::size_t n, std::size_t m) {
    PosteriorDraws d;
    d.legislators = n;
    d.motions = m;
    d.dim = 1;
    d.resize(S, false);
    d.mu.setZero();
    d.alpha.setZero();
    d.beta.setZero();
    d.loglik.setZero();
    return d;
}

} // namespace

TEST_CASE("type-7 quantiles") {
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    CHECK(quantile_type7(v, 0.025) == doctest::Approx(3.475).epsilon(1e-14));
    CHECK(quantile_type7(v, 0.975) == doctest::Approx(97.525).epsilon(1e-14));
    CHECK(quantile_type7(v, 0.0) == 1.0);
    CHECK(quantile_type7(v, 1.0) == 100.0);
    CHECK_THROWS_AS(quantile_type7(std::vector<double>{}, 0.5), ValidationError);
}

TEST_CASE("posterior summaries") {
    SUBCASE("constant draws") {
        const std::vector<double> c(10, 0.7);
        const auto s = summarize_values("mu", 0, 0, c);
        CHECK(s.mean == doctest::Approx(0.7));
        CHECK(s.q025 == doctest::Approx(0.7));
        CHECK(s.q975 == doctest::Approx(0.7));
        CHECK(s.sd == doctest::Approx(0.0));
        CHECK(s.significant);
    }
    SUBCASE("significance is exactly zero outside the interval") {
        Rng rng(3);
        for (int rep = 0; rep < 200; ++rep) {
            std::vector<double> x(40);
            const double shift = 4.0 * rng.uniform() - 2.0;
            for (auto& v : x) v = shift + standard_normal(rng);
            const auto s = summarize_values("alpha", 0, 0, x);
            CHECK(s.q025 <= s.q975);
            CHECK(s.significant == !(s.q025 <= 0.0 && 0.0 <= s.q975));
        }
    }
    SUBCASE("anchored ideal points have zero-width intervals and are excluded from the count") {
        auto d = blank_draws(50, 3, 1);
        d.config.anchors = unit_anchors(0, 1);
        Rng rng(4);
        for (Eigen::Index s = 0; s < 50; ++s) {
            d.beta(s, 0) = -1.0;
            d.beta(s, 1) = 1.0;
            d.beta(s, 2) = 3.0 + 0.1 * standard_normal(rng);
        }
        const auto sums = posterior_summary(d);
        REQUIRE(sums.size() == 1 + 1 + 3);
        const auto& a0 = sums[2];
        CHECK(a0.kind == "beta");
        CHECK(a0.anchored);
        CHECK(a0.q025 == -1.0);
        CHECK(a0.q975 == -1.0);
        CHECK(significant_ideal_points(sums) == 1);
        CHECK_THROWS_AS(posterior_summary(blank_draws(1, 3, 1)), ValidationError);
    }
    SUBCASE("reflection flips means and swaps interval endpoints") {
        auto d = blank_draws(101, 2, 2);
        Rng rng(5);
        for (Eigen::Index s = 0; s < 101; ++s)
            for (Eigen::Index c = 0; c < 2; ++c) {
                d.beta(s, c) = 0.5 + std::exp(standard_normal(rng));
                d.alpha(s, c) = standard_normal(rng) - 0.3;
            }
        auto f = d;
        f.beta = -d.beta;
        f.alpha = -d.alpha;
        const auto a = posterior_summary(d), b = posterior_summary(f);
        for (std::size_t k = 2; k < a.size(); ++k) {
            CHECK(b[k].mean == doctest::Approx(-a[k].mean));
            CHECK(b[k].q025 == doctest::Approx(-a[k].q975));
            CHECK(b[k].q975 == doctest::Approx(-a[k].q025));
            CHECK(b[k].significant == a[k].significant);
        }
    }
}

TEST_CASE("pivot probabilities") {
    SUBCASE("all draws at zero") {
        const auto d = blank_draws(20, 2, 1);
        for (const auto& p : pivot_probabilities(d)) {
            CHECK(p.center == 1.0);
            CHECK(p.below_low == 0.0);
            CHECK(p.above_high == 0.0);
        }
    }
    SUBCASE("uniform(-2, 2) mass") {
        auto d = blank_draws(1000000, 1, 1);
        d.beta.resize(1000000, 1);
        Rng rng(6);
        for (Eigen::Index s = 0; s < d.beta.rows(); ++s) d.beta(s, 0) = -2.0 + 4.0 * rng.uniform();
        const auto p = pivot_probabilities(d).front();
        CHECK(std::fabs(p.below_low - 0.25) < 0.01);
        CHECK(std::fabs(p.above_high - 0.25) < 0.01);
        CHECK(std::fabs(p.center - 0.1) < 0.01);
        CHECK(p.below_low + p.center + p.above_high <= 1.0);
    }
    SUBCASE("format and ordering") {
        CHECK(format_pivot("Alexander López Maya", 0.9912) == "Alexander López Maya (99%)");
        CHECK(format_pivot("X", 0.975) == "X (98%)");
        const auto d = blank_draws(5, 2, 1);
        CHECK_THROWS_AS(pivot_probabilities(d, {0.5, 1.0, 0.2}), ValidationError);
        CHECK_THROWS_AS(pivot_probabilities(d, {-1.0, 1.0, -0.1}), ValidationError);
    }
}

TEST_CASE("discrimination significance") {
    auto d = blank_draws(40, 2, 3);
    CHECK(discrimination_significance(d).significant == 0);
    Rng rng(7);
    for (Eigen::Index s = 0; s < 40; ++s) {
        d.alpha(s, 0) = 2.0 + 0.1 * standard_normal(rng);
        d.alpha(s, 1) = standard_normal(rng);
        d.alpha(s, 2) = -3.0 + 0.1 * standard_normal(rng);
    }
    const auto r = discrimination_significance(d);
    CHECK(r.significant == 2);
    CHECK(r.flags == std::vector<bool>{true, false, true});
    CHECK(r.fraction == doctest::Approx(2.0 / 3.0));

    // duplicating the whole multiset of draws leaves the flags alone
    auto twice = blank_draws(80, 2, 3);
    twice.alpha.topRows(40) = d.alpha;
    twice.alpha.bottomRows(40) = d.alpha.colwise().reverse();
    CHECK(discrimination_significance(twice).flags == r.flags);
}

TEST_CASE("bloc summaries") {
    const std::vector<std::string> ids = {"a", "b", "c", "d", "e"};
    const std::vector<LegislatorMeta> meta = {
        {"a", "A", "P1", "coalition"}, {"b", "B", "P1", "coalition"}, {"c", "C", "P2", "opposition"},
        {"d", "D", "P2", "opposition"}, {"e", "E", "P3", "independent"},
    };
    const std::vector<double> means = {1.0, 3.0, -0.5, -0.5, 0.2};
    const auto blocs = bloc_summary(means, ids, meta, BlocKey::Bloc);
    REQUIRE(blocs.size() == 3);
    for (const auto& b : blocs) {
        if (b.group == "coalition") {
            CHECK(b.mean == doctest::Approx(2.0));
            REQUIRE(b.cv.has_value());
            CHECK(*b.cv == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
            CHECK(*b.cv == doctest::Approx(0.7071).epsilon(1e-4));
        } else if (b.group == "opposition") {
            REQUIRE(b.cv.has_value());
            CHECK(*b.cv == 0.0);
        } else {
            CHECK(b.members == 1);
            CHECK_FALSE(b.cv.has_value());
        }
    }
    CHECK(bloc_summary(means, ids, meta, BlocKey::Party).size() == 3);
    const std::vector<LegislatorMeta> partial(meta.begin(), meta.begin() + 3);
    CHECK_THROWS_AS(bloc_summary(means, ids, partial), ValidationError);
}

TEST_CASE("recovery metrics") {
    const std::vector<double> t = {-1.0, 0.5, 2.0, 3.0};
    auto r = recovery_metrics(t, t);
    CHECK(r.pearson_r == doctest::Approx(1.0));
    CHECK(r.slope == doctest::Approx(1.0));
    CHECK(std::fabs(r.intercept) < 1e-12);
    std::vector<double> twice;
    for (double v : t) twice.push_back(2.0 * v);
    r = recovery_metrics(twice, t);
    CHECK(r.pearson_r == doctest::Approx(1.0));
    CHECK(r.slope == doctest::Approx(2.0));

    Rng rng(8);
    std::vector<double> x(50), y(50);
    for (std::size_t k = 0; k < 50; ++k) {
        x[k] = standard_normal(rng);
        y[k] = 0.4 * x[k] + 0.2 + 0.5 * standard_normal(rng);
    }
    // textbook sums-of-products formulas
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t k = 0; k < 50; ++k) {
        sx += x[k];
        sy += y[k];
        sxx += x[k] * x[k];
        syy += y[k] * y[k];
        sxy += x[k] * y[k];
    }
    const double n = 50.0;
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double rr = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
    r = recovery_metrics(y, x);
    CHECK(std::fabs(r.slope - slope) < 1e-10);
    CHECK(std::fabs(r.pearson_r - rr) < 1e-10);
    CHECK(std::fabs(r.intercept - (sy - slope * sx) / n) < 1e-10);

    CHECK_THROWS_AS(recovery_metrics(std::vector<double>{1, 2, 3}, std::vector<double>{2, 2, 2}), ValidationError);
    CHECK_THROWS_AS(recovery_metrics(std::vector<double>{1, 2}, std::vector<double>{1, 2}), ValidationError);
}

TEST_CASE("summary table layout") {
    auto d = blank_draws(4, 2, 1);
    d.mu << 1.0, 2.0, 3.0, 4.0;
    const auto text = summary_table(posterior_summary(d), 1);
    CHECK(text.rfind("param_kind,index,mean,sd,q025,q975,significant\n", 0) == 0);
    CHECK(text.find("mu,0,2.5,") != std::string::npos);
}
