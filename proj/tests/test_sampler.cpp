#include "idealpoint/draws_io.hpp"
#include "idealpoint/polya_gamma.hpp"
#include "idealpoint/sampler.hpp"
#include "idealpoint/truncated_normal.hpp"

#include <doctest.h>

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace idealpoint;

namespace {

double phi_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double phi_cdf(double x) { return boost::math::cdf(boost::math::normal(), x); }

struct Moments {
    double mean = 0.0, var = 0.0;
    std::size_t n = 0;
    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        var += d * (x - mean);
    }
    double variance() const { return var / static_cast<double>(n - 1); }
};

VoteMatrix toy_matrix() {
    return parse_vote_matrix("legislator_id,a,b,c,d\n"
                             "x,1,0,1,NA\n"
                             "y,0,1,0,1\n"
                             "z,1,1,NA,0\n"
                             "w,0,NA,1,1\n");
}

ChainConfig toy_config(Link link) {
    ChainConfig cfg;
    cfg.link = link;
    cfg.anchors = unit_anchors(0, 1);
    cfg.iterations = 60;
    cfg.burn_in = 10;
    cfg.thin = 2;
    cfg.seed = 12345;
    return cfg;
}

// Posterior of a single free ideal point by dense quadrature, with items and
// the other legislators fixed.
Moments quadrature_beta(const std::vector<double>& mu, const std::vector<double>& alpha,
                        const std::vector<int>& votes, Link link) {
    double z = 0.0, m1 = 0.0, m2 = 0.0;
    const double h = 1e-4;
    for (double b = -12.0; b <= 12.0; b += h) {
        double lp = -0.5 * b * b;
        for (std::size_t j = 0; j < mu.size(); ++j) {
            const double eta = mu[j] + alpha[j] * b;
            const double x = votes[j] == 1 ? eta : -eta;
            lp += link == Link::Probit ? std::log(phi_cdf(x)) : -std::log1p(std::exp(-x));
        }
        const double w = std::exp(lp);
        z += w;
        m1 += w * b;
        m2 += w * b * b;
    }
    Moments out;
    out.mean = m1 / z;
    out.var = m2 / z - out.mean * out.mean;
    out.n = 2;
    return out;
}

} // namespace

TEST_CASE("truncated normal draws") {
    Rng rng(1);
    Moments yea;
    for (int k = 0; k < 100000; ++k) {
        const double v = truncated_normal_at_zero(rng, 0.0, true);
        REQUIRE(v > 0.0);
        yea.add(v);
    }
    // E[Z | Z > 0] = phi(0) / (1 - Phi(0))
    CHECK(std::fabs(yea.mean - phi_pdf(0.0) / 0.5) < 0.01);
    CHECK(std::fabs(yea.mean - 0.7979) < 0.01);

    for (double a : {-2.0, 0.5, 3.0, 5.9, 6.5, 10.0, 25.0}) {
        Moments m;
        for (int k = 0; k < 20000; ++k) {
            const double z = standard_normal_above(rng, a);
            REQUIRE(z > a);
            m.add(z);
        }
        // E[Z | Z > a] is the inverse Mills ratio
        const boost::math::normal nd;
        const double exact = boost::math::pdf(nd, a) / boost::math::cdf(boost::math::complement(nd, a));
        const double sd = std::sqrt(1.0 + a * exact - exact * exact);
        CHECK(std::fabs(m.mean - exact) < 4.0 * sd / std::sqrt(20000.0));
    }

    for (double mean : {-40.0, -7.0, 0.0, 7.0, 40.0}) {
        for (int k = 0; k < 1000; ++k) {
            CHECK(truncated_normal_at_zero(rng, mean, true) > 0.0);
            CHECK(truncated_normal_at_zero(rng, mean, false) <= 0.0);
        }
    }
}

TEST_CASE("Polya-Gamma moments") {
    CHECK(polya_gamma_mean(0.0) == doctest::Approx(0.25));
    CHECK(polya_gamma_variance(0.0) == doctest::Approx(1.0 / 24.0));
    // continuity of the small-z branches
    CHECK(polya_gamma_mean(1e-6) == doctest::Approx(std::tanh(5e-7) / 2e-6).epsilon(1e-10));
    const double z = 1.2e-3;
    const double var_exact = (std::sinh(z) - z) / (4.0 * z * z * z * std::cosh(z / 2) * std::cosh(z / 2));
    CHECK(polya_gamma_variance(z) == doctest::Approx(var_exact).epsilon(1e-6));
    CHECK(std::isfinite(polya_gamma_variance(800.0)));

    Rng rng(2);
    for (double zz : {0.0, 0.3, 1.0, 2.5, 7.0, -4.0, 30.0}) {
        Moments m;
        const int N = 40000;
        for (int k = 0; k < N; ++k) {
            const double w = polya_gamma_draw(rng, zz);
            REQUIRE(w > 0.0);
            m.add(w);
        }
        const double mean = polya_gamma_mean(zz), var = polya_gamma_variance(zz);
        CHECK(std::fabs(m.mean - mean) < 4.0 * std::sqrt(var / N));
        CHECK(m.variance() == doctest::Approx(var).epsilon(0.06));
    }
}

TEST_CASE("schedule arithmetic and validation") {
    ChainConfig cfg;
    cfg.iterations = 424000;
    cfg.burn_in = 24000;
    cfg.thin = 5;
    CHECK(cfg.retained() == 80000);
    cfg.iterations = 6000;
    cfg.burn_in = 1000;
    cfg.thin = 1;
    CHECK(cfg.retained() == 5000);

    cfg.anchors = unit_anchors(0, 1);
    CHECK(cfg.validate(4).empty());
    cfg.burn_in = 6000;
    CHECK_THROWS_AS(cfg.validate(4), ValidationError);
    cfg.burn_in = 10;
    cfg.thin = 0;
    CHECK_THROWS_AS(cfg.validate(4), ValidationError);
    cfg.thin = 1;
    cfg.anchors = {Anchor{0, Eigen::VectorXd::Constant(1, -1.0)}};
    CHECK(cfg.validate(4).size() == 1); // under-identified warns
    cfg.anchors = unit_anchors(0, 9);
    CHECK_THROWS_AS(cfg.validate(4), ValidationError);
    cfg.anchors = unit_anchors(2, 2);
    CHECK_THROWS_AS(cfg.validate(4), ValidationError);
    cfg.anchors = {Anchor{0, Eigen::VectorXd::Constant(1, 1.0)}, Anchor{1, Eigen::VectorXd::Constant(1, 1.0)}};
    CHECK_THROWS_AS(cfg.validate(4), ValidationError);
}

TEST_CASE("init_state") {
    const auto vm = toy_matrix();
    auto cfg = toy_config(Link::Probit);
    const auto s1 = init_state(vm, cfg);
    CHECK(s1.betas.beta(0, 0) == -1.0);
    CHECK(s1.betas.beta(1, 0) == 1.0);
    CHECK(s1.betas.beta(2, 0) == 0.0);
    CHECK(s1.items.mu.isZero());
    CHECK(s1.items.alpha.isZero());
    const auto s2 = init_state(vm, cfg);
    CHECK(s1.latent.cwiseEqual(s2.latent).count() == vm.observed_count()); // NaNs never compare equal
    CHECK(std::isnan(s1.latent(0, 3)));
    cfg.anchors = unit_anchors(0, 7);
    CHECK_THROWS_AS(init_state(vm, cfg), ValidationError);
}

TEST_CASE("probit latent signs follow the votes") {
    const auto vm = toy_matrix();
    const auto cfg = toy_config(Link::Probit);
    GibbsSampler g(vm, cfg);
    for (int s = 0; s < 30; ++s) {
        g.sweep();
        const auto& lat = g.state().latent;
        for (std::size_t i = 0; i < vm.legislators(); ++i)
            for (std::size_t j = 0; j < vm.motions(); ++j) {
                const auto v = vm(i, j);
                const double y = lat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                if (v == Vote::Yea) CHECK(y > 0.0);
                if (v == Vote::Nay) CHECK(y <= 0.0);
                if (v == Vote::Missing) CHECK(std::isnan(y));
            }
    }
}

TEST_CASE("item update matches the hand-solved 2x2 normal equations") {
    // rows (1, -1) and (1, 1), y* = (-1, 1), A0 = 25 I: precision 2.04 I,
    // mean (0, 2 / 2.04)
    const auto vm = parse_vote_matrix("legislator_id,a,b\nx,0,NA\ny,1,NA\n");
    const ObservedIndex index(vm);
    const auto pc = PriorConfig::defaults(1);
    ChainState st;
    st.items = ItemParams::zeros(2, 1);
    st.betas.beta = Eigen::MatrixXd(2, 1);
    st.betas.beta << -1.0, 1.0;
    st.latent = Eigen::MatrixXd::Constant(2, 2, std::nan(""));
    st.latent(0, 0) = -1.0;
    st.latent(1, 0) = 1.0;

    const int N = 20000;
    Moments mu, al, mu_empty;
    double cov = 0.0;
    for (int k = 0; k < N; ++k) {
        update_item_params(st, index, Link::Probit, pc, SweepStreams{77, static_cast<std::uint64_t>(k)});
        mu.add(st.items.mu(0));
        al.add(st.items.alpha(0, 0));
        cov += st.items.mu(0) * st.items.alpha(0, 0);
        mu_empty.add(st.items.mu(1));
    }
    const double v = 1.0 / 2.04;
    CHECK(std::fabs(mu.mean - 0.0) < 3.0 * std::sqrt(v / N));
    CHECK(std::fabs(al.mean - 2.0 / 2.04) < 3.0 * std::sqrt(v / N));
    CHECK(std::fabs(mu.variance() - v) < 3.0 * v * std::sqrt(2.0 / N));
    CHECK(std::fabs(al.variance() - v) < 3.0 * v * std::sqrt(2.0 / N));
    CHECK(std::fabs(cov / N - mu.mean * al.mean) < 3.0 * v / std::sqrt(N));
    // no observed votes: prior N(0, 25)
    CHECK(std::fabs(mu_empty.mean) < 3.0 * std::sqrt(25.0 / N));
    CHECK(std::fabs(mu_empty.variance() - 25.0) < 3.0 * 25.0 * std::sqrt(2.0 / N));
}

TEST_CASE("ideal-point update: anchors fixed, unobserved legislators drawn from the prior") {
    const auto vm = parse_vote_matrix("legislator_id,a,b\nx,1,0\ny,0,1\nz,NA,NA\n");
    const ObservedIndex index(vm);
    const auto pc = PriorConfig::defaults(1);
    const auto anchors = unit_anchors(0, 1);
    ChainState st;
    st.items = ItemParams::zeros(2, 1);
    st.items.alpha << 1.0, -1.0;
    st.betas.beta = Eigen::MatrixXd::Zero(3, 1);
    st.betas.beta(0, 0) = -1.0;
    st.betas.beta(1, 0) = 1.0;
    st.latent = Eigen::MatrixXd::Constant(3, 2, std::nan(""));
    Moments free;
    const int N = 20000;
    for (int k = 0; k < N; ++k) {
        const SweepStreams ss{5, static_cast<std::uint64_t>(k)};
        sample_latent(st, index, Link::Probit, ss);
        update_ideal_points(st, index, Link::Probit, pc, anchors, ss);
        if (k < 1000) {
            REQUIRE(st.betas.beta(0, 0) == -1.0);
            REQUIRE(st.betas.beta(1, 0) == 1.0);
        }
        free.add(st.betas.beta(2, 0));
    }
    CHECK(std::fabs(free.mean) < 3.0 * std::sqrt(1.0 / N));
    CHECK(std::fabs(free.variance() - 1.0) < 3.0 * std::sqrt(2.0 / N));
}

TEST_CASE("single free legislator agrees with 1-d quadrature") {
    const std::vector<double> mu = {0.3, -0.5, 0.8, 0.0, -1.2, 0.6};
    const std::vector<double> alpha = {1.5, -0.7, 2.0, 1.0, 0.9, -1.8};
    const std::vector<int> votes = {1, 0, 1, 0, 1, 1};
    std::string text = "legislator_id,a,b,c,d,e,f\nanc1,NA,NA,NA,NA,NA,NA\nanc2,NA,NA,NA,NA,NA,NA\nfree";
    for (int v : votes) text += "," + std::to_string(v);
    const auto vm = parse_vote_matrix(text + "\n");
    const ObservedIndex index(vm);
    const auto anchors = unit_anchors(0, 1);

    for (Link link : {Link::Probit, Link::Logit}) {
        ChainState st;
        st.items = ItemParams::zeros(6, 1);
        for (int j = 0; j < 6; ++j) {
            st.items.mu(j) = mu[static_cast<std::size_t>(j)];
            st.items.alpha(j, 0) = alpha[static_cast<std::size_t>(j)];
        }
        st.betas.beta = Eigen::MatrixXd::Zero(3, 1);
        st.betas.beta(0, 0) = -1.0;
        st.betas.beta(1, 0) = 1.0;
        st.latent = Eigen::MatrixXd::Constant(3, 6, std::nan(""));
        Moments m;
        for (int k = 0; k < 60000; ++k) {
            const SweepStreams ss{11, static_cast<std::uint64_t>(k)};
            sample_latent(st, index, link, ss);
            update_ideal_points(st, index, link, PriorConfig::defaults(1), anchors, ss);
            if (k >= 500) m.add(st.betas.beta(2, 0));
        }
        const auto exact = quadrature_beta(mu, alpha, votes, link);
        CAPTURE(static_cast<int>(link));
        CHECK(m.mean == doctest::Approx(exact.mean).epsilon(0.02));
        CHECK(m.variance() == doctest::Approx(exact.var).epsilon(0.02));
    }
}

TEST_CASE("hierarchy updates") {
    auto pc = PriorConfig::defaults(1, PriorKind::HierVar);
    ChainState st;
    st.items = ItemParams::zeros(1, 1);
    st.betas.beta = Eigen::MatrixXd::Zero(6, 1); // all betas equal b = 0
    st.hyper = initial_hyper(pc);
    const AnchorSpec anchors = unit_anchors(0, 1);
    st.betas.beta(0, 0) = -1.0;
    st.betas.beta(1, 0) = 1.0;

    // InverseGamma(3 + 4/2, 2): mean 2 / 4 = 0.5, variance 0.25 / 3
    Moments s;
    const int N = 40000;
    for (int k = 0; k < N; ++k) {
        update_hierarchy(st, pc, anchors, SweepStreams{3, static_cast<std::uint64_t>(k)});
        s.add(st.hyper->var);
        REQUIRE(st.hyper->mean(0) == 0.0);
    }
    CHECK(std::fabs(s.mean - 0.5) < 4.0 * std::sqrt(0.25 / 3.0 / N));

    // every legislator anchored: the hyperprior InverseGamma(3, 2), mean 1
    AnchorSpec all = unit_anchors(0, 1);
    for (std::size_t i = 2; i < 6; ++i) all.push_back({i, Eigen::VectorXd::Constant(1, static_cast<double>(i))});
    Moments prior;
    for (int k = 0; k < N; ++k) {
        update_hierarchy(st, pc, all, SweepStreams{4, static_cast<std::uint64_t>(k)});
        prior.add(st.hyper->var);
    }
    CHECK(prior.mean == doctest::Approx(1.0).epsilon(0.05));

    CHECK_THROWS_AS(update_hierarchy(st, PriorConfig::defaults(1), anchors, SweepStreams{}), ValidationError);

    // mean-and-variance mode moves b
    auto pm = PriorConfig::defaults(1, PriorKind::HierMeanVar);
    st.betas.beta << -1.0, 1.0, 2.0, 2.0, 2.0, 2.0;
    update_hierarchy(st, pm, anchors, SweepStreams{5, 1});
    CHECK(st.hyper->mean(0) != 0.0);
}

TEST_CASE("hierarchical chains keep b at zero in variance-only mode") {
    const auto vm = toy_matrix();
    auto cfg = toy_config(Link::Logit);
    cfg.priors = PriorConfig::defaults(1, PriorKind::HierVar);
    const auto d = run_chain(vm, cfg);
    REQUIRE(d.hyper_mean.rows() == static_cast<Eigen::Index>(d.draws()));
    CHECK(d.hyper_mean.isZero());
    CHECK((d.hyper_var.array() > 0.0).all());
}

TEST_CASE("run_chain is deterministic, thread-invariant and respects anchors") {
    const auto vm = toy_matrix();
    for (Link link : {Link::Probit, Link::Logit}) {
        auto cfg = toy_config(link);
        const auto a = run_chain(vm, cfg);
        const auto b = run_chain(vm, cfg);
        CHECK(a.draws() == cfg.retained());
        CHECK(a.beta == b.beta);
        CHECK(a.mu == b.mu);
        CHECK(a.loglik == b.loglik);
        cfg.threads = 3;
        const auto c = run_chain(vm, cfg);
        CHECK(a.beta == c.beta);
        CHECK(a.alpha == c.alpha);
        CHECK(a.loglik == c.loglik);
        CHECK((a.beta.col(0).array() == -1.0).all());
        CHECK((a.beta.col(1).array() == 1.0).all());
    }
}

TEST_CASE("run_chains_parallel") {
    const auto vm = toy_matrix();
    const auto cfg = toy_config(Link::Logit);
    const std::uint64_t dup[] = {4, 4};
    CHECK_THROWS_AS(run_chains_parallel(vm, cfg, dup), ValidationError);
    const std::uint64_t seeds[] = {4, 5};
    const auto chains = run_chains_parallel(vm, cfg, seeds);
    REQUIRE(chains.size() == 2);
    CHECK(chains[0].beta != chains[1].beta);
    auto single = cfg;
    single.seed = 5;
    CHECK(run_chain(vm, single).beta == chains[1].beta);
}

TEST_CASE("draws round-trip through the text format") {
    const auto vm = toy_matrix();
    auto cfg = toy_config(Link::Probit);
    cfg.priors = PriorConfig::defaults(1, PriorKind::HierMeanVar);
    const auto d = run_chain(vm, cfg);
    std::ostringstream out;
    write_draws(out, d);
    const auto sidecar = draws_sidecar(d);
    std::istringstream in(out.str());
    const auto back = read_draws(in, parse_key_values(write_key_values(sidecar)));
    CHECK(back.mu == d.mu);
    CHECK(back.alpha == d.alpha);
    CHECK(back.beta == d.beta);
    CHECK(back.loglik == d.loglik);
    CHECK(back.hyper_var == d.hyper_var);
    CHECK(back.hyper_mean == d.hyper_mean);
    CHECK(back.config.seed == cfg.seed);
    CHECK(back.config.link == cfg.link);
    CHECK(back.config.priors.kind == PriorKind::HierMeanVar);
    REQUIRE(back.config.anchors.size() == 2);
    CHECK(back.config.anchors[1].value(0) == 1.0);

    std::istringstream truncated(out.str().substr(0, out.str().size() / 2));
    CHECK_THROWS(read_draws(truncated, sidecar));
    std::istringstream bad_header("draw,kind\n");
    CHECK_THROWS(read_draws(bad_header, sidecar));
}
