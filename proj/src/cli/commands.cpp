#include "idealpoint/cli/commands.hpp"

#include "idealpoint/cli/manifest.hpp"
#include "idealpoint/diagnostics.hpp"
#include "idealpoint/draws_io.hpp"
#include "idealpoint/error.hpp"
#include "idealpoint/rollcall.hpp"
#include "idealpoint/sampler.hpp"
#include "idealpoint/simulate.hpp"
#include "idealpoint/summarize.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;

namespace idealpoint::cli {

namespace {

struct Context {
    std::ostream& out;
    std::ostream& err;
    CLI::App* sub = nullptr;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string s;
    for (std::size_t k = 0; k < parts.size(); ++k) s += (k ? sep : "") + parts[k];
    return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    return parts;
}

// Effective value of every option of the subcommand, for the manifest.
KeyValues option_snapshot(const CLI::App& sub) {
    KeyValues kv;
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_single_name();
        if (name.empty() || name == "help" || name == "config") continue;
        std::string value;
        if (opt->count() > 0)
            value = join(opt->results(), ",");
        else
            value = opt->get_default_str();
        if (!value.empty()) kv.emplace_back(name, value);
    }
    return kv;
}

void finish(Context& ctx, RunManifest m, const fs::path& dir) {
    for (const auto& o : m.outputs) {
        std::error_code ec;
        if (!fs::exists(o, ec) || fs::file_size(o, ec) == 0) throw IoError("output '" + o + "' was not written");
    }
    m.command = ctx.sub->get_name();
    m.config = option_snapshot(*ctx.sub);
    m.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.start).count();
    const auto path = dir / ("manifest_" + m.command + ".txt");
    write_manifest(path, m);
    ctx.out << "manifest: " << path.string() << "\n";
}

fs::path prepare_dir(const std::string& dir) {
    fs::path p = dir.empty() ? fs::path(".") : fs::path(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw IoError("cannot create output directory '" + p.string() + "': " + ec.message());
    return p;
}

void write_output(RunManifest& m, const fs::path& path, std::string_view bytes) {
    write_file_atomic(path, bytes);
    m.outputs.push_back(path.string());
}

VoteMatrix load_votes(const std::string& path, RunManifest& m, const std::string& label) {
    const std::string bytes = read_file(path);
    m.input_digests.emplace_back(label, sha256_hex(bytes));
    return parse_vote_matrix(bytes);
}

fs::path sidecar_path(const fs::path& draws_path) {
    fs::path p = draws_path;
    p.replace_extension(".meta");
    return p;
}

PosteriorDraws load_draws(const std::string& path, RunManifest& m) {
    const std::string table = read_file(path);
    const std::string meta = read_file(sidecar_path(path));
    m.input_digests.emplace_back("draws:" + path, sha256_hex(table));
    std::istringstream in(table);
    return read_draws(in, parse_key_values(meta));
}

// Stacks chains row-wise for pooled summaries.
PosteriorDraws pool(const std::vector<PosteriorDraws>& chains) {
    PosteriorDraws out = chains.front();
    std::size_t total = 0;
    for (const auto& c : chains) {
        if (c.legislators != out.legislators || c.motions != out.motions || c.dim != out.dim)
            throw ValidationError("draws files describe different models");
        total += c.draws();
    }
    const bool hier = out.hyper_var.size() > 0;
    out.resize(total, hier);
    Eigen::Index r = 0;
    for (const auto& c : chains) {
        const auto s = static_cast<Eigen::Index>(c.draws());
        out.mu.middleRows(r, s) = c.mu;
        out.alpha.middleRows(r, s) = c.alpha;
        out.beta.middleRows(r, s) = c.beta;
        out.loglik.segment(r, s) = c.loglik;
        if (hier) {
            if (c.hyper_var.size() != s) throw ValidationError("draws files mix prior kinds");
            out.hyper_mean.middleRows(r, s) = c.hyper_mean;
            out.hyper_var.segment(r, s) = c.hyper_var;
        }
        r += s;
    }
    return out;
}

std::vector<PosteriorDraws> load_all_draws(const std::vector<std::string>& paths, RunManifest& m) {
    if (paths.empty()) throw ValidationError("no draws files given");
    std::vector<PosteriorDraws> chains;
    for (const auto& p : paths) chains.push_back(load_draws(p, m));
    return chains;
}

// The votes a fit actually used live next to its draws.
std::string default_votes(const std::string& given, const std::vector<std::string>& draws) {
    if (!given.empty()) return given;
    return (fs::path(draws.front()).parent_path() / "votes_used.csv").string();
}

void check_dims(const PosteriorDraws& d, const VoteMatrix& vm) {
    if (d.legislators != vm.legislators() || d.motions != vm.motions())
        throw ValidationError("draws do not match the vote matrix dimensions");
}

AnchorSpec resolve_anchors(const std::vector<std::string>& specs, const VoteMatrix& vm, std::size_t dim) {
    AnchorSpec anchors;
    for (const auto& s : specs) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw ValidationError("anchor '" + s + "' is not id=value");
        const std::string id = s.substr(0, eq);
        const auto idx = vm.find_legislator(id);
        if (!idx) throw ValidationError("anchor id '" + id + "' is not in the votes file");
        const auto parts = split(s.substr(eq + 1), ':');
        if (parts.size() != dim)
            throw ValidationError("anchor '" + id + "' needs " + std::to_string(dim) + " coordinate(s)");
        Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
        for (std::size_t k = 0; k < dim; ++k) v(static_cast<Eigen::Index>(k)) = parse_double(parts[k]);
        anchors.push_back({*idx, v});
    }
    return anchors;
}

// ---------------------------------------------------------------- fit

struct FitOptions {
    std::string votes, meta, link = "logit", prior = "fixed", out_dir = ".";
    std::vector<std::string> anchors;
    std::size_t dim = 1, iters = 6000, burnin = 1000, thin = 1, chains = 1;
    int threads = 1;
    std::uint64_t seed = 0;
    double min_participation = 0.0;
    bool drop_unanimous = false;
};

void cmd_fit(Context& ctx, const FitOptions& o) {
    RunManifest m;
    VoteMatrix vm = load_votes(o.votes, m, "votes");
    if (o.min_participation > 0.0) {
        auto f = filter_low_participation(vm, o.min_participation);
        for (const auto& id : f.removed) ctx.err << "dropped low-participation legislator " << id << "\n";
        vm = std::move(f.matrix);
    }
    if (o.drop_unanimous) {
        const auto before = vm.motions();
        vm = drop_unanimous_motions(vm);
        if (vm.motions() != before) ctx.err << "dropped " << before - vm.motions() << " unanimous motion(s)\n";
    }
    if (!o.meta.empty()) {
        const std::string bytes = read_file(o.meta);
        m.input_digests.emplace_back("meta", sha256_hex(bytes));
        parse_legislator_meta(bytes, vm);
    }

    ChainConfig cfg;
    cfg.dim = o.dim;
    cfg.link = parse_link(o.link);
    cfg.priors = PriorConfig::defaults(o.dim, parse_prior_kind(o.prior));
    cfg.anchors = resolve_anchors(o.anchors, vm, o.dim);
    cfg.iterations = o.iters;
    cfg.burn_in = o.burnin;
    cfg.thin = o.thin;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    for (const auto& w : cfg.validate(vm.legislators())) ctx.err << "warning: " << w << "\n";
    if (o.chains < 1) throw ValidationError("--chains must be at least 1");

    std::vector<std::uint64_t> seeds;
    for (std::size_t k = 0; k < o.chains; ++k) seeds.push_back(o.seed + k);
    m.seeds = seeds;
    std::vector<PosteriorDraws> chains;
    if (o.chains == 1)
        chains.push_back(run_chain(vm, cfg));
    else
        chains = run_chains_parallel(vm, cfg, seeds);

    const fs::path dir = prepare_dir(o.out_dir);
    write_output(m, dir / "votes_used.csv", serialize_vote_matrix(vm));
    for (std::size_t k = 0; k < chains.size(); ++k) {
        const std::string stem = o.chains == 1 ? "draws" : "draws_chain" + std::to_string(k + 1);
        std::ostringstream table;
        write_draws(table, chains[k]);
        write_output(m, dir / (stem + ".csv"), table.str());
        write_output(m, dir / (stem + ".meta"), write_key_values(draws_sidecar(chains[k])));
    }
    const PosteriorDraws pooled = pool(chains);
    if (pooled.draws() >= 2)
        write_output(m, dir / "summary.csv", summary_table(posterior_summary(pooled), pooled.dim));
    else
        ctx.err << "warning: fewer than 2 retained draws, no summary written\n";
    ctx.out << "fit: " << vm.legislators() << " legislators, " << vm.motions() << " motions, " << chains.size()
            << " chain(s) x " << pooled.draws() / chains.size() << " draws\n";
    finish(ctx, std::move(m), dir);
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
    int scenario = 4;
    bool balanced = false;
    std::optional<std::uint64_t> seed;
    std::optional<double> missing;
    std::optional<double> item_variance;
    std::string out_dir = ".";
};

void cmd_simulate(Context& ctx, const SimulateOptions& o) {
    RunManifest m;
    ScenarioSpec spec = catalog_scenario(o.scenario);
    if (o.balanced) spec = with_parliament(spec, Parliament::Balanced);
    if (o.seed) spec.seed = *o.seed;
    if (o.missing) spec.missing_rate = *o.missing;
    if (o.item_variance) spec.item_variance = *o.item_variance;
    m.seeds = {spec.seed};
    const auto data = generate_parliament(spec);
    for (auto r : data.all_missing_rows)
        ctx.err << "warning: legislator " << data.votes.legislator_ids()[r] << " has no observed votes\n";

    const fs::path dir = prepare_dir(o.out_dir);
    write_output(m, dir / "votes.csv", serialize_vote_matrix(data.votes));
    write_output(m, dir / "truth.csv", truth_table(spec, data));
    write_output(m, dir / "item_truth.csv", item_truth_table(data));
    std::string meta = "id,name,party,bloc\n";
    for (std::size_t i = 0; i < data.votes.legislators(); ++i) {
        const auto& id = data.votes.legislator_ids()[i];
        const auto& g = spec.groups[data.group[i]].label;
        meta += id + "," + id + "," + g + "," + g + "\n";
    }
    write_output(m, dir / "meta.csv", meta);
    const auto anchors = choose_anchors(spec.anchors, data.betas);
    std::string anchor_arg;
    for (const auto& a : anchors)
        anchor_arg += (anchor_arg.empty() ? "" : ",") + data.votes.legislator_ids()[a.legislator] + "=" +
                      format_double(a.value(0));
    write_output(m, dir / "anchors.txt", anchor_arg + "\n");
    ctx.out << "scenario " << spec.id << " (" << spec.name << ", "
            << (spec.parliament == Parliament::Balanced ? "balanced" : "unbalanced") << "): " << spec.n << " x "
            << spec.m << ", missing fraction " << missing_rates(data.votes).overall << "\n";
    ctx.out << "suggested anchors: " << anchor_arg << "\n";
    finish(ctx, std::move(m), dir);
}

// ---------------------------------------------------------------- diagnose

struct DrawsOptions {
    std::vector<std::string> draws;
    std::string votes, out_dir;
    int threads = 1;
};

void cmd_diagnose(Context& ctx, const DrawsOptions& o) {
    RunManifest m;
    const auto chains = load_all_draws(o.draws, m);
    const PosteriorDraws pooled = pool(chains);
    const VoteMatrix vm = load_votes(default_votes(o.votes, o.draws), m, "votes");
    check_dims(pooled, vm);
    const Link link = pooled.config.link;
    const auto ic = information_criteria(pooled, vm, link, o.threads);

    std::size_t shortest = chains.front().draws();
    for (const auto& c : chains) shortest = std::min(shortest, c.draws());
    std::string table = "param_kind,index,dim,ess,degenerate,rhat\n";
    double min_ess = std::numeric_limits<double>::infinity();
    auto add = [&](const std::string& kind, std::size_t index, std::size_t dim, auto column_of) {
        std::vector<std::vector<double>> cols;
        for (const auto& c : chains) cols.push_back(column_of(c));
        std::string ess = "NA", degenerate = "NA", rhat = "NA";
        if (shortest >= 10) {
            const auto e = cols.size() == 1 ? effective_sample_size(cols.front()) : effective_sample_size(cols);
            ess = format_double(e.ess);
            degenerate = e.degenerate ? "1" : "0";
            if (!e.degenerate) min_ess = std::min(min_ess, e.ess);
        }
        if (cols.size() >= 2 && shortest >= 4) {
            const double r = split_rhat(cols);
            if (std::isfinite(r)) rhat = format_double(r);
        }
        table += kind + "," + std::to_string(index) + "," + std::to_string(dim) + "," + ess + "," + degenerate + "," +
                 rhat + "\n";
    };
    auto col = [](const Eigen::MatrixXd& mat, Eigen::Index c) {
        std::vector<double> v(static_cast<std::size_t>(mat.rows()));
        for (Eigen::Index s = 0; s < mat.rows(); ++s) v[static_cast<std::size_t>(s)] = mat(s, c);
        return v;
    };
    const auto d = static_cast<Eigen::Index>(pooled.dim);
    for (std::size_t j = 0; j < pooled.motions; ++j)
        add("mu", j, 0, [&](const PosteriorDraws& c) { return col(c.mu, static_cast<Eigen::Index>(j)); });
    for (std::size_t j = 0; j < pooled.motions; ++j)
        for (Eigen::Index k = 0; k < d; ++k)
            add("alpha", j, static_cast<std::size_t>(k),
                [&](const PosteriorDraws& c) { return col(c.alpha, static_cast<Eigen::Index>(j) * d + k); });
    for (std::size_t i = 0; i < pooled.legislators; ++i)
        for (Eigen::Index k = 0; k < d; ++k)
            add("beta", i, static_cast<std::size_t>(k),
                [&](const PosteriorDraws& c) { return col(c.beta, static_cast<Eigen::Index>(i) * d + k); });
    add("loglik", 0, 0, [](const PosteriorDraws& c) {
        return std::vector<double>(c.loglik.data(), c.loglik.data() + c.loglik.size());
    });
    if (pooled.hyper_var.size() > 0)
        add("hyper_var", 0, 0, [](const PosteriorDraws& c) {
            return std::vector<double>(c.hyper_var.data(), c.hyper_var.data() + c.hyper_var.size());
        });

    const KeyValues crit = {
        {"dic", format_double(ic.dic)},
        {"waic", format_double(ic.waic)},
        {"p_dic", format_double(ic.effective_params_dic)},
        {"p_waic", format_double(ic.effective_params_waic)},
        {"lppd", format_double(ic.lppd)},
        {"loglik_at_mean", format_double(ic.loglik_at_mean)},
        {"mean_loglik", format_double(ic.mean_loglik)},
        {"draws", std::to_string(pooled.draws())},
        {"chains", std::to_string(chains.size())},
    };
    const fs::path dir = prepare_dir(o.out_dir.empty() ? fs::path(o.draws.front()).parent_path().string() : o.out_dir);
    write_output(m, dir / "diagnostics.csv", table);
    write_output(m, dir / "criteria.txt", write_key_values(crit));
    ctx.out << "DIC " << ic.dic << " (pD " << ic.effective_params_dic << ")\n";
    ctx.out << "WAIC " << ic.waic << " (pW " << ic.effective_params_waic << ")\n";
    if (std::isfinite(min_ess)) ctx.out << "smallest ESS " << min_ess << "\n";
    finish(ctx, std::move(m), dir);
}

// ---------------------------------------------------------------- summarize

struct SummarizeOptions {
    DrawsOptions io;
    std::string meta, group_by = "bloc";
    double low = -1.0, high = 1.0, band = 0.2;
    std::size_t top = 5;
};

void cmd_summarize(Context& ctx, const SummarizeOptions& o) {
    RunManifest m;
    const PosteriorDraws pooled = pool(load_all_draws(o.io.draws, m));
    const VoteMatrix vm = load_votes(default_votes(o.io.votes, o.io.draws), m, "votes");
    check_dims(pooled, vm);
    std::vector<LegislatorMeta> meta;
    if (!o.meta.empty()) {
        const std::string bytes = read_file(o.meta);
        m.input_digests.emplace_back("meta", sha256_hex(bytes));
        meta = parse_legislator_meta(bytes, vm);
    }
    if (o.group_by != "bloc" && o.group_by != "party") throw ValidationError("--group-by must be party or bloc");

    const auto summaries = posterior_summary(pooled);
    const auto pivots = pivot_probabilities(pooled, {o.low, o.high, o.band});
    const auto disc = discrimination_significance(pooled);
    const auto& ids = vm.legislator_ids();
    auto display = [&](std::size_t i) {
        for (const auto& lm : meta)
            if (lm.id == ids[i] && !lm.name.empty()) return lm.name;
        return ids[i];
    };

    std::string pivot_csv = "legislator_id,p_below_low,p_above_high,p_center\n";
    for (std::size_t i = 0; i < pivots.size(); ++i)
        pivot_csv += ids[i] + "," + format_double(pivots[i].below_low) + "," + format_double(pivots[i].above_high) +
                     "," + format_double(pivots[i].center) + "\n";

    const fs::path dir = prepare_dir(o.io.out_dir.empty() ? fs::path(o.io.draws.front()).parent_path().string()
                                                          : o.io.out_dir);
    write_output(m, dir / "summary.csv", summary_table(summaries, pooled.dim));
    write_output(m, dir / "pivots.csv", pivot_csv);

    if (!meta.empty()) {
        const auto post = pooled.mean_betas();
        std::vector<double> means(vm.legislators());
        for (std::size_t i = 0; i < means.size(); ++i) means[i] = post.beta(static_cast<Eigen::Index>(i), 0);
        const auto blocs =
            bloc_summary(means, ids, meta, o.group_by == "party" ? BlocKey::Party : BlocKey::Bloc);
        std::string csv = "group,members,mean,cv\n";
        for (const auto& b : blocs)
            csv += b.group + "," + std::to_string(b.members) + "," + format_double(b.mean) + "," +
                   (b.cv ? format_double(*b.cv) : std::string("NA")) + "\n";
        write_output(m, dir / "blocs.csv", csv);
        for (const auto& b : blocs)
            ctx.out << "group " << b.group << ": " << b.members << " members, mean " << b.mean << ", cv "
                    << (b.cv ? std::to_string(*b.cv) : std::string("undefined")) << "\n";
    }

    auto top = [&](const char* label, auto prob) {
        std::vector<std::size_t> order(pivots.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return prob(pivots[a]) > prob(pivots[b]); });
        std::vector<std::string> names;
        for (std::size_t k = 0; k < std::min(o.top, order.size()); ++k)
            names.push_back(format_pivot(display(order[k]), prob(pivots[order[k]])));
        ctx.out << label << ": " << join(names, ", ") << "\n";
    };
    top("most likely below low", [](const PivotProbabilities& p) { return p.below_low; });
    top("most likely above high", [](const PivotProbabilities& p) { return p.above_high; });
    top("most likely central", [](const PivotProbabilities& p) { return p.center; });
    ctx.out << "significant discrimination: " << disc.significant << " of " << disc.flags.size() << "\n";
    ctx.out << "significant ideal points (non-anchored): " << significant_ideal_points(summaries) << "\n";
    finish(ctx, std::move(m), dir);
}

// ---------------------------------------------------------------- ppc

struct PpcOptions {
    DrawsOptions io;
    std::vector<std::string> stats;
    std::uint64_t seed = 0;
    std::size_t stride = 1;
};

void cmd_ppc(Context& ctx, const PpcOptions& o) {
    RunManifest m;
    const PosteriorDraws pooled = pool(load_all_draws(o.io.draws, m));
    const VoteMatrix vm = load_votes(default_votes(o.io.votes, o.io.draws), m, "votes");
    check_dims(pooled, vm);
    std::vector<PpcStatistic> stats;
    for (const auto& s : o.stats) stats.push_back(parse_ppc_statistic(s));
    if (stats.empty()) stats = all_ppc_statistics();
    m.seeds = {o.seed};
    const auto results = posterior_predictive_checks(pooled, vm, pooled.config.link, stats, o.seed, o.stride);

    std::string csv = "statistic,observed,replicated_mean,replicated_sd,p_value\n";
    for (const auto& r : results) {
        const double n = static_cast<double>(r.replicated.size());
        double mean = 0.0, ss = 0.0;
        for (double v : r.replicated) mean += v / n;
        for (double v : r.replicated) ss += (v - mean) * (v - mean);
        const double sd = n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        csv += r.statistic + "," + format_double(r.observed) + "," + format_double(mean) + "," + format_double(sd) +
               "," + format_double(r.p_value) + "\n";
        ctx.out << r.statistic << ": observed " << r.observed << ", p = " << r.p_value << "\n";
    }
    const fs::path dir = prepare_dir(o.io.out_dir.empty() ? fs::path(o.io.draws.front()).parent_path().string()
                                                          : o.io.out_dir);
    write_output(m, dir / "ppc.csv", csv);
    finish(ctx, std::move(m), dir);
}

// ---------------------------------------------------------------- scenarios

struct ScenariosOptions {
    std::vector<int> ids;
    bool balanced = false;
    std::size_t iters = 6000, burnin = 1000, thin = 1;
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> data_seed;
    int threads = 1;
    std::string out_dir = ".";
};

void cmd_scenarios(Context& ctx, const ScenariosOptions& o) {
    RunManifest m;
    std::vector<ScenarioSpec> specs;
    const auto catalog = scenario_catalog();
    for (const auto& s : catalog) {
        if (!o.ids.empty() && std::find(o.ids.begin(), o.ids.end(), s.id) == o.ids.end()) continue;
        specs.push_back(s);
        if (o.balanced && s.id <= 5) specs.push_back(with_parliament(s, Parliament::Balanced));
    }
    for (int id : o.ids) catalog_scenario(id); // rejects unknown ids
    if (specs.empty()) throw ValidationError("no scenarios selected");
    const FitSchedule schedule{o.iters, o.burnin, o.thin, o.seed, o.threads};
    m.seeds = {o.seed};

    std::string csv = "scenario,parliament,name,dic,waic,p_dic,p_waic,pearson_r,slope,mean_ci_width\n";
    for (auto spec : specs) {
        if (o.data_seed) spec.seed = *o.data_seed;
        const auto res = run_scenario(spec, schedule);
        const std::string parl = spec.parliament == Parliament::Balanced ? "balanced" : "unbalanced";
        csv += std::to_string(spec.id) + "," + parl + ",\"" + spec.name + "\"," + format_double(res.criteria.dic) +
               "," + format_double(res.criteria.waic) + "," + format_double(res.criteria.effective_params_dic) + "," +
               format_double(res.criteria.effective_params_waic) + "," + format_double(res.recovery.pearson_r) + "," +
               format_double(res.recovery.slope) + "," + format_double(res.mean_ci_width) + "\n";
        ctx.out << "scenario " << spec.id << " " << parl << ": DIC " << res.criteria.dic << ", WAIC "
                << res.criteria.waic << ", r " << res.recovery.pearson_r << "\n";
    }
    const fs::path dir = prepare_dir(o.out_dir);
    write_output(m, dir / "scenarios.csv", csv);
    finish(ctx, std::move(m), dir);
}

// Values from a --config file become command-line arguments placed before
// the user's own, for options the user did not give explicitly.
std::vector<std::string> expand_config(const CLI::App& app, std::vector<std::string> args) {
    if (args.empty()) return args;
    const CLI::App* sub = nullptr;
    try {
        sub = app.get_subcommand(args[0]);
    } catch (const CLI::OptionNotFound&) {
        return args;
    }
    std::string config_path;
    for (std::size_t k = 1; k < args.size(); ++k) {
        if (args[k] == "--config" && k + 1 < args.size()) config_path = args[k + 1];
        if (args[k].rfind("--config=", 0) == 0) config_path = args[k].substr(9);
    }
    if (config_path.empty()) return args;
    const KeyValues kv = parse_key_values(read_file(config_path));
    std::vector<std::string> extra;
    for (auto [key, value] : kv) {
        if (key.rfind("config.", 0) == 0) key = key.substr(7);
        std::replace(key.begin(), key.end(), '_', '-');
        if (key == "config" || key == "help") continue;
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt) continue;
        const bool given = std::any_of(args.begin() + 1, args.end(), [&](const std::string& a) {
            return a == "--" + key || a.rfind("--" + key + "=", 0) == 0;
        });
        if (given) continue;
        if (opt->get_expected_min() == 0) {
            if (value == "true" || value == "1" || value == "yes") extra.push_back("--" + key);
        } else {
            extra.push_back("--" + key);
            extra.push_back(value);
        }
    }
    args.insert(args.begin() + 1, extra.begin(), extra.end());
    return args;
}

void add_draws_options(CLI::App* sub, DrawsOptions& o) {
    sub->add_option("--draws", o.draws, "Draws file(s) written by fit; repeat or comma-separate for chains")
        ->delimiter(',')
        ->required();
    sub->add_option("--votes", o.votes, "Votes file (default: votes_used.csv next to the draws)");
    sub->add_option("--out-dir", o.out_dir, "Output directory (default: directory of the draws)");
    sub->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
}

} // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bayesian ideal-point estimation from roll-call votes", "idealpoint"};
    app.require_subcommand(1);
    Context ctx{out, err};
    std::function<void()> action;

    FitOptions fit;
    auto* s_fit = app.add_subcommand("fit", "Fit the ideal-point model by Gibbs sampling");
    s_fit->add_option("--votes", fit.votes, "Roll-call CSV (1, 0, NA)")->required();
    s_fit->add_option("--meta", fit.meta, "Legislator metadata CSV (id,name,party,bloc)");
    s_fit->add_option("--dim", fit.dim, "Ideal-point dimension")->check(CLI::PositiveNumber);
    s_fit->add_option("--link", fit.link, "probit or logit")->check(CLI::IsMember({"probit", "logit"}));
    s_fit->add_option("--anchors", fit.anchors, "Anchors id=value, comma-separated; ':' separates coordinates")
        ->delimiter(',');
    s_fit->add_option("--iters", fit.iters, "Total sweeps including burn-in");
    s_fit->add_option("--burnin", fit.burnin, "Burn-in sweeps");
    s_fit->add_option("--thin", fit.thin, "Keep every thin-th sweep after burn-in");
    s_fit->add_option("--chains", fit.chains, "Independent chains (seeds seed, seed+1, ...)");
    s_fit->add_option("--threads", fit.threads, "Worker threads per chain")->check(CLI::PositiveNumber);
    s_fit->add_option("--seed", fit.seed, "Base seed");
    s_fit->add_option("--prior", fit.prior, "fixed, hier-var or hier-meanvar")
        ->check(CLI::IsMember({"fixed", "hier-var", "hier-meanvar"}));
    s_fit->add_option("--out-dir", fit.out_dir, "Output directory");
    s_fit->add_option("--min-participation", fit.min_participation, "Drop legislators below this observed fraction");
    s_fit->add_flag("--drop-unanimous", fit.drop_unanimous, "Drop motions without both Yea and Nay votes");
    s_fit->callback([&] { action = [&] { cmd_fit(ctx, fit); }; });

    SimulateOptions sim;
    auto* s_sim = app.add_subcommand("simulate", "Generate a synthetic parliament from the scenario catalog");
    s_sim->add_option("--scenario", sim.scenario, "Scenario id (1-10)");
    s_sim->add_flag("--balanced", sim.balanced, "Use the balanced two-party chamber");
    s_sim->add_option("--seed", sim.seed, "Data seed (default: the catalog seed)");
    s_sim->add_option("--missing", sim.missing, "Override the missing-vote rate");
    s_sim->add_option("--item-variance", sim.item_variance, "Override the variance of mu and alpha");
    s_sim->add_option("--out-dir", sim.out_dir, "Output directory");
    s_sim->callback([&] { action = [&] { cmd_simulate(ctx, sim); }; });

    DrawsOptions diag;
    auto* s_diag = app.add_subcommand("diagnose", "Effective sample sizes, DIC and WAIC");
    add_draws_options(s_diag, diag);
    s_diag->callback([&] { action = [&] { cmd_diagnose(ctx, diag); }; });

    SummarizeOptions summ;
    auto* s_summ = app.add_subcommand("summarize", "Posterior summaries, pivot probabilities and bloc summaries");
    add_draws_options(s_summ, summ.io);
    s_summ->add_option("--meta", summ.meta, "Legislator metadata CSV");
    s_summ->add_option("--group-by", summ.group_by, "party or bloc")->check(CLI::IsMember({"party", "bloc"}));
    s_summ->add_option("--pivot-low", summ.low, "Lower pivot threshold");
    s_summ->add_option("--pivot-high", summ.high, "Upper pivot threshold");
    s_summ->add_option("--pivot-band", summ.band, "Half-width of the central band");
    s_summ->add_option("--top", summ.top, "Legislators listed per pivot category");
    s_summ->callback([&] { action = [&] { cmd_summarize(ctx, summ); }; });

    PpcOptions ppc;
    auto* s_ppc = app.add_subcommand("ppc", "Posterior predictive checks");
    add_draws_options(s_ppc, ppc.io);
    s_ppc->add_option("--stat", ppc.stats, "Statistic(s); default all")->delimiter(',');
    s_ppc->add_option("--seed", ppc.seed, "Replicate seed");
    s_ppc->add_option("--stride", ppc.stride, "Use every stride-th draw")->check(CLI::PositiveNumber);
    s_ppc->callback([&] { action = [&] { cmd_ppc(ctx, ppc); }; });

    ScenariosOptions scen;
    auto* s_scen = app.add_subcommand("scenarios", "Run the simulation catalog and compare DIC / WAIC");
    s_scen->add_option("--ids", scen.ids, "Scenario ids (default all)")->delimiter(',');
    s_scen->add_flag("--balanced", scen.balanced, "Also run scenarios 1-5 on the balanced chamber");
    s_scen->add_option("--iters", scen.iters, "Total sweeps per fit");
    s_scen->add_option("--burnin", scen.burnin, "Burn-in sweeps");
    s_scen->add_option("--thin", scen.thin, "Thinning");
    s_scen->add_option("--seed", scen.seed, "Chain seed");
    s_scen->add_option("--data-seed", scen.data_seed, "Override the catalog data seed");
    s_scen->add_option("--threads", scen.threads, "Worker threads per chain")->check(CLI::PositiveNumber);
    s_scen->add_option("--out-dir", scen.out_dir, "Output directory");
    s_scen->callback([&] { action = [&] { cmd_scenarios(ctx, scen); }; });

    for (auto* sub : {s_fit, s_sim, s_diag, s_summ, s_ppc, s_scen})
        sub->add_option("--config", "Key-value file of option defaults; flags override it");

    try {
        auto args = expand_config(app, raw_args);
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        ctx.sub = app.get_subcommands().front();
        action();
        return kOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kOk;
        }
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << "\n";
        return kIo;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return kValidation;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInternal;
    }
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

} // namespace idealpoint::cli
