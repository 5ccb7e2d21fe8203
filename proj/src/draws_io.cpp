#include "idealpoint/draws_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace idealpoint {

namespace {

std::string join_vector(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    std::string out;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (!out.empty()) out += ' ';
            out += format_double(m(r, c));
        }
    return out;
}

std::vector<double> split_numbers(std::string_view s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        while (pos < s.size() && s[pos] == ' ') ++pos;
        if (pos >= s.size()) break;
        auto end = s.find(' ', pos);
        if (end == std::string_view::npos) end = s.size();
        out.push_back(parse_double(s.substr(pos, end - pos)));
        pos = end;
    }
    return out;
}

const std::string& require(const KeyValues& kv, std::string_view key) {
    const auto* v = find_value(kv, key);
    if (!v) throw ValidationError("draws sidecar is missing key '" + std::string(key) + "'");
    return *v;
}

std::size_t parse_size(std::string_view s) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ValidationError("expected a non-negative integer, got '" + std::string(s) + "'");
    return v;
}

std::uint64_t parse_u64(std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ValidationError("expected an unsigned integer, got '" + std::string(s) + "'");
    return v;
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

double parse_double(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ValidationError("expected a number, got '" + std::string(s) + "'");
    return v;
}

std::string write_key_values(const KeyValues& kv) {
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

KeyValues parse_key_values(std::string_view text) {
    KeyValues kv;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("key-value line " + std::to_string(lineno) + " has no '='");
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t");
            auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return kv;
}

const std::string* find_value(const KeyValues& kv, std::string_view key) {
    for (auto it = kv.rbegin(); it != kv.rend(); ++it)
        if (it->first == key) return &it->second;
    return nullptr;
}

KeyValues draws_sidecar(const PosteriorDraws& draws) {
    const auto& c = draws.config;
    std::string anchors;
    for (const auto& a : c.anchors) {
        if (!anchors.empty()) anchors += ';';
        anchors += std::to_string(a.legislator) + ":" + join_vector(a.value.transpose());
    }
    return {
        {"format", "idealpoint-draws-1"},
        {"legislators", std::to_string(draws.legislators)},
        {"motions", std::to_string(draws.motions)},
        {"dim", std::to_string(draws.dim)},
        {"draws", std::to_string(draws.draws())},
        {"link", std::string(to_string(c.link))},
        {"prior", std::string(to_string(c.priors.kind))},
        {"a0", join_vector(c.priors.a0.transpose())},
        {"A0", join_vector(c.priors.A0)},
        {"b", join_vector(c.priors.b.transpose())},
        {"B", join_vector(c.priors.B)},
        {"hyper_mean", format_double(c.priors.hyper_mean)},
        {"hyper_mean_var", format_double(c.priors.hyper_mean_var)},
        {"ig_shape", format_double(c.priors.ig_shape)},
        {"ig_scale", format_double(c.priors.ig_scale)},
        {"anchors", anchors},
        {"iterations", std::to_string(c.iterations)},
        {"burn_in", std::to_string(c.burn_in)},
        {"thin", std::to_string(c.thin)},
        {"seed", std::to_string(c.seed)},
    };
}

ChainConfig config_from_sidecar(const KeyValues& kv) {
    ChainConfig c;
    c.dim = parse_size(require(kv, "dim"));
    const auto d = static_cast<Eigen::Index>(c.dim);
    c.link = parse_link(require(kv, "link"));
    c.priors = PriorConfig::defaults(c.dim, parse_prior_kind(require(kv, "prior")));
    auto fill = [](Eigen::Ref<Eigen::MatrixXd> target, const std::string& text, const char* key) {
        auto v = split_numbers(text);
        if (static_cast<Eigen::Index>(v.size()) != target.size())
            throw ValidationError(std::string("sidecar key '") + key + "' has the wrong number of values");
        for (Eigen::Index r = 0, k = 0; r < target.rows(); ++r)
            for (Eigen::Index col = 0; col < target.cols(); ++col) target(r, col) = v[static_cast<std::size_t>(k++)];
    };
    Eigen::MatrixXd a0(d + 1, 1), b(d, 1);
    fill(a0, require(kv, "a0"), "a0");
    fill(c.priors.A0, require(kv, "A0"), "A0");
    fill(b, require(kv, "b"), "b");
    fill(c.priors.B, require(kv, "B"), "B");
    c.priors.a0 = a0.col(0);
    c.priors.b = b.col(0);
    c.priors.hyper_mean = parse_double(require(kv, "hyper_mean"));
    c.priors.hyper_mean_var = parse_double(require(kv, "hyper_mean_var"));
    c.priors.ig_shape = parse_double(require(kv, "ig_shape"));
    c.priors.ig_scale = parse_double(require(kv, "ig_scale"));
    const std::string& anchors = require(kv, "anchors");
    std::size_t pos = 0;
    while (pos < anchors.size()) {
        auto end = anchors.find(';', pos);
        if (end == std::string::npos) end = anchors.size();
        std::string_view item(anchors.data() + pos, end - pos);
        auto colon = item.find(':');
        if (colon == std::string_view::npos) throw ValidationError("malformed anchor entry in sidecar");
        Anchor a;
        a.legislator = parse_size(item.substr(0, colon));
        auto vals = split_numbers(item.substr(colon + 1));
        a.value = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
        c.anchors.push_back(std::move(a));
        pos = end + 1;
    }
    c.iterations = parse_size(require(kv, "iterations"));
    c.burn_in = parse_size(require(kv, "burn_in"));
    c.thin = parse_size(require(kv, "thin"));
    c.seed = parse_u64(require(kv, "seed"));
    return c;
}

void write_draws(std::ostream& out, const PosteriorDraws& draws) {
    const auto d = static_cast<Eigen::Index>(draws.dim);
    std::string buf;
    buf.reserve(1 << 16);
    auto row = [&](std::size_t s, const char* kind, Eigen::Index index, Eigen::Index dim, double v) {
        buf += std::to_string(s);
        buf += ',';
        buf += kind;
        buf += ',';
        buf += std::to_string(index);
        buf += ',';
        buf += std::to_string(dim);
        buf += ',';
        buf += format_double(v);
        buf += '\n';
        if (buf.size() > (1 << 16) - 128) {
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    };
    buf += "draw,param_kind,index,dim,value\n";
    for (std::size_t s = 0; s < draws.draws(); ++s) {
        const auto r = static_cast<Eigen::Index>(s);
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(draws.motions); ++j) row(s, "mu", j, 0, draws.mu(r, j));
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(draws.motions); ++j)
            for (Eigen::Index k = 0; k < d; ++k) row(s, "alpha", j, k, draws.alpha(r, j * d + k));
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(draws.legislators); ++i)
            for (Eigen::Index k = 0; k < d; ++k) row(s, "beta", i, k, draws.beta(r, i * d + k));
        row(s, "loglik", 0, 0, draws.loglik(r));
        if (draws.hyper_var.size() > 0) {
            for (Eigen::Index k = 0; k < d; ++k) row(s, "hyper_mean", 0, k, draws.hyper_mean(r, k));
            row(s, "hyper_var", 0, 0, draws.hyper_var(r));
        }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("failed writing draws table");
}

PosteriorDraws read_draws(std::istream& table, const KeyValues& sidecar) {
    PosteriorDraws draws;
    draws.config = config_from_sidecar(sidecar);
    draws.legislators = parse_size(require(sidecar, "legislators"));
    draws.motions = parse_size(require(sidecar, "motions"));
    draws.dim = draws.config.dim;
    const std::size_t n_draws = parse_size(require(sidecar, "draws"));
    const bool hier = draws.config.priors.hierarchical();
    draws.resize(n_draws, hier);
    const auto d = static_cast<Eigen::Index>(draws.dim);
    const auto m = static_cast<Eigen::Index>(draws.motions);
    const auto n = static_cast<Eigen::Index>(draws.legislators);

    std::string line;
    if (!std::getline(table, line)) throw ValidationError("draws table is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "draw,param_kind,index,dim,value") throw ValidationError("draws table has an unexpected header");

    std::size_t expected = n_draws * static_cast<std::size_t>(m + m * d + n * d + 1 + (hier ? d + 1 : 0));
    std::size_t seen = 0;
    std::size_t lineno = 1;
    while (std::getline(table, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::string_view sv(line);
        std::string_view f[5];
        for (int k = 0; k < 4; ++k) {
            auto comma = sv.find(',');
            if (comma == std::string_view::npos)
                throw ValidationError("draws table line " + std::to_string(lineno) + " is malformed");
            f[k] = sv.substr(0, comma);
            sv.remove_prefix(comma + 1);
        }
        f[4] = sv;
        const std::size_t s = parse_size(f[0]);
        const auto idx = static_cast<Eigen::Index>(parse_size(f[2]));
        const auto k = static_cast<Eigen::Index>(parse_size(f[3]));
        const double v = parse_double(f[4]);
        if (s >= n_draws) throw ValidationError("draw number out of range on line " + std::to_string(lineno));
        const auto r = static_cast<Eigen::Index>(s);
        auto bad = [&] { return ValidationError("index out of range on draws line " + std::to_string(lineno)); };
        if (f[1] == "mu") {
            if (idx >= m || k != 0) throw bad();
            draws.mu(r, idx) = v;
        } else if (f[1] == "alpha") {
            if (idx >= m || k >= d) throw bad();
            draws.alpha(r, idx * d + k) = v;
        } else if (f[1] == "beta") {
            if (idx >= n || k >= d) throw bad();
            draws.beta(r, idx * d + k) = v;
        } else if (f[1] == "loglik") {
            draws.loglik(r) = v;
        } else if (f[1] == "hyper_mean" && hier) {
            if (k >= d) throw bad();
            draws.hyper_mean(r, k) = v;
        } else if (f[1] == "hyper_var" && hier) {
            draws.hyper_var(r) = v;
        } else {
            throw ValidationError("unknown parameter kind '" + std::string(f[1]) + "' in draws table");
        }
        ++seen;
    }
    if (seen != expected)
        throw ValidationError("draws table has " + std::to_string(seen) + " values, sidecar implies " +
                              std::to_string(expected));
    return draws;
}

} // namespace idealpoint
