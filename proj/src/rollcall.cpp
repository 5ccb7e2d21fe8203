#include "idealpoint/rollcall.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace idealpoint {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

// Comma split with minimal double-quote support (for names in metadata).
std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        char c = line[k];
        if (quoted) {
            if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
                cur.push_back('"');
                ++k;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

void require_unique(const std::vector<std::string>& ids, const char* what) {
    std::unordered_set<std::string> seen;
    for (const auto& id : ids) {
        if (!seen.insert(id).second)
            throw ParseError(ParseErrorCode::DuplicateId, std::string("duplicate ") + what + " id '" + id + "'");
    }
}

} // namespace

VoteMatrix::VoteMatrix(std::vector<std::string> legislator_ids, std::vector<std::string> motion_ids,
                       std::vector<Vote> cells)
    : legislator_ids_(std::move(legislator_ids)), motion_ids_(std::move(motion_ids)), cells_(std::move(cells)) {
    if (legislator_ids_.size() < 2) throw ValidationError("vote matrix needs at least 2 legislators");
    if (motion_ids_.empty()) throw ValidationError("vote matrix needs at least 1 motion");
    if (cells_.size() != legislator_ids_.size() * motion_ids_.size())
        throw ValidationError("vote matrix cell count does not match n*m");
    require_unique(legislator_ids_, "legislator");
    require_unique(motion_ids_, "motion");
}

std::size_t VoteMatrix::observed_count() const {
    return static_cast<std::size_t>(std::count_if(cells_.begin(), cells_.end(), is_observed));
}

std::size_t VoteMatrix::observed_in_row(std::size_t i) const {
    auto row = cells_.begin() + static_cast<std::ptrdiff_t>(i * motions());
    return static_cast<std::size_t>(std::count_if(row, row + static_cast<std::ptrdiff_t>(motions()), is_observed));
}

std::optional<std::size_t> VoteMatrix::find_legislator(std::string_view id) const {
    auto it = std::find(legislator_ids_.begin(), legislator_ids_.end(), id);
    if (it == legislator_ids_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - legislator_ids_.begin());
}

VoteMatrix parse_vote_matrix(std::string_view text) {
    auto lines = split_lines(text);
    if (lines.empty()) throw ParseError(ParseErrorCode::EmptyMatrix, "votes table is empty");

    auto header = split_fields(lines.front());
    if (header.size() < 2) throw ParseError(ParseErrorCode::EmptyMatrix, "votes header lists no motions");
    std::vector<std::string> motion_ids(header.begin() + 1, header.end());
    const std::size_t m = motion_ids.size();

    std::vector<std::string> legislator_ids;
    std::vector<Vote> cells;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        auto fields = split_fields(lines[r]);
        if (fields.size() != m + 1)
            throw ParseError(ParseErrorCode::RaggedRow, "row " + std::to_string(r + 1) + " has " +
                                                            std::to_string(fields.size()) + " fields, expected " +
                                                            std::to_string(m + 1));
        legislator_ids.push_back(fields[0]);
        for (std::size_t j = 1; j <= m; ++j) {
            const auto& tok = fields[j];
            if (tok == "1") {
                cells.push_back(Vote::Yea);
            } else if (tok == "0") {
                cells.push_back(Vote::Nay);
            } else if (tok == "NA") {
                cells.push_back(Vote::Missing);
            } else {
                throw ParseError(ParseErrorCode::UnknownToken,
                                 "unknown vote token '" + tok + "' on row " + std::to_string(r + 1));
            }
        }
    }
    if (legislator_ids.empty()) throw ParseError(ParseErrorCode::EmptyMatrix, "votes table has no legislator rows");
    require_unique(legislator_ids, "legislator");
    require_unique(motion_ids, "motion");

    VoteMatrix vm(std::move(legislator_ids), std::move(motion_ids), std::move(cells));
    if (vm.observed_count() == 0) throw ParseError(ParseErrorCode::EmptyMatrix, "votes table has no observed votes");
    return vm;
}

std::string serialize_vote_matrix(const VoteMatrix& vm) {
    std::string out = "legislator_id";
    for (const auto& id : vm.motion_ids()) {
        out += ',';
        out += id;
    }
    out += '\n';
    for (std::size_t i = 0; i < vm.legislators(); ++i) {
        out += vm.legislator_ids()[i];
        for (std::size_t j = 0; j < vm.motions(); ++j) {
            switch (vm(i, j)) {
            case Vote::Yea: out += ",1"; break;
            case Vote::Nay: out += ",0"; break;
            case Vote::Missing: out += ",NA"; break;
            }
        }
        out += '\n';
    }
    return out;
}

std::vector<LegislatorMeta> parse_legislator_meta(std::string_view text, const VoteMatrix& vm) {
    auto lines = split_lines(text);
    if (lines.empty()) throw ParseError(ParseErrorCode::MissingHeader, "metadata table is empty");
    auto header = split_fields(lines.front());
    if (header != std::vector<std::string>{"id", "name", "party", "bloc"})
        throw ParseError(ParseErrorCode::MissingHeader, "metadata header must be id,name,party,bloc");

    std::vector<LegislatorMeta> meta;
    std::vector<std::string> ids;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        auto f = split_fields(lines[r]);
        if (f.size() != 4)
            throw ParseError(ParseErrorCode::RaggedRow, "metadata row " + std::to_string(r + 1) + " needs 4 fields");
        if (!vm.find_legislator(f[0]))
            throw ParseError(ParseErrorCode::UnknownLegislator, "metadata id '" + f[0] + "' is not in the votes table");
        if (f[2].empty() || f[3].empty())
            throw ValidationError("metadata row for '" + f[0] + "' has an empty party or bloc");
        ids.push_back(f[0]);
        meta.push_back({f[0], f[1], f[2], f[3]});
    }
    require_unique(ids, "metadata");
    return meta;
}

FilterResult filter_low_participation(const VoteMatrix& vm, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw ValidationError("participation threshold must lie in [0,1]");
    const std::size_t m = vm.motions();
    std::vector<std::string> kept_ids;
    std::vector<Vote> kept_cells;
    std::vector<std::string> removed;
    for (std::size_t i = 0; i < vm.legislators(); ++i) {
        double frac = static_cast<double>(vm.observed_in_row(i)) / static_cast<double>(m);
        if (frac < threshold) {
            removed.push_back(vm.legislator_ids()[i]);
            continue;
        }
        kept_ids.push_back(vm.legislator_ids()[i]);
        for (std::size_t j = 0; j < m; ++j) kept_cells.push_back(vm(i, j));
    }
    if (kept_ids.size() < 2)
        throw ValidationError("participation filter leaves fewer than 2 legislators");
    return {VoteMatrix(std::move(kept_ids), vm.motion_ids(), std::move(kept_cells)), std::move(removed)};
}

std::vector<double> motion_yea_rates(const VoteMatrix& vm) {
    std::vector<double> rates(vm.motions(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t j = 0; j < vm.motions(); ++j) {
        std::size_t yea = 0, obs = 0;
        for (std::size_t i = 0; i < vm.legislators(); ++i) {
            Vote v = vm(i, j);
            if (!is_observed(v)) continue;
            ++obs;
            if (v == Vote::Yea) ++yea;
        }
        if (obs > 0) rates[j] = static_cast<double>(yea) / static_cast<double>(obs);
    }
    return rates;
}

VoteMatrix drop_unanimous_motions(const VoteMatrix& vm) {
    auto rates = motion_yea_rates(vm);
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < vm.motions(); ++j) {
        if (std::isnan(rates[j]) || (rates[j] > 0.0 && rates[j] < 1.0)) keep.push_back(j);
    }
    std::vector<std::string> motion_ids;
    for (auto j : keep) motion_ids.push_back(vm.motion_ids()[j]);
    std::vector<Vote> cells;
    cells.reserve(vm.legislators() * keep.size());
    for (std::size_t i = 0; i < vm.legislators(); ++i)
        for (auto j : keep) cells.push_back(vm(i, j));
    return VoteMatrix(vm.legislator_ids(), std::move(motion_ids), std::move(cells));
}

MissingRates missing_rates(const VoteMatrix& vm) {
    const std::size_t n = vm.legislators(), m = vm.motions();
    MissingRates out;
    out.per_legislator.assign(n, 0.0);
    out.per_motion.assign(m, 0.0);
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (is_observed(vm(i, j))) continue;
            out.per_legislator[i] += 1.0;
            out.per_motion[j] += 1.0;
            ++total;
        }
    }
    for (auto& r : out.per_legislator) r /= static_cast<double>(m);
    for (auto& r : out.per_motion) r /= static_cast<double>(n);
    out.overall = static_cast<double>(total) / static_cast<double>(n * m);
    return out;
}

} // namespace idealpoint
