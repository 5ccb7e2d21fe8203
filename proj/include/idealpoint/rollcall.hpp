#pragma once

#include "idealpoint/error.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace idealpoint {

enum class Vote : std::int8_t { Nay = 0, Yea = 1, Missing = -1 };

inline bool is_observed(Vote v) noexcept { return v != Vote::Missing; }

/// Reasons a votes or metadata table is rejected.
enum class ParseErrorCode { DuplicateId, RaggedRow, UnknownToken, EmptyMatrix, MissingHeader, UnknownLegislator };

class ParseError : public ValidationError {
  public:
    ParseError(ParseErrorCode code, const std::string& what) : ValidationError(what), code_(code) {}
    ParseErrorCode code() const noexcept { return code_; }

  private:
    ParseErrorCode code_;
};

/// n x m roll-call matrix. Rows are legislators, columns are motions.
///
/// The constructor enforces n >= 2, m >= 1 and unique ids. It does not
/// require any observed cell, because synthetic masking may legitimately
/// blank a whole matrix; callers that fit a model check observed_count().
class VoteMatrix {
  public:
    VoteMatrix(std::vector<std::string> legislator_ids, std::vector<std::string> motion_ids,
               std::vector<Vote> cells);

    std::size_t legislators() const noexcept { return legislator_ids_.size(); }
    std::size_t motions() const noexcept { return motion_ids_.size(); }

    Vote operator()(std::size_t i, std::size_t j) const { return cells_[i * motions() + j]; }
    void set(std::size_t i, std::size_t j, Vote v) { cells_[i * motions() + j] = v; }

    const std::vector<std::string>& legislator_ids() const noexcept { return legislator_ids_; }
    const std::vector<std::string>& motion_ids() const noexcept { return motion_ids_; }
    const std::vector<Vote>& cells() const noexcept { return cells_; }

    std::size_t observed_count() const;
    std::size_t observed_in_row(std::size_t i) const;
    std::optional<std::size_t> find_legislator(std::string_view id) const;

    bool operator==(const VoteMatrix&) const = default;

  private:
    std::vector<std::string> legislator_ids_;
    std::vector<std::string> motion_ids_;
    std::vector<Vote> cells_;
};

struct LegislatorMeta {
    std::string id;
    std::string name;
    std::string party;
    std::string bloc;
};

/// Parses `legislator_id,<motion ids...>` followed by one row per legislator
/// with tokens 1, 0 or NA. Requires at least one observed cell.
VoteMatrix parse_vote_matrix(std::string_view text);

/// Inverse of parse_vote_matrix; the output re-parses to an equal matrix.
std::string serialize_vote_matrix(const VoteMatrix& vm);

/// Parses `id,name,party,bloc`. Every id must name a row of `vm`.
std::vector<LegislatorMeta> parse_legislator_meta(std::string_view text, const VoteMatrix& vm);

struct FilterResult {
    VoteMatrix matrix;
    std::vector<std::string> removed;
};

/// Keeps legislators whose observed fraction is >= threshold.
FilterResult filter_low_participation(const VoteMatrix& vm, double threshold);

/// Drops motions that are 0% or 100% Yea among observed votes. Motions with
/// no observed votes are kept.
VoteMatrix drop_unanimous_motions(const VoteMatrix& vm);

struct MissingRates {
    std::vector<double> per_legislator;
    std::vector<double> per_motion;
    double overall = 0.0;
};

MissingRates missing_rates(const VoteMatrix& vm);

/// Observed Yea fraction per motion; NaN for motions with no observed vote.
std::vector<double> motion_yea_rates(const VoteMatrix& vm);

} // namespace idealpoint
