#pragma once

#include "idealpoint/sampler.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace idealpoint {

/// Ordered `key=value` records; `#` starts a comment line.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

std::string format_double(double v);
double parse_double(std::string_view s);

std::string write_key_values(const KeyValues& kv);
KeyValues parse_key_values(std::string_view text);
const std::string* find_value(const KeyValues& kv, std::string_view key);

/// Config echo written next to a draws table.
KeyValues draws_sidecar(const PosteriorDraws& draws);

/// Long table `draw,param_kind,index,dim,value`, one row per scalar. Kinds:
/// mu, alpha, beta, loglik, hyper_mean, hyper_var. Values use the shortest
/// representation that round-trips.
void write_draws(std::ostream& out, const PosteriorDraws& draws);

/// Reads a draws table back, sized and configured by its sidecar.
PosteriorDraws read_draws(std::istream& table, const KeyValues& sidecar);

/// ChainConfig fields recovered from a sidecar.
ChainConfig config_from_sidecar(const KeyValues& sidecar);

} // namespace idealpoint
