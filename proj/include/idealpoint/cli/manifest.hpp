#pragma once

#include "idealpoint/draws_io.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace idealpoint::cli {

struct RunManifest {
    std::string command;
    KeyValues config; // effective option values, written as config.<key>
    std::vector<std::uint64_t> seeds;
    KeyValues input_digests; // label -> sha256 of the raw bytes
    std::vector<std::string> outputs;
    double duration_seconds = 0.0;
};

std::string sha256_hex(std::string_view bytes);

/// Whole file as bytes; IoError if it cannot be read.
std::string read_file(const std::filesystem::path& path);

/// Writes via a temporary file and a rename so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

KeyValues manifest_records(const RunManifest& m);
void write_manifest(const std::filesystem::path& path, const RunManifest& m);

} // namespace idealpoint::cli
