#include "idealpoint/cli/manifest.hpp"

#include "idealpoint/error.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>

namespace idealpoint::cli {

std::string sha256_hex(std::string_view bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
        throw IoError("sha256 computation failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int k = 0; k < len; ++k) {
        out += hex[digest[k] >> 4];
        out += hex[digest[k] & 0xF];
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("error reading '" + path.string() + "'");
    return bytes;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp.string() + "'");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw IoError("error writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move '" + tmp.string() + "' into place: " + ec.message());
}

KeyValues manifest_records(const RunManifest& m) {
    KeyValues kv;
    kv.emplace_back("format", "idealpoint-manifest-1");
    kv.emplace_back("command", m.command);
    for (const auto& [k, v] : m.config) kv.emplace_back("config." + k, v);
    std::string seeds;
    for (auto s : m.seeds) seeds += (seeds.empty() ? "" : " ") + std::to_string(s);
    kv.emplace_back("seeds", seeds);
    for (const auto& [k, v] : m.input_digests) kv.emplace_back("sha256." + k, v);
    for (const auto& o : m.outputs) kv.emplace_back("output", o);
    kv.emplace_back("duration_seconds", format_double(m.duration_seconds));
    return kv;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
    write_file_atomic(path, write_key_values(manifest_records(m)));
}

} // namespace idealpoint::cli
