// SPDX-License-Identifier: Apache-2.0
#include "uavprop/canonical.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "uavprop/error.hpp"

namespace uavprop {

double canonical_double(double value)
{
    if (!std::isfinite(value)) {
        throw Error("cannot serialize non-finite number");
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", kSignificantDigits, value);
    const double rounded = std::strtod(buf, nullptr);
    return rounded == 0.0 ? 0.0 : rounded;
}

std::string format_double(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", kSignificantDigits, canonical_double(value));
    return buf;
}

nlohmann::json canonicalize(const nlohmann::json& doc)
{
    switch (doc.type()) {
    case nlohmann::json::value_t::number_float:
        return canonical_double(doc.get<double>());
    case nlohmann::json::value_t::array: {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& item : doc) {
            out.push_back(canonicalize(item));
        }
        return out;
    }
    case nlohmann::json::value_t::object: {
        nlohmann::json out = nlohmann::json::object();
        for (const auto& [key, item] : doc.items()) {
            out[key] = canonicalize(item);
        }
        return out;
    }
    default:
        return doc;
    }
}

std::string canonical_dump(const nlohmann::json& doc, int indent)
{
    return canonicalize(doc).dump(indent);
}

std::string sha256_hex(std::string_view data)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open file: " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write file: " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw Error("write failed: " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

nlohmann::json parse_json(std::string_view text, const std::string& what)
{
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(what + ": parse error: " + e.what());
    }
}

} // namespace uavprop
