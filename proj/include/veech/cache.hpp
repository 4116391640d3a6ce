#pragma once

#include "errors.hpp"
#include "version.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace veech {

inline std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

struct CacheKey {
    std::string kind;
    int level = 0;
    nlohmann::json settings;
    std::string version = version_string;

    std::string digest() const {
        const nlohmann::json canon = {{"kind", kind}, {"level", level}, {"settings", settings}, {"version", version}};
        return sha256_hex(canon.dump());
    }
    std::string filename() const { return kind + "-k" + std::to_string(level) + "-" + digest().substr(0, 32) + ".json"; }
};

inline std::filesystem::path default_cache_dir() {
    if (const char* env = std::getenv("VEECH_CACHE_DIR"); env && *env) return env;
    if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return std::filesystem::path(xdg) / "veech";
    if (const char* home = std::getenv("HOME"); home && *home) return std::filesystem::path(home) / ".cache" / "veech";
    return ".veech-cache";
}

// One JSON file per key; writes go to a temporary file that is renamed into place.
class Cache {
public:
    explicit Cache(std::filesystem::path dir = default_cache_dir()) : dir_(std::move(dir)) {}

    const std::filesystem::path& dir() const { return dir_; }

    std::optional<std::string> load_raw(const CacheKey& key) const {
        const auto p = dir_ / key.filename();
        std::ifstream in(p, std::ios::binary);
        if (!in) return std::nullopt;
        std::ostringstream os;
        os << in.rdbuf();
        const std::string text = os.str();
        try {
            const auto j = nlohmann::json::parse(text);
            if (j.at("key").at("version") != key.version || j.at("key").at("digest") != key.digest()) return std::nullopt;
        } catch (const std::exception&) {
            return std::nullopt;
        }
        return text;
    }

    std::optional<nlohmann::json> load(const CacheKey& key) const {
        auto raw = load_raw(key);
        if (!raw) return std::nullopt;
        return nlohmann::json::parse(*raw).at("payload");
    }

    std::filesystem::path store(const CacheKey& key, const nlohmann::json& payload) const {
        std::filesystem::create_directories(dir_);
        const nlohmann::json doc = {
            {"key", {{"kind", key.kind}, {"level", key.level}, {"settings", key.settings}, {"version", key.version}, {"digest", key.digest()}}},
            {"payload", payload}};
        const auto final_path = dir_ / key.filename();
        std::random_device rd;
        const auto tmp = dir_ / (key.filename() + ".tmp" + std::to_string(rd()));
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw Error("cannot write cache file " + tmp.string());
            out << doc.dump(1) << '\n';
            if (!out) throw Error("short write to cache file " + tmp.string());
        }
        std::filesystem::rename(tmp, final_path);
        return final_path;
    }

    std::vector<std::filesystem::path> list() const {
        std::vector<std::filesystem::path> out;
        if (!std::filesystem::exists(dir_)) return out;
        for (const auto& e : std::filesystem::directory_iterator(dir_))
            if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
        std::sort(out.begin(), out.end());
        return out;
    }

    std::size_t clear() const {
        std::size_t n = 0;
        if (!std::filesystem::exists(dir_)) return 0;
        for (const auto& e : std::filesystem::directory_iterator(dir_)) {
            const auto ext = e.path().extension();
            if (e.is_regular_file() && (ext == ".json" || e.path().filename().string().find(".tmp") != std::string::npos)) {
                std::filesystem::remove(e.path());
                ++n;
            }
        }
        return n;
    }

private:
    std::filesystem::path dir_;
};

} // namespace veech
