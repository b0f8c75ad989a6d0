#include "pbb/manifest.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include <json.hpp>

#include "pbb/error.hpp"

namespace pbb {

namespace {

using json = nlohmann::ordered_json;

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw Error("SHA-256 init failed");
    }
    ~Sha256() { EVP_MD_CTX_free(ctx_); }
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(const char* data, std::size_t n) {
        if (EVP_DigestUpdate(ctx_, data, n) != 1) throw Error("SHA-256 update failed");
    }
    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx_, md.data(), &len) != 1) throw Error("SHA-256 final failed");
        static constexpr char digits[] = "0123456789abcdef";
        std::string out;
        for (unsigned int i = 0; i < len; ++i) {
            out.push_back(digits[md[i] >> 4]);
            out.push_back(digits[md[i] & 0xF]);
        }
        return out;
    }

private:
    EVP_MD_CTX* ctx_;
};

}  // namespace

std::string sha256_hex(const std::string& bytes) {
    Sha256 h;
    h.update(bytes.data(), bytes.size());
    return h.hex();
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open '" + path + "' for hashing");
    Sha256 h;
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return h.hex();
}

void add_file(RunManifest& m, const std::string& dir, const std::string& name) {
    m.files.push_back({name, sha256_file((std::filesystem::path(dir) / name).string())});
}

void write_manifest(const std::string& dir, const RunManifest& m) {
    json files = json::array();
    for (const auto& f : m.files) files.push_back(json{{"name", f.name}, {"sha256", f.sha256}});
    const json j{
        {"tool_version", m.tool_version},
        {"command", m.command},
        {"config_hash", m.config_hash},
        {"g_over_kappa", m.g_over_kappa},
        {"seed_base", m.seed_base},
        {"seeds", m.seeds},
        {"workers", m.workers},
        {"wall_time_s", m.wall_time_s},
        {"truncation_warnings", m.truncation_warnings},
        {"warnings", m.warnings},
        {"files", files},
        {"interrupted", m.interrupted},
        {"tasks_completed", m.tasks_completed},
        {"tasks_total", m.tasks_total},
    };
    const auto path = std::filesystem::path(dir) / "manifest.json";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

RunManifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open manifest '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path, 1, e.what());
    }
    RunManifest m;
    try {
        m.tool_version = j.at("tool_version").get<std::string>();
        m.command = j.at("command").get<std::string>();
        m.config_hash = j.at("config_hash").get<std::string>();
        m.g_over_kappa = j.at("g_over_kappa").get<double>();
        m.seed_base = j.at("seed_base").get<std::uint64_t>();
        m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        m.workers = j.at("workers").get<int>();
        m.wall_time_s = j.at("wall_time_s").get<double>();
        m.truncation_warnings = j.at("truncation_warnings").get<std::vector<std::string>>();
        m.warnings = j.at("warnings").get<std::vector<std::string>>();
        for (const auto& f : j.at("files")) {
            m.files.push_back({f.at("name").get<std::string>(), f.at("sha256").get<std::string>()});
        }
        m.interrupted = j.at("interrupted").get<bool>();
        m.tasks_completed = j.at("tasks_completed").get<std::size_t>();
        m.tasks_total = j.at("tasks_total").get<std::size_t>();
    } catch (const json::exception& e) {
        throw ParseError(path, 1, e.what());
    }
    return m;
}

std::vector<std::string> verify_manifest(const std::string& dir) {
    const RunManifest m = read_manifest((std::filesystem::path(dir) / "manifest.json").string());
    std::vector<std::string> bad;
    for (const auto& f : m.files) {
        const auto p = std::filesystem::path(dir) / f.name;
        if (!std::filesystem::exists(p) || sha256_file(p.string()) != f.sha256) bad.push_back(f.name);
    }
    return bad;
}

}  // namespace pbb
