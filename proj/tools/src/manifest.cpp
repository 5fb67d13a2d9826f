#include "manifest.hpp"

#include <openssl/evp.h>

#include <filesystem>
#include <fstream>

#include "sirp/common.hpp"

namespace sirp::tool {

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path + " for hashing");

    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("sha256 init failed");
    }
    char buf[1 << 16];
    while (in.good()) {
        in.read(buf, sizeof buf);
        const std::streamsize got = in.gcount();
        if (got > 0 && EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(got)) != 1) {
            EVP_MD_CTX_free(ctx);
            throw Error("sha256 update failed");
        }
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("sha256 final failed");
    }
    EVP_MD_CTX_free(ctx);

    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

void RunManifest::add_input(const std::string& path) {
    inputs.emplace_back(path, sha256_file(path));
}

void RunManifest::write(const std::string& out_dir) const {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["command"] = command;
    j["tool_version"] = tool_version;
    j["seed"] = seed;
    j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& [path, digest] : inputs)
        j["inputs"].push_back({{"path", path}, {"sha256", digest}});
    j["config"] = config;
    j["outputs"] = outputs;
    j["wall_seconds"] = wall_seconds;

    const std::filesystem::path file =
        std::filesystem::path(out_dir) / (command + "_manifest.json");
    std::ofstream out(file);
    if (!out) throw LoadError("cannot write manifest " + file.string());
    out << j.dump(2) << "\n";
}

} // namespace sirp::tool
