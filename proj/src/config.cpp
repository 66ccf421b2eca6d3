#include "wb/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wb/protocol.hpp"

namespace wb {

namespace {

using Json = nlohmann::json;

[[noreturn]] void cfg_fail(const std::string& origin, const std::string& what) {
    throw WbError("config-parse-error", origin + ": " + what);
}

void reject_unknown(const Json& obj, const std::set<std::string>& known,
                    const std::string& origin, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!known.count(key))
            throw WbError("config-unknown-key", origin + ": " + where + " has no key \"" + key +
                                                    "\"");
    }
}

template <typename T>
T pull(const Json& obj, const std::string& key, T fallback, const std::string& origin) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    try {
        return it->get<T>();
    } catch (const Json::exception&) {
        cfg_fail(origin, "key \"" + key + "\" has the wrong type");
    }
}

}  // namespace

std::string WorkbenchConfig::resolved_data_dir() const {
    return data_dir.empty() ? default_data_dir() : data_dir;
}

WorkbenchConfig parse_config_text(const std::string& text, const std::string& origin) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::exception& e) {
        cfg_fail(origin, e.what());
    }
    if (!j.is_object()) cfg_fail(origin, "top level must be an object");
    reject_unknown(j, {"seed", "trials", "data_dir", "cost_z", "suite"}, origin, "top level");

    WorkbenchConfig cfg;
    cfg.seed = pull<std::uint64_t>(j, "seed", cfg.seed, origin);
    cfg.trials = pull<std::uint64_t>(j, "trials", cfg.trials, origin);
    cfg.data_dir = pull<std::string>(j, "data_dir", cfg.data_dir, origin);
    cfg.cost_z = pull<int>(j, "cost_z", cfg.cost_z, origin);
    if (cfg.trials == 0) cfg_fail(origin, "trials must be positive");
    if (cfg.cost_z < 1) cfg_fail(origin, "cost_z must be positive");

    if (j.contains("suite")) {
        const Json& s = j["suite"];
        if (!s.is_object()) cfg_fail(origin, "suite must be an object");
        reject_unknown(s,
                       {"digest_len", "key_len", "fuzzy_t", "puf_noise_rate",
                        "entropy_flag_threshold", "freshness_window"},
                       origin, "suite");
        cfg.suite.digest_len = pull<std::size_t>(s, "digest_len", cfg.suite.digest_len, origin);
        cfg.suite.key_len = pull<std::size_t>(s, "key_len", cfg.suite.key_len, origin);
        cfg.suite.fuzzy_t = pull<std::size_t>(s, "fuzzy_t", cfg.suite.fuzzy_t, origin);
        cfg.suite.puf_noise_rate =
            pull<double>(s, "puf_noise_rate", cfg.suite.puf_noise_rate, origin);
        cfg.suite.entropy_flag_threshold =
            pull<double>(s, "entropy_flag_threshold", cfg.suite.entropy_flag_threshold, origin);
        cfg.suite.freshness_window = pull<std::int64_t>(
            s, "freshness_window", cfg.suite.freshness_window, origin);
        if (cfg.suite.digest_len < 8 || cfg.suite.digest_len > 64)
            cfg_fail(origin, "digest_len must be within 8..64");
        if (cfg.suite.key_len < 16 || cfg.suite.key_len > 64)
            cfg_fail(origin, "key_len must be within 16..64");
        if (cfg.suite.puf_noise_rate < 0.0 || cfg.suite.puf_noise_rate > 0.5)
            cfg_fail(origin, "puf_noise_rate must be within 0..0.5");
        if (cfg.suite.freshness_window < 0) cfg_fail(origin, "freshness_window must be >= 0");
        cfg.suite.validate();
    }
    return cfg;
}

WorkbenchConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw WbError("config-file-missing", path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

}  // namespace wb
