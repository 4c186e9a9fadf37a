#include "hicl/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "hicl/common.hpp"

namespace hicl {

using ordered_json = nlohmann::ordered_json;

ExperimentConfig ExperimentConfig::parse(std::string_view json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("config: malformed syntax: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("config: top-level value must be an object");
    static const std::set<std::string> known_keys = {"dataset", "schema",  "taxonomy",
                                                     "learner", "k",       "seed",
                                                     "models",  "output_dir", "threads",
                                                     "save_models"};
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!known_keys.contains(it.key()))
            throw ParseError("config: unknown key '" + it.key() + "'");
    }
    ExperimentConfig cfg;
    auto get_string = [&](const char* key, std::string& into) {
        if (!doc.contains(key)) return;
        if (!doc[key].is_string())
            throw ParseError(std::string("config: key '") + key + "' must be a string");
        into = doc[key].get<std::string>();
    };
    get_string("dataset", cfg.dataset);
    get_string("schema", cfg.schema);
    get_string("taxonomy", cfg.taxonomy);
    get_string("models", cfg.models);
    get_string("output_dir", cfg.output_dir);
    if (doc.contains("learner")) cfg.learner = LearnerSpec::from_json(doc["learner"]);
    try {
        if (doc.contains("k")) cfg.k = doc["k"].get<int>();
        if (doc.contains("seed")) cfg.seed = doc["seed"].get<uint64_t>();
        if (doc.contains("threads")) cfg.threads = doc["threads"].get<int>();
        if (doc.contains("save_models")) cfg.save_models = doc["save_models"].get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

void ExperimentConfig::validate_for_run() const {
    if (models != "hr" && models != "fl" && models != "both")
        throw ValidationError("config: models must be hr, fl or both");
    if (k < 2) throw ValidationError("config: k must be >= 2");
    if (threads < 0) throw ValidationError("config: threads must be >= 0");
    learner.validate();
    if (dataset.empty()) throw ValidationError("config: dataset path missing");
    if (schema.empty()) throw ValidationError("config: schema path missing");
    if (taxonomy.empty()) throw ValidationError("config: taxonomy path missing");
    if (output_dir.empty()) throw ValidationError("config: output_dir missing");
    for (const std::string& path : {dataset, schema, taxonomy}) {
        if (!std::filesystem::exists(path))
            throw IoError("config: referenced file '" + path + "' does not exist");
    }
}

int ExperimentConfig::resolved_threads() const {
    if (threads > 0) return threads;
    if (const char* env = std::getenv("HICL_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace hicl
