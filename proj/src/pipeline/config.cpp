#include "qd/pipeline/config.hpp"

#include "qd/error.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>

namespace qd::pipeline {

namespace {

std::string single(const CLI::ConfigItem& item) {
    if (item.inputs.size() != 1) throw InputError("config key '" + item.fullname() + "' expects one value");
    return item.inputs.front();
}

bool to_bool(const CLI::ConfigItem& item) {
    const auto v = single(item);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw InputError("config key '" + item.fullname() + "' expects true or false, got '" + v + "'");
}

template <typename T>
T to_number(const CLI::ConfigItem& item) {
    const auto v = single(item);
    T out{};
    if (!CLI::detail::lexical_cast(v, out)) throw InputError("config key '" + item.fullname() + "' has a bad number '" + v + "'");
    return out;
}

}  // namespace

PipelineConfig load_config(const std::string& path) {
    if (!std::filesystem::is_regular_file(path)) throw InputError("config file not found: " + path);
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigINI().from_file(path);
    } catch (const CLI::Error& e) {
        throw InputError("cannot read config " + path + ": " + e.what());
    }

    PipelineConfig c;
    using Setter = std::function<void(const CLI::ConfigItem&)>;
    const std::map<std::string, Setter> setters = {
        {"out", [&](const auto& i) { c.out_dir = single(i); }},
        {"seed", [&](const auto& i) { c.seed = to_number<std::uint64_t>(i); }},
        {"offline", [&](const auto& i) { c.offline = to_bool(i); }},
        {"corpus.repos", [&](const auto& i) { c.repos = i.inputs; }},
        {"corpus.extension", [&](const auto& i) { c.extension = single(i); }},
        {"discovery.enabled", [&](const auto& i) { c.discovery.enabled = to_bool(i); }},
        {"discovery.min_stars", [&](const auto& i) { c.discovery.min_stars = to_number<std::int64_t>(i); }},
        {"discovery.min_forks", [&](const auto& i) { c.discovery.min_forks = to_number<std::int64_t>(i); }},
        {"discovery.query", [&](const auto& i) { c.discovery.query = i.inputs; }},
        {"discovery.limit", [&](const auto& i) { c.discovery.limit = to_number<std::size_t>(i); }},
        {"discovery.api_url", [&](const auto& i) { c.discovery.api_url = single(i); }},
        {"split.blob_threshold_bytes", [&](const auto& i) { c.blob_threshold_bytes = to_number<std::size_t>(i); }},
        {"summarize.endpoint", [&](const auto& i) { c.llm.endpoint = single(i); }},
        {"summarize.model", [&](const auto& i) { c.llm.model = single(i); }},
        {"summarize.temperature", [&](const auto& i) { c.llm.temperature = to_number<double>(i); }},
        {"summarize.max_concurrency", [&](const auto& i) { c.llm.max_concurrency = to_number<std::size_t>(i); }},
        {"summarize.requests_per_second", [&](const auto& i) { c.llm.requests_per_second = to_number<double>(i); }},
        {"summarize.max_attempts", [&](const auto& i) { c.llm.retry.max_attempts = to_number<int>(i); }},
        {"cluster.k_min", [&](const auto& i) { c.cluster.k_min = to_number<std::size_t>(i); }},
        {"cluster.k_max", [&](const auto& i) { c.cluster.k_max = to_number<std::size_t>(i); }},
        {"cluster.restarts", [&](const auto& i) { c.cluster.restarts = to_number<std::size_t>(i); }},
        {"cluster.min_size", [&](const auto& i) { c.cluster.min_size = to_number<std::size_t>(i); }},
        {"cluster.standardize", [&](const auto& i) { c.cluster.standardize = to_bool(i); }},
        {"stages.mine", [&](const auto& i) { c.stages.mine = to_bool(i); }},
        {"stages.split", [&](const auto& i) { c.stages.split = to_bool(i); }},
        {"stages.analyze", [&](const auto& i) { c.stages.analyze = to_bool(i); }},
        {"stages.summarize", [&](const auto& i) { c.stages.summarize = to_bool(i); }},
        {"stages.cluster", [&](const auto& i) { c.stages.cluster = to_bool(i); }},
        {"stages.report", [&](const auto& i) { c.stages.report = to_bool(i); }},
    };
    for (const auto& item : items) {
        // Section markers come through as "++"/"--" pseudo items.
        if (item.name == "++" || item.name == "--") continue;
        const auto key = item.fullname();
        auto it = setters.find(key);
        if (it == setters.end()) throw InputError("unknown config key '" + key + "' in " + path);
        it->second(item);
    }

    // Relative repository paths are resolved against the config file.
    const auto base = std::filesystem::absolute(path).parent_path();
    for (auto& r : c.repos)
        if (std::filesystem::path(r).is_relative()) r = (base / r).lexically_normal().string();
    return c;
}

void apply_environment(PipelineConfig& config) {
    if (const char* key = std::getenv("QD_LLM_KEY"); key && *key) config.llm.api_key = key;
}

}  // namespace qd::pipeline
