#pragma once

#include "qd/summarize/summarizer.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace qd::pipeline {

struct DiscoveryConfig {
    bool enabled = false;
    std::int64_t min_stars = 1000;
    std::int64_t min_forks = 1000;
    std::vector<std::string> query;
    std::size_t limit = 10;
    std::string api_url = "https://api.github.com";
};

struct ClusterConfig {
    std::size_t k_min = 0;  // 0: automatic range
    std::size_t k_max = 0;
    std::size_t restarts = 10;
    std::size_t min_size = 5;
    bool standardize = false;
};

struct StageToggles {
    bool mine = true;
    bool split = true;
    bool analyze = true;
    bool summarize = true;
    bool cluster = true;
    bool report = true;
};

struct PipelineConfig {
    std::string out_dir = "qd-out";
    std::uint64_t seed = 0;
    bool offline = false;

    std::vector<std::string> repos;  // local clone paths
    DiscoveryConfig discovery;
    std::string extension = ".java";
    std::size_t blob_threshold_bytes = 262144;
    summarize::LlmConfig llm;
    ClusterConfig cluster;
    StageToggles stages;
};

/// Reads an INI file: top-level keys out, seed, offline; sections [corpus],
/// [discovery], [split], [summarize], [cluster], [stages]. Unknown keys and
/// malformed values raise InputError.
PipelineConfig load_config(const std::string& path);

/// Overlays the language-model key from QD_LLM_KEY.
void apply_environment(PipelineConfig& config);

}  // namespace qd::pipeline
