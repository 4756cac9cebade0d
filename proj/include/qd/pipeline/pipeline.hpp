#pragma once

#include "qd/corpus/repository.hpp"
#include "qd/pipeline/config.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace qd::pipeline {

/// Exclusive lock on an output directory (".qd.lock", created with O_EXCL).
class OutputLock {
public:
    explicit OutputLock(const std::filesystem::path& dir);
    ~OutputLock();
    OutputLock(const OutputLock&) = delete;
    OutputLock& operator=(const OutputLock&) = delete;

private:
    std::filesystem::path path_;
};

struct StageReport {
    std::string stage;
    std::size_t inputs = 0;
    std::size_t outputs = 0;
};

/// Writes repositories.json. `source` defaults to the GitHub search API.
std::vector<corpus::RepositoryRef> run_discover(const PipelineConfig& config,
                                                corpus::RepositorySource* source = nullptr);
/// commits.jsonl from the configured local repositories and, when
/// discovery is enabled, clones of the repositories in repositories.json.
StageReport run_mine(const PipelineConfig& config);
/// modifications.jsonl from commits.jsonl.
StageReport run_split(const PipelineConfig& config);
/// impacts.jsonl (non-zero vectors) and exclusions.jsonl.
StageReport run_analyze(const PipelineConfig& config);
/// summaries.jsonl for every retained impact vector.
StageReport run_summarize(const PipelineConfig& config);
/// clusters.json.
StageReport run_cluster(const PipelineConfig& config);
/// distributions.csv, report.txt, report.json and the report CSVs.
StageReport run_report(const PipelineConfig& config);

/// Runs the enabled stages in order under the output lock. A disabled stage
/// leaves its artifact as is; a missing input names the stage to enable.
std::vector<StageReport> run_pipeline(const PipelineConfig& config);

}  // namespace qd::pipeline
