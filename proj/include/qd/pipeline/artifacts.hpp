#pragma once

#include "qd/cluster/kmeans.hpp"
#include "qd/corpus/miner.hpp"
#include "qd/corpus/splitter.hpp"
#include "qd/impact/impact.hpp"
#include "qd/summarize/summarizer.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace qd::pipeline {

using Json = nlohmann::ordered_json;

inline constexpr const char* kRepositories = "repositories.json";
inline constexpr const char* kCommits = "commits.jsonl";
inline constexpr const char* kModifications = "modifications.jsonl";
inline constexpr const char* kImpacts = "impacts.jsonl";
inline constexpr const char* kExclusions = "exclusions.jsonl";
inline constexpr const char* kSummaries = "summaries.jsonl";
inline constexpr const char* kClusters = "clusters.json";
inline constexpr const char* kDistributions = "distributions.csv";
inline constexpr const char* kReportText = "report.txt";
inline constexpr const char* kReportJson = "report.json";
inline constexpr const char* kReportMetricsCsv = "report_metrics.csv";
inline constexpr const char* kReportMembersCsv = "report_members.csv";
inline constexpr const char* kBlobDir = "blobs";

/// Content-addressed store for large file snapshots (SHA-256 file names).
class BlobStore {
public:
    BlobStore(std::filesystem::path dir, std::size_t threshold) : dir_(std::move(dir)), threshold_(threshold) {}

    /// Inline string below the threshold, {"blob": "<sha256>"} otherwise.
    Json put(const std::string& content) const;
    std::string get(const Json& value) const;

private:
    std::filesystem::path dir_;
    std::size_t threshold_;
};

std::string sha256_hex(std::string_view data);

Json to_json(const corpus::RepositoryRef& r);
corpus::RepositoryRef repository_from_json(const Json& j);

Json to_json(const corpus::CommitFileRecord& r);
corpus::CommitFileRecord record_from_json(const Json& j);

Json to_json(const corpus::Modification& m, const BlobStore& blobs);
corpus::Modification modification_from_json(const Json& j, const BlobStore& blobs);

Json to_json(const impact::ImpactVector& v);
impact::ImpactVector impact_from_json(const Json& j);

Json to_json(const summarize::SummaryPair& s);
summarize::SummaryPair summary_from_json(const Json& j);

/// The names of the 32 impact components in vector order ("method.HCPL").
std::vector<std::string> component_names();

/// Writes each value as one compact line; the file is replaced atomically.
void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& rows);
void write_json(const std::filesystem::path& path, const Json& value);
void write_text(const std::filesystem::path& path, const std::string& content);

/// Calls `row` for each non-empty line. Throws ParseError with the line
/// number on malformed JSON.
void read_jsonl(const std::filesystem::path& path, const std::function<void(const Json&)>& row);
Json read_json(const std::filesystem::path& path);

}  // namespace qd::pipeline
