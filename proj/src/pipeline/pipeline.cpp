#include "qd/pipeline/pipeline.hpp"

#include "qd/cluster/kmeans.hpp"
#include "qd/corpus/miner.hpp"
#include "qd/corpus/splitter.hpp"
#include "qd/error.hpp"
#include "qd/impact/impact.hpp"
#include "qd/log.hpp"
#include "qd/metrics/catalog.hpp"
#include "qd/pipeline/artifacts.hpp"
#include "qd/pipeline/report.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fcntl.h>
#include <map>
#include <unistd.h>

namespace qd::pipeline {

namespace fs = std::filesystem;

OutputLock::OutputLock(const fs::path& dir) : path_(dir / ".qd.lock") {
    fs::create_directories(dir);
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        if (errno == EEXIST)
            throw InputError("output directory " + dir.string() + " is in use by another qd process (remove " +
                             path_.string() + " if it is stale)");
        throw Error("cannot create " + path_.string() + ": " + std::strerror(errno));
    }
    const auto pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
    ::close(fd);
}

OutputLock::~OutputLock() {
    std::error_code ec;
    fs::remove(path_, ec);
}

namespace {

fs::path out(const PipelineConfig& c, const char* name) { return fs::path(c.out_dir) / name; }

void require_input(const PipelineConfig& c, const char* artifact, const char* stage) {
    if (!fs::exists(out(c, artifact)))
        throw InputError(std::string(artifact) + " not found in " + c.out_dir + "; enable the '" + stage +
                         "' stage to produce it");
}

BlobStore blobs(const PipelineConfig& c) { return BlobStore(fs::path(c.out_dir) / kBlobDir, c.blob_threshold_bytes); }

std::vector<impact::ImpactVector> load_impacts(const PipelineConfig& c) {
    std::vector<impact::ImpactVector> v;
    read_jsonl(out(c, kImpacts), [&](const Json& j) { v.push_back(impact_from_json(j)); });
    return v;
}

// Parsed snapshot with its analysis context; the analysis refers to the tree.
struct Snapshot {
    java::EntityTree tree;
    metrics::FileAnalysis analysis;
    explicit Snapshot(std::string_view source) : tree(java::parse_entities(source)), analysis(tree) {}
};

}  // namespace

std::vector<corpus::RepositoryRef> run_discover(const PipelineConfig& config, corpus::RepositorySource* source) {
    std::unique_ptr<corpus::RepositorySource> owned;
    if (!source) {
        corpus::GitHubSearchOptions opts;
        opts.api_url = config.discovery.api_url;
        if (const char* t = std::getenv("QD_API_TOKEN"); t && *t)
            opts.token = t;
        else
            log::warn("QD_API_TOKEN is not set; using unauthenticated search requests");
        opts.seed = config.seed;
        owned = std::make_unique<corpus::GitHubSearchSource>(opts);
        source = owned.get();
    }
    auto repos = corpus::discover_repositories(*source, config.discovery.min_stars, config.discovery.min_forks,
                                               config.discovery.query, config.discovery.limit);
    Json arr = Json::array();
    for (const auto& r : repos) arr.push_back(to_json(r));
    write_json(out(config, kRepositories), arr);
    log::info("discover: " + std::to_string(repos.size()) + " repositories");
    return repos;
}

StageReport run_mine(const PipelineConfig& config) {
    std::vector<std::pair<std::string, corpus::RepositoryRef>> sources;
    for (const auto& path : config.repos) sources.emplace_back(path, corpus::local_repository(path));
    if (config.discovery.enabled) {
        require_input(config, kRepositories, "discover");
        for (const auto& j : read_json(out(config, kRepositories))) {
            auto ref = repository_from_json(j);
            auto dir = ref.full_name;
            std::replace(dir.begin(), dir.end(), '/', '_');
            const auto dest = (fs::path(config.out_dir) / "clones" / dir).string();
            corpus::clone_repository(ref, dest);
            sources.emplace_back(dest, ref);
        }
    }
    if (sources.empty()) throw InputError("no repositories configured: pass --repo or set [corpus] repos");

    std::vector<Json> rows;
    corpus::MiningStats total;
    for (const auto& [path, ref] : sources) {
        auto stats = corpus::mine_commits(path, config.extension, ref,
                                          [&](corpus::CommitFileRecord&& r) { rows.push_back(to_json(r)); });
        log::info("mine: " + ref.full_name + ": " + std::to_string(stats.commits_seen) + " commits, " +
                  std::to_string(stats.records_emitted) + " records, " + std::to_string(stats.skipped) + " skipped");
        total += stats;
    }
    write_jsonl(out(config, kCommits), rows);
    return {"mine", total.commits_seen, total.records_emitted};
}

StageReport run_split(const PipelineConfig& config) {
    require_input(config, kCommits, "mine");
    const auto store = blobs(config);
    std::vector<Json> rows;
    std::size_t records = 0, failed = 0;
    read_jsonl(out(config, kCommits), [&](const Json& j) {
        ++records;
        const auto rec = record_from_json(j);
        try {
            for (const auto& m : corpus::split_into_modifications(rec)) rows.push_back(to_json(m, store));
        } catch (const Error& e) {
            ++failed;
            log::warn("split: dropping " + rec.sha.substr(0, 12) + ":" + rec.filename + ": " + e.what());
        }
    });
    write_jsonl(out(config, kModifications), rows);
    log::info("split: " + std::to_string(records) + " records -> " + std::to_string(rows.size()) + " modifications" +
              (failed ? " (" + std::to_string(failed) + " records failed)" : ""));
    return {"split", records, rows.size()};
}

StageReport run_analyze(const PipelineConfig& config) {
    require_input(config, kModifications, "split");
    const auto store = blobs(config);
    std::map<std::string, std::unique_ptr<Snapshot>> before_cache;  // one per (sha, file)
    std::vector<impact::ImpactVector> kept;
    std::vector<std::pair<std::string, std::string>> excluded;
    std::size_t total = 0;

    read_jsonl(out(config, kModifications), [&](const Json& j) {
        ++total;
        const auto m = modification_from_json(j, store);
        if (!m.syntactic) {
            excluded.emplace_back(m.id, "not-syntactic");
            return;
        }
        try {
            auto& before = before_cache[m.sha + ":" + m.filename];
            if (!before) before = std::make_unique<Snapshot>(m.isolated_before);
            const Snapshot after(m.isolated_after);
            const auto affected = impact::affected_entities(m.hunk, before->tree, after.tree);
            if (affected.pairs.empty()) {
                excluded.emplace_back(m.id, "no-matched-entities");
                return;
            }
            auto v = impact::compute_impact(m.id, m.repo.full_name, affected, before->analysis, after.analysis);
            if (!impact::has_impact(v)) {
                excluded.emplace_back(m.id, "zero-impact");
                return;
            }
            kept.push_back(std::move(v));
        } catch (const ParseError& e) {
            excluded.emplace_back(m.id, "parse-failed");
        }
    });

    std::sort(kept.begin(), kept.end(),
              [](const auto& a, const auto& b) { return a.modification_id < b.modification_id; });
    std::sort(excluded.begin(), excluded.end());
    std::vector<Json> rows, ex;
    for (const auto& v : kept) rows.push_back(to_json(v));
    for (const auto& [id, reason] : excluded) ex.push_back(Json{{"modification_id", id}, {"reason", reason}});
    write_jsonl(out(config, kImpacts), rows);
    write_jsonl(out(config, kExclusions), ex);
    log::info("analyze: " + std::to_string(total) + " modifications -> " + std::to_string(kept.size()) +
              " with non-zero impact");
    return {"analyze", total, kept.size()};
}

StageReport run_summarize(const PipelineConfig& config) {
    require_input(config, kImpacts, "analyze");
    require_input(config, kModifications, "split");
    const auto impacts = load_impacts(config);
    std::map<std::string, std::size_t> wanted;
    for (std::size_t i = 0; i < impacts.size(); ++i) wanted.emplace(impacts[i].modification_id, i);

    const auto store = blobs(config);
    std::vector<corpus::Modification> mods(impacts.size());
    std::vector<char> found(impacts.size(), 0);
    read_jsonl(out(config, kModifications), [&](const Json& j) {
        auto it = wanted.find(j.at("id").get<std::string>());
        if (it == wanted.end()) return;
        mods[it->second] = modification_from_json(j, store);
        found[it->second] = 1;
    });
    std::vector<const corpus::Modification*> ptrs;
    for (std::size_t i = 0; i < mods.size(); ++i) {
        if (!found[i]) throw InputError("modification " + impacts[i].modification_id + " missing from " + kModifications);
        ptrs.push_back(&mods[i]);
    }

    std::unique_ptr<summarize::LlmClient> client;
    if (config.offline) {
        log::info("summarize: offline, using rule-based summaries");
    } else if (config.llm.api_key.empty()) {
        log::warn("QD_LLM_KEY is not set; using rule-based summaries");
    } else {
        auto llm = config.llm;
        llm.seed = config.seed;
        client = std::make_unique<summarize::LlmClient>(llm);
    }
    const auto pairs = summarize::summarize_all(ptrs, client.get());
    std::vector<Json> rows;
    for (const auto& p : pairs) rows.push_back(to_json(p));
    write_jsonl(out(config, kSummaries), rows);
    return {"summarize", impacts.size(), rows.size()};
}

StageReport run_cluster(const PipelineConfig& config) {
    require_input(config, kImpacts, "analyze");
    const auto impacts = load_impacts(config);
    const auto n = impacts.size();
    cluster::Matrix points(n, metrics::kImpactDimensions);
    std::vector<std::string> repos;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = impacts[i].imputed();
        std::copy(row.begin(), row.end(), points.row(i));
        repos.push_back(impacts[i].repo);
    }
    if (config.cluster.standardize) points = cluster::standardize(points);

    auto [k_min, k_max] = cluster::default_k_range(n);
    if (config.cluster.k_min) k_min = config.cluster.k_min;
    if (config.cluster.k_max) k_max = config.cluster.k_max;
    auto result = cluster::select_k(points, k_min, k_max, config.cluster.restarts, config.seed);
    cluster::evaluate_clusters(result, repos, config.cluster.min_size);

    Json scores = Json::array();
    for (const auto& s : result.scores)
        scores.push_back(Json{{"k", s.k}, {"mean_silhouette", s.mean_silhouette}, {"inertia", s.inertia}});
    Json centroids = Json::array();
    for (std::size_t c = 0; c < result.k; ++c)
        centroids.push_back(std::vector<double>(result.centroids.row(c), result.centroids.row(c) + result.centroids.cols));
    Json assignment = Json::array();
    for (std::size_t i = 0; i < n; ++i)
        assignment.push_back(Json{{"modification_id", impacts[i].modification_id},
                                  {"cluster", result.assignment[i]},
                                  {"silhouette", result.point_silhouette[i]}});
    Json clusters = Json::array();
    for (std::size_t c = 0; c < result.k; ++c) {
        std::vector<std::string> members_repos;
        for (std::size_t i = 0; i < n; ++i)
            if (static_cast<std::size_t>(result.assignment[i]) == c) members_repos.push_back(repos[i]);
        std::sort(members_repos.begin(), members_repos.end());
        members_repos.erase(std::unique(members_repos.begin(), members_repos.end()), members_repos.end());
        Json reasons = Json::array();
        if (auto it = result.rejection_reasons.find(c); it != result.rejection_reasons.end())
            for (const auto& r : it->second) reasons.push_back(Json{{"predicate", r.predicate}, {"message", r.message}});
        clusters.push_back(Json{{"id", c},
                                {"size", result.cluster_size[c]},
                                {"silhouette", result.cluster_silhouette[c]},
                                {"repositories", members_repos},
                                {"retained", reasons.empty()},
                                {"rejection_reasons", reasons}});
    }
    Json doc{{"k", result.k},
             {"seed", config.seed},
             {"standardize", config.cluster.standardize},
             {"k_range", {k_min, k_max}},
             {"restarts", config.cluster.restarts},
             {"components", component_names()},
             {"mean_silhouette", result.mean_silhouette},
             {"inertia", result.inertia},
             {"scores", scores},
             {"centroids", centroids},
             {"assignment", assignment},
             {"clusters", clusters},
             {"retained", result.retained}};
    write_json(out(config, kClusters), doc);
    log::info("cluster: k = " + std::to_string(result.k) + ", mean silhouette " + format_number(result.mean_silhouette, 4) +
              ", " + std::to_string(result.retained.size()) + " retained");
    return {"cluster", n, result.k};
}

StageReport run_report(const PipelineConfig& config) {
    require_input(config, kImpacts, "analyze");
    require_input(config, kClusters, "cluster");
    const auto all = load_impacts(config);
    write_text(out(config, kDistributions), distributions_csv(export_distributions(all)));

    std::map<std::string, impact::ImpactVector> by_id;
    for (const auto& v : all) by_id.emplace(v.modification_id, v);

    const auto doc = read_json(out(config, kClusters));
    cluster::ClusterResult result;
    result.k = doc.at("k").get<std::size_t>();
    result.mean_silhouette = doc.at("mean_silhouette").get<double>();
    std::vector<impact::ImpactVector> impacts;
    for (const auto& a : doc.at("assignment")) {
        const auto id = a.at("modification_id").get<std::string>();
        auto it = by_id.find(id);
        if (it == by_id.end()) throw InputError(std::string(kClusters) + " refers to " + id + ", which is not in " + kImpacts);
        impacts.push_back(it->second);
        result.assignment.push_back(a.at("cluster").get<int>());
        result.point_silhouette.push_back(a.at("silhouette").get<double>());
    }
    for (const auto& c : doc.at("clusters")) {
        result.cluster_silhouette.push_back(c.at("silhouette").get<double>());
        result.cluster_size.push_back(c.at("size").get<std::size_t>());
        const auto id = c.at("id").get<std::size_t>();
        if (c.at("retained").get<bool>()) result.retained.push_back(id);
        for (const auto& r : c.at("rejection_reasons"))
            result.rejection_reasons[id].push_back({r.at("predicate").get<std::string>(), r.at("message").get<std::string>()});
    }

    std::map<std::string, summarize::SummaryPair> summaries;
    if (config.stages.summarize && fs::exists(out(config, kSummaries)))
        read_jsonl(out(config, kSummaries), [&](const Json& j) {
            auto s = summary_from_json(j);
            summaries.emplace(s.modification_id, std::move(s));
        });

    std::vector<ClusterReport> reports;
    for (auto c : report_order(result)) reports.push_back(render_cluster_report(c, result, impacts, summaries));

    Json jr = Json::array();
    for (const auto& r : reports) {
        Json members = Json::array(), comps = Json::array();
        for (const auto& m : r.members)
            members.push_back(Json{{"index", m.index},
                                   {"modification_id", m.modification_id},
                                   {"repo", m.repo},
                                   {"summary", m.summary},
                                   {"simple_summary", m.simple_summary}});
        for (const auto& c : r.components)
            comps.push_back(Json{{"level", c.level},
                                 {"metric", c.metric},
                                 {"description", c.description},
                                 {"mean", c.mean ? Json(*c.mean) : Json(nullptr)},
                                 {"count_defined", c.count_defined},
                                 {"verdict", c.verdict ? Json(std::string(to_string(*c.verdict))) : Json(nullptr)}});
        jr.push_back(Json{{"cluster_id", r.cluster_id},
                          {"silhouette", r.silhouette},
                          {"repositories", r.repositories},
                          {"members", members},
                          {"components", comps}});
    }
    write_json(out(config, kReportJson),
               Json{{"k", result.k}, {"mean_silhouette", result.mean_silhouette}, {"clusters", jr}});
    write_text(out(config, kReportText), report_text(result, reports));
    write_text(out(config, kReportMetricsCsv), report_metrics_csv(reports));
    write_text(out(config, kReportMembersCsv), report_members_csv(reports));
    log::info("report: " + std::to_string(reports.size()) + " clusters written to " + out(config, kReportText).string());
    return {"report", result.k, reports.size()};
}

std::vector<StageReport> run_pipeline(const PipelineConfig& config) {
    OutputLock lock(config.out_dir);
    std::vector<StageReport> done;
    if (config.discovery.enabled && config.stages.mine) run_discover(config);
    if (config.stages.mine) done.push_back(run_mine(config));
    if (config.stages.split) done.push_back(run_split(config));
    if (config.stages.analyze) done.push_back(run_analyze(config));
    if (config.stages.summarize) done.push_back(run_summarize(config));
    if (config.stages.cluster) done.push_back(run_cluster(config));
    if (config.stages.report) done.push_back(run_report(config));
    return done;
}

}  // namespace qd::pipeline
