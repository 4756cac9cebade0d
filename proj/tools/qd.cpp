#include "qd/error.hpp"
#include "qd/java/entity_tree.hpp"
#include "qd/log.hpp"
#include "qd/metrics/engine.hpp"
#include "qd/pipeline/config.hpp"
#include "qd/pipeline/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using qd::pipeline::PipelineConfig;

struct Overrides {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool offline = false;
    bool quiet = false;
    bool verbose = false;
    std::vector<std::string> repos;
    std::string extension;
    std::size_t blob_threshold = 0;
    std::size_t k_min = 0, k_max = 0, restarts = 0;
    bool standardize = false;
    std::int64_t min_stars = -1, min_forks = -1;
    std::vector<std::string> query;
    std::size_t limit = 0;
    std::vector<std::string> skip;
};

PipelineConfig resolve(const CLI::App& app, const Overrides& o) {
    PipelineConfig c = o.config.empty() ? PipelineConfig{} : qd::pipeline::load_config(o.config);
    auto given = [&](const char* name) {
        const CLI::App* a = &app;
        for (const auto* sub : app.get_subcommands())
            if (sub->count_all() > 0) a = sub;
        for (const auto* owner : {a, &app})
            if (const auto* opt = owner->get_option_no_throw(name); opt && opt->count() > 0) return true;
        return false;
    };
    if (given("--out")) c.out_dir = o.out;
    if (given("--seed")) c.seed = o.seed;
    if (o.offline) c.offline = true;
    if (given("--repo")) c.repos = o.repos;
    if (given("--extension")) c.extension = o.extension;
    if (given("--blob-threshold-bytes")) c.blob_threshold_bytes = o.blob_threshold;
    if (given("--k-min")) c.cluster.k_min = o.k_min;
    if (given("--k-max")) c.cluster.k_max = o.k_max;
    if (given("--restarts")) c.cluster.restarts = o.restarts;
    if (o.standardize) c.cluster.standardize = true;
    if (given("--min-stars")) c.discovery.min_stars = o.min_stars;
    if (given("--min-forks")) c.discovery.min_forks = o.min_forks;
    if (given("--query")) c.discovery.query = o.query;
    if (given("--limit")) c.discovery.limit = o.limit;
    for (const auto& s : o.skip) {
        if (s == "mine") c.stages.mine = false;
        else if (s == "split") c.stages.split = false;
        else if (s == "analyze") c.stages.analyze = false;
        else if (s == "summarize") c.stages.summarize = false;
        else if (s == "cluster") c.stages.cluster = false;
        else if (s == "report") c.stages.report = false;
        else throw qd::InputError("unknown stage '" + s + "'");
    }
    qd::pipeline::apply_environment(c);
    return c;
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

int print_metrics(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qd::InputError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    const auto tree = qd::java::parse_entities(ss.str());
    for (const auto& e : tree.errors) std::cerr << path << ":" << e.line << ": " << e.message << "\n";
    const qd::metrics::FileAnalysis file(tree);
    const auto all = file.all();
    for (auto kind : {qd::metrics::EntityKind::Class, qd::metrics::EntityKind::Method}) {
        std::cout << "kind\tentity";
        for (auto m : qd::metrics::metrics_for(kind)) std::cout << '\t' << m;
        std::cout << '\n';
        for (const auto& em : all) {
            if (em.kind != kind) continue;
            std::cout << (kind == qd::metrics::EntityKind::Class ? "class" : "method") << '\t' << em.key;
            for (double v : em.values) std::cout << '\t' << num(v);
            std::cout << '\n';
        }
        if (kind == qd::metrics::EntityKind::Class) std::cout << '\n';
    }
    return tree.ok() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mine commits, measure the quality impact of each change, and cluster the changes."};
    app.require_subcommand(1);
    Overrides o;
    app.add_option("--config", o.config, "INI configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", o.out, "Output directory");
    app.add_option("--seed", o.seed, "Random seed");
    app.add_flag("--offline", o.offline, "Use rule-based summaries only");
    app.add_flag("-q,--quiet", o.quiet, "Only print warnings and errors");
    app.add_flag("-v,--verbose", o.verbose, "Print debug messages");

    auto add_repo = [&](CLI::App* s) {
        s->add_option("--repo", o.repos, "Local git repository (repeatable)");
        s->add_option("--extension", o.extension, "Subject-language file extension (default .java)");
    };
    auto add_split = [&](CLI::App* s) {
        s->add_option("--blob-threshold-bytes", o.blob_threshold, "Snapshots above this size go to blobs/");
    };
    auto add_cluster = [&](CLI::App* s) {
        s->add_option("--k-min", o.k_min, "Smallest k to try");
        s->add_option("--k-max", o.k_max, "Largest k to try");
        s->add_option("--restarts", o.restarts, "k-means restarts per k");
        s->add_flag("--standardize", o.standardize, "z-score the impact components before clustering");
    };

    auto* discover = app.add_subcommand("discover", "Search the hosting API for candidate repositories");
    discover->add_option("--min-stars", o.min_stars, "Keep repositories with more stars than this");
    discover->add_option("--min-forks", o.min_forks, "Keep repositories with more forks than this");
    discover->add_option("--query", o.query, "Search terms");
    discover->add_option("--limit", o.limit, "Maximum number of repositories");
    auto* mine = app.add_subcommand("mine", "Extract per-commit file changes into commits.jsonl");
    add_repo(mine);
    auto* split = app.add_subcommand("split", "Split file changes into modifications.jsonl");
    add_split(split);
    app.add_subcommand("analyze", "Compute metric impact vectors into impacts.jsonl");
    app.add_subcommand("summarize", "Summarize retained modifications into summaries.jsonl");
    auto* clus = app.add_subcommand("cluster", "Cluster impact vectors into clusters.json");
    add_cluster(clus);
    app.add_subcommand("report", "Write distributions and cluster reports");
    auto* run = app.add_subcommand("run", "Run all enabled stages");
    add_repo(run);
    add_split(run);
    add_cluster(run);
    run->add_option("--skip", o.skip, "Stage to skip (repeatable)");
    std::string metrics_file;
    auto* metrics = app.add_subcommand("metrics", "Print the metric table of one source file as TSV");
    metrics->add_option("file", metrics_file, "Source file")->required();

    for (auto* s : app.get_subcommands({})) s->fallthrough();

    CLI11_PARSE(app, argc, argv);
    if (o.quiet) qd::log::set_level(qd::log::Level::Warn);
    if (o.verbose) qd::log::set_level(qd::log::Level::Debug);

    try {
        if (metrics->parsed()) return print_metrics(metrics_file);
        const auto config = resolve(app, o);
        namespace p = qd::pipeline;
        if (run->parsed()) {
            p::run_pipeline(config);
            return 0;
        }
        p::OutputLock lock(config.out_dir);
        if (discover->parsed()) {
            for (const auto& r : p::run_discover(config))
                std::cout << r.full_name << '\t' << r.stars << '\t' << r.forks << '\n';
        } else if (mine->parsed()) {
            p::run_mine(config);
        } else if (split->parsed()) {
            p::run_split(config);
        } else if (app.got_subcommand("analyze")) {
            p::run_analyze(config);
        } else if (app.got_subcommand("summarize")) {
            p::run_summarize(config);
        } else if (clus->parsed()) {
            p::run_cluster(config);
        } else if (app.got_subcommand("report")) {
            p::run_report(config);
        }
        return 0;
    } catch (const qd::InputError& e) {
        qd::log::error(e.what());
        return 2;
    } catch (const std::exception& e) {
        qd::log::error(e.what());
        return 1;
    }
}
