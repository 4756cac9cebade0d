#include "oracles.hpp"
#include "qd/error.hpp"
#include "qd/metrics/catalog.hpp"
#include "qd/pipeline/artifacts.hpp"
#include "qd/pipeline/config.hpp"
#include "qd/pipeline/pipeline.hpp"
#include "qd/pipeline/report.hpp"

#include <doctest.h>

#include <fstream>
#include <random>
#include <set>

using namespace qd;
using pipeline::Verdict;
namespace fs = std::filesystem;

namespace {

fs::path write_ini(const std::string& body) {
    const auto dir = testing::temp_dir("qd-config");
    const auto path = dir / "qd.ini";
    std::ofstream(path) << body;
    return path;
}

std::size_t component(std::string_view level, std::string_view metric) {
    const auto kind = level == "method" ? metrics::EntityKind::Method : metrics::EntityKind::Class;
    const auto idx = *metrics::metric_index(kind, metric);
    return level == "method" ? idx : metrics::kMethodMetrics.size() + idx;
}

}  // namespace

TEST_CASE("config file") {
    const auto path = write_ini(
        "out = results\nseed = 7\noffline = true\n"
        "[corpus]\nrepos = \"a\", \"/abs/b\"\n"
        "[split]\nblob_threshold_bytes = 1024\n"
        "[summarize]\nmodel = gpt-4\nmax_concurrency = 2\n"
        "[cluster]\nk_min = 3\nk_max = 9\nstandardize = true\n"
        "[stages]\nsummarize = false\n");
    const auto c = pipeline::load_config(path.string());
    CHECK(c.out_dir == "results");
    CHECK(c.seed == 7);
    CHECK(c.offline);
    CHECK(c.repos == std::vector<std::string>{(path.parent_path() / "a").string(), "/abs/b"});  // relative to the file
    CHECK(c.blob_threshold_bytes == 1024);
    CHECK(c.llm.max_concurrency == 2);
    CHECK(c.cluster.k_min == 3);
    CHECK(c.cluster.k_max == 9);
    CHECK(c.cluster.standardize);
    CHECK_FALSE(c.stages.summarize);
    CHECK(c.stages.cluster);

    CHECK_THROWS_AS(pipeline::load_config(write_ini("[cluster]\nkmin = 3\n").string()), InputError);
    CHECK_THROWS_AS(pipeline::load_config(write_ini("seed = many\n").string()), InputError);
    CHECK_THROWS_AS(pipeline::load_config(write_ini("offline = maybe\n").string()), InputError);
    CHECK_THROWS_AS(pipeline::load_config("/nonexistent/qd.ini"), InputError);
}

TEST_CASE("output lock is exclusive") {
    const auto dir = testing::temp_dir("qd-lock");
    {
        pipeline::OutputLock lock(dir);
        CHECK(fs::exists(dir / ".qd.lock"));
        CHECK_THROWS_AS([&] { pipeline::OutputLock second(dir); }(), Error);
    }
    CHECK_FALSE(fs::exists(dir / ".qd.lock"));
    pipeline::OutputLock again(dir);
}

TEST_CASE("verdict for every metric") {
    const std::set<std::string> higher_is_better = {"MI", "AD", "CD", "CLOC", "DLOC"};
    REQUIRE(metrics::kAllMetrics.size() == 23);
    for (const auto& m : metrics::kAllMetrics) {
        const std::string name(m.name);
        CAPTURE(name);
        const bool up_good = higher_is_better.count(name) > 0;
        CHECK(pipeline::verdict(name, 5.0) == (up_good ? Verdict::Improvement : Verdict::Degradation));
        CHECK(pipeline::verdict(name, -5.0) == (up_good ? Verdict::Degradation : Verdict::Improvement));
        CHECK(pipeline::verdict(name, 0.0) == Verdict::Neutral);
    }
    CHECK(pipeline::verdict("MI", 2.9) == Verdict::Improvement);
    CHECK(pipeline::verdict("McCC", 16.6) == Verdict::Degradation);
    CHECK_THROWS_AS(pipeline::verdict("XYZ", 1.0), InputError);
}

TEST_CASE("quantiles interpolate between closest ranks") {
    CHECK(pipeline::quantile({1, 2, 3, 4}, 0.25) == doctest::Approx(1.75));
    CHECK(pipeline::quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
    CHECK(pipeline::quantile({4, 1, 3, 2}, 0.75) == doctest::Approx(3.25));
    CHECK(pipeline::quantile({7}, 0.9) == 7.0);
    CHECK(pipeline::quantile({1, 2, 3, 4, 5}, 0.0) == 1.0);
    CHECK(pipeline::quantile({1, 2, 3, 4, 5}, 1.0) == 5.0);
    CHECK_THROWS_AS(pipeline::quantile({}, 0.5), InputError);
}

TEST_CASE("distributions") {
    std::vector<impact::ImpactVector> vs(4);
    const auto hcpl = component("method", "HCPL");
    vs[0].components[hcpl] = 10;
    vs[1].components[hcpl] = -10;
    vs[2].components[hcpl] = 30;
    const auto rows = pipeline::export_distributions(vs);
    REQUIRE(rows.size() == metrics::kImpactDimensions);
    CHECK(rows[hcpl].component == "method.HCPL");
    CHECK(rows[hcpl].count_defined == 3);
    CHECK(*rows[hcpl].median == 10.0);
    CHECK(*rows[hcpl].mean == doctest::Approx(10.0));
    CHECK(*rows[hcpl].q1 == 0.0);
    CHECK_FALSE(rows[1].min.has_value());
    CHECK(pipeline::distributions_csv(rows).find("method.HCPL,3,") != std::string::npos);
    CHECK_THROWS_AS(pipeline::export_distributions({}), InputError);
}

TEST_CASE("cluster report") {
    cluster::ClusterResult r;
    r.k = 2;
    r.assignment = {0, 1, 0, 0};
    r.point_silhouette = {0.6, 0.1, 0.8, 0.7};
    cluster::summarize_silhouettes(r);
    r.retained = {0};
    r.rejection_reasons[1] = {{"P2", "fewer than 5 modifications"}};

    std::vector<impact::ImpactVector> vs(4);
    const auto hcpl = component("method", "HCPL");
    const auto mi = component("method", "MI");
    const double hcpl_values[] = {-20, 99, -50, -26};
    for (std::size_t i = 0; i < 4; ++i) {
        vs[i].modification_id = "m" + std::to_string(i);
        vs[i].repo = i == 2 ? "b/two" : "a/one";
        vs[i].components[hcpl] = hcpl_values[i];
    }
    vs[0].components[mi] = 2.9;
    std::map<std::string, summarize::SummaryPair> summaries = {
        {"m0", {"m0", "Access modifier changed from private to public.", "Changed access modifier.", summarize::Source::Llm}},
    };

    const auto rep = pipeline::render_cluster_report(0, r, vs, summaries);
    CHECK(rep.repositories == std::vector<std::string>{"a/one", "b/two"});
    REQUIRE(rep.members.size() == 3);
    CHECK(rep.members[0].index == 1);
    CHECK(rep.members[0].simple_summary == "Changed access modifier.");
    CHECK(rep.members[1].summary == pipeline::kUnsummarized);
    CHECK(rep.members[2].simple_summary == pipeline::kUnsummarized);
    REQUIRE(rep.components.size() == metrics::kImpactDimensions);
    CHECK(rep.components[hcpl].level == "method");
    CHECK(rep.components[hcpl].metric == "HCPL");
    CHECK(*rep.components[hcpl].mean == doctest::Approx(-32.0));
    CHECK(rep.components[hcpl].count_defined == 3);
    CHECK(*rep.components[hcpl].verdict == Verdict::Improvement);
    CHECK(*rep.components[mi].mean == doctest::Approx(2.9));
    CHECK(rep.components[mi].count_defined == 1);
    CHECK(*rep.components[mi].verdict == Verdict::Improvement);
    CHECK_FALSE(rep.components[component("class", "LOC")].mean.has_value());

    const auto text = pipeline::report_text(r, {rep});
    CHECK(text.find("Changed access modifier.") != std::string::npos);
    CHECK(text.find("-32") != std::string::npos);
    CHECK(text.find("rejected:") != std::string::npos);
    CHECK(pipeline::report_members_csv({rep}).find(pipeline::kUnsummarized) != std::string::npos);
    CHECK_THROWS_AS(pipeline::render_cluster_report(5, r, vs, summaries), InputError);
}

TEST_CASE("report order is by silhouette") {
    cluster::ClusterResult r;
    r.k = 3;
    r.cluster_silhouette = {0.2, 0.9, 0.5};
    r.retained = {0, 1, 2};
    CHECK(pipeline::report_order(r) == std::vector<std::size_t>{1, 2, 0});
}

TEST_CASE("csv fields") {
    CHECK(pipeline::csv_field("plain") == "plain");
    CHECK(pipeline::csv_field("a,b") == "\"a,b\"");
    CHECK(pipeline::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("artifact round trips") {
    const auto dir = testing::temp_dir("qd-artifacts");
    const pipeline::BlobStore blobs(dir / "blobs", 16);

    const auto small = blobs.put("short");
    CHECK(small.is_string());
    const std::string big(100, 'z');
    const auto ref = blobs.put(big);
    REQUIRE(ref.is_object());
    CHECK(ref["blob"] == pipeline::sha256_hex(big));
    CHECK(blobs.get(ref) == big);
    CHECK(blobs.get(small) == "short");
    CHECK(pipeline::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK_THROWS_AS(blobs.get(pipeline::Json{{"blob", "0000"}}), ParseError);

    corpus::CommitFileRecord rec{"abc", "A.java", "msg", "class A {}\n", "class A { int x; }\n", "", {"o/r", 3, 4, "u"}};
    rec.diff = diff::unified_diff(rec.code_before, rec.code_after, rec.filename);
    const auto back = pipeline::record_from_json(pipeline::to_json(rec));
    CHECK(back.sha == rec.sha);
    CHECK(back.code_after == rec.code_after);
    CHECK(back.diff == rec.diff);
    CHECK(back.repo == rec.repo);

    const auto mods = corpus::split_into_modifications(rec);
    REQUIRE(mods.size() == 1);
    const auto mback = pipeline::modification_from_json(pipeline::to_json(mods[0], blobs), blobs);
    CHECK(mback.id == mods[0].id);
    CHECK(mback.hunk == mods[0].hunk);
    CHECK(mback.isolated_after == mods[0].isolated_after);
    CHECK(mback.region == mods[0].region);

    impact::ImpactVector v;
    v.modification_id = "x";
    v.repo = "o/r";
    v.components[3] = -12.5;
    v.affected_methods = 2;
    const auto vj = pipeline::to_json(v);
    const auto vback = pipeline::impact_from_json(vj);
    CHECK(vback.components == v.components);
    CHECK(vback.affected_methods == 2);

    const summarize::SummaryPair s{"x", "Did a thing.", "Did thing", summarize::Source::Fallback};
    CHECK(pipeline::summary_from_json(pipeline::to_json(s)) == s);

    const auto names = pipeline::component_names();
    REQUIRE(names.size() == 32);
    CHECK(names.front() == "method.HCPL");
    CHECK(names.back() == "class.LOC");

    pipeline::write_jsonl(dir / "rows.jsonl", {pipeline::Json{{"a", 1}}, pipeline::Json{{"a", 2}}});
    std::vector<int> seen;
    pipeline::read_jsonl(dir / "rows.jsonl", [&](const pipeline::Json& j) { seen.push_back(j["a"].get<int>()); });
    CHECK(seen == std::vector<int>{1, 2});
    std::ofstream(dir / "bad.jsonl") << "{\"a\":1}\n{oops\n";
    try {
        pipeline::read_jsonl(dir / "bad.jsonl", [](const pipeline::Json&) {});
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
}

TEST_CASE("stages run in order and report missing inputs") {
    const auto work = testing::temp_dir("qd-pipeline");
    const auto repos = testing::build_fixture_repos(work / "repos");
    pipeline::PipelineConfig c;
    c.out_dir = (work / "out").string();
    c.offline = true;
    c.seed = 3;
    for (const auto& r : repos) c.repos.push_back(r.string());

    CHECK_THROWS_AS(pipeline::run_split(c), InputError);

    const auto reports = pipeline::run_pipeline(c);
    REQUIRE(reports.size() == 6);
    CHECK(reports[0].stage == "mine");
    CHECK(reports.back().stage == "report");
    for (const char* name : {pipeline::kCommits, pipeline::kModifications, pipeline::kImpacts, pipeline::kSummaries,
                             pipeline::kClusters, pipeline::kReportText, pipeline::kDistributions})
        CHECK(fs::exists(fs::path(c.out_dir) / name));
    CHECK_FALSE(fs::exists(fs::path(c.out_dir) / ".qd.lock"));

    std::size_t summaries = 0;
    pipeline::read_jsonl(fs::path(c.out_dir) / pipeline::kSummaries, [&](const pipeline::Json& j) {
        ++summaries;
        CHECK(j["source"] == "fallback");
    });
    CHECK(summaries == reports[2].outputs);
}

TEST_CASE("deleting downstream artifacts and rerunning reproduces them") {
    const auto work = testing::temp_dir("qd-resume");
    pipeline::PipelineConfig c;
    c.out_dir = (work / "out").string();
    c.offline = true;
    c.seed = 7;
    for (const auto& r : testing::build_fixture_repos(work / "repos")) c.repos.push_back(r.string());
    pipeline::run_pipeline(c);

    const fs::path out(c.out_dir);
    const char* downstream[] = {pipeline::kSummaries, pipeline::kClusters, pipeline::kReportText, pipeline::kReportJson};
    std::map<std::string, std::string> first;
    for (const char* name : downstream) {
        first[name] = testing::read_file(out / name);
        fs::remove(out / name);
    }
    c.stages.mine = c.stages.split = c.stages.analyze = false;
    pipeline::run_pipeline(c);
    for (const char* name : downstream) CHECK(testing::read_file(out / name) == first[name]);

    fs::remove(out / pipeline::kImpacts);
    c.stages.summarize = c.stages.cluster = false;
    try {
        pipeline::run_pipeline(c);
        FAIL("expected a missing-input error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("analyze") != std::string::npos);
    }
    fs::remove_all(work);
}
