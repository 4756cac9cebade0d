#include "qd/pipeline/artifacts.hpp"

#include "qd/error.hpp"
#include "qd/metrics/catalog.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <sstream>

namespace qd::pipeline {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) throw Error("SHA-256 failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 15];
    }
    return out;
}

Json BlobStore::put(const std::string& content) const {
    if (content.size() <= threshold_) return content;
    const auto hash = sha256_hex(content);
    const auto path = dir_ / hash;
    if (!fs::exists(path)) {
        fs::create_directories(dir_);
        write_text(path, content);
    }
    return Json{{"blob", hash}};
}

std::string BlobStore::get(const Json& value) const {
    if (value.is_string()) return value.get<std::string>();
    if (!value.is_object() || !value.contains("blob")) throw ParseError("snapshot is neither text nor a blob reference");
    const auto path = dir_ / value.at("blob").get<std::string>();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("missing blob " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json to_json(const corpus::RepositoryRef& r) {
    return Json{{"full_name", r.full_name}, {"stars", r.stars}, {"forks", r.forks}, {"clone_url", r.clone_url}};
}

corpus::RepositoryRef repository_from_json(const Json& j) {
    return {j.at("full_name").get<std::string>(), j.at("stars").get<std::int64_t>(), j.at("forks").get<std::int64_t>(),
            j.at("clone_url").get<std::string>()};
}

Json to_json(const corpus::CommitFileRecord& r) {
    return Json{{"sha", r.sha},
                {"filename", r.filename},
                {"commit_message", r.commit_message},
                {"code_before", r.code_before},
                {"code_after", r.code_after},
                {"diff", r.diff},
                {"repo", to_json(r.repo)}};
}

corpus::CommitFileRecord record_from_json(const Json& j) {
    corpus::CommitFileRecord r;
    r.sha = j.at("sha").get<std::string>();
    r.filename = j.at("filename").get<std::string>();
    r.commit_message = j.at("commit_message").get<std::string>();
    r.code_before = j.at("code_before").get<std::string>();
    r.code_after = j.at("code_after").get<std::string>();
    r.diff = j.at("diff").get<std::string>();
    r.repo = repository_from_json(j.at("repo"));
    return r;
}

namespace {

Json hunk_json(const diff::Hunk& h) {
    Json lines = Json::array();
    for (const auto& l : h.lines) lines.push_back(std::string(1, l.op) + l.text);
    return Json{{"old_start", h.old_start}, {"old_len", h.old_len}, {"new_start", h.new_start}, {"new_len", h.new_len},
                {"removed", h.removed()},   {"added", h.added()},     {"lines", lines}};
}

diff::Hunk hunk_from_json(const Json& j) {
    diff::Hunk h;
    h.old_start = j.at("old_start").get<std::size_t>();
    h.old_len = j.at("old_len").get<std::size_t>();
    h.new_start = j.at("new_start").get<std::size_t>();
    h.new_len = j.at("new_len").get<std::size_t>();
    for (const auto& l : j.at("lines")) {
        const auto s = l.get<std::string>();
        if (s.empty() || (s[0] != ' ' && s[0] != '-' && s[0] != '+')) throw ParseError("bad hunk line in artifact");
        h.lines.push_back({s[0], s.substr(1)});
    }
    return h;
}

Json nullable(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json to_json(const corpus::Modification& m, const BlobStore& blobs) {
    return Json{{"id", m.id},
                {"record_ref", {{"sha", m.sha}, {"filename", m.filename}}},
                {"commit_message", m.commit_message},
                {"hunk_index", m.hunk_index},
                {"hunk", hunk_json(m.hunk)},
                {"isolated_before", blobs.put(m.isolated_before)},
                {"isolated_after", blobs.put(m.isolated_after)},
                {"repo", to_json(m.repo)},
                {"region", {{"kind", m.region.kind}, {"entity", m.region.entity}, {"first", m.region.first}, {"last", m.region.last}}},
                {"syntactic", m.syntactic}};
}

corpus::Modification modification_from_json(const Json& j, const BlobStore& blobs) {
    corpus::Modification m;
    m.id = j.at("id").get<std::string>();
    m.sha = j.at("record_ref").at("sha").get<std::string>();
    m.filename = j.at("record_ref").at("filename").get<std::string>();
    m.commit_message = j.at("commit_message").get<std::string>();
    m.hunk_index = j.at("hunk_index").get<std::size_t>();
    m.hunk = hunk_from_json(j.at("hunk"));
    m.isolated_before = blobs.get(j.at("isolated_before"));
    m.isolated_after = blobs.get(j.at("isolated_after"));
    m.repo = repository_from_json(j.at("repo"));
    const auto& r = j.at("region");
    m.region = {r.at("kind").get<std::string>(), r.at("entity").get<std::string>(), r.at("first").get<std::size_t>(),
                r.at("last").get<std::size_t>()};
    m.syntactic = j.at("syntactic").get<bool>();
    return m;
}

Json to_json(const impact::ImpactVector& v) {
    constexpr auto kM = metrics::kMethodMetrics.size();
    Json method = Json::array(), cls = Json::array(), mask = Json::array();
    for (std::size_t i = 0; i < v.components.size(); ++i) {
        (i < kM ? method : cls).push_back(nullable(v.components[i]));
        mask.push_back(v.components[i].has_value());
    }
    return Json{{"modification_id", v.modification_id},
                {"repo", v.repo},
                {"method_deltas", method},
                {"class_deltas", cls},
                {"defined_mask", mask},
                {"affected_methods", v.affected_methods},
                {"affected_classes", v.affected_classes}};
}

impact::ImpactVector impact_from_json(const Json& j) {
    impact::ImpactVector v;
    v.modification_id = j.at("modification_id").get<std::string>();
    v.repo = j.at("repo").get<std::string>();
    const auto& method = j.at("method_deltas");
    const auto& cls = j.at("class_deltas");
    if (method.size() != metrics::kMethodMetrics.size() || cls.size() != metrics::kClassMetrics.size())
        throw ParseError("impact vector of " + v.modification_id + " has the wrong dimensionality");
    std::size_t i = 0;
    for (const auto* arr : {&method, &cls})
        for (const auto& c : *arr) {
            if (!c.is_null()) v.components[i] = c.get<double>();
            ++i;
        }
    v.affected_methods = j.at("affected_methods").get<std::size_t>();
    v.affected_classes = j.at("affected_classes").get<std::size_t>();
    return v;
}

Json to_json(const summarize::SummaryPair& s) {
    return Json{{"modification_id", s.modification_id},
                {"detailed", s.detailed},
                {"simple", s.simple},
                {"source", std::string(summarize::to_string(s.source))}};
}

summarize::SummaryPair summary_from_json(const Json& j) {
    summarize::SummaryPair s;
    s.modification_id = j.at("modification_id").get<std::string>();
    s.detailed = j.at("detailed").get<std::string>();
    s.simple = j.at("simple").get<std::string>();
    s.source = j.at("source").get<std::string>() == "llm" ? summarize::Source::Llm : summarize::Source::Fallback;
    return s;
}

std::vector<std::string> component_names() {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < metrics::kImpactDimensions; ++i)
        out.push_back(std::string(metrics::impact_component_level(i)) + "." +
                      std::string(metrics::impact_component_metric(i)));
    return out;
}

void write_text(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const auto tmp = fs::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        if (!out) throw Error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

void write_jsonl(const fs::path& path, const std::vector<Json>& rows) {
    std::string content;
    for (const auto& r : rows) {
        content += r.dump();
        content += '\n';
    }
    write_text(path, content);
}

void write_json(const fs::path& path, const Json& value) { write_text(path, value.dump(2) + "\n"); }

void read_jsonl(const fs::path& path, const std::function<void(const Json&)>& row) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path.string());
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::parse_error& e) {
            throw ParseError(path.filename().string() + ":" + std::to_string(n) + ": " + e.what());
        }
        try {
            row(j);
        } catch (const Json::exception& e) {
            throw ParseError(path.filename().string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
}

Json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ParseError(path.filename().string() + ": " + e.what());
    }
}

}  // namespace qd::pipeline
