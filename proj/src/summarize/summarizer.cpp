#include "qd/summarize/summarizer.hpp"

#include "qd/error.hpp"
#include "qd/java/entity_tree.hpp"
#include "qd/java/lexer.hpp"
#include "qd/log.hpp"
#include "qd/prompts_embedded.hpp"
#include "qd/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <thread>

namespace qd::summarize {

std::string_view to_string(Source s) { return s == Source::Llm ? "llm" : "fallback"; }

std::string_view category_phrase(Category c) {
    switch (c) {
        case Category::RemoveImports: return "Remove unused imports";
        case Category::UpdatedComments: return "Updated comments";
        case Category::AddMethods: return "Add new methods";
        case Category::ChangedCall: return "Changed method call";
        case Category::ModifiedBlock: break;
    }
    return "Modified code block";
}

namespace {

struct Changed {
    std::vector<std::string> removed, added;  // non-blank, trimmed
};

Changed changed_lines(const diff::Hunk& hunk) {
    Changed c;
    for (const auto& l : hunk.lines) {
        if (l.op == ' ') continue;
        const auto t = text::trim(text::strip_eol(l.text));
        if (t.empty()) continue;
        (l.op == '-' ? c.removed : c.added).emplace_back(t);
    }
    return c;
}

bool is_import(std::string_view line) {
    return line.rfind("import ", 0) == 0 && !line.empty() && line.back() == ';';
}

bool is_comment_line(std::string_view line) {
    return line.rfind("//", 0) == 0 || line.rfind("/*", 0) == 0 || line.rfind("*", 0) == 0;
}

bool adds_methods_only(const diff::Hunk& hunk) {
    std::string body = "class QdProbe {\n";
    for (const auto& l : hunk.lines)
        if (l.op == '+') body += l.text.empty() || l.text.back() != '\n' ? l.text + "\n" : l.text;
    body += "}\n";
    try {
        const auto tree = java::parse_entities(body);
        return tree.ok() && !tree.classes.empty() && !tree.classes[0].methods.empty();
    } catch (const ParseError&) {
        return false;
    }
}

bool single_call_change(const Changed& c) {
    if (c.removed.size() != 1 || c.added.size() != 1) return false;
    std::vector<java::Token> a, b;
    try {
        a = java::tokenize(c.removed[0]);
        b = java::tokenize(c.added[0]);
    } catch (const ParseError&) {
        return false;
    }
    if (a.size() != b.size()) return false;
    std::optional<std::size_t> diff_at;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].text == b[i].text && a[i].kind == b[i].kind) continue;
        if (diff_at) return false;
        diff_at = i;
    }
    if (!diff_at) return false;
    const auto i = *diff_at;
    return a[i].kind == java::TokenKind::Identifier && b[i].kind == java::TokenKind::Identifier && i + 1 < a.size() &&
           a[i + 1].text == "(" && b[i + 1].text == "(";
}

std::string entity_phrase(const corpus::Modification& m) {
    const auto& r = m.region;
    if (r.kind == "method") return "method " + r.entity;
    if (r.kind == "type") return "class " + r.entity;
    if (r.kind == "field") return "field " + r.entity;
    const auto slash = m.filename.rfind('/');
    return "file " + (slash == std::string::npos ? m.filename : m.filename.substr(slash + 1));
}

}  // namespace

Category classify(const diff::Hunk& hunk) {
    const auto c = changed_lines(hunk);
    if (!c.removed.empty() && c.added.empty() && std::all_of(c.removed.begin(), c.removed.end(), is_import))
        return Category::RemoveImports;
    const bool any = !c.removed.empty() || !c.added.empty();
    if (any && std::all_of(c.removed.begin(), c.removed.end(), is_comment_line) &&
        std::all_of(c.added.begin(), c.added.end(), is_comment_line))
        return Category::UpdatedComments;
    if (c.removed.empty() && !c.added.empty() && adds_methods_only(hunk)) return Category::AddMethods;
    if (single_call_change(c)) return Category::ChangedCall;
    return Category::ModifiedBlock;
}

SummaryPair fallback_summarize(const corpus::Modification& modification) {
    if (modification.hunk.empty()) throw InputError("cannot summarize an empty hunk: " + modification.id);
    const auto phrase = std::string(category_phrase(classify(modification.hunk)));
    SummaryPair p;
    p.modification_id = modification.id;
    p.detailed = first_sentence(phrase + " in " + entity_phrase(modification), kDetailedMax - 1);
    if (p.detailed.empty() || p.detailed.back() != '.') p.detailed += '.';
    p.simple = phrase;
    p.source = Source::Fallback;
    return p;
}

std::string first_sentence(std::string_view s, std::size_t max_chars) {
    std::string flat;
    bool space = false;
    for (char ch : text::trim(s)) {
        if (ch == '\n' || ch == '\r' || ch == '\t' || ch == ' ') {
            space = true;
            continue;
        }
        if (space && !flat.empty()) flat += ' ';
        space = false;
        flat += ch;
    }
    for (std::size_t i = 0; i + 1 < flat.size(); ++i) {
        if (flat[i] != '.' && flat[i] != '!' && flat[i] != '?') continue;
        std::size_t j = i + 1;
        if (flat[j] == '"' || flat[j] == '`') ++j;
        if (j == flat.size() || flat[j] == ' ') {
            flat.resize(j);
            break;
        }
    }
    while (flat.size() >= 2 && (flat.front() == '"' || flat.front() == '`') && flat.back() == flat.front())
        flat = flat.substr(1, flat.size() - 2);
    if (flat.size() <= max_chars) return flat;

    auto cut = flat.rfind(' ', max_chars);
    if (cut == std::string::npos || cut == 0) {
        cut = max_chars;
        while (cut > 0 && (static_cast<unsigned char>(flat[cut]) & 0xC0) == 0x80) --cut;
    }
    flat.resize(cut);
    while (!flat.empty() && (flat.back() == ' ' || flat.back() == ',' || flat.back() == ';' || flat.back() == ':'))
        flat.pop_back();
    return flat;
}

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values) {
    std::string out;
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        const auto open = tmpl.find("{{", pos);
        if (open == std::string_view::npos) break;
        const auto close = tmpl.find("}}", open + 2);
        if (close == std::string_view::npos) break;
        out.append(tmpl.substr(pos, open - pos));
        const auto key = std::string(tmpl.substr(open + 2, close - open - 2));
        auto it = values.find(key);
        if (it != values.end())
            out += it->second;
        else
            out.append(tmpl.substr(open, close + 2 - open));
        pos = close + 2;
    }
    out.append(tmpl.substr(pos));
    return out;
}

LlmClient::LlmClient(LlmConfig config, net::Sleeper sleeper)
    : config_(std::move(config)),
      backoff_(config_.retry, config_.seed),
      sleeper_(std::move(sleeper)),
      bucket_(config_.requests_per_second, static_cast<double>(std::max<std::size_t>(1, config_.max_concurrency))) {}

std::string LlmClient::complete(const std::string& prompt) {
    nlohmann::json body = {
        {"model", config_.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
        {"temperature", config_.temperature},
    };
    net::HttpRequest req;
    req.method = "POST";
    req.url = config_.endpoint;
    req.body = body.dump();
    if (!config_.api_key.empty()) req.headers["Authorization"] = "Bearer " + config_.api_key;

    bucket_.acquire();
    const auto res = net::send_with_retry(req, backoff_, sleeper_);
    if (res.status != 200) throw Error("language model endpoint returned HTTP " + std::to_string(res.status));
    try {
        const auto doc = nlohmann::json::parse(res.body);
        return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("unexpected completion payload: ") + e.what());
    }
}

SummaryPair summarize(const corpus::Modification& modification, LlmClient* client) {
    if (modification.hunk.empty()) throw InputError("cannot summarize an empty hunk: " + modification.id);
    if (!client) return fallback_summarize(modification);
    try {
        const auto diff_text = diff::render_unified({modification.hunk}, "a/" + modification.filename,
                                                    "b/" + modification.filename);
        const auto detailed = first_sentence(
            client->complete(render_template(prompts::kSummary, {{"filename", modification.filename},
                                                                 {"commit_message", modification.commit_message},
                                                                 {"diff", diff_text}})),
            kDetailedMax);
        if (detailed.empty()) throw ParseError("empty summary");
        const auto simple =
            first_sentence(client->complete(render_template(prompts::kSimplify, {{"summary", detailed}})), kSimpleMax);
        if (simple.empty()) throw ParseError("empty simplified summary");
        return {modification.id, detailed, simple, Source::Llm};
    } catch (const Error& e) {
        log::warn("summary for " + modification.id + " fell back to rules: " + e.what());
        return fallback_summarize(modification);
    }
}

std::vector<SummaryPair> summarize_all(const std::vector<const corpus::Modification*>& modifications,
                                       LlmClient* client) {
    std::vector<SummaryPair> out(modifications.size());
    if (!client) {
        for (std::size_t i = 0; i < modifications.size(); ++i) out[i] = fallback_summarize(*modifications[i]);
        return out;
    }
    std::atomic<std::size_t> next{0};
    const auto workers = std::clamp<std::size_t>(client->config().max_concurrency, 1, std::max<std::size_t>(1, modifications.size()));
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (auto i = next++; i < modifications.size(); i = next++) out[i] = summarize(*modifications[i], client);
            });
    }
    return out;
}

}  // namespace qd::summarize
