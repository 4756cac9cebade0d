#pragma once

#include "qd/corpus/splitter.hpp"
#include "qd/net/http.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace qd::summarize {

inline constexpr std::size_t kDetailedMax = 200;
inline constexpr std::size_t kSimpleMax = 60;

enum class Source { Llm, Fallback };

std::string_view to_string(Source s);

struct SummaryPair {
    std::string modification_id;
    std::string detailed;
    std::string simple;
    Source source = Source::Fallback;

    bool operator==(const SummaryPair&) const = default;
};

enum class Category { RemoveImports, UpdatedComments, AddMethods, ChangedCall, ModifiedBlock };

std::string_view category_phrase(Category c);

/// Shape-based category of a hunk, checked in the order of the enum.
Category classify(const diff::Hunk& hunk);

/// Deterministic summary from the hunk shape. Throws InputError for a hunk
/// without changed lines.
SummaryPair fallback_summarize(const corpus::Modification& modification);

/// First sentence of `s`, whitespace collapsed, cut at a word boundary to at
/// most `max_chars` bytes.
std::string first_sentence(std::string_view s, std::size_t max_chars);

/// Replaces every "{{name}}" with its value.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

struct LlmConfig {
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string model = "gpt-4";
    double temperature = 0.0;
    std::string api_key;  // from QD_LLM_KEY
    std::size_t max_concurrency = 4;
    double requests_per_second = 2.0;
    net::RetryPolicy retry;
    std::uint64_t seed = 0;
};

/// Chat-completion client for the two summary steps.
class LlmClient {
public:
    explicit LlmClient(LlmConfig config, net::Sleeper sleeper = net::real_sleeper());

    /// Sends one user message; returns the first choice's message content.
    std::string complete(const std::string& prompt);

    [[nodiscard]] const LlmConfig& config() const noexcept { return config_; }

private:
    LlmConfig config_;
    net::Backoff backoff_;
    net::Sleeper sleeper_;
    net::TokenBucket bucket_;
};

/// Step 1 asks for a one-sentence description of the diff; step 2 sees only
/// that sentence and generalizes it. Any failure yields the fallback pair.
SummaryPair summarize(const corpus::Modification& modification, LlmClient* client);

/// Summarizes all modifications with at most `max_concurrency` requests in
/// flight; the result is aligned with the input. A null client means offline.
std::vector<SummaryPair> summarize_all(const std::vector<const corpus::Modification*>& modifications,
                                       LlmClient* client);

}  // namespace qd::summarize
