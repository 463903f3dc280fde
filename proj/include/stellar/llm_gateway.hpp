#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stellar/detail/hash.hpp"
#include "stellar/detail/random.hpp"
#include "stellar/error.hpp"
#include "stellar/path_sva.hpp"
#include "stellar/rtl_parser.hpp"
#include "stellar/transport.hpp"

namespace stellar {

struct GenerationConfig {
  double temperature = 0.0;
  int max_tokens = 1024;
  std::string model_id;
  std::chrono::milliseconds timeout{60000};
  RetryPolicy retry;

  void validate() const {
    if (!(temperature >= 0.0)) throw InvalidArgument("temperature must be >= 0");
    if (max_tokens < 1) throw InvalidArgument("max_tokens must be >= 1");
    if (retry.retries < 0) throw InvalidArgument("retries must be >= 0");
  }
};

struct Completion {
  std::string text;
  int retries = 0;
};

class LlmProvider {
 public:
  virtual ~LlmProvider() = default;
  virtual std::string id() const = 0;
  virtual Completion complete(const std::string& prompt, const GenerationConfig& config) = 0;
};

inline Completion complete(LlmProvider& provider, const std::string& prompt, const GenerationConfig& config) {
  if (prompt.empty()) throw EmptyInput("prompt");
  config.validate();
  return provider.complete(prompt, config);
}

// --- mock ----------------------------------------------------------------

enum class MockMode { Perfect, Lossy, Garbled, EchoPaths };

struct MockOptions {
  MockMode mode = MockMode::Perfect;
  double p = 0.0;  // drop probability (lossy) or defect probability (garbled)
  std::uint64_t seed = 0;
};

// Parses "perfect", "lossy:0.5", "garbled:1", "echo-paths", with or without a
// leading "mock:".
inline MockOptions parse_mock_spec(std::string_view spec, std::uint64_t seed = 0) {
  if (spec.starts_with("mock:")) spec.remove_prefix(5);
  MockOptions o;
  o.seed = seed;
  std::string_view name = spec, arg;
  if (auto colon = spec.find(':'); colon != std::string_view::npos) {
    name = spec.substr(0, colon);
    arg = spec.substr(colon + 1);
  }
  if (name == "perfect") o.mode = MockMode::Perfect;
  else if (name == "lossy") o.mode = MockMode::Lossy;
  else if (name == "garbled") o.mode = MockMode::Garbled;
  else if (name == "echo-paths") o.mode = MockMode::EchoPaths;
  else throw InvalidArgument("unknown mock mode '" + std::string(spec) + "'");
  const bool needs_p = o.mode == MockMode::Lossy || o.mode == MockMode::Garbled;
  if (needs_p != !arg.empty()) throw InvalidArgument("mock mode '" + std::string(name) + "' takes " + (needs_p ? "a probability" : "no argument"));
  if (needs_p) {
    try {
      std::size_t used = 0;
      o.p = std::stod(std::string(arg), &used);
      if (used != arg.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw InvalidArgument("bad probability '" + std::string(arg) + "'");
    }
    if (o.p < 0.0 || o.p > 1.0) throw InvalidArgument("probability must be in [0, 1]");
  }
  return o;
}

namespace detail {

// Body of the last ```verilog fence, which the prompt reserves for the target.
inline std::optional<std::string> last_verilog_fence(std::string_view prompt) {
  const std::string_view open = "```verilog\n";
  const auto start = prompt.rfind(open);
  if (start == std::string_view::npos) return std::nullopt;
  const auto body = start + open.size();
  const auto close = prompt.find("```", body);
  if (close == std::string_view::npos) return std::nullopt;
  return std::string(prompt.substr(body, close - body));
}

// Adds one stray ')' ahead of the implication, the same defect class as an
// extra closing parenthesis in the antecedent.
inline std::string inject_stray_paren(const std::string& prop) {
  for (const char* op : {" |=> ", " |-> "})
    if (auto pos = prop.find(op); pos != std::string::npos) return prop.substr(0, pos) + ")" + prop.substr(pos);
  return prop + ")";
}

}  // namespace detail

// Deterministic stand-in for a model: output depends only on the prompt and
// the options. It reads the target from the prompt and answers with the path
// templates, optionally degraded.
class MockProvider : public LlmProvider {
 public:
  explicit MockProvider(MockOptions options = {}) : options_(options) {}

  std::string id() const override {
    switch (options_.mode) {
      case MockMode::Perfect: return "mock:perfect";
      case MockMode::Lossy: return "mock:lossy:" + format_p();
      case MockMode::Garbled: return "mock:garbled:" + format_p();
      case MockMode::EchoPaths: return "mock:echo-paths";
    }
    return "mock";
  }

  Completion complete(const std::string& prompt, const GenerationConfig&) override {
    std::vector<std::string> props;
    if (options_.mode == MockMode::EchoPaths) {
      static const std::regex re(R"(Target code has (\d+) execution paths)");
      std::smatch m;
      if (!std::regex_search(prompt, m, re)) return {"No execution path count was given.\n", 0};
      const auto n = std::stoul(m[1].str());
      for (std::size_t i = 0; i < n; ++i)
        props.push_back("property echo_" + std::to_string(i) + ";\n  1'b1 |-> 1'b1;\nendproperty\n");
    } else {
      const auto target = detail::last_verilog_fence(prompt);
      if (!target) return {"I could not find the target RTL.\n", 0};
      std::optional<RtlBlock> block;
      try {
        block = parse_single_block(*target);
      } catch (const std::exception& e) {
        return {std::string("The target does not parse: ") + e.what() + "\n", 0};
      }
      props = path_assertions(block->block, "gen_" + block->module_name);
      detail::Rng rng(options_.seed ^ detail::fnv1a(prompt));
      std::vector<std::string> kept;
      for (auto& p : props) {
        if (options_.mode == MockMode::Lossy && rng.chance(options_.p)) continue;
        if (options_.mode == MockMode::Garbled && rng.chance(options_.p)) p = detail::inject_stray_paren(p);
        kept.push_back(std::move(p));
      }
      props = std::move(kept);
    }
    std::string out = "Here are the assertions, one per execution path.\n\n```systemverilog\n";
    for (const auto& p : props) out += p;
    out += "```\n";
    return {std::move(out), 0};
  }

 private:
  std::string format_p() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", options_.p);
    return buf;
  }

  MockOptions options_;
};

// --- remote chat-completions provider --------------------------------------

struct RemoteLlmOptions {
  std::string base_url;  // e.g. https://api.example.com/v1
  std::string api_key;
  double requests_per_second = 0.0;
};

inline constexpr const char* kApiKeyEnv = "STELLAR_API_KEY";

// POSTs {model, messages:[{role:user, content}], temperature, max_tokens} to
// <base_url>/chat/completions and returns choices[0].message.content.
class RemoteLlmProvider : public LlmProvider {
 public:
  RemoteLlmProvider(std::shared_ptr<Transport> transport, RemoteLlmOptions options, Sleeper sleep = real_sleeper())
      : transport_(std::move(transport)),
        options_(std::move(options)),
        sleep_(std::move(sleep)),
        limiter_(options_.requests_per_second) {}

  std::string id() const override { return "remote:" + options_.base_url; }

  Completion complete(const std::string& prompt, const GenerationConfig& config) override {
    if (options_.api_key.empty())
      throw AuthError(std::string("no API key; set ") + kApiKeyEnv);
    std::string url = options_.base_url;
    while (!url.empty() && url.back() == '/') url.pop_back();
    HttpRequest req;
    req.url = url + "/chat/completions";
    req.timeout = config.timeout;
    req.headers = {{"Content-Type", "application/json"}, {"Authorization", "Bearer " + options_.api_key}};
    req.body = nlohmann::json{{"model", config.model_id},
                              {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
                              {"temperature", config.temperature},
                              {"max_tokens", config.max_tokens}}
                   .dump();
    auto outcome = post_with_retries(*transport_, req, config.retry, sleep_, &limiter_);
    total_retries_ += outcome.retries;
    try {
      const auto body = nlohmann::json::parse(outcome.response.body);
      return {body.at("choices").at(0).at("message").at("content").get<std::string>(), outcome.retries};
    } catch (const nlohmann::json::exception&) {
      throw ProviderError(outcome.response.status, "unexpected response shape: " + excerpt(outcome.response.body));
    }
  }

  int total_retries() const { return total_retries_.load(); }

 private:
  std::shared_ptr<Transport> transport_;
  RemoteLlmOptions options_;
  Sleeper sleep_;
  RateLimiter limiter_;
  std::atomic<int> total_retries_{0};
};

}  // namespace stellar
