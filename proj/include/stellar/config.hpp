#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stellar/embed.hpp"
#include "stellar/error.hpp"
#include "stellar/llm_gateway.hpp"

namespace stellar {

// Settings shared by the CLI commands. A TOML-style file fills these in and
// command-line flags override individual fields afterwards.
struct RunConfig {
  std::string kb_path;
  std::string index_path;
  std::string template_path;

  std::string provider = "mock:perfect";  // mock:<mode>[:p] or remote
  std::string base_url;
  double requests_per_second = 0.0;
  GenerationConfig generation;

  std::string embedder = "hash";  // hash or remote
  std::string embed_url;
  std::size_t embed_dim = kDefaultDim;

  std::size_t k = 3;
  std::vector<std::size_t> n_values{3, 5, 7, 10};
  std::uint64_t seed = 0;
  std::size_t jobs = 0;
  std::size_t nlist = 32;
  std::size_t nprobe = 4;

  void validate() const {
    generation.validate();
    if (n_values.empty()) throw InvalidArgument("n_values must not be empty");
    for (auto n : n_values)
      if (n == 0) throw InvalidArgument("n_values entries must be at least 1");
    if (embedder != "hash" && embedder != "remote") throw InvalidArgument("embedder must be hash or remote");
    if (embed_dim == 0) throw InvalidArgument("embedder.dim must be at least 1");
    if (requests_per_second < 0.0) throw InvalidArgument("provider.requests_per_second must be >= 0");
  }
};

namespace detail {

template <class T>
T config_number(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end) throw InvalidArgument("config key " + key + ": bad number '" + text + "'");
  return v;
}

inline const std::string& single(const CLI::ConfigItem& item) {
  if (item.inputs.size() != 1) throw InvalidArgument("config key " + item.fullname() + " expects one value");
  return item.inputs.front();
}

}  // namespace detail

inline void apply_config_item(RunConfig& c, const CLI::ConfigItem& item) {
  using detail::config_number;
  using detail::single;
  const std::string key = item.fullname();
  using ms = std::chrono::milliseconds;
  if (key == "kb") c.kb_path = single(item);
  else if (key == "index") c.index_path = single(item);
  else if (key == "template") c.template_path = single(item);
  else if (key == "provider.name") c.provider = single(item);
  else if (key == "provider.base_url") c.base_url = single(item);
  else if (key == "provider.model") c.generation.model_id = single(item);
  else if (key == "provider.requests_per_second") c.requests_per_second = config_number<double>(key, single(item));
  else if (key == "generation.temperature") c.generation.temperature = config_number<double>(key, single(item));
  else if (key == "generation.max_tokens") c.generation.max_tokens = config_number<int>(key, single(item));
  else if (key == "generation.timeout_ms") c.generation.timeout = ms(config_number<long>(key, single(item)));
  else if (key == "retry.retries") c.generation.retry.retries = config_number<int>(key, single(item));
  else if (key == "retry.base_delay_ms") c.generation.retry.base_delay = ms(config_number<long>(key, single(item)));
  else if (key == "retry.max_delay_ms") c.generation.retry.max_delay = ms(config_number<long>(key, single(item)));
  else if (key == "embedder.name") c.embedder = single(item);
  else if (key == "embedder.url") c.embed_url = single(item);
  else if (key == "embedder.dim") c.embed_dim = config_number<std::size_t>(key, single(item));
  else if (key == "k") c.k = config_number<std::size_t>(key, single(item));
  else if (key == "seed") c.seed = config_number<std::uint64_t>(key, single(item));
  else if (key == "jobs") c.jobs = config_number<std::size_t>(key, single(item));
  else if (key == "nlist") c.nlist = config_number<std::size_t>(key, single(item));
  else if (key == "nprobe") c.nprobe = config_number<std::size_t>(key, single(item));
  else if (key == "n_values") {
    c.n_values.clear();
    for (const auto& v : item.inputs) c.n_values.push_back(config_number<std::size_t>(key, v));
  } else {
    throw InvalidArgument("unknown config key " + key);
  }
}

inline RunConfig parse_run_config(std::istream& in, RunConfig base = RunConfig()) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  for (const auto& item : items) {
    // CLI11 emits section markers as "++"/"--" pseudo items
    if (item.name == "++" || item.name == "--") continue;
    apply_config_item(base, item);
  }
  base.validate();
  return base;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config " + path.string());
  return parse_run_config(in);
}

}  // namespace stellar
