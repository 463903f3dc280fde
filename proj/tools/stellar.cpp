// stellar: curate a knowledge base, index it, generate assertions for RTL
// files and run the evaluation experiments.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "stellar/stellar.hpp"

namespace {

using namespace stellar;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kProvider = 3 };

constexpr const char* kEmbedTokenEnv = "STELLAR_EMBED_TOKEN";

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? v : "";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path);
  return out;
}

std::vector<KbEntry> load_kb(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read knowledge base " + path);
  return read_kb(in);
}

// Flag values that override the config file when given.
struct Overrides {
  std::string config_path;
  bool json = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<std::string> kb_path, index_path;
  std::optional<std::string> provider, base_url, model, embedder, embed_url, template_path;
  std::optional<double> temperature;
  std::optional<int> max_tokens, retries;
  std::optional<std::size_t> k, nlist, nprobe;
  std::optional<std::vector<std::size_t>> n_values;

  RunConfig resolve() const {
    RunConfig c = config_path.empty() ? RunConfig() : load_run_config(config_path);
    if (kb_path) c.kb_path = *kb_path;
    if (index_path) c.index_path = *index_path;
    if (seed) c.seed = *seed;
    if (jobs) c.jobs = *jobs;
    if (provider) c.provider = *provider;
    if (base_url) c.base_url = *base_url;
    if (model) c.generation.model_id = *model;
    if (embedder) c.embedder = *embedder;
    if (embed_url) c.embed_url = *embed_url;
    if (template_path) c.template_path = *template_path;
    if (temperature) c.generation.temperature = *temperature;
    if (max_tokens) c.generation.max_tokens = *max_tokens;
    if (retries) c.generation.retry.retries = *retries;
    if (k) c.k = *k;
    if (nlist) c.nlist = *nlist;
    if (nprobe) c.nprobe = *nprobe;
    if (n_values) c.n_values = *n_values;
    c.validate();
    return c;
  }
};

std::unique_ptr<EmbeddingProvider> make_embedder(const RunConfig& c) {
  if (c.embedder == "hash") return std::make_unique<HashEmbedder>(c.embed_dim);
  if (c.embed_url.empty()) throw InvalidArgument("remote embedder needs embedder.url or --embed-url");
  RemoteEmbedderOptions o;
  o.url = c.embed_url;
  o.token = env_or_empty(kEmbedTokenEnv);
  o.dim = c.embed_dim;
  o.retry = c.generation.retry;
  return std::make_unique<RemoteEmbedder>(std::make_shared<HttplibTransport>(), o);
}

std::unique_ptr<LlmProvider> make_llm(const RunConfig& c) {
  if (c.provider == "remote") {
    const std::string key = env_or_empty(kApiKeyEnv);
    if (key.empty()) throw AuthError(std::string(kApiKeyEnv) + " is not set");
    if (c.base_url.empty()) throw InvalidArgument("remote provider needs provider.base_url or --base-url");
    return std::make_unique<RemoteLlmProvider>(std::make_shared<HttplibTransport>(),
                                               RemoteLlmOptions{c.base_url, key, c.requests_per_second});
  }
  return std::make_unique<MockProvider>(parse_mock_spec(c.provider, c.seed));
}

PromptTemplate make_template(const RunConfig& c) {
  return c.template_path.empty() ? PromptTemplate() : PromptTemplate::load(c.template_path);
}

// --- curate -------------------------------------------------------------------

struct CurateArgs {
  std::string input, output, reject_log;
};

int run_curate(const Overrides& ov, const CurateArgs& a) {
  const RunConfig c = ov.resolve();
  std::ifstream in(a.input, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + a.input);
  const auto lines = read_raw_pairs(in);

  std::vector<RawPair> pairs;
  std::vector<std::size_t> line_of;
  nlohmann::json rejects = nlohmann::json::array();
  for (const auto& l : lines) {
    if (l.pair) {
      pairs.push_back(*l.pair);
      line_of.push_back(l.line);
    } else {
      rejects.push_back({{"line", l.line}, {"reason", "json: " + l.error}});
    }
  }
  const CurateResult r = curate(pairs, c.jobs);
  for (const auto& rej : r.rejected) {
    nlohmann::json j{{"line", line_of[rej.position]}, {"reason", rej.reason}};
    if (rej.pair.id) j["id"] = *rej.pair.id;
    if (rej.violation) j["violation"] = std::string(to_string(*rej.violation));
    rejects.push_back(std::move(j));
  }
  std::sort(rejects.begin(), rejects.end(),
            [](const auto& x, const auto& y) { return x["line"].template get<std::size_t>() < y["line"].template get<std::size_t>(); });

  auto out = open_out(a.output);
  write_jsonl(out, r.kb);
  if (!a.reject_log.empty()) {
    auto log = open_out(a.reject_log);
    for (const auto& j : rejects) log << j.dump() << '\n';
  }
  if (ov.json) {
    std::cout << nlohmann::json{{"input_lines", lines.size()}, {"accepted", r.kb.size()}, {"rejected", rejects.size()}}.dump()
              << '\n';
  } else {
    std::cout << "accepted " << r.kb.size() << ", rejected " << rejects.size() << " of " << lines.size() << " lines\n";
    for (const auto& j : rejects)
      std::cout << "  line " << j["line"].get<std::size_t>() << ": " << j["reason"].get<std::string>() << '\n';
  }
  return kOk;
}

// --- index ----------------------------------------------------------------------

struct IndexArgs {
  std::string input, output;
};

int run_index(const Overrides& ov, const IndexArgs& a) {
  const RunConfig c = ov.resolve();
  const auto kb = load_kb(a.input);
  if (kb.empty()) throw EmptyIndex();
  auto embedder = make_embedder(c);
  const Index idx = build_kb_index(kb, *embedder, std::min(c.nlist, kb.size()), c.seed);
  idx.persist(a.output);
  if (ov.json)
    std::cout << nlohmann::json{{"entries", idx.size()}, {"dim", idx.dim()}, {"nlist", idx.nlist()}, {"provider", embedder->id()}}.dump()
              << '\n';
  else
    std::cout << "indexed " << idx.size() << " entries (dim " << idx.dim() << ", nlist " << idx.nlist() << ") into "
              << a.output << '\n';
  return kOk;
}

// --- generate ---------------------------------------------------------------------

struct GenerateArgs {
  std::string target, output;
};

int run_generate(const Overrides& ov, const GenerateArgs& a) {
  const RunConfig c = ov.resolve();
  std::vector<KbEntry> kb;
  std::optional<Index> idx;
  std::unique_ptr<EmbeddingProvider> embedder;
  if (c.k > 0) {
    if (c.kb_path.empty() || c.index_path.empty()) throw InvalidArgument("k > 0 needs --kb and --index");
    kb = load_kb(c.kb_path);
    idx = Index::load(c.index_path);
    embedder = make_embedder(c);
  }
  auto llm = make_llm(c);

  const std::string text = read_file(a.target);
  ParseOptions po;
  po.source_name = a.target;
  const auto blocks = extract_blocks(parse_source(text, po), text);

  Pipeline p;
  p.knowledge = kb;
  p.index = idx ? &*idx : nullptr;
  p.embedder = embedder.get();
  p.llm = llm.get();
  p.generation = c.generation;
  p.k = c.k;
  p.prompt_template = make_template(c);

  const auto results = detail::parallel_map(blocks.size(), c.jobs, [&](std::size_t i) { return generate_for_block(p, blocks[i]); });

  std::ostringstream body;
  nlohmann::json summary = nlohmann::json::array();
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    const auto& r = results[i];
    const std::string block_id = b.module_name + "#" + std::to_string(b.index);
    std::string exemplars;
    for (const auto& id : r.exemplar_ids) exemplars += (exemplars.empty() ? "" : ",") + id;
    body << "// block " << block_id << " paths=" << r.path_count << " exemplars=" << (exemplars.empty() ? "-" : exemplars)
         << " accepted=" << r.accepted.size() << "/" << r.candidates.size() << '\n';
    for (const auto& s : r.accepted) body << s;
    body << '\n';
    summary.push_back({{"block", block_id},
                       {"path_count", r.path_count},
                       {"exemplars", r.exemplar_ids},
                       {"candidates", r.candidates.size()},
                       {"accepted", r.accepted},
                       {"retries", r.retries}});
  }
  if (!a.output.empty()) {
    auto out = open_out(a.output);
    out << body.str();
  }
  if (ov.json) {
    std::cout << nlohmann::json{{"provider", llm->id()}, {"k", c.k}, {"blocks", summary}}.dump() << '\n';
  } else if (a.output.empty()) {
    std::cout << body.str();
  } else {
    for (const auto& s : summary)
      std::cout << s["block"].get<std::string>() << ": " << s["accepted"].size() << " of " << s["candidates"].get<std::size_t>()
                << " assertions accepted, " << s["path_count"].get<std::uint64_t>() << " paths\n";
  }
  return kOk;
}

// --- eval -----------------------------------------------------------------------

struct EvalArgs {
  std::string retriever = "both";
  double rename_fraction = 0.3;
  std::size_t sample = 100;
  std::size_t count = 1000;
  std::string csv;
  bool approx = false;
  std::size_t start = 100, stop = 3000, step = 100, queries = 20;
};

void emit(const Overrides& ov, const nlohmann::json& j, const std::function<void(std::ostream&)>& table) {
  if (ov.json)
    std::cout << j.dump(2) << '\n';
  else
    table(std::cout);
}

int run_eval_retrieval(const Overrides& ov, const EvalArgs& a) {
  const RunConfig c = ov.resolve();
  if (c.kb_path.empty()) throw InvalidArgument("eval retrieval needs --kb");
  const auto kb = load_kb(c.kb_path);
  auto embedder = make_embedder(c);
  RetrievalEvalConfig cfg;
  cfg.n_values = c.n_values;
  cfg.rename_fraction = a.rename_fraction;
  cfg.sample_size = a.sample;
  cfg.seed = c.seed;
  cfg.nlist = a.approx ? c.nlist : 0;
  cfg.nprobe = c.nprobe;
  cfg.jobs = c.jobs;
  std::vector<RetrievalReport> reports;
  if (a.retriever == "both" || a.retriever == "structural")
    reports.push_back(run_retrieval_eval(kb, cfg, Retriever::Structural, *embedder));
  if (a.retriever == "both" || a.retriever == "semantic")
    reports.push_back(run_retrieval_eval(kb, cfg, Retriever::SemanticBaseline, *embedder));
  if (!a.csv.empty()) {
    auto out = open_out(a.csv);
    for (const auto& r : reports) write_csv(out, r);
  }
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : reports) j.push_back(to_json(r));
  emit(ov, j, [&](std::ostream& o) { write_table(o, reports); });
  return kOk;
}

int run_eval_generation(const Overrides& ov, const EvalArgs& a) {
  const RunConfig c = ov.resolve();
  if (c.kb_path.empty()) throw InvalidArgument("eval generation needs --kb");
  const auto kb = load_kb(c.kb_path);
  auto split = stratified_split(kb, c.seed);
  // shuffle before truncating so every stratum can show up in the sample
  detail::Rng rng(c.seed ^ 0x9e3779b97f4a7c15ull);
  rng.shuffle(split.query);
  if (split.query.size() > a.sample) split.query.resize(a.sample);

  auto embedder = make_embedder(c);
  auto llm = make_llm(c);
  std::optional<Index> idx;
  if (c.k > 0) idx = build_kb_index(split.knowledge, *embedder);
  Pipeline p;
  p.knowledge = split.knowledge;
  p.index = idx ? &*idx : nullptr;
  p.embedder = embedder.get();
  p.llm = llm.get();
  p.generation = c.generation;
  p.k = c.k;
  p.prompt_template = make_template(c);
  const auto rep = run_generation_eval(split.query, p, *embedder, c.jobs);
  if (!a.csv.empty()) {
    auto out = open_out(a.csv);
    write_csv(out, rep);
  }
  emit(ov, to_json(rep), [&](std::ostream& o) { write_table(o, rep); });
  return kOk;
}

int run_eval_collision(const Overrides& ov, const EvalArgs& a) {
  const RunConfig c = ov.resolve();
  const auto rep = run_collision_experiment(a.count, c.seed);
  emit(ov, to_json(rep), [&](std::ostream& o) {
    o << "blocks " << rep.blocks << ", colliding " << rep.colliding << ", rate " << detail::fixed(rep.rate * 100.0, 2) << "%\n";
    for (const auto& [fp, n] : rep.worst) o << "  " << n << " x " << fp << '\n';
  });
  return kOk;
}

int run_eval_runtime(const Overrides& ov, const EvalArgs& a) {
  const RunConfig c = ov.resolve();
  std::vector<KbEntry> corpus;
  if (!c.kb_path.empty()) {
    corpus = load_kb(c.kb_path);
  } else {
    corpus = curate(generate_synthetic_corpus(uniform_spec(static_cast<int>(a.stop)), c.seed), c.jobs).kb;
  }
  auto embedder = make_embedder(c);
  RuntimeConfig rc;
  rc.start = a.start;
  rc.stop = a.stop;
  rc.step = a.step;
  rc.queries = a.queries;
  rc.nlist = c.nlist;
  rc.nprobe = c.nprobe;
  rc.seed = c.seed;
  const auto pts = run_runtime_sweep(corpus, *embedder, rc);
  if (!a.csv.empty()) {
    auto out = open_out(a.csv);
    out << "size,raw_us,exact_us,approx_us\n";
    for (const auto& p : pts) out << p.size << ',' << p.raw_us << ',' << p.exact_us << ',' << p.approx_us << '\n';
  }
  emit(ov, to_json(pts), [&](std::ostream& o) { write_table(o, pts); });
  return kOk;
}

// --- synth ------------------------------------------------------------------------

struct SynthArgs {
  std::string output;
  int per_stratum = 10;
  std::size_t max_paths = 8;
};

int run_synth(const Overrides& ov, const SynthArgs& a) {
  const RunConfig c = ov.resolve();
  std::vector<std::pair<StratumKey, int>> spec;
  for (const auto& k : satisfiable_strata()) spec.push_back({k, a.per_stratum});
  SyntheticOptions so;
  so.max_paths = a.max_paths;
  const auto pairs = generate_synthetic_corpus(spec, c.seed, so);
  auto out = open_out(a.output);
  for (const auto& p : pairs) out << to_json(p).dump() << '\n';
  if (ov.json)
    std::cout << nlohmann::json{{"pairs", pairs.size()}}.dump() << '\n';
  else
    std::cout << "wrote " << pairs.size() << " synthetic pairs to " << a.output << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-aware retrieval and path-guided assertion generation for Verilog RTL"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides ov;
  app.add_option("--config", ov.config_path, "TOML-style config file; flags override it")->check(CLI::ExistingFile);
  app.add_flag("--json", ov.json, "Machine-readable output");
  app.add_option("--seed", ov.seed, "Seed for every random choice");
  app.add_option("--jobs", ov.jobs, "Worker threads (0 = logical cores)");
  app.add_option("--provider", ov.provider, "LLM provider: mock:perfect|mock:lossy:P|mock:garbled:P|mock:echo-paths|remote");
  app.add_option("--base-url", ov.base_url, "Remote LLM base URL");
  app.add_option("--model", ov.model, "Remote model id");
  app.add_option("--embedder", ov.embedder, "Embedding provider: hash|remote");
  app.add_option("--embed-url", ov.embed_url, "Remote embedding endpoint");
  app.add_option("--template", ov.template_path, "Prompt template file");
  app.add_option("--temperature", ov.temperature, "Decoding temperature");
  app.add_option("--max-tokens", ov.max_tokens, "Completion token cap");
  app.add_option("--retries", ov.retries, "Retry budget for transient provider errors");
  app.add_option("--nlist", ov.nlist, "IVF cells");
  app.add_option("--nprobe", ov.nprobe, "IVF cells probed per query");
  app.add_option("--n-values", ov.n_values, "Cutoffs for Recall/MRR/nDCG")->delimiter(',');

  CurateArgs ca;
  auto* curate_cmd = app.add_subcommand("curate", "Validate raw (rtl, sva) pairs into a knowledge base");
  curate_cmd->add_option("input", ca.input, "Raw JSONL with at least {rtl, sva}")->required();
  curate_cmd->add_option("-o,--output", ca.output, "Knowledge base JSONL")->required();
  curate_cmd->add_option("--reject-log", ca.reject_log, "JSONL log of rejected lines");

  IndexArgs ia;
  auto* index_cmd = app.add_subcommand("index", "Embed fingerprints and persist a vector index");
  index_cmd->add_option("kb", ia.input, "Knowledge base JSONL")->required();
  index_cmd->add_option("-o,--output", ia.output, "Index file")->required();
  // `index --provider hash|remote` names the embedding provider
  std::optional<std::string> index_provider;
  index_cmd->add_option("--provider", index_provider, "Embedding provider: hash|remote");

  GenerateArgs ga;
  auto* gen_cmd = app.add_subcommand("generate", "Generate assertions for every always block of a Verilog file");
  gen_cmd->add_option("target", ga.target, "Verilog source")->required();
  gen_cmd->add_option("--kb", ov.kb_path, "Knowledge base JSONL");
  gen_cmd->add_option("--index", ov.index_path, "Index file built from the same knowledge base");
  gen_cmd->add_option("-k", ov.k, "Exemplars per prompt (0 = zero-shot)");
  gen_cmd->add_option("--provider", ov.provider, "LLM provider");
  gen_cmd->add_option("-o,--output", ga.output, "Output file (stdout when omitted)");

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "Run an evaluation experiment");
  eval_cmd->require_subcommand(1);
  eval_cmd->fallthrough();
  auto* ret_cmd = eval_cmd->add_subcommand("retrieval", "Recall/MRR/nDCG with and without identifier renaming");
  ret_cmd->add_option("--kb", ov.kb_path, "Knowledge base JSONL")->required();
  ret_cmd->add_option("--retriever", ea.retriever, "structural|semantic|both")
      ->check(CLI::IsMember({"structural", "semantic", "both"}));
  ret_cmd->add_option("--rename", ea.rename_fraction, "Fraction of identifiers renamed")->check(CLI::Range(0.0, 1.0));
  ret_cmd->add_option("--sample", ea.sample, "Query modules drawn from the knowledge base");
  ret_cmd->add_flag("--approx", ea.approx, "Search IVF cells instead of scanning");
  ret_cmd->add_option("--csv", ea.csv, "Per-query CSV");
  auto* gen_eval_cmd = eval_cmd->add_subcommand("generation", "Syntax, BLEU, similarity and path coverage on a query split");
  gen_eval_cmd->add_option("--kb", ov.kb_path, "Knowledge base JSONL")->required();
  gen_eval_cmd->add_option("-k", ov.k, "Exemplars per prompt");
  gen_eval_cmd->add_option("--provider", ov.provider, "LLM provider");
  gen_eval_cmd->add_option("--sample", ea.sample, "Query entries evaluated")->default_val(200);
  gen_eval_cmd->add_option("--csv", ea.csv, "Per-entry CSV");
  auto* col_cmd = eval_cmd->add_subcommand("collision", "Fingerprint collisions among structurally distinct blocks");
  col_cmd->add_option("--count", ea.count, "Distinct blocks");
  auto* rt_cmd = eval_cmd->add_subcommand("runtime", "Query latency of raw-string, exact and IVF search vs. corpus size");
  rt_cmd->add_option("--kb", ov.kb_path, "Corpus (synthetic when omitted)");
  rt_cmd->add_option("--start", ea.start);
  rt_cmd->add_option("--stop", ea.stop);
  rt_cmd->add_option("--step", ea.step);
  rt_cmd->add_option("--queries", ea.queries, "Queries per size");
  rt_cmd->add_option("--csv", ea.csv, "CSV output");

  SynthArgs sa;
  auto* synth_cmd = app.add_subcommand("synth", "Write a stratified synthetic (rtl, sva) corpus");
  synth_cmd->add_option("-o,--output", sa.output, "Raw JSONL")->required();
  synth_cmd->add_option("--per-stratum", sa.per_stratum, "Pairs per stratum")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--max-paths", sa.max_paths, "Largest path count in the 8+ bucket")->check(CLI::Range(8, 64));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (index_provider) ov.embedder = index_provider;
    if (*curate_cmd) return run_curate(ov, ca);
    if (*index_cmd) return run_index(ov, ia);
    if (*synth_cmd) return run_synth(ov, sa);
    if (*gen_cmd) return run_generate(ov, ga);
    if (*ret_cmd) return run_eval_retrieval(ov, ea);
    if (*gen_eval_cmd) return run_eval_generation(ov, ea);
    if (*col_cmd) return run_eval_collision(ov, ea);
    if (*rt_cmd) return run_eval_runtime(ov, ea);
  } catch (const ProviderFailure& e) {
    std::cerr << "stellar: " << e.what() << '\n';
    return kProvider;
  } catch (const std::exception& e) {
    std::cerr << "stellar: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
