// Library walkthrough: build a knowledge base, index it, and generate
// assertions for every always block in a Verilog file.

#include <fstream>
#include <iostream>
#include <sstream>

#include "stellar/stellar.hpp"

int main(int argc, char** argv) {
  using namespace stellar;
  const std::string path = argc > 1 ? argv[1] : std::string(STELLAR_SAMPLE_DIR) + "/counter.v";
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot read " << path << '\n';
    return 2;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();

  std::vector<std::pair<StratumKey, int>> spec;
  for (const auto& key : satisfiable_strata()) spec.push_back({key, 6});
  const CurateResult curated = curate(generate_synthetic_corpus(spec, 1));
  std::cout << "knowledge base: " << curated.kb.size() << " entries\n";

  HashEmbedder embedder;
  const Index index = build_kb_index(curated.kb, embedder);
  MockProvider llm;

  Pipeline p;
  p.knowledge = curated.kb;
  p.index = &index;
  p.embedder = &embedder;
  p.llm = &llm;

  for (const RtlBlock& block : extract_blocks(parse_source(text), text)) {
    const Fingerprint fp = fingerprint(block);
    const GenerationResult r = generate_for_block(p, block);
    std::cout << "\n== " << block.module_name << " block " << block.index << '\n'
              << "fingerprint: " << fp.full << '\n'
              << "paths: " << r.path_count << ", exemplars:";
    for (const auto& id : r.exemplar_ids) std::cout << ' ' << id;
    std::cout << '\n';
    for (const auto& s : r.accepted) std::cout << s;
    const CoverageResult cov = path_coverage(r.accepted, block);
    std::cout << "covered " << std::count(cov.per_path.begin(), cov.per_path.end(), true) << "/" << cov.per_path.size()
              << " paths\n";
  }
  return 0;
}
