#pragma once

#include <cctype>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stellar/error.hpp"
#include "stellar/kb.hpp"
#include "stellar/pathcount.hpp"
#include "stellar/rtl_parser.hpp"
#include "stellar/vindex.hpp"

namespace stellar {

// Keep in sync with templates/default_prompt.txt (a test compares them).
inline constexpr std::string_view kDefaultPromptTemplate =
    "You are a hardware verification expert generating SystemVerilog Assertions (SVA) for Verilog RTL.\n"
    "Each example pairs an RTL module with assertions written for it. Follow their structure.\n"
    "\n"
    "{{EXAMPLES}}Target RTL:\n"
    "```verilog\n"
    "{{TARGET_RTL}}```\n"
    "\n"
    "CRITICAL INSTRUCTION: Target code has {{EXEC_PATHS}} execution paths. You must generate exactly "
    "{{EXEC_PATHS}} assertions, one for each path.\n"
    "\n"
    "Write each assertion as `property <name>; ... endproperty` and put all of them in one ```systemverilog "
    "block.\n";

inline std::string critical_instruction(std::uint64_t paths) {
  const std::string n = std::to_string(paths);
  return "CRITICAL INSTRUCTION: Target code has " + n + " execution paths. You must generate exactly " + n +
         " assertions, one for each path.";
}

class PromptTemplate {
 public:
  PromptTemplate() : PromptTemplate(std::string(kDefaultPromptTemplate)) {}

  // Requires {{EXAMPLES}} and {{TARGET_RTL}} once each and the instruction
  // sentence with {{EXEC_PATHS}} in both slots exactly once.
  explicit PromptTemplate(std::string text) : text_(std::move(text)) {
    for (const char* ph : {"{{EXAMPLES}}", "{{TARGET_RTL}}"})
      if (count(text_, ph) != 1) throw TemplateError(std::string("template must contain ") + ph + " exactly once");
    const std::string sentence =
        "CRITICAL INSTRUCTION: Target code has {{EXEC_PATHS}} execution paths. You must generate exactly "
        "{{EXEC_PATHS}} assertions, one for each path.";
    if (count(text_, sentence) != 1 || count(text_, "{{EXEC_PATHS}}") != 2)
      throw TemplateError("template must contain the CRITICAL INSTRUCTION sentence exactly once");
    if (count(text_, "CRITICAL INSTRUCTION") != 1)
      throw TemplateError("template repeats the CRITICAL INSTRUCTION");
  }

  static PromptTemplate load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read template " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return PromptTemplate(ss.str());
  }

  const std::string& text() const { return text_; }

  // One scan over the template, so substituted text is never rescanned.
  std::string render(std::string_view examples, std::string_view target, std::uint64_t paths) const {
    const std::string n = std::to_string(paths);
    const std::pair<std::string_view, std::string_view> subs[] = {
        {"{{EXAMPLES}}", examples}, {"{{TARGET_RTL}}", target}, {"{{EXEC_PATHS}}", n}};
    std::string out;
    std::size_t i = 0;
    while (i < text_.size()) {
      bool replaced = false;
      for (const auto& [ph, value] : subs)
        if (text_.compare(i, ph.size(), ph) == 0) {
          out += value;
          i += ph.size();
          replaced = true;
          break;
        }
      if (!replaced) out += text_[i++];
    }
    return out;
  }

 private:
  static std::size_t count(std::string_view hay, std::string_view needle) {
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + needle.size())) ++n;
    return n;
  }

  std::string text_;
};

struct Exemplar {
  std::string id;
  std::string rtl_text;
  std::string sva_text;
};

struct PromptBundle {
  std::vector<Exemplar> exemplars;  // retrieval-rank order
  std::string target_rtl;
  std::uint64_t exec_path_count = 1;
  std::string rendered;
};

namespace detail {
inline std::string with_newline(std::string s) {
  if (s.empty() || s.back() != '\n') s += '\n';
  return s;
}
}  // namespace detail

// Renders the prompt for `target` from the first k hits. Fewer than k hits
// means fewer sections; nothing is padded.
inline PromptBundle build_prompt(std::span<const SearchHit> hits, std::span<const KbEntry> kb, const RtlBlock& target,
                                 std::size_t k, const PromptTemplate& tpl = PromptTemplate()) {
  std::map<std::string_view, const KbEntry*> by_id;
  for (const auto& e : kb) by_id.emplace(e.id, &e);

  PromptBundle b;
  b.target_rtl = standalone_module(target);
  b.exec_path_count = path_count(*target.block.body);
  std::string examples;
  for (std::size_t i = 0; i < hits.size() && i < k; ++i) {
    auto it = by_id.find(hits[i].id);
    if (it == by_id.end()) throw UnresolvedHit(hits[i].id);
    const KbEntry& e = *it->second;
    b.exemplars.push_back({e.id, e.rtl_text, e.sva_text});
    const std::string n = std::to_string(i + 1);
    examples += "Example " + n + " — RTL:\n```verilog\n" + detail::with_newline(e.rtl_text) + "```\n";
    examples += "Example " + n + " — SVA:\n```systemverilog\n" + detail::with_newline(e.sva_text) + "```\n\n";
  }
  b.rendered = tpl.render(examples, detail::with_newline(b.target_rtl), b.exec_path_count);
  return b;
}

namespace detail {

inline bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

inline bool word_at(std::string_view s, std::size_t pos, std::string_view w) {
  if (s.compare(pos, w.size(), w) != 0) return false;
  if (pos > 0 && ident_char(s[pos - 1])) return false;
  const std::size_t end = pos + w.size();
  return end >= s.size() || !ident_char(s[end]);
}

inline std::size_t skip_space(std::string_view s, std::size_t pos) {
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  return pos;
}

inline std::size_t skip_ident(std::string_view s, std::size_t pos) {
  if (pos >= s.size() || !(std::isalpha(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) return pos;
  while (pos < s.size() && ident_char(s[pos])) ++pos;
  return pos;
}

// Start of an optional `label :` directly before `pos` on the same line.
inline std::size_t label_start(std::string_view s, std::size_t pos) {
  std::size_t i = pos;
  while (i > 0 && (s[i - 1] == ' ' || s[i - 1] == '\t')) --i;
  if (i == 0 || s[i - 1] != ':') return pos;
  --i;
  while (i > 0 && (s[i - 1] == ' ' || s[i - 1] == '\t')) --i;
  std::size_t j = i;
  while (j > 0 && ident_char(s[j - 1])) --j;
  if (j == i || std::isdigit(static_cast<unsigned char>(s[j]))) return pos;
  return j;
}

}  // namespace detail

// Pulls every `property <id>; ... endproperty` and `[label:] assert|assume|cover
// property (...);` span out of free-form model output, in order. Spans are
// returned verbatim; validity is judged downstream.
inline std::vector<std::string> parse_llm_output(std::string_view raw) {
  using namespace detail;
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < raw.size()) {
    if (word_at(raw, i, "property")) {
      const std::size_t name = skip_space(raw, i + 8);
      const std::size_t after = skip_ident(raw, name);
      const std::size_t semi = skip_space(raw, after);
      if (after > name && semi < raw.size() && raw[semi] == ';') {
        std::size_t end = raw.find("endproperty", semi);
        while (end != std::string_view::npos && !word_at(raw, end, "endproperty")) end = raw.find("endproperty", end + 1);
        if (end != std::string_view::npos) {
          out.emplace_back(raw.substr(i, end + 11 - i));
          i = end + 11;
          continue;
        }
      }
    } else if (word_at(raw, i, "assert") || word_at(raw, i, "assume") || word_at(raw, i, "cover")) {
      const std::size_t kw_end = i + (raw[i] == 'c' ? 5 : 6);
      const std::size_t prop = skip_space(raw, kw_end);
      if (word_at(raw, prop, "property")) {
        const std::size_t open = skip_space(raw, prop + 8);
        if (open < raw.size() && raw[open] == '(') {
          int depth = 0;
          std::size_t j = open;
          for (; j < raw.size(); ++j) {
            if (raw[j] == '(') ++depth;
            else if (raw[j] == ')' && --depth == 0) break;
            else if (raw[j] == '\n' && raw.compare(j, 4, "\n```") == 0) break;
          }
          std::size_t end;
          if (j < raw.size() && raw[j] == ')') {
            end = skip_space(raw, j + 1);
            end = end < raw.size() && raw[end] == ';' ? end + 1 : j + 1;
          } else {
            // unbalanced: keep the rest of the line so the checker sees the defect
            end = raw.find('\n', open);
            if (end == std::string_view::npos) end = raw.size();
          }
          const std::size_t start = label_start(raw, i);
          out.emplace_back(raw.substr(start, end - start));
          i = end;
          continue;
        }
      }
    }
    ++i;
  }
  return out;
}

}  // namespace stellar
