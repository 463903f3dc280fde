#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "stellar/pathcount.hpp"
#include "stellar/rtl_ast.hpp"
#include "stellar/rtl_print.hpp"

namespace stellar {

// One property per execution path. The antecedent is the path condition;
// the consequent checks the last value each signal is assigned on that path.
// Clocked blocks use `|=>` against `$past(rhs)`, combinational ones `|->`.
inline std::vector<std::string> path_assertions(const AlwaysBlock& block, std::string_view name_prefix,
                                                const PathOptions& options = {}) {
  const SensitivityEntry* clock = nullptr;
  for (const auto& e : block.sensitivity.entries)
    if (e.edge == Edge::Posedge || e.edge == Edge::Negedge) {
      clock = &e;
      break;
    }
  std::string clock_text;
  if (clock) clock_text = std::string("@(") + (clock->edge == Edge::Posedge ? "posedge " : "negedge ") + clock->signal + ") ";

  std::vector<std::string> out;
  const auto paths = enumerate_path_conditions(*block.body, options);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    std::vector<std::pair<std::string, ExprPtr>> last;
    for (const auto& eff : paths[i].effects) {
      const std::string key = to_verilog(*eff.lhs);
      auto it = std::find_if(last.begin(), last.end(), [&](const auto& p) { return p.first == key; });
      ExprPtr expected = clock ? make_expr(Call{"$past", {eff.rhs}}) : eff.rhs;
      ExprPtr check = make_expr(Binary{"==", eff.lhs, expected});
      if (it == last.end()) last.emplace_back(key, check);
      else it->second = check;
    }
    ExprPtr consequent;
    for (const auto& [key, check] : last) consequent = consequent ? make_expr(Binary{"&&", consequent, check}) : check;
    if (!consequent) consequent = make_expr(Literal{1u, Base::Bin, "1", true, false});
    const ExprPtr prop = make_expr(Binary{clock ? "|=>" : "|->", path_condition(paths[i].literals), consequent});
    out.push_back("property " + std::string(name_prefix) + "_" + std::to_string(i) + ";\n  " + clock_text +
                  to_verilog(*prop) + ";\nendproperty\n");
  }
  return out;
}

}  // namespace stellar
