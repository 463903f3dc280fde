#pragma once

// Independent reference implementations used as test oracles. None of these
// call the library routine they check.

#include <string>
#include <utility>
#include <vector>

#include "stellar/rtl_ast.hpp"
#include "stellar/rtl_print.hpp"

namespace stellar::testing {

struct OraclePath {
  std::vector<std::pair<std::string, bool>> guards;  // (condition text, taken)
  int assignments = 0;
};

// Runs the statement tree under every sequence of branch decisions with an
// explicit work stack (no recursion over the tree) and records each
// terminal run.
inline std::vector<OraclePath> brute_force_paths(const Stmt& root) {
  struct State {
    std::vector<const Stmt*> pending;  // top of stack = back
    OraclePath path;
  };
  std::vector<OraclePath> done;
  std::vector<State> work;
  work.push_back(State{{&root}, {}});
  while (!work.empty()) {
    State st = std::move(work.back());
    work.pop_back();
    if (st.pending.empty()) {
      done.push_back(std::move(st.path));
      continue;
    }
    const Stmt* s = st.pending.back();
    st.pending.pop_back();
    if (const auto* b = std::get_if<Block>(&s->node)) {
      for (auto it = b->stmts.rbegin(); it != b->stmts.rend(); ++it) st.pending.push_back(it->get());
      work.push_back(std::move(st));
    } else if (const auto* i = std::get_if<If>(&s->node)) {
      const std::string cond = to_verilog(*i->cond);
      State taken = st;
      State not_taken = std::move(st);
      taken.path.guards.push_back({cond, true});
      taken.pending.push_back(i->then_stmt.get());
      not_taken.path.guards.push_back({cond, false});
      if (i->else_stmt) not_taken.pending.push_back(i->else_stmt.get());
      // LIFO: push the else side first so the then side is explored first.
      work.push_back(std::move(not_taken));
      work.push_back(std::move(taken));
    } else if (const auto* c = std::get_if<Case>(&s->node)) {
      const std::string subject = to_verilog(*c->subject);
      std::vector<State> branches;
      std::vector<std::pair<std::string, bool>> negs;
      for (const auto& item : c->items) {
        std::string match;
        for (std::size_t k = 0; k < item.labels.size(); ++k) {
          if (k) match += " || ";
          const std::string eq = subject + " == " + to_verilog(*item.labels[k]);
          match += eq;
          negs.push_back({eq, false});
        }
        State b = st;
        b.path.guards.push_back({match, true});
        b.pending.push_back(item.body.get());
        branches.push_back(std::move(b));
      }
      State d = std::move(st);
      for (const auto& n : negs) d.path.guards.push_back(n);
      if (c->default_stmt) d.pending.push_back(c->default_stmt.get());
      branches.push_back(std::move(d));
      for (auto it = branches.rbegin(); it != branches.rend(); ++it) work.push_back(std::move(*it));
    } else {
      ++st.path.assignments;
      work.push_back(std::move(st));
    }
  }
  return done;
}

}  // namespace stellar::testing
