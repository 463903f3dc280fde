#pragma once

#include <array>
#include <set>
#include <string>
#include <string_view>

#include "stellar/detail/random.hpp"
#include "stellar/lexer.hpp"

namespace stellar::detail {

// Signal-name stems in the style of open RTL corpora: a word plus a numeric
// suffix, e.g. `rx_14`, `status_register_status_10`.
inline constexpr std::array<std::string_view, 40> kSignalStems = {
    "rx",        "tx",         "core",      "cfg",        "sig",     "hw",        "data",
    "addr",      "status_register_status",  "interrupt_control",   "fifo_level", "wr_ptr",
    "rd_ptr",    "state",      "count",     "mode",       "flag",    "irq",       "bus",
    "req",       "ack",        "grant",     "valid",      "ready",   "err",       "ctrl",
    "timer",     "dout",       "din",       "opcode",     "result",  "acc",       "shift_reg",
    "parity",    "enable",     "load",      "done",       "busy",    "pending",   "credit"};

inline std::string random_signal_name(Rng& rng, int max_suffix = 20) {
  return std::string(kSignalStems[rng.below(kSignalStems.size())]) + "_" +
         std::to_string(rng.below(static_cast<std::uint64_t>(max_suffix)));
}

// Draws names until one is not in `taken` (and not reserved), then records it.
inline std::string fresh_signal_name(Rng& rng, std::set<std::string>& taken) {
  for (int attempt = 0;; ++attempt) {
    std::string n = random_signal_name(rng, attempt < 64 ? 20 : 1000);
    if (is_reserved_word(n) || taken.count(n)) continue;
    taken.insert(n);
    return n;
  }
}

}  // namespace stellar::detail
