#pragma once

#include <cstdint>

namespace rcv {

/// Per-thread invocation counters for the server-side primitives whose
/// count per ballot is independent of the number of options.
struct OpCounters {
  std::uint64_t pet_runs = 0;
  std::uint64_t cca2_decryptions = 0;
  std::uint64_t threshold_decryptions = 0;
};

OpCounters& op_counters();
void reset_op_counters();

}  // namespace rcv
