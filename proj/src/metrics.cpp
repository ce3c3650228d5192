#include "rcv/metrics.hpp"

namespace rcv {

OpCounters& op_counters() {
  thread_local OpCounters counters;
  return counters;
}

void reset_op_counters() { op_counters() = OpCounters{}; }

}  // namespace rcv
