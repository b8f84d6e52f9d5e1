#include "dlab/parallel.hpp"

#include <atomic>

namespace dlab {

namespace {
std::atomic<unsigned> g_workers{1};
}

void set_worker_count(unsigned n) { g_workers.store(n == 0 ? 1 : n); }

unsigned worker_count() { return g_workers.load(); }

}  // namespace dlab
