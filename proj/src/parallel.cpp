#include "htdbu/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace htdbu {

int worker_count() {
  if (const char* env = std::getenv("HTDBU_WORKERS")) {
    try {
      int value = std::stoi(env);
      if (value > 0) return value;
    } catch (...) {
    }
  }
  return omp_get_num_procs();
}

void configure_workers() {
  omp_set_num_threads(worker_count());
  omp_set_max_active_levels(1);
}

}  // namespace htdbu
