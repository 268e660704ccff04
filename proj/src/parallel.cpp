#include "airslice/parallel.hpp"

#include <omp.h>
#include <stdexcept>

namespace airslice {

int resolve_jobs(int jobs) {
  if (jobs < 0) throw std::invalid_argument("jobs must be >= 0");
  return jobs == 0 ? omp_get_max_threads() : jobs;
}

}  // namespace airslice
