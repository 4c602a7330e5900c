#include "ffgrad/replicas.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ffgrad {

int replica_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace ffgrad
