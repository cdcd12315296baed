#include "confsec/parallel.hpp"

#include <cstdlib>

namespace confsec {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CONFSEC_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

}  // namespace confsec
