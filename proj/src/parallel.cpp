#include "semispec/parallel.hpp"

#include <cstdlib>
#include <string>

namespace semispec {

unsigned default_workers() {
  if (const char* env = std::getenv("SEMISPEC_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

}  // namespace semispec
