#include "screwkin/types.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace screwkin {

Tolerances Tolerances::from_env() {
  Tolerances t;
  if (const char* s = std::getenv("SCREWKIN_TOL")) {
    char* end = nullptr;
    const double scale = std::strtod(s, &end);
    if (end == s || scale <= 0.0) {
      throw std::invalid_argument("SCREWKIN_TOL must be a positive number");
    }
    t.orthonormality *= scale;
    t.loop_closure *= scale;
    t.cone *= scale;
    t.svd_rank_rel *= scale;
  }
  return t;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / i;
  // The library only ever needs small arguments; round to kill the division
  // noise so coefficients stay exact integers.
  return std::round(r);
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace screwkin
