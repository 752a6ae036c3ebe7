#include "core/rng.hpp"

#include <cmath>

namespace termstrip {

double CounterRng::normal(double mean, double sigma) {
  // u1 is mapped away from 0 so the log is finite.
  double u1 = uniform();
  double u2 = uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * 3.14159265358979323846 * u2;
  return mean + sigma * r * std::cos(theta);
}

}  // namespace termstrip
