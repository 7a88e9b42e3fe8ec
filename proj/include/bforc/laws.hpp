#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace bforc {

/// Temperature-dependent viscosity and thermal diffusivity with their global
/// bounds and Lipschitz constants, plus the drag exponent s in [3, 4]. The
/// derivative callbacks feed the manufactured forcing terms.
struct MaterialLaws {
  std::function<double(double)> nu;
  std::function<double(double)> nu_prime;
  double nu_lower = 0.0;
  double nu_upper = 0.0;
  double nu_lipschitz = 0.0;

  std::function<double(double)> kappa;
  std::function<double(double)> kappa_prime;
  double kappa_lower = 0.0;
  double kappa_upper = 0.0;
  double kappa_lipschitz = 0.0;

  double s = 3.0;
};

/// Drag weight |w|^(s-2), with the zero branch handled explicitly so that
/// fractional exponents like s = 7/2 work uniformly.
inline double forchheimer_weight(double speed, double s) {
  if (speed <= 0.0) return 0.0;
  return std::exp((s - 2.0) * std::log(speed));
}

/// Check the stated coefficient bounds by sampling the callbacks on
/// [-10, 10]. Throws when a sample escapes its declared range.
inline void validate_law_bounds(const MaterialLaws& laws, int samples = 10000) {
  if (!(laws.s >= 3.0 && laws.s <= 4.0)) throw std::invalid_argument("material laws: s must lie in [3, 4]");
  for (int i = 0; i < samples; ++i) {
    const double r = -10.0 + 20.0 * static_cast<double>(i) / static_cast<double>(samples - 1);
    const double nv = laws.nu(r);
    const double kv = laws.kappa(r);
    if (!std::isfinite(nv) || nv < laws.nu_lower || nv > laws.nu_upper) {
      throw std::invalid_argument("material laws: nu escapes its stated bounds");
    }
    if (!std::isfinite(kv) || kv < laws.kappa_lower || kv > laws.kappa_upper) {
      throw std::invalid_argument("material laws: kappa escapes its stated bounds");
    }
  }
}

}  // namespace bforc
