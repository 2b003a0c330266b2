#include "lorange/kalman.hpp"

#include <algorithm>
#include <cmath>

#include "lorange/errors.hpp"

namespace lorange {

void FilterParams::validate() const {
  if (!(q > 0.0)) throw ConfigError("kalman.q must be positive");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw ConfigError("kalman.gamma must be in (0,1)");
  if (!(alpha_min > 0.0 && alpha_min <= alpha_max))
    throw ConfigError("kalman alpha clip interval invalid");
  if (!(r_min > 0.0 && r_min <= r_max))
    throw ConfigError("kalman R clamp interval invalid");
  if (!(r0 >= r_min && r0 <= r_max))
    throw ConfigError("kalman.r0 must lie inside the R clamp interval");
  if (!(p0 > 0.0)) throw ConfigError("kalman.p0 must be positive");
}

FilterState init_filter(double z0, const FilterParams& params) {
  FilterState s;
  s.x = z0;
  s.p = params.p0;
  s.r = params.r0;
  s.initialized = true;
  return s;
}

double filter_step(FilterState& state, double z, const FilterParams& params) {
  if (!std::isfinite(z)) {
    ++state.dropped;
    return state.x;
  }
  if (!state.initialized) {
    state = init_filter(z, params);
    return state.x;
  }
  // Random-walk predict.
  const double x_prior = state.x;
  const double p_prior = state.p + params.q;
  const double nu = z - x_prior;

  const double r_prev = state.r;
  double alpha = nu * nu / (p_prior + r_prev);
  alpha = std::clamp(alpha, params.alpha_min, params.alpha_max);
  double r_new = params.gamma * r_prev + (1.0 - params.gamma) * alpha * r_prev;
  r_new = std::clamp(r_new, params.r_min, params.r_max);

  const double r_gain = params.gain_uses_prev_r ? r_prev : r_new;
  const double k = p_prior / (p_prior + r_gain);

  state.x = x_prior + k * nu;
  state.p = (1.0 - k) * p_prior;
  state.r = r_new;
  state.k_last = k;
  state.alpha_last = alpha;
  ++state.steps;
  return state.x;
}

std::vector<double> filter_series(std::span<const double> z,
                                  const FilterParams& params) {
  std::vector<double> out;
  out.reserve(z.size());
  FilterState state;
  for (const double zi : z) {
    if (!state.initialized) {
      if (std::isfinite(zi)) {
        state = init_filter(zi, params);
        out.push_back(state.x);
      } else {
        // Nothing to smooth with yet; emit the value as-is.
        ++state.dropped;
        out.push_back(zi);
      }
      continue;
    }
    out.push_back(filter_step(state, zi, params));
  }
  return out;
}

}  // namespace lorange
