#include "occopt/objective.hpp"

#include <algorithm>
#include <cmath>

namespace occopt {

Objective::Objective(Occupation occupation, std::optional<SystemParams> system)
    : occupation_(std::move(occupation)), system_(system) {}

Objective Objective::closed_form(const SystemParams& params, ClosedFormMode mode) {
  params.validate();
  return Objective(
      [params, mode](double theta, double t) {
        return rho22_closed_form(params, theta, t, mode);
      },
      params);
}

Objective Objective::zero() {
  return Objective([](double, double) { return 0.0; });
}

double Objective::gradient(double theta, double t) const {
  const double h = 1e-6 * std::max(1.0, std::abs(theta));
  return (occupation_(theta + h, t) - occupation_(theta - h, t)) / (2.0 * h);
}

double Objective::curvature(double theta, double t) const {
  const double h = 1e-4 * std::max(1.0, std::abs(theta));
  return (occupation_(theta + h, t) - 2.0 * occupation_(theta, t) + occupation_(theta - h, t)) /
         (h * h);
}

double objective_gradient(const SystemParams& params, double theta, double t,
                          ClosedFormMode mode) {
  return Objective::closed_form(params, mode).gradient(theta, t);
}

}  // namespace occopt
