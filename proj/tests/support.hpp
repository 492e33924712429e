#pragma once

// Helpers shared by the unit and acceptance tests.

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "occopt/el4.hpp"
#include "occopt/functionals.hpp"

namespace occopt::test_support {

struct PathFunctionals {
  double energy;
  double curvature;
  double n2;
};

// Functionals of a theta path evaluated exactly as the EL4 solver reports them.
inline PathFunctionals evaluate_path(const TimeGrid& grid, const std::vector<double>& theta,
                                     const Objective& objective) {
  const PulseGrid v(grid, differentiate(theta, grid.spacing()));
  std::vector<double> occ(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) occ[i] = objective.occupation(theta[i], grid.time(i));
  return {pulse_energy(v), pulse_curvature(v), trapezoid(occ, grid.spacing())};
}

enum class Hold { Energy, EnergyAndCurvature };

// Smooth random perturbation that keeps theta(0), theta'(0), theta'(T), theta(T),
// followed by a correction along fixed boundary-respecting shapes so that E0
// (and optionally R) return to their optimal values. Returns the perturbed n2.
inline double perturbed_n2(const EL4Solution& sol, const Objective& objective, std::mt19937_64& rng,
                           Hold hold = Hold::EnergyAndCurvature, double amplitude = 0.02, int modes = 4) {
  const TimeGrid& g = sol.theta.grid;
  const std::size_t m = g.size();
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(static_cast<std::size_t>(modes));
  for (double& x : a) x = u(rng);

  std::vector<double> base(m), b1(m), b2(m);
  const double scale = std::max(std::abs(sol.config.theta_T), 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double s = (g.time(i) - g.start()) / g.duration();
    const double bump = 16.0 * s * s * (1 - s) * (1 - s);
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * std::sin(static_cast<double>(k + 1) * M_PI * s);
    base[i] = sol.theta.theta[i] + amplitude * scale * bump * sum / static_cast<double>(modes);
    b1[i] = scale * bump;
    b2[i] = scale * bump * (s - 0.5);
  }

  const PathFunctionals target = evaluate_path(g, sol.theta.theta, objective);
  auto path = [&](const Eigen::Vector2d& c) {
    std::vector<double> th(m);
    for (std::size_t i = 0; i < m; ++i) th[i] = base[i] + c[0] * b1[i] + c[1] * b2[i];
    return th;
  };
  auto mismatch = [&](const Eigen::Vector2d& c) {
    const PathFunctionals f = evaluate_path(g, path(c), objective);
    return Eigen::Vector2d(f.energy / target.energy - 1.0,
                           hold == Hold::Energy ? 0.0 : f.curvature / target.curvature - 1.0);
  };
  const int dims = hold == Hold::Energy ? 1 : 2;

  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (int it = 0; it < 30; ++it) {
    const Eigen::Vector2d f = mismatch(c);
    if (f.cwiseAbs().maxCoeff() < 1e-12) break;
    Eigen::Matrix2d jac = Eigen::Matrix2d::Identity();
    const double h = 1e-7;
    for (int k = 0; k < dims; ++k) {
      Eigen::Vector2d e = c;
      e[k] += h;
      jac.col(k) = (mismatch(e) - f) / h;
    }
    c -= jac.fullPivLu().solve(f);
  }
  return evaluate_path(g, path(c), objective).n2;
}

}  // namespace occopt::test_support
