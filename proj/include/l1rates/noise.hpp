#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "l1rates/error.hpp"
#include "l1rates/random.hpp"
#include "l1rates/spectral.hpp"

namespace l1rates {

enum class MaskShape { Contiguous, Scattered };

struct NoiseInstance {
  Eigen::VectorXd xi;
  std::vector<bool> corrupt_mask;
  double epsilon_measured = 0.0;
  double eta_measured = 0.0;
  double amplitude = 0.0;
  std::uint64_t seed = 0;
};

// (quadrature L1 norm of ξ off the mask, quadrature measure of the mask)
inline std::pair<double, double> measure(const Eigen::VectorXd& xi, const std::vector<bool>& mask, const Grid& grid) {
  if (static_cast<std::size_t>(xi.size()) != grid.size() || mask.size() != grid.size())
    throw InputError("measure: length mismatch");
  double eps = 0.0, eta = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (mask[i])
      eta += grid.weights[i];
    else
      eps += grid.weights[i] * std::abs(xi[i]);
  }
  return {eps, eta};
}

namespace detail {

inline Eigen::Vector3d embed(const Grid& grid, const Point& p) {
  switch (grid.manifold.kind) {
    case ManifoldKind::Circle: return {std::cos(p.a), std::sin(p.a), 0.0};
    case ManifoldKind::Interval: return {p.a, 0.0, 0.0};
    case ManifoldKind::Sphere: return to_cartesian(p);
  }
  return Eigen::Vector3d::Zero();
}

inline Eigen::Vector3d random_unit(Rng& rng) {
  Eigen::Vector3d v;
  do {
    v = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
  } while (v.norm() < 1e-3 || v.norm() > 1.0);
  return v.normalized();
}

}  // namespace detail

inline NoiseInstance make_impulsive(const Grid& grid, double eta, double epsilon, double amplitude, std::uint64_t seed,
                                    MaskShape shape = MaskShape::Contiguous) {
  if (!(eta >= 0.0) || !(epsilon >= 0.0) || !(amplitude >= 0.0))
    throw InputError("make_impulsive: eta, epsilon and amplitude must be non-negative");
  if (eta >= grid.manifold.measure_total()) throw InputError("make_impulsive: eta must be below the total measure");
  const std::size_t n = grid.size();
  Rng rng(seed);
  NoiseInstance out;
  out.seed = seed;
  out.amplitude = amplitude;
  out.xi = Eigen::VectorXd::Zero(n);
  out.corrupt_mask.assign(n, false);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (shape == MaskShape::Contiguous) {
    // Nodes by distance to a seeded centre node: an arc or a cap.
    const Eigen::Vector3d c = detail::embed(grid, grid.nodes[rng.below(n)]);
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::Vector3d x = detail::embed(grid, grid.nodes[i]);
      dist[i] = grid.manifold.kind == ManifoldKind::Interval ? std::abs(x.x() - c.x())
                                                              : std::acos(std::clamp(x.dot(c), -1.0, 1.0));
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
  } else {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  }
  double taken = 0.0;
  std::vector<std::size_t> added;
  for (std::size_t i : order) {
    if (taken + grid.weights[i] > eta) {
      if (shape == MaskShape::Contiguous) break;
      continue;
    }
    taken += grid.weights[i];
    out.corrupt_mask[i] = true;
    added.push_back(i);
  }
  // Summation order differs from measure(); never report more than requested.
  while (!added.empty() && measure(out.xi, out.corrupt_mask, grid).second > eta) {
    out.corrupt_mask[added.back()] = false;
    added.pop_back();
  }
  for (std::size_t i = 0; i < n; ++i)
    if (out.corrupt_mask[i]) out.xi[i] = amplitude * rng.sign();

  if (epsilon > 0.0) {
    // Smooth off-mask perturbation: three random plane waves in the embedding.
    Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
    for (int k = 1; k <= 3; ++k) {
      const Eigen::Vector3d u = detail::random_unit(rng);
      const double amp = rng.uniform(0.5, 1.0), ph = rng.uniform(0.0, 2.0 * kPi);
      for (std::size_t i = 0; i < n; ++i) s[i] += amp * std::cos(k * u.dot(detail::embed(grid, grid.nodes[i])) + ph);
    }
    double l1 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (!out.corrupt_mask[i]) l1 += grid.weights[i] * std::abs(s[i]);
    if (l1 > 0.0) {
      const double scale = epsilon / l1 * (1.0 - 1e-12);
      for (std::size_t i = 0; i < n; ++i)
        if (!out.corrupt_mask[i]) out.xi[i] = scale * s[i];
    }
  }
  const auto [e, h] = measure(out.xi, out.corrupt_mask, grid);
  out.epsilon_measured = e;
  out.eta_measured = h;
  return out;
}

}  // namespace l1rates
