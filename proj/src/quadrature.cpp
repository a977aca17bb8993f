#include "fpt/quadrature.hpp"

#include <map>
#include <mutex>
#include <numbers>

#include "fpt/error.hpp"

namespace fpt::quad {
namespace {

// Newton iteration on orthonormal Hermite polynomials with the classical
// starting guesses for the largest roots.
std::vector<Node> build_hermite(int n) {
  const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
  std::vector<Node> half(static_cast<std::size_t>((n + 1) / 2));
  double z = 0.0;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * half[0].x;
    else if (i == 3)
      z = 1.91 * z - 0.91 * half[1].x;
    else
      z = 2.0 * z - half[static_cast<std::size_t>(i - 2)].x;
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double step = p1 / pp;
      z -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    half[static_cast<std::size_t>(i)] = {z, 2.0 / (pp * pp)};
  }
  std::vector<Node> nodes;
  nodes.reserve(static_cast<std::size_t>(n));
  for (const auto& node : half) nodes.push_back(node);
  for (int i = n / 2 - 1; i >= 0; --i) {
    const auto& node = half[static_cast<std::size_t>(i)];
    nodes.push_back({-node.x, node.w});
  }
  std::sort(nodes.begin(), nodes.end(),
            [](const Node& a, const Node& b) { return a.x < b.x; });
  return nodes;
}

}  // namespace

const std::vector<Node>& gauss_hermite(int n) {
  require(n >= 1 && n <= 512, "gauss_hermite: node count must be in [1, 512]");
  static std::mutex mutex;
  static std::map<int, std::vector<Node>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_hermite(n)).first;
  return it->second;
}

}  // namespace fpt::quad
