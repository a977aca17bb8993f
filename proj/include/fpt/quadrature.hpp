#pragma once

// Adaptive Gauss-Kronrod (7/15) integration with global error control, plus
// the fixed Gauss-Hermite rules used for Gaussian expectations.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace fpt::quad {

struct Tolerance {
  double rel = 1e-9;
  double abs = 1e-12;
};

struct Estimate {
  double value = 0.0;
  double abs_err = 0.0;
  bool converged = false;
  std::size_t evaluations = 0;
};

struct Node {
  double x;
  double w;
};

struct Panel {
  double a;
  double b;
  double value;
  double error;
};

namespace detail {

inline constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
Panel kronrod15(F& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const double sum = f1[j] + f2[j];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }
  const double mean = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

  const double ah = std::abs(half);
  resk *= half;
  resabs *= ah;
  resasc *= ah;
  double err = std::abs((resk - resg * half));
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(50.0 * eps * resabs, err);
  if (!std::isfinite(resk)) err = std::numeric_limits<double>::infinity();
  return {a, b, resk, err};
}

inline bool splittable(const Panel& p) {
  const double scale = std::max(std::abs(p.a), std::abs(p.b));
  return (p.b - p.a) > 64.0 * std::numeric_limits<double>::epsilon() * scale &&
         std::isfinite(p.error);
}

inline double neumaier_total(const std::vector<Panel>& panels, bool values) {
  double sum = 0.0, comp = 0.0;
  for (const auto& p : panels) {
    const double v = values ? p.value : p.error;
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

}  // namespace detail

/// Global adaptive bisection: repeatedly splits the panel with the largest
/// error until the summed error meets `tol`. Returns the final panels.
template <class F>
std::vector<Panel> adapt(F&& f, double a, double b, Tolerance tol,
                         std::size_t initial_panels, std::size_t max_panels,
                         bool& converged) {
  std::vector<Panel> heap;
  std::vector<Panel> frozen;
  const std::size_t n0 = std::max<std::size_t>(initial_panels, 1);
  heap.reserve(max_panels + n0 + 2);
  for (std::size_t i = 0; i < n0; ++i) {
    const double lo = a + (b - a) * static_cast<double>(i) / n0;
    const double hi = (i + 1 == n0) ? b : a + (b - a) * static_cast<double>(i + 1) / n0;
    heap.push_back(detail::kronrod15(f, lo, hi));
  }
  auto by_error = [](const Panel& x, const Panel& y) { return x.error < y.error; };
  std::make_heap(heap.begin(), heap.end(), by_error);

  double value = 0.0, error = 0.0;
  for (const auto& p : heap) {
    value += p.value;
    error += p.error;
  }
  converged = false;
  while (true) {
    if (!std::isfinite(value) || !std::isfinite(error)) break;
    if (error <= std::max(tol.abs, tol.rel * std::abs(value))) {
      converged = true;
      break;
    }
    if (heap.empty() || heap.size() + frozen.size() >= max_panels) break;
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Panel worst = heap.back();
    heap.pop_back();
    if (!detail::splittable(worst)) {
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = detail::kronrod15(f, worst.a, mid);
    const Panel right = detail::kronrod15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
  }
  heap.insert(heap.end(), frozen.begin(), frozen.end());
  std::sort(heap.begin(), heap.end(),
            [](const Panel& x, const Panel& y) { return x.a < y.a; });
  return heap;
}

template <class F>
Estimate integrate(F&& f, double a, double b, Tolerance tol = {},
                   std::size_t initial_panels = 1, std::size_t max_panels = 2000) {
  if (a == b) return {0.0, 0.0, true, 0};
  bool converged = false;
  const auto panels = adapt(f, a, b, tol, initial_panels, max_panels, converged);
  Estimate est;
  est.value = detail::neumaier_total(panels, true);
  est.abs_err = detail::neumaier_total(panels, false);
  est.converged = converged ||
                  est.abs_err <= std::max(tol.abs, tol.rel * std::abs(est.value));
  est.evaluations = panels.size() * 15;
  return est;
}

/// Kronrod nodes and weights of the panels adapted to `f`, so that the same
/// rule can be applied to related integrands.
template <class F>
std::vector<Node> adapted_rule(F&& f, double a, double b, Tolerance tol,
                               std::size_t initial_panels = 1,
                               std::size_t max_panels = 2000) {
  bool converged = false;
  const auto panels = adapt(f, a, b, tol, initial_panels, max_panels, converged);
  std::vector<Node> nodes;
  nodes.reserve(panels.size() * 15);
  for (const auto& p : panels) {
    const double center = 0.5 * (p.a + p.b);
    const double half = 0.5 * (p.b - p.a);
    for (int j = 0; j < 7; ++j)
      nodes.push_back({center - half * detail::kXgk[j], half * detail::kWgk[j]});
    nodes.push_back({center, half * detail::kWgk[7]});
    for (int j = 6; j >= 0; --j)
      nodes.push_back({center + half * detail::kXgk[j], half * detail::kWgk[j]});
  }
  return nodes;
}

/// Integral over [a, +inf) through y = a + (1 - t) / t.
template <class F>
Estimate integrate_from(F&& f, double a, Tolerance tol = {},
                        std::size_t max_panels = 2000) {
  auto mapped = [&](double t) {
    const double s = (1.0 - t) / t;
    const double v = f(a + s);
    return v == 0.0 ? 0.0 : v / (t * t);
  };
  return integrate(mapped, 0.0, 1.0, tol, 4, max_panels);
}

/// Integral over (-inf, b] through y = b - (1 - t) / t.
template <class F>
Estimate integrate_to(F&& f, double b, Tolerance tol = {},
                      std::size_t max_panels = 2000) {
  auto mapped = [&](double t) {
    const double s = (1.0 - t) / t;
    const double v = f(b - s);
    return v == 0.0 ? 0.0 : v / (t * t);
  };
  return integrate(mapped, 0.0, 1.0, tol, 4, max_panels);
}

/// Gauss-Hermite rule for the weight exp(-x^2); nodes ascending.
const std::vector<Node>& gauss_hermite(int n);

}  // namespace fpt::quad
