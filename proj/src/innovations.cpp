#include "fpt/innovations.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fpt/error.hpp"
#include "fpt/quadrature.hpp"
#include "fpt/stable_law.hpp"
#include "law.hpp"

namespace fpt {
namespace detail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class GaussianBase final : public ContinuousBase {
 public:
  GaussianBase(double m, double var) : m_(m), var_(var), sd_(std::sqrt(var)) {}
  double density(double x) const override {
    const double z = (x - m_) / sd_;
    return std::exp(-0.5 * z * z) / (sd_ * std::sqrt(2.0 * std::numbers::pi));
  }
  double survival(double x) const override {
    return 0.5 * std::erfc((x - m_) / (sd_ * std::numbers::sqrt2));
  }
  double psi(double u) const override { return m_ * u + 0.5 * var_ * u * u; }
  double mean() const override { return m_; }
  double second_moment() const override { return var_ + m_ * m_; }
  double center() const override { return m_; }
  double spread() const override { return sd_; }
  bool light_left() const override { return true; }
  std::optional<double> log_partial_mgf(double u, double t) const override {
    if (t == kInf) return psi(u);
    const double w = (t - m_) / sd_;
    const double z = w - u * sd_;
    if (z >= -35.0) return psi(u) + log_normal_cdf(z);
    // Mills-ratio expansion, rearranged so that no term grows with u.
    const double r = 1.0 / (z * z);
    const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
    return u * t - 0.5 * w * w - std::log(-z) - 0.5 * std::log(2.0 * std::numbers::pi) +
           std::log(series);
  }

 private:
  static double log_normal_cdf(double z) {
    if (z > 0.0) return std::log1p(-0.5 * std::erfc(z / std::numbers::sqrt2));
    return std::log(0.5 * std::erfc(-z / std::numbers::sqrt2));
  }
  double m_, var_, sd_;
};

class StableBase final : public ContinuousBase {
 public:
  StableBase(double alpha, double c, double m) : law_(alpha, c, m), c_(c) {}
  double density(double x) const override { return law_.density(x); }
  double survival(double x) const override { return law_.survival(x); }
  double psi(double u) const override {
    return law_.shift() * u + c_ * std::pow(u, law_.alpha());
  }
  double mean() const override { return law_.shift(); }
  double second_moment() const override {
    return law_.alpha() == 2.0 ? 2.0 * c_ + law_.shift() * law_.shift() : kInf;
  }
  double center() const override { return law_.shift(); }
  double spread() const override { return law_.sigma(); }
  bool light_left() const override { return law_.alpha() == 2.0; }
  const StableLaw& stable() const { return law_; }

 private:
  StableLaw law_;
  double c_;
};

std::vector<Atom> merged(std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
  std::vector<Atom> out;
  for (const auto& a : atoms) {
    if (a.w <= 0.0) continue;
    if (!out.empty() && out.back().x == a.x)
      out.back().w += a.w;
    else
      out.push_back(a);
  }
  return out;
}

}  // namespace

double Law::top() const {
  double t = -kInf;
  if (!atoms.empty()) t = atoms.back().x;
  if (base) t = std::max(t, upper);
  return t;
}

double Law::atom_mass() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.w;
  return s;
}

double Law::survival(double x) const {
  double s = 0.0;
  for (const auto& a : atoms)
    if (a.x > x) s += a.w;
  if (base && x < upper)
    s += base->survival(x) - (std::isfinite(upper) ? base->survival(upper) : 0.0);
  return s;
}

double Law::mass_at_least(double x) const {
  double s = 0.0;
  for (const auto& a : atoms)
    if (a.x >= x) s += a.w;
  if (base && x < upper)
    s += base->survival(x) - (std::isfinite(upper) ? base->survival(upper) : 0.0);
  return s;
}

double integrate_density(const ContinuousBase& base, const std::function<double(double)>& g,
                         double from, double to, quad::Tolerance tol) {
  const double c = base.center();
  const double s = base.spread();
  if (base.light_left()) from = std::max(from, c - 40.0 * s);
  to = std::min(to, c + 40.0 * s);
  if (!(to > from)) return 0.0;
  auto h = [&](double y) {
    const double f = base.density(y);
    return f == 0.0 ? 0.0 : g(y) * f;
  };
  if (std::isfinite(from)) return quad::integrate(h, from, to, tol, 8, 4000).value;
  const double join = std::min(to, c);
  auto mapped = [&](double t) {
    const double y = join - s * (1.0 - t) / t;
    const double v = h(y);
    return v == 0.0 ? 0.0 : v * s / (t * t);
  };
  double total = quad::integrate(mapped, 0.0, 1.0, tol, 8, 4000).value;
  if (join < to) total += quad::integrate(h, join, to, tol, 8, 4000).value;
  return total;
}

}  // namespace detail

namespace {

using detail::Law;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::shared_ptr<const Law> discrete_law(std::vector<Atom> atoms) {
  auto law = std::make_shared<Law>();
  law->atoms = detail::merged(std::move(atoms));
  return law;
}

double psi_from_law(const Law& law, double u) {
  if (u == 0.0) return 0.0;
  const double top = law.top();
  double size = std::abs(top);
  for (const auto& a : law.atoms) size = std::max(size, std::abs(a.x));
  if (law.base) size = std::max(size, law.base->spread() + std::abs(law.base->center()));
  const quad::Tolerance tol{1e-10, 1e-300};

  if (u * size <= 0.5) {
    // log1p of E expm1(u eta) keeps full relative precision near u = 0.
    double sum = 0.0;
    for (const auto& a : law.atoms) sum += a.w * std::expm1(u * a.x);
    if (law.base) {
      const auto below = law.base->log_partial_mgf(u, law.upper);
      if (below) {
        const double mass = std::exp(*law.base->log_partial_mgf(0.0, law.upper));
        sum += mass * std::expm1(*below - std::log(mass));
        return std::log1p(sum);
      }
      sum += std::expm1(law.base->psi(u));
      if (std::isfinite(law.upper))
        sum -= detail::integrate_density(
            *law.base, [u](double y) { return std::expm1(u * y); }, law.upper, kInf, tol);
    }
    return std::log1p(sum);
  }
  double sum = 0.0;
  for (const auto& a : law.atoms) sum += a.w * std::exp(u * (a.x - top));
  if (law.base) {
    if (const auto below = law.base->log_partial_mgf(u, law.upper))
      return u * top + std::log(sum + std::exp(*below - u * top));
    quad::Tolerance shifted = tol;
    if (sum > 0.0) shifted.abs = 1e-14 * sum;
    sum += detail::integrate_density(
        *law.base, [u, top](double y) { return std::exp(u * (y - top)); }, -kInf, law.upper,
        shifted);
  }
  return u * top + std::log(sum);
}

double cap_value(double x, double cap) { return std::min(x, cap); }

double floor_value(double x, double level) {
  if (x <= 0.0) return x;
  return x >= level ? level : 0.0;
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace

InnovationSpec::InnovationSpec(Family family, std::shared_ptr<const detail::Law> law)
    : family_(std::move(family)), law_(std::move(law)) {}

InnovationSpec InnovationSpec::gaussian(double mean, double variance) {
  require(std::isfinite(mean), "gaussian: mean must be finite");
  require(variance > 0.0 && std::isfinite(variance), "gaussian: variance must be positive");
  auto law = std::make_shared<Law>();
  law->base = std::make_shared<detail::GaussianBase>(mean, variance);
  return {Gaussian{mean, variance}, law};
}

InnovationSpec InnovationSpec::deterministic(double value) {
  require(std::isfinite(value), "deterministic: value must be finite");
  return {Deterministic{value}, discrete_law({{value, 1.0}})};
}

InnovationSpec InnovationSpec::two_point(double high, double low, double p_high) {
  require(std::isfinite(high) && std::isfinite(low) && low < high,
          "two_point: requires h_down < h_up");
  require(p_high > 0.0 && p_high < 1.0, "two_point: p must lie in (0, 1)");
  return {TwoPoint{high, low, p_high}, discrete_law({{low, 1.0 - p_high}, {high, p_high}})};
}

InnovationSpec InnovationSpec::stable(double alpha, double scale, double shift) {
  require(alpha > 0.0 && alpha <= 2.0 && alpha != 1.0,
          "stable: alpha must lie in (0, 1) or (1, 2]");
  require(scale > 0.0 && std::isfinite(scale), "stable: C must be positive");
  require(std::isfinite(shift), "stable: m must be finite");
  std::shared_ptr<const Law> law;
  if (alpha > 1.0) {
    auto l = std::make_shared<Law>();
    l->base = std::make_shared<detail::StableBase>(alpha, scale, shift);
    law = l;
  }
  return {StableNegative{alpha, scale, shift}, law};
}

const detail::Law& InnovationSpec::law() const {
  if (!law_)
    fail(ErrorKind::unsupported_sampler,
         "stable law with alpha < 1 has no density or sampler here");
  return *law_;
}

std::string InnovationSpec::name() const {
  static constexpr const char* names[] = {"gaussian", "deterministic", "two_point",
                                          "stable", "capped_above", "floored_positive"};
  return names[family_.index()];
}

std::string InnovationSpec::describe() const {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Gaussian>)
          return "gaussian(m=" + num(f.mean) + ", var=" + num(f.variance) + ")";
        else if constexpr (std::is_same_v<T, Deterministic>)
          return "deterministic(c=" + num(f.value) + ")";
        else if constexpr (std::is_same_v<T, TwoPoint>)
          return "two_point(h_up=" + num(f.high) + ", h_down=" + num(f.low) +
                 ", p=" + num(f.p_high) + ")";
        else if constexpr (std::is_same_v<T, StableNegative>)
          return "stable(alpha=" + num(f.alpha) + ", C=" + num(f.scale) +
                 ", m=" + num(f.shift) + ")";
        else if constexpr (std::is_same_v<T, CappedAbove>)
          return "capped_above(" + f.base->describe() + ", H=" + num(f.cap) + ")";
        else
          return "floored_positive(" + f.base->describe() + ", N=" + num(f.level) + ")";
      },
      family_);
}

double InnovationSpec::psi(double u) const {
  require(u >= 0.0, "psi: u must be nonnegative");
  if (u == 0.0) return 0.0;
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return f.mean * u + 0.5 * f.variance * u * u;
        } else if constexpr (std::is_same_v<T, Deterministic>) {
          return f.value * u;
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
          return f.high * u + std::log1p((1.0 - f.p_high) * std::expm1(u * (f.low - f.high)));
        } else if constexpr (std::is_same_v<T, StableNegative>) {
          const double sgn = f.alpha > 1.0 ? 1.0 : -1.0;
          return f.shift * u + sgn * f.scale * std::pow(u, f.alpha);
        } else {
          return psi_from_law(*law_, u);
        }
      },
      family_);
}

bool InnovationSpec::can_sample() const {
  if (const auto* s = std::get_if<StableNegative>(&family_)) return s->alpha > 1.0;
  if (const auto* c = std::get_if<CappedAbove>(&family_)) return c->base->can_sample();
  if (const auto* f = std::get_if<FlooredPositive>(&family_)) return f->base->can_sample();
  return true;
}

double InnovationSpec::draw(Stream& rng) const {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return f.mean + std::sqrt(f.variance) * rng.normal();
        } else if constexpr (std::is_same_v<T, Deterministic>) {
          return f.value;
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
          return rng.uniform() < f.p_high ? f.high : f.low;
        } else if constexpr (std::is_same_v<T, StableNegative>) {
          if (!(f.alpha > 1.0 && f.alpha <= 2.0))
            fail(ErrorKind::unsupported_sampler, "stable sampling needs alpha in (1, 2]");
          return static_cast<const detail::StableBase&>(*law_->base).stable().draw(rng);
        } else if constexpr (std::is_same_v<T, CappedAbove>) {
          return cap_value(f.base->draw(rng), f.cap);
        } else {
          return floor_value(f.base->draw(rng), f.level);
        }
      },
      family_);
}

std::vector<double> InnovationSpec::sample(Stream& rng, std::size_t n) const {
  require(n >= 1, "sample: n must be at least 1");
  if (!can_sample())
    fail(ErrorKind::unsupported_sampler, "stable sampling needs alpha in (1, 2]");
  std::vector<double> out(n);
  for (auto& x : out) x = draw(rng);
  return out;
}

std::optional<double> InnovationSpec::upper_bound() const {
  if (const auto* s = std::get_if<StableNegative>(&family_)) {
    if (s->alpha < 1.0) return s->shift;
  }
  const double t = law().top();
  if (std::isfinite(t)) return t;
  return std::nullopt;
}

std::optional<double> InnovationSpec::mean() const {
  if (const auto* s = std::get_if<StableNegative>(&family_)) {
    if (s->alpha < 1.0) return std::nullopt;
    return s->shift;
  }
  const Law& law = *law_;
  double m = 0.0;
  for (const auto& a : law.atoms) m += a.w * a.x;
  if (law.base) {
    m += law.base->mean();
    if (std::isfinite(law.upper))
      m -= detail::integrate_density(*law.base, [](double y) { return y; }, law.upper, kInf,
                                     {1e-12, 1e-300});
  }
  return m;
}

std::optional<double> InnovationSpec::variance() const {
  const auto m = mean();
  if (!m) return std::nullopt;
  const Law& law = *law_;
  double m2 = 0.0;
  for (const auto& a : law.atoms) m2 += a.w * a.x * a.x;
  if (law.base) {
    const double full = law.base->second_moment();
    if (!std::isfinite(full)) return std::nullopt;
    m2 += full;
    if (std::isfinite(law.upper))
      m2 -= detail::integrate_density(*law.base, [](double y) { return y * y; }, law.upper,
                                      kInf, {1e-12, 1e-300});
  }
  return std::max(0.0, m2 - *m * *m);
}

double InnovationSpec::scale() const {
  if (const auto* s = std::get_if<StableNegative>(&family_)) {
    if (s->alpha < 1.0) return std::pow(s->scale, 1.0 / s->alpha);
    return law_->base->spread();
  }
  if (const auto* d = std::get_if<Deterministic>(&family_)) return std::abs(d->value);
  if (const auto v = variance()) return std::sqrt(*v);
  return law_->base->spread();
}

double InnovationSpec::survival(double x) const { return law().survival(x); }

double InnovationSpec::mass_at_least(double x) const { return law().mass_at_least(x); }

double InnovationSpec::upper_quantile(double p) const {
  const Law& law = this->law();
  if (law.discrete()) {
    for (const auto& a : law.atoms)
      if (law.survival(a.x) <= p) return a.x;
    return law.atoms.back().x;
  }
  const double c = law.base->center();
  const double s = law.base->spread();
  double hi = std::isfinite(law.top()) ? law.top() : c + s;
  while (law.survival(hi) > p) hi = c + 2.0 * (hi - c) + s;
  double lo = std::min(hi, c) - s;
  while (law.survival(lo) <= p) lo = c - 2.0 * (c - lo) - s;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * (1.0 + std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (law.survival(mid) > p ? lo : hi) = mid;
  }
  return hi;
}

bool InnovationSpec::is_discrete() const { return law_ && law_->discrete(); }

std::vector<Atom> InnovationSpec::atoms() const { return law().atoms; }

InnovationSpec InnovationSpec::simplified() const {
  if (!is_discrete()) return *this;
  const auto& a = law_->atoms;
  if (a.size() == 1) return deterministic(a[0].x);
  if (a.size() == 2) return two_point(a[1].x, a[0].x, a[1].w);
  return *this;
}

double InnovationSpec::expect(const std::function<double(double)>& g) const {
  const Law& law = this->law();
  if (const auto* gs = std::get_if<Gaussian>(&family_)) {
    const double sd = std::sqrt(2.0 * gs->variance);
    auto rule = [&](int n) {
      double s = 0.0;
      for (const auto& node : quad::gauss_hermite(n)) s += node.w * g(gs->mean + sd * node.x);
      return s / std::sqrt(std::numbers::pi);
    };
    const double v64 = rule(64);
    const double v128 = rule(128);
    if (std::abs(v64 - v128) <= 1e-10 * (1.0 + std::abs(v128))) return v64;
  }
  double total = 0.0;
  for (const auto& a : law.atoms) total += a.w * g(a.x);
  if (law.base) total += detail::integrate_density(*law.base, g, -kInf, law.upper, {1e-12, 1e-15});
  return total;
}

InnovationSpec truncate_cap_above(const InnovationSpec& spec, double cap) {
  require(std::isfinite(cap), "truncate_cap_above: H_cap must be finite");
  const Law& base = spec.law();
  auto law = std::make_shared<Law>();
  std::vector<Atom> atoms;
  for (const auto& a : base.atoms) atoms.push_back({cap_value(a.x, cap), a.w});
  if (base.base) {
    law->base = base.base;
    law->upper = base.upper;
    if (cap < base.upper) {
      const double moved = base.base->survival(cap) -
                           (std::isfinite(base.upper) ? base.base->survival(base.upper) : 0.0);
      atoms.push_back({cap, moved});
      law->upper = cap;
    }
  }
  law->atoms = detail::merged(std::move(atoms));
  return {CappedAbove{std::make_shared<const InnovationSpec>(spec), cap}, law};
}

InnovationSpec truncate_floor_positive(const InnovationSpec& spec, double level) {
  require(level > 0.0 && std::isfinite(level), "truncate_floor_positive: N_cap must be positive");
  const Law& base = spec.law();
  auto law = std::make_shared<Law>();
  std::vector<Atom> atoms;
  for (const auto& a : base.atoms) atoms.push_back({floor_value(a.x, level), a.w});
  if (base.base) {
    const auto& b = *base.base;
    const double u = base.upper;
    auto s = [&](double x) { return std::isfinite(x) ? b.survival(x) : 0.0; };
    law->base = base.base;
    if (u > 0.0) atoms.push_back({0.0, b.survival(0.0) - s(std::min(u, level))});
    if (u > level) atoms.push_back({level, b.survival(level) - s(u)});
    law->upper = std::min(u, 0.0);
  }
  law->atoms = detail::merged(std::move(atoms));
  if (!(law->mass_at_least(level) > 0.0))
    fail(ErrorKind::infeasible_truncation,
         "truncate_floor_positive: no mass at or above N_cap = " + num(level));
  return {FlooredPositive{std::make_shared<const InnovationSpec>(spec), level}, law};
}

TailDiagnostics diagnostics(const InnovationSpec& spec, Stream& rng, std::size_t n,
                            double delta) {
  require(n >= 10000, "diagnostics: n must be at least 1e4");
  require(delta > 0.0 && delta <= 1.0, "diagnostics: delta must lie in (0, 1]");
  TailDiagnostics d;
  d.delta = delta;
  d.upper_bound = spec.upper_bound();
  if (spec.is_discrete()) {
    d.exact = true;
    for (const auto& a : spec.atoms()) {
      d.log_moment += a.w * std::log1p(std::abs(a.x));
      if (a.x < 0.0) d.neg_moment += a.w * std::pow(-a.x, delta);
    }
    return d;
  }
  double s1 = 0.0, q1 = 0.0, s2 = 0.0, q2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = spec.draw(rng);
    const double l = std::log1p(std::abs(x));
    const double m = x < 0.0 ? std::pow(-x, delta) : 0.0;
    s1 += l;
    q1 += l * l;
    s2 += m;
    q2 += m * m;
  }
  const double nn = static_cast<double>(n);
  d.log_moment = s1 / nn;
  d.neg_moment = s2 / nn;
  d.log_moment_se = std::sqrt(std::max(0.0, q1 / nn - d.log_moment * d.log_moment) / (nn - 1));
  d.neg_moment_se = std::sqrt(std::max(0.0, q2 / nn - d.neg_moment * d.neg_moment) / (nn - 1));
  return d;
}

}  // namespace fpt
