#include "singint/driving.hpp"

#include <cmath>

#include "singint/errors.hpp"

namespace singint {

DrivingPath DrivingPath::generate(const DrivingSpec& spec, int levels,
                                  std::uint64_t seed) {
  if (levels < 0 || levels > 30)
    throw ValidationError("generate_path: levels must be in [0,30]");
  if (!(spec.T > spec.t0))
    throw ValidationError("generate_path: T must exceed t0");
  DrivingPath p;
  p.spec_ = spec;
  p.levels_ = levels;
  p.seed_ = seed;
  const std::size_t n = std::size_t{1} << levels;
  const double sqrt_h = std::sqrt(spec.length() / static_cast<double>(n));
  RngStream rng(seed);
  p.dw_fine_.resize(n);
  for (auto& dw : p.dw_fine_) dw = sqrt_h * rng.next_normal();
  return p;
}

std::vector<double> DrivingPath::wiener_increments_at_level(int level) const {
  if (level < 0 || level > levels_)
    throw ValidationError("increments_at_level: level out of range");
  const std::size_t n = std::size_t{1} << level;
  const std::size_t block = std::size_t{1} << (levels_ - level);
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < block; ++j)
      out[i] += dw_fine_[i * block + j];
  return out;
}

std::vector<double> DrivingPath::increments_at_level(int level) const {
  auto out = wiener_increments_at_level(level);
  const double h = spec_.length() / static_cast<double>(std::size_t{1} << level);
  for (auto& v : out) v = spec_.lambda * h + spec_.sigma * v;
  return out;
}

double DrivingPath::wiener_total() const {
  double s = 0.0;
  for (double dw : dw_fine_) s += dw;
  return s;
}

double weak_wiener_increment(int order, double h, RngStream& rng) {
  if (h <= 0.0) throw ValidationError("weak_increment: h must be positive");
  const double u = rng.next_uniform();
  switch (order) {
    case 1:
      return u < 0.5 ? std::sqrt(h) : -std::sqrt(h);
    case 2:
      if (u < 1.0 / 6.0) return std::sqrt(3.0 * h);
      if (u < 2.0 / 6.0) return -std::sqrt(3.0 * h);
      return 0.0;
    default:
      throw ValidationError("weak_increment: unsupported order " +
                            std::to_string(order));
  }
}

double weak_increment(int order, double h, const DrivingSpec& spec,
                      RngStream& rng) {
  return spec.lambda * h + spec.sigma * weak_wiener_increment(order, h, rng);
}

double mu_moment(int n, double h, const DrivingSpec& spec) {
  if (n < 0 || n > 30) throw ValidationError("mu_moment: n must be in [0,30]");
  double total = 0.0;
  for (int i = 0; i <= n; i += 2) {  // odd Wiener moments vanish
    double binom = 1.0;
    for (int k = 0; k < i; ++k)
      binom = binom * static_cast<double>(n - k) / static_cast<double>(k + 1);
    double dfact = 1.0;  // (i-1)!!
    for (int k = i - 1; k >= 2; k -= 2) dfact *= k;
    total += binom * std::pow(spec.lambda * h, n - i) *
             std::pow(spec.sigma, i) * std::pow(h, 0.5 * i) * dfact;
  }
  return total;
}

double strat_power_integral_estimate(const DrivingPath& path, int k, int level) {
  if (k < 0) throw ValidationError("strat_power_integral_estimate: k must be >= 0");
  const auto dmu = path.increments_at_level(level);
  double mu = 0.0;
  double sum = 0.0;
  for (double d : dmu) {
    const double mid = mu + 0.5 * d;
    sum += std::pow(mid, k) * d;
    mu += d;
  }
  return sum;
}

}  // namespace singint
