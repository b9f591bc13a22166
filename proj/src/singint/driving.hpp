#ifndef SINGINT_DRIVING_HPP
#define SINGINT_DRIVING_HPP

#include <cstdint>
#include <vector>

#include "singint/rng.hpp"

namespace singint {

/// Parameters of the driving measure mu(t) = lambda*t + sigma*W(t) on
/// [t0, T]. lambda is kept as a general real so that drift scalings like
/// the Kubo parameter a can be absorbed into mu.
struct DrivingSpec {
  double lambda = 1.0;
  double sigma = 1.0;
  double t0 = 0.0;
  double T = 1.0;

  double length() const { return T - t0; }
};

/// One realized Wiener trajectory on a uniform dyadic grid: 2^levels fine
/// increments, coarsened exactly by summation. All step sizes of a
/// convergence study share this one path.
class DrivingPath {
 public:
  static DrivingPath generate(const DrivingSpec& spec, int levels,
                              std::uint64_t seed);

  const DrivingSpec& spec() const { return spec_; }
  int levels() const { return levels_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<double>& fine_wiener_increments() const { return dw_fine_; }

  /// 2^level Wiener increments, each the left-to-right sum of its fine members.
  std::vector<double> wiener_increments_at_level(int level) const;

  /// 2^level driving increments lambda*h + sigma*dW at step h = (T-t0)/2^level.
  std::vector<double> increments_at_level(int level) const;

  /// W(T) - W(t0); exact under coarsening.
  double wiener_total() const;

 private:
  DrivingSpec spec_;
  int levels_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> dw_fine_;
};

/// Moment-matched discrete replacement for the Wiener increment:
/// order 1 -> two-point +-sqrt(h); order 2 -> three-point +-sqrt(3h) w.p.
/// 1/6 and 0 w.p. 2/3. Returns lambda*h + sigma*dW_hat.
double weak_increment(int order, double h, const DrivingSpec& spec,
                      RngStream& rng);

/// The Wiener part dW_hat alone (used for exact-flow coupling).
double weak_wiener_increment(int order, double h, RngStream& rng);

/// Closed form E mu(h)^n = sum_i C(n,i) lambda^(n-i) h^(n-i) sigma^i E dW^i
/// with E dW^i = h^(i/2) (i-1)!! for even i, 0 for odd i. n <= 30.
double mu_moment(int n, double h, const DrivingSpec& spec);

/// Midpoint (Stratonovich) Riemann sum of integral mu^k d mu over the
/// level grid; converges pathwise to mu(T-t0)^(k+1)/(k+1), and is exact
/// for k = 0, 1.
double strat_power_integral_estimate(const DrivingPath& path, int k, int level);

}  // namespace singint

#endif
