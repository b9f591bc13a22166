#ifndef SINGINT_RATIONAL_HPP
#define SINGINT_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

namespace singint {

// Exact rational arithmetic for the tree algebra; alpha(tau) and
// 1/gamma(tau) stay exact at every order the enumerator allows.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt factorial(int n) {
  BigInt r = 1;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

}  // namespace singint

#endif
