#include "cofdm/metrics.hpp"

#include <cmath>

namespace cofdm {

namespace {

constexpr double kSqrtPi = 1.77245385090551603;

// Rational initial approximation to erfinv (central branch |x| <= 0.7 and a
// sqrt(-log) tail branch), then Newton against the library erf/erfc. Two
// steps of Newton square the initial ~1e-4 error well below double epsilon;
// a third guards the branch seams.
double erfinv_initial(double x) {
  static constexpr double a[4] = {0.886226899, -1.645349621, 0.914624893, -0.140543331};
  static constexpr double b[4] = {-2.118377725, 1.442710462, -0.329097515, 0.012229801};
  static constexpr double c[4] = {-1.970840454, -1.624906493, 3.429567803, 1.641345311};
  static constexpr double d[2] = {3.543889200, 1.637067800};

  const double ax = std::fabs(x);
  double r;
  if (ax <= 0.7) {
    const double z = x * x;
    r = x * (((a[3] * z + a[2]) * z + a[1]) * z + a[0]) /
        ((((b[3] * z + b[2]) * z + b[1]) * z + b[0]) * z + 1.0);
  } else {
    const double z = std::sqrt(-std::log((1.0 - ax) / 2.0));
    r = (((c[3] * z + c[2]) * z + c[1]) * z + c[0]) / ((d[1] * z + d[0]) * z + 1.0);
    if (x < 0.0) r = -r;
  }
  return r;
}

}  // namespace

double erfcinv(double y) {
  if (!(y > 0.0 && y < 2.0)) throw std::domain_error("erfcinv: argument must be in (0, 2)");

  // erfinv(1 - y) loses precision for small y; seed that branch from the tail
  // approximation directly with (1 - ax)/2 = y/2.
  double x;
  if (y < 0.3) {
    const double z = std::sqrt(-std::log(y / 2.0));
    static constexpr double c[4] = {-1.970840454, -1.624906493, 3.429567803, 1.641345311};
    static constexpr double d[2] = {3.543889200, 1.637067800};
    x = (((c[3] * z + c[2]) * z + c[1]) * z + c[0]) / ((d[1] * z + d[0]) * z + 1.0);
  } else if (y > 1.7) {
    x = erfinv_initial(1.0 - y);  // symmetric tail: erfcinv(y) = -erfcinv(2 - y)
  } else {
    x = erfinv_initial(1.0 - y);
  }

  // Newton on f(x) = erfc(x) - y; f'(x) = -2/sqrt(pi) exp(-x^2).
  for (int i = 0; i < 3; ++i) {
    const double f = std::erfc(x) - y;
    x += f * kSqrtPi / 2.0 * std::exp(x * x);
  }
  return x;
}

double q_factor_db(double ber) {
  if (ber < 0.0) throw std::domain_error("q_factor_db: BER must be >= 0");
  if (ber >= 0.5)
    throw std::domain_error("q_factor_db: BER >= 0.5 has no positive Q-factor");
  if (ber == 0.0) return kQFactorInf;
  const double q_lin = 1.41421356237309505 * erfcinv(2.0 * ber);
  return 20.0 * std::log10(q_lin);
}

double ber_from_q_db(double q_db) {
  const double q_lin = std::pow(10.0, q_db / 20.0);
  return 0.5 * std::erfc(q_lin / 1.41421356237309505);
}

double evm(const SubcarrierGrid& rx, const SubcarrierGrid& ref) {
  if (rx.n_subcarriers != ref.n_subcarriers || rx.n_symbols != ref.n_symbols)
    throw dsp_error("evm: grid shape mismatch");
  double err = 0.0, pwr = 0.0;
  for (std::size_t i = 0; i < rx.symbols.size(); ++i) {
    err += std::norm(rx.symbols[i] - ref.symbols[i]);
    pwr += std::norm(ref.symbols[i]);
  }
  if (pwr == 0.0) throw dsp_error("evm: reference grid has zero power");
  return std::sqrt(err / pwr);
}

}  // namespace cofdm
