#pragma once

#include <limits>
#include <stdexcept>

#include "cofdm/modem.hpp"

namespace cofdm {

// Inverse complementary error function on (0, 2). A rational initial guess is
// refined with Newton steps against std::erfc, giving ~1e-15 relative error.
double erfcinv(double y);

// Q-factor in dB from BER: Q = 20*log10(sqrt(2) * erfcinv(2*ber)).
// ber == 0 returns +infinity (error-free sentinel); ber >= 0.5 throws
// std::domain_error.
double q_factor_db(double ber);

// Inverse mapping, for round-trip checks: BER corresponding to a Q in dB.
double ber_from_q_db(double q_db);

// Error vector magnitude: RMS error over RMS reference magnitude.
double evm(const SubcarrierGrid& rx, const SubcarrierGrid& ref);

inline constexpr double kQFactorInf = std::numeric_limits<double>::infinity();

}  // namespace cofdm
