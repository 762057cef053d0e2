#pragma once

#include <string>

#include "cofdm/modem.hpp"

namespace cofdm {

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Binary complex waveform dump:
//   8-byte little-endian sample count, then count x (float64 re, float64 im),
//   little-endian. The sample rate is not stored; it travels in the config.
void save_waveform(const std::string& path, const Waveform& w);
Waveform load_waveform(const std::string& path, double sample_rate_hz);

}  // namespace cofdm
