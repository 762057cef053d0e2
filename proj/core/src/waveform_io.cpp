#include "cofdm/waveform_io.hpp"

#include <cstring>
#include <fstream>
#include <vector>

namespace cofdm {

namespace {

// On-disk format is little-endian; this code assumes a little-endian host
// (checked at compile time where available).
#if defined(__BYTE_ORDER__) && __BYTE_ORDER__ != __ORDER_LITTLE_ENDIAN__
#error "waveform_io assumes a little-endian host"
#endif

}  // namespace

void save_waveform(const std::string& path, const Waveform& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("save_waveform: cannot open '" + path + "'");

  const std::uint64_t count = w.samples.size();
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  // std::complex<double> is layout-compatible with double[2] (re, im).
  out.write(reinterpret_cast<const char*>(w.samples.data()),
            static_cast<std::streamsize>(count * 2 * sizeof(double)));
  if (!out) throw io_error("save_waveform: write failed for '" + path + "'");
}

Waveform load_waveform(const std::string& path, double sample_rate_hz) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw io_error("load_waveform: cannot open '" + path + "'");
  const std::streamsize file_size = in.tellg();
  in.seekg(0);

  std::uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  if (!in) throw io_error("load_waveform: truncated header in '" + path + "'");

  const std::uint64_t expected = sizeof(count) + count * 2 * sizeof(double);
  if (static_cast<std::uint64_t>(file_size) != expected)
    throw io_error("load_waveform: '" + path + "' has " + std::to_string(file_size) +
                   " bytes, expected " + std::to_string(expected));

  Waveform w;
  w.sample_rate_hz = sample_rate_hz;
  w.samples.resize(count);
  in.read(reinterpret_cast<char*>(w.samples.data()),
          static_cast<std::streamsize>(count * 2 * sizeof(double)));
  if (!in) throw io_error("load_waveform: truncated payload in '" + path + "'");
  return w;
}

}  // namespace cofdm
