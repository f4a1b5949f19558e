#pragma once

#include "smartjam/numerics.hpp"
#include "smartjam/scenario.hpp"

#include <cstdint>
#include <vector>

namespace smartjam {

/// Output of any data detector. Bits use the Frame layout
/// bits[(u * D + k) * bps + i].
struct DetectionResult {
  CMat S_hat;  // U x D soft symbol estimates
  std::vector<int> labels;
  std::vector<std::uint8_t> bits;
  std::vector<double> llrs;  // empty unless the detector is soft-output
};

/// Hard-slices S_hat to the nearest constellation point labels.
DetectionResult hard_decide(CMat S_hat, const Constellation& c);

struct ErrorTally {
  std::uint64_t bit_errors = 0;
  std::uint64_t bits = 0;
  std::uint64_t symbol_errors = 0;
  std::uint64_t symbols = 0;

  ErrorTally& operator+=(const ErrorTally& o) {
    bit_errors += o.bit_errors;
    bits += o.bits;
    symbol_errors += o.symbol_errors;
    symbols += o.symbols;
    return *this;
  }
  double ber() const { return bits ? static_cast<double>(bit_errors) / static_cast<double>(bits) : 0.0; }
  double ser() const { return symbols ? static_cast<double>(symbol_errors) / static_cast<double>(symbols) : 0.0; }
};

ErrorTally count_errors(const DetectionResult& r, const std::vector<std::uint8_t>& bits,
                        const std::vector<int>& labels);

}  // namespace smartjam
