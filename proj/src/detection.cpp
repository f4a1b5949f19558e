#include "smartjam/detection.hpp"

namespace smartjam {

DetectionResult hard_decide(CMat S_hat, const Constellation& c) {
  DetectionResult r;
  const Eigen::Index U = S_hat.rows(), D = S_hat.cols();
  const int bps = c.bits_per_symbol;
  r.labels.resize(static_cast<std::size_t>(U * D));
  r.bits.resize(static_cast<std::size_t>(U * D * bps));
  for (Eigen::Index u = 0; u < U; ++u) {
    for (Eigen::Index k = 0; k < D; ++k) {
      const int label = c.slice(S_hat(u, k));
      const auto idx = static_cast<std::size_t>(u * D + k);
      r.labels[idx] = label;
      for (int i = 0; i < bps; ++i) r.bits[idx * bps + i] = static_cast<std::uint8_t>((label >> i) & 1);
    }
  }
  r.S_hat = std::move(S_hat);
  return r;
}

ErrorTally count_errors(const DetectionResult& r, const std::vector<std::uint8_t>& bits,
                        const std::vector<int>& labels) {
  ErrorTally t;
  t.bits = bits.size();
  t.symbols = labels.size();
  for (std::size_t i = 0; i < bits.size(); ++i) t.bit_errors += (r.bits[i] != bits[i]);
  for (std::size_t i = 0; i < labels.size(); ++i) t.symbol_errors += (r.labels[i] != labels[i]);
  return t;
}

}  // namespace smartjam
