#pragma once

#include "smartjam/numerics.hpp"
#include "smartjam/rng.hpp"
#include "smartjam/scenario.hpp"

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace smartjam {

struct ChannelRealization {
  CMat H;  // B x U
  CVec j;  // B
  std::string label;
};

/// Relative distance of j from the column space of H: ||(I - H H^+) j|| / ||j||.
double jammer_span_residual(const CMat& H, const CVec& j);

/// True if H has full column rank and j is outside span(H) to 1e-8.
bool satisfies_invariants(const ChannelRealization& ch);

/// i.i.d. CN(0,1) entries for H and j; redraws on the (probability-zero) failure
/// of the realization invariants.
ChannelRealization rayleigh(const SystemConfig& cfg, Rng& rng);

/// Rescales each UE column so that its receive power lies within +-range_db of
/// the median per-UE power. Directions are unchanged.
ChannelRealization power_control(const ChannelRealization& ch, double range_db);

// .chn file layout (all integers and floats little-endian):
//   bytes 0..7   magic "SJCHN\0\0\1"
//   uint32       B
//   uint32       U
//   uint64       record count
//   per record:  B*U complex H entries, column-major (u outer, b inner), then B
//                entries of j; each complex value is float64 re, float64 im.
inline constexpr char kChannelMagic[8] = {'S', 'J', 'C', 'H', 'N', '\0', '\0', '\1'};

void export_channels(const std::string& path, const std::vector<ChannelRealization>& records);

/// Single-pass reader over a .chn file.
class ChannelReader {
 public:
  /// Throws Parse if the header is malformed, Shape if expected dims are given
  /// and differ from the header.
  explicit ChannelReader(const std::string& path, std::optional<int> expect_B = std::nullopt,
                         std::optional<int> expect_U = std::nullopt);

  int B() const { return B_; }
  int U() const { return U_; }
  std::uint64_t record_count() const { return count_; }

  /// Next valid realization in file order. Records whose j lies in span(H) or
  /// whose H is rank deficient are skipped and listed in `skipped()`.
  /// Throws Parse naming the record index if the file is truncated.
  std::optional<ChannelRealization> next();

  const std::vector<std::uint64_t>& skipped() const { return skipped_; }

 private:
  std::ifstream in_;
  std::string path_;
  int B_ = 0;
  int U_ = 0;
  std::uint64_t count_ = 0;
  std::uint64_t index_ = 0;
  std::vector<std::uint64_t> skipped_;
};

/// Reads every valid record.
std::vector<ChannelRealization> import_channels(const std::string& path,
                                                std::vector<std::uint64_t>* skipped = nullptr);

}  // namespace smartjam
