#include "smartjam/channel.hpp"

#include "smartjam/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

namespace smartjam {

double jammer_span_residual(const CMat& H, const CVec& j) {
  const double jn = j.norm();
  if (jn == 0.0) return 0.0;
  const CVec coeff = H.colPivHouseholderQr().solve(j);
  return (j - H * coeff).norm() / jn;
}

bool satisfies_invariants(const ChannelRealization& ch) {
  if (ch.H.cols() > ch.H.rows()) return false;
  if (numerical_rank(ch.H, 1e-10) < ch.H.cols()) return false;
  return jammer_span_residual(ch.H, ch.j) > 1e-8;
}

ChannelRealization rayleigh(const SystemConfig& cfg, Rng& rng) {
  for (;;) {
    ChannelRealization ch;
    ch.H.resize(cfg.B, cfg.U);
    ch.j.resize(cfg.B);
    for (int u = 0; u < cfg.U; ++u)
      for (int b = 0; b < cfg.B; ++b) ch.H(b, u) = rng.cnormal();
    for (int b = 0; b < cfg.B; ++b) ch.j(b) = rng.cnormal();
    ch.label = "rayleigh";
    if (satisfies_invariants(ch)) return ch;
  }
}

ChannelRealization power_control(const ChannelRealization& ch, double range_db) {
  if (range_db < 0.0) throw Error(ErrorKind::InvalidArgument, "power_control: range_db must be >= 0");
  const Eigen::Index U = ch.H.cols();
  std::vector<double> power(static_cast<std::size_t>(U));
  for (Eigen::Index u = 0; u < U; ++u) power[static_cast<std::size_t>(u)] = ch.H.col(u).squaredNorm();
  std::vector<double> sorted = power;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  const double lo = median * db_to_linear(-range_db);
  const double hi = median * db_to_linear(range_db);
  ChannelRealization out = ch;
  for (Eigen::Index u = 0; u < U; ++u) {
    const double p = power[static_cast<std::size_t>(u)];
    if (p == 0.0) continue;
    const double target = range_db == 0.0 ? median : std::clamp(p, lo, hi);
    out.H.col(u) *= std::sqrt(target / p);
  }
  out.label = ch.label + "+pc";
  return out;
}

namespace {

static_assert(std::endian::native == std::endian::little, ".chn I/O assumes a little-endian host");

template <typename T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool get(std::ifstream& is, T& v) {
  return static_cast<bool>(is.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

void put_complex(std::ofstream& os, cplx z) {
  put(os, z.real());
  put(os, z.imag());
}

}  // namespace

void export_channels(const std::string& path, const std::vector<ChannelRealization>& records) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorKind::Runtime, "export_channels: cannot open '" + path + "' for writing");
  const std::uint32_t B = records.empty() ? 0 : static_cast<std::uint32_t>(records.front().H.rows());
  const std::uint32_t U = records.empty() ? 0 : static_cast<std::uint32_t>(records.front().H.cols());
  os.write(kChannelMagic, sizeof(kChannelMagic));
  put(os, B);
  put(os, U);
  put(os, static_cast<std::uint64_t>(records.size()));
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& ch = records[r];
    if (ch.H.rows() != B || ch.H.cols() != U || ch.j.size() != B) {
      throw Error(ErrorKind::Shape, "export_channels: record " + std::to_string(r) + " has mismatched dimensions");
    }
    for (Eigen::Index u = 0; u < ch.H.cols(); ++u)
      for (Eigen::Index b = 0; b < ch.H.rows(); ++b) put_complex(os, ch.H(b, u));
    for (Eigen::Index b = 0; b < ch.j.size(); ++b) put_complex(os, ch.j(b));
  }
  if (!os) throw Error(ErrorKind::Runtime, "export_channels: write failed for '" + path + "'");
}

ChannelReader::ChannelReader(const std::string& path, std::optional<int> expect_B, std::optional<int> expect_U)
    : in_(path, std::ios::binary), path_(path) {
  if (!in_) throw Error(ErrorKind::Parse, "import_channels: cannot open '" + path + "'");
  char magic[sizeof(kChannelMagic)];
  std::uint32_t B = 0, U = 0;
  if (!in_.read(magic, sizeof(magic)) || std::memcmp(magic, kChannelMagic, sizeof(magic)) != 0) {
    throw Error(ErrorKind::Parse, "import_channels: '" + path + "' has a bad magic header");
  }
  if (!get(in_, B) || !get(in_, U) || !get(in_, count_)) {
    throw Error(ErrorKind::Parse, "import_channels: '" + path + "' has a truncated header");
  }
  B_ = static_cast<int>(B);
  U_ = static_cast<int>(U);
  if ((expect_B && *expect_B != B_) || (expect_U && *expect_U != U_)) {
    throw Error(ErrorKind::Shape, "import_channels: file dimensions B=" + std::to_string(B_) + ", U=" +
                                      std::to_string(U_) + " do not match the configuration");
  }
}

std::optional<ChannelRealization> ChannelReader::next() {
  while (index_ < count_) {
    const std::uint64_t r = index_++;
    ChannelRealization ch;
    ch.H.resize(B_, U_);
    ch.j.resize(B_);
    auto read_c = [&](cplx& z) {
      double re = 0, im = 0;
      if (!get(in_, re) || !get(in_, im)) {
        throw Error(ErrorKind::Parse, "import_channels: '" + path_ + "' truncated in record " + std::to_string(r));
      }
      z = {re, im};
    };
    for (int u = 0; u < U_; ++u)
      for (int b = 0; b < B_; ++b) read_c(ch.H(b, u));
    for (int b = 0; b < B_; ++b) read_c(ch.j(b));
    if (!ch.H.allFinite() || !ch.j.allFinite()) {
      throw Error(ErrorKind::Parse, "import_channels: non-finite value in record " + std::to_string(r));
    }
    ch.label = path_ + "#" + std::to_string(r);
    if (!satisfies_invariants(ch)) {
      skipped_.push_back(r);
      continue;
    }
    return ch;
  }
  return std::nullopt;
}

std::vector<ChannelRealization> import_channels(const std::string& path, std::vector<std::uint64_t>* skipped) {
  ChannelReader reader(path);
  std::vector<ChannelRealization> out;
  while (auto ch = reader.next()) out.push_back(std::move(*ch));
  if (skipped) *skipped = reader.skipped();
  return out;
}

}  // namespace smartjam
