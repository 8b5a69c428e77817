#pragma once

// 802.11b physical-layer arithmetic: the four DSSS/CCK rates, frame airtime
// (PLCP preamble+header always at 1 Mbps), the size-dependent frame error
// law, Shannon capacity and the per-link quality process.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wmac/sim.hpp"

namespace wmac {

enum class Rate : std::uint8_t { R1 = 0, R2 = 1, R5_5 = 2, R11 = 3 };

inline constexpr std::array<Rate, 4> kAllRates = {Rate::R1, Rate::R2, Rate::R5_5, Rate::R11};

struct RateSpec {
  Rate rate;
  double mbps;
  std::string_view code;
  std::string_view modulation;
  double symbol_rate_msps;
  int bits_per_symbol;
};

inline constexpr std::array<RateSpec, 4> kRateTable = {{
    {Rate::R1, 1.0, "11 (Barker Sequence)", "BPSK", 1.0, 1},
    {Rate::R2, 2.0, "11 (Barker Sequence)", "QPSK", 1.0, 2},
    {Rate::R5_5, 5.5, "8 CCK", "QPSK", 1.375, 4},
    {Rate::R11, 11.0, "8 CCK", "QPSK", 1.375, 8},
}};

inline const RateSpec& rate_spec(Rate r) { return kRateTable[static_cast<std::size_t>(r)]; }
inline double mbps(Rate r) { return rate_spec(r).mbps; }

// Rate in units of 0.5 Mbps, so 5.5 Mbps stays integral.
inline constexpr std::int64_t half_mbps(Rate r) {
  constexpr std::array<std::int64_t, 4> v = {2, 4, 11, 22};
  return v[static_cast<std::size_t>(r)];
}

inline Rate rate_from_mbps(double m) {
  for (const auto& s : kRateTable) {
    if (std::abs(s.mbps - m) < 1e-9) return s.rate;
  }
  throw std::invalid_argument("unsupported rate: " + std::to_string(m) + " Mbps");
}

inline std::string rate_label(Rate r) {
  switch (r) {
    case Rate::R1: return "1";
    case Rate::R2: return "2";
    case Rate::R5_5: return "5.5";
    case Rate::R11: return "11";
  }
  return "?";
}

inline bool has_higher(Rate r) { return r != Rate::R11; }
inline bool has_lower(Rate r) { return r != Rate::R1; }
inline Rate step_up(Rate r) { return has_higher(r) ? static_cast<Rate>(static_cast<int>(r) + 1) : r; }
inline Rate step_down(Rate r) { return has_lower(r) ? static_cast<Rate>(static_cast<int>(r) - 1) : r; }

inline constexpr Micros kPlcpMicros = 192;  // 24 bytes at 1 Mbps

// Time to send `bytes` of MPDU at `rate`, excluding the PLCP preamble.
inline Micros payload_micros(std::int64_t bytes, Rate rate) {
  if (bytes < 0) throw ContractViolation("payload_micros: negative size");
  const std::int64_t num = bytes * 8 * 2;
  const std::int64_t den = half_mbps(rate);
  return (num + den - 1) / den;
}

// PLCP at 1 Mbps plus the payload at `rate`, rounded up to whole microseconds.
inline Micros airtime(std::int64_t payload_bytes, Rate rate) {
  return kPlcpMicros + payload_micros(payload_bytes, rate);
}

inline Micros airtime(std::int64_t payload_bytes, double rate_mbps) {
  return airtime(payload_bytes, rate_from_mbps(rate_mbps));
}

// FER doubles for every 300-byte increment above the reference size.
inline double frame_error_prob(std::int64_t payload_bytes, double base_fer, double base_size = 300.0) {
  if (base_fer < 0.0 || base_fer > 1.0) throw ContractViolation("frame_error_prob: base_fer outside [0,1]");
  const double p = base_fer * std::exp2((static_cast<double>(payload_bytes) - base_size) / 300.0);
  return p > 1.0 ? 1.0 : p;
}

inline double shannon_capacity(double bandwidth_hz, double snr) {
  if (bandwidth_hz <= 0.0 || snr < 0.0) throw ContractViolation("shannon_capacity: bad arguments");
  return bandwidth_hz * std::log2(1.0 + snr);
}

// ---------------------------------------------------------------------------
// Link quality
// ---------------------------------------------------------------------------
enum class Quality : std::uint8_t { Bad = 0, Low = 1, Mid = 2, High = 3 };

inline constexpr Rate max_rate(Quality q) {
  constexpr std::array<Rate, 4> m = {Rate::R1, Rate::R2, Rate::R5_5, Rate::R11};
  return m[static_cast<std::size_t>(q)];
}

inline std::string_view quality_name(Quality q) {
  constexpr std::array<std::string_view, 4> n = {"BAD", "LOW", "MID", "HIGH"};
  return n[static_cast<std::size_t>(q)];
}

inline Quality quality_from_name(std::string_view s) {
  for (int i = 0; i < 4; ++i) {
    if (quality_name(static_cast<Quality>(i)) == s) return static_cast<Quality>(i);
  }
  throw std::invalid_argument("unknown link quality '" + std::string(s) + "'");
}

using TransitionMatrix = std::array<std::array<double, 4>, 4>;

inline TransitionMatrix identity_matrix() {
  TransitionMatrix m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

inline void validate_matrix(const TransitionMatrix& m) {
  for (const auto& row : m) {
    double sum = 0.0;
    for (double p : row) {
      if (p < 0.0) throw std::invalid_argument("transition matrix has a negative entry");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("transition matrix row does not sum to 1");
  }
}

inline Quality markov_step(Quality from, const TransitionMatrix& m, RandomStream& stream) {
  const auto& row = m[static_cast<std::size_t>(from)];
  const double u = stream.uniform01();
  double acc = 0.0;
  for (int j = 0; j < 4; ++j) {
    acc += row[j];
    if (u < acc) return static_cast<Quality>(j);
  }
  // Rounding slack: last state with nonzero mass.
  for (int j = 3; j >= 0; --j) {
    if (row[j] > 0.0) return static_cast<Quality>(j);
  }
  return from;
}

// Per ordered link (src, dst) quality state, advanced one Markov step at a time.
class LinkQuality {
 public:
  LinkQuality() = default;
  LinkQuality(int nodes, Quality initial, TransitionMatrix matrix, Micros dwell)
      : n_(nodes), matrix_(matrix), dwell_(dwell),
        state_(static_cast<std::size_t>(nodes) * nodes, initial) {
    validate_matrix(matrix_);
  }

  int nodes() const { return n_; }
  Micros dwell() const { return dwell_; }
  const TransitionMatrix& matrix() const { return matrix_; }

  Quality get(int src, int dst) const { return state_[index(src, dst)]; }
  void set(int src, int dst, Quality q) { state_[index(src, dst)] = q; }

  // Advances every ordered link one Markov step.
  void step(RandomStream& stream) {
    for (int s = 0; s < n_; ++s) {
      for (int d = 0; d < n_; ++d) {
        if (s == d) continue;
        auto& q = state_[index(s, d)];
        q = markov_step(q, matrix_, stream);
      }
    }
  }

 private:
  std::size_t index(int src, int dst) const {
    return static_cast<std::size_t>(src) * n_ + static_cast<std::size_t>(dst);
  }

  int n_ = 0;
  TransitionMatrix matrix_ = identity_matrix();
  Micros dwell_ = 0;
  std::vector<Quality> state_;
};

inline LinkQuality step_link_quality(LinkQuality links, RandomStream& stream) {
  links.step(stream);
  return links;
}

}  // namespace wmac
