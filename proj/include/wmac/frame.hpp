#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "wmac/phy.hpp"

namespace wmac {

enum class FrameKind : std::uint8_t {
  Rts,
  Cts,
  Data,
  Ack,
  Beacon,
  CfPoll,
  CfAck,
  CfEnd,
  DataCfAck,
};

inline std::string_view frame_kind_name(FrameKind k) {
  switch (k) {
    case FrameKind::Rts: return "RTS";
    case FrameKind::Cts: return "CTS";
    case FrameKind::Data: return "DATA";
    case FrameKind::Ack: return "ACK";
    case FrameKind::Beacon: return "BEACON";
    case FrameKind::CfPoll: return "CF_POLL";
    case FrameKind::CfAck: return "CF_ACK";
    case FrameKind::CfEnd: return "CF_END";
    case FrameKind::DataCfAck: return "DATA_CF_ACK";
  }
  return "?";
}

inline constexpr int kBroadcast = -1;

// MPDU sizes of the fixed-size frames, in bytes (PLCP excluded).
inline constexpr std::int64_t kRtsBytes = 20;
inline constexpr std::int64_t kCtsBytes = 14;
inline constexpr std::int64_t kAckBytes = 14;
inline constexpr std::int64_t kBeaconBytes = 50;
inline constexpr std::int64_t kCfPollBytes = 28;
inline constexpr std::int64_t kCfAckBytes = 28;
inline constexpr std::int64_t kCfEndBytes = 20;
// Reservation sub-header prepended to a DATA frame when the receiver picked
// a different rate than the sender proposed; sent at 1 Mbps.
inline constexpr std::int64_t kRshBytes = 10;

inline bool is_control(FrameKind k) {
  return k == FrameKind::Rts || k == FrameKind::Cts || k == FrameKind::Ack;
}

inline bool carries_data(FrameKind k) { return k == FrameKind::Data || k == FrameKind::DataCfAck; }

struct Frame {
  FrameKind kind = FrameKind::Data;
  int src = 0;
  int dst = kBroadcast;
  Micros duration = 0;  // NAV value, counted from the end of this frame
  std::int64_t payload_bytes = 0;
  Rate rate = Rate::R1;  // rate of everything after the PLCP header
  bool more_fragments = false;
  int fragment_number = 0;
  bool retry = false;

  // Packet bookkeeping for DATA frames.
  std::int64_t packet = -1;
  bool ends_packet = true;

  // Receiver-selected rate extension fields.
  std::optional<Rate> tentative_rate;
  std::optional<Rate> selected_rate;
  std::int64_t size = 0;
  bool rsh = false;

  int advertised_cw = 0;      // shared-window backoff; 0 = absent
  bool dcf_plus = false;      // sender understands ACK-as-RTS
  bool reverse = false;       // reverse DATA carried on an ACK reservation
  bool parallel = false;      // exposed-node parallel transmission
  bool cf_ack = false;        // CF-Poll / CF-END also acknowledges the last response

  Micros air() const {
    Micros t = airtime(payload_bytes, rate);
    if (rsh) t += payload_micros(kRshBytes, Rate::R1);
    return t;
  }

  std::string describe() const {
    std::string s(frame_kind_name(kind));
    s += ' ';
    s += std::to_string(src);
    s += "->";
    s += dst == kBroadcast ? std::string("*") : std::to_string(dst);
    s += " bytes=" + std::to_string(payload_bytes);
    s += " rate=" + rate_label(rate);
    s += " dur=" + std::to_string(duration);
    if (more_fragments) s += " mf";
    if (fragment_number) s += " frag=" + std::to_string(fragment_number);
    if (retry) s += " retry";
    if (packet >= 0) s += " pkt=" + std::to_string(packet);
    if (rsh) s += " rsh";
    if (parallel) s += " parallel";
    if (reverse) s += " reverse";
    return s;
  }
};

inline Frame make_control(FrameKind kind, int src, int dst, Micros duration) {
  Frame f;
  f.kind = kind;
  f.src = src;
  f.dst = dst;
  f.duration = duration < 0 ? 0 : duration;
  f.rate = Rate::R1;
  switch (kind) {
    case FrameKind::Rts: f.payload_bytes = kRtsBytes; break;
    case FrameKind::Cts: f.payload_bytes = kCtsBytes; break;
    case FrameKind::Ack: f.payload_bytes = kAckBytes; break;
    case FrameKind::Beacon: f.payload_bytes = kBeaconBytes; break;
    case FrameKind::CfPoll: f.payload_bytes = kCfPollBytes; break;
    case FrameKind::CfAck: f.payload_bytes = kCfAckBytes; break;
    case FrameKind::CfEnd: f.payload_bytes = kCfEndBytes; break;
    default: throw ContractViolation("make_control: not a fixed-size frame");
  }
  return f;
}

}  // namespace wmac
