#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mlsteg/rng.hpp"
#include "mlsteg/rtp_model.hpp"

namespace mlsteg::channel {

using std::chrono::milliseconds;

struct ChannelConfig {
    milliseconds base_latency{0};
    /// Lateness beyond which the voice receiver treats a packet as lost.
    milliseconds playout_deadline{60};
    /// 0 models a clean LAN: only intentionally delayed packets are lost.
    double extra_loss_p = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

enum class Status { on_time, late, dropped };

std::string_view to_string(Status s) noexcept;
/// Throws ParseError on an unknown name.
Status status_from_string(std::string_view s);

struct DeliveryEvent {
    rtp::RtpPacket packet;
    milliseconds send_time{0};
    /// Meaningless when status is dropped.
    milliseconds arrival_time{0};
    Status status = Status::on_time;
};

struct ScheduledPacket {
    rtp::RtpPacket packet;
    milliseconds extra_delay{0};
};

/// Stateful one-way path. Draws one uniform per packet, in send order.
class Link {
public:
    explicit Link(const ChannelConfig& cfg);

    DeliveryEvent send(rtp::RtpPacket packet, milliseconds extra_delay);

private:
    ChannelConfig cfg_;
    SplitMix64 rng_;
};

/// Schedule must be ordered by actual send time (nominal + extra_delay).
std::vector<DeliveryEvent> transmit(std::span<const ScheduledPacket> schedule,
                                    const ChannelConfig& cfg);

struct PlayoutResult {
    /// One frame per stream position, PLC-filled where the packet missed the deadline.
    std::vector<Bytes> played;
    /// Late, undropped packets in arrival order; input to the steganographic receiver.
    std::vector<rtp::RtpPacket> late;
    std::size_t concealed = 0;
};

PlayoutResult playout(std::span<const DeliveryEvent> events, const ChannelConfig& cfg,
                      const rtp::StreamConfig& stream);

} // namespace mlsteg::channel
