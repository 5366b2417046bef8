#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mlsteg/analysis.hpp"
#include "mlsteg/bits.hpp"
#include "mlsteg/channel.hpp"
#include "mlsteg/lack_upper.hpp"
#include "mlsteg/lower_frame.hpp"
#include "mlsteg/rtp_model.hpp"

namespace mlsteg::mls {

using std::chrono::milliseconds;

/// One simulated two-level call: LACK on top, sequence-number matching below.
struct CallConfig {
    rtp::StreamConfig stream;
    /// Drawn from the seed when absent.
    std::optional<rtp::SeqNum> start_seq;
    /// The seed field is ignored; the link seed is derived from `seed`.
    channel::ChannelConfig channel;
    lack::LackConfig lack;
    /// Lower-level bits per LACK packet; 0 runs LACK alone.
    unsigned x = 0;
    /// Planned call length.
    milliseconds duration{540'000};
    /// Ends the call early without the sender planning for it.
    std::optional<milliseconds> cut_at;
    /// Delay between the receiver completing a CTRL frame and the sender acting on it.
    milliseconds ack_rtt{100};
    std::uint64_t seed = 1;
    /// Overt bytes cycled over the stream; pseudo-random bytes when empty.
    Bytes overt_payload;

    void validate() const;

    std::size_t planned_packets() const;
    /// Positions actually sent (planned, or up to cut_at).
    std::size_t packets() const;
    /// planned_packets * p_lack
    double expected_lack_packets() const;
};

/// A lower-channel frame the sender may start sending from `enqueue_at` on.
/// While later items are still pending the sender idles with zero-length
/// DATA frames; after the last item it sends filler.
struct LowerItem {
    LowerFrame frame;
    milliseconds enqueue_at{0};
};

/// Fault hook run on each extracted upper chunk after its digest check.
using ChunkTamper = std::function<void(std::size_t chunk_index, lack::UpperChunk& chunk)>;

struct CallPlan {
    Bytes upper_body;
    std::vector<LowerItem> lower;
    ChunkTamper tamper;
};

struct ReceivedFrame {
    LowerFrame frame;
    milliseconds completed_at{0};
};

/// A signalled p_lack change as seen by the sender.
struct ParameterSwitch {
    milliseconds ack_time{0};
    double p_lack = 0.0;
};

struct CallResult {
    rtp::SeqNum start_seq = 0;
    analysis::RunTrace trace;
    analysis::RunMetrics metrics;
    /// PLC substitutions made by the voice receiver.
    std::size_t concealed = 0;

    // Sender side.
    std::size_t chunks_sent = 0;
    bool upper_fully_sent = false;
    BitString lower_sent;

    // Steganographic receiver side, in extraction order.
    std::vector<lack::UpperChunk> chunks_received;
    /// rtp positions of the LACK packets the chunks came from.
    std::vector<std::size_t> chunk_positions;
    lack::Reassembly upper;
    BitString lower_received;
    std::vector<ReceivedFrame> frames;
    bool lower_terminated = false;
    std::vector<ParameterSwitch> switches;
};

CallResult run_call(const CallConfig& cfg, const CallPlan& plan);

} // namespace mlsteg::mls
