#pragma once

#include <chrono>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mlsteg/bits.hpp"
#include "mlsteg/channel.hpp"
#include "mlsteg/rtp_model.hpp"

namespace mlsteg::analysis {

using std::chrono::milliseconds;

/// What happened to one stream position.
struct PacketRecord {
    rtp::SeqNum seq = 0;
    milliseconds nominal_send_time{0};
    milliseconds actual_send_time{0};
    /// Absent for dropped packets.
    std::optional<milliseconds> arrival_time;
    channel::Status status = channel::Status::on_time;
    bool is_lack = false;
    /// Lower-level bits carried by the sequence number; empty unless is_lack.
    BitString lower_bits;
    /// When the sender marked this packet for LACK; absent unless is_lack.
    std::optional<milliseconds> mark_time;
    /// p_lack in force when this position was drawn.
    double p_lack = 0.0;

    bool operator==(const PacketRecord&) const = default;
};

/// Per-packet record of one simulated call, ordered by stream position.
struct RunTrace {
    std::string mode;
    std::size_t rep = 0;
    std::size_t frame_bytes = 160;
    std::size_t digest_bytes = 16;
    unsigned x = 0;
    milliseconds frame_duration{20};
    std::vector<PacketRecord> records;

    bool operator==(const RunTrace&) const = default;
};

// JSON-lines layout. Each run starts with a header line
//
//   {"run":{"mode":"MLS-2","rep":0,"frame_bytes":160,"digest_bytes":16,
//           "x":2,"frame_duration_ms":20,"packets":27000}}
//
// followed by exactly `packets` records, one per stream position:
//
//   {"seq":4711,"nominal_send_time":0,"actual_send_time":0,"arrival_time":0,
//    "status":"on_time","is_lack":false,"lower_bits":"","mark_time":null,
//    "p_lack":0.032}
//
// Times are integer milliseconds from stream start.

void write_jsonl(std::ostream& out, const RunTrace& trace);

/// Reads every run in the stream. Throws ParseError on malformed input.
std::vector<RunTrace> read_jsonl(std::istream& in);

} // namespace mlsteg::analysis
