#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mlsteg/bits.hpp"
#include "mlsteg/lack_upper.hpp"
#include "mlsteg/rtp_model.hpp"

namespace mlsteg::lower {

using rtp::SeqNum;

struct LowConfig {
    /// Lower-level bits carried per LACK packet, 1..16.
    unsigned x = 1;

    void validate() const;
};

/// First sequence number at or after `candidate` (wrapping) whose x low bits equal `bits`.
SeqNum match_seq(SeqNum candidate, const BitString& bits, unsigned x);

/// Lower-level bits carried by a confirmed LACK packet.
BitString decode_bits(SeqNum lack_seq, unsigned x);

/// Bits emitted once the lower message is exhausted: 1,0,1,0,... counted from `offset`.
BitString filler_bits(std::size_t offset, std::size_t n);

/// Supplier of lower-level bits. peek() must return the same bits consume() later removes.
class BitSource {
public:
    virtual ~BitSource() = default;
    virtual BitString peek(unsigned n) = 0;
    virtual void consume(unsigned n) = 0;
};

/// Serves a fixed bit string, then filler.
class FixedBitSource final : public BitSource {
public:
    explicit FixedBitSource(BitString bits) : bits_(std::move(bits)) {}

    BitString peek(unsigned n) override;
    void consume(unsigned n) override { pos_ += n; }
    std::size_t consumed() const { return pos_; }

private:
    BitString bits_;
    std::size_t pos_ = 0;
};

struct LackEntry {
    /// Position the upper level flagged (or the compensating position).
    std::size_t candidate_pos = 0;
    /// Position actually sent as LACK.
    std::size_t pos = 0;
    SeqNum seq = 0;
    BitString lower_bits;
    bool compensating = false;

    bool operator==(const LackEntry&) const = default;
};

using LackSchedule = std::vector<LackEntry>;

/// Number of stream positions a LACK packet stays outstanding after its own
/// nominal send time: ceil(min_delay / frame_duration).
std::size_t hold_packets(const lack::LackConfig& lack, const rtp::StreamConfig& stream);

/// Streaming arbiter that keeps at most one LACK packet outstanding.
///
/// A packet marked at position c and steered to position t (the first match
/// of the next x bits at or after c) stays outstanding until its delayed send,
/// i.e. through position t + hold - 1. Candidates arriving while a packet is
/// outstanding are skipped and each adds one unit of deficit; the first free
/// position after the outstanding packet is then flagged once per unit.
class Arbiter {
public:
    /// x == 0 disables the lower level: candidates are used as-is.
    Arbiter(const rtp::StreamConfig& stream, std::size_t stream_len, unsigned x,
            std::size_t hold);

    /// Feed positions in increasing order. Returns the entry when a LACK
    /// packet gets marked at `pos`.
    std::optional<LackEntry> step(std::size_t pos, bool candidate, BitSource& bits);

    std::size_t deficit() const { return deficit_; }
    std::size_t skipped() const { return skipped_; }

private:
    rtp::StreamConfig stream_;
    std::size_t stream_len_;
    unsigned x_;
    std::size_t hold_;
    std::size_t busy_until_ = 0;
    std::size_t deficit_ = 0;
    std::size_t skipped_ = 0;
};

/// Batch form of Arbiter over a sorted candidate list. Bits beyond
/// `lower_bits` are filler.
LackSchedule arbitrate(std::span<const std::size_t> candidates, const BitString& lower_bits,
                       unsigned x, const rtp::StreamConfig& stream, std::size_t stream_len,
                       std::size_t hold);

} // namespace mlsteg::lower
