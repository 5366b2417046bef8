#include "mlsteg/seq_lower.hpp"

#include "mlsteg/errors.hpp"

namespace mlsteg::lower {

void LowConfig::validate() const
{
    if (x < 1 || x > 16) {
        throw ValidationError("x must be in 1..16");
    }
}

SeqNum match_seq(SeqNum candidate, const BitString& bits, unsigned x)
{
    if (x < 1 || x > 16) {
        throw ParameterError("x must be in 1..16, got " + std::to_string(x));
    }
    if (bits.size() != x) {
        throw ParameterError("expected " + std::to_string(x) + " bits, got " +
                             std::to_string(bits.size()));
    }
    const auto want = static_cast<std::uint32_t>(read_uint(bits, 0, x));
    const std::uint32_t mask = (1U << x) - 1U;
    const auto step = static_cast<SeqNum>((want - (candidate & mask)) & mask);
    return static_cast<SeqNum>(candidate + step);
}

BitString decode_bits(SeqNum lack_seq, unsigned x)
{
    return rtp::low_bits(lack_seq, x);
}

BitString filler_bits(std::size_t offset, std::size_t n)
{
    BitString out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = ((offset + i) % 2) == 0;
    }
    return out;
}

BitString FixedBitSource::peek(unsigned n)
{
    BitString out;
    out.reserve(n);
    for (unsigned i = 0; i < n; ++i) {
        const auto at = pos_ + i;
        out.push_back(at < bits_.size() ? bits_[at] : ((at - bits_.size()) % 2) == 0);
    }
    return out;
}

std::size_t hold_packets(const lack::LackConfig& lack, const rtp::StreamConfig& stream)
{
    const auto fd = stream.frame_duration.count();
    const auto d = lack.min_delay.count();
    return static_cast<std::size_t>(d <= 0 ? 1 : (d + fd - 1) / fd);
}

Arbiter::Arbiter(const rtp::StreamConfig& stream, std::size_t stream_len, unsigned x,
                 std::size_t hold)
    : stream_(stream), stream_len_(stream_len), x_(x), hold_(hold == 0 ? 1 : hold)
{
    if (x_ > 16) {
        throw ParameterError("x must be in 0..16");
    }
}

std::optional<LackEntry> Arbiter::step(std::size_t pos, bool candidate, BitSource& bits)
{
    if (pos < busy_until_) {
        if (candidate) {
            ++deficit_;
            ++skipped_;
        }
        return std::nullopt;
    }
    const bool compensating = !candidate;
    if (compensating && deficit_ == 0) {
        return std::nullopt;
    }

    const SeqNum cand_seq = rtp::seq_at(stream_, pos);
    LackEntry e;
    e.candidate_pos = pos;
    e.compensating = compensating;
    if (x_ > 0) {
        e.lower_bits = bits.peek(x_);
        e.seq = match_seq(cand_seq, e.lower_bits, x_);
    } else {
        e.seq = cand_seq;
    }
    e.pos = pos + rtp::seq_distance(cand_seq, e.seq);
    if (e.pos >= stream_len_) {
        // The match falls past the end of the call; nothing is consumed.
        if (candidate) {
            ++deficit_;
        }
        return std::nullopt;
    }
    if (x_ > 0) {
        bits.consume(x_);
    }
    if (compensating) {
        --deficit_;
    }
    busy_until_ = e.pos + hold_;
    return e;
}

LackSchedule arbitrate(std::span<const std::size_t> candidates, const BitString& lower_bits,
                       unsigned x, const rtp::StreamConfig& stream, std::size_t stream_len,
                       std::size_t hold)
{
    Arbiter arb(stream, stream_len, x, hold);
    FixedBitSource src(lower_bits);
    LackSchedule out;
    std::size_t next = 0;
    for (std::size_t pos = 0; pos < stream_len; ++pos) {
        bool cand = false;
        while (next < candidates.size() && candidates[next] < pos) {
            ++next;
        }
        if (next < candidates.size() && candidates[next] == pos) {
            cand = true;
            ++next;
        }
        if (auto e = arb.step(pos, cand, src)) {
            out.push_back(std::move(*e));
        }
    }
    return out;
}

} // namespace mlsteg::lower
