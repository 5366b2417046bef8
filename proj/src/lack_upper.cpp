#include "mlsteg/lack_upper.hpp"

#include <algorithm>

#include "mlsteg/errors.hpp"
#include "mlsteg/md5.hpp"

namespace mlsteg::lack {

void LackConfig::validate(const rtp::StreamConfig& stream,
                          const channel::ChannelConfig& channel) const
{
    if (!(p_lack >= 0.0 && p_lack <= 1.0)) {
        throw ValidationError("p_lack must lie in [0, 1]");
    }
    if (digest_bytes == 0 || digest_bytes > 16) {
        throw ValidationError("digest_bytes must be in 1..16");
    }
    if (digest_bytes >= stream.frame_bytes) {
        throw ValidationError("digest_bytes must be smaller than frame_bytes");
    }
    if (min_delay <= channel.playout_deadline) {
        throw ValidationError("min_delay (" + std::to_string(min_delay.count()) +
                              " ms) must exceed playout_deadline (" +
                              std::to_string(channel.playout_deadline.count()) + " ms)");
    }
}

UpperChunk UpperChunk::seal(Bytes steg, std::size_t digest_bytes)
{
    const auto full = md5(steg);
    UpperChunk c;
    c.digest.assign(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(digest_bytes));
    c.steg_bytes = std::move(steg);
    return c;
}

Bytes frame_message(std::span<const std::uint8_t> body)
{
    if (body.size() > 0xffffffffULL) {
        throw SizeError("message longer than 2^32 - 1 bytes");
    }
    const auto n = static_cast<std::uint32_t>(body.size());
    Bytes out(4 + body.size());
    for (int i = 0; i < 4; ++i) {
        out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(n >> (24 - 8 * i));
    }
    std::copy(body.begin(), body.end(), out.begin() + 4);
    return out;
}

ChunkWriter::ChunkWriter(Bytes framed, std::size_t chunk_bytes, std::size_t digest_bytes)
    : framed_(std::move(framed)), chunk_bytes_(chunk_bytes), digest_bytes_(digest_bytes)
{
    if (chunk_bytes_ == 0) {
        throw ParameterError("chunk_bytes must be positive");
    }
}

UpperChunk ChunkWriter::next()
{
    Bytes steg(chunk_bytes_, 0);
    if (offset_ < framed_.size()) {
        const auto n = std::min(chunk_bytes_, framed_.size() - offset_);
        std::copy_n(framed_.begin() + static_cast<std::ptrdiff_t>(offset_), n, steg.begin());
        offset_ += n;
    }
    ++written_;
    return UpperChunk::seal(std::move(steg), digest_bytes_);
}

std::vector<std::size_t> select_candidates(std::span<const rtp::RtpPacket> stream,
                                           const LackConfig& cfg, SplitMix64& rng)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < stream.size(); ++i) {
        if (draw_candidate(rng, cfg.p_lack)) {
            out.push_back(i);
        }
    }
    return out;
}

Embedded embed_chunk(rtp::RtpPacket packet, const UpperChunk& chunk, const LackConfig& cfg)
{
    if (chunk.digest.size() != cfg.digest_bytes) {
        throw SizeError("chunk digest has " + std::to_string(chunk.digest.size()) +
                        " bytes, expected " + std::to_string(cfg.digest_bytes));
    }
    if (chunk.steg_bytes.size() + chunk.digest.size() != packet.payload.size()) {
        throw SizeError("chunk of " + std::to_string(chunk.steg_bytes.size()) +
                        " steganogram bytes does not fill a " +
                        std::to_string(packet.payload.size()) + "-byte payload");
    }
    auto it = std::copy(chunk.steg_bytes.begin(), chunk.steg_bytes.end(), packet.payload.begin());
    std::copy(chunk.digest.begin(), chunk.digest.end(), it);
    packet.is_lack = true;
    return Embedded{std::move(packet), cfg.min_delay};
}

std::optional<UpperChunk> try_extract(const rtp::RtpPacket& packet, const LackConfig& cfg)
{
    const auto& p = packet.payload;
    if (p.size() <= cfg.digest_bytes) {
        return std::nullopt;
    }
    const auto split = p.end() - static_cast<std::ptrdiff_t>(cfg.digest_bytes);
    const auto expect = md5(std::span(p.data(), p.size() - cfg.digest_bytes));
    if (!std::equal(split, p.end(), expect.begin())) {
        return std::nullopt;
    }
    return UpperChunk{Bytes(p.begin(), split), Bytes(split, p.end())};
}

Reassembly reassemble(std::span<const UpperChunk> chunks)
{
    Bytes all;
    for (const auto& c : chunks) {
        all.insert(all.end(), c.steg_bytes.begin(), c.steg_bytes.end());
    }
    Reassembly r;
    if (all.size() < 4) {
        return r;
    }
    const std::uint32_t len = (std::uint32_t{all[0]} << 24) | (std::uint32_t{all[1]} << 16) |
                              (std::uint32_t{all[2]} << 8) | std::uint32_t{all[3]};
    r.declared_length = len;
    r.received_bytes = std::min<std::size_t>(len, all.size() - 4);
    if (r.received_bytes == len) {
        r.message = UpperMessage{len, Bytes(all.begin() + 4, all.begin() + 4 + len)};
    }
    return r;
}

} // namespace mlsteg::lack
