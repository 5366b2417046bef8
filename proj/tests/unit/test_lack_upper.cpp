#include <gtest/gtest.h>

#include <numeric>

#include "mlsteg/errors.hpp"
#include "mlsteg/lack_upper.hpp"
#include "mlsteg/md5.hpp"

using namespace mlsteg;
using namespace mlsteg::lack;
using namespace std::chrono_literals;

namespace {

rtp::RtpPacket voice(std::uint8_t fill = 0x33)
{
    return rtp::RtpPacket{42, 840ms, Bytes(160, fill), false};
}

} // namespace

TEST(LackUpper, ZeroChunkCarriesKnownDigest)
{
    const LackConfig cfg;
    const auto chunk = UpperChunk::seal(Bytes(144, 0), cfg.digest_bytes);
    EXPECT_EQ(to_hex(chunk.digest), "45971d4e3a47775bb5a7260bb5ea3c36");
    const auto e = embed_chunk(voice(), chunk, cfg);
    EXPECT_TRUE(e.packet.is_lack);
    EXPECT_EQ(e.extra_delay, 120ms);
    EXPECT_EQ(e.packet.seq, 42);
    EXPECT_EQ(e.packet.nominal_send_time, 840ms);
    EXPECT_EQ(to_hex(std::span(e.packet.payload).subspan(144)),
              "45971d4e3a47775bb5a7260bb5ea3c36");
    const auto back = try_extract(e.packet, cfg);
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(*back, chunk);
}

TEST(LackUpper, AnySingleBitFlipIsRejected)
{
    const LackConfig cfg;
    Bytes ramp(144);
    std::iota(ramp.begin(), ramp.end(), 0);
    const auto packet = embed_chunk(voice(), UpperChunk::seal(ramp, 16), cfg).packet;
    for (std::size_t bit = 0; bit < 160 * 8; bit += 7) {
        auto bad = packet;
        bad.payload[bit / 8] ^= static_cast<std::uint8_t>(0x80 >> (bit % 8));
        EXPECT_FALSE(try_extract(bad, cfg).has_value()) << "bit " << bit;
    }
}

TEST(LackUpper, OrdinaryVoicePayloadIsRejected)
{
    const LackConfig cfg;
    SplitMix64 g(3);
    for (int i = 0; i < 200; ++i) {
        rtp::RtpPacket p = voice();
        for (auto& b : p.payload) {
            b = static_cast<std::uint8_t>(g.next());
        }
        EXPECT_FALSE(try_extract(p, cfg).has_value());
    }
}

TEST(LackUpper, TruncatedDigest)
{
    LackConfig cfg;
    cfg.digest_bytes = 4;
    const auto chunk = UpperChunk::seal(Bytes(156, 0), 4);
    EXPECT_EQ(to_hex(chunk.digest), "d71669de");
    const auto e = embed_chunk(voice(), chunk, cfg);
    EXPECT_EQ(*try_extract(e.packet, cfg), chunk);
}

TEST(LackUpper, EmbedRejectsWrongSizes)
{
    const LackConfig cfg;
    EXPECT_THROW(embed_chunk(voice(), UpperChunk::seal(Bytes(143, 0), 16), cfg), SizeError);
    EXPECT_THROW(embed_chunk(voice(), UpperChunk::seal(Bytes(144, 0), 8), cfg), SizeError);
}

TEST(LackUpper, ConfigValidation)
{
    const rtp::StreamConfig stream;
    const channel::ChannelConfig ch;
    LackConfig cfg;
    EXPECT_NO_THROW(cfg.validate(stream, ch));
    EXPECT_EQ(cfg.chunk_bytes(stream), 144U);
    cfg.min_delay = 60ms;
    EXPECT_THROW(cfg.validate(stream, ch), ValidationError);
    cfg = {};
    cfg.digest_bytes = 0;
    EXPECT_THROW(cfg.validate(stream, ch), ValidationError);
    cfg = {};
    cfg.p_lack = -0.1;
    EXPECT_THROW(cfg.validate(stream, ch), ValidationError);
}

TEST(LackUpper, ShortMessageReassembles)
{
    const Bytes body{'0', '1', '2', '3', '4', '5', '6', '7', '8', '9'};
    ChunkWriter w(frame_message(body), 144, 16);
    EXPECT_EQ(w.chunks_needed(), 1U);
    const auto c = w.next();
    EXPECT_TRUE(w.exhausted());
    EXPECT_EQ(c.steg_bytes[3], 10);
    const std::vector<UpperChunk> got{c};
    const auto r = reassemble(got);
    ASSERT_TRUE(r.complete());
    EXPECT_EQ(r.message->declared_length, 10U);
    EXPECT_EQ(r.message->body, body);
}

TEST(LackUpper, PartialMessageReportsProgress)
{
    Bytes body(400);
    std::iota(body.begin(), body.end(), 0);
    ChunkWriter w(frame_message(body), 144, 16);
    EXPECT_EQ(w.chunks_needed(), 3U);
    std::vector<UpperChunk> got{w.next(), w.next()};
    auto r = reassemble(got);
    EXPECT_FALSE(r.complete());
    EXPECT_EQ(r.declared_length, 400U);
    EXPECT_EQ(r.received_bytes, 284U);
    got.push_back(w.next());
    got.push_back(w.next()); // padding after exhaustion
    EXPECT_EQ(got.back().steg_bytes, Bytes(144, 0));
    r = reassemble(got);
    ASSERT_TRUE(r.complete());
    EXPECT_EQ(r.message->body, body);
    EXPECT_FALSE(reassemble(std::span<const UpperChunk>{}).declared_length.has_value());
}

TEST(LackUpper, CandidateRateMatchesProbability)
{
    std::vector<rtp::RtpPacket> stream(100'000);
    LackConfig cfg;
    SplitMix64 rng(17);
    const auto c = select_candidates(stream, cfg, rng);
    EXPECT_NEAR(static_cast<double>(c.size()) / 100'000.0, 0.032, 0.002);
    EXPECT_TRUE(std::is_sorted(c.begin(), c.end()));
}
