#include <gtest/gtest.h>

#include "mlsteg/errors.hpp"
#include "mlsteg/lower_frame.hpp"
#include "mlsteg/rng.hpp"
#include "mlsteg/seq_lower.hpp"

using namespace mlsteg;
using namespace mlsteg::mls;

namespace {

BitString random_bits(SplitMix64& g, std::size_t n)
{
    BitString b(n);
    for (std::size_t i = 0; i < n; ++i) {
        b[i] = (g.next() & 1) != 0;
    }
    return b;
}

} // namespace

TEST(LowerFrame, ControlGolden)
{
    const auto msg = ControlMsg::set_p_lack(0.032);
    EXPECT_EQ(msg.value, 2097);
    const auto bits = serialize(control_frame(msg));
    EXPECT_EQ(to_string(bits), "0100000000011000000000000000100000110001");
    const auto parsed = parse_frames(bits);
    ASSERT_EQ(parsed.frames.size(), 1U);
    EXPECT_EQ(decode_control(parsed.frames[0]), msg);
    EXPECT_NEAR(msg.probability(), 0.032, 1.0 / 65536);
    EXPECT_THROW(ControlMsg::set_p_lack(1.0), ParameterError);
    EXPECT_THROW(ControlMsg::set_p_lack(-0.1), ParameterError);
}

TEST(LowerFrame, HashAndSeqidxGolden)
{
    Md5Digest d{};
    d[0] = 0xFF;
    const auto bits = serialize(hash_frame(d));
    ASSERT_EQ(bits.size(), 16U + 128U);
    EXPECT_EQ(to_string(BitString(bits.begin(), bits.begin() + 16)), "0010000010000000");
    EXPECT_EQ(decode_hash(parse_frames(bits).frames.at(0)), d);

    const auto sbits = serialize(seqidx_frame({3, 7}));
    EXPECT_EQ(to_string(sbits), "1000000000100000" "0000000000000011" "0000000000000111");
    EXPECT_EQ(decode_seqidx(parse_frames(sbits).frames.at(0)), (PartIndex{3, 7}));
}

TEST(LowerFrame, KeepaliveIsBareHeader)
{
    EXPECT_EQ(to_string(serialize(keepalive_frame())), "0110000000000000");
}

TEST(LowerFrame, FillerTerminatesParse)
{
    BitString bits = serialize(key_frame(bits_from_string("1100")));
    const auto filler = lower::filler_bits(0, 40);
    bits.insert(bits.end(), filler.begin(), filler.end());
    const auto p = parse_frames(bits);
    ASSERT_EQ(p.frames.size(), 1U);
    EXPECT_EQ(p.frames[0].type, FrameType::key);
    EXPECT_EQ(to_string(p.frames[0].payload), "1100");
    EXPECT_TRUE(p.terminated);
    EXPECT_FALSE(p.truncated);
    EXPECT_EQ(p.consumed_bits, 20U);
}

TEST(LowerFrame, TruncatedStream)
{
    auto bits = serialize(key_frame(BitString(128, true)));
    bits.resize(100);
    const auto p = parse_frames(bits);
    EXPECT_TRUE(p.frames.empty());
    EXPECT_TRUE(p.truncated);
    EXPECT_FALSE(p.terminated);
}

TEST(LowerFrame, OversizedPayloadRejected)
{
    EXPECT_THROW(serialize(LowerFrame{FrameType::data, BitString(8192)}), SizeError);
    EXPECT_NO_THROW(serialize(LowerFrame{FrameType::data, BitString(8191)}));
}

TEST(LowerFrame, MalformedTypedPayloads)
{
    EXPECT_THROW(decode_control(LowerFrame{FrameType::ctrl, BitString(23)}), ParseError);
    EXPECT_THROW(decode_control(LowerFrame{FrameType::data, BitString(24)}), ParseError);
    BitString bad_code;
    append_uint(bad_code, 9, 8);
    append_uint(bad_code, 0, 16);
    EXPECT_THROW(decode_control(LowerFrame{FrameType::ctrl, bad_code}), ParseError);
    EXPECT_THROW(decode_hash(LowerFrame{FrameType::hash, BitString(127)}), ParseError);
    EXPECT_THROW(decode_seqidx(LowerFrame{FrameType::seqidx, BitString(31)}), ParseError);
}

TEST(LowerFrame, RoundTripAllLengths)
{
    SplitMix64 g(8);
    for (std::size_t len = 0; len <= kMaxFramePayloadBits; len += (len < 64 ? 1 : 37)) {
        const LowerFrame f{static_cast<FrameType>(g.next() % 5), random_bits(g, len)};
        const auto p = parse_frames(serialize(f));
        ASSERT_EQ(p.frames.size(), 1U) << len;
        ASSERT_EQ(p.frames[0], f);
    }
    const LowerFrame last{FrameType::data, random_bits(g, kMaxFramePayloadBits)};
    EXPECT_EQ(parse_frames(serialize(last)).frames.at(0), last);
}

TEST(LowerFrame, IncrementalParserMatchesBatch)
{
    SplitMix64 g(21);
    std::vector<LowerFrame> sent;
    BitString bits;
    for (int i = 0; i < 40; ++i) {
        sent.push_back({static_cast<FrameType>(g.next() % 5), random_bits(g, g.next() % 300)});
        append_frame(bits, sent.back());
    }
    const auto filler = lower::filler_bits(0, 17);
    bits.insert(bits.end(), filler.begin(), filler.end());

    FrameParser parser;
    std::vector<LowerFrame> got;
    for (bool b : bits) {
        if (auto f = parser.push(b)) {
            got.push_back(*f);
        }
    }
    EXPECT_EQ(got, sent);
    EXPECT_EQ(parse_frames(bits).frames, sent);
    EXPECT_TRUE(parser.terminated());
}

TEST(LowerFrame, DataFramesSplitLongInput)
{
    SplitMix64 g(4);
    const auto bits = random_bits(g, 20'000);
    const auto frames = data_frames(bits);
    ASSERT_EQ(frames.size(), 3U);
    EXPECT_EQ(frames[0].length(), 8191U);
    EXPECT_EQ(frames[2].length(), 20'000U - 2 * 8191U);
    BitString joined;
    for (const auto& f : frames) {
        joined.insert(joined.end(), f.payload.begin(), f.payload.end());
    }
    EXPECT_EQ(joined, bits);
    EXPECT_TRUE(data_frames({}).empty());
}
