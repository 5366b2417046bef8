#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "mlsteg/errors.hpp"
#include "mlsteg/session.hpp"

using namespace mlsteg;
using namespace mlsteg::mls;
using namespace std::chrono_literals;

namespace {

CallConfig short_call(unsigned x, std::uint64_t seed)
{
    CallConfig c;
    c.x = x;
    c.seed = seed;
    c.duration = 120'000ms;
    return c;
}

std::vector<LowerItem> data_items(const BitString& bits)
{
    std::vector<LowerItem> items;
    for (auto& f : data_frames(bits)) {
        items.push_back({std::move(f), 0ms});
    }
    return items;
}

// Late records ordered as the receiver should see them.
std::vector<std::size_t> late_positions_by_arrival(const analysis::RunTrace& t)
{
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < t.records.size(); ++i) {
        if (t.records[i].status == channel::Status::late) {
            idx.push_back(i);
        }
    }
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const auto& ra = t.records[a];
        const auto& rb = t.records[b];
        return std::tie(*ra.arrival_time, ra.actual_send_time) <
               std::tie(*rb.arrival_time, rb.actual_send_time);
    });
    return idx;
}

} // namespace

TEST(Session, DeterministicPerSeed)
{
    const auto a = run_call(short_call(2, 7), {});
    const auto b = run_call(short_call(2, 7), {});
    const auto c = run_call(short_call(2, 8), {});
    EXPECT_EQ(a.trace, b.trace);
    EXPECT_NE(a.trace, c.trace);
}

TEST(Session, ExplicitStartSequence)
{
    auto cfg = short_call(1, 3);
    cfg.start_seq = 65530;
    const auto r = run_call(cfg, {});
    EXPECT_EQ(r.start_seq, 65530);
    EXPECT_EQ(r.trace.records[0].seq, 65530);
    EXPECT_EQ(r.trace.records[6].seq, 0);
}

TEST(Session, InvariantsAcrossModes)
{
    for (unsigned x = 0; x <= 3; ++x) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto r = run_call(short_call(x, seed), {});
            const auto& t = r.trace;
            const auto& m = r.metrics;
            ASSERT_EQ(t.records.size(), 6000U);

            // B_SU and B_SL follow from the delivered LACK count.
            EXPECT_DOUBLE_EQ(m.b_su, m.delivered_lack * 1152.0 / m.duration_s);
            EXPECT_DOUBLE_EQ(m.b_sl, m.delivered_lack * static_cast<double>(x) / m.duration_s);
            // Clean channel: only LACK packets are lost to the voice receiver.
            EXPECT_DOUBLE_EQ(m.loss_rate, m.realized_p);
            EXPECT_EQ(r.concealed, m.lack_packets);
            EXPECT_EQ(m.delivered_lack, m.lack_packets);

            // Receiver order is arrival order.
            EXPECT_EQ(r.chunk_positions, late_positions_by_arrival(t));

            std::optional<std::size_t> prev;
            for (std::size_t i = 0; i < t.records.size(); ++i) {
                const auto& rec = t.records[i];
                if (!rec.is_lack) {
                    ASSERT_EQ(rec.actual_send_time, rec.nominal_send_time);
                    continue;
                }
                ASSERT_TRUE(rec.mark_time.has_value());
                ASSERT_EQ(rec.actual_send_time, rec.nominal_send_time + 120ms);
                ASSERT_EQ(rec.status, channel::Status::late);
                ASSERT_LE(*rec.mark_time, rec.nominal_send_time);
                if (x > 0) {
                    ASSERT_EQ(rec.lower_bits, rtp::low_bits(rec.seq, x));
                    ASSERT_LT((rec.nominal_send_time - *rec.mark_time) / 20ms, 1 << x);
                } else {
                    ASSERT_EQ(*rec.mark_time, rec.nominal_send_time);
                }
                if (prev) {
                    // One LACK packet outstanding at a time.
                    ASSERT_LE(t.records[*prev].actual_send_time, *rec.mark_time);
                }
                prev = i;
            }
        }
    }
}

TEST(Session, UpperAndLowerMessagesArrive)
{
    auto cfg = short_call(2, 11);
    Bytes body(2000);
    std::iota(body.begin(), body.end(), 0);
    BitString lower;
    for (int i = 0; i < 200; ++i) {
        lower.push_back(i % 3 == 0);
    }
    const auto r = run_call(cfg, CallPlan{body, data_items(lower), {}});
    ASSERT_TRUE(r.upper.complete());
    EXPECT_EQ(r.upper.message->body, body);
    EXPECT_TRUE(r.upper_fully_sent);
    ASSERT_EQ(r.frames.size(), 1U);
    EXPECT_EQ(r.frames[0].frame.payload, lower);
    EXPECT_TRUE(r.lower_terminated);
    EXPECT_EQ(r.lower_received.size(), r.metrics.delivered_lack * 2);
}

TEST(Session, ExtraLossDropsPackets)
{
    auto cfg = short_call(1, 4);
    cfg.channel.extra_loss_p = 0.02;
    const auto r = run_call(cfg, {});
    EXPECT_GT(r.metrics.loss_rate, r.metrics.realized_p);
    EXPECT_LE(r.metrics.delivered_lack, r.metrics.lack_packets);
    EXPECT_EQ(r.chunk_positions.size(), r.metrics.delivered_lack);
}

TEST(Session, CutEndsCallEarly)
{
    auto cfg = short_call(1, 2);
    cfg.cut_at = 10'000ms;
    const auto r = run_call(cfg, {});
    EXPECT_EQ(r.trace.records.size(), 500U);
    EXPECT_EQ(cfg.planned_packets(), 6000U);
}

TEST(Session, ControlFrameSwitchesAfterAck)
{
    auto cfg = short_call(3, 6);
    cfg.lack.p_lack = 0.05;
    std::vector<LowerItem> items{{control_frame(ControlMsg::set_p_lack(0.01)), 10'000ms}};
    const auto r = run_call(cfg, CallPlan{{}, items, {}});
    ASSERT_EQ(r.switches.size(), 1U);
    const auto& sw = r.switches[0];
    std::vector<ReceivedFrame> ctrl;
    for (const auto& f : r.frames) {
        if (f.frame.type == FrameType::ctrl) {
            ctrl.push_back(f);
        } else {
            // Idle keepalives before the frame was queued.
            ASSERT_EQ(f.frame, keepalive_frame());
        }
    }
    ASSERT_EQ(ctrl.size(), 1U);
    EXPECT_EQ(sw.ack_time, ctrl[0].completed_at + 100ms);
    EXPECT_GT(ctrl[0].completed_at, 10'000ms);
    EXPECT_NEAR(sw.p_lack, 0.01, 1e-4);
    for (const auto& rec : r.trace.records) {
        const double expect = rec.nominal_send_time < sw.ack_time ? 0.05 : sw.p_lack;
        ASSERT_EQ(rec.p_lack, expect);
    }
}

TEST(Session, InvalidConfigRejected)
{
    auto cfg = short_call(17, 1);
    EXPECT_THROW(run_call(cfg, {}), ValidationError);
    cfg = short_call(1, 1);
    cfg.lack.min_delay = 50ms;
    EXPECT_THROW(run_call(cfg, {}), ValidationError);
}
