#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "mlsteg/analysis.hpp"
#include "mlsteg/errors.hpp"

using namespace mlsteg;
using namespace mlsteg::analysis;
using namespace std::chrono_literals;

namespace {

MlsPlan chain(std::initializer_list<double> bandwidths)
{
    MlsPlan p;
    p.levels.push_back({{"overt", 0.0}});
    for (double b : bandwidths) {
        p.levels.push_back({{"m", b}});
    }
    return p;
}

RunTrace synthetic(std::size_t packets, std::size_t lack_every, unsigned x)
{
    RunTrace t;
    t.mode = "MLS-2";
    t.x = x;
    for (std::size_t i = 0; i < packets; ++i) {
        PacketRecord r;
        r.seq = static_cast<rtp::SeqNum>(i);
        r.nominal_send_time = 20ms * static_cast<std::int64_t>(i);
        r.actual_send_time = r.nominal_send_time;
        r.arrival_time = r.nominal_send_time;
        r.p_lack = 0.032;
        if (i % lack_every == 0) {
            r.is_lack = true;
            r.status = channel::Status::late;
            r.actual_send_time += 120ms;
            r.arrival_time = r.actual_send_time;
            r.mark_time = r.nominal_send_time;
            r.lower_bits = rtp::low_bits(r.seq, x);
        }
        t.records.push_back(r);
    }
    return t;
}

} // namespace

TEST(Analysis, TwoLevelBandwidth)
{
    const auto p = chain({1827.41, 3.16});
    EXPECT_DOUBLE_EQ(total_bandwidth(p), 1830.57);
    EXPECT_DOUBLE_EQ(total_bandwidth_single(p), 1830.57);
    EXPECT_EQ(p.k(), 2U);
}

TEST(Analysis, ThreeLevelBandwidth)
{
    EXPECT_DOUBLE_EQ(total_bandwidth(chain({1800, 5, 0.1})), 1805.1);
}

TEST(Analysis, MultipleMethodsPerLevel)
{
    auto p = chain({100, 10});
    p.levels[1].push_back({"second", 50});
    EXPECT_DOUBLE_EQ(total_bandwidth(p), 160.0);
    EXPECT_THROW(total_bandwidth_single(p), ValidationError);
    EXPECT_THROW(total_cost_single(p), ValidationError);
}

TEST(Analysis, CostBelowThreshold)
{
    auto p = chain({1827.41, 3.16});
    p.costs = {{1, 0, 0, 0, 0.7}};
    const auto v = total_cost(p);
    EXPECT_DOUBLE_EQ(v.cost, 0.7);
    EXPECT_FALSE(v.detectable);
    EXPECT_EQ(total_cost_single(p).cost, 0.7);
}

TEST(Analysis, CostReachingThresholdIsDetectable)
{
    auto p = chain({1, 1});
    p.costs = {{1, 0, 0, 0, 0.5}, {2, 0, 0, 0, 0.25}, {2, 0, 1, 0, 0.25}};
    const auto v = total_cost(p);
    EXPECT_EQ(v.cost, 1.0);
    EXPECT_TRUE(v.detectable);
    EXPECT_TRUE(total_cost_single(p).detectable);
}

TEST(Analysis, PlanValidation)
{
    MlsPlan p;
    EXPECT_THROW(p.validate(), ValidationError);
    p = chain({1});
    p.costs = {{1, 0, 1, 0, 0.1}}; // m must be below n
    EXPECT_THROW(p.validate(), ValidationError);
    p.costs = {{1, 0, 0, 0, 0.1}, {1, 0, 0, 0, 0.2}};
    EXPECT_THROW(p.validate(), ValidationError);
    p = chain({-1});
    EXPECT_THROW(p.validate(), ValidationError);
}

TEST(Analysis, PlanFromJson)
{
    const auto p = plan_from_json(R"({"levels":[[{"name":"o","bandwidth":0}],
        [{"name":"LACK","bandwidth":1827.41}],[{"name":"seq","bandwidth":3.16}]],
        "costs":[{"n":1,"o":0,"m":0,"p":0,"value":0.7}],"threshold":1.0})");
    EXPECT_DOUBLE_EQ(total_bandwidth(p), 1830.57);
    EXPECT_FALSE(total_cost(p).detectable);
    EXPECT_THROW(plan_from_json("{"), ParseError);
    EXPECT_THROW(plan_from_json(R"({"levels":[]})"), ParseError);
}

TEST(Analysis, MeasureSyntheticTrace)
{
    // 1000 packets over 20 s, LACK at positions 0, 32, ..., 992.
    auto t = synthetic(1000, 32, 2);
    ASSERT_EQ(std::count_if(t.records.begin(), t.records.end(),
                            [](const PacketRecord& r) { return r.is_lack; }),
              32);
    const auto m = measure_run(t);
    EXPECT_EQ(m.packets, 1000U);
    EXPECT_EQ(m.lack_packets, 32U);
    EXPECT_DOUBLE_EQ(m.duration_s, 20.0);
    EXPECT_DOUBLE_EQ(m.b_su, 1843.2);
    EXPECT_DOUBLE_EQ(m.b_sl, 3.2);
    EXPECT_DOUBLE_EQ(m.realized_p, 0.032);
    EXPECT_DOUBLE_EQ(m.loss_rate, 0.032);
    EXPECT_EQ(m.plc_count, 32U);
}

TEST(Analysis, DroppedLackCarriesNothing)
{
    auto t = synthetic(1000, 32, 1);
    t.records[0].status = channel::Status::dropped;
    t.records[0].arrival_time.reset();
    const auto m = measure_run(t);
    EXPECT_EQ(m.delivered_lack, 31U);
    EXPECT_DOUBLE_EQ(m.b_su, 31 * 1152 / 20.0);
    EXPECT_DOUBLE_EQ(m.realized_p, 0.032);
}

TEST(Analysis, MeasureRejectsInconsistentTraces)
{
    auto t = synthetic(100, 10, 2);
    t.records[10].lower_bits.pop_back();
    EXPECT_THROW(measure_run(t), ParseError);
    t = synthetic(100, 10, 2);
    t.records[10].status = channel::Status::on_time;
    EXPECT_THROW(measure_run(t), ParseError);
    t = synthetic(100, 10, 2);
    t.records[5].nominal_send_time += 1ms;
    EXPECT_THROW(measure_run(t), ParseError);
}

TEST(Analysis, Ci95StudentT)
{
    const std::vector<double> a{1, 2, 3, 4, 5};
    const auto i = ci95(a);
    EXPECT_DOUBLE_EQ(i.mean, 3.0);
    EXPECT_NEAR(i.half_width, 1.9632431614775607, 1e-12);

    const std::vector<double> b{1827.41, 1837.87, 1822.08, 1812.48};
    const auto j = ci95(b);
    EXPECT_NEAR(j.mean, 1824.96, 1e-9);
    EXPECT_NEAR(j.half_width, 16.85784093801046, 1e-9);

    const std::vector<double> same{2, 2, 2};
    EXPECT_EQ(ci95(same).half_width, 0.0);
    const std::vector<double> one{1};
    EXPECT_THROW(ci95(one), InsufficientSamplesError);
}
