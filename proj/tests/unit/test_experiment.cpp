#include <gtest/gtest.h>

#include "mlsteg/errors.hpp"
#include "mlsteg/experiment.hpp"

using namespace mlsteg;
using namespace mlsteg::harness;

namespace {

const ReportRow& row(const ExperimentReport& r, std::string_view metric)
{
    for (const auto& x : r.rows) {
        if (x.metric == metric) {
            return x;
        }
    }
    throw std::out_of_range(std::string(metric));
}

ExperimentConfig quick(Mode m)
{
    ExperimentConfig c;
    c.mode = m;
    c.duration_s = 60;
    c.reps = 3;
    c.seed = 21;
    return c;
}

} // namespace

TEST(Experiment, ModeNames)
{
    EXPECT_EQ(mode_from_string("mls-2"), Mode::mls2);
    EXPECT_EQ(to_string(Mode::lack), "LACK");
    EXPECT_EQ(application_from_string("key_exchange"), Application::key_exchange);
    EXPECT_THROW(mode_from_string("MLS-9"), ValidationError);
}

TEST(Experiment, BitsPerLack)
{
    auto c = quick(Mode::mls3);
    EXPECT_EQ(c.bits_per_lack(), 3U);
    c.x = 2;
    EXPECT_THROW(c.validate(), ValidationError);
    c.mode = Mode::custom;
    EXPECT_EQ(c.bits_per_lack(), 2U);
    c.x.reset();
    EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Experiment, RepSeedsAreSplitMixOutputs)
{
    const auto s = rep_seeds(0, 2);
    ASSERT_EQ(s.size(), 2U);
    EXPECT_EQ(s[0], 0xE220A8397B1DCDAFULL);
    EXPECT_EQ(s[1], 0x6E789E6AA1B965F4ULL);
}

TEST(Experiment, ReportRowsAndDeterminism)
{
    const auto a = run_experiment(quick(Mode::mls2));
    const auto b = run_experiment(quick(Mode::mls2));
    EXPECT_EQ(to_csv(a.rows), to_csv(b.rows));
    EXPECT_EQ(a.runs.size(), 3U);
    for (auto m : {"P_LACK", "B_SU", "B_SL", "loss_rate", "plc_count", "upper_recovered",
                   "lower_recovered"}) {
        EXPECT_NO_THROW(row(a, m)) << m;
    }
    EXPECT_EQ(row(a, "upper_recovered").average, 1.0);
    EXPECT_EQ(row(a, "lower_recovered").average, 1.0);
    EXPECT_TRUE(row(a, "B_SU").ci95.has_value());
    const auto csv = to_csv(a.rows);
    EXPECT_EQ(csv.rfind("mode,metric,average,ci95\n", 0), 0U);
    EXPECT_NE(csv.find("\nMLS-2,B_SL,"), std::string::npos);
}

TEST(Experiment, SingleRepHasNoInterval)
{
    auto c = quick(Mode::lack);
    c.reps = 1;
    const auto r = run_experiment(c);
    EXPECT_FALSE(row(r, "B_SU").ci95.has_value());
    EXPECT_EQ(row(r, "B_SL").average, 0.0);
    EXPECT_NE(to_json(r.rows).find("null"), std::string::npos);
}

TEST(Experiment, TracesKeptOnRequest)
{
    const auto r = run_experiment(quick(Mode::mls1), true);
    ASSERT_EQ(r.traces.size(), 3U);
    EXPECT_EQ(r.traces[1].rep, 1U);
    EXPECT_EQ(r.traces[0].mode, "MLS-1");
    EXPECT_EQ(r.traces[0].records.size(), 3000U);
}

TEST(Experiment, ApplicationsReportOutcome)
{
    auto c = quick(Mode::mls1);
    c.duration_s = 540;
    c.reps = 2;
    c.application = Application::key_exchange;
    EXPECT_EQ(row(run_experiment(c), "key_recovered").average, 1.0);
    c.application = Application::integrity;
    EXPECT_EQ(row(run_experiment(c), "integrity_ok").average, 1.0);
    c.application = Application::split;
    c.message_bytes = 256;
    EXPECT_EQ(row(run_experiment(c), "split_recovered").average, 1.0);
}

TEST(Experiment, ConfigFromJson)
{
    const auto c = config_from_json(R"({"mode":"MLS-3","p_lack":0.02,"reps":4,"seed":9,
        "lack":{"min_delay_ms":150},"channel":{"extra_loss_p":0.01}})");
    EXPECT_EQ(c.mode, Mode::mls3);
    EXPECT_DOUBLE_EQ(c.p_lack, 0.02);
    EXPECT_EQ(c.reps, 4U);
    EXPECT_EQ(c.seed, 9U);
    EXPECT_EQ(c.lack.min_delay.count(), 150);
    EXPECT_DOUBLE_EQ(c.channel.extra_loss_p, 0.01);
    EXPECT_THROW(config_from_json(R"({"bogus":1})"), ParseError);
    EXPECT_THROW(config_from_json("[1,"), ParseError);
}

TEST(Experiment, ValidationMessages)
{
    auto c = quick(Mode::mls1);
    c.lack.min_delay = std::chrono::milliseconds(40);
    try {
        c.validate();
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("min_delay"), std::string::npos);
    }
    c = quick(Mode::mls1);
    c.reps = 0;
    EXPECT_THROW(c.validate(), ValidationError);
}
