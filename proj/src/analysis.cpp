#include "mlsteg/analysis.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include "mlsteg/errors.hpp"

namespace mlsteg::analysis {

bool MlsPlan::single_method_per_level() const
{
    for (std::size_t n = 1; n < levels.size(); ++n) {
        if (levels[n].size() != 1) {
            return false;
        }
    }
    return true;
}

void MlsPlan::validate() const
{
    if (levels.size() < 2) {
        throw ValidationError("a plan needs the overt level and at least one steganographic level");
    }
    if (levels[0].size() != 1) {
        throw ValidationError("level 0 must hold exactly one entry, the overt channel");
    }
    for (std::size_t n = 1; n < levels.size(); ++n) {
        if (levels[n].empty()) {
            throw ValidationError("level " + std::to_string(n) + " has no methods");
        }
        for (const auto& m : levels[n]) {
            if (!(m.bandwidth >= 0.0)) {
                throw ValidationError("bandwidth of '" + m.name + "' must be >= 0");
            }
        }
    }
    if (!(threshold >= 0.0)) {
        throw ValidationError("threshold must be >= 0");
    }
    std::set<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> seen;
    for (const auto& c : costs) {
        if (c.n == 0 || c.n >= levels.size() || c.m >= c.n) {
            throw ValidationError("cost entry needs 1 <= n <= k and m < n");
        }
        if (c.o >= levels[c.n].size() || c.p >= levels[c.m].size()) {
            throw ValidationError("cost entry refers to a method that does not exist");
        }
        if (!(c.value >= 0.0)) {
            throw ValidationError("costs must be >= 0");
        }
        if (!seen.emplace(c.n, c.o, c.m, c.p).second) {
            throw ValidationError("duplicate cost entry");
        }
    }
}

double total_bandwidth(const MlsPlan& plan)
{
    plan.validate();
    double sum = 0.0;
    for (std::size_t n = 1; n <= plan.k(); ++n) {
        for (const auto& method : plan.levels[n]) {
            sum += method.bandwidth;
        }
    }
    return sum;
}

double total_bandwidth_single(const MlsPlan& plan)
{
    plan.validate();
    if (!plan.single_method_per_level()) {
        throw ValidationError("single-method form needs exactly one method per level");
    }
    double sum = 0.0;
    for (std::size_t n = 1; n <= plan.k(); ++n) {
        sum += plan.levels[n].front().bandwidth;
    }
    return sum;
}

CostVerdict total_cost(const MlsPlan& plan)
{
    plan.validate();
    // Dense C[n][o][m][p]; absent entries are zero.
    std::vector<std::vector<std::vector<std::vector<double>>>> c(plan.levels.size());
    for (std::size_t n = 1; n <= plan.k(); ++n) {
        c[n].resize(plan.levels[n].size());
        for (auto& per_o : c[n]) {
            per_o.resize(n);
            for (std::size_t m = 0; m < n; ++m) {
                per_o[m].assign(plan.levels[m].size(), 0.0);
            }
        }
    }
    for (const auto& e : plan.costs) {
        c[e.n][e.o][e.m][e.p] = e.value;
    }

    double sum = 0.0;
    for (std::size_t n = 1; n <= plan.k(); ++n) {
        for (std::size_t o = 0; o < plan.levels[n].size(); ++o) {
            for (std::size_t m = 0; m < n; ++m) {
                for (std::size_t p = 0; p < plan.levels[m].size(); ++p) {
                    sum += c[n][o][m][p];
                }
            }
        }
    }
    return CostVerdict{sum, sum >= plan.threshold};
}

CostVerdict total_cost_single(const MlsPlan& plan)
{
    plan.validate();
    if (!plan.single_method_per_level()) {
        throw ValidationError("single-method form needs exactly one method per level");
    }
    std::vector<std::vector<double>> c(plan.levels.size());
    for (std::size_t n = 1; n <= plan.k(); ++n) {
        c[n].assign(n, 0.0);
    }
    for (const auto& e : plan.costs) {
        c[e.n][e.m] = e.value;
    }
    double sum = 0.0;
    for (std::size_t n = 1; n <= plan.k(); ++n) {
        for (std::size_t m = 0; m < n; ++m) {
            sum += c[n][m];
        }
    }
    return CostVerdict{sum, sum >= plan.threshold};
}

RunMetrics measure_run(const RunTrace& trace)
{
    if (trace.digest_bytes >= trace.frame_bytes || trace.frame_duration.count() <= 0) {
        throw ParseError("trace header is inconsistent");
    }
    RunMetrics m;
    m.packets = trace.records.size();
    if (m.packets == 0) {
        return m;
    }
    const auto chunk_bits = static_cast<std::uint64_t>(trace.frame_bytes - trace.digest_bytes) * 8;
    std::size_t lost = 0;
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const auto& r = trace.records[i];
        if (r.nominal_send_time != trace.frame_duration * static_cast<std::int64_t>(i)) {
            throw ParseError("record " + std::to_string(i) + " is off the frame grid");
        }
        if (r.status != channel::Status::on_time) {
            ++lost;
        }
        if (!r.is_lack) {
            continue;
        }
        if (r.lower_bits.size() != trace.x) {
            throw ParseError("record " + std::to_string(i) + " carries " +
                             std::to_string(r.lower_bits.size()) + " lower bits, header says " +
                             std::to_string(trace.x));
        }
        ++m.lack_packets;
        if (r.status == channel::Status::on_time) {
            throw ParseError("record " + std::to_string(i) + " is a LACK packet played on time");
        }
        if (r.status == channel::Status::late) {
            ++m.delivered_lack;
        }
    }
    m.duration_s = static_cast<double>(m.packets) *
                   std::chrono::duration<double>(trace.frame_duration).count();
    m.upper_bits = m.delivered_lack * chunk_bits;
    m.lower_bits = static_cast<std::uint64_t>(m.delivered_lack) * trace.x;
    m.b_su = static_cast<double>(m.upper_bits) / m.duration_s;
    m.b_sl = static_cast<double>(m.lower_bits) / m.duration_s;
    m.realized_p = static_cast<double>(m.lack_packets) / static_cast<double>(m.packets);
    m.loss_rate = static_cast<double>(lost) / static_cast<double>(m.packets);
    m.plc_count = lost;
    return m;
}

Interval ci95(std::span<const double> samples)
{
    const auto n = samples.size();
    if (n < 2) {
        throw InsufficientSamplesError("a confidence interval needs at least two samples");
    }
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : samples) {
        ss += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const boost::math::students_t dist(static_cast<double>(n - 1));
    const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
    return Interval{mean, t * sd / std::sqrt(static_cast<double>(n))};
}

MlsPlan plan_from_json(std::string_view text)
{
    using nlohmann::json;
    MlsPlan plan;
    try {
        const auto j = json::parse(text);
        for (const auto& level : j.at("levels")) {
            auto& out = plan.levels.emplace_back();
            for (const auto& m : level) {
                out.push_back(MethodSpec{m.value("name", std::string{}), m.at("bandwidth").get<double>()});
            }
        }
        if (j.contains("costs")) {
            for (const auto& c : j.at("costs")) {
                plan.costs.push_back(CostEntry{c.at("n").get<std::size_t>(), c.at("o").get<std::size_t>(),
                                               c.at("m").get<std::size_t>(), c.at("p").get<std::size_t>(),
                                               c.at("value").get<double>()});
            }
        }
        plan.threshold = j.value("threshold", 1.0);
    } catch (const json::exception& e) {
        throw ParseError(std::string("plan: ") + e.what());
    }
    try {
        plan.validate();
    } catch (const ValidationError& e) {
        throw ParseError(std::string("plan: ") + e.what());
    }
    return plan;
}

} // namespace mlsteg::analysis
