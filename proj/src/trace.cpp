#include "mlsteg/trace.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

#include "mlsteg/errors.hpp"

namespace mlsteg::analysis {

using nlohmann::json;

namespace {

json header_json(const RunTrace& t)
{
    return json{{"run",
                 {{"mode", t.mode},
                  {"rep", t.rep},
                  {"frame_bytes", t.frame_bytes},
                  {"digest_bytes", t.digest_bytes},
                  {"x", t.x},
                  {"frame_duration_ms", t.frame_duration.count()},
                  {"packets", t.records.size()}}}};
}

json record_json(const PacketRecord& r)
{
    json j;
    j["seq"] = r.seq;
    j["nominal_send_time"] = r.nominal_send_time.count();
    j["actual_send_time"] = r.actual_send_time.count();
    j["arrival_time"] = r.arrival_time ? json(r.arrival_time->count()) : json(nullptr);
    j["status"] = std::string(channel::to_string(r.status));
    j["is_lack"] = r.is_lack;
    j["lower_bits"] = to_string(r.lower_bits);
    j["mark_time"] = r.mark_time ? json(r.mark_time->count()) : json(nullptr);
    j["p_lack"] = r.p_lack;
    return j;
}

template <typename T>
T field(const json& j, const char* key, std::size_t line)
{
    if (!j.contains(key)) {
        throw ParseError("trace line " + std::to_string(line) + ": missing field '" + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError("trace line " + std::to_string(line) + ": bad field '" + key +
                         "': " + e.what());
    }
}

std::optional<milliseconds> optional_ms(const json& j, const char* key, std::size_t line)
{
    if (!j.contains(key)) {
        throw ParseError("trace line " + std::to_string(line) + ": missing field '" + key + "'");
    }
    if (j.at(key).is_null()) {
        return std::nullopt;
    }
    return milliseconds{field<std::int64_t>(j, key, line)};
}

PacketRecord parse_record(const json& j, std::size_t line)
{
    PacketRecord r;
    const auto seq = field<std::int64_t>(j, "seq", line);
    if (seq < 0 || seq > 0xffff) {
        throw ParseError("trace line " + std::to_string(line) + ": seq out of range");
    }
    r.seq = static_cast<rtp::SeqNum>(seq);
    r.nominal_send_time = milliseconds{field<std::int64_t>(j, "nominal_send_time", line)};
    r.actual_send_time = milliseconds{field<std::int64_t>(j, "actual_send_time", line)};
    r.arrival_time = optional_ms(j, "arrival_time", line);
    r.status = channel::status_from_string(field<std::string>(j, "status", line));
    r.is_lack = field<bool>(j, "is_lack", line);
    try {
        r.lower_bits = bits_from_string(field<std::string>(j, "lower_bits", line));
    } catch (const ParameterError&) {
        throw ParseError("trace line " + std::to_string(line) + ": lower_bits is not a bit string");
    }
    r.mark_time = optional_ms(j, "mark_time", line);
    r.p_lack = j.contains("p_lack") ? field<double>(j, "p_lack", line) : 0.0;
    return r;
}

} // namespace

void write_jsonl(std::ostream& out, const RunTrace& trace)
{
    out << header_json(trace).dump() << '\n';
    for (const auto& r : trace.records) {
        out << record_json(r).dump() << '\n';
    }
}

std::vector<RunTrace> read_jsonl(std::istream& in)
{
    std::vector<RunTrace> runs;
    std::size_t expected = 0;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.empty()) {
            continue;
        }
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ParseError("trace line " + std::to_string(line) + ": " + e.what());
        }
        if (!j.is_object()) {
            throw ParseError("trace line " + std::to_string(line) + ": expected an object");
        }
        if (j.contains("run")) {
            if (!runs.empty() && runs.back().records.size() != expected) {
                throw ParseError("trace run ended after " +
                                 std::to_string(runs.back().records.size()) + " of " +
                                 std::to_string(expected) + " records");
            }
            const auto& h = j.at("run");
            RunTrace t;
            t.mode = field<std::string>(h, "mode", line);
            t.rep = field<std::size_t>(h, "rep", line);
            t.frame_bytes = field<std::size_t>(h, "frame_bytes", line);
            t.digest_bytes = field<std::size_t>(h, "digest_bytes", line);
            t.x = field<unsigned>(h, "x", line);
            t.frame_duration = milliseconds{field<std::int64_t>(h, "frame_duration_ms", line)};
            expected = field<std::size_t>(h, "packets", line);
            if (t.digest_bytes >= t.frame_bytes || t.frame_duration.count() <= 0 || t.x > 16) {
                throw ParseError("trace line " + std::to_string(line) + ": inconsistent run header");
            }
            t.records.reserve(expected);
            runs.push_back(std::move(t));
            continue;
        }
        if (runs.empty()) {
            throw ParseError("trace line " + std::to_string(line) + ": record before run header");
        }
        if (runs.back().records.size() == expected) {
            throw ParseError("trace line " + std::to_string(line) + ": more records than declared");
        }
        runs.back().records.push_back(parse_record(j, line));
    }
    if (!runs.empty() && runs.back().records.size() != expected) {
        throw ParseError("trace ended after " + std::to_string(runs.back().records.size()) +
                         " of " + std::to_string(expected) + " records");
    }
    return runs;
}

} // namespace mlsteg::analysis
