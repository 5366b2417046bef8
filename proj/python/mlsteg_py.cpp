#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "mlsteg/analysis.hpp"
#include "mlsteg/errors.hpp"
#include "mlsteg/experiment.hpp"
#include "mlsteg/lower_frame.hpp"
#include "mlsteg/md5.hpp"
#include "mlsteg/seq_lower.hpp"
#include "mlsteg/services.hpp"

namespace py = pybind11;
using namespace mlsteg;

namespace {

// Bits cross the boundary as '0'/'1' strings, byte strings as `bytes`.
Bytes to_bytes(const py::bytes& b)
{
    const std::string s = b;
    return Bytes(s.begin(), s.end());
}

py::bytes from_bytes(const Bytes& b)
{
    return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

mls::KeyMaterial key_from(const std::string& key_bits)
{
    return mls::KeyMaterial{bits_from_string(key_bits)};
}

py::dict row_dict(const harness::ReportRow& r)
{
    py::dict d;
    d["mode"] = r.mode;
    d["metric"] = r.metric;
    d["average"] = r.average;
    d["ci95"] = r.ci95 ? py::cast(*r.ci95) : py::none();
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Core routines of the mlsteg simulator";

    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<SizeError>(m, "SizeError", PyExc_ValueError);
    py::register_exception<CapacityError>(m, "CapacityError", PyExc_ValueError);
    py::register_exception<InsufficientSamplesError>(m, "InsufficientSamplesError",
                                                     PyExc_ValueError);

    m.attr("UPPER_ONLY") = py::int_(mls::kUpperOnly);

    m.def("low_bits", [](rtp::SeqNum seq, unsigned x) { return to_string(rtp::low_bits(seq, x)); },
          py::arg("seq"), py::arg("x"));
    m.def(
        "match_seq",
        [](rtp::SeqNum cand, const std::string& bits) {
            const auto b = bits_from_string(bits);
            return lower::match_seq(cand, b, static_cast<unsigned>(b.size()));
        },
        py::arg("candidate"), py::arg("bits"));
    m.def("decode_bits", [](rtp::SeqNum seq, unsigned x) { return to_string(lower::decode_bits(seq, x)); },
          py::arg("seq"), py::arg("x"));

    m.def("md5", [](const py::bytes& data) { return to_hex(md5(to_bytes(data))); }, py::arg("data"),
          "Hex digest");
    m.def(
        "encipher",
        [](const py::bytes& msg, const std::string& key_bits) {
            return from_bytes(mls::encipher(to_bytes(msg), key_from(key_bits)));
        },
        py::arg("message"), py::arg("key_bits"));
    m.def(
        "decipher",
        [](const py::bytes& ct, const std::string& key_bits) {
            return from_bytes(mls::decipher(to_bytes(ct), key_from(key_bits)));
        },
        py::arg("ciphertext"), py::arg("key_bits"));

    m.def(
        "split_steg",
        [](const std::string& bits, std::size_t r) {
            const auto p = mls::split_steg(bits_from_string(bits), r);
            return py::make_tuple(to_string(p.upper), to_string(p.lower));
        },
        py::arg("bits"), py::arg("r"));
    m.def(
        "merge_steg",
        [](const std::string& upper, const std::string& lower, std::size_t r) {
            return to_string(mls::merge_steg(bits_from_string(upper), bits_from_string(lower), r));
        },
        py::arg("upper"), py::arg("lower"), py::arg("r"));

    m.def(
        "serialize_frame",
        [](unsigned type, const std::string& payload) {
            if (type > 4) {
                throw ParameterError("frame type must be 0..4");
            }
            return to_string(
                mls::serialize({static_cast<mls::FrameType>(type), bits_from_string(payload)}));
        },
        py::arg("type"), py::arg("payload"));
    m.def(
        "parse_frames",
        [](const std::string& bits) {
            const auto p = mls::parse_frames(bits_from_string(bits));
            py::list frames;
            for (const auto& f : p.frames) {
                frames.append(py::make_tuple(static_cast<unsigned>(f.type), to_string(f.payload)));
            }
            py::dict d;
            d["frames"] = frames;
            d["consumed_bits"] = p.consumed_bits;
            d["terminated"] = p.terminated;
            d["truncated"] = p.truncated;
            return d;
        },
        py::arg("bits"));

    m.def(
        "total_bandwidth",
        [](const std::string& plan_json) {
            return analysis::total_bandwidth(analysis::plan_from_json(plan_json));
        },
        py::arg("plan_json"));
    m.def(
        "total_cost",
        [](const std::string& plan_json) {
            const auto v = analysis::total_cost(analysis::plan_from_json(plan_json));
            return py::make_tuple(v.cost, v.detectable);
        },
        py::arg("plan_json"), "Returns (cost, detectable)");
    m.def(
        "ci95",
        [](const std::vector<double>& samples) {
            const auto i = analysis::ci95(samples);
            return py::make_tuple(i.mean, i.half_width);
        },
        py::arg("samples"), "Returns (mean, half_width)");

    m.def(
        "run_experiment",
        [](const std::string& config_json) {
            const auto cfg = harness::config_from_json(config_json);
            harness::ExperimentReport rep;
            {
                py::gil_scoped_release release;
                rep = harness::run_experiment(cfg);
            }
            py::list rows;
            for (const auto& r : rep.rows) {
                rows.append(row_dict(r));
            }
            return rows;
        },
        py::arg("config_json") = "{}", "Runs an experiment described by a JSON config");
}
