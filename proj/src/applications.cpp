#include "mlsteg/applications.hpp"

#include <algorithm>

#include "mlsteg/errors.hpp"
#include "mlsteg/lack_upper.hpp"

namespace mlsteg::mls {

double expected_upper_bytes(const CallConfig& cfg)
{
    return cfg.expected_lack_packets() * static_cast<double>(cfg.lack.chunk_bytes(cfg.stream));
}

double expected_lower_bits(const CallConfig& cfg)
{
    return cfg.expected_lack_packets() * cfg.x;
}

namespace {

void require_upper(const CallConfig& cfg, std::size_t body_bytes)
{
    const double need = static_cast<double>(body_bytes + 4);
    if (expected_upper_bytes(cfg) < need) {
        throw CapacityError("upper steganogram needs " + std::to_string(body_bytes + 4) +
                            " bytes, the call is expected to carry " +
                            std::to_string(static_cast<long long>(expected_upper_bytes(cfg))));
    }
}

void require_lower(const CallConfig& cfg, std::size_t bits)
{
    if (cfg.x == 0) {
        throw CapacityError("application needs a lower-level channel (x >= 1)");
    }
    if (expected_lower_bits(cfg) < static_cast<double>(bits)) {
        throw CapacityError("lower channel needs " + std::to_string(bits) +
                            " bits, the call is expected to carry " +
                            std::to_string(static_cast<long long>(expected_lower_bits(cfg))));
    }
}

std::size_t serialized_bits(const std::vector<LowerItem>& items)
{
    std::size_t n = 0;
    for (const auto& i : items) {
        n += kFrameHeaderBits + i.frame.length();
    }
    return n;
}

std::vector<LowerItem> immediate(std::vector<LowerFrame> frames)
{
    std::vector<LowerItem> items;
    items.reserve(frames.size());
    for (auto& f : frames) {
        items.push_back(LowerItem{std::move(f), milliseconds{0}});
    }
    return items;
}

BitString data_payload(const std::vector<ReceivedFrame>& frames)
{
    BitString out;
    for (const auto& f : frames) {
        if (f.frame.type == FrameType::data) {
            out.insert(out.end(), f.frame.payload.begin(), f.frame.payload.end());
        }
    }
    return out;
}

} // namespace

KeyExchangeResult run_key_exchange(const Bytes& message, const KeyMaterial& key,
                                   const CallConfig& cfg)
{
    cfg.validate();
    if (key.key_bits.empty() || key.key_bits.size() > kMaxFramePayloadBits) {
        throw ParameterError("key must hold 1..8191 bits");
    }
    require_upper(cfg, message.size());
    require_lower(cfg, kFrameHeaderBits + key.key_bits.size());

    CallPlan plan;
    plan.upper_body = encipher(message, key);
    plan.lower = immediate({key_frame(key.key_bits)});

    KeyExchangeResult out;
    out.call = run_call(cfg, plan);

    std::optional<KeyMaterial> received_key;
    for (const auto& f : out.call.frames) {
        if (f.frame.type == FrameType::key) {
            received_key = KeyMaterial{f.frame.payload};
            break;
        }
    }
    const auto& up = out.call.upper;
    if (up.message) {
        out.ciphertext_received = up.message->body;
    } else {
        Bytes partial;
        for (const auto& c : out.call.chunks_received) {
            partial.insert(partial.end(), c.steg_bytes.begin(), c.steg_bytes.end());
        }
        if (partial.size() > 4) {
            const auto n = std::min(partial.size() - 4, up.received_bytes);
            out.ciphertext_received.assign(partial.begin() + 4,
                                           partial.begin() + 4 + static_cast<std::ptrdiff_t>(n));
        }
    }

    if (!received_key) {
        out.status = KeyExchangeStatus::awaiting_key;
        // Only a partial key may have arrived; it never touches the ciphertext.
        const auto pending = out.call.lower_received.size();
        out.key_bits_received =
            pending > kFrameHeaderBits ? std::min(pending - kFrameHeaderBits, key.key_bits.size()) : 0;
        return out;
    }
    out.key_bits_received = received_key->key_bits.size();
    if (!up.message) {
        out.status = KeyExchangeStatus::incomplete_ciphertext;
        return out;
    }
    out.status = KeyExchangeStatus::recovered;
    out.plaintext = decipher(up.message->body, *received_key);
    return out;
}

IntegrityVerdict run_integrity(const Bytes& message, const CallConfig& cfg,
                               const IntegrityOptions& opts)
{
    cfg.validate();
    IntegrityVerdict v;

    if (opts.variant == IntegrityVariant::hash) {
        require_upper(cfg, message.size());
        require_lower(cfg, kFrameHeaderBits + 128);

        CallPlan plan;
        plan.upper_body = message;
        plan.lower = immediate({hash_frame(md5(message))});
        plan.tamper = opts.tamper;
        v.call = run_call(cfg, plan);

        for (const auto& f : v.call.frames) {
            if (f.frame.type == FrameType::hash) {
                v.received_hash = decode_hash(f.frame);
                break;
            }
        }
        if (v.call.upper.message) {
            v.received = v.call.upper.message->body;
            v.local_hash = md5(v.received);
        }
        v.ok = v.received_hash && v.local_hash && *v.received_hash == *v.local_hash;
        v.resend_required = !v.ok;
        return v;
    }

    if (opts.part_bytes == 0) {
        throw ParameterError("part_bytes must be positive");
    }
    const std::size_t count = (message.size() + opts.part_bytes - 1) / opts.part_bytes;
    if (count > 0xffff) {
        throw ParameterError("too many parts for a 16-bit index");
    }

    CallPlan plan;
    std::vector<std::size_t> sent_parts;
    std::vector<LowerFrame> frames;
    for (std::size_t k = 0; k < count; ++k) {
        if (opts.suppressed_parts.contains(k)) {
            continue;
        }
        const auto b = k * opts.part_bytes;
        const auto e = std::min(message.size(), b + opts.part_bytes);
        plan.upper_body.insert(plan.upper_body.end(), message.begin() + static_cast<std::ptrdiff_t>(b),
                               message.begin() + static_cast<std::ptrdiff_t>(e));
        sent_parts.push_back(k);
        frames.push_back(seqidx_frame(
            PartIndex{static_cast<std::uint16_t>(k), static_cast<std::uint16_t>(count)}));
    }
    plan.lower = immediate(std::move(frames));
    require_upper(cfg, plan.upper_body.size());
    require_lower(cfg, serialized_bits(plan.lower));
    v.call = run_call(cfg, plan);

    std::vector<PartIndex> indices;
    for (const auto& f : v.call.frames) {
        if (f.frame.type == FrameType::seqidx) {
            indices.push_back(decode_seqidx(f.frame));
        }
    }
    if (!indices.empty()) {
        v.part_count = indices.front().count;
    }
    // The k-th received index labels the k-th part in the upper body.
    const Bytes body = v.call.upper.message ? v.call.upper.message->body : Bytes{};
    std::size_t off = 0;
    for (const auto& idx : indices) {
        if (off >= body.size()) {
            break;
        }
        // Every part but the last is part_bytes long; the last one ends the body.
        const bool last = idx.index + 1 == idx.count;
        const auto len = last ? body.size() - off : std::min(opts.part_bytes, body.size() - off);
        v.received.insert(v.received.end(), body.begin() + static_cast<std::ptrdiff_t>(off),
                          body.begin() + static_cast<std::ptrdiff_t>(off + len));
        off += len;
        v.received_parts.push_back(idx.index);
    }
    bool consecutive = true;
    for (std::size_t k = 1; k < v.received_parts.size(); ++k) {
        consecutive = consecutive && v.received_parts[k] == v.received_parts[k - 1] + 1;
    }
    if (v.part_count) {
        for (std::size_t k = 0; k < *v.part_count; ++k) {
            if (!std::binary_search(v.received_parts.begin(), v.received_parts.end(), k)) {
                v.missing_parts.push_back(k);
            }
        }
    }
    v.ok = v.part_count.has_value() && consecutive && v.missing_parts.empty() &&
           v.received_parts.size() == *v.part_count;
    v.resend_required = !v.ok;
    return v;
}

PhaseReport run_signalling(const SignallingOptions& opts, const CallConfig& base)
{
    CallConfig cfg = base;
    cfg.lack.p_lack = opts.phase1_p;
    cfg.duration = opts.phase_duration * 2 + opts.handover;
    cfg.validate();

    CallPlan plan;
    if (opts.send_ctrl) {
        const auto ctrl = control_frame(ControlMsg::set_p_lack(opts.phase2_p));
        // The frame may queue behind one keepalive frame.
        CallConfig handover = cfg;
        handover.duration = opts.handover;
        require_lower(handover, 2 * kFrameHeaderBits + ctrl.length());
        plan.lower.push_back(LowerItem{ctrl, opts.phase_duration});
    }

    PhaseReport rep;
    rep.call = run_call(cfg, plan);
    if (!rep.call.switches.empty()) {
        rep.ack_time = rep.call.switches.front().ack_time;
    }
    std::size_t lack1 = 0;
    std::size_t lack2 = 0;
    for (const auto& r : rep.call.trace.records) {
        const bool phase2 = rep.ack_time && r.nominal_send_time >= *rep.ack_time;
        (phase2 ? rep.packets2 : rep.packets1)++;
        if (r.is_lack) {
            (phase2 ? lack2 : lack1)++;
        }
    }
    rep.realized_p1 = rep.packets1 ? static_cast<double>(lack1) / static_cast<double>(rep.packets1) : 0.0;
    if (rep.ack_time && rep.packets2 > 0) {
        rep.realized_p2 = static_cast<double>(lack2) / static_cast<double>(rep.packets2);
    }
    return rep;
}

SplitResult run_split(const Bytes& message, std::size_t r, const CallConfig& cfg)
{
    cfg.validate();
    const auto bits = bytes_to_bits(message);
    const auto parts = split_steg(bits, r);

    CallPlan plan;
    BitString upper_frames;
    for (const auto& f : data_frames(parts.upper)) {
        append_frame(upper_frames, f);
    }
    plan.upper_body = bits_to_bytes(upper_frames);
    plan.lower = immediate(data_frames(parts.lower));
    require_upper(cfg, plan.upper_body.size());
    if (!parts.lower.empty()) {
        require_lower(cfg, serialized_bits(plan.lower));
    }

    SplitResult out;
    out.call = run_call(cfg, plan);
    BitString upper_rx;
    if (out.call.upper.message) {
        for (const auto& f : parse_frames(bytes_to_bits(out.call.upper.message->body)).frames) {
            if (f.type == FrameType::data) {
                upper_rx.insert(upper_rx.end(), f.payload.begin(), f.payload.end());
            }
        }
    }
    const auto lower_rx = data_payload(out.call.frames);
    if (upper_rx.size() == parts.upper.size() && lower_rx.size() == parts.lower.size()) {
        out.recovered = bits_to_bytes(merge_steg(upper_rx, lower_rx, r));
        out.ok = out.recovered == message;
    }
    return out;
}

SplitResult run_lower_only(const Bytes& message, const Bytes& masking, const CallConfig& cfg)
{
    cfg.validate();
    CallPlan plan;
    plan.upper_body = masking;
    plan.lower = immediate(data_frames(bytes_to_bits(message)));
    require_upper(cfg, masking.size());
    require_lower(cfg, serialized_bits(plan.lower));

    SplitResult out;
    out.call = run_call(cfg, plan);
    const auto lower_rx = data_payload(out.call.frames);
    if (lower_rx.size() == message.size() * 8) {
        out.recovered = bits_to_bytes(lower_rx);
        out.ok = out.recovered == message;
    }
    return out;
}

} // namespace mlsteg::mls
