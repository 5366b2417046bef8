#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "mlsteg/md5.hpp"
#include "mlsteg/services.hpp"
#include "mlsteg/session.hpp"

namespace mlsteg::mls {

// Applications of the lower channel. Each one checks capacity against the
// planned call before simulating (throwing CapacityError), runs the call and
// reports what the steganographic receiver could do with what arrived.

// ---- ciphered steganogram + key on the lower level -------------------------

enum class KeyExchangeStatus {
    recovered,
    /// Ciphertext kept; the key did not finish arriving.
    awaiting_key,
    /// Key arrived but the ciphertext is incomplete.
    incomplete_ciphertext,
};

struct KeyExchangeResult {
    KeyExchangeStatus status = KeyExchangeStatus::awaiting_key;
    /// Set only when status is recovered.
    std::optional<Bytes> plaintext;
    Bytes ciphertext_received;
    std::size_t key_bits_received = 0;
    CallResult call;
};

KeyExchangeResult run_key_exchange(const Bytes& message, const KeyMaterial& key,
                                   const CallConfig& cfg);

// ---- integrity -------------------------------------------------------------

enum class IntegrityVariant { hash, seqidx };

struct IntegrityOptions {
    IntegrityVariant variant = IntegrityVariant::hash;
    /// hash variant: receiver-side corruption after the per-packet digest check.
    ChunkTamper tamper;
    /// seqidx variant: parts the sender never transmits.
    std::set<std::size_t> suppressed_parts;
    /// seqidx variant: bytes per indexed part.
    std::size_t part_bytes = 144;
};

struct IntegrityVerdict {
    bool ok = false;
    /// The steganogram must be sent again in a later call.
    bool resend_required = true;
    std::optional<Md5Digest> received_hash;
    std::optional<Md5Digest> local_hash;
    std::vector<std::size_t> received_parts;
    std::vector<std::size_t> missing_parts;
    std::optional<std::size_t> part_count;
    /// Message as reassembled (hash variant) or with missing parts omitted (seqidx).
    Bytes received;
    CallResult call;
};

IntegrityVerdict run_integrity(const Bytes& message, const CallConfig& cfg,
                               const IntegrityOptions& opts);

// ---- signalling ------------------------------------------------------------

struct SignallingOptions {
    double phase1_p = 0.032;
    double phase2_p = 0.016;
    /// Length of each phase. The CTRL frame is queued when phase 1 ends.
    milliseconds phase_duration{540'000};
    /// Extra call time for the CTRL frame and ack to get through.
    milliseconds handover{60'000};
    bool send_ctrl = true;
};

struct PhaseReport {
    std::optional<milliseconds> ack_time;
    double realized_p1 = 0.0;
    /// Absent when no switch happened.
    std::optional<double> realized_p2;
    std::size_t packets1 = 0;
    std::size_t packets2 = 0;
    CallResult call;
};

/// The call runs for 2 * phase_duration + handover; cfg.duration and cfg.lack.p_lack are overridden.
PhaseReport run_signalling(const SignallingOptions& opts, const CallConfig& cfg);

// ---- divided steganogram ---------------------------------------------------

struct SplitResult {
    bool ok = false;
    Bytes recovered;
    CallResult call;
};

/// Interleaves the message bits over both levels with ratio r.
SplitResult run_split(const Bytes& message, std::size_t r, const CallConfig& cfg);

/// Whole message on the lower level; the upper level carries `masking`
/// bytes the receiver discards.
SplitResult run_lower_only(const Bytes& message, const Bytes& masking, const CallConfig& cfg);

// ---- capacity helpers ------------------------------------------------------

/// Expected upper steganogram bytes over the planned call (excluding nothing).
double expected_upper_bytes(const CallConfig& cfg);
/// Expected lower bits over the planned call.
double expected_lower_bits(const CallConfig& cfg);

} // namespace mlsteg::mls
