#pragma once

#include "urvc/random.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace urvc::csa {

using NodeId = std::uint32_t;
using SlotIndex = std::uint32_t;

/// Probability mass over replica counts.
class DegreeDistribution {
public:
    /// entries: (degree >= 1, probability). Probabilities must sum to 1 within 1e-12.
    explicit DegreeDistribution(std::vector<std::pair<int, double>> entries);

    /// {2: 0.50, 3: 0.28, 8: 0.22}
    static DegreeDistribution irregular_default();
    /// Two or three replicas with equal probability.
    static DegreeDistribution two_or_three();
    /// Single replica: plain slotted ALOHA.
    static DegreeDistribution single();

    int sample(Rng& rng) const;
    int max_degree() const { return entries_.back().first; }
    double mean_degree() const;
    const std::vector<std::pair<int, double>>& entries() const { return entries_; }

private:
    std::vector<std::pair<int, double>> entries_; // sorted by degree
    std::vector<double> cumulative_;
};

/// Replica pointers carried by every copy of a node's packet.
struct PacketHeader {
    NodeId node = 0;
    std::vector<SlotIndex> replica_slots; // sorted, distinct
};

struct FrameSchedule {
    std::size_t n_slots = 0;
    std::vector<std::vector<NodeId>> transmissions; // per slot, sorted node ids
    std::vector<bool> erased;                       // per slot; set in receiver views only
    std::optional<NodeId> receiver;                 // empty: external observer

    bool is_erased(SlotIndex s) const { return !erased.empty() && erased[s]; }
};

struct Frame {
    FrameSchedule schedule;
    std::vector<PacketHeader> headers; // one per node, in node order
};

struct DecodeResult {
    std::vector<NodeId> decoded;                 // sorted
    int iterations = 0;                          // passes that decoded at least one packet
    std::vector<SlotIndex> residual_slots;       // non-erased slots still holding uncanceled packets
    std::vector<std::vector<NodeId>> decode_order; // nodes decoded in each pass
};

/// Draws one packet per node: degree i.i.d. from dist, slots a uniform
/// distinct subset of that size. Throws std::invalid_argument when a degree
/// can exceed n_slots or nodes is empty.
Frame build_frame(std::span<const NodeId> nodes, const DegreeDistribution& dist, std::size_t n_slots, Rng& rng);

/// Reusable variant of the header draw used by the Monte Carlo loops.
void sample_headers(std::span<const NodeId> nodes, const DegreeDistribution& dist, std::size_t n_slots, Rng& rng,
                    std::vector<PacketHeader>& out);

FrameSchedule schedule_from_headers(std::span<const PacketHeader> headers, std::size_t n_slots);

/// Half-duplex receivers lose the slots they transmit in.
FrameSchedule receiver_view(const FrameSchedule& schedule, std::optional<NodeId> receiver, bool half_duplex);

/// Iterative singleton decoding with replica cancellation. The receiver of
/// the view (if any) is never part of the decoded set. Throws
/// std::invalid_argument when headers and view disagree.
DecodeResult sic_decode(const FrameSchedule& view, std::span<const PacketHeader> headers);

/// Peeling decoder over packet indices. Each slot keeps a packet count and
/// the XOR of the packet indices it holds, so a singleton names its packet
/// directly. Only occupied slots are touched on load and reset.
class PeelingDecoder {
public:
    explicit PeelingDecoder(std::size_t n_slots = 0) { resize(n_slots); }

    void resize(std::size_t n_slots);
    std::size_t n_slots() const { return count_.size(); }

    /// headers must outlive the following run().
    void load(std::span<const PacketHeader> headers, std::span<const SlotIndex> erased = {});

    /// accept(slot, packet_index) may veto decoding a singleton (e.g. a
    /// channel error); a vetoed slot is dead for the rest of the frame.
    template <class Accept>
    int run(Accept&& accept);
    int run()
    {
        return run([](SlotIndex, std::size_t) { return true; });
    }

    bool decoded(std::size_t packet) const { return decoded_[packet] == kDecoded; }
    std::size_t decoded_count() const { return order_.size(); }
    /// Packet indices in decode order, with the pass each was decoded in.
    const std::vector<std::uint32_t>& order() const { return order_; }
    const std::vector<std::uint32_t>& pass_of() const { return pass_of_; }
    std::vector<SlotIndex> residual_slots() const;

private:
    enum SlotState : std::uint8_t { kOpen = 0, kErased = 1, kDead = 2 };
    enum PacketState : std::uint8_t { kPending = 0, kQueued = 1, kDecoded = 2 };

    std::span<const PacketHeader> headers_;
    std::vector<std::uint32_t> count_;
    std::vector<std::uint32_t> xor_;
    std::vector<std::uint8_t> slot_state_;
    std::vector<SlotIndex> touched_;
    std::vector<SlotIndex> erased_;
    std::vector<std::uint8_t> decoded_;
    std::vector<std::uint32_t> queue_;
    std::vector<std::uint32_t> order_;
    std::vector<std::uint32_t> pass_of_;
};

template <class Accept>
int PeelingDecoder::run(Accept&& accept)
{
    int passes = 0;
    for (;;) {
        queue_.clear();
        for (SlotIndex s : touched_) {
            if (slot_state_[s] != kOpen || count_[s] != 1)
                continue;
            const std::uint32_t p = xor_[s];
            if (decoded_[p] != kPending)
                continue;
            if (!accept(s, std::size_t(p))) {
                slot_state_[s] = kDead;
                continue;
            }
            decoded_[p] = kQueued;
            queue_.push_back(p);
        }
        if (queue_.empty())
            return passes;
        ++passes;
        for (std::uint32_t p : queue_) {
            decoded_[p] = kDecoded;
            order_.push_back(p);
            pass_of_.push_back(std::uint32_t(passes));
            for (SlotIndex s : headers_[p].replica_slots) {
                --count_[s];
                xor_[s] ^= p;
            }
        }
    }
}

/// Decode result of a finished PeelingDecoder run, in node ids.
DecodeResult collect_result(const PeelingDecoder& decoder, std::span<const PacketHeader> headers,
                            std::optional<NodeId> receiver, int iterations);

struct PlrEstimate {
    BinomialEstimate losses;                 // successes = lost receptions
    std::vector<BinomialEstimate> per_user;  // indexed by transmitting user
    double mean_sic_iterations = 0.0;
    std::uint64_t frames = 0;

    double plr() const { return losses.mean(); }
    double standard_error() const { return losses.standard_error(); }
};

/// Runs n_frames independent frames. Without half duplex a single external
/// observer receives every frame; with it, every user receives the others'
/// packets with its own transmit slots erased.
PlrEstimate plr_monte_carlo(std::size_t n_users, const DegreeDistribution& dist, std::size_t n_slots,
                            std::uint64_t n_frames, bool half_duplex, Rng& rng);

nlohmann::ordered_json to_json(const FrameSchedule& schedule);
nlohmann::ordered_json to_json(const DecodeResult& result);

} // namespace urvc::csa
