#pragma once

#include "urvc/csa_mac.hpp"
#include "urvc/random.hpp"

#include <map>
#include <optional>
#include <set>
#include <vector>

namespace urvc::baseline {

using csa::NodeId;
using csa::SlotIndex;

/// Slot ownership for the simplified self-organizing reservation TDMA.
struct ReservationState {
    std::vector<std::optional<NodeId>> owner_of_slot;
    std::map<NodeId, SlotIndex> node_slot;
    std::vector<bool> free_last_frame; // no lone transmission heard last frame

    explicit ReservationState(std::size_t n_slots = 0)
        : owner_of_slot(n_slots), free_last_frame(n_slots, true)
    {
    }

    std::size_t n_slots() const { return owner_of_slot.size(); }
    bool is_consistent() const;
};

struct TransmitOutcome {
    std::optional<SlotIndex> slot; // empty: no free slot was observed, node deferred
    bool success = false;          // alone in its slot
    bool reserved = false;         // holds a reservation after the step
};

struct StepResult {
    ReservationState state;
    std::map<NodeId, TransmitOutcome> outcomes;
};

/// One frame. Reserved nodes transmit in their slot, unreserved ones pick a
/// uniform slot among those observed free last frame (idle or collided), and a lone transmitter
/// keeps (or acquires) the slot. Departed nodes release their reservation.
StepResult reservation_tdma_step(const ReservationState& state, const std::set<NodeId>& active_nodes,
                                 std::size_t n_slots, Rng& rng);

/// Degree-1 CSA with an external observer; bit-identical to
/// csa::plr_monte_carlo with DegreeDistribution::single() for equal streams.
csa::PlrEstimate slotted_aloha(std::size_t n_users, std::size_t n_slots, std::uint64_t n_frames, Rng& rng);

} // namespace urvc::baseline
