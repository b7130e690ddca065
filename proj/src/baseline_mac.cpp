#include "urvc/baseline_mac.hpp"

#include <stdexcept>

namespace urvc::baseline {

bool ReservationState::is_consistent() const
{
    if (free_last_frame.size() != owner_of_slot.size())
        return false;
    std::size_t owned = 0;
    for (std::size_t s = 0; s < owner_of_slot.size(); ++s) {
        if (!owner_of_slot[s])
            continue;
        ++owned;
        const auto it = node_slot.find(*owner_of_slot[s]);
        if (it == node_slot.end() || it->second != s)
            return false;
    }
    return owned == node_slot.size();
}

StepResult reservation_tdma_step(const ReservationState& state, const std::set<NodeId>& active_nodes,
                                 std::size_t n_slots, Rng& rng)
{
    if (n_slots < 1)
        throw std::invalid_argument("n_slots must be >= 1");

    StepResult out{state.n_slots() == n_slots ? state : ReservationState(n_slots), {}};
    ReservationState& st = out.state;

    for (auto it = st.node_slot.begin(); it != st.node_slot.end();) {
        if (!active_nodes.contains(it->first)) {
            st.owner_of_slot[it->second].reset();
            it = st.node_slot.erase(it);
        } else {
            ++it;
        }
    }

    std::vector<SlotIndex> candidates;
    for (SlotIndex s = 0; s < n_slots; ++s)
        if (st.free_last_frame[s] && !st.owner_of_slot[s])
            candidates.push_back(s);

    std::vector<std::vector<NodeId>> occupancy(n_slots);
    for (NodeId node : active_nodes) {
        TransmitOutcome o;
        if (const auto it = st.node_slot.find(node); it != st.node_slot.end()) {
            o.slot = it->second;
        } else if (!candidates.empty()) {
            o.slot = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
        }
        if (o.slot)
            occupancy[*o.slot].push_back(node);
        out.outcomes.emplace(node, o);
    }

    for (auto& [node, o] : out.outcomes) {
        if (!o.slot)
            continue;
        o.success = occupancy[*o.slot].size() == 1;
        if (o.success && !st.node_slot.contains(node)) {
            st.node_slot.emplace(node, *o.slot);
            st.owner_of_slot[*o.slot] = node;
        }
        o.reserved = st.node_slot.contains(node);
    }
    for (SlotIndex s = 0; s < n_slots; ++s)
        st.free_last_frame[s] = occupancy[s].size() != 1;
    return out;
}

csa::PlrEstimate slotted_aloha(std::size_t n_users, std::size_t n_slots, std::uint64_t n_frames, Rng& rng)
{
    return csa::plr_monte_carlo(n_users, csa::DegreeDistribution::single(), n_slots, n_frames, false, rng);
}

} // namespace urvc::baseline
