#include "urvc/csa_mac.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

namespace urvc::csa {

DegreeDistribution::DegreeDistribution(std::vector<std::pair<int, double>> entries) : entries_(std::move(entries))
{
    if (entries_.empty())
        throw std::invalid_argument("degree distribution is empty");
    std::sort(entries_.begin(), entries_.end());
    double total = 0.0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto [degree, p] = entries_[i];
        if (degree < 1)
            throw std::invalid_argument("degree must be >= 1");
        if (i > 0 && entries_[i - 1].first == degree)
            throw std::invalid_argument("duplicate degree " + std::to_string(degree));
        if (!(p >= 0.0))
            throw std::invalid_argument("degree probability must be non-negative");
        total += p;
        cumulative_.push_back(total);
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("degree probabilities must sum to 1");
}

DegreeDistribution DegreeDistribution::irregular_default()
{
    return DegreeDistribution({{2, 0.50}, {3, 0.28}, {8, 0.22}});
}

DegreeDistribution DegreeDistribution::two_or_three() { return DegreeDistribution({{2, 0.5}, {3, 0.5}}); }

DegreeDistribution DegreeDistribution::single() { return DegreeDistribution({{1, 1.0}}); }

int DegreeDistribution::sample(Rng& rng) const
{
    if (entries_.size() == 1)
        return entries_.front().first;
    const double u = std::uniform_real_distribution<double>(0.0, cumulative_.back())(rng);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto idx = std::min<std::size_t>(it - cumulative_.begin(), entries_.size() - 1);
    return entries_[idx].first;
}

double DegreeDistribution::mean_degree() const
{
    double m = 0.0;
    for (auto [d, p] : entries_)
        m += d * p;
    return m;
}

namespace {

// Floyd's algorithm: a uniform d-subset of [0, n) with exactly d draws.
void sample_distinct(std::size_t n, int d, Rng& rng, std::vector<SlotIndex>& out)
{
    out.clear();
    for (std::size_t j = n - std::size_t(d); j < n; ++j) {
        const auto t = SlotIndex(std::uniform_int_distribution<std::size_t>(0, j)(rng));
        if (std::find(out.begin(), out.end(), t) == out.end())
            out.push_back(t);
        else
            out.push_back(SlotIndex(j));
    }
    std::sort(out.begin(), out.end());
}

void check_frame_args(const DegreeDistribution& dist, std::size_t n_slots)
{
    if (std::size_t(dist.max_degree()) > n_slots)
        throw std::invalid_argument("degree exceeds frame");
}

} // namespace

void sample_headers(std::span<const NodeId> nodes, const DegreeDistribution& dist, std::size_t n_slots, Rng& rng,
                    std::vector<PacketHeader>& out)
{
    check_frame_args(dist, n_slots);
    out.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        out[i].node = nodes[i];
        sample_distinct(n_slots, dist.sample(rng), rng, out[i].replica_slots);
    }
}

FrameSchedule schedule_from_headers(std::span<const PacketHeader> headers, std::size_t n_slots)
{
    FrameSchedule fs;
    fs.n_slots = n_slots;
    fs.transmissions.resize(n_slots);
    for (const auto& h : headers) {
        if (h.replica_slots.empty())
            throw std::invalid_argument("packet header without replicas");
        if (std::adjacent_find(h.replica_slots.begin(), h.replica_slots.end(), std::greater_equal<>()) !=
            h.replica_slots.end())
            throw std::invalid_argument("replica slots must be sorted and distinct");
    }
    for (const auto& h : headers)
        for (SlotIndex s : h.replica_slots) {
            if (s >= n_slots)
                throw std::invalid_argument("replica slot out of range");
            fs.transmissions[s].push_back(h.node);
        }
    for (auto& t : fs.transmissions)
        std::sort(t.begin(), t.end());
    return fs;
}

Frame build_frame(std::span<const NodeId> nodes, const DegreeDistribution& dist, std::size_t n_slots, Rng& rng)
{
    if (nodes.empty())
        throw std::invalid_argument("frame needs at least one node");
    Frame f;
    sample_headers(nodes, dist, n_slots, rng, f.headers);
    f.schedule = schedule_from_headers(f.headers, n_slots);
    return f;
}

FrameSchedule receiver_view(const FrameSchedule& schedule, std::optional<NodeId> receiver, bool half_duplex)
{
    FrameSchedule view = schedule;
    view.receiver = receiver;
    view.erased.assign(schedule.n_slots, false);
    if (!receiver || !half_duplex)
        return view;
    for (std::size_t s = 0; s < schedule.n_slots; ++s) {
        const auto& tx = schedule.transmissions[s];
        if (std::binary_search(tx.begin(), tx.end(), *receiver))
            view.erased[s] = true;
    }
    return view;
}

void PeelingDecoder::resize(std::size_t n_slots)
{
    count_.assign(n_slots, 0);
    xor_.assign(n_slots, 0);
    slot_state_.assign(n_slots, kOpen);
    touched_.clear();
    erased_.clear();
}

void PeelingDecoder::load(std::span<const PacketHeader> headers, std::span<const SlotIndex> erased)
{
    for (SlotIndex s : touched_) {
        count_[s] = 0;
        xor_[s] = 0;
        slot_state_[s] = kOpen;
    }
    for (SlotIndex s : erased_)
        slot_state_[s] = kOpen;
    touched_.clear();
    erased_.assign(erased.begin(), erased.end());
    order_.clear();
    pass_of_.clear();

    headers_ = headers;
    decoded_.assign(headers.size(), kPending);
    for (std::uint32_t p = 0; p < headers.size(); ++p)
        for (SlotIndex s : headers[p].replica_slots) {
            if (count_[s] == 0)
                touched_.push_back(s);
            ++count_[s];
            xor_[s] ^= p;
        }
    for (SlotIndex s : erased_)
        slot_state_[s] = kErased;
}

std::vector<SlotIndex> PeelingDecoder::residual_slots() const
{
    std::vector<SlotIndex> out;
    for (SlotIndex s : touched_)
        if (slot_state_[s] != kErased && count_[s] > 0)
            out.push_back(s);
    std::sort(out.begin(), out.end());
    return out;
}

DecodeResult sic_decode(const FrameSchedule& view, std::span<const PacketHeader> headers)
{
    // Headers and view must describe the same placement.
    const FrameSchedule expected = schedule_from_headers(headers, view.n_slots);
    if (view.transmissions.size() != view.n_slots)
        throw std::invalid_argument("headers inconsistent with frame schedule");
    for (std::size_t s = 0; s < view.n_slots; ++s) {
        auto tx = view.transmissions[s];
        std::sort(tx.begin(), tx.end());
        if (tx != expected.transmissions[s])
            throw std::invalid_argument("headers inconsistent with frame schedule at slot " + std::to_string(s));
    }
    if (!view.erased.empty() && view.erased.size() != view.n_slots)
        throw std::invalid_argument("erasure mask has wrong length");

    std::vector<SlotIndex> erased;
    for (std::size_t s = 0; s < view.n_slots; ++s)
        if (view.is_erased(SlotIndex(s)))
            erased.push_back(SlotIndex(s));

    PeelingDecoder dec(view.n_slots);
    dec.load(headers, erased);

    return collect_result(dec, headers, view.receiver, dec.run());
}

DecodeResult collect_result(const PeelingDecoder& dec, std::span<const PacketHeader> headers,
                            std::optional<NodeId> receiver, int iterations)
{
    DecodeResult r;
    r.iterations = iterations;
    r.decode_order.resize(std::size_t(iterations));
    for (std::size_t i = 0; i < dec.order().size(); ++i) {
        const NodeId node = headers[dec.order()[i]].node;
        if (receiver && node == *receiver)
            continue;
        r.decoded.push_back(node);
        r.decode_order[dec.pass_of()[i] - 1].push_back(node);
    }
    std::sort(r.decoded.begin(), r.decoded.end());
    for (auto& pass : r.decode_order)
        std::sort(pass.begin(), pass.end());
    r.residual_slots = dec.residual_slots();
    return r;
}

PlrEstimate plr_monte_carlo(std::size_t n_users, const DegreeDistribution& dist, std::size_t n_slots,
                            std::uint64_t n_frames, bool half_duplex, Rng& rng)
{
    if (n_frames < 1)
        throw std::invalid_argument("n_frames must be >= 1");
    if (n_users < 1)
        throw std::invalid_argument("n_users must be >= 1");
    check_frame_args(dist, n_slots);

    std::vector<NodeId> nodes(n_users);
    std::iota(nodes.begin(), nodes.end(), NodeId(0));
    std::vector<PacketHeader> headers;
    PeelingDecoder dec(n_slots);

    PlrEstimate est;
    est.per_user.resize(n_users);
    est.frames = n_frames;
    std::uint64_t iteration_sum = 0;
    std::uint64_t decodes = 0;

    for (std::uint64_t f = 0; f < n_frames; ++f) {
        sample_headers(nodes, dist, n_slots, rng, headers);
        if (!half_duplex) {
            dec.load(headers);
            iteration_sum += std::uint64_t(dec.run());
            ++decodes;
            for (std::size_t u = 0; u < n_users; ++u) {
                const bool lost = !dec.decoded(u);
                est.per_user[u].successes += lost;
                ++est.per_user[u].trials;
            }
            continue;
        }
        for (std::size_t r = 0; r < n_users; ++r) {
            dec.load(headers, headers[r].replica_slots);
            iteration_sum += std::uint64_t(dec.run());
            ++decodes;
            for (std::size_t u = 0; u < n_users; ++u) {
                if (u == r)
                    continue;
                est.per_user[u].successes += !dec.decoded(u);
                ++est.per_user[u].trials;
            }
        }
    }
    for (const auto& u : est.per_user) {
        est.losses.successes += u.successes;
        est.losses.trials += u.trials;
    }
    est.mean_sic_iterations = decodes ? double(iteration_sum) / double(decodes) : 0.0;
    return est;
}

nlohmann::ordered_json to_json(const FrameSchedule& schedule)
{
    nlohmann::ordered_json j;
    j["n_slots"] = schedule.n_slots;
    j["receiver"] = schedule.receiver ? nlohmann::ordered_json(*schedule.receiver) : nlohmann::ordered_json(nullptr);
    auto slots = nlohmann::ordered_json::array();
    for (std::size_t s = 0; s < schedule.n_slots; ++s) {
        if (schedule.is_erased(SlotIndex(s)))
            slots.push_back("erased");
        else
            slots.push_back(schedule.transmissions[s]);
    }
    j["slots"] = std::move(slots);
    return j;
}

nlohmann::ordered_json to_json(const DecodeResult& result)
{
    nlohmann::ordered_json j;
    j["decoded"] = result.decoded;
    j["iterations"] = result.iterations;
    j["residual_slots"] = result.residual_slots;
    j["decode_order"] = result.decode_order;
    return j;
}

} // namespace urvc::csa
