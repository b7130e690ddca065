#include "urvc/sim_engine.hpp"

#include "urvc/baseline_mac.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <deque>
#include <exception>
#include <functional>
#include <set>
#include <stdexcept>
#include <thread>

namespace urvc::sim {

namespace {

enum Purpose : std::uint64_t { kTraffic = 1, kMac = 2, kChannel = 3, kAvailability = 4, kRrmReport = 5 };

// Extra frames allowed after the horizon for queued and retried messages.
constexpr std::size_t kDrainFrames = 10000;

struct Message {
    std::uint64_t id = 0;
    NodeId sender = 0;
    Nanos request{0};
    std::size_t entry_frame = 0;
};

struct ReplicationResult {
    std::vector<std::vector<metrics::LatencyRecord>> records; // per receiver
    std::vector<std::vector<metrics::EpisodeOutcome>> episodes;
    std::vector<Counters> counters;
    std::uint64_t available_messages = 0;
    std::uint64_t available_on_time = 0;
    BinomialEstimate mac_losses;
    std::uint64_t sic_iterations = 0;
    std::uint64_t decodes = 0;
    std::uint64_t frames = 0;
    nlohmann::ordered_json traces = nlohmann::ordered_json::array();
    std::vector<nlohmann::ordered_json> negotiations;
};

/// Runs f(i) for i in [0, n) on up to jobs threads.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& f)
{
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < n;) {
            try {
                f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t extra = std::min(std::max<std::size_t>(jobs, 1), std::max<std::size_t>(n, 1)) - 1;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < extra; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

class Replication {
public:
    Replication(const ScenarioConfig& cfg, std::size_t index)
        : cfg_(cfg), index_(index), n_recv_(cfg.receivers == ReceiverMode::Observer ? 1 : cfg.n_nodes),
          mac_rng_(make_stream(cfg.seed, {index, kMac})), channel_rng_(make_stream(cfg.seed, {index, kChannel})),
          degrees_(cfg.mac == MacKind::SlottedAloha ? csa::DegreeDistribution::single() : cfg.degrees),
          decoder_(cfg.n_slots), tdma_(cfg.n_slots)
    {
    }

    ReplicationResult run();

private:
    std::optional<NodeId> receiver_node(std::size_t r) const
    {
        if (cfg_.receivers == ReceiverMode::Observer)
            return std::nullopt;
        return NodeId(r);
    }
    bool is_sender(std::size_t r, NodeId j) const
    {
        const auto node = receiver_node(r);
        return node && *node == j;
    }
    std::size_t episode_of(std::size_t frame) const
    {
        return std::min(frame / cfg_.episode_length_frames, n_episodes_ - 1);
    }

    void generate_messages();
    void draw_episodes(ReplicationResult& out);
    bool accept_singleton(std::size_t r, std::size_t episode);
    void mac_frame(std::size_t frame, const std::vector<NodeId>& tx, ReplicationResult& out);
    void finalize(std::size_t m, bool superseded, ReplicationResult& out);

    const ScenarioConfig& cfg_;
    std::size_t index_;
    std::size_t n_recv_;
    Rng mac_rng_;
    Rng channel_rng_;
    csa::DegreeDistribution degrees_;
    csa::PeelingDecoder decoder_;
    baseline::ReservationState tdma_;
    std::vector<csa::PacketHeader> headers_;

    std::size_t n_episodes_ = 1;
    std::vector<Message> messages_;
    std::vector<std::vector<std::size_t>> by_node_;           // message indices per sender
    std::vector<std::vector<std::optional<Nanos>>> delivery_; // [message][receiver]
    std::vector<std::vector<double>> episode_snr_;            // [episode][receiver]
    std::vector<std::vector<bool>> available_;                // [episode][receiver]
    std::vector<std::uint8_t> heard_;                         // [receiver * n_nodes + node]
};

void Replication::generate_messages()
{
    by_node_.assign(cfg_.n_nodes, {});
    const auto F = cfg_.frame_duration.count();
    for (NodeId j = 0; j < cfg_.n_nodes; ++j) {
        Rng rng = make_stream(cfg_.seed, {index_, kTraffic, j});
        std::vector<Nanos> times;
        for (auto src : cfg_.traffic) {
            if (cfg_.random_phase && src.kind == traffic::SourceKind::Periodic)
                src.phase = Nanos(std::uniform_int_distribution<std::int64_t>(
                    0, std::int64_t(1e9 / src.rate_hz) - 1)(rng));
            const auto t = traffic::generate(src, cfg_.horizon, rng);
            times.insert(times.end(), t.begin(), t.end());
        }
        std::sort(times.begin(), times.end());
        for (Nanos t : times) {
            Message m;
            m.id = (std::uint64_t(index_) << 40) | messages_.size();
            m.sender = j;
            m.request = t;
            m.entry_frame = std::size_t((t.count() + F - 1) / F);
            by_node_[j].push_back(messages_.size());
            messages_.push_back(m);
        }
    }
    delivery_.assign(messages_.size(), std::vector<std::optional<Nanos>>(n_recv_));
}

void Replication::draw_episodes(ReplicationResult& out)
{
    const std::size_t horizon_frames =
        std::size_t((cfg_.horizon.count() + cfg_.frame_duration.count() - 1) / cfg_.frame_duration.count());
    n_episodes_ = std::max<std::size_t>(1, horizon_frames / cfg_.episode_length_frames);

    Rng rng = make_stream(cfg_.seed, {index_, kAvailability});
    const bool need_snr = cfg_.availability == AvailabilitySource::SnrGate ||
                          cfg_.availability == AvailabilitySource::RscIndicator ||
                          (cfg_.channel.enabled && cfg_.channel.block == FadingBlock::Episode);
    episode_snr_.assign(n_episodes_, std::vector<double>(n_recv_, 0.0));
    available_.assign(n_episodes_, std::vector<bool>(n_recv_, true));

    for (std::size_t e = 0; e < n_episodes_; ++e) {
        if (need_snr)
            for (auto& s : episode_snr_[e])
                s = channel::sample_snr(cfg_.channel.fading, rng);

        switch (cfg_.availability) {
        case AvailabilitySource::None:
            break;
        case AvailabilitySource::SnrGate:
            for (std::size_t r = 0; r < n_recv_; ++r)
                available_[e][r] = channel::availability_gate(episode_snr_[e][r], cfg_.channel.gate_threshold);
            break;
        case AvailabilitySource::RrmFeasibility: {
            const bool ok = rrm::evaluate_drop(*cfg_.rrm, rng).feasible;
            available_[e].assign(n_recv_, ok);
            break;
        }
        case AvailabilitySource::RscIndicator: {
            const auto& rc = *cfg_.rsc;
            const rsc::Request req{cfg_.message.payload_bytes, to_seconds(cfg_.message.deadline),
                                   cfg_.message.reliability_target};
            const double t = to_seconds(cfg_.frame_duration * std::int64_t(e * cfg_.episode_length_frames));
            for (std::size_t r = 0; r < n_recv_; ++r) {
                rsc::AvailabilityIndicator ind;
                for (std::size_t k = 0; k < rc.tier_snr_thresholds.size(); ++k)
                    if (episode_snr_[e][r] > rc.tier_snr_thresholds[k])
                        ind.supported = k;
                const auto outcome = rsc::negotiate(req, ind, rc.tiers, rc.policy);
                available_[e][r] = outcome.kind == rsc::OutcomeKind::Grant;
                out.negotiations.push_back(rsc::trace_record(t, req, ind, outcome, rc.tiers));
            }
            break;
        }
        }
    }
}

bool Replication::accept_singleton(std::size_t r, std::size_t episode)
{
    const auto& ch = cfg_.channel;
    if (!ch.enabled)
        return true;
    const double snr =
        ch.block == FadingBlock::Episode ? episode_snr_[episode][r] : channel::sample_snr(ch.fading, channel_rng_);
    return channel::packet_outcome(snr, ch.link) == channel::PacketOutcome::Ok;
}

void Replication::mac_frame(std::size_t frame, const std::vector<NodeId>& tx, ReplicationResult& out)
{
    const std::size_t n = cfg_.n_nodes;
    const std::size_t e = episode_of(frame);
    heard_.assign(n_recv_ * n, 0);
    ++out.frames;

    if (cfg_.mac == MacKind::ReservationTdma) {
        const std::set<NodeId> active(tx.begin(), tx.end());
        auto step = baseline::reservation_tdma_step(tdma_, active, cfg_.n_slots, mac_rng_);
        tdma_ = std::move(step.state);
        for (std::size_t r = 0; r < n_recv_; ++r)
            for (NodeId j : tx) {
                const auto& o = step.outcomes.at(j);
                if (!is_sender(r, j) && o.success && accept_singleton(r, e))
                    heard_[r * n + j] = 1;
            }
        if (frame < cfg_.trace_frames) {
            nlohmann::ordered_json slots = nlohmann::ordered_json::object();
            for (const auto& [node, o] : step.outcomes)
                slots[std::to_string(node)] = nlohmann::ordered_json{
                    {"slot", o.slot ? nlohmann::ordered_json(*o.slot) : nlohmann::ordered_json(nullptr)},
                    {"success", o.success}};
            out.traces.push_back({{"frame", frame}, {"replication", index_}, {"reservation", slots}});
        }
        return;
    }

    csa::sample_headers(tx, degrees_, cfg_.n_slots, mac_rng_, headers_);
    std::vector<std::ptrdiff_t> packet_of(n, -1);
    for (std::size_t p = 0; p < headers_.size(); ++p)
        packet_of[headers_[p].node] = std::ptrdiff_t(p);

    nlohmann::ordered_json trace;
    const bool tracing = frame < cfg_.trace_frames;
    if (tracing) {
        trace["frame"] = frame;
        trace["replication"] = index_;
        trace["schedule"] = csa::to_json(csa::schedule_from_headers(headers_, cfg_.n_slots));
        trace["receivers"] = nlohmann::ordered_json::array();
    }

    for (std::size_t r = 0; r < n_recv_; ++r) {
        std::span<const csa::SlotIndex> erased;
        const auto self = receiver_node(r);
        if (cfg_.half_duplex && self && packet_of[*self] >= 0)
            erased = headers_[std::size_t(packet_of[*self])].replica_slots;
        decoder_.load(headers_, erased);
        const int iterations = decoder_.run([&](csa::SlotIndex, std::size_t) { return accept_singleton(r, e); });
        out.sic_iterations += std::uint64_t(iterations);
        ++out.decodes;
        for (std::size_t p = 0; p < headers_.size(); ++p)
            if (decoder_.decoded(p) && !is_sender(r, headers_[p].node))
                heard_[r * n + headers_[p].node] = 1;
        if (tracing) {
            auto j = csa::to_json(csa::collect_result(decoder_, headers_, self, iterations));
            j["receiver"] = self ? nlohmann::ordered_json(*self) : nlohmann::ordered_json(nullptr);
            trace["receivers"].push_back(std::move(j));
        }
    }
    if (tracing)
        out.traces.push_back(std::move(trace));
}

void Replication::finalize(std::size_t m, bool superseded, ReplicationResult& out)
{
    const auto& msg = messages_[m];
    for (std::size_t r = 0; r < n_recv_; ++r) {
        if (is_sender(r, msg.sender))
            continue;
        auto& c = out.counters[r];
        ++c.generated;
        if (const auto& d = delivery_[m][r]) {
            ++c.delivered;
            if (*d - msg.request > cfg_.message.deadline)
                ++c.late;
        } else {
            ++c.undelivered;
            if (superseded)
                ++c.superseded;
        }
    }
}

ReplicationResult Replication::run()
{
    ReplicationResult out;
    out.counters.resize(n_recv_);
    generate_messages();
    draw_episodes(out);

    const std::size_t n = cfg_.n_nodes;
    const auto F = cfg_.frame_duration;
    const std::size_t horizon_frames = std::size_t((cfg_.horizon.count() + F.count() - 1) / F.count());
    std::vector<std::deque<std::size_t>> queue(n);
    std::vector<std::size_t> next(n, 0);
    std::vector<NodeId> tx;

    auto any_pending = [&] {
        return std::any_of(queue.begin(), queue.end(), [](const auto& q) { return !q.empty(); });
    };

    std::size_t frame = 0;
    for (; frame <= horizon_frames || any_pending(); ++frame) {
        if (frame > horizon_frames + kDrainFrames)
            break;
        for (NodeId j = 0; j < n; ++j) {
            while (next[j] < by_node_[j].size() && messages_[by_node_[j][next[j]]].entry_frame <= frame) {
                if (cfg_.queue == QueuePolicy::Supersede) {
                    for (std::size_t m : queue[j])
                        finalize(m, true, out);
                    queue[j].clear();
                }
                queue[j].push_back(by_node_[j][next[j]++]);
            }
        }

        tx.clear();
        for (NodeId j = 0; j < n; ++j)
            if (cfg_.always_transmit || !queue[j].empty())
                tx.push_back(j);
        if (tx.empty())
            continue;

        mac_frame(frame, tx, out);

        const Nanos frame_end = F * std::int64_t(frame + 1);
        for (NodeId j : tx) {
            for (std::size_t r = 0; r < n_recv_; ++r) {
                if (is_sender(r, j))
                    continue;
                ++out.mac_losses.trials;
                out.mac_losses.successes += !heard_[r * n + j];
            }
            if (queue[j].empty())
                continue;
            const std::size_t m = queue[j].front();
            bool all = true;
            for (std::size_t r = 0; r < n_recv_; ++r) {
                if (is_sender(r, j))
                    continue;
                if (heard_[r * n + j] && !delivery_[m][r])
                    delivery_[m][r] = frame_end;
                all = all && delivery_[m][r].has_value();
            }
            const bool retry =
                cfg_.retry_within_deadline && !all && frame_end + F - messages_[m].request <= cfg_.message.deadline;
            if (!retry) {
                finalize(m, false, out);
                queue[j].pop_front();
            }
        }
    }
    for (auto& q : queue)
        for (std::size_t m : q)
            finalize(m, false, out);

    // Records and per-episode reliability.
    out.records.assign(n_recv_, {});
    out.episodes.assign(n_recv_, {});
    for (std::size_t r = 0; r < n_recv_; ++r) {
        std::vector<std::uint64_t> count(n_episodes_, 0), on_time(n_episodes_, 0);
        for (std::size_t m = 0; m < messages_.size(); ++m) {
            const auto& msg = messages_[m];
            if (is_sender(r, msg.sender))
                continue;
            out.records[r].push_back({msg.id, msg.request, delivery_[m][r]});
            const std::size_t e = episode_of(msg.entry_frame);
            ++count[e];
            on_time[e] += delivery_[m][r] && *delivery_[m][r] - msg.request <= cfg_.message.deadline;
        }
        for (std::size_t e = 0; e < n_episodes_; ++e) {
            metrics::EpisodeOutcome eo;
            eo.declared_available = available_[e][r];
            eo.reliability_target = cfg_.message.reliability_target;
            eo.message_count = count[e];
            if (eo.declared_available) {
                eo.measured_reliability = count[e] ? double(on_time[e]) / double(count[e]) : 1.0;
                out.available_messages += count[e];
                out.available_on_time += on_time[e];
            }
            out.episodes[r].push_back(eo);
        }
    }
    return out;
}

template <class T>
void append(std::vector<T>& dst, const std::vector<T>& src)
{
    dst.insert(dst.end(), src.begin(), src.end());
}

} // namespace

Counters& Counters::operator+=(const Counters& o)
{
    generated += o.generated;
    delivered += o.delivered;
    late += o.late;
    undelivered += o.undelivered;
    superseded += o.superseded;
    return *this;
}

void ScenarioConfig::validate() const
{
    auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
    if (replications < 1)
        fail("replications must be >= 1");
    if (n_nodes < 1)
        fail("n_nodes must be >= 1");
    if (receivers == ReceiverMode::AllNodes && n_nodes < 2)
        fail("all-nodes reception needs at least two nodes");
    if (frame_duration <= Nanos::zero())
        fail("frame_duration must be positive");
    if (n_slots < 1)
        fail("n_slots must be >= 1");
    if (mac == MacKind::Csa && std::size_t(degrees.max_degree()) > n_slots)
        fail("degree exceeds frame");
    if (episode_length_frames < 1)
        fail("episode_length_frames must be >= 1");
    if (horizon < frame_duration * std::int64_t(episode_length_frames))
        fail("horizon must cover at least one episode");
    if (traffic.empty())
        fail("at least one traffic source is required");
    for (const auto& s : traffic)
        s.validate();
    message.validate();
    if (channel.enabled || availability == AvailabilitySource::SnrGate ||
        availability == AvailabilitySource::RscIndicator) {
        channel.fading.validate();
        channel.link.validate();
    }
    if (channel.gate_threshold < 0.0)
        fail("gate_threshold must be non-negative");
    if (availability == AvailabilitySource::RrmFeasibility && !rrm)
        fail("rrm_feasibility availability needs an rrm section");
    if (rrm)
        rrm->validate();
    if (availability == AvailabilitySource::RscIndicator && !rsc)
        fail("rsc_indicator availability needs an rsc section");
    if (rsc) {
        const auto v = rsc::validate_composition(rsc->tiers);
        if (!v.empty())
            fail("invalid service composition: " + v.front().message);
        if (rsc->tier_snr_thresholds.size() != rsc->tiers.size())
            fail("rsc needs one snr threshold per tier");
        if (!std::is_sorted(rsc->tier_snr_thresholds.begin(), rsc->tier_snr_thresholds.end()))
            fail("rsc tier snr thresholds must be ascending");
    }
    if (!std::is_sorted(tradeoff_thresholds.begin(), tradeoff_thresholds.end()))
        fail("tradeoff thresholds must be sorted ascending");
}

std::vector<std::string> ScenarioConfig::warnings() const
{
    std::vector<std::string> w;
    if (message.deadline < frame_duration)
        w.push_back("deadline shorter than one frame; no message can meet it");
    return w;
}

MetricsReport run_scenario(const ScenarioConfig& config, std::size_t jobs)
{
    config.validate();
    MetricsReport rep;
    rep.name = config.name;
    rep.seed = config.seed;
    rep.replications = config.replications;
    rep.reliability_target = config.message.reliability_target;
    rep.mac_kind = config.mac;
    rep.warnings = config.warnings();
    for (const auto& w : rep.warnings)
        spdlog::warn("{}: {}", config.name, w);

    std::vector<ReplicationResult> results(config.replications);
    parallel_for(config.replications, jobs, [&](std::size_t i) { results[i] = Replication(config, i).run(); });

    const std::size_t n_recv = results.front().records.size();
    std::vector<metrics::EpisodeOutcome> all_episodes;
    std::uint64_t avail_msgs = 0, avail_on_time = 0, iterations = 0, decodes = 0;
    for (std::size_t r = 0; r < n_recv; ++r) {
        ReceiverReport rr;
        if (config.receivers == ReceiverMode::AllNodes)
            rr.receiver = NodeId(r);
        std::vector<metrics::LatencyRecord> records;
        std::vector<metrics::EpisodeOutcome> episodes;
        for (const auto& res : results) {
            append(records, res.records[r]);
            append(episodes, res.episodes[r]);
            rr.counters += res.counters[r];
        }
        rr.episodes = metrics::availability_and_failure(episodes, config.min_episode_messages);
        rr.summary = metrics::summarize(metrics::empirical_cdf(records), config.message.deadline, rr.episodes);
        append(rep.records, records);
        append(all_episodes, episodes);
        rep.counters += rr.counters;
        rep.per_receiver.push_back(std::move(rr));
    }
    for (const auto& res : results) {
        avail_msgs += res.available_messages;
        avail_on_time += res.available_on_time;
        rep.mac.losses.successes += res.mac_losses.successes;
        rep.mac.losses.trials += res.mac_losses.trials;
        rep.mac.frames += res.frames;
        iterations += res.sic_iterations;
        decodes += res.decodes;
        for (const auto& t : res.traces)
            rep.frame_traces.push_back(t);
        append(rep.negotiation_trace, res.negotiations);
    }
    rep.mac.mean_sic_iterations = decodes ? double(iterations) / double(decodes) : 0.0;
    rep.episodes = metrics::availability_and_failure(all_episodes, config.min_episode_messages);
    rep.aggregate = metrics::summarize(rep.cdf(), config.message.deadline, rep.episodes);
    if (avail_msgs)
        rep.reliability_when_available = double(avail_on_time) / double(avail_msgs);

    jitter::JitterBuffer buffer(config.jitter_policy, config.jitter_deliver_late);
    for (const auto& r : rep.records)
        buffer.push({r.message_id, r.request_time, r.delivery_time, config.message.deadline});
    rep.jitter = buffer.stats();

    if (config.rrm) {
        Rng rng = make_stream(config.seed, {kRrmReport});
        rep.rrm = rrm::availability_estimate(*config.rrm, config.rrm_drops, rng);
    }
    return rep;
}

namespace {

constexpr std::string_view kAxes[] = {
    "n_nodes",   "n_slots",       "frame_duration_ms", "horizon_s", "seed",         "episode_length_frames",
    "gate_threshold", "mean_snr", "spectral_rate",     "deadline_ms", "rate_hz",    "replications",
    "rrm_gamma_db",
};

std::size_t as_count(std::string_view axis, double v)
{
    if (!(v >= 0.0) || v != std::floor(v))
        throw std::invalid_argument("axis " + std::string(axis) + " needs a non-negative integer value");
    return std::size_t(v);
}

} // namespace

std::span<const std::string_view> sweep_axes() { return kAxes; }

void apply_axis(ScenarioConfig& c, std::string_view axis, double v)
{
    if (axis == "n_nodes")
        c.n_nodes = as_count(axis, v);
    else if (axis == "n_slots")
        c.n_slots = as_count(axis, v);
    else if (axis == "frame_duration_ms")
        c.frame_duration = from_millis(v);
    else if (axis == "horizon_s")
        c.horizon = from_seconds(v);
    else if (axis == "seed")
        c.seed = as_count(axis, v);
    else if (axis == "episode_length_frames")
        c.episode_length_frames = as_count(axis, v);
    else if (axis == "gate_threshold")
        c.channel.gate_threshold = v;
    else if (axis == "mean_snr")
        c.channel.fading.mean_snr = v;
    else if (axis == "spectral_rate")
        c.channel.link.spectral_rate = v;
    else if (axis == "deadline_ms")
        c.message.deadline = from_millis(v);
    else if (axis == "rate_hz")
        for (auto& s : c.traffic)
            s.rate_hz = v;
    else if (axis == "replications")
        c.replications = as_count(axis, v);
    else if (axis == "rrm_gamma_db") {
        if (!c.rrm)
            throw std::invalid_argument("axis rrm_gamma_db needs an rrm section");
        c.rrm->gamma = rrm::db_to_linear(v);
    } else
        throw std::invalid_argument("unknown sweep axis: " + std::string(axis));
}

std::vector<MetricsReport> sweep(const ScenarioConfig& config, std::string_view axis, std::span<const double> values,
                                 std::size_t jobs)
{
    std::vector<ScenarioConfig> points(values.size(), config);
    for (std::size_t i = 0; i < values.size(); ++i)
        apply_axis(points[i], axis, values[i]);
    std::vector<MetricsReport> out(values.size());
    parallel_for(values.size(), jobs, [&](std::size_t i) { out[i] = run_scenario(points[i], 1); });
    return out;
}

const char* to_string(MacKind k)
{
    switch (k) {
    case MacKind::Csa: return "csa";
    case MacKind::SlottedAloha: return "slotted_aloha";
    case MacKind::ReservationTdma: return "reservation_tdma";
    }
    return "?";
}

namespace {

nlohmann::ordered_json counters_json(const Counters& c)
{
    return {{"generated", c.generated},     {"delivered", c.delivered},     {"within_deadline", c.within_deadline()},
            {"late", c.late},               {"undelivered", c.undelivered}, {"superseded", c.superseded}};
}

nlohmann::ordered_json episodes_json(const metrics::AvailabilityFailure& af)
{
    return {{"n_episodes", af.n_episodes},
            {"n_available", af.n_available},
            {"n_failed", af.n_failed},
            {"n_underpopulated", af.n_underpopulated}};
}

template <class T>
nlohmann::ordered_json opt_json(const std::optional<T>& v)
{
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

} // namespace

nlohmann::ordered_json to_json(const MetricsReport& r)
{
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["name"] = r.name;
    j["seed"] = r.seed;
    j["replications"] = r.replications;
    j["metrics"] = metrics::to_json(r.aggregate);
    j["reliability_target"] = r.reliability_target;
    j["meets_reliability_target"] = r.meets_target();
    j["reliability_when_available"] = opt_json(r.reliability_when_available);
    j["counters"] = counters_json(r.counters);
    j["episodes"] = episodes_json(r.episodes);
    j["mac"] = {{"kind", to_string(r.mac_kind)},
                {"plr", r.mac.losses.mean()},
                {"plr_stderr", r.mac.losses.standard_error()},
                {"mean_sic_iterations", r.mac.mean_sic_iterations},
                {"frames", r.mac.frames}};
    j["jitter"] = {{"offered", r.jitter.offered},
                   {"released", r.jitter.released},
                   {"late", r.jitter.late},
                   {"released_fraction", r.jitter.released_fraction},
                   {"mean_latency_s", r.jitter.mean_latency_s},
                   {"latency_variance_s2", r.jitter.latency_variance_s2}};
    if (r.rrm)
        j["rrm"] = {{"availability", r.rrm->availability()},
                    {"stderr", r.rrm->standard_error()},
                    {"mean_xmbb_rate", r.rrm->mean_xmbb_rate},
                    {"n_drops", r.rrm->feasible.trials}};
    else
        j["rrm"] = nullptr;
    auto per = nlohmann::ordered_json::array();
    for (const auto& rr : r.per_receiver) {
        nlohmann::ordered_json e;
        e["receiver"] = opt_json(rr.receiver);
        e["metrics"] = metrics::to_json(rr.summary);
        e["counters"] = counters_json(rr.counters);
        e["episodes"] = episodes_json(rr.episodes);
        per.push_back(std::move(e));
    }
    j["per_receiver"] = std::move(per);
    j["warnings"] = r.warnings;
    return j;
}

} // namespace urvc::sim
