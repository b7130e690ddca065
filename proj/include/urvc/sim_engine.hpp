#pragma once

#include "urvc/channel.hpp"
#include "urvc/csa_mac.hpp"
#include "urvc/jitter_buffer.hpp"
#include "urvc/metrics.hpp"
#include "urvc/rrm.hpp"
#include "urvc/rsc.hpp"
#include "urvc/time.hpp"
#include "urvc/traffic.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace urvc::sim {

using csa::NodeId;

enum class MacKind { Csa, SlottedAloha, ReservationTdma };
enum class ReceiverMode { Observer, AllNodes };
enum class QueuePolicy { Supersede, Queue };
enum class AvailabilitySource { None, SnrGate, RrmFeasibility, RscIndicator };
enum class FadingBlock { Slot, Episode };

struct ChannelCoupling {
    bool enabled = false; // singleton decoding subject to link packet errors
    channel::FadingModel fading;
    channel::LinkAbstraction link;
    double gate_threshold = 0.0;
    // Slot: independent SNR per (receiver, decoded slot). Episode: one SNR per
    // (receiver, episode), shared with the availability gate.
    FadingBlock block = FadingBlock::Slot;
};

struct RscConfig {
    std::vector<rsc::ServiceTier> tiers;
    // Minimum episode SNR for each tier, ascending; the indicator names the
    // highest tier whose threshold the SNR exceeds.
    std::vector<double> tier_snr_thresholds;
    rsc::GrantPolicy policy = rsc::GrantPolicy::LowestSufficient;
};

struct ScenarioConfig {
    std::string name = "scenario";
    std::uint64_t seed = 1;
    std::size_t replications = 1;

    std::size_t n_nodes = 10;
    Nanos frame_duration = from_millis(2.0);
    std::size_t n_slots = 50;
    MacKind mac = MacKind::Csa;
    csa::DegreeDistribution degrees = csa::DegreeDistribution::irregular_default();
    ReceiverMode receivers = ReceiverMode::Observer;
    bool half_duplex = true;
    bool always_transmit = true; // every node sends one packet per frame
    bool retry_within_deadline = false;
    QueuePolicy queue = QueuePolicy::Supersede;

    ChannelCoupling channel;
    AvailabilitySource availability = AvailabilitySource::None;
    std::optional<rrm::RrmScenario> rrm;
    std::uint64_t rrm_drops = 1000;
    std::vector<double> rrm_gamma_db_sweep;
    std::optional<RscConfig> rsc;

    std::vector<traffic::TrafficSource> traffic{traffic::TrafficSource{}};
    bool random_phase = true;
    traffic::MessageSpec message = traffic::tc12_message();

    std::size_t episode_length_frames = 500;
    Nanos horizon = from_seconds(10.0);
    std::uint64_t min_episode_messages = metrics::kDefaultMinEpisodeMessages;

    jitter::ReleasePolicy jitter_policy = jitter::ReleasePolicy::ConstantLatency;
    bool jitter_deliver_late = false;

    std::size_t trace_frames = 0;

    // Tradeoff curve settings (channel subcommand).
    std::vector<double> tradeoff_thresholds;
    std::uint64_t tradeoff_draws = 1000000;

    /// Throws std::invalid_argument on an unusable configuration.
    void validate() const;
    /// Non-fatal findings, e.g. a deadline shorter than one frame.
    std::vector<std::string> warnings() const;
};

struct Counters {
    std::uint64_t generated = 0; // (message, receiver) pairs
    std::uint64_t delivered = 0;
    std::uint64_t late = 0; // delivered after the deadline
    std::uint64_t undelivered = 0;
    std::uint64_t superseded = 0; // undelivered because a newer message replaced it

    Counters& operator+=(const Counters& o);
    std::uint64_t within_deadline() const { return delivered - late; }
};

struct ReceiverReport {
    std::optional<NodeId> receiver; // empty: external observer
    metrics::MetricsSummary summary;
    metrics::AvailabilityFailure episodes;
    Counters counters;
};

struct MacDiagnostics {
    BinomialEstimate losses; // per (frame, transmitter, receiver) reception
    double mean_sic_iterations = 0.0;
    std::uint64_t frames = 0;
};

struct MetricsReport {
    std::string name;
    std::uint64_t seed = 0;
    std::size_t replications = 1;

    metrics::MetricsSummary aggregate;
    metrics::AvailabilityFailure episodes;
    std::optional<double> reliability_when_available;
    double reliability_target = 0.0;
    Counters counters;
    std::vector<ReceiverReport> per_receiver;
    MacDiagnostics mac;
    MacKind mac_kind = MacKind::Csa;
    jitter::JitterStats jitter;
    std::optional<rrm::AvailabilityEstimate> rrm;
    std::vector<std::string> warnings;

    // Not part of the JSON report.
    std::vector<metrics::LatencyRecord> records; // aggregate, receiver-major
    nlohmann::ordered_json frame_traces = nlohmann::ordered_json::array();
    std::vector<nlohmann::ordered_json> negotiation_trace;

    metrics::LatencyCdf cdf() const { return metrics::empirical_cdf(records); }
    bool meets_target() const { return aggregate.reliability >= reliability_target; }
};

/// Runs every replication (up to jobs at a time) and merges them in index
/// order; the result depends on the config only.
MetricsReport run_scenario(const ScenarioConfig& config, std::size_t jobs = 1);

/// Numeric axes accepted by sweep().
std::span<const std::string_view> sweep_axes();
/// Throws std::invalid_argument on an unknown axis.
void apply_axis(ScenarioConfig& config, std::string_view axis, double value);

/// One report per value. Every point reuses the template seed (common random
/// numbers) unless the axis is the seed itself.
std::vector<MetricsReport> sweep(const ScenarioConfig& config, std::string_view axis, std::span<const double> values,
                                 std::size_t jobs = 1);

nlohmann::ordered_json to_json(const MetricsReport& report);

const char* to_string(MacKind k);

} // namespace urvc::sim
