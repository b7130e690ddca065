#pragma once

#include "urvc/random.hpp"

#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace urvc::channel {

enum class FadingKind { Rayleigh, Fixed };

struct FadingModel {
    FadingKind kind = FadingKind::Rayleigh;
    double mean_snr = 1.0; // linear

    void validate() const;
};

/// Shannon outage abstraction: a packet survives iff log2(1 + snr) >= spectral_rate.
struct LinkAbstraction {
    double spectral_rate = 1.0; // bits/symbol

    void validate() const;
    double outage_snr() const; // 2^rate - 1
};

/// Rayleigh: exponential with mean mean_snr. Fixed: mean_snr.
double sample_snr(const FadingModel& model, Rng& rng);

enum class PacketOutcome { Ok, Error };

PacketOutcome packet_outcome(double snr, const LinkAbstraction& link);

/// Strictly above the threshold.
bool availability_gate(double snr, double threshold);

/// P(packet error) for one draw of the fading model.
double packet_error_probability(const FadingModel& model, const LinkAbstraction& link);

struct TradeoffPoint {
    double threshold = 0.0;
    double availability = 0.0;
    double availability_stderr = 0.0;
    std::optional<double> conditional_reliability; // empty when nothing was admitted
    double conditional_reliability_stderr = 0.0;
    double joint_ok_and_available = 0.0; // independently counted P(OK and gate open)
    double closed_form_availability = 0.0;
    std::optional<double> closed_form_conditional_reliability;
};

/// Gate probability and conditional packet success probability.
struct GateClosedForm {
    double availability;
    std::optional<double> conditional_reliability;
};
GateClosedForm gate_closed_form(const FadingModel& model, const LinkAbstraction& link, double threshold);

/// Reliability versus availability as the gate threshold rises. All points
/// share the same n_draws SNR samples. Throws on unsorted thresholds.
std::vector<TradeoffPoint> tradeoff_curve(const FadingModel& model, const LinkAbstraction& link,
                                          std::span<const double> thresholds, std::uint64_t n_draws, Rng& rng);

/// CSV: threshold,availability,availability_stderr,conditional_reliability,
/// conditional_reliability_stderr,closed_form_availability,closed_form_conditional_reliability
void write_tradeoff_csv(std::ostream& os, std::span<const TradeoffPoint> curve);

} // namespace urvc::channel
