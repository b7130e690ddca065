#include "urvc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <stdexcept>

namespace urvc::channel {

void FadingModel::validate() const
{
    if (!(mean_snr > 0.0) || !std::isfinite(mean_snr))
        throw std::invalid_argument("mean_snr must be positive");
}

void LinkAbstraction::validate() const
{
    if (!(spectral_rate > 0.0) || !std::isfinite(spectral_rate))
        throw std::invalid_argument("spectral_rate must be positive");
}

double LinkAbstraction::outage_snr() const { return std::exp2(spectral_rate) - 1.0; }

double sample_snr(const FadingModel& model, Rng& rng)
{
    if (model.kind == FadingKind::Fixed)
        return model.mean_snr;
    return std::exponential_distribution<double>(1.0 / model.mean_snr)(rng);
}

PacketOutcome packet_outcome(double snr, const LinkAbstraction& link)
{
    if (snr < 0.0)
        throw std::invalid_argument("snr must be non-negative");
    // log2(1 + snr) >= rate, written against the outage SNR so the boundary
    // matches the closed forms.
    return snr >= link.outage_snr() ? PacketOutcome::Ok : PacketOutcome::Error;
}

bool availability_gate(double snr, double threshold)
{
    if (threshold < 0.0)
        throw std::invalid_argument("threshold must be non-negative");
    return snr > threshold;
}

double packet_error_probability(const FadingModel& model, const LinkAbstraction& link)
{
    const double t = link.outage_snr();
    if (model.kind == FadingKind::Fixed)
        return model.mean_snr >= t ? 0.0 : 1.0;
    return -std::expm1(-t / model.mean_snr);
}

GateClosedForm gate_closed_form(const FadingModel& model, const LinkAbstraction& link, double threshold)
{
    const double t_out = link.outage_snr();
    if (model.kind == FadingKind::Fixed) {
        if (!(model.mean_snr > threshold))
            return {0.0, std::nullopt};
        return {1.0, model.mean_snr >= t_out ? 1.0 : 0.0};
    }
    const double avail = std::exp(-threshold / model.mean_snr);
    if (threshold >= t_out)
        return {avail, 1.0};
    // P(snr >= t_out) / P(snr > threshold)
    return {avail, 1.0 - (avail - std::exp(-t_out / model.mean_snr)) / avail};
}

std::vector<TradeoffPoint> tradeoff_curve(const FadingModel& model, const LinkAbstraction& link,
                                          std::span<const double> thresholds, std::uint64_t n_draws, Rng& rng)
{
    model.validate();
    link.validate();
    if (!std::is_sorted(thresholds.begin(), thresholds.end()))
        throw std::invalid_argument("thresholds must be sorted ascending");
    if (n_draws < 1)
        throw std::invalid_argument("n_draws must be >= 1");
    for (double t : thresholds)
        if (t < 0.0)
            throw std::invalid_argument("threshold must be non-negative");

    std::vector<std::uint64_t> admitted(thresholds.size(), 0), admitted_ok(thresholds.size(), 0);
    for (std::uint64_t i = 0; i < n_draws; ++i) {
        const double snr = sample_snr(model, rng);
        const bool ok = packet_outcome(snr, link) == PacketOutcome::Ok;
        // thresholds ascending: the gate is open for a prefix
        for (std::size_t k = 0; k < thresholds.size() && availability_gate(snr, thresholds[k]); ++k) {
            ++admitted[k];
            admitted_ok[k] += ok;
        }
    }

    std::vector<TradeoffPoint> curve;
    curve.reserve(thresholds.size());
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
        TradeoffPoint p;
        p.threshold = thresholds[k];
        const BinomialEstimate avail{admitted[k], n_draws};
        p.availability = avail.mean();
        p.availability_stderr = avail.standard_error();
        if (admitted[k] > 0) {
            const BinomialEstimate rel{admitted_ok[k], admitted[k]};
            p.conditional_reliability = rel.mean();
            p.conditional_reliability_stderr = rel.standard_error();
        }
        p.joint_ok_and_available = double(admitted_ok[k]) / double(n_draws);
        const auto cf = gate_closed_form(model, link, thresholds[k]);
        p.closed_form_availability = cf.availability;
        p.closed_form_conditional_reliability = cf.conditional_reliability;
        curve.push_back(p);
    }
    return curve;
}

void write_tradeoff_csv(std::ostream& os, std::span<const TradeoffPoint> curve)
{
    const auto flags = os.flags();
    os << std::setprecision(17);
    os << "threshold,availability,availability_stderr,conditional_reliability,conditional_reliability_stderr,"
          "closed_form_availability,closed_form_conditional_reliability\n";
    auto opt = [&](const std::optional<double>& v) {
        if (v)
            os << *v;
        else
            os << "nan";
    };
    for (const auto& p : curve) {
        os << p.threshold << ',' << p.availability << ',' << p.availability_stderr << ',';
        opt(p.conditional_reliability);
        os << ',' << p.conditional_reliability_stderr << ',' << p.closed_form_availability << ',';
        opt(p.closed_form_conditional_reliability);
        os << '\n';
    }
    os.flags(flags);
}

} // namespace urvc::channel
