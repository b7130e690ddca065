#include "urvc/rrm.hpp"

#include <algorithm>
#include <iomanip>
#include <numbers>

namespace urvc::rrm {

void Topology::validate() const
{
    if (umtc_pairs.empty())
        throw std::invalid_argument("topology needs at least one uMTC pair");
    auto check = [&](const Position& p) {
        if (!area.contains(p))
            throw std::invalid_argument("position outside the area");
    };
    for (const auto& [tx, rx] : umtc_pairs) {
        check(tx);
        check(rx);
    }
    if (xmbb_user)
        check(*xmbb_user);
    check(basestation);
}

GainMatrixResult build_gain_matrix(const Topology& topology, const PathlossModel& model, Rng& rng)
{
    topology.validate();
    if (!(model.min_distance_m > 0.0) || !(model.exponent > 0.0) || model.shadowing_db < 0.0)
        throw std::invalid_argument("invalid pathloss model");

    const auto n = Eigen::Index(topology.umtc_pairs.size());
    const bool xmbb = topology.xmbb_user.has_value();

    std::vector<Position> tx, rx;
    for (const auto& [t, r] : topology.umtc_pairs) {
        tx.push_back(t);
        rx.push_back(r);
    }
    rx.push_back(topology.basestation);
    if (xmbb)
        tx.push_back(*topology.xmbb_user);

    GainMatrixResult out;
    out.gains.n_umtc = n;
    out.gains.has_xmbb = xmbb;
    out.gains.g.resize(Eigen::Index(rx.size()), Eigen::Index(tx.size()));

    const double ref = db_to_linear(model.ref_gain_db);
    std::normal_distribution<double> shadow(0.0, model.shadowing_db);
    for (Eigen::Index i = 0; i < out.gains.g.rows(); ++i)
        for (Eigen::Index j = 0; j < out.gains.g.cols(); ++j) {
            double d = distance(rx[std::size_t(i)], tx[std::size_t(j)]);
            if (d < model.min_distance_m) {
                d = model.min_distance_m;
                out.clamped = true;
            }
            const double x = model.shadowing_db > 0.0 ? shadow(rng) : 0.0;
            out.gains.g(i, j) = ref * std::pow(d, -model.exponent) * std::pow(10.0, x / 10.0);
        }
    return out;
}

void RrmScenario::validate() const
{
    if (n_pairs < 1)
        throw std::invalid_argument("rrm scenario needs at least one pair");
    if (!(area.width > 0 && area.height > 0))
        throw std::invalid_argument("rrm area must be non-empty");
    if (!(pair_min_distance_m > 0) || pair_max_distance_m < pair_min_distance_m)
        throw std::invalid_argument("invalid pair distance range");
    if (!area.contains(basestation))
        throw std::invalid_argument("basestation outside the area");
    if (!(gamma > 0) || !(noise > 0) || p_max < 0 || xmbb_p_max < 0 || !(basestation_noise > 0))
        throw std::invalid_argument("invalid rrm link parameters");
}

Topology sample_topology(const RrmScenario& scenario, Rng& rng)
{
    std::uniform_real_distribution<double> ux(0.0, scenario.area.width), uy(0.0, scenario.area.height);
    std::uniform_real_distribution<double> ud(scenario.pair_min_distance_m, scenario.pair_max_distance_m);
    std::uniform_real_distribution<double> ua(0.0, 2.0 * std::numbers::pi);

    Topology t;
    t.area = scenario.area;
    t.basestation = scenario.basestation;
    for (std::size_t k = 0; k < scenario.n_pairs; ++k) {
        Position tx, rx;
        // Receivers are redrawn until they land inside the area; the last
        // attempt is clamped to the border.
        for (int attempt = 0;; ++attempt) {
            tx = {ux(rng), uy(rng)};
            const double d = ud(rng), a = ua(rng);
            rx = {tx.x + d * std::cos(a), tx.y + d * std::sin(a)};
            if (scenario.area.contains(rx))
                break;
            if (attempt == 1000) {
                rx.x = std::clamp(rx.x, 0.0, scenario.area.width);
                rx.y = std::clamp(rx.y, 0.0, scenario.area.height);
                break;
            }
        }
        t.umtc_pairs.emplace_back(tx, rx);
    }
    if (scenario.with_xmbb)
        t.xmbb_user = Position{ux(rng), uy(rng)};
    return t;
}

DropOutcome evaluate_drop(const RrmScenario& scenario, Rng& rng)
{
    const Topology topo = sample_topology(scenario, rng);
    const auto gm = build_gain_matrix(topo, scenario.pathloss, rng).gains;
    const auto targets = SinrTargets<double>::uniform(gm.n_umtc, scenario.gamma, scenario.noise, scenario.p_max);
    DropOutcome out;
    if (scenario.with_xmbb) {
        const auto op = max_xmbb_power(gm, targets, scenario.xmbb_p_max, scenario.basestation_noise);
        out.feasible = op.has_value();
        if (op)
            out.xmbb_rate = op->xmbb_rate;
    } else {
        out.feasible = feasibility_check(gm.umtc(), targets, Vector<double>::Zero(gm.n_umtc)).feasible;
    }
    return out;
}

AvailabilityEstimate availability_estimate(const RrmScenario& scenario, std::uint64_t n_drops, Rng& rng)
{
    if (n_drops < 1)
        throw std::invalid_argument("n_drops must be >= 1");
    scenario.validate();
    AvailabilityEstimate est;
    double rate_sum = 0.0;
    for (std::uint64_t d = 0; d < n_drops; ++d) {
        const auto o = evaluate_drop(scenario, rng);
        ++est.feasible.trials;
        if (!o.feasible)
            continue;
        ++est.feasible.successes;
        rate_sum += o.xmbb_rate.value_or(0.0);
    }
    if (est.feasible.successes)
        est.mean_xmbb_rate = rate_sum / double(est.feasible.successes);
    return est;
}

void write_availability_csv(std::ostream& os, std::span<const AvailabilityPoint> sweep)
{
    const auto flags = os.flags();
    os << std::setprecision(17);
    os << "gamma_dB,availability,stderr,mean_xmbb_rate\n";
    for (const auto& p : sweep)
        os << p.gamma_db << ',' << p.estimate.availability() << ',' << p.estimate.standard_error() << ','
           << p.estimate.mean_xmbb_rate << '\n';
    os.flags(flags);
}

} // namespace urvc::rrm
