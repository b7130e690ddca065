// Acceptance driver: one PASS/FAIL line per criterion. Optional arguments
// select criteria by label (e.g. `acceptance AC2 AC7`).

#include "cli.hpp"
#include "urvc/baseline_mac.hpp"
#include "urvc/channel.hpp"
#include "urvc/config.hpp"
#include "urvc/csa_mac.hpp"
#include "urvc/jitter_buffer.hpp"
#include "urvc/metrics.hpp"
#include "urvc/rrm.hpp"
#include "urvc/rsc.hpp"
#include "urvc/sim_engine.hpp"

#include "oracles/closed_forms.hpp"
#include "oracles/peeling_oracle.hpp"
#include "oracles/rrm_instances.hpp"
#include "oracles/rrm_oracle.hpp"
#include "oracles/rsc_fuzz.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace urvc;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int precision = 6)
{
    std::ostringstream ss;
    ss << std::setprecision(precision) << v;
    return ss.str();
}

// Capacity: largest n whose PLR stays at or below the target, scanning n
// upwards until the first violation.
struct Capacity {
    std::size_t n = 0;
    double plr_at_n = 0.0;
    double plr_next = 0.0;
    std::uint64_t min_trials = 0;
};

Capacity capacity(bool aloha, std::size_t n_slots, double target, std::uint64_t trials)
{
    const auto dist = csa::DegreeDistribution::irregular_default();
    Capacity c;
    c.min_trials = ~std::uint64_t(0);
    for (std::size_t n = 1;; ++n) {
        const std::uint64_t frames = (trials + n - 1) / n;
        Rng rng = make_stream(2024, {aloha ? 1u : 2u, n});
        const auto e = aloha ? baseline::slotted_aloha(n, n_slots, frames, rng)
                             : csa::plr_monte_carlo(n, dist, n_slots, frames, false, rng);
        c.min_trials = std::min(c.min_trials, e.losses.trials);
        if (e.plr() > target) {
            c.plr_next = e.plr();
            return c;
        }
        c.n = n;
        c.plr_at_n = e.plr();
    }
}

Verdict ac1()
{
    const auto a = capacity(true, 200, 1e-4, 10'000'000);
    const auto c = capacity(false, 200, 1e-4, 10'000'000);
    const double ratio = a.n ? double(c.n) / double(a.n) : 0.0;
    std::ostringstream d;
    d << "ratio " << fmt(ratio, 4) << " (csa n=" << c.n << " plr " << fmt(c.plr_at_n, 3) << ", n+1 plr "
      << fmt(c.plr_next, 3) << "; aloha n=" << a.n << " plr " << fmt(a.plr_at_n, 3) << ", n+1 plr "
      << fmt(a.plr_next, 3) << "; >= " << std::min(a.min_trials, c.min_trials) << " user-frame trials per n)";
    return {a.n > 0 && ratio >= 3.0 && std::min(a.min_trials, c.min_trials) >= 10'000'000, d.str()};
}

oracle::PeelingInstance instance_of(const csa::FrameSchedule& view, const std::vector<csa::PacketHeader>& headers)
{
    oracle::PeelingInstance in;
    in.erased.assign(view.n_slots, false);
    for (std::size_t s = 0; s < view.n_slots; ++s)
        in.erased[s] = view.is_erased(csa::SlotIndex(s));
    for (const auto& h : headers)
        in.slots_of.emplace_back(h.replica_slots.begin(), h.replica_slots.end());
    return in;
}

Verdict ac2()
{
    std::uint64_t cases = 0, mismatches = 0;
    for (unsigned slots = 1; slots <= 6; ++slots)
        oracle::for_each_frame(slots, 4, 3, [&](const std::vector<std::vector<unsigned>>& f) {
            std::vector<csa::PacketHeader> headers;
            for (std::size_t i = 0; i < f.size(); ++i)
                headers.push_back({csa::NodeId(i), std::vector<csa::SlotIndex>(f[i].begin(), f[i].end())});
            const auto sched = csa::schedule_from_headers(headers, slots);
            std::vector<std::optional<csa::NodeId>> receivers{std::nullopt};
            for (std::size_t i = 0; i < f.size(); ++i)
                receivers.push_back(csa::NodeId(i));
            for (const auto& rx : receivers) {
                const auto view = csa::receiver_view(sched, rx, true);
                const auto got = csa::sic_decode(view, headers);
                const auto bf = oracle::brute_force_peel(instance_of(view, headers));
                std::vector<csa::NodeId> expect;
                for (std::size_t p = 0; p < headers.size(); ++p)
                    if ((bf.maximal >> p & 1u) && (!rx || headers[p].node != *rx))
                        expect.push_back(headers[p].node);
                mismatches += got.decoded != expect;
                ++cases;
            }
        });
    std::ostringstream d;
    d << cases << " decodes (observer and half-duplex views, <=4 users, <=6 slots, degree <=3), " << mismatches
      << " mismatches";
    return {mismatches == 0 && cases > 0, d.str()};
}

Verdict ac3()
{
    const std::vector<std::vector<csa::SlotIndex>> slots{{0, 5}, {2, 5}, {2, 4, 6}, {1, 4}, {1, 6}};
    std::vector<csa::PacketHeader> headers;
    bool degrees_ok = true;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        headers.push_back({csa::NodeId(i), slots[i]});
        degrees_ok = degrees_ok && (slots[i].size() == 2 || slots[i].size() == 3);
    }
    const auto r = csa::sic_decode(csa::schedule_from_headers(headers, 8), headers);
    std::ostringstream d;
    d << "5 users, 8 slots: decoded " << r.decoded.size() << "/5 in " << r.iterations << " iterations, order";
    for (const auto& pass : r.decode_order) {
        d << " [";
        for (std::size_t k = 0; k < pass.size(); ++k)
            d << (k ? "," : "") << char('A' + pass[k]);
        d << "]";
    }
    return {degrees_ok && r.decoded.size() == 5 && r.iterations <= 4 && r.residual_slots.empty(), d.str()};
}

Verdict ac4()
{
    const channel::FadingModel model{channel::FadingKind::Rayleigh, 10.0};
    const channel::LinkAbstraction link{2.0};
    const std::vector<double> th{0, 0.5, 1, 2, 2.9, 3, 5, 7.5, 10, 15, 20, 30};
    Rng rng = make_stream(4, {1});
    const auto curve = channel::tradeoff_curve(model, link, th, 1'000'000, rng);
    bool ok = curve.size() == th.size();
    double worst_a = 0.0, worst_r = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const auto& p = curve[i];
        const double a = oracle::exponential_tail(th[i], 10.0);
        const double r = oracle::gated_reliability(th[i], 10.0, 2.0);
        ok = ok && oracle::within_sigma(p.availability, a, p.availability_stderr);
        worst_a = std::max(worst_a, std::abs(p.availability - a) / std::max(p.availability_stderr, 1e-300));
        ok = ok && p.conditional_reliability &&
             oracle::within_sigma(*p.conditional_reliability, r, p.conditional_reliability_stderr);
        if (p.conditional_reliability && *p.conditional_reliability != r)
            worst_r = std::max(worst_r, std::abs(*p.conditional_reliability - r) /
                                            std::max(p.conditional_reliability_stderr, 1e-300));
        // The library's own closed forms must equal the oracle's and be monotone.
        ok = ok && std::abs(p.closed_form_availability - a) <= 1e-15 && p.closed_form_conditional_reliability &&
             std::abs(*p.closed_form_conditional_reliability - r) <= 1e-15;
        if (i > 0) {
            const auto& q = curve[i - 1];
            ok = ok && p.closed_form_availability < q.closed_form_availability;
            ok = ok && *p.closed_form_conditional_reliability >= *q.closed_form_conditional_reliability;
            ok = ok && a < oracle::exponential_tail(th[i - 1], 10.0);
            ok = ok && r >= oracle::gated_reliability(th[i - 1], 10.0, 2.0);
        }
    }
    std::ostringstream d;
    d << th.size() << " thresholds at 1e6 draws; worst |error|/sigma availability " << fmt(worst_a, 3)
      << ", conditional reliability " << fmt(worst_r, 3) << "; closed forms monotone";
    return {ok, d.str()};
}

Verdict ac5()
{
    Rng rng = make_stream(5, {1});
    std::uniform_int_distribution<int> size(1, 300);
    std::uniform_int_distribution<std::int64_t> lat(0, 20'000'000); // ns
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uint64_t pairs = 0, bad = 0;
    while (pairs < 10'000) {
        const int n = size(rng);
        const double p_lost = u(rng) * 0.3;
        const bool coarse = u(rng) < 0.3; // ties on a coarse grid
        std::vector<metrics::LatencyRecord> recs;
        std::vector<std::int64_t> finite;
        for (int i = 0; i < n; ++i) {
            metrics::LatencyRecord r{std::uint64_t(i), Nanos(std::int64_t(i) * 1000), std::nullopt};
            if (u(rng) >= p_lost) {
                std::int64_t l = lat(rng);
                if (coarse)
                    l = l / 2'000'000 * 2'000'000;
                r.delivery_time = r.request_time + Nanos(l);
                finite.push_back(l);
            }
            recs.push_back(r);
        }
        const auto cdf = metrics::empirical_cdf(recs);
        bad += metrics::message_error_probability(cdf) != double(n - std::int64_t(finite.size())) / double(n);
        for (int k = 0; k < 5 && pairs < 10'000; ++k, ++pairs) {
            std::int64_t d = 1 + lat(rng);
            if (!finite.empty() && u(rng) < 0.5)
                d = std::max<std::int64_t>(1, finite[std::size_t(u(rng) * double(finite.size()))]);
            const auto count = std::count_if(finite.begin(), finite.end(), [&](std::int64_t l) { return l <= d; });
            bad += metrics::reliability(cdf, Nanos(d)) != double(count) / double(n);
        }
    }
    std::ostringstream d;
    d << pairs << " (set, deadline) pairs, " << bad << " mismatches";
    return {bad == 0, d.str()};
}

// Exact sample variance of integer-nanosecond latencies, in s^2.
double release_variance(const std::vector<jitter::ReleaseLogEntry>& seq)
{
    if (seq.size() < 2)
        return 0.0;
    __int128 sum = 0, sum_sq = 0;
    for (const auto& e : seq) {
        const __int128 x = (*e.decision.release_time - e.message.request_time).count();
        sum += x;
        sum_sq += x * x;
    }
    const __int128 n = __int128(seq.size());
    const __int128 num = n * sum_sq - sum * sum; // n (n - 1) s^2, in ns^2
    return double(num) / double(n * (n - 1)) * 1e-18;
}

Verdict ac6()
{
    std::vector<sim::ScenarioConfig> scenarios;
    scenarios.push_back(config::load(URVC_PRESET_DIR "/tc12.yaml"));
    {
        auto c = scenarios.front();
        c.name = "congested_retry";
        c.n_nodes = 40;
        c.n_slots = 30;
        c.message.deadline = from_millis(9);
        c.retry_within_deadline = true;
        c.replications = 2;
        scenarios.push_back(c);
    }
    {
        auto c = config::load(URVC_PRESET_DIR "/tradeoff_rayleigh.yaml");
        c.channel.block = sim::FadingBlock::Slot;
        scenarios.push_back(c);
    }
    bool ok = true;
    std::ostringstream d;
    for (const auto& c : scenarios) {
        const auto r = sim::run_scenario(c, 4);
        jitter::JitterBuffer buf(jitter::ReleasePolicy::ConstantLatency);
        for (const auto& rec : r.records)
            buf.push({rec.message_id, rec.request_time, rec.delivery_time, c.message.deadline});
        const auto seq = buf.release_sequence();
        const auto cdf = r.cdf();
        const double var = release_variance(seq);
        const double frac = double(seq.size()) / double(r.records.size());
        const double rel = metrics::reliability(cdf, c.message.deadline);
        ok = ok && var == 0.0 && r.jitter.latency_variance_s2 == 0.0 && frac == rel &&
             r.jitter.released_fraction == rel && rel == r.aggregate.reliability;
        d << c.name << ": variance " << var << ", released " << fmt(frac, 8) << " = reliability " << fmt(rel, 8)
          << "; ";
    }
    std::string s = d.str();
    return {ok, s.substr(0, s.size() - 2)};
}

Verdict ac7()
{
    using namespace rrm;
    Rng rng = make_stream(7, {1});
    std::uniform_int_distribution<std::size_t> size(1, 4);
    std::uint64_t verdict_bad = 0, power_bad = 0, feasible = 0;
    double worst_rel = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const auto in = oracle::random_rrm_instance(size(rng), rng);
        const auto got = feasibility_check(oracle::to_eigen(in.g), oracle::targets_of(in), oracle::to_eigen(in.external));
        const auto ref = oracle::fixed_point_power(in.g, in.gamma, in.noise, in.p_max, in.external);
        if (got.feasible != ref.feasible) {
            ++verdict_bad;
            continue;
        }
        if (!got.feasible)
            continue;
        ++feasible;
        for (std::size_t i = 0; i < in.g.size(); ++i) {
            const double rel = std::abs(got.power(Eigen::Index(i)) - ref.power[i]) / std::abs(ref.power[i]);
            worst_rel = std::max(worst_rel, rel);
            power_bad += rel > 1e-9;
        }
    }

    Rng xr = make_stream(7, {2});
    std::uint64_t x_checked = 0, x_bad = 0, x_attempts = 0;
    double worst_x = 0.0;
    while (x_checked < 100 && x_attempts < 100000) {
        ++x_attempts;
        const auto in = oracle::random_rrm_instance(size(xr), xr);
        const auto gm = oracle::random_xmbb_gains(in, xr);
        const auto t = oracle::targets_of(in);
        const double cap = 50.0;
        const auto op = max_xmbb_power(gm, t, cap, 0.01);
        oracle::Vec coupling(in.g.size());
        for (std::size_t i = 0; i < in.g.size(); ++i)
            coupling[i] = gm.g(Eigen::Index(i), gm.n_umtc);
        auto feasible_at = [&](double px) {
            oracle::Vec ext = in.external;
            std::fill(ext.begin(), ext.end(), 0.0);
            for (std::size_t i = 0; i < ext.size(); ++i)
                ext[i] = coupling[i] * px;
            return oracle::fixed_point_power(in.g, in.gamma, in.noise, in.p_max, ext).feasible;
        };
        if (!feasible_at(0.0)) {
            x_bad += op.has_value();
            continue;
        }
        const auto grid = oracle::grid_max(feasible_at, cap, 10000, 3);
        if (!op || !grid) {
            ++x_bad;
            ++x_checked;
            continue;
        }
        const double rel = std::abs(op->xmbb_power - *grid) / std::max(*grid, 1e-300);
        worst_x = std::max(worst_x, rel);
        x_bad += rel > 1e-6;
        ++x_checked;
    }
    std::ostringstream d;
    d << "1000 instances: " << verdict_bad << " verdict mismatches, " << feasible << " feasible, worst p* rel error "
      << fmt(worst_rel, 3) << "; xMBB " << x_checked << " instances, worst rel gap " << fmt(worst_x, 3) << ", "
      << x_bad << " bad";
    return {verdict_bad == 0 && power_bad == 0 && x_checked == 100 && x_bad == 0, d.str()};
}

Verdict ac8()
{
    using namespace rsc;
    auto has = [](const std::vector<Violation>& v, ViolationKind k) {
        return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.kind == k; });
    };
    const auto base = three_tier_example();
    bool ok = validate_composition(base).empty() && base.size() == 3 && base[0].availability_target == 0.99999 &&
              base[1].availability_target == 0.99 && *base[1].delivery_reliability == 0.999 &&
              base[2].availability_target == 0.97 && *base[2].deadline_s < *base[1].deadline_s &&
              *base[2].payload_bytes > *base[1].payload_bytes;

    struct Mutation {
        const char* name;
        std::function<void(std::vector<ServiceTier>&)> apply;
        ViolationKind expect;
    };
    const std::vector<Mutation> mutations{
        {"availability 1<-0", [](auto& t) { t[1].availability_target = t[0].availability_target; },
         ViolationKind::AvailabilityNotDecreasing},
        {"availability 2>1", [](auto& t) { t[2].availability_target = 0.995; }, ViolationKind::AvailabilityNotDecreasing},
        {"payload 2=1", [](auto& t) { t[2].payload_bytes = t[1].payload_bytes; }, ViolationKind::PayloadNotIncreasing},
        {"payload 2<1", [](auto& t) { t[2].payload_bytes = 100; }, ViolationKind::PayloadNotIncreasing},
        {"deadline 2>1", [](auto& t) { t[2].deadline_s = 0.2; }, ViolationKind::DeadlineNotDecreasing},
        {"availability out of range", [](auto& t) { t[0].availability_target = 1.5; },
         ViolationKind::AvailabilityOutOfRange},
        {"reliability invalid", [](auto& t) { t[1].delivery_reliability = 0.0; }, ViolationKind::InvalidValue},
        {"empty", [](auto& t) { t.clear(); }, ViolationKind::Empty},
    };
    std::size_t detected = 0;
    for (const auto& m : mutations) {
        auto t = base;
        m.apply(t);
        detected += has(validate_composition(t), m.expect);
    }
    ok = ok && detected == mutations.size();

    Rng rng = make_stream(8, {1});
    std::uint64_t insufficient = 0, missed = 0, grants = 0;
    for (int k = 0; k < 100'000; ++k) {
        const auto tiers = oracle::random_composition(rng);
        const auto req = oracle::random_request(rng);
        const auto ind = oracle::random_indicator(tiers.size(), rng);
        for (auto policy : {GrantPolicy::LowestSufficient, GrantPolicy::HighestSupported}) {
            const auto o = negotiate(req, ind, tiers, policy);
            bool any_sufficient = false;
            if (ind.supported)
                for (std::size_t i = 0; i <= *ind.supported; ++i)
                    any_sufficient = any_sufficient || satisfies(tiers[i], req);
            if (o.kind == OutcomeKind::Grant) {
                ++grants;
                const auto& t = tiers[*o.tier];
                insufficient += !(t.payload_bytes && *t.payload_bytes >= req.payload_bytes && t.deadline_s &&
                                  *t.deadline_s <= req.deadline_s && t.delivery_reliability &&
                                  *t.delivery_reliability >= req.reliability && *o.tier <= *ind.supported);
            } else {
                missed += any_sufficient;
            }
        }
    }
    ok = ok && insufficient == 0 && missed == 0 && grants > 0;
    std::ostringstream d;
    d << "three-tier example valid; " << detected << "/" << mutations.size() << " mutations detected; 1e5 fuzz cases x2 "
      << "policies: " << grants << " grants, " << insufficient << " insufficient, " << missed << " missed";
    return {ok, d.str()};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
    {
        path = fs::temp_directory_path() / ("urvc_acceptance_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::map<std::string, std::string> read_tree(const fs::path& dir)
{
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::ifstream f(e.path(), std::ios::binary);
        std::ostringstream ss;
        ss << f.rdbuf();
        files[e.path().filename().string()] = ss.str();
    }
    return files;
}

Verdict ac9()
{
    TempDir tmp("determinism");
    struct Job {
        std::string preset;
        std::string command;
    };
    const std::vector<Job> jobs{{"tc12", "run"},
                                {"tradeoff_rayleigh", "run"},
                                {"tradeoff_rayleigh", "tradeoff"},
                                {"rsc_three_tier", "run"},
                                {"rrm_fig4", "run"},
                                {"rrm_fig4", "rrm-availability"}};
    bool ok = true;
    std::size_t files = 0;
    std::ostringstream fails;
    for (const auto& j : jobs) {
        const std::string cfg = std::string(URVC_PRESET_DIR "/") + j.preset + ".yaml";
        std::vector<std::map<std::string, std::string>> trees;
        for (const char* n_jobs : {"1", "1", "4"}) {
            const auto out = tmp.path / (j.preset + "_" + j.command + "_" + std::to_string(trees.size()));
            std::ostringstream so, se;
            const int code = cli::run_cli({j.command, cfg, "--out", out.string(), "--jobs", n_jobs}, so, se);
            if (code != 0) {
                ok = false;
                fails << j.preset << " " << j.command << " exit " << code << "; ";
                break;
            }
            trees.push_back(read_tree(out));
        }
        if (trees.size() != 3)
            continue;
        bool has_json = false, has_csv = false;
        for (const auto& [name, _] : trees[0]) {
            has_json = has_json || name.ends_with(".json");
            has_csv = has_csv || name.ends_with(".csv");
        }
        files += trees[0].size();
        if (trees[0] != trees[1] || trees[0] != trees[2] || !has_json || !has_csv) {
            ok = false;
            fails << j.preset << " " << j.command << " differs; ";
        }
    }
    std::ostringstream d;
    d << jobs.size() << " preset commands run 3 times (jobs 1, 1, 4), " << files << " files each identical";
    if (!ok)
        d << "; " << fails.str();
    return {ok, d.str()};
}

Verdict ac10()
{
    const auto c = config::load(URVC_PRESET_DIR "/tc12.yaml");
    const auto r = sim::run_scenario(c, 4);
    std::uint64_t generated = 0, lost = 0, delivered = 0, undelivered = 0;
    bool latency_ok = true;
    for (const auto& rec : r.records) {
        ++generated;
        if (rec.delivered()) {
            ++delivered;
            latency_ok = latency_ok && rec.latency() >= c.frame_duration;
            lost += rec.latency() > c.message.deadline;
        } else {
            ++undelivered;
            ++lost;
        }
    }
    const double rel = r.aggregate.reliability;
    const double by_count = double(generated - lost) / double(generated);
    const double one_minus = 1.0 - double(lost) / double(generated);
    const bool identity = rel == by_count && std::abs(rel - one_minus) <= std::numeric_limits<double>::epsilon();
    const bool conservation = delivered + undelivered == generated && r.counters.generated == generated &&
                              r.counters.delivered + r.counters.undelivered == r.counters.generated &&
                              r.counters.delivered == delivered && r.counters.undelivered == undelivered;
    std::ostringstream d;
    d << std::setprecision(10) << "reliability " << rel << " = 1 - " << lost << "/" << generated
      << "; min latency >= frame: " << (latency_ok ? "yes" : "no") << "; delivered " << delivered << " + undelivered "
      << undelivered << " = generated; meets 0.99999 target: " << (r.meets_target() ? "yes" : "no");
    return {identity && latency_ok && conservation && generated > 0, d.str()};
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
        {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10},
    };
    cli::configure_logging();
    std::set<std::string> only(argv + 1, argv + argc);
    int failed = 0;
    for (const auto& [label, run] : criteria) {
        if (!only.empty() && !only.count(label))
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << label << ' ' << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << "  [" << fmt(s, 3) << " s]"
                  << std::endl;
        failed += !v.pass;
    }
    return failed ? 1 : 0;
}
