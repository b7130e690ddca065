#include "urvc/rrm.hpp"

#include "oracles/closed_forms.hpp"
#include "oracles/rrm_instances.hpp"

#include <doctest.h>

#include <sstream>

using namespace urvc;
using namespace urvc::rrm;

namespace {

Topology single_pair(double d, Position bs = {0, 0})
{
    Topology t;
    t.area = {1000, 1000};
    t.umtc_pairs.push_back({{100, 100}, {100 + d, 100}});
    t.basestation = bs;
    return t;
}

} // namespace

TEST_CASE("gain matrix follows the pathloss formula")
{
    Rng rng = make_stream(1, {1});
    const PathlossModel flat{2.0, 0.0, 0.0, 1.0};
    const auto g = build_gain_matrix(single_pair(10), flat, rng);
    CHECK(g.gains.g(0, 0) == doctest::Approx(0.01).epsilon(1e-14));
    CHECK_FALSE(g.clamped);

    const PathlossModel quartic{4.0, 0.0, 0.0, 1.0};
    const double g1 = build_gain_matrix(single_pair(20), quartic, rng).gains.g(0, 0);
    const double g2 = build_gain_matrix(single_pair(40), quartic, rng).gains.g(0, 0);
    CHECK(g2 / g1 == doctest::Approx(1.0 / 16.0).epsilon(1e-13));

    const auto c = build_gain_matrix(single_pair(0.0), flat, rng);
    CHECK(c.clamped);
    CHECK(c.gains.g(0, 0) == doctest::Approx(1.0));

    Topology outside = single_pair(10);
    outside.basestation = {2000, 0};
    CHECK_THROWS(build_gain_matrix(outside, flat, rng));
}

TEST_CASE("shadowing standard deviation is recovered")
{
    Rng rng = make_stream(2, {1});
    const PathlossModel shadow{3.0, -20.0, 8.0, 1.0};
    RrmScenario sc;
    std::vector<double> x;
    while (x.size() < 100000) {
        const auto topo = sample_topology(sc, rng);
        const auto g = build_gain_matrix(topo, shadow, rng).gains;
        std::vector<Position> tx, rx;
        for (const auto& [t, r] : topo.umtc_pairs) {
            tx.push_back(t);
            rx.push_back(r);
        }
        rx.push_back(topo.basestation);
        tx.push_back(*topo.xmbb_user);
        for (std::size_t i = 0; i < rx.size(); ++i)
            for (std::size_t j = 0; j < tx.size(); ++j) {
                const double d = std::max(distance(tx[j], rx[i]), 1.0);
                x.push_back(10.0 * std::log10(g.g(Eigen::Index(i), Eigen::Index(j)) * std::pow(d, 3.0) / 1e-2));
            }
    }
    double m = 0, s2 = 0;
    for (double v : x)
        m += v;
    m /= double(x.size());
    for (double v : x)
        s2 += (v - m) * (v - m);
    const double sd = std::sqrt(s2 / double(x.size() - 1));
    CHECK(oracle::within_sigma(sd, 8.0, 8.0 / std::sqrt(2.0 * double(x.size()))));
}

TEST_CASE("feasibility closed cases")
{
    Matrix<double> g1(1, 1);
    g1 << 1.0;
    auto f = feasibility_check(g1, SinrTargets<double>::uniform(1, 10.0, 1.0, 20.0), Vector<double>::Zero(1));
    REQUIRE(f.feasible);
    CHECK(f.power(0) == doctest::Approx(10.0).epsilon(1e-14));

    Matrix<double> g2(2, 2);
    g2 << 1.0, 0.1, 0.1, 1.0;
    const auto t2 = SinrTargets<double>::uniform(2, 5.0, 0.1, 10.0);
    f = feasibility_check(g2, t2, Vector<double>::Zero(2));
    REQUIRE(f.feasible);
    CHECK(f.power(0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(f.power(1) == doctest::Approx(1.0).epsilon(1e-13));
    const Vector<double> sinr = achieved_sinr(g2, f.power, t2.noise, Vector<double>(Vector<double>::Zero(2)));
    CHECK(sinr(0) == doctest::Approx(5.0).epsilon(1e-13));

    const auto fp = oracle::fixed_point_power({{1.0, 0.1}, {0.1, 1.0}}, {5, 5}, {0.1, 0.1}, {10, 10}, {0, 0});
    REQUIRE(fp.feasible);
    CHECK(fp.power[0] == doctest::Approx(1.0).epsilon(1e-12));

    Matrix<double> g3(2, 2);
    g3 << 1.0, 1.0, 1.0, 1.0;
    f = feasibility_check(g3, SinrTargets<double>::uniform(2, 1.0, 0.1, 1e9), Vector<double>::Zero(2));
    CHECK_FALSE(f.feasible);
    CHECK(f.spectral_radius == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("feasibility agrees with fixed-point iteration")
{
    Rng rng = make_stream(3, {1});
    int feasible = 0;
    for (int k = 0; k < 300; ++k) {
        const auto in = oracle::random_rrm_instance(1 + std::size_t(k % 4), rng);
        const auto f = feasibility_check(oracle::to_eigen(in.g), oracle::targets_of(in), oracle::to_eigen(in.external));
        const auto o = oracle::fixed_point_power(in.g, in.gamma, in.noise, in.p_max, in.external);
        REQUIRE(f.feasible == o.feasible);
        if (!o.feasible)
            continue;
        ++feasible;
        for (std::size_t i = 0; i < o.power.size(); ++i)
            CHECK(std::abs(f.power(Eigen::Index(i)) - o.power[i]) <= 1e-9 * o.power[i]);
        const Vector<double> sinr = achieved_sinr(oracle::to_eigen(in.g), f.power, oracle::to_eigen(in.noise),
                                                  oracle::to_eigen(in.external));
        for (std::size_t i = 0; i < o.power.size(); ++i)
            CHECK(std::abs(sinr(Eigen::Index(i)) - in.gamma[i]) <= 1e-9 * in.gamma[i]);
    }
    CHECK(feasible > 30);
    CHECK(feasible < 270);
}

TEST_CASE("raising a target or a cross gain never creates feasibility")
{
    Rng rng = make_stream(4, {1});
    std::uniform_int_distribution<int> pick(0, 3);
    for (int k = 0; k < 300; ++k) {
        auto in = oracle::random_rrm_instance(4, rng);
        const bool before = bool(feasibility_check(oracle::to_eigen(in.g), oracle::targets_of(in),
                                                   oracle::to_eigen(in.external)));
        auto harder = in;
        harder.gamma[std::size_t(pick(rng))] *= 1.5;
        const int i = pick(rng), j = (i + 1 + pick(rng) % 3) % 4;
        harder.g[std::size_t(i)][std::size_t(j)] *= 2.0;
        const bool after = bool(feasibility_check(oracle::to_eigen(harder.g), oracle::targets_of(harder),
                                                  oracle::to_eigen(harder.external)));
        CHECK((before || !after));
    }
}

TEST_CASE("spectral radius matches a dense eigensolver")
{
    Rng rng = make_stream(5, {1});
    for (int k = 0; k < 100; ++k) {
        const auto in = oracle::random_rrm_instance(4, rng);
        const Matrix<double> F = normalized_interference(oracle::to_eigen(in.g), oracle::to_eigen(in.gamma));
        const auto sr = spectral_radius(F);
        Eigen::EigenSolver<Matrix<double>> es(F, false);
        CHECK(sr.value == doctest::Approx(es.eigenvalues().cwiseAbs().maxCoeff()).epsilon(1e-9));
    }
    Matrix<double> perm(2, 2);
    perm << 0, 1, 1, 0;
    CHECK(spectral_radius(perm).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("scalar type is a template parameter")
{
    Matrix<float> g(2, 2);
    g << 1.0f, 0.1f, 0.1f, 1.0f;
    const auto f = feasibility_check(g, SinrTargets<float>::uniform(2, 5.0f, 0.1f, 10.0f), Vector<float>::Zero(2));
    REQUIRE(f.feasible);
    CHECK(f.power(0) == doctest::Approx(1.0).epsilon(1e-5));

    Matrix<long double> gl(1, 1);
    gl << 2.0L;
    const auto fl =
        feasibility_check(gl, SinrTargets<long double>::uniform(1, 4.0L, 1.0L, 10.0L), Vector<long double>::Zero(1));
    REQUIRE(fl.feasible);
    CHECK(double(fl.power(0)) == doctest::Approx(2.0));
}

TEST_CASE("max xmbb power closed cases")
{
    GainMatrix<double> gm;
    gm.n_umtc = 2;
    gm.has_xmbb = true;
    gm.g.resize(3, 3);
    gm.g << 1.0, 0.1, 0.0, 0.1, 1.0, 0.0, 0.01, 0.01, 0.5;
    const auto t = SinrTargets<double>::uniform(2, 5.0, 0.1, 10.0);
    const auto op = max_xmbb_power(gm, t, 0.3, 0.1);
    REQUIRE(op);
    CHECK(op->xmbb_power == 0.3);
    CHECK(op->xmbb_rate == doctest::Approx(std::log2(1.0 + 0.5 * 0.3 / (0.1 + 0.01 + 0.01))).epsilon(1e-12));

    gm.g << 1.0, 1.0, 0.1, 1.0, 1.0, 0.1, 0.01, 0.01, 0.5;
    CHECK_FALSE(max_xmbb_power(gm, SinrTargets<double>::uniform(2, 1.0, 0.1, 1e9), 0.3, 0.1));

    GainMatrix<double> plain;
    plain.n_umtc = 1;
    plain.g = Matrix<double>::Ones(2, 1);
    CHECK_THROWS(max_xmbb_power(plain, SinrTargets<double>::uniform(1, 1.0, 0.1, 1.0), 0.3, 0.1));
}

TEST_CASE("max xmbb power matches a grid search and is monotone in coupling")
{
    Rng rng = make_stream(6, {1});
    int checked = 0;
    for (int k = 0; k < 200 && checked < 30; ++k) {
        const auto in = oracle::random_rrm_instance(2, rng);
        const auto gm = oracle::random_xmbb_gains(in, rng);
        const auto t = oracle::targets_of(in);
        const double cap = 50.0;
        const auto op = max_xmbb_power(gm, t, cap, 0.01);
        auto feasible_at = [&](double px) {
            return bool(feasibility_check(gm.umtc(), t, Vector<double>(gm.xmbb_to_umtc() * px)));
        };
        const auto grid = oracle::grid_max(feasible_at, cap);
        REQUIRE(op.has_value() == grid.has_value());
        if (!op)
            continue;
        ++checked;
        CHECK(std::abs(op->xmbb_power - *grid) <= 1e-6 * std::max(*grid, 1e-300));

        auto stronger = gm;
        stronger.g(0, gm.n_umtc) *= 3.0;
        const auto op2 = max_xmbb_power(stronger, t, cap, 0.01);
        REQUIRE(op2);
        CHECK(op2->xmbb_power <= op->xmbb_power * (1 + 1e-12));
    }
    CHECK(checked >= 10);
}

TEST_CASE("availability limits and monotonicity")
{
    RrmScenario sc;
    sc.gamma = 1e-9;
    Rng a = make_stream(7, {1});
    CHECK(availability_estimate(sc, 300, a).availability() == 1.0);

    sc.gamma = 3.0;
    sc.p_max = 0.0;
    Rng b = make_stream(7, {2});
    CHECK(availability_estimate(sc, 300, b).availability() == 0.0);

    sc = RrmScenario{};
    double prev = 1.0, prev_se = 0.0;
    for (double db : {0.0, 10.0, 20.0, 30.0}) {
        sc.gamma = db_to_linear(db);
        Rng r = make_stream(7, {3});
        const auto e = availability_estimate(sc, 1000, r);
        CHECK(e.availability() <= prev + 3.0 * std::hypot(e.standard_error(), prev_se));
        prev = e.availability();
        prev_se = e.standard_error();
    }
    Rng c = make_stream(7, {4});
    CHECK_THROWS(availability_estimate(sc, 0, c));
}

TEST_CASE("deterministic geometry gives a zero-one verdict matching a hand computation")
{
    Topology t;
    t.area = {100, 100};
    t.basestation = {50, 50};
    t.umtc_pairs = {{{0, 0}, {10, 0}}, {{100, 100}, {90, 100}}};
    PathlossModel flat;
    flat.shadowing_db = 0.0;
    const double direct = 1e-3 * std::pow(10.0, -3.5);
    const double cross = 1e-3 * std::pow(std::hypot(90.0, 100.0), -3.5);
    const std::vector<std::vector<double>> hand{{direct, cross}, {cross, direct}};
    for (double db : {5.0, 40.0, 60.0}) {
        const double gamma = db_to_linear(db);
        const auto targets = SinrTargets<double>::uniform(2, gamma, 4e-14, 0.2);
        const auto o = oracle::fixed_point_power(hand, {gamma, gamma}, {4e-14, 4e-14}, {0.2, 0.2}, {0, 0});
        std::uint64_t feasible = 0;
        const int drops = 20;
        for (int k = 0; k < drops; ++k) {
            Rng g = make_stream(8, {std::uint64_t(k)});
            const auto gm = build_gain_matrix(t, flat, g).gains;
            CHECK(gm.g(0, 0) == doctest::Approx(direct).epsilon(1e-14));
            feasible += feasibility_check(gm.umtc(), targets, Vector<double>::Zero(2)).feasible;
        }
        CHECK((feasible == 0 || feasible == drops));
        CHECK((feasible == drops) == o.feasible);
    }
}

TEST_CASE("availability csv")
{
    std::vector<AvailabilityPoint> pts{{5.0, {{3, 4}, 1.5}}};
    std::ostringstream os;
    write_availability_csv(os, pts);
    CHECK(os.str().rfind("gamma_dB,availability,stderr,mean_xmbb_rate\n5,0.75,", 0) == 0);
}
