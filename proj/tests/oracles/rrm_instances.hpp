#pragma once

// Random power-control instances shared by the unit and acceptance suites.

#include "oracles/rrm_oracle.hpp"
#include "urvc/random.hpp"
#include "urvc/rrm.hpp"

namespace oracle {

struct RrmInstance {
    Mat g;
    Vec gamma, noise, p_max, external;
};

inline RrmInstance random_rrm_instance(std::size_t n, urvc::Rng& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto log_uniform = [&](double lo, double hi) { return std::pow(10.0, lo + (hi - lo) * u(rng)); };
    RrmInstance in;
    in.g.assign(n, Vec(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            in.g[i][j] = i == j ? log_uniform(-1.0, 1.0) : log_uniform(-3.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        in.gamma.push_back(log_uniform(-1.0, 1.0));
        in.noise.push_back(log_uniform(-2.0, 0.0));
        in.p_max.push_back(log_uniform(0.0, 2.0));
        in.external.push_back(u(rng) < 0.5 ? 0.0 : log_uniform(-3.0, 0.0));
    }
    return in;
}

inline urvc::rrm::Matrix<double> to_eigen(const Mat& m)
{
    urvc::rrm::Matrix<double> out(Eigen::Index(m.size()), Eigen::Index(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j)
            out(Eigen::Index(i), Eigen::Index(j)) = m[i][j];
    return out;
}

inline urvc::rrm::Vector<double> to_eigen(const Vec& v)
{
    return Eigen::Map<const urvc::rrm::Vector<double>>(v.data(), Eigen::Index(v.size()));
}

inline urvc::rrm::SinrTargets<double> targets_of(const RrmInstance& in)
{
    return {to_eigen(in.gamma), to_eigen(in.noise), to_eigen(in.p_max)};
}

/// uMTC instance plus one xMBB column and a basestation row.
inline urvc::rrm::GainMatrix<double> random_xmbb_gains(const RrmInstance& in, urvc::Rng& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto n = Eigen::Index(in.g.size());
    urvc::rrm::GainMatrix<double> gm;
    gm.n_umtc = n;
    gm.has_xmbb = true;
    gm.g.resize(n + 1, n + 1);
    gm.g.topLeftCorner(n, n) = to_eigen(in.g);
    for (Eigen::Index i = 0; i <= n; ++i)
        gm.g(i, n) = std::pow(10.0, -3.0 + 2.0 * u(rng));
    for (Eigen::Index j = 0; j < n; ++j)
        gm.g(n, j) = std::pow(10.0, -3.0 + 2.0 * u(rng));
    return gm;
}

} // namespace oracle
