#pragma once

#include "urvc/random.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace urvc::rrm {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct Position {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Area {
    double width = 0.0;
    double height = 0.0;
    bool contains(const Position& p) const { return p.x >= 0 && p.y >= 0 && p.x <= width && p.y <= height; }
};

struct Topology {
    std::vector<std::pair<Position, Position>> umtc_pairs; // (tx, rx)
    std::optional<Position> xmbb_user;
    Position basestation;
    Area area;

    void validate() const;
};

/// Linear power gains. Rows are the uMTC receivers followed by the
/// basestation; columns are the uMTC transmitters followed by the xMBB user
/// when present. g(i, j) is the gain from transmitter j to receiver i.
template <typename Scalar>
struct GainMatrix {
    Matrix<Scalar> g;
    Eigen::Index n_umtc = 0;
    bool has_xmbb = false;

    auto umtc() const { return g.topLeftCorner(n_umtc, n_umtc); }
    auto umtc_to_basestation() const { return g.row(n_umtc).head(n_umtc); }
    auto xmbb_to_umtc() const { return g.col(n_umtc).head(n_umtc); }
    Scalar xmbb_to_basestation() const { return g(n_umtc, n_umtc); }
};

template <typename Scalar>
struct SinrTargets {
    Vector<Scalar> gamma; // per uMTC link, linear
    Vector<Scalar> noise; // per uMTC receiver
    Vector<Scalar> p_max; // per uMTC transmitter

    static SinrTargets uniform(Eigen::Index n, Scalar gamma, Scalar noise, Scalar p_max)
    {
        return {Vector<Scalar>::Constant(n, gamma), Vector<Scalar>::Constant(n, noise),
                Vector<Scalar>::Constant(n, p_max)};
    }

    Eigen::Index size() const { return gamma.size(); }

    void validate(Eigen::Index n) const
    {
        if (gamma.size() != n || noise.size() != n || p_max.size() != n)
            throw std::invalid_argument("SINR target dimensions do not match the link count");
        if ((gamma.array() <= Scalar(0)).any() || (noise.array() <= Scalar(0)).any() ||
            (p_max.array() < Scalar(0)).any())
            throw std::invalid_argument("SINR targets and noise must be positive, power caps non-negative");
    }
};

struct PathlossModel {
    double exponent = 3.5;
    double ref_gain_db = -30.0; // at 1 m
    double shadowing_db = 6.0;
    double min_distance_m = 1.0;
};

struct GainMatrixResult {
    GainMatrix<double> gains;
    bool clamped = false; // some distance fell below min_distance_m
};

/// g = K * d^-alpha * 10^(X/10) with X ~ N(0, shadowing_db^2) per link.
GainMatrixResult build_gain_matrix(const Topology& topology, const PathlossModel& model, Rng& rng);

struct SpectralRadius {
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
    bool decided = false; // stopped early against decide_at
};

inline constexpr double kSpectralTolerance = 1e-12;
inline constexpr int kSpectralMaxIterations = 10000;
inline constexpr double kFeasibilityBoundary = 1e-9;

/// Perron root of a non-negative matrix by power iteration on I + F, which is
/// aperiodic even when F is not. Stops when the Collatz-Wielandt bracket is
/// narrower than tol (relative); falls back to a dense eigensolver if the
/// iteration cap is hit. With decide_at set, also stops once the bracket lies
/// entirely on one side of it; value is then the bracket midpoint.
template <typename Derived>
SpectralRadius spectral_radius(const Eigen::MatrixBase<Derived>& F, double tol = kSpectralTolerance,
                               int max_iterations = kSpectralMaxIterations,
                               std::optional<double> decide_at = std::nullopt)
{
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = F.rows();
    if (n != F.cols())
        throw std::invalid_argument("spectral radius needs a square matrix");
    if (n == 0)
        return {0.0, 0, true};
    const Matrix<Scalar> shifted = F + Matrix<Scalar>::Identity(n, n);
    Vector<Scalar> x = Vector<Scalar>::Ones(n);
    SpectralRadius out;
    for (int it = 1; it <= max_iterations; ++it) {
        const Vector<Scalar> y = shifted * x;
        const auto ratio = (y.array() / x.array()).eval();
        const double lo = double(ratio.minCoeff());
        const double hi = double(ratio.maxCoeff());
        out.iterations = it;
        if (hi - lo <= tol * hi) {
            out.value = 0.5 * (lo + hi) - 1.0;
            out.converged = true;
            return out;
        }
        if (decide_at && (hi - 1.0 < *decide_at || lo - 1.0 >= *decide_at)) {
            out.value = 0.5 * (lo + hi) - 1.0;
            out.decided = true;
            return out;
        }
        x = y / y.maxCoeff();
    }
    Eigen::EigenSolver<Matrix<double>> es(F.template cast<double>().eval(), false);
    out.value = es.eigenvalues().cwiseAbs().maxCoeff();
    return out;
}

template <typename Scalar>
struct Feasibility {
    bool feasible = false;
    Vector<Scalar> power; // minimal power vector when feasible
    double spectral_radius = 0.0;

    explicit operator bool() const { return feasible; }
};

/// Normalized interference matrix F(i, j) = gamma_i g(i, j) / g(i, i), zero diagonal.
template <typename Derived, typename Scalar = typename Derived::Scalar>
Matrix<Scalar> normalized_interference(const Eigen::MatrixBase<Derived>& g, const Vector<Scalar>& gamma)
{
    const Vector<Scalar> diag = g.diagonal();
    Matrix<Scalar> F = (gamma.cwiseQuotient(diag)).asDiagonal() * g;
    F.diagonal().setZero();
    return F;
}

/// Achieved SINR at every uMTC receiver for a given power vector.
template <typename Derived, typename Scalar = typename Derived::Scalar>
Vector<Scalar> achieved_sinr(const Eigen::MatrixBase<Derived>& g, const Vector<Scalar>& power,
                             const Vector<Scalar>& noise, const Vector<Scalar>& external)
{
    const Vector<Scalar> signal = g.diagonal().cwiseProduct(power);
    const Vector<Scalar> interference = g * power - signal + noise + external;
    return signal.cwiseQuotient(interference);
}

/// Power-control feasibility: FEASIBLE iff rho(F) < 1 and the minimal power
/// vector p* = (I - F)^-1 u respects every cap, where
/// u_i = gamma_i (noise_i + external_i) / g(i, i). Radii within
/// kFeasibilityBoundary of 1 are treated as infeasible.
template <typename Derived, typename DerivedExt, typename Scalar = typename Derived::Scalar>
Feasibility<Scalar> feasibility_check(const Eigen::MatrixBase<Derived>& g, const SinrTargets<Scalar>& targets,
                                      const Eigen::MatrixBase<DerivedExt>& external)
{
    const Eigen::Index n = g.rows();
    if (n != g.cols() || n == 0)
        throw std::invalid_argument("uMTC gain matrix must be square and non-empty");
    targets.validate(n);
    if (external.size() != n || (external.array() < Scalar(0)).any())
        throw std::invalid_argument("external interference must be non-negative per receiver");
    if ((g.diagonal().array() <= Scalar(0)).any())
        throw std::invalid_argument("direct link gains must be positive");

    Feasibility<Scalar> out;
    const Matrix<Scalar> F = normalized_interference(g, targets.gamma);
    const double boundary = 1.0 - kFeasibilityBoundary;
    out.spectral_radius = spectral_radius(F, kSpectralTolerance, kSpectralMaxIterations, boundary).value;
    if (out.spectral_radius >= boundary)
        return out;

    const Vector<Scalar> u =
        targets.gamma.cwiseProduct((targets.noise + external).cwiseQuotient(Vector<Scalar>(g.diagonal())));
    const Matrix<Scalar> A = Matrix<Scalar>::Identity(n, n) - F;
    Vector<Scalar> p = A.partialPivLu().solve(u);
    if (!p.allFinite() || (p.array() < Scalar(0)).any())
        return out;
    if ((p.array() > targets.p_max.array()).any())
        return out;
    out.feasible = true;
    out.power = std::move(p);
    return out;
}

template <typename Scalar>
struct XmbbOperatingPoint {
    Scalar xmbb_power{};
    Scalar xmbb_rate{};
    Vector<Scalar> umtc_powers;
};

/// Largest xMBB power in [0, xmbb_p_max] for which the uMTC links stay
/// feasible, found by bisection; the rate is evaluated at the basestation at
/// that operating point. Empty when the uMTC links are infeasible at zero
/// xMBB power.
template <typename Scalar>
std::optional<XmbbOperatingPoint<Scalar>> max_xmbb_power(const GainMatrix<Scalar>& gains,
                                                         const SinrTargets<Scalar>& targets, Scalar xmbb_p_max,
                                                         Scalar basestation_noise, double rel_tol = 1e-13)
{
    if (!gains.has_xmbb)
        throw std::invalid_argument("gain matrix has no xMBB transmitter");
    if (xmbb_p_max < Scalar(0) || basestation_noise <= Scalar(0))
        throw std::invalid_argument("xMBB power cap must be non-negative and noise positive");

    const auto g = gains.umtc();
    const Vector<Scalar> coupling = gains.xmbb_to_umtc();
    auto check = [&](Scalar px) { return feasibility_check(g, targets, Vector<Scalar>(coupling * px)); };

    if (!check(Scalar(0)))
        return std::nullopt;

    Scalar px = xmbb_p_max;
    if (!check(xmbb_p_max)) {
        Scalar lo = 0, hi = xmbb_p_max;
        for (int it = 0; it < 400 && double(hi - lo) > rel_tol * double(xmbb_p_max); ++it) {
            const Scalar mid = lo + (hi - lo) / Scalar(2);
            (check(mid) ? lo : hi) = mid;
        }
        px = lo;
    }
    const auto at = check(px);
    XmbbOperatingPoint<Scalar> op;
    op.xmbb_power = px;
    op.umtc_powers = at.power;
    const Scalar interference = basestation_noise + gains.umtc_to_basestation().dot(at.power);
    op.xmbb_rate = std::log2(Scalar(1) + gains.xmbb_to_basestation() * px / interference);
    return op;
}

/// Random-drop scenario over which availability is estimated.
struct RrmScenario {
    Area area{500.0, 500.0};
    std::size_t n_pairs = 4;
    double pair_min_distance_m = 10.0;
    double pair_max_distance_m = 50.0;
    bool with_xmbb = true;
    Position basestation{250.0, 250.0};
    PathlossModel pathloss;
    double gamma = 3.1622776601683795; // linear SINR target
    double noise = 4e-14;               // W, per uMTC receiver
    double p_max = 0.2;                 // W
    double xmbb_p_max = 0.2;            // W
    double basestation_noise = 4e-14;   // W

    void validate() const;
};

Topology sample_topology(const RrmScenario& scenario, Rng& rng);

struct DropOutcome {
    bool feasible = false;
    std::optional<double> xmbb_rate;
};

/// One random topology drop: feasible iff the power-control problem is.
DropOutcome evaluate_drop(const RrmScenario& scenario, Rng& rng);

struct AvailabilityEstimate {
    BinomialEstimate feasible;
    double mean_xmbb_rate = 0.0; // over feasible drops

    double availability() const { return feasible.mean(); }
    double standard_error() const { return feasible.standard_error(); }
};

AvailabilityEstimate availability_estimate(const RrmScenario& scenario, std::uint64_t n_drops, Rng& rng);

struct AvailabilityPoint {
    double gamma_db = 0.0;
    AvailabilityEstimate estimate;
};

/// CSV: gamma_dB,availability,stderr,mean_xmbb_rate
void write_availability_csv(std::ostream& os, std::span<const AvailabilityPoint> sweep);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

} // namespace urvc::rrm
