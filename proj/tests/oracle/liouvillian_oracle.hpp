#pragma once

// Test-only reference solution of the master equation.
//
// Builds the full dense Lindblad superoperator on the n x n density matrix
// (no block structure, no classical side channels), appends one row per
// radiative level for the integrated emission, and propagates with an exact
// matrix exponential. Shares nothing with the library integrator except the
// network description.

#include <complex>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "qdnet/qd/evolve.hpp"
#include "qdnet/qd/network.hpp"

namespace oracle {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;

/// Final photon yield of every radiative level, keyed by level id.
inline std::map<std::string, double> exact_yields(const qdnet::qd::QdNetwork& net,
                                                  const qdnet::qd::ControlPattern& control, double horizon_ps) {
    const Eigen::Index n = static_cast<Eigen::Index>(net.levels.size());
    Mat H = Mat::Zero(n, n);
    for (const auto& c : net.couplings) {
        const auto a = static_cast<Eigen::Index>(net.index_of(c.a));
        const auto b = static_cast<Eigen::Index>(net.index_of(c.b));
        H(a, b) = c.strength;
        H(b, a) = c.strength;
    }
    // Jump operators: relaxation |to><from| and radiation |ground><level|.
    // Radiation leaves the manifold, so only its anticommutator part acts on rho.
    std::vector<Mat> jumps;
    Mat loss = Mat::Zero(n, n);
    for (const auto& r : net.relaxations) {
        const double rate = control.blocked.count(r.to) ? r.blocked_rate : r.rate;
        Mat J = Mat::Zero(n, n);
        J(static_cast<Eigen::Index>(net.index_of(r.to)), static_cast<Eigen::Index>(net.index_of(r.from))) =
            std::sqrt(rate);
        jumps.push_back(J);
        loss += J.adjoint() * J;
    }
    std::vector<Eigen::Index> radiative;
    for (Eigen::Index v = 0; v < n; ++v) {
        const double g = net.levels[static_cast<std::size_t>(v)].radiative_rate_per_ps();
        loss(v, v) += g;
        if (g > 0) radiative.push_back(v);
    }

    const Mat I = Mat::Identity(n, n);
    // Row-major vectorisation: vec(A X B) = (A kron B^T) vec(X).
    Mat L = Complex(0, -1) * (Eigen::kroneckerProduct(H, I).eval() - Eigen::kroneckerProduct(I, H.transpose()).eval());
    L -= 0.5 * (Eigen::kroneckerProduct(loss, I).eval() + Eigen::kroneckerProduct(I, loss.transpose()).eval());
    for (const auto& J : jumps) L += Eigen::kroneckerProduct(J, J.conjugate()).eval();

    const Eigen::Index dim = n * n + static_cast<Eigen::Index>(radiative.size());
    Mat A = Mat::Zero(dim, dim);
    A.topLeftCorner(n * n, n * n) = L;
    for (std::size_t k = 0; k < radiative.size(); ++k) {
        const Eigen::Index v = radiative[k];
        A(n * n + static_cast<Eigen::Index>(k), v * n + v) =
            net.levels[static_cast<std::size_t>(v)].radiative_rate_per_ps();
    }
    Eigen::VectorXcd x0 = Eigen::VectorXcd::Zero(dim);
    const auto s = static_cast<Eigen::Index>(net.source_index());
    x0(s * n + s) = 1.0;
    const Mat propagator = (A * horizon_ps).exp();
    const Eigen::VectorXcd x = propagator * x0;

    std::map<std::string, double> out;
    for (std::size_t k = 0; k < radiative.size(); ++k)
        out[net.levels[static_cast<std::size_t>(radiative[k])].id] = x(n * n + static_cast<Eigen::Index>(k)).real();
    return out;
}

}  // namespace oracle
