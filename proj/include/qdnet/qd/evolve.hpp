#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "qdnet/core/error.hpp"
#include "qdnet/qd/network.hpp"

namespace qdnet::qd {

/// Lower levels currently state-filled by control light.
struct ControlPattern {
    std::set<std::string> blocked;

    bool operator==(const ControlPattern&) const = default;
    auto operator<=>(const ControlPattern&) const = default;
};

inline void validate(const QdNetwork& net, const ControlPattern& control) {
    for (const auto& id : control.blocked)
        require(net.level(id).kind == LevelKind::lower,
                "control pattern blocks '" + id + "', which is not a lower level");
}

struct IntegratorConfig {
    double dt_ps = 0.1;
    double horizon_ps = 10000.0;
    double conservation_tolerance = 1e-6;
    /// Spacing of the stored trajectory samples; rounded to whole steps.
    double sample_interval_ps = 10.0;
};

inline void validate(const IntegratorConfig& c) {
    require(c.dt_ps > 0.0, "integrator: dt must be > 0");
    require(c.horizon_ps >= 100.0 * c.dt_ps, "integrator: horizon must be >= 100 dt");
    require(c.conservation_tolerance > 0.0, "integrator: conservation_tolerance must be > 0");
    require(c.sample_interval_ps > 0.0, "integrator: sample_interval must be > 0");
}

/// Sampled solution of the master equation. Series are indexed
/// [level][sample] and share `times`.
struct Trajectory {
    std::vector<double> times;
    std::vector<std::string> coherent_levels;
    std::vector<std::vector<double>> coherent_populations;
    std::vector<std::string> lower_levels;
    std::vector<std::vector<double>> lower_populations;
    /// Cumulative emission probability of every radiative level.
    std::vector<std::string> radiative_levels;
    std::vector<std::vector<double>> photon_yields;

    std::size_t steps = 0;
    double max_conservation_drift = 0.0;
    double max_hermiticity_error = 0.0;

    std::size_t samples() const { return times.size(); }

    double final_yield(const std::string& id) const {
        for (std::size_t i = 0; i < radiative_levels.size(); ++i)
            if (radiative_levels[i] == id) return photon_yields[i].back();
        throw InvalidArgument("level '" + id + "' is not radiative");
    }

    double emitted(std::size_t sample) const {
        double total = 0.0;
        for (const auto& s : photon_yields) total += s[sample];
        return total;
    }

    double residual(std::size_t sample) const {
        double total = 0.0;
        for (const auto& s : coherent_populations) total += s[sample];
        for (const auto& s : lower_populations) total += s[sample];
        return total;
    }

    double coherent_trace(std::size_t sample) const {
        double total = 0.0;
        for (const auto& s : coherent_populations) total += s[sample];
        return total;
    }
};

namespace detail {

/// The master equation compiled into block-diagonal form.
///
/// Coherences only develop between levels joined by couplings, so the
/// density matrix is stored as one dense Hermitian block per connected
/// component of the coupling graph (singleton blocks for the rest).
/// Relaxation moves population between diagonal entries, possibly across
/// blocks, and radiation accumulates into photon yields.
class LiouvilleSystem {
public:
    LiouvilleSystem(const QdNetwork& net, const ControlPattern& control) {
        const std::size_t n = net.levels.size();
        std::vector<std::size_t> parent(n);
        std::iota(parent.begin(), parent.end(), std::size_t{0});
        auto root = [&](std::size_t v) {
            while (parent[v] != v) v = parent[v] = parent[parent[v]];
            return v;
        };
        for (const auto& c : net.couplings)
            parent[root(net.index_of(c.a))] = root(net.index_of(c.b));

        block_of_.assign(n, 0);
        local_of_.assign(n, 0);
        std::vector<std::size_t> block_for_root(n, static_cast<std::size_t>(-1));
        for (std::size_t v = 0; v < n; ++v) {
            const std::size_t r = root(v);
            if (block_for_root[r] == static_cast<std::size_t>(-1)) {
                block_for_root[r] = blocks_.size();
                blocks_.emplace_back();
            }
            Block& b = blocks_[block_for_root[r]];
            block_of_[v] = block_for_root[r];
            local_of_[v] = b.levels.size();
            b.levels.push_back(v);
        }
        std::size_t offset = 0;
        for (auto& b : blocks_) {
            b.offset = offset;
            b.dim = b.levels.size();
            b.neighbors.assign(b.dim, {});
            b.drain.assign(b.dim, 0.0);
            offset += b.dim * b.dim;
        }
        state_size_ = offset;

        for (const auto& c : net.couplings) {
            const std::size_t a = net.index_of(c.a), bb = net.index_of(c.b);
            Block& blk = blocks_[block_of_[a]];
            blk.neighbors[local_of_[a]].push_back({local_of_[bb], c.strength});
            blk.neighbors[local_of_[bb]].push_back({local_of_[a], c.strength});
        }

        std::vector<double> drain(n, 0.0);
        for (std::size_t v = 0; v < n; ++v) {
            const double gamma = net.levels[v].radiative_rate_per_ps();
            drain[v] += gamma;
            if (gamma > 0.0) emitters_.push_back({diag_pos(v), gamma});
        }
        for (const auto& r : net.relaxations) {
            const std::size_t f = net.index_of(r.from), t = net.index_of(r.to);
            const double rate = control.blocked.contains(r.to) ? r.blocked_rate : r.rate;
            drain[f] += rate;
            if (rate > 0.0) feeds_.push_back({diag_pos(f), diag_pos(t), rate});
        }
        for (std::size_t v = 0; v < n; ++v)
            blocks_[block_of_[v]].drain[local_of_[v]] = 0.5 * drain[v];

        // (H rho)_ac contributes +h rho_mc, (rho H)_ac contributes -rho_am h.
        for (const Block& b : blocks_) {
            const std::size_t k = b.dim;
            for (std::size_t a = 0; a < k; ++a)
                for (std::size_t c = a; c < k; ++c) {
                    Entry e{b.offset + a * k + c, b.offset + c * k + a, b.drain[a] + b.drain[c], terms_.size(), 0};
                    for (const auto& [m, h] : b.neighbors[a]) terms_.push_back({b.offset + m * k + c, h});
                    for (const auto& [m, h] : b.neighbors[c]) terms_.push_back({b.offset + a * k + m, -h});
                    e.term_end = terms_.size();
                    entries_.push_back(e);
                }
        }
    }

    std::size_t state_size() const { return state_size_; }
    std::size_t yield_count() const { return emitters_.size(); }

    std::size_t diag_pos(std::size_t level) const {
        const Block& b = blocks_[block_of_[level]];
        const std::size_t l = local_of_[level];
        return b.offset + l * b.dim + l;
    }

    /// d(rho)/dt and d(yield)/dt. The Hamiltonian part is summed in an
    /// order-independent way so that relabelling identical dots permutes
    /// the result bit for bit; the lower triangle is mirrored from the
    /// upper one so the state stays exactly Hermitian.
    void derivative(const std::vector<std::complex<double>>& rho, std::vector<std::complex<double>>& drho,
                    std::vector<double>& dyield) const {
        double re[kInlineTerms], im[kInlineTerms];
        std::vector<double> re_heap, im_heap;
        for (const Entry& e : entries_) {
            const std::size_t count = e.term_end - e.term_begin;
            double* pr = re;
            double* pi = im;
            if (count > kInlineTerms) {
                re_heap.resize(count);
                im_heap.resize(count);
                pr = re_heap.data();
                pi = im_heap.data();
            }
            for (std::size_t t = 0; t < count; ++t) {
                const Term& term = terms_[e.term_begin + t];
                const std::complex<double> v = term.h * rho[term.pos];
                pr[t] = v.real();
                pi[t] = v.imag();
            }
            const double comm_re = ordered_sum(pr, count);
            const double comm_im = ordered_sum(pi, count);
            const std::complex<double> damp = e.drain * rho[e.pos];
            // -i * comm - damp
            const std::complex<double> value(comm_im - damp.real(), -comm_re - damp.imag());
            if (e.pos == e.mirror) {
                drho[e.pos] = {value.real(), 0.0};
            } else {
                drho[e.pos] = value;
                drho[e.mirror] = std::conj(value);
            }
        }
        for (const Feed& f : feeds_) drho[f.to] += f.rate * rho[f.from].real();
        for (std::size_t i = 0; i < emitters_.size(); ++i)
            dyield[i] = emitters_[i].rate * rho[emitters_[i].diag].real();
    }

    double max_hermiticity_error(const std::vector<std::complex<double>>& rho) const {
        double worst = 0.0;
        for (const Block& b : blocks_)
            for (std::size_t a = 0; a < b.dim; ++a)
                for (std::size_t c = 0; c < b.dim; ++c)
                    worst = std::max(worst, std::abs(rho[b.offset + a * b.dim + c] -
                                                     std::conj(rho[b.offset + c * b.dim + a])));
        return worst;
    }

private:
    struct Block {
        std::size_t offset = 0;
        std::size_t dim = 0;
        std::vector<std::size_t> levels;
        std::vector<std::vector<std::pair<std::size_t, double>>> neighbors;
        std::vector<double> drain;
    };
    struct Term {
        std::size_t pos;
        double h;
    };
    // One upper-triangle element of one block.
    struct Entry {
        std::size_t pos;
        std::size_t mirror;
        double drain;
        std::size_t term_begin;
        std::size_t term_end;
    };
    struct Feed {
        std::size_t from;
        std::size_t to;
        double rate;
    };
    struct Emitter {
        std::size_t diag;
        double rate;
    };

    // Sorted by magnitude: invariant under permutation and negation of the terms.
    static double ordered_sum(double* terms, std::size_t count) {
        if (count > 2)
            std::sort(terms, terms + count, [](double x, double y) {
                const double ax = std::abs(x), ay = std::abs(y);
                return ax < ay || (ax == ay && x < y);
            });
        double s = 0.0;
        for (std::size_t i = 0; i < count; ++i) s += terms[i];
        return s;
    }

    static constexpr std::size_t kInlineTerms = 16;

    std::vector<Block> blocks_;
    std::vector<std::size_t> block_of_;
    std::vector<std::size_t> local_of_;
    std::vector<Feed> feeds_;
    std::vector<Emitter> emitters_;
    std::size_t state_size_ = 0;
    std::vector<Term> terms_;
    std::vector<Entry> entries_;
};

}  // namespace detail

/// Integrates the single-exciton master equation
///
///     d(rho)/dt = -i [H, rho] - (N rho + rho N) + sum_k G_k rho_ff |t><t|
///
/// starting from one exciton in the source level. H holds the couplings
/// as off-diagonal angular frequencies (hbar = 1). N = diag(rate/2), where
/// the rate of a level is its radiative rate plus the effective rates of
/// its outgoing relaxation channels; a channel whose destination is in
/// control.blocked runs at its blocked_rate. Each relaxation refills its
/// destination's population, so a lower level obeys
/// dP/dt = Gamma_eff rho_uu - gamma P, and yields integrate gamma * P.
///
/// Classical fixed-step RK4. Throws ConservationError as soon as
/// (emitted + population) drifts from 1 by more than the tolerance.
inline Trajectory evolve(const QdNetwork& net, const ControlPattern& control,
                         const IntegratorConfig& config = {}) {
    validate(net);
    validate(net, control);
    validate(config);

    detail::LiouvilleSystem sys(net, control);
    const std::size_t n = net.levels.size();
    const std::size_t total_steps =
        static_cast<std::size_t>(std::ceil(config.horizon_ps / config.dt_ps - 1e-9));
    const std::size_t sample_every =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(config.sample_interval_ps / config.dt_ps)));

    Trajectory traj;
    std::vector<std::size_t> coherent_idx, lower_idx, radiative_idx;
    for (std::size_t v = 0; v < n; ++v) {
        const auto& l = net.levels[v];
        if (l.kind == LevelKind::lower) {
            lower_idx.push_back(v);
            traj.lower_levels.push_back(l.id);
        } else {
            coherent_idx.push_back(v);
            traj.coherent_levels.push_back(l.id);
        }
        if (l.radiative_rate_per_ns > 0.0) {
            radiative_idx.push_back(v);
            traj.radiative_levels.push_back(l.id);
        }
    }
    traj.coherent_populations.assign(coherent_idx.size(), {});
    traj.lower_populations.assign(lower_idx.size(), {});
    traj.photon_yields.assign(radiative_idx.size(), {});

    const std::size_t m = sys.state_size();
    const std::size_t ny = sys.yield_count();
    std::vector<std::complex<double>> rho(m), tmp(m), k1(m), k2(m), k3(m), k4(m);
    std::vector<double> y(ny, 0.0), ytmp(ny), l1(ny), l2(ny), l3(ny), l4(ny);
    rho[sys.diag_pos(net.source_index())] = 1.0;

    std::vector<std::size_t> diag(n);
    for (std::size_t v = 0; v < n; ++v) diag[v] = sys.diag_pos(v);

    auto record = [&](std::size_t step) {
        traj.times.push_back(static_cast<double>(step) * config.dt_ps);
        for (std::size_t i = 0; i < coherent_idx.size(); ++i)
            traj.coherent_populations[i].push_back(rho[diag[coherent_idx[i]]].real());
        for (std::size_t i = 0; i < lower_idx.size(); ++i)
            traj.lower_populations[i].push_back(rho[diag[lower_idx[i]]].real());
        for (std::size_t i = 0; i < ny; ++i) traj.photon_yields[i].push_back(y[i]);
        traj.max_hermiticity_error = std::max(traj.max_hermiticity_error, sys.max_hermiticity_error(rho));
    };
    record(0);

    const double h = config.dt_ps;
    for (std::size_t step = 1; step <= total_steps; ++step) {
        sys.derivative(rho, k1, l1);
        for (std::size_t i = 0; i < m; ++i) tmp[i] = rho[i] + (0.5 * h) * k1[i];
        for (std::size_t i = 0; i < ny; ++i) ytmp[i] = y[i] + (0.5 * h) * l1[i];
        sys.derivative(tmp, k2, l2);
        for (std::size_t i = 0; i < m; ++i) tmp[i] = rho[i] + (0.5 * h) * k2[i];
        for (std::size_t i = 0; i < ny; ++i) ytmp[i] = y[i] + (0.5 * h) * l2[i];
        sys.derivative(tmp, k3, l3);
        for (std::size_t i = 0; i < m; ++i) tmp[i] = rho[i] + h * k3[i];
        for (std::size_t i = 0; i < ny; ++i) ytmp[i] = y[i] + h * l3[i];
        sys.derivative(tmp, k4, l4);
        for (std::size_t i = 0; i < m; ++i)
            rho[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        for (std::size_t i = 0; i < ny; ++i) y[i] += (h / 6.0) * (l1[i] + 2.0 * l2[i] + 2.0 * l3[i] + l4[i]);

        double total = 0.0;
        for (std::size_t v = 0; v < n; ++v) total += rho[diag[v]].real();
        for (double e : y) total += e;
        const double drift = std::abs(total - 1.0);
        traj.max_conservation_drift = std::max(traj.max_conservation_drift, drift);
        if (!(drift <= config.conservation_tolerance))
            throw ConservationError(static_cast<double>(step) * h, drift);

        if (step % sample_every == 0 || step == total_steps) record(step);
    }
    traj.steps = total_steps;
    return traj;
}

/// Final photon yield of every radiative level, in network order.
inline std::vector<double> final_yields(const Trajectory& traj) {
    std::vector<double> out;
    for (const auto& s : traj.photon_yields) out.push_back(s.back());
    return out;
}

}  // namespace qdnet::qd
