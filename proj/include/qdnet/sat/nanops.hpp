#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <iterator>
#include <set>
#include <vector>

#include "qdnet/core/error.hpp"
#include "qdnet/core/random.hpp"
#include "qdnet/qd/profile.hpp"
#include "qdnet/sat/cnf.hpp"
#include "qdnet/sat/rules.hpp"

namespace qdnet::sat {

/// Per-dot arrays are indexed by dot_index(): 2(i-1) + v.
struct NanoPsState {
    std::vector<std::int8_t> X;   // accumulated radiation, in {-1, 0, 1}
    std::vector<std::uint8_t> F;  // state-filling stimulation
    std::vector<std::uint8_t> R;  // radiation observed in the last step
    Assignment x;
    std::uint64_t t = 0;

    explicit NanoPsState(int num_vars = 0)
        : X(2 * static_cast<std::size_t>(num_vars), 0), F(X.size(), 0), R(X.size(), 0),
          x(static_cast<std::size_t>(num_vars), 0) {}

    std::int8_t X_of(Dot d) const { return X[dot_index(d)]; }
    std::uint8_t F_of(Dot d) const { return F[dot_index(d)]; }
};

struct NanoPsConfig {
    std::vector<double> p;  // per dot; empty = uniform default_p
    double default_p = 0.1;
    std::uint64_t max_steps = 1'000'000;
    std::uint64_t seed = 1;
};

/// Per-dot transfer probabilities for a formula with `num_vars` variables.
inline std::vector<double> resolve_probabilities(const NanoPsConfig& config, int num_vars) {
    std::vector<double> p = config.p;
    if (p.empty()) p.assign(2 * static_cast<std::size_t>(num_vars), config.default_p);
    require(p.size() == 2 * static_cast<std::size_t>(num_vars), "NanoPS: need one probability per value dot (2N)");
    for (double v : p) require(v > 0.0 && v < 1.0, "NanoPS: transfer probabilities must lie strictly in (0,1)");
    return p;
}

/// Transfer probability of a stimulated dot taken from a qd-core profile:
/// destination 1 with only destination 1 blocked.
inline double stimulated_probability(const qd::TransferProfile& profile) {
    return profile.probabilities(qd::PatternMask{1})[0];
}

/// One synchronous step, evaluated directly from the rule list.
///   R: radiates with probability p if stimulated, 1-p if not
///   X: +1 on radiation, -1 otherwise, saturating at +-1
///   x: 0 if X_{i,0} = 1 and X_{i,1} <= 0, 1 if X_{i,1} = 1 and X_{i,0} <= 0, else kept
///   F: targets of every rule whose premise holds in the new X
/// `uniform` yields doubles in [0,1); one draw per dot in index order.
template <class Uniform>
NanoPsState nanops_step(const NanoPsState& state, const RuleSet& rules, const std::vector<double>& p,
                        Uniform&& uniform) {
    NanoPsState next = state;
    for (std::size_t d = 0; d < state.X.size(); ++d) {
        const double prob = state.F[d] ? p[d] : 1.0 - p[d];
        next.R[d] = uniform() < prob ? 1 : 0;
        if (next.R[d])
            next.X[d] = static_cast<std::int8_t>(std::min(state.X[d] + 1, 1));
        else
            next.X[d] = static_cast<std::int8_t>(std::max(state.X[d] - 1, -1));
    }
    for (std::size_t i = 0; i < next.x.size(); ++i) {
        const auto x0 = next.X[2 * i], x1 = next.X[2 * i + 1];
        if (x0 == 1 && x1 <= 0)
            next.x[i] = 0;
        else if (x1 == 1 && x0 <= 0)
            next.x[i] = 1;
    }
    std::fill(next.F.begin(), next.F.end(), 0);
    rules.for_each([&](const BounceRule& r) {
        if (std::all_of(r.premise.begin(), r.premise.end(), [&](Dot d) { return next.X[dot_index(d)] == 1; }))
            for (Dot d : r.target) next.F[dot_index(d)] = 1;
    });
    ++next.t;
    return next;
}

namespace detail {

/// True when CONTRA is exactly the set of premise unions of INTER rule
/// pairs aimed at (i,0) and (i,1), with single targets and premises of at
/// most two dots (what compile_rules builds for 3-SAT).
inline bool contra_is_pairwise(const RuleSet& rules) {
    for (const auto& r : rules.inter)
        if (r.target.size() != 1 || r.premise.size() > 2) return false;
    std::set<std::vector<Dot>> expected, given;
    for (const auto& ra : rules.inter) {
        if (ra.target[0].value != 0) continue;
        for (const auto& rb : rules.inter) {
            if (rb.target[0] != Dot{ra.target[0].var, 1}) continue;
            std::vector<Dot> u;
            std::set_union(ra.premise.begin(), ra.premise.end(), rb.premise.begin(), rb.premise.end(),
                           std::back_inserter(u));
            expected.insert(std::move(u));
        }
    }
    for (const auto& r : rules.contra) {
        if (r.premise != r.target) return false;
        given.insert(r.premise);
    }
    return given.size() == rules.contra.size() && given == expected;
}

}  // namespace detail

/// Same dynamics as nanops_step, with flattened rules and clause
/// satisfaction tracked per flip.
///
/// When CONTRA is exactly the set of pairwise premise unions of INTER rules
/// aimed at (i,0) and (i,1), as compile_rules builds it, a CONTRA rule holds
/// iff both of its INTER rules hold. CONTRA then stimulates the premise of
/// every holding INTER rule whose opposite value also has a holding INTER
/// rule, and is evaluated that way instead of rule by rule.
class NanoPsEngine {
public:
    NanoPsEngine(const CnfFormula& formula, const RuleSet& rules, std::vector<double> p)
        : p_(std::move(p)), state_(formula.num_vars) {
        const std::size_t dots = state_.X.size();
        require(p_.size() == dots, "NanoPS: need one probability per value dot (2N)");
        const auto always = static_cast<std::uint32_t>(dots);
        up_.assign(dots + 1, 0);
        up_[always] = 1;
        stim_.assign(dots + 1, 0);
        aimed_.assign(dots, 0);
        factored_ = detail::contra_is_pairwise(rules);

        auto add = [&](const BounceRule& r, bool inter) {
            if (r.premise.size() <= 2 && r.target.size() == 1) {
                Pair s{always, always, static_cast<std::uint32_t>(dot_index(r.target[0]))};
                if (!r.premise.empty()) s.a = s.b = static_cast<std::uint32_t>(dot_index(r.premise[0]));
                if (r.premise.size() == 2) s.b = static_cast<std::uint32_t>(dot_index(r.premise[1]));
                (inter && factored_ ? inter_ : pairs_).push_back(s);
                return;
            }
            for (Dot d : r.premise) premises_.push_back(static_cast<std::uint32_t>(dot_index(d)));
            for (Dot d : r.target) targets_.push_back(static_cast<std::uint32_t>(dot_index(d)));
            premise_end_.push_back(static_cast<std::uint32_t>(premises_.size()));
            target_end_.push_back(static_cast<std::uint32_t>(targets_.size()));
        };
        for (const auto& r : rules.intra) add(r, false);
        for (const auto& r : rules.inter) add(r, true);
        if (!factored_)
            for (const auto& r : rules.contra) add(r, false);
        holding_.assign(inter_.size(), 0);
        fire();

        occurs_.resize(static_cast<std::size_t>(formula.num_vars));
        true_count_.assign(formula.clauses.size(), 0);
        for (std::size_t c = 0; c < formula.clauses.size(); ++c)
            for (int lit : formula.clauses[c]) {
                occurs_[static_cast<std::size_t>(std::abs(lit) - 1)].push_back({static_cast<std::uint32_t>(c), lit > 0});
                if (literal_true(lit, state_.x)) ++true_count_[c];
            }
        unsat_ = static_cast<std::size_t>(std::count(true_count_.begin(), true_count_.end(), 0u));
    }

    const NanoPsState& state() const { return state_; }
    bool satisfied() const { return unsat_ == 0; }
    std::size_t unsatisfied() const { return unsat_; }
    /// True when CONTRA is evaluated through the INTER firings.
    bool contra_factored() const { return factored_; }

    template <class Uniform>
    void step(Uniform&& uniform) {
        const std::size_t dots = state_.X.size();
        for (std::size_t d = 0; d < dots; ++d) {
            const double prob = state_.F[d] ? p_[d] : 1.0 - p_[d];
            const bool r = uniform() < prob;
            state_.R[d] = r ? 1 : 0;
            state_.X[d] = r ? static_cast<std::int8_t>(std::min(state_.X[d] + 1, 1))
                            : static_cast<std::int8_t>(std::max(state_.X[d] - 1, -1));
            up_[d] = state_.X[d] == 1;
        }
        for (std::size_t i = 0; i < state_.x.size(); ++i) {
            const auto x0 = state_.X[2 * i], x1 = state_.X[2 * i + 1];
            std::uint8_t v = state_.x[i];
            if (x0 == 1 && x1 <= 0)
                v = 0;
            else if (x1 == 1 && x0 <= 0)
                v = 1;
            if (v != state_.x[i]) flip(i);
        }
        fire();
        ++state_.t;
    }

private:
    struct Occurrence {
        std::uint32_t clause;
        bool positive;
    };
    // Rule with at most two premise dots and one target. A missing premise
    // dot points at the always-up slot.
    struct Pair {
        std::uint32_t a, b, t;
    };

    // Raw pointers throughout: byte stores may alias vector internals, which
    // otherwise forces a reload per rule.
    void fire() {
        const std::uint8_t* up = up_.data();
        std::uint8_t* stim = stim_.data();
        std::uint8_t* holding = holding_.data();
        std::uint32_t* aimed = aimed_.data();
        std::fill(stim, stim + stim_.size(), 0);
        for (const Pair* s = pairs_.data(), *end = s + pairs_.size(); s != end; ++s) stim[s->t] |= up[s->a] & up[s->b];
        const Pair* inter = inter_.data();
        const std::size_t n = inter_.size();
        for (std::size_t k = 0; k < n; ++k) {
            const std::uint8_t h = up[inter[k].a] & up[inter[k].b];
            holding[k] = h;
            stim[inter[k].t] |= h;
            aimed[inter[k].t] += h;
        }
        // (i,0) and (i,1) differ in the lowest bit of the dot index.
        for (std::size_t k = 0; k < n; ++k) {
            const std::uint8_t c = holding[k] & static_cast<std::uint8_t>(aimed[inter[k].t ^ 1u] != 0);
            stim[inter[k].a] |= c;
            stim[inter[k].b] |= c;
        }
        std::fill(aimed, aimed + aimed_.size(), 0);
        std::uint32_t pb = 0, tb = 0;
        for (std::size_t r = 0; r < premise_end_.size(); ++r) {
            bool all = true;
            for (auto k = pb; k < premise_end_[r] && all; ++k) all = up[premises_[k]];
            if (all)
                for (auto k = tb; k < target_end_[r]; ++k) stim[targets_[k]] = 1;
            pb = premise_end_[r];
            tb = target_end_[r];
        }
        std::copy(stim, stim + state_.F.size(), state_.F.begin());
    }

    void flip(std::size_t i) {
        state_.x[i] ^= 1u;
        const bool value = state_.x[i] != 0;
        for (const auto& o : occurs_[i]) {
            if (o.positive == value) {
                if (true_count_[o.clause]++ == 0) --unsat_;
            } else {
                if (--true_count_[o.clause] == 0) ++unsat_;
            }
        }
    }

    std::vector<double> p_;
    NanoPsState state_;
    bool factored_ = false;
    std::vector<std::uint8_t> up_;    // X == +1, plus a trailing always-up slot
    std::vector<std::uint8_t> stim_;  // next F, plus a scratch slot
    std::vector<Pair> pairs_;         // small rules evaluated directly
    std::vector<Pair> inter_;         // INTER rules when CONTRA is factored
    std::vector<std::uint8_t> holding_;
    std::vector<std::uint32_t> aimed_;  // holding INTER rules per target dot
    // Remaining rules as flat lists; rule r ends at premise_end_[r] / target_end_[r].
    std::vector<std::uint32_t> premise_end_, premises_;
    std::vector<std::uint32_t> target_end_, targets_;
    std::vector<std::vector<Occurrence>> occurs_;
    std::vector<std::uint32_t> true_count_;
    std::size_t unsat_ = 0;
};

struct SolveResult {
    bool solved = false;
    std::uint64_t steps = 0;  // steps taken (the budget on timeout)
    Assignment assignment;
};

/// Up to 64 independent NanoPS runs on one formula, one per bit lane. Each
/// lane draws from its own Rng exactly as nanops_solve does, so lane l
/// reproduces nanops_solve(formula, rules, config, rngs[l]) step for step.
class NanoPsBatch {
public:
    using Mask = std::uint64_t;
    static constexpr std::size_t kLanes = 64;

    NanoPsBatch(const CnfFormula& formula, const RuleSet& rules, std::vector<double> p)
        : formula_(formula), p_(std::move(p)), dots_(2 * static_cast<std::size_t>(formula.num_vars)) {
        require(p_.size() == dots_, "NanoPS: need one probability per value dot (2N)");
        for (double v : p_) q_.push_back(1.0 - v);
        const auto always = static_cast<std::uint32_t>(dots_);
        rules.for_each([&](const BounceRule& r) {
            std::vector<std::uint32_t> pre, tgt;
            for (Dot d : r.premise) pre.push_back(static_cast<std::uint32_t>(dot_index(d)));
            for (Dot d : r.target) tgt.push_back(static_cast<std::uint32_t>(dot_index(d)));
            if (pre.empty()) pre.push_back(always);
            generic_.push_back({std::move(pre), std::move(tgt)});
        });
        factored_ = detail::contra_is_pairwise(rules);
        if (factored_) {
            generic_.clear();
            auto pair_of = [&](const BounceRule& r) {
                Pair s{always, always, static_cast<std::uint32_t>(dot_index(r.target[0]))};
                if (!r.premise.empty()) s.a = s.b = static_cast<std::uint32_t>(dot_index(r.premise[0]));
                if (r.premise.size() == 2) s.b = static_cast<std::uint32_t>(dot_index(r.premise[1]));
                return s;
            };
            for (const auto& r : rules.intra) {
                std::vector<std::uint32_t> pre, tgt;
                for (Dot d : r.premise) pre.push_back(static_cast<std::uint32_t>(dot_index(d)));
                for (Dot d : r.target) tgt.push_back(static_cast<std::uint32_t>(dot_index(d)));
                if (pre.empty()) pre.push_back(always);
                generic_.push_back({std::move(pre), std::move(tgt)});
            }
            for (const auto& r : rules.inter) inter_.push_back(pair_of(r));
        }
    }

    /// Runs every lane until it satisfies the formula or reaches max_steps.
    std::vector<SolveResult> solve(std::vector<Rng>& rngs, std::uint64_t max_steps) const {
        const std::size_t lanes = rngs.size();
        require(lanes >= 1 && lanes <= kLanes, "NanoPS batch holds 1 to 64 runs");
        const std::size_t n = static_cast<std::size_t>(formula_.num_vars);
        std::vector<Mask> up(dots_ + 1, 0), down(dots_, 0), r(dots_, 0), f(dots_ + 1, 0), aimed(dots_, 0), x(n, 0);
        std::vector<Mask> holding(inter_.size());
        up[dots_] = ~Mask{0};
        std::vector<SolveResult> out(lanes);
        Mask active = lanes == kLanes ? ~Mask{0} : (Mask{1} << lanes) - 1;

        for (std::uint64_t t = 1; t <= max_steps && active; ++t) {
            // Radiation, lane by lane so that each Rng is consumed in dot order.
            std::fill(r.begin(), r.end(), 0);
            for (Mask left = active; left; left &= left - 1) {
                const int l = std::countr_zero(left);
                const Mask bit = Mask{1} << l;
                Rng& rng = rngs[static_cast<std::size_t>(l)];
                for (std::size_t d = 0; d < dots_; ++d) {
                    const double prob = (f[d] & bit) ? p_[d] : q_[d];
                    r[d] |= bit & (Mask{0} - static_cast<Mask>(rng.uniform() < prob));
                }
            }
            for (std::size_t d = 0; d < dots_; ++d) {
                const Mask nu = r[d] & ~down[d];
                down[d] = ~r[d] & ~up[d];
                up[d] = nu;
            }
            for (std::size_t i = 0; i < n; ++i) {
                const Mask u0 = up[2 * i], u1 = up[2 * i + 1];
                x[i] = (x[i] | (u1 & ~u0)) & ~(u0 & ~u1);
            }
            fire(up, f, aimed, holding);

            Mask sat = active;
            for (const auto& clause : formula_.clauses) {
                Mask any = 0;
                for (int lit : clause) {
                    const Mask v = x[static_cast<std::size_t>(std::abs(lit) - 1)];
                    any |= lit > 0 ? v : ~v;
                }
                sat &= any;
                if (!sat) break;
            }
            for (Mask done = sat; done; done &= done - 1) {
                const int l = std::countr_zero(done);
                out[static_cast<std::size_t>(l)] = {true, t, lane_assignment(x, l)};
                if (!evaluate(formula_, out[static_cast<std::size_t>(l)].assignment))
                    throw Error("NanoPS returned an assignment that does not satisfy the formula");
            }
            active &= ~sat;
        }
        for (Mask left = active; left; left &= left - 1) {
            const int l = std::countr_zero(left);
            out[static_cast<std::size_t>(l)] = {false, max_steps, lane_assignment(x, l)};
        }
        return out;
    }

private:
    struct Pair {
        std::uint32_t a, b, t;
    };
    struct Rule {
        std::vector<std::uint32_t> premise, target;
    };

    void fire(const std::vector<Mask>& up, std::vector<Mask>& f, std::vector<Mask>& aimed,
              std::vector<Mask>& holding) const {
        std::fill(f.begin(), f.end(), 0);
        for (const auto& rule : generic_) {
            Mask h = ~Mask{0};
            for (auto d : rule.premise) h &= up[d];
            if (h)
                for (auto d : rule.target) f[d] |= h;
        }
        if (!factored_) return;
        std::fill(aimed.begin(), aimed.end(), 0);
        for (std::size_t k = 0; k < inter_.size(); ++k) {
            const Pair& s = inter_[k];
            holding[k] = up[s.a] & up[s.b];
            f[s.t] |= holding[k];
            aimed[s.t] |= holding[k];
        }
        for (std::size_t k = 0; k < inter_.size(); ++k) {
            const Pair& s = inter_[k];
            const Mask c = holding[k] & aimed[s.t ^ 1u];
            f[s.a] |= c;
            f[s.b] |= c;
        }
    }

    static Assignment lane_assignment(const std::vector<Mask>& x, int lane) {
        Assignment a(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) a[i] = static_cast<std::uint8_t>((x[i] >> lane) & 1u);
        return a;
    }

    CnfFormula formula_;
    std::vector<double> p_, q_;  // q = 1 - p
    std::size_t dots_;
    bool factored_ = false;
    std::vector<Rule> generic_;  // all rules, or INTRA only when CONTRA is factored
    std::vector<Pair> inter_;
};

/// Iterates from X = R = F = 0, x = 0 and stops at the first step whose x
/// satisfies the formula. Returns solved = false after max_steps.
inline SolveResult nanops_solve(const CnfFormula& formula, const RuleSet& rules, const NanoPsConfig& config, Rng& rng) {
    NanoPsEngine engine(formula, rules, resolve_probabilities(config, formula.num_vars));
    auto uniform = [&rng] { return rng.uniform(); };
    for (std::uint64_t t = 0; t < config.max_steps; ++t) {
        engine.step(uniform);
        if (engine.satisfied()) {
            SolveResult r{true, engine.state().t, engine.state().x};
            if (!evaluate(formula, r.assignment)) throw Error("NanoPS returned an assignment that does not satisfy the formula");
            return r;
        }
    }
    return {false, config.max_steps, engine.state().x};
}

inline SolveResult nanops_solve(const CnfFormula& formula, const NanoPsConfig& config) {
    Rng rng(config.seed);
    return nanops_solve(formula, compile_rules(formula), config, rng);
}

}  // namespace qdnet::sat
