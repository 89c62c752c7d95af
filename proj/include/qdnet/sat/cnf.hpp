#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qdnet/core/error.hpp"
#include "qdnet/core/random.hpp"

namespace qdnet::sat {

/// Literal i means x_i, -i means not x_i. Variables are 1-based.
using Clause = std::vector<int>;
using Assignment = std::vector<std::uint8_t>;  // index 0 = x_1

struct CnfFormula {
    int num_vars = 0;
    std::vector<Clause> clauses;

    std::size_t num_clauses() const { return clauses.size(); }
    bool operator==(const CnfFormula&) const = default;
};

inline bool literal_true(int lit, const Assignment& x) {
    const bool value = x[static_cast<std::size_t>(std::abs(lit) - 1)] != 0;
    return lit > 0 ? value : !value;
}

/// Empty string when the clause is well formed, else the reason.
inline std::string clause_problem(const Clause& c, int num_vars) {
    if (c.empty()) return "empty clause";
    if (c.size() > 3) return "clause has " + std::to_string(c.size()) + " literals, at most 3 allowed";
    for (std::size_t a = 0; a < c.size(); ++a) {
        if (c[a] == 0 || std::abs(c[a]) > num_vars)
            return "literal " + std::to_string(c[a]) + " out of range 1.." + std::to_string(num_vars);
        for (std::size_t b = a + 1; b < c.size(); ++b) {
            if (c[a] == c[b]) return "duplicate literal " + std::to_string(c[a]);
            if (c[a] == -c[b]) return "clause contains both " + std::to_string(std::abs(c[a])) + " and its negation";
        }
    }
    return {};
}

inline void validate(const CnfFormula& f) {
    require(f.num_vars >= 1, "formula needs at least one variable");
    for (std::size_t k = 0; k < f.clauses.size(); ++k) {
        const auto problem = clause_problem(f.clauses[k], f.num_vars);
        if (!problem.empty()) throw InvalidArgument("clause " + std::to_string(k + 1) + ": " + problem);
    }
}

inline bool evaluate(const CnfFormula& f, const Assignment& x) {
    require(x.size() == static_cast<std::size_t>(f.num_vars), "evaluate: assignment size does not match formula");
    return std::all_of(f.clauses.begin(), f.clauses.end(), [&](const Clause& c) {
        return std::any_of(c.begin(), c.end(), [&](int lit) { return literal_true(lit, x); });
    });
}

inline std::size_t unsatisfied_count(const CnfFormula& f, const Assignment& x) {
    return static_cast<std::size_t>(std::count_if(f.clauses.begin(), f.clauses.end(), [&](const Clause& c) {
        return std::none_of(c.begin(), c.end(), [&](int lit) { return literal_true(lit, x); });
    }));
}

/// Reads DIMACS CNF. `c` lines are comments, the `p cnf N M` line must come
/// before any clause, clauses end at 0 and may span lines. A line starting
/// with `%` ends the data (SATLIB uf* files carry such a trailer).
inline CnfFormula parse_dimacs(const std::string& text) {
    CnfFormula f;
    bool header = false;
    std::size_t declared = 0;
    Clause pending;
    std::size_t pending_line = 0;
    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::istringstream words(raw);
        std::string first;
        if (!(words >> first)) continue;
        if (first[0] == 'c') continue;
        if (first[0] == '%') break;
        if (first == "p") {
            if (header) throw ParseError(line, "second problem line");
            std::string kind, n, m, extra;
            if (!(words >> kind >> n >> m) || kind != "cnf" || (words >> extra))
                throw ParseError(line, "malformed problem line, expected 'p cnf <vars> <clauses>'");
            try {
                std::size_t used_n = 0, used_m = 0;
                const long vn = std::stol(n, &used_n);
                const long vm = std::stol(m, &used_m);
                if (used_n != n.size() || used_m != m.size() || vn < 1 || vm < 0) throw std::invalid_argument(n);
                f.num_vars = static_cast<int>(vn);
                declared = static_cast<std::size_t>(vm);
            } catch (const std::exception&) {
                throw ParseError(line, "malformed problem line, expected 'p cnf <vars> <clauses>'");
            }
            header = true;
            continue;
        }
        if (!header) throw ParseError(line, "clause before the 'p cnf' problem line");
        for (std::string tok = first;; ) {
            long lit = 0;
            try {
                std::size_t used = 0;
                lit = std::stol(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ParseError(line, "expected an integer literal, got '" + tok + "'");
            }
            if (lit == 0) {
                if (pending.empty()) throw ParseError(line, "empty clause");
                const auto problem = clause_problem(pending, f.num_vars);
                if (!problem.empty()) throw ParseError(pending_line, problem);
                f.clauses.push_back(std::move(pending));
                pending.clear();
            } else {
                if (std::labs(lit) > f.num_vars)
                    throw ParseError(line, "literal " + std::to_string(lit) + " exceeds variable count " +
                                               std::to_string(f.num_vars));
                if (pending.empty()) pending_line = line;
                pending.push_back(static_cast<int>(lit));
            }
            if (!(words >> tok)) break;
        }
    }
    if (!header) throw ParseError(line, "missing 'p cnf' problem line");
    if (!pending.empty()) throw ParseError(line, "last clause is missing its terminating 0");
    if (f.clauses.size() != declared)
        throw ParseError(line, "problem line declares " + std::to_string(declared) + " clauses, found " +
                                   std::to_string(f.clauses.size()));
    return f;
}

inline std::string to_dimacs(const CnfFormula& f) {
    std::string out = "p cnf " + std::to_string(f.num_vars) + " " + std::to_string(f.clauses.size()) + "\n";
    for (const auto& c : f.clauses) {
        for (int lit : c) out += std::to_string(lit) + " ";
        out += "0\n";
    }
    return out;
}

inline CnfFormula load_dimacs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_dimacs(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path.string() + ": " + e.message());
    }
}

struct NamedFormula {
    std::string name;
    CnfFormula formula;
};

/// A single .cnf file, or every *.cnf in a directory sorted by file name.
inline std::vector<NamedFormula> load_instances(const std::filesystem::path& path) {
    std::vector<NamedFormula> out;
    if (!std::filesystem::exists(path)) throw IoError("no such file or directory '" + path.string() + "'");
    if (std::filesystem::is_directory(path)) {
        std::vector<std::filesystem::path> files;
        for (const auto& e : std::filesystem::directory_iterator(path))
            if (e.is_regular_file() && e.path().extension() == ".cnf") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& p : files) out.push_back({p.stem().string(), load_dimacs(p)});
    } else {
        out.push_back({path.stem().string(), load_dimacs(path)});
    }
    return out;
}

/// Uniform random k-SAT: k distinct variables per clause, fair signs.
/// Satisfiability is not checked.
inline CnfFormula random_ksat(int num_vars, std::size_t num_clauses, Rng& rng, int k = 3) {
    require(k >= 1 && k <= 3 && num_vars >= k, "random_ksat: need 1 <= k <= 3 and N >= k");
    CnfFormula f;
    f.num_vars = num_vars;
    f.clauses.reserve(num_clauses);
    for (std::size_t m = 0; m < num_clauses; ++m) {
        Clause c;
        while (static_cast<int>(c.size()) < k) {
            const int v = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(num_vars)));
            if (std::find_if(c.begin(), c.end(), [&](int l) { return std::abs(l) == v; }) == c.end()) c.push_back(v);
        }
        for (int& l : c)
            if (rng.uniform() < 0.5) l = -l;
        f.clauses.push_back(std::move(c));
    }
    return f;
}

/// (x1 or not x2)(not x2 or x3 or not x4)(x1 or x3)(x2 or not x3)(x3 or not x4)(not x1 or x4);
/// its only model is (1,1,1,1).
inline CnfFormula example_formula() {
    return {4, {{1, -2}, {-2, 3, -4}, {1, 3}, {2, -3}, {3, -4}, {-1, 4}}};
}

}  // namespace qdnet::sat
