#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ots/error.hpp"

namespace ots {

inline constexpr double inf = std::numeric_limits<double>::infinity();

enum class VarKind { continuous, binary };
enum class Sense { le, eq, ge };

struct Variable {
    std::string name;
    VarKind kind = VarKind::continuous;
    double lower = 0;
    double upper = inf;
};

struct Term {
    int var = 0;
    double coef = 0;
};

/// sum(terms) <sense> rhs, labelled with a provenance tag that doubles as the LP row name.
struct Row {
    std::vector<Term> terms;
    Sense sense = Sense::le;
    double rhs = 0;
    std::string tag;
};

struct Objective {
    std::vector<Term> terms;
    double constant = 0;
};

/// Mixed-integer linear program in a solver-neutral form: minimise the objective subject
/// to the rows and the variable bounds.
class MilpModel {
public:
    int add_variable(std::string name, VarKind kind, double lower, double upper) {
        if (kind == VarKind::binary && (lower < 0 || upper > 1 || lower > upper))
            throw ModelError("binary variable " + name + " must have bounds within [0, 1]");
        if (lower > upper) throw ModelError("variable " + name + ": lower bound exceeds upper bound");
        if (index_.count(name)) throw ModelError("duplicate variable name " + name);
        const int idx = static_cast<int>(vars_.size());
        index_.emplace(name, idx);
        vars_.push_back({std::move(name), kind, lower, upper});
        return idx;
    }

    int add_row(std::vector<Term> terms, Sense sense, double rhs, std::string tag) {
        for (const auto& t : terms) {
            if (t.var < 0 || t.var >= variable_count())
                throw ModelError("row " + tag + " references an undeclared variable");
            if (!std::isfinite(t.coef)) throw ModelError("row " + tag + " has a non-finite coefficient");
        }
        if (!std::isfinite(rhs)) throw ModelError("row " + tag + " has a non-finite right-hand side");
        rows_.push_back({std::move(terms), sense, rhs, std::move(tag)});
        return static_cast<int>(rows_.size()) - 1;
    }

    void add_objective(int var, double coef) {
        if (var < 0 || var >= variable_count()) throw ModelError("objective references an undeclared variable");
        objective_.terms.push_back({var, coef});
    }
    void add_objective_constant(double c) { objective_.constant += c; }

    void set_bounds(int var, double lower, double upper) {
        auto& v = vars_.at(static_cast<std::size_t>(var));
        if (lower > upper) throw ModelError("variable " + v.name + ": lower bound exceeds upper bound");
        v.lower = lower;
        v.upper = upper;
    }

    std::optional<int> find(const std::string& name) const {
        const auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    int index_of(const std::string& name) const {
        const auto idx = find(name);
        if (!idx) throw ModelError("unknown variable " + name);
        return *idx;
    }

    const std::vector<Variable>& variables() const { return vars_; }
    const std::vector<Row>& rows() const { return rows_; }
    const Objective& objective() const { return objective_; }
    int variable_count() const { return static_cast<int>(vars_.size()); }
    int row_count() const { return static_cast<int>(rows_.size()); }

    int binary_count() const {
        int n = 0;
        for (const auto& v : vars_) n += v.kind == VarKind::binary;
        return n;
    }

    double evaluate_objective(const std::vector<double>& x) const {
        double s = objective_.constant;
        for (const auto& t : objective_.terms) s += t.coef * x.at(static_cast<std::size_t>(t.var));
        return s;
    }

private:
    std::vector<Variable> vars_;
    std::vector<Row> rows_;
    Objective objective_;
    std::unordered_map<std::string, int> index_;
};

inline double row_activity(const Row& row, const std::vector<double>& x) {
    double s = 0;
    for (const auto& t : row.terms) s += t.coef * x.at(static_cast<std::size_t>(t.var));
    return s;
}

/// Amount by which `activity` misses the row's requirement (0 when satisfied).
inline double row_violation(const Row& row, double activity) {
    switch (row.sense) {
    case Sense::le: return std::max(0.0, activity - row.rhs);
    case Sense::ge: return std::max(0.0, row.rhs - activity);
    case Sense::eq: return std::abs(activity - row.rhs);
    }
    return 0;
}

} // namespace ots
