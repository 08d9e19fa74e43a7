#pragma once

#include "expr.hpp"

#include <string>

namespace diracq {

enum class ConstraintClass { unclassified, first, second };

// generation 0 means primary; g >= 1 names the consistency pass that found it.
struct Constraint {
    Expr expr;
    int generation = 0;
    ConstraintClass klass = ConstraintClass::unclassified;
    int label = 0;
    bool mixed = false;
};

inline bool is_primary(const Constraint& c) { return c.generation == 0; }

inline std::string origin_str(const Constraint& c) {
    if (is_primary(c)) return "primary";
    std::string s = "secondary(" + std::to_string(c.generation) + ")";
    if (c.mixed) s += " [mixed residual]";
    return s;
}

inline std::string class_str(ConstraintClass k) {
    switch (k) {
        case ConstraintClass::first: return "first";
        case ConstraintClass::second: return "second";
        default: return "unclassified";
    }
}

}  // namespace diracq
