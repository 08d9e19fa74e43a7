#pragma once

#include <sstream>
#include <string>
#include <vector>

namespace diracq {

// Bundled models with hand-traced expectations; golden tests compare the
// analyzer against these numbers, so they must never be edited casually.
struct CorpusEntry {
    std::string name;     // file stem under models/
    std::string feature;  // which branch of the algorithm the model exercises
    std::string source;   // exact model file contents
    int constraints = 0;
    int primaries = 0;
    int first_class = 0;
    int second_class = 0;
    int free_count = 0;
    int generations = 0;
    std::string dof;
};

inline const std::vector<CorpusEntry>& corpus() {
    static const std::vector<CorpusEntry> entries = {
        {"free-particle",
         "regular kinetic term: invertible Legendre map, no constraints",
         "dim 2\nL = 1/2*v1^2 + 1/2*v2^2\n", 0, 0, 0, 0, 0, 0, "2"},
        {"linear-velocity",
         "consistency case (b): a pure second-class pair, both multipliers fixed to zero",
         "dim 2\nL = v1*q2\n", 2, 2, 0, 2, 0, 1, "1"},
        {"gauge-kinetic",
         "consistency case (c): a secondary constraint, then a pure first-class gauge pair",
         "dim 2\nL = 1/2*(v1 - q2)^2\n", 2, 1, 2, 0, 1, 2, "0"},
        {"mixed-class",
         "mixed classification: one second-class pair and one first-class gauge pair",
         "dim 4\nL = v1*q2 + 1/2*(v3 - q4)^2\n", 4, 3, 2, 2, 1, 2, "1"},
        {"driven-linear",
         "consistency case (b) with an inhomogeneous fix: a multiplier pinned to 1",
         "dim 2\nL = v1*q2 + q1\n", 2, 2, 0, 2, 0, 1, "1"},
    };
    return entries;
}

inline std::string corpus_text() {
    std::ostringstream os;
    os << "bundled models: " << corpus().size() << "\n";
    for (const CorpusEntry& e : corpus()) {
        std::string body = e.source;
        for (char& ch : body)
            if (ch == '\n') ch = ';';
        if (!body.empty() && body.back() == ';') body.pop_back();
        os << "  " << e.name << ": " << body << "\n";
        os << "    feature: " << e.feature << "\n";
        os << "    expected: " << e.constraints << " constraints (" << e.first_class
           << " first class, " << e.second_class << " second class), " << e.primaries
           << " primary, free multipliers " << e.free_count << ", generations " << e.generations
           << ", dof " << e.dof << "\n";
    }
    return os.str();
}

}  // namespace diracq
