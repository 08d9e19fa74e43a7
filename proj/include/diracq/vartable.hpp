#pragma once

#include <stdexcept>
#include <string>

namespace diracq {

enum class Role { q, p, v, u };

// Phase-space variable layout for a model of dimension d.
// Index blocks, in monomial-order position: q1..qd, p1..pd, v1..vd, u1..ud.
// The order within (q,p) realizes q1 < ... < qd < p1 < ... < pd.
class VarTable {
  public:
    VarTable() : d_(0) {}
    explicit VarTable(int d) : d_(d) {
        if (d < 1) throw std::invalid_argument("VarTable: dimension must be >= 1");
    }

    int dim() const { return d_; }
    int size() const { return 4 * d_; }

    // a is the 1-based label, e.g. index(Role::p, 2) is the slot of p2.
    int index(Role r, int a) const {
        if (a < 1 || a > d_) throw std::out_of_range("VarTable: label out of range");
        return block(r) * d_ + (a - 1);
    }

    Role role(int idx) const {
        check(idx);
        switch (idx / d_) {
            case 0: return Role::q;
            case 1: return Role::p;
            case 2: return Role::v;
            default: return Role::u;
        }
    }

    int label(int idx) const {
        check(idx);
        return idx % d_ + 1;
    }

    std::string name(int idx) const {
        static const char* prefix[] = {"q", "p", "v", "u"};
        check(idx);
        return std::string(prefix[idx / d_]) + std::to_string(label(idx));
    }

    bool operator==(const VarTable& o) const { return d_ == o.d_; }
    bool operator!=(const VarTable& o) const { return d_ != o.d_; }

  private:
    static int block(Role r) {
        switch (r) {
            case Role::q: return 0;
            case Role::p: return 1;
            case Role::v: return 2;
            default: return 3;
        }
    }
    void check(int idx) const {
        if (idx < 0 || idx >= size()) throw std::out_of_range("VarTable: index out of range");
    }

    int d_;
};

}  // namespace diracq
