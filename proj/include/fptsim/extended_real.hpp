#pragma once

#include <cmath>
#include <limits>
#include <ostream>

#include "fptsim/errors.hpp"

namespace fptsim {

/// A real number or +infinity. Limit parameters such as V_i and Delta_i
/// diverge to +infinity in several regimes; the state is carried explicitly.
class ExtendedReal {
public:
    ExtendedReal() = default;
    ExtendedReal(double finite_value) : value_(finite_value) {  // NOLINT: implicit by intent
        if (!std::isfinite(finite_value)) {
            if (finite_value > 0) {
                infinite_ = true;
                value_ = 0.0;
            } else {
                throw DomainError("ExtendedReal: only finite values or +infinity are representable");
            }
        }
    }

    static ExtendedReal infinity() {
        ExtendedReal r;
        r.infinite_ = true;
        return r;
    }

    bool is_infinite() const { return infinite_; }
    bool is_finite() const { return !infinite_; }

    /// The finite value; throws when the value is +infinity.
    double value() const {
        if (infinite_) throw DomainError("ExtendedReal: value() requested on +infinity");
        return value_;
    }

    /// IEEE view, +infinity mapped to the floating-point infinity.
    double as_double() const {
        return infinite_ ? std::numeric_limits<double>::infinity() : value_;
    }

    friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
        return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
    }

    friend std::ostream& operator<<(std::ostream& os, const ExtendedReal& r) {
        if (r.infinite_) return os << "inf";
        return os << r.value_;
    }

private:
    double value_ = 0.0;
    bool infinite_ = false;
};

}  // namespace fptsim
