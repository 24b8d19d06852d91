#include "sympol/scalar.hpp"

#include <stdexcept>

namespace sympol {

Scalar::Scalar(long num, long den) : v_(num, den) {
    if (den == 0) throw std::domain_error("Scalar: zero denominator");
    v_.canonicalize();
}

Scalar& Scalar::operator/=(const Scalar& o) {
    if (o.is_zero()) throw std::domain_error("Scalar: division by zero");
    v_ /= o.v_;
    return *this;
}

Scalar Scalar::inverse() const {
    if (is_zero()) throw std::domain_error("Scalar: inverse of zero");
    return Scalar(mpq_class(1) / v_);
}

std::optional<Scalar> Scalar::parse(const std::string& text) {
    if (text.empty()) return std::nullopt;
    // Accept "p" and "p/q" with optional leading minus signs.
    mpq_class v;
    if (v.set_str(text, 10) != 0) return std::nullopt;
    if (v.get_den() == 0) return std::nullopt;
    v.canonicalize();
    return Scalar(std::move(v));
}

std::string Scalar::str() const {
    return v_.get_str();
}

}  // namespace sympol
