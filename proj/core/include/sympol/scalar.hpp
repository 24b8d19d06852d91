#ifndef SYMPOL_SCALAR_HPP
#define SYMPOL_SCALAR_HPP

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>

namespace sympol {

/// Exact rational scalar.  Always stored in lowest terms with positive
/// denominator; there is no floating point anywhere in the library.
class Scalar {
  public:
    Scalar() : v_(0) {}
    Scalar(long n) : v_(n) {}
    Scalar(long num, long den);
    explicit Scalar(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

    static std::optional<Scalar> parse(const std::string& text);

    bool is_zero() const { return sgn(v_) == 0; }
    bool is_one() const { return v_ == 1; }
    bool is_integer() const { return v_.get_den() == 1; }
    int sign() const { return sgn(v_); }

    Scalar operator-() const { return Scalar(mpq_class(-v_)); }
    Scalar& operator+=(const Scalar& o) { v_ += o.v_; return *this; }
    Scalar& operator-=(const Scalar& o) { v_ -= o.v_; return *this; }
    Scalar& operator*=(const Scalar& o) { v_ *= o.v_; return *this; }
    Scalar& operator/=(const Scalar& o);

    friend Scalar operator+(Scalar a, const Scalar& b) { a += b; return a; }
    friend Scalar operator-(Scalar a, const Scalar& b) { a -= b; return a; }
    friend Scalar operator*(Scalar a, const Scalar& b) { a *= b; return a; }
    friend Scalar operator/(Scalar a, const Scalar& b) { a /= b; return a; }

    Scalar inverse() const;

    friend bool operator==(const Scalar& a, const Scalar& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return a.v_ != b.v_; }
    friend bool operator<(const Scalar& a, const Scalar& b) { return a.v_ < b.v_; }

    /// Canonical form "p" for integers, "p/q" otherwise.
    std::string str() const;

    const mpq_class& raw() const { return v_; }

  private:
    mpq_class v_;
};

inline Scalar abs(const Scalar& s) { return s.sign() < 0 ? -s : s; }

}  // namespace sympol

#endif
