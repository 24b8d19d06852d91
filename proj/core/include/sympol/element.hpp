#ifndef SYMPOL_ELEMENT_HPP
#define SYMPOL_ELEMENT_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sympol/generator.hpp"
#include "sympol/scalar.hpp"

namespace sympol {

/// Truncation bounds threaded through all arithmetic.  A monomial failing
/// keep() is silently dropped; this realises quotients by truncation ideals.
struct Trunc {
    /// Polynomial order cap: counts exponents of kind=base factors only.
    std::optional<int> max_order;
    /// Symbol order cap: counts all exponents (base, form and tangent).
    /// Unlike max_order this ideal is stable under the universal derivation
    /// d, so de Rham contexts truncate with it.
    std::optional<int> max_symbol_order;
    /// Weight window [r, s]: drops every monomial lying in the two-sided
    /// ideal generated by weights outside the window.  A monomial is dropped
    /// iff the sum of its positive factor weights exceeds s or the sum of its
    /// negative factor weights is below r.
    std::optional<std::pair<int, int>> weight_window;
    std::optional<int> max_form_order;
    std::optional<int> max_xi_order;
    /// Window on the totalised cohomological degree (used by Postnikov-style
    /// truncations, where degrees are sign-coherent).
    std::optional<int> min_total_degree;
    std::optional<int> max_total_degree;

    bool unrestricted() const {
        return !max_order && !max_symbol_order && !weight_window && !max_form_order &&
               !max_xi_order && !min_total_degree && !max_total_degree;
    }
};

struct RawFactor {
    Generator gen;
    int exp = 1;
};

struct NormalizeResult;
NormalizeResult normalize(std::vector<RawFactor> raw);

/// Sorted product of generator powers.  Odd-parity generators appear with
/// exponent exactly 1; factors are ordered by Generator::order_less.
class Monomial {
  public:
    Monomial() = default;

    const std::vector<std::pair<Generator, int>>& factors() const { return factors_; }
    bool is_unit() const { return factors_.empty(); }

    int degree() const;        ///< sum of exp * stored degree
    int total_degree() const;  ///< degree() + form_order()
    int weight() const;
    int parity() const { return ((total_degree() % 2) + 2) % 2; }

    int order() const;        ///< exponent count over base factors
    int form_order() const;   ///< exponent count over form factors
    int xi_order() const;     ///< exponent count over tangent factors
    int symbol_order() const;  ///< total exponent count over all factors

    int positive_weight() const;  ///< sum of exp*weight over factors of positive weight
    int negative_weight() const;  ///< sum of exp*weight over factors of negative weight
    /// Number of nonzero-weight factor units; a monomial lies in the n-th
    /// power of the nonzero-weight ideal iff this count is >= n.
    int nonzero_weight_units() const;

    int exponent_of(Generator g) const;
    bool passes(const Trunc& t) const;

    /// Deterministic total order: total exponent count first, then the
    /// factor sequence (generator order, higher exponents first).
    friend bool operator<(const Monomial& a, const Monomial& b);
    friend bool operator==(const Monomial& a, const Monomial& b) {
        return a.factors_ == b.factors_;
    }
    friend bool operator!=(const Monomial& a, const Monomial& b) { return !(a == b); }

    std::string str() const;

  private:
    friend struct NormalizeResult;
    friend NormalizeResult normalize(std::vector<RawFactor> raw);
    std::vector<std::pair<Generator, int>> factors_;
};

struct NormalizeResult {
    bool odd_square = false;  ///< an odd generator appeared twice
    int sign = 1;             ///< Koszul sign of the sorting permutation
    Monomial mono;
};

/// Sorts a raw factor list into monomial normal form, counting the Koszul
/// sign of odd-odd transpositions.  Exponents must be >= 0.
NormalizeResult normalize(std::vector<RawFactor> raw);

/// Sparse exact linear combination of monomials; no zero coefficients.
class Element {
  public:
    Element() = default;
    static Element zero() { return Element(); }
    static Element scalar(Scalar s);
    static Element unit() { return scalar(Scalar(1)); }
    static Element generator(Generator g, int exp = 1);
    static Element monomial(Monomial m, Scalar coeff = Scalar(1));

    const std::map<Monomial, Scalar>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    void add_term(const Monomial& m, const Scalar& c);

    Element operator-() const;
    Element& operator+=(const Element& o);
    Element& operator-=(const Element& o);
    friend Element operator+(Element a, const Element& b) { a += b; return a; }
    friend Element operator-(Element a, const Element& b) { a -= b; return a; }
    friend Element operator*(const Scalar& s, Element e);

    friend bool operator==(const Element& a, const Element& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const Element& a, const Element& b) { return !(a == b); }

    /// Coefficient of the given monomial (zero if absent).
    Scalar coefficient(const Monomial& m) const;
    /// Coefficient of the unit monomial.
    Scalar constant_term() const { return coefficient(Monomial()); }
    /// Image under the augmentation killing all positive-order monomials.
    Scalar augmentation() const;

    /// True if every term has the same total degree and weight; reports them.
    bool is_homogeneous(int* total_degree = nullptr, int* weight = nullptr) const;

    Element filtered(const std::function<bool(const Monomial&)>& pred) const;
    Element truncated(const Trunc& t) const;
    /// Terms of the given total degree and weight.
    Element homogeneous_part(int total_degree, int weight) const;
    /// Terms of the given form order (number of d-factors).
    Element form_part(int p) const;
    /// Terms of the given tangent order.
    Element xi_part(int k) const;

    /// Minimal tangent order among nonzero terms; nullopt for zero.
    std::optional<int> min_xi_order() const;
    std::optional<int> max_xi_order() const;
    std::optional<int> max_form_order() const;

    std::string str() const;

  private:
    std::map<Monomial, Scalar> terms_;
};

/// Graded-commutative product; OddSquare terms vanish.  Truncation is applied
/// to every produced monomial when given.
Element mul(const Element& a, const Element& b, const Trunc* trunc = nullptr);
Element mul(const Element& a, const Element& b, const Trunc& trunc);

}  // namespace sympol

#endif
