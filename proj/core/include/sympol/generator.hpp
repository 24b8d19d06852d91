#ifndef SYMPOL_GENERATOR_HPP
#define SYMPOL_GENERATOR_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace sympol {

/// base: a ring generator x.  form: its Kaehler differential dx.
/// tangent: its shifted dual xi (see PolyContext).
enum class GenKind : uint8_t { base = 0, form = 1, tangent = 2 };

const char* kind_name(GenKind k);

/// Interned generator handle.  Generators are identified by the full tuple
/// (kind, name, degree, weight); interning the tuple keeps monomials cheap
/// to copy and compare.  The pool is process-global and append-only.
class Generator {
  public:
    Generator() : id_(0) {}

    /// Interns (kind, name, degree, weight); returns the existing handle if
    /// an identical tuple was interned before.
    static Generator make(GenKind kind, const std::string& name, int degree, int weight);

    GenKind kind() const;
    const std::string& name() const;

    /// Cohomological degree as stored.  For kind=form this is the degree of
    /// the underlying base generator; the +1 of the exterior differential is
    /// carried by total_degree().
    int degree() const;
    int weight() const;

    /// Degree in the totalised complex: degree() for base/tangent,
    /// degree()+1 for forms.
    int total_degree() const { return degree() + (kind() == GenKind::form ? 1 : 0); }

    /// Koszul parity = total_degree mod 2.
    int parity() const { return ((total_degree() % 2) + 2) % 2; }

    uint32_t id() const { return id_; }

    friend bool operator==(Generator a, Generator b) { return a.id_ == b.id_; }
    friend bool operator!=(Generator a, Generator b) { return a.id_ != b.id_; }

    /// Fixed total order used for monomial normal forms: lexicographic on
    /// (kind, name), then (degree, weight) to break ties between distinct
    /// interned tuples sharing a name.
    static bool order_less(Generator a, Generator b);

    std::string debug_str() const;

  private:
    explicit Generator(uint32_t id) : id_(id) {}
    uint32_t id_;
};

struct GeneratorOrder {
    bool operator()(Generator a, Generator b) const { return Generator::order_less(a, b); }
};

}  // namespace sympol

#endif
