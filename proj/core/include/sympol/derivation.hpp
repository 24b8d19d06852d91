#ifndef SYMPOL_DERIVATION_HPP
#define SYMPOL_DERIVATION_HPP

#include <map>
#include <stdexcept>
#include <string>

#include "sympol/element.hpp"

namespace sympol {

class MissingImageError : public std::runtime_error {
  public:
    explicit MissingImageError(Generator g)
        : std::runtime_error("derivation has no image for generator " + g.debug_str()),
          gen(g) {}
    Generator gen;
};

/// A graded derivation determined by its generator images.  degree_shift is
/// the shift of totalised cohomological degree; the parity used in the
/// Leibniz rule is degree_shift mod 2.
struct Derivation {
    std::map<uint32_t, Element> images;
    int degree_shift = 0;
    int weight_shift = 0;

    int parity() const { return ((degree_shift % 2) + 2) % 2; }

    void set_image(Generator g, Element e) { images[g.id()] = std::move(e); }
    bool has_image(Generator g) const { return images.count(g.id()) != 0; }
    const Element& image(Generator g) const;
};

/// The unique Leibniz extension of the generator images:
/// D(ab) = D(a) b + (-1)^{|D||a|} a D(b).
/// Throws MissingImageError if a generator of `a` has no image.
Element derivation_apply(const Derivation& D, const Element& a, const Trunc* trunc = nullptr);

/// Graded commutator [D,E] = D o E - (-1)^{|D||E|} E o D, returned as a
/// derivation via its images on the given generators.
Derivation derivation_commutator(const Derivation& D, const Derivation& E,
                                 const std::vector<Generator>& gens,
                                 const Trunc* trunc = nullptr);

}  // namespace sympol

#endif
