#ifndef SYMPOL_CDGA_HPP
#define SYMPOL_CDGA_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sympol/derivation.hpp"
#include "sympol/element.hpp"

namespace sympol {

struct ReportIssue {
    std::string what;
    std::string witness;
};

struct Report {
    std::vector<ReportIssue> issues;
    bool ok() const { return issues.empty(); }
    void add(std::string what, std::string witness = "");
    std::string str() const;
};

class UnstableTruncationError : public std::runtime_error {
  public:
    explicit UnstableTruncationError(const std::string& what) : std::runtime_error(what) {}
};

class NonFiniteError : public std::runtime_error {
  public:
    explicit NonFiniteError(const std::string& what) : std::runtime_error(what) {}
};

/// Free weighted graded-commutative algebra with a square-zero differential
/// of cohomological degree +1 and weight 0, plus optional truncation bounds.
/// Quotients are never represented by relation ideals; relations enter as
/// generators with prescribed differentials (see quasi_free_resolution) or
/// as truncation flags.
struct FreeWCDGA {
    std::vector<Generator> gens;  // kind = base
    Derivation diff;              // degree_shift = +1, weight_shift = 0
    Trunc trunc;
    bool nonneg_chain = false;  // enforce non-negative chain degrees (z <= 0)

    // Set when this algebra is a Postnikov quotient A/tau_{>k} of `parent`.
    std::shared_ptr<const FreeWCDGA> postnikov_parent;
    int postnikov_level = 0;

    bool has_generator(Generator g) const;
    std::optional<Generator> find_generator(const std::string& name) const;

    /// delta(e) under this algebra's truncation.
    Element d(const Element& e) const { return derivation_apply(diff, e, &trunc); }
};

/// Convenience constructor; images default to zero for generators not named.
FreeWCDGA make_cdga(std::vector<Generator> gens,
                    std::vector<std::pair<Generator, Element>> images = {}, Trunc trunc = {});

/// Structural validation: delta^2 = 0 on every generator, degree/weight
/// homogeneity of all images, chain-grading and truncation coherence.
Report validate(const FreeWCDGA& A);

struct GradedPiece {
    int total_degree = 0;
    int weight = 0;
    std::vector<Monomial> basis;
    std::size_t dimension = 0;
};

/// Complete monomial basis of the (degree, weight) slice at polynomial order
/// <= max_order, in the deterministic monomial order.
GradedPiece graded_piece(const FreeWCDGA& A, int total_degree, int weight, int max_order);

/// Slice enumeration shared by the form/polyvector modules.  The generator
/// list may mix kinds; exact form/tangent orders may be constrained.
struct SliceSpec {
    int total_degree = 0;
    int weight = 0;
    std::optional<int> form_order;
    std::optional<int> xi_order;
    Trunc trunc;
};
std::vector<Monomial> enumerate_slice(const std::vector<Generator>& gens, const SliceSpec& spec);

struct HomologySlice {
    int total_degree = 0;
    int weight = 0;
    int dimension = 0;
    std::vector<Element> representatives;
    int order_used = 0;  // padding the stabilisation loop settled on
};

/// Exact homology of the order-truncated algebra at one (degree, weight)
/// slice.  The polynomial order is raised from max_order until two
/// consecutive answers agree; throws UnstableTruncationError at the ceiling.
HomologySlice homology(const FreeWCDGA& A, int total_degree, int weight, int max_order,
                       int order_ceiling = -1);

/// Morphism of free weighted CDGAs, given on generators of the source.
struct CdgaMap {
    std::map<uint32_t, Element> images;
    void set_image(Generator g, Element e) { images[g.id()] = std::move(e); }
    const Element* image(Generator g) const;
};

Report validate_map(const FreeWCDGA& A, const FreeWCDGA& B, const CdgaMap& f);
Element map_apply(const CdgaMap& f, const Element& e, const Trunc* trunc = nullptr);

/// Quotient by the ideal generated by weights outside [r, s], realised as a
/// truncation flag; returns the quotient together with the quotient map.
std::pair<FreeWCDGA, CdgaMap> weight_truncate(const FreeWCDGA& A, int r, int s);

/// Quotient by the good-truncation ideal tau_{>k} (chain degrees).  Homology
/// and graded pieces agree with A in chain degrees <= k.
FreeWCDGA postnikov_truncate(const FreeWCDGA& A, int k);

/// A free algebra together with a list of relations to kill; the target of
/// a resolution is the quotient of `base` by the dg ideal the relations
/// generate.
struct Presentation {
    FreeWCDGA base;
    std::vector<Element> relations;
};

struct Resolution {
    FreeWCDGA algebra;
    /// Generators adjoined per stage: (chain degree, generators).
    std::vector<std::pair<int, std::vector<Generator>>> stages;
    /// Images of the resolution generators in the presented quotient: base
    /// generators map to their classes, adjoined generators to zero.
    CdgaMap map;
};

/// Koszul-Tate style induction: adjoin generators in chain degree n+1
/// killing the degree-n homology of the partial resolution, up to the
/// requested chain degree.
Resolution quasi_free_resolution(const Presentation& target, int up_to_chain_degree);

}  // namespace sympol

#endif
