#ifndef SYMPOL_CORRESPONDENCE_HPP
#define SYMPOL_CORRESPONDENCE_HPP

#include "sympol/derham.hpp"
#include "sympol/polyvector.hpp"

namespace sympol {

class MCFailureError : public std::logic_error {
  public:
    explicit MCFailureError(const std::string& w) : std::logic_error(w) {}
};

class NonFormalError : public std::runtime_error {
  public:
    explicit NonFormalError(const std::string& w) : std::runtime_error(w) {}
};

class ObstructionError : public std::runtime_error {
  public:
    ObstructionError(int level_, Element witness_, const std::string& w)
        : std::runtime_error(w), level(level_), witness(std::move(witness_)) {}
    int level;
    Element witness;
};

/// Compatibility map a df_1 ... df_p |-> a [pi, f_1] ... [pi, f_p], applied
/// termwise to an element over A and its forms.  Filtered and
/// weight-preserving.
Element mu(const PolyContext& C, const Element& e, const Element& pi);

/// sigma(pi) = sum_{i >= 2} (i-1) pi_i.
Element sigma(const Element& pi);

/// Strict inverse of a non-degenerate 2-form: the unique bivector with
/// mu(omega_2, pi_2) = pi_2.  Solved by exact linear algebra on the anchor
/// coefficients.  Throws NotInvertibleError when the block pairing is
/// singular and MCFailureError if a tripwire identity fails.
Element invert_two_form(const PolyContext& C, const Element& omega2);

/// Homotopy witness for mu(omega, pi) ~ sigma(pi): residue =
/// mu(omega, pi) - sigma(pi) - [delta + pi, h], recorded modulo F^{P+1}.
struct CompatibilityWitness {
    PreSymplectic omega;
    Element pi;
    Element h;
    Element residue;
    int max_level = 2;
};

Report verify_witness(const PolyContext& C, const CompatibilityWitness& w);

/// Builds pi = pi_2 + pi_3 + ... level by level from a strict symplectic
/// structure, solving the linear correction equations by exact elimination;
/// the MC residue and the compatibility residue vanish modulo F^{P+1}.
CompatibilityWitness symplectic_to_poisson(const PolyContext& C, const PreSymplectic& omega,
                                           int max_level);

/// The reverse direction: builds omega with mu(omega, pi) - sigma(pi) exact
/// modulo F^{P+1}, with omega_2 inverse to pi_2.
CompatibilityWitness poisson_to_symplectic(const PolyContext& C, const Element& pi,
                                           int max_level);

}  // namespace sympol

#endif
