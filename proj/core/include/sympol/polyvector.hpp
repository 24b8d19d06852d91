#ifndef SYMPOL_POLYVECTOR_HPP
#define SYMPOL_POLYVECTOR_HPP

#include "sympol/cdga.hpp"
#include "sympol/linalg.hpp"

namespace sympol {

class ContextMismatchError : public std::runtime_error {
  public:
    explicit ContextMismatchError(const std::string& w) : std::runtime_error(w) {}
};

class NotMCError : public std::runtime_error {
  public:
    explicit NotMCError(const std::string& w) : std::runtime_error(w) {}
};

/// The shifted multiderivation algebra of A, concretised as A (x) Sym(Xi)
/// with one tangent dual xi_a per generator x_a, of degree n+1-z_a and
/// weight m-w_a.
struct PolyContext {
    FreeWCDGA base;
    int n = 0;
    int m = 0;
    std::vector<Generator> xi;  // parallel to base.gens
    Trunc trunc;                // base truncation plus the xi-order cap
    Element delta_hat;          // sum_a delta(x_a) xi_a, degree n+2, weight m

    std::vector<Generator> all_gens() const;
    Generator xi_of(Generator x) const;
    Generator x_of(Generator xi) const;
};

PolyContext make_poly_context(const FreeWCDGA& A, int n, int m,
                              std::optional<int> max_xi_order = std::nullopt);

/// The odd bracket on generators conjugate along `shift` = n+1 - |pairing|:
/// [xi_a, x_a] = 1, extended as a biderivation.  Used with shift = n for
/// Pol(A, n, m) elements and shift = n-1 for shifted cotangent algebras.
/// Both arguments must be termwise degree-homogeneous (always true of
/// monomials).
Element schouten_pair(int shift, const Element& P, const Element& Q,
                      const Trunc* trunc = nullptr);

/// Schouten-Nijenhuis bracket in the context: degree -(n+1), weight -m.
Element schouten(const PolyContext& C, const Element& P, const Element& Q);

/// Minimal xi-order among nonzero terms; nullopt for the zero polyvector
/// (filtration level infinity).
std::optional<int> filtration_level(const Element& P);

/// Maurer-Cartan residue [delta, pi] + (1/2)[pi, pi]; pi is an n-shifted
/// Poisson structure of weight m iff the residue vanishes.
Element check_mc(const PolyContext& C, const Element& pi);

/// Strict augmentation non-degeneracy of the xi-order-2 part.
Report check_nondegenerate(const PolyContext& C, const Element& pi);

/// Coefficient matrix of the bivector part: Q[a][b] is the coefficient
/// element obtained by contracting xi_a then xi_b.
std::vector<std::vector<Element>> bivector_matrix(const PolyContext& C, const Element& pi2);

/// The twisted differential [delta + pi, -] as a derivation on A (x) Sym(Xi).
/// Requires a vanishing MC residue.
Derivation twisted_complex(const PolyContext& C, const Element& pi);

}  // namespace sympol

#endif
