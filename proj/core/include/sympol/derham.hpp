#ifndef SYMPOL_DERHAM_HPP
#define SYMPOL_DERHAM_HPP

#include <map>

#include "sympol/cdga.hpp"
#include "sympol/linalg.hpp"

namespace sympol {

class NotClosedError : public std::runtime_error {
  public:
    explicit NotClosedError(const std::string& w) : std::runtime_error(w) {}
};

class NonSquareBlockError : public std::runtime_error {
  public:
    explicit NonSquareBlockError(const std::string& w) : std::runtime_error(w) {}
};

class NotInvertibleError : public std::runtime_error {
  public:
    explicit NotInvertibleError(const std::string& w) : std::runtime_error(w) {}
};

/// The form generator dx attached to a base generator x.  It is stored with
/// the degree and weight of x; the +1 of d is carried by the form kind.
Generator form_generator(Generator x);

/// Base generators of A together with their forms.
std::vector<Generator> with_forms(const FreeWCDGA& A);

/// Universal derivation: x |-> dx, dx |-> 0.  d^2 = 0.
Element d(const Element& a, const Trunc* trunc = nullptr);

/// Internal differential of the de Rham bicomplex: extends delta of A by
/// delta(dx) = -d(delta x), which makes it anticommute with d.
Derivation de_rham_delta(const FreeWCDGA& A);

/// Total de Rham differential (d + delta) on elements over A and its forms.
Element dr_differential(const FreeWCDGA& A, const Element& e, const Trunc* trunc = nullptr);

/// A weighted Hodge-filtered de Rham cocycle omega = sum_{i>=2} omega_i with
/// omega_i of form order i, total degree n+2 and weight m.
struct PreSymplectic {
    int n = 0;
    int m = 0;
    std::map<int, Element> forms;  // i -> omega_i
    int i_max = 2;
    /// When set, the ladder is only checked below i_max and the top rung is
    /// checked modulo the form-order truncation ideal.
    bool form_truncated = false;

    Element form(int i) const;
    Element total() const;
};

Report check_presymplectic(const FreeWCDGA& A, const PreSymplectic& omega);

/// Matrix of the contraction pairing M_{ab} = dd/dx_a . dd/dx_b . omega2,
/// indexed by A's generators; represents omega2^sharp on free bases.
std::vector<std::vector<Element>> two_form_sharp(const FreeWCDGA& A, const Element& omega2);

/// Strict augmentation non-degeneracy of a block pairing.  keys[i] is the
/// (degree, weight) of index i; index blocks of key (z, w) pair with blocks
/// of key (n - z, m - w); every pairing must be square with nonzero exact
/// determinant at the augmentation.
Report strict_block_test(const std::vector<std::pair<int, int>>& keys, const QMatrix& pairing,
                         int n, int m);

Report check_symplectic_strict(const FreeWCDGA& A, const PreSymplectic& omega);

/// Isotropic structure on a map f : A -> B relative to omega on A: a
/// null-homotopy lambda of f_* omega.
struct IsotropicPair {
    CdgaMap f;
    PreSymplectic omega;
    std::map<int, Element> lambda;  // i -> lambda_i of form order i on B
    int i_max = 2;
    bool form_truncated = false;
};

/// Extension of f to forms: x -> f(x), dx -> d(f(x)).
CdgaMap form_pushforward(const FreeWCDGA& A, const CdgaMap& f);

Report check_isotropic(const FreeWCDGA& A, const FreeWCDGA& B, const IsotropicPair& pair);
Report check_lagrangian_strict(const FreeWCDGA& A, const FreeWCDGA& B,
                               const IsotropicPair& pair);

/// Cocycles modulo coboundaries in total degree n+2 of the truncated
/// F^2 DR(A) slice of weight m, with deterministic reduced representatives.
struct PreSymplecticClasses {
    Trunc trunc;
    std::vector<Monomial> slice_basis;
    std::vector<QVector> class_basis;  // reduced cocycle representatives
    int dimension = 0;

    // internals enabling class_of
    QMatrix boundary_rows;  // rref of the coboundary space
    std::vector<std::size_t> boundary_pivots;
};

PreSymplecticClasses presymplectic_classes(const FreeWCDGA& A, int n, int m, int max_form_order,
                                           int max_order);

/// Reduced coordinate vector of the class of omega; equal vectors mean equal
/// classes.  Throws if omega is not a cocycle of the truncated complex.
QVector presymplectic_class_of(const FreeWCDGA& A, const PreSymplecticClasses& cls,
                               const PreSymplectic& omega);

bool same_presymplectic_class(const FreeWCDGA& A, const PreSymplecticClasses& cls,
                              const PreSymplectic& a, const PreSymplectic& b);

/// The twisted shifted cotangent bundle Sym_B(T_B{-m}[-n]) with differential
/// delta + (df . -), plus its canonical weight-m n-shifted symplectic form
/// sum_a d(p_a) d(x_a).  Requires delta f = 0.
struct TwistedCotangent {
    FreeWCDGA algebra;
    std::vector<Generator> fiber;  // p_a, parallel to B's generators
    PreSymplectic omega;
};

TwistedCotangent generate_twisted_cotangent(const FreeWCDGA& B, const Element& f, int n, int m);

}  // namespace sympol

#endif
