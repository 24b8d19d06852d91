#ifndef SYMPOL_DGLA_HPP
#define SYMPOL_DGLA_HPP

#include "sympol/cdga.hpp"
#include "sympol/derham.hpp"
#include "sympol/linalg.hpp"
#include "sympol/polyvector.hpp"

namespace sympol {

class NotSmallError : public std::runtime_error {
  public:
    explicit NotSmallError(const std::string& w) : std::runtime_error(w) {}
};

class AxiomFailureError : public std::logic_error {
  public:
    explicit AxiomFailureError(const std::string& w) : std::logic_error(w) {}
};

class ClosureFailureError : public std::logic_error {
  public:
    explicit ClosureFailureError(const std::string& w) : std::logic_error(w) {}
};

struct DGLABasisElement {
    std::string name;
    int degree = 0;  // cohomological
    int weight = 0;
};

/// Finite-basis differential graded Lie algebra given by structure constants.
struct DGLA {
    std::vector<DGLABasisElement> basis;
    QMatrix diff;  // delta e_j = sum_i diff(i, j) e_i
    std::map<std::pair<int, int>, QVector> bracket_table;

    std::size_t dim() const { return basis.size(); }
    QVector bracket(int i, int j) const;
    void set_bracket(int i, int j, QVector v);
    /// Also fills the graded-antisymmetric transpose entry.
    void set_bracket_sym(int i, int j, const QVector& v);
    std::optional<int> index_of(const std::string& name) const;
};

DGLA make_dgla(std::vector<DGLABasisElement> basis);

Report validate_dgla(const DGLA& L);

/// Invariant graded-symmetric pairing of degree -d and fixed weight.
struct CyclicPairing {
    QMatrix matrix;
    int d = 0;
    int pairing_weight = 0;
};

Report validate_pairing(const DGLA& L, const CyclicPairing& P);

/// Element of L (x) A: finitely many components e_i (x) f_i.
struct LElement {
    std::map<int, Element> comps;

    bool is_zero() const;
    Element comp(int i) const;
    void add(int i, const Element& e);

    LElement operator-() const;
    LElement& operator+=(const LElement& o);
    LElement& operator-=(const LElement& o);
    friend LElement operator+(LElement a, const LElement& b) { a += b; return a; }
    friend LElement operator-(LElement a, const LElement& b) { a -= b; return a; }
    friend LElement operator*(const Scalar& s, LElement x);
    friend bool operator==(const LElement& a, const LElement& b);

    bool is_homogeneous(const DGLA& L, int* total_degree) const;
    LElement truncated(const Trunc& t) const;
    std::string str(const DGLA& L) const;
};

/// (delta_L (x) 1)(x)
LElement l_delta_L(const DGLA& L, const LElement& x);
/// Full differential delta_L (x) 1 + (-1)^{|e|} (x) delta_A.
LElement l_delta(const DGLA& L, const FreeWCDGA& A, const LElement& x);
/// [e_i (x) f, e_j (x) g] = (-1)^{deg f * |e_j|} [e_i, e_j] (x) f g.
LElement l_bracket(const DGLA& L, const LElement& x, const LElement& y,
                   const Trunc* trunc = nullptr);

/// Maurer-Cartan residue delta(alpha) + (1/2)[alpha, alpha].
LElement check_mc_element(const DGLA& L, const FreeWCDGA& A, const LElement& alpha);

/// Gauge action g * alpha = alpha + sum_k ad_g^k([g, alpha] - delta g)/(k+1)!;
/// the sum is finite by nilpotence.  The output is rechecked to satisfy MC.
LElement gauge_act(const DGLA& L, const FreeWCDGA& A, const LElement& g,
                   const LElement& alpha);

/// Path-object certificate over Q[t, dt]: alpha(t) := (t g) * alpha satisfies
/// MC identically in t and solves the gauge flow equation
/// d/dt alpha(t) = [g, alpha(t)] - delta g.
Report gauge_path_certificate(const DGLA& L, const FreeWCDGA& A, const LElement& g,
                              const LElement& alpha);

/// Square-zero extension A' -> A'/I with I spanned by monomials and
/// I * m_{A'} = 0.
struct SmallExtension {
    FreeWCDGA total;  // A'
    std::vector<Monomial> ideal;
};

Report validate_small_extension(const SmallExtension& ext);

struct McExtendResult {
    bool lifted = false;
    LElement lift;                // when lifted: an MC element of L (x) A'
    LElement obstruction;         // the residue representative in L^2 (x) I
    QVector obstruction_class;    // reduced coordinates modulo boundaries
};

/// Lifts alpha in MC(A'/I) along the small extension or returns the
/// obstruction class in H^2(L (x) I).
McExtendResult mc_extend(const DGLA& L, const SmallExtension& ext, const LElement& alpha);

/// The representing algebra (Sym(L[1]*), delta_CE) of the deformation
/// functor, truncated at the given polynomial order.  Generator x^a has
/// degree 1 - |e_a| and weight -w_a; delta_CE is read off the universal
/// Maurer-Cartan element, and delta_CE^2 = 0 is equivalent to the axioms
/// of L (AxiomFailure otherwise).
struct CEAlgebra {
    FreeWCDGA algebra;
    std::vector<Generator> gens;  // parallel to L.basis
};

CEAlgebra ce_algebra(const DGLA& L, int max_order);

/// The universal Maurer-Cartan element sum_a e_a (x) x^a over the CE algebra.
LElement universal_mc_element(const DGLA& L, const CEAlgebra& ce);

/// The constant-coefficient 2-form sum (-1)^{q_a q_b} <e_a, e_b> dx^a dx^b of
/// shift n = 2 - d and weight m = -pairing_weight; internally closed by
/// invariance (ClosureFailure otherwise).
PreSymplectic formal_symplectic(const DGLA& L, const CyclicPairing& P, const CEAlgebra& ce,
                                int m);

/// Dual tensor of a non-degenerate pairing; contraction with the pairing is
/// the identity.
QMatrix casimir(const CyclicPairing& P);

struct CasimirPoisson {
    PolyContext context;
    Element pi;
};

/// The inverse Poisson bivector sum (+/-) pi^{ab} xi_a xi_b on the CE algebra,
/// shift 2 - d and weight m; its MC residue vanishes by invariance.
CasimirPoisson casimir_poisson(const DGLA& L, const CyclicPairing& P, const CEAlgebra& ce,
                               int m);

struct TangentComplexResult {
    std::map<int, int> h_dim;  // total degree -> homology dimension
};

/// Homology of (L (x) A, delta + [alpha, -]) per total degree.
TangentComplexResult tangent_complex(const DGLA& L, const FreeWCDGA& A, const LElement& alpha);

}  // namespace sympol

#endif
