#include "sympol/polyvector.hpp"

#include <algorithm>
#include <set>

#include "sympol/derham.hpp"

namespace sympol {

std::vector<Generator> PolyContext::all_gens() const {
    std::vector<Generator> g = base.gens;
    g.insert(g.end(), xi.begin(), xi.end());
    return g;
}

Generator PolyContext::xi_of(Generator x) const {
    for (std::size_t a = 0; a < base.gens.size(); ++a)
        if (base.gens[a] == x) return xi[a];
    throw ContextMismatchError("xi_of: generator not in context: " + x.debug_str());
}

Generator PolyContext::x_of(Generator g) const {
    for (std::size_t a = 0; a < xi.size(); ++a)
        if (xi[a] == g) return base.gens[a];
    throw ContextMismatchError("x_of: tangent generator not in context: " + g.debug_str());
}

PolyContext make_poly_context(const FreeWCDGA& A, int n, int m,
                              std::optional<int> max_xi_order) {
    PolyContext C;
    C.base = A;
    C.n = n;
    C.m = m;
    C.trunc = A.trunc;
    C.trunc.max_xi_order = max_xi_order;
    for (Generator x : A.gens)
        C.xi.push_back(Generator::make(GenKind::tangent, x.name(), n + 1 - x.degree(),
                                       m - x.weight()));
    for (std::size_t a = 0; a < A.gens.size(); ++a)
        C.delta_hat += mul(A.diff.image(A.gens[a]), Element::generator(C.xi[a]), &C.trunc);
    int dd = 0, dw = 0;
    if (!C.delta_hat.is_zero() &&
        (!C.delta_hat.is_homogeneous(&dd, &dw) || dd != n + 2 || dw != m))
        throw std::logic_error("poly context: delta-hat fails the degree/weight bookkeeping");
    return C;
}

namespace {

int eps_of(int total_degree, int shift) { return (((total_degree - shift - 1) % 2) + 2) % 2; }

Element bracket_mono(int shift, const Monomial& P, const Monomial& Q, const Trunc* trunc) {
    const auto& pf = P.factors();
    const auto& qf = Q.factors();
    if (pf.empty() || qf.empty()) return Element::zero();

    if (pf.size() > 1 || pf[0].second > 1) {
        // [uv, Q] = u [v, Q] + (-1)^{|v| eps(Q)} [u, Q] v
        Generator u = pf[0].first;
        std::vector<RawFactor> rest;
        if (pf[0].second > 1) rest.push_back({u, pf[0].second - 1});
        for (std::size_t i = 1; i < pf.size(); ++i) rest.push_back({pf[i].first, pf[i].second});
        Monomial v = normalize(rest).mono;
        Monomial um = normalize({RawFactor{u, 1}}).mono;
        Element t1 = mul(Element::generator(u), bracket_mono(shift, v, Q, trunc), trunc);
        Element t2 = mul(bracket_mono(shift, um, Q, trunc), Element::monomial(v), trunc);
        int sign = (v.total_degree() & 1) & eps_of(Q.total_degree(), shift);
        return sign ? t1 - t2 : t1 + t2;
    }
    Generator g = pf[0].first;
    if (qf.size() > 1 || qf[0].second > 1) {
        // [g, wz] = [g, w] z + (-1)^{eps(g) |w|} w [g, z]
        Generator w = qf[0].first;
        std::vector<RawFactor> rest;
        if (qf[0].second > 1) rest.push_back({w, qf[0].second - 1});
        for (std::size_t i = 1; i < qf.size(); ++i) rest.push_back({qf[i].first, qf[i].second});
        Monomial z = normalize(rest).mono;
        Monomial wm = normalize({RawFactor{w, 1}}).mono;
        Element t1 = mul(bracket_mono(shift, P, wm, trunc), Element::monomial(z), trunc);
        Element t2 = mul(Element::generator(w), bracket_mono(shift, P, z, trunc), trunc);
        int sign = eps_of(g.total_degree(), shift) & (wm.total_degree() & 1);
        return sign ? t1 - t2 : t1 + t2;
    }
    Generator h = qf[0].first;
    if (g.kind() == GenKind::tangent && h.kind() == GenKind::base && g.name() == h.name())
        return Element::unit();
    if (g.kind() == GenKind::base && h.kind() == GenKind::tangent && g.name() == h.name()) {
        int sign = eps_of(g.total_degree(), shift) & eps_of(h.total_degree(), shift);
        return sign ? Element::unit() : -Element::unit();
    }
    return Element::zero();
}

}  // namespace

Element schouten_pair(int shift, const Element& P, const Element& Q, const Trunc* trunc) {
    Element r;
    for (const auto& [mp, cp] : P.terms())
        for (const auto& [mq, cq] : Q.terms())
            r += (cp * cq) * bracket_mono(shift, mp, mq, trunc);
    if (trunc) r = r.truncated(*trunc);
    return r;
}

Element schouten(const PolyContext& C, const Element& P, const Element& Q) {
    for (const Element* e : {&P, &Q})
        for (const auto& [m, c] : e->terms())
            for (const auto& [g, ex] : m.factors()) {
                if (g.kind() == GenKind::form)
                    throw ContextMismatchError("schouten: form generator in polyvector");
                if (g.kind() == GenKind::tangent &&
                    std::find(C.xi.begin(), C.xi.end(), g) == C.xi.end())
                    throw ContextMismatchError("schouten: tangent generator of another context");
                if (g.kind() == GenKind::base && !C.base.has_generator(g))
                    throw ContextMismatchError("schouten: base generator not in context");
            }
    return schouten_pair(C.n, P, Q, &C.trunc);
}

std::optional<int> filtration_level(const Element& P) { return P.min_xi_order(); }

Element check_mc(const PolyContext& C, const Element& pi) {
    if (!pi.is_zero()) {
        int d = 0, w = 0;
        if (!pi.is_homogeneous(&d, &w) || d != C.n + 2 || w != C.m)
            throw std::invalid_argument(
                "check_mc: pi must be homogeneous of degree n+2 and weight m");
        auto lvl = filtration_level(pi);
        if (lvl && *lvl < 2)
            throw std::invalid_argument("check_mc: pi must lie in filtration level >= 2");
    }
    Element r = schouten(C, C.delta_hat, pi);
    r += Scalar(1, 2) * schouten(C, pi, pi);
    return r;
}

std::vector<std::vector<Element>> bivector_matrix(const PolyContext& C, const Element& pi2) {
    std::size_t k = C.xi.size();
    std::vector<std::vector<Element>> M(k, std::vector<Element>(k));
    auto contract_xi = [&](Generator x, const Element& e) {
        Derivation D;
        D.degree_shift = -x.total_degree();
        D.weight_shift = -x.weight();
        D.set_image(x, Element::unit());
        std::set<uint32_t> seen{x.id()};
        for (const auto& [m, c] : e.terms())
            for (const auto& [h, ex] : m.factors())
                if (seen.insert(h.id()).second) D.set_image(h, Element::zero());
        return derivation_apply(D, e);
    };
    for (std::size_t b = 0; b < k; ++b) {
        Element row = contract_xi(C.xi[b], pi2);
        for (std::size_t a = 0; a < k; ++a) M[a][b] = contract_xi(C.xi[a], row);
    }
    return M;
}

Report check_nondegenerate(const PolyContext& C, const Element& pi) {
    Report rep;
    Element pi2 = pi.xi_part(2);
    if (pi2.is_zero()) {
        rep.add("bivector part vanishes");
        return rep;
    }
    std::vector<std::vector<Element>> M = bivector_matrix(C, pi2);
    std::size_t k = C.xi.size();
    QMatrix aug(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) aug.at(i, j) = M[i][j].augmentation();
    std::vector<std::pair<int, int>> keys;
    for (Generator x : C.base.gens) keys.emplace_back(x.degree(), x.weight());
    Report blocks = strict_block_test(keys, aug, C.n, C.m);
    for (auto& i : blocks.issues) rep.issues.push_back(i);
    return rep;
}

Derivation twisted_complex(const PolyContext& C, const Element& pi) {
    Element residue = check_mc(C, pi);
    if (!residue.is_zero())
        throw NotMCError("twisted_complex: MC residue nonzero: " + residue.str());
    Derivation D;
    D.degree_shift = 1;
    D.weight_shift = 0;
    Element t = C.delta_hat + pi;
    for (Generator g : C.all_gens())
        D.set_image(g, schouten_pair(C.n, t, Element::generator(g), &C.trunc));
    return D;
}

}  // namespace sympol
