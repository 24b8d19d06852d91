#include "sympol/correspondence.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace sympol {

Element mu(const PolyContext& C, const Element& e, const Element& pi) {
    // Cache the anchors [pi, x_a].
    std::map<uint32_t, Element> anchor;
    auto anchor_of = [&](Generator dx) -> const Element& {
        auto it = anchor.find(dx.id());
        if (it != anchor.end()) return it->second;
        Generator x = Generator::make(GenKind::base, dx.name(), dx.degree(), dx.weight());
        Element br = schouten(C, pi, Element::generator(x));
        return anchor.emplace(dx.id(), std::move(br)).first->second;
    };

    Element out;
    for (const auto& [mono, coeff] : e.terms()) {
        Element term = Element::scalar(coeff);
        for (const auto& [g, ex] : mono.factors()) {
            switch (g.kind()) {
                case GenKind::base:
                    term = mul(term, Element::generator(g, ex), &C.trunc);
                    break;
                case GenKind::form: {
                    const Element& a = anchor_of(g);
                    for (int k = 0; k < ex; ++k) term = mul(term, a, &C.trunc);
                    break;
                }
                case GenKind::tangent:
                    throw ContextMismatchError("mu: tangent generator in a de Rham element");
            }
        }
        out += term;
    }
    return out.truncated(C.trunc);
}

Element sigma(const Element& pi) {
    Element out;
    for (const auto& [mono, coeff] : pi.terms()) {
        int k = mono.xi_order();
        if (k < 2) continue;
        out.add_term(mono, Scalar(k - 1) * coeff);
    }
    return out;
}

namespace {

// Multiplies two matrices of elements under a truncation.
std::vector<std::vector<Element>> elem_mat_mul(const std::vector<std::vector<Element>>& A,
                                               const std::vector<std::vector<Element>>& B,
                                               const Trunc& t) {
    std::size_t n = A.size();
    std::vector<std::vector<Element>> R(n, std::vector<Element>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            if (A[i][k].is_zero()) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (B[k][j].is_zero()) continue;
                R[i][j] += mul(A[i][k], B[k][j], t);
            }
        }
    return R;
}

bool elem_mat_zero(const std::vector<std::vector<Element>>& A) {
    for (const auto& row : A)
        for (const Element& e : row)
            if (!e.is_zero()) return false;
    return true;
}

}  // namespace

Element invert_two_form(const PolyContext& C, const Element& omega2) {
    if (omega2.is_zero()) throw NotInvertibleError("invert_two_form: zero 2-form");
    int deg = 0, w = 0;
    if (!omega2.is_homogeneous(&deg, &w) || deg != C.n + 2 || w != C.m)
        throw std::invalid_argument(
            "invert_two_form: omega_2 must be homogeneous of degree n+2 and weight m");
    for (const auto& [mono, c] : omega2.terms())
        if (mono.form_order() != 2)
            throw std::invalid_argument("invert_two_form: omega_2 must have form order 2");

    const std::size_t k = C.base.gens.size();
    std::vector<std::vector<Element>> M = two_form_sharp(C.base, omega2);

    QMatrix M0(k, k);
    bool constant = true;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            M0.at(i, j) = M[i][j].augmentation();
            Element rest = M[i][j] - Element::scalar(M0.at(i, j));
            if (!rest.is_zero()) constant = false;
        }
    std::optional<QMatrix> N0 = M0.inverse();
    if (!N0) throw NotInvertibleError("invert_two_form: block pairing is singular");

    std::vector<std::vector<Element>> N(k, std::vector<Element>(k));
    if (constant) {
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) N[i][j] = Element::scalar(N0->at(i, j));
    } else {
        if (!C.trunc.max_order)
            throw NonFormalError(
                "invert_two_form: non-constant 2-form needs a polynomial-order bound");
        // Neumann series: with M = M0 (I + N0 Mplus), the inverse is
        // (sum_j (-N0 Mplus)^j) N0; the series is finite under truncation.
        std::vector<std::vector<Element>> step(k, std::vector<Element>(k));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) {
                Element acc;
                for (std::size_t l = 0; l < k; ++l) {
                    if (N0->at(i, l).is_zero()) continue;
                    Element plus_lj = M[l][j] - Element::scalar(M0.at(l, j));
                    acc += N0->at(i, l) * plus_lj;
                }
                step[i][j] = -acc;
            }
        std::vector<std::vector<Element>> series(k, std::vector<Element>(k));
        for (std::size_t i = 0; i < k; ++i) series[i][i] = Element::unit();
        std::vector<std::vector<Element>> power = series;
        for (int it = 0; it < 2 * *C.trunc.max_order + 2; ++it) {
            power = elem_mat_mul(power, step, C.trunc);
            if (elem_mat_zero(power)) break;
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) series[i][j] += power[i][j];
        }
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) {
                Element acc;
                for (std::size_t l = 0; l < k; ++l) {
                    if (N0->at(l, j).is_zero()) continue;
                    acc += N0->at(l, j) * series[i][l];
                }
                N[i][j] = acc.truncated(C.trunc);
            }
    }

    Element pi2;
    Scalar half(1, 2);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) {
            if (N[a][b].is_zero()) continue;
            Element xixi = mul(Element::generator(C.xi[a]), Element::generator(C.xi[b]),
                               &C.trunc);
            pi2 += half * mul(N[a][b], xixi, &C.trunc);
        }

    Element mu_check = mu(C, omega2, pi2) - pi2;
    if (!mu_check.is_zero())
        throw MCFailureError("invert_two_form: mu(omega_2, pi_2) != pi_2 (internal sign fault): " +
                             mu_check.str());

    Derivation delta = de_rham_delta(C.base);
    bool strictly_closed = d(omega2, &C.trunc).is_zero() &&
                           derivation_apply(delta, omega2, &C.trunc).is_zero();
    if (strictly_closed) {
        Element residue = check_mc(C, pi2);
        if (!residue.is_zero())
            throw MCFailureError(
                "invert_two_form: closed 2-form produced a nonzero MC residue: " +
                residue.str());
    }
    return pi2;
}

namespace {

struct SliceBasis {
    std::vector<Monomial> monos;
    std::map<Monomial, std::size_t> index;
};

SliceBasis make_slice(const PolyContext& C, int degree, std::optional<int> xi_order,
                      std::optional<int> form_order) {
    SliceSpec spec;
    spec.total_degree = degree;
    spec.weight = C.m;
    spec.xi_order = xi_order;
    spec.form_order = form_order;
    spec.trunc = C.trunc;
    std::vector<Generator> gens = C.all_gens();
    if (form_order) {
        // de Rham slices: forms in, tangents out
        spec.xi_order = 0;
        std::vector<Generator> forms;
        for (Generator g : C.base.gens) forms.push_back(form_generator(g));
        gens.insert(gens.end(), forms.begin(), forms.end());
    }
    SliceBasis b;
    b.monos = enumerate_slice(gens, spec);
    for (std::size_t i = 0; i < b.monos.size(); ++i) b.index[b.monos[i]] = i;
    return b;
}

QVector coords_of(const SliceBasis& basis, const Element& e) {
    QVector v(basis.monos.size(), Scalar(0));
    for (const auto& [m, c] : e.terms()) {
        auto it = basis.index.find(m);
        if (it == basis.index.end())
            throw std::logic_error("solver: residual term outside the enumerated slice: " +
                                   m.str());
        v[it->second] = c;
    }
    return v;
}

Element from_coords(const SliceBasis& basis, const QVector& v) {
    Element e;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!v[i].is_zero()) e.add_term(basis.monos[i], v[i]);
    return e;
}

Element mc_residue(const PolyContext& C, const Element& pi) {
    return schouten(C, C.delta_hat, pi) + Scalar(1, 2) * schouten(C, pi, pi);
}

}  // namespace

Report verify_witness(const PolyContext& C, const CompatibilityWitness& w) {
    Report rep;
    Trunc cap = C.trunc;
    cap.max_xi_order = w.max_level;
    Element omega_total = w.omega.total();
    Element resid = mu(C, omega_total, w.pi) - sigma(w.pi) -
                    schouten(C, C.delta_hat + w.pi, w.h);
    resid = resid.truncated(cap);
    if (!resid.is_zero())
        rep.add("compatibility residue nonzero modulo the filtration bound",
                "mu(omega,pi) - sigma(pi) - D_pi(h) = " + resid.str());
    Element mc = mc_residue(C, w.pi).truncated(cap);
    if (!mc.is_zero())
        rep.add("Maurer-Cartan residue nonzero modulo the filtration bound", mc.str());
    Element recorded = (resid - w.residue).truncated(cap);
    if (!recorded.is_zero())
        rep.add("recorded residue does not match the recomputation", recorded.str());
    return rep;
}

CompatibilityWitness symplectic_to_poisson(const PolyContext& C, const PreSymplectic& omega,
                                           int max_level) {
    if (!C.trunc.max_order)
        throw NonFormalError("symplectic_to_poisson: formal mode requires an order bound");
    if (max_level < 2) throw std::invalid_argument("symplectic_to_poisson: max_level >= 2");

    Element omega_total = omega.total();
    Element pi = invert_two_form(C, omega.form(2));
    Element h;

    for (int k = 3; k <= max_level; ++k) {
        SliceBasis pis = make_slice(C, C.n + 2, k, std::nullopt);
        SliceBasis hs = make_slice(C, C.n + 1, k, std::nullopt);
        SliceBasis mc_rows = make_slice(C, C.n + 3, k, std::nullopt);
        SliceBasis cp_rows = make_slice(C, C.n + 2, k, std::nullopt);

        const std::size_t nu = pis.monos.size() + hs.monos.size();
        auto eval = [&](const QVector& v) {
            Element dpi, dh;
            for (std::size_t i = 0; i < pis.monos.size(); ++i)
                if (!v[i].is_zero()) dpi.add_term(pis.monos[i], v[i]);
            for (std::size_t i = 0; i < hs.monos.size(); ++i)
                if (!v[pis.monos.size() + i].is_zero())
                    dh.add_term(hs.monos[i], v[pis.monos.size() + i]);
            Element cpi = pi + dpi;
            Element ch = h + dh;
            Element mc = mc_residue(C, cpi).xi_part(k);
            Element compat = (mu(C, omega_total, cpi) - sigma(cpi) -
                              schouten(C, C.delta_hat + cpi, ch))
                                 .xi_part(k);
            QVector r = coords_of(mc_rows, mc);
            QVector rc = coords_of(cp_rows, compat);
            r.insert(r.end(), rc.begin(), rc.end());
            return r;
        };

        QVector zero(nu, Scalar(0));
        QVector F0 = eval(zero);
        const std::size_t rows = F0.size();
        QMatrix L(rows, nu);
        for (std::size_t j = 0; j < nu; ++j) {
            QVector e = zero;
            e[j] = Scalar(1);
            QVector Fj = eval(e);
            for (std::size_t i = 0; i < rows; ++i) L.at(i, j) = Fj[i] - F0[i];
        }
        QVector rhs(rows);
        for (std::size_t i = 0; i < rows; ++i) rhs[i] = -F0[i];
        auto sol = L.solve(rhs);
        if (!sol) {
            Element witness = from_coords(mc_rows, QVector(F0.begin(),
                                                           F0.begin() + mc_rows.monos.size()));
            for (std::size_t i = 0; i < cp_rows.monos.size(); ++i)
                if (!F0[mc_rows.monos.size() + i].is_zero())
                    witness.add_term(cp_rows.monos[i], F0[mc_rows.monos.size() + i]);
            throw ObstructionError(k, witness,
                                   "symplectic_to_poisson: obstruction at level " +
                                       std::to_string(k));
        }
        for (std::size_t i = 0; i < pis.monos.size(); ++i)
            if (!(*sol)[i].is_zero()) pi.add_term(pis.monos[i], (*sol)[i]);
        for (std::size_t i = 0; i < hs.monos.size(); ++i)
            if (!(*sol)[pis.monos.size() + i].is_zero())
                h.add_term(hs.monos[i], (*sol)[pis.monos.size() + i]);
    }

    CompatibilityWitness w;
    w.omega = omega;
    w.pi = pi;
    w.h = h;
    w.max_level = max_level;
    Trunc cap = C.trunc;
    cap.max_xi_order = max_level;
    w.residue = (mu(C, omega_total, pi) - sigma(pi) - schouten(C, C.delta_hat + pi, h))
                    .truncated(cap);
    Report check = verify_witness(C, w);
    if (!check.ok())
        throw MCFailureError("symplectic_to_poisson: output failed verification:\n" +
                             check.str());
    return w;
}

CompatibilityWitness poisson_to_symplectic(const PolyContext& C, const Element& pi,
                                           int max_level) {
    if (!C.trunc.max_order)
        throw NonFormalError("poisson_to_symplectic: formal mode requires an order bound");
    if (max_level < 2) throw std::invalid_argument("poisson_to_symplectic: max_level >= 2");
    Element mc = mc_residue(C, pi);
    {
        Trunc cap = C.trunc;
        cap.max_xi_order = max_level;
        if (!mc.truncated(cap).is_zero())
            throw NotMCError("poisson_to_symplectic: MC residue nonzero: " + mc.str());
    }
    Report nd = check_nondegenerate(C, pi);
    if (!nd.ok())
        throw NotInvertibleError("poisson_to_symplectic: degenerate bivector:\n" + nd.str());

    Derivation delta = de_rham_delta(C.base);
    PreSymplectic omega;
    omega.n = C.n;
    omega.m = C.m;
    omega.i_max = std::max(2, max_level);
    omega.form_truncated = true;

    Element h;
    Element omega_acc;

    for (int k = 2; k <= max_level; ++k) {
        SliceBasis ws = make_slice(C, C.n + 2, std::nullopt, k);
        SliceBasis hs = make_slice(C, C.n + 1, k, std::nullopt);
        SliceBasis cp_rows = make_slice(C, C.n + 2, k, std::nullopt);
        SliceBasis ladder_rows = make_slice(C, C.n + 3, std::nullopt, k);

        const bool with_h = k >= 3;
        const std::size_t nw = ws.monos.size();
        const std::size_t nh = with_h ? hs.monos.size() : 0;
        const std::size_t nu = nw + nh;

        auto eval = [&](const QVector& v) {
            Element dw, dh;
            for (std::size_t i = 0; i < nw; ++i)
                if (!v[i].is_zero()) dw.add_term(ws.monos[i], v[i]);
            for (std::size_t i = 0; i < nh; ++i)
                if (!v[nw + i].is_zero()) dh.add_term(hs.monos[i], v[nw + i]);
            Element cw = omega_acc + dw;
            Element ch = h + dh;
            Element compat =
                (mu(C, cw, pi) - sigma(pi) - schouten(C, C.delta_hat + pi, ch)).xi_part(k);
            // Internal closure rung: delta omega_k + d omega_{k-1} in form order k.
            Element rung = (derivation_apply(delta, dw, &C.trunc) +
                            d(cw.form_part(k - 1), &C.trunc))
                               .form_part(k);
            QVector r = coords_of(cp_rows, compat);
            QVector rl = coords_of(ladder_rows, rung);
            r.insert(r.end(), rl.begin(), rl.end());
            return r;
        };

        QVector zero(nu, Scalar(0));
        QVector F0 = eval(zero);
        const std::size_t rows = F0.size();
        QMatrix L(rows, nu);
        for (std::size_t j = 0; j < nu; ++j) {
            QVector e = zero;
            e[j] = Scalar(1);
            QVector Fj = eval(e);
            for (std::size_t i = 0; i < rows; ++i) L.at(i, j) = Fj[i] - F0[i];
        }
        QVector rhs(rows);
        for (std::size_t i = 0; i < rows; ++i) rhs[i] = -F0[i];
        auto sol = L.solve(rhs);
        if (!sol) {
            Element witness = from_coords(cp_rows, QVector(F0.begin(),
                                                           F0.begin() + cp_rows.monos.size()));
            throw ObstructionError(k, witness,
                                   "poisson_to_symplectic: obstruction at level " +
                                       std::to_string(k));
        }
        for (std::size_t i = 0; i < nw; ++i)
            if (!(*sol)[i].is_zero()) omega_acc.add_term(ws.monos[i], (*sol)[i]);
        for (std::size_t i = 0; i < nh; ++i)
            if (!(*sol)[nw + i].is_zero()) h.add_term(hs.monos[i], (*sol)[nw + i]);
    }

    for (int i = 2; i <= max_level; ++i) {
        Element wi = omega_acc.form_part(i);
        if (!wi.is_zero()) omega.forms[i] = wi;
    }
    if (omega.forms.find(2) == omega.forms.end())
        throw NotInvertibleError("poisson_to_symplectic: produced no omega_2");

    Report pre = check_presymplectic(C.base, omega);
    if (!pre.ok())
        throw MCFailureError("poisson_to_symplectic: output not pre-symplectic:\n" + pre.str());

    CompatibilityWitness w;
    w.omega = omega;
    w.pi = pi;
    w.h = h;
    w.max_level = max_level;
    Trunc cap = C.trunc;
    cap.max_xi_order = max_level;
    w.residue = (mu(C, omega_acc, pi) - sigma(pi) - schouten(C, C.delta_hat + pi, h))
                    .truncated(cap);
    Report check = verify_witness(C, w);
    if (!check.ok())
        throw MCFailureError("poisson_to_symplectic: output failed verification:\n" +
                             check.str());
    return w;
}

}  // namespace sympol
