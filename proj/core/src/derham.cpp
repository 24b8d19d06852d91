#include "sympol/derham.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "sympol/polyvector.hpp"

namespace sympol {

Generator form_generator(Generator x) {
    return Generator::make(GenKind::form, x.name(), x.degree(), x.weight());
}

std::vector<Generator> with_forms(const FreeWCDGA& A) {
    std::vector<Generator> gens = A.gens;
    for (Generator g : A.gens) gens.push_back(form_generator(g));
    return gens;
}

namespace {

// De Rham working truncation: the base-order cap is widened to a symbol
// cap (stable under d) with headroom for the declared form orders.
Trunc dr_trunc(const FreeWCDGA& A, int max_form) {
    Trunc t = A.trunc;
    if (t.max_order) {
        t.max_symbol_order = *t.max_order + max_form;
        t.max_order.reset();
    }
    t.max_form_order = max_form;
    return t;
}

}  // namespace

Element d(const Element& a, const Trunc* trunc) {
    Derivation D;
    D.degree_shift = 1;
    D.weight_shift = 0;
    std::set<uint32_t> seen;
    for (const auto& [m, c] : a.terms()) {
        for (const auto& [g, e] : m.factors()) {
            if (!seen.insert(g.id()).second) continue;
            switch (g.kind()) {
                case GenKind::base:
                    D.set_image(g, Element::generator(form_generator(g)));
                    break;
                default:
                    D.set_image(g, Element::zero());
                    break;
            }
        }
    }
    return derivation_apply(D, a, trunc);
}

Derivation de_rham_delta(const FreeWCDGA& A) {
    Derivation D;
    D.degree_shift = 1;
    D.weight_shift = 0;
    for (Generator g : A.gens) {
        Element dg = A.diff.image(g);
        D.set_image(g, dg);
        D.set_image(form_generator(g), -d(dg, &A.trunc));
    }
    return D;
}

Element dr_differential(const FreeWCDGA& A, const Element& e, const Trunc* trunc) {
    Derivation delta = de_rham_delta(A);
    return d(e, trunc) + derivation_apply(delta, e, trunc);
}

Element PreSymplectic::form(int i) const {
    auto it = forms.find(i);
    return it == forms.end() ? Element::zero() : it->second;
}

Element PreSymplectic::total() const {
    Element t;
    for (const auto& [i, w] : forms) t += w;
    return t;
}

Report check_presymplectic(const FreeWCDGA& A, const PreSymplectic& omega) {
    Report rep;
    for (const auto& [i, w] : omega.forms) {
        if (i < 2) rep.add("form order below the Hodge filtration F^2",
                           "omega_" + std::to_string(i));
        if (i > omega.i_max)
            rep.add("form order above the declared bound", "omega_" + std::to_string(i));
        if (w.is_zero()) continue;
        for (const auto& [mono, c] : w.terms()) {
            if (mono.form_order() != i) {
                rep.add("inhomogeneous form order", "omega_" + std::to_string(i) + ": " +
                                                        mono.str());
                break;
            }
        }
        int dtot = 0, wt = 0;
        if (!w.is_homogeneous(&dtot, &wt)) {
            rep.add("form not homogeneous", "omega_" + std::to_string(i) + " = " + w.str());
        } else {
            if (dtot != omega.n + 2)
                rep.add("form has wrong total degree",
                        "omega_" + std::to_string(i) + " has degree " + std::to_string(dtot));
            if (wt != omega.m)
                rep.add("form has wrong weight",
                        "omega_" + std::to_string(i) + " has weight " + std::to_string(wt));
        }
    }
    if (!rep.ok()) return rep;

    Derivation delta = de_rham_delta(A);
    Trunc t = dr_trunc(A, omega.i_max + 1);

    Element delta_w2 = derivation_apply(delta, omega.form(2), &t);
    if (!delta_w2.is_zero())
        rep.add("bottom rung not internally closed", "delta omega_2 = " + delta_w2.str());

    for (int i = 2; i <= omega.i_max; ++i) {
        Element rung = d(omega.form(i), &t) + derivation_apply(delta, omega.form(i + 1), &t);
        rung = rung.form_part(i + 1);
        if (i == omega.i_max && omega.form_truncated) continue;  // modulo truncation ideal
        if (!rung.is_zero())
            rep.add("closure ladder broken at rung " + std::to_string(i),
                    "d omega_" + std::to_string(i) + " + delta omega_" + std::to_string(i + 1) +
                        " = " + rung.str());
    }
    return rep;
}

namespace {

Derivation contraction(Generator g) {
    // Interior product with respect to the form or tangent generator g.
    Derivation D;
    D.degree_shift = -g.total_degree();
    D.weight_shift = -g.weight();
    D.set_image(g, Element::unit());
    return D;
}

Element contract(Generator g, const Element& e) {
    Derivation D = contraction(g);
    std::set<uint32_t> seen{g.id()};
    for (const auto& [m, c] : e.terms())
        for (const auto& [h, ex] : m.factors())
            if (seen.insert(h.id()).second) D.set_image(h, Element::zero());
    return derivation_apply(D, e);
}

}  // namespace

std::vector<std::vector<Element>> two_form_sharp(const FreeWCDGA& A, const Element& omega2) {
    std::size_t n = A.gens.size();
    std::vector<std::vector<Element>> M(n, std::vector<Element>(n));
    for (std::size_t b = 0; b < n; ++b) {
        Element row = contract(form_generator(A.gens[b]), omega2);
        for (std::size_t a = 0; a < n; ++a)
            M[a][b] = contract(form_generator(A.gens[a]), row);
    }
    return M;
}

Report strict_block_test(const std::vector<std::pair<int, int>>& keys, const QMatrix& pairing,
                         int n, int m) {
    Report rep;
    std::map<std::pair<int, int>, std::vector<std::size_t>> blocks;
    for (std::size_t i = 0; i < keys.size(); ++i) blocks[keys[i]].push_back(i);

    std::set<std::pair<int, int>> done;
    for (const auto& [key, idx] : blocks) {
        if (done.count(key)) continue;
        std::pair<int, int> partner_key{n - key.first, m - key.second};
        done.insert(key);
        done.insert(partner_key);
        auto it = blocks.find(partner_key);
        if (it == blocks.end()) {
            std::ostringstream os;
            os << "block (degree " << key.first << ", weight " << key.second
               << ") has no partner block";
            throw NonSquareBlockError(os.str());
        }
        const std::vector<std::size_t>& rows = idx;
        const std::vector<std::size_t>& cols = it->second;
        if (rows.size() != cols.size()) {
            std::ostringstream os;
            os << "block pairing (degree " << key.first << ", weight " << key.second
               << ") is " << rows.size() << "x" << cols.size();
            throw NonSquareBlockError(os.str());
        }
        QMatrix sub(rows.size(), cols.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols.size(); ++j)
                sub.at(i, j) = pairing.at(rows[i], cols[j]);
        Scalar det = sub.det();
        std::ostringstream os;
        os << "block (degree " << key.first << ", weight " << key.second
           << ") determinant constant term " << det.str();
        if (det.is_zero()) {
            rep.add("degenerate pairing block", os.str());
        } else {
            // determinant recorded through the report text in callers
        }
    }
    return rep;
}

Report check_symplectic_strict(const FreeWCDGA& A, const PreSymplectic& omega) {
    Report rep;
    Element w2 = omega.form(2);
    if (w2.is_zero()) {
        rep.add("omega_2 vanishes");
        return rep;
    }
    std::vector<std::vector<Element>> M = two_form_sharp(A, w2);
    std::size_t k = A.gens.size();
    QMatrix aug(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) aug.at(i, j) = M[i][j].augmentation();
    std::vector<std::pair<int, int>> keys;
    for (Generator g : A.gens) keys.emplace_back(g.degree(), g.weight());
    Report blocks = strict_block_test(keys, aug, omega.n, omega.m);
    for (auto& issue : blocks.issues) rep.issues.push_back(issue);
    return rep;
}

CdgaMap form_pushforward(const FreeWCDGA& A, const CdgaMap& f) {
    CdgaMap fhat;
    for (Generator g : A.gens) {
        const Element* img = f.image(g);
        if (!img) throw MissingImageError(g);
        fhat.set_image(g, *img);
        fhat.set_image(form_generator(g), d(*img));
    }
    return fhat;
}

Report check_isotropic(const FreeWCDGA& A, const FreeWCDGA& B, const IsotropicPair& pair) {
    Report rep;
    Report map_ok = validate_map(A, B, pair.f);
    if (!map_ok.ok()) {
        rep.add("NotAMap: target map is not a CDGA morphism");
        for (auto& i : map_ok.issues) rep.issues.push_back(i);
        return rep;
    }
    Report pre = check_presymplectic(A, pair.omega);
    for (auto& i : pre.issues) rep.issues.push_back(i);
    if (!rep.ok()) return rep;

    for (const auto& [i, l] : pair.lambda) {
        if (l.is_zero()) continue;
        int dtot = 0, wt = 0;
        if (!l.is_homogeneous(&dtot, &wt) || dtot != pair.omega.n + 1 || wt != pair.omega.m)
            rep.add("homotopy term has wrong degree or weight",
                    "lambda_" + std::to_string(i) + " = " + l.str());
        for (const auto& [mono, c] : l.terms())
            if (mono.form_order() != i)
                rep.add("homotopy term has inhomogeneous form order",
                        "lambda_" + std::to_string(i));
    }
    if (!rep.ok()) return rep;

    CdgaMap fhat = form_pushforward(A, pair.f);
    Trunc t = dr_trunc(B, pair.i_max);
    Derivation deltaB = de_rham_delta(B);

    auto lambda_form = [&](int i) {
        auto it = pair.lambda.find(i);
        return it == pair.lambda.end() ? Element::zero() : it->second;
    };

    for (int i = 2; i <= pair.i_max; ++i) {
        Element pushed = map_apply(fhat, pair.omega.form(i), &t);
        Element dl = d(lambda_form(i - 1), &t) + derivation_apply(deltaB, lambda_form(i), &t);
        Element resid = (pushed - dl).form_part(i);
        if (i == pair.i_max && pair.form_truncated) continue;
        if (!resid.is_zero())
            rep.add("cone cocycle condition fails at form order " + std::to_string(i),
                    "f_* omega - D lambda = " + resid.str());
    }
    return rep;
}

namespace {

Scalar linear_coeff(const Element& e, Generator g) {
    NormalizeResult n = normalize({RawFactor{g, 1}});
    return e.coefficient(n.mono);
}

}  // namespace

Report check_lagrangian_strict(const FreeWCDGA& A, const FreeWCDGA& B,
                               const IsotropicPair& pair) {
    Report rep;
    Report iso = check_isotropic(A, B, pair);
    if (!iso.ok()) {
        rep.add("isotropic precondition fails");
        for (auto& i : iso.issues) rep.issues.push_back(i);
        return rep;
    }
    Report sp = check_symplectic_strict(A, pair.omega);
    if (!sp.ok()) {
        rep.add("symplectic precondition fails");
        for (auto& i : sp.issues) rep.issues.push_back(i);
        return rep;
    }

    const int n = pair.omega.n;
    const int m = pair.omega.m;
    const std::size_t na = A.gens.size();
    const std::size_t nb = B.gens.size();

    // Flattened total complex at the augmentation:
    //   column 0: T_B, column 1: T_A (x) B, column 2: Omega^1_B [-n]{m}.
    // Index layout: [0, nb) tau^B, [nb, nb+na) tau^A, [nb+na, nb+na+nb) dy.
    const std::size_t dim = nb + na + nb;
    auto key_of = [&](std::size_t i) -> std::pair<int, int> {
        if (i < nb) {
            Generator y = B.gens[i];
            return {-(y.degree() + 1), -y.weight()};
        }
        if (i < nb + na) {
            Generator x = A.gens[i - nb];
            return {-x.degree(), -x.weight()};
        }
        Generator y = B.gens[i - nb - na];
        return {y.degree() - n + 1, y.weight() - m};
    };

    QMatrix D(dim, dim);

    // Linear parts of the differentials.
    auto linA = [&](std::size_t c, std::size_t a) {  // coeff of x_a in delta_A(x_c)
        return linear_coeff(A.diff.image(A.gens[c]), A.gens[a]);
    };
    auto linB = [&](std::size_t c, std::size_t b) {
        return linear_coeff(B.diff.image(B.gens[c]), B.gens[b]);
    };

    // Internal differential on T_B (column 0).
    for (std::size_t b = 0; b < nb; ++b) {
        int par = (B.gens[b].degree() + 1) & 1;
        for (std::size_t c = 0; c < nb; ++c) {
            Scalar v = linB(c, b);
            if (!v.is_zero()) D.at(c, b) += (par ? -v : v) * Scalar(-1);
        }
    }
    // Internal differential on T_A (x) B (column 1), sign-twisted by the column.
    for (std::size_t a = 0; a < na; ++a) {
        int par = (A.gens[a].degree() + 1) & 1;
        for (std::size_t c = 0; c < na; ++c) {
            Scalar v = linA(c, a);
            if (!v.is_zero()) D.at(nb + c, nb + a) += (par ? v : -v) * Scalar(-1);
        }
    }
    // Internal differential on Omega^1_B (column 2): delta(dy_c) = -d(delta y_c).
    for (std::size_t c = 0; c < nb; ++c)
        for (std::size_t b = 0; b < nb; ++b) {
            Scalar v = linB(c, b);
            if (!v.is_zero()) D.at(nb + na + b, nb + na + c) += -v;
        }

    // J: T_B -> T_A (x) B, dual of the pullback of 1-forms.
    for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t a = 0; a < na; ++a) {
            Scalar v = linear_coeff(*pair.f.image(A.gens[a]), B.gens[b]);
            if (!v.is_zero()) D.at(nb + a, b) += v;
        }

    // Phi: T_A (x) B -> Omega^1_B, contraction with the pushed omega_2.
    CdgaMap fhat = form_pushforward(A, pair.f);
    for (std::size_t a = 0; a < na; ++a) {
        Element row = contract(form_generator(A.gens[a]), pair.omega.form(2));
        Element pushed = map_apply(fhat, row, &B.trunc);
        for (std::size_t b = 0; b < nb; ++b) {
            Scalar v = linear_coeff(pushed, form_generator(B.gens[b]));
            if (!v.is_zero()) D.at(nb + na + b, nb + a) += v;
        }
    }

    // lambda^sharp: T_B -> Omega^1_B.
    auto it2 = pair.lambda.find(2);
    Element lambda2 = it2 == pair.lambda.end() ? Element::zero() : it2->second;
    for (std::size_t b = 0; b < nb; ++b) {
        Element row = contract(form_generator(B.gens[b]), lambda2);
        for (std::size_t c = 0; c < nb; ++c) {
            Scalar v = linear_coeff(row, form_generator(B.gens[c]));
            if (!v.is_zero()) D.at(nb + na + c, b) += v;
        }
    }

    // Degree coherence and the square-zero tripwire.
    for (std::size_t j = 0; j < dim; ++j)
        for (std::size_t i = 0; i < dim; ++i) {
            if (D.at(i, j).is_zero()) continue;
            auto kj = key_of(j);
            auto ki = key_of(i);
            if (ki.first != kj.first + 1 || ki.second != kj.second)
                throw std::logic_error("lagrangian cone differential is not degree +1");
        }
    QMatrix DD = D * D;
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            if (!DD.at(i, j).is_zero())
                throw std::logic_error("lagrangian cone differential does not square to zero");

    // Acyclicity per (degree, weight) slice.
    std::map<std::pair<int, int>, std::vector<std::size_t>> slices;
    for (std::size_t i = 0; i < dim; ++i) slices[key_of(i)].push_back(i);
    for (const auto& [key, idx] : slices) {
        std::pair<int, int> up{key.first + 1, key.second};
        std::pair<int, int> down{key.first - 1, key.second};
        auto pick = [&](const std::pair<int, int>& k) {
            auto it = slices.find(k);
            return it == slices.end() ? std::vector<std::size_t>{} : it->second;
        };
        std::vector<std::size_t> rows_up = pick(up);
        std::vector<std::size_t> cols_dn = pick(down);
        QMatrix out(rows_up.size(), idx.size());
        for (std::size_t i = 0; i < rows_up.size(); ++i)
            for (std::size_t j = 0; j < idx.size(); ++j) out.at(i, j) = D.at(rows_up[i], idx[j]);
        QMatrix in(idx.size(), cols_dn.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < cols_dn.size(); ++j) in.at(i, j) = D.at(idx[i], cols_dn[j]);
        std::size_t h = idx.size() - out.rank() - in.rank();
        if (h != 0) {
            std::ostringstream os;
            os << "cone homology nonzero in degree " << key.first << ", weight " << key.second
               << " (dimension " << h << ")";
            rep.add("contraction map is not a strict quasi-isomorphism", os.str());
        }
    }
    return rep;
}

PreSymplecticClasses presymplectic_classes(const FreeWCDGA& A, int n, int m, int max_form_order,
                                           int max_order) {
    Trunc t = A.trunc;
    if (!t.max_order || *t.max_order > max_order) t.max_order = max_order;
    t.max_symbol_order = *t.max_order + max_form_order;
    t.max_order.reset();
    t.max_form_order = max_form_order;

    std::vector<Generator> gens = with_forms(A);
    auto slice = [&](int deg) {
        SliceSpec spec{deg, m, std::nullopt, std::nullopt, t};
        std::vector<Monomial> all = enumerate_slice(gens, spec);
        std::vector<Monomial> keep;
        for (const Monomial& mo : all)
            if (mo.form_order() >= 2) keep.push_back(mo);
        return keep;
    };
    std::vector<Monomial> Bmid = slice(n + 2);
    std::vector<Monomial> Bup = slice(n + 3);
    std::vector<Monomial> Bdn = slice(n + 1);

    std::map<Monomial, std::size_t> mid_index, up_index;
    for (std::size_t i = 0; i < Bmid.size(); ++i) mid_index[Bmid[i]] = i;
    for (std::size_t i = 0; i < Bup.size(); ++i) up_index[Bup[i]] = i;

    auto dr = [&](const Monomial& mo) { return dr_differential(A, Element::monomial(mo), &t); };

    QMatrix out(Bup.size(), Bmid.size());
    for (std::size_t j = 0; j < Bmid.size(); ++j) {
        Element image = dr(Bmid[j]);
        for (const auto& [mo, c] : image.terms()) {
            auto it = up_index.find(mo);
            if (it != up_index.end()) out.at(it->second, j) = c;
        }
    }
    QMatrix in(Bmid.size(), Bdn.size());
    for (std::size_t j = 0; j < Bdn.size(); ++j) {
        Element image = dr(Bdn[j]);
        for (const auto& [mo, c] : image.terms()) {
            auto it = mid_index.find(mo);
            if (it != mid_index.end()) in.at(it->second, j) = c;
        }
    }

    PreSymplecticClasses cls;
    cls.trunc = t;
    cls.slice_basis = Bmid;

    QMatrix brows(in.cols(), Bmid.size());
    for (std::size_t j = 0; j < in.cols(); ++j)
        for (std::size_t i = 0; i < Bmid.size(); ++i) brows.at(j, i) = in.at(i, j);
    auto bech = brows.echelon();
    QMatrix reduced_rows(bech.rank, Bmid.size());
    for (std::size_t r = 0; r < bech.rank; ++r)
        for (std::size_t j = 0; j < Bmid.size(); ++j) reduced_rows.at(r, j) = bech.rref.at(r, j);
    cls.boundary_rows = reduced_rows;
    cls.boundary_pivots.assign(bech.pivot_cols.begin(),
                               bech.pivot_cols.begin() + bech.rank);

    auto reduce = [&](QVector v) {
        for (std::size_t r = 0; r < cls.boundary_pivots.size(); ++r) {
            std::size_t p = cls.boundary_pivots[r];
            if (v[p].is_zero()) continue;
            Scalar f = v[p];
            for (std::size_t j = 0; j < v.size(); ++j)
                v[j] -= f * cls.boundary_rows.at(r, j);
        }
        return v;
    };

    std::vector<QVector> cycles = out.kernel_basis();
    QMatrix grow = reduced_rows;
    std::size_t grow_rank = grow.rank();
    for (const QVector& c : cycles) {
        QVector v = reduce(c);
        bool zero = true;
        for (const Scalar& s : v) zero = zero && s.is_zero();
        if (zero) continue;
        QMatrix cand(grow.rows() + 1, Bmid.size());
        for (std::size_t i = 0; i < grow.rows(); ++i)
            for (std::size_t j = 0; j < Bmid.size(); ++j) cand.at(i, j) = grow.at(i, j);
        for (std::size_t j = 0; j < Bmid.size(); ++j) cand.at(grow.rows(), j) = v[j];
        std::size_t cr = cand.rank();
        if (cr > grow_rank) {
            cls.class_basis.push_back(v);
            grow = cand;
            grow_rank = cr;
        }
    }
    cls.dimension = static_cast<int>(cls.class_basis.size());
    return cls;
}

QVector presymplectic_class_of(const FreeWCDGA& A, const PreSymplecticClasses& cls,
                               const PreSymplectic& omega) {
    const Trunc& t = cls.trunc;
    Element total = omega.total().truncated(t);
    Element closure = dr_differential(A, total, &t);
    if (!closure.is_zero())
        throw NotClosedError(
            "presymplectic_class_of: not a cocycle of the truncated complex: D omega = " +
            closure.str());

    std::map<Monomial, std::size_t> index;
    for (std::size_t i = 0; i < cls.slice_basis.size(); ++i) index[cls.slice_basis[i]] = i;
    QVector v(cls.slice_basis.size(), Scalar(0));
    for (const auto& [mo, c] : total.terms()) {
        auto it = index.find(mo);
        if (it == index.end())
            throw std::invalid_argument("presymplectic_class_of: term outside the class slice: " +
                                        mo.str());
        v[it->second] = c;
    }
    for (std::size_t r = 0; r < cls.boundary_pivots.size(); ++r) {
        std::size_t p = cls.boundary_pivots[r];
        if (v[p].is_zero()) continue;
        Scalar f = v[p];
        for (std::size_t j = 0; j < v.size(); ++j) v[j] -= f * cls.boundary_rows.at(r, j);
    }
    return v;
}

bool same_presymplectic_class(const FreeWCDGA& A, const PreSymplecticClasses& cls,
                              const PreSymplectic& a, const PreSymplectic& b) {
    return presymplectic_class_of(A, cls, a) == presymplectic_class_of(A, cls, b);
}

TwistedCotangent generate_twisted_cotangent(const FreeWCDGA& B, const Element& f, int n, int m) {
    Report ok = validate(B);
    if (!ok.ok())
        throw std::invalid_argument("generate_twisted_cotangent: invalid base:\n" + ok.str());
    if (!f.is_zero()) {
        int fd = 0, fw = 0;
        if (!f.is_homogeneous(&fd, &fw) || fd != -(n + 1) || fw != m)
            throw std::invalid_argument(
                "generate_twisted_cotangent: twist must be homogeneous of chain degree 1+n and weight m");
        if (n != -1)
            throw std::invalid_argument(
                "generate_twisted_cotangent: nonzero twists are only degree-consistent for n = -1");
        if (!B.d(f).is_zero()) throw NotClosedError("generate_twisted_cotangent: delta f != 0");
    }

    TwistedCotangent out;
    out.algebra.trunc = B.trunc;
    out.algebra.diff.degree_shift = 1;
    out.algebra.diff.weight_shift = 0;
    out.algebra.gens = B.gens;

    std::vector<Generator> xi;
    for (Generator x : B.gens) {
        Generator p = Generator::make(GenKind::base, "p_" + x.name(), n - x.degree(),
                                      m - x.weight());
        out.fiber.push_back(p);
        out.algebra.gens.push_back(p);
        xi.push_back(Generator::make(GenKind::tangent, x.name(), n - x.degree(),
                                     m - x.weight()));
    }

    // delta on the fiber: the dual action of delta_B twisted by the bracket
    // with f, computed with the odd bracket at shift n-1 (the shifted
    // cotangent pairing) and transported along xi_a -> p_a, which have the
    // same degree and parity.
    Element delta_hat;
    for (std::size_t a = 0; a < B.gens.size(); ++a)
        delta_hat += mul(B.diff.image(B.gens[a]), Element::generator(xi[a]));
    Element twist = delta_hat - f;
    const int shift = n - 1;

    // Transport xi -> p.
    auto transport = [&](const Element& e) {
        Element r;
        for (const auto& [mo, c] : e.terms()) {
            std::vector<RawFactor> raw;
            for (const auto& [g, ex] : mo.factors()) {
                if (g.kind() == GenKind::tangent) {
                    auto it = std::find(xi.begin(), xi.end(), g);
                    raw.push_back({out.fiber[it - xi.begin()], ex});
                } else {
                    raw.push_back({g, ex});
                }
            }
            NormalizeResult nr = normalize(raw);
            if (nr.odd_square) continue;
            r.add_term(nr.mono, nr.sign < 0 ? -c : c);
        }
        return r;
    };

    for (std::size_t a = 0; a < B.gens.size(); ++a) {
        out.algebra.diff.set_image(B.gens[a], B.diff.image(B.gens[a]));
        Element img = transport(schouten_pair(shift, twist, Element::generator(xi[a])));
        out.algebra.diff.set_image(out.fiber[a], img.truncated(out.algebra.trunc));
    }

    out.omega.n = n;
    out.omega.m = m;
    out.omega.i_max = 2;
    Element w2;
    for (std::size_t a = 0; a < B.gens.size(); ++a)
        w2 += mul(Element::generator(form_generator(out.fiber[a])),
                  Element::generator(form_generator(B.gens[a])));
    out.omega.forms[2] = w2;

    Report vr = validate(out.algebra);
    if (!vr.ok())
        throw std::logic_error("generate_twisted_cotangent: output failed validation:\n" +
                               vr.str());
    return out;
}

}  // namespace sympol
