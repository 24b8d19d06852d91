#include "sympol/dgla.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace sympol {

QVector DGLA::bracket(int i, int j) const {
    auto it = bracket_table.find({i, j});
    if (it != bracket_table.end()) return it->second;
    return QVector(dim(), Scalar(0));
}

void DGLA::set_bracket(int i, int j, QVector v) {
    bracket_table[{i, j}] = std::move(v);
}

void DGLA::set_bracket_sym(int i, int j, const QVector& v) {
    set_bracket(i, j, v);
    if (i != j) {
        QVector w(v.size());
        bool flip = ((basis[i].degree * basis[j].degree) & 1) == 0;
        for (std::size_t k = 0; k < v.size(); ++k) w[k] = flip ? -v[k] : v[k];
        set_bracket(j, i, std::move(w));
    }
}

std::optional<int> DGLA::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < basis.size(); ++i)
        if (basis[i].name == name) return static_cast<int>(i);
    return std::nullopt;
}

DGLA make_dgla(std::vector<DGLABasisElement> basis) {
    DGLA L;
    L.basis = std::move(basis);
    L.diff = QMatrix(L.basis.size(), L.basis.size());
    return L;
}

Report validate_dgla(const DGLA& L) {
    Report rep;
    const std::size_t n = L.dim();
    std::set<std::string> names;
    for (const auto& b : L.basis)
        if (!names.insert(b.name).second) rep.add("duplicate basis name", b.name);
    if (L.diff.rows() != n || L.diff.cols() != n) {
        rep.add("differential matrix has wrong shape");
        return rep;
    }
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            if (L.diff.at(i, j).is_zero()) continue;
            if (L.basis[i].degree != L.basis[j].degree + 1)
                rep.add("differential entry violates degree +1",
                        L.basis[j].name + " -> " + L.basis[i].name);
            if (L.basis[i].weight != L.basis[j].weight)
                rep.add("differential entry violates weight 0",
                        L.basis[j].name + " -> " + L.basis[i].name);
        }
    for (const auto& [ij, v] : L.bracket_table) {
        auto [i, j] = ij;
        if (v.size() != n) {
            rep.add("bracket value has wrong dimension");
            continue;
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (v[k].is_zero()) continue;
            if (L.basis[k].degree != L.basis[i].degree + L.basis[j].degree)
                rep.add("bracket entry violates degree additivity",
                        "[" + L.basis[i].name + "," + L.basis[j].name + "]");
            if (L.basis[k].weight != L.basis[i].weight + L.basis[j].weight)
                rep.add("bracket entry violates weight additivity",
                        "[" + L.basis[i].name + "," + L.basis[j].name + "]");
        }
    }
    if (!rep.ok()) return rep;

    auto qd = [&](int i) { return L.basis[i].degree; };

    // graded antisymmetry
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            QVector a = L.bracket(i, j);
            QVector b = L.bracket(j, i);
            bool flip = ((qd(i) * qd(j)) & 1) == 0;
            for (std::size_t k = 0; k < n; ++k) {
                Scalar expected = flip ? -b[k] : b[k];
                if (a[k] != expected) {
                    rep.add("graded antisymmetry fails",
                            "[" + L.basis[i].name + "," + L.basis[j].name + "]");
                    break;
                }
            }
        }

    // delta^2 = 0
    QMatrix dd = L.diff * L.diff;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (!dd.at(i, j).is_zero()) {
                rep.add("differential does not square to zero", L.basis[j].name);
                j = n;
                i = n - 1;
            }

    // delta a derivation of the bracket
    for (std::size_t i = 0; i < n && rep.ok(); ++i)
        for (std::size_t j = 0; j < n; ++j) {
            QVector lhs(n, Scalar(0));
            QVector bij = L.bracket(i, j);
            for (std::size_t k = 0; k < n; ++k) {
                if (bij[k].is_zero()) continue;
                for (std::size_t l = 0; l < n; ++l) lhs[l] += L.diff.at(l, k) * bij[k];
            }
            QVector rhs(n, Scalar(0));
            for (std::size_t m = 0; m < n; ++m) {
                if (!L.diff.at(m, i).is_zero()) {
                    QVector bmj = L.bracket(static_cast<int>(m), j);
                    for (std::size_t l = 0; l < n; ++l) rhs[l] += L.diff.at(m, i) * bmj[l];
                }
                if (!L.diff.at(m, j).is_zero()) {
                    QVector bim = L.bracket(static_cast<int>(i), static_cast<int>(m));
                    Scalar c = L.diff.at(m, j);
                    if (qd(i) & 1) c = -c;
                    for (std::size_t l = 0; l < n; ++l) rhs[l] += c * bim[l];
                }
            }
            if (lhs != rhs) {
                rep.add("differential is not a derivation of the bracket",
                        "[" + L.basis[i].name + "," + L.basis[j].name + "]");
            }
        }

    // graded Jacobi: [i,[j,k]] = [[i,j],k] + (-1)^{q_i q_j} [j,[i,k]]
    for (std::size_t i = 0; i < n && rep.ok(); ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                QVector lhs(n, Scalar(0));
                QVector bjk = L.bracket(j, k);
                for (std::size_t m = 0; m < n; ++m) {
                    if (bjk[m].is_zero()) continue;
                    QVector bim = L.bracket(static_cast<int>(i), static_cast<int>(m));
                    for (std::size_t l = 0; l < n; ++l) lhs[l] += bjk[m] * bim[l];
                }
                QVector rhs(n, Scalar(0));
                QVector bij = L.bracket(static_cast<int>(i), static_cast<int>(j));
                for (std::size_t m = 0; m < n; ++m) {
                    if (bij[m].is_zero()) continue;
                    QVector bmk = L.bracket(static_cast<int>(m), static_cast<int>(k));
                    for (std::size_t l = 0; l < n; ++l) rhs[l] += bij[m] * bmk[l];
                }
                QVector bik = L.bracket(static_cast<int>(i), static_cast<int>(k));
                Scalar sign = ((qd(static_cast<int>(i)) * qd(static_cast<int>(j))) & 1)
                                  ? Scalar(-1)
                                  : Scalar(1);
                for (std::size_t m = 0; m < n; ++m) {
                    if (bik[m].is_zero()) continue;
                    QVector bjm = L.bracket(static_cast<int>(j), static_cast<int>(m));
                    for (std::size_t l = 0; l < n; ++l) rhs[l] += sign * bik[m] * bjm[l];
                }
                if (lhs != rhs) {
                    std::ostringstream os;
                    os << "(" << L.basis[i].name << "," << L.basis[j].name << ","
                       << L.basis[k].name << ")";
                    rep.add("graded Jacobi identity fails", os.str());
                    return rep;
                }
            }
    return rep;
}

Report validate_pairing(const DGLA& L, const CyclicPairing& P) {
    Report rep;
    const std::size_t n = L.dim();
    if (P.matrix.rows() != n || P.matrix.cols() != n) {
        rep.add("pairing matrix has wrong shape");
        return rep;
    }
    auto qd = [&](std::size_t i) { return L.basis[i].degree; };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const Scalar& v = P.matrix.at(i, j);
            if (v.is_zero()) continue;
            if (qd(i) + qd(j) != P.d)
                rep.add("pairing entry off the degree-d diagonal",
                        "<" + L.basis[i].name + "," + L.basis[j].name + ">");
            if (L.basis[i].weight + L.basis[j].weight != P.pairing_weight)
                rep.add("pairing entry off the declared weight",
                        "<" + L.basis[i].name + "," + L.basis[j].name + ">");
        }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Scalar expected = P.matrix.at(j, i);
            if ((qd(i) * qd(j)) & 1) expected = -expected;
            if (P.matrix.at(i, j) != expected)
                rep.add("graded symmetry fails",
                        "<" + L.basis[i].name + "," + L.basis[j].name + ">");
        }
    // invariance <[i,j],k> = <i,[j,k]>
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                Scalar lhs(0), rhs(0);
                QVector bij = L.bracket(static_cast<int>(i), static_cast<int>(j));
                for (std::size_t l = 0; l < n; ++l)
                    if (!bij[l].is_zero()) lhs += bij[l] * P.matrix.at(l, k);
                QVector bjk = L.bracket(static_cast<int>(j), static_cast<int>(k));
                for (std::size_t l = 0; l < n; ++l)
                    if (!bjk[l].is_zero()) rhs += P.matrix.at(i, l) * bjk[l];
                if (lhs != rhs) {
                    std::ostringstream os;
                    os << "(" << L.basis[i].name << "," << L.basis[j].name << ","
                       << L.basis[k].name << ")";
                    rep.add("invariance fails", os.str());
                    return rep;
                }
            }
    // delta-compatibility <delta i, j> + (-1)^{q_i} <i, delta j> = 0
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Scalar acc(0);
            for (std::size_t l = 0; l < n; ++l) {
                if (!L.diff.at(l, i).is_zero()) acc += L.diff.at(l, i) * P.matrix.at(l, j);
                if (!L.diff.at(l, j).is_zero()) {
                    Scalar c = L.diff.at(l, j) * P.matrix.at(i, l);
                    acc += (qd(i) & 1) ? -c : c;
                }
            }
            if (!acc.is_zero())
                rep.add("pairing not compatible with the differential",
                        "<" + L.basis[i].name + "," + L.basis[j].name + ">");
        }
    return rep;
}

bool LElement::is_zero() const {
    for (const auto& [i, e] : comps)
        if (!e.is_zero()) return false;
    return true;
}

Element LElement::comp(int i) const {
    auto it = comps.find(i);
    return it == comps.end() ? Element::zero() : it->second;
}

void LElement::add(int i, const Element& e) {
    if (e.is_zero()) return;
    auto it = comps.find(i);
    if (it == comps.end()) {
        comps.emplace(i, e);
    } else {
        it->second += e;
        if (it->second.is_zero()) comps.erase(it);
    }
}

LElement LElement::operator-() const {
    LElement r;
    for (const auto& [i, e] : comps) r.comps.emplace(i, -e);
    return r;
}

LElement& LElement::operator+=(const LElement& o) {
    for (const auto& [i, e] : o.comps) add(i, e);
    return *this;
}

LElement& LElement::operator-=(const LElement& o) {
    for (const auto& [i, e] : o.comps) add(i, -e);
    return *this;
}

LElement operator*(const Scalar& s, LElement x) {
    if (s.is_zero()) return LElement();
    for (auto& [i, e] : x.comps) e = s * e;
    return x;
}

bool operator==(const LElement& a, const LElement& b) {
    LElement d = a;
    d -= b;
    return d.is_zero();
}

bool LElement::is_homogeneous(const DGLA& L, int* total_degree) const {
    bool first = true;
    int deg = 0;
    for (const auto& [i, e] : comps) {
        if (e.is_zero()) continue;
        for (const auto& [m, c] : e.terms()) {
            int d = L.basis[i].degree + m.total_degree();
            if (first) {
                deg = d;
                first = false;
            } else if (d != deg) {
                return false;
            }
        }
    }
    if (total_degree) *total_degree = deg;
    return true;
}

LElement LElement::truncated(const Trunc& t) const {
    LElement r;
    for (const auto& [i, e] : comps) r.add(i, e.truncated(t));
    return r;
}

std::string LElement::str(const DGLA& L) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [i, e] : comps) {
        if (e.is_zero()) continue;
        if (!first) os << " + ";
        first = false;
        os << L.basis[i].name << " (x) (" << e.str() << ")";
    }
    return os.str();
}

LElement l_delta_L(const DGLA& L, const LElement& x) {
    LElement r;
    for (const auto& [j, f] : x.comps) {
        for (std::size_t i = 0; i < L.dim(); ++i) {
            const Scalar& c = L.diff.at(i, j);
            if (!c.is_zero()) r.add(static_cast<int>(i), c * f);
        }
    }
    return r;
}

LElement l_delta(const DGLA& L, const FreeWCDGA& A, const LElement& x) {
    LElement r = l_delta_L(L, x);
    for (const auto& [i, f] : x.comps) {
        Element df = A.d(f);
        if ((L.basis[i].degree & 1) != 0) df = -df;
        r.add(i, df);
    }
    return r;
}

LElement l_bracket(const DGLA& L, const LElement& x, const LElement& y, const Trunc* trunc) {
    LElement r;
    for (const auto& [i, f] : x.comps)
        for (const auto& [j, g] : y.comps) {
            QVector bij = L.bracket(i, j);
            bool any = false;
            for (const Scalar& s : bij) any = any || !s.is_zero();
            if (!any) continue;
            // (-1)^{deg f * |e_j|} per monomial of f
            Element signed_f;
            for (const auto& [m, c] : f.terms()) {
                bool flip = (m.total_degree() & L.basis[j].degree & 1) != 0;
                signed_f.add_term(m, flip ? -c : c);
            }
            Element prod = mul(signed_f, g, trunc);
            if (prod.is_zero()) continue;
            for (std::size_t k = 0; k < L.dim(); ++k)
                if (!bij[k].is_zero()) r.add(static_cast<int>(k), bij[k] * prod);
        }
    return r;
}

LElement check_mc_element(const DGLA& L, const FreeWCDGA& A, const LElement& alpha) {
    LElement r = l_delta(L, A, alpha);
    LElement br = l_bracket(L, alpha, alpha, &A.trunc);
    r += Scalar(1, 2) * br;
    return r.truncated(A.trunc);
}

LElement gauge_act(const DGLA& L, const FreeWCDGA& A, const LElement& g,
                   const LElement& alpha) {
    int gd = 0;
    if (!g.is_zero() && (!g.is_homogeneous(L, &gd) || gd != 0))
        throw std::invalid_argument("gauge_act: gauge parameter must have total degree 0");
    LElement t = l_bracket(L, g, alpha, &A.trunc);
    t -= l_delta(L, A, g);
    LElement result = alpha;
    LElement term = t;
    long k = 0;
    Scalar factorial(1);
    while (!term.is_zero()) {
        // term = ad_g^k([g, alpha] - delta g); add term/(k+1)!.
        factorial *= Scalar(k + 1);
        result += factorial.inverse() * term;
        term = l_bracket(L, g, term, &A.trunc);
        ++k;
        if (k > 512)
            throw std::runtime_error("gauge_act: series did not terminate (non-nilpotent input)");
    }
    LElement check = check_mc_element(L, A, result);
    if (!check.is_zero())
        throw std::logic_error("gauge_act: output violates Maurer-Cartan: " + check.str(L));
    return result;
}

Report gauge_path_certificate(const DGLA& L, const FreeWCDGA& A, const LElement& g,
                              const LElement& alpha) {
    Report rep;
    // alpha(t) = alpha + sum_{k>=0} t^{k+1} ad_g^k([g,alpha] - delta g)/(k+1)!
    std::vector<LElement> coeff;  // coefficient of t^k
    coeff.push_back(alpha);
    LElement t0 = l_bracket(L, g, alpha, &A.trunc);
    t0 -= l_delta(L, A, g);
    LElement term = t0;
    Scalar factorial(1);
    long k = 0;
    while (!term.is_zero() && k <= 512) {
        factorial *= Scalar(k + 1);
        coeff.push_back(factorial.inverse() * term);
        term = l_bracket(L, g, term, &A.trunc);
        ++k;
    }
    if (!term.is_zero()) {
        rep.add("gauge series did not terminate");
        return rep;
    }
    const std::size_t deg = coeff.size();
    // MC(alpha(t)) = 0 per power of t.
    for (std::size_t p = 0; p < 2 * deg; ++p) {
        LElement acc;
        if (p < deg) acc += l_delta(L, A, coeff[p]);
        for (std::size_t a = 0; a < deg; ++a) {
            if (p < a || p - a >= deg) continue;
            acc += Scalar(1, 2) * l_bracket(L, coeff[a], coeff[p - a], &A.trunc);
        }
        if (!acc.is_zero()) {
            rep.add("path fails Maurer-Cartan at t-power " + std::to_string(p),
                    acc.str(L));
            return rep;
        }
    }
    // Flow: d/dt alpha(t) = [g, alpha(t)] - delta g.
    for (std::size_t p = 0; p + 1 < deg + 1; ++p) {
        LElement lhs;
        if (p + 1 < deg) lhs = Scalar(static_cast<long>(p + 1)) * coeff[p + 1];
        LElement rhs;
        if (p < deg) rhs = l_bracket(L, g, coeff[p], &A.trunc);
        if (p == 0) rhs -= l_delta(L, A, g);
        if (!(lhs == rhs)) {
            rep.add("gauge flow equation fails at t-power " + std::to_string(p));
            return rep;
        }
    }
    return rep;
}

Report validate_small_extension(const SmallExtension& ext) {
    Report rep;
    std::set<Monomial> ideal(ext.ideal.begin(), ext.ideal.end());
    for (const Monomial& m : ext.ideal) {
        // I * m_{A'} = 0 under the truncation
        for (Generator g : ext.total.gens) {
            Element prod = mul(Element::monomial(m), Element::generator(g), &ext.total.trunc);
            for (const auto& [mono, c] : prod.terms())
                if (!ideal.count(mono))
                    rep.add("ideal is not square-zero against the maximal ideal",
                            m.str() + " * " + g.name());
        }
        // delta(I) subset I
        Element dm = ext.total.d(Element::monomial(m));
        for (const auto& [mono, c] : dm.terms())
            if (!ideal.count(mono))
                rep.add("ideal is not a dg ideal", m.str());
    }
    for (const Monomial& m : ext.ideal)
        if (m.order() == 0) rep.add("ideal contains the unit slice", m.str());
    return rep;
}

McExtendResult mc_extend(const DGLA& L, const SmallExtension& ext, const LElement& alpha) {
    Report small = validate_small_extension(ext);
    if (!small.ok()) throw NotSmallError("mc_extend: not a small extension:\n" + small.str());

    std::set<Monomial> ideal(ext.ideal.begin(), ext.ideal.end());
    for (const auto& [i, e] : alpha.comps)
        for (const auto& [m, c] : e.terms())
            if (ideal.count(m))
                throw std::invalid_argument(
                    "mc_extend: alpha must be given by coefficients avoiding the ideal");

    // Set-level lift: same coefficients read in A'.
    LElement beta = alpha;
    LElement residue = check_mc_element(L, ext.total, beta);

    // The residue must lie in L^2 (x) I and be delta-closed.
    for (const auto& [i, e] : residue.comps)
        for (const auto& [m, c] : e.terms())
            if (!ideal.count(m))
                throw std::invalid_argument(
                    "mc_extend: alpha is not Maurer-Cartan over the quotient; residue term " +
                    m.str());
    LElement dres = l_delta(L, ext.total, residue);
    if (!dres.is_zero())
        throw std::logic_error("mc_extend: residue is not closed: " + dres.str(L));

    // Bases of (L (x) I)^1 and (L (x) I)^2.
    std::vector<std::pair<int, Monomial>> b1, b2;
    for (std::size_t i = 0; i < L.dim(); ++i)
        for (const Monomial& m : ext.ideal) {
            int deg = L.basis[i].degree + m.total_degree();
            if (deg == 1) b1.emplace_back(static_cast<int>(i), m);
            if (deg == 2) b2.emplace_back(static_cast<int>(i), m);
        }
    std::map<std::pair<int, Monomial>, std::size_t> index2;
    for (std::size_t i = 0; i < b2.size(); ++i) index2[b2[i]] = i;

    QMatrix D(b2.size(), b1.size());
    for (std::size_t j = 0; j < b1.size(); ++j) {
        LElement v;
        v.add(b1[j].first, Element::monomial(b1[j].second));
        LElement dv = l_delta(L, ext.total, v);
        for (const auto& [i, e] : dv.comps)
            for (const auto& [m, c] : e.terms()) {
                auto it = index2.find({i, m});
                if (it == index2.end())
                    throw std::logic_error("mc_extend: differential left the ideal slice");
                D.at(it->second, j) += c;
            }
    }
    QVector r(b2.size(), Scalar(0));
    for (const auto& [i, e] : residue.comps)
        for (const auto& [m, c] : e.terms()) r[index2.at({i, m})] = c;

    QVector rhs(b2.size());
    for (std::size_t i = 0; i < b2.size(); ++i) rhs[i] = -r[i];
    auto sol = D.solve(rhs);

    McExtendResult out;
    out.obstruction = residue;
    if (sol) {
        out.lifted = true;
        out.lift = beta;
        for (std::size_t j = 0; j < b1.size(); ++j)
            if (!(*sol)[j].is_zero())
                out.lift.add(b1[j].first, Element::monomial(b1[j].second, (*sol)[j]));
        LElement check = check_mc_element(L, ext.total, out.lift);
        if (!check.is_zero())
            throw std::logic_error("mc_extend: lift fails Maurer-Cartan: " + check.str(L));
        out.obstruction_class.assign(b2.size(), Scalar(0));
    } else {
        out.lifted = false;
        // Reduce the residue modulo the boundary space for a canonical class.
        QMatrix rows(b1.size(), b2.size());
        for (std::size_t j = 0; j < b1.size(); ++j)
            for (std::size_t i = 0; i < b2.size(); ++i) rows.at(j, i) = D.at(i, j);
        auto ech = rows.echelon();
        QVector v = r;
        for (std::size_t rr = 0; rr < ech.rank; ++rr) {
            std::size_t p = ech.pivot_cols[rr];
            if (v[p].is_zero()) continue;
            Scalar f = v[p];
            for (std::size_t j = 0; j < b2.size(); ++j) v[j] -= f * ech.rref.at(rr, j);
        }
        out.obstruction_class = v;
    }
    return out;
}

CEAlgebra ce_algebra(const DGLA& L, int max_order) {
    CEAlgebra ce;
    Trunc t;
    t.max_order = max_order;
    ce.algebra.trunc = t;
    ce.algebra.diff.degree_shift = 1;
    ce.algebra.diff.weight_shift = 0;
    for (const auto& b : L.basis) {
        Generator x = Generator::make(GenKind::base, "x_" + b.name, 1 - b.degree, -b.weight);
        ce.gens.push_back(x);
        ce.algebra.gens.push_back(x);
    }
    // Read the differential off the universal Maurer-Cartan element:
    // R := (delta_L (x) 1)(alpha_u) + 1/2 [alpha_u, alpha_u], and
    // delta_CE(x^c) := -(-1)^{q_c} R_c.
    LElement alpha_u;
    for (std::size_t a = 0; a < L.dim(); ++a)
        alpha_u.add(static_cast<int>(a), Element::generator(ce.gens[a]));
    LElement R = l_delta_L(L, alpha_u);
    R += Scalar(1, 2) * l_bracket(L, alpha_u, alpha_u, &t);
    for (std::size_t c = 0; c < L.dim(); ++c) {
        Element img = -R.comp(static_cast<int>(c));
        if (L.basis[c].degree & 1) img = -img;
        ce.algebra.diff.set_image(ce.gens[c], img.truncated(t));
    }
    for (Generator g : ce.algebra.gens)
        if (!ce.algebra.diff.has_image(g)) ce.algebra.diff.set_image(g, Element::zero());

    for (Generator g : ce.algebra.gens) {
        Element dd = ce.algebra.d(ce.algebra.d(Element::generator(g)));
        if (!dd.is_zero())
            throw AxiomFailureError(
                "ce_algebra: differential does not square to zero on " + g.name() +
                " (the DGLA axioms fail): delta^2 = " + dd.str());
    }
    return ce;
}

LElement universal_mc_element(const DGLA& L, const CEAlgebra& ce) {
    LElement alpha;
    for (std::size_t a = 0; a < L.dim(); ++a)
        alpha.add(static_cast<int>(a), Element::generator(ce.gens[a]));
    return alpha;
}

PreSymplectic formal_symplectic(const DGLA& L, const CyclicPairing& P, const CEAlgebra& ce,
                                int m) {
    if (P.pairing_weight != -m)
        throw std::invalid_argument(
            "formal_symplectic: weight bookkeeping requires pairing weight -m");
    PreSymplectic omega;
    omega.n = 2 - P.d;
    omega.m = m;
    omega.i_max = 2;
    Element w2;
    for (std::size_t a = 0; a < L.dim(); ++a)
        for (std::size_t b = 0; b < L.dim(); ++b) {
            const Scalar& p = P.matrix.at(a, b);
            if (p.is_zero()) continue;
            Scalar c = p;
            if ((L.basis[a].degree * L.basis[b].degree) & 1) c = -c;
            w2 += c * mul(Element::generator(form_generator(ce.gens[a])),
                          Element::generator(form_generator(ce.gens[b])));
        }
    omega.forms[2] = w2;

    Derivation delta = de_rham_delta(ce.algebra);
    Element closure = derivation_apply(delta, w2, &ce.algebra.trunc);
    if (!closure.is_zero())
        throw ClosureFailureError(
            "formal_symplectic: the 2-form is not internally closed (invariance fails): " +
            closure.str());
    return omega;
}

QMatrix casimir(const CyclicPairing& P) {
    auto inv = P.matrix.inverse();
    if (!inv) throw NotInvertibleError("casimir: pairing is degenerate");
    return *inv;
}

CasimirPoisson casimir_poisson(const DGLA& L, const CyclicPairing& P, const CEAlgebra& ce,
                               int m) {
    QMatrix C = casimir(P);
    CasimirPoisson out{make_poly_context(ce.algebra, 2 - P.d, m), Element::zero()};
    // Contraction with the Casimir tensor: pi = 1/4 sum C^{ab} xi_a xi_b.
    // The plain entries make the Maurer-Cartan residue vanish exactly when
    // the pairing is invariant (checked below), and the 1/4 normalisation is
    // the one inverse to the 2-form <d alpha, d alpha>: the contraction
    // matrix of that form double-counts the graded-symmetric pairing, so the
    // strict dictionary mu(omega, pi) = sigma(pi) holds with this scale.
    Scalar quarter(1, 4);
    for (std::size_t a = 0; a < L.dim(); ++a)
        for (std::size_t b = 0; b < L.dim(); ++b) {
            const Scalar& c = C.at(a, b);
            if (c.is_zero()) continue;
            out.pi += (quarter * c) * mul(Element::generator(out.context.xi[a]),
                                          Element::generator(out.context.xi[b]),
                                          &out.context.trunc);
        }
    Element residue = check_mc(out.context, out.pi);
    if (!residue.is_zero())
        throw std::logic_error(
            "casimir_poisson: MC residue nonzero (invariance must have failed): " +
            residue.str());
    return out;
}

TangentComplexResult tangent_complex(const DGLA& L, const FreeWCDGA& A, const LElement& alpha) {
    LElement mc = check_mc_element(L, A, alpha);
    if (!mc.is_zero())
        throw NotMCError("tangent_complex: alpha is not Maurer-Cartan: " + mc.str(L));
    if (!A.trunc.max_order)
        throw NonFiniteError("tangent_complex: coefficient algebra needs an order bound");

    // Basis of L (x) A: pairs (i, monomial).
    std::vector<std::pair<int, Monomial>> basis;
    for (std::size_t i = 0; i < L.dim(); ++i) {
        // Enumerate all monomials of A within the truncation at any degree.
        std::function<void(std::size_t, std::vector<RawFactor>&)> rec =
            [&](std::size_t idx, std::vector<RawFactor>& cur) {
                if (idx == A.gens.size()) {
                    NormalizeResult nr = normalize(cur);
                    if (nr.odd_square) return;
                    if (!nr.mono.passes(A.trunc)) return;
                    basis.emplace_back(static_cast<int>(i), nr.mono);
                    return;
                }
                Generator g = A.gens[idx];
                int cap = g.parity() == 1 ? 1 : *A.trunc.max_order;
                for (int e = 0; e <= cap; ++e) {
                    if (e > 0) cur.push_back({g, e});
                    rec(idx + 1, cur);
                    if (e > 0) cur.pop_back();
                }
            };
        std::vector<RawFactor> cur;
        rec(0, cur);
    }
    std::sort(basis.begin(), basis.end(), [&](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first < y.first;
        return x.second < y.second;
    });
    std::map<std::pair<int, Monomial>, std::size_t> index;
    for (std::size_t i = 0; i < basis.size(); ++i) index[basis[i]] = i;

    auto deg_of = [&](std::size_t i) {
        return L.basis[basis[i].first].degree + basis[i].second.total_degree();
    };

    QMatrix D(basis.size(), basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j) {
        LElement v;
        v.add(basis[j].first, Element::monomial(basis[j].second));
        LElement dv = l_delta(L, A, v);
        dv += l_bracket(L, alpha, v, &A.trunc);
        for (const auto& [i, e] : dv.comps)
            for (const auto& [mo, c] : e.terms()) D.at(index.at({i, mo}), j) += c;
    }
    QMatrix DD = D * D;
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = 0; j < basis.size(); ++j)
            if (!DD.at(i, j).is_zero())
                throw std::logic_error("tangent_complex: twisted differential fails to square to zero");

    std::map<int, std::vector<std::size_t>> by_degree;
    for (std::size_t i = 0; i < basis.size(); ++i) by_degree[deg_of(i)].push_back(i);

    TangentComplexResult res;
    for (const auto& [deg, idx] : by_degree) {
        auto pick = [&](int d) {
            auto it = by_degree.find(d);
            return it == by_degree.end() ? std::vector<std::size_t>{} : it->second;
        };
        std::vector<std::size_t> up = pick(deg + 1), dn = pick(deg - 1);
        QMatrix out(up.size(), idx.size());
        for (std::size_t i = 0; i < up.size(); ++i)
            for (std::size_t j = 0; j < idx.size(); ++j) out.at(i, j) = D.at(up[i], idx[j]);
        QMatrix in(idx.size(), dn.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < dn.size(); ++j) in.at(i, j) = D.at(idx[i], dn[j]);
        int h = static_cast<int>(idx.size() - out.rank() - in.rank());
        res.h_dim[deg] = h;
    }
    return res;
}

}  // namespace sympol
