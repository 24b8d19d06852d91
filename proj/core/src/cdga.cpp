#include "sympol/cdga.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

#include "sympol/linalg.hpp"

namespace sympol {

void Report::add(std::string what, std::string witness) {
    issues.push_back({std::move(what), std::move(witness)});
}

std::string Report::str() const {
    if (issues.empty()) return "ok";
    std::ostringstream os;
    for (const auto& i : issues) {
        os << "violation: " << i.what;
        if (!i.witness.empty()) os << " [witness: " << i.witness << "]";
        os << "\n";
    }
    return os.str();
}

bool FreeWCDGA::has_generator(Generator g) const {
    return std::find(gens.begin(), gens.end(), g) != gens.end();
}

std::optional<Generator> FreeWCDGA::find_generator(const std::string& name) const {
    for (Generator g : gens)
        if (g.name() == name) return g;
    return std::nullopt;
}

FreeWCDGA make_cdga(std::vector<Generator> gens,
                    std::vector<std::pair<Generator, Element>> images, Trunc trunc) {
    FreeWCDGA A;
    A.gens = std::move(gens);
    A.trunc = trunc;
    A.diff.degree_shift = 1;
    A.diff.weight_shift = 0;
    for (Generator g : A.gens) A.diff.set_image(g, Element::zero());
    for (auto& [g, e] : images) A.diff.set_image(g, e.truncated(trunc));
    return A;
}

Report validate(const FreeWCDGA& A) {
    Report rep;
    if (A.diff.degree_shift != 1)
        rep.add("differential must have cohomological degree +1");
    if (A.diff.weight_shift != 0)
        rep.add("differential must preserve weight");
    std::set<std::string> names;
    for (Generator g : A.gens) {
        if (g.kind() != GenKind::base)
            rep.add("algebra generator of non-base kind", g.debug_str());
        if (!names.insert(g.name()).second)
            rep.add("duplicate generator name", g.name());
        if (A.nonneg_chain && g.degree() > 0)
            rep.add("generator violates non-negative chain grading", g.debug_str());
    }
    for (Generator g : A.gens) {
        if (!A.diff.has_image(g)) {
            rep.add("missing differential image", g.debug_str());
            continue;
        }
        const Element& img = A.diff.image(g);
        if (img.is_zero()) continue;
        int d = 0, w = 0;
        if (!img.is_homogeneous(&d, &w)) {
            rep.add("differential image not homogeneous", g.name() + " -> " + img.str());
        } else {
            if (d != g.total_degree() + 1)
                rep.add("differential image has wrong degree",
                        g.name() + " -> " + img.str());
            if (w != g.weight())
                rep.add("differential does not preserve weight",
                        g.name() + " -> " + img.str());
        }
        if (A.trunc.max_order) {
            for (const auto& [m, c] : img.terms())
                if (m.order() == 0)
                    rep.add("differential image has constant term under order truncation",
                            g.name() + " -> " + img.str());
        }
    }
    if (!rep.ok()) return rep;
    for (Generator g : A.gens) {
        Element dd = A.d(A.d(Element::generator(g)));
        if (!dd.is_zero())
            rep.add("differential does not square to zero",
                    "delta^2(" + g.name() + ") = " + dd.str());
    }
    return rep;
}

namespace {

struct EnumState {
    const std::vector<Generator>* gens;
    const SliceSpec* spec;
    std::vector<RawFactor> current;
    std::vector<Monomial>* out;
};

void enumerate_rec(EnumState& st, std::size_t idx, int base_budget, int form_budget,
                   int xi_budget, int symbol_budget) {
    if (idx == st.gens->size()) {
        NormalizeResult n = normalize(st.current);
        if (n.odd_square) return;
        const Monomial& m = n.mono;
        if (m.total_degree() != st.spec->total_degree) return;
        if (m.weight() != st.spec->weight) return;
        if (st.spec->form_order && m.form_order() != *st.spec->form_order) return;
        if (st.spec->xi_order && m.xi_order() != *st.spec->xi_order) return;
        if (!m.passes(st.spec->trunc)) return;
        st.out->push_back(m);
        return;
    }
    Generator g = (*st.gens)[idx];
    int cap;
    switch (g.kind()) {
        case GenKind::base: cap = base_budget; break;
        case GenKind::form: cap = form_budget; break;
        case GenKind::tangent: cap = xi_budget; break;
        default: cap = 0;
    }
    cap = std::min(cap, symbol_budget);
    if (g.parity() == 1) cap = std::min(cap, 1);
    for (int e = 0; e <= cap; ++e) {
        if (e > 0) st.current.push_back({g, e});
        int bb = base_budget - (g.kind() == GenKind::base ? e : 0);
        int fb = form_budget - (g.kind() == GenKind::form ? e : 0);
        int xb = xi_budget - (g.kind() == GenKind::tangent ? e : 0);
        enumerate_rec(st, idx + 1, bb, fb, xb, symbol_budget - e);
        if (e > 0) st.current.pop_back();
    }
}

}  // namespace

std::vector<Monomial> enumerate_slice(const std::vector<Generator>& gens,
                                      const SliceSpec& spec) {
    bool even_base = false, even_form = false, even_xi = false;
    for (Generator g : gens) {
        if (g.parity() == 0) {
            if (g.kind() == GenKind::base) even_base = true;
            if (g.kind() == GenKind::form) even_form = true;
            if (g.kind() == GenKind::tangent) even_xi = true;
        }
    }
    int odd_count = 0;
    for (Generator g : gens)
        if (g.parity() == 1) ++odd_count;

    const Trunc& t = spec.trunc;
    int symbol_budget = t.max_symbol_order ? *t.max_symbol_order
                                           : std::numeric_limits<int>::max() / 4;
    bool symbol_capped = t.max_symbol_order.has_value();

    int base_budget;
    if (t.max_order) base_budget = *t.max_order;
    else if (symbol_capped) base_budget = symbol_budget;
    else if (!even_base) base_budget = odd_count;
    else throw NonFiniteError("enumerate_slice: even base generator without order bound");

    int form_budget;
    if (spec.form_order) form_budget = *spec.form_order;
    else if (t.max_form_order) form_budget = *t.max_form_order;
    else if (symbol_capped) form_budget = symbol_budget;
    else if (!even_form) form_budget = odd_count;
    else throw NonFiniteError("enumerate_slice: even form generator without form bound");

    int xi_budget;
    if (spec.xi_order) xi_budget = *spec.xi_order;
    else if (t.max_xi_order) xi_budget = *t.max_xi_order;
    else if (symbol_capped) xi_budget = symbol_budget;
    else if (!even_xi) xi_budget = odd_count;
    else throw NonFiniteError("enumerate_slice: even tangent generator without order bound");

    std::vector<Monomial> out;
    EnumState st{&gens, &spec, {}, &out};
    enumerate_rec(st, 0, base_budget, form_budget, xi_budget, symbol_budget);
    std::sort(out.begin(), out.end());
    return out;
}

GradedPiece graded_piece(const FreeWCDGA& A, int total_degree, int weight, int max_order) {
    GradedPiece piece;
    piece.total_degree = total_degree;
    piece.weight = weight;

    const FreeWCDGA* src = &A;
    bool quotient_boundary = false;
    if (A.postnikov_parent) {
        int chain = -total_degree;
        if (chain > A.postnikov_level) return piece;
        src = A.postnikov_parent.get();
        quotient_boundary = (chain == A.postnikov_level);
    }

    SliceSpec spec;
    spec.total_degree = total_degree;
    spec.weight = weight;
    spec.trunc = src->trunc;
    if (!spec.trunc.max_order || *spec.trunc.max_order > max_order)
        spec.trunc.max_order = max_order;
    std::vector<Monomial> basis = enumerate_slice(src->gens, spec);

    if (quotient_boundary) {
        // Degree-k piece of A/tau_{>k}: quotient by boundaries from chain k+1.
        SliceSpec above = spec;
        above.total_degree = total_degree - 1;
        std::vector<Monomial> src_basis = enumerate_slice(src->gens, above);
        std::map<Monomial, std::size_t> index;
        for (std::size_t i = 0; i < basis.size(); ++i) index[basis[i]] = i;
        QMatrix img(basis.size(), src_basis.size());
        for (std::size_t j = 0; j < src_basis.size(); ++j) {
            Element d = derivation_apply(src->diff, Element::monomial(src_basis[j]), &spec.trunc);
            for (const auto& [m, c] : d.terms()) {
                auto it = index.find(m);
                if (it != index.end()) img.at(it->second, j) = c;
            }
        }
        auto ech = img.transpose().echelon();
        // Coset representatives: monomials away from the boundary pivots.
        std::vector<bool> pivot(basis.size(), false);
        for (std::size_t c : ech.pivot_cols) pivot[c] = true;
        std::vector<Monomial> reps;
        for (std::size_t i = 0; i < basis.size(); ++i)
            if (!pivot[i]) reps.push_back(basis[i]);
        piece.basis = std::move(reps);
        piece.dimension = piece.basis.size();
        return piece;
    }

    piece.basis = std::move(basis);
    piece.dimension = piece.basis.size();
    return piece;
}

namespace {

/// One application of the differential raises the polynomial order by at
/// most this much.
int image_order_growth(const FreeWCDGA& A) {
    int growth = 0;
    for (Generator g : A.gens) {
        if (!A.diff.has_image(g)) continue;
        for (const auto& [m, c] : A.diff.image(g).terms())
            growth = std::max(growth, m.order() - 1);
    }
    return growth;
}

}  // namespace

HomologySlice homology(const FreeWCDGA& A, int total_degree, int weight, int max_order,
                       int order_ceiling) {
    (void)order_ceiling;
    if (A.postnikov_parent) {
        int chain = -total_degree;
        HomologySlice zero{total_degree, weight, 0, {}, max_order};
        if (chain > A.postnikov_level) return zero;
        return homology(*A.postnikov_parent, total_degree, weight, max_order, order_ceiling);
    }

    const int z = total_degree;
    const int w = weight;
    const int pad = image_order_growth(A);
    const int padded = max_order + pad;
    if (A.trunc.max_order && padded > *A.trunc.max_order)
        throw UnstableTruncationError(
            "homology: padding to order " + std::to_string(padded) +
            " cannot be satisfied inside the algebra's order bound");

    Trunc window = A.trunc;
    window.max_order = max_order;
    Trunc padded_t = A.trunc;
    padded_t.max_order = padded;

    SliceSpec here{z, w, std::nullopt, std::nullopt, window};
    SliceSpec here_padded{z, w, std::nullopt, std::nullopt, padded_t};
    SliceSpec above{z + 1, w, std::nullopt, std::nullopt, padded_t};
    SliceSpec below{z - 1, w, std::nullopt, std::nullopt, window};

    std::vector<Monomial> Bz = enumerate_slice(A.gens, here);
    std::vector<Monomial> Bzp = enumerate_slice(A.gens, here_padded);
    std::vector<Monomial> Bup = enumerate_slice(A.gens, above);
    std::vector<Monomial> Bdn = enumerate_slice(A.gens, below);

    std::map<Monomial, std::size_t> up_index, zp_index;
    for (std::size_t i = 0; i < Bup.size(); ++i) up_index[Bup[i]] = i;
    for (std::size_t i = 0; i < Bzp.size(); ++i) zp_index[Bzp[i]] = i;

    // Cycles: exact kernel of the (padded) differential on the window slice.
    QMatrix out(Bup.size(), Bz.size());
    for (std::size_t j = 0; j < Bz.size(); ++j) {
        Element d = derivation_apply(A.diff, Element::monomial(Bz[j]), &padded_t);
        for (const auto& [m, c] : d.terms()) {
            auto it = up_index.find(m);
            if (it == up_index.end())
                throw std::logic_error("homology: differential left the padded slice");
            out.at(it->second, j) = c;
        }
    }
    std::vector<QVector> cycles = out.kernel_basis();

    // Boundaries from the window slice below, kept only when they land
    // inside the window.
    QMatrix bmat(Bzp.size(), Bdn.size());
    for (std::size_t j = 0; j < Bdn.size(); ++j) {
        Element d = derivation_apply(A.diff, Element::monomial(Bdn[j]), &padded_t);
        for (const auto& [m, c] : d.terms()) {
            auto it = zp_index.find(m);
            if (it == zp_index.end())
                throw std::logic_error("homology: differential left the padded slice");
            bmat.at(it->second, j) = c;
        }
    }
    // Sources whose boundary stays inside the window: kernel of the
    // outside-window rows.
    std::vector<std::size_t> outside_rows;
    std::map<Monomial, std::size_t> window_index;
    for (std::size_t i = 0; i < Bz.size(); ++i) window_index[Bz[i]] = i;
    for (std::size_t i = 0; i < Bzp.size(); ++i)
        if (!window_index.count(Bzp[i])) outside_rows.push_back(i);
    QMatrix outside(outside_rows.size(), Bdn.size());
    for (std::size_t i = 0; i < outside_rows.size(); ++i)
        for (std::size_t j = 0; j < Bdn.size(); ++j)
            outside.at(i, j) = bmat.at(outside_rows[i], j);
    std::vector<QVector> in_window_sources = outside.kernel_basis();

    // Row space of the in-window boundaries over the window basis.
    QMatrix boundary_rows(in_window_sources.size(), Bz.size());
    for (std::size_t r = 0; r < in_window_sources.size(); ++r) {
        QVector img = bmat.apply(in_window_sources[r]);
        for (std::size_t i = 0; i < Bzp.size(); ++i) {
            if (img[i].is_zero()) continue;
            auto it = window_index.find(Bzp[i]);
            if (it == window_index.end())
                throw std::logic_error("homology: in-window boundary escaped the window");
            boundary_rows.at(r, it->second) = img[i];
        }
    }
    std::size_t boundary_rank = boundary_rows.rank();

    HomologySlice h;
    h.total_degree = z;
    h.weight = w;
    h.order_used = padded;
    h.dimension = static_cast<int>(cycles.size() - boundary_rank);

    QMatrix grow = boundary_rows;
    std::size_t grow_rank = boundary_rank;
    for (const QVector& cyc : cycles) {
        QMatrix cand(grow.rows() + 1, Bz.size());
        for (std::size_t i = 0; i < grow.rows(); ++i)
            for (std::size_t j = 0; j < Bz.size(); ++j) cand.at(i, j) = grow.at(i, j);
        for (std::size_t j = 0; j < Bz.size(); ++j) cand.at(grow.rows(), j) = cyc[j];
        std::size_t cand_rank = cand.rank();
        if (cand_rank > grow_rank) {
            Element rep;
            for (std::size_t j = 0; j < Bz.size(); ++j)
                if (!cyc[j].is_zero()) rep.add_term(Bz[j], cyc[j]);
            h.representatives.push_back(rep);
            grow = cand;
            grow_rank = cand_rank;
        }
    }
    return h;
}

const Element* CdgaMap::image(Generator g) const {
    auto it = images.find(g.id());
    return it == images.end() ? nullptr : &it->second;
}

Element map_apply(const CdgaMap& f, const Element& e, const Trunc* trunc) {
    Element out;
    for (const auto& [m, c] : e.terms()) {
        Element term = Element::scalar(c);
        for (const auto& [g, exp] : m.factors()) {
            const Element* img = f.image(g);
            Element factor = img ? *img : Element::generator(g);
            for (int k = 0; k < exp; ++k) term = mul(term, factor, trunc);
        }
        out += term;
    }
    if (trunc) out = out.truncated(*trunc);
    return out;
}

Report validate_map(const FreeWCDGA& A, const FreeWCDGA& B, const CdgaMap& f) {
    Report rep;
    for (Generator g : A.gens) {
        const Element* img = f.image(g);
        if (!img) {
            rep.add("map missing image", g.debug_str());
            continue;
        }
        if (!img->is_zero()) {
            int d = 0, w = 0;
            if (!img->is_homogeneous(&d, &w) || d != g.total_degree() || w != g.weight())
                rep.add("map image not degree/weight homogeneous",
                        g.name() + " -> " + img->str());
        }
    }
    if (!rep.ok()) return rep;
    for (Generator g : A.gens) {
        Element lhs = map_apply(f, A.d(Element::generator(g)), &B.trunc);
        Element rhs = derivation_apply(B.diff, *f.image(g), &B.trunc);
        if (lhs != rhs)
            rep.add("map does not commute with differentials",
                    g.name() + ": f(delta a) = " + lhs.str() + " vs delta f(a) = " + rhs.str());
    }
    return rep;
}

std::pair<FreeWCDGA, CdgaMap> weight_truncate(const FreeWCDGA& A, int r, int s) {
    if (r > 0 || s < 0) throw std::invalid_argument("weight_truncate: window must contain 0");
    FreeWCDGA Q = A;
    int lo = r, hi = s;
    if (Q.trunc.weight_window) {
        lo = std::max(lo, Q.trunc.weight_window->first);
        hi = std::min(hi, Q.trunc.weight_window->second);
    }
    Q.trunc.weight_window = {lo, hi};
    for (Generator g : Q.gens)
        Q.diff.set_image(g, A.diff.image(g).truncated(Q.trunc));
    CdgaMap f;
    for (Generator g : A.gens)
        f.set_image(g, Element::generator(g).truncated(Q.trunc));
    return {Q, f};
}

FreeWCDGA postnikov_truncate(const FreeWCDGA& A, int k) {
    if (k < 0) throw std::invalid_argument("postnikov_truncate: k must be >= 0");
    for (Generator g : A.gens)
        if (g.degree() > 0)
            throw std::invalid_argument(
                "postnikov_truncate: algebra must be non-negatively chain graded");
    FreeWCDGA Q = A;
    Q.trunc.min_total_degree = -k;
    for (Generator g : Q.gens)
        Q.diff.set_image(g, A.diff.image(g).truncated(Q.trunc));
    Q.postnikov_parent = std::make_shared<FreeWCDGA>(A);
    Q.postnikov_level = k;
    return Q;
}

Resolution quasi_free_resolution(const Presentation& target, int up_to_chain_degree) {
    Report base_ok = validate(target.base);
    if (!base_ok.ok())
        throw std::invalid_argument("quasi_free_resolution: invalid base algebra:\n" +
                                    base_ok.str());
    if (!target.base.trunc.max_order)
        throw NonFiniteError("quasi_free_resolution: base algebra needs an order bound");

    Resolution res;
    res.algebra = target.base;
    FreeWCDGA& C = res.algebra;

    // Stage 0: one generator per relation.
    std::vector<Generator> stage0;
    int rel_idx = 0;
    for (const Element& r : target.relations) {
        ++rel_idx;
        int d = 0, w = 0;
        if (r.is_zero() || !r.is_homogeneous(&d, &w))
            throw std::invalid_argument("quasi_free_resolution: relation not homogeneous");
        if (!C.d(r).is_zero())
            throw std::invalid_argument("quasi_free_resolution: relation not a cycle: " +
                                        r.str());
        Generator y = Generator::make(GenKind::base, "res1_" + std::to_string(rel_idx),
                                      d - 1, w);
        C.gens.push_back(y);
        C.diff.set_image(y, r.truncated(C.trunc));
        stage0.push_back(y);
    }
    if (!stage0.empty()) res.stages.emplace_back(1, stage0);

    const int cap = *C.trunc.max_order;

    // Homology with the window raised until two consecutive answers agree.
    auto stable_homology = [&](int z, int w) {
        int growth = 0;
        for (Generator g : C.gens)
            for (const auto& [m, c] : C.diff.image(g).terms())
                growth = std::max(growth, m.order() - 1);
        int top_window = cap - growth;
        if (top_window < 2)
            throw NonFiniteError("quasi_free_resolution: order bound too small for padding");
        std::optional<HomologySlice> prev;
        for (int window = 2; window <= top_window; ++window) {
            HomologySlice h = homology(C, z, w, window);
            if (prev && prev->dimension == h.dimension) return h;
            prev = h;
        }
        throw NonFiniteError(
            "quasi_free_resolution: homology slice did not stabilise under order padding");
    };

    for (int n = 1; n <= up_to_chain_degree; ++n) {
        // Weights reachable at this order; homology is computed per weight.
        std::set<int> weights;
        {
            std::function<void(std::size_t, int, int)> scan = [&](std::size_t idx, int budget,
                                                                  int w) {
                if (idx == C.gens.size()) {
                    weights.insert(w);
                    return;
                }
                Generator g = C.gens[idx];
                int gcap = g.parity() == 1 ? 1 : budget;
                for (int e = 0; e <= gcap; ++e)
                    scan(idx + 1, budget - e, w + e * g.weight());
            };
            scan(0, cap, 0);
        }
        std::vector<Generator> stage;
        int gen_idx = 0;
        for (int w : weights) {
            HomologySlice h = stable_homology(-n, w);
            for (const Element& rep : h.representatives) {
                ++gen_idx;
                Generator u = Generator::make(
                    GenKind::base,
                    "res" + std::to_string(n + 1) + "_" + std::to_string(gen_idx), -n - 1, w);
                C.gens.push_back(u);
                C.diff.set_image(u, rep.truncated(C.trunc));
                stage.push_back(u);
            }
        }
        if (!stage.empty()) res.stages.emplace_back(n + 1, stage);
    }

    for (Generator g : target.base.gens) res.map.set_image(g, Element::generator(g));
    for (const auto& [deg, gens] : res.stages)
        for (Generator g : gens) res.map.set_image(g, Element::zero());
    return res;
}

}  // namespace sympol
