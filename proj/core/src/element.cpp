#include "sympol/element.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace sympol {

int Monomial::degree() const {
    int d = 0;
    for (const auto& [g, e] : factors_) d += e * g.degree();
    return d;
}

int Monomial::total_degree() const {
    int d = 0;
    for (const auto& [g, e] : factors_) d += e * g.total_degree();
    return d;
}

int Monomial::weight() const {
    int w = 0;
    for (const auto& [g, e] : factors_) w += e * g.weight();
    return w;
}

int Monomial::order() const {
    int n = 0;
    for (const auto& [g, e] : factors_)
        if (g.kind() == GenKind::base) n += e;
    return n;
}

int Monomial::form_order() const {
    int n = 0;
    for (const auto& [g, e] : factors_)
        if (g.kind() == GenKind::form) n += e;
    return n;
}

int Monomial::xi_order() const {
    int n = 0;
    for (const auto& [g, e] : factors_)
        if (g.kind() == GenKind::tangent) n += e;
    return n;
}

int Monomial::symbol_order() const {
    int n = 0;
    for (const auto& [g, e] : factors_) n += e;
    return n;
}

int Monomial::positive_weight() const {
    int w = 0;
    for (const auto& [g, e] : factors_)
        if (g.weight() > 0) w += e * g.weight();
    return w;
}

int Monomial::negative_weight() const {
    int w = 0;
    for (const auto& [g, e] : factors_)
        if (g.weight() < 0) w += e * g.weight();
    return w;
}

int Monomial::nonzero_weight_units() const {
    int n = 0;
    for (const auto& [g, e] : factors_)
        if (g.weight() != 0) n += e;
    return n;
}

int Monomial::exponent_of(Generator g) const {
    for (const auto& [h, e] : factors_)
        if (h == g) return e;
    return 0;
}

bool Monomial::passes(const Trunc& t) const {
    if (t.max_order && order() > *t.max_order) return false;
    if (t.max_symbol_order && symbol_order() > *t.max_symbol_order) return false;
    if (t.weight_window) {
        if (positive_weight() > t.weight_window->second) return false;
        if (negative_weight() < t.weight_window->first) return false;
    }
    if (t.max_form_order && form_order() > *t.max_form_order) return false;
    if (t.max_xi_order && xi_order() > *t.max_xi_order) return false;
    if (t.min_total_degree && total_degree() < *t.min_total_degree) return false;
    if (t.max_total_degree && total_degree() > *t.max_total_degree) return false;
    return true;
}

bool operator<(const Monomial& a, const Monomial& b) {
    int ta = 0, tb = 0;
    for (const auto& [g, e] : a.factors_) ta += e;
    for (const auto& [g, e] : b.factors_) tb += e;
    if (ta != tb) return ta < tb;
    auto ia = a.factors_.begin(), ib = b.factors_.begin();
    for (; ia != a.factors_.end() && ib != b.factors_.end(); ++ia, ++ib) {
        if (ia->first != ib->first) return Generator::order_less(ia->first, ib->first);
        if (ia->second != ib->second) return ia->second > ib->second;
    }
    return ia == a.factors_.end() && ib != b.factors_.end();
}

std::string Monomial::str() const {
    if (factors_.empty()) return "1";
    std::ostringstream os;
    bool first = true;
    for (const auto& [g, e] : factors_) {
        if (!first) os << " ";
        first = false;
        switch (g.kind()) {
            case GenKind::base: os << g.name(); break;
            case GenKind::form: os << "d(" << g.name() << ")"; break;
            case GenKind::tangent: os << "xi(" << g.name() << ")"; break;
        }
        if (e != 1) os << "^" << e;
    }
    return os.str();
}

NormalizeResult normalize(std::vector<RawFactor> raw) {
    NormalizeResult res;
    std::vector<std::pair<Generator, int>> fs;
    fs.reserve(raw.size());
    for (const RawFactor& f : raw) {
        if (f.exp < 0) throw std::invalid_argument("normalize: negative exponent");
        if (f.exp == 0) continue;
        fs.emplace_back(f.gen, f.exp);
    }
    // Insertion sort counting odd-odd transpositions.
    for (std::size_t i = 1; i < fs.size(); ++i) {
        std::size_t j = i;
        while (j > 0 && Generator::order_less(fs[j].first, fs[j - 1].first)) {
            int pa = (fs[j - 1].first.parity() * fs[j - 1].second) & 1;
            int pb = (fs[j].first.parity() * fs[j].second) & 1;
            if (pa & pb) res.sign = -res.sign;
            std::swap(fs[j - 1], fs[j]);
            --j;
        }
    }
    // Merge equal generators; odd squares vanish.
    std::vector<std::pair<Generator, int>> merged;
    for (const auto& [g, e] : fs) {
        if (!merged.empty() && merged.back().first == g) {
            merged.back().second += e;
        } else {
            merged.emplace_back(g, e);
        }
    }
    for (const auto& [g, e] : merged) {
        if (g.parity() == 1 && e > 1) {
            res.odd_square = true;
            res.sign = 1;
            res.mono = Monomial();
            return res;
        }
    }
    res.mono.factors_ = std::move(merged);
    return res;
}

Element Element::scalar(Scalar s) {
    Element e;
    if (!s.is_zero()) e.terms_.emplace(Monomial(), std::move(s));
    return e;
}

Element Element::generator(Generator g, int exp) {
    NormalizeResult n = normalize({RawFactor{g, exp}});
    Element e;
    if (!n.odd_square) e.terms_.emplace(n.mono, Scalar(n.sign));
    return e;
}

Element Element::monomial(Monomial m, Scalar coeff) {
    Element e;
    if (!coeff.is_zero()) e.terms_.emplace(std::move(m), std::move(coeff));
    return e;
}

void Element::add_term(const Monomial& m, const Scalar& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(m, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Element Element::operator-() const {
    Element r;
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
}

Element& Element::operator+=(const Element& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

Element& Element::operator-=(const Element& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

Element operator*(const Scalar& s, Element e) {
    if (s.is_zero()) return Element();
    for (auto& [m, c] : e.terms_) c *= s;
    return e;
}

Scalar Element::coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Scalar(0) : it->second;
}

Scalar Element::augmentation() const {
    Scalar s(0);
    for (const auto& [m, c] : terms_)
        if (m.order() == 0 && m.form_order() == 0 && m.xi_order() == 0) s += c;
    return s;
}

bool Element::is_homogeneous(int* total_degree, int* weight) const {
    bool first = true;
    int d = 0, w = 0;
    for (const auto& [m, c] : terms_) {
        if (first) {
            d = m.total_degree();
            w = m.weight();
            first = false;
        } else if (m.total_degree() != d || m.weight() != w) {
            return false;
        }
    }
    if (total_degree) *total_degree = d;
    if (weight) *weight = w;
    return true;
}

Element Element::filtered(const std::function<bool(const Monomial&)>& pred) const {
    Element r;
    for (const auto& [m, c] : terms_)
        if (pred(m)) r.terms_.emplace(m, c);
    return r;
}

Element Element::truncated(const Trunc& t) const {
    if (t.unrestricted()) return *this;
    return filtered([&t](const Monomial& m) { return m.passes(t); });
}

Element Element::homogeneous_part(int total_degree, int weight) const {
    return filtered([&](const Monomial& m) {
        return m.total_degree() == total_degree && m.weight() == weight;
    });
}

Element Element::form_part(int p) const {
    return filtered([&](const Monomial& m) { return m.form_order() == p; });
}

Element Element::xi_part(int k) const {
    return filtered([&](const Monomial& m) { return m.xi_order() == k; });
}

std::optional<int> Element::min_xi_order() const {
    std::optional<int> r;
    for (const auto& [m, c] : terms_) {
        int k = m.xi_order();
        if (!r || k < *r) r = k;
    }
    return r;
}

std::optional<int> Element::max_xi_order() const {
    std::optional<int> r;
    for (const auto& [m, c] : terms_) {
        int k = m.xi_order();
        if (!r || k > *r) r = k;
    }
    return r;
}

std::optional<int> Element::max_form_order() const {
    std::optional<int> r;
    for (const auto& [m, c] : terms_) {
        int k = m.form_order();
        if (!r || k > *r) r = k;
    }
    return r;
}

std::string Element::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        if (first) {
            if (c.sign() < 0) os << "- ";
        } else {
            os << (c.sign() < 0 ? " - " : " + ");
        }
        first = false;
        Scalar a = abs(c);
        if (m.is_unit()) {
            os << a.str();
        } else if (a.is_one()) {
            os << m.str();
        } else {
            os << a.str() << " " << m.str();
        }
    }
    return os.str();
}

Element mul(const Element& a, const Element& b, const Trunc* trunc) {
    Element r;
    for (const auto& [ma, ca] : a.terms()) {
        for (const auto& [mb, cb] : b.terms()) {
            std::vector<RawFactor> raw;
            raw.reserve(ma.factors().size() + mb.factors().size());
            for (const auto& [g, e] : ma.factors()) raw.push_back({g, e});
            for (const auto& [g, e] : mb.factors()) raw.push_back({g, e});
            NormalizeResult n = normalize(std::move(raw));
            if (n.odd_square) continue;
            if (trunc && !n.mono.passes(*trunc)) continue;
            Scalar c = ca * cb;
            if (n.sign < 0) c = -c;
            r.add_term(n.mono, c);
        }
    }
    return r;
}

Element mul(const Element& a, const Element& b, const Trunc& trunc) {
    return mul(a, b, &trunc);
}

}  // namespace sympol
