#include "sympol/derivation.hpp"

namespace sympol {

const Element& Derivation::image(Generator g) const {
    auto it = images.find(g.id());
    if (it == images.end()) throw MissingImageError(g);
    return it->second;
}

Element derivation_apply(const Derivation& D, const Element& a, const Trunc* trunc) {
    Element result;
    const int pd = D.parity();
    for (const auto& [mono, coeff] : a.terms()) {
        const auto& fs = mono.factors();
        int prefix_parity = 0;
        for (std::size_t i = 0; i < fs.size(); ++i) {
            const auto& [g, e] = fs[i];
            const Element& img = D.image(g);
            if (!img.is_zero()) {
                // D(g^e) = e g^{e-1} D(g); odd generators have e == 1.
                Element prefix = Element::scalar(coeff);
                for (std::size_t j = 0; j < i; ++j)
                    prefix = mul(prefix, Element::generator(fs[j].first, fs[j].second), trunc);
                Element mid = mul(Element::scalar(Scalar(e)),
                                  mul(Element::generator(g, e - 1), img, trunc), trunc);
                Element term = mul(prefix, mid, trunc);
                for (std::size_t j = i + 1; j < fs.size(); ++j)
                    term = mul(term, Element::generator(fs[j].first, fs[j].second), trunc);
                if ((pd & (prefix_parity & 1)) != 0) term = -term;
                result += term;
            }
            prefix_parity += e * g.parity();
        }
    }
    if (trunc) result = result.truncated(*trunc);
    return result;
}

Derivation derivation_commutator(const Derivation& D, const Derivation& E,
                                 const std::vector<Generator>& gens, const Trunc* trunc) {
    Derivation C;
    C.degree_shift = D.degree_shift + E.degree_shift;
    C.weight_shift = D.weight_shift + E.weight_shift;
    const bool flip = (D.parity() & E.parity()) != 0;
    for (Generator g : gens) {
        Element de = derivation_apply(D, E.image(g), trunc);
        Element ed = derivation_apply(E, D.image(g), trunc);
        C.set_image(g, flip ? de + ed : de - ed);
    }
    return C;
}

}  // namespace sympol
