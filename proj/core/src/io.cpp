#include "sympol/io.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>

namespace sympol {

namespace {

// ---------------------------------------------------------------------------
// Tokenizer
// ---------------------------------------------------------------------------

struct Token {
    enum Kind { Ident, Int, Str, Punct, End } kind = End;
    std::string text;
    int line = 1, col = 1;
};

class Lexer {
  public:
    explicit Lexer(const std::string& text) : s_(text) { advance(); }

    const Token& peek() const { return tok_; }
    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

  private:
    void advance() {
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (c == '#') {
                while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
            } else if (c == '\n') {
                ++pos_;
                ++line_;
                col_ = 1;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
                ++col_;
            } else {
                break;
            }
        }
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= s_.size()) {
            tok_.kind = Token::End;
            tok_.text.clear();
            return;
        }
        char c = s_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size()) {
                char d = s_[pos_];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '_') {
                    ++pos_;
                    ++col_;
                } else if ((d == '-' || d == '.') && pos_ + 1 < s_.size() &&
                           (std::isalnum(static_cast<unsigned char>(s_[pos_ + 1])) ||
                            s_[pos_ + 1] == '_')) {
                    pos_ += 1;
                    col_ += 1;
                } else {
                    break;
                }
            }
            tok_.kind = Token::Ident;
            tok_.text = s_.substr(start, pos_ - start);
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                ++pos_;
                ++col_;
            }
            tok_.kind = Token::Int;
            tok_.text = s_.substr(start, pos_ - start);
            return;
        }
        if (c == '"') {
            ++pos_;
            ++col_;
            std::string out;
            while (pos_ < s_.size() && s_[pos_] != '"') {
                char d = s_[pos_];
                if (d == '\\' && pos_ + 1 < s_.size()) {
                    ++pos_;
                    ++col_;
                    d = s_[pos_];
                }
                if (d == '\n') throw ParseError(line_, col_, "unterminated string");
                out.push_back(d);
                ++pos_;
                ++col_;
            }
            if (pos_ >= s_.size()) throw ParseError(line_, col_, "unterminated string");
            ++pos_;
            ++col_;
            tok_.kind = Token::Str;
            tok_.text = out;
            return;
        }
        tok_.kind = Token::Punct;
        tok_.text = std::string(1, c);
        ++pos_;
        ++col_;
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

[[noreturn]] void fail(const Token& t, const std::string& what) {
    throw ParseError(t.line, t.col, what);
}

std::string expect_ident(Lexer& lx, const std::string& what) {
    Token t = lx.next();
    if (t.kind != Token::Ident) fail(t, "expected " + what);
    return t.text;
}

void expect_punct(Lexer& lx, char c) {
    Token t = lx.next();
    if (t.kind != Token::Punct || t.text[0] != c)
        fail(t, std::string("expected '") + c + "'");
}

long expect_int(Lexer& lx) {
    bool neg = false;
    Token t = lx.next();
    if (t.kind == Token::Punct && t.text == "-") {
        neg = true;
        t = lx.next();
    }
    if (t.kind != Token::Int) fail(t, "expected integer");
    long v = std::stol(t.text);
    return neg ? -v : v;
}

Scalar expect_scalar(Lexer& lx) {
    long num = expect_int(lx);
    if (lx.peek().kind == Token::Punct && lx.peek().text == "/") {
        lx.next();
        Token t = lx.next();
        if (t.kind != Token::Int) fail(t, "expected denominator");
        return Scalar(num, std::stol(t.text));
    }
    return Scalar(num);
}

// Resolves (kind, name) factor references inside element expressions.
using GenResolver = std::function<std::optional<Generator>(GenKind, const std::string&)>;

Element parse_element(Lexer& lx, const GenResolver& resolve) {
    Element out;
    bool first = true;
    while (true) {
        const Token& p = lx.peek();
        if (p.kind == Token::Punct && p.text == "}") break;
        int sign = 1;
        if (p.kind == Token::Punct && (p.text == "+" || p.text == "-")) {
            sign = p.text == "-" ? -1 : 1;
            lx.next();
        } else if (!first) {
            fail(p, "expected '+' or '-' between terms");
        }
        first = false;
        // term: [scalar] factor*
        Scalar coeff(1);
        bool have_any = false;
        if (lx.peek().kind == Token::Int) {
            coeff = expect_scalar(lx);
            have_any = true;
        }
        std::vector<RawFactor> factors;
        while (lx.peek().kind == Token::Ident) {
            Token name = lx.next();
            GenKind kind = GenKind::base;
            std::string gname = name.text;
            if ((name.text == "d" || name.text == "xi") && lx.peek().kind == Token::Punct &&
                lx.peek().text == "(") {
                lx.next();
                gname = expect_ident(lx, "generator name");
                expect_punct(lx, ')');
                kind = name.text == "d" ? GenKind::form : GenKind::tangent;
            }
            int exp = 1;
            if (lx.peek().kind == Token::Punct && lx.peek().text == "^") {
                lx.next();
                Token e = lx.next();
                if (e.kind != Token::Int) fail(e, "expected exponent");
                exp = std::stoi(e.text);
            }
            std::optional<Generator> g = resolve(kind, gname);
            if (!g) fail(name, "unknown generator '" + gname + "'");
            factors.push_back({*g, exp});
            have_any = true;
        }
        if (!have_any) fail(lx.peek(), "expected term");
        if (sign < 0) coeff = -coeff;
        NormalizeResult n = normalize(std::move(factors));
        if (n.odd_square) continue;
        if (n.sign < 0) coeff = -coeff;
        out.add_term(n.mono, coeff);
    }
    return out;
}

Element parse_braced_element(Lexer& lx, const GenResolver& resolve) {
    expect_punct(lx, '{');
    Element e = parse_element(lx, resolve);
    expect_punct(lx, '}');
    return e;
}

// ---------------------------------------------------------------------------
// Record parsing
// ---------------------------------------------------------------------------

struct Parser {
    Lexer lx;
    Document doc;

    explicit Parser(const std::string& text) : lx(text) {}

    GenResolver algebra_resolver(const AlgebraRecord& rec, std::optional<int> n = std::nullopt,
                                 std::optional<int> m = std::nullopt) const {
        const FreeWCDGA* A = &rec.algebra;
        return [A, n, m](GenKind kind, const std::string& name) -> std::optional<Generator> {
            for (Generator g : A->gens) {
                if (g.name() != name) continue;
                switch (kind) {
                    case GenKind::base: return g;
                    case GenKind::form: return form_generator(g);
                    case GenKind::tangent:
                        if (!n || !m) return std::nullopt;
                        return Generator::make(GenKind::tangent, g.name(), *n + 1 - g.degree(),
                                               *m - g.weight());
                }
            }
            return std::nullopt;
        };
    }

    const AlgebraRecord& algebra_ref(const Token& at, const std::string& id) const {
        const AlgebraRecord* rec = doc.find_as<AlgebraRecord>(id);
        if (!rec) throw DanglingReferenceError(id);
        (void)at;
        return *rec;
    }

    void parse_algebra() {
        AlgebraRecord rec;
        rec.id = expect_ident(lx, "record id");
        rec.algebra.diff.degree_shift = 1;
        expect_punct(lx, '{');
        while (true) {
            Token t = lx.next();
            if (t.kind == Token::Punct && t.text == "}") break;
            if (t.kind != Token::Ident) fail(t, "expected field");
            if (t.text == "max-order") {
                rec.algebra.trunc.max_order = static_cast<int>(expect_int(lx));
            } else if (t.text == "weight-window") {
                int lo = static_cast<int>(expect_int(lx));
                expect_punct(lx, ':');
                int hi = static_cast<int>(expect_int(lx));
                rec.algebra.trunc.weight_window = {lo, hi};
            } else if (t.text == "max-form-order") {
                rec.algebra.trunc.max_form_order = static_cast<int>(expect_int(lx));
            } else if (t.text == "degree-window") {
                int lo = static_cast<int>(expect_int(lx));
                expect_punct(lx, ':');
                int hi = static_cast<int>(expect_int(lx));
                rec.algebra.trunc.min_total_degree = lo;
                rec.algebra.trunc.max_total_degree = hi;
            } else if (t.text == "nonneg-chain") {
                rec.algebra.nonneg_chain = true;
            } else if (t.text == "postnikov-of") {
                std::string parent = expect_ident(lx, "parent algebra id");
                int level = static_cast<int>(expect_int(lx));
                const AlgebraRecord& prec = algebra_ref(t, parent);
                rec.algebra.postnikov_parent = std::make_shared<FreeWCDGA>(prec.algebra);
                rec.algebra.postnikov_level = level;
                rec.algebra.trunc.min_total_degree = -level;
            } else if (t.text == "generator") {
                std::string name = expect_ident(lx, "generator name");
                Token kw = lx.next();
                if (kw.kind != Token::Ident || kw.text != "degree") fail(kw, "expected 'degree'");
                int z = static_cast<int>(expect_int(lx));
                kw = lx.next();
                if (kw.kind != Token::Ident || kw.text != "weight") fail(kw, "expected 'weight'");
                int w = static_cast<int>(expect_int(lx));
                Generator g = Generator::make(GenKind::base, name, z, w);
                rec.algebra.gens.push_back(g);
                rec.algebra.diff.set_image(g, Element::zero());
            } else if (t.text == "diff") {
                std::string name = expect_ident(lx, "generator name");
                GenResolver r = algebra_resolver(rec);
                auto g = r(GenKind::base, name);
                if (!g) fail(t, "diff for unknown generator '" + name + "'");
                Element e = parse_braced_element(lx, r);
                rec.algebra.diff.set_image(*g, e.truncated(rec.algebra.trunc));
            } else if (t.text == "relation") {
                GenResolver r = algebra_resolver(rec);
                rec.relations.push_back(
                    parse_braced_element(lx, r).truncated(rec.algebra.trunc));
            } else {
                throw UnknownFieldError(t.line, t.col, t.text);
            }
        }
        doc.entities.push_back(std::move(rec));
    }

    void parse_dgla() {
        DglaRecord rec;
        rec.id = expect_ident(lx, "record id");
        expect_punct(lx, '{');
        struct DiffField {
            std::string name;
            std::map<std::string, Scalar> combo;
        };
        std::vector<DiffField> diffs;
        struct BracketField {
            std::string a, b;
            std::map<std::string, Scalar> combo;
        };
        std::vector<BracketField> brackets;

        auto parse_combo = [&]() {
            std::map<std::string, Scalar> combo;
            expect_punct(lx, '{');
            bool first = true;
            while (!(lx.peek().kind == Token::Punct && lx.peek().text == "}")) {
                int sign = 1;
                if (lx.peek().kind == Token::Punct &&
                    (lx.peek().text == "+" || lx.peek().text == "-")) {
                    sign = lx.peek().text == "-" ? -1 : 1;
                    lx.next();
                } else if (!first) {
                    fail(lx.peek(), "expected '+' or '-'");
                }
                first = false;
                Scalar c(1);
                if (lx.peek().kind == Token::Int) c = expect_scalar(lx);
                if (lx.peek().kind == Token::Ident) {
                    std::string name = expect_ident(lx, "basis name");
                    Scalar v = sign < 0 ? -c : c;
                    auto it = combo.find(name);
                    if (it == combo.end()) combo.emplace(name, v);
                    else it->second += v;
                } else if (!c.is_zero()) {
                    // constant term only valid as literal zero
                    if (!(c.is_zero() || (c.is_integer() && c.str() == "0")))
                        fail(lx.peek(), "expected basis name");
                }
            }
            lx.next();
            return combo;
        };

        while (true) {
            Token t = lx.next();
            if (t.kind == Token::Punct && t.text == "}") break;
            if (t.kind != Token::Ident) fail(t, "expected field");
            if (t.text == "basis") {
                DGLABasisElement b;
                b.name = expect_ident(lx, "basis name");
                Token kw = lx.next();
                if (kw.kind != Token::Ident || kw.text != "degree") fail(kw, "expected 'degree'");
                b.degree = static_cast<int>(expect_int(lx));
                kw = lx.next();
                if (kw.kind != Token::Ident || kw.text != "weight") fail(kw, "expected 'weight'");
                b.weight = static_cast<int>(expect_int(lx));
                rec.dgla.basis.push_back(b);
            } else if (t.text == "diff") {
                DiffField f;
                f.name = expect_ident(lx, "basis name");
                f.combo = parse_combo();
                diffs.push_back(std::move(f));
            } else if (t.text == "bracket") {
                BracketField f;
                f.a = expect_ident(lx, "basis name");
                f.b = expect_ident(lx, "basis name");
                f.combo = parse_combo();
                brackets.push_back(std::move(f));
            } else {
                throw UnknownFieldError(t.line, t.col, t.text);
            }
        }
        const std::size_t n = rec.dgla.basis.size();
        rec.dgla.diff = QMatrix(n, n);
        auto idx = [&](const std::string& name) {
            auto i = rec.dgla.index_of(name);
            if (!i) throw DanglingReferenceError(name);
            return *i;
        };
        for (const auto& f : diffs) {
            int j = idx(f.name);
            for (const auto& [name, c] : f.combo) rec.dgla.diff.at(idx(name), j) = c;
        }
        for (const auto& f : brackets) {
            QVector v(n, Scalar(0));
            for (const auto& [name, c] : f.combo) v[idx(name)] = c;
            rec.dgla.set_bracket_sym(idx(f.a), idx(f.b), v);
        }
        doc.entities.push_back(std::move(rec));
    }

    void parse_pairing() {
        PairingRecord rec;
        rec.id = expect_ident(lx, "record id");
        expect_punct(lx, '{');
        const DGLA* L = nullptr;
        struct EntryField {
            std::string a, b;
            Scalar v;
        };
        std::vector<EntryField> entries;
        while (true) {
            Token t = lx.next();
            if (t.kind == Token::Punct && t.text == "}") break;
            if (t.kind != Token::Ident) fail(t, "expected field");
            if (t.text == "dgla") {
                rec.dgla_ref = expect_ident(lx, "dgla id");
                const DglaRecord* d = doc.find_as<DglaRecord>(rec.dgla_ref);
                if (!d) throw DanglingReferenceError(rec.dgla_ref);
                L = &d->dgla;
            } else if (t.text == "degree") {
                rec.pairing.d = static_cast<int>(expect_int(lx));
            } else if (t.text == "weight") {
                rec.pairing.pairing_weight = static_cast<int>(expect_int(lx));
            } else if (t.text == "entry") {
                EntryField f;
                f.a = expect_ident(lx, "basis name");
                f.b = expect_ident(lx, "basis name");
                expect_punct(lx, '{');
                f.v = expect_scalar(lx);
                expect_punct(lx, '}');
                entries.push_back(f);
            } else {
                throw UnknownFieldError(t.line, t.col, t.text);
            }
        }
        if (!L) throw DanglingReferenceError(rec.dgla_ref.empty() ? "<dgla>" : rec.dgla_ref);
        const std::size_t n = L->dim();
        rec.pairing.matrix = QMatrix(n, n);
        for (const auto& f : entries) {
            auto ia = L->index_of(f.a), ib = L->index_of(f.b);
            if (!ia || !ib) throw DanglingReferenceError(f.a + "/" + f.b);
            rec.pairing.matrix.at(*ia, *ib) = f.v;
            if (*ia != *ib) {
                Scalar sym = f.v;
                if ((L->basis[*ia].degree * L->basis[*ib].degree) & 1) sym = -sym;
                rec.pairing.matrix.at(*ib, *ia) = sym;
            }
        }
        doc.entities.push_back(std::move(rec));
    }

    void parse_form_structure() {
        FormStructureRecord rec;
        rec.id = expect_ident(lx, "record id");
        expect_punct(lx, '{');
        const AlgebraRecord* arec = nullptr;
        while (true) {
            Token t = lx.next();
            if (t.kind == Token::Punct && t.text == "}") break;
            if (t.kind != Token::Ident) fail(t, "expected field");
            if (t.text == "algebra") {
                rec.algebra_ref = expect_ident(lx, "algebra id");
                arec = &algebra_ref(t, rec.algebra_ref);
            } else if (t.text == "shift") {
                rec.omega.n = static_cast<int>(expect_int(lx));
            } else if (t.text == "weight") {
                rec.omega.m = static_cast<int>(expect_int(lx));
            } else if (t.text == "max-form-order") {
                rec.omega.i_max = static_cast<int>(expect_int(lx));
            } else if (t.text == "truncated") {
                rec.omega.form_truncated = true;
            } else if (t.text == "form") {
                if (!arec) fail(t, "field 'algebra' must precede 'form'");
                int i = static_cast<int>(expect_int(lx));
                rec.omega.forms[i] = parse_braced_element(lx, algebra_resolver(*arec));
            } else {
                throw UnknownFieldError(t.line, t.col, t.text);
            }
        }
        if (!arec) throw DanglingReferenceError("<algebra>");
        doc.entities.push_back(std::move(rec));
    }

    void parse_poly_structure() {
        PolyStructureRecord rec;
        rec.id = expect_ident(lx, "record id");
        expect_punct(lx, '{');
        const AlgebraRecord* arec = nullptr;
        bool have_shift = false, have_weight = false;
        while (true) {
            Token t = lx.next();
            if (t.kind == Token::Punct && t.text == "}") break;
            if (t.kind != Token::Ident) fail(t, "expected field");
            if (t.text == "algebra") {
                rec.algebra_ref = expect_ident(lx, "algebra id");
                arec = &algebra_ref(t, rec.algebra_ref);
            } else if (t.text == "shift") {
                rec.n = static_cast<int>(expect_int(lx));
                have_shift = true;
            } else if (t.text == "weight") {
                rec.m = static_cast<int>(expect_int(lx));
                have_weight = true;
            } else if (t.text == "max-xi-order") {
                rec.max_xi_order = static_cast<int>(expect_int(lx));
            } else if (t.text == "element") {
                if (!arec || !have_shift || !have_weight)
                    fail(t, "fields algebra/shift/weight must precede 'element'");
                rec.pi += parse_braced_element(lx, algebra_resolver(*arec, rec.n, rec.m));
            } else {
                throw UnknownFieldError(t.line, t.col, t.text);
            }
        }
        if (!arec) throw DanglingReferenceError("<algebra>");
        doc.entities.push_back(std::move(rec));
    }

    void parse_map() {
        MapRecord rec;
        rec.id = expect_ident(lx, "record id");
        expect_punct(lx, '{');
        const AlgebraRecord* from = nullptr;
        const AlgebraRecord* to = nullptr;
        while (true) {
            Token t = lx.next();
            if (t.kind == Token::Punct && t.text == "}") break;
            if (t.kind != Token::Ident) fail(t, "expected field");
            if (t.text == "from") {
                rec.from_ref = expect_ident(lx, "algebra id");
                from = &algebra_ref(t, rec.from_ref);
            } else if (t.text == "to") {
                rec.to_ref = expect_ident(lx, "algebra id");
                to = &algebra_ref(t, rec.to_ref);
            } else if (t.text == "image") {
                if (!from || !to) fail(t, "fields from/to must precede 'image'");
                std::string name = expect_ident(lx, "generator name");
                auto g = algebra_resolver(*from)(GenKind::base, name);
                if (!g) fail(t, "unknown source generator '" + name + "'");
                rec.f.set_image(*g, parse_braced_element(lx, algebra_resolver(*to)));
            } else {
                throw UnknownFieldError(t.line, t.col, t.text);
            }
        }
        if (!from || !to) throw DanglingReferenceError("<map endpoints>");
        doc.entities.push_back(std::move(rec));
    }

    void parse_isotropic() {
        IsotropicRecord rec;
        rec.id = expect_ident(lx, "record id");
        expect_punct(lx, '{');
        const MapRecord* mrec = nullptr;
        while (true) {
            Token t = lx.next();
            if (t.kind == Token::Punct && t.text == "}") break;
            if (t.kind != Token::Ident) fail(t, "expected field");
            if (t.text == "map") {
                rec.map_ref = expect_ident(lx, "map id");
                mrec = doc.find_as<MapRecord>(rec.map_ref);
                if (!mrec) throw DanglingReferenceError(rec.map_ref);
            } else if (t.text == "form") {
                rec.form_ref = expect_ident(lx, "form-structure id");
                if (!doc.find_as<FormStructureRecord>(rec.form_ref))
                    throw DanglingReferenceError(rec.form_ref);
            } else if (t.text == "max-form-order") {
                rec.i_max = static_cast<int>(expect_int(lx));
            } else if (t.text == "truncated") {
                rec.form_truncated = true;
            } else if (t.text == "lambda") {
                if (!mrec) fail(t, "field 'map' must precede 'lambda'");
                int i = static_cast<int>(expect_int(lx));
                const AlgebraRecord& target = doc.require<AlgebraRecord>(mrec->to_ref);
                rec.lambda[i] = parse_braced_element(lx, algebra_resolver(target));
            } else {
                throw UnknownFieldError(t.line, t.col, t.text);
            }
        }
        doc.entities.push_back(std::move(rec));
    }

    void parse_l_element() {
        LElementRecord rec;
        rec.id = expect_ident(lx, "record id");
        expect_punct(lx, '{');
        const DglaRecord* drec = nullptr;
        const AlgebraRecord* arec = nullptr;
        while (true) {
            Token t = lx.next();
            if (t.kind == Token::Punct && t.text == "}") break;
            if (t.kind != Token::Ident) fail(t, "expected field");
            if (t.text == "dgla") {
                rec.dgla_ref = expect_ident(lx, "dgla id");
                drec = doc.find_as<DglaRecord>(rec.dgla_ref);
                if (!drec) throw DanglingReferenceError(rec.dgla_ref);
            } else if (t.text == "algebra") {
                rec.algebra_ref = expect_ident(lx, "algebra id");
                arec = &algebra_ref(t, rec.algebra_ref);
            } else if (t.text == "term") {
                if (!drec || !arec) fail(t, "fields dgla/algebra must precede 'term'");
                std::string name = expect_ident(lx, "basis name");
                auto i = drec->dgla.index_of(name);
                if (!i) throw DanglingReferenceError(name);
                rec.value.add(*i, parse_braced_element(lx, algebra_resolver(*arec)));
            } else {
                throw UnknownFieldError(t.line, t.col, t.text);
            }
        }
        doc.entities.push_back(std::move(rec));
    }

    void parse_extension() {
        ExtensionRecord rec;
        rec.id = expect_ident(lx, "record id");
        expect_punct(lx, '{');
        const AlgebraRecord* arec = nullptr;
        while (true) {
            Token t = lx.next();
            if (t.kind == Token::Punct && t.text == "}") break;
            if (t.kind != Token::Ident) fail(t, "expected field");
            if (t.text == "algebra") {
                rec.algebra_ref = expect_ident(lx, "algebra id");
                arec = &algebra_ref(t, rec.algebra_ref);
            } else if (t.text == "ideal") {
                if (!arec) fail(t, "field 'algebra' must precede 'ideal'");
                Element e = parse_braced_element(lx, algebra_resolver(*arec));
                for (const auto& [m, c] : e.terms()) {
                    if (!c.is_one())
                        fail(t, "ideal entries must be plain monomials");
                    rec.ideal.push_back(m);
                }
            } else {
                throw UnknownFieldError(t.line, t.col, t.text);
            }
        }
        doc.entities.push_back(std::move(rec));
    }

    void parse_witness() {
        WitnessRecord rec;
        rec.id = expect_ident(lx, "record id");
        expect_punct(lx, '{');
        const PolyStructureRecord* prec = nullptr;
        while (true) {
            Token t = lx.next();
            if (t.kind == Token::Punct && t.text == "}") break;
            if (t.kind != Token::Ident) fail(t, "expected field");
            if (t.text == "form") {
                rec.form_ref = expect_ident(lx, "form-structure id");
                if (!doc.find_as<FormStructureRecord>(rec.form_ref))
                    throw DanglingReferenceError(rec.form_ref);
            } else if (t.text == "polyvector") {
                rec.poly_ref = expect_ident(lx, "polyvector-structure id");
                prec = doc.find_as<PolyStructureRecord>(rec.poly_ref);
                if (!prec) throw DanglingReferenceError(rec.poly_ref);
            } else if (t.text == "max-level") {
                rec.max_level = static_cast<int>(expect_int(lx));
            } else if (t.text == "homotopy") {
                if (!prec) fail(t, "field 'polyvector' must precede 'homotopy'");
                const AlgebraRecord& arec = doc.require<AlgebraRecord>(prec->algebra_ref);
                rec.homotopy =
                    parse_braced_element(lx, algebra_resolver(arec, prec->n, prec->m));
            } else {
                throw UnknownFieldError(t.line, t.col, t.text);
            }
        }
        doc.entities.push_back(std::move(rec));
    }

    void parse_result() {
        ResultRecord rec;
        rec.id = expect_ident(lx, "record id");
        expect_punct(lx, '{');
        while (true) {
            Token t = lx.next();
            if (t.kind == Token::Punct && t.text == "}") break;
            if (t.kind != Token::Ident) fail(t, "expected field");
            if (t.text == "command") {
                Token s = lx.next();
                if (s.kind != Token::Str) fail(s, "expected string");
                rec.command = s.text;
            } else if (t.text == "target") {
                Token s = lx.next();
                if (s.kind != Token::Str) fail(s, "expected string");
                rec.target = s.text;
            } else if (t.text == "status") {
                std::string v = expect_ident(lx, "pass|fail");
                if (v != "pass" && v != "fail") fail(t, "status must be pass or fail");
                rec.pass = v == "pass";
            } else if (t.text == "note") {
                Token s = lx.next();
                if (s.kind != Token::Str) fail(s, "expected string");
                rec.notes.push_back(s.text);
            } else {
                throw UnknownFieldError(t.line, t.col, t.text);
            }
        }
        doc.entities.push_back(std::move(rec));
    }

    Document run() {
        Token head = lx.next();
        if (head.kind != Token::Ident || head.text != "sympol-ir")
            fail(head, "expected header 'sympol-ir <version>'");
        Token ver = lx.next();
        if (ver.kind != Token::Int) fail(ver, "expected format version");
        doc.format_version = std::stoi(ver.text);
        if (doc.format_version != 1)
            fail(ver, "unsupported format version " + ver.text);
        while (lx.peek().kind != Token::End) {
            Token kind = lx.next();
            if (kind.kind != Token::Ident) fail(kind, "expected record kind");
            if (kind.text == "algebra") parse_algebra();
            else if (kind.text == "dgla") parse_dgla();
            else if (kind.text == "pairing") parse_pairing();
            else if (kind.text == "form-structure") parse_form_structure();
            else if (kind.text == "polyvector-structure") parse_poly_structure();
            else if (kind.text == "map") parse_map();
            else if (kind.text == "isotropic") parse_isotropic();
            else if (kind.text == "mc-element") parse_l_element();
            else if (kind.text == "extension") parse_extension();
            else if (kind.text == "witness") parse_witness();
            else if (kind.text == "result") parse_result();
            else throw UnknownFieldError(kind.line, kind.col, kind.text);
        }
        // check id uniqueness
        std::set<std::string> ids;
        for (const Entity& e : doc.entities) {
            std::string id = std::visit([](const auto& r) { return r.id; }, e);
            if (!ids.insert(id).second)
                throw ParseError(0, 0, "duplicate record id '" + id + "'");
        }
        return std::move(doc);
    }
};

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

struct Printer {
    std::ostringstream os;

    void print(const AlgebraRecord& r) {
        os << "algebra " << r.id << " {\n";
        const Trunc& t = r.algebra.trunc;
        if (t.max_order) os << "  max-order " << *t.max_order << "\n";
        if (t.weight_window)
            os << "  weight-window " << t.weight_window->first << ":"
               << t.weight_window->second << "\n";
        if (t.max_form_order) os << "  max-form-order " << *t.max_form_order << "\n";
        if (r.algebra.postnikov_parent) {
            // printed via the postnikov-of reference established by run()
        } else if (t.min_total_degree || t.max_total_degree) {
            os << "  degree-window " << (t.min_total_degree ? *t.min_total_degree : -9999)
               << ":" << (t.max_total_degree ? *t.max_total_degree : 9999) << "\n";
        }
        if (r.algebra.nonneg_chain) os << "  nonneg-chain\n";
        for (Generator g : r.algebra.gens)
            os << "  generator " << g.name() << " degree " << g.degree() << " weight "
               << g.weight() << "\n";
        for (Generator g : r.algebra.gens) {
            if (!r.algebra.diff.has_image(g)) continue;
            const Element& e = r.algebra.diff.image(g);
            if (!e.is_zero()) os << "  diff " << g.name() << " { " << e.str() << " }\n";
        }
        for (const Element& rel : r.relations)
            os << "  relation { " << rel.str() << " }\n";
        os << "}\n";
    }

    void print(const DglaRecord& r) {
        os << "dgla " << r.id << " {\n";
        const DGLA& L = r.dgla;
        for (const auto& b : L.basis)
            os << "  basis " << b.name << " degree " << b.degree << " weight " << b.weight
               << "\n";
        for (std::size_t j = 0; j < L.dim(); ++j) {
            std::ostringstream combo;
            bool any = false;
            for (std::size_t i = 0; i < L.dim(); ++i) {
                const Scalar& c = L.diff.at(i, j);
                if (c.is_zero()) continue;
                if (any) combo << (c.sign() < 0 ? " - " : " + ");
                else if (c.sign() < 0) combo << "- ";
                Scalar a = abs(c);
                if (!a.is_one()) combo << a.str() << " ";
                combo << L.basis[i].name;
                any = true;
            }
            if (any) os << "  diff " << L.basis[j].name << " { " << combo.str() << " }\n";
        }
        for (std::size_t i = 0; i < L.dim(); ++i)
            for (std::size_t j = i; j < L.dim(); ++j) {
                QVector v = L.bracket(static_cast<int>(i), static_cast<int>(j));
                std::ostringstream combo;
                bool any = false;
                for (std::size_t k = 0; k < L.dim(); ++k) {
                    if (v[k].is_zero()) continue;
                    if (any) combo << (v[k].sign() < 0 ? " - " : " + ");
                    else if (v[k].sign() < 0) combo << "- ";
                    Scalar a = abs(v[k]);
                    if (!a.is_one()) combo << a.str() << " ";
                    combo << L.basis[k].name;
                    any = true;
                }
                if (any)
                    os << "  bracket " << L.basis[i].name << " " << L.basis[j].name << " { "
                       << combo.str() << " }\n";
            }
        os << "}\n";
    }

    void print_pairing_with_names(const PairingRecord& r, const DGLA& L) {
        os << "pairing " << r.id << " {\n";
        os << "  dgla " << r.dgla_ref << "\n";
        os << "  degree " << r.pairing.d << "\n";
        os << "  weight " << r.pairing.pairing_weight << "\n";
        for (std::size_t i = 0; i < r.pairing.matrix.rows(); ++i)
            for (std::size_t j = i; j < r.pairing.matrix.cols(); ++j) {
                const Scalar& v = r.pairing.matrix.at(i, j);
                if (v.is_zero()) continue;
                os << "  entry " << L.basis[i].name << " " << L.basis[j].name << " { "
                   << v.str() << " }\n";
            }
        os << "}\n";
    }

    void print(const FormStructureRecord& r) {
        os << "form-structure " << r.id << " {\n";
        os << "  algebra " << r.algebra_ref << "\n";
        os << "  shift " << r.omega.n << "\n";
        os << "  weight " << r.omega.m << "\n";
        os << "  max-form-order " << r.omega.i_max << "\n";
        if (r.omega.form_truncated) os << "  truncated\n";
        for (const auto& [i, e] : r.omega.forms)
            if (!e.is_zero()) os << "  form " << i << " { " << e.str() << " }\n";
        os << "}\n";
    }

    void print(const PolyStructureRecord& r) {
        os << "polyvector-structure " << r.id << " {\n";
        os << "  algebra " << r.algebra_ref << "\n";
        os << "  shift " << r.n << "\n";
        os << "  weight " << r.m << "\n";
        if (r.max_xi_order) os << "  max-xi-order " << *r.max_xi_order << "\n";
        if (!r.pi.is_zero()) os << "  element { " << r.pi.str() << " }\n";
        os << "}\n";
    }

    void print(const MapRecord& r, const std::vector<Generator>& source_gens) {
        os << "map " << r.id << " {\n";
        os << "  from " << r.from_ref << "\n";
        os << "  to " << r.to_ref << "\n";
        for (Generator g : source_gens) {
            const Element* img = r.f.image(g);
            if (img) os << "  image " << g.name() << " { " << img->str() << " }\n";
        }
        os << "}\n";
    }

    void print(const IsotropicRecord& r) {
        os << "isotropic " << r.id << " {\n";
        os << "  map " << r.map_ref << "\n";
        os << "  form " << r.form_ref << "\n";
        os << "  max-form-order " << r.i_max << "\n";
        if (r.form_truncated) os << "  truncated\n";
        for (const auto& [i, e] : r.lambda)
            if (!e.is_zero()) os << "  lambda " << i << " { " << e.str() << " }\n";
        os << "}\n";
    }

    void print(const LElementRecord& r, const DGLA& L) {
        os << "mc-element " << r.id << " {\n";
        os << "  dgla " << r.dgla_ref << "\n";
        os << "  algebra " << r.algebra_ref << "\n";
        for (const auto& [i, e] : r.value.comps)
            if (!e.is_zero())
                os << "  term " << L.basis[i].name << " { " << e.str() << " }\n";
        os << "}\n";
    }

    void print(const ExtensionRecord& r) {
        os << "extension " << r.id << " {\n";
        os << "  algebra " << r.algebra_ref << "\n";
        for (const Monomial& m : r.ideal) os << "  ideal { " << m.str() << " }\n";
        os << "}\n";
    }

    void print(const WitnessRecord& r) {
        os << "witness " << r.id << " {\n";
        os << "  form " << r.form_ref << "\n";
        os << "  polyvector " << r.poly_ref << "\n";
        os << "  max-level " << r.max_level << "\n";
        if (!r.homotopy.is_zero()) os << "  homotopy { " << r.homotopy.str() << " }\n";
        os << "}\n";
    }

    void print(const ResultRecord& r) {
        os << "result " << r.id << " {\n";
        os << "  command " << quote(r.command) << "\n";
        if (!r.target.empty()) os << "  target " << quote(r.target) << "\n";
        os << "  status " << (r.pass ? "pass" : "fail") << "\n";
        for (const std::string& n : r.notes) os << "  note " << quote(n) << "\n";
        os << "}\n";
    }
};

}  // namespace

const Entity* Document::find(const std::string& id) const {
    for (const Entity& e : entities) {
        std::string eid = std::visit([](const auto& r) { return r.id; }, e);
        if (eid == id) return &e;
    }
    return nullptr;
}

std::string Document::fresh_id(const std::string& base) const {
    if (!find(base)) return base;
    for (int k = 2;; ++k) {
        std::string candidate = base + "." + std::to_string(k);
        if (!find(candidate)) return candidate;
    }
}

Document parse_document(const std::string& text) {
    Parser p(text);
    return p.run();
}

std::string print_document(const Document& doc) {
    Printer p;
    p.os << "sympol-ir " << doc.format_version << "\n";
    for (const Entity& e : doc.entities) {
        if (std::holds_alternative<PairingRecord>(e)) {
            const PairingRecord& r = std::get<PairingRecord>(e);
            const DglaRecord* d = doc.find_as<DglaRecord>(r.dgla_ref);
            if (!d) throw DanglingReferenceError(r.dgla_ref);
            p.print_pairing_with_names(r, d->dgla);
        } else if (std::holds_alternative<MapRecord>(e)) {
            const MapRecord& r = std::get<MapRecord>(e);
            const AlgebraRecord* a = doc.find_as<AlgebraRecord>(r.from_ref);
            if (!a) throw DanglingReferenceError(r.from_ref);
            p.print(r, a->algebra.gens);
        } else if (std::holds_alternative<LElementRecord>(e)) {
            const LElementRecord& r = std::get<LElementRecord>(e);
            const DglaRecord* d = doc.find_as<DglaRecord>(r.dgla_ref);
            if (!d) throw DanglingReferenceError(r.dgla_ref);
            p.print(r, d->dgla);
        } else if (std::holds_alternative<AlgebraRecord>(e)) {
            const AlgebraRecord& r = std::get<AlgebraRecord>(e);
            if (r.algebra.postnikov_parent) {
                // locate the parent id for the reference line
                std::string parent_id;
                for (const Entity& pe : doc.entities) {
                    const AlgebraRecord* pa = std::get_if<AlgebraRecord>(&pe);
                    if (pa && pa->algebra.gens == r.algebra.postnikov_parent->gens &&
                        !pa->algebra.postnikov_parent) {
                        parent_id = pa->id;
                        break;
                    }
                }
                p.os << "algebra " << r.id << " {\n";
                if (r.algebra.trunc.max_order)
                    p.os << "  max-order " << *r.algebra.trunc.max_order << "\n";
                if (!parent_id.empty())
                    p.os << "  postnikov-of " << parent_id << " " << r.algebra.postnikov_level
                         << "\n";
                for (Generator g : r.algebra.gens)
                    p.os << "  generator " << g.name() << " degree " << g.degree()
                         << " weight " << g.weight() << "\n";
                for (Generator g : r.algebra.gens) {
                    if (!r.algebra.diff.has_image(g)) continue;
                    const Element& img = r.algebra.diff.image(g);
                    if (!img.is_zero())
                        p.os << "  diff " << g.name() << " { " << img.str() << " }\n";
                }
                p.os << "}\n";
            } else {
                p.print(r);
            }
        } else {
            std::visit([&p](const auto& r) {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, AlgebraRecord> ||
                              std::is_same_v<T, PairingRecord> || std::is_same_v<T, MapRecord> ||
                              std::is_same_v<T, LElementRecord>) {
                    // handled above
                } else {
                    p.print(r);
                }
            }, e);
        }
    }
    return p.os.str();
}

// ---------------------------------------------------------------------------
// Command dispatch
// ---------------------------------------------------------------------------

namespace {

ResultRecord make_result(const Document& doc, const std::string& command,
                         const std::string& target, const RunOptions* opts = nullptr) {
    ResultRecord r;
    r.id = doc.fresh_id("result." + command + (target.empty() ? "" : "." + target));
    r.command = command;
    r.target = target;
    if (opts && opts->seed) r.notes.push_back("seed " + std::to_string(*opts->seed));
    return r;
}

void append_report(ResultRecord& res, const Report& rep) {
    if (!rep.ok()) {
        res.pass = false;
        for (const auto& issue : rep.issues) {
            std::string n = issue.what;
            if (!issue.witness.empty()) n += " [witness: " + issue.witness + "]";
            res.notes.push_back(n);
        }
    }
}

}  // namespace

RunOutcome run_command(const std::string& command, const Document& input,
                       const RunOptions& opts) {
    RunOutcome out;
    out.doc = input;
    Document& doc = out.doc;

    auto finish_fail_input = [&](const std::string& message) {
        ResultRecord r = make_result(doc, command, opts.targets.empty() ? "" : opts.targets[0], &opts);
        r.pass = false;
        r.notes.push_back(message);
        doc.entities.push_back(r);
        out.exit_code = 2;
        return out;
    };

    try {
        if (command == "validate") {
            bool all_ok = true;
            std::vector<std::string> targets = opts.targets;
            if (targets.empty()) {
                for (const Entity& e : doc.entities) {
                    if (std::holds_alternative<AlgebraRecord>(e))
                        targets.push_back(std::get<AlgebraRecord>(e).id);
                    if (std::holds_alternative<DglaRecord>(e))
                        targets.push_back(std::get<DglaRecord>(e).id);
                    if (std::holds_alternative<PairingRecord>(e))
                        targets.push_back(std::get<PairingRecord>(e).id);
                }
            }
            for (const std::string& id : targets) {
                ResultRecord res = make_result(doc, command, id, &opts);
                const Entity* e = doc.find(id);
                if (!e) throw DanglingReferenceError(id);
                if (const AlgebraRecord* a = std::get_if<AlgebraRecord>(e)) {
                    append_report(res, validate(a->algebra));
                } else if (const DglaRecord* d = std::get_if<DglaRecord>(e)) {
                    append_report(res, validate_dgla(d->dgla));
                } else if (const PairingRecord* pr = std::get_if<PairingRecord>(e)) {
                    const DglaRecord d = doc.require<DglaRecord>(pr->dgla_ref);
                    append_report(res, validate_pairing(d.dgla, pr->pairing));
                } else {
                    throw std::invalid_argument("validate: unsupported record kind for '" + id +
                                                "'");
                }
                all_ok = all_ok && res.pass;
                doc.entities.push_back(res);
            }
            out.exit_code = all_ok ? 0 : 1;
            return out;
        }

        if (opts.targets.empty()) return finish_fail_input(command + ": missing target id");
        const std::string& target = opts.targets[0];

        if (command == "homology") {
            const AlgebraRecord a = doc.require<AlgebraRecord>(target);
            if (!opts.degree || !opts.weight)
                return finish_fail_input("homology: --degree and --weight are required");
            int ord = opts.max_order ? *opts.max_order
                                     : (a.algebra.trunc.max_order ? *a.algebra.trunc.max_order
                                                                  : 4);
            HomologySlice h = homology(a.algebra, *opts.degree, *opts.weight, ord);
            ResultRecord res = make_result(doc, command, target, &opts);
            res.notes.push_back("dimension " + std::to_string(h.dimension));
            res.notes.push_back("order-used " + std::to_string(h.order_used));
            for (const Element& rep : h.representatives)
                res.notes.push_back("representative " + rep.str());
            doc.entities.push_back(res);
            out.exit_code = 0;
            return out;
        }

        if (command == "resolve") {
            const AlgebraRecord a = doc.require<AlgebraRecord>(target);
            int up_to = opts.up_to_degree ? *opts.up_to_degree : 4;
            Presentation pres{a.algebra, a.relations};
            Resolution r = quasi_free_resolution(pres, up_to);
            AlgebraRecord out_rec;
            out_rec.id = doc.fresh_id(target + ".resolution");
            out_rec.algebra = r.algebra;
            doc.entities.push_back(out_rec);
            ResultRecord res = make_result(doc, command, target, &opts);
            for (const auto& [deg, gens] : r.stages)
                res.notes.push_back("stage chain-degree " + std::to_string(deg) + ": " +
                                    std::to_string(gens.size()) + " generator(s)");
            res.notes.push_back("emitted " + out_rec.id);
            doc.entities.push_back(res);
            out.exit_code = 0;
            return out;
        }

        if (command == "truncate") {
            const AlgebraRecord a = doc.require<AlgebraRecord>(target);
            AlgebraRecord out_rec;
            ResultRecord res = make_result(doc, command, target, &opts);
            if (opts.weight_window) {
                auto [Q, qmap] = weight_truncate(a.algebra, opts.weight_window->first,
                                                 opts.weight_window->second);
                out_rec.id = doc.fresh_id(target + ".wtrunc");
                out_rec.algebra = Q;
                res.notes.push_back("weight window " +
                                    std::to_string(opts.weight_window->first) + ":" +
                                    std::to_string(opts.weight_window->second));
            } else if (opts.postnikov_level) {
                out_rec.id = doc.fresh_id(target + ".postnikov");
                out_rec.algebra = postnikov_truncate(a.algebra, *opts.postnikov_level);
                res.notes.push_back("postnikov level " + std::to_string(*opts.postnikov_level));
            } else if (opts.degree_window) {
                out_rec.id = doc.fresh_id(target + ".dtrunc");
                out_rec.algebra = a.algebra;
                out_rec.algebra.trunc.min_total_degree = opts.degree_window->first;
                out_rec.algebra.trunc.max_total_degree = opts.degree_window->second;
                for (Generator g : out_rec.algebra.gens)
                    out_rec.algebra.diff.set_image(
                        g, a.algebra.diff.image(g).truncated(out_rec.algebra.trunc));
                res.notes.push_back("degree window " +
                                    std::to_string(opts.degree_window->first) + ":" +
                                    std::to_string(opts.degree_window->second));
            } else {
                return finish_fail_input(
                    "truncate: need --weight-window, --degree-window or --postnikov");
            }
            res.notes.push_back("emitted " + out_rec.id);
            doc.entities.push_back(out_rec);
            doc.entities.push_back(res);
            out.exit_code = 0;
            return out;
        }

        if (command == "sp-check") {
            const FormStructureRecord f = doc.require<FormStructureRecord>(target);
            const AlgebraRecord a = doc.require<AlgebraRecord>(f.algebra_ref);
            ResultRecord res = make_result(doc, command, target, &opts);
            append_report(res, check_presymplectic(a.algebra, f.omega));
            if (res.pass) {
                try {
                    append_report(res, check_symplectic_strict(a.algebra, f.omega));
                } catch (const NonSquareBlockError& e) {
                    res.pass = false;
                    res.notes.push_back(std::string("NonSquareBlock: ") + e.what());
                }
            }
            doc.entities.push_back(res);
            out.exit_code = res.pass ? 0 : 1;
            return out;
        }

        if (command == "lag-check") {
            const IsotropicRecord iso = doc.require<IsotropicRecord>(target);
            const MapRecord mrec = doc.require<MapRecord>(iso.map_ref);
            const FormStructureRecord frec = doc.require<FormStructureRecord>(iso.form_ref);
            const AlgebraRecord A = doc.require<AlgebraRecord>(mrec.from_ref);
            const AlgebraRecord B = doc.require<AlgebraRecord>(mrec.to_ref);
            if (frec.algebra_ref != mrec.from_ref)
                return finish_fail_input("lag-check: form lives on a different algebra");
            IsotropicPair pair;
            pair.f = mrec.f;
            pair.omega = frec.omega;
            pair.lambda = iso.lambda;
            pair.i_max = iso.i_max;
            pair.form_truncated = iso.form_truncated;
            ResultRecord res = make_result(doc, command, target, &opts);
            try {
                append_report(res, check_lagrangian_strict(A.algebra, B.algebra, pair));
            } catch (const NonSquareBlockError& e) {
                res.pass = false;
                res.notes.push_back(std::string("NonSquareBlock: ") + e.what());
            }
            doc.entities.push_back(res);
            out.exit_code = res.pass ? 0 : 1;
            return out;
        }

        if (command == "schouten") {
            if (opts.targets.size() < 2)
                return finish_fail_input("schouten: need two polyvector ids");
            const PolyStructureRecord p1 = doc.require<PolyStructureRecord>(opts.targets[0]);
            const PolyStructureRecord p2 = doc.require<PolyStructureRecord>(opts.targets[1]);
            if (p1.algebra_ref != p2.algebra_ref || p1.n != p2.n || p1.m != p2.m)
                return finish_fail_input("schouten: context mismatch");
            const AlgebraRecord a = doc.require<AlgebraRecord>(p1.algebra_ref);
            PolyContext C = make_poly_context(a.algebra, p1.n, p1.m, p1.max_xi_order);
            Element br = schouten(C, p1.pi, p2.pi);
            PolyStructureRecord out_rec;
            out_rec.id = doc.fresh_id(opts.targets[0] + ".bracket." + opts.targets[1]);
            out_rec.algebra_ref = p1.algebra_ref;
            out_rec.n = p1.n;
            out_rec.m = p1.m;
            out_rec.max_xi_order = p1.max_xi_order;
            out_rec.pi = br;
            doc.entities.push_back(out_rec);
            ResultRecord res = make_result(doc, command, opts.targets[0], &opts);
            res.notes.push_back("emitted " + out_rec.id);
            doc.entities.push_back(res);
            out.exit_code = 0;
            return out;
        }

        if (command == "mc-check") {
            const PolyStructureRecord p = doc.require<PolyStructureRecord>(target);
            const AlgebraRecord a = doc.require<AlgebraRecord>(p.algebra_ref);
            PolyContext C = make_poly_context(a.algebra, p.n, p.m, p.max_xi_order);
            ResultRecord res = make_result(doc, command, target, &opts);
            Element residue = check_mc(C, p.pi);
            if (!residue.is_zero()) {
                res.pass = false;
                res.notes.push_back("MC residue: " + residue.str());
            } else {
                try {
                    Report nd = check_nondegenerate(C, p.pi);
                    res.notes.push_back(nd.ok() ? "non-degenerate (strict)"
                                                : "degenerate bivector part");
                } catch (const NonSquareBlockError& e) {
                    res.notes.push_back(std::string("NonSquareBlock: ") + e.what());
                }
            }
            doc.entities.push_back(res);
            out.exit_code = res.pass ? 0 : 1;
            return out;
        }

        if (command == "convert") {
            int max_level = opts.max_level ? *opts.max_level : 3;
            if (opts.direction == "sp->poisson") {
                const FormStructureRecord f = doc.require<FormStructureRecord>(target);
                const AlgebraRecord a = doc.require<AlgebraRecord>(f.algebra_ref);
                PolyContext C = make_poly_context(a.algebra, f.omega.n, f.omega.m, max_level);
                CompatibilityWitness w = symplectic_to_poisson(C, f.omega, max_level);
                PolyStructureRecord prec;
                prec.id = doc.fresh_id(target + ".poisson");
                prec.algebra_ref = f.algebra_ref;
                prec.n = f.omega.n;
                prec.m = f.omega.m;
                prec.max_xi_order = max_level;
                prec.pi = w.pi;
                doc.entities.push_back(prec);
                WitnessRecord wrec;
                wrec.id = doc.fresh_id(target + ".witness");
                wrec.form_ref = target;
                wrec.poly_ref = prec.id;
                wrec.homotopy = w.h;
                wrec.max_level = max_level;
                doc.entities.push_back(wrec);
                ResultRecord res = make_result(doc, command, target, &opts);
                res.notes.push_back("emitted " + prec.id);
                res.notes.push_back("emitted " + wrec.id);
                doc.entities.push_back(res);
                out.exit_code = 0;
                return out;
            }
            if (opts.direction == "poisson->sp") {
                const PolyStructureRecord p = doc.require<PolyStructureRecord>(target);
                const AlgebraRecord a = doc.require<AlgebraRecord>(p.algebra_ref);
                PolyContext C = make_poly_context(a.algebra, p.n, p.m, max_level);
                CompatibilityWitness w = poisson_to_symplectic(C, p.pi, max_level);
                FormStructureRecord frec;
                frec.id = doc.fresh_id(target + ".sp");
                frec.algebra_ref = p.algebra_ref;
                frec.omega = w.omega;
                doc.entities.push_back(frec);
                WitnessRecord wrec;
                wrec.id = doc.fresh_id(target + ".witness");
                wrec.form_ref = frec.id;
                wrec.poly_ref = target;
                wrec.homotopy = w.h;
                wrec.max_level = max_level;
                doc.entities.push_back(wrec);
                ResultRecord res = make_result(doc, command, target, &opts);
                res.notes.push_back("emitted " + frec.id);
                res.notes.push_back("emitted " + wrec.id);
                doc.entities.push_back(res);
                out.exit_code = 0;
                return out;
            }
            return finish_fail_input("convert: direction must be sp->poisson or poisson->sp");
        }

        if (command == "verify") {
            const WitnessRecord wrec = doc.require<WitnessRecord>(target);
            const FormStructureRecord f = doc.require<FormStructureRecord>(wrec.form_ref);
            const PolyStructureRecord p = doc.require<PolyStructureRecord>(wrec.poly_ref);
            const AlgebraRecord a = doc.require<AlgebraRecord>(f.algebra_ref);
            PolyContext C = make_poly_context(a.algebra, p.n, p.m, wrec.max_level);
            CompatibilityWitness w;
            w.omega = f.omega;
            w.pi = p.pi;
            w.h = wrec.homotopy;
            w.max_level = wrec.max_level;
            w.residue = Element::zero();
            ResultRecord res = make_result(doc, command, target, &opts);
            Report rep = verify_witness(C, w);
            append_report(res, rep);
            doc.entities.push_back(res);
            out.exit_code = res.pass ? 0 : 1;
            return out;
        }

        if (command == "ce") {
            const DglaRecord d = doc.require<DglaRecord>(target);
            int ord = opts.max_order ? *opts.max_order : 3;
            CEAlgebra ce = ce_algebra(d.dgla, ord);
            AlgebraRecord arec;
            arec.id = doc.fresh_id(target + ".ce");
            arec.algebra = ce.algebra;
            doc.entities.push_back(arec);
            ResultRecord res = make_result(doc, command, target, &opts);
            res.notes.push_back("emitted " + arec.id);
            doc.entities.push_back(res);
            out.exit_code = 0;
            return out;
        }

        if (command == "formal-sp") {
            const PairingRecord pr = doc.require<PairingRecord>(target);
            const DglaRecord d = doc.require<DglaRecord>(pr.dgla_ref);
            int ord = opts.max_order ? *opts.max_order : 3;
            int m = opts.structure_weight ? *opts.structure_weight
                                          : -pr.pairing.pairing_weight;
            Report prep = validate_pairing(d.dgla, pr.pairing);
            if (!prep.ok()) {
                ResultRecord res = make_result(doc, command, target, &opts);
                append_report(res, prep);
                doc.entities.push_back(res);
                out.exit_code = 1;
                return out;
            }
            CEAlgebra ce = ce_algebra(d.dgla, ord);
            std::string ce_id;
            if (const AlgebraRecord* existing =
                    doc.find_as<AlgebraRecord>(pr.dgla_ref + ".ce")) {
                ce_id = existing->id;
            } else {
                AlgebraRecord arec;
                arec.id = doc.fresh_id(pr.dgla_ref + ".ce");
                arec.algebra = ce.algebra;
                ce_id = arec.id;
                doc.entities.push_back(arec);
            }
            PreSymplectic omega = formal_symplectic(d.dgla, pr.pairing, ce, m);
            FormStructureRecord frec;
            frec.id = doc.fresh_id(target + ".sp");
            frec.algebra_ref = ce_id;
            frec.omega = omega;
            doc.entities.push_back(frec);
            ResultRecord res = make_result(doc, command, target, &opts);
            res.notes.push_back("emitted " + frec.id);
            res.notes.push_back("shift " + std::to_string(omega.n));
            doc.entities.push_back(res);
            out.exit_code = 0;
            return out;
        }

        if (command == "casimir") {
            const PairingRecord pr = doc.require<PairingRecord>(target);
            const DglaRecord d = doc.require<DglaRecord>(pr.dgla_ref);
            int ord = opts.max_order ? *opts.max_order : 3;
            int m = opts.structure_weight ? *opts.structure_weight
                                          : -pr.pairing.pairing_weight;
            CEAlgebra ce = ce_algebra(d.dgla, ord);
            std::string ce_id;
            if (const AlgebraRecord* existing =
                    doc.find_as<AlgebraRecord>(pr.dgla_ref + ".ce")) {
                ce_id = existing->id;
            } else {
                AlgebraRecord arec;
                arec.id = doc.fresh_id(pr.dgla_ref + ".ce");
                arec.algebra = ce.algebra;
                ce_id = arec.id;
                doc.entities.push_back(arec);
            }
            CasimirPoisson cp = casimir_poisson(d.dgla, pr.pairing, ce, m);
            PolyStructureRecord prec;
            prec.id = doc.fresh_id(target + ".poisson");
            prec.algebra_ref = ce_id;
            prec.n = cp.context.n;
            prec.m = cp.context.m;
            prec.pi = cp.pi;
            doc.entities.push_back(prec);
            ResultRecord res = make_result(doc, command, target, &opts);
            res.notes.push_back("emitted " + prec.id);
            doc.entities.push_back(res);
            out.exit_code = 0;
            return out;
        }

        if (command == "mc-extend") {
            const LElementRecord alpha = doc.require<LElementRecord>(target);
            if (opts.extension.empty())
                return finish_fail_input("mc-extend: --extension is required");
            const ExtensionRecord erec = doc.require<ExtensionRecord>(opts.extension);
            const DglaRecord d = doc.require<DglaRecord>(alpha.dgla_ref);
            const AlgebraRecord aprime = doc.require<AlgebraRecord>(erec.algebra_ref);
            SmallExtension ext{aprime.algebra, erec.ideal};
            McExtendResult r = mc_extend(d.dgla, ext, alpha.value);
            ResultRecord res = make_result(doc, command, target, &opts);
            if (r.lifted) {
                LElementRecord lrec;
                lrec.id = doc.fresh_id(target + ".lift");
                lrec.dgla_ref = alpha.dgla_ref;
                lrec.algebra_ref = erec.algebra_ref;
                lrec.value = r.lift;
                doc.entities.push_back(lrec);
                res.notes.push_back("lifted; emitted " + lrec.id);
                doc.entities.push_back(res);
                out.exit_code = 0;
            } else {
                res.pass = false;
                res.notes.push_back("obstruction class: " + r.obstruction.str(d.dgla));
                doc.entities.push_back(res);
                out.exit_code = 1;
            }
            return out;
        }

        if (command == "gauge") {
            const LElementRecord alpha = doc.require<LElementRecord>(target);
            if (opts.gauge.empty()) return finish_fail_input("gauge: --gauge is required");
            const LElementRecord g = doc.require<LElementRecord>(opts.gauge);
            const DglaRecord d = doc.require<DglaRecord>(alpha.dgla_ref);
            const AlgebraRecord a = doc.require<AlgebraRecord>(alpha.algebra_ref);
            LElement moved = gauge_act(d.dgla, a.algebra, g.value, alpha.value);
            LElementRecord lrec;
            lrec.id = doc.fresh_id(target + ".gauge");
            lrec.dgla_ref = alpha.dgla_ref;
            lrec.algebra_ref = alpha.algebra_ref;
            lrec.value = moved;
            doc.entities.push_back(lrec);
            ResultRecord res = make_result(doc, command, target, &opts);
            res.notes.push_back("emitted " + lrec.id);
            doc.entities.push_back(res);
            out.exit_code = 0;
            return out;
        }

        return finish_fail_input("unknown command '" + command + "'");
    } catch (const DanglingReferenceError& e) {
        return finish_fail_input(e.what());
    } catch (const ParseError& e) {
        return finish_fail_input(e.what());
    } catch (const NotSmallError& e) {
        return finish_fail_input(e.what());
    } catch (const NonFormalError& e) {
        return finish_fail_input(e.what());
    } catch (const std::invalid_argument& e) {
        return finish_fail_input(e.what());
    } catch (const ObstructionError& e) {
        ResultRecord r = make_result(doc, command, opts.targets.empty() ? "" : opts.targets[0], &opts);
        r.pass = false;
        r.notes.push_back(e.what());
        r.notes.push_back("witness: " + e.witness.str());
        doc.entities.push_back(r);
        out.exit_code = 1;
        return out;
    } catch (const NotInvertibleError& e) {
        ResultRecord r = make_result(doc, command, opts.targets.empty() ? "" : opts.targets[0], &opts);
        r.pass = false;
        r.notes.push_back(e.what());
        doc.entities.push_back(r);
        out.exit_code = 1;
        return out;
    } catch (const NotMCError& e) {
        ResultRecord r = make_result(doc, command, opts.targets.empty() ? "" : opts.targets[0], &opts);
        r.pass = false;
        r.notes.push_back(e.what());
        doc.entities.push_back(r);
        out.exit_code = 1;
        return out;
    } catch (const UnstableTruncationError& e) {
        ResultRecord r = make_result(doc, command, opts.targets.empty() ? "" : opts.targets[0], &opts);
        r.pass = false;
        r.notes.push_back(e.what());
        doc.entities.push_back(r);
        out.exit_code = 1;
        return out;
    } catch (const NonFiniteError& e) {
        ResultRecord r = make_result(doc, command, opts.targets.empty() ? "" : opts.targets[0], &opts);
        r.pass = false;
        r.notes.push_back(e.what());
        doc.entities.push_back(r);
        out.exit_code = 1;
        return out;
    } catch (const NotClosedError& e) {
        return finish_fail_input(e.what());
    }
}

}  // namespace sympol
