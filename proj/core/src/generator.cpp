#include "sympol/generator.hpp"

#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

namespace sympol {

namespace {

struct GenRecord {
    GenKind kind;
    std::string name;
    int degree;
    int weight;
};

struct Pool {
    std::mutex mu;
    std::vector<GenRecord> rows;
    std::map<std::tuple<GenKind, std::string, int, int>, uint32_t> index;

    Pool() {
        // id 0 is a reserved null handle
        rows.push_back({GenKind::base, "<null>", 0, 0});
    }
};

Pool& pool() {
    static Pool p;
    return p;
}

}  // namespace

const char* kind_name(GenKind k) {
    switch (k) {
        case GenKind::base: return "base";
        case GenKind::form: return "form";
        case GenKind::tangent: return "tangent";
    }
    return "?";
}

Generator Generator::make(GenKind kind, const std::string& name, int degree, int weight) {
    Pool& p = pool();
    std::lock_guard<std::mutex> lock(p.mu);
    auto key = std::make_tuple(kind, name, degree, weight);
    auto it = p.index.find(key);
    if (it != p.index.end()) return Generator(it->second);
    uint32_t id = static_cast<uint32_t>(p.rows.size());
    p.rows.push_back({kind, name, degree, weight});
    p.index.emplace(key, id);
    return Generator(id);
}

GenKind Generator::kind() const { return pool().rows[id_].kind; }
const std::string& Generator::name() const { return pool().rows[id_].name; }
int Generator::degree() const { return pool().rows[id_].degree; }
int Generator::weight() const { return pool().rows[id_].weight; }

bool Generator::order_less(Generator a, Generator b) {
    if (a.id_ == b.id_) return false;
    const GenRecord& ra = pool().rows[a.id_];
    const GenRecord& rb = pool().rows[b.id_];
    if (ra.kind != rb.kind) return ra.kind < rb.kind;
    if (ra.name != rb.name) return ra.name < rb.name;
    if (ra.degree != rb.degree) return ra.degree < rb.degree;
    return ra.weight < rb.weight;
}

std::string Generator::debug_str() const {
    std::ostringstream os;
    const GenRecord& r = pool().rows[id_];
    os << kind_name(r.kind) << ":" << r.name << "(z=" << r.degree << ",w=" << r.weight << ")";
    return os.str();
}

}  // namespace sympol
