#ifndef SYMPOL_IO_HPP
#define SYMPOL_IO_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sympol/cdga.hpp"
#include "sympol/correspondence.hpp"
#include "sympol/derham.hpp"
#include "sympol/dgla.hpp"
#include "sympol/polyvector.hpp"

namespace sympol {

class ParseError : public std::runtime_error {
  public:
    ParseError(int line_, int col_, const std::string& what)
        : std::runtime_error("parse error at " + std::to_string(line_) + ":" +
                             std::to_string(col_) + ": " + what),
          line(line_),
          col(col_) {}
    int line;
    int col;
};

class UnknownFieldError : public ParseError {
  public:
    UnknownFieldError(int line, int col, const std::string& field)
        : ParseError(line, col, "unknown field '" + field + "'") {}
};

class DanglingReferenceError : public std::runtime_error {
  public:
    explicit DanglingReferenceError(const std::string& id)
        : std::runtime_error("dangling reference to id '" + id + "'") {}
};

struct AlgebraRecord {
    std::string id;
    FreeWCDGA algebra;
    std::vector<Element> relations;
};

struct DglaRecord {
    std::string id;
    DGLA dgla;
};

struct PairingRecord {
    std::string id;
    std::string dgla_ref;
    CyclicPairing pairing;
};

struct FormStructureRecord {
    std::string id;
    std::string algebra_ref;
    PreSymplectic omega;
};

struct PolyStructureRecord {
    std::string id;
    std::string algebra_ref;
    int n = 0;
    int m = 0;
    std::optional<int> max_xi_order;
    Element pi;
};

struct MapRecord {
    std::string id;
    std::string from_ref;
    std::string to_ref;
    CdgaMap f;
};

struct IsotropicRecord {
    std::string id;
    std::string map_ref;
    std::string form_ref;
    std::map<int, Element> lambda;
    int i_max = 2;
    bool form_truncated = false;
};

struct LElementRecord {
    std::string id;
    std::string dgla_ref;
    std::string algebra_ref;
    LElement value;
};

struct ExtensionRecord {
    std::string id;
    std::string algebra_ref;  // the total algebra A'
    std::vector<Monomial> ideal;
};

struct WitnessRecord {
    std::string id;
    std::string form_ref;
    std::string poly_ref;
    Element homotopy;
    int max_level = 2;
};

struct ResultRecord {
    std::string id;
    std::string command;
    std::string target;
    bool pass = true;
    std::vector<std::string> notes;
    std::vector<std::pair<std::string, Element>> payloads;
};

using Entity = std::variant<AlgebraRecord, DglaRecord, PairingRecord, FormStructureRecord,
                            PolyStructureRecord, MapRecord, IsotropicRecord, LElementRecord,
                            ExtensionRecord, WitnessRecord, ResultRecord>;

struct Document {
    int format_version = 1;
    std::vector<Entity> entities;

    const Entity* find(const std::string& id) const;
    template <typename T>
    const T* find_as(const std::string& id) const {
        const Entity* e = find(id);
        if (!e) return nullptr;
        return std::get_if<T>(e);
    }
    template <typename T>
    const T& require(const std::string& id) const {
        const T* p = find_as<T>(id);
        if (!p) throw DanglingReferenceError(id);
        return *p;
    }
    std::string fresh_id(const std::string& base) const;
};

Document parse_document(const std::string& text);
std::string print_document(const Document& doc);

struct RunOptions {
    std::vector<std::string> targets;
    std::optional<int> max_order;
    std::optional<int> max_level;
    std::optional<std::pair<int, int>> weight_window;
    std::optional<std::pair<int, int>> degree_window;
    std::optional<int> postnikov_level;
    std::optional<int> degree;
    std::optional<int> weight;
    std::optional<int> up_to_degree;
    std::optional<int> structure_weight;
    std::optional<long> seed;
    std::string direction;  // for convert
    std::string extension;  // for mc-extend
    std::string gauge;      // for gauge
};

struct RunOutcome {
    Document doc;
    int exit_code = 0;  // 0 pass, 1 mathematical failure, 2 input error
};

/// Executes one CLI command against the document, appending result records
/// and any produced structures.  Throws nothing: input errors are reported
/// through exit code 2 with a result record carrying the message.
RunOutcome run_command(const std::string& command, const Document& doc, const RunOptions& opts);

}  // namespace sympol

#endif
