// Command-line surface for the sympol library: loads an IR document, runs
// one subcommand against it, and emits the extended document.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sympol/io.hpp"

namespace {

std::string resolve_path(const std::string& path) {
    if (path.empty() || path[0] == '/') return path;
    const char* ws = std::getenv("SYMPOL_WORKSPACE");
    if (ws && *ws) return std::string(ws) + "/" + path;
    return path;
}

std::string read_file(const std::string& path) {
    std::ifstream in(resolve_path(path));
    if (!in) throw std::runtime_error("cannot open input file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CommonArgs {
    std::string input;
    std::string emit;
    std::vector<std::string> targets;
    sympol::RunOptions opts;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool multi_target = false) {
    cmd->add_option("input", args.input, "input IR document")->required();
    if (multi_target)
        cmd->add_option("--target", args.targets, "record id(s) to operate on");
    else
        cmd->add_option("--target", args.targets, "record id to operate on")->expected(0, 1);
    cmd->add_option("--emit", args.emit, "write the result document to this path");
    cmd->add_option("--max-order", args.opts.max_order, "polynomial order bound");
    cmd->add_option("--max-level", args.opts.max_level, "filtration level bound");
    cmd->add_option("--seed", args.opts.seed, "seed echoed for property suites");
    cmd->add_option(
        "--weight-window",
        [&args](const std::vector<std::string>& vals) {
            int lo, hi;
            char colon;
            std::istringstream ss(vals[0]);
            if (!(ss >> lo >> colon >> hi) || colon != ':') return false;
            args.opts.weight_window = {lo, hi};
            return true;
        },
        "weight window r:s");
    cmd->add_option("--degree", args.opts.degree, "cohomological degree of the slice");
    cmd->add_option(
        "--degree-window",
        [&args](const std::vector<std::string>& vals) {
            int lo, hi;
            char colon;
            std::istringstream ss(vals[0]);
            if (!(ss >> lo >> colon >> hi) || colon != ':') return false;
            args.opts.degree_window = {lo, hi};
            return true;
        },
        "total-degree window lo:hi");
    cmd->add_option("--weight", args.opts.weight, "weight of the slice");
    cmd->add_option("--up-to-degree", args.opts.up_to_degree, "chain degree bound");
    cmd->add_option("--postnikov", args.opts.postnikov_level, "Postnikov truncation level");
    cmd->add_option("--structure-weight", args.opts.structure_weight, "structure weight m");
    cmd->add_option("--extension", args.opts.extension, "small-extension record id");
    cmd->add_option("--gauge", args.opts.gauge, "gauge parameter record id");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact computer algebra for weighted shifted symplectic and Poisson structures"};
    app.require_subcommand(1);

    const std::vector<std::string> commands = {
        "validate", "homology", "resolve",  "truncate",  "sp-check",
        "lag-check", "schouten", "mc-check", "convert",   "verify",
        "ce",        "formal-sp", "casimir",  "mc-extend", "gauge"};

    std::map<std::string, CommonArgs> args;
    std::string convert_direction;
    for (const std::string& name : commands) {
        CLI::App* cmd = app.add_subcommand(name);
        bool multi = (name == "schouten" || name == "validate");
        if (name == "convert")
            cmd->add_option("direction", convert_direction, "sp->poisson or poisson->sp")
                ->required();
        add_common(cmd, args[name], multi);
    }

    CLI11_PARSE(app, argc, argv);

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    CommonArgs& a = args[name];
    a.opts.targets = a.targets;
    a.opts.direction = convert_direction;

    try {
        sympol::Document doc = sympol::parse_document(read_file(a.input));
        sympol::RunOutcome outcome = sympol::run_command(name, doc, a.opts);
        std::string printed = sympol::print_document(outcome.doc);
        if (!a.emit.empty()) {
            std::ofstream out(resolve_path(a.emit));
            if (!out) {
                std::cerr << "error: cannot open emit path: " << a.emit << "\n";
                return 2;
            }
            out << printed;
        } else {
            std::cout << printed;
        }
        return outcome.exit_code;
    } catch (const sympol::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const sympol::DanglingReferenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
