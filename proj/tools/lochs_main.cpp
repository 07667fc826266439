#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lochs/commands.hpp"
#include "lochs/errors.hpp"

namespace {

int emit(const lochs::RunReport& rep) {
    std::cout << rep.to_text();
    return rep.exit_code;
}

int run(const std::string& command, const std::string& path, const std::string& name,
        std::size_t level, const std::string& out_path, const std::string& tol_path) {
    std::string text;
    try {
        text = lochs::read_text_file(path);
    } catch (const lochs::Error& e) {
        lochs::RunReport rep;
        rep.command = command;
        rep.pass = false;
        rep.exit_code = 2;
        rep.error = std::string(e.code()) + ": " + e.what();
        return emit(rep);
    }
    return emit(lochs::run_command(command, text, name, level, out_path, tol_path));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lochs — direct integrals of coordinate Hilbert chains: validation, operator "
                 "classification, commutants, and disintegration of abelian operator algebras"};
    app.require_subcommand(1);

    std::string tol_path;
    app.add_option("--tol-file", tol_path, "JSON file overriding tolerance fields for this run");

    std::string v_path;
    auto* v = app.add_subcommand("validate", "check every section of a system file");
    v->add_option("file", v_path, "system JSON file")->required();

    std::string c_path, c_op;
    auto* c = app.add_subcommand("classify",
                                 "place an operator: diagonalizable, decomposable only, or neither");
    c->add_option("file", c_path, "system JSON file")->required();
    c->add_option("--op", c_op, "operator name")->required();

    std::string k_path;
    std::size_t k_level = 1;
    auto* k = app.add_subcommand("commutant", "basis of the level commutant of the diagonal algebra");
    k->add_option("file", k_path, "system JSON file")->required();
    k->add_option("--level", k_level, "level (1-based)")->required();

    std::string e_path;
    auto* e = app.add_subcommand("commutant-equality",
                                 "compare the fiberwise algebra with the diagonal commutant per level");
    e->add_option("file", e_path, "system JSON file")->required();

    std::string d_path, d_algebra, d_out;
    auto* d = app.add_subcommand("disintegrate",
                                 "spectrum, fibers, and the conjugating isometries of an abelian algebra");
    d->add_option("file", d_path, "system JSON file")->required();
    d->add_option("--algebra", d_algebra, "presentation name")->required();
    d->add_option("--out", d_out, "write the disintegration artifact to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int cli_code = app.exit(err);
        return cli_code == 0 ? 0 : 2;
    }

    if (v->parsed()) return run("validate", v_path, "", 0, "", tol_path);
    if (c->parsed()) return run("classify", c_path, c_op, 0, "", tol_path);
    if (k->parsed()) return run("commutant", k_path, "", k_level, "", tol_path);
    if (e->parsed()) return run("commutant-equality", e_path, "", 0, "", tol_path);
    if (d->parsed()) return run("disintegrate", d_path, d_algebra, 0, d_out, tol_path);
    return 2;
}
