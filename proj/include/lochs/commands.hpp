#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lochs/system_io.hpp"

namespace lochs {

struct CheckRecord {
    std::string name;
    bool pass = true;
    std::optional<double> residual;
    std::string witness;
};

// Machine-readable run report. Serialization is deterministic for identical
// inputs and tolerance configuration, except for the wall-time field.
struct RunReport {
    std::string command;
    std::string input_digest;
    bool pass = true;
    int exit_code = 0; // 0 pass, 1 check failure, 2 input error
    std::string error; // set when a command aborts
    std::vector<CheckRecord> checks;
    Json data = Json::object();
    double wall_time_ms = 0.0;

    void add(CheckRecord rec);
    Json to_json() const;
    std::string to_text() const; // pretty JSON, trailing newline
};

// All commands accept the raw JSON text of a system file; *_file wrappers
// read the file first. tol_overlay, when present, is applied on top of the
// file's own tolerance section.
RunReport cmd_validate(const std::string& text, const std::optional<Json>& tol_overlay = {});
RunReport cmd_classify(const std::string& text, const std::string& operator_name,
                       const std::optional<Json>& tol_overlay = {});
RunReport cmd_commutant(const std::string& text, std::size_t level,
                        const std::optional<Json>& tol_overlay = {});
RunReport cmd_commutant_equality(const std::string& text, const std::optional<Json>& tol_overlay = {});
RunReport cmd_disintegrate(const std::string& text, const std::string& presentation_name,
                           const std::string& out_path = "",
                           const std::optional<Json>& tol_overlay = {});

std::string read_text_file(const std::string& path); // throws ParseError
std::optional<Json> read_tol_overlay(const std::string& path); // "" -> nullopt

RunReport run_command(const std::string& command, const std::string& text, const std::string& name,
                      std::size_t level, const std::string& out_path, const std::string& tol_path);

} // namespace lochs
