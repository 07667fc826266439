#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lochs/commands.hpp"
#include "lochs/errors.hpp"

namespace py = pybind11;

namespace {

using Rows = std::vector<std::vector<lochs::cplx>>;

lochs::CMatrix to_matrix(const Rows& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows[0].size() : 0;
    lochs::CMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        if (rows[i].size() != c) throw lochs::InvalidArgument("ragged matrix rows");
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

Rows from_matrix(const lochs::CMatrix& m) {
    Rows rows(m.rows(), std::vector<lochs::cplx>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
    return rows;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Direct integrals of coordinate Hilbert chains: numerical kernels and run commands.";

    py::register_exception<lochs::Error>(m, "LochsError");

    m.def(
        "hermitian_eig",
        [](const Rows& a) {
            auto r = lochs::hermitian_eig(to_matrix(a));
            return py::make_tuple(r.values, from_matrix(r.vectors));
        },
        py::arg("matrix"),
        "Eigenvalues (ascending) and a unitary of column eigenvectors of a Hermitian matrix.");

    m.def(
        "operator_norm", [](const Rows& a) { return lochs::operator_norm(to_matrix(a)); },
        py::arg("matrix"), "Largest singular value.");

    m.def(
        "joint_diagonalize",
        [](const std::vector<Rows>& mats) {
            std::vector<lochs::CMatrix> ms;
            for (const auto& a : mats) ms.push_back(to_matrix(a));
            auto r = lochs::joint_diagonalize(ms);
            std::vector<Rows> projections;
            for (const auto& p : r.projections) projections.push_back(from_matrix(p));
            return py::make_tuple(projections, r.labels);
        },
        py::arg("matrices"),
        "Joint spectral projections and label tuples of commuting normal matrices.");

    m.def(
        "commutant_solve",
        [](const std::vector<Rows>& mats) {
            std::vector<lochs::CMatrix> ms;
            for (const auto& a : mats) ms.push_back(to_matrix(a));
            std::vector<Rows> basis;
            for (const auto& b : lochs::commutant_solve(ms)) basis.push_back(from_matrix(b));
            return basis;
        },
        py::arg("matrices"), "Trace-orthonormal basis of the joint commutant.");

    m.def(
        "seminorm",
        [](const std::vector<std::size_t>& dims, const std::vector<Rows>& blocks, std::size_t level) {
            lochs::HilbertChain chain{dims};
            std::vector<lochs::CMatrix> bs;
            for (const auto& b : blocks) bs.push_back(to_matrix(b));
            return lochs::seminorm(lochs::make_local_operator(chain, bs), level);
        },
        py::arg("dims"), py::arg("blocks"), py::arg("level"),
        "Level seminorm (operator norm of the level block) of a compatible block family.");

    m.def(
        "is_local_family",
        [](const std::vector<std::size_t>& dims, const std::vector<Rows>& blocks) {
            lochs::HilbertChain chain{dims};
            std::vector<lochs::CMatrix> bs;
            for (const auto& b : blocks) bs.push_back(to_matrix(b));
            try {
                (void)lochs::make_local_operator(chain, bs);
                return true;
            } catch (const lochs::Error&) {
                return false;
            }
        },
        py::arg("dims"), py::arg("blocks"),
        "Whether the blocks satisfy the two-sided corner condition on the chain.");

    m.def(
        "run",
        [](const std::string& command, const std::string& system_json, const std::string& name,
           std::size_t level, const std::string& out_path, const std::string& tol_json) {
            std::optional<lochs::Json> overlay;
            if (!tol_json.empty()) {
                lochs::Json j = lochs::Json::parse(tol_json, nullptr, false);
                if (j.is_discarded()) throw lochs::ParseError("tolerance overlay is not valid JSON");
                overlay = std::move(j);
            }
            lochs::RunReport rep;
            if (command == "validate")
                rep = lochs::cmd_validate(system_json, overlay);
            else if (command == "classify")
                rep = lochs::cmd_classify(system_json, name, overlay);
            else if (command == "commutant")
                rep = lochs::cmd_commutant(system_json, level, overlay);
            else if (command == "commutant-equality")
                rep = lochs::cmd_commutant_equality(system_json, overlay);
            else if (command == "disintegrate")
                rep = lochs::cmd_disintegrate(system_json, name, out_path, overlay);
            else
                throw lochs::UnknownName("no command named \"" + command + "\"");
            return py::make_tuple(rep.to_text(), rep.exit_code);
        },
        py::arg("command"), py::arg("system_json"), py::arg("name") = "", py::arg("level") = 1,
        py::arg("out_path") = "", py::arg("tol_json") = "",
        "Run a report command on a system JSON string; returns (report_json, exit_code).");
}
