#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "lochs/commands.hpp"
#include "lochs/errors.hpp"
#include "lochs/system_io.hpp"

using namespace lochs;

#ifndef LOCHS_DEMO_DIR
#define LOCHS_DEMO_DIR "demos"
#endif

namespace {

std::string demo(const std::string& name) {
    return read_text_file(std::string(LOCHS_DEMO_DIR) + "/" + name);
}

Json strip_volatile(const RunReport& rep) {
    Json j = rep.to_json();
    j.erase("wall_time_ms");
    return j;
}

} // namespace

TEST_CASE("complex and matrix literals parse in both notations") {
    CHECK(std::abs(json_to_cplx(Json(2.5)) - cplx(2.5, 0.0)) == 0.0);
    CHECK(std::abs(json_to_cplx(Json::parse("[1, -2]")) - cplx(1.0, -2.0)) == 0.0);
    CHECK_THROWS_AS((void)json_to_cplx(Json::parse("[1]")), ParseError);
    CHECK_THROWS_AS((void)json_to_cplx(Json::parse("\"i\"")), ParseError);

    const CMatrix m = json_to_matrix(Json::parse("[[1, [0, 1]], [0, 2]]"));
    CHECK(m.rows() == 2);
    CHECK(m(0, 1) == cplx(0.0, 1.0));
    CHECK_THROWS_AS((void)json_to_matrix(Json::parse("[[1], [1, 2]]")), ParseError);
    // round trip through the emitter
    const CMatrix back = json_to_matrix(matrix_to_json(m));
    CHECK(max_abs(back - m) == 0.0);
}

TEST_CASE("system files parse with strict sections and stable digests") {
    const std::string text = demo("basic_system.json");
    const SystemDescription sys = parse_system(text);
    CHECK(sys.has_measure);
    CHECK(sys.has_fibers);
    CHECK(sys.chains.count("K") == 1);
    CHECK(sys.operators.size() == 3);
    CHECK(sys.presentations.count("weights_algebra") == 1);
    CHECK(sys.measure.weights.at("a") == Rat(1, 2));
    CHECK(sys.measure.weights.at("b") == Rat(2));

    const SystemDescription again = parse_system(text);
    CHECK(sys.digest == again.digest);
    CHECK(sys.digest.size() == 16);
    const SystemDescription other = parse_system(demo("scalar_algebra.json"));
    CHECK(sys.digest != other.digest);

    CHECK_THROWS_AS((void)parse_system("{\"unexpected\": 1}"), ParseError);
    CHECK_THROWS_AS((void)parse_system("not json at all"), ParseError);
    CHECK_THROWS_AS((void)parse_system(demo("malformed.json")), ParseError);
}

TEST_CASE("tolerance overlays touch exactly the named fields") {
    Tolerances base = default_tolerances();
    const Tolerances out = tolerances_from_json(Json::parse("{\"local_block\": 0.25}"), base);
    CHECK(out.local_block == 0.25);
    CHECK(out.fiber_block == base.fiber_block);
    CHECK_THROWS_AS((void)tolerances_from_json(Json::parse("{\"no_such\": 1}"), base), ParseError);
}

TEST_CASE("validate accepts the shipped systems and flags the broken one") {
    const RunReport ok = cmd_validate(demo("basic_system.json"));
    CHECK(ok.exit_code == 0);
    CHECK(ok.pass);
    for (const auto& c : ok.checks) CHECK(c.pass);
    CHECK(ok.data.contains("limit_atoms"));
    CHECK(ok.data["level_dims"] == Json::parse("[2, 4]"));

    const RunReport bad = cmd_validate(demo("broken_trace.json"));
    CHECK(bad.exit_code == 1);
    CHECK(!bad.pass);
    bool trace_named = false;
    for (const auto& c : bad.checks)
        if (!c.pass && c.name.find("trace") != std::string::npos) trace_named = true;
    CHECK(trace_named);

    const RunReport mal = cmd_validate(demo("malformed.json"));
    CHECK(mal.exit_code == 2);
    CHECK(!mal.error.empty());
}

TEST_CASE("reports are byte-stable apart from the wall time") {
    const std::string text = demo("basic_system.json");
    const Json a = strip_volatile(cmd_validate(text));
    const Json b = strip_volatile(cmd_validate(text));
    CHECK(a.dump() == b.dump());
}

TEST_CASE("classify surfaces the class and the witness through the report") {
    const RunReport diag = cmd_classify(demo("basic_system.json"), "identity_on_space");
    CHECK(diag.exit_code == 0);
    CHECK(diag.data["class"] == "diagonalizable");

    const RunReport dec = cmd_classify(demo("decomposable_only.json"), "fiberwise_scalars");
    CHECK(dec.exit_code == 0);
    CHECK(dec.data["class"] == "decomposable_only");
    CHECK(dec.data["witness"]["kind"] == "atom_merge");

    const RunReport lbo = cmd_classify(demo("fiber_swap.json"), "swap_first_two_fibers");
    CHECK(lbo.exit_code == 0);
    CHECK(lbo.data["class"] == "locally_bounded_only");
    CHECK(lbo.data["witness"]["kind"] == "off_diagonal");

    const RunReport missing = cmd_classify(demo("basic_system.json"), "no_such_operator");
    CHECK(missing.exit_code == 2);
}

TEST_CASE("commutant reports the block-structure dimension") {
    const RunReport rep = cmd_commutant(demo("basic_system.json"), 2);
    CHECK(rep.exit_code == 0);
    // separated atoms with fiber dims 2, 1, 1: commutant dimension 4 + 1 + 1
    CHECK(rep.data["dimension"] == 6);
    CHECK(rep.data["expected_dimension"] == 6);
    CHECK(rep.data["basis"].size() == 6);

    const RunReport out_of_range = cmd_commutant(demo("basic_system.json"), 9);
    CHECK(out_of_range.exit_code == 2);
}

TEST_CASE("commutant-equality splits separated and merged levels") {
    const RunReport sep = cmd_commutant_equality(demo("basic_system.json"));
    CHECK(sep.exit_code == 0);
    CHECK(sep.data["equality_expected_everywhere"] == true);

    const RunReport merged = cmd_commutant_equality(demo("decomposable_only.json"));
    CHECK(merged.exit_code == 0); // containment still holds; equality not claimed
    CHECK(merged.data["equality_expected_everywhere"] == false);
    bool saw_unequal = false;
    for (const auto& lv : merged.data["levels"])
        if (lv["equal"] == false) saw_unequal = true;
    CHECK(saw_unequal);
}

TEST_CASE("disintegrate reports spectra, fibers, and residuals, and writes the artifact") {
    const RunReport scalar = cmd_disintegrate(demo("scalar_algebra.json"), "scalars");
    CHECK(scalar.exit_code == 0);
    REQUIRE(scalar.data["spectrum"].size() == 2);
    CHECK(scalar.data["spectrum"][0]["keys"].size() == 1); // one spectral point
    CHECK(scalar.data["spectrum"][1]["keys"].size() == 1);

    const std::string artifact_path = "lochs_test_artifact.json";
    const RunReport diag = cmd_disintegrate(demo("diag_algebra.json"), "two_diagonals", artifact_path);
    CHECK(diag.exit_code == 0);
    CHECK(diag.data["spectrum"][1]["keys"].size() == 3);
    for (const auto& [key, dims] : diag.data["fiber_dims"].items()) {
        (void)key;
        CHECK(dims.back() == 1); // simple joint spectrum: rank-one projections
    }
    std::ifstream in(artifact_path);
    REQUIRE(in.good());
    Json artifact;
    in >> artifact;
    in.close();
    std::remove(artifact_path.c_str());
    CHECK(artifact["levels"].size() == 2);
    CHECK(artifact["residuals"]["isometry"].get<double>() <= 1e-8);

    const RunReport bad = cmd_disintegrate(demo("noncommuting_algebra.json"), "not_abelian");
    CHECK(bad.exit_code == 1);
    CHECK(bad.error.find("NotAbelian") != std::string::npos);
}

TEST_CASE("tolerance overlays flow through run_command") {
    // an absurdly loose local_block makes a corner-violating family acceptable
    const std::string text = R"({
      "hilbert_chains": { "K": { "dims": [1, 2] } },
      "operators": {
        "off": { "kind": "levels", "chain": "K",
                 "blocks": [[[1]], [[1.2, 0], [0, 2]]] }
      }
    })";
    const RunReport strict = cmd_validate(text);
    CHECK(strict.exit_code == 1); // corner mismatch at default tolerance

    const RunReport loose = cmd_validate(text, Json::parse("{\"local_block\": 0.5}"));
    CHECK(loose.exit_code == 0);

    const RunReport unknown = run_command("frobnicate", text, "", 0, "", "");
    CHECK(unknown.exit_code == 2);
}
