#include "doctest.h"
#include "properad/io.hpp"

using namespace properad;

namespace {

DGVectorSpace pair_space() {
  return io::dgvs_from_json(io::parse_json(R"({"basis": [{"name": "a", "degree": 0}, {"name": "b", "degree": 1}],
                                              "differential": [{"from": "a", "to": "b", "coeff": "1"}]})"));
}

template <class G>
TildeElement<G> load(const TildeModel<G>& model, const std::string& text) {
  return load_structure(model, io::structure_entries(model, io::parse_json(text)), true);
}

}  // namespace

TEST_CASE("malformed and incomplete documents are input errors") {
  CHECK_THROWS_AS(io::parse_json("{\"genus\": 0,"), InputError);
  CHECK_THROWS_AS(io::read_json_file("/nonexistent/surface.json"), InputError);
  CHECK_THROWS_AS(io::surface_from_json(io::parse_json(R"({"genus": 0, "out_cycles": []})")), InputError);
  CHECK_THROWS_AS(io::surface_from_json(io::parse_json(R"({"genus": 0, "out_cycles": [], "in_cycles": [], "x": 1})")),
                  InputError);
  CHECK_THROWS_AS(io::surface_from_json(io::parse_json(R"({"genus": "0", "out_cycles": [], "in_cycles": []})")),
                  InputError);
  CHECK_THROWS_AS(io::surface_from_json(io::parse_json(R"({"genus": -1, "out_cycles": [], "in_cycles": []})")),
                  InputError);
  // a label may sit on one cycle only
  CHECK_THROWS_AS(io::surface_from_json(io::parse_json(R"({"genus": 0, "out_cycles": [["x"]], "in_cycles": [["x"]]})")),
                  InputError);
}

TEST_CASE("surfaces round trip through JSON") {
  const OpenSurface s = make_open_surface(1, {Cycle({"x2", "x1", "x3"}), Cycle()}, {Cycle({"y"})});
  const auto text = io::surface_to_json(s).dump();
  CHECK(io::surface_from_json(io::parse_json(text)) == s);
  // cycles are stored from their least label
  CHECK(io::surface_to_json(s)["out_cycles"][1] == io::OrderedJson::parse(R"(["x1", "x3", "x2"])"));
}

TEST_CASE("gluing documents") {
  const Bijection eta = io::gluing_from_json(io::parse_json(R"({"pairs": [["y6", "x2"], ["z1", "x3"]]})"));
  CHECK(eta == Bijection{{"y6", "x2"}, {"z1", "x3"}});
  CHECK_THROWS_AS(io::gluing_from_json(io::parse_json(R"({"pairs": [["y6", "x2"], ["y6", "x3"]]})")), InputError);
  CHECK_THROWS_AS(io::gluing_from_json(io::parse_json(R"({"pairs": [["y6", "x2"], ["z1", "x2"]]})")), InputError);
  CHECK_THROWS_AS(io::gluing_from_json(io::parse_json(R"({"pairs": [["y6"]]})")), InputError);
}

TEST_CASE("dg vector spaces") {
  const DGVectorSpace v = pair_space();
  CHECK(v.dim() == 2);
  CHECK_THROWS_AS(io::dgvs_from_json(io::parse_json(R"({"basis": [{"name": "a", "degree": 0}],
      "differential": [{"from": "a", "to": "c", "coeff": "1"}]})")),
                  InputError);
  // d must raise the degree by one
  CHECK_THROWS_AS(io::dgvs_from_json(io::parse_json(R"({"basis": [{"name": "a", "degree": 0}, {"name": "b", "degree": 2}],
      "differential": [{"from": "a", "to": "b", "coeff": "1"}]})")),
                  InputError);
  CHECK_THROWS_AS(io::dgvs_from_json(io::parse_json(R"({"basis": [{"name": "a", "degree": 0}, {"name": "b", "degree": 1}],
      "differential": [{"from": "a", "to": "b", "coeff": "1/0"}]})")),
                  InputError);
}

TEST_CASE("closed structure entries") {
  const auto model = closed_tilde_model(pair_space());
  const auto L = load(model, R"({"flavor": "closed", "entries": [
      {"m": 1, "n": 2, "chi": 1, "J": ["b"], "I": ["a", "a"], "coeff": "-1/2"}]})");
  CHECK(L.size() == 1);
  CHECK_THROWS_AS(load(model, R"({"flavor": "open", "entries": []})"), InputError);
  CHECK_THROWS_AS(load(model, R"({"flavor": "closed", "entries": [
      {"m": 1, "n": 1, "chi": 0, "J": ["b"], "I": ["a"], "coeff": "1"}]})"),
                  InputError);
  CHECK_THROWS_AS(load(model, R"({"flavor": "closed", "entries": [
      {"m": 2, "n": 1, "chi": 1, "J": ["b"], "I": ["a"], "coeff": "1"}]})"),
                  InputError);
  CHECK_THROWS_AS(load(model, R"({"flavor": "closed", "entries": [
      {"m": 1, "n": 2, "chi": 1, "J": ["b"], "I": ["a", "q"], "coeff": "1"}]})"),
                  InputError);
  CHECK_THROWS_AS(load(model, R"({"flavor": "closed", "entries": [
      {"m": 1, "n": 2, "chi": 1, "J": ["b"], "I": ["a", "a"], "coeff": "1", "note": ""}]})"),
                  InputError);
}

TEST_CASE("open and open-closed structure entries") {
  const auto open = open_tilde_model(pair_space());
  CHECK(load(open, R"({"flavor": "open", "entries": [{"g": 0, "J_blocks": [["b", "a", "a"]], "I_blocks": [],
      "coeff": 1}]})")
            .size() == 1);
  CHECK_THROWS_AS(load(open, R"({"flavor": "open", "entries": [{"g": 0, "J_blocks": [["b", "a", "a"]],
      "I_blocks": [], "coeff": 1, "chi": 5}]})"),
                  InputError);
  const auto oc = open_closed_tilde_model(pair_space());
  CHECK(load(oc, R"({"flavor": "open-closed", "entries": [{"g": 0, "J_closed": ["b"], "J_blocks": [],
      "I_blocks": [["a"]], "coeff": "1"}]})")
            .size() == 1);
  CHECK_THROWS_AS(load(oc, R"({"flavor": "open-closed", "entries": [{"g": 0, "J_closed": "b", "J_blocks": [],
      "I_blocks": [["a"]], "coeff": "1"}]})"),
                  InputError);
}

TEST_CASE("reports serialize deterministically") {
  const auto model = closed_tilde_model(pair_space());
  const Truncation t{3};
  const CheckReport r = master_check(model, {}, t);
  const std::string text = io::report_to_json(r).dump(2);
  CHECK(text == io::report_to_json(master_check(model, {}, t)).dump(2));
  const auto j = io::OrderedJson::parse(text);
  CHECK(j["checker"] == "master");
  CHECK(j["verdict"] == "PASS");
  CHECK(j["components"][0]["chi"] == 0);
  CHECK(j.begin().key() == "checker");
  ComponentReport all{-1, -1, 2, Verdict::skipped, {}};
  CHECK(io::component_to_json(all)["arities"] == "all");
  CHECK(io::verdicts_agree({r, ibl_component_relations(model, {}, t), operator_square_check(model, {}, t)}));
}
