#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include "dynres/linalg.hpp"
#include "dynres/serialize.hpp"

using namespace dynres;

TEST_CASE("channel json round-trip is exact") {
  Rng rng(909001);
  Channel ch = random_channel(rng, 2, 3);
  std::string text = channel_to_json(ch);
  Channel back = channel_from_json(text);
  REQUIRE(back.d_in == ch.d_in);
  REQUIRE(back.d_out == ch.d_out);
  REQUIRE((back.choi - ch.choi).norm() == 0.0);

  // Emitting the reloaded object reproduces the document byte for byte.
  REQUIRE(channel_to_json(back) == text);
}

TEST_CASE("channel loader names the offending field") {
  Channel id = identity_channel(2);
  std::string good = channel_to_json(id);

  auto drop = [&](const char* key) {
    auto j = nlohmann::json::parse(good);
    j.erase(key);
    return j.dump();
  };

  REQUIRE_THROWS_WITH(channel_from_json(drop("schema")),
                      Catch::Matchers::ContainsSubstring("'schema'"));
  REQUIRE_THROWS_WITH(channel_from_json(drop("kind")),
                      Catch::Matchers::ContainsSubstring("'kind'"));
  REQUIRE_THROWS_WITH(channel_from_json(drop("d_in")),
                      Catch::Matchers::ContainsSubstring("'d_in'"));
  REQUIRE_THROWS_WITH(channel_from_json(drop("choi")),
                      Catch::Matchers::ContainsSubstring("'choi'"));

  auto wrong_kind = nlohmann::json::parse(good);
  wrong_kind["kind"] = "box";
  REQUIRE_THROWS_WITH(channel_from_json(wrong_kind.dump()),
                      Catch::Matchers::ContainsSubstring("'kind'"));

  auto bad_dim = nlohmann::json::parse(good);
  bad_dim["d_in"] = 3;
  REQUIRE_THROWS_WITH(channel_from_json(bad_dim.dump()),
                      Catch::Matchers::ContainsSubstring("choi"));

  auto scaled = nlohmann::json::parse(good);
  scaled["choi"]["re"][0][0] = 5.0;
  REQUIRE_THROWS_WITH(channel_from_json(scaled.dump()),
                      Catch::Matchers::ContainsSubstring("CPTP"));

  REQUIRE_THROWS_WITH(channel_from_json("not json at all"),
                      Catch::Matchers::ContainsSubstring("not valid JSON"));
}

TEST_CASE("box json round-trip preserves the table") {
  Box b = isotropic_box(0.25);
  std::string text = box_to_json(b);
  Box back = box_from_json(text);
  REQUIRE(back.scenario.nx == b.scenario.nx);
  REQUIRE(back.scenario.nb == b.scenario.nb);
  REQUIRE((back.table - b.table).norm() == 0.0);

  auto j = nlohmann::json::parse(text);
  j["table"][0] = -0.5;
  REQUIRE_THROWS(box_from_json(j.dump()));

  j = nlohmann::json::parse(text);
  j.erase("scenario");
  REQUIRE_THROWS_WITH(box_from_json(j.dump()),
                      Catch::Matchers::ContainsSubstring("'scenario'"));
}

TEST_CASE("povm set json round-trip") {
  Rng rng(909002);
  PovmSet s = random_povm_set(rng, 2, 2, 2);
  std::string text = povm_set_to_json(s);
  PovmSet back = povm_set_from_json(text);
  REQUIRE(back.d == s.d);
  REQUIRE(back.nx == s.nx);
  for (int x = 0; x < s.nx; ++x)
    for (int a = 0; a < s.na; ++a)
      REQUIRE((back.effects[x][a] - s.effects[x][a]).norm() == 0.0);

  auto j = nlohmann::json::parse(text);
  j["effects"].erase(1);
  REQUIRE_THROWS_WITH(povm_set_from_json(j.dump()),
                      Catch::Matchers::ContainsSubstring("'effects'"));
}

TEST_CASE("superchannel json round-trip in both forms") {
  Superchannel gen = identity_superchannel(2, 2);
  Superchannel gen_back = superchannel_from_json(superchannel_to_json(gen));
  REQUIRE(gen_back.form == SuperchannelForm::general);
  REQUIRE(gen_back.mem_dim == gen.mem_dim);
  REQUIRE((gen_back.pre->choi - gen.pre->choi).norm() == 0.0);
  REQUIRE((gen_back.post->choi - gen.post->choi).norm() == 0.0);

  Superchannel mp;
  mp.form = SuperchannelForm::measure_prepare;
  mp.d_in_in = 2;
  mp.d_in_out = 2;
  mp.d_out_in = 2;
  mp.d_out_out = 2;
  mp.input_rho = Mat::Identity(2, 2) / 2.0;
  mp.effect = Mat::Identity(4, 4) * 0.5;
  mp.branch_main = identity_channel(2);
  mp.branch_else = depolarizing_channel(2, 1.0);
  REQUIRE(superchannel_is_valid(mp));

  Superchannel mp_back = superchannel_from_json(superchannel_to_json(mp));
  REQUIRE(mp_back.form == SuperchannelForm::measure_prepare);
  REQUIRE((mp_back.input_rho - mp.input_rho).norm() == 0.0);
  REQUIRE((mp_back.effect - mp.effect).norm() == 0.0);
  REQUIRE((mp_back.branch_main->choi - mp.branch_main->choi).norm() == 0.0);
  REQUIRE((mp_back.branch_else->choi - mp.branch_else->choi).norm() == 0.0);

  auto j = nlohmann::json::parse(superchannel_to_json(mp));
  j["form"] = "mystery";
  REQUIRE_THROWS_WITH(superchannel_from_json(j.dump()),
                      Catch::Matchers::ContainsSubstring("'form'"));
}

TEST_CASE("result documents carry schema, kind, and bound direction") {
  MonotoneResult r;
  r.value = 4.0 / 3.0;
  r.status = SolveStatus::optimal;
  r.bound_direction = BoundDirection::exact;
  r.notes = "lp path";
  auto j = nlohmann::json::parse(monotone_to_json("rmax", r));
  REQUIRE(j["schema"] == kSchemaTag);
  REQUIRE(j["kind"] == "monotone_result");
  REQUIRE(j["measure"] == "rmax");
  REQUIRE(j["value"].get<double>() == Catch::Approx(4.0 / 3.0));
  REQUIRE(j["bound_direction"] == "exact");
  REQUIRE(j["finite"] == true);

  MonotoneResult div;
  div.value = std::numeric_limits<double>::infinity();
  div.status = SolveStatus::infeasible;
  auto jd = nlohmann::json::parse(monotone_to_json("rs", div));
  REQUIRE(jd["finite"] == false);
  REQUIRE(jd["value"].is_null());

  auto jo = nlohmann::json::parse(obstruction_to_json("precondition fails"));
  REQUIRE(jo["kind"] == "transformation_report");
  REQUIRE(jo["feasible"] == false);
  REQUIRE(jo["reason"] == "precondition fails");

  Transformation t;
  t.theta = identity_superchannel(2, 2);
  t.certificate.fidelity_achieved = 0.97;
  t.certificate.fidelity_guarantee = 0.9;
  t.certificate.monotone_ledger.push_back({"rh_resource", 3.5});
  t.certificate.notes = "hand built";
  auto jt = nlohmann::json::parse(transformation_to_json(t));
  REQUIRE(jt["feasible"] == true);
  REQUIRE(jt["fidelity_achieved"].get<double>() == Catch::Approx(0.97));
  REQUIRE(jt["ledger"][0]["name"] == "rh_resource");
  REQUIRE(jt["superchannel"]["kind"] == "superchannel");

  // The embedded superchannel re-ingests as its own artifact.
  Superchannel back = superchannel_from_json(jt["superchannel"].dump());
  REQUIRE(back.d_in_in == 2);

  RateResult rr;
  rr.value = 1.0;
  rr.target_label = "id_2";
  rr.target_value = 4.0;
  rr.monotone_value = 4.2;
  rr.bound_direction = BoundDirection::exact;
  rr.exact = true;
  auto jr = nlohmann::json::parse(rate_to_json("distill", rr));
  REQUIRE(jr["kind"] == "rate_result");
  REQUIRE(jr["task"] == "distill");
  REQUIRE(jr["target_label"] == "id_2");
  REQUIRE(jr["bound_direction"] == "exact");
}

TEST_CASE("csv emitters use fixed precision and stable headers") {
  std::vector<IsotropicRow> rows(2);
  rows[0] = {0.0, 4.0 / 3.0, 1.5, 4.0 / 3.0};
  rows[1] = {0.5, 1.2, 1.3, 1.1};
  std::string csv = isotropic_scan_to_csv(rows);
  REQUIRE(csv ==
          "p,r_max,r_s,r_min\n"
          "0.000000000,1.333333333,1.500000000,1.333333333\n"
          "0.500000000,1.200000000,1.300000000,1.100000000\n");

  SweepRow a;
  a.eps = 0.0;
  a.quantum_capacity = 1.0;
  a.simulation_cost = 1.0;
  a.q_direction = BoundDirection::exact;
  a.c_direction = BoundDirection::exact;
  SweepRow b = a;
  b.eps = 0.1;
  b.q_direction = BoundDirection::lower;
  b.c_direction = BoundDirection::upper;
  std::string sweep = sweep_to_csv({a, b});
  REQUIRE(sweep ==
          "eps,Q,C,bound_direction\n"
          "0.000000000,1.000000000,1.000000000,exact\n"
          "0.100000000,1.000000000,1.000000000,lower/upper\n");

  // Re-emitting the same rows is byte-identical.
  REQUIRE(sweep_to_csv({a, b}) == sweep);
}

TEST_CASE("text file helpers round-trip and report failures") {
  const std::string path = "/tmp/dynres_serialize_test.txt";
  write_text_file(path, "line one\nline two\n");
  REQUIRE(read_text_file(path) == "line one\nline two\n");
  REQUIRE_THROWS_WITH(read_text_file("/nonexistent/nope.json"),
                      Catch::Matchers::ContainsSubstring("/nonexistent/nope.json"));
}
