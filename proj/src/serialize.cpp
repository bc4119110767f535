#include "dynres/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dynres {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& doc, const std::string& what) {
  throw std::runtime_error(doc + " artifact: " + what);
}

const json& field(const json& j, const char* name, const std::string& doc) {
  auto it = j.find(name);
  if (it == j.end()) fail(doc, "missing field '" + std::string(name) + "'");
  return *it;
}

int int_field(const json& j, const char* name, const std::string& doc) {
  const json& f = field(j, name, doc);
  if (!f.is_number_integer())
    fail(doc, "field '" + std::string(name) + "' must be an integer");
  return f.get<int>();
}

double num_field(const json& j, const char* name, const std::string& doc) {
  const json& f = field(j, name, doc);
  if (!f.is_number())
    fail(doc, "field '" + std::string(name) + "' must be a number");
  return f.get<double>();
}

void check_header(const json& j, const char* kind, const std::string& doc) {
  if (!j.is_object()) fail(doc, "document is not a JSON object");
  const json& schema = field(j, "schema", doc);
  if (!schema.is_string() || schema.get<std::string>() != kSchemaTag)
    fail(doc, "field 'schema' must be \"" + std::string(kSchemaTag) + "\"");
  const json& k = field(j, "kind", doc);
  if (!k.is_string() || k.get<std::string>() != kind)
    fail(doc, "field 'kind' must be \"" + std::string(kind) + "\"");
}

json parse(const std::string& text, const std::string& doc) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(doc, "not valid JSON");
  return j;
}

json mat_to_json(const Mat& m) {
  json re = json::array(), im = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json rrow = json::array(), irow = json::array();
    for (int k = 0; k < m.cols(); ++k) {
      rrow.push_back(m(i, k).real());
      irow.push_back(m(i, k).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

Mat mat_from_json(const json& j, const char* name, const std::string& doc) {
  const json& re = field(j, "re", doc);
  const json& im = field(j, "im", doc);
  if (!re.is_array() || re.empty() || !re[0].is_array())
    fail(doc, "field '" + std::string(name) + ".re' must be a matrix");
  const size_t rows = re.size(), cols = re[0].size();
  if (!im.is_array() || im.size() != rows)
    fail(doc, "field '" + std::string(name) + ".im' must match re in shape");
  Mat m(rows, cols);
  for (size_t i = 0; i < rows; ++i) {
    if (re[i].size() != cols || im[i].size() != cols)
      fail(doc, "field '" + std::string(name) + "' has ragged rows");
    for (size_t k = 0; k < cols; ++k)
      m(i, k) = cxd(re[i][k].get<double>(), im[i][k].get<double>());
  }
  return m;
}

json channel_body(const Channel& ch) {
  return json{{"d_in", ch.d_in}, {"d_out", ch.d_out}, {"choi", mat_to_json(ch.choi)}};
}

Channel channel_from_body(const json& j, const std::string& doc) {
  Channel ch;
  ch.d_in = int_field(j, "d_in", doc);
  ch.d_out = int_field(j, "d_out", doc);
  ch.choi = mat_from_json(field(j, "choi", doc), "choi", doc);
  if (ch.d_in < 1 || ch.d_out < 1)
    fail(doc, "fields 'd_in'/'d_out' must be positive");
  if (ch.choi.rows() != ch.d_in * ch.d_out)
    fail(doc, "field 'choi' does not match d_in * d_out");
  if (!ch.is_valid(1e-7))
    fail(doc, "field 'choi' fails the CPTP checks at tolerance 1e-7");
  return ch;
}

std::string fixed9(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(9);
  os << v;
  return os.str();
}

}  // namespace

std::string channel_to_json(const Channel& ch) {
  json j = channel_body(ch);
  j["schema"] = kSchemaTag;
  j["kind"] = "channel";
  return j.dump(2);
}

Channel channel_from_json(const std::string& text) {
  const std::string doc = "channel";
  json j = parse(text, doc);
  check_header(j, "channel", doc);
  return channel_from_body(j, doc);
}

std::string box_to_json(const Box& b) {
  json table = json::array();
  for (int i = 0; i < b.table.size(); ++i) table.push_back(b.table(i));
  json j{{"schema", kSchemaTag},
         {"kind", "box"},
         {"scenario",
          {{"nx", b.scenario.nx},
           {"ny", b.scenario.ny},
           {"na", b.scenario.na},
           {"nb", b.scenario.nb}}},
         {"table", std::move(table)}};
  return j.dump(2);
}

Box box_from_json(const std::string& text) {
  const std::string doc = "box";
  json j = parse(text, doc);
  check_header(j, "box", doc);
  const json& sc = field(j, "scenario", doc);
  Box b;
  b.scenario.nx = int_field(sc, "nx", doc);
  b.scenario.ny = int_field(sc, "ny", doc);
  b.scenario.na = int_field(sc, "na", doc);
  b.scenario.nb = int_field(sc, "nb", doc);
  const json& table = field(j, "table", doc);
  if (!table.is_array()) fail(doc, "field 'table' must be an array");
  b.table = RVec(table.size());
  for (size_t i = 0; i < table.size(); ++i) {
    if (!table[i].is_number()) fail(doc, "field 'table' must hold numbers");
    b.table(i) = table[i].get<double>();
  }
  validate_box(b, 1e-7);
  return b;
}

std::string povm_set_to_json(const PovmSet& s) {
  json settings = json::array();
  for (const auto& setting : s.effects) {
    json outcomes = json::array();
    for (const Mat& e : setting) outcomes.push_back(mat_to_json(e));
    settings.push_back(std::move(outcomes));
  }
  json j{{"schema", kSchemaTag},
         {"kind", "povm_set"},
         {"d", s.d},
         {"nx", s.nx},
         {"na", s.na},
         {"effects", std::move(settings)}};
  return j.dump(2);
}

PovmSet povm_set_from_json(const std::string& text) {
  const std::string doc = "povm_set";
  json j = parse(text, doc);
  check_header(j, "povm_set", doc);
  PovmSet s;
  s.d = int_field(j, "d", doc);
  s.nx = int_field(j, "nx", doc);
  s.na = int_field(j, "na", doc);
  const json& effects = field(j, "effects", doc);
  if (!effects.is_array() || static_cast<int>(effects.size()) != s.nx)
    fail(doc, "field 'effects' must list one entry per setting");
  s.effects.resize(s.nx);
  for (int x = 0; x < s.nx; ++x) {
    if (!effects[x].is_array() || static_cast<int>(effects[x].size()) != s.na)
      fail(doc, "field 'effects' must list one matrix per outcome");
    s.effects[x].resize(s.na);
    for (int a = 0; a < s.na; ++a)
      s.effects[x][a] = mat_from_json(effects[x][a], "effects", doc);
  }
  validate_povm_set(s, 1e-7);
  return s;
}

std::string superchannel_to_json(const Superchannel& theta) {
  json j{{"schema", kSchemaTag},
         {"kind", "superchannel"},
         {"form", theta.form == SuperchannelForm::measure_prepare
                      ? "measure_prepare"
                      : "general"},
         {"d_in_in", theta.d_in_in},
         {"d_in_out", theta.d_in_out},
         {"d_out_in", theta.d_out_in},
         {"d_out_out", theta.d_out_out}};
  if (theta.form == SuperchannelForm::measure_prepare) {
    j["input_rho"] = mat_to_json(theta.input_rho);
    j["effect"] = mat_to_json(theta.effect);
    j["branch_main"] = channel_body(*theta.branch_main);
    j["branch_else"] = channel_body(*theta.branch_else);
  } else {
    j["mem_dim"] = theta.mem_dim;
    j["pre"] = channel_body(*theta.pre);
    j["post"] = channel_body(*theta.post);
  }
  return j.dump(2);
}

Superchannel superchannel_from_json(const std::string& text) {
  const std::string doc = "superchannel";
  json j = parse(text, doc);
  check_header(j, "superchannel", doc);
  const json& form = field(j, "form", doc);
  Superchannel theta;
  theta.d_in_in = int_field(j, "d_in_in", doc);
  theta.d_in_out = int_field(j, "d_in_out", doc);
  theta.d_out_in = int_field(j, "d_out_in", doc);
  theta.d_out_out = int_field(j, "d_out_out", doc);
  if (form == "measure_prepare") {
    theta.form = SuperchannelForm::measure_prepare;
    theta.input_rho = mat_from_json(field(j, "input_rho", doc), "input_rho", doc);
    theta.effect = mat_from_json(field(j, "effect", doc), "effect", doc);
    theta.branch_main = channel_from_body(field(j, "branch_main", doc), doc);
    theta.branch_else = channel_from_body(field(j, "branch_else", doc), doc);
  } else if (form == "general") {
    theta.form = SuperchannelForm::general;
    theta.mem_dim = int_field(j, "mem_dim", doc);
    theta.pre = channel_from_body(field(j, "pre", doc), doc);
    theta.post = channel_from_body(field(j, "post", doc), doc);
  } else {
    fail(doc, "field 'form' must be \"measure_prepare\" or \"general\"");
  }
  if (!superchannel_is_valid(theta, 1e-7))
    fail(doc, "loaded superchannel fails validation at tolerance 1e-7");
  return theta;
}

std::string monotone_to_json(const std::string& measure,
                             const MonotoneResult& r) {
  json j{{"schema", kSchemaTag},
         {"kind", "monotone_result"},
         {"measure", measure},
         {"finite", r.finite()},
         {"status", to_string(r.status)},
         {"bound_direction", to_string(r.bound_direction)},
         {"notes", r.notes}};
  if (r.finite())
    j["value"] = r.value;
  else
    j["value"] = nullptr;
  return j.dump(2);
}

std::string transformation_to_json(const Transformation& t) {
  json ledger = json::array();
  for (const LedgerEntry& e : t.certificate.monotone_ledger)
    ledger.push_back({{"name", e.name}, {"value", e.value}});
  json j{{"schema", kSchemaTag},
         {"kind", "transformation_report"},
         {"feasible", true},
         {"fidelity_achieved", t.certificate.fidelity_achieved},
         {"fidelity_guarantee", t.certificate.fidelity_guarantee},
         {"freeness",
          {{"pass", t.certificate.freeness_check.pass},
           {"worst_violation", t.certificate.freeness_check.worst_violation},
           {"regime", t.certificate.freeness_check.regime}}},
         {"ledger", std::move(ledger)},
         {"notes", t.certificate.notes},
         {"superchannel",
          nlohmann::json::parse(superchannel_to_json(t.theta))}};
  return j.dump(2);
}

std::string obstruction_to_json(const std::string& reason) {
  json j{{"schema", kSchemaTag},
         {"kind", "transformation_report"},
         {"feasible", false},
         {"reason", reason}};
  return j.dump(2);
}

std::string rate_to_json(const std::string& task, const RateResult& r) {
  json j{{"schema", kSchemaTag},
         {"kind", "rate_result"},
         {"task", task},
         {"value", r.value},
         {"target_label", r.target_label},
         {"target_value", r.target_value},
         {"monotone_value", r.monotone_value},
         {"bound_direction", to_string(r.bound_direction)},
         {"exact", r.exact},
         {"notes", r.notes}};
  return j.dump(2);
}

std::string isotropic_scan_to_csv(const std::vector<IsotropicRow>& rows) {
  std::string out = "p,r_max,r_s,r_min\n";
  for (const IsotropicRow& r : rows)
    out += fixed9(r.p) + "," + fixed9(r.r_max) + "," + fixed9(r.r_s) + "," +
           fixed9(r.r_min) + "\n";
  return out;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "eps,Q,C,bound_direction\n";
  for (const SweepRow& r : rows) {
    std::string dir;
    if (r.q_direction == r.c_direction) {
      dir = to_string(r.q_direction);
    } else {
      dir = std::string(to_string(r.q_direction)) + "/" +
            to_string(r.c_direction);
    }
    out += fixed9(r.eps) + "," + fixed9(r.quantum_capacity) + "," +
           fixed9(r.simulation_cost) + "," + dir + "\n";
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

}  // namespace dynres
