#include "dynres/tasks.hpp"

#include "dynres/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dynres {

namespace {

// Rounding slack for floor/ceil against solver-accurate values. Kept below
// the precondition slack of the transformation constructions so a rounded
// target never fails its own attachment.
constexpr double kRoundSlack = 5e-8;
// Families stop growing once a member's value passes this cap.
constexpr double kValueCap = 64.0;
constexpr double kFlagTol = 1e-6;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void append_note(std::string* notes, const std::string& line) {
  if (!notes->empty()) *notes += "; ";
  *notes += line;
}

double slack_at(double x) { return kRoundSlack * std::max(1.0, std::abs(x)); }

FreeSetDescriptor default_allowed(const FreeSetDescriptor& desc) {
  return desc.box ? ns_boxes(desc.box->nx, desc.box->ny, desc.box->na,
                             desc.box->nb)
                  : cptp_channels(desc.d_in, desc.d_out);
}

// The robustness flavor a family's equality flag compares against: the
// generalized robustness (mixing over the allowed set) for affine families,
// the standard one (mixing inside the free set) otherwise.
MonotoneResult flag_robustness(const Target& t, bool affine) {
  if (affine) {
    FreeSetDescriptor allowed = default_allowed(t.desc);
    return robustness(t.channel, t.desc, allowed);
  }
  return robustness(t.channel, t.desc, t.desc);
}

// Numerically check value == robustness on the leading nontrivial members
// and record what was compared.
bool verify_equality_flag(TargetSet* ts, int max_members) {
  int checked = 0;
  double worst_gap = 0;
  for (const Target& t : ts->targets) {
    if (checked >= max_members) break;
    if (t.channel.d_in * t.channel.d_out == 1) continue;  // trivial signature
    MonotoneResult rob = flag_robustness(t, ts->affine);
    if (!rob.finite()) {
      append_note(&ts->verification_notes,
                  "equality flag fails at " + t.label +
                      ": the robustness diverges");
      return false;
    }
    double gap = std::abs(rob.value - t.value);
    worst_gap = std::max(worst_gap, gap);
    if (gap > kFlagTol * std::max(1.0, std::abs(t.value))) {
      append_note(&ts->verification_notes,
                  "equality flag fails at " + t.label + ": support measure " +
                      fmt(t.value) + " vs robustness " + fmt(rob.value));
      return false;
    }
    ++checked;
  }
  if (checked > 0)
    append_note(&ts->verification_notes,
                "equality flag verified on " + std::to_string(checked) +
                    " member(s), worst gap " + fmt(worst_gap));
  return true;
}

void finish_target_set(TargetSet* ts, bool verify_flags) {
  std::sort(ts->targets.begin(), ts->targets.end(),
            [](const Target& a, const Target& b) { return a.value < b.value; });
  for (size_t i = 1; i < ts->targets.size(); ++i) {
    if (ts->targets[i].value <= ts->targets[i - 1].value + 1e-9)
      throw std::logic_error("target set '" + ts->family +
                             "': values must be strictly increasing ('" +
                             ts->targets[i - 1].label + "' and '" +
                             ts->targets[i].label + "' coincide)");
  }
  ts->pure_output = true;
  for (const Target& t : ts->targets)
    if (!is_pure_output(t.channel)) ts->pure_output = false;
  if (verify_flags) {
    bool ok = verify_equality_flag(ts, 3);
    if (ts->affine)
      ts->rmin_aff_equals_rmax = ok;
    else
      ts->rmin_equals_rs = ok;
  } else {
    append_note(&ts->verification_notes, "flags not verified at construction");
  }
}

FreeSetDescriptor identity_desc(CodeClass cls, int d) {
  switch (cls) {
    case CodeClass::ns:
      return replacement_channels(d);
    case CodeClass::ppt:
      return ppt_channels(d, d);
    case CodeClass::sep_relax:
      return sep_channels_relax(d, d, 1);
  }
  throw std::logic_error("identity_desc: unknown code class");
}

FreeSetDescriptor preparation_desc(CodeClass cls, int d) {
  switch (cls) {
    case CodeClass::ppt:
      return ppt_channels(1, 1, d, d);
    case CodeClass::sep_relax:
      return sep_channels_relax(1, 1, d, d, 1);
    case CodeClass::ns:
      break;
  }
  throw std::invalid_argument(
      "preparation_targets: only the ppt and sep_relax classes have a "
      "preparation family");
}

Target trivial_target() {
  Target t;
  t.label = "trivial";
  t.channel = identity_channel(1);
  t.desc = cptp_channels(1, 1);
  t.value = 1.0;
  return t;
}

double target_value(const Target& t, bool affine) {
  MonotoneResult r = min_relative_entropy(t.channel, t.desc, affine);
  if (r.status != SolveStatus::optimal)
    throw std::runtime_error("target '" + t.label +
                             "': support measure solve returned " +
                             std::string(to_string(r.status)));
  return r.value;
}

// Direction and notes when a rate had to be reported without the family's
// flags: the rounded value keeps only its one-sided meaning.
void degrade_direction(RateResult* res, BoundDirection one_sided,
                       const std::string& why) {
  if (res->bound_direction == BoundDirection::exact) {
    res->bound_direction = one_sided;
  } else if (res->bound_direction != one_sided) {
    append_note(&res->notes,
                "bound direction indeterminate: the free set is relaxed in "
                "the opposite sense");
  }
  append_note(&res->notes, why);
}

}  // namespace

const char* to_string(CodeClass cls) {
  switch (cls) {
    case CodeClass::ns:
      return "ns";
    case CodeClass::ppt:
      return "ppt";
    case CodeClass::sep_relax:
      return "sep_relax";
  }
  return "?";
}

const Target& floor_T(const TargetSet& ts, double x) {
  const Target* best = nullptr;
  for (const Target& t : ts.targets)
    if (t.value <= x + slack_at(x)) best = &t;
  if (!best)
    throw std::invalid_argument(
        "floor_T: every target value exceeds " + fmt(x) + " (smallest is " +
        (ts.targets.empty() ? std::string("none")
                            : fmt(ts.targets.front().value)) +
        ")");
  return *best;
}

const Target& ceil_T(const TargetSet& ts, double x) {
  for (const Target& t : ts.targets)
    if (t.value >= x - slack_at(x)) return t;
  throw std::invalid_argument(
      "ceil_T: every target value lies below " + fmt(x) + " (largest is " +
      (ts.targets.empty() ? std::string("none")
                          : fmt(ts.targets.back().value)) +
      ")");
}

TargetSet identity_targets(CodeClass cls, int d_max, bool verify_flags) {
  if (d_max < 1)
    throw std::invalid_argument("identity_targets: d_max must be positive");
  TargetSet ts;
  ts.family = std::string("identity (") + to_string(cls) + ")";
  ts.affine = (cls == CodeClass::ns);
  ts.log_scale = (cls == CodeClass::ns) ? 0.5 : 1.0;
  ts.targets.push_back(trivial_target());
  for (int d = 2; d <= d_max; ++d) {
    Target t;
    t.label = "id_" + std::to_string(d);
    t.channel = identity_channel(d);
    t.desc = identity_desc(cls, d);
    t.value = target_value(t, ts.affine);
    if (t.value > kValueCap + kRoundSlack) {
      append_note(&ts.verification_notes,
                  "family truncated at the value cap " + fmt(kValueCap));
      break;
    }
    ts.targets.push_back(std::move(t));
  }
  finish_target_set(&ts, verify_flags);
  return ts;
}

TargetSet preparation_targets(CodeClass cls, int d_max, bool verify_flags) {
  if (d_max < 1)
    throw std::invalid_argument("preparation_targets: d_max must be positive");
  if (cls != CodeClass::ppt && cls != CodeClass::sep_relax)
    preparation_desc(cls, 2);  // throws with the explanation
  TargetSet ts;
  ts.family = std::string("preparation (") + to_string(cls) + ")";
  ts.affine = false;
  ts.log_scale = 1.0;
  ts.targets.push_back(trivial_target());
  double worst_state_gap = 0;
  for (int d = 2; d <= d_max; ++d) {
    Target t;
    t.label = "phi_" + std::to_string(d);
    t.channel = preparation_channel(maximally_entangled_state(d));
    t.desc = preparation_desc(cls, d);
    t.value = target_value(t, ts.affine);
    if (t.value > kValueCap + kRoundSlack) {
      append_note(&ts.verification_notes,
                  "family truncated at the value cap " + fmt(kValueCap));
      break;
    }
    if (cls == CodeClass::ppt && verify_flags) {
      double state = state_rmin_ppt(maximally_entangled_state(d), d, d);
      worst_state_gap = std::max(worst_state_gap, std::abs(state - t.value));
    }
    ts.targets.push_back(std::move(t));
  }
  if (cls == CodeClass::ppt && verify_flags && ts.targets.size() > 1)
    append_note(&ts.verification_notes,
                "channel values agree with the state-level program, worst "
                "gap " +
                    fmt(worst_state_gap));
  if (cls == CodeClass::sep_relax)
    append_note(&ts.verification_notes,
                "values computed at the level-1 relaxation");
  finish_target_set(&ts, verify_flags);
  return ts;
}

TargetSet explicit_targets(std::string family, std::vector<Target> targets,
                           bool affine, bool verify_flags) {
  if (targets.empty())
    throw std::invalid_argument("explicit_targets: no targets given");
  TargetSet ts;
  ts.family = std::move(family);
  ts.affine = affine;
  ts.targets = std::move(targets);
  for (Target& t : ts.targets) t.value = target_value(t, affine);
  finish_target_set(&ts, verify_flags);
  return ts;
}

RateResult distillable_resource(const Channel& e, const FreeSetDescriptor& desc,
                                const TargetSet& targets, double eps,
                                bool attach_superchannel) {
  if (targets.targets.empty())
    throw std::invalid_argument("distillable_resource: empty target set");
  MonotoneResult mono = hypothesis_testing(e, desc, eps, targets.affine);
  if (mono.status != SolveStatus::optimal)
    throw std::runtime_error(
        "distillable_resource: hypothesis-testing solve returned " +
        std::string(to_string(mono.status)));
  if (targets.targets.front().value > mono.value + slack_at(mono.value))
    throw std::invalid_argument(
        "distillable_resource: no feasible target; the hypothesis-testing "
        "measure " +
        fmt(mono.value) + " lies below the smallest target value " +
        fmt(targets.targets.front().value) + " (" +
        targets.targets.front().label + ")");
  const Target& pick = floor_T(targets, mono.value);

  RateResult res;
  res.monotone_value = mono.value;
  res.target_label = pick.label;
  res.target_value = pick.value;
  res.value = targets.log_scale * std::log2(pick.value);
  res.bound_direction = mono.bound_direction;
  bool flag =
      targets.affine ? targets.rmin_aff_equals_rmax : targets.rmin_equals_rs;
  res.exact = flag && targets.pure_output;
  if (mono.bound_direction != BoundDirection::exact)
    append_note(&res.notes, "monotone computed over a relaxed free set (" +
                                std::string(to_string(mono.bound_direction)) +
                                " bound)");
  if (!res.exact) {
    degrade_direction(&res, BoundDirection::upper,
                      "target flags unverified; the floored value is only "
                      "the converse bound and no construction is attached");
    return res;
  }
  if (attach_superchannel) {
    if (pick.value > 1.0 + 1e-9) {
      res.achieving = construct_pure_target_transformation(
          e, pick.channel, desc, pick.desc, eps, 0.0,
          targets.affine ? TransformRoute::affine : TransformRoute::standard);
    } else {
      append_note(&res.notes, "trivial target; nothing to construct");
    }
  }
  return res;
}

RateResult resource_cost(const Channel& e, const FreeSetDescriptor& desc,
                         const TargetSet& targets, double eps,
                         bool attach_superchannel,
                         const FreeSetDescriptor* allowed) {
  if (targets.targets.empty())
    throw std::invalid_argument("resource_cost: empty target set");
  FreeSetDescriptor fallback;
  if (allowed == nullptr) {
    fallback = default_allowed(desc);
    allowed = &fallback;
  }
  SmoothKind kind = targets.affine ? SmoothKind::rmax : SmoothKind::rs;
  MonotoneResult mono = smooth(kind, e, desc, *allowed, eps);
  if (mono.status != SolveStatus::optimal)
    throw std::runtime_error("resource_cost: smoothed robustness returned " +
                             std::string(to_string(mono.status)));
  if (!mono.finite())
    throw std::invalid_argument(
        "resource_cost: the smoothed standard robustness diverges in this "
        "theory; use an affine family");
  if (targets.targets.back().value < mono.value - slack_at(mono.value))
    throw std::invalid_argument(
        "resource_cost: cost undefined at this error budget; the smoothed "
        "robustness " +
        fmt(mono.value) + " exceeds every target value (largest " +
        fmt(targets.targets.back().value) + ", " +
        targets.targets.back().label + ")");
  const Target& pick = ceil_T(targets, mono.value);

  RateResult res;
  res.monotone_value = mono.value;
  res.target_label = pick.label;
  res.target_value = pick.value;
  res.value = targets.log_scale * std::log2(pick.value);
  res.bound_direction = mono.bound_direction;
  bool flag =
      targets.affine ? targets.rmin_aff_equals_rmax : targets.rmin_equals_rs;
  res.exact = flag;
  if (mono.bound_direction != BoundDirection::exact)
    append_note(&res.notes, "monotone computed over a relaxed free set (" +
                                std::string(to_string(mono.bound_direction)) +
                                " bound)");
  if (!res.exact)
    degrade_direction(&res, BoundDirection::upper,
                      "target flags unverified; the ceiled value is "
                      "achievable but the converse is not certified");
  if (attach_superchannel) {
    if (pick.value > 1.0 + 1e-9) {
      res.achieving = construct_transformation(
          pick.channel, e, pick.desc, desc, eps, 0.0,
          targets.affine ? TransformRoute::affine : TransformRoute::standard,
          allowed);
    } else {
      append_note(&res.notes, "trivial target; nothing to construct");
    }
  }
  return res;
}

namespace {

// Smallest family depth whose top value covers both quick bounds, so the
// adaptively built families are large enough for floor and ceil alike.
int family_depth(const Channel& e, const FreeSetDescriptor& desc, double eps,
                 bool affine, bool square_scale) {
  FreeSetDescriptor allowed = default_allowed(desc);
  double need = robustness(e, desc, allowed).value;
  MonotoneResult rh = hypothesis_testing(e, desc, eps, affine);
  if (rh.status == SolveStatus::optimal)
    need = std::max(need, rh.value);
  double d_real = square_scale ? std::sqrt(std::max(1.0, need))
                               : std::max(1.0, need);
  int d = static_cast<int>(std::ceil(d_real - 1e-9));
  return std::clamp(d, 2, 4);
}

}  // namespace

CapacitySuite capacity_suite(const Channel& e, CodeClass cls, double eps,
                             const TargetSet* targets,
                             bool attach_superchannels) {
  if (cls == CodeClass::ns && e.d_in != e.d_out)
    throw std::invalid_argument(
        "capacity_suite: the ns code class needs a square channel");
  FreeSetDescriptor desc =
      cls == CodeClass::ns
          ? replacement_channels(e.d_in)
          : (cls == CodeClass::ppt
                 ? ppt_channels(e.d_in, e.d_out)
                 : sep_channels_relax(e.d_in, e.d_out, 1));
  TargetSet local;
  if (targets == nullptr) {
    local = identity_targets(
        cls, family_depth(e, desc, eps, cls == CodeClass::ns,
                          cls == CodeClass::ns));
    targets = &local;
  }
  CapacitySuite suite;
  suite.quantum_capacity =
      distillable_resource(e, desc, *targets, eps, attach_superchannels);
  suite.simulation_cost =
      resource_cost(e, desc, *targets, eps, attach_superchannels);
  return suite;
}

EntanglementRates channel_entanglement_rates(const Channel& e,
                                             const BipartiteSplit& split,
                                             CodeClass cls, double eps,
                                             const TargetSet* targets,
                                             bool attach_superchannels) {
  if (cls != CodeClass::ppt && cls != CodeClass::sep_relax)
    throw std::invalid_argument(
        "channel_entanglement_rates: needs the ppt or sep_relax class");
  if (split.da_in * split.db_in != e.d_in ||
      split.da_out * split.db_out != e.d_out)
    throw std::invalid_argument(
        "channel_entanglement_rates: split does not match the channel "
        "signature");
  FreeSetDescriptor desc =
      cls == CodeClass::ppt
          ? ppt_channels(split.da_in, split.db_in, split.da_out, split.db_out)
          : sep_channels_relax(split.da_in, split.db_in, split.da_out,
                               split.db_out, 1);
  TargetSet local;
  if (targets == nullptr) {
    local = preparation_targets(
        cls, family_depth(e, desc, eps, false, false));
    targets = &local;
  }
  EntanglementRates rates;
  rates.distillable =
      distillable_resource(e, desc, *targets, eps, attach_superchannels);
  rates.cost = resource_cost(e, desc, *targets, eps, attach_superchannels);
  return rates;
}

EntanglementRates channel_entanglement_rates(const Channel& e, CodeClass cls,
                                             double eps) {
  if (e.d_in != 1)
    throw std::invalid_argument(
        "channel_entanglement_rates: pass an explicit split for channels "
        "with nontrivial input");
  int s = static_cast<int>(std::lround(std::sqrt(double(e.d_out))));
  if (s * s != e.d_out)
    throw std::invalid_argument(
        "channel_entanglement_rates: output dimension is not a square; pass "
        "an explicit split");
  BipartiteSplit split;
  split.da_out = s;
  split.db_out = s;
  return channel_entanglement_rates(e, split, cls, eps);
}

namespace {

bool diagonal_matrix(const Mat& m) {
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (i != j && std::abs(m(i, j)) > 1e-10 * scale) return false;
  return true;
}

Mat checked_state(const Mat& rho, int da, int db, const char* where) {
  const int d = da * db;
  if (rho.rows() != d || rho.cols() != d)
    throw std::invalid_argument(std::string(where) +
                                ": state dimension does not match the split");
  Mat h = 0.5 * (rho + rho.adjoint());
  double tr = h.trace().real();
  if (tr <= 1e-12)
    throw std::invalid_argument(std::string(where) + ": state has no trace");
  return h / tr;
}

MatExpr ptranspose_expr(const MatExpr& m, int da, int db) {
  return ConicProgram::map_linear(
      m, da * db, [da, db](const Mat& x) { return ptranspose_second(x, da, db); });
}

}  // namespace

double state_rmax_ppt(const Mat& rho, int da, int db) {
  Mat r = checked_state(rho, da, db, "state_rmax_ppt");
  ConicProgram prog("state_rmax_ppt");
  MatVar g = prog.add_herm(da * db, "G");
  MatExpr ge = prog.expr(g);
  prog.add_psd(ge - ConicProgram::constant(r));
  prog.add_psd(ptranspose_expr(ge, da, db));
  prog.minimize(ConicProgram::trace(ge));
  Solution s = prog.solve();
  if (!s.ok())
    throw std::runtime_error("state_rmax_ppt: solve returned " +
                             std::string(to_string(s.status)));
  return s.objective;
}

double state_rs_ppt(const Mat& rho, int da, int db) {
  Mat r = checked_state(rho, da, db, "state_rs_ppt");
  ConicProgram prog("state_rs_ppt");
  MatVar g = prog.add_herm(da * db, "G");
  MatExpr ge = prog.expr(g);
  MatExpr diff = ge - ConicProgram::constant(r);
  prog.add_psd(diff);
  prog.add_psd(ptranspose_expr(ge, da, db));
  prog.add_psd(ptranspose_expr(diff, da, db));
  prog.minimize(ConicProgram::trace(ge));
  Solution s = prog.solve();
  if (!s.ok())
    throw std::runtime_error("state_rs_ppt: solve returned " +
                             std::string(to_string(s.status)));
  return s.objective;
}

double state_rmin_ppt(const Mat& rho, int da, int db) {
  Mat r = checked_state(rho, da, db, "state_rmin_ppt");
  Eigen::SelfAdjointEigenSolver<Mat> es(r);
  double lmax = es.eigenvalues().maxCoeff();
  Mat proj = Mat::Zero(r.rows(), r.cols());
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 1e-9 * std::max(1.0, lmax))
      proj += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  ConicProgram prog("state_rmin_ppt");
  MatVar g = prog.add_herm(da * db, "G");
  MatExpr ge = prog.expr(g);
  prog.add_psd(ge);
  prog.add_psd(ptranspose_expr(ge, da, db));
  prog.add_eq(ConicProgram::trace(ge) - AffExpr(1.0));
  prog.maximize(ConicProgram::inner(proj, ge));
  Solution s = prog.solve();
  if (!s.ok())
    throw std::runtime_error("state_rmin_ppt: solve returned " +
                             std::string(to_string(s.status)));
  if (s.objective < 1e-12)
    throw std::runtime_error(
        "state_rmin_ppt: no PPT state overlaps the support");
  return 1.0 / s.objective;
}

Mat maximally_entangled_state(int d) {
  if (d < 1)
    throw std::invalid_argument(
        "maximally_entangled_state: dimension must be positive");
  Vec v = Vec::Zero(d * d);
  for (int i = 0; i < d; ++i) v(i * d + i) = 1.0 / std::sqrt(double(d));
  return v * v.adjoint();
}

FidelityBounds distillation_fidelity_bounds(const Channel& e,
                                            const Channel& target,
                                            const FreeSetDescriptor& in_o,
                                            const FreeSetDescriptor& out_o,
                                            TransformRoute route,
                                            const FreeSetDescriptor* allowed) {
  // The lower bound needs F(p N + (1-p) Q, N) >= p, which holds when N is
  // pure-output (fidelity to a pure state is linear) and for classical
  // channels (entrywise Bhattacharyya concavity); general mixed targets
  // only satisfy the weaker p^2 bound, so they are rejected.
  if (!is_pure_output(target) && !diagonal_matrix(target.choi))
    throw std::invalid_argument(
        "distillation_fidelity_bounds: the target must be pure-output or "
        "classical for the sandwich to be tight");
  const bool affine = route == TransformRoute::affine;
  FreeSetDescriptor fallback;
  if (allowed == nullptr) {
    fallback = default_allowed(out_o);
    allowed = &fallback;
  }

  MonotoneResult support = min_relative_entropy(target, out_o, affine);
  if (support.status != SolveStatus::optimal)
    throw std::runtime_error(
        "distillation_fidelity_bounds: target support measure returned " +
        std::string(to_string(support.status)));
  double m_up = affine ? support.value : std::max(1.0, support.value);
  if (m_up < 1e-9)
    throw std::runtime_error(
        "distillation_fidelity_bounds: the target's support measure "
        "vanished; the upper bound degenerates");

  MonotoneResult rob = robustness(target, out_o, affine ? *allowed : out_o);
  if (!rob.finite())
    throw std::invalid_argument(
        "distillation_fidelity_bounds: the target's standard robustness "
        "diverges; use the affine route");
  double m_lo = rob.value;

  FidelityBounds fb;
  fb.upper = g_measure(e, in_o, m_up, affine).value;
  MonotoneResult g_lo = g_measure(e, in_o, m_lo, affine);
  fb.lower = g_lo.value;
  append_note(&fb.notes, "upper bound at scale " + fmt(m_up) +
                             ", lower bound at scale " + fmt(m_lo));
  if (g_lo.value < 1e-12) {
    append_note(&fb.notes,
                "the lower-bound program is infeasible at the robustness "
                "scale; no construction attached");
    fb.theta = identity_superchannel(e.d_in, e.d_out);
    fb.achieved = 0;
    return fb;
  }

  fb.theta.form = SuperchannelForm::measure_prepare;
  fb.theta.d_in_in = e.d_in;
  fb.theta.d_in_out = e.d_out;
  fb.theta.d_out_in = target.d_in;
  fb.theta.d_out_out = target.d_out;
  fb.theta.input_rho = g_lo.opt.rho;
  fb.theta.effect = g_lo.opt.effect;
  fb.theta.branch_main = target;
  fb.theta.branch_else = rob.opt.mixing ? *rob.opt.mixing : target;
  fb.achieved = certificate_fidelity(apply_superchannel(fb.theta, e), target);
  fb.freeness_check = verify_freeness(fb.theta, in_o, out_o);
  fb.pinched = std::abs(fb.upper - fb.lower) <= 1e-5 * std::max(1.0, fb.upper);
  return fb;
}

std::vector<SweepRow> capacity_sweep(const Channel& e, CodeClass cls,
                                     const std::vector<double>& eps_grid) {
  if (eps_grid.empty()) return {};
  if (cls == CodeClass::ns && e.d_in != e.d_out)
    throw std::invalid_argument(
        "capacity_sweep: the ns code class needs a square channel");
  FreeSetDescriptor desc =
      cls == CodeClass::ns
          ? replacement_channels(e.d_in)
          : (cls == CodeClass::ppt
                 ? ppt_channels(e.d_in, e.d_out)
                 : sep_channels_relax(e.d_in, e.d_out, 1));
  double worst_eps = *std::max_element(eps_grid.begin(), eps_grid.end());
  TargetSet ts = identity_targets(
      cls, family_depth(e, desc, worst_eps, cls == CodeClass::ns,
                        cls == CodeClass::ns));
  std::vector<SweepRow> rows;
  rows.reserve(eps_grid.size());
  for (double eps : eps_grid) {
    RateResult q = distillable_resource(e, desc, ts, eps, false);
    RateResult c = resource_cost(e, desc, ts, eps, false);
    SweepRow row;
    row.eps = eps;
    row.quantum_capacity = q.value;
    row.simulation_cost = c.value;
    row.q_direction = q.bound_direction;
    row.c_direction = c.bound_direction;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dynres
