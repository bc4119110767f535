// Acceptance gate: one self-contained check per release criterion, each
// printed as a single PASS/FAIL line with its runtime. Exits with the
// number of failed criteria. Tolerances are pinned here, next to the
// checks that use them.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "dynres/conic.hpp"
#include "dynres/serialize.hpp"

using namespace dynres;
namespace fs = std::filesystem;

namespace {

// ---- reporting ------------------------------------------------------------

struct Checker {
  bool ok = true;
  std::ostringstream info;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      info << "  FAIL{" << what << "}";
    }
  }
  void note(const std::string& s) { info << s; }
};

int g_failures = 0;

void run_criterion(const char* id, const char* label, double time_cap_s,
                   const std::function<void(Checker&)>& body) {
  Checker c;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.info << "  FAIL{exception: " << e.what() << "}";
  }
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (time_cap_s > 0 && secs > time_cap_s) {
    c.ok = false;
    c.info << "  FAIL{runtime " << secs << " s exceeds cap " << time_cap_s
           << " s}";
  }
  if (!c.ok) ++g_failures;
  std::printf("%-4s %s  (%.2f s)  %s %s\n", id, c.ok ? "PASS" : "FAIL", secs,
              label, c.info.str().c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// ---- shared box helpers -----------------------------------------------------

BoxScenario chsh() { return BoxScenario{2, 2, 2, 2}; }

RVec det_table(const BoxScenario& sc, int fa, int fb) {
  RVec t = RVec::Zero(sc.table_size());
  for (int x = 0; x < sc.nx; ++x)
    for (int y = 0; y < sc.ny; ++y)
      t(box_table_index(sc, x, y, (fa >> x) & 1, (fb >> y) & 1)) = 1.0;
  return t;
}

Box random_local_box(Rng& rng) {
  BoxScenario sc = chsh();
  RVec table = RVec::Zero(sc.table_size());
  double total = 0;
  for (int fa = 0; fa < 4; ++fa)
    for (int fb = 0; fb < 4; ++fb) {
      double w = rng.uniform(0.0, 1.0);
      table += w * det_table(sc, fa, fb);
      total += w;
    }
  Box b{sc, table / total};
  validate_box(b);
  return b;
}

Box mix_boxes(const Box& a, const Box& b, double wa) {
  Box out{a.scenario, wa * a.table + (1 - wa) * b.table};
  validate_box(out);
  return out;
}

// ---- CLI invocation (AC3 needs the transform command) -----------------------

std::string cli_binary() {
  char buf[4096];
  ssize_t n = readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (n <= 0) return "./dynres";
  buf[n] = '\0';
  return (fs::path(buf).parent_path() / "dynres").string();
}

int run_cli(const std::string& args, std::string* out_text) {
  fs::path dir = fs::temp_directory_path() /
                 ("dynres_acceptance_" + std::to_string(getpid()));
  fs::create_directories(dir);
  fs::path out = dir / "cli_out.txt";
  std::string cmd = cli_binary() + " " + args + " > " + out.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  if (out_text) *out_text = read_text_file(out.string());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// ---- alternating min-max evaluation (criterion 10) --------------------------

// Hypothesis-testing value against a finite attack set: the same program as
// the library's, with the free-set support constraint replaced by one
// inequality per supplied member.
double finite_attack_value(const Channel& ch, const std::vector<Mat>& attacks,
                           double eps, Mat* q_out) {
  const int din = ch.d_in, dout = ch.d_out, D = ch.choi_dim();
  ConicProgram prog("finite-attack");
  MatVar rv = prog.add_herm(din, "rho");
  MatVar qv = prog.add_herm(D, "Q");
  ScalarVar lv = prog.add_scalar("lambda");
  prog.add_psd(prog.expr(rv));
  prog.add_eq(ConicProgram::trace(prog.expr(rv)) - AffExpr(1.0));
  prog.add_psd(prog.expr(qv));
  MatExpr rho_big = ConicProgram::map_linear(
      prog.expr(rv), D,
      [dout](const Mat& m) { return kron(m, Mat::Identity(dout, dout)); });
  prog.add_psd(rho_big - prog.expr(qv));
  prog.add_ineq(ConicProgram::inner(ch.choi, prog.expr(qv)) -
                AffExpr(1.0 - eps));
  for (const Mat& a : attacks)
    prog.add_ineq(prog.expr(lv) - ConicProgram::inner(a, prog.expr(qv)));
  prog.minimize(prog.expr(lv));
  Solution sol = prog.solve();
  if (!sol.ok()) throw std::runtime_error("finite-attack solve failed");
  if (q_out) *q_out = prog.value(sol, qv);
  return 1.0 / std::max(1e-10, prog.value(sol, lv));
}

// Best response of the free-set player to the current effect.
Mat best_attack(const FreeSetDescriptor& desc, const Mat& q) {
  if (desc.support == SupportKind::replacement) {
    const int din = desc.d_in, dout = desc.d_out;
    Mat marg = ptrace_first(q, din, dout);
    Eigen::SelfAdjointEigenSolver<Mat> es(marg);
    Vec top = es.eigenvectors().col(dout - 1);
    return kron(Mat::Identity(din, din), Mat(top * top.adjoint()));
  }
  if (desc.best_generator) return desc.best_generator(q);
  if (desc.generators.empty())
    throw std::runtime_error("best_attack: no generator family for " + desc.name);
  double best = -1e300;
  const Mat* pick = nullptr;
  for (const Mat& g : desc.generators) {
    double v = std::real((g.adjoint() * q).trace());
    if (v > best) {
      best = v;
      pick = &g;
    }
  }
  return *pick;
}

double alternating_value(const Channel& ch, const FreeSetDescriptor& desc,
                         double eps) {
  std::vector<Mat> attacks;
  attacks.push_back(desc.slater_choi ? *desc.slater_choi
                                     : desc.generators.front());
  double value = 0;
  for (int round = 0; round < 200; ++round) {
    Mat q;
    value = finite_attack_value(ch, attacks, eps, &q);
    Mat a = best_attack(desc, q);
    double reached = std::real((a.adjoint() * q).trace());
    double level = 1.0 / value;
    if (reached <= level * (1 + 1e-8) + 1e-9) return value;
    attacks.push_back(a);
  }
  return value;
}

// ---- criterion 4/5 shared instances -----------------------------------------

struct Instance {
  Channel resource;
  Channel target;
  FreeSetDescriptor within;
  FreeSetDescriptor allowed;
  TransformRoute route = TransformRoute::standard;
  double eps = 0;
  double delta = 0;
  Transformation t;
};

std::vector<Instance> g_instances;  // filled by AC4, reused by AC5

}  // namespace

int main() {
  std::printf("acceptance gate: 11 criteria\n");

  // 1. PR-box LP values over the CHSH local polytope.
  run_criterion("AC1", "PR-box robustness pair", 1.0, [](Checker& c) {
    const double tol = 1e-6;
    FreeSetDescriptor local = local_boxes(2, 2, 2, 2);
    FreeSetDescriptor ns = ns_boxes(2, 2, 2, 2);
    Channel pr = box_to_channel(pr_box());
    double rmax = robustness(pr, local, ns).value;
    double rs = robustness(pr, local, local).value;
    c.expect(std::abs(rmax - 4.0 / 3.0) <= tol,
             "r_max " + fmt(rmax) + " != 4/3");
    c.expect(std::abs(rs - 1.5) <= tol, "r_s " + fmt(rs) + " != 3/2");
    c.note("r_max " + fmt(rmax) + ", r_s " + fmt(rs));
  });

  // 2. Identity-channel anchors against the replacement free set.
  run_criterion("AC2", "identity-channel anchors d^2", 20.0, [](Checker& c) {
    const double tol = 1e-5;
    for (int d : {2, 3}) {
      auto t0 = std::chrono::steady_clock::now();
      FreeSetDescriptor o_r = replacement_channels(d);
      Channel id = identity_channel(d);
      double rmin_aff = min_relative_entropy(id, o_r, true).value;
      double rmax = robustness(id, o_r, cptp_channels(d, d)).value;
      double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      c.expect(std::abs(rmin_aff - d * d) <= tol,
               "r_min_aff(id_" + std::to_string(d) + ") " + fmt(rmin_aff));
      c.expect(std::abs(rmax - d * d) <= tol,
               "r_max(id_" + std::to_string(d) + ") " + fmt(rmax));
      c.expect(secs < 10.0, "d=" + std::to_string(d) + " took " + fmt(secs) + " s");
      c.note("d=" + std::to_string(d) + ": " + fmt(rmin_aff) + "/" + fmt(rmax) +
             " ");
    }
  });

  // 3. Full-rank noisy boxes carry no distillable support; the transform
  //    command refuses the distillation with an obstruction.
  run_criterion("AC3", "no-distillation no-go", 0, [](Checker& c) {
    const double tol = 1e-6;
    for (double p : {0.01, 0.1, 0.5}) {
      Box b = isotropic_box(p);
      double r1 =
          min_relative_entropy(box_to_channel(b), local_boxes(2, 2, 2, 2))
              .value;
      c.expect(std::abs(r1 - 1.0) <= tol,
               "r_min(B_" + fmt(p) + ") = " + fmt(r1));
      Box b2 = tensor_boxes(b, b);
      double r2 =
          min_relative_entropy(box_to_channel(b2), local_boxes(4, 4, 4, 4))
              .value;
      c.expect(std::abs(r2 - 1.0) <= tol,
               "r_min(B_" + fmt(p) + "^x2) = " + fmt(r2));
    }
    fs::path dir = fs::temp_directory_path() /
                   ("dynres_acceptance_" + std::to_string(getpid()));
    fs::create_directories(dir);
    std::string from = (dir / "bp01.json").string();
    std::string to = (dir / "pr.json").string();
    write_text_file(from, box_to_json(isotropic_box(0.1)));
    write_text_file(to, box_to_json(pr_box()));
    std::string out;
    int rc = run_cli("transform --from " + from + " --to " + to + " --eps 0.05",
                     &out);
    c.expect(rc == 2, "transform exit code " + std::to_string(rc));
    c.expect(out.find("r_min") != std::string::npos,
             "obstruction report lacks r_min");
    c.note("single and two-copy values at 1, transform exits 2");
  });

  // 4. Achievability: random pairs satisfying the precondition transform
  //    with the guaranteed fidelity and a free superchannel.
  run_criterion("AC4", "one-shot achievability harness", 300.0, [](Checker& c) {
    const double fid_tol = 1e-5;
    const double eps = 0.05, delta = 0.01;
    Rng rng(818401);

    FreeSetDescriptor local = local_boxes(2, 2, 2, 2);
    FreeSetDescriptor ns = ns_boxes(2, 2, 2, 2);
    Box pr = pr_box();
    Box white = white_box(chsh());

    int made_box = 0, tries = 0;
    while (made_box < 20 && tries < 400) {
      ++tries;
      Box e_box = mix_boxes(pr, random_local_box(rng), rng.uniform(0.6, 0.95));
      Box n_box = mix_boxes(e_box, white, rng.uniform(0.55, 0.9));
      Channel e = box_to_channel(e_box), n = box_to_channel(n_box);
      double lhs = hypothesis_testing(e, local, delta).value;
      double rhs = smooth(SmoothKind::rs, n, local, ns, eps).value;
      if (lhs < rhs + 1e-7) continue;
      Instance inst{e, n, local, ns, TransformRoute::standard, eps, delta};
      inst.t = construct_transformation(e, n, local, local, eps, delta,
                                        TransformRoute::standard, &ns);
      c.expect(inst.t.certificate.freeness_check.pass, "box freeness");
      c.expect(inst.t.certificate.fidelity_achieved >=
                   1 - eps - 2 * delta - fid_tol,
               "box fidelity " + fmt(inst.t.certificate.fidelity_achieved));
      g_instances.push_back(std::move(inst));
      ++made_box;
    }
    c.expect(made_box == 20, "only " + std::to_string(made_box) +
                                 " box pairs met the precondition");

    FreeSetDescriptor o_r = replacement_channels(2);
    FreeSetDescriptor cptp2 = cptp_channels(2, 2);
    Mat j_white = kron(Mat::Identity(2, 2), Mat::Identity(2, 2) / 2.0);
    int made_ns = 0;
    tries = 0;
    while (made_ns < 10 && tries < 100) {
      ++tries;
      Channel e = random_channel(rng, 2, 2);
      double v = rng.uniform(0.5, 0.85);
      Channel n{2, 2, v * e.choi + (1 - v) * j_white};
      double lhs = hypothesis_testing(e, o_r, delta, true).value;
      double rhs = smooth(SmoothKind::rmax, n, o_r, cptp2, eps).value;
      if (lhs < rhs + 1e-7) continue;
      Instance inst{e, n, o_r, cptp2, TransformRoute::affine, eps, delta};
      inst.t = construct_transformation(e, n, o_r, o_r, eps, delta,
                                        TransformRoute::affine, &cptp2);
      c.expect(inst.t.certificate.freeness_check.pass, "ns freeness");
      c.expect(inst.t.certificate.fidelity_achieved >=
                   1 - eps - 2 * delta - fid_tol,
               "ns fidelity " + fmt(inst.t.certificate.fidelity_achieved));
      g_instances.push_back(std::move(inst));
      ++made_ns;
    }
    c.expect(made_ns == 10, "only " + std::to_string(made_ns) +
                                " channel pairs met the precondition");
    c.note("20 box + 10 channel instances constructed");
  });

  // 5. Converse: monotones never increase under the constructed and under
  //    random free superchannels, and the smoothing chain holds.
  run_criterion("AC5", "one-shot converse harness", 0, [](Checker& c) {
    const double tol = 1e-6;
    if (g_instances.size() != 30) {
      c.expect(false, "needs the 30 instances from AC4");
      return;
    }

    auto check_pair = [&](const Channel& e, const Channel& img,
                          const Instance& inst, const std::string& tag) {
      const bool affine = inst.route == TransformRoute::affine;
      double rm_e = robustness(e, inst.within, inst.allowed).value;
      double rm_i = robustness(img, inst.within, inst.allowed).value;
      c.expect(rm_i <= rm_e + tol, tag + " r_max " + fmt(rm_e) + " -> " + fmt(rm_i));
      if (!affine) {
        double rs_e = robustness(e, inst.within, inst.within).value;
        double rs_i = robustness(img, inst.within, inst.within).value;
        c.expect(rs_i <= rs_e + tol, tag + " r_s " + fmt(rs_e) + " -> " + fmt(rs_i));
      }
      double rmin_e = min_relative_entropy(e, inst.within, affine).value;
      double rmin_i = min_relative_entropy(img, inst.within, affine).value;
      c.expect(rmin_i <= rmin_e + tol,
               tag + " r_min " + fmt(rmin_e) + " -> " + fmt(rmin_i));
      double rh_e = hypothesis_testing(e, inst.within, 0.02, affine).value;
      double rh_i = hypothesis_testing(img, inst.within, 0.02, affine).value;
      c.expect(rh_i <= rh_e + tol, tag + " r_h " + fmt(rh_e) + " -> " + fmt(rh_i));
    };

    for (size_t k = 0; k < g_instances.size(); ++k) {
      const Instance& inst = g_instances[k];
      Channel img = apply_superchannel(inst.t.theta, inst.resource);
      check_pair(inst.resource, img, inst, "inst" + std::to_string(k));

      // Smoothing chain r^delta(E) >= r^{2(sqrt(delta)+sqrt(eps))}(N).
      const SmoothKind kind = inst.route == TransformRoute::affine
                                  ? SmoothKind::rmax
                                  : SmoothKind::rs;
      double chain_err =
          2 * (std::sqrt(inst.delta) + std::sqrt(inst.eps));
      double lhs =
          smooth(kind, inst.resource, inst.within, inst.allowed, inst.delta)
              .value;
      double rhs =
          smooth(kind, inst.target, inst.within, inst.allowed, chain_err)
              .value;
      c.expect(lhs >= rhs - tol, "chain inst" + std::to_string(k) + " " +
                                     fmt(lhs) + " < " + fmt(rhs));
    }

    // Random free measure-prepare superchannels over the box theory: both
    // branches are local, so the output is local for every input.
    Rng rng(818502);
    FreeSetDescriptor local = local_boxes(2, 2, 2, 2);
    FreeSetDescriptor ns = ns_boxes(2, 2, 2, 2);
    for (int k = 0; k < 20; ++k) {
      Superchannel theta;
      theta.form = SuperchannelForm::measure_prepare;
      theta.d_in_in = 4;
      theta.d_in_out = 4;
      theta.d_out_in = 4;
      theta.d_out_out = 4;
      theta.input_rho = rng.random_density(4);
      Mat h = rng.random_hermitian(16);
      Eigen::SelfAdjointEigenSolver<Mat> es(h);
      RVec clip = RVec::Zero(16);
      for (int i = 0; i < 16; ++i) clip(i) = rng.uniform(0.0, 1.0);
      theta.effect = es.eigenvectors() * clip.asDiagonal().toDenseMatrix().cast<cxd>() *
                     es.eigenvectors().adjoint();
      theta.branch_main = box_to_channel(random_local_box(rng));
      theta.branch_else = box_to_channel(random_local_box(rng));
      if (!superchannel_is_valid(theta)) {
        c.expect(false, "random superchannel " + std::to_string(k) + " invalid");
        continue;
      }
      const Instance& inst = g_instances[k % 20];
      Channel img = apply_superchannel(theta, inst.resource);
      check_pair(inst.resource, img, inst, "rand" + std::to_string(k));
    }
    c.note("30 constructed + 20 random superchannels checked");
  });

  // 6. Qubit depolarizing toward id_2: the two fidelity bounds pinch and
  //    the constructed superchannel attains them.
  run_criterion("AC6", "depolarizing fidelity sandwich", 0, [](Checker& c) {
    const double tol = 1e-5;
    FreeSetDescriptor o_r = replacement_channels(2);
    FreeSetDescriptor cptp2 = cptp_channels(2, 2);
    Channel id2 = identity_channel(2);
    for (int i = 0; i <= 10; ++i) {
      double p = i / 10.0;
      FidelityBounds fb = distillation_fidelity_bounds(
          depolarizing_channel(2, p), id2, o_r, o_r, TransformRoute::affine,
          &cptp2);
      c.expect(fb.upper - fb.lower <= tol,
               "p=" + fmt(p) + " gap " + fmt(fb.upper - fb.lower));
      c.expect(std::abs(fb.achieved - fb.lower) <= tol,
               "p=" + fmt(p) + " achieved " + fmt(fb.achieved) + " vs " +
                   fmt(fb.lower));
      c.expect(fb.freeness_check.pass, "p=" + fmt(p) + " freeness");
      c.expect(std::abs(fb.upper - (1 - 0.75 * p)) <= tol,
               "p=" + fmt(p) + " upper " + fmt(fb.upper) + " != 1-3p/4");
    }
    c.note("11 grid points pinched at 1 - 3p/4");
  });

  // 7. Zero-error coding rates with floor/ceil exactness.
  run_criterion("AC7", "zero-error capacity anchors", 0, [](Checker& c) {
    for (int d : {2, 3}) {
      CapacitySuite s = capacity_suite(identity_channel(d), CodeClass::ns, 0.0);
      double logd = std::log2(double(d));
      c.expect(std::abs(s.quantum_capacity.value - logd) <= 1e-12,
               "Q0_ns(id_" + std::to_string(d) + ") = " +
                   fmt(s.quantum_capacity.value));
      c.expect(std::abs(s.simulation_cost.value - logd) <= 1e-12,
               "C0_ns(id_" + std::to_string(d) + ") = " +
                   fmt(s.simulation_cost.value));
      c.expect(s.quantum_capacity.exact && s.simulation_cost.exact,
               "ns rates flagged inexact at d=" + std::to_string(d));
    }
    FreeSetDescriptor sep = sep_channels_relax(2, 2, 1);
    double rmin = min_relative_entropy(identity_channel(2), sep).value;
    double rs = robustness(identity_channel(2), sep, sep).value;
    c.expect(std::abs(rmin - 2.0) <= 1e-6, "sep r_min(id_2) = " + fmt(rmin));
    c.expect(std::abs(rs - 2.0) <= 1e-6, "sep r_s(id_2) = " + fmt(rs));
    CapacitySuite s2 =
        capacity_suite(identity_channel(2), CodeClass::sep_relax, 0.0);
    c.expect(std::abs(s2.quantum_capacity.value - 1.0) <= 1e-6,
             "sep-relax d0(id_2) = " + fmt(s2.quantum_capacity.value));
    c.note("ns log d at d=2,3; sep-relax anchor r_min = r_s = 2");
  });

  // 8. POVM-level and channel-level incompatibility robustness agree.
  run_criterion("AC8", "incompatibility level agreement", 120.0, [](Checker& c) {
    const double tol = 1e-5;
    Rng rng(818808);
    int done = 0, tries = 0;
    while (done < 10 && tries < 60) {
      ++tries;
      PovmSet s = random_povm_set(rng, 2, 2, 2);
      double vp = incompatibility_robustness(s, IncompatLevel::povm).value;
      if (vp <= 1.0 + 1e-7) continue;  // compatible draw carries no signal
      double vc = incompatibility_robustness(s, IncompatLevel::channel).value;
      c.expect(std::abs(vp - vc) <= tol,
               "pair " + std::to_string(done) + ": " + fmt(vp) + " vs " + fmt(vc));
      ++done;
    }
    c.expect(done == 10, "only " + std::to_string(done) + " incompatible draws");
    PovmSet xz = noisy_xz_pair(1.0);
    double vp = incompatibility_robustness(xz, IncompatLevel::povm).value;
    double vc = incompatibility_robustness(xz, IncompatLevel::channel).value;
    c.expect(std::abs(vp - vc) <= tol, "xz " + fmt(vp) + " vs " + fmt(vc));
    c.note("10 random pairs + X/Z, worst value " + fmt(vp));
  });

  // 9. Preparation channels inherit the state-level robustness triple.
  run_criterion("AC9", "preparation channel vs state triple", 0, [](Checker& c) {
    const double tol = 1e-6;
    Rng rng(818909);
    FreeSetDescriptor ppt = ppt_channels(1, 1, 2, 2);
    FreeSetDescriptor all = cptp_channels(1, 4);
    for (int k = 0; k < 10; ++k) {
      Vec psi = rng.random_pure(4);
      Mat rho = psi * psi.adjoint();
      Channel prep = preparation_channel(rho);
      double ch_rmax = robustness(prep, ppt, all).value;
      double ch_rs = robustness(prep, ppt, ppt).value;
      double ch_rmin = min_relative_entropy(prep, ppt).value;
      c.expect(std::abs(ch_rmax - state_rmax_ppt(rho, 2, 2)) <= tol,
               "k=" + std::to_string(k) + " r_max " + fmt(ch_rmax));
      c.expect(std::abs(ch_rs - state_rs_ppt(rho, 2, 2)) <= tol,
               "k=" + std::to_string(k) + " r_s " + fmt(ch_rs));
      c.expect(std::abs(ch_rmin - state_rmin_ppt(rho, 2, 2)) <= tol,
               "k=" + std::to_string(k) + " r_min " + fmt(ch_rmin));
    }
    c.note("10 random pure two-qubit preparations");
  });

  // 10. Single-program hypothesis testing equals the alternating min-max
  //     evaluation via attack-set growth.
  run_criterion("AC10", "minimax agreement", 0, [](Checker& c) {
    const double tol = 1e-4;
    const double eps = 0.1;
    Rng rng(819010);
    FreeSetDescriptor o_r = replacement_channels(2);
    for (int k = 0; k < 5; ++k) {
      Channel e = random_channel(rng, 2, 2);
      double single = hypothesis_testing(e, o_r, eps).value;
      double altern = alternating_value(e, o_r, eps);
      c.expect(std::abs(single - altern) <= tol,
               "channel " + std::to_string(k) + ": " + fmt(single) + " vs " +
                   fmt(altern));
    }
    FreeSetDescriptor local = local_boxes(2, 2, 2, 2);
    Box pr = pr_box();
    for (int k = 0; k < 5; ++k) {
      Box b = mix_boxes(pr, random_local_box(rng), rng.uniform(0.3, 0.9));
      Channel e = box_to_channel(b);
      double single = hypothesis_testing(e, local, eps).value;
      double altern = alternating_value(e, local, eps);
      c.expect(std::abs(single - altern) <= tol,
               "box " + std::to_string(k) + ": " + fmt(single) + " vs " +
                   fmt(altern));
    }
    c.note("5 channel + 5 box instances at eps 0.1");
  });

  // 11. The table LP and the Choi SDP compute the same monotones on
  //     embedded classical channels.
  run_criterion("AC11", "LP vs SDP oracle equivalence", 0, [](Checker& c) {
    const double tol = 1e-6;
    Rng rng(819111);
    FreeSetDescriptor local = local_boxes(2, 2, 2, 2);
    FreeSetDescriptor ns = ns_boxes(2, 2, 2, 2);
    FreeSetDescriptor sdp_local =
        generic_polytope("local-vertex-chois", 4, 4, local.generators);
    Box pr = pr_box();
    for (int k = 0; k < 10; ++k) {
      Box b = mix_boxes(pr, random_local_box(rng), rng.uniform(0.0, 0.8));
      Channel e = box_to_channel(b);
      double lp, sd;
      lp = robustness(e, local, ns).value;
      sd = robustness(e, sdp_local, ns).value;
      c.expect(std::abs(lp - sd) <= tol,
               "k=" + std::to_string(k) + " r_max " + fmt(lp) + " vs " + fmt(sd));
      lp = robustness(e, local, local).value;
      sd = robustness(e, sdp_local, sdp_local).value;
      c.expect(std::abs(lp - sd) <= tol,
               "k=" + std::to_string(k) + " r_s " + fmt(lp) + " vs " + fmt(sd));
      lp = min_relative_entropy(e, local).value;
      sd = min_relative_entropy(e, sdp_local).value;
      c.expect(std::abs(lp - sd) <= tol,
               "k=" + std::to_string(k) + " r_min " + fmt(lp) + " vs " + fmt(sd));
      lp = hypothesis_testing(e, local, 0.1).value;
      sd = hypothesis_testing(e, sdp_local, 0.1).value;
      c.expect(std::abs(lp - sd) <= tol,
               "k=" + std::to_string(k) + " r_h " + fmt(lp) + " vs " + fmt(sd));
    }
    c.note("10 random boxes, four monotones each");
  });

  std::printf("%d of 11 criteria failed\n", g_failures);
  return g_failures;
}
