#include "dynres/superchannels.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dynres/fidelity.hpp"
#include "dynres/linalg.hpp"

namespace dynres {
namespace {

double hinner(const Mat& a, const Mat& b) {
  return (a.adjoint() * b).trace().real();
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

void append_note(std::string* notes, const std::string& msg) {
  if (!notes->empty()) *notes += "; ";
  *notes += msg;
}

// Branch weight of the measure-prepare form: <effect, id (x) L(psi)> where
// psi purifies input_rho, so the probed state is the Choi matrix of L
// pinched by sqrt(input_rho) on the reference factor.
double branch_weight(const Superchannel& theta, const Channel& ch) {
  Mat big = kron(herm_sqrt(theta.input_rho),
                 Mat::Identity(theta.d_in_out, theta.d_in_out));
  Mat probed = big * ch.choi * big;
  double p = hinner(theta.effect, probed);
  return std::min(1.0, std::max(0.0, p));
}

bool diagonal_choi(const Mat& j) {
  Mat off = j;
  off.diagonal().setZero();
  return off.cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, j.cwiseAbs().maxCoeff());
}

Channel generator_channel(const FreeSetDescriptor& desc, const Mat& choi) {
  return Channel{desc.d_in, desc.d_out, choi};
}

}  // namespace

bool superchannel_is_valid(const Superchannel& theta, double tol) {
  if (theta.d_in_in <= 0 || theta.d_in_out <= 0 || theta.d_out_in <= 0 ||
      theta.d_out_out <= 0)
    return false;
  if (theta.form == SuperchannelForm::measure_prepare) {
    if (!theta.branch_main || !theta.branch_else) return false;
    const int dref = theta.d_in_in, dprobe = dref * theta.d_in_out;
    if (theta.input_rho.rows() != dref || theta.input_rho.cols() != dref)
      return false;
    if (theta.effect.rows() != dprobe || theta.effect.cols() != dprobe)
      return false;
    if ((theta.input_rho - theta.input_rho.adjoint()).norm() > tol) return false;
    if (std::abs(theta.input_rho.trace().real() - 1.0) > tol) return false;
    Eigen::SelfAdjointEigenSolver<Mat> rs(theta.input_rho);
    if (rs.eigenvalues().minCoeff() < -tol) return false;
    if ((theta.effect - theta.effect.adjoint()).norm() > tol) return false;
    Eigen::SelfAdjointEigenSolver<Mat> es(theta.effect);
    if (es.eigenvalues().minCoeff() < -tol) return false;
    if (es.eigenvalues().maxCoeff() > 1.0 + tol) return false;
    for (const Channel* b : {&*theta.branch_main, &*theta.branch_else}) {
      if (b->d_in != theta.d_out_in || b->d_out != theta.d_out_out) return false;
      if (!b->is_valid(std::max(tol, 1e-9))) return false;
    }
    return true;
  }
  // General form: wire dimensions must chain, both halves must be channels.
  if (!theta.pre || !theta.post || theta.mem_dim < 1) return false;
  if (theta.pre->d_in != theta.d_out_in) return false;
  if (theta.pre->d_out != theta.d_in_in * theta.mem_dim) return false;
  if (theta.post->d_in != theta.d_in_out * theta.mem_dim) return false;
  if (theta.post->d_out != theta.d_out_out) return false;
  if (!theta.pre->is_valid(std::max(tol, 1e-9))) return false;
  if (!theta.post->is_valid(std::max(tol, 1e-9))) return false;
  // Spot-check that the composition keeps sample channels completely
  // positive and trace preserving.
  Rng rng(314159);
  for (int k = 0; k < 2; ++k) {
    Channel probe = k == 0
        ? replacement_channel(theta.d_in_in,
                              Mat::Identity(theta.d_in_out, theta.d_in_out) /
                                  theta.d_in_out)
        : random_channel(rng, theta.d_in_in, theta.d_in_out);
    Channel out = compose(*theta.post,
                          compose(tensor(probe, identity_channel(theta.mem_dim)),
                                  *theta.pre));
    if (!out.is_valid(1e-7)) return false;
  }
  return true;
}

Channel apply_superchannel(const Superchannel& theta, const Channel& ch) {
  if (ch.d_in != theta.d_in_in || ch.d_out != theta.d_in_out)
    throw std::invalid_argument(
        "apply_superchannel: channel signature " + std::to_string(ch.d_in) +
        "->" + std::to_string(ch.d_out) + " does not match the superchannel input " +
        std::to_string(theta.d_in_in) + "->" + std::to_string(theta.d_in_out));
  if (theta.form == SuperchannelForm::measure_prepare) {
    if (!theta.branch_main || !theta.branch_else)
      throw std::invalid_argument("apply_superchannel: missing branch channels");
    double p = branch_weight(theta, ch);
    Mat j = p * theta.branch_main->choi + (1.0 - p) * theta.branch_else->choi;
    return channel_from_choi(j, theta.d_out_in, theta.d_out_out);
  }
  if (!theta.pre || !theta.post)
    throw std::invalid_argument("apply_superchannel: missing pre/post channels");
  return compose(*theta.post,
                 compose(tensor(ch, identity_channel(theta.mem_dim)), *theta.pre));
}

Superchannel identity_superchannel(int d_in, int d_out) {
  Superchannel theta;
  theta.form = SuperchannelForm::general;
  theta.d_in_in = theta.d_out_in = d_in;
  theta.d_in_out = theta.d_out_out = d_out;
  theta.pre = identity_channel(d_in);
  theta.post = identity_channel(d_out);
  theta.mem_dim = 1;
  return theta;
}

FreenessReport verify_freeness(const Superchannel& theta,
                               const FreeSetDescriptor& in_o,
                               const FreeSetDescriptor& out_o,
                               int n_samples, double tol, unsigned seed) {
  FreenessReport report;
  report.regime = in_o.is_polytope ? "generators (exact)" : "generators + sampling";

  auto check_input = [&](const Mat& choi, int gen_index) {
    Channel input = generator_channel(in_o, choi);
    Channel output = apply_superchannel(theta, input);
    MembershipReport mr = membership_check(out_o, output, tol);
    if (!mr.member && mr.violation > report.worst_violation) {
      report.pass = false;
      report.worst_violation = mr.violation;
      report.generator_index = gen_index;
      report.violating_input = choi;
      report.witness = mr.witness;
    }
  };

  for (int g = 0; g < static_cast<int>(in_o.generators.size()); ++g)
    check_input(in_o.generators[g], g);

  Rng rng(seed);
  for (int s = 0; s < n_samples; ++s) {
    Mat choi;
    if (!in_o.generators.empty()) {
      // Random convex mixture of a handful of generators.
      int k = std::min<int>(4, static_cast<int>(in_o.generators.size()));
      RVec w(k);
      for (int i = 0; i < k; ++i) w(i) = -std::log(std::max(1e-12, rng.uniform()));
      w /= w.sum();
      choi = Mat::Zero(in_o.generators[0].rows(), in_o.generators[0].cols());
      for (int i = 0; i < k; ++i) {
        int pick = static_cast<int>(rng.uniform() * in_o.generators.size());
        pick = std::min<int>(pick, static_cast<int>(in_o.generators.size()) - 1);
        choi += w(i) * in_o.generators[pick];
      }
    } else {
      choi = sample_member(in_o, rng);
    }
    check_input(choi, -1);
  }
  return report;
}

double certificate_fidelity(const Channel& a, const Channel& b) {
  if (a.d_in != b.d_in || a.d_out != b.d_out)
    throw std::invalid_argument("certificate_fidelity: channel signatures differ");
  if (diagonal_choi(a.choi) && diagonal_choi(b.choi)) {
    // Classical channels: the worst input is a basis state, and the
    // fidelity at a basis state is the squared Bhattacharyya overlap of the
    // two outcome rows.
    double worst = 1.0;
    for (int s = 0; s < a.d_in; ++s) {
      double overlap = 0.0;
      for (int o = 0; o < a.d_out; ++o) {
        int i = s * a.d_out + o;
        double pa = std::max(0.0, a.choi(i, i).real());
        double pb = std::max(0.0, b.choi(i, i).real());
        overlap += std::sqrt(pa * pb);
      }
      worst = std::min(worst, overlap * overlap);
    }
    return worst;
  }
  return worst_case_fidelity(a, b).value;
}

namespace {

// Shared construction body. h_err is the hypothesis-testing error on the
// resource, s_err the smoothing radius on the target. The measure-prepare
// effect and input state come from the hypothesis-testing optimizer, the
// branches from the smoothed robustness decomposition.
Transformation build_transformation(const Channel& resource, const Channel& target,
                                    const FreeSetDescriptor& in_o,
                                    const FreeSetDescriptor& out_o,
                                    double h_err, double s_err,
                                    TransformRoute route,
                                    const FreeSetDescriptor* allowed,
                                    double guarantee) {
  if (resource.d_in != in_o.d_in || resource.d_out != in_o.d_out)
    throw std::invalid_argument("construct_transformation: resource channel does not "
                                "match the input free set '" + in_o.name + "'");
  if (target.d_in != out_o.d_in || target.d_out != out_o.d_out)
    throw std::invalid_argument("construct_transformation: target channel does not "
                                "match the output free set '" + out_o.name + "'");

  const bool affine = route == TransformRoute::affine;

  FreeSetDescriptor fallback_allowed;
  if (allowed == nullptr) {
    fallback_allowed = out_o.box
        ? ns_boxes(out_o.box->nx, out_o.box->ny, out_o.box->na, out_o.box->nb)
        : cptp_channels(out_o.d_in, out_o.d_out);
    allowed = &fallback_allowed;
  }

  MonotoneResult rh = hypothesis_testing(resource, in_o, h_err, affine);
  if (rh.status == SolveStatus::inaccurate)
    throw std::runtime_error(
        "construct_transformation: the hypothesis-testing solve came back "
        "inaccurate (" + rh.notes + "); refusing to certify");

  MonotoneResult sm = smooth(affine ? SmoothKind::rmax : SmoothKind::rs, target,
                             out_o, *allowed, s_err, SmoothMetric::worst_case);
  if (sm.status == SolveStatus::inaccurate)
    throw std::runtime_error(
        "construct_transformation: the target smoothing solve came back "
        "inaccurate (" + sm.notes + "); refusing to certify");

  const char* rh_name = affine ? "resource hypothesis-testing monotone (affine)"
                               : "resource hypothesis-testing monotone";
  const char* sm_name = affine ? "target smoothed global robustness"
                               : "target smoothed standard robustness";
  if (!(rh.value + 1e-7 >= sm.value))
    throw std::invalid_argument(
        "construct_transformation: precondition fails, " + std::string(rh_name) +
        " = " + fmt(rh.value) + " is below " + sm_name + " = " + fmt(sm.value) +
        "; the transformation is out of reach for this construction");

  if (!sm.opt.smoothed || !sm.opt.free_member)
    throw std::runtime_error(
        "construct_transformation: the smoothing optimizer did not return the "
        "decomposition channels");

  const Channel& nn = *sm.opt.smoothed;      // smoothed target
  const Channel& f0 = *sm.opt.free_member;   // free channel of its decomposition
  const double t0 = sm.value;

  Superchannel theta;
  theta.form = SuperchannelForm::measure_prepare;
  theta.d_in_in = resource.d_in;
  theta.d_in_out = resource.d_out;
  theta.d_out_in = target.d_in;
  theta.d_out_out = target.d_out;
  theta.input_rho = rh.opt.rho;
  theta.effect = rh.opt.effect;
  theta.branch_main = nn;

  std::string notes;
  if (!affine) {
    // Branch weights of free inputs stay below 1/t0, so the output stays a
    // convex combination of the decomposition members, both inside out_o.
    theta.branch_else = sm.opt.mixing ? *sm.opt.mixing : nn;
    if (!sm.opt.mixing)
      append_note(&notes, "target already free after smoothing; both branches "
                          "prepare the smoothed target");
  } else {
    // Pad the decomposition up to the resource value t' so that every input
    // from the affine hull of in_o maps to exactly the free channel f0.
    // Solver noise can leave the two levels a hair below 1 or below each
    // other; clamping and the exactly-normalized convex weights keep the
    // padded Choi a valid channel.
    const double lvl = std::max(1.0, t0);
    const double tp = std::max(rh.value, lvl);
    if (tp <= 1.0 + 1e-9) {
      theta.branch_else = nn;
      append_note(&notes, "affine route at unit level; both branches prepare "
                          "the smoothed target");
    } else {
      double w_mix = 0.0;
      if (lvl > 1.0 + 1e-9) {
        if (!sm.opt.mixing)
          throw std::runtime_error(
              "construct_transformation: the robustness decomposition is "
              "missing its mixing channel");
        w_mix = std::min(1.0, (lvl - 1.0) / (tp - 1.0));
      }
      Mat jq = (1.0 - w_mix) * f0.choi;
      if (w_mix > 0.0) jq += w_mix * sm.opt.mixing->choi;
      theta.branch_else = channel_from_choi(jq, target.d_in, target.d_out);
      append_note(&notes, "else-branch padded to the resource level so the "
                          "construction is constant on the affine hull");
    }
  }

  Transformation result;
  result.theta = theta;

  TransformationCertificate& cert = result.certificate;
  cert.fidelity_guarantee = guarantee;
  Channel transformed = apply_superchannel(theta, resource);
  cert.fidelity_achieved = certificate_fidelity(transformed, target);
  cert.freeness_check = verify_freeness(theta, in_o, out_o);
  cert.monotone_ledger.push_back({rh_name, rh.value});
  cert.monotone_ledger.push_back({sm_name, sm.value});
  cert.monotone_ledger.push_back({"branch weight on the resource",
                                  branch_weight(theta, resource)});
  append_note(&notes, "optimizer selection is solver-determined; the "
                      "certificate is valid for any optimizer");
  if (!rh.notes.empty()) append_note(&notes, "hypothesis testing: " + rh.notes);
  if (!sm.notes.empty()) append_note(&notes, "smoothing: " + sm.notes);
  cert.notes = notes;
  return result;
}

}  // namespace

Transformation construct_transformation(const Channel& resource, const Channel& target,
                                        const FreeSetDescriptor& in_o,
                                        const FreeSetDescriptor& out_o,
                                        double eps, double delta,
                                        TransformRoute route,
                                        const FreeSetDescriptor* allowed) {
  if (eps < 0 || delta < 0 || eps + 2.0 * delta >= 1.0)
    throw std::invalid_argument(
        "construct_transformation: needs eps, delta >= 0 and eps + 2*delta < 1");
  return build_transformation(resource, target, in_o, out_o, delta, eps, route,
                              allowed, 1.0 - eps - 2.0 * delta);
}

Transformation construct_pure_target_transformation(
    const Channel& resource, const Channel& target,
    const FreeSetDescriptor& in_o, const FreeSetDescriptor& out_o,
    double eps, double delta, TransformRoute route,
    const FreeSetDescriptor* allowed) {
  if (eps < 0 || delta < 0 || eps + delta >= 1.0)
    throw std::invalid_argument(
        "construct_pure_target_transformation: needs eps, delta >= 0 and "
        "eps + delta < 1");
  if (!is_pure_output(target))
    throw std::invalid_argument(
        "construct_pure_target_transformation: the target is not pure-output; "
        "use construct_transformation for general targets");
  return build_transformation(resource, target, in_o, out_o, eps, delta, route,
                              allowed, 1.0 - eps - delta);
}

}  // namespace dynres
