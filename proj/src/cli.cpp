#include "screwkin/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "screwkin/dexterity.hpp"
#include "screwkin/loop.hpp"
#include "screwkin/model_io.hpp"
#include "screwkin/representations.hpp"

namespace screwkin {

const char* version_string() { return "0.1.0"; }

namespace {

using ojson = nlohmann::ordered_json;

// ---- json serialization helpers --------------------------------------------

template <typename Derived>
ojson jvec(const Eigen::MatrixBase<Derived>& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(static_cast<double>(v(i)));
  return a;
}

template <typename Derived>
ojson jmat(const Eigen::MatrixBase<Derived>& m) {
  ojson rows = ojson::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ojson row = ojson::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(static_cast<double>(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ojson jstack(const DerivativeStack& st) {
  ojson j;
  j["q"] = jvec(st.q);
  ojson d = ojson::array();
  for (const auto& v : st.derivs) d.push_back(jvec(v));
  j["derivs"] = std::move(d);
  return j;
}

ojson jtwists(const std::vector<ScrewVec>& tw) {
  ojson j;
  j["V"] = tw.empty() ? ojson::array() : jvec(tw[0]);
  ojson d = ojson::array();
  for (size_t l = 1; l < tw.size(); ++l) d.push_back(jvec(tw[l]));
  j["derivs"] = std::move(d);
  return j;
}

ojson jtol(const Tolerances& tol) {
  ojson j;
  j["orthonormality"] = tol.orthonormality;
  j["loop_closure"] = tol.loop_closure;
  j["cone"] = tol.cone;
  j["svd_rank_rel"] = tol.svd_rank_rel;
  j["condition_gate"] = tol.condition_gate;
  j["rank_gap_flag"] = tol.rank_gap_flag;
  j["small_angle"] = tol.small_angle;
  return j;
}

const char* verdict_name(ConeVerdict v) {
  switch (v) {
    case ConeVerdict::Member: return "member";
    case ConeVerdict::NonMember: return "non-member";
    default: return "undecided";
  }
}

// ---- input files ------------------------------------------------------------

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  return nlohmann::json::parse(in);
}

VecX json_to_vecx(const nlohmann::json& arr, const std::string& what, int expected) {
  if (!arr.is_array()) throw std::invalid_argument(what + " must be an array of numbers");
  if (expected >= 0 && static_cast<int>(arr.size()) != expected) {
    throw std::invalid_argument(what + " must have " + std::to_string(expected) +
                                " entries, got " + std::to_string(arr.size()));
  }
  VecX v(static_cast<Eigen::Index>(arr.size()));
  for (size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw std::invalid_argument(what + " must contain numbers");
    v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  return v;
}

DerivativeStack read_q_stack(const std::string& path, int n) {
  const nlohmann::json j = read_json_file(path);
  if (!j.is_object() || !j.contains("q")) {
    throw std::invalid_argument(path + ": expected {\"q\": [...], \"derivs\": [[...], ...]}");
  }
  DerivativeStack st;
  st.q = json_to_vecx(j.at("q"), path + ": q", n);
  if (j.contains("derivs")) {
    if (!j.at("derivs").is_array()) {
      throw std::invalid_argument(path + ": derivs must be an array of arrays");
    }
    int l = 0;
    for (const auto& d : j.at("derivs")) {
      ++l;
      st.derivs.push_back(json_to_vecx(d, path + ": deriv " + std::to_string(l), n));
    }
  }
  return st;
}

std::vector<ScrewVec> read_twist_stack(const std::string& path) {
  const nlohmann::json j = read_json_file(path);
  if (!j.is_object() || !j.contains("V")) {
    throw std::invalid_argument(path + ": expected {\"V\": [6], \"derivs\": [[6], ...]}");
  }
  std::vector<ScrewVec> tw;
  tw.push_back(json_to_vecx(j.at("V"), path + ": V", 6));
  if (j.contains("derivs")) {
    if (!j.at("derivs").is_array()) {
      throw std::invalid_argument(path + ": derivs must be an array of arrays");
    }
    int l = 0;
    for (const auto& d : j.at("derivs")) {
      ++l;
      tw.push_back(json_to_vecx(d, path + ": deriv " + std::to_string(l), 6));
    }
  }
  return tw;
}

std::vector<VecX> read_u_stack(const std::string& path, int nu) {
  const nlohmann::json j = read_json_file(path);
  if (!j.is_object() || !j.contains("derivs") || !j.at("derivs").is_array() ||
      j.at("derivs").empty()) {
    throw std::invalid_argument(path + ": expected {\"derivs\": [[...], ...]} with at least one row");
  }
  std::vector<VecX> out;
  int l = 0;
  for (const auto& d : j.at("derivs")) {
    ++l;
    out.push_back(json_to_vecx(d, path + ": deriv " + std::to_string(l), nu));
  }
  return out;
}

// ---- shared option plumbing ---------------------------------------------------

VecX resolve_q(const Model& m, const Chain& c, const std::string& label,
               const std::vector<double>& ovr) {
  if (!ovr.empty()) {
    if (static_cast<int>(ovr.size()) != c.n()) {
      throw std::invalid_argument("--q needs " + std::to_string(c.n()) + " entries, got " +
                                  std::to_string(ovr.size()));
    }
    return Eigen::Map<const VecX>(ovr.data(), static_cast<Eigen::Index>(ovr.size()));
  }
  VecX q = model_config(m, label);
  if (static_cast<int>(q.size()) != c.n()) {
    throw std::invalid_argument("config \"" + label + "\" is sized for the full chain; this command works on the loop chain with " +
                                std::to_string(c.n()) + " joints, pass --q");
  }
  return q;
}

// Chain a closure-analysis command works on: the first declared loop, or the
// whole chain when the model declares none (then it is taken as closed).
Chain closure_chain(const Model& m) {
  return m.loops.empty() ? m.chain : loop_chain(m, m.loops.front());
}

Rep parse_rep(const std::string& s) {
  if (s == "s" || s == "spatial") return Rep::Spatial;
  if (s == "b" || s == "body") return Rep::Body;
  if (s == "h" || s == "hybrid") return Rep::Hybrid;
  throw std::invalid_argument("unknown representation \"" + s + "\" (use s, b or h)");
}

// ---- deterministic writer ------------------------------------------------------

void fmt_double(double v, std::string& buf) {
  if (!std::isfinite(v)) {
    buf += "null";
    return;
  }
  if (v == 0.0) {
    buf += "0";
    return;
  }
  char tmp[40];
  std::snprintf(tmp, sizeof(tmp), "%.17g", v);
  buf += tmp;
}

void write_json(const ojson& j, std::string& buf, int indent) {
  const std::string pad(static_cast<size_t>(indent) * 2, ' ');
  const std::string pad1(static_cast<size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case ojson::value_t::null:
      buf += "null";
      return;
    case ojson::value_t::boolean:
      buf += j.get<bool>() ? "true" : "false";
      return;
    case ojson::value_t::number_integer:
      buf += std::to_string(j.get<long long>());
      return;
    case ojson::value_t::number_unsigned:
      buf += std::to_string(j.get<unsigned long long>());
      return;
    case ojson::value_t::number_float:
      fmt_double(j.get<double>(), buf);
      return;
    case ojson::value_t::string:
      buf += nlohmann::json(j.get<std::string>()).dump();
      return;
    case ojson::value_t::array: {
      if (j.empty()) {
        buf += "[]";
        return;
      }
      buf += "[\n";
      bool first = true;
      for (const auto& el : j) {
        if (!first) buf += ",\n";
        first = false;
        buf += pad1;
        write_json(el, buf, indent + 1);
      }
      buf += "\n" + pad + "]";
      return;
    }
    case ojson::value_t::object: {
      if (j.empty()) {
        buf += "{}";
        return;
      }
      buf += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) buf += ",\n";
        first = false;
        buf += pad1 + nlohmann::json(it.key()).dump() + ": ";
        write_json(it.value(), buf, indent + 1);
      }
      buf += "\n" + pad + "}";
      return;
    }
    default:
      buf += "null";
      return;
  }
}

int sanitize_nonfinite(ojson& j) {
  int count = 0;
  if (j.is_number_float() && !std::isfinite(j.get<double>())) {
    j = nullptr;
    return 1;
  }
  if (j.is_array() || j.is_object()) {
    for (auto& el : j) count += sanitize_nonfinite(el);
  }
  return count;
}

}  // namespace

std::string dump_report(const nlohmann::ordered_json& j) {
  std::string buf;
  write_json(j, buf, 0);
  buf += "\n";
  return buf;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"screw-theoretic kinematics of serial chains and single-loop linkages"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  struct Opts {
    std::string model;
    std::string config = "zero";
    std::vector<double> qovr;
    std::string file;
    std::vector<double> x;
    std::vector<double> dt;
    std::vector<int> independent;
    std::string rep = "s";
    std::string from = "s", to = "b";
    std::string method = "recursive";
    std::string emit_polys;
    int link = -1;
    int order = 1;
    int rank = 0;
    double tval = 1.0;
    bool grad = false, hess = false, project = false, allow_pinv = false;
  } o;

  auto add_model = [&](CLI::App* cmd) {
    cmd->add_option("model", o.model, "model JSON file")->required();
  };
  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config, "named configuration (default \"zero\")");
    cmd->add_option("--q", o.qovr, "explicit joint values, comma separated")->delimiter(',');
  };

  CLI::App* cmd_fk = app.add_subcommand("fk", "pose of a link");
  add_model(cmd_fk);
  add_config(cmd_fk);
  cmd_fk->add_option("--link", o.link, "link index (default: last)");

  CLI::App* cmd_derivs = app.add_subcommand("derivs", "twist derivatives of a link");
  add_model(cmd_derivs);
  cmd_derivs->add_option("stack", o.file, "joint stack JSON {\"q\":[..],\"derivs\":[[..],..]}")
      ->required();
  cmd_derivs->add_option("--order", o.order, "derivative order (default 1)");
  cmd_derivs->add_option("--rep", o.rep, "twist representation: s, b or h (default s)");
  cmd_derivs->add_option("--link", o.link, "link index (default: last)");
  cmd_derivs->add_option("--method", o.method, "spatial engine: recursive or closed");

  CLI::App* cmd_mob = app.add_subcommand("mobility", "closure algebras and structural mobility");
  add_model(cmd_mob);

  CLI::App* cmd_cone = app.add_subcommand("cone", "tangent cone membership of a joint velocity");
  add_model(cmd_cone);
  add_config(cmd_cone);
  cmd_cone->add_option("--x", o.x, "candidate velocity, comma separated")
      ->delimiter(',')
      ->required();
  cmd_cone->add_option("--order", o.order, "maximum order to test (default 4)")
      ->default_val(4);
  cmd_cone->add_option("--rank", o.rank, "restrict to the stratum of this Jacobian rank");

  CLI::App* cmd_ik = app.add_subcommand("ik", "joint derivatives from a task twist stack");
  add_model(cmd_ik);
  add_config(cmd_ik);
  cmd_ik->add_option("stack", o.file, "twist stack JSON {\"V\":[6],\"derivs\":[[6],..]}")
      ->required();
  cmd_ik->add_option("--order", o.order, "derivative order (default: stack depth)")
      ->default_val(0);

  CLI::App* cmd_loop = app.add_subcommand("loop-approx", "resolve loop closure to derivative order");
  add_model(cmd_loop);
  add_config(cmd_loop);
  cmd_loop->add_option("stack", o.file, "independent derivatives JSON {\"derivs\":[[..],..]}")
      ->required();
  cmd_loop->add_option("--independent", o.independent, "independent joint indices, comma separated")
      ->delimiter(',');
  cmd_loop->add_option("--order", o.order, "derivative order (default 4)")->default_val(4);
  cmd_loop->add_option("--dt", o.dt, "evaluate the Taylor motion at these times")
      ->delimiter(',');
  cmd_loop->add_flag("--allow-pseudoinverse", o.allow_pinv,
                     "substitute the pseudoinverse at a singular dependent block");

  CLI::App* cmd_dex = app.add_subcommand("dexterity", "manipulability and condition measures");
  add_model(cmd_dex);
  add_config(cmd_dex);
  cmd_dex->add_flag("--grad", o.grad, "include the manipulability gradient");
  cmd_dex->add_flag("--hess", o.hess, "include the manipulability Hessian");

  CLI::App* cmd_km = app.add_subcommand("taylor-km", "Taylor expansion of the kinematic map");
  add_model(cmd_km);
  add_config(cmd_km);
  cmd_km->add_option("--order", o.order, "expansion order (default 4)")->default_val(4);
  cmd_km->add_option("--x", o.x, "direction to evaluate, comma separated")->delimiter(',');
  cmd_km->add_option("--t", o.tval, "scale of the direction (default 1)");
  cmd_km->add_flag("--project", o.project, "also report the nearest rigid displacement");
  cmd_km->add_option("--emit-polys", o.emit_polys, "write the c-space polynomial system here");

  CLI::App* cmd_conv = app.add_subcommand("convert-rep", "convert a twist derivative stack");
  add_model(cmd_conv);
  add_config(cmd_conv);
  cmd_conv->add_option("stack", o.file, "twist stack JSON {\"V\":[6],\"derivs\":[[6],..]}")
      ->required();
  cmd_conv->add_option("--from", o.from, "source representation: s, b or h")->required();
  cmd_conv->add_option("--to", o.to, "target representation: s, b or h")->required();
  cmd_conv->add_option("--link", o.link, "link index (default: last)");

  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.push_back("screwkin");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const auto& s : full) argv.push_back(s.c_str());

  try {
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return 0;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return 0;
    } catch (const CLI::CallForVersion&) {
      out << version_string() << "\n";
      return 0;
    } catch (const CLI::ParseError& e) {
      err << "usage error: " << e.what() << "\n";
      return 2;
    }

    const Tolerances tol = Tolerances::from_env();
    const Model m = load_model(o.model);
    std::vector<std::string> warnings = m.warnings;
    CLI::App* sub = app.get_subcommands().front();

    ojson inputs;
    ojson outputs;
    ojson condition_numbers = ojson::object();

    if (sub == cmd_fk) {
      const Chain& c = m.chain;
      const VecX q = resolve_q(m, c, o.config, o.qovr);
      const int i = o.link < 0 ? c.n() : o.link;
      if (i < 0 || i > c.n()) throw std::invalid_argument("link index out of range");
      inputs["config"] = o.config;
      inputs["q"] = jvec(q);
      inputs["link"] = i;
      const Pose P = link_pose(c, q, i);
      outputs["pose"] = jmat(P.matrix());
      outputs["orthonormality_defect"] = orthonormality_defect(P.R);
    } else if (sub == cmd_derivs) {
      const Chain& c = m.chain;
      const int k = o.order;
      if (k < 0 || k > kMaxDerivativeOrder) {
        throw std::invalid_argument("order must lie in 0.." + std::to_string(kMaxDerivativeOrder));
      }
      DerivativeStack st = read_q_stack(o.file, c.n());
      const int i = o.link < 0 ? c.n() : o.link;
      if (i < 1 || i > c.n()) throw std::invalid_argument("link index out of range");
      if (st.order() < k + 1) {
        warnings.push_back("joint derivatives above order " + std::to_string(st.order()) +
                           " taken as zero");
        while (st.order() < k + 1) st.derivs.push_back(VecX::Zero(c.n()));
      }
      const Rep rep = parse_rep(o.rep);
      if (o.method != "recursive" && o.method != "closed") {
        throw std::invalid_argument("--method must be recursive or closed");
      }
      if (o.method == "closed" && rep != Rep::Spatial) {
        throw std::invalid_argument("--method closed applies to the spatial representation");
      }
      std::vector<ScrewVec> tw;
      if (rep == Rep::Spatial) {
        const TwistDerivs td = o.method == "closed" ? twist_derivatives_closed(c, st, k)
                                                    : twist_derivatives_recursive(c, st, k);
        tw = td.V[static_cast<size_t>(i) - 1];
      } else if (rep == Rep::Body) {
        tw = body_twist_derivatives(c, st, i, k);
      } else if (k <= 2) {
        tw = hybrid_twist_derivatives(c, st, i, k);
      } else {
        const TwistDerivs td = twist_derivatives_recursive(c, st, k);
        tw = convert_twist_derivatives(td.V[static_cast<size_t>(i) - 1], Rep::Spatial,
                                       Rep::Hybrid, link_pose(c, st.q, i), k);
      }
      inputs["stack"] = jstack(st);
      inputs["order"] = k;
      inputs["rep"] = o.rep;
      inputs["link"] = i;
      inputs["method"] = o.method;
      outputs = jtwists(tw);
    } else if (sub == cmd_mob) {
      const std::vector<Chain> loops = loop_chains(m);
      const MobilityEstimate est = structural_mobility(loops, m.chain.n());
      inputs["loops"] = static_cast<int>(loops.size());
      ojson per = ojson::array();
      for (const auto& alg : est.per_loop) {
        ojson e;
        e["g"] = alg.g;
        e["bracket_depth"] = alg.depth;
        e["basis"] = jmat(alg.basis);
        per.push_back(std::move(e));
      }
      outputs["per_loop"] = std::move(per);
      outputs["total_joint_dof"] = est.total_joint_dof;
      outputs["delta"] = est.delta;
      outputs["paradox_candidate"] = est.paradox_candidate;
      if (est.paradox_candidate) {
        warnings.push_back("paradoxical-candidate: structural count <= 0, finite mobility must be decided by higher-order analysis");
      }
    } else if (sub == cmd_cone) {
      const Chain c = closure_chain(m);
      const VecX q = resolve_q(m, c, o.config, o.qovr);
      if (static_cast<int>(o.x.size()) != c.n()) {
        throw std::invalid_argument("--x needs " + std::to_string(c.n()) + " entries");
      }
      const VecX x = Eigen::Map<const VecX>(o.x.data(), static_cast<Eigen::Index>(o.x.size()));
      inputs["config"] = o.config;
      inputs["q"] = jvec(q);
      inputs["x"] = jvec(x);
      inputs["order"] = o.order;
      ojson orders = ojson::array();
      if (o.rank > 0) {
        inputs["rank"] = o.rank;
        const RankStratumResult r = rank_stratum_membership(c, q, x, o.rank, o.order, tol);
        for (size_t t = 0; t < r.cone.orders.size(); ++t) {
          ojson e;
          e["order"] = r.cone.orders[t].order;
          e["closure_residual"] = r.cone.orders[t].residual;
          e["minor_residual"] = r.minor_residuals[t];
          e["verdict"] = verdict_name(r.cone.orders[t].verdict);
          orders.push_back(std::move(e));
        }
        outputs["orders"] = std::move(orders);
        outputs["verdict"] = verdict_name(r.final_verdict);
        outputs["decided_at"] = r.decided_at;
      } else {
        const ConeResult r = tangent_cone_membership(c, q, x, o.order, tol);
        for (const auto& ord : r.orders) {
          ojson e;
          e["order"] = ord.order;
          e["residual"] = ord.residual;
          e["verdict"] = verdict_name(ord.verdict);
          orders.push_back(std::move(e));
        }
        outputs["orders"] = std::move(orders);
        outputs["verdict"] = verdict_name(r.final_verdict);
        outputs["decided_at"] = r.decided_at;
        outputs["kernel_dim"] = static_cast<int>(r.first_order_kernel.cols());
        ojson wit = ojson::array();
        for (const auto& w : r.witness) wit.push_back(jvec(w));
        outputs["witness"] = std::move(wit);
      }
    } else if (sub == cmd_ik) {
      const Chain& c = m.chain;
      const VecX q = resolve_q(m, c, o.config, o.qovr);
      const std::vector<ScrewVec> task = read_twist_stack(o.file);
      const int k = o.order > 0 ? o.order : static_cast<int>(task.size());
      inputs["config"] = o.config;
      inputs["q"] = jvec(q);
      inputs["task"] = jtwists(task);
      inputs["order"] = k;
      const IkResult r = ik_joint_derivatives(c, q, task, k, tol);
      outputs["stack"] = jstack(r.stack);
      condition_numbers["jacobian"] = r.condition_number;
      condition_numbers["sigma_min"] = r.sigma_min;
    } else if (sub == cmd_loop) {
      const Chain c = closure_chain(m);
      const VecX q = resolve_q(m, c, o.config, o.qovr);
      CoordinateSplit split;
      if (!o.independent.empty()) {
        std::vector<bool> indep(static_cast<size_t>(c.n()), false);
        for (int j : o.independent) {
          if (j < 1 || j > c.n()) throw std::invalid_argument("--independent index out of range");
          indep[static_cast<size_t>(j) - 1] = true;
          split.independent.push_back(j);
        }
        for (int j = 1; j <= c.n(); ++j) {
          if (!indep[static_cast<size_t>(j) - 1]) split.dependent.push_back(j);
        }
      } else {
        split = select_split(c, q, tol);
        warnings.push_back("independent coordinates chosen by column pivoting");
      }
      const std::vector<VecX> u =
          read_u_stack(o.file, static_cast<int>(split.independent.size()));
      if (static_cast<int>(u.size()) < o.order) {
        throw std::invalid_argument("stack provides " + std::to_string(u.size()) +
                                    " derivative rows, --order asks for " +
                                    std::to_string(o.order));
      }
      inputs["config"] = o.config;
      inputs["q"] = jvec(q);
      inputs["independent"] = ojson(split.independent);
      inputs["order"] = o.order;
      ojson uj = ojson::array();
      for (const auto& v : u) uj.push_back(jvec(v));
      inputs["u_derivs"] = std::move(uj);
      const LoopDerivatives r = loop_derivatives(c, q, split, u, o.order, o.allow_pinv, tol);
      outputs["stack"] = jstack(r.stack);
      outputs["dependent"] = ojson(r.split.dependent);
      outputs["independent"] = ojson(r.split.independent);
      outputs["used_pseudoinverse"] = r.used_pseudoinverse;
      ojson evals = ojson::array();
      for (double t : o.dt) {
        const VecX qt = loop_taylor_motion(r.stack, t);
        ojson e;
        e["t"] = t;
        e["q"] = jvec(qt);
        e["closure_residual"] = closure_residual(c, qt);
        evals.push_back(std::move(e));
      }
      outputs["evaluations"] = std::move(evals);
      condition_numbers["dependent_block"] = r.cond_dependent;
    } else if (sub == cmd_dex) {
      const Chain& c = m.chain;
      const VecX q = resolve_q(m, c, o.config, o.qovr);
      inputs["config"] = o.config;
      inputs["q"] = jvec(q);
      const MatX J = jacobian_spatial(c, q, c.n());
      outputs["manipulability"] = manipulability(J);
      outputs["inverse_condition"] = inverse_condition(J);
      if (o.grad) {
        outputs["manipulability_gradient"] = jvec(manipulability_gradient(c, q));
        outputs["inverse_condition_gradient"] = jvec(inverse_condition_gradient(c, q));
      }
      if (o.hess) {
        outputs["manipulability_hessian"] = jmat(manipulability_hessian(c, q));
      }
    } else if (sub == cmd_km) {
      const Chain c = closure_chain(m);
      const VecX q = resolve_q(m, c, o.config, o.qovr);
      inputs["config"] = o.config;
      inputs["q"] = jvec(q);
      inputs["order"] = o.order;
      outputs["f0"] = jmat(kinematic_map(c, q, c.n()).matrix());
      if (!o.x.empty()) {
        if (static_cast<int>(o.x.size()) != c.n()) {
          throw std::invalid_argument("--x needs " + std::to_string(c.n()) + " entries");
        }
        VecX x = Eigen::Map<const VecX>(o.x.data(), static_cast<Eigen::Index>(o.x.size()));
        x *= o.tval;
        inputs["x"] = jvec(x);
        const Mat4 F = km_taylor_eval(c, q, o.order, x);
        outputs["taylor"] = jmat(F);
        outputs["orthonormality_defect"] = orthonormality_defect(F.topLeftCorner<3, 3>());
        if (o.project) {
          outputs["projected"] = jmat(project_to_rigid(F).matrix());
        }
      }
      if (!o.emit_polys.empty()) {
        const PolySystem ps = cspace_poly_system(c, q, o.order);
        std::ofstream pf(o.emit_polys);
        if (!pf) throw std::invalid_argument("cannot write " + o.emit_polys);
        pf << ps.to_text();
        outputs["polys"] = static_cast<int>(ps.polys.size());
        outputs["nvars"] = ps.nvars;
        outputs["emitted_to"] = o.emit_polys;
      }
    } else if (sub == cmd_conv) {
      const Chain& c = m.chain;
      const VecX q = resolve_q(m, c, o.config, o.qovr);
      const int i = o.link < 0 ? c.n() : o.link;
      if (i < 1 || i > c.n()) throw std::invalid_argument("link index out of range");
      const std::vector<ScrewVec> in = read_twist_stack(o.file);
      const int k = static_cast<int>(in.size()) - 1;
      inputs["config"] = o.config;
      inputs["q"] = jvec(q);
      inputs["link"] = i;
      inputs["from"] = o.from;
      inputs["to"] = o.to;
      inputs["stack"] = jtwists(in);
      const auto outv = convert_twist_derivatives(in, parse_rep(o.from), parse_rep(o.to),
                                                  link_pose(c, q, i), k);
      outputs = jtwists(outv);
    }

    ojson report;
    report["command"] = sub->get_name();
    ojson mj;
    mj["name"] = m.name;
    mj["path"] = o.model;
    mj["joints"] = m.chain.n();
    report["model"] = std::move(mj);
    report["inputs"] = std::move(inputs);
    report["outputs"] = std::move(outputs);
    ojson diag;
    diag["tolerances"] = jtol(tol);
    diag["condition_numbers"] = std::move(condition_numbers);
    diag["warnings"] = ojson::array();
    report["diagnostics"] = std::move(diag);
    report["version"] = version_string();
    const int dropped = sanitize_nonfinite(report);
    if (dropped > 0) {
      warnings.push_back(std::to_string(dropped) + " non-finite value(s) reported as null");
    }
    report["diagnostics"]["warnings"] = ojson(warnings);
    for (const auto& w : warnings) err << "warning: " << w << "\n";
    out << dump_report(report);
    return 0;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace screwkin
