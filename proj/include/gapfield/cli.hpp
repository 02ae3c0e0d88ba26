#pragma once

// Command-line front end. A run is described by one flat JSON document whose
// keys are mirrored by kebab-case flags (x_min <-> --x-min); flags win.
//
//   gapfield geometry --r1 3 --r2 2 --eps 0.01 [--k1 .. --k2 ..]
//   gapfield field    ... --nx 128 --ny 128 [--x-min .. --x-max .. --y-min .. --y-max ..]
//   gapfield boundary ... --j 1 --n-theta 512 [--u-inf-gap]
//   gapfield sweep    ... --sweep-param eps|k --sweep-values 1e-2,1e-3,1e-4 [--k-exponent -0.75]
//
// Exit codes: 0 success, 2 configuration error, 3 evaluation failure
// (including more than 1% of field points failing).

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gapfield/analysis.hpp"

namespace gapfield::cli {

using nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitEval = 3;

struct RunConfig {
  std::optional<double> r1, r2, eps;
  std::optional<Conductivity> k1, k2;
  double hx = 1.0, hy = 0.0;
  double tol = 1e-10;
  std::string out = "-";
  // field grid (canonical frame); unset bounds default to a box around both disks
  std::optional<double> x_min, x_max, y_min, y_max;
  int nx = 128, ny = 128;
  // boundary
  int j = 1;
  int n_theta = 512;
  bool u_inf_gap = false;
  // sweep
  std::string sweep_param = "eps";
  std::vector<double> sweep_values;
  std::optional<double> k_exponent;
};

enum class KeyKind { Real, Int, Cond, Text, List, Flag };

struct KeyInfo {
  const char* name;
  KeyKind kind;
  const char* help;
};

inline const std::vector<KeyInfo>& config_keys() {
  static const std::vector<KeyInfo> keys = {
      {"r1", KeyKind::Real, "radius of disk 1"},
      {"r2", KeyKind::Real, "radius of disk 2"},
      {"eps", KeyKind::Real, "gap between the disks"},
      {"k1", KeyKind::Cond, "conductivity of disk 1 (number, inf or 0)"},
      {"k2", KeyKind::Cond, "conductivity of disk 2 (number, inf or 0)"},
      {"hx", KeyKind::Real, "background field H = hx x + hy y"},
      {"hy", KeyKind::Real, "background field H = hx x + hy y"},
      {"tol", KeyKind::Real, "series truncation tolerance"},
      {"out", KeyKind::Text, "output path, - for stdout"},
      {"x_min", KeyKind::Real, "field grid bound"},
      {"x_max", KeyKind::Real, "field grid bound"},
      {"y_min", KeyKind::Real, "field grid bound"},
      {"y_max", KeyKind::Real, "field grid bound"},
      {"nx", KeyKind::Int, "field grid columns"},
      {"ny", KeyKind::Int, "field grid rows"},
      {"j", KeyKind::Int, "boundary index (1 or 2)"},
      {"n_theta", KeyKind::Int, "number of boundary angles"},
      {"u_inf_gap", KeyKind::Flag, "add the perfect-conductor gap columns"},
      {"sweep_param", KeyKind::Text, "swept parameter: eps or k"},
      {"sweep_values", KeyKind::List, "comma-separated sweep values"},
      {"k_exponent", KeyKind::Real, "couple k1 = k2 = eps^p during an eps sweep"},
  };
  return keys;
}

inline Conductivity parse_conductivity(const std::string& s) {
  if (s == "inf" || s == "Inf" || s == "infinity") return Conductivity::perfect();
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("invalid conductivity '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("invalid conductivity '" + s + "'");
  if (v == 0.0) return Conductivity::insulating();
  if (std::isinf(v) && v > 0) return Conductivity::perfect();
  try {
    return Conductivity::finite(v);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

inline Conductivity conductivity_from_json(const json& v, const char* key) {
  if (v.is_string()) return parse_conductivity(v.get<std::string>());
  if (!v.is_number()) throw ConfigError(std::string(key) + ": expected a number or \"inf\"");
  const double k = v.get<double>();
  if (k == 0.0) return Conductivity::insulating();
  try {
    return Conductivity::finite(k);
  } catch (const DomainError& e) {
    throw ConfigError(std::string(key) + ": " + e.what());
  }
}

inline RunConfig load_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  RunConfig c;
  std::map<std::string, KeyKind> kinds;
  for (const auto& k : config_keys()) kinds[k.name] = k.kind;
  for (const auto& [key, v] : doc.items()) {
    const auto it = kinds.find(key);
    if (it == kinds.end()) throw ConfigError("unknown configuration key '" + key + "'");
    auto real = [&] {
      if (!v.is_number()) throw ConfigError(key + ": expected a number");
      const double x = v.get<double>();
      if (!std::isfinite(x)) throw ConfigError(key + ": must be finite");
      return x;
    };
    auto integer = [&] {
      if (!v.is_number_integer()) throw ConfigError(key + ": expected an integer");
      return v.get<long long>();
    };
    if (key == "r1") c.r1 = real();
    else if (key == "r2") c.r2 = real();
    else if (key == "eps") c.eps = real();
    else if (key == "k1") c.k1 = conductivity_from_json(v, "k1");
    else if (key == "k2") c.k2 = conductivity_from_json(v, "k2");
    else if (key == "hx") c.hx = real();
    else if (key == "hy") c.hy = real();
    else if (key == "tol") c.tol = real();
    else if (key == "out") {
      if (!v.is_string()) throw ConfigError("out: expected a string");
      c.out = v.get<std::string>();
    } else if (key == "x_min") c.x_min = real();
    else if (key == "x_max") c.x_max = real();
    else if (key == "y_min") c.y_min = real();
    else if (key == "y_max") c.y_max = real();
    else if (key == "nx") c.nx = static_cast<int>(std::clamp<long long>(integer(), -1, 1 << 30));
    else if (key == "ny") c.ny = static_cast<int>(std::clamp<long long>(integer(), -1, 1 << 30));
    else if (key == "j") c.j = static_cast<int>(std::clamp<long long>(integer(), -1, 3));
    else if (key == "n_theta") c.n_theta = static_cast<int>(std::clamp<long long>(integer(), -1, 1 << 30));
    else if (key == "u_inf_gap") {
      if (!v.is_boolean()) throw ConfigError("u_inf_gap: expected true or false");
      c.u_inf_gap = v.get<bool>();
    } else if (key == "sweep_param") {
      if (!v.is_string()) throw ConfigError("sweep_param: expected a string");
      c.sweep_param = v.get<std::string>();
    } else if (key == "sweep_values") {
      if (!v.is_array()) throw ConfigError("sweep_values: expected an array of numbers");
      c.sweep_values.clear();
      for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError("sweep_values: expected an array of numbers");
        c.sweep_values.push_back(e.get<double>());
      }
    } else if (key == "k_exponent") c.k_exponent = real();
  }
  if (!(c.tol >= 1e-14)) throw ConfigError("tol must be >= 1e-14");
  if (!std::isfinite(c.hx) || !std::isfinite(c.hy)) throw ConfigError("drive must be finite");
  if (c.nx < 1 || c.ny < 1 || c.nx > 4096 || c.ny > 4096) throw ConfigError("grid resolution must be in [1, 4096]");
  if (c.j != 1 && c.j != 2) throw ConfigError("j must be 1 or 2");
  if (c.n_theta < 1 || c.n_theta > 1'000'000) throw ConfigError("n_theta must be in [1, 1e6]");
  if (c.sweep_param != "eps" && c.sweep_param != "k") throw ConfigError("sweep_param must be eps or k");
  return c;
}

// Converts a flag string into the JSON value its key expects.
inline json flag_to_json(const KeyInfo& k, const std::string& s) {
  auto number = [&](const std::string& t) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      throw ConfigError(std::string("--") + k.name + ": invalid number '" + t + "'");
    }
    if (used != t.size()) throw ConfigError(std::string("--") + k.name + ": invalid number '" + t + "'");
    return v;
  };
  switch (k.kind) {
    case KeyKind::Real: return number(s);
    case KeyKind::Int: {
      const double v = number(s);
      if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(std::string("--") + k.name + ": expected an integer");
      return static_cast<long long>(v);
    }
    case KeyKind::Cond:
    case KeyKind::Text: return s;
    case KeyKind::Flag: return true;
    case KeyKind::List: {
      json arr = json::array();
      std::stringstream ss(s);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) arr.push_back(number(item));
      }
      return arr;
    }
  }
  return nullptr;
}

inline std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_conductivity(const Conductivity& k) {
  switch (k.kind()) {
    case Conductivity::Kind::PerfectlyConducting: return "inf";
    case Conductivity::Kind::Insulating: return "0";
    default: return format_real(k.value());
  }
}

inline DiskPairGeometry require_geometry(const RunConfig& c) {
  if (!c.r1 || !c.r2 || !c.eps) throw ConfigError("r1, r2 and eps are required");
  try {
    return build_geometry(*c.r1, *c.r2, *c.eps);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

inline ConductivityPair require_conductivities(const RunConfig& c) {
  if (!c.k1 || !c.k2) throw ConfigError("k1 and k2 are required");
  return {*c.k1, *c.k2};
}

inline json point_json(Vec2 p) { return json::array({p.x, p.y}); }

inline int cmd_geometry(const RunConfig& c, std::ostream& out, std::ostream&) {
  const DiskPairGeometry g = require_geometry(c);
  nlohmann::ordered_json j;
  j["r1"] = g.r1();
  j["r2"] = g.r2();
  j["eps"] = g.eps();
  j["alpha"] = g.alpha();
  j["xi1"] = g.xi1();
  j["xi2"] = g.xi2();
  j["r_star"] = g.r_star();
  j["pole1"] = point_json(g.pole1());
  j["pole2"] = point_json(g.pole2());
  j["center1"] = point_json(g.disk1().center);
  j["center2"] = point_json(g.disk2().center);
  j["closest1"] = point_json(g.closest_point(1));
  j["closest2"] = point_json(g.closest_point(2));
  j["midpoint"] = point_json(g.midpoint());
  j["unit_normal"] = point_json(g.unit_normal());
  j["unit_tangent"] = point_json(g.unit_tangent());
  if (c.k1 && c.k2) {
    const ConductivityPair k{*c.k1, *c.k2};
    const SingularParams p = make_params(g, k, {c.hx, c.hy});
    j["k1"] = format_conductivity(k.k1);
    j["k2"] = format_conductivity(k.k2);
    j["tau1"] = k.tau1();
    j["tau2"] = k.tau2();
    j["tau"] = k.tau();
    j["beta"] = p.beta;
    j["regime"] = to_string(p.regime);
    j["outside_theorem"] = p.outside_theorem;
    j["c_n"] = p.c_n;
    j["c_t"] = p.c_t;
    j["c_q"] = json::array({p.c_q.real(), p.c_q.imag()});
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

inline std::string csv_row(std::initializer_list<std::string> cells) {
  std::string s;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) s += ',';
    s += c;
    first = false;
  }
  return s;
}

inline int cmd_field(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const DiskPairGeometry g = require_geometry(c);
  const ConductivityPair k = require_conductivities(c);
  const HarmonicDrive d{c.hx, c.hy};
  const double x0 = c.x_min.value_or(g.disk1().center.x - 1.5 * g.r1());
  const double x1 = c.x_max.value_or(g.disk2().center.x + 1.5 * g.r2());
  const double h = 1.5 * std::max(g.r1(), g.r2());
  const double y0 = c.y_min.value_or(-h), y1 = c.y_max.value_or(h);
  if (!(x1 > x0) || !(y1 > y0)) throw ConfigError("field grid bounds are empty");

  const TransmissionSolver solver(g, k, d, c.tol);
  const SingularParams p = make_params(g, k, d);
  const bool with_ub = p.regime != Regime::Mixed;
  if (p.outside_theorem) err << "warning: conductivities on both sides of 1; no u_b columns\n";

  const std::size_t n = static_cast<std::size_t>(c.nx) * c.ny;
  std::vector<std::string> rows(n);
  std::vector<char> ok(n, 0);
  parallel_for(n, [&](std::size_t idx) {
    const int iy = static_cast<int>(idx / c.nx), ix = static_cast<int>(idx % c.nx);
    const CartesianPoint pt{c.nx == 1 ? x0 : x0 + (x1 - x0) * ix / (c.nx - 1),
                            c.ny == 1 ? y0 : y0 + (y1 - y0) * iy / (c.ny - 1)};
    try {
      const FieldValue f = solver.at(pt);
      const SingularValue q = evaluate_q(f.bp, f.side, g, p);
      std::vector<double> vals = {pt.x, pt.y, f.bp.xi, f.bp.theta, f.u, f.grad.x, f.grad.y,
                                  q.q.real(), q.q.imag(), q.grad_re.norm(), q.grad_im.norm()};
      if (with_ub) {
        const auto [sing, sing_grad] = singular_part(q, p);
        vals.push_back(f.u - sing - (d.hx * pt.x + d.hy * pt.y));
        vals.push_back((f.grad - sing_grad - Vec2{d.hx, d.hy}).norm());
      }
      std::string row;
      for (std::size_t i = 0; i < vals.size(); ++i) {
        if (!std::isfinite(vals[i])) return;
        if (i == 4) row += std::string(",") + to_string(f.region);
        if (i) row += ',';
        row += format_real(vals[i]);
      }
      rows[idx] = std::move(row);
      ok[idx] = 1;
    } catch (const std::exception&) {
    }
  });

  out << "x,y,xi,theta,region,u,ux,uy,q_re,q_im,grad_re_q,grad_im_q" << (with_ub ? ",ub,grad_ub" : "") << '\n';
  std::size_t failed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (ok[i]) out << rows[i] << '\n';
    else ++failed;
  }
  if (failed) err << "warning: " << failed << " of " << n << " grid points failed and were omitted\n";
  return failed * 100 > n ? kExitEval : kExitOk;
}

inline int cmd_boundary(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const DiskPairGeometry g = require_geometry(c);
  const ConductivityPair k = require_conductivities(c);
  const HarmonicDrive d{c.hx, c.hy};
  if (c.u_inf_gap && !infinity_gap_applies(k, d))
    throw ConfigError("u_inf_gap needs k1 = k2 > 1 finite and hy = 0");
  const SingularParams p = make_params(g, k, d);
  if (p.outside_theorem) err << "warning: conductivities on both sides of 1; Q is only indicative\n";

  const std::vector<double> th = theta_grid(c.n_theta);
  const BoundaryProfile bp = boundary_profiles(g, k, d, c.j, th, c.tol);
  std::optional<InfinityGap> gap;
  if (c.u_inf_gap) gap = infinity_gap(g, k.k1.value(), th, c.j, c.tol);

  out << "theta,exact_normal,exact_tangential,exact_grad_norm,Q,corollary_prediction,asymptotic,"
         "singular_normal,singular_tangential";
  if (gap) out << ",u_inf_normal,u_inf_gap,gap_prediction";
  out << '\n';
  for (std::size_t i = 0; i < th.size(); ++i) {
    out << csv_row({format_real(th[i]), format_real(bp.exact_normal[i]), format_real(bp.exact_tangential[i]),
                    format_real(bp.exact_grad_norm[i]), format_real(bp.q_profile[i]), format_real(bp.corollary[i]),
                    format_real(bp.asymptotic[i]), format_real(bp.singular_normal[i]),
                    format_real(bp.singular_tangential[i])});
    if (gap)
      out << ',' << csv_row({format_real(gap->u_inf_normal[i]), format_real(gap->gap_normal[i]),
                             format_real(gap->prediction[i])});
    out << '\n';
  }
  return kExitOk;
}

inline int cmd_sweep(const RunConfig& c, std::ostream& out, std::ostream&) {
  if (c.sweep_values.size() < 3) throw ConfigError("a sweep needs at least 3 values");
  if (!c.r1 || !c.r2) throw ConfigError("r1 and r2 are required");
  const HarmonicDrive d{c.hx, c.hy};
  const bool by_k = c.sweep_param == "k";
  if (by_k && !c.eps) throw ConfigError("a k sweep needs eps");
  if (!by_k && !c.k_exponent && (!c.k1 || !c.k2)) throw ConfigError("an eps sweep needs k1 and k2 or k_exponent");
  if (by_k && c.k_exponent) throw ConfigError("k_exponent applies to eps sweeps only");

  struct Job {
    double param, eps;
    ConductivityPair k;
  };
  std::vector<Job> jobs;
  for (double v : c.sweep_values) {
    try {
      if (by_k) {
        const Conductivity kk = Conductivity::finite(v);
        jobs.push_back({v, *c.eps, {kk, kk}});
      } else if (c.k_exponent) {
        const Conductivity kk = Conductivity::finite(std::pow(v, *c.k_exponent));
        jobs.push_back({v, v, {kk, kk}});
      } else {
        jobs.push_back({v, v, {*c.k1, *c.k2}});
      }
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    if (!(jobs.back().eps > 0)) throw ConfigError("eps values must be positive");
  }
  try {
    build_geometry(*c.r1, *c.r2, jobs.front().eps);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }

  std::vector<SweepRow> rows(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    rows[i] = sweep_row(jobs[i].param, *c.r1, *c.r2, jobs[i].eps, jobs[i].k, d, c.tol);
  });

  const bool has_ub = rows.front().sup_grad_ub.has_value();
  const bool has_gap = rows.front().gap_x1.has_value();
  out << "param,eps,k1,k2,beta,grad_x1" << (has_ub ? ",sup_grad_ub" : "") << (has_gap ? ",gap_x1,gap_sup" : "")
      << '\n';
  std::vector<double> xs, g1, ub, gx, gs;
  for (const SweepRow& r : rows) {
    out << csv_row({format_real(r.param), format_real(r.eps), format_conductivity(r.c.k1),
                    format_conductivity(r.c.k2), format_real(r.beta), format_real(r.grad_x1)});
    if (has_ub) out << ',' << format_real(*r.sup_grad_ub);
    if (has_gap) out << ',' << format_real(*r.gap_x1) << ',' << format_real(*r.gap_sup);
    out << '\n';
    xs.push_back(r.param);
    g1.push_back(r.grad_x1);
    if (has_ub) ub.push_back(*r.sup_grad_ub);
    if (has_gap) gx.push_back(*r.gap_x1), gs.push_back(*r.gap_sup);
  }

  nlohmann::ordered_json summary;
  summary["param"] = c.sweep_param;
  auto fit = [&](const char* name, const std::vector<double>& ys) {
    try {
      const LogLogFit f = loglog_fit(xs, ys);
      summary["slopes"][name] = {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}};
    } catch (const DomainError&) {
      summary["slopes"][name] = nullptr;
    }
  };
  fit("grad_x1", g1);
  if (has_ub) fit("sup_grad_ub", ub);
  if (has_gap) fit("gap_x1", gx), fit("gap_sup", gs);
  out << "# " << summary.dump() << '\n';
  return kExitOk;
}

inline json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

inline int run(int argc, char** argv, std::ostream& err = std::cerr) {
  CLI::App app{"Fields around two nearly touching circular inclusions"};
  app.require_subcommand(1);
  std::string config_path;
  std::map<std::string, std::string> given;
  std::map<std::string, bool> flags;

  const std::pair<const char*, const char*> names[] = {
      {"geometry", "bipolar frame as JSON (alpha, xi_j, r*, poles, closest points, beta)"},
      {"field", "potential, gradient and singular part on a Cartesian grid (CSV)"},
      {"boundary", "exterior boundary profiles and the Q prediction on boundary j (CSV)"},
      {"sweep", "closest-point blow-up, residual and gap over an eps or k sweep (CSV)"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, about] : names) {
    CLI::App* s = app.add_subcommand(name, about);
    s->add_option("--config", config_path, "JSON configuration file");
    for (const KeyInfo& k : config_keys()) {
      std::string flag = std::string("--") + k.name;
      std::replace(flag.begin(), flag.end(), '_', '-');
      if (k.kind == KeyKind::Flag) s->add_flag(flag, flags[k.name], k.help);
      else s->add_option(flag, given[k.name], k.help);
    }
    subs.push_back(s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    for (auto* s : subs)
      if (s->parsed()) std::cout << s->help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  CLI::App* sub = nullptr;
  for (auto* s : subs)
    if (s->parsed()) sub = s;

  RunConfig cfg;
  try {
    json doc = config_path.empty() ? json::object() : read_config_file(config_path);
    if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
    for (const KeyInfo& k : config_keys()) {
      std::string flag = std::string("--") + k.name;
      std::replace(flag.begin(), flag.end(), '_', '-');
      if (sub->count(flag) == 0) continue;
      doc[k.name] = flag_to_json(k, k.kind == KeyKind::Flag ? "" : given[k.name]);
    }
    cfg = load_config(doc);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::ostringstream buf;
  int code = kExitOk;
  try {
    const std::string name = sub->get_name();
    if (name == "geometry") code = cmd_geometry(cfg, buf, err);
    else if (name == "field") code = cmd_field(cfg, buf, err);
    else if (name == "boundary") code = cmd_boundary(cfg, buf, err);
    else code = cmd_sweep(cfg, buf, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "evaluation error: " << e.what() << '\n';
    return kExitEval;
  }

  if (cfg.out == "-") {
    std::cout << buf.str();
    std::cout.flush();
  } else {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) {
      err << "config error: cannot write '" << cfg.out << "'\n";
      return kExitConfig;
    }
    f << buf.str();
  }
  return code;
}

}  // namespace gapfield::cli
