// Command-line front end for the rdbinary shared library. Everything numeric
// goes through the C API in rdbinary.h; this file only parses inputs and
// serializes reports.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rdbinary.h"

using nlohmann::json;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

struct cli_error {
  int code;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) {
  throw cli_error{code, message};
}

void check(rdb_status st, const std::string& context) {
  if (st == RDB_OK) return;
  const int code = (st == RDB_ERR_NUMERIC) ? kExitNumeric : kExitInput;
  fail(code, context + ": " + rdb_status_message(st));
}

struct raw_data {
  std::vector<double> r;
  std::vector<double> y;
};

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

raw_data read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(kExitInput, "cannot open input file '" + path + "'");
  raw_data data;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string trimmed = strip(line);
    if (trimmed.empty()) continue;
    if (lineno == 1) {
      std::string header = trimmed;
      header.erase(std::remove_if(header.begin(), header.end(),
                                  [](char c) { return c == ' ' || c == '\t'; }),
                   header.end());
      if (header != "r,y") {
        fail(kExitInput, "line 1: expected header 'r,y', got '" + trimmed + "'");
      }
      continue;
    }
    const auto comma = trimmed.find(',');
    if (comma == std::string::npos) {
      fail(kExitInput, "line " + std::to_string(lineno) + ": expected 'r,y' row");
    }
    try {
      std::size_t used = 0;
      const std::string rs = strip(trimmed.substr(0, comma));
      const std::string ys = strip(trimmed.substr(comma + 1));
      const double r = std::stod(rs, &used);
      if (used != rs.size()) throw std::invalid_argument(rs);
      const double y = std::stod(ys, &used);
      if (used != ys.size()) throw std::invalid_argument(ys);
      data.r.push_back(r);
      data.y.push_back(y);
    } catch (const std::exception&) {
      fail(kExitInput, "line " + std::to_string(lineno) + ": malformed row '" +
                           trimmed + "'");
    }
  }
  if (data.r.empty()) fail(kExitInput, "input file has no data rows");
  return data;
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(out_path);
  if (!out) fail(kExitInput, "cannot open output file '" + out_path + "'");
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct design_handle {
  rdb_design* d = nullptr;
  design_handle() = default;
  design_handle(design_handle&& other) noexcept : d(other.d) { other.d = nullptr; }
  design_handle& operator=(design_handle&& other) noexcept {
    std::swap(d, other.d);
    return *this;
  }
  design_handle(const design_handle&) = delete;
  design_handle& operator=(const design_handle&) = delete;
  ~design_handle() { rdb_design_free(d); }
};

struct side_view {
  std::vector<double> radii;
  std::vector<double> outcomes;
};

side_view fetch_side(const rdb_design* d, rdb_side side) {
  side_view v;
  const size_t n = rdb_design_size(d, side);
  v.radii.resize(n);
  v.outcomes.resize(n);
  if (n > 0) {
    rdb_design_radii(d, side, v.radii.data());
    rdb_design_outcomes(d, side, v.outcomes.data());
  }
  return v;
}

// Shared knobs for the estimation commands.
struct common_options {
  std::string input;
  double cutoff = 0.0;
  double c_value = 0.0;
  bool c_given = false;
  bool use_rot = false;
  int rot_bins = 10;
  double alpha = 0.05;
  int sims = 3000;
  std::uint64_t seed = 20240501;
  std::string format = "json";
  std::string out;
};

void add_common(CLI::App* cmd, common_options& opt, bool with_inference) {
  cmd->add_option("--input", opt.input, "input CSV with header r,y")->required();
  cmd->add_option("--C", opt.c_value, "Lipschitz constant")
      ->check(CLI::NonNegativeNumber);
  cmd->add_flag("--rot", opt.use_rot, "use the rule-of-thumb Lipschitz constant");
  cmd->add_option("--bins", opt.rot_bins, "bins for the rule of thumb (default 10)");
  cmd->add_option("--seed", opt.seed, "random seed");
  cmd->add_option("--format", opt.format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", opt.out, "output path (default stdout)");
  if (with_inference) {
    cmd->add_option("--alpha", opt.alpha, "significance level (default 0.05)");
    cmd->add_option("--sims", opt.sims, "calibration draws per tail (default 3000)");
  }
}

double resolve_c(const common_options& opt, const rdb_design* d) {
  if (opt.c_given == opt.use_rot) {
    fail(kExitInput, "exactly one of --C or --rot is required");
  }
  if (opt.c_given) {
    if (!(opt.c_value > 0.0) && opt.c_value != 0.0) {
      fail(kExitInput, "--C must be a nonnegative number");
    }
    return opt.c_value;
  }
  double c = 0.0, cp = 0.0, cm = 0.0;
  check(rdb_rot_c(d, opt.rot_bins, &c, &cp, &cm), "rule-of-thumb constant");
  if (!(c > 0.0)) {
    fail(kExitInput,
         "rule-of-thumb slope is zero (flat binned means); pass an explicit --C");
  }
  return c;
}

json provenance(const common_options& opt, double c_used) {
  return json{{"input", opt.input},          {"cutoff", opt.cutoff},
              {"lipschitz", c_used},         {"alpha", opt.alpha},
              {"n_sims", opt.sims},          {"seed", opt.seed},
              {"rot", opt.use_rot},          {"rot_bins", opt.rot_bins},
              {"version", rdb_version()}};
}

struct solved_design {
  design_handle design;
  side_view treated;
  side_view control;
  std::vector<double> w_plus;
  std::vector<double> w_minus;
  double c_used = 0.0;
};

solved_design load_and_solve(const common_options& opt) {
  const raw_data data = read_csv(opt.input);
  solved_design sd;
  check(rdb_design_create(data.r.data(), data.y.data(), data.r.size(), opt.cutoff,
                          &sd.design.d),
        "design");
  sd.treated = fetch_side(sd.design.d, RDB_TREATED);
  sd.control = fetch_side(sd.design.d, RDB_CONTROL);
  sd.c_used = resolve_c(opt, sd.design.d);

  rdb_solver_options sopts = rdb_solver_options_default();
  sopts.seed = opt.seed;
  sd.w_plus.resize(sd.treated.radii.size());
  sd.w_minus.resize(sd.control.radii.size());
  check(rdb_solve_minimax_weights(sd.treated.radii.data(), sd.treated.radii.size(),
                                  sd.c_used, &sopts, sd.w_plus.data(), nullptr),
        "treated-side weights");
  check(rdb_solve_minimax_weights(sd.control.radii.data(), sd.control.radii.size(),
                                  sd.c_used, &sopts, sd.w_minus.data(), nullptr),
        "control-side weights");
  return sd;
}

json weights_rows(const solved_design& sd) {
  json rows = json::array();
  for (std::size_t i = 0; i < sd.treated.radii.size(); ++i) {
    rows.push_back({{"side", "treated"},
                    {"radius", sd.treated.radii[i]},
                    {"weight", sd.w_plus[i]}});
  }
  for (std::size_t i = 0; i < sd.control.radii.size(); ++i) {
    rows.push_back({{"side", "control"},
                    {"radius", sd.control.radii[i]},
                    {"weight", sd.w_minus[i]}});
  }
  return rows;
}

std::string weights_csv(const solved_design& sd) {
  std::ostringstream os;
  os << "side,radius,weight\n";
  for (std::size_t i = 0; i < sd.treated.radii.size(); ++i) {
    os << "treated," << fmt_double(sd.treated.radii[i]) << ','
       << fmt_double(sd.w_plus[i]) << '\n';
  }
  for (std::size_t i = 0; i < sd.control.radii.size(); ++i) {
    os << "control," << fmt_double(sd.control.radii[i]) << ','
       << fmt_double(sd.w_minus[i]) << '\n';
  }
  return os.str();
}

// Weight override file: same CSV schema the weights command emits.
void load_weights_file(const std::string& path, solved_design& sd) {
  std::ifstream in(path);
  if (!in) fail(kExitInput, "cannot open weights file '" + path + "'");
  std::string line;
  int lineno = 0;
  std::size_t ip = 0, im = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string trimmed = strip(line);
    if (trimmed.empty()) continue;
    if (lineno == 1) {
      if (strip(trimmed) != "side,radius,weight") {
        fail(kExitInput, "weights file line 1: expected header 'side,radius,weight'");
      }
      continue;
    }
    std::istringstream row(trimmed);
    std::string side, radius, weight;
    if (!std::getline(row, side, ',') || !std::getline(row, radius, ',') ||
        !std::getline(row, weight)) {
      fail(kExitInput, "weights file line " + std::to_string(lineno) + ": malformed");
    }
    try {
      const double w = std::stod(strip(weight));
      if (side == "treated") {
        if (ip >= sd.w_plus.size()) throw std::out_of_range("treated");
        sd.w_plus[ip++] = w;
      } else if (side == "control") {
        if (im >= sd.w_minus.size()) throw std::out_of_range("control");
        sd.w_minus[im++] = w;
      } else {
        throw std::invalid_argument(side);
      }
    } catch (const std::exception&) {
      fail(kExitInput, "weights file line " + std::to_string(lineno) + ": malformed");
    }
  }
  if (ip != sd.w_plus.size() || im != sd.w_minus.size()) {
    fail(kExitInput, "weights file does not match the design size");
  }
}

json estimate_block(const solved_design& sd) {
  double tau = 0.0, wc = 0.0;
  check(rdb_estimate(sd.design.d, sd.w_plus.data(), sd.w_minus.data(), &tau),
        "estimate");
  check(rdb_ate_worst_case_mse(sd.design.d, sd.w_plus.data(), sd.w_minus.data(),
                               sd.c_used, 0, &wc, nullptr, nullptr),
        "worst-case mse");
  return json{{"tau_hat", tau},
              {"worst_case_mse", wc},
              {"worst_case_root_mse", std::sqrt(wc)},
              {"n_treated", sd.treated.radii.size()},
              {"n_control", sd.control.radii.size()}};
}

json ci_block(const solved_design& sd, const common_options& opt) {
  rdb_inference_options iopts = rdb_inference_options_default();
  iopts.n_sims = opt.sims;
  iopts.seed = opt.seed;
  double lo = 0.0, hi = 0.0;
  check(rdb_confidence_interval(sd.design.d, sd.w_plus.data(), sd.w_minus.data(),
                                sd.c_used, opt.alpha, &iopts, &lo, &hi),
        "confidence interval");
  return json{{"lower", lo},
              {"upper", hi},
              {"alpha", opt.alpha},
              {"n_sims", iopts.n_sims},
              {"anchor_lattice", iopts.anchor_lattice},
              {"bisect_iters", iopts.bisect_iters},
              {"seed", opt.seed}};
}

int cmd_weights(const common_options& opt) {
  const solved_design sd = load_and_solve(opt);
  if (opt.format == "csv") {
    write_output(weights_csv(sd), opt.out);
    return 0;
  }
  json doc{{"command", "weights"},
           {"provenance", provenance(opt, sd.c_used)},
           {"weights", weights_rows(sd)}};
  write_output(doc.dump(2), opt.out);
  return 0;
}

int cmd_estimate(const common_options& opt, const std::string& weights_file) {
  solved_design sd = load_and_solve(opt);
  if (!weights_file.empty()) load_weights_file(weights_file, sd);
  json doc{{"command", "estimate"},
           {"provenance", provenance(opt, sd.c_used)},
           {"estimate", estimate_block(sd)}};
  if (opt.format == "csv") {
    std::ostringstream os;
    os << "tau_hat,worst_case_root_mse\n"
       << fmt_double(doc["estimate"]["tau_hat"].get<double>()) << ','
       << fmt_double(doc["estimate"]["worst_case_root_mse"].get<double>()) << '\n';
    write_output(os.str(), opt.out);
    return 0;
  }
  write_output(doc.dump(2), opt.out);
  return 0;
}

int cmd_ci(const common_options& opt) {
  const solved_design sd = load_and_solve(opt);
  json doc{{"command", "ci"},
           {"provenance", provenance(opt, sd.c_used)},
           {"estimate", estimate_block(sd)},
           {"interval", ci_block(sd, opt)}};
  if (opt.format == "csv") {
    std::ostringstream os;
    os << "tau_hat,lower,upper\n"
       << fmt_double(doc["estimate"]["tau_hat"].get<double>()) << ','
       << fmt_double(doc["interval"]["lower"].get<double>()) << ','
       << fmt_double(doc["interval"]["upper"].get<double>()) << '\n';
    write_output(os.str(), opt.out);
    return 0;
  }
  write_output(doc.dump(2), opt.out);
  return 0;
}

int cmd_multi_cutoff(const common_options& opt, const std::vector<double>& cutoffs) {
  if (cutoffs.empty()) fail(kExitInput, "--cutoffs requires at least one value");
  const raw_data data = read_csv(opt.input);
  std::vector<double> sorted_cutoffs(cutoffs);
  std::sort(sorted_cutoffs.begin(), sorted_cutoffs.end());

  // Nearest-cutoff assignment; ties go to the lower cutoff.
  std::vector<raw_data> groups(sorted_cutoffs.size());
  raw_data pooled;
  for (std::size_t i = 0; i < data.r.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < sorted_cutoffs.size(); ++k) {
      if (std::abs(data.r[i] - sorted_cutoffs[k]) <
          std::abs(data.r[i] - sorted_cutoffs[best])) {
        best = k;
      }
    }
    groups[best].r.push_back(data.r[i]);
    groups[best].y.push_back(data.y[i]);
    pooled.r.push_back(data.r[i] - sorted_cutoffs[best]);
    pooled.y.push_back(data.y[i]);
  }

  auto analyze = [&](const raw_data& rows, double cutoff) {
    common_options sub = opt;
    sub.cutoff = cutoff;
    solved_design sd;
    check(rdb_design_create(rows.r.data(), rows.y.data(), rows.r.size(), cutoff,
                            &sd.design.d),
          "design at cutoff " + fmt_double(cutoff));
    sd.treated = fetch_side(sd.design.d, RDB_TREATED);
    sd.control = fetch_side(sd.design.d, RDB_CONTROL);
    sd.c_used = resolve_c(sub, sd.design.d);
    rdb_solver_options sopts = rdb_solver_options_default();
    sopts.seed = sub.seed;
    sd.w_plus.resize(sd.treated.radii.size());
    sd.w_minus.resize(sd.control.radii.size());
    check(rdb_solve_minimax_weights(sd.treated.radii.data(), sd.treated.radii.size(),
                                    sd.c_used, &sopts, sd.w_plus.data(), nullptr),
          "weights");
    check(rdb_solve_minimax_weights(sd.control.radii.data(), sd.control.radii.size(),
                                    sd.c_used, &sopts, sd.w_minus.data(), nullptr),
          "weights");
    json block{{"cutoff", cutoff},
               {"n", rows.r.size()},
               {"lipschitz", sd.c_used},
               {"estimate", estimate_block(sd)},
               {"interval", ci_block(sd, sub)}};
    return block;
  };

  json per_cutoff = json::array();
  for (std::size_t k = 0; k < sorted_cutoffs.size(); ++k) {
    if (groups[k].r.empty()) {
      per_cutoff.push_back(
          {{"cutoff", sorted_cutoffs[k]}, {"n", 0}, {"skipped", "no observations"}});
      continue;
    }
    per_cutoff.push_back(analyze(groups[k], sorted_cutoffs[k]));
  }
  json doc{{"command", "multi-cutoff"},
           {"provenance", provenance(opt, opt.c_given ? opt.c_value : 0.0)},
           {"cutoffs", sorted_cutoffs},
           {"per_cutoff", per_cutoff},
           {"pooled", analyze(pooled, 0.0)}};
  write_output(doc.dump(2), opt.out);
  return 0;
}

int cmd_rot(const common_options& opt) {
  const raw_data data = read_csv(opt.input);
  design_handle design;
  check(rdb_design_create(data.r.data(), data.y.data(), data.r.size(), opt.cutoff,
                          &design.d),
        "design");
  double c = 0.0, cp = 0.0, cm = 0.0;
  check(rdb_rot_c(design.d, opt.rot_bins, &c, &cp, &cm), "rule-of-thumb constant");
  json doc{{"command", "rot"},
           {"bins", opt.rot_bins},
           {"c_rot", c},
           {"c_rot_treated", cp},
           {"c_rot_control", cm}};
  if (!(c > 0.0)) {
    doc["warning"] = "binned means are flat; pass an explicit --C for estimation";
  }
  write_output(doc.dump(2), opt.out);
  return 0;
}

struct simulate_options {
  std::string dgp = "flat";
  int n = 100;
  int reps = 3000;
  int ci_reps = 1500;
  double alpha = 0.05;
  double c_used = -1.0;
  double dgp_c = 0.5;
  double level = 0.5;
  std::string config;
  std::string estimators = "rdbinary,gauss";
  std::uint64_t seed = 20240501;
  int sims = 3000;
  std::string format = "json";
  std::string out;
};

// Plain-text config: `name = [c0, c1, ...]` per line, names lee_left/lee_right.
std::map<std::string, std::vector<double>> read_dgp_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(kExitInput, "cannot open config file '" + path + "'");
  std::map<std::string, std::vector<double>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string trimmed = strip(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const auto eq = trimmed.find('=');
    const auto lb = trimmed.find('[');
    const auto rb = trimmed.rfind(']');
    if (eq == std::string::npos || lb == std::string::npos || rb == std::string::npos ||
        rb < lb) {
      fail(kExitInput, "config line " + std::to_string(lineno) +
                           ": expected 'name = [c0, c1, ...]'");
    }
    const std::string name = strip(trimmed.substr(0, eq));
    std::vector<double> coef;
    std::string body = trimmed.substr(lb + 1, rb - lb - 1);
    std::istringstream items(body);
    std::string item;
    while (std::getline(items, item, ',')) {
      const std::string token = strip(item);
      if (token.empty()) continue;
      try {
        coef.push_back(std::stod(token));
      } catch (const std::exception&) {
        fail(kExitInput, "config line " + std::to_string(lineno) +
                             ": bad coefficient '" + token + "'");
      }
    }
    out[name] = coef;
  }
  return out;
}

int cmd_simulate(const simulate_options& opt) {
  rdb_study_spec spec = rdb_study_spec_default();
  if (opt.dgp == "flat") {
    spec.dgp = RDB_DGP_FLAT;
  } else if (opt.dgp == "lee") {
    spec.dgp = RDB_DGP_LEE;
  } else if (opt.dgp == "worst_case") {
    spec.dgp = RDB_DGP_WORST_CASE;
  } else {
    fail(kExitInput, "unknown dgp '" + opt.dgp + "' (flat, lee, worst_case)");
  }
  std::vector<double> coef_left, coef_right;
  if (!opt.config.empty()) {
    const auto cfg = read_dgp_config(opt.config);
    if (auto it = cfg.find("lee_left"); it != cfg.end()) coef_left = it->second;
    if (auto it = cfg.find("lee_right"); it != cfg.end()) coef_right = it->second;
  }
  if (!coef_left.empty()) {
    spec.coef_left = coef_left.data();
    spec.n_coef_left = coef_left.size();
  }
  if (!coef_right.empty()) {
    spec.coef_right = coef_right.data();
    spec.n_coef_right = coef_right.size();
  }
  spec.dgp_c = opt.dgp_c;
  spec.flat_level = opt.level;
  spec.n_obs = opt.n;
  spec.replications = opt.reps;
  spec.ci_replications = opt.ci_reps;
  spec.alpha = opt.alpha;
  spec.n_sims = opt.sims;
  spec.seed = opt.seed;

  if (opt.c_used >= 0.0) {
    spec.c_used = opt.c_used;
  } else if (spec.dgp == RDB_DGP_WORST_CASE) {
    spec.c_used = opt.dgp_c;
  } else if (spec.dgp == RDB_DGP_LEE) {
    double c = 0.0;
    check(rdb_lee_true_lipschitz(&spec, &c), "lee Lipschitz constant");
    spec.c_used = c;
  } else {
    fail(kExitInput, "--C is required for the flat dgp");
  }

  spec.with_rdbinary = opt.estimators.find("rdbinary") != std::string::npos;
  spec.with_gauss = opt.estimators.find("gauss") != std::string::npos;
  spec.with_unweighted = opt.estimators.find("unweighted") != std::string::npos;
  if (!spec.with_rdbinary && !spec.with_gauss && !spec.with_unweighted) {
    fail(kExitInput, "no estimators selected");
  }

  rdb_study_report report;
  check(rdb_run_study(&spec, &report), "study");

  auto stats_json = [](const rdb_estimator_stats& s) {
    return json{{"root_mse", s.root_mse},         {"root_mse_se", s.root_mse_se},
                {"bias", s.bias},                 {"bias_se", s.bias_se},
                {"mean_ci_length", s.mean_ci_length},
                {"ci_length_se", s.ci_length_se}, {"coverage", s.coverage},
                {"coverage_se", s.coverage_se}};
  };
  json results;
  if (report.rdbinary.present) results["rdbinary"] = stats_json(report.rdbinary);
  if (report.gauss.present) results["gauss"] = stats_json(report.gauss);
  if (report.unweighted.present) results["unweighted"] = stats_json(report.unweighted);

  json doc{{"command", "simulate"},
           {"provenance",
            {{"dgp", opt.dgp},
             {"n", opt.n},
             {"replications", opt.reps},
             {"ci_replications", opt.ci_reps},
             {"alpha", opt.alpha},
             {"c_used", spec.c_used},
             {"dgp_c", opt.dgp_c},
             {"level", opt.level},
             {"n_sims", opt.sims},
             {"seed", opt.seed},
             {"estimators", opt.estimators},
             {"version", rdb_version()}}},
           {"tau_true", report.tau_true},
           {"results", results}};
  if (opt.format == "csv") {
    std::ostringstream os;
    os << "estimator,root_mse,root_mse_se,bias,bias_se,mean_ci_length,ci_length_se,"
          "coverage,coverage_se\n";
    auto row = [&](const char* name, const rdb_estimator_stats& s) {
      if (!s.present) return;
      os << name << ',' << fmt_double(s.root_mse) << ',' << fmt_double(s.root_mse_se)
         << ',' << fmt_double(s.bias) << ',' << fmt_double(s.bias_se) << ','
         << fmt_double(s.mean_ci_length) << ',' << fmt_double(s.ci_length_se) << ','
         << fmt_double(s.coverage) << ',' << fmt_double(s.coverage_se) << '\n';
    };
    row("rdbinary", report.rdbinary);
    row("gauss", report.gauss);
    row("unweighted", report.unweighted);
    write_output(os.str(), opt.out);
    return 0;
  }
  write_output(doc.dump(2), opt.out);
  return 0;
}

struct compare_options {
  std::vector<int> n_grid{50, 100, 200, 500};
  double c = 1.0;
  std::uint64_t seed = 20240501;
  std::string out;
  std::string weights_out;
};

int cmd_compare_gauss(const compare_options& opt) {
  rdb_solver_options sopts = rdb_solver_options_default();
  sopts.seed = opt.seed;
  std::ostringstream os;
  os << "n,C,ratio_root_mse,ratio_mse,lemma_upper\n";
  std::ostringstream wos;
  wos << "n,C,radius,weight_binary,weight_gauss\n";
  for (int n : opt.n_grid) {
    if (n < 1) fail(kExitInput, "sample sizes must be positive");
    std::vector<double> radii(n);
    for (int i = 0; i < n; ++i) radii[i] = static_cast<double>(i + 1) / n;
    rdb_ratio_report rep;
    check(rdb_compare_worst_case(radii.data(), radii.size(), opt.c, &sopts, &rep),
          "comparison");
    os << n << ',' << fmt_double(opt.c) << ',' << fmt_double(rep.ratio_root_mse) << ','
       << fmt_double(rep.ratio_mse) << ',' << fmt_double(rep.lemma_upper) << '\n';
    if (!opt.weights_out.empty()) {
      std::vector<double> wb(n), wg(n);
      check(rdb_solve_minimax_weights(radii.data(), radii.size(), opt.c, &sopts,
                                      wb.data(), nullptr),
            "weights");
      check(rdb_solve_gaussian_weights(radii.data(), radii.size(), opt.c, nullptr,
                                       &sopts, wg.data(), nullptr),
            "weights");
      for (int i = 0; i < n; ++i) {
        wos << n << ',' << fmt_double(opt.c) << ',' << fmt_double(radii[i]) << ','
            << fmt_double(wb[i]) << ',' << fmt_double(wg[i]) << '\n';
      }
    }
  }
  write_output(os.str(), opt.out);
  if (!opt.weights_out.empty()) {
    std::ofstream wf(opt.weights_out);
    if (!wf) fail(kExitInput, "cannot open '" + opt.weights_out + "'");
    wf << wos.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-sample minimax estimation and inference for regression "
               "discontinuity designs with binary outcomes"};
  app.require_subcommand(1);

  common_options w_opt, e_opt, c_opt, m_opt, r_opt;
  std::string weights_file;
  std::vector<double> cutoffs;
  simulate_options s_opt;
  compare_options g_opt;

  CLI::App* weights = app.add_subcommand("weights", "solve and export the minimax weights");
  add_common(weights, w_opt, false);
  weights->add_option("--cutoff", w_opt.cutoff, "cutoff location")->required();

  CLI::App* estimate = app.add_subcommand("estimate", "point estimate with certified worst-case error");
  add_common(estimate, e_opt, false);
  estimate->add_option("--cutoff", e_opt.cutoff, "cutoff location")->required();
  estimate->add_option("--weights-file", weights_file,
                       "override weights (CSV from the weights command)");

  CLI::App* ci = app.add_subcommand("ci", "test-inversion confidence interval");
  add_common(ci, c_opt, true);
  ci->add_option("--cutoff", c_opt.cutoff, "cutoff location")->required();

  CLI::App* multi = app.add_subcommand("multi-cutoff", "per-cutoff and pooled analyses");
  add_common(multi, m_opt, true);
  multi->add_option("--cutoffs", cutoffs, "cutoff list")->required()->delimiter(',');

  CLI::App* rot = app.add_subcommand("rot", "rule-of-thumb Lipschitz constant");
  rot->add_option("--input", r_opt.input, "input CSV with header r,y")->required();
  rot->add_option("--cutoff", r_opt.cutoff, "cutoff location")->required();
  rot->add_option("--bins", r_opt.rot_bins, "number of bins (default 10)");
  rot->add_option("--out", r_opt.out, "output path (default stdout)");

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo study");
  simulate->add_option("--dgp", s_opt.dgp, "flat, lee, or worst_case")->required();
  simulate->add_option("--n", s_opt.n, "total sample size (default 100)");
  simulate->add_option("--reps", s_opt.reps, "point-estimate replications");
  simulate->add_option("--ci-reps", s_opt.ci_reps, "interval replications");
  simulate->add_option("--alpha", s_opt.alpha, "significance level");
  simulate->add_option("--C", s_opt.c_used, "Lipschitz constant for the estimators");
  simulate->add_option("--dgp-c", s_opt.dgp_c, "worst-case envelope slope");
  simulate->add_option("--level", s_opt.level, "flat model level");
  simulate->add_option("--config", s_opt.config, "dgp coefficient config file");
  simulate->add_option("--estimators", s_opt.estimators,
                       "comma list: rdbinary,gauss,unweighted");
  simulate->add_option("--sims", s_opt.sims, "calibration draws per tail");
  simulate->add_option("--seed", s_opt.seed, "random seed");
  simulate->add_option("--format", s_opt.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  simulate->add_option("--out", s_opt.out, "output path (default stdout)");

  CLI::App* compare = app.add_subcommand("compare-gauss",
                                         "worst-case ratio of the Gaussian weights");
  compare->add_option("--n-grid", g_opt.n_grid, "sample sizes")->delimiter(',');
  compare->add_option("--C", g_opt.c, "Lipschitz constant (default 1)");
  compare->add_option("--seed", g_opt.seed, "random seed");
  compare->add_option("--out", g_opt.out, "output path (default stdout)");
  compare->add_option("--weights-out", g_opt.weights_out, "weight vectors CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    if (weights->parsed()) {
      w_opt.c_given = weights->count("--C") > 0;
      return cmd_weights(w_opt);
    }
    if (estimate->parsed()) {
      e_opt.c_given = estimate->count("--C") > 0;
      return cmd_estimate(e_opt, weights_file);
    }
    if (ci->parsed()) {
      c_opt.c_given = ci->count("--C") > 0;
      return cmd_ci(c_opt);
    }
    if (multi->parsed()) {
      m_opt.c_given = multi->count("--C") > 0;
      return cmd_multi_cutoff(m_opt, cutoffs);
    }
    if (rot->parsed()) return cmd_rot(r_opt);
    if (simulate->parsed()) return cmd_simulate(s_opt);
    if (compare->parsed()) return cmd_compare_gauss(g_opt);
  } catch (const cli_error& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
