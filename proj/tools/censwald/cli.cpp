#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "censwald/data.hpp"
#include "censwald/error.hpp"
#include "censwald/hypothesis.hpp"
#include "censwald/influence.hpp"
#include "censwald/kmpl.hpp"
#include "censwald/montecarlo.hpp"
#include "censwald/twosample.hpp"
#include "hypothesis_parse.hpp"

namespace censwald::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kDefaultGrid = "0:1:0.1";

double parse_number(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InvalidArgument("not a number: '" + std::string(s) + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

json to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json to_json(const FitResult& r) {
  json j;
  j["alpha"] = r.alpha;
  j["family"] = std::string(family(r.family).name());
  j["n"] = r.n;
  j["theta_hat"] = to_json(r.theta_hat);
  j["standard_errors"] = to_json(r.standard_errors());
  j["objective"] = std::isfinite(r.objective_value) ? json(r.objective_value) : json(nullptr);
  j["eqn_residual"] = std::isfinite(r.eqn_residual) ? json(r.eqn_residual) : json(nullptr);
  j["converged"] = r.converged;
  j["method"] = to_string(r.method);
  j["iterations"] = r.iterations;
  j["lambda_hat"] = to_json(r.lambda_hat);
  j["c_hat"] = to_json(r.c_hat);
  j["sigma_hat"] = to_json(r.sigma_hat);
  j["lambda_condition"] = r.lambda_condition;
  j["residual_mass"] = r.residual_mass;
  j["heavy_tail"] = r.residual_mass > 0.05;
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

json to_json(const TestReport& t) {
  return json{{"hypothesis", t.description}, {"alpha", t.alpha_dpd},     {"statistic", t.statistic},
              {"df", t.df},                  {"p_value", t.p_value},      {"level", t.level},
              {"reject", t.reject},          {"n", t.n},                  {"m", to_json(t.m_value)},
              {"inner_condition", t.inner_condition}, {"lambda_condition", t.lambda_condition},
              {"heavy_tail", t.heavy_tail}};
}

json to_json(const TwoSampleReport& t) {
  return json{{"hypothesis", t.description}, {"alpha", t.alpha_dpd},   {"statistic", t.statistic},
              {"df", t.df},                  {"one_sided", t.one_sided}, {"direction", to_string(t.direction)},
              {"p_value", t.p_value},        {"level", t.level},       {"reject", t.reject},
              {"n1", t.n1},                  {"n2", t.n2},             {"theta1", to_json(t.theta1)},
              {"theta2", to_json(t.theta2)}, {"m", to_json(t.m_value)}, {"sigma_tilde", to_json(t.sigma_tilde)}};
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
}

std::ofstream open_csv(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << std::setprecision(17);
  return os;
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

// ---------------------------------------------------------------------------------------------
// Input handling

struct Inputs {
  std::vector<std::string> labels;
  std::vector<CensoredSample> samples;
};

CsvColumns columns_for(const RunConfig& cfg) {
  CsvColumns c;
  if (cfg.dataset == "veteran") c.time = "time_days";
  if (cfg.time_column) c.time = *cfg.time_column;
  if (cfg.status_column) c.status = *cfg.status_column;
  return c;
}

fs::path primary_path(const RunConfig& cfg) {
  if (!cfg.dataset.empty()) {
    if (!cfg.inputs.empty()) throw InvalidArgument("give either --input or --dataset, not both");
    return bundled_dataset(cfg.dataset);
  }
  if (cfg.inputs.empty()) throw InvalidArgument("no input: give --input <csv> or --dataset veteran");
  return cfg.inputs.front();
}

std::string arm_column_for(const RunConfig& cfg) {
  if (!cfg.arm_column.empty()) return cfg.arm_column;
  return cfg.dataset == "veteran" && !cfg.arms.empty() ? "arm" : std::string();
}

// One sample: the whole file, or the single arm named by --arms.
std::pair<std::string, CensoredSample> load_one(const RunConfig& cfg) {
  const fs::path path = primary_path(cfg);
  const CsvColumns cols = columns_for(cfg);
  const std::string arm_col = arm_column_for(cfg);
  if (arm_col.empty() || cfg.arms.empty()) {
    if (!cfg.arms.empty()) throw InvalidArgument("--arms needs --arm-column");
    return {path.filename().string(), ingest_csv(path, cols)};
  }
  if (cfg.arms.size() != 1) throw InvalidArgument("this command takes a single arm");
  auto arms = ingest_csv_arms(path, cols, arm_col);
  const auto it = arms.find(cfg.arms.front());
  if (it == arms.end()) throw InvalidArgument("arm '" + cfg.arms.front() + "' not found in column " + arm_col);
  return {it->first, it->second};
}

Inputs load_two(const RunConfig& cfg) {
  Inputs in;
  const CsvColumns cols = columns_for(cfg);
  if (cfg.dataset.empty() && cfg.inputs.size() == 2) {
    for (const auto& p : cfg.inputs) {
      in.labels.push_back(p.filename().string());
      in.samples.push_back(ingest_csv(p, cols));
    }
    return in;
  }
  const fs::path path = primary_path(cfg);
  std::string arm_col = cfg.arm_column;
  if (arm_col.empty() && cfg.dataset == "veteran") arm_col = "arm";
  if (arm_col.empty()) throw InvalidArgument("compare needs two --input files or --arm-column");
  auto arms = ingest_csv_arms(path, cols, arm_col);
  std::vector<std::string> wanted = cfg.arms;
  if (wanted.empty())
    for (const auto& [k, v] : arms) wanted.push_back(k);
  if (wanted.size() != 2)
    throw InvalidArgument("compare needs exactly two arms, found " + std::to_string(wanted.size()));
  for (const auto& w : wanted) {
    const auto it = arms.find(w);
    if (it == arms.end()) throw InvalidArgument("arm '" + w + "' not found in column " + arm_col);
    in.labels.push_back(it->first);
    in.samples.push_back(it->second);
  }
  return in;
}

std::vector<double> grid_or_default(const RunConfig& cfg) {
  return cfg.alpha_grid.empty() ? parse_grid(kDefaultGrid) : cfg.alpha_grid;
}

FitConfig fit_config(const RunConfig& cfg) {
  FitConfig fc;
  fc.seed = cfg.seed;
  fc.lambda_kind = cfg.lambda_kind.value_or(LambdaKind::Model);
  return fc;
}

void print_fit_table(std::ostream& out, const std::string& label, const std::vector<FitResult>& fits,
                     const Family& fam) {
  const auto names = fam.parameter_names();
  out << label << " (n=" << (fits.empty() ? 0 : fits.front().n) << ", " << fam.name() << ")\n";
  out << std::left << std::setw(8) << "alpha";
  for (const auto& nm : names) out << std::setw(24) << nm + " (se)";
  out << "converged\n";
  for (const auto& f : fits) {
    out << std::setw(8) << fmt(f.alpha, 2);
    const Vec se = f.standard_errors();
    for (Eigen::Index j = 0; j < f.theta_hat.size(); ++j) {
      std::string cell = fmt(f.theta_hat[j]);
      if (se.size() == f.theta_hat.size()) cell += " (" + fmt(se[j]) + ")";
      out << std::setw(24) << cell;
    }
    out << (f.converged ? "yes" : "NO") << (f.error.empty() ? "" : "  " + f.error) << '\n';
  }
  out << std::right;
}

// ---------------------------------------------------------------------------------------------
// Commands

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  const Family& fam = family_by_name(cfg.family);
  const auto [label, sample] = load_one(cfg);
  const auto grid = grid_or_default(cfg);
  const auto fits = fit_grid(sample, fam, grid, fit_config(cfg));
  std::vector<FitRow> rows;
  json j = json::array();
  bool ok = true;
  for (const auto& f : fits) {
    rows.push_back(FitRow::from(f));
    j.push_back(to_json(f));
    ok = ok && f.converged;
  }
  write_fit_csv(rows, fam.parameter_names(), cfg.out / "fit.csv");
  write_json(j, cfg.out / "fit.json");
  if (!cfg.quiet) {
    print_fit_table(out, label, fits, fam);
    if (!fits.empty() && fits.front().residual_mass > 0.05)
      out << "note: KMPL tail mass " << fmt(fits.front().residual_mass) << " reassigned to the largest time\n";
  }
  return ok ? 0 : 1;
}

int cmd_test(const RunConfig& cfg, std::ostream& out) {
  const Family& fam = family_by_name(cfg.family);
  if (cfg.hypotheses.empty()) throw InvalidArgument("test needs --hypothesis");
  std::vector<Restriction> restrictions;
  for (const auto& h : cfg.hypotheses) {
    auto parsed = hypothesis_parse(h, fam);
    if (!std::holds_alternative<Restriction>(parsed))
      throw InvalidArgument("'" + h + "' is a two-sample hypothesis; use the compare command");
    restrictions.push_back(std::get<Restriction>(std::move(parsed)));
  }
  const auto [label, sample] = load_one(cfg);
  const auto fits = fit_grid(sample, fam, grid_or_default(cfg), fit_config(cfg));
  auto csv = open_csv(cfg.out / "tests.csv");
  csv << "alpha,hypothesis,statistic,df,p_value,reject,converged\n";
  json j = json::array();
  bool ok = true;
  if (!cfg.quiet) out << label << ": Wald-type tests, level " << cfg.level << '\n';
  for (const auto& f : fits) {
    for (const auto& r : restrictions) {
      if (!f.converged) {
        ok = false;
        csv << f.alpha << ",\"" << r.description << "\",nan,nan,nan,nan,0\n";
        if (!cfg.quiet) out << "  alpha=" << fmt(f.alpha, 2) << "  " << r.description << "  fit did not converge\n";
        continue;
      }
      const TestReport t = wald_statistic(f, r, cfg.level);
      csv << f.alpha << ",\"" << r.description << "\"," << t.statistic << ',' << t.df << ',' << t.p_value << ','
          << (t.reject ? 1 : 0) << ",1\n";
      j.push_back(to_json(t));
      if (!cfg.quiet)
        out << "  alpha=" << fmt(f.alpha, 2) << "  " << r.description << "  W=" << fmt(t.statistic)
            << "  df=" << t.df << "  p=" << fmt(t.p_value) << (t.reject ? "  reject" : "") << '\n';
    }
  }
  write_json(j, cfg.out / "tests.json");
  return ok ? 0 : 1;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out) {
  const Family& fam = family_by_name(cfg.family);
  std::vector<TwoSampleRestriction> restrictions;
  const std::vector<std::string> specs = cfg.hypotheses.empty() ? std::vector<std::string>{"theta1=theta2"}
                                                                 : cfg.hypotheses;
  for (const auto& h : specs) {
    auto parsed = hypothesis_parse(h, fam);
    if (!std::holds_alternative<TwoSampleRestriction>(parsed))
      throw InvalidArgument("'" + h + "' is a one-sample hypothesis; use the test command");
    restrictions.push_back(std::get<TwoSampleRestriction>(std::move(parsed)));
  }
  const Inputs in = load_two(cfg);
  const auto grid = grid_or_default(cfg);
  const auto fits1 = fit_grid(in.samples[0], fam, grid, fit_config(cfg));
  const auto fits2 = fit_grid(in.samples[1], fam, grid, fit_config(cfg));
  auto csv = open_csv(cfg.out / "compare.csv");
  csv << "alpha,hypothesis,statistic,df,p_value,reject,one_sided_statistic,one_sided_p_value,direction,converged\n";
  json j = json::array();
  bool ok = true;
  if (!cfg.quiet) out << in.labels[0] << " vs " << in.labels[1] << ": two-sample Wald-type tests\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto& f1 = fits1[k];
    const auto& f2 = fits2[k];
    for (const auto& r : restrictions) {
      if (!f1.converged || !f2.converged) {
        ok = false;
        csv << grid[k] << ",\"" << r.description << "\",nan,nan,nan,nan,nan,nan," << to_string(r.direction)
            << ",0\n";
        continue;
      }
      const TwoSampleReport two = two_sample_wald(f1, f1.n, f2, f2.n, r, cfg.level);
      j.push_back(to_json(two));
      csv << grid[k] << ",\"" << r.description << "\"," << two.statistic << ',' << two.df << ',' << two.p_value
          << ',' << (two.reject ? 1 : 0) << ',';
      std::string line = "  alpha=" + fmt(grid[k], 2) + "  " + r.description + "  W=" + fmt(two.statistic) +
                         "  p=" + fmt(two.p_value);
      if (r.direction != Direction::TwoSided) {
        const TwoSampleReport one = one_sided_wald(f1, f1.n, f2, f2.n, r, cfg.level);
        j.push_back(to_json(one));
        csv << one.statistic << ',' << one.p_value;
        line += "  one-sided(" + std::string(to_string(r.direction)) + ") z=" + fmt(one.statistic) +
                "  p=" + fmt(one.p_value);
      } else {
        csv << "nan,nan";
      }
      csv << ',' << to_string(r.direction) << ",1\n";
      if (!cfg.quiet) out << line << '\n';
    }
  }
  write_json(j, cfg.out / "compare.json");
  return ok ? 0 : 1;
}

int cmd_influence(const RunConfig& cfg, std::ostream& out) {
  const Family& fam = family_by_name(cfg.family);
  if (cfg.theta.empty()) throw InvalidArgument("influence needs --theta");
  const Vec theta0 = Eigen::Map<const Vec>(cfg.theta.data(), static_cast<Eigen::Index>(cfg.theta.size()));
  fam.validate(theta0);
  const std::vector<double> grid = cfg.t_grid.empty() ? parse_grid("0.1:20:0.1") : cfg.t_grid;
  std::optional<Restriction> restriction;
  if (!cfg.hypotheses.empty()) {
    auto parsed = hypothesis_parse(cfg.hypotheses.front(), fam);
    if (!std::holds_alternative<Restriction>(parsed))
      throw InvalidArgument("influence takes a one-sample hypothesis");
    restriction = std::get<Restriction>(std::move(parsed));
  }
  Vec d;
  if (!cfg.pif_direction.empty()) {
    if (!restriction) throw InvalidArgument("--pif-d needs --hypothesis");
    d = Eigen::Map<const Vec>(cfg.pif_direction.data(), static_cast<Eigen::Index>(cfg.pif_direction.size()));
  }
  const auto alphas = cfg.alpha_grid.empty() ? std::vector<double>{0.0, 0.5, 1.0} : cfg.alpha_grid;
  for (double a : alphas) {
    IfCurve curve = if_curve(fam, theta0, a, grid);
    const Mat sigma = sigma_model(fam, theta0, a);
    Mat extra(static_cast<Eigen::Index>(grid.size()), (restriction ? 1 : 0) + (d.size() ? 1 : 0));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      Eigen::Index c = 0;
      if (restriction) extra(static_cast<Eigen::Index>(i), c++) = if2_wald(fam, theta0, a, *restriction, sigma, grid[i]);
      if (d.size()) extra(static_cast<Eigen::Index>(i), c++) = pif(fam, theta0, a, *restriction, sigma, d, grid[i], cfg.level);
    }
    if (extra.cols() > 0) {
      Mat joined(curve.values.rows(), curve.values.cols() + extra.cols());
      joined << curve.values, extra;
      curve.values = joined;
      if (restriction) curve.columns.push_back("if2");
      if (d.size()) curve.columns.push_back("pif");
    }
    std::ostringstream name;
    name << "influence_alpha_" << a << ".csv";
    write_if_curve_csv(curve, cfg.out / name.str());
    if (!cfg.quiet) {
      const Vec sup = curve.values.cwiseAbs().colwise().maxCoeff();
      out << "alpha=" << fmt(a, 2) << "  sup over grid:";
      for (std::size_t c = 0; c < curve.columns.size(); ++c)
        out << "  " << curve.columns[c] << "=" << fmt(sup[static_cast<Eigen::Index>(c)]);
      out << "  -> " << (cfg.out / name.str()).string() << '\n';
    }
  }
  return 0;
}

ExperimentKind parse_kind(const std::string& k) {
  if (k == "level_power" || k == "level-power") return ExperimentKind::LevelPower;
  if (k == "mse") return ExperimentKind::Mse;
  if (k == "variance_ratio" || k == "variance-ratio") return ExperimentKind::VarianceRatio;
  throw InvalidArgument("unknown experiment kind '" + k + "'");
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  RunConfig c = cfg;
  if (c.preset == "weibull-2-5") {
    c.family = "weibull";
    if (c.theta.empty()) c.theta = {2.0, 5.0};
    if (!c.censoring_mean && !c.censoring_rate) c.censoring_rate = 0.1;
    if (c.hypotheses.empty()) c.hypotheses = {"scale=2,shape=5", "scale=2.2,shape=2.3", "shape=5", "shape=2"};
    if (!c.lambda_kind) c.lambda_kind = LambdaKind::Empirical;
  } else if (!c.preset.empty()) {
    throw InvalidArgument("unknown preset '" + c.preset + "'");
  }
  const Family& fam = family_by_name(c.family);
  if (c.theta.empty()) throw InvalidArgument("simulate needs --theta (or --preset weibull-2-5)");
  ExperimentSpec spec;
  spec.kind = parse_kind(c.kind);
  spec.design.lifetime = {fam.id(), Eigen::Map<const Vec>(c.theta.data(), static_cast<Eigen::Index>(c.theta.size()))};
  fam.validate(spec.design.lifetime.theta);
  if (c.censoring_mean) {
    spec.design.censoring_mean = *c.censoring_mean;
  } else {
    spec.design.censoring_mean = censoring_mean_for_rate(spec.design.lifetime, c.censoring_rate.value_or(0.1));
  }
  spec.design.contamination_fraction = c.contamination;
  const Family& cfam = family_by_name(c.contamination_family);
  spec.design.contamination = {
      cfam.id(), Eigen::Map<const Vec>(c.contamination_theta.data(), static_cast<Eigen::Index>(c.contamination_theta.size()))};
  spec.design.seed = c.seed;
  spec.fit_family = fam.id();
  spec.n = c.n;
  spec.replications = c.replications;
  spec.alpha_grid = grid_or_default(c);
  spec.level = c.level;
  spec.workers = c.workers;
  spec.fit.seed = c.seed;
  spec.fit.lambda_kind = c.lambda_kind.value_or(LambdaKind::Model);
  for (const auto& h : c.hypotheses) {
    auto parsed = hypothesis_parse(h, fam);
    if (!std::holds_alternative<Restriction>(parsed)) throw InvalidArgument("simulate takes one-sample hypotheses");
    spec.hypotheses.push_back(std::get<Restriction>(std::move(parsed)));
  }
  const ExperimentReport rep = run_experiment(spec);
  rep.write_csv(c.out / "simulate.csv");
  {
    std::ofstream summary(c.out / "simulate_summary.txt");
    rep.write_summary(summary);
  }
  if (!c.quiet) rep.write_summary(out);
  return rep.valid ? 0 : 1;
}

int cmd_kmplot(const RunConfig& cfg, std::ostream& out) {
  const auto [label, sample] = load_one(cfg);
  const KmplFit km = kmpl_fit(sample);
  write_kmpl_csv(km, cfg.out / "kmplot.csv");
  if (!cfg.quiet)
    out << label << ": " << km.support.size() << " distinct event times, tail mass " << fmt(km.residual_mass)
        << " -> " << (cfg.out / "kmplot.csv").string() << '\n';
  return 0;
}

void error_json(std::ostream& err, const std::string& kind, const std::string& message,
                const json& extra = json::object()) {
  json j = extra;
  j["error"] = kind;
  j["message"] = message;
  err << j.dump() << '\n';
}

}  // namespace

// ---------------------------------------------------------------------------------------------

FitRow FitRow::from(const FitResult& r) {
  FitRow row;
  row.alpha = r.alpha;
  row.theta = r.theta_hat;
  row.se = r.standard_errors();
  if (row.se.size() != row.theta.size()) row.se = Vec::Constant(row.theta.size(), std::nan(""));
  row.objective = r.objective_value;
  row.eqn_residual = r.eqn_residual;
  row.converged = r.converged;
  row.method = to_string(r.method);
  row.iterations = r.iterations;
  row.residual_mass = r.residual_mass;
  return row;
}

void write_fit_csv(const std::vector<FitRow>& rows, const std::vector<std::string>& names, const fs::path& path) {
  auto os = open_csv(path);
  os << "alpha";
  for (const auto& n : names) os << ',' << n;
  for (const auto& n : names) os << ",se_" << n;
  os << ",objective,eqn_residual,converged,method,iterations,residual_mass\n";
  for (const auto& r : rows) {
    os << r.alpha;
    for (Eigen::Index j = 0; j < r.theta.size(); ++j) os << ',' << r.theta[j];
    for (Eigen::Index j = 0; j < r.se.size(); ++j) os << ',' << r.se[j];
    os << ',' << r.objective << ',' << r.eqn_residual << ',' << (r.converged ? 1 : 0) << ',' << r.method << ','
       << r.iterations << ',' << r.residual_mass << '\n';
  }
  if (!os) throw Error("failed writing " + path.string());
}

std::vector<FitRow> read_fit_csv(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw DataError("empty fit table");
  const auto header = split(line, ',');
  const std::size_t fixed = 7;  // alpha + 6 trailing columns
  if (header.size() < fixed + 2 || (header.size() - fixed) % 2 != 0) throw DataError("unexpected fit table header");
  const auto p = static_cast<Eigen::Index>((header.size() - fixed) / 2);
  auto number = [](const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
    return parse_number(s);
  };
  std::vector<FitRow> rows;
  std::size_t row_no = 1;
  while (std::getline(is, line)) {
    ++row_no;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) throw DataError("wrong number of fields", row_no, "");
    FitRow r;
    std::size_t k = 0;
    r.alpha = number(cells[k++]);
    r.theta.resize(p);
    r.se.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) r.theta[j] = number(cells[k++]);
    for (Eigen::Index j = 0; j < p; ++j) r.se[j] = number(cells[k++]);
    r.objective = number(cells[k++]);
    r.eqn_residual = number(cells[k++]);
    r.converged = cells[k++] == "1";
    r.method = cells[k++];
    r.iterations = static_cast<int>(number(cells[k++]));
    r.residual_mass = number(cells[k++]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<double> parse_grid(const std::string& text) {
  if (text.find(':') == std::string::npos) return parse_list(text);
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw InvalidArgument("grid must look like a:b:step");
  const double a = parse_number(parts[0]);
  const double b = parse_number(parts[1]);
  const double step = parse_number(parts[2]);
  if (!(step > 0.0) || !(b >= a)) throw InvalidArgument("grid needs b >= a and step > 0");
  const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9));
  if (count > 1000000) throw InvalidArgument("grid is too large");
  std::vector<double> out;
  for (std::size_t i = 0; i <= count; ++i) {
    // Round to 12 significant decimals so 0.1 steps print as 0.3, not 0.30000000000000004.
    const double v = a + static_cast<double>(i) * step;
    out.push_back(std::round(v * 1e12) / 1e12);
  }
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_number(part));
  if (out.empty()) throw InvalidArgument("empty list");
  return out;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (!(config.level > 0.0 && config.level < 1.0)) throw InvalidArgument("--level must lie in (0, 1)");
    fs::create_directories(config.out);
    if (config.command == "fit") return cmd_fit(config, out);
    if (config.command == "test") return cmd_test(config, out);
    if (config.command == "compare") return cmd_compare(config, out);
    if (config.command == "influence") return cmd_influence(config, out);
    if (config.command == "simulate") return cmd_simulate(config, out);
    if (config.command == "kmplot") return cmd_kmplot(config, out);
    throw InvalidArgument("unknown command '" + config.command + "'");
  } catch (const ParseError& e) {
    error_json(err, "parse", e.what(), {{"position", e.position()}});
    return 2;
  } catch (const DataError& e) {
    json extra = json::object();
    if (e.row() > 0) extra["row"] = e.row();
    if (!e.column().empty()) extra["column"] = e.column();
    error_json(err, "data", e.what(), extra);
    return 2;
  } catch (const InvalidArgument& e) {
    error_json(err, "invalid_argument", e.what());
    return 2;
  } catch (const NumericalError& e) {
    error_json(err, "numerical", e.what());
    return 1;
  } catch (const Error& e) {
    error_json(err, "error", e.what());
    return 2;
  } catch (const fs::filesystem_error& e) {
    error_json(err, "io", e.what());
    return 2;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Robust Wald-type tests for randomly censored survival data"};
  app.require_subcommand(1, 1);

  std::string alpha_text, alpha_grid_text, theta_text, t_grid_text, d_text, contamination_theta_text, lambda_text;
  std::vector<std::string> inputs;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;

  auto add_data = [&](CLI::App* sub) {
    sub->add_option("--input,-i", inputs, "CSV file(s) with a header row")->check(CLI::ExistingFile);
    sub->add_option("--dataset", cfg.dataset, "bundled data set (veteran)");
    sub->add_option("--time-column", cfg.time_column, "time column name (default 'time')");
    sub->add_option("--status-column", cfg.status_column, "event indicator column (default 'status')");
    sub->add_option("--arm-column", cfg.arm_column, "column that splits the file into arms");
    sub->add_option("--arms", cfg.arms, "arm label(s) to use")->delimiter(',');
  };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--family", cfg.family, "exp | weibull")->capture_default_str();
    auto* a = sub->add_option("--alpha", alpha_text, "single DPD tuning parameter");
    sub->add_option("--alpha-grid", alpha_grid_text, "a:b:step or comma list (default 0:1:0.1)")->excludes(a);
    sub->add_option("--level", cfg.level, "significance level")->capture_default_str();
    sub->add_option("--lambda", lambda_text, "model | empirical Lambda-hat");
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out,-o", cfg.out, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "random seed (env CENSWALD_SEED)");
    sub->add_option("--workers", workers, "worker threads (env CENSWALD_WORKERS)");
    sub->add_flag("--quiet,-q", cfg.quiet, "no console report");
  };

  auto* fit = app.add_subcommand("fit", "MDPDE fits over an alpha grid");
  add_data(fit);
  add_model(fit);
  add_common(fit);

  auto* test = app.add_subcommand("test", "one-sample Wald-type tests");
  add_data(test);
  add_model(test);
  add_common(test);
  test->add_option("--hypothesis,-H", cfg.hypotheses, "e.g. 'shape=1' or 'scale=2,shape=5'")->required();

  auto* compare = app.add_subcommand("compare", "two-sample Wald-type tests");
  add_data(compare);
  add_model(compare);
  add_common(compare);
  compare->add_option("--hypothesis,-H", cfg.hypotheses, "e.g. 'theta1=theta2' or 'shape1=shape2 dir=greater'");

  auto* influence = app.add_subcommand("influence", "influence functions at the model");
  add_model(influence);
  add_common(influence);
  influence->add_option("--theta", theta_text, "parameter, comma separated")->required();
  influence->add_option("--t-grid", t_grid_text, "contamination points a:b:step");
  influence->add_option("--hypothesis,-H", cfg.hypotheses, "null hypothesis for IF2 / PIF");
  influence->add_option("--pif-d", d_text, "contiguous direction d for the PIF");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo level/power, MSE, variance ratio");
  add_model(simulate);
  add_common(simulate);
  simulate->add_option("--preset", cfg.preset, "weibull-2-5");
  simulate->add_option("--kind", cfg.kind, "level_power | mse | variance_ratio")->capture_default_str();
  simulate->add_option("--theta", theta_text, "true lifetime parameter");
  simulate->add_option("--n", cfg.n, "sample size")->capture_default_str();
  simulate->add_option("--reps", cfg.replications, "replications")->capture_default_str();
  auto* rate = simulate->add_option("--censoring-rate", cfg.censoring_rate, "target censoring proportion");
  simulate->add_option("--censoring-mean", cfg.censoring_mean, "exponential censoring mean")->excludes(rate);
  simulate->add_option("--contamination", cfg.contamination, "contaminated fraction")->capture_default_str();
  simulate->add_option("--contamination-family", cfg.contamination_family, "exp | weibull");
  simulate->add_option("--contamination-theta", contamination_theta_text, "contaminating parameter (default 5)");
  simulate->add_option("--hypothesis,-H", cfg.hypotheses, "one-sample hypotheses");

  auto* kmplot = app.add_subcommand("kmplot", "KMPL estimate and log-log cumulative hazard");
  add_data(kmplot);
  add_common(kmplot);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    cfg.command = app.get_subcommands().front()->get_name();
    for (const auto& p : inputs) cfg.inputs.emplace_back(p);
    if (!alpha_text.empty()) cfg.alpha_grid = {parse_number(alpha_text)};
    if (!alpha_grid_text.empty()) cfg.alpha_grid = parse_grid(alpha_grid_text);
    if (!theta_text.empty()) cfg.theta = parse_list(theta_text);
    if (!t_grid_text.empty()) cfg.t_grid = parse_grid(t_grid_text);
    if (!d_text.empty()) cfg.pif_direction = parse_list(d_text);
    if (!contamination_theta_text.empty()) cfg.contamination_theta = parse_list(contamination_theta_text);
    if (!lambda_text.empty()) {
      if (lambda_text == "model") {
        cfg.lambda_kind = LambdaKind::Model;
      } else if (lambda_text == "empirical") {
        cfg.lambda_kind = LambdaKind::Empirical;
      } else {
        throw InvalidArgument("--lambda must be model or empirical");
      }
    }
    if (seed) {
      cfg.seed = *seed;
    } else if (const char* env = std::getenv("CENSWALD_SEED")) {
      cfg.seed = static_cast<std::uint64_t>(std::stoull(env));
    }
    if (workers) {
      cfg.workers = *workers;
    } else if (const char* env = std::getenv("CENSWALD_WORKERS")) {
      cfg.workers = static_cast<unsigned>(std::stoul(env));
    }
    if (cfg.workers == 0) throw InvalidArgument("workers must be at least 1");
  } catch (const Error& e) {
    error_json(err, "invalid_argument", e.what());
    return 2;
  } catch (const std::logic_error& e) {
    error_json(err, "invalid_argument", std::string("bad environment override: ") + e.what());
    return 2;
  }
  return run(cfg, out, err);
}

}  // namespace censwald::cli
