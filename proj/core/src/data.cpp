#include "censwald/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "censwald/error.hpp"
#include "censwald/quadrature.hpp"
#include "censwald/rng.hpp"

#ifndef CENSWALD_DEFAULT_DATA_DIR
#define CENSWALD_DEFAULT_DATA_DIR "data"
#endif

namespace censwald {

bool canonical_less(const CensoredObservation& a, const CensoredObservation& b) noexcept {
  if (a.z != b.z) return a.z < b.z;
  return a.delta > b.delta;
}

CensoredSample::CensoredSample(std::vector<CensoredObservation> observations) : obs_(std::move(observations)) {
  if (obs_.empty()) throw InvalidArgument("censored sample must contain at least one observation");
  for (std::size_t i = 0; i < obs_.size(); ++i) {
    const auto& o = obs_[i];
    if (!std::isfinite(o.z) || o.z < 0.0) {
      throw InvalidArgument("observation " + std::to_string(i) + ": time must be finite and >= 0");
    }
    if (o.delta != 0 && o.delta != 1) {
      throw InvalidArgument("observation " + std::to_string(i) + ": status must be 0 or 1");
    }
  }
  std::stable_sort(obs_.begin(), obs_.end(), canonical_less);
  times_.reserve(obs_.size());
  for (const auto& o : obs_) {
    times_.push_back(o.z);
    events_ += static_cast<std::size_t>(o.delta);
  }
}

namespace {
std::vector<CensoredObservation> zip(std::span<const double> times, std::span<const int> status) {
  if (times.size() != status.size()) throw InvalidArgument("times and status differ in length");
  std::vector<CensoredObservation> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) out[i] = {times[i], status[i]};
  return out;
}
}  // namespace

CensoredSample::CensoredSample(std::span<const double> times, std::span<const int> status)
    : CensoredSample(zip(times, status)) {}

CensoredSample CensoredSample::scaled(double c) const {
  if (!(c > 0.0)) throw InvalidArgument("scale factor must be positive");
  std::vector<CensoredObservation> out(obs_);
  for (auto& o : out) o.z *= c;
  return CensoredSample(std::move(out));
}

CensoredSample CensoredSample::with(CensoredObservation extra) const {
  std::vector<CensoredObservation> out(obs_);
  out.push_back(extra);
  return CensoredSample(std::move(out));
}

// ---------------------------------------------------------------------------------------------
// CSV

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(trim(current));
  return fields;
}

struct RawRow {
  std::size_t line;
  std::vector<std::string> fields;
};

struct RawTable {
  std::vector<std::string> header;
  std::vector<RawRow> rows;

  std::size_t column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError("missing column", 1, name);
    return static_cast<std::size_t>(it - header.begin());
  }
};

RawTable read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file '" + path.string() + "'");
  RawTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    if (table.header.empty()) {
      table.header = split_csv_line(line);
      continue;
    }
    auto fields = split_csv_line(line);
    if (fields.size() != table.header.size()) {
      throw DataError("expected " + std::to_string(table.header.size()) + " fields, found " +
                          std::to_string(fields.size()),
                      line_no, "");
    }
    table.rows.push_back({line_no, std::move(fields)});
  }
  if (table.header.empty()) throw DataError("empty file '" + path.string() + "'");
  if (table.rows.empty()) throw DataError("file '" + path.string() + "' has a header but no data rows");
  return table;
}

CensoredObservation parse_row(const RawRow& row, std::size_t tcol, std::size_t scol, const CsvColumns& names) {
  const std::string& ts = row.fields[tcol];
  double z = 0.0;
  const auto tr = std::from_chars(ts.data(), ts.data() + ts.size(), z);
  if (ts.empty() || tr.ec != std::errc() || tr.ptr != ts.data() + ts.size() || !std::isfinite(z)) {
    throw DataError("unparsable time value '" + ts + "'", row.line, names.time);
  }
  if (z < 0.0) throw DataError("negative time value '" + ts + "'", row.line, names.time);
  const std::string& ss = row.fields[scol];
  double status = -1.0;
  const auto sr = std::from_chars(ss.data(), ss.data() + ss.size(), status);
  if (ss.empty() || sr.ec != std::errc() || sr.ptr != ss.data() + ss.size() || (status != 0.0 && status != 1.0)) {
    throw DataError("status value '" + ss + "' is not 0 or 1", row.line, names.status);
  }
  return {z, static_cast<int>(status)};
}

}  // namespace

CensoredSample ingest_csv(const std::filesystem::path& path, const CsvColumns& columns) {
  const RawTable table = read_table(path);
  const std::size_t tcol = table.column(columns.time);
  const std::size_t scol = table.column(columns.status);
  std::vector<CensoredObservation> obs;
  obs.reserve(table.rows.size());
  for (const auto& row : table.rows) obs.push_back(parse_row(row, tcol, scol, columns));
  return CensoredSample(std::move(obs));
}

std::map<std::string, CensoredSample> ingest_csv_arms(const std::filesystem::path& path,
                                                      const CsvColumns& columns,
                                                      const std::string& arm_column) {
  const RawTable table = read_table(path);
  const std::size_t tcol = table.column(columns.time);
  const std::size_t scol = table.column(columns.status);
  const std::size_t acol = table.column(arm_column);
  std::map<std::string, std::vector<CensoredObservation>> grouped;
  for (const auto& row : table.rows) {
    const std::string& arm = row.fields[acol];
    if (arm.empty()) throw DataError("empty arm label", row.line, arm_column);
    grouped[arm].push_back(parse_row(row, tcol, scol, columns));
  }
  std::map<std::string, CensoredSample> out;
  for (auto& [label, obs] : grouped) out.emplace(label, CensoredSample(std::move(obs)));
  return out;
}

void write_csv(const CensoredSample& sample, const std::filesystem::path& path, const CsvColumns& columns) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file '" + path.string() + "'");
  out << columns.time << ',' << columns.status << '\n';
  out << std::setprecision(17);
  for (const auto& o : sample.observations()) out << o.z << ',' << o.delta << '\n';
}

// ---------------------------------------------------------------------------------------------
// Simulation

void SyntheticDesign::validate() const {
  lifetime.get().validate(lifetime.theta);
  if (!(censoring_mean > 0.0) || !std::isfinite(censoring_mean)) {
    throw InvalidArgument("censoring mean must be positive");
  }
  if (!(contamination_fraction >= 0.0 && contamination_fraction < 1.0)) {
    throw InvalidArgument("contamination fraction must lie in [0, 1)");
  }
  if (contamination_fraction > 0.0) contamination.get().validate(contamination.theta);
}

namespace {

template <class Visit>
void draw(const SyntheticDesign& design, std::size_t n, std::uint64_t stream, Visit&& visit) {
  design.validate();
  if (n == 0) throw InvalidArgument("simulate: n must be at least 1");
  Xoshiro256 rng = Xoshiro256::for_stream(design.seed, stream);
  const Family& clean = design.lifetime.get();
  for (std::size_t i = 0; i < n; ++i) {
    // The mixing draw is always consumed so eps = 0 reproduces the clean stream exactly.
    const bool contaminated = rng.uniform() < design.contamination_fraction;
    const double x = contaminated ? design.contamination.get().quantile(rng.uniform(), design.contamination.theta)
                                  : clean.quantile(rng.uniform(), design.lifetime.theta);
    const double c = rng.exponential(design.censoring_mean);
    visit(contaminated, x, c);
  }
}

}  // namespace

CensoredSample simulate(const SyntheticDesign& design, std::size_t n, std::uint64_t stream) {
  std::vector<CensoredObservation> obs;
  obs.reserve(n);
  draw(design, n, stream, [&](bool, double x, double c) {
    obs.push_back({std::min(x, c), x <= c ? 1 : 0});
  });
  return CensoredSample(std::move(obs));
}

std::size_t simulate_contaminated_count(const SyntheticDesign& design, std::size_t n, std::uint64_t stream) {
  std::size_t count = 0;
  draw(design, n, stream, [&](bool contaminated, double, double) { count += contaminated ? 1 : 0; });
  return count;
}

double censoring_probability(const LifetimeModel& model, double censoring_mean) {
  const Family& fam = model.get();
  fam.validate(model.theta);
  if (!(censoring_mean > 0.0)) throw InvalidArgument("censoring mean must be positive");
  const double scale = fam.scale(model.theta);
  // P(C < X) = int (1 - exp(-x / m)) f(x) dx, on x = scale * e^s.
  auto integrand = [&](double s) {
    const double x = scale * std::exp(s);
    if (!(x > 0.0) || !std::isfinite(x)) return std::array<double, 1>{0.0};
    const double fx = std::exp(fam.log_density(x, model.theta)) * x;
    return std::array<double, 1>{-std::expm1(-x / censoring_mean) * fx};
  };
  quad::Options opt;
  opt.abs_tol = 1e-12;
  opt.rel_tol = 1e-10;
  return quad::integrate_real_line<1>(integrand, 0.0, opt)[0];
}

double censoring_mean_for_rate(const LifetimeModel& model, double target_rate) {
  if (!(target_rate > 0.0 && target_rate < 1.0)) {
    throw InvalidArgument("target censoring rate must lie in (0, 1)");
  }
  const double scale = model.get().scale(model.theta);
  auto g = [&](double log_m) { return censoring_probability(model, std::exp(log_m)) - target_rate; };
  double lo = std::log(scale) - 30.0;
  double hi = std::log(scale) + 30.0;
  const double glo = g(lo);
  const double ghi = g(hi);
  if (!(glo > 0.0 && ghi < 0.0)) {
    throw NumericalError("censoring_mean_for_rate: rate " + std::to_string(target_rate) +
                         " is not attainable in the search bracket");
  }
  std::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(
      g, lo, hi, glo, ghi, boost::math::tools::eps_tolerance<double>(50), iters);
  return std::exp(0.5 * (root.first + root.second));
}

std::filesystem::path bundled_dataset(const std::string& name) {
  const std::string file = name + ".csv";
  if (const char* env = std::getenv("CENSWALD_DATA_DIR"); env != nullptr && *env != '\0') {
    const auto p = std::filesystem::path(env) / file;
    if (std::filesystem::exists(p)) return p;
  }
  const auto p = std::filesystem::path(CENSWALD_DEFAULT_DATA_DIR) / file;
  if (std::filesystem::exists(p)) return p;
  throw DataError("bundled dataset '" + name + "' not found (set CENSWALD_DATA_DIR)");
}

}  // namespace censwald
