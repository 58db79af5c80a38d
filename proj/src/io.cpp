#include "sphfit/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sphfit/error.hpp"

namespace sphfit::io {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  return out;
}

bool parse_double(const std::string& s, double& v) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  return ec == std::errc{} && p == end;
}

// Numeric rows of a CSV file; a leading non-numeric line is taken as the header.
std::vector<std::vector<double>> read_table(const std::string& path, std::size_t& width) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'", "path=" + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split(line);
    std::vector<double> row(cells.size());
    bool numeric = true;
    for (std::size_t i = 0; i < cells.size() && numeric; ++i) numeric = parse_double(cells[i], row[i]);
    if (!numeric) {
      if (rows.empty() && width == 0) {
        width = cells.size();
        continue;
      }
      throw IoError("malformed number in '" + path + "' line " + std::to_string(lineno),
                    "path=" + path + " line=" + std::to_string(lineno));
    }
    if (width == 0) width = row.size();
    if (row.size() != width)
      throw IoError("wrong column count in '" + path + "' line " + std::to_string(lineno),
                    "path=" + path + " line=" + std::to_string(lineno));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("no data rows in '" + path + "'", "path=" + path);
  return rows;
}

Eigen::MatrixXd coords_of(const std::vector<std::vector<double>>& rows, std::size_t dims,
                          const std::string& path, bool lenient) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(dims), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double nrm = 0.0;
    for (std::size_t k = 0; k < dims; ++k) {
      x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = rows[i][k];
      nrm += rows[i][k] * rows[i][k];
    }
    if (!lenient && std::abs(std::sqrt(nrm) - 1.0) > 1e-6)
      throw IoError("point " + std::to_string(i) + " in '" + path + "' is not of unit norm",
                    "path=" + path + " row=" + std::to_string(i));
  }
  return x;
}

std::string header(int dims, const char* extra) {
  std::string h;
  for (int k = 0; k < dims; ++k) h += (k ? ",x" : "x") + std::to_string(k);
  if (extra) h += std::string(",") + extra;
  return h + "\n";
}

void open_out(std::ofstream& out, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  out.open(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'", "path=" + path);
}

std::string csv(const Eigen::MatrixXd& x, const double* extra) {
  std::string s;
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    for (Eigen::Index k = 0; k < x.rows(); ++k) {
      if (k) s += ',';
      s += format_double(x(k, i));
    }
    if (extra) s += ',' + format_double(extra[i]);
    s += '\n';
  }
  return s;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out;
  open_out(out, path);
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'", "path=" + path);
}

PointSet read_points_csv(const std::string& path, bool lenient) {
  std::size_t width = 0;
  const auto rows = read_table(path, width);
  if (width < 2) throw IoError("point file needs at least 2 columns", "path=" + path);
  return PointSet(coords_of(rows, width, path, lenient), path);
}

void write_points_csv(const std::string& path, const PointSet& pts) {
  write_text(path, header(pts.dim() + 1, nullptr) + csv(pts.coords(), nullptr));
}

LabeledData read_labeled_csv(const std::string& path, bool lenient) {
  std::size_t width = 0;
  const auto rows = read_table(path, width);
  if (width < 3) throw IoError("labeled file needs point columns and a y column", "path=" + path);
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) y[static_cast<Eigen::Index>(i)] = rows[i][width - 1];
  return LabeledData(PointSet(coords_of(rows, width - 1, path, lenient), path), std::move(y));
}

void write_labeled_csv(const std::string& path, const LabeledData& data) {
  write_text(path, header(data.inputs.dim() + 1, "y") + csv(data.inputs.coords(), data.outputs.data()));
}

QuadratureRule read_rule(const std::string& path) {
  std::size_t width = 0;
  const auto rows = read_table(path, width);
  if (width < 3) throw IoError("rule file needs point columns and a w column", "path=" + path);
  std::vector<double> w(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    w[i] = rows[i][width - 1];
    if (!(w[i] >= 0)) throw IoError("negative weight in '" + path + "' row " + std::to_string(i), "path=" + path);
  }
  QuadratureRule rule{PointSet(coords_of(rows, width - 1, path, false), path), std::move(w), 0, 0.0};
  if (std::filesystem::exists(path + ".json")) {
    const json meta = read_json(path + ".json");
    rule.degree = meta.value("degree", 0);
    rule.residual = meta.value("residual", 0.0);
  }
  return rule;
}

void write_rule(const std::string& path, const QuadratureRule& rule) {
  write_text(path, header(rule.nodes.dim() + 1, "w") + csv(rule.nodes.coords(), rule.weights.data()));
  write_json(path + ".json", json{{"degree", rule.degree},
                                  {"residual", rule.residual},
                                  {"c1_observed", rule.c1_observed()}});
}

json kernel_to_json(const Kernel& kernel) {
  const KernelTag& t = kernel.tag();
  json j{{"family", to_string(t.family)}, {"d", t.d}};
  switch (t.family) {
    case KernelFamily::sobolev:
      j["gamma"] = t.parameter;
      j["truncation"] = kernel.truncation();
      break;
    case KernelFamily::gaussian_series: j["tau"] = t.parameter; break;
    case KernelFamily::gaussian_chordal: j["sigma"] = t.parameter; break;
    case KernelFamily::wendland: break;
    case KernelFamily::custom: {
      std::vector<double> c;
      for (int k = 0; k <= kernel.truncation(); ++k) c.push_back(kernel.coefficient(k));
      j["coefficients"] = c;
      break;
    }
  }
  return j;
}

Kernel kernel_from_json(const json& j) {
  try {
    const KernelFamily f = parse_kernel_family(j.at("family").get<std::string>());
    const int d = j.value("d", 2);
    switch (f) {
      case KernelFamily::sobolev: {
        SobolevOptions o;
        if (j.contains("truncation")) o.max_truncation = j.at("truncation").get<int>();
        return make_sobolev(d, j.at("gamma").get<double>(), o);
      }
      case KernelFamily::gaussian_series: return make_gaussian_series(d, j.at("tau").get<double>());
      case KernelFamily::gaussian_chordal: return make_gaussian_chordal(j.at("sigma").get<double>(), d);
      case KernelFamily::wendland: return make_wendland(d);
      case KernelFamily::custom: return make_custom(d, j.at("coefficients").get<std::vector<double>>());
    }
  } catch (const json::exception& e) {
    throw InvalidArgument("io", std::string("malformed kernel spec: ") + e.what());
  }
  throw InvalidArgument("io", "malformed kernel spec");
}

json to_json(const LocalEstimator& est) {
  json centers = json::array();
  const Eigen::MatrixXd& x = est.centers().coords();
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < x.rows(); ++k) row.push_back(x(k, i));
    centers.push_back(std::move(row));
  }
  return json{{"kernel_tag", kernel_to_json(est.kernel())},
              {"sample_count", est.sample_count()},
              {"centers", std::move(centers)},
              {"coeffs", std::vector<double>(est.coeffs().data(), est.coeffs().data() + est.coeffs().size())}};
}

LocalEstimator local_estimator_from_json(const json& j) {
  try {
    const auto& c = j.at("centers");
    if (!c.is_array() || c.empty()) throw InvalidArgument("io", "estimator has no centers");
    const std::size_t dims = c.front().size();
    Eigen::MatrixXd x(static_cast<Eigen::Index>(dims), static_cast<Eigen::Index>(c.size()));
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i].size() != dims) throw InvalidArgument("io", "ragged center list");
      for (std::size_t k = 0; k < dims; ++k)
        x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = c[i][k].get<double>();
    }
    const auto a = j.at("coeffs").get<std::vector<double>>();
    return LocalEstimator(PointSet(std::move(x)),
                          Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size())),
                          kernel_from_json(j.at("kernel_tag")), j.at("sample_count").get<std::size_t>());
  } catch (const json::exception& e) {
    throw InvalidArgument("io", std::string("malformed estimator: ") + e.what());
  }
}

json to_json(const GlobalEstimator& est) {
  json comps = json::array();
  for (const auto& c : est.components())
    comps.push_back(json{{"server_id", c.server_id}, {"weight", c.weight}, {"estimator", to_json(c.estimator)}});
  return json{{"total_samples", est.total_samples()}, {"components", std::move(comps)}};
}

GlobalEstimator global_estimator_from_json(const json& j) {
  try {
    std::vector<GlobalEstimator::Component> comps;
    int next = 0;
    for (const auto& c : j.at("components"))
      comps.push_back({c.value("server_id", next++), c.at("weight").get<double>(),
                       local_estimator_from_json(c.at("estimator"))});
    return GlobalEstimator(std::move(comps), j.at("total_samples").get<std::size_t>());
  } catch (const json::exception& e) {
    throw InvalidArgument("io", std::string("malformed global estimator: ") + e.what());
  }
}

json to_json(const BandLimited& f) {
  json c = json::array();
  for (const auto& [idx, v] : f.coeffs()) c.push_back(json::array({idx.degree, idx.order, v}));
  return json{{"d", f.dim()}, {"max_degree", f.max_degree()}, {"coeffs", std::move(c)}};
}

BandLimited bandlimited_from_json(const json& j) {
  try {
    BandLimited f(j.at("d").get<int>(), j.at("max_degree").get<int>());
    for (const auto& c : j.at("coeffs"))
      f.set({c.at(0).get<int>(), c.at(1).get<int>()}, c.at(2).get<double>());
    return f;
  } catch (const json::exception& e) {
    throw InvalidArgument("io", std::string("malformed band-limited function: ") + e.what());
  }
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'", "path=" + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError("invalid JSON in '" + path + "': " + e.what(), "path=" + path);
  }
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace sphfit::io
